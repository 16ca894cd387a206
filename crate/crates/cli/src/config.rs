//! Flag resolution with optional key=value defaults files.
//!
//! Every tunable can come from three places, in order of precedence: an
//! explicit command-line flag, an entry in the file passed via `--config`,
//! and finally the benchmark default. File keys use the same spelling as
//! the long flags (`accept-worse-prob=0.2`); `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use isingopt_core::{
    AlgorithmConfig, AnnealingConfig, CellularConfig, IsingConfig, LatticeDims, MixtureConfig,
    MutationConfig, VariationParams,
};

/// Algorithm selector shared by `run`, `bench`, and `ensemble`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgoKind {
    Ising,
    Cellular,
    SimAnnealing,
    Mutation,
    Mixture,
    RandomSearch,
}

impl FromStr for AlgoKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "ising" => AlgoKind::Ising,
            "cellular" => AlgoKind::Cellular,
            "sim-annealing" => AlgoKind::SimAnnealing,
            "mutation" => AlgoKind::Mutation,
            "mixture" => AlgoKind::Mixture,
            "random-search" => AlgoKind::RandomSearch,
            _ => return Err(format!("unknown algorithm '{s}'")),
        })
    }
}

/// Lattice dimensionality flag: `1` for a ring, `2` for a torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DimsArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
}

impl FromStr for DimsArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "1" => Ok(DimsArg::One),
            "2" => Ok(DimsArg::Two),
            _ => Err(format!("dims must be 1 or 2, got '{s}'")),
        }
    }
}

impl From<DimsArg> for LatticeDims {
    fn from(d: DimsArg) -> Self {
        match d {
            DimsArg::One => LatticeDims::One,
            DimsArg::Two => LatticeDims::Two,
        }
    }
}

/// Algorithm parameters as raw optional flags. Flags that do not apply to
/// the chosen algorithm are accepted and ignored, so one defaults file can
/// serve several invocations.
#[derive(Debug, Args)]
pub struct AlgoArgs {
    /// Algorithm to run.
    #[arg(long, value_enum)]
    pub algo: Option<AlgoKind>,
    /// Lattice dimensionality (lattice algorithms).
    #[arg(long, value_enum)]
    pub dims: Option<DimsArg>,
    /// Lattice width (lattice algorithms).
    #[arg(long)]
    pub width: Option<usize>,
    /// Lattice height; must be 1 when dims is 1.
    #[arg(long)]
    pub height: Option<usize>,
    /// Inverse temperature of the acceptance rule (ising).
    #[arg(long)]
    pub beta: Option<f64>,
    /// Annealing schedule scale: step i runs at beta0 * sqrt(i) (sim-annealing).
    #[arg(long)]
    pub beta0: Option<f64>,
    /// Fixed probability of accepting a worsening proposal (cellular).
    #[arg(long)]
    pub accept_worse_prob: Option<f64>,
    /// Population size (mixture).
    #[arg(long)]
    pub pop_size: Option<usize>,
    /// Probability of keeping a child that beats neither parent (mixture).
    #[arg(long)]
    pub keep_prob: Option<f64>,
    /// Standard deviation of the normal mutation step.
    #[arg(long)]
    pub mutation_std: Option<f64>,
    /// Probability that a proposal is the normal step rather than the
    /// neighbor average.
    #[arg(long)]
    pub mix_probability: Option<f64>,
}

/// Parsed `--config` file. Resolvers remove the keys they understand;
/// anything left over at the end is a typo and rejected.
pub struct FileConfig {
    path: PathBuf,
    entries: BTreeMap<String, String>,
}

impl FileConfig {
    /// Loads the file if a path was given; no path means an empty store.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self { path: PathBuf::new(), entries: BTreeMap::new() });
        };
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading config file {}", path.display()))?;
        let mut entries = BTreeMap::new();
        for (number, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("{}:{}: expected key=value, got '{line}'", path.display(), number + 1);
            };
            entries.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Self { path: path.to_path_buf(), entries })
    }

    /// Removes and parses `key`, if present.
    pub fn take<T: FromStr>(&mut self, key: &str) -> Result<Option<T>>
    where
        T::Err: Display,
    {
        let Some(raw) = self.entries.remove(key) else {
            return Ok(None);
        };
        match raw.parse() {
            Ok(value) => Ok(Some(value)),
            Err(err) => bail!("{}: key '{key}': invalid value '{raw}': {err}", self.path.display()),
        }
    }

    /// Removes `key` and splits its value on commas.
    pub fn take_list<T: FromStr>(&mut self, key: &str) -> Result<Option<Vec<T>>>
    where
        T::Err: Display,
    {
        let Some(raw) = self.entries.remove(key) else {
            return Ok(None);
        };
        let mut values = Vec::new();
        for part in raw.split(',') {
            let part = part.trim();
            match part.parse() {
                Ok(value) => values.push(value),
                Err(err) => bail!(
                    "{}: key '{key}': invalid entry '{part}': {err}",
                    self.path.display()
                ),
            }
        }
        Ok(Some(values))
    }

    /// Fails on any entry no resolver consumed.
    pub fn finish(self) -> Result<()> {
        if let Some(key) = self.entries.keys().next() {
            bail!("{}: unknown key '{key}'", self.path.display());
        }
        Ok(())
    }
}

/// Flag, then file, then default.
pub fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

/// Resolves the full algorithm configuration. All algorithm keys are
/// consumed from the file regardless of which algorithm is chosen.
pub fn resolve_algorithm(args: &AlgoArgs, file: &mut FileConfig) -> Result<AlgorithmConfig> {
    let algo = pick(args.algo, file.take("algo")?, AlgoKind::Ising);
    let dims: LatticeDims = pick(args.dims, file.take("dims")?, DimsArg::Two).into();
    let (default_width, default_height) = match dims {
        LatticeDims::One => (900, 1),
        LatticeDims::Two => (30, 30),
    };
    let width = pick(args.width, file.take("width")?, default_width);
    let height = pick(args.height, file.take("height")?, default_height);
    let beta = pick(args.beta, file.take("beta")?, 100.0);
    let beta0 = pick(args.beta0, file.take("beta0")?, 1.0);
    let accept_worse_prob = pick(args.accept_worse_prob, file.take("accept-worse-prob")?, 0.10);
    let pop_size = pick(args.pop_size, file.take("pop-size")?, 100);
    let keep_prob = pick(args.keep_prob, file.take("keep-prob")?, 0.10);
    let variation = VariationParams {
        mutation_std: pick(args.mutation_std, file.take("mutation-std")?, 100.0),
        mix_probability: pick(args.mix_probability, file.take("mix-probability")?, 0.5),
    };

    Ok(match algo {
        AlgoKind::Ising => {
            AlgorithmConfig::Ising(IsingConfig { dims, width, height, beta, variation })
        }
        AlgoKind::Cellular => AlgorithmConfig::Cellular(CellularConfig {
            dims,
            width,
            height,
            accept_worse_prob,
            variation,
        }),
        AlgoKind::SimAnnealing => {
            AlgorithmConfig::SimAnnealing(AnnealingConfig { beta0, variation })
        }
        AlgoKind::Mutation => AlgorithmConfig::Mutation(MutationConfig { variation }),
        AlgoKind::Mixture => AlgorithmConfig::Mixture(MixtureConfig { pop_size, keep_prob }),
        AlgoKind::RandomSearch => AlgorithmConfig::RandomSearch,
    })
}
