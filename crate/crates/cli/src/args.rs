//! Command-line flags. Every flag maps onto a config key of the same name.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{read_flat, ConfigError, ExperimentConfig, THREADS_ENV};

#[derive(Parser, Debug)]
#[command(name = "lowlying", version, about = "Low-lying zero experiments for twisted level-one cusp forms")]
pub struct Cli {
    /// Flat key = value file; flags override its entries.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Working precision in decimal digits.
    #[arg(long, global = true)]
    pub digits: Option<u32>,
    /// Let failed trend and Monte-Carlo checks fail the run.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Output directory for data, summary and timings.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Sub>,
}

#[derive(Subcommand, Debug)]
pub enum Sub {
    /// τ(χ)² against χ(−1)D for all real primitive characters up to dmax.
    GaussCheck {
        #[arg(long)]
        dmax: Option<u64>,
    },
    /// Fourier coefficients and Hecke eigenvalues of the eigenforms of weight k.
    HeckeTable {
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        nmax: Option<usize>,
    },
    /// Central values, Petersson norms and weights of one family.
    Weights {
        #[arg(long)]
        k: Option<u32>,
        #[command(flatten)]
        twist: Twist,
    },
    /// Exact combinatorial identities up to order nmax.
    CombVerify {
        #[arg(long)]
        nmax: Option<usize>,
    },
    /// Prime sums along a ladder of conductors.
    PrimeSums {
        /// Orders m,n of the sum.
        #[arg(long)]
        case: Option<String>,
        #[command(flatten)]
        twist: Twist,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        qladder: Option<String>,
    },
    /// Weighted averages of λ(m) against their main term along a weight ladder.
    TraceCheck {
        #[arg(long)]
        m: Option<u64>,
        #[command(flatten)]
        twist: Twist,
        #[arg(long)]
        kladder: Option<String>,
    },
    /// Centered moments of the one-level density along a weight ladder.
    Moments {
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        beta: Option<f64>,
        #[command(flatten)]
        twist: Twist,
        #[arg(long)]
        kladder: Option<String>,
    },
    /// Monte-Carlo centered moment over a classical compact group.
    RmtCompare {
        #[arg(long)]
        group: Option<String>,
        #[arg(long)]
        size: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        n: Option<u32>,
    },
}

#[derive(Args, Debug)]
pub struct Twist {
    /// Signed discriminant label of the real primitive character.
    #[arg(long, allow_hyphen_values = true)]
    pub chi: Option<i64>,
    #[arg(long)]
    pub r: Option<u64>,
}

fn put<T: ToString>(m: &mut BTreeMap<String, String>, key: &str, v: &Option<T>) {
    if let Some(v) = v {
        m.insert(key.to_string(), v.to_string());
    }
}

impl Twist {
    fn apply(&self, m: &mut BTreeMap<String, String>) {
        put(m, "chi", &self.chi);
        put(m, "r", &self.r);
    }
}

impl Cli {
    /// The flags as config keys, without the file.
    pub fn overrides(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        put(&mut m, "seed", &self.seed);
        put(&mut m, "digits", &self.digits);
        if self.strict {
            m.insert("strict".into(), "true".into());
        }
        put(&mut m, "out", &self.out.as_ref().map(|p| p.display().to_string()));
        let Some(cmd) = &self.command else { return m };
        let name = match cmd {
            Sub::GaussCheck { dmax } => {
                put(&mut m, "dmax", dmax);
                "gauss-check"
            }
            Sub::HeckeTable { k, nmax } => {
                put(&mut m, "k", k);
                put(&mut m, "nmax", nmax);
                "hecke-table"
            }
            Sub::Weights { k, twist } => {
                put(&mut m, "k", k);
                twist.apply(&mut m);
                "weights"
            }
            Sub::CombVerify { nmax } => {
                put(&mut m, "nmax", nmax);
                "comb-verify"
            }
            Sub::PrimeSums { case, twist, beta, qladder } => {
                put(&mut m, "case", case);
                twist.apply(&mut m);
                put(&mut m, "beta", beta);
                put(&mut m, "qladder", qladder);
                "prime-sums"
            }
            Sub::TraceCheck { m: mm, twist, kladder } => {
                put(&mut m, "m", mm);
                twist.apply(&mut m);
                put(&mut m, "kladder", kladder);
                "trace-check"
            }
            Sub::Moments { n, beta, twist, kladder } => {
                put(&mut m, "n", n);
                put(&mut m, "beta", beta);
                twist.apply(&mut m);
                put(&mut m, "kladder", kladder);
                "moments"
            }
            Sub::RmtCompare { group, size, samples, beta, n } => {
                put(&mut m, "group", group);
                put(&mut m, "size", size);
                put(&mut m, "samples", samples);
                put(&mut m, "beta", beta);
                put(&mut m, "n", n);
                "rmt-compare"
            }
        };
        m.insert("command".into(), name.into());
        m
    }

    /// Defaults, then the config file, then the thread variable, then flags.
    pub fn resolve(&self) -> Result<ExperimentConfig, ConfigError> {
        let mut map = match &self.config {
            Some(p) => read_flat(p)?,
            None => BTreeMap::new(),
        };
        if let Ok(t) = std::env::var(THREADS_ENV) {
            map.insert("threads".into(), t);
        }
        let flags = self.overrides();
        if let (Some(file_cmd), Some(flag_cmd)) = (map.get("command"), flags.get("command")) {
            if file_cmd != flag_cmd {
                return Err(ConfigError(format!(
                    "config file is for {file_cmd:?} but the command line asks for {flag_cmd:?}"
                )));
            }
        }
        map.extend(flags);
        ExperimentConfig::from_map(&map)
    }
}
