//! Flat key-value run configuration.
//!
//! A config file holds one `key = value` pair per line, `#` starts a comment.
//! Keys are the long flag names (`kladder`, `beta`, `seed`, ...) plus `command`
//! and `threads`. Flags given on the command line override the file.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use lowlying::arith::gcd;
use lowlying::characters::character_by_label;
use lowlying::testfuncs::{check_support, fejer, SymmetryGroup};
use serde::Serialize;

pub const THREADS_ENV: &str = "LOWLYING_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    GaussCheck,
    HeckeTable,
    Weights,
    CombVerify,
    PrimeSums,
    TraceCheck,
    Moments,
    RmtCompare,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::GaussCheck,
        Command::HeckeTable,
        Command::Weights,
        Command::CombVerify,
        Command::PrimeSums,
        Command::TraceCheck,
        Command::Moments,
        Command::RmtCompare,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Command::GaussCheck => "gauss-check",
            Command::HeckeTable => "hecke-table",
            Command::Weights => "weights",
            Command::CombVerify => "comb-verify",
            Command::PrimeSums => "prime-sums",
            Command::TraceCheck => "trace-check",
            Command::Moments => "moments",
            Command::RmtCompare => "rmt-compare",
        }
    }
}

impl FromStr for Command {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| ConfigError(format!("unknown command {s:?}")))
    }
}

/// A configuration problem, reported as a usage error.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Parse the flat `key = value` format.
pub fn parse_flat(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| ConfigError(format!("line {}: expected key = value", i + 1)))?;
        let key = k.trim().replace('_', "-");
        if out.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(ConfigError(format!("line {}: duplicate key {key:?}", i + 1)));
        }
    }
    Ok(out)
}

pub fn read_flat(path: &Path) -> Result<BTreeMap<String, String>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    parse_flat(&text)
}

/// Every parameter of a run after merging defaults, file and flags.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub command: Command,
    pub seed: u64,
    pub digits: u32,
    pub strict: bool,
    #[serde(skip)]
    pub out: PathBuf,
    #[serde(skip)]
    pub threads: Option<usize>,
    pub dmax: u64,
    pub k: u32,
    pub nmax: usize,
    pub chi: i64,
    pub r: u64,
    pub case: (u32, u32),
    pub beta: f64,
    pub qladder: Vec<f64>,
    pub m: u64,
    pub kladder: Vec<u32>,
    pub n: u32,
    pub group: String,
    pub size: usize,
    pub samples: usize,
}

const KEYS: [&str; 21] = [
    "command", "seed", "digits", "strict", "out", "threads", "dmax", "k", "nmax", "chi", "r", "case", "beta",
    "qladder", "m", "kladder", "n", "group", "size", "samples", "config",
];

fn parse_one<T: FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.trim().parse().map_err(|_| ConfigError(format!("{key}: cannot parse {v:?}")))
}

fn parse_list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>, ConfigError> {
    v.split(',').map(|s| parse_one(key, s)).collect()
}

fn parse_bool(key: &str, v: &str) -> Result<bool, ConfigError> {
    match v.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(ConfigError(format!("{key}: expected true or false, got {v:?}"))),
    }
}

impl ExperimentConfig {
    pub fn defaults(command: Command) -> Self {
        let beta = match command {
            Command::PrimeSums => 0.45,
            _ => 0.2,
        };
        ExperimentConfig {
            command,
            seed: 42,
            digits: 50,
            strict: false,
            out: PathBuf::from("out"),
            threads: None,
            dmax: 500,
            k: 12,
            nmax: 30,
            chi: 1,
            r: 1,
            case: (0, 2),
            beta,
            qladder: vec![1e4, 1e6, 1e8],
            m: 2,
            kladder: vec![60, 80, 100, 120, 140],
            n: 2,
            group: "so-even".into(),
            size: 100,
            samples: 10_000,
        }
    }

    /// Merge a key-value map over the defaults of its `command` and validate.
    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self, ConfigError> {
        for key in map.keys() {
            if !KEYS.contains(&key.as_str()) {
                return Err(ConfigError(format!("unknown key {key:?}")));
            }
        }
        let command: Command = map
            .get("command")
            .ok_or_else(|| ConfigError("no command given on the command line or in the config file".into()))?
            .parse()?;
        let mut c = ExperimentConfig::defaults(command);
        for (key, v) in map {
            match key.as_str() {
                "command" | "config" => {}
                "seed" => c.seed = parse_one(key, v)?,
                "digits" => c.digits = parse_one(key, v)?,
                "strict" => c.strict = parse_bool(key, v)?,
                "out" => c.out = PathBuf::from(v),
                "threads" => c.threads = Some(parse_one(key, v)?),
                "dmax" => c.dmax = parse_one(key, v)?,
                "k" => c.k = parse_one(key, v)?,
                "nmax" => c.nmax = parse_one(key, v)?,
                "chi" => c.chi = parse_one(key, v)?,
                "r" => c.r = parse_one(key, v)?,
                "case" => {
                    let l: Vec<u32> = parse_list(key, v)?;
                    if l.len() != 2 {
                        return Err(ConfigError(format!("case: expected m,n, got {v:?}")));
                    }
                    c.case = (l[0], l[1]);
                }
                "beta" => c.beta = parse_one(key, v)?,
                "qladder" => c.qladder = parse_list(key, v)?,
                "m" => c.m = parse_one(key, v)?,
                "kladder" => c.kladder = parse_list(key, v)?,
                "n" => c.n = parse_one(key, v)?,
                "group" => c.group = v.trim().to_string(),
                "size" => c.size = parse_one(key, v)?,
                "samples" => c.samples = parse_one(key, v)?,
                _ => unreachable!(),
            }
        }
        c.validate()?;
        Ok(c)
    }

    fn check_weight(k: u32) -> Result<(), ConfigError> {
        if k % 2 != 0 || k < 12 {
            return Err(ConfigError(format!("weight k = {k} must be even and at least 12")));
        }
        Ok(())
    }

    fn check_character(&self) -> Result<(), ConfigError> {
        let chi = character_by_label(self.chi).map_err(|e| ConfigError(format!("chi = {}: {e}", self.chi)))?;
        let g = gcd(self.r, chi.modulus());
        if self.r == 0 || g != 1 {
            return Err(ConfigError(format!(
                "r = {} must be positive and coprime to D = {} (gcd = {g})",
                self.r,
                chi.modulus()
            )));
        }
        Ok(())
    }

    fn check_beta(&self) -> Result<(), ConfigError> {
        fejer(self.beta).map_err(|e| ConfigError(format!("beta = {}: {e}", self.beta)))?;
        if self.beta >= 1.0 {
            return Err(ConfigError(format!("beta = {} must be below 1", self.beta)));
        }
        Ok(())
    }

    fn check_ladder(&self) -> Result<(), ConfigError> {
        if self.kladder.is_empty() || self.kladder.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ConfigError(format!("kladder {:?} must be non-empty and increasing", self.kladder)));
        }
        self.kladder.iter().try_for_each(|&k| Self::check_weight(k))
    }

    /// Reject inconsistent parameters before any computation.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(10..=1000).contains(&self.digits) {
            return Err(ConfigError(format!("digits = {} must lie in 10..=1000", self.digits)));
        }
        if self.threads == Some(0) {
            return Err(ConfigError("threads must be positive".into()));
        }
        match self.command {
            Command::GaussCheck => {
                if self.dmax == 0 {
                    return Err(ConfigError("dmax must be positive".into()));
                }
            }
            Command::HeckeTable => {
                Self::check_weight(self.k)?;
                if self.nmax == 0 {
                    return Err(ConfigError("nmax must be positive".into()));
                }
            }
            Command::Weights => {
                Self::check_weight(self.k)?;
                self.check_character()?;
            }
            Command::CombVerify => {
                if self.nmax > 40 {
                    return Err(ConfigError(format!("nmax = {} is above 40", self.nmax)));
                }
            }
            Command::PrimeSums => {
                let (m, n) = self.case;
                if m > n || (n - m) % 2 != 0 || n == 0 {
                    return Err(ConfigError(format!("case ({m}, {n}) needs m ≤ n, m ≡ n mod 2, n ≥ 1")));
                }
                self.check_beta()?;
                self.check_character()?;
                if self.qladder.is_empty() || self.qladder.iter().any(|&q| !(q > 1.0) || q > 1e12) {
                    return Err(ConfigError(format!("qladder {:?} must hold values in (1, 1e12]", self.qladder)));
                }
            }
            Command::TraceCheck => {
                self.check_ladder()?;
                self.check_character()?;
                if self.m == 0 {
                    return Err(ConfigError("m must be positive".into()));
                }
            }
            Command::Moments => {
                self.check_ladder()?;
                self.check_character()?;
                self.check_beta()?;
                if self.n == 0 {
                    return Err(ConfigError("n must be positive".into()));
                }
                if !check_support(&fejer(self.beta).expect("checked"), self.n) {
                    return Err(ConfigError(format!(
                        "β = {} ≥ 1/(2n) = {} violates the moment hypothesis supp φ̂ ⊂ (−1/(2n), 1/(2n))",
                        self.beta,
                        1.0 / (2.0 * self.n as f64)
                    )));
                }
            }
            Command::RmtCompare => {
                let g = SymmetryGroup::parse(&self.group).map_err(|e| ConfigError(e.to_string()))?;
                self.check_beta()?;
                if self.n == 0 {
                    return Err(ConfigError("n must be positive".into()));
                }
                if self.samples < lowlying::rmt::MIN_SAMPLES {
                    return Err(ConfigError(format!(
                        "samples = {} is below {}",
                        self.samples,
                        lowlying::rmt::MIN_SAMPLES
                    )));
                }
                let parity_ok = match g {
                    SymmetryGroup::SoEven | SymmetryGroup::Sp => self.size % 2 == 0,
                    SymmetryGroup::SoOdd => self.size % 2 == 1,
                    _ => true,
                };
                if self.size < 2 || !parity_ok {
                    return Err(ConfigError(format!("size {} does not fit group {}", self.size, g.name())));
                }
            }
        }
        Ok(())
    }

    pub fn group(&self) -> SymmetryGroup {
        SymmetryGroup::parse(&self.group).expect("validated")
    }
}
