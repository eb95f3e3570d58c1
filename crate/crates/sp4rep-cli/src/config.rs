//! Effective configuration: defaults, then a flat `key=value` file, then command-line flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;
use sp4rep::fockbasis::{RepLabel, ScalarIndex, SpinIndex, Truncation};
use sp4rep::sp4::{make_diagonal, random_element};
use sp4rep::{CQuat, HalfInt, Sp4Element, C64};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(CliError::Config(format!("format must be json or csv, got '{s}'"))),
        }
    }
}

/// Everything a command needs; echoed into every output record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliConfig {
    pub varsigma: f64,
    pub s_x2: i32,
    pub l_max: i32,
    pub series_tol: f64,
    pub abel_t: f64,
    pub mc_samples: usize,
    pub seed: u64,
    pub element: String,
    pub format: Format,
}

impl Default for CliConfig {
    fn default() -> Self {
        CliConfig {
            varsigma: 4.0,
            s_x2: 0,
            l_max: 14,
            series_tol: 1e-8,
            abel_t: 0.9,
            mc_samples: 100_000,
            seed: 7,
            element: "identity".into(),
            format: Format::Json,
        }
    }
}

/// Overrides coming from flags; `None` keeps the file or default value.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub varsigma: Option<f64>,
    pub s_x2: Option<i32>,
    pub l_max: Option<i32>,
    pub series_tol: Option<f64>,
    pub abel_t: Option<f64>,
    pub mc_samples: Option<usize>,
    pub seed: Option<u64>,
    pub element: Option<String>,
    pub format: Option<Format>,
}

fn parse_value<T: FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.parse().map_err(|_| CliError::Config(format!("cannot parse value '{v}' for key '{key}'")))
}

impl CliConfig {
    /// Applies `key=value` lines; blank lines and `#` comments are skipped.
    pub fn apply_file_text(&mut self, text: &str) -> Result<(), CliError> {
        let mut seen = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key=value, got '{line}'", n + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if seen.insert(k.to_string(), ()).is_some() {
                return Err(CliError::Config(format!("line {}: duplicate key '{k}'", n + 1)));
            }
            match k {
                "varsigma" => self.varsigma = parse_value(k, v)?,
                "s_x2" | "spin_x2" => self.s_x2 = parse_value(k, v)?,
                "l_max" | "lmax" => self.l_max = parse_value(k, v)?,
                "series_tol" | "tol" => self.series_tol = parse_value(k, v)?,
                "abel_t" => self.abel_t = parse_value(k, v)?,
                "mc_samples" => self.mc_samples = parse_value(k, v)?,
                "seed" => self.seed = parse_value(k, v)?,
                "element" => self.element = v.to_string(),
                "format" => self.format = v.parse()?,
                _ => return Err(CliError::Config(format!("line {}: unknown key '{k}'", n + 1))),
            }
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config file {}: {e}", path.display())))?;
        self.apply_file_text(&text)
    }

    pub fn apply_overrides(&mut self, o: &Overrides) {
        macro_rules! take {
            ($($f:ident),*) => { $(if let Some(v) = o.$f.clone() { self.$f = v; })* };
        }
        take!(varsigma, s_x2, l_max, series_tol, abel_t, mc_samples, seed, element, format);
    }

    pub fn rep(&self) -> Result<RepLabel, CliError> {
        if self.s_x2 < 0 {
            return Err(CliError::Config(format!("s_x2 must be non-negative, got {}", self.s_x2)));
        }
        Ok(RepLabel::new(self.varsigma, HalfInt::from_twice(self.s_x2))?)
    }

    pub fn truncation(&self) -> Result<Truncation, CliError> {
        let t = Truncation { l_max: self.l_max, series_tol: self.series_tol, abel_t: self.abel_t, mc_samples: self.mc_samples };
        t.validate()?;
        Ok(t)
    }

    /// Full validation, run before any command.
    pub fn validate(&self) -> Result<(), CliError> {
        self.rep()?;
        self.truncation()?;
        ElementSpec::parse(&self.element)?;
        Ok(())
    }

    /// Flat `key=value` rendering used in CSV output.
    pub fn to_flat(&self) -> String {
        format!(
            "varsigma={} s_x2={} l_max={} series_tol={} abel_t={} mc_samples={} seed={} element={} format={}",
            self.varsigma,
            self.s_x2,
            self.l_max,
            self.series_tol,
            self.abel_t,
            self.mc_samples,
            self.seed,
            self.element,
            match self.format {
                Format::Json => "json",
                Format::Csv => "csv",
            }
        )
    }
}

/// Group element given on the command line.
///
/// * `identity`
/// * `boost:T` for the pure boost `d(T)`
/// * `random:SEED:TMAX` for `k1 d(t) k2` with seeded compact factors
/// * `kak:PHI,W,X,Y,Z/T/PHI,W,X,Y,Z` for `e^{i phi}` times a real unit quaternion, a boost, and
///   a second compact factor (the quaternions are normalized)
/// * `diag:MU_RE,MU_IM/NU_RE,NU_IM` for the diagonal element with eigen-pair `(mu, nu)`
/// * `explicit:A4R,A4I,A1R,A1I,A2R,A2I,A3R,A3I/B4R,...` with the blocks `a` and `b`
#[derive(Debug, Clone, PartialEq)]
pub enum ElementSpec {
    Identity,
    Boost(f64),
    Random { seed: u64, t_max: f64 },
    Kak { k1: [f64; 5], t: f64, k2: [f64; 5] },
    Diag { mu: C64, nu: C64 },
    Explicit { a: CQuat, b: CQuat },
}

fn numbers(s: &str, n: usize, what: &str) -> Result<Vec<f64>, CliError> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Config(format!("{what}: cannot parse '{s}' as numbers")))?;
    if v.len() != n {
        return Err(CliError::Config(format!("{what}: expected {n} numbers, got {}", v.len())));
    }
    Ok(v)
}

fn quat_from(v: &[f64]) -> CQuat {
    CQuat::new(C64::new(v[0], v[1]), [C64::new(v[2], v[3]), C64::new(v[4], v[5]), C64::new(v[6], v[7])])
}

fn compact_from(p: &[f64; 5]) -> Result<Sp4Element, CliError> {
    let n = (p[1] * p[1] + p[2] * p[2] + p[3] * p[3] + p[4] * p[4]).sqrt();
    if n == 0.0 {
        return Err(CliError::Config("kak: compact factor must be a nonzero quaternion".into()));
    }
    let q = CQuat::from_real(p[1] / n, [p[2] / n, p[3] / n, p[4] / n]).scale(C64::from_polar(1.0, p[0]));
    Ok(Sp4Element::compact(q)?)
}

impl ElementSpec {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let parts: Vec<&str> = if rest.is_empty() { Vec::new() } else { rest.split('/').collect() };
        let bad = |msg: &str| CliError::Config(format!("element '{s}': {msg}"));
        match kind {
            "identity" if parts.is_empty() => Ok(ElementSpec::Identity),
            "boost" if parts.len() == 1 => Ok(ElementSpec::Boost(numbers(parts[0], 1, "boost")?[0])),
            "random" => {
                let (seed, t) = rest.split_once(':').ok_or_else(|| bad("expected random:SEED:TMAX"))?;
                let seed = seed.parse().map_err(|_| bad("seed must be an unsigned integer"))?;
                let t_max: f64 = t.parse().map_err(|_| bad("TMAX must be a number"))?;
                if !(t_max >= 0.0) {
                    return Err(bad("TMAX must be non-negative"));
                }
                Ok(ElementSpec::Random { seed, t_max })
            }
            "kak" if parts.len() == 3 => {
                let k1 = numbers(parts[0], 5, "kak first factor")?;
                let t = numbers(parts[1], 1, "kak boost")?[0];
                let k2 = numbers(parts[2], 5, "kak second factor")?;
                Ok(ElementSpec::Kak { k1: [k1[0], k1[1], k1[2], k1[3], k1[4]], t, k2: [k2[0], k2[1], k2[2], k2[3], k2[4]] })
            }
            "diag" if parts.len() == 2 => {
                let m = numbers(parts[0], 2, "diag mu")?;
                let n = numbers(parts[1], 2, "diag nu")?;
                Ok(ElementSpec::Diag { mu: C64::new(m[0], m[1]), nu: C64::new(n[0], n[1]) })
            }
            "explicit" if parts.len() == 2 => {
                let a = numbers(parts[0], 8, "explicit a")?;
                let b = numbers(parts[1], 8, "explicit b")?;
                Ok(ElementSpec::Explicit { a: quat_from(&a), b: quat_from(&b) })
            }
            _ => Err(bad("expected identity, boost:T, random:SEED:TMAX, kak:.../T/..., diag:MU/NU or explicit:A/B")),
        }
    }

    pub fn build(&self) -> Result<Sp4Element, CliError> {
        Ok(match self {
            ElementSpec::Identity => Sp4Element::IDENTITY,
            ElementSpec::Boost(t) => Sp4Element::boost(*t),
            ElementSpec::Random { seed, t_max } => random_element(*seed, *t_max),
            ElementSpec::Kak { k1, t, k2 } => compact_from(k1)? * Sp4Element::boost(*t) * compact_from(k2)?,
            ElementSpec::Diag { mu, nu } => make_diagonal(*mu, *nu)?,
            ElementSpec::Explicit { a, b } => Sp4Element::new(*a, *b)?,
        })
    }
}

impl fmt::Display for ElementSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Index given as `l,k,m` (scalar) or `l,k,J_x2,M_x2`.
pub fn parse_index(s: &str, rep: &RepLabel) -> Result<SpinIndex, CliError> {
    let v: Vec<i32> = s
        .split(',')
        .map(|x| x.trim().parse::<i32>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Config(format!("index '{s}': expected comma-separated integers")))?;
    match v.as_slice() {
        [l, k, m] if rep.spin == HalfInt::ZERO => Ok(SpinIndex::from_scalar(ScalarIndex::new(*l, *k, *m)?)),
        [l, k, j2, m2] => Ok(SpinIndex::new(rep.spin, *l, *k, HalfInt::from_twice(*j2), HalfInt::from_twice(*m2))?),
        _ => Err(CliError::Config(format!(
            "index '{s}': expected l,k,m for s = 0 or l,k,J_x2,M_x2"
        ))),
    }
}
