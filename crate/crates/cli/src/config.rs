//! Experiment configuration: defaults, a `key = value` file format mirroring the flags,
//! and a stable hash used to stamp outputs.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::PathBuf;
use std::str::FromStr;

use mfleaders::formalism::linspace;
use mfleaders::generators::HolderProfile;
use mfleaders::leaders::FitWindow;
use mfleaders::measures::WeightLaw;
use mfleaders::wavelet::WaveletSpec;
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Mfs1,
    Csv,
}

/// `lo:hi:n`, an inclusive uniform grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        linspace(self.lo, self.hi, self.n)
    }
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, n] = parts.as_slice() else {
            return Err(format!("expected lo:hi:n, found {s:?}"));
        };
        let g = GridSpec {
            lo: lo.trim().parse().map_err(|_| format!("bad lower bound {lo:?}"))?,
            hi: hi.trim().parse().map_err(|_| format!("bad upper bound {hi:?}"))?,
            n: n.trim().parse().map_err(|_| format!("bad point count {n:?}"))?,
        };
        if g.lo.partial_cmp(&g.hi) != Some(std::cmp::Ordering::Less) || g.n < 2 {
            return Err(format!("grid {s:?} needs lo < hi and at least 2 points"));
        }
        Ok(g)
    }
}

impl Display for GridSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.n)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub construction: String,
    pub beta: f64,
    pub h: String,
    pub h_lo: String,
    pub h_hi: String,
    pub lambda: u64,
    /// Series truncation (Davenport terms, Weierstrass `jmax`); 0 selects the generator default.
    pub terms: usize,
    pub b: u32,
    pub weights: Vec<f64>,
    pub law: String,
    pub depth: usize,
    pub s0: f64,
    pub p0: f64,
    pub wavelet: String,
    pub levels: usize,
    /// `None` selects the default window for the input's level count.
    pub fit: Option<(usize, usize)>,
    pub pgrid: GridSpec,
    pub hgrid: GridSpec,
    pub qgrid: GridSpec,
    /// Depth window of the τ regression; `None` uses the second half of the measure's depths.
    pub depths: Option<(usize, usize)>,
    pub points: Vec<f64>,
    pub seed: u64,
    pub out: PathBuf,
    pub format: Format,
    pub tau: bool,
    /// `(alpha, beta)` of the irregularity certificate, off when `None`.
    pub certificate: Option<(f64, f64)>,
    pub oscillation: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            construction: "davenport".into(),
            beta: 2.0,
            h: "0.5".into(),
            h_lo: "0.3".into(),
            h_hi: "0.7".into(),
            lambda: 2,
            terms: 0,
            b: 2,
            weights: vec![0.25, 0.75],
            law: "two-point:0.2,0.8".into(),
            depth: 14,
            s0: 1.0,
            p0: 2.0,
            wavelet: "db4".into(),
            levels: 14,
            fit: None,
            pgrid: GridSpec { lo: -10.0, hi: 10.0, n: 81 },
            hgrid: GridSpec { lo: 0.0, hi: 2.5, n: 251 },
            qgrid: GridSpec { lo: -5.0, hi: 5.0, n: 41 },
            depths: None,
            points: linspace(0.1, 0.9, 16),
            seed: 0,
            out: PathBuf::from("."),
            format: Format::Mfs1,
            tau: false,
            certificate: None,
            oscillation: false,
        }
    }
}

/// Keys accepted in config files and as `--key` flags, in serialisation order.
pub const KEYS: &[&str] = &[
    "construction",
    "beta",
    "h",
    "h-lo",
    "h-hi",
    "lambda",
    "terms",
    "b",
    "weights",
    "law",
    "depth",
    "s0",
    "p0",
    "wavelet",
    "levels",
    "fit",
    "pgrid",
    "hgrid",
    "qgrid",
    "depths",
    "points",
    "seed",
    "out",
    "format",
    "tau",
    "certificate",
    "oscillation",
];

fn invalid(key: &str, reason: impl Display) -> CliError {
    CliError::Validation(format!("{key}: {reason}"))
}

fn number<T: FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.trim().parse().map_err(|_| invalid(key, format!("cannot parse {v:?}")))
}

fn list(key: &str, v: &str) -> Result<Vec<f64>, CliError> {
    v.split(',').filter(|s| !s.trim().is_empty()).map(|s| number(key, s)).collect()
}

fn pair<T: FromStr>(key: &str, v: &str, sep: char) -> Result<(T, T), CliError> {
    let (a, b) = v.split_once(sep).ok_or_else(|| invalid(key, format!("expected a{sep}b, found {v:?}")))?;
    Ok((number(key, a)?, number(key, b)?))
}

fn boolean(key: &str, v: &str) -> Result<bool, CliError> {
    match v.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(invalid(key, format!("expected true or false, found {v:?}"))),
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

/// A profile given as a bare number is constant.
pub fn parse_profile(s: &str) -> mfleaders::Result<HolderProfile> {
    match s.trim().parse::<f64>() {
        Ok(v) => Ok(HolderProfile::constant(v)),
        Err(_) => HolderProfile::parse(s),
    }
}

impl ExperimentConfig {
    pub fn set(&mut self, key: &str, v: &str) -> Result<(), CliError> {
        match key {
            "construction" => self.construction = v.trim().to_string(),
            "beta" => self.beta = number(key, v)?,
            "h" => self.h = v.trim().to_string(),
            "h-lo" => self.h_lo = v.trim().to_string(),
            "h-hi" => self.h_hi = v.trim().to_string(),
            "lambda" => self.lambda = number(key, v)?,
            "terms" => self.terms = number(key, v)?,
            "b" => self.b = number(key, v)?,
            "weights" => self.weights = list(key, v)?,
            "law" => self.law = v.trim().to_string(),
            "depth" => self.depth = number(key, v)?,
            "s0" => self.s0 = number(key, v)?,
            "p0" => self.p0 = number(key, v)?,
            "wavelet" => self.wavelet = v.trim().to_string(),
            "levels" => self.levels = number(key, v)?,
            "fit" => self.fit = if v.trim() == "auto" { None } else { Some(pair(key, v, ':')?) },
            "pgrid" => self.pgrid = v.parse().map_err(|e| invalid(key, e))?,
            "hgrid" => self.hgrid = v.parse().map_err(|e| invalid(key, e))?,
            "qgrid" => self.qgrid = v.parse().map_err(|e| invalid(key, e))?,
            "depths" => self.depths = if v.trim() == "auto" { None } else { Some(pair(key, v, ':')?) },
            "points" => self.points = list(key, v)?,
            "seed" => self.seed = number(key, v)?,
            "out" => self.out = PathBuf::from(v.trim()),
            "format" => {
                self.format = match v.trim() {
                    "mfs1" => Format::Mfs1,
                    "csv" => Format::Csv,
                    other => return Err(invalid(key, format!("expected mfs1 or csv, found {other:?}"))),
                }
            }
            "tau" => self.tau = boolean(key, v)?,
            "certificate" => self.certificate = if v.trim() == "off" { None } else { Some(pair(key, v, ':')?) },
            "oscillation" => self.oscillation = boolean(key, v)?,
            _ => return Err(invalid(key, "unknown key")),
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> String {
        match key {
            "construction" => self.construction.clone(),
            "beta" => self.beta.to_string(),
            "h" => self.h.clone(),
            "h-lo" => self.h_lo.clone(),
            "h-hi" => self.h_hi.clone(),
            "lambda" => self.lambda.to_string(),
            "terms" => self.terms.to_string(),
            "b" => self.b.to_string(),
            "weights" => join(&self.weights),
            "law" => self.law.clone(),
            "depth" => self.depth.to_string(),
            "s0" => self.s0.to_string(),
            "p0" => self.p0.to_string(),
            "wavelet" => self.wavelet.clone(),
            "levels" => self.levels.to_string(),
            "fit" => self.fit.map_or("auto".into(), |(a, b)| format!("{a}:{b}")),
            "pgrid" => self.pgrid.to_string(),
            "hgrid" => self.hgrid.to_string(),
            "qgrid" => self.qgrid.to_string(),
            "depths" => self.depths.map_or("auto".into(), |(a, b)| format!("{a}:{b}")),
            "points" => join(&self.points),
            "seed" => self.seed.to_string(),
            "out" => self.out.display().to_string(),
            "format" => match self.format {
                Format::Mfs1 => "mfs1".into(),
                Format::Csv => "csv".into(),
            },
            "tau" => self.tau.to_string(),
            "certificate" => self.certificate.map_or("off".into(), |(a, b)| format!("{a}:{b}")),
            "oscillation" => self.oscillation.to_string(),
            _ => unreachable!("unknown key {key}"),
        }
    }

    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse_file(text: &str) -> Result<BTreeMap<String, String>, CliError> {
        let mut out = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Validation(format!("config line {}: expected key = value", n + 1)))?;
            let k = k.trim();
            if !KEYS.contains(&k) {
                return Err(CliError::Validation(format!("config line {}: unknown key {k:?}", n + 1)));
            }
            out.insert(k.to_string(), v.trim().to_string());
        }
        Ok(out)
    }

    pub fn to_file_text(&self) -> String {
        KEYS.iter().map(|k| format!("{k} = {}\n", self.get(k))).collect()
    }

    /// Defaults, then the file entries, then the flags.
    pub fn resolve(file: Option<&str>, flags: &[(&str, String)]) -> Result<Self, CliError> {
        let mut c = Self::default();
        if let Some(text) = file {
            for (k, v) in Self::parse_file(text)? {
                c.set(&k, &v)?;
            }
        }
        for (k, v) in flags {
            c.set(k, v)?;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(2..=24).contains(&self.levels) {
            return Err(invalid("levels", format!("{} is outside 2..=24", self.levels)));
        }
        self.wavelet_spec()?;
        if let Some((a, b)) = self.fit {
            if b >= self.levels || a == 0 || b < a + 3 {
                return Err(invalid("fit", format!("{a}:{b} must satisfy 1 <= j1, j1 + 3 <= j2 < levels")));
            }
        }
        if let Some(&x) = self.points.iter().find(|x| !(0.0..1.0).contains(*x)) {
            return Err(invalid("points", format!("{x} lies outside [0, 1)")));
        }
        if self.beta <= 1.0 {
            return Err(invalid("beta", format!("{} must exceed 1", self.beta)));
        }
        if self.b < 2 {
            return Err(invalid("b", "base must be at least 2"));
        }
        WeightLaw::parse(&self.law).map_err(|e| invalid("law", e))?;
        for (k, v) in [("h", &self.h), ("h-lo", &self.h_lo), ("h-hi", &self.h_hi)] {
            parse_profile(v).map_err(|e| invalid(k, e))?;
        }
        Ok(())
    }

    pub fn wavelet_spec(&self) -> Result<WaveletSpec, CliError> {
        WaveletSpec::parse(&self.wavelet).map_err(|e| invalid("wavelet", e))
    }

    pub fn window_for(&self, levels: usize) -> Result<FitWindow, CliError> {
        let w = match self.fit {
            Some((a, b)) => FitWindow::new(a, b),
            None => FitWindow::default_for(levels),
        };
        if w.end >= levels || w.end < w.start + 3 || w.start == 0 {
            return Err(invalid("fit", format!("window {}:{} does not fit {levels} levels", w.start, w.end)));
        }
        Ok(w)
    }

    /// File text without `out`: identical experiments written to different
    /// directories share it.
    pub fn canonical_text(&self) -> String {
        KEYS.iter()
            .filter(|k| **k != "out")
            .map(|k| format!("{k} = {}\n", self.get(k)))
            .collect()
    }

    /// SHA-256 of [`Self::canonical_text`], lowercase hex.
    pub fn hash(&self) -> String {
        Sha256::digest(self.canonical_text().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}
