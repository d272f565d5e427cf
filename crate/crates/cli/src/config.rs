//! Line-oriented run configuration.
//!
//! ```text
//! # comment
//! [operator]
//! dim = 4          # or: file = path/to/operator.txt
//! seed = 7
//! r_min = 0.5
//! r_max = 2.0
//! omega = 0.785398
//! diag = false
//!
//! [quadrature]
//! tol = 1e-9
//! rel_tol = 0
//! inner_tol = 1e-15
//! inner_rel_tol = 1e-11
//! phi = 1.2        # optional contour angle
//! theta = 1.9      # optional sector of holomorphy
//!
//! [suites]
//! tol = 1e-6       # overrides every check tolerance
//! n_max = 5
//! pairs = 50
//! angles = 0.985, 1.763
//! units = e1, 1:1:0
//! g = reg(2)
//! functions = reg(2); pow(1)*reg(3)
//! growing = pow(2)*q(1,0,1,0)
//! ```

use std::f64::consts::FRAC_PI_4;
use std::path::{Path, PathBuf};

use qcalc_core::operator::GeneratorSpec;
use qcalc_core::{parse_function, CalcOptions, Quaternion, StemFunction};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Value(String),
}

#[derive(Clone, Debug, PartialEq)]
pub enum OperatorSource {
    Generated,
    File(PathBuf),
}

#[derive(Clone, Debug)]
pub struct Config {
    pub source: OperatorSource,
    pub generator: GeneratorSpec,
    /// Use the diagonal operator of the sampled eigenvalues instead of its rotation.
    pub diag: bool,
    pub quadrature: CalcOptions,
    /// Overrides each check's own tolerance when set.
    pub tol: Option<f64>,
    pub n_max: u32,
    pub pairs: usize,
    pub angles: Option<Vec<f64>>,
    pub units: Option<Vec<Quaternion>>,
    pub g: StemFunction,
    pub functions: Vec<StemFunction>,
    pub growing: Vec<StemFunction>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            source: OperatorSource::Generated,
            generator: GeneratorSpec { dim: 4, r_min: 0.5, r_max: 2.0, omega: FRAC_PI_4, seed: 7 },
            diag: false,
            quadrature: CalcOptions::default(),
            tol: None,
            n_max: 5,
            pairs: 50,
            angles: None,
            units: None,
            g: StemFunction::regularizer(2).expect("positive index"),
            functions: vec![
                StemFunction::regularizer(2).expect("positive index"),
                StemFunction::product(StemFunction::power(1), StemFunction::regularizer(3).expect("positive index"))
                    .expect("intrinsic left factor"),
            ],
            growing: vec![StemFunction::power(2).scale(Quaternion::new(1.0, 0.0, 1.0, 0.0))],
        }
    }
}

fn number(v: &str) -> Result<f64, String> {
    v.parse::<f64>().map_err(|e| format!("'{v}': {e}"))
}

fn list<T>(v: &str, sep: char, item: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    v.split(sep).map(str::trim).filter(|s| !s.is_empty()).map(item).collect()
}

/// `e1`, `e2`, `e3`, or an imaginary direction `a:b:c` (normalized).
pub fn parse_unit(v: &str) -> Result<Quaternion, String> {
    let q = match v.trim() {
        "e1" => Quaternion::E1,
        "e2" => Quaternion::E2,
        "e3" => Quaternion::E3,
        other => {
            let parts = list(other, ':', number)?;
            let [a, b, c] = parts[..] else {
                return Err(format!("unit '{other}' must be e1, e2, e3 or a:b:c"));
            };
            Quaternion::new(0.0, a, b, c)
        }
    };
    qcalc_core::quat::unit_imaginary(q).map_err(|e| e.to_string())
}

pub fn parse_units(v: &str) -> Result<Vec<Quaternion>, String> {
    list(v, ',', parse_unit)
}

pub fn parse_angles(v: &str) -> Result<Vec<f64>, String> {
    list(v, ',', number)
}

fn functions(v: &str) -> Result<Vec<StemFunction>, String> {
    list(v, ';', |s| parse_function(s).map_err(|e| e.to_string()))
}

fn boolean(v: &str) -> Result<bool, String> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("'{v}' is not a boolean")),
    }
}

fn integer<T: std::str::FromStr>(v: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    v.parse::<T>().map_err(|e| format!("'{v}': {e}"))
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_owned(), source })?;
        let mut cfg = Self::parse(&text)?;
        // Operator files are resolved relative to the config file.
        if let OperatorSource::File(f) = &cfg.source {
            if f.is_relative() {
                if let Some(dir) = path.parent() {
                    cfg.source = OperatorSource::File(dir.join(f));
                }
            }
        }
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Config::default();
        let mut section = String::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(name) = content.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
                let name = name.trim();
                if !matches!(name, "operator" | "quadrature" | "suites") {
                    return Err(ConfigError::Syntax { line, msg: format!("unknown section [{name}]") });
                }
                section = name.to_owned();
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError::Syntax { line, msg: format!("expected 'key = value', got '{content}'") });
            };
            let (key, value) = (key.trim(), value.trim());
            cfg.set(&section, key, value).map_err(|msg| ConfigError::Syntax { line, msg })?;
        }
        Ok(cfg)
    }

    fn set(&mut self, section: &str, key: &str, v: &str) -> Result<(), String> {
        let q = &mut self.quadrature;
        let g = &mut self.generator;
        match (section, key) {
            ("operator", "file") => self.source = OperatorSource::File(PathBuf::from(v)),
            ("operator", "dim") => g.dim = integer(v)?,
            ("operator", "seed") => g.seed = integer(v)?,
            ("operator", "r_min") => g.r_min = number(v)?,
            ("operator", "r_max") => g.r_max = number(v)?,
            ("operator", "omega") => g.omega = number(v)?,
            ("operator", "diag") => self.diag = boolean(v)?,
            ("quadrature", "tol") => q.tol = number(v)?,
            ("quadrature", "rel_tol") => q.rel_tol = number(v)?,
            ("quadrature", "inner_tol") => q.inner_tol = number(v)?,
            ("quadrature", "inner_rel_tol") => q.inner_rel_tol = number(v)?,
            ("quadrature", "phi") => q.phi = Some(number(v)?),
            ("quadrature", "theta") => q.theta = Some(number(v)?),
            ("quadrature", "j") => q.j = parse_unit(v)?,
            ("suites", "tol") => self.tol = Some(number(v)?),
            ("suites", "n_max") => self.n_max = integer(v)?,
            ("suites", "pairs") => self.pairs = integer(v)?,
            ("suites", "angles") => self.angles = Some(parse_angles(v)?),
            ("suites", "units") => self.units = Some(parse_units(v)?),
            ("suites", "g") => self.g = parse_function(v).map_err(|e| e.to_string())?,
            ("suites", "functions") => self.functions = functions(v)?,
            ("suites", "growing") => self.growing = functions(v)?,
            ("", _) => return Err(format!("key '{key}' outside any section")),
            _ => return Err(format!("unknown key '{key}' in [{section}]")),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_sections() {
        let cfg = Config::parse(
            "# run\n[operator]\ndim = 3\nseed = 11 # trailing\n\n[quadrature]\ntol = 1e-10\nphi = 1.2\n[suites]\nangles = 1.0, 1.5\nunits = e2, 1:1:0\nfunctions = reg(3); rat(2,5)\n",
        )
        .unwrap();
        assert_eq!(cfg.generator.dim, 3);
        assert_eq!(cfg.generator.seed, 11);
        assert_eq!(cfg.quadrature.tol, 1e-10);
        assert_eq!(cfg.quadrature.phi, Some(1.2));
        assert_eq!(cfg.angles, Some(vec![1.0, 1.5]));
        let units = cfg.units.unwrap();
        assert_eq!(units[0], Quaternion::E2);
        assert!((units[1].s1 - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(cfg.functions.len(), 2);
    }

    #[test]
    fn reports_line_of_error() {
        let err = Config::parse("[operator]\ndim = 3\nbogus = 1\n").unwrap_err();
        assert!(matches!(err, ConfigError::Syntax { line: 3, .. }), "{err}");
        assert!(Config::parse("dim = 3\n").is_err());
        assert!(Config::parse("[extra]\n").is_err());
        assert!(Config::parse("[operator]\ndim 3\n").is_err());
        assert!(Config::parse("[suites]\nunits = e4\n").is_err());
    }
}
