//! Scenario files: a flat, sectioned `key = value` format.
//!
//! ```text
//! scenario = fig2
//!
//! [parameters]
//! d1 = 0.1
//! chi = 8      # trailing comments are allowed
//!
//! [sensitivity]
//! prefactor = 1
//! a = 0.1
//! ```
//!
//! Every key is known in advance; anything else is rejected with its line
//! number.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use preytaxis_core::solver::{Convention, Monitors, SolverConfig};
use preytaxis_core::analysis::ClassifyConfig;
use preytaxis_core::{Parameters, Sensitivity};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: unknown section [{name}]")]
    UnknownSection { line: usize, name: String },
    #[error("line {line}: unknown key `{key}` in [{section}]")]
    UnknownKey {
        line: usize,
        section: String,
        key: String,
    },
    #[error("line {line}: `{key}` given twice")]
    Duplicate { line: usize, key: String },
    #[error("line {line}: bad value for `{key}`: {msg}")]
    BadValue { line: usize, key: String, msg: String },
    #[error("missing required key `{0}`")]
    Missing(String),
    #[error("{0}")]
    Invalid(String),
}

const TOP: &[&str] = &["scenario", "out"];
const PARAMETERS: &[&str] = &[
    "d1", "d2", "d3", "alpha1", "alpha2", "alpha3", "beta1", "beta2", "beta31", "beta32", "chi", "xi", "length",
];
const SENSITIVITY: &[&str] = &["prefactor", "a", "coefficients"];
const SOLVER: &[&str] = &[
    "n",
    "cfl",
    "dt_max",
    "t_end",
    "snapshot_interval",
    "probe_interval",
    "steady_tolerance",
    "steady_check_interval",
    "steady_checks",
    "steady_min_time",
    "probes",
    "blowup",
    "dt_min",
    "monitor_positivity",
    "monitor_w_range",
    "monitor_l1",
];
const INITIAL: &[&str] = &["amplitude", "mode", "convention"];
const ANALYSIS: &[&str] = &["kmax", "lengths", "purity", "homogeneity", "transient", "species"];

fn known(section: &str) -> Option<&'static [&'static str]> {
    match section {
        "" => Some(TOP),
        "parameters" => Some(PARAMETERS),
        "sensitivity" => Some(SENSITIVITY),
        "solver" => Some(SOLVER),
        "initial" => Some(INITIAL),
        "analysis" => Some(ANALYSIS),
        _ => None,
    }
}

/// Initial perturbation of the homogeneous state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialData {
    pub amplitude: f64,
    pub mode: u32,
    pub convention: Convention,
}

impl Default for InitialData {
    fn default() -> Self {
        Self { amplitude: 0.01, mode: 1, convention: Convention::Literal }
    }
}

/// Inclusive range of integer domain lengths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LengthRange {
    pub first: u32,
    pub last: u32,
}

impl LengthRange {
    /// Parses `A:B`.
    pub fn parse(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once(':').ok_or_else(|| format!("expected A:B, got `{s}`"))?;
        let first: u32 = a.trim().parse().map_err(|_| format!("bad range start `{a}`"))?;
        let last: u32 = b.trim().parse().map_err(|_| format!("bad range end `{b}`"))?;
        if first == 0 || last < first {
            return Err(format!("empty or invalid length range {first}:{last}"));
        }
        Ok(Self { first, last })
    }

    pub fn lengths(&self) -> Vec<f64> {
        (self.first..=self.last).map(f64::from).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: String,
    pub out: Option<PathBuf>,
    pub parameters: Parameters,
    pub sensitivity: Sensitivity,
    pub solver: SolverConfig,
    pub grid_n: usize,
    pub initial: InitialData,
    pub classify: ClassifyConfig,
    /// Modes tabulated by `thresholds`; `None` applies the tail rule.
    pub kmax: Option<u32>,
    pub lengths: Option<LengthRange>,
}

struct Entry {
    line: usize,
    value: String,
}

type Sections = HashMap<String, HashMap<String, Entry>>;

fn tokenize(text: &str) -> Result<Sections, ConfigError> {
    let mut out: Sections = HashMap::new();
    out.insert(String::new(), HashMap::new());
    let mut section = String::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(rest) = body.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::Syntax { line, msg: "unterminated section header".into() })?
                .trim();
            if known(name).is_none() || name.is_empty() {
                return Err(ConfigError::UnknownSection { line, name: name.into() });
            }
            section = name.to_string();
            out.entry(section.clone()).or_default();
            continue;
        }
        let (key, value) = body
            .split_once('=')
            .ok_or_else(|| ConfigError::Syntax { line, msg: format!("expected key = value, got `{body}`") })?;
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() {
            return Err(ConfigError::Syntax { line, msg: "empty key".into() });
        }
        let allowed = known(&section).unwrap_or(&[]);
        if !allowed.contains(&key) {
            let shown = if section.is_empty() { "top level".to_string() } else { section.clone() };
            return Err(ConfigError::UnknownKey { line, section: shown, key: key.into() });
        }
        let map = out.get_mut(&section).expect("section inserted on header");
        if map.contains_key(key) {
            return Err(ConfigError::Duplicate { line, key: key.into() });
        }
        map.insert(key.to_string(), Entry { line, value: value.to_string() });
    }
    Ok(out)
}

struct Reader<'a> {
    sections: &'a Sections,
}

impl Reader<'_> {
    fn entry(&self, section: &str, key: &str) -> Option<&Entry> {
        self.sections.get(section).and_then(|m| m.get(key))
    }

    fn parse<T: std::str::FromStr>(&self, section: &str, key: &str) -> Result<Option<T>, ConfigError> {
        let Some(e) = self.entry(section, key) else {
            return Ok(None);
        };
        e.value.parse().map(Some).map_err(|_| ConfigError::BadValue {
            line: e.line,
            key: key.into(),
            msg: format!("`{}` is not a valid {}", e.value, std::any::type_name::<T>()),
        })
    }

    fn number(&self, section: &str, key: &str) -> Result<Option<f64>, ConfigError> {
        let Some(e) = self.entry(section, key) else {
            return Ok(None);
        };
        parse_number(&e.value)
            .map(Some)
            .map_err(|msg| ConfigError::BadValue { line: e.line, key: key.into(), msg })
    }

    fn required(&self, section: &str, key: &str) -> Result<f64, ConfigError> {
        self.number(section, key)?.ok_or_else(|| ConfigError::Missing(format!("{section}.{key}")))
    }

    fn list(&self, section: &str, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        let Some(e) = self.entry(section, key) else {
            return Ok(None);
        };
        e.value
            .split(',')
            .map(|s| parse_number(s.trim()))
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
            .map_err(|msg| ConfigError::BadValue { line: e.line, key: key.into(), msg })
    }

    fn flag(&self, section: &str, key: &str) -> Result<Option<bool>, ConfigError> {
        let Some(e) = self.entry(section, key) else {
            return Ok(None);
        };
        match e.value.as_str() {
            "true" | "on" | "yes" => Ok(Some(true)),
            "false" | "off" | "no" => Ok(Some(false)),
            other => Err(ConfigError::BadValue { line: e.line, key: key.into(), msg: format!("`{other}` is not a switch") }),
        }
    }
}

/// Decimal number or a simple fraction such as `1/3`.
fn parse_number(s: &str) -> Result<f64, String> {
    let value = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
            let b: f64 = b.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
            a / b
        }
        None => s.parse().map_err(|_| format!("`{s}` is not a number"))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        let mut cfg = Self::parse(&text)?;
        if cfg.scenario.is_empty() {
            cfg.scenario = path.file_stem().and_then(|s| s.to_str()).unwrap_or("run").to_string();
        }
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let sections = tokenize(text)?;
        let r = Reader { sections: &sections };

        let scenario = r.entry("", "scenario").map(|e| e.value.clone()).unwrap_or_default();
        let out = r.entry("", "out").map(|e| PathBuf::from(&e.value));

        let pr = "parameters";
        let parameters = Parameters {
            d1: r.required(pr, "d1")?,
            d2: r.required(pr, "d2")?,
            d3: r.required(pr, "d3")?,
            alpha1: r.required(pr, "alpha1")?,
            alpha2: r.required(pr, "alpha2")?,
            alpha3: r.required(pr, "alpha3")?,
            beta1: r.required(pr, "beta1")?,
            beta2: r.required(pr, "beta2")?,
            beta31: r.required(pr, "beta31")?,
            beta32: r.required(pr, "beta32")?,
            chi: r.required(pr, "chi")?,
            xi: r.required(pr, "xi")?,
            length: r.required(pr, "length")?,
        };

        let sensitivity = match r.list("sensitivity", "coefficients")? {
            Some(c) => {
                if r.entry("sensitivity", "prefactor").is_some() || r.entry("sensitivity", "a").is_some() {
                    return Err(ConfigError::Invalid(
                        "sensitivity: give either coefficients or prefactor and a, not both".into(),
                    ));
                }
                if c.len() > 5 {
                    return Err(ConfigError::Invalid("sensitivity: at most 5 coefficients".into()));
                }
                let mut coeffs = [0.0; 5];
                coeffs[..c.len()].copy_from_slice(&c);
                Sensitivity::polynomial(coeffs).map_err(|e| ConfigError::Invalid(format!("sensitivity: {e}")))?
            }
            None => {
                let prefactor = r.number("sensitivity", "prefactor")?.unwrap_or(1.0);
                let a = r.required("sensitivity", "a")?;
                Sensitivity::group_defense(prefactor, a).map_err(|e| ConfigError::Invalid(format!("sensitivity: {e}")))?
            }
        };

        let sr = "solver";
        let mut solver = SolverConfig::default();
        macro_rules! set {
            ($field:ident) => {
                if let Some(x) = r.number(sr, stringify!($field))? {
                    solver.$field = x;
                }
            };
        }
        set!(cfl);
        set!(dt_max);
        set!(t_end);
        set!(snapshot_interval);
        set!(probe_interval);
        set!(steady_tolerance);
        set!(steady_check_interval);
        set!(steady_min_time);
        set!(blowup);
        set!(dt_min);
        if let Some(x) = r.parse::<u32>(sr, "steady_checks")? {
            solver.steady_checks = x;
        }
        if let Some(x) = r.list(sr, "probes")? {
            solver.probes = x;
        }
        let defaults = Monitors::default();
        solver.monitors = Monitors {
            positivity: r.flag(sr, "monitor_positivity")?.unwrap_or(defaults.positivity),
            w_range: r.flag(sr, "monitor_w_range")?.unwrap_or(defaults.w_range),
            l1: r.flag(sr, "monitor_l1")?.unwrap_or(defaults.l1),
        };
        let grid_n = r.parse::<usize>(sr, "n")?.unwrap_or(256);

        let ir = "initial";
        let mut initial = InitialData::default();
        if let Some(x) = r.number(ir, "amplitude")? {
            initial.amplitude = x;
        }
        if let Some(x) = r.parse::<u32>(ir, "mode")? {
            initial.mode = x;
        }
        if let Some(e) = r.entry(ir, "convention") {
            initial.convention = match e.value.as_str() {
                "literal" => Convention::Literal,
                "neumann" => Convention::Neumann,
                other => {
                    return Err(ConfigError::BadValue {
                        line: e.line,
                        key: "convention".into(),
                        msg: format!("`{other}` is neither literal nor neumann"),
                    })
                }
            };
        }

        let ar = "analysis";
        let mut classify = ClassifyConfig::default();
        if let Some(x) = r.number(ar, "purity")? {
            classify.purity = x;
        }
        if let Some(x) = r.number(ar, "homogeneity")? {
            classify.homogeneity = x;
        }
        if let Some(x) = r.number(ar, "transient")? {
            classify.transient = x;
        }
        if let Some(x) = r.parse::<usize>(ar, "species")? {
            if x > 2 {
                return Err(ConfigError::Invalid("analysis.species must be 0, 1 or 2".into()));
            }
            classify.species = x;
        }
        let kmax = match r.entry(ar, "kmax") {
            None => None,
            Some(e) if e.value == "tail" => None,
            Some(_) => Some(r.parse::<u32>(ar, "kmax")?.expect("entry present")),
        };
        let lengths = match r.entry(ar, "lengths") {
            None => None,
            Some(e) => Some(LengthRange::parse(&e.value).map_err(|msg| ConfigError::BadValue {
                line: e.line,
                key: "lengths".into(),
                msg,
            })?),
        };

        Ok(Self { scenario, out, parameters, sensitivity, solver, grid_n, initial, classify, kmax, lengths })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "
[parameters]
d1 = 0.1
d2 = 2
d3 = 0.1
alpha1 = 0.5
alpha2 = 2
alpha3 = 1
beta1 = 0.5
beta2 = 0.5
beta31 = 0.1
beta32 = 0.1
chi = 8
xi = 0.5
length = 7
[sensitivity]
a = 0.1
";

    #[test]
    fn minimal_file_uses_defaults() {
        let c = RunConfig::parse(MINIMAL).unwrap();
        assert_eq!(c.parameters.chi, 8.0);
        assert_eq!(c.grid_n, 256);
        assert_eq!(c.kmax, None);
        assert_eq!(c.solver, SolverConfig::default());
        assert_eq!(c.initial, InitialData::default());
    }

    #[test]
    fn unknown_key_reports_line() {
        let text = format!("{MINIMAL}[solver]\ncfll = 0.5\n");
        match RunConfig::parse(&text) {
            Err(ConfigError::UnknownKey { key, section, .. }) => {
                assert_eq!(key, "cfll");
                assert_eq!(section, "solver");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_section_and_duplicates() {
        assert!(matches!(
            RunConfig::parse(&format!("{MINIMAL}[plot]\n")),
            Err(ConfigError::UnknownSection { .. })
        ));
        assert!(matches!(
            RunConfig::parse(&format!("{MINIMAL}a = 0.2\n")),
            Err(ConfigError::Duplicate { .. })
        ));
    }

    #[test]
    fn missing_parameter() {
        let text = MINIMAL.replace("xi = 0.5\n", "");
        assert!(matches!(RunConfig::parse(&text), Err(ConfigError::Missing(k)) if k == "parameters.xi"));
    }

    #[test]
    fn fractions_comments_and_lists() {
        let text = MINIMAL.replace("beta32 = 0.1", "beta32 = 1/3   # one third")
            + "[solver]\nprobes = 0, 3.5, 7\nmonitor_l1 = off\n[analysis]\nkmax = 9\nlengths = 1:16\n";
        let c = RunConfig::parse(&text).unwrap();
        assert!((c.parameters.beta32 - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(c.solver.probes, vec![0.0, 3.5, 7.0]);
        assert!(!c.solver.monitors.l1);
        assert_eq!(c.kmax, Some(9));
        assert_eq!(c.lengths, Some(LengthRange { first: 1, last: 16 }));
    }

    #[test]
    fn polynomial_and_product_forms_are_exclusive() {
        let text = MINIMAL.replace("a = 0.1", "coefficients = 0, 0.1, -1");
        let c = RunConfig::parse(&text).unwrap();
        assert_eq!(c.sensitivity, Sensitivity::group_defense(1.0, 0.1).unwrap());
        let both = MINIMAL.replace("a = 0.1", "a = 0.1\ncoefficients = 0, 0.1, -1");
        assert!(matches!(RunConfig::parse(&both), Err(ConfigError::Invalid(_))));
    }

    #[test]
    fn bad_values() {
        assert!(matches!(
            RunConfig::parse(&MINIMAL.replace("chi = 8", "chi = eight")),
            Err(ConfigError::BadValue { .. })
        ));
        assert!(matches!(
            RunConfig::parse(&format!("{MINIMAL}[initial]\nconvention = sine\n")),
            Err(ConfigError::BadValue { .. })
        ));
        assert!(RunConfig::parse("just text\n").is_err());
    }

    #[test]
    fn length_ranges() {
        assert_eq!(LengthRange::parse("2:17").unwrap().lengths().len(), 16);
        assert!(LengthRange::parse("5:4").is_err());
        assert!(LengthRange::parse("0:4").is_err());
        assert!(LengthRange::parse("4").is_err());
    }
}
