//! Run configuration: a TOML document with the sections
//! `grid`, `physics`, `time`, `ic`, `truncation`, `norms`, `output`, plus the
//! optional `dispersion` and `kernel` sections used by those subcommands.
//!
//! Everything downstream modules would reject is rejected here, with the
//! offending field path in the message. Unknown keys are collected as warnings.

use std::collections::BTreeSet;
use std::f64::consts::TAU;
use std::fmt;
use std::path::{Path, PathBuf};

use stratlab::convergence_harness::{InitialDataSpec, PhaseMode};
use stratlab::limit_solvers::SnsOptions;
use stratlab::spectral_core::{Grid3, ModeMask};
use stratlab::wave_algebra::PhysicsParams;
use toml::{Table, Value};

pub const DEFAULT_N: usize = 48;
pub const DEFAULT_BOX_LENGTH: f64 = TAU;
pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_T_FINAL: f64 = 1.0;
pub const DEFAULT_SAMPLE_STRIDE: usize = 10;
pub const DEFAULT_Q_LIST: [f64; 3] = [3.0, 4.0, 5.0];
pub const DEFAULT_WINDOW_EXPONENT: f64 = 1.0 / 320.0;
pub const DEFAULT_OUTPUT_DIR: &str = "stratlab-run";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Clone, Debug, PartialEq)]
pub struct DispersionSection {
    pub alpha: f64,
    pub radii: Vec<f64>,
    /// σ range of the critical-β fit.
    pub sigma_range: (f64, f64),
    pub samples: usize,
    pub small_beta: f64,
    /// The small-β series runs at one R: its σ^{−1/2} regime starts later for larger R.
    pub small_radius: f64,
    pub small_sigma_range: (f64, f64),
    pub tol: f64,
}

impl Default for DispersionSection {
    fn default() -> Self {
        DispersionSection {
            alpha: 1.0,
            radii: vec![2.0, 4.0],
            sigma_range: (1e2, 1e6),
            samples: 17,
            small_beta: 0.0,
            small_radius: 2.0,
            small_sigma_range: (1e4, 1e8),
            tol: 1e-9,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KernelSection {
    pub sigma_range: (f64, f64),
    pub samples: usize,
}

impl Default for KernelSection {
    fn default() -> Self {
        KernelSection {
            sigma_range: (16.0, 4096.0),
            samples: 9,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub grid: Grid3,
    pub nu: f64,
    pub nu_prime: f64,
    /// `physics.epsilon` is stored as a one-element list.
    pub epsilons: Vec<f64>,
    pub dt: f64,
    pub t_final: f64,
    pub sample_stride: usize,
    pub ic: InitialDataSpec,
    /// (m, M)
    pub window: (f64, f64),
    pub q_list: Vec<f64>,
    pub output_dir: PathBuf,
    pub dispersion: DispersionSection,
    pub kernel: KernelSection,
}

impl RunConfig {
    pub fn physics(&self) -> PhysicsParams {
        PhysicsParams {
            nu: self.nu,
            nu_prime: self.nu_prime,
            epsilon: self.epsilons[0],
        }
    }

    /// Fully resolved document; parsing it gives back the same config.
    pub fn to_toml(&self) -> String {
        let f = |v: f64| Value::Float(v);
        let fl = |v: &[f64]| Value::Array(v.iter().map(|&x| Value::Float(x)).collect());
        let int = |v: u64| Value::Integer(v as i64);
        let mut doc = Table::new();
        let mut sec = |name: &str, entries: Vec<(&str, Value)>| {
            let t: Table = entries
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect();
            doc.insert(name.to_string(), Value::Table(t));
        };
        sec(
            "grid",
            vec![
                ("n", int(self.grid.n() as u64)),
                ("box_length", f(self.grid.box_length())),
            ],
        );
        let eps = if self.epsilons.len() == 1 {
            ("epsilon", f(self.epsilons[0]))
        } else {
            ("epsilons", fl(&self.epsilons))
        };
        sec(
            "physics",
            vec![("nu", f(self.nu)), ("nu_prime", f(self.nu_prime)), eps],
        );
        sec(
            "time",
            vec![
                ("dt", f(self.dt)),
                ("t_final", f(self.t_final)),
                ("sample_stride", int(self.sample_stride as u64)),
            ],
        );
        // TOML integers are i64; larger seeds go out as decimal strings
        let seed = i64::try_from(self.ic.seed)
            .map(Value::Integer)
            .unwrap_or_else(|_| Value::String(self.ic.seed.to_string()));
        sec(
            "ic",
            vec![
                ("seed", seed),
                ("spectrum_peak", f(self.ic.spectrum_peak)),
                ("spectrum_width", f(self.ic.spectrum_width)),
                ("amplitude_strat", f(self.ic.amplitude_strat)),
                ("amplitude_osc", f(self.ic.amplitude_osc)),
                ("theta_profile", fl(&self.ic.theta_profile)),
                (
                    "exclude_degenerate_line",
                    Value::Boolean(self.ic.exclude_degenerate_line),
                ),
                ("phases", Value::String(self.ic.phases.name().into())),
            ],
        );
        sec(
            "truncation",
            vec![("m", f(self.window.0)), ("M", f(self.window.1))],
        );
        sec("norms", vec![("q_list", fl(&self.q_list))]);
        sec(
            "output",
            vec![(
                "dir",
                Value::String(self.output_dir.to_string_lossy().into_owned()),
            )],
        );
        let d = &self.dispersion;
        sec(
            "dispersion",
            vec![
                ("alpha", f(d.alpha)),
                ("radii", fl(&d.radii)),
                ("sigma_range", fl(&[d.sigma_range.0, d.sigma_range.1])),
                ("samples", int(d.samples as u64)),
                ("small_beta", f(d.small_beta)),
                ("small_radius", f(d.small_radius)),
                (
                    "small_sigma_range",
                    fl(&[d.small_sigma_range.0, d.small_sigma_range.1]),
                ),
                ("tol", f(d.tol)),
            ],
        );
        let k = &self.kernel;
        sec(
            "kernel",
            vec![
                ("sigma_range", fl(&[k.sigma_range.0, k.sigma_range.1])),
                ("samples", int(k.samples as u64)),
            ],
        );
        toml::to_string(&doc).expect("plain tables serialise")
    }
}

#[derive(Clone, Debug)]
pub struct Parsed {
    pub config: RunConfig,
    pub warnings: Vec<String>,
}

const SECTIONS: [&str; 9] = [
    "grid",
    "physics",
    "time",
    "ic",
    "truncation",
    "norms",
    "output",
    "dispersion",
    "kernel",
];

/// Reads one section, remembering which keys were consumed.
struct Section<'a> {
    name: &'static str,
    table: Option<&'a Table>,
    used: BTreeSet<&'static str>,
}

impl<'a> Section<'a> {
    fn open(doc: &'a Table, name: &'static str) -> Result<Self, ConfigError> {
        let table = match doc.get(name) {
            None => None,
            Some(Value::Table(t)) => Some(t),
            Some(_) => return Err(ConfigError::new(name, "expected a table")),
        };
        Ok(Section {
            name,
            table,
            used: BTreeSet::new(),
        })
    }

    fn path(&self, key: &str) -> String {
        format!("{}.{key}", self.name)
    }

    fn raw(&mut self, key: &'static str) -> Option<&'a Value> {
        self.used.insert(key);
        self.table.and_then(|t| t.get(key))
    }

    fn f64(&mut self, key: &'static str) -> Result<Option<f64>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => as_f64(v)
                .map(Some)
                .ok_or_else(|| ConfigError::new(self.path(key), "expected a number")),
        }
    }

    fn u64(&mut self, key: &'static str) -> Result<Option<u64>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some(Value::Integer(i)) if *i >= 0 => Ok(Some(*i as u64)),
            Some(_) => Err(ConfigError::new(
                self.path(key),
                "expected a nonnegative integer",
            )),
        }
    }

    fn f64_list(&mut self, key: &'static str) -> Result<Option<Vec<f64>>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some(Value::Array(a)) => a
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    as_f64(v).ok_or_else(|| {
                        ConfigError::new(format!("{}[{i}]", self.path(key)), "expected a number")
                    })
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
            Some(_) => Err(ConfigError::new(
                self.path(key),
                "expected an array of numbers",
            )),
        }
    }

    fn pair(&mut self, key: &'static str) -> Result<Option<(f64, f64)>, ConfigError> {
        match self.f64_list(key)? {
            None => Ok(None),
            Some(v) if v.len() == 2 => Ok(Some((v[0], v[1]))),
            Some(v) => Err(ConfigError::new(
                self.path(key),
                format!("expected [lo, hi], got {} values", v.len()),
            )),
        }
    }

    fn string(&mut self, key: &'static str) -> Result<Option<&'a str>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.as_str())),
            Some(_) => Err(ConfigError::new(self.path(key), "expected a string")),
        }
    }

    fn bool(&mut self, key: &'static str) -> Result<Option<bool>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some(Value::Boolean(b)) => Ok(Some(*b)),
            Some(_) => Err(ConfigError::new(self.path(key), "expected true or false")),
        }
    }

    fn finish(self, warnings: &mut Vec<String>) {
        if let Some(t) = self.table {
            for k in t.keys() {
                if !self.used.contains(k.as_str()) {
                    warnings.push(format!("unknown key {}.{k} ignored", self.name));
                }
            }
        }
    }
}

fn as_f64(v: &Value) -> Option<f64> {
    match v {
        Value::Float(x) => Some(*x),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

fn require<T>(v: Option<T>, path: &str) -> Result<T, ConfigError> {
    v.ok_or_else(|| ConfigError::new(path, "missing required field"))
}

fn positive(v: f64, path: &str) -> Result<f64, ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(ConfigError::new(path, format!("must be positive, got {v}")))
    }
}

fn range(r: (f64, f64), path: &str) -> Result<(f64, f64), ConfigError> {
    if r.0.is_finite() && r.1.is_finite() && r.0 > 0.0 && r.1 > r.0 {
        Ok(r)
    } else {
        Err(ConfigError::new(
            path,
            format!("need 0 < lo < hi, got [{}, {}]", r.0, r.1),
        ))
    }
}

pub fn parse_config_file(path: &Path) -> Result<Parsed, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::new("", format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<Parsed, ConfigError> {
    let doc: Table = text
        .parse()
        .map_err(|e: toml::de::Error| ConfigError::new("", format!("not valid TOML: {e}")))?;
    let mut warnings = Vec::new();
    for k in doc.keys() {
        if !SECTIONS.contains(&k.as_str()) {
            warnings.push(format!("unknown section {k} ignored"));
        }
    }

    let mut s = Section::open(&doc, "grid")?;
    let n = s.u64("n")?.map_or(DEFAULT_N, |v| v as usize);
    let box_length = positive(
        s.f64("box_length")?.unwrap_or(DEFAULT_BOX_LENGTH),
        "grid.box_length",
    )?;
    s.finish(&mut warnings);
    if n < 8 || n % 2 != 0 {
        return Err(ConfigError::new(
            "grid.n",
            format!("must be even and at least 8, got {n}"),
        ));
    }
    let grid = Grid3::new(n, box_length).map_err(|e| ConfigError::new("grid", e.to_string()))?;

    if !doc.contains_key("physics") {
        return Err(ConfigError::new("physics", "missing required section"));
    }
    let mut s = Section::open(&doc, "physics")?;
    let nu = positive(require(s.f64("nu")?, "physics.nu")?, "physics.nu")?;
    let nu_prime = require(s.f64("nu_prime")?, "physics.nu_prime")?;
    if !(nu_prime.is_finite() && nu_prime > 0.0) {
        return Err(ConfigError::new(
            "physics.nu_prime",
            format!("thermal diffusivity must be positive, got {nu_prime}"),
        ));
    }
    let single = s.f64("epsilon")?;
    let list = s.f64_list("epsilons")?;
    s.finish(&mut warnings);
    let epsilons = match (single, list) {
        (Some(_), Some(_)) => {
            return Err(ConfigError::new(
                "physics.epsilons",
                "give either physics.epsilon or physics.epsilons, not both",
            ))
        }
        (Some(e), None) => vec![positive(e, "physics.epsilon")?],
        (None, Some(l)) => {
            if l.is_empty() {
                return Err(ConfigError::new("physics.epsilons", "must not be empty"));
            }
            for (i, &e) in l.iter().enumerate() {
                positive(e, &format!("physics.epsilons[{i}]"))?;
            }
            if l.windows(2).any(|w| !(w[1] < w[0])) {
                return Err(ConfigError::new(
                    "physics.epsilons",
                    "must be strictly decreasing",
                ));
            }
            l
        }
        (None, None) => {
            return Err(ConfigError::new(
                "physics.epsilon",
                "missing required field (or physics.epsilons)",
            ))
        }
    };

    let mut s = Section::open(&doc, "time")?;
    let dt = positive(s.f64("dt")?.unwrap_or(DEFAULT_DT), "time.dt")?;
    let t_final = positive(s.f64("t_final")?.unwrap_or(DEFAULT_T_FINAL), "time.t_final")?;
    let sample_stride = s
        .u64("sample_stride")?
        .map_or(DEFAULT_SAMPLE_STRIDE, |v| v as usize);
    s.finish(&mut warnings);
    if sample_stride == 0 {
        return Err(ConfigError::new("time.sample_stride", "must be at least 1"));
    }
    let mut opts = SnsOptions::new(t_final, dt);
    opts.sample_stride = sample_stride;
    opts.steps()
        .map_err(|e| ConfigError::new("time.t_final", e.to_string()))?;

    let mut s = Section::open(&doc, "ic")?;
    let mut ic = InitialDataSpec::default();
    match s.raw("seed") {
        None => {}
        Some(Value::Integer(i)) if *i >= 0 => ic.seed = *i as u64,
        Some(Value::String(t)) if t.parse::<u64>().is_ok() => ic.seed = t.parse().unwrap(),
        Some(_) => {
            return Err(ConfigError::new(
                "ic.seed",
                "expected a nonnegative integer (decimal string above 2^63)",
            ))
        }
    }
    if let Some(v) = s.f64("spectrum_peak")? {
        ic.spectrum_peak = v;
    }
    if let Some(v) = s.f64("spectrum_width")? {
        ic.spectrum_width = v;
    }
    if let Some(v) = s.f64("amplitude_strat")? {
        ic.amplitude_strat = v;
    }
    if let Some(v) = s.f64("amplitude_osc")? {
        ic.amplitude_osc = v;
    }
    if let Some(v) = s.f64_list("theta_profile")? {
        ic.theta_profile = v;
    }
    if let Some(v) = s.bool("exclude_degenerate_line")? {
        ic.exclude_degenerate_line = v;
    }
    if let Some(v) = s.string("phases")? {
        ic.phases = PhaseMode::parse(v).ok_or_else(|| {
            ConfigError::new(
                "ic.phases",
                format!("expected \"random\" or \"coherent\", got {v:?}"),
            )
        })?;
    }
    s.finish(&mut warnings);
    let cutoff = ModeMask::default_radius(&grid);
    if !(ic.spectrum_peak >= 0.0 && ic.spectrum_peak < cutoff) {
        return Err(ConfigError::new(
            "ic.spectrum_peak",
            format!(
                "must lie in [0, {cutoff}) (dealiasing cutoff), got {}",
                ic.spectrum_peak
            ),
        ));
    }
    positive(ic.spectrum_width, "ic.spectrum_width")?;
    for (path, a) in [
        ("ic.amplitude_strat", ic.amplitude_strat),
        ("ic.amplitude_osc", ic.amplitude_osc),
    ] {
        if !(a.is_finite() && a >= 0.0) {
            return Err(ConfigError::new(path, format!("must be nonnegative, got {a}")));
        }
    }
    if ic.theta_profile.len() >= n / 2 {
        return Err(ConfigError::new(
            "ic.theta_profile",
            format!(
                "{} cosine modes given, the grid resolves {}",
                ic.theta_profile.len(),
                n / 2 - 1
            ),
        ));
    }
    if let Some(i) = ic.theta_profile.iter().position(|c| !c.is_finite()) {
        return Err(ConfigError::new(
            format!("ic.theta_profile[{i}]"),
            "must be finite",
        ));
    }

    let mut s = Section::open(&doc, "truncation")?;
    let m = s.f64("m")?.unwrap_or(DEFAULT_WINDOW_EXPONENT);
    let big_m = s.f64("M")?.unwrap_or(DEFAULT_WINDOW_EXPONENT);
    s.finish(&mut warnings);
    for (path, v) in [("truncation.m", m), ("truncation.M", big_m)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(ConfigError::new(path, format!("must be positive, got {v}")));
        }
    }
    let nu_equal = PhysicsParams {
        nu,
        nu_prime,
        epsilon: 1.0,
    }
    .nu_equal();
    if !nu_equal && 3.0 * big_m + m >= 1.0 {
        return Err(ConfigError::new(
            "truncation",
            format!(
                "admissibility condition 3M + m < 1 fails for nu != nu_prime: 3M + m = {}",
                3.0 * big_m + m
            ),
        ));
    }

    let mut s = Section::open(&doc, "norms")?;
    let q_list = s
        .f64_list("q_list")?
        .unwrap_or_else(|| DEFAULT_Q_LIST.to_vec());
    s.finish(&mut warnings);
    if q_list.is_empty() {
        return Err(ConfigError::new("norms.q_list", "must not be empty"));
    }
    for (i, &q) in q_list.iter().enumerate() {
        if !(q > 2.0 && q < 6.0) {
            return Err(ConfigError::new(
                format!("norms.q_list[{i}]"),
                format!("q must lie in (2, 6), got {q}"),
            ));
        }
    }

    let mut s = Section::open(&doc, "output")?;
    let output_dir = PathBuf::from(s.string("dir")?.unwrap_or(DEFAULT_OUTPUT_DIR));
    s.finish(&mut warnings);

    let mut s = Section::open(&doc, "dispersion")?;
    let mut dispersion = DispersionSection::default();
    if let Some(v) = s.f64("alpha")? {
        dispersion.alpha = positive(v, "dispersion.alpha")?;
    }
    if let Some(v) = s.f64_list("radii")? {
        if v.is_empty() {
            return Err(ConfigError::new("dispersion.radii", "must not be empty"));
        }
        dispersion.radii = v;
    }
    if let Some(v) = s.pair("sigma_range")? {
        dispersion.sigma_range = range(v, "dispersion.sigma_range")?;
    }
    if let Some(v) = s.u64("samples")? {
        dispersion.samples = v as usize;
    }
    if let Some(v) = s.f64("small_beta")? {
        dispersion.small_beta = v;
    }
    if let Some(v) = s.f64("small_radius")? {
        dispersion.small_radius = v;
    }
    if let Some(v) = s.pair("small_sigma_range")? {
        dispersion.small_sigma_range = range(v, "dispersion.small_sigma_range")?;
    }
    if let Some(v) = s.f64("tol")? {
        dispersion.tol = positive(v, "dispersion.tol")?;
    }
    s.finish(&mut warnings);
    for (i, &r) in dispersion.radii.iter().enumerate() {
        if !(r.is_finite() && r > dispersion.alpha) {
            return Err(ConfigError::new(
                format!("dispersion.radii[{i}]"),
                format!("R must exceed alpha = {}, got {r}", dispersion.alpha),
            ));
        }
    }
    if !(dispersion.small_radius.is_finite() && dispersion.small_radius > dispersion.alpha) {
        return Err(ConfigError::new(
            "dispersion.small_radius",
            format!(
                "R must exceed alpha = {}, got {}",
                dispersion.alpha, dispersion.small_radius
            ),
        ));
    }
    if dispersion.samples < 8 {
        return Err(ConfigError::new(
            "dispersion.samples",
            format!("a fit needs at least 8 samples, got {}", dispersion.samples),
        ));
    }
    if !(dispersion.small_beta.is_finite() && dispersion.small_beta >= 0.0) {
        return Err(ConfigError::new(
            "dispersion.small_beta",
            format!("must be nonnegative, got {}", dispersion.small_beta),
        ));
    }

    let mut s = Section::open(&doc, "kernel")?;
    let mut kernel = KernelSection::default();
    if let Some(v) = s.pair("sigma_range")? {
        kernel.sigma_range = range(v, "kernel.sigma_range")?;
    }
    if let Some(v) = s.u64("samples")? {
        kernel.samples = v as usize;
    }
    s.finish(&mut warnings);
    if kernel.samples < 8 {
        return Err(ConfigError::new(
            "kernel.samples",
            format!("a fit needs at least 8 samples, got {}", kernel.samples),
        ));
    }

    Ok(Parsed {
        config: RunConfig {
            grid,
            nu,
            nu_prime,
            epsilons,
            dt,
            t_final,
            sample_stride,
            ic,
            window: (m, big_m),
            q_list,
            output_dir,
            dispersion,
            kernel,
        },
        warnings,
    })
}
