//! Experiment configuration files.
//!
//! The format is TOML: `key = value` lines grouped under `[section]`
//! headers, `#` comments, quoted strings and bracketed lists. Every problem
//! found is reported with its line number; parsing does not stop at the
//! first one.

use std::fmt;
use std::ops::Range;
use std::path::PathBuf;
use std::str::FromStr;

use lkpz_core::symbol::{SymbolSpec, SymbolTerm};
use toml::de::{DeTable, DeValue};
use toml::Spanned;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    LinearSelfsim,
    DepositionSubcritical,
    DepositionSupercritical,
    DepositionBrownianQ2,
    EvaporationSubcritical,
    EvaporationSupercritical,
    SweepQ,
    KernelTable,
    Validate,
}

impl Preset {
    pub const ALL: [Preset; 9] = [
        Preset::LinearSelfsim,
        Preset::DepositionSubcritical,
        Preset::DepositionSupercritical,
        Preset::DepositionBrownianQ2,
        Preset::EvaporationSubcritical,
        Preset::EvaporationSupercritical,
        Preset::SweepQ,
        Preset::KernelTable,
        Preset::Validate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::LinearSelfsim => "linear-selfsim",
            Preset::DepositionSubcritical => "deposition-subcritical",
            Preset::DepositionSupercritical => "deposition-supercritical",
            Preset::DepositionBrownianQ2 => "deposition-brownian-q2",
            Preset::EvaporationSubcritical => "evaporation-subcritical",
            Preset::EvaporationSupercritical => "evaporation-supercritical",
            Preset::SweepQ => "sweep-q",
            Preset::KernelTable => "kernel-table",
            Preset::Validate => "validate",
        }
    }

    /// Presets that run the nonlinear long-time theory.
    pub fn is_theorem_preset(self) -> bool {
        matches!(
            self,
            Preset::DepositionSubcritical
                | Preset::DepositionSupercritical
                | Preset::DepositionBrownianQ2
                | Preset::EvaporationSubcritical
                | Preset::EvaporationSupercritical
                | Preset::SweepQ
        )
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Preset::ALL.iter().map(|p| p.name()).collect();
                format!("unknown preset {s:?}; expected one of {}", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    pub dim: usize,
    pub n: usize,
    pub half_width: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Gaussian,
    /// `(1 - r²/w²)^power` inside the ball of radius `w`.
    Bump { power: u32 },
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialConfig {
    pub shape: Shape,
    pub amplitude: f64,
    pub width: f64,
    pub center: [f64; 2],
    /// Relative size of the seeded smooth multiplicative perturbation.
    pub noise: f64,
    pub noise_modes: usize,
    /// When set, the amplitude is reduced until the small-data combination
    /// is at most this value.
    pub smallness: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Schedule {
    /// `T·2^{-m/k}` for `m = 0, …, octaves·k`.
    Dyadic { octaves: usize, per_octave: usize },
    Times(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelTableConfig {
    pub t: f64,
    pub points: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub preset: Preset,
    pub symbol: SymbolSpec,
    pub lambda: f64,
    pub q: f64,
    pub grid: GridConfig,
    pub horizon: f64,
    pub dt: f64,
    pub schedule: Schedule,
    pub initial: InitialConfig,
    pub output: PathBuf,
    pub seed: u64,
    pub snapshots: bool,
    pub sweep_q: Vec<f64>,
    pub kernel: KernelTableConfig,
}

impl ExperimentConfig {
    pub fn alpha(&self) -> f64 {
        self.symbol.dominant_alpha().unwrap_or(self.symbol.alpha)
    }

    /// `(N + α)/(N + 1)`.
    pub fn critical_exponent(&self) -> f64 {
        let n = self.grid.dim as f64;
        (n + self.alpha()) / (n + 1.0)
    }

    pub fn sample_times(&self) -> Vec<f64> {
        match &self.schedule {
            Schedule::Dyadic {
                octaves,
                per_octave,
            } => lkpz_core::solver::dyadic_samples(self.horizon, *octaves, *per_octave),
            Schedule::Times(times) => times.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    /// 1-based; 0 when the problem is not tied to a line.
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

/// Every violation found in a configuration.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ConfigErrors(pub Vec<ConfigError>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

const ROOT_KEYS: &[&str] = &[
    "preset", "lambda", "q", "horizon", "dt", "seed", "output", "snapshots",
];
const SECTIONS: &[(&str, &[&str])] = &[
    ("symbol", &["kind", "alpha", "ell", "terms", "radii", "values"]),
    ("grid", &["dim", "n", "half_width"]),
    (
        "initial",
        &[
            "shape", "amplitude", "width", "center", "power", "path", "noise", "noise_modes",
            "smallness",
        ],
    ),
    ("schedule", &["octaves", "per_octave", "times"]),
    ("sweep", &["q"]),
    ("kernel", &["t", "points"]),
];

type Entry<'a> = (usize, &'a DeValue<'a>);

/// Typed access to one section, recording problems as it goes.
struct Section<'a> {
    name: &'a str,
    header_line: usize,
    entries: Vec<(&'a str, Entry<'a>)>,
}

struct Reader<'a> {
    errors: Vec<ConfigError>,
    /// Keys whose values failed to convert; range checks skip them.
    mistyped: Vec<String>,
    sections: Vec<Section<'a>>,
}

struct LineIndex<'a> {
    text: &'a str,
}

impl LineIndex<'_> {
    fn line(&self, span: Range<usize>) -> usize {
        let end = span.start.min(self.text.len());
        self.text[..end].matches('\n').count() + 1
    }
}

impl<'a> Reader<'a> {
    fn error(&mut self, line: usize, message: impl Into<String>) {
        self.errors.push(ConfigError {
            line,
            message: message.into(),
        });
    }

    fn lookup(&self, section: &str, key: &str) -> Option<Entry<'a>> {
        self.sections
            .iter()
            .find(|s| s.name == section)
            .and_then(|s| s.entries.iter().find(|(k, _)| *k == key))
            .map(|(_, e)| *e)
    }

    fn section_line(&self, section: &str) -> usize {
        self.sections
            .iter()
            .find(|s| s.name == section)
            .map_or(0, |s| s.header_line)
    }

    fn line_of(&self, section: &str, key: &str) -> usize {
        self.lookup(section, key)
            .map_or_else(|| self.section_line(section), |(line, _)| line)
    }

    fn is_mistyped(&self, section: &str, key: &str) -> bool {
        let name = qualified(section, key);
        self.mistyped.iter().any(|k| *k == name)
    }

    fn has(&self, section: &str, key: &str) -> bool {
        self.lookup(section, key).is_some()
    }

    fn typed<T>(
        &mut self,
        section: &str,
        key: &str,
        expected: &str,
        convert: impl Fn(&DeValue<'a>) -> Option<T>,
    ) -> Option<T> {
        let (line, value) = self.lookup(section, key)?;
        let out = convert(value);
        if out.is_none() {
            let name = qualified(section, key);
            self.mistyped.push(name.clone());
            self.error(line, format!("{name}: expected {expected}, found {}", value.type_str()));
        }
        out
    }

    fn real(&mut self, section: &str, key: &str) -> Option<f64> {
        self.typed(section, key, "a number", as_real)
    }

    fn real_or(&mut self, section: &str, key: &str, default: f64) -> f64 {
        self.real(section, key).unwrap_or(default)
    }

    fn count(&mut self, section: &str, key: &str) -> Option<u64> {
        self.typed(section, key, "a nonnegative integer", as_count)
    }

    fn count_or(&mut self, section: &str, key: &str, default: u64) -> u64 {
        self.count(section, key).unwrap_or(default)
    }

    fn string(&mut self, section: &str, key: &str) -> Option<String> {
        self.typed(section, key, "a string", |v| v.as_str().map(str::to_owned))
    }

    fn boolean(&mut self, section: &str, key: &str) -> Option<bool> {
        self.typed(section, key, "true or false", DeValue::as_bool)
    }

    fn reals(&mut self, section: &str, key: &str) -> Option<Vec<f64>> {
        self.typed(section, key, "a list of numbers", |v| {
            v.as_array()?.iter().map(|e| as_real(e.get_ref())).collect()
        })
    }

    fn pairs(&mut self, section: &str, key: &str) -> Option<Vec<(f64, f64)>> {
        self.typed(section, key, "a list of [coefficient, exponent] pairs", |v| {
            v.as_array()?
                .iter()
                .map(|e| {
                    let pair = e.get_ref().as_array()?;
                    match pair.as_ref() {
                        [a, b] => Some((as_real(a.get_ref())?, as_real(b.get_ref())?)),
                        _ => None,
                    }
                })
                .collect()
        })
    }
}

fn qualified(section: &str, key: &str) -> String {
    if section.is_empty() {
        key.to_owned()
    } else {
        format!("{section}.{key}")
    }
}

fn as_real(v: &DeValue<'_>) -> Option<f64> {
    match v {
        DeValue::Float(f) => f.as_str().replace('_', "").parse().ok(),
        DeValue::Integer(i) => parse_integer(i.as_str(), i.radix()).map(|n| n as f64),
        _ => None,
    }
}

fn as_count(v: &DeValue<'_>) -> Option<u64> {
    match v {
        DeValue::Integer(i) => parse_integer(i.as_str(), i.radix())
            .filter(|&n| n >= 0)
            .map(|n| n as u64),
        _ => None,
    }
}

fn parse_integer(text: &str, radix: u32) -> Option<i64> {
    let digits = text.replace('_', "");
    let (negative, body) = match digits.strip_prefix('-') {
        Some(rest) => (true, rest.to_owned()),
        None => (false, digits.trim_start_matches('+').to_owned()),
    };
    let body = if radix == 10 { body.as_str() } else { &body[2..] };
    let n = i64::from_str_radix(body, radix).ok()?;
    Some(if negative { -n } else { n })
}

fn collect_sections<'a>(
    table: &'a DeTable<'a>,
    lines: &LineIndex<'a>,
    errors: &mut Vec<ConfigError>,
) -> Vec<Section<'a>> {
    let mut root = Section {
        name: "",
        header_line: 1,
        entries: Vec::new(),
    };
    let mut sections = Vec::new();
    for (key, value) in table.iter() {
        let name: &'a str = key.get_ref();
        let line = lines.line(key.span());
        if let DeValue::Table(inner) = value.get_ref() {
            let Some((_, known)) = SECTIONS.iter().find(|(s, _)| *s == name) else {
                errors.push(ConfigError {
                    line,
                    message: format!("unknown section [{name}]"),
                });
                continue;
            };
            let mut section = Section {
                name,
                header_line: line,
                entries: Vec::new(),
            };
            for (k, v) in inner.iter() {
                let key_name: &'a str = k.get_ref();
                let key_line = lines.line(k.span());
                if known.contains(&key_name) {
                    section.entries.push((key_name, (key_line, v.get_ref())));
                } else {
                    errors.push(ConfigError {
                        line: key_line,
                        message: format!("unknown key {name}.{key_name}"),
                    });
                }
            }
            sections.push(section);
        } else if ROOT_KEYS.contains(&name) {
            root.entries.push((name, (line, value.get_ref())));
        } else {
            errors.push(ConfigError {
                line,
                message: format!("unknown key {name}"),
            });
        }
    }
    sections.push(root);
    sections
}

/// Parses and validates a configuration, filling defaults.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigErrors> {
    let lines = LineIndex { text };
    let (document, syntax) = DeTable::parse_recoverable(text);
    let mut errors: Vec<ConfigError> = syntax
        .iter()
        .map(|e| ConfigError {
            line: e.span().map_or(0, |s| lines.line(s)),
            message: format!("syntax: {}", e.message()),
        })
        .collect();
    let document: &Spanned<DeTable<'_>> = &document;
    let sections = collect_sections(document.get_ref(), &lines, &mut errors);
    let mut r = Reader {
        errors,
        mistyped: Vec::new(),
        sections,
    };
    let config = read_config(&mut r);
    match config {
        Some(c) if r.errors.is_empty() => Ok(c),
        _ => {
            r.errors.sort_by_key(|e| e.line);
            Err(ConfigErrors(r.errors))
        }
    }
}

fn read_config(r: &mut Reader<'_>) -> Option<ExperimentConfig> {
    let preset = match r.string("", "preset") {
        Some(name) => match name.parse::<Preset>() {
            Ok(p) => Some(p),
            Err(msg) => {
                let line = r.line_of("", "preset");
                r.error(line, msg);
                None
            }
        },
        None => {
            if !r.has("", "preset") {
                r.error(0, "missing required key preset");
            }
            None
        }
    };
    let symbol = read_symbol(r);
    let lambda = r.real_or("", "lambda", 0.0);
    let q = r.real_or("", "q", 2.0);
    let grid = read_grid(r);
    let horizon = r.real_or("", "horizon", 64.0);
    let dt = r.real_or("", "dt", 0.05);
    let schedule = read_schedule(r);
    let initial = read_initial(r);
    let output = PathBuf::from(r.string("", "output").unwrap_or_else(|| "lkpz-out".into()));
    let seed = r.count_or("", "seed", 0);
    let snapshots = r.boolean("", "snapshots").unwrap_or(false);
    let sweep_q = r.reals("sweep", "q").unwrap_or_default();
    let kernel = KernelTableConfig {
        t: r.real_or("kernel", "t", 1.0),
        points: r
            .reals("kernel", "points")
            .unwrap_or_else(|| vec![0.0, 0.5, 1.0, 2.0, 4.0]),
    };
    let config = ExperimentConfig {
        preset: preset?,
        symbol: symbol?,
        lambda,
        q,
        grid,
        horizon,
        dt,
        schedule,
        initial,
        output,
        seed,
        snapshots,
        sweep_q,
        kernel,
    };
    check_ranges(r, &config);
    check_preset_gates(r, &config);
    Some(config)
}

fn read_symbol(r: &mut Reader<'_>) -> Option<SymbolSpec> {
    let kind = r.string("symbol", "kind").unwrap_or_else(|| "fractional".into());
    let alpha = r.real_or("symbol", "alpha", 2.0);
    let ell = r.real_or("symbol", "ell", 1.0);
    let line = r.line_of("symbol", "kind");
    let built = match kind.as_str() {
        "fractional" => SymbolSpec::fractional(alpha, ell),
        "multifractional" => {
            let terms = r.pairs("symbol", "terms").unwrap_or_default();
            SymbolSpec::multifractional(terms.into_iter().map(|(c, e)| SymbolTerm::new(c, e)).collect())
        }
        "tabulated" => {
            let radii = r.reals("symbol", "radii").unwrap_or_default();
            let values = r.reals("symbol", "values").unwrap_or_default();
            SymbolSpec::tabulated(alpha, ell, radii, values)
        }
        other => {
            r.error(
                line,
                format!("symbol.kind {other:?} is not fractional, multifractional or tabulated"),
            );
            return None;
        }
    };
    match built {
        Ok(s) => Some(s),
        Err(e) => {
            r.error(line, format!("symbol: {e}"));
            None
        }
    }
}

fn read_grid(r: &mut Reader<'_>) -> GridConfig {
    GridConfig {
        dim: r.count_or("grid", "dim", 1) as usize,
        n: r.count_or("grid", "n", 1024) as usize,
        half_width: r.real_or("grid", "half_width", 64.0),
    }
}

fn read_schedule(r: &mut Reader<'_>) -> Schedule {
    match r.reals("schedule", "times") {
        Some(times) => Schedule::Times(times),
        None => Schedule::Dyadic {
            octaves: r.count_or("schedule", "octaves", 6) as usize,
            per_octave: r.count_or("schedule", "per_octave", 4) as usize,
        },
    }
}

fn read_initial(r: &mut Reader<'_>) -> InitialConfig {
    let shape_name = r.string("initial", "shape").unwrap_or_else(|| "gaussian".into());
    let power = r.count_or("initial", "power", 8) as u32;
    let path = r.string("initial", "path");
    let shape = match shape_name.as_str() {
        "gaussian" => Shape::Gaussian,
        "bump" => Shape::Bump { power },
        "file" => match path {
            Some(p) => Shape::File(PathBuf::from(p)),
            None => {
                let line = r.line_of("initial", "shape");
                r.error(line, "initial.shape = \"file\" needs initial.path");
                Shape::Gaussian
            }
        },
        other => {
            let line = r.line_of("initial", "shape");
            r.error(line, format!("initial.shape {other:?} is not gaussian, bump or file"));
            Shape::Gaussian
        }
    };
    let center = match r.reals("initial", "center") {
        Some(c) if (1..=2).contains(&c.len()) => [c[0], c.get(1).copied().unwrap_or(0.0)],
        Some(_) => {
            let line = r.line_of("initial", "center");
            r.error(line, "initial.center needs one or two coordinates");
            [0.0, 0.0]
        }
        None => [0.0, 0.0],
    };
    InitialConfig {
        shape,
        amplitude: r.real_or("initial", "amplitude", 1.0),
        width: r.real_or("initial", "width", 1.0),
        center,
        noise: r.real_or("initial", "noise", 0.0),
        noise_modes: r.count_or("initial", "noise_modes", 8) as usize,
        smallness: r.real("initial", "smallness"),
    }
}

fn check_ranges(r: &mut Reader<'_>, c: &ExperimentConfig) {
    let fail = |r: &mut Reader<'_>, section: &str, key: &str, msg: String| {
        if !r.is_mistyped(section, key) {
            let line = r.line_of(section, key);
            r.error(line, msg);
        }
    };
    if !(c.q > 1.0 && c.q.is_finite()) {
        fail(r, "", "q", format!("q = {} must exceed 1", c.q));
    }
    if !c.lambda.is_finite() {
        fail(r, "", "lambda", "lambda must be finite".into());
    }
    if !(c.horizon > 0.0 && c.horizon.is_finite()) {
        fail(r, "", "horizon", format!("horizon = {} must be > 0", c.horizon));
    }
    if !(c.dt > 0.0 && c.dt <= c.horizon) {
        fail(r, "", "dt", format!("dt = {} must lie in (0, horizon]", c.dt));
    }
    if !(c.grid.dim == 1 || c.grid.dim == 2) {
        fail(r, "grid", "dim", format!("grid.dim = {} must be 1 or 2", c.grid.dim));
    }
    if c.grid.n < 8 || !c.grid.n.is_power_of_two() {
        fail(r, "grid", "n", format!("grid.n = {} must be a power of two >= 8", c.grid.n));
    }
    if !(c.grid.half_width > 0.0 && c.grid.half_width.is_finite()) {
        fail(r, "grid", "half_width", "grid.half_width must be > 0".into());
    }
    match &c.schedule {
        Schedule::Dyadic { per_octave, .. } if *per_octave == 0 => {
            fail(r, "schedule", "per_octave", "schedule.per_octave must be >= 1".into());
        }
        Schedule::Times(times) => {
            let ok = !times.is_empty()
                && times.iter().all(|&t| t > 0.0 && t <= c.horizon)
                && times.windows(2).all(|w| w[1] > w[0]);
            if !ok {
                fail(r, "schedule", "times", "schedule.times must increase within (0, horizon]".into());
            }
        }
        _ => {}
    }
    let init = &c.initial;
    if !(init.width > 0.0) {
        fail(r, "initial", "width", "initial.width must be > 0".into());
    }
    if !(init.noise >= 0.0 && init.noise < 1.0) {
        fail(r, "initial", "noise", "initial.noise must lie in [0, 1)".into());
    }
    if let Some(s) = init.smallness {
        if !(s > 0.0 && s < 0.1) {
            fail(r, "initial", "smallness", "initial.smallness must lie in (0, 0.1)".into());
        }
    }
    if !(c.kernel.t > 0.0) {
        fail(r, "kernel", "t", "kernel.t must be > 0".into());
    }
}

fn check_preset_gates(r: &mut Reader<'_>, c: &ExperimentConfig) {
    let preset = c.preset;
    let alpha = c.alpha();
    let q_c = c.critical_exponent();
    let fail = |r: &mut Reader<'_>, section: &str, key: &str, msg: String| {
        if !r.is_mistyped(section, key) {
            let line = r.line_of(section, key);
            r.error(line, format!("{preset}: {msg}"));
        }
    };
    if preset.is_theorem_preset() {
        if !(alpha > 1.0 && alpha <= 2.0) {
            fail(r, "symbol", "alpha", format!("the nonlinear theory needs alpha in (1, 2], got {alpha}"));
        }
        if c.initial.amplitude <= 0.0 && !matches!(c.initial.shape, Shape::File(_)) {
            fail(r, "initial", "amplitude", "initial datum must be nonnegative and not identically zero".into());
        }
    }
    match preset {
        Preset::LinearSelfsim if c.lambda != 0.0 => {
            fail(r, "", "lambda", format!("the linear flow needs lambda = 0, got {}", c.lambda));
        }
        Preset::DepositionSubcritical | Preset::DepositionSupercritical | Preset::DepositionBrownianQ2
            if !(c.lambda > 0.0) =>
        {
            fail(r, "", "lambda", format!("deposition needs lambda > 0, got {}", c.lambda));
        }
        Preset::EvaporationSubcritical | Preset::EvaporationSupercritical if !(c.lambda < 0.0) => {
            fail(r, "", "lambda", format!("evaporation needs lambda < 0, got {}", c.lambda));
        }
        _ => {}
    }
    match preset {
        Preset::DepositionSubcritical | Preset::EvaporationSubcritical if !(c.q > 1.0 && c.q <= q_c) => {
            fail(r, "", "q", format!("subcritical runs need 1 < q <= (N+alpha)/(N+1) = {q_c}, got {}", c.q));
        }
        Preset::DepositionSupercritical | Preset::EvaporationSupercritical if !(c.q > q_c) => {
            fail(r, "", "q", format!("supercritical runs need q > (N+alpha)/(N+1) = {q_c}, got {}", c.q));
        }
        Preset::DepositionBrownianQ2 => {
            if c.q < 2.0 {
                fail(r, "", "q", format!("bounded mass for any data needs q >= 2, got {}", c.q));
            }
            if !c.symbol.has_brownian_part() {
                fail(r, "symbol", "kind", "bounded mass for any data needs a Brownian (|xi|^2) term".into());
            }
        }
        Preset::SweepQ => {
            if c.sweep_q.is_empty() {
                fail(r, "sweep", "q", "sweep-q needs a [sweep] q list".into());
            } else {
                let lo = c.sweep_q.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = c.sweep_q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                if !(lo <= q_c && hi > q_c) {
                    fail(r, "sweep", "q", format!("the q list must straddle q_c = {q_c}"));
                }
                if lo <= 1.0 {
                    fail(r, "sweep", "q", "every q must exceed 1".into());
                }
            }
        }
        _ => {}
    }
}
