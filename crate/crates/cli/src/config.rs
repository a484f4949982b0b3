//! Scenario files: one `section.key = value` per line, `#` starts a comment.
//!
//! Values are numbers, words, `re:im` pairs, or bracketed lists whose items are
//! numbers or colon-joined tuples (`[q1:w1, q2:w2]`) or words (`[trace, purity]`).

use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Number(f64),
    Word(String),
    /// Colon-joined reals outside brackets, e.g. a complex constant `0.3:-0.1`.
    Tuple(Vec<f64>),
    List(Vec<String>),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Number(x) => write!(f, "{x:?}"),
            Value::Word(w) => f.write_str(w),
            Value::Tuple(t) => f.write_str(&join_reals(t)),
            Value::List(items) => write!(f, "[{}]", items.join(", ")),
        }
    }
}

fn join_reals(t: &[f64]) -> String {
    t.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(":")
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError {
    /// 1-based line number; 0 for errors not tied to a line.
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            f.write_str(&self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConfigErrors(pub Vec<ConfigError>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StateKind {
    Gaussian,
    Cat,
    Thermal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorKind {
    JoosZeh,
    CaldeiraLeggett,
    Grw,
    Alicki,
    Gallis93,
    Diosi,
    Vacchini,
    Hamiltonian,
    LevyGaussian,
    LevyPoisson,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 10] = [
        GeneratorKind::JoosZeh,
        GeneratorKind::CaldeiraLeggett,
        GeneratorKind::Grw,
        GeneratorKind::Alicki,
        GeneratorKind::Gallis93,
        GeneratorKind::Diosi,
        GeneratorKind::Vacchini,
        GeneratorKind::Hamiltonian,
        GeneratorKind::LevyGaussian,
        GeneratorKind::LevyPoisson,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::JoosZeh => "joos_zeh",
            GeneratorKind::CaldeiraLeggett => "caldeira_leggett",
            GeneratorKind::Grw => "grw",
            GeneratorKind::Alicki => "alicki",
            GeneratorKind::Gallis93 => "gallis93",
            GeneratorKind::Diosi => "diosi",
            GeneratorKind::Vacchini => "vacchini",
            GeneratorKind::Hamiltonian => "hamiltonian",
            GeneratorKind::LevyGaussian => "levy_gaussian",
            GeneratorKind::LevyPoisson => "levy_poisson",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    /// Accepted keys with their shape; `true` marks required keys.
    fn keys(self) -> &'static [(&'static str, Shape, bool)] {
        use Shape::*;
        match self {
            GeneratorKind::JoosZeh => &[("lambda", Real, true)],
            GeneratorKind::CaldeiraLeggett => &[
                ("gamma", Real, true),
                ("beta", Real, true),
                ("mass", Real, false),
                ("chi", Real, false),
            ],
            GeneratorKind::Grw => &[("lambda", Real, true), ("alpha", Real, true)],
            GeneratorKind::Alicki => &[
                ("tau", Table(2), false),
                ("g", Table(2), false),
                ("f", Table(3), false),
                ("kicks", Table(1), false),
            ],
            GeneratorKind::Gallis93 => &[
                ("alpha", Table(3), false),
                ("beta", Table(3), false),
                ("g", Table(2), false),
                ("f", Table(3), false),
                ("kicks", Table(1), false),
            ],
            GeneratorKind::Diosi => &[
                ("gas_beta", Real, false),
                ("sigma", Table(2), false),
                ("gas_mass", Real, true),
                ("mass", Real, false),
                ("density", Real, true),
                ("amplitude", Complex, false),
                ("amplitude_table", Table(3), false),
                ("shell_width", Real, false),
                ("boundary", Choice(&["truncate", "wrap"]), false),
            ],
            GeneratorKind::Vacchini => &[
                ("structure", Choice(&["maxwell"]), false),
                ("gas_beta", Real, true),
                ("gas_mass", Real, true),
                ("mass", Real, false),
                ("kicks", Table(1), true),
                ("t_matrix", Complex, false),
                ("t_matrix_table", Table(3), false),
                ("density", Real, true),
                ("boundary", Choice(&["truncate", "wrap"]), false),
            ],
            GeneratorKind::Hamiltonian => &[("mass", Real, false)],
            GeneratorKind::LevyGaussian => &[
                ("a0", Real, false),
                ("terms", Table(3), false),
                ("h_mass", Real, false),
            ],
            GeneratorKind::LevyPoisson => &[
                ("measure", Table(2), true),
                ("l", Complex, false),
                ("omega", Complex, false),
            ],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Shape {
    Real,
    Int,
    Bool,
    /// A real or an `re:im` pair.
    Complex,
    Path,
    Choice(&'static [&'static str]),
    /// Bracketed list of tuples with the given arity.
    Table(usize),
    Words,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    /// `section.key` → value, after defaults are filled in.
    entries: BTreeMap<String, Value>,
}

/// A successfully parsed config with the warnings raised while filling defaults.
#[derive(Clone, Debug, PartialEq)]
pub struct Parsed {
    pub config: ScenarioConfig,
    pub warnings: Vec<String>,
}

const OBSERVABLES: [&str; 6] = ["trace", "purity", "energy", "min_eig", "px2", "px1"];

fn fixed_keys(section: &str) -> Option<&'static [(&'static str, Shape, bool)]> {
    use Shape::*;
    Some(match section {
        "lattice" => &[("n", Int, true), ("extent", Real, true), ("hbar", Real, false)],
        "particle" => &[("mass", Real, false)],
        "evolution" => &[
            ("t_final", Real, false),
            ("dt", Real, false),
            ("record_every", Int, false),
            ("integrator", Choice(&["auto", "exact", "rk4"]), false),
            ("free_hamiltonian", Bool, false),
        ],
        "observables" => &[("list", Words, false)],
        "outputs" => &[("csv", Path, false), ("snapshots", Path, false), ("report", Path, false)],
        _ => return None,
    })
}

fn state_keys(kind: StateKind) -> &'static [(&'static str, Shape, bool)] {
    use Shape::*;
    match kind {
        StateKind::Gaussian => &[("x_c", Real, false), ("p_c", Real, false), ("width", Real, true)],
        StateKind::Cat => &[("separation", Real, true), ("width", Real, true)],
        StateKind::Thermal => &[("beta", Real, true), ("mass", Real, false)],
    }
}

fn parse_value(raw: &str) -> std::result::Result<Value, String> {
    let raw = raw.trim();
    if raw.is_empty() {
        return Err("missing value".into());
    }
    if let Some(inner) = raw.strip_prefix('[') {
        let inner = inner
            .strip_suffix(']')
            .ok_or_else(|| "unterminated list".to_string())?;
        let items: Vec<String> = inner
            .split(',')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect();
        return Ok(Value::List(items));
    }
    let unquoted = raw
        .strip_prefix('"')
        .and_then(|s| s.strip_suffix('"'))
        .unwrap_or(raw);
    if let Ok(x) = unquoted.parse::<f64>() {
        return Ok(Value::Number(x));
    }
    if unquoted.contains(':') {
        if let Ok(t) = unquoted.split(':').map(|p| p.trim().parse::<f64>()).collect() {
            return Ok(Value::Tuple(t));
        }
    }
    Ok(Value::Word(unquoted.to_string()))
}

fn check_shape(value: &Value, shape: Shape) -> std::result::Result<(), String> {
    let finite = |x: f64| {
        if x.is_finite() {
            Ok(())
        } else {
            Err(format!("non-finite number {x}"))
        }
    };
    match (shape, value) {
        (Shape::Real, Value::Number(x)) => finite(*x),
        (Shape::Real, v) => Err(format!("malformed number `{v}`")),
        (Shape::Int, Value::Number(x)) if x.fract() == 0.0 && *x >= 0.0 && x.is_finite() => Ok(()),
        (Shape::Int, v) => Err(format!("expected a nonnegative integer, found `{v}`")),
        (Shape::Bool, Value::Word(w)) if w == "true" || w == "false" => Ok(()),
        (Shape::Bool, v) => Err(format!("expected true or false, found `{v}`")),
        (Shape::Complex, Value::Number(x)) => finite(*x),
        (Shape::Complex, Value::Tuple(t)) if t.len() == 2 => t.iter().try_for_each(|&x| finite(x)),
        (Shape::Complex, v) => Err(format!("expected a real or re:im pair, found `{v}`")),
        (Shape::Path, Value::Word(_)) => Ok(()),
        (Shape::Path, v) => Err(format!("expected a path, found `{v}`")),
        (Shape::Choice(opts), Value::Word(w)) if opts.contains(&w.as_str()) => Ok(()),
        (Shape::Choice(opts), v) => Err(format!("expected one of {}, found `{v}`", opts.join(", "))),
        (Shape::Table(arity), Value::List(items)) => {
            for item in items {
                let parts: Vec<&str> = item.split(':').collect();
                if parts.len() != arity {
                    return Err(format!("entry `{item}` should have {arity} colon-separated numbers"));
                }
                for p in parts {
                    let x: f64 = p
                        .trim()
                        .parse()
                        .map_err(|_| format!("malformed number `{p}` in entry `{item}`"))?;
                    finite(x)?;
                }
            }
            Ok(())
        }
        (Shape::Table(_), v) => Err(format!("expected a bracketed list, found `{v}`")),
        (Shape::Words, Value::List(_)) => Ok(()),
        (Shape::Words, v) => Err(format!("expected a bracketed list, found `{v}`")),
    }
}

fn observable_ok(name: &str) -> bool {
    if OBSERVABLES.contains(&name) {
        return true;
    }
    name.strip_prefix("coherence@")
        .and_then(|s| s.parse::<f64>().ok())
        .is_some_and(|s| s.is_finite() && s >= 0.0)
}

/// Parses and validates a scenario, collecting every error with its line number.
pub fn parse_config(text: &str) -> std::result::Result<Parsed, ConfigErrors> {
    let mut errors = Vec::new();
    let mut raw: BTreeMap<String, (usize, Value)> = BTreeMap::new();

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let content = match line.find('#') {
            Some(p) => &line[..p],
            None => line,
        }
        .trim();
        if content.is_empty() {
            continue;
        }
        let err = |m: String| ConfigError { line: lineno, message: m };
        let Some((key, value)) = content.split_once('=') else {
            errors.push(err(format!("expected `section.key = value`, found `{content}`")));
            continue;
        };
        let key = key.trim();
        if key.split('.').count() != 2 || key.split('.').any(|p| p.is_empty()) {
            errors.push(err(format!("key `{key}` is not of the form section.key")));
            continue;
        }
        match parse_value(value) {
            Ok(v) => {
                if let Some((first, _)) = raw.get(key) {
                    errors.push(err(format!("duplicate key `{key}` (first set on line {first})")));
                } else {
                    raw.insert(key.to_string(), (lineno, v));
                }
            }
            Err(m) => errors.push(err(format!("{key}: {m}"))),
        }
    }

    let mut warnings = Vec::new();
    let mut entries = BTreeMap::new();
    let line_of = |k: &str, raw: &BTreeMap<String, (usize, Value)>| raw.get(k).map_or(0, |e| e.0);

    // kinds decide which keys are allowed in the state and generator sections
    let state_kind = match raw.get("state.kind") {
        Some((l, Value::Word(w))) => match w.as_str() {
            "gaussian" => Some(StateKind::Gaussian),
            "cat" => Some(StateKind::Cat),
            "thermal" => Some(StateKind::Thermal),
            _ => {
                errors.push(ConfigError {
                    line: *l,
                    message: format!("unknown state kind `{w}` (gaussian, cat, thermal)"),
                });
                None
            }
        },
        Some((l, v)) => {
            errors.push(ConfigError {
                line: *l,
                message: format!("state.kind: expected a name, found `{v}`"),
            });
            None
        }
        None => None,
    };
    let gen_kind = match raw.get("generator.kind") {
        Some((l, Value::Word(w))) => {
            let k = GeneratorKind::from_name(w);
            if k.is_none() {
                let names: Vec<_> = GeneratorKind::ALL.iter().map(|k| k.name()).collect();
                errors.push(ConfigError {
                    line: *l,
                    message: format!("unknown generator kind `{w}` ({})", names.join(", ")),
                });
            }
            k
        }
        Some((l, v)) => {
            errors.push(ConfigError {
                line: *l,
                message: format!("generator.kind: expected a name, found `{v}`"),
            });
            None
        }
        None => None,
    };

    for section in ["lattice", "state", "generator"] {
        if !raw.keys().any(|k| k.starts_with(&format!("{section}."))) {
            errors.push(ConfigError {
                line: 0,
                message: format!("missing required section `{section}`"),
            });
        } else if section != "lattice" && !raw.contains_key(&format!("{section}.kind")) {
            errors.push(ConfigError {
                line: 0,
                message: format!("missing required key `{section}.kind`"),
            });
        }
    }

    for (key, (lineno, value)) in &raw {
        let (section, name) = key.split_once('.').expect("checked above");
        let schema: Option<&[(&str, Shape, bool)]> = match section {
            "state" if name == "kind" => None,
            "generator" if name == "kind" => None,
            "state" => state_kind.map(state_keys),
            "generator" => gen_kind.map(GeneratorKind::keys),
            other => match fixed_keys(other) {
                Some(s) => Some(s),
                None => {
                    errors.push(ConfigError {
                        line: *lineno,
                        message: format!("unknown section `{other}`"),
                    });
                    continue;
                }
            },
        };
        if name == "kind" && (section == "state" || section == "generator") {
            entries.insert(key.clone(), value.clone());
            continue;
        }
        let Some(schema) = schema else {
            // kind missing or invalid: already reported
            continue;
        };
        match schema.iter().find(|(k, _, _)| *k == name) {
            None => errors.push(ConfigError {
                line: *lineno,
                message: format!("unknown key `{key}`"),
            }),
            Some((_, shape, _)) => match check_shape(value, *shape) {
                Ok(()) => {
                    entries.insert(key.clone(), value.clone());
                }
                Err(m) => errors.push(ConfigError {
                    line: *lineno,
                    message: format!("{key}: {m}"),
                }),
            },
        }
    }

    let mut require = |section: &str, schema: &[(&str, Shape, bool)]| {
        for (k, _, required) in schema {
            let key = format!("{section}.{k}");
            if *required && !raw.contains_key(&key) {
                errors.push(ConfigError {
                    line: 0,
                    message: format!("missing required key `{key}`"),
                });
            }
        }
    };
    if raw.keys().any(|k| k.starts_with("lattice.")) {
        require("lattice", fixed_keys("lattice").unwrap());
    }
    if let Some(k) = state_kind {
        require("state", state_keys(k));
    }
    if let Some(k) = gen_kind {
        require("generator", k.keys());
    }

    if let Some((l, Value::List(items))) = raw.get("observables.list") {
        for item in items {
            if !observable_ok(item) {
                errors.push(ConfigError {
                    line: *l,
                    message: format!(
                        "unknown observable `{item}` (trace, purity, energy, min_eig, coherence@<s>, px2, px1)"
                    ),
                });
            }
        }
    }

    match gen_kind {
        Some(GeneratorKind::CaldeiraLeggett) if !raw.contains_key("generator.chi") => {
            warnings.push("generator.chi not set; using the minimal value 0.125".to_string());
            entries.insert("generator.chi".into(), Value::Number(0.125));
        }
        Some(GeneratorKind::Alicki) => {
            let has_tau = raw.contains_key("generator.tau");
            let has_g = raw.contains_key("generator.g");
            if has_tau == has_g {
                errors.push(ConfigError {
                    line: line_of("generator.kind", &raw),
                    message: "alicki needs exactly one of generator.tau or generator.g".into(),
                });
            }
            if has_g && !raw.contains_key("generator.kicks") {
                errors.push(ConfigError {
                    line: line_of("generator.g", &raw),
                    message: "generator.g needs generator.kicks".into(),
                });
            }
        }
        Some(GeneratorKind::Gallis93) => {
            let has_g = raw.contains_key("generator.g");
            if has_g && raw.contains_key("generator.alpha") {
                errors.push(ConfigError {
                    line: line_of("generator.g", &raw),
                    message: "give either generator.alpha or generator.g, not both".into(),
                });
            }
            if has_g && !raw.contains_key("generator.kicks") {
                errors.push(ConfigError {
                    line: line_of("generator.g", &raw),
                    message: "generator.g needs generator.kicks".into(),
                });
            }
        }
        Some(GeneratorKind::Diosi)
            if raw.contains_key("generator.gas_beta") == raw.contains_key("generator.sigma") =>
        {
            errors.push(ConfigError {
                line: line_of("generator.kind", &raw),
                message: "diosi needs exactly one of generator.gas_beta or generator.sigma".into(),
            });
        }
        _ => {}
    }

    if errors.is_empty() {
        for w in &warnings {
            log::warn!("{w}");
        }
        Ok(Parsed {
            config: ScenarioConfig { entries },
            warnings,
        })
    } else {
        errors.sort_by_key(|e| e.line);
        Err(ConfigErrors(errors))
    }
}

/// Canonical text form; `parse_config(&render_config(c))` reproduces `c`.
pub fn render_config(c: &ScenarioConfig) -> String {
    let mut out = String::new();
    let mut section = "";
    for (key, value) in &c.entries {
        let (s, _) = key.split_once('.').expect("keys are section.key");
        if s != section {
            if !section.is_empty() {
                out.push('\n');
            }
            section = s;
        }
        out.push_str(&format!("{key} = {value}\n"));
    }
    out
}

impl ScenarioConfig {
    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.get(key)
    }

    pub fn entries(&self) -> &BTreeMap<String, Value> {
        &self.entries
    }

    pub fn real(&self, key: &str) -> Option<f64> {
        match self.entries.get(key) {
            Some(Value::Number(x)) => Some(*x),
            _ => None,
        }
    }

    pub fn real_or(&self, key: &str, default: f64) -> f64 {
        self.real(key).unwrap_or(default)
    }

    pub fn word(&self, key: &str) -> Option<&str> {
        match self.entries.get(key) {
            Some(Value::Word(w)) => Some(w),
            _ => None,
        }
    }

    pub fn flag(&self, key: &str) -> bool {
        self.word(key) == Some("true")
    }

    /// `re` or `re:im`.
    pub fn complex(&self, key: &str) -> Option<(f64, f64)> {
        match self.entries.get(key) {
            Some(Value::Number(x)) => Some((*x, 0.0)),
            Some(Value::Tuple(t)) if t.len() == 2 => Some((t[0], t[1])),
            _ => None,
        }
    }

    /// Rows of a validated table.
    pub fn table(&self, key: &str) -> Option<Vec<Vec<f64>>> {
        match self.entries.get(key) {
            Some(Value::List(items)) => Some(
                items
                    .iter()
                    .map(|it| it.split(':').map(|p| p.trim().parse().unwrap_or(f64::NAN)).collect())
                    .collect(),
            ),
            _ => None,
        }
    }

    pub fn words(&self, key: &str) -> Vec<String> {
        match self.entries.get(key) {
            Some(Value::List(items)) => items.clone(),
            _ => Vec::new(),
        }
    }

    pub fn state_kind(&self) -> StateKind {
        match self.word("state.kind") {
            Some("cat") => StateKind::Cat,
            Some("thermal") => StateKind::Thermal,
            _ => StateKind::Gaussian,
        }
    }

    pub fn generator_kind(&self) -> GeneratorKind {
        self.word("generator.kind")
            .and_then(GeneratorKind::from_name)
            .expect("validated at parse time")
    }

    pub fn observables(&self) -> Vec<String> {
        self.words("observables.list")
    }

    /// Replaces or inserts a value. The result is not re-validated.
    pub fn set(&mut self, key: &str, value: Value) {
        self.entries.insert(key.to_string(), value);
    }
}
