//! Run configuration: a TOML document with `[field]`, `[form]` and `[run]`
//! sections, validated before any computation.

use std::fmt;
use std::str::FromStr;

use hodge_core::exterior::TopForm;
use hodge_core::forms::HermitianSpace;
use hodge_core::hodge::HodgeOperator;
use hodge_core::linalg::Matrix;
use hodge_core::scalars::{Field, FieldDescriptor, Involution};
use toml::{Table, Value};

/// Largest supported dimension of `V`.
pub const MAX_DIM: usize = 8;

/// A configuration failure, always tied to the key that caused it.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{key}: {message}")]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            key: key.into(),
            message: message.into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    HodgeIdentities,
    AlgebraClassify,
    SplitReductions,
    NormSimilarity,
    Geometry,
    Groups,
    RationalExamples,
    All,
}

impl Suite {
    pub const EACH: [Suite; 7] = [
        Suite::HodgeIdentities,
        Suite::AlgebraClassify,
        Suite::SplitReductions,
        Suite::NormSimilarity,
        Suite::Geometry,
        Suite::Groups,
        Suite::RationalExamples,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::HodgeIdentities => "hodge-identities",
            Suite::AlgebraClassify => "algebra-classify",
            Suite::SplitReductions => "split-reductions",
            Suite::NormSimilarity => "norm-similarity",
            Suite::Geometry => "geometry",
            Suite::Groups => "groups",
            Suite::RationalExamples => "rational-examples",
            Suite::All => "all",
        }
    }

    /// The concrete suites this selection runs, in report order.
    pub fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => Suite::EACH.to_vec(),
            s => vec![s],
        }
    }

    /// Whether the suite reads the configured form.
    pub fn needs_form(self) -> bool {
        self != Suite::RationalExamples
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::EACH
            .iter()
            .chain(&[Suite::All])
            .copied()
            .find(|x| x.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Suite::EACH.iter().map(|x| x.name()).chain(["all"]).collect();
                format!("unknown suite `{s}` (expected one of {})", names.join(", "))
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Csv,
    JsonLines,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(Format::Text),
            "csv" => Ok(Format::Csv),
            "json-lines" => Ok(Format::JsonLines),
            _ => Err(format!("unknown format `{s}` (expected text, csv or json-lines)")),
        }
    }
}

/// Gram matrix entries as written in the file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GramSpec {
    Full(Vec<Vec<String>>),
    Diagonal(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormSpec {
    pub gram: GramSpec,
    pub degree: usize,
    pub b0: String,
}

/// The optional `[run]` section; unset values fall back to flags or defaults.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunSection {
    pub suite: Option<Suite>,
    pub format: Option<Format>,
    pub long: Option<bool>,
    pub cap: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub field: FieldDescriptor,
    pub form: FormSpec,
    pub run: RunSection,
}

fn scalar_string(key: &str, v: &Value) -> Result<String, ConfigError> {
    match v {
        Value::Integer(i) => Ok(i.to_string()),
        Value::String(s) => Ok(s.trim().to_string()),
        Value::Float(_) => Err(ConfigError::new(key, "floats are not exact; write an integer or a fraction string")),
        _ => Err(ConfigError::new(key, "expected an integer or a string")),
    }
}

fn check_keys(section: &str, table: &Table, allowed: &[&str]) -> Result<(), ConfigError> {
    match table.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(ConfigError::new(format!("{section}.{k}"), "unknown key")),
        None => Ok(()),
    }
}

fn section<'a>(root: &'a Table, name: &str) -> Result<Option<&'a Table>, ConfigError> {
    match root.get(name) {
        None => Ok(None),
        Some(Value::Table(t)) => Ok(Some(t)),
        Some(_) => Err(ConfigError::new(name, "expected a section")),
    }
}

fn get_str<'a>(t: &'a Table, section: &str, key: &str) -> Result<Option<&'a str>, ConfigError> {
    match t.get(key) {
        None => Ok(None),
        Some(Value::String(s)) => Ok(Some(s)),
        Some(_) => Err(ConfigError::new(format!("{section}.{key}"), "expected a string")),
    }
}

fn get_uint(t: &Table, section: &str, key: &str) -> Result<Option<u64>, ConfigError> {
    match t.get(key) {
        None => Ok(None),
        Some(Value::Integer(i)) if *i >= 0 => Ok(Some(*i as u64)),
        Some(_) => Err(ConfigError::new(format!("{section}.{key}"), "expected a non-negative integer")),
    }
}

fn parse_involution(t: &Table) -> Result<Involution, ConfigError> {
    match get_str(t, "field", "involution")? {
        None | Some("identity") => Ok(Involution::Identity),
        Some("galois") => Ok(Involution::Galois),
        Some(other) => Err(ConfigError::new(
            "field.involution",
            format!("unknown involution `{other}` (expected identity or galois)"),
        )),
    }
}

fn parse_field(root: &Table) -> Result<FieldDescriptor, ConfigError> {
    let t = section(root, "field")?.ok_or_else(|| ConfigError::new("field", "missing section"))?;
    check_keys("field", t, &["kind", "order", "involution", "d"])?;
    let kind = get_str(t, "field", "kind")?.ok_or_else(|| ConfigError::new("field.kind", "missing"))?;
    let involution = parse_involution(t)?;
    let forbid = |key: &str| match t.contains_key(key) {
        true => Err(ConfigError::new(format!("field.{key}"), format!("not used by kind `{kind}`"))),
        false => Ok(()),
    };
    match kind {
        "finite" => {
            forbid("d")?;
            let order = get_uint(t, "field", "order")?.ok_or_else(|| ConfigError::new("field.order", "missing"))?;
            Ok(FieldDescriptor::Finite { order, involution })
        }
        "rational" => {
            forbid("d")?;
            forbid("order")?;
            if involution != Involution::Identity {
                return Err(ConfigError::new("field.involution", "the rationals only carry the identity"));
            }
            Ok(FieldDescriptor::Rational)
        }
        "quadratic" => {
            forbid("order")?;
            let d = match t.get("d") {
                Some(Value::Integer(d)) => *d,
                Some(_) => return Err(ConfigError::new("field.d", "expected an integer")),
                None => return Err(ConfigError::new("field.d", "missing")),
            };
            Ok(FieldDescriptor::RationalQuadratic { d, involution })
        }
        other => Err(ConfigError::new(
            "field.kind",
            format!("unknown kind `{other}` (expected finite, rational or quadratic)"),
        )),
    }
}

fn parse_form(root: &Table) -> Result<FormSpec, ConfigError> {
    let t = section(root, "form")?.ok_or_else(|| ConfigError::new("form", "missing section"))?;
    check_keys("form", t, &["gram", "diagonal", "degree", "b0"])?;
    let gram = match (t.get("gram"), t.get("diagonal")) {
        (Some(_), Some(_)) => return Err(ConfigError::new("form.diagonal", "give either form.gram or form.diagonal")),
        (None, None) => return Err(ConfigError::new("form.gram", "missing (or give form.diagonal)")),
        (Some(g), None) => {
            let Value::Array(rows) = g else {
                return Err(ConfigError::new("form.gram", "expected an array of rows"));
            };
            let mut out = Vec::new();
            for (i, row) in rows.iter().enumerate() {
                let Value::Array(cells) = row else {
                    return Err(ConfigError::new(format!("form.gram[{i}]"), "expected an array"));
                };
                let row = cells
                    .iter()
                    .enumerate()
                    .map(|(j, c)| scalar_string(&format!("form.gram[{i}][{j}]"), c))
                    .collect::<Result<Vec<_>, _>>()?;
                out.push(row);
            }
            GramSpec::Full(out)
        }
        (None, Some(d)) => {
            let Value::Array(cells) = d else {
                return Err(ConfigError::new("form.diagonal", "expected an array"));
            };
            GramSpec::Diagonal(
                cells
                    .iter()
                    .enumerate()
                    .map(|(i, c)| scalar_string(&format!("form.diagonal[{i}]"), c))
                    .collect::<Result<Vec<_>, _>>()?,
            )
        }
    };
    let degree = get_uint(t, "form", "degree")?.ok_or_else(|| ConfigError::new("form.degree", "missing"))? as usize;
    let b0 = match t.get("b0") {
        None => "1".to_string(),
        Some(v) => scalar_string("form.b0", v)?,
    };
    Ok(FormSpec { gram, degree, b0 })
}

fn parse_run(root: &Table) -> Result<RunSection, ConfigError> {
    let Some(t) = section(root, "run")? else {
        return Ok(RunSection::default());
    };
    check_keys("run", t, &["suite", "format", "long", "cap"])?;
    let suite = get_str(t, "run", "suite")?
        .map(|s| s.parse().map_err(|m| ConfigError::new("run.suite", m)))
        .transpose()?;
    let format = get_str(t, "run", "format")?
        .map(|s| s.parse().map_err(|m| ConfigError::new("run.format", m)))
        .transpose()?;
    let long = match t.get("long") {
        None => None,
        Some(Value::Boolean(b)) => Some(*b),
        Some(_) => return Err(ConfigError::new("run.long", "expected true or false")),
    };
    let cap = get_uint(t, "run", "cap")?.map(|c| c as usize);
    if cap == Some(0) {
        return Err(ConfigError::new("run.cap", "must be positive"));
    }
    Ok(RunSection { suite, format, long, cap })
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let root: Table = text.parse().map_err(|e: toml::de::Error| {
            ConfigError::new("<document>", e.message().to_string())
        })?;
        check_keys("<document>", &root, &["field", "form", "run"]).map_err(|e| {
            ConfigError::new(e.key.trim_start_matches("<document>."), "unknown section")
        })?;
        Ok(RunConfig {
            field: parse_field(&root)?,
            form: parse_form(&root)?,
            run: parse_run(&root)?,
        })
    }
}

/// A validated form ready for the suites.
#[derive(Clone, Debug)]
pub struct Setup<F: Field> {
    pub hodge: HodgeOperator<F>,
}

impl<F: Field> Setup<F> {
    pub fn space(&self) -> &HermitianSpace<F> {
        self.hodge.space()
    }

    pub fn field(&self) -> &F {
        self.hodge.field()
    }

    pub fn top(&self) -> &TopForm<F::Elem> {
        self.hodge.top()
    }

    pub fn degree(&self) -> usize {
        self.hodge.degree()
    }

    pub fn dim(&self) -> usize {
        self.hodge.dim()
    }

    pub fn build(field: F, form: &FormSpec) -> Result<Self, ConfigError> {
        let f = &field;
        let parse = |key: String, s: &str| f.parse(s).map_err(|e| ConfigError::new(key, e.to_string()));
        let gram = match &form.gram {
            GramSpec::Full(rows) => {
                let n = rows.len();
                let mut out = Vec::with_capacity(n);
                for (i, row) in rows.iter().enumerate() {
                    if row.len() != n {
                        return Err(ConfigError::new(
                            format!("form.gram[{i}]"),
                            format!("has {} entries; the matrix must be {n} x {n}", row.len()),
                        ));
                    }
                    out.push(
                        row.iter()
                            .enumerate()
                            .map(|(j, s)| parse(format!("form.gram[{i}][{j}]"), s))
                            .collect::<Result<Vec<_>, _>>()?,
                    );
                }
                out
            }
            GramSpec::Diagonal(d) => {
                let values = d
                    .iter()
                    .enumerate()
                    .map(|(i, s)| parse(format!("form.diagonal[{i}]"), s))
                    .collect::<Result<Vec<_>, _>>()?;
                let n = values.len();
                (0..n)
                    .map(|i| (0..n).map(|j| if i == j { values[i].clone() } else { f.zero() }).collect())
                    .collect()
            }
        };
        let key = match form.gram {
            GramSpec::Full(_) => "form.gram",
            GramSpec::Diagonal(_) => "form.diagonal",
        };
        let n = gram.len();
        if n == 0 || n > MAX_DIM {
            return Err(ConfigError::new(key, format!("dimension {n} is outside 1..={MAX_DIM}")));
        }
        let space = HermitianSpace::new(field.clone(), Matrix::from_rows(gram))
            .map_err(|e| ConfigError::new(key, e.to_string()))?;
        if form.degree > n {
            return Err(ConfigError::new("form.degree", format!("must lie in 0..={n}")));
        }
        let b0 = parse("form.b0".into(), &form.b0)?;
        let top = TopForm::new(f, b0).map_err(|e| ConfigError::new("form.b0", e.to_string()))?;
        let hodge = HodgeOperator::new(space, top, form.degree).map_err(|e| ConfigError::new("form.degree", e.to_string()))?;
        Ok(Setup { hodge })
    }
}
