//! Command-line front end: reads a form from a TOML configuration, runs named
//! verification suites and renders the report.

pub mod config;
pub mod report;
pub mod suites;

use std::path::PathBuf;

use hodge_core::groups::DEFAULT_CAP;
use hodge_core::scalars::{make_field, AnyField, Field, FieldDescriptor, FiniteField};

pub use config::{ConfigError, Format, RunConfig, Setup, Suite};
pub use report::{Report, Row, Status};
pub use suites::Options;

/// Closure cap used by the long profile unless `--cap` is given.
pub const LONG_CAP: usize = 16_000_000;

/// Exit code for configuration errors.
pub const CONFIG_ERROR: i32 = 2;

/// Command-line flags; each overrides the matching `[run]` key.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Invocation {
    pub config: Option<PathBuf>,
    pub suite: Option<String>,
    pub format: Option<String>,
    pub long: bool,
    pub cap: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Resolved {
    pub suite: Suite,
    pub format: Format,
    pub options: Options,
}

pub fn resolve(inv: &Invocation, cfg: Option<&RunConfig>) -> Result<Resolved, ConfigError> {
    let run = cfg.map(|c| c.run.clone()).unwrap_or_default();
    let suite = match &inv.suite {
        Some(s) => s.parse().map_err(|m| ConfigError::new("--suite", m))?,
        None => run.suite.unwrap_or(Suite::All),
    };
    let format = match &inv.format {
        Some(s) => s.parse().map_err(|m| ConfigError::new("--format", m))?,
        None => run.format.unwrap_or_default(),
    };
    let long = inv.long || run.long.unwrap_or(false);
    let cap = match inv.cap {
        Some(0) => return Err(ConfigError::new("--cap", "must be positive")),
        Some(c) => c,
        None => run.cap.unwrap_or(if long { LONG_CAP } else { DEFAULT_CAP }),
    };
    Ok(Resolved {
        suite,
        format,
        options: Options { long, cap },
    })
}

fn field_key(desc: &FieldDescriptor) -> &'static str {
    match desc {
        FieldDescriptor::Finite { .. } => "field.order",
        FieldDescriptor::Rational => "field.kind",
        FieldDescriptor::RationalQuadratic { .. } => "field.d",
    }
}

fn generic_rows<F: Field>(s: &Setup<F>, suite: Suite) -> Vec<Row> {
    match suite {
        Suite::HodgeIdentities => suites::hodge_identities(s),
        Suite::AlgebraClassify => suites::algebra_classify(s),
        Suite::SplitReductions => suites::split_reductions(s),
        Suite::NormSimilarity => suites::norm_similarity(s),
        Suite::Geometry => vec![Row::skip("geometry", "lines of PG(3, F)", "needs a finite field")],
        Suite::Groups => vec![Row::skip("groups", "finite group orders", "needs a finite field")],
        Suite::RationalExamples => suites::rational_examples(),
        Suite::All => unreachable!("expanded before dispatch"),
    }
}

fn finite_rows(s: &Setup<FiniteField>, suite: Suite, opts: &Options) -> Vec<Row> {
    match suite {
        Suite::Geometry => suites::geometry(s, opts),
        Suite::Groups => suites::groups(s, opts),
        other => generic_rows(s, other),
    }
}

/// Validates the configuration in full, then runs the selected suites in order.
pub fn run_suite(cfg: Option<&RunConfig>, suite: Suite, opts: &Options) -> Result<Report, ConfigError> {
    let selected = suite.expand();
    let mut report = Report::default();
    let Some(cfg) = cfg else {
        if selected.iter().any(|s| s.needs_form()) {
            return Err(ConfigError::new("--config", format!("suite `{suite}` needs a configuration file")));
        }
        report.extend(suites::rational_examples());
        return Ok(report);
    };
    let field = make_field(&cfg.field).map_err(|e| ConfigError::new(field_key(&cfg.field), e.to_string()))?;
    match field {
        AnyField::Finite(f) => {
            let s = Setup::build(f, &cfg.form)?;
            for x in selected {
                report.extend(finite_rows(&s, x, opts));
            }
        }
        AnyField::Rational(f) => {
            let s = Setup::build(f, &cfg.form)?;
            for x in selected {
                report.extend(generic_rows(&s, x));
            }
        }
        AnyField::Quadratic(f) => {
            let s = Setup::build(f, &cfg.form)?;
            for x in selected {
                report.extend(generic_rows(&s, x));
            }
        }
    }
    Ok(report)
}

/// Runs an invocation end to end: the rendered report and its exit code.
pub fn execute(inv: &Invocation) -> Result<(String, i32), ConfigError> {
    let cfg = match &inv.config {
        None => None,
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError::new("--config", format!("{}: {e}", path.display())))?;
            Some(RunConfig::parse(&text)?)
        }
    };
    let r = resolve(inv, cfg.as_ref())?;
    let report = run_suite(cfg.as_ref(), r.suite, &r.options)?;
    Ok((report.render(r.format), report.exit_code()))
}
