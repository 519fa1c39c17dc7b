//! WebAssembly bindings for the static page in `www/`. Every entry point takes
//! the same TOML text the command-line tool reads.

use hodge_cli::{run_suite, ConfigError, Format, Options, RunConfig, Setup, Suite};
use hodge_core::exterior::{mask_indices, ExtBasis, Mask};
use hodge_core::groups::DEFAULT_CAP;
use hodge_core::scalars::{make_field, AnyField, Field};
use wasm_bindgen::prelude::*;

fn with_setup<R>(
    config: &str,
    body: impl FnOnce(&dyn Describe) -> R,
) -> Result<R, ConfigError> {
    let cfg = RunConfig::parse(config)?;
    let field = make_field(&cfg.field).map_err(|e| ConfigError::new("field", e.to_string()))?;
    Ok(match field {
        AnyField::Finite(f) => body(&Setup::build(f, &cfg.form)?),
        AnyField::Rational(f) => body(&Setup::build(f, &cfg.form)?),
        AnyField::Quadratic(f) => body(&Setup::build(f, &cfg.form)?),
    })
}

trait Describe {
    fn hodge_text(&self) -> String;
    fn algebra_text(&self) -> String;
}

fn basis_label(mask: Mask) -> String {
    if mask == 0 {
        return "1".into();
    }
    let digits: String = mask_indices(mask).iter().map(|i| i.to_string()).collect();
    format!("e{digits}")
}

impl<F: Field> Describe for Setup<F> {
    fn hodge_text(&self) -> String {
        let h = &self.hodge;
        let f = self.field();
        let basis = ExtBasis::new(self.dim(), self.degree());
        let labels: Vec<String> = basis.masks().iter().map(|m| basis_label(*m)).collect();
        let m = h.matrix();
        let cells: Vec<Vec<String>> = (0..m.rows()).map(|i| (0..m.cols()).map(|j| f.format(m.get(i, j))).collect()).collect();
        let width = cells.iter().flatten().chain(&labels).map(|s| s.chars().count()).max().unwrap_or(1);
        let mut out = format!("delta = {}\n\n", f.format(h.delta()));
        out.push_str(&format!("{:>width$}", ""));
        for l in &labels {
            out.push_str(&format!("  {l:>width$}"));
        }
        out.push('\n');
        for (l, row) in labels.iter().zip(&cells) {
            out.push_str(&format!("{l:>width$}"));
            for c in row {
                out.push_str(&format!("  {c:>width$}"));
            }
            out.push('\n');
        }
        out.push_str("\ncolumn k holds the image of the k-th basis vector\n");
        out
    }

    fn algebra_text(&self) -> String {
        let k = self.hodge.algebra();
        let mut out = format!(
            "delta = {}\nkind = {}\nsplit = {}\n",
            self.field().format(k.delta()),
            k.kind(),
            k.is_split()
        );
        let idem = k.idempotents();
        if !idem.is_empty() {
            let shown: Vec<String> = idem.iter().map(|p| k.format(p)).collect();
            out.push_str(&format!("idempotents = {}\n", shown.join(", ")));
        }
        if let Some(z) = k.nilpotent() {
            out.push_str(&format!("nilpotent = {}\n", k.format(&z)));
        }
        out
    }
}

/// The Hodge matrix and its square constant.
pub fn hodge_matrix_text(config: &str) -> Result<String, ConfigError> {
    with_setup(config, |s| s.hodge_text())
}

/// Kind of the algebra generated by the Hodge operator.
pub fn classify_text(config: &str) -> Result<String, ConfigError> {
    with_setup(config, |s| s.algebra_text())
}

/// A text report for one suite; the browser build never runs the long profile.
pub fn report_text(config: &str, suite: &str) -> Result<String, ConfigError> {
    let suite: Suite = suite.parse().map_err(|m| ConfigError::new("suite", m))?;
    let cfg = RunConfig::parse(config)?;
    let report = run_suite(Some(&cfg), suite, &Options { long: false, cap: DEFAULT_CAP })?;
    Ok(report.render(Format::Text))
}

fn js(r: Result<String, ConfigError>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn hodge_matrix(config: &str) -> Result<String, JsError> {
    js(hodge_matrix_text(config))
}

#[wasm_bindgen]
pub fn classify(config: &str) -> Result<String, JsError> {
    js(classify_text(config))
}

#[wasm_bindgen]
pub fn report(config: &str, suite: &str) -> Result<String, JsError> {
    js(report_text(config, suite))
}
