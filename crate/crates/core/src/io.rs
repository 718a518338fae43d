//! Problem files, trajectory files and CSV/JSON output.
//!
//! A problem file is JSON:
//!
//! ```json
//! {"interval": [0, 1],
//!  "terms": [{"alpha": 0.5, "f": "v^2"}, {"alpha": 0.5, "f": "t^(1/2)*v"}],
//!  "H": "z1*z2",
//!  "boundary": {"left": 0, "right": 1},
//!  "sense": "minimize"}
//! ```
//!
//! `boundary` keys that are absent leave that endpoint free. Optional
//! `solver` (`basis`, `max_evals`, `tol`, `restarts`, `seed`, `polish`) and
//! `quadrature` (`nodes`, `panels`, `graded_levels`) objects override defaults.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::expr::parse_expression;
use crate::fraccore::QuadratureConfig;
use crate::functional::{outer_variables, Boundary, CompositionProblem, LagrangianTerm, Sense, TERM_VARIABLES};
use crate::solver::{RitzConfig, SolveResult, SolveStatus};
use crate::trajectory::FracPowerSeries;
use crate::variational::{DerivativeScheme, ResidualReport};

const PROBLEM_KEYS: [&str; 7] = ["interval", "terms", "H", "boundary", "sense", "solver", "quadrature"];

/// A problem together with the solver and quadrature settings from its file.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSetup {
    pub problem: CompositionProblem,
    pub ritz: RitzConfig,
    pub quadrature: QuadratureConfig,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolverOverrides {
    basis: Option<Vec<f64>>,
    max_evals: Option<usize>,
    tol: Option<f64>,
    restarts: Option<usize>,
    seed: Option<u64>,
    polish: Option<bool>,
}

fn field_error(field: impl Into<String>, message: impl std::fmt::Display) -> Error {
    Error::ProblemFile { field: field.into(), message: message.to_string() }
}

fn number(value: &Value, field: &str) -> Result<f64> {
    value
        .as_f64()
        .filter(|v| v.is_finite())
        .ok_or_else(|| field_error(field, format!("expected a number, got {value}")))
}

/// Parses problem-file text. Every malformed field is reported by name.
pub fn parse_problem(text: &str) -> Result<ProblemSetup> {
    let root: Value = serde_json::from_str(text)
        .map_err(|e| field_error("<json>", format!("line {}, column {}: {e}", e.line(), e.column())))?;
    let Value::Object(root) = root else {
        return Err(field_error("<root>", "expected a JSON object"));
    };
    if let Some(key) = root.keys().find(|k| !PROBLEM_KEYS.contains(&k.as_str())) {
        return Err(field_error(key.as_str(), "unknown key"));
    }
    let required = |key: &str| root.get(key).ok_or_else(|| field_error(key, "missing"));

    let interval = match required("interval")? {
        Value::Array(items) if items.len() == 2 => {
            let a = number(&items[0], "interval[0]")?;
            let b = number(&items[1], "interval[1]")?;
            if !(a < b) {
                return Err(field_error("interval", format!("need a < b, got [{a}, {b}]")));
            }
            (a, b)
        }
        other => return Err(field_error("interval", format!("expected [a, b], got {other}"))),
    };

    let Value::Array(raw_terms) = required("terms")? else {
        return Err(field_error("terms", "expected a list of {alpha, f} objects"));
    };
    if raw_terms.is_empty() {
        return Err(field_error("terms", "at least one term is required"));
    }
    let terms = raw_terms
        .iter()
        .enumerate()
        .map(|(i, raw)| parse_term(i, raw))
        .collect::<Result<Vec<_>>>()?;

    let Value::String(outer_src) = required("H")? else {
        return Err(field_error("H", "expected an expression string in z1..zn"));
    };
    let outer = parse_outer(outer_src, terms.len())?;

    let boundary = match root.get("boundary") {
        None | Some(Value::Null) => Boundary::free(),
        Some(Value::Object(map)) => parse_boundary(map)?,
        Some(other) => return Err(field_error("boundary", format!("expected an object, got {other}"))),
    };
    let sense = match root.get("sense") {
        None => Sense::default(),
        Some(value) => Sense::deserialize(value)
            .map_err(|_| field_error("sense", format!("expected \"minimize\" or \"maximize\", got {value}")))?,
    };

    let problem = CompositionProblem::new(interval, terms, outer, boundary, sense).map_err(|e| field_error("problem", e))?;

    let quadrature = match root.get("quadrature") {
        None => QuadratureConfig::default(),
        Some(value) => {
            let q = QuadratureConfig::deserialize(value).map_err(|e| field_error("quadrature", e))?;
            q.validate().map_err(|e| field_error("quadrature", e))?;
            q
        }
    };

    let mut ritz = RitzConfig::for_problem(&problem);
    if let Some(value) = root.get("solver") {
        let o = SolverOverrides::deserialize(value).map_err(|e| field_error("solver", e))?;
        if let Some(basis) = o.basis {
            ritz.basis = basis;
        }
        ritz.max_evals = o.max_evals.unwrap_or(ritz.max_evals);
        ritz.tol = o.tol.unwrap_or(ritz.tol);
        ritz.restarts = o.restarts.unwrap_or(ritz.restarts);
        ritz.seed = o.seed.unwrap_or(ritz.seed);
        ritz.polish = o.polish.unwrap_or(ritz.polish);
        ritz.validate().map_err(|e| field_error("solver", e))?;
    }

    Ok(ProblemSetup { problem, ritz, quadrature })
}

fn parse_term(index: usize, raw: &Value) -> Result<LagrangianTerm> {
    let prefix = format!("terms[{index}]");
    let Value::Object(map) = raw else {
        return Err(field_error(prefix, "expected {\"alpha\": ..., \"f\": ...}"));
    };
    if let Some(key) = map.keys().find(|k| *k != "alpha" && *k != "f") {
        return Err(field_error(format!("{prefix}.{key}"), "unknown key"));
    }
    let alpha_field = format!("{prefix}.alpha");
    let alpha = number(map.get("alpha").ok_or_else(|| field_error(&alpha_field, "missing"))?, &alpha_field)?;
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(field_error(alpha_field, format!("order must lie in (0, 1], got {alpha}")));
    }
    let f_field = format!("{prefix}.f");
    let Some(Value::String(src)) = map.get("f") else {
        return Err(field_error(f_field, "expected an expression string in t, y, v"));
    };
    let f = parse_expression(src, &TERM_VARIABLES).map_err(|e| field_error(&f_field, e))?;
    LagrangianTerm::from_expr(alpha, f).map_err(|e| field_error(f_field, e))
}

fn parse_outer(src: &str, n: usize) -> Result<crate::expr::Expr> {
    // parse against generous names first so "z3 with two terms" reads as an arity error
    let wide = outer_variables(n.max(64));
    let outer = parse_expression(src, &wide).map_err(|e| field_error("H", e))?;
    for name in outer.variables() {
        let index: usize = name[1..].parse().unwrap_or(usize::MAX);
        if index > n {
            return Err(field_error("H", Error::ArityMismatch { terms: n, used: index }));
        }
    }
    Ok(outer)
}

fn parse_boundary(map: &Map<String, Value>) -> Result<Boundary> {
    if let Some(key) = map.keys().find(|k| *k != "left" && *k != "right") {
        return Err(field_error(format!("boundary.{key}"), "unknown key"));
    }
    let side = |key: &str| -> Result<Option<f64>> {
        match map.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(value) => number(value, &format!("boundary.{key}")).map(Some),
        }
    };
    Ok(Boundary { left: side("left")?, right: side("right")? })
}

pub fn load_setup(path: impl AsRef<Path>) -> Result<ProblemSetup> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_problem(&text)
}

pub fn load_problem(path: impl AsRef<Path>) -> Result<CompositionProblem> {
    load_setup(path).map(|s| s.problem)
}

/// Reads a trajectory: CSV (`base,coefficient,exponent` rows) when the file
/// ends in `.csv`, otherwise JSON `{"base": a, "terms": [[c, e], ...]}`.
pub fn load_trajectory(path: impl AsRef<Path>) -> Result<FracPowerSeries> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        parse_trajectory_csv(&text)
    } else {
        serde_json::from_str(&text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct TrajectoryRow {
    base: f64,
    coefficient: f64,
    exponent: f64,
}

pub fn parse_trajectory_csv(text: &str) -> Result<FracPowerSeries> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut base = None;
    let mut terms = Vec::new();
    for (line, row) in reader.deserialize::<TrajectoryRow>().enumerate() {
        let row = row.map_err(|e| Error::Io(format!("trajectory csv row {}: {e}", line + 1)))?;
        match base {
            None => base = Some(row.base),
            Some(b) if b != row.base => {
                return Err(Error::invalid(format!("trajectory csv mixes base points {b} and {}", row.base)))
            }
            _ => {}
        }
        terms.push((row.coefficient, row.exponent));
    }
    let base = base.ok_or_else(|| Error::invalid("trajectory csv has no rows"))?;
    FracPowerSeries::new(base, terms)
}

/// Full-precision CSV so that re-reading reproduces the series exactly.
pub fn write_trajectory_csv<W: Write>(x: &FracPowerSeries, out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    let rows = x.terms().iter().map(|t| TrajectoryRow { base: x.base(), coefficient: t.coefficient, exponent: t.exponent });
    let mut empty = true;
    for row in rows {
        writer.serialize(row).map_err(csv_error)?;
        empty = false;
    }
    if empty {
        // the zero series still needs its base point
        writer.serialize(TrajectoryRow { base: x.base(), coefficient: 0.0, exponent: 0.0 }).map_err(csv_error)?;
    }
    writer.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// `v` with 9 significant digits.
pub fn sig9(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let exponent = v.abs().log10().floor() as i32;
    if (-4..9).contains(&exponent) {
        format!("{:.*}", (8 - exponent) as usize, v)
    } else {
        format!("{v:.8e}")
    }
}

/// Columns `t, R, defect_term_1, ..., defect_term_n`.
pub fn write_residual_csv<W: Write>(report: &ResidualReport, out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string(), "R".to_string()];
    header.extend((1..=report.term_defects.len()).map(|i| format!("defect_term_{i}")));
    writer.write_record(&header).map_err(csv_error)?;
    for (j, t) in report.grid.iter().enumerate() {
        let mut record = vec![sig9(*t), sig9(report.residual[j])];
        record.extend(report.term_defects.iter().map(|d| sig9(d[j])));
        writer.write_record(&record).map_err(csv_error)?;
    }
    writer.flush()?;
    Ok(())
}

/// Columns `t, x, frac_derivative_1, ..., frac_derivative_n` (order of
/// term `i`) on `points` uniform samples of `[a, b]`.
pub fn write_eval_csv<W: Write>(p: &CompositionProblem, x: &FracPowerSeries, points: usize, out: W) -> Result<()> {
    if points < 2 {
        return Err(Error::invalid("eval grid needs at least 2 points"));
    }
    let (a, b) = p.interval();
    let derivatives = p
        .orders()
        .into_iter()
        .map(|alpha| x.frac_derivative(alpha))
        .collect::<Result<Vec<_>>>()?;
    let mut writer = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string(), "x".to_string()];
    header.extend((1..=derivatives.len()).map(|i| format!("frac_derivative_{i}")));
    writer.write_record(&header).map_err(csv_error)?;
    let h = (b - a) / (points - 1) as f64;
    for j in 0..points {
        let t = if j == points - 1 { b } else { a + h * j as f64 };
        let mut record = vec![sig9(t), sig9(x.eval(t)?)];
        for d in &derivatives {
            record.push(sig9(d.eval(t)?));
        }
        writer.write_record(&record).map_err(csv_error)?;
    }
    writer.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualSummary {
    pub sup_norm: f64,
    pub l1_norm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub natural_left: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub natural_right: Option<f64>,
    pub eps: f64,
    pub grid_size: usize,
    pub schemes: Vec<DerivativeScheme>,
}

impl From<&ResidualReport> for ResidualSummary {
    fn from(r: &ResidualReport) -> Self {
        Self {
            sup_norm: r.sup_norm,
            l1_norm: r.l1_norm,
            natural_left: r.natural_left,
            natural_right: r.natural_right,
            eps: r.eps,
            grid_size: r.grid_size,
            schemes: r.schemes.clone(),
        }
    }
}

/// What `solve` writes: the candidate and how it was obtained.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultFile {
    pub label: &'static str,
    pub status: SolveStatus,
    pub trajectory: FracPowerSeries,
    pub objective: f64,
    pub functionals: Vec<f64>,
    pub residual: ResidualSummary,
    pub basis: Vec<f64>,
    pub seed: u64,
    pub evaluations: usize,
    pub polished: bool,
}

impl ResultFile {
    pub fn new(result: &SolveResult, cfg: &RitzConfig) -> Self {
        Self {
            label: result.label,
            status: result.status,
            trajectory: result.trajectory.clone(),
            objective: result.objective,
            functionals: result.functionals.clone(),
            residual: ResidualSummary::from(&result.residual),
            basis: cfg.basis.clone(),
            seed: cfg.seed,
            evaluations: result.evaluations,
            polished: result.polished,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PRODUCT_PROBLEM: &str = r#"{"interval":[0,1],"terms":[{"alpha":0.5,"f":"v^2"},{"alpha":0.5,"f":"t^(1/2)*v"}],"H":"z1*z2","boundary":{"left":0,"right":1},"sense":"minimize"}"#;

    fn field_of(err: Error) -> String {
        match err {
            Error::ProblemFile { field, .. } => field,
            other => panic!("expected a problem-file error, got {other:?}"),
        }
    }

    #[test]
    fn reference_file_loads() {
        let setup = parse_problem(PRODUCT_PROBLEM).unwrap();
        let p = &setup.problem;
        assert_eq!(p.interval(), (0.0, 1.0));
        assert_eq!(p.terms().len(), 2);
        assert_eq!(p.boundary(), Boundary::fixed(0.0, 1.0));
        assert_eq!(p.sense(), Sense::Minimize);
        assert_eq!(setup.ritz.basis, vec![0.5, 1.0]);
        assert_eq!(setup.quadrature, QuadratureConfig::default());
    }

    #[test]
    fn arity_mismatch_is_named() {
        let text = PRODUCT_PROBLEM.replace("z1*z2", "z1*z2*z3");
        let err = parse_problem(&text).unwrap_err();
        assert!(matches!(&err, Error::ProblemFile { field, message } if field == "H" && message.contains("z3")), "{err:?}");
    }

    #[test]
    fn missing_right_means_free() {
        let text = PRODUCT_PROBLEM.replace(r#","right":1"#, "");
        let p = parse_problem(&text).unwrap().problem;
        assert_eq!(p.boundary(), Boundary { left: Some(0.0), right: None });
        let p = parse_problem(&PRODUCT_PROBLEM.replace(r#","boundary":{"left":0,"right":1}"#, "")).unwrap().problem;
        assert_eq!(p.boundary(), Boundary::free());
    }

    #[test]
    fn malformed_fields_are_named() {
        let cases = [
            ("not json", "<json>"),
            ("[1, 2]", "<root>"),
            (r#"{"terms":[],"H":"z1"}"#, "interval"),
            (r#"{"interval":[1,0],"terms":[{"alpha":0.5,"f":"v"}],"H":"z1"}"#, "interval"),
            (r#"{"interval":[0,"x"],"terms":[{"alpha":0.5,"f":"v"}],"H":"z1"}"#, "interval[1]"),
            (r#"{"interval":[0,1],"terms":[{"alpha":1.5,"f":"v"}],"H":"z1"}"#, "terms[0].alpha"),
            (r#"{"interval":[0,1],"terms":[{"alpha":0.5,"f":"v+"}],"H":"z1"}"#, "terms[0].f"),
            (r#"{"interval":[0,1],"terms":[{"alpha":0.5,"f":"w"}],"H":"z1"}"#, "terms[0].f"),
            (r#"{"interval":[0,1],"terms":[{"alpha":0.5}],"H":"z1"}"#, "terms[0].f"),
            (r#"{"interval":[0,1],"terms":[{"alpha":0.5,"f":"v","g":1}],"H":"z1"}"#, "terms[0].g"),
            (r#"{"interval":[0,1],"terms":[{"alpha":0.5,"f":"v"}]}"#, "H"),
            (r#"{"interval":[0,1],"terms":[{"alpha":0.5,"f":"v"}],"H":"z1","sense":"up"}"#, "sense"),
            (r#"{"interval":[0,1],"terms":[{"alpha":0.5,"f":"v"}],"H":"z1","boundary":{"left":"a"}}"#, "boundary.left"),
            (r#"{"interval":[0,1],"terms":[{"alpha":0.5,"f":"v"}],"H":"z1","boundary":{"middle":1}}"#, "boundary.middle"),
            (r#"{"interval":[0,1],"terms":[{"alpha":0.5,"f":"v"}],"H":"z1","solver":{"basis":[]}}"#, "solver"),
            (r#"{"interval":[0,1],"terms":[{"alpha":0.5,"f":"v"}],"H":"z1","solver":{"iters":3}}"#, "solver"),
            (r#"{"interval":[0,1],"terms":[{"alpha":0.5,"f":"v"}],"H":"z1","quadrature":{"nodes":0}}"#, "quadrature"),
            (r#"{"interval":[0,1],"terms":[{"alpha":0.5,"f":"v"}],"H":"z1","extra":true}"#, "extra"),
        ];
        for (text, field) in cases {
            assert_eq!(field_of(parse_problem(text).unwrap_err()), field, "{text}");
        }
    }

    #[test]
    fn overrides_apply() {
        let text = PRODUCT_PROBLEM.replace(
            r#""sense":"minimize""#,
            r#""sense":"maximize","solver":{"basis":[0.5,1,1.5],"seed":9},"quadrature":{"nodes":16,"panels":4,"graded_levels":0}"#,
        );
        let setup = parse_problem(&text).unwrap();
        assert_eq!(setup.problem.sense(), Sense::Maximize);
        assert_eq!(setup.ritz.basis, vec![0.5, 1.0, 1.5]);
        assert_eq!(setup.ritz.seed, 9);
        assert_eq!(setup.quadrature, QuadratureConfig::uniform(16, 4));
    }

    #[test]
    fn trajectory_csv_round_trip() {
        let x = FracPowerSeries::new(0.0, [(1.534_624_313_757_15, 0.5), (-0.534_624_313_757_15, 1.0)]).unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&x, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("base,coefficient,exponent\n"));
        assert_eq!(parse_trajectory_csv(&text).unwrap(), x);

        let mut buf = Vec::new();
        write_trajectory_csv(&FracPowerSeries::zero(2.0), &mut buf).unwrap();
        assert_eq!(parse_trajectory_csv(std::str::from_utf8(&buf).unwrap()).unwrap(), FracPowerSeries::zero(2.0));
    }

    #[test]
    fn trajectory_json_round_trip() {
        let x = FracPowerSeries::new(1.0, [(2.0, 0.0), (-0.25, 1.5)]).unwrap();
        let text = serde_json::to_string(&x).unwrap();
        assert_eq!(text, r#"{"base":1.0,"terms":[[2.0,0.0],[-0.25,1.5]]}"#);
        assert_eq!(serde_json::from_str::<FracPowerSeries>(&text).unwrap(), x);
        assert!(serde_json::from_str::<FracPowerSeries>(r#"{"base":0,"terms":[[1,"a"]]}"#).is_err());
    }

    #[test]
    fn nine_significant_digits() {
        assert_eq!(sig9(0.535_140_269_629_04), "0.535140270");
        assert_eq!(sig9(1.789_379_645_080_52), "1.78937965");
        assert_eq!(sig9(-1234.5), "-1234.50000");
        assert_eq!(sig9(1.5e-12), "1.50000000e-12");
        assert_eq!(sig9(0.0), "0");
    }

    #[test]
    fn residual_csv_columns() {
        let p = parse_problem(PRODUCT_PROBLEM).unwrap().problem;
        let x = FracPowerSeries::new(0.0, [(1.0, 0.5)]).unwrap();
        let opts = crate::variational::ResidualOptions { grid_size: 5, ..Default::default() };
        let report = crate::variational::el_residual(&p, &x, &opts).unwrap();
        let mut buf = Vec::new();
        write_residual_csv(&report, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,R,defect_term_1,defect_term_2");
        assert_eq!(lines.len(), 6);
    }
}
