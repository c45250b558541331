use std::fmt::Write as _;

use serde_json::{json, Value};
use zn_riemann::constructions::{cartesian_product, warped_product, Product};
use zn_riemann::geometry::*;
use zn_riemann::gradedlinalg::GradedMatrix;
use zn_riemann::symkernel::{GradedSeries, ZeroStatus, ZeroTest};
use zn_riemann::{Error, Result};

use crate::spec::{ManifoldSpec, Model};

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Validate,
    Inverse,
    Christoffel,
    Riemann,
    Ricci,
    Scalar,
    Laplacian(String),
    Gradient(String),
    Divergence(String),
    Lie(String),
    Killing(String),
    Bianchi,
    Compat,
    Einstein(String),
    Product(ManifoldSpec),
    Warp(String, ManifoldSpec),
    Report,
}

#[derive(Clone, Debug, Default)]
pub struct Options {
    pub trunc: Option<u32>,
    pub test: ZeroTest,
}

/// Result of one command: `passed` is false when a requested check failed.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub passed: bool,
    pub json: Value,
    pub text: String,
}

impl Outcome {
    fn value(json: Value, text: String) -> Self {
        Outcome {
            passed: true,
            json,
            text,
        }
    }

    fn reports(command: &str, reports: Vec<Report>) -> Self {
        let passed = reports.iter().all(Report::passed);
        let mut text = String::new();
        for r in &reports {
            text.push_str(&report_text(r));
        }
        let status = if passed { "pass" } else { "fail" };
        let json = json!({
            "command": command,
            "passed": passed,
            "reports": reports.iter().map(Report::to_json).collect::<Vec<_>>(),
        });
        let _ = writeln!(text, "{command}: {status}");
        Outcome { passed, json, text }
    }
}

pub fn report_text(r: &Report) -> String {
    let mut out = format!(
        "{:<24} {:<4} {} components, {}\n",
        r.check,
        if r.passed() { "ok" } else { "FAIL" },
        r.checked,
        r.status.as_str()
    );
    for f in &r.findings {
        let _ = writeln!(
            out,
            "  {}[{}] {}: {}",
            f.check,
            f.indices.join(","),
            f.status.as_str(),
            f.residue
        );
    }
    out
}

fn matrix_text(label: &str, m: &GradedMatrix) -> String {
    let chart = m.chart();
    let mut out = String::new();
    for i in 0..m.dim() {
        for j in 0..m.dim() {
            let e = m.get(i, j);
            if !e.has_no_terms() {
                let _ = writeln!(
                    out,
                    "{label}[{},{}] = {}",
                    chart.coord_name(i),
                    chart.coord_name(j),
                    e.display()
                );
            }
        }
    }
    if out.is_empty() {
        out.push_str("all components are zero\n");
    }
    out
}

fn map_text(label: &str, map: &Value) -> String {
    let mut out = String::new();
    if let Some(obj) = map.as_object() {
        for (k, v) in obj {
            let _ = writeln!(out, "{label}[{k}] = {}", v.as_str().unwrap_or_default());
        }
    }
    if out.is_empty() {
        out.push_str("all components are zero\n");
    }
    out
}

fn scalar(value: &GradedSeries, test: &ZeroTest) -> (Value, String, ZeroStatus) {
    let status = value.zero_status(test);
    let json = json!({ "value": value.display(), "status": status });
    (
        json,
        format!("{} ({})\n", value.display(), status.as_str()),
        status,
    )
}

fn function(model: &Model, arg: &str) -> Result<GradedSeries> {
    match model.functions.get(arg) {
        Some(f) => Ok(f.clone()),
        None => GradedSeries::parse(&model.chart, arg),
    }
}

fn field(model: &Model, arg: &str) -> Result<VectorField> {
    if let Some(x) = model.fields.get(arg) {
        return Ok(x.clone());
    }
    if let Some(name) = arg.strip_prefix("d/d") {
        let i = model
            .chart
            .index_of(name)
            .ok_or_else(|| Error::UnknownCoordinate(name.into()))?;
        return Ok(VectorField::basis(&model.chart, i));
    }
    Err(Error::Spec(format!(
        "`{arg}` is neither a declared vector field nor d/d<coordinate>"
    )))
}

fn product_outcome(p: Product) -> Outcome {
    let spec = ManifoldSpec::from_metric(&p.metric);
    let text = spec.to_text();
    let json = json!({ "spec": text, "metric": p.metric.to_json(), "warnings": p.warnings });
    let mut out = String::new();
    for w in &p.warnings {
        let _ = writeln!(out, "# warning: {w}");
    }
    out.push_str(&text);
    Outcome::value(json, out)
}

pub fn run_command(spec: &ManifoldSpec, command: &Command, options: &Options) -> Result<Outcome> {
    let model = spec.build(options.trunc)?;
    let test = &options.test;
    let m = &model.metric;
    Ok(match command {
        Command::Validate => Outcome::reports("validate", vec![m.validate(test)]),
        Command::Inverse => {
            let inv = m.inverse()?;
            let sym = m.inverse_symmetry(test)?;
            let mut out = Outcome::reports("inverse", vec![sym]);
            out.json["inverse"] = inv.to_json();
            out.text = matrix_text("g^", inv) + &out.text;
            out
        }
        Command::Christoffel => {
            let json = christoffel(m)?.to_json();
            let text = map_text("Gamma", &json);
            Outcome::value(json!({ "christoffel": json }), text)
        }
        Command::Riemann => {
            let json = riemann(&christoffel(m)?)?.to_json();
            let text = map_text("R", &json);
            Outcome::value(json!({ "riemann": json }), text)
        }
        Command::Ricci => {
            let ric = ricci(&riemann(&christoffel(m)?)?)?;
            let mut out = Outcome::reports("ricci", vec![ricci_symmetry(&ric, test)?]);
            out.json["ricci"] = ric.to_json();
            out.text = matrix_text("Ric", &ric) + &out.text;
            out
        }
        Command::Scalar => {
            let s = ricci_scalar(m, &ricci(&riemann(&christoffel(m)?)?)?)?;
            let (json, text, status) = scalar(&s, test);
            // An odd metric has vanishing scalar curvature.
            let passed = !m.is_odd() || status.is_zero();
            Outcome {
                passed,
                json: json!({ "scalar": json }),
                text,
            }
        }
        Command::Laplacian(arg) => {
            let f = function(&model, arg)?;
            let value = laplacian(m, &christoffel(m)?, &f)?;
            let (json, text, status) = scalar(&value, test);
            let passed = !m.is_odd() || status.is_zero();
            Outcome {
                passed,
                json: json!({ "laplacian": json }),
                text,
            }
        }
        Command::Gradient(arg) => {
            let v = gradient(m, &function(&model, arg)?)?;
            Outcome::value(json!({ "gradient": v.to_json() }), v.display() + "\n")
        }
        Command::Divergence(arg) => {
            let value = divergence(&christoffel(m)?, &field(&model, arg)?)?;
            let (json, text, _) = scalar(&value, test);
            Outcome::value(json!({ "divergence": json }), text)
        }
        Command::Lie(arg) => {
            let l = lie_derivative_metric(m, &field(&model, arg)?)?;
            Outcome::value(json!({ "lie": l.to_json() }), matrix_text("L_X g", &l))
        }
        Command::Killing(arg) => Outcome::reports(
            "killing",
            vec![killing_check(m, &field(&model, arg)?, test)?],
        ),
        Command::Bianchi => {
            let c = christoffel(m)?;
            let r = riemann(&c)?;
            Outcome::reports(
                "bianchi",
                vec![
                    antisymmetry(&r, test)?,
                    bianchi_first(&r, test)?,
                    bianchi_second(&c, &r, test)?,
                    pairing_antisymmetry(m, &r, test)?,
                ],
            )
        }
        Command::Compat => {
            let c = christoffel(m)?;
            Outcome::reports(
                "compat",
                vec![
                    torsion_report(&c, test)?,
                    metric_compatibility(m, &c, test)?,
                    koszul_check(m, &c, test)?,
                ],
            )
        }
        Command::Einstein(arg) => {
            let kappa = function(&model, arg)?;
            let ric = ricci(&riemann(&christoffel(m)?)?)?;
            Outcome::reports("einstein", vec![einstein_check(m, &ric, &kappa, test)?])
        }
        Command::Product(other) => {
            let second = other.build(options.trunc)?;
            product_outcome(cartesian_product(m, &second.metric)?)
        }
        Command::Warp(mu, other) => {
            let second = other.build(options.trunc)?;
            let mu = function(&model, mu)?;
            product_outcome(warped_product(m, &second.metric, &mu, test)?)
        }
        Command::Report => Outcome::reports("report", full_suite(&model, test)?),
    })
}

/// Every identity the engine checks for one metric.
pub fn full_suite(model: &Model, test: &ZeroTest) -> Result<Vec<Report>> {
    let m = &model.metric;
    let chart = &model.chart;
    let validation = m.validate(test);
    if !validation.passed() {
        return Ok(vec![validation]);
    }
    let c = christoffel(m)?;
    let r = riemann(&c)?;
    let ric = ricci(&r)?;
    let mut out = vec![
        validation,
        m.inverse_symmetry(test)?,
        torsion_report(&c, test)?,
        metric_compatibility(m, &c, test)?,
        koszul_check(m, &c, test)?,
        riemann_definition_check(&c, &r, test)?,
        antisymmetry(&r, test)?,
        bianchi_first(&r, test)?,
        bianchi_second(&c, &r, test)?,
        pairing_antisymmetry(m, &r, test)?,
        ricci_symmetry(&ric, test)?,
        contracted_christoffel_check(m, &c, test)?,
    ];
    let mut cross = Report::new("ricci-cross-check");
    let other = ricci_by_definition(&c)?;
    for i in 0..chart.dim() {
        for j in 0..chart.dim() {
            let names = vec![
                chart.coord_name(i).to_string(),
                chart.coord_name(j).to_string(),
            ];
            cross.record(names, &ric.get(i, j).sub(other.get(i, j))?, test);
        }
    }
    out.push(cross);
    let s = ricci_scalar(m, &ric)?;
    let monomials = coordinate_monomials(chart, chart.trunc());
    if m.is_odd() {
        let mut trace = Report::new("trace-of-metric");
        trace.record(vec![], &m.trace(m.components())?, test);
        out.push(trace);
        let mut scalar = Report::new("odd-scalar-vanishes");
        scalar.record(vec![], &s, test);
        out.push(scalar);
        let mut lap = Report::new("odd-laplacian-vanishes");
        for f in &monomials {
            lap.record(vec![f.display()], &laplacian(m, &c, f)?, test);
        }
        out.push(lap);
    } else {
        let mut leibniz = Report::new("leibniz-anomaly");
        let small: Vec<&GradedSeries> = monomials
            .iter()
            .filter(|f| f.terms().len() == 1)
            .take(6)
            .collect();
        for (a, f) in small.iter().enumerate() {
            for f2 in &small[a..] {
                leibniz.record(
                    vec![f.display(), f2.display()],
                    &leibniz_anomaly(m, &c, f, f2)?,
                    test,
                );
            }
        }
        out.push(leibniz);
    }
    if !m.degree().is_zero() && !s.zero_status(test).is_zero() {
        let mut constancy = Report::new("scalar-not-constant");
        let moves = (0..chart.dim()).any(|i| !s.derive(i).zero_status(test).is_zero());
        constancy.require(
            "scalar-not-constant",
            vec![],
            moves,
            format!("constant scalar {}", s.display()),
        );
        out.push(constancy);
    }
    Ok(out)
}

/// JSON diagnostic for an error.
pub fn error_json(e: &Error) -> Value {
    match e {
        Error::Syntax {
            line,
            column,
            message,
        } => {
            json!({ "error": { "kind": "syntax", "line": line, "column": column, "message": message } })
        }
        other => json!({ "error": { "kind": error_kind(other), "message": other.to_string() } }),
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Dimension(_) => "dimension",
        Error::ChartMismatch(_) => "chart-mismatch",
        Error::UnknownCoordinate(_) => "unknown-identifier",
        Error::NotInvertible(_) => "not-invertible",
        Error::Degenerate(_) => "degenerate",
        Error::Degree(_) => "degree",
        Error::Evaluation(_) => "evaluation",
        Error::Unsupported(_) => "unsupported",
        Error::Syntax { .. } => "syntax",
        Error::Spec(_) => "spec",
        Error::Variance(_) => "variance",
    }
}
