//! Acceptance suite: one line per criterion, nonzero exit on any failure.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use zn_riemann::constructions::{cartesian_product, warped_product};
use zn_riemann::geometry::*;
use zn_riemann::symkernel::{GradedSeries, ZeroStatus, ZeroTest};

type Outcome = Result<String, String>;

struct Metric {
    name: String,
    metric: MetricTensor,
    /// Numeric zero testing is admissible.
    has_exp: bool,
}

const CORPUS: [&str; 11] = [
    "flat",
    "disk",
    "odd",
    "warped",
    "ppwave",
    "euclid",
    "sphere",
    "poincare",
    "odd_super",
    "odd_z2",
    "odd_base",
];
const RANDOM_PER_CLASS: u64 = 10;

fn corpus_metrics() -> Vec<Metric> {
    CORPUS
        .iter()
        .map(|n| Metric {
            name: n.to_string(),
            metric: corpus(n).metric,
            has_exp: corpus_text(n).contains("exp"),
        })
        .collect()
}

fn random_metrics() -> Vec<Metric> {
    let classes = degree_classes();
    let mut out = Vec::new();
    for (c, (label, ..)) in classes.iter().enumerate() {
        for s in 0..RANDOM_PER_CLASS {
            out.push(Metric {
                name: format!("random{label}#{s}"),
                metric: random_metric(c, 1000 * c as u64 + s),
                has_exp: false,
            });
        }
    }
    out
}

fn test() -> ZeroTest {
    ZeroTest::default()
}

/// Fails on a residue that is nonzero, or numerically zero on a metric
/// without exponentials.
fn admit(m: &Metric, r: &Report) -> std::result::Result<(), String> {
    match r.status {
        ZeroStatus::SymbolicZero => Ok(()),
        ZeroStatus::NumericZero if m.has_exp => Ok(()),
        s => Err(format!(
            "{}: {} is {} ({:?})",
            m.name,
            r.check,
            s.as_str(),
            r.findings.first()
        )),
    }
}

fn err<E: std::fmt::Display>(name: &str) -> impl Fn(E) -> String + '_ {
    move |e| format!("{name}: {e}")
}

fn fundamental(all: &[Metric]) -> Outcome {
    let mut numeric = 0;
    for m in all {
        let c = christoffel(&m.metric).map_err(err(&m.name))?;
        for r in [
            torsion_report(&c, &test()).map_err(err(&m.name))?,
            metric_compatibility(&m.metric, &c, &test()).map_err(err(&m.name))?,
        ] {
            admit(m, &r)?;
            numeric += usize::from(r.status == ZeroStatus::NumericZero);
        }
    }
    Ok(format!(
        "{} metrics, {numeric} reports needed the numeric fallback",
        all.len()
    ))
}

fn curvature(all: &[Metric]) -> Outcome {
    for m in all {
        let c = christoffel(&m.metric).map_err(err(&m.name))?;
        let r = riemann(&c).map_err(err(&m.name))?;
        let t = test();
        let checks: [&dyn Fn() -> zn_riemann::Result<Report>; 4] = [
            &|| antisymmetry(&r, &t),
            &|| bianchi_first(&r, &t),
            &|| bianchi_second(&c, &r, &t),
            &|| pairing_antisymmetry(&m.metric, &r, &t),
        ];
        for check in checks {
            admit(m, &check().map_err(err(&m.name))?)?;
        }
    }
    Ok(format!("{} metrics", all.len()))
}

fn odd_theorems(all: &[Metric]) -> Outcome {
    let mut count = (0, 0);
    for m in all.iter().filter(|m| m.metric.is_odd()) {
        let chart = m.metric.chart();
        let c = christoffel(&m.metric).map_err(err(&m.name))?;
        let ric = ricci(&riemann(&c).map_err(err(&m.name))?).map_err(err(&m.name))?;
        let s = ricci_scalar(&m.metric, &ric).map_err(err(&m.name))?;
        if s.zero_status(&test()) != ZeroStatus::SymbolicZero {
            return Err(format!(
                "{}: scalar curvature {} is not symbolically zero",
                m.name,
                s.display()
            ));
        }
        for f in coordinate_monomials(chart, chart.trunc()) {
            let d = laplacian(&m.metric, &c, &f).map_err(err(&m.name))?;
            if d.zero_status(&test()) != ZeroStatus::SymbolicZero {
                return Err(format!(
                    "{}: Laplacian of {} is {}",
                    m.name,
                    f.display(),
                    d.display()
                ));
            }
            count.1 += 1;
        }
        count.0 += 1;
    }
    if count.0 == 0 {
        return Err("no odd metric".into());
    }
    Ok(format!("{} odd metrics, {} Laplacians", count.0, count.1))
}

fn leibniz(all: &[Metric]) -> Outcome {
    let mut pairs = 0;
    for (k, m) in all.iter().filter(|m| !m.metric.is_odd()).enumerate() {
        let chart = m.metric.chart();
        let c = christoffel(&m.metric).map_err(err(&m.name))?;
        let mut rng = ChaCha8Rng::seed_from_u64(77 + k as u64);
        for _ in 0..20 {
            let f = random_homogeneous(chart, &mut rng);
            let f2 = random_homogeneous(chart, &mut rng);
            let a = leibniz_anomaly(&m.metric, &c, &f, &f2).map_err(err(&m.name))?;
            let mut r = Report::new("leibniz-anomaly");
            r.record(vec![f.display(), f2.display()], &a, &test());
            admit(m, &r)?;
            pairs += 1;
        }
    }
    Ok(format!("{pairs} pairs"))
}

fn gate(all: &[Metric]) -> Outcome {
    let expect = |name: &str, check: &str, other: &str| -> std::result::Result<(), String> {
        let r = corpus(name).metric.validate(&test());
        if r.passed() || !r.findings.iter().any(|f| f.check == check) {
            return Err(format!("{name} not rejected by {check}: {:?}", r.findings));
        }
        if r.findings.iter().any(|f| f.check == other) {
            return Err(format!("{name} also rejected by {other}: {:?}", r.findings));
        }
        Ok(())
    };
    expect("bad_even", "dimension-evenness", "dimension-pairing")?;
    expect("bad_odd", "dimension-pairing", "dimension-evenness")?;
    let extra = ["odd_fibre"].map(|n| Metric {
        name: n.into(),
        metric: corpus(n).metric,
        has_exp: false,
    });
    for m in all.iter().chain(&extra) {
        let r = m.metric.validate(&test());
        if !r.passed() {
            return Err(format!("{} rejected: {:?}", m.name, r.findings));
        }
    }
    Ok(format!(
        "2 violating charts rejected, {} accepted",
        all.len() + extra.len()
    ))
}

fn inverse_symmetry(all: &[Metric]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut odd, mut even) = (0, 0);
    for m in all {
        admit(
            m,
            &m.metric.inverse_symmetry(&test()).map_err(err(&m.name))?,
        )?;
        let mut r = Report::new("trace");
        if m.metric.is_odd() {
            r.record(
                vec![],
                &m.metric
                    .trace(m.metric.components())
                    .map_err(err(&m.name))?,
                &test(),
            );
            odd += 1;
        } else {
            let chart = m.metric.chart();
            for d in [chart.zero_degree(), m.metric.degree()] {
                let w = random_skew(chart, d, &mut rng);
                r.record(vec![], &m.metric.trace(&w).map_err(err(&m.name))?, &test());
            }
            even += 1;
        }
        admit(m, &r)?;
    }
    Ok(format!(
        "{odd} odd traces of g, {even} even traces of skew tensors"
    ))
}

fn at(f: &GradedSeries, p: &[f64]) -> std::result::Result<f64, String> {
    let v = f.eval_float(p).map_err(|e| e.to_string())?;
    Ok(v.iter().find(|(m, _)| *m == 0).map_or(0.0, |(_, x)| *x))
}

fn classical() -> Outcome {
    let t = test();
    let e = corpus("euclid").metric;
    let c = christoffel(&e).map_err(err("euclid"))?;
    let r = riemann(&c).map_err(err("euclid"))?;
    if !r.is_exactly_zero() {
        return Err("euclid: curvature does not vanish".into());
    }
    let points = t.points(2, 16);

    // Round sphere of radius 2: S = 2 / r^2.
    let radius = 2.0f64;
    let oracle = 2.0 / (radius * radius);
    let sph = corpus("sphere").metric;
    let s = ricci_scalar(
        &sph,
        &ricci(&riemann(&christoffel(&sph).map_err(err("sphere"))?).map_err(err("sphere"))?)
            .map_err(err("sphere"))?,
    )
    .map_err(err("sphere"))?;
    for p in &points {
        let v = at(&s, p)?;
        if (v - oracle).abs() > 1e-9 {
            return Err(format!("sphere: S({p:?}) = {v}, expected {oracle}"));
        }
    }

    // Poincare disk: conformal factor e^{2 sigma} = 4/(1-r^2)^2 gives
    // Gamma^x_xx = sigma_x, Gamma^x_yy = -sigma_x, Gamma^x_xy = sigma_y.
    let pd = corpus("poincare").metric;
    let c = christoffel(&pd).map_err(err("poincare"))?;
    let ric = ricci(&riemann(&c).map_err(err("poincare"))?).map_err(err("poincare"))?;
    let s = ricci_scalar(&pd, &ric).map_err(err("poincare"))?;
    for p in &points {
        let (x, y) = (p[0], p[1]);
        let (sx, sy) = (
            2.0 * x / (1.0 - x * x - y * y),
            2.0 * y / (1.0 - x * x - y * y),
        );
        // Gamma_{JI}^K with nabla_{d_I} d_J = Gamma_{JI}^K d_K.
        for (j, i, k, want) in [
            (0, 0, 0, sx),
            (1, 1, 0, -sx),
            (0, 1, 0, sy),
            (1, 0, 1, sx),
            (1, 1, 1, sy),
        ] {
            let got = at(c.get(j, i, k), p)?;
            if (got - want).abs() > 1e-9 {
                return Err(format!(
                    "poincare: Gamma[{j}{i}{k}]({p:?}) = {got}, expected {want}"
                ));
            }
        }
        let v = at(&s, p)?;
        if (v + 2.0).abs() > 1e-9 {
            return Err(format!("poincare: S({p:?}) = {v}, expected -2"));
        }
    }
    let kappa = GradedSeries::from_int(pd.chart(), -1);
    let ein = einstein_check(&pd, &ric, &kappa, &t).map_err(err("poincare"))?;
    if !ein.passed() {
        return Err(format!("poincare: Einstein residue {:?}", ein.findings));
    }
    Ok(format!(
        "euclid flat, sphere S = {oracle}, poincare S = -2 and Ric = -g at {} points",
        points.len()
    ))
}

fn reduction() -> Outcome {
    let disk = corpus("disk").metric;
    let red = disk.reduced().map_err(err("disk"))?;
    let chart = red.chart();
    let classical = GradedSeries::parse(chart, "4/(1 - x1^2 - x2^2)^2").map_err(err("oracle"))?;
    for i in 0..2 {
        for j in 0..2 {
            let want = if i == j {
                classical.clone()
            } else {
                GradedSeries::zero(chart)
            };
            let diff = red.get(i, j).sub(&want).map_err(err("disk"))?;
            if !diff.is_exactly_zero() {
                return Err(format!(
                    "reduced disk [{i},{j}] differs by {}",
                    diff.display()
                ));
            }
        }
    }
    let mut rejected = 0;
    for name in ["odd", "warped", "odd_super", "odd_z2"] {
        if corpus(name).metric.reduced().is_ok() {
            return Err(format!(
                "{name}: reduced metric of a nonzero-degree metric did not error"
            ));
        }
        rejected += 1;
    }
    Ok(format!(
        "disk reduces to the Poincare metric, {rejected} nonzero-degree metrics rejected"
    ))
}

fn killing() -> Outcome {
    let flat = corpus("flat");
    let t = test();
    let fields = ["T1", "T2", "rot"].map(|n| flat.fields[n].clone());
    let passes = |m: &MetricTensor, x: &VectorField| killing_check(m, x, &t).map(|r| r.passed());
    for (n, x) in ["T1", "T2", "rot"].iter().zip(&fields) {
        if !passes(&flat.metric, x).map_err(err(n))? {
            return Err(format!("flat: {n} is not Killing"));
        }
    }
    let mut brackets = 0;
    for a in &fields {
        for b in &fields {
            let br = a.bracket(b).map_err(err("bracket"))?;
            if !passes(&flat.metric, &br).map_err(err("bracket"))? {
                return Err(format!("flat: bracket {} is not Killing", br.display()));
            }
            brackets += 1;
        }
    }
    if passes(&flat.metric, &flat.fields["dil"]).map_err(err("dil"))? {
        return Err("flat: x1 d/dx1 passed the Killing check".into());
    }
    let pp = corpus("ppwave");
    if !passes(&pp.metric, &pp.fields["dt"]).map_err(err("ppwave"))? {
        return Err("ppwave: d/dt is not Killing".into());
    }
    Ok(format!(
        "3 flat fields, {brackets} brackets, pp-wave d/dt; dilation rejected"
    ))
}

fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

fn products() -> Outcome {
    let t = test();
    let base = corpus("odd_base");
    let fibre = corpus("odd_fibre");
    let odd = corpus("odd").metric;
    let p = cartesian_product(&base.metric, &fibre.metric).map_err(err("cartesian"))?;
    if p.metric.to_json() != odd.to_json() {
        return Err(format!(
            "cartesian product {} differs from g0 {}",
            p.metric.to_json(),
            odd.to_json()
        ));
    }
    let one = GradedSeries::one(base.metric.chart());
    let w = warped_product(&base.metric, &fibre.metric, &one, &t).map_err(err("warp"))?;
    let (a, b) = (
        w.metric.to_json().to_string(),
        p.metric.to_json().to_string(),
    );
    if a != b {
        return Err(format!(
            "warp by 1 differs from the cartesian product:\n{a}\n{b}"
        ));
    }

    // mu = exp((x^2 + z^2)/4) = exp(x^2/4) sum_n z^{2n} / (n! 4^n).
    let mu = &base.functions["mu"];
    let chart = mu.chart();
    let trunc = chart.trunc();
    let mut want = GradedSeries::zero(chart);
    for n in 0..=(trunc / 2) as u64 {
        let term = format!(
            "exp(x^2/4) * z^{} / {}",
            2 * n,
            factorial(n) * 4u64.pow(n as u32)
        );
        want = want
            .add(&GradedSeries::parse(chart, &term).map_err(err("oracle"))?)
            .map_err(err("oracle"))?;
    }
    let diff = mu.sub(&want).map_err(err("mu"))?;
    if !diff.is_exactly_zero() {
        return Err(format!(
            "mu series differs from the expansion by {}",
            diff.display()
        ));
    }
    let warped = warped_product(&base.metric, &fibre.metric, mu, &t).map_err(err("warp"))?;
    let target = corpus("warped").metric;
    for i in 0..target.dim() {
        for j in 0..target.dim() {
            let d = warped
                .metric
                .get(i, j)
                .sub(target.get(i, j))
                .map_err(err("warped"))?;
            if !d.zero_status(&t).is_zero() {
                return Err(format!(
                    "warped product differs at [{i},{j}] by {}",
                    d.display()
                ));
            }
        }
    }
    Ok(format!(
        "g0 reproduced, warp by 1 identical, mu series matches through order {trunc}"
    ))
}

fn main() {
    let start = Instant::now();
    let mut all = corpus_metrics();
    all.extend(random_metrics());
    type Criterion<'a> = (&'a str, Box<dyn Fn() -> Outcome + 'a>);
    let criteria: Vec<Criterion> = vec![
        ("fundamental theorem", Box::new(|| fundamental(&all))),
        ("curvature identities", Box::new(|| curvature(&all))),
        ("odd-metric theorems", Box::new(|| odd_theorems(&all))),
        ("Leibniz anomaly", Box::new(|| leibniz(&all))),
        ("non-degeneracy gate", Box::new(|| gate(&all))),
        (
            "inverse symmetry and traces",
            Box::new(|| inverse_symmetry(&all)),
        ),
        ("classical regression", Box::new(classical)),
        ("reduction", Box::new(reduction)),
        ("Killing fields", Box::new(killing)),
        ("products", Box::new(products)),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or(p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        let secs = t0.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!(
                "criterion {:>2} {name:<28} PASS  ({detail}; {secs:.1}s)",
                k + 1
            ),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} {name:<28} FAIL  {why} ({secs:.1}s)", k + 1)
            }
        }
    }
    println!(
        "{} of {} criteria passed in {:.1}s",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
