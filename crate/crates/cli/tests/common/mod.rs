#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zn_riemann::geometry::{coordinate_monomials, MetricTensor};
use zn_riemann::gradedlinalg::{GradedMatrix, Variance};
use zn_riemann::symkernel::{Chart, Generator, GradedSeries, ZeroTest};
use zn_riemann::Degree;
use zn_riemann_cli::{ManifoldSpec, Model};

pub fn corpus_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(format!("{name}.zr"))
}

pub fn corpus_text(name: &str) -> String {
    std::fs::read_to_string(corpus_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn corpus(name: &str) -> Model {
    ManifoldSpec::parse(&corpus_text(name))
        .unwrap()
        .build(None)
        .unwrap()
}

pub fn deg(bits: &[u8]) -> Degree {
    Degree::from_bits(bits).unwrap()
}

pub type DegreeClass = (
    &'static str,
    Degree,
    Arc<Chart>,
    Vec<(&'static str, &'static str)>,
);

/// Named degree classes of `Z_2^2` with a chart and a constant metric of
/// that degree.
pub fn degree_classes() -> Vec<DegreeClass> {
    let gen = |n: &str, b: &[u8]| Generator {
        name: n.into(),
        degree: deg(b),
    };
    let even = Chart::new(
        2,
        vec!["x".into()],
        vec![gen("z", &[1, 1]), gen("xi1", &[0, 1]), gen("xi2", &[0, 1])],
        3,
    )
    .unwrap();
    let mixed = Chart::new(
        2,
        vec!["x".into()],
        vec![gen("z", &[1, 1]), gen("xi", &[0, 1]), gen("eta", &[1, 0])],
        3,
    )
    .unwrap();
    vec![
        (
            "(0,0)",
            deg(&[0, 0]),
            even,
            vec![("x", "x"), ("z", "z"), ("xi1", "xi2")],
        ),
        (
            "(1,1)",
            deg(&[1, 1]),
            mixed.clone(),
            vec![("x", "z"), ("eta", "xi")],
        ),
        (
            "(0,1)",
            deg(&[0, 1]),
            mixed.clone(),
            vec![("x", "xi"), ("z", "eta")],
        ),
        (
            "(1,0)",
            deg(&[1, 0]),
            mixed,
            vec![("x", "eta"), ("z", "xi")],
        ),
    ]
}

/// Random homogeneous function of the given degree: a few generator
/// monomials of that degree times quadratic polynomials in the base
/// coordinates.
pub fn random_function(
    chart: &Arc<Chart>,
    degree: Degree,
    terms: usize,
    rng: &mut ChaCha8Rng,
) -> GradedSeries {
    let monos: Vec<GradedSeries> = coordinate_monomials(chart, 2)
        .into_iter()
        .filter(|m| {
            m.terms().iter().all(|(g, _)| {
                chart.mono_degree(*g) == degree && (*g != 0 || m.body().as_rational().is_some())
            })
        })
        .collect();
    let mut f = GradedSeries::zero(chart);
    if monos.is_empty() {
        return f;
    }
    for _ in 0..terms {
        let m = monos.choose(rng).unwrap();
        let c: i64 = *[-2, -1, 1, 2, 3].choose(rng).unwrap();
        let b = random_base_poly(chart, c, rng);
        f = f.add(&m.mul(&b).unwrap()).unwrap();
    }
    f
}

/// `c + a x_i + b x_i x_j` in random base coordinates.
pub fn random_base_poly(chart: &Arc<Chart>, c: i64, rng: &mut ChaCha8Rng) -> GradedSeries {
    let mut b = GradedSeries::from_int(chart, c);
    if chart.p() == 0 {
        return b;
    }
    let xi = GradedSeries::coord(chart, rng.gen_range(0..chart.p()));
    let xj = GradedSeries::coord(chart, rng.gen_range(0..chart.p()));
    let a = GradedSeries::from_int(chart, rng.gen_range(-2..=2));
    let q = GradedSeries::from_int(chart, rng.gen_range(-1..=1));
    b = b.add(&a.mul(&xi).unwrap()).unwrap();
    b.add(&q.mul(&xi).unwrap().mul(&xj).unwrap()).unwrap()
}

/// Random homogeneous function whose degree is drawn from the degrees of
/// the coordinates.
pub fn random_homogeneous(chart: &Arc<Chart>, rng: &mut ChaCha8Rng) -> GradedSeries {
    let i = rng.gen_range(0..chart.dim());
    let d = chart.coord_degree(i);
    let f = random_function(chart, d, 2, rng);
    if f.has_no_terms() {
        random_base_poly(chart, 1, rng)
    } else {
        f
    }
}

/// Random metric: the constant metric of the class plus random
/// homogeneous perturbations, redrawn while the body is singular.
pub fn random_metric(class: usize, seed: u64) -> MetricTensor {
    let (_, degree, chart, base) = degree_classes().swap_remove(class);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut entries = Vec::new();
        let mut taken = std::collections::BTreeSet::new();
        for (a, b) in &base {
            let (i, j) = (chart.index_of(a).unwrap(), chart.index_of(b).unwrap());
            let extra = random_function(
                &chart,
                chart.coord_degree(i) + chart.coord_degree(j) + degree,
                1,
                &mut rng,
            );
            entries.push((i, j, GradedSeries::one(&chart).add(&extra).unwrap()));
            taken.insert((i.min(j), i.max(j)));
        }
        for i in 0..chart.dim() {
            for j in i..chart.dim() {
                let d = chart.coord_degree(i) + chart.coord_degree(j) + degree;
                let skew = i == j && chart.coord_degree(i).dot(chart.coord_degree(i)) == 1;
                if taken.contains(&(i, j)) || skew || !rng.gen_bool(0.6) {
                    continue;
                }
                let f = random_function(&chart, d, 2, &mut rng);
                if !f.has_no_terms() {
                    entries.push((i, j, f));
                }
            }
        }
        let m = MetricTensor::from_entries(&chart, degree, entries).unwrap();
        if m.inverse().is_ok() && m.validate(&ZeroTest::default()).passed() {
            return m;
        }
    }
}

/// Random graded skew-symmetric covariant tensor `w_JI = -(-1)^<I,J> w_IJ`.
pub fn random_skew(chart: &Arc<Chart>, degree: Degree, rng: &mut ChaCha8Rng) -> GradedMatrix {
    let mut w = GradedMatrix::zeros(chart, Variance::Covariant, degree);
    for i in 0..chart.dim() {
        for j in i..chart.dim() {
            let parity = chart.coord_degree(i).dot(chart.coord_degree(j));
            if i == j && parity == 0 {
                continue;
            }
            let f = random_function(
                chart,
                chart.coord_degree(i) + chart.coord_degree(j) + degree,
                2,
                rng,
            );
            let mirrored = if parity == 1 { f.clone() } else { f.neg() };
            w.set(i, j, f);
            w.set(j, i, mirrored);
        }
    }
    w
}
