use std::sync::Arc;

use super::connection::ChristoffelData;
use super::fields::{accumulate, VectorField};
use super::metric::MetricTensor;
use super::report::Report;
use crate::error::{Error, Result};
use crate::gradedlinalg::{GradedMatrix, Variance};
use crate::grading::Degree;
use crate::symkernel::{Chart, GradedSeries, ZeroTest};
use crate::Rational;

fn same_chart(m: &MetricTensor, x: &VectorField) -> Result<()> {
    if m.chart().same_as(x.chart()) {
        Ok(())
    } else {
        Err(Error::ChartMismatch(
            "vector field and metric live on different charts".into(),
        ))
    }
}

/// `(L_X g)_{IJ} = (-1)^<X,I> d_J X^K g_{KI} + (-1)^<X+J,I> d_I X^K g_{KJ}
///   + (-1)^<X,I+J> X^K d_K g_{IJ}`.
pub fn lie_derivative_metric(m: &MetricTensor, x: &VectorField) -> Result<GradedMatrix> {
    same_chart(m, x)?;
    let chart = m.chart();
    let n = chart.dim();
    let dx = x.degree();
    let deg = |i: usize| chart.coord_degree(i);
    // dX[j][k] = d_J X^K
    let d: Vec<Vec<GradedSeries>> = (0..n)
        .map(|j| (0..n).map(|k| x.component(k).derive(j)).collect())
        .collect();
    GradedMatrix::from_fn(chart, Variance::Covariant, m.degree() + dx, |i, j| {
        let mut out = GradedSeries::zero(chart);
        #[allow(clippy::needless_range_loop)]
        for k in 0..n {
            if !d[j][k].is_exactly_zero() && !m.get(k, i).is_exactly_zero() {
                accumulate(&mut out, &d[j][k].mul(m.get(k, i))?, dx.dot(deg(i)))?;
            }
            if !d[i][k].is_exactly_zero() && !m.get(k, j).is_exactly_zero() {
                accumulate(
                    &mut out,
                    &d[i][k].mul(m.get(k, j))?,
                    (dx + deg(j)).dot(deg(i)),
                )?;
            }
            let xk = x.component(k);
            if !xk.is_exactly_zero() {
                let dg = m.get(i, j).derive(k);
                if !dg.is_exactly_zero() {
                    accumulate(&mut out, &xk.mul(&dg)?, dx.dot(deg(i) + deg(j)))?;
                }
            }
        }
        Ok(out)
    })
}

/// Residues of `L_X g`.
pub fn killing_check(m: &MetricTensor, x: &VectorField, test: &ZeroTest) -> Result<Report> {
    let l = lie_derivative_metric(m, x)?;
    let chart = m.chart();
    let mut report = Report::new("killing");
    for i in 0..chart.dim() {
        for j in 0..chart.dim() {
            report.record(
                vec![chart.coord_name(i).into(), chart.coord_name(j).into()],
                l.get(i, j),
                test,
            );
        }
    }
    Ok(report)
}

/// `(grad f)^I = (-1)^{<f,g> + <f+g,J>} d_J f g^{JI}`.
pub fn gradient(m: &MetricTensor, f: &GradedSeries) -> Result<VectorField> {
    let chart = m.chart();
    let n = chart.dim();
    let df = f.degree_or(chart.zero_degree())?;
    let dg = m.degree();
    let ginv = m.inverse()?;
    let partials: Vec<GradedSeries> = (0..n).map(|j| f.derive(j)).collect();
    let mut comps = Vec::with_capacity(n);
    for i in 0..n {
        let mut c = GradedSeries::zero(chart);
        for (j, p) in partials.iter().enumerate() {
            let gi = ginv.get(j, i);
            if p.is_exactly_zero() || gi.is_exactly_zero() {
                continue;
            }
            accumulate(
                &mut c,
                &p.mul(gi)?,
                df.dot(dg) ^ (df + dg).dot(chart.coord_degree(j)),
            )?;
        }
        comps.push(c);
    }
    Ok(VectorField::raw(chart, df + dg, comps))
}

/// `Div X = (-1)^<I,I+X> d_I X^I + (-1)^<I,I+J> X^J Gamma_{JI}^I`.
pub fn divergence(c: &ChristoffelData, x: &VectorField) -> Result<GradedSeries> {
    let chart = c.chart();
    if !chart.same_as(x.chart()) {
        return Err(Error::ChartMismatch(
            "vector field and connection live on different charts".into(),
        ));
    }
    let n = chart.dim();
    let deg = |i: usize| chart.coord_degree(i);
    let mut out = GradedSeries::zero(chart);
    for i in 0..n {
        accumulate(
            &mut out,
            &x.component(i).derive(i),
            deg(i).dot(deg(i) + x.degree()),
        )?;
        for j in 0..n {
            let (xj, g) = (x.component(j), c.get(j, i, i));
            if xj.is_exactly_zero() || g.is_exactly_zero() {
                continue;
            }
            accumulate(&mut out, &xj.mul(g)?, deg(i).dot(deg(i) + deg(j)))?;
        }
    }
    Ok(out)
}

/// `Delta f = Div(grad f)`.
pub fn laplacian(m: &MetricTensor, c: &ChristoffelData, f: &GradedSeries) -> Result<GradedSeries> {
    divergence(c, &gradient(m, f)?)
}

/// `(-1)^<J,J> g^{JI} (d_I d_J f - Gamma_{JI}^K d_K f)` for even metrics.
pub fn laplacian_local_even(
    m: &MetricTensor,
    c: &ChristoffelData,
    f: &GradedSeries,
) -> Result<GradedSeries> {
    if m.is_odd() {
        return Err(Error::Degree(
            "the local Laplacian formula needs an even metric".into(),
        ));
    }
    let chart = m.chart();
    let n = chart.dim();
    let ginv = m.inverse()?;
    let partials: Vec<GradedSeries> = (0..n).map(|k| f.derive(k)).collect();
    let mut out = GradedSeries::zero(chart);
    for j in 0..n {
        for i in 0..n {
            let gji = ginv.get(j, i);
            if gji.is_exactly_zero() {
                continue;
            }
            let mut inner = partials[j].derive(i);
            for (k, p) in partials.iter().enumerate() {
                let g = c.get(j, i, k);
                if !g.is_exactly_zero() && !p.is_exactly_zero() {
                    inner = inner.sub(&g.mul(p)?)?;
                }
            }
            let dj = chart.coord_degree(j);
            accumulate(&mut out, &gji.mul(&inner)?, dj.dot(dj))?;
        }
    }
    Ok(out)
}

/// `Delta(ff') - (Delta f) f' - (-1)^<g,f> f Delta f' - (-1)^<f',g> 2 <grad f|grad f'>`.
pub fn leibniz_anomaly(
    m: &MetricTensor,
    c: &ChristoffelData,
    f: &GradedSeries,
    f2: &GradedSeries,
) -> Result<GradedSeries> {
    let z = m.chart().zero_degree();
    let (df, df2, dg) = (f.degree_or(z)?, f2.degree_or(z)?, m.degree());
    let mut r = laplacian(m, c, &f.mul(f2)?)?;
    r = r.sub(&laplacian(m, c, f)?.mul(f2)?)?;
    accumulate(&mut r, &f.mul(&laplacian(m, c, f2)?)?, dg.dot(df) ^ 1)?;
    let pair = m
        .pairing(&gradient(m, f)?, &gradient(m, f2)?)?
        .scale(&Rational::from_integer(2.into()));
    accumulate(&mut r, &pair, df2.dot(dg) ^ 1)?;
    Ok(r)
}

/// `grad(ff') - (-1)^<f,g> f grad f' - (-1)^<f',f+g> f' grad f`, per component.
pub fn gradient_product_residue(
    m: &MetricTensor,
    f: &GradedSeries,
    f2: &GradedSeries,
) -> Result<VectorField> {
    let z = m.chart().zero_degree();
    let (df, df2, dg) = (f.degree_or(z)?, f2.degree_or(z)?, m.degree());
    let lhs = gradient(m, &f.mul(f2)?)?;
    let a = gradient(m, f2)?.mul_function(f, df)?;
    let b = gradient(m, f)?.mul_function(f2, df2)?;
    let a = if df.dot(dg) == 1 { a.neg() } else { a };
    let b = if df2.dot(df + dg) == 1 { b.neg() } else { b };
    lhs.sub(&a)?.sub(&b)
}

/// `Div(fX) - (-1)^<f,X+g> <X|grad f> - f Div X`.
pub fn divergence_product_residue(
    m: &MetricTensor,
    c: &ChristoffelData,
    f: &GradedSeries,
    x: &VectorField,
) -> Result<GradedSeries> {
    let df = f.degree_or(m.chart().zero_degree())?;
    let mut r = divergence(c, &x.mul_function(f, df)?)?;
    accumulate(
        &mut r,
        &m.pairing(x, &gradient(m, f)?)?,
        df.dot(x.degree() + m.degree()) ^ 1,
    )?;
    r = r.sub(&f.mul(&divergence(c, x)?)?)?;
    Ok(r)
}

/// Contracted Christoffel identity with free index `J`:
/// `sum (-1)^<I,I+L> 2 g^{JL} Gamma_{LI}^I
///   = sum (-1)^<I,I> g^{JL} (d_L g_{IM}) g^{MI}
///   + sum (-1)^<I,I+L> (1 - (-1)^<g,g>) g^{JL} (d_I g_{LM}) g^{MI}`.
pub fn contracted_christoffel_check(
    m: &MetricTensor,
    c: &ChristoffelData,
    test: &ZeroTest,
) -> Result<Report> {
    let chart = m.chart();
    let n = chart.dim();
    let ginv = m.inverse()?;
    let deg = |i: usize| chart.coord_degree(i);
    let factor = if m.is_odd() { 2 } else { 0 };
    // Per free lower index L, before contracting with g^{JL}.
    let mut lhs_l = Vec::with_capacity(n);
    let mut rhs_l = Vec::with_capacity(n);
    for l in 0..n {
        let mut lhs = GradedSeries::zero(chart);
        let mut rhs = GradedSeries::zero(chart);
        for i in 0..n {
            let p = deg(i).dot(deg(i) + deg(l));
            accumulate(
                &mut lhs,
                &c.get(l, i, i).scale(&Rational::from_integer(2.into())),
                p,
            )?;
            for mm in 0..n {
                let inv = ginv.get(mm, i);
                if inv.is_exactly_zero() {
                    continue;
                }
                let a = m.get(i, mm).derive(l);
                if !a.is_exactly_zero() {
                    accumulate(&mut rhs, &a.mul(inv)?, deg(i).dot(deg(i)))?;
                }
                if factor != 0 {
                    let b = m.get(l, mm).derive(i);
                    if !b.is_exactly_zero() {
                        let t = b.mul(inv)?.scale(&Rational::from_integer(factor.into()));
                        accumulate(&mut rhs, &t, p)?;
                    }
                }
            }
        }
        lhs_l.push(lhs);
        rhs_l.push(rhs);
    }
    let mut report = Report::new("contracted-christoffel");
    for j in 0..n {
        let mut res = GradedSeries::zero(chart);
        for l in 0..n {
            let g = ginv.get(j, l);
            if g.is_exactly_zero() {
                continue;
            }
            res = res.add(&g.mul(&lhs_l[l].sub(&rhs_l[l])?)?)?;
        }
        report.record(vec![chart.coord_name(j).into()], &res, test);
    }
    Ok(report)
}

/// Degree of `Delta f`.
pub fn laplacian_degree(m: &MetricTensor, f: &GradedSeries) -> Result<Degree> {
    Ok(f.degree_or(m.chart().zero_degree())? + m.degree())
}

/// Coordinate monomials `x^{I_1} ... x^{I_k}` with `k <= max_power`, one per
/// multiset of coordinates, nilpotent coordinates at most once.
pub fn coordinate_monomials(chart: &Arc<Chart>, max_power: u32) -> Vec<GradedSeries> {
    fn walk(
        chart: &Arc<Chart>,
        from: usize,
        left: u32,
        acc: GradedSeries,
        out: &mut Vec<GradedSeries>,
    ) {
        out.push(acc.clone());
        if left == 0 {
            return;
        }
        for i in from..chart.dim() {
            let nilpotent = chart.gen_of(i).is_some_and(|g| chart.is_nilpotent(g));
            let next = if nilpotent { i + 1 } else { i };
            let term = acc.mul(&GradedSeries::coord(chart, i)).expect("same chart");
            if term.has_no_terms() {
                continue;
            }
            walk(chart, next, left - 1, term, out);
        }
    }
    let mut out = Vec::new();
    walk(chart, 0, max_power, GradedSeries::one(chart), &mut out);
    out
}
