//! Line-oriented chart files.
//!
//! ```text
//! # comment
//! [chart]
//! n = 2
//! trunc = 4
//! base = x1, x2
//! z = [1,1]
//! xi1 = [0,1]
//!
//! [metric]
//! degree = [0,0]
//! g[x1,x1] = 1
//! g[xi1,xi2] = 1
//!
//! [fields]
//! f = x1^2 + z
//! X[x1] = -x2
//! X[x2] = x1
//! ```
//!
//! In `[chart]` every key other than `n`, `trunc` and `base` declares a
//! generator. Metric components not given are zero; `g[J,I]` is filled
//! from `g[I,J]` by graded symmetry.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use zn_riemann::geometry::{MetricTensor, VectorField};
use zn_riemann::symkernel::{Chart, Expr, Generator, GradedSeries, DEFAULT_TRUNC};
use zn_riemann::{Degree, Error, Result};

const RESERVED: [&str; 3] = ["n", "trunc", "base"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifoldSpec {
    pub n: usize,
    pub trunc: u32,
    pub base: Vec<String>,
    pub generators: Vec<(String, Degree)>,
    pub metric_degree: Degree,
    /// `(I, J, expression)` in file order.
    pub metric: Vec<(String, String, String)>,
    /// Named functions and scalars.
    pub functions: BTreeMap<String, String>,
    /// Named vector fields: coordinate to component expression.
    pub fields: BTreeMap<String, BTreeMap<String, String>>,
}

/// Chart, metric and named objects built from a spec.
#[derive(Clone, Debug)]
pub struct Model {
    pub chart: Arc<Chart>,
    pub metric: MetricTensor,
    pub functions: BTreeMap<String, GradedSeries>,
    pub fields: BTreeMap<String, VectorField>,
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Chart,
    Metric,
    Fields,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

/// Moves an error from a one-line parse to its place in the file.
fn locate(e: Error, line: usize, column: usize) -> Error {
    match e {
        Error::Syntax {
            column: c, message, ..
        } => syntax(line, column + c - 1, message),
        Error::UnknownCoordinate(name) => {
            syntax(line, column, format!("unknown identifier `{name}`"))
        }
        other => syntax(line, column, other.to_string()),
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_degree(text: &str, n: Option<usize>, line: usize, column: usize) -> Result<Degree> {
    let inner = text
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| syntax(line, column, "degree must look like [0,1]"))?;
    let bits = if inner.trim().is_empty() {
        Vec::new()
    } else {
        inner
            .split(',')
            .map(|b| match b.trim() {
                "0" => Ok(0u8),
                "1" => Ok(1u8),
                other => Err(syntax(
                    line,
                    column,
                    format!("degree entry `{other}` is not 0 or 1"),
                )),
            })
            .collect::<Result<Vec<u8>>>()?
    };
    if let Some(n) = n {
        if bits.len() != n {
            return Err(syntax(
                line,
                column,
                format!("degree has {} entries, the chart has n = {n}", bits.len()),
            ));
        }
    }
    Degree::from_bits(&bits).map_err(|e| locate(e, line, column))
}

/// `name[a,b]` or `name[a]`.
fn split_indexed(key: &str) -> Option<(&str, Vec<&str>)> {
    let (name, rest) = key.split_once('[')?;
    let inner = rest.strip_suffix(']')?;
    Some((name.trim(), inner.split(',').map(str::trim).collect()))
}

struct Line<'a> {
    number: usize,
    key: &'a str,
    key_col: usize,
    value: &'a str,
    value_col: usize,
}

fn split_line(number: usize, raw: &str) -> Result<Option<Line<'_>>> {
    let text = raw.split('#').next().unwrap_or("");
    if text.trim().is_empty() {
        return Ok(None);
    }
    let (k, v) = text.split_once('=').ok_or_else(|| {
        let col = text.len() - text.trim_start().len() + 1;
        syntax(number, col, "expected `key = value`")
    })?;
    let key_col = k.len() - k.trim_start().len() + 1;
    let value_col = k.len() + 1 + (v.len() - v.trim_start().len()) + 1;
    Ok(Some(Line {
        number,
        key: k.trim(),
        key_col,
        value: v.trim(),
        value_col,
    }))
}

impl ManifoldSpec {
    pub fn parse(text: &str) -> Result<ManifoldSpec> {
        let mut section = Section::None;
        let mut n: Option<usize> = None;
        let mut trunc = DEFAULT_TRUNC;
        let mut base: Option<Vec<String>> = None;
        let mut generators: Vec<(String, Degree)> = Vec::new();
        let mut metric_degree: Option<Degree> = None;
        let mut metric = Vec::new();
        let mut functions = BTreeMap::new();
        let mut fields: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        // Locations for the checks that need a built chart.
        let mut metric_at = Vec::new();
        let mut function_at = Vec::new();
        let mut field_at = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let number = idx + 1;
            let trimmed = raw.split('#').next().unwrap_or("").trim();
            if trimmed.starts_with('[') && !trimmed.contains('=') {
                let col = raw.len() - raw.trim_start().len() + 1;
                section = match trimmed {
                    "[chart]" => Section::Chart,
                    "[metric]" | "[fields]" if n.is_none() => {
                        return Err(syntax(number, col, "the [chart] section must come first"))
                    }
                    "[metric]" => Section::Metric,
                    "[fields]" => Section::Fields,
                    other => return Err(syntax(number, col, format!("unknown section `{other}`"))),
                };
                continue;
            }
            let Some(line) = split_line(number, raw)? else {
                continue;
            };
            let at_key = |m: String| syntax(line.number, line.key_col, m);
            let at_value = |m: String| syntax(line.number, line.value_col, m);
            match section {
                Section::None => return Err(at_key("entry before any section".into())),
                Section::Chart => {
                    match line.key {
                        "n" => {
                            n =
                                Some(line.value.parse().map_err(|_| {
                                    at_value("n must be a non-negative integer".into())
                                })?)
                        }
                        "trunc" => {
                            trunc = line.value.parse().map_err(|_| {
                                at_value("trunc must be a non-negative integer".into())
                            })?
                        }
                        "base" => {
                            let names: Vec<String> = if line.value.is_empty() {
                                Vec::new()
                            } else {
                                line.value
                                    .split(',')
                                    .map(|s| s.trim().to_string())
                                    .collect()
                            };
                            if let Some(bad) = names.iter().find(|s| !is_identifier(s)) {
                                return Err(at_value(format!("`{bad}` is not a coordinate name")));
                            }
                            base = Some(names);
                        }
                        name => {
                            if !is_identifier(name) {
                                return Err(at_key(format!("`{name}` is not a coordinate name")));
                            }
                            let n =
                                n.ok_or_else(|| at_key("declare n before the generators".into()))?;
                            generators.push((
                                name.to_string(),
                                parse_degree(line.value, Some(n), number, line.value_col)?,
                            ));
                        }
                    }
                }
                Section::Metric => {
                    if line.key == "degree" {
                        metric_degree = Some(parse_degree(line.value, n, number, line.value_col)?);
                    } else {
                        match split_indexed(line.key) {
                            Some(("g", idx)) if idx.len() == 2 => {
                                metric.push((
                                    idx[0].to_string(),
                                    idx[1].to_string(),
                                    line.value.to_string(),
                                ));
                                metric_at.push((number, line.key_col, line.value_col));
                            }
                            _ => {
                                return Err(at_key(format!(
                                    "expected `degree` or `g[I,J]`, found `{}`",
                                    line.key
                                )))
                            }
                        }
                    }
                }
                Section::Fields => match split_indexed(line.key) {
                    Some((name, idx)) if idx.len() == 1 && is_identifier(name) => {
                        let slot = fields.entry(name.to_string()).or_default();
                        if slot
                            .insert(idx[0].to_string(), line.value.to_string())
                            .is_some()
                        {
                            return Err(at_key(format!(
                                "component {} of `{name}` given twice",
                                idx[0]
                            )));
                        }
                        field_at.push((
                            name.to_string(),
                            idx[0].to_string(),
                            number,
                            line.key_col,
                            line.value_col,
                        ));
                    }
                    None if is_identifier(line.key) => {
                        if functions
                            .insert(line.key.to_string(), line.value.to_string())
                            .is_some()
                        {
                            return Err(at_key(format!("`{}` defined twice", line.key)));
                        }
                        function_at.push((line.key.to_string(), number, line.value_col));
                    }
                    _ => return Err(at_key(format!("malformed field entry `{}`", line.key))),
                },
            }
        }

        let n = n.ok_or_else(|| syntax(1, 1, "missing [chart] section with n"))?;
        for (g, _) in &generators {
            if RESERVED.contains(&g.as_str()) {
                return Err(syntax(1, 1, format!("`{g}` is reserved")));
            }
        }
        for name in functions.keys() {
            if fields.contains_key(name) {
                return Err(syntax(
                    1,
                    1,
                    format!("`{name}` is both a function and a vector field"),
                ));
            }
        }
        let spec = ManifoldSpec {
            n,
            trunc,
            base: base.unwrap_or_default(),
            generators,
            metric_degree: metric_degree.unwrap_or_else(|| Degree::zero(n)),
            metric,
            functions,
            fields,
        };
        spec.check(&metric_at, &function_at, &field_at)?;
        Ok(spec)
    }

    fn check(
        &self,
        metric_at: &[(usize, usize, usize)],
        function_at: &[(String, usize, usize)],
        field_at: &[(String, String, usize, usize, usize)],
    ) -> Result<()> {
        let chart = self.chart(None).map_err(|e| locate(e, 1, 1))?;
        if self.metric_degree.n() != self.n {
            return Err(syntax(1, 1, "metric degree length differs from n"));
        }
        let mut given: BTreeMap<(usize, usize), (GradedSeries, usize)> = BTreeMap::new();
        for ((a, b, text), &(line, key_col, value_col)) in self.metric.iter().zip(metric_at) {
            let i = chart
                .index_of(a)
                .ok_or_else(|| syntax(line, key_col, format!("unknown coordinate `{a}`")))?;
            let j = chart
                .index_of(b)
                .ok_or_else(|| syntax(line, key_col, format!("unknown coordinate `{b}`")))?;
            let value = series(&chart, text).map_err(|e| locate(e, line, value_col))?;
            let mirrored = if chart.coord_degree(i).dot(chart.coord_degree(j)) == 1 {
                value.neg()
            } else {
                value.clone()
            };
            for (slot, v) in [((i, j), &value), ((j, i), &mirrored)] {
                if let Some((prev, prev_line)) = given.get(&slot) {
                    if prev != v {
                        return Err(syntax(
                            line,
                            key_col,
                            format!("g[{a},{b}] contradicts the entry on line {prev_line}"),
                        ));
                    }
                }
            }
            given.insert((i, j), (value, line));
            given.insert((j, i), (mirrored, line));
        }
        for (name, line, col) in function_at {
            series(&chart, &self.functions[name]).map_err(|e| locate(e, *line, *col))?;
        }
        for (name, coord, line, key_col, value_col) in field_at {
            chart
                .index_of(coord)
                .ok_or_else(|| syntax(*line, *key_col, format!("unknown coordinate `{coord}`")))?;
            series(&chart, &self.fields[name][coord]).map_err(|e| locate(e, *line, *value_col))?;
        }
        Ok(())
    }

    pub fn chart(&self, trunc: Option<u32>) -> Result<Arc<Chart>> {
        let gens = self
            .generators
            .iter()
            .map(|(name, degree)| Generator {
                name: name.clone(),
                degree: *degree,
            })
            .collect();
        Chart::new(self.n, self.base.clone(), gens, trunc.unwrap_or(self.trunc))
    }

    /// Builds the chart and all named objects, optionally overriding the
    /// truncation order.
    pub fn build(&self, trunc: Option<u32>) -> Result<Model> {
        let chart = self.chart(trunc)?;
        let entries = self
            .metric
            .iter()
            .map(|(a, b, text)| {
                let i = chart
                    .index_of(a)
                    .ok_or_else(|| Error::UnknownCoordinate(a.clone()))?;
                let j = chart
                    .index_of(b)
                    .ok_or_else(|| Error::UnknownCoordinate(b.clone()))?;
                Ok((i, j, series(&chart, text)?))
            })
            .collect::<Result<Vec<_>>>()?;
        let metric = MetricTensor::from_entries(&chart, self.metric_degree, entries)?;
        let functions = self
            .functions
            .iter()
            .map(|(name, text)| Ok((name.clone(), series(&chart, text)?)))
            .collect::<Result<_>>()?;
        let mut fields = BTreeMap::new();
        for (name, comps) in &self.fields {
            let mut values = vec![GradedSeries::zero(&chart); chart.dim()];
            for (coord, text) in comps {
                let i = chart
                    .index_of(coord)
                    .ok_or_else(|| Error::UnknownCoordinate(coord.clone()))?;
                values[i] = series(&chart, text)?;
            }
            let field = VectorField::infer(&chart, values)
                .map_err(|e| Error::Spec(format!("vector field `{name}`: {e}")))?;
            fields.insert(name.clone(), field);
        }
        Ok(Model {
            chart,
            metric,
            functions,
            fields,
        })
    }

    /// Canonical text; parsing it gives back an equal spec.
    pub fn to_text(&self) -> String {
        let mut out = String::from("[chart]\n");
        let _ = writeln!(out, "n = {}", self.n);
        let _ = writeln!(out, "trunc = {}", self.trunc);
        let _ = writeln!(out, "base = {}", self.base.join(", "));
        for (name, degree) in &self.generators {
            let _ = writeln!(out, "{name} = {}", bracket(*degree));
        }
        out.push_str("\n[metric]\n");
        let _ = writeln!(out, "degree = {}", bracket(self.metric_degree));
        for (a, b, text) in &self.metric {
            let _ = writeln!(out, "g[{a},{b}] = {text}");
        }
        if !self.functions.is_empty() || !self.fields.is_empty() {
            out.push_str("\n[fields]\n");
            for (name, text) in &self.functions {
                let _ = writeln!(out, "{name} = {text}");
            }
            for (name, comps) in &self.fields {
                for (coord, text) in comps {
                    let _ = writeln!(out, "{name}[{coord}] = {text}");
                }
            }
        }
        out
    }

    /// Spec of a metric on a chart, listing `g[I,J]` for `I <= J`.
    pub fn from_metric(metric: &MetricTensor) -> ManifoldSpec {
        let chart = metric.chart();
        let mut entries = Vec::new();
        for i in 0..chart.dim() {
            for j in i..chart.dim() {
                let e = metric.get(i, j);
                if !e.has_no_terms() {
                    entries.push((
                        chart.coord_name(i).to_string(),
                        chart.coord_name(j).to_string(),
                        e.display(),
                    ));
                }
            }
        }
        ManifoldSpec {
            n: chart.n(),
            trunc: chart.trunc(),
            base: chart.base_names().to_vec(),
            generators: chart
                .generators()
                .iter()
                .map(|g| (g.name.clone(), g.degree))
                .collect(),
            metric_degree: metric.degree(),
            metric: entries,
            functions: BTreeMap::new(),
            fields: BTreeMap::new(),
        }
    }
}

fn bracket(d: Degree) -> String {
    let bits: Vec<String> = d.to_bits().iter().map(|b| b.to_string()).collect();
    format!("[{}]", bits.join(","))
}

fn series(chart: &Arc<Chart>, text: &str) -> Result<GradedSeries> {
    GradedSeries::from_expr(chart, &Expr::parse(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FLAT: &str = "[chart]\nn = 2\nbase = x1, x2\nz = [1,1]\nxi1 = [0,1]\nxi2 = [0,1]\n\n[metric]\ng[x1,x1] = 1\ng[x2,x2] = 1\ng[z,z] = 1\ng[xi1,xi2] = 1\n";

    fn err(text: &str) -> (usize, usize, String) {
        match ManifoldSpec::parse(text) {
            Err(Error::Syntax {
                line,
                column,
                message,
            }) => (line, column, message),
            other => panic!("expected a diagnostic, got {other:?}"),
        }
    }

    #[test]
    fn round_trip() {
        let spec = ManifoldSpec::parse(FLAT).unwrap();
        assert_eq!(ManifoldSpec::parse(&spec.to_text()).unwrap(), spec);
        assert_eq!(spec.trunc, DEFAULT_TRUNC);
    }

    #[test]
    fn completes_by_graded_symmetry() {
        let m = ManifoldSpec::parse(FLAT).unwrap().build(None).unwrap();
        let c = &m.chart;
        let (a, b) = (c.index_of("xi1").unwrap(), c.index_of("xi2").unwrap());
        assert_eq!(m.metric.get(b, a).display(), "-1");
    }

    #[test]
    fn diagnostics_carry_positions() {
        let (line, col, msg) = err("[chart]\nn = 2\nxi = [0,1,1]\n");
        assert_eq!((line, col), (3, 6));
        assert!(msg.contains("n = 2"));
        let (line, col, _) = err(&format!("{FLAT}g[x1,x2] = 1 + * x1\n"));
        assert_eq!((line, col), (13, 16));
        let (line, _, msg) = err(&format!("{FLAT}g[x1,w] = 1\n"));
        assert_eq!(line, 13);
        assert!(msg.contains("`w`"));
        let (line, _, _) = err(&format!("{FLAT}g[xi2,xi1] = 1\n"));
        assert_eq!(line, 13);
        let (_, _, msg) = err(&format!("{FLAT}g[x2,x1] = q\n"));
        assert!(msg.contains("`q`"));
        assert!(ManifoldSpec::parse(&format!("{FLAT}g[xi2,xi1] = -1\n")).is_ok());
    }
}
