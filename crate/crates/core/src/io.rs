//! Text formats: edge lists, point files, sample files and report CSV.
//!
//! Reals are written with Rust's shortest round-trip formatting, so
//! `parse(serialize(x)) == x` holds bit for bit.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::hardness::SignedGraph;
use crate::sampling::WeightedSample;
use crate::space::{Graph, PointSet};

/// Non-empty lines with `#` comments stripped, paired with 1-based numbers.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| Error::parse(line, format!("bad {what} `{tok}`")))
}

struct RawEdges<W> {
    n: Option<usize>,
    edges: Vec<(usize, usize, W, usize)>,
}

fn raw_edges<W: std::str::FromStr>(text: &str) -> Result<RawEdges<W>> {
    let mut n = None;
    let mut edges = Vec::new();
    for (idx, (line_no, line)) in data_lines(text).enumerate() {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            [nn, _m] if idx == 0 => {
                n = Some(parse_num(nn, line_no, "node count")?);
            }
            [u, v, w] => edges.push((
                parse_num(u, line_no, "node id")?,
                parse_num(v, line_no, "node id")?,
                parse_num(w, line_no, "weight")?,
                line_no,
            )),
            _ => {
                return Err(Error::parse(
                    line_no,
                    "expected `u v w` (or an `n m` header on the first line)",
                ))
            }
        }
    }
    Ok(RawEdges { n, edges })
}

fn node_count<W>(raw: &RawEdges<W>) -> Result<usize> {
    let max_id = raw.edges.iter().map(|e| e.0.max(e.1) + 1).max().unwrap_or(0);
    match raw.n {
        Some(n) => {
            if let Some(e) = raw.edges.iter().find(|e| e.0 >= n || e.1 >= n) {
                return Err(Error::parse(e.3, format!("node id out of range for n = {n}")));
            }
            Ok(n)
        }
        None => Ok(max_id),
    }
}

/// `u v w` triples, 0-based ids, optional `n m` header. Parallel edges keep
/// the minimum weight; self-loops are ignored; negative weights are errors.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let raw = raw_edges::<f64>(text)?;
    let n = node_count(&raw)?;
    for &(_, _, w, line) in &raw.edges {
        if w < 0.0 {
            return Err(Error::NegativeWeight { line, weight: w });
        }
        if !w.is_finite() {
            return Err(Error::parse(line, format!("weight {w} is not finite")));
        }
    }
    Graph::new(n, raw.edges.into_iter().map(|(u, v, w, _)| (u, v, w)))
}

/// Edge list with integer (possibly negative) weights, for the hardness
/// reduction. M is the largest absolute weight.
pub fn parse_signed_edge_list(text: &str) -> Result<SignedGraph> {
    let raw = raw_edges::<i64>(text)?;
    let n = node_count(&raw)?;
    SignedGraph::with_tight_bound(n, raw.edges.into_iter().map(|(u, v, w, _)| (u, v, w)).collect())
}

pub fn serialize_graph(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.edges().len());
    for &(u, v, w) in g.edges() {
        let _ = writeln!(out, "{u} {v} {w}");
    }
    out
}

fn split_reals(line: &str, line_no: usize) -> Result<Vec<f64>> {
    line.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| parse_num(t, line_no, "real"))
        .collect()
}

/// CSV coordinates (one point per row), or `matrix n` followed by `n` rows
/// of `n` reals.
pub fn parse_points(text: &str) -> Result<PointSet> {
    let mut lines = data_lines(text).peekable();
    let Some(&(first_no, first)) = lines.peek() else {
        return PointSet::euclidean(1, Vec::new());
    };
    if let Some(rest) = first.strip_prefix("matrix") {
        lines.next();
        let n: usize = parse_num(rest.trim(), first_no, "matrix size")?;
        let mut d = Vec::with_capacity(n * n);
        let mut rows = 0;
        for (line_no, line) in lines {
            let row = split_reals(line, line_no)?;
            if row.len() != n {
                return Err(Error::parse(line_no, format!("expected {n} entries, got {}", row.len())));
            }
            rows += 1;
            if rows > n {
                return Err(Error::parse(line_no, format!("more than {n} matrix rows")));
            }
            d.extend(row);
        }
        if rows != n {
            return Err(Error::parse(first_no, format!("expected {n} matrix rows, got {rows}")));
        }
        return PointSet::from_matrix(n, d);
    }
    let mut dim = None;
    let mut coords = Vec::new();
    for (line_no, line) in lines {
        let row = split_reals(line, line_no)?;
        match dim {
            None => dim = Some(row.len()),
            Some(d) if d != row.len() => {
                return Err(Error::parse(line_no, format!("expected {d} coordinates, got {}", row.len())))
            }
            _ => {}
        }
        if row.iter().any(|c| !c.is_finite()) {
            return Err(Error::parse(line_no, "coordinates must be finite"));
        }
        coords.extend(row);
    }
    PointSet::euclidean(dim.unwrap_or(1), coords)
}

pub fn serialize_points(p: &PointSet) -> String {
    let mut out = String::new();
    match p {
        PointSet::Euclidean { dim, coords } => {
            for row in coords.chunks(*dim) {
                let cells: Vec<String> = row.iter().map(f64::to_string).collect();
                let _ = writeln!(out, "{}", cells.join(","));
            }
        }
        PointSet::Matrix { n, d } => {
            let _ = writeln!(out, "matrix {n}");
            for row in d.chunks((*n).max(1)) {
                let cells: Vec<String> = row.iter().map(f64::to_string).collect();
                let _ = writeln!(out, "{}", cells.join(" "));
            }
        }
    }
    out
}

/// Header `sample k seed n`, then one `v p_v` line per entry.
pub fn serialize_sample(s: &WeightedSample) -> String {
    let mut out = format!("sample {} {} {}\n", s.k, s.seed, s.n);
    for &(v, p) in &s.entries {
        let _ = writeln!(out, "{v} {p}");
    }
    out
}

pub fn parse_sample(text: &str) -> Result<WeightedSample> {
    let mut lines = data_lines(text);
    let (hdr_no, hdr) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing `sample k seed n` header"))?;
    let toks: Vec<&str> = hdr.split_whitespace().collect();
    let ["sample", k, seed, n] = toks.as_slice() else {
        return Err(Error::parse(hdr_no, "expected `sample k seed n`"));
    };
    let k: f64 = parse_num(k, hdr_no, "k")?;
    let seed: u64 = parse_num(seed, hdr_no, "seed")?;
    let n: usize = parse_num(n, hdr_no, "n")?;
    let mut entries: Vec<(usize, f64)> = Vec::new();
    for (line_no, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        let [v, p] = toks.as_slice() else {
            return Err(Error::parse(line_no, "expected `v p`"));
        };
        let v: usize = parse_num(v, line_no, "node id")?;
        let p: f64 = parse_num(p, line_no, "probability")?;
        if v >= n {
            return Err(Error::parse(line_no, format!("node {v} out of range for n = {n}")));
        }
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::parse(line_no, format!("probability {p} outside (0, 1]")));
        }
        if entries.iter().any(|&(u, _)| u == v) {
            return Err(Error::parse(line_no, format!("node {v} listed twice")));
        }
        entries.push((v, p));
    }
    Ok(WeightedSample { n, k, seed, entries })
}

/// One row of an estimation report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub v: usize,
    pub w_hat: f64,
    pub cc_hat: f64,
    pub exact: Option<(f64, f64)>,
}

/// `method,v,w_hat,cc_hat` plus `w_exact,cc_exact` when any row carries
/// exact values.
pub fn report_csv(method: &str, rows: &[ReportRow]) -> String {
    let with_exact = rows.iter().any(|r| r.exact.is_some());
    let mut out = String::from("method,v,w_hat,cc_hat");
    if with_exact {
        out.push_str(",w_exact,cc_exact");
    }
    out.push('\n');
    for r in rows {
        let _ = write!(out, "{method},{},{},{}", r.v, r.w_hat, r.cc_hat);
        if with_exact {
            match r.exact {
                Some((w, cc)) => {
                    let _ = write!(out, ",{w},{cc}");
                }
                None => out.push_str(",,"),
            }
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn edge_list_examples() {
        let g = parse_edge_list("0 1 1\n1 2 1").unwrap();
        assert_eq!(g, Graph::new(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap());
        let g = parse_edge_list("0 1 2\n0 1 1").unwrap();
        assert_eq!(g.edges(), &[(0, 1, 1.0)]);
        assert_eq!(
            parse_edge_list("0 1 -3"),
            Err(Error::NegativeWeight { line: 1, weight: -3.0 })
        );
    }

    #[test]
    fn edge_list_header_and_comments() {
        let g = parse_edge_list("# a path\n5 2\n0 1 1 # first\n\n1 2 0.5\n").unwrap();
        assert_eq!(g.n(), 5);
        assert!(matches!(parse_edge_list("2 1\n0 3 1"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_edge_list("0 1\n1 2"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_edge_list("0 1 x"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn signed_edge_list() {
        let g = parse_signed_edge_list("0 1 -2\n1 2 3\n").unwrap();
        assert_eq!(g.bound(), 3);
        assert_eq!(g.weight(1, 0), Some(-2));
    }

    #[test]
    fn point_examples() {
        let p = parse_points("0,0\n3,4").unwrap();
        assert_eq!(p.len(), 2);
        let s: crate::space::DistanceSpace = p.into();
        assert_eq!(s.distance(0, 1).unwrap(), 5.0);
        let m = parse_points("matrix 2\n0 5\n5 0").unwrap();
        assert_eq!(m, PointSet::Matrix { n: 2, d: vec![0.0, 5.0, 5.0, 0.0] });
        assert!(matches!(
            parse_points("matrix 3\n0 1 10\n1 0 1\n10 1 0"),
            Err(Error::NotAMetric { .. })
        ));
        assert!(matches!(parse_points("0,0\n1"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_points("matrix 2\n0 1"), Err(Error::Parse { .. })));
    }

    #[test]
    fn sample_file_errors() {
        assert!(parse_sample("sample 3 1 2\n0 1.5").is_err());
        assert!(parse_sample("sample 3 1 2\n2 0.5").is_err());
        assert!(parse_sample("sample 3 1 2\n0 0.5\n0 0.5").is_err());
        assert!(parse_sample("0 0.5").is_err());
    }

    #[test]
    fn report_layout() {
        let rows = vec![
            ReportRow { v: 0, w_hat: 3.0, cc_hat: 2.0 / 3.0, exact: None },
            ReportRow { v: 1, w_hat: 0.0, cc_hat: f64::INFINITY, exact: None },
        ];
        assert_eq!(
            report_csv("weighted", &rows),
            "method,v,w_hat,cc_hat\nweighted,0,3,0.6666666666666666\nweighted,1,0,inf\n"
        );
    }

    proptest! {
        #[test]
        fn graph_round_trip(
            n in 1usize..20,
            raw in prop::collection::vec((0usize..20, 0usize..20, 0.0f64..1e6), 0..60),
        ) {
            let edges = raw.into_iter().map(|(u, v, w)| (u % n, v % n, w));
            let g = Graph::new(n, edges).unwrap();
            prop_assert_eq!(parse_edge_list(&serialize_graph(&g)).unwrap(), g);
        }

        #[test]
        fn points_round_trip(dim in 1usize..4, raw in prop::collection::vec(-1e9f64..1e9, 1..60)) {
            let len = raw.len() / dim * dim;
            prop_assume!(len > 0);
            let p = PointSet::euclidean(dim, raw[..len].to_vec()).unwrap();
            prop_assert_eq!(parse_points(&serialize_points(&p)).unwrap(), p);
        }

        #[test]
        fn sample_round_trip(
            k in 0.001f64..1e4,
            seed: u64,
            probs in prop::collection::vec(prop::option::of(1e-12f64..=1.0), 1..40),
        ) {
            let entries: Vec<(usize, f64)> = probs
                .iter()
                .enumerate()
                .filter_map(|(v, p)| p.map(|p| (v, p)))
                .collect();
            let s = WeightedSample { n: probs.len(), k, seed, entries };
            prop_assert_eq!(parse_sample(&serialize_sample(&s)).unwrap(), s);
        }
    }

    #[test]
    fn matrix_round_trip() {
        let m = PointSet::from_matrix(3, vec![0.0, 1.5, 2.0, 1.5, 0.0, 1.0, 2.0, 1.0, 0.0]).unwrap();
        assert_eq!(parse_points(&serialize_points(&m)).unwrap(), m);
    }
}
