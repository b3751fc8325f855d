//! Text formats.
//!
//! PGE: first line `n m`, then one line `v: u1 u2 ...` per vertex giving the
//! clockwise rotation at `v`. Partition files: one `v part` line per vertex.
//! Both accept `#` comments and blank lines.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::embedding::{Embedding, EmbeddingError};
use crate::graph::{Graph, GraphError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error("{path}: {source}")]
    File { path: String, source: std::io::Error },
}

/// Tokens of a line with 1-based columns, comments stripped.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let body = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in body.char_indices().chain(std::iter::once((body.len(), ' '))) {
        match (ch.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((s + 1, &body[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    out
}

fn err(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, column, message: message.into() }
}

fn number(line: usize, (col, tok): (usize, &str)) -> Result<usize, ParseError> {
    tok.parse().map_err(|_| err(line, col, format!("expected a non-negative integer, found '{tok}'")))
}

/// Non-empty lines after comment stripping, with their 1-based numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<(usize, &str)>)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, tokens(l))).filter(|(_, t)| !t.is_empty())
}

pub fn read_pge(text: &str) -> Result<(Graph, Embedding), IoError> {
    let (g, rotation) = read_rotation(text)?;
    let e = Embedding::new(&g, rotation)?;
    Ok((g, e))
}

/// Reads the graph of a PGE file without requiring the rotation system to be
/// planar. Rotations must still be symmetric.
pub fn read_pge_graph(text: &str) -> Result<Graph, IoError> {
    Ok(read_rotation(text)?.0)
}

fn read_rotation(text: &str) -> Result<(Graph, Vec<Vec<usize>>), IoError> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| err(1, 1, "missing header line 'n m'"))?;
    if header.len() != 2 {
        let col = header.get(2).map_or(1, |t| t.0);
        return Err(err(hline, col, "header must be exactly 'n m'").into());
    }
    let n = number(hline, header[0])?;
    let m = number(hline, header[1])?;

    let mut rotation: Vec<Option<Vec<usize>>> = vec![None; n];
    let mut last_line = hline;
    for (ln, toks) in lines {
        last_line = ln;
        let (col, head) = toks[0];
        let label = head.strip_suffix(':').ok_or_else(|| err(ln, col, format!("expected 'v:' but found '{head}'")))?;
        let v = number(ln, (col, label))?;
        if v >= n {
            return Err(err(ln, col, format!("vertex {v} out of range for n = {n}")).into());
        }
        if rotation[v].is_some() {
            return Err(err(ln, col, format!("duplicate rotation for vertex {v}")).into());
        }
        let mut rot = Vec::with_capacity(toks.len() - 1);
        for &t in &toks[1..] {
            let u = number(ln, t)?;
            if u >= n {
                return Err(err(ln, t.0, format!("neighbor {u} out of range for n = {n}")).into());
            }
            rot.push(u);
        }
        rotation[v] = Some(rot);
    }
    let rotation: Vec<Vec<usize>> = rotation
        .into_iter()
        .enumerate()
        .map(|(v, r)| r.ok_or_else(|| err(last_line + 1, 1, format!("missing rotation line for vertex {v}"))))
        .collect::<Result<_, _>>()?;

    let mut edges = Vec::new();
    for (v, rot) in rotation.iter().enumerate() {
        for &u in rot {
            if !rotation[u].contains(&v) {
                return Err(err(0, 0, format!("rotation is not symmetric: {v} lists {u} but not conversely")).into());
            }
            if v < u {
                edges.push((v, u));
            }
        }
    }
    let g = Graph::from_edges(n, &edges)?;
    if g.m() != m {
        return Err(err(hline, header[1].0, format!("header declares {m} edges but rotations give {}", g.m())).into());
    }
    Ok((g, rotation))
}

/// Canonical PGE text: each rotation starts at its smallest neighbor.
pub fn write_pge(g: &Graph, e: &Embedding) -> String {
    let mut out = format!("{} {}\n", g.n(), g.m());
    for v in 0..g.n() {
        let rot = e.rotation(v);
        write!(out, "{v}:").unwrap();
        if let Some(start) = rot.iter().enumerate().min_by_key(|&(_, &u)| u).map(|(i, _)| i) {
            for i in 0..rot.len() {
                write!(out, " {}", rot[(start + i) % rot.len()]).unwrap();
            }
        }
        out.push('\n');
    }
    out
}

/// Reads a partition of `n` vertices into `parts` parts.
pub fn read_partition(text: &str, n: usize, parts: usize) -> Result<Vec<usize>, ParseError> {
    let mut assign: Vec<Option<usize>> = vec![None; n];
    let mut last_line = 0;
    for (ln, toks) in content_lines(text) {
        last_line = ln;
        if toks.len() != 2 {
            let col = toks.get(2).map_or(toks[0].0, |t| t.0);
            return Err(err(ln, col, "expected 'vertex part'"));
        }
        let v = number(ln, toks[0])?;
        let p = number(ln, toks[1])?;
        if v >= n {
            return Err(err(ln, toks[0].0, format!("vertex {v} out of range for n = {n}")));
        }
        if p >= parts {
            return Err(err(ln, toks[1].0, format!("part {p} out of range for {parts} parts")));
        }
        if assign[v].replace(p).is_some() {
            return Err(err(ln, toks[0].0, format!("vertex {v} assigned twice")));
        }
    }
    let missing: Vec<String> = (0..n).filter(|&v| assign[v].is_none()).map(|v| v.to_string()).collect();
    if !missing.is_empty() {
        return Err(err(last_line + 1, 1, format!("missing vertex {}", missing.join(", "))));
    }
    Ok(assign.into_iter().map(Option::unwrap).collect())
}

pub fn write_partition(parts: &[usize]) -> String {
    parts.iter().enumerate().map(|(v, p)| format!("{v} {p}\n")).collect()
}

pub fn read_file(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::File { path: path.display().to_string(), source })
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), IoError> {
    std::fs::write(path, contents).map_err(|source| IoError::File { path: path.display().to_string(), source })
}

pub fn read_pge_file(path: &Path) -> Result<(Graph, Embedding), IoError> {
    read_pge(&read_file(path)?)
}

pub fn read_pge_graph_file(path: &Path) -> Result<Graph, IoError> {
    read_pge_graph(&read_file(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{dodecahedron, embedded_cycle};

    #[test]
    fn c5_round_trip() {
        let (g, e) = embedded_cycle(5);
        let text = write_pge(&g, &e);
        assert_eq!(text, "5 5\n0: 1 4\n1: 0 2\n2: 1 3\n3: 2 4\n4: 0 3\n");
        let (h, f) = read_pge(&text).unwrap();
        assert_eq!(h, g);
        assert_eq!(write_pge(&h, &f), text);
        assert_eq!(f.face_signature(), e.face_signature());
    }

    #[test]
    fn comments_and_isolated_vertices() {
        let text = "# two components\n3 1\n0: 1 # edge\n\n1: 0\n2:\n";
        let (g, e) = read_pge(text).unwrap();
        assert_eq!((g.n(), g.m(), e.component_count()), (3, 1, 2));
        assert_eq!(write_pge(&g, &e), "3 1\n0: 1\n1: 0\n2:\n");
    }

    #[test]
    fn dodecahedron_round_trip_is_stable() {
        let (g, e) = dodecahedron();
        let text = write_pge(&g, &e);
        let (h, f) = read_pge(&text).unwrap();
        assert_eq!(write_pge(&h, &f), text);
        assert_eq!(f.face_count(), 12);
    }

    fn parse_err(text: &str) -> ParseError {
        match read_pge(text) {
            Err(IoError::Parse(p)) => p,
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_rotation_line() {
        let p = parse_err("3 3\n0: 1 2\n1 0 2\n2: 0 1\n");
        assert_eq!((p.line, p.column), (3, 1));
        let p = parse_err("3 3\n0: 1 x\n1: 0 2\n2: 0 1\n");
        assert_eq!((p.line, p.column), (2, 6));
        let p = parse_err("3 3\n0: 1 2\n1: 0 2\n");
        assert!(p.message.contains("vertex 2"));
        let p = parse_err("3 2\n0: 1 2\n1: 0 2\n2: 0 1\n");
        assert!(p.message.contains("declares 2"));
        assert!(matches!(read_pge("2 1\n0: 1 1\n1: 0\n"), Err(IoError::Graph(_))));
    }

    #[test]
    fn non_planar_rotation_rejected() {
        // K4 with a rotation that traces fewer than 4 faces.
        let text = "4 6\n0: 1 2 3\n1: 0 2 3\n2: 0 1 3\n3: 0 1 2\n";
        assert!(matches!(read_pge(text), Err(IoError::Embedding(EmbeddingError::NotPlanarEmbedding { .. }))));
        assert_eq!(read_pge_graph(text).unwrap(), Graph::complete(4));
    }

    #[test]
    fn partition_files() {
        let text = write_partition(&[0, 1, 0]);
        assert_eq!(text, "0 0\n1 1\n2 0\n");
        assert_eq!(read_partition(&text, 3, 2).unwrap(), vec![0, 1, 0]);
        assert_eq!(read_partition("# c\n2 0\n0 1\n1 1\n", 3, 2).unwrap(), vec![1, 1, 0]);

        let e = read_partition("0 0\n2 1\n", 3, 2).unwrap_err();
        assert_eq!(e.message, "missing vertex 1");
        let e = read_partition("0 0\n1 2\n2 1\n", 3, 2).unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        assert!(read_partition("0 0\n0 1\n", 1, 2).is_err());
    }
}
