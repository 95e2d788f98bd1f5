//! Line-oriented edge-list format.
//!
//! ```text
//! p=4
//! 0 -> 1
//! 1 -- 2
//! 2 -> 3 : 0.75
//! ```
//!
//! The header gives the node count. Each further line is one edge, directed
//! (`->`) or undirected (`--`), optionally followed by `: weight`. Blank lines
//! and lines starting with `#` are ignored.

use std::fmt;

use super::{Dag, EdgeState, Pdag};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    Directed,
    Undirected,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeRecord {
    pub u: usize,
    pub v: usize,
    pub kind: EdgeKind,
    pub weight: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeList {
    pub p: usize,
    pub edges: Vec<EdgeRecord>,
}

pub fn parse_edge_list(text: &str) -> Result<EdgeList> {
    let mut p = None;
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |msg: &str| Error::Parse {
            line: line_no,
            msg: msg.to_string(),
        };
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("p=") {
            if p.is_some() {
                return Err(err("duplicate header"));
            }
            p = Some(rest.trim().parse::<usize>().map_err(|_| err("bad node count"))?);
            continue;
        }
        if p.is_none() {
            return Err(err("edge before the p=<n> header"));
        }
        let (body, weight) = match line.split_once(':') {
            Some((b, w)) => (
                b.trim(),
                Some(w.trim().parse::<f64>().map_err(|_| err("bad weight"))?),
            ),
            None => (line, None),
        };
        let (lhs, rhs, kind) = if let Some((a, b)) = body.split_once("->") {
            (a, b, EdgeKind::Directed)
        } else if let Some((a, b)) = body.split_once("--") {
            (a, b, EdgeKind::Undirected)
        } else {
            return Err(err("expected `u -> v` or `u -- v`"));
        };
        let u = lhs.trim().parse().map_err(|_| err("bad node index"))?;
        let v = rhs.trim().parse().map_err(|_| err("bad node index"))?;
        edges.push(EdgeRecord { u, v, kind, weight });
    }
    let p = p.ok_or(Error::Parse {
        line: 0,
        msg: "missing p=<n> header".into(),
    })?;
    Ok(EdgeList { p, edges })
}

impl Dag {
    pub fn from_edge_list(list: &EdgeList) -> Result<Self> {
        if let Some(e) = list.edges.iter().find(|e| e.kind == EdgeKind::Undirected) {
            return Err(Error::InvalidQuery(format!(
                "undirected edge {} -- {} in a DAG",
                e.u, e.v
            )));
        }
        Dag::new(list.p, list.edges.iter().map(|e| (e.u, e.v)))
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_edge_list(&parse_edge_list(text)?)
    }
}

impl Pdag {
    pub fn from_edge_list(list: &EdgeList) -> Result<Self> {
        let pick = |kind| {
            list.edges
                .iter()
                .filter(move |e| e.kind == kind)
                .map(|e| (e.u, e.v))
        };
        Pdag::new(list.p, pick(EdgeKind::Directed), pick(EdgeKind::Undirected))
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_edge_list(&parse_edge_list(text)?)
    }
}

impl fmt::Display for Dag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p={}", self.node_count())?;
        for (u, v) in self.edges() {
            writeln!(f, "{u} -> {v}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Pdag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p={}", self.node_count())?;
        for (u, v, s) in self.pairs() {
            match s {
                EdgeState::Forward => writeln!(f, "{u} -> {v}")?,
                EdgeState::Backward => writeln!(f, "{v} -> {u}")?,
                EdgeState::Undirected => writeln!(f, "{u} -- {v}")?,
                EdgeState::Absent => {}
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_mixed_list() {
        let list = parse_edge_list("# comment\np=3\n0 -> 1\n\n2 -- 1 : 0.5\n").unwrap();
        assert_eq!(list.p, 3);
        assert_eq!(list.edges.len(), 2);
        assert_eq!(list.edges[1].kind, EdgeKind::Undirected);
        assert_eq!(list.edges[1].weight, Some(0.5));
        let g = Pdag::from_edge_list(&list).unwrap();
        assert!(g.is_directed(0, 1));
        assert!(g.is_undirected(1, 2));
    }

    #[test]
    fn pdag_text_is_canonical() {
        let g = Pdag::new(4, [(3, 1), (0, 2)], [(1, 2)]).unwrap();
        let text = g.to_string();
        assert_eq!(text, "p=4\n0 -> 2\n1 -- 2\n3 -> 1\n");
        assert_eq!(Pdag::parse(&text).unwrap(), g);
    }

    #[test]
    fn dag_rejects_undirected() {
        assert!(Dag::parse("p=2\n0 -- 1\n").is_err());
        let g = Dag::parse("p=3\n2 -> 0\n").unwrap();
        assert!(g.has_edge(2, 0));
    }

    #[test]
    fn parse_errors_carry_line() {
        assert!(matches!(
            parse_edge_list("p=2\n0 => 1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(parse_edge_list("0 -> 1\n").is_err());
        assert!(parse_edge_list("").is_err());
        assert!(parse_edge_list("p=2\np=3\n").is_err());
        assert!(parse_edge_list("p=2\n0 -> x\n").is_err());
    }
}
