//! Simple undirected graphs and their tree decompositions.
//!
//! Vertices are `0..n` internally; the PACE text formats use `1..=n` and
//! the conversion happens only in the parsers and writers.

mod minfill;
mod nice;
mod td;

pub use minfill::heuristic_decomposition;
pub use nice::{make_nice, NiceNode, NiceTreeDecomposition, NodeKind};
pub use td::TreeDecomposition;

use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    /// Builds a graph from 0-based edges, dropping duplicates.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Graph::new(n);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Adds `{u, v}`; returns false if it was already present.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<bool> {
        let n = self.n();
        if u >= n || v >= n {
            return Err(Error::Invalid(format!("edge ({u}, {v}) out of range for n = {n}")));
        }
        if u == v {
            return Err(Error::Invalid(format!("self-loop at vertex {u}")));
        }
        match self.adj[u].binary_search(&v) {
            Ok(_) => Ok(false),
            Err(pos) => {
                self.adj[u].insert(pos, v);
                let pos = self.adj[v].binary_search(&u).unwrap_err();
                self.adj[v].insert(pos, u);
                self.edge_count += 1;
                Ok(true)
            }
        }
    }

    pub fn add_vertex(&mut self) -> usize {
        self.adj.push(Vec::new());
        self.adj.len() - 1
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges `(u, v)` with `u < v` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    /// Induced subgraph on `vertices`; vertex `vertices[i]` becomes `i`.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.n()];
        for (i, &v) in vertices.iter().enumerate() {
            index[v] = i;
        }
        let mut g = Graph::new(vertices.len());
        for (i, &v) in vertices.iter().enumerate() {
            for &w in &self.adj[v] {
                let j = index[w];
                if j != usize::MAX && i < j {
                    g.add_edge(i, j).expect("induced edge in range");
                }
            }
        }
        g
    }

    /// Parses the PACE `.gr` format (`p tw n m` header, then `u v` lines).
    pub fn parse_gr(text: &str) -> Result<Self> {
        let mut graph: Option<Graph> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim_end_matches('\r').trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            let err = |msg: String| Error::Parse { line: line_no, msg };
            let fields: Vec<&str> = line.split_whitespace().collect();
            match graph.as_mut() {
                None => {
                    if fields.len() != 4 || fields[0] != "p" || fields[1] != "tw" {
                        return Err(err(format!("expected header `p tw <n> <m>`, got `{line}`")));
                    }
                    let n: usize = fields[2]
                        .parse()
                        .map_err(|_| err(format!("bad vertex count `{}`", fields[2])))?;
                    fields[3]
                        .parse::<usize>()
                        .map_err(|_| err(format!("bad edge count `{}`", fields[3])))?;
                    graph = Some(Graph::new(n));
                }
                Some(g) => {
                    if fields.len() != 2 {
                        return Err(err(format!("expected an edge `u v`, got `{line}`")));
                    }
                    let n = g.n();
                    let parse_v = |s: &str| -> Result<usize> {
                        let v: usize = s.parse().map_err(|_| err(format!("bad vertex `{s}`")))?;
                        if v == 0 || v > n {
                            return Err(err(format!("vertex {v} out of range 1..={n}")));
                        }
                        Ok(v - 1)
                    };
                    let u = parse_v(fields[0])?;
                    let v = parse_v(fields[1])?;
                    if u == v {
                        return Err(err(format!("self-loop at vertex {}", u + 1)));
                    }
                    g.add_edge(u, v)?;
                }
            }
        }
        graph.ok_or(Error::Parse {
            line: 0,
            msg: "missing `p tw` header".into(),
        })
    }

    pub fn to_gr(&self) -> String {
        let mut out = format!("p tw {} {}\n", self.n(), self.edge_count);
        for (u, v) in self.edges() {
            writeln!(out, "{} {}", u + 1, v + 1).unwrap();
        }
        out
    }
}

/// A graph together with an ordered list of distinct portal vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphWithPortals {
    pub graph: Graph,
    pub portals: Vec<usize>,
}

impl GraphWithPortals {
    pub fn new(graph: Graph, portals: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; graph.n()];
        for &p in &portals {
            if p >= graph.n() {
                return Err(Error::Invalid(format!("portal {p} out of range")));
            }
            if std::mem::replace(&mut seen[p], true) {
                return Err(Error::Invalid(format!("portal {p} listed twice")));
            }
        }
        Ok(GraphWithPortals { graph, portals })
    }

    /// One 1-based vertex id per line.
    pub fn portals_text(&self) -> String {
        self.portals.iter().map(|p| format!("{}\n", p + 1)).collect()
    }

    pub fn parse_portals(text: &str, graph: Graph) -> Result<Self> {
        let mut portals = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            let v: usize = line.parse().map_err(|_| Error::Parse {
                line: idx + 1,
                msg: format!("bad portal `{line}`"),
            })?;
            if v == 0 {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: "portal ids are 1-based".into(),
                });
            }
            portals.push(v - 1);
        }
        GraphWithPortals::new(graph, portals)
    }
}
