use std::collections::VecDeque;
use std::fmt::Write as _;

use super::Graph;
use crate::error::{Error, Result};

/// A tree decomposition: bags of (0-based) vertices on the nodes of a tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    bags: Vec<Vec<usize>>,
    tree_adj: Vec<Vec<usize>>,
}

impl TreeDecomposition {
    /// Builds a decomposition from bags and tree edges; bags are sorted and
    /// deduplicated. Call [`validate`](Self::validate) before trusting it.
    pub fn new(mut bags: Vec<Vec<usize>>, edges: &[(usize, usize)]) -> Result<Self> {
        for bag in &mut bags {
            bag.sort_unstable();
            bag.dedup();
        }
        let mut tree_adj = vec![Vec::new(); bags.len()];
        for &(a, b) in edges {
            if a >= bags.len() || b >= bags.len() {
                return Err(Error::Decomposition(format!(
                    "tree edge ({}, {}) references a missing bag",
                    a + 1,
                    b + 1
                )));
            }
            if a == b {
                return Err(Error::Decomposition(format!("tree loop at bag {}", a + 1)));
            }
            tree_adj[a].push(b);
            tree_adj[b].push(a);
        }
        for ns in &mut tree_adj {
            ns.sort_unstable();
        }
        Ok(TreeDecomposition { bags, tree_adj })
    }

    /// A path decomposition: consecutive bags joined in order.
    pub fn path(bags: Vec<Vec<usize>>) -> Result<Self> {
        let edges: Vec<_> = (1..bags.len()).map(|i| (i - 1, i)).collect();
        TreeDecomposition::new(bags, &edges)
    }

    pub fn bags(&self) -> &[Vec<usize>] {
        &self.bags
    }

    pub fn bag(&self, node: usize) -> &[usize] {
        &self.bags[node]
    }

    pub fn node_count(&self) -> usize {
        self.bags.len()
    }

    pub fn tree_neighbors(&self, node: usize) -> &[usize] {
        &self.tree_adj[node]
    }

    pub fn tree_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.tree_adj
            .iter()
            .enumerate()
            .flat_map(|(a, ns)| ns.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
    }

    pub fn max_bag_size(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Largest bag size minus one (zero for an empty decomposition).
    pub fn width(&self) -> usize {
        self.max_bag_size().saturating_sub(1)
    }

    /// Checks the tree shape and the three decomposition axioms against `g`.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        let nodes = self.bags.len();
        if nodes == 0 {
            if g.n() == 0 {
                return Ok(());
            }
            return Err(Error::Decomposition(format!(
                "T1: no bags, but vertex 1 of {} is uncovered",
                g.n()
            )));
        }
        let edge_total: usize = self.tree_adj.iter().map(Vec::len).sum::<usize>() / 2;
        let mut seen = vec![false; nodes];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(a) = queue.pop_front() {
            for &b in &self.tree_adj[a] {
                if !seen[b] {
                    seen[b] = true;
                    reached += 1;
                    queue.push_back(b);
                }
            }
        }
        if reached != nodes {
            return Err(Error::Decomposition(format!(
                "decomposition tree is disconnected ({reached} of {nodes} bags reachable from bag 1)"
            )));
        }
        if edge_total != nodes - 1 {
            return Err(Error::Decomposition(format!(
                "decomposition graph has {edge_total} edges on {nodes} bags; not a tree"
            )));
        }

        let n = g.n();
        let mut holders: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (node, bag) in self.bags.iter().enumerate() {
            for &v in bag {
                if v >= n {
                    return Err(Error::Decomposition(format!(
                        "bag {} contains vertex {} outside 1..={n}",
                        node + 1,
                        v + 1
                    )));
                }
                holders[v].push(node);
            }
        }
        if let Some(v) = holders.iter().position(Vec::is_empty) {
            return Err(Error::Decomposition(format!("T1: vertex {} is in no bag", v + 1)));
        }
        for (u, v) in g.edges() {
            let covered = holders[u]
                .iter()
                .any(|&node| self.bags[node].binary_search(&v).is_ok());
            if !covered {
                return Err(Error::Decomposition(format!(
                    "T2: edge {}-{} is in no bag",
                    u + 1,
                    v + 1
                )));
            }
        }
        let mut mark = vec![usize::MAX; nodes];
        for (v, hs) in holders.iter().enumerate() {
            for &node in hs {
                mark[node] = v;
            }
            let mut stack = vec![hs[0]];
            let mut visited = vec![hs[0]];
            mark[hs[0]] = usize::MAX - 1;
            while let Some(a) = stack.pop() {
                for &b in &self.tree_adj[a] {
                    if mark[b] == v {
                        mark[b] = usize::MAX - 1;
                        visited.push(b);
                        stack.push(b);
                    }
                }
            }
            if visited.len() != hs.len() {
                return Err(Error::Decomposition(format!(
                    "T3: bags containing vertex {} are not connected",
                    v + 1
                )));
            }
            for &node in hs {
                mark[node] = usize::MAX;
            }
        }
        Ok(())
    }

    /// Parses the PACE `.td` format and validates it against `g`.
    pub fn parse_td(text: &str, g: &Graph) -> Result<Self> {
        let mut header: Option<(usize, usize, usize)> = None;
        let mut bags: Vec<Option<Vec<usize>>> = Vec::new();
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim_end_matches('\r').trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            let err = |msg: String| Error::Parse { line: line_no, msg };
            let num = |s: &str| -> Result<usize> {
                s.parse().map_err(|_| err(format!("bad number `{s}`")))
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            let Some((count, _, n)) = header else {
                if fields.len() != 5 || fields[0] != "s" || fields[1] != "td" {
                    return Err(err(format!(
                        "expected header `s td <bags> <max_bag_size> <n>`, got `{line}`"
                    )));
                }
                let h = (num(fields[2])?, num(fields[3])?, num(fields[4])?);
                if h.2 != g.n() {
                    return Err(err(format!(
                        "header declares {} vertices but the graph has {}",
                        h.2,
                        g.n()
                    )));
                }
                bags = vec![None; h.0];
                header = Some(h);
                continue;
            };
            let bag_id = |s: &str| -> Result<usize> {
                let id = num(s)?;
                if id == 0 || id > count {
                    return Err(err(format!("bag id {id} out of range 1..={count}")));
                }
                Ok(id - 1)
            };
            if fields[0] == "b" {
                if fields.len() < 2 {
                    return Err(err("bag line without an id".into()));
                }
                let id = bag_id(fields[1])?;
                let mut bag = Vec::with_capacity(fields.len() - 2);
                for f in &fields[2..] {
                    let v = num(f)?;
                    if v == 0 || v > n {
                        return Err(err(format!("vertex {v} out of range 1..={n}")));
                    }
                    bag.push(v - 1);
                }
                if bags[id].replace(bag).is_some() {
                    return Err(err(format!("bag {} defined twice", id + 1)));
                }
            } else {
                if fields.len() != 2 {
                    return Err(err(format!("expected a tree edge `i j`, got `{line}`")));
                }
                edges.push((bag_id(fields[0])?, bag_id(fields[1])?));
            }
        }
        let Some((_, declared_max, _)) = header else {
            return Err(Error::Parse {
                line: 0,
                msg: "missing `s td` header".into(),
            });
        };
        let bags = bags
            .into_iter()
            .enumerate()
            .map(|(i, b)| {
                b.ok_or_else(|| Error::Decomposition(format!("bag {} declared but never defined", i + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        let td = TreeDecomposition::new(bags, &edges)?;
        if td.max_bag_size() != declared_max {
            return Err(Error::Decomposition(format!(
                "header declares max bag size {declared_max} but the largest bag has {}",
                td.max_bag_size()
            )));
        }
        td.validate(g)?;
        Ok(td)
    }

    pub fn to_td(&self, n: usize) -> String {
        let mut out = format!("s td {} {} {}\n", self.bags.len(), self.max_bag_size(), n);
        for (i, bag) in self.bags.iter().enumerate() {
            write!(out, "b {}", i + 1).unwrap();
            for v in bag {
                write!(out, " {}", v + 1).unwrap();
            }
            out.push('\n');
        }
        for (a, b) in self.tree_edges() {
            writeln!(out, "{} {}", a + 1, b + 1).unwrap();
        }
        out
    }
}
