//! Instance generators: grids, random graphs, the two SAT reductions and
//! the comb benchmark family, each with the decomposition it is meant to be
//! solved on.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, TreeDecomposition};

/// A CNF formula over variables `1..=vars`; literal `-i` is `¬x_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfFormula {
    vars: usize,
    clauses: Vec<Vec<i32>>,
}

impl CnfFormula {
    pub fn new(vars: usize, clauses: Vec<Vec<i32>>) -> Result<Self> {
        for (j, c) in clauses.iter().enumerate() {
            if c.is_empty() {
                return Err(Error::Invalid(format!("clause {} is empty", j + 1)));
            }
            if let Some(&l) = c.iter().find(|&&l| l == 0 || l.unsigned_abs() as usize > vars) {
                return Err(Error::Invalid(format!("clause {} has literal {l} outside ±1..={vars}", j + 1)));
            }
        }
        Ok(CnfFormula { vars, clauses })
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn clauses(&self) -> &[Vec<i32>] {
        &self.clauses
    }

    pub fn max_clause_len(&self) -> usize {
        self.clauses.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// DIMACS: `c` comments, a `p cnf <vars> <clauses>` header, then
    /// 0-terminated clauses (which may span lines).
    pub fn parse_dimacs(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        let mut current = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let err = |msg: String| Error::Parse { line: idx + 1, msg };
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if line.starts_with('p') {
                let f: Vec<&str> = line.split_whitespace().collect();
                if header.is_some() || f.len() != 4 || f[1] != "cnf" {
                    return Err(err(format!("bad header `{line}`")));
                }
                let num = |s: &str| s.parse::<usize>().map_err(|_| err(format!("bad number `{s}`")));
                header = Some((num(f[2])?, num(f[3])?));
                continue;
            }
            if header.is_none() {
                return Err(err("clause before `p cnf` header".into()));
            }
            for tok in line.split_whitespace() {
                let l: i32 = tok.parse().map_err(|_| err(format!("bad literal `{tok}`")))?;
                if l == 0 {
                    clauses.push(std::mem::take(&mut current));
                } else {
                    current.push(l);
                }
            }
        }
        let (vars, count) = header.ok_or(Error::Parse {
            line: 0,
            msg: "missing `p cnf` header".into(),
        })?;
        if !current.is_empty() {
            clauses.push(current);
        }
        if clauses.len() != count {
            return Err(Error::Parse {
                line: 0,
                msg: format!("header declares {count} clauses but {} were read", clauses.len()),
            });
        }
        CnfFormula::new(vars, clauses)
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                write!(out, "{l} ").unwrap();
            }
            out.push_str("0\n");
        }
        out
    }

    /// Every clause padded to `k` literals by repeating its last literal.
    pub fn padded(&self, k: usize) -> Result<CnfFormula> {
        if k < self.max_clause_len() {
            return Err(Error::Invalid(format!(
                "clause width {k} is below the longest clause ({})",
                self.max_clause_len()
            )));
        }
        let clauses = self
            .clauses
            .iter()
            .map(|c| {
                let mut c = c.clone();
                let last = *c.last().expect("clauses are non-empty");
                c.resize(k, last);
                c
            })
            .collect();
        CnfFormula::new(self.vars, clauses)
    }
}

/// Seeded random `k`-CNF with distinct variables inside each clause (when
/// `k ≤ vars`).
pub fn random_cnf(vars: usize, clauses: usize, k: usize, seed: u64) -> Result<CnfFormula> {
    if vars == 0 || k == 0 {
        return Err(Error::Invalid("random CNF needs at least one variable and literal".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cs = (0..clauses)
        .map(|_| {
            let mut pool: Vec<i32> = (1..=vars as i32).collect();
            (0..k)
                .map(|i| {
                    let var = if i < vars {
                        let pick = rng.random_range(i..vars);
                        pool.swap(i, pick);
                        pool[i]
                    } else {
                        rng.random_range(1..=vars as i32)
                    };
                    if rng.random_bool(0.5) { var } else { -var }
                })
                .collect()
        })
        .collect();
    CnfFormula::new(vars, cs)
}

/// A generated instance: graph, the decomposition to solve it on, the
/// target size and a role tag per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionOutput {
    pub graph: Graph,
    pub decomposition: TreeDecomposition,
    pub target_size: usize,
    pub roles: Vec<String>,
    /// Clause width after padding.
    pub k: usize,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    schema: u32,
    target_size: usize,
    k: usize,
    roles: &'a [String],
}

impl ReductionOutput {
    /// JSON sidecar with the target size and roles (1-based vertex order).
    pub fn sidecar_json(&self) -> String {
        serde_json::to_string_pretty(&Sidecar {
            schema: 1,
            target_size: self.target_size,
            k: self.k,
            roles: &self.roles,
        })
        .expect("sidecar serializes")
    }
}

struct Named {
    g: Graph,
    roles: Vec<String>,
}

impl Named {
    fn vertex(&mut self, role: String) -> usize {
        self.roles.push(role);
        self.g.add_vertex()
    }

    fn edge(&mut self, u: usize, v: usize) {
        self.g.add_edge(u, v).expect("construction edges are valid");
    }
}

fn subset_label(mask: usize, k: usize) -> String {
    let items: Vec<String> = (0..k).filter(|l| mask >> l & 1 == 1).map(|l| (l + 1).to_string()).collect();
    format!("{{{}}}", items.join(","))
}

fn prepare(phi: &CnfFormula, k: Option<usize>) -> Result<(CnfFormula, usize)> {
    if phi.clauses.is_empty() {
        return Err(Error::Invalid("empty formula".into()));
    }
    let k = k.unwrap_or_else(|| phi.max_clause_len());
    if k > 16 {
        return Err(Error::OverCap {
            what: "clause width",
            n: k,
            cap: 16,
        });
    }
    Ok((phi.padded(k)?, k))
}

/// Reduction to Reflexive-AllOff (target `n + m + 1`, path decomposition of
/// width at most `2^k + k + n`).
pub fn gen_reflexive_alloff(phi: &CnfFormula, k: Option<usize>) -> Result<ReductionOutput> {
    let (phi, k) = prepare(phi, k)?;
    let n = phi.vars;
    let mut b = Named { g: Graph::new(0), roles: Vec::new() };
    let v: Vec<usize> = (1..=n).map(|i| b.vertex(format!("v_{i}"))).collect();
    let vbar: Vec<usize> = (1..=n).map(|i| b.vertex(format!("vbar_{i}"))).collect();
    for i in 0..n {
        b.edge(v[i], vbar[i]);
    }
    let q: Vec<usize> = (0..3).map(|i| b.vertex(format!("q_{i}"))).collect();
    b.edge(q[0], q[1]);
    b.edge(q[1], q[2]);
    let mut clause_bags = Vec::new();
    for (j, clause) in phi.clauses.iter().enumerate() {
        let jj = j + 1;
        let t: Vec<usize> = (1..=k).map(|l| b.vertex(format!("t^{jj}_{l}"))).collect();
        let subsets: Vec<usize> = (0..(1usize << k) - 1)
            .map(|mask| {
                let s = b.vertex(format!("s^{jj}_{}", subset_label(mask, k)));
                for (l, &tl) in t.iter().enumerate() {
                    if mask >> l & 1 == 1 {
                        b.edge(s, tl);
                    }
                }
                s
            })
            .collect();
        for (i, &a) in subsets.iter().enumerate() {
            for &c in &subsets[i + 1..] {
                b.edge(a, c);
            }
        }
        for (l, &lit) in clause.iter().enumerate() {
            let var = lit.unsigned_abs() as usize - 1;
            b.edge(t[l], v[var]);
            if lit < 0 {
                b.edge(t[l], q[1]);
            }
        }
        let mut bag = t;
        bag.extend(subsets);
        clause_bags.push(bag);
    }
    let mut shared = v.clone();
    shared.push(q[1]);
    let mut bags = Vec::new();
    for &x in &vbar {
        bags.push(vec![x]);
    }
    bags.extend(clause_bags);
    bags.push(vec![q[0], q[2]]);
    for bag in &mut bags {
        bag.extend_from_slice(&shared);
    }
    let decomposition = TreeDecomposition::path(bags)?;
    Ok(ReductionOutput {
        graph: b.g,
        decomposition,
        target_size: n + phi.clauses.len() + 1,
        roles: b.roles,
        k,
    })
}

/// Reduction to AllOff (target `2m + 2n`, path decomposition of width at
/// most `n + k + 1`).
pub fn gen_alloff(phi: &CnfFormula, k: Option<usize>) -> Result<ReductionOutput> {
    let (phi, k) = prepare(phi, k)?;
    let n = phi.vars;
    let mut b = Named { g: Graph::new(0), roles: Vec::new() };
    let v: Vec<usize> = (1..=n).map(|i| b.vertex(format!("v_{i}"))).collect();
    let mut bags = Vec::new();
    for i in 1..=n {
        let w = b.vertex(format!("w_{i}"));
        let vbar = b.vertex(format!("vbar_{i}"));
        b.edge(v[i - 1], w);
        b.edge(w, vbar);
        bags.push(vec![w, vbar]);
    }
    for (j, clause) in phi.clauses.iter().enumerate() {
        let jj = j + 1;
        let t: Vec<usize> = (1..=k).map(|l| b.vertex(format!("t^{jj}_{l}"))).collect();
        let h = b.vertex(format!("h^{jj}"));
        let mut gadget = t.clone();
        gadget.push(h);
        for mask in 0..(1usize << k) - 1 {
            let s = b.vertex(format!("s^{jj}_{}", subset_label(mask, k)));
            b.edge(s, h);
            for (l, &tl) in t.iter().enumerate() {
                if mask >> l & 1 == 1 {
                    b.edge(s, tl);
                }
            }
            let mut bag = gadget.clone();
            bag.push(s);
            bags.push(bag);
        }
        for (l, &lit) in clause.iter().enumerate() {
            let var = lit.unsigned_abs() as usize - 1;
            b.edge(t[l], v[var]);
            if lit < 0 {
                b.edge(t[l], h);
            }
        }
    }
    for bag in &mut bags {
        bag.extend_from_slice(&v);
    }
    let decomposition = TreeDecomposition::path(bags)?;
    Ok(ReductionOutput {
        graph: b.g,
        decomposition,
        target_size: 2 * phi.clauses.len() + 2 * n,
        roles: b.roles,
        k,
    })
}

/// `rows × cols` grid (vertex `r·cols + c`) with a sweep path decomposition
/// of width `min(rows, cols)`.
pub fn gen_grid(rows: usize, cols: usize) -> Result<(Graph, TreeDecomposition)> {
    if rows == 0 || cols == 0 {
        return Err(Error::Invalid("grid needs at least one row and column".into()));
    }
    let mut g = Graph::new(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                g.add_edge(r * cols + c, r * cols + c + 1)?;
            }
            if r + 1 < rows {
                g.add_edge(r * cols + c, (r + 1) * cols + c)?;
            }
        }
    }
    let short = rows.min(cols);
    let long = rows.max(cols);
    let id = |a: usize, b: usize| if rows <= cols { b * cols + a } else { a * cols + b };
    let order: Vec<usize> = (0..long).flat_map(|a| (0..short).map(move |b| id(a, b))).collect();
    let total = order.len();
    let bags: Vec<Vec<usize>> = if total <= short + 1 {
        vec![order]
    } else {
        (0..total - short).map(|p| order[p..=p + short].to_vec()).collect()
    };
    Ok((g, TreeDecomposition::path(bags)?))
}

/// Seeded Erdős–Rényi graph: each pair `u < v` independently with
/// probability `p`.
pub fn gen_random(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Invalid(format!("edge probability {p} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                g.add_edge(u, v)?;
            }
        }
    }
    Ok(g)
}

/// Comb benchmark instance for modulus `m` and decomposition width `w`.
///
/// The spine is a path `b_0 … b_{w−2}`. Each spine vertex carries
/// `m − 1` whiskers `b–x–y` on each of two sides; under `σ = {0}, ρ = {1}`
/// (mod `m`) every whisker forces its spine vertex unselected and adds 0
/// or 1 to its count, so each side realizes every count vector on the
/// spine. The decomposition has the spine bag at the root and one path of
/// `spine ∪ {x, y}` bags per side, so the solver meets a single join of two
/// languages of size `m^{w−1}`.
pub fn gen_comb(m: u32, w: usize) -> Result<(Graph, TreeDecomposition)> {
    if w < 2 || m < 2 {
        return Err(Error::Invalid("comb needs width at least 2 and modulus at least 2".into()));
    }
    let spine = w - 1;
    let mut g = Graph::new(spine);
    for i in 1..spine {
        g.add_edge(i - 1, i)?;
    }
    let base: Vec<usize> = (0..spine).collect();
    let mut bags = vec![base.clone()];
    let mut edges = Vec::new();
    for _side in 0..2 {
        let mut prev = 0;
        for b in 0..spine {
            for _ in 1..m {
                let x = g.add_vertex();
                let y = g.add_vertex();
                g.add_edge(b, x)?;
                g.add_edge(x, y)?;
                let mut bag = base.clone();
                bag.extend([x, y]);
                bags.push(bag);
                edges.push((prev, bags.len() - 1));
                prev = bags.len() - 1;
            }
        }
    }
    Ok((g, TreeDecomposition::new(bags, &edges)?))
}

/// The cycle `C_n`.
pub fn gen_cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::Invalid("a cycle needs at least three vertices".into()));
    }
    Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimacs_round_trip() {
        let phi = CnfFormula::parse_dimacs("c demo\np cnf 3 2\n1 -2 0\n2 3\n-1 0\n").unwrap();
        assert_eq!(phi.clauses(), &[vec![1, -2], vec![2, 3, -1]]);
        assert_eq!(CnfFormula::parse_dimacs(&phi.to_dimacs()).unwrap(), phi);
        assert!(CnfFormula::parse_dimacs("p cnf 1 1\n2 0\n").is_err());
        assert!(CnfFormula::parse_dimacs("p cnf 1 2\n1 0\n").is_err());
        assert!(CnfFormula::parse_dimacs("1 0\n").is_err());
    }

    #[test]
    fn padding_duplicates_last_literal() {
        let phi = CnfFormula::new(2, vec![vec![1], vec![-1, 2]]).unwrap();
        assert_eq!(phi.padded(3).unwrap().clauses(), &[vec![1, 1, 1], vec![-1, 2, 2]]);
        assert!(phi.padded(1).is_err());
    }

    #[test]
    fn reflexive_counts() {
        let phi = CnfFormula::new(2, vec![vec![1, 2]]).unwrap();
        let out = gen_reflexive_alloff(&phi, None).unwrap();
        assert_eq!(out.graph.n(), 12);
        assert_eq!(out.target_size, 4);
        out.decomposition.validate(&out.graph).unwrap();
        assert!(out.decomposition.width() <= 4 + 2 + 2);
        assert_eq!(out.roles.len(), 12);
    }

    #[test]
    fn plain_counts() {
        let phi = CnfFormula::new(2, vec![vec![1, 2]]).unwrap();
        let out = gen_alloff(&phi, None).unwrap();
        assert_eq!(out.graph.n(), 12);
        assert_eq!(out.target_size, 6);
        out.decomposition.validate(&out.graph).unwrap();
        assert!(out.decomposition.width() <= 2 + 2 + 1);
    }

    #[test]
    fn empty_formula_rejected() {
        let phi = CnfFormula::new(2, vec![]).unwrap();
        assert!(gen_reflexive_alloff(&phi, None).is_err());
        assert!(gen_alloff(&phi, None).is_err());
    }

    #[test]
    fn grids() {
        let (g, td) = gen_grid(1, 1).unwrap();
        assert_eq!((g.n(), td.width()), (1, 0));
        let (g, td) = gen_grid(2, 2).unwrap();
        td.validate(&g).unwrap();
        assert_eq!((g.edge_count(), td.width()), (4, 2));
        let (g, td) = gen_grid(5, 5).unwrap();
        td.validate(&g).unwrap();
        assert_eq!((g.n(), g.edge_count(), td.width()), (25, 40, 5));
        for (r, c) in [(2, 7), (7, 3), (1, 5)] {
            let (g, td) = gen_grid(r, c).unwrap();
            td.validate(&g).unwrap();
            assert_eq!(td.width(), r.min(c));
        }
    }

    #[test]
    fn random_graphs() {
        assert_eq!(gen_random(6, 0.0, 1).unwrap().edge_count(), 0);
        assert_eq!(gen_random(6, 1.0, 1).unwrap().edge_count(), 15);
        assert_eq!(gen_random(10, 0.4, 7).unwrap(), gen_random(10, 0.4, 7).unwrap());
        assert!(gen_random(3, 1.5, 0).is_err());
    }

    #[test]
    fn comb_shape() {
        let (g, td) = gen_comb(3, 5).unwrap();
        td.validate(&g).unwrap();
        assert_eq!(td.width(), 5);
        assert_eq!(g.n(), 4 + 2 * 4 * 2 * 2);
        assert!(gen_comb(3, 1).is_err());
    }

    #[test]
    fn random_cnf_is_deterministic() {
        let a = random_cnf(5, 6, 3, 11).unwrap();
        assert_eq!(a, random_cnf(5, 6, 3, 11).unwrap());
        assert!(a.clauses().iter().all(|c| c.len() == 3));
    }
}
