//! Hamming-weight relation gadgets and their verification by enumeration.
//!
//! Scope vertices are `0..k` and form the portal list; gadget vertices
//! follow. No gadget ever joins two scope vertices.

use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphWithPortals};
use crate::lang::Language;
use crate::oracle::realized_language;
use crate::residue::{Classification, ProblemSpec};

/// `HW^k_{∈τ}`: accepts a scope selection iff its weight lies in `τ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HwRelation {
    arity: usize,
    weights: Vec<usize>,
}

impl HwRelation {
    /// Weights outside `[0, k]` are dropped.
    pub fn new(arity: usize, weights: impl IntoIterator<Item = usize>) -> Self {
        let mut w: Vec<usize> = weights.into_iter().filter(|&t| t <= arity).collect();
        w.sort_unstable();
        w.dedup();
        HwRelation { arity, weights: w }
    }

    pub fn exactly_one(arity: usize) -> Self {
        HwRelation::new(arity, [1])
    }

    /// The relation the gadget of [`build_hw_gadget`] realizes: weights `t`
    /// with `t + min ρ − 1 ∈ ρ`, i.e. `t ≡ 1 (mod m)`.
    pub fn for_gadget(spec: ProblemSpec, arity: usize) -> Self {
        let m = spec.modulus() as usize;
        HwRelation::new(arity, (0..=arity).filter(|t| t % m == 1 % m))
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn weights(&self) -> &[usize] {
        &self.weights
    }

    pub fn accepts(&self, weight: usize) -> bool {
        self.weights.binary_search(&weight).is_ok()
    }
}

impl fmt::Display for HwRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ws: Vec<String> = self.weights.iter().map(usize::to_string).collect();
        write!(f, "HW^{}_{{{}}}", self.arity, ws.join(","))
    }
}

/// `{x_r : r ∈ R}` with `σ_0` at selected scope positions and `ρ_0`
/// elsewhere.
pub fn relation_language(rel: &HwRelation, m: u32) -> Result<Language> {
    let k = rel.arity;
    if k > 63 {
        return Err(Error::OverCap {
            what: "relation arity",
            n: k,
            cap: 63,
        });
    }
    let mut l = Language::new(k, m)?;
    for mask in 0u64..(1u64 << k) {
        if rel.accepts(mask.count_ones() as usize) {
            l.insert_packed(mask, 0);
        }
    }
    Ok(l)
}

/// Which construction applies to a Difficult spec.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GadgetCase {
    /// `min ρ ≥ 2`.
    RhoAtLeastTwo,
    /// `min ρ = 1`, `min σ ≥ 2`.
    SigmaAtLeastTwo,
    /// `min ρ = 1`, `min σ = 1`.
    SigmaOne,
    /// `min ρ = 1`, `min σ = 0`.
    SigmaZero,
}

pub fn gadget_case(spec: ProblemSpec) -> Result<GadgetCase> {
    if spec.classify()? != Classification::Difficult {
        return Err(Error::InvalidSpec(format!("{spec} is easy; the gadget hypotheses fail")));
    }
    let (s, r) = (spec.sigma.min(), spec.rho.min());
    Ok(match (r, s) {
        (r, _) if r >= 2 => GadgetCase::RhoAtLeastTwo,
        (_, s) if s >= 2 => GadgetCase::SigmaAtLeastTwo,
        (_, 1) => GadgetCase::SigmaOne,
        _ => GadgetCase::SigmaZero,
    })
}

struct Builder {
    g: Graph,
}

impl Builder {
    fn vertex(&mut self) -> usize {
        self.g.add_vertex()
    }

    fn edge(&mut self, u: usize, v: usize) {
        self.g.add_edge(u, v).expect("gadget edges are valid");
    }

    /// A clique on `size` new vertices, returned in creation order.
    fn clique(&mut self, size: usize) -> Vec<usize> {
        let vs: Vec<usize> = (0..size).map(|_| self.vertex()).collect();
        for (i, &a) in vs.iter().enumerate() {
            for &b in &vs[i + 1..] {
                self.edge(a, b);
            }
        }
        vs
    }
}

/// Builds the gadget realizing [`HwRelation::for_gadget`] on `k` scope
/// vertices.
pub fn build_hw_gadget(spec: ProblemSpec, k: usize) -> Result<GraphWithPortals> {
    let case = gadget_case(spec)?;
    let s_min = spec.sigma.min() as usize;
    let r_min = spec.rho.min() as usize;
    let mut b = Builder { g: Graph::new(k) };
    let v = b.vertex();
    for u in 0..k {
        b.edge(v, u);
    }
    match case {
        GadgetCase::RhoAtLeastTwo => {
            for _ in 0..r_min - 1 {
                let clique = b.clique(s_min + 1);
                b.edge(v, clique[0]);
            }
        }
        GadgetCase::SigmaAtLeastTwo => {
            let r = r_min;
            let z = b.vertex();
            let ps: Vec<usize> = (0..r).map(|_| b.vertex()).collect();
            b.edge(v, z);
            for &p in &ps {
                let clique = b.clique(s_min + 1);
                b.edge(z, clique[0]);
                b.edge(clique[1], p);
            }
        }
        GadgetCase::SigmaOne => {
            let (r, s) = (r_min, s_min);
            let p = b.vertex();
            b.edge(v, p);
            for _ in 0..r {
                let q = b.vertex();
                let w = b.vertex();
                b.edge(p, q);
                b.edge(q, w);
                for _ in 0..s {
                    let u = b.vertex();
                    let x = b.vertex();
                    b.edge(q, u);
                    b.edge(u, x);
                }
            }
        }
        GadgetCase::SigmaZero => {
            let c = b.vertex();
            let leaves: Vec<usize> = (0..3).map(|_| b.vertex()).collect();
            for &l in &leaves {
                b.edge(c, l);
            }
            b.edge(v, leaves[0]);
        }
    }
    GraphWithPortals::new(b.g, (0..k).collect())
}

/// Whether `L(gp)` equals `L_R` exactly.
pub fn verify_realization(gp: &GraphWithPortals, rel: &HwRelation, spec: ProblemSpec) -> Result<bool> {
    if gp.portals.len() != rel.arity {
        return Ok(false);
    }
    let realized = realized_language(gp, spec)?;
    Ok(realized == relation_language(rel, spec.modulus())?)
}
