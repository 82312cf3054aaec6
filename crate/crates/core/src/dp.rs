//! The size-indexed dynamic program over a nice tree decomposition.
//!
//! Each node `t` holds one language per size index `i ∈ [0, |V_t ∖ X_t|]`:
//! the portal strings over the bag `X_t` witnessed by a partial solution
//! with exactly `i` selected forgotten vertices.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::combine::{combine_fast_with_stats, combine_naive, CombineStats};
use crate::error::{Error, Result};
use crate::graph::{Graph, NiceNode, NiceTreeDecomposition, NodeKind};
use crate::lang::{insert_bit, remove_bit, Language, Packing};
use crate::residue::ProblemSpec;

/// One row of a DP table: `rows[i]` is `L[t, i]`.
pub type Row = Vec<Language>;

#[derive(Clone, Debug, Default)]
pub struct SolveOptions {
    /// Ignore partial solutions with more than this many selected vertices.
    pub max_size: Option<usize>,
    /// Worker threads for joins; 0 and 1 both mean sequential.
    pub threads: usize,
    /// Re-run every join naively and compare.
    pub debug_checks: bool,
    /// Use the all-pairs combination in joins instead of convolution.
    pub naive_joins: bool,
}

/// Hooks into the traversal, mostly for tests and instrumentation.
#[allow(unused_variables)]
pub trait Observer {
    fn node_done(&mut self, t: usize, node: &NiceNode, row: &[Language]) {}

    /// One `L̂1[j] ⊕ L2[k]` combination inside the join at `t`.
    fn join_pair(&mut self, t: usize, left: &Language, right: &Language, result: &Language, stats: &CombineStats) {}
}

impl Observer for () {}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KindStats {
    pub nodes: u64,
    pub micros: u64,
    /// Largest `|L[t, i]|` seen at a node of this kind.
    pub max_states: u64,
}

impl KindStats {
    fn record(&mut self, micros: u64, states: u64) {
        self.nodes += 1;
        self.micros += micros;
        self.max_states = self.max_states.max(states);
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveStats {
    pub width: u64,
    pub leaf: KindStats,
    pub introduce: KindStats,
    pub forget: KindStats,
    pub join: KindStats,
    /// Pairwise combinations run inside joins.
    pub combinations: u64,
    /// Largest convolution array used by a combination.
    pub max_transform: u64,
    pub max_states: u64,
    pub total_micros: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveReport {
    pub schema: u32,
    pub n: usize,
    pub feasible: Vec<bool>,
    pub min: Option<usize>,
    pub max: Option<usize>,
    pub decision: bool,
    /// Present when sizes above it were not explored.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub size_cap: Option<usize>,
    pub stats: SolveStats,
}

impl SolveReport {
    pub fn from_feasible(feasible: Vec<bool>, stats: SolveStats) -> Self {
        let min = feasible.iter().position(|&b| b);
        let max = feasible.iter().rposition(|&b| b);
        SolveReport {
            schema: 1,
            n: feasible.len().saturating_sub(1),
            decision: min.is_some(),
            feasible,
            min,
            max,
            size_cap: None,
            stats,
        }
    }

    /// Feasibility at some size `≤ target`.
    pub fn feasible_within(&self, target: usize) -> bool {
        self.min.is_some_and(|s| s <= target)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

fn positions_in(bag: &[usize], vertices: &[usize]) -> u64 {
    bag.iter()
        .enumerate()
        .filter(|(_, v)| vertices.binary_search(v).is_ok())
        .fold(0, |m, (i, _)| m | (1 << i))
}

/// Positions in `bag` adjacent to `v`.
fn bag_neighbors(g: &Graph, bag: &[usize], v: usize) -> u64 {
    positions_in(bag, g.neighbors(v))
}

pub struct Solver<'a> {
    g: &'a Graph,
    spec: ProblemSpec,
    shifts: Vec<u32>,
    opts: SolveOptions,
}

impl<'a> Solver<'a> {
    pub fn new(g: &'a Graph, spec: ProblemSpec, shifts: Option<&[u32]>, opts: SolveOptions) -> Result<Self> {
        let m = spec.modulus();
        let shifts = match shifts {
            Some(s) if s.len() != g.n() => {
                return Err(Error::Invalid(format!(
                    "shift vector has length {} but the graph has {} vertices",
                    s.len(),
                    g.n()
                )))
            }
            Some(s) => s.iter().map(|x| x % m).collect(),
            None => vec![0; g.n()],
        };
        Ok(Solver { g, spec, shifts, opts })
    }

    pub fn leaf_rule(&self) -> Row {
        vec![Language::epsilon(self.spec.modulus())]
    }

    /// `child` is over `bag ∖ {v}`; the result is over `bag`.
    pub fn introduce_rule(&self, child: &[Language], v: usize, bag: &[usize]) -> Result<Row> {
        let m = self.spec.modulus();
        let pos = bag.binary_search(&v).map_err(|_| Error::Decomposition("introduced vertex not in bag".into()))?;
        let packing = Packing::new(bag.len(), m)?;
        let nb_new = bag_neighbors(self.g, bag, v);
        let nb_child = remove_bit(nb_new, pos);
        let nb_positions: Vec<usize> = (0..bag.len()).filter(|&i| (nb_new >> i) & 1 == 1).collect();
        let mut row = Vec::with_capacity(child.len());
        for lang in child {
            let child_packing = lang.packing();
            let mut out = Language::with_packing(packing);
            for (sigma, w) in lang.iter_packed() {
                let c = (sigma & nb_child).count_ones() % m;
                let w_ins = child_packing.insert(w, pos, c);
                out.insert_packed(insert_bit(sigma, pos, false), w_ins);
                let mut w_sel = w_ins;
                for &u in &nb_positions {
                    w_sel = packing.add(w_sel, u, 1);
                }
                out.insert_packed(insert_bit(sigma, pos, true), w_sel);
            }
            row.push(out);
        }
        Ok(row)
    }

    /// `child` is over `bag ∪ {v}`; the result is over `bag`.
    pub fn forget_rule(&self, child: &[Language], v: usize, child_bag: &[usize]) -> Result<Row> {
        let pos = child_bag
            .binary_search(&v)
            .map_err(|_| Error::Decomposition("forgotten vertex not in child bag".into()))?;
        let shift = self.shifts[v];
        let (a_sigma, a_rho, m) = (self.spec.sigma.a, self.spec.rho.a, self.spec.modulus());
        let packing = child
            .first()
            .map(|l| l.packing().shrink())
            .ok_or_else(|| Error::Decomposition("empty child row".into()))?;
        let cap = self.opts.max_size.unwrap_or(usize::MAX);
        let len = (child.len() + 1).min(cap.saturating_add(1));
        let mut row: Row = (0..len).map(|_| Language::with_packing(packing)).collect();
        for (i, lang) in child.iter().enumerate() {
            let p = lang.packing();
            for (sigma, w) in lang.iter_packed() {
                let selected = (sigma >> pos) & 1 == 1;
                let c = (p.get(w, pos) + shift) % m;
                if c != if selected { a_sigma } else { a_rho } {
                    continue;
                }
                let target = i + selected as usize;
                if target < len {
                    row[target].insert_packed(remove_bit(sigma, pos), p.remove(w, pos));
                }
            }
        }
        Ok(row)
    }

    /// Subtracts the contribution of selected bag neighbours from every
    /// count of `row`.
    pub fn hat_correction(&self, row: &[Language], bag: &[usize]) -> Row {
        let m = self.spec.modulus();
        let nbs: Vec<u64> = bag.iter().map(|&v| bag_neighbors(self.g, bag, v)).collect();
        if nbs.iter().all(|&x| x == 0) {
            return row.to_vec();
        }
        row.iter()
            .map(|lang| {
                let p = lang.packing();
                let mut out = Language::with_packing(p);
                for (sigma, w) in lang.iter_packed() {
                    let mut w2 = w;
                    for (i, &nb) in nbs.iter().enumerate() {
                        let k = (sigma & nb).count_ones() % m;
                        if k != 0 {
                            w2 = p.add(w2, i, m - k);
                        }
                    }
                    out.insert_packed(sigma, w2);
                }
                out
            })
            .collect()
    }

    pub fn join_rule(&self, t: usize, row1: &[Language], row2: &[Language], bag: &[usize], obs: &mut dyn Observer) -> Result<Row> {
        let hat = self.hat_correction(row1, bag);
        let cap = self.opts.max_size.unwrap_or(usize::MAX);
        let len = (hat.len() + row2.len() - 1).min(cap.saturating_add(1));
        let packing = Packing::new(bag.len(), self.spec.modulus())?;
        let mut pairs = Vec::new();
        for i in 0..len {
            for j in 0..hat.len().min(i + 1) {
                let k = i - j;
                if k < row2.len() && !hat[j].is_empty() && !row2[k].is_empty() {
                    pairs.push((i, j, k));
                }
            }
        }
        let results = self.run_pairs(&pairs, &hat, row2)?;
        let mut row: Row = (0..len).map(|_| Language::with_packing(packing)).collect();
        for (&(i, j, k), (lang, stats)) in pairs.iter().zip(results) {
            if self.opts.debug_checks {
                let naive = combine_naive(&hat[j], &row2[k])?;
                if naive != lang {
                    return Err(Error::Invalid(format!("fast join disagrees with naive join at node {t}")));
                }
            }
            obs.join_pair(t, &hat[j], &row2[k], &lang, &stats);
            row[i].union_with(lang);
        }
        Ok(row)
    }

    fn combine(&self, a: &Language, b: &Language) -> Result<(Language, CombineStats)> {
        if self.opts.naive_joins {
            combine_naive(a, b).map(|l| (l, CombineStats::default()))
        } else {
            combine_fast_with_stats(a, b)
        }
    }

    fn run_pairs(&self, pairs: &[(usize, usize, usize)], hat: &[Language], row2: &[Language]) -> Result<Vec<(Language, CombineStats)>> {
        let threads = self.opts.threads.max(1).min(pairs.len().max(1));
        if threads == 1 {
            return pairs
                .iter()
                .map(|&(_, j, k)| self.combine(&hat[j], &row2[k]))
                .collect();
        }
        let chunk = pairs.len().div_ceil(threads);
        let parts: Vec<Result<Vec<_>>> = std::thread::scope(|s| {
            let handles: Vec<_> = pairs
                .chunks(chunk)
                .map(|part| {
                    s.spawn(move || {
                        part.iter()
                            .map(|&(_, j, k)| self.combine(&hat[j], &row2[k]))
                            .collect::<Result<Vec<_>>>()
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("join worker panicked")).collect()
        });
        let mut out = Vec::with_capacity(pairs.len());
        for part in parts {
            out.extend(part?);
        }
        Ok(out)
    }

    /// Runs the whole traversal. The decomposition must already be valid
    /// for the graph.
    pub fn run(&self, ntd: &NiceTreeDecomposition, obs: &mut dyn Observer) -> Result<SolveReport> {
        let start = Instant::now();
        let n = self.g.n();
        let mut stats = SolveStats {
            width: ntd.width() as u64,
            ..SolveStats::default()
        };
        if self.spec.modulus() == 1 {
            let mut report = SolveReport::from_feasible(vec![true; n + 1], stats);
            report.stats.total_micros = start.elapsed().as_micros() as u64;
            return Ok(report);
        }
        let mut tables: Vec<Option<Row>> = vec![None; ntd.len()];
        for (t, node) in ntd.nodes().iter().enumerate() {
            let tick = Instant::now();
            let mut take = |c: usize| tables[c].take().expect("child table computed");
            let (row, kind) = match node.kind {
                NodeKind::Leaf => {
                    if !node.bag.is_empty() {
                        return Err(Error::Decomposition(format!("leaf {t} has a non-empty bag")));
                    }
                    (self.leaf_rule(), &mut stats.leaf)
                }
                NodeKind::Introduce(v) => {
                    let child = take(node.children[0]);
                    (self.introduce_rule(&child, v, &node.bag)?, &mut stats.introduce)
                }
                NodeKind::Forget(v) => {
                    let c = node.children[0];
                    let child = take(c);
                    (self.forget_rule(&child, v, &ntd.node(c).bag)?, &mut stats.forget)
                }
                NodeKind::Join => {
                    let r1 = take(node.children[0]);
                    let r2 = take(node.children[1]);
                    let row = self.join_rule(t, &r1, &r2, &node.bag, obs)?;
                    (row, &mut stats.join)
                }
            };
            let states = row.iter().map(Language::len).max().unwrap_or(0) as u64;
            kind.record(tick.elapsed().as_micros() as u64, states);
            stats.max_states = stats.max_states.max(states);
            obs.node_done(t, node, &row);
            tables[t] = Some(row);
        }
        let root = tables[ntd.root()].take().expect("root table computed");
        let mut feasible = vec![false; n + 1];
        for (s, lang) in root.iter().enumerate() {
            if s <= n && lang.contains_packed(0, 0) {
                feasible[s] = true;
            }
        }
        let mut report = SolveReport::from_feasible(feasible, stats);
        report.size_cap = self.opts.max_size.filter(|&c| c < n);
        report.stats.total_micros = start.elapsed().as_micros() as u64;
        Ok(report)
    }
}

pub(crate) fn record_join(stats: &mut SolveStats, c: &CombineStats) {
    stats.combinations += 1;
    stats.max_transform = stats.max_transform.max(c.transform_size as u64);
}

/// Validates the decomposition, then solves.
pub fn solve(g: &Graph, ntd: &NiceTreeDecomposition, spec: ProblemSpec, shifts: Option<&[u32]>) -> Result<SolveReport> {
    solve_with(g, ntd, spec, shifts, &SolveOptions::default(), &mut ())
}

pub fn solve_with(
    g: &Graph,
    ntd: &NiceTreeDecomposition,
    spec: ProblemSpec,
    shifts: Option<&[u32]>,
    opts: &SolveOptions,
    obs: &mut dyn Observer,
) -> Result<SolveReport> {
    ntd.validate(g)?;
    let solver = Solver::new(g, spec, shifts, opts.clone())?;
    let mut counter = JoinCounter { inner: obs, stats: SolveStats::default() };
    let mut report = solver.run(ntd, &mut counter)?;
    report.stats.combinations = counter.stats.combinations;
    report.stats.max_transform = counter.stats.max_transform;
    Ok(report)
}

struct JoinCounter<'o> {
    inner: &'o mut dyn Observer,
    stats: SolveStats,
}

impl Observer for JoinCounter<'_> {
    fn node_done(&mut self, t: usize, node: &NiceNode, row: &[Language]) {
        self.inner.node_done(t, node, row);
    }

    fn join_pair(&mut self, t: usize, left: &Language, right: &Language, result: &Language, stats: &CombineStats) {
        record_join(&mut self.stats, stats);
        self.inner.join_pair(t, left, right, result, stats);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LightsOutVariant {
    /// Pressing a switch toggles itself and its neighbours.
    Reflexive,
    /// Pressing a switch toggles only its neighbours.
    Plain,
}

impl LightsOutVariant {
    pub fn spec(self) -> ProblemSpec {
        match self {
            LightsOutVariant::Reflexive => ProblemSpec::reflexive_all_off(),
            LightsOutVariant::Plain => ProblemSpec::all_off(),
        }
    }
}

/// Minimum presses turning every light off. `initially_on[v]` defaults to
/// all lights on; lights that start off get shift 1.
pub fn solve_lights_out(
    g: &Graph,
    ntd: &NiceTreeDecomposition,
    variant: LightsOutVariant,
    initially_on: Option<&[bool]>,
) -> Result<SolveReport> {
    let shifts: Option<Vec<u32>> = match initially_on {
        Some(on) if on.len() != g.n() => {
            return Err(Error::Invalid(format!(
                "initial pattern has {} entries but the graph has {} vertices",
                on.len(),
                g.n()
            )))
        }
        Some(on) => Some(on.iter().map(|&b| u32::from(!b)).collect()),
        None => None,
    };
    solve(g, ntd, variant.spec(), shifts.as_deref())
}
