//! Ground-truth engines: exhaustive subset enumeration and GF(2)
//! elimination for the parity cases.

use crate::dp::LightsOutVariant;
use crate::error::{Error, Result};
use crate::graph::{Graph, GraphWithPortals};
use crate::lang::{Language, Packing};
use crate::residue::ProblemSpec;

pub const DEFAULT_CAP: usize = 22;
pub const DEFAULT_KERNEL_CAP: usize = 24;

/// Enumeration cap: `SRK_ORACLE_CAP` if set and valid, else the default.
pub fn oracle_cap() -> usize {
    std::env::var("SRK_ORACLE_CAP")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_CAP)
}

/// Gray-code walk over all subsets of `0..n`, keeping per-vertex selected
/// neighbour counts current. `visit` sees the selection and counts after
/// every step, including the empty set first.
fn enumerate(g: &Graph, mut visit: impl FnMut(&[bool], &[u32], usize, usize)) {
    let n = g.n();
    let mut selected = vec![false; n];
    let mut counts = vec![0u32; n];
    let mut size = 0;
    visit(&selected, &counts, size, usize::MAX);
    for step in 1u64..(1u64 << n) {
        let v = step.trailing_zeros() as usize;
        selected[v] = !selected[v];
        if selected[v] {
            size += 1;
            for &u in g.neighbors(v) {
                counts[u] += 1;
            }
        } else {
            size -= 1;
            for &u in g.neighbors(v) {
                counts[u] -= 1;
            }
        }
        visit(&selected, &counts, size, v);
    }
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::OverCap {
            what: "oracle enumeration",
            n,
            cap,
        });
    }
    Ok(())
}

fn reduce_shifts(n: usize, m: u32, shifts: Option<&[u32]>) -> Result<Vec<u32>> {
    match shifts {
        Some(s) if s.len() != n => Err(Error::Invalid(format!(
            "shift vector has length {} but the graph has {n} vertices",
            s.len()
        ))),
        Some(s) => Ok(s.iter().map(|x| x % m).collect()),
        None => Ok(vec![0; n]),
    }
}

/// `feasible[s]` iff some `(σ,ρ)`-set of size `s` exists, using the
/// environment cap.
pub fn brute_force_sizes(g: &Graph, spec: ProblemSpec, shifts: Option<&[u32]>) -> Result<Vec<bool>> {
    brute_force_sizes_capped(g, spec, shifts, oracle_cap())
}

pub fn brute_force_sizes_capped(g: &Graph, spec: ProblemSpec, shifts: Option<&[u32]>, cap: usize) -> Result<Vec<bool>> {
    let n = g.n();
    check_cap(n, cap)?;
    let shifts = reduce_shifts(n, spec.modulus(), shifts)?;
    let ok = |v: usize, sel: bool, c: u32| spec.accepts(sel, c as u64, shifts[v]);
    let mut feasible = vec![false; n + 1];
    let mut bad = n;
    let mut status = vec![false; n];
    enumerate(g, |selected, counts, size, flipped| {
        let mut update = |v: usize| {
            let good = ok(v, selected[v], counts[v]);
            if good != status[v] {
                status[v] = good;
                if good {
                    bad -= 1;
                } else {
                    bad += 1;
                }
            }
        };
        if flipped == usize::MAX {
            for v in 0..n {
                update(v);
            }
        } else {
            update(flipped);
            for &u in g.neighbors(flipped) {
                update(u);
            }
        }
        if bad == 0 {
            feasible[size] = true;
        }
    });
    Ok(feasible)
}

/// Realized languages of `(G, U)` keyed by `|S ∖ U|`: index `i` holds the
/// portal strings of partial solutions with exactly `i` selected
/// non-portal vertices. Non-portal vertices honour `shifts` if given.
pub fn realized_language_stratified(gp: &GraphWithPortals, spec: ProblemSpec, shifts: Option<&[u32]>) -> Result<Vec<Language>> {
    let g = &gp.graph;
    let n = g.n();
    check_cap(n, oracle_cap())?;
    let m = spec.modulus();
    let shifts = reduce_shifts(n, m, shifts)?;
    let k = gp.portals.len();
    let packing = Packing::new(k, m)?;
    let mut is_portal = vec![false; n];
    for &p in &gp.portals {
        is_portal[p] = true;
    }
    let inner = n - k;
    let mut out: Vec<Language> = (0..=inner).map(|_| Language::with_packing(packing)).collect();
    enumerate(g, |selected, counts, size, _| {
        let lawful = (0..n).all(|v| is_portal[v] || spec.accepts(selected[v], counts[v] as u64, shifts[v]));
        if !lawful {
            return;
        }
        let mut sigma = 0u64;
        let mut w = 0u64;
        let mut portal_selected = 0;
        for (i, &p) in gp.portals.iter().enumerate() {
            if selected[p] {
                sigma |= 1 << i;
                portal_selected += 1;
            }
            w = packing.set(w, i, counts[p] % m);
        }
        out[size - portal_selected].insert_packed(sigma, w);
    });
    Ok(out)
}

/// The unstratified realized language `L(G, U)`.
pub fn realized_language(gp: &GraphWithPortals, spec: ProblemSpec) -> Result<Language> {
    let rows = realized_language_stratified(gp, spec, None)?;
    let mut iter = rows.into_iter();
    let mut acc = iter.next().expect("at least one stratum");
    for l in iter {
        acc.union_with(l);
    }
    Ok(acc)
}

/// A square linear system over GF(2) with word-packed rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gf2System {
    n: usize,
    rows: Vec<Vec<u64>>,
    rhs: Vec<bool>,
}

fn words(n: usize) -> usize {
    n.div_ceil(64)
}

fn get(bits: &[u64], i: usize) -> bool {
    (bits[i / 64] >> (i % 64)) & 1 == 1
}

fn flip(bits: &mut [u64], i: usize) {
    bits[i / 64] ^= 1 << (i % 64);
}

impl Gf2System {
    pub fn new(n: usize, rows: Vec<Vec<u64>>, rhs: Vec<bool>) -> Result<Self> {
        if rows.len() != n || rhs.len() != n || rows.iter().any(|r| r.len() != words(n)) {
            return Err(Error::Invalid("GF(2) system must be square with matching rhs".into()));
        }
        Ok(Gf2System { n, rows, rhs })
    }

    /// Row `v` sums over `N[v]` (reflexive) or `N(v)` (plain); `rhs[v]` is
    /// whether light `v` starts on.
    pub fn lights_out(g: &Graph, variant: LightsOutVariant, rhs: Vec<bool>) -> Result<Self> {
        let n = g.n();
        let rows = (0..n)
            .map(|v| {
                let mut r = vec![0u64; words(n)];
                for &u in g.neighbors(v) {
                    flip(&mut r, u);
                }
                if variant == LightsOutVariant::Reflexive {
                    flip(&mut r, v);
                }
                r
            })
            .collect();
        Gf2System::new(n, rows, rhs)
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gf2Solution {
    pub particular: Vec<bool>,
    pub kernel: Vec<Vec<bool>>,
}

/// Gaussian elimination; `None` if the system is inconsistent.
pub fn gf2_solve(sys: &Gf2System) -> Option<Gf2Solution> {
    let n = sys.n;
    let mut rows: Vec<(Vec<u64>, bool)> = sys.rows.iter().cloned().zip(sys.rhs.iter().copied()).collect();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..n).find(|&i| get(&rows[i].0, col)) else {
            continue;
        };
        rows.swap(r, p);
        let (pivot, prhs) = rows[r].clone();
        for (i, (row, rhs)) in rows.iter_mut().enumerate() {
            if i != r && get(row, col) {
                for (a, b) in row.iter_mut().zip(&pivot) {
                    *a ^= b;
                }
                *rhs ^= prhs;
            }
        }
        pivot_cols.push(col);
        r += 1;
    }
    if rows[r..].iter().any(|(_, rhs)| *rhs) {
        return None;
    }
    let mut particular = vec![false; n];
    for (i, &col) in pivot_cols.iter().enumerate() {
        particular[col] = rows[i].1;
    }
    let mut is_pivot = vec![false; n];
    for &c in &pivot_cols {
        is_pivot[c] = true;
    }
    let kernel = (0..n)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![false; n];
            v[f] = true;
            for (i, &col) in pivot_cols.iter().enumerate() {
                if get(&rows[i].0, f) {
                    v[col] = true;
                }
            }
            v
        })
        .collect();
    Some(Gf2Solution { particular, kernel })
}

/// Minimum Hamming weight over `particular + span(kernel)`, or `None`
/// when the kernel dimension exceeds `cap`.
pub fn gf2_min_weight(particular: &[bool], kernel: &[Vec<bool>], cap: usize) -> Option<usize> {
    if kernel.len() > cap {
        return None;
    }
    let mut cur = particular.to_vec();
    let mut best = cur.iter().filter(|&&b| b).count();
    let mut weight = best;
    for step in 1u64..(1u64 << kernel.len()) {
        let k = &kernel[step.trailing_zeros() as usize];
        for (c, &b) in cur.iter_mut().zip(k) {
            if b {
                weight = if *c { weight - 1 } else { weight + 1 };
                *c = !*c;
            }
        }
        best = best.min(weight);
    }
    Some(best)
}
