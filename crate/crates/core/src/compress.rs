//! σ-defining sets and the compression of weight vectors onto their
//! complement.
//!
//! For a set `X` of σ-vectors, a σ-defining set `S` is a set of positions on
//! which the vectors of `X` are pairwise distinct, minimal under the greedy
//! removal order, and with a witness pair for every kept position. Within
//! a sparse language, the weights on `S` are then determined by the weights
//! on the complement.

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::lang::{mask_to_vec, vec_to_mask, Packing};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaDefiningSet {
    n: usize,
    mask: u64,
    positions: Vec<usize>,
    complement: Vec<usize>,
    witnesses: Vec<Option<(u64, u64)>>,
}

impl SigmaDefiningSet {
    /// Greedy computation over σ-masks of length `n`. `masks` must be
    /// non-empty and duplicate-free.
    pub fn compute(n: usize, masks: &[u64]) -> Self {
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let mut sorted = masks.to_vec();
        sorted.sort_unstable_by_key(|m| m.reverse_bits());
        let mut s = full;
        let mut witnesses = vec![None; n];
        let mut seen: FxHashMap<u64, u64> = FxHashMap::default();
        for i in 0..n {
            let keep = s & !(1u64 << i);
            seen.clear();
            let mut found = None;
            for &v in &sorted {
                if let Some(&prev) = seen.get(&(v & keep)) {
                    let (w0, w1) = if (prev >> i) & 1 == 0 { (prev, v) } else { (v, prev) };
                    found = Some((w0, w1));
                    break;
                }
                seen.insert(v & keep, v);
            }
            match found {
                Some(w) => witnesses[i] = Some(w),
                None => s = keep,
            }
        }
        let positions: Vec<usize> = (0..n).filter(|&i| (s >> i) & 1 == 1).collect();
        let complement: Vec<usize> = (0..n).filter(|&i| (s >> i) & 1 == 0).collect();
        SigmaDefiningSet {
            n,
            mask: s,
            positions,
            complement,
            witnesses,
        }
    }

    /// Same as [`compute`](Self::compute) on explicit 0/1 vectors.
    pub fn from_vectors(x: &[Vec<u8>]) -> Result<Self> {
        let n = x.first().map(Vec::len).ok_or_else(|| Error::Invalid("empty σ-vector set".into()))?;
        if n > 64 || x.iter().any(|v| v.len() != n) {
            return Err(Error::Invalid("σ-vectors must share one length of at most 64".into()));
        }
        let mut masks: Vec<u64> = x.iter().map(|v| vec_to_mask(v)).collect();
        masks.sort_unstable();
        masks.dedup();
        Ok(SigmaDefiningSet::compute(n, &masks))
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Kept positions, ascending, 0-based.
    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    /// Positions outside the set, ascending; compression keeps these.
    pub fn complement(&self) -> &[usize] {
        &self.complement
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    /// The pair `(w0, w1)` for a kept position `l`.
    pub fn witness(&self, l: usize) -> Option<(u64, u64)> {
        self.witnesses.get(l).copied().flatten().filter(|_| (self.mask >> l) & 1 == 1)
    }

    pub fn witness_vectors(&self, l: usize) -> Option<(Vec<u8>, Vec<u8>)> {
        self.witness(l)
            .map(|(a, b)| (mask_to_vec(a, self.n), mask_to_vec(b, self.n)))
    }

    /// Whether every kept position has witnesses from `masks` that differ
    /// there and agree on the rest of the set, and the masks are pairwise
    /// distinct on the set.
    pub fn check(&self, masks: &[u64]) -> bool {
        let mut restricted: Vec<u64> = masks.iter().map(|v| v & self.mask).collect();
        restricted.sort_unstable();
        let distinct = restricted.windows(2).all(|w| w[0] != w[1]);
        distinct
            && self.positions.iter().all(|&l| match self.witness(l) {
                Some((w0, w1)) => {
                    masks.contains(&w0)
                        && masks.contains(&w1)
                        && (w0 >> l) & 1 == 0
                        && (w1 >> l) & 1 == 1
                        && (w0 & self.mask & !(1 << l)) == (w1 & self.mask & !(1 << l))
                }
                None => false,
            })
    }
}

/// `Σ_{i∉S} (u[i] − o[i])·(w1[i] − w0[i]) mod m` for the witnesses of `l`.
pub fn remainder(sds: &SigmaDefiningSet, m: u32, u: &[u32], o: &[u32], l: usize) -> Result<u32> {
    let (w0, w1) = sds
        .witness(l)
        .ok_or_else(|| Error::Invalid(format!("position {l} is not in the σ-defining set")))?;
    let m = m as i64;
    let mut r = 0i64;
    for &i in &sds.complement {
        let d = ((w1 >> i) & 1) as i64 - ((w0 >> i) & 1) as i64;
        r += (u[i] as i64 - o[i] as i64) * d;
    }
    Ok(r.rem_euclid(m) as u32)
}

/// Projection of a full weight vector onto the complement positions.
pub fn compress(sds: &SigmaDefiningSet, u: &[u32]) -> Vec<u32> {
    sds.complement.iter().map(|&i| u[i]).collect()
}

/// Rebuilds a full weight vector from its compression `a` and an origin
/// `o` taken from the same sparse group.
pub fn decompress(sds: &SigmaDefiningSet, m: u32, a: &[u32], o: &[u32]) -> Result<Vec<u32>> {
    if a.len() != sds.complement.len() || o.len() != sds.n {
        return Err(Error::Invalid("decompress: length mismatch".into()));
    }
    let mut u = vec![0u32; sds.n];
    for (j, &i) in sds.complement.iter().enumerate() {
        u[i] = a[j] % m;
    }
    for &l in &sds.positions {
        let r = remainder(sds, m, &u, o, l)?;
        u[l] = (o[l] + m - r) % m;
    }
    Ok(u)
}

/// Precomputed decompression over packed weight words.
pub(crate) struct Decompressor {
    packing: Packing,
    complement: Vec<usize>,
    /// Per kept position: complement indices with witness difference +1 and
    /// −1 respectively.
    rules: Vec<(usize, Vec<usize>, Vec<usize>)>,
}

impl Decompressor {
    pub(crate) fn new(sds: &SigmaDefiningSet, packing: Packing) -> Self {
        let rules = sds
            .positions
            .iter()
            .map(|&l| {
                let (w0, w1) = sds.witness(l).expect("kept positions have witnesses");
                let mut plus = Vec::new();
                let mut minus = Vec::new();
                for (j, &i) in sds.complement.iter().enumerate() {
                    match (((w0 >> i) & 1), ((w1 >> i) & 1)) {
                        (0, 1) => plus.push(j),
                        (1, 0) => minus.push(j),
                        _ => {}
                    }
                }
                (l, plus, minus)
            })
            .collect();
        Decompressor {
            packing,
            complement: sds.complement.clone(),
            rules,
        }
    }

    /// `diff[j] = (a_j − o_{S̄[j]}) mod m`, `digits` are the compressed
    /// coordinates, `origin` the packed origin word.
    pub(crate) fn decompress(&self, digits: &[u32], origin: u64, diff: &mut Vec<u32>) -> u64 {
        let p = self.packing;
        let m = p.modulus();
        diff.clear();
        let mut w = 0u64;
        for (j, &i) in self.complement.iter().enumerate() {
            w = p.set(w, i, digits[j]);
            diff.push((digits[j] + m - p.get(origin, i)) % m);
        }
        for (l, plus, minus) in &self.rules {
            let mut r = 0u32;
            for &j in plus {
                r += diff[j];
            }
            for &j in minus {
                r += m - diff[j];
            }
            let r = r % m;
            w = p.set(w, *l, (p.get(origin, *l) + m - r) % m);
        }
        w
    }
}
