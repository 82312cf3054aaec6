//! The ⊕ operation on state strings and languages.

use crate::compress::{Decompressor, SigmaDefiningSet};
use crate::error::{Error, Result};
use crate::lang::{Language, Packing};
use crate::modconv::{convolve_naive, ConvolutionPlan, NAIVE_THRESHOLD};
use crate::residue::StateString;

/// `x ⊕ y`: defined when both have the same σ-vector (and length); counts
/// add mod `m`.
pub fn combine_strings(x: &StateString, y: &StateString, m: u32) -> Option<StateString> {
    if x.len() != y.len() {
        return None;
    }
    x.0.iter()
        .zip(&y.0)
        .map(|(a, b)| (a.is_sigma() == b.is_sigma()).then(|| a.with_count((a.count() + b.count()) % m)))
        .collect::<Option<Vec<_>>>()
        .map(StateString)
}

#[inline]
pub(crate) fn add_words(p: Packing, a: u64, b: u64) -> u64 {
    let m = p.modulus();
    let mut w = 0;
    for i in 0..p.len() {
        let c = p.get(a, i) + p.get(b, i);
        w = p.set(w, i, if c >= m { c - m } else { c });
    }
    w
}

fn check_compatible(l1: &Language, l2: &Language) -> Result<()> {
    if l1.packing() != l2.packing() {
        return Err(Error::Invalid(format!(
            "cannot combine languages of length {} mod {} and length {} mod {}",
            l1.string_len(),
            l1.modulus(),
            l2.string_len(),
            l2.modulus()
        )));
    }
    Ok(())
}

/// All-pairs `L1 ⊕ L2`.
pub fn combine_naive(l1: &Language, l2: &Language) -> Result<Language> {
    check_compatible(l1, l2)?;
    let p = l1.packing();
    let mut out = Language::with_packing(p);
    for (s, g1) in l1.groups() {
        let Some(g2) = l2.group(s) else { continue };
        for &a in g1 {
            for &b in g2 {
                out.insert_packed(s, add_words(p, a, b));
            }
        }
    }
    Ok(out)
}

/// Work counters for one fast combination.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CombineStats {
    /// σ-vectors present in both inputs.
    pub groups: usize,
    /// Positions kept after compression.
    pub compressed_len: usize,
    /// Array size `m^compressed_len` of each convolution.
    pub transform_size: usize,
    pub prime: u64,
}

/// `L1 ⊕ L2` for sparse languages via compression and modular
/// convolution. Inputs that are not sparse give unspecified results.
pub fn combine_fast(l1: &Language, l2: &Language) -> Result<Language> {
    combine_fast_with_stats(l1, l2).map(|(l, _)| l)
}

pub fn combine_fast_with_stats(l1: &Language, l2: &Language) -> Result<(Language, CombineStats)> {
    check_compatible(l1, l2)?;
    let p = l1.packing();
    let m = p.modulus();
    let mut out = Language::with_packing(p);
    let common: Vec<u64> = l1
        .sigma_masks()
        .into_iter()
        .filter(|s| l2.group(*s).is_some())
        .collect();
    let mut stats = CombineStats {
        groups: common.len(),
        ..CombineStats::default()
    };
    if common.is_empty() {
        return Ok((out, stats));
    }
    let sds = SigmaDefiningSet::compute(p.len(), &common);
    let complement = sds.complement().to_vec();
    let k = complement.len();
    let size = (m as usize)
        .checked_pow(k as u32)
        .filter(|&d| d <= 1 << 32)
        .ok_or(Error::OverCap {
            what: "convolution array",
            n: k,
            cap: 32,
        })?;
    let dims = vec![m as usize; k];
    let plan = if size > NAIVE_THRESHOLD {
        Some(ConvolutionPlan::new(&dims, size as u64)?)
    } else {
        None
    };
    stats.compressed_len = k;
    stats.transform_size = size;
    stats.prime = plan.as_ref().map_or(0, ConvolutionPlan::prime);

    let strides: Vec<usize> = (0..k).map(|j| (m as usize).pow(j as u32)).collect();
    let index = |w: u64| -> usize {
        complement
            .iter()
            .zip(&strides)
            .map(|(&i, &s)| p.get(w, i) as usize * s)
            .sum()
    };
    let origin = |g: &rustc_hash::FxHashSet<u64>| -> u64 {
        *g.iter().min_by_key(|&&w| p.lex_key(w)).expect("groups are non-empty")
    };
    let decompressor = Decompressor::new(&sds, p);
    let mut f = vec![0u64; size];
    let mut g = vec![0u64; size];
    let mut digits = vec![0u32; k];
    let mut diff = Vec::with_capacity(k);

    for &s in &common {
        let g1 = l1.group(s).expect("common σ-vector");
        let g2 = l2.group(s).expect("common σ-vector");
        f.iter_mut().for_each(|x| *x = 0);
        g.iter_mut().for_each(|x| *x = 0);
        for &w in g1 {
            f[index(w)] = 1;
        }
        for &w in g2 {
            g[index(w)] = 1;
        }
        let o = add_words(p, origin(g1), origin(g2));
        match &plan {
            Some(plan) => plan.convolve_in_place(&mut f, &mut g),
            None => {
                let h = convolve_naive(&dims, &f, &g);
                f.copy_from_slice(&h);
            }
        }
        for (a, &h) in f.iter().enumerate() {
            if h == 0 {
                continue;
            }
            let mut rest = a;
            for d in digits.iter_mut() {
                *d = (rest % m as usize) as u32;
                rest /= m as usize;
            }
            out.insert_packed(s, decompressor.decompress(&digits, o, &mut diff));
        }
    }
    Ok((out, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lang(m: u32, strings: &[&str]) -> Language {
        let parsed: Vec<StateString> = strings.iter().map(|s| s.parse().unwrap()).collect();
        Language::from_strings(parsed[0].len(), m, &parsed).unwrap()
    }

    #[test]
    fn string_examples() {
        let x: StateString = "s1 r1".parse().unwrap();
        let y: StateString = "s1 r0".parse().unwrap();
        assert_eq!(combine_strings(&x, &y, 2), Some("s0 r1".parse().unwrap()));
        let z: StateString = "r1 r0".parse().unwrap();
        assert_eq!(combine_strings(&x, &z, 2), None);
    }

    #[test]
    fn language_examples() {
        let l1 = lang(2, &["s0 r1", "r1 s0"]);
        let l2 = lang(2, &["s1 r1"]);
        let want = lang(2, &["s1 r0"]);
        assert_eq!(combine_naive(&l1, &l2).unwrap(), want);
        assert_eq!(combine_fast(&l1, &l2).unwrap(), want);

        let disjoint = lang(2, &["r0 r0"]);
        assert!(combine_fast(&l1, &disjoint).unwrap().is_empty());
    }

    #[test]
    fn mismatched_packings_are_rejected() {
        let a = lang(2, &["s0 r1"]);
        let b = lang(3, &["s0 r1"]);
        assert!(combine_fast(&a, &b).is_err());
        assert!(combine_naive(&a, &b).is_err());
    }
}
