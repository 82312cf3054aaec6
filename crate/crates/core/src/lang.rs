//! Languages of state strings.
//!
//! A string of length `n` is stored as a σ-mask (bit `i` set iff position
//! `i` is selected) plus a packed weight word holding each position's
//! count in a fixed number of bits. Strings are grouped by σ-mask, which
//! is the shape every downstream algorithm wants.

use std::collections::hash_map::Entry;
use std::fmt::Write as _;

use rustc_hash::{FxHashMap, FxHashSet};

use crate::error::{Error, Result};
use crate::residue::{State, StateString};

/// Bit layout for the weight words of one string length and modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Packing {
    len: usize,
    m: u32,
    bits: u32,
    field: u64,
}

impl Packing {
    pub fn new(len: usize, m: u32) -> Result<Self> {
        let bits = 32 - m.saturating_sub(1).leading_zeros();
        let max = Packing::capacity(m);
        if len > max {
            return Err(Error::BagTooWide { len, max, m });
        }
        Ok(Packing {
            len,
            m,
            bits,
            field: (1u64 << bits) - 1,
        })
    }

    /// Longest string that fits for modulus `m`.
    pub fn capacity(m: u32) -> usize {
        let bits = 32 - m.saturating_sub(1).leading_zeros();
        if bits == 0 {
            64
        } else {
            (64 / bits as usize).min(64)
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn modulus(&self) -> u32 {
        self.m
    }

    #[inline]
    pub fn get(&self, w: u64, i: usize) -> u32 {
        ((w >> (i as u32 * self.bits)) & self.field) as u32
    }

    #[inline]
    pub fn set(&self, w: u64, i: usize, c: u32) -> u64 {
        let shift = i as u32 * self.bits;
        (w & !(self.field << shift)) | ((c as u64) << shift)
    }

    /// Adds `delta` (mod m) to position `i`.
    #[inline]
    pub fn add(&self, w: u64, i: usize, delta: u32) -> u64 {
        let c = (self.get(w, i) + delta) % self.m;
        self.set(w, i, c)
    }

    /// Packing for strings one position longer.
    pub fn grow(&self) -> Result<Packing> {
        Packing::new(self.len + 1, self.m)
    }

    pub fn shrink(&self) -> Packing {
        Packing { len: self.len - 1, ..*self }
    }

    /// Inserts a field holding `c` at position `i`, shifting later fields up.
    #[inline]
    pub fn insert(&self, w: u64, i: usize, c: u32) -> u64 {
        let shift = i as u32 * self.bits;
        let low = w & low_mask(shift);
        let high = if shift >= 64 { 0 } else { w >> shift };
        low | ((c as u64) << shift) | shl(high, shift + self.bits)
    }

    /// Removes the field at position `i`, shifting later fields down.
    #[inline]
    pub fn remove(&self, w: u64, i: usize) -> u64 {
        let shift = i as u32 * self.bits;
        let low = w & low_mask(shift);
        let high = shr(w, shift + self.bits);
        low | shl(high, shift)
    }

    pub fn pack(&self, counts: &[u32]) -> u64 {
        counts
            .iter()
            .enumerate()
            .fold(0, |w, (i, &c)| self.set(w, i, c % self.m))
    }

    pub fn unpack(&self, w: u64) -> Vec<u32> {
        (0..self.len).map(|i| self.get(w, i)).collect()
    }

    /// Key that orders weight words lexicographically by position.
    pub fn lex_key(&self, w: u64) -> u64 {
        (0..self.len).fold(0, |k, i| (k << self.bits) | self.get(w, i) as u64)
    }
}

#[inline]
fn low_mask(shift: u32) -> u64 {
    if shift >= 64 {
        u64::MAX
    } else {
        (1u64 << shift) - 1
    }
}

#[inline]
fn shl(x: u64, s: u32) -> u64 {
    if s >= 64 {
        0
    } else {
        x << s
    }
}

#[inline]
fn shr(x: u64, s: u32) -> u64 {
    if s >= 64 {
        0
    } else {
        x >> s
    }
}

#[inline]
pub fn insert_bit(mask: u64, i: usize, bit: bool) -> u64 {
    let i = i as u32;
    (mask & low_mask(i)) | ((bit as u64) << i) | shl(shr(mask, i), i + 1)
}

#[inline]
pub fn remove_bit(mask: u64, i: usize) -> u64 {
    let i = i as u32;
    (mask & low_mask(i)) | shl(shr(mask, i + 1), i)
}

/// `σ-mask` as a 0/1 vector of length `n`.
pub fn mask_to_vec(mask: u64, n: usize) -> Vec<u8> {
    (0..n).map(|i| ((mask >> i) & 1) as u8).collect()
}

pub fn vec_to_mask(v: &[u8]) -> u64 {
    v.iter()
        .enumerate()
        .fold(0, |m, (i, &b)| m | (((b & 1) as u64) << i))
}

/// A set of state strings of one length over one modulus.
#[derive(Clone, Debug)]
pub struct Language {
    packing: Packing,
    groups: FxHashMap<u64, FxHashSet<u64>>,
    size: usize,
}

impl PartialEq for Language {
    fn eq(&self, other: &Self) -> bool {
        self.packing == other.packing && self.size == other.size && self.groups == other.groups
    }
}

impl Eq for Language {}

impl Language {
    pub fn new(len: usize, m: u32) -> Result<Self> {
        Ok(Language::with_packing(Packing::new(len, m)?))
    }

    pub fn with_packing(packing: Packing) -> Self {
        Language {
            packing,
            groups: FxHashMap::default(),
            size: 0,
        }
    }

    /// The language `{ε}`.
    pub fn epsilon(m: u32) -> Self {
        let mut l = Language::new(0, m).expect("empty strings always fit");
        l.insert_packed(0, 0);
        l
    }

    pub fn from_strings<'a>(len: usize, m: u32, strings: impl IntoIterator<Item = &'a StateString>) -> Result<Self> {
        let mut l = Language::new(len, m)?;
        for s in strings {
            l.insert(s)?;
        }
        Ok(l)
    }

    pub fn packing(&self) -> Packing {
        self.packing
    }

    /// Length of every string in the language.
    pub fn string_len(&self) -> usize {
        self.packing.len
    }

    pub fn modulus(&self) -> u32 {
        self.packing.m
    }

    /// Number of strings.
    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    #[inline]
    pub fn insert_packed(&mut self, sigma: u64, weights: u64) -> bool {
        let fresh = self.groups.entry(sigma).or_default().insert(weights);
        self.size += fresh as usize;
        fresh
    }

    pub fn insert(&mut self, x: &StateString) -> Result<bool> {
        let (sigma, weights) = self.pack_string(x)?;
        Ok(self.insert_packed(sigma, weights))
    }

    pub fn contains(&self, x: &StateString) -> bool {
        match self.pack_string(x) {
            Ok((s, w)) => self.groups.get(&s).is_some_and(|g| g.contains(&w)),
            Err(_) => false,
        }
    }

    pub fn contains_packed(&self, sigma: u64, weights: u64) -> bool {
        self.groups.get(&sigma).is_some_and(|g| g.contains(&weights))
    }

    fn pack_string(&self, x: &StateString) -> Result<(u64, u64)> {
        if x.len() != self.packing.len {
            return Err(Error::Invalid(format!(
                "string of length {} in a language of length {}",
                x.len(),
                self.packing.len
            )));
        }
        let mut sigma = 0u64;
        let mut w = 0u64;
        for (i, s) in x.0.iter().enumerate() {
            if s.count() >= self.packing.m {
                return Err(Error::Invalid(format!("count {} not reduced mod {}", s.count(), self.packing.m)));
            }
            if s.is_sigma() {
                sigma |= 1 << i;
            }
            w = self.packing.set(w, i, s.count());
        }
        Ok((sigma, w))
    }

    pub fn unpack(&self, sigma: u64, weights: u64) -> StateString {
        StateString(
            (0..self.packing.len)
                .map(|i| {
                    let c = self.packing.get(weights, i);
                    if (sigma >> i) & 1 == 1 {
                        State::Sigma(c)
                    } else {
                        State::Rho(c)
                    }
                })
                .collect(),
        )
    }

    /// All `(σ-mask, weight word)` pairs, in unspecified order.
    pub fn iter_packed(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.groups
            .iter()
            .flat_map(|(&s, ws)| ws.iter().map(move |&w| (s, w)))
    }

    pub fn groups(&self) -> impl Iterator<Item = (u64, &FxHashSet<u64>)> + '_ {
        self.groups.iter().map(|(&s, g)| (s, g))
    }

    pub fn group(&self, sigma: u64) -> Option<&FxHashSet<u64>> {
        self.groups.get(&sigma)
    }

    /// Distinct σ-masks, ascending.
    pub fn sigma_masks(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.groups.keys().copied().collect();
        v.sort_unstable();
        v
    }

    /// All strings, sorted.
    pub fn strings(&self) -> Vec<StateString> {
        let mut v: Vec<StateString> = self.iter_packed().map(|(s, w)| self.unpack(s, w)).collect();
        v.sort();
        v
    }

    /// Adds every string of `other` (same length and modulus) to `self`.
    pub fn union_with(&mut self, other: Language) {
        debug_assert_eq!(self.packing, other.packing);
        if self.is_empty() {
            *self = other;
            return;
        }
        for (s, ws) in other.groups {
            match self.groups.entry(s) {
                Entry::Vacant(e) => {
                    self.size += ws.len();
                    e.insert(ws);
                }
                Entry::Occupied(mut e) => {
                    let g = e.get_mut();
                    for w in ws {
                        self.size += g.insert(w) as usize;
                    }
                }
            }
        }
    }

    /// Quadratic check of `σvec(x)·degvec(y) ≡ σvec(y)·degvec(x) (mod m)`
    /// over all pairs.
    pub fn is_sparse(&self) -> bool {
        let p = self.packing;
        let m = p.m as u64;
        let dot = |sigma: u64, w: u64| -> u64 {
            (0..p.len)
                .filter(|&i| (sigma >> i) & 1 == 1)
                .map(|i| p.get(w, i) as u64)
                .sum::<u64>()
                % m
        };
        let all: Vec<(u64, u64)> = self.iter_packed().collect();
        for (i, &(sx, wx)) in all.iter().enumerate() {
            for &(sy, wy) in &all[i + 1..] {
                if dot(sx, wy) != dot(sy, wx) {
                    return false;
                }
            }
        }
        true
    }

    /// One string per line, states written `s1 r0 ...`, sorted.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for s in self.strings() {
            writeln!(out, "{s}").unwrap();
        }
        out
    }
}
