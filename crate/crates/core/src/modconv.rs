//! Cyclic convolution over `Z_{d_1} × … × Z_{d_k}` by multidimensional
//! DFTs in a prime field `F_p` with `d_i | p − 1`.
//!
//! Arrays are stored little-endian: coordinate `0` has stride 1 and
//! coordinate `i` has stride `d_0·…·d_{i−1}`.

use crate::error::{Error, Result};

/// Below this total array size the quadratic convolution is used.
pub const NAIVE_THRESHOLD: usize = 64;

/// Candidates `1 + D'·j` tried before giving up.
pub const PRIME_SEARCH_LIMIT: u64 = 1 << 24;

#[inline]
fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    if p <= u32::MAX as u64 {
        a * b % p
    } else {
        ((a as u128 * b as u128) % p as u128) as u64
    }
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &q in &BASES {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

#[inline]
fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let (s, carry) = a.overflowing_add(b);
    if carry || s >= p {
        s.wrapping_sub(p)
    } else {
        s
    }
}

/// A root of unity of exact order `d` in `F_p` (`d | p − 1`).
fn root_of_order(d: u64, p: u64) -> Option<u64> {
    if d == 1 {
        return Some(1);
    }
    let mut factors = Vec::new();
    let mut rest = d;
    let mut q = 2;
    while q * q <= rest {
        if rest.is_multiple_of(q) {
            factors.push(q);
            while rest.is_multiple_of(q) {
                rest /= q;
            }
        }
        q += 1;
    }
    if rest > 1 {
        factors.push(rest);
    }
    (2..p).map(|x| pow_mod(x, (p - 1) / d, p)).find(|&r| factors.iter().all(|&q| pow_mod(r, d / q, p) != 1))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvolutionPlan {
    dims: Vec<usize>,
    size: usize,
    prime: u64,
    /// `roots[i]` has order exactly `dims[i]`.
    roots: Vec<u64>,
}

impl ConvolutionPlan {
    /// Picks the smallest prime `p = 1 + D'·j > max(bound, D)` where `D'`
    /// is the product of the distinct dimensions, plus matching roots.
    pub fn new(dims: &[usize], bound: u64) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::Invalid("zero dimension".into()));
        }
        let size = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::Invalid("convolution array too large".into()))?;
        let mut distinct: Vec<u64> = dims.iter().map(|&d| d as u64).collect();
        distinct.sort_unstable();
        distinct.dedup();
        let step = distinct
            .iter()
            .try_fold(1u64, |acc, &d| acc.checked_mul(d))
            .ok_or(Error::PrimeSearch)?;
        let floor = bound.max(size as u64);
        let mut prime = None;
        for j in 1..=PRIME_SEARCH_LIMIT {
            let Some(p) = step.checked_mul(j).and_then(|x| x.checked_add(1)) else {
                break;
            };
            if p > floor && is_prime(p) {
                prime = Some(p);
                break;
            }
        }
        let prime = prime.ok_or(Error::PrimeSearch)?;
        let roots = dims
            .iter()
            .map(|&d| root_of_order(d as u64, prime).ok_or(Error::PrimeSearch))
            .collect::<Result<Vec<_>>>()?;
        Ok(ConvolutionPlan {
            dims: dims.to_vec(),
            size,
            prime,
            roots,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn roots(&self) -> &[u64] {
        &self.roots
    }

    /// `h(a) = Σ_{b+c=a} f(b)·g(c)`; exact as long as every true value is
    /// below the prime.
    pub fn convolve(&self, f: &[u64], g: &[u64]) -> Vec<u64> {
        assert_eq!(f.len(), self.size);
        assert_eq!(g.len(), self.size);
        if self.size <= NAIVE_THRESHOLD {
            return convolve_naive(&self.dims, f, g);
        }
        let p = self.prime;
        let mut a: Vec<u64> = f.iter().map(|x| x % p).collect();
        let mut b: Vec<u64> = g.iter().map(|x| x % p).collect();
        self.transform(&mut a, false);
        self.transform(&mut b, false);
        for (x, &y) in a.iter_mut().zip(&b) {
            *x = mul_mod(*x, y, p);
        }
        drop(b);
        self.transform(&mut a, true);
        let inv = pow_mod(self.size as u64 % p, p - 2, p);
        for x in &mut a {
            *x = mul_mod(*x, inv, p);
        }
        a
    }

    /// Like [`convolve`](Self::convolve) without extra allocation: `f`
    /// receives the result and `g` is clobbered.
    pub fn convolve_in_place(&self, f: &mut [u64], g: &mut [u64]) {
        assert_eq!(f.len(), self.size);
        assert_eq!(g.len(), self.size);
        if self.size <= NAIVE_THRESHOLD {
            let h = convolve_naive(&self.dims, f, g);
            f.copy_from_slice(&h);
            return;
        }
        let p = self.prime;
        for x in f.iter_mut().chain(g.iter_mut()) {
            *x %= p;
        }
        self.transform(f, false);
        self.transform(g, false);
        for (x, &y) in f.iter_mut().zip(g.iter()) {
            *x = mul_mod(*x, y, p);
        }
        self.transform(f, true);
        let inv = pow_mod(self.size as u64 % p, p - 2, p);
        for x in f.iter_mut() {
            *x = mul_mod(*x, inv, p);
        }
    }

    /// In-place forward (or unscaled inverse) DFT along every axis.
    pub(crate) fn transform(&self, data: &mut [u64], inverse: bool) {
        let p = self.prime;
        let mut stride = 1usize;
        let mut buf = Vec::new();
        let mut out = Vec::new();
        for (axis, &d) in self.dims.iter().enumerate() {
            if d == 1 {
                continue;
            }
            let mut w = self.roots[axis];
            if inverse {
                w = pow_mod(w, d as u64 - 1, p);
            }
            let powers: Vec<u64> = (0..d).scan(1u64, |acc, _| {
                let cur = *acc;
                *acc = mul_mod(*acc, w, p);
                Some(cur)
            })
            .collect();
            let block = stride * d;
            buf.resize(d, 0);
            out.resize(d, 0);
            for base in (0..data.len()).step_by(block) {
                for inner in 0..stride {
                    let start = base + inner;
                    if d == 2 {
                        let x = data[start];
                        let y = data[start + stride];
                        data[start] = add_mod(x, y, p);
                        data[start + stride] = add_mod(x, p - y, p);
                        continue;
                    }
                    for t in 0..d {
                        buf[t] = data[start + t * stride];
                    }
                    for (k, slot) in out.iter_mut().enumerate() {
                        let mut acc = buf[0];
                        let mut e = 0usize;
                        for &x in &buf[1..] {
                            e += k;
                            if e >= d {
                                e -= d;
                            }
                            acc = add_mod(acc, mul_mod(x, powers[e], p), p);
                        }
                        *slot = acc;
                    }
                    for t in 0..d {
                        data[start + t * stride] = out[t];
                    }
                }
            }
            stride = block;
        }
    }
}

/// Quadratic cyclic convolution with exact `u64` arithmetic.
pub fn convolve_naive(dims: &[usize], f: &[u64], g: &[u64]) -> Vec<u64> {
    let size: usize = dims.iter().product();
    assert_eq!(f.len(), size);
    assert_eq!(g.len(), size);
    let digits = |mut x: usize| -> Vec<usize> {
        dims.iter()
            .map(|&d| {
                let r = x % d;
                x /= d;
                r
            })
            .collect()
    };
    let coords: Vec<Vec<usize>> = (0..size).map(digits).collect();
    let mut h = vec![0u64; size];
    for (b, &fb) in f.iter().enumerate() {
        if fb == 0 {
            continue;
        }
        for (c, &gc) in g.iter().enumerate() {
            if gc == 0 {
                continue;
            }
            let mut idx = 0;
            let mut stride = 1;
            for (i, &d) in dims.iter().enumerate() {
                idx += (coords[b][i] + coords[c][i]) % d * stride;
                stride *= d;
            }
            h[idx] += fb * gc;
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn plan_examples() {
        let p = ConvolutionPlan::new(&[3], 10).unwrap();
        assert_eq!((p.prime(), p.roots()), (13, &[3][..]));
        let p = ConvolutionPlan::new(&[2], 2).unwrap();
        assert_eq!((p.prime(), p.roots()), (3, &[2][..]));
        let p = ConvolutionPlan::new(&[1], 1).unwrap();
        assert_eq!(p.roots(), &[1]);
    }

    #[test]
    fn roots_have_exact_order() {
        for dims in [vec![3, 3, 3, 3], vec![2, 5], vec![4, 6, 7]] {
            let plan = ConvolutionPlan::new(&dims, 1000).unwrap();
            let p = plan.prime();
            assert!(is_prime(p));
            for (&d, &w) in dims.iter().zip(plan.roots()) {
                assert_eq!(pow_mod(w, d as u64, p), 1);
                for k in 1..d as u64 {
                    assert_ne!(pow_mod(w, k, p), 1);
                }
            }
        }
    }

    #[test]
    fn convolve_examples() {
        let p = ConvolutionPlan::new(&[2], 2).unwrap();
        assert_eq!(p.convolve(&[1, 0], &[0, 1]), vec![0, 1]);
        assert_eq!(p.convolve(&[1, 1], &[1, 1]), vec![2, 2]);
        // dims (3, 2): (1, 0) + (2, 1) = (0, 1).
        let p = ConvolutionPlan::new(&[3, 2], 6).unwrap();
        let idx = |a: usize, b: usize| a + 3 * b;
        let mut f = vec![0; 6];
        let mut g = vec![0; 6];
        f[idx(1, 0)] = 1;
        g[idx(2, 1)] = 1;
        let mut want = vec![0; 6];
        want[idx(0, 1)] = 1;
        assert_eq!(p.convolve(&f, &g), want);
    }

    #[test]
    fn primality() {
        let small: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]);
        assert!(is_prime(18446744073709551557));
        assert!(!is_prime(3215031751));
        assert!(!is_prime(18446744073709551555));
    }

    proptest! {
        #[test]
        fn dft_matches_naive(dims in proptest::collection::vec(1usize..5, 1..5), seed in any::<u64>()) {
            let size: usize = dims.iter().product();
            let mut x = seed | 1;
            let mut next = || { x ^= x << 13; x ^= x >> 7; x ^= x << 17; x % 4 };
            let f: Vec<u64> = (0..size).map(|_| next()).collect();
            let g: Vec<u64> = (0..size).map(|_| next()).collect();
            let plan = ConvolutionPlan::new(&dims, 16 * size as u64).unwrap();
            let want = convolve_naive(&dims, &f, &g);
            // Force the transform path regardless of size.
            let p = plan.prime();
            let mut a = f.clone();
            let mut b = g.clone();
            plan.transform(&mut a, false);
            plan.transform(&mut b, false);
            for (u, &v) in a.iter_mut().zip(&b) { *u = mul_mod(*u, v, p); }
            plan.transform(&mut a, true);
            let inv = pow_mod(size as u64 % p, p - 2, p);
            let got: Vec<u64> = a.iter().map(|&u| mul_mod(u, inv, p)).collect();
            prop_assert_eq!(&got, &want);
            prop_assert_eq!(plan.convolve(&f, &g), want);
        }
    }
}
