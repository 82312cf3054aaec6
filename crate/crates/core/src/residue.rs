//! Residue classes, the state alphabet, and state strings.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported modulus. Counts are stored in a few bits per bag
/// position, so the DP keeps moduli small.
pub const MAX_MODULUS: u32 = 64;

/// The set `{n >= 0 : n ≡ a (mod m)}`, stored canonically with `a < m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ResidueClass {
    pub a: u32,
    pub m: u32,
}

impl ResidueClass {
    /// Builds the class of `a` modulo `m`, reducing `a`.
    pub fn new(a: u32, m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidSpec("modulus must be at least 1".into()));
        }
        if m > MAX_MODULUS {
            return Err(Error::InvalidSpec(format!(
                "modulus {m} exceeds the supported maximum {MAX_MODULUS}"
            )));
        }
        Ok(ResidueClass { a: a % m, m })
    }

    pub fn contains(&self, n: u64) -> bool {
        n % self.m as u64 == self.a as u64
    }

    /// Smallest element of the class.
    pub fn min(&self) -> u32 {
        self.a
    }

    /// `{min, min + m}`: the two smallest members.
    pub fn cut_set(&self) -> [u32; 2] {
        [self.a, self.a + self.m]
    }

    /// `(min - n) mod m`, the count that completes `n` to a member.
    pub fn inverse(&self, n: u32) -> u32 {
        let m = self.m as i64;
        ((self.a as i64 - n as i64).rem_euclid(m)) as u32
    }
}

impl fmt::Display for ResidueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.a, self.m)
    }
}

impl FromStr for ResidueClass {
    type Err = Error;

    /// Parses `a/m`.
    fn from_str(s: &str) -> Result<Self> {
        let (a, m) = s
            .trim()
            .split_once('/')
            .ok_or_else(|| Error::InvalidSpec(format!("expected `a/m`, got `{s}`")))?;
        let a: u32 = a
            .trim()
            .parse()
            .map_err(|_| Error::InvalidSpec(format!("bad residue `{a}`")))?;
        let m: u32 = m
            .trim()
            .parse()
            .map_err(|_| Error::InvalidSpec(format!("bad modulus `{m}`")))?;
        ResidueClass::new(a, m)
    }
}

/// A pair `(σ, ρ)` of residue classes sharing one modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub sigma: ResidueClass,
    pub rho: ResidueClass,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    Easy,
    Difficult,
}

impl ProblemSpec {
    pub fn new(sigma: ResidueClass, rho: ResidueClass) -> Result<Self> {
        if sigma.m != rho.m {
            return Err(Error::InvalidSpec(format!(
                "σ and ρ must share a modulus (got {} and {})",
                sigma.m, rho.m
            )));
        }
        Ok(ProblemSpec { sigma, rho })
    }

    /// Shorthand for `σ = a_sigma mod m`, `ρ = a_rho mod m`.
    pub fn residues(a_sigma: u32, a_rho: u32, m: u32) -> Result<Self> {
        ProblemSpec::new(ResidueClass::new(a_sigma, m)?, ResidueClass::new(a_rho, m)?)
    }

    pub fn modulus(&self) -> u32 {
        self.sigma.m
    }

    /// Reflexive Lights Out: σ = EVEN, ρ = ODD.
    pub fn reflexive_all_off() -> Self {
        ProblemSpec::residues(0, 1, 2).expect("valid")
    }

    /// Plain Lights Out: σ = ρ = ODD.
    pub fn all_off() -> Self {
        ProblemSpec::residues(1, 1, 2).expect("valid")
    }

    /// Whether a vertex with `count` selected neighbours (plus its shift)
    /// is satisfied.
    pub fn accepts(&self, selected: bool, count: u64, shift: u32) -> bool {
        let total = count + shift as u64;
        if selected {
            self.sigma.contains(total)
        } else {
            self.rho.contains(total)
        }
    }

    pub fn classify(&self) -> Result<Classification> {
        let m = self.modulus();
        if m < 2 {
            return Err(Error::InvalidSpec(
                "classification needs a modulus of at least 2".into(),
            ));
        }
        let easy = self.rho.a == 0
            || (m == 2 && self.sigma.a == 0 && self.rho.a == 1)
            || (m == 2 && self.sigma.a == 1 && self.rho.a == 1);
        Ok(if easy {
            Classification::Easy
        } else {
            Classification::Difficult
        })
    }
}

impl fmt::Display for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "σ={} ρ={}", self.sigma, self.rho)
    }
}

/// A single position's state: selected (σ) or not (ρ), with its
/// selected-neighbour count reduced modulo m.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum State {
    Sigma(u32),
    Rho(u32),
}

impl State {
    pub fn is_sigma(&self) -> bool {
        matches!(self, State::Sigma(_))
    }

    pub fn count(&self) -> u32 {
        match *self {
            State::Sigma(c) | State::Rho(c) => c,
        }
    }

    pub fn with_count(&self, c: u32) -> State {
        match self {
            State::Sigma(_) => State::Sigma(c),
            State::Rho(_) => State::Rho(c),
        }
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            State::Sigma(c) => write!(f, "s{c}"),
            State::Rho(c) => write!(f, "r{c}"),
        }
    }
}

impl FromStr for State {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            line: 0,
            msg: format!("bad state `{s}`"),
        };
        let (kind, rest) = s.split_at(s.char_indices().nth(1).map_or(s.len(), |(i, _)| i));
        let c: u32 = rest.parse().map_err(|_| bad())?;
        match kind {
            "s" => Ok(State::Sigma(c)),
            "r" => Ok(State::Rho(c)),
            _ => Err(bad()),
        }
    }
}

/// A string over the state alphabet, one entry per bag or portal vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct StateString(pub Vec<State>);

impl StateString {
    pub fn new(states: Vec<State>) -> Self {
        StateString(states)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Splits the string into its σ-vector and weight-vector.
    pub fn decompose(&self) -> (Vec<u8>, Vec<u32>) {
        self.0
            .iter()
            .map(|s| (s.is_sigma() as u8, s.count()))
            .unzip()
    }

    /// Inverse of [`decompose`](Self::decompose).
    pub fn recompose(sigma: &[u8], weights: &[u32]) -> Self {
        assert_eq!(sigma.len(), weights.len());
        StateString(
            sigma
                .iter()
                .zip(weights)
                .map(|(&s, &w)| if s == 1 { State::Sigma(w) } else { State::Rho(w) })
                .collect(),
        )
    }
}

impl fmt::Display for StateString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for s in &self.0 {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl FromStr for StateString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.split_whitespace()
            .map(State::from_str)
            .collect::<Result<Vec<_>>>()
            .map(StateString)
    }
}
