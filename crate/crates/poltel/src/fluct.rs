//! Linear algebra of fluctuation operators over a growable basis of independent
//! unit-variance noise sources.
//!
//! Every source has unit variance by construction; all scaling (squeezing,
//! modulation depth, beamsplitter ratios) lives in the coefficients of a
//! [`FluctuationVector`]. Variances and covariances are then plain dot products,
//! and the commutator bookkeeping of a quadrature pair reduces to a signed sum
//! over quantum source pairs.

use std::collections::{BTreeMap, BTreeSet};

/// One independent unit-variance noise source.
///
/// Quantum sources come in (x, p) pairs that share a pair index and carry the
/// canonical commutator; classical sources are unpaired and commute with
/// everything, so a classical record can be copied and scaled freely.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Source {
    /// Amplitude-like member of quantum pair `k`.
    QuantumX(u32),
    /// Phase-like member of quantum pair `k`.
    QuantumP(u32),
    /// Classical modulation source `k`.
    Classical(u32),
}

impl Source {
    pub fn is_quantum(self) -> bool {
        !matches!(self, Source::Classical(_))
    }

    /// Pair index for quantum sources, `None` for classical ones.
    pub fn pair_id(self) -> Option<u32> {
        match self {
            Source::QuantumX(k) | Source::QuantumP(k) => Some(k),
            Source::Classical(_) => None,
        }
    }
}

/// Allocates fresh source ids. Each independent model run owns one registry,
/// so vectors from different runs never alias.
#[derive(Debug, Default)]
pub struct SourceRegistry {
    next_pair: u32,
    next_classical: u32,
}

impl SourceRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Allocate the (x, p) source pair of one elementary quantum mode.
    pub fn quantum_pair(&mut self) -> (Source, Source) {
        let k = self.next_pair;
        self.next_pair += 1;
        (Source::QuantumX(k), Source::QuantumP(k))
    }

    /// Allocate an unpaired classical modulation source.
    pub fn classical(&mut self) -> Source {
        let k = self.next_classical;
        self.next_classical += 1;
        Source::Classical(k)
    }

    pub fn pairs_allocated(&self) -> u32 {
        self.next_pair
    }

    pub fn classical_allocated(&self) -> u32 {
        self.next_classical
    }
}

/// A linear form over noise sources: one quadrature's fluctuation operator.
///
/// Coefficients are dimensionless and shot-noise normalized (a fresh vacuum
/// quadrature is `1·x_k`, giving variance 1).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FluctuationVector {
    coeffs: BTreeMap<Source, f64>,
}

impl FluctuationVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn of(source: Source, coeff: f64) -> Self {
        let mut v = Self::zero();
        v.add_term(source, coeff);
        v
    }

    /// Accumulate `coeff` onto `source`, dropping exact-zero entries so that
    /// support queries stay meaningful.
    pub fn add_term(&mut self, source: Source, coeff: f64) {
        let entry = self.coeffs.entry(source).or_insert(0.0);
        *entry += coeff;
        if *entry == 0.0 {
            self.coeffs.remove(&source);
        }
    }

    pub fn coeff(&self, source: Source) -> f64 {
        self.coeffs.get(&source).copied().unwrap_or(0.0)
    }

    pub fn support(&self) -> impl Iterator<Item = (Source, f64)> + '_ {
        self.coeffs.iter().map(|(s, c)| (*s, *c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut v = Self::zero();
        for (s, c) in self.support() {
            v.add_term(s, c * factor);
        }
        v
    }

    pub fn plus(&self, other: &Self) -> Self {
        linear_combination(&[(1.0, self), (1.0, other)])
    }

    pub fn minus(&self, other: &Self) -> Self {
        linear_combination(&[(1.0, self), (-1.0, other)])
    }

    /// Second moment of the operator: the sum of squared coefficients.
    pub fn variance(&self) -> f64 {
        self.coeffs.values().map(|c| c * c).sum()
    }

    /// Variance restricted to quantum sources ("no signal" variance).
    pub fn quantum_variance(&self) -> f64 {
        self.coeffs
            .iter()
            .filter(|(s, _)| s.is_quantum())
            .map(|(_, c)| c * c)
            .sum()
    }

    /// Variance restricted to classical modulation sources.
    pub fn classical_variance(&self) -> f64 {
        self.coeffs
            .iter()
            .filter(|(s, _)| !s.is_quantum())
            .map(|(_, c)| c * c)
            .sum()
    }

    /// Correlation moment with `other`; zero for disjoint supports.
    pub fn covariance(&self, other: &Self) -> f64 {
        let (small, large) = if self.coeffs.len() <= other.coeffs.len() {
            (self, other)
        } else {
            (other, self)
        };
        small.coeffs.iter().map(|(s, c)| c * large.coeff(*s)).sum()
    }

    /// Covariance restricted to quantum sources.
    pub fn quantum_covariance(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .filter(|(s, _)| s.is_quantum())
            .map(|(s, c)| c * other.coeff(*s))
            .sum()
    }

    /// Covariance restricted to classical sources.
    pub fn classical_covariance(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .filter(|(s, _)| !s.is_quantum())
            .map(|(s, c)| c * other.coeff(*s))
            .sum()
    }
}

/// Build `Σ factor_i · v_i` in one pass.
pub fn linear_combination(terms: &[(f64, &FluctuationVector)]) -> FluctuationVector {
    let mut out = FluctuationVector::zero();
    for (factor, vec) in terms {
        for (s, c) in vec.support() {
            out.add_term(s, factor * c);
        }
    }
    out
}

/// Commutator bookkeeping for a quadrature pair.
///
/// Returns `Σ_k [x(X_k)·p(P_k) − x(P_k)·p(X_k)]` over quantum pairs `k`;
/// classical sources contribute nothing. A canonically constructed mode gives
/// exactly 1, and any passive network of beamsplitters and phase shifts
/// preserves the value.
pub fn symplectic_product(x: &FluctuationVector, p: &FluctuationVector) -> f64 {
    let mut pairs: BTreeSet<u32> = BTreeSet::new();
    for (s, _) in x.support().chain(p.support()) {
        if let Some(k) = s.pair_id() {
            pairs.insert(k);
        }
    }
    pairs
        .into_iter()
        .map(|k| {
            let (xk, pk) = (Source::QuantumX(k), Source::QuantumP(k));
            x.coeff(xk) * p.coeff(pk) - x.coeff(pk) * p.coeff(xk)
        })
        .sum()
}
