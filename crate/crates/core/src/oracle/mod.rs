//! Brute-force ground truth for occupancy-≤1 bosonic states.
//!
//! A [`SubsetState`] stores each basis vector as the sorted set of occupied
//! modes, with an exact [`Cyclotomic`] coefficient. Annihilating mode `i`
//! simply removes it from every subset containing it (the bosonic factor
//! `√1` is 1), so expansions here are exact sums of products of step
//! coefficients. Nothing in this module goes through [`crate::fock`]
//! arithmetic; [`oracle_compare`] only reads a [`FockState`] for comparison.
//!
//! The exact subtraction sequences in [`sequences`] are written out
//! independently of [`crate::protocols`] and left unscaled (integer
//! combinations of roots of unity); comparisons normalize both sides.

mod cyclotomic;
pub mod sequences;

pub use cyclotomic::{cyclotomic_polynomial, Cyclotomic};

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64 as C64;

use crate::fock::{FockState, Statistics};

pub type ExactStep = Vec<Cyclotomic>;

#[derive(Clone, Debug, PartialEq)]
pub struct SubsetState {
    modes: usize,
    particles: usize,
    terms: BTreeMap<Vec<usize>, Cyclotomic>,
}

impl SubsetState {
    /// All `modes` modes singly occupied, coefficient 1.
    pub fn full(modes: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert((0..modes).collect(), Cyclotomic::one());
        Self {
            modes,
            particles: modes,
            terms,
        }
    }

    /// Arbitrary state from `(subset, coefficient)` pairs. Subsets are
    /// sorted and deduplicated; all must have the same size. Repeated
    /// subsets are summed and exact zeros dropped.
    pub fn from_terms<I>(modes: usize, terms: I) -> Option<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, Cyclotomic)>,
    {
        let mut map: BTreeMap<Vec<usize>, Cyclotomic> = BTreeMap::new();
        let mut particles = None;
        for (mut subset, coeff) in terms {
            subset.sort_unstable();
            subset.dedup();
            if subset.iter().any(|&m| m >= modes) || *particles.get_or_insert(subset.len()) != subset.len() {
                return None;
            }
            *map.entry(subset).or_insert_with(Cyclotomic::zero) += &coeff;
        }
        map.retain(|_, c| !c.is_zero());
        Some(Self {
            modes,
            particles: particles.unwrap_or(0),
            terms: map,
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &Cyclotomic)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, subset: &[usize]) -> Cyclotomic {
        self.terms.get(subset).cloned().unwrap_or_else(Cyclotomic::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Exact `Σ_i coeffs[i] a_i` applied to the state; exact zeros dropped.
    pub fn subtract(&self, coeffs: &[Cyclotomic]) -> Self {
        let mut out = self.subtract_keep_zeros(coeffs);
        out.terms.retain(|_, c| !c.is_zero());
        out
    }

    /// Like [`Self::subtract`] but keeps every subset that received a
    /// contribution, even when the contributions cancel exactly.
    pub fn subtract_keep_zeros(&self, coeffs: &[Cyclotomic]) -> Self {
        assert_eq!(coeffs.len(), self.modes, "coefficient vector length");
        let mut terms: BTreeMap<Vec<usize>, Cyclotomic> = BTreeMap::new();
        for (subset, coeff) in &self.terms {
            for (pos, &mode) in subset.iter().enumerate() {
                let alpha = &coeffs[mode];
                if alpha.is_zero() {
                    continue;
                }
                let mut rest = subset.clone();
                rest.remove(pos);
                let entry = terms.entry(rest).or_insert_with(Cyclotomic::zero);
                *entry += &(coeff * alpha);
            }
        }
        Self {
            modes: self.modes,
            particles: self.particles.saturating_sub(1),
            terms,
        }
    }

    pub fn run(&self, steps: &[ExactStep]) -> Self {
        steps.iter().fold(self.clone(), |s, step| s.subtract(step))
    }

    /// Floating-point amplitudes keyed by subset.
    pub fn to_complex(&self) -> BTreeMap<Vec<usize>, C64> {
        self.terms
            .iter()
            .map(|(k, v)| (k.clone(), v.to_complex()))
            .collect()
    }

    /// Converts to a normalized bosonic [`FockState`].
    pub fn to_fock(&self) -> Option<FockState> {
        let terms: Vec<(Vec<u32>, C64)> = self
            .to_complex()
            .into_iter()
            .map(|(subset, amp)| {
                let mut occ = vec![0u32; self.modes];
                for m in subset {
                    occ[m] = 1;
                }
                (occ, amp)
            })
            .collect();
        FockState::from_terms(self.modes, Statistics::Boson, terms)
            .ok()?
            .normalized()
            .ok()
    }
}

/// Why an oracle comparison failed.
#[derive(Clone, Debug, PartialEq)]
pub enum OracleMismatch {
    Modes { oracle: usize, state: usize },
    NotBosonic,
    /// The state has a term the subset representation cannot express.
    MultipleOccupancy { occ: Vec<u32> },
    ZeroNorm,
    Amplitude {
        subset: Vec<usize>,
        oracle: C64,
        state: C64,
    },
}

impl fmt::Display for OracleMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Modes { oracle, state } => {
                write!(f, "oracle has {oracle} modes, state has {state}")
            }
            Self::NotBosonic => write!(f, "oracle only describes bosonic states"),
            Self::MultipleOccupancy { occ } => write!(f, "term {occ:?} has a multiply occupied mode"),
            Self::ZeroNorm => write!(f, "one side is the zero state"),
            Self::Amplitude {
                subset,
                oracle,
                state,
            } => write!(
                f,
                "subset {subset:?}: oracle {oracle:.3e} vs state {state:.3e} after phase alignment"
            ),
        }
    }
}

/// Term-by-term comparison after normalizing both sides and removing one
/// global phase. Returns the first offending subset on failure.
pub fn oracle_compare(oracle: &SubsetState, state: &FockState, tol: f64) -> Result<(), OracleMismatch> {
    if oracle.modes != state.modes() {
        return Err(OracleMismatch::Modes {
            oracle: oracle.modes,
            state: state.modes(),
        });
    }
    if state.statistics() != Statistics::Boson {
        return Err(OracleMismatch::NotBosonic);
    }
    let mut fock: BTreeMap<Vec<usize>, C64> = BTreeMap::new();
    for (occ, &amp) in state.terms() {
        if occ.as_slice().iter().any(|&n| n > 1) {
            return Err(OracleMismatch::MultipleOccupancy {
                occ: occ.as_slice().to_vec(),
            });
        }
        let subset = occ
            .as_slice()
            .iter()
            .enumerate()
            .filter(|(_, &n)| n == 1)
            .map(|(i, _)| i)
            .collect();
        fock.insert(subset, amp);
    }
    let exact = oracle.to_complex();

    let norm = |m: &BTreeMap<Vec<usize>, C64>| m.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let (no, nf) = (norm(&exact), norm(&fock));
    if no == 0.0 || nf == 0.0 {
        return Err(OracleMismatch::ZeroNorm);
    }
    let overlap: C64 = exact
        .iter()
        .filter_map(|(k, o)| fock.get(k).map(|f| o.conj() * f))
        .sum();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        C64::new(1.0, 0.0)
    };

    let mut keys: Vec<&Vec<usize>> = exact.keys().chain(fock.keys()).collect();
    keys.sort();
    keys.dedup();
    for k in keys {
        let o = exact.get(k).copied().unwrap_or_default() / no;
        let f = fock.get(k).copied().unwrap_or_default() / nf;
        if (f - o * phase).norm() > tol {
            return Err(OracleMismatch::Amplitude {
                subset: k.clone(),
                oracle: o * phase,
                state: f,
            });
        }
    }
    Ok(())
}

/// Outcome of the exact GHZ expansion.
#[derive(Clone, Debug)]
pub struct GhzCertificate {
    pub n: usize,
    /// Coefficient left on the odd-mode subset `{1,3,…,2n-1}` (1-based).
    pub odd_coefficient: Cyclotomic,
    /// Coefficient left on the even-mode subset `{2,4,…,2n}` (1-based).
    pub even_coefficient: Cyclotomic,
    /// Subsets with both odd and even modes that received contributions.
    pub mixed_terms: usize,
    /// True iff every mixed term cancelled exactly.
    pub mixed_all_zero: bool,
}

/// Expands the GHZ sequence on `|sym_2n⟩` without discarding cancelled
/// terms and checks that every mixed monomial sums to exactly zero.
pub fn ghz_cancellation(n: usize) -> GhzCertificate {
    let mut state = SubsetState::full(2 * n);
    for step in sequences::ghz(n) {
        state = state.subtract_keep_zeros(&step);
    }
    // 0-based even index = 1-based odd mode
    let odd: Vec<usize> = (0..n).map(|j| 2 * j).collect();
    let even: Vec<usize> = (0..n).map(|j| 2 * j + 1).collect();
    let mut mixed_terms = 0;
    let mut mixed_all_zero = true;
    for (subset, coeff) in &state.terms {
        if *subset == odd || *subset == even {
            continue;
        }
        mixed_terms += 1;
        mixed_all_zero &= coeff.is_zero();
    }
    GhzCertificate {
        n,
        odd_coefficient: state.coefficient(&odd),
        even_coefficient: state.coefficient(&even),
        mixed_terms,
        mixed_all_zero,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(v: i64) -> Cyclotomic {
        Cyclotomic::from_integer(v)
    }

    #[test]
    fn basis_subtraction_removes_mode() {
        let mut e = vec![int(0); 3];
        e[1] = int(1);
        let out = SubsetState::full(3).subtract(&e);
        assert_eq!(out.terms().count(), 1);
        assert_eq!(out.coefficient(&[0, 2]), int(1));
        assert_eq!(out.particles(), 2);
    }

    #[test]
    fn four_mode_expansion() {
        // (a1+a2+a3+a4)(a1+a2-a3-a4) a1†a2†a3†a4†|0⟩ = 2(-a1†a2† + a3†a4†)|0⟩
        let out = SubsetState::full(4).run(&sequences::bipartite(2));
        assert_eq!(out.terms().count(), 2);
        assert_eq!(out.coefficient(&[0, 1]), int(-2));
        assert_eq!(out.coefficient(&[2, 3]), int(2));
    }

    #[test]
    fn ghz_three_expansion() {
        let out = SubsetState::full(6).run(&sequences::ghz(3));
        assert_eq!(out.terms().count(), 2);
        assert_eq!(out.coefficient(&[0, 2, 4]), int(6));
        assert_eq!(out.coefficient(&[1, 3, 5]), int(6));
    }

    #[test]
    fn ghz_certificate_counts_every_mixed_subset() {
        for n in 2..=5 {
            let cert = ghz_cancellation(n);
            assert!(cert.mixed_all_zero);
            // every n-subset of 2n modes is reached; two are pure
            let total = (1..=n).fold(1usize, |acc, k| acc * (n + k) / k);
            assert_eq!(cert.mixed_terms, total - 2);
            let fact: i64 = (1..=n as i64).product();
            assert_eq!(cert.odd_coefficient, int(fact));
            assert_eq!(cert.even_coefficient, int(fact));
        }
    }

    #[test]
    fn compare_detects_perturbation() {
        let exact = SubsetState::full(4).run(&sequences::bipartite(2));
        let good = exact.to_fock().unwrap();
        assert!(oracle_compare(&exact, &good, 1e-12).is_ok());
        assert!(oracle_compare(&exact, &good.scaled(C64::new(0.0, -3.0)), 1e-12).is_ok());

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bad = FockState::from_terms(
            4,
            Statistics::Boson,
            [(vec![1, 1, 0, 0], C64::new(-h, 0.0)), (vec![0, 0, 1, 1], C64::new(h + 1e-6, 0.0))],
        )
        .unwrap();
        match oracle_compare(&exact, &bad, 1e-10) {
            Err(OracleMismatch::Amplitude { .. }) => {}
            other => panic!("expected amplitude mismatch, got {other:?}"),
        }
    }

    #[test]
    fn compare_rejects_multiple_occupancy() {
        let state = FockState::basis(Statistics::Boson, vec![2, 0]).unwrap();
        let oracle = SubsetState::full(2);
        assert!(matches!(
            oracle_compare(&oracle, &state, 1e-10),
            Err(OracleMismatch::MultipleOccupancy { .. })
        ));
    }
}
