//! Sparse Fock-space states over a fixed number of modes.
//!
//! A [`FockState`] is a map from occupation vectors to complex amplitudes,
//! restricted to a single particle-number sector. Bosonic and fermionic
//! statistics share the representation; they differ only in the ladder
//! operator conventions:
//!
//! - bosons: `a_i |..n_i..⟩ = √n_i |..n_i-1..⟩`, `a_i† |..n_i..⟩ = √(n_i+1) |..n_i+1..⟩`
//! - fermions: Jordan–Wigner ordering by ascending mode index, so both
//!   `f_i` and `f_i†` pick up `(-1)^(n_0 + ... + n_{i-1})`.
//!
//! All operations are pure and return new states. Amplitudes with modulus
//! below [`PRUNE_TOL`] are dropped after every operation.

mod json;
mod rdm;

pub use json::{StateFile, TermRecord};
pub use rdm::DensityMatrix;

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute amplitude floor applied after every operation.
pub const PRUNE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Boson,
    Fermion,
}

impl fmt::Display for Statistics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Boson => write!(f, "boson"),
            Self::Fermion => write!(f, "fermion"),
        }
    }
}

/// Particle count per mode.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Occupation(Vec<u32>);

impl Occupation {
    pub fn new(occ: Vec<u32>) -> Self {
        Self(occ)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> usize {
        self.0.iter().map(|&n| n as usize).sum()
    }

    pub fn into_vec(self) -> Vec<u32> {
        self.0
    }

    /// Indices of occupied modes, with multiplicity.
    pub fn occupied_modes(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(i, &n)| std::iter::repeat_n(i, n as usize))
            .collect()
    }
}

impl From<Vec<u32>> for Occupation {
    fn from(v: Vec<u32>) -> Self {
        Self(v)
    }
}

impl fmt::Display for Occupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "⟩")
    }
}

/// Coefficient vector `α` of the collective operator `Σ_i α_i a_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeSuperposition {
    coeffs: Vec<C64>,
}

impl ModeSuperposition {
    /// Fails if every coefficient is zero.
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.iter().all(|c| c.norm() == 0.0) {
            return Err(Error::ZeroSuperposition);
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Single-mode operator `a_mode` on `modes` modes.
    pub fn unit(mode: usize, modes: usize) -> Result<Self> {
        if mode >= modes {
            return Err(Error::InvalidParameter(format!(
                "mode {mode} out of range for {modes} modes"
            )));
        }
        let mut coeffs = vec![C64::new(0.0, 0.0); modes];
        coeffs[mode] = C64::new(1.0, 0.0);
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= 1e-12
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self {
            coeffs: self.coeffs.iter().map(|c| c / n).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
        }
    }

    pub fn scaled(&self, factor: C64) -> Result<Self> {
        Self::new(self.coeffs.iter().map(|c| c * factor).collect())
    }

    /// Relabels modes: coefficient of old mode `i` moves to `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.coeffs.len())?;
        let mut coeffs = vec![C64::new(0.0, 0.0); self.coeffs.len()];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[perm[i]] = c;
        }
        Ok(Self { coeffs })
    }

    /// Appends `extra` zero coefficients.
    pub fn extended(&self, extra: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(self.coeffs.len() + extra, C64::new(0.0, 0.0));
        Self { coeffs }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Ladder {
    Lower,
    Raise,
}

/// Pure state in a fixed particle-number sector.
#[derive(Clone, Debug, PartialEq)]
pub struct FockState {
    modes: usize,
    statistics: Statistics,
    particles: usize,
    terms: BTreeMap<Occupation, C64>,
}

impl FockState {
    pub fn vacuum(modes: usize, statistics: Statistics) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Occupation(vec![0; modes]), C64::new(1.0, 0.0));
        Self {
            modes,
            statistics,
            particles: 0,
            terms,
        }
    }

    /// The zero vector of the given sector.
    pub fn zero(modes: usize, statistics: Statistics, particles: usize) -> Self {
        Self {
            modes,
            statistics,
            particles,
            terms: BTreeMap::new(),
        }
    }

    /// Builds a state from explicit terms. Repeated occupations are summed.
    ///
    /// The particle number is taken from the first term; an empty iterator
    /// yields the zero state of the vacuum sector.
    pub fn from_terms<I>(modes: usize, statistics: Statistics, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, C64)>,
    {
        let mut map: BTreeMap<Occupation, C64> = BTreeMap::new();
        let mut particles = None;
        for (occ, amp) in terms {
            if occ.len() != modes {
                return Err(Error::ModeMismatch {
                    expected: modes,
                    found: occ.len(),
                });
            }
            if statistics == Statistics::Fermion && occ.iter().any(|&n| n > 1) {
                return Err(Error::InvalidOccupation {
                    occ,
                    reason: "fermionic occupations must be 0 or 1",
                });
            }
            let total: usize = occ.iter().map(|&n| n as usize).sum();
            match particles {
                None => particles = Some(total),
                Some(p) if p != total => {
                    return Err(Error::ParticleMismatch {
                        expected: p,
                        found: total,
                    })
                }
                _ => {}
            }
            *map.entry(Occupation(occ)).or_default() += amp;
        }
        Ok(Self {
            modes,
            statistics,
            particles: particles.unwrap_or(0),
            terms: map,
        }
        .pruned())
    }

    /// Single basis vector with unit amplitude.
    pub fn basis(statistics: Statistics, occ: Vec<u32>) -> Result<Self> {
        Self::from_terms(occ.len(), statistics, [(occ, C64::new(1.0, 0.0))])
    }

    /// `|1,1,…,1⟩`: one boson in each of `modes` modes.
    pub fn sym_state(modes: usize) -> Self {
        Self::filled(modes, Statistics::Boson)
    }

    /// `f_1†…f_N†|0⟩`: one fermion in each of `modes` modes.
    pub fn asym_state(modes: usize) -> Self {
        Self::filled(modes, Statistics::Fermion)
    }

    fn filled(modes: usize, statistics: Statistics) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Occupation(vec![1; modes]), C64::new(1.0, 0.0));
        Self {
            modes,
            statistics,
            particles: modes,
            terms,
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// True for the zero vector (no surviving terms).
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Occupation, &C64)> {
        self.terms.iter()
    }

    pub fn amplitude(&self, occ: &[u32]) -> C64 {
        self.terms
            .get(&Occupation(occ.to_vec()))
            .copied()
            .unwrap_or_default()
    }

    pub fn norm_squared(&self) -> f64 {
        self.terms.values().map(|c| c.norm_sqr()).sum()
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self {
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * factor)).collect(),
            ..self.clone_empty()
        }
        .pruned()
    }

    /// Unit-norm copy together with the discarded squared norm.
    pub fn normalize(&self) -> Result<(Self, f64)> {
        let weight = self.norm_squared();
        if self.is_zero() || weight == 0.0 {
            return Err(Error::ZeroState);
        }
        Ok((self.scaled(C64::new(1.0 / weight.sqrt(), 0.0)), weight))
    }

    pub fn normalized(&self) -> Result<Self> {
        self.normalize().map(|(s, _)| s)
    }

    /// `self + other` within the same sector.
    pub fn plus(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if self.particles != other.particles {
            return Err(Error::ParticleMismatch {
                expected: self.particles,
                found: other.particles,
            });
        }
        let mut out = self.clone();
        for (k, v) in &other.terms {
            *out.terms.entry(k.clone()).or_default() += v;
        }
        Ok(out.pruned())
    }

    /// Applies `Σ_i α_i a_i`. The result may be the zero state.
    pub fn subtract(&self, s: &ModeSuperposition) -> Result<Self> {
        if self.particles == 0 {
            return Err(Error::VacuumSubtraction);
        }
        self.ladder(s, Ladder::Lower)
    }

    /// Applies `Σ_i α_i a_i†`. Pauli-blocked fermionic terms vanish.
    pub fn create(&self, s: &ModeSuperposition) -> Result<Self> {
        self.ladder(s, Ladder::Raise)
    }

    fn ladder(&self, s: &ModeSuperposition, kind: Ladder) -> Result<Self> {
        if s.len() != self.modes {
            return Err(Error::ModeMismatch {
                expected: self.modes,
                found: s.len(),
            });
        }
        let fermion = self.statistics == Statistics::Fermion;
        let mut out: BTreeMap<Occupation, C64> = BTreeMap::new();
        for (occ, &amp) in &self.terms {
            let mut parity = 0u32;
            for (i, &alpha) in s.coeffs().iter().enumerate() {
                let n = occ.0[i];
                if alpha != C64::new(0.0, 0.0) {
                    let factor = match (kind, fermion) {
                        (Ladder::Lower, _) if n == 0 => None,
                        (Ladder::Raise, true) if n == 1 => None,
                        (Ladder::Lower, false) => Some((n as f64).sqrt()),
                        (Ladder::Raise, false) => Some(((n + 1) as f64).sqrt()),
                        (_, true) => Some(if parity.is_multiple_of(2) { 1.0 } else { -1.0 }),
                    };
                    if let Some(f) = factor {
                        let mut next = occ.0.clone();
                        match kind {
                            Ladder::Lower => next[i] -= 1,
                            Ladder::Raise => next[i] += 1,
                        }
                        *out.entry(Occupation(next)).or_default() += amp * alpha * f;
                    }
                }
                parity += n;
            }
        }
        let particles = match kind {
            Ladder::Lower => self.particles - 1,
            Ladder::Raise => self.particles + 1,
        };
        Ok(Self {
            particles,
            terms: out,
            ..self.clone_empty()
        }
        .pruned())
    }

    /// Relabels modes: old mode `i` becomes mode `perm[i]`.
    ///
    /// Fermionic amplitudes pick up the sign of the induced reordering.
    pub fn permute_modes(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.modes)?;
        let mut out = BTreeMap::new();
        for (occ, &amp) in &self.terms {
            let mut next = vec![0; self.modes];
            for (i, &n) in occ.0.iter().enumerate() {
                next[perm[i]] = n;
            }
            let sign = if self.statistics == Statistics::Fermion {
                let targets: Vec<usize> = occ.occupied_modes().iter().map(|&i| perm[i]).collect();
                permutation_sign(&targets)
            } else {
                1.0
            };
            out.insert(Occupation(next), amp * sign);
        }
        Ok(Self {
            terms: out,
            ..self.clone_empty()
        })
    }

    /// Appends `extra` empty modes.
    pub fn extend_modes(&self, extra: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(occ, &amp)| {
                let mut v = occ.0.clone();
                v.resize(self.modes + extra, 0);
                (Occupation(v), amp)
            })
            .collect();
        Self {
            modes: self.modes + extra,
            terms,
            ..self.clone_empty()
        }
    }

    /// Keeps the first `keep` modes. Every dropped mode must be empty.
    pub fn restrict_modes(&self, keep: usize) -> Result<Self> {
        if keep > self.modes {
            return Err(Error::ModeMismatch {
                expected: self.modes,
                found: keep,
            });
        }
        let mut terms = BTreeMap::new();
        for (occ, &amp) in &self.terms {
            if occ.0[keep..].iter().any(|&n| n > 0) {
                return Err(Error::InvalidOccupation {
                    occ: occ.0.clone(),
                    reason: "dropped modes are occupied",
                });
            }
            terms.insert(Occupation(occ.0[..keep].to_vec()), amp);
        }
        Ok(Self {
            modes: keep,
            terms,
            ..self.clone_empty()
        })
    }

    /// Single-particle basis change `a_i† → Σ_j u[(j, i)] a_j†`.
    ///
    /// Each term is rebuilt from the vacuum by repeated creation, so this
    /// is exact but scales with the number of ways to distribute particles.
    pub fn transform_modes(&self, u: &DMatrix<C64>) -> Result<Self> {
        if u.nrows() != self.modes || u.ncols() != self.modes {
            return Err(Error::ModeMismatch {
                expected: self.modes,
                found: u.nrows(),
            });
        }
        let columns: Vec<ModeSuperposition> = (0..self.modes)
            .map(|i| ModeSuperposition {
                coeffs: u.column(i).iter().copied().collect(),
            })
            .collect();
        let mut acc = Self::zero(self.modes, self.statistics, self.particles);
        for (occ, &amp) in &self.terms {
            let mut piece = Self::vacuum(self.modes, self.statistics).scaled(amp);
            let mut norm = 1.0;
            for i in (0..self.modes).rev() {
                for k in 0..occ.0[i] {
                    piece = piece.create(&columns[i])?;
                    norm *= (k + 1) as f64;
                }
            }
            acc = acc.plus(&piece.scaled(C64::new(1.0 / norm.sqrt(), 0.0)))?;
        }
        Ok(acc)
    }

    /// Trace-normalized one-body density matrix `ρ[i, j] = ⟨a_j† a_i⟩ / N`.
    pub fn single_particle_rdm(&self) -> Result<DensityMatrix> {
        if self.particles == 0 {
            return Err(Error::VacuumSubtraction);
        }
        let norm = self.norm_squared();
        if self.is_zero() || norm == 0.0 {
            return Err(Error::ZeroState);
        }
        let lowered: Vec<Self> = (0..self.modes)
            .map(|i| self.subtract(&ModeSuperposition::unit(i, self.modes)?))
            .collect::<Result<_>>()?;
        let scale = 1.0 / (self.particles as f64 * norm);
        let m = DMatrix::from_fn(self.modes, self.modes, |i, j| {
            inner_product(&lowered[j], &lowered[i]).expect("same sector") * scale
        });
        Ok(DensityMatrix::new(m))
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.modes != other.modes {
            return Err(Error::ModeMismatch {
                expected: self.modes,
                found: other.modes,
            });
        }
        if self.statistics != other.statistics {
            return Err(Error::StatisticsMismatch);
        }
        Ok(())
    }

    fn clone_empty(&self) -> Self {
        Self::zero(self.modes, self.statistics, self.particles)
    }

    fn pruned(mut self) -> Self {
        self.terms.retain(|_, v| v.norm() >= PRUNE_TOL);
        self
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (occ, amp)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({:.6}{:+.6}i){}", amp.re, amp.im, occ)?;
        }
        Ok(())
    }
}

/// `⟨a|b⟩`. States in different particle sectors are orthogonal.
pub fn inner_product(a: &FockState, b: &FockState) -> Result<C64> {
    a.check_compatible(b)?;
    if a.particles != b.particles {
        return Ok(C64::new(0.0, 0.0));
    }
    let (small, large, flip) = if a.terms.len() <= b.terms.len() {
        (a, b, false)
    } else {
        (b, a, true)
    };
    let mut acc = C64::new(0.0, 0.0);
    for (occ, &x) in &small.terms {
        if let Some(&y) = large.terms.get(occ) {
            acc += if flip { y.conj() * x } else { x.conj() * y };
        }
    }
    Ok(acc)
}

/// `|⟨a|b⟩|² / (⟨a|a⟩⟨b|b⟩)`, insensitive to global phase and scale.
pub fn fidelity(a: &FockState, b: &FockState) -> Result<f64> {
    let na = a.norm_squared();
    let nb = b.norm_squared();
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroState);
    }
    Ok(inner_product(a, b)?.norm_sqr() / (na * nb))
}

fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::ModeMismatch {
            expected: n,
            found: perm.len(),
        });
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidParameter(format!("{perm:?} is not a permutation")));
        }
    }
    Ok(())
}

/// Sign of the permutation that sorts `seq` (distinct entries).
fn permutation_sign(seq: &[usize]) -> f64 {
    let mut inversions = 0usize;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                inversions += 1;
            }
        }
    }
    if inversions.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}
