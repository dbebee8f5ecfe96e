//! Linear-optics simulation of heralded subtraction.
//!
//! A [`Beamsplitter`] acts on creation operators as
//!
//! ```text
//! a† → cos(θ/2) a† − e^{−iφ} sin(θ/2) b†
//! b† → cos(θ/2) b† + e^{iφ} sin(θ/2) a†
//! ```
//!
//! which is the action of `exp[(θ/2)(a†b e^{iφ} − a b† e^{−iφ})]`. Photon
//! number is conserved, so every expansion is exact with no Fock cutoff.
//!
//! A weak tap `Beamsplitter::tap(ancilla, signal, t)` sends
//! `signal† → t signal† + √(1−t²) ancilla†`; detecting exactly one photon in
//! the ancilla leaves `t^(N−1) √(1−t²) a_signal |ψ⟩`.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{fidelity, FockState, ModeSuperposition, Statistics};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Beamsplitter {
    pub mode_a: usize,
    pub mode_b: usize,
    pub theta: f64,
    pub phi: f64,
}

impl Beamsplitter {
    pub fn new(mode_a: usize, mode_b: usize, theta: f64, phi: f64) -> Result<Self> {
        if mode_a == mode_b {
            return Err(Error::InvalidParameter(format!(
                "beamsplitter needs two distinct modes, got {mode_a} twice"
            )));
        }
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::InvalidParameter("beamsplitter angles must be finite".into()));
        }
        Ok(Self {
            mode_a,
            mode_b,
            theta,
            phi,
        })
    }

    /// Balanced splitter with `φ = 0`: `a† → (a† − b†)/√2`, `b† → (b† + a†)/√2`.
    pub fn fifty_fifty(mode_a: usize, mode_b: usize) -> Result<Self> {
        Self::new(mode_a, mode_b, FRAC_PI_2, 0.0)
    }

    /// Weak tap with transmittivity `t`: `signal† → t signal† + √(1−t²) ancilla†`.
    pub fn tap(ancilla: usize, signal: usize, t: f64) -> Result<Self> {
        check_t(t)?;
        Self::new(ancilla, signal, 2.0 * t.acos(), 0.0)
    }

    fn cos_sin(&self) -> (f64, f64) {
        if self.theta == FRAC_PI_2 {
            (FRAC_1_SQRT_2, FRAC_1_SQRT_2)
        } else {
            let h = self.theta / 2.0;
            (h.cos(), h.sin())
        }
    }

    /// `t = cos(θ/2)`.
    pub fn transmittivity(&self) -> f64 {
        self.cos_sin().0
    }

    /// `r = sin(θ/2) e^{iφ}`.
    pub fn reflectivity(&self) -> C64 {
        let s = self.cos_sin().1;
        phase(self.phi) * s
    }

    /// `[[u_aa, u_ab], [u_ba, u_bb]]`; column `j` is the image of the
    /// creation operator of mode `j` (`a` first, `b` second).
    pub fn matrix(&self) -> [[C64; 2]; 2] {
        let (c, s) = self.cos_sin();
        let c = C64::new(c, 0.0);
        let e = phase(self.phi);
        [[c, e * s], [-e.conj() * s, c]]
    }

    /// Embedding of [`Self::matrix`] into a `modes × modes` identity.
    pub fn full_matrix(&self, modes: usize) -> DMatrix<C64> {
        let mut u = DMatrix::identity(modes, modes);
        let m = self.matrix();
        let idx = [self.mode_a, self.mode_b];
        for (r, &i) in idx.iter().enumerate() {
            for (c, &j) in idx.iter().enumerate() {
                u[(i, j)] = m[r][c];
            }
        }
        u
    }
}

fn phase(phi: f64) -> C64 {
    if phi == 0.0 {
        C64::new(1.0, 0.0)
    } else {
        C64::from_polar(1.0, phi)
    }
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::InvalidParameter(format!("transmittivity must lie in (0, 1), got {t}")));
    }
    Ok(())
}

fn factorial(n: u32) -> f64 {
    (2..=n).map(f64::from).product()
}

fn binomial(n: u32, k: u32) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Exact action of `bs` on a bosonic state via the binomial expansion of
/// both transformed creation operators.
pub fn apply_beamsplitter(state: &FockState, bs: &Beamsplitter) -> Result<FockState> {
    if state.statistics() != Statistics::Boson {
        return Err(Error::WrongStatistics { expected: "bosonic" });
    }
    let modes = state.modes();
    if bs.mode_a >= modes || bs.mode_b >= modes {
        return Err(Error::InvalidParameter(format!(
            "beamsplitter on modes ({}, {}) outside a {modes}-mode state",
            bs.mode_a, bs.mode_b
        )));
    }
    let [[u_aa, u_ab], [u_ba, u_bb]] = bs.matrix();
    let (a, b) = (bs.mode_a, bs.mode_b);
    let mut out: BTreeMap<Vec<u32>, C64> = BTreeMap::new();
    for (occ, &amp) in state.terms() {
        let occ = occ.as_slice();
        let (na, nb) = (occ[a], occ[b]);
        let norm_in = (factorial(na) * factorial(nb)).sqrt();
        for k in 0..=na {
            let from_a = u_aa.powu(k) * u_ba.powu(na - k) * binomial(na, k);
            for l in 0..=nb {
                let from_b = u_ab.powu(l) * u_bb.powu(nb - l) * binomial(nb, l);
                let out_a = k + l;
                let out_b = na + nb - out_a;
                let norm_out = (factorial(out_a) * factorial(out_b)).sqrt();
                let mut next = occ.to_vec();
                next[a] = out_a;
                next[b] = out_b;
                *out.entry(next).or_default() += amp * from_a * from_b * (norm_out / norm_in);
            }
        }
    }
    if out.is_empty() {
        return Ok(state.clone());
    }
    FockState::from_terms(modes, Statistics::Boson, out)
}

/// Ordered beamsplitters acting on signal modes plus vacuum ancillas.
///
/// The network spans `signal + ancilla_modes.len()` modes. The signal state
/// fills the non-ancilla indices in ascending order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BSNetwork {
    pub ancilla_modes: Vec<usize>,
    pub elements: Vec<Beamsplitter>,
}

/// One ancilla detection pattern and the signal state it leaves behind.
#[derive(Clone, Debug)]
pub struct HeraldOutcome {
    /// Photon count per ancilla, in the order of `ancilla_modes`.
    pub pattern: Vec<u32>,
    pub probability: f64,
    /// Normalized state on the signal modes.
    pub conditional_state: FockState,
}

impl BSNetwork {
    pub fn new(ancilla_modes: Vec<usize>, elements: Vec<Beamsplitter>) -> Self {
        Self {
            ancilla_modes,
            elements,
        }
    }

    pub fn total_modes(&self, signal_modes: usize) -> usize {
        signal_modes + self.ancilla_modes.len()
    }

    fn signal_indices(&self, signal_modes: usize) -> Vec<usize> {
        (0..self.total_modes(signal_modes))
            .filter(|i| !self.ancilla_modes.contains(i))
            .collect()
    }

    fn validate(&self, signal_modes: usize) -> Result<()> {
        let total = self.total_modes(signal_modes);
        let mut seen = vec![false; total];
        for &m in &self.ancilla_modes {
            if m >= total || std::mem::replace(&mut seen[m], true) {
                return Err(Error::InvalidParameter(format!(
                    "ancilla mode {m} is out of range or repeated for {total} total modes"
                )));
            }
        }
        for bs in &self.elements {
            if bs.mode_a >= total || bs.mode_b >= total || bs.mode_a == bs.mode_b {
                return Err(Error::InvalidParameter(format!(
                    "beamsplitter ({}, {}) invalid for {total} total modes",
                    bs.mode_a, bs.mode_b
                )));
            }
        }
        Ok(())
    }

    /// Places the signal state into the network's mode space with vacuum
    /// ancillas.
    pub fn embed(&self, state: &FockState) -> Result<FockState> {
        self.validate(state.modes())?;
        let signal = self.signal_indices(state.modes());
        let perm: Vec<usize> = signal.iter().chain(&self.ancilla_modes).copied().collect();
        state.extend_modes(self.ancilla_modes.len()).permute_modes(&perm)
    }

    /// Output state on all network modes, before detection.
    pub fn apply(&self, state: &FockState) -> Result<FockState> {
        let mut out = self.embed(state)?;
        for bs in &self.elements {
            out = apply_beamsplitter(&out, bs)?;
        }
        Ok(out)
    }

    /// Composite creation-operator transform on all network modes.
    pub fn matrix(&self, signal_modes: usize) -> DMatrix<C64> {
        let total = self.total_modes(signal_modes);
        self.elements
            .iter()
            .fold(DMatrix::identity(total, total), |acc, bs| bs.full_matrix(total) * acc)
    }

    /// Every detection pattern with nonzero probability, sorted by pattern.
    /// Probabilities refer to the normalized input.
    pub fn run(&self, state: &FockState) -> Result<Vec<HeraldOutcome>> {
        let input = state.normalized()?;
        let signal_modes = input.modes();
        let signal = self.signal_indices(signal_modes);
        let out = self.apply(&input)?;
        let mut groups: BTreeMap<Vec<u32>, Vec<(Vec<u32>, C64)>> = BTreeMap::new();
        for (occ, &amp) in out.terms() {
            let occ = occ.as_slice();
            let pattern = self.ancilla_modes.iter().map(|&m| occ[m]).collect();
            let rest = signal.iter().map(|&m| occ[m]).collect();
            groups.entry(pattern).or_default().push((rest, amp));
        }
        let mut outcomes = Vec::with_capacity(groups.len());
        for (pattern, terms) in groups {
            let raw = FockState::from_terms(signal_modes, Statistics::Boson, terms)?;
            if raw.is_zero() {
                continue;
            }
            let (conditional_state, probability) = raw.normalize()?;
            outcomes.push(HeraldOutcome {
                pattern,
                probability,
                conditional_state,
            });
        }
        Ok(outcomes)
    }

    /// The outcome for one detection pattern.
    pub fn outcome(&self, state: &FockState, pattern: &[u32]) -> Result<HeraldOutcome> {
        if pattern.len() != self.ancilla_modes.len() {
            return Err(Error::InvalidParameter(format!(
                "pattern has {} entries for {} ancillas",
                pattern.len(),
                self.ancilla_modes.len()
            )));
        }
        self.run(state)?
            .into_iter()
            .find(|o| o.pattern == pattern)
            .ok_or(Error::ZeroProbability)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Taps `mode` with transmittivity `t` and keeps the single-photon herald.
pub fn heralded_subtract(state: &FockState, mode: usize, t: f64) -> Result<HeraldOutcome> {
    if mode >= state.modes() {
        return Err(Error::InvalidParameter(format!(
            "mode {mode} out of range for {} modes",
            state.modes()
        )));
    }
    let ancilla = state.modes();
    let network = BSNetwork::new(vec![ancilla], vec![Beamsplitter::tap(ancilla, mode, t)?]);
    network.outcome(state, &[1])
}

/// Detectors of the four-mode superposition-subtraction module.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Detector {
    A,
    B,
    C,
    D,
}

impl Detector {
    pub const ALL: [Detector; 4] = [Detector::A, Detector::B, Detector::C, Detector::D];

    /// Position among the module's ancillas.
    pub fn index(self) -> usize {
        self as usize
    }

    /// Single-click pattern for this detector.
    pub fn pattern(self) -> Vec<u32> {
        let mut p = vec![0; 4];
        p[self.index()] = 1;
        p
    }

    /// Mode superposition `½(±a_1 ± a_2 ± a_3 ± a_4)` removed by a single
    /// click at this detector.
    pub fn superposition(self) -> ModeSuperposition {
        let signs: [f64; 4] = match self {
            Detector::A => [1.0, -1.0, 1.0, -1.0],
            Detector::B => [1.0, 1.0, -1.0, -1.0],
            Detector::C => [-1.0, 1.0, 1.0, -1.0],
            Detector::D => [1.0, 1.0, 1.0, 1.0],
        };
        ModeSuperposition::from_real(&signs.map(|x| 0.5 * x)).expect("unit norm")
    }
}

impl fmt::Display for Detector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Detector::A => "a",
            Detector::B => "b",
            Detector::C => "c",
            Detector::D => "d",
        };
        f.write_str(c)
    }
}

impl FromStr for Detector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(Detector::A),
            "b" => Ok(Detector::B),
            "c" => Ok(Detector::C),
            "d" => Ok(Detector::D),
            _ => Err(Error::InvalidParameter(format!("unknown detector {s:?}"))),
        }
    }
}

/// Four signal modes (0–3) tapped into ancillas `a, b, c, d` (4–7), which
/// then pass through four balanced splitters:
///
/// ```text
/// BS1: a† → (a† + b†)/√2, b† → (b† − a†)/√2
/// BS2: a† → (a† − c†)/√2, c† → (c† + a†)/√2
/// BS3: b† → (b† + d†)/√2, d† → (d† − b†)/√2
/// BS4: c† → (c† + d†)/√2, d† → (d† − c†)/√2
/// ```
///
/// BS1 and BS4 act first. A single click at `d` heralds
/// `½(a_1+a_2+a_3+a_4)`, at `b` it heralds `½(a_1+a_2−a_3−a_4)`.
pub fn module_network(t: f64) -> Result<BSNetwork> {
    let [a, b, c, d] = [4, 5, 6, 7];
    let mut elements = (0..4)
        .map(|k| Beamsplitter::tap(4 + k, k, t))
        .collect::<Result<Vec<_>>>()?;
    elements.extend([
        Beamsplitter::fifty_fifty(b, a)?,
        Beamsplitter::fifty_fifty(d, c)?,
        Beamsplitter::fifty_fifty(a, c)?,
        Beamsplitter::fifty_fifty(d, b)?,
    ]);
    Ok(BSNetwork::new(vec![a, b, c, d], elements))
}

fn check_four_modes(state: &FockState) -> Result<()> {
    if state.modes() != 4 {
        return Err(Error::ModeMismatch {
            expected: 4,
            found: state.modes(),
        });
    }
    Ok(())
}

/// Single-click outcomes of the module, one per detector that can fire.
pub fn superposition_subtraction_module(state: &FockState, t: f64) -> Result<Vec<(Detector, HeraldOutcome)>> {
    check_four_modes(state)?;
    let outcomes = module_network(t)?.run(state)?;
    Ok(Detector::ALL
        .iter()
        .filter_map(|&det| {
            let p = det.pattern();
            outcomes
                .iter()
                .find(|o| o.pattern == p)
                .map(|o| (det, o.clone()))
        })
        .collect())
}

/// The module outcome for a single click at `detector`.
pub fn module_click(state: &FockState, t: f64, detector: Detector) -> Result<HeraldOutcome> {
    check_four_modes(state)?;
    module_network(t)?.outcome(state, &detector.pattern())
}

/// Network whose single click on the returned ancilla heralds
/// `Σ_i α_i a_i` (normalized, up to a global phase) on `M = α.len()` modes.
///
/// Each signal mode is tapped into its own ancilla (`M + i`), then a chain
/// of splitters on ancilla pairs `(i−1, i)` for `i = 1 … M−1` funnels the
/// superposition onto the last ancilla.
pub fn subtraction_network(alpha: &ModeSuperposition, t: f64) -> Result<(BSNetwork, usize)> {
    let m = alpha.len();
    let w: Vec<C64> = alpha.normalized().coeffs().to_vec();
    let mut elements = (0..m)
        .map(|i| Beamsplitter::tap(m + i, i, t))
        .collect::<Result<Vec<_>>>()?;

    // Walk from the detector backwards. `acc` is the row entry that still
    // has to be split across ancillas 0..=k; its phase is kept equal to the
    // target phase at position k.
    let global = if w[m - 1].norm() > 0.0 {
        w[m - 1].conj() / w[m - 1].norm()
    } else {
        C64::new(1.0, 0.0)
    };
    let w: Vec<C64> = w.iter().map(|x| x * global).collect();
    let mut acc = C64::new(1.0, 0.0);
    let mut chain = Vec::with_capacity(m.saturating_sub(1));
    for k in (1..m).rev() {
        let c = if acc.norm() > 0.0 {
            (w[k].norm() / acc.norm()).min(1.0)
        } else {
            1.0
        };
        let s = (1.0 - c * c).max(0.0).sqrt();
        let phi = if w[k - 1].norm() > 0.0 && acc.norm() > 0.0 {
            PI - w[k - 1].arg() + acc.arg()
        } else {
            0.0
        };
        let theta = 2.0 * c.acos();
        chain.push(Beamsplitter::new(m + k - 1, m + k, theta, phi)?);
        acc = acc * -phase(phi).conj() * s;
    }
    chain.reverse();
    elements.extend(chain);
    let ancillas = (m..2 * m).collect();
    Ok((BSNetwork::new(ancillas, elements), m - 1))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DetectorModel {
    /// Detectors report exact photon numbers.
    #[default]
    Resolving,
    /// Detectors only report whether at least one photon arrived.
    Threshold,
}

impl FromStr for DetectorModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "resolving" => Ok(Self::Resolving),
            "threshold" => Ok(Self::Threshold),
            _ => Err(Error::InvalidParameter(format!("unknown detector model {s:?}"))),
        }
    }
}

/// One pass through a network, post-selected on `pattern`.
#[derive(Clone, Debug)]
pub struct HeraldStep {
    pub network: BSNetwork,
    pub pattern: Vec<u32>,
}

impl HeraldStep {
    fn accepts(&self, observed: &[u32], model: DetectorModel) -> bool {
        match model {
            DetectorModel::Resolving => observed == self.pattern.as_slice(),
            DetectorModel::Threshold => observed
                .iter()
                .zip(&self.pattern)
                .all(|(&o, &p)| (o > 0) == (p > 0)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeraldedRun {
    /// Probability that every step heralds as required.
    pub probability: f64,
    /// Fidelity of the conditional (possibly mixed) output with `ideal`.
    pub fidelity: f64,
}

/// Feeds the input through each step in turn with fresh vacuum ancillas.
///
/// With threshold detectors a herald can hide several photon numbers, so
/// the conditional output is a mixture; its fidelity is the
/// probability-weighted average over the branches.
pub fn herald_sequence(input: &FockState, steps: &[HeraldStep], ideal: &FockState, model: DetectorModel) -> Result<HeraldedRun> {
    let mut branches = vec![(1.0, input.normalized()?)];
    for step in steps {
        let mut next = Vec::new();
        for (weight, state) in &branches {
            for o in step.network.run(state)? {
                if step.accepts(&o.pattern, model) {
                    next.push((weight * o.probability, o.conditional_state));
                }
            }
        }
        if next.is_empty() {
            return Err(Error::ZeroProbability);
        }
        branches = next;
    }
    let probability: f64 = branches.iter().map(|(w, _)| w).sum();
    let mut weighted = 0.0;
    for (w, s) in &branches {
        weighted += w * fidelity(ideal, s)?;
    }
    Ok(HeraldedRun {
        probability,
        fidelity: weighted / probability,
    })
}

/// Module passes for a click sequence, e.g. `[B, D]`.
pub fn module_sequence(t: f64, clicks: &[Detector]) -> Result<Vec<HeraldStep>> {
    let network = module_network(t)?;
    Ok(clicks
        .iter()
        .map(|d| HeraldStep {
            network: network.clone(),
            pattern: d.pattern(),
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub t: f64,
    pub pattern: String,
    pub probability: f64,
    pub fidelity: f64,
}

/// Herald probability and fidelity of a module click sequence at each `t`.
/// Rows follow the order of `t_values`.
pub fn efficiency_sweep(
    input: &FockState,
    clicks: &[Detector],
    ideal: &FockState,
    t_values: &[f64],
    model: DetectorModel,
) -> Result<Vec<SweepRow>> {
    let pattern = clicks.iter().map(Detector::to_string).collect::<Vec<_>>().join(">");
    t_values
        .par_iter()
        .map(|&t| {
            let run = herald_sequence(input, &module_sequence(t, clicks)?, ideal, model)?;
            Ok(SweepRow {
                t,
                pattern: pattern.clone(),
                probability: run.probability,
                fidelity: run.fidelity,
            })
        })
        .collect()
}

/// `count` evenly spaced values from `start` to `end` inclusive.
pub fn linear_grid(start: f64, end: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![start],
        _ => (0..count)
            .map(|i| start + (end - start) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

/// Transmittivities whose `x = 1/t² − 1` values are log-spaced between
/// those of `t_lo` and `t_hi`.
pub fn log_x_grid(t_lo: f64, t_hi: f64, count: usize) -> Vec<f64> {
    let x = |t: f64| 1.0 / (t * t) - 1.0;
    linear_grid(x(t_lo).ln(), x(t_hi).ln(), count)
        .into_iter()
        .map(|lx| 1.0 / (1.0 + lx.exp()).sqrt())
        .collect()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs.iter().zip(ys).map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Scaling exponent of the herald probability against `1/t² − 1`, divided
/// by the number of subtractions in the sequence.
pub fn efficiency_exponent(rows: &[SweepRow], subtractions: usize) -> f64 {
    let xs: Vec<f64> = rows.iter().map(|r| 1.0 / (r.t * r.t) - 1.0).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.probability).collect();
    loglog_slope(&xs, &ys) / subtractions as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(occ: Vec<u32>) -> FockState {
        FockState::basis(Statistics::Boson, occ).unwrap()
    }

    #[test]
    fn single_photon_split() {
        let theta = 0.7;
        let bs = Beamsplitter::new(0, 1, theta, 0.0).unwrap();
        let out = apply_beamsplitter(&basis(vec![1, 0]), &bs).unwrap();
        let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        assert!((out.amplitude(&[1, 0]) - C64::new(c, 0.0)).norm() < 1e-15);
        assert!((out.amplitude(&[0, 1]) - C64::new(-s, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn zero_angle_is_identity() {
        let psi = basis(vec![2, 1]);
        let out = apply_beamsplitter(&psi, &Beamsplitter::new(0, 1, 0.0, 0.3).unwrap()).unwrap();
        assert_eq!(out, psi);
    }

    #[test]
    fn hong_ou_mandel() {
        let out = apply_beamsplitter(&basis(vec![1, 1]), &Beamsplitter::fifty_fifty(0, 1).unwrap()).unwrap();
        assert_eq!(out.amplitude(&[1, 1]), C64::new(0.0, 0.0));
        assert!((out.amplitude(&[2, 0]).norm() - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((out.amplitude(&[2, 0]) + out.amplitude(&[0, 2])).norm() < 1e-15);
    }

    #[test]
    fn herald_probabilities() {
        let one = heralded_subtract(&basis(vec![1]), 0, 0.9).unwrap();
        assert!((one.probability - 0.19).abs() < 1e-12);
        assert_eq!(one.conditional_state.particles(), 0);

        let t: f64 = 0.8;
        let two = heralded_subtract(&basis(vec![2]), 0, t).unwrap();
        assert!((two.probability - 2.0 * t * t * (1.0 - t * t)).abs() < 1e-12);

        assert!(matches!(
            heralded_subtract(&basis(vec![0, 1]), 0, 0.9),
            Err(Error::ZeroProbability)
        ));
        assert!(heralded_subtract(&basis(vec![1]), 0, 1.0).is_err());
    }

    #[test]
    fn module_splitters_match_printed_table() {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        let net = module_network(0.9).unwrap();
        let image = |bs: &Beamsplitter, col: usize| {
            let m = bs.matrix();
            [m[0][col], m[1][col]]
        };
        let [bs1, bs4, bs2, bs3] = [net.elements[4], net.elements[5], net.elements[6], net.elements[7]];
        // BS1 (b, a): b† → (b† − a†)/√2, a† → (a† + b†)/√2
        assert_eq!(image(&bs1, 0), [h, -h]);
        assert_eq!(image(&bs1, 1), [h, h]);
        // BS2 (a, c): a† → (a† − c†)/√2, c† → (c† + a†)/√2
        assert_eq!(image(&bs2, 0), [h, -h]);
        assert_eq!(image(&bs2, 1), [h, h]);
        // BS3 (d, b): d† → (d† − b†)/√2, b† → (b† + d†)/√2
        assert_eq!(image(&bs3, 0), [h, -h]);
        assert_eq!(image(&bs3, 1), [h, h]);
        // BS4 (d, c): d† → (d† − c†)/√2, c† → (c† + d†)/√2
        assert_eq!(image(&bs4, 0), [h, -h]);
        assert_eq!(image(&bs4, 1), [h, h]);
    }

    #[test]
    fn module_detector_rows() {
        let u = module_network(0.5).unwrap().matrix(4);
        let s = (1.0 - 0.25f64).sqrt();
        let expect = [
            [0.5, -0.5, 0.5, -0.5],
            [0.5, 0.5, -0.5, -0.5],
            [-0.5, 0.5, 0.5, -0.5],
            [0.5, 0.5, 0.5, 0.5],
        ];
        for (det, row) in expect.iter().enumerate() {
            let alpha = Detector::ALL[det].superposition();
            for (i, &v) in row.iter().enumerate() {
                assert!((u[(4 + det, i)] - C64::new(v * s, 0.0)).norm() < 1e-12, "detector {det}, mode {i}");
                assert!((alpha.coeffs()[i] - C64::new(v, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn chain_network_row_matches_alpha() {
        let alpha = ModeSuperposition::new(vec![
            C64::new(0.3, -0.1),
            C64::new(0.0, 0.0),
            C64::new(-0.5, 0.4),
            C64::new(0.2, 0.9),
        ])
        .unwrap();
        let t = 0.6;
        let (net, det) = subtraction_network(&alpha, t).unwrap();
        let u = net.matrix(4);
        let row: Vec<C64> = (0..4).map(|i| u[(4 + det, i)]).collect();
        let target = alpha.normalized();
        let overlap: C64 = row.iter().zip(target.coeffs()).map(|(r, a)| a.conj() * r).sum();
        let s = (1.0 - t * t).sqrt();
        assert!((overlap.norm() - s).abs() < 1e-12);
    }

    #[test]
    fn grids() {
        assert_eq!(linear_grid(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
        let g = log_x_grid(0.99, 0.9999, 5);
        assert!((g[0] - 0.99).abs() < 1e-12 && (g[4] - 0.9999).abs() < 1e-12);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        let xs = [1.0, 2.0, 4.0];
        let ys = [3.0, 12.0, 48.0];
        assert!((loglog_slope(&xs, &ys) - 2.0).abs() < 1e-12);
    }
}
