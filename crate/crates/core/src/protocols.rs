//! Subtraction sequences that sculpt correlated states out of `|sym_N⟩`,
//! their target states, and a runner that post-selects through them.
//!
//! Mode labels in the docs are 1-based (`a_1 … a_M`); vectors are 0-based.
//! Every built-in step is stored with unit norm, so the product of per-step
//! weights is the post-selection weight relative to a normalized input.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{fidelity, FockState, ModeSuperposition, Statistics};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Bipartite,
    Ghz,
    W,
    Dicke,
    Custom,
}

/// Relative sign between the all-odd and all-even GHZ components.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GhzPhase {
    /// `(-1)^(n+1)`: `+` for odd `n`, `-` for even `n`.
    Alternating,
    /// Always `+`; this is what the subtraction sequence produces.
    Plus,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Protocol {
    n_modes: usize,
    steps: Vec<ModeSuperposition>,
    family: Family,
    n: usize,
    m: Option<usize>,
}

impl Protocol {
    /// Validates that every step spans `n_modes` modes and has unit norm.
    pub fn new(
        n_modes: usize,
        steps: Vec<ModeSuperposition>,
        family: Family,
        n: usize,
        m: Option<usize>,
    ) -> Result<Self> {
        for step in &steps {
            if step.len() != n_modes {
                return Err(Error::ModeMismatch {
                    expected: n_modes,
                    found: step.len(),
                });
            }
            if (step.norm() - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidParameter(format!(
                    "protocol steps must have unit norm, found {}",
                    step.norm()
                )));
            }
        }
        Ok(Self {
            n_modes,
            steps,
            family,
            n,
            m,
        })
    }

    /// Custom sequence; steps are normalized on the way in.
    pub fn custom(steps: Vec<ModeSuperposition>) -> Result<Self> {
        let n_modes = steps
            .first()
            .map(ModeSuperposition::len)
            .ok_or_else(|| Error::InvalidParameter("protocol has no steps".into()))?;
        let steps = steps.iter().map(ModeSuperposition::normalized).collect();
        Self::new(n_modes, steps, Family::Custom, 0, None)
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// Steps in application order.
    pub fn steps(&self) -> &[ModeSuperposition] {
        &self.steps
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> Option<usize> {
        self.m
    }

    /// Same protocol with modes relabeled: old mode `i` becomes `perm[i]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self> {
        let steps = self
            .steps
            .iter()
            .map(|s| s.permuted(perm))
            .collect::<Result<_>>()?;
        Ok(Self {
            steps,
            ..self.clone()
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&ProtocolFile::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: ProtocolFile = serde_json::from_str(s)?;
        file.try_into()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexRecord {
    pub re: f64,
    pub im: f64,
}

/// On-disk protocol format:
/// `{ "family": str, "n": int, "m": int|null, "steps": [[{"re","im"}..]..] }`.
/// Steps of `custom` files are normalized on load; other families must
/// already be unit-norm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolFile {
    pub family: Family,
    pub n: usize,
    pub m: Option<usize>,
    pub steps: Vec<Vec<ComplexRecord>>,
}

impl From<&Protocol> for ProtocolFile {
    fn from(p: &Protocol) -> Self {
        Self {
            family: p.family,
            n: p.n,
            m: p.m,
            steps: p
                .steps
                .iter()
                .map(|s| {
                    s.coeffs()
                        .iter()
                        .map(|c| ComplexRecord { re: c.re, im: c.im })
                        .collect()
                })
                .collect(),
        }
    }
}

impl TryFrom<ProtocolFile> for Protocol {
    type Error = Error;

    fn try_from(file: ProtocolFile) -> Result<Self> {
        let steps: Vec<ModeSuperposition> = file
            .steps
            .into_iter()
            .map(|row| ModeSuperposition::new(row.into_iter().map(|c| C64::new(c.re, c.im)).collect()))
            .collect::<Result<_>>()?;
        if file.family == Family::Custom {
            return Protocol::custom(steps);
        }
        let n_modes = steps
            .first()
            .map(ModeSuperposition::len)
            .ok_or_else(|| Error::InvalidParameter("protocol has no steps".into()))?;
        Protocol::new(n_modes, steps, file.family, file.n, file.m)
    }
}

#[derive(Clone, Debug)]
pub struct ProtocolResult {
    /// Normalized output on all protocol modes.
    pub final_state: FockState,
    /// Product of `per_step_weights`.
    pub success_weight: f64,
    /// `|⟨target|final⟩|²`, present when a target was supplied.
    pub fidelity_to_target: Option<f64>,
    pub per_step_weights: Vec<f64>,
}

/// Applies the steps in order, renormalizing after each one.
///
/// The input is normalized first. A step that annihilates the state is
/// reported as [`Error::ProtocolFailure`] with its 0-based index. When the
/// target spans fewer modes than the protocol, the output is restricted to
/// the target's modes for the fidelity (the dropped modes must be empty).
pub fn run_protocol(input: &FockState, p: &Protocol, target: Option<&FockState>) -> Result<ProtocolResult> {
    if input.modes() != p.n_modes {
        return Err(Error::ModeMismatch {
            expected: p.n_modes,
            found: input.modes(),
        });
    }
    let mut state = input.normalized()?;
    let mut per_step_weights = Vec::with_capacity(p.steps.len());
    for (step, s) in p.steps.iter().enumerate() {
        let raw = state.subtract(s)?;
        if raw.is_zero() {
            return Err(Error::ProtocolFailure { step });
        }
        let (next, weight) = raw.normalize()?;
        per_step_weights.push(weight);
        state = next;
    }
    let fidelity_to_target = target
        .map(|t| {
            let out = if t.modes() < state.modes() {
                state.restrict_modes(t.modes())?
            } else {
                state.clone()
            };
            fidelity(t, &out)
        })
        .transpose()?;
    Ok(ProtocolResult {
        final_state: state,
        success_weight: per_step_weights.iter().product(),
        fidelity_to_target,
        per_step_weights,
    })
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n must be at least 2, got {n}")));
    }
    Ok(())
}

fn real_step(coeffs: Vec<f64>) -> ModeSuperposition {
    ModeSuperposition::from_real(&coeffs)
        .expect("built-in steps are nonzero")
        .normalized()
}

fn boson_state(modes: usize, terms: Vec<(Vec<u32>, C64)>) -> FockState {
    FockState::from_terms(modes, Statistics::Boson, terms)
        .and_then(|s| s.normalized())
        .expect("built-in targets are valid nonzero states")
}

/// Occupation with one boson on each listed 0-based mode.
fn occupied(modes: usize, which: impl IntoIterator<Item = usize>) -> Vec<u32> {
    let mut occ = vec![0; modes];
    for m in which {
        occ[m] += 1;
    }
    occ
}

/// `(1/√n) Σ_k (-1)^k a_{2k-1}† a_{2k}† |0⟩` on `2n` modes.
pub fn target_phi(n: usize) -> Result<FockState> {
    check_n(n)?;
    let terms = (1..=n)
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            (occupied(2 * n, [2 * k - 2, 2 * k - 1]), C64::new(sign, 0.0))
        })
        .collect();
    Ok(boson_state(2 * n, terms))
}

/// `2(n-1)` steps on `2n` modes. For `j = 1..n-1` in turn:
/// `½(a_{2j-1}+a_{2j}-a_{2j+1}-a_{2j+2})` then `½(a_{2j-1}+a_{2j}+a_{2j+1}+a_{2j+2})`.
pub fn bipartite_sequence(n: usize) -> Result<Protocol> {
    check_n(n)?;
    let modes = 2 * n;
    let mut steps = Vec::with_capacity(2 * (n - 1));
    for j in 0..n - 1 {
        for sign in [-1.0, 1.0] {
            let mut c = vec![0.0; modes];
            c[2 * j] = 1.0;
            c[2 * j + 1] = 1.0;
            c[2 * j + 2] = sign;
            c[2 * j + 3] = sign;
            steps.push(real_step(c));
        }
    }
    Protocol::new(modes, steps, Family::Bipartite, n, None)
}

/// Two-term GHZ state `(a_1†a_3†…a_{2n-1}† ± a_2†a_4†…a_{2n}†)|0⟩/√2`, with
/// the relative sign `(-1)^(n+1)`.
pub fn target_ghz(n: usize) -> Result<FockState> {
    target_ghz_with_phase(n, GhzPhase::Alternating)
}

pub fn target_ghz_with_phase(n: usize, phase: GhzPhase) -> Result<FockState> {
    check_n(n)?;
    let sign = match phase {
        GhzPhase::Plus => 1.0,
        GhzPhase::Alternating if n.is_multiple_of(2) => -1.0,
        GhzPhase::Alternating => 1.0,
    };
    let modes = 2 * n;
    let odd = occupied(modes, (0..n).map(|j| 2 * j));
    let even = occupied(modes, (0..n).map(|j| 2 * j + 1));
    Ok(boson_state(
        modes,
        vec![(odd, C64::new(1.0, 0.0)), (even, C64::new(sign, 0.0))],
    ))
}

/// `n` steps on `2n` modes, applied as `a^(n)` first and `a^(1)` last, with
/// `a^(k) = (1/√(2n)) (Σ_j a_{2j-1} + Σ_j e^{2πi(j-k)/n} a_{2j})`.
pub fn ghz_sequence(n: usize) -> Result<Protocol> {
    check_n(n)?;
    let modes = 2 * n;
    let scale = 1.0 / (modes as f64).sqrt();
    let steps = (1..=n)
        .rev()
        .map(|k| {
            let mut c = vec![C64::new(0.0, 0.0); modes];
            for j in 1..=n {
                let angle = std::f64::consts::TAU * (j as f64 - k as f64) / n as f64;
                c[2 * j - 2] = C64::new(scale, 0.0);
                c[2 * j - 1] = C64::from_polar(scale, angle);
            }
            ModeSuperposition::new(c).expect("nonzero step")
        })
        .collect();
    Protocol::new(modes, steps, Family::Ghz, n, None)
}

/// Uniform superposition over `n`-qubit dual-rail words with exactly `zeros`
/// qubits in `|0⟩` (odd mode) and the rest in `|1⟩` (even mode).
fn balanced_words(n: usize, zeros: usize) -> FockState {
    let modes = 2 * n;
    let terms = (0u32..1 << n)
        .filter(|mask| mask.count_ones() as usize == zeros)
        .map(|mask| {
            let occ = occupied(
                modes,
                (0..n).map(|k| if mask >> k & 1 == 1 { 2 * k } else { 2 * k + 1 }),
            );
            (occ, C64::new(1.0, 0.0))
        })
        .collect();
    boson_state(modes, terms)
}

/// W state on `2n` modes. Unflipped: each term has exactly one qubit in `|1⟩`
/// (one even mode). Flipped: each term has exactly one qubit in `|0⟩` (one
/// odd mode), which is what the two-stage sequence produces.
pub fn target_w(n: usize, flipped: bool) -> Result<FockState> {
    check_n(n)?;
    Ok(balanced_words(n, if flipped { 1 } else { n - 1 }))
}

/// Dicke state on `2n` modes with `m` qubits in `|0⟩`, the output of
/// [`dicke_sequence`]. `target_dicke(n, 1) == target_w(n, true)`.
pub fn target_dicke(n: usize, m: usize) -> Result<FockState> {
    check_n(n)?;
    check_m(n, m)?;
    Ok(balanced_words(n, m))
}

fn stage1_state(n: usize, odd_sign: f64) -> Result<FockState> {
    check_n(n)?;
    let modes = 4 * n;
    let mut terms = Vec::with_capacity(1 << n);
    for mask in 0u32..1 << n {
        let mut amp = 1.0;
        let which = (0..n).flat_map(|k| {
            let j = if mask >> k & 1 == 1 { 2 * k + 1 } else { 2 * k };
            [j, 2 * n + j]
        });
        let occ = occupied(modes, which);
        for k in 0..n {
            if mask >> k & 1 == 0 {
                amp *= odd_sign;
            }
        }
        terms.push((occ, C64::new(amp, 0.0)));
    }
    Ok(boson_state(modes, terms))
}

/// `2^(-n/2) Π_i (a_{2i-1}† a_{2n+2i-1}† + a_{2i}† a_{2n+2i}†)|0⟩` on `4n` modes.
pub fn target_stage1(n: usize) -> Result<FockState> {
    stage1_state(n, 1.0)
}

/// `2^(-n/2) Π_i (a_{2i}† a_{2n+2i}† - a_{2i-1}† a_{2n+2i-1}†)|0⟩`, the state
/// [`w_stage1_sequence`] actually produces.
pub fn target_stage1_signed(n: usize) -> Result<FockState> {
    stage1_state(n, -1.0)
}

/// `2n` steps on `4n` modes, for `k = n, n-1, …, 1`:
/// `½(a_{2k-1}-a_{2k}+a_{2n+2k-1}-a_{2n+2k})` then `½(a_{2k-1}+a_{2k}+a_{2n+2k-1}+a_{2n+2k})`.
pub fn w_stage1_sequence(n: usize) -> Result<Protocol> {
    check_n(n)?;
    let modes = 4 * n;
    let mut steps = Vec::with_capacity(2 * n);
    for k in (1..=n).rev() {
        let idx = [2 * k - 2, 2 * k - 1, 2 * n + 2 * k - 2, 2 * n + 2 * k - 1];
        for signs in [[1.0, -1.0, 1.0, -1.0], [1.0; 4]] {
            let mut c = vec![0.0; modes];
            for (&i, &v) in idx.iter().zip(&signs) {
                c[i] = v;
            }
            steps.push(real_step(c));
        }
    }
    Protocol::new(modes, steps, Family::W, n, None)
}

fn check_m(n: usize, m: usize) -> Result<()> {
    if m == 0 || m >= n {
        return Err(Error::InvalidParameter(format!(
            "m must satisfy 1 <= m <= n-1, got m = {m} for n = {n}"
        )));
    }
    Ok(())
}

/// `n` steps on `4n` modes acting on the copy modes `2n+1 … 4n`: `n - m`
/// subtractions of the normalized sum of the even copy modes, then `m` of
/// the normalized sum of the odd copy modes.
pub fn w_stage2_sequence(n: usize, m: usize) -> Result<Protocol> {
    check_n(n)?;
    check_m(n, m)?;
    let modes = 4 * n;
    let mut even = vec![0.0; modes];
    let mut odd = vec![0.0; modes];
    for i in n + 1..=2 * n {
        even[2 * i - 1] = 1.0;
        odd[2 * i - 2] = 1.0;
    }
    let mut steps = vec![real_step(even); n - m];
    steps.extend(std::iter::repeat_n(real_step(odd), m));
    let family = if m == 1 { Family::W } else { Family::Dicke };
    Protocol::new(modes, steps, family, n, Some(m))
}

/// Full two-stage sequence, `3n` steps on `4n` modes.
pub fn dicke_sequence(n: usize, m: usize) -> Result<Protocol> {
    let stage1 = w_stage1_sequence(n)?;
    let stage2 = w_stage2_sequence(n, m)?;
    let mut steps = stage1.steps;
    steps.extend(stage2.steps);
    Protocol::new(4 * n, steps, stage2.family, n, Some(m))
}

/// Two-stage W sequence (`m = 1`).
pub fn w_sequence(n: usize) -> Result<Protocol> {
    dicke_sequence(n, 1)
}

/// Swaps modes `2k-1 ↔ 2k` for every pair, i.e. a bit flip on every
/// dual-rail qubit. A trailing unpaired mode is left in place.
pub fn flip_qubits(state: &FockState) -> Result<FockState> {
    let modes = state.modes();
    let perm: Vec<usize> = (0..modes)
        .map(|i| if i + 1 == modes && modes % 2 == 1 { i } else { i ^ 1 })
        .collect();
    state.permute_modes(&perm)
}

/// True iff every term holds exactly one particle in each of the first
/// `qubits` mode pairs and nothing elsewhere.
pub fn is_dual_rail(state: &FockState, qubits: usize) -> bool {
    if state.modes() < 2 * qubits {
        return false;
    }
    state.terms().all(|(occ, _)| {
        let occ = occ.as_slice();
        (0..qubits).all(|k| occ[2 * k] + occ[2 * k + 1] == 1) && occ[2 * qubits..].iter().all(|&x| x == 0)
    })
}

/// Parameters of a built-in sculpting run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SculptSpec {
    pub family: Family,
    pub n: usize,
    /// Excitation count for Dicke; ignored otherwise.
    pub m: Option<usize>,
    /// W only: report the sequence output as is (one particle in the odd
    /// mode of exactly one pair) instead of bit-flipping it onto the
    /// standard W state.
    pub flipped: bool,
    /// GHZ only.
    pub phase: GhzPhase,
}

impl SculptSpec {
    pub fn new(family: Family, n: usize) -> Self {
        SculptSpec {
            family,
            n,
            m: None,
            flipped: false,
            phase: GhzPhase::Alternating,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Sculpted {
    pub protocol: Protocol,
    pub run: ProtocolResult,
    /// Final state on the target's modes, after the optional W bit flip.
    pub output: FockState,
    pub target: FockState,
    pub fidelity: f64,
}

/// Runs a built-in family on `|sym⟩` and compares the output with its
/// target. W and Dicke outputs are restricted to the first `2n` modes, the
/// copy modes being empty after stage 2.
pub fn sculpt(spec: &SculptSpec) -> Result<Sculpted> {
    let n = spec.n;
    let (protocol, target) = match spec.family {
        Family::Bipartite => (bipartite_sequence(n)?, target_phi(n)?),
        Family::Ghz => (ghz_sequence(n)?, target_ghz_with_phase(n, spec.phase)?),
        Family::W => (w_sequence(n)?, target_w(n, spec.flipped)?),
        Family::Dicke => {
            let m = spec
                .m
                .ok_or_else(|| Error::InvalidParameter("dicke requires m".into()))?;
            (dicke_sequence(n, m)?, target_dicke(n, m)?)
        }
        Family::Custom => {
            return Err(Error::InvalidParameter("custom protocols have no built-in target".into()));
        }
    };
    let run = run_protocol(&FockState::sym_state(protocol.n_modes()), &protocol, None)?;
    let mut output = run.final_state.restrict_modes(target.modes())?;
    if spec.family == Family::W && !spec.flipped {
        output = flip_qubits(&output)?;
    }
    let fidelity = fidelity(&target, &output)?;
    Ok(Sculpted {
        protocol,
        run,
        output,
        target,
        fidelity,
    })
}
