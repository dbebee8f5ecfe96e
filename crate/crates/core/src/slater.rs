//! Slater representation of two-boson states.
//!
//! A two-boson state `|ψ⟩ = Σ_ij β_ij a_i† a_j† |0⟩` with symmetric `β`
//! satisfies `⟨ψ|ψ⟩ = 2 Tr(β β†)`. The Takagi factorization
//! `β = V diag(σ) Vᵀ` (unitary `V`, `σ ≥ 0`) rotates the modes into
//! `c_j† = Σ_i V_ij a_i†`, giving `|ψ⟩ = Σ_j σ_j c_j†² |0⟩`. Writing
//! `σ_j = √(r_j / 2)` makes `Σ r_j = ⟨ψ|ψ⟩`, so the Slater coefficients of
//! a unit state sum to one.
//!
//! "Schmidt rank" is sometimes used for the same count; this module only
//! says "Slater rank".

use std::f64::consts::SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FockState, Statistics};

pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Relative size below which singular values are split off and factored
/// again on the rescaled complement.
const DEFLATION_THRESHOLD: f64 = 1e-3;

/// Symmetric amplitude matrix `β` of a two-boson state.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoBosonMatrix {
    beta: DMatrix<C64>,
}

impl TwoBosonMatrix {
    /// Wraps a matrix, rejecting asymmetry above `1e-10` (relative).
    pub fn new(beta: DMatrix<C64>) -> Result<Self> {
        check_symmetric(&beta)?;
        let sym = (&beta + beta.transpose()) * C64::new(0.5, 0.0);
        Ok(Self { beta: sym })
    }

    /// Reads `β` off a bosonic two-particle state.
    pub fn from_state(state: &FockState) -> Result<Self> {
        if state.statistics() != Statistics::Boson {
            return Err(Error::WrongStatistics { expected: "bosonic" });
        }
        if state.particles() != 2 {
            return Err(Error::ParticleMismatch {
                expected: 2,
                found: state.particles(),
            });
        }
        let d = state.modes();
        let mut beta = DMatrix::zeros(d, d);
        for (occ, &amp) in state.terms() {
            match occ.occupied_modes()[..] {
                // a_i†² |0⟩ = √2 |2_i⟩
                [i, j] if i == j => beta[(i, i)] = amp / SQRT_2,
                // β_ij and β_ji both contribute a_i† a_j† |0⟩
                [i, j] => {
                    beta[(i, j)] = amp / 2.0;
                    beta[(j, i)] = amp / 2.0;
                }
                _ => unreachable!("two-particle sector"),
            }
        }
        Ok(Self { beta })
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.beta
    }

    pub fn dim(&self) -> usize {
        self.beta.nrows()
    }

    /// `2 Tr(β β†)`, equal to the norm of the source state.
    pub fn state_norm_squared(&self) -> f64 {
        2.0 * self.beta.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    /// Rebuilds the two-boson state `Σ β_ij a_i† a_j† |0⟩`.
    pub fn to_state(&self) -> FockState {
        let d = self.dim();
        let mut terms = Vec::new();
        for i in 0..d {
            let mut occ = vec![0u32; d];
            occ[i] = 2;
            terms.push((occ, self.beta[(i, i)] * SQRT_2));
            for j in i + 1..d {
                let mut occ = vec![0u32; d];
                occ[i] = 1;
                occ[j] = 1;
                terms.push((occ, self.beta[(i, j)] * 2.0));
            }
        }
        FockState::from_terms(d, Statistics::Boson, terms).expect("well-formed terms")
    }

    /// `U β Uᵀ`: the same state after `a_i† → Σ_j U_ji a_j†`.
    pub fn transformed(&self, u: &DMatrix<C64>) -> Self {
        Self {
            beta: u * &self.beta * u.transpose(),
        }
    }
}

/// `a = V diag(values) Vᵀ` with `values` non-increasing and `V` unitary.
#[derive(Clone, Debug)]
pub struct Takagi {
    pub values: Vec<f64>,
    pub vectors: DMatrix<C64>,
}

impl Takagi {
    pub fn reconstruct(&self) -> DMatrix<C64> {
        let d = self.values.len();
        let sigma = DMatrix::from_fn(d, d, |i, j| {
            if i == j {
                C64::new(self.values[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        &self.vectors * sigma * self.vectors.transpose()
    }

    /// Max elementwise deviation of the reconstruction from `a`.
    pub fn residual(&self, a: &DMatrix<C64>) -> f64 {
        (self.reconstruct() - a).camax()
    }

    /// Max elementwise deviation of `V† V` from the identity.
    pub fn unitarity_error(&self) -> f64 {
        let d = self.values.len();
        (self.vectors.adjoint() * &self.vectors - DMatrix::<C64>::identity(d, d)).camax()
    }
}

/// Takagi factorization of a complex symmetric matrix.
///
/// Positive eigenpairs `(σ, (x; y))` of the real symmetric embedding
/// `[[Re a, Im a], [Im a, -Re a]]` satisfy `a conj(v) = σ v` for
/// `v = x + iy`, and eigenvectors of distinct positive eigenvalues give
/// complex-orthogonal `v`. Degenerate spectra therefore need no extra
/// symmetrization. Values that are small relative to the current scale are
/// deflated: the complement block `C† a conj(C)` is rescaled and factored
/// recursively.
pub fn takagi_factor(a: &DMatrix<C64>) -> Result<Takagi> {
    check_symmetric(a)?;
    let sym = (a + a.transpose()) * C64::new(0.5, 0.0);
    let (values, vectors) = takagi_rec(&sym);
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    let vectors = DMatrix::from_fn(vectors.nrows(), vectors.ncols(), |r, c| {
        vectors[(r, order[c])]
    });
    let values = order.iter().map(|&i| values[i]).collect();
    Ok(Takagi { values, vectors })
}

fn takagi_rec(a: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let d = a.nrows();
    if d == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let scale = a.camax();
    if scale < f64::MIN_POSITIVE {
        return (vec![0.0; d], DMatrix::identity(d, d));
    }
    let b = a / C64::new(scale, 0.0);
    let embed = DMatrix::<f64>::from_fn(2 * d, 2 * d, |i, j| {
        let z = b[(i % d, j % d)];
        match (i < d, j < d) {
            (true, true) => z.re,
            (false, false) => -z.re,
            _ => z.im,
        }
    });
    let eig = embed.symmetric_eigen();
    let mut picked: Vec<(f64, usize)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > DEFLATION_THRESHOLD)
        .map(|(k, &l)| (l, k))
        .collect();
    picked.sort_by(|x, y| y.0.total_cmp(&x.0));
    picked.truncate(d);

    let k = picked.len();
    let mut values: Vec<f64> = picked.iter().map(|&(l, _)| l * scale).collect();
    let mut v = DMatrix::<C64>::zeros(d, d);
    for (col, &(_, idx)) in picked.iter().enumerate() {
        for r in 0..d {
            v[(r, col)] = C64::new(eig.eigenvectors[(r, idx)], eig.eigenvectors[(r + d, idx)]);
        }
    }
    if k == d {
        return (values, v);
    }

    let known = v.columns(0, k).into_owned();
    let complement = orthonormal_complement(&known, d);
    let block = complement.adjoint() * a * complement.map(|z| z.conj());
    let block = (&block + block.transpose()) * C64::new(0.5, 0.0);
    let (sub_values, sub_vectors) = takagi_rec(&block);
    let lifted = &complement * sub_vectors;
    for c in 0..(d - k) {
        v.set_column(k + c, &lifted.column(c));
    }
    values.extend(sub_values);
    (values, v)
}

/// Orthonormal basis of the complement of the (orthonormal) columns of `known`.
fn orthonormal_complement(known: &DMatrix<C64>, d: usize) -> DMatrix<C64> {
    let k = known.ncols();
    let projector = DMatrix::<C64>::identity(d, d) - known * known.adjoint();
    let eig = projector.symmetric_eigen();
    let mut idx: Vec<usize> = (0..d).collect();
    idx.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    DMatrix::from_fn(d, d - k, |r, c| eig.eigenvectors[(r, idx[c])])
}

fn check_symmetric(a: &DMatrix<C64>) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::InvalidParameter(format!(
            "matrix is {}x{}, expected square",
            a.nrows(),
            a.ncols()
        )));
    }
    let deviation = (a - a.transpose()).camax();
    if deviation > 1e-10 * a.camax().max(1.0) {
        return Err(Error::NotSymmetric { deviation });
    }
    Ok(())
}

/// Slater coefficients `r` (non-increasing) and the diagonalizing basis.
#[derive(Clone, Debug)]
pub struct SlaterSpectrum {
    r: Vec<f64>,
    basis: DMatrix<C64>,
    residual: f64,
}

impl SlaterSpectrum {
    pub fn r(&self) -> &[f64] {
        &self.r
    }

    /// Columns are the modes `c_j†` expressed in the original modes.
    pub fn basis(&self) -> &DMatrix<C64> {
        &self.basis
    }

    /// Max elementwise error of `basis · diag(√(r/2)) · basisᵀ` against `β`.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn dim(&self) -> usize {
        self.r.len()
    }

    /// `P = Σ r_i²`.
    pub fn purity(&self) -> f64 {
        self.r.iter().map(|x| x * x).sum()
    }

    /// Number of coefficients above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.r.iter().filter(|&&x| x > tol).count()
    }

    pub fn report(&self, tol: f64) -> SlaterReport {
        SlaterReport {
            r: self.r.clone(),
            purity: self.purity(),
            rank: self.rank(tol),
            residual: self.residual,
        }
    }
}

/// `{ "r": [...], "purity": f, "rank": n, "residual": f }`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlaterReport {
    pub r: Vec<f64>,
    pub purity: f64,
    pub rank: usize,
    pub residual: f64,
}

pub fn takagi(m: &TwoBosonMatrix) -> Result<SlaterSpectrum> {
    let t = takagi_factor(m.matrix())?;
    let residual = t.residual(m.matrix());
    Ok(SlaterSpectrum {
        r: t.values.iter().map(|s| 2.0 * s * s).collect(),
        basis: t.vectors,
        residual,
    })
}

/// Slater spectrum of a normalized two-boson state.
pub fn slater_spectrum(state: &FockState) -> Result<SlaterSpectrum> {
    takagi(&TwoBosonMatrix::from_state(state)?)
}

/// True iff the one-body density matrix has exactly `K` eigenvalues equal
/// to `1/K` (within `tol`) and the rest vanish, `K` being the particle count.
pub fn is_slater_determinant(state: &FockState, tol: f64) -> Result<bool> {
    if state.statistics() != Statistics::Fermion {
        return Err(Error::WrongStatistics { expected: "fermionic" });
    }
    let k = state.particles();
    let ev = state.single_particle_rdm()?.eigenvalues();
    let level = 1.0 / k as f64;
    Ok(ev[..k].iter().all(|x| (x - level).abs() <= tol) && ev[k..].iter().all(|x| x.abs() <= tol))
}
