//! Gaussian states as mean vector plus covariance matrix.
//!
//! Quadrature ordering is `(q₁, p₁, q₂, p₂)` and the vacuum covariance matrix
//! is `I/2`. The displacement operator is `D(λ) = exp(i ξ(λ)·r)` with
//! `ξ(λ) = √2 (Im λ, -Re λ)`, which fixes the sign conventions below.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::cf::displacement_matrix;
use crate::error::{Error, Result};
use crate::fock::{self, FockDensityMatrix, OpLabel};

const MODULE: &str = "gaussian-core";

pub const SYMMETRY_TOL: f64 = 1e-12;
pub const PHYSICALITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    modes: usize,
    mean: DVector<f64>,
    cm: DMatrix<f64>,
}

impl GaussianState {
    pub fn new(mean: DVector<f64>, cm: DMatrix<f64>) -> Result<Self> {
        let n = mean.len();
        if n != 2 && n != 4 {
            return Err(Error::Dimension(format!("mean vector of length {n}")));
        }
        if cm.nrows() != n || cm.ncols() != n {
            return Err(Error::Dimension(format!("covariance matrix must be {n}x{n}")));
        }
        let asym = (&cm - cm.transpose()).amax();
        if asym > SYMMETRY_TOL {
            return Err(Error::check(MODULE, "cm-symmetry", asym, SYMMETRY_TOL));
        }
        let s = Self { modes: n / 2, mean, cm };
        let min = s.uncertainty_min_eigenvalue();
        if min < -PHYSICALITY_TOL {
            return Err(Error::check(MODULE, "physicality", -min, PHYSICALITY_TOL));
        }
        Ok(s)
    }

    pub fn vacuum(modes: usize) -> Result<Self> {
        let n = 2 * modes;
        Self::new(DVector::zeros(n), DMatrix::identity(n, n) * 0.5)
    }

    /// Coherent state `|α⟩`: mean `√2 (Re α, Im α)`, vacuum covariance.
    pub fn coherent(alpha: C64) -> Self {
        let s2 = std::f64::consts::SQRT_2;
        Self {
            modes: 1,
            mean: DVector::from_vec(vec![s2 * alpha.re, s2 * alpha.im]),
            cm: DMatrix::identity(2, 2) * 0.5,
        }
    }

    pub fn thermal(nbar: f64) -> Result<Self> {
        Self::new(DVector::zeros(2), DMatrix::identity(2, 2) * (nbar + 0.5))
    }

    /// Two-mode squeezed vacuum: diagonal blocks `cosh(2r)/2 · I`,
    /// off-diagonal blocks `sinh(2r)/2 · diag(1, -1)`.
    pub fn svs(r: f64) -> Self {
        let c = (2.0 * r).cosh() / 2.0;
        let s = (2.0 * r).sinh() / 2.0;
        #[rustfmt::skip]
        let cm = DMatrix::from_row_slice(4, 4, &[
            c, 0.0, s, 0.0,
            0.0, c, 0.0, -s,
            s, 0.0, c, 0.0,
            0.0, -s, 0.0, c,
        ]);
        Self {
            modes: 2,
            mean: DVector::zeros(4),
            cm,
        }
    }

    /// Uncorrelated two-mode state `a ⊗ b`.
    pub fn product(a: &GaussianState, b: &GaussianState) -> Result<Self> {
        if a.modes != 1 || b.modes != 1 {
            return Err(Error::Dimension("product expects one-mode states".into()));
        }
        let mut mean = DVector::zeros(4);
        mean.rows_mut(0, 2).copy_from(&a.mean);
        mean.rows_mut(2, 2).copy_from(&b.mean);
        let mut cm = DMatrix::zeros(4, 4);
        cm.view_mut((0, 0), (2, 2)).copy_from(&a.cm);
        cm.view_mut((2, 2), (2, 2)).copy_from(&b.cm);
        Ok(Self { modes: 2, mean, cm })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cm(&self) -> &DMatrix<f64> {
        &self.cm
    }

    /// Largest absolute first moment.
    pub fn max_first_moment(&self) -> f64 {
        self.mean.amax()
    }

    /// Smallest eigenvalue of `cm + (i/2)Ω`; non-negative for physical states.
    pub fn uncertainty_min_eigenvalue(&self) -> f64 {
        let n = 2 * self.modes;
        let mut m = self.cm.map(C64::from);
        for k in 0..self.modes {
            m[(2 * k, 2 * k + 1)] += C64::new(0.0, 0.5);
            m[(2 * k + 1, 2 * k)] -= C64::new(0.0, 0.5);
        }
        debug_assert_eq!(m.nrows(), n);
        SymmetricEigen::new(m).eigenvalues.min()
    }

    /// One-mode covariance matrix as a [`CovMatrix2`].
    pub fn cov2(&self) -> Option<CovMatrix2> {
        (self.modes == 1).then(|| CovMatrix2 {
            sqq: self.cm[(0, 0)],
            sqp: self.cm[(0, 1)],
            spp: self.cm[(1, 1)],
        })
    }

    /// Reduced one-mode state of `mode` (1 or 2).
    pub fn reduced(&self, mode: usize) -> Result<Self> {
        if self.modes == 1 && mode == 1 {
            return Ok(self.clone());
        }
        if self.modes != 2 || !(1..=2).contains(&mode) {
            return Err(Error::Mode(mode));
        }
        let o = 2 * (mode - 1);
        Ok(Self {
            modes: 1,
            mean: self.mean.rows(o, 2).into_owned(),
            cm: self.cm.view((o, o), (2, 2)).into_owned(),
        })
    }
}

/// Real phase-space vector `ξ(λ) = √2 (Im λ, -Re λ)` with `D(λ) = exp(i ξ·r)`.
pub fn phase_space_vector(lambda: C64) -> [f64; 2] {
    let s2 = std::f64::consts::SQRT_2;
    [s2 * lambda.im, -s2 * lambda.re]
}

/// Closed-form characteristic function `exp(-ξᵀVξ/2 + i ξ·mean)`.
pub fn gaussian_cf(s: &GaussianState, lambda: &[C64]) -> Result<C64> {
    if lambda.len() != s.modes {
        return Err(Error::Dimension(format!("{} arguments for {} modes", lambda.len(), s.modes)));
    }
    let xi = DVector::from_iterator(2 * s.modes, lambda.iter().flat_map(|&l| phase_space_vector(l)));
    let quad = (xi.transpose() * &s.cm * &xi)[(0, 0)];
    let phase = xi.dot(&s.mean);
    Ok(C64::from_polar((-0.5 * quad).exp(), phase))
}

/// Second moments of a one-mode state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovMatrix2 {
    pub sqq: f64,
    pub sqp: f64,
    pub spp: f64,
}

impl CovMatrix2 {
    pub fn new(sqq: f64, sqp: f64, spp: f64) -> Self {
        Self { sqq, sqp, spp }
    }

    pub fn det(&self) -> f64 {
        self.sqq * self.spp - self.sqp * self.sqp
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let mid = 0.5 * (self.sqq + self.spp);
        let rad = (0.25 * (self.sqq - self.spp).powi(2) + self.sqp * self.sqp).sqrt();
        [mid - rad, mid + rad]
    }

    /// Smallest eigenvalue of `V - I/2`; non-negative means not squeezed.
    pub fn min_eig_minus_half(&self) -> f64 {
        self.eigenvalues()[0] - 0.5
    }

    pub fn max_abs_diff(&self, other: &CovMatrix2) -> f64 {
        (self.sqq - other.sqq)
            .abs()
            .max((self.sqp - other.sqp).abs())
            .max((self.spp - other.spp).abs())
    }
}

/// First and second moments of a Fock state in `(q₁, p₁, q₂, p₂)` order,
/// with symmetrized covariances `Re⟨rᵢrⱼ⟩ - ⟨rᵢ⟩⟨rⱼ⟩`.
pub fn fock_moments(rho: &FockDensityMatrix) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let n = 2 * rho.modes();
    let quad = |i: usize| -> (OpLabel, usize) {
        let label = if i.is_multiple_of(2) { OpLabel::Q } else { OpLabel::P };
        (label, i / 2 + 1)
    };
    let mut mean = DVector::zeros(n);
    for i in 0..n {
        mean[i] = fock::expect_labels(rho, &[quad(i)])?.re;
    }
    let mut cm = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = fock::expect_labels(rho, &[quad(i), quad(j)])?.re - mean[i] * mean[j];
            cm[(i, j)] = v;
            cm[(j, i)] = v;
        }
    }
    Ok((mean, cm))
}

/// Fock representation of a Gaussian state built from its closed-form
/// preparation: displaced thermal states for one mode, products of those or
/// a two-mode squeezed vacuum for two modes.
pub fn gaussian_to_fock(s: &GaussianState, dim: usize) -> Result<FockDensityMatrix> {
    match s.modes {
        1 => one_mode_to_fock(s, dim),
        _ => {
            let off = s.cm.view((0, 2), (2, 2)).amax();
            if off <= SYMMETRY_TOL {
                let a = one_mode_to_fock(&s.reduced(1)?, dim)?;
                let b = one_mode_to_fock(&s.reduced(2)?, dim)?;
                return fock::tensor(&a, &b);
            }
            svs_to_fock(s, dim)
        }
    }
}

fn one_mode_to_fock(s: &GaussianState, dim: usize) -> Result<FockDensityMatrix> {
    let v = &s.cm;
    if (v[(0, 0)] - v[(1, 1)]).abs() > SYMMETRY_TOL || v[(0, 1)].abs() > SYMMETRY_TOL {
        return Err(Error::Unsupported("one-mode Gaussian with a squeezed covariance matrix".into()));
    }
    let nbar = v[(0, 0)] - 0.5;
    let alpha = C64::new(s.mean[0], s.mean[1]) / std::f64::consts::SQRT_2;
    if nbar.abs() <= SYMMETRY_TOL {
        return FockDensityMatrix::coherent(alpha, dim);
    }
    if alpha.norm() == 0.0 {
        return FockDensityMatrix::thermal(nbar, dim);
    }
    // Displace a thermal state on an enlarged space, then keep the first `dim` levels.
    let ratio = nbar / (nbar + 1.0);
    let big = dim.max((-37.0 / ratio.ln()).ceil() as usize + 1) + dim;
    let d = displacement_matrix(alpha, big).into_matrix();
    let mut p = 1.0 / (nbar + 1.0);
    let mut mat = DMatrix::<C64>::zeros(dim, dim);
    for k in 0..big {
        for m in 0..dim {
            for n in 0..dim {
                mat[(m, n)] += d[(m, k)] * d[(n, k)].conj() * p;
            }
        }
        p *= ratio;
    }
    let pop: f64 = (0..dim).map(|i| mat[(i, i)].re).sum();
    fock::population_guard(dim, pop)?;
    let mat = (&mat + mat.adjoint()) / C64::from(2.0 * pop);
    FockDensityMatrix::from_matrix(1, dim, mat)
}

fn svs_to_fock(s: &GaussianState, dim: usize) -> Result<FockDensityMatrix> {
    let v = &s.cm;
    let a = v[(0, 0)];
    let c = v[(0, 2)];
    #[rustfmt::skip]
    let expected = DMatrix::from_row_slice(4, 4, &[
        a, 0.0, c, 0.0,
        0.0, a, 0.0, -c,
        c, 0.0, a, 0.0,
        0.0, -c, 0.0, a,
    ]);
    let pure = (a * a - c * c - 0.25).abs();
    if s.max_first_moment() > SYMMETRY_TOL || (v - expected).amax() > SYMMETRY_TOL || pure > 1e-10 {
        return Err(Error::Unsupported(
            "two-mode Gaussian is neither a product state nor a two-mode squeezed vacuum".into(),
        ));
    }
    svs_fock((2.0 * c).asinh() / 2.0, dim)
}

/// Two-mode squeezed vacuum `Σ tanhⁿr / cosh r |n, n⟩` truncated at `dim`.
pub fn svs_fock(r: f64, dim: usize) -> Result<FockDensityMatrix> {
    let t = r.tanh();
    fock::population_guard(dim, 1.0 - t.powi(2 * dim as i32))?;
    let mut coeffs = DMatrix::<C64>::zeros(dim, dim);
    let mut amp = 1.0 / r.cosh();
    for n in 0..dim {
        coeffs[(n, n)] = C64::from(amp);
        amp *= t;
    }
    FockDensityMatrix::from_coefficients(&coeffs)
}
