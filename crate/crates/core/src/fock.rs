//! Truncated Fock-space states and operators for one and two modes.
//!
//! Two-mode objects use the mode-1-major index `n1 * dim + n2` everywhere.
//! Mode tags are 1-based (`1` for the first mode, `2` for the second).

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Minimum population a truncated catalog state must keep below `N_c` is
/// `1 - POPULATION_FLOOR`.
pub const POPULATION_FLOOR: f64 = 1e-6;

pub const HERMITICITY_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-10;

const MODULE: &str = "fock-core";

pub(crate) fn population_guard(dim: usize, population: f64) -> Result<()> {
    let required = 1.0 - POPULATION_FLOOR;
    if population < required {
        return Err(Error::Truncation {
            dim,
            population,
            required,
        });
    }
    Ok(())
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::Dimension(format!("truncation must be at least 2, got {dim}")));
    }
    Ok(())
}

/// Normalized state vector of one mode in the truncated number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amps: DVector<C64>,
}

impl FockVector {
    /// Normalizes `amps`; fails on a zero vector or `dim < 2`.
    pub fn new(amps: DVector<C64>) -> Result<Self> {
        check_dim(amps.len())?;
        let norm = amps.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::check(MODULE, "vector-norm", norm, 0.0));
        }
        Ok(Self { amps: amps / C64::from(norm) })
    }

    pub fn number(n: usize, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        if n >= dim {
            return Err(Error::Truncation {
                dim,
                population: 0.0,
                required: 1.0 - POPULATION_FLOOR,
            });
        }
        let mut amps = DVector::zeros(dim);
        amps[n] = C64::from(1.0);
        Ok(Self { amps })
    }

    /// Coherent state `e^{-|α|²/2} Σ αⁿ/√n! |n⟩`.
    pub fn coherent(alpha: C64, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        let amps = coherent_amplitudes(alpha, dim);
        population_guard(dim, amps.norm_squared())?;
        Self::new(amps)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.norm_squared()
    }
}

/// Unnormalized truncated coherent-state amplitudes.
pub(crate) fn coherent_amplitudes(alpha: C64, dim: usize) -> DVector<C64> {
    let mut amps = DVector::zeros(dim);
    let mut term = C64::from((-0.5 * alpha.norm_sqr()).exp());
    for n in 0..dim {
        amps[n] = term;
        term *= alpha / ((n + 1) as f64).sqrt();
    }
    amps
}

/// Density operator of one or two modes.
///
/// Pure states keep their state vector alongside the matrix so that
/// characteristic-function evaluation can use `O(N³)` contractions.
#[derive(Debug, Clone)]
pub struct FockDensityMatrix {
    modes: usize,
    dim: usize,
    mat: DMatrix<C64>,
    pure: Option<DVector<C64>>,
}

impl FockDensityMatrix {
    /// Wraps a matrix after checking shape, Hermiticity and trace.
    pub fn from_matrix(modes: usize, dim: usize, mat: DMatrix<C64>) -> Result<Self> {
        check_dim(dim)?;
        if !(1..=2).contains(&modes) {
            return Err(Error::Dimension(format!("{modes} modes requested, only 1 or 2 supported")));
        }
        let total = dim.pow(modes as u32);
        if mat.nrows() != total || mat.ncols() != total {
            return Err(Error::Dimension(format!(
                "expected {total}x{total} matrix, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let rho = Self {
            modes,
            dim,
            mat,
            pure: None,
        };
        let herm = rho.hermiticity_defect();
        if herm > HERMITICITY_TOL {
            return Err(Error::check(MODULE, "hermiticity", herm, HERMITICITY_TOL));
        }
        let tr = rho.trace();
        if !(tr > 0.0) || tr > 1.0 + TRACE_TOL {
            return Err(Error::check(MODULE, "trace", tr, 1.0));
        }
        Ok(rho)
    }

    /// `|ψ⟩⟨ψ|` for a (re)normalized state vector over `modes` modes.
    pub fn from_pure(modes: usize, dim: usize, amps: DVector<C64>) -> Result<Self> {
        check_dim(dim)?;
        if !(1..=2).contains(&modes) {
            return Err(Error::Dimension(format!("{modes} modes requested, only 1 or 2 supported")));
        }
        let total = dim.pow(modes as u32);
        if amps.len() != total {
            return Err(Error::Dimension(format!("expected {total} amplitudes, got {}", amps.len())));
        }
        let norm = amps.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::check(MODULE, "vector-norm", norm, 0.0));
        }
        let amps = amps / C64::from(norm);
        let mat = &amps * amps.adjoint();
        Ok(Self {
            modes,
            dim,
            mat,
            pure: Some(amps),
        })
    }

    pub fn from_vector(v: &FockVector) -> Self {
        let amps = v.amps().clone();
        Self {
            modes: 1,
            dim: amps.len(),
            mat: &amps * amps.adjoint(),
            pure: Some(amps),
        }
    }

    /// Two-mode pure state from its coefficient matrix `c[(n1, n2)]`.
    pub fn from_coefficients(coeffs: &DMatrix<C64>) -> Result<Self> {
        let dim = coeffs.nrows();
        if coeffs.ncols() != dim {
            return Err(Error::Dimension("coefficient matrix must be square".into()));
        }
        let amps = DVector::from_fn(dim * dim, |i, _| coeffs[(i / dim, i % dim)]);
        Self::from_pure(2, dim, amps)
    }

    pub fn vacuum(dim: usize) -> Result<Self> {
        Ok(Self::from_vector(&FockVector::number(0, dim)?))
    }

    pub fn two_mode_vacuum(dim: usize) -> Result<Self> {
        let v = Self::vacuum(dim)?;
        tensor(&v, &v)
    }

    pub fn number(n: usize, dim: usize) -> Result<Self> {
        Ok(Self::from_vector(&FockVector::number(n, dim)?))
    }

    pub fn coherent(alpha: C64, dim: usize) -> Result<Self> {
        Ok(Self::from_vector(&FockVector::coherent(alpha, dim)?))
    }

    /// Thermal state with geometric populations `n̄ⁿ/(n̄+1)ⁿ⁺¹`.
    pub fn thermal(nbar: f64, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        if !(nbar >= 0.0) || !nbar.is_finite() {
            return Err(Error::Unsupported(format!("thermal occupation {nbar}")));
        }
        let ratio = nbar / (nbar + 1.0);
        population_guard(dim, 1.0 - ratio.powi(dim as i32))?;
        let mut mat = DMatrix::zeros(dim, dim);
        let mut p = 1.0 / (nbar + 1.0);
        for n in 0..dim {
            mat[(n, n)] = C64::from(p);
            p *= ratio;
        }
        let tr: f64 = (0..dim).map(|n| mat[(n, n)].re).sum();
        Self::from_matrix(1, dim, mat / C64::from(tr))
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Size of the full matrix, `dim^modes`.
    pub fn total_dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    /// Normalized state vector, if the state was built as a pure state.
    pub fn pure_state(&self) -> Option<&DVector<C64>> {
        self.pure.as_ref()
    }

    pub fn trace(&self) -> f64 {
        self.mat.diagonal().iter().map(|z| z.re).sum()
    }

    /// `tr ρ²`, which for a Hermitian matrix is the squared Frobenius norm.
    pub fn purity(&self) -> f64 {
        self.mat.norm_squared()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        max_abs_diff(&self.mat, &self.mat.adjoint())
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.mat.clone()).eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Checks Hermiticity, unit trace and positivity at the module tolerances.
    pub fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_defect();
        if herm > HERMITICITY_TOL {
            return Err(Error::check(MODULE, "hermiticity", herm, HERMITICITY_TOL));
        }
        let tr = (self.trace() - 1.0).abs();
        if tr > TRACE_TOL {
            return Err(Error::check(MODULE, "unit-trace", tr, TRACE_TOL));
        }
        let min = self.min_eigenvalue();
        if min < -PSD_TOL {
            return Err(Error::check(MODULE, "positivity", -min, PSD_TOL));
        }
        Ok(())
    }

    /// Copy scaled to unit trace.
    pub fn normalized(&self) -> Self {
        let tr = self.trace();
        Self {
            modes: self.modes,
            dim: self.dim,
            mat: &self.mat / C64::from(tr),
            pure: self.pure.clone(),
        }
    }

    pub(crate) fn from_parts_unchecked(modes: usize, dim: usize, mat: DMatrix<C64>) -> Self {
        Self {
            modes,
            dim,
            mat,
            pure: None,
        }
    }

    /// Population kept on number states `n ≥ dim - depth` of any mode.
    pub fn boundary_population(&self, depth: usize) -> f64 {
        let n = self.dim;
        let edge = n.saturating_sub(depth);
        (0..self.total_dim())
            .filter(|&i| match self.modes {
                1 => i >= edge,
                _ => i / n >= edge || i % n >= edge,
            })
            .map(|i| self.mat[(i, i)].re)
            .sum()
    }
}

pub(crate) fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// What a [`ModeOperator`] represents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OpLabel {
    Annihilate,
    Create,
    /// `q = (a + a†)/√2`
    Q,
    /// `p = (a - a†)/(i√2)`
    P,
    Number,
    Displacement(C64),
    Custom,
}

impl OpLabel {
    fn is_ladder(self) -> bool {
        matches!(self, OpLabel::Annihilate | OpLabel::Create | OpLabel::Q | OpLabel::P | OpLabel::Number)
    }
}

/// Single-mode operator matrix on the truncated space.
#[derive(Debug, Clone)]
pub struct ModeOperator {
    label: OpLabel,
    mat: DMatrix<C64>,
}

impl ModeOperator {
    pub fn annihilate(dim: usize) -> Self {
        let mut mat = DMatrix::zeros(dim, dim);
        for n in 1..dim {
            mat[(n - 1, n)] = C64::from((n as f64).sqrt());
        }
        Self {
            label: OpLabel::Annihilate,
            mat,
        }
    }

    pub fn create(dim: usize) -> Self {
        Self {
            label: OpLabel::Create,
            mat: Self::annihilate(dim).mat.adjoint(),
        }
    }

    pub fn position(dim: usize) -> Self {
        let a = Self::annihilate(dim).mat;
        let mat = (&a + a.adjoint()) / C64::from(std::f64::consts::SQRT_2);
        Self { label: OpLabel::Q, mat }
    }

    pub fn momentum(dim: usize) -> Self {
        let a = Self::annihilate(dim).mat;
        let mat = (&a - a.adjoint()) / C64::new(0.0, std::f64::consts::SQRT_2);
        Self { label: OpLabel::P, mat }
    }

    pub fn number(dim: usize) -> Self {
        let mut mat = DMatrix::zeros(dim, dim);
        for n in 0..dim {
            mat[(n, n)] = C64::from(n as f64);
        }
        Self {
            label: OpLabel::Number,
            mat,
        }
    }

    pub fn custom(mat: DMatrix<C64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::Dimension("operator matrix must be square".into()));
        }
        check_dim(mat.nrows())?;
        Ok(Self {
            label: OpLabel::Custom,
            mat,
        })
    }

    pub(crate) fn displacement(alpha: C64, mat: DMatrix<C64>) -> Self {
        Self {
            label: OpLabel::Displacement(alpha),
            mat,
        }
    }

    pub fn label(&self) -> OpLabel {
        self.label
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }
}

/// Kronecker product `a ⊗ b` with mode-1-major indexing.
pub fn tensor(a: &FockDensityMatrix, b: &FockDensityMatrix) -> Result<FockDensityMatrix> {
    if a.modes != 1 || b.modes != 1 {
        return Err(Error::Dimension("tensor expects two one-mode states".into()));
    }
    if a.dim != b.dim {
        return Err(Error::Dimension(format!("per-mode dims differ: {} vs {}", a.dim, b.dim)));
    }
    let pure = match (&a.pure, &b.pure) {
        (Some(x), Some(y)) => Some(x.kronecker(y)),
        _ => None,
    };
    Ok(FockDensityMatrix {
        modes: 2,
        dim: a.dim,
        mat: a.mat.kronecker(&b.mat),
        pure,
    })
}

/// Reduced state of mode `keep` (1 or 2).
pub fn partial_trace(rho: &FockDensityMatrix, keep: usize) -> Result<FockDensityMatrix> {
    if rho.modes != 2 {
        return Err(Error::Dimension("partial trace needs a two-mode state".into()));
    }
    let n = rho.dim;
    let m = &rho.mat;
    let out = match keep {
        1 => DMatrix::from_fn(n, n, |a, a2| (0..n).map(|b| m[(a * n + b, a2 * n + b)]).sum()),
        2 => DMatrix::from_fn(n, n, |b, b2| (0..n).map(|a| m[(a * n + b, a * n + b2)]).sum()),
        other => return Err(Error::Mode(other)),
    };
    Ok(FockDensityMatrix::from_parts_unchecked(1, n, out))
}

/// `tr(ρ · O₁ O₂ ⋯ O_k)` where each factor acts on the tagged mode.
///
/// Products made only of ladder-type operators are evaluated on the
/// untruncated number basis, so the result is exact for any state supported
/// below `N_c`. Anything else falls back to dense matrix products at `N_c`.
pub fn expect(rho: &FockDensityMatrix, product: &[(&ModeOperator, usize)]) -> Result<C64> {
    for &(op, mode) in product {
        if mode == 0 || mode > rho.modes {
            return Err(Error::Mode(mode));
        }
        if !op.label.is_ladder() && op.dim() != rho.dim {
            return Err(Error::Dimension(format!("operator dim {} vs state dim {}", op.dim(), rho.dim)));
        }
    }
    if product.iter().all(|(op, _)| op.label.is_ladder()) {
        let labels: Vec<(OpLabel, usize)> = product.iter().map(|(op, m)| (op.label, *m)).collect();
        Ok(expect_ladder(rho, &labels))
    } else {
        Ok(expect_dense(rho, product))
    }
}

/// Shorthand for [`expect`] on ladder-type operators given by label.
pub fn expect_labels(rho: &FockDensityMatrix, product: &[(OpLabel, usize)]) -> Result<C64> {
    for &(label, mode) in product {
        if mode == 0 || mode > rho.modes {
            return Err(Error::Mode(mode));
        }
        if !label.is_ladder() {
            return Err(Error::Unsupported(format!("{label:?} needs an explicit matrix")));
        }
    }
    Ok(expect_ladder(rho, product))
}

fn expect_ladder(rho: &FockDensityMatrix, product: &[(OpLabel, usize)]) -> C64 {
    let n = rho.dim;
    let modes = rho.modes;
    let s2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut total = C64::from(0.0);
    let mut terms: Vec<([usize; 2], C64)> = Vec::new();
    let mut next: Vec<([usize; 2], C64)> = Vec::new();
    for k in 0..rho.total_dim() {
        let ket = if modes == 1 { [k, 0] } else { [k / n, k % n] };
        terms.clear();
        terms.push((ket, C64::from(1.0)));
        for &(label, mode) in product.iter().rev() {
            next.clear();
            let slot = mode - 1;
            for &(idx, c) in &terms {
                let level = idx[slot];
                let lower = |coef: C64, out: &mut Vec<([usize; 2], C64)>| {
                    if level > 0 {
                        let mut j = idx;
                        j[slot] = level - 1;
                        out.push((j, c * coef * (level as f64).sqrt()));
                    }
                };
                let raise = |coef: C64, out: &mut Vec<([usize; 2], C64)>| {
                    let mut j = idx;
                    j[slot] = level + 1;
                    out.push((j, c * coef * ((level + 1) as f64).sqrt()));
                };
                match label {
                    OpLabel::Annihilate => lower(C64::from(1.0), &mut next),
                    OpLabel::Create => raise(C64::from(1.0), &mut next),
                    OpLabel::Q => {
                        lower(C64::from(s2), &mut next);
                        raise(C64::from(s2), &mut next);
                    }
                    OpLabel::P => {
                        lower(C64::new(0.0, -s2), &mut next);
                        raise(C64::new(0.0, s2), &mut next);
                    }
                    OpLabel::Number => {
                        if level > 0 {
                            next.push((idx, c * level as f64));
                        }
                    }
                    OpLabel::Displacement(_) | OpLabel::Custom => unreachable!("filtered by caller"),
                }
            }
            std::mem::swap(&mut terms, &mut next);
        }
        for &(idx, c) in &terms {
            if idx[0] >= n || (modes == 2 && idx[1] >= n) {
                continue;
            }
            let j = if modes == 1 { idx[0] } else { idx[0] * n + idx[1] };
            total += rho.mat[(k, j)] * c;
        }
    }
    total
}

fn embed(op: &DMatrix<C64>, mode: usize, modes: usize) -> DMatrix<C64> {
    if modes == 1 {
        return op.clone();
    }
    let id = DMatrix::<C64>::identity(op.nrows(), op.ncols());
    if mode == 1 {
        op.kronecker(&id)
    } else {
        id.kronecker(op)
    }
}

fn expect_dense(rho: &FockDensityMatrix, product: &[(&ModeOperator, usize)]) -> C64 {
    let mut acc = rho.mat.clone();
    for &(op, mode) in product {
        acc *= embed(&op.mat, mode, rho.modes);
    }
    acc.trace()
}

/// Principal square root of a Hermitian positive-semidefinite matrix.
/// Negative eigenvalues from round-off are clipped to zero.
pub(crate) fn hermitian_sqrt(m: &DMatrix<C64>) -> DMatrix<C64> {
    let eig = SymmetricEigen::new(m.clone());
    let roots = eig.eigenvalues.map(|x| C64::from(x.max(0.0).sqrt()));
    let v = &eig.eigenvectors;
    v * DMatrix::from_diagonal(&roots) * v.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn random_state(dim: usize, seed: u64) -> FockDensityMatrix {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let g = DMatrix::from_fn(dim, dim, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let m = &g * g.adjoint();
        let tr = m.trace();
        FockDensityMatrix::from_matrix(1, dim, m / tr).unwrap()
    }

    #[test]
    fn vacuum_tensor_is_two_mode_vacuum_projector() {
        let v = FockDensityMatrix::vacuum(5).unwrap();
        let vv = tensor(&v, &v).unwrap();
        assert_eq!(vv.total_dim(), 25);
        assert_eq!(vv.matrix()[(0, 0)], C64::from(1.0));
        assert_abs_diff_eq!(vv.trace(), 1.0);
        assert_eq!(vv.matrix().iter().filter(|z| z.norm() > 0.0).count(), 1);
    }

    #[test]
    fn tensor_index_is_mode_one_major() {
        let n = 6;
        let one = FockDensityMatrix::number(1, n).unwrap();
        let zero = FockDensityMatrix::vacuum(n).unwrap();
        let t = tensor(&one, &zero).unwrap();
        let nonzero: Vec<(usize, usize)> = (0..n * n)
            .flat_map(|i| (0..n * n).map(move |j| (i, j)))
            .filter(|&(i, j)| t.matrix()[(i, j)].norm() > 0.0)
            .collect();
        assert_eq!(nonzero, vec![(n, n)]);
    }

    #[test]
    fn tensor_rejects_mismatched_dims() {
        let a = FockDensityMatrix::vacuum(4).unwrap();
        let b = FockDensityMatrix::vacuum(5).unwrap();
        assert!(matches!(tensor(&a, &b), Err(Error::Dimension(_))));
    }

    #[test]
    fn tensor_partial_trace_round_trip() {
        let a = random_state(5, 1);
        let b = random_state(5, 2);
        let t = tensor(&a, &b).unwrap();
        assert_abs_diff_eq!(t.trace(), a.trace() * b.trace(), epsilon = 1e-12);
        let ra = partial_trace(&t, 1).unwrap();
        let rb = partial_trace(&t, 2).unwrap();
        assert!(max_abs_diff(ra.matrix(), a.matrix()) <= 1e-12);
        assert!(max_abs_diff(rb.matrix(), b.matrix()) <= 1e-12);
        assert!(matches!(partial_trace(&t, 3), Err(Error::Mode(3))));
    }

    #[test]
    fn partial_trace_of_vacuum_is_vacuum() {
        let vv = FockDensityMatrix::two_mode_vacuum(4).unwrap();
        let r = partial_trace(&vv, 1).unwrap();
        assert!(max_abs_diff(r.matrix(), FockDensityMatrix::vacuum(4).unwrap().matrix()) == 0.0);
    }

    #[test]
    fn commutator_truncation_artifact() {
        let n = 7;
        let a = ModeOperator::annihilate(n).into_matrix();
        let c = &a * a.adjoint() - a.adjoint() * &a;
        for i in 0..n {
            for j in 0..n {
                let expected = if i != j {
                    0.0
                } else if i == n - 1 {
                    -((n - 1) as f64)
                } else {
                    1.0
                };
                assert_abs_diff_eq!(c[(i, j)].re, expected, epsilon = 1e-12);
                assert_abs_diff_eq!(c[(i, j)].im, 0.0);
            }
        }
    }

    #[test]
    fn quadrature_matrices_follow_ladder_definitions() {
        let n = 5;
        let a = ModeOperator::annihilate(n).into_matrix();
        let q = ModeOperator::position(n).into_matrix();
        let p = ModeOperator::momentum(n).into_matrix();
        let s = std::f64::consts::SQRT_2;
        assert!(max_abs_diff(&(q * C64::from(s)), &(&a + a.adjoint())) < 1e-14);
        assert!(max_abs_diff(&(p * C64::new(0.0, s)), &(&a - a.adjoint())) < 1e-14);
    }

    #[test]
    fn vacuum_number_expectation_is_zero() {
        let v = FockDensityMatrix::vacuum(6).unwrap();
        let ad = ModeOperator::create(6);
        let a = ModeOperator::annihilate(6);
        assert_eq!(expect(&v, &[(&ad, 1), (&a, 1)]).unwrap(), C64::from(0.0));
    }

    #[test]
    fn coherent_state_is_annihilator_eigenstate() {
        let alpha = C64::new(0.3, 0.2);
        let rho = FockDensityMatrix::coherent(alpha, 25).unwrap();
        let a = ModeOperator::annihilate(25);
        let got = expect(&rho, &[(&a, 1)]).unwrap();
        assert!((got - alpha).norm() < 1e-12);
    }

    #[test]
    fn ladder_and_dense_paths_agree_away_from_boundary() {
        let rho = FockDensityMatrix::coherent(C64::new(0.4, -0.1), 20).unwrap();
        let q = ModeOperator::position(20);
        let p = ModeOperator::momentum(20);
        let exact = expect(&rho, &[(&q, 1), (&p, 1)]).unwrap();
        let dense = expect_dense(&rho, &[(&q, 1), (&p, 1)]);
        assert!((exact - dense).norm() < 1e-10);
        // [q, p] = i on the exact path
        let qp = expect(&rho, &[(&q, 1), (&p, 1)]).unwrap();
        let pq = expect(&rho, &[(&p, 1), (&q, 1)]).unwrap();
        assert!((qp - pq - C64::new(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn expect_checks_mode_tags() {
        let v = FockDensityMatrix::vacuum(4).unwrap();
        let a = ModeOperator::annihilate(4);
        assert!(matches!(expect(&v, &[(&a, 2)]), Err(Error::Mode(2))));
        assert!(matches!(expect(&v, &[(&a, 0)]), Err(Error::Mode(0))));
    }

    #[test]
    fn thermal_population_guard() {
        assert!(FockDensityMatrix::thermal(1.0, 20).is_ok());
        assert!(matches!(FockDensityMatrix::thermal(1.0, 10), Err(Error::Truncation { .. })));
        assert!(matches!(FockDensityMatrix::coherent(C64::new(3.0, 0.0), 10), Err(Error::Truncation { .. })));
    }

    #[test]
    fn catalog_states_validate() {
        FockDensityMatrix::thermal(0.7, 30).unwrap().validate().unwrap();
        FockDensityMatrix::coherent(C64::new(0.3, 0.2), 20).unwrap().validate().unwrap();
        random_state(6, 3).validate().unwrap();
    }

    #[test]
    fn from_matrix_rejects_non_hermitian() {
        let mut m = DMatrix::<C64>::zeros(3, 3);
        m[(0, 0)] = C64::from(1.0);
        m[(0, 1)] = C64::from(0.1);
        assert!(matches!(FockDensityMatrix::from_matrix(1, 3, m), Err(Error::Check { .. })));
    }

    #[test]
    fn hermitian_sqrt_squares_back() {
        let rho = random_state(6, 9);
        let s = hermitian_sqrt(rho.matrix());
        assert!(max_abs_diff(&(&s * &s), rho.matrix()) < 1e-12);
    }
}
