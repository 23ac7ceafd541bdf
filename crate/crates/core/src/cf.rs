//! Characteristic functions: displacement matrices, CF evaluation, lattice
//! sampling and inverse-Weyl reconstruction.

use std::fmt;
use std::io::{BufRead, Write};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{self, FockDensityMatrix, ModeOperator, OpLabel};
use crate::gaussian::CovMatrix2;

const MODULE: &str = "cf-engine";

/// Tolerance for `χ(0) = 1` and `χ(-λ) = χ(λ)*` on sampled grids.
pub const GRID_TOL: f64 = 1e-10;

/// Matrix of `D(α) = exp(α a† - α* a)` on the truncated space.
///
/// Elements come from the closed form
/// `⟨m|D(α)|n⟩ = √(n!/m!) α^{m-n} e^{-|α|²/2} L_n^{(m-n)}(|α|²)` for `m ≥ n`
/// (and `(-α*)^{n-m}` with the roles swapped for `m < n`), with the
/// associated Laguerre polynomials from the ascending three-term recurrence.
/// Each entry is exact, so the matrix is the projection of the true operator.
pub fn displacement_matrix(alpha: C64, dim: usize) -> ModeOperator {
    ModeOperator::displacement(alpha, displacement_elements(alpha, dim))
}

fn displacement_elements(alpha: C64, dim: usize) -> DMatrix<C64> {
    let x = alpha.norm_sqr();
    let gauss = (-0.5 * x).exp();
    let beta = -alpha.conj();
    let mut mat = DMatrix::<C64>::zeros(dim, dim);
    let mut alpha_k = C64::from(1.0);
    let mut beta_k = C64::from(1.0);
    // 1/√k!
    let mut inv_sqrt_fact = 1.0;
    for k in 0..dim {
        let kf = k as f64;
        let mut l_prev = 0.0;
        let mut l = 1.0;
        // √(j!/(j+k)!)
        let mut pref = inv_sqrt_fact;
        for j in 0..dim - k {
            if j > 0 {
                let jf = (j - 1) as f64;
                let next = ((2.0 * jf + 1.0 + kf - x) * l - (jf + kf) * l_prev) / (jf + 1.0);
                l_prev = l;
                l = next;
            }
            let v = pref * gauss * l;
            mat[(j + k, j)] = alpha_k * v;
            if k > 0 {
                mat[(j, j + k)] = beta_k * v;
            }
            pref *= ((j + 1) as f64 / (j + k + 1) as f64).sqrt();
        }
        alpha_k *= alpha;
        beta_k *= beta;
        inv_sqrt_fact /= (kf + 1.0).sqrt();
    }
    mat
}

/// `tr(ρ D(λ))` for a one-mode state.
pub fn cf_eval(rho: &FockDensityMatrix, lambda: C64) -> C64 {
    debug_assert_eq!(rho.modes(), 1);
    let d = displacement_elements(lambda, rho.dim());
    if let Some(psi) = rho.pure_state() {
        return psi.dotc(&(&d * psi));
    }
    let r = rho.matrix();
    let n = rho.dim();
    let mut acc = C64::from(0.0);
    for m in 0..n {
        for k in 0..n {
            acc += r[(m, k)] * d[(k, m)];
        }
    }
    acc
}

/// `tr(ρ D(λ₁) ⊗ D(λ₂))` for a two-mode state.
pub fn cf_eval2(rho: &FockDensityMatrix, l1: C64, l2: C64) -> C64 {
    debug_assert_eq!(rho.modes(), 2);
    let n = rho.dim();
    let d1 = displacement_elements(l1, n);
    let d2 = displacement_elements(l2, n);
    if let Some(psi) = rho.pure_state() {
        let c = DMatrix::from_fn(n, n, |a, b| psi[a * n + b]);
        let t = &d1 * &c * d2.transpose();
        return c.iter().zip(t.iter()).map(|(x, y)| x.conj() * y).sum();
    }
    let r = rho.matrix();
    let mut acc = C64::from(0.0);
    for a in 0..n {
        for a2 in 0..n {
            let w1 = d1[(a2, a)];
            if w1 == C64::from(0.0) {
                continue;
            }
            let mut inner = C64::from(0.0);
            for b in 0..n {
                for b2 in 0..n {
                    inner += r[(a * n + b, a2 * n + b2)] * d2[(b2, b)];
                }
            }
            acc += w1 * inner;
        }
    }
    acc
}

/// Which function a grid holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridTag {
    Input,
    Resource,
    Output,
    Distorting,
}

impl fmt::Display for GridTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GridTag::Input => "input",
            GridTag::Resource => "resource",
            GridTag::Output => "output",
            GridTag::Distorting => "distorting",
        };
        f.write_str(s)
    }
}

/// CF samples on the square lattice `λ = (j h, k h)`, `j, k ∈ [-M, M]`.
#[derive(Debug, Clone)]
pub struct CFGrid {
    half_width: f64,
    step: f64,
    m: usize,
    values: Vec<C64>,
    tag: GridTag,
}

impl CFGrid {
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// `M`, so the grid has `2M + 1` points per side.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn side(&self) -> usize {
        2 * self.m + 1
    }

    pub fn tag(&self) -> GridTag {
        self.tag
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    fn index(&self, j: i64, k: i64) -> usize {
        let m = self.m as i64;
        ((j + m) as usize) * self.side() + (k + m) as usize
    }

    pub fn lambda(&self, j: i64, k: i64) -> C64 {
        C64::new(j as f64 * self.step, k as f64 * self.step)
    }

    pub fn value(&self, j: i64, k: i64) -> C64 {
        self.values[self.index(j, k)]
    }

    /// Iterator over `(λ, χ(λ))`.
    pub fn points(&self) -> impl Iterator<Item = (C64, C64)> + '_ {
        let m = self.m as i64;
        (-m..=m).flat_map(move |j| (-m..=m).map(move |k| (self.lambda(j, k), self.value(j, k))))
    }

    pub fn center_defect(&self) -> f64 {
        (self.value(0, 0) - 1.0).norm()
    }

    /// `max |χ(-λ) - χ(λ)*|` over the lattice.
    pub fn hermitian_defect(&self) -> f64 {
        let m = self.m as i64;
        let mut worst = 0.0f64;
        for j in -m..=m {
            for k in -m..=m {
                worst = worst.max((self.value(-j, -k) - self.value(j, k).conj()).norm());
            }
        }
        worst
    }

    /// Largest `|χ|` on the outer ring of the lattice.
    pub fn boundary_max(&self) -> f64 {
        let m = self.m as i64;
        (-m..=m)
            .flat_map(|t| [(t, -m), (t, m), (-m, t), (m, t)])
            .map(|(j, k)| self.value(j, k).norm())
            .fold(0.0, f64::max)
    }

    /// Pointwise product of two grids on the same lattice.
    pub fn product(&self, other: &CFGrid, tag: GridTag) -> Result<CFGrid> {
        if self.m != other.m || self.step != other.step {
            return Err(Error::Dimension("grids sit on different lattices".into()));
        }
        Ok(CFGrid {
            half_width: self.half_width,
            step: self.step,
            m: self.m,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect(),
            tag,
        })
    }

    /// Columnar text: a header `L h M`, then one `j k re im` row per point.
    pub fn write_text<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{} {} {}", self.half_width, self.step, self.m)?;
        let m = self.m as i64;
        for j in -m..=m {
            for k in -m..=m {
                let v = self.value(j, k);
                writeln!(w, "{} {} {} {}", j, k, v.re, v.im)?;
            }
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(r: R, tag: GridTag) -> Result<CFGrid> {
        let mut lines = r.lines();
        let bad = |what: &str| Error::parse("cf grid", what.to_string());
        let header = lines.next().ok_or_else(|| bad("empty input"))?.map_err(|e| bad(&e.to_string()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(bad("header must be `L h M`"));
        }
        let half_width: f64 = fields[0].parse().map_err(|_| bad("L"))?;
        let step: f64 = fields[1].parse().map_err(|_| bad("h"))?;
        let m: usize = fields[2].parse().map_err(|_| bad("M"))?;
        let side = 2 * m + 1;
        let mut values = vec![C64::from(f64::NAN); side * side];
        let mut seen = 0;
        for line in lines {
            let line = line.map_err(|e| bad(&e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 4 {
                return Err(bad("rows must be `j k re im`"));
            }
            let j: i64 = f[0].parse().map_err(|_| bad("j"))?;
            let k: i64 = f[1].parse().map_err(|_| bad("k"))?;
            if j.unsigned_abs() as usize > m || k.unsigned_abs() as usize > m {
                return Err(bad("lattice index out of range"));
            }
            let re: f64 = f[2].parse().map_err(|_| bad("re"))?;
            let im: f64 = f[3].parse().map_err(|_| bad("im"))?;
            let idx = ((j + m as i64) as usize) * side + (k + m as i64) as usize;
            values[idx] = C64::new(re, im);
            seen += 1;
        }
        if seen != side * side {
            return Err(bad("missing lattice rows"));
        }
        Ok(CFGrid {
            half_width,
            step,
            m,
            values,
            tag,
        })
    }
}

/// Samples `evaluator` on the lattice with half-width `l` and step `h`.
pub fn sample_grid<F>(evaluator: F, l: f64, h: f64, tag: GridTag) -> Result<CFGrid>
where
    F: Fn(C64) -> C64 + Sync,
{
    let grid = sample_grid_unchecked(evaluator, l, h, tag)?;
    let center = grid.center_defect();
    if center > GRID_TOL {
        return Err(Error::check(MODULE, "cf-normalization", center, GRID_TOL));
    }
    let herm = grid.hermitian_defect();
    if herm > GRID_TOL {
        return Err(Error::check(MODULE, "cf-hermitian-symmetry", herm, GRID_TOL));
    }
    Ok(grid)
}

/// As [`sample_grid`] without the CF invariant checks, for integrands that
/// are not characteristic functions.
pub(crate) fn sample_grid_unchecked<F>(evaluator: F, l: f64, h: f64, tag: GridTag) -> Result<CFGrid>
where
    F: Fn(C64) -> C64 + Sync,
{
    if !(l > 0.0) || !(h > 0.0) || h > l || !l.is_finite() {
        return Err(Error::check(MODULE, "lattice-parameters", h, l));
    }
    let m = (l / h).round() as usize;
    let mi = m as i64;
    let rows: Vec<Vec<C64>> = (-mi..=mi)
        .into_par_iter()
        .map(|j| (-mi..=mi).map(|k| evaluator(C64::new(j as f64 * h, k as f64 * h))).collect())
        .collect();
    Ok(CFGrid {
        half_width: l,
        step: h,
        m,
        values: rows.concat(),
        tag,
    })
}

/// Reconstructed density matrix plus the size of the corrections applied.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub rho: FockDensityMatrix,
    /// `max |ρ - ρ†|` of the raw quadrature sum.
    pub hermiticity_defect: f64,
    /// Trace of the raw quadrature sum before renormalization.
    pub raw_trace: f64,
}

impl Reconstruction {
    pub fn trace_defect(&self) -> f64 {
        (self.raw_trace - 1.0).abs()
    }
}

/// Inverse Weyl transform `ρ = (1/π) Σ χ(λ) D(-λ) h²` over the grid,
/// followed by re-Hermitization and trace normalization.
pub fn reconstruct(grid: &CFGrid, dim: usize) -> Result<Reconstruction> {
    let m = grid.m as i64;
    let h = grid.step;
    let rows: Vec<DMatrix<C64>> = (-m..=m)
        .into_par_iter()
        .map(|j| {
            let mut acc = DMatrix::<C64>::zeros(dim, dim);
            for k in -m..=m {
                let chi = grid.value(j, k);
                if chi == C64::from(0.0) {
                    continue;
                }
                let d = displacement_elements(-grid.lambda(j, k), dim);
                acc.zip_apply(&d, |a, b| *a += chi * b);
            }
            acc
        })
        .collect();
    let mut sum = DMatrix::<C64>::zeros(dim, dim);
    for r in &rows {
        sum += r;
    }
    sum *= C64::from(h * h / std::f64::consts::PI);
    let hermiticity_defect = fock::max_abs_diff(&sum, &sum.adjoint());
    let herm = (&sum + sum.adjoint()) * C64::from(0.5);
    let raw_trace = herm.trace().re;
    if !(raw_trace > 0.0) {
        return Err(Error::check(MODULE, "reconstruction-trace", raw_trace, 0.0));
    }
    let rho = FockDensityMatrix::from_matrix(1, dim, herm / C64::from(raw_trace))?;
    Ok(Reconstruction {
        rho,
        hermiticity_defect,
        raw_trace,
    })
}

/// Low-order moments of a one-mode state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    /// `⟨a⟩`
    pub a: C64,
    /// `⟨a²⟩`
    pub a2: C64,
    /// `⟨a†a⟩`
    pub n: f64,
    pub cm: CovMatrix2,
}

/// Normally ordered moments and the covariance matrix from operator averages.
pub fn moments_from_state(rho: &FockDensityMatrix) -> Result<Moments> {
    use OpLabel::*;
    if rho.modes() != 1 {
        return Err(Error::Dimension("moments_from_state expects one mode".into()));
    }
    let e = |ops: &[OpLabel]| -> Result<C64> {
        let tagged: Vec<(OpLabel, usize)> = ops.iter().map(|&o| (o, 1)).collect();
        fock::expect_labels(rho, &tagged)
    };
    let q = e(&[Q])?.re;
    let p = e(&[P])?.re;
    let cm = CovMatrix2 {
        sqq: e(&[Q, Q])?.re - q * q,
        sqp: e(&[Q, P])?.re - q * p,
        spp: e(&[P, P])?.re - p * p,
    };
    Ok(Moments {
        a: e(&[Annihilate])?,
        a2: e(&[Annihilate, Annihilate])?,
        n: e(&[Create, Annihilate])?.re,
        cm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{tensor, FockVector};
    use approx::assert_abs_diff_eq;
    use nalgebra::DVector;

    fn fidelity_pure(psi: &DVector<C64>, rho: &FockDensityMatrix) -> f64 {
        psi.dotc(&(rho.matrix() * psi)).re
    }

    #[test]
    fn displacement_at_zero_is_identity() {
        let d = displacement_matrix(C64::from(0.0), 10).into_matrix();
        assert!(fock::max_abs_diff(&d, &DMatrix::identity(10, 10)) == 0.0);
    }

    #[test]
    fn displaced_vacuum_is_coherent_series() {
        let alpha = C64::new(0.3, 0.2);
        let d = displacement_matrix(alpha, 25).into_matrix();
        let mut fact = 1.0;
        for n in 0..25 {
            if n > 0 {
                fact *= n as f64;
            }
            let expected = (-alpha.norm_sqr() / 2.0).exp() * alpha.powi(n as i32) / fact.sqrt();
            assert!((d[(n, 0)] - expected).norm() < 1e-10);
        }
    }

    #[test]
    fn inverse_displacement_up_to_boundary() {
        // the truncated product only approaches the identity far from the edge
        let n = 60;
        let alpha = C64::new(0.8, -0.5);
        let d = displacement_matrix(alpha, n).into_matrix();
        let dm = displacement_matrix(-alpha, n).into_matrix();
        let prod = &d * &dm;
        let interior = n / 4;
        for i in 0..interior {
            for j in 0..interior {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((prod[(i, j)] - expected).norm() < 1e-10, "({i},{j})");
            }
        }
        // D(-α) = D(α)†
        assert!(fock::max_abs_diff(&dm, &d.adjoint()) < 1e-14);
    }

    #[test]
    fn displacement_agrees_with_matrix_exponential_on_large_space() {
        let n = 60;
        let alpha = C64::new(0.5, 0.3);
        let a = ModeOperator::annihilate(n).into_matrix();
        let gen = a.adjoint() * alpha - &a * alpha.conj();
        // Taylor series of exp on a big space, compare on the low block.
        let mut term = DMatrix::<C64>::identity(n, n);
        let mut sum = term.clone();
        for k in 1..60 {
            term = &term * &gen / C64::from(k as f64);
            sum += &term;
        }
        let d = displacement_matrix(alpha, n).into_matrix();
        for i in 0..15 {
            for j in 0..15 {
                assert!((d[(i, j)] - sum[(i, j)]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn vacuum_cf_closed_form() {
        let v = FockDensityMatrix::vacuum(20).unwrap();
        for l in [C64::new(0.0, 0.0), C64::new(0.5, 0.5), C64::new(-1.2, 0.3)] {
            let got = cf_eval(&v, l);
            assert!((got - (-l.norm_sqr() / 2.0).exp()).norm() < 1e-14);
        }
    }

    #[test]
    fn thermal_cf_closed_form() {
        let nbar = 1.0;
        let rho = FockDensityMatrix::thermal(nbar, 40).unwrap();
        let l = C64::from(0.5);
        let expected = (-(nbar + 0.5) * l.norm_sqr()).exp();
        assert!((cf_eval(&rho, l) - expected).norm() < 1e-10);
    }

    #[test]
    fn number_one_cf_vanishes_on_unit_circle() {
        let rho = FockDensityMatrix::number(1, 10).unwrap();
        let l = C64::new(0.6, 0.8);
        assert!(cf_eval(&rho, l).norm() < 1e-14);
        let l = C64::from(0.5);
        let expected = (1.0 - 0.25) * (-0.125f64).exp();
        assert!((cf_eval(&rho, l) - expected).norm() < 1e-14);
    }

    #[test]
    fn cf_at_origin_is_trace() {
        let rho = FockDensityMatrix::thermal(0.4, 25).unwrap();
        assert_abs_diff_eq!(cf_eval(&rho, C64::from(0.0)).re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn two_mode_cf_factorizes_on_products() {
        let a = FockDensityMatrix::thermal(0.3, 12).unwrap();
        let b = FockDensityMatrix::coherent(C64::new(0.2, 0.1), 12).unwrap();
        let ab = tensor(&a, &b).unwrap();
        let (l1, l2) = (C64::new(0.3, -0.2), C64::new(-0.4, 0.6));
        let got = cf_eval2(&ab, l1, l2);
        assert!((got - cf_eval(&a, l1) * cf_eval(&b, l2)).norm() < 1e-14);
        let vv = FockDensityMatrix::two_mode_vacuum(10).unwrap();
        let expected = (-(l1.norm_sqr() + l2.norm_sqr()) / 2.0).exp();
        assert!((cf_eval2(&vv, l1, l2) - expected).norm() < 1e-14);
    }

    #[test]
    fn pure_and_mixed_cf_paths_agree() {
        let psi = FockVector::coherent(C64::new(0.3, -0.1), 8).unwrap();
        let pure = FockDensityMatrix::from_vector(&psi);
        let mixed = FockDensityMatrix::from_matrix(1, 8, pure.matrix().clone()).unwrap();
        let l = C64::new(0.7, 0.2);
        assert!((cf_eval(&pure, l) - cf_eval(&mixed, l)).norm() < 1e-14);
        let pp = tensor(&pure, &pure).unwrap();
        let mm = FockDensityMatrix::from_matrix(2, 8, pp.matrix().clone()).unwrap();
        assert!((cf_eval2(&pp, l, -l) - cf_eval2(&mm, l, -l)).norm() < 1e-13);
    }

    #[test]
    fn vacuum_grid_center_and_corner() {
        let g = sample_grid(|l| (-l.norm_sqr() / 2.0).exp().into(), 4.0, 0.5, GridTag::Input).unwrap();
        assert_eq!(g.m(), 8);
        assert_eq!(g.value(0, 0), C64::from(1.0));
        assert_abs_diff_eq!(g.value(8, 8).re, (-16.0f64).exp(), epsilon = 1e-300);
    }

    #[test]
    fn grid_rejects_bad_lattice_and_non_cf() {
        assert!(sample_grid(|_| C64::from(1.0), 1.0, 2.0, GridTag::Input).is_err());
        match sample_grid(|l| C64::from(1.0 + l.re), 1.0, 0.5, GridTag::Input) {
            Err(Error::Check { check, .. }) => assert_eq!(check, "cf-hermitian-symmetry"),
            other => panic!("{other:?}"),
        }
        match sample_grid(|_| C64::from(0.5), 1.0, 0.5, GridTag::Input) {
            Err(Error::Check { check, .. }) => assert_eq!(check, "cf-normalization"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn grid_text_round_trip() {
        let rho = FockDensityMatrix::coherent(C64::new(0.3, 0.2), 12).unwrap();
        let g = sample_grid(|l| cf_eval(&rho, l), 2.0, 0.5, GridTag::Input).unwrap();
        let mut buf = Vec::new();
        g.write_text(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("2 0.5 4\n-4 -4 "));
        let back = CFGrid::read_text(buf.as_slice(), GridTag::Input).unwrap();
        assert_eq!(back.values(), g.values());
        assert!(CFGrid::read_text("1 0.5 2\n0 0 1 0\n".as_bytes(), GridTag::Input).is_err());
    }

    #[test]
    fn reconstruct_vacuum() {
        let v = FockDensityMatrix::vacuum(10).unwrap();
        let g = sample_grid(|l| cf_eval(&v, l), 6.0, 0.1, GridTag::Input).unwrap();
        let rec = reconstruct(&g, 10).unwrap();
        assert!(rec.rho.matrix()[(0, 0)].re >= 0.9999);
        assert!(rec.trace_defect() < 1e-8);
    }

    #[test]
    fn reconstruct_coherent_round_trip() {
        let psi = FockVector::coherent(C64::new(0.3, 0.2), 20).unwrap();
        let rho = FockDensityMatrix::from_vector(&psi);
        let g = sample_grid(|l| cf_eval(&rho, l), 6.0, 0.1, GridTag::Input).unwrap();
        let rec = reconstruct(&g, 20).unwrap();
        assert!(fidelity_pure(psi.amps(), &rec.rho) >= 0.9999);
    }

    #[test]
    fn reconstruct_cat_round_trip() {
        let n = 20;
        let a = crate::fock::coherent_amplitudes(C64::from(1.0), n);
        let b = crate::fock::coherent_amplitudes(C64::from(-1.0), n);
        let psi = FockVector::new(a + b).unwrap();
        let rho = FockDensityMatrix::from_vector(&psi);
        let g = sample_grid(|l| cf_eval(&rho, l), 7.0, 0.08, GridTag::Input).unwrap();
        let rec = reconstruct(&g, n).unwrap();
        assert!(fidelity_pure(psi.amps(), &rec.rho) >= 0.999);
    }

    #[test]
    fn moments_of_simple_states() {
        let v = moments_from_state(&FockDensityMatrix::vacuum(5).unwrap()).unwrap();
        assert!(v.cm.max_abs_diff(&CovMatrix2::new(0.5, 0.0, 0.5)) < 1e-15);
        let th = moments_from_state(&FockDensityMatrix::thermal(1.0, 40).unwrap()).unwrap();
        assert_abs_diff_eq!(th.cm.sqq, 1.5, epsilon = 1e-10);
        assert_abs_diff_eq!(th.cm.spp, 1.5, epsilon = 1e-10);
        let one = moments_from_state(&FockDensityMatrix::number(1, 3).unwrap()).unwrap();
        assert_abs_diff_eq!(one.cm.sqq, 1.5, epsilon = 1e-14);
        assert_abs_diff_eq!(one.cm.spp, 1.5, epsilon = 1e-14);
        assert_abs_diff_eq!(one.n, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn moments_match_cf_second_derivatives() {
        // χ(λ) = ⟨exp(i ξ·r)⟩ with ξ = √2 (Im λ, -Re λ):
        // ⟨q²⟩ = -½ ∂²χ/∂y², ⟨p²⟩ = -½ ∂²χ/∂x², Re⟨qp⟩ = ½ ∂²χ/∂x∂y.
        let psi = FockVector::new(DVector::from_vec(vec![
            C64::new(0.6, 0.0),
            C64::new(0.3, 0.4),
            C64::new(-0.2, 0.1),
            C64::new(0.0, 0.5),
        ]))
        .unwrap();
        let mut amps = DVector::zeros(20);
        amps.rows_mut(0, 4).copy_from(psi.amps());
        let rho = FockDensityMatrix::from_pure(1, 20, amps).unwrap();
        let chi = |x: f64, y: f64| cf_eval(&rho, C64::new(x, y));
        let s = 1e-3;
        let d2y = (chi(0.0, s) - 2.0 * chi(0.0, 0.0) + chi(0.0, -s)) / (s * s);
        let d2x = (chi(s, 0.0) - 2.0 * chi(0.0, 0.0) + chi(-s, 0.0)) / (s * s);
        let dxy = (chi(s, s) - chi(s, -s) - chi(-s, s) + chi(-s, -s)) / (4.0 * s * s);
        let dy = (chi(0.0, s) - chi(0.0, -s)) / (2.0 * s);
        let dx = (chi(s, 0.0) - chi(-s, 0.0)) / (2.0 * s);
        // first moments: ∂χ/∂y = i√2⟨q⟩, ∂χ/∂x = -i√2⟨p⟩
        let q = dy.im / std::f64::consts::SQRT_2;
        let p = -dx.im / std::f64::consts::SQRT_2;
        let mom = moments_from_state(&rho).unwrap();
        let sqq = -0.5 * d2y.re - q * q;
        let spp = -0.5 * d2x.re - p * p;
        let sqp = 0.5 * dxy.re - q * p;
        assert!((sqq - mom.cm.sqq).abs() < 1e-5, "{sqq} vs {}", mom.cm.sqq);
        assert!((spp - mom.cm.spp).abs() < 1e-5, "{spp} vs {}", mom.cm.spp);
        assert!((sqp - mom.cm.sqp).abs() < 1e-5, "{sqp} vs {}", mom.cm.sqp);
    }
}
