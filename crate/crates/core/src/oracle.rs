//! Brute-force teleportation: joint quadrature measurement on a lattice of
//! outcomes, conditioning of Bob's mode, displacement and averaging.
//!
//! Shares nothing with the CF path except the displacement matrices.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::cf::displacement_matrix;
use crate::error::{Error, Result};
use crate::fock::FockDensityMatrix;

const MODULE: &str = "oracle";

/// Largest tolerated `1 - Σ ψₙ² δη` on the η lattice.
pub const ETA_TAIL_TOL: f64 = 1e-8;
pub const ORTHONORMALITY_TOL: f64 = 1e-6;
/// Largest tolerated shortfall of the outcome probability.
pub const PROBABILITY_DEFICIT_TOL: f64 = 0.05;
pub const CONDITIONAL_TRACE_TOL: f64 = 1e-10;

/// How Bob's displacement is derived from the outcome `(q, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GainConvention {
    /// `α = (q + ip)/√2`
    #[default]
    Sqrt2,
    /// `α = q + ip`
    Literal,
}

impl GainConvention {
    pub fn alpha(self, q: f64, p: f64) -> C64 {
        match self {
            GainConvention::Sqrt2 => C64::new(q, p) * std::f64::consts::FRAC_1_SQRT_2,
            GainConvention::Literal => C64::new(q, p),
        }
    }
}

impl FromStr for GainConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sqrt2" => Ok(GainConvention::Sqrt2),
            "literal" => Ok(GainConvention::Literal),
            _ => Err(Error::parse(s, "gain must be sqrt2 or literal")),
        }
    }
}

impl fmt::Display for GainConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GainConvention::Sqrt2 => "sqrt2",
            GainConvention::Literal => "literal",
        })
    }
}

/// Outcome lattice `(L_m, δ_m)` and η integration lattice `(L_η, δη)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleLattice {
    pub half_width: f64,
    pub step: f64,
    pub eta_half_width: f64,
    pub eta_step: f64,
}

impl Default for OracleLattice {
    fn default() -> Self {
        Self {
            half_width: 6.0,
            step: 0.1,
            eta_half_width: 8.0,
            eta_step: 0.05,
        }
    }
}

fn symmetric_lattice(half_width: f64, step: f64) -> Result<Vec<f64>> {
    if !(half_width > 0.0 && step > 0.0 && step <= half_width && half_width.is_finite()) {
        return Err(Error::check(MODULE, "lattice-parameters", step, half_width));
    }
    let m = (half_width / step).round() as i64;
    Ok((-m..=m).map(|k| k as f64 * step).collect())
}

impl OracleLattice {
    pub fn outcomes(&self) -> Result<Vec<f64>> {
        symmetric_lattice(self.half_width, self.step)
    }

    pub fn etas(&self) -> Result<Vec<f64>> {
        symmetric_lattice(self.eta_half_width, self.eta_step)
    }
}

/// Hermite functions `ψₙ(x)`, `n < dim`, as rows of a `dim × xs.len()` matrix.
pub fn hermite_functions(dim: usize, xs: &[f64]) -> DMatrix<f64> {
    let mut psi = DMatrix::zeros(dim, xs.len());
    let c0 = std::f64::consts::PI.powf(-0.25);
    for (j, &x) in xs.iter().enumerate() {
        let mut prev = 0.0;
        let mut cur = c0 * (-0.5 * x * x).exp();
        for n in 0..dim {
            psi[(n, j)] = cur;
            let next = (2.0 / (n + 1) as f64).sqrt() * x * cur - (n as f64 / (n + 1) as f64).sqrt() * prev;
            prev = cur;
            cur = next;
        }
    }
    psi
}

/// Position wavefunctions on a lattice, for the `⟨x|n⟩` overlaps.
#[derive(Debug, Clone)]
pub struct PositionBasisTable {
    x: Vec<f64>,
    step: f64,
    psi: DMatrix<f64>,
}

impl PositionBasisTable {
    pub fn new(dim: usize, half_width: f64, step: f64) -> Result<Self> {
        let x = symmetric_lattice(half_width, step)?;
        let psi = hermite_functions(dim, &x);
        let t = Self { x, step, psi };
        let tail = t.tail_mass();
        if tail > ETA_TAIL_TOL {
            return Err(Error::check(MODULE, "eta-coverage", tail, ETA_TAIL_TOL));
        }
        let ortho = t.orthonormality_defect();
        if ortho > ORTHONORMALITY_TOL {
            return Err(Error::check(MODULE, "hermite-orthonormality", ortho, ORTHONORMALITY_TOL));
        }
        Ok(t)
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn psi(&self) -> &DMatrix<f64> {
        &self.psi
    }

    /// `max_n |1 - Σ ψₙ(x)² δx|`
    pub fn tail_mass(&self) -> f64 {
        self.psi
            .row_iter()
            .map(|r| (1.0 - r.norm_squared() * self.step).abs())
            .fold(0.0, f64::max)
    }

    /// `max |Σ ψₙψₘ δx - δₙₘ|`
    pub fn orthonormality_defect(&self) -> f64 {
        let g = &self.psi * self.psi.transpose() * self.step;
        (g - DMatrix::identity(self.psi.nrows(), self.psi.nrows())).amax()
    }
}

/// Lattice-dependent tables reused for every outcome.
struct Kernel {
    dim: usize,
    etas: Vec<f64>,
    /// `ψₘ(η) δη / √(2π)`
    weighted: DMatrix<f64>,
}

impl Kernel {
    fn new(dim: usize, lattice: &OracleLattice) -> Result<Self> {
        let table = PositionBasisTable::new(dim, lattice.eta_half_width, lattice.eta_step)?;
        let scale = lattice.eta_step / (2.0 * std::f64::consts::PI).sqrt();
        Ok(Self {
            dim,
            weighted: table.psi() * scale,
            etas: table.x,
        })
    }

    /// `e^{ipη} ψₘ(η) δη / √(2π)` as an `η × m` matrix.
    fn phase_columns(&self, p: f64) -> DMatrix<C64> {
        DMatrix::from_fn(self.etas.len(), self.dim, |e, m| {
            C64::from_polar(self.weighted[(m, e)], p * self.etas[e])
        })
    }

    /// `ψₙ(q + η)` as an `n × η` matrix.
    fn shifted(&self, q: f64) -> DMatrix<C64> {
        let xs: Vec<f64> = self.etas.iter().map(|e| q + e).collect();
        hermite_functions(self.dim, &xs).map(C64::from)
    }
}

/// `Φₙₘ(q, p) = (2π)^{-1/2} Σ_η e^{ipη} ψₙ(q + η) ψₘ(η) δη`; rows index the
/// input mode, columns Alice's mode.
pub fn phi_coefficients(q: f64, p: f64, dim: usize, lattice: &OracleLattice) -> Result<DMatrix<C64>> {
    let k = Kernel::new(dim, lattice)?;
    Ok(k.shifted(q) * k.phase_columns(p))
}

/// `Σ_{q,p} δ_m² Φ(q,p)Φ(q,p)†` on the `dim²`-dimensional (input, Alice) space.
pub fn completeness_operator(dim: usize, lattice: &OracleLattice) -> Result<DMatrix<C64>> {
    let k = Kernel::new(dim, lattice)?;
    let grid = lattice.outcomes()?;
    let cols: Vec<DMatrix<C64>> = grid.iter().map(|&p| k.phase_columns(p)).collect();
    let w = lattice.step * lattice.step;
    let rows: Vec<DMatrix<C64>> = grid
        .par_iter()
        .map(|&q| {
            let a = k.shifted(q);
            let mut acc = DMatrix::<C64>::zeros(dim * dim, dim * dim);
            for b in &cols {
                let phi = &a * b;
                let v = DVector::from_fn(dim * dim, |i, _| phi[(i / dim, i % dim)]);
                acc.ger(C64::from(w), &v, &v.conjugate(), C64::from(1.0));
            }
            acc
        })
        .collect();
    let mut sum = DMatrix::<C64>::zeros(dim * dim, dim * dim);
    for r in &rows {
        sum += r;
    }
    Ok(sum)
}

/// One lattice outcome of the joint measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasurementOutcome {
    pub q: f64,
    pub p: f64,
    pub weight: f64,
    pub prob_density: f64,
}

fn check_pair(rho_in: &FockDensityMatrix, rho_ab: &FockDensityMatrix) -> Result<usize> {
    if rho_in.modes() != 1 || rho_ab.modes() != 2 {
        return Err(Error::Dimension("oracle needs a one-mode input and a two-mode resource".into()));
    }
    if rho_in.dim() != rho_ab.dim() {
        return Err(Error::Dimension(format!(
            "input N_c={} differs from resource N_c={}",
            rho_in.dim(),
            rho_ab.dim()
        )));
    }
    Ok(rho_in.dim())
}

/// `ρ_AB` regrouped as `X[(a,a'), (b,b')]` so Bob's conditional state is a
/// single vector-matrix product with `vec(Φ†ρ_inΦ)`.
fn regroup_resource(rho_ab: &FockDensityMatrix) -> DMatrix<C64> {
    let n = rho_ab.dim();
    let r = rho_ab.matrix();
    DMatrix::from_fn(n * n, n * n, |row, col| {
        let (a, a2) = (row / n, row % n);
        let (b, b2) = (col / n, col % n);
        r[(a * n + b, a2 * n + b2)]
    })
}

/// Bob's unnormalized state after the outcome `(q, p)`.
#[derive(Debug, Clone)]
pub struct ConditionalState {
    pub rho: DMatrix<C64>,
    /// `tr ρ_B / c` with `c` the completeness constant.
    pub prob_density: f64,
}

fn conditional_from_phi(phi: &DMatrix<C64>, rho_in: &DMatrix<C64>, x: &DMatrix<C64>, n: usize) -> Result<DMatrix<C64>> {
    let m = phi.adjoint() * rho_in * phi;
    let vec_m = DMatrix::from_fn(1, n * n, |_, i| m[(i / n, i % n)]);
    let flat = vec_m * x;
    let rho_b = DMatrix::from_fn(n, n, |b, b2| flat[(0, b * n + b2)]);
    let tr = rho_b.trace().re;
    if tr < -CONDITIONAL_TRACE_TOL {
        return Err(Error::check(MODULE, "conditional-trace", -tr, CONDITIONAL_TRACE_TOL));
    }
    Ok(rho_b)
}

/// `Tr_{in,A}[(|Φ⟩⟨Φ| ⊗ I)(ρ_in ⊗ ρ_AB)]` at one outcome.
pub fn conditional_bob_state(
    rho_in: &FockDensityMatrix,
    rho_ab: &FockDensityMatrix,
    q: f64,
    p: f64,
    lattice: &OracleLattice,
    completeness: f64,
) -> Result<ConditionalState> {
    let n = check_pair(rho_in, rho_ab)?;
    let phi = phi_coefficients(q, p, n, lattice)?;
    let rho = conditional_from_phi(&phi, rho_in.matrix(), &regroup_resource(rho_ab), n)?;
    let prob_density = rho.trace().re / completeness;
    Ok(ConditionalState { rho, prob_density })
}

/// Result of the brute-force protocol.
#[derive(Debug, Clone)]
pub struct OracleOutput {
    pub rho: FockDensityMatrix,
    /// Measured completeness constant, see [`completeness_constant`].
    pub completeness: f64,
    /// `Σ prob_density · weight`
    pub total_probability: f64,
    pub min_prob_density: f64,
}

impl OracleOutput {
    pub fn probability_deficit(&self) -> f64 {
        1.0 - self.total_probability
    }
}

/// `c` in `Σ δ_m² Φ(q,p)Φ(q,p)† ≈ c I`, read off the `|0,0⟩` diagonal element.
///
/// The sum runs over an outcome lattice with the measurement step but a
/// half-width of at least `L_η`, so a narrow outcome lattice shows up as a
/// probability deficit instead of cancelling out.
pub fn completeness_constant(lattice: &OracleLattice) -> Result<f64> {
    let k = Kernel::new(1, lattice)?;
    let wide = symmetric_lattice(lattice.half_width.max(lattice.eta_half_width), lattice.step)?;
    let cols: Vec<DMatrix<C64>> = wide.iter().map(|&p| k.phase_columns(p)).collect();
    let rows: Vec<f64> = wide
        .par_iter()
        .map(|&q| {
            let a = k.shifted(q);
            cols.iter().map(|b| (&a * b)[(0, 0)].norm_sqr()).sum()
        })
        .collect();
    Ok(rows.iter().sum::<f64>() * lattice.step * lattice.step)
}

struct RowSum {
    rho: DMatrix<C64>,
    trace: f64,
    min_trace: f64,
}

/// `ρ_out = Σ w D(α) ρ_B(q,p) D(α)†` over the outcome lattice.
pub fn oracle_teleport(
    rho_in: &FockDensityMatrix,
    rho_ab: &FockDensityMatrix,
    lattice: &OracleLattice,
    gain: GainConvention,
) -> Result<OracleOutput> {
    let n = check_pair(rho_in, rho_ab)?;
    let k = Kernel::new(n, lattice)?;
    let x = regroup_resource(rho_ab);
    let grid = lattice.outcomes()?;
    let cols: Vec<DMatrix<C64>> = grid.iter().map(|&p| k.phase_columns(p)).collect();
    let w = lattice.step * lattice.step;
    let rows: Vec<RowSum> = grid
        .par_iter()
        .map(|&q| -> Result<RowSum> {
            let a = k.shifted(q);
            let mut acc = RowSum {
                rho: DMatrix::zeros(n, n),
                trace: 0.0,
                min_trace: f64::INFINITY,
            };
            for (b, &p) in cols.iter().zip(&grid) {
                let phi = &a * b;
                let rho_b = conditional_from_phi(&phi, rho_in.matrix(), &x, n)?;
                let tr = rho_b.trace().re;
                let d = displacement_matrix(gain.alpha(q, p), n).into_matrix();
                acc.rho += (&d * rho_b * d.adjoint()) * C64::from(w);
                acc.trace += tr * w;
                acc.min_trace = acc.min_trace.min(tr);
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let c = completeness_constant(lattice)?;
    let mut sum = DMatrix::<C64>::zeros(n, n);
    let (mut tr, mut min_tr) = (0.0, f64::INFINITY);
    for r in &rows {
        sum += &r.rho;
        tr += r.trace;
        min_tr = min_tr.min(r.min_trace);
    }
    let total_probability = tr / c;
    let deficit = 1.0 - total_probability;
    if deficit > PROBABILITY_DEFICIT_TOL {
        return Err(Error::check(MODULE, "outcome-probability (increase L_m)", deficit, PROBABILITY_DEFICIT_TOL));
    }
    let herm = (&sum + sum.adjoint()) * C64::from(0.5);
    let t = herm.trace().re;
    let rho = FockDensityMatrix::from_matrix(1, n, herm / C64::from(t))?;
    Ok(OracleOutput {
        rho,
        completeness: c,
        total_probability,
        min_prob_density: min_tr / c,
    })
}

/// Outcome probability densities over the whole lattice, row-major in `q`.
pub fn outcome_distribution(
    rho_in: &FockDensityMatrix,
    rho_ab: &FockDensityMatrix,
    lattice: &OracleLattice,
) -> Result<Vec<MeasurementOutcome>> {
    let n = check_pair(rho_in, rho_ab)?;
    let k = Kernel::new(n, lattice)?;
    let x = regroup_resource(rho_ab);
    let grid = lattice.outcomes()?;
    let cols: Vec<DMatrix<C64>> = grid.iter().map(|&p| k.phase_columns(p)).collect();
    let w = lattice.step * lattice.step;
    let c = completeness_constant(lattice)?;
    let rows: Vec<Vec<MeasurementOutcome>> = grid
        .par_iter()
        .map(|&q| {
            let a = k.shifted(q);
            cols.iter()
                .zip(&grid)
                .map(|(b, &p)| {
                    let phi = &a * b;
                    let tr = conditional_from_phi(&phi, rho_in.matrix(), &x, n)?.trace().re;
                    Ok(MeasurementOutcome {
                        q,
                        p,
                        weight: w,
                        prob_density: tr / c,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn hermite_functions_match_closed_forms() {
        let xs = [-1.3, 0.0, 0.4, 2.2];
        let psi = hermite_functions(3, &xs);
        let c = std::f64::consts::PI.powf(-0.25);
        for (j, &x) in xs.iter().enumerate() {
            let g = c * (-0.5 * x * x).exp();
            assert_abs_diff_eq!(psi[(0, j)], g, epsilon = 1e-15);
            assert_abs_diff_eq!(psi[(1, j)], 2f64.sqrt() * x * g, epsilon = 1e-15);
            assert_abs_diff_eq!(psi[(2, j)], (2.0 * x * x - 1.0) / 2f64.sqrt() * g, epsilon = 1e-14);
        }
    }

    #[test]
    fn position_table_is_orthonormal() {
        let t = PositionBasisTable::new(15, 8.0, 0.05).unwrap();
        assert!(t.orthonormality_defect() < 1e-10);
        assert!(t.tail_mass() < ETA_TAIL_TOL);
    }

    #[test]
    fn narrow_eta_lattice_is_rejected() {
        let err = PositionBasisTable::new(12, 3.0, 0.05).unwrap_err();
        assert_eq!(err.check_name(), "eta-coverage");
    }

    #[test]
    fn phi_at_origin() {
        let phi = phi_coefficients(0.0, 0.0, 6, &OracleLattice::default()).unwrap();
        assert_abs_diff_eq!(phi[(0, 0)].re, (2.0 * std::f64::consts::PI).powf(-0.5), epsilon = 1e-12);
        assert_abs_diff_eq!(phi[(0, 0)].im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn phi_is_real_at_zero_momentum() {
        let phi = phi_coefficients(0.7, 0.0, 6, &OracleLattice::default()).unwrap();
        assert!(phi.iter().all(|z| z.im == 0.0));
    }

    #[test]
    fn completeness_is_identity_times_measured_constant() {
        let lattice = OracleLattice::default();
        let c = completeness_operator(4, &lattice).unwrap();
        let scale = completeness_constant(&lattice).unwrap();
        // (2π)^{-1/2} normalization makes the constant one, not 2π
        assert_abs_diff_eq!(scale, 1.0, epsilon = 1e-2);
        let defect = (&c / C64::from(scale) - DMatrix::identity(16, 16)).camax();
        assert!(defect < 1e-2, "{defect}");
    }

    #[test]
    fn vacuum_outcomes_are_isotropic_gaussian() {
        let rho_in = FockDensityMatrix::vacuum(8).unwrap();
        let rho_ab = FockDensityMatrix::two_mode_vacuum(8).unwrap();
        let lattice = OracleLattice::default();
        let outs = outcome_distribution(&rho_in, &rho_ab, &lattice).unwrap();
        let (mut total, mut qq, mut pp, mut qp) = (0.0, 0.0, 0.0, 0.0);
        for o in &outs {
            assert!(o.prob_density >= -1e-12);
            let w = o.prob_density * o.weight;
            total += w;
            qq += w * o.q * o.q;
            pp += w * o.p * o.p;
            qp += w * o.q * o.p;
        }
        assert!((total - 1.0).abs() < 1e-2);
        // q measures q_in - q_A, p measures p_in + p_A: variance 1/2 + 1/2 each
        assert_abs_diff_eq!(qq / total, 1.0, epsilon = 1e-3);
        assert_abs_diff_eq!(pp / total, 1.0, epsilon = 1e-3);
        assert_abs_diff_eq!(qp / total, 0.0, epsilon = 1e-9);
        let cond = conditional_bob_state(&rho_in, &rho_ab, 0.0, 0.0, &lattice, 1.0).unwrap();
        let peak = 1.0 / (2.0 * std::f64::consts::PI);
        assert_abs_diff_eq!(cond.prob_density, peak, epsilon = 1e-6);
    }

    #[test]
    fn vacuum_resource_gives_thermal_output() {
        let n = 12;
        let out = oracle_teleport(
            &FockDensityMatrix::vacuum(n).unwrap(),
            &FockDensityMatrix::two_mode_vacuum(n).unwrap(),
            &OracleLattice::default(),
            GainConvention::Sqrt2,
        )
        .unwrap();
        // thermal n̄ = 1 renormalized on the truncated space
        let diag = DVector::from_fn(n, |k, _| C64::from(0.5f64.powi(k as i32 + 1)));
        let th = FockDensityMatrix::from_matrix(1, n, DMatrix::from_diagonal(&diag)).unwrap().normalized();
        let f = crate::teleport::fidelity(&out.rho, &th).unwrap();
        assert!(f >= 0.995, "{f}");
        assert!(out.probability_deficit().abs() < 1e-2);
        assert!(out.min_prob_density >= -1e-12);
        assert_abs_diff_eq!(out.rho.trace(), 1.0, epsilon = 1e-9);
        assert!(out.rho.min_eigenvalue() >= -1e-9);
    }

    #[test]
    fn narrow_outcome_lattice_reports_deficit() {
        let lattice = OracleLattice {
            half_width: 1.0,
            ..OracleLattice::default()
        };
        let err = oracle_teleport(
            &FockDensityMatrix::vacuum(6).unwrap(),
            &FockDensityMatrix::two_mode_vacuum(6).unwrap(),
            &lattice,
            GainConvention::Sqrt2,
        )
        .unwrap_err();
        assert_eq!(err.module(), "oracle");
    }

    #[test]
    fn gain_parsing() {
        assert_eq!("sqrt2".parse::<GainConvention>().unwrap(), GainConvention::Sqrt2);
        assert_eq!("literal".parse::<GainConvention>().unwrap(), GainConvention::Literal);
        assert!("unit".parse::<GainConvention>().is_err());
    }
}
