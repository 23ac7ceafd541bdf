//! Teleportation through the characteristic-function product law, the
//! distorting state, and the noise and fidelity figures built on it.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::cf::{self, CFGrid, GridTag, Reconstruction};
use crate::error::{Error, Result};
use crate::fock::{self, FockDensityMatrix, OpLabel};
use crate::gaussian::{fock_moments, CovMatrix2, GaussianState};
use crate::states::StateHandle;

/// Largest first moment tolerated for "undisplaced" resources.
pub const DISPLACEMENT_TOL: f64 = 1e-10;

pub const REPORT_SCHEMA: &str = "cvtele-report/1";

/// Population allowed in the last three levels of a reconstructed distorting state.
pub const DISTORTING_TAIL_TOL: f64 = 1e-12;
/// Largest dimension [`distorting_state`] grows to.
pub const MAX_DISTORTING_DIM: usize = 160;

/// Truncation and CF lattice shared by one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Numerics {
    /// Fock truncation `N_c`.
    pub trunc: usize,
    /// CF lattice half-width `L`.
    pub half_width: f64,
    /// CF lattice step `h`.
    pub step: f64,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            trunc: 20,
            half_width: 6.0,
            step: 0.1,
        }
    }
}

impl Numerics {
    pub fn new(trunc: usize, half_width: f64, step: f64) -> Result<Self> {
        let n = Self {
            trunc,
            half_width,
            step,
        };
        n.validate()?;
        Ok(n)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trunc == 0 {
            return Err(Error::Dimension("truncation must be at least 1".into()));
        }
        if !(self.half_width > 0.0 && self.step > 0.0 && self.step <= self.half_width && self.half_width.is_finite()) {
            return Err(Error::check("teleport", "lattice-parameters", self.step, self.half_width));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TeleportJob {
    pub input: StateHandle,
    pub resource: StateHandle,
    pub numerics: Numerics,
}

impl TeleportJob {
    pub fn new(input: StateHandle, resource: StateHandle, numerics: Numerics) -> Result<Self> {
        if input.modes() != 1 {
            return Err(Error::Dimension("input must be a one-mode state".into()));
        }
        if resource.modes() != 2 {
            return Err(Error::Dimension("resource must be a two-mode state".into()));
        }
        numerics.validate()?;
        Ok(Self {
            input,
            resource,
            numerics,
        })
    }
}

/// A sampled CF together with the density matrix rebuilt from it.
#[derive(Debug, Clone)]
pub struct GridState {
    pub grid: CFGrid,
    pub reconstruction: Reconstruction,
}

impl GridState {
    pub fn rho(&self) -> &FockDensityMatrix {
        &self.reconstruction.rho
    }
}

/// `χ_AB(λ*, λ)`: the resource CF on the line probed by the Bell measurement.
pub fn resource_on_line(resource: &StateHandle, lambda: C64) -> C64 {
    resource.cf(&[lambda.conj(), lambda])
}

/// Output state from `χ_out(λ) = χ_in(λ) χ_AB(λ*, λ)`.
pub fn teleport_cf(job: &TeleportJob) -> Result<GridState> {
    let n = &job.numerics;
    let grid = cf::sample_grid(
        |l| job.input.cf(&[l]) * resource_on_line(&job.resource, l),
        n.half_width,
        n.step,
        GridTag::Output,
    )?;
    let reconstruction = cf::reconstruct(&grid, n.trunc)?;
    Ok(GridState { grid, reconstruction })
}

/// The one-mode state whose normally ordered CF is `χ_AB(λ*, λ)`.
///
/// The distorting state carries the resource's photons plus a unit of vacuum
/// noise, so it is wider than the resource itself. Reconstruction starts at
/// `N_c` and doubles the dimension until the top three levels hold less than
/// [`DISTORTING_TAIL_TOL`].
pub fn distorting_state(resource: &StateHandle, numerics: &Numerics) -> Result<GridState> {
    numerics.validate()?;
    let grid = cf::sample_grid(
        |l| resource_on_line(resource, l) * (-0.5 * l.norm_sqr()).exp(),
        numerics.half_width,
        numerics.step,
        GridTag::Distorting,
    )?;
    let mut dim = numerics.trunc.max(4);
    loop {
        let reconstruction = cf::reconstruct(&grid, dim)?;
        let tail = reconstruction.rho.boundary_population(3);
        if tail <= DISTORTING_TAIL_TOL {
            return Ok(GridState { grid, reconstruction });
        }
        if dim >= MAX_DISTORTING_DIM {
            return Err(Error::Truncation {
                dim,
                population: 1.0 - tail,
                required: 1.0 - DISTORTING_TAIL_TOL,
            });
        }
        dim = (2 * dim).min(MAX_DISTORTING_DIM);
    }
}

/// Exact distorting state of a Gaussian resource.
///
/// On the measurement line `ξ_AB = T ξ` with `T = [diag(-1, 1); I]`, so the
/// distorting state has mean `Tᵀ m` and covariance `Tᵀ V T + I/2`.
pub fn distorting_gaussian(resource: &GaussianState) -> Result<GaussianState> {
    if resource.modes() != 2 {
        return Err(Error::Dimension("resource must be a two-mode state".into()));
    }
    #[rustfmt::skip]
    let t = DMatrix::from_row_slice(4, 2, &[
        -1.0, 0.0,
         0.0, 1.0,
         1.0, 0.0,
         0.0, 1.0,
    ]);
    let cm = t.transpose() * resource.cm() * &t + DMatrix::identity(2, 2) * 0.5;
    let mean = t.transpose() * resource.mean();
    GaussianState::new(mean, cm)
}

fn require_undisplaced(resource: &StateHandle) -> Result<()> {
    let m = resource.max_first_moment()?;
    if m > DISPLACEMENT_TOL {
        return Err(Error::Displaced(m));
    }
    Ok(())
}

/// Symmetrized second moments of an undisplaced resource, ordered
/// `(q₁, p₁, q₂, p₂)`.
fn resource_correlations(resource: &StateHandle) -> Result<DMatrix<f64>> {
    require_undisplaced(resource)?;
    if let Some(g) = resource.gaussian() {
        return Ok(g.cm().clone());
    }
    let rho = resource.fock().expect("handle without a representation");
    Ok(fock_moments(rho)?.1)
}

/// Covariance matrix of the distorting state from resource correlations.
pub fn cm_from_resource(resource: &StateHandle) -> Result<CovMatrix2> {
    if resource.modes() != 2 {
        return Err(Error::Dimension("resource must be a two-mode state".into()));
    }
    let s = resource_correlations(resource)?;
    let (q1, p1, q2, p2) = (0, 1, 2, 3);
    Ok(CovMatrix2 {
        sqq: 0.5 + s[(q2, q2)] + s[(q1, q1)] - 2.0 * s[(q1, q2)],
        sqp: s[(q2, p2)] - s[(q1, p1)] + s[(q2, p1)] - s[(q1, p2)],
        spp: 0.5 + s[(p2, p2)] + s[(p1, p1)] + 2.0 * s[(p1, p2)],
    })
}

/// `⟨Q̂²⟩, ⟨P̂²⟩` and the symmetrized `⟨Q̂P̂⟩` for `Q̂ = q₂ - q₁`, `P̂ = p₁ + p₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonlocalCorrelations {
    pub qq: f64,
    pub pp: f64,
    pub qp: f64,
}

impl NonlocalCorrelations {
    /// `⟨Q̂²⟩⟨P̂²⟩ - ⟨Q̂P̂⟩²`
    pub fn uncertainty_product(&self) -> f64 {
        self.qq * self.pp - self.qp * self.qp
    }
}

/// Expands `Q̂` and `P̂` into single-mode quadrature products and evaluates each
/// with [`fock::expect_labels`].
pub fn nonlocal_correlations(rho: &FockDensityMatrix) -> Result<NonlocalCorrelations> {
    use OpLabel::{P, Q};
    if rho.modes() != 2 {
        return Err(Error::Dimension("resource must be a two-mode state".into()));
    }
    let e = |a: OpLabel, ma: usize, b: OpLabel, mb: usize| -> Result<f64> {
        Ok(fock::expect_labels(rho, &[(a, ma), (b, mb)])?.re)
    };
    let qq = e(Q, 2, Q, 2)? + e(Q, 1, Q, 1)? - 2.0 * e(Q, 1, Q, 2)?;
    let pp = e(P, 1, P, 1)? + e(P, 2, P, 2)? + 2.0 * e(P, 1, P, 2)?;
    // Re⟨(q₂ - q₁)(p₁ + p₂)⟩; the real part symmetrizes the same-mode terms
    let qp = e(Q, 2, P, 1)? + e(Q, 2, P, 2)? - e(Q, 1, P, 1)? - e(Q, 1, P, 2)?;
    Ok(NonlocalCorrelations { qq, pp, qp })
}

/// `Δ_EPR = ½[⟨(q₂ - q₁)²⟩ + ⟨(p₁ + p₂)²⟩]`, analytic for Gaussian resources.
pub fn epr_uncertainty(resource: &StateHandle) -> Result<f64> {
    if resource.modes() != 2 {
        return Err(Error::Dimension("resource must be a two-mode state".into()));
    }
    require_undisplaced(resource)?;
    match resource.gaussian() {
        Some(g) => Ok(epr_uncertainty_gaussian(g)),
        None => epr_uncertainty_fock(resource.fock().expect("handle without a representation")),
    }
}

fn epr_uncertainty_gaussian(g: &GaussianState) -> f64 {
    let v = g.cm();
    0.5 * (v[(0, 0)] + v[(2, 2)] - 2.0 * v[(0, 2)] + v[(1, 1)] + v[(3, 3)] + 2.0 * v[(1, 3)])
}

/// [`epr_uncertainty`] through Fock-space operator averages.
pub fn epr_uncertainty_fock(rho: &FockDensityMatrix) -> Result<f64> {
    let c = nonlocal_correlations(rho)?;
    let disp = [OpLabel::Q, OpLabel::P]
        .into_iter()
        .flat_map(|l| [(l, 1), (l, 2)])
        .map(|(l, m)| fock::expect_labels(rho, &[(l, m)]).map(|z| z.norm()))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    if disp > DISPLACEMENT_TOL {
        return Err(Error::Displaced(disp));
    }
    Ok(0.5 * (c.qq + c.pp))
}

/// Left- and right-hand sides of the two moment relations between the
/// distorting state and the resource.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentRelations {
    /// `⟨a²⟩` of the reconstructed distorting state.
    pub a2_m: C64,
    /// `⟨a₂²⟩ + ⟨a₁†²⟩ - 2⟨a₁†a₂⟩`
    pub a2_ab: C64,
    /// `⟨a†a⟩` of the reconstructed distorting state.
    pub n_m: f64,
    /// `1 + ⟨a₁†a₁⟩ + ⟨a₂†a₂⟩ - ⟨a₁a₂⟩ - ⟨a₁†a₂†⟩`
    pub n_ab: f64,
}

impl MomentRelations {
    pub fn a2_defect(&self) -> f64 {
        (self.a2_m - self.a2_ab).norm()
    }

    pub fn n_defect(&self) -> f64 {
        (self.n_m - self.n_ab).abs()
    }
}

pub fn moment_relations_check(resource: &StateHandle, numerics: &Numerics) -> Result<MomentRelations> {
    require_undisplaced(resource)?;
    let m = distorting_state(resource, numerics)?;
    moment_relations(m.rho(), &resource.to_fock(numerics.trunc)?)
}

/// [`moment_relations_check`] for an already reconstructed distorting state.
pub fn moment_relations(rho_m: &FockDensityMatrix, rho_ab: &FockDensityMatrix) -> Result<MomentRelations> {
    use OpLabel::{Annihilate as A, Create as C};
    let m = cf::moments_from_state(rho_m)?;
    let e = |ops: &[(OpLabel, usize)]| fock::expect_labels(rho_ab, ops);
    let a2_ab = e(&[(A, 2), (A, 2)])? + e(&[(C, 1), (C, 1)])? - 2.0 * e(&[(C, 1), (A, 2)])?;
    let n_ab = 1.0 + e(&[(C, 1), (A, 1)])? + e(&[(C, 2), (A, 2)])? - e(&[(A, 1), (A, 2)])? - e(&[(C, 1), (C, 2)])?;
    Ok(MomentRelations {
        a2_m: m.a2,
        a2_ab,
        n_m: m.n,
        n_ab: n_ab.re,
    })
}

/// Mean photon number added by the protocol next to the resource's EPR uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AddedNoise {
    pub added_noise: f64,
    pub delta_epr: f64,
}

impl AddedNoise {
    /// `|added_noise - Δ_EPR|`
    pub fn defect(&self) -> f64 {
        (self.added_noise - self.delta_epr).abs()
    }
}

/// `⟨a†a⟩` of the reconstructed distorting state.
pub fn added_noise(resource: &StateHandle, numerics: &Numerics) -> Result<AddedNoise> {
    let delta_epr = epr_uncertainty(resource)?;
    let m = cf::moments_from_state(distorting_state(resource, numerics)?.rho())?;
    Ok(AddedNoise {
        added_noise: m.n,
        delta_epr,
    })
}

/// `⟨a†a⟩` of the exact Gaussian distorting state.
pub fn added_noise_gaussian(resource: &GaussianState) -> Result<AddedNoise> {
    if resource.max_first_moment() > DISPLACEMENT_TOL {
        return Err(Error::Displaced(resource.max_first_moment()));
    }
    let m = distorting_gaussian(resource)?;
    let v = m.cm();
    let mu = m.mean();
    Ok(AddedNoise {
        added_noise: 0.5 * (v[(0, 0)] + v[(1, 1)] - 1.0) + 0.5 * mu.norm_squared(),
        delta_epr: epr_uncertainty_gaussian(resource),
    })
}

/// `Q(α) = ⟨α|ρ|α⟩`, without the customary `1/π`.
pub fn q_function(rho: &FockDensityMatrix, alpha: C64) -> Result<f64> {
    if rho.modes() != 1 {
        return Err(Error::Dimension("Q function expects one mode".into()));
    }
    let v = fock::coherent_amplitudes(alpha, rho.dim());
    Ok(v.dotc(&(rho.matrix() * &v)).re)
}

/// `(1/π) Σ e^{-|λ|²} χ_AB(λ*, λ) h²` over the job lattice.
pub fn fidelity_coherent_quadrature(resource: &StateHandle, numerics: &Numerics) -> Result<f64> {
    numerics.validate()?;
    let g = cf::sample_grid_unchecked(
        |l| (-l.norm_sqr()).exp() * resource_on_line(resource, l),
        numerics.half_width,
        numerics.step,
        GridTag::Resource,
    )?;
    let sum: f64 = g.values().iter().map(|z| z.re).sum();
    Ok(sum * numerics.step * numerics.step / std::f64::consts::PI)
}

/// Coherent-state teleportation fidelity, by quadrature and as `Q_M(0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoherentFidelity {
    pub quadrature: f64,
    pub q_m0: f64,
}

impl CoherentFidelity {
    pub fn defect(&self) -> f64 {
        (self.quadrature - self.q_m0).abs()
    }
}

pub fn fidelity_coherent(resource: &StateHandle, numerics: &Numerics) -> Result<CoherentFidelity> {
    let quadrature = fidelity_coherent_quadrature(resource, numerics)?;
    let m = distorting_state(resource, numerics)?;
    Ok(CoherentFidelity {
        quadrature,
        q_m0: q_function(m.rho(), C64::from(0.0))?,
    })
}

/// Uhlmann fidelity `(tr √(√a b √a))²`; `⟨ψ|b|ψ⟩` when `a` is pure.
pub fn fidelity(a: &FockDensityMatrix, b: &FockDensityMatrix) -> Result<f64> {
    if a.modes() != b.modes() || a.dim() != b.dim() {
        return Err(Error::Dimension(format!(
            "fidelity between {}-mode N_c={} and {}-mode N_c={}",
            a.modes(),
            a.dim(),
            b.modes(),
            b.dim()
        )));
    }
    if let Some(psi) = a.pure_state() {
        return Ok(psi.dotc(&(b.matrix() * psi)).re);
    }
    let s = fock::hermitian_sqrt(a.matrix());
    let m = &s * b.matrix() * &s;
    let m = (&m + m.adjoint()) * C64::from(0.5);
    let root_sum: f64 = m.symmetric_eigenvalues().iter().map(|x| x.max(0.0).sqrt()).sum();
    Ok(root_sum * root_sum)
}

/// `(1/π) Σ χ_a*(λ) χ_b(λ) h²`, which approximates `tr(ρ_a ρ_b)`.
pub fn cf_overlap(a: &CFGrid, b: &CFGrid) -> Result<f64> {
    if a.m() != b.m() || a.step() != b.step() {
        return Err(Error::Dimension("CF grids use different lattices".into()));
    }
    let side = a.side();
    let rows: Vec<f64> = (0..side)
        .into_par_iter()
        .map(|j| {
            let r = j * side..(j + 1) * side;
            a.values()[r.clone()]
                .iter()
                .zip(&b.values()[r])
                .map(|(x, y)| (x.conj() * y).re)
                .sum()
        })
        .collect();
    let sum: f64 = rows.iter().sum();
    Ok(sum * a.step() * a.step() / std::f64::consts::PI)
}

/// Every figure of one teleportation run, serialized flat.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolReport {
    pub schema: &'static str,
    pub input: String,
    pub resource: String,
    pub trunc: usize,
    pub grid_half_width: f64,
    pub grid_step: f64,
    pub added_noise: f64,
    pub delta_epr: f64,
    pub noise_epr_defect: f64,
    pub cm_qq: f64,
    pub cm_qp: f64,
    pub cm_pp: f64,
    pub det_cm: f64,
    pub min_eig_cm_minus_half: f64,
    /// Only for coherent (and vacuum) inputs.
    pub f_coh: Option<f64>,
    pub q_m0: f64,
    pub f_in_out: f64,
    pub overlap_in_out: f64,
    pub output_hermiticity_defect: f64,
    pub output_trace_defect: f64,
    pub distorting_hermiticity_defect: f64,
    pub distorting_trace_defect: f64,
    pub oracle_fidelity: Option<f64>,
    pub oracle_probability_deficit: Option<f64>,
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

impl ProtocolReport {
    pub const CSV_HEADER: &'static str = "schema,input,resource,trunc,grid_half_width,grid_step,added_noise,delta_epr,\
noise_epr_defect,cm_qq,cm_qp,cm_pp,det_cm,min_eig_cm_minus_half,f_coh,q_m0,f_in_out,overlap_in_out,\
output_hermiticity_defect,output_trace_defect,distorting_hermiticity_defect,distorting_trace_defect,\
oracle_fidelity,oracle_probability_deficit";

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One CSV row in [`Self::CSV_HEADER`] order. State labels are quoted.
    pub fn to_csv_row(&self) -> String {
        [
            self.schema.to_string(),
            format!("\"{}\"", self.input),
            format!("\"{}\"", self.resource),
            self.trunc.to_string(),
            self.grid_half_width.to_string(),
            self.grid_step.to_string(),
            self.added_noise.to_string(),
            self.delta_epr.to_string(),
            self.noise_epr_defect.to_string(),
            self.cm_qq.to_string(),
            self.cm_qp.to_string(),
            self.cm_pp.to_string(),
            self.det_cm.to_string(),
            self.min_eig_cm_minus_half.to_string(),
            opt(self.f_coh),
            self.q_m0.to_string(),
            self.f_in_out.to_string(),
            self.overlap_in_out.to_string(),
            self.output_hermiticity_defect.to_string(),
            self.output_trace_defect.to_string(),
            self.distorting_hermiticity_defect.to_string(),
            self.distorting_trace_defect.to_string(),
            opt(self.oracle_fidelity),
            opt(self.oracle_probability_deficit),
        ]
        .join(",")
    }
}

/// Runs the product-law pipeline and every metric for one job.
pub fn run_protocol(job: &TeleportJob) -> Result<ProtocolReport> {
    let n = &job.numerics;
    let out = teleport_cf(job)?;
    let m = distorting_state(&job.resource, n)?;
    let moments = cf::moments_from_state(m.rho())?;
    let delta_epr = epr_uncertainty(&job.resource)?;
    let cm = cm_from_resource(&job.resource)?;
    let f_coh = if job.input.is_coherent() {
        Some(fidelity_coherent_quadrature(&job.resource, n)?)
    } else {
        None
    };
    let rho_in = job.input.to_fock(n.trunc)?;
    let grid_in = cf::sample_grid(|l| job.input.cf(&[l]), n.half_width, n.step, GridTag::Input)?;
    Ok(ProtocolReport {
        schema: REPORT_SCHEMA,
        input: job.input.label().to_string(),
        resource: job.resource.label().to_string(),
        trunc: n.trunc,
        grid_half_width: n.half_width,
        grid_step: n.step,
        added_noise: moments.n,
        delta_epr,
        noise_epr_defect: (moments.n - delta_epr).abs(),
        cm_qq: cm.sqq,
        cm_qp: cm.sqp,
        cm_pp: cm.spp,
        det_cm: cm.det(),
        min_eig_cm_minus_half: cm.min_eig_minus_half(),
        f_coh,
        q_m0: q_function(m.rho(), C64::from(0.0))?,
        f_in_out: fidelity(&rho_in, out.rho())?,
        overlap_in_out: cf_overlap(&grid_in, &out.grid)?,
        output_hermiticity_defect: out.reconstruction.hermiticity_defect,
        output_trace_defect: out.reconstruction.trace_defect(),
        distorting_hermiticity_defect: m.reconstruction.hermiticity_defect,
        distorting_trace_defect: m.reconstruction.trace_defect(),
        oracle_fidelity: None,
        oracle_probability_deficit: None,
    })
}
