//! State catalog, the textual state grammar, and pure-state entanglement
//! tools for the entanglement/EPR frontier.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{self, FockDensityMatrix};
use crate::gaussian::{self, GaussianState};
use crate::teleport;

/// Purity below `1 - PURITY_TOL` is treated as mixed.
pub const PURITY_TOL: f64 = 1e-8;
/// Slack allowed below the frontier, and the width of the "on the frontier" band.
pub const FRONTIER_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateKind {
    Vacuum,
    Coherent(C64),
    Fock(usize),
    Thermal(f64),
    Cat { alpha: C64, parity: Parity },
    TwoModeVacuum,
    Svs(f64),
    PhotonSubtractedSvs(f64),
    /// `Σ cₙ |n, n⟩`; coefficients need not be normalized.
    FockBell(Vec<f64>),
}

/// Parsed state description, e.g. `coherent:0.3+0.2i` or `svs:r=0.4`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpec {
    pub kind: StateKind,
}

impl StateSpec {
    pub fn new(kind: StateKind) -> Self {
        Self { kind }
    }

    pub fn modes(&self) -> usize {
        match self.kind {
            StateKind::Vacuum
            | StateKind::Coherent(_)
            | StateKind::Fock(_)
            | StateKind::Thermal(_)
            | StateKind::Cat { .. } => 1,
            _ => 2,
        }
    }

    /// Short family name used in CSV output.
    pub fn family(&self) -> &'static str {
        match self.kind {
            StateKind::Vacuum => "vacuum",
            StateKind::Coherent(_) => "coherent",
            StateKind::Fock(_) => "fock",
            StateKind::Thermal(_) => "thermal",
            StateKind::Cat { .. } => "cat",
            StateKind::TwoModeVacuum => "two-mode-vacuum",
            StateKind::Svs(_) => "svs",
            StateKind::PhotonSubtractedSvs(_) => "psub-svs",
            StateKind::FockBell(_) => "bell",
        }
    }
}

pub fn parse_complex(s: &str) -> Result<C64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::parse(s, "expected a complex number like 0.3+0.2i");
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(C64::from).map_err(|_| bad());
    };
    // split at the last sign that is not a leading sign or an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let imag = |x: &str| -> Result<f64> {
        match x {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => x.parse().map_err(|_| bad()),
        }
    };
    match split {
        Some(i) => {
            let re: f64 = body[..i].parse().map_err(|_| bad())?;
            Ok(C64::new(re, imag(&body[i..])?))
        }
        None => Ok(C64::new(0.0, imag(body)?)),
    }
}

fn fmt_complex(z: C64) -> String {
    if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

fn key_values<'a>(input: &str, args: &'a str) -> Result<Vec<(&'a str, &'a str)>> {
    args.split(',')
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| Error::parse(input, format!("expected key=value, got {kv:?}")))
        })
        .collect()
}

fn single<'a>(input: &str, args: &'a str, key: &str) -> Result<&'a str> {
    match key_values(input, args)?.as_slice() {
        [(k, v)] if *k == key => Ok(v),
        _ => Err(Error::parse(input, format!("expected {key}=<value>"))),
    }
}

fn number(input: &str, v: &str) -> Result<f64> {
    let x: f64 = v.parse().map_err(|_| Error::parse(input, format!("{v:?} is not a number")))?;
    if !x.is_finite() {
        return Err(Error::parse(input, "value must be finite"));
    }
    Ok(x)
}

impl FromStr for StateSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, args) = match s.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (s, None),
        };
        let kind = match (name, args) {
            ("vacuum", None) => StateKind::Vacuum,
            ("two-mode-vacuum", None) => StateKind::TwoModeVacuum,
            ("coherent", Some(a)) => StateKind::Coherent(parse_complex(a)?),
            ("fock", Some(a)) => StateKind::Fock(a.parse().map_err(|_| Error::parse(s, "fock level must be a non-negative integer"))?),
            ("thermal", Some(a)) => {
                let n = number(s, single(s, a, "n")?)?;
                if n < 0.0 {
                    return Err(Error::parse(s, "thermal occupation must be non-negative"));
                }
                StateKind::Thermal(n)
            }
            ("cat", Some(a)) => {
                let mut alpha = None;
                let mut parity = None;
                for (k, v) in key_values(s, a)? {
                    match k {
                        "alpha" => alpha = Some(parse_complex(v)?),
                        "parity" => {
                            parity = Some(match v {
                                "even" => Parity::Even,
                                "odd" => Parity::Odd,
                                _ => return Err(Error::parse(s, "parity must be even or odd")),
                            })
                        }
                        _ => return Err(Error::parse(s, format!("unknown cat parameter {k:?}"))),
                    }
                }
                StateKind::Cat {
                    alpha: alpha.ok_or_else(|| Error::parse(s, "cat needs alpha"))?,
                    parity: parity.unwrap_or(Parity::Even),
                }
            }
            ("svs", Some(a)) => StateKind::Svs(number(s, single(s, a, "r")?)?),
            ("psub-svs", Some(a)) => StateKind::PhotonSubtractedSvs(number(s, single(s, a, "r")?)?),
            ("bell", Some(a)) => {
                let mut coeffs: Vec<f64> = Vec::new();
                for (k, v) in key_values(s, a)? {
                    let idx: usize = k
                        .strip_prefix('c')
                        .and_then(|i| i.parse().ok())
                        .ok_or_else(|| Error::parse(s, format!("bell keys are c0, c1, ..., got {k:?}")))?;
                    if coeffs.len() <= idx {
                        coeffs.resize(idx + 1, 0.0);
                    }
                    coeffs[idx] = number(s, v)?;
                }
                StateKind::FockBell(coeffs)
            }
            (_, None) if ["coherent", "fock", "thermal", "cat", "svs", "psub-svs", "bell"].contains(&name) => {
                return Err(Error::parse(s, format!("{name} needs arguments")));
            }
            _ => return Err(Error::parse(s, format!("unknown state {name:?}"))),
        };
        Ok(StateSpec { kind })
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            StateKind::Vacuum => write!(f, "vacuum"),
            StateKind::TwoModeVacuum => write!(f, "two-mode-vacuum"),
            StateKind::Coherent(a) => write!(f, "coherent:{}", fmt_complex(*a)),
            StateKind::Fock(n) => write!(f, "fock:{n}"),
            StateKind::Thermal(n) => write!(f, "thermal:n={n}"),
            StateKind::Cat { alpha, parity } => {
                let p = if *parity == Parity::Even { "even" } else { "odd" };
                write!(f, "cat:alpha={},parity={p}", fmt_complex(*alpha))
            }
            StateKind::Svs(r) => write!(f, "svs:r={r}"),
            StateKind::PhotonSubtractedSvs(r) => write!(f, "psub-svs:r={r}"),
            StateKind::FockBell(c) => {
                let parts: Vec<String> = c.iter().enumerate().map(|(i, v)| format!("c{i}={v}")).collect();
                write!(f, "bell:{}", parts.join(","))
            }
        }
    }
}

/// A state in whichever representations are available.
///
/// Gaussian states carry the exact covariance-matrix form next to their Fock
/// matrix; analytic code paths prefer the former.
#[derive(Debug, Clone)]
pub struct StateHandle {
    fock: Option<FockDensityMatrix>,
    gaussian: Option<GaussianState>,
    label: String,
}

impl StateHandle {
    pub fn from_fock(rho: FockDensityMatrix, label: impl Into<String>) -> Self {
        Self {
            fock: Some(rho),
            gaussian: None,
            label: label.into(),
        }
    }

    pub fn from_gaussian(g: GaussianState, label: impl Into<String>) -> Self {
        Self {
            fock: None,
            gaussian: Some(g),
            label: label.into(),
        }
    }

    pub fn with_both(rho: FockDensityMatrix, g: GaussianState, label: impl Into<String>) -> Result<Self> {
        if rho.modes() != g.modes() {
            return Err(Error::Dimension("representations disagree on mode count".into()));
        }
        Ok(Self {
            fock: Some(rho),
            gaussian: Some(g),
            label: label.into(),
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn modes(&self) -> usize {
        match (&self.fock, &self.gaussian) {
            (Some(f), _) => f.modes(),
            (None, Some(g)) => g.modes(),
            (None, None) => unreachable!("handle without a representation"),
        }
    }

    pub fn fock(&self) -> Option<&FockDensityMatrix> {
        self.fock.as_ref()
    }

    pub fn gaussian(&self) -> Option<&GaussianState> {
        self.gaussian.as_ref()
    }

    /// Same state with only the Fock representation.
    pub fn fock_only(&self) -> Result<Self> {
        let rho = self
            .fock
            .clone()
            .ok_or_else(|| Error::Unsupported(format!("{} has no Fock representation", self.label)))?;
        Ok(Self::from_fock(rho, self.label.clone()))
    }

    /// Fock matrix at truncation `dim`, converting from the Gaussian form if needed.
    pub fn to_fock(&self, dim: usize) -> Result<FockDensityMatrix> {
        match (&self.fock, &self.gaussian) {
            (Some(f), _) if f.dim() == dim => Ok(f.clone()),
            (_, Some(g)) => gaussian::gaussian_to_fock(g, dim),
            (Some(f), None) => Err(Error::Dimension(format!(
                "{} was built at N_c={}, requested N_c={dim}",
                self.label,
                f.dim()
            ))),
            (None, None) => unreachable!("handle without a representation"),
        }
    }

    /// Characteristic function, analytic when a Gaussian form exists.
    pub fn cf(&self, lambda: &[C64]) -> C64 {
        if let Some(g) = &self.gaussian {
            return gaussian::gaussian_cf(g, lambda).expect("argument count checked by caller");
        }
        let rho = self.fock.as_ref().expect("handle without a representation");
        match lambda {
            [l] => crate::cf::cf_eval(rho, *l),
            [l1, l2] => crate::cf::cf_eval2(rho, *l1, *l2),
            _ => panic!("characteristic function takes one argument per mode"),
        }
    }

    /// Largest absolute first moment `⟨qⱼ⟩, ⟨pⱼ⟩`.
    pub fn max_first_moment(&self) -> Result<f64> {
        if let Some(g) = &self.gaussian {
            return Ok(g.max_first_moment());
        }
        let rho = self.fock.as_ref().expect("handle without a representation");
        let mut worst = 0.0f64;
        for mode in 1..=rho.modes() {
            for label in [fock::OpLabel::Q, fock::OpLabel::P] {
                worst = worst.max(fock::expect_labels(rho, &[(label, mode)])?.norm());
            }
        }
        Ok(worst)
    }

    /// True for coherent states (vacuum included) given in Gaussian form.
    pub fn is_coherent(&self) -> bool {
        self.gaussian
            .as_ref()
            .is_some_and(|g| g.modes() == 1 && (g.cm() - DMatrix::identity(2, 2) * 0.5).amax() < 1e-12)
    }
}

fn psub_svs(r: f64, dim: usize) -> Result<FockDensityMatrix> {
    if r == 0.0 {
        return Err(Error::Unsupported("photon subtraction from the vacuum vanishes".into()));
    }
    // a₁a₂ Σ tⁿ|n,n⟩ = Σ (m+1) t^{m+1} |m,m⟩
    let t = r.tanh();
    let x = t * t;
    let full = (1.0 + x) / (1.0 - x).powi(3);
    let mut coeffs = DMatrix::<C64>::zeros(dim, dim);
    let mut kept = 0.0;
    let mut tm = 1.0;
    for m in 0..dim {
        let c = (m + 1) as f64 * tm;
        coeffs[(m, m)] = C64::from(c);
        kept += c * c;
        tm *= t;
    }
    fock::population_guard(dim, kept / full)?;
    FockDensityMatrix::from_coefficients(&coeffs)
}

fn fock_bell(c: &[f64], dim: usize) -> Result<FockDensityMatrix> {
    let total: f64 = c.iter().map(|x| x * x).sum();
    if !(total > 0.0) {
        return Err(Error::Unsupported("bell state needs a non-zero coefficient".into()));
    }
    let kept: f64 = c.iter().take(dim).map(|x| x * x).sum();
    fock::population_guard(dim, kept / total)?;
    let mut coeffs = DMatrix::<C64>::zeros(dim, dim);
    for (n, &v) in c.iter().take(dim).enumerate() {
        coeffs[(n, n)] = C64::from(v);
    }
    FockDensityMatrix::from_coefficients(&coeffs)
}

fn cat(alpha: C64, parity: Parity, dim: usize) -> Result<FockDensityMatrix> {
    fock::FockVector::coherent(alpha, dim)?;
    let a = fock::coherent_amplitudes(alpha, dim);
    let b = fock::coherent_amplitudes(-alpha, dim);
    let amps: DVector<C64> = match parity {
        Parity::Even => a + b,
        Parity::Odd => a - b,
    };
    FockDensityMatrix::from_pure(1, dim, amps)
}

/// Exact covariance-matrix form of the Gaussian kinds.
pub fn gaussian_form(spec: &StateSpec) -> Result<Option<GaussianState>> {
    Ok(match &spec.kind {
        StateKind::Vacuum => Some(GaussianState::vacuum(1)?),
        StateKind::TwoModeVacuum => Some(GaussianState::vacuum(2)?),
        StateKind::Coherent(a) => Some(GaussianState::coherent(*a)),
        StateKind::Thermal(n) => Some(GaussianState::thermal(*n)?),
        StateKind::Svs(r) => Some(GaussianState::svs(*r)),
        _ => None,
    })
}

/// Builds a normalized state at truncation `dim`.
pub fn build(spec: &StateSpec, dim: usize) -> Result<StateHandle> {
    let label = spec.to_string();
    let both = |rho: FockDensityMatrix, g: GaussianState| StateHandle::with_both(rho, g, label.clone());
    match &spec.kind {
        StateKind::Vacuum => both(FockDensityMatrix::vacuum(dim)?, GaussianState::vacuum(1)?),
        StateKind::TwoModeVacuum => both(FockDensityMatrix::two_mode_vacuum(dim)?, GaussianState::vacuum(2)?),
        StateKind::Coherent(a) => both(FockDensityMatrix::coherent(*a, dim)?, GaussianState::coherent(*a)),
        StateKind::Thermal(n) => both(FockDensityMatrix::thermal(*n, dim)?, GaussianState::thermal(*n)?),
        StateKind::Svs(r) => both(gaussian::svs_fock(*r, dim)?, GaussianState::svs(*r)),
        StateKind::Fock(n) => Ok(StateHandle::from_fock(FockDensityMatrix::number(*n, dim)?, label)),
        StateKind::Cat { alpha, parity } => Ok(StateHandle::from_fock(cat(*alpha, *parity, dim)?, label)),
        StateKind::PhotonSubtractedSvs(r) => Ok(StateHandle::from_fock(psub_svs(*r, dim)?, label)),
        StateKind::FockBell(c) => Ok(StateHandle::from_fock(fock_bell(c, dim)?, label)),
    }
}

/// Inputs used by the verification matrix.
pub fn input_catalog() -> Vec<StateSpec> {
    ["vacuum", "coherent:0.3+0.2i", "fock:1", "thermal:n=0.5", "cat:alpha=1,parity=even"]
        .iter()
        .map(|s| s.parse().expect("catalog entries parse"))
        .collect()
}

/// Undisplaced two-mode resources used by the verification matrix.
pub fn resource_catalog() -> Vec<StateSpec> {
    [
        "two-mode-vacuum",
        "svs:r=0.2",
        "svs:r=0.4",
        "svs:r=0.8",
        "psub-svs:r=0.4",
        "bell:c0=0.8,c1=0.6",
        "bell:c0=0.7071067811865476,c1=0.7071067811865476",
        "bell:c0=0.6,c1=-0.5,c2=0.4,c3=0.3",
    ]
    .iter()
    .map(|s| s.parse().expect("catalog entries parse"))
    .collect()
}

/// Schmidt decomposition of a pure two-mode state.
#[derive(Debug, Clone)]
pub struct Schmidt {
    /// Schmidt coefficients `s_k`, descending, `Σ s_k² = 1`.
    pub coefficients: Vec<f64>,
    /// `-Σ s_k² log₂ s_k²`
    pub entropy: f64,
}

impl Schmidt {
    /// `max_k |s_{k+1} - s_k s₁/s₀|`: zero for two-mode squeezed vacua.
    pub fn geometric_defect(&self) -> f64 {
        let s = &self.coefficients;
        if s.len() < 2 || s[0] == 0.0 {
            return 0.0;
        }
        let ratio = s[1] / s[0];
        s.windows(2).map(|w| (w[1] - w[0] * ratio).abs()).fold(0.0, f64::max)
    }
}

fn entropy_bits(probabilities: impl Iterator<Item = f64>) -> f64 {
    -probabilities.filter(|&p| p > 0.0).map(|p| p * p.log2()).sum::<f64>()
}

/// Entanglement entropy (bits) from the singular values of the coefficient matrix.
pub fn schmidt_entropy(rho: &FockDensityMatrix) -> Result<Schmidt> {
    if rho.modes() != 2 {
        return Err(Error::Dimension("Schmidt decomposition needs two modes".into()));
    }
    let purity = rho.purity();
    if purity < 1.0 - PURITY_TOL {
        return Err(Error::NotPure(purity));
    }
    let n = rho.dim();
    let psi = match rho.pure_state() {
        Some(p) => p.clone(),
        None => {
            // A pure ρ = |ψ⟩⟨ψ| has ψ ∝ any non-zero column.
            let m = rho.matrix();
            let j = (0..m.nrows()).max_by(|&a, &b| m[(a, a)].re.total_cmp(&m[(b, b)].re)).unwrap_or(0);
            m.column(j) / C64::from(m[(j, j)].re.sqrt())
        }
    };
    let c = DMatrix::from_fn(n, n, |a, b| psi[a * n + b]);
    let mut s: Vec<f64> = c.svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    let entropy = entropy_bits(s.iter().map(|x| x * x));
    Ok(Schmidt { coefficients: s, entropy })
}

#[derive(Debug, Clone)]
pub struct EntanglementRecord {
    pub entropy: f64,
    pub delta_epr: f64,
    pub schmidt: Schmidt,
    pub spec: StateSpec,
}

pub fn entanglement_record(spec: &StateSpec, dim: usize) -> Result<EntanglementRecord> {
    let state = build(spec, dim)?;
    let rho = state.to_fock(dim)?;
    let schmidt = schmidt_entropy(&rho)?;
    let delta_epr = teleport::epr_uncertainty_fock(&rho)?;
    Ok(EntanglementRecord {
        entropy: schmidt.entropy,
        delta_epr,
        schmidt,
        spec: spec.clone(),
    })
}

/// Entanglement entropy (bits) of the two-mode squeezed vacuum,
/// `cosh²r log₂ cosh²r - sinh²r log₂ sinh²r`.
pub fn svs_entropy(r: f64) -> f64 {
    let c = r.cosh().powi(2);
    let s = r.sinh().powi(2);
    let term = |x: f64| if x > 0.0 { x * x.log2() } else { 0.0 };
    term(c) - term(s)
}

/// Squeezing `r ≥ 0` whose vacuum has entropy `bits`, by bisection.
pub fn svs_r_for_entropy(bits: f64) -> f64 {
    if bits <= 0.0 {
        return 0.0;
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while svs_entropy(hi) < bits {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if svs_entropy(mid) < bits {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Smallest EPR uncertainty reachable at entanglement `bits`: `e^{-2r(E)}`.
pub fn frontier_delta(bits: f64) -> f64 {
    (-2.0 * svs_r_for_entropy(bits)).exp()
}

/// Families mixed by [`sample_pure_resources`].
#[derive(Debug, Clone, Copy)]
pub struct SamplingControls {
    /// Largest Schmidt rank of sampled `bell` states.
    pub max_rank: usize,
    /// Share of photon-subtracted squeezed vacua.
    pub psub_fraction: f64,
    /// Share of `bell` states with jittered geometric profiles.
    pub near_svs_fraction: f64,
    pub r_range: (f64, f64),
    /// Relative jitter on near-geometric coefficients.
    pub jitter: f64,
}

impl Default for SamplingControls {
    fn default() -> Self {
        Self {
            max_rank: 6,
            psub_fraction: 0.2,
            near_svs_fraction: 0.3,
            r_range: (0.05, 0.6),
            jitter: 0.2,
        }
    }
}

/// Deterministic sample of pure, undisplaced two-mode resources.
pub fn sample_pure_resources(count: usize, seed: u64, controls: &SamplingControls) -> Vec<StateSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (rlo, rhi) = controls.r_range;
    let max_rank = controls.max_rank.max(1);
    (0..count)
        .map(|_| {
            let u: f64 = rng.gen();
            let kind = if u < controls.psub_fraction {
                StateKind::PhotonSubtractedSvs(rng.gen_range(rlo..=rhi))
            } else if u < controls.psub_fraction + controls.near_svs_fraction {
                let rank = rng.gen_range(max_rank.min(2)..=max_rank);
                let t = rng.gen_range(rlo..=rhi).tanh();
                let c = (0..rank)
                    .map(|n| t.powi(n as i32) * (1.0 + controls.jitter * rng.gen_range(-1.0..=1.0)))
                    .collect();
                StateKind::FockBell(c)
            } else {
                let rank = rng.gen_range(1..=max_rank);
                StateKind::FockBell((0..rank).map(|_| rng.gen_range(-1.0..=1.0)).collect())
            };
            StateSpec::new(kind)
        })
        .collect()
}

/// One sampled resource placed against the SVS frontier.
#[derive(Debug, Clone, Serialize)]
pub struct FrontierPoint {
    pub spec: String,
    pub kind: &'static str,
    pub entropy: f64,
    pub delta_epr: f64,
    pub frontier: f64,
    pub geometric_defect: f64,
}

impl FrontierPoint {
    pub fn margin(&self) -> f64 {
        self.delta_epr - self.frontier
    }

    /// Below the frontier, or on it without being SVS-like.
    pub fn is_violation(&self) -> bool {
        let m = self.margin();
        m < -FRONTIER_TOL || (m.abs() <= FRONTIER_TOL && self.geometric_defect > FRONTIER_TOL)
    }
}

pub fn frontier_point(spec: &StateSpec, dim: usize) -> Result<FrontierPoint> {
    let rec = entanglement_record(spec, dim)?;
    Ok(FrontierPoint {
        spec: spec.to_string(),
        kind: spec.family(),
        entropy: rec.entropy,
        delta_epr: rec.delta_epr,
        frontier: frontier_delta(rec.entropy),
        geometric_defect: rec.schmidt.geometric_defect(),
    })
}

/// Evaluates every spec against the frontier (in parallel, order preserved).
pub fn frontier(specs: &[StateSpec], dim: usize) -> Result<Vec<FrontierPoint>> {
    specs.par_iter().map(|s| frontier_point(s, dim)).collect()
}
