use std::fmt::Write as _;
use std::io::Write;

use cvtele_core::cf::moments_from_state;
use cvtele_core::gaussian::GaussianState;
use cvtele_core::oracle::{oracle_teleport, GainConvention, OracleLattice};
use cvtele_core::states::{self, SamplingControls, StateHandle, StateSpec};
use cvtele_core::teleport::{self, Numerics, ProtocolReport, TeleportJob};
use cvtele_core::{Complex64, Error};
use serde::Serialize;
use serde_json::json;

use crate::config::{CommonArgs, Extras, Format, RunConfig};
use crate::CliError;

fn emit(cfg: &RunConfig, text: &str) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::usage(format!("cannot write stdout: {e}")))
        }
    }
}

/// Builds a state, falling back to the exact Gaussian form when the Fock
/// matrix would not fit the truncation.
fn handle(spec: &StateSpec, dim: usize) -> Result<StateHandle, CliError> {
    match states::build(spec, dim) {
        Ok(h) => Ok(h),
        Err(e @ Error::Truncation { .. }) => match states::gaussian_form(spec)? {
            Some(g) => Ok(StateHandle::from_gaussian(g, spec.to_string())),
            None => Err(e.into()),
        },
        Err(e) => Err(e.into()),
    }
}

pub fn teleport(args: &CommonArgs, with_oracle: bool) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(args, Extras::default())?;
    let n = cfg.numerics;
    let input = handle(&cfg.input, n.trunc)?;
    let resource = handle(&cfg.resource_or("svs:r=0.4"), n.trunc)?;
    let job = TeleportJob::new(input, resource, n)?;
    let mut report = teleport::run_protocol(&job)?;
    if with_oracle {
        let factorized = teleport::teleport_cf(&job)?;
        let out = oracle_teleport(&job.input.to_fock(n.trunc)?, &job.resource.to_fock(n.trunc)?, &cfg.lattice, cfg.gain)?;
        report.oracle_fidelity = Some(teleport::fidelity(&out.rho, factorized.rho())?);
        report.oracle_probability_deficit = Some(out.probability_deficit());
    }
    let text = match cfg.format {
        Format::Json => report.to_json() + "\n",
        Format::Csv => format!("{}\n{}\n", ProtocolReport::CSV_HEADER, report.to_csv_row()),
    };
    emit(&cfg, &text)
}

/// One verification check; passes when `defect <= tolerance`.
#[derive(Debug, Serialize)]
struct Check {
    check: &'static str,
    subject: String,
    defect: Option<f64>,
    tolerance: f64,
    pass: bool,
    error: Option<String>,
}

impl Check {
    fn new(check: &'static str, subject: impl Into<String>, tolerance: f64, defect: Result<f64, Error>) -> Self {
        let subject = subject.into();
        match defect {
            Ok(d) => Check {
                check,
                subject,
                defect: Some(d),
                tolerance,
                pass: d <= tolerance,
                error: None,
            },
            Err(e) => Check {
                check,
                subject,
                defect: None,
                tolerance,
                pass: false,
                error: Some(e.to_string()),
            },
        }
    }
}

fn resource_checks(spec: &StateSpec, n: &Numerics, checks: &mut Vec<Check>) {
    let subject = spec.to_string();
    let res = match states::build(spec, n.trunc) {
        Ok(r) => r,
        Err(e) => {
            checks.push(Check::new("build", subject, 0.0, Err(e)));
            return;
        }
    };
    let m = match teleport::distorting_state(&res, n) {
        Ok(m) => m,
        Err(e) => {
            checks.push(Check::new("distorting-state", subject, 0.0, Err(e)));
            return;
        }
    };
    let moments = moments_from_state(m.rho());
    let delta = teleport::epr_uncertainty(&res);
    let cm = teleport::cm_from_resource(&res);
    let noise_defect = match (&moments, &delta) {
        (Ok(mo), Ok(d)) => Ok((mo.n - d).abs()),
        (Err(e), _) | (_, Err(e)) => Err(e.clone()),
    };
    checks.push(Check::new("noise-epr-quadrature", &subject, 1e-5, noise_defect));
    if let Some(g) = res.gaussian() {
        checks.push(Check::new("noise-epr-analytic", &subject, 1e-8, teleport::added_noise_gaussian(g).map(|a| a.defect())));
    }
    let cm_defect = match (&cm, &moments) {
        (Ok(c), Ok(mo)) => Ok(c.max_abs_diff(&mo.cm)),
        (Err(e), _) | (_, Err(e)) => Err(e.clone()),
    };
    checks.push(Check::new("cm-pipeline", &subject, 1e-6, cm_defect));
    // Fock-side identities compare against the same truncated rho_AB, so a
    // Gaussian resource is pushed through the Fock-only pipeline here.
    let fock_side = res.fock_only().and_then(|f| Ok((teleport::distorting_state(&f, n)?, f)));
    let relations = fock_side.as_ref().map_err(Clone::clone).and_then(|(mf, f)| {
        let r = teleport::moment_relations(mf.rho(), &f.to_fock(n.trunc)?)?;
        Ok(r.n_defect().max(r.a2_defect()))
    });
    checks.push(Check::new("moment-relations", &subject, 1e-6, relations));
    checks.push(Check::new("robertson-schroedinger", &subject, 1e-9, cm.clone().map(|c| 0.25 - c.det())));
    checks.push(Check::new("no-squeezing", &subject, 1e-9, cm.clone().map(|c| -c.min_eig_minus_half())));
    let nonlocal = fock_side.as_ref().map_err(Clone::clone).and_then(|(mf, f)| {
        let c = teleport::nonlocal_correlations(&f.to_fock(n.trunc)?)?;
        let v = moments_from_state(mf.rho())?.cm;
        Ok((v.sqq - 0.5 - c.qq).abs().max((v.spp - 0.5 - c.pp).abs()).max((v.sqp - c.qp).abs()))
    });
    checks.push(Check::new("nonlocal-quadratures", &subject, 1e-8, nonlocal));
    let fcoh = teleport::fidelity_coherent_quadrature(&res, n)
        .and_then(|f| Ok((f - teleport::q_function(m.rho(), Complex64::new(0.0, 0.0))?).abs()));
    checks.push(Check::new("fcoh-equals-q0", &subject, 1e-6, fcoh));
}

fn monotonicity(n: &Numerics) -> Result<f64, Error> {
    let mut violations = 0;
    let mut last: Option<(f64, f64)> = None;
    for k in 0..=5 {
        let r = 0.2 * k as f64;
        let g = GaussianState::svs(r);
        let f = teleport::fidelity_coherent_quadrature(&StateHandle::from_gaussian(g.clone(), "svs"), n)?;
        let noise = teleport::added_noise_gaussian(&g)?.added_noise;
        if let Some((f0, n0)) = last {
            if !(f > f0 && noise < n0) {
                violations += 1;
            }
        }
        last = Some((f, noise));
    }
    Ok(violations as f64)
}

fn oracle_cell(input: &StateSpec, resource: &StateSpec, dim: usize, n: &Numerics, lattice: &OracleLattice, gain: GainConvention) -> Result<f64, Error> {
    let numerics = Numerics::new(dim, n.half_width, n.step)?;
    let job = TeleportJob::new(states::build(input, dim)?, states::build(resource, dim)?, numerics)?;
    let factorized = teleport::teleport_cf(&job)?;
    let out = oracle_teleport(&job.input.to_fock(dim)?, &job.resource.to_fock(dim)?, lattice, gain)?;
    Ok(1.0 - teleport::fidelity(&out.rho, factorized.rho())?)
}

pub fn verify(args: &CommonArgs, oracle_trunc: Option<usize>) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(
        args,
        Extras {
            oracle_trunc,
            ..Extras::default()
        },
    )?;
    let n = cfg.numerics;
    let catalog = if cfg.resources.is_empty() {
        states::resource_catalog()
    } else {
        cfg.resources.clone()
    };
    let mut checks = Vec::new();
    for spec in &catalog {
        resource_checks(spec, &n, &mut checks);
    }
    checks.push(Check::new("svs-monotonicity", "svs r=0..1", 0.0, monotonicity(&n)));
    let oracle_resources: Vec<StateSpec> = if cfg.resources.is_empty() {
        ["two-mode-vacuum", "svs:r=0.4", "psub-svs:r=0.4"].iter().map(|s| s.parse().expect("default resources parse")).collect()
    } else {
        cfg.resources.clone()
    };
    let inputs: Vec<StateSpec> = ["vacuum", "coherent:0.3+0.2i", "fock:1"].iter().map(|s| s.parse().expect("default inputs parse")).collect();
    for input in &inputs {
        for resource in &oracle_resources {
            let defect = oracle_cell(input, resource, cfg.oracle_trunc, &n, &cfg.lattice, cfg.gain);
            checks.push(Check::new("oracle-factorization", format!("{input} x {resource}"), 0.005, defect));
        }
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    let text = match cfg.format {
        Format::Json => {
            let doc = json!({
                "schema": "cvtele-verify/1",
                "gain": cfg.gain.to_string(),
                "passed": failed == 0,
                "failed": failed,
                "checks": checks,
            });
            serde_json::to_string_pretty(&doc).expect("verify report serializes") + "\n"
        }
        Format::Csv => {
            let mut s = String::from("check,subject,defect,tolerance,status,error\n");
            for c in &checks {
                let _ = writeln!(
                    s,
                    "{},\"{}\",{},{},{},\"{}\"",
                    c.check,
                    c.subject,
                    c.defect.map(|d| d.to_string()).unwrap_or_default(),
                    c.tolerance,
                    if c.pass { "pass" } else { "fail" },
                    c.error.clone().unwrap_or_default().replace('"', "'"),
                );
            }
            s
        }
    };
    emit(&cfg, &text)?;
    if failed > 0 {
        let names: Vec<String> = checks.iter().filter(|c| !c.pass).map(|c| format!("{} [{}]", c.check, c.subject)).collect();
        return Err(CliError::Failed(format!("{failed} checks failed: {}", names.join("; "))));
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct SweepRow {
    r: f64,
    delta_epr: f64,
    added_noise: f64,
    f_coh: f64,
    det_cm: f64,
    min_eig: f64,
}

pub fn sweep(args: &CommonArgs, r_range: Option<String>) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(
        args,
        Extras {
            r_range,
            default_format: Some(Format::Csv),
            ..Extras::default()
        },
    )?;
    let (start, stop, step) = cfg.r_range;
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    let mut rows = Vec::with_capacity(count);
    for i in 0..count {
        let r = start + i as f64 * step;
        let g = GaussianState::svs(r);
        let res = StateHandle::from_gaussian(g.clone(), format!("svs:r={r}"));
        let noise = teleport::added_noise_gaussian(&g)?;
        let cm = teleport::cm_from_resource(&res)?;
        rows.push(SweepRow {
            r,
            delta_epr: noise.delta_epr,
            added_noise: noise.added_noise,
            f_coh: teleport::fidelity_coherent_quadrature(&res, &cfg.numerics)?,
            det_cm: cm.det(),
            min_eig: cm.min_eig_minus_half(),
        });
    }
    let text = match cfg.format {
        Format::Json => serde_json::to_string_pretty(&rows).expect("sweep rows serialize") + "\n",
        Format::Csv => {
            let mut s = String::from("r,delta_epr,added_noise,f_coh,det_cm,min_eig\n");
            for row in &rows {
                let _ = writeln!(s, "{},{},{},{},{},{}", row.r, row.delta_epr, row.added_noise, row.f_coh, row.det_cm, row.min_eig);
            }
            s
        }
    };
    emit(&cfg, &text)
}

pub fn frontier(args: &CommonArgs, count: Option<usize>) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(
        args,
        Extras {
            count,
            default_format: Some(Format::Csv),
            ..Extras::default()
        },
    )?;
    if cfg.count == 0 {
        return Err(CliError::usage("--count must be at least 1"));
    }
    let specs = if cfg.resources.is_empty() {
        states::sample_pure_resources(cfg.count, cfg.seed, &SamplingControls::default())
    } else {
        cfg.resources.clone()
    };
    let points = states::frontier(&specs, cfg.numerics.trunc)?;
    let offenders: Vec<&str> = points.iter().filter(|p| p.is_violation()).map(|p| p.spec.as_str()).collect();
    let text = match cfg.format {
        Format::Json => {
            let doc = json!({
                "schema": "cvtele-frontier/1",
                "entropy_base": 2,
                "samples": points.len(),
                "violations": offenders.len(),
                "points": points,
            });
            serde_json::to_string_pretty(&doc).expect("frontier report serializes") + "\n"
        }
        Format::Csv => {
            let mut s = String::from("entropy,delta_epr,kind,frontier,margin,spec\n");
            for p in &points {
                let _ = writeln!(s, "{},{},{},{},{},\"{}\"", p.entropy, p.delta_epr, p.kind, p.frontier, p.margin(), p.spec);
            }
            s
        }
    };
    emit(&cfg, &text)?;
    eprintln!("{}", json!({"samples": points.len(), "violations": offenders.len(), "entropy_base": 2}));
    if !offenders.is_empty() {
        return Err(CliError::Failed(format!("frontier violated by: {}", offenders.join("; "))));
    }
    Ok(())
}
