use cvtele_core::cf::moments_from_state;
use cvtele_core::gaussian::{gaussian_to_fock, GaussianState};
use cvtele_core::states::{build, StateHandle, StateSpec};
use cvtele_core::teleport::{self, fidelity, Numerics, TeleportJob};
use cvtele_core::Complex64 as C64;

fn handle(s: &str, dim: usize) -> StateHandle {
    build(&s.parse::<StateSpec>().unwrap(), dim).unwrap()
}

#[test]
fn coherent_through_svs_is_displaced_thermal() {
    let (r, alpha, dim) = (0.5f64, C64::new(0.4, -0.3), 25);
    let job = TeleportJob::new(
        handle("coherent:0.4-0.3i", dim),
        handle("svs:r=0.5", dim),
        Numerics::new(dim, 6.0, 0.1).unwrap(),
    )
    .unwrap();
    let out = teleport::teleport_cf(&job).unwrap();

    let nbar = (-2.0 * r).exp();
    let thermal = GaussianState::thermal(nbar).unwrap();
    let expected = GaussianState::new(GaussianState::coherent(alpha).mean().clone(), thermal.cm().clone()).unwrap();
    let expected = gaussian_to_fock(&expected, dim).unwrap();
    let f = fidelity(&expected, out.rho()).unwrap();
    assert!(f > 1.0 - 1e-6, "{f}");
}

#[test]
fn unit_gain_preserves_first_moments() {
    // The output carries the resource noise on top of the input, so its tail
    // needs about twice the input truncation before <a> settles below 1e-7.
    let dim = 40;
    let numerics = Numerics::new(dim, 6.0, 0.1).unwrap();
    for resource in ["bell:c0=0.8,c1=0.6", "psub-svs:r=0.3", "two-mode-vacuum"] {
        for input in ["coherent:0.5+0.2i", "cat:alpha=0.7,parity=odd", "fock:2"] {
            let rho_in = handle(input, dim);
            let job = TeleportJob::new(rho_in.clone(), handle(resource, dim), numerics).unwrap();
            let out = teleport::teleport_cf(&job).unwrap();
            let before = moments_from_state(&rho_in.to_fock(dim).unwrap()).unwrap();
            let after = moments_from_state(out.rho()).unwrap();
            assert!((before.a - after.a).norm() < 1e-7, "{input} via {resource}: {} vs {}", before.a, after.a);
        }
    }
}

#[test]
fn gaussian_and_fock_resources_agree() {
    let dim = 24;
    let numerics = Numerics::new(dim, 6.0, 0.1).unwrap();
    let fock = handle("svs:r=0.3", dim).fock_only().unwrap();
    let gauss = StateHandle::from_gaussian(GaussianState::svs(0.3), "svs:r=0.3");
    let f_fock = teleport::fidelity_coherent_quadrature(&fock, &numerics).unwrap();
    let f_gauss = teleport::fidelity_coherent_quadrature(&gauss, &numerics).unwrap();
    assert!((f_fock - f_gauss).abs() < 1e-8, "{f_fock} vs {f_gauss}");
    let d_fock = teleport::epr_uncertainty(&fock).unwrap();
    let d_gauss = teleport::epr_uncertainty(&gauss).unwrap();
    assert!((d_fock - d_gauss).abs() < 1e-8);
}

#[test]
fn report_is_stable_json_and_csv() {
    let dim = 16;
    let job = TeleportJob::new(handle("vacuum", dim), handle("svs:r=0.2", dim), Numerics::new(dim, 6.0, 0.1).unwrap()).unwrap();
    let a = teleport::run_protocol(&job).unwrap();
    let b = teleport::run_protocol(&job).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    let header_fields = teleport::ProtocolReport::CSV_HEADER.split(',').count();
    assert_eq!(a.to_csv_row().split(',').count(), header_fields);
    let parsed: serde_json::Value = serde_json::from_str(&a.to_json()).unwrap();
    assert_eq!(parsed["resource"], "svs:r=0.2");
    assert!(parsed["noise_epr_defect"].as_f64().unwrap() < 1e-8);
}
