use fluctamp_core::amplifier::{
    enumerate_single_photon_branches, f_eff_closed_form, f_eff_closed_form_squared_gain, g_eff_closed_form,
    g_limit_low_reflectivity, p_succ_closed_form, run_success_branch,
};
use fluctamp_core::{AmplifierConfig, Complex64};

const ALPHAS: [f64; 7] = [0.1, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5];
const RS: [f64; 5] = [0.05, 0.2, 0.35, 0.5, 0.6];

fn grid() -> Vec<AmplifierConfig> {
    let mut out = Vec::new();
    for (i, &a) in ALPHAS.iter().enumerate() {
        for (j, &r) in RS.iter().enumerate() {
            out.push(AmplifierConfig::symmetric(a, r).unwrap());
            let r2 = RS[(j + 2) % RS.len()];
            let r3 = RS[(j + 4) % RS.len()];
            let phase = Complex64::from_polar(a, 0.3 * i as f64);
            out.push(AmplifierConfig::new(phase, r, r2, r3).unwrap());
        }
    }
    out
}

#[test]
fn pipeline_matches_closed_forms_on_grid() {
    for cfg in grid() {
        let rep = run_success_branch(&cfg).unwrap();
        let p = p_succ_closed_form(&cfg);
        assert!((rep.p_succ - p).abs() < 1e-10 && ((rep.p_succ - p) / p).abs() < 1e-10, "{cfg:?}");
        assert!((rep.g_eff - g_eff_closed_form(&cfg)).abs() < 1e-10, "{cfg:?}");
        assert!((rep.f_eff - f_eff_closed_form(&cfg)).abs() < 1e-10, "{cfg:?}");
        assert!(rep.g_eff <= 2.0 + 1e-10);
        assert!(rep.f_eff <= 1.0 + 1e-10 && rep.f_ideal <= 1.0 + 1e-10);
    }
}

#[test]
fn printed_exponent_disagrees_with_overlap() {
    let cfg = AmplifierConfig::symmetric(0.5, 0.4).unwrap();
    let overlap = run_success_branch(&cfg).unwrap().f_eff;
    let printed = f_eff_closed_form_squared_gain(&cfg);
    assert!((overlap - 0.9952).abs() < 1e-4);
    assert!((printed - 0.80).abs() < 0.01);
    assert!((f_eff_closed_form(&cfg) - overlap).abs() < 1e-10);
}

#[test]
fn fidelity_closed_form_at_unit_amplitude() {
    let cfg = AmplifierConfig::symmetric(1.0, 0.4).unwrap();
    assert!((f_eff_closed_form(&cfg) - run_success_branch(&cfg).unwrap().f_eff).abs() < 1e-10);
    let tiny = AmplifierConfig::symmetric(1e-3, 0.4).unwrap();
    assert!(1.0 - f_eff_closed_form(&tiny) < 1e-6);
}

#[test]
fn nominal_gain_is_reached_for_weak_fields() {
    let cfg = AmplifierConfig::symmetric(1e-4, 1e-3).unwrap();
    let rep = run_success_branch(&cfg).unwrap();
    assert!((rep.g_eff - 2.0).abs() < 1e-4);
    assert!((rep.p_succ / p_succ_closed_form(&cfg) - 1.0).abs() < 1e-8);
}

#[test]
fn gain_decreases_with_amplitude_and_reflectivity() {
    for &r in &RS {
        let gains: Vec<f64> = ALPHAS
            .iter()
            .map(|&a| run_success_branch(&AmplifierConfig::symmetric(a, r).unwrap()).unwrap().g_eff)
            .collect();
        assert!(gains.windows(2).all(|w| w[1] < w[0]), "r={r}: {gains:?}");
    }
    for &a in &ALPHAS {
        for k in 0..3 {
            let mut last = f64::INFINITY;
            for &r in &RS {
                let mut rs = [0.2, 0.2, 0.2];
                rs[k] = r;
                let cfg = AmplifierConfig::new(Complex64::new(a, 0.0), rs[0], rs[1], rs[2]).unwrap();
                let g = run_success_branch(&cfg).unwrap().g_eff;
                assert!(g < last);
                last = g;
            }
        }
    }
}

#[test]
fn low_reflectivity_limit() {
    assert_eq!(g_limit_low_reflectivity(0.0), 2.0);
    assert!((g_limit_low_reflectivity(10.0) - 1.0).abs() < 0.05);
    let cfg = AmplifierConfig::symmetric(0.5, 1e-4).unwrap();
    assert!((g_eff_closed_form(&cfg) - g_limit_low_reflectivity(0.5)).abs() < 1e-7);
}

#[test]
fn failed_branches_are_coherent_and_rare() {
    for &a in &[0.1, 0.25, 0.5] {
        for &r in &[0.05, 0.2, 0.35, 0.5] {
            let cfg = AmplifierConfig::symmetric(a, r).unwrap();
            let e = enumerate_single_photon_branches(&cfg).unwrap();
            assert!(e.other_probability >= -1e-12 && e.other_probability < 1e-2, "{a} {r}");
            let t = (1.0 - r * r).sqrt();
            for b in e.branches.iter().filter(|b| b.qnd == 0) {
                assert!(b.fidelity_deficit.abs() < 1e-12);
                assert!(b.amplitude_deficit.abs() < 1e-12);
                assert!((b.amplitude - t * t * t * a).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn coherent_branch_amplitude_at_low_reflectivity() {
    let cfg = AmplifierConfig::symmetric(0.5, 0.1).unwrap();
    let e = enumerate_single_photon_branches(&cfg).unwrap();
    assert!((e.branch(0, 0, 0).unwrap().amplitude - 0.493).abs() < 5e-4);
}
