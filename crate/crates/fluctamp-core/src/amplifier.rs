//! The three-beam-splitter amplifier: subtract a photon, add it back after a
//! QND count, subtract again.
//!
//! A run is labelled by the three photon counts `(qnd, pd1, pd2)`. The success
//! branch is `(1, 0, 1)`. The Fock state found by the QND counter feeds the
//! second port of the middle beam splitter whatever the count.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gausspoly::GaussPolyState;
use crate::optics::{
    amplitude_expectation_real, beam_split, coherent_state, coherent_state_real, collapse_real, fidelity_real,
    fock_state, mean_photon_number_real, BeamSplitter,
};
use crate::real::{real, to_f64, Real, ONE, ZERO};
use crate::Complex64;

/// Largest accepted input amplitude.
pub const MAX_INPUT_AMPLITUDE: f64 = 3.0;

/// Nominal gain of the ideal `â â† â` operation.
pub const NOMINAL_GAIN: f64 = 2.0;

/// Detector pattern of the amplified branch.
pub const SUCCESS_PATTERN: (u32, u32, u32) = (1, 0, 1);

/// The eight single-photon patterns, amplified branch first.
pub const BRANCH_ORDER: [(u32, u32, u32); 8] =
    [(1, 0, 1), (1, 0, 0), (1, 1, 1), (1, 1, 0), (0, 1, 1), (0, 1, 0), (0, 0, 1), (0, 0, 0)];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmplifierConfig {
    pub alpha: Complex64,
    pub bs1: BeamSplitter,
    pub bs2: BeamSplitter,
    pub bs3: BeamSplitter,
}

impl AmplifierConfig {
    pub fn new(alpha: Complex64, r1: f64, r2: f64, r3: f64) -> Result<Self> {
        let norm = alpha.norm();
        if !(alpha.re.is_finite() && alpha.im.is_finite()) || norm > MAX_INPUT_AMPLITUDE {
            return Err(Error::InvalidAmplitude(norm));
        }
        Ok(Self { alpha, bs1: BeamSplitter::new(r1)?, bs2: BeamSplitter::new(r2)?, bs3: BeamSplitter::new(r3)? })
    }

    /// Real amplitude `alpha` with three identical beam splitters.
    pub fn symmetric(alpha: f64, r: f64) -> Result<Self> {
        Self::new(Complex64::new(alpha, 0.0), r, r, r)
    }

    pub fn reflectivities(&self) -> [f64; 3] {
        [self.bs1.r(), self.bs2.r(), self.bs3.r()]
    }

    fn total_transmissivity(&self) -> Real {
        self.bs1.t_real() * self.bs2.t_real() * self.bs3.t_real()
    }

    fn alpha_norm_sqr(&self) -> Real {
        let (re, im) = (real(self.alpha.re), real(self.alpha.im));
        re * re + im * im
    }
}

#[derive(Clone, Debug)]
pub struct AmplifierReport {
    pub p_succ: f64,
    pub g_eff: f64,
    pub f_eff: f64,
    pub f_ideal: f64,
    pub output: GaussPolyState,
}

#[derive(Clone, Debug)]
pub struct BranchOutcome {
    pub qnd: u32,
    pub pd1: u32,
    pub pd2: u32,
    pub probability: f64,
    /// `None` when the pattern cannot occur (for instance a click behind `r = 0`).
    pub output: Option<GaussPolyState>,
    /// `|⟨â⟩|` of the output.
    pub amplitude: f64,
    /// `1 − F` against the coherent state with the output's photon number and
    /// the phase of its `⟨â⟩`.
    pub fidelity_deficit: f64,
    /// `1 − F` against the coherent state `|⟨â⟩⟩`.
    pub amplitude_deficit: f64,
}

#[derive(Clone, Debug)]
pub struct BranchEnumeration {
    pub branches: Vec<BranchOutcome>,
    pub other_probability: f64,
}

impl BranchEnumeration {
    pub fn branch(&self, qnd: u32, pd1: u32, pd2: u32) -> Option<&BranchOutcome> {
        self.branches.iter().find(|b| (b.qnd, b.pd1, b.pd2) == (qnd, pd1, pd2))
    }
}

// Chains the three collapses; probability and normalized output.
fn run_pattern(cfg: &AmplifierConfig, (qnd, pd1, pd2): (u32, u32, u32)) -> Result<(Real, GaussPolyState)> {
    let vacuum = coherent_state_real(ZERO, ZERO);
    let input = coherent_state(cfg.alpha)?;
    let (p1, s1) = collapse_real(&beam_split(&input, &vacuum, &cfg.bs1)?, qnd)?;
    let (p2, s2) = collapse_real(&beam_split(&s1, &fock_state(qnd)?, &cfg.bs2)?, pd1)?;
    let (p3, s3) = collapse_real(&beam_split(&s2, &vacuum, &cfg.bs3)?, pd2)?;
    Ok((p1 * p2 * p3, s3))
}

/// Runs the amplified branch `(1, 0, 1)` and scores its output.
pub fn run_success_branch(cfg: &AmplifierConfig) -> Result<AmplifierReport> {
    let (p, output) = run_pattern(cfg, SUCCESS_PATTERN)?;
    let (re, im) = amplitude_expectation_real(&output)?;
    let out_norm = (re * re + im * im).sqrt();
    let in_norm = cfg.alpha_norm_sqr().sqrt();
    let g = out_norm / in_norm;
    let (a_re, a_im) = (real(cfg.alpha.re), real(cfg.alpha.im));
    let target = coherent_state_real(a_re * g, a_im * g);
    let ideal = coherent_state_real(a_re * NOMINAL_GAIN, a_im * NOMINAL_GAIN);
    Ok(AmplifierReport {
        p_succ: to_f64(p),
        g_eff: to_f64(g),
        f_eff: to_f64(fidelity_real(&output, &target)?),
        f_ideal: to_f64(fidelity_real(&output, &ideal)?),
        output,
    })
}

fn closed_form_parts(cfg: &AmplifierConfig) -> (Real, Real, Real) {
    let t = cfg.total_transmissivity();
    let a2 = cfg.alpha_norm_sqr();
    (t, t * t * a2, a2)
}

/// Success probability `(1 + u(3 + u))·|r₁r₂r₃α|²·e^{u − |α|²}` with `u = |Tα|²`, `T = t₁t₂t₃`.
pub fn p_succ_closed_form(cfg: &AmplifierConfig) -> f64 {
    let (_, u, a2) = closed_form_parts(cfg);
    let r = real(cfg.bs1.r()) * real(cfg.bs2.r()) * real(cfg.bs3.r());
    to_f64((ONE + u * (u + real(3.0))) * r * r * a2 * (u - a2).exp())
}

fn gain(t: Real, u: Real) -> Real {
    t * (ONE * 2.0 + u * 4.0 + u * u) / (ONE + u * 3.0 + u * u)
}

/// Effective gain `T(2 + 4u + u²)/(1 + 3u + u²)`.
pub fn g_eff_closed_form(cfg: &AmplifierConfig) -> f64 {
    let (t, u, _) = closed_form_parts(cfg);
    to_f64(gain(t, u))
}

/// Gain in the limit of vanishing reflectivities, `T = 1`.
pub fn g_limit_low_reflectivity(alpha: f64) -> f64 {
    let a = real(alpha);
    to_f64(gain(ONE, a * a))
}

fn fidelity_closed_form(cfg: &AmplifierConfig, squared_gain: bool) -> f64 {
    let (t, u, a2) = closed_form_parts(cfg);
    let g = gain(t, u);
    let gt = g * t * a2;
    let num = ONE + gt * 2.0 + gt * gt;
    let lead = if squared_gain { g * g } else { g };
    let d = lead - t;
    to_f64(num * (-(d * d) * a2).exp() / (ONE + u * 3.0 + u * u))
}

/// Fidelity of the amplified output to `|g_eff α⟩`:
/// `(1 + 2gT|α|² + g²T²|α|⁴)·e^{−(g − T)²|α|²}/(1 + 3u + u²)`.
pub fn f_eff_closed_form(cfg: &AmplifierConfig) -> f64 {
    fidelity_closed_form(cfg, false)
}

/// The same expression with `(g² − T)²` in the exponent. It disagrees with the
/// overlap integral and is kept only to demonstrate that.
pub fn f_eff_closed_form_squared_gain(cfg: &AmplifierConfig) -> f64 {
    fidelity_closed_form(cfg, true)
}

fn score_branch(pattern: (u32, u32, u32), p: Real, output: GaussPolyState, alpha: Complex64) -> Result<BranchOutcome> {
    let (re, im) = amplitude_expectation_real(&output)?;
    let amp = (re * re + im * im).sqrt();
    let n = mean_photon_number_real(&output)?;
    let (cos, sin) = if amp.hi() > 0.0 {
        (re / amp, im / amp)
    } else if alpha.norm() > 0.0 {
        let a = alpha.norm();
        (real(alpha.re / a), real(alpha.im / a))
    } else {
        (ONE, ZERO)
    };
    let energy = n.max(ZERO).sqrt();
    let matched = coherent_state_real(energy * cos, energy * sin);
    let by_amplitude = coherent_state_real(re, im);
    Ok(BranchOutcome {
        qnd: pattern.0,
        pd1: pattern.1,
        pd2: pattern.2,
        probability: to_f64(p),
        amplitude: to_f64(amp),
        fidelity_deficit: to_f64(ONE - fidelity_real(&output, &matched)?).max(0.0),
        amplitude_deficit: to_f64(ONE - fidelity_real(&output, &by_amplitude)?).max(0.0),
        output: Some(output),
    })
}

/// Evaluates all eight single-photon patterns; `other_probability` is the
/// remaining weight `1 − Σ P`.
pub fn enumerate_single_photon_branches(cfg: &AmplifierConfig) -> Result<BranchEnumeration> {
    let mut branches = Vec::with_capacity(BRANCH_ORDER.len());
    let mut total = ZERO;
    for pattern in BRANCH_ORDER {
        let outcome = match run_pattern(cfg, pattern) {
            Ok((p, output)) => {
                total += p;
                score_branch(pattern, p, output, cfg.alpha)?
            }
            Err(Error::VanishingProbability(_)) => BranchOutcome {
                qnd: pattern.0,
                pd1: pattern.1,
                pd2: pattern.2,
                probability: 0.0,
                output: None,
                amplitude: 0.0,
                fidelity_deficit: 0.0,
                amplitude_deficit: 0.0,
            },
            Err(e) => return Err(e),
        };
        branches.push(outcome);
    }
    Ok(BranchEnumeration { branches, other_probability: to_f64(ONE - total) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn config_validation() {
        assert!(AmplifierConfig::symmetric(3.0, 0.4).is_ok());
        assert_eq!(AmplifierConfig::symmetric(3.5, 0.4).unwrap_err(), Error::InvalidAmplitude(3.5));
        assert!(AmplifierConfig::symmetric(f64::NAN, 0.4).is_err());
        assert_eq!(AmplifierConfig::symmetric(0.5, 1.0).unwrap_err(), Error::InvalidReflectivity(1.0));
    }

    #[test]
    fn closed_form_values() {
        let cfg = AmplifierConfig::symmetric(0.5, 0.4).unwrap();
        assert!(rel(p_succ_closed_form(&cfg), 1.356e-3) < 1e-3);
        assert!((g_eff_closed_form(&cfg) - 1.3727).abs() < 1e-4);
        let zero = AmplifierConfig::symmetric(0.0, 0.1).unwrap();
        assert_eq!(p_succ_closed_form(&zero), 0.0);
        let t = (1.0f64 - 0.01).sqrt();
        assert!((g_eff_closed_form(&zero) - 2.0 * t * t * t).abs() < 1e-14);
        assert_eq!(g_limit_low_reflectivity(0.0), 2.0);
        assert!((g_limit_low_reflectivity(10.0) - 1.0).abs() < 0.05);
        let dark = AmplifierConfig::new(Complex64::new(0.5, 0.0), 0.4, 0.0, 0.4).unwrap();
        assert_eq!(p_succ_closed_form(&dark), 0.0);
    }

    #[test]
    fn printed_fidelity_variant_disagrees() {
        let cfg = AmplifierConfig::symmetric(0.5, 0.4).unwrap();
        let good = f_eff_closed_form(&cfg);
        let bad = f_eff_closed_form_squared_gain(&cfg);
        assert!((1.0 - good - 4.83e-3).abs() < 1e-4);
        assert!((bad - 0.80).abs() < 0.01);
    }

    #[test]
    fn success_branch_matches_closed_forms() {
        let cfg = AmplifierConfig::symmetric(0.5, 0.4).unwrap();
        let rep = run_success_branch(&cfg).unwrap();
        assert!((rep.p_succ - p_succ_closed_form(&cfg)).abs() < 1e-12);
        assert!((rep.g_eff - g_eff_closed_form(&cfg)).abs() < 1e-10);
        assert!((rep.f_eff - f_eff_closed_form(&cfg)).abs() < 1e-10);
        assert!(rel(1.0 - rep.f_eff, 4.84e-3) < 0.02);
        assert!(rep.f_ideal < rep.f_eff);
    }

    #[test]
    fn impossible_success_is_an_error() {
        let cfg = AmplifierConfig::symmetric(0.0, 0.4).unwrap();
        assert!(matches!(run_success_branch(&cfg), Err(Error::VanishingProbability(_))));
    }

    #[test]
    fn branches_at_table_point() {
        let cfg = AmplifierConfig::symmetric(0.5, 0.4).unwrap();
        let e = enumerate_single_photon_branches(&cfg).unwrap();
        let s = e.branch(1, 0, 1).unwrap();
        let rep = run_success_branch(&cfg).unwrap();
        assert_eq!(s.probability, rep.p_succ);
        assert!(rel(e.branch(0, 0, 0).unwrap().probability, 0.903) < 5e-3);
        assert!(rel(e.branch(1, 1, 0).unwrap().probability, 2.88e-2) < 5e-3);
        assert!(rel(e.other_probability, 3.84e-3) < 5e-3);
        for b in e.branches.iter().filter(|b| b.qnd == 0) {
            assert!(b.fidelity_deficit.abs() <= 1e-12);
            assert!((b.amplitude - 0.385).abs() < 1e-3);
        }
        let total: f64 = e.branches.iter().map(|b| b.probability).sum::<f64>() + e.other_probability;
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dark_splitter_branches_are_reported_empty() {
        let cfg = AmplifierConfig::new(Complex64::new(0.5, 0.0), 0.0, 0.4, 0.4).unwrap();
        let e = enumerate_single_photon_branches(&cfg).unwrap();
        let b = e.branch(1, 0, 1).unwrap();
        assert_eq!(b.probability, 0.0);
        assert!(b.output.is_none());
    }
}
