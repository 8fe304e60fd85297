//! Optical primitives on Wigner functions: state constructors, the beam
//! splitter, photon counting with state collapse, and state metrics.
//!
//! Conventions: ħ = κ = 1, so a coherent state `|α⟩` is centred at
//! `(√2 Re α, √2 Im α)` and `⟨â⟩ = (⟨x⟩ + i⟨p⟩)/√2`. The beam splitter maps
//! coherent amplitudes `(α, β)` on ports (1, 2) to `(tα − rβ, rα + tβ)` on the
//! (transmitted, reflected) outputs.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gausspoly::GaussPolyState;
use crate::laguerre::laguerre_coefficients_real;
use crate::linalg::Matrix;
use crate::poly::{Exponents, Poly, MAX_VARS};
use crate::real::{pi, real, sqrt2, to_f64, transmissivity, Real, ONE, ZERO};
use crate::Complex64;

/// Default cap on the photon number of a Fock state or a detection outcome.
pub const MAX_FOCK_ORDER: u32 = 4;

/// Hard ceiling for photon counts used in completeness sums.
pub const FOCK_ORDER_LIMIT: u32 = 32;

/// Collapses with a smaller outcome probability are treated as impossible.
pub const MIN_COLLAPSE_PROBABILITY: f64 = 1e-30;

/// Tolerance on `∫W = 1` for states entering a measurement.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-10;

/// Index of the reflected (measured) output mode.
pub const REFLECTED_MODE: usize = 1;

/// Lossless beam splitter with real coefficients, `r² + t² = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BeamSplitter {
    r: f64,
    t: Real,
}

impl BeamSplitter {
    pub fn new(r: f64) -> Result<Self> {
        if !r.is_finite() || !(0.0..1.0).contains(&r) {
            return Err(Error::InvalidReflectivity(r));
        }
        Ok(Self { r, t: transmissivity(r) })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn t(&self) -> f64 {
        to_f64(self.t)
    }

    pub(crate) fn t_real(&self) -> Real {
        self.t
    }

    /// Variable map `(x₁, p₁, x₂, p₂) ↦ (t x₁ + r x₂, t p₁ + r p₂, t x₂ − r x₁, t p₂ − r p₁)`.
    pub(crate) fn mixing_map(&self) -> Matrix {
        let t = self.t;
        let r = real(self.r);
        let mut m = Matrix::zeros(4, 4);
        m[(0, 0)] = t;
        m[(0, 2)] = r;
        m[(1, 1)] = t;
        m[(1, 3)] = r;
        m[(2, 0)] = -r;
        m[(2, 2)] = t;
        m[(3, 1)] = -r;
        m[(3, 3)] = t;
        m
    }
}

/// A photon-number measurement outcome on one output port.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DetectionEvent {
    pub mode: usize,
    pub n: u32,
}

impl DetectionEvent {
    /// Outcome `n` on the reflected port, capped at [`MAX_FOCK_ORDER`].
    pub fn reflected(n: u32) -> Result<Self> {
        Self::with_cap(n, MAX_FOCK_ORDER)
    }

    pub fn with_cap(n: u32, cap: u32) -> Result<Self> {
        if n > cap {
            return Err(Error::FockOrderTooLarge { n, cap });
        }
        Ok(Self { mode: REFLECTED_MODE, n })
    }
}

/// Wigner function of the coherent state `|α⟩`.
pub fn coherent_state(alpha: Complex64) -> Result<GaussPolyState> {
    if !(alpha.re.is_finite() && alpha.im.is_finite()) {
        return Err(Error::InvalidAmplitude(alpha.norm()));
    }
    Ok(coherent_state_real(real(alpha.re), real(alpha.im)))
}

pub(crate) fn coherent_state_real(re: Real, im: Real) -> GaussPolyState {
    GaussPolyState::from_parts(
        1,
        Poly::constant(2, ONE / pi()),
        alloc::vec![re * sqrt2(), im * sqrt2()],
        Matrix::identity(2),
    )
}

/// Wigner function of the Fock state `|n⟩` for `n ≤` [`MAX_FOCK_ORDER`].
pub fn fock_state(n: u32) -> Result<GaussPolyState> {
    fock_state_with_cap(n, MAX_FOCK_ORDER)
}

/// Wigner function of `|n⟩` with an explicit order cap (at most [`FOCK_ORDER_LIMIT`]).
pub fn fock_state_with_cap(n: u32, cap: u32) -> Result<GaussPolyState> {
    let cap = cap.min(FOCK_ORDER_LIMIT);
    if n > cap {
        return Err(Error::FockOrderTooLarge { n, cap });
    }
    // (−1)ⁿ/π · L_n(2x² + 2p²)
    let sign = if n.is_multiple_of(2) { ONE } else { -ONE };
    let coeffs = laguerre_coefficients_real(n);
    let radial = {
        let mut p = Poly::zero(2);
        p.add_term(Exponents([2, 0, 0, 0]), real(2.0));
        p.add_term(Exponents([0, 2, 0, 0]), real(2.0));
        p
    };
    let mut poly = Poly::zero(2);
    let mut power = Poly::constant(2, ONE);
    for (k, c) in coeffs.iter().enumerate() {
        if k > 0 {
            power = power.mul(&radial);
        }
        poly = poly.add(&power.clone().scaled(*c));
    }
    Ok(GaussPolyState::from_parts(1, poly.scaled(sign / pi()), alloc::vec![ZERO, ZERO], Matrix::identity(2)))
}

/// Two-mode Wigner function after `field1` (signal port) and `field2` meet on
/// `bs`. Mode 0 is transmitted, mode 1 reflected.
pub fn beam_split(field1: &GaussPolyState, field2: &GaussPolyState, bs: &BeamSplitter) -> Result<GaussPolyState> {
    single_mode(field1)?;
    single_mode(field2)?;
    field1.tensor(field2)?.substitute_linear_real(&bs.mixing_map())
}

/// Probability of counting `n` photons on the reflected mode of a normalized
/// two-mode state.
pub fn detection_probability(s: &GaussPolyState, n: u32) -> Result<f64> {
    projected(s, n).map(|(p, _)| to_f64(p))
}

/// Counts `n` photons on the reflected mode and returns the outcome probability
/// with the normalized transmitted state.
pub fn collapse_on_detection(s: &GaussPolyState, n: u32) -> Result<(f64, GaussPolyState)> {
    collapse_real(s, n).map(|(p, out)| (to_f64(p), out))
}

pub(crate) fn collapse_real(s: &GaussPolyState, n: u32) -> Result<(Real, GaussPolyState)> {
    let (p, joint) = projected(s, n)?;
    if p.hi() <= MIN_COLLAPSE_PROBABILITY {
        return Err(Error::VanishingProbability(to_f64(p)));
    }
    let transmitted = joint.integrate_modes(&[0])?;
    Ok((p, transmitted.scaled(pi() * 2.0 / p)))
}

// s · W_n on the reflected mode, and its total weight 2π∫.
fn projected(s: &GaussPolyState, n: u32) -> Result<(Real, GaussPolyState)> {
    if s.modes() != 2 {
        return Err(Error::ModeMismatch { left: s.modes(), right: 2 });
    }
    let norm = s.integrate_all_real()?;
    if (norm - ONE).abs().hi() > NORMALIZATION_TOLERANCE {
        return Err(Error::Unnormalized(to_f64(norm)));
    }
    let projector = fock_state_with_cap(n, FOCK_ORDER_LIMIT)?.embed(2, REFLECTED_MODE)?;
    let joint = s.multiply(&projector)?;
    let p = joint.integrate_all_real()? * pi() * 2.0;
    Ok((p, joint))
}

/// `⟨â⟩` of a normalized single-mode state.
pub fn amplitude_expectation(s: &GaussPolyState) -> Result<Complex64> {
    let (re, im) = amplitude_expectation_real(s)?;
    Ok(Complex64::new(to_f64(re), to_f64(im)))
}

pub(crate) fn amplitude_expectation_real(s: &GaussPolyState) -> Result<(Real, Real)> {
    single_mode(s)?;
    let x = s.moment_real(&[1, 0])?;
    let p = s.moment_real(&[0, 1])?;
    Ok((x / sqrt2(), p / sqrt2()))
}

/// `⟨â†â⟩ = (⟨x²⟩ + ⟨p²⟩ − 1)/2` of a normalized single-mode state.
pub fn mean_photon_number(s: &GaussPolyState) -> Result<f64> {
    mean_photon_number_real(s).map(to_f64)
}

pub(crate) fn mean_photon_number_real(s: &GaussPolyState) -> Result<Real> {
    single_mode(s)?;
    let x2 = s.moment_real(&[2, 0])?;
    let p2 = s.moment_real(&[0, 2])?;
    let norm = s.integrate_all_real()?;
    Ok((x2 + p2 - norm) * 0.5)
}

/// Overlap `2π ∫ W₁ W₂` of two single-mode states.
pub fn fidelity(w1: &GaussPolyState, w2: &GaussPolyState) -> Result<f64> {
    fidelity_real(w1, w2).map(to_f64)
}

pub(crate) fn fidelity_real(w1: &GaussPolyState, w2: &GaussPolyState) -> Result<Real> {
    single_mode(w1)?;
    single_mode(w2)?;
    Ok(w1.multiply(w2)?.integrate_all_real()? * pi() * 2.0)
}

/// `2π ∫ W²`; equal to one for pure states.
pub fn purity(s: &GaussPolyState) -> Result<f64> {
    fidelity(s, s)
}

fn single_mode(s: &GaussPolyState) -> Result<()> {
    if s.modes() == 1 {
        Ok(())
    } else {
        Err(Error::ModeMismatch { left: s.modes(), right: 1 })
    }
}

/// Samples `s` on a rectangular grid; rows are `p` values, columns `x` values.
pub fn sample_grid(s: &GaussPolyState, xs: &[f64], ps: &[f64]) -> Result<Vec<Vec<f64>>> {
    single_mode(s)?;
    Ok(ps.iter().map(|&p| xs.iter().map(|&x| to_f64(s.evaluate_real(&[real(x), real(p)]))).collect()).collect())
}

#[allow(dead_code)]
const _: () = assert!(MAX_VARS >= 4);

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn beam_splitter_validation() {
        assert!(BeamSplitter::new(0.4).is_ok());
        assert!(BeamSplitter::new(0.0).is_ok());
        assert_eq!(BeamSplitter::new(1.0).unwrap_err(), Error::InvalidReflectivity(1.0));
        assert!(BeamSplitter::new(-0.1).is_err());
        assert!(BeamSplitter::new(f64::NAN).is_err());
        let bs = BeamSplitter::new(0.4).unwrap();
        assert!((bs.r() * bs.r() + bs.t() * bs.t() - 1.0).abs() < 1e-15);
        assert!((bs.t() - 0.84f64.sqrt()).abs() < 1e-16);
    }

    #[test]
    fn detection_event_cap() {
        assert!(DetectionEvent::reflected(4).is_ok());
        assert_eq!(DetectionEvent::reflected(5).unwrap_err(), Error::FockOrderTooLarge { n: 5, cap: 4 });
    }

    #[test]
    fn coherent_constructor() {
        let v = coherent_state(c(0.0)).unwrap();
        assert!((v.evaluate(&[0.0, 0.0]).unwrap() - 1.0 / PI).abs() < 1e-16);
        let s = coherent_state(c(0.5)).unwrap();
        assert!((s.mean()[0] - 0.5 * 2f64.sqrt()).abs() < 1e-16);
        assert_eq!(s.mean()[1], 0.0);
        assert!((mean_photon_number(&s).unwrap() - 0.25).abs() < 1e-15);
        let peak = coherent_state(c(1.0)).unwrap();
        assert!((peak.evaluate(&[2f64.sqrt(), 0.0]).unwrap() - 1.0 / PI).abs() < 1e-15);
        assert!(coherent_state(Complex64::new(f64::INFINITY, 0.0)).is_err());
    }

    #[test]
    fn fock_constructor() {
        let zero = fock_state(0).unwrap();
        let vac = coherent_state(c(0.0)).unwrap();
        assert_eq!(zero.coefficient_distance(&vac, 0.0), Some(0.0));
        let one = fock_state(1).unwrap();
        assert!((one.evaluate(&[0.0, 0.0]).unwrap() + 1.0 / PI).abs() < 1e-16);
        assert!((one.integrate_all().unwrap() - 1.0).abs() < 1e-15);
        assert!((mean_photon_number(&one).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(fock_state(5).unwrap_err(), Error::FockOrderTooLarge { n: 5, cap: 4 });
        for n in 0..=20 {
            let f = fock_state_with_cap(n, 20).unwrap();
            assert!((f.integrate_all().unwrap() - 1.0).abs() < 1e-12, "n={n}");
            assert!((mean_photon_number(&f).unwrap() - f64::from(n)).abs() < 1e-10, "n={n}");
        }
    }

    #[test]
    fn amplitude_of_basic_states() {
        let a = Complex64::new(0.3, -0.7);
        let got = amplitude_expectation(&coherent_state(a).unwrap()).unwrap();
        assert!((got - a).norm() < 1e-15);
        for n in 0..=4 {
            assert!(amplitude_expectation(&fock_state(n).unwrap()).unwrap().norm() < 1e-15);
            // ⟨x⟩ of a Fock state vanishes by symmetry
            assert!(fock_state(n).unwrap().moment(&[1, 0]).unwrap().abs() < 1e-15);
        }
        let two = coherent_state(a).unwrap().tensor(&fock_state(1).unwrap()).unwrap();
        assert!(matches!(amplitude_expectation(&two), Err(Error::ModeMismatch { .. })));
    }

    #[test]
    fn splitting_a_coherent_state() {
        let bs = BeamSplitter::new(0.4).unwrap();
        let s = beam_split(&coherent_state(c(0.5)).unwrap(), &fock_state(0).unwrap(), &bs).unwrap();
        let t_alpha = 0.5 * 0.84f64.sqrt();
        let transmitted = s.integrate_modes(&[0]).unwrap();
        let want = coherent_state(c(t_alpha)).unwrap();
        assert!(transmitted.coefficient_distance(&want, 1e-15).unwrap() < 1e-15);
        let reflected = s.integrate_modes(&[1]).unwrap();
        let a = amplitude_expectation(&reflected).unwrap();
        assert!((a.re - 0.2).abs() < 1e-15 && a.im.abs() < 1e-15);
        // r = 0 leaves the inputs untouched
        let id = BeamSplitter::new(0.0).unwrap();
        let f1 = coherent_state(c(0.5)).unwrap();
        let f2 = fock_state(1).unwrap();
        let prod = f1.tensor(&f2).unwrap();
        let split = beam_split(&f1, &f2, &id).unwrap();
        assert!(split.coefficient_distance(&prod, 0.0).unwrap() == 0.0);
    }

    #[test]
    fn poisson_click_statistics() {
        let bs = BeamSplitter::new(0.4).unwrap();
        let s = beam_split(&coherent_state(c(0.5)).unwrap(), &fock_state(0).unwrap(), &bs).unwrap();
        let p0 = detection_probability(&s, 0).unwrap();
        let p1 = detection_probability(&s, 1).unwrap();
        assert!((p0 - (-0.04f64).exp()).abs() < 1e-15);
        assert!((p1 - 0.04 * (-0.04f64).exp()).abs() < 1e-15);
        let total: f64 = (0..=20).map(|n| detection_probability(&s, n).unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn collapse_keeps_coherent_states_coherent() {
        let bs = BeamSplitter::new(0.4).unwrap();
        let s = beam_split(&coherent_state(c(0.5)).unwrap(), &fock_state(0).unwrap(), &bs).unwrap();
        let t_alpha = 0.5 * 0.84f64.sqrt();
        let reference = coherent_state(c(t_alpha)).unwrap();
        for n in [0, 1] {
            let (_, out) = collapse_on_detection(&s, n).unwrap();
            assert!((fidelity(&out, &reference).unwrap() - 1.0).abs() < 1e-14);
            assert!((purity(&out).unwrap() - 1.0).abs() < 1e-14);
            assert!((amplitude_expectation(&out).unwrap().re - t_alpha).abs() < 1e-15);
        }
    }

    #[test]
    fn projecting_an_eigenstate() {
        let wa = coherent_state(c(0.3)).unwrap();
        for k in 0..=3 {
            let s = wa.tensor(&fock_state(k).unwrap()).unwrap();
            let (p, out) = collapse_on_detection(&s, k).unwrap();
            assert!((p - 1.0).abs() < 1e-14);
            assert!(out.coefficient_distance(&wa, 1e-15).unwrap() < 1e-14);
        }
        let s = wa.tensor(&fock_state(1).unwrap()).unwrap();
        assert!(matches!(collapse_on_detection(&s, 0), Err(Error::VanishingProbability(_))));
    }

    #[test]
    fn measurement_requires_normalized_two_mode_input() {
        let s = coherent_state(c(0.3)).unwrap().tensor(&fock_state(0).unwrap()).unwrap();
        let doubled = s.scaled(real(2.0));
        assert!(matches!(detection_probability(&doubled, 0), Err(Error::Unnormalized(_))));
        let single = coherent_state(c(0.3)).unwrap();
        assert!(matches!(detection_probability(&single, 0), Err(Error::ModeMismatch { .. })));
    }

    #[test]
    fn overlaps() {
        let vac = coherent_state(c(0.0)).unwrap();
        let one = coherent_state(c(1.0)).unwrap();
        assert!((fidelity(&vac, &one).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        assert!(fidelity(&vac, &fock_state(1).unwrap()).unwrap().abs() < 1e-15);
        for n in 0..=4 {
            assert!((purity(&fock_state(n).unwrap()).unwrap() - 1.0).abs() < 1e-14);
        }
    }
}
