//! Truncated number-basis simulator of the amplifier circuit.
//!
//! This engine shares nothing with the phase-space code beyond the public
//! [`BeamSplitter`] and [`AmplifierConfig`] types, so it serves as an oracle for
//! it. Amplitudes are plain `f64` complex numbers.

use alloc::vec;
use alloc::vec::Vec;

use crate::amplifier::AmplifierConfig;
use crate::error::{Error, Result};
use crate::optics::BeamSplitter;
use crate::Complex64;

/// Default per-mode photon-number cutoff.
pub const DEFAULT_CUTOFF: usize = 20;

/// Largest norm deficit accepted when preparing a coherent state.
pub const MAX_TRUNCATION_DEFICIT: f64 = 1e-8;

/// Largest norm a beam splitter may push past the cutoff.
pub const MAX_LEAKAGE: f64 = 1e-10;

/// Outcomes below this probability are treated as impossible.
pub const MIN_OUTCOME_PROBABILITY: f64 = 1e-300;

/// Single-mode state `Σ cₙ|n⟩`, `n ≤ cutoff`.
#[derive(Clone, Debug, PartialEq)]
pub struct FockVector {
    cutoff: usize,
    amps: Vec<Complex64>,
}

impl FockVector {
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, actual: 0 });
        }
        Ok(Self { cutoff: amps.len() - 1, amps })
    }

    /// The number state `|n⟩`.
    pub fn number(n: usize, cutoff: usize) -> Result<Self> {
        if n > cutoff {
            return Err(Error::PhotonCountAboveCutoff { n, cutoff });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); cutoff + 1];
        amps[n] = Complex64::new(1.0, 0.0);
        Ok(Self { cutoff, amps })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if n <= MIN_OUTCOME_PROBABILITY {
            return Err(Error::VanishingProbability(n));
        }
        let s = 1.0 / libm::sqrt(n);
        Ok(Self { cutoff: self.cutoff, amps: self.amps.iter().map(|c| c * s).collect() })
    }

    /// `⟨ψ|â|ψ⟩`.
    pub fn amplitude(&self) -> Complex64 {
        (0..self.cutoff).map(|n| self.amps[n].conj() * self.amps[n + 1] * libm::sqrt((n + 1) as f64)).sum()
    }

    /// `⟨ψ|â†â|ψ⟩`.
    pub fn mean_photon_number(&self) -> f64 {
        self.amps.iter().enumerate().map(|(n, c)| n as f64 * c.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`, over the common support.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Fidelity to the coherent state `|β⟩`, expanded to the same cutoff.
    pub fn fidelity_to_coherent(&self, beta: Complex64) -> f64 {
        self.fidelity(&coherent_unchecked(beta, self.cutoff))
    }

    /// `â|ψ⟩`, unnormalized.
    pub fn annihilate(&self) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); self.cutoff + 1];
        for n in 1..=self.cutoff {
            amps[n - 1] = self.amps[n] * libm::sqrt(n as f64);
        }
        Self { cutoff: self.cutoff, amps }
    }

    /// `â†|ψ⟩`, unnormalized; the cutoff grows by one.
    pub fn create(&self) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); self.cutoff + 2];
        for n in 0..=self.cutoff {
            amps[n + 1] = self.amps[n] * libm::sqrt((n + 1) as f64);
        }
        Self { cutoff: self.cutoff + 1, amps }
    }
}

fn coherent_unchecked(alpha: Complex64, cutoff: usize) -> FockVector {
    let mut amps = Vec::with_capacity(cutoff + 1);
    let mut c = Complex64::new(libm::exp(-0.5 * alpha.norm_sqr()), 0.0);
    amps.push(c);
    for n in 1..=cutoff {
        c = c * alpha / libm::sqrt(n as f64);
        amps.push(c);
    }
    FockVector { cutoff, amps }
}

/// Poisson tail bound `e^{−|α|²}|α|^{2N}/N!` on the mass above the cutoff.
pub fn truncation_bound(alpha: Complex64, cutoff: usize) -> f64 {
    let x = alpha.norm_sqr();
    let mut term = libm::exp(-x);
    for n in 1..=cutoff {
        term *= x / n as f64;
    }
    term
}

/// `cₙ = e^{−|α|²/2} αⁿ/√n!` for `n ≤ cutoff`.
pub fn coherent_fock(alpha: Complex64, cutoff: usize) -> Result<FockVector> {
    if !(alpha.re.is_finite() && alpha.im.is_finite()) {
        return Err(Error::InvalidAmplitude(alpha.norm()));
    }
    let v = coherent_unchecked(alpha, cutoff);
    let deficit = 1.0 - v.norm_sqr();
    if (cutoff as f64) < 8.0 * alpha.norm_sqr().max(1.0) || deficit > MAX_TRUNCATION_DEFICIT {
        return Err(Error::CutoffTooSmall { cutoff, deficit });
    }
    Ok(v)
}

/// Two-mode state `Σ c_{n,m}|n⟩|m⟩`, `n, m ≤ cutoff`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoModeFockVector {
    cutoff: usize,
    amps: Vec<Complex64>,
}

impl TwoModeFockVector {
    pub fn product(a: &FockVector, b: &FockVector) -> Result<Self> {
        if a.cutoff != b.cutoff {
            return Err(Error::DimensionMismatch { expected: a.cutoff, actual: b.cutoff });
        }
        let d = a.cutoff + 1;
        let mut amps = vec![Complex64::new(0.0, 0.0); d * d];
        for n in 0..d {
            for m in 0..d {
                amps[n * d + m] = a.amps[n] * b.amps[m];
            }
        }
        Ok(Self { cutoff: a.cutoff, amps })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// `c_{n,m}`.
    pub fn get(&self, n: usize, m: usize) -> Complex64 {
        self.amps[n * (self.cutoff + 1) + m]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Mean total photon number `⟨n̂₁ + n̂₂⟩`.
    pub fn total_photon_number(&self) -> f64 {
        let d = self.cutoff + 1;
        self.amps.iter().enumerate().map(|(i, c)| ((i / d) + (i % d)) as f64 * c.norm_sqr()).sum()
    }
}

type Block = Vec<f64>;

/// Beam-splitter unitary `exp(θ(â b̂† − â† b̂))`, `θ = arcsin r`, on a truncated
/// two-mode space. Each fixed-total-photon block is exponentiated once.
#[derive(Clone, Debug)]
pub struct FockBeamSplitter {
    theta: f64,
    cutoff: usize,
    blocks: Vec<Block>,
}

impl FockBeamSplitter {
    pub fn new(bs: &BeamSplitter, cutoff: usize) -> Self {
        Self::from_angle(libm::asin(bs.r()), cutoff)
    }

    fn from_angle(theta: f64, cutoff: usize) -> Self {
        let blocks = (0..=2 * cutoff).map(|k| block_exponential(theta, k)).collect();
        Self { theta, cutoff, blocks }
    }

    /// The reverse rotation.
    pub fn inverse(&self) -> Self {
        Self::from_angle(-self.theta, self.cutoff)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn apply(&self, s: &TwoModeFockVector) -> Result<TwoModeFockVector> {
        if s.cutoff != self.cutoff {
            return Err(Error::DimensionMismatch { expected: self.cutoff, actual: s.cutoff });
        }
        let nmax = self.cutoff;
        let d = nmax + 1;
        let mut out = vec![Complex64::new(0.0, 0.0); d * d];
        let mut leaked = 0.0;
        for (k, u) in self.blocks.iter().enumerate() {
            let size = k + 1;
            // block basis |n, k − n⟩
            let lo = k.saturating_sub(nmax);
            let hi = k.min(nmax);
            for row in 0..size {
                let mut acc = Complex64::new(0.0, 0.0);
                for col in lo..=hi {
                    acc += s.amps[col * d + (k - col)] * u[row * size + col];
                }
                if row >= lo && row <= hi {
                    out[row * d + (k - row)] = acc;
                } else {
                    leaked += acc.norm_sqr();
                }
            }
        }
        if leaked > MAX_LEAKAGE {
            return Err(Error::BoundaryLeakage(leaked));
        }
        Ok(TwoModeFockVector { cutoff: nmax, amps: out })
    }
}

// Generator on the block |n, k − n⟩, n = 0..=k, row-major.
fn block_generator(theta: f64, k: usize) -> Block {
    let size = k + 1;
    let mut g = vec![0.0; size * size];
    for n in 0..=k {
        let m = k - n;
        if n > 0 {
            g[(n - 1) * size + n] = theta * libm::sqrt((n * (m + 1)) as f64);
        }
        if m > 0 {
            g[(n + 1) * size + n] = -theta * libm::sqrt(((n + 1) * m) as f64);
        }
    }
    g
}

fn mat_mul(a: &[f64], b: &[f64], size: usize) -> Block {
    let mut c = vec![0.0; size * size];
    for i in 0..size {
        for l in 0..size {
            let ail = a[i * size + l];
            if ail == 0.0 {
                continue;
            }
            for j in 0..size {
                c[i * size + j] += ail * b[l * size + j];
            }
        }
    }
    c
}

// exp(G) by scaling and squaring of a truncated Taylor series.
fn block_exponential(theta: f64, k: usize) -> Block {
    let size = k + 1;
    let g = block_generator(theta, k);
    let norm = (0..size).map(|i| (0..size).map(|j| g[i * size + j].abs()).sum::<f64>()).fold(0.0, f64::max);
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let a: Block = g.iter().map(|x| x * scale).collect();
    let mut result = vec![0.0; size * size];
    let mut term = vec![0.0; size * size];
    for i in 0..size {
        result[i * size + i] = 1.0;
        term[i * size + i] = 1.0;
    }
    for j in 1..=18 {
        term = mat_mul(&term, &a, size);
        let inv = 1.0 / j as f64;
        for (r, t) in result.iter_mut().zip(term.iter_mut()) {
            *t *= inv;
            *r += *t;
        }
    }
    for _ in 0..squarings {
        result = mat_mul(&result, &result, size);
    }
    result
}

/// One-shot application of `bs`; build a [`FockBeamSplitter`] to reuse the blocks.
pub fn apply_beam_splitter(s: &TwoModeFockVector, bs: &BeamSplitter) -> Result<TwoModeFockVector> {
    FockBeamSplitter::new(bs, s.cutoff).apply(s)
}

/// Probability of `n` photons in `mode` (0 or 1).
pub fn photon_count_probability(s: &TwoModeFockVector, mode: usize, n: usize) -> Result<f64> {
    if mode > 1 {
        return Err(Error::InvalidModeSelection);
    }
    if n > s.cutoff {
        return Err(Error::PhotonCountAboveCutoff { n, cutoff: s.cutoff });
    }
    Ok((0..=s.cutoff).map(|j| if mode == 1 { s.get(j, n) } else { s.get(n, j) }.norm_sqr()).sum())
}

/// Projects `mode` onto `|n⟩`; returns the outcome probability and the
/// normalized state of the other mode.
pub fn project_photon_count(s: &TwoModeFockVector, mode: usize, n: usize) -> Result<(f64, FockVector)> {
    let p = photon_count_probability(s, mode, n)?;
    if p <= MIN_OUTCOME_PROBABILITY {
        return Err(Error::VanishingProbability(p));
    }
    let inv = 1.0 / libm::sqrt(p);
    let amps = (0..=s.cutoff).map(|j| if mode == 1 { s.get(j, n) } else { s.get(n, j) } * inv).collect();
    Ok((p, FockVector { cutoff: s.cutoff, amps }))
}

/// Runs one detector pattern `(qnd, pd1, pd2)` of the amplifier circuit.
pub fn run_branch_fock(cfg: &AmplifierConfig, outcomes: (u32, u32, u32), cutoff: usize) -> Result<(f64, FockVector)> {
    let (qnd, pd1, pd2) = (outcomes.0 as usize, outcomes.1 as usize, outcomes.2 as usize);
    let vacuum = FockVector::number(0, cutoff)?;
    let input = coherent_fock(cfg.alpha, cutoff)?;
    let bs1 = FockBeamSplitter::new(&cfg.bs1, cutoff);
    let reuse = |bs: &BeamSplitter| {
        if bs.r() == cfg.bs1.r() {
            bs1.clone()
        } else {
            FockBeamSplitter::new(bs, cutoff)
        }
    };
    let bs2 = reuse(&cfg.bs2);
    let bs3 = reuse(&cfg.bs3);
    let (p1, s1) = project_photon_count(&bs1.apply(&TwoModeFockVector::product(&input, &vacuum)?)?, 1, qnd)?;
    let added = FockVector::number(qnd, cutoff)?;
    let (p2, s2) = project_photon_count(&bs2.apply(&TwoModeFockVector::product(&s1, &added)?)?, 1, pd1)?;
    let (p3, s3) = project_photon_count(&bs3.apply(&TwoModeFockVector::product(&s2, &vacuum)?)?, 1, pd2)?;
    Ok((p1 * p2 * p3, s3))
}
