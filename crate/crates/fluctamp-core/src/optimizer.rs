//! Maximizes the success probability under a minimum-gain constraint.
//!
//! The search runs over `(α, r₁, r₂, r₃)` with `α` real and positive, using a
//! log-barrier interior method: Newton steps on
//! `−log P − μ Σ log cⱼ`, with `μ` shrinking geometrically. Gradients are
//! analytic; second derivatives of `log P` and of the gain come from central
//! differences of those gradients.

use alloc::vec::Vec;

use rand_chacha::rand_core::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::amplifier::{f_eff_closed_form, AmplifierConfig};
use crate::error::{Error, Result};
use crate::real::{real, to_f64, ONE};
use crate::Complex64;

pub const DEFAULT_ALPHA_MAX: f64 = 3.0;
pub const DEFAULT_MULTISTARTS: usize = 16;
pub const DEFAULT_SEED: u64 = 2013;

const INITIAL_BARRIER: f64 = 1.0;
const BARRIER_SHRINK: f64 = 0.1;
const FINAL_BARRIER: f64 = 1e-9;
const GRADIENT_TOLERANCE: f64 = 1e-9;
const MAX_INNER_ITERATIONS: usize = 200;
const FD_STEP: f64 = 1e-6;
const START_ALPHA_MIN: f64 = 1e-3;
const START_R_MIN: f64 = 1e-3;
const START_R_MAX: f64 = 0.95;
const MAX_SHRINKS: usize = 200;
// Inside the quadratic region the predicted decrease δ² is below the rounding
// of the barrier value, so feasible full steps skip the Armijo test.
const PURE_NEWTON_DECREMENT: f64 = 1e-3;

type Point = [f64; 4];
type Mat4 = [[f64; 4]; 4];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimizationProblem {
    pub g_min: f64,
    pub alpha_max: f64,
    pub multistart_count: usize,
    pub seed: u64,
}

impl OptimizationProblem {
    pub fn new(g_min: f64) -> Result<Self> {
        let p = Self { g_min, alpha_max: DEFAULT_ALPHA_MAX, multistart_count: DEFAULT_MULTISTARTS, seed: DEFAULT_SEED };
        p.validate()?;
        Ok(p)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g_min > 1.0 && self.g_min < 2.0) {
            return Err(Error::InvalidGainThreshold(self.g_min));
        }
        if !(self.alpha_max > START_ALPHA_MIN && self.alpha_max <= DEFAULT_ALPHA_MAX) {
            return Err(Error::InvalidProblem("alpha_max must lie in (1e-3, 3]"));
        }
        if self.multistart_count == 0 {
            return Err(Error::InvalidProblem("multistart_count must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimizationResult {
    pub g_min: f64,
    pub p_opt: f64,
    pub alpha_opt: f64,
    pub r_opt: [f64; 3],
    pub f_opt: f64,
    pub g_at_opt: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl OptimizationResult {
    /// Largest pairwise difference of the optimal reflectivities.
    pub fn reflectivity_spread(&self) -> f64 {
        let [a, b, c] = self.r_opt;
        a.max(b).max(c) - a.min(b).min(c)
    }

    pub fn mean_reflectivity(&self) -> f64 {
        self.r_opt.iter().sum::<f64>() / 3.0
    }
}

struct Terms {
    u: f64,
    t: f64,
    s: f64,
    d: f64,
    h: f64,
    dh: f64,
}

fn terms(z: &Point) -> Terms {
    let a = z[0];
    let s = (1.0 - z[1] * z[1]) * (1.0 - z[2] * z[2]) * (1.0 - z[3] * z[3]);
    let u = s * a * a;
    let d = 1.0 + 3.0 * u + u * u;
    let n = 2.0 + 4.0 * u + u * u;
    let h = n / d;
    let dh = ((4.0 + 2.0 * u) * d - n * (3.0 + 2.0 * u)) / (d * d);
    Terms { u, t: libm::sqrt(s), s, d, h, dh }
}

fn log_p(z: &Point) -> f64 {
    let k = terms(z);
    let a = z[0];
    libm::log(k.d) + 2.0 * (libm::log(z[1]) + libm::log(z[2]) + libm::log(z[3]) + libm::log(a)) + k.u - a * a
}

fn grad_log_p(z: &Point) -> Point {
    let k = terms(z);
    let a = z[0];
    let dlu = (3.0 + 2.0 * k.u) / k.d + 1.0;
    let mut g = [0.0; 4];
    g[0] = dlu * 2.0 * k.s * a + 2.0 / a - 2.0 * a;
    for i in 1..4 {
        let r = z[i];
        g[i] = dlu * a * a * k.s * (-2.0 * r / (1.0 - r * r)) + 2.0 / r;
    }
    g
}

fn gain(z: &Point) -> f64 {
    let k = terms(z);
    k.t * k.h
}

// g − g_min carried in double-double: near the optimum it is ~μ and would
// otherwise be swamped by the rounding of g itself.
fn gain_margin(z: &Point, g_min: f64) -> f64 {
    let a = real(z[0]);
    let s = z[1..].iter().fold(ONE, |acc, &r| acc * (ONE - real(r) * real(r)));
    let u = s * a * a;
    let h = (u * u + u * 4.0 + real(2.0)) / (u * u + u * 3.0 + ONE);
    to_f64(s.sqrt() * h - real(g_min))
}

fn grad_gain(z: &Point) -> Point {
    let k = terms(z);
    let a = z[0];
    let mut g = [0.0; 4];
    g[0] = k.t * k.dh * 2.0 * k.s * a;
    for i in 1..4 {
        let r = z[i];
        g[i] = k.t * (-r / (1.0 - r * r)) * (k.h + 2.0 * k.u * k.dh);
    }
    g
}

fn fd_hessian(grad: fn(&Point) -> Point, z: &Point) -> Mat4 {
    let mut h = [[0.0; 4]; 4];
    for j in 0..4 {
        let step = FD_STEP * z[j].abs().max(1e-3);
        let mut plus = *z;
        let mut minus = *z;
        plus[j] += step;
        minus[j] -= step;
        let gp = grad(&plus);
        let gm = grad(&minus);
        for i in 0..4 {
            h[i][j] = (gp[i] - gm[i]) / (2.0 * step);
        }
    }
    for i in 0..4 {
        for j in 0..i {
            let m = 0.5 * (h[i][j] + h[j][i]);
            h[i][j] = m;
            h[j][i] = m;
        }
    }
    h
}

struct Barrier {
    g_min: f64,
    alpha_max: f64,
}

impl Barrier {
    // Constraint values; all must stay positive.
    fn constraints(&self, z: &Point) -> [f64; 9] {
        [gain_margin(z, self.g_min), z[0], self.alpha_max - z[0], z[1], z[2], z[3], 1.0 - z[1], 1.0 - z[2], 1.0 - z[3]]
    }

    fn feasible(&self, z: &Point) -> bool {
        z.iter().all(|v| v.is_finite()) && self.constraints(z).iter().all(|&c| c > 0.0)
    }

    fn value(&self, z: &Point, mu: f64) -> f64 {
        let c = self.constraints(z);
        -log_p(z) - mu * c.iter().map(|&v| libm::log(v)).sum::<f64>()
    }

    fn linear_gradients() -> [(usize, f64); 8] {
        [(0, 1.0), (0, -1.0), (1, 1.0), (2, 1.0), (3, 1.0), (1, -1.0), (2, -1.0), (3, -1.0)]
    }

    fn gradient(&self, z: &Point, mu: f64) -> Point {
        let c = self.constraints(z);
        let lp = grad_log_p(z);
        let gg = grad_gain(z);
        let mut g = [0.0; 4];
        for i in 0..4 {
            g[i] = -lp[i] - mu * gg[i] / c[0];
        }
        for (k, (idx, sign)) in Self::linear_gradients().iter().enumerate() {
            g[*idx] -= mu * sign / c[k + 1];
        }
        g
    }

    fn hessian(&self, z: &Point, mu: f64) -> Mat4 {
        let c = self.constraints(z);
        let hl = fd_hessian(grad_log_p, z);
        let hg = fd_hessian(grad_gain, z);
        let gg = grad_gain(z);
        let mut h = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                h[i][j] = -hl[i][j] - mu * (hg[i][j] / c[0] - gg[i] * gg[j] / (c[0] * c[0]));
            }
        }
        for (k, (idx, _)) in Self::linear_gradients().iter().enumerate() {
            h[*idx][*idx] += mu / (c[k + 1] * c[k + 1]);
        }
        h
    }
}

fn dot(a: &Point, b: &Point) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn cholesky_solve(h: &Mat4, b: &Point) -> Option<Point> {
    let mut l = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..=i {
            let mut s = h[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if !s.is_finite() || s <= 0.0 {
                    return None;
                }
                l[i][i] = libm::sqrt(s);
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    let mut y = [0.0; 4];
    for i in 0..4 {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i][k] * y[k];
        }
        y[i] = s / l[i][i];
    }
    let mut x = [0.0; 4];
    for i in (0..4).rev() {
        let mut s = y[i];
        for k in (i + 1)..4 {
            s -= l[k][i] * x[k];
        }
        x[i] = s / l[i][i];
    }
    Some(x)
}

// Newton direction, shifted towards steepest descent until the system is positive definite.
fn newton_direction(h: &Mat4, g: &Point) -> Point {
    let rhs = [-g[0], -g[1], -g[2], -g[3]];
    let scale = (0..4).map(|i| h[i][i].abs()).fold(0.0, f64::max).max(1e-12);
    let mut shift = 0.0;
    loop {
        let mut hs = *h;
        for (i, row) in hs.iter_mut().enumerate() {
            row[i] += shift;
        }
        if let Some(d) = cholesky_solve(&hs, &rhs) {
            if dot(&d, g) < 0.0 {
                return d;
            }
        }
        shift = if shift == 0.0 { 1e-8 * scale } else { shift * 10.0 };
        if shift > 1e20 * scale {
            return rhs;
        }
    }
}

struct InnerOutcome {
    z: Point,
    decrement: f64,
    iterations: usize,
}

// Damped Newton until the Newton decrement √(gᵀH⁻¹g) falls below tolerance.
// The plain gradient norm cannot: at small μ the barrier Hessian is so large
// that one ulp of movement changes the gradient by far more than 1e-9.
fn minimize_barrier(b: &Barrier, mut z: Point, mu: f64) -> InnerOutcome {
    let mut iterations = 0;
    let mut value = b.value(&z, mu);
    loop {
        let g = b.gradient(&z, mu);
        let d = newton_direction(&b.hessian(&z, mu), &g);
        let slope = dot(&g, &d);
        let decrement = libm::sqrt((-slope).max(0.0));
        if decrement < GRADIENT_TOLERANCE || iterations >= MAX_INNER_ITERATIONS {
            return InnerOutcome { z, decrement, iterations };
        }
        iterations += 1;
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial = [z[0] + step * d[0], z[1] + step * d[1], z[2] + step * d[2], z[3] + step * d[3]];
            if b.feasible(&trial) {
                let v = b.value(&trial, mu);
                if v <= value + 1e-4 * step * slope || decrement < PURE_NEWTON_DECREMENT {
                    accepted = Some((trial, v));
                    break;
                }
            }
            step *= 0.5;
        }
        match accepted {
            Some((trial, v)) => {
                z = trial;
                value = v;
            }
            None => return InnerOutcome { z, decrement, iterations },
        }
    }
}

struct Run {
    z: Point,
    converged: bool,
    iterations: usize,
}

fn solve_from(b: &Barrier, start: Point) -> Run {
    let mut z = start;
    let mut mu = INITIAL_BARRIER;
    let mut iterations = 0;
    loop {
        let inner = minimize_barrier(b, z, mu);
        z = inner.z;
        iterations += inner.iterations;
        if mu < FINAL_BARRIER {
            return Run { z, converged: inner.decrement < GRADIENT_TOLERANCE, iterations };
        }
        mu *= BARRIER_SHRINK;
    }
}

// Pulls a point towards the origin of (α, r) until the gain constraint holds.
fn shrink_to_feasible(b: &Barrier, mut z: Point, factor: f64) -> Option<Point> {
    for _ in 0..MAX_SHRINKS {
        if b.feasible(&z) {
            return Some(z);
        }
        z = [z[0] * factor, z[1] * factor, z[2] * factor, z[3] * factor];
    }
    None
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    libm::exp(libm::log(lo) + uniform(rng) * (libm::log(hi) - libm::log(lo)))
}

fn random_starts(problem: &OptimizationProblem) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(problem.seed);
    (0..problem.multistart_count)
        .map(|_| {
            [
                log_uniform(&mut rng, START_ALPHA_MIN, problem.alpha_max),
                log_uniform(&mut rng, START_R_MIN, START_R_MAX),
                log_uniform(&mut rng, START_R_MIN, START_R_MAX),
                log_uniform(&mut rng, START_R_MIN, START_R_MAX),
            ]
        })
        .collect()
}

fn result_at(problem: &OptimizationProblem, run: &Run) -> Result<OptimizationResult> {
    let z = run.z;
    let cfg = AmplifierConfig::new(Complex64::new(z[0], 0.0), z[1], z[2], z[3])?;
    Ok(OptimizationResult {
        g_min: problem.g_min,
        p_opt: libm::exp(log_p(&z)),
        alpha_opt: z[0],
        r_opt: [z[1], z[2], z[3]],
        f_opt: f_eff_closed_form(&cfg),
        g_at_opt: gain(&z),
        converged: run.converged,
        iterations: run.iterations,
    })
}

fn solve(problem: &OptimizationProblem, warm: Option<Point>) -> Result<OptimizationResult> {
    problem.validate()?;
    let b = Barrier { g_min: problem.g_min, alpha_max: problem.alpha_max };
    let mut starts: Vec<Point> = Vec::new();
    if let Some(w) = warm.and_then(|w| shrink_to_feasible(&b, w, 0.99)) {
        starts.push(w);
    }
    starts.extend(random_starts(problem).into_iter().filter_map(|s| shrink_to_feasible(&b, s, 0.5)));
    let mut best: Option<(f64, Run)> = None;
    for start in starts {
        let run = solve_from(&b, start);
        if gain(&run.z) < problem.g_min - 1e-8 {
            continue;
        }
        let lp = log_p(&run.z);
        if best.as_ref().is_none_or(|(v, _)| lp > *v) {
            best = Some((lp, run));
        }
    }
    let (_, run) = best.ok_or(Error::Infeasible(problem.g_min))?;
    result_at(problem, &run)
}

/// Best of `multistart_count` barrier solves from seeded random interior starts.
pub fn maximize_success(problem: &OptimizationProblem) -> Result<OptimizationResult> {
    solve(problem, None)
}

/// Solves for each threshold in ascending order, warm-starting from the
/// previous optimum. A failed point does not stop the sweep.
pub fn sweep(g_values: &[f64], seed: u64) -> Vec<Result<OptimizationResult>> {
    let mut previous: Option<Point> = None;
    g_values
        .iter()
        .map(|&g| {
            let out = OptimizationProblem::new(g).and_then(|p| solve(&p.with_seed(seed), previous));
            if let Ok(r) = &out {
                previous = Some([r.alpha_opt, r.r_opt[0], r.r_opt[1], r.r_opt[2]]);
            }
            out
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amplifier::{g_eff_closed_form, p_succ_closed_form};

    #[test]
    fn analytic_functions_match_closed_forms() {
        let z = [0.7, 0.3, 0.2, 0.45];
        let cfg = AmplifierConfig::new(Complex64::new(z[0], 0.0), z[1], z[2], z[3]).unwrap();
        assert!((libm::exp(log_p(&z)) / p_succ_closed_form(&cfg) - 1.0).abs() < 1e-13);
        assert!((gain(&z) - g_eff_closed_form(&cfg)).abs() < 1e-14);
    }

    #[test]
    fn gradients_match_central_differences() {
        let z = [0.7, 0.3, 0.2, 0.45];
        let (gl, gg) = (grad_log_p(&z), grad_gain(&z));
        for i in 0..4 {
            let h = 1e-6;
            let mut p = z;
            let mut m = z;
            p[i] += h;
            m[i] -= h;
            assert!((gl[i] - (log_p(&p) - log_p(&m)) / (2.0 * h)).abs() < 1e-7);
            assert!((gg[i] - (gain(&p) - gain(&m)) / (2.0 * h)).abs() < 1e-8);
        }
    }

    #[test]
    fn problem_validation() {
        assert_eq!(OptimizationProblem::new(2.0).unwrap_err(), Error::InvalidGainThreshold(2.0));
        assert_eq!(OptimizationProblem::new(1.0).unwrap_err(), Error::InvalidGainThreshold(1.0));
        let mut p = OptimizationProblem::new(1.4).unwrap();
        p.multistart_count = 0;
        assert!(maximize_success(&p).is_err());
    }

    #[test]
    fn optimum_at_one_point_four() {
        let r = maximize_success(&OptimizationProblem::new(1.4).unwrap()).unwrap();
        assert!((r.p_opt - 1.0e-3).abs() < 1e-4);
        assert!((r.alpha_opt - 0.51).abs() < 0.02);
        assert!((r.mean_reflectivity() - 0.38).abs() < 0.02);
        assert!(r.reflectivity_spread() <= 1e-4);
        assert!(r.g_at_opt >= 1.4 - 1e-8 && r.g_at_opt - 1.4 <= 1e-4);
        assert!(r.converged);
    }

    #[test]
    fn same_seed_same_result() {
        let p = OptimizationProblem::new(1.3).unwrap().with_seed(7);
        assert_eq!(maximize_success(&p).unwrap(), maximize_success(&p).unwrap());
    }
}
