//! Sparse multivariate polynomials over at most four phase-space variables.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::Matrix;
use crate::real::{pi, Real, ONE, ZERO};

pub(crate) const MAX_VARS: usize = 4;

/// Exponent tuple of a monomial; unused trailing slots stay zero.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exponents(pub [u8; MAX_VARS]);

impl Exponents {
    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| u32::from(e)).sum()
    }

    fn combined(&self, other: &Exponents) -> Exponents {
        let mut out = [0u8; MAX_VARS];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = self.0[i] + other.0[i];
        }
        Exponents(out)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Poly {
    nvars: usize,
    terms: BTreeMap<Exponents, Real>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        debug_assert!(nvars <= MAX_VARS);
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Real) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Exponents::default(), c);
        p
    }

    pub fn monomial(nvars: usize, e: Exponents, c: Real) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(e, c);
        p
    }

    /// `offset + Σ coeffs[j] v_j`.
    pub fn linear(nvars: usize, offset: Real, coeffs: &[Real]) -> Self {
        let mut p = Self::constant(nvars, offset);
        for (j, &c) in coeffs.iter().enumerate() {
            let mut e = [0u8; MAX_VARS];
            e[j] = 1;
            p.add_term(Exponents(e), c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Real)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, e: &Exponents) -> Real {
        self.terms.get(e).copied().unwrap_or(ZERO)
    }

    pub fn add_term(&mut self, e: Exponents, c: Real) {
        if c.hi() == 0.0 {
            return;
        }
        let slot = self.terms.entry(e).or_insert(ZERO);
        *slot += c;
        if slot.hi() == 0.0 {
            self.terms.remove(&e);
        }
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Exponents::degree).max().unwrap_or(0)
    }

    pub fn max_abs(&self) -> Real {
        self.terms.values().fold(ZERO, |m, c| m.max(c.abs()))
    }

    pub fn scaled(mut self, c: Real) -> Self {
        if c.hi() == 0.0 {
            self.terms.clear();
            return self;
        }
        for v in self.terms.values_mut() {
            *v *= c;
        }
        self
    }

    pub fn add(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, *c);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = Poly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.add_term(ea.combined(eb), *ca * *cb);
            }
        }
        out
    }

    /// Drops coefficients at or below `rel` times the largest one.
    pub fn pruned(mut self, rel: f64) -> Self {
        let cut = self.max_abs().hi() * rel;
        self.terms.retain(|_, c| c.abs().hi() > cut);
        self
    }

    pub fn eval(&self, v: &[Real]) -> Real {
        debug_assert_eq!(v.len(), self.nvars);
        let mut acc = ZERO;
        for (e, c) in &self.terms {
            let mut term = *c;
            for (i, &x) in v.iter().enumerate() {
                let k = e.0[i];
                if k > 0 {
                    term *= x.powi(i32::from(k));
                }
            }
            acc += term;
        }
        acc
    }

    /// Re-indexes the variables into a larger space, starting at `first`.
    pub fn embedded(&self, total_vars: usize, first: usize) -> Poly {
        debug_assert!(first + self.nvars <= total_vars && total_vars <= MAX_VARS);
        let mut out = Poly::zero(total_vars);
        for (e, c) in &self.terms {
            let mut ne = [0u8; MAX_VARS];
            ne[first..first + self.nvars].copy_from_slice(&e.0[..self.nvars]);
            out.add_term(Exponents(ne), *c);
        }
        out
    }

    /// Rewrites the polynomial under `old_i = offset_i + Σ_j map[(i, j)] new_j`.
    pub fn affine_substitute(&self, map: &Matrix, offset: &[Real]) -> Poly {
        debug_assert_eq!(map.rows(), self.nvars);
        debug_assert_eq!(offset.len(), self.nvars);
        let new_vars = map.cols();
        let max_exp: Vec<u8> = (0..self.nvars).map(|i| self.terms.keys().map(|e| e.0[i]).max().unwrap_or(0)).collect();
        // powers[i][k] = (old variable i)^k in the new variables
        let powers: Vec<Vec<Poly>> = (0..self.nvars)
            .map(|i| {
                let coeffs: Vec<Real> = (0..new_vars).map(|j| map[(i, j)]).collect();
                let lin = Poly::linear(new_vars, offset[i], &coeffs);
                let mut list = vec![Poly::constant(new_vars, ONE)];
                for k in 1..=usize::from(max_exp[i]) {
                    let next = list[k - 1].mul(&lin);
                    list.push(next);
                }
                list
            })
            .collect();
        let mut out = Poly::zero(new_vars);
        for (e, c) in &self.terms {
            let mut term = Poly::constant(new_vars, *c);
            for (i, pw) in powers.iter().enumerate() {
                let k = usize::from(e.0[i]);
                if k > 0 {
                    term = term.mul(&pw[k]);
                }
            }
            for (te, tc) in term.terms {
                out.add_term(te, tc);
            }
        }
        out
    }

    /// Integrates out `vars` against independent weights `exp(−λ_i (v_i − μ_i)²)`.
    /// The result lives in the remaining variables, order preserved.
    pub fn integrate_separable(&self, vars: &[usize], means: &[Real], lambdas: &[Real]) -> Poly {
        let kept: Vec<usize> = (0..self.nvars).filter(|i| !vars.contains(i)).collect();
        let tables: Vec<Vec<Real>> = vars
            .iter()
            .enumerate()
            .map(|(k, &v)| {
                let max = self.terms.keys().map(|e| e.0[v]).max().unwrap_or(0);
                shifted_moments(usize::from(max), means[k], lambdas[k])
            })
            .collect();
        let mut out = Poly::zero(kept.len());
        for (e, c) in &self.terms {
            let mut w = *c;
            for (k, &v) in vars.iter().enumerate() {
                w *= tables[k][usize::from(e.0[v])];
            }
            if w.hi() == 0.0 {
                continue;
            }
            let mut ne = [0u8; MAX_VARS];
            for (slot, &i) in kept.iter().enumerate() {
                ne[slot] = e.0[i];
            }
            out.add_term(Exponents(ne), w);
        }
        out
    }
}

/// ∫ y^k exp(−λ y²) dy.
pub(crate) fn gaussian_moment(k: usize, lambda: Real) -> Real {
    if k % 2 == 1 {
        return ZERO;
    }
    let mut m = (pi() / lambda).sqrt();
    let two_lambda = lambda * 2.0;
    let mut j = 1;
    while j < k {
        // multiply by (j)/(2λ) for j = 1, 3, 5, ...
        m = m * (j as f64) / two_lambda;
        j += 2;
    }
    m
}

/// ∫ (μ + y)^e exp(−λ y²) dy for e = 0..=max.
fn shifted_moments(max: usize, mu: Real, lambda: Real) -> Vec<Real> {
    let central: Vec<Real> = (0..=max).map(|k| gaussian_moment(k, lambda)).collect();
    let mut out = Vec::with_capacity(max + 1);
    for e in 0..=max {
        let mut acc = ZERO;
        let mut binom = ONE;
        // Σ_j C(e, j) μ^{e-j} γ_j
        for j in 0..=e {
            if j > 0 {
                binom = binom * ((e - j + 1) as f64) / (j as f64);
            }
            if j % 2 == 0 {
                acc += binom * mu.powi((e - j) as i32) * central[j];
            }
        }
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::{real, to_f64};

    fn e(x: [u8; 4]) -> Exponents {
        Exponents(x)
    }

    #[test]
    fn multiplication_convolves_exponents() {
        // (1 + x)(1 − x) = 1 − x²
        let a = Poly::linear(1, ONE, &[ONE]);
        let b = Poly::linear(1, ONE, &[-ONE]);
        let p = a.mul(&b);
        assert_eq!(p.len(), 2);
        assert_eq!(to_f64(p.coefficient(&e([2, 0, 0, 0]))), -1.0);
    }

    #[test]
    fn rotation_maps_x_to_p() {
        // old x = new p under a quarter-turn
        let x = Poly::monomial(2, e([1, 0, 0, 0]), ONE);
        let map = Matrix::from_f64(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let p = x.affine_substitute(&map, &[ZERO, ZERO]);
        assert_eq!(p.len(), 1);
        assert_eq!(to_f64(p.coefficient(&e([0, 1, 0, 0]))), 1.0);
    }

    #[test]
    fn gaussian_moments_match_gamma_values() {
        let sqrt_pi = libm::sqrt(core::f64::consts::PI);
        assert!((to_f64(gaussian_moment(0, ONE)) - sqrt_pi).abs() < 1e-15);
        assert!((to_f64(gaussian_moment(2, ONE)) - sqrt_pi / 2.0).abs() < 1e-15);
        assert!((to_f64(gaussian_moment(4, ONE)) - 0.75 * sqrt_pi).abs() < 1e-15);
        assert_eq!(to_f64(gaussian_moment(3, ONE)), 0.0);
    }

    #[test]
    fn separable_integration_of_shifted_square() {
        // ∫ x² e^{-(x-1)²} dx = √π (1 + 1/2)
        let p = Poly::monomial(1, e([2, 0, 0, 0]), ONE);
        let r = p.integrate_separable(&[0], &[ONE], &[ONE]);
        let want = 1.5 * libm::sqrt(core::f64::consts::PI);
        assert!((to_f64(r.coefficient(&Exponents::default())) - want).abs() < 1e-15);
    }

    #[test]
    fn eval_and_embedding_agree() {
        let p = Poly::linear(2, real(0.5), &[real(2.0), real(-3.0)]).mul(&Poly::linear(2, ONE, &[ONE, ONE]));
        let q = p.embedded(4, 2);
        let v2 = [real(0.3), real(-1.1)];
        let v4 = [real(9.0), real(9.0), real(0.3), real(-1.1)];
        assert_eq!(to_f64(p.eval(&v2)), to_f64(q.eval(&v4)));
    }
}
