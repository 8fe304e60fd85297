//! Functions of the form `poly(v) · exp(−(v − μ)ᵀ A (v − μ))` over the
//! phase-space variables `v = (x₁, p₁, …, x_m, p_m)`.
//!
//! Coherent and Fock Wigner functions are of this form, and the form is closed
//! under products, linear changes of variables and Gaussian integration over a
//! subset of variables. That is enough to push a coherent field through beam
//! splitters and photon-number measurements without any discretization.
//!
//! The polynomial is stored in absolute coordinates. Arithmetic is carried in
//! double-double precision; the public surface speaks `f64`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::poly::{Exponents, Poly, MAX_VARS};
use crate::real::{real, to_f64, Real, ZERO};

/// Coefficients at or below this fraction of the largest one are dropped after
/// products and substitutions. It sits at the double-double noise floor.
pub const PRUNE_RELATIVE: f64 = 1e-30;

const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Maximum number of modes a state may span.
pub const MAX_MODES: usize = MAX_VARS / 2;

#[derive(Clone, Debug, PartialEq)]
pub struct GaussPolyState {
    modes: usize,
    poly: Poly,
    mean: Vec<Real>,
    precision: Matrix,
}

impl GaussPolyState {
    /// Builds a state from explicit parts.
    ///
    /// `terms` lists `(exponents, coefficient)` with one exponent per variable,
    /// `precision` is the row-major `2m × 2m` matrix `A`. The precision must be
    /// symmetric and positive semidefinite; integration additionally requires
    /// it to be definite.
    pub fn new(modes: usize, terms: &[(&[u8], f64)], mean: &[f64], precision: &[f64]) -> Result<Self> {
        check_modes(modes)?;
        let n = 2 * modes;
        if mean.len() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: mean.len() });
        }
        if precision.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, actual: precision.len() });
        }
        let mut poly = Poly::zero(n);
        for (exps, c) in terms {
            if exps.len() != n {
                return Err(Error::DimensionMismatch { expected: n, actual: exps.len() });
            }
            let mut e = [0u8; MAX_VARS];
            e[..n].copy_from_slice(exps);
            poly.add_term(Exponents(e), real(*c));
        }
        let precision = Matrix::from_f64(n, n, precision);
        if !precision.is_symmetric(SYMMETRY_TOLERANCE) {
            return Err(Error::AsymmetricPrecision);
        }
        let (vals, _) = precision.symmetric_eigen();
        let scale = precision.max_abs().hi().max(1.0);
        if vals.iter().any(|v| v.hi() < -1e-12 * scale) {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(Self { modes, poly, mean: mean.iter().map(|&m| real(m)).collect(), precision: precision.symmetrized() })
    }

    /// The constant function `c` over `modes` modes (zero precision).
    pub fn constant(modes: usize, c: f64) -> Result<Self> {
        check_modes(modes)?;
        let n = 2 * modes;
        Ok(Self::from_parts(modes, Poly::constant(n, real(c)), alloc::vec![ZERO; n], Matrix::zeros(n, n)))
    }

    pub(crate) fn from_parts(modes: usize, poly: Poly, mean: Vec<Real>, precision: Matrix) -> Self {
        debug_assert_eq!(poly.nvars(), 2 * modes);
        debug_assert_eq!(mean.len(), 2 * modes);
        Self { modes, poly, mean, precision }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn nvars(&self) -> usize {
        2 * self.modes
    }

    pub fn mean(&self) -> Vec<f64> {
        self.mean.iter().map(|&m| to_f64(m)).collect()
    }

    /// Row-major precision matrix.
    pub fn precision(&self) -> Vec<f64> {
        let n = self.nvars();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(to_f64(self.precision[(i, j)]));
            }
        }
        out
    }

    /// Polynomial terms as `(exponents, coefficient)`; exponents beyond
    /// [`Self::nvars`] are zero.
    pub fn terms(&self) -> Vec<([u8; MAX_VARS], f64)> {
        self.poly.terms().map(|(e, c)| (e.0, to_f64(*c))).collect()
    }

    pub fn term_count(&self) -> usize {
        self.poly.len()
    }

    /// Total degree of the polynomial factor.
    pub fn degree(&self) -> u32 {
        self.poly.degree()
    }

    /// Largest coefficient difference against a state with the same Gaussian
    /// envelope, or `None` when the envelopes differ beyond `envelope_tol`.
    pub fn coefficient_distance(&self, other: &Self, envelope_tol: f64) -> Option<f64> {
        if self.modes != other.modes {
            return None;
        }
        let mean_ok = self.mean.iter().zip(&other.mean).all(|(a, b)| (*a - *b).abs().hi() <= envelope_tol);
        let n = self.nvars();
        let prec_ok = (0..n)
            .all(|i| (0..n).all(|j| (self.precision[(i, j)] - other.precision[(i, j)]).abs().hi() <= envelope_tol));
        if !(mean_ok && prec_ok) {
            return None;
        }
        let diff = self.poly.add(&other.poly.clone().scaled(real(-1.0)));
        Some(diff.max_abs().hi())
    }

    pub(crate) fn scaled(&self, c: Real) -> Self {
        Self { poly: self.poly.clone().scaled(c), ..self.clone() }
    }

    /// Pointwise product.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.modes != other.modes {
            return Err(Error::ModeMismatch { left: self.modes, right: other.modes });
        }
        let a = &self.precision;
        let b = &other.precision;
        let c = a.add(b).symmetrized();
        let am = a.mul_vec(&self.mean);
        let bm = b.mul_vec(&other.mean);
        let w: Vec<Real> = am.iter().zip(&bm).map(|(x, y)| *x + *y).collect();
        let (mean, offset) = if c.is_zero() {
            (alloc::vec![ZERO; self.nvars()], ZERO)
        } else {
            let inv = c.inverse().ok_or(Error::NotPositiveDefinite)?;
            let mean = inv.mul_vec(&w);
            let offset = a.quadratic_form(&self.mean) + b.quadratic_form(&other.mean) - dot(&w, &mean);
            (mean, offset)
        };
        let poly = self.poly.mul(&other.poly).scaled((-offset).exp()).pruned(PRUNE_RELATIVE);
        Ok(Self::from_parts(self.modes, poly, mean, c.pruned(PRUNE_RELATIVE)))
    }

    /// Product state `self ⊗ other` with `self` on the leading modes.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let modes = self.modes + other.modes;
        check_modes(modes)?;
        let n = 2 * modes;
        let na = self.nvars();
        let poly = self.poly.embedded(n, 0).mul(&other.poly.embedded(n, na)).pruned(PRUNE_RELATIVE);
        let mut mean = self.mean.clone();
        mean.extend_from_slice(&other.mean);
        let precision = Matrix::from_fn(n, n, |i, j| match (i < na, j < na) {
            (true, true) => self.precision[(i, j)],
            (false, false) => other.precision[(i - na, j - na)],
            _ => ZERO,
        });
        Ok(Self::from_parts(modes, poly, mean, precision))
    }

    /// Lifts a single-mode function onto mode `at` of a `modes`-mode space,
    /// constant along the other modes.
    pub fn embed(&self, modes: usize, at: usize) -> Result<Self> {
        check_modes(modes)?;
        if at + self.modes > modes {
            return Err(Error::InvalidModeSelection);
        }
        let n = 2 * modes;
        let first = 2 * at;
        let k = self.nvars();
        let mut mean = alloc::vec![ZERO; n];
        mean[first..first + k].copy_from_slice(&self.mean);
        let precision = Matrix::from_fn(n, n, |i, j| {
            if (first..first + k).contains(&i) && (first..first + k).contains(&j) {
                self.precision[(i - first, j - first)]
            } else {
                ZERO
            }
        });
        Ok(Self::from_parts(modes, self.poly.embedded(n, first), mean, precision))
    }

    /// The function `v ↦ self(L·v)` for a row-major invertible `L`.
    pub fn substitute_linear(&self, l: &[f64]) -> Result<Self> {
        let n = self.nvars();
        if l.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, actual: l.len() });
        }
        self.substitute_linear_real(&Matrix::from_f64(n, n, l))
    }

    pub(crate) fn substitute_linear_real(&self, l: &Matrix) -> Result<Self> {
        let n = self.nvars();
        let inv = l.inverse().ok_or(Error::SingularMap)?;
        let poly = self.poly.affine_substitute(l, &alloc::vec![ZERO; n]).pruned(PRUNE_RELATIVE);
        let mean = inv.mul_vec(&self.mean);
        let precision = l.transpose().mul(&self.precision).mul(l).symmetrized().pruned(PRUNE_RELATIVE);
        Ok(Self::from_parts(self.modes, poly, mean, precision))
    }

    /// ∫ self dv over all variables.
    pub fn integrate_all(&self) -> Result<f64> {
        self.integrate_all_real().map(to_f64)
    }

    pub(crate) fn integrate_all_real(&self) -> Result<Real> {
        let all: Vec<usize> = (0..self.nvars()).collect();
        let (poly, _, _) = self.integrate_vars(&all)?;
        Ok(poly.coefficient(&Exponents::default()))
    }

    /// Integrates out every mode not listed in `keep` (0-based mode indices).
    pub fn integrate_modes(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() || keep.len() >= self.modes || keep.iter().any(|&k| k >= self.modes) {
            return Err(Error::InvalidModeSelection);
        }
        let vars: Vec<usize> = (0..self.modes).filter(|m| !keep.contains(m)).flat_map(|m| [2 * m, 2 * m + 1]).collect();
        let (poly, mean, precision) = self.integrate_vars(&vars)?;
        Ok(Self::from_parts(keep.len(), poly, mean, precision))
    }

    /// Core partial integration. Completes the square in `vars`, rotates them to
    /// principal axes and applies 1-D Gaussian moments.
    fn integrate_vars(&self, vars: &[usize]) -> Result<(Poly, Vec<Real>, Matrix)> {
        let n = self.nvars();
        let kept: Vec<usize> = (0..n).filter(|i| !vars.contains(i)).collect();
        let a_uu = self.precision.select(vars, vars);
        let a_uk = self.precision.select(vars, &kept);
        let a_kk = self.precision.select(&kept, &kept);
        let (lambdas, axes) = a_uu.symmetric_eigen();
        let scale = a_uu.max_abs().hi();
        if scale == 0.0 || lambdas.iter().any(|l| l.hi() <= 1e-13 * scale) {
            return Err(Error::NotPositiveDefinite);
        }
        let uu_inv = Matrix::from_fn(vars.len(), vars.len(), |i, j| {
            let mut acc = ZERO;
            for (c, l) in lambdas.iter().enumerate() {
                acc += axes[(i, c)] * axes[(j, c)] / *l;
            }
            acc
        });
        // v_u = μ_u + M (v_k − μ_k) + axes·y
        let shift = uu_inv.mul(&a_uk);
        let m = Matrix::from_fn(shift.rows(), shift.cols(), |i, j| -shift[(i, j)]);
        let m_scale = m.max_abs().hi().max(1.0);
        let m = m.pruned_below(PRUNE_RELATIVE * m_scale);
        let schur = a_kk.add(&a_uk.transpose().mul(&m)).symmetrized().pruned(PRUNE_RELATIVE);
        if !kept.is_empty() {
            let (svals, _) = schur.symmetric_eigen();
            let s_scale = schur.max_abs().hi();
            if s_scale == 0.0 || svals.iter().any(|l| l.hi() <= 1e-13 * s_scale) {
                return Err(Error::NotPositiveDefinite);
            }
        }
        let mean_u: Vec<Real> = vars.iter().map(|&i| self.mean[i]).collect();
        let mean_k: Vec<Real> = kept.iter().map(|&i| self.mean[i]).collect();

        let poly = if m.is_zero() && a_uu.is_diagonal() {
            let diag: Vec<Real> = (0..vars.len()).map(|i| a_uu[(i, i)]).collect();
            self.poly.integrate_separable(vars, &mean_u, &diag)
        } else {
            let nk = kept.len();
            let nu = vars.len();
            let new_vars = nk + nu;
            let mut map = Matrix::zeros(n, new_vars);
            let mut offset = alloc::vec![ZERO; n];
            for (a, &k) in kept.iter().enumerate() {
                map[(k, a)] = real(1.0);
            }
            let m_mu = m.mul_vec(&mean_k);
            for (b, &u) in vars.iter().enumerate() {
                offset[u] = mean_u[b] - m_mu[b];
                for a in 0..nk {
                    map[(u, a)] = m[(b, a)];
                }
                for c in 0..nu {
                    map[(u, nk + c)] = axes[(b, c)];
                }
            }
            let rotated = self.poly.affine_substitute(&map, &offset).pruned(PRUNE_RELATIVE);
            let ys: Vec<usize> = (nk..new_vars).collect();
            rotated.integrate_separable(&ys, &alloc::vec![ZERO; nu], &lambdas)
        };
        Ok((poly.pruned(PRUNE_RELATIVE), mean_k, schur))
    }

    /// Pointwise value at `v`.
    pub fn evaluate(&self, v: &[f64]) -> Result<f64> {
        if v.len() != self.nvars() {
            return Err(Error::DimensionMismatch { expected: self.nvars(), actual: v.len() });
        }
        let v: Vec<Real> = v.iter().map(|&x| real(x)).collect();
        Ok(to_f64(self.evaluate_real(&v)))
    }

    pub(crate) fn evaluate_real(&self, v: &[Real]) -> Real {
        let d: Vec<Real> = v.iter().zip(&self.mean).map(|(x, m)| *x - *m).collect();
        self.poly.eval(v) * (-self.precision.quadratic_form(&d)).exp()
    }

    /// ∫ Π vᵢ^{eᵢ} · self dv.
    pub fn moment(&self, exponents: &[u8]) -> Result<f64> {
        self.moment_real(exponents).map(to_f64)
    }

    pub(crate) fn moment_real(&self, exponents: &[u8]) -> Result<Real> {
        let n = self.nvars();
        if exponents.len() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: exponents.len() });
        }
        let mut e = [0u8; MAX_VARS];
        e[..n].copy_from_slice(exponents);
        let weighted = Self { poly: self.poly.mul(&Poly::monomial(n, Exponents(e), real(1.0))), ..self.clone() };
        weighted.integrate_all_real()
    }
}

fn check_modes(modes: usize) -> Result<()> {
    if modes == 0 || modes > MAX_MODES {
        Err(Error::UnsupportedModes(modes))
    } else {
        Ok(())
    }
}

fn dot(a: &[Real], b: &[Real]) -> Real {
    a.iter().zip(b).fold(ZERO, |acc, (x, y)| acc + *x * *y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::{pi, ONE};
    use core::f64::consts::PI;

    fn vacuum() -> GaussPolyState {
        GaussPolyState::new(1, &[(&[0, 0], 1.0 / PI)], &[0.0, 0.0], &[1.0, 0.0, 0.0, 1.0]).unwrap()
    }

    fn gaussian_at(x: f64) -> GaussPolyState {
        GaussPolyState::new(1, &[(&[0, 0], 1.0)], &[x, 0.0], &[1.0, 0.0, 0.0, 1.0]).unwrap()
    }

    #[test]
    fn multiplying_by_constant_one_is_identity() {
        let one = GaussPolyState::constant(1, 1.0).unwrap();
        let v = vacuum();
        let prod = v.multiply(&one).unwrap();
        assert_eq!(prod.coefficient_distance(&v, 0.0), Some(0.0));
    }

    #[test]
    fn product_of_vacua_at_origin() {
        let sq = vacuum().multiply(&vacuum()).unwrap();
        let val = sq.evaluate(&[0.0, 0.0]).unwrap();
        assert!((val - 1.0 / (PI * PI)).abs() < 1e-15);
    }

    #[test]
    fn product_of_opposite_gaussians_completes_the_square() {
        // e^{-(x-1)^2} e^{-(x+1)^2} = e^{-2} e^{-2x^2}
        let prod = gaussian_at(1.0).multiply(&gaussian_at(-1.0)).unwrap();
        assert_eq!(prod.mean(), vec![0.0, 0.0]);
        assert_eq!(prod.precision(), vec![2.0, 0.0, 0.0, 2.0]);
        let terms = prod.terms();
        assert_eq!(terms.len(), 1);
        assert!((terms[0].1 - (-2.0f64).exp()).abs() < 1e-16);
    }

    #[test]
    fn identity_substitution_is_noop() {
        let v = gaussian_at(0.7);
        let s = v.substitute_linear(&[1.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(s.coefficient_distance(&v, 0.0), Some(0.0));
    }

    #[test]
    fn singular_substitution_is_rejected() {
        let err = vacuum().substitute_linear(&[1.0, 1.0, 1.0, 1.0]).unwrap_err();
        assert_eq!(err, Error::SingularMap);
    }

    #[test]
    fn quarter_turn_maps_x_monomial_to_p() {
        let s = GaussPolyState::new(1, &[(&[1, 0], 1.0)], &[0.0, 0.0], &[1.0, 0.0, 0.0, 1.0]).unwrap();
        // (x, p) -> (p, -x): x∘L = p
        let r = s.substitute_linear(&[0.0, 1.0, -1.0, 0.0]).unwrap();
        let terms = r.terms();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].0, [0, 1, 0, 0]);
        assert_eq!(terms[0].1, 1.0);
    }

    #[test]
    fn second_moment_of_gaussian() {
        // ∫ x² e^{-x²-p²}/π = 1/2
        let s = GaussPolyState::new(1, &[(&[2, 0], 1.0 / PI)], &[0.0, 0.0], &[1.0, 0.0, 0.0, 1.0]).unwrap();
        assert!((s.integrate_all().unwrap() - 0.5).abs() < 1e-15);
        assert!((vacuum().moment(&[2, 0]).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(vacuum().moment(&[0, 0]).unwrap(), vacuum().integrate_all().unwrap());
    }

    #[test]
    fn correlated_precision_integrates_exactly() {
        // ∫ exp(-vᵀAv) = π / √det A for 2×2 A
        let s = GaussPolyState::new(1, &[(&[0, 0], 1.0)], &[0.3, -0.2], &[2.0, 0.5, 0.5, 1.0]).unwrap();
        let want = PI / (2.0f64 - 0.25).sqrt();
        assert!((s.integrate_all().unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn errors_on_bad_inputs() {
        assert_eq!(vacuum().evaluate(&[0.0]).unwrap_err(), Error::DimensionMismatch { expected: 2, actual: 1 });
        let two = vacuum().tensor(&vacuum()).unwrap();
        assert!(matches!(vacuum().multiply(&two), Err(Error::ModeMismatch { .. })));
        assert_eq!(two.integrate_modes(&[]).unwrap_err(), Error::InvalidModeSelection);
        assert_eq!(two.integrate_modes(&[0, 1]).unwrap_err(), Error::InvalidModeSelection);
        let flat = GaussPolyState::constant(1, 1.0).unwrap();
        assert_eq!(flat.integrate_all().unwrap_err(), Error::NotPositiveDefinite);
        assert!(GaussPolyState::new(1, &[], &[0.0, 0.0], &[1.0, 0.2, 0.0, 1.0]).is_err());
        assert_eq!(GaussPolyState::constant(3, 1.0).unwrap_err(), Error::UnsupportedModes(3));
    }

    #[test]
    fn marginal_of_product_state() {
        let a = gaussian_at(0.4).scaled(real(1.0 / PI));
        let b = gaussian_at(0.0).scaled(ONE / pi());
        let m = a.tensor(&b).unwrap().integrate_modes(&[0]).unwrap();
        let d = m.coefficient_distance(&a, 1e-30).unwrap();
        assert!(d < 1e-30);
    }

    #[test]
    fn general_path_matches_separable_path() {
        // A correlated two-mode Gaussian forces the rotated-substitution branch.
        let s = GaussPolyState::new(
            2,
            &[(&[0, 0, 0, 0], 1.0), (&[1, 0, 2, 0], 0.5), (&[0, 1, 0, 1], -0.25)],
            &[0.2, -0.1, 0.3, 0.4],
            &[
                1.0, 0.1, 0.2, 0.0, //
                0.1, 1.5, 0.0, 0.3, //
                0.2, 0.0, 2.0, 0.1, //
                0.0, 0.3, 0.1, 1.2,
            ],
        )
        .unwrap();
        let total = s.integrate_all().unwrap();
        let via_marginal = s.integrate_modes(&[0]).unwrap().integrate_all().unwrap();
        assert!((total - via_marginal).abs() < 1e-14);
        let via_other = s.integrate_modes(&[1]).unwrap().integrate_all().unwrap();
        assert!((total - via_other).abs() < 1e-14);
    }
}
