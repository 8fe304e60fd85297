//! Laguerre polynomials by the three-term recurrence
//! `(k + 1) L_{k+1}(x) = (2k + 1 − x) L_k(x) − k L_{k−1}(x)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::real::{real, Real, ONE, ZERO};

/// Power-basis coefficients of `L_n`, lowest order first.
pub(crate) fn laguerre_coefficients_real(n: u32) -> Vec<Real> {
    let n = n as usize;
    let mut prev = vec![ONE];
    if n == 0 {
        return prev;
    }
    let mut cur = vec![ONE, -ONE];
    for k in 1..n {
        let mut next = vec![ZERO; k + 2];
        for (i, &c) in cur.iter().enumerate() {
            next[i] += c * ((2 * k + 1) as f64);
            next[i + 1] -= c;
        }
        for (i, &c) in prev.iter().enumerate() {
            next[i] -= c * (k as f64);
        }
        let inv = ONE / real((k + 1) as f64);
        for c in &mut next {
            *c *= inv;
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// Power-basis coefficients of `L_n`, lowest order first.
pub fn laguerre_coefficients(n: u32) -> Vec<f64> {
    laguerre_coefficients_real(n).into_iter().map(crate::real::to_f64).collect()
}

/// `L_n(x)`.
pub fn laguerre(n: u32, x: f64) -> f64 {
    laguerre_coefficients(n).iter().rev().fold(0.0, |acc, &c| acc * x + c)
}
