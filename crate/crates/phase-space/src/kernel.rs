//! Exact Fock-basis matrix elements of the displacement operator and of the
//! displaced parity kernel.
//!
//! The elements are those of the infinite-dimensional operator restricted to
//! the kept block. For a state supported on the kept block the trace against
//! these elements is exact, which is why the quasiprobability evaluation
//! prefers this route over exponentiating a truncated generator.

use ndarray::Array2;
use operator_core::{c64, C64};

/// `<m| D(beta) |n>` for `m, n < dim`, with `D(beta) = exp(beta a^+ - beta* a)`.
///
/// Built per diagonal from the associated-Laguerre recurrence, so the cost is
/// one pass over the matrix.
pub fn displacement(beta: C64, dim: usize) -> Array2<C64> {
    let x = beta.norm_sqr();
    let pref = (-0.5 * x).exp();
    let mut d = Array2::zeros((dim, dim));
    for k in 0..dim {
        let below = beta.powu(k as u32) * pref;
        let above = (-beta.conj()).powu(k as u32) * pref;
        // ratio carries sqrt(n!/(n+k)!) along the diagonal
        let mut ratio = (1..=k).map(|j| 1.0 / (j as f64).sqrt()).product::<f64>();
        let mut lag_prev = 0.0;
        let mut lag = 1.0;
        for n in 0..dim - k {
            if n > 0 {
                ratio *= (n as f64 / (n + k) as f64).sqrt();
                let a = (2 * n - 1 + k) as f64 - x;
                let next = (a * lag - (n - 1 + k) as f64 * lag_prev) / n as f64;
                lag_prev = lag;
                lag = next;
            }
            d[[n + k, n]] = below * ratio * lag;
            d[[n, n + k]] = above * ratio * lag;
        }
    }
    d
}

/// Displaced parity `D(2 alpha) P`, the Hermitian kernel whose trace against
/// the cavity state gives `(pi/2) W(alpha)`.
pub fn displaced_parity(alpha: C64, dim: usize) -> Array2<C64> {
    let mut k = displacement(2.0 * alpha, dim);
    for n in (1..dim).step_by(2) {
        k.column_mut(n).mapv_inplace(|z| -z);
    }
    k
}

/// `tr(rho k)` by direct index contraction, avoiding a matrix product.
pub fn trace_product(rho: &Array2<C64>, k: &Array2<C64>) -> C64 {
    let dim = rho.nrows();
    let mut acc = c64(0.0, 0.0);
    for n in 0..dim {
        for m in 0..dim {
            acc += rho[[n, m]] * k[[m, n]];
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_displacement_is_the_identity() {
        let d = displacement(c64(0.0, 0.0), 6);
        for i in 0..6 {
            for j in 0..6 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((d[[i, j]] - expect).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn vacuum_column_is_a_coherent_state() {
        let beta = c64(0.7, -0.4);
        let d = displacement(beta, 12);
        let mut amp = c64((-0.5 * beta.norm_sqr()).exp(), 0.0);
        for m in 0..12 {
            assert!(
                (d[[m, 0]] - amp).norm() < 1e-13,
                "element {m}: {} vs {amp}",
                d[[m, 0]]
            );
            amp *= beta / ((m + 1) as f64).sqrt();
        }
    }

    #[test]
    fn conjugate_transpose_flips_the_argument() {
        let beta = c64(-0.3, 0.9);
        let d = displacement(beta, 9);
        let dinv = displacement(-beta, 9);
        for i in 0..9 {
            for j in 0..9 {
                assert!((d[[i, j]].conj() - dinv[[j, i]]).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn truncated_composition_stays_unitary_deep_inside_the_block() {
        let beta = c64(0.2, 0.1);
        let d = displacement(beta, 20);
        let dinv = displacement(-beta, 20);
        let prod = d.dot(&dinv);
        // leakage only matters near the truncation edge, so the low block
        // of D(b) D(-b) must still look like the identity
        for i in 0..10 {
            for j in 0..10 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (prod[[i, j]] - expect).norm() < 1e-8,
                    "({i},{j}): {}",
                    prod[[i, j]]
                );
            }
        }
    }

    #[test]
    fn displaced_parity_is_hermitian_and_counts_parity_at_zero() {
        let k0 = displaced_parity(c64(0.0, 0.0), 7);
        for n in 0..7 {
            let expect = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((k0[[n, n]] - expect).norm() < 1e-15);
        }
        let k = displaced_parity(c64(0.4, -0.6), 10);
        for i in 0..10 {
            for j in 0..10 {
                assert!((k[[i, j]] - k[[j, i]].conj()).norm() < 1e-13);
            }
        }
    }
}
