//! Dense matrix exponential by Pade approximation with scaling and squaring.
//!
//! Fixed [13/13] Pade with the standard overscaling threshold; the cost is a
//! handful of matrix products plus one LU solve, so it stays cheap for the
//! step generators (30 x 30) and acceptable for the full superoperator
//! (900 x 900) where it backs up the spectral route.

use ndarray::Array2;
use ndarray_linalg::Inverse;
use operator_core::C64;

/// Magnitude bound under which the [13/13] approximant is accurate to machine
/// precision; inputs with larger 1-norm are halved until they fit.
const THETA_13: f64 = 5.371920351148152;

const B: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

fn one_norm(a: &Array2<C64>) -> f64 {
    let mut worst = 0.0f64;
    for col in a.columns() {
        worst = worst.max(col.iter().map(|z| z.norm()).sum());
    }
    worst
}

/// e^A for a square complex matrix.
pub fn expm(a: &Array2<C64>) -> Array2<C64> {
    assert!(a.is_square(), "expm: matrix must be square");
    let dim = a.nrows();
    let norm = one_norm(a);
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.mapv(|z| z / 2f64.powi(s as i32));

    let eye: Array2<C64> = Array2::eye(dim);
    let a2 = scaled.dot(&scaled);
    let a4 = a2.dot(&a2);
    let a6 = a2.dot(&a4);

    let w1 = &a6 * B[13] + &a4 * B[11] + &a2 * B[9];
    let w2 = &a6 * B[7] + &a4 * B[5] + &a2 * B[3] + &eye * B[1];
    let u = scaled.dot(&(a6.dot(&w1) + w2));
    let z1 = &a6 * B[12] + &a4 * B[10] + &a2 * B[8];
    let v = a6.dot(&z1) + &a6 * B[6] + &a4 * B[4] + &a2 * B[2] + &eye * B[0];

    let denom = (&v - &u).inv().expect("expm: Pade denominator singular");
    let mut x = denom.dot(&(&v + &u));
    for _ in 0..s {
        x = x.dot(&x);
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use operator_core::{c64, cavity_annihilator};

    fn close(a: &Array2<C64>, b: &Array2<C64>, tol: f64) -> bool {
        (a - b).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() <= tol
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let z: Array2<C64> = Array2::zeros((5, 5));
        assert!(close(&expm(&z), &Array2::eye(5), 1e-15));
    }

    #[test]
    fn diagonal_matrix_exponentiates_entrywise() {
        let mut d = Array2::zeros((3, 3));
        d[[0, 0]] = c64(-2.0, 0.0);
        d[[1, 1]] = c64(0.5, 3.0);
        d[[2, 2]] = c64(0.0, -40.0); // forces several squaring steps
        let e = expm(&d);
        for i in 0..3 {
            let expect = d[[i, i]].exp();
            assert!((e[[i, i]] - expect).norm() < 1e-13 * expect.norm().max(1.0));
        }
        assert!(e[[0, 1]].norm() < 1e-14);
    }

    #[test]
    fn nilpotent_series_terminates() {
        let mut n = Array2::zeros((2, 2));
        n[[0, 1]] = c64(3.0, 0.0);
        let e = expm(&n);
        let mut expect: Array2<C64> = Array2::eye(2);
        expect[[0, 1]] = c64(3.0, 0.0);
        assert!(close(&e, &expect, 1e-15));
    }

    #[test]
    fn skew_hermitian_gives_unitary() {
        let a = cavity_annihilator(7);
        let x = &a + &a.t().mapv(|z: C64| z.conj());
        let gen = x.mapv(|z| z * c64(0.0, -2.7)); // -i t H with H Hermitian
        let u = expm(&gen);
        let udag_u = u.t().mapv(|z| z.conj()).dot(&u);
        assert!(close(&udag_u, &Array2::eye(8), 1e-12));
    }

    #[test]
    fn group_property() {
        let a = cavity_annihilator(5);
        let h = &a + &a.t().mapv(|z: C64| z.conj());
        let gen = h.mapv(|z| z * c64(-0.4, 1.1));
        let one = expm(&gen);
        let double = expm(&gen.mapv(|z| z * 2.0));
        assert!(close(&one.dot(&one), &double, 1e-11));
    }
}
