//! Column-stacking vectorization and superoperator building blocks.
//!
//! `vec` stacks columns, so `vec(A rho B) = (B^T kron A) vec(rho)` and the
//! entry `rho[i, j]` lands at flat index `j * dim + i`.

use ndarray::{linalg::kron, Array1, Array2};

use crate::C64;

/// Stacks the columns of `rho` into a length `dim^2` vector.
pub fn vec_rho(rho: &Array2<C64>) -> Array1<C64> {
    let dim = rho.nrows();
    let mut v = Array1::zeros(dim * dim);
    for j in 0..dim {
        for i in 0..dim {
            v[j * dim + i] = rho[[i, j]];
        }
    }
    v
}

/// Inverse of [`vec_rho`]; panics unless the length is a perfect square.
pub fn unvec_rho(v: &Array1<C64>) -> Array2<C64> {
    let dim = (v.len() as f64).sqrt().round() as usize;
    assert_eq!(dim * dim, v.len(), "unvec_rho: length is not a square");
    let mut rho = Array2::zeros((dim, dim));
    for j in 0..dim {
        for i in 0..dim {
            rho[[i, j]] = v[j * dim + i];
        }
    }
    rho
}

/// Superoperator for left multiplication, `rho -> A rho`.
pub fn spre(a: &Array2<C64>) -> Array2<C64> {
    kron(&Array2::eye(a.nrows()), a)
}

/// Superoperator for right multiplication, `rho -> rho B`.
pub fn spost(b: &Array2<C64>) -> Array2<C64> {
    kron(&b.t().to_owned(), &Array2::eye(b.nrows()))
}

/// Superoperator for `rho -> A rho B`.
pub fn sandwich(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    kron(&b.t().to_owned(), a)
}

/// Unit-rate dissipator `rho -> 2 C rho C^+ - C^+ C rho - rho C^+ C`.
pub fn dissipator(c: &Array2<C64>) -> Array2<C64> {
    let c_dag = c.t().mapv(|z| z.conj());
    let cc = c_dag.dot(c);
    let mut d = sandwich(c, &c_dag);
    d.mapv_inplace(|z| z * 2.0);
    d - spre(&cc) - spost(&cc)
}

/// tr(R M) evaluated against the vectorized `M`; no conjugation is applied.
pub fn trace_against(r: &Array2<C64>, vec_m: ndarray::ArrayView1<C64>) -> C64 {
    let dim = r.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..dim {
        for j in 0..dim {
            acc += r[[i, j]] * vec_m[i * dim + j];
        }
    }
    acc
}

/// Trace of the matrix behind a vectorized density operator.
pub fn trace_of_vec(v: &Array1<C64>) -> C64 {
    let dim = (v.len() as f64).sqrt().round() as usize;
    (0..dim).map(|i| v[i * dim + i]).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{c64, cavity_annihilator};

    fn test_matrix(dim: usize, shift: f64) -> Array2<C64> {
        Array2::from_shape_fn((dim, dim), |(i, j)| {
            c64(
                (i as f64 + shift) * 0.3 - j as f64 * 0.1,
                i as f64 * 0.2 + (j as f64 - shift) * 0.7,
            )
        })
    }

    #[test]
    fn vec_roundtrip_and_trace() {
        let m = test_matrix(4, 0.5);
        let v = vec_rho(&m);
        assert_eq!(unvec_rho(&v), m);
        let tr: C64 = m.diag().sum();
        assert_eq!(trace_of_vec(&v), tr);
    }

    #[test]
    fn sandwich_matches_direct_product() {
        let dim = 3;
        let a = cavity_annihilator(dim - 1);
        let b = test_matrix(dim, 1.0);
        let rho = test_matrix(dim, 2.0);
        let direct = a.dot(&rho).dot(&b);
        let via_super = unvec_rho(&sandwich(&a, &b).dot(&vec_rho(&rho)));
        let err: f64 = (&direct - &via_super).iter().map(|z| z.norm()).sum();
        assert!(err < 1e-14);

        let left = unvec_rho(&spre(&a).dot(&vec_rho(&rho)));
        let right = unvec_rho(&spost(&b).dot(&vec_rho(&rho)));
        assert!((&left - &a.dot(&rho)).iter().map(|z| z.norm()).sum::<f64>() < 1e-14);
        assert!((&right - &rho.dot(&b)).iter().map(|z| z.norm()).sum::<f64>() < 1e-14);
    }

    #[test]
    fn dissipator_action() {
        let dim = 4;
        let c = cavity_annihilator(dim - 1);
        let c_dag = c.t().mapv(|z: C64| z.conj());
        let rho = {
            let m = test_matrix(dim, 0.0);
            // make it Hermitian so the direct formula is easy to eyeball
            (&m + &m.t().mapv(|z| z.conj())) * c64(0.5, 0.0)
        };
        let direct = c.dot(&rho).dot(&c_dag) * c64(2.0, 0.0)
            - c_dag.dot(&c).dot(&rho)
            - rho.dot(&c_dag).dot(&c);
        let via_super = unvec_rho(&dissipator(&c).dot(&vec_rho(&rho)));
        let err: f64 = (&direct - &via_super).iter().map(|z| z.norm()).sum();
        assert!(err < 1e-13);
    }

    #[test]
    fn trace_against_matches_product_trace() {
        let r = test_matrix(3, 0.7);
        let m = test_matrix(3, 1.3);
        let tr_direct: C64 = r.dot(&m).diag().sum();
        let tr_vec = trace_against(&r, vec_rho(&m).view());
        assert!((tr_direct - tr_vec).norm() < 1e-14);
    }
}
