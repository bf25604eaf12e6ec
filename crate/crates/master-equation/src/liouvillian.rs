//! Lindblad generator for the driven Jaynes-Cummings system.

use ndarray::Array2;
use operator_core::{
    build_cavity_ops, build_jc_hamiltonian, number_op, sigma_minus, sigma_plus,
    superop::{dissipator, sandwich, spost, spre, unvec_rho, vec_rho},
    C64, OperatorMatrix, SystemParams,
};

/// Operators reused across one parameter set, built once.
#[derive(Debug, Clone)]
pub struct JcOps {
    pub a: OperatorMatrix,
    pub a_dag: OperatorMatrix,
    pub sm: OperatorMatrix,
    pub sp: OperatorMatrix,
    pub n_op: OperatorMatrix,
    pub h: OperatorMatrix,
}

impl JcOps {
    pub fn build(p: &SystemParams) -> Self {
        let (a, a_dag) = build_cavity_ops(p.n_max).expect("params validated");
        Self {
            a,
            a_dag,
            sm: sigma_minus(p.n_max),
            sp: sigma_plus(p.n_max),
            n_op: number_op(p.n_max),
            h: build_jc_hamiltonian(p),
        }
    }
}

/// Monitored output channels: cavity transmission or atomic side scattering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmissionChannel {
    Forward,
    Side,
}

/// Vectorized Lindblad generator,
/// `d rho/dt = -i[H, rho] + kappa D[a] rho + (gamma/2) D[sigma_-] rho`
/// with `D[c] rho = 2 c rho c^+ - c^+ c rho - rho c^+ c`.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    /// Superoperator matrix of side `dim()^2`, acting on column-stacked rho.
    pub mat: Array2<C64>,
    pub params: SystemParams,
}

/// Generic Lindblad generator from a Hamiltonian and weighted jump operators;
/// each entry of `jumps` contributes `rate * D[c]`.
pub fn lindblad_matrix(h: &Array2<C64>, jumps: &[(f64, Array2<C64>)]) -> Array2<C64> {
    let mut l = (spre(h) - spost(h)) * C64::new(0.0, -1.0);
    for (rate, c) in jumps {
        l += &(dissipator(c) * C64::new(*rate, 0.0));
    }
    l
}

pub fn build_liouvillian(p: &SystemParams) -> Liouvillian {
    Liouvillian::build(p)
}

impl Liouvillian {
    pub fn build(p: &SystemParams) -> Self {
        let ops = JcOps::build(p);
        let mat = lindblad_matrix(
            &ops.h.mat,
            &[
                (p.kappa, ops.a.mat.clone()),
                (p.gamma / 2.0, ops.sm.mat.clone()),
            ],
        );
        Self {
            mat,
            params: p.clone(),
        }
    }

    /// Hilbert-space dimension D; the matrix has side D^2.
    pub fn dim(&self) -> usize {
        self.params.dim()
    }

    /// Action on a density matrix, for tests and step propagation.
    pub fn apply(&self, rho: &Array2<C64>) -> Array2<C64> {
        unvec_rho(&self.mat.dot(&vec_rho(rho)))
    }

    /// Largest column sum against the trace functional. The trace row is a
    /// left null vector of any Lindblad generator, so this measures assembly
    /// error only.
    pub fn trace_annihilation_residual(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for c in 0..d * d {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..d {
                acc += self.mat[[i * d + i, c]];
            }
            worst = worst.max(acc.norm());
        }
        worst
    }

    /// Generator with one recycling term removed, `L - J_channel`, whose decay
    /// gives the no-count evolution between detections on that channel.
    pub fn without_feeding(&self, channel: EmissionChannel) -> Array2<C64> {
        let ops = JcOps::build(&self.params);
        let (rate, c, c_dag) = match channel {
            EmissionChannel::Forward => (2.0 * self.params.kappa, &ops.a, &ops.a_dag),
            EmissionChannel::Side => (self.params.gamma, &ops.sm, &ops.sp),
        };
        &self.mat - &(sandwich(&c.mat, &c_dag.mat) * C64::new(rate, 0.0))
    }

    /// Collapse superoperator `J rho = rate * c rho c^+` for one channel.
    pub fn feeding_rate(&self, channel: EmissionChannel) -> f64 {
        match channel {
            EmissionChannel::Forward => 2.0 * self.params.kappa,
            EmissionChannel::Side => self.params.gamma,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array1;
    use operator_core::c64;

    fn sample_params() -> SystemParams {
        SystemParams::impedance_matched(20.0, 1.0, 1.6, -14.3, 6).unwrap()
    }

    /// Deterministic Hermitian unit-trace matrix, mixed enough to probe all
    /// blocks of the generator.
    fn probe_rho(dim: usize, seed: u64) -> Array2<C64> {
        let mut m = Array2::zeros((dim, dim));
        let mut x = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = || {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (x >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for i in 0..dim {
            for j in 0..dim {
                m[[i, j]] = c64(next(), next());
            }
        }
        let herm = (&m + &m.t().mapv(|z: C64| z.conj())).mapv(|z| z * 0.5);
        let sq = herm.dot(&herm); // PSD by construction
        let tr: C64 = sq.diag().sum();
        sq.mapv(|z| z / tr.re)
    }

    #[test]
    fn generator_matches_direct_lindblad_action() {
        let p = sample_params();
        let l = Liouvillian::build(&p);
        let ops = JcOps::build(&p);
        let rho = probe_rho(p.dim(), 7);

        let comm = ops.h.mat.dot(&rho) - rho.dot(&ops.h.mat);
        let diss = |c: &Array2<C64>, r: f64| {
            let cd = c.t().mapv(|z: C64| z.conj());
            let cc = cd.dot(c);
            (c.dot(&rho).dot(&cd) * c64(2.0, 0.0) - cc.dot(&rho) - rho.dot(&cc)) * c64(r, 0.0)
        };
        let direct =
            comm * c64(0.0, -1.0) + diss(&ops.a.mat, p.kappa) + diss(&ops.sm.mat, p.gamma / 2.0);
        let via_super = l.apply(&rho);
        let err: f64 = (&direct - &via_super).iter().map(|z| z.norm()).sum();
        assert!(err < 1e-10, "direct vs vectorized action differ by {err}");
    }

    #[test]
    fn trace_row_is_left_null_vector() {
        let l = Liouvillian::build(&sample_params());
        assert!(l.trace_annihilation_residual() < 1e-10);
    }

    #[test]
    fn trace_preserved_on_random_states() {
        let p = sample_params();
        let l = Liouvillian::build(&p);
        for seed in 0..20 {
            let rho = probe_rho(p.dim(), seed);
            let drho = l.apply(&rho);
            let tr: C64 = drho.diag().sum();
            assert!(tr.norm() < 1e-10, "tr(L rho) = {tr} at seed {seed}");
        }
    }

    #[test]
    fn without_feeding_removes_only_recycling() {
        let p = sample_params();
        let l = Liouvillian::build(&p);
        let ops = JcOps::build(&p);
        let rho = probe_rho(p.dim(), 3);
        let lbar = l.without_feeding(EmissionChannel::Forward);
        let v: Array1<C64> = operator_core::superop::vec_rho(&rho);
        let diff = unvec_rho(&(l.mat.dot(&v) - lbar.dot(&v)));
        let recycle = ops.a.mat.dot(&rho).dot(&ops.a_dag.mat) * c64(2.0 * p.kappa, 0.0);
        let err: f64 = (&diff - &recycle).iter().map(|z| z.norm()).sum();
        assert!(err < 1e-12);
    }
}
