//! The rebit counterexample to standard process tomography and the
//! Wootters pair of two-rebit states that no local measurement separates.

use serde::Serialize;

use crate::backends::{complete_state, max_entangled_state, process_space_basis, random_state, spanning_effects, spanning_states};
use crate::linalg::{self, c, kron, pauli_i, pauli_x, pauli_y, pauli_z, CMat};
use crate::theory::{apply, lift, pair, tensor_effects, Backend, Process, State, System};
use crate::tomography::faithfulness_rank_with;
use crate::{Error, Result};

/// Number of seeded random rebit states added to the spanning set when
/// measuring the local deviation of `P` and `P'` from `I/2`.
pub const LOCAL_SAMPLES: u64 = 100;

fn rebit() -> System {
    System::atomic(Backend::Real, 2).expect("rebit")
}

/// `P` with Kraus `{I, Y}/sqrt 2` and `P'` with Kraus `{X, Z}/sqrt 2`: both
/// send every rebit state to `I/2`, but differ on half of a Bell pair.
pub fn rebit_processes() -> (Process, Process) {
    let r = rebit();
    let s = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let p = Process::kraus(r.clone(), r.clone(), vec![pauli_i() * s, pauli_y() * s]).expect("P is physical");
    let p2 = Process::kraus(r.clone(), r, vec![pauli_x() * s, pauli_z() * s]).expect("P' is physical");
    (p, p2)
}

/// `1/4 (I(x)I - Y(x)Y)` and `1/4 (I(x)I + Y(x)Y)` on two rebits.
pub fn wootters_pair() -> (State, State) {
    let rr = rebit().tensor(&rebit()).expect("two rebits");
    let ii = kron(&pauli_i(), &pauli_i());
    let yy = kron(&pauli_y(), &pauli_y());
    let q = c(0.25, 0.0);
    let rho1 = State::from_matrix(rr.clone(), &((&ii - &yy) * q)).expect("rho1 is real symmetric");
    let rho2 = State::from_matrix(rr, &((ii + yy) * q)).expect("rho2 is real symmetric");
    (rho1, rho2)
}

/// Coefficients `tr(rho sigma_{i1} (x) ... (x) sigma_{in}) / 2^{n/2}` in the
/// orthonormal Pauli basis `{I, X, Y, Z}/sqrt 2` per factor, first factor
/// most significant. Every factor must be two-dimensional.
pub fn pauli_components(state: &State) -> Result<Vec<f64>> {
    let sys = state.system();
    if !sys.backend().is_quantum_family() || sys.factors().iter().any(|&d| d != 2) {
        return Err(Error::Dimension(format!("Pauli components need qubit or rebit factors, got {sys}")));
    }
    let n = sys.factors().len();
    let paulis = [pauli_i(), pauli_x(), pauli_y(), pauli_z()];
    let m = state.matrix();
    let norm = 2f64.powi(n as i32).sqrt();
    Ok((0..4usize.pow(n as u32))
        .map(|idx| {
            let mut op = CMat::identity(1, 1);
            for k in (0..n).rev() {
                let digit = (idx / 4usize.pow(k as u32)) % 4;
                op = kron(&op, &paulis[digit]);
            }
            (&m * op).trace().re / norm
        })
        .collect())
}

/// Largest Pauli component with an odd number of `Y` factors. These are
/// exactly the components that vanish on real symmetric matrices.
pub fn odd_y_weight(components: &[f64]) -> f64 {
    components
        .iter()
        .enumerate()
        .filter(|(idx, _)| {
            let mut ys = 0;
            let mut i = *idx;
            while i > 0 {
                ys += usize::from(i % 4 == 2);
                i /= 4;
            }
            ys % 2 == 1
        })
        .map(|(_, v)| v.abs())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleReport {
    pub check: String,
    pub pass: bool,
    pub tolerance: f64,
    /// Max over spanning and random rebit states of `|P(rho) - I/2|` and the same for `P'`.
    pub max_local_deviation: f64,
    pub output1: Vec<f64>,
    pub output2: Vec<f64>,
    pub output1_pauli: Vec<f64>,
    pub output2_pauli: Vec<f64>,
    /// Distance of the lifted outputs from `1/4 (II -+ YY)`.
    pub bellmix_residual: f64,
    /// Largest entry of `rho1 rho2`.
    pub orthogonality_gap: f64,
    pub trace_distance: f64,
    /// Max over the 9 spanning real product effects of the pairing gap.
    pub local_stats_max_gap: f64,
    /// Largest Pauli component with an odd number of `Y`s in either output.
    pub odd_y_weight: f64,
    pub faithful_rank: usize,
    pub process_span_dim: usize,
}

/// Runs the whole counterexample: local indistinguishability of `P, P'`,
/// orthogonality of their lifted outputs on a Bell pair, and the blindness
/// of real product effects to the difference.
pub fn counterexample_report(tol: f64) -> CounterexampleReport {
    let r = rebit();
    let (p, p2) = rebit_processes();
    let half = complete_state(&r);

    let mut probes = spanning_states(&r);
    probes.extend((0..LOCAL_SAMPLES).map(|seed| random_state(&r, seed)));
    let max_local_deviation = probes
        .iter()
        .flat_map(|s| [&p, &p2].map(|q| apply(q, s).and_then(|o| o.distance(&half)).expect("rebit types match")))
        .fold(0.0, f64::max);

    let bell = max_entangled_state(&r);
    let out1 = apply(&lift(&p, &r).expect("lift"), &bell).expect("apply");
    let out2 = apply(&lift(&p2, &r).expect("lift"), &bell).expect("apply");
    let (w1, w2) = wootters_pair();
    let bellmix_residual = out1.distance(&w1).expect("same system").max(out2.distance(&w2).expect("same system"));

    let (m1, m2) = (out1.matrix(), out2.matrix());
    let orthogonality_gap = linalg::max_abs(&(&m1 * &m2));
    let trace_distance = 0.5 * linalg::trace_norm(&(&m1 - &m2));

    let mut local_stats_max_gap: f64 = 0.0;
    for a in spanning_effects(&r) {
        for b in spanning_effects(&r) {
            let ab = tensor_effects(&a, &b).expect("product effect");
            let gap = (pair(&ab, &out1).expect("pair") - pair(&ab, &out2).expect("pair")).abs();
            local_stats_max_gap = local_stats_max_gap.max(gap);
        }
    }

    let output1_pauli = pauli_components(&out1).expect("two rebits");
    let output2_pauli = pauli_components(&out2).expect("two rebits");
    let odd_y = odd_y_weight(&output1_pauli).max(odd_y_weight(&output2_pauli));

    let basis = process_space_basis(&r, &r).expect("rebit process basis");
    let (faithful_rank, process_span_dim) = faithfulness_rank_with(&bell, &basis).expect("rank");

    let pass = max_local_deviation <= tol
        && bellmix_residual <= tol
        && orthogonality_gap <= tol
        && (trace_distance - 1.0).abs() <= tol.max(crate::DEFAULT_TOL)
        && local_stats_max_gap <= tol
        && odd_y <= tol
        && faithful_rank == process_span_dim;

    CounterexampleReport {
        check: "rebit-counterexample".into(),
        pass,
        tolerance: tol,
        max_local_deviation,
        output1: out1.coords().to_vec(),
        output2: out2.coords().to_vec(),
        output1_pauli,
        output2_pauli,
        bellmix_residual,
        orthogonality_gap,
        trace_distance,
        local_stats_max_gap,
        odd_y_weight: odd_y,
        faithful_rank,
        process_span_dim,
    }
}
