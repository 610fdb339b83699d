//! Constructive witnesses: conclusive teleportation, the chi-state,
//! universal extensions obtained from teleportation, purification symmetry,
//! channels out of a purification, and preparational faithfulness.
//!
//! Every witness is re-checked by an independent contraction before it is
//! returned; a failed re-check surfaces as [`Error::NoSolution`].

use crate::backends::{self, bell_effect, max_entangled_state, random_pure_state, random_state};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, RMat};
use crate::report::CheckReport;
use crate::theory::{apply, lift_left, marginal, reduce_to_first, tensor_states, Backend, Effect, Keep, Process, Scalar, State, System};
use crate::tomography::is_locally_tomographic;
use crate::{CONSTRUCTION_TOL, DEFAULT_TOL};

/// Tolerance of the internal re-check of constructed witnesses.
const WITNESS_TOL: f64 = 1e-9;

/// Eigenvalues below this fraction of the largest are treated as zero.
const SPECTRAL_CUTOFF: f64 = 1e-12;

/// Maximally entangled state on `A (x) R`, the matching rank-one effect on
/// `R (x) A`, and `p = 1/d^2` (quantum family) or `1/d` (classical).
pub fn teleportation_witness(a: &System) -> Result<(State, Effect, Scalar)> {
    let d = a.dim() as f64;
    let p = match a.backend() {
        Backend::Classical => 1.0 / d,
        _ => 1.0 / (d * d),
    };
    let phi = max_entangled_state(a);
    let e = bell_effect(a);
    let p = Scalar::new(p)?;
    if !verify_teleportation(a, &phi, &e, p, CONSTRUCTION_TOL)? {
        return Err(Error::NoSolution("teleportation witness failed its re-check".into()));
    }
    Ok((phi, e, p))
}

/// The bent-wire map `rho -> (id_A (x) E)(Phi (x) rho)`, with `Phi` on
/// `A (x) R` and `E` on `R (x) A`.
pub fn teleport(phi: &State, e: &Effect, rho: &State) -> Result<State> {
    let joint = tensor_states(phi, rho)?;
    marginal(&joint, Keep::First, e)
}

/// Largest deviation of the bent-wire map from `p id` over the spanning states of `A`.
pub fn teleportation_residual(a: &System, phi: &State, e: &Effect, p: Scalar) -> Result<f64> {
    let r = phi.system().strip_prefix(a)?;
    e.system().expect_same(&r.tensor(a)?)?;
    let mut worst: f64 = 0.0;
    for rho in backends::spanning_states(a) {
        worst = worst.max(teleport(phi, e, &rho)?.distance(&rho.scale(p.value()))?);
    }
    Ok(worst)
}

pub fn verify_teleportation(a: &System, phi: &State, e: &Effect, p: Scalar, tol: f64) -> Result<bool> {
    Ok(teleportation_residual(a, phi, e, p)? <= tol)
}

/// `F = u - E`, completing `E` to a binary measurement.
pub fn binary_completion(e: &Effect) -> Effect {
    e.complement()
}

/// `chi = (id_A (x) T)(Phi (x) omega)` for the coarse-grained effect
/// `T = E + F` on `R (x) A`.
pub fn chi_state(phi: &State, omega: &State, t_effect: &Effect) -> Result<State> {
    teleport(phi, t_effect, omega)
}

fn split_last(sys: &System, head: &System) -> Result<System> {
    sys.strip_prefix(head)
}

/// Columns `sqrt(lambda_i) v_i` for the nonzero spectrum of a PSD matrix.
fn weighted_eigenvectors(m: &CMat, real: bool) -> Result<Vec<CMat>> {
    let (vals, vecs) = linalg::eigh(m, real);
    let top = vals.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    if vals.first().copied().unwrap_or(0.0) < -DEFAULT_TOL * top.max(1.0) {
        return Err(Error::NotPhysical("operator is not positive semidefinite".into()));
    }
    Ok((0..vals.len())
        .filter(|&i| vals[i] > SPECTRAL_CUTOFF * top)
        .map(|i| vecs.columns(i, 1).into_owned() * c(vals[i].sqrt(), 0.0))
        .collect())
}

/// `T : R -> E'` with `(id_A (x) T) Phi = p_A Gamma` for any `Gamma` on
/// `A (x) E'` extending the chi-state, built as
/// `T(X) = tr_{R A'}[(E (x) id_E')(X (x) Gamma)]`.
pub fn extension_from_teleportation(a: &System, phi: &State, e: &Effect, gamma: &State) -> Result<(Scalar, Process)> {
    let r = split_last(phi.system(), a)?;
    e.system().expect_same(&r.tensor(a)?)?;
    let env = gamma.system().strip_prefix(a)?;
    let (dr, da, de) = (r.dim(), a.dim(), env.dim());
    let t = match a.backend() {
        Backend::Classical => {
            let (ev, gv) = (e.coords(), gamma.coords());
            let m = RMat::from_fn(de, dr, |x, y| (0..da).map(|k| ev[y * da + k] * gv[k * de + x]).sum());
            Process::stochastic(r.clone(), env.clone(), m)?
        }
        b => {
            let real = b.is_real();
            let es = weighted_eigenvectors(&e.matrix(), real)?;
            let gs = weighted_eigenvectors(&gamma.matrix(), real)?;
            let mut ops = Vec::with_capacity(es.len() * gs.len());
            for em in &es {
                for gj in &gs {
                    ops.push(CMat::from_fn(de, dr, |x, y| {
                        (0..da).map(|k| em[(y * da + k, 0)].conj() * gj[(k * de + x, 0)]).sum()
                    }));
                }
            }
            Process::kraus(r.clone(), env.clone(), ops)?
        }
    };
    let p = teleportation_scalar(a, phi, e)?;
    let chi = reduce_to_first(phi, a)?;
    if !verify_universal_extension(phi, &chi, gamma, p, &t, WITNESS_TOL)? {
        return Err(Error::NoSolution("gamma does not extend the chi-state".into()));
    }
    Ok((p, t))
}

/// Recovers `p` from the bent-wire map applied to the complete state.
fn teleportation_scalar(a: &System, phi: &State, e: &Effect) -> Result<Scalar> {
    let omega = backends::complete_state(a);
    let out = teleport(phi, e, &omega)?;
    Scalar::new(out.norm().max(0.0))
}

/// `p Gamma == (id_A (x) T) Psi` within `tol`, `T` physical, and both
/// `Psi` and `Gamma` extend `rho`.
pub fn verify_universal_extension(psi: &State, rho: &State, gamma: &State, p: Scalar, t: &Process, tol: f64) -> Result<bool> {
    let a = rho.system();
    let anc = psi.system().strip_prefix(a)?;
    anc.expect_same(t.input())?;
    gamma.system().strip_prefix(a)?.expect_same(t.output())?;
    if reduce_to_first(psi, a)?.distance(rho)? > tol || reduce_to_first(gamma, a)?.distance(rho)? > tol {
        return Ok(false);
    }
    let out = apply(&lift_left(a, t)?, psi)?;
    Ok(t.is_physical(tol) && out.distance(&gamma.scale(p.value()))? <= tol)
}

/// Amplitudes of a pure state, with the first nonzero amplitude made positive real.
pub fn pure_vector(state: &State) -> Result<CMat> {
    if !state.is_pure(DEFAULT_TOL) {
        return Err(Error::NotPhysical("state is not pure".into()));
    }
    let real = state.system().backend().is_real();
    let (vals, vecs) = linalg::eigh(&state.matrix(), real);
    let top = *vals.last().expect("nonempty spectrum");
    let mut v = vecs.columns(vals.len() - 1, 1).into_owned() * c(top.max(0.0).sqrt(), 0.0);
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(z) = v.iter().copied().find(|z| z.norm() > 1e-9 * scale.max(1e-300)) {
        v *= z.conj() / c(z.norm(), 0.0);
    }
    Ok(v)
}

/// Reshapes a vector on `A (x) R` to the `d_A x d_R` coefficient matrix.
fn coefficient_matrix(v: &CMat, da: usize) -> CMat {
    let dr = v.nrows() / da;
    CMat::from_fn(da, dr, |i, j| v[(i * dr + j, 0)])
}

/// Unitary (orthogonal for real) `W` with `C1 W = C2`, from the polar part
/// of `C1^dagger C2`.
fn polar_alignment(c1: &CMat, c2: &CMat, real: bool) -> CMat {
    let m = c1.adjoint() * c2;
    if real {
        let svd = linalg::to_real(&m).svd(true, true);
        linalg::to_complex(&(svd.u.expect("u") * svd.v_t.expect("v_t")))
    } else {
        let svd = m.svd(true, true);
        svd.u.expect("u") * svd.v_t.expect("v_t")
    }
}

/// Matrix `U` with `(I (x) U)|psi> = |psi2>` for two pure vectors on `A (x) R`.
fn connecting_unitary(psi: &CMat, psi2: &CMat, da: usize, real: bool) -> Result<CMat> {
    let c1 = coefficient_matrix(psi, da);
    let c2 = coefficient_matrix(psi2, da);
    let gap = linalg::max_abs(&(&c1 * c1.adjoint() - &c2 * c2.adjoint()));
    if gap > WITNESS_TOL {
        return Err(Error::NoSolution(format!("marginals on A differ by {gap:.3e}")));
    }
    Ok(polar_alignment(&c1, &c2, real).transpose())
}

/// Reversible `U` on the purifying system `R` with `(id_A (x) U) Psi == Psi2`.
pub fn connect_purifications(a: &System, psi: &State, psi2: &State) -> Result<Process> {
    let backend = a.backend();
    if !backend.is_quantum_family() {
        return Err(Error::Unsupported {
            backend,
            what: "purification",
        });
    }
    psi.system().expect_same(psi2.system())?;
    let r = psi.system().strip_prefix(a)?;
    let (v1, v2) = (pure_vector(psi)?, pure_vector(psi2)?);
    let u = connecting_unitary(&v1, &v2, a.dim(), backend.is_real())?;
    let proc = Process::kraus(r.clone(), r, vec![u])?;
    if apply(&lift_left(a, &proc)?, psi)?.distance(psi2)? > WITNESS_TOL {
        return Err(Error::NoSolution("no local symmetry connects the purifications".into()));
    }
    Ok(proc)
}

/// Deterministic `T : R -> E` with `(id_A (x) T) Psi == Gamma`.
///
/// `Gamma` is purified to `Phi` on `A (x) E (x) F`; the purifications
/// `Psi (x) |00>_{E'F'}` and `Phi (x) |0>_R` of the same state on `A` are
/// connected by a unitary, and `F (x) R` is then discarded.
pub fn channel_from_purification(a: &System, psi: &State, gamma: &State) -> Result<Process> {
    let backend = a.backend();
    if !backend.is_quantum_family() {
        return Err(Error::Unsupported {
            backend,
            what: "purification",
        });
    }
    let real = backend.is_real();
    let r = psi.system().strip_prefix(a)?;
    let env = gamma.system().strip_prefix(a)?;
    let (da, dr, de) = (a.dim(), r.dim(), env.dim());
    let df = da * de;

    let v_psi = pure_vector(psi)?;
    let v_phi = pure_vector(&backends::purify(gamma)?)?;
    // Psi (x) |0>_{E'} |0>_{F'} in the order A, R, E', F'
    let tail = de * df;
    let mut v1 = CMat::zeros(da * dr * tail, 1);
    for i in 0..da * dr {
        v1[(i * tail, 0)] = v_psi[(i, 0)];
    }
    // Phi (x) |0>_R in the order A, E, F, R
    let mut v2 = CMat::zeros(da * de * df * dr, 1);
    for i in 0..da * de * df {
        v2[(i * dr, 0)] = v_phi[(i, 0)];
    }
    let u = connecting_unitary(&v1, &v2, da, real)?;

    // K_{f,s} = (I_E (x) <f| (x) <s|) U (I_R (x) |00>)
    let n = dr * tail;
    let iso = CMat::from_fn(n, dr, |row, col| u[(row, col * tail)]);
    let mut ops = Vec::with_capacity(df * dr);
    for f in 0..df {
        for s in 0..dr {
            ops.push(CMat::from_fn(de, dr, |x, y| iso[(x * df * dr + f * dr + s, y)]));
        }
    }
    let t = Process::kraus(r, env, ops)?;
    if !t.is_deterministic() {
        return Err(Error::NoSolution("connecting map is not an isometry".into()));
    }
    if apply(&lift_left(a, &t)?, psi)?.distance(gamma)? > WITNESS_TOL {
        return Err(Error::NoSolution("gamma is not an extension of the purified state".into()));
    }
    Ok(t)
}

/// `(p, S)` with `(id_A (x) S) Phi == p target` for the maximally entangled
/// `Phi` on `A (x) A` and any `target` on `A (x) B`.
///
/// With `target = sum_i lambda_i |psi_i><psi_i|` and coefficient matrices
/// `C_i`, `S` has Kraus `sqrt(d p lambda_i) C_i^T` and
/// `p = 1 / (d lambda_max(target_A))`, the largest value keeping `S`
/// trace non-increasing. For a pure target this is the single-Kraus
/// construction.
pub fn preparationally_faithful_witness(a: &System, phi: &State, target: &State) -> Result<(Scalar, Process)> {
    let b = target.system().strip_prefix(a)?;
    let s_sys = phi.system().strip_prefix(a)?;
    let (da, db) = (a.dim(), b.dim());
    let d = da as f64;
    let marginal_top = match a.backend() {
        Backend::Classical => reduce_to_first(target, a)?.coords().iter().copied().fold(0.0, f64::max),
        _ => linalg::max_eigenvalue(&reduce_to_first(target, a)?.matrix()),
    };
    if marginal_top <= SPECTRAL_CUTOFF {
        return Err(Error::NoSolution("zero target".into()));
    }
    let p = 1.0 / (d * marginal_top);
    let s = match a.backend() {
        Backend::Classical => {
            let q = target.coords();
            let m = RMat::from_fn(db, da, |y, x| (p * d * q[x * db + y]).min(1.0));
            Process::stochastic(s_sys, b, m)?
        }
        backend => {
            let ops = weighted_eigenvectors(&target.matrix(), backend.is_real())?
                .iter()
                .map(|v| coefficient_matrix(v, da).transpose() * c((d * p).sqrt(), 0.0))
                .collect();
            Process::kraus(s_sys, b, ops)?
        }
    };
    let out = apply(&lift_left(a, &s)?, phi)?;
    if out.distance(&target.scale(p))? > WITNESS_TOL {
        return Err(Error::NoSolution("phi is not the maximally entangled state of A".into()));
    }
    Ok((Scalar::new(p)?, s))
}

/// Witness generation from one fixed maximally entangled `Phi` for sampled
/// pure and mixed targets on `A (x) A` and `A (x) B`, plus the Local
/// Tomography law for the same pair.
pub fn is_doubly_preparationally_faithful(a: &System, b: &System, samples: u64, seed: u64, tol: f64) -> Result<CheckReport> {
    let phi = max_entangled_state(a);
    let mut worst: f64 = 0.0;
    let mut min_p = f64::INFINITY;
    let mut witnesses = 0usize;
    for target_sys in [a.tensor(a)?, a.tensor(b)?] {
        for i in 0..samples {
            let s = seed.wrapping_mul(7919).wrapping_add(i);
            for target in [random_pure_state(&target_sys, s), random_state(&target_sys, s)] {
                let (p, ch) = preparationally_faithful_witness(a, &phi, &target)?;
                let out = apply(&lift_left(a, &ch)?, &phi)?;
                worst = worst.max(out.distance(&target.scale(p.value()))?);
                min_p = min_p.min(p.value());
                witnesses += 1;
            }
        }
    }
    let lt = is_locally_tomographic(a, b)?;
    let mut report = CheckReport::new("preparational-faithfulness", tol)
        .with_seed(seed)
        .detail("backend", a.backend().name())
        .detail("witnesses", witnesses)
        .detail("max_residual", worst)
        .detail("min_p", min_p)
        .detail("local_tomography", lt.pass);
    report.require("witnesses_verified", worst <= tol && min_p > 0.0);
    if a.backend() == Backend::Quantum {
        report.require("dimension_law", lt.pass);
    }
    Ok(report)
}
