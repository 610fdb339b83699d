//! Process equality at four strengths, containment of states, the
//! tomographic ordering of bipartite states, dynamical faithfulness and
//! Local Tomography.
//!
//! From weakest to strongest, two processes `P, P'` of type `A -> B` can be
//!
//! 1. equal on a source: same outputs on each prepared state;
//! 2. equal upon input of `rho`: same outputs on every state in the face of `rho`;
//! 3. equal on the extensions of `rho`: `P (x) id` and `P' (x) id` agree on
//!    every extension of `rho` (decided on a purification, which dominates
//!    all extensions);
//! 4. equal: agree on every extension of every state.

use crate::backends::{self, apply_coords_lifted, process_space_basis, ProcessSpaceBasis};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, RMat};
use crate::report::CheckReport;
use crate::theory::{apply, lift, tensor_effects, Backend, Process, Scalar, State, System, Test};
use crate::DEFAULT_TOL;

/// Relative singular-value threshold for every rank decision.
pub const RANK_TOL: f64 = 1e-9;

/// Bisection steps used by [`contains`].
pub const BISECTION_STEPS: usize = 60;

/// Slack allowed on the smallest eigenvalue when testing `rho - p sigma >= 0`.
const FEASIBILITY_SLACK: f64 = 1e-13;

fn same_type(p: &Process, p2: &Process) -> Result<()> {
    p.input().expect_same(p2.input())?;
    p.output().expect_same(p2.output())
}

fn agree_on(p: &Process, p2: &Process, states: &[State], tol: f64) -> Result<bool> {
    for s in states {
        if apply(p, s)?.distance(&apply(p2, s)?)? > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn equal_on_source(p: &Process, p2: &Process, source: &Test, tol: f64) -> Result<bool> {
    same_type(p, p2)?;
    if !source.input().is_trivial() {
        return Err(Error::SystemMismatch {
            expected: "preparation test (input I)".into(),
            found: source.input().to_string(),
        });
    }
    p.input().expect_same(source.output())?;
    agree_on(p, p2, &source.prepared_states()?, tol)
}

/// Largest `p` and the remainder `tau` with `rho = p sigma + (1 - p) tau`,
/// or `None` when only `p = 0` is feasible.
pub fn contains(rho: &State, sigma: &State) -> Result<Option<(Scalar, State)>> {
    contains_with_tol(rho, sigma, DEFAULT_TOL)
}

pub fn contains_with_tol(rho: &State, sigma: &State, tol: f64) -> Result<Option<(Scalar, State)>> {
    rho.system().expect_same(sigma.system())?;
    if !rho.is_deterministic() || !sigma.is_deterministic() {
        return Err(Error::NotPhysical("containment is defined for deterministic states".into()));
    }
    let p = match rho.system().backend() {
        Backend::Classical => rho
            .coords()
            .iter()
            .zip(sigma.coords())
            .filter(|(_, s)| **s > 0.0)
            .map(|(r, s)| r / s)
            .fold(1.0f64, f64::min)
            .max(0.0),
        _ => {
            let (r, s) = (rho.matrix(), sigma.matrix());
            let feasible = |p: f64| linalg::min_eigenvalue(&(&r - &s * c(p, 0.0))) >= -FEASIBILITY_SLACK;
            if feasible(1.0) {
                1.0
            } else {
                let (mut lo, mut hi) = (0.0, 1.0);
                for _ in 0..BISECTION_STEPS {
                    let mid = 0.5 * (lo + hi);
                    if feasible(mid) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                lo
            }
        }
    };
    if p <= tol {
        return Ok(None);
    }
    let tau = if p >= 1.0 - tol {
        rho.clone()
    } else {
        rho.sub(&sigma.scale(p))?.scale(1.0 / (1.0 - p))
    };
    Ok(Some((Scalar::new(p)?, tau)))
}

/// Full rank (quantum) or full support (classical).
pub fn is_complete(rho: &State) -> bool {
    if !rho.is_deterministic() {
        return false;
    }
    match rho.system().backend() {
        Backend::Classical => rho.coords().iter().all(|&p| p > DEFAULT_TOL),
        _ => linalg::min_eigenvalue(&rho.matrix()) > DEFAULT_TOL,
    }
}

/// Orthonormal basis of the support of `rho`, as columns.
fn support_basis(rho: &State) -> CMat {
    let real = rho.system().backend().is_real();
    let (vals, vecs) = linalg::eigh(&rho.matrix(), real);
    let top = vals.last().copied().unwrap_or(0.0);
    let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > RANK_TOL * top.max(0.0) && vals[i] > 0.0).collect();
    CMat::from_fn(vecs.nrows(), keep.len(), |i, j| vecs[(i, keep[j])])
}

/// Deterministic states spanning the face of `rho`: all states whose
/// support lies in the support of `rho`.
pub fn face_spanning_states(rho: &State) -> Result<Vec<State>> {
    let sys = rho.system().clone();
    match sys.backend() {
        Backend::Classical => Ok(backends::spanning_states(&sys)
            .into_iter()
            .zip(rho.coords())
            .filter(|(_, &p)| p > RANK_TOL)
            .map(|(s, _)| s)
            .collect()),
        b => {
            let v = support_basis(rho);
            let r = v.ncols();
            let s = std::f64::consts::FRAC_1_SQRT_2;
            let col = |k: usize| v.columns(k, 1).into_owned();
            let mut kets: Vec<CMat> = (0..r).map(col).collect();
            for j in 0..r {
                for k in (j + 1)..r {
                    kets.push((col(j) + col(k)) * c(s, 0.0));
                    if !b.is_real() {
                        kets.push((col(j) + col(k) * c(0.0, 1.0)) * c(s, 0.0));
                    }
                }
            }
            kets.iter().map(|k| State::from_matrix(sys.clone(), &linalg::outer(k))).collect()
        }
    }
}

pub fn equal_upon_input(p: &Process, p2: &Process, rho: &State, tol: f64) -> Result<bool> {
    same_type(p, p2)?;
    p.input().expect_same(rho.system())?;
    agree_on(p, p2, &face_spanning_states(rho)?, tol)
}

/// `sum_x rho_x e_x (x) e_x`: the classical extension with a display register.
pub fn classical_copy_extension(rho: &State) -> Result<State> {
    let a = rho.system();
    if a.backend() != Backend::Classical {
        return Err(Error::Unsupported {
            backend: a.backend(),
            what: "copy extension",
        });
    }
    let d = a.dim();
    let mut p = vec![0.0; d * d];
    for (x, px) in rho.coords().iter().enumerate() {
        p[x * d + x] = *px;
    }
    State::from_coords(a.tensor(a)?, p)
}

/// The extension of `rho` used to decide equality on its extensions: the
/// purification (quantum family) or the copy extension (classical).
pub fn dominant_extension(rho: &State) -> Result<State> {
    match rho.system().backend() {
        Backend::Classical => classical_copy_extension(rho),
        _ => backends::purify(rho),
    }
}

fn agree_lifted(p: &Process, p2: &Process, ext: &State, tol: f64) -> Result<bool> {
    let anc = ext.system().strip_prefix(p.input())?;
    let out = apply(&lift(p, &anc)?, ext)?;
    let out2 = apply(&lift(p2, &anc)?, ext)?;
    Ok(out.distance(&out2)? <= tol)
}

pub fn equal_on_extensions(p: &Process, p2: &Process, rho: &State, tol: f64) -> Result<bool> {
    same_type(p, p2)?;
    p.input().expect_same(rho.system())?;
    agree_lifted(p, p2, &dominant_extension(rho)?, tol)
}

/// Cross-check for [`equal_on_extensions`] on sampled channel and ensemble
/// extensions of `rho` with an environment of the same dimension.
pub fn equal_on_sampled_extensions(p: &Process, p2: &Process, rho: &State, samples: usize, seed: u64, tol: f64) -> Result<bool> {
    same_type(p, p2)?;
    let env = rho.system().clone();
    for i in 0..samples as u64 {
        let s = seed.wrapping_mul(1_000_003).wrapping_add(i);
        let exts = [
            backends::random_extension(rho, &env, s)?,
            backends::random_ensemble_extension(rho, &env, s)?,
        ];
        for g in &exts {
            if !agree_lifted(p, p2, g, tol)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Columns are the coordinates of `(T_i (x) id) state` for every element of
/// the process basis of type `A -> B`.
pub fn lifting_matrix(state: &State, basis: &ProcessSpaceBasis) -> Result<RMat> {
    let cols = basis
        .elements
        .iter()
        .map(|t| Ok(apply_coords_lifted(&basis.input, &basis.output, t, state)?.coords().to_vec()))
        .collect::<Result<Vec<_>>>()?;
    let rows = cols.first().map_or(0, |v| v.len());
    Ok(linalg::columns(&cols, rows))
}

/// `ker M_phi` is contained in `ker M_psi`: every pair of processes
/// indistinguishable on `phi` is indistinguishable on `psi`.
pub fn tomographically_geq(phi: &State, psi: &State, a: &System, b: &System) -> Result<bool> {
    let basis = process_space_basis(a, b)?;
    tomographically_geq_with(phi, psi, &basis)
}

pub fn tomographically_geq_with(phi: &State, psi: &State, basis: &ProcessSpaceBasis) -> Result<bool> {
    let m_phi = lifting_matrix(phi, basis)?;
    let m_psi = lifting_matrix(psi, basis)?;
    let (r1, c1) = m_phi.shape();
    let (r2, _) = m_psi.shape();
    let mut stacked = RMat::zeros(r1 + r2, c1);
    stacked.rows_mut(0, r1).copy_from(&m_phi);
    stacked.rows_mut(r1, r2).copy_from(&m_psi);
    Ok(linalg::rank(&stacked, RANK_TOL) == linalg::rank(&m_phi, RANK_TOL))
}

/// `(rank M_phi, dim of the process span)`.
pub fn faithfulness_rank(phi: &State, a: &System, b: &System) -> Result<(usize, usize)> {
    let basis = process_space_basis(a, b)?;
    faithfulness_rank_with(phi, &basis)
}

pub fn faithfulness_rank_with(phi: &State, basis: &ProcessSpaceBasis) -> Result<(usize, usize)> {
    Ok((linalg::rank(&lifting_matrix(phi, basis)?, RANK_TOL), basis.dim))
}

pub fn is_dynamically_faithful(phi: &State, a: &System, b: &System) -> Result<bool> {
    let (rank, dim) = faithfulness_rank(phi, a, b)?;
    Ok(rank == dim)
}

/// Purification of the complete state (quantum family) or the perfectly
/// correlated copy state (classical).
pub fn find_faithful_state(a: &System) -> State {
    match a.backend() {
        Backend::Classical => backends::max_entangled_state(a),
        _ => backends::purify(&backends::complete_state(a)).expect("complete state purifies"),
    }
}

/// Product effects span the composite effect space, equivalently
/// `state_dim(A (x) B) == state_dim(A) * state_dim(B)`.
pub fn is_locally_tomographic(a: &System, b: &System) -> Result<CheckReport> {
    let ab = a.tensor(b)?;
    let dim_composite = ab.state_dim();
    let dim_product = a.state_dim() * b.state_dim();
    let mut cols = Vec::new();
    for e in backends::spanning_effects(a) {
        for f in backends::spanning_effects(b) {
            cols.push(tensor_effects(&e, &f)?.coords().to_vec());
        }
    }
    let product_rank = linalg::rank(&linalg::columns(&cols, dim_composite), RANK_TOL);
    let mut report = CheckReport::new("local-tomography", RANK_TOL)
        .detail("backend", a.backend().name())
        .detail("system_a", a.to_string())
        .detail("system_b", b.to_string())
        .detail("dim_a", a.state_dim())
        .detail("dim_b", b.state_dim())
        .detail("dim_composite", dim_composite)
        .detail("dim_product", dim_product)
        .detail("product_effect_rank", product_rank);
    report.require("dimension_law", dim_composite == dim_product);
    report.require("product_effects_span", product_rank == dim_composite);
    Ok(report)
}

/// Equality on every extension of every state, decided on the faithful state.
pub fn equal_processes(p: &Process, p2: &Process, tol: f64) -> Result<bool> {
    same_type(p, p2)?;
    agree_lifted(p, p2, &find_faithful_state(p.input()), tol)
}
