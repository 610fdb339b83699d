//! Concrete theories: classical, complex quantum and real quantum.
//!
//! Each backend supplies fiducial (spanning) sets, a canonical complete
//! state, purifications where they exist, a basis for the span of
//! transformations `A -> B`, and seeded random generators.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, RMat};
use crate::theory::{Backend, Effect, Process, State, System};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Pure states `|k>`, `|j>+|k>` and (complex only) `|j>+i|k>`, normalized.
fn fiducial_kets(d: usize, real: bool) -> Vec<CMat> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut kets: Vec<CMat> = (0..d).map(|k| linalg::basis_ket(d, k)).collect();
    for j in 0..d {
        for k in (j + 1)..d {
            kets.push((linalg::basis_ket(d, j) + linalg::basis_ket(d, k)) * c(s, 0.0));
        }
    }
    if !real {
        for j in 0..d {
            for k in (j + 1)..d {
                kets.push((linalg::basis_ket(d, j) + linalg::basis_ket(d, k) * c(0.0, 1.0)) * c(s, 0.0));
            }
        }
    }
    kets
}

/// States whose real span is the whole state space, all of them pure and
/// deterministic: `d^2` for complex, `d(d+1)/2` for real, `d` for classical.
pub fn spanning_states(sys: &System) -> Vec<State> {
    let d = sys.dim();
    match sys.backend() {
        Backend::Classical => (0..d)
            .map(|k| {
                let mut p = vec![0.0; d];
                p[k] = 1.0;
                State::from_coords(sys.clone(), p).expect("basis vector")
            })
            .collect(),
        b => fiducial_kets(d, b.is_real())
            .iter()
            .map(|v| State::from_matrix(sys.clone(), &linalg::outer(v)).expect("pure projector"))
            .collect(),
    }
}

/// Rank-one projective effects (indicator functions for the classical
/// backend) spanning the effect space.
pub fn spanning_effects(sys: &System) -> Vec<Effect> {
    let d = sys.dim();
    match sys.backend() {
        Backend::Classical => (0..d)
            .map(|k| {
                let mut e = vec![0.0; d];
                e[k] = 1.0;
                Effect::from_coords(sys.clone(), e).expect("indicator")
            })
            .collect(),
        b => fiducial_kets(d, b.is_real())
            .iter()
            .map(|v| Effect::from_matrix(sys.clone(), &linalg::outer(v)).expect("projector"))
            .collect(),
    }
}

/// Maximally mixed (quantum) or uniform (classical) state.
pub fn complete_state(sys: &System) -> State {
    let d = sys.dim();
    match sys.backend() {
        Backend::Classical => State::from_coords(sys.clone(), vec![1.0 / d as f64; d]),
        _ => State::from_matrix(sys.clone(), &(linalg::identity(d) * c(1.0 / d as f64, 0.0))),
    }
    .expect("complete state")
}

/// `|Phi+><Phi+|` on `A (x) A`, or the perfectly correlated distribution
/// `sum_i e_i (x) e_i / d` for the classical backend.
pub fn max_entangled_state(a: &System) -> State {
    let aa = a.tensor(a).expect("same backend");
    let d = a.dim();
    match a.backend() {
        Backend::Classical => {
            let mut p = vec![0.0; d * d];
            for i in 0..d {
                p[i * d + i] = 1.0 / d as f64;
            }
            State::from_coords(aa, p)
        }
        _ => State::from_matrix(aa, &linalg::outer(&linalg::max_entangled_vector(d))),
    }
    .expect("maximally correlated state")
}

/// `|Phi+><Phi+|` as an effect on `A (x) A`, or the equality indicator
/// `sum_i e_i (x) e_i` for the classical backend.
pub fn bell_effect(a: &System) -> Effect {
    let aa = a.tensor(a).expect("same backend");
    let d = a.dim();
    match a.backend() {
        Backend::Classical => {
            let mut e = vec![0.0; d * d];
            for i in 0..d {
                e[i * d + i] = 1.0;
            }
            Effect::from_coords(aa, e)
        }
        _ => Effect::from_matrix(aa, &linalg::outer(&linalg::max_entangled_vector(d))),
    }
    .expect("bell effect")
}

/// Canonical purification `sum_k sqrt(rho)|k> (x) |k>` on `A (x) R` with
/// `R` a copy of `A`. Pure inputs give a product with the conjugate ket.
pub fn purify(rho: &State) -> Result<State> {
    let a = rho.system();
    let backend = a.backend();
    if !backend.is_quantum_family() {
        return Err(Error::Unsupported {
            backend,
            what: "purification",
        });
    }
    if !rho.in_cone(crate::DEFAULT_TOL) {
        return Err(Error::NotPhysical("cannot purify a state outside the cone".into()));
    }
    let d = a.dim();
    let root = linalg::sqrt_psd(&rho.matrix(), backend.is_real());
    let mut psi = CMat::zeros(d * d, 1);
    for k in 0..d {
        for i in 0..d {
            psi[(i * d + k, 0)] = root[(i, k)];
        }
    }
    State::from_matrix(a.tensor(a)?, &linalg::outer(&psi))
}

/// A spanning set for the real span of transformations `A -> B`, in the
/// coordinates of [`Process::coords`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessSpaceBasis {
    pub input: System,
    pub output: System,
    pub elements: Vec<Vec<f64>>,
    pub dim: usize,
}

impl ProcessSpaceBasis {
    /// Length of each coordinate vector.
    pub fn coord_len(&self) -> usize {
        process_coord_len(&self.input, &self.output)
    }
}

pub fn process_coord_len(a: &System, b: &System) -> usize {
    match a.backend() {
        Backend::Classical => a.dim() * b.dim(),
        _ => 2 * a.dim() * a.dim() * b.dim() * b.dim(),
    }
}

fn superop_coords(s: &CMat) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * s.len());
    for i in 0..s.nrows() {
        for j in 0..s.ncols() {
            out.push(s[(i, j)].re);
            out.push(s[(i, j)].im);
        }
    }
    out
}

fn coords_superop(coords: &[f64], rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |i, j| {
        let k = 2 * (i * cols + j);
        c(coords[k], coords[k + 1])
    })
}

/// Incrementally grown orthonormal basis used to detect linear independence.
struct SpanTracker {
    ortho: Vec<DVector<f64>>,
}

impl SpanTracker {
    fn new() -> Self {
        SpanTracker { ortho: Vec::new() }
    }

    /// Adds `v` if it is independent of the current span; returns whether it was added.
    fn offer(&mut self, v: &[f64], rel_tol: f64) -> bool {
        let mut r = DVector::from_column_slice(v);
        let norm0 = r.norm();
        if norm0 == 0.0 {
            return false;
        }
        for _ in 0..2 {
            for q in &self.ortho {
                let proj = q.dot(&r);
                r.axpy(-proj, q, 1.0);
            }
        }
        let n = r.norm();
        if n <= rel_tol * norm0 {
            return false;
        }
        self.ortho.push(r / n);
        true
    }
}

/// Basis of the transformation span. Complex: the `d_A^2 d_B^2` maps
/// `X -> B_i tr(C_j X)`; classical: matrix units. Real: computed from
/// seeded random operators of the restricted Kraus class (seed 0).
pub fn process_space_basis(a: &System, b: &System) -> Result<ProcessSpaceBasis> {
    process_space_basis_seeded(a, b, 0)
}

pub fn process_space_basis_seeded(a: &System, b: &System, seed: u64) -> Result<ProcessSpaceBasis> {
    a.expect_backend(b)?;
    let (da, db) = (a.dim(), b.dim());
    let elements = match a.backend() {
        Backend::Classical => (0..db * da)
            .map(|k| {
                let mut v = vec![0.0; db * da];
                v[k] = 1.0;
                v
            })
            .collect(),
        Backend::Quantum => {
            let herm = |d: usize, i: usize| {
                let mut e = vec![0.0; d * d];
                e[i] = 1.0;
                linalg::coords_to_herm(&e, d, false)
            };
            let mut els = Vec::with_capacity(da * da * db * db);
            for i in 0..db * db {
                let bi = herm(db, i);
                for j in 0..da * da {
                    let cj = herm(da, j);
                    // X -> B_i tr(C_j X):  S[(b,b'),(k,l)] = B_i[b,b'] C_j[l,k]
                    let s = CMat::from_fn(db * db, da * da, |r, col| bi[(r / db, r % db)] * cj[(col % da, col / da)]);
                    els.push(superop_coords(&s));
                }
            }
            els
        }
        Backend::Real => real_process_span(da, db, seed),
    };
    let dim = elements.len();
    Ok(ProcessSpaceBasis {
        input: a.clone(),
        output: b.clone(),
        elements,
        dim,
    })
}

/// Grows the span of `X -> K X K^T` for random real `K` until a long run of
/// samples adds nothing new. The dimension is an output, not an input.
fn real_process_span(da: usize, db: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut r = rng(seed);
    let n = da * db;
    let cap = n * n + 64;
    let patience = 2 * n + 16;
    let mut tracker = SpanTracker::new();
    let mut elements = Vec::new();
    let mut misses = 0;
    for _ in 0..cap {
        let k = RMat::from_fn(db, da, |_, _| r.sample::<f64, _>(StandardNormal));
        let s = linalg::to_complex(&linalg::kron_real(&k, &k));
        let v = superop_coords(&s);
        if tracker.offer(&v, 1e-8) {
            elements.push(v);
            misses = 0;
        } else {
            misses += 1;
            if misses >= patience {
                break;
            }
        }
    }
    elements
}

/// Applies the transformation with coordinates `coords` (type `A -> B`) to
/// the first factor of `state` on `A (x) R`, leaving `R` untouched.
pub fn apply_coords_lifted(a: &System, b: &System, coords: &[f64], state: &State) -> Result<State> {
    if coords.len() != process_coord_len(a, b) {
        return Err(Error::Dimension(format!(
            "{} process coordinates, expected {}",
            coords.len(),
            process_coord_len(a, b)
        )));
    }
    let anc = state.system().strip_prefix(a)?;
    let out_sys = b.tensor(&anc)?;
    let (da, db, dr) = (a.dim(), b.dim(), anc.dim());
    match a.backend() {
        Backend::Classical => {
            let p = state.coords();
            let mut out = vec![0.0; db * dr];
            for bb in 0..db {
                for aa in 0..da {
                    let m = coords[bb * da + aa];
                    if m == 0.0 {
                        continue;
                    }
                    for r in 0..dr {
                        out[bb * dr + r] += m * p[aa * dr + r];
                    }
                }
            }
            State::from_coords(out_sys, out)
        }
        _ => {
            let s = coords_superop(coords, db * db, da * da);
            let y = state.matrix();
            let mut out = CMat::zeros(db * dr, db * dr);
            for r in 0..dr {
                for t in 0..dr {
                    let block = CMat::from_fn(da, da, |i, j| y[(i * dr + r, j * dr + t)]);
                    let vec_in = DVector::from_iterator(da * da, (0..da * da).map(|k| block[(k / da, k % da)]));
                    let vec_out = &s * vec_in;
                    for i in 0..db {
                        for j in 0..db {
                            out[(i * dr + r, j * dr + t)] = vec_out[i * db + j];
                        }
                    }
                }
            }
            State::from_matrix(out_sys, &out)
        }
    }
}

fn gaussian_matrix(r: &mut ChaCha8Rng, rows: usize, cols: usize, real: bool) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = r.sample(StandardNormal);
        let im: f64 = if real { 0.0 } else { r.sample(StandardNormal) };
        c(re, im)
    })
}

/// `G (G^dagger G)^{-1/2}`: the isometric part of a tall matrix.
fn isometry_from(g: &CMat, real: bool) -> CMat {
    let gram = g.adjoint() * g;
    let (vals, vecs) = linalg::eigh(&gram, real);
    let n = vals.len();
    let mut inv_sqrt = CMat::zeros(n, n);
    for (i, v) in vals.iter().enumerate() {
        inv_sqrt[(i, i)] = c(1.0 / v.sqrt(), 0.0);
    }
    g * (&vecs * inv_sqrt * vecs.adjoint())
}

fn dirichlet(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| r.sample::<f64, _>(Exp1)).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

/// Normalized Wishart sample (uniform on the simplex for classical).
pub fn random_state(sys: &System, seed: u64) -> State {
    let mut r = rng(seed);
    let d = sys.dim();
    match sys.backend() {
        Backend::Classical => State::from_coords(sys.clone(), dirichlet(&mut r, d)),
        b => {
            let g = gaussian_matrix(&mut r, d, d, b.is_real());
            let w = &g * g.adjoint();
            let tr = w.trace().re;
            State::from_matrix(sys.clone(), &(w * c(1.0 / tr, 0.0)))
        }
    }
    .expect("random state is physical")
}

/// Random pure state (random vertex for classical).
pub fn random_pure_state(sys: &System, seed: u64) -> State {
    let mut r = rng(seed);
    let d = sys.dim();
    match sys.backend() {
        Backend::Classical => {
            let mut p = vec![0.0; d];
            p[r.random_range(0..d)] = 1.0;
            State::from_coords(sys.clone(), p)
        }
        b => {
            let g = gaussian_matrix(&mut r, d, 1, b.is_real());
            let n = linalg::frobenius(&g);
            State::from_matrix(sys.clone(), &linalg::outer(&(g * c(1.0 / n, 0.0))))
        }
    }
    .expect("random pure state is physical")
}

/// Random rank-`rank` state (classical: support of size `rank`).
pub fn random_state_of_rank(sys: &System, rank: usize, seed: u64) -> State {
    let mut r = rng(seed);
    let d = sys.dim();
    let rank = rank.clamp(1, d);
    match sys.backend() {
        Backend::Classical => {
            let w = dirichlet(&mut r, rank);
            let mut idx: Vec<usize> = (0..d).collect();
            for i in (1..d).rev() {
                idx.swap(i, r.random_range(0..=i));
            }
            let mut p = vec![0.0; d];
            for (k, wk) in w.iter().enumerate() {
                p[idx[k]] = *wk;
            }
            State::from_coords(sys.clone(), p)
        }
        b => {
            let g = gaussian_matrix(&mut r, d, rank, b.is_real());
            let w = &g * g.adjoint();
            let tr = w.trace().re;
            State::from_matrix(sys.clone(), &(w * c(1.0 / tr, 0.0)))
        }
    }
    .expect("random state is physical")
}

/// Random deterministic process from a Stinespring isometry with full
/// Kraus rank `d_A d_B` (random column-stochastic matrix for classical).
pub fn random_process(a: &System, b: &System, seed: u64) -> Result<Process> {
    a.expect_backend(b)?;
    let mut r = rng(seed);
    let (da, db) = (a.dim(), b.dim());
    match a.backend() {
        Backend::Classical => {
            let mut m = RMat::zeros(db, da);
            for j in 0..da {
                let col = dirichlet(&mut r, db);
                for (i, v) in col.into_iter().enumerate() {
                    m[(i, j)] = v;
                }
            }
            Process::stochastic(a.clone(), b.clone(), m)
        }
        backend => {
            let k = da * db;
            let g = gaussian_matrix(&mut r, db * k, da, backend.is_real());
            let v = isometry_from(&g, backend.is_real());
            let ops = (0..k).map(|j| v.rows(j * db, db).into_owned()).collect();
            Process::kraus(a.clone(), b.clone(), ops)
        }
    }
}

/// Random unitary (orthogonal for real, permutation for classical).
pub fn random_reversible(a: &System, seed: u64) -> Process {
    let mut r = rng(seed);
    let d = a.dim();
    match a.backend() {
        Backend::Classical => {
            let mut perm: Vec<usize> = (0..d).collect();
            for i in (1..d).rev() {
                perm.swap(i, r.random_range(0..=i));
            }
            let m = RMat::from_fn(d, d, |i, j| if perm[j] == i { 1.0 } else { 0.0 });
            Process::stochastic(a.clone(), a.clone(), m)
        }
        b => {
            let g = gaussian_matrix(&mut r, d, d, b.is_real());
            Process::kraus(a.clone(), a.clone(), vec![isometry_from(&g, b.is_real())])
        }
    }
    .expect("reversible process is physical")
}

/// Random extension of `rho` on `A (x) E`: a random channel on the
/// purifying system (classical: random channel on a copy register).
pub fn random_extension(rho: &State, env: &System, seed: u64) -> Result<State> {
    let a = rho.system();
    match a.backend() {
        Backend::Classical => {
            let t = random_process(a, env, seed)?;
            let copy = crate::tomography::classical_copy_extension(rho)?;
            crate::theory::apply(&crate::theory::lift_left(a, &t)?, &copy)
        }
        _ => {
            let psi = purify(rho)?;
            let t = random_process(a, env, seed)?;
            crate::theory::apply(&crate::theory::lift_left(a, &t)?, &psi)
        }
    }
}

/// Random ensemble extension `sum_i p_i sigma_i (x) e_i` of `rho` on
/// `A (x) E`, obtained by a random measurement on the purifying side whose
/// outcome is written into a classical register of `E`.
pub fn random_ensemble_extension(rho: &State, env: &System, seed: u64) -> Result<State> {
    let a = rho.system();
    if a.backend() == Backend::Classical {
        return random_extension(rho, env, seed);
    }
    let psi = purify(rho)?;
    let d = a.dim();
    let de = env.dim();
    // measure-and-prepare channel R -> E with Kraus |i><m_i| from a random isometry
    // POVM from a random isometry R -> R (x) E, outcome i recorded as |i> in E
    let mut r = rng(seed);
    let g = gaussian_matrix(&mut r, d * de, d, a.backend().is_real());
    let v = isometry_from(&g, a.backend().is_real());
    let rows_per = v.nrows() / de;
    let mut ops = Vec::new();
    for i in 0..de {
        let block = v.rows(i * rows_per, rows_per).into_owned();
        for row in 0..rows_per {
            let mut k = CMat::zeros(de, d);
            k.set_row(i, &block.row(row));
            ops.push(k);
        }
    }
    let t = Process::kraus(a.clone(), env.clone(), ops)?;
    crate::theory::apply(&crate::theory::lift_left(a, &t)?, &psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::{apply, lift, reduce_to_first};

    fn sys(b: Backend, d: usize) -> System {
        System::atomic(b, d).unwrap()
    }

    fn gram_rank(states: &[State]) -> usize {
        let n = states[0].coords().len();
        let cols: Vec<Vec<f64>> = states.iter().map(|s| s.coords().to_vec()).collect();
        linalg::rank(&linalg::columns(&cols, n), 1e-9)
    }

    #[test]
    fn spanning_sets_have_full_rank() {
        let q = spanning_states(&sys(Backend::Quantum, 2));
        assert_eq!(q.len(), 4);
        assert_eq!(gram_rank(&q), 4);
        let r = spanning_states(&sys(Backend::Real, 2));
        assert_eq!(r.len(), 3);
        assert_eq!(gram_rank(&r), 3);
        let cl = spanning_states(&sys(Backend::Classical, 2));
        assert_eq!(cl[0].coords(), &[1.0, 0.0]);
        assert_eq!(cl[1].coords(), &[0.0, 1.0]);
        for b in [Backend::Classical, Backend::Quantum, Backend::Real] {
            for d in 2..=4 {
                let s = sys(b, d);
                let st = spanning_states(&s);
                assert_eq!(gram_rank(&st), s.state_dim());
                assert!(st.iter().all(|x| x.is_deterministic() && x.in_cone(1e-12)));
                assert!(spanning_effects(&s).iter().all(|e| e.is_physical(1e-12)));
            }
        }
    }

    #[test]
    fn complete_states() {
        let q = complete_state(&sys(Backend::Quantum, 2));
        assert!(linalg::max_abs(&(q.matrix() - linalg::identity(2) * c(0.5, 0.0))) < 1e-15);
        let cl = complete_state(&sys(Backend::Classical, 3));
        assert!(cl.coords().iter().all(|p| (p - 1.0 / 3.0).abs() < 1e-15));
        let rr = System::composite(Backend::Real, &[2, 2]).unwrap();
        let w = complete_state(&rr);
        assert!(linalg::max_abs(&(w.matrix() - linalg::identity(4) * c(0.25, 0.0))) < 1e-15);
        assert!(linalg::min_eigenvalue(&w.matrix()) > 0.2);
    }

    #[test]
    fn purification_examples() {
        let q = sys(Backend::Quantum, 2);
        let psi = purify(&complete_state(&q)).unwrap();
        assert!(linalg::max_abs(&(psi.matrix() - linalg::outer(&linalg::max_entangled_vector(2)))) < 1e-15);

        let rho = State::from_matrix(q.clone(), &CMat::from_diagonal(&DVector::from_vec(vec![c(0.75, 0.0), c(0.25, 0.0)]))).unwrap();
        let psi = purify(&rho).unwrap();
        assert!(psi.is_pure(1e-12));
        assert!(reduce_to_first(&psi, &q).unwrap().distance(&rho).unwrap() < 1e-12);
        // Schmidt coefficients are the square roots of the marginal spectrum
        let other = crate::theory::reduce_to_second(&psi, &q).unwrap();
        let spec = linalg::eigenvalues(&other.matrix());
        assert!((spec[0] - 0.25).abs() < 1e-12 && (spec[1] - 0.75).abs() < 1e-12);

        let pure = random_pure_state(&q, 3);
        let psi = purify(&pure).unwrap();
        let expected = crate::theory::tensor_states(&pure, &crate::theory::reduce_to_second(&psi, &q).unwrap()).unwrap();
        assert!(psi.distance(&expected).unwrap() < 1e-12);

        assert!(matches!(
            purify(&complete_state(&sys(Backend::Classical, 2))),
            Err(Error::Unsupported { .. })
        ));
    }

    #[test]
    fn purification_marginals_random() {
        for b in [Backend::Quantum, Backend::Real] {
            for seed in 0..20 {
                let a = sys(b, 2 + (seed as usize % 2));
                let rho = random_state(&a, seed);
                let psi = purify(&rho).unwrap();
                assert!(psi.is_pure(1e-10));
                assert!(reduce_to_first(&psi, &a).unwrap().distance(&rho).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn process_space_dimensions() {
        let q = sys(Backend::Quantum, 2);
        assert_eq!(process_space_basis(&q, &q).unwrap().dim, 16);
        let c2 = sys(Backend::Classical, 2);
        let c3 = sys(Backend::Classical, 3);
        assert_eq!(process_space_basis(&c2, &c3).unwrap().dim, 6);
        let r = sys(Backend::Real, 2);
        let dims: Vec<usize> = (0..5).map(|s| process_space_basis_seeded(&r, &r, s).unwrap().dim).collect();
        assert!(dims.iter().all(|&d| d == dims[0]));
        // symmetric tensors over 2x2 real matrices: n(n+1)/2 with n = 4
        assert_eq!(dims[0], 10);
    }

    #[test]
    fn basis_elements_independent_and_spanning() {
        for b in [Backend::Quantum, Backend::Real, Backend::Classical] {
            let a = sys(b, 2);
            let basis = process_space_basis(&a, &a).unwrap();
            let m = linalg::columns(&basis.elements, basis.coord_len());
            assert_eq!(linalg::rank(&m, 1e-9), basis.dim);
            for seed in 0..10 {
                let p = random_process(&a, &a, 100 + seed).unwrap();
                let mut cols = basis.elements.clone();
                cols.push(p.coords());
                assert_eq!(linalg::rank(&linalg::columns(&cols, basis.coord_len()), 1e-9), basis.dim);
            }
        }
    }

    #[test]
    fn lifted_coordinates_match_kraus_lift() {
        for b in [Backend::Quantum, Backend::Real, Backend::Classical] {
            let a = sys(b, 2);
            let bsys = sys(b, 3);
            let r = sys(b, 2);
            let p = random_process(&a, &bsys, 7).unwrap();
            let s = random_state(&a.tensor(&r).unwrap(), 8);
            let via_coords = apply_coords_lifted(&a, &bsys, &p.coords(), &s).unwrap();
            let via_kraus = apply(&lift(&p, &r).unwrap(), &s).unwrap();
            assert!(via_coords.distance(&via_kraus).unwrap() < 1e-12, "{b}");
        }
    }

    #[test]
    fn generators_are_deterministic_and_physical() {
        for b in [Backend::Quantum, Backend::Real, Backend::Classical] {
            let a = sys(b, 3);
            assert_eq!(random_state(&a, 11), random_state(&a, 11));
            assert_eq!(random_process(&a, &a, 11).unwrap(), random_process(&a, &a, 11).unwrap());
            assert_ne!(random_state(&a, 11), random_state(&a, 12));
        }
        let q = sys(Backend::Quantum, 2);
        for seed in 0..1000 {
            let s = random_state(&q, seed);
            assert!(s.is_deterministic() && s.in_cone(1e-12));
            let p = random_process(&q, &q, seed).unwrap();
            assert!(p.is_physical(1e-12) && p.is_deterministic());
        }
    }

    #[test]
    fn random_qubit_mean_is_maximally_mixed() {
        let q = sys(Backend::Quantum, 2);
        let n = 10_000;
        let mut acc = vec![0.0; 4];
        for seed in 0..n {
            for (a, x) in acc.iter_mut().zip(random_state(&q, seed).coords()) {
                *a += x / n as f64;
            }
        }
        let target = complete_state(&q);
        assert!(linalg::max_abs_diff(&acc, target.coords()) < 0.1);
    }

    #[test]
    fn extensions_have_the_right_marginal() {
        for b in [Backend::Quantum, Backend::Real, Backend::Classical] {
            let a = sys(b, 2);
            let e = sys(b, 3);
            let rho = random_state(&a, 4);
            for seed in 0..5 {
                for g in [
                    random_extension(&rho, &e, seed).unwrap(),
                    random_ensemble_extension(&rho, &e, seed).unwrap(),
                ] {
                    assert!(g.is_deterministic());
                    assert!(reduce_to_first(&g, &a).unwrap().distance(&rho).unwrap() < 1e-12);
                }
            }
        }
    }
}
