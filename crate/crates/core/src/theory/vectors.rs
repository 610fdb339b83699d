use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::theory::{Backend, System};
use crate::DEFAULT_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Deterministic,
    Subnormalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EffectKind {
    Deterministic,
    General,
}

/// An element of the real span of states of a system.
///
/// Quantum coordinates are taken over the orthonormal Hermitian basis of
/// [`crate::linalg`]; classical coordinates are the probability vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct State {
    system: System,
    coords: Vec<f64>,
    kind: StateKind,
}

/// An element of the real span of effects of a system, in the same
/// coordinates as states so that pairing is a dot product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Effect {
    system: System,
    coords: Vec<f64>,
    kind: EffectKind,
}

fn check_len(system: &System, coords: &[f64]) -> Result<()> {
    if coords.len() != system.state_dim() {
        return Err(Error::Dimension(format!(
            "{} coordinates for {} (expected {})",
            coords.len(),
            system,
            system.state_dim()
        )));
    }
    if coords.iter().any(|x| !x.is_finite()) {
        return Err(Error::NotPhysical("non-finite coordinate".into()));
    }
    Ok(())
}

fn matrix_coords(system: &System, m: &CMat) -> Result<Vec<f64>> {
    let backend = system.backend();
    if !backend.is_quantum_family() {
        return Err(Error::Unsupported {
            backend,
            what: "density-matrix input",
        });
    }
    let d = system.dim();
    if m.shape() != (d, d) {
        return Err(Error::Dimension(format!("{}x{} matrix for {}", m.nrows(), m.ncols(), system)));
    }
    let scale = linalg::max_abs(m).max(1.0);
    if linalg::max_abs(&(m - m.adjoint())) > DEFAULT_TOL * scale {
        return Err(Error::NotPhysical("matrix is not Hermitian".into()));
    }
    if backend.is_real() && linalg::max_imag(m) > DEFAULT_TOL * scale {
        return Err(Error::NotPhysical("real-backend operator has imaginary entries".into()));
    }
    Ok(linalg::herm_to_coords(m, backend.is_real()))
}

fn coords_matrix(system: &System, coords: &[f64]) -> CMat {
    match system.backend() {
        Backend::Classical => {
            let d = coords.len();
            let mut m = CMat::zeros(d, d);
            for (k, p) in coords.iter().enumerate() {
                m[(k, k)] = linalg::c(*p, 0.0);
            }
            m
        }
        b => linalg::coords_to_herm(coords, system.dim(), b.is_real()),
    }
}

fn unit_coords(system: &System) -> Vec<f64> {
    let d = system.dim();
    let mut v = vec![0.0; system.state_dim()];
    // diagonal units come first in every backend
    v[..d].fill(1.0);
    v
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn min_spectrum(system: &System, coords: &[f64]) -> f64 {
    match system.backend() {
        Backend::Classical => coords.iter().copied().fold(f64::INFINITY, f64::min),
        _ => linalg::min_eigenvalue(&coords_matrix(system, coords)),
    }
}

impl State {
    pub fn from_coords(system: System, coords: Vec<f64>) -> Result<Self> {
        check_len(&system, &coords)?;
        let norm = dot(&unit_coords(&system), &coords);
        let kind = if (norm - 1.0).abs() <= DEFAULT_TOL {
            StateKind::Deterministic
        } else {
            StateKind::Subnormalized
        };
        Ok(State { system, coords, kind })
    }

    /// Density operator input for the quantum backends.
    pub fn from_matrix(system: System, m: &CMat) -> Result<Self> {
        let coords = matrix_coords(&system, m)?;
        Self::from_coords(system, coords)
    }

    /// Probability vector input for the classical backend.
    pub fn from_probs(system: System, probs: Vec<f64>) -> Result<Self> {
        if system.backend() != Backend::Classical {
            return Err(Error::Unsupported {
                backend: system.backend(),
                what: "probability-vector input",
            });
        }
        Self::from_coords(system, probs)
    }

    /// The unique state of the trivial system with weight `p`.
    pub fn scalar(backend: Backend, p: f64) -> Self {
        Self::from_coords(System::trivial(backend), vec![p]).expect("one coordinate")
    }

    pub fn system(&self) -> &System {
        &self.system
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn kind(&self) -> StateKind {
        self.kind
    }

    pub fn is_deterministic(&self) -> bool {
        self.kind == StateKind::Deterministic
    }

    /// Density matrix (diagonal matrix for the classical backend).
    pub fn matrix(&self) -> CMat {
        coords_matrix(&self.system, &self.coords)
    }

    /// Pairing with the deterministic effect.
    pub fn norm(&self) -> f64 {
        dot(&unit_coords(&self.system), &self.coords)
    }

    pub fn in_cone(&self, tol: f64) -> bool {
        min_spectrum(&self.system, &self.coords) >= -tol
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        let spectrum = match self.system.backend() {
            Backend::Classical => {
                let mut v = self.coords.clone();
                v.sort_by(f64::total_cmp);
                v
            }
            _ => linalg::eigenvalues(&self.matrix()),
        };
        let n = spectrum.len();
        n <= 1 || spectrum[n - 2].abs() <= tol
    }

    pub fn scale(&self, s: f64) -> State {
        State::from_coords(self.system.clone(), self.coords.iter().map(|x| x * s).collect()).expect("same length")
    }

    pub fn add(&self, other: &State) -> Result<State> {
        self.system.expect_same(&other.system)?;
        State::from_coords(self.system.clone(), self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &State) -> Result<State> {
        self.add(&other.scale(-1.0))
    }

    /// Largest coordinate difference; systems must agree.
    pub fn distance(&self, other: &State) -> Result<f64> {
        self.system.expect_same(&other.system)?;
        Ok(linalg::max_abs_diff(&self.coords, &other.coords))
    }

    /// Reorders a bipartite state on `first (x) rest` into `rest (x) first`.
    pub fn swap(&self, first: &System) -> Result<State> {
        let rest = self.system.strip_prefix(first)?;
        let swapped = rest.tensor(first)?;
        let (dx, dy) = (first.dim(), rest.dim());
        match self.system.backend() {
            Backend::Classical => {
                let mut p = vec![0.0; dx * dy];
                for x in 0..dx {
                    for y in 0..dy {
                        p[y * dx + x] = self.coords[x * dy + y];
                    }
                }
                State::from_coords(swapped, p)
            }
            _ => {
                let s = linalg::swap_operator(dx, dy);
                State::from_matrix(swapped, &(&s * self.matrix() * s.adjoint()))
            }
        }
    }
}

impl Effect {
    pub fn from_coords(system: System, coords: Vec<f64>) -> Result<Self> {
        check_len(&system, &coords)?;
        let kind = if linalg::max_abs_diff(&coords, &unit_coords(&system)) <= DEFAULT_TOL {
            EffectKind::Deterministic
        } else {
            EffectKind::General
        };
        Ok(Effect { system, coords, kind })
    }

    pub fn from_matrix(system: System, m: &CMat) -> Result<Self> {
        let coords = matrix_coords(&system, m)?;
        Self::from_coords(system, coords)
    }

    /// Response function for the classical backend.
    pub fn from_values(system: System, values: Vec<f64>) -> Result<Self> {
        if system.backend() != Backend::Classical {
            return Err(Error::Unsupported {
                backend: system.backend(),
                what: "response-vector input",
            });
        }
        Self::from_coords(system, values)
    }

    /// The deterministic effect (trace / marginalization).
    pub fn unit(system: &System) -> Self {
        Self::from_coords(system.clone(), unit_coords(system)).expect("unit has the right length")
    }

    pub fn system(&self) -> &System {
        &self.system
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn kind(&self) -> EffectKind {
        self.kind
    }

    pub fn is_deterministic(&self) -> bool {
        self.kind == EffectKind::Deterministic
    }

    pub fn matrix(&self) -> CMat {
        coords_matrix(&self.system, &self.coords)
    }

    /// `0 <= E <= u` on the cone.
    pub fn is_physical(&self, tol: f64) -> bool {
        let complement: Vec<f64> = unit_coords(&self.system).iter().zip(&self.coords).map(|(u, e)| u - e).collect();
        min_spectrum(&self.system, &self.coords) >= -tol && min_spectrum(&self.system, &complement) >= -tol
    }

    pub fn scale(&self, s: f64) -> Effect {
        Effect::from_coords(self.system.clone(), self.coords.iter().map(|x| x * s).collect()).expect("same length")
    }

    pub fn add(&self, other: &Effect) -> Result<Effect> {
        self.system.expect_same(&other.system)?;
        Effect::from_coords(self.system.clone(), self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect())
    }

    /// `u - self`.
    pub fn complement(&self) -> Effect {
        Effect::from_coords(
            self.system.clone(),
            unit_coords(&self.system).iter().zip(&self.coords).map(|(u, e)| u - e).collect(),
        )
        .expect("same length")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{basis_ket, c, outer};

    fn qubit() -> System {
        System::atomic(Backend::Quantum, 2).unwrap()
    }

    #[test]
    fn kind_follows_normalization() {
        let rho = State::from_matrix(qubit(), &(linalg::identity(2) * c(0.5, 0.0))).unwrap();
        assert!(rho.is_deterministic());
        let sub = rho.scale(0.5);
        assert_eq!(sub.kind(), StateKind::Subnormalized);
        let zero = rho.scale(0.0);
        assert!(zero.in_cone(0.0));
        assert_eq!(zero.kind(), StateKind::Subnormalized);
    }

    #[test]
    fn real_backend_rejects_imaginary_entries() {
        let rebit = System::atomic(Backend::Real, 2).unwrap();
        let plus_i = (basis_ket(2, 0) + basis_ket(2, 1) * c(0.0, 1.0)).scale(1.0 / 2f64.sqrt());
        assert!(State::from_matrix(rebit.clone(), &outer(&plus_i)).is_err());
        assert!(State::from_matrix(rebit, &outer(&basis_ket(2, 1))).is_ok());
    }

    #[test]
    fn wrong_length_rejected() {
        assert!(State::from_coords(qubit(), vec![1.0, 0.0]).is_err());
        assert!(Effect::from_coords(qubit(), vec![1.0; 5]).is_err());
    }

    #[test]
    fn unit_effect_is_deterministic_and_physical() {
        let u = Effect::unit(&qubit());
        assert!(u.is_deterministic());
        assert!(u.is_physical(1e-12));
        assert!(!u.scale(1.5).is_physical(1e-12));
        assert!(u.complement().is_physical(1e-12));
    }

    #[test]
    fn purity() {
        let pure = State::from_matrix(qubit(), &outer(&basis_ket(2, 0))).unwrap();
        assert!(pure.is_pure(1e-9));
        let mixed = State::from_matrix(qubit(), &(linalg::identity(2) * c(0.5, 0.0))).unwrap();
        assert!(!mixed.is_pure(1e-9));
    }

    #[test]
    fn swap_round_trip() {
        let sys = System::composite(Backend::Classical, &[2, 3]).unwrap();
        let a = System::atomic(Backend::Classical, 2).unwrap();
        let b = System::atomic(Backend::Classical, 3).unwrap();
        let s = State::from_probs(sys, vec![0.1, 0.2, 0.05, 0.15, 0.3, 0.2]).unwrap();
        let back = s.swap(&a).unwrap().swap(&b).unwrap();
        assert_eq!(back, s);
    }
}
