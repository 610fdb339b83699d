use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, RMat};
use crate::theory::{Backend, Effect, State, System};
use crate::DEFAULT_TOL;

/// A representation that lifts canonically to composites.
#[derive(Debug, Clone, PartialEq)]
pub enum ProcessRepr {
    /// Kraus operators `d_out x d_in`, acting as `X -> sum K X K^dagger`.
    Kraus(Vec<CMat>),
    /// Substochastic matrix `d_out x d_in` acting on probability columns.
    Stochastic(RMat),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ProcessTags {
    pub deterministic: bool,
    pub reversible: bool,
}

/// A physical transformation between two systems.
///
/// States are processes from the trivial system and effects are processes
/// into it, so tests of any type share this representation.
#[derive(Debug, Clone, PartialEq)]
pub struct Process {
    input: System,
    output: System,
    repr: ProcessRepr,
    tags: ProcessTags,
}

fn is_entrywise_real(k: &CMat) -> bool {
    linalg::max_imag(k) <= DEFAULT_TOL * linalg::max_abs(k).max(1.0)
}

fn is_entrywise_imaginary(k: &CMat) -> bool {
    linalg::max_real(k) <= DEFAULT_TOL * linalg::max_abs(k).max(1.0)
}

fn kraus_sum(ops: &[CMat], d_in: usize) -> CMat {
    ops.iter().fold(CMat::zeros(d_in, d_in), |acc, k| acc + k.adjoint() * k)
}

impl Process {
    pub fn kraus(input: System, output: System, ops: Vec<CMat>) -> Result<Self> {
        input.expect_backend(&output)?;
        let backend = input.backend();
        if !backend.is_quantum_family() {
            return Err(Error::Unsupported {
                backend,
                what: "Kraus representation",
            });
        }
        let (d_in, d_out) = (input.dim(), output.dim());
        for k in &ops {
            if k.shape() != (d_out, d_in) {
                return Err(Error::Dimension(format!(
                    "Kraus operator is {}x{}, expected {}x{}",
                    k.nrows(),
                    k.ncols(),
                    d_out,
                    d_in
                )));
            }
            if backend.is_real() && !(is_entrywise_real(k) || is_entrywise_imaginary(k)) {
                return Err(Error::NotRealClass);
            }
        }
        let total = kraus_sum(&ops, d_in);
        let top = if ops.is_empty() { 0.0 } else { linalg::max_eigenvalue(&total) };
        if top > 1.0 + DEFAULT_TOL {
            return Err(Error::NotPhysical(format!("sum of K^dagger K has eigenvalue {top} > 1")));
        }
        let deterministic = !ops.is_empty() && linalg::max_abs(&(total - linalg::identity(d_in))) <= DEFAULT_TOL;
        let reversible = deterministic && ops.len() == 1 && d_in == d_out;
        Ok(Process {
            input,
            output,
            repr: ProcessRepr::Kraus(ops),
            tags: ProcessTags { deterministic, reversible },
        })
    }

    pub fn stochastic(input: System, output: System, m: RMat) -> Result<Self> {
        input.expect_backend(&output)?;
        let backend = input.backend();
        if backend != Backend::Classical {
            return Err(Error::Unsupported {
                backend,
                what: "stochastic-matrix representation",
            });
        }
        if m.shape() != (output.dim(), input.dim()) {
            return Err(Error::Dimension(format!(
                "stochastic matrix is {}x{}, expected {}x{}",
                m.nrows(),
                m.ncols(),
                output.dim(),
                input.dim()
            )));
        }
        if m.iter().any(|&x| x < -DEFAULT_TOL || !x.is_finite()) {
            return Err(Error::NotPhysical("negative transition probability".into()));
        }
        let mut deterministic = true;
        for j in 0..m.ncols() {
            let s: f64 = m.column(j).sum();
            if s > 1.0 + DEFAULT_TOL {
                return Err(Error::NotPhysical(format!("column {j} sums to {s} > 1")));
            }
            deterministic &= (s - 1.0).abs() <= DEFAULT_TOL;
        }
        let reversible = deterministic && m.nrows() == m.ncols() && m.iter().all(|&x| x.abs() <= DEFAULT_TOL || (x - 1.0).abs() <= DEFAULT_TOL);
        Ok(Process {
            input,
            output,
            repr: ProcessRepr::Stochastic(m),
            tags: ProcessTags { deterministic, reversible },
        })
    }

    pub fn identity(system: &System) -> Self {
        let d = system.dim();
        match system.backend() {
            Backend::Classical => Self::stochastic(system.clone(), system.clone(), RMat::identity(d, d)),
            _ => Self::kraus(system.clone(), system.clone(), vec![linalg::identity(d)]),
        }
        .expect("identity is physical")
    }

    /// Preparation `I -> A` of a state in the cone.
    pub fn preparation(state: &State) -> Result<Self> {
        let system = state.system().clone();
        let trivial = System::trivial(system.backend());
        if !state.in_cone(DEFAULT_TOL) || state.norm() > 1.0 + DEFAULT_TOL {
            return Err(Error::NotPhysical("state outside the normalized cone".into()));
        }
        match system.backend() {
            Backend::Classical => {
                let p: Vec<f64> = state.coords().iter().map(|x| x.max(0.0)).collect();
                Self::stochastic(trivial, system, RMat::from_column_slice(p.len(), 1, &p))
            }
            b => {
                let (vals, vecs) = linalg::eigh(&state.matrix(), b.is_real());
                let ops = vals
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| **v > 0.0)
                    .map(|(i, v)| vecs.columns(i, 1).into_owned() * linalg::c(v.sqrt(), 0.0))
                    .collect();
                Self::kraus(trivial, system, ops)
            }
        }
    }

    /// Measurement branch `A -> I` for a physical effect.
    pub fn measurement(effect: &Effect) -> Result<Self> {
        let system = effect.system().clone();
        let trivial = System::trivial(system.backend());
        if !effect.is_physical(DEFAULT_TOL) {
            return Err(Error::NotPhysical("effect outside [0, u]".into()));
        }
        match system.backend() {
            Backend::Classical => {
                let e: Vec<f64> = effect.coords().iter().map(|x| x.clamp(0.0, 1.0)).collect();
                Self::stochastic(system, trivial, RMat::from_row_slice(1, e.len(), &e))
            }
            b => {
                let (vals, vecs) = linalg::eigh(&effect.matrix(), b.is_real());
                let ops = vals
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| **v > 0.0)
                    .map(|(i, v)| vecs.columns(i, 1).adjoint() * linalg::c(v.min(1.0).sqrt(), 0.0))
                    .collect();
                Self::kraus(system, trivial, ops)
            }
        }
    }

    pub fn discard(system: &System) -> Self {
        Self::measurement(&Effect::unit(system)).expect("unit effect is physical")
    }

    pub fn input(&self) -> &System {
        &self.input
    }

    pub fn output(&self) -> &System {
        &self.output
    }

    pub fn repr(&self) -> &ProcessRepr {
        &self.repr
    }

    pub fn tags(&self) -> ProcessTags {
        self.tags
    }

    pub fn backend(&self) -> Backend {
        self.input.backend()
    }

    pub fn is_deterministic(&self) -> bool {
        self.tags.deterministic
    }

    pub fn is_reversible(&self) -> bool {
        self.tags.reversible
    }

    /// Re-checks the physicality constraint at tolerance `tol`.
    pub fn is_physical(&self, tol: f64) -> bool {
        match &self.repr {
            ProcessRepr::Kraus(ops) => {
                let real_ok = !self.backend().is_real() || ops.iter().all(|k| is_entrywise_real(k) || is_entrywise_imaginary(k));
                real_ok && (ops.is_empty() || linalg::max_eigenvalue(&kraus_sum(ops, self.input.dim())) <= 1.0 + tol)
            }
            ProcessRepr::Stochastic(m) => m.iter().all(|&x| x >= -tol) && (0..m.ncols()).all(|j| m.column(j).sum() <= 1.0 + tol),
        }
    }

    /// Natural (superoperator) matrix: `vec(P(X)) = S vec(X)` with row-major
    /// vectorization; for the classical backend the stochastic matrix itself.
    pub fn superoperator(&self) -> CMat {
        match &self.repr {
            ProcessRepr::Kraus(ops) => {
                let (d_in, d_out) = (self.input.dim(), self.output.dim());
                ops.iter()
                    .fold(CMat::zeros(d_out * d_out, d_in * d_in), |acc, k| acc + linalg::kron(k, &k.conjugate()))
            }
            ProcessRepr::Stochastic(m) => linalg::to_complex(m),
        }
    }

    /// Coordinates of the transformation in the fixed operational basis:
    /// the superoperator entries, real and imaginary parts interleaved
    /// (quantum) or the stochastic matrix entries (classical), row-major.
    pub fn coords(&self) -> Vec<f64> {
        let s = self.superoperator();
        match &self.repr {
            ProcessRepr::Stochastic(m) => m.transpose().iter().copied().collect(),
            ProcessRepr::Kraus(_) => {
                let mut out = Vec::with_capacity(2 * s.len());
                for i in 0..s.nrows() {
                    for j in 0..s.ncols() {
                        out.push(s[(i, j)].re);
                        out.push(s[(i, j)].im);
                    }
                }
                out
            }
        }
    }

    pub fn kraus_ops(&self) -> Option<&[CMat]> {
        match &self.repr {
            ProcessRepr::Kraus(ops) => Some(ops),
            ProcessRepr::Stochastic(_) => None,
        }
    }

    /// Weighting by a probability `p` in `[0, 1]`.
    pub fn scale(&self, p: f64) -> Result<Self> {
        if !(0.0..=1.0 + DEFAULT_TOL).contains(&p) {
            return Err(Error::InvalidScalar(p));
        }
        match &self.repr {
            ProcessRepr::Kraus(ops) => {
                let s = linalg::c(p.sqrt(), 0.0);
                Self::kraus(self.input.clone(), self.output.clone(), ops.iter().map(|k| k * s).collect())
            }
            ProcessRepr::Stochastic(m) => Self::stochastic(self.input.clone(), self.output.clone(), m * p),
        }
    }

    /// Coarse-graining of two branches. Fails if the sum leaves the
    /// physical set, i.e. the branches cannot belong to one test.
    pub fn sum(&self, other: &Process) -> Result<Self> {
        self.input.expect_same(&other.input)?;
        self.output.expect_same(&other.output)?;
        match (&self.repr, &other.repr) {
            (ProcessRepr::Kraus(a), ProcessRepr::Kraus(b)) => {
                let ops = a.iter().chain(b.iter()).cloned().collect();
                Self::kraus(self.input.clone(), self.output.clone(), ops)
            }
            (ProcessRepr::Stochastic(a), ProcessRepr::Stochastic(b)) => Self::stochastic(self.input.clone(), self.output.clone(), a + b),
            _ => unreachable!("representation is fixed by the backend"),
        }
    }

    /// Sequential composition `after . self`.
    pub fn then(&self, after: &Process) -> Result<Self> {
        self.output.expect_same(&after.input)?;
        match (&self.repr, &after.repr) {
            (ProcessRepr::Kraus(a), ProcessRepr::Kraus(b)) => {
                let mut ops = Vec::with_capacity(a.len() * b.len());
                for kb in b {
                    for ka in a {
                        ops.push(kb * ka);
                    }
                }
                Self::kraus(self.input.clone(), after.output.clone(), ops)
            }
            (ProcessRepr::Stochastic(a), ProcessRepr::Stochastic(b)) => Self::stochastic(self.input.clone(), after.output.clone(), b * a),
            _ => unreachable!("representation is fixed by the backend"),
        }
    }

    /// Parallel composition `self (x) other`.
    pub fn tensor(&self, other: &Process) -> Result<Self> {
        let input = self.input.tensor(&other.input)?;
        let output = self.output.tensor(&other.output)?;
        match (&self.repr, &other.repr) {
            (ProcessRepr::Kraus(a), ProcessRepr::Kraus(b)) => {
                let mut ops = Vec::with_capacity(a.len() * b.len());
                for ka in a {
                    for kb in b {
                        ops.push(linalg::kron(ka, kb));
                    }
                }
                Self::kraus(input, output, ops)
            }
            (ProcessRepr::Stochastic(a), ProcessRepr::Stochastic(b)) => Self::stochastic(input, output, linalg::kron_real(a, b)),
            _ => unreachable!("representation is fixed by the backend"),
        }
    }

    /// Largest difference between the operational coordinates of two processes.
    pub fn distance(&self, other: &Process) -> Result<f64> {
        self.input.expect_same(&other.input)?;
        self.output.expect_same(&other.output)?;
        Ok(linalg::max_abs_diff(&self.coords(), &other.coords()))
    }
}

/// An outcome-labelled family of transformations of a common type whose
/// coarse-graining is deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct Test {
    branches: Vec<(String, Process)>,
}

impl Test {
    pub fn new(branches: Vec<(String, Process)>) -> Result<Self> {
        let Some((_, first)) = branches.first() else {
            return Err(Error::NotATest("no outcomes".into()));
        };
        for (_, p) in &branches[1..] {
            first.input.expect_same(&p.input)?;
            first.output.expect_same(&p.output)?;
        }
        let mut total = first.clone();
        for (_, p) in &branches[1..] {
            total = total.sum(p).map_err(|e| Error::NotATest(e.to_string()))?;
        }
        if !total.is_deterministic() {
            return Err(Error::NotATest("branches do not sum to a deterministic transformation".into()));
        }
        Ok(Test { branches })
    }

    /// Single-outcome test of a deterministic transformation.
    pub fn deterministic(p: Process) -> Result<Self> {
        Self::new(vec![("0".into(), p)])
    }

    /// Preparation test from subnormalized states summing to a deterministic state.
    pub fn source(states: &[State]) -> Result<Self> {
        let branches = states
            .iter()
            .enumerate()
            .map(|(i, s)| Ok((i.to_string(), Process::preparation(s)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(branches)
    }

    /// Observation test from effects summing to the deterministic effect.
    pub fn observation(effects: &[Effect]) -> Result<Self> {
        let branches = effects
            .iter()
            .enumerate()
            .map(|(i, e)| Ok((i.to_string(), Process::measurement(e)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(branches)
    }

    pub fn branches(&self) -> &[(String, Process)] {
        &self.branches
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    pub fn input(&self) -> &System {
        &self.branches[0].1.input
    }

    pub fn output(&self) -> &System {
        &self.branches[0].1.output
    }

    /// The transformation obtained by joining all outcomes.
    pub fn total(&self) -> Process {
        let mut acc = self.branches[0].1.clone();
        for (_, p) in &self.branches[1..] {
            acc = acc.sum(p).expect("validated at construction");
        }
        acc
    }

    /// The prepared states when this is a test of type `I -> A`.
    pub fn prepared_states(&self) -> Result<Vec<State>> {
        let trivial = State::scalar(self.input().backend(), 1.0);
        self.branches.iter().map(|(_, p)| crate::theory::apply(p, &trivial)).collect()
    }

    /// Sequential composition: `after` is performed on the output of `self`,
    /// outcomes are pairs.
    pub fn then(&self, after: &Test) -> Result<Test> {
        let mut branches = Vec::with_capacity(self.len() * after.len());
        for (lx, px) in &self.branches {
            for (ly, py) in &after.branches {
                branches.push((format!("{lx},{ly}"), px.then(py)?));
            }
        }
        Test::new(branches)
    }

    pub fn tensor(&self, other: &Test) -> Result<Test> {
        let mut branches = Vec::with_capacity(self.len() * other.len());
        for (lx, px) in &self.branches {
            for (ly, py) in &other.branches {
                branches.push((format!("{lx},{ly}"), px.tensor(py)?));
            }
        }
        Test::new(branches)
    }
}
