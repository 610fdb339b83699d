use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::theory::{Backend, Effect, ProbVector, Process, ProcessRepr, State, System, Test};

/// Closed-diagram probability `e(s)`, linear in both arguments.
pub fn pair(e: &Effect, s: &State) -> Result<f64> {
    e.system().expect_same(s.system())?;
    Ok(e.coords().iter().zip(s.coords()).map(|(a, b)| a * b).sum())
}

pub fn tensor_systems(a: &System, b: &System) -> Result<System> {
    a.tensor(b)
}

pub fn tensor_states(s: &State, t: &State) -> Result<State> {
    let system = s.system().tensor(t.system())?;
    match system.backend() {
        Backend::Classical => {
            let mut p = Vec::with_capacity(system.dim());
            for x in s.coords() {
                for y in t.coords() {
                    p.push(x * y);
                }
            }
            State::from_coords(system, p)
        }
        _ => State::from_matrix(system, &linalg::kron(&s.matrix(), &t.matrix())),
    }
}

pub fn tensor_effects(e: &Effect, f: &Effect) -> Result<Effect> {
    let system = e.system().tensor(f.system())?;
    match system.backend() {
        Backend::Classical => {
            let mut v = Vec::with_capacity(system.dim());
            for x in e.coords() {
                for y in f.coords() {
                    v.push(x * y);
                }
            }
            Effect::from_coords(system, v)
        }
        _ => Effect::from_matrix(system, &linalg::kron(&e.matrix(), &f.matrix())),
    }
}

pub fn tensor_processes(p: &Process, q: &Process) -> Result<Process> {
    p.tensor(q)
}

pub(crate) fn apply_kraus(ops: &[CMat], rho: &CMat, d_out: usize) -> CMat {
    ops.iter().fold(CMat::zeros(d_out, d_out), |acc, k| acc + k * rho * k.adjoint())
}

pub fn apply(p: &Process, s: &State) -> Result<State> {
    p.input().expect_same(s.system())?;
    let out = p.output().clone();
    match p.repr() {
        ProcessRepr::Kraus(ops) => State::from_matrix(out.clone(), &apply_kraus(ops, &s.matrix(), out.dim())),
        ProcessRepr::Stochastic(m) => {
            let v = m * nalgebra::DVector::from_column_slice(s.coords());
            State::from_coords(out, v.iter().copied().collect())
        }
    }
}

/// Heisenberg picture: the effect `e . P` on the input of `P`.
pub fn pull_back(e: &Effect, p: &Process) -> Result<Effect> {
    p.output().expect_same(e.system())?;
    let input = p.input().clone();
    match p.repr() {
        ProcessRepr::Kraus(ops) => {
            let em = e.matrix();
            let d = input.dim();
            let m = ops.iter().fold(CMat::zeros(d, d), |acc, k| acc + k.adjoint() * &em * k);
            Effect::from_matrix(input, &m)
        }
        ProcessRepr::Stochastic(m) => {
            let v = m.transpose() * nalgebra::DVector::from_column_slice(e.coords());
            Effect::from_coords(input, v.iter().copied().collect())
        }
    }
}

/// `P (x) id_C`.
pub fn lift(p: &Process, ancilla: &System) -> Result<Process> {
    p.tensor(&Process::identity(ancilla))
}

/// `id_C (x) P`.
pub fn lift_left(ancilla: &System, p: &Process) -> Result<Process> {
    Process::identity(ancilla).tensor(p)
}

/// Joins the outcomes of `t` according to a partition of its outcome indices.
pub fn coarse_grain(t: &Test, partition: &[Vec<usize>]) -> Result<Test> {
    let n = t.len();
    let mut seen = vec![false; n];
    for block in partition {
        if block.is_empty() {
            return Err(Error::InvalidPartition("empty block".into()));
        }
        for &i in block {
            if i >= n {
                return Err(Error::InvalidPartition(format!("outcome {i} out of range (test has {n})")));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidPartition(format!("outcome {i} appears twice")));
            }
        }
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::InvalidPartition(format!("outcome {missing} not covered")));
    }
    let branches = partition
        .iter()
        .map(|block| {
            let (label0, p0) = &t.branches()[block[0]];
            let mut label = label0.clone();
            let mut acc = p0.clone();
            for &i in &block[1..] {
                let (l, p) = &t.branches()[i];
                label.push('+');
                label.push_str(l);
                acc = acc.sum(p)?;
            }
            Ok((label, acc))
        })
        .collect::<Result<Vec<_>>>()?;
    Test::new(branches)
}

/// Randomized test: outcome `(i, x)` is `probs[i] * T_i,x`.
pub fn randomize(tests: &[Test], probs: &ProbVector) -> Result<Test> {
    if tests.len() != probs.len() {
        return Err(Error::LengthMismatch {
            tests: tests.len(),
            probs: probs.len(),
        });
    }
    let Some(first) = tests.first() else {
        return Err(Error::NotATest("no tests to randomize".into()));
    };
    let mut branches = Vec::new();
    for (i, (t, p)) in tests.iter().zip(probs.entries()).enumerate() {
        first.input().expect_same(t.input())?;
        first.output().expect_same(t.output())?;
        for (label, proc) in t.branches() {
            let label = if tests.len() == 1 { label.clone() } else { format!("{i}:{label}") };
            branches.push((label, proc.scale(p.value())?));
        }
    }
    Test::new(branches)
}

/// Which part of a bipartite state survives in [`marginal`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    First,
    Second,
}

/// Contracts `e` against the discarded part of `g`. The discarded part is
/// the trailing (`Keep::First`) or leading (`Keep::Second`) factors matching
/// `e.system()`.
pub fn marginal(g: &State, keep: Keep, e: &Effect) -> Result<State> {
    let sys = g.system();
    let (kept, dx, dy) = match keep {
        Keep::First => {
            let kept = sys.strip_suffix(e.system())?;
            let (dx, dy) = (kept.dim(), e.system().dim());
            (kept, dx, dy)
        }
        Keep::Second => {
            let kept = sys.strip_prefix(e.system())?;
            let (dx, dy) = (e.system().dim(), kept.dim());
            (kept, dx, dy)
        }
    };
    match sys.backend() {
        Backend::Classical => {
            let p = g.coords();
            let w = e.coords();
            let out = match keep {
                Keep::First => (0..dx).map(|x| (0..dy).map(|y| w[y] * p[x * dy + y]).sum()).collect(),
                Keep::Second => (0..dy).map(|y| (0..dx).map(|x| w[x] * p[x * dy + y]).sum()).collect(),
            };
            State::from_coords(kept, out)
        }
        _ => {
            let m = match keep {
                Keep::First => linalg::contract_second(&g.matrix(), dx, dy, &e.matrix()),
                Keep::Second => linalg::contract_first(&g.matrix(), dx, dy, &e.matrix()),
            };
            State::from_matrix(kept, &m)
        }
    }
}

/// Reduced state on the leading factors `a` of `g`.
pub fn reduce_to_first(g: &State, a: &System) -> Result<State> {
    let rest = g.system().strip_prefix(a)?;
    marginal(g, Keep::First, &Effect::unit(&rest))
}

/// Reduced state on the trailing factors `b` of `g`.
pub fn reduce_to_second(g: &State, b: &System) -> Result<State> {
    let rest = g.system().strip_suffix(b)?;
    marginal(g, Keep::Second, &Effect::unit(&rest))
}
