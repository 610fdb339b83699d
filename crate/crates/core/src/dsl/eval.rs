use std::collections::BTreeMap;

use super::ast::{Decl, DeclKind, Entry, Literal, MatrixLit, Pos};
use super::typecheck::{TypedExpr, TypedNode, TypedProgram};
use super::Diagnostic;
use crate::backends::{bell_effect, complete_state, max_entangled_state};
use crate::linalg::{c, outer, CMat, RMat};
use crate::theory::{apply, pull_back, Backend, Effect, Process, State, System};

/// Backend values bound to the atoms of a program.
pub type Env = BTreeMap<String, Process>;

#[derive(Debug, Clone, PartialEq)]
pub enum EvalResult {
    Scalar(f64),
    State(State),
    Effect(Effect),
    Process(Process),
}

impl EvalResult {
    pub fn kind(&self) -> &'static str {
        match self {
            EvalResult::Scalar(_) => "scalar",
            EvalResult::State(_) => "state",
            EvalResult::Effect(_) => "effect",
            EvalResult::Process(_) => "process",
        }
    }

    pub fn scalar(&self) -> Option<f64> {
        match self {
            EvalResult::Scalar(p) => Some(*p),
            _ => None,
        }
    }

    /// Operational coordinates of the payload.
    pub fn coords(&self) -> Vec<f64> {
        match self {
            EvalResult::Scalar(p) => vec![*p],
            EvalResult::State(s) => s.coords().to_vec(),
            EvalResult::Effect(e) => e.coords().to_vec(),
            EvalResult::Process(p) => p.coords(),
        }
    }
}

fn cmat(m: &MatrixLit) -> CMat {
    CMat::from_fn(m.len(), m.first().map_or(0, |r| r.len()), |i, j| c(m[i][j].re(), m[i][j].im()))
}

fn ket(v: &[Entry]) -> CMat {
    CMat::from_fn(v.len(), 1, |i, _| c(v[i].re(), v[i].im()))
}

fn literal_name(l: &Literal) -> &'static str {
    match l {
        Literal::MaxMix => "maxmix",
        Literal::Bell => "bell",
        Literal::BellEffect => "bell_effect",
        Literal::Unit => "unit",
        Literal::Matrix(_) => "matrix",
        Literal::Vector(_) => "vector",
        Literal::Ket(_) => "ket",
        Literal::Kraus(_) => "kraus",
        Literal::Stoch(_) => "stoch",
    }
}

/// The two halves of a wire list with equal dimensions, for `bell` literals.
fn bell_half(sys: &System) -> crate::Result<System> {
    let f = sys.factors();
    if !f.len().is_multiple_of(2) || f[..f.len() / 2].iter().product::<usize>() != f[f.len() / 2..].iter().product::<usize>() {
        return Err(crate::Error::Dimension(format!("bell needs two halves of equal dimension, got {sys}")));
    }
    Ok(sys.split_at(f.len() / 2)?.0)
}

fn relabel_state(s: State, sys: &System) -> crate::Result<State> {
    State::from_coords(sys.clone(), s.coords().to_vec())
}

fn relabel_effect(e: Effect, sys: &System) -> crate::Result<Effect> {
    Effect::from_coords(sys.clone(), e.coords().to_vec())
}

fn literal_process(kind: DeclKind, input: &System, output: &System, lit: &Literal) -> crate::Result<Process> {
    let backend = input.backend();
    let wrong = || crate::Error::Unsupported {
        backend,
        what: "this literal in this declaration",
    };
    match (kind, lit) {
        (_, Literal::Kraus(ms)) => Process::kraus(input.clone(), output.clone(), ms.iter().map(cmat).collect()),
        (_, Literal::Stoch(m)) => {
            let rows = m.len();
            let cols = m.first().map_or(0, |r| r.len());
            if m.iter().flatten().any(|e| e.im() != 0.0) {
                return Err(crate::Error::NotPhysical("stochastic entries must be real".into()));
            }
            Process::stochastic(input.clone(), output.clone(), RMat::from_fn(rows, cols, |i, j| m[i][j].re()))
        }
        (DeclKind::State, lit) => {
            let s = match lit {
                Literal::MaxMix => complete_state(output),
                Literal::Bell => relabel_state(max_entangled_state(&bell_half(output)?), output)?,
                Literal::Matrix(m) => State::from_matrix(output.clone(), &cmat(m))?,
                Literal::Vector(v) => State::from_probs(output.clone(), v.clone())?,
                Literal::Ket(v) => State::from_matrix(output.clone(), &outer(&ket(v)))?,
                _ => return Err(wrong()),
            };
            Process::preparation(&s)
        }
        (DeclKind::Effect, lit) => {
            let e = match lit {
                Literal::Unit => Effect::unit(input),
                Literal::BellEffect => relabel_effect(bell_effect(&bell_half(input)?), input)?,
                Literal::Matrix(m) => Effect::from_matrix(input.clone(), &cmat(m))?,
                Literal::Vector(v) => Effect::from_values(input.clone(), v.clone())?,
                Literal::Ket(v) => Effect::from_matrix(input.clone(), &outer(&ket(v)))?,
                _ => return Err(wrong()),
            };
            Process::measurement(&e)
        }
        (DeclKind::Proc, _) => Err(wrong()),
    }
}

/// Builds the backend value of every atom declaration.
pub fn bind(program: &TypedProgram) -> Result<Env, Diagnostic> {
    let mut env = Env::new();
    for d in &program.program.decls {
        if let Decl::Atom {
            kind,
            name,
            input,
            output,
            lit,
            pos,
        } = d
        {
            let (i, o) = (program.system_of(input), program.system_of(output));
            let p = literal_process(*kind, &i, &o, lit)
                .map_err(|e| Diagnostic::new(*pos, format!("in {} '{name}' = {}: {e}", kind.keyword(), literal_name(lit))))?;
            env.insert(name.clone(), p);
        }
    }
    Ok(env)
}

fn eval_node(t: &TypedExpr, program: &TypedProgram, env: &Env) -> Result<Process, Diagnostic> {
    let at = |pos: Pos| move |e: crate::Error| Diagnostic::new(pos, e.to_string());
    match &t.node {
        TypedNode::Atom(name) => env
            .get(name)
            .cloned()
            .ok_or_else(|| Diagnostic::new(t.pos, format!("unbound atom '{name}'"))),
        TypedNode::Id(s) => Ok(Process::identity(&program.system_of(s))),
        TypedNode::Seq(f, g) => {
            let pf = eval_node(f, program, env)?;
            let pg = eval_node(g, program, env)?;
            pg.then(&pf).map_err(at(t.pos))
        }
        TypedNode::Par(f, g) => {
            let pf = eval_node(f, program, env)?;
            let pg = eval_node(g, program, env)?;
            pf.tensor(&pg).map_err(at(t.pos))
        }
    }
}

/// Contracts the diagram. Closed diagrams give a scalar, diagrams with only
/// outputs a state, with only inputs an effect, otherwise a process.
pub fn evaluate(program: &TypedProgram, env: &Env) -> Result<EvalResult, Diagnostic> {
    let p = eval_node(&program.root, program, env)?;
    let pos = program.root.pos;
    let err = |e: crate::Error| Diagnostic::new(pos, e.to_string());
    let backend: Backend = program.backend;
    let ty = &program.root.ty;
    let one = State::scalar(backend, 1.0);
    Ok(match (ty.input.is_empty(), ty.output.is_empty()) {
        (true, true) => EvalResult::Scalar(apply(&p, &one).map_err(err)?.coords()[0]),
        (true, false) => EvalResult::State(apply(&p, &one).map_err(err)?),
        (false, true) => EvalResult::Effect(pull_back(&Effect::unit(&System::trivial(backend)), &p).map_err(err)?),
        (false, false) => EvalResult::Process(p),
    })
}
