//! Alternating ascent over the state, Bob's and Alice's observables.
//!
//! Each sweep performs three exact maximizations in turn: the state becomes
//! the top eigenvector of the Bell operator, every `B_y` aligns with its
//! effective Bloch vector, and Alice's observables are chosen the same way.
//! With the parity constraint `Σ Aₓ = 0` Alice's step maximizes
//! `Σ aₓ·vₓ` over unit vectors with zero sum, whose optimum is
//! `aₓ = (vₓ − m)/|vₓ − m|` for the geometric median `m` of the `vₓ`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, UnitSphere};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::QuantumSetup;
use crate::observables::{check_odd, Observable};
use crate::qmat::{eig_hermitian, tensor, CMatrix, StateVector, EPS};

type Vec3 = [f64; 3];

/// Value slack below which a sub-step is not considered a decrease.
const MONOTONE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeesawConfig {
    pub seed: u64,
    pub restarts: usize,
    pub max_iters: usize,
    /// Stop when a full sweep improves the value by less than this.
    pub tol: f64,
    /// Impose `Σ Aₓ = 0` on Alice.
    pub parity: bool,
}

impl Default for SeesawConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            restarts: 8,
            max_iters: 5000,
            tol: 1e-9,
            parity: true,
        }
    }
}

/// One restart.
#[derive(Debug, Clone)]
pub struct SeesawRun {
    pub setup: QuantumSetup,
    pub value: f64,
    pub iterations: usize,
    /// Sweeps that raised the value by at least `tol`.
    pub updates: usize,
    pub converged: bool,
    /// Value after every sub-step, starting from the initial setup.
    pub trace: Vec<f64>,
}

impl SeesawRun {
    pub fn is_monotone(&self) -> bool {
        self.trace.windows(2).all(|w| w[1] >= w[0] - MONOTONE_SLACK)
    }
}

#[derive(Debug, Clone)]
pub struct SeesawOutcome {
    pub best: SeesawRun,
    pub best_restart: usize,
    pub restart_values: Vec<f64>,
    /// Whether every restart's trace, not only the best one, was monotone.
    pub all_monotone: bool,
}

impl SeesawOutcome {
    pub fn value(&self) -> f64 {
        self.best.value
    }

    pub fn setup(&self) -> &QuantumSetup {
        &self.best.setup
    }

    pub fn converged(&self) -> bool {
        self.best.converged
    }
}

/// Runs `config.restarts` independent ascents from random Bloch vectors and
/// keeps the best (earliest restart on ties).
pub fn seesaw(n: usize, config: &SeesawConfig) -> Result<SeesawOutcome> {
    check_odd(n)?;
    if config.restarts == 0 || config.max_iters == 0 {
        return Err(Error::InvalidParams("restarts and iterations must be positive".into()));
    }
    let runs: Vec<SeesawRun> = (0..config.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(r as u64);
            let mut draw = || -> Vec<Vec3> { (0..n).map(|_| UnitSphere.sample(&mut rng)).collect() };
            let raw_alice = draw();
            let bob = draw();
            let alice = if config.parity {
                constrained_directions(&raw_alice).unwrap_or_else(|| balanced_fallback(n))
            } else {
                raw_alice
            };
            ascend(alice, bob, None, config)
        })
        .collect::<Result<_>>()?;
    let restart_values: Vec<f64> = runs.iter().map(|r| r.value).collect();
    let all_monotone = runs.iter().all(SeesawRun::is_monotone);
    let mut best_restart = 0;
    for (i, v) in restart_values.iter().enumerate() {
        if *v > restart_values[best_restart] {
            best_restart = i;
        }
    }
    let best = runs.into_iter().nth(best_restart).expect("at least one restart");
    Ok(SeesawOutcome {
        best,
        best_restart,
        restart_values,
        all_monotone,
    })
}

/// Ascent from a given setup; its state is kept as the starting point.
pub fn seesaw_from(setup: &QuantumSetup, config: &SeesawConfig) -> Result<SeesawRun> {
    if config.max_iters == 0 {
        return Err(Error::InvalidParams("iterations must be positive".into()));
    }
    let alice = setup.alice.iter().map(Observable::bloch).collect();
    let bob = setup.bob.iter().map(Observable::bloch).collect();
    ascend(alice, bob, Some(setup.state().clone()), config)
}

fn ascend(mut alice: Vec<Vec3>, mut bob: Vec<Vec3>, state: Option<StateVector>, config: &SeesawConfig) -> Result<SeesawRun> {
    let n = alice.len();
    let mut psi = match state {
        Some(s) => s,
        None => top_state(&alice, &bob)?.1,
    };
    let mut value = expectation(&alice, &bob, &psi);
    let mut trace = vec![value];
    let mut updates = 0;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < config.max_iters {
        iterations += 1;
        let start = value;

        let (top, next) = top_state(&alice, &bob)?;
        if top > value {
            psi = next;
            value = top;
        }
        trace.push(value);

        for (y, slot) in bob.iter_mut().enumerate() {
            if let Some(dir) = unit(bob_field(&alice, &psi, y)) {
                *slot = dir;
            }
        }
        value = expectation(&alice, &bob, &psi);
        trace.push(value);

        let fields: Vec<Vec3> = (0..n).map(|x| alice_field(&bob, &psi, x)).collect();
        let candidate = if config.parity {
            constrained_directions(&fields)
        } else {
            fields.iter().zip(&alice).map(|(f, a)| Some(unit(*f).unwrap_or(*a))).collect()
        };
        if let Some(cand) = candidate {
            let v = expectation(&cand, &bob, &psi);
            if v >= value {
                alice = cand;
                value = v;
            }
        }
        trace.push(value);

        if value - start >= config.tol {
            updates += 1;
        } else {
            converged = true;
            break;
        }
    }
    let to_obs = |vs: &[Vec3]| -> Result<Vec<Observable>> { vs.iter().map(|v| Observable::from_direction(*v)).collect() };
    let setup = QuantumSetup::new(psi, to_obs(&alice)?, to_obs(&bob)?)?;
    Ok(SeesawRun {
        setup,
        value,
        iterations,
        updates,
        converged,
        trace,
    })
}

fn obs_matrix(v: Vec3) -> CMatrix {
    CMatrix::from_bloch(0.0, v)
}

fn bell_operator(alice: &[Vec3], bob: &[Vec3]) -> CMatrix {
    let mut w = CMatrix::zeros(4, 4);
    for (x, a) in alice.iter().enumerate() {
        let am = obs_matrix(*a);
        for (y, b) in bob.iter().enumerate() {
            let coef = if x == y { -1.0 } else { 1.0 };
            w = &w + &tensor(&am, &obs_matrix(*b)).scale_real(coef);
        }
    }
    w
}

fn expectation(alice: &[Vec3], bob: &[Vec3], psi: &StateVector) -> f64 {
    psi.expectation(&bell_operator(alice, bob)).expect("dimension 4").re
}

fn top_state(alice: &[Vec3], bob: &[Vec3]) -> Result<(f64, StateVector)> {
    let (value, vec) = eig_hermitian(&bell_operator(alice, bob))?.top();
    Ok((value, StateVector::normalized(vec)?))
}

fn combination(vs: &[Vec3], skip_sign: usize) -> Vec3 {
    let mut out = [0.0; 3];
    for (i, v) in vs.iter().enumerate() {
        let c = if i == skip_sign { -1.0 } else { 1.0 };
        for k in 0..3 {
            out[k] += c * v[k];
        }
    }
    out
}

/// `w^i = ⟨ψ| C_y ⊗ σ_i |ψ⟩` with `C_y = Σₓ α^{x,y} Aₓ`.
fn bob_field(alice: &[Vec3], psi: &StateVector, y: usize) -> Vec3 {
    let c = obs_matrix(combination(alice, y));
    let [sx, sy, sz] = CMatrix::paulis();
    [sx, sy, sz].map(|s| psi.expectation(&tensor(&c, &s)).expect("dimension 4").re)
}

/// `v^i = ⟨ψ| σ_i ⊗ Dₓ |ψ⟩` with `Dₓ = Σ_y α^{x,y} B_y`.
fn alice_field(bob: &[Vec3], psi: &StateVector, x: usize) -> Vec3 {
    let d = obs_matrix(combination(bob, x));
    let [sx, sy, sz] = CMatrix::paulis();
    [sx, sy, sz].map(|s| psi.expectation(&tensor(&s, &d)).expect("dimension 4").re)
}

fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn unit(v: Vec3) -> Option<Vec3> {
    let len = dot(v, v).sqrt();
    (len > EPS).then(|| v.map(|c| c / len))
}

/// Unit vectors `aₓ` with `Σ aₓ = 0` maximizing `Σ aₓ·vₓ`, or `None` when the
/// geometric median of the `vₓ` sits on one of the points.
pub(crate) fn constrained_directions(vs: &[Vec3]) -> Option<Vec<Vec3>> {
    let m = geometric_median(vs);
    let dirs: Option<Vec<Vec3>> = vs.iter().map(|v| unit(sub(*v, m))).collect();
    let dirs = dirs?;
    let total = dirs.iter().fold([0.0; 3], |acc, d| [acc[0] + d[0], acc[1] + d[1], acc[2] + d[2]]);
    (dot(total, total).sqrt() < 1e-10).then_some(dirs)
}

fn geometric_median(vs: &[Vec3]) -> Vec3 {
    let n = vs.len() as f64;
    let mut m = vs.iter().fold([0.0; 3], |acc, v| [acc[0] + v[0] / n, acc[1] + v[1] / n, acc[2] + v[2] / n]);
    // Weiszfeld iterations to get close, then Newton steps for full precision.
    for _ in 0..200 {
        let mut num = [0.0; 3];
        let mut den = 0.0;
        for v in vs {
            let d = dot(sub(*v, m), sub(*v, m)).sqrt();
            if d < 1e-14 {
                return m;
            }
            for k in 0..3 {
                num[k] += v[k] / d;
            }
            den += 1.0 / d;
        }
        let next = num.map(|c| c / den);
        let step = dot(sub(next, m), sub(next, m)).sqrt();
        m = next;
        if step < 1e-10 {
            break;
        }
    }
    for _ in 0..50 {
        let mut grad = [0.0; 3];
        let mut hess = [[0.0; 3]; 3];
        for v in vs {
            let diff = sub(*v, m);
            let d = dot(diff, diff).sqrt();
            if d < 1e-14 {
                return m;
            }
            let u = diff.map(|c| c / d);
            for i in 0..3 {
                grad[i] -= u[i];
                for j in 0..3 {
                    let id = if i == j { 1.0 } else { 0.0 };
                    hess[i][j] += (id - u[i] * u[j]) / d;
                }
            }
        }
        if dot(grad, grad).sqrt() < 1e-14 {
            break;
        }
        let Some(step) = solve3(hess, grad.map(|g| -g)) else { break };
        m = [m[0] + step[0], m[1] + step[1], m[2] + step[2]];
    }
    m
}

fn det3(a: [[f64; 3]; 3]) -> f64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

fn solve3(a: [[f64; 3]; 3], b: Vec3) -> Option<Vec3> {
    let det = det3(a);
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    if det.abs() <= 1e-12 * scale.powi(3) {
        return None;
    }
    let mut out = [0.0; 3];
    for (k, slot) in out.iter_mut().enumerate() {
        let mut ak = a;
        for i in 0..3 {
            ak[i][k] = b[i];
        }
        *slot = det3(ak) / det;
    }
    Some(out)
}

/// Deterministic zero-sum starting point for degenerate draws.
fn balanced_fallback(n: usize) -> Vec<Vec3> {
    (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            [t.sin(), 0.0, t.cos()]
        })
        .collect()
}
