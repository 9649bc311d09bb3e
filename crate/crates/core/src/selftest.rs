//! SWAP-isometry self-testing of the maximally entangled state and of the
//! optimal observables.
//!
//! Register order is `[A, B, A′, B′]` for three inputs and
//! `[A, B, A′, B′, A″, B″]` for five, qubit 0 being the most significant.
//! Controlled gates act when their ancilla is `|1⟩`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::QuantumSetup;
use crate::qmat::{inner, kron_vec, norm, tensor, tensor_all, CMatrix, C64, EPS};

/// Operators extracted from the observables for the isometry.
#[derive(Debug, Clone)]
pub struct SelfTestOperators {
    pub n: usize,
    pub z_a: CMatrix,
    pub x_a: CMatrix,
    pub y_a: Option<CMatrix>,
    pub z_b: CMatrix,
    pub x_b: CMatrix,
    pub y_b: Option<CMatrix>,
    /// `‖X_A|ψ⟩‖, ‖X_B|ψ⟩‖` and, for `n ≥ 5`, `‖Y_A|ψ⟩‖, ‖Y_B|ψ⟩‖`.
    pub divisors: Vec<f64>,
}

impl SelfTestOperators {
    /// Largest `‖O² − 𝕀‖` over the normalized operators.
    pub fn square_deviation(&self) -> f64 {
        let id = CMatrix::identity(2);
        [Some(&self.z_a), Some(&self.x_a), self.y_a.as_ref(), Some(&self.z_b), Some(&self.x_b), self.y_b.as_ref()]
            .into_iter()
            .flatten()
            .map(|m| (&(m * m) - &id).max_abs())
            .fold(0.0, f64::max)
    }
}

fn on_a(op: &CMatrix) -> CMatrix {
    tensor(op, &CMatrix::identity(2))
}

fn on_b(op: &CMatrix) -> CMatrix {
    tensor(&CMatrix::identity(2), op)
}

fn state_norm(op: &CMatrix, psi: &[C64], alice: bool) -> f64 {
    let full = if alice { on_a(op) } else { on_b(op) };
    norm(&full.apply(psi).expect("dimension 4"))
}

fn normalized(op: CMatrix, psi: &[C64], alice: bool, label: &str) -> Result<(CMatrix, f64)> {
    let d = state_norm(&op, psi, alice);
    if d < EPS {
        return Err(Error::VanishingNorm(label.into()));
    }
    Ok((op.scale_real(1.0 / d), d))
}

fn combo(obs: &[&CMatrix], coefs: &[f64]) -> CMatrix {
    obs.iter()
        .zip(coefs)
        .fold(CMatrix::zeros(2, 2), |acc, (m, c)| &acc + &m.scale_real(*c))
}

/// Builds `Z`, `X̃` (and `Ỹ` for `n ≥ 5`) for both parties.
///
/// For three inputs `Z_A = A₁`, `X_A = A₃ − A₂`, `Z_B = −B₁`, `X_B = B₂ − B₃`.
/// For larger `n` the quartets `(A_{4q+2}, …, A_{4q+5})` contribute
/// `X_A ∋ A₂ − A₃ + A₄ − A₅`, `Y_A ∋ −A₂ − A₃ + A₄ + A₅` and on Bob's side
/// `X_B ∋ −B₂ + B₃ − B₄ + B₅`, `Y_B ∋ −B₂ − B₃ + B₄ + B₅`; a trailing pair is
/// left out. Each `X`, `Y` is divided by its norm on the state.
pub fn build_selftest_operators(setup: &QuantumSetup) -> Result<SelfTestOperators> {
    let n = setup.n();
    let psi = setup.state().amps();
    let a: Vec<&CMatrix> = setup.alice.iter().map(|o| o.matrix()).collect();
    let b: Vec<&CMatrix> = setup.bob.iter().map(|o| o.matrix()).collect();
    let z_a = a[0].clone();
    let z_b = b[0].scale_real(-1.0);
    if n == 3 {
        let (x_a, da) = normalized(combo(&[a[2], a[1]], &[1.0, -1.0]), psi, true, "X_A")?;
        let (x_b, db) = normalized(combo(&[b[1], b[2]], &[1.0, -1.0]), psi, false, "X_B")?;
        return Ok(SelfTestOperators {
            n,
            z_a,
            x_a,
            y_a: None,
            z_b,
            x_b,
            y_b: None,
            divisors: vec![da, db],
        });
    }
    if n < 5 || n.is_multiple_of(2) {
        return Err(Error::InvalidInputCount(n));
    }
    let quartets = (n - 1) / 4;
    let sum = |ops: &[&CMatrix], coefs: [f64; 4]| {
        (0..quartets).fold(CMatrix::zeros(2, 2), |acc, q| {
            let s = 1 + 4 * q;
            &acc + &combo(&ops[s..s + 4], &coefs)
        })
    };
    let (x_a, dxa) = normalized(sum(&a, [1.0, -1.0, 1.0, -1.0]), psi, true, "X_A")?;
    let (y_a, dya) = normalized(sum(&a, [-1.0, -1.0, 1.0, 1.0]), psi, true, "Y_A")?;
    let (x_b, dxb) = normalized(sum(&b, [-1.0, 1.0, -1.0, 1.0]), psi, false, "X_B")?;
    let (y_b, dyb) = normalized(sum(&b, [-1.0, -1.0, 1.0, 1.0]), psi, false, "Y_B")?;
    Ok(SelfTestOperators {
        n,
        z_a,
        x_a,
        y_a: Some(y_a),
        z_b,
        x_b,
        y_b: Some(y_b),
        divisors: vec![dxa, dxb, dya, dyb],
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Relation {
    pub label: String,
    pub residual: f64,
}

/// Norms of `(lhs − rhs)|ψ⟩` for every self-testing relation.
pub fn verify_relations(ops: &SelfTestOperators, setup: &QuantumSetup) -> Vec<Relation> {
    let psi = setup.state().amps().to_vec();
    let act = |m: &CMatrix, v: &[C64]| m.apply(v).expect("dimension 4");
    let diff = |u: Vec<C64>, v: Vec<C64>| norm(&crate::qmat::vsub(&u, &v));
    let neg = |v: Vec<C64>| v.into_iter().map(|z| -z).collect::<Vec<_>>();
    let anti = |p: &CMatrix, q: &CMatrix| norm(&act(&on_a(&p.anticommutator(q)), &psi));
    let anti_b = |p: &CMatrix, q: &CMatrix| norm(&act(&on_b(&p.anticommutator(q)), &psi));
    let a: Vec<CMatrix> = setup.alice.iter().map(|o| on_a(o.matrix())).collect();
    let b: Vec<CMatrix> = setup.bob.iter().map(|o| on_b(o.matrix())).collect();
    let n = setup.n();
    let mut out = Vec::new();
    let mut push = |label: String, residual: f64| out.push(Relation { label, residual });

    push("Z_A psi = Z_B psi".into(), diff(act(&on_a(&ops.z_a), &psi), act(&on_b(&ops.z_b), &psi)));
    push("X_A psi = X_B psi".into(), diff(act(&on_a(&ops.x_a), &psi), act(&on_b(&ops.x_b), &psi)));
    push("{Z_A, X_A} psi = 0".into(), anti(&ops.z_a, &ops.x_a));
    push("{Z_B, X_B} psi = 0".into(), anti_b(&ops.z_b, &ops.x_b));

    if let (Some(y_a), Some(y_b)) = (&ops.y_a, &ops.y_b) {
        let ya = on_a(y_a);
        let yb = on_b(y_b);
        push("Y_A psi = -Y_B psi".into(), diff(act(&ya, &psi), neg(act(&yb, &psi))));
        push("{Y_A, X_A} psi = 0".into(), anti(y_a, &ops.x_a));
        push("{Z_A, Y_A} psi = 0".into(), anti(&ops.z_a, y_a));
        push("{Y_B, X_B} psi = 0".into(), anti_b(y_b, &ops.x_b));
        push("{Z_B, Y_B} psi = 0".into(), anti_b(&ops.z_b, y_b));
        let wa = &ya * &on_a(&ops.x_a);
        let wb = &yb * &on_b(&ops.x_b);
        push("Y_A X_A psi = Y_B X_B psi".into(), diff(act(&wa, &psi), act(&wb, &psi)));
        push("Y_A X_A Y_B X_B psi = -psi".into(), diff(act(&(&wa * &wb), &psi), neg(psi.clone())));
    } else {
        let others = |ops: &[CMatrix], skip: usize| {
            ops.iter()
                .enumerate()
                .filter(|(i, _)| *i != skip)
                .fold(CMatrix::zeros(4, 4), |acc, (_, m)| &acc + m)
        };
        for (x, ax) in a.iter().enumerate() {
            push(
                format!("A{} (sum of B_y, y != {}) psi = psi", x + 1, x + 1),
                diff(act(&(ax * &others(&b, x)), &psi), psi.clone()),
            );
        }
        for (y, by) in b.iter().enumerate() {
            push(
                format!("(sum of A_x, x != {}) B{} psi = psi", y + 1, y + 1),
                diff(act(&(&others(&a, y) * by), &psi), psi.clone()),
            );
        }
        let cross = &(&a[2] * &b[1]) + &(&a[1] * &b[2]);
        push("(A3 B2 + A2 B3) psi = psi".into(), diff(act(&cross, &psi), psi.clone()));
        let xx = &on_a(&ops.x_a) * &on_b(&ops.x_b);
        push("X_A X_B psi = psi".into(), diff(act(&xx, &psi), psi.clone()));
    }
    for x in 0..n {
        push(format!("A{0} B{0} psi = -psi", x + 1), diff(act(&(&a[x] * &b[x]), &psi), neg(psi.clone())));
    }
    out
}

/// One layer of the isometry.
#[derive(Debug, Clone)]
pub enum Gate {
    Hadamard { qubit: usize },
    /// `|0⟩⟨0|_control ⊗ 𝕀 + |1⟩⟨1|_control ⊗ op_target`.
    Controlled {
        control: usize,
        target: usize,
        op: CMatrix,
        label: &'static str,
    },
}

impl Gate {
    pub fn label(&self) -> String {
        match self {
            Gate::Hadamard { qubit } => format!("H[{qubit}]"),
            Gate::Controlled { control, target, label, .. } => format!("C{label}[{control}->{target}]"),
        }
    }

    pub fn unitary(&self, qubits: usize) -> CMatrix {
        let id = CMatrix::identity(2);
        let place = |pos: usize, m: &CMatrix| -> CMatrix {
            let parts: Vec<&CMatrix> = (0..qubits).map(|q| if q == pos { m } else { &id }).collect();
            tensor_all(&parts)
        };
        match self {
            Gate::Hadamard { qubit } => {
                let h = CMatrix::from_real(2, 2, &[1.0, 1.0, 1.0, -1.0])
                    .expect("2x2")
                    .scale_real(std::f64::consts::FRAC_1_SQRT_2);
                place(*qubit, &h)
            }
            Gate::Controlled { control, target, op, .. } => {
                let p0 = CMatrix::diag(&[1.0, 0.0]);
                let p1 = CMatrix::diag(&[0.0, 1.0]);
                let parts0: Vec<&CMatrix> = (0..qubits).map(|q| if q == *control { &p0 } else { &id }).collect();
                let parts1: Vec<&CMatrix> = (0..qubits)
                    .map(|q| {
                        if q == *control {
                            &p1
                        } else if q == *target {
                            op
                        } else {
                            &id
                        }
                    })
                    .collect();
                &tensor_all(&parts0) + &tensor_all(&parts1)
            }
        }
    }
}

const QA: usize = 0;
const QB: usize = 1;
const QA1: usize = 2;
const QB1: usize = 3;
const QA2: usize = 4;
const QB2: usize = 5;

#[derive(Debug, Clone)]
pub struct SwapCircuit {
    pub n: usize,
    pub gates: Vec<Gate>,
}

impl SwapCircuit {
    /// Circuit for `n = 3` (one SWAP layer) or `n = 5` (an extra `Ỹ X̃` layer).
    pub fn new(ops: &SelfTestOperators) -> Result<Self> {
        if ops.n != 3 && ops.n != 5 {
            return Err(Error::InputsOutOfRange { n: ops.n, min: 3, max: 5 });
        }
        let mut gates = vec![
            Gate::Hadamard { qubit: QA1 },
            Gate::Hadamard { qubit: QB1 },
            Gate::Controlled { control: QA1, target: QA, op: ops.z_a.clone(), label: "Z_A" },
            Gate::Controlled { control: QB1, target: QB, op: ops.z_b.clone(), label: "Z_B" },
            Gate::Hadamard { qubit: QA1 },
            Gate::Hadamard { qubit: QB1 },
            Gate::Controlled { control: QA1, target: QA, op: ops.x_a.clone(), label: "X_A" },
            Gate::Controlled { control: QB1, target: QB, op: ops.x_b.clone(), label: "X_B" },
        ];
        if let (Some(y_a), Some(y_b)) = (&ops.y_a, &ops.y_b) {
            let i = C64::new(0.0, 1.0);
            gates.extend([
                Gate::Hadamard { qubit: QA2 },
                Gate::Hadamard { qubit: QB2 },
                Gate::Controlled { control: QA2, target: QA, op: ops.x_a.clone(), label: "X_A" },
                Gate::Controlled { control: QA2, target: QA, op: y_a.scale(i), label: "iY_A" },
                Gate::Controlled { control: QB2, target: QB, op: ops.x_b.clone(), label: "X_B" },
                Gate::Controlled { control: QB2, target: QB, op: y_b.scale(i), label: "iY_B" },
                Gate::Hadamard { qubit: QA2 },
                Gate::Hadamard { qubit: QB2 },
            ]);
        }
        Ok(Self { n: ops.n, gates })
    }

    pub fn qubits(&self) -> usize {
        if self.n == 3 {
            4
        } else {
            6
        }
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits()
    }

    /// Product of all gates, last gate leftmost.
    pub fn unitary(&self) -> CMatrix {
        let q = self.qubits();
        self.gates
            .iter()
            .fold(CMatrix::identity(self.dim()), |acc, g| &g.unitary(q) * &acc)
    }

    /// Largest per-gate unitarity deviation.
    pub fn gate_unitarity_deviation(&self) -> f64 {
        let q = self.qubits();
        self.gates.iter().map(|g| g.unitary(q).unitarity_deviation()).fold(0.0, f64::max)
    }

    /// Runs the circuit on `ψ ⊗ |0…0⟩`.
    pub fn apply(&self, psi: &[C64]) -> Vec<C64> {
        let mut anc = vec![C64::new(0.0, 0.0); self.dim() / 4];
        anc[0] = C64::new(1.0, 0.0);
        // Input is ψ_AB ⊗ |0⟩ on the remaining registers, which matches the
        // physical-first register order.
        let input = kron_vec(psi, &anc);
        self.unitary().apply(&input).expect("register dimension")
    }
}

/// Contracts registers `A′B′` with `⟨target|`, leaving `A B (A″ B″)`.
fn contract_primed(out: &[C64], qubits: usize, target: &[C64]) -> Vec<C64> {
    let tail = 1usize << (qubits - 4);
    let mut junk = vec![C64::new(0.0, 0.0); 4 * tail];
    for ab in 0..4 {
        for p in 0..4 {
            for t in 0..tail {
                junk[ab * tail + t] += target[p].conj() * out[(ab * 4 + p) * tail + t];
            }
        }
    }
    junk
}

/// What to extract from the isometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    State,
    ZA,
    XA,
    YA,
    ZB,
    XB,
    YB,
    /// Alice's observable `x` (0-based, three inputs).
    Alice(usize),
    /// Bob's observable `y` (0-based, three inputs).
    Bob(usize),
    Joint(usize, usize),
}

impl Target {
    pub fn label(&self) -> String {
        match self {
            Target::State => "state".into(),
            Target::ZA => "Z_A".into(),
            Target::XA => "X_A".into(),
            Target::YA => "Y_A".into(),
            Target::ZB => "Z_B".into(),
            Target::XB => "X_B".into(),
            Target::YB => "Y_B".into(),
            Target::Alice(x) => format!("A{}", x + 1),
            Target::Bob(y) => format!("B{}", y + 1),
            Target::Joint(x, y) => format!("A{}B{}", x + 1, y + 1),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let t = match s {
            "state" => Target::State,
            "Z_A" => Target::ZA,
            "X_A" => Target::XA,
            "Y_A" => Target::YA,
            "Z_B" => Target::ZB,
            "X_B" => Target::XB,
            "Y_B" => Target::YB,
            _ => {
                let idx = |t: &str| t.parse::<usize>().ok().filter(|v| (1..=3).contains(v)).map(|v| v - 1);
                let bad = || Error::Parse(format!("unknown isometry target `{s}`"));
                match s.split_once('B') {
                    Some(("", y)) => Target::Bob(idx(y).ok_or_else(bad)?),
                    Some((a, y)) if a.starts_with('A') => Target::Joint(idx(&a[1..]).ok_or_else(bad)?, idx(y).ok_or_else(bad)?),
                    None if s.starts_with('A') => Target::Alice(idx(&s[1..]).ok_or_else(bad)?),
                    _ => return Err(bad()),
                }
            }
        };
        Ok(t)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IsometryResult {
    pub target: String,
    /// Junk on `A B (A″ B″)` obtained by contracting `A′B′` with the
    /// reference state; unnormalized.
    #[serde(skip)]
    pub junk: Vec<C64>,
    /// `|⟨expected|output⟩|²` modulo global phase.
    pub fidelity: f64,
    /// Phase-sensitive overlap `⟨expected|output⟩` with unit-norm vectors.
    #[serde(skip)]
    pub overlap: C64,
    /// Largest `|expected_i − output_i|` without any rescaling.
    pub entry_error: f64,
    /// Fidelity against the closed-form junk instead of the simulated one.
    pub analytic_fidelity: f64,
    pub output_norm: f64,
    pub factorizes: bool,
}

/// Reference trine decomposition `Aₓ = c_z Z + c_x X̃`.
fn trine_coefficients(x: usize, bob: bool) -> (f64, f64) {
    let h = 3f64.sqrt() / 2.0;
    match (bob, x) {
        (false, 0) => (1.0, 0.0),
        (false, 1) => (-0.5, -h),
        (false, _) => (-0.5, h),
        (true, 0) => (-1.0, 0.0),
        (true, 1) => (0.5, h),
        (true, _) => (0.5, -h),
    }
}

fn ideal_operator(cz: f64, cx: f64, z: &CMatrix, x: &CMatrix) -> CMatrix {
    &z.scale_real(cz) + &x.scale_real(cx)
}

/// Applies the circuit to `O|ψ⟩ ⊗ |0…0⟩` and compares the output with
/// `junk ⊗ (O′ ⊗ 𝕀 or 𝕀 ⊗ O′)|φ⁺⟩`, where the junk is the one produced by
/// the state run (dressed by `σz` on `A″` for `Ỹ`).
pub fn run_isometry(setup: &QuantumSetup, ops: &SelfTestOperators, target: Target) -> Result<IsometryResult> {
    let circuit = SwapCircuit::new(ops)?;
    let qubits = circuit.qubits();
    let psi = setup.state().amps();
    let phi = crate::qmat::StateVector::phi_plus().into_amps();
    let [sx, sy, sz] = CMatrix::paulis();
    let id = CMatrix::identity(2);

    let state_out = circuit.apply(psi);
    let junk = contract_primed(&state_out, qubits, &phi);

    let trine_only = |t: Target| -> Result<()> {
        if ops.n != 3 {
            return Err(Error::InvalidParams(format!("target {} needs three inputs", t.label())));
        }
        Ok(())
    };
    let y_pair = || -> Result<(&CMatrix, &CMatrix)> {
        match (&ops.y_a, &ops.y_b) {
            (Some(a), Some(b)) => Ok((a, b)),
            _ => Err(Error::InvalidParams("Y targets need five inputs".into())),
        }
    };
    // Physical operator on AB and reference operator on A′B′.
    let (physical, reference, dressed) = match target {
        Target::State => (CMatrix::identity(4), CMatrix::identity(4), false),
        Target::ZA => (on_a(&ops.z_a), tensor(&sz, &id), false),
        Target::XA => (on_a(&ops.x_a), tensor(&sx, &id), false),
        Target::ZB => (on_b(&ops.z_b), tensor(&id, &sz), false),
        Target::XB => (on_b(&ops.x_b), tensor(&id, &sx), false),
        Target::YA => (on_a(y_pair()?.0), tensor(&sy, &id), true),
        Target::YB => (on_b(y_pair()?.1), tensor(&id, &sy), true),
        Target::Alice(x) => {
            trine_only(target)?;
            let (cz, cx) = trine_coefficients(x, false);
            (
                on_a(setup.alice[x].matrix()),
                tensor(&ideal_operator(cz, cx, &sz, &sx), &id),
                false,
            )
        }
        Target::Bob(y) => {
            trine_only(target)?;
            let (cz, cx) = trine_coefficients(y, true);
            (
                on_b(setup.bob[y].matrix()),
                tensor(&id, &ideal_operator(cz, cx, &sz, &sx)),
                false,
            )
        }
        Target::Joint(x, y) => {
            trine_only(target)?;
            let (az, ax) = trine_coefficients(x, false);
            let (bz, bx) = trine_coefficients(y, true);
            (
                &on_a(setup.alice[x].matrix()) * &on_b(setup.bob[y].matrix()),
                tensor(&ideal_operator(az, ax, &sz, &sx), &ideal_operator(bz, bx, &sz, &sx)),
                false,
            )
        }
    };
    let input = physical.apply(psi)?;
    let out = circuit.apply(&input);
    let output_norm = norm(&out);

    let ref_state = reference.apply(&phi)?;
    let assemble = |j: &[C64]| -> Vec<C64> {
        let mut j = j.to_vec();
        if dressed {
            // σz on A″; junk order is A B A″ B″, so A″ is bit 1.
            for (i, amp) in j.iter_mut().enumerate() {
                if (i >> 1) & 1 == 1 {
                    *amp = -*amp;
                }
            }
        }
        // kron_vec yields A B A″ B″ A′ B′; reorder to A B A′ B′ A″ B″.
        reorder(&kron_vec(&j, &ref_state), qubits)
    };
    let expected = assemble(&junk);
    let (en, on) = (norm(&expected), output_norm);
    let overlap = if en > EPS && on > EPS {
        inner(&expected, &out) / (en * on)
    } else {
        C64::new(0.0, 0.0)
    };
    let fidelity = overlap.norm_sqr();
    let entry_error = expected
        .iter()
        .zip(&out)
        .map(|(e, o)| (e - o).norm())
        .fold(0.0, f64::max);
    let analytic = assemble(&analytic_junk(setup, ops));
    Ok(IsometryResult {
        target: target.label(),
        junk,
        fidelity,
        overlap,
        entry_error,
        analytic_fidelity: self::fidelity(&analytic, &out),
        output_norm,
        factorizes: fidelity > 1.0 - 1e-9,
    })
}

fn reorder(v: &[C64], qubits: usize) -> Vec<C64> {
    let tail = 1usize << (qubits - 4);
    let mut out = vec![C64::new(0.0, 0.0); v.len()];
    for ab in 0..4 {
        for t in 0..tail {
            for p in 0..4 {
                out[(ab * 4 + p) * tail + t] = v[(ab * tail + t) * 4 + p];
            }
        }
    }
    out
}

/// `(1 + Z_A)|ψ⟩/√2` for three inputs; for five the junk
/// `½[(1 + W)χ ⊗ |00⟩ + (1 − W)χ ⊗ |11⟩]` with `W = i Ỹ_A X̃_A`.
pub fn analytic_junk(setup: &QuantumSetup, ops: &SelfTestOperators) -> Vec<C64> {
    let psi = setup.state().amps();
    let plus = &CMatrix::identity(4) + &on_a(&ops.z_a);
    let chi: Vec<C64> = plus
        .apply(psi)
        .expect("dimension 4")
        .into_iter()
        .map(|z| z * std::f64::consts::FRAC_1_SQRT_2)
        .collect();
    let Some(y_a) = &ops.y_a else { return chi };
    let w = &on_a(&y_a.scale(C64::new(0.0, 1.0))) * &on_a(&ops.x_a);
    let up = (&CMatrix::identity(4) + &w).apply(&chi).expect("dimension 4");
    let down = (&CMatrix::identity(4) - &w).apply(&chi).expect("dimension 4");
    let half = C64::new(0.5, 0.0);
    let e00 = [C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
    let e11 = [C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
    crate::qmat::vadd(&kron_vec(&up, &e00), &kron_vec(&down, &e11))
        .into_iter()
        .map(|z| z * half)
        .collect()
}

/// `|⟨a|b⟩|² / (‖a‖²‖b‖²)`.
pub fn fidelity(a: &[C64], b: &[C64]) -> f64 {
    let (na, nb) = (norm(a), norm(b));
    if na < EPS || nb < EPS {
        return 0.0;
    }
    inner(a, b).norm_sqr() / (na * na * nb * nb)
}

/// Every extraction supported for the setup's input count.
pub fn standard_targets(n: usize) -> Vec<Target> {
    let mut t = vec![Target::State, Target::ZA, Target::XA, Target::ZB, Target::XB];
    if n == 3 {
        t.extend((0..3).map(Target::Alice));
        t.extend((0..3).map(Target::Bob));
        for x in 0..3 {
            t.extend((0..3).map(|y| Target::Joint(x, y)));
        }
    } else {
        t.extend([Target::YA, Target::YB]);
    }
    t
}
