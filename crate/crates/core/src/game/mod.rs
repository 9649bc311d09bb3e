//! The n-input parity-oblivious game: winning rule, Bell coefficients,
//! behaviors, success probabilities and Alice's steered preparations.
//!
//! Outcome bits map to observable eigenvalues as `a ↦ (−1)^a`, so outcome 0
//! is the `+1` eigenspace. Inputs are 1-based in every external format and
//! 0-based inside this crate's APIs.

mod io;
mod setup;

pub use io::{behavior_from_csv, behavior_from_json, behavior_to_csv, behavior_to_json};
pub use setup::QuantumSetup;

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::observables::{check_odd, Observable};
use crate::qmat::{operator_norm, partial_trace, tensor, CMatrix, EPS};

/// Uniform-input game with winning rule `b = δ_{x,y} ⊕ a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GameSpec {
    n: usize,
}

impl GameSpec {
    pub fn new(n: usize) -> Result<Self> {
        check_odd(n)?;
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn input_probability(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Whether outputs `(a, b)` win on inputs `(x, y)`.
    pub fn wins(&self, x: usize, y: usize, a: u8, b: u8) -> bool {
        b == (u8::from(x == y) ^ a)
    }
}

/// Coefficients `α^{x,y}`: `−1` on the diagonal, `+1` elsewhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BellExpression {
    n: usize,
}

impl BellExpression {
    pub fn new(n: usize) -> Result<Self> {
        check_odd(n)?;
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self, x: usize, y: usize) -> f64 {
        if x == y {
            -1.0
        } else {
            1.0
        }
    }

    pub fn alpha_int(&self, x: usize, y: usize) -> i64 {
        if x == y {
            -1
        } else {
            1
        }
    }

    /// Success probability `1/2 + B/(2n²)` for a Bell value `B`.
    pub fn success_from_value(&self, value: f64) -> f64 {
        0.5 + value / (2.0 * (self.n * self.n) as f64)
    }

    /// Exact success probability for an integer Bell value.
    pub fn success_exact(&self, value: i64) -> Ratio<i64> {
        let n2 = (self.n * self.n) as i64;
        Ratio::new(n2 + value, 2 * n2)
    }
}

/// Full table `p(a, b | x, y)` for `a, b ∈ {0, 1}`, `x, y ∈ 0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Behavior {
    n: usize,
    probs: Vec<f64>,
}

impl Behavior {
    /// Validates ranges and normalization; signalling is reported separately
    /// by [`Behavior::signaling_deviation`].
    pub fn new(n: usize, probs: Vec<f64>) -> Result<Self> {
        if n == 0 || probs.len() != 4 * n * n {
            return Err(Error::DimensionMismatch(format!(
                "{} probabilities for n = {n}",
                probs.len()
            )));
        }
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < -EPS || **p > 1.0 + EPS) {
            return Err(Error::InconsistentStatistics(format!("probability {p} out of range")));
        }
        for block in probs.chunks(4) {
            let s: f64 = block.iter().sum();
            if (s - 1.0).abs() > EPS {
                return Err(Error::InconsistentStatistics(format!("block sums to {s}")));
            }
        }
        Ok(Self { n, probs })
    }

    /// Every entry equal to 1/4.
    pub fn uniform(n: usize) -> Self {
        Self {
            n,
            probs: vec![0.25; 4 * n * n],
        }
    }

    /// Product behavior from Alice's expectation values `⟨Aₓ⟩ ∈ [−1, 1]` and
    /// Bob's deterministic `±1` answers.
    pub fn deterministic(alice: &[f64], bob: &[i8]) -> Result<Self> {
        let n = alice.len();
        if bob.len() != n {
            return Err(Error::DimensionMismatch("strategy lengths differ".into()));
        }
        let mut probs = Vec::with_capacity(4 * n * n);
        for &ax in alice {
            for &by in bob {
                for a in 0..2u8 {
                    let pa = (1.0 + sign(a) * ax) / 2.0;
                    for b in 0..2u8 {
                        let pb = if sign(b) == f64::from(by) { 1.0 } else { 0.0 };
                        probs.push(pa * pb);
                    }
                }
            }
        }
        Self::new(n, probs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    fn idx(&self, x: usize, y: usize, a: u8, b: u8) -> usize {
        ((x * self.n + y) * 2 + a as usize) * 2 + b as usize
    }

    pub fn p(&self, x: usize, y: usize, a: u8, b: u8) -> f64 {
        self.probs[self.idx(x, y, a, b)]
    }

    /// `E_{x,y} = Σ_{a,b} (−1)^{a⊕b} p(a,b|x,y)`.
    pub fn correlator(&self, x: usize, y: usize) -> f64 {
        self.p(x, y, 0, 0) - self.p(x, y, 0, 1) - self.p(x, y, 1, 0) + self.p(x, y, 1, 1)
    }

    pub fn alice_marginal(&self, x: usize, y: usize, a: u8) -> f64 {
        self.p(x, y, a, 0) + self.p(x, y, a, 1)
    }

    pub fn bob_marginal(&self, x: usize, y: usize, b: u8) -> f64 {
        self.p(x, y, 0, b) + self.p(x, y, 1, b)
    }

    /// Largest change of a marginal when the other party's input changes.
    pub fn signaling_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for x in 0..self.n {
            for y in 1..self.n {
                dev = dev.max((self.alice_marginal(x, y, 0) - self.alice_marginal(x, 0, 0)).abs());
            }
        }
        for y in 0..self.n {
            for x in 1..self.n {
                dev = dev.max((self.bob_marginal(x, y, 0) - self.bob_marginal(0, y, 0)).abs());
            }
        }
        dev
    }

    /// Winning probability averaged directly over the predicate.
    pub fn predicate_success(&self) -> f64 {
        let game = GameSpec { n: self.n };
        let mut total = 0.0;
        for x in 0..self.n {
            for y in 0..self.n {
                for a in 0..2u8 {
                    for b in 0..2u8 {
                        if game.wins(x, y, a, b) {
                            total += self.p(x, y, a, b);
                        }
                    }
                }
            }
        }
        total / (self.n * self.n) as f64
    }
}

fn sign(bit: u8) -> f64 {
    if bit == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Born-rule behavior of a pure setup.
pub fn behavior_from_setup(setup: &QuantumSetup) -> Result<Behavior> {
    behavior_from_density(&setup.state().density(), &setup.alice, &setup.bob)
}

/// Born-rule behavior `Tr[ρ (Π^a_{Aₓ} ⊗ Π^b_{B_y})]` of a two-qubit density matrix.
pub fn behavior_from_density(rho: &CMatrix, alice: &[Observable], bob: &[Observable]) -> Result<Behavior> {
    let n = alice.len();
    if bob.len() != n {
        return Err(Error::DimensionMismatch("Alice and Bob need the same number of settings".into()));
    }
    if rho.rows() != 4 || !rho.is_square() {
        return Err(Error::DimensionMismatch("two-qubit density matrix expected".into()));
    }
    let mut probs = Vec::with_capacity(4 * n * n);
    for ax in alice {
        for by in bob {
            for a in 0..2u8 {
                let pa = ax.projector(a == 0);
                for b in 0..2u8 {
                    let pb = by.projector(b == 0);
                    let p = (rho * &tensor(&pa, &pb)).trace().re;
                    probs.push(p.clamp(0.0, 1.0));
                }
            }
        }
    }
    Behavior::new(n, probs)
}

/// `Σ_{x,y} α^{x,y} E_{x,y}`.
pub fn bell_value(expr: &BellExpression, beh: &Behavior) -> Result<f64> {
    if expr.n != beh.n {
        return Err(Error::DimensionMismatch(format!(
            "expression for n = {} applied to behavior with n = {}",
            expr.n, beh.n
        )));
    }
    let mut total = 0.0;
    for x in 0..beh.n {
        for y in 0..beh.n {
            total += expr.alpha(x, y) * beh.correlator(x, y);
        }
    }
    Ok(total)
}

/// Success probability through the Bell value, `1/2 + B/(2n²)`.
pub fn success_probability(expr: &BellExpression, beh: &Behavior) -> Result<f64> {
    Ok(expr.success_from_value(bell_value(expr, beh)?))
}

/// Bob's conditional state after Alice measures `Aₓ` with outcome `a`.
#[derive(Debug, Clone, Serialize)]
pub struct SteeredState {
    /// 0-based input.
    pub x: usize,
    /// Outcome bit (0 ↔ eigenvalue +1).
    pub a: u8,
    #[serde(skip)]
    pub rho: CMatrix,
    pub probability: f64,
    /// Set when the outcome has (numerically) zero probability; `rho` is then
    /// the maximally mixed state.
    pub degenerate: bool,
}

impl SteeredState {
    pub fn purity(&self) -> f64 {
        (&self.rho * &self.rho).trace().re
    }
}

pub fn steered_states(setup: &QuantumSetup) -> Result<Vec<SteeredState>> {
    steered_from_density(&setup.state().density(), &setup.alice)
}

/// All `2n` steered states `ρ_{x,a}` for a two-qubit density matrix.
pub fn steered_from_density(rho: &CMatrix, alice: &[Observable]) -> Result<Vec<SteeredState>> {
    if rho.rows() != 4 || !rho.is_square() {
        return Err(Error::DimensionMismatch("two-qubit density matrix expected".into()));
    }
    let id = CMatrix::identity(2);
    let mut out = Vec::with_capacity(2 * alice.len());
    for (x, ax) in alice.iter().enumerate() {
        for a in 0..2u8 {
            let proj = tensor(&ax.projector(a == 0), &id);
            let post = &(&proj * rho) * &proj;
            let probability = post.trace().re;
            let (rho_b, degenerate) = if probability > EPS {
                (partial_trace(&post, &[1], &[2, 2])?.scale_real(1.0 / probability), false)
            } else {
                (id.scale_real(0.5), true)
            };
            out.push(SteeredState {
                x,
                a,
                rho: rho_b,
                probability,
                degenerate,
            });
        }
    }
    Ok(out)
}

/// `‖Σ_{even} ρ − Σ_{odd} ρ‖` over the steered preparations.
///
/// Preparations are labelled so that the even parity class collects the
/// states steered by the `+1` projectors and the odd class those steered by
/// the `−1` projectors; for three inputs this is the grouping
/// `ρ₁₁ + ρ₂₀ + ρ₃₁` versus `ρ₁₀ + ρ₂₁ + ρ₃₀`.
pub fn check_operational_parity(states: &[SteeredState]) -> f64 {
    let diff = states.iter().fold(CMatrix::zeros(2, 2), |acc, s| {
        let sign = if s.a == 0 { 1.0 } else { -1.0 };
        &acc + &s.rho.scale_real(sign)
    });
    operator_norm(&diff)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::{family_five, family_n, trine, ObservableFamily};
    use crate::qmat::StateVector;

    fn trine_setup() -> QuantumSetup {
        QuantumSetup::canonical(&trine())
    }

    #[test]
    fn winning_rule() {
        let g = GameSpec::new(3).unwrap();
        assert!(g.wins(0, 0, 0, 1));
        assert!(g.wins(0, 1, 1, 1));
        assert!(!g.wins(0, 1, 1, 0));
        assert!((g.input_probability() - 1.0 / 3.0).abs() < 1e-16);
        assert!(GameSpec::new(4).is_err());
    }

    #[test]
    fn trine_behavior_correlations() {
        let beh = behavior_from_setup(&trine_setup()).unwrap();
        for x in 0..3 {
            for y in 0..3 {
                let e = beh.correlator(x, y);
                if x == y {
                    assert!((e + 1.0).abs() < 1e-12);
                    assert!((beh.p(x, y, 0, 1) + beh.p(x, y, 1, 0) - 1.0).abs() < 1e-12);
                } else {
                    assert!((e - 0.5).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn maximally_mixed_behavior_is_uniform() {
        let fam = trine();
        let rho = CMatrix::identity(4).scale_real(0.25);
        let beh = behavior_from_density(&rho, &fam.alice, &fam.bob).unwrap();
        assert!(beh.probs().iter().all(|p| (p - 0.25).abs() < 1e-15));
    }

    #[test]
    fn bell_values() {
        let expr = BellExpression::new(3).unwrap();
        let beh = behavior_from_setup(&trine_setup()).unwrap();
        assert!((bell_value(&expr, &beh).unwrap() - 6.0).abs() < 1e-12);
        assert_eq!(bell_value(&expr, &Behavior::uniform(3)).unwrap(), 0.0);

        let fam5 = family_n(5, &[]).unwrap();
        let beh5 = behavior_from_setup(&QuantumSetup::canonical(&fam5)).unwrap();
        let expr5 = BellExpression::new(5).unwrap();
        assert!((bell_value(&expr5, &beh5).unwrap() - 10.0).abs() < 1e-12);
        assert!(bell_value(&expr5, &beh).is_err());
    }

    #[test]
    fn success_probabilities() {
        let expr = BellExpression::new(3).unwrap();
        let beh = behavior_from_setup(&trine_setup()).unwrap();
        assert!((success_probability(&expr, &beh).unwrap() - 5.0 / 6.0).abs() < 1e-12);
        assert_eq!(expr.success_exact(4), Ratio::new(13, 18));
        assert_eq!(success_probability(&expr, &Behavior::uniform(3)).unwrap(), 0.5);
    }

    #[test]
    fn behavior_validation() {
        assert!(Behavior::new(3, vec![0.25; 35]).is_err());
        let mut probs = vec![0.25; 36];
        probs[0] = 0.5;
        assert!(Behavior::new(3, probs).is_err());
    }

    #[test]
    fn trine_steered_states_are_pure_and_complementary() {
        let states = steered_states(&trine_setup()).unwrap();
        assert_eq!(states.len(), 6);
        for s in &states {
            assert!((s.purity() - 1.0).abs() < 1e-12);
            assert!(!s.degenerate);
        }
        for pair in states.chunks(2) {
            let sum = &pair[0].rho + &pair[1].rho;
            assert!((&sum - &CMatrix::identity(2)).max_abs() < 1e-12);
        }
        // ρ for (x = 1, outcome +1) is the +1 projector of σz.
        let expect = CMatrix::from_bloch(0.5, [0.0, 0.0, 0.5]);
        assert!((&states[0].rho - &expect).max_abs() < 1e-12);
    }

    #[test]
    fn mixed_state_steers_to_identity() {
        let rho = CMatrix::identity(4).scale_real(0.25);
        let states = steered_from_density(&rho, &trine().alice).unwrap();
        for s in states {
            assert!((&s.rho - &CMatrix::identity(2).scale_real(0.5)).max_abs() < 1e-15);
        }
    }

    #[test]
    fn zero_probability_outcome_is_flagged() {
        // |00⟩ never yields the −1 outcome of σz.
        let rho = StateVector::basis(4, 0).density();
        let states = steered_from_density(&rho, &trine().alice).unwrap();
        assert!(states[1].degenerate);
        assert!((&states[1].rho - &CMatrix::identity(2).scale_real(0.5)).max_abs() < 1e-15);
    }

    #[test]
    fn operational_parity() {
        let states = steered_states(&trine_setup()).unwrap();
        assert!(check_operational_parity(&states) < 1e-12);

        let fam5 = family_five(&[]).unwrap();
        let states5 = steered_states(&QuantumSetup::canonical(&fam5)).unwrap();
        assert!(check_operational_parity(&states5) < 1e-12);

        let fam = trine();
        let (s, c) = 0.1f64.sin_cos();
        let mut alice = fam.alice.clone();
        alice[0] = Observable::from_bloch([s, 0.0, c]).unwrap();
        let broken = ObservableFamily::custom(alice, fam.bob.clone()).unwrap();
        let states = steered_states(&QuantumSetup::canonical(&broken)).unwrap();
        assert!(check_operational_parity(&states) > 1e-3);
    }
}
