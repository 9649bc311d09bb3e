//! Certification of the `n`-outcome POVM built from the optimal observables,
//! device-independent reconstruction of its elements and the resulting
//! local randomness.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::QuantumSetup;
use crate::observables::{check_parity_condition, trine, ObservableFamily};
use crate::qmat::{eig_hermitian, tensor, CMatrix, EPS};

/// Positive operators summing to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmSet {
    elements: Vec<CMatrix>,
}

impl PovmSet {
    pub fn new(elements: Vec<CMatrix>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidParams("a POVM needs at least one element".into()));
        }
        let mut total = CMatrix::zeros(2, 2);
        for e in &elements {
            if e.rows() != 2 || !e.is_square() {
                return Err(Error::DimensionMismatch("POVM elements must be 2x2".into()));
            }
            let dev = e.hermitian_deviation();
            if dev > EPS {
                return Err(Error::NotHermitian(dev));
            }
            let min = eig_hermitian(e)?.values[0];
            if min < -EPS {
                return Err(Error::InvalidParams(format!("POVM element has eigenvalue {min}")));
            }
            total = &total + e;
        }
        let dev = (&total - &CMatrix::identity(2)).max_abs();
        if dev > EPS {
            return Err(Error::InvalidParams(format!("POVM elements sum to identity only within {dev:.3e}")));
        }
        Ok(Self { elements })
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Eigenvalues of each element, ascending.
    pub fn spectrum(&self) -> Vec<Vec<f64>> {
        self.elements
            .iter()
            .map(|e| eig_hermitian(e).map(|d| d.values).unwrap_or_default())
            .collect()
    }
}

/// `E_k = (2/n) Π⁻(A_k)` for a family obeying the parity condition.
pub fn canonical_povm(fam: &ObservableFamily) -> Result<PovmSet> {
    let report = check_parity_condition(fam);
    if report.max_violation() > EPS {
        return Err(Error::ParityViolated(report.max_violation()));
    }
    let w = 2.0 / fam.n as f64;
    PovmSet::new(fam.alice.iter().map(|a| a.projector(false).scale_real(w)).collect())
}

/// Joint statistics `P(k, b | y)` of the POVM setting with Bob's settings.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmBehavior {
    outcomes: usize,
    settings: usize,
    probs: Vec<f64>,
}

impl PovmBehavior {
    pub fn new(outcomes: usize, settings: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != outcomes * settings * 2 {
            return Err(Error::DimensionMismatch(format!(
                "{} probabilities for {outcomes} outcomes and {settings} settings",
                probs.len()
            )));
        }
        for y in 0..settings {
            let s: f64 = (0..outcomes).flat_map(|k| [0, 1].map(|b| probs[(k * settings + y) * 2 + b])).sum();
            if (s - 1.0).abs() > EPS {
                return Err(Error::InconsistentStatistics(format!("setting {} sums to {s}", y + 1)));
            }
        }
        Ok(Self {
            outcomes,
            settings,
            probs,
        })
    }

    pub fn from_setup(setup: &QuantumSetup, povm: &PovmSet) -> Result<Self> {
        let rho = setup.state().density();
        let mut probs = Vec::with_capacity(povm.len() * setup.n() * 2);
        for e in povm.elements() {
            for by in &setup.bob {
                for b in 0..2u8 {
                    let p = (&rho * &tensor(e, &by.projector(b == 0))).trace().re;
                    probs.push(p.clamp(0.0, 1.0));
                }
            }
        }
        Self::new(povm.len(), setup.n(), probs)
    }

    pub fn outcomes(&self) -> usize {
        self.outcomes
    }

    pub fn settings(&self) -> usize {
        self.settings
    }

    pub fn p(&self, k: usize, b: u8, y: usize) -> f64 {
        self.probs[(k * self.settings + y) * 2 + b as usize]
    }

    /// `P(k)`, averaged over Bob's settings.
    pub fn marginal(&self, k: usize) -> f64 {
        (0..self.settings).map(|y| self.p(k, 0, y) + self.p(k, 1, y)).sum::<f64>() / self.settings as f64
    }

    /// `E_{k|y} = Σ_b (−1)^b P(k, b | y)`.
    pub fn correlator(&self, k: usize, y: usize) -> f64 {
        self.p(k, 0, y) - self.p(k, 1, y)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ShiftedBell {
    pub bell_value: f64,
    /// `Σ_k P(k, b = 1 | y = k)`: outcome `k` together with Bob's `−1` answer.
    pub penalty: f64,
    pub alpha: f64,
    pub value: f64,
}

/// `𝓑 − α Σ_k P(k, 1 | y = k)`.
pub fn shifted_bell_value(setup: &QuantumSetup, povm: &PovmSet, alpha: f64) -> Result<ShiftedBell> {
    if povm.len() != setup.n() {
        return Err(Error::DimensionMismatch(format!(
            "{} POVM elements for {} Bob settings",
            povm.len(),
            setup.n()
        )));
    }
    if alpha.is_nan() || alpha < 0.0 || alpha.is_infinite() {
        return Err(Error::InvalidParams(format!("alpha must be a nonnegative number, got {alpha}")));
    }
    let stats = PovmBehavior::from_setup(setup, povm)?;
    let penalty: f64 = (0..povm.len()).map(|k| stats.p(k, 1, k)).sum();
    let bell_value = setup.state().expectation(&setup.bell_operator())?.re;
    Ok(ShiftedBell {
        bell_value,
        penalty,
        alpha,
        value: bell_value - alpha * penalty,
    })
}

/// Coefficients `γ_k = (γ⁰, γ¹, γ², γ³)` of `γ⁰𝕀 + γ¹σz + γ²σy + γ³σx`.
#[derive(Debug, Clone, Serialize)]
pub struct GammaReconstruction {
    pub gammas: Vec<[f64; 4]>,
    #[serde(skip)]
    pub elements: Vec<CMatrix>,
    /// Largest entry-wise distance from the trine POVM `(𝕀 − A_k)/3`.
    pub deviation: f64,
    pub consistent: bool,
}

/// Rebuilds the three POVM elements from correlations with Bob's trine
/// settings: `γ⁰ = P(k)`, `γ¹ = −E_{k|1}`, `γ² = Σ_y E_{k|y}`,
/// `γ³ = (E_{k|3} − E_{k|2})/√3`.
pub fn reconstruct_gamma(stats: &PovmBehavior) -> Result<GammaReconstruction> {
    if stats.outcomes() != 3 || stats.settings() != 3 {
        return Err(Error::InvalidParams(
            "reconstruction is defined for three outcomes against three settings".into(),
        ));
    }
    let [sx, sy, sz] = CMatrix::paulis();
    let reference = canonical_povm(&trine())?;
    let mut gammas = Vec::with_capacity(3);
    let mut elements = Vec::with_capacity(3);
    let mut deviation: f64 = 0.0;
    for k in 0..3 {
        let e = |y: usize| stats.correlator(k, y);
        let g = [
            stats.marginal(k),
            -e(0),
            e(0) + e(1) + e(2),
            (e(2) - e(1)) / 3f64.sqrt(),
        ];
        let m = &(&(&CMatrix::identity(2).scale_real(g[0]) + &sz.scale_real(g[1])) + &sy.scale_real(g[2]))
            + &sx.scale_real(g[3]);
        deviation = deviation.max((&m - &reference.elements()[k]).max_abs());
        gammas.push(g);
        elements.push(m);
    }
    Ok(GammaReconstruction {
        gammas,
        elements,
        deviation,
        consistent: deviation <= 10.0 * EPS,
    })
}

/// Rank-one elements that are linearly independent as real 4-vectors.
pub fn extremality_check(povm: &PovmSet) -> bool {
    if povm.len() > 4 {
        return false;
    }
    for e in povm.elements() {
        let Ok(eig) = eig_hermitian(e) else { return false };
        let (lo, hi) = (eig.values[0], eig.values[1]);
        if hi <= EPS || lo >= EPS * hi {
            return false;
        }
    }
    let rows: Vec<[f64; 4]> = povm
        .elements()
        .iter()
        .map(|e| match e.bloch_decomposition() {
            Ok((t, v)) => [t, v[0], v[1], v[2]],
            Err(_) => [0.0; 4],
        })
        .collect();
    real_rank(rows) == povm.len()
}

fn real_rank(mut rows: Vec<[f64; 4]>) -> usize {
    let mut rank = 0;
    for col in 0..4 {
        let Some(pivot) = (rank..rows.len()).max_by(|&i, &j| rows[i][col].abs().total_cmp(&rows[j][col].abs())) else {
            break;
        };
        if rows[pivot][col].abs() <= 1e-9 {
            continue;
        }
        rows.swap(rank, pivot);
        let pivot_row = rows[rank];
        for row in rows.iter_mut().skip(rank + 1) {
            let f = row[col] / pivot_row[col];
            for (cell, p) in row.iter_mut().zip(pivot_row).skip(col) {
                *cell -= f * p;
            }
        }
        rank += 1;
    }
    rank
}

#[derive(Debug, Clone, Serialize)]
pub struct RandomnessReport {
    pub outcome_probabilities: Vec<f64>,
    pub guessing_probability: f64,
    pub min_entropy_bits: f64,
    pub extremal: bool,
    /// False when the bound rests only on the observed distribution.
    pub certified: bool,
    pub bell_value: f64,
    /// Present when the POVM has one element per Bob setting.
    pub penalty: Option<f64>,
}

/// Local guessing probability of the POVM outcome.
///
/// Certification requires an extremal POVM, the maximal Bell value `2n` and,
/// when the POVM has `n` elements, a vanishing shift penalty. An extremal
/// element cannot be split between Eve's strategies, so `G = max_k P(k)` is
/// then a certified bound; otherwise the same number is only the observed
/// (trivial) guessing probability.
pub fn randomness_report(setup: &QuantumSetup, povm: &PovmSet, tol: f64) -> Result<RandomnessReport> {
    let rho = setup.state().density();
    let id = CMatrix::identity(2);
    let outcome_probabilities: Vec<f64> = povm
        .elements()
        .iter()
        .map(|e| (&rho * &tensor(e, &id)).trace().re)
        .collect();
    let extremal = extremality_check(povm);
    let bell_value = setup.state().expectation(&setup.bell_operator())?.re;
    let penalty = if povm.len() == setup.n() {
        Some(shifted_bell_value(setup, povm, 1.0)?.penalty)
    } else {
        None
    };
    let optimal = bell_value >= 2.0 * setup.n() as f64 - tol;
    let certified = extremal && optimal && penalty.is_none_or(|p| p <= tol);
    let guessing_probability = outcome_probabilities.iter().copied().fold(0.0, f64::max);
    Ok(RandomnessReport {
        min_entropy_bits: -guessing_probability.log2(),
        outcome_probabilities,
        guessing_probability,
        extremal,
        certified,
        bell_value,
        penalty,
    })
}
