//! Qubit observables and the canonical observable families that reach the
//! optimal quantum value of the game.
//!
//! Every family is built from exact Bloch vectors. Bob's observables at the
//! canonical optimum on `|φ⁺⟩` are `B_y = −A_y*` (complex conjugate), which
//! reduces to `B_y = −A_y` for the real families.

mod registry;

pub use registry::{FamilyConstruction, FamilyRegistry};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qmat::{operator_norm, CMatrix, EPS};

/// Hermitian, traceless qubit operator squaring to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    matrix: CMatrix,
    bloch: [f64; 3],
}

impl Observable {
    pub fn from_bloch(bloch: [f64; 3]) -> Result<Self> {
        let len = bloch_len(bloch);
        if !len.is_finite() || (len - 1.0).abs() > EPS {
            return Err(Error::NotObservable(format!("Bloch vector length {len}")));
        }
        Ok(Self {
            matrix: CMatrix::from_bloch(0.0, bloch),
            bloch,
        })
    }

    /// Rescales a nonzero direction onto the unit sphere.
    pub fn from_direction(v: [f64; 3]) -> Result<Self> {
        let len = bloch_len(v);
        if len == 0.0 || !len.is_finite() {
            return Err(Error::NotObservable("zero Bloch direction".into()));
        }
        Self::from_bloch(v.map(|c| c / len))
    }

    pub fn from_matrix(m: &CMatrix) -> Result<Self> {
        let (t, v) = m.bloch_decomposition()?;
        if t.abs() > EPS {
            return Err(Error::NotObservable(format!("trace {}", 2.0 * t)));
        }
        Self::from_bloch(v)
    }

    pub fn sigma_z() -> Self {
        Self::from_bloch([0.0, 0.0, 1.0]).expect("unit vector")
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn bloch(&self) -> [f64; 3] {
        self.bloch
    }

    pub fn negated(&self) -> Self {
        Self {
            matrix: -&self.matrix,
            bloch: self.bloch.map(|c| -c),
        }
    }

    /// Complex conjugate (equivalently the transpose): flips the σy component.
    pub fn conjugated(&self) -> Self {
        let [x, y, z] = self.bloch;
        Self {
            matrix: self.matrix.conj(),
            bloch: [x, -y, z],
        }
    }

    /// Projector onto the `+1` (`positive = true`) or `−1` eigenspace.
    pub fn projector(&self, positive: bool) -> CMatrix {
        let sign = if positive { 1.0 } else { -1.0 };
        CMatrix::from_bloch(0.5, self.bloch.map(|c| sign * c / 2.0))
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.bloch.iter().zip(other.bloch).map(|(a, b)| a * b).sum()
    }
}

fn bloch_len(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Alice's and Bob's `n` observables for one game instance.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableFamily {
    pub n: usize,
    /// Name of the construction that produced the family.
    pub construction: String,
    pub alice: Vec<Observable>,
    pub bob: Vec<Observable>,
    /// Free parameters (ν, β pairs) used by the construction.
    pub params: Vec<f64>,
}

impl ObservableFamily {
    /// Family whose Bob side is the canonical partner `B_y = −A_y*`.
    pub fn with_canonical_bob(
        construction: &str,
        alice: Vec<Observable>,
        params: Vec<f64>,
    ) -> Result<Self> {
        let n = alice.len();
        check_odd(n)?;
        let bob = alice.iter().map(|a| a.conjugated().negated()).collect();
        Ok(Self {
            n,
            construction: construction.to_string(),
            alice,
            bob,
            params,
        })
    }

    /// Arbitrary family; no parity requirement is enforced.
    pub fn custom(alice: Vec<Observable>, bob: Vec<Observable>) -> Result<Self> {
        check_odd(alice.len())?;
        if bob.len() != alice.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} Alice observables but {} for Bob",
                alice.len(),
                bob.len()
            )));
        }
        Ok(Self {
            n: alice.len(),
            construction: "custom".into(),
            alice,
            bob,
            params: Vec::new(),
        })
    }

    fn validated(self) -> Result<Self> {
        let report = check_parity_condition(&self);
        if report.max_violation() > EPS {
            return Err(Error::ParityViolated(report.max_violation()));
        }
        Ok(self)
    }
}

pub(crate) fn check_odd(n: usize) -> Result<()> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::InvalidInputCount(n));
    }
    Ok(())
}

/// Even split `ν = β = √((1 − 1/(n−1)²)/2)` of the free transverse weight.
pub fn default_transverse(n: usize) -> (f64, f64) {
    let z = 1.0 / (n as f64 - 1.0);
    let v = ((1.0 - z * z) / 2.0).sqrt();
    (v, v)
}

/// Expands a flat parameter list into `count` (ν, β) pairs.
///
/// Accepts an empty list (defaults), a single pair (shared by every slot) or
/// exactly `count` pairs. Each pair must satisfy `ν² + β² + 1/(n−1)² = 1`.
fn transverse_pairs(n: usize, params: &[f64], count: usize) -> Result<Vec<(f64, f64)>> {
    let pairs: Vec<(f64, f64)> = match params.len() {
        0 => vec![default_transverse(n); count],
        2 => vec![(params[0], params[1]); count],
        len if len == 2 * count => params.chunks(2).map(|p| (p[0], p[1])).collect(),
        len => {
            return Err(Error::InvalidParams(format!(
                "expected 0, 2 or {} parameters, got {len}",
                2 * count
            )))
        }
    };
    let z = 1.0 / (n as f64 - 1.0);
    for &(nu, beta) in &pairs {
        let total = nu * nu + beta * beta + z * z;
        if (total - 1.0).abs() > EPS {
            return Err(Error::InvalidParams(format!(
                "ν² + β² + 1/(n−1)² = {total} for (ν, β) = ({nu}, {beta})"
            )));
        }
    }
    Ok(pairs)
}

fn flatten(pairs: &[(f64, f64)]) -> Vec<f64> {
    pairs.iter().flat_map(|&(a, b)| [a, b]).collect()
}

/// Three coplanar axes at 120°: `A₁ = σz`, `A₂,₃ = ±(√3/2)σx − σz/2`.
pub fn trine() -> ObservableFamily {
    let h = 3f64.sqrt() / 2.0;
    let alice = vec![
        Observable::sigma_z(),
        Observable::from_bloch([h, 0.0, -0.5]).expect("unit vector"),
        Observable::from_bloch([-h, 0.0, -0.5]).expect("unit vector"),
    ];
    ObservableFamily::with_canonical_bob("trine", alice, Vec::new()).expect("n = 3")
}

/// Two-halves family for any odd `n`: `A₁ = σz`, the first half
/// `νσx − βσy − σz/(n−1)` and the mirrored second half
/// `−νσx + βσy − σz/(n−1)`, slot `j` mirroring slot `n + 2 − j`.
///
/// `params` holds (ν, β) pairs for slots `2..=(n+1)/2`.
pub fn family_n(n: usize, params: &[f64]) -> Result<ObservableFamily> {
    check_odd(n)?;
    let half = (n - 1) / 2;
    let pairs = transverse_pairs(n, params, half)?;
    let z = -1.0 / (n as f64 - 1.0);
    let mut alice = vec![Observable::sigma_z()];
    for &(nu, beta) in &pairs {
        alice.push(Observable::from_bloch([nu, -beta, z])?);
    }
    for j in (n + 3) / 2..=n {
        let (nu, beta) = pairs[n + 2 - j - 2];
        alice.push(Observable::from_bloch([-nu, beta, z])?);
    }
    ObservableFamily::with_canonical_bob("halves", alice, flatten(&pairs))?.validated()
}

/// Signs of (σx, σy) within one quartet.
const QUARTET: [(f64, f64); 4] = [(1.0, -1.0), (-1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)];

fn quartet_family(n: usize, name: &str, quartets: usize, extra_pair: bool, params: &[f64]) -> Result<ObservableFamily> {
    let slots = quartets + usize::from(extra_pair);
    let pairs = transverse_pairs(n, params, slots)?;
    let z = -1.0 / (n as f64 - 1.0);
    let mut alice = vec![Observable::sigma_z()];
    for &(nu, beta) in &pairs[..quartets] {
        for (sx, sy) in QUARTET {
            alice.push(Observable::from_bloch([sx * nu, sy * beta, z])?);
        }
    }
    if extra_pair {
        let (a, b) = pairs[quartets];
        alice.push(Observable::from_bloch([a, -b, z])?);
        alice.push(Observable::from_bloch([-a, b, z])?);
    }
    debug_assert_eq!(alice.len(), n);
    ObservableFamily::with_canonical_bob(name, alice, flatten(&pairs))?.validated()
}

/// Five observables arranged as one quartet `(±ν σx, ±β σy)` around `−σz/4`.
pub fn family_five(params: &[f64]) -> Result<ObservableFamily> {
    quartet_family(5, "quartets", 1, false, params)
}

/// Quartet family for odd `n > 5`: `(n−1)/4` quartets, plus a final
/// `(α′, β′)` pair when `n ≡ 3 (mod 4)`.
pub fn family_quartets(n: usize, params: &[f64]) -> Result<ObservableFamily> {
    check_odd(n)?;
    if n <= 5 {
        return Err(Error::InputsOutOfRange { n, min: 7, max: usize::MAX });
    }
    quartet_family(n, "quartets", (n - 1) / 4, n % 4 == 3, params)
}

/// Deviations from the parity-oblivious operator constraint.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ParityReport {
    /// `‖Σₓ Aₓ‖` (operator norm).
    pub alice_sum: f64,
    /// `‖(2/n) Σₓ Π⁻(Aₓ) − 𝕀‖`.
    pub projector_deviation: f64,
    /// `‖Σ_y B_y‖`.
    pub bob_sum: f64,
}

impl ParityReport {
    /// Largest of the Alice-side deviations.
    pub fn max_violation(&self) -> f64 {
        self.alice_sum.max(self.projector_deviation)
    }
}

pub fn observable_sum(obs: &[Observable]) -> CMatrix {
    obs.iter()
        .fold(CMatrix::zeros(2, 2), |acc, o| &acc + o.matrix())
}

pub fn check_parity_condition(fam: &ObservableFamily) -> ParityReport {
    let n = fam.alice.len() as f64;
    let proj = fam
        .alice
        .iter()
        .fold(CMatrix::zeros(2, 2), |acc, o| &acc + &o.projector(false));
    let dev = &proj.scale_real(2.0 / n) - &CMatrix::identity(2);
    ParityReport {
        alice_sum: operator_norm(&observable_sum(&fam.alice)),
        projector_deviation: operator_norm(&dev),
        bob_sum: operator_norm(&observable_sum(&fam.bob)),
    }
}

/// `Δ = Σ_{x<x′} {Aₓ, Aₓ′}`.
pub fn delta_operator(obs: &[Observable]) -> CMatrix {
    let mut acc = CMatrix::zeros(2, 2);
    for (i, a) in obs.iter().enumerate() {
        for b in &obs[i + 1..] {
            acc = &acc + &a.matrix().anticommutator(b.matrix());
        }
    }
    acc
}
