//! Optimal quantum value: see-saw search and the sum-of-squares certificate.

mod registry;
mod seesaw;

pub use registry::{Optimizer, OptimizerRegistry};
pub use seesaw::{seesaw, seesaw_from, SeesawConfig, SeesawOutcome, SeesawRun};

use serde::Serialize;

use crate::game::QuantumSetup;
use crate::observables::delta_operator;
use crate::qmat::{norm, tensor, vsub, CMatrix, C64, EPS};

/// Per-setting SOS quantities.
#[derive(Debug, Clone, Serialize)]
pub struct SosCertificate {
    /// `ω_y = ‖Σₓ α^{x,y} Aₓ|ψ⟩‖`.
    pub omegas: Vec<f64>,
    pub delta_expectation: f64,
    /// `‖L_y|ψ⟩‖`; for a degenerate `ω_y` the unnormalized norm is reported.
    pub residuals: Vec<f64>,
    pub degenerate: Vec<bool>,
    pub bell_value: f64,
    /// `Σ ω_y − ⟨𝓑⟩`, nonnegative for every setup.
    pub gap: f64,
}

impl SosCertificate {
    pub fn omega_sum(&self) -> f64 {
        self.omegas.iter().sum()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    /// `½ Σ ω_y ‖L_y ψ‖²`, which equals the gap whenever no `ω_y` degenerates.
    pub fn weighted_residual_sum(&self) -> f64 {
        self.omegas
            .iter()
            .zip(&self.residuals)
            .zip(&self.degenerate)
            .filter(|(_, d)| !**d)
            .map(|((w, r), _)| 0.5 * w * r * r)
            .sum()
    }
}

fn on_alice(op: &CMatrix) -> CMatrix {
    tensor(op, &CMatrix::identity(2))
}

fn on_bob(op: &CMatrix) -> CMatrix {
    tensor(&CMatrix::identity(2), op)
}

/// `Σₓ α^{x,y} Aₓ` for setting `y`.
pub(crate) fn alice_combination(setup: &QuantumSetup, y: usize) -> CMatrix {
    setup.alice.iter().enumerate().fold(CMatrix::zeros(2, 2), |acc, (x, a)| {
        let coef = if x == y { -1.0 } else { 1.0 };
        &acc + &a.matrix().scale_real(coef)
    })
}

pub fn sos_certificate(setup: &QuantumSetup) -> SosCertificate {
    let psi = setup.state().amps();
    let n = setup.n();
    let mut omegas = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);
    let mut degenerate = Vec::with_capacity(n);
    for y in 0..n {
        let lhs = on_alice(&alice_combination(setup, y)).apply(psi).expect("dimension 4");
        let omega = norm(&lhs);
        let rhs = on_bob(setup.bob[y].matrix()).apply(psi).expect("dimension 4");
        if omega < EPS {
            residuals.push(omega);
            degenerate.push(true);
        } else {
            let scaled: Vec<C64> = lhs.iter().map(|v| v / omega).collect();
            residuals.push(norm(&vsub(&scaled, &rhs)));
            degenerate.push(false);
        }
        omegas.push(omega);
    }
    let bell_value = setup.state().expectation(&setup.bell_operator()).expect("dimension 4").re;
    let gap = omegas.iter().sum::<f64>() - bell_value;
    SosCertificate {
        omegas,
        delta_expectation: delta_expectation(setup),
        residuals,
        degenerate,
        bell_value,
        gap,
    }
}

fn delta_expectation(setup: &QuantumSetup) -> f64 {
    setup
        .state()
        .expectation(&on_alice(&delta_operator(&setup.alice)))
        .expect("dimension 4")
        .re
}

/// `⟨Δ⟩` together with both sides of `Σ ω_y² = n² + (n−4)⟨Δ⟩`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DeltaCheck {
    pub delta_expectation: f64,
    pub sum_omega_squared: f64,
    pub predicted: f64,
}

impl DeltaCheck {
    pub fn identity_residual(&self) -> f64 {
        (self.sum_omega_squared - self.predicted).abs()
    }
}

pub fn delta_check(setup: &QuantumSetup) -> DeltaCheck {
    let n = setup.n() as f64;
    let cert = sos_certificate(setup);
    let delta = cert.delta_expectation;
    DeltaCheck {
        delta_expectation: delta,
        sum_omega_squared: cert.omegas.iter().map(|w| w * w).sum(),
        predicted: n * n + (n - 4.0) * delta,
    }
}

/// `√(n Σω²)` at `⟨Δ⟩ = −n`, i.e. `2n`.
pub fn concavity_bound(n: usize) -> f64 {
    let n = n as f64;
    (n * (n * n + (n - 4.0) * -n)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{bell_value, behavior_from_setup, BellExpression};
    use crate::observables::{family_five, family_quartets, family_n, trine, Observable};
    use crate::qmat::StateVector;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal, UnitSphere};

    fn random_setup(n: usize, seed: u64) -> QuantumSetup {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut obs = || -> Vec<Observable> {
            (0..n)
                .map(|_| Observable::from_direction(UnitSphere.sample(&mut rng)).unwrap())
                .collect()
        };
        let (alice, bob) = (obs(), obs());
        let amps = (0..4)
            .map(|_| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                C64::new(re, im)
            })
            .collect();
        QuantumSetup::new(StateVector::normalized(amps).unwrap(), alice, bob).unwrap()
    }

    #[test]
    fn trine_certificate() {
        let cert = sos_certificate(&QuantumSetup::canonical(&trine()));
        for (w, r) in cert.omegas.iter().zip(&cert.residuals) {
            assert!((w - 2.0).abs() < 1e-12);
            assert!(*r < 1e-12);
        }
        assert!(cert.gap.abs() < 1e-12);
        assert!((cert.bell_value - 6.0).abs() < 1e-12);
    }

    #[test]
    fn five_input_certificates() {
        for fam in [family_n(5, &[]).unwrap(), family_five(&[]).unwrap()] {
            let cert = sos_certificate(&QuantumSetup::canonical(&fam));
            assert!((cert.omega_sum() - 10.0).abs() < 1e-12);
            assert!(cert.gap.abs() < 1e-12);
            assert!(cert.max_residual() < 1e-9);
        }
    }

    #[test]
    fn random_setup_has_positive_gap() {
        let cert = sos_certificate(&random_setup(3, 7));
        assert!(cert.gap > 1e-3);
        assert!((cert.gap - cert.weighted_residual_sum()).abs() < 1e-12);
    }

    #[test]
    fn delta_values() {
        let d3 = delta_check(&QuantumSetup::canonical(&trine()));
        assert!((d3.delta_expectation + 3.0).abs() < 1e-12);
        assert!(d3.identity_residual() < 1e-12);

        let d5 = delta_check(&QuantumSetup::canonical(&family_n(5, &[]).unwrap()));
        assert!((d5.delta_expectation + 5.0).abs() < 1e-12);

        let z = Observable::sigma_z();
        let same = QuantumSetup::new(StateVector::phi_plus(), vec![z.clone(); 3], vec![z; 3]).unwrap();
        assert!((delta_check(&same).delta_expectation - 6.0).abs() < 1e-12);
    }

    #[test]
    fn delta_identity_for_larger_families() {
        for n in [7, 9, 11, 13] {
            let fam = family_quartets(n, &[]).unwrap();
            let d = delta_check(&QuantumSetup::canonical(&fam));
            assert!((d.delta_expectation + n as f64).abs() < 1e-10);
            assert!(d.identity_residual() < 1e-10);
        }
    }

    #[test]
    fn concavity_values() {
        assert_eq!(concavity_bound(3), 6.0);
        assert_eq!(concavity_bound(5), 10.0);
        assert_eq!(concavity_bound(9), 18.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn gap_is_nonnegative(seed in any::<u64>(), k in 1usize..4) {
            let setup = random_setup(2 * k + 1, seed);
            let cert = sos_certificate(&setup);
            prop_assert!(cert.gap >= -1e-9);
            prop_assert!((cert.gap - cert.weighted_residual_sum()).abs() < 1e-9);
        }

        #[test]
        fn delta_identity_holds(seed in any::<u64>(), k in 1usize..5) {
            prop_assert!(delta_check(&random_setup(2 * k + 1, seed)).identity_residual() < 1e-9);
        }

        #[test]
        fn behavior_value_matches_operator(seed in any::<u64>(), k in 1usize..4) {
            let n = 2 * k + 1;
            let setup = random_setup(n, seed);
            let from_behavior = bell_value(&BellExpression::new(n).unwrap(), &behavior_from_setup(&setup).unwrap()).unwrap();
            let from_operator = setup.state().expectation(&setup.bell_operator()).unwrap().re;
            prop_assert!((from_behavior - from_operator).abs() < 1e-12);
        }
    }
}
