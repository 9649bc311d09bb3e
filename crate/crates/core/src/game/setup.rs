use crate::error::{Error, Result};
use crate::observables::{Observable, ObservableFamily};
use crate::qmat::{tensor, CMatrix, StateVector};

/// A pure two-qubit state together with both parties' observables.
#[derive(Debug, Clone)]
pub struct QuantumSetup {
    state: StateVector,
    pub alice: Vec<Observable>,
    pub bob: Vec<Observable>,
}

impl QuantumSetup {
    pub fn new(state: StateVector, alice: Vec<Observable>, bob: Vec<Observable>) -> Result<Self> {
        if state.dim() != 4 {
            return Err(Error::DimensionMismatch(format!(
                "two-qubit state expected, got dimension {}",
                state.dim()
            )));
        }
        if alice.len() != bob.len() || alice.is_empty() {
            return Err(Error::DimensionMismatch(format!(
                "{} Alice and {} Bob observables",
                alice.len(),
                bob.len()
            )));
        }
        Ok(Self { state, alice, bob })
    }

    /// The family's observables on `|φ⁺⟩`.
    pub fn canonical(fam: &ObservableFamily) -> Self {
        Self {
            state: StateVector::phi_plus(),
            alice: fam.alice.clone(),
            bob: fam.bob.clone(),
        }
    }

    pub fn n(&self) -> usize {
        self.alice.len()
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn with_state(mut self, state: StateVector) -> Result<Self> {
        if state.dim() != 4 {
            return Err(Error::DimensionMismatch("two-qubit state expected".into()));
        }
        self.state = state;
        Ok(self)
    }

    /// `Σ_{x,y} α^{x,y} Aₓ ⊗ B_y`.
    pub fn bell_operator(&self) -> CMatrix {
        bell_operator(&self.alice, &self.bob)
    }
}

pub(crate) fn bell_operator(alice: &[Observable], bob: &[Observable]) -> CMatrix {
    // Σ_{x≠y} − Σ_{x=y} = (ΣA)⊗(ΣB) − 2 Σ_x Aₓ⊗Bₓ
    let sa = crate::observables::observable_sum(alice);
    let sb = crate::observables::observable_sum(bob);
    let diag = alice
        .iter()
        .zip(bob)
        .fold(CMatrix::zeros(4, 4), |acc, (a, b)| &acc + &tensor(a.matrix(), b.matrix()));
    &tensor(&sa, &sb) - &diag.scale_real(2.0)
}
