//! Named observable-family constructions, selectable at runtime.

use super::{family_five, family_quartets, family_n, trine, ObservableFamily};
use crate::error::{Error, Result};

/// One way of building the `n` optimal observables for each party.
pub trait FamilyConstruction: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn supports(&self, n: usize) -> bool;
    fn build(&self, n: usize, params: &[f64]) -> Result<ObservableFamily>;
}

struct Trine;

impl FamilyConstruction for Trine {
    fn name(&self) -> &'static str {
        "trine"
    }

    fn description(&self) -> &'static str {
        "three coplanar axes at 120 degrees (n = 3 only)"
    }

    fn supports(&self, n: usize) -> bool {
        n == 3
    }

    fn build(&self, n: usize, params: &[f64]) -> Result<ObservableFamily> {
        if n != 3 {
            return Err(Error::InputsOutOfRange { n, min: 3, max: 3 });
        }
        if !params.is_empty() {
            return Err(Error::InvalidParams("trine takes no parameters".into()));
        }
        Ok(trine())
    }
}

struct Halves;

impl FamilyConstruction for Halves {
    fn name(&self) -> &'static str {
        "halves"
    }

    fn description(&self) -> &'static str {
        "sigma_z plus two mirrored halves (nu sx - beta sy) and (-nu sx + beta sy), any odd n"
    }

    fn supports(&self, n: usize) -> bool {
        n >= 3 && n % 2 == 1
    }

    fn build(&self, n: usize, params: &[f64]) -> Result<ObservableFamily> {
        family_n(n, params)
    }
}

struct Quartets;

impl FamilyConstruction for Quartets {
    fn name(&self) -> &'static str {
        "quartets"
    }

    fn description(&self) -> &'static str {
        "sigma_z plus quartets (+-nu sx, +-beta sy), with a closing pair when n = 3 mod 4; odd n >= 5"
    }

    fn supports(&self, n: usize) -> bool {
        n >= 5 && n % 2 == 1
    }

    fn build(&self, n: usize, params: &[f64]) -> Result<ObservableFamily> {
        match n {
            5 => family_five(params),
            _ => family_quartets(n, params),
        }
    }
}

/// Registry of family constructions keyed by name.
pub struct FamilyRegistry {
    entries: Vec<Box<dyn FamilyConstruction>>,
}

impl Default for FamilyRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

impl FamilyRegistry {
    pub fn empty() -> Self {
        Self { entries: Vec::new() }
    }

    pub fn builtin() -> Self {
        let mut reg = Self::empty();
        reg.register(Box::new(Trine));
        reg.register(Box::new(Halves));
        reg.register(Box::new(Quartets));
        reg
    }

    /// Adds a construction, replacing any existing entry with the same name.
    pub fn register(&mut self, entry: Box<dyn FamilyConstruction>) {
        self.entries.retain(|e| e.name() != entry.name());
        self.entries.push(entry);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name()).collect()
    }

    pub fn get(&self, name: &str) -> Result<&dyn FamilyConstruction> {
        self.entries
            .iter()
            .find(|e| e.name() == name)
            .map(|e| e.as_ref())
            .ok_or_else(|| Error::UnknownStrategy {
                kind: "observable family",
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    /// Construction used when none is requested: the trine for three inputs,
    /// quartets (the self-testing family) otherwise.
    pub fn default_name(n: usize) -> &'static str {
        if n == 3 {
            "trine"
        } else {
            "quartets"
        }
    }

    pub fn build(&self, name: &str, n: usize, params: &[f64]) -> Result<ObservableFamily> {
        let entry = self.get(name)?;
        super::check_odd(n)?;
        if !entry.supports(n) {
            return Err(Error::InvalidParams(format!(
                "family `{name}` does not support n = {n}"
            )));
        }
        entry.build(n, params)
    }
}
