//! Named optimizers for the quantum value, selectable at runtime.

use super::{seesaw, SeesawConfig, SeesawOutcome};
use crate::error::{Error, Result};

pub trait Optimizer: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn optimize(&self, n: usize, config: &SeesawConfig) -> Result<SeesawOutcome>;
}

struct Seesaw {
    parity: bool,
}

impl Optimizer for Seesaw {
    fn name(&self) -> &'static str {
        if self.parity {
            "seesaw"
        } else {
            "seesaw-free"
        }
    }

    fn description(&self) -> &'static str {
        if self.parity {
            "see-saw ascent with Alice's observables summing to zero"
        } else {
            "see-saw ascent without constraints on the observables"
        }
    }

    fn optimize(&self, n: usize, config: &SeesawConfig) -> Result<SeesawOutcome> {
        seesaw(
            n,
            &SeesawConfig {
                parity: self.parity,
                ..*config
            },
        )
    }
}

pub struct OptimizerRegistry {
    entries: Vec<Box<dyn Optimizer>>,
}

impl Default for OptimizerRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

impl OptimizerRegistry {
    pub fn empty() -> Self {
        Self { entries: Vec::new() }
    }

    pub fn builtin() -> Self {
        let mut reg = Self::empty();
        reg.register(Box::new(Seesaw { parity: true }));
        reg.register(Box::new(Seesaw { parity: false }));
        reg
    }

    pub fn register(&mut self, entry: Box<dyn Optimizer>) {
        self.entries.retain(|e| e.name() != entry.name());
        self.entries.push(entry);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name()).collect()
    }

    pub fn get(&self, name: &str) -> Result<&dyn Optimizer> {
        self.entries
            .iter()
            .find(|e| e.name() == name)
            .map(|e| e.as_ref())
            .ok_or_else(|| Error::UnknownStrategy {
                kind: "optimizer",
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_optimizers() {
        let reg = OptimizerRegistry::builtin();
        assert_eq!(reg.names(), vec!["seesaw", "seesaw-free"]);
        assert!(reg.get("gradient").err().unwrap().to_string().contains("seesaw, seesaw-free"));
        let out = reg.get("seesaw").unwrap().optimize(3, &SeesawConfig::default()).unwrap();
        assert!((out.value() - 6.0).abs() < 1e-6);
    }
}
