//! Field models: the declared generating basis of a Lagrangian system.
//!
//! A model fixes the base dimension, base coordinate names, and the list of
//! graded generators (fields, antifields, ghosts). Jet symbols reference
//! generators by id, so scalars built over a model remain valid in any
//! extension of it that only appends generators.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::AlgebraError;
use crate::index::MultiIndex;
use crate::parity::Parity;

/// Identifier of a declared generator; allocation order fixes the global
/// canonical order on jet symbols.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct GenId(pub u32);

/// What role a generator plays in the antifield/ghost extension.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum GenClass {
    /// An original field of the Lagrangian system.
    Field,
    /// Antifield; stage -1 pairs with a field, stage k >= 0 with a stage-k
    /// Noether operator.
    Antifield { stage: i32 },
    /// Ghost paired with a stage-k Noether operator, k >= 0.
    Ghost { stage: i32 },
}

#[derive(Clone, Debug)]
pub struct Generator {
    pub name: String,
    pub parity: Parity,
    pub class: GenClass,
}

impl Generator {
    pub fn antifield_number(&self) -> i32 {
        match self.class {
            GenClass::Field => 0,
            GenClass::Antifield { stage } => stage + 2,
            GenClass::Ghost { stage } => -(stage + 1),
        }
    }

    pub fn ghost_number(&self) -> i32 {
        match self.class {
            GenClass::Ghost { stage } => stage + 1,
            _ => 0,
        }
    }
}

/// A jet symbol s^A_Lambda: a formal coordinate for the Lambda-th derivative
/// of generator A. Parity is carried inline so ring arithmetic needs no
/// model lookups.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct JetSymbol {
    pub gen: GenId,
    pub index: MultiIndex,
    pub parity: Parity,
}

impl JetSymbol {
    pub fn raise(&self, lambda: u8) -> JetSymbol {
        JetSymbol {
            gen: self.gen,
            index: self.index.push(lambda),
            parity: self.parity,
        }
    }
}

/// Declared model: base coordinates plus graded generators.
#[derive(Clone, Debug)]
pub struct Model {
    coords: Vec<String>,
    gens: Vec<Generator>,
    by_name: BTreeMap<String, GenId>,
    max_jet_order: usize,
}

pub const DEFAULT_MAX_JET_ORDER: usize = 8;

impl Model {
    pub fn new(coords: &[&str]) -> Model {
        assert!(!coords.is_empty(), "base dimension must be positive");
        Model {
            coords: coords.iter().map(|s| s.to_string()).collect(),
            gens: Vec::new(),
            by_name: BTreeMap::new(),
            max_jet_order: DEFAULT_MAX_JET_ORDER,
        }
    }

    pub fn with_max_jet_order(mut self, k: usize) -> Model {
        self.max_jet_order = k;
        self
    }

    pub fn max_jet_order(&self) -> usize {
        self.max_jet_order
    }

    pub fn dim(&self) -> u8 {
        self.coords.len() as u8
    }

    pub fn coord_names(&self) -> &[String] {
        &self.coords
    }

    pub fn coord_index(&self, name: &str) -> Option<u8> {
        self.coords.iter().position(|c| c == name).map(|i| i as u8)
    }

    pub fn declare(
        &mut self,
        name: &str,
        parity: Parity,
        class: GenClass,
    ) -> Result<GenId, AlgebraError> {
        if self.by_name.contains_key(name) || self.coords.iter().any(|c| c == name) {
            return Err(AlgebraError::DuplicateName(name.to_string()));
        }
        let id = GenId(self.gens.len() as u32);
        self.gens.push(Generator {
            name: name.to_string(),
            parity,
            class,
        });
        self.by_name.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn declare_field(&mut self, name: &str, parity: Parity) -> Result<GenId, AlgebraError> {
        self.declare(name, parity, GenClass::Field)
    }

    pub fn generator(&self, id: GenId) -> &Generator {
        &self.gens[id.0 as usize]
    }

    pub fn generators(&self) -> impl Iterator<Item = (GenId, &Generator)> {
        self.gens
            .iter()
            .enumerate()
            .map(|(i, g)| (GenId(i as u32), g))
    }

    pub fn fields(&self) -> Vec<GenId> {
        self.generators()
            .filter(|(_, g)| g.class == GenClass::Field)
            .map(|(id, _)| id)
            .collect()
    }

    pub fn resolve(&self, name: &str) -> Result<GenId, AlgebraError> {
        self.by_name
            .get(name)
            .copied()
            .ok_or_else(|| AlgebraError::UnknownSymbol(name.to_string()))
    }

    /// Builds the jet symbol s^A_Lambda with the generator's parity.
    pub fn sym(&self, gen: GenId, index: MultiIndex) -> JetSymbol {
        JetSymbol {
            gen,
            parity: self.generator(gen).parity,
            index,
        }
    }

    pub fn sym0(&self, gen: GenId) -> JetSymbol {
        self.sym(gen, MultiIndex::empty())
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "dim {} coords", self.dim())?;
        for c in &self.coords {
            write!(f, " {c}")?;
        }
        for g in &self.gens {
            write!(f, "; {} {}", g.name, g.parity)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn antifield_and_ghost_numbers() {
        let g = Generator {
            name: "x".into(),
            parity: Parity::Even,
            class: GenClass::Antifield { stage: -1 },
        };
        assert_eq!(g.antifield_number(), 1);
        let g = Generator {
            name: "x".into(),
            parity: Parity::Even,
            class: GenClass::Antifield { stage: 1 },
        };
        assert_eq!(g.antifield_number(), 3);
        let g = Generator {
            name: "x".into(),
            parity: Parity::Even,
            class: GenClass::Ghost { stage: 0 },
        };
        assert_eq!(g.ghost_number(), 1);
        assert_eq!(g.antifield_number(), -1);
    }

    #[test]
    fn duplicate_names_rejected() {
        let mut m = Model::new(&["x"]);
        m.declare_field("u", Parity::Even).unwrap();
        assert!(m.declare_field("u", Parity::Odd).is_err());
        assert!(m.declare_field("x", Parity::Even).is_err());
    }
}
