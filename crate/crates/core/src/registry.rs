//! Name-keyed registries of interchangeable strategies.
//!
//! Each algorithm family (transform backends, convolution backends,
//! almost-period finders, regularity and Bogolyubov variants) is a trait
//! object registered under a stable name, so callers and the CLI can pick a
//! variant at runtime.

use std::sync::Arc;

use crate::error::{Error, Result};

/// Anything that can be stored in a [`Registry`].
pub trait Named {
    fn name(&self) -> &'static str;
}

pub struct Registry<T: ?Sized> {
    family: &'static str,
    entries: Vec<Arc<T>>,
}

impl<T: ?Sized + Named> Registry<T> {
    pub fn new(family: &'static str) -> Self {
        Self {
            family,
            entries: Vec::new(),
        }
    }

    /// Adds a strategy, replacing any earlier entry with the same name.
    pub fn register(&mut self, strategy: Arc<T>) -> &mut Self {
        let name = strategy.name();
        match self.entries.iter().position(|e| e.name() == name) {
            Some(i) => self.entries[i] = strategy,
            None => self.entries.push(strategy),
        }
        self
    }

    pub fn get(&self, name: &str) -> Result<Arc<T>> {
        self.entries
            .iter()
            .find(|e| e.name() == name)
            .cloned()
            .ok_or_else(|| Error::UnknownStrategy {
                name: format!("{}:{name}", self.family),
                available: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name()).collect()
    }

    pub fn family(&self) -> &'static str {
        self.family
    }
}
