//! Name-keyed registry of interchangeable algorithm implementations.

use crate::{Error, Result};
use std::collections::BTreeMap;
use std::sync::Arc;

/// Anything that can be registered under a stable name.
pub trait Named {
    fn name(&self) -> &'static str;
}

/// A set of implementations of one strategy trait, looked up by name at runtime.
pub struct Registry<T: ?Sized + Named> {
    entries: BTreeMap<&'static str, Arc<T>>,
    default: Option<&'static str>,
}

impl<T: ?Sized + Named> Default for Registry<T> {
    fn default() -> Self {
        Registry { entries: BTreeMap::new(), default: None }
    }
}

impl<T: ?Sized + Named> Registry<T> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers `item`; the first registered entry becomes the default.
    pub fn register(&mut self, item: Arc<T>) {
        let name = item.name();
        if self.default.is_none() {
            self.default = Some(name);
        }
        self.entries.insert(name, item);
    }

    pub fn get(&self, name: &str) -> Result<Arc<T>> {
        self.entries.get(name).cloned().ok_or_else(|| Error::UnknownStrategy {
            name: name.to_string(),
            available: self.names().join(", "),
        })
    }

    pub fn default_entry(&self) -> Option<Arc<T>> {
        self.default.and_then(|n| self.entries.get(n).cloned())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }
}
