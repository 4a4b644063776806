//! Invariant reports that list every problem with an input instead of
//! stopping at the first one.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// Which field or entry is at fault, e.g. `sigma_x` or `pmf_xy`.
    pub location: String,
    pub message: String,
}

impl Violation {
    pub fn new(location: impl Into<String>, message: impl Into<String>) -> Self {
        Self { location: location.into(), message: message.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}
