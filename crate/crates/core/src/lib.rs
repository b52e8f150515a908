pub mod criteria;
pub mod cyclopoly;
pub mod elemprops;
pub mod error;
pub mod gfield;
pub mod numth;
pub mod published;
pub mod repro;
mod serde_big;
pub mod witness;

pub use criteria::{CriterionReport, ProblemInstance, Verdict};
pub use error::{Error, Result};
