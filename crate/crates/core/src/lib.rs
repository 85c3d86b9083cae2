//! Decision procedures for descent along functors between finite categories.

pub mod catalog;
pub mod cauchy;
pub mod codescent;
pub mod corpus;
pub mod descent;
pub mod enumerate;
pub mod error;
pub mod fincat;
pub mod format;
pub mod kernel;
pub mod laxepi;
pub mod present;
pub mod verdict;

pub use error::{Error, Result};
pub use fincat::{compose_functors, validate_category, FinCategory, FinFunctor, MorId, ObjId};
pub use verdict::{Bound, Resource, Verdict, Witness};
