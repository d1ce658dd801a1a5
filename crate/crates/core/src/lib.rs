//! DooML archetype diagrams: parsing, validation, conversion and emission.
//!
//! ```
//! use dooml_core::{syntax::parse_model, validate::validate};
//!
//! let model = parse_model(
//!     "archetype bObject CLIENT { fields { B- clientId: int/INT PK } }",
//! ).unwrap();
//! assert!(validate(&model).ok);
//! ```

pub mod convert;
pub mod diagnostic;
pub mod emit;
pub mod model;
pub mod pipeline;
pub mod resolve;
pub mod syntax;
#[cfg(feature = "testkit")]
pub mod testkit;
pub mod validate;
