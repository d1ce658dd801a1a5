//! Textual form of the archetype diagram.
//!
//! ```text
//! archetype bObject CLIENT {
//!     fields {
//!         B- clientId: int/INT PK
//!         B- clientName: string/varchar(500)
//!     }
//! }
//!
//! relationship makes (CLIENT 1 -- n RESERVATION) {
//!     total: RESERVATION;
//! }
//! ```

mod lexer;
mod parser;
mod printer;

pub use lexer::{tokenize, Token, TokenKind};
pub use parser::{parse_model, parse_model_in};
pub use printer::pretty_print;
pub(crate) use printer::{method_signature, relation_text};
