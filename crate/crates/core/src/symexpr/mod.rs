//! A small real-valued expression language: parsing, printing, evaluation,
//! symbolic differentiation and substitution.

mod compile;
mod diff;
mod eval;
mod expr;
mod parse;
mod print;

pub use compile::Program;
pub use eval::{binding, Binding};
pub use expr::{ramp_weight, Expr, Func, Node};
pub use parse::parse;
pub use print::print;
