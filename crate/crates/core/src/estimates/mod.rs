//! Operator norms, the Calderón–Vaillancourt derivative bound, ellipticity
//! probing and the Gårding inequality check.

mod cv;
mod ellipticity;
mod garding;
mod norm;

pub use cv::{cv_bound, cv_bound_symbol, CvBox, CvEntry, CvReport, TauSup};
pub use ellipticity::{ellipticity, SymbolBox};
pub use garding::{garding_check, GardingReport};
pub use norm::{matrix_norm, operator_norm, power_iteration, NormMethod, NormReport};
