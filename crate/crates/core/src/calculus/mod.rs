//! Expansion machinery: amplitude reduction, polynomial product expansion,
//! amplitude-to-symbol terms, quantization change, duality, composition,
//! parametrix, and the leading-order change of variables.

mod changevar;
mod compose;
mod dual;
mod expansion;
mod jet;
mod multi_index;
mod parametrix;
mod reduce;

pub use changevar::{changevar_leading, leading_symbol, ChangevarReport};
pub use compose::compose_expansion;
pub use dual::{dual_quantization, DualKind};
pub use expansion::{
    amplitude_to_symbol_terms, convert_quantization, diff_xi, factor_expansion, index_pairs, ClosedPiece,
    ExpansionResult, ExpansionTerm, Remainder, NODE_LIMIT,
};
pub use multi_index::{MultiIndex, MAX_ORDER};
pub use parametrix::{band_residual, cutoff, parametrix, parametrix_in, Parametrix, ParametrixReport};
pub use reduce::reduce_amplitude;
