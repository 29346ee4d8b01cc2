//! Composition of two quantized operators as a single expansion.

use crate::error::{Error, Result};
use crate::quantize::amplitude_of;
use crate::symbol::ComplexSymbol;
use crate::tau::QuantizingFunction;

use super::expansion::{amplitude_to_symbol_terms, convert_quantization, ExpansionResult};

/// Expansion of `A_{σ₁,τ₁} A_{σ₂,τ₂}` in the `τ₃` quantization.
///
/// `σ₁` is rewritten as a left symbol `σ′` and `σ₂` as a right symbol `σ″`;
/// the product amplitude `σ′(x, ξ) σ″(y, ξ)` is then expanded.
pub fn compose_expansion(
    s1: &ComplexSymbol,
    t1: &QuantizingFunction,
    s2: &ComplexSymbol,
    t2: &QuantizingFunction,
    t3: &QuantizingFunction,
    m: u32,
    n_taylor: u32,
) -> Result<ExpansionResult> {
    let n = t1.dim();
    if t2.dim() != n || t3.dim() != n {
        return Err(Error::DimensionMismatch("quantizing functions differ in dimension".into()));
    }
    let kn = QuantizingFunction::preset("kn", n)?;
    let akn = QuantizingFunction::preset("akn", n)?;
    let left = convert_quantization(s1, t1, &kn, m, n_taylor)?.symbol_sum()?;
    let right = convert_quantization(s2, t2, &akn, m, n_taylor)?.symbol_sum()?;
    let a = amplitude_of(&left, &kn).mul(&amplitude_of(&right, &akn));
    amplitude_to_symbol_terms(&a, t3, m, n_taylor)
}
