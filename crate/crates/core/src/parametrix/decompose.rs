//! Splitting an operator into Taylor terms `r^i A_i` with Mellin contributions regrouped.

use crate::asymp::Remainder;
use crate::cone::{FuchsOperator, SmoothingMellinPart};
use crate::error::{Error, Result};
use crate::mero::{MatPolynomial, MeroMatrix};

/// Level-`i` term: the differential symbol `h_i` and Mellin symbols with their weights.
#[derive(Clone, Debug)]
pub struct TaylorTerm {
    pub i: usize,
    pub differential: MatPolynomial,
    pub mellin: Vec<(f64, MeroMatrix)>,
    pub tag: Remainder,
}

#[derive(Clone, Debug)]
pub struct TaylorDecomposition {
    pub terms: Vec<TaylorTerm>,
    /// Class of the operator left after level `depth`.
    pub remainder: Remainder,
    pub green_flag: bool,
    /// Set when the operator has Taylor data beyond `depth`.
    pub truncated: bool,
}

/// Terms `r^i A_i`, `i <= depth`. Mellin terms of weight `gamma_j < gamma`
/// move from level `j` to level `j - 1` (level 0 for `j = 1`): the symbol is
/// translated by `-1` and the weight raised by one, capped at `gamma`; the
/// move leaves a Green remainder.
pub fn taylor_decompose(
    a: &FuchsOperator,
    mellin: Option<&SmoothingMellinPart>,
    gamma: f64,
    n: usize,
    depth: usize,
) -> Result<TaylorDecomposition> {
    let k = a.size();
    let mut terms: Vec<TaylorTerm> = (0..=depth)
        .map(|i| TaylorTerm {
            i,
            differential: if i <= a.r_order() { a.level_symbol(i) } else { MatPolynomial::zero(k, k) },
            mellin: Vec::new(),
            tag: if i == 0 { Remainder::EXACT } else { Remainder::flat(i as f64, false) },
        })
        .collect();
    let mut green_flag = false;
    let mut truncated = a.r_order() > depth;
    if let Some(m) = mellin {
        let checked = SmoothingMellinPart::new(m.terms.clone(), gamma, n)?;
        for t in &checked.terms {
            if t.symbol.shape() != (k, k) {
                return Err(Error::DimensionMismatch("Mellin symbol size".into()));
            }
            let (level, weight, symbol) = if t.gamma_j < gamma && t.j >= 1 {
                green_flag = true;
                (t.j - 1, (t.gamma_j + 1.0).min(gamma), t.symbol.translate_real(-1.0))
            } else {
                (t.j, t.gamma_j, t.symbol.clone())
            };
            if level > depth {
                truncated = true;
                continue;
            }
            let term = &mut terms[level];
            term.mellin.push((weight, symbol));
            if weight != t.gamma_j || level != t.j {
                term.tag.green_flag = true;
            }
        }
    }
    Ok(TaylorDecomposition {
        terms,
        remainder: Remainder::flat((depth + 1) as f64, green_flag),
        green_flag,
        truncated,
    })
}
