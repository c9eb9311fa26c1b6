//! Operator-level recursion `P_j = -sum_{m+i=j, m<j} P_m r^i A_i P_0` and its
//! conormal symbols, as a cross-check of the symbol recursion.

use super::{leading_parametrix, parametrix_hierarchy, sample_points};
use crate::cone::{weight_shift_commute, ConormalHierarchy};
use crate::error::Result;
use crate::mero::linalg::norm;
use crate::mero::{CMatrix, MeroMatrix};
use num_complex::Complex64;

/// Signed word `P_0 r^{i_1} A_{i_1} P_0 r^{i_2} A_{i_2} P_0 ...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Word {
    pub sign: i8,
    pub factors: Vec<usize>,
}

/// Commutation of `r^beta` through a `P_0` inside a word.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftRecord {
    pub level: usize,
    pub word: usize,
    pub beta: f64,
    pub legal: bool,
    pub eps: f64,
}

#[derive(Clone, Debug)]
pub struct OperatorRecursion {
    /// `words[j]` expands the operator `P_j`.
    pub words: Vec<Vec<Word>>,
    /// Conormal symbol of `P_j` assembled from its words.
    pub levels: Vec<MeroMatrix>,
    pub shifts: Vec<ShiftRecord>,
    /// Difference to the symbol recursion per level, relative in the sup norm
    /// over the sample points.
    pub agreement: Vec<f64>,
}

/// Words of `P_0 .. P_depth`; `P_j` has `2^{j-1}` words for `j >= 1`.
pub fn expand_words(depth: usize) -> Vec<Vec<Word>> {
    let mut words: Vec<Vec<Word>> = vec![vec![Word { sign: 1, factors: Vec::new() }]];
    for j in 1..=depth {
        let mut wj = Vec::new();
        for m in 0..j {
            let i = j - m;
            for w in &words[m] {
                let mut factors = w.factors.clone();
                factors.push(i);
                wj.push(Word { sign: -w.sign, factors });
            }
        }
        words.push(wj);
    }
    words
}

/// Factors `(r-power, symbol)` of a word, left to right.
fn factor_list<'a>(w: &Word, q0: &'a MeroMatrix, h: &'a [MeroMatrix], mu: usize) -> Vec<(f64, &'a MeroMatrix)> {
    let mut out = vec![(mu as f64, q0)];
    for &i in &w.factors {
        out.push((i as f64 - mu as f64, &h[i]));
        out.push((mu as f64, q0));
    }
    out
}

/// Symbol of `(r^a x)(r^b y) ...` evaluated at `z`: factor `k` is shifted by
/// minus the total power to its right.
fn eval_word(factors: &[(f64, &MeroMatrix)], z: Complex64) -> CMatrix {
    let mut right = 0.0;
    let mut shifts = vec![0.0; factors.len()];
    for k in (0..factors.len()).rev() {
        shifts[k] = -right;
        right += factors[k].0;
    }
    let mut acc = factors[0].1.eval(z + shifts[0]);
    for k in 1..factors.len() {
        acc *= factors[k].1.eval(z + shifts[k]);
    }
    acc
}

fn symbol_word(factors: &[(f64, &MeroMatrix)]) -> MeroMatrix {
    let mut acc = factors[0].1.clone();
    for &(b, y) in &factors[1..] {
        acc = acc.translate_real(-b).mul(y);
    }
    acc
}

/// Expands `P_1 .. P_depth` into words, records the weight shifts through
/// `P_0`, assembles their symbols and compares them with the `q_j`.
pub fn operator_recursion(h: &ConormalHierarchy, gamma: f64, n: usize, depth: usize) -> Result<OperatorRecursion> {
    let mu = h.order as usize;
    let q0 = leading_parametrix(&h.levels[0], mu, gamma, n)?;
    let hs: Vec<MeroMatrix> = (0..=depth).map(|j| h.level(j)).collect();
    let words = expand_words(depth);
    let p = parametrix_hierarchy(h, gamma, n, depth)?;
    let mut shifts = Vec::new();
    let mut levels = Vec::with_capacity(depth + 1);
    let refs: Vec<&MeroMatrix> = p.levels.iter().chain(std::iter::once(&q0)).collect();
    let offsets: Vec<f64> = (0..=depth).map(|t| t as f64).collect();
    let samples = sample_points(&refs, &offsets, 24, 0.25, 0xc0ffee);
    let mut agreement = Vec::with_capacity(depth + 1);
    for (j, wj) in words.iter().enumerate() {
        let mut sym = MeroMatrix::zero(q0.rows(), q0.cols());
        for (wi, w) in wj.iter().enumerate() {
            let mut beta = 0.0;
            for &i in w.factors.iter().rev() {
                beta += i as f64;
                let s = weight_shift_commute(&q0, gamma - mu as f64, n, beta, None)?;
                shifts.push(ShiftRecord { level: j, word: wi, beta, legal: s.legal, eps: s.eps_used });
            }
            let f = factor_list(w, &q0, &hs, mu);
            let term = symbol_word(&f);
            sym = if w.sign > 0 { sym.add(&term) } else { sym.sub(&term) };
        }
        let (mut diff, mut size): (f64, f64) = (0.0, 0.0);
        for &z in &samples {
            let mut direct = CMatrix::zeros(q0.rows(), q0.cols());
            for w in wj {
                let v = eval_word(&factor_list(w, &q0, &hs, mu), z);
                direct += if w.sign > 0 { v } else { -v };
            }
            let target = p.levels[j].eval(z);
            size = size.max(norm(&target)).max(norm(&direct));
            diff = diff.max(norm(&(&direct - &target))).max(norm(&(sym.eval(z) - &target)));
        }
        let worst = if size == 0.0 { 0.0 } else { diff / size };
        agreement.push(worst);
        levels.push(sym);
    }
    Ok(OperatorRecursion { words, levels, shifts, agreement })
}
