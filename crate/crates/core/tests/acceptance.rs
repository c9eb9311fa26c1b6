use conecalc::app::verify::{self, SuiteResult};

const SEED: u64 = 20240611;

fn check(r: SuiteResult) {
    println!("{}", r.line());
    assert!(r.passed, "criterion {} failed: {}", r.criterion, r.detail);
}

#[test]
fn c01_indicial_roots_of_cone_laplacian() {
    check(verify::indicial_s1(8, 0.5));
}

#[test]
fn c02_translation_product_matches_composition() {
    check(verify::translation_oracle(SEED, 50));
}

#[test]
fn c03_parametrix_defects_vanish() {
    check(verify::parametrix_defects(SEED, 20, 6));
}

#[test]
fn c04_operator_recursion_matches_symbol_recursion() {
    check(verify::recursion_cross_check(SEED, 10));
}

#[test]
fn c05_solver_matches_frobenius() {
    check(verify::frobenius_equivalence(SEED, 10, 6));
}

#[test]
fn c06_resonance_example() {
    check(verify::resonance_example());
}

#[test]
fn c07_coulomb_cusp() {
    check(verify::coulomb_cusp());
}

#[test]
fn c08_edge_consistency() {
    check(verify::edge_consistency(SEED, 4, 4));
}

#[test]
fn c09_remainder_algebra() {
    check(verify::remainder_algebra());
}

#[test]
fn c10_flat_residual_law() {
    check(verify::flat_residual_law(SEED, 10, 5));
}
