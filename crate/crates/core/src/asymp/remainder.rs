//! Remainder classes produced by parametrix constructions and their composition.

use std::fmt;

/// Operator classes appearing as remainders, ordered by absorption.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RemainderClass {
    /// No remainder.
    Exact,
    /// `r^order` times an operator of the cone algebra.
    Flat(f64),
    /// Smoothing Mellin plus Green operators.
    SmoothingMellin,
    /// Green operators.
    Green,
    /// `r^order` times a Green operator.
    GreenFlat(f64),
}

/// Remainder class with a flag recording Green contributions from weight shifts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Remainder {
    pub class: RemainderClass,
    pub green_flag: bool,
}

impl Remainder {
    pub const EXACT: Remainder = Remainder { class: RemainderClass::Exact, green_flag: false };
    pub const SMOOTHING_MELLIN: Remainder = Remainder { class: RemainderClass::SmoothingMellin, green_flag: false };
    pub const GREEN: Remainder = Remainder { class: RemainderClass::Green, green_flag: false };

    pub fn flat(order: f64, green_flag: bool) -> Self {
        assert!(order >= 0.0, "flat orders are non-negative");
        Self { class: RemainderClass::Flat(order), green_flag }
    }

    pub fn green_flat(order: f64) -> Self {
        assert!(order >= 0.0, "flat orders are non-negative");
        Self { class: RemainderClass::GreenFlat(order), green_flag: false }
    }

    /// Flatness order carried by the class (`0` for unweighted classes).
    pub fn order(&self) -> f64 {
        match self.class {
            RemainderClass::Flat(a) | RemainderClass::GreenFlat(a) => a,
            _ => 0.0,
        }
    }
}

impl fmt::Display for Remainder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.class {
            RemainderClass::Exact => write!(f, "exact"),
            RemainderClass::Flat(a) if self.green_flag => write!(f, "flat({a}) + green"),
            RemainderClass::Flat(a) => write!(f, "flat({a})"),
            RemainderClass::SmoothingMellin => write!(f, "smoothing-mellin"),
            RemainderClass::Green => write!(f, "green"),
            RemainderClass::GreenFlat(a) => write!(f, "green-flat({a})"),
        }
    }
}

/// Class of `R1 o R2`.
pub fn compose_remainder(r1: Remainder, r2: Remainder) -> Remainder {
    use RemainderClass::*;
    match (r1.class, r2.class) {
        (Exact, _) => r2,
        (_, Exact) => r1,
        (Green, _) | (_, Green) => Remainder::GREEN,
        (SmoothingMellin, GreenFlat(_)) | (GreenFlat(_), SmoothingMellin) => Remainder::GREEN,
        (GreenFlat(_), _) | (_, GreenFlat(_)) => Remainder::green_flat(r1.order() + r2.order()),
        (SmoothingMellin, _) | (_, SmoothingMellin) => Remainder::SMOOTHING_MELLIN,
        (Flat(a), Flat(b)) => Remainder::flat(a + b, b > 0.0 || r1.green_flag || r2.green_flag),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples() -> Vec<Remainder> {
        vec![
            Remainder::EXACT,
            Remainder::flat(0.0, false),
            Remainder::flat(1.0, false),
            Remainder::flat(2.0, true),
            Remainder::SMOOTHING_MELLIN,
            Remainder::GREEN,
            Remainder::green_flat(0.0),
            Remainder::green_flat(3.0),
        ]
    }

    #[test]
    fn flat_orders_add() {
        let c = compose_remainder(Remainder::flat(1.0, false), Remainder::flat(2.0, false));
        assert_eq!(c, Remainder::flat(3.0, true));
        let c = compose_remainder(Remainder::flat(1.0, false), Remainder::flat(0.0, false));
        assert_eq!(c, Remainder::flat(1.0, false));
    }

    #[test]
    fn green_absorbs() {
        for r in samples() {
            if r.class != RemainderClass::Exact {
                assert_eq!(compose_remainder(Remainder::GREEN, r), Remainder::GREEN);
                assert_eq!(compose_remainder(r, Remainder::GREEN), Remainder::GREEN);
            }
        }
    }

    #[test]
    fn associativity_on_all_triples() {
        let s = samples();
        for &a in &s {
            for &b in &s {
                for &c in &s {
                    let l = compose_remainder(compose_remainder(a, b), c);
                    let r = compose_remainder(a, compose_remainder(b, c));
                    assert_eq!(l, r, "{a} {b} {c}");
                }
            }
        }
    }
}
