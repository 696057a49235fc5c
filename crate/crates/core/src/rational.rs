//! Exact rational arithmetic.
//!
//! All probabilities in this crate are arbitrary-precision rationals; floats
//! are never used. `Rat` is backed by [`num_rational::BigRational`], which
//! keeps values normalized (gcd 1, positive denominator).

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub type Rat = num_rational::BigRational;

/// Shorthand for building a rational from machine integers.
///
/// Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Formats a rational canonically: `"p/q"`, or just `"p"` when `q == 1`.
pub fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"p/q"` or `"p"` into a rational. Decimal notation is rejected.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Rat::new(num, den))
}

/// True for values usable as probabilities, i.e. in `[0, 1]`.
pub fn is_probability(r: &Rat) -> bool {
    !r.is_negative() && *r <= Rat::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn arithmetic_is_exact() {
        assert_eq!(rat(1, 3) + rat(1, 6), rat(1, 2));
        assert_eq!(rat(1, 10) + rat(9, 10), rat(1, 1));
        assert_eq!(rat(2, 4), rat(1, 2)); // normalized on construction
        assert_eq!(rat(1, 3) * rat(3, 5), rat(1, 5));
    }

    #[test]
    fn formatting_round_trips() {
        assert_eq!(rat_to_string(&rat(9, 10)), "9/10");
        assert_eq!(rat_to_string(&rat(1, 1)), "1");
        assert_eq!(rat_to_string(&rat(0, 5)), "0");
        assert_eq!(parse_rat("9/10"), Some(rat(9, 10)));
        assert_eq!(parse_rat("1"), Some(rat(1, 1)));
        assert_eq!(parse_rat("0.5"), None);
        assert_eq!(parse_rat("1/0"), None);
    }

    fn arb_rat() -> impl Strategy<Value = Rat> {
        (-50i64..50, 1i64..50).prop_map(|(n, d)| rat(n, d))
    }

    proptest! {
        // Spot checks of the field axioms on randomized inputs.
        #[test]
        fn field_axioms(a in arb_rat(), b in arb_rat(), c in arb_rat()) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!((&a + &b) + &c, &a + (&b + &c));
            prop_assert_eq!((&a * &b) * &c, &a * (&b * &c));
            prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
            prop_assert_eq!(&a + (-&a), rat(0, 1));
            if !a.is_zero() {
                prop_assert_eq!(&a * &(Rat::one() / &a), rat(1, 1));
            }
        }

        #[test]
        fn parse_format_identity(a in arb_rat()) {
            prop_assert_eq!(parse_rat(&rat_to_string(&a)), Some(a));
        }
    }
}
