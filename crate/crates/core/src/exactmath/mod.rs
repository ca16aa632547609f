//! Exact arithmetic: big integers, rationals, modular inverses, factorization
//! and integer/rational matrix algebra.
//!
//! Every quantity handled by the rest of the crate (multiplicities, residues,
//! intersection numbers, Chern class coordinates) goes through these types, so
//! nothing here ever truncates to a machine word.

mod matrix;
mod ratmat;
mod snf;

pub use matrix::IntMatrix;
pub use ratmat::RatMatrix;
pub use snf::{smith_normal_form, SnfResult};

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use num_bigint::BigInt as Int;
pub use num_rational::BigRational as Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("{a} is not invertible modulo {m} (gcd = {gcd})")]
    NotCoprime { a: Int, m: Int, gcd: Int },
    #[error("modulus {0} must be at least 2")]
    BadModulus(Int),
    #[error("expected a positive integer, got {0}")]
    NotPositive(Int),
}

/// Shorthand for building an [`Int`] from a machine integer.
pub fn int(v: i64) -> Int {
    Int::from(v)
}

/// Shorthand for the rational `n/d`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(Int::from(n), Int::from(d))
}

pub fn rat_int(v: &Int) -> Rational {
    Rational::from_integer(v.clone())
}

/// Canonical representative of `a` in `[0, m)`.
pub fn modulo(a: &Int, m: &Int) -> Int {
    a.mod_floor(m)
}

pub fn gcd(a: &Int, b: &Int) -> Int {
    a.gcd(b)
}

pub fn lcm(a: &Int, b: &Int) -> Int {
    a.lcm(b)
}

/// Inverse of `a` modulo `m`, as the representative in `[1, m)`.
pub fn mod_inverse(a: &Int, m: &Int) -> Result<Int, ArithError> {
    if *m < int(2) {
        return Err(ArithError::BadModulus(m.clone()));
    }
    let ext = modulo(a, m).extended_gcd(m);
    if !ext.gcd.is_one() {
        return Err(ArithError::NotCoprime {
            a: a.clone(),
            m: m.clone(),
            gcd: ext.gcd,
        });
    }
    Ok(modulo(&ext.x, m))
}

/// Prime factorization as `(prime, exponent)` pairs with strictly increasing
/// primes. `1` factors as the empty list.
///
/// Trial division: the inputs in this crate are prime powers of small primes
/// and orders of isolated singular points.
pub fn factorize(n: &Int) -> Result<Vec<(Int, u32)>, ArithError> {
    if !n.is_positive() {
        return Err(ArithError::NotPositive(n.clone()));
    }
    let mut rest = n.clone();
    let mut out = Vec::new();
    let mut p = int(2);
    while &p * &p <= rest {
        if rest.is_multiple_of(&p) {
            let mut e = 0u32;
            while rest.is_multiple_of(&p) {
                rest /= &p;
                e += 1;
            }
            out.push((p.clone(), e));
        }
        p += if p == int(2) { 1 } else { 2 };
    }
    if !rest.is_one() {
        out.push((rest, 1));
    }
    Ok(out)
}

/// Product of the distinct primes dividing `n`.
pub fn radical(n: &Int) -> Result<Int, ArithError> {
    Ok(factorize(n)?.into_iter().map(|(p, _)| p).product())
}

/// `rad(d) / gcd(rad(d), rad(j))`: the product of the primes of `d` that do
/// not divide `j`.
pub fn radical_quotient(d: &Int, j: &Int) -> Result<Int, ArithError> {
    let rd = radical(d)?;
    let rj = radical(j)?;
    let g = gcd(&rd, &rj);
    Ok(rd / g)
}

pub fn is_prime(n: &Int) -> bool {
    if *n < int(2) {
        return false;
    }
    matches!(factorize(n).as_deref(), Ok([(_, 1)]))
}

/// gcd of all entries; zero for an empty or all-zero slice.
pub fn gcd_all<'a>(values: impl IntoIterator<Item = &'a Int>) -> Int {
    values.into_iter().fold(Int::zero(), |acc, v| acc.gcd(v))
}

/// Exact conversion of a rational known to be integral.
pub fn to_integer(r: &Rational) -> Option<Int> {
    r.is_integer().then(|| r.to_integer())
}

/// Renders a rational as `n` or `n/d`.
pub fn fmt_rat(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `n` or `n/d` (denominator nonzero).
pub fn parse_rat(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: Int = n.trim().parse().ok()?;
            let d: Int = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => s.parse::<Int>().ok().map(Rational::from_integer),
    }
}

pub fn abs(v: &Int) -> Int {
    v.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mod_inverse_examples() {
        assert_eq!(mod_inverse(&int(3), &int(7)).unwrap(), int(5));
        assert_eq!(mod_inverse(&int(1), &int(9)).unwrap(), int(1));
        assert_eq!(mod_inverse(&int(2), &int(9)).unwrap(), int(5));
        assert!(matches!(
            mod_inverse(&int(2), &int(4)),
            Err(ArithError::NotCoprime { .. })
        ));
        assert!(matches!(
            mod_inverse(&int(1), &int(1)),
            Err(ArithError::BadModulus(_))
        ));
        // negative inputs reduce first
        assert_eq!(mod_inverse(&int(-3), &int(7)).unwrap(), int(2));
    }

    #[test]
    fn factorize_examples() {
        assert!(factorize(&int(1)).unwrap().is_empty());
        assert_eq!(factorize(&int(12)).unwrap(), vec![(int(2), 2), (int(3), 1)]);
        assert_eq!(factorize(&int(729)).unwrap(), vec![(int(3), 6)]);
        assert_eq!(factorize(&int(97)).unwrap(), vec![(int(97), 1)]);
        assert!(factorize(&int(0)).is_err());
    }

    #[test]
    fn radical_quotient_examples() {
        assert_eq!(radical_quotient(&int(2), &int(1)).unwrap(), int(2));
        assert_eq!(radical_quotient(&int(1), &int(35)).unwrap(), int(1));
        assert_eq!(radical_quotient(&int(12), &int(6)).unwrap(), int(1));
        assert_eq!(radical_quotient(&int(2), &int(2)).unwrap(), int(1));
        assert_eq!(radical_quotient(&int(30), &int(4)).unwrap(), int(15));
    }

    #[test]
    fn rational_text_roundtrip() {
        for r in [rat(1, 2), rat(-1, 2), rat(8, 1), rat(0, 5), rat(15, 2)] {
            assert_eq!(parse_rat(&fmt_rat(&r)).unwrap(), r);
        }
        assert!(parse_rat("1/0").is_none());
        assert!(parse_rat("x").is_none());
    }

    #[test]
    fn primes() {
        let ps: Vec<i64> = (0..30).filter(|n| is_prime(&int(*n))).collect();
        assert_eq!(ps, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }
}
