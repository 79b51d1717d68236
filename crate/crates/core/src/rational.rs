//! Small helpers for exact rationals and `p`-adic valuations.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `v_p(n)`; `None` for zero.
pub fn vp_int(p: u64, n: &BigInt) -> Option<u64> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        n = q;
        v += 1;
    }
}

/// `v_p(x)` for a rational; `None` for zero.
pub fn vp_rat(p: u64, x: &Rational) -> Option<i64> {
    let num = vp_int(p, x.numer())? as i64;
    let den = vp_int(p, x.denom()).expect("nonzero denominator") as i64;
    Some(num - den)
}

/// Always `num/den`, including integers (`3/1`).
pub fn fmt_rat(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parse `a`, `-a`, or `a/b`.
pub fn parse_rat(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            (!d.is_zero()).then(|| Rational::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuations() {
        assert_eq!(vp_int(3, &BigInt::from(54)), Some(3));
        assert_eq!(vp_int(3, &BigInt::from(0)), None);
        assert_eq!(vp_rat(3, &rat(2, 9)), Some(-2));
        assert_eq!(vp_rat(5, &rat(-25, 3)), Some(2));
    }

    #[test]
    fn formatting_round_trip() {
        assert_eq!(fmt_rat(&int(3)), "3/1");
        assert_eq!(fmt_rat(&rat(-4, 6)), "-2/3");
        assert_eq!(parse_rat("-2/3"), Some(rat(-2, 3)));
        assert_eq!(parse_rat("7"), Some(int(7)));
        assert_eq!(parse_rat("1/0"), None);
        assert_eq!(binomial(5, 2), BigInt::from(10));
    }
}
