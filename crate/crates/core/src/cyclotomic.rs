//! Exact arithmetic in `Q(ζ_{p^m})` and `Z[ζ_{p^m}]`.
//!
//! Elements are integer polynomials of degree `< φ(p^m)` reduced modulo
//! `Φ_{p^m}(X) = Σ_{i<p} X^{i p^{m-1}}`, over a positive common denominator.
//! The valuation is normalised by `v(p) = 1` and computed from the norm,
//! i.e. the resultant with `Φ_{p^m}`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::rational::{vp_int, Rational};

/// `Φ_{p^m}` as integer coefficients, constant term first.
pub fn cyclotomic_modulus(p: u64, m: u32) -> Vec<i64> {
    let step = p.pow(m - 1) as usize;
    let mut out = vec![0i64; step * (p as usize - 1) + 1];
    for i in 0..p as usize {
        out[i * step] = 1;
    }
    out
}

pub fn euler_phi_prime_power(p: u64, m: u32) -> usize {
    (p.pow(m - 1) * (p - 1)) as usize
}

#[derive(Clone, PartialEq, Eq)]
pub struct CyclotomicNumber {
    p: u64,
    m: u32,
    num: Vec<BigInt>,
    den: BigInt,
}

impl fmt::Debug for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.num.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")/{}", self.den)
    }
}

impl CyclotomicNumber {
    pub fn zero(p: u64, m: u32) -> Self {
        Self { p, m, num: vec![BigInt::zero(); euler_phi_prime_power(p, m)], den: BigInt::one() }
    }

    pub fn from_integer(p: u64, m: u32, n: impl Into<BigInt>) -> Self {
        let mut z = Self::zero(p, m);
        z.num[0] = n.into();
        z
    }

    pub fn one(p: u64, m: u32) -> Self {
        Self::from_integer(p, m, 1)
    }

    /// `ζ^c` for any integer exponent `c`.
    pub fn zeta_pow(p: u64, m: u32, c: i64) -> Self {
        let order = p.pow(m) as i64;
        let e = c.rem_euclid(order) as usize;
        let mut coeffs = vec![BigInt::zero(); e + 1];
        coeffs[e] = BigInt::one();
        Self::from_parts(p, m, coeffs, BigInt::one())
    }

    /// `Σ counts[c] ζ^c`.
    pub fn from_exponent_counts(p: u64, m: u32, counts: &[u64]) -> Self {
        let coeffs = counts.iter().map(|&c| BigInt::from(c)).collect();
        Self::from_parts(p, m, coeffs, BigInt::one())
    }

    /// Reduce an arbitrary polynomial over a nonzero denominator.
    pub fn from_parts(p: u64, m: u32, mut coeffs: Vec<BigInt>, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let phi = euler_phi_prime_power(p, m);
        let step = p.pow(m - 1) as usize;
        // X^{phi + r} = -Σ_{t < p-1} X^{t step + r}
        for i in (phi..coeffs.len()).rev() {
            let c = std::mem::take(&mut coeffs[i]);
            if c.is_zero() {
                continue;
            }
            let r = i - phi;
            for t in 0..(p as usize - 1) {
                coeffs[r + t * step] -= &c;
            }
        }
        coeffs.resize(phi, BigInt::zero());
        let mut z = Self { p, m, num: coeffs, den };
        z.normalize();
        z
    }

    fn normalize(&mut self) {
        if self.den.is_negative() {
            self.den = -&self.den;
            self.num.iter_mut().for_each(|c| *c = -&*c);
        }
        let mut g = self.den.clone();
        for c in &self.num {
            if g.is_one() {
                break;
            }
            g = g.gcd(c);
        }
        if !g.is_one() {
            self.num.iter_mut().for_each(|c| *c = &*c / &g);
            self.den = &self.den / &g;
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn level(&self) -> u32 {
        self.m
    }

    pub fn phi(&self) -> usize {
        self.num.len()
    }

    pub fn numerator(&self) -> &[BigInt] {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    /// In `Z[ζ]`: the reduced denominator is 1.
    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    /// The rational value, if the element lies in `Q`.
    pub fn as_rational(&self) -> Option<Rational> {
        self.num[1..]
            .iter()
            .all(Zero::is_zero)
            .then(|| Rational::new(self.num[0].clone(), self.den.clone()))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let num = self.num.iter().map(|x| x * c.numer()).collect();
        let mut z = Self { p: self.p, m: self.m, num, den: &self.den * c.denom() };
        z.normalize();
        z
    }

    /// `v(z)` normalised with `v(p) = 1`; `None` encodes `+∞` for zero.
    ///
    /// `p` is totally ramified in `Q(ζ_{p^m})`, so `v(w) = v_p(N(w)) / φ`
    /// for the integral part `w`, with `N(w) = ±Res(w, Φ)`.
    pub fn padic_valuation(&self) -> Option<Rational> {
        if self.is_zero() {
            return None;
        }
        let modulus: Vec<BigInt> = cyclotomic_modulus(self.p, self.m).into_iter().map(BigInt::from).collect();
        let norm = resultant(&self.num, &modulus);
        let v_norm = vp_int(self.p, &norm).expect("nonzero element has nonzero norm") as i64;
        let v_den = vp_int(self.p, &self.den).expect("nonzero denominator") as i64;
        Some(Rational::new(BigInt::from(v_norm), BigInt::from(self.phi() as i64)) - BigInt::from(v_den))
    }

    fn check(&self, other: &Self) {
        assert!(self.p == other.p && self.m == other.m, "cyclotomic field mismatch");
    }
}

impl Add for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, rhs: &CyclotomicNumber) -> CyclotomicNumber {
        self.check(rhs);
        let num = self.num.iter().zip(&rhs.num).map(|(a, b)| a * &rhs.den + b * &self.den).collect();
        let mut z = CyclotomicNumber { p: self.p, m: self.m, num, den: &self.den * &rhs.den };
        z.normalize();
        z
    }
}

impl Sub for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn sub(self, rhs: &CyclotomicNumber) -> CyclotomicNumber {
        self + &(-rhs)
    }
}

impl Neg for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn neg(self) -> CyclotomicNumber {
        CyclotomicNumber { p: self.p, m: self.m, num: self.num.iter().map(|c| -c).collect(), den: self.den.clone() }
    }
}

impl Mul for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn mul(self, rhs: &CyclotomicNumber) -> CyclotomicNumber {
        self.check(rhs);
        let n = self.num.len();
        let mut wide = vec![BigInt::zero(); 2 * n - 1];
        for (i, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.num.iter().enumerate() {
                if !b.is_zero() {
                    wide[i + j] += a * b;
                }
            }
        }
        CyclotomicNumber::from_parts(self.p, self.m, wide, &self.den * &rhs.den)
    }
}

/// Resultant of two integer polynomials (constant term first) by
/// fraction-free Gaussian elimination on the Sylvester matrix.
pub fn resultant(a: &[BigInt], b: &[BigInt]) -> BigInt {
    let trim = |v: &[BigInt]| {
        let mut v = v.to_vec();
        while v.len() > 1 && v.last().is_some_and(Zero::is_zero) {
            v.pop();
        }
        v
    };
    let a = trim(a);
    let b = trim(b);
    let (r, s) = (a.len() - 1, b.len() - 1);
    if (r == 0 && a[0].is_zero()) || (s == 0 && b[0].is_zero()) {
        return BigInt::zero();
    }
    if r == 0 {
        return num_traits::pow(a[0].clone(), s);
    }
    if s == 0 {
        return num_traits::pow(b[0].clone(), r);
    }
    let size = r + s;
    let mut mat = vec![vec![BigInt::zero(); size]; size];
    for row in 0..s {
        for (i, c) in a.iter().rev().enumerate() {
            mat[row][row + i] = c.clone();
        }
    }
    for row in 0..r {
        for (i, c) in b.iter().rev().enumerate() {
            mat[s + row][row + i] = c.clone();
        }
    }
    bareiss_determinant(mat)
}

fn bareiss_determinant(mut mat: Vec<Vec<BigInt>>) -> BigInt {
    let n = mat.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if mat[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !mat[i][k].is_zero()) else {
                return BigInt::zero();
            };
            mat.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &mat[i][j] * &mat[k][k] - &mat[i][k] * &mat[k][j];
                mat[i][j] = v / &prev;
            }
            mat[i][k] = BigInt::zero();
        }
        prev = mat[k][k].clone();
    }
    sign * &mat[n - 1][n - 1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn moduli() {
        assert_eq!(cyclotomic_modulus(3, 1), vec![1, 1, 1]);
        assert_eq!(cyclotomic_modulus(3, 2), vec![1, 0, 0, 1, 0, 0, 1]);
        assert_eq!(cyclotomic_modulus(2, 1), vec![1, 1]);
    }

    #[test]
    fn reduction_examples() {
        let z = CyclotomicNumber::zeta_pow(3, 1, 1);
        let z2 = CyclotomicNumber::zeta_pow(3, 1, 2);
        assert_eq!(&z + &z2, CyclotomicNumber::from_integer(3, 1, -1));
        // ζ · ζ^{φ-1} through the overflow path, for Φ_9
        let a = CyclotomicNumber::zeta_pow(3, 2, 1);
        let b = CyclotomicNumber::zeta_pow(3, 2, 5);
        assert_eq!(&a * &b, CyclotomicNumber::zeta_pow(3, 2, 6));
        assert_eq!(&CyclotomicNumber::zeta_pow(3, 2, 4) * &b, CyclotomicNumber::one(3, 2));
        // (1/2) · 2ζ = ζ
        let two_z = CyclotomicNumber::from_parts(3, 1, big(&[0, 2]), BigInt::one());
        assert_eq!(two_z.scale(&rat(1, 2)), z);
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(CyclotomicNumber::from_integer(3, 1, 3).padic_valuation(), Some(int(1)));
        assert_eq!(CyclotomicNumber::from_integer(5, 2, 5).padic_valuation(), Some(int(1)));
        let one_minus = |p, m| &CyclotomicNumber::one(p, m) - &CyclotomicNumber::zeta_pow(p, m, 1);
        assert_eq!(one_minus(3, 1).padic_valuation(), Some(rat(1, 2)));
        assert_eq!(one_minus(3, 2).padic_valuation(), Some(rat(1, 6)));
        assert_eq!(one_minus(7, 1).padic_valuation(), Some(rat(1, 6)));
        assert_eq!(CyclotomicNumber::zero(3, 2).padic_valuation(), None);
        let third = CyclotomicNumber::one(3, 1).scale(&rat(1, 9));
        assert_eq!(third.padic_valuation(), Some(int(-2)));
    }

    #[test]
    fn resultant_small_cases() {
        assert_eq!(resultant(&big(&[1, -1]), &big(&[1, 1, 1])), BigInt::from(3));
        assert_eq!(resultant(&big(&[1, -1]), &big(&[1, 0, 0, 1, 0, 0, 1])), BigInt::from(3));
        // Res(x - 2, x^2 + 1) = 5
        assert_eq!(resultant(&big(&[-2, 1]), &big(&[1, 0, 1])).abs(), BigInt::from(5));
        assert_eq!(resultant(&big(&[4]), &big(&[1, 0, 1])), BigInt::from(16));
    }

    /// `Res(Φ, w) = Π w(r)` over the roots of `Φ` in `F_ℓ`, `ℓ ≡ 1 mod p^m`.
    fn resultant_mod_split_prime(w: &[i64], p: u64, m: u32) -> (u64, u64) {
        let order = p.pow(m);
        let ell = (1..).map(|t| t * order + 1).find(|&c| crate::finite_field::is_prime(c)).unwrap();
        let powmod = |mut b: u64, mut e: u64| {
            let mut r = 1u64;
            b %= ell;
            while e > 0 {
                if e & 1 == 1 {
                    r = r * b % ell;
                }
                b = b * b % ell;
                e >>= 1;
            }
            r
        };
        // an element of exact order p^m
        let root = (2..ell)
            .map(|g| powmod(g, (ell - 1) / order))
            .find(|&h| powmod(h, order / p) != 1)
            .unwrap();
        let mut prod = 1u64;
        for j in 1..order {
            if j % p == 0 {
                continue;
            }
            let r = powmod(root, j);
            let mut acc = 0u64;
            for &c in w.iter().rev() {
                acc = (acc * r + c.rem_euclid(ell as i64) as u64) % ell;
            }
            prod = prod * acc % ell;
        }
        (prod, ell)
    }

    proptest! {
        #[test]
        fn resultant_matches_modular_evaluation(w in proptest::collection::vec(-20i64..20, 1..7), m in 1u32..3) {
            let p = 3u64;
            let (expected, ell) = resultant_mod_split_prime(&w, p, m);
            let phi = cyclotomic_modulus(p, m);
            let res = resultant(&big(&w), &big(&phi));
            let ell_b = BigInt::from(ell);
            let got = ((res % &ell_b) + &ell_b) % &ell_b;
            // Res(w, Φ) = (-1)^{deg w deg Φ} Res(Φ, w); deg Φ is even here
            prop_assert_eq!(got, BigInt::from(expected));
        }

        #[test]
        fn valuation_is_multiplicative_and_ultrametric(
            a in proptest::collection::vec(-9i64..9, 6),
            b in proptest::collection::vec(-9i64..9, 6),
        ) {
            let x = CyclotomicNumber::from_parts(3, 2, big(&a), BigInt::one());
            let y = CyclotomicNumber::from_parts(3, 2, big(&b), BigInt::from(3));
            if let (Some(vx), Some(vy)) = (x.padic_valuation(), y.padic_valuation()) {
                prop_assert_eq!((&x * &y).padic_valuation(), Some(&vx + &vy));
                if let Some(vs) = (&x + &y).padic_valuation() {
                    prop_assert!(vs >= vx.clone().min(vy.clone()));
                }
            }
        }

        #[test]
        fn valuation_on_integers_is_p_adic(n in 1i64..100000) {
            let z = CyclotomicNumber::from_integer(5, 2, n);
            let expected = crate::rational::vp_int(5, &BigInt::from(n)).unwrap() as i64;
            prop_assert_eq!(z.padic_valuation(), Some(int(expected)));
        }
    }
}
