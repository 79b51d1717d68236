//! `L_f(s) = exp(Σ S_f(k) s^k / k)` from exact character sums, and the
//! characteristic function `C_f(s) = exp(-Σ S_f(k) s^k / (k (q^k - 1)))`
//! with `C_f(s) = C_f(qs) L_f(s)`.

use num_bigint::BigInt;
use thiserror::Error;

use crate::cyclotomic::CyclotomicNumber;
use crate::engine::{sum_sequence, EngineConfig, EngineError, SumResult};
use crate::rational::Rational;
use crate::sum::ExponentialSum;

pub const DEFAULT_BUFFER: u32 = 3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LFunctionError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("degree violation: expected degree {expected}, {detail}")]
    DegreeViolation { expected: u64, detail: String },
    #[error("integrality violation: coefficient {index} has denominator {denominator}")]
    IntegralityViolation { index: usize, denominator: String },
    #[error("need {needed} sums, got {available}")]
    NotEnoughSums { needed: usize, available: usize },
}

/// Coefficients `c_0..c_N` of `exp(Σ_{k≤N} S_k s^k / k)`, from
/// `n c_n = Σ_{k=1}^n S_k c_{n-k}`.
pub fn lseries_coefficients(sums: &[CyclotomicNumber]) -> Vec<CyclotomicNumber> {
    exp_series(sums, |s, _| s.clone())
}

/// `exp(Σ t_k s^k / k)` with `t_k = weight(S_k, k)`.
fn exp_series(
    sums: &[CyclotomicNumber],
    weight: impl Fn(&CyclotomicNumber, u32) -> CyclotomicNumber,
) -> Vec<CyclotomicNumber> {
    let Some(first) = sums.first() else {
        return Vec::new();
    };
    let (p, m) = (first.p(), first.level());
    let weighted: Vec<CyclotomicNumber> = sums.iter().zip(1..).map(|(s, k)| weight(s, k)).collect();
    let mut coeffs = vec![CyclotomicNumber::one(p, m)];
    for n in 1..=sums.len() {
        let mut acc = CyclotomicNumber::zero(p, m);
        for k in 1..=n {
            acc = &acc + &(&weighted[k - 1] * &coeffs[n - k]);
        }
        coeffs.push(acc.scale(&Rational::new(BigInt::from(1), BigInt::from(n))));
    }
    coeffs
}

/// `L_f` with its declared degree and the evidence behind it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LPolynomial {
    /// `c_0..c_d` when verified; the full computed series otherwise.
    pub coeffs: Vec<CyclotomicNumber>,
    pub degree: u64,
    /// Series coefficients `c_{d+1}..c_{d+b}`, all zero when verified.
    pub tail: Vec<CyclotomicNumber>,
    /// False for the trivial character, whose `L` is not a polynomial.
    pub verified: bool,
}

impl LPolynomial {
    pub fn p(&self) -> u64 {
        self.coeffs[0].p()
    }

    pub fn level(&self) -> u32 {
        self.coeffs[0].level()
    }
}

/// Compute `S_f(1..=d+buffer)` and the L-polynomial.
pub fn lfun_polynomial(
    sum: &ExponentialSum,
    buffer: u32,
    cfg: &EngineConfig,
) -> Result<(LPolynomial, Vec<SumResult>), LFunctionError> {
    let needed = sum.degree_formula() as u32 + buffer;
    let sums = sum_sequence(sum, needed, cfg)?;
    let values: Vec<CyclotomicNumber> = sums.iter().map(|r| r.value.clone()).collect();
    Ok((lfun_from_sums(sum, &values, buffer)?, sums))
}

/// Build and check the L-polynomial from `S_1..S_{d+buffer}`.
pub fn lfun_from_sums(
    sum: &ExponentialSum,
    sums: &[CyclotomicNumber],
    buffer: u32,
) -> Result<LPolynomial, LFunctionError> {
    let d = sum.degree_formula();
    let needed = (d + buffer as u64) as usize;
    if sums.len() < needed {
        return Err(LFunctionError::NotEnoughSums { needed, available: sums.len() });
    }
    let series = lseries_coefficients(&sums[..needed]);
    if sum.is_trivial() {
        return Ok(LPolynomial { coeffs: series, degree: d, tail: Vec::new(), verified: false });
    }
    for (index, c) in series.iter().enumerate().take(d as usize + 1) {
        if !c.is_integral() {
            return Err(LFunctionError::IntegralityViolation { index, denominator: c.denominator().to_string() });
        }
    }
    if series[d as usize].is_zero() {
        return Err(LFunctionError::DegreeViolation { expected: d, detail: format!("c_{d} vanishes") });
    }
    let tail = series[d as usize + 1..].to_vec();
    if let Some(offset) = tail.iter().position(|c| !c.is_zero()) {
        return Err(LFunctionError::DegreeViolation {
            expected: d,
            detail: format!("c_{} is nonzero", d as usize + 1 + offset),
        });
    }
    let mut coeffs = series;
    coeffs.truncate(d as usize + 1);
    Ok(LPolynomial { coeffs, degree: d, tail, verified: true })
}

/// Coefficients of `C_f(s)` to order `N = sums.len()`.
pub fn characteristic_coefficients(sums: &[CyclotomicNumber], q: u64) -> Vec<CyclotomicNumber> {
    exp_series(sums, |s, k| {
        let qk = num_traits::pow(BigInt::from(q), k as usize);
        s.scale(&Rational::new(BigInt::from(-1), qk - 1))
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityReport {
    pub order: usize,
    pub passed: bool,
    pub first_failure: Option<usize>,
}

/// Check `C_f(s) = C_f(qs) L(s)` coefficientwise to `order`, where `C_f`
/// comes from the sums and `l_coeffs` is an independently obtained `L`
/// (zero beyond its length).
pub fn cf_identity_check(
    sums: &[CyclotomicNumber],
    q: u64,
    l_coeffs: &[CyclotomicNumber],
    order: usize,
) -> IdentityReport {
    assert!(sums.len() >= order, "need sums to the checked order");
    if order == 0 {
        return IdentityReport { order, passed: true, first_failure: None };
    }
    let c = characteristic_coefficients(&sums[..order], q);
    let (p, m) = (c[0].p(), c[0].level());
    let zero = CyclotomicNumber::zero(p, m);
    let first_failure = (0..=order).find(|&n| {
        let mut rhs = CyclotomicNumber::zero(p, m);
        for (i, ci) in c.iter().enumerate().take(n + 1) {
            let l = l_coeffs.get(n - i).unwrap_or(&zero);
            let qi = Rational::from_integer(num_traits::pow(BigInt::from(q), i));
            rhs = &rhs + &(&ci.scale(&qi) * l);
        }
        rhs != c[n]
    });
    IdentityReport { order, passed: first_failure.is_none(), first_failure }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::char_sum_witt;
    use crate::sum::{RawPole, RawSum, RawTerm};

    fn int(p: u64, m: u32, n: i64) -> CyclotomicNumber {
        CyclotomicNumber::from_integer(p, m, n)
    }

    fn build(p: u64, m: u32, terms: &[(u32, usize, u32, u64)], allow_empty: bool) -> ExponentialSum {
        ExponentialSum::validate(&RawSum {
            p,
            a: 1,
            m,
            field_modulus: None,
            poles: vec![RawPole::Finite(vec![0]), RawPole::Infinity],
            terms: terms
                .iter()
                .map(|&(level, pole, exponent, c)| RawTerm { level, pole, exponent, coeff: vec![c] })
                .collect(),
            allow_empty,
        })
        .unwrap()
    }

    #[test]
    fn recursion_base_cases() {
        let sums = vec![int(3, 1, -1), int(3, 1, 5)];
        let c = lseries_coefficients(&sums);
        assert_eq!(c[0], int(3, 1, 1));
        assert_eq!(c[1], int(3, 1, -1));
        // c_2 = (S_1 c_1 + S_2) / 2 = (1 + 5) / 2
        assert_eq!(c[2], int(3, 1, 3));
    }

    #[test]
    fn kloosterman_polynomial() {
        let s = build(3, 1, &[(0, 0, 1, 1), (0, 1, 1, 1)], false);
        let (l, sums) = lfun_polynomial(&s, DEFAULT_BUFFER, &EngineConfig::default()).unwrap();
        assert_eq!(l.degree, 2);
        assert_eq!(l.coeffs[1], int(3, 1, -1));
        // Kloosterman L-polynomial over F_3 is 1 - s + 3 s^2
        assert_eq!(l.coeffs[2], int(3, 1, 3));
        let values: Vec<_> = sums.iter().map(|r| r.value.clone()).collect();
        let report = cf_identity_check(&values, 3, &l.coeffs, 5);
        assert!(report.passed, "{report:?}");
    }

    #[test]
    fn six_degree_instance() {
        let s = build(3, 2, &[(0, 0, 1, 1), (0, 1, 1, 1)], false);
        let (l, _) = lfun_polynomial(&s, DEFAULT_BUFFER, &EngineConfig::default()).unwrap();
        assert_eq!(l.coeffs.len(), 7);
        assert!(l.verified);
    }

    #[test]
    fn trivial_character_is_flagged() {
        let s = build(5, 1, &[], true);
        let (l, _) = lfun_polynomial(&s, DEFAULT_BUFFER, &EngineConfig::default()).unwrap();
        assert!(!l.verified);
        // (1 - s) / (1 - 5 s) = 1 + Σ 4·5^{n-1} s^n
        for (n, c) in l.coeffs.iter().enumerate().skip(1) {
            assert_eq!(*c, int(5, 1, 4 * 5i64.pow(n as u32 - 1)));
        }
    }

    #[test]
    fn tail_and_integrality_violations_are_reported() {
        let s = build(3, 1, &[(0, 0, 1, 1), (0, 1, 1, 1)], false);
        let cfg = EngineConfig::default();
        let mut sums: Vec<_> = (1..=5).map(|k| char_sum_witt(&s, k, &cfg).unwrap().value).collect();
        sums[3] = &sums[3] + &int(3, 1, 4);
        assert!(matches!(lfun_from_sums(&s, &sums, 3), Err(LFunctionError::DegreeViolation { .. })));
        sums[3] = &sums[3] - &int(3, 1, 3);
        assert!(matches!(lfun_from_sums(&s, &sums, 3), Err(LFunctionError::IntegralityViolation { index: 4, .. }) | Err(LFunctionError::DegreeViolation { .. })));
        assert!(matches!(lfun_from_sums(&s, &sums[..2], 3), Err(LFunctionError::NotEnoughSums { .. })));
    }

    #[test]
    fn identity_at_order_one_and_fault_injection() {
        let s1 = CyclotomicNumber::zeta_pow(5, 1, 2);
        let report = cf_identity_check(std::slice::from_ref(&s1), 5, &[int(5, 1, 1), s1.clone()], 1);
        assert!(report.passed);
        let s = build(3, 1, &[(0, 0, 1, 1), (0, 1, 1, 1)], false);
        let (l, sums) = lfun_polynomial(&s, 3, &EngineConfig::default()).unwrap();
        let mut values: Vec<_> = sums.iter().map(|r| r.value.clone()).collect();
        values[1] = &values[1] + &int(3, 1, 1);
        let report = cf_identity_check(&values, 3, &l.coeffs, 5);
        assert_eq!(report.first_failure, Some(2));
    }
}
