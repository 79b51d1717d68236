//! Artin–Hasse coefficients and term-level valuation estimates.
//!
//! Every uniformiser `π_k` is handled only through `v(π_k) = 1/(p^{k-1}(p-1))`
//! and Teichmüller coefficients are units, so each estimate reduces to
//! exact rational bookkeeping over monomial terms.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::rational::{vp_rat, Rational};
use crate::sum::ExponentialSum;

pub const MAX_COMPOSITIONS: u64 = 2_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EstimateError {
    #[error("bound violated at index {index}: valuation {value} < bound {bound}")]
    BoundViolated { index: u64, value: String, bound: String },
    #[error("minimum over gamma terms for k = {k}, j = {j} is not unique at i = j")]
    GammaMinimum { k: u32, j: u32 },
    #[error("need k < p and j < k (p = {p}, k = {k}, j = {j})")]
    Range { p: u64, k: u32, j: u32 },
    #[error("more than {0} compositions")]
    TooManyCompositions(u64),
    #[error("no terms at level {level}, pole {pole}")]
    NoTerms { level: u32, pole: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truncation {
    /// `exp(Σ_{i≤k} x^{p^i}/p^i)`.
    Level(u32),
    Classical,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AHSeries {
    pub p: u64,
    pub truncation: Truncation,
    /// `u_0..u_N`.
    pub coeffs: Vec<Rational>,
}

/// Coefficients via `n u_n = Σ_{i≤k, p^i≤n} u_{n-p^i}`.
pub fn ah_coefficients(p: u64, truncation: Truncation, count: usize) -> AHSeries {
    let mut coeffs = vec![Rational::one()];
    for n in 1..=count as u64 {
        let mut acc = Rational::zero();
        let mut step = 1u64;
        let mut i = 0u32;
        while step <= n {
            if let Truncation::Level(k) = truncation {
                if i > k {
                    break;
                }
            }
            acc += &coeffs[(n - step) as usize];
            step *= p;
            i += 1;
        }
        coeffs.push(acc / BigInt::from(n));
    }
    AHSeries { p, truncation, coeffs }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValuationReport {
    pub bound: Rational,
    /// Smallest term valuation; `None` when there are no terms.
    pub minimum: Option<Rational>,
    pub achieved: bool,
    pub unique_min: bool,
    /// Index, composition `(n_k)` or level split of a minimising term.
    pub witness: Vec<u64>,
}

impl ValuationReport {
    pub fn meets_bound(&self) -> bool {
        self.minimum.as_ref().is_none_or(|v| *v >= self.bound)
    }
}

/// `v(π_k)`.
pub fn pi_valuation(p: u64, k: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(p.pow(k - 1) * (p - 1)))
}

/// `v(θ_{ki}) = v_p(u_{ki}) + i v(π_k) ≥ i(p-k)/p^{k+1}` for `i ≤ count`.
pub fn theta_valuation_bound_check(p: u64, k: u32, count: usize) -> Result<Vec<ValuationReport>, EstimateError> {
    if k == 0 || k as u64 >= p {
        return Err(EstimateError::Range { p, k, j: 0 });
    }
    let series = ah_coefficients(p, Truncation::Level(k), count);
    let pi = pi_valuation(p, k);
    let denom = BigInt::from(p.pow(k + 1));
    series
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, u)| {
            let i_q = Rational::from_integer(BigInt::from(i));
            let value = Rational::from_integer(vp_rat(p, u).expect("coefficients are positive").into()) + &i_q * &pi;
            let bound = &i_q * BigInt::from(p - k as u64) / denom.clone();
            if value < bound {
                return Err(EstimateError::BoundViolated {
                    index: i as u64,
                    value: value.to_string(),
                    bound: bound.to_string(),
                });
            }
            Ok(ValuationReport {
                achieved: value == bound,
                bound,
                minimum: Some(value),
                unique_min: true,
                witness: vec![i as u64],
            })
        })
        .collect()
}

/// `v_p(u_{ki}) ≥ -i (1/(p-1) + k + 1) / p^{k+1}` for `i ≤ count`.
pub fn truncated_coefficient_bound_check(p: u64, k: u32, count: usize) -> Result<(), EstimateError> {
    let series = ah_coefficients(p, Truncation::Level(k), count);
    let per = (Rational::new(BigInt::one(), BigInt::from(p - 1)) + BigInt::from(k + 1)) / BigInt::from(p.pow(k + 1));
    for (i, u) in series.coeffs.iter().enumerate() {
        let value = Rational::from_integer(vp_rat(p, u).expect("coefficients are positive").into());
        let bound = -(&per * BigInt::from(i));
        if value < bound {
            return Err(EstimateError::BoundViolated { index: i as u64, value: value.to_string(), bound: bound.to_string() });
        }
    }
    Ok(())
}

/// `v_p(u_i) ≥ 0` for the classical series, `i ≤ count`.
pub fn classical_integrality_check(p: u64, count: usize) -> Result<(), EstimateError> {
    let series = ah_coefficients(p, Truncation::Classical, count);
    for (i, u) in series.coeffs.iter().enumerate() {
        let v = vp_rat(p, u).expect("coefficients are positive");
        if v < 0 {
            return Err(EstimateError::BoundViolated { index: i as u64, value: v.to_string(), bound: "0".into() });
        }
    }
    Ok(())
}

/// Terms `1/(p^{k-1-i}(p-1)) - i` for `0 ≤ i ≤ j` with the minimum at `i = j`,
/// equal to `1/(p^{k-1-j}(p-1)) - j`.
pub fn gamma_valuation(p: u64, k: u32, j: u32) -> Result<ValuationReport, EstimateError> {
    if k == 0 || j >= k || k as u64 >= p {
        return Err(EstimateError::Range { p, k, j });
    }
    let term = |i: u32| {
        Rational::new(BigInt::one(), BigInt::from(p.pow(k - 1 - i) * (p - 1))) - BigInt::from(i)
    };
    let terms: Vec<Rational> = (0..=j).map(term).collect();
    let minimum = terms.iter().min().expect("nonempty").clone();
    let at: Vec<usize> = terms.iter().enumerate().filter(|t| *t.1 == minimum).map(|t| t.0).collect();
    let closed = term(j);
    if at != [j as usize] || minimum != closed {
        return Err(EstimateError::GammaMinimum { k, j });
    }
    Ok(ValuationReport { bound: closed, minimum: Some(minimum), achieved: true, unique_min: true, witness: vec![j as u64] })
}

/// Exponents with nonzero coefficient at `(level, pole)`.
fn exponents(sum: &ExponentialSum, level: u32, pole: usize) -> Vec<u32> {
    let mut ks: Vec<u32> =
        sum.terms().iter().filter(|t| t.level == level && t.pole == pole && t.exponent > 0).map(|t| t.exponent).collect();
    ks.sort_unstable();
    ks.dedup();
    ks
}

/// Minimum over compositions `Σ k n_k = n` of
/// `Σ v_p(u_{n_k}) + (Σ n_k) v(π)`, with the number of minimisers and a witness.
fn composition_minimum(
    ks: &[u32],
    n: u64,
    pi: &Rational,
    u_vals: &[i64],
) -> Result<Option<(Rational, u64, Vec<u64>)>, EstimateError> {
    let mut best: Option<(Rational, u64, Vec<u64>)> = None;
    let mut visited = 0u64;
    let mut parts = vec![0u64; ks.len()];
    fn walk(
        idx: usize,
        rest: u64,
        ks: &[u32],
        parts: &mut Vec<u64>,
        visit: &mut dyn FnMut(&[u64]) -> Result<(), EstimateError>,
    ) -> Result<(), EstimateError> {
        if idx == ks.len() {
            return if rest == 0 { visit(parts) } else { Ok(()) };
        }
        let k = ks[idx] as u64;
        for c in 0..=rest / k {
            parts[idx] = c;
            walk(idx + 1, rest - c * k, ks, parts, visit)?;
        }
        parts[idx] = 0;
        Ok(())
    }
    walk(0, n, ks, &mut parts, &mut |parts: &[u64]| {
        visited += 1;
        if visited > MAX_COMPOSITIONS {
            return Err(EstimateError::TooManyCompositions(MAX_COMPOSITIONS));
        }
        let units: i64 = parts.iter().map(|&c| u_vals[c as usize]).sum();
        let count: u64 = parts.iter().sum();
        let value = Rational::from_integer(units.into()) + pi * BigInt::from(count);
        match &mut best {
            Some((v, mult, _)) if value == *v => *mult += 1,
            Some((v, _, _)) if value > *v => {}
            _ => best = Some((value, 1, parts.to_vec())),
        }
        Ok(())
    })?;
    Ok(best)
}

fn classical_valuations(p: u64, count: u64) -> Vec<i64> {
    ah_coefficients(p, Truncation::Classical, count as usize)
        .coeffs
        .iter()
        .map(|u| vp_rat(p, u).expect("coefficients are positive"))
        .collect()
}

/// `F_{ij,n}`: bound `n / (d_{ij} p^{m-i-1} (p-1))`.
pub fn fijn_valuation_analysis(
    sum: &ExponentialSum,
    level: u32,
    pole: usize,
    n: u64,
) -> Result<ValuationReport, EstimateError> {
    let p = sum.p();
    let ks = exponents(sum, level, pole);
    let d = *ks.last().ok_or(EstimateError::NoTerms { level, pole })?;
    let pi = pi_valuation(p, sum.level() - level);
    let u_vals = classical_valuations(p, n);
    let bound = &pi * BigInt::from(n) / BigInt::from(d);
    let Some((minimum, mult, witness)) = composition_minimum(&ks, n, &pi, &u_vals)? else {
        return Ok(ValuationReport { bound, minimum: None, achieved: false, unique_min: false, witness: vec![] });
    };
    Ok(ValuationReport { achieved: minimum == bound, unique_min: mult == 1, minimum: Some(minimum), bound, witness })
}

/// The equality condition: `d | n` and `u_{n/d}` a unit.
pub fn fijn_equality_certificate(p: u64, d: u32, n: u64) -> bool {
    let d = d as u64;
    n.is_multiple_of(d) && classical_valuations(p, n / d)[(n / d) as usize] == 0
}

/// `F_{j,n}` over level splits `Σ_i n_i = n`; bound `n / (D_j (p-1))`.
/// The witness is the minimising split `(n_0, ..., n_{m-1})`.
pub fn fjn_valuation_analysis(sum: &ExponentialSum, pole: usize, n: u64) -> Result<ValuationReport, EstimateError> {
    let p = sum.p();
    let m = sum.level();
    let degree = &sum.effective_poles()[pole];
    let big_d = degree.max_degree;
    let bound = Rational::new(BigInt::from(n), BigInt::from(big_d * (p - 1)));
    let u_vals = classical_valuations(p, n);
    // per level: minimum and multiplicity for each n_i ≤ n; None where impossible
    let mut tables: Vec<Vec<Option<(Rational, u64)>>> = Vec::with_capacity(m as usize);
    for level in 0..m {
        let ks = exponents(sum, level, pole);
        let pi = pi_valuation(p, m - level);
        let row = (0..=n)
            .map(|ni| {
                if ks.is_empty() {
                    return Ok((ni == 0).then(|| (Rational::zero(), 1)));
                }
                Ok(composition_minimum(&ks, ni, &pi, &u_vals)?.map(|(v, c, _)| (v, c)))
            })
            .collect::<Result<Vec<_>, EstimateError>>()?;
        tables.push(row);
    }
    let mut best: Option<(Rational, u64, Vec<u64>)> = None;
    let mut split = vec![0u64; m as usize];
    fn walk(
        level: usize,
        rest: u64,
        tables: &[Vec<Option<(Rational, u64)>>],
        split: &mut Vec<u64>,
        acc: (Rational, u64),
        best: &mut Option<(Rational, u64, Vec<u64>)>,
    ) {
        if level == tables.len() {
            if rest != 0 {
                return;
            }
            match best {
                Some((v, mult, _)) if acc.0 == *v => *mult += acc.1,
                Some((v, _, _)) if acc.0 > *v => {}
                _ => *best = Some((acc.0, acc.1, split.clone())),
            }
            return;
        }
        for ni in 0..=rest {
            if let Some((v, c)) = &tables[level][ni as usize] {
                split[level] = ni;
                walk(level + 1, rest - ni, tables, split, (&acc.0 + v, acc.1 * c), best);
            }
        }
        split[level] = 0;
    }
    walk(0, n, &tables, &mut split, (Rational::zero(), 1), &mut best);
    let Some((minimum, mult, witness)) = best else {
        return Ok(ValuationReport { bound, minimum: None, achieved: false, unique_min: false, witness: vec![] });
    };
    Ok(ValuationReport { achieved: minimum == bound, unique_min: mult == 1, minimum: Some(minimum), bound, witness })
}
