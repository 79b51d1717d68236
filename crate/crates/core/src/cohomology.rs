//! Partial-fraction model over `Q` of the twisted derivation
//! `D g = E(H) g + E g`, `E = x d/dx`, with reduction to the basis
//!
//! `B = {1} ∪ {X_1^u : u < R_1} ∪ {x^u : u ≤ R_2} ∪ {X_j^u : u ≤ R_j + 1, j ≥ 3}`
//!
//! where pole 1 is `0`, pole 2 is `∞`, `X_j = 1/(x - P_j)` at finite poles and
//! `R_j` is the pole order of `H` at `P_j`. Every reduction returns a witness
//! `w` with `g = D(w) + residue`, checked exactly.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{binomial, Rational};
use crate::sum::ExponentialSum;

pub const MAX_REDUCTION_STEPS: usize = 200_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CohomologyError {
    #[error("poles {0} and {1} coincide")]
    DuplicatePole(usize, usize),
    #[error("the denominator has a root or factor outside the pole set")]
    PoleOutsideSet,
    #[error("a polynomial part needs ∞ among the poles")]
    NoInfinity,
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("pole roles: {0}")]
    Roles(&'static str),
    #[error("H has no pole at pole {0}")]
    DegreeZero(usize),
    #[error("reduction did not finish within {0} steps")]
    NonTermination(usize),
    #[error("reduction certificate failed")]
    CertificateFailed,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RationalPole {
    Finite(Rational),
    Infinity,
}

/// Dense polynomials over `Q`, constant term first.
mod qpoly {
    use super::*;

    pub fn trim(mut a: Vec<Rational>) -> Vec<Rational> {
        while a.last().is_some_and(Zero::is_zero) {
            a.pop();
        }
        a
    }

    pub fn add(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); a.len().max(b.len())];
        for (i, c) in a.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in b.iter().enumerate() {
            out[i] += c;
        }
        trim(out)
    }

    pub fn mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        trim(out)
    }

    pub fn scale(a: &[Rational], c: &Rational) -> Vec<Rational> {
        trim(a.iter().map(|x| x * c).collect())
    }

    /// `(x - root)^e`.
    pub fn linear_power(root: &Rational, e: u32) -> Vec<Rational> {
        let mut out = vec![Rational::one()];
        for _ in 0..e {
            out = mul(&out, &[-root.clone(), Rational::one()]);
        }
        out
    }

    pub fn eval(a: &[Rational], x: &Rational) -> Rational {
        a.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn divrem(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
        let b = trim(b.to_vec());
        let mut rem = trim(a.to_vec());
        if rem.len() < b.len() {
            return (Vec::new(), rem);
        }
        let lead = b.last().expect("nonzero divisor").clone();
        let mut quot = vec![Rational::zero(); rem.len() - b.len() + 1];
        while rem.len() >= b.len() {
            let shift = rem.len() - b.len();
            let c = rem.last().unwrap() / &lead;
            for (i, x) in b.iter().enumerate() {
                rem[shift + i] -= &c * x;
            }
            quot[shift] = c;
            rem.pop();
            rem = trim(rem);
        }
        (trim(quot), rem)
    }

    /// Coefficients of `a(t + shift)` in `t`.
    pub fn taylor(a: &[Rational], shift: &Rational) -> Vec<Rational> {
        let mut out: Vec<Rational> = Vec::new();
        for c in a.iter().rev() {
            out = mul(&out, &[shift.clone(), Rational::one()]);
            out = add(&out, std::slice::from_ref(c));
        }
        out
    }
}

/// `constant + Σ_j Σ_{i≥1} c_{j,i} X_j^i` with `X_j = x` at `∞`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialFraction {
    poles: Arc<[RationalPole]>,
    constant: Rational,
    parts: Vec<BTreeMap<u32, Rational>>,
}

impl PartialFraction {
    pub fn zero(poles: &Arc<[RationalPole]>) -> Self {
        Self { poles: Arc::clone(poles), constant: Rational::zero(), parts: vec![BTreeMap::new(); poles.len()] }
    }

    pub fn constant(poles: &Arc<[RationalPole]>, c: Rational) -> Self {
        let mut z = Self::zero(poles);
        z.constant = c;
        z
    }

    /// `X_j^degree`; degree `0` is the constant `1`.
    pub fn monomial(poles: &Arc<[RationalPole]>, pole: usize, degree: u32) -> Self {
        let mut z = Self::zero(poles);
        z.add_term(Some(pole), degree, Rational::one());
        z
    }

    pub fn poles(&self) -> &Arc<[RationalPole]> {
        &self.poles
    }

    pub fn constant_term(&self) -> &Rational {
        &self.constant
    }

    pub fn coeff(&self, pole: usize, degree: u32) -> Rational {
        if degree == 0 {
            return self.constant.clone();
        }
        self.parts[pole].get(&degree).cloned().unwrap_or_default()
    }

    /// Highest degree at `pole`, `0` without terms there.
    pub fn degree_at(&self, pole: usize) -> u32 {
        self.parts[pole].keys().next_back().copied().unwrap_or(0)
    }

    /// `(pole, degree, coefficient)` for every nonconstant term.
    pub fn terms(&self) -> impl Iterator<Item = (usize, u32, &Rational)> {
        self.parts.iter().enumerate().flat_map(|(j, part)| part.iter().map(move |(d, c)| (j, *d, c)))
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.parts.iter().all(BTreeMap::is_empty)
    }

    /// `pole = None` or `degree = 0` adds to the constant.
    fn add_term(&mut self, pole: Option<usize>, degree: u32, c: Rational) {
        if c.is_zero() {
            return;
        }
        match pole {
            Some(j) if degree > 0 => {
                let entry = self.parts[j].entry(degree).or_default();
                *entry += c;
                if entry.is_zero() {
                    self.parts[j].remove(&degree);
                }
            }
            _ => self.constant += c,
        }
    }

    fn check(&self, other: &Self) {
        assert!(self.poles == other.poles, "partial fractions over different pole sets");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        let mut out = self.clone();
        out.constant += &other.constant;
        for (j, d, c) in other.terms() {
            out.add_term(Some(j), d, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.poles);
        }
        Self {
            poles: Arc::clone(&self.poles),
            constant: &self.constant * c,
            parts: self.parts.iter().map(|part| part.iter().map(|(d, x)| (*d, x * c)).collect()).collect(),
        }
    }

    fn infinity_index(&self) -> Option<usize> {
        self.poles.iter().position(|p| *p == RationalPole::Infinity)
    }

    pub fn mul(&self, other: &Self) -> Result<Self, CohomologyError> {
        self.check(other);
        let mut out = Self::zero(&self.poles);
        let lhs: Vec<(Option<usize>, u32, &Rational)> =
            std::iter::once((None, 0, &self.constant)).chain(self.terms().map(|(j, d, c)| (Some(j), d, c))).collect();
        let rhs: Vec<(Option<usize>, u32, &Rational)> =
            std::iter::once((None, 0, &other.constant)).chain(other.terms().map(|(j, d, c)| (Some(j), d, c))).collect();
        for (pa, da, ca) in &lhs {
            if ca.is_zero() {
                continue;
            }
            for (pb, db, cb) in &rhs {
                if cb.is_zero() {
                    continue;
                }
                let c = *ca * *cb;
                match (pa, pb) {
                    (None, _) => out.add_term(*pb, *db, c),
                    (_, None) => out.add_term(*pa, *da, c),
                    (Some(j), Some(k)) => out.add_monomial_product(*j, *da, *k, *db, &c)?,
                }
            }
        }
        Ok(out)
    }

    /// Adds `c X_j^a X_k^b` re-expanded in partial fractions.
    fn add_monomial_product(&mut self, j: usize, a: u32, k: usize, b: u32, c: &Rational) -> Result<(), CohomologyError> {
        if j == k {
            self.add_term(Some(j), a + b, c.clone());
            return Ok(());
        }
        match (&self.poles[j].clone(), &self.poles[k].clone()) {
            (RationalPole::Finite(p), RationalPole::Finite(q)) => {
                self.add_cross(j, a, k, b, &(p - q), c);
                self.add_cross(k, b, j, a, &(q - p), c);
                Ok(())
            }
            (RationalPole::Infinity, RationalPole::Finite(p)) => self.add_power_times_pole(a, k, b, p, c),
            (RationalPole::Finite(p), RationalPole::Infinity) => self.add_power_times_pole(b, j, a, p, c),
            (RationalPole::Infinity, RationalPole::Infinity) => unreachable!("distinct indices"),
        }
    }

    /// Principal part at `P_j` of `X_j^a X_k^b`, `delta = P_j - P_k`:
    /// `Σ_{n<a} (-1)^n C(b+n-1, n) δ^{-b-n} X_j^{a-n}`.
    fn add_cross(&mut self, j: usize, a: u32, _k: usize, b: u32, delta: &Rational, c: &Rational) {
        let inv = delta.recip();
        for n in 0..a {
            let sign = if n % 2 == 0 { Rational::one() } else { -Rational::one() };
            let coef = sign
                * Rational::from_integer(binomial((b + n - 1) as u64, n as u64))
                * num_traits::pow(inv.clone(), (b + n) as usize);
            self.add_term(Some(j), a - n, c * coef);
        }
    }

    /// `x^e X_P^a = Σ_n C(e, n) P^{e-n} (x - P)^{n-a}`.
    fn add_power_times_pole(&mut self, e: u32, j: usize, a: u32, p: &Rational, c: &Rational) -> Result<(), CohomologyError> {
        let inf = self.infinity_index();
        for n in 0..=e {
            let coef = c * Rational::from_integer(binomial(e as u64, n as u64)) * num_traits::pow(p.clone(), (e - n) as usize);
            if coef.is_zero() {
                continue;
            }
            if n < a {
                self.add_term(Some(j), a - n, coef);
                continue;
            }
            // (x - P)^{n-a} = Σ_r C(n-a, r) x^r (-P)^{n-a-r}
            let top = n - a;
            for r in 0..=top {
                let piece = &coef
                    * Rational::from_integer(binomial(top as u64, r as u64))
                    * num_traits::pow(-p.clone(), (top - r) as usize);
                if piece.is_zero() {
                    continue;
                }
                if r == 0 {
                    self.constant += piece;
                } else {
                    self.add_term(Some(inf.ok_or(CohomologyError::NoInfinity)?), r, piece);
                }
            }
        }
        Ok(())
    }

    /// `(numerator, denominator)` with denominator `Π (x - P_j)^{deg_j}`.
    pub fn to_rational_function(&self) -> (Vec<Rational>, Vec<Rational>) {
        let finite: Vec<(usize, Rational, u32)> = self
            .poles
            .iter()
            .enumerate()
            .filter_map(|(j, p)| match p {
                RationalPole::Finite(r) => Some((j, r.clone(), self.degree_at(j))),
                RationalPole::Infinity => None,
            })
            .collect();
        let den = finite.iter().fold(vec![Rational::one()], |acc, (_, r, e)| qpoly::mul(&acc, &qpoly::linear_power(r, *e)));
        let mut num = qpoly::scale(&den, &self.constant);
        for (j, d, c) in self.terms() {
            let piece = match &self.poles[j] {
                RationalPole::Infinity => {
                    let mut xd = vec![Rational::zero(); d as usize];
                    xd.push(c.clone());
                    qpoly::mul(&xd, &den)
                }
                RationalPole::Finite(r) => {
                    let mut rest = qpoly::linear_power(r, self.degree_at(j) - d);
                    for (k, s, e) in &finite {
                        if *k != j {
                            rest = qpoly::mul(&rest, &qpoly::linear_power(s, *e));
                        }
                    }
                    qpoly::scale(&rest, c)
                }
            };
            num = qpoly::add(&num, &piece);
        }
        (num, den)
    }
}

pub fn pole_set(poles: Vec<RationalPole>) -> Result<Arc<[RationalPole]>, CohomologyError> {
    for second in 0..poles.len() {
        for first in 0..second {
            if poles[first] == poles[second] {
                return Err(CohomologyError::DuplicatePole(first, second));
            }
        }
    }
    Ok(poles.into())
}

/// Decompose `numerator / denominator` over the pole set; the result
/// recombines to the input (checked).
pub fn mittag_leffler(
    numerator: &[Rational],
    denominator: &[Rational],
    poles: &Arc<[RationalPole]>,
) -> Result<PartialFraction, CohomologyError> {
    let den = qpoly::trim(denominator.to_vec());
    if den.is_empty() {
        return Err(CohomologyError::ZeroDenominator);
    }
    let mut rest = den.clone();
    let mut multiplicity = vec![0u32; poles.len()];
    for (j, pole) in poles.iter().enumerate() {
        if let RationalPole::Finite(r) = pole {
            while rest.len() > 1 && qpoly::eval(&rest, r).is_zero() {
                rest = qpoly::divrem(&rest, &[-r.clone(), Rational::one()]).0;
                multiplicity[j] += 1;
            }
        }
    }
    if rest.len() != 1 {
        return Err(CohomologyError::PoleOutsideSet);
    }
    let (quot, rem) = qpoly::divrem(numerator, &den);
    let mut out = PartialFraction::zero(poles);
    for (d, c) in quot.iter().enumerate() {
        if d == 0 {
            out.constant += c;
        } else if !c.is_zero() {
            out.add_term(Some(out.infinity_index().ok_or(CohomologyError::NoInfinity)?), d as u32, c.clone());
        }
    }
    for (j, pole) in poles.iter().enumerate() {
        let RationalPole::Finite(r) = pole else { continue };
        let e = multiplicity[j];
        if e == 0 {
            continue;
        }
        // rem / den = t^{-e} rem(t + P) / g(t + P), g = den / (x - P)^e
        let g = qpoly::divrem(&den, &qpoly::linear_power(r, e)).0;
        let top = qpoly::taylor(&rem, r);
        let bottom = qpoly::taylor(&g, r);
        let mut series: Vec<Rational> = Vec::with_capacity(e as usize);
        for n in 0..e as usize {
            let mut acc = top.get(n).cloned().unwrap_or_default();
            for (i, s) in series.iter().enumerate() {
                if let Some(b) = bottom.get(n - i) {
                    acc -= s * b;
                }
            }
            series.push(acc / &bottom[0]);
        }
        for (n, s) in series.into_iter().enumerate() {
            out.add_term(Some(j), e - n as u32, s);
        }
    }
    let (num2, den2) = out.to_rational_function();
    if qpoly::mul(&num2, &den) != qpoly::mul(&qpoly::trim(numerator.to_vec()), &den2) {
        return Err(CohomologyError::CertificateFailed);
    }
    Ok(out)
}

/// `E = x d/dx`: `E(X_P^i) = -i X_P^i - i P X_P^{i+1}`, `E(x^i) = i x^i`.
pub fn apply_e(g: &PartialFraction) -> PartialFraction {
    let mut out = PartialFraction::zero(&g.poles);
    for (j, d, c) in g.terms() {
        let i = Rational::from_integer(BigInt::from(d));
        match &g.poles[j] {
            RationalPole::Infinity => out.add_term(Some(j), d, c * &i),
            RationalPole::Finite(p) => {
                out.add_term(Some(j), d, -(c * &i));
                out.add_term(Some(j), d + 1, -(c * &i * p));
            }
        }
    }
    out
}

/// `D g = E(H) g + E g`.
pub fn apply_d(g: &PartialFraction, h: &PartialFraction) -> Result<PartialFraction, CohomologyError> {
    Ok(apply_e(h).mul(g)?.add(&apply_e(g)))
}

/// Checks the role layout and returns `R_j`.
fn pole_orders(h: &PartialFraction) -> Result<Vec<u32>, CohomologyError> {
    let poles = h.poles();
    if poles.len() < 2 {
        return Err(CohomologyError::Roles("need at least two poles"));
    }
    if poles[0] != RationalPole::Finite(Rational::zero()) {
        return Err(CohomologyError::Roles("pole 1 must be 0"));
    }
    if poles[1] != RationalPole::Infinity {
        return Err(CohomologyError::Roles("pole 2 must be ∞"));
    }
    let orders: Vec<u32> = (0..poles.len()).map(|j| h.degree_at(j)).collect();
    match orders.iter().position(|&r| r == 0) {
        Some(j) => Err(CohomologyError::DegreeZero(j)),
        None => Ok(orders),
    }
}

/// Largest degree in `B` at each pole.
fn basis_bounds(orders: &[u32]) -> Vec<u32> {
    orders
        .iter()
        .enumerate()
        .map(|(j, &r)| match j {
            0 => r - 1,
            1 => r,
            _ => r + 1,
        })
        .collect()
}

/// The monomials of `B`, constant first.
pub fn basis(h: &PartialFraction) -> Result<Vec<PartialFraction>, CohomologyError> {
    let bounds = basis_bounds(&pole_orders(h)?);
    let mut out = vec![PartialFraction::constant(h.poles(), Rational::one())];
    for (j, &top) in bounds.iter().enumerate() {
        out.extend((1..=top).map(|d| PartialFraction::monomial(h.poles(), j, d)));
    }
    Ok(out)
}

/// `|B| = Σ R_j + ℓ - 2`.
pub fn h0_dimension(orders: &[u64]) -> u64 {
    orders.iter().sum::<u64>() + orders.len() as u64 - 2
}

pub fn in_basis_span(g: &PartialFraction, h: &PartialFraction) -> Result<bool, CohomologyError> {
    let bounds = basis_bounds(&pole_orders(h)?);
    Ok(g.terms().all(|(j, d, _)| d <= bounds[j]))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub residue: PartialFraction,
    pub witness: PartialFraction,
    pub steps: usize,
}

/// Reduce `g` modulo `D` into the span of `B`.
pub fn reduce(g: &PartialFraction, h: &PartialFraction) -> Result<Reduction, CohomologyError> {
    g.check(h);
    let orders = pole_orders(h)?;
    let bounds = basis_bounds(&orders);
    let poles = Arc::clone(h.poles());
    let mut cache: HashMap<(usize, u32), PartialFraction> = HashMap::new();
    let mut current = g.clone();
    let mut witness = PartialFraction::zero(&poles);
    let mut steps = 0;
    loop {
        // poles other than 0 first, highest degree first; then the pole at 0
        let outside = (1..poles.len())
            .filter(|&j| current.degree_at(j) > bounds[j])
            .map(|j| (current.degree_at(j), std::cmp::Reverse(j)))
            .max()
            .map(|(d, std::cmp::Reverse(j))| (j, d))
            .or_else(|| (current.degree_at(0) > bounds[0]).then(|| (0, current.degree_at(0))));
        let Some((j, u)) = outside else { break };
        steps += 1;
        if steps > MAX_REDUCTION_STEPS {
            return Err(CohomologyError::NonTermination(MAX_REDUCTION_STEPS));
        }
        let shift = if j >= 2 { orders[j] + 1 } else { orders[j] };
        let v = u - shift;
        let image = match cache.get(&(j, v)) {
            Some(img) => img.clone(),
            None => {
                let img = apply_d(&PartialFraction::monomial(&poles, j, v), h)?;
                cache.insert((j, v), img.clone());
                img
            }
        };
        let lead = image.coeff(j, u);
        debug_assert!(!lead.is_zero());
        let factor = current.coeff(j, u) / lead;
        witness.add_term(Some(j), v, factor.clone());
        current = current.sub(&image.scale(&factor));
    }
    let rebuilt = apply_d(&witness, h)?.add(&current);
    if rebuilt != *g || !in_basis_span(&current, h)? {
        return Err(CohomologyError::CertificateFailed);
    }
    Ok(Reduction { residue: current, witness, steps })
}

/// Rank evidence that `B` stays independent modulo `D(W)`, where `W` is
/// spanned by monomials of degree at most `R_j + extra` at each pole.
/// Returns `(rank D(W), rank D(W) ∪ B)`.
pub fn independence_ranks(h: &PartialFraction, extra: u32) -> Result<(usize, usize), CohomologyError> {
    let orders = pole_orders(h)?;
    let poles = Arc::clone(h.poles());
    let mut domain = vec![PartialFraction::constant(&poles, Rational::one())];
    for (j, r) in orders.iter().enumerate() {
        domain.extend((1..=r + extra).map(|d| PartialFraction::monomial(&poles, j, d)));
    }
    let images = domain.iter().map(|w| apply_d(w, h)).collect::<Result<Vec<_>, _>>()?;
    let base = basis(h)?;
    let rank_images = rank(&images);
    let all: Vec<PartialFraction> = images.into_iter().chain(base).collect();
    Ok((rank_images, rank(&all)))
}

fn rank(rows: &[PartialFraction]) -> usize {
    let mut keys: Vec<(usize, u32)> = Vec::new();
    for r in rows {
        keys.push((usize::MAX, 0));
        keys.extend(r.terms().map(|(j, d, _)| (j, d)));
    }
    keys.sort();
    keys.dedup();
    let index: HashMap<(usize, u32), usize> = keys.iter().enumerate().map(|(i, k)| (*k, i)).collect();
    let mut mat: Vec<Vec<Rational>> = rows
        .iter()
        .map(|r| {
            let mut row = vec![Rational::zero(); keys.len()];
            row[index[&(usize::MAX, 0)]] = r.constant_term().clone();
            for (j, d, c) in r.terms() {
                row[index[&(j, d)]] = c.clone();
            }
            row
        })
        .collect();
    let mut rank = 0;
    for col in 0..keys.len() {
        let Some(pivot) = (rank..mat.len()).find(|&i| !mat[i][col].is_zero()) else { continue };
        mat.swap(rank, pivot);
        let inv = mat[rank][col].recip();
        let pivot_row: Vec<Rational> = mat[rank].iter().map(|x| x * &inv).collect();
        for (i, row) in mat.iter_mut().enumerate() {
            if i != rank && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        mat[rank] = pivot_row;
        rank += 1;
    }
    rank
}

/// Pole set `[0, ∞, 1, 2, ...]` matching the effective poles of `sum` by
/// role, with `R_j = D_j`.
pub fn shaped_orders(sum: &ExponentialSum) -> (Arc<[RationalPole]>, Vec<u64>) {
    let effective = sum.effective_poles();
    let zero = effective.iter().find(|e| e.pole.is_zero()).expect("0 is always effective");
    let inf = effective.iter().find(|e| e.pole.is_infinity()).expect("∞ is always effective");
    let mut poles = vec![RationalPole::Finite(Rational::zero()), RationalPole::Infinity];
    let mut orders = vec![zero.max_degree, inf.max_degree];
    let others = effective.iter().filter(|e| !e.pole.is_zero() && !e.pole.is_infinity());
    for (root, e) in (1i64..).zip(others) {
        poles.push(RationalPole::Finite(Rational::from_integer(root.into())));
        orders.push(e.max_degree);
    }
    (poles.into(), orders)
}

/// `H` with pole orders `orders` and coefficients drawn from `coeff`;
/// leading coefficients are forced nonzero.
pub fn shaped_operator(
    poles: &Arc<[RationalPole]>,
    orders: &[u64],
    mut coeff: impl FnMut() -> Rational,
) -> PartialFraction {
    let mut h = PartialFraction::zero(poles);
    for (j, &r) in orders.iter().enumerate() {
        for d in 1..=r as u32 {
            let mut c = coeff();
            if d == r as u32 && c.is_zero() {
                c = Rational::one();
            }
            h.add_term(Some(j), d, c);
        }
    }
    h
}

impl std::fmt::Display for PartialFraction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        if !self.constant.is_zero() {
            parts.push(self.constant.to_string());
        }
        for (j, d, c) in self.terms() {
            let base = match &self.poles[j] {
                RationalPole::Infinity => "x".to_string(),
                RationalPole::Finite(p) if p.is_zero() => "1/x".to_string(),
                RationalPole::Finite(p) if p.is_negative() => format!("1/(x+{})", -p),
                RationalPole::Finite(p) => format!("1/(x-{p})"),
            };
            parts.push(if d == 1 { format!("{c}*{base}") } else { format!("{c}*({base})^{d}") });
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        write!(f, "{}", parts.join(" + "))
    }
}
