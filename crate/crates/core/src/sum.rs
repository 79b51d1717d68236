//! The input `f = Σ V^i(a_{ijk} (x - P_j)^{-k}, 0, ...)` over `W_m(F_q)`:
//! validation, pole degrees, the degree of `L_f`, and the lift to the
//! Galois ring used by the enumeration engine.
//!
//! A term at the pole `∞` stands for `a x^k`. The summation domain always
//! excludes `x = 0`, so `0` and `∞` are poles of the problem whether or not
//! they are declared; an undeclared one has pole degree `0`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::finite_field::{Embedding, FFElement, FieldError, FieldParams};
use crate::galois_ring::{GRParams, RingError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RawPole {
    Infinity,
    Finite(Vec<u64>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawTerm {
    /// Witt level `i`, `0 <= i < m`.
    pub level: u32,
    /// Zero-based index into the pole list.
    pub pole: usize,
    /// `k = 0` is a constant term.
    pub exponent: u32,
    pub coeff: Vec<u64>,
}

/// Unvalidated input, mirroring the document format.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawSum {
    pub p: u64,
    pub a: usize,
    pub m: u32,
    pub field_modulus: Option<Vec<u64>>,
    pub poles: Vec<RawPole>,
    pub terms: Vec<RawTerm>,
    /// Accept an empty term list (the trivial character).
    pub allow_empty: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    PrimeNotAboveLevel { p: u64, m: u32 },
    NoPoles,
    EmptyTerms,
    BadPoleCoordinates { pole: usize },
    DuplicatePole { first: usize, second: usize },
    LevelOutOfRange { term: usize, level: u32 },
    PoleOutOfRange { term: usize, pole: usize },
    BadCoefficient { term: usize },
    MaximumNotUnique { pole: usize, levels: Vec<u32>, value: u64 },
    DegreeDivisibleByP { level: u32, pole: usize, degree: u32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::PrimeNotAboveLevel { p, m } => write!(f, "prime-above-level: p = {p} must exceed m = {m}"),
            Self::NoPoles => write!(f, "no-poles: at least one pole is required"),
            Self::EmptyTerms => write!(f, "empty-terms: no non-constant terms (use the permissive flag for the trivial sum)"),
            Self::BadPoleCoordinates { pole } => {
                write!(f, "pole-coordinates: pole {} is not an element of F_q", pole + 1)
            }
            Self::DuplicatePole { first, second } => {
                write!(f, "distinct-poles: poles {} and {} coincide", first + 1, second + 1)
            }
            Self::LevelOutOfRange { term, level } => {
                write!(f, "level-range: term {} has Witt level {level} >= m", term + 1)
            }
            Self::PoleOutOfRange { term, pole } => {
                write!(f, "pole-index: term {} refers to pole {}", term + 1, pole + 1)
            }
            Self::BadCoefficient { term } => {
                write!(f, "coefficient: term {} has a coefficient outside F_q", term + 1)
            }
            Self::MaximumNotUnique { pole, levels, value } => write!(
                f,
                "unique-maximum: at pole {} levels {levels:?} all reach p^(m-i-1) d_ij = {value}",
                pole + 1
            ),
            Self::DegreeDivisibleByP { level, pole, degree } => write!(
                f,
                "p-coprime-degree: d = {degree} at level {level}, pole {} is divisible by p",
                pole + 1
            ),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SumError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("invalid sum: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Hypotheses(Vec<Violation>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pole {
    Infinity,
    Finite(FFElement),
}

impl Pole {
    pub fn is_zero(&self) -> bool {
        matches!(self, Pole::Finite(x) if x.is_zero())
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Pole::Infinity)
    }
}

/// A validated term with nonzero coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub level: u32,
    pub pole: usize,
    pub exponent: u32,
    pub coeff: FFElement,
}

/// Degree data at one pole of the problem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoleDegree {
    pub pole: Pole,
    /// Index in the declared pole list; `None` for an implicit `0` or `∞`.
    pub declared: Option<usize>,
    /// `d_{ij}` per level `i`; `None` where the level has no term.
    pub level_degrees: Vec<Option<u32>>,
    /// `D_j = max_i p^{m-i-1} d_{ij}`, `0` without terms.
    pub max_degree: u64,
    /// The level achieving `D_j`.
    pub dominant_level: Option<u32>,
}

impl PoleDegree {
    /// `d_{i_j, j}`.
    pub fn dominant_degree(&self) -> Option<u32> {
        self.dominant_level.and_then(|i| self.level_degrees[i as usize])
    }
}

/// A validated exponential sum.
#[derive(Clone, Debug)]
pub struct ExponentialSum {
    field: Arc<FieldParams>,
    m: u32,
    poles: Vec<Pole>,
    terms: Vec<Term>,
    effective: Vec<PoleDegree>,
    allow_empty: bool,
}

impl ExponentialSum {
    pub fn validate(raw: &RawSum) -> Result<Self, SumError> {
        let field = FieldParams::build(raw.p, raw.a, raw.field_modulus.clone())?;
        let p = raw.p;
        let m = raw.m;
        let mut violations = Vec::new();
        if m == 0 || p <= m as u64 {
            violations.push(Violation::PrimeNotAboveLevel { p, m });
        }
        if raw.poles.is_empty() {
            violations.push(Violation::NoPoles);
        }
        let in_field = |c: &[u64]| c.len() == raw.a && c.iter().all(|&x| x < p);

        let mut poles = Vec::with_capacity(raw.poles.len());
        for (idx, pole) in raw.poles.iter().enumerate() {
            match pole {
                RawPole::Infinity => poles.push(Some(Pole::Infinity)),
                RawPole::Finite(c) if in_field(c) => poles.push(Some(Pole::Finite(field.element(c)))),
                RawPole::Finite(_) => {
                    violations.push(Violation::BadPoleCoordinates { pole: idx });
                    poles.push(None);
                }
            }
        }
        for second in 0..poles.len() {
            for first in 0..second {
                if poles[first].is_some() && poles[first] == poles[second] {
                    violations.push(Violation::DuplicatePole { first, second });
                }
            }
        }

        let mut merged: BTreeMap<(usize, u32, u32), FFElement> = BTreeMap::new();
        for (idx, t) in raw.terms.iter().enumerate() {
            let mut ok = true;
            if t.level >= m {
                violations.push(Violation::LevelOutOfRange { term: idx, level: t.level });
                ok = false;
            }
            if t.pole >= raw.poles.len() {
                violations.push(Violation::PoleOutOfRange { term: idx, pole: t.pole });
                ok = false;
            }
            if !in_field(&t.coeff) {
                violations.push(Violation::BadCoefficient { term: idx });
                ok = false;
            }
            if ok {
                let c = field.element(&t.coeff);
                let key = (t.pole, t.level, t.exponent);
                let entry = merged.entry(key).or_insert_with(|| field.zero());
                *entry = &*entry + &c;
            }
        }
        let terms: Vec<Term> = merged
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|((pole, level, exponent), coeff)| Term { level, pole, exponent, coeff })
            .collect();
        if !raw.allow_empty && terms.iter().all(|t| t.exponent == 0) {
            violations.push(Violation::EmptyTerms);
        }

        let mut effective = Vec::new();
        if violations.is_empty() {
            let poles: Vec<Pole> = poles.into_iter().map(Option::unwrap).collect();
            for (j, pole) in poles.iter().enumerate() {
                let degree = pole_degree(p, m, pole.clone(), Some(j), &terms, &mut violations);
                effective.push(degree);
            }
            if !poles.iter().any(Pole::is_zero) {
                let zero = Pole::Finite(field.zero());
                effective.push(pole_degree(p, m, zero, None, &terms, &mut violations));
            }
            if !poles.iter().any(Pole::is_infinity) {
                effective.push(pole_degree(p, m, Pole::Infinity, None, &terms, &mut violations));
            }
            if violations.is_empty() {
                return Ok(Self { field, m, poles, terms, effective, allow_empty: raw.allow_empty });
            }
        }
        Err(SumError::Hypotheses(violations))
    }

    pub fn p(&self) -> u64 {
        self.field.p()
    }

    /// `a` with `q = p^a`.
    pub fn field_degree(&self) -> usize {
        self.field.degree()
    }

    pub fn q(&self) -> u64 {
        self.field.order().expect("field order fits")
    }

    pub fn level(&self) -> u32 {
        self.m
    }

    pub fn field(&self) -> &Arc<FieldParams> {
        &self.field
    }

    pub fn poles(&self) -> &[Pole] {
        &self.poles
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn allows_empty(&self) -> bool {
        self.allow_empty
    }

    /// True without any non-constant term.
    pub fn is_trivial(&self) -> bool {
        self.terms.iter().all(|t| t.exponent == 0)
    }

    /// Declared poles first, then an implicit `0` and `∞` when missing.
    pub fn effective_poles(&self) -> &[PoleDegree] {
        &self.effective
    }

    /// Both `0` and `∞` are declared poles.
    pub fn standard_poles(&self) -> bool {
        self.poles.iter().any(Pole::is_zero) && self.poles.iter().any(Pole::is_infinity)
    }

    /// `Σ_j (D_j + 1) - 2` over the effective poles.
    pub fn degree_formula(&self) -> u64 {
        self.effective.iter().map(|e| e.max_degree + 1).sum::<u64>() - 2
    }

    /// Finite nonzero declared poles; these and `0` leave the domain.
    pub fn excluded_nonzero(&self) -> impl Iterator<Item = &FFElement> {
        self.poles.iter().filter_map(|p| match p {
            Pole::Finite(x) if !x.is_zero() => Some(x),
            _ => None,
        })
    }

    /// Number of points summed over `F_{q^k}`.
    pub fn domain_size(&self, k: u32) -> Option<u64> {
        let total = self.q().checked_pow(k)?;
        Some(total - 1 - self.excluded_nonzero().count() as u64)
    }

    /// The input with every default made explicit.
    pub fn echo(&self) -> RawSum {
        let mut terms: Vec<RawTerm> = self
            .terms
            .iter()
            .map(|t| RawTerm { level: t.level, pole: t.pole, exponent: t.exponent, coeff: t.coeff.coeffs().to_vec() })
            .collect();
        terms.sort_by_key(|t| (t.pole, t.level, t.exponent));
        RawSum {
            p: self.p(),
            a: self.field_degree(),
            m: self.m,
            field_modulus: Some(self.field.modulus().to_vec()),
            poles: self
                .poles
                .iter()
                .map(|p| match p {
                    Pole::Infinity => RawPole::Infinity,
                    Pole::Finite(x) => RawPole::Finite(x.coeffs().to_vec()),
                })
                .collect(),
            terms,
            allow_empty: self.allow_empty,
        }
    }

    /// Lift over `F_{q^k}` into `GR(p^m, ak)`.
    pub fn lift(&self, k: u32, mode: PoleLift) -> Result<LiftedSum, SumError> {
        LiftedSum::new(self, k, mode)
    }
}

fn pole_degree(
    p: u64,
    m: u32,
    pole: Pole,
    declared: Option<usize>,
    terms: &[Term],
    violations: &mut Vec<Violation>,
) -> PoleDegree {
    let mut level_degrees = vec![None; m as usize];
    if let Some(j) = declared {
        for t in terms.iter().filter(|t| t.pole == j && t.exponent > 0) {
            let slot = &mut level_degrees[t.level as usize];
            *slot = Some(slot.map_or(t.exponent, |d: u32| d.max(t.exponent)));
        }
    }
    let weighted: Vec<(u32, u64)> = level_degrees
        .iter()
        .enumerate()
        .filter_map(|(i, d)| d.map(|d| (i as u32, p.pow(m - i as u32 - 1) * d as u64)))
        .collect();
    let max_degree = weighted.iter().map(|w| w.1).max().unwrap_or(0);
    let top: Vec<u32> = weighted.iter().filter(|w| w.1 == max_degree).map(|w| w.0).collect();
    let j = declared.unwrap_or(0);
    if top.len() > 1 {
        violations.push(Violation::MaximumNotUnique { pole: j, levels: top.clone(), value: max_degree });
    }
    for (i, d) in level_degrees.iter().enumerate() {
        if let Some(d) = d {
            if (*d as u64).is_multiple_of(p) {
                violations.push(Violation::DegreeDivisibleByP { level: i as u32, pole: j, degree: *d });
            }
        }
    }
    PoleDegree { pole, declared, level_degrees, max_degree, dominant_level: top.first().copied() }
}

/// How `1/(x - P)` is lifted at a finite nonzero pole.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PoleLift {
    /// `[1/(x̄ - P̄)]`, the Teichmüller lift of the residue; this is what
    /// the Witt-vector definition of `f` requires.
    #[default]
    Teichmuller,
    /// `(x̂ - P̂)^{-1}` with `x̂, P̂` Teichmüller; differs mod `p^2`.
    Naive,
}

#[derive(Clone, Debug)]
pub(crate) enum LiftedPoleKind {
    Zero,
    Infinity,
    /// Residue in `F_{q^k}` and its Teichmüller lift.
    Finite { residue: Vec<u64>, lifted: Vec<u64> },
}

#[derive(Clone, Debug)]
pub(crate) struct LiftedPole {
    pub(crate) kind: LiftedPoleKind,
    /// `horner[k-1] = Σ_i p^i [a_{ijk}]` for `k = 1..=max exponent`.
    pub(crate) horner: Vec<Vec<u64>>,
}

/// `f̂` over `GR(p^m, ak)` together with the embedded residue data.
#[derive(Clone, Debug)]
pub struct LiftedSum {
    pub(crate) ext: Arc<FieldParams>,
    pub(crate) ring: Arc<GRParams>,
    pub(crate) embedding: Embedding,
    pub(crate) mode: PoleLift,
    pub(crate) poles: Vec<LiftedPole>,
    /// `Σ p^i [a]` over constant terms.
    pub(crate) constant: Vec<u64>,
    /// Finite nonzero pole residues in `F_{q^k}`.
    pub(crate) excluded: Vec<Vec<u64>>,
}

impl LiftedSum {
    fn new(sum: &ExponentialSum, k: u32, mode: PoleLift) -> Result<Self, SumError> {
        let n = sum.field_degree() * k as usize;
        let ext = if k == 1 { Arc::clone(sum.field()) } else { FieldParams::build(sum.p(), n, None)? };
        let embedding = Embedding::new(sum.field(), &ext)?;
        let ring = GRParams::build(&ext, sum.level())?;
        let r = ring.ring();
        let lift_coeff = |c: &FFElement, level: u32| {
            let t = ring.teichmuller_raw(&embedding.apply_raw(c.coeffs()));
            r.scale(&t, sum.p().pow(level))
        };
        let mut constant = r.zero();
        let mut poles = Vec::with_capacity(sum.poles().len());
        for (j, pole) in sum.poles().iter().enumerate() {
            let kind = match pole {
                Pole::Infinity => LiftedPoleKind::Infinity,
                Pole::Finite(x) if x.is_zero() => LiftedPoleKind::Zero,
                Pole::Finite(x) => {
                    let residue = embedding.apply_raw(x.coeffs());
                    let lifted = ring.teichmuller_raw(&residue);
                    LiftedPoleKind::Finite { residue, lifted }
                }
            };
            let top = sum.terms().iter().filter(|t| t.pole == j).map(|t| t.exponent).max().unwrap_or(0);
            let mut horner = vec![r.zero(); top as usize];
            for t in sum.terms().iter().filter(|t| t.pole == j) {
                let c = lift_coeff(&t.coeff, t.level);
                if t.exponent == 0 {
                    r.add_assign(&mut constant, &c);
                } else {
                    r.add_assign(&mut horner[t.exponent as usize - 1], &c);
                }
            }
            poles.push(LiftedPole { kind, horner });
        }
        let excluded = sum.excluded_nonzero().map(|x| embedding.apply_raw(x.coeffs())).collect();
        Ok(Self { ext, ring, embedding, mode, poles, constant, excluded })
    }

    pub fn extension_field(&self) -> &Arc<FieldParams> {
        &self.ext
    }

    pub fn ring(&self) -> &Arc<GRParams> {
        &self.ring
    }

    pub fn embedding(&self) -> &Embedding {
        &self.embedding
    }

    pub fn mode(&self) -> PoleLift {
        self.mode
    }

    /// Lifted finite poles as Galois-ring coefficient vectors, in order.
    pub fn lifted_finite_poles(&self) -> Vec<Vec<u64>> {
        self.poles
            .iter()
            .filter_map(|p| match &p.kind {
                LiftedPoleKind::Finite { lifted, .. } => Some(lifted.clone()),
                LiftedPoleKind::Zero => Some(self.ring.ring().zero()),
                LiftedPoleKind::Infinity => None,
            })
            .collect()
    }

    /// `f̂(x̂)` at the Teichmüller lift of the residue `x`, which must lie in
    /// the domain. Returns `None` only on a non-unit inversion.
    pub(crate) fn evaluate_raw(&self, x: &[u64]) -> Option<Vec<u64>> {
        let r = self.ring.ring();
        let x_hat = self.ring.teichmuller_raw(x);
        let mut acc = self.constant.clone();
        for pole in &self.poles {
            if pole.horner.is_empty() {
                continue;
            }
            let local = match &pole.kind {
                LiftedPoleKind::Infinity => x_hat.clone(),
                LiftedPoleKind::Zero => self.ring.invert_raw(&x_hat)?,
                LiftedPoleKind::Finite { residue, lifted } => match self.mode {
                    PoleLift::Teichmuller => {
                        let diff = self.ext.ring().sub(x, residue);
                        let inv = self.ext.inverse_raw(&diff)?;
                        self.ring.teichmuller_raw(&inv)
                    }
                    PoleLift::Naive => self.ring.invert_raw(&r.sub(&x_hat, lifted))?,
                },
            };
            let mut h = r.zero();
            for c in pole.horner.iter().rev() {
                h = r.add(&h, c);
                h = r.mul(&h, &local);
            }
            r.add_assign(&mut acc, &h);
        }
        Some(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn term(level: u32, pole: usize, exponent: u32, coeff: u64) -> RawTerm {
        RawTerm { level, pole, exponent, coeff: vec![coeff] }
    }

    pub(crate) fn prime_sum(p: u64, m: u32, poles: Vec<RawPole>, terms: Vec<RawTerm>) -> RawSum {
        RawSum { p, a: 1, m, field_modulus: None, poles, terms, allow_empty: false }
    }

    fn zero() -> RawPole {
        RawPole::Finite(vec![0])
    }

    fn violations(raw: &RawSum) -> Vec<Violation> {
        match ExponentialSum::validate(raw) {
            Err(SumError::Hypotheses(v)) => v,
            other => panic!("expected violations, got {other:?}"),
        }
    }

    #[test]
    fn single_level_pole_degree() {
        let raw = prime_sum(3, 2, vec![zero(), RawPole::Infinity], vec![term(0, 0, 1, 1)]);
        let s = ExponentialSum::validate(&raw).unwrap();
        let e = &s.effective_poles()[0];
        assert_eq!((e.max_degree, e.dominant_level), (3, Some(0)));
        assert_eq!(s.effective_poles()[1].max_degree, 0);
    }

    #[test]
    fn tie_and_divisibility_are_reported() {
        let raw = prime_sum(3, 2, vec![zero(), RawPole::Infinity], vec![term(0, 0, 1, 1), term(1, 0, 3, 1)]);
        let v = violations(&raw);
        assert!(v.contains(&Violation::MaximumNotUnique { pole: 0, levels: vec![0, 1], value: 3 }));
        assert!(v.contains(&Violation::DegreeDivisibleByP { level: 1, pole: 0, degree: 3 }));
        let raw = prime_sum(3, 1, vec![zero(), RawPole::Infinity], vec![term(0, 0, 3, 1)]);
        assert_eq!(violations(&raw), vec![Violation::DegreeDivisibleByP { level: 0, pole: 0, degree: 3 }]);
    }

    #[test]
    fn structural_violations() {
        let raw = prime_sum(3, 3, vec![zero(), zero()], vec![term(4, 2, 1, 5)]);
        let v = violations(&raw);
        assert!(v.contains(&Violation::PrimeNotAboveLevel { p: 3, m: 3 }));
        assert!(v.contains(&Violation::DuplicatePole { first: 0, second: 1 }));
        assert!(v.contains(&Violation::LevelOutOfRange { term: 0, level: 4 }));
        assert!(v.contains(&Violation::PoleOutOfRange { term: 0, pole: 2 }));
        assert!(v.contains(&Violation::BadCoefficient { term: 0 }));
        assert_eq!(violations(&prime_sum(3, 1, vec![zero()], vec![])), vec![Violation::EmptyTerms]);
        let mut empty = prime_sum(3, 1, vec![zero()], vec![]);
        empty.allow_empty = true;
        assert!(ExponentialSum::validate(&empty).unwrap().is_trivial());
        assert!(matches!(
            ExponentialSum::validate(&prime_sum(4, 1, vec![zero()], vec![])),
            Err(SumError::Field(FieldError::NotPrime(4)))
        ));
    }

    #[test]
    fn degree_formula_examples() {
        let kloosterman = prime_sum(3, 1, vec![zero(), RawPole::Infinity], vec![term(0, 0, 1, 1), term(0, 1, 1, 1)]);
        assert_eq!(ExponentialSum::validate(&kloosterman).unwrap().degree_formula(), 2);
        let six = prime_sum(3, 2, vec![zero(), RawPole::Infinity], vec![term(0, 0, 1, 1), term(0, 1, 1, 1)]);
        assert_eq!(ExponentialSum::validate(&six).unwrap().degree_formula(), 6);
        let four = prime_sum(7, 1, vec![zero(), RawPole::Infinity], vec![term(0, 0, 3, 1), term(0, 1, 1, 2)]);
        assert_eq!(ExponentialSum::validate(&four).unwrap().degree_formula(), 4);
        // implicit poles: f = x on F_p^x has L = 1 - s
        let line = prime_sum(5, 1, vec![RawPole::Infinity], vec![term(0, 0, 1, 1)]);
        let s = ExponentialSum::validate(&line).unwrap();
        assert_eq!(s.degree_formula(), 1);
        assert!(!s.standard_poles());
    }

    #[test]
    fn degree_formula_is_order_independent() {
        let poles = vec![zero(), RawPole::Infinity, RawPole::Finite(vec![2])];
        let terms = vec![term(0, 0, 2, 1), term(1, 1, 3, 1), term(0, 2, 1, 4), term(1, 2, 2, 3)];
        let base = ExponentialSum::validate(&prime_sum(5, 2, poles.clone(), terms.clone())).unwrap();
        let perm = [2usize, 0, 1];
        let poles2: Vec<RawPole> = (0..3).map(|j| poles[perm[j]].clone()).collect();
        let mut terms2: Vec<RawTerm> = terms
            .iter()
            .map(|t| RawTerm { pole: perm.iter().position(|&x| x == t.pole).unwrap(), ..t.clone() })
            .collect();
        terms2.reverse();
        let other = ExponentialSum::validate(&prime_sum(5, 2, poles2, terms2)).unwrap();
        assert_eq!(base.degree_formula(), other.degree_formula());
        assert_eq!(base.degree_formula(), 11 + 4 + 6 - 2);
    }

    #[test]
    fn duplicate_terms_merge() {
        let raw = prime_sum(5, 1, vec![zero(), RawPole::Infinity], vec![term(0, 0, 2, 2), term(0, 0, 2, 3), term(0, 0, 1, 1)]);
        let s = ExponentialSum::validate(&raw).unwrap();
        assert_eq!(s.terms().len(), 1);
        assert_eq!(s.effective_poles()[0].max_degree, 1);
    }

    #[test]
    fn lift_examples() {
        let raw = prime_sum(3, 2, vec![zero(), RawPole::Infinity, RawPole::Finite(vec![1])], vec![term(0, 1, 1, 2)]);
        let s = ExponentialSum::validate(&raw).unwrap();
        let lifted = s.lift(1, PoleLift::Teichmuller).unwrap();
        // [2] = 8 mod 9 at level 0
        assert_eq!(lifted.poles[1].horner[0], vec![8]);
        for (lp, pole) in lifted.lifted_finite_poles().iter().zip([0u64, 1]) {
            assert_eq!(lp[0] % 3, pole);
        }
        let m1 = ExponentialSum::validate(&prime_sum(5, 1, vec![zero()], vec![term(0, 0, 1, 3)])).unwrap();
        assert_eq!(m1.lift(2, PoleLift::Teichmuller).unwrap().poles[0].horner[0], vec![3, 0]);
    }

    #[test]
    fn naive_pole_lift_disagrees_mod_p_squared() {
        let raw = prime_sum(3, 2, vec![RawPole::Finite(vec![1])], vec![term(0, 0, 1, 1)]);
        let s = ExponentialSum::validate(&raw).unwrap();
        let good = s.lift(1, PoleLift::Teichmuller).unwrap();
        let naive = s.lift(1, PoleLift::Naive).unwrap();
        // x = 2: [1/(2-1)] = 1 but ([2] - [1])^{-1} = 7^{-1} = 4 mod 9
        assert_eq!(good.evaluate_raw(&[2]).unwrap(), vec![1]);
        assert_eq!(naive.evaluate_raw(&[2]).unwrap(), vec![4]);
    }

    #[test]
    fn echo_round_trips() {
        let raw = RawSum {
            p: 3,
            a: 2,
            m: 1,
            field_modulus: None,
            poles: vec![RawPole::Infinity, RawPole::Finite(vec![0, 0])],
            terms: vec![RawTerm { level: 0, pole: 1, exponent: 2, coeff: vec![1, 2] }, term(0, 0, 1, 0)],
            allow_empty: false,
        };
        let s = ExponentialSum::validate(&RawSum { terms: vec![raw.terms[0].clone(), RawTerm { coeff: vec![1, 0], ..raw.terms[1].clone() }], ..raw.clone() }).unwrap();
        let echo = s.echo();
        assert_eq!(echo.field_modulus, Some(vec![1, 0, 1]));
        let again = ExponentialSum::validate(&echo).unwrap();
        assert_eq!(again.echo(), echo);
        assert_eq!(again.degree_formula(), 3 + 2 - 2);
    }
}
