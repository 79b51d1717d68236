//! Exact evaluation of `S_f(k) = Σ ζ^{Tr f̂(x̂)}` by enumerating
//! `x ∈ F_{q^k}^×` off the poles.
//!
//! Two independent paths produce the histogram of trace values: one in the
//! Galois ring through the lift `f̂`, one inside `W_m(F_{q^k})` through the
//! universal Witt polynomials and `ω`. Points are split into chunks whose
//! histograms merge by addition, so results do not depend on chunking or
//! thread count.

use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::cyclotomic::CyclotomicNumber;
use crate::finite_field::{FFElement, FieldParams};
use crate::galois_ring::{GRParams, RingError};
use crate::sum::{ExponentialSum, LiftedSum, Pole, PoleLift, SumError};
use crate::witt::{omega, witt_add, witt_trace, WittError, WittVector};

pub const DEFAULT_BUDGET_POINTS: u64 = 5_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EngineConfig {
    /// Largest `q^k` enumerated by a single sum.
    pub budget_points: u64,
    /// Worker cap; `None` uses the global pool.
    pub threads: Option<usize>,
    pub chunk_size: u64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self { budget_points: DEFAULT_BUDGET_POINTS, threads: None, chunk_size: 2048 }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("k must be at least 1")]
    ZeroExtension,
    #[error("enumerating {needed} points exceeds the budget of {budget}")]
    BudgetExceeded { needed: String, budget: u64 },
    #[error("non-unit inversion at a domain point")]
    NonUnit,
    #[error(transparent)]
    Sum(#[from] SumError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Witt(#[from] WittError),
    #[error("thread pool: {0}")]
    Pool(String),
}

/// Number of domain points with trace value `c`, for `c ∈ Z/p^m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterHistogram {
    counts: Vec<u64>,
}

impl CharacterHistogram {
    pub fn new(modulus: u64) -> Self {
        Self { counts: vec![0; modulus as usize] }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn record(&mut self, residue: u64) {
        self.counts[residue as usize] += 1;
    }

    pub fn merge(mut self, other: &Self) -> Self {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self
    }

    pub fn to_cyclotomic(&self, p: u64, m: u32) -> CyclotomicNumber {
        CyclotomicNumber::from_exponent_counts(p, m, &self.counts)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumResult {
    pub k: u32,
    pub histogram: CharacterHistogram,
    pub value: CyclotomicNumber,
}

impl SumResult {
    pub fn points(&self) -> u64 {
        self.histogram.total()
    }
}

fn point_count(sum: &ExponentialSum, k: u32, cfg: &EngineConfig) -> Result<u64, EngineError> {
    if k == 0 {
        return Err(EngineError::ZeroExtension);
    }
    match sum.q().checked_pow(k) {
        Some(n) if n <= cfg.budget_points => Ok(n),
        Some(n) => Err(EngineError::BudgetExceeded { needed: n.to_string(), budget: cfg.budget_points }),
        None => Err(EngineError::BudgetExceeded { needed: format!("{}^{k}", sum.q()), budget: cfg.budget_points }),
    }
}

fn in_pool<T: Send>(cfg: &EngineConfig, job: impl FnOnce() -> T + Send) -> Result<T, EngineError> {
    match cfg.threads {
        None => Ok(job()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| EngineError::Pool(e.to_string()))?;
            Ok(pool.install(job))
        }
    }
}

/// Histogram over field indices `1..total`, skipping excluded residues.
fn enumerate<F>(
    field: &Arc<FieldParams>,
    total: u64,
    excluded: &[Vec<u64>],
    modulus: u64,
    cfg: &EngineConfig,
    trace_at: F,
) -> Result<CharacterHistogram, EngineError>
where
    F: Fn(&[u64]) -> Result<u64, EngineError> + Sync,
{
    let chunk = cfg.chunk_size.max(1);
    let chunks = total.div_ceil(chunk);
    in_pool(cfg, || {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut hist = CharacterHistogram::new(modulus);
                for idx in (c * chunk).max(1)..((c + 1) * chunk).min(total) {
                    let x = field.coeffs_at_index(idx);
                    if excluded.contains(&x) {
                        continue;
                    }
                    hist.record(trace_at(&x)?);
                }
                Ok(hist)
            })
            .try_reduce(|| CharacterHistogram::new(modulus), |a, b| Ok(a.merge(&b)))
    })?
}

fn finish(sum: &ExponentialSum, k: u32, histogram: CharacterHistogram) -> SumResult {
    let value = histogram.to_cyclotomic(sum.p(), sum.level());
    SumResult { k, histogram, value }
}

/// `S_f(k)` through the Galois-ring lift.
pub fn char_sum(sum: &ExponentialSum, k: u32, cfg: &EngineConfig) -> Result<SumResult, EngineError> {
    char_sum_with(sum, k, cfg, PoleLift::Teichmuller)
}

/// As [`char_sum`] with an explicit pole-lifting rule.
pub fn char_sum_with(
    sum: &ExponentialSum,
    k: u32,
    cfg: &EngineConfig,
    mode: PoleLift,
) -> Result<SumResult, EngineError> {
    let total = point_count(sum, k, cfg)?;
    let lifted = sum.lift(k, mode)?;
    let modulus = lifted.ring().char_modulus();
    let hist = enumerate(lifted.extension_field(), total, &lifted.excluded, modulus, cfg, |x| {
        let value = lifted.evaluate_raw(x).ok_or(EngineError::NonUnit)?;
        Ok(lifted.ring().trace_raw(&value))
    })?;
    Ok(finish(sum, k, hist))
}

/// Residue-field data for evaluating `f(x)` inside `W_m(F_{q^k})`.
struct WittPlan {
    ext: Arc<FieldParams>,
    m: u32,
    /// `(level, pole kind, exponent, embedded coefficient)`.
    terms: Vec<(u32, LocalParameter, u32, FFElement)>,
    prime_ring: Arc<GRParams>,
}

#[derive(Clone)]
enum LocalParameter {
    Constant,
    Infinity,
    Finite(FFElement),
}

impl WittPlan {
    fn new(sum: &ExponentialSum, lifted: &LiftedSum) -> Result<Self, EngineError> {
        let ext = Arc::clone(lifted.extension_field());
        let terms = sum
            .terms()
            .iter()
            .map(|t| {
                let local = match (&sum.poles()[t.pole], t.exponent) {
                    (_, 0) => LocalParameter::Constant,
                    (Pole::Infinity, _) => LocalParameter::Infinity,
                    (Pole::Finite(x), _) => LocalParameter::Finite(lifted.embedding().apply(x)),
                };
                (t.level, local, t.exponent, lifted.embedding().apply(&t.coeff))
            })
            .collect();
        let prime = FieldParams::prime_field(sum.p()).map_err(SumError::from)?;
        let prime_ring = GRParams::build(&prime, sum.level())?;
        Ok(Self { ext, m: sum.level(), terms, prime_ring })
    }

    fn trace_at(&self, x: &[u64]) -> Result<u64, EngineError> {
        let x = self.ext.element(x);
        let mut acc = WittVector::zero(&self.ext, self.m);
        for (level, local, exponent, coeff) in &self.terms {
            let base = match local {
                LocalParameter::Constant => self.ext.one(),
                LocalParameter::Infinity => x.clone(),
                LocalParameter::Finite(pole) => (&x - pole).inverse().ok_or(EngineError::NonUnit)?,
            };
            let value = coeff * &base.pow(*exponent as u128);
            acc = witt_add(&acc, &WittVector::shifted(&value, *level, self.m))?;
        }
        let traced = witt_trace(&acc)?;
        Ok(omega(&traced, &self.prime_ring)?.coeffs()[0])
    }
}

/// `S_f(k)` through Witt-vector arithmetic, the trace in `W_m`, and `ω`.
pub fn char_sum_witt(sum: &ExponentialSum, k: u32, cfg: &EngineConfig) -> Result<SumResult, EngineError> {
    let total = point_count(sum, k, cfg)?;
    let lifted = sum.lift(k, PoleLift::Teichmuller)?;
    let plan = WittPlan::new(sum, &lifted)?;
    let modulus = lifted.ring().char_modulus();
    let hist = enumerate(&plan.ext, total, &lifted.excluded, modulus, cfg, |x| plan.trace_at(x))?;
    Ok(finish(sum, k, hist))
}

/// `S_f(1..=max_k)` in order.
pub fn sum_sequence(sum: &ExponentialSum, max_k: u32, cfg: &EngineConfig) -> Result<Vec<SumResult>, EngineError> {
    for k in 1..=max_k {
        point_count(sum, k, cfg)?;
    }
    (1..=max_k).map(|k| char_sum(sum, k, cfg)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sum::{RawPole, RawSum, RawTerm};

    fn term(level: u32, pole: usize, exponent: u32, coeff: u64) -> RawTerm {
        RawTerm { level, pole, exponent, coeff: vec![coeff] }
    }

    fn build(p: u64, m: u32, poles: Vec<RawPole>, terms: Vec<RawTerm>) -> ExponentialSum {
        ExponentialSum::validate(&RawSum { p, a: 1, m, field_modulus: None, poles, terms, allow_empty: false })
            .unwrap()
    }

    fn standard() -> Vec<RawPole> {
        vec![RawPole::Finite(vec![0]), RawPole::Infinity]
    }

    #[test]
    fn kloosterman_first_sum() {
        let s = build(3, 1, standard(), vec![term(0, 0, 1, 1), term(0, 1, 1, 1)]);
        let cfg = EngineConfig::default();
        let gr = char_sum(&s, 1, &cfg).unwrap();
        assert_eq!(gr.value, CyclotomicNumber::from_integer(3, 1, -1));
        assert_eq!(gr.histogram.counts(), &[0, 1, 1]);
        assert_eq!(char_sum_witt(&s, 1, &cfg).unwrap(), gr);
    }

    #[test]
    fn empty_domain_and_trivial_character() {
        // poles 1, 2 and the implicit 0 cover F_3
        let s = build(3, 1, vec![RawPole::Finite(vec![1]), RawPole::Finite(vec![2])], vec![term(0, 0, 1, 1)]);
        let r = char_sum(&s, 1, &EngineConfig::default()).unwrap();
        assert!(r.value.is_zero());
        assert_eq!(r.points(), 0);
        let trivial = ExponentialSum::validate(&RawSum {
            p: 5,
            a: 1,
            m: 2,
            field_modulus: None,
            poles: standard(),
            terms: vec![],
            allow_empty: true,
        })
        .unwrap();
        let r = char_sum(&trivial, 2, &EngineConfig::default()).unwrap();
        assert_eq!(r.value, CyclotomicNumber::from_integer(5, 2, 24));
    }

    #[test]
    fn top_level_term_lands_in_mu_p() {
        let s = build(3, 2, standard(), vec![term(1, 0, 1, 1)]);
        for k in 1..=3 {
            let r = char_sum_witt(&s, k, &EngineConfig::default()).unwrap();
            for (c, n) in r.histogram.counts().iter().enumerate() {
                assert!(c % 3 == 0 || *n == 0);
            }
            assert_eq!(r, char_sum(&s, k, &EngineConfig::default()).unwrap());
        }
    }

    #[test]
    fn paths_agree_with_mixed_levels_and_finite_poles() {
        let poles = vec![RawPole::Finite(vec![0]), RawPole::Infinity, RawPole::Finite(vec![2])];
        let terms = vec![term(0, 0, 1, 2), term(1, 1, 2, 1), term(1, 2, 2, 4), term(0, 2, 1, 3), term(1, 0, 0, 1)];
        let s = build(5, 2, poles, terms);
        let cfg = EngineConfig::default();
        for k in 1..=3 {
            assert_eq!(char_sum(&s, k, &cfg).unwrap(), char_sum_witt(&s, k, &cfg).unwrap());
        }
    }

    #[test]
    fn naive_lift_changes_the_sum() {
        let s = build(3, 2, vec![RawPole::Finite(vec![1]), RawPole::Infinity], vec![term(0, 0, 1, 1), term(0, 1, 1, 1)]);
        let cfg = EngineConfig::default();
        let witt = char_sum_witt(&s, 2, &cfg).unwrap();
        assert_eq!(char_sum(&s, 2, &cfg).unwrap(), witt);
        assert_ne!(char_sum_with(&s, 2, &cfg, PoleLift::Naive).unwrap().value, witt.value);
    }

    #[test]
    fn chunking_and_threads_do_not_matter() {
        let s = build(5, 2, standard(), vec![term(0, 0, 2, 1), term(0, 1, 1, 3)]);
        let base = char_sum(&s, 3, &EngineConfig::default()).unwrap();
        for (threads, chunk) in [(Some(1), 1), (Some(3), 7), (None, 100_000)] {
            let cfg = EngineConfig { threads, chunk_size: chunk, ..EngineConfig::default() };
            assert_eq!(char_sum(&s, 3, &cfg).unwrap(), base);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let s = build(7, 1, standard(), vec![term(0, 0, 1, 1)]);
        let cfg = EngineConfig { budget_points: 48, ..EngineConfig::default() };
        assert!(char_sum(&s, 1, &cfg).is_ok());
        assert!(matches!(char_sum(&s, 2, &cfg), Err(EngineError::BudgetExceeded { .. })));
        assert!(matches!(sum_sequence(&s, 3, &cfg), Err(EngineError::BudgetExceeded { .. })));
    }

    #[test]
    fn frobenius_conjugate_input_has_the_same_sums() {
        let f9 = FieldParams::build(3, 2, None).unwrap();
        let t = f9.generator();
        let make = |c: &FFElement, pole: &FFElement| {
            ExponentialSum::validate(&RawSum {
                p: 3,
                a: 2,
                m: 1,
                field_modulus: None,
                poles: vec![RawPole::Finite(vec![0, 0]), RawPole::Infinity, RawPole::Finite(pole.coeffs().to_vec())],
                terms: vec![
                    RawTerm { level: 0, pole: 0, exponent: 1, coeff: c.coeffs().to_vec() },
                    RawTerm { level: 0, pole: 1, exponent: 2, coeff: vec![1, 0] },
                    RawTerm { level: 0, pole: 2, exponent: 1, coeff: c.coeffs().to_vec() },
                ],
                allow_empty: false,
            })
            .unwrap()
        };
        let c = &t + &f9.one();
        let s = make(&c, &t);
        let s_conj = make(&c.frobenius(), &t.frobenius());
        let cfg = EngineConfig::default();
        for k in 1..=2 {
            assert_eq!(char_sum(&s, k, &cfg).unwrap().value, char_sum(&s_conj, k, &cfg).unwrap().value);
        }
    }

    #[test]
    fn linear_trace_matches_conjugate_sum_on_values() {
        let s = build(5, 2, standard(), vec![term(0, 0, 2, 1), term(1, 1, 3, 2)]);
        let lifted = s.lift(3, PoleLift::Teichmuller).unwrap();
        let field = lifted.extension_field();
        for idx in 1..field.order().unwrap() {
            let v = lifted.evaluate_raw(&field.coeffs_at_index(idx)).unwrap();
            let by_conjugates = lifted.ring().element(&v).trace_to_base().unwrap();
            assert_eq!(lifted.ring().trace_raw(&v), by_conjugates);
        }
    }
}
