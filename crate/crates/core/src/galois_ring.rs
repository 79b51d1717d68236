//! Galois rings `GR(p^m, n) = (Z/p^m)[X]/(F)`, the unramified lifts of
//! `F_{p^n}`, with Frobenius, Teichmüller lifts, inversion and trace.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use thiserror::Error;

use crate::finite_field::{FFElement, FieldParams};
use crate::ring::{PolyRing, MAX_COEFF_MODULUS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("p = {p} must exceed m = {m}")]
    PrimeNotAboveLevel { p: u64, m: u32 },
    #[error("p^m = {p}^{m} exceeds the supported coefficient range")]
    TooLarge { p: u64, m: u32 },
    #[error("element is not a unit")]
    NotAUnit,
    #[error("Hensel lift of Frobenius did not converge in {0} steps")]
    HenselStalled(u32),
    #[error("trace is not a constant (inconsistent Frobenius)")]
    TraceNotConstant,
    #[error("parameter mismatch: {0}")]
    Mismatch(&'static str),
}

/// Parameters of `GR(p^m, n)` built on top of a residue field.
#[derive(Debug)]
pub struct GRParams {
    field: Arc<FieldParams>,
    m: u32,
    ring: PolyRing,
    /// `σ(X)` powers `σ(X)^i`, `i < n`.
    frobenius_powers: Vec<Vec<u64>>,
    /// `Tr(X^i)` for `i < n`; the trace is `Z/p^m`-linear.
    trace_of_basis: Vec<u64>,
}

impl PartialEq for GRParams {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && self.field == other.field
    }
}

impl GRParams {
    /// Build the Galois ring of level `m` over `field`. Requires `p > m`.
    pub fn build(field: &Arc<FieldParams>, m: u32) -> Result<Arc<Self>, RingError> {
        let p = field.p();
        if m == 0 || p <= m as u64 {
            return Err(RingError::PrimeNotAboveLevel { p, m });
        }
        Self::build_unchecked(field, m)
    }

    /// As [`GRParams::build`] without the `p > m` guard; only the `m >= 1`
    /// and size checks remain. Used by Witt-vector tests for small `p`.
    pub fn build_unchecked(field: &Arc<FieldParams>, m: u32) -> Result<Arc<Self>, RingError> {
        let p = field.p();
        let pm = p
            .checked_pow(m)
            .filter(|&v| v <= MAX_COEFF_MODULUS)
            .ok_or(RingError::TooLarge { p, m })?;
        if m == 0 {
            return Err(RingError::PrimeNotAboveLevel { p, m });
        }
        let ring = PolyRing::new(pm, field.modulus().to_vec());
        let n = ring.degree();
        let mut params = Self {
            field: Arc::clone(field),
            m,
            ring,
            frobenius_powers: Vec::new(),
            trace_of_basis: Vec::new(),
        };
        let s = params.hensel_frobenius()?;
        let mut acc = params.ring.one();
        for _ in 0..n {
            params.frobenius_powers.push(acc.clone());
            acc = params.ring.mul(&acc, &s);
        }
        let mut basis = params.ring.one();
        let x = params.ring.gen();
        for _ in 0..n {
            let tr = params.trace_by_conjugates_raw(&basis)?;
            params.trace_of_basis.push(tr);
            basis = params.ring.mul(&basis, &x);
        }
        Ok(Arc::new(params))
    }

    /// Root `s` of the modulus with `s ≡ X^p (mod p)`, by Newton iteration.
    fn hensel_frobenius(&self) -> Result<Vec<u64>, RingError> {
        let ring = &self.ring;
        let f = ring.poly().to_vec();
        let df: Vec<u64> = f.iter().enumerate().skip(1).map(|(i, &c)| c * i as u64 % ring.modulus()).collect();
        let mut s = ring.pow(&ring.gen(), self.field.p() as u128);
        for _ in 0..=self.m {
            let residual = ring.eval_scalar_poly(&f, &s);
            if ring.is_zero(&residual) {
                return Ok(s);
            }
            let slope = ring.eval_scalar_poly(&df, &s);
            let inv = self.invert_raw(&slope).ok_or(RingError::NotAUnit)?;
            s = ring.sub(&s, &ring.mul(&residual, &inv));
        }
        Err(RingError::HenselStalled(self.m))
    }

    pub fn p(&self) -> u64 {
        self.field.p()
    }

    pub fn level(&self) -> u32 {
        self.m
    }

    pub fn degree(&self) -> usize {
        self.ring.degree()
    }

    /// `p^m`.
    pub fn char_modulus(&self) -> u64 {
        self.ring.modulus()
    }

    pub fn field(&self) -> &Arc<FieldParams> {
        &self.field
    }

    pub fn modulus(&self) -> &[u64] {
        self.ring.poly()
    }

    pub(crate) fn ring(&self) -> &PolyRing {
        &self.ring
    }

    /// `σ(X)`.
    pub fn frobenius_image(self: &Arc<Self>) -> GaloisRingElement {
        let c = if self.degree() == 1 { self.ring.gen() } else { self.frobenius_powers[1].clone() };
        self.element(&c)
    }

    pub fn element(self: &Arc<Self>, coeffs: &[u64]) -> GaloisRingElement {
        GaloisRingElement { params: Arc::clone(self), coeffs: self.ring.reduce(coeffs) }
    }

    pub fn from_u64(self: &Arc<Self>, c: u64) -> GaloisRingElement {
        GaloisRingElement { params: Arc::clone(self), coeffs: self.ring.constant(c) }
    }

    pub fn generator(self: &Arc<Self>) -> GaloisRingElement {
        GaloisRingElement { params: Arc::clone(self), coeffs: self.ring.gen() }
    }

    /// Coefficientwise lift of a residue-field element into `[0, p)`.
    pub fn lift(self: &Arc<Self>, x: &FFElement) -> GaloisRingElement {
        self.element(x.coeffs())
    }

    pub fn teichmuller(self: &Arc<Self>, x: &FFElement) -> GaloisRingElement {
        assert!(**x.params() == *self.field, "residue field mismatch");
        GaloisRingElement { params: Arc::clone(self), coeffs: self.teichmuller_raw(x.coeffs()) }
    }

    /// `y^{q'^{m-1}}` with `y` the entrywise lift and `q' = p^n`.
    pub(crate) fn teichmuller_raw(&self, residue: &[u64]) -> Vec<u64> {
        let lifted = self.ring.reduce(residue);
        if self.m == 1 {
            return lifted;
        }
        let times = self.degree() * (self.m as usize - 1);
        self.ring.pow_prime_power(&lifted, self.p(), times)
    }

    pub(crate) fn sigma_raw(&self, a: &[u64]) -> Vec<u64> {
        let n = self.degree();
        if n == 1 {
            return a.to_vec();
        }
        let pm = self.ring.modulus();
        let mut out = vec![0u64; n];
        for (c, pw) in a.iter().zip(&self.frobenius_powers) {
            if *c == 0 {
                continue;
            }
            for t in 0..n {
                out[t] = (out[t] + c * pw[t]) % pm;
            }
        }
        out
    }

    /// `Σ_{r<n} σ^r(a)`, checked to be constant.
    pub(crate) fn trace_by_conjugates_raw(&self, a: &[u64]) -> Result<u64, RingError> {
        let mut acc = a.to_vec();
        let mut conj = a.to_vec();
        for _ in 1..self.degree() {
            conj = self.sigma_raw(&conj);
            self.ring.add_assign(&mut acc, &conj);
        }
        if acc[1..].iter().any(|&c| c != 0) {
            return Err(RingError::TraceNotConstant);
        }
        Ok(acc[0])
    }

    /// Trace through the precomputed linear functional.
    #[inline]
    pub(crate) fn trace_raw(&self, a: &[u64]) -> u64 {
        let pm = self.ring.modulus();
        a.iter().zip(&self.trace_of_basis).fold(0u64, |acc, (x, t)| (acc + x * t) % pm)
    }

    pub(crate) fn invert_raw(&self, a: &[u64]) -> Option<Vec<u64>> {
        let p = self.p();
        let residue: Vec<u64> = a.iter().map(|c| c % p).collect();
        let inv0 = self.field.inverse_raw(&residue)?;
        let mut y = self.ring.reduce(&inv0);
        let two = self.ring.constant(2);
        let mut precision = 1u32;
        while precision < self.m {
            let ay = self.ring.mul(a, &y);
            y = self.ring.mul(&y, &self.ring.sub(&two, &ay));
            precision *= 2;
        }
        debug_assert_eq!(self.ring.mul(a, &y), self.ring.one());
        Some(y)
    }

    pub(crate) fn reduce_to_field_raw(&self, a: &[u64]) -> Vec<u64> {
        let p = self.p();
        a.iter().map(|c| c % p).collect()
    }
}

/// An element of `GR(p^m, n)`.
#[derive(Clone, PartialEq, Eq)]
pub struct GaloisRingElement {
    params: Arc<GRParams>,
    coeffs: Vec<u64>,
}

impl Eq for GRParams {}

impl fmt::Debug for GaloisRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GR{:?}", self.coeffs)
    }
}

impl GaloisRingElement {
    pub fn params(&self) -> &Arc<GRParams> {
        &self.params
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.params.ring.is_zero(&self.coeffs)
    }

    pub fn is_unit(&self) -> bool {
        self.coeffs.iter().any(|c| c % self.params.p() != 0)
    }

    pub fn pow(&self, e: u128) -> Self {
        self.with(self.params.ring.pow(&self.coeffs, e))
    }

    /// The Frobenius automorphism `σ`.
    pub fn frobenius(&self) -> Self {
        self.with(self.params.sigma_raw(&self.coeffs))
    }

    pub fn scale(&self, c: u64) -> Self {
        self.with(self.params.ring.scale(&self.coeffs, c))
    }

    pub fn invert(&self) -> Result<Self, RingError> {
        self.params.invert_raw(&self.coeffs).map(|c| self.with(c)).ok_or(RingError::NotAUnit)
    }

    /// `Σ_{r<n} σ^r(x)` as an integer in `[0, p^m)`.
    pub fn trace_to_base(&self) -> Result<u64, RingError> {
        self.params.trace_by_conjugates_raw(&self.coeffs)
    }

    pub fn reduce_mod_p(&self) -> FFElement {
        self.params.field.element(&self.params.reduce_to_field_raw(&self.coeffs))
    }

    fn with(&self, coeffs: Vec<u64>) -> Self {
        Self { params: Arc::clone(&self.params), coeffs }
    }

    fn check(&self, other: &Self) {
        assert!(Arc::ptr_eq(&self.params, &other.params) || *self.params == *other.params, "ring mismatch");
    }
}

impl Add for &GaloisRingElement {
    type Output = GaloisRingElement;
    fn add(self, rhs: &GaloisRingElement) -> GaloisRingElement {
        self.check(rhs);
        self.with(self.params.ring.add(&self.coeffs, &rhs.coeffs))
    }
}

impl Sub for &GaloisRingElement {
    type Output = GaloisRingElement;
    fn sub(self, rhs: &GaloisRingElement) -> GaloisRingElement {
        self.check(rhs);
        self.with(self.params.ring.sub(&self.coeffs, &rhs.coeffs))
    }
}

impl Mul for &GaloisRingElement {
    type Output = GaloisRingElement;
    fn mul(self, rhs: &GaloisRingElement) -> GaloisRingElement {
        self.check(rhs);
        self.with(self.params.ring.mul(&self.coeffs, &rhs.coeffs))
    }
}

impl Neg for &GaloisRingElement {
    type Output = GaloisRingElement;
    fn neg(self) -> GaloisRingElement {
        self.with(self.params.ring.neg(&self.coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gr92() -> Arc<GRParams> {
        let f9 = FieldParams::build(3, 2, Some(vec![1, 0, 1])).unwrap();
        GRParams::build(&f9, 2).unwrap()
    }

    #[test]
    fn frobenius_of_t_in_gr92() {
        let r = gr92();
        let s = r.frobenius_image();
        assert_eq!(s.coeffs(), &[0, 8]);
        // (8t)^2 + 1 = 0 mod 9
        let check = &(&s * &s) + &r.from_u64(1);
        assert!(check.is_zero());
    }

    #[test]
    fn level_one_matches_field() {
        let f = FieldParams::build(5, 3, None).unwrap();
        let r = GRParams::build(&f, 1).unwrap();
        for x in f.enumerate().step_by(9) {
            let t = r.teichmuller(&x);
            assert_eq!(t.coeffs(), x.coeffs());
            assert_eq!(t.frobenius().coeffs(), x.frobenius().coeffs());
            assert_eq!(t.trace_to_base().unwrap(), x.trace_to_prime());
        }
    }

    #[test]
    fn rejects_p_not_above_m() {
        let f3 = FieldParams::prime_field(3).unwrap();
        assert_eq!(GRParams::build(&f3, 3).unwrap_err(), RingError::PrimeNotAboveLevel { p: 3, m: 3 });
    }

    #[test]
    fn teichmuller_examples() {
        let f3 = FieldParams::prime_field(3).unwrap();
        let z9 = GRParams::build(&f3, 2).unwrap();
        assert_eq!(z9.teichmuller(&f3.from_u64(2)).coeffs(), &[8]);
        assert_eq!(z9.teichmuller(&f3.from_u64(0)).coeffs(), &[0]);
        assert_eq!(z9.teichmuller(&f3.from_u64(1)).coeffs(), &[1]);
        let r = gr92();
        assert_eq!(r.teichmuller(&r.field().generator()).coeffs(), &[0, 1]);
    }

    #[test]
    fn trace_examples() {
        let r = gr92();
        assert_eq!(r.generator().trace_to_base().unwrap(), 0);
        assert_eq!(r.from_u64(1).trace_to_base().unwrap(), 2);
    }

    #[test]
    fn invert_examples() {
        let f3 = FieldParams::prime_field(3).unwrap();
        let z9 = GRParams::build(&f3, 2).unwrap();
        assert_eq!(z9.from_u64(2).invert().unwrap().coeffs(), &[5]);
        assert_eq!(z9.from_u64(3).invert().unwrap_err(), RingError::NotAUnit);
        let r = gr92();
        assert_eq!(r.generator().invert().unwrap().coeffs(), &[0, 8]);
    }

    #[test]
    fn teichmuller_properties_exhaustive_gr92() {
        let r = gr92();
        let f = r.field().clone();
        for x in f.enumerate() {
            let tx = r.teichmuller(&x);
            assert_eq!(tx.pow(9), tx);
            assert_eq!(tx.reduce_mod_p(), x);
            // T^p = T(x^p) = σ(T)
            assert_eq!(tx.pow(3), r.teichmuller(&x.frobenius()));
            assert_eq!(tx.frobenius(), tx.pow(3));
            for b in 0..4u32 {
                assert_eq!(tx.pow(3u128.pow(b)).trace_to_base().unwrap(), tx.trace_to_base().unwrap());
            }
            for y in f.enumerate() {
                assert_eq!(&tx * &r.teichmuller(&y), r.teichmuller(&(&x * &y)));
            }
        }
    }

    #[test]
    fn sigma_is_automorphism_fixing_base() {
        let f = FieldParams::build(5, 3, None).unwrap();
        let r = GRParams::build(&f, 2).unwrap();
        let elems: Vec<_> = (0..40u64).map(|i| r.element(&[i * 7 % 25, i * i % 25, (3 * i + 1) % 25])).collect();
        for a in &elems {
            let mut c = a.clone();
            for _ in 0..3 {
                c = c.frobenius();
            }
            assert_eq!(&c, a);
            for b in elems.iter().take(6) {
                assert_eq!((a * b).frobenius(), &a.frobenius() * &b.frobenius());
                assert_eq!((a + b).frobenius(), &a.frobenius() + &b.frobenius());
                let tr = |x: &GaloisRingElement| x.trace_to_base().unwrap();
                assert_eq!(tr(&(a + b)), (tr(a) + tr(b)) % 25);
            }
            assert_eq!(a.frobenius().trace_to_base(), a.trace_to_base());
            assert_eq!(r.trace_raw(a.coeffs()), a.trace_to_base().unwrap());
        }
        assert_eq!(r.from_u64(4).frobenius(), r.from_u64(4));
    }

    #[test]
    fn p_power_expansion() {
        // (x + p y)^{p^t} ≡ x^{p^t} mod p^{min(t, m)}
        let f = FieldParams::build(5, 2, None).unwrap();
        let r = GRParams::build(&f, 3).unwrap();
        for i in 0..30u64 {
            let x = r.element(&[i % 125, (i * 13 + 2) % 125]);
            let y = r.element(&[(i * 31) % 125, (i * 17 + 5) % 125]);
            let xpy = &x + &y.scale(5);
            for t in 1..4u32 {
                let diff = &xpy.pow(5u128.pow(t)) - &x.pow(5u128.pow(t));
                let bound = 5u64.pow(t.min(3));
                assert!(diff.coeffs().iter().all(|c| c % bound == 0));
            }
        }
    }
}
