//! Finite fields `F_{p^n} = F_p[X]/(f)`.
//!
//! The tower `F_q ⊂ F_{q^k}` is realised as two independent single
//! extensions of `F_p` joined by an explicit [`Embedding`]. Moduli and
//! embedding roots are chosen deterministically (lexicographically smallest
//! coefficient vector, constant term compared first), so every downstream
//! result is reproducible.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use thiserror::Error;

use crate::ring::{PolyRing, MAX_COEFF_MODULUS, MAX_DEGREE};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0:?} is reducible over F_p")]
    ReducibleModulus(Vec<u64>),
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("target degree {target} is not divisible by source degree {from}")]
    DegreeNotDivisible { from: usize, target: usize },
    #[error("no root of the source modulus in the target field")]
    NoRoot,
    #[error("field parameters out of supported range: {0}")]
    TooLarge(String),
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

// ---- dense polynomials over F_p (constant term first, trimmed) ----

pub(crate) mod fp_poly {
    pub fn trim(mut a: Vec<u64>) -> Vec<u64> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn inv_mod(a: u64, p: u64) -> u64 {
        // p prime, a nonzero
        let mut r = 1u64;
        let mut b = a % p;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        r
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        let out = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(out)
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        trim(out)
    }

    /// Quotient and remainder; `b` must be nonzero.
    pub fn divrem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
        let b = trim(b.to_vec());
        assert!(!b.is_empty(), "division by zero polynomial");
        let mut r = trim(a.to_vec());
        if r.len() < b.len() {
            return (Vec::new(), r);
        }
        let lead_inv = inv_mod(*b.last().unwrap(), p);
        let mut q = vec![0u64; r.len() - b.len() + 1];
        while r.len() >= b.len() {
            let shift = r.len() - b.len();
            let c = r.last().unwrap() * lead_inv % p;
            q[shift] = c;
            for (i, &bi) in b.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - bi * c % p) % p;
            }
            r = trim(r);
        }
        (trim(q), r)
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut x = trim(a.to_vec());
        let mut y = trim(b.to_vec());
        while !y.is_empty() {
            let (_, r) = divrem(&x, &y, p);
            x = y;
            y = r;
        }
        if let Some(&lead) = x.last() {
            let inv = inv_mod(lead, p);
            x.iter_mut().for_each(|c| *c = *c * inv % p);
        }
        x
    }

    /// Inverse of `a` modulo `f` (gcd must be 1).
    pub fn inverse_mod_poly(a: &[u64], f: &[u64], p: u64) -> Option<Vec<u64>> {
        let (mut r0, mut r1) = (trim(f.to_vec()), trim(a.to_vec()));
        let (mut s0, mut s1): (Vec<u64>, Vec<u64>) = (Vec::new(), vec![1]);
        if r1.is_empty() {
            return None;
        }
        while !r1.is_empty() {
            let (q, r) = divrem(&r0, &r1, p);
            let s = sub(&s0, &mul(&q, &s1, p), p);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        if r0.len() != 1 {
            return None;
        }
        let c = inv_mod(r0[0], p);
        Some(s0.into_iter().map(|x| x * c % p).collect())
    }
}

/// Ben-Or test: `f` of degree `n` is irreducible iff
/// `gcd(f, X^{p^i} - X) = 1` for `1 <= i <= n/2`.
pub fn is_irreducible(p: u64, f: &[u64]) -> bool {
    let f = fp_poly::trim(f.to_vec());
    let n = f.len().saturating_sub(1);
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    // make monic for the residue ring
    let inv = fp_poly::inv_mod(*f.last().unwrap(), p);
    let monic: Vec<u64> = f.iter().map(|c| c * inv % p).collect();
    let ring = PolyRing::new(p, monic.clone());
    let x = ring.gen();
    let mut power = x.clone();
    for _ in 1..=n / 2 {
        power = ring.pow(&power, p as u128);
        let diff = fp_poly::sub(&power, &x, p);
        let g = fp_poly::gcd(&monic, &diff, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

/// Parameters of `F_{p^n}`.
#[derive(Debug, PartialEq, Eq)]
pub struct FieldParams {
    p: u64,
    ring: PolyRing,
    /// Row `i` is `X^{i p}` reduced; Frobenius is linear over `F_p`.
    frobenius_matrix: Vec<Vec<u64>>,
}

impl FieldParams {
    /// Build `F_{p^n}` with the given monic modulus, or the lexicographically
    /// smallest monic irreducible of degree `n` when `modulus` is `None`.
    pub fn build(p: u64, n: usize, modulus: Option<Vec<u64>>) -> Result<Arc<Self>, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if p > MAX_COEFF_MODULUS {
            return Err(FieldError::TooLarge(format!("p = {p}")));
        }
        if n == 0 || n > MAX_DEGREE {
            return Err(FieldError::InvalidModulus(format!("degree {n} out of range")));
        }
        let modulus = match modulus {
            Some(f) => {
                if f.len() != n + 1 {
                    return Err(FieldError::InvalidModulus(format!(
                        "expected {} coefficients, got {}",
                        n + 1,
                        f.len()
                    )));
                }
                if f.iter().any(|&c| c >= p) {
                    return Err(FieldError::InvalidModulus("coefficient not reduced mod p".into()));
                }
                if f[n] != 1 {
                    return Err(FieldError::InvalidModulus("modulus is not monic".into()));
                }
                if !is_irreducible(p, &f) {
                    return Err(FieldError::ReducibleModulus(f));
                }
                f
            }
            None => smallest_irreducible(p, n)?,
        };
        Ok(Arc::new(Self::from_irreducible(p, modulus)))
    }

    pub fn prime_field(p: u64) -> Result<Arc<Self>, FieldError> {
        Self::build(p, 1, None)
    }

    fn from_irreducible(p: u64, modulus: Vec<u64>) -> Self {
        let ring = PolyRing::new(p, modulus);
        let n = ring.degree();
        let xp = ring.pow(&ring.gen(), p as u128);
        let mut frobenius_matrix = Vec::with_capacity(n);
        let mut row = ring.one();
        for _ in 0..n {
            frobenius_matrix.push(row.clone());
            row = ring.mul(&row, &xp);
        }
        Self { p, ring, frobenius_matrix }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.ring.degree()
    }

    /// Field size `p^n`, if it fits in a `u64`.
    pub fn order(&self) -> Option<u64> {
        self.p.checked_pow(self.degree() as u32)
    }

    /// Monic modulus, constant term first.
    pub fn modulus(&self) -> &[u64] {
        self.ring.poly()
    }

    pub(crate) fn ring(&self) -> &PolyRing {
        &self.ring
    }

    pub fn element(self: &Arc<Self>, coeffs: &[u64]) -> FFElement {
        FFElement { params: Arc::clone(self), coeffs: self.ring.reduce(coeffs) }
    }

    pub fn zero(self: &Arc<Self>) -> FFElement {
        FFElement { params: Arc::clone(self), coeffs: self.ring.zero() }
    }

    pub fn one(self: &Arc<Self>) -> FFElement {
        FFElement { params: Arc::clone(self), coeffs: self.ring.one() }
    }

    pub fn from_u64(self: &Arc<Self>, c: u64) -> FFElement {
        FFElement { params: Arc::clone(self), coeffs: self.ring.constant(c) }
    }

    pub fn generator(self: &Arc<Self>) -> FFElement {
        FFElement { params: Arc::clone(self), coeffs: self.ring.gen() }
    }

    /// Coefficient vector of the element with enumeration index `idx`
    /// (base-`p` digits, constant term least significant).
    pub fn coeffs_at_index(&self, mut idx: u64) -> Vec<u64> {
        let mut v = vec![0u64; self.degree()];
        for c in v.iter_mut() {
            *c = idx % self.p;
            idx /= self.p;
        }
        v
    }

    pub fn index_of(&self, coeffs: &[u64]) -> u64 {
        coeffs.iter().rev().fold(0u64, |acc, &c| acc * self.p + c)
    }

    /// All `p^n` elements in index order.
    pub fn enumerate(self: &Arc<Self>) -> impl Iterator<Item = FFElement> + '_ {
        let total = self.order().expect("field too large to enumerate");
        (0..total).map(move |i| FFElement { params: Arc::clone(self), coeffs: self.coeffs_at_index(i) })
    }

    pub(crate) fn frobenius_raw(&self, a: &[u64]) -> Vec<u64> {
        let n = self.degree();
        let mut out = vec![0u64; n];
        for (row, &c) in self.frobenius_matrix.iter().zip(a) {
            if c == 0 {
                continue;
            }
            for t in 0..n {
                out[t] += row[t] * c;
            }
        }
        out.iter().map(|x| x % self.p).collect()
    }

    pub(crate) fn inverse_raw(&self, a: &[u64]) -> Option<Vec<u64>> {
        if self.degree() == 1 {
            return (a[0] != 0).then(|| vec![fp_poly::inv_mod(a[0], self.p)]);
        }
        let inv = fp_poly::inverse_mod_poly(a, self.ring.poly(), self.p)?;
        Some(self.ring.reduce(&inv))
    }

    pub(crate) fn trace_raw(&self, a: &[u64]) -> u64 {
        let mut acc = a.to_vec();
        let mut conj = a.to_vec();
        for _ in 1..self.degree() {
            conj = self.frobenius_raw(&conj);
            acc = self.ring.add(&acc, &conj);
        }
        assert!(acc[1..].iter().all(|&c| c == 0), "trace left the prime field");
        acc[0]
    }
}

fn smallest_irreducible(p: u64, n: usize) -> Result<Vec<u64>, FieldError> {
    let count = p
        .checked_pow(n as u32)
        .ok_or_else(|| FieldError::TooLarge(format!("{p}^{n} candidate moduli")))?;
    // index digits are read with c_0 most significant so that index order is
    // lexicographic order on (c_0, c_1, ..., c_{n-1})
    for idx in 0..count {
        let mut f = vec![0u64; n + 1];
        let mut rest = idx;
        for i in (0..n).rev() {
            f[i] = rest % p;
            rest /= p;
        }
        f[n] = 1;
        if is_irreducible(p, &f) {
            return Ok(f);
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// An element of `F_{p^n}`.
#[derive(Clone, PartialEq, Eq)]
pub struct FFElement {
    params: Arc<FieldParams>,
    coeffs: Vec<u64>,
}

impl fmt::Debug for FFElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FF{:?}", self.coeffs)
    }
}

impl FFElement {
    pub fn params(&self) -> &Arc<FieldParams> {
        &self.params
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.params.ring.is_zero(&self.coeffs)
    }

    pub fn pow(&self, e: u128) -> Self {
        self.with(self.params.ring.pow(&self.coeffs, e))
    }

    /// The `p`-power map.
    pub fn frobenius(&self) -> Self {
        self.with(self.params.frobenius_raw(&self.coeffs))
    }

    /// `x^(p^times)`; `times` may exceed the degree.
    pub fn frobenius_pow(&self, times: usize) -> Self {
        let mut c = self.coeffs.clone();
        for _ in 0..times % self.params.degree() {
            c = self.params.frobenius_raw(&c);
        }
        self.with(c)
    }

    pub fn inverse(&self) -> Option<Self> {
        self.params.inverse_raw(&self.coeffs).map(|c| self.with(c))
    }

    /// `sum_{r < n} x^{p^r}` as an element of `F_p`.
    pub fn trace_to_prime(&self) -> u64 {
        self.params.trace_raw(&self.coeffs)
    }

    /// The constant coefficient, when the element lies in `F_p`.
    pub fn as_prime(&self) -> Option<u64> {
        self.coeffs[1..].iter().all(|&c| c == 0).then_some(self.coeffs[0])
    }

    fn with(&self, coeffs: Vec<u64>) -> Self {
        Self { params: Arc::clone(&self.params), coeffs }
    }

    fn check(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.params, &other.params) || self.params == other.params,
            "field mismatch"
        );
    }
}

impl Add for &FFElement {
    type Output = FFElement;
    fn add(self, rhs: &FFElement) -> FFElement {
        self.check(rhs);
        self.with(self.params.ring.add(&self.coeffs, &rhs.coeffs))
    }
}

impl Sub for &FFElement {
    type Output = FFElement;
    fn sub(self, rhs: &FFElement) -> FFElement {
        self.check(rhs);
        self.with(self.params.ring.sub(&self.coeffs, &rhs.coeffs))
    }
}

impl Mul for &FFElement {
    type Output = FFElement;
    fn mul(self, rhs: &FFElement) -> FFElement {
        self.check(rhs);
        self.with(self.params.ring.mul(&self.coeffs, &rhs.coeffs))
    }
}

impl Neg for &FFElement {
    type Output = FFElement;
    fn neg(self) -> FFElement {
        self.with(self.params.ring.neg(&self.coeffs))
    }
}

/// Gaussian elimination over `F_p`: basis of `{v : M v = 0}` where `rows`
/// are the rows of `M` (each of length `cols`).
fn nullspace_mod_p(mut rows: Vec<Vec<u64>>, cols: usize, p: u64) -> Vec<Vec<u64>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..rows.len()).find(|&i| rows[i][c] != 0) else { continue };
        rows.swap(r, pr);
        let inv = fp_poly::inv_mod(rows[r][c], p);
        rows[r].iter_mut().for_each(|x| *x = *x * inv % p);
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[c] != 0 {
                let factor = row[c];
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x = (*x + p - factor * y % p) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0u64; cols];
            v[f] = 1;
            for (ri, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - rows[ri][f]) % p;
            }
            v
        })
        .collect()
}

/// Field embedding `F_{p^a} -> F_{p^N}` sending the source generator to the
/// lexicographically smallest root of the source modulus.
#[derive(Debug, Clone)]
pub struct Embedding {
    source: Arc<FieldParams>,
    target: Arc<FieldParams>,
    root_powers: Vec<Vec<u64>>,
}

impl Embedding {
    pub fn new(source: &Arc<FieldParams>, target: &Arc<FieldParams>) -> Result<Self, FieldError> {
        if source.p != target.p || !target.degree().is_multiple_of(source.degree()) {
            return Err(FieldError::DegreeNotDivisible {
                from: source.degree(),
                target: target.degree(),
            });
        }
        let a = source.degree();
        let n = target.degree();
        let p = source.p;
        let root = if a == 1 {
            // the image of the generator is the root of X - c
            target.ring.constant(source.ring.gen()[0])
        } else if **source == **target {
            target.ring.gen()
        } else {
            // F_{p^a} inside F_{p^N} is the kernel of y -> y^{p^a} - y
            let mut frob_a: Vec<Vec<u64>> = (0..n)
                .map(|i| {
                    let mut e = vec![0u64; n];
                    e[i] = 1;
                    for _ in 0..a {
                        e = target.frobenius_raw(&e);
                    }
                    e
                })
                .collect();
            for (i, col) in frob_a.iter_mut().enumerate() {
                col[i] = (col[i] + p - 1) % p;
            }
            // frob_a[i] is the image of basis vector i (a column); transpose
            let rows: Vec<Vec<u64>> = (0..n).map(|r| (0..n).map(|c| frob_a[c][r]).collect()).collect();
            let basis = nullspace_mod_p(rows, n, p);
            debug_assert_eq!(basis.len(), a);
            let total = p.pow(a as u32);
            let mut best: Option<Vec<u64>> = None;
            for idx in 0..total {
                let mut rest = idx;
                let mut y = vec![0u64; n];
                for b in &basis {
                    let c = rest % p;
                    rest /= p;
                    for t in 0..n {
                        y[t] = (y[t] + c * b[t]) % p;
                    }
                }
                let value = target.ring.eval_scalar_poly(source.ring.poly(), &y);
                if target.ring.is_zero(&value) && best.as_ref().is_none_or(|b| y < *b) {
                    best = Some(y);
                }
            }
            best.ok_or(FieldError::NoRoot)?
        };
        let mut root_powers = Vec::with_capacity(a);
        let mut acc = target.ring.one();
        for _ in 0..a {
            root_powers.push(acc.clone());
            acc = target.ring.mul(&acc, &root);
        }
        Ok(Self { source: Arc::clone(source), target: Arc::clone(target), root_powers })
    }

    pub fn source(&self) -> &Arc<FieldParams> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FieldParams> {
        &self.target
    }

    /// Image of the source generator.
    pub fn root(&self) -> FFElement {
        let a = self.source.degree();
        if a == 1 {
            return self.target.element(&self.target.ring.constant(self.source.ring.gen()[0]));
        }
        self.target.element(&self.root_powers[1])
    }

    pub(crate) fn apply_raw(&self, x: &[u64]) -> Vec<u64> {
        let p = self.target.p;
        let mut out = vec![0u64; self.target.degree()];
        for (c, pw) in x.iter().zip(&self.root_powers) {
            for t in 0..out.len() {
                out[t] = (out[t] + c * pw[t]) % p;
            }
        }
        out
    }

    pub fn apply(&self, x: &FFElement) -> FFElement {
        assert!(*x.params == *self.source, "element is not in the embedding source");
        FFElement { params: Arc::clone(&self.target), coeffs: self.apply_raw(&x.coeffs) }
    }
}

/// Embed `x` into `target` via the canonical [`Embedding`].
pub fn embed(x: &FFElement, target: &Arc<FieldParams>) -> Result<FFElement, FieldError> {
    if *x.params == **target {
        return Ok(FFElement { params: Arc::clone(target), coeffs: x.coeffs.clone() });
    }
    Ok(Embedding::new(&x.params, target)?.apply(x))
}
