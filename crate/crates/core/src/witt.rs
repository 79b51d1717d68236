//! Truncated Witt vectors `W_m(F_q)`.
//!
//! Addition and multiplication use the universal polynomials, obtained
//! over `Z` from the ghost-component recursion and reduced mod `p`. The
//! isomorphism with the Galois ring is [`omega`].

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::finite_field::{FFElement, FieldParams};
use crate::galois_ring::{GRParams, GaloisRingElement};

pub const MAX_WITT_LENGTH: u32 = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WittError {
    #[error("Witt length {0} outside 1..={max}", max = MAX_WITT_LENGTH)]
    Length(u32),
    #[error("parameter mismatch: {0}")]
    Mismatch(&'static str),
    #[error("ghost recursion produced a non-integral coefficient in component {0}")]
    NonIntegral(usize),
    #[error("trace coordinate {0} left the prime field")]
    TraceNotPrime(usize),
}

/// Sparse polynomial over `Z` in `2m` variables `X_0..X_{m-1}, Y_0..Y_{m-1}`.
type IntPoly = HashMap<Vec<u32>, BigInt>;

fn poly_mul(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let mut out = IntPoly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            *out.entry(e).or_insert_with(BigInt::zero) += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn poly_pow(a: &IntPoly, mut e: u64, vars: usize) -> IntPoly {
    let mut result = IntPoly::from([(vec![0; vars], BigInt::one())]);
    let mut base = a.clone();
    while e > 0 {
        if e & 1 == 1 {
            result = poly_mul(&result, &base);
        }
        e >>= 1;
        if e > 0 {
            base = poly_mul(&base, &base);
        }
    }
    result
}

fn poly_add_scaled(acc: &mut IntPoly, a: &IntPoly, c: &BigInt) {
    for (e, x) in a {
        *acc.entry(e.clone()).or_insert_with(BigInt::zero) += x * c;
    }
    acc.retain(|_, c| !c.is_zero());
}

/// `w_n = Σ_{i≤n} p^i V_i^{p^{n-i}}` in the variables starting at `offset`.
fn ghost(p: u64, n: usize, offset: usize, vars: usize) -> IntPoly {
    let mut out = IntPoly::new();
    for i in 0..=n {
        let mut e = vec![0; vars];
        e[offset + i] = p.pow((n - i) as u32) as u32;
        out.insert(e, BigInt::from(p).pow(i as u32));
    }
    out
}

/// A polynomial over `F_p` as a list of `(exponents, coefficient)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedPoly {
    pub terms: Vec<(Vec<u32>, u64)>,
}

impl ReducedPoly {
    fn from_int(p: u64, poly: &IntPoly) -> Self {
        let pb = BigInt::from(p);
        let mut terms: Vec<(Vec<u32>, u64)> = poly
            .iter()
            .filter_map(|(e, c)| {
                let r = c.mod_floor(&pb).to_u64().expect("residue fits");
                (r != 0).then(|| (e.clone(), r))
            })
            .collect();
        terms.sort();
        Self { terms }
    }

    pub fn max_exponent(&self) -> u32 {
        self.terms.iter().flat_map(|(e, _)| e.iter().copied()).max().unwrap_or(0)
    }
}

/// Witt sum and product polynomials for `W_m` over `F_p`.
#[derive(Debug)]
pub struct WittUniversalPolys {
    pub p: u64,
    pub m: u32,
    pub sum: Vec<ReducedPoly>,
    pub product: Vec<ReducedPoly>,
    /// `(sum, product)` largest exponent of any variable.
    top: (usize, usize),
    /// `F_p`, the field of the traced coordinates.
    prime: Arc<FieldParams>,
}

impl WittUniversalPolys {
    fn compute(p: u64, m: u32) -> Result<Self, WittError> {
        let len = m as usize;
        let vars = 2 * len;
        let build = |combine: &dyn Fn(&IntPoly, &IntPoly) -> IntPoly| -> Result<Vec<IntPoly>, WittError> {
            let mut found: Vec<IntPoly> = Vec::with_capacity(len);
            for n in 0..len {
                let mut rhs = combine(&ghost(p, n, 0, vars), &ghost(p, n, len, vars));
                for (i, prev) in found.iter().enumerate() {
                    let pw = poly_pow(prev, p.pow((n - i) as u32), vars);
                    poly_add_scaled(&mut rhs, &pw, &-BigInt::from(p).pow(i as u32));
                }
                let pn = BigInt::from(p).pow(n as u32);
                for c in rhs.values_mut() {
                    let (q, r) = c.div_rem(&pn);
                    if !r.is_zero() {
                        return Err(WittError::NonIntegral(n));
                    }
                    *c = q;
                }
                found.push(rhs);
            }
            Ok(found)
        };
        let sum_int = build(&|x, y| {
            let mut s = x.clone();
            poly_add_scaled(&mut s, y, &BigInt::one());
            s
        })?;
        let product_int = build(&poly_mul)?;
        let sum: Vec<ReducedPoly> = sum_int.iter().map(|q| ReducedPoly::from_int(p, q)).collect();
        let product: Vec<ReducedPoly> = product_int.iter().map(|q| ReducedPoly::from_int(p, q)).collect();
        let top = |polys: &[ReducedPoly]| polys.iter().map(ReducedPoly::max_exponent).max().unwrap_or(0) as usize;
        let prime = FieldParams::prime_field(p).map_err(|_| WittError::Mismatch("p is not prime"))?;
        Ok(Self { p, m, top: (top(&sum), top(&product)), sum, product, prime })
    }
}

type Cache = Mutex<HashMap<(u64, u32), Arc<WittUniversalPolys>>>;

/// Cached per `(p, m)`.
pub fn universal_polys(p: u64, m: u32) -> Result<Arc<WittUniversalPolys>, WittError> {
    if m == 0 || m > MAX_WITT_LENGTH {
        return Err(WittError::Length(m));
    }
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().expect("cache poisoned").get(&(p, m)) {
        return Ok(Arc::clone(hit));
    }
    let polys = Arc::new(WittUniversalPolys::compute(p, m)?);
    Ok(Arc::clone(cache.lock().expect("cache poisoned").entry((p, m)).or_insert(polys)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WittVector {
    coords: Vec<FFElement>,
}

impl WittVector {
    pub fn new(coords: Vec<FFElement>) -> Result<Self, WittError> {
        let len = coords.len() as u32;
        if len == 0 || len > MAX_WITT_LENGTH {
            return Err(WittError::Length(len));
        }
        if coords.iter().any(|c| c.params() != coords[0].params()) {
            return Err(WittError::Mismatch("coordinates in different fields"));
        }
        Ok(Self { coords })
    }

    pub fn zero(field: &Arc<FieldParams>, m: u32) -> Self {
        Self { coords: vec![field.zero(); m as usize] }
    }

    pub fn one(field: &Arc<FieldParams>, m: u32) -> Self {
        let mut z = Self::zero(field, m);
        z.coords[0] = field.one();
        z
    }

    /// `V^shift(a, 0, ...)`.
    pub fn shifted(a: &FFElement, shift: u32, m: u32) -> Self {
        let mut z = Self::zero(a.params(), m);
        if shift < m {
            z.coords[shift as usize] = a.clone();
        }
        z
    }

    pub fn coords(&self) -> &[FFElement] {
        &self.coords
    }

    pub fn len(&self) -> u32 {
        self.coords.len() as u32
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn field(&self) -> &Arc<FieldParams> {
        self.coords[0].params()
    }

    fn check(&self, other: &Self) -> Result<(), WittError> {
        if self.len() != other.len() {
            return Err(WittError::Mismatch("Witt lengths differ"));
        }
        if self.field() != other.field() {
            return Err(WittError::Mismatch("residue fields differ"));
        }
        Ok(())
    }

    fn apply(&self, other: &Self, polys: &[ReducedPoly], top: usize) -> Self {
        let field = self.field();
        let vars: Vec<&FFElement> = self.coords.iter().chain(&other.coords).collect();
        let powers: Vec<Vec<FFElement>> = vars
            .iter()
            .map(|v| {
                let mut row = Vec::with_capacity(top + 1);
                row.push(field.one());
                for k in 1..=top {
                    let next = &row[k - 1] * *v;
                    row.push(next);
                }
                row
            })
            .collect();
        let coords = polys
            .iter()
            .map(|poly| {
                poly.terms.iter().fold(field.zero(), |acc, (exps, c)| {
                    let mono = exps
                        .iter()
                        .enumerate()
                        .filter(|(_, &e)| e > 0)
                        .fold(field.from_u64(*c), |t, (v, &e)| &t * &powers[v][e as usize]);
                    &acc + &mono
                })
            })
            .collect();
        Self { coords }
    }
}

pub fn witt_add(x: &WittVector, y: &WittVector) -> Result<WittVector, WittError> {
    x.check(y)?;
    let polys = universal_polys(x.field().p(), x.len())?;
    Ok(x.apply(y, &polys.sum, polys.top.0))
}

pub fn witt_mul(x: &WittVector, y: &WittVector) -> Result<WittVector, WittError> {
    x.check(y)?;
    let polys = universal_polys(x.field().p(), x.len())?;
    Ok(x.apply(y, &polys.product, polys.top.1))
}

/// Shift right by one; the top coordinate falls off.
pub fn verschiebung(x: &WittVector) -> WittVector {
    let mut coords = Vec::with_capacity(x.coords.len());
    coords.push(x.field().zero());
    coords.extend_from_slice(&x.coords[..x.coords.len() - 1]);
    WittVector { coords }
}

/// Coordinatewise field Frobenius.
pub fn witt_frobenius_galois(x: &WittVector) -> WittVector {
    WittVector { coords: x.coords.iter().map(FFElement::frobenius).collect() }
}

/// Witt sum of all Galois conjugates, as a vector over the prime field.
pub fn witt_trace(x: &WittVector) -> Result<WittVector, WittError> {
    let polys = universal_polys(x.field().p(), x.len())?;
    let mut acc = x.clone();
    let mut conj = x.clone();
    for _ in 1..x.field().degree() {
        conj = witt_frobenius_galois(&conj);
        acc = acc.apply(&conj, &polys.sum, polys.top.0);
    }
    let prime = &polys.prime;
    let coords = acc
        .coords
        .iter()
        .enumerate()
        .map(|(i, c)| c.as_prime().map(|v| prime.from_u64(v)).ok_or(WittError::TraceNotPrime(i)))
        .collect::<Result<_, _>>()?;
    Ok(WittVector { coords })
}

/// `Σ p^i [x_i^{p^{-i}}]` in the Galois ring of matching level and field.
pub fn omega(x: &WittVector, ring: &Arc<GRParams>) -> Result<GaloisRingElement, WittError> {
    if ring.level() != x.len() {
        return Err(WittError::Mismatch("Witt length differs from Galois ring level"));
    }
    if **ring.field() != **x.field() {
        return Err(WittError::Mismatch("residue fields differ"));
    }
    let n = ring.degree();
    let mut acc = ring.from_u64(0);
    let mut weight = 1u64;
    for (i, c) in x.coords.iter().enumerate() {
        let root = c.frobenius_pow((n - i % n) % n);
        acc = &acc + &ring.teichmuller(&root).scale(weight);
        weight *= ring.p();
    }
    Ok(acc)
}
