//! Dense residue rings `(Z/N)[X]/(F)` with `F` monic.
//!
//! Both the finite fields `F_{p^n}` (`N = p`) and the Galois rings
//! `GR(p^m, n)` (`N = p^m`) are instances. Elements are plain coefficient
//! vectors of length `n`, constant term first; the typed wrappers live in
//! [`crate::finite_field`] and [`crate::galois_ring`].

/// Largest coefficient modulus accepted. Keeps every intermediate product
/// sum inside `u64` for degrees up to [`MAX_DEGREE`].
pub const MAX_COEFF_MODULUS: u64 = 1 << 24;
pub const MAX_DEGREE: usize = 256;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct PolyRing {
    modulus: u64,
    /// Monic defining polynomial, length `n + 1`.
    poly: Vec<u64>,
}

impl PolyRing {
    pub(crate) fn new(modulus: u64, poly: Vec<u64>) -> Self {
        assert!((2..=MAX_COEFF_MODULUS).contains(&modulus));
        assert!(poly.len() >= 2 && poly.len() <= MAX_DEGREE + 1);
        assert_eq!(*poly.last().unwrap(), 1, "defining polynomial must be monic");
        let poly = poly.into_iter().map(|c| c % modulus).collect();
        Self { modulus, poly }
    }

    #[inline]
    pub(crate) fn modulus(&self) -> u64 {
        self.modulus
    }

    #[inline]
    pub(crate) fn degree(&self) -> usize {
        self.poly.len() - 1
    }

    pub(crate) fn poly(&self) -> &[u64] {
        &self.poly
    }

    pub(crate) fn zero(&self) -> Vec<u64> {
        vec![0; self.degree()]
    }

    pub(crate) fn constant(&self, c: u64) -> Vec<u64> {
        let mut v = self.zero();
        v[0] = c % self.modulus;
        v
    }

    pub(crate) fn one(&self) -> Vec<u64> {
        self.constant(1)
    }

    /// The class of `X`.
    pub(crate) fn gen(&self) -> Vec<u64> {
        let n = self.degree();
        if n == 1 {
            vec![(self.modulus - self.poly[0]) % self.modulus]
        } else {
            let mut v = self.zero();
            v[1] = 1;
            v
        }
    }

    /// Reduce an arbitrary coefficient vector (any length) into the ring.
    pub(crate) fn reduce(&self, coeffs: &[u64]) -> Vec<u64> {
        let mut wide: Vec<u64> = coeffs.iter().map(|c| c % self.modulus).collect();
        if wide.len() < self.degree() {
            wide.resize(self.degree(), 0);
            return wide;
        }
        self.reduce_wide(&mut wide)
    }

    /// Reduce a wide vector whose entries are bounded by roughly `2^56`.
    fn reduce_wide(&self, wide: &mut [u64]) -> Vec<u64> {
        let n = self.degree();
        let m = self.modulus;
        for i in (n..wide.len()).rev() {
            let c = wide[i] % m;
            wide[i] = 0;
            if c == 0 {
                continue;
            }
            let base = i - n;
            for t in 0..n {
                let f = self.poly[t];
                if f != 0 {
                    // X^n = -(f_0 + ... + f_{n-1} X^{n-1})
                    wide[base + t] = (wide[base + t] + (m - f) * c) % m;
                }
            }
        }
        wide[..n].iter().map(|c| c % m).collect()
    }

    #[inline]
    pub(crate) fn is_zero(&self, a: &[u64]) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub(crate) fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let m = self.modulus;
        a.iter().zip(b).map(|(x, y)| (x + y) % m).collect()
    }

    pub(crate) fn add_assign(&self, a: &mut [u64], b: &[u64]) {
        let m = self.modulus;
        for (x, y) in a.iter_mut().zip(b) {
            *x = (*x + y) % m;
        }
    }

    pub(crate) fn sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let m = self.modulus;
        a.iter().zip(b).map(|(x, y)| (x + m - y) % m).collect()
    }

    pub(crate) fn neg(&self, a: &[u64]) -> Vec<u64> {
        let m = self.modulus;
        a.iter().map(|x| (m - x) % m).collect()
    }

    pub(crate) fn scale(&self, a: &[u64], c: u64) -> Vec<u64> {
        let m = self.modulus;
        let c = c % m;
        a.iter().map(|x| x * c % m).collect()
    }

    pub(crate) fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let n = self.degree();
        if n == 1 {
            return vec![a[0] * b[0] % self.modulus];
        }
        let mut wide = vec![0u64; 2 * n - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                wide[i + j] += x * y;
            }
            // keep accumulators far from overflow on long rows
            if i % 64 == 63 {
                for w in wide.iter_mut() {
                    *w %= self.modulus;
                }
            }
        }
        self.reduce_wide(&mut wide)
    }

    pub(crate) fn square(&self, a: &[u64]) -> Vec<u64> {
        self.mul(a, a)
    }

    pub(crate) fn pow(&self, a: &[u64], mut e: u128) -> Vec<u64> {
        let mut result = self.one();
        let mut base = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(&result, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.square(&base);
            }
        }
        result
    }

    /// `a^(p^times)` by repeated `p`-th powers; avoids huge exponents.
    pub(crate) fn pow_prime_power(&self, a: &[u64], p: u64, times: usize) -> Vec<u64> {
        let mut x = a.to_vec();
        for _ in 0..times {
            x = self.pow(&x, p as u128);
        }
        x
    }

    /// Evaluate a polynomial with coefficients in `Z/N` (constant first) at `at`.
    pub(crate) fn eval_scalar_poly(&self, coeffs: &[u64], at: &[u64]) -> Vec<u64> {
        let mut acc = self.zero();
        for &c in coeffs.iter().rev() {
            acc = self.mul(&acc, at);
            acc[0] = (acc[0] + c % self.modulus) % self.modulus;
        }
        acc
    }
}
