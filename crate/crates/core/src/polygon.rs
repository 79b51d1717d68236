//! Newton polygon of `L_f` and the Hodge-type lower bounds.
//!
//! Heights are normalised by `v(p) = 1`. The Hodge multiset over the
//! effective poles has `d + 2` slopes against a degree-`d` polynomial; the
//! comparison polygon keeps the `d` smallest, and the multiset itself is
//! always reported alongside.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::cyclotomic::CyclotomicNumber;
use crate::rational::{fmt_rat, Rational};
use crate::sum::ExponentialSum;

/// A convex lattice-abscissa polygon starting at `(0, 0)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatPolygon {
    /// Breakpoints, `x` strictly increasing, first vertex `(0, 0)`.
    pub vertices: Vec<(u64, Rational)>,
    /// One slope per unit of `x`, nondecreasing.
    pub slopes: Vec<Rational>,
}

impl RatPolygon {
    pub fn from_slopes(mut slopes: Vec<Rational>) -> Self {
        slopes.sort();
        let mut vertices = vec![(0, Rational::zero())];
        let mut y = Rational::zero();
        for (i, s) in slopes.iter().enumerate() {
            y += s;
            if slopes.get(i + 1) != Some(s) {
                vertices.push((i as u64 + 1, y.clone()));
            }
        }
        Self { vertices, slopes }
    }

    /// Lower convex hull of the points; the first point must be at `x = 0`.
    pub fn lower_hull(points: &[(u64, Rational)]) -> Self {
        let mut pts = points.to_vec();
        pts.sort_by_key(|pt| pt.0);
        assert!(pts.first().is_some_and(|pt| pt.0 == 0), "hull needs a point at x = 0");
        let mut hull: Vec<(u64, Rational)> = Vec::new();
        for pt in pts {
            while hull.len() >= 2 {
                let (x1, y1) = &hull[hull.len() - 2];
                let (x2, y2) = &hull[hull.len() - 1];
                // drop the middle point unless it lies strictly below the chord
                let lhs = (y2 - y1) * Rational::from_integer(BigInt::from(pt.0 - x1));
                let rhs = (&pt.1 - y1) * Rational::from_integer(BigInt::from(x2 - x1));
                if lhs >= rhs {
                    hull.pop();
                } else {
                    break;
                }
            }
            if hull.last().is_some_and(|h| h.0 == pt.0) {
                if pt.1 < hull.last().unwrap().1 {
                    hull.pop();
                } else {
                    continue;
                }
            }
            hull.push(pt);
        }
        let mut slopes = Vec::new();
        for w in hull.windows(2) {
            let dx = w[1].0 - w[0].0;
            let s = (&w[1].1 - &w[0].1) / Rational::from_integer(BigInt::from(dx));
            slopes.extend(std::iter::repeat_n(s, dx as usize));
        }
        let base = hull[0].1.clone();
        let mut poly = Self::from_slopes(slopes);
        for v in &mut poly.vertices {
            v.1 += &base;
        }
        poly
    }

    pub fn width(&self) -> u64 {
        self.slopes.len() as u64
    }

    pub fn value_at(&self, x: u64) -> Rational {
        let base = self.vertices[0].1.clone();
        base + self.slopes.iter().take(x as usize).sum::<Rational>()
    }

    pub fn scaled(&self, factor: &Rational) -> Self {
        Self {
            vertices: self.vertices.iter().map(|(x, y)| (*x, y * factor)).collect(),
            slopes: self.slopes.iter().map(|s| s * factor).collect(),
        }
    }

    /// `x,num,den` rows, one per vertex.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,num,den\n");
        for (x, y) in &self.vertices {
            let _ = writeln!(out, "{x},{},{}", y.numer(), y.denom());
        }
        out
    }

    pub fn slope_strings(&self) -> Vec<String> {
        self.slopes.iter().map(fmt_rat).collect()
    }
}

/// Newton polygon of `Σ c_n s^n` over the nonzero coefficients.
pub fn newton_polygon(coeffs: &[CyclotomicNumber]) -> RatPolygon {
    let points: Vec<(u64, Rational)> = coeffs
        .iter()
        .enumerate()
        .filter_map(|(n, c)| c.padic_valuation().map(|v| (n as u64, v)))
        .collect();
    RatPolygon::lower_hull(&points)
}

/// Experimentation knobs: slope `scale · a · (n - offset) / D_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HodgeOptions {
    pub offset: Rational,
    pub scale: Rational,
}

impl Default for HodgeOptions {
    fn default() -> Self {
        Self { offset: Rational::zero(), scale: Rational::one() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HodgeReport {
    /// `{a n / D_j : 0 ≤ n ≤ D_j}` per effective pole, in pole order.
    pub families: Vec<Vec<Rational>>,
    /// The `d` smallest slopes.
    pub comparison: RatPolygon,
    /// Drops one `0` from the family at `0` and one `a` from the family at
    /// `∞`; `None` when either is missing.
    pub dropped_variant: Option<RatPolygon>,
}

impl HodgeReport {
    pub fn multiset(&self) -> Vec<Rational> {
        let mut all: Vec<Rational> = self.families.iter().flatten().cloned().collect();
        all.sort();
        all
    }
}

fn families(sum: &ExponentialSum, opts: &HodgeOptions, weight: impl Fn(usize) -> Rational) -> Vec<Vec<Rational>> {
    let a = Rational::from_integer(BigInt::from(sum.field_degree()));
    sum.effective_poles()
        .iter()
        .enumerate()
        .map(|(idx, pole)| {
            let big_d = pole.max_degree;
            (0..=big_d)
                .map(|n| {
                    if big_d == 0 {
                        return Rational::zero();
                    }
                    let n = Rational::from_integer(BigInt::from(n)) - &opts.offset;
                    &opts.scale * &a * n / BigInt::from(big_d) * weight(idx)
                })
                .collect()
        })
        .collect()
}

fn smallest(all: &[Vec<Rational>], count: u64) -> RatPolygon {
    let mut flat: Vec<Rational> = all.iter().flatten().cloned().collect();
    flat.sort();
    flat.truncate(count as usize);
    RatPolygon::from_slopes(flat)
}

pub fn hodge_polygon(sum: &ExponentialSum, opts: &HodgeOptions) -> HodgeReport {
    let fams = families(sum, opts, |_| Rational::one());
    let d = sum.degree_formula();
    let comparison = smallest(&fams, d);
    let a = Rational::from_integer(BigInt::from(sum.field_degree()));
    let effective = sum.effective_poles();
    let mut trimmed = fams.clone();
    let zero_idx = effective.iter().position(|e| e.pole.is_zero());
    let inf_idx = effective.iter().position(|e| e.pole.is_infinity());
    let dropped_variant = match (zero_idx, inf_idx) {
        (Some(z), Some(i)) => {
            let zpos = trimmed[z].iter().position(Zero::is_zero);
            let ipos = trimmed[i].iter().position(|s| *s == a);
            match (zpos, ipos) {
                (Some(zp), Some(ip)) => {
                    trimmed[z].remove(zp);
                    trimmed[i].remove(ip);
                    Some(smallest(&trimmed, u64::MAX))
                }
                _ => None,
            }
        }
        _ => None,
    };
    HodgeReport { families: fams, comparison, dropped_variant }
}

/// `κ = (p - 1)(p - (m - i)) / p^2` for dominant level `i`.
pub fn truncation_factor(p: u64, m: u32, level: u32) -> Rational {
    let p_i = p as i64;
    Rational::new(BigInt::from((p_i - 1) * (p_i - (m as i64 - level as i64))), BigInt::from(p_i * p_i))
}

/// Slopes `κ_j a n / D_j`, the `d` smallest.
pub fn truncated_hodge_polygon(sum: &ExponentialSum) -> RatPolygon {
    let (p, m) = (sum.p(), sum.level());
    let effective = sum.effective_poles().to_vec();
    let fams = families(sum, &HodgeOptions::default(), |idx| {
        truncation_factor(p, m, effective[idx].dominant_level.unwrap_or(m - 1))
    });
    smallest(&fams, sum.degree_formula())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DominanceReport {
    pub above: bool,
    /// `min_x upper(x) - lower(x)` over the common range.
    pub worst_margin: Rational,
    pub worst_at: u64,
    pub checked_to: u64,
}

pub fn lies_above(upper: &RatPolygon, lower: &RatPolygon) -> DominanceReport {
    let checked_to = upper.width().min(lower.width());
    let (worst_at, worst_margin) = (0..=checked_to)
        .map(|x| (x, upper.value_at(x) - lower.value_at(x)))
        .min_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)))
        .expect("range is nonempty");
    DominanceReport { above: worst_margin >= Rational::zero(), worst_margin, worst_at, checked_to }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coincidence {
    pub applicable: bool,
    pub predicted: bool,
    /// `lcm_j d_{i_j, j}`.
    pub modulus: u64,
}

/// Applicable when every effective pole carries terms and `i_j = m - 1`;
/// predicted when `p ≡ 1 mod lcm_j d_{i_j, j}`.
pub fn coincidence_predicate(sum: &ExponentialSum) -> Coincidence {
    let m = sum.level();
    let effective = sum.effective_poles();
    let applicable = effective.iter().all(|e| e.dominant_level == Some(m - 1));
    let modulus = effective
        .iter()
        .filter_map(|e| e.dominant_degree())
        .fold(1u64, |acc, d| acc.lcm(&(d as u64)));
    Coincidence { applicable, predicted: sum.p() % modulus == 1 % modulus, modulus }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::sum::{RawPole, RawSum, RawTerm};
    use proptest::prelude::*;

    fn pts(v: &[(u64, i64, i64)]) -> Vec<(u64, Rational)> {
        v.iter().map(|&(x, n, d)| (x, rat(n, d))).collect()
    }

    fn build(p: u64, a: usize, m: u32, terms: &[(u32, usize, u32)]) -> ExponentialSum {
        let one = {
            let mut v = vec![0; a];
            v[0] = 1;
            v
        };
        ExponentialSum::validate(&RawSum {
            p,
            a,
            m,
            field_modulus: None,
            poles: vec![RawPole::Finite(vec![0; a]), RawPole::Infinity],
            terms: terms
                .iter()
                .map(|&(level, pole, exponent)| RawTerm { level, pole, exponent, coeff: one.clone() })
                .collect(),
            allow_empty: false,
        })
        .unwrap()
    }

    #[test]
    fn hull_examples() {
        let np = RatPolygon::lower_hull(&pts(&[(0, 0, 1), (1, 0, 1), (2, 1, 1)]));
        assert_eq!(np.slopes, vec![int(0), int(1)]);
        let np = RatPolygon::lower_hull(&pts(&[(0, 0, 1), (1, 0, 1), (2, 1, 1), (3, 3, 1)]));
        assert_eq!(np.vertices, pts(&[(0, 0, 1), (1, 0, 1), (2, 1, 1), (3, 3, 1)]));
        assert_eq!(np.slopes, vec![int(0), int(1), int(2)]);
        // interior point above the chord disappears
        let np = RatPolygon::lower_hull(&pts(&[(0, 0, 1), (1, 1, 1), (2, 1, 1)]));
        assert_eq!(np.slopes, vec![rat(1, 2), rat(1, 2)]);
        assert_eq!(np.vertices.len(), 2);
    }

    #[test]
    fn hodge_examples() {
        let s = build(3, 1, 1, &[(0, 0, 1), (0, 1, 1)]);
        let h = hodge_polygon(&s, &HodgeOptions::default());
        assert_eq!(h.families, vec![vec![int(0), int(1)], vec![int(0), int(1)]]);
        assert_eq!(h.comparison.slopes, vec![int(0), int(0)]);
        assert_eq!(h.dropped_variant.unwrap().slopes, vec![int(0), int(1)]);
        let s = build(7, 1, 1, &[(0, 0, 3), (0, 1, 1)]);
        let h = hodge_polygon(&s, &HodgeOptions::default());
        assert_eq!(h.families[0], vec![int(0), rat(1, 3), rat(2, 3), int(1)]);
        assert_eq!(h.families[1], vec![int(0), int(1)]);
        let s9 = build(3, 2, 1, &[(0, 0, 2), (0, 1, 1)]);
        let h9 = hodge_polygon(&s9, &HodgeOptions::default());
        assert_eq!(h9.families[0], vec![int(0), int(1), int(2)]);
    }

    #[test]
    fn truncation_factors() {
        assert_eq!(truncation_factor(3, 1, 0), rat(4, 9));
        assert_eq!(truncation_factor(3, 2, 0), rat(2, 9));
        let ks: Vec<Rational> = [5u64, 7, 11, 13].iter().map(|&p| truncation_factor(p, 2, 0)).collect();
        assert!(ks.windows(2).all(|w| w[0] < w[1]) && ks.iter().all(|k| *k < int(1)));
        let s = build(5, 1, 2, &[(0, 0, 1), (1, 1, 2)]);
        let t = truncated_hodge_polygon(&s);
        let h = hodge_polygon(&s, &HodgeOptions::default()).comparison;
        assert!(lies_above(&h, &t).above);
    }

    #[test]
    fn dominance_examples() {
        let np = RatPolygon::from_slopes(vec![rat(1, 2), rat(1, 2)]);
        let hp = RatPolygon::from_slopes(vec![int(0), int(1)]);
        let r = lies_above(&np, &hp);
        assert!(r.above && r.worst_margin.is_zero());
        assert!(lies_above(&hp, &hp).above);
        let r = lies_above(&hp, &np);
        assert!(!r.above);
        assert_eq!((r.worst_at, r.worst_margin), (1, rat(-1, 2)));
    }

    #[test]
    fn coincidence_examples() {
        let c = coincidence_predicate(&build(7, 1, 1, &[(0, 0, 3), (0, 1, 1)]));
        assert_eq!((c.applicable, c.predicted, c.modulus), (true, true, 3));
        let c = coincidence_predicate(&build(5, 1, 1, &[(0, 0, 3), (0, 1, 1)]));
        assert_eq!((c.applicable, c.predicted), (true, false));
        let c = coincidence_predicate(&build(3, 1, 2, &[(0, 0, 1), (1, 1, 1)]));
        assert!(!c.applicable);
    }

    #[test]
    fn csv_export() {
        let poly = RatPolygon::from_slopes(vec![int(0), rat(1, 3), rat(1, 3)]);
        assert_eq!(poly.to_csv(), "x,num,den\n0,0,1\n1,0,1\n3,2,3\n");
    }

    proptest! {
        #[test]
        fn hull_is_convex_and_below_points(ys in proptest::collection::vec((-20i64..20, 1i64..5), 1..10)) {
            let mut points = vec![(0u64, Rational::zero())];
            points.extend(ys.iter().enumerate().map(|(i, &(n, d))| (i as u64 + 1, rat(n, d))));
            let hull = RatPolygon::lower_hull(&points);
            prop_assert!(hull.slopes.windows(2).all(|w| w[0] <= w[1]));
            prop_assert_eq!(hull.vertices[0].clone(), (0, Rational::zero()));
            for (x, y) in &points {
                prop_assert!(hull.value_at(*x) <= *y);
            }
            for (x, y) in &hull.vertices {
                prop_assert!(points.contains(&(*x, y.clone())));
            }
        }

        #[test]
        fn hodge_multiset_ignores_pole_order(d0 in 1u32..5, d1 in 1u32..5, d2 in 1u32..5) {
            prop_assume!(d0 % 5 != 0 && d1 % 5 != 0 && d2 % 5 != 0);
            let make = |order: [usize; 3]| {
                let poles = [RawPole::Finite(vec![0]), RawPole::Infinity, RawPole::Finite(vec![3])];
                let degs = [d0, d1, d2];
                ExponentialSum::validate(&RawSum {
                    p: 5, a: 1, m: 1, field_modulus: None,
                    poles: order.iter().map(|&j| poles[j].clone()).collect(),
                    terms: (0..3).map(|pos| RawTerm { level: 0, pole: pos, exponent: degs[order[pos]], coeff: vec![1] }).collect(),
                    allow_empty: false,
                }).unwrap()
            };
            let a = hodge_polygon(&make([0, 1, 2]), &HodgeOptions::default());
            let b = hodge_polygon(&make([2, 0, 1]), &HodgeOptions::default());
            prop_assert_eq!(a.multiset(), b.multiset());
            prop_assert_eq!(a.comparison, b.comparison);
        }
    }
}
