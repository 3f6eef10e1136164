//! Grassmann numbers with coefficients in any additive ring-like type.
//!
//! A monomial is a bitmask over odd generators; the bits are read in increasing
//! order, so mask `0b101` is `t0 t2`. Coefficients are treated as even.

use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};

use crate::group::{AlgebraElement, CMat};

/// Maximum number of odd generators.
pub const MAX_GENERATORS: u32 = 32;

/// Coefficient types usable in [`Grassmann`].
pub trait Coefficient: Clone {
    fn add(&self, o: &Self) -> Self;
    fn scale(&self, s: f64) -> Self;
    fn magnitude(&self) -> f64;
}

impl Coefficient for f64 {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn scale(&self, s: f64) -> Self {
        self * s
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Coefficient for AlgebraElement {
    fn add(&self, o: &Self) -> Self {
        *self + *o
    }
    fn scale(&self, s: f64) -> Self {
        *self * s
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl Coefficient for CMat {
    fn add(&self, o: &Self) -> Self {
        *self + *o
    }
    fn scale(&self, s: f64) -> Self {
        CMat::scale(*self, s)
    }
    fn magnitude(&self) -> f64 {
        self.max_abs()
    }
}

/// Sign of `m1 * m2` after sorting, or `0` when they share a generator.
pub fn monomial_sign(m1: u32, m2: u32) -> i32 {
    if m1 & m2 != 0 {
        return 0;
    }
    let swaps: u32 = bits(m2).map(|b| (m1 >> (b + 1)).count_ones()).sum();
    if swaps.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn bits(m: u32) -> impl Iterator<Item = u32> {
    (0..MAX_GENERATORS).filter(move |b| m >> b & 1 == 1)
}

/// Mask with a single generator.
pub fn gen(i: u32) -> u32 {
    assert!(i < MAX_GENERATORS, "generator index {i} out of range");
    1 << i
}

/// A finite sum of coefficient-times-monomial terms.
#[derive(Clone, Debug, PartialEq)]
pub struct Grassmann<T> {
    terms: BTreeMap<u32, T>,
}

impl<T: Coefficient> Default for Grassmann<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Coefficient> Grassmann<T> {
    pub fn zero() -> Self {
        Grassmann {
            terms: BTreeMap::new(),
        }
    }

    /// The element `c * m`.
    pub fn monomial(mask: u32, c: T) -> Self {
        let mut g = Self::zero();
        g.terms.insert(mask, c);
        g
    }

    pub fn scalar(c: T) -> Self {
        Self::monomial(0, c)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &T)> {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    pub fn coefficient(&self, mask: u32) -> Option<&T> {
        self.terms.get(&mask)
    }

    pub fn add_term(&mut self, mask: u32, c: T) {
        match self.terms.get_mut(&mask) {
            Some(old) => *old = old.add(&c),
            None => {
                self.terms.insert(mask, c);
            }
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|c| c.scale(s))
    }

    pub fn map<U: Coefficient>(&self, f: impl Fn(&T) -> U) -> Grassmann<U> {
        Grassmann {
            terms: self.terms.iter().map(|(m, c)| (*m, f(c))).collect(),
        }
    }

    /// Largest coefficient magnitude, the norm used by residual checks.
    pub fn max_norm(&self) -> f64 {
        self.terms.values().map(Coefficient::magnitude).fold(0.0, f64::max)
    }

    /// Terms whose monomial lies inside `mask`.
    pub fn restrict(&self, mask: u32) -> Self {
        Grassmann {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| *m & !mask == 0)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Parity of the monomials, `None` if mixed.
    pub fn parity(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|m| m.count_ones() % 2);
        let first = it.next().unwrap_or(0);
        it.all(|p| p == first).then_some(first)
    }

    /// The element `Y` with `self|_{sel} = Y * s` for a monomial `s` inside `sel`,
    /// where `sel` marks the generators being factored out on the right.
    /// Terms whose restriction to `sel` differs from `s` are dropped.
    pub fn right_factor(&self, s: u32, sel: u32) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            if m & sel != s {
                continue;
            }
            let rest = m & !s;
            let sign = monomial_sign(rest, s);
            out.add_term(rest, c.scale(sign as f64));
        }
        out
    }

    /// Total left derivative `sum_i d/d t_i` over the generators in `sel`, which is
    /// the simultaneous-shift derivative `d/de f(t + e)`.
    pub fn shift_derivative(&self, sel: u32) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            for b in bits(m & sel) {
                let below = (m & ((1u32 << b) - 1)).count_ones();
                let sign = if below.is_multiple_of(2) { 1.0 } else { -1.0 };
                out.add_term(m & !(1 << b), c.scale(sign));
            }
        }
        out
    }

    /// Substitutes `t_orig -> t_new` for the listed generators (an injective relabeling).
    pub fn relabel(&self, map: &[(u32, u32)]) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            // rebuild the monomial generator by generator to track the sign
            let mut acc: (u32, i32) = (0, 1);
            for b in bits(*m) {
                let nb = map.iter().find(|(o, _)| *o == b).map_or(b, |(_, n)| *n);
                let s = monomial_sign(acc.0, 1 << nb);
                if s == 0 {
                    acc.1 = 0;
                    break;
                }
                acc = (acc.0 | 1 << nb, acc.1 * s);
            }
            if acc.1 != 0 {
                out.add_term(acc.0, c.scale(acc.1 as f64));
            }
        }
        out
    }

    /// Bilinear product through a coefficient pairing.
    pub fn product<U: Coefficient, V: Coefficient>(
        &self,
        o: &Grassmann<U>,
        op: impl Fn(&T, &U) -> V,
    ) -> Grassmann<V> {
        let mut out = Grassmann::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let s = monomial_sign(*m1, *m2);
                if s != 0 {
                    out.add_term(m1 | m2, op(c1, c2).scale(s as f64));
                }
            }
        }
        out
    }

    /// Multiplies by a plain Grassmann number (real coefficients).
    pub fn times(&self, o: &Grassmann<f64>) -> Self {
        self.product(o, |c, s| c.scale(*s))
    }
}

impl Grassmann<f64> {
    /// A single generator with coefficient one.
    pub fn generator(i: u32) -> Self {
        Self::monomial(gen(i), 1.0)
    }

    pub fn one() -> Self {
        Self::scalar(1.0)
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.product(o, |a, b| a * b)
    }
}

impl Grassmann<CMat> {
    pub fn matmul(&self, o: &Self) -> Self {
        self.product(o, |a, b| *a * *b)
    }
}

impl<T: Coefficient> Add for &Grassmann<T> {
    type Output = Grassmann<T>;
    fn add(self, o: &Grassmann<T>) -> Grassmann<T> {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl<T: Coefficient> Neg for &Grassmann<T> {
    type Output = Grassmann<T>;
    fn neg(self) -> Grassmann<T> {
        self.scale(-1.0)
    }
}

impl<T: Coefficient> Sub for &Grassmann<T> {
    type Output = Grassmann<T>;
    fn sub(self, o: &Grassmann<T>) -> Grassmann<T> {
        self + &(-o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(i: u32) -> Grassmann<f64> {
        Grassmann::generator(i)
    }

    #[test]
    fn generators_anticommute() {
        assert_eq!(t(0).mul(&t(0)).max_norm(), 0.0);
        let a = t(0).mul(&t(1));
        let b = t(1).mul(&t(0));
        assert_eq!(a.coefficient(0b11), Some(&1.0));
        assert_eq!(b.coefficient(0b11), Some(&-1.0));
    }

    #[test]
    fn exhaustive_associativity_four_generators() {
        for a in 0u32..16 {
            for b in 0u32..16 {
                for c in 0u32..16 {
                    let (x, y, z) = (
                        Grassmann::monomial(a, 1.0),
                        Grassmann::monomial(b, 1.0),
                        Grassmann::monomial(c, 1.0),
                    );
                    assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
                }
            }
        }
    }

    #[test]
    fn shift_derivative_examples() {
        // d_K(t0 - t1) = 0
        let d = (&t(0) - &t(1)).shift_derivative(0b11);
        assert_eq!(d.max_norm(), 0.0);
        // d_K(t0 t1) = t1 - t0
        let d = t(0).mul(&t(1)).shift_derivative(0b11);
        assert_eq!(d.coefficient(0b10), Some(&1.0));
        assert_eq!(d.coefficient(0b01), Some(&-1.0));
    }

    #[test]
    fn right_factor_recovers_coefficient() {
        // x = t2 t0 t1 = t0 t1 t2 after two swaps
        let x = t(2).mul(&t(0)).mul(&t(1));
        let y = x.right_factor(0b011, 0b011);
        assert_eq!(y, t(2));
    }

    #[test]
    fn relabel_tracks_signs() {
        let x = t(0).mul(&t(1));
        let y = x.relabel(&[(0, 2)]);
        assert_eq!(y, t(2).mul(&t(1)));
    }
}
