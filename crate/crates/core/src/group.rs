//! Unit quaternions for SU(2), pairs of them for Spin(4), and the Lie algebras
//! su(2), spin(4) = su(2) + su(2) and u(1).
//!
//! Quaternion coordinates `(x, y, z, w)` encode the matrix
//! `[[x + iy, z + iw], [-z + iw, x - iy]]`, so `y, z, w` multiply the units
//! `i, j, k` of the Hamilton product. The algebra basis is `e_a = i * sigma_a`,
//! which as quaternions reads `e1 = k`, `e2 = j`, `e3 = i`. With this basis the
//! structure constants are `f_ab^c = -2 eps_abc` and the Killing form
//! `-1/2 tr(ab)` is the identity Gram matrix.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Drift from unit norm tolerated before a product is renormalized.
pub const NORM_EPS: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GroupError {
    #[error("algebra mismatch: {0} vs {1}")]
    AlgebraMismatch(Algebra, Algebra),
    #[error("expected {expected} components for {algebra}, got {got}")]
    Dimension {
        algebra: Algebra,
        expected: usize,
        got: usize,
    },
    #[error("log_map outside the principal branch (real part {0} < 0)")]
    OutsideBranch(f64),
    #[error("quaternion norm {0} is too far from 1")]
    NotUnit(f64),
}

/// A unit quaternion, i.e. an element of SU(2) = Spin(3).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Su2 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub w: f64,
}

impl Su2 {
    pub const IDENTITY: Su2 = Su2 {
        x: 1.0,
        y: 0.0,
        z: 0.0,
        w: 0.0,
    };

    /// Builds a group element, rejecting inputs whose norm is off by more than `1e-6`
    /// and normalizing the rest.
    pub fn new(x: f64, y: f64, z: f64, w: f64) -> Result<Self, GroupError> {
        let n = (x * x + y * y + z * z + w * w).sqrt();
        if !n.is_finite() || (n - 1.0).abs() > 1e-6 {
            return Err(GroupError::NotUnit(n));
        }
        Ok(Su2 { x, y, z, w }.renormalized())
    }

    /// Projects any nonzero vector of R^4 onto the unit sphere.
    pub fn from_vector(v: [f64; 4]) -> Option<Self> {
        let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if n == 0.0 || !n.is_finite() {
            return None;
        }
        Some(Su2 {
            x: v[0] / n,
            y: v[1] / n,
            z: v[2] / n,
            w: v[3] / n,
        })
    }

    pub fn coords(&self) -> [f64; 4] {
        [self.x, self.y, self.z, self.w]
    }

    pub fn norm_sq(&self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z + self.w * self.w
    }

    fn renormalized(self) -> Self {
        let n2 = self.norm_sq();
        if (n2 - 1.0).abs() <= NORM_EPS {
            return self;
        }
        let n = n2.sqrt();
        Su2 {
            x: self.x / n,
            y: self.y / n,
            z: self.z / n,
            w: self.w / n,
        }
    }

    /// Hamilton product, renormalized when the norm drifts past [`NORM_EPS`].
    pub fn mul(self, o: Su2) -> Su2 {
        Su2 {
            x: self.x * o.x - self.y * o.y - self.z * o.z - self.w * o.w,
            y: self.x * o.y + self.y * o.x + self.z * o.w - self.w * o.z,
            z: self.x * o.z - self.y * o.w + self.z * o.x + self.w * o.y,
            w: self.x * o.w + self.y * o.z - self.z * o.y + self.w * o.x,
        }
        .renormalized()
    }

    pub fn inv(self) -> Su2 {
        Su2 {
            x: self.x,
            y: -self.y,
            z: -self.z,
            w: -self.w,
        }
    }

    /// Euclidean distance in R^4.
    pub fn distance(&self, o: &Su2) -> f64 {
        let d = [self.x - o.x, self.y - o.y, self.z - o.z, self.w - o.w];
        d.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn to_matrix(&self) -> CMat {
        let c = |re, im| Complex64::new(re, im);
        CMat::from_block(
            0,
            [
                [c(self.x, self.y), c(self.z, self.w)],
                [c(-self.z, self.w), c(self.x, -self.y)],
            ],
            2,
        )
    }

    /// `exp(t a)` for `a` in su(2).
    pub fn exp(a: &AlgebraElement, t: f64) -> Result<Su2, GroupError> {
        a.expect(Algebra::Su2)?;
        Ok(su2_exp(&a.su2_block(0), t))
    }

    /// Principal logarithm; requires real part `x >= 0`.
    pub fn log(&self) -> Result<AlgebraElement, GroupError> {
        Ok(AlgebraElement::from_su2(su2_log(self)?))
    }
}

impl Mul for Su2 {
    type Output = Su2;
    fn mul(self, o: Su2) -> Su2 {
        Su2::mul(self, o)
    }
}

impl fmt::Display for Su2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.x, self.y, self.z, self.w)
    }
}

fn su2_exp(c: &[f64; 3], t: f64) -> Su2 {
    let n = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
    let th = n * t;
    if n == 0.0 {
        return Su2::IDENTITY;
    }
    let s = th.sin() / n;
    Su2 {
        x: th.cos(),
        y: s * c[2],
        z: s * c[1],
        w: s * c[0],
    }
    .renormalized()
}

fn su2_log(g: &Su2) -> Result<[f64; 3], GroupError> {
    if g.x < 0.0 {
        return Err(GroupError::OutsideBranch(g.x));
    }
    let v = (g.y * g.y + g.z * g.z + g.w * g.w).sqrt();
    if v == 0.0 {
        return Ok([0.0; 3]);
    }
    let th = v.atan2(g.x);
    let s = th / v;
    Ok([s * g.w, s * g.z, s * g.y])
}

/// An element of Spin(4) = SU(2) x SU(2).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spin4 {
    pub left: Su2,
    pub right: Su2,
}

impl Spin4 {
    pub const IDENTITY: Spin4 = Spin4 {
        left: Su2::IDENTITY,
        right: Su2::IDENTITY,
    };

    pub fn mul(self, o: Spin4) -> Spin4 {
        Spin4 {
            left: self.left * o.left,
            right: self.right * o.right,
        }
    }

    pub fn inv(self) -> Spin4 {
        Spin4 {
            left: self.left.inv(),
            right: self.right.inv(),
        }
    }

    pub fn distance(&self, o: &Spin4) -> f64 {
        self.left.distance(&o.left).hypot(self.right.distance(&o.right))
    }

    pub fn to_matrix(&self) -> CMat {
        let mut m = self.left.to_matrix();
        m.n = 4;
        m.set_block(1, self.right.to_matrix().block(0));
        m
    }

    pub fn exp(a: &AlgebraElement, t: f64) -> Result<Spin4, GroupError> {
        a.expect(Algebra::Spin4)?;
        Ok(Spin4 {
            left: su2_exp(&a.su2_block(0), t),
            right: su2_exp(&a.su2_block(1), t),
        })
    }

    pub fn log(&self) -> Result<AlgebraElement, GroupError> {
        let l = su2_log(&self.left)?;
        let r = su2_log(&self.right)?;
        Ok(AlgebraElement::from_spin4(l, r))
    }
}

impl Mul for Spin4 {
    type Output = Spin4;
    fn mul(self, o: Spin4) -> Spin4 {
        Spin4::mul(self, o)
    }
}

/// The Lie algebras handled by [`AlgebraElement`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algebra {
    U1,
    Su2,
    Spin4,
}

impl Algebra {
    pub fn dim(self) -> usize {
        match self {
            Algebra::U1 => 1,
            Algebra::Su2 => 3,
            Algebra::Spin4 => 6,
        }
    }

    /// Number of 2x2 blocks in the defining representation.
    pub fn blocks(self) -> usize {
        match self {
            Algebra::U1 => 0,
            Algebra::Su2 => 1,
            Algebra::Spin4 => 2,
        }
    }

    /// Structure constant `f_ab^c` in the fixed basis.
    pub fn structure_constant(self, a: usize, b: usize, c: usize) -> f64 {
        match self {
            Algebra::U1 => 0.0,
            Algebra::Su2 => -2.0 * levi_civita3(a, b, c),
            Algebra::Spin4 => {
                let (ba, bb, bc) = (a / 3, b / 3, c / 3);
                if ba == bb && bb == bc {
                    -2.0 * levi_civita3(a % 3, b % 3, c % 3)
                } else {
                    0.0
                }
            }
        }
    }

    /// Gram matrix entry of the Killing form `-1/2 tr(ab)`; the identity in this basis.
    pub fn gram(self, a: usize, b: usize) -> f64 {
        if a == b {
            1.0
        } else {
            0.0
        }
    }
}

impl fmt::Display for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Algebra::U1 => "u(1)",
            Algebra::Su2 => "su(2)",
            Algebra::Spin4 => "spin(4)",
        };
        f.write_str(s)
    }
}

fn levi_civita3(a: usize, b: usize, c: usize) -> f64 {
    match (a, b, c) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// A Lie algebra element in the basis `e_a = i sigma_a` (per su(2) block).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraElement {
    algebra: Algebra,
    c: [f64; 6],
}

impl AlgebraElement {
    pub fn new(algebra: Algebra, comps: &[f64]) -> Result<Self, GroupError> {
        if comps.len() != algebra.dim() {
            return Err(GroupError::Dimension {
                algebra,
                expected: algebra.dim(),
                got: comps.len(),
            });
        }
        let mut c = [0.0; 6];
        c[..comps.len()].copy_from_slice(comps);
        Ok(AlgebraElement { algebra, c })
    }

    pub fn zero(algebra: Algebra) -> Self {
        AlgebraElement {
            algebra,
            c: [0.0; 6],
        }
    }

    /// The basis vector `e_{i+1}` (zero-based index).
    pub fn basis(algebra: Algebra, i: usize) -> Self {
        let mut e = Self::zero(algebra);
        e.c[i] = 1.0;
        e
    }

    pub fn from_su2(c: [f64; 3]) -> Self {
        let mut e = Self::zero(Algebra::Su2);
        e.c[..3].copy_from_slice(&c);
        e
    }

    pub fn from_spin4(l: [f64; 3], r: [f64; 3]) -> Self {
        let mut e = Self::zero(Algebra::Spin4);
        e.c[..3].copy_from_slice(&l);
        e.c[3..].copy_from_slice(&r);
        e
    }

    pub fn algebra(&self) -> Algebra {
        self.algebra
    }

    pub fn components(&self) -> &[f64] {
        &self.c[..self.algebra.dim()]
    }

    pub fn norm(&self) -> f64 {
        self.components().iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    fn expect(&self, algebra: Algebra) -> Result<(), GroupError> {
        if self.algebra == algebra {
            Ok(())
        } else {
            Err(GroupError::AlgebraMismatch(self.algebra, algebra))
        }
    }

    fn same(&self, o: &Self) -> Result<(), GroupError> {
        self.expect(o.algebra)
    }

    fn su2_block(&self, b: usize) -> [f64; 3] {
        [self.c[3 * b], self.c[3 * b + 1], self.c[3 * b + 2]]
    }

    /// Lie bracket by structure-constant contraction.
    pub fn bracket(&self, o: &Self) -> Result<Self, GroupError> {
        self.same(o)?;
        Ok(self.bracket_unchecked(o))
    }

    pub(crate) fn bracket_unchecked(&self, o: &Self) -> Self {
        let mut out = Self::zero(self.algebra);
        for b in 0..self.algebra.blocks() {
            let k = cross(&self.su2_block(b), &o.su2_block(b));
            for i in 0..3 {
                out.c[3 * b + i] = -2.0 * k[i];
            }
        }
        out
    }

    /// Killing form normalized as `-1/2 tr(ab)` in the defining representation.
    pub fn killing(&self, o: &Self) -> Result<f64, GroupError> {
        self.same(o)?;
        Ok(self.killing_unchecked(o))
    }

    pub(crate) fn killing_unchecked(&self, o: &Self) -> f64 {
        self.components()
            .iter()
            .zip(o.components())
            .map(|(a, b)| a * b)
            .sum()
    }

    /// Image in the defining representation (2x2 for su(2), block-diagonal 4x4 for spin(4)).
    pub fn to_matrix(&self) -> CMat {
        let i = Complex64::i();
        let one = Complex64::new(1.0, 0.0);
        let z = Complex64::new(0.0, 0.0);
        let n = 2 * self.algebra.blocks().max(1);
        let mut m = CMat::zero(n);
        for b in 0..self.algebra.blocks() {
            let [c1, c2, c3] = self.su2_block(b);
            let blk = [
                [i * c3, i * c1 + one * c2],
                [i * c1 - one * c2, -i * c3],
            ];
            m.set_block(b, blk);
        }
        if self.algebra == Algebra::U1 {
            m = CMat::zero(2);
            m.a[0][0] = i * self.c[0];
            m.a[1][1] = z + i * self.c[0];
        }
        m
    }

    /// Inverse of [`AlgebraElement::to_matrix`] via the Killing-form projection.
    pub fn from_matrix(algebra: Algebra, m: &CMat) -> Self {
        let mut out = Self::zero(algebra);
        if algebra == Algebra::U1 {
            out.c[0] = m.a[0][0].im;
            return out;
        }
        for b in 0..algebra.blocks() {
            for a in 0..3 {
                let e = Self::basis(Algebra::Su2, a).to_matrix().block(0);
                let blk = m.block(b);
                let mut tr = Complex64::new(0.0, 0.0);
                for r in 0..2 {
                    for s in 0..2 {
                        tr += e[r][s] * blk[s][r];
                    }
                }
                out.c[3 * b + a] = -0.5 * tr.re;
            }
        }
        out
    }
}

impl Add for AlgebraElement {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        debug_assert_eq!(self.algebra, o.algebra);
        for i in 0..6 {
            self.c[i] += o.c[i];
        }
        self
    }
}

impl AddAssign for AlgebraElement {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for AlgebraElement {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for AlgebraElement {
    type Output = Self;
    fn neg(mut self) -> Self {
        for v in &mut self.c {
            *v = -*v;
        }
        self
    }
}

impl Mul<f64> for AlgebraElement {
    type Output = Self;
    fn mul(mut self, s: f64) -> Self {
        for v in &mut self.c {
            *v *= s;
        }
        self
    }
}

/// A small complex square matrix (size 2 or 4) stored densely.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CMat {
    pub n: usize,
    pub a: [[Complex64; 4]; 4],
}

impl CMat {
    pub fn zero(n: usize) -> Self {
        assert!(n <= 4, "CMat supports sizes up to 4");
        CMat {
            n,
            a: [[Complex64::new(0.0, 0.0); 4]; 4],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.a[i][i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    fn from_block(b: usize, blk: [[Complex64; 2]; 2], n: usize) -> Self {
        let mut m = Self::zero(n);
        m.set_block(b, blk);
        m
    }

    pub fn block(&self, b: usize) -> [[Complex64; 2]; 2] {
        let o = 2 * b;
        [
            [self.a[o][o], self.a[o][o + 1]],
            [self.a[o + 1][o], self.a[o + 1][o + 1]],
        ]
    }

    fn set_block(&mut self, b: usize, blk: [[Complex64; 2]; 2]) {
        let o = 2 * b;
        for r in 0..2 {
            for s in 0..2 {
                self.a[o + r][o + s] = blk[r][s];
            }
        }
    }

    pub fn scale(mut self, s: f64) -> Self {
        for r in 0..self.n {
            for c in 0..self.n {
                self.a[r][c] *= s;
            }
        }
        self
    }

    /// Conjugate transpose, the inverse of a unitary matrix.
    pub fn adjoint(&self) -> Self {
        let mut out = CMat::zero(self.n);
        for r in 0..self.n {
            for c in 0..self.n {
                out.a[c][r] = self.a[r][c].conj();
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        let mut m: f64 = 0.0;
        for r in 0..self.n {
            for c in 0..self.n {
                m = m.max(self.a[r][c].norm());
            }
        }
        m
    }
}

impl Add for CMat {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        debug_assert_eq!(self.n, o.n);
        for r in 0..self.n {
            for c in 0..self.n {
                self.a[r][c] += o.a[r][c];
            }
        }
        self
    }
}

impl Neg for CMat {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl Sub for CMat {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Mul for CMat {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        debug_assert_eq!(self.n, o.n);
        let mut m = Self::zero(self.n);
        for r in 0..self.n {
            for c in 0..self.n {
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..self.n {
                    s += self.a[r][k] * o.a[k][c];
                }
                m.a[r][c] = s;
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quaternion_table() {
        let i = Su2::new(0.0, 1.0, 0.0, 0.0).unwrap();
        let j = Su2::new(0.0, 0.0, 1.0, 0.0).unwrap();
        assert_eq!(i * j, Su2::new(0.0, 0.0, 0.0, 1.0).unwrap());
    }

    #[test]
    fn bracket_of_basis() {
        let e1 = AlgebraElement::basis(Algebra::Su2, 0);
        let e2 = AlgebraElement::basis(Algebra::Su2, 1);
        let e3 = AlgebraElement::basis(Algebra::Su2, 2);
        assert_eq!(e1.bracket(&e2).unwrap(), e3 * -2.0);
    }

    #[test]
    fn bracket_matches_matrix_commutator() {
        let a = AlgebraElement::from_su2([0.3, -1.2, 0.7]);
        let b = AlgebraElement::from_su2([1.1, 0.4, -0.5]);
        let (ma, mb) = (a.to_matrix(), b.to_matrix());
        let comm = ma * mb - mb * ma;
        let diff = comm - a.bracket(&b).unwrap().to_matrix();
        assert!(diff.max_abs() < 1e-14);
    }

    #[test]
    fn group_matrix_matches_exp() {
        let a = AlgebraElement::from_su2([0.2, 0.1, -0.4]);
        let g = Su2::exp(&a, 1.0).unwrap();
        // exp of a matrix with a^2 = -|a|^2
        let n = a.norm();
        let m = CMat::identity(2).scale(n.cos()) + a.to_matrix().scale(n.sin() / n);
        assert!((g.to_matrix() - m).max_abs() < 1e-14);
    }

    #[test]
    fn matrix_round_trip() {
        let a = AlgebraElement::from_spin4([0.3, -0.2, 0.9], [1.0, 2.0, -3.0]);
        let b = AlgebraElement::from_matrix(Algebra::Spin4, &a.to_matrix());
        assert!((a - b).norm() < 1e-15);
    }

    #[test]
    fn log_branch() {
        let g = Su2::new(-0.6, 0.8, 0.0, 0.0).unwrap();
        assert!(matches!(g.log(), Err(GroupError::OutsideBranch(_))));
        let e3 = AlgebraElement::basis(Algebra::Su2, 2);
        let q = Su2::exp(&e3, std::f64::consts::FRAC_PI_2).unwrap();
        assert!(q.x.abs() < 1e-15 && (q.y - 1.0).abs() < 1e-15);
        let back = q.log().unwrap();
        assert!((back - e3 * std::f64::consts::FRAC_PI_2).norm() < 1e-15);
    }

    #[test]
    fn mismatch_is_an_error() {
        let a = AlgebraElement::zero(Algebra::Su2);
        let b = AlgebraElement::zero(Algebra::Spin4);
        assert!(a.bracket(&b).is_err());
        assert!(a.killing(&b).is_err());
        assert!(AlgebraElement::new(Algebra::Su2, &[1.0]).is_err());
    }

    #[test]
    fn u1_is_abelian() {
        let a = AlgebraElement::new(Algebra::U1, &[2.0]).unwrap();
        let b = AlgebraElement::new(Algebra::U1, &[-3.0]).unwrap();
        assert_eq!(a.bracket(&b).unwrap().norm(), 0.0);
    }
}
