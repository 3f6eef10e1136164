//! Two-term L-infinity algebras given by structure constants, and their homotopy Jacobi identities.

use serde::Serialize;

use crate::grassmann::Grassmann;
use crate::group::{Algebra, AlgebraElement};
use crate::report::Check;

/// The trilinear form `k (x, [y, z])` built from the Killing form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Trilinear {
    pub k: f64,
}

impl Trilinear {
    pub fn new(k: f64) -> Self {
        Trilinear { k }
    }

    pub fn eval(&self, x: &AlgebraElement, y: &AlgebraElement, z: &AlgebraElement) -> f64 {
        self.k * x.killing_unchecked(&y.bracket_unchecked(z))
    }

    fn raw(x: &Grassmann<AlgebraElement>, y: &Grassmann<AlgebraElement>, z: &Grassmann<AlgebraElement>) -> Grassmann<f64> {
        let yz = y.product(z, |a, b| a.bracket_unchecked(b));
        x.product(&yz, |a, b| a.killing_unchecked(b))
    }

    /// `k (x, [y, z])` on odd-graded moduli expanded over their own generators.
    pub fn on_moduli(
        &self,
        x: &Grassmann<AlgebraElement>,
        y: &Grassmann<AlgebraElement>,
        z: &Grassmann<AlgebraElement>,
    ) -> Grassmann<f64> {
        Self::raw(x, y, z).scale(self.k)
    }

    /// The linearized 3-cochain on superpoint-dependent group elements given by their logs.
    /// The Grassmann product reorders superpoint coordinates past the moduli generators,
    /// so this pairing carries the opposite overall sign of [`Trilinear::on_moduli`].
    pub fn on_superfields(
        &self,
        x: &Grassmann<AlgebraElement>,
        y: &Grassmann<AlgebraElement>,
        z: &Grassmann<AlgebraElement>,
    ) -> Grassmann<f64> {
        Self::raw(x, y, z).scale(-self.k)
    }
}

/// A two-term L-infinity algebra `W1 -> W0` in a fixed basis.
#[derive(Clone, Debug, Serialize)]
pub struct TwoTermLInfty {
    pub dim0: usize,
    pub dim1: usize,
    /// `mu1(e_alpha) = sum_a mu1[alpha][a] x_a`.
    pub mu1: Vec<Vec<f64>>,
    /// `mu2(x_a, x_b) = sum_c mu2[a][b][c] x_c`.
    pub mu2: Vec<Vec<Vec<f64>>>,
    /// `mu2(x_a, e_alpha) = sum_beta mixed[a][alpha][beta] e_beta`.
    pub mixed: Vec<Vec<Vec<f64>>>,
    /// `mu3(x_a, x_b, x_c) = sum_alpha mu3[a][b][c][alpha] e_alpha`.
    pub mu3: Vec<Vec<Vec<Vec<f64>>>>,
}

/// Residuals of the five homotopy Jacobi families plus the graded antisymmetry checks.
#[derive(Clone, Debug, Serialize)]
pub struct JacobiReport {
    pub chain_map: f64,
    pub mu1_symmetry: f64,
    pub jacobiator: f64,
    pub mixed_jacobi: f64,
    pub mu3_closure: f64,
    pub antisymmetry: f64,
}

impl JacobiReport {
    pub fn max(&self) -> f64 {
        [
            self.chain_map,
            self.mu1_symmetry,
            self.jacobiator,
            self.mixed_jacobi,
            self.mu3_closure,
            self.antisymmetry,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn checks(&self, tol: f64) -> Vec<Check> {
        [
            ("chain_map", self.chain_map),
            ("mu1_symmetry", self.mu1_symmetry),
            ("jacobiator", self.jacobiator),
            ("mixed_jacobi", self.mixed_jacobi),
            ("mu3_closure", self.mu3_closure),
            ("antisymmetry", self.antisymmetry),
        ]
        .into_iter()
        .map(|(n, r)| Check::from_residuals(n, &[r], tol))
        .collect()
    }
}

fn zeros3(a: usize, b: usize, c: usize) -> Vec<Vec<Vec<f64>>> {
    vec![vec![vec![0.0; c]; b]; a]
}

type Vec0 = Vec<f64>;

impl TwoTermLInfty {
    /// A Lie algebra viewed as a two-term algebra with a trivial `W1`.
    pub fn strict(algebra: Algebra, dim1: usize) -> Self {
        let n = algebra.dim();
        let mut mu2 = zeros3(n, n, n);
        for (a, row) in mu2.iter_mut().enumerate() {
            for (b, out) in row.iter_mut().enumerate() {
                for (c, v) in out.iter_mut().enumerate() {
                    *v = algebra.structure_constant(a, b, c);
                }
            }
        }
        TwoTermLInfty {
            dim0: n,
            dim1,
            mu1: vec![vec![0.0; n]; dim1],
            mu2,
            mixed: zeros3(n, dim1, dim1),
            mu3: vec![zeros3(n, n, dim1); n],
        }
    }

    /// The string algebra `u(1)[1] -> g` with `mu3 = k (x, [y, z])`.
    pub fn string(algebra: Algebra, t: &Trilinear) -> Self {
        let mut l = Self::strict(algebra, 1);
        let n = l.dim0;
        let basis: Vec<_> = (0..n).map(|i| AlgebraElement::basis(algebra, i)).collect();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    l.mu3[a][b][c][0] = t.eval(&basis[a], &basis[b], &basis[c]);
                }
            }
        }
        l
    }

    /// The strict algebra `g -> g` with identity `mu1` and adjoint action on `W1`.
    pub fn inner_derivations(algebra: Algebra) -> Self {
        let mut l = Self::strict(algebra, algebra.dim());
        for a in 0..l.dim0 {
            l.mu1[a][a] = 1.0;
        }
        l.mixed = l.mu2.clone();
        l
    }

    fn d(&self, h: &[f64]) -> Vec0 {
        let mut out = vec![0.0; self.dim0];
        for (al, &c) in h.iter().enumerate() {
            for (a, o) in out.iter_mut().enumerate() {
                *o += c * self.mu1[al][a];
            }
        }
        out
    }

    fn br(&self, x: &[f64], y: &[f64]) -> Vec0 {
        let mut out = vec![0.0; self.dim0];
        for (a, &xa) in x.iter().enumerate() {
            for (b, &yb) in y.iter().enumerate() {
                if xa * yb != 0.0 {
                    for (c, o) in out.iter_mut().enumerate() {
                        *o += xa * yb * self.mu2[a][b][c];
                    }
                }
            }
        }
        out
    }

    /// `mu2(x, h)` for `x` in `W0` and `h` in `W1`.
    fn act(&self, x: &[f64], h: &[f64]) -> Vec0 {
        let mut out = vec![0.0; self.dim1];
        for (a, &xa) in x.iter().enumerate() {
            for (al, &ha) in h.iter().enumerate() {
                if xa * ha != 0.0 {
                    for (be, o) in out.iter_mut().enumerate() {
                        *o += xa * ha * self.mixed[a][al][be];
                    }
                }
            }
        }
        out
    }

    fn m3(&self, x: &[f64], y: &[f64], z: &[f64]) -> Vec0 {
        let mut out = vec![0.0; self.dim1];
        for (a, &xa) in x.iter().enumerate() {
            for (b, &yb) in y.iter().enumerate() {
                for (c, &zc) in z.iter().enumerate() {
                    let s = xa * yb * zc;
                    if s != 0.0 {
                        for (al, o) in out.iter_mut().enumerate() {
                            *o += s * self.mu3[a][b][c][al];
                        }
                    }
                }
            }
        }
        out
    }

    /// Evaluates every identity on all basis tuples.
    pub fn homotopy_jacobi(&self) -> JacobiReport {
        let e0 = |i: usize| -> Vec0 {
            let mut v = vec![0.0; self.dim0];
            v[i] = 1.0;
            v
        };
        let e1 = |i: usize| -> Vec0 {
            let mut v = vec![0.0; self.dim1];
            v[i] = 1.0;
            v
        };
        let norm = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let sum = |vs: &[Vec0], signs: &[f64]| -> Vec0 {
            let mut out = vec![0.0; vs[0].len()];
            for (v, s) in vs.iter().zip(signs) {
                for (o, x) in out.iter_mut().zip(v) {
                    *o += s * x;
                }
            }
            out
        };
        let (n0, n1) = (self.dim0, self.dim1);
        let mut r = JacobiReport {
            chain_map: 0.0,
            mu1_symmetry: 0.0,
            jacobiator: 0.0,
            mixed_jacobi: 0.0,
            mu3_closure: 0.0,
            antisymmetry: 0.0,
        };
        for a in 0..n0 {
            for al in 0..n1 {
                // mu1 mu2(x, h) = mu2(x, mu1 h)
                let lhs = self.d(&self.act(&e0(a), &e1(al)));
                let rhs = self.br(&e0(a), &self.d(&e1(al)));
                r.chain_map = r.chain_map.max(norm(&sum(&[lhs, rhs], &[1.0, -1.0])));
            }
        }
        for al in 0..n1 {
            for be in 0..n1 {
                // mu2(mu1 h, k) = -mu2(mu1 k, h)
                let lhs = self.act(&self.d(&e1(al)), &e1(be));
                let rhs = self.act(&self.d(&e1(be)), &e1(al));
                r.mu1_symmetry = r.mu1_symmetry.max(norm(&sum(&[lhs, rhs], &[1.0, 1.0])));
            }
        }
        for a in 0..n0 {
            for b in 0..n0 {
                let ab = sum(&[self.br(&e0(a), &e0(b)), self.br(&e0(b), &e0(a))], &[1.0, 1.0]);
                r.antisymmetry = r.antisymmetry.max(norm(&ab));
                for c in 0..n0 {
                    let (x, y, z) = (e0(a), e0(b), e0(c));
                    let jac = [
                        self.br(&x, &self.br(&y, &z)),
                        self.br(&y, &self.br(&z, &x)),
                        self.br(&z, &self.br(&x, &y)),
                        self.d(&self.m3(&x, &y, &z)),
                    ];
                    r.jacobiator = r.jacobiator.max(norm(&sum(&jac, &[1.0; 4])));
                    let anti = [
                        sum(&[self.m3(&x, &y, &z), self.m3(&y, &x, &z)], &[1.0, 1.0]),
                        sum(&[self.m3(&x, &y, &z), self.m3(&x, &z, &y)], &[1.0, 1.0]),
                    ];
                    r.antisymmetry = anti.iter().fold(r.antisymmetry, |m, v| m.max(norm(v)));
                }
                for al in 0..n1 {
                    let (x, y, h) = (e0(a), e0(b), e1(al));
                    // x.(y.h) - y.(x.h) - [x,y].h = mu3(x, y, mu1 h)
                    let terms = [
                        self.act(&x, &self.act(&y, &h)),
                        self.act(&y, &self.act(&x, &h)),
                        self.act(&self.br(&x, &y), &h),
                        self.m3(&x, &y, &self.d(&h)),
                    ];
                    r.mixed_jacobi = r.mixed_jacobi.max(norm(&sum(&terms, &[1.0, -1.0, -1.0, 1.0])));
                }
            }
        }
        for w in 0..n0 {
            for x in 0..n0 {
                for y in 0..n0 {
                    for z in 0..n0 {
                        let v = [e0(w), e0(x), e0(y), e0(z)];
                        r.mu3_closure = r.mu3_closure.max(norm(&self.ce_differential(&v)));
                    }
                }
            }
        }
        r
    }

    /// Chevalley-Eilenberg differential of `mu3` with coefficients in `W1`.
    fn ce_differential(&self, v: &[Vec0; 4]) -> Vec0 {
        let mut out = vec![0.0; self.dim1];
        let add = |out: &mut Vec0, s: f64, t: Vec0| {
            for (o, x) in out.iter_mut().zip(t) {
                *o += s * x;
            }
        };
        let rest = |skip: &[usize]| -> Vec<&Vec0> { (0..4).filter(|i| !skip.contains(i)).map(|i| &v[i]).collect() };
        for i in 0..4 {
            let r = rest(&[i]);
            let s = if i % 2 == 0 { 1.0 } else { -1.0 };
            add(&mut out, s, self.act(&v[i], &self.m3(r[0], r[1], r[2])));
        }
        for i in 0..4 {
            for j in i + 1..4 {
                let r = rest(&[i, j]);
                let s = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                add(&mut out, s, self.m3(&self.br(&v[i], &v[j]), r[0], r[1]));
            }
        }
        out
    }

    /// A copy with one bracket structure constant shifted, keeping antisymmetry.
    pub fn perturbed(&self, a: usize, b: usize, c: usize, eps: f64) -> Self {
        let mut l = self.clone();
        l.mu2[a][b][c] += eps;
        l.mu2[b][a][c] -= eps;
        l
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn string_algebra_is_exact() {
        for k in [0.0, 1.0, 2.5] {
            for algebra in [Algebra::Su2, Algebra::Spin4] {
                let r = TwoTermLInfty::string(algebra, &Trilinear::new(k)).homotopy_jacobi();
                assert_eq!(r.max(), 0.0, "{algebra} k={k}: {r:?}");
            }
        }
    }

    #[test]
    fn strict_algebras_pass() {
        assert_eq!(TwoTermLInfty::strict(Algebra::Su2, 1).homotopy_jacobi().max(), 0.0);
        assert_eq!(TwoTermLInfty::inner_derivations(Algebra::Su2).homotopy_jacobi().max(), 0.0);
    }

    #[test]
    fn perturbation_fails() {
        let l = TwoTermLInfty::string(Algebra::Su2, &Trilinear::new(1.0)).perturbed(0, 1, 0, 0.1);
        let r = l.homotopy_jacobi();
        assert!(r.jacobiator > 0.01, "{r:?}");
    }

    #[test]
    fn mu3_values() {
        let l = TwoTermLInfty::string(Algebra::Su2, &Trilinear::new(1.0));
        // (e1, [e2, e3]) = (e1, -2 e1) = -2
        assert_eq!(l.mu3[0][1][2][0], -2.0);
        assert_eq!(l.mu2[0][1][2], -2.0);
    }
}
