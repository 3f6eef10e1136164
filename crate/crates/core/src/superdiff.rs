//! Differentiation of the weak 2-group through Grassmann-valued descent data.
//!
//! Generators: `t0..t3` are the superpoint coordinates (bits 0..3). Odd moduli are
//! expanded over their own odd generators: `omega = sum_r xi_r M_r` (bits 4..9),
//! the odd part `delta` of `d_K beta = beta delta` (bits 10..15) and `zeta` (bit 16).
//! The differential `d_K` is the simultaneous shift `t_i -> t_i + e`.

use rand::Rng;
use rayon::prelude::*;
use rand_distr::StandardNormal;
use serde::Serialize;
use thiserror::Error;

use crate::grassmann::{gen, Grassmann};
use crate::group::{Algebra, AlgebraElement, CMat, GroupError, Spin4, Su2};
use crate::linfty::{Trilinear, TwoTermLInfty};
use crate::report::Check;
use crate::sampling::{random_algebra, random_spin4, random_su2, substream};

/// Number of superpoint coordinates.
pub const THETAS: u32 = 4;
const THETA_MASK: u32 = 0b1111;
const XI0: u32 = 4;
const ETA0: u32 = 10;
const ZETA: u32 = 16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiffError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("gauge parameter lies outside the principal log branch")]
    OutsideBranch,
}

/// An algebra-valued Grassmann number.
pub type AlgebraSuper = Grassmann<AlgebraElement>;
/// A matrix-valued Grassmann number.
pub type MatrixSuper = Grassmann<CMat>;

fn theta(i: u32) -> Grassmann<f64> {
    assert!(i < THETAS);
    Grassmann::generator(i)
}

/// `t_a t_b` as a plain Grassmann number.
fn theta2(a: u32, b: u32) -> Grassmann<f64> {
    theta(a).mul(&theta(b))
}

/// The quadratic `t_a t_b + t_b t_c - t_a t_c`.
fn cocycle_quadratic(a: u32, b: u32, c: u32) -> Grassmann<f64> {
    &(&theta2(a, b) + &theta2(b, c)) - &theta2(a, c)
}

/// Multiplies an algebra-valued number by a plain Grassmann number on the right.
fn rtimes(x: &AlgebraSuper, g: &Grassmann<f64>) -> AlgebraSuper {
    x.times(g)
}

/// Pointwise bracket of algebra-valued Grassmann numbers.
pub fn super_bracket(x: &AlgebraSuper, y: &AlgebraSuper) -> AlgebraSuper {
    x.product(y, |a, b| a.bracket_unchecked(b))
}

/// Pointwise Killing form.
pub fn super_killing(x: &AlgebraSuper, y: &AlgebraSuper) -> Grassmann<f64> {
    x.product(y, |a, b| a.killing_unchecked(b))
}

fn to_matrix(x: &AlgebraSuper) -> MatrixSuper {
    x.map(|c| c.to_matrix())
}

fn to_algebra(x: &MatrixSuper, algebra: Algebra) -> AlgebraSuper {
    x.map(|m| AlgebraElement::from_matrix(algebra, m))
}

fn identity_super(n: usize) -> MatrixSuper {
    Grassmann::scalar(CMat::identity(n))
}

fn matrix_size(algebra: Algebra) -> usize {
    2 * algebra.blocks().max(1)
}

/// The degree-1 modulus `omega = sum_r xi_r M_r`.
#[derive(Clone, Debug)]
pub struct OddElement {
    pub algebra: Algebra,
    pub parts: Vec<AlgebraElement>,
    first_generator: u32,
}

impl OddElement {
    pub fn new(first_generator: u32, parts: Vec<AlgebraElement>) -> Self {
        let algebra = parts.first().map_or(Algebra::Su2, |p| p.algebra());
        OddElement {
            algebra,
            parts,
            first_generator,
        }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, algebra: Algebra, first_generator: u32) -> Self {
        let parts = (0..algebra.dim()).map(|_| random_algebra(rng, algebra)).collect();
        Self::new(first_generator, parts)
    }

    pub fn as_super(&self) -> AlgebraSuper {
        let mut out = Grassmann::zero();
        for (r, m) in self.parts.iter().enumerate() {
            out.add_term(gen(self.first_generator + r as u32), *m);
        }
        out
    }
}

/// `-1/2 [omega, omega]`, computed from structure constants.
pub fn closed_d_omega(omega: &AlgebraSuper) -> AlgebraSuper {
    super_bracket(omega, omega).scale(-0.5)
}

/// `-lambda03(omega, omega, omega) = -k (omega, [omega, omega])`.
pub fn closed_d_psi(omega: &AlgebraSuper, t: &Trilinear) -> Grassmann<f64> {
    t.on_moduli(omega, omega, omega).scale(-1.0)
}

/// Descent data `v(ta, tb) = 1 + omega (ta - tb) + 1/2 [omega, omega] ta tb` as algebra log coordinates.
pub fn log_v(omega: &AlgebraSuper, a: u32, b: u32) -> AlgebraSuper {
    let lin = rtimes(omega, &(&theta(a) - &theta(b)));
    let quad = rtimes(&super_bracket(omega, omega).scale(0.5), &theta2(a, b));
    &lin + &quad
}

/// Matrix form of `v(ta, tb)` built as `(1 + omega ta)(1 - omega tb)`.
pub fn v_matrix(omega: &AlgebraSuper, algebra: Algebra, a: u32, b: u32) -> MatrixSuper {
    let n = matrix_size(algebra);
    let w = to_matrix(omega);
    let left = &identity_super(n) + &w.times(&theta(a));
    let right = &identity_super(n) - &w.times(&theta(b));
    left.matmul(&right)
}

/// The 2-cochain `a(t0, t1, t2) = psi P + Lambda t0 t1 t2`, with `Lambda = lambda03(omega, omega, omega)`.
pub fn a_cochain(omega: &AlgebraSuper, psi: &Grassmann<f64>, t: &Trilinear, idx: [u32; 3]) -> Grassmann<f64> {
    let [a, b, c] = idx;
    let cubic = theta(a).mul(&theta(b)).mul(&theta(c));
    &psi.mul(&cocycle_quadratic(a, b, c)) + &t.on_moduli(omega, omega, omega).mul(&cubic)
}

/// One row of the dual-route comparison.
#[derive(Clone, Debug, Serialize)]
pub struct DualRoute {
    pub algebra: Algebra,
    pub d_omega_residual: f64,
    pub d_psi_residual: f64,
    pub descent_identity_residual: f64,
    pub alpha_relation_residual: f64,
    pub d_omega_norm: f64,
    pub d_psi_norm: f64,
}

/// Compares the closed differentials with the shift derivative of the descent data.
pub fn differentiate(omega: &OddElement, psi: f64, t: &Trilinear) -> DualRoute {
    let algebra = omega.algebra;
    let w = omega.as_super();
    let shift = THETA_MASK;

    // route (b) for omega: the t0 coefficient of d_K v(t0, t1)
    let v01 = v_matrix(&w, algebra, 0, 1);
    let dv = v01.shift_derivative(shift);
    let from_descent = to_algebra(&dv.right_factor(gen(0), shift), algebra);
    let closed = closed_d_omega(&w);
    let d_omega_residual = (&from_descent - &closed).max_norm();

    // route (b) for psi: the t0 t1 coefficient of d_K a(t0, t1, t2)
    let psi_s = Grassmann::scalar(psi);
    let a = a_cochain(&w, &psi_s, t, [0, 1, 2]);
    let da = a.shift_derivative(shift);
    let from_a = da.right_factor(theta2(0, 1).terms().next().expect("monomial").0, shift);
    let d_psi_residual = (&from_a - &closed_d_psi(&w, t)).max_norm();

    // v(t0,t1) v(t1,t2) = v(t0,t2) in matrix Grassmann arithmetic
    let lhs = v01.matmul(&v_matrix(&w, algebra, 1, 2));
    let descent_identity_residual = (&lhs - &v_matrix(&w, algebra, 0, 2)).max_norm();

    // alpha(t0,t2) + a = alpha(t0,t1) + alpha(t1,t2) + lambda03(v01, v12, beta(t2)),
    // with alpha = psi t0 t1 and beta(t) = 1 + omega t
    let alpha = |x: u32, y: u32| psi_s.mul(&theta2(x, y));
    let beta2 = rtimes(&w, &theta(2));
    let lam = t.on_superfields(&log_v(&w, 0, 1), &log_v(&w, 1, 2), &beta2);
    let alpha_rel = &(&(&alpha(0, 2) + &a) - &(&alpha(0, 1) + &alpha(1, 2))) - &lam;
    let alpha_relation_residual = alpha_rel.max_norm();

    DualRoute {
        algebra,
        d_omega_residual,
        d_psi_residual,
        descent_identity_residual,
        alpha_relation_residual,
        d_omega_norm: closed.max_norm(),
        d_psi_norm: closed_d_psi(&w, t).max_norm(),
    }
}

/// Bracket of `x` with `y` followed by linear extension, `ad_x`.
fn ad(x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
    x.bracket_unchecked(y)
}

/// Left-trivialized derivative of `log`: `d/ds log(beta exp(s m))` at `s = 0`.
pub fn dlog(phi: &AlgebraElement, m: &AlgebraElement) -> AlgebraElement {
    let mut out = *m + ad(phi, m) * 0.5;
    for b in 0..phi.algebra().blocks() {
        let mut pb = AlgebraElement::zero(phi.algebra());
        let mut mb = AlgebraElement::zero(phi.algebra());
        let pc = phi.components();
        let mc = m.components();
        let mut p3 = [0.0; 6];
        let mut m3 = [0.0; 6];
        p3[3 * b..3 * b + 3].copy_from_slice(&pc[3 * b..3 * b + 3]);
        m3[3 * b..3 * b + 3].copy_from_slice(&mc[3 * b..3 * b + 3]);
        pb += AlgebraElement::new(phi.algebra(), &p3[..phi.algebra().dim()]).expect("dim");
        mb += AlgebraElement::new(phi.algebra(), &m3[..phi.algebra().dim()]).expect("dim");
        let th = pb.norm();
        let c = if th < 1e-4 {
            1.0 / 12.0 + th * th / 180.0
        } else {
            (1.0 - th / th.tan()) / (4.0 * th * th)
        };
        out += ad(&pb, &ad(&pb, &mb)) * c;
    }
    out
}

/// A finite gauge element of the group matching the algebra.
#[derive(Clone, Copy, Debug)]
pub enum GaugeElement {
    Su2(Su2),
    Spin4(Spin4),
}

impl GaugeElement {
    pub fn random<R: Rng + ?Sized>(rng: &mut R, algebra: Algebra) -> Self {
        // keep the real parts non-negative so the principal log exists
        let fix = |g: Su2| if g.x < 0.0 { Su2 { x: -g.x, y: -g.y, z: -g.z, w: -g.w } } else { g };
        match algebra {
            Algebra::Spin4 => {
                let g = random_spin4(rng);
                GaugeElement::Spin4(Spin4 {
                    left: fix(g.left),
                    right: fix(g.right),
                })
            }
            _ => GaugeElement::Su2(fix(random_su2(rng))),
        }
    }

    pub fn identity(algebra: Algebra) -> Self {
        match algebra {
            Algebra::Spin4 => GaugeElement::Spin4(Spin4::IDENTITY),
            _ => GaugeElement::Su2(Su2::IDENTITY),
        }
    }

    pub fn matrix(&self) -> CMat {
        match self {
            GaugeElement::Su2(g) => g.to_matrix(),
            GaugeElement::Spin4(g) => g.to_matrix(),
        }
    }

    pub fn inverse_matrix(&self) -> CMat {
        match self {
            GaugeElement::Su2(g) => g.inv().to_matrix(),
            GaugeElement::Spin4(g) => g.inv().to_matrix(),
        }
    }

    pub fn log(&self) -> Result<AlgebraElement, GroupError> {
        match self {
            GaugeElement::Su2(g) => g.log(),
            GaugeElement::Spin4(g) => g.log(),
        }
    }
}

/// A cocycle modulus `(omega, psi)`; `psi` is even and may carry odd-generator terms.
#[derive(Clone, Debug)]
pub struct ModuliPoint {
    pub omega: AlgebraSuper,
    pub psi: Grassmann<f64>,
}

/// Coboundary moduli: finite `beta`, `d_K beta = beta delta`, odd `zeta` and even `d_K zeta`.
#[derive(Clone, Debug)]
pub struct CoboundaryModuli {
    pub beta: GaugeElement,
    pub delta: AlgebraSuper,
    pub zeta: Grassmann<f64>,
    pub d_zeta: Grassmann<f64>,
}

impl CoboundaryModuli {
    pub fn random<R: Rng + ?Sized>(rng: &mut R, algebra: Algebra) -> Self {
        let delta = OddElement::random(rng, algebra, ETA0).as_super();
        let z: f64 = rng.sample(StandardNormal);
        let dz: f64 = rng.sample(StandardNormal);
        CoboundaryModuli {
            beta: GaugeElement::random(rng, algebra),
            delta,
            zeta: Grassmann::monomial(gen(ZETA), z),
            d_zeta: Grassmann::scalar(dz),
        }
    }

    pub fn identity(algebra: Algebra) -> Self {
        CoboundaryModuli {
            beta: GaugeElement::identity(algebra),
            delta: Grassmann::zero(),
            zeta: Grassmann::zero(),
            d_zeta: Grassmann::zero(),
        }
    }
}

fn adjoint_inverse(beta: &GaugeElement, x: &AlgebraSuper, algebra: Algebra) -> AlgebraSuper {
    let (b, bi) = (beta.matrix(), beta.inverse_matrix());
    x.map(|c| AlgebraElement::from_matrix(algebra, &(bi * c.to_matrix() * b)))
}

/// Solves the moduli relations for `(omega', psi')`.
pub fn equivalence_transform(
    p: &ModuliPoint,
    c: &CoboundaryModuli,
    t: &Trilinear,
    algebra: Algebra,
) -> Result<ModuliPoint, DiffError> {
    let omega2 = &adjoint_inverse(&c.beta, &p.omega, algebra) + &c.delta;
    let lb = Grassmann::scalar(c.beta.log().map_err(|_| DiffError::OutsideBranch)?);
    let psi2 = &(&(&(&p.psi - &c.d_zeta) - &t.on_moduli(&lb, &omega2, &omega2))
        + &t.on_moduli(&p.omega, &lb, &omega2))
        - &t.on_moduli(&p.omega, &p.omega, &lb);
    Ok(ModuliPoint {
        omega: omega2,
        psi: psi2,
    })
}

/// Residuals of the descent equations after an equivalence transform.
#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceResiduals {
    /// `v(t0,t1) beta(t1) - beta(t0) v'(t0,t1)` in matrix form.
    pub gluing: f64,
    /// degree-2 part of the alpha relation.
    pub quadratic: f64,
    /// degree-3 part of the alpha relation, the relation claimed to hold automatically.
    pub cubic: f64,
    pub other: f64,
}

/// Expands both descent equations in Grassmann arithmetic and splits residuals by `t`-degree.
pub fn equivalence_residuals(
    p: &ModuliPoint,
    c: &CoboundaryModuli,
    p2: &ModuliPoint,
    t: &Trilinear,
    algebra: Algebra,
) -> Result<EquivalenceResiduals, DiffError> {
    let n = matrix_size(algebra);
    let b = Grassmann::scalar(c.beta.matrix());
    let bd = b.matmul(&to_matrix(&c.delta));
    // beta(ti) = beta - beta delta ti
    let beta_m = |i: u32| &b - &bd.times(&theta(i));
    let gl = &v_matrix(&p.omega, algebra, 0, 1).matmul(&beta_m(1))
        - &beta_m(0).matmul(&v_matrix(&p2.omega, algebra, 0, 1));
    let _ = n;

    let phi = c.beta.log().map_err(|_| DiffError::OutsideBranch)?;
    // log beta(ti) = log beta + dlog(-delta ti)
    let log_beta = |i: u32| {
        let lin = c.delta.map(|d| dlog(&phi, d)).times(&theta(i)).scale(-1.0);
        &Grassmann::scalar(phi) + &lin
    };
    // alpha(ta, tb) = zeta (tb - ta) + d_K zeta ta tb
    let alpha = |x: u32, y: u32| &c.zeta.mul(&(&theta(y) - &theta(x))) + &c.d_zeta.mul(&theta2(x, y));
    let a = a_cochain(&p.omega, &p.psi, t, [0, 1, 2]);
    let a2 = a_cochain(&p2.omega, &p2.psi, t, [0, 1, 2]);
    let (v01, v12) = (log_v(&p.omega, 0, 1), log_v(&p.omega, 1, 2));
    let (w01, w12) = (log_v(&p2.omega, 0, 1), log_v(&p2.omega, 1, 2));
    let lam = &(&t.on_superfields(&log_beta(0), &w01, &w12) - &t.on_superfields(&v01, &log_beta(1), &w12))
        + &t.on_superfields(&v01, &v12, &log_beta(2));
    let lhs = &alpha(0, 2) + &a;
    let rhs = &(&(&alpha(0, 1) + &a2) + &alpha(1, 2)) + &lam;
    let r = &lhs - &rhs;
    let mut res = EquivalenceResiduals {
        gluing: gl.max_norm(),
        quadratic: 0.0,
        cubic: 0.0,
        other: 0.0,
    };
    for (m, v) in r.terms() {
        let slot = match (m & THETA_MASK).count_ones() {
            2 => &mut res.quadratic,
            3 => &mut res.cubic,
            _ => &mut res.other,
        };
        *slot = slot.max(v.abs());
    }
    Ok(res)
}

/// A random cocycle modulus with `psi` carrying scalar and quadratic odd terms.
pub fn random_moduli<R: Rng + ?Sized>(rng: &mut R, algebra: Algebra) -> ModuliPoint {
    let omega = OddElement::random(rng, algebra, XI0).as_super();
    let mut psi = Grassmann::scalar(rng.sample::<f64, _>(StandardNormal));
    for r in 0..algebra.dim() as u32 {
        for s in r + 1..algebra.dim() as u32 {
            psi.add_term(gen(XI0 + r) | gen(XI0 + s), rng.sample::<f64, _>(StandardNormal));
        }
    }
    ModuliPoint { omega, psi }
}

/// Random `omega` for differentiation checks.
pub fn random_omega<R: Rng + ?Sized>(rng: &mut R, algebra: Algebra) -> OddElement {
    OddElement::random(rng, algebra, XI0)
}

/// The descent data `(v(t0, t1), a(t0, t1, t2))` for a modulus.
pub fn build_descent_cocycle(p: &ModuliPoint, algebra: Algebra, t: &Trilinear) -> (MatrixSuper, Grassmann<f64>) {
    (v_matrix(&p.omega, algebra, 0, 1), a_cochain(&p.omega, &p.psi, t, [0, 1, 2]))
}

/// The recovered two-term algebra: `mu1 = 0`, `mu2 = [,]`, `mu3 = k (x, [y, z])`.
pub fn string_lie2_products(algebra: Algebra, t: &Trilinear) -> TwoTermLInfty {
    TwoTermLInfty::string(algebra, t)
}

fn omega_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9).wrapping_add(i as u64)
}

/// Dual-route residuals over `samples` seeded moduli per algebra.
pub fn dual_route_checks(seed: u64, samples: usize, t: &Trilinear, tol: f64) -> Vec<Check> {
    let mut out = Vec::new();
    for algebra in [Algebra::Su2, Algebra::Spin4] {
        let rows: Vec<DualRoute> = (0..samples)
            .into_par_iter()
            .map(|i| {
                let mut rng = substream(omega_seed(seed, i), 0xD1FF);
                let w = random_omega(&mut rng, algebra);
                let psi: f64 = rng.sample(StandardNormal);
                differentiate(&w, psi, t)
            })
            .collect();
        let col = |f: fn(&DualRoute) -> f64| rows.iter().map(f).collect::<Vec<_>>();
        out.push(Check::from_residuals(format!("{algebra}.d_omega"), &col(|r| r.d_omega_residual), tol));
        out.push(Check::from_residuals(format!("{algebra}.d_psi"), &col(|r| r.d_psi_residual), tol));
        out.push(Check::from_residuals(
            format!("{algebra}.descent_identity"),
            &col(|r| r.descent_identity_residual),
            tol,
        ));
        out.push(Check::from_residuals(format!("{algebra}.a_relation"), &col(|r| r.alpha_relation_residual), tol));
    }
    out
}

/// Residuals of the equivalence relations after `equivalence_transform` on seeded inputs.
pub fn equivalence_checks(seed: u64, samples: usize, t: &Trilinear, tol: f64) -> Result<Vec<Check>, DiffError> {
    let mut out = Vec::new();
    for algebra in [Algebra::Su2, Algebra::Spin4] {
        let rows = (0..samples)
            .into_par_iter()
            .map(|i| {
                let mut rng = substream(omega_seed(seed, i), 0xE0E0);
                let p = random_moduli(&mut rng, algebra);
                let c = CoboundaryModuli::random(&mut rng, algebra);
                let q = equivalence_transform(&p, &c, t, algebra)?;
                let full = equivalence_residuals(&p, &c, &q, t, algebra)?;
                let unit = CoboundaryModuli {
                    beta: GaugeElement::identity(algebra),
                    ..c.clone()
                };
                let qu = equivalence_transform(&p, &unit, t, algebra)?;
                let at_unit = equivalence_residuals(&p, &unit, &qu, t, algebra)?;
                Ok((full, at_unit))
            })
            .collect::<Result<Vec<_>, DiffError>>()?;
        let col = |f: fn(&(EquivalenceResiduals, EquivalenceResiduals)) -> f64| rows.iter().map(f).collect::<Vec<_>>();
        out.push(Check::from_residuals(format!("{algebra}.gluing"), &col(|r| r.0.gluing), tol));
        out.push(Check::from_residuals(format!("{algebra}.relation_moduli"), &col(|r| r.0.quadratic), tol));
        out.push(Check::from_residuals(format!("{algebra}.automatic"), &col(|r| r.0.cubic), tol));
        out.push(Check::from_residuals(format!("{algebra}.automatic_unit_beta"), &col(|r| r.1.cubic), tol));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::rng_from_seed;

    #[test]
    fn odd_product_cancels() {
        // (1 + w t0)(1 - w t0) = 1 for matrix-valued odd w
        let mut rng = rng_from_seed(1);
        let w = to_matrix(&random_omega(&mut rng, Algebra::Su2).as_super());
        let one = identity_super(2);
        let p = (&one + &w.times(&theta(0))).matmul(&(&one - &w.times(&theta(0))));
        assert!((&p - &one).max_norm() < 1e-15);
    }

    #[test]
    fn shift_of_linear_descent_term_vanishes() {
        let mut rng = rng_from_seed(2);
        let w = random_omega(&mut rng, Algebra::Su2).as_super();
        let lin = rtimes(&w, &(&theta(0) - &theta(1)));
        assert_eq!(lin.shift_derivative(THETA_MASK).max_norm(), 0.0);
    }

    #[test]
    fn dual_routes_agree() {
        let t = Trilinear::new(1.0);
        let mut rng = rng_from_seed(3);
        for algebra in [Algebra::Su2, Algebra::Spin4] {
            for _ in 0..20 {
                let r = differentiate(&random_omega(&mut rng, algebra), 0.7, &t);
                assert!(r.d_omega_residual < 1e-13, "{r:?}");
                assert!(r.d_psi_residual < 1e-13, "{r:?}");
                assert!(r.descent_identity_residual < 1e-13, "{r:?}");
                assert!(r.alpha_relation_residual < 1e-13, "{r:?}");
                assert!(r.d_omega_norm > 0.1 && r.d_psi_norm > 0.01);
            }
        }
    }

    #[test]
    fn abelian_omega() {
        let e3 = AlgebraElement::basis(Algebra::Su2, 2);
        let w = OddElement::new(XI0, vec![e3, e3 * 2.0]);
        let r = differentiate(&w, 0.0, &Trilinear::new(1.0));
        assert!(r.d_omega_norm < 1e-15 && r.d_psi_norm < 1e-15);
    }

    #[test]
    fn dlog_matches_finite_difference() {
        let mut rng = rng_from_seed(4);
        let g = random_su2(&mut rng);
        let g = if g.x < 0.0 { g.inv() } else { g };
        let phi = g.log().unwrap();
        let m = random_algebra(&mut rng, Algebra::Su2);
        let h = 1e-5;
        let f = |s: f64| (g * Su2::exp(&m, s).unwrap()).log().unwrap();
        let fd = (f(h) - f(-h)) * (0.5 / h);
        assert!((fd - dlog(&phi, &m)).norm() < 1e-8);
    }

    #[test]
    fn identity_coboundary_is_trivial() {
        let t = Trilinear::new(1.0);
        let mut rng = rng_from_seed(5);
        let p = random_moduli(&mut rng, Algebra::Su2);
        let q = equivalence_transform(&p, &CoboundaryModuli::identity(Algebra::Su2), &t, Algebra::Su2).unwrap();
        assert!((&q.omega - &p.omega).max_norm() < 1e-15);
        assert!((&q.psi - &p.psi).max_norm() < 1e-15);
    }

    #[test]
    fn equivalence_relations() {
        let t = Trilinear::new(1.0);
        let mut rng = rng_from_seed(6);
        for algebra in [Algebra::Su2, Algebra::Spin4] {
            for _ in 0..10 {
                let p = random_moduli(&mut rng, algebra);
                let c = CoboundaryModuli::random(&mut rng, algebra);
                let q = equivalence_transform(&p, &c, &t, algebra).unwrap();
                let r = equivalence_residuals(&p, &c, &q, &t, algebra).unwrap();
                assert!(r.gluing < 1e-12 && r.quadratic < 1e-12 && r.other == 0.0, "{r:?}");
            }
        }
    }

    #[test]
    fn cubic_relation_by_parameter() {
        let t = Trilinear::new(1.0);
        let mut rng = rng_from_seed(7);
        let algebra = Algebra::Su2;
        let p = random_moduli(&mut rng, algebra);
        let full = CoboundaryModuli::random(&mut rng, algebra);
        let id = CoboundaryModuli::identity(algebra);
        let cubic = |c: &CoboundaryModuli| {
            let q = equivalence_transform(&p, c, &t, algebra).unwrap();
            equivalence_residuals(&p, c, &q, &t, algebra).unwrap().cubic
        };
        let no_delta = CoboundaryModuli { delta: Grassmann::zero(), ..full.clone() };
        let unit_beta = CoboundaryModuli { beta: id.beta, ..full.clone() };
        assert!(cubic(&no_delta) < 1e-12);
        assert!(cubic(&unit_beta) < 1e-12);
        // finite non-abelian beta together with an odd part: measured defect, linear in log beta
        assert!(cubic(&full) > 1e-3);
    }
}
