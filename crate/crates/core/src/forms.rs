//! Differential forms on R^4 sampled pointwise, with central finite-difference exterior
//! derivatives, the Euclidean Hodge star, Maurer-Cartan residuals and gauge transformations.

use std::sync::Arc;

use crate::grassmann::{gen, monomial_sign, Coefficient, Grassmann};
use crate::group::AlgebraElement;
use crate::linfty::Trilinear;

pub type Point = [f64; 4];
/// A form at one point: a Grassmann number over `dx^0..dx^3`.
pub type FormValue<T> = Grassmann<T>;

const VOLUME: u32 = 0b1111;

type Eval<T> = Arc<dyn Fn(&Point) -> FormValue<T> + Send + Sync>;

/// A form field given by a pointwise evaluator.
#[derive(Clone)]
pub struct FormField<T> {
    pub degree: usize,
    eval: Eval<T>,
}

impl<T: Coefficient + Send + Sync + 'static> FormField<T> {
    pub fn new(degree: usize, f: impl Fn(&Point) -> FormValue<T> + Send + Sync + 'static) -> Self {
        FormField {
            degree,
            eval: Arc::new(f),
        }
    }

    pub fn zero(degree: usize) -> Self {
        Self::new(degree, |_| Grassmann::zero())
    }

    pub fn eval(&self, x: &Point) -> FormValue<T> {
        (self.eval)(x)
    }

    /// Central-difference exterior derivative with step `h`.
    pub fn d(&self, h: f64) -> Self {
        let f = self.eval.clone();
        Self::new(self.degree + 1, move |x| ext_d(&*f, x, h))
    }

    pub fn plus(&self, o: &Self) -> Self {
        let (f, g) = (self.eval.clone(), o.eval.clone());
        Self::new(self.degree, move |x| &f(x) + &g(x))
    }

    pub fn scale(&self, s: f64) -> Self {
        let f = self.eval.clone();
        Self::new(self.degree, move |x| f(x).scale(s))
    }
}

/// `sum_mu dx^mu (f(x + h e_mu) - f(x - h e_mu)) / 2h`.
pub fn ext_d<T: Coefficient>(f: &dyn Fn(&Point) -> FormValue<T>, x: &Point, h: f64) -> FormValue<T> {
    let mut out = Grassmann::zero();
    for mu in 0..4 {
        let (mut xp, mut xm) = (*x, *x);
        xp[mu] += h;
        xm[mu] -= h;
        let diff = (&f(&xp) - &f(&xm)).scale(0.5 / h);
        out = &out + &dx_wedge(mu, &diff);
    }
    out
}

/// `dx^mu ^ f`.
pub fn dx_wedge<T: Coefficient>(mu: usize, f: &FormValue<T>) -> FormValue<T> {
    let dx = Grassmann::generator(mu as u32);
    dx.product(f, |a, c| c.scale(*a))
}

/// Euclidean Hodge star with `dx^0 dx^1 dx^2 dx^3` positively oriented.
pub fn hodge<T: Coefficient>(f: &FormValue<T>) -> FormValue<T> {
    let mut out = Grassmann::zero();
    for (m, c) in f.terms() {
        let comp = VOLUME & !m;
        out.add_term(comp, c.scale(monomial_sign(m, comp) as f64));
    }
    out
}

/// The one-form `sum_mu c_mu dx^mu`.
pub fn one_form<T: Coefficient>(c: [T; 4]) -> FormValue<T> {
    let mut out = Grassmann::zero();
    for (mu, v) in c.into_iter().enumerate() {
        out.add_term(gen(mu as u32), v);
    }
    out
}

/// `[x, y]` on algebra-valued forms: bracket on values, wedge on form parts.
pub fn form_bracket(x: &FormValue<AlgebraElement>, y: &FormValue<AlgebraElement>) -> FormValue<AlgebraElement> {
    x.product(y, |a, b| a.bracket_unchecked(b))
}

/// Curvature `dA + 1/2 [A, A]` and three-form curvature `dB - 1/3! mu3(A, A, A)` at a point.
pub fn mc_residuals(
    a: &FormField<AlgebraElement>,
    b: &FormField<f64>,
    t: &Trilinear,
    h: f64,
    x: &Point,
) -> (FormValue<AlgebraElement>, FormValue<f64>) {
    let av = a.eval(x);
    let f = &a.d(h).eval(x) + &form_bracket(&av, &av).scale(0.5);
    let hh = &b.d(h).eval(x) - &t.on_moduli(&av, &av, &av).scale(1.0 / 6.0);
    (f, hh)
}

/// First-order gauge transformation `A + eps (dx + [A, x])`, `B + eps (-d zeta + 1/2 mu3(x, A, A))`.
pub fn gauge_transform(
    a: &FormField<AlgebraElement>,
    b: &FormField<f64>,
    x: &FormField<AlgebraElement>,
    zeta: &FormField<f64>,
    t: Trilinear,
    eps: f64,
    h: f64,
) -> (FormField<AlgebraElement>, FormField<f64>) {
    let (a0, x0) = (a.clone(), x.clone());
    let dx = x.d(h);
    let da = FormField::new(1, move |p| &dx.eval(p) + &form_bracket(&a0.eval(p), &x0.eval(p)));
    let (a1, x1) = (a.clone(), x.clone());
    let dz = zeta.d(h);
    let db = FormField::new(2, move |p| {
        let av = a1.eval(p);
        &t.on_moduli(&x1.eval(p), &av, &av).scale(0.5) - &dz.eval(p)
    });
    (a.plus(&da.scale(eps)), b.plus(&db.scale(eps)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn smooth() -> FormField<f64> {
        FormField::new(0, |x| Grassmann::scalar((x[0] * x[1]).sin() + x[2] * x[3].exp()))
    }

    #[test]
    fn d_of_constant() {
        let c = FormField::new(0, |_| Grassmann::scalar(3.0));
        assert_eq!(c.d(1e-3).eval(&[0.3, 0.1, 0.2, 0.4]).max_norm(), 0.0);
    }

    #[test]
    fn d_squared_vanishes() {
        let dd = smooth().d(1e-3).d(1e-3);
        assert!(dd.eval(&[0.3, -0.2, 0.5, 0.1]).max_norm() < 1e-9);
    }

    #[test]
    fn double_star_on_two_forms() {
        let mut f = Grassmann::zero();
        for (i, m) in [0b0011u32, 0b0101, 0b1001, 0b0110, 0b1010, 0b1100].into_iter().enumerate() {
            f.add_term(m, i as f64 + 1.0);
        }
        assert_eq!((&hodge(&hodge(&f)) - &f).max_norm(), 0.0);
        assert_eq!(hodge(&Grassmann::scalar(1.0)).coefficient(VOLUME), Some(&1.0));
    }

    #[test]
    fn derivative_order() {
        let x: Point = [0.3, -0.2, 0.5, 0.1];
        let exact = one_form([
            x[1] * (x[0] * x[1]).cos(),
            x[0] * (x[0] * x[1]).cos(),
            x[3].exp(),
            x[2] * x[3].exp(),
        ]);
        let err = |h: f64| (&smooth().d(h).eval(&x) - &exact).max_norm();
        let order = (err(2e-3) / err(1e-3)).log2();
        assert!(order > 1.9, "{order}");
    }
}
