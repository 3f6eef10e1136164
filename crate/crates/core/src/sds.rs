//! Self-dual string configurations on R^4 minus the origin and their numerical verification.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cover::{phi1, CoverPoint};
use crate::forms::{gauge_transform, hodge, mc_residuals, one_form, FormField, FormValue, Point};
use crate::grassmann::{gen, Grassmann};
use crate::group::{Algebra, AlgebraElement, CMat, Su2};
use crate::linfty::Trilinear;
use crate::report::Check;
use crate::sampling::substream;

pub const DEFAULT_H: f64 = 1e-3;
pub const RICHARDSON_STEPS: [f64; 3] = [4e-3, 2e-3, 1e-3];
/// Samples closer than this to a coordinate hyperplane are rejected.
pub const HYPERPLANE_MARGIN: f64 = 0.1;
pub const RADIUS_RANGE: (f64, f64) = (0.5, 2.0);
/// Residual bound constant in `max residual < C h^2`.
pub const RESIDUAL_CONSTANT: f64 = 200.0;
/// Leading truncation bound of the five-point Laplacian of `1/|x|^2`:
/// `sum_mu h^2/12 |d_mu^4 Phi| <= 40 h^2 / r^6`, taken at the smallest sampled radius `r = 0.5`.
pub const LAPLACIAN_CONSTANT: f64 = 40.0 / 0.015625;

#[derive(Debug, Error, PartialEq)]
pub enum SdsError {
    #[error("point {0:?} is singular for this configuration")]
    Singular(Point),
    #[error("unknown solution {0}; expected 1 or 2")]
    UnknownSolution(u8),
}

/// Which of the two explicit solutions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Solution {
    /// Trivial transition function and a nonzero two-form potential.
    Potential,
    /// Vanishing two-form potential and the unit-quaternion transition function.
    Winding,
}

impl TryFrom<u8> for Solution {
    type Error = SdsError;
    fn try_from(n: u8) -> Result<Self, SdsError> {
        match n {
            1 => Ok(Solution::Potential),
            2 => Ok(Solution::Winding),
            _ => Err(SdsError::UnknownSolution(n)),
        }
    }
}

/// Prefactor convention for the two-form potential.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reading {
    /// Prefactor 3/8 with every index summed, exactly as printed.
    Literal,
    /// Prefactor 1/8 with every index summed.
    Normalized,
}

impl Reading {
    pub fn prefactor(self) -> f64 {
        match self {
            Reading::Literal => 3.0 / 8.0,
            Reading::Normalized => 1.0 / 8.0,
        }
    }
}

fn norm_sq(x: &Point) -> f64 {
    x.iter().map(|c| c * c).sum()
}

fn levi_civita4(i: usize, j: usize, k: usize, l: usize) -> f64 {
    let p = [i, j, k, l];
    let mut sign = 1.0;
    for a in 0..4 {
        for b in a + 1..4 {
            if p[a] == p[b] {
                return 0.0;
            }
            if p[a] > p[b] {
                sign = -sign;
            }
        }
    }
    sign
}

/// `Phi = 1 / |x|^2`.
pub fn phi(x: &Point) -> Result<f64, SdsError> {
    let r2 = norm_sq(x);
    if r2 == 0.0 {
        return Err(SdsError::Singular(*x));
    }
    Ok(1.0 / r2)
}

/// `* d Phi` from the analytic gradient `-2 x / |x|^4`.
pub fn star_d_phi(x: &Point) -> FormValue<f64> {
    let r2 = norm_sq(x);
    hodge(&one_form(x.map(|c| -2.0 * c / (r2 * r2))))
}

/// Five-point-per-axis Laplacian of `Phi`.
pub fn laplacian_phi(x: &Point, h: f64) -> Result<f64, SdsError> {
    let c = phi(x)?;
    let mut s = 0.0;
    for mu in 0..4 {
        let (mut p, mut m) = (*x, *x);
        p[mu] += h;
        m[mu] -= h;
        s += phi(&p)? - 2.0 * c + phi(&m)?;
    }
    Ok(s / (h * h))
}

/// The two-form potential of the first solution.
pub fn solution_b(x: &Point, reading: Reading) -> FormValue<f64> {
    let r2 = norm_sq(x);
    let profile: Vec<f64> = (0..4)
        .map(|l| {
            let rl = (r2 - x[l] * x[l]).sqrt();
            let at = if x[l] == 0.0 {
                std::f64::consts::FRAC_PI_2
            } else {
                (rl / x[l]).atan()
            };
            (r2 * at - rl * x[l]) / (r2 * rl.powi(3))
        })
        .collect();
    let mut out = Grassmann::zero();
    for mu in 0..4 {
        for nu in 0..4 {
            if mu == nu {
                continue;
            }
            let mut c = 0.0;
            for k in 0..4 {
                for (l, pl) in profile.iter().enumerate() {
                    c += levi_civita4(mu, nu, k, l) * x[k] * pl;
                }
            }
            let m = gen(mu as u32) | gen(nu as u32);
            let sign = if mu < nu { 1.0 } else { -1.0 };
            out.add_term(m, sign * reading.prefactor() * c);
        }
    }
    out
}

/// The transition function of the second solution, `phi1(x / |x|)`.
pub fn solution_v(x: &Point) -> Result<CoverPoint, SdsError> {
    let g = Su2::from_vector(*x).ok_or(SdsError::Singular(*x))?;
    Ok(phi1(g))
}

fn group_matrix(x: &Point) -> CMat {
    let n = norm_sq(x).sqrt();
    Su2 {
        x: x[0] / n,
        y: x[1] / n,
        z: x[2] / n,
        w: x[3] / n,
    }
    .to_matrix()
}

/// `A = g^-1 dg` for `g = pi(solution_v(x))`, by central differences.
pub fn pure_gauge(h: f64) -> FormField<AlgebraElement> {
    FormField::new(1, move |x: &Point| {
        let gi = group_matrix(x).adjoint();
        let comps: [AlgebraElement; 4] = std::array::from_fn(|mu| {
            let (mut p, mut m) = (*x, *x);
            p[mu] += h;
            m[mu] -= h;
            let dg = (group_matrix(&p) - group_matrix(&m)).scale(0.5 / h);
            AlgebraElement::from_matrix(Algebra::Su2, &(gi * dg))
        });
        one_form(comps)
    })
}

/// Connection and two-form potential of a solution.
pub fn fields(solution: Solution, reading: Reading, h: f64) -> (FormField<AlgebraElement>, FormField<f64>) {
    match solution {
        Solution::Potential => (
            FormField::zero(1),
            FormField::new(2, move |x: &Point| solution_b(x, reading)),
        ),
        Solution::Winding => (pure_gauge(h), FormField::zero(2)),
    }
}

/// Seeded samples with `|x|` in the radius range and every coordinate away from zero.
pub fn sample_points(seed: u64, n: usize) -> (Vec<Point>, usize) {
    let mut rng = substream(seed, 0x5D5);
    let mut out = Vec::with_capacity(n);
    let mut rejected = 0;
    while out.len() < n {
        let dir = crate::sampling::random_s3(&mut rng);
        let r = rng.random_range(RADIUS_RANGE.0..=RADIUS_RANGE.1);
        let x = dir.map(|c| c * r);
        if x.iter().any(|c| c.abs() < HYPERPLANE_MARGIN) {
            rejected += 1;
            continue;
        }
        out.push(x);
    }
    (out, rejected)
}

/// Per-sample residuals of one solution.
#[derive(Clone, Debug, Serialize)]
pub struct SampleResiduals {
    pub h_minus_star_dphi: f64,
    pub flatness: f64,
    pub laplacian: f64,
    /// Ratio `<H, * d Phi> / |* d Phi|^2`.
    pub ratio: f64,
}

pub fn sample_residuals(solution: Solution, reading: Reading, t: &Trilinear, h: f64, x: &Point) -> SampleResiduals {
    let (a, b) = fields(solution, reading, h);
    let (f, hh) = mc_residuals(&a, &b, t, h, x);
    let s = star_d_phi(x);
    let (mut dot, mut ss) = (0.0, 0.0);
    for (m, c) in s.terms() {
        dot += c * hh.coefficient(m).copied().unwrap_or(0.0);
        ss += c * c;
    }
    SampleResiduals {
        h_minus_star_dphi: (&hh - &s).max_norm(),
        flatness: f.max_norm(),
        laplacian: laplacian_phi(x, h).map_or(f64::INFINITY, f64::abs),
        ratio: dot / ss,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SdsConfig {
    pub solution: Solution,
    pub reading: Reading,
    pub h: f64,
    pub samples: usize,
    pub seed: u64,
    pub k: f64,
}

impl Default for SdsConfig {
    fn default() -> Self {
        SdsConfig {
            solution: Solution::Potential,
            reading: Reading::Literal,
            h: DEFAULT_H,
            samples: 512,
            seed: 0,
            k: 1.0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SdsReport {
    pub checks: Vec<Check>,
    pub convergence_order: OrderReport,
    pub excluded_samples: usize,
    pub ratio_mean: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderReport {
    pub steps: Vec<f64>,
    pub max_residual: Vec<f64>,
    pub orders: Vec<f64>,
    pub min_order: f64,
}

impl OrderReport {
    pub fn from_errors(steps: &[f64], errs: Vec<f64>) -> Self {
        let orders: Vec<f64> = errs
            .windows(2)
            .zip(steps.windows(2))
            .map(|(e, h)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln())
            .collect();
        let min_order = orders.iter().copied().fold(f64::INFINITY, f64::min);
        OrderReport {
            steps: steps.to_vec(),
            max_residual: errs,
            orders,
            min_order,
        }
    }
}

fn max_of(rows: &[SampleResiduals], f: fn(&SampleResiduals) -> f64) -> f64 {
    rows.iter().map(f).fold(0.0, f64::max)
}

/// Runs the three residual families and the step-halving order estimate.
pub fn sds_verify(cfg: &SdsConfig) -> SdsReport {
    let t = Trilinear::new(cfg.k);
    let (points, excluded) = sample_points(cfg.seed, cfg.samples);
    let run = |h: f64| -> Vec<SampleResiduals> {
        points
            .par_iter()
            .map(|x| sample_residuals(cfg.solution, cfg.reading, &t, h, x))
            .collect()
    };
    let rows = run(cfg.h);
    let tol = RESIDUAL_CONSTANT * cfg.h * cfg.h;
    let col = |f: fn(&SampleResiduals) -> f64| rows.iter().map(f).collect::<Vec<_>>();
    let mut checks = vec![
        Check::from_residuals("h_minus_star_dphi", &col(|r| r.h_minus_star_dphi), tol),
        Check::from_residuals("flatness", &col(|r| r.flatness), tol),
        Check::from_residuals("laplacian", &col(|r| r.laplacian), LAPLACIAN_CONSTANT * cfg.h * cfg.h),
    ];
    let errs: Vec<f64> = RICHARDSON_STEPS
        .iter()
        .map(|&h| max_of(&run(h), |r| r.h_minus_star_dphi))
        .collect();
    let order = OrderReport::from_errors(&RICHARDSON_STEPS, errs);
    checks.push(Check::from_residuals("richardson_order", &[(1.9 - order.min_order).max(0.0)], 1e-300)
        .with_note(format!("minimum observed order {:.3}, required >= 1.9", order.min_order)));
    let ratio_mean = rows.iter().map(|r| r.ratio).sum::<f64>() / rows.len().max(1) as f64;
    SdsReport {
        checks,
        convergence_order: order,
        excluded_samples: excluded,
        ratio_mean,
    }
}

/// Residual growth of the winding solution under a first-order gauge transformation.
#[derive(Clone, Debug, Serialize)]
pub struct GaugeGrowth {
    pub eps: Vec<f64>,
    pub growth: Vec<f64>,
    /// Least-squares slope of `log growth` against `log eps`.
    pub slope: f64,
}

pub const GAUGE_EPS: [f64; 3] = [1e-2, 1e-3, 1e-4];

fn gauge_parameters(seed: u64) -> (FormField<AlgebraElement>, FormField<f64>) {
    let mut rng = substream(seed, 0x6A06);
    let c: [[f64; 4]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| rng.random_range(-1.0..1.0)));
    let z: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
    let x = FormField::new(0, move |p: &Point| {
        let v: [f64; 3] = std::array::from_fn(|a| (0..4).map(|m| c[a][m] * p[m]).sum::<f64>().sin());
        Grassmann::scalar(AlgebraElement::from_su2(v))
    });
    let zeta = FormField::new(1, move |p: &Point| one_form(std::array::from_fn(|m| (z[m] * p[(m + 1) % 4]).cos())));
    (x, zeta)
}

pub fn gauge_growth(seed: u64, samples: usize, k: f64, h: f64) -> GaugeGrowth {
    let t = Trilinear::new(k);
    let (points, _) = sample_points(seed, samples);
    let (a, b) = fields(Solution::Winding, Reading::Literal, h);
    let (x, zeta) = gauge_parameters(seed);
    let growth: Vec<f64> = GAUGE_EPS
        .iter()
        .map(|&eps| {
            let (a2, b2) = gauge_transform(&a, &b, &x, &zeta, t, eps, h);
            points
                .par_iter()
                .map(|p| {
                    let (f0, h0) = mc_residuals(&a, &b, &t, h, p);
                    let (f1, h1) = mc_residuals(&a2, &b2, &t, h, p);
                    (&f1 - &f0).max_norm().max((&h1 - &h0).max_norm())
                })
                .reduce(|| 0.0, f64::max)
        })
        .collect();
    let lx: Vec<f64> = GAUGE_EPS.iter().map(|e| e.ln()).collect();
    let ly: Vec<f64> = growth.iter().map(|g| g.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    GaugeGrowth {
        eps: GAUGE_EPS.to_vec(),
        growth,
        slope: cov / var,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_on_unit_sphere() {
        assert_eq!(phi(&[0.5, 0.5, 0.5, 0.5]).unwrap(), 1.0);
        assert!(phi(&[0.0; 4]).is_err());
    }

    #[test]
    fn transition_is_unit() {
        let v = solution_v(&[0.3, -1.2, 0.4, 0.9]).unwrap();
        let g = v.element();
        assert!((g.norm_sq() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn winding_solution_matches() {
        let t = Trilinear::new(1.0);
        let (pts, _) = sample_points(1, 16);
        for x in &pts {
            let r = sample_residuals(Solution::Winding, Reading::Literal, &t, 1e-3, x);
            assert!(r.h_minus_star_dphi < 1e-4 && r.flatness < 1e-4, "{r:?}");
        }
    }

    #[test]
    fn potential_readings() {
        let t = Trilinear::new(1.0);
        let (pts, _) = sample_points(2, 16);
        for x in &pts {
            let lit = sample_residuals(Solution::Potential, Reading::Literal, &t, 1e-3, x);
            let nor = sample_residuals(Solution::Potential, Reading::Normalized, &t, 1e-3, x);
            assert!((lit.ratio - 3.0).abs() < 1e-4, "{lit:?}");
            assert!(nor.h_minus_star_dphi < 1e-4, "{nor:?}");
        }
    }

    #[test]
    fn both_solutions_share_h() {
        let t = Trilinear::new(1.0);
        let (pts, _) = sample_points(3, 16);
        let (_, b1) = fields(Solution::Potential, Reading::Normalized, 1e-3);
        let (a2, b2) = fields(Solution::Winding, Reading::Normalized, 1e-3);
        let (a1, _) = fields(Solution::Potential, Reading::Normalized, 1e-3);
        for x in &pts {
            let (_, h1) = mc_residuals(&a1, &b1, &t, 1e-3, x);
            let (_, h2) = mc_residuals(&a2, &b2, &t, 1e-3, x);
            assert!((&h1 - &h2).max_norm() < 1e-4);
        }
    }

    #[test]
    fn gauge_slope_is_quadratic() {
        let r = gauge_growth(4, 8, 1.0, DEFAULT_H);
        assert!(r.slope >= 1.9, "{r:?}");
    }
}
