//! Cocycle and coboundary validators over a three-patch cover of S^3: ordinary bundles,
//! strict 2-bundles with crossed module `G -> G`, weak string 2-bundles, and Deligne data.

use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cover::{otimes, phi1, phi2, phi3, unit, CoverPoint};
use crate::forms::{ext_d, one_form, FormValue, Point};
use crate::grassmann::Grassmann;
use crate::group::{Algebra, AlgebraElement, CMat, Su2};
use crate::linfty::Trilinear;
use crate::report::{circle_distance, Check};
use crate::sampling::{random_s3, substream};
use crate::sm::{generate_coboundary_cocycle, SmThreeCocycle};

pub const PATCHES: usize = 3;
/// Patch `i` is `{x in S^3 : x_i > PATCH_THRESHOLD}`.
pub const PATCH_THRESHOLD: f64 = -0.6;
pub const DEFAULT_SAMPLES: usize = 360;
pub const MIN_OVERLAP_SAMPLES: usize = 200;
/// Bound constant for relations that involve finite differences, `C h^2`.
pub const FD_CONSTANT: f64 = 200.0;

#[derive(Debug, Error)]
pub enum CocycleError {
    #[error("overlap {0:?} has no samples")]
    EmptyOverlap(Vec<usize>),
    #[error("invalid request: {0}")]
    Request(String),
}

/// Point cloud on S^3 with its patch memberships.
#[derive(Clone, Debug, Serialize)]
pub struct SampledCover {
    pub points: Vec<Point>,
    pub membership: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OverlapCount {
    pub patches: Vec<usize>,
    pub samples: usize,
}

pub fn in_patch(i: usize, x: &Point) -> bool {
    x[i] > PATCH_THRESHOLD
}

impl SampledCover {
    pub fn sample(seed: u64, n: usize) -> Self {
        let mut rng = substream(seed, 0xC0E5);
        let points: Vec<Point> = (0..n).map(|_| random_s3(&mut rng)).collect();
        let membership = points
            .iter()
            .map(|x| (0..PATCHES).filter(|&i| in_patch(i, x)).collect())
            .collect();
        SampledCover { points, membership }
    }

    /// Sample counts of every double and triple overlap of distinct patches.
    pub fn overlap_counts(&self) -> Vec<OverlapCount> {
        let sets: [&[usize]; 4] = [&[0, 1], &[0, 2], &[1, 2], &[0, 1, 2]];
        sets.iter()
            .map(|s| OverlapCount {
                patches: s.to_vec(),
                samples: self.membership.iter().filter(|m| s.iter().all(|i| m.contains(i))).count(),
            })
            .collect()
    }

    /// Index of the first sample in the triple overlap.
    pub fn triple_point(&self) -> Option<usize> {
        self.membership.iter().position(|m| m.len() == PATCHES)
    }

    fn tuples(&self, x: usize, n: usize) -> Vec<Vec<usize>> {
        let m = &self.membership[x];
        let mut out = vec![vec![]];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|t| {
                    m.iter().map(move |&i| {
                        let mut t = t.clone();
                        t.push(i);
                        t
                    })
                })
                .collect();
        }
        out
    }

    /// Evaluates named residual families over every index tuple of the given arity at every sample.
    fn residuals(
        &self,
        arity: usize,
        names: &[&str],
        f: impl Fn(&[usize], &Point) -> Vec<f64> + Sync,
    ) -> Vec<Vec<f64>> {
        let per_point: Vec<Vec<Vec<f64>>> = (0..self.points.len())
            .into_par_iter()
            .map(|p| {
                self.tuples(p, arity)
                    .iter()
                    .map(|t| f(t, &self.points[p]))
                    .collect()
            })
            .collect();
        let mut out = vec![Vec::new(); names.len()];
        for rows in per_point {
            for r in rows {
                for (o, v) in out.iter_mut().zip(r) {
                    o.push(v);
                }
            }
        }
        out
    }
}

type PatchFn<T> = Arc<dyn Fn(usize, &Point) -> T + Send + Sync>;
type PairFn<T> = Arc<dyn Fn(usize, usize, &Point) -> T + Send + Sync>;
type TripleFn<T> = Arc<dyn Fn(usize, usize, usize, &Point) -> T + Send + Sync>;
type AlgForm = FormValue<AlgebraElement>;
type RealForm = FormValue<f64>;

/// Smooth map to the Lie algebra, `amp * sin(c_a . x + phase_a)` per component.
#[derive(Clone, Copy, Debug)]
struct Wave {
    c: [[f64; 4]; 3],
    phase: [f64; 3],
    amp: f64,
    torus: bool,
}

impl Wave {
    fn random<R: Rng + ?Sized>(rng: &mut R, amp: f64, torus: bool) -> Self {
        Wave {
            c: std::array::from_fn(|_| std::array::from_fn(|_| rng.random_range(-1.5..1.5))),
            phase: std::array::from_fn(|_| rng.random_range(0.0..std::f64::consts::TAU)),
            amp,
            torus,
        }
    }

    fn scalar(&self, x: &Point, a: usize) -> f64 {
        let s: f64 = (0..4).map(|m| self.c[a][m] * x[m]).sum();
        self.amp * (s + self.phase[a]).sin()
    }

    fn algebra(&self, x: &Point) -> AlgebraElement {
        if self.torus {
            AlgebraElement::from_su2([0.0, 0.0, self.scalar(x, 2)])
        } else {
            AlgebraElement::from_su2(std::array::from_fn(|a| self.scalar(x, a)))
        }
    }

    fn group(&self, x: &Point) -> Su2 {
        Su2::exp(&self.algebra(x), 1.0).expect("su(2) element")
    }
}

fn waves(seed: u64, tag: u64, n: usize, amp: f64, torus: bool) -> Vec<Wave> {
    let mut rng = substream(seed, tag);
    (0..n).map(|_| Wave::random(&mut rng, amp, torus)).collect()
}

/// Antisymmetric smooth pair functions with vanishing diagonal.
fn pair_waves(seed: u64, tag: u64, amp: f64) -> PairFn<f64> {
    let w = waves(seed, tag, PATCHES * PATCHES, amp, false);
    Arc::new(move |i, j, x| {
        if i == j {
            0.0
        } else {
            let (a, b) = (i.min(j), i.max(j));
            let s = if i < j { 1.0 } else { -1.0 };
            s * w[a * PATCHES + b].scalar(x, 0)
        }
    })
}

fn is_target(x: &Point, target: &Option<Point>) -> bool {
    target.is_some_and(|t| t == *x)
}

// ---------------------------------------------------------------- ordinary

#[derive(Clone)]
pub struct OrdinaryCocycle {
    pub g: PairFn<Su2>,
}

#[derive(Clone)]
pub struct OrdinaryCoboundary {
    pub gamma: PatchFn<Su2>,
}

impl OrdinaryCocycle {
    pub fn trivial() -> Self {
        OrdinaryCocycle {
            g: Arc::new(|_, _, _| Su2::IDENTITY),
        }
    }

    /// Independent random transition functions with `g_ii = 1` and `g_ji = g_ij^-1`.
    pub fn unrelated(seed: u64) -> Self {
        let w = waves(seed, 0x0A, PATCHES * PATCHES, 0.5, false);
        OrdinaryCocycle {
            g: Arc::new(move |i, j, x| match i.cmp(&j) {
                std::cmp::Ordering::Equal => Su2::IDENTITY,
                std::cmp::Ordering::Less => w[i * PATCHES + j].group(x),
                std::cmp::Ordering::Greater => w[j * PATCHES + i].group(x).inv(),
            }),
        }
    }

    pub fn transform(&self, d: &OrdinaryCoboundary) -> Self {
        let (g, gamma) = (self.g.clone(), d.gamma.clone());
        OrdinaryCocycle {
            g: Arc::new(move |i, j, x| gamma(i, x) * g(i, j, x) * gamma(j, x).inv()),
        }
    }

    /// Multiplies `g_01` by a fixed rotation at one sample point.
    pub fn perturbed(&self, target: Point) -> Self {
        let g = self.g.clone();
        let kick = Su2::exp(&AlgebraElement::from_su2([0.1, 0.0, 0.0]), 1.0).expect("su2");
        let t = Some(target);
        OrdinaryCocycle {
            g: Arc::new(move |i, j, x| {
                let v = g(i, j, x);
                if is_target(x, &t) && (i, j) == (0, 1) {
                    v * kick
                } else if is_target(x, &t) && (i, j) == (1, 0) {
                    kick.inv() * v
                } else {
                    v
                }
            }),
        }
    }
}

impl OrdinaryCoboundary {
    pub fn random(seed: u64, torus: bool) -> Self {
        let w = waves(seed, 0x0B, PATCHES, 0.4, torus);
        OrdinaryCoboundary {
            gamma: Arc::new(move |i, x| w[i].group(x)),
        }
    }
}

pub fn validate_ordinary(c: &OrdinaryCocycle, cover: &SampledCover, tol: f64) -> Vec<Check> {
    let g = &c.g;
    let r = cover.residuals(3, &["triple_product"], |t, x| {
        let (i, j, k) = (t[0], t[1], t[2]);
        vec![(g(i, j, x) * g(j, k, x)).distance(&g(i, k, x))]
    });
    let u = cover.residuals(1, &["unit"], |t, x| vec![g(t[0], t[0], x).distance(&Su2::IDENTITY)]);
    vec![
        Check::from_residuals("ordinary.triple_product", &r[0], tol),
        Check::from_residuals("ordinary.unit", &u[0], tol),
    ]
}

/// `gamma_i g_ij = g'_ij gamma_j`.
pub fn validate_ordinary_coboundary(
    c: &OrdinaryCocycle,
    c2: &OrdinaryCocycle,
    d: &OrdinaryCoboundary,
    cover: &SampledCover,
    tol: f64,
) -> Vec<Check> {
    let r = cover.residuals(2, &["relation"], |t, x| {
        let (i, j) = (t[0], t[1]);
        vec![(d.gamma)(i, x) * (c.g)(i, j, x)]
            .into_iter()
            .map(|l| l.distance(&((c2.g)(i, j, x) * (d.gamma)(j, x))))
            .collect()
    });
    vec![Check::from_residuals("ordinary.coboundary", &r[0], tol)]
}

// ---------------------------------------------------------------- strict

/// Strict 2-cocycle for the crossed module `G -> G`, boundary the identity and action by conjugation.
#[derive(Clone)]
pub struct StrictCocycle {
    pub g: PairFn<Su2>,
    pub h: TripleFn<Su2>,
}

#[derive(Clone)]
pub struct StrictCoboundary {
    pub gamma: PatchFn<Su2>,
    pub chi: PairFn<Su2>,
}

fn act(g: Su2, h: Su2) -> Su2 {
    g * h * g.inv()
}

impl StrictCocycle {
    pub fn trivial() -> Self {
        StrictCocycle {
            g: Arc::new(|_, _, _| Su2::IDENTITY),
            h: Arc::new(|_, _, _, _| Su2::IDENTITY),
        }
    }

    /// Random `g` with `h_ijk` solved from the first relation.
    pub fn solved(seed: u64) -> Self {
        let g = OrdinaryCocycle::unrelated(seed).g;
        let g2 = g.clone();
        StrictCocycle {
            g,
            h: Arc::new(move |i, j, k, x| g2(i, k, x) * g2(j, k, x).inv() * g2(i, j, x).inv()),
        }
    }

    /// `g` from an ordinary cocycle and `h` identically one.
    pub fn from_ordinary(c: &OrdinaryCocycle) -> Self {
        StrictCocycle {
            g: c.g.clone(),
            h: Arc::new(|_, _, _, _| Su2::IDENTITY),
        }
    }

    /// Random `g` and independent random `h`: generically not a cocycle.
    pub fn unrelated(seed: u64) -> Self {
        let g = OrdinaryCocycle::unrelated(seed).g;
        let w = waves(seed, 0x0C, PATCHES.pow(3), 0.5, false);
        StrictCocycle {
            g,
            h: Arc::new(move |i, j, k, x| w[(i * PATCHES + j) * PATCHES + k].group(x)),
        }
    }

    pub fn transform(&self, d: &StrictCoboundary) -> Self {
        let (g, h, gamma, chi) = (self.g.clone(), self.h.clone(), d.gamma.clone(), d.chi.clone());
        let g2 = {
            let (g, gamma, chi) = (g.clone(), gamma.clone(), chi.clone());
            Arc::new(move |i: usize, j: usize, x: &Point| chi(i, j, x).inv() * gamma(i, x) * g(i, j, x) * gamma(j, x).inv())
        };
        let g2c = g2.clone();
        StrictCocycle {
            g: g2,
            h: Arc::new(move |i, j, k, x| {
                chi(i, k, x).inv() * act(gamma(i, x), h(i, j, k, x)) * chi(i, j, x) * act(g2c(i, j, x), chi(j, k, x))
            }),
        }
    }

    /// Perturbs `h_012` at one sample point.
    pub fn perturbed(&self, target: Point) -> Self {
        let h = self.h.clone();
        let kick = Su2::exp(&AlgebraElement::from_su2([0.0, 0.1, 0.0]), 1.0).expect("su2");
        let t = Some(target);
        StrictCocycle {
            g: self.g.clone(),
            h: Arc::new(move |i, j, k, x| {
                let v = h(i, j, k, x);
                if is_target(x, &t) && (i, j, k) == (0, 1, 2) {
                    v * kick
                } else {
                    v
                }
            }),
        }
    }
}

impl StrictCoboundary {
    pub fn identity() -> Self {
        StrictCoboundary {
            gamma: Arc::new(|_, _| Su2::IDENTITY),
            chi: Arc::new(|_, _, _| Su2::IDENTITY),
        }
    }

    pub fn random(seed: u64) -> Self {
        let gamma = OrdinaryCoboundary::random(seed, false).gamma;
        let w = waves(seed, 0x0D, PATCHES * PATCHES, 0.4, false);
        StrictCoboundary {
            gamma,
            chi: Arc::new(move |i, j, x| if i == j { Su2::IDENTITY } else { w[i * PATCHES + j].group(x) }),
        }
    }
}

pub fn validate_strict(c: &StrictCocycle, cover: &SampledCover, tol: f64) -> Vec<Check> {
    let (g, h) = (&c.g, &c.h);
    let r3 = cover.residuals(3, &["first"], |t, x| {
        let (i, j, k) = (t[0], t[1], t[2]);
        vec![(h(i, j, k, x) * g(i, j, x) * g(j, k, x)).distance(&g(i, k, x))]
    });
    let r4 = cover.residuals(4, &["second"], |t, x| {
        let (i, j, k, l) = (t[0], t[1], t[2], t[3]);
        let lhs = h(i, k, l, x) * h(i, j, k, x);
        let rhs = h(i, j, l, x) * act(g(i, j, x), h(j, k, l, x));
        vec![lhs.distance(&rhs)]
    });
    vec![
        Check::from_residuals("strict.boundary_relation", &r3[0], tol),
        Check::from_residuals("strict.h_relation", &r4[0], tol),
    ]
}

/// `gamma_i g_ij = chi_ij g'_ij gamma_j` and `chi_ik h'_ijk = (gamma_i . h_ijk) chi_ij (g'_ij . chi_jk)`.
pub fn validate_strict_coboundary(
    c: &StrictCocycle,
    c2: &StrictCocycle,
    d: &StrictCoboundary,
    cover: &SampledCover,
    tol: f64,
) -> Vec<Check> {
    let (gamma, chi) = (&d.gamma, &d.chi);
    let r2 = cover.residuals(2, &["g"], |t, x| {
        let (i, j) = (t[0], t[1]);
        let lhs = gamma(i, x) * (c.g)(i, j, x);
        vec![lhs.distance(&(chi(i, j, x) * (c2.g)(i, j, x) * gamma(j, x)))]
    });
    let r3 = cover.residuals(3, &["h"], |t, x| {
        let (i, j, k) = (t[0], t[1], t[2]);
        let lhs = chi(i, k, x) * (c2.h)(i, j, k, x);
        let rhs = act(gamma(i, x), (c.h)(i, j, k, x)) * chi(i, j, x) * act((c2.g)(i, j, x), chi(j, k, x));
        vec![lhs.distance(&rhs)]
    });
    vec![
        Check::from_residuals("strict.coboundary_g", &r2[0], tol),
        Check::from_residuals("strict.coboundary_h", &r3[0], tol),
    ]
}

// ---------------------------------------------------------------- weak

/// Degree-2 Cech cocycle with values in the weak 2-group; `a` is a real lift of the circle value.
#[derive(Clone)]
pub struct WeakCocycle {
    pub v: PairFn<CoverPoint>,
    pub a: TripleFn<f64>,
}

#[derive(Clone)]
pub struct WeakCoboundary {
    pub beta: PatchFn<CoverPoint>,
    pub alpha: PairFn<f64>,
}

fn l12(l: &SmThreeCocycle, x: CoverPoint, y: CoverPoint) -> f64 {
    l.lambda12.raw(&[x, y])
}

fn l03(l: &SmThreeCocycle, x: &CoverPoint, y: &CoverPoint, z: &CoverPoint) -> f64 {
    l.lambda03.raw(&[phi3(x, y, z)])
}

impl WeakCocycle {
    pub fn trivial() -> Self {
        WeakCocycle {
            v: Arc::new(|_, _, _| unit()),
            a: Arc::new(|_, _, _, _| 0.0),
        }
    }

    /// Solves both coboundary relations for the target cocycle.
    pub fn transform(&self, d: &WeakCoboundary, lambda: &SmThreeCocycle) -> Self {
        let (v, beta) = (self.v.clone(), d.beta.clone());
        let v2: PairFn<CoverPoint> = Arc::new(move |i, j, x| {
            phi1(beta(i, x).element().inv() * v(i, j, x).element() * beta(j, x).element())
        });
        let (v, a, beta, alpha, v2c, l) = (
            self.v.clone(),
            self.a.clone(),
            d.beta.clone(),
            d.alpha.clone(),
            v2.clone(),
            lambda.clone(),
        );
        let a2 = Arc::new(move |i: usize, j: usize, k: usize, x: &Point| {
            let (vij, vjk, vik) = (v(i, j, x), v(j, k, x), v(i, k, x));
            let (wij, wjk, wik) = (v2c(i, j, x), v2c(j, k, x), v2c(i, k, x));
            let (bi, bj, bk) = (beta(i, x), beta(j, x), beta(k, x));
            alpha(i, k, x) + a(i, j, k, x) + l12(&l, phi2(&vik, &bk), phi2(&otimes(&vij, &vjk), &bk))
                - alpha(i, j, x)
                - alpha(j, k, x)
                - l12(&l, phi2(&bi, &wik), phi2(&bi, &otimes(&wij, &wjk)))
                - l03(&l, &bi, &wij, &wjk)
                + l03(&l, &vij, &bj, &wjk)
                - l03(&l, &vij, &vjk, &bk)
        });
        WeakCocycle { v: v2, a: a2 }
    }

    /// Adds 0.1 to `a_012` at one sample point.
    pub fn perturbed(&self, target: Point) -> Self {
        let a = self.a.clone();
        let t = Some(target);
        WeakCocycle {
            v: self.v.clone(),
            a: Arc::new(move |i, j, k, x| {
                a(i, j, k, x) + if is_target(x, &t) && (i, j, k) == (0, 1, 2) { 0.1 } else { 0.0 }
            }),
        }
    }
}

impl WeakCoboundary {
    pub fn identity() -> Self {
        WeakCoboundary {
            beta: Arc::new(|_, _| unit()),
            alpha: Arc::new(|_, _, _| 0.0),
        }
    }

    pub fn random(seed: u64, torus: bool) -> Self {
        let gamma = OrdinaryCoboundary::random(seed, torus).gamma;
        WeakCoboundary {
            beta: Arc::new(move |i, x| phi1(gamma(i, x))),
            alpha: pair_waves(seed, 0x0E, 0.3),
        }
    }
}

fn unit_distance(v: &CoverPoint) -> f64 {
    let d = v.element().distance(&Su2::IDENTITY);
    if v.labels() == unit().labels() {
        d
    } else {
        f64::INFINITY
    }
}

fn weak_a_residual(c: &WeakCocycle, l: &SmThreeCocycle, t: &[usize], x: &Point) -> f64 {
    let (i, j, k, m) = (t[0], t[1], t[2], t[3]);
    let v = |a: usize, b: usize| (c.v)(a, b, x);
    let a = |p: usize, q: usize, r: usize| (c.a)(p, q, r, x);
    let (vij, vjk, vkl, vik, vjl) = (v(i, j), v(j, k), v(k, m), v(i, k), v(j, m));
    let lhs = a(i, k, m) + a(i, j, k) + l12(l, phi2(&vik, &vkl), phi2(&otimes(&vij, &vjk), &vkl));
    let rhs = a(i, j, m)
        + a(j, k, m)
        + l12(l, phi2(&vij, &vjl), phi2(&vij, &otimes(&vjk, &vkl)))
        + l03(l, &vij, &vjk, &vkl);
    circle_distance(lhs - rhs)
}

pub fn validate_weak(c: &WeakCocycle, lambda: &SmThreeCocycle, cover: &SampledCover, tol: f64) -> Vec<Check> {
    let v = &c.v;
    let r3 = cover.residuals(3, &["pi"], |t, x| {
        let (i, j, k) = (t[0], t[1], t[2]);
        vec![v(i, k, x).element().distance(&otimes(&v(i, j, x), &v(j, k, x)).element())]
    });
    let r1 = cover.residuals(1, &["unit"], |t, x| vec![unit_distance(&v(t[0], t[0], x))]);
    let r2 = cover.residuals(2, &["normalized"], |t, x| {
        let (i, j) = (t[0], t[1]);
        vec![circle_distance((c.a)(i, i, j, x)).max(circle_distance((c.a)(i, j, j, x)))]
    });
    let r4 = cover.residuals(4, &["a"], |t, x| vec![weak_a_residual(c, lambda, t, x)]);
    vec![
        Check::from_residuals("weak.pi_composition", &r3[0], tol),
        Check::from_residuals("weak.unit", &r1[0], tol),
        Check::from_residuals("weak.normalized_a", &r2[0], tol),
        Check::from_residuals("weak.a_relation", &r4[0], tol),
    ]
}

fn weak_alpha_residual(
    c: &WeakCocycle,
    c2: &WeakCocycle,
    d: &WeakCoboundary,
    l: &SmThreeCocycle,
    t: &[usize],
    x: &Point,
) -> f64 {
    let (i, j, k) = (t[0], t[1], t[2]);
    let v = |a: usize, b: usize| (c.v)(a, b, x);
    let w = |a: usize, b: usize| (c2.v)(a, b, x);
    let b = |a: usize| (d.beta)(a, x);
    let al = |p: usize, q: usize| (d.alpha)(p, q, x);
    let (vij, vjk, vik) = (v(i, j), v(j, k), v(i, k));
    let (wij, wjk, wik) = (w(i, j), w(j, k), w(i, k));
    let (bi, bj, bk) = (b(i), b(j), b(k));
    let lhs = al(i, k) + (c.a)(i, j, k, x) + l12(l, phi2(&vik, &bk), phi2(&otimes(&vij, &vjk), &bk));
    let rhs = al(i, j) + (c2.a)(i, j, k, x) + al(j, k) + l12(l, phi2(&bi, &wik), phi2(&bi, &otimes(&wij, &wjk)))
        + l03(l, &bi, &wij, &wjk)
        - l03(l, &vij, &bj, &wjk)
        + l03(l, &vij, &vjk, &bk);
    circle_distance(lhs - rhs)
}

pub fn validate_weak_coboundary(
    c: &WeakCocycle,
    c2: &WeakCocycle,
    d: &WeakCoboundary,
    lambda: &SmThreeCocycle,
    cover: &SampledCover,
    tol: f64,
) -> Vec<Check> {
    let r2 = cover.residuals(2, &["pi"], |t, x| {
        let (i, j) = (t[0], t[1]);
        let lhs = otimes(&(d.beta)(i, x), &(c2.v)(i, j, x)).element();
        vec![lhs.distance(&otimes(&(c.v)(i, j, x), &(d.beta)(j, x)).element())]
    });
    let r1 = cover.residuals(1, &["diag"], |t, x| vec![circle_distance((d.alpha)(t[0], t[0], x))]);
    let r3 = cover.residuals(3, &["alpha"], |t, x| vec![weak_alpha_residual(c, c2, d, lambda, t, x)]);
    vec![
        Check::from_residuals("weak.coboundary_pi", &r2[0], tol),
        Check::from_residuals("weak.coboundary_diagonal", &r1[0], tol),
        Check::from_residuals("weak.coboundary_alpha", &r3[0], tol),
    ]
}

// ---------------------------------------------------------------- Deligne

/// A weak cocycle with connection forms `A_i`, curving `B_i` and overlap one-forms `zeta_ij`.
#[derive(Clone)]
pub struct DeligneCocycle {
    pub weak: WeakCocycle,
    pub conn: PatchFn<AlgForm>,
    pub b: PatchFn<RealForm>,
    pub zeta: PairFn<RealForm>,
}

#[derive(Clone)]
pub struct DeligneCoboundary {
    pub weak: WeakCoboundary,
    pub zeta: PatchFn<RealForm>,
}

/// Orientation of the connection gluing relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gluing {
    /// `pi(v_ij) A_j = A_i pi(v_ij) + d pi(v_ij)`, compatible with `pi(v_ik) = pi(v_ij) pi(v_jk)`.
    Composable,
    /// `pi(v_ij) A_i = A_j pi(v_ij) + d pi(v_ij)`.
    Printed,
}

/// Finite-difference and trilinear settings for Deligne relations.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DeligneSettings {
    pub t: Trilinear,
    pub h: f64,
    pub gluing: Gluing,
}

impl DeligneSettings {
    pub fn new(k: f64, h: f64) -> Self {
        DeligneSettings {
            t: Trilinear::new(k),
            h,
            gluing: Gluing::Composable,
        }
    }
}

/// A group slot of the linearized cochain: `log pi(v)`, or NaN outside the principal branch.
fn glog(v: &CoverPoint) -> AlgForm {
    let l = v
        .element()
        .log()
        .unwrap_or_else(|_| AlgebraElement::from_su2([f64::NAN; 3]));
    Grassmann::scalar(l)
}

fn lam(t: &Trilinear, x: &AlgForm, y: &AlgForm, z: &AlgForm) -> RealForm {
    t.on_moduli(x, y, z)
}

fn to_matrix(f: &AlgForm) -> FormValue<CMat> {
    f.map(|a| a.to_matrix())
}

fn from_matrix(f: &FormValue<CMat>) -> AlgForm {
    f.map(|m| AlgebraElement::from_matrix(Algebra::Su2, m))
}

fn d_group(f: impl Fn(&Point) -> Su2, x: &Point, h: f64) -> FormValue<CMat> {
    ext_d(&|y: &Point| Grassmann::scalar(f(y).to_matrix()), x, h)
}

fn d_real(f: impl Fn(&Point) -> f64, x: &Point, h: f64) -> RealForm {
    ext_d(&|y: &Point| Grassmann::scalar(f(y)), x, h)
}

/// `A' = beta^-1 A beta + beta^-1 d beta`.
fn gauge_connection(a: &AlgForm, beta: impl Fn(&Point) -> Su2, x: &Point, h: f64) -> AlgForm {
    let g = beta(x);
    let (m, mi) = (Grassmann::scalar(g.to_matrix()), Grassmann::scalar(g.inv().to_matrix()));
    let conj = mi.matmul(&to_matrix(a)).matmul(&m);
    from_matrix(&(&conj + &mi.matmul(&d_group(&beta, x, h))))
}

impl DeligneCocycle {
    pub fn trivial() -> Self {
        DeligneCocycle {
            weak: WeakCocycle::trivial(),
            conn: Arc::new(|_, _| Grassmann::zero()),
            b: Arc::new(|_, _| Grassmann::zero()),
            zeta: Arc::new(|_, _, _| Grassmann::zero()),
        }
    }

    /// Solves the coboundary relations for the target cocycle; the finite cochain is taken to vanish.
    pub fn transform(&self, d: &DeligneCoboundary, s: DeligneSettings) -> Self {
        let weak = self.weak.transform(&d.weak, &SmThreeCocycle::zero());
        let (t, h) = (s.t, s.h);
        let (conn, beta) = (self.conn.clone(), d.weak.beta.clone());
        let conn2: PatchFn<AlgForm> = Arc::new(move |i, x| {
            let b = beta.clone();
            gauge_connection(&conn(i, x), move |y| b(i, y).element(), x, h)
        });
        let (conn, b, beta, zeta_i, c2) = (
            self.conn.clone(),
            self.b.clone(),
            d.weak.beta.clone(),
            d.zeta.clone(),
            conn2.clone(),
        );
        let b2: PatchFn<RealForm> = Arc::new(move |i, x| {
            let (a, a2, lb) = (conn(i, x), c2(i, x), glog(&beta(i, x)));
            let dz = ext_d(&|y: &Point| zeta_i(i, y), x, h);
            &(&(&(&b(i, x) - &dz) - &lam(&t, &lb, &a2, &a2)) + &lam(&t, &a, &lb, &a2)) - &lam(&t, &a, &a, &lb)
        });
        let (conn, v, v2, beta, zeta, zeta_i, alpha, c2) = (
            self.conn.clone(),
            self.weak.v.clone(),
            weak.v.clone(),
            d.weak.beta.clone(),
            self.zeta.clone(),
            d.zeta.clone(),
            d.weak.alpha.clone(),
            conn2.clone(),
        );
        // the coboundary overlap relation solved for zeta'_ji
        let zeta2: PairFn<RealForm> = Arc::new(move |jj, ii, x| {
            let (i, j) = (ii, jj);
            let (ai, aj, a2i, a2j) = (conn(i, x), conn(j, x), c2(i, x), c2(j, x));
            let (vij, wij) = (glog(&v(i, j, x)), glog(&v2(i, j, x)));
            let (bi, bj) = (glog(&beta(i, x)), glog(&beta(j, x)));
            let dal = d_real(|y| alpha(i, j, y), x, h);
            let lhs = &(&(&(&(&zeta(j, i, x) - &lam(&t, &ai, &vij, &bj)) + &lam(&t, &ai, &bi, &wij))
                + &lam(&t, &bi, &wij, &a2j))
                + &zeta_i(j, x))
                - &zeta_i(i, x);
            &(&(&(&lhs + &lam(&t, &vij, &aj, &bj)) - &lam(&t, &wij, &bj, &a2j)) - &dal) - &lam(&t, &bi, &a2i, &wij)
        });
        DeligneCocycle {
            weak,
            conn: conn2,
            b: b2,
            zeta: zeta2,
        }
    }

    /// Adds `0.1 dx^0 dx^1` to `B_0` at one sample point without touching `zeta`.
    pub fn perturbed(&self, target: Point) -> Self {
        let b = self.b.clone();
        let t = Some(target);
        DeligneCocycle {
            b: Arc::new(move |i, x| {
                let mut v = b(i, x);
                if is_target(x, &t) && i == 0 {
                    v.add_term(0b0011, 0.1);
                }
                v
            }),
            ..self.clone()
        }
    }
}

impl DeligneCoboundary {
    pub fn random(seed: u64, torus: bool) -> Self {
        let w = waves(seed, 0x0F, 4 * PATCHES, 0.5, false);
        DeligneCoboundary {
            weak: WeakCoboundary::random(seed, torus),
            zeta: Arc::new(move |i, x| one_form(std::array::from_fn(|m| w[4 * i + m].scalar(x, 0)))),
        }
    }
}

fn gluing_residual(c: &DeligneCocycle, s: DeligneSettings, i: usize, j: usize, x: &Point) -> f64 {
    let v = |y: &Point| (c.weak.v)(i, j, y).element();
    let g = Grassmann::scalar(v(x).to_matrix());
    let (ai, aj) = (to_matrix(&(c.conn)(i, x)), to_matrix(&(c.conn)(j, x)));
    let dg = d_group(v, x, s.h);
    let r = match s.gluing {
        Gluing::Composable => &(&g.matmul(&aj) - &ai.matmul(&g)) - &dg,
        Gluing::Printed => &(&g.matmul(&ai) - &aj.matmul(&g)) - &dg,
    };
    r.max_norm()
}

fn flatness_residual(c: &DeligneCocycle, h: f64, i: usize, x: &Point) -> f64 {
    let a = (c.conn)(i, x);
    let da = ext_d(&|y: &Point| (c.conn)(i, y), x, h);
    (&da + &a.product(&a, |p, q| p.bracket_unchecked(q)).scale(0.5)).max_norm()
}

/// `B_i - B_j + d zeta_ij + lam(v, A_i, A_i) - lam(A_j, v, A_i) + lam(A_j, A_j, v)`.
fn b_gluing(c: &DeligneCocycle, s: DeligneSettings, i: usize, j: usize, x: &Point) -> RealForm {
    let t = &s.t;
    let (ai, aj, v) = ((c.conn)(i, x), (c.conn)(j, x), glog(&(c.weak.v)(i, j, x)));
    let dz = ext_d(&|y: &Point| (c.zeta)(i, j, y), x, s.h);
    let r = &(&(c.b)(i, x) - &(c.b)(j, x)) + &dz;
    &(&(&r + &lam(t, &v, &ai, &ai)) - &lam(t, &aj, &v, &ai)) + &lam(t, &aj, &aj, &v)
}

/// Overlap relation for `zeta` on `(i, j, k)`, using `- d a_jik`.
fn zeta_triple(c: &DeligneCocycle, s: DeligneSettings, i: usize, j: usize, k: usize, x: &Point) -> f64 {
    let t = &s.t;
    let z = |p: usize, q: usize| (c.zeta)(p, q, x);
    let v = |p: usize, q: usize| glog(&(c.weak.v)(p, q, x));
    let (aj, ak) = ((c.conn)(j, x), (c.conn)(k, x));
    let da = d_real(|y| (c.weak.a)(j, i, k, y), x, s.h);
    let lhs = &z(k, j) + &lam(t, &aj, &v(j, i), &v(i, j));
    let rhs = &(&(&(&z(i, j) + &z(k, i)) - &da) + &lam(t, &v(j, i), &ak, &v(i, k))) - &lam(t, &v(j, i), &v(i, k), &ak);
    (&lhs - &rhs).max_norm()
}

pub fn validate_deligne(c: &DeligneCocycle, s: DeligneSettings, cover: &SampledCover, tol: f64) -> Vec<Check> {
    let fd_tol = FD_CONSTANT * s.h * s.h;
    let zero = SmThreeCocycle::zero();
    let mut out: Vec<Check> = validate_weak(&c.weak, &zero, cover, tol)
        .into_iter()
        .map(|mut ch| {
            ch.name = ch.name.replace("weak.", "deligne.");
            ch
        })
        .collect();
    let r1 = cover.residuals(1, &["flat"], |t, x| vec![flatness_residual(c, s.h, t[0], x)]);
    let r2 = cover.residuals(2, &["glue", "b"], |t, x| {
        vec![gluing_residual(c, s, t[0], t[1], x), b_gluing(c, s, t[0], t[1], x).max_norm()]
    });
    let r3 = cover.residuals(3, &["zeta"], |t, x| vec![zeta_triple(c, s, t[0], t[1], t[2], x)]);
    out.push(Check::from_residuals("deligne.flatness", &r1[0], fd_tol));
    out.push(Check::from_residuals("deligne.a_gluing", &r2[0], fd_tol));
    out.push(Check::from_residuals("deligne.b_gluing", &r2[1], fd_tol));
    out.push(Check::from_residuals("deligne.zeta_relation", &r3[0], fd_tol));
    out
}

/// Coboundary relations between two Deligne cocycles.
pub fn validate_deligne_coboundary(
    c: &DeligneCocycle,
    c2: &DeligneCocycle,
    d: &DeligneCoboundary,
    s: DeligneSettings,
    cover: &SampledCover,
    tol: f64,
) -> Vec<Check> {
    let fd_tol = FD_CONSTANT * s.h * s.h;
    let t = &s.t;
    let zero = SmThreeCocycle::zero();
    let mut out: Vec<Check> = validate_weak_coboundary(&c.weak, &c2.weak, &d.weak, &zero, cover, tol)
        .into_iter()
        .map(|mut ch| {
            ch.name = ch.name.replace("weak.", "deligne.");
            ch
        })
        .collect();
    let r1 = cover.residuals(1, &["conn", "b"], |ix, x| {
        let i = ix[0];
        let beta = |y: &Point| (d.weak.beta)(i, y).element();
        let a2 = gauge_connection(&(c.conn)(i, x), beta, x, s.h);
        let conn = (&a2 - &(c2.conn)(i, x)).max_norm();
        let (a, a2, lb) = ((c.conn)(i, x), (c2.conn)(i, x), glog(&(d.weak.beta)(i, x)));
        let dz = ext_d(&|y: &Point| (d.zeta)(i, y), x, s.h);
        let rhs = &(&(&(&(c.b)(i, x) - &dz) - &lam(t, &lb, &a2, &a2)) + &lam(t, &a, &lb, &a2)) - &lam(t, &a, &a, &lb);
        vec![conn, (&(c2.b)(i, x) - &rhs).max_norm()]
    });
    let r2 = cover.residuals(2, &["zeta"], |ix, x| {
        let (i, j) = (ix[0], ix[1]);
        let (ai, aj, a2i, a2j) = ((c.conn)(i, x), (c.conn)(j, x), (c2.conn)(i, x), (c2.conn)(j, x));
        let (vij, wij) = (glog(&(c.weak.v)(i, j, x)), glog(&(c2.weak.v)(i, j, x)));
        let (bi, bj) = (glog(&(d.weak.beta)(i, x)), glog(&(d.weak.beta)(j, x)));
        let dal = d_real(|y| (d.weak.alpha)(i, j, y), x, s.h);
        let lhs = &(&(&(&(&(c.zeta)(j, i, x) - &lam(t, &ai, &vij, &bj)) + &lam(t, &ai, &bi, &wij))
            + &lam(t, &bi, &wij, &a2j))
            + &(d.zeta)(j, x))
            - &Grassmann::zero();
        let rhs = &(&(&(&(&(c2.zeta)(j, i, x) - &lam(t, &vij, &aj, &bj)) + &lam(t, &wij, &bj, &a2j)) + &dal)
            + &lam(t, &bi, &a2i, &wij))
            + &(d.zeta)(i, x);
        vec![(&lhs - &rhs).max_norm()]
    });
    out.push(Check::from_residuals("deligne.coboundary_connection", &r1[0], fd_tol));
    out.push(Check::from_residuals("deligne.coboundary_b", &r1[1], fd_tol));
    out.push(Check::from_residuals("deligne.coboundary_zeta", &r2[0], fd_tol));
    out
}

// ---------------------------------------------------------------- requests

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    Ordinary,
    Strict,
    Weak,
    Deligne,
}

impl std::str::FromStr for SystemKind {
    type Err = CocycleError;
    fn from_str(s: &str) -> Result<Self, CocycleError> {
        match s {
            "ordinary" => Ok(SystemKind::Ordinary),
            "strict" => Ok(SystemKind::Strict),
            "weak" => Ok(SystemKind::Weak),
            "deligne" => Ok(SystemKind::Deligne),
            _ => Err(CocycleError::Request(format!("unknown kind {s}"))),
        }
    }
}

/// How the cocycle data is generated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Recipe {
    /// The trivial cocycle.
    Trivial,
    /// A seeded coboundary applied to a base cocycle; the pair relation is validated too.
    Coboundary,
    /// Two successive seeded coboundaries.
    TwiceTransformed,
    /// The coboundary recipe with a single-point perturbation.
    Perturbed,
    /// Independent random data (ordinary and strict only).
    Unrelated,
}

/// Gauge parameters for transforms: general `SU(2)` or the maximal torus `exp(t e3)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GaugeKind {
    General,
    Torus,
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}
fn default_tol() -> f64 {
    1e-9
}
fn default_h() -> f64 {
    1e-3
}
fn default_k() -> f64 {
    1.0
}
fn default_gauge() -> GaugeKind {
    GaugeKind::Torus
}

/// The JSON document accepted by the validator.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CocycleRequest {
    pub kind: SystemKind,
    pub recipe: Recipe,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_h")]
    pub h: f64,
    #[serde(default = "default_k")]
    pub k: f64,
    #[serde(default = "default_gauge")]
    pub gauge: GaugeKind,
    /// Seed of the finite cochain used by the weak system; `None` means the zero cochain.
    #[serde(default)]
    pub lambda_seed: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CocycleReport {
    pub request: CocycleRequest,
    pub overlaps: Vec<OverlapCount>,
    pub checks: Vec<Check>,
}

impl CocycleReport {
    pub fn passed(&self) -> bool {
        crate::report::all_passed(&self.checks)
    }
}

/// Builds the requested data and runs every relevant validator.
pub fn run_request(req: &CocycleRequest) -> Result<CocycleReport, CocycleError> {
    let cover = SampledCover::sample(req.seed, req.samples);
    let overlaps = cover.overlap_counts();
    if let Some(o) = overlaps.iter().find(|o| o.samples == 0) {
        return Err(CocycleError::EmptyOverlap(o.patches.clone()));
    }
    let target = cover.triple_point().map(|p| cover.points[p]);
    let target = || target.ok_or_else(|| CocycleError::EmptyOverlap(vec![0, 1, 2]));
    let torus = req.gauge == GaugeKind::Torus;
    let seed2 = req.seed.wrapping_add(0x5EED);
    let tol = req.tol;
    let mut checks = Vec::new();
    match req.kind {
        SystemKind::Ordinary => {
            let base = OrdinaryCocycle::trivial();
            let (d1, d2) = (OrdinaryCoboundary::random(req.seed, torus), OrdinaryCoboundary::random(seed2, torus));
            let c = match req.recipe {
                Recipe::Trivial => base,
                Recipe::Unrelated => OrdinaryCocycle::unrelated(req.seed),
                Recipe::Coboundary | Recipe::Perturbed => {
                    let c = base.transform(&d1);
                    checks.extend(validate_ordinary_coboundary(&base, &c, &d1, &cover, tol));
                    c
                }
                Recipe::TwiceTransformed => {
                    let c1 = base.transform(&d1);
                    let c2 = c1.transform(&d2);
                    checks.extend(validate_ordinary_coboundary(&c1, &c2, &d2, &cover, tol));
                    c2
                }
            };
            let c = if req.recipe == Recipe::Perturbed { c.perturbed(target()?) } else { c };
            checks.extend(validate_ordinary(&c, &cover, tol));
        }
        SystemKind::Strict => {
            let base = StrictCocycle::solved(req.seed);
            let (d1, d2) = (StrictCoboundary::random(seed2), StrictCoboundary::random(seed2.wrapping_add(1)));
            let c = match req.recipe {
                Recipe::Trivial => StrictCocycle::trivial(),
                Recipe::Unrelated => StrictCocycle::unrelated(req.seed),
                Recipe::Coboundary | Recipe::Perturbed => {
                    let c = base.transform(&d1);
                    checks.extend(validate_strict_coboundary(&base, &c, &d1, &cover, tol));
                    c
                }
                Recipe::TwiceTransformed => {
                    let c1 = base.transform(&d1);
                    let c2 = c1.transform(&d2);
                    checks.extend(validate_strict_coboundary(&c1, &c2, &d2, &cover, tol));
                    c2
                }
            };
            let c = if req.recipe == Recipe::Perturbed { c.perturbed(target()?) } else { c };
            checks.extend(validate_strict(&c, &cover, tol));
        }
        SystemKind::Weak => {
            let lambda = req.lambda_seed.map_or_else(SmThreeCocycle::zero, generate_coboundary_cocycle);
            let base = WeakCocycle::trivial();
            let (d1, d2) = (WeakCoboundary::random(req.seed, torus), WeakCoboundary::random(seed2, torus));
            let c = match req.recipe {
                Recipe::Trivial => base,
                Recipe::Unrelated => return Err(CocycleError::Request("unrelated recipe is for ordinary and strict".into())),
                Recipe::Coboundary | Recipe::Perturbed => {
                    let c = base.transform(&d1, &lambda);
                    checks.extend(validate_weak_coboundary(&base, &c, &d1, &lambda, &cover, tol));
                    c
                }
                Recipe::TwiceTransformed => {
                    let c1 = base.transform(&d1, &lambda);
                    let c2 = c1.transform(&d2, &lambda);
                    checks.extend(validate_weak_coboundary(&c1, &c2, &d2, &lambda, &cover, tol));
                    c2
                }
            };
            let c = if req.recipe == Recipe::Perturbed { c.perturbed(target()?) } else { c };
            checks.extend(validate_weak(&c, &lambda, &cover, tol));
        }
        SystemKind::Deligne => {
            let s = DeligneSettings::new(req.k, req.h);
            let base = DeligneCocycle::trivial();
            let (d1, d2) = (DeligneCoboundary::random(req.seed, torus), DeligneCoboundary::random(seed2, torus));
            let c = match req.recipe {
                Recipe::Trivial => base,
                Recipe::Unrelated => return Err(CocycleError::Request("unrelated recipe is for ordinary and strict".into())),
                Recipe::Coboundary | Recipe::Perturbed => {
                    let c = base.transform(&d1, s);
                    checks.extend(validate_deligne_coboundary(&base, &c, &d1, s, &cover, tol));
                    c
                }
                Recipe::TwiceTransformed => {
                    let c1 = base.transform(&d1, s);
                    let c2 = c1.transform(&d2, s);
                    checks.extend(validate_deligne_coboundary(&c1, &c2, &d2, s, &cover, tol));
                    c2
                }
            };
            let c = if req.recipe == Recipe::Perturbed { c.perturbed(target()?) } else { c };
            checks.extend(validate_deligne(&c, s, &cover, tol));
        }
    }
    Ok(CocycleReport {
        request: req.clone(),
        overlaps,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn req(kind: SystemKind, recipe: Recipe) -> CocycleRequest {
        CocycleRequest {
            kind,
            recipe,
            seed: 3,
            samples: 24,
            tol: 1e-9,
            h: 1e-3,
            k: 1.0,
            gauge: GaugeKind::Torus,
            lambda_seed: Some(5),
        }
    }

    fn show(r: &CocycleReport) -> String {
        r.checks
            .iter()
            .map(|c| format!("{} {:.3e} {}", c.name, c.stats.max, c.passed))
            .collect::<Vec<_>>()
            .join("\n")
    }

    fn passed(kind: SystemKind, recipe: Recipe, gauge: GaugeKind, k: f64) -> bool {
        let mut r = req(kind, recipe);
        r.gauge = gauge;
        r.k = k;
        let rep = run_request(&r).unwrap();
        if !rep.passed() {
            eprintln!("{kind:?} {recipe:?}\n{}", show(&rep));
        }
        rep.passed()
    }

    #[test]
    fn torus_gauge_systems() {
        for kind in [SystemKind::Ordinary, SystemKind::Strict, SystemKind::Weak, SystemKind::Deligne] {
            for recipe in [Recipe::Trivial, Recipe::Coboundary, Recipe::TwiceTransformed] {
                assert!(passed(kind, recipe, GaugeKind::Torus, 1.0), "{kind:?} {recipe:?}");
            }
            assert!(!passed(kind, Recipe::Perturbed, GaugeKind::Torus, 1.0), "{kind:?}");
        }
    }

    #[test]
    fn unrelated_data_fails() {
        assert!(!passed(SystemKind::Ordinary, Recipe::Unrelated, GaugeKind::Torus, 1.0));
        assert!(!passed(SystemKind::Strict, Recipe::Unrelated, GaugeKind::Torus, 1.0));
    }

    #[test]
    fn general_gauge() {
        assert!(passed(SystemKind::Weak, Recipe::TwiceTransformed, GaugeKind::General, 1.0));
        assert!(passed(SystemKind::Deligne, Recipe::TwiceTransformed, GaugeKind::General, 0.0));
        let mut r = req(SystemKind::Deligne, Recipe::Coboundary);
        r.gauge = GaugeKind::General;
        let rep = run_request(&r).unwrap();
        let failed: Vec<_> = rep.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        assert_eq!(failed, ["deligne.b_gluing", "deligne.zeta_relation"]);
    }

    /// Adjoins the source of a coboundary from the trivial cocycle as an extra patch `STAR`.
    fn adjoin(c2: &DeligneCocycle, d: &DeligneCoboundary) -> DeligneCocycle {
        const STAR: usize = PATCHES;
        let (v, beta) = (c2.weak.v.clone(), d.weak.beta.clone());
        let (conn, b, zeta, zeta_i) = (c2.conn.clone(), c2.b.clone(), c2.zeta.clone(), d.zeta.clone());
        DeligneCocycle {
            weak: WeakCocycle {
                v: Arc::new(move |i, j, x| if j == STAR { beta(i, x) } else { v(i, j, x) }),
                a: c2.weak.a.clone(),
            },
            conn: Arc::new(move |i, x| if i == STAR { Grassmann::zero() } else { conn(i, x) }),
            b: Arc::new(move |i, x| if i == STAR { Grassmann::zero() } else { b(i, x) }),
            zeta: Arc::new(move |i, j, x| if j == STAR { zeta_i(i, x) } else { zeta(i, j, x) }),
        }
    }

    #[test]
    fn coboundary_is_cocycle_with_extra_patch() {
        let cover = SampledCover::sample(4, 16);
        for (torus, k) in [(true, 1.0), (false, 0.0), (false, 1.0)] {
            let mut s = DeligneSettings::new(k, 1e-3);
            let d = DeligneCoboundary::random(9, torus);
            let ext = adjoin(&DeligneCocycle::trivial().transform(&d, s), &d);
            for (p, x) in cover.points.iter().enumerate() {
                for &i in &cover.membership[p] {
                    assert!(b_gluing(&ext, s, i, PATCHES, x).max_norm() < 1e-9);
                    s.gluing = Gluing::Printed;
                    assert!(gluing_residual(&ext, s, i, PATCHES, x) < 1e-5);
                    s.gluing = Gluing::Composable;
                    if !torus {
                        assert!(gluing_residual(&ext, s, i, PATCHES, x) > 1e-3);
                    }
                }
            }
        }
    }
}
