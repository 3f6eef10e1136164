//! Circle-valued cochains on the covered nerve, the Cech and nerve differentials,
//! the total differential, and degree-3 cocycle validation.
//!
//! A cochain of bidegree `(p, q)` takes `p + 1` cover points of level `q` lying over
//! the same nerve point. Values are real lifts; everything is compared mod 1.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cover::{random_cover_point, random_labels, CoverPoint, NervePoint, MAX_LEVEL};
use crate::report::{circle_distance, Check};
use crate::sampling::{splitmix64, substream, unit_real};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CochainError {
    #[error("nerve degree {0} would exceed the level cap {MAX_LEVEL}")]
    LevelCap(usize),
    #[error("mixed total degrees {0} and {1}")]
    MixedDegree(usize, usize),
}

/// An element of `R/Z`, stored as its representative in `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
pub struct CircleValue(f64);

impl CircleValue {
    pub const ZERO: CircleValue = CircleValue(0.0);

    pub fn new(a: f64) -> Self {
        let r = a.rem_euclid(1.0);
        // rem_euclid can round up to exactly 1.0
        CircleValue(if r >= 1.0 { 0.0 } else { r })
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// Shortest arc distance to `o`.
    pub fn distance(self, o: CircleValue) -> f64 {
        circle_distance(self.0 - o.0)
    }
}

impl std::ops::Add for CircleValue {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        CircleValue::new(self.0 + o.0)
    }
}

impl std::ops::Sub for CircleValue {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        CircleValue::new(self.0 - o.0)
    }
}

impl std::ops::Neg for CircleValue {
    type Output = Self;
    fn neg(self) -> Self {
        CircleValue::new(-self.0)
    }
}

type EvalFn = dyn Fn(&[CoverPoint]) -> f64 + Send + Sync;

/// A cochain of Cech degree `p` and nerve degree `q`.
#[derive(Clone)]
pub struct Cochain {
    cech: usize,
    nerve: usize,
    eval: Arc<EvalFn>,
}

impl fmt::Debug for Cochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cochain({}, {})", self.cech, self.nerve)
    }
}

impl Cochain {
    pub fn new(
        cech: usize,
        nerve: usize,
        eval: impl Fn(&[CoverPoint]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Cochain {
            cech,
            nerve,
            eval: Arc::new(eval),
        }
    }

    pub fn zero(cech: usize, nerve: usize) -> Self {
        Self::new(cech, nerve, |_| 0.0)
    }

    pub fn cech_degree(&self) -> usize {
        self.cech
    }

    pub fn nerve_degree(&self) -> usize {
        self.nerve
    }

    pub fn bidegree(&self) -> (usize, usize) {
        (self.cech, self.nerve)
    }

    /// Real lift of the value.
    pub fn raw(&self, args: &[CoverPoint]) -> f64 {
        debug_assert_eq!(args.len(), self.cech + 1);
        debug_assert!(args.iter().all(|a| a.level() == self.nerve));
        (self.eval)(args)
    }

    pub fn eval(&self, args: &[CoverPoint]) -> CircleValue {
        CircleValue::new(self.raw(args))
    }

    pub fn scale(&self, s: f64) -> Cochain {
        let f = self.eval.clone();
        Cochain::new(self.cech, self.nerve, move |a| s * f(a))
    }

    pub fn plus(&self, o: &Cochain) -> Cochain {
        assert_eq!(self.bidegree(), o.bidegree(), "adding cochains of different bidegree");
        let (f, g) = (self.eval.clone(), o.eval.clone());
        Cochain::new(self.cech, self.nerve, move |a| f(a) + g(a))
    }

    pub fn minus(&self, o: &Cochain) -> Cochain {
        self.plus(&o.scale(-1.0))
    }

    /// Alternating sum over dropped Cech arguments.
    pub fn delta_cech(&self) -> Cochain {
        let f = self.eval.clone();
        Cochain::new(self.cech + 1, self.nerve, move |args| {
            let mut buf = Vec::with_capacity(args.len() - 1);
            (0..args.len())
                .map(|j| {
                    buf.clear();
                    buf.extend(args.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, a)| a.clone()));
                    sign(j) * f(&buf)
                })
                .sum()
        })
    }

    /// Alternating sum over faces applied to every argument.
    pub fn delta_nerve(&self) -> Result<Cochain, CochainError> {
        let q = self.nerve + 1;
        if q > MAX_LEVEL {
            return Err(CochainError::LevelCap(q));
        }
        let f = self.eval.clone();
        Ok(Cochain::new(self.cech, q, move |args| {
            (0..=q)
                .map(|j| {
                    let faces: Vec<CoverPoint> = args
                        .iter()
                        .map(|a| a.face(j).expect("face index within level"))
                        .collect();
                    sign(j) * f(&faces)
                })
                .sum()
        }))
    }
}

fn sign(j: usize) -> f64 {
    if j.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// A formal sum of cochains of one total degree, keyed by bidegree.
#[derive(Clone, Debug)]
pub struct CochainSum {
    degree: usize,
    parts: BTreeMap<(usize, usize), Cochain>,
}

impl CochainSum {
    pub fn zero(degree: usize) -> Self {
        CochainSum {
            degree,
            parts: BTreeMap::new(),
        }
    }

    pub fn from_parts(parts: Vec<Cochain>) -> Result<Self, CochainError> {
        let degree = parts.first().map_or(0, |c| c.cech + c.nerve);
        let mut s = Self::zero(degree);
        for c in parts {
            s.add(c)?;
        }
        Ok(s)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn add(&mut self, c: Cochain) -> Result<(), CochainError> {
        let d = c.cech + c.nerve;
        if d != self.degree {
            return Err(CochainError::MixedDegree(self.degree, d));
        }
        let key = c.bidegree();
        let merged = match self.parts.get(&key) {
            Some(old) => old.plus(&c),
            None => c,
        };
        self.parts.insert(key, merged);
        Ok(())
    }

    pub fn part(&self, p: usize, q: usize) -> Option<&Cochain> {
        self.parts.get(&(p, q))
    }

    pub fn bidegrees(&self) -> Vec<(usize, usize)> {
        self.parts.keys().copied().collect()
    }

    /// `delta_SM = delta_C + (-1)^p delta_N` on each component.
    pub fn delta_sm(&self) -> Result<CochainSum, CochainError> {
        let mut out = CochainSum::zero(self.degree + 1);
        for (&(p, _), c) in &self.parts {
            out.add(c.delta_cech())?;
            out.add(c.delta_nerve()?.scale(sign(p)))?;
        }
        Ok(out)
    }
}

/// A smooth normalized random cochain.
///
/// The value vanishes when two consecutive arguments carry the same labels and when
/// any nerve slot is the identity, so it is normalized in both directions.
pub fn random_normalized_cochain(seed: u64, cech: usize, nerve: usize) -> Cochain {
    let base = splitmix64(seed ^ splitmix64(((cech as u64) << 8) | nerve as u64));
    Cochain::new(cech, nerve, move |args| {
        if args.windows(2).any(|w| w[0].labels() == w[1].labels()) {
            return 0.0;
        }
        let mut h = base;
        for a in args {
            for l in a.labels() {
                h = splitmix64(h ^ u64::from(l.get()));
            }
            h = splitmix64(h ^ 0xff);
        }
        let point = args[0].nerve();
        let vanish: f64 = point.elements().iter().map(|g| 1.0 - g.x).product();
        let mut poly = unit_real(splitmix64(h));
        for (i, g) in point.elements().iter().enumerate() {
            for (c, x) in g.coords().iter().enumerate() {
                poly += unit_real(splitmix64(h ^ (((i as u64) << 4) | (c as u64 + 1)))) * x;
            }
        }
        0.4 * unit_real(splitmix64(h ^ 0xabcd)) * vanish * poly
    })
}

/// Samples `p + 1` random cover points over one random level-`q` nerve point.
pub fn sample_args<R: Rng + ?Sized>(rng: &mut R, p: usize, q: usize) -> Vec<CoverPoint> {
    let first = random_cover_point(rng, q);
    let point: NervePoint = first.nerve().clone();
    let mut out = vec![first];
    out.extend((0..p).map(|_| random_labels(rng, point.clone())));
    out
}

/// Evaluates `f` on `samples` independent argument tuples in parallel, preserving order.
pub fn sample_residuals(
    seed: u64,
    tag: u64,
    samples: usize,
    p: usize,
    q: usize,
    f: impl Fn(&[CoverPoint]) -> f64 + Sync,
) -> Vec<f64> {
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed ^ tag.rotate_left(32), i as u64);
            f(&sample_args(&mut rng, p, q))
        })
        .collect()
}

/// Circle residual of a sum-type cochain on samples.
pub fn cochain_residuals(seed: u64, tag: u64, samples: usize, c: &Cochain) -> Vec<f64> {
    sample_residuals(seed, tag, samples, c.cech, c.nerve, |a| circle_distance(c.raw(a)))
}

/// The three components of a degree-3 cocycle (the `(3,0)` part is zero).
#[derive(Clone, Debug)]
pub struct SmThreeCocycle {
    pub lambda21: Cochain,
    pub lambda12: Cochain,
    pub lambda03: Cochain,
}

impl SmThreeCocycle {
    pub fn zero() -> Self {
        SmThreeCocycle {
            lambda21: Cochain::zero(2, 1),
            lambda12: Cochain::zero(1, 2),
            lambda03: Cochain::zero(0, 3),
        }
    }

    pub fn with_lambda03(&self, c: Cochain) -> Self {
        SmThreeCocycle {
            lambda03: c,
            ..self.clone()
        }
    }

    pub fn with_lambda12(&self, c: Cochain) -> Self {
        SmThreeCocycle {
            lambda12: c,
            ..self.clone()
        }
    }

    pub fn with_lambda21(&self, c: Cochain) -> Self {
        SmThreeCocycle {
            lambda21: c,
            ..self.clone()
        }
    }
}

/// Random total-degree-2 cochain used as the potential for exact cocycles.
#[derive(Clone, Debug)]
pub struct Potential {
    pub mu11: Cochain,
    pub mu02: Cochain,
}

impl Potential {
    pub fn random(seed: u64) -> Self {
        Potential {
            mu11: random_normalized_cochain(splitmix64(seed ^ 11), 1, 1),
            mu02: random_normalized_cochain(splitmix64(seed ^ 2), 0, 2),
        }
    }

    pub fn zero() -> Self {
        Potential {
            mu11: Cochain::zero(1, 1),
            mu02: Cochain::zero(0, 2),
        }
    }

    /// The exact cocycle `(dC mu11, dN mu11 + dC mu02, dN mu02)`.
    pub fn cocycle(&self) -> SmThreeCocycle {
        SmThreeCocycle {
            lambda21: self.mu11.delta_cech(),
            lambda12: self
                .mu11
                .delta_nerve()
                .expect("level within cap")
                .plus(&self.mu02.delta_cech()),
            lambda03: self.mu02.delta_nerve().expect("level within cap"),
        }
    }
}

/// Exact cocycle from a seeded random potential.
pub fn generate_coboundary_cocycle(seed: u64) -> SmThreeCocycle {
    Potential::random(seed).cocycle()
}

/// The four component equations of the cocycle condition, residuals as cochains.
pub fn cocycle_conditions(l: &SmThreeCocycle) -> [(&'static str, Cochain); 4] {
    [
        ("dC l21 = 0", l.lambda21.delta_cech()),
        (
            "dN l21 = dC l12",
            l.lambda21
                .delta_nerve()
                .expect("level within cap")
                .minus(&l.lambda12.delta_cech()),
        ),
        (
            "dN l12 = dC l03",
            l.lambda12
                .delta_nerve()
                .expect("level within cap")
                .minus(&l.lambda03.delta_cech()),
        ),
        ("dN l03 = 0", l.lambda03.delta_nerve().expect("level within cap")),
    ]
}

/// Checks the four cocycle equations on fresh samples.
pub fn is_sm_cocycle(l: &SmThreeCocycle, seed: u64, samples: usize, tol: f64) -> Vec<Check> {
    cocycle_conditions(l)
        .iter()
        .enumerate()
        .map(|(i, (name, c))| {
            Check::from_residuals(*name, &cochain_residuals(seed, 100 + i as u64, samples, c), tol)
        })
        .collect()
}

/// Nilpotency and commutation residuals of the differentials.
pub fn nilpotency_checks(seed: u64, samples: usize, tol: f64) -> Vec<Check> {
    let f02 = random_normalized_cochain(seed, 0, 2);
    let f11 = random_normalized_cochain(seed ^ 1, 1, 1);
    let f12 = random_normalized_cochain(seed ^ 2, 1, 2);
    let dn = |c: &Cochain| c.delta_nerve().expect("level within cap");
    let mu = CochainSum::from_parts(vec![
        random_normalized_cochain(seed ^ 3, 2, 0),
        random_normalized_cochain(seed ^ 4, 1, 1),
        random_normalized_cochain(seed ^ 5, 0, 2),
    ])
    .expect("total degree 2");
    let dd = mu
        .delta_sm()
        .and_then(|x| x.delta_sm())
        .expect("levels within cap");
    let mut checks = vec![
        ("dC dC (1,2)".to_string(), f12.delta_cech().delta_cech()),
        ("dN dN (0,2)".to_string(), dn(&dn(&f02))),
        ("dN dN (1,1)".to_string(), dn(&dn(&f11))),
        (
            "dC dN - dN dC (1,1)".to_string(),
            dn(&f11).delta_cech().minus(&dn(&f11.delta_cech())),
        ),
    ];
    for (p, q) in dd.bidegrees() {
        let c = dd.part(p, q).expect("listed").clone();
        checks.push((format!("dSM dSM ({p},{q})"), c));
    }
    checks
        .iter()
        .enumerate()
        .map(|(i, (name, c))| {
            Check::from_residuals(name.as_str(), &cochain_residuals(seed, 200 + i as u64, samples, c), tol)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::random_cover_point;
    use crate::report::all_passed;
    use crate::sampling::rng_from_seed;

    #[test]
    fn first_cech_differential() {
        let f = random_normalized_cochain(4, 0, 1);
        let df = f.delta_cech();
        let mut rng = rng_from_seed(1);
        let a = sample_args(&mut rng, 1, 1);
        let expect = f.raw(&a[1..]) - f.raw(&a[..1]);
        assert!((df.raw(&a) - expect).abs() < 1e-15);
    }

    #[test]
    fn first_nerve_differential() {
        let f = random_normalized_cochain(4, 0, 1);
        let df = f.delta_nerve().unwrap();
        let mut rng = rng_from_seed(2);
        let a = sample_args(&mut rng, 0, 2);
        let faces: Vec<_> = (0..3).map(|j| f.raw(&[a[0].face(j).unwrap()])).collect();
        assert!((df.raw(&a) - (faces[0] - faces[1] + faces[2])).abs() < 1e-15);
        assert_eq!(a[0].face(1).unwrap().element(), a[0].nerve().elements()[0] * a[0].nerve().elements()[1]);
    }

    #[test]
    fn normalization() {
        let f = random_normalized_cochain(8, 1, 2);
        let mut rng = rng_from_seed(3);
        let v = random_cover_point(&mut rng, 2);
        assert_eq!(f.raw(&[v.clone(), v.clone()]), 0.0);
        let w = random_cover_point(&mut rng, 1).degeneracy(0).unwrap();
        let w2 = random_labels(&mut rng, w.nerve().clone());
        assert_eq!(f.raw(&[w, w2]), 0.0);
    }

    #[test]
    fn delta_sm_bidegrees() {
        let s = CochainSum::from_parts(vec![random_normalized_cochain(1, 2, 1)]).unwrap();
        let d = s.delta_sm().unwrap();
        assert_eq!(d.bidegrees(), vec![(2, 2), (3, 1)]);
        let mut rng = rng_from_seed(4);
        let a = sample_args(&mut rng, 2, 2);
        let direct = s.part(2, 1).unwrap().delta_nerve().unwrap().raw(&a);
        assert!((d.part(2, 2).unwrap().raw(&a) - direct).abs() < 1e-15);
    }

    #[test]
    fn mixed_degree_rejected() {
        let r = CochainSum::from_parts(vec![Cochain::zero(1, 1), Cochain::zero(2, 1)]);
        assert_eq!(r.unwrap_err(), CochainError::MixedDegree(2, 3));
        assert!(Cochain::zero(0, 4).delta_nerve().is_err());
    }

    #[test]
    fn nilpotent() {
        assert!(all_passed(&nilpotency_checks(7, 200, 1e-9)));
    }

    #[test]
    fn generated_cocycles_pass_and_bumps_fail() {
        assert!(all_passed(&is_sm_cocycle(&SmThreeCocycle::zero(), 1, 50, 1e-9)));
        let l = generate_coboundary_cocycle(42);
        assert!(all_passed(&is_sm_cocycle(&l, 99, 200, 1e-9)));
        let bumped = l.with_lambda03(l.lambda03.plus(&random_normalized_cochain(5, 0, 3)));
        let r = is_sm_cocycle(&bumped, 99, 200, 1e-9);
        assert!(r[0].passed && r[1].passed && !r[2].passed && !r[3].passed);
        let zero = Potential::zero().cocycle();
        let mut rng = rng_from_seed(5);
        let a = sample_args(&mut rng, 0, 3);
        assert_eq!(zero.lambda03.raw(&a), 0.0);
    }

    #[test]
    fn circle_values() {
        let a = CircleValue::new(0.75) + CircleValue::new(0.5);
        assert!((a.get() - 0.25).abs() < 1e-15);
        assert!(CircleValue::new(-1e-18).get() < 1.0);
        assert!(CircleValue::new(0.999_999_999_999).distance(CircleValue::ZERO) < 1e-11);
    }
}
