//! Frozen reference values.

use std::f64::consts::FRAC_PI_2;

use string2g::cocycle::SampledCover;
use string2g::cover::{minimal_patch, phi1};
use string2g::forms::Point;
use string2g::linfty::Trilinear;
use string2g::report::circle_distance;
use string2g::sampling::{random_s3, random_su2, rng_from_seed};
use string2g::sds::{phi, sample_residuals, star_d_phi, Reading, Solution};
use string2g::sm::{generate_coboundary_cocycle, sample_args};
use string2g::{Algebra, AlgebraElement, Su2};

fn e(i: usize) -> AlgebraElement {
    AlgebraElement::basis(Algebra::Su2, i)
}

#[test]
fn structure_constants() {
    let b = e(0).bracket(&e(1)).unwrap();
    assert_eq!(b.components(), &[0.0, 0.0, -2.0]);
    assert_eq!(e(0).killing(&e(0)).unwrap(), 1.0);
    assert_eq!(e(0).killing(&e(1)).unwrap(), 0.0);
    assert_eq!(Trilinear::new(1.0).eval(&e(0), &e(1), &e(2)), -2.0);
    assert_eq!(Trilinear::new(2.5).eval(&e(0), &e(1), &e(2)), -5.0);
}

#[test]
fn exponential_of_e3_is_quaternion_i() {
    let g = Su2::exp(&AlgebraElement::from_su2([0.0, 0.0, FRAC_PI_2]), 1.0).unwrap();
    let c = g.coords();
    for (a, b) in c.iter().zip([0.0, 1.0, 0.0, 0.0]) {
        assert!((a - b).abs() < 1e-15, "{c:?}");
    }
}

#[test]
fn patch_labels() {
    assert_eq!(phi1(Su2::IDENTITY).labels()[0].get(), 1);
    assert_eq!(minimal_patch(&Su2::new(-0.6, 0.0, 0.8, 0.0).unwrap()).get(), 2);
    assert_eq!(minimal_patch(&Su2::new(0.0, 0.0, 0.0, -1.0).unwrap()).get(), 1);
}

#[test]
fn seeded_streams() {
    let g = random_su2(&mut rng_from_seed(0)).coords();
    assert_eq!(g, [0.4434283432424198, -0.0912637005000004, 0.19187983451525434, -0.8707607998105608]);
    let x = random_s3(&mut rng_from_seed(1));
    assert_eq!(x, [-0.1268781974298096, -0.7622067223506189, 0.17992165820884043, -0.608745457747218]);
}

#[test]
fn generated_cochain_value() {
    let l = generate_coboundary_cocycle(42);
    let a = sample_args(&mut rng_from_seed(7), 0, 3);
    assert!((l.lambda03.raw(&a) - -0.06664469012011737).abs() < 1e-15);
}

#[test]
fn circle_values() {
    assert_eq!(circle_distance(0.75), 0.25);
    assert_eq!(circle_distance(3.0), 0.0);
    assert!((circle_distance(-0.1) - 0.1).abs() < 1e-15);
}

#[test]
fn sphere_overlaps() {
    let counts: Vec<usize> = SampledCover::sample(0, 360).overlap_counts().iter().map(|o| o.samples).collect();
    assert_eq!(counts, [244, 261, 241, 200]);
}

#[test]
fn harmonic_potential() {
    assert_eq!(phi(&[1.0, 1.0, 1.0, 1.0]).unwrap(), 0.25);
    assert!(phi(&[0.0; 4]).is_err());
    // d Phi = -2 dx^0 at e_0, and *dx^0 = dx^1 dx^2 dx^3
    let s = star_d_phi(&[1.0, 0.0, 0.0, 0.0]);
    assert_eq!(s.coefficient(0b1110), Some(&-2.0));
}

#[test]
fn potential_readings() {
    let x: Point = [0.7, -0.4, 0.3, 0.5];
    let t = Trilinear::new(1.0);
    let lit = sample_residuals(Solution::Potential, Reading::Literal, &t, 1e-3, &x);
    let norm = sample_residuals(Solution::Potential, Reading::Normalized, &t, 1e-3, &x);
    assert!((lit.ratio - 3.0).abs() < 1e-5, "{}", lit.ratio);
    assert!((norm.ratio - 1.0).abs() < 1e-5, "{}", norm.ratio);
}
