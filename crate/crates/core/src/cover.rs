//! The nerve of the one-object groupoid of SU(2) and its eight-patch cover.
//!
//! Base patches are the half-spaces `x >= 0, x < 0, y >= 0, ..., w < 0`. A level-`p`
//! cover point is a nerve point together with one base label per edge `(a, b)`,
//! `0 <= a < b <= p`, of the simplex, where edge `(a, b)` carries the element
//! `g_{a+1} ... g_b`. Faces delete a vertex and degeneracies repeat one.

use std::cmp::Ordering;
use std::fmt;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::group::Su2;
use crate::report::Check;
use crate::sampling::random_su2;

/// Highest simplicial level supported by the cover machinery.
pub const MAX_LEVEL: usize = 4;

/// Number of base patches.
pub const PATCH_COUNT: u8 = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoverError {
    #[error("base patch index {0} is outside 1..=8")]
    PatchOutOfRange(u8),
    #[error("{kind} index {index} is invalid at level {level}")]
    IndexOutOfRange {
        kind: &'static str,
        index: usize,
        level: usize,
    },
    #[error("level {0} exceeds the supported maximum {MAX_LEVEL}")]
    LevelCap(usize),
    #[error("edge ({a},{b}) element does not lie in patch {label}")]
    NotInPatch { a: usize, b: usize, label: u8 },
    #[error("expected {expected} edge labels, got {got}")]
    LabelCount { expected: usize, got: usize },
}

/// A base patch label in `1..=8`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PatchIndex(u8);

impl PatchIndex {
    pub const FIRST: PatchIndex = PatchIndex(1);

    pub fn new(i: u8) -> Result<Self, CoverError> {
        if (1..=PATCH_COUNT).contains(&i) {
            Ok(PatchIndex(i))
        } else {
            Err(CoverError::PatchOutOfRange(i))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = PatchIndex> {
        (1..=PATCH_COUNT).map(PatchIndex)
    }

    /// Evaluates the half-space predicate of this patch.
    pub fn contains(self, g: &Su2) -> bool {
        let c = g.coords()[usize::from((self.0 - 1) / 2)];
        if self.0 % 2 == 1 {
            c >= 0.0
        } else {
            c < 0.0
        }
    }
}

impl fmt::Display for PatchIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Checked membership for a raw index.
pub fn patch_membership(g: &Su2, i: u8) -> Result<bool, CoverError> {
    Ok(PatchIndex::new(i)?.contains(g))
}

/// The smallest patch containing `g`.
pub fn minimal_patch(g: &Su2) -> PatchIndex {
    PatchIndex::all()
        .find(|i| i.contains(g))
        .expect("the x >= 0 and x < 0 patches cover the group")
}

/// The patches containing `g` (always exactly four).
pub fn containing_patches(g: &Su2) -> Vec<PatchIndex> {
    PatchIndex::all().filter(|i| i.contains(g)).collect()
}

/// A point of `G^p`. Level 0 is the single point `*`.
#[derive(Clone, Debug, PartialEq)]
pub struct NervePoint {
    elements: Vec<Su2>,
}

impl NervePoint {
    pub fn new(elements: Vec<Su2>) -> Result<Self, CoverError> {
        if elements.len() > MAX_LEVEL {
            return Err(CoverError::LevelCap(elements.len()));
        }
        Ok(NervePoint { elements })
    }

    pub fn star() -> Self {
        NervePoint { elements: vec![] }
    }

    pub fn level(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Su2] {
        &self.elements
    }

    /// The element `g_{a+1} ... g_b` carried by edge `(a, b)`.
    pub fn edge_element(&self, a: usize, b: usize) -> Su2 {
        self.elements[a..b]
            .iter()
            .fold(Su2::IDENTITY, |acc, g| acc * *g)
    }

    /// Face map `f_i`: drops `g_1` (i = 0), drops `g_p` (i = p), else merges `g_i g_{i+1}`.
    pub fn face(&self, i: usize) -> Result<Self, CoverError> {
        let p = self.level();
        if p == 0 || i > p {
            return Err(CoverError::IndexOutOfRange {
                kind: "face",
                index: i,
                level: p,
            });
        }
        let mut e = self.elements.clone();
        if i == 0 {
            e.remove(0);
        } else if i == p {
            e.pop();
        } else {
            let merged = e[i - 1] * e[i];
            e.splice(i - 1..=i, [merged]);
        }
        Ok(NervePoint { elements: e })
    }

    /// Degeneracy map `d_i`: inserts the identity as the new `g_{i+1}`.
    pub fn degeneracy(&self, i: usize) -> Result<Self, CoverError> {
        let p = self.level();
        if i > p {
            return Err(CoverError::IndexOutOfRange {
                kind: "degeneracy",
                index: i,
                level: p,
            });
        }
        if p + 1 > MAX_LEVEL {
            return Err(CoverError::LevelCap(p + 1));
        }
        let mut e = self.elements.clone();
        e.insert(i, Su2::IDENTITY);
        Ok(NervePoint { elements: e })
    }

    /// Largest coordinate distance between two points of the same level.
    pub fn distance(&self, o: &Self) -> f64 {
        if self.level() != o.level() {
            return f64::INFINITY;
        }
        self.elements
            .iter()
            .zip(&o.elements)
            .map(|(a, b)| a.distance(b))
            .fold(0.0, f64::max)
    }
}

/// Edges `(a, b)` of a `p`-simplex in lexicographic order.
pub fn edges(p: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..=p).flat_map(move |a| (a + 1..=p).map(move |b| (a, b)))
}

fn edge_slot(p: usize, a: usize, b: usize) -> usize {
    debug_assert!(a < b && b <= p);
    // edges before row a, then offset within the row
    a * (2 * p + 1 - a) / 2 + (b - a - 1)
}

/// Multi-index of a cover patch: the nested tuple of face indices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(untagged)]
pub enum SimplicialIndex {
    Unit,
    Base(PatchIndex),
    Multi(Vec<SimplicialIndex>),
}

impl SimplicialIndex {
    pub fn level(&self) -> usize {
        match self {
            SimplicialIndex::Unit => 0,
            SimplicialIndex::Base(_) => 1,
            SimplicialIndex::Multi(v) => v.len() - 1,
        }
    }
}

impl fmt::Display for SimplicialIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimplicialIndex::Unit => f.write_str("*"),
            SimplicialIndex::Base(i) => write!(f, "{i}"),
            SimplicialIndex::Multi(v) => {
                f.write_str("(")?;
                for (n, x) in v.iter().enumerate() {
                    if n > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// A point of the cover `V_p`: a nerve point with one base label per edge.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverPoint {
    point: NervePoint,
    labels: Vec<PatchIndex>,
}

impl CoverPoint {
    /// Validates membership of every edge element in its labelled patch.
    pub fn new(point: NervePoint, labels: Vec<PatchIndex>) -> Result<Self, CoverError> {
        let p = point.level();
        let expected = p * (p + 1) / 2;
        if labels.len() != expected {
            return Err(CoverError::LabelCount {
                expected,
                got: labels.len(),
            });
        }
        for (a, b) in edges(p) {
            let label = labels[edge_slot(p, a, b)];
            if !label.contains(&point.edge_element(a, b)) {
                return Err(CoverError::NotInPatch {
                    a,
                    b,
                    label: label.get(),
                });
            }
        }
        Ok(CoverPoint { point, labels })
    }

    pub fn star() -> Self {
        CoverPoint {
            point: NervePoint::star(),
            labels: vec![],
        }
    }

    /// A level-1 point in patch `label`.
    pub fn level1(g: Su2, label: PatchIndex) -> Result<Self, CoverError> {
        Self::new(NervePoint { elements: vec![g] }, vec![label])
    }

    pub fn level(&self) -> usize {
        self.point.level()
    }

    /// The projection to the nerve.
    pub fn nerve(&self) -> &NervePoint {
        &self.point
    }

    /// For level-1 points, the underlying group element.
    pub fn element(&self) -> Su2 {
        assert_eq!(self.level(), 1, "element() needs a level-1 point");
        self.point.elements[0]
    }

    pub fn label(&self, a: usize, b: usize) -> PatchIndex {
        self.labels[edge_slot(self.level(), a, b)]
    }

    pub fn labels(&self) -> &[PatchIndex] {
        &self.labels
    }

    /// The patch multi-index of this point.
    pub fn patch(&self) -> SimplicialIndex {
        match self.level() {
            0 => SimplicialIndex::Unit,
            1 => SimplicialIndex::Base(self.labels[0]),
            p => SimplicialIndex::Multi(
                (0..=p)
                    .map(|i| self.face_unchecked(i).patch())
                    .collect(),
            ),
        }
    }

    fn face_unchecked(&self, i: usize) -> CoverPoint {
        let p = self.level();
        let keep = |v: usize| if v < i { v } else { v + 1 };
        let labels = edges(p - 1).map(|(a, b)| self.label(keep(a), keep(b))).collect();
        CoverPoint {
            point: self.point.face(i).expect("face index checked by caller"),
            labels,
        }
    }

    pub fn face(&self, i: usize) -> Result<CoverPoint, CoverError> {
        let p = self.level();
        if p == 0 || i > p {
            return Err(CoverError::IndexOutOfRange {
                kind: "face",
                index: i,
                level: p,
            });
        }
        Ok(self.face_unchecked(i))
    }

    /// Degeneracy `d_i`; the new degenerate edge carries the identity's minimal patch.
    pub fn degeneracy(&self, i: usize) -> Result<CoverPoint, CoverError> {
        let p = self.level();
        let point = self.point.degeneracy(i)?;
        let collapse = |v: usize| if v <= i { v } else { v - 1 };
        let labels = edges(p + 1)
            .map(|(a, b)| {
                let (ca, cb) = (collapse(a), collapse(b));
                if ca == cb {
                    PatchIndex::FIRST
                } else {
                    self.label(ca, cb)
                }
            })
            .collect();
        Ok(CoverPoint { point, labels })
    }

    /// Total order on cover patches used by the sections.
    pub fn patch_cmp(&self, o: &Self) -> Ordering {
        self.patch().cmp(&o.patch())
    }
}

/// Fills every edge not listed in `fixed` with its minimal patch.
pub fn fill_minimal(
    elements: Vec<Su2>,
    fixed: &[((usize, usize), PatchIndex)],
) -> Result<CoverPoint, CoverError> {
    let point = NervePoint::new(elements)?;
    let p = point.level();
    let labels = edges(p)
        .map(|e| {
            fixed
                .iter()
                .find(|(fe, _)| *fe == e)
                .map_or_else(|| minimal_patch(&point.edge_element(e.0, e.1)), |(_, l)| *l)
        })
        .collect();
    CoverPoint::new(point, labels)
}

/// The section `phi1`: the point over `g` in the smallest patch.
pub fn phi1(g: Su2) -> CoverPoint {
    CoverPoint {
        point: NervePoint { elements: vec![g] },
        labels: vec![minimal_patch(&g)],
    }
}

/// The unit object `phi1(1)`.
pub fn unit() -> CoverPoint {
    phi1(Su2::IDENTITY)
}

fn assert_level1(vs: &[&CoverPoint]) {
    for v in vs {
        assert_eq!(v.level(), 1, "horn fillers take level-1 points");
    }
}

/// Horn filler over `(v0, v1)`: edges 01 and 12 fixed, edge 02 minimal.
pub fn phi2(v0: &CoverPoint, v1: &CoverPoint) -> CoverPoint {
    assert_level1(&[v0, v1]);
    fill_minimal(
        vec![v0.element(), v1.element()],
        &[((0, 1), v0.labels[0]), ((1, 2), v1.labels[0])],
    )
    .expect("inputs are valid cover points")
}

/// Horn filler over `(v0, v1, v2)`: the consecutive edges fixed, all others minimal.
pub fn phi3(v0: &CoverPoint, v1: &CoverPoint, v2: &CoverPoint) -> CoverPoint {
    assert_level1(&[v0, v1, v2]);
    fill_minimal(
        vec![v0.element(), v1.element(), v2.element()],
        &[
            ((0, 1), v0.labels[0]),
            ((1, 2), v1.labels[0]),
            ((2, 3), v2.labels[0]),
        ],
    )
    .expect("inputs are valid cover points")
}

/// Level-4 point with the four consecutive edges fixed and all others minimal.
pub fn phi4(vs: [&CoverPoint; 4]) -> CoverPoint {
    assert_level1(&vs);
    let fixed: Vec<_> = vs
        .iter()
        .enumerate()
        .map(|(i, v)| ((i, i + 1), v.labels[0]))
        .collect();
    fill_minimal(vs.iter().map(|v| v.element()).collect(), &fixed)
        .expect("inputs are valid cover points")
}

/// Object product `v0 (x) v1 = f_1 phi2(v0, v1) = phi1(pi(v0) pi(v1))`.
pub fn otimes(v0: &CoverPoint, v1: &CoverPoint) -> CoverPoint {
    phi2(v0, v1).face(1).expect("level-2 point has face 1")
}

/// A uniformly random level-`p` cover point with random admissible edge labels.
pub fn random_cover_point<R: Rng + ?Sized>(rng: &mut R, p: usize) -> CoverPoint {
    let elements: Vec<Su2> = (0..p).map(|_| random_su2(rng)).collect();
    random_labels(rng, NervePoint { elements })
}

/// Random admissible labels over a given nerve point.
pub fn random_labels<R: Rng + ?Sized>(rng: &mut R, point: NervePoint) -> CoverPoint {
    let p = point.level();
    let labels = edges(p)
        .map(|(a, b)| {
            let opts = containing_patches(&point.edge_element(a, b));
            opts[rng.random_range(0..opts.len())]
        })
        .collect();
    CoverPoint { point, labels }
}

/// A random level-1 point over `g`.
pub fn random_lift<R: Rng + ?Sized>(rng: &mut R, g: Su2) -> CoverPoint {
    random_labels(rng, NervePoint { elements: vec![g] })
}

/// Machine-readable description of the cover.
#[derive(Debug, Clone, Serialize)]
pub struct CoverDescription {
    pub group: &'static str,
    pub coordinates: [&'static str; 4],
    pub patches: Vec<PatchDescription>,
    pub max_level: usize,
    pub index_order: &'static str,
    pub face_convention: &'static str,
    pub degeneracy_convention: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct PatchDescription {
    pub index: u8,
    pub predicate: String,
}

pub fn describe() -> CoverDescription {
    let names = ["x", "y", "z", "w"];
    CoverDescription {
        group: "SU(2)",
        coordinates: names,
        patches: PatchIndex::all()
            .map(|i| {
                let c = names[usize::from((i.get() - 1) / 2)];
                let op = if i.get() % 2 == 1 { ">=" } else { "<" };
                PatchDescription {
                    index: i.get(),
                    predicate: format!("{c} {op} 0"),
                }
            })
            .collect(),
        max_level: MAX_LEVEL,
        index_order: "level p index = tuple of the p+1 face indices, compared lexicographically",
        face_convention: "f_0 drops g_1, f_p drops g_p, f_i merges g_i g_(i+1)",
        degeneracy_convention: "d_i inserts the identity at slot i+1; new edge labelled 1",
    }
}

/// A simplicial identity that failed on a sample.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityFailure {
    pub identity: String,
    pub level: usize,
    pub distance: f64,
    pub labels_match: bool,
}

/// Outcome of a simplicial identity campaign.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub samples_per_level: usize,
    pub checks: usize,
    pub max_distance: f64,
    pub failures: Vec<IdentityFailure>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks the face-face, degeneracy-degeneracy and face-degeneracy identities,
/// face compatibility of patches, and membership, on random cover points.
pub fn simplicial_identities_check<R: Rng + ?Sized>(
    rng: &mut R,
    samples: usize,
    tol: f64,
) -> IdentityReport {
    let mut report = IdentityReport {
        samples_per_level: samples,
        checks: 0,
        max_distance: 0.0,
        failures: vec![],
    };
    let record = |rep: &mut IdentityReport, name: String, p: usize, x: &CoverPoint, y: &CoverPoint| {
        let d = x.nerve().distance(y.nerve());
        let same = x.labels == y.labels;
        rep.checks += 1;
        rep.max_distance = rep.max_distance.max(d);
        if d > tol || !same {
            rep.failures.push(IdentityFailure {
                identity: name,
                level: p,
                distance: d,
                labels_match: same,
            });
        }
    };
    for p in 0..=3 {
        for _ in 0..samples {
            let v = random_cover_point(rng, p);
            let check_member = CoverPoint::new(v.point.clone(), v.labels.clone()).is_ok();
            if !check_member {
                report.failures.push(IdentityFailure {
                    identity: "membership".into(),
                    level: p,
                    distance: f64::NAN,
                    labels_match: false,
                });
            }
            for j in 0..=p {
                for i in 0..j {
                    if p >= 2 {
                        let l = v.face(j).and_then(|x| x.face(i));
                        let r = v.face(i).and_then(|x| x.face(j - 1));
                        if let (Ok(l), Ok(r)) = (l, r) {
                            record(&mut report, format!("f{i} f{j} = f{} f{i}", j - 1), p, &l, &r);
                        }
                    }
                }
            }
            if p + 2 <= MAX_LEVEL {
                for j in 0..=p {
                    for i in 0..=j {
                        let l = v.degeneracy(j).and_then(|x| x.degeneracy(i));
                        let r = v.degeneracy(i).and_then(|x| x.degeneracy(j + 1));
                        if let (Ok(l), Ok(r)) = (l, r) {
                            record(&mut report, format!("d{i} d{j} = d{} d{i}", j + 1), p, &l, &r);
                        }
                    }
                }
            }
            for j in 0..=p {
                let Ok(dv) = v.degeneracy(j) else { continue };
                for i in 0..=p + 1 {
                    let l = dv.face(i).expect("valid face");
                    let r = if i == j || i == j + 1 {
                        v.clone()
                    } else if i < j {
                        v.face(i).and_then(|x| x.degeneracy(j - 1)).expect("valid")
                    } else {
                        v.face(i - 1).and_then(|x| x.degeneracy(j)).expect("valid")
                    };
                    record(&mut report, format!("f{i} d{j}"), p, &l, &r);
                }
            }
        }
    }
    report
}

fn object_residual(a: &CoverPoint, b: &CoverPoint) -> f64 {
    if a.labels == b.labels {
        a.nerve().distance(b.nerve())
    } else {
        1.0
    }
}

/// Face relations of the horn fillers and strict associativity of the object product.
pub fn filler_checks<R: Rng + ?Sized>(rng: &mut R, samples: usize, tol: f64) -> Vec<Check> {
    let names = [
        "phi2 faces",
        "phi3 faces",
        "(v0 (x) v1) (x) v2 = v0 (x) (v1 (x) v2)",
        "pi(v0 (x) v1) = pi(v0) pi(v1)",
    ];
    let mut rows = vec![Vec::with_capacity(samples); names.len()];
    for _ in 0..samples {
        let v: Vec<CoverPoint> = (0..3).map(|_| random_cover_point(rng, 1)).collect();
        let f = |x: &CoverPoint, i: usize| x.face(i).expect("valid face");
        let p2 = phi2(&v[0], &v[1]);
        let r2 = object_residual(&f(&p2, 0), &v[1]).max(object_residual(&f(&p2, 2), &v[0]));
        let p3 = phi3(&v[0], &v[1], &v[2]);
        let r3 = [
            object_residual(&f(&p3, 0), &phi2(&v[1], &v[2])),
            object_residual(&f(&p3, 1), &phi2(&otimes(&v[0], &v[1]), &v[2])),
            object_residual(&f(&p3, 2), &phi2(&v[0], &otimes(&v[1], &v[2]))),
            object_residual(&f(&p3, 3), &phi2(&v[0], &v[1])),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        let assoc = object_residual(
            &otimes(&otimes(&v[0], &v[1]), &v[2]),
            &otimes(&v[0], &otimes(&v[1], &v[2])),
        );
        let proj = otimes(&v[0], &v[1]).element().distance(&(v[0].element() * v[1].element()));
        for (r, x) in rows.iter_mut().zip([r2, r3, assoc, proj]) {
            r.push(x);
        }
    }
    names
        .iter()
        .zip(&rows)
        .map(|(n, r)| Check::from_residuals(*n, r, tol))
        .collect()
}

impl IdentityReport {
    /// The campaign as a single check whose residuals are the nerve distances of failures.
    pub fn to_check(&self, tol: f64) -> Check {
        let r: Vec<f64> = self
            .failures
            .iter()
            .map(|f| if f.labels_match { f.distance } else { f64::INFINITY })
            .collect();
        let c = Check::from_residuals("simplicial identities", &r, tol);
        c.with_note(format!(
            "{} identity evaluations, {} failures, max nerve distance {:.3e}",
            self.checks,
            self.failures.len(),
            self.max_distance
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::rng_from_seed;

    fn q(x: f64, y: f64, z: f64, w: f64) -> Su2 {
        Su2::new(x, y, z, w).unwrap()
    }

    #[test]
    fn fillers() {
        let mut rng = rng_from_seed(8);
        for c in filler_checks(&mut rng, 100, 1e-12) {
            assert!(c.passed, "{}", c.name);
        }
        assert!(simplicial_identities_check(&mut rng, 20, 1e-12).to_check(1e-12).passed);
    }

    #[test]
    fn predicates() {
        assert!(patch_membership(&Su2::IDENTITY, 1).unwrap());
        assert!(!patch_membership(&Su2::IDENTITY, 2).unwrap());
        assert!(patch_membership(&q(0.0, 1.0, 0.0, 0.0), 3).unwrap());
        assert!(patch_membership(&Su2::IDENTITY, 9).is_err());
        assert!(patch_membership(&Su2::IDENTITY, 0).is_err());
    }

    #[test]
    fn phi1_examples() {
        assert_eq!(phi1(Su2::IDENTITY).labels()[0].get(), 1);
        assert_eq!(phi1(q(-1.0, 0.0, 0.0, 0.0)).labels()[0].get(), 2);
    }

    #[test]
    fn nerve_faces() {
        let g = q(0.6, 0.8, 0.0, 0.0);
        let h = q(0.0, 0.0, 0.6, 0.8);
        let p1 = NervePoint::new(vec![g]).unwrap();
        assert_eq!(p1.face(0).unwrap(), NervePoint::star());
        assert_eq!(p1.face(1).unwrap(), NervePoint::star());
        let p2 = NervePoint::new(vec![g, h]).unwrap();
        assert_eq!(p2.face(1).unwrap().elements(), &[g * h]);
        assert_eq!(p2.face(0).unwrap().elements(), &[h]);
        assert_eq!(p2.face(2).unwrap().elements(), &[g]);
        assert_eq!(NervePoint::star().degeneracy(0).unwrap().elements(), &[Su2::IDENTITY]);
        assert!(p2.face(3).is_err());
    }

    #[test]
    fn edge_slots_are_dense() {
        for p in 1..=4 {
            let slots: Vec<_> = edges(p).map(|(a, b)| edge_slot(p, a, b)).collect();
            assert_eq!(slots, (0..p * (p + 1) / 2).collect::<Vec<_>>());
        }
    }

    #[test]
    fn level2_patch_is_face_triple() {
        let mut rng = rng_from_seed(3);
        let v = random_cover_point(&mut rng, 2);
        let SimplicialIndex::Multi(m) = v.patch() else {
            panic!("expected multi-index")
        };
        assert_eq!(m[0], SimplicialIndex::Base(v.label(1, 2)));
        assert_eq!(m[1], SimplicialIndex::Base(v.label(0, 2)));
        assert_eq!(m[2], SimplicialIndex::Base(v.label(0, 1)));
    }

    #[test]
    fn phi3_faces() {
        let mut rng = rng_from_seed(11);
        for _ in 0..200 {
            let v: Vec<_> = (0..3).map(|_| random_cover_point(&mut rng, 1)).collect();
            let f = phi3(&v[0], &v[1], &v[2]);
            assert_eq!(f.face(0).unwrap(), phi2(&v[1], &v[2]));
            assert_eq!(f.face(3).unwrap(), phi2(&v[0], &v[1]));
            assert_eq!(f.face(1).unwrap().labels(), phi2(&otimes(&v[0], &v[1]), &v[2]).labels());
            assert_eq!(f.face(2).unwrap().labels(), phi2(&v[0], &otimes(&v[1], &v[2])).labels());
            assert_eq!(f.face(2).unwrap().face(2).unwrap(), v[0]);
            assert_eq!(f.face(0).unwrap().face(0).unwrap(), v[2]);
        }
    }

    #[test]
    fn phi3_of_units_is_degenerate() {
        let u = unit();
        let f = phi3(&u, &u, &u);
        let d = CoverPoint::star()
            .degeneracy(0)
            .and_then(|x| x.degeneracy(0))
            .and_then(|x| x.degeneracy(0))
            .unwrap();
        assert_eq!(f, d);
    }

    #[test]
    fn identities_hold() {
        let mut rng = rng_from_seed(5);
        let rep = simplicial_identities_check(&mut rng, 100, 1e-12);
        assert!(rep.passed(), "{:?}", rep.failures.first());
        assert!(rep.checks > 1000);
    }

    #[test]
    fn invalid_labels_rejected() {
        let g = q(1.0, 0.0, 0.0, 0.0);
        assert!(CoverPoint::level1(g, PatchIndex::new(2).unwrap()).is_err());
        assert!(CoverPoint::level1(g, PatchIndex::new(1).unwrap()).is_ok());
    }
}
