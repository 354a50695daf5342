//! Hausdorff-distance estimation between bounded planar polyhedral sets and
//! the facet-translation convergence experiments.
//!
//! Distances involve square roots, so every result is an interval obtained
//! from exact squared-distance arithmetic with outward rounding. The
//! directed sup is bounded by branch-and-bound over simplices: for a
//! simplex σ and a convex element e, the distance to e is convex on σ, so
//! its maximum over σ is attained at a vertex, which yields an upper bound
//! that subdivision sharpens.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use serde::Serialize;

use crate::lp::HSystem;
use crate::polytope::Polytope;
use crate::rat::{IntVec, Rat};
use crate::tropical::{self, PLComplex};
use crate::{Error, Result};

/// An interval [lower, upper] bracketing a Euclidean distance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DistanceInterval {
    pub lower: Rat,
    pub upper: Rat,
}

/// A polytope with one facet translated through a decreasing list of
/// offsets δ, the setup of the convergence experiments.
#[derive(Clone, Debug)]
pub struct PerturbationFamily {
    pub base: Polytope,
    pub facet: usize,
    pub deltas: Vec<Rat>,
}

/// A point, segment, or triangle with exact rational vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Simplex {
    Point([Vec<Rat>; 1]),
    Segment([Vec<Rat>; 2]),
    Triangle([Vec<Rat>; 3]),
}

impl Simplex {
    fn vertices(&self) -> &[Vec<Rat>] {
        match self {
            Simplex::Point(v) => v,
            Simplex::Segment(v) => v,
            Simplex::Triangle(v) => v,
        }
    }

    fn subdivide(&self) -> Vec<Simplex> {
        match self {
            Simplex::Point(_) => Vec::new(),
            Simplex::Segment([a, b]) => {
                let m = midpoint(a, b);
                vec![
                    Simplex::Segment([a.clone(), m.clone()]),
                    Simplex::Segment([m, b.clone()]),
                ]
            }
            Simplex::Triangle([a, b, c]) => {
                let ab = midpoint(a, b);
                let bc = midpoint(b, c);
                let ca = midpoint(c, a);
                vec![
                    Simplex::Triangle([a.clone(), ab.clone(), ca.clone()]),
                    Simplex::Triangle([b.clone(), bc.clone(), ab.clone()]),
                    Simplex::Triangle([c.clone(), ca.clone(), bc.clone()]),
                    Simplex::Triangle([ab, bc, ca]),
                ]
            }
        }
    }
}

fn midpoint(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let half = Rat::ratio(1, 2);
    a.iter()
        .zip(b)
        .map(|(x, y)| &(x + y) * &half)
        .collect()
}

/// A bounded planar set as a finite union of points, segments, and
/// triangles.
#[derive(Clone, Debug)]
pub struct PlanarSet {
    pub simplices: Vec<Simplex>,
    /// Whether the union of simplices is a convex set. Distance to a convex
    /// set is a convex function, so directed suprema over simplices are then
    /// attained at vertices and need no subdivision.
    pub convex: bool,
}

impl PlanarSet {
    /// Decompose a closed 2-D polytope into fan triangles.
    pub fn from_polytope(p: &Polytope) -> Result<Self> {
        if p.dim != 2 {
            return Err(Error::MetricDimension(p.dim));
        }
        let verts = p.weak_system().vertices()?;
        Ok(PlanarSet {
            simplices: shape_from_hull(verts),
            convex: true,
        })
    }

    /// Decompose the cells of a 2-D complex, clipped to an optional ambient
    /// box; without a clip every cell must already be bounded.
    pub fn from_complex(c: &PLComplex, clip: Option<&HSystem>) -> Result<Self> {
        if c.dim != 2 {
            return Err(Error::MetricDimension(c.dim));
        }
        let mut simplices = Vec::new();
        let mut live_cells = 0;
        for cell in &c.cells {
            let sys = match clip {
                Some(b) => cell.system.and(b)?,
                None => cell.system.clone(),
            };
            if sys.feasible().is_none() {
                continue;
            }
            if !sys.is_bounded() {
                return Err(Error::Unbounded);
            }
            live_cells += 1;
            simplices.extend(shape_from_hull(sys.vertices()?));
        }
        // A single cell is a convex polyhedron even after triangulation.
        let convex = live_cells <= 1;
        Ok(PlanarSet { simplices, convex })
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }
}

/// Convert hull vertices (any order) into a point, segment, or triangle fan.
fn shape_from_hull(mut verts: Vec<Vec<Rat>>) -> Vec<Simplex> {
    match verts.len() {
        0 => Vec::new(),
        1 => vec![Simplex::Point([verts.remove(0)])],
        2 => {
            let b = verts.remove(1);
            let a = verts.remove(0);
            vec![Simplex::Segment([a, b])]
        }
        _ => {
            order_around_centroid(&mut verts);
            (1..verts.len() - 1)
                .map(|i| {
                    Simplex::Triangle([
                        verts[0].clone(),
                        verts[i].clone(),
                        verts[i + 1].clone(),
                    ])
                })
                .collect()
        }
    }
}

/// Sort hull vertices counterclockwise around their centroid, exactly.
fn order_around_centroid(verts: &mut [Vec<Rat>]) {
    let n = Rat::from_int(verts.len() as i64);
    let cx = verts
        .iter()
        .fold(Rat::zero(), |acc, v| acc + &v[0])
        / &n;
    let cy = verts
        .iter()
        .fold(Rat::zero(), |acc, v| acc + &v[1])
        / &n;
    let half = |v: &Vec<Rat>| -> u8 {
        let dy = &v[1] - &cy;
        let dx = &v[0] - &cx;
        // Upper half-plane (including the positive x-axis) first.
        if dy.is_positive() || (dy.is_zero() && dx.is_positive()) {
            0
        } else {
            1
        }
    };
    verts.sort_by(|p, q| {
        half(p).cmp(&half(q)).then_with(|| {
            let cross = (&p[0] - &cx) * (&q[1] - &cy) - (&p[1] - &cy) * (&q[0] - &cx);
            Rat::zero().cmp(&cross)
        })
    });
}

fn dist_sq_points(p: &[Rat], q: &[Rat]) -> Rat {
    let dx = &p[0] - &q[0];
    let dy = &p[1] - &q[1];
    &dx * &dx + &dy * &dy
}

fn dist_sq_point_segment(p: &[Rat], a: &[Rat], b: &[Rat]) -> Rat {
    let abx = &b[0] - &a[0];
    let aby = &b[1] - &a[1];
    let len_sq = &abx * &abx + &aby * &aby;
    if len_sq.is_zero() {
        return dist_sq_points(p, a);
    }
    let apx = &p[0] - &a[0];
    let apy = &p[1] - &a[1];
    let t = (&apx * &abx + &apy * &aby) / &len_sq;
    let t = t.max(Rat::zero()).min(Rat::one());
    let nx = &a[0] + &(&abx * &t);
    let ny = &a[1] + &(&aby * &t);
    dist_sq_points(p, &[nx, ny])
}

fn cross(o: &[Rat], a: &[Rat], b: &[Rat]) -> Rat {
    (&a[0] - &o[0]) * (&b[1] - &o[1]) - (&a[1] - &o[1]) * (&b[0] - &o[0])
}

fn dist_sq_point_simplex(p: &[Rat], s: &Simplex) -> Rat {
    match s {
        Simplex::Point([q]) => dist_sq_points(p, q),
        Simplex::Segment([a, b]) => dist_sq_point_segment(p, a, b),
        Simplex::Triangle([a, b, c]) => {
            let d1 = cross(a, b, p);
            let d2 = cross(b, c, p);
            let d3 = cross(c, a, p);
            let has_neg = d1.is_negative() || d2.is_negative() || d3.is_negative();
            let has_pos = d1.is_positive() || d2.is_positive() || d3.is_positive();
            if !(has_neg && has_pos) {
                return Rat::zero();
            }
            dist_sq_point_segment(p, a, b)
                .min(dist_sq_point_segment(p, b, c))
                .min(dist_sq_point_segment(p, c, a))
        }
    }
}

fn dist_sq_point_set(p: &[Rat], set: &[Simplex]) -> Rat {
    set.iter()
        .map(|s| dist_sq_point_simplex(p, s))
        .min()
        .expect("set is nonempty")
}

/// Rational bracket [s, s'] around sqrt(x) with s' − s ≤ eps.
fn sqrt_bracket(x: &Rat, eps: &Rat) -> (Rat, Rat) {
    debug_assert!(!x.is_negative());
    if x.is_zero() {
        return (Rat::zero(), Rat::zero());
    }
    // ceil(1/eps); sqrt(p/q) = sqrt(p·q)/q, so floor-sqrt over integers
    // after scaling by k² gives a bracket of width 1/(k·q) ≤ eps.
    let inv = eps.recip();
    let k = inv.numer().div_ceil(inv.denom()).max(BigInt::one());
    let p = x.numer();
    let q = x.denom();
    let scaled: BigInt = p * q * (&k * &k);
    let root = scaled.sqrt();
    let denom = &k * q;
    let lo = Rat::new(root.clone(), denom.clone());
    let hi = Rat::new(root + BigInt::one(), denom);
    (lo, hi)
}

/// Bracket on sup_{a∈A} d(a, B) by branch-and-bound over the simplices of
/// A. When B is convex, d(·, B) is convex, so the supremum is attained at a
/// simplex vertex and the initial vertex pass is already exact.
fn directed_bound(a: &[Simplex], b: &[Simplex], b_convex: bool, tol: &Rat) -> (Rat, Rat) {
    let quarter_tol = tol * &Rat::ratio(1, 4);
    // Lower bound: the largest exact vertex distance seen so far.
    let mut lower_sq = Rat::zero();
    let mut queue: Vec<(Simplex, Rat)> = Vec::new();
    let push = |s: Simplex, lower_sq: &mut Rat, queue: &mut Vec<(Simplex, Rat)>| {
        let mut ub_sq: Option<Rat> = None;
        for e in b {
            let m = s
                .vertices()
                .iter()
                .map(|v| dist_sq_point_simplex(v, e))
                .max()
                .expect("simplex has vertices");
            ub_sq = Some(match ub_sq {
                None => m,
                Some(u) => u.min(m),
            });
        }
        let ub_sq = ub_sq.expect("target set is nonempty");
        for v in s.vertices() {
            let d = dist_sq_point_set(v, b);
            if d > *lower_sq {
                *lower_sq = d;
            }
        }
        if !b_convex && ub_sq > *lower_sq {
            queue.push((s, ub_sq));
        }
    };
    for s in a {
        push(s.clone(), &mut lower_sq, &mut queue);
    }
    loop {
        queue.retain(|(_, ub)| *ub > lower_sq);
        let upper_sq = queue
            .iter()
            .map(|(_, ub)| ub.clone())
            .max()
            .unwrap_or_else(|| lower_sq.clone())
            .max(lower_sq.clone());
        let (lo, _) = sqrt_bracket(&lower_sq, &quarter_tol);
        let (_, hi) = sqrt_bracket(&upper_sq, &quarter_tol);
        if &(&hi - &lo) <= tol || queue.is_empty() {
            return (lo, hi);
        }
        // Expand the simplex with the largest upper bound.
        let idx = queue
            .iter()
            .enumerate()
            .max_by(|(_, (_, x)), (_, (_, y))| x.cmp(y))
            .map(|(i, _)| i)
            .expect("queue is nonempty");
        let (s, _) = queue.swap_remove(idx);
        for child in s.subdivide() {
            push(child, &mut lower_sq, &mut queue);
        }
    }
}

/// Hausdorff distance between two bounded nonempty planar sets, bracketed
/// to width ≤ tol.
pub fn hausdorff(a: &PlanarSet, b: &PlanarSet, tol: &Rat) -> Result<DistanceInterval> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    if !tol.is_positive() {
        return Err(Error::BadRational(format!("tolerance {tol} must be positive")));
    }
    let (l1, u1) = directed_bound(&a.simplices, &b.simplices, b.convex, tol);
    let (l2, u2) = directed_bound(&b.simplices, &a.simplices, a.convex, tol);
    Ok(DistanceInterval {
        lower: l1.max(l2),
        upper: u1.max(u2),
    })
}

/// The axis box of the base polytope inflated by 1 on every side, as the
/// clipping region for unbounded tropicalizations.
pub fn inflated_box(p: &Polytope) -> Result<HSystem> {
    let bb = p.bounding_box()?;
    let mut s = HSystem::new(p.dim);
    for (i, (lo, hi)) in bb.iter().enumerate() {
        let e = IntVec::unit(p.dim, i);
        s.push_ge(e.clone(), lo - &Rat::one());
        s.push_ge(e.neg(), -&(hi + &Rat::one()));
    }
    Ok(s)
}

/// Hausdorff distance rows between the relative tropicalization of the base
/// polytope and of each single-facet translate, all clipped to the base's
/// inflated bounding box.
pub fn convergence_experiment(
    fam: &PerturbationFamily,
    m: &IntVec,
    tol: &Rat,
) -> Result<Vec<(Rat, DistanceInterval)>> {
    if fam.base.dim != 2 {
        return Err(Error::MetricDimension(fam.base.dim));
    }
    let clip = inflated_box(&fam.base)?;
    let base_trop = tropical::trop_relative(&fam.base, m)?;
    let base_set = PlanarSet::from_complex(&base_trop, Some(&clip))?;
    fam.base.facet(fam.facet)?;
    let mut rows = Vec::with_capacity(fam.deltas.len());
    for delta in &fam.deltas {
        // Shift the offset directly: the tropicalization of the translated
        // facet data stays well-defined even when a large shift makes the
        // moved facet redundant, which full polytope validation would reject.
        let mut moved = fam.base.clone();
        moved.facets[fam.facet - 1].offset = &moved.facets[fam.facet - 1].offset - delta;
        let moved_trop = tropical::trop_relative(&moved, m)?;
        let moved_set = PlanarSet::from_complex(&moved_trop, Some(&clip))?;
        rows.push((delta.clone(), hausdorff(&base_set, &moved_set, tol)?));
    }
    Ok(rows)
}
