//! Tropical hypersurfaces of valued Laurent polynomials and tropicalizations
//! of the moment polytope relative to a lattice direction, represented as
//! piecewise-linear complexes of exact rational cells.
//!
//! A point belongs to a tropicalization when the minimum of the affine forms
//! valuation + ⟨u, exponent⟩ is attained by at least two terms. Cells are
//! generated per unordered term pair, canonicalized through exact LPs, and
//! cells contained in another cell are merged away.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::lp::HSystem;
use crate::polytope::Polytope;
use crate::rat::{self, IntVec, Rat};
use crate::{Error, Result};

/// A min-plus polynomial: finitely many terms valuation + ⟨u, exponent⟩.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TropicalPolynomial {
    pub dim: usize,
    /// (valuation, exponent) pairs, pairwise-distinct exponents, sorted by
    /// exponent lexicographically.
    pub terms: Vec<(Rat, IntVec)>,
}

impl TropicalPolynomial {
    /// Build a polynomial; duplicate exponents merge keeping the minimum
    /// valuation, since only valuations enter the tropicalization.
    pub fn new(dim: usize, terms: Vec<(Rat, IntVec)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::EmptySupport);
        }
        for (_, e) in &terms {
            if e.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: e.dim(),
                });
            }
        }
        let mut merged: Vec<(Rat, IntVec)> = Vec::new();
        for (val, exp) in terms {
            match merged.iter_mut().find(|(_, e)| *e == exp) {
                Some((v, _)) => {
                    if val < *v {
                        *v = val;
                    }
                }
                None => merged.push((val, exp)),
            }
        }
        merged.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
        Ok(TropicalPolynomial { dim, terms: merged })
    }

    /// The tropical value min over terms of valuation + ⟨u, exponent⟩.
    pub fn min_value(&self, u: &[Rat]) -> Rat {
        self.terms
            .iter()
            .map(|(v, e)| v + &e.dot_rat(u))
            .min()
            .expect("polynomial has at least one term")
    }

    /// Whether the minimum is attained by at least two different terms.
    pub fn min_attained_twice(&self, u: &[Rat]) -> bool {
        let min = self.min_value(u);
        self.terms
            .iter()
            .filter(|(v, e)| v + &e.dot_rat(u) == min)
            .count()
            >= 2
    }
}

/// One polyhedral cell of a complex: a canonical feasible H-system with its
/// affine dimension and a rational witness point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub system: HSystem,
    #[serde(rename = "dim")]
    pub dim_cell: i64,
    pub witness: Vec<Rat>,
    /// Generating term pairs (1-based indices into the generating support).
    #[serde(skip)]
    pub tags: Vec<(usize, usize)>,
}

/// A finite union of rational polyhedral cells.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PLComplex {
    pub dim: usize,
    pub provenance: String,
    pub cells: Vec<Cell>,
}

impl PLComplex {
    pub fn empty(dim: usize, provenance: String) -> Self {
        PLComplex {
            dim,
            provenance,
            cells: Vec::new(),
        }
    }

    /// The whole ambient space as a single cell.
    pub fn full_space(dim: usize, provenance: String) -> Self {
        PLComplex {
            dim,
            provenance,
            cells: vec![Cell {
                system: HSystem::new(dim),
                dim_cell: dim as i64,
                witness: vec![Rat::zero(); dim],
                tags: Vec::new(),
            }],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Exact membership of a point in the union of cells (strict rows
    /// checked strictly).
    pub fn contains_point(&self, u: &[Rat]) -> bool {
        self.cells.iter().any(|c| c.system.satisfies(u))
    }

    /// Whether every cell of `self` is contained in some single cell of
    /// `other` (closure-level containment certified by LPs).
    pub fn covered_by(&self, other: &PLComplex) -> Result<bool> {
        for cell in &self.cells {
            let mut covered = false;
            for big in &other.cells {
                if big.system.contains_closure(&cell.system)? {
                    covered = true;
                    break;
                }
            }
            if !covered {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Cellwise set equality: mutual coverage.
    pub fn set_eq(&self, other: &PLComplex) -> Result<bool> {
        Ok(self.covered_by(other)? && other.covered_by(self)?)
    }

    /// Witness points of 0-dimensional cells lying in no positive-dimensional
    /// cell, lexicographically sorted.
    pub fn isolated_points(&self) -> Vec<Vec<Rat>> {
        let mut out: Vec<Vec<Rat>> = Vec::new();
        for cell in &self.cells {
            if cell.dim_cell != 0 {
                continue;
            }
            let buried = self
                .cells
                .iter()
                .any(|c| c.dim_cell >= 1 && c.system.satisfies(&cell.witness));
            if !buried && !out.contains(&cell.witness) {
                out.push(cell.witness.clone());
            }
        }
        out.sort_by(|a, b| rat::lex_cmp(a, b));
        out
    }
}

/// Canonicalize raw cell systems into a complex: infeasible cells dropped,
/// systems reduced, dimensions and witnesses computed, duplicates merged,
/// and any cell contained in another cell absorbed into it.
pub fn canonicalize(
    dim: usize,
    provenance: String,
    raw: Vec<(HSystem, Vec<(usize, usize)>)>,
) -> Result<PLComplex> {
    let mut cells: Vec<Cell> = Vec::new();
    for (system, tags) in raw {
        let Some(_) = system.feasible() else {
            continue;
        };
        let reduced = system.remove_redundant()?;
        let witness = reduced.feasible().expect("reduced system stays feasible");
        let dim_cell = reduced.affine_dim();
        match cells.iter_mut().find(|c| c.system == reduced) {
            Some(existing) => {
                for t in tags {
                    if !existing.tags.contains(&t) {
                        existing.tags.push(t);
                    }
                }
            }
            None => cells.push(Cell {
                system: reduced,
                dim_cell,
                witness,
                tags,
            }),
        }
    }
    cells.sort_by(|a, b| {
        a.dim_cell
            .cmp(&b.dim_cell)
            .then_with(|| a.system.cmp(&b.system))
            .then_with(|| rat::lex_cmp(&a.witness, &b.witness))
    });

    // Absorption: drop a cell whose set sits inside another surviving cell;
    // of two mutually-contained cells the earlier one survives.
    let mut keep = vec![true; cells.len()];
    for i in 0..cells.len() {
        for j in 0..cells.len() {
            if i == j || !keep[j] {
                continue;
            }
            if cells[j].system.contains_closure(&cells[i].system)? {
                let mutual = cells[i].system.contains_closure(&cells[j].system)?;
                if !mutual || j < i {
                    keep[i] = false;
                    break;
                }
            }
        }
    }
    let cells = cells
        .into_iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|(c, _)| c)
        .collect();
    Ok(PLComplex {
        dim,
        provenance,
        cells,
    })
}

/// Raw pair cells of a support list: for each unordered pair the locus where
/// those two affine forms agree and weakly minimize the whole support.
fn pair_cells(
    dim: usize,
    terms: &[(Rat, IntVec, usize)],
    ambient: Option<&HSystem>,
) -> Result<Vec<(HSystem, Vec<(usize, usize)>)>> {
    let mut raw = Vec::new();
    for s in 0..terms.len() {
        for t in (s + 1)..terms.len() {
            let mut sys = HSystem::new(dim);
            let (val_s, exp_s, tag_s) = &terms[s];
            let (val_t, exp_t, tag_t) = &terms[t];
            sys.push_eq(exp_s.sub(exp_t), val_t - val_s);
            for (r, (val_r, exp_r, _)) in terms.iter().enumerate() {
                if r != s && r != t {
                    sys.push_ge(exp_r.sub(exp_s), val_s - val_r);
                }
            }
            if let Some(amb) = ambient {
                sys = sys.and(amb)?;
            }
            raw.push((sys, vec![(*tag_s, *tag_t)]));
        }
    }
    Ok(raw)
}

/// Tropical hypersurface of a polynomial, optionally restricted to an
/// ambient system. A single-term polynomial yields the empty complex.
pub fn trop_poly(f: &TropicalPolynomial, ambient: Option<&HSystem>) -> Result<PLComplex> {
    let terms: Vec<(Rat, IntVec, usize)> = f
        .terms
        .iter()
        .enumerate()
        .map(|(i, (v, e))| (v.clone(), e.clone(), i + 1))
        .collect();
    let provenance = format!("trop(polynomial with {} terms)", terms.len());
    canonicalize(f.dim, provenance, pair_cells(f.dim, &terms, ambient)?)
}

/// The support of the polytope relative to m: facets with ⟨m, v_j⟩ ≠ 0,
/// as (valuation −λ_j, exponent v_j, facet index) triples.
fn relative_support(p: &Polytope, m: &IntVec) -> Result<Vec<(Rat, IntVec, usize)>> {
    if m.dim() != p.dim {
        return Err(Error::DimensionMismatch {
            expected: p.dim,
            got: m.dim(),
        });
    }
    let support: Vec<(Rat, IntVec, usize)> = p
        .facets
        .iter()
        .enumerate()
        .filter(|(_, f)| !m.dot(&f.normal).is_zero())
        .map(|(idx, f)| (-&f.offset, f.normal.clone(), idx + 1))
        .collect();
    if support.is_empty() {
        return Err(Error::EmptySupport);
    }
    Ok(support)
}

/// Tropicalization of the polytope relative to a lattice direction m.
/// The zero direction yields the full ambient space.
pub fn trop_relative(p: &Polytope, m: &IntVec) -> Result<PLComplex> {
    let label = p.name.as_deref().unwrap_or("P");
    let provenance = format!("trop({label}, m={m:?})");
    if m.dim() != p.dim {
        return Err(Error::DimensionMismatch {
            expected: p.dim,
            got: m.dim(),
        });
    }
    if m.is_zero() {
        return Ok(PLComplex::full_space(p.dim, provenance));
    }
    let support = relative_support(p, m)?;
    canonicalize(p.dim, provenance, pair_cells(p.dim, &support, None)?)
}

/// Tropicalization of the i-th logarithmic derivative of the leading order
/// potential (1-based coordinate index); identical to trop_relative(P, e_i).
pub fn log_derivative_trop(p: &Polytope, i: usize) -> Result<PLComplex> {
    if i == 0 || i > p.dim {
        return Err(Error::CoordinateIndex {
            index: i,
            dim: p.dim,
        });
    }
    let mut c = trop_relative(p, &IntVec::unit(p.dim, i - 1))?;
    let label = p.name.as_deref().unwrap_or("P");
    c.provenance = format!("trop(x_{i} dPO/dx_{i} of {label})");
    Ok(c)
}

/// Pointwise membership oracle for Trop(P, m), independent of any cell
/// construction: the minimum of the supported l_j(u) is attained twice.
pub fn member_relative(p: &Polytope, m: &IntVec, u: &[Rat]) -> Result<bool> {
    if u.len() != p.dim {
        return Err(Error::DimensionMismatch {
            expected: p.dim,
            got: u.len(),
        });
    }
    if m.dim() != p.dim {
        return Err(Error::DimensionMismatch {
            expected: p.dim,
            got: m.dim(),
        });
    }
    if m.is_zero() {
        return Ok(true);
    }
    let support = relative_support(p, m)?;
    let values: Vec<Rat> = support.iter().map(|(v, e, _)| v + &e.dot_rat(u)).collect();
    let min = values.iter().min().expect("support is nonempty");
    Ok(values.iter().filter(|v| *v == min).count() >= 2)
}

/// Intersection of complexes: conjunctions of all compatible cell
/// combinations, canonicalized after each pairwise fold.
pub fn intersect(cs: &[PLComplex], ambient: Option<&HSystem>) -> Result<PLComplex> {
    let Some(first) = cs.first() else {
        return Err(Error::EmptySupport);
    };
    for c in cs {
        if c.dim != first.dim {
            return Err(Error::DimensionMismatch {
                expected: first.dim,
                got: c.dim,
            });
        }
    }
    let provenance = cs
        .iter()
        .map(|c| c.provenance.as_str())
        .collect::<Vec<_>>()
        .join(" ∩ ");
    let provenance = format!("intersect({provenance})");
    let mut acc: Vec<(HSystem, Vec<(usize, usize)>)> = first
        .cells
        .iter()
        .map(|c| (c.system.clone(), c.tags.clone()))
        .collect();
    if let Some(amb) = ambient {
        acc = acc
            .into_iter()
            .map(|(s, t)| Ok((s.and(amb)?, t)))
            .collect::<Result<_>>()?;
    }
    let mut current = canonicalize(first.dim, provenance.clone(), acc)?;
    for next in &cs[1..] {
        let mut raw = Vec::new();
        for a in &current.cells {
            for b in &next.cells {
                let mut tags = a.tags.clone();
                for t in &b.tags {
                    if !tags.contains(t) {
                        tags.push(*t);
                    }
                }
                raw.push((a.system.and(&b.system)?, tags));
            }
        }
        current = canonicalize(first.dim, provenance.clone(), raw)?;
    }
    Ok(current)
}

/// Whether two complexes meet at u in exactly the expected codimension:
/// every intersection cell through u has affine dimension at most
/// n − codim_a − codim_b, with at least one of exactly that dimension.
pub fn properly_at(
    u: &[Rat],
    a: &PLComplex,
    b: &PLComplex,
    codim_a: usize,
    codim_b: usize,
) -> Result<bool> {
    if !a.contains_point(u) || !b.contains_point(u) {
        return Err(Error::NotInIntersection);
    }
    let inter = intersect(&[a.clone(), b.clone()], None)?;
    let through: Vec<i64> = inter
        .cells
        .iter()
        .filter(|c| c.system.satisfies(u))
        .map(|c| c.dim_cell)
        .collect();
    if through.is_empty() {
        return Err(Error::NotInIntersection);
    }
    let expected = a.dim as i64 - codim_a as i64 - codim_b as i64;
    Ok(through.iter().all(|&d| d <= expected) && through.iter().any(|&d| d == expected))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{Facet, Polytope};

    fn r(n: i64, d: i64) -> Rat {
        Rat::ratio(n, d)
    }

    fn iv(e: &[i64]) -> IntVec {
        IntVec::from_i64(e)
    }

    fn example2() -> Polytope {
        Polytope::from_facets(
            2,
            vec![
                Facet { normal: iv(&[1, 0]), offset: r(0, 1) },
                Facet { normal: iv(&[1, 1]), offset: r(1, 4) },
                Facet { normal: iv(&[0, 1]), offset: r(0, 1) },
                Facet { normal: iv(&[-1, -1]), offset: r(-1, 1) },
                Facet { normal: iv(&[0, -1]), offset: r(-1, 2) },
            ],
            None,
        )
        .unwrap()
    }

    fn example3() -> Polytope {
        Polytope::from_facets(
            2,
            vec![
                Facet { normal: iv(&[1, 0]), offset: r(0, 1) },
                Facet { normal: iv(&[0, 1]), offset: r(0, 1) },
                Facet { normal: iv(&[-1, 1]), offset: r(-2, 1) },
                Facet { normal: iv(&[0, -1]), offset: r(-5, 1) },
                Facet { normal: iv(&[1, -1]), offset: r(-1, 1) },
            ],
            None,
        )
        .unwrap()
    }

    #[test]
    fn tropical_line_has_three_rays() {
        let f = TropicalPolynomial::new(
            2,
            vec![
                (r(0, 1), iv(&[1, 0])),
                (r(0, 1), iv(&[0, 1])),
                (r(0, 1), iv(&[0, 0])),
            ],
        )
        .unwrap();
        let c = trop_poly(&f, None).unwrap();
        assert_eq!(c.cells.len(), 3);
        assert!(c.cells.iter().all(|cell| cell.dim_cell == 1));
        assert!(c.contains_point(&[r(0, 1), r(0, 1)]));
        assert!(c.contains_point(&[r(-2, 1), r(-2, 1)]));
        assert!(c.contains_point(&[r(0, 1), r(2, 1)]));
        assert!(c.contains_point(&[r(2, 1), r(0, 1)]));
        assert!(!c.contains_point(&[r(1, 1), r(2, 1)]));
    }

    #[test]
    fn binomial_is_hyperplane() {
        let f = TropicalPolynomial::new(
            2,
            vec![(r(0, 1), iv(&[1, 0])), (r(1, 1), iv(&[0, 0]))],
        )
        .unwrap();
        let c = trop_poly(&f, None).unwrap();
        assert_eq!(c.cells.len(), 1);
        assert_eq!(c.cells[0].dim_cell, 1);
        assert!(c.contains_point(&[r(1, 1), r(7, 1)]));
        assert!(!c.contains_point(&[r(2, 1), r(0, 1)]));
    }

    #[test]
    fn cp2_potential_trivalent_vertex() {
        let f = TropicalPolynomial::new(
            2,
            vec![
                (r(0, 1), iv(&[1, 0])),
                (r(0, 1), iv(&[0, 1])),
                (r(1, 1), iv(&[-1, -1])),
            ],
        )
        .unwrap();
        let c = trop_poly(&f, None).unwrap();
        assert_eq!(c.cells.len(), 3);
        assert!(c.contains_point(&[r(1, 3), r(1, 3)]));
        // Points along each of the three branches.
        assert!(c.contains_point(&[r(-1, 1), r(-1, 1)]));
        assert!(c.contains_point(&[r(0, 1), r(1, 1)]));
        assert!(c.contains_point(&[r(1, 1), r(0, 1)]));
        assert!(!c.contains_point(&[r(1, 2), r(1, 3)]));
    }

    #[test]
    fn single_term_polynomial_empty_complex() {
        let f = TropicalPolynomial::new(2, vec![(r(0, 1), iv(&[1, 0]))]).unwrap();
        assert!(trop_poly(&f, None).unwrap().is_empty());
    }

    #[test]
    fn duplicate_exponents_merge_by_min() {
        let f = TropicalPolynomial::new(
            1,
            vec![(r(2, 1), iv(&[1])), (r(1, 1), iv(&[1])), (r(0, 1), iv(&[0]))],
        )
        .unwrap();
        assert_eq!(f.terms.len(), 2);
        assert_eq!(f.min_value(&[r(0, 1)]), r(0, 1));
        assert_eq!(f.min_value(&[r(-5, 1)]), r(-4, 1));
    }

    #[test]
    fn trop_relative_example2_vertical() {
        let c = trop_relative(&example2(), &iv(&[0, 1])).unwrap();
        // The 1-cell {u2 = 1/4, 1/4 ≤ u1 ≤ 1/2} is present.
        assert!(c.contains_point(&[r(1, 4), r(1, 4)]));
        assert!(c.contains_point(&[r(3, 8), r(1, 4)]));
        assert!(c.contains_point(&[r(1, 2), r(1, 4)]));
        assert!(!c.contains_point(&[r(3, 8), r(3, 10)]));
        let mut seg = HSystem::new(2);
        seg.push_eq(iv(&[0, 1]), r(1, 4));
        seg.push_ge(iv(&[1, 0]), r(1, 4));
        seg.push_ge(iv(&[-1, 0]), r(-1, 2));
        assert!(c
            .cells
            .iter()
            .any(|cell| cell.system.contains_closure(&seg).unwrap()
                && seg.contains_closure(&cell.system).unwrap()));
    }

    #[test]
    fn trop_relative_zero_direction_full_space() {
        let c = trop_relative(&example2(), &iv(&[0, 0])).unwrap();
        assert_eq!(c.cells.len(), 1);
        assert_eq!(c.cells[0].dim_cell, 2);
        assert!(c.contains_point(&[r(100, 1), r(-100, 1)]));
    }

    #[test]
    fn trop_relative_example3_diagonal() {
        let c = trop_relative(&example3(), &iv(&[1, 1])).unwrap();
        // Diagonal {u1 = u2 ≤ 5/2} and horizontal {u2 = 5/2, 5/2 ≤ u1 ≤ 9/2}.
        assert!(c.contains_point(&[r(1, 1), r(1, 1)]));
        assert!(c.contains_point(&[r(5, 2), r(5, 2)]));
        assert!(c.contains_point(&[r(3, 1), r(5, 2)]));
        assert!(c.contains_point(&[r(9, 2), r(5, 2)]));
        assert!(!c.contains_point(&[r(3, 1), r(3, 1)]));
    }

    #[test]
    fn log_derivative_supports() {
        let p = example3();
        let d1 = log_derivative_trop(&p, 1).unwrap();
        let e1 = trop_relative(&p, &iv(&[1, 0])).unwrap();
        assert!(d1.set_eq(&e1).unwrap());
        assert!(log_derivative_trop(&p, 3).is_err());
    }

    #[test]
    fn membership_oracle() {
        let p2 = example2();
        assert!(member_relative(&p2, &iv(&[1, 0]), &[r(5, 16), r(1, 4)]).unwrap());
        assert!(!member_relative(&p2, &iv(&[1, 0]), &[r(1, 2), r(1, 4)]).unwrap());
        let p3 = example3();
        assert!(member_relative(&p3, &iv(&[1, 1]), &[r(3, 1), r(5, 2)]).unwrap());
        assert!(member_relative(&p2, &iv(&[0, 0]), &[r(9, 1), r(9, 1)]).unwrap());
    }

    #[test]
    fn intersect_parallel_lines_empty() {
        let a = TropicalPolynomial::new(
            2,
            vec![(r(0, 1), iv(&[1, 0])), (r(0, 1), iv(&[0, 0]))],
        )
        .unwrap();
        let b = TropicalPolynomial::new(
            2,
            vec![(r(1, 1), iv(&[1, 0])), (r(0, 1), iv(&[0, 0]))],
        )
        .unwrap();
        let ca = trop_poly(&a, None).unwrap();
        let cb = trop_poly(&b, None).unwrap();
        assert!(intersect(&[ca, cb], None).unwrap().is_empty());
    }

    #[test]
    fn intersect_idempotent() {
        let c = trop_relative(&example2(), &iv(&[0, 1])).unwrap();
        let twice = intersect(&[c.clone(), c.clone()], None).unwrap();
        assert!(twice.set_eq(&c).unwrap());
    }

    #[test]
    fn isolated_point_of_single_point_cell() {
        let mut sys = HSystem::new(2);
        sys.push_eq(iv(&[1, 0]), r(1, 1));
        sys.push_eq(iv(&[0, 1]), r(2, 1));
        let c = canonicalize(2, "test".into(), vec![(sys, Vec::new())]).unwrap();
        assert_eq!(c.isolated_points(), vec![vec![r(1, 1), r(2, 1)]]);
    }

    #[test]
    fn line_meets_itself_improperly() {
        let f = TropicalPolynomial::new(
            2,
            vec![(r(0, 1), iv(&[1, 0])), (r(1, 1), iv(&[0, 0]))],
        )
        .unwrap();
        let c = trop_poly(&f, None).unwrap();
        assert!(!properly_at(&[r(1, 1), r(0, 1)], &c, &c, 1, 1).unwrap());
        assert!(matches!(
            properly_at(&[r(0, 1), r(0, 1)], &c, &c, 1, 1),
            Err(Error::NotInIntersection)
        ));
    }

    #[test]
    fn complex_json_round_trip() {
        let c = trop_relative(&example2(), &iv(&[0, 1])).unwrap();
        let text = serde_json::to_string(&c).unwrap();
        let back: PLComplex = serde_json::from_str(&text).unwrap();
        assert_eq!(back.dim, c.dim);
        assert_eq!(back.cells.len(), c.cells.len());
        for (x, y) in back.cells.iter().zip(&c.cells) {
            assert_eq!(x.system, y.system);
            assert_eq!(x.dim_cell, y.dim_cell);
            assert_eq!(x.witness, y.witness);
        }
    }
}
