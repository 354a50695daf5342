//! The detection pipeline: primary normal enumeration, intersection of
//! relative tropicalizations, pointwise strong bulk-balancing, adapted
//! bases, (generalized) leading term equations, and the combinatorial
//! solvability criterion that cross-checks the tropical answer.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::polytope::{EnergyFiltration, Polytope};
use crate::rat::{self, IntVec, Rat};
use crate::tropical::{self, PLComplex};
use crate::{Error, Result};

/// One sign-canonical primitive vector per distinct (n−1)-dimensional
/// subspace spanned by facet normals, sorted for determinism.
pub fn primary_normals(p: &Polytope) -> Result<Vec<IntVec>> {
    let n = p.dim;
    if n == 1 {
        return Ok(vec![IntVec::from_i64(&[1])]);
    }
    let normals: Vec<IntVec> = p.facets.iter().map(|f| f.normal.clone()).collect();
    let mut out: Vec<IntVec> = Vec::new();
    let mut subset = vec![0usize; n - 1];
    let mut error = None;
    enumerate_subsets(normals.len(), n - 1, &mut subset, 0, 0, &mut |chosen| {
        if error.is_some() {
            return;
        }
        let span: Vec<IntVec> = chosen.iter().map(|&i| normals[i].clone()).collect();
        match rat::rank(&span) {
            Ok(r) if r == n - 1 => match rat::kernel_primitive(&span) {
                Ok(m) => {
                    if !out.contains(&m) {
                        out.push(m);
                    }
                }
                Err(e) => error = Some(e),
            },
            Ok(_) => {}
            Err(e) => error = Some(e),
        }
    });
    if let Some(e) = error {
        return Err(e);
    }
    out.sort();
    Ok(out)
}

fn enumerate_subsets(
    total: usize,
    want: usize,
    buf: &mut [usize],
    depth: usize,
    start: usize,
    visit: &mut impl FnMut(&[usize]),
) {
    if depth == want {
        visit(buf);
        return;
    }
    for i in start..total {
        buf[depth] = i;
        enumerate_subsets(total, want, buf, depth + 1, i + 1, visit);
    }
}

/// The strongly bulk-balanced locus: intersection over all primary normals
/// of Trop(P, m), restricted to the interior of P.
pub fn detect(p: &Polytope) -> Result<PLComplex> {
    let directions = primary_normals(p)?;
    let complexes: Vec<PLComplex> = directions
        .iter()
        .map(|m| tropical::trop_relative(p, m))
        .collect::<Result<_>>()?;
    let interior = p.interior_system();
    let mut c = tropical::intersect(&complexes, Some(&interior))?;
    let label = p.name.as_deref().unwrap_or("P");
    c.provenance = format!("detect({label})");
    Ok(c)
}

/// Pointwise criterion: u lies in Trop(P, m) for every primary normal m.
pub fn is_strongly_bulk_balanced(p: &Polytope, u: &[Rat]) -> Result<bool> {
    p.interior_values(u)?;
    for m in primary_normals(p)? {
        if !tropical::member_relative(p, &m, u)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Given a direction m whose tropicalization misses u, produce a primary
/// normal that also misses u: extend the span of the normals orthogonal to
/// m by support normals while avoiding the unique minimizer's normal, then
/// take the primitive kernel of the resulting codimension-1 span.
pub fn find_separating_primary_normal(p: &Polytope, u: &[Rat], m: &IntVec) -> Result<IntVec> {
    if tropical::member_relative(p, m, u)? {
        return Err(Error::NotSeparable);
    }
    let n = p.dim;
    // The minimum over the support is attained exactly once; find it.
    let mut best: Option<(usize, Rat)> = None;
    for (idx, f) in p.facets.iter().enumerate() {
        if m.dot(&f.normal).is_zero() {
            continue;
        }
        let v = p.facet_value(idx + 1, u)?;
        if best.as_ref().is_none_or(|(_, b)| &v < b) {
            best = Some((idx + 1, v));
        }
    }
    let (j_star, _) = best.expect("support is nonempty when membership fails");
    let v_star = &p.facets[j_star - 1].normal;

    // Start from every normal orthogonal to m; none of them can be v_{j*}.
    let mut span: Vec<IntVec> = p
        .facets
        .iter()
        .filter(|f| m.dot(&f.normal).is_zero())
        .map(|f| f.normal.clone())
        .collect();
    let mut r = rat::rank(&span)?;
    if r < n - 1 {
        for f in &p.facets {
            let mut trial = span.clone();
            trial.push(f.normal.clone());
            let tr = rat::rank(&trial)?;
            if tr != r + 1 {
                continue;
            }
            let mut with_star = trial.clone();
            with_star.push(v_star.clone());
            if rat::rank(&with_star)? != tr + 1 {
                continue;
            }
            span = trial;
            r = tr;
            if r == n - 1 {
                break;
            }
        }
    }
    if r == n - 1 {
        let candidate = if span.is_empty() {
            rat::canonical_sign(&rat::primitive(m)?)
        } else {
            rat::kernel_primitive(&span)?
        };
        if !tropical::member_relative(p, &candidate, u)? {
            return Ok(candidate);
        }
    }
    // Safety net: one of the primary normals must separate.
    for candidate in primary_normals(p)? {
        if !tropical::member_relative(p, &candidate, u)? {
            return Ok(candidate);
        }
    }
    Err(Error::NotSeparable)
}

/// Within-level scan order for the greedy flag.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlotOrder {
    AscendingFacet,
    DescendingFacet,
}

/// A rational basis adapted to the energy filtration at a point: per level l
/// and slot s ≤ d_l a vector e*_{l,s} = v_(flag)/D, where the flag normals
/// are greedily chosen to raise the rank and D is the lattice index of
/// their integer span, so every facet normal has integer coordinates.
#[derive(Clone, Debug)]
pub struct AdaptedBasis {
    pub filtration: EnergyFiltration,
    /// Flag facet indices per level (1-based, length d_l).
    pub flag: Vec<Vec<usize>>,
    /// Flattened (level, slot) labels, 1-based, in basis order.
    pub slots: Vec<(usize, usize)>,
    /// Flattened basis vectors e*_{l,s} in the same order.
    pub vectors: Vec<Vec<Rat>>,
    /// The common scale D.
    pub scale: BigInt,
}

impl AdaptedBasis {
    /// Integer coordinates of a facet normal in the adapted basis.
    pub fn coords(&self, v: &IntVec) -> Result<Vec<BigInt>> {
        let c = rat::coords_in_basis(v, &self.vectors)?;
        c.into_iter()
            .map(|x| {
                if x.denom().is_one() {
                    Ok(x.numer().clone())
                } else {
                    Err(Error::SingularBasis)
                }
            })
            .collect()
    }

    /// Position of the slot (level, s) in the flattened basis order.
    pub fn slot_position(&self, level: usize, s: usize) -> Option<usize> {
        self.slots.iter().position(|&(l, t)| l == level && t == s)
    }
}

pub fn adapted_basis(p: &Polytope, u: &[Rat]) -> Result<AdaptedBasis> {
    adapted_basis_with(p, u, SlotOrder::AscendingFacet)
}

pub fn adapted_basis_with(p: &Polytope, u: &[Rat], order: SlotOrder) -> Result<AdaptedBasis> {
    let filtration = p.energy_filtration(u)?;
    let n = p.dim;
    let mut flag: Vec<Vec<usize>> = Vec::new();
    let mut flag_normals: Vec<IntVec> = Vec::new();
    let mut slots: Vec<(usize, usize)> = Vec::new();
    let mut rank_so_far = 0;
    for (l, group) in filtration.groups.iter().enumerate() {
        let mut scan = group.clone();
        if order == SlotOrder::DescendingFacet {
            scan.reverse();
        }
        let mut level_flag = Vec::new();
        for j in scan {
            let mut trial = flag_normals.clone();
            trial.push(p.facets[j - 1].normal.clone());
            let r = rat::rank(&trial)?;
            if r > rank_so_far {
                flag_normals = trial;
                rank_so_far = r;
                level_flag.push(j);
                slots.push((l + 1, level_flag.len()));
            }
        }
        flag.push(level_flag);
        if rank_so_far == n {
            // Later levels contribute no slots; record them as empty.
            for _ in (l + 1)..filtration.groups.len() {
                flag.push(Vec::new());
            }
            break;
        }
    }
    debug_assert_eq!(rank_so_far, n);

    let rows: Vec<Vec<Rat>> = flag_normals.iter().map(|v| v.to_rat()).collect();
    let det = rat::determinant(&rows);
    let scale = det.numer().abs() / det.denom();
    let d = Rat::from(scale.clone());
    let vectors: Vec<Vec<Rat>> = flag_normals
        .iter()
        .map(|v| v.to_rat().into_iter().map(|x| x / &d).collect())
        .collect();
    Ok(AdaptedBasis {
        filtration,
        flag,
        slots,
        vectors,
        scale,
    })
}

/// One monomial of a per-level Laurent polynomial in the slot variables
/// y_{r,s}: an integer coefficient, integer exponents in basis order, and
/// the 1-based facet index that produced it (which also labels the symbolic
/// unit c_{(l,a)} in generalized mode).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentTerm {
    pub facet: usize,
    pub coeff: BigInt,
    pub exponents: Vec<BigInt>,
}

/// The per-level parts (PO)_l of the leading order potential in adapted
/// coordinates, together with their logarithmic-derivative equations for
/// levels l ≤ κ and slots s ≤ d_l.
#[derive(Clone, Debug)]
pub struct LaurentSystem {
    pub generalized: bool,
    pub slots: Vec<(usize, usize)>,
    /// (level, terms of (PO)_l) for l = 1..κ.
    pub levels: Vec<(usize, Vec<LaurentTerm>)>,
    /// ((level, slot), terms of y_{l,s} ∂(PO)_l/∂y_{l,s}).
    pub equations: Vec<((usize, usize), Vec<LaurentTerm>)>,
}

impl LaurentSystem {
    /// Stable text rendering: terms sorted by exponent lexicographically,
    /// variables named y_{r,s}.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (level, terms) in &self.levels {
            out.push_str(&format!("(PO)_{level} = {}\n", self.render_sum(terms)));
        }
        for ((l, s), terms) in &self.equations {
            out.push_str(&format!(
                "y_{{{l},{s}}} d(PO)_{l}/dy_{{{l},{s}}} = {} = 0\n",
                self.render_sum(terms)
            ));
        }
        out
    }

    fn render_sum(&self, terms: &[LaurentTerm]) -> String {
        if terms.is_empty() {
            return "0".to_string();
        }
        let mut sorted = terms.to_vec();
        sorted.sort_by(|a, b| a.exponents.cmp(&b.exponents).then(a.facet.cmp(&b.facet)));
        let mut pieces = Vec::new();
        for t in &sorted {
            let mut factors = Vec::new();
            if self.generalized {
                factors.push(format!("c_({})", t.facet));
            }
            if !t.coeff.is_one() || (!self.generalized && t.exponents.iter().all(|e| e.is_zero()))
            {
                factors.push(t.coeff.to_string());
            }
            for (pos, e) in t.exponents.iter().enumerate() {
                if e.is_zero() {
                    continue;
                }
                let (l, s) = self.slots[pos];
                if e.is_one() {
                    factors.push(format!("y_{{{l},{s}}}"));
                } else {
                    factors.push(format!("y_{{{l},{s}}}^{{{e}}}"));
                }
            }
            if factors.is_empty() {
                factors.push("1".to_string());
            }
            pieces.push(factors.join("·"));
        }
        pieces.join(" + ")
    }
}

/// The (generalized) leading term equations at u for a basis adapted to u.
pub fn leading_term_system(
    p: &Polytope,
    u: &[Rat],
    basis: &AdaptedBasis,
    generalized: bool,
) -> Result<LaurentSystem> {
    if basis.filtration.point != u {
        return Err(Error::DimensionMismatch {
            expected: p.dim,
            got: u.len(),
        });
    }
    let filtration = &basis.filtration;
    let mut levels = Vec::new();
    let mut equations = Vec::new();
    for l in 1..=filtration.kappa {
        let mut terms = Vec::new();
        for &j in &filtration.groups[l - 1] {
            terms.push(LaurentTerm {
                facet: j,
                coeff: BigInt::one(),
                exponents: basis.coords(&p.facets[j - 1].normal)?,
            });
        }
        for s in 1..=filtration.d[l - 1] {
            let pos = basis
                .slot_position(l, s)
                .expect("slot exists for s <= d_l");
            let derived: Vec<LaurentTerm> = terms
                .iter()
                .filter(|t| !t.exponents[pos].is_zero())
                .map(|t| LaurentTerm {
                    facet: t.facet,
                    coeff: &t.coeff * &t.exponents[pos],
                    exponents: t.exponents.clone(),
                })
                .collect();
            equations.push(((l, s), derived));
        }
        levels.push((l, terms));
    }
    Ok(LaurentSystem {
        generalized,
        slots: basis.slots.clone(),
        levels,
        equations,
    })
}

pub fn solvable_over_torus(p: &Polytope, u: &[Rat]) -> Result<bool> {
    solvable_over_torus_with(p, u, SlotOrder::AscendingFacet)
}

/// The combinatorial solvability criterion for the generalized leading term
/// equations: split each (PO)_l into the pure flag terms c·y_{l,s}^D plus a
/// correction 𝔓_l, and require that for every level l ≤ κ and slot s ≤ d_l
/// the logarithmic derivative of 𝔓_l in y_{l,s} keeps at least one term.
pub fn solvable_over_torus_with(p: &Polytope, u: &[Rat], order: SlotOrder) -> Result<bool> {
    let basis = adapted_basis_with(p, u, order)?;
    let filtration = &basis.filtration;
    for l in 1..=filtration.kappa {
        let flag_facets = &basis.flag[l - 1];
        let correction: Vec<Vec<BigInt>> = filtration.groups[l - 1]
            .iter()
            .filter(|j| !flag_facets.contains(j))
            .map(|&j| basis.coords(&p.facets[j - 1].normal))
            .collect::<Result<_>>()?;
        for s in 1..=filtration.d[l - 1] {
            let pos = basis
                .slot_position(l, s)
                .expect("slot exists for s <= d_l");
            if !correction.iter().any(|exps| !exps[pos].is_zero()) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Isolated points of the intersection of all logarithmic-derivative
/// tropicalizations inside the interior of P.
pub fn balanced_candidates(p: &Polytope) -> Result<Vec<Vec<Rat>>> {
    let complexes: Vec<PLComplex> = (1..=p.dim)
        .map(|i| tropical::log_derivative_trop(p, i))
        .collect::<Result<_>>()?;
    let interior = p.interior_system();
    let inter = tropical::intersect(&complexes, Some(&interior))?;
    Ok(inter.isolated_points())
}
