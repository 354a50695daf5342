//! Exact linear programming over the rationals for systems of equalities,
//! weak inequalities, and strict inequalities.
//!
//! The solver is a dense two-phase simplex with Bland's rule, which is all
//! the determinism and termination these tiny systems need. Strict rows are
//! first-class: feasibility maximizes a slack bounded by 1 below every strict
//! row, so a system is strictly feasible iff the optimum slack is positive.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::rat::{self, IntVec, Rat};
use crate::{Error, Result};

/// A system of rational linear constraints ⟨a,u⟩ = b / ≥ b / > b.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HSystem {
    pub dim: usize,
    #[serde(default)]
    pub eq: Vec<(IntVec, Rat)>,
    #[serde(default)]
    pub ge: Vec<(IntVec, Rat)>,
    #[serde(default)]
    pub gt: Vec<(IntVec, Rat)>,
}

impl HSystem {
    pub fn new(dim: usize) -> Self {
        HSystem {
            dim,
            eq: Vec::new(),
            ge: Vec::new(),
            gt: Vec::new(),
        }
    }

    pub fn push_eq(&mut self, a: IntVec, b: Rat) {
        self.eq.push((a, b));
    }

    pub fn push_ge(&mut self, a: IntVec, b: Rat) {
        self.ge.push((a, b));
    }

    pub fn push_gt(&mut self, a: IntVec, b: Rat) {
        self.gt.push((a, b));
    }

    /// Conjunction of two systems over the same ambient space.
    pub fn and(&self, other: &HSystem) -> Result<HSystem> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let mut out = self.clone();
        out.eq.extend(other.eq.iter().cloned());
        out.ge.extend(other.ge.iter().cloned());
        out.gt.extend(other.gt.iter().cloned());
        Ok(out)
    }

    /// The same system with every strict row weakened to a weak one.
    pub fn weak_closure(&self) -> HSystem {
        let mut out = self.clone();
        out.ge.extend(out.gt.drain(..));
        out
    }

    /// Exact pointwise satisfaction, strict rows checked strictly.
    pub fn satisfies(&self, u: &[Rat]) -> bool {
        u.len() == self.dim
            && self.eq.iter().all(|(a, b)| &a.dot_rat(u) == b)
            && self.ge.iter().all(|(a, b)| &a.dot_rat(u) >= b)
            && self.gt.iter().all(|(a, b)| &a.dot_rat(u) > b)
    }

    /// A rational point satisfying every row (strict rows strictly), if any.
    ///
    /// Strict rows are handled by maximizing a slack t with ⟨a,u⟩ − t ≥ b on
    /// each of them and t ≤ 1; the system is feasible iff the optimum t > 0.
    pub fn feasible(&self) -> Option<Vec<Rat>> {
        let n = self.dim;
        let strict = !self.gt.is_empty();
        let vars = if strict { n + 1 } else { n };
        let mut eq: Vec<(Vec<Rat>, Rat)> = Vec::new();
        let mut ge: Vec<(Vec<Rat>, Rat)> = Vec::new();
        let pad = |a: &IntVec| -> Vec<Rat> {
            let mut row = a.to_rat();
            row.resize(vars, Rat::zero());
            row
        };
        for (a, b) in &self.eq {
            eq.push((pad(a), b.clone()));
        }
        for (a, b) in &self.ge {
            ge.push((pad(a), b.clone()));
        }
        let mut obj = vec![Rat::zero(); vars];
        if strict {
            for (a, b) in &self.gt {
                let mut row = pad(a);
                row[n] = -Rat::one();
                ge.push((row, b.clone()));
            }
            // t ≤ 1 keeps phase 2 bounded.
            let mut cap = vec![Rat::zero(); vars];
            cap[n] = -Rat::one();
            ge.push((cap, -Rat::one()));
            obj[n] = Rat::one();
        }
        match lp_max(vars, &obj, &eq, &ge) {
            LpOutcome::Optimal { value, point } => {
                if strict && !value.is_positive() {
                    return None;
                }
                Some(point[..n].to_vec())
            }
            LpOutcome::Unbounded => unreachable!("objective is bounded by construction"),
            LpOutcome::Infeasible => None,
        }
    }

    /// Maximize ⟨c,u⟩ over the weak closure of the system.
    pub fn maximize(&self, c: &[Rat]) -> LpOutcome {
        let eq: Vec<(Vec<Rat>, Rat)> = self
            .eq
            .iter()
            .map(|(a, b)| (a.to_rat(), b.clone()))
            .collect();
        let ge: Vec<(Vec<Rat>, Rat)> = self
            .ge
            .iter()
            .chain(&self.gt)
            .map(|(a, b)| (a.to_rat(), b.clone()))
            .collect();
        lp_max(self.dim, c, &eq, &ge)
    }

    /// Minimize ⟨c,u⟩ over the weak closure of the system.
    pub fn minimize(&self, c: &[Rat]) -> LpOutcome {
        let neg: Vec<Rat> = c.iter().map(|x| -x).collect();
        match self.maximize(&neg) {
            LpOutcome::Optimal { value, point } => LpOutcome::Optimal {
                value: -value,
                point,
            },
            other => other,
        }
    }

    /// Dimension of the affine hull of the weak closure; −1 when empty.
    pub fn affine_dim(&self) -> i64 {
        let closure = self.weak_closure();
        if closure.feasible().is_none() {
            return -1;
        }
        let mut hull_rows: Vec<Vec<Rat>> = closure.eq.iter().map(|(a, _)| a.to_rat()).collect();
        for (a, b) in &closure.ge {
            // Implicit equality: the row is tight on every feasible point.
            if let LpOutcome::Optimal { value, .. } = closure.maximize(&a.to_rat()) {
                if &value == b {
                    hull_rows.push(a.to_rat());
                }
            }
        }
        self.dim as i64 - rat::rank_rows(hull_rows) as i64
    }

    /// Whether the weak closure is a bounded set.
    pub fn is_bounded(&self) -> bool {
        let closure = self.weak_closure();
        if closure.feasible().is_none() {
            return true;
        }
        for i in 0..self.dim {
            let mut c = vec![Rat::zero(); self.dim];
            c[i] = Rat::one();
            if matches!(closure.maximize(&c), LpOutcome::Unbounded) {
                return false;
            }
            if matches!(closure.minimize(&c), LpOutcome::Unbounded) {
                return false;
            }
        }
        true
    }

    /// Minimal equivalent system: implicit equalities promoted from weak
    /// rows, equalities reduced to a canonical echelon form, redundant rows
    /// dropped, and rows sorted lexicographically by coefficient vector.
    pub fn remove_redundant(&self) -> Result<HSystem> {
        if self.feasible().is_none() {
            return Err(Error::Infeasible);
        }
        let closure = self.weak_closure();

        let mut eq_rows: Vec<(Vec<Rat>, Rat)> = self
            .eq
            .iter()
            .map(|(a, b)| (a.to_rat(), b.clone()))
            .collect();
        let mut ge_rows: Vec<(IntVec, Rat)> = Vec::new();
        let mut gt_rows: Vec<(IntVec, Rat)> = Vec::new();
        for (a, b) in &self.ge {
            match closure.maximize(&a.to_rat()) {
                LpOutcome::Optimal { value, .. } if &value == b => {
                    eq_rows.push((a.to_rat(), b.clone()));
                }
                _ => ge_rows.push(normalize_ineq(a, b)),
            }
        }
        for (a, b) in &self.gt {
            gt_rows.push(normalize_ineq(a, b));
        }

        let eq = reduce_equalities(self.dim, &eq_rows);

        // Drop weak rows already present strictly, then deduplicate.
        ge_rows.retain(|row| !gt_rows.contains(row));
        ge_rows.sort_by(cmp_row);
        ge_rows.dedup();
        gt_rows.sort_by(cmp_row);
        gt_rows.dedup();

        // A weak row is redundant when its minimum over the remaining rows
        // still respects the bound.
        let mut kept_ge: Vec<(IntVec, Rat)> = Vec::new();
        for i in 0..ge_rows.len() {
            let mut trial = HSystem::new(self.dim);
            trial.eq = eq.clone();
            trial.ge = kept_ge
                .iter()
                .chain(&ge_rows[i + 1..])
                .chain(&gt_rows)
                .cloned()
                .collect();
            let (a, b) = &ge_rows[i];
            let implied = match trial.minimize(&a.to_rat()) {
                LpOutcome::Optimal { value, .. } => &value >= b,
                LpOutcome::Infeasible => true,
                LpOutcome::Unbounded => false,
            };
            if !implied {
                kept_ge.push(ge_rows[i].clone());
            }
        }

        // A strict row is dropped only when the rest already forces a value
        // strictly above the bound.
        let mut kept_gt: Vec<(IntVec, Rat)> = Vec::new();
        for i in 0..gt_rows.len() {
            let mut trial = HSystem::new(self.dim);
            trial.eq = eq.clone();
            trial.ge = kept_ge
                .iter()
                .chain(kept_gt.iter())
                .chain(&gt_rows[i + 1..])
                .cloned()
                .collect();
            let (a, b) = &gt_rows[i];
            let implied = match trial.minimize(&a.to_rat()) {
                LpOutcome::Optimal { value, .. } => &value > b,
                LpOutcome::Infeasible => true,
                LpOutcome::Unbounded => false,
            };
            if !implied {
                kept_gt.push(gt_rows[i].clone());
            }
        }

        kept_ge.sort_by(cmp_row);
        kept_gt.sort_by(cmp_row);
        Ok(HSystem {
            dim: self.dim,
            eq,
            ge: kept_ge,
            gt: kept_gt,
        })
    }

    /// All extreme points of the weak closure, lexicographically sorted.
    /// Restricted to ambient dimension ≤ 3 and bounded sets.
    pub fn vertices(&self) -> Result<Vec<Vec<Rat>>> {
        let n = self.dim;
        if n > 3 {
            return Err(Error::VertexDimension(n));
        }
        let closure = self.weak_closure();
        if closure.feasible().is_none() {
            return Ok(Vec::new());
        }
        if !self.is_bounded() {
            return Err(Error::Unbounded);
        }
        let rows: Vec<(IntVec, Rat)> = closure.eq.iter().chain(&closure.ge).cloned().collect();
        let mut found: Vec<Vec<Rat>> = Vec::new();
        let mut choose = vec![0usize; n];
        enumerate_subsets(rows.len(), n, &mut choose, 0, 0, &mut |subset| {
            let mut aug: Vec<Vec<Rat>> = subset
                .iter()
                .map(|&i| {
                    let mut r = rows[i].0.to_rat();
                    r.push(rows[i].1.clone());
                    r
                })
                .collect();
            if let Some(point) = rat::solve_square(&mut aug) {
                if closure.satisfies(&point) && !found.contains(&point) {
                    found.push(point);
                }
            }
        });
        found.sort_by(|a, b| rat::lex_cmp(a, b));
        Ok(found)
    }

    /// Whether every point of `other`'s weak closure satisfies the weak
    /// closure of `self`, certified row by row with exact LPs.
    pub fn contains_closure(&self, other: &HSystem) -> Result<bool> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let inner = other.weak_closure();
        if inner.feasible().is_none() {
            return Ok(true);
        }
        for (a, b) in &self.eq {
            let c = a.to_rat();
            match inner.maximize(&c) {
                LpOutcome::Optimal { value, .. } if &value == b => {}
                _ => return Ok(false),
            }
            match inner.minimize(&c) {
                LpOutcome::Optimal { value, .. } if &value == b => {}
                _ => return Ok(false),
            }
        }
        for (a, b) in self.ge.iter().chain(&self.gt) {
            match inner.minimize(&a.to_rat()) {
                LpOutcome::Optimal { value, .. } if &value >= b => {}
                _ => return Ok(false),
            }
        }
        Ok(true)
    }
}

fn cmp_row(x: &(IntVec, Rat), y: &(IntVec, Rat)) -> std::cmp::Ordering {
    x.0.cmp(&y.0).then_with(|| x.1.cmp(&y.1))
}

/// Scale an inequality row by the positive gcd of its coefficients.
fn normalize_ineq(a: &IntVec, b: &Rat) -> (IntVec, Rat) {
    let mut g = BigInt::zero();
    for e in a.entries() {
        g = g.gcd(e);
    }
    if g.is_zero() || g.is_one() {
        return (a.clone(), b.clone());
    }
    let scaled = IntVec::new(a.entries().iter().map(|e| e / &g).collect());
    (scaled, b / &Rat::from(g))
}

/// Reduced echelon form of the equality rows, re-expressed with primitive
/// integer coefficients and first nonzero coefficient positive.
fn reduce_equalities(dim: usize, rows: &[(Vec<Rat>, Rat)]) -> Vec<(IntVec, Rat)> {
    let mut m: Vec<Vec<Rat>> = rows
        .iter()
        .map(|(a, b)| {
            let mut r = a.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let mut rank = 0;
    for c in 0..dim {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let inv = m[rank][c].recip();
        for j in c..=dim {
            m[rank][j] = &m[rank][j] * &inv;
        }
        for i in 0..m.len() {
            if i != rank && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..=dim {
                    let t = &m[rank][j] * &f;
                    m[i][j] -= &t;
                }
            }
        }
        rank += 1;
    }
    let mut out: Vec<(IntVec, Rat)> = m[..rank]
        .iter()
        .map(|row| {
            let cleared = rat::clear_denominators(&row[..dim]);
            let prim = rat::primitive(&cleared).expect("pivot row is nonzero");
            let canon = rat::canonical_sign(&prim);
            // Recover b from the scaling that mapped the a-part onto canon.
            let (scale_n, scale_d) = scale_between(&row[..dim], &canon);
            let b = &row[dim] * &Rat::new(scale_n, scale_d);
            (canon, b)
        })
        .collect();
    out.sort_by(cmp_row);
    out
}

/// Factor p/q with canon = (p/q)·orig, read off the first nonzero entry.
fn scale_between(orig: &[Rat], canon: &IntVec) -> (BigInt, BigInt) {
    for (x, y) in orig.iter().zip(canon.entries()) {
        if !x.is_zero() {
            let f = Rat::from(y.clone()) / x;
            return (f.numer().clone(), f.denom().clone());
        }
    }
    unreachable!("equality pivot row has a nonzero coefficient")
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

/// Result of an exact LP solve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal { value: Rat, point: Vec<Rat> },
}

/// Maximize ⟨c,x⟩ over {x free : ⟨a,x⟩ = b for eq rows, ⟨a,x⟩ ≥ b for ge
/// rows} by two-phase simplex with Bland's rule. Free variables are split
/// into nonnegative pairs; inequality rows get surplus variables.
pub fn lp_max(
    dim: usize,
    c: &[Rat],
    eq: &[(Vec<Rat>, Rat)],
    ge: &[(Vec<Rat>, Rat)],
) -> LpOutcome {
    let m = eq.len() + ge.len();
    let structural = 2 * dim + ge.len();
    let total = structural + m;

    // Rows of A z = b with z = (x⁺, x⁻, surplus), b made nonnegative.
    let mut a: Vec<Vec<Rat>> = Vec::with_capacity(m);
    let mut rhs: Vec<Rat> = Vec::with_capacity(m);
    for (idx, (row, b)) in eq.iter().chain(ge).enumerate() {
        let surplus = idx >= eq.len();
        let mut r = vec![Rat::zero(); total];
        for j in 0..dim {
            r[j] = row[j].clone();
            r[dim + j] = -row[j].clone();
        }
        if surplus {
            r[2 * dim + (idx - eq.len())] = -Rat::one();
        }
        let mut b = b.clone();
        if b.is_negative() {
            for e in r.iter_mut() {
                *e = -e.clone();
            }
            b = -b;
        }
        r[structural + idx] = Rat::one();
        a.push(r);
        rhs.push(b);
    }
    let mut basis: Vec<usize> = (structural..total).collect();

    // Phase 1: maximize minus the sum of artificials.
    let mut phase1 = vec![Rat::zero(); total];
    for j in structural..total {
        phase1[j] = -Rat::one();
    }
    let mut obj = reduced_costs(&a, &basis, &phase1);
    if simplex_loop(&mut a, &mut rhs, &mut basis, &mut obj, total) == Step::Unbounded {
        unreachable!("phase-1 objective is bounded above by zero");
    }
    let infeasibility: Rat = basis
        .iter()
        .zip(&rhs)
        .filter(|(&b, _)| b >= structural)
        .map(|(_, v)| v.clone())
        .fold(Rat::zero(), |acc, v| acc + v);
    if !infeasibility.is_zero() {
        return LpOutcome::Infeasible;
    }

    // Drive leftover zero-level artificials out of the basis.
    let mut r = 0;
    while r < a.len() {
        if basis[r] >= structural {
            if let Some(col) = (0..structural).find(|&j| !a[r][j].is_zero()) {
                pivot(&mut a, &mut rhs, &mut basis, &mut obj, r, col);
            } else {
                a.remove(r);
                rhs.remove(r);
                basis.remove(r);
                continue;
            }
        }
        r += 1;
    }

    // Phase 2 with the real objective, artificials barred from entering.
    let mut full_c = vec![Rat::zero(); total];
    for j in 0..dim {
        full_c[j] = c[j].clone();
        full_c[dim + j] = -c[j].clone();
    }
    let mut obj = reduced_costs(&a, &basis, &full_c);
    if simplex_loop(&mut a, &mut rhs, &mut basis, &mut obj, structural) == Step::Unbounded {
        return LpOutcome::Unbounded;
    }

    let mut z = vec![Rat::zero(); total];
    for (r, &b) in basis.iter().enumerate() {
        z[b] = rhs[r].clone();
    }
    let point: Vec<Rat> = (0..dim).map(|j| &z[j] - &z[dim + j]).collect();
    let value = point
        .iter()
        .zip(c)
        .fold(Rat::zero(), |acc, (x, cj)| acc + &(x * cj));
    LpOutcome::Optimal { value, point }
}

#[derive(PartialEq)]
enum Step {
    Optimal,
    Unbounded,
}

/// Reduced cost row c_j − c_B · (column j) for a tableau in canonical form.
fn reduced_costs(a: &[Vec<Rat>], basis: &[usize], c: &[Rat]) -> Vec<Rat> {
    let total = c.len();
    let mut obj = c.to_vec();
    for (r, &b) in basis.iter().enumerate() {
        if c[b].is_zero() {
            continue;
        }
        for j in 0..total {
            let t = &a[r][j] * &c[b];
            obj[j] -= &t;
        }
    }
    obj
}

fn simplex_loop(
    a: &mut Vec<Vec<Rat>>,
    rhs: &mut [Rat],
    basis: &mut [usize],
    obj: &mut [Rat],
    enter_limit: usize,
) -> Step {
    loop {
        // Bland: smallest-index column with positive reduced cost.
        let Some(col) = (0..enter_limit).find(|&j| obj[j].is_positive()) else {
            return Step::Optimal;
        };
        let mut leave: Option<(usize, Rat)> = None;
        for r in 0..a.len() {
            if !a[r][col].is_positive() {
                continue;
            }
            let ratio = &rhs[r] / &a[r][col];
            let better = match &leave {
                None => true,
                Some((lr, lratio)) => {
                    ratio < *lratio || (ratio == *lratio && basis[r] < basis[*lr])
                }
            };
            if better {
                leave = Some((r, ratio));
            }
        }
        let Some((row, _)) = leave else {
            return Step::Unbounded;
        };
        pivot(a, rhs, basis, obj, row, col);
    }
}

fn pivot(
    a: &mut [Vec<Rat>],
    rhs: &mut [Rat],
    basis: &mut [usize],
    obj: &mut [Rat],
    row: usize,
    col: usize,
) {
    let inv = a[row][col].recip();
    for e in a[row].iter_mut() {
        *e = &*e * &inv;
    }
    rhs[row] = &rhs[row] * &inv;
    for r in 0..a.len() {
        if r != row && !a[r][col].is_zero() {
            let f = a[r][col].clone();
            for j in 0..a[r].len() {
                let t = &a[row][j] * &f;
                a[r][j] -= &t;
            }
            let t = &rhs[row] * &f;
            rhs[r] -= &t;
        }
    }
    if !obj[col].is_zero() {
        let f = obj[col].clone();
        for j in 0..obj.len() {
            let t = &a[row][j] * &f;
            obj[j] -= &t;
        }
    }
    basis[row] = col;
}
