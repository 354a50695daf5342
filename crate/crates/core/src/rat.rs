//! Exact rational arithmetic and the small amount of integer/rational linear
//! algebra the rest of the crate needs: ranks, kernels of codimension-one
//! spans, and coordinates with respect to a rational basis.
//!
//! All values are immutable after construction and every operation is pure,
//! so everything here can be shared freely across threads.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// An exact rational number, always in lowest terms with positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rat(BigRational);

impl Rat {
    pub fn new(numer: BigInt, denom: BigInt) -> Self {
        Rat(BigRational::new(numer, denom))
    }

    pub fn from_int(n: i64) -> Self {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Rat(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Rat(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        Rat(self.0.recip())
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Best-effort conversion for rendering; never used in exact predicates.
    pub fn to_f64(&self) -> f64 {
        let n = self.0.numer();
        let d = self.0.denom();
        // Scale down huge operands together so the quotient survives.
        let bits = n.bits().max(d.bits());
        if bits <= 900 {
            approx_f64(n) / approx_f64(d)
        } else {
            let shift = bits - 900;
            approx_f64(&(n >> shift)) / approx_f64(&(d >> shift))
        }
    }
}

fn approx_f64(x: &BigInt) -> f64 {
    let s = x.to_string();
    s.parse::<f64>().unwrap_or(f64::NAN)
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Rat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::BadRational(s.to_string());
        match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                let d: BigInt = d.trim().parse().map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(bad());
                }
                Ok(Rat(BigRational::new(n, d)))
            }
            None => {
                let n: BigInt = s.parse().map_err(|_| bad())?;
                Ok(Rat(BigRational::from_integer(n)))
            }
        }
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(|e| D::Error::custom(format!("{e}")))
    }
}

impl From<BigInt> for Rat {
    fn from(n: BigInt) -> Self {
        Rat(BigRational::from_integer(n))
    }
}

macro_rules! rat_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat((self.0).$method(rhs.0))
            }
        }
        impl $trait for &Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<&Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat((self.0).$method(&rhs.0))
            }
        }
    };
}

rat_binop!(Add, add);
rat_binop!(Sub, sub);
rat_binop!(Mul, mul);
rat_binop!(Div, div);

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, rhs: &Rat) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, rhs: &Rat) {
        self.0 -= &rhs.0;
    }
}

/// An integer vector of fixed dimension: facet normals, lattice directions,
/// and Laurent exponents all live here.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntVec(Vec<BigInt>);

impl IntVec {
    pub fn new(entries: Vec<BigInt>) -> Self {
        IntVec(entries)
    }

    pub fn from_i64(entries: &[i64]) -> Self {
        IntVec(entries.iter().map(|&e| BigInt::from(e)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        IntVec(vec![BigInt::zero(); dim])
    }

    /// The i-th standard unit vector (0-based) in the given dimension.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = vec![BigInt::zero(); dim];
        v[i] = BigInt::one();
        IntVec(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|e| e.is_zero())
    }

    pub fn dot(&self, other: &IntVec) -> BigInt {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn dot_rat(&self, point: &[Rat]) -> Rat {
        debug_assert_eq!(self.dim(), point.len());
        let mut acc = Rat::zero();
        for (a, x) in self.0.iter().zip(point) {
            acc += &(Rat::from(a.clone()) * x);
        }
        acc
    }

    pub fn to_rat(&self) -> Vec<Rat> {
        self.0.iter().map(|e| Rat::from(e.clone())).collect()
    }

    pub fn neg(&self) -> IntVec {
        IntVec(self.0.iter().map(|e| -e).collect())
    }

    pub fn sub(&self, other: &IntVec) -> IntVec {
        debug_assert_eq!(self.dim(), other.dim());
        IntVec(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

impl fmt::Debug for IntVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for IntVec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for e in &self.0 {
            let n = serde_json::Number::from_string_unchecked(e.to_string());
            seq.serialize_element(&n)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for IntVec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let nums = Vec::<serde_json::Number>::deserialize(d)?;
        let mut out = Vec::with_capacity(nums.len());
        for n in nums {
            let e: BigInt = n
                .to_string()
                .parse()
                .map_err(|_| D::Error::custom(format!("not an integer: {n}")))?;
            out.push(e);
        }
        Ok(IntVec(out))
    }
}

/// Divide a nonzero integer vector by the gcd of its entries.
pub fn primitive(v: &IntVec) -> Result<IntVec> {
    if v.is_zero() {
        return Err(Error::ZeroVector);
    }
    let mut g = BigInt::zero();
    for e in v.entries() {
        g = g.gcd(e);
    }
    Ok(IntVec(v.entries().iter().map(|e| e / &g).collect()))
}

/// Flip the sign so the first nonzero entry is positive.
pub fn canonical_sign(v: &IntVec) -> IntVec {
    for e in v.entries() {
        if e.is_positive() {
            return v.clone();
        }
        if e.is_negative() {
            return v.neg();
        }
    }
    v.clone()
}

fn check_common_dim(vs: &[IntVec]) -> Result<Option<usize>> {
    let mut dim = None;
    for v in vs {
        match dim {
            None => dim = Some(v.dim()),
            Some(d) if d != v.dim() => {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: v.dim(),
                })
            }
            _ => {}
        }
    }
    Ok(dim)
}

/// Rank of the rational span of a set of integer vectors.
pub fn rank(vs: &[IntVec]) -> Result<usize> {
    check_common_dim(vs)?;
    let rows: Vec<Vec<Rat>> = vs.iter().map(|v| v.to_rat()).collect();
    Ok(rank_rows(rows))
}

/// Gaussian-elimination rank of rational rows; consumes the rows.
pub fn rank_rows(mut rows: Vec<Vec<Rat>>) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for i in (r + 1)..rows.len() {
            if rows[i][c].is_zero() {
                continue;
            }
            let f = &rows[i][c] * &inv;
            for j in c..cols {
                let t = &rows[r][j] * &f;
                rows[i][j] -= &t;
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

/// Primitive integer generator of the 1-dimensional kernel of a
/// codimension-one span, sign-canonicalized (first nonzero entry positive).
pub fn kernel_primitive(vs: &[IntVec]) -> Result<IntVec> {
    let dim = check_common_dim(vs)?.ok_or(Error::KernelNotALine { rank: 0, need: 0 })?;
    let r = rank(vs)?;
    if r != dim - 1 {
        return Err(Error::KernelNotALine {
            rank: r,
            need: dim - 1,
        });
    }
    // Reduce to echelon form, then back-substitute for the free column.
    let mut rows: Vec<Vec<Rat>> = vs.iter().map(|v| v.to_rat()).collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut rr = 0;
    for c in 0..dim {
        let Some(p) = (rr..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(rr, p);
        let inv = rows[rr][c].recip();
        for j in c..dim {
            rows[rr][j] = &rows[rr][j] * &inv;
        }
        for i in 0..rows.len() {
            if i != rr && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in c..dim {
                    let t = &rows[rr][j] * &f;
                    rows[i][j] -= &t;
                }
            }
        }
        pivots.push(c);
        rr += 1;
        if rr == dim - 1 {
            break;
        }
    }
    let free = (0..dim).find(|c| !pivots.contains(c)).expect("free column");
    let mut kernel = vec![Rat::zero(); dim];
    kernel[free] = Rat::one();
    for (row, &pc) in pivots.iter().enumerate() {
        kernel[pc] = -rows[row][free].clone();
    }
    let as_int = clear_denominators(&kernel);
    Ok(canonical_sign(&primitive(&as_int)?))
}

/// Scale a rational vector by the lcm of its denominators to an integer one.
pub fn clear_denominators(v: &[Rat]) -> IntVec {
    let mut l = BigInt::one();
    for x in v {
        l = l.lcm(x.denom());
    }
    IntVec(
        v.iter()
            .map(|x| x.numer() * (&l / x.denom()))
            .collect(),
    )
}

/// Coordinates of `v` with respect to a rational basis of the ambient space.
pub fn coords_in_basis(v: &IntVec, basis: &[Vec<Rat>]) -> Result<Vec<Rat>> {
    let dim = v.dim();
    if basis.len() != dim || basis.iter().any(|b| b.len() != dim) {
        return Err(Error::SingularBasis);
    }
    // Solve B^T c = v where basis vectors are the columns of B^T.
    let mut aug: Vec<Vec<Rat>> = (0..dim)
        .map(|row| {
            let mut r: Vec<Rat> = basis.iter().map(|b| b[row].clone()).collect();
            r.push(Rat::from(v.entries()[row].clone()));
            r
        })
        .collect();
    solve_square(&mut aug).ok_or(Error::SingularBasis)
}

/// Solve an n x (n+1) augmented rational system in place; `None` if singular.
pub fn solve_square(aug: &mut [Vec<Rat>]) -> Option<Vec<Rat>> {
    let n = aug.len();
    for c in 0..n {
        let p = (c..n).find(|&i| !aug[i][c].is_zero())?;
        aug.swap(c, p);
        let inv = aug[c][c].recip();
        for j in c..=n {
            aug[c][j] = &aug[c][j] * &inv;
        }
        for i in 0..n {
            if i != c && !aug[i][c].is_zero() {
                let f = aug[i][c].clone();
                for j in c..=n {
                    let t = &aug[c][j] * &f;
                    aug[i][j] -= &t;
                }
            }
        }
    }
    Some(aug.iter().map(|row| row[n].clone()).collect())
}

/// Determinant of a square rational matrix given by rows.
pub fn determinant(rows: &[Vec<Rat>]) -> Rat {
    let n = rows.len();
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    let mut det = Rat::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Rat::zero();
        };
        if p != c {
            m.swap(c, p);
            det = -det;
        }
        det = det * m[c][c].clone();
        let inv = m[c][c].recip();
        for i in (c + 1)..n {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] * &inv;
            for j in c..n {
                let t = &m[c][j] * &f;
                m[i][j] -= &t;
            }
        }
    }
    det
}

/// Exact comparison of two rational points in lexicographic order.
pub fn lex_cmp(a: &[Rat], b: &[Rat]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.cmp(y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}
