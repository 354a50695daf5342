//! The moment polytope as an H-polytope: parsing, validation, facet
//! functionals l_j(u) = ⟨u, v_j⟩ − λ_j, the energy filtration at an interior
//! point, leading order potential data, and facet-translation perturbations.
//!
//! Facet indices are 1-based everywhere in the public API, matching the
//! canonical order of the input file.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::lp::{HSystem, LpOutcome};
use crate::rat::{self, IntVec, Rat};
use crate::tropical::TropicalPolynomial;
use crate::{Error, Result};

/// A single half-space ⟨u, v⟩ ≥ λ with primitive integer normal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Facet {
    pub normal: IntVec,
    pub offset: Rat,
}

/// A compact full-dimensional H-polytope with primitive facet normals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Polytope {
    pub dim: usize,
    pub facets: Vec<Facet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

/// Pass/fail breakdown of the polytope invariants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    /// Per facet (1-based): is the normal primitive?
    pub primitive: Vec<(usize, bool)>,
    /// Per facet (1-based): does its boundary meet the polytope in a face of
    /// dimension n − 1?
    pub irredundant: Vec<(usize, bool)>,
    pub bounded: bool,
    pub full_dimensional: bool,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.primitive.iter().all(|(_, ok)| *ok)
            && self.irredundant.iter().all(|(_, ok)| *ok)
            && self.bounded
            && self.full_dimensional
    }

    /// First failure as a one-line diagnostic, if any.
    pub fn first_failure(&self) -> Option<String> {
        for (j, ok) in &self.primitive {
            if !ok {
                return Some(format!("non-primitive normal at facet {j}"));
            }
        }
        if !self.full_dimensional {
            return Some("interior is empty (not full-dimensional)".to_string());
        }
        if !self.bounded {
            return Some("polytope is unbounded".to_string());
        }
        for (j, ok) in &self.irredundant {
            if !ok {
                return Some(format!("redundant facet {j}"));
            }
        }
        None
    }
}

impl Polytope {
    /// Build from raw facet data and verify every invariant.
    pub fn from_facets(dim: usize, facets: Vec<Facet>, name: Option<String>) -> Result<Self> {
        let p = Polytope { dim, facets, name };
        p.check_structure()?;
        match p.validate().first_failure() {
            None => Ok(p),
            Some(msg) => Err(Error::InvalidPolytope(msg)),
        }
    }

    /// Parse a polytope JSON document and verify every invariant.
    pub fn parse(text: &str) -> Result<Self> {
        let p: Polytope = serde_json::from_str(text)?;
        Self::from_facets(p.dim, p.facets, p.name)
    }

    fn check_structure(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidPolytope("ambient dimension is zero".into()));
        }
        if self.facets.is_empty() {
            return Err(Error::InvalidPolytope("no facets".into()));
        }
        for (idx, f) in self.facets.iter().enumerate() {
            if f.normal.dim() != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    got: f.normal.dim(),
                });
            }
            if f.normal.is_zero() {
                return Err(Error::InvalidPolytope(format!(
                    "zero normal at facet {}",
                    idx + 1
                )));
            }
        }
        Ok(())
    }

    /// Number of facets m.
    pub fn num_facets(&self) -> usize {
        self.facets.len()
    }

    /// Exact pass/fail report over all polytope invariants.
    pub fn validate(&self) -> ValidationReport {
        let primitive: Vec<(usize, bool)> = self
            .facets
            .iter()
            .enumerate()
            .map(|(idx, f)| {
                let mut g = BigInt::from(0);
                for e in f.normal.entries() {
                    g = g.gcd(e);
                }
                (idx + 1, g.is_one())
            })
            .collect();
        let full_dimensional = self.interior_system().feasible().is_some();
        let bounded = self.weak_system().is_bounded();
        let irredundant: Vec<(usize, bool)> = (1..=self.num_facets())
            .map(|j| {
                let mut face = self.weak_system();
                let row = face.ge.remove(j - 1);
                face.eq.push(row);
                (j, face.affine_dim() == self.dim as i64 - 1)
            })
            .collect();
        ValidationReport {
            primitive,
            irredundant,
            bounded,
            full_dimensional,
        }
    }

    /// The closed polytope as weak rows ⟨u, v_j⟩ ≥ λ_j.
    pub fn weak_system(&self) -> HSystem {
        let mut s = HSystem::new(self.dim);
        for f in &self.facets {
            s.push_ge(f.normal.clone(), f.offset.clone());
        }
        s
    }

    /// The open interior as strict rows ⟨u, v_j⟩ > λ_j.
    pub fn interior_system(&self) -> HSystem {
        let mut s = HSystem::new(self.dim);
        for f in &self.facets {
            s.push_gt(f.normal.clone(), f.offset.clone());
        }
        s
    }

    /// l_j(u) = ⟨u, v_j⟩ − λ_j for the 1-based facet index j.
    pub fn facet_value(&self, j: usize, u: &[Rat]) -> Result<Rat> {
        let f = self.facet(j)?;
        if u.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: u.len(),
            });
        }
        Ok(f.normal.dot_rat(u) - &f.offset)
    }

    pub fn facet(&self, j: usize) -> Result<&Facet> {
        if j == 0 || j > self.facets.len() {
            return Err(Error::FacetIndex {
                index: j,
                count: self.facets.len(),
            });
        }
        Ok(&self.facets[j - 1])
    }

    /// All facet values l_j(u), after checking that u is strictly interior.
    pub fn interior_values(&self, u: &[Rat]) -> Result<Vec<Rat>> {
        let values: Vec<Rat> = (1..=self.num_facets())
            .map(|j| self.facet_value(j, u))
            .collect::<Result<_>>()?;
        for (idx, v) in values.iter().enumerate() {
            if !v.is_positive() {
                return Err(Error::NotInterior {
                    facet: idx + 1,
                    value: v.to_string(),
                });
            }
        }
        Ok(values)
    }

    /// Energy filtration of the facet values at an interior point.
    pub fn energy_filtration(&self, u: &[Rat]) -> Result<EnergyFiltration> {
        let values = self.interior_values(u)?;
        let mut levels: Vec<Rat> = values.to_vec();
        levels.sort();
        levels.dedup();
        let groups: Vec<Vec<usize>> = levels
            .iter()
            .map(|s| {
                values
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| *v == s)
                    .map(|(idx, _)| idx + 1)
                    .collect()
            })
            .collect();
        let a: Vec<usize> = groups.iter().map(|g| g.len()).collect();
        let mut d = Vec::with_capacity(levels.len());
        let mut prefix: Vec<IntVec> = Vec::new();
        let mut prev_rank = 0;
        let mut kappa = 0;
        for (l, group) in groups.iter().enumerate() {
            for &j in group {
                prefix.push(self.facets[j - 1].normal.clone());
            }
            let r = rat::rank(&prefix)?;
            d.push(r - prev_rank);
            prev_rank = r;
            if kappa == 0 && r == self.dim {
                kappa = l + 1;
            }
        }
        debug_assert_eq!(prev_rank, self.dim, "facet normals span the ambient space");
        Ok(EnergyFiltration {
            point: u.to_vec(),
            levels,
            groups,
            a,
            d,
            kappa,
        })
    }

    /// The leading order potential at u in both coordinate systems: y-form
    /// term j has valuation l_j(u), x-form term j has valuation −λ_j.
    pub fn leading_order_potential(&self, u: &[Rat]) -> Result<LeadingOrderPotential> {
        let values = self.interior_values(u)?;
        let y_form = TropicalPolynomial::new(
            self.dim,
            values
                .iter()
                .zip(&self.facets)
                .map(|(v, f)| (v.clone(), f.normal.clone()))
                .collect(),
        )?;
        let x_form = TropicalPolynomial::new(
            self.dim,
            self.facets
                .iter()
                .map(|f| (-&f.offset, f.normal.clone()))
                .collect(),
        )?;
        Ok(LeadingOrderPotential { y_form, x_form })
    }

    /// Shift facet j outward by delta: λ_j → λ_j − delta, so l_j gains delta.
    pub fn translate_facet(&self, j: usize, delta: &Rat) -> Result<Polytope> {
        self.facet(j)?;
        let mut facets = self.facets.clone();
        facets[j - 1].offset = &facets[j - 1].offset - delta;
        let candidate = Polytope {
            dim: self.dim,
            facets,
            name: self.name.clone(),
        };
        match candidate.validate().first_failure() {
            None => Ok(candidate),
            Some(reason) => Err(Error::BadTranslation {
                delta: delta.to_string(),
                reason,
            }),
        }
    }

    /// Axis-aligned bounding box [lo_i, hi_i] of the closed polytope.
    pub fn bounding_box(&self) -> Result<Vec<(Rat, Rat)>> {
        let s = self.weak_system();
        let mut out = Vec::with_capacity(self.dim);
        for i in 0..self.dim {
            let mut c = vec![Rat::zero(); self.dim];
            c[i] = Rat::one();
            let hi = match s.maximize(&c) {
                LpOutcome::Optimal { value, .. } => value,
                _ => return Err(Error::Unbounded),
            };
            let lo = match s.minimize(&c) {
                LpOutcome::Optimal { value, .. } => value,
                _ => return Err(Error::Unbounded),
            };
            out.push((lo, hi));
        }
        Ok(out)
    }
}

/// Leading order potential in the two standard coordinate systems.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeadingOrderPotential {
    pub y_form: TropicalPolynomial,
    pub x_form: TropicalPolynomial,
}

/// Ascending energy levels S_l of the facet values at a point, the facet
/// groups realizing each level, group sizes a_l, rank jumps d_l of the
/// normal-span filtration, and the cutoff level κ where the span fills up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnergyFiltration {
    pub point: Vec<Rat>,
    pub levels: Vec<Rat>,
    /// 1-based facet indices, ascending within each level.
    pub groups: Vec<Vec<usize>>,
    pub a: Vec<usize>,
    pub d: Vec<usize>,
    /// 1-based level index; smallest l whose prefix normals span everything.
    pub kappa: usize,
}
