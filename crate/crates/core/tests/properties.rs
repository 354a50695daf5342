//! Randomized invariants for the arithmetic kernel, the LP layer, the
//! tropicalization machinery, and the metric layer.

use num_bigint::BigInt;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tropfiber::balancing::{self, SlotOrder};
use tropfiber::lp::HSystem;
use tropfiber::metrics::{self, PlanarSet};
use tropfiber::polytope::{Facet, Polytope};
use tropfiber::rat;
use tropfiber::tropical;
use tropfiber::{IntVec, Rat};

fn r(n: i64, d: i64) -> Rat {
    Rat::ratio(n, d)
}

fn polytope(facets: &[(&[i64], Rat)]) -> Polytope {
    Polytope::from_facets(
        2,
        facets
            .iter()
            .map(|(normal, offset)| Facet {
                normal: IntVec::from_i64(normal),
                offset: offset.clone(),
            })
            .collect(),
        None,
    )
    .unwrap()
}

fn example2() -> Polytope {
    polytope(&[
        (&[1, 0], r(0, 1)),
        (&[1, 1], r(1, 4)),
        (&[0, 1], r(0, 1)),
        (&[-1, -1], r(-1, 1)),
        (&[0, -1], r(-1, 2)),
    ])
}

fn example3() -> Polytope {
    polytope(&[
        (&[1, 0], r(0, 1)),
        (&[0, 1], r(0, 1)),
        (&[-1, 1], r(-2, 1)),
        (&[0, -1], r(-5, 1)),
        (&[1, -1], r(-1, 1)),
    ])
}

fn cp2() -> Polytope {
    polytope(&[
        (&[1, 0], r(0, 1)),
        (&[0, 1], r(0, 1)),
        (&[-1, -1], r(-1, 1)),
    ])
}

fn examples() -> Vec<Polytope> {
    vec![cp2(), example2(), example3()]
}

/// A random interior rational point with bounded denominator.
fn random_interior(p: &Polytope, rng: &mut ChaCha8Rng, max_denom: i64) -> Vec<Rat> {
    let bb = p.bounding_box().unwrap();
    loop {
        let q = rng.gen_range(2..=max_denom);
        let u: Vec<Rat> = bb
            .iter()
            .map(|(lo, hi)| {
                let lo_n = (lo.to_f64() * q as f64).floor() as i64;
                let hi_n = (hi.to_f64() * q as f64).ceil() as i64;
                Rat::ratio(rng.gen_range(lo_n..=hi_n), q)
            })
            .collect();
        if p.interior_values(&u).is_ok() {
            return u;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn primitive_ignores_scaling(v in prop::collection::vec(-20i64..=20, 2..=4), k in 1i64..=7) {
        let v = IntVec::from_i64(&v);
        prop_assume!(!v.is_zero());
        let scaled = IntVec::new(v.entries().iter().map(|e| e * BigInt::from(k)).collect());
        prop_assert_eq!(rat::primitive(&v).unwrap(), rat::primitive(&scaled).unwrap());
    }

    #[test]
    fn kernel_is_orthogonal_and_primitive(raw in prop::collection::vec(prop::collection::vec(-9i64..=9, 3), 2)) {
        let vs: Vec<IntVec> = raw.iter().map(|v| IntVec::from_i64(v)).collect();
        prop_assume!(rat::rank(&vs).unwrap() == 2);
        let m = rat::kernel_primitive(&vs).unwrap();
        for v in &vs {
            prop_assert_eq!(m.dot(v), BigInt::from(0));
        }
        prop_assert_eq!(rat::primitive(&m).unwrap(), m.clone());
        prop_assert_eq!(rat::canonical_sign(&m), m);
    }

    #[test]
    fn coords_round_trip(v in prop::collection::vec(-9i64..=9, 2), b in prop::collection::vec(-5i64..=5, 4)) {
        let basis = vec![
            vec![Rat::from_int(b[0]), Rat::from_int(b[1])],
            vec![Rat::from_int(b[2]), Rat::from_int(b[3])],
        ];
        prop_assume!(b[0] * b[3] - b[1] * b[2] != 0);
        let v = IntVec::from_i64(&v);
        let c = rat::coords_in_basis(&v, &basis).unwrap();
        for i in 0..2 {
            let recombined = &c[0] * &basis[0][i] + &c[1] * &basis[1][i];
            prop_assert_eq!(recombined, Rat::from(v.entries()[i].clone()));
        }
    }

    #[test]
    fn remove_redundant_preserves_solutions(rows in prop::collection::vec((prop::collection::vec(-3i64..=3, 2), -4i64..=4), 1..=6)) {
        let mut s = HSystem::new(2);
        for (a, b) in &rows {
            let a = IntVec::from_i64(a);
            if a.is_zero() {
                continue;
            }
            s.push_ge(a, Rat::from_int(*b));
        }
        prop_assume!(!s.ge.is_empty());
        if let Ok(reduced) = s.remove_redundant() {
            prop_assert!(s.contains_closure(&reduced).unwrap());
            prop_assert!(reduced.contains_closure(&s).unwrap());
            for x in -5i64..=5 {
                for y in -5i64..=5 {
                    let u = vec![Rat::from_int(x), Rat::from_int(y)];
                    prop_assert_eq!(s.satisfies(&u), reduced.satisfies(&u));
                }
            }
        } else {
            prop_assert!(s.feasible().is_none());
        }
    }
}

#[test]
fn sign_symmetry_of_relative_tropicalization() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for p in examples() {
        for _ in 0..25 {
            let m = IntVec::from_i64(&[rng.gen_range(-5..=5), rng.gen_range(-5..=5)]);
            let a = tropical::trop_relative(&p, &m).unwrap();
            let b = tropical::trop_relative(&p, &m.neg()).unwrap();
            assert!(a.set_eq(&b).unwrap(), "m = {m:?}");
        }
    }
}

#[test]
fn membership_matches_cells_on_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for p in examples() {
        let bb = p.bounding_box().unwrap();
        let normals = balancing::primary_normals(&p).unwrap();
        let complexes: Vec<_> = normals
            .iter()
            .map(|m| tropical::trop_relative(&p, m).unwrap())
            .collect();
        for _ in 0..200 {
            let q = rng.gen_range(1..=64i64);
            let u: Vec<Rat> = bb
                .iter()
                .map(|(lo, hi)| {
                    let lo_n = (lo.to_f64() * q as f64).floor() as i64;
                    let hi_n = (hi.to_f64() * q as f64).ceil() as i64;
                    Rat::ratio(rng.gen_range(lo_n..=hi_n), q)
                })
                .collect();
            for (m, c) in normals.iter().zip(&complexes) {
                assert_eq!(
                    c.contains_point(&u),
                    tropical::member_relative(&p, m, &u).unwrap(),
                    "direction {m:?} at {u:?}"
                );
            }
        }
    }
}

#[test]
fn log_derivative_matches_xform_trop_poly() {
    // Independent code path: the x-form logarithmic-derivative support fed
    // straight into the generic hypersurface constructor.
    for p in examples() {
        for i in 1..=p.dim {
            let direct = tropical::log_derivative_trop(&p, i).unwrap();
            let terms: Vec<(Rat, IntVec)> = p
                .facets
                .iter()
                .filter(|f| !f.normal.entries()[i - 1].eq(&BigInt::from(0)))
                .map(|f| (-&f.offset, f.normal.clone()))
                .collect();
            let poly = tropical::TropicalPolynomial::new(p.dim, terms).unwrap();
            let generic = tropical::trop_poly(&poly, None).unwrap();
            assert!(direct.set_eq(&generic).unwrap());
        }
    }
}

#[test]
fn detection_points_pass_all_lattice_directions() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    for p in examples() {
        let detected = balancing::detect(&p).unwrap();
        for cell in &detected.cells {
            for _ in 0..200 {
                let m = IntVec::from_i64(&[rng.gen_range(-5..=5), rng.gen_range(-5..=5)]);
                assert!(
                    tropical::member_relative(&p, &m, &cell.witness).unwrap(),
                    "witness {:?} fails direction {m:?}",
                    cell.witness
                );
            }
        }
    }
}

#[test]
fn separating_normal_is_primary_and_separates() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for p in examples() {
        let primaries = balancing::primary_normals(&p).unwrap();
        let mut found = 0;
        while found < 60 {
            let u = random_interior(&p, &mut rng, 48);
            let m = IntVec::from_i64(&[rng.gen_range(-5..=5), rng.gen_range(-5..=5)]);
            if m.is_zero() || tropical::member_relative(&p, &m, &u).unwrap() {
                continue;
            }
            found += 1;
            let sep = balancing::find_separating_primary_normal(&p, &u, &m).unwrap();
            assert!(primaries.contains(&sep));
            assert!(!tropical::member_relative(&p, &sep, &u).unwrap());
        }
    }
}

#[test]
fn solvability_agrees_with_membership_criterion() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for p in examples() {
        for _ in 0..60 {
            let u = random_interior(&p, &mut rng, 48);
            assert_eq!(
                balancing::solvable_over_torus(&p, &u).unwrap(),
                balancing::is_strongly_bulk_balanced(&p, &u).unwrap(),
                "at {u:?}"
            );
        }
    }
}

#[test]
fn solvability_is_basis_order_independent() {
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    for p in examples() {
        for _ in 0..40 {
            let u = random_interior(&p, &mut rng, 48);
            assert_eq!(
                balancing::solvable_over_torus_with(&p, &u, SlotOrder::AscendingFacet).unwrap(),
                balancing::solvable_over_torus_with(&p, &u, SlotOrder::DescendingFacet).unwrap(),
            );
        }
    }
}

#[test]
fn filtration_invariants_hold() {
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    for p in examples() {
        for _ in 0..50 {
            let u = random_interior(&p, &mut rng, 64);
            let f = p.energy_filtration(&u).unwrap();
            assert!(f.levels[0].is_positive());
            assert!(f.levels.windows(2).all(|w| w[0] < w[1]));
            assert_eq!(f.a.iter().sum::<usize>(), p.num_facets());
            assert_eq!(f.d[..f.kappa].iter().sum::<usize>(), p.dim);
            let mut seen: Vec<usize> = f.groups.concat();
            seen.sort();
            assert_eq!(seen, (1..=p.num_facets()).collect::<Vec<_>>());
        }
    }
}

#[test]
fn intersect_is_commutative_and_associative() {
    let p = example2();
    let normals = balancing::primary_normals(&p).unwrap();
    let cs: Vec<_> = normals
        .iter()
        .map(|m| tropical::trop_relative(&p, m).unwrap())
        .collect();
    let interior = p.interior_system();
    let abc = tropical::intersect(&cs, Some(&interior)).unwrap();
    let cba: Vec<_> = cs.iter().rev().cloned().collect();
    let rev = tropical::intersect(&cba, Some(&interior)).unwrap();
    assert!(abc.set_eq(&rev).unwrap());
    let ab = tropical::intersect(&cs[..2], None).unwrap();
    let ab_c = tropical::intersect(&[ab, cs[2].clone()], Some(&interior)).unwrap();
    assert!(abc.set_eq(&ab_c).unwrap());
}

#[test]
fn translate_then_filter_changes_only_affected_level() {
    let mut rng = ChaCha8Rng::seed_from_u64(59);
    let p = example2();
    for _ in 0..20 {
        let u = random_interior(&p, &mut rng, 32);
        let q = match p.translate_facet(1, &Rat::ratio(1, 64)) {
            Ok(q) => q,
            Err(_) => continue,
        };
        if q.interior_values(&u).is_err() {
            continue;
        }
        let before = p.energy_filtration(&u).unwrap();
        let after = q.energy_filtration(&u).unwrap();
        // Every facet other than the translated one keeps its l_j value.
        for j in 2..=p.num_facets() {
            assert_eq!(
                p.facet_value(j, &u).unwrap(),
                q.facet_value(j, &u).unwrap()
            );
        }
        assert_eq!(
            &q.facet_value(1, &u).unwrap() - &p.facet_value(1, &u).unwrap(),
            Rat::ratio(1, 64)
        );
        // Group memberships agree away from facet 1.
        let strip = |f: &tropfiber::polytope::EnergyFiltration| -> Vec<Vec<usize>> {
            f.groups
                .iter()
                .map(|g| g.iter().copied().filter(|&j| j != 1).collect())
                .filter(|g: &Vec<usize>| !g.is_empty())
                .collect()
        };
        assert_eq!(strip(&before), strip(&after));
    }
}

#[test]
fn hausdorff_symmetry_and_triangle_inequality() {
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    let tol = Rat::ratio(1, 1000);
    let random_polygon = |rng: &mut ChaCha8Rng| -> PlanarSet {
        loop {
            let cx = rng.gen_range(-3..=3);
            let cy = rng.gen_range(-3..=3);
            let w = rng.gen_range(1..=4);
            let h = rng.gen_range(1..=4);
            let p = Polytope::from_facets(
                2,
                vec![
                    Facet { normal: IntVec::from_i64(&[1, 0]), offset: Rat::from_int(cx) },
                    Facet { normal: IntVec::from_i64(&[0, 1]), offset: Rat::from_int(cy) },
                    Facet { normal: IntVec::from_i64(&[-1, 0]), offset: Rat::from_int(-cx - w) },
                    Facet { normal: IntVec::from_i64(&[0, -1]), offset: Rat::from_int(-cy - h) },
                ],
                None,
            );
            if let Ok(p) = p {
                return PlanarSet::from_polytope(&p).unwrap();
            }
        }
    };
    for _ in 0..12 {
        let a = random_polygon(&mut rng);
        let b = random_polygon(&mut rng);
        let c = random_polygon(&mut rng);
        let dab = metrics::hausdorff(&a, &b, &tol).unwrap();
        let dba = metrics::hausdorff(&b, &a, &tol).unwrap();
        assert!(dab.lower <= dba.upper && dba.lower <= dab.upper);
        let dbc = metrics::hausdorff(&b, &c, &tol).unwrap();
        let dac = metrics::hausdorff(&a, &c, &tol).unwrap();
        let slack = &tol + &(&tol + &tol);
        assert!(dac.upper <= &(&dab.upper + &dbc.upper) + &slack);
    }
}

#[test]
fn lemma_style_translate_lower_bound() {
    // Moving facet j by δ moves the polytope by at least |δ|/‖v_j‖.
    let tol = Rat::ratio(1, 100000);
    let p = example2();
    for (j, delta, norm_sq) in [
        (1usize, Rat::ratio(1, 16), 1i64),
        (2, Rat::ratio(1, 32), 2),
        (5, Rat::ratio(1, 16), 1),
    ] {
        let q = p.translate_facet(j, &delta).unwrap();
        let d = metrics::hausdorff(
            &PlanarSet::from_polytope(&p).unwrap(),
            &PlanarSet::from_polytope(&q).unwrap(),
            &tol,
        )
        .unwrap();
        // Squared comparison avoids the square root of ‖v_j‖.
        let bound_sq = &(&delta * &delta) / &Rat::from_int(norm_sq);
        let reached = &(&d.upper + &tol) * &(&d.upper + &tol);
        assert!(reached >= bound_sq, "facet {j}");
    }
}
