//! Shared fixtures for the benchmark suite.

use tropfiber::polytope::{Facet, Polytope};
use tropfiber::{IntVec, Rat};

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
    .expect("fixture polytopes are valid")
}

/// The standard moment polytope of the projective plane.
pub fn cp2() -> Polytope {
    polytope(&[
        (&[1, 0], Rat::from_int(0)),
        (&[0, 1], Rat::from_int(0)),
        (&[-1, -1], Rat::from_int(-1)),
    ])
}

/// Two-point blowup with a one-dimensional detection locus.
pub fn blowup2a() -> Polytope {
    polytope(&[
        (&[1, 0], Rat::from_int(0)),
        (&[1, 1], Rat::ratio(1, 4)),
        (&[0, 1], Rat::from_int(0)),
        (&[-1, -1], Rat::from_int(-1)),
        (&[0, -1], Rat::ratio(-1, 2)),
    ])
}

/// Two-point blowup with two isolated detected fibers.
pub fn blowup2b() -> Polytope {
    polytope(&[
        (&[1, 0], Rat::from_int(0)),
        (&[0, 1], Rat::from_int(0)),
        (&[-1, 1], Rat::from_int(-2)),
        (&[0, -1], Rat::from_int(-5)),
        (&[1, -1], Rat::from_int(-1)),
    ])
}
