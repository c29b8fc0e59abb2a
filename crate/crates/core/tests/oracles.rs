//! Values computed by independent brute force, frozen.

use std::collections::BTreeMap;

use lplab::additive::{best_translation, difference_energy, difference_set, gap_fit, Gap};
use lplab::bisector::{build_bisector, inflection_points, LineEq};
use lplab::census::{classify_pairs_linf, distance_census, incidences, ImplicitCurve};
use lplab::circle_graph::{build_circles, build_multigraph, crossing_count};
use lplab::exact::{int, ratio, Scalar};
use lplab::generators::{grid, random_rational, row_construction, Rect};
use lplab::geometry::{l1_to_linf_transform, PNorm, Point, PointSet};
use lplab::structure::{extreme_frame, line_cover};

fn ints(xs: &[i64]) -> Vec<Scalar> {
    xs.iter().map(|&x| int(x)).collect()
}

/// Multiset of pairwise keys by the textbook formula.
fn pair_keys(p: &PointSet, f: impl Fn(&Point, &Point) -> Scalar) -> BTreeMap<Scalar, u64> {
    let mut out = BTreeMap::new();
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            *out.entry(f(p.get(i), p.get(j))).or_insert(0) += 1;
        }
    }
    out
}

fn l1(a: &Point, b: &Point) -> Scalar {
    num_traits::Signed::abs(&(&a.x - &b.x)) + num_traits::Signed::abs(&(&a.y - &b.y))
}

fn linf(a: &Point, b: &Point) -> Scalar {
    let dx = num_traits::Signed::abs(&(&a.x - &b.x));
    let dy = num_traits::Signed::abs(&(&a.y - &b.y));
    dx.max(dy)
}

#[test]
fn rotation_small_set() {
    let p = PointSet::new(vec![Point::int(1, 1), Point::int(2, 3), Point::int(4, 0)]).unwrap();
    let want = pair_keys(&p, l1);
    assert_eq!(want.keys().cloned().collect::<Vec<_>>(), ints(&[3, 4, 5]));
    assert_eq!(pair_keys(&l1_to_linf_transform(&p), linf), want);
    assert_eq!(
        distance_census(&l1_to_linf_transform(&p), PNorm::Infinity)
            .unwrap()
            .histogram,
        want
    );
}

#[test]
fn grid_and_rows_by_brute_force() {
    let g10 = grid(10).unwrap();
    assert_eq!(pair_keys(&g10, linf).len(), 9);
    let r3 = row_construction(3).unwrap();
    let keys = pair_keys(&r3, linf);
    assert_eq!(keys.len(), 4);
    assert_eq!(
        keys.keys().cloned().collect::<Vec<_>>(),
        vec![ratio(1, 90), ratio(2, 90), int(1), int(2)]
    );
    let r2 = row_construction(2).unwrap();
    assert_eq!(
        distance_census(&r2, PNorm::Infinity)
            .unwrap()
            .distinct_count,
        2
    );
}

#[test]
fn random_points_are_distinct() {
    let p = random_rational(100, 7, &Rect::square(100), 1).unwrap();
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            assert_ne!(p.get(i), p.get(j));
        }
    }
}

#[test]
fn grid3_pair_classes() {
    // Brute force: 36 pairs, 10 of them with |dx| = |dy|.
    let g = grid(3).unwrap();
    let (mut h, mut v, mut both) = (0, 0, 0);
    for i in 0..9 {
        for j in i + 1..9 {
            let (a, b) = (g.get(i), g.get(j));
            let dx = num_traits::Signed::abs(&(&a.x - &b.x));
            let dy = num_traits::Signed::abs(&(&a.y - &b.y));
            h += u64::from(dy <= dx);
            v += u64::from(dx <= dy);
            both += u64::from(dx == dy);
        }
    }
    assert_eq!((h, v, both), (23, 23, 10));
    let c = classify_pairs_linf(&g).unwrap();
    assert_eq!((c.horizontal, c.vertical, c.both), (h, v, both));
}

#[test]
fn incidences_on_antidiagonal() {
    let line = LineEq::new(int(1), int(1), int(-4));
    let curves = vec![ImplicitCurve::Poly(line.poly())];
    assert_eq!(incidences(&grid(3).unwrap(), &curves), 3);
}

#[test]
fn difference_sets_and_energies() {
    assert_eq!(
        difference_set(&ints(&[1, 2, 3]))
            .unwrap()
            .into_iter()
            .collect::<Vec<_>>(),
        ints(&[-2, -1, 0, 1, 2])
    );
    assert_eq!(difference_set(&ints(&[1, 2, 4])).unwrap().len(), 7);
    assert_eq!(difference_energy(&ints(&[1, 2, 3])).unwrap().energy, 19);
    assert_eq!(difference_energy(&ints(&[1, 2, 4])).unwrap().energy, 15);
}

#[test]
fn small_gap_fit() {
    let a = ints(&[0, 1, 10, 11, 20, 21]);
    let g = gap_fit(&a, 3, 6).unwrap().unwrap();
    assert_eq!(g.base, int(0));
    assert_eq!(g.generators, ints(&[1, 10]));
    assert_eq!(g.sizes, vec![2, 3]);
}

#[test]
fn translation_ties_go_low() {
    let a = Gap::progression(int(0), int(1), 3).unwrap();
    assert_eq!(
        best_translation(&a, &ints(&[5, 6, 9])).unwrap(),
        (int(4), 2)
    );
    assert_eq!(best_translation(&a, &ints(&[0, 10, 20])).unwrap().1, 1);
}

#[test]
fn bisector_examples() {
    let line = build_bisector(&Point::int(0, 0), &Point::int(0, 2), 5).unwrap();
    assert!(line.is_line());
    assert!(line.contains(&Point::int(17, 1)));
    let b = build_bisector(&Point::int(0, 0), &Point::int(3, 1), 3).unwrap();
    assert_eq!(b.pieces().len(), 5);
    let inf = inflection_points(&b, &b.default_precision()).unwrap();
    assert_eq!(inf.count, 3);
    assert!(inf
        .points
        .iter()
        .any(|r| r.contains(&Point::new(ratio(3, 2), ratio(1, 2)))));
}

#[test]
fn circles_of_small_grids() {
    assert!(build_circles(&grid(2).unwrap(), 2).unwrap().is_empty());
    let g2 = build_multigraph(&grid(2).unwrap(), 2).unwrap();
    let r = crossing_count(&g2, 8).unwrap();
    assert_eq!((r.cr, r.upper_bound), (0, 0));

    let g3 = grid(3).unwrap();
    let circles = build_circles(&g3, 2).unwrap();
    let centre = (0..9).find(|&i| *g3.get(i) == Point::int(2, 2)).unwrap();
    let corners = circles
        .iter()
        .find(|c| c.center == centre && c.radius_key == int(2))
        .expect("corner circle");
    assert_eq!(corners.incident.len(), 4);
}

/// Crossing counts from the independent arc-pair oracle on
/// `random_rational(20, seed, [0,10]², 1)`.
#[test]
fn frozen_crossings() {
    let cases: [(u64, u32, u64, u64); 9] = [
        (0, 2, 18, 19),
        (1, 2, 11, 11),
        (2, 2, 3, 3),
        (3, 2, 53, 54),
        (0, 3, 14, 14),
        (1, 3, 9, 9),
        (2, 3, 2, 2),
        (3, 3, 40, 41),
        (17, 2, 39, 40),
    ];
    for (seed, p, cr, points) in cases {
        let pts = random_rational(20, seed, &Rect::square(10), 1).unwrap();
        let r = crossing_count(&build_multigraph(&pts, p).unwrap(), 8).unwrap();
        assert_eq!(
            (r.cr, r.crossing_points),
            (cr, points),
            "seed {seed}, p = {p}"
        );
    }
    let r = crossing_count(&build_multigraph(&grid(3).unwrap(), 2).unwrap(), 8).unwrap();
    assert_eq!(r.cr, 8);
}

#[test]
fn grid3_frame_and_cover() {
    let g = grid(3).unwrap();
    let f = extreme_frame(&g).unwrap();
    let want = [
        Point::int(1, 1),
        Point::int(3, 3),
        Point::int(3, 1),
        Point::int(1, 3),
    ];
    for (i, w) in want.iter().enumerate() {
        assert_eq!(g.get(f.extreme[i]), w, "extreme point {}", i + 1);
    }
    assert_eq!((f.plus[0].clone(), f.plus[3].clone()), (int(2), int(6)));
    let c = line_cover(&g).unwrap();
    assert_eq!(c.lines, ints(&[1, 2, 3]));
    assert_eq!(c.covered(), 9);
}
