use proptest::prelude::*;

use lplab::additive::{difference_energy, energy_bruteforce, gap_fit};
use lplab::bisector::build_bisector;
use lplab::census::distance_census;
use lplab::exact::{ratio, Scalar};
use lplab::geometry::{
    compare_distances, l1_to_linf_transform, lp_distance_key, PNorm, Point, PointSet,
};
use lplab::io::{points_from_json, points_to_json};
use std::cmp::Ordering;

fn scalar() -> impl Strategy<Value = Scalar> {
    (-60i64..=60, 1i64..=6).prop_map(|(n, d)| ratio(n, d))
}

fn point() -> impl Strategy<Value = Point> {
    (scalar(), scalar()).prop_map(|(x, y)| Point::new(x, y))
}

fn metric() -> impl Strategy<Value = PNorm> {
    prop_oneof![(1u32..=6).prop_map(PNorm::Finite), Just(PNorm::Infinity)]
}

fn point_set(max: usize) -> impl Strategy<Value = PointSet> {
    prop::collection::btree_set((-20i64..=20, -20i64..=20, 1i64..=3), 2..max).prop_map(|s| {
        let mut pts: Vec<Point> = s
            .into_iter()
            .map(|(x, y, d)| Point::new(ratio(x, d), ratio(y, d)))
            .collect();
        pts.sort();
        pts.dedup();
        PointSet::new(pts).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn keys_are_symmetric(u in point(), v in point(), m in metric()) {
        prop_assert_eq!(lp_distance_key(&u, &v, m), lp_distance_key(&v, &u, m));
        prop_assert_eq!(compare_distances((&u, &v), (&v, &u), m), Ordering::Equal);
    }

    #[test]
    fn rotation_is_an_isometry(u in point(), v in point()) {
        let p = PointSet::new(if u == v { vec![u] } else { vec![u, v] }).unwrap();
        let q = l1_to_linf_transform(&p);
        let n = p.len();
        prop_assert_eq!(
            lp_distance_key(p.get(0), p.get(n - 1), PNorm::Finite(1)).key,
            lp_distance_key(q.get(0), q.get(n - 1), PNorm::Infinity).key
        );
    }

    #[test]
    fn census_accounts_for_every_pair(p in point_set(30), m in metric()) {
        let c = distance_census(&p, m).unwrap();
        let n = p.len() as u64;
        prop_assert_eq!(c.histogram.values().sum::<u64>(), n * (n - 1) / 2);
        prop_assert_eq!(c.distinct_count, c.histogram.len());
        prop_assert!(c.per_point.iter().all(|&d| d <= c.distinct_count));
        prop_assert_eq!(c.t_max, *c.per_point.iter().max().unwrap());
    }

    #[test]
    fn energy_matches_quadruples(a in prop::collection::btree_set(-25i64..=25, 1..18)) {
        let a: Vec<Scalar> = a.into_iter().map(|x| ratio(x, 2)).collect();
        let rep = difference_energy(&a).unwrap();
        let n = a.len() as u64;
        prop_assert_eq!(rep.energy, energy_bruteforce(&a));
        prop_assert!(rep.energy >= n * n && rep.energy <= n * n * n);
    }

    #[test]
    fn fitted_progressions_contain_the_set(a in prop::collection::btree_set(scalar(), 1..12)) {
        let a: Vec<Scalar> = a.into_iter().collect();
        if let Some(g) = gap_fit(&a, 3, 4 * a.len() as u64).unwrap() {
            prop_assert!(g.contains_all(&a));
            prop_assert!(g.size() <= 4 * a.len() as u64);
        }
    }

    #[test]
    fn midpoint_lies_on_the_bisector(u in point(), v in point(), p in 2u32..=6) {
        prop_assume!(u != v);
        let b = build_bisector(&u, &v, p).unwrap();
        prop_assert!(b.contains(&u.midpoint(&v)));
        prop_assert!(!b.contains(&u));
    }

    #[test]
    fn point_files_round_trip(p in point_set(20)) {
        prop_assert_eq!(points_from_json(&points_to_json(&p)).unwrap(), p);
    }
}
