use anderson_lab::geometry::{self, Configuration, Cube, Interaction};
use anderson_lab::rng;
use proptest::prelude::*;
use rand::Rng;

fn config(n: usize, d: usize, span: i64) -> impl Strategy<Value = Configuration> {
    prop::collection::vec(-span..=span, n * d).prop_map(move |c| Configuration::from_flat(n, d, c).unwrap())
}

fn pair(max_n: usize, max_d: usize, span: i64) -> impl Strategy<Value = (Configuration, Configuration)> {
    (1..=max_n, 1..=max_d).prop_flat_map(move |(n, d)| (config(n, d, span), config(n, d, span)))
}

#[test]
fn sym_distance_is_a_pseudometric_on_random_triples() {
    let mut r = rng::trial_rng(2024);
    for _ in 0..10_000 {
        let (n, d) = (r.random_range(1..=4), r.random_range(1..=2));
        let mut draw = || Configuration::from_flat(n, d, (0..n * d).map(|_| r.random_range(-12..=12)).collect()).unwrap();
        let (x, y, z) = (draw(), draw(), draw());
        let ds = |a: &Configuration, b: &Configuration| geometry::sym_distance(a, b).unwrap();
        assert_eq!(ds(&x, &x), 0);
        assert_eq!(ds(&x, &y), ds(&y, &x));
        assert!(ds(&x, &z) <= ds(&x, &y) + ds(&y, &z));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn hausdorff_below_symmetrized((x, y) in pair(5, 3, 15)) {
        prop_assert!(geometry::hausdorff_distance(&x, &y).unwrap() <= geometry::sym_distance(&x, &y).unwrap());
    }

    #[test]
    fn enumeration_matches_bottleneck((x, y) in pair(6, 2, 20)) {
        let a = geometry::sym_match_enumerate(&x, &y).unwrap();
        let b = geometry::sym_match_bottleneck(&x, &y).unwrap();
        prop_assert_eq!(a.distance, b.distance);
        prop_assert_eq!(a.permutation, b.permutation);
    }

    #[test]
    fn relabelling_particles_changes_nothing((x, y) in pair(4, 2, 20), radius in 1usize..4) {
        let rev: Vec<usize> = (0..x.n_particles()).rev().collect();
        let xp = x.permuted(&rev);
        prop_assert_eq!(geometry::sym_distance(&x, &y).unwrap(), geometry::sym_distance(&xp, &y).unwrap());
        prop_assert_eq!(geometry::diam_projection(&x), geometry::diam_projection(&xp));
        prop_assert_eq!(geometry::classify_wi_si(&Cube::new(x, radius)), geometry::classify_wi_si(&Cube::new(xp, radius)));
    }

    #[test]
    fn wi_split_respects_gap(x in (2usize..=4).prop_flat_map(|n| config(n, 1, 40)), radius in 1usize..4) {
        let cube = Cube::new(x.clone(), radius);
        if geometry::classify_wi_si(&cube) == Interaction::Weak {
            let s = geometry::wi_decompose(&cube).unwrap();
            prop_assert!(!s.cluster.is_empty() && !s.rest.is_empty());
            for &i in &s.cluster {
                for &j in &s.rest {
                    let gap = (x.particle(i)[0] - x.particle(j)[0]).abs();
                    prop_assert!(gap > 3 * radius as i64);
                    prop_assert!(gap >= s.center_gap);
                }
            }
        }
    }
}

#[test]
fn far_pairs_always_weakly_separated() {
    let mut r = rng::trial_rng(99);
    let mut tested = 0;
    while tested < 2000 {
        let n = r.random_range(1..=3);
        let radius = r.random_range(1..=8);
        let span = 12 * (n * radius) as i64;
        let mut draw = || Configuration::line(&(0..n).map(|_| r.random_range(-span..=span)).collect::<Vec<_>>());
        let (x, y) = (draw(), draw());
        if geometry::sym_distance(&x, &y).unwrap() <= 4 * (n * radius) as i64 {
            continue;
        }
        tested += 1;
        let (cx, cy) = (Cube::new(x, radius), Cube::new(y, radius));
        let sep = geometry::weakly_separated(&cx, &cy).unwrap().expect("certificate for a 4NL-distant pair");
        assert!(recheck(&cx, &cy, &sep), "{cx:?} {cy:?} {sep:?}");
    }
}

// counts particles whose whole projected interval lies in Q, and checks
// that no interval straddles Q
fn recheck(cx: &Cube, cy: &Cube, sep: &geometry::Separation) -> bool {
    let count = |c: &Cube| -> Option<usize> {
        let mut k = 0;
        for p in c.center.particles() {
            let (lo, hi) = (p[0] - c.radius as i64, p[0] + c.radius as i64);
            let inside = lo >= sep.q.lo[0] && hi <= sep.q.hi[0];
            let outside = hi < sep.q.lo[0] || lo > sep.q.hi[0];
            if inside {
                k += 1;
            } else if !outside {
                return None;
            }
        }
        Some(k)
    };
    match (count(cx), count(cy)) {
        (Some(a), Some(b)) => a != b && (a, b) == sep.counts(),
        _ => false,
    }
}
