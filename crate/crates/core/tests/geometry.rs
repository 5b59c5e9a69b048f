mod common;

use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::Rng;

use common::{brute_hull, frac, random_nonneg, random_plf, random_points, rat, rng};
use ramstab::polygeom::{below_line, lower_hull, lower_hull_finite};
use ramstab::exactval::Extended;
use ramstab::{PLFunction, Rational};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn hull_matches_brute_force(seed in any::<u64>(), n in 3usize..14) {
        let pts = random_points(&mut rng(seed), n);
        prop_assume!(pts.len() >= 2);
        let hull = lower_hull_finite(&pts).unwrap();
        prop_assert_eq!(hull.vertices(), &brute_hull(&pts)[..]);
    }

    #[test]
    fn infinite_points_are_ignored(seed in any::<u64>(), n in 3usize..10, drop in 0usize..10) {
        let pts = random_points(&mut rng(seed), n);
        prop_assume!(pts.len() >= 3);
        let drop = drop % pts.len();
        let ext: Vec<(Rational, Extended<Rational>)> = pts
            .iter()
            .enumerate()
            .map(|(i, (x, y))| (x.clone(), if i == drop { Extended::Infinity } else { Extended::Finite(y.clone()) }))
            .collect();
        let mut kept = pts.clone();
        kept.remove(drop);
        prop_assert_eq!(lower_hull(&ext).unwrap(), lower_hull_finite(&kept).unwrap());
    }

    #[test]
    fn copolygon_has_one_vertex_per_segment(seed in any::<u64>(), n in 3usize..14) {
        let pts: Vec<(Rational, Rational)> = random_points(&mut rng(seed), n)
            .into_iter()
            .map(|(x, y)| (x + Rational::one(), y))
            .collect();
        prop_assume!(pts.len() >= 2);
        let hull = lower_hull_finite(&pts).unwrap();
        let co = hull.copolygon().unwrap();
        prop_assert_eq!(co.vertices().len(), hull.len() - 1);
        // the dual is t -> min_i (y_i + x_i t)
        let mut r = rng(seed ^ 0x5eed);
        for _ in 0..10 {
            let t = frac(r.gen_range(0..200), r.gen_range(1..9));
            let want = pts.iter().map(|(x, y)| y + x * &t).min().unwrap();
            prop_assert_eq!(co.evaluate(&t).unwrap(), want);
        }
    }

    /// Whether the middle of three level-`n` limiting points lies below the
    /// chord of the outer two does not depend on `n`.
    #[test]
    fn vertex_predicate_is_level_independent(
        p in prop::sample::select(vec![2u64, 3, 5, 7]),
        exps in (2u32..5).prop_flat_map(|r| (Just(r), prop::sample::subsequence((0..=r).collect::<Vec<_>>(), 3))),
        ms in prop::array::uniform3(0i64..12),
        es in prop::array::uniform3(0u64..10_000),
        c in (1i64..=1000).prop_flat_map(|d| (-d..=d, Just(d))),
    ) {
        let (r, exps) = exps;
        let q = p.pow(r);
        let c = frac(c.0, c.1);
        let point = |i: usize, n: u32| {
            let t = &c / num_traits::pow(rat(q as i64), n as usize);
            (rat(p.pow(exps[i]) as i64), rat(ms[i]) + rat((es[i] % q) as i64) * t)
        };
        let at = |n: u32| below_line(&point(0, n), &point(1, n), &point(2, n)).unwrap();
        let first = at(2);
        for n in 3..=6 {
            prop_assert_eq!(at(n), first, "n = {}", n);
        }
    }

    #[test]
    fn compose_is_pointwise(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (f, g) = (random_plf(&mut r), random_plf(&mut r));
        let h = f.compose(&g).unwrap();
        for _ in 0..40 {
            let x = random_nonneg(&mut r);
            prop_assert_eq!(h.evaluate(&x).unwrap(), f.evaluate(&g.evaluate(&x).unwrap()).unwrap());
        }
        for (x, _) in f.vertices().iter().chain(g.vertices()) {
            prop_assert_eq!(h.evaluate(x).unwrap(), f.evaluate(&g.evaluate(x).unwrap()).unwrap());
        }
    }

    #[test]
    fn compose_keeps_shape(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (f, g) = (random_plf(&mut r), random_plf(&mut r));
        let h = f.compose(&g).unwrap();
        prop_assert!(h.vertices().len() <= f.vertices().len() + g.vertices().len());
        prop_assert!(h.passes_through_origin());
        let slopes = h.slopes();
        prop_assert!(slopes.iter().all(|s| *s > Rational::zero()));
        prop_assert!(slopes.windows(2).all(|w| w[1] < w[0]));
        // rebuilding from the vertex list validates the minimal representation
        prop_assert_eq!(
            PLFunction::new(h.initial_slope().clone(), h.vertices().to_vec(), h.final_slope().clone()).unwrap(),
            h
        );
    }

    #[test]
    fn compose_is_associative(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (f, g, h) = (random_plf(&mut r), random_plf(&mut r), random_plf(&mut r));
        let left = f.compose(&g).unwrap().compose(&h).unwrap();
        let right = f.compose(&g.compose(&h).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn identity_is_neutral(seed in any::<u64>()) {
        let f = random_plf(&mut rng(seed));
        let id = PLFunction::identity();
        prop_assert_eq!(f.compose(&id).unwrap(), f.clone());
        prop_assert_eq!(id.compose(&f).unwrap(), f);
    }

    #[test]
    fn affine_transform_is_a_change_of_coordinates(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = random_plf(&mut r);
        let shift = frac(r.gen_range(0..30), r.gen_range(1..5));
        let (sx, sy) = (frac(r.gen_range(1..30), r.gen_range(1..5)), frac(r.gen_range(1..30), r.gen_range(1..5)));
        let g = f.affine_transform(&shift, &sx, &sy).unwrap();
        let lift = f.initial_slope() * &shift;
        for _ in 0..20 {
            let x = random_nonneg(&mut r) + &sx * &shift;
            let want = &sy * (f.evaluate(&(&x / &sx - &shift)).unwrap() + &lift);
            prop_assert_eq!(g.evaluate(&x).unwrap(), want);
        }
    }
}

#[test]
fn preimage_inverts_evaluation() {
    let mut r = rng(7);
    for _ in 0..200 {
        let f = random_plf(&mut r);
        let x = random_nonneg(&mut r);
        assert_eq!(f.preimage(&f.evaluate(&x).unwrap()), x);
    }
}

#[test]
fn collinear_points_are_not_vertices() {
    let pts: Vec<(Rational, Rational)> = (0..6).map(|i| (rat(i), rat(10 - 2 * i))).collect();
    let hull = lower_hull_finite(&pts).unwrap();
    assert_eq!(hull.len(), 2);
}
