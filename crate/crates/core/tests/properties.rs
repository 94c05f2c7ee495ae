mod common;

use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;
use scpizza::geometry::clip::{area, clip_halfplane, intersect_convex};
use scpizza::geometry::normalize_instance;
use scpizza::measure::{compile, region_mass_oracle};
use scpizza::numeric::{int, to_f64, Rational};
use scpizza::reductions::{path_to_ch_cuts, random_instance as random_ch, reduce_overlapping, verify_ch};
use scpizza::sc_path::{antipode, solution_to_path, sphere_to_solution};
use scpizza::simplicial::antipodal_zero;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn conservation(seed in any::<u64>(), colors in 1usize..=3, k in 0usize..=4) {
        let mut r = rng(seed);
        let inst = random_instance(&mut r, colors, 3);
        let p = random_sphere_point(&mut r, k);
        let ci = compile(&inst).unwrap();
        let f = ci.bu_eval(&p).unwrap();
        let g = ci.bu_eval(&antipode(&p)).unwrap();
        for ((a, b), t) in f.iter().zip(&g).zip(inst.totals()) {
            prop_assert_eq!(a + b, t);
        }
    }

    #[test]
    fn evaluator_matches_oracle(seed in any::<u64>(), colors in 1usize..=3, k in 0usize..=4) {
        let mut r = rng(seed);
        let inst = random_instance(&mut r, colors, 3);
        let p = random_sphere_point(&mut r, k);
        let ci = compile(&inst).unwrap();
        let f = ci.bu_eval(&p).unwrap();
        let oracle = region_mass_oracle(&inst, &sphere_to_solution(&p).unwrap()).unwrap();
        let pf: Vec<f64> = p.iter().map(to_f64).collect();
        let ff = ci.bu_eval_f64(&pf).unwrap();
        for ((x, m), y) in f.iter().zip(&oracle).zip(&ff) {
            prop_assert_eq!(x, &m.a);
            prop_assert!((y - to_f64(x)).abs() <= 1e-12);
        }
    }

    #[test]
    fn decoded_paths_respect_the_budget(seed in any::<u64>(), k in 0usize..=6) {
        let p = random_sphere_point(&mut rng(seed), k);
        let path = solution_to_path(&sphere_to_solution(&p).unwrap()).unwrap();
        prop_assert!(path.turns() <= k);
    }

    #[test]
    fn ch_values_survive_the_overlapping_reduction(seed in any::<u64>(), n in 1usize..=4) {
        let mut r = rng(seed);
        let ch = random_ch(&mut r, n, 12, false);
        let (inst, meta) = reduce_overlapping(&ch).unwrap();
        let p = random_sphere_point(&mut r, n - 1);
        let sol = sphere_to_solution(&p).unwrap();
        let cuts = path_to_ch_cuts(&meta, &sol).unwrap();
        prop_assert!(cuts.cuts.len() <= n);
        let rep = verify_ch(&ch, &cuts, &int(1)).unwrap();
        let masses = region_mass_oracle(&inst, &sol).unwrap();
        for (m, plus) in masses.iter().zip(&rep.plus) {
            prop_assert_eq!(&m.a, plus);
        }
    }

    #[test]
    fn clipping_preserves_area(seed in any::<u64>(), a in -8i64..=8, b in -8i64..=8, c in -8i64..=8) {
        prop_assume!(a != 0 || b != 0);
        let mut r = rng(seed);
        let t = random_triangle(&mut r, false);
        let poly = vec![t.a.clone(), t.b.clone(), t.c.clone()];
        let (a, b, c) = (int(a), int(b), Rational::new(c.into(), 8.into()));
        let lo = area(&clip_halfplane(&poly, &a, &b, &c, true));
        let hi = area(&clip_halfplane(&poly, &a, &b, &c, false));
        prop_assert_eq!(lo + hi, t.area());

        let u = random_triangle(&mut r, false);
        let other = vec![u.a.clone(), u.b.clone(), u.c.clone()];
        let ab = area(&intersect_convex(&poly, &other));
        prop_assert_eq!(&ab, &area(&intersect_convex(&other, &poly)));
        prop_assert!(ab <= t.area() && ab <= u.area() && !ab.is_negative());
    }

    #[test]
    fn normalization_is_idempotent(seed in any::<u64>()) {
        let inst = random_instance(&mut rng(seed), 2, 2);
        let (once, _) = normalize_instance(&inst).unwrap();
        let (twice, _) = normalize_instance(&once).unwrap();
        prop_assert_eq!(once.totals(), inst.totals());
        prop_assert_eq!(twice, once);
    }

    #[test]
    fn path_following_finds_zeros(m in prop::array::uniform9(-1.0f64..1.0), shift in prop::array::uniform3(-0.8f64..0.8)) {
        // Invertible linear part plus a shift that vanishes on the boundary.
        let a = [[2.0 + m[0], m[1], m[2]], [m[3], 2.0 + m[4], m[5]], [m[6], m[7], 2.0 + m[8]]];
        let mut g = |y: &[f64]| {
            let bump = 1.0 - y.iter().fold(0.0f64, |s, v| s.max(v.abs()));
            (0..3).map(|i| (0..3).map(|j| a[i][j] * y[j]).sum::<f64>() + shift[i] * bump).collect::<Vec<f64>>()
        };
        let t = antipodal_zero(3, 25, 200_000, 0.0, &mut g);
        prop_assert!(t.is_some());
        let v = g(&t.unwrap().point);
        prop_assert!(v.iter().all(|x| x.abs() < 0.2), "{:?}", v);
    }
}

#[test]
fn sphere_points_are_exact() {
    let mut r = rng(0);
    for k in 0..6 {
        let p = random_sphere_point(&mut r, k);
        let norm = p.iter().fold(Rational::zero(), |s, v| s + v.abs());
        assert_eq!(norm, int(k as i64 + 1));
    }
}
