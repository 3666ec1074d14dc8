use grushin::curves::{AdmissibilityVerdict, SOLVER_REL_TOL};
use grushin::geometry::{meyerson_coord_inv, PlanePoint};
use grushin::map::{compose_maps, entire_scale};
use grushin::topology::fixtures::{staircase, staircase_prime};
use grushin::topology::{side_components, ObstructionOutcome};
use grushin::*;
use num_rational::BigRational;
use proptest::prelude::*;

fn alpha(v: f64) -> Alpha<f64> {
    Alpha::new(v).unwrap()
}

fn pt(x: f64, y: f64) -> Point {
    GrushinPoint::new(x, y)
}

/// `z + 0.1 z³`, axis-preserving while `|Im z| < √(10/3)`.
fn cubic_poly() -> Expr {
    HoloExpr::odd_real_poly(vec![1.0, 0.1], PlaneRect::new(-1.0, 1.0, -1.7, 1.7).unwrap()).unwrap()
}

fn square() -> Domain {
    RectilinearDomain::new(vec![Rect::new(-1.0, 1.0, -1.0, 1.0)]).unwrap()
}

#[test]
fn meyerson_round_trip_on_grid() {
    for al in [0.5, 1.0, 2.0, 3.0] {
        let a = alpha(al);
        let mut worst: f64 = 0.0;
        for i in 0..100 {
            for j in 0..100 {
                let p = pt(-10.0 + 20.0 * i as f64 / 99.0, -10.0 + 20.0 * j as f64 / 99.0);
                let back = meyerson_inv(a, meyerson(a, p));
                let q = PlanePoint::new(p.x, p.y);
                let fwd = meyerson(a, meyerson_inv(a, q));
                worst = worst.max(back.euclid_dist(&p)).max((fwd.u - q.u).abs().max((fwd.v - q.v).abs()));
                assert_eq!(meyerson(a, p).u.signum(), if p.x == 0.0 { 0.0f64.signum() } else { p.x.signum() });
            }
        }
        assert!(worst <= 1e-12 * 10.0, "α = {al}: {worst}");
    }
    assert_eq!(meyerson(alpha(1.5), pt(0.0, 4.0)).u, 0.0);
}

#[test]
fn identity_and_dilations_have_zero_wbar() {
    for al in [0.5, 1.0, 2.0] {
        let a = alpha(al);
        for lambda in [0.5f64, 2.0, 10.0] {
            let g = entire_map(a, lambda.powf(al + 1.0), 0.0).unwrap();
            for p in [pt(0.3, -1.0), pt(-2.0, 0.7), pt(1.5, 1.5)] {
                let (_, wbar) = wirtinger(a, &analytic_jet(&GrushinMap::identity(a), p).unwrap(), p);
                assert_eq!(wbar.norm(), 0.0);
                let (w, wbar) = wirtinger(a, &analytic_jet(&g, p).unwrap(), p);
                if lambda == 2.0 && al.fract() == 0.0 {
                    assert_eq!(wbar.norm(), 0.0);
                } else {
                    assert!(wbar.norm() <= 4.0 * f64::EPSILON * w.norm());
                }
            }
        }
    }
}

#[test]
fn composition_and_inversion_stay_conformal() {
    for al in [0.5, 1.0, 2.0] {
        let a = alpha(al);
        let jouk_domain =
            RectilinearDomain::new(vec![Rect::new(meyerson_coord_inv(a, 1.2), meyerson_coord_inv(a, 3.0), -1.0, 1.0)])
                .unwrap();
        let jouk = conjugate(a, HoloExpr::joukovski(), Some(jouk_domain.clone())).unwrap();
        let affine = conjugate(a, HoloExpr::real_affine(2.0, 0.5).unwrap(), None).unwrap();
        let composed = compose_maps(&affine, &jouk).unwrap();
        assert!(verify_conformal(a, &composed, &jouk_domain, 24).unwrap().verdict.is_pass());
        let inverse = invert_map(&conjugate(a, HoloExpr::real_affine(3.0, -1.0).unwrap(), None).unwrap()).unwrap();
        assert!(verify_conformal(a, &inverse, &square(), 24).unwrap().verdict.is_pass());
        let entire = compose_maps(&entire_map(a, -2.0, 1.0).unwrap(), &entire_map(a, 0.5, 3.0).unwrap()).unwrap();
        let report = verify_conformal(a, &entire, &square(), 24).unwrap();
        assert!(report.verdict.is_pass());
        assert_eq!(report.side_swap, Some(true));
    }
}

#[test]
fn rotation_form_on_passing_maps() {
    for al in [0.5, 1.0, 2.0] {
        let a = alpha(al);
        for expr in [HoloExpr::identity(), HoloExpr::real_affine(3.0, -1.0).unwrap(), cubic_poly()] {
            let g = conjugate(a, expr, None).unwrap();
            let r = verify_conformal(a, &g, &square(), 40).unwrap();
            assert!(r.verdict.is_pass(), "{:?}", r.verdict);
            assert!(r.max_rotation_defect <= 1e-8);
            assert!(r.min_det_dalpha > 0.0);
        }
    }
}

#[test]
fn shifted_affine_never_fails_on_wbar() {
    for al in [0.5, 1.0, 2.0] {
        for shift in [0.5, 1.0, 3.0] {
            let g = conjugate(alpha(al), HoloExpr::translate(shift, 0.0), None).unwrap();
            let r = verify_conformal(alpha(al), &g, &square(), 32).unwrap();
            assert_eq!(r.verdict, Verdict::Fail(vec![grushin::verify::FailReason::ZeroSetDiscrepancy]));
        }
    }
}

fn arb_points(max: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), 2..max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn length_bounds_x_variation(al in 0.2..3.0f64, pts in arb_points(8)) {
        let curve = ParamCurve::polyline_uniform(pts.iter().map(|&(x, y)| pt(x, y)).collect()).unwrap();
        let r = grushin_length(alpha(al), &curve);
        prop_assert!(r.infinite || r.value >= r.x_variation);
        let var: f64 = pts.windows(2).map(|w| (w[1].0 - w[0].0).abs()).sum();
        prop_assert!((r.x_variation - var).abs() <= 1e-12 * (1.0 + var));
    }

    #[test]
    fn closed_form_length_bounds_x_variation(al in 0.2..3.0f64, c0 in -1.0..1.0f64, c1 in -2.0..2.0f64, c3 in -2.0..2.0f64) {
        let curve = ParamCurve::graph(vec![c0, c1, 0.0, c3], -1.0, 1.5).unwrap();
        let r = grushin_length(alpha(al), &curve);
        prop_assert!(r.infinite || r.value >= r.x_variation);
    }

    #[test]
    fn dilations_scale_polyline_lengths(al in 0.2..3.0f64, lambda in 0.1..20.0f64, pts in arb_points(6)) {
        let a = alpha(al);
        let pts: Vec<Point> = pts.iter().map(|&(x, y)| pt(x, y)).collect();
        let scaled: Vec<Point> = pts.iter().map(|&p| dilation(a, lambda, p).unwrap()).collect();
        let l0 = grushin_length(a, &ParamCurve::polyline_uniform(pts).unwrap());
        let l1 = grushin_length(a, &ParamCurve::polyline_uniform(scaled).unwrap());
        prop_assert_eq!(l0.infinite, l1.infinite);
        if !l0.infinite {
            prop_assert!((l1.value - lambda * l0.value).abs() <= 1e-9 * lambda * l0.value);
        }
    }

    #[test]
    fn admissible_curves_stay_admissible(c1 in -1.0..1.0f64, c2 in 0.0..0.5f64, a in 0.5..3.0f64, b in -0.2..0.2f64) {
        // Pushforwards are polylines, which meet the axis with nonzero vertical
        // slope; such crossings are admissible only for α < 1.
        let al = alpha(0.5);
        let curve = ParamCurve::graph(vec![0.0, c1, c2], -1.0, 1.0).unwrap();
        let before = admissibility_check(al, &curve, 8).unwrap();
        prop_assert_eq!(before.verdict, AdmissibilityVerdict::Admissible);
        for g in [entire_map(al, a, b).unwrap(), conjugate(al, cubic_poly(), None).unwrap()] {
            prop_assert!(verify_conformal(al, &g, &square(), 16).unwrap().verdict.is_pass());
            let pushed = pushforward(&g, &curve, 401).unwrap();
            let after = admissibility_check(al, &pushed, 8).unwrap();
            prop_assert_eq!(after.verdict, AdmissibilityVerdict::Admissible, "{:?}", after);
        }
    }

    #[test]
    fn entire_classification_round_trip(al in 0.1..4.0f64, a in 0.05..20.0f64, neg in any::<bool>(), b in -10.0..10.0f64) {
        let a = if neg { -a } else { a };
        let g = conjugate(alpha(al), HoloExpr::real_affine(a, b).unwrap(), None).unwrap();
        let (ra, rb) = classify_entire(&g, &grushin::map::default_probe_grid(), 1e-12).unwrap();
        prop_assert!((ra - a).abs() <= 1e-12 * (1.0 + a.abs()));
        prop_assert!((rb - b).abs() <= 1e-12 * (1.0 + b.abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn distance_symmetry_and_triangle(al in prop::sample::select(vec![0.5, 1.0, 2.0]),
                                      p in (-2.0..2.0f64, -2.0..2.0f64),
                                      q in (-2.0..2.0f64, -2.0..2.0f64),
                                      r in (-2.0..2.0f64, -2.0..2.0f64)) {
        let a = alpha(al);
        let d = |u: (f64, f64), v: (f64, f64)| cc_distance_upper(a, pt(u.0, u.1), pt(v.0, v.1), 17, 400, 9).unwrap().distance_upper;
        let (pq, qp) = (d(p, q), d(q, p));
        prop_assert!((pq - qp).abs() <= SOLVER_REL_TOL * pq.max(qp));
        let (qr, pr) = (d(q, r), d(p, r));
        prop_assert!(pr <= (pq + qr) * (1.0 + 2.0 * SOLVER_REL_TOL));
        prop_assert!(pq >= (p.0 - q.0).abs());
    }
}

#[test]
fn distance_is_monotone_in_budget_and_doubling_knots() {
    let a = alpha(1.0);
    let (p, q) = (pt(0.5, -1.0), pt(1.5, 2.0));
    let by_iterations: Vec<f64> =
        [10, 40, 160, 640].iter().map(|&n| cc_distance_upper(a, p, q, 17, n, 4).unwrap().distance_upper).collect();
    assert!(by_iterations.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)), "{by_iterations:?}");
    let by_knots: Vec<f64> =
        [2, 3, 5, 9, 17].iter().map(|&k| cc_distance_upper(a, p, q, k, 600, 4).unwrap().distance_upper).collect();
    assert!(by_knots.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)), "{by_knots:?}");
}

#[test]
fn distance_scales_under_dilation() {
    for al in [0.5, 2.0] {
        let a = alpha(al);
        let (p, q) = (pt(0.5, -1.0), pt(-1.0, 1.0));
        let base = cc_distance_upper(a, p, q, 9, 400, 2).unwrap().distance_upper;
        for lambda in [0.5, 3.0] {
            let (dp, dq) = (dilation(a, lambda, p).unwrap(), dilation(a, lambda, q).unwrap());
            let scaled = cc_distance_upper(a, dp, dq, 9, 400, 2).unwrap().distance_upper;
            assert!((scaled - lambda * base).abs() <= SOLVER_REL_TOL * lambda * base, "{scaled} vs {}", lambda * base);
        }
    }
}

fn rat(v: i64) -> BigRational {
    BigRational::from_integer(v.into())
}

#[test]
fn topology_counts_invariant_under_dilation_and_translation() {
    for d in [staircase(), staircase_prime()] {
        let (axis, sides) = (axis_components(&d).len(), side_components(&d).len());
        // δ_λ with λ = 2, α = 1 scales x by 2 and y by 4.
        for moved in [d.scaled(&rat(2), &rat(4), &rat(0)).unwrap(), d.scaled(&rat(1), &rat(1), &rat(7)).unwrap()] {
            assert_eq!(axis_components(&moved).len(), axis);
            assert_eq!(side_components(&moved).len(), sides);
            assert!(!obstruction_check(&d, &moved, true).unwrap().is_obstructed());
        }
    }
}

#[test]
fn obstruction_is_reflexive_and_symmetric() {
    let (a, b) = (staircase(), staircase_prime());
    let single = RectilinearDomain::new(vec![Rect::new(rat(-1), rat(1), rat(0), rat(1))]).unwrap();
    let domains = [a, b, single];
    for d1 in &domains {
        assert!(!obstruction_check(d1, d1, false).unwrap().is_obstructed());
        for d2 in &domains {
            for swap in [false, true] {
                let forward = obstruction_check(d1, d2, swap).unwrap().is_obstructed();
                let backward = obstruction_check(d2, d1, swap).unwrap().is_obstructed();
                assert_eq!(forward, backward);
            }
        }
    }
    let off_axis = RectilinearDomain::new(vec![Rect::new(rat(1), rat(2), rat(0), rat(1))]).unwrap();
    let outcome = obstruction_check(&domains[2], &off_axis, true).unwrap();
    assert!(matches!(outcome, ObstructionOutcome::Obstruction { .. }));
}

#[test]
fn conformal_images_are_never_obstructed() {
    let omega = staircase().to_f64();
    for al in [0.5, 1.0, 2.0] {
        let a = alpha(al);
        for (ca, cb) in [(2.0, 1.0), (-0.5, 0.0), (8.0, -3.0)] {
            let g = entire_map(a, ca, cb).unwrap();
            assert!(verify_conformal(a, &g, &omega, 12).unwrap().verdict.is_pass());
            let s = entire_scale(a, ca);
            let image = RectilinearDomain::new(
                omega
                    .rects()
                    .iter()
                    .map(|r| {
                        let (x0, x1) = if s > 0.0 { (s * r.xmin, s * r.xmax) } else { (s * r.xmax, s * r.xmin) };
                        let (y0, y1) = if ca > 0.0 {
                            (ca * r.ymin + cb, ca * r.ymax + cb)
                        } else {
                            (ca * r.ymax + cb, ca * r.ymin + cb)
                        };
                        Rect::new(x0, x1, y0, y1)
                    })
                    .collect(),
            )
            .unwrap();
            assert!(!obstruction_check(&omega, &image, true).unwrap().is_obstructed());
        }
    }
}
