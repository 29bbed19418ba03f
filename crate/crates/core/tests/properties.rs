//! Invariants checked on random inputs, each against an independent oracle.

use std::f64::consts::TAU;

use peakfn_core::cconvex::{normal_ray_profile, support_complex, weak_peak, ConvexBody};
use peakfn_core::domain::Domain;
use peakfn_core::numerics::mobius::{mobius_distance, poincare_from_mobius};
use peakfn_core::numerics::par::Exec;
use peakfn_core::numerics::{roots, ToleranceProfile, C64};
use peakfn_core::polytope::{HalfSpace, Polyhedron};
use peakfn_core::reinhardt::{decompose, dirichlet, envelope, is_extreme, laurent_peak, LaurentParams, LogPolyhedron, ReinhardtDomain};
use peakfn_core::sympoly::{self, carath_lb_with, char_poly, classify_batch};
use peakfn_core::transfer::ProperMap;
use peakfn_core::verify::{verify_peak, VerifyConfig};
use proptest::prelude::*;

fn tol() -> ToleranceProfile {
    ToleranceProfile::default()
}

fn complex_in(radius: f64) -> impl Strategy<Value = C64> {
    (0.0..radius, 0.0..TAU).prop_map(|(r, t)| C64::from_polar(r, t))
}

fn disc_point() -> impl Strategy<Value = C64> {
    complex_in(0.99)
}

fn max_dist(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max)
}

fn ball() -> ConvexBody {
    ConvexBody::ball(vec![C64::new(0.3, -0.2), C64::new(0.0, 0.5)], 1.5).unwrap()
}

fn ball_boundary_point(theta: &[f64; 3]) -> Vec<C64> {
    // Hopf-style parametrisation of the sphere S^3 of radius 1.5.
    let (a, b, c) = (theta[0] / 4.0, theta[1], theta[2]);
    let u = C64::from_polar(1.5 * a.cos(), b);
    let v = C64::from_polar(1.5 * a.sin(), c);
    vec![C64::new(0.3, -0.2) + u, C64::new(0.0, 0.5) + v]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn roots_reproduce_coefficients(l in prop::collection::vec(complex_in(2.0), 1..=5)) {
        let z = sympoly::sym(&l);
        let r = roots(&char_poly(&z).unwrap(), &tol()).unwrap();
        let back = sympoly::sym(&r);
        let scale = z.iter().map(|x| x.norm()).fold(1.0, f64::max);
        prop_assert!(max_dist(&back, &z) <= 1e-8 * scale);
    }

    #[test]
    fn mobius_is_a_metric(a in disc_point(), b in disc_point(), c in disc_point()) {
        let ab = mobius_distance(a, b).unwrap();
        let bc = mobius_distance(b, c).unwrap();
        let ac = mobius_distance(a, c).unwrap();
        prop_assert!((ab - mobius_distance(b, a).unwrap()).abs() <= 1e-12);
        // Strong triangle inequality of the pseudo-hyperbolic distance.
        prop_assert!(ac <= (ab + bc) / (1.0 + ab * bc) + 1e-12);
        prop_assert!(poincare_from_mobius(ac) <= poincare_from_mobius(ab) + poincare_from_mobius(bc) + 1e-9);
    }

    #[test]
    fn dirichlet_contract(l in prop::collection::vec(-10.0f64..10.0, 1..=3), mu in 1u64..=8) {
        let (alpha, k) = dirichlet(&l, mu);
        prop_assert!(k >= 1 && (k as u64) <= mu.pow(l.len() as u32));
        for (lj, aj) in l.iter().zip(&alpha) {
            prop_assert!((lj - *aj as f64 / k as f64).abs() <= 1.0 / (mu as f64 * k as f64) + 1e-12);
        }
    }

    #[test]
    fn box_extreme_points_are_corners(
        lo in prop::collection::vec(-3.0f64..-0.5, 2..=3),
        w in prop::collection::vec(0.2f64..2.0, 3),
        s in prop::collection::vec(0.0f64..1.0, 3),
        mask in 0u32..8,
    ) {
        let hi: Vec<f64> = lo.iter().zip(&w).map(|(l, w)| l + w).collect();
        let p = Polyhedron::boxed(&lo, &hi);
        let corner: Vec<f64> = (0..lo.len()).map(|j| if mask >> j & 1 == 1 { hi[j] } else { lo[j] }).collect();
        prop_assert!(is_extreme(&p, &corner, &tol()).unwrap());
        // Freeing one coordinate of a corner gives an edge point.
        let mut edge = corner.clone();
        edge[0] = lo[0] + (0.05 + 0.9 * s[0]) * w[0];
        prop_assert!(!is_extreme(&p, &edge, &tol()).unwrap());
    }

    #[test]
    fn decompose_reconstructs(
        k in 3usize..=7,
        offsets in prop::collection::vec(0.5f64..1.5, 7),
        shift in 0.0f64..TAU,
        u in 0.0f64..0.9,
        v in 0.0f64..TAU,
    ) {
        let rows = (0..k)
            .map(|i| {
                let a = shift + TAU * i as f64 / k as f64;
                HalfSpace::new(vec![a.cos(), a.sin()], offsets[i])
            })
            .collect();
        let p = Polyhedron::new(2, rows).unwrap();
        // The inradius is at least the smallest offset.
        let x = vec![0.5 * u * v.cos(), 0.5 * u * v.sin()];
        let d = decompose(&p, &x, &tol()).unwrap();
        let r = d.reconstruct();
        prop_assert!(((r[0] - x[0]).powi(2) + (r[1] - x[1]).powi(2)).sqrt() <= 1e-9);
        let total: f64 = d.weights.iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-9);
        for w in &d.vertices {
            prop_assert!(is_extreme(&p, w, &tol()).unwrap());
        }
    }

    #[test]
    fn fibers_map_back(z in prop::collection::vec(disc_point(), 2..=3), k in prop::collection::vec(1u32..=3, 3)) {
        let n = z.len();
        let maps = [
            ProperMap::Symmetrization { n },
            ProperMap::PowerMap { exponents: k[..n].to_vec() },
            ProperMap::Composition { maps: vec![ProperMap::PowerMap { exponents: k[..n].to_vec() }, ProperMap::Symmetrization { n }] },
        ];
        for m in maps {
            let w = m.apply(&z).unwrap();
            let fiber = m.fiber(&w, &tol()).unwrap();
            prop_assert_eq!(fiber.len(), m.multiplicity());
            prop_assert!(fiber.iter().any(|x| max_dist(x, &z) <= 1e-6));
            for x in &fiber {
                prop_assert!(max_dist(&m.apply(x).unwrap(), &w) <= 1e-8);
            }
        }
    }

    #[test]
    fn weak_peak_scaling_covariance(theta in prop::array::uniform3(0.1f64..6.0), r in 0.2f64..5.0, s in 0.0f64..0.99) {
        let body = ball();
        let a = ball_boundary_point(&theta);
        let wp = weak_peak(&body, &a, &tol()).unwrap();
        let scaled = body.scaled(r).unwrap();
        let ra: Vec<C64> = a.iter().map(|x| x * r).collect();
        let wr = weak_peak(&scaled, &ra, &tol()).unwrap();
        let center = [C64::new(0.3, -0.2), C64::new(0.0, 0.5)];
        let z: Vec<C64> = a.iter().zip(&center).map(|(x, c)| c + (x - c) * s).collect();
        let rz: Vec<C64> = z.iter().map(|x| x * r).collect();
        let lhs = wr.function.evaluate(&rz).unwrap();
        let rhs = wp.function.evaluate(&z).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-9, "{lhs} vs {rhs}; nu {:?} vs {:?}; d {} vs {}", wp.nu, wr.nu, wp.diameter, wr.diameter);
    }
}

#[test]
fn laurent_log_identity_on_random_points() {
    let d = ReinhardtDomain::single(LogPolyhedron::boxed(&[-1.0, -1.0], &[0.0, 0.0]).unwrap(), vec![false; 2]).unwrap();
    let z0 = vec![C64::new(1.0, 0.0); 2];
    let mut rng = peakfn_core::numerics::sampling::rng(5);
    for u_radius in [0.3, 0.001] {
        let p = LaurentParams { samples: 1000, u_radius, ..Default::default() };
        let o = laurent_peak(&d, &z0, &p, &tol()).unwrap();
        for x in d.pieces[0].sample_log(&mut rng, 100) {
            let lhs = o.monomial.log_modulus(&x);
            let rhs = o.trace.log_identity_rhs(&x);
            assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs()), "{lhs} vs {rhs} at {x:?}");
        }
    }
}

#[test]
fn envelope_is_idempotent_and_contains_domain() {
    let mut rng = peakfn_core::numerics::sampling::rng(6);
    use rand::Rng;
    for _ in 0..20 {
        let a_lo = [rng.gen_range(-3.0..-1.0), rng.gen_range(-3.0..-1.0)];
        let b_lo = [rng.gen_range(-3.0..-1.0), rng.gen_range(-3.0..-1.0)];
        let a = LogPolyhedron::boxed(&a_lo, &[a_lo[0] + 0.8, a_lo[1] + 0.8]).unwrap();
        let b = LogPolyhedron::boxed(&b_lo, &[b_lo[0] + 0.8, b_lo[1] + 0.8]).unwrap();
        let d = ReinhardtDomain::union_of(vec![a, b], vec![false; 2]).unwrap();
        let e = envelope(&d).unwrap();
        assert_eq!(envelope(&e).unwrap(), e);
        for x in d.pieces.iter().flat_map(|p| p.sample_log(&mut rng, 200)) {
            assert!(e.log_closure_contains(&x, 1e-9));
        }
        // Midpoints of the two pieces lie in the hull.
        let m = [(a_lo[0] + b_lo[0]) / 2.0 + 0.4, (a_lo[1] + b_lo[1]) / 2.0 + 0.4];
        assert!(e.log_closure_contains(&m, 1e-9));
    }
}

#[test]
fn weak_peak_half_plane_and_bounds() {
    let t = tol();
    let cube = ConvexBody::cube(2);
    let cube_points = [
        vec![C64::new(1.0, 0.2), C64::new(-0.3, 0.5)],
        vec![C64::new(1.0, 1.0), C64::new(0.0, 0.0)],
        vec![C64::new(-0.1, 0.4), C64::new(0.7, -1.0)],
    ];
    let cases: Vec<(ConvexBody, Vec<C64>)> = cube_points
        .into_iter()
        .map(|a| (cube.clone(), a))
        .chain([(ball(), ball_boundary_point(&[1.0, 2.0, 3.0])), (ball(), ball_boundary_point(&[5.0, 0.5, 4.0]))])
        .collect();
    for (body, a) in cases {
        let nu = support_complex(&body, &a, &t).unwrap();
        let wp = weak_peak(&body, &a, &t).unwrap();
        for z in body.sample_interior(10_000, 7).points {
            let pair: C64 = z.iter().zip(&a).zip(&nu).map(|((z, a), n)| (z - a) * n.conj()).sum();
            assert!(pair.re < 0.0, "Re<z - a, nu> = {} at {z:?}", pair.re);
            assert!(wp.function.evaluate(&z).unwrap().norm() < 1.0);
        }
        // Approaching a along the inward normal the modulus increases.
        let ts = [1e-1, 1e-2, 1e-3, 1e-4, 1e-6, 1e-8, 1e-10, 1e-12, 1e-14];
        let prof = normal_ray_profile(&wp, &a, &ts, &t).unwrap();
        assert!(prof.windows(2).all(|w| w[1] >= w[0]), "{prof:?}");
        assert!(prof.iter().all(|&v| v < 1.0));
    }
}

#[test]
fn sweeps_are_deterministic_across_exec_modes() {
    let t = tol();
    let pts = sympoly::sample_shell(3, 500, 0.5, 9).points;
    let seq = classify_batch(&pts, &t, Exec::Sequential);
    let par = classify_batch(&pts, &t, Exec::Parallel);
    assert_eq!(seq, par);

    let a = vec![C64::new(2.0, 0.0), C64::new(1.0, 0.0)];
    let f = sympoly::peak_at(&a, &t).unwrap();
    let d = Domain::SymmetrizedPolydisc { n: 2 };
    let cfg = VerifyConfig { interior: 2000, boundary: 200, seed: 3, ..VerifyConfig::default() };
    let r1 = verify_peak(&f, &a, &d, &cfg, &t, Exec::Sequential);
    let r2 = verify_peak(&f, &a, &d, &cfg, &t, Exec::Parallel);
    let r3 = verify_peak(&f, &a, &d, &cfg, &t, Exec::Parallel);
    assert_eq!(serde_json::to_string(&r1).unwrap(), serde_json::to_string(&r2).unwrap());
    assert_eq!(serde_json::to_string(&r2).unwrap(), serde_json::to_string(&r3).unwrap());

    let z = sympoly::sym(&[C64::new(0.5, 0.1), C64::new(-0.2, 0.3), C64::new(0.0, -0.6)]);
    let w = sympoly::sym(&[C64::new(0.1, 0.0), C64::new(0.7, 0.2), C64::new(-0.4, -0.4)]);
    assert_eq!(carath_lb_with(&z, &w, 32, &t, Exec::Sequential).unwrap(), carath_lb_with(&z, &w, 32, &t, Exec::Parallel).unwrap());
}

#[test]
fn carath_lb_grows_under_grid_refinement() {
    let t = tol();
    let mut rng = peakfn_core::numerics::sampling::rng(10);
    for n in 2..=3 {
        for _ in 0..10 {
            let l1: Vec<C64> = (0..n).map(|_| peakfn_core::numerics::sampling::disc_point(&mut rng, 0.95)).collect();
            let l2: Vec<C64> = (0..n).map(|_| peakfn_core::numerics::sampling::disc_point(&mut rng, 0.95)).collect();
            let (z, w) = (sympoly::sym(&l1), sympoly::sym(&l2));
            // Equally spaced angle grids nest under doubling.
            let b: Vec<f64> = [16, 32, 64].iter().map(|&g| carath_lb_with(&z, &w, g, &t, Exec::default()).unwrap().mobius).collect();
            assert!(b[0] <= b[1] + 1e-15 && b[1] <= b[2] + 1e-15, "{b:?}");
        }
    }
}
