mod common;

use std::sync::Arc;

use common::Lcg;
use fraclap::assembly::{assemble, GramPair};
use fraclap::kernel::Kernel;
use fraclap::linalg::dot;
use fraclap::mesh::{make_interval_mesh, FemFunction, Mesh};
use fraclap::variational::*;

fn gram(count: usize, s: f64) -> Arc<GramPair> {
    let mesh = Arc::new(Mesh::from(make_interval_mesh(-1.0, 1.0, count).unwrap()));
    Arc::new(assemble(mesh, &Kernel::new(1, s).unwrap()).unwrap())
}

fn random(g: &GramPair, rng: &mut Lcg) -> FemFunction {
    g.function(rng.vec(g.dof_count(), -1.0, 1.0)).unwrap()
}

/// Sign-changing function that is negative on the left and positive on the right.
fn odd_profile(g: &GramPair) -> FemFunction {
    FemFunction::interpolate(g.mesh().clone(), |x| (std::f64::consts::PI * x[0] / 2.0).sin() * (1.0 - x[0] * x[0]))
}

#[test]
fn gradient_matches_finite_differences() {
    let g = gram(65, 0.5);
    let mut rng = Lcg(7);
    let mut worst: f64 = 0.0;
    for p in [2.1, 3.0, 4.0] {
        let spec = ProblemSpec::new(g.clone(), p, 1.3).unwrap();
        for _ in 0..10 {
            let u = random(&g, &mut rng);
            let v = random(&g, &mut rng);
            let grad = gradient(&spec, &u).unwrap();
            let analytic = g.h_inner(&grad, &v).unwrap();
            let h = 1e-5;
            let e = |t: f64| energy(&spec, &u.add_scaled(t, &v)).unwrap();
            let fd = (e(h) - e(-h)) / (2.0 * h);
            let rel = (analytic - fd).abs() / fd.abs();
            worst = worst.max(rel);
            assert!(rel <= 1e-5, "p={p}: {analytic} vs {fd}");
            // the H-gradient represents the derivative
            let d = derivative(&spec, &u, &v).unwrap();
            assert!((d - analytic).abs() <= 1e-10 * d.abs().max(1.0));
        }
    }
    println!("worst relative deviation {worst:e}");
}

#[test]
fn gradient_of_zero_vanishes() {
    let g = gram(17, 0.4);
    let spec = ProblemSpec::new(g.clone(), 3.0, 1.0).unwrap();
    let z = FemFunction::zeros(g.mesh().clone());
    assert!(gradient(&spec, &z).unwrap().is_zero());
    assert_eq!(energy(&spec, &z).unwrap(), 0.0);
}

#[test]
fn energy_homogeneity() {
    let g = gram(33, 0.6);
    let spec = ProblemSpec::new(g.clone(), 3.5, 2.0).unwrap();
    let u = random(&g, &mut Lcg(3));
    let quad = g.h_inner(&u, &u).unwrap();
    let pw = g.lp_norm(&u, 3.5).unwrap().powf(3.5);
    let t: f64 = 2.0;
    let expect = 0.5 * t * t * quad - 2.0 / 3.5 * t.powf(3.5) * pw;
    let got = energy(&spec, &u.scaled(t)).unwrap();
    assert!((got - expect).abs() <= 1e-10 * expect.abs());
}

#[test]
fn nehari_projection_identities() {
    let g = gram(65, 0.3);
    let mut rng = Lcg(11);
    for p in [2.1, 3.0, 4.0] {
        let spec = ProblemSpec::new(g.clone(), p, 1.7).unwrap();
        for _ in 0..5 {
            let u = random(&g, &mut rng);
            let (t, tu) = nehari_project(&spec, &u).unwrap();
            let norm2 = g.h_inner(&tu, &tu).unwrap();
            let res = derivative(&spec, &tu, &tu).unwrap();
            assert!(res.abs() <= 1e-10 * norm2, "{p}: {res}");
            let e = |k: f64| energy(&spec, &u.scaled(k * t)).unwrap();
            assert!(e(1.0) >= e(0.9) && e(1.0) >= e(1.1));
            // projecting again is the identity
            let (t2, _) = nehari_project(&spec, &tu).unwrap();
            assert!((t2 - 1.0).abs() < 1e-10);
        }
    }
    let spec = ProblemSpec::new(g.clone(), 3.0, 1.0).unwrap();
    assert!(nehari_project(&spec, &FemFunction::zeros(g.mesh().clone())).is_err());
}

#[test]
fn nodal_projection_residuals_and_multistart() {
    let g = gram(65, 0.5);
    let mut rng = Lcg(5);
    for p in [2.1, 3.0, 4.0] {
        let spec = ProblemSpec::new(g.clone(), p, 1.0).unwrap();
        for _ in 0..4 {
            let u = random(&g, &mut rng);
            let base = nodal_nehari_project(&spec, &u).unwrap();
            let w = &base.w;
            let norm2 = g.h_inner(w, w).unwrap();
            for part in [u.positive_part(), u.negative_part()] {
                let r = derivative(&spec, w, &part).unwrap();
                assert!(r.abs() <= 1e-10 * norm2, "{p}: {r}");
            }
            for _ in 0..2 {
                let start = (rng.next() * 3.0 + 0.1, rng.next() * 3.0 + 0.1);
                let other = nodal_nehari_project_from(&spec, &u, start).unwrap();
                assert!((other.t_plus - base.t_plus).abs() <= 1e-8 * base.t_plus, "p={p} {start:?}: {} {} vs {} {} ({} {})", other.t_plus, other.t_minus, base.t_plus, base.t_minus, other.iterations, base.iterations);
                assert!((other.t_minus - base.t_minus).abs() <= 1e-8 * base.t_minus);
            }
            // maximality on the cone around (t⁺, t⁻)
            let (up, um) = (u.positive_part(), u.negative_part());
            let e0 = energy(&spec, w).unwrap();
            for _ in 0..20 {
                let (a, b) = (0.5 + rng.next(), 0.5 + rng.next());
                let trial = up.scaled(a * base.t_plus).add_scaled(b * base.t_minus, &um);
                let et = energy(&spec, &trial).unwrap();
                assert!(et <= e0 + 1e-12 * e0.abs(), "p={p} ({a},{b}): {et} > {e0}");
            }
        }
    }
}

#[test]
fn nodal_projection_of_odd_function_is_symmetric() {
    let g = gram(65, 0.5);
    let spec = ProblemSpec::new(g.clone(), 4.0, 1.0).unwrap();
    let u = odd_profile(&g);
    let c = u.coeffs();
    let n = c.len();
    for i in 0..n {
        assert!((c[i] + c[n - 1 - i]).abs() < 1e-14);
    }
    let r = nodal_nehari_project(&spec, &u).unwrap();
    assert!((r.t_plus - r.t_minus).abs() <= 1e-9 * r.t_plus);
    let one_signed = g.function(c.iter().map(|v| v.abs()).collect()).unwrap();
    assert!(nodal_nehari_project(&spec, &one_signed).is_err());
}

#[test]
fn rescaling_relations() {
    let g = gram(33, 0.5);
    let u = random(&g, &mut Lcg(21));
    assert_eq!(rescale_solution(&u, 1.0, 3.0).coeffs(), u.coeffs());
    let (lam, p) = (2.7, 3.3);
    let v = rescale_solution(&u, lam, p);
    let back = rescale_solution(&v, 1.0 / lam, p);
    for (a, b) in back.coeffs().iter().zip(u.coeffs()) {
        assert!((a - b).abs() <= 1e-14 * b.abs().max(1.0));
    }
    // E_p(v) = λ^{2/(p-2)} Ẽ_p(u), Ẽ_p the λ-scaled energy
    let plain = ProblemSpec::new(g.clone(), p, 1.0).unwrap();
    let scaled = ProblemSpec::new(g.clone(), p, lam).unwrap();
    let lhs = energy(&plain, &v).unwrap();
    let rhs = lam.powf(2.0 / (p - 2.0)) * energy(&scaled, &u).unwrap();
    assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs());
}

#[test]
fn clamped_parts_interact_positively() {
    let g = gram(65, 0.5);
    let mut rng = Lcg(99);
    for _ in 0..20 {
        let u = random(&g, &mut rng);
        let (up, um) = (u.positive_part(), u.negative_part());
        let sum: Vec<f64> = up.coeffs().iter().zip(um.coeffs()).map(|(a, b)| a + b).collect();
        assert_eq!(sum, u.coeffs());
        assert!(g.h_inner(&up, &um).unwrap() > 0.0);
        assert!(dot(up.coeffs(), um.coeffs()) == 0.0);
    }
}

#[test]
fn spec_rejects_bad_exponents() {
    let g = gram(9, 0.3);
    assert!(ProblemSpec::new(g.clone(), 2.0, 1.0).is_err());
    // N = 1 > 2s: critical exponent 2/(1 - 0.6) = 5
    assert!(ProblemSpec::new(g.clone(), 5.0, 1.0).is_err());
    assert!(ProblemSpec::new(g.clone(), 4.9, 1.0).is_ok());
    assert!(ProblemSpec::new(g, 3.0, -1.0).is_err());
}
