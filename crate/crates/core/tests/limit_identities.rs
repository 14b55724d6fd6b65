mod common;

use std::sync::Arc;

use common::Lcg;
use fraclap::assembly::{assemble, GramPair};
use fraclap::kernel::Kernel;
use fraclap::limit::*;
use fraclap::mesh::{make_interval_mesh, Mesh};
use fraclap::spectral::smallest_eigenpairs;
use fraclap::studies::{symmetry_report, Isometry, Parity};
use fraclap::variational::{nehari_project, ProblemSpec};

fn gram(count: usize, s: f64) -> Arc<GramPair> {
    let mesh = Arc::new(Mesh::from(make_interval_mesh(-1.0, 1.0, count).unwrap()));
    Arc::new(assemble(mesh, &Kernel::new(1, s).unwrap()).unwrap())
}

#[test]
fn reduced_scale_identities() {
    let g = gram(65, 0.4);
    let mut rng = Lcg(5);
    for _ in 0..10 {
        let w = g.function(rng.vec(g.dof_count(), -2.0, 2.0)).unwrap();
        let tw = reduced_nehari_scale(&g, &w).unwrap();
        let v = w.scaled(tw);
        let l2 = g.l2_inner(&v, &v).unwrap();
        // t_v v on N_*
        assert!(reduced_nehari_residual(&g, &v).unwrap().abs() <= 1e-9 * l2);
        assert!((reduced_nehari_scale(&g, &v).unwrap() - 1.0).abs() <= 1e-10);
        for t in [0.3, 1.0, 2.5] {
            let expect = 0.5 * t * t * (1.0 - f64::ln(t * t)) * l2;
            let got = reduced_energy(&g, &v.scaled(t)).unwrap();
            assert!((got - expect).abs() <= 1e-10 * expect.abs().max(l2), "t={t}: {got} vs {expect}");
        }
        for c in [0.1, 3.0, -2.0] {
            let tc = reduced_nehari_scale(&g, &w.scaled(c)).unwrap();
            assert!((tc - tw / f64::abs(c)).abs() <= 1e-10 * tw / f64::abs(c));
        }
    }
}

#[test]
fn reduced_energy_is_maximal_at_the_nehari_scale() {
    let g = gram(65, 0.6);
    let w = g.function(Lcg(9).vec(g.dof_count(), -1.0, 1.0)).unwrap();
    let v = w.scaled(reduced_nehari_scale(&g, &w).unwrap());
    let e1 = reduced_energy(&g, &v).unwrap();
    for t in [0.9, 0.99, 1.01, 1.1] {
        assert!(reduced_energy(&g, &v.scaled(t)).unwrap() < e1);
    }
}

#[test]
fn nehari_scale_of_eigenfunction_tends_to_reduced_scale() {
    for s in [0.3, 0.5] {
        let g = gram(257, s);
        let pair = &smallest_eigenpairs(&g, 1, 1e-10).unwrap()[0];
        let limit = reduced_nehari_scale(&g, &pair.phi).unwrap();
        let mut last = f64::INFINITY;
        for p in [2.5, 2.1, 2.01] {
            let spec = ProblemSpec::new(g.clone(), p, pair.lambda).unwrap();
            let (t, _) = nehari_project(&spec, &pair.phi).unwrap();
            let gap = (t - limit).abs();
            assert!(gap < last);
            last = gap;
        }
        assert!(last <= 1e-3, "s={s}: {last}");
    }
}

#[test]
fn ground_states_approach_first_eigenspace() {
    let g = gram(257, 0.3);
    let r = limit_study(g.clone(), 1, &[3.0, 2.5, 2.1, 2.05], &LimitOptions::default()).unwrap();
    assert!(r.angles.windows(2).all(|w| w[1] < w[0]), "{:?}", r.angles);
    assert!(r.angles[3].to_degrees() <= 5.0);
    assert!(r.limit_residuals.windows(2).all(|w| w[1] < w[0]));
    let sym = symmetry_report(&g, &r.solutions[2], Isometry::Reflection).unwrap();
    assert_eq!(sym.parity, Parity::Symmetric);
    assert!(sym.residual() <= 5e-2);
}

#[test]
fn nodal_solutions_approach_reduced_minimizer() {
    let g = gram(129, 0.5);
    let r = limit_study(g.clone(), 2, &[3.0, 2.5, 2.1], &LimitOptions::default()).unwrap();
    assert!(!r.second_multiple);
    assert!(r.reduced_distances.windows(2).all(|w| w[1] < w[0]), "{:?}", r.reduced_distances);
    assert!(r.reduced_distances[2] <= 0.05);
    let sym = symmetry_report(&g, &r.solutions[2], Isometry::Reflection).unwrap();
    assert_eq!(sym.parity, Parity::Antisymmetric);
}

#[test]
fn study_rejects_bad_sequences() {
    let g = gram(33, 0.5);
    let o = LimitOptions::default();
    assert!(limit_study(g.clone(), 3, &[3.0], &o).is_err());
    assert!(limit_study(g.clone(), 1, &[2.5, 3.0], &o).is_err());
    assert!(limit_study(g, 1, &[3.0, 2.0], &o).is_err());
}
