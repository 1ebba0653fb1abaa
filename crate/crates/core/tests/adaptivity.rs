use dlsfem::adaptivity::{afem_loop, afem_loop_with, dorfler_mark, estimate};
use dlsfem::assembly::PenaltyRegime;
use dlsfem::config::ExperimentConfig;
use dlsfem::mesh::DomainKind;
use dlsfem::Error;
use proptest::prelude::*;

fn brute_force_minimum(eta: &[f64], theta: f64) -> usize {
    let total: f64 = eta.iter().sum();
    let n = eta.len();
    (0u32..1 << n)
        .filter(|mask| {
            let s: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| eta[i]).sum();
            s >= theta * total * (1.0 - 1e-12)
        })
        .map(|mask| mask.count_ones() as usize)
        .min()
        .unwrap()
}

proptest! {
    #[test]
    fn marking_is_minimal(
        eta in proptest::collection::vec(0.0f64..1.0, 1..12),
        theta in 0.01f64..=1.0,
    ) {
        prop_assume!(eta.iter().any(|v| *v > 0.0));
        let marked = dorfler_mark(&eta, theta).unwrap();
        let total: f64 = eta.iter().sum();
        let sum: f64 = marked.iter().map(|&i| eta[i]).sum();
        prop_assert!(sum >= theta * total * (1.0 - 1e-12));
        prop_assert!(marked.windows(2).all(|w| w[0] < w[1]));
        if theta < 1.0 {
            prop_assert_eq!(marked.len(), brute_force_minimum(&eta, theta));
        } else {
            prop_assert_eq!(marked.len(), eta.len());
        }
    }
}

#[test]
fn zero_estimator_is_an_error() {
    assert!(matches!(dorfler_mark(&[0.0; 4], 0.5), Err(Error::ZeroEstimator)));
}

#[test]
fn loop_respects_limits() {
    let config = ExperimentConfig {
        domain: DomainKind::LShape,
        max_ndof: 3000,
        ..Default::default()
    };
    let history = afem_loop(&config).unwrap();
    let n = history.records.len();
    assert!(n >= 3);
    assert!(history.records[1..].iter().all(|r| r.ndof <= 3000));
    assert!(history.records.windows(2).all(|w| w[1].ntriangles > w[0].ntriangles));
    assert_eq!(history.records.iter().map(|r| r.level).collect::<Vec<_>>(), (0..n).collect::<Vec<_>>());

    let limited = afem_loop(&ExperimentConfig {
        max_levels: Some(2),
        ..config
    })
    .unwrap();
    assert_eq!(limited.records.len(), 2);
}

#[test]
fn estimator_is_the_functional_at_the_solution() {
    let config = ExperimentConfig {
        max_levels: Some(2),
        ..Default::default()
    };
    let regime = PenaltyRegime::new(config.alpha, config.c_omega().unwrap()).unwrap();
    let mut checked = 0;
    afem_loop_with(&config, |disc, sol, record| {
        let exact = dlsfem::benchmarks::exact_solution(&config.domain_spec()?);
        let field = estimate(disc, sol, &|x| exact.f(x), &regime)?;
        assert_eq!(field.estimator(), record.estimator);
        assert!(field.eta_sq.iter().all(|v| *v >= 0.0));
        checked += 1;
        Ok(())
    })
    .unwrap();
    assert_eq!(checked, 2);
}

#[test]
fn adaptive_mesh_grades_toward_reentrant_corner() {
    let config = ExperimentConfig {
        domain: DomainKind::LShape,
        k: 1,
        max_ndof: 20_000,
        ..Default::default()
    };
    let history = afem_loop(&config).unwrap();
    assert!(history.records.last().unwrap().ndof >= 10_000);
    let mesh = history.final_mesh;
    let (mut near, mut far) = (f64::INFINITY, 0.0f64);
    for t in 0..mesh.num_triangles() {
        let g = mesh.geometry(t);
        let c = g.point(&[1.0 / 3.0; 3]);
        let r = c[0].hypot(c[1]);
        if r < 0.1 {
            near = near.min(g.diameter());
        }
        far = far.max(g.diameter());
    }
    assert!(near * 10.0 < far, "near {near} far {far}");
}
