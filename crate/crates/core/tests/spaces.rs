use dlsfem::assembly::PenaltyRegime;
use dlsfem::mesh::{build_initial_mesh, DomainSpec, Mesh, Point};
use dlsfem::quadrature::triangle_rule;
use dlsfem::scheme::{solve_scheme, SolveOptions};
use dlsfem::spaces::{build_constrained_basis, Discretization};
use dlsfem::verify::{alpha_partition_defect, constrained_dimension, constrained_mean_jump_defect, constraint_rank};
use proptest::prelude::*;

fn meshes() -> Vec<Mesh> {
    let sq = build_initial_mesh(&DomainSpec::square(1.0).unwrap()).unwrap();
    let rect = build_initial_mesh(&DomainSpec::rectangle(2.0).unwrap()).unwrap();
    let l = build_initial_mesh(&DomainSpec::lshape(1.0).unwrap()).unwrap();
    let l_adapted = l.refine(&[0, 5, 11]).unwrap().refine(&[2, 3]).unwrap();
    vec![sq, rect, l_adapted]
}

#[test]
fn constrained_basis_invariants() {
    for mesh in meshes() {
        for k in 0..=2 {
            let disc = Discretization::new(&mesh, k).unwrap();
            assert!(alpha_partition_defect(&disc).unwrap() <= 1e-12);
            assert!(constrained_mean_jump_defect(&disc).unwrap() <= 1e-12);
            let basis = build_constrained_basis(&disc).unwrap();
            assert_eq!(basis.len(), constrained_dimension(&disc));
            let (rank, rows) = constraint_rank(&disc).unwrap();
            assert_eq!(rank, rows);
        }
    }
}

#[test]
fn raw_edge_functions_are_conforming_pairs() {
    // An edge function has normal trace ℓ_j on its own edge, so +φ on T+ and
    // −φ on T− glue to a normal-continuous field.
    let mesh = &meshes()[2];
    for k in 0..=2 {
        let disc = Discretization::new(mesh, k).unwrap();
        let nodes = disc.rt.edge_nodes().to_vec();
        let s = [0.13, 0.5, 0.91];
        for (e, edge) in mesh.edges().iter().enumerate() {
            let plus = disc.side_trace(e, edge.t_plus, &s);
            let minus = edge.t_minus.map(|t| disc.side_trace(e, t, &s));
            let n = disc.rt.local_dim();
            for j in 0..=k {
                let lagrange = |x: f64| {
                    (0..=k).filter(|&m| m != j).map(|m| (x - nodes[m]) / (nodes[j] - nodes[m])).product::<f64>()
                };
                for (q, &sq) in s.iter().enumerate() {
                    let ip = disc.rt.edge_local_index(plus.local_edge, j);
                    assert!((plus.normal[q * n + ip] - lagrange(sq)).abs() < 1e-12);
                    if let Some(m) = &minus {
                        let im = disc.rt.edge_local_index(m.local_edge, j);
                        assert!((m.normal[q * n + im] + lagrange(sq)).abs() < 1e-12);
                    }
                }
            }
        }
    }
}

#[test]
fn dg_mass_matrix_is_scaled_identity() {
    let mesh = &meshes()[2];
    let disc = Discretization::new(mesh, 2).unwrap();
    let rule = triangle_rule(8).unwrap();
    for t in [0, 7, mesh.num_triangles() - 1] {
        let ev = disc.element_values(t, &rule);
        let n = ev.n_dg;
        for i in 0..n {
            for j in 0..n {
                let m: f64 = (0..ev.weights.len()).map(|q| ev.weights[q] * ev.dg[q * n + i] * ev.dg[q * n + j]).sum();
                let expected = if i == j { ev.geometry.area } else { 0.0 };
                assert!((m - expected).abs() < 1e-12 * ev.geometry.area, "t={t} ({i},{j})");
            }
        }
    }
}

/// `u = x(ℓ − x)` with `f = 2` on the rectangle lies in the k = 1 spaces:
/// both schemes reproduce it.
#[test]
fn discrete_spaces_contain_quadratic_solution() {
    let ell = 2.0;
    let mesh = build_initial_mesh(&DomainSpec::rectangle(ell).unwrap()).unwrap();
    let disc = Discretization::new(&mesh, 1).unwrap();
    let rule = triangle_rule(6).unwrap();
    for regime in [PenaltyRegime::natural(ell / 3.0).unwrap(), PenaltyRegime::over_penalized(ell / 3.0).unwrap()] {
        let sol = solve_scheme(&disc, &regime, &|_: Point| 2.0, &SolveOptions::default()).unwrap().solution;
        let mut worst = 0.0f64;
        for t in 0..mesh.num_triangles() {
            let ev = disc.element_values(t, &rule);
            for (q, x) in ev.points.iter().enumerate() {
                let (mut u, mut s) = (0.0, [0.0; 2]);
                for i in 0..ev.n_dg {
                    u += sol.u[t * ev.n_dg + i] * ev.dg[q * ev.n_dg + i];
                }
                for i in 0..ev.n_rt {
                    let v = ev.rt[q * ev.n_rt + i];
                    s[0] += sol.sigma[t * ev.n_rt + i] * v[0];
                    s[1] += sol.sigma[t * ev.n_rt + i] * v[1];
                }
                worst = worst.max((u - x[0] * (ell - x[0])).abs());
                worst = worst.max((s[0] - (ell - 2.0 * x[0])).abs()).max(s[1].abs());
            }
        }
        assert!(worst < 1e-9, "alpha={} worst={worst}", regime.alpha());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn mean_jumps_vanish_on_random_adaptive_meshes(
        marks in proptest::collection::vec(proptest::collection::vec(0usize..64, 1..6), 1..3),
        k in 0usize..=2,
    ) {
        let mut mesh = build_initial_mesh(&DomainSpec::lshape(1.0).unwrap()).unwrap();
        for m in marks {
            let n = mesh.num_triangles();
            let mut ids: Vec<usize> = m.into_iter().map(|i| i % n).collect();
            ids.sort_unstable();
            ids.dedup();
            mesh = mesh.refine(&ids).unwrap();
        }
        let disc = Discretization::new(&mesh, k).unwrap();
        prop_assert!(constrained_mean_jump_defect(&disc).unwrap() <= 1e-12);
        prop_assert!(alpha_partition_defect(&disc).unwrap() <= 1e-12);
    }
}
