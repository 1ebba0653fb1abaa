use dlsfem::assembly::{assemble_bilinear, assemble_terms, PenaltyRegime};
use dlsfem::mesh::{build_initial_mesh, DomainSpec, Mesh};
use dlsfem::spaces::{build_constrained_basis, Discretization};
use dlsfem::verify::{optimality_margin, quadratic_identity_defect, smooth_load};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn meshes() -> Vec<Mesh> {
    vec![
        build_initial_mesh(&DomainSpec::square(1.0).unwrap()).unwrap(),
        build_initial_mesh(&DomainSpec::rectangle(2.0).unwrap()).unwrap(),
        build_initial_mesh(&DomainSpec::lshape(1.0).unwrap()).unwrap().refine(&[3, 4]).unwrap(),
    ]
}

#[test]
fn quadratic_identity_and_optimality() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for mesh in meshes() {
        for k in 0..=1 {
            let disc = Discretization::new(&mesh, k).unwrap();
            for alpha in [1, -1] {
                let regime = PenaltyRegime::new(alpha, 0.37).unwrap();
                for _ in 0..5 {
                    assert!(quadratic_identity_defect(&disc, &regime, &mut rng).unwrap() <= 1e-10);
                }
                assert!(optimality_margin(&disc, &regime, &mut rng).unwrap() >= -1e-10);
            }
        }
    }
}

/// Only the divergence block and the load carry `c²`; the jump weight of the
/// over-penalized scheme carries `c²` as well.
#[test]
fn weight_enters_as_expected() {
    let mesh = &meshes()[1];
    let disc = Discretization::new(mesh, 1).unwrap();
    for alpha in [1, -1] {
        let a = assemble_terms(&disc, &PenaltyRegime::new(alpha, 1.0).unwrap(), &smooth_load, false).unwrap();
        let b = assemble_terms(&disc, &PenaltyRegime::new(alpha, 3.0).unwrap(), &smooth_load, false).unwrap();
        let diff = |x: &dlsfem::sparse::CsrMatrix, y: &dlsfem::sparse::CsrMatrix| x.add(&y.scaled(-1.0)).max_abs();
        assert!(diff(&b.divergence, &a.divergence.scaled(9.0)) <= 1e-12 * b.divergence.max_abs());
        assert!(diff(&b.residual, &a.residual) == 0.0);
        assert!(diff(&b.primal_jump, &a.primal_jump) == 0.0);
        let jump_factor = if alpha == 1 { 1.0 } else { 9.0 };
        assert!(diff(&b.normal_jump, &a.normal_jump.scaled(jump_factor)) <= 1e-12 * b.normal_jump.max_abs());
        for (x, y) in b.load.iter().zip(&a.load) {
            assert!((x - 9.0 * y).abs() <= 1e-12 * x.abs().max(1e-300));
        }
    }
}

#[test]
fn reduced_matrix_is_positive_definite() {
    // Coercivity surrogate: the Rayleigh quotient of random vectors is bounded
    // below, and the constrained matrix admits a Cholesky factorization.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for mesh in meshes() {
        let disc = Discretization::new(&mesh, 1).unwrap();
        let regime = PenaltyRegime::natural(0.5).unwrap();
        let sys = assemble_bilinear(&disc, &regime, &smooth_load).unwrap();
        let z = build_constrained_basis(&disc).unwrap().transform(disc.n_u());
        let reduced = sys.matrix.congruence(&z);
        assert!(reduced.to_faer().sp_cholesky(faer::Side::Lower).is_ok());
        for _ in 0..20 {
            let x: Vec<f64> = (0..reduced.ncols()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            assert!(reduced.bilinear(&x, &x) > 0.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn identity_holds_for_random_weights(seed in any::<u64>(), c in 0.05f64..20.0, alpha in prop_oneof![Just(1), Just(-1)]) {
        let mesh = build_initial_mesh(&DomainSpec::square(1.0).unwrap()).unwrap();
        let disc = Discretization::new(&mesh, 0).unwrap();
        let regime = PenaltyRegime::new(alpha, c).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assert!(quadratic_identity_defect(&disc, &regime, &mut rng).unwrap() <= 1e-10);
    }
}
