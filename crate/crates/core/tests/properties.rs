use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use retroatom::channels::{build_superoperator, ChannelKind, ChannelParams};
use retroatom::qop::{
    from_bloch, normalize_to_density, projector_theta, to_bloch, BlochVector, Operator2, PomElement, Role,
};
use retroatom::retrodiction::{forward_bayes, preparation_posterior, retrodict_open, retrodict_pauli};
use retroatom::sampling::{random_ensemble, random_params, random_pom};

fn kind() -> impl Strategy<Value = ChannelKind> {
    prop_oneof![Just(ChannelKind::Spontaneous), Just(ChannelKind::Thermal), Just(ChannelKind::Driven)]
}

fn bloch_in_ball() -> impl Strategy<Value = BlochVector> {
    (0.0..1.0f64, 0.0..std::f64::consts::PI, 0.0..std::f64::consts::TAU)
        .prop_map(|(r, th, ph)| BlochVector::new(r * th.sin() * ph.cos(), r * th.sin() * ph.sin(), r * th.cos()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bloch_round_trip(b in bloch_in_ball()) {
        let rho = from_bloch(b, Role::Predictive).unwrap();
        prop_assert!(to_bloch(&rho).max_diff(&b) < 1e-12);
    }

    #[test]
    fn theta_projector_has_eigenvalues_zero_and_one(theta in 0.0..std::f64::consts::PI) {
        let p = projector_theta(theta).unwrap();
        let [lo, hi] = p.op().eigenvalues_hermitian();
        prop_assert!(lo.abs() < 1e-12 && (hi - 1.0).abs() < 1e-12);
        prop_assert!(p.op().matmul(p.op()).dist(p.op()) < 1e-12);
    }

    #[test]
    fn hs_inner_is_conjugate_symmetric(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = retroatom::sampling::random_operator(&mut rng);
        let b = retroatom::sampling::random_operator(&mut rng);
        prop_assert!((a.hs_inner(&b) - b.hs_inner(&a).conj()).norm() < 1e-12);
        prop_assert!(a.hs_inner(&a).re >= 0.0 && a.hs_inner(&a).im.abs() < 1e-12);
    }

    #[test]
    fn adjoint_defining_identity(seed in any::<u64>(), k in kind()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = random_params(&mut rng, k, 5.0);
        let s = build_superoperator(&params).unwrap();
        let a = retroatom::sampling::random_operator(&mut rng);
        let b = retroatom::sampling::random_operator(&mut rng);
        let lhs = a.dagger().matmul(&s.apply(&b)).trace();
        let rhs = s.adjoint().apply(&a).dagger().matmul(&b).trace();
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn routes_agree(seed in any::<u64>(), k in kind()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = random_params(&mut rng, k, 4.0);
        let pom = random_pom(&mut rng);
        let ens = random_ensemble(&mut rng);
        let adj = retrodict_open(&params, &pom).unwrap();
        let pau = retrodict_pauli(&params, &pom).unwrap();
        prop_assert!(adj.rho_retr.op().dist(pau.rho_retr.op()) < 1e-12);
        prop_assert!((adj.normalization - pau.normalization).abs() < 1e-12);
        let retro = preparation_posterior(&adj.rho_retr, &ens).unwrap();
        let fwd = forward_bayes(&params, &ens, &pom).unwrap();
        prop_assert!(retro.max_deviation(&fwd) < 1e-10);
        prop_assert!((retro.probabilities().iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn retrodiction_ignores_pom_scale(seed in any::<u64>(), k in kind(), c in 0.01..50.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = random_params(&mut rng, k, 4.0);
        let pom = random_pom(&mut rng);
        let scaled = PomElement::new("scaled", *pom.op() * c).unwrap();
        let a = retrodict_open(&params, &pom).unwrap();
        let b = retrodict_open(&params, &scaled).unwrap();
        prop_assert!(a.rho_retr.op().dist(b.rho_retr.op()) < 1e-12);
        prop_assert!((b.normalization / a.normalization - c).abs() < 1e-9 * c);
    }

    #[test]
    fn retrodictive_state_is_a_density_matrix(seed in any::<u64>(), k in kind()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = random_params(&mut rng, k, 8.0);
        let pom = random_pom(&mut rng);
        let r = retrodict_open(&params, &pom).unwrap();
        let op = r.rho_retr.op();
        prop_assert_eq!(r.rho_retr.role(), Role::Retrodictive);
        prop_assert!((op.trace().re - 1.0).abs() < 1e-12);
        prop_assert!(op.eigenvalues_hermitian()[0] > -1e-12);
    }
}

#[test]
fn normalization_is_predictive_outcome_probability_for_unit_trace_prior() {
    let params = ChannelParams::thermal(0.7, 0.4, 1.3);
    let pom = PomElement::new("m", Operator2::real(0.6, 0.1, 0.1, 0.3)).unwrap();
    let r = retrodict_open(&params, &pom).unwrap();
    let s = build_superoperator(&params).unwrap();
    let half = normalize_to_density(&Operator2::identity(), Role::Predictive).unwrap();
    let prob = s.apply(half.op()).matmul(pom.op()).trace().re;
    assert!((r.normalization / 2.0 - prob).abs() < 1e-12);
}
