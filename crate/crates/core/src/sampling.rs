//! Random physical inputs for property checks: channel parameters, POM
//! elements and preparation ensembles.

use num_complex::Complex64;
use rand::Rng;

use crate::channels::{ChannelKind, ChannelParams};
use crate::qop::{Operator2, PomElement, PreparationEnsemble};

/// Channel parameters with `Γτ` uniform in `[0, max_gamma_tau]`.
pub fn random_params<R: Rng + ?Sized>(rng: &mut R, kind: ChannelKind, max_gamma_tau: f64) -> ChannelParams {
    let gamma = rng.gen_range(0.2..2.0);
    let tau = rng.gen_range(0.0..=max_gamma_tau) / gamma;
    match kind {
        ChannelKind::Spontaneous => ChannelParams::spontaneous(gamma, tau),
        ChannelKind::Thermal => ChannelParams::thermal(gamma, rng.gen_range(0.0..3.0), tau),
        // spans under-, critically and over-damped Rabi regimes
        ChannelKind::Driven => ChannelParams::driven(gamma, gamma * rng.gen_range(0.0..6.0), tau),
    }
}

pub fn random_kind<R: Rng + ?Sized>(rng: &mut R) -> ChannelKind {
    ChannelKind::ALL[rng.gen_range(0..3)]
}

/// Arbitrary complex 2×2 matrix with entries in the unit square.
pub fn random_operator<R: Rng + ?Sized>(rng: &mut R) -> Operator2 {
    let mut z = || Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    Operator2::from_vec4([z(), z(), z(), z()])
}

/// `BB†` scaled to a random trace in `[0.1, 2]`; generically full rank.
pub fn random_psd<R: Rng + ?Sized>(rng: &mut R) -> Operator2 {
    let b = random_operator(rng);
    let p = b.matmul(&b.dagger());
    let target = rng.gen_range(0.1..2.0);
    hermitize(&p.scale(target / p.trace().re))
}

/// A random rank-one projector.
pub fn random_projector<R: Rng + ?Sized>(rng: &mut R) -> Operator2 {
    let theta: f64 = rng.gen_range(0.0..std::f64::consts::PI);
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let ket = [Complex64::new((theta / 2.0).sin(), 0.0), Complex64::from_polar((theta / 2.0).cos(), phi)];
    hermitize(&Operator2::outer(ket, ket))
}

fn hermitize(a: &Operator2) -> Operator2 {
    (*a + a.dagger()) * 0.5
}

pub fn random_pom<R: Rng + ?Sized>(rng: &mut R) -> PomElement {
    let op = if rng.gen_bool(0.3) { random_projector(rng) } else { random_psd(rng) };
    PomElement::new("m", op).expect("PSD by construction")
}

/// Two to four weighted preparation operators with total trace one.
pub fn random_ensemble<R: Rng + ?Sized>(rng: &mut R) -> PreparationEnsemble {
    let count = rng.gen_range(2..=4);
    let ops: Vec<Operator2> = (0..count)
        .map(|_| if rng.gen_bool(0.5) { random_projector(rng) * rng.gen_range(0.1..1.0) } else { random_psd(rng) })
        .collect();
    let total: f64 = ops.iter().map(|op| op.trace().re).sum();
    let items =
        ops.into_iter().enumerate().map(|(i, op)| (format!("p{i}"), hermitize(&(op * (1.0 / total))))).collect();
    PreparationEnsemble::new(items).expect("valid by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samples_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let kind = random_kind(&mut rng);
            let p = random_params(&mut rng, kind, 4.0);
            assert!(p.validate().is_ok());
            assert!(p.gamma * p.tau <= 4.0 + 1e-12);
            random_pom(&mut rng);
            random_ensemble(&mut rng);
        }
    }
}
