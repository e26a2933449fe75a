//! Retrodiction: from a measurement outcome back to a state at the
//! preparation time, and from there to preparation probabilities.
//!
//! For an unmonitored environment the unnormalized retrodictive operator is
//! the Hilbert–Schmidt adjoint of the predictive channel applied to the
//! measurement POM element. Two further routes are provided so the results
//! can be checked against each other:
//!
//! * [`retrodict_pauli`] never forms the adjoint. It propagates `1̂` and
//!   `1̂ + σ̂ₖ` forward and reads off the Bloch components of the
//!   retrodictive state from their overlaps with the POM element.
//! * [`forward_bayes`] stays entirely in the predictive picture and applies
//!   Bayes' theorem to `Tr[Π̂ Φ(Λ̂_p)]`.

use num_complex::Complex64;
use serde::Serialize;

use crate::channels::{build_superoperator, ChannelParams, Superoperator};
use crate::error::{Error, Result};
use crate::qop::{normalize_to_density, pauli, DensityMatrix, Operator2, Pauli, PomElement, PreparationEnsemble, Role};

/// Normalizations at or below this are treated as an impossible outcome.
pub const IMPOSSIBLE_OUTCOME_TOL: f64 = 1e-300;
pub const UNITARITY_TOL: f64 = 1e-10;
pub const POSTERIOR_SUM_TOL: f64 = 1e-10;

/// A retrodictive density matrix together with the trace `N` of the
/// unnormalized adjoint image it was obtained from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetrodictionResult {
    pub rho_retr: DensityMatrix,
    pub normalization: f64,
}

/// Posterior probabilities for each preparation event, in ensemble order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreparationPosterior {
    entries: Vec<(String, f64)>,
}

impl PreparationPosterior {
    /// Normalizes non-negative weights into probabilities.
    fn from_weights(weights: Vec<(String, f64)>) -> Result<Self> {
        let total: f64 = weights.iter().map(|(_, w)| w).sum();
        if total.is_nan() || total <= IMPOSSIBLE_OUTCOME_TOL || !total.is_finite() {
            return Err(Error::IncompatibleEnsemble);
        }
        let entries = weights.into_iter().map(|(label, w)| (label, (w / total).clamp(0.0, 1.0))).collect();
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[(String, f64)] {
        &self.entries
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.entries.iter().map(|(_, p)| *p).collect()
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.entries.iter().find(|(l, _)| l == label).map(|(_, p)| *p)
    }

    /// Largest absolute difference between matching entries.
    pub fn max_deviation(&self, other: &Self) -> f64 {
        self.entries.iter().zip(&other.entries).map(|((_, a), (_, b))| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// Retrodiction for a closed system: `U†Π̂U` normalized.
pub fn retrodict_closed(pom: &PomElement, unitary: &Operator2) -> Result<DensityMatrix> {
    let defect = unitary.dagger().matmul(unitary).dist(&Operator2::identity());
    if defect.is_nan() || defect > UNITARITY_TOL {
        return Err(Error::NonUnitary(defect));
    }
    let back = unitary.dagger().matmul(pom.op()).matmul(unitary);
    normalize_to_density(&back, Role::Retrodictive)
}

fn finish(unnormalized: &Operator2) -> Result<RetrodictionResult> {
    let normalization = unnormalized.trace().re;
    if normalization.is_nan() || normalization <= IMPOSSIBLE_OUTCOME_TOL {
        return Err(Error::ImpossibleOutcome(normalization));
    }
    let rho_retr = normalize_to_density(unnormalized, Role::Retrodictive)?;
    Ok(RetrodictionResult { rho_retr, normalization })
}

/// Retrodicts through an already-built predictive channel.
pub fn retrodict_with(channel: &Superoperator, pom: &PomElement) -> Result<RetrodictionResult> {
    finish(&channel.adjoint().apply(pom.op()))
}

/// Retrodictive state at the preparation time, `τ` before the measurement
/// that produced `pom`.
pub fn retrodict_open(params: &ChannelParams, pom: &PomElement) -> Result<RetrodictionResult> {
    retrodict_with(&build_superoperator(params)?, pom)
}

/// Same result as [`retrodict_open`], obtained from forward propagation of
/// `1̂` and `1̂ + σ̂ₖ` only.
pub fn retrodict_pauli(params: &ChannelParams, pom: &PomElement) -> Result<RetrodictionResult> {
    retrodict_pauli_with(&build_superoperator(params)?, pom)
}

pub fn retrodict_pauli_with(channel: &Superoperator, pom: &PomElement) -> Result<RetrodictionResult> {
    let overlap = |x: &Operator2| -> f64 { channel.apply(x).matmul(pom.op()).trace().re };
    let identity = Operator2::identity();
    let normalization = overlap(&identity);
    if normalization.is_nan() || normalization <= IMPOSSIBLE_OUTCOME_TOL {
        return Err(Error::ImpossibleOutcome(normalization));
    }
    let mut rho = identity;
    for k in Pauli::ALL {
        let sigma = pauli(k);
        let component = overlap(&(identity + sigma)) / normalization - 1.0;
        rho = rho + sigma * component;
    }
    let rho_retr = normalize_to_density(&(rho * 0.5), Role::Retrodictive)?;
    Ok(RetrodictionResult { rho_retr, normalization })
}

fn overlap(a: &Operator2, b: &Operator2) -> f64 {
    // both arguments are Hermitian, so the trace of the product is real
    a.matmul(b).trace().re.max(0.0)
}

/// `P(p|m) = Tr[ρ̂_retr Λ̂_p] / Σ_p Tr[ρ̂_retr Λ̂_p]`.
pub fn preparation_posterior(rho_retr: &DensityMatrix, ensemble: &PreparationEnsemble) -> Result<PreparationPosterior> {
    let weights =
        ensemble.items().iter().map(|(label, lambda)| (label.clone(), overlap(rho_retr.op(), lambda))).collect();
    PreparationPosterior::from_weights(weights)
}

/// Bayes' theorem in the predictive picture: `P(p|m) ∝ Tr[Π̂_m Φ(Λ̂_p)]`.
pub fn forward_bayes(
    params: &ChannelParams,
    ensemble: &PreparationEnsemble,
    pom: &PomElement,
) -> Result<PreparationPosterior> {
    forward_bayes_with(&build_superoperator(params)?, ensemble, pom)
}

pub fn forward_bayes_with(
    channel: &Superoperator,
    ensemble: &PreparationEnsemble,
    pom: &PomElement,
) -> Result<PreparationPosterior> {
    forward_bayes_by(|lambda| Ok(channel.apply(lambda)), ensemble, pom)
}

/// [`forward_bayes`] with an arbitrary forward propagator, e.g. the RK4 oracle.
pub fn forward_bayes_by(
    mut propagate: impl FnMut(&Operator2) -> Result<Operator2>,
    ensemble: &PreparationEnsemble,
    pom: &PomElement,
) -> Result<PreparationPosterior> {
    let weights = ensemble
        .items()
        .iter()
        .map(|(label, lambda)| Ok((label.clone(), overlap(pom.op(), &propagate(lambda)?))))
        .collect::<Result<Vec<_>>>()?;
    PreparationPosterior::from_weights(weights)
}

/// Preparation probabilities for an unbiased source described by
/// preparation POM elements `Ξ̂_p`, each evolved forward to the
/// measurement time and projected onto `Π̂_m`.
pub fn prep_prob_direct(
    params: &ChannelParams,
    pom: &PomElement,
    prep_elements: &[PomElement],
) -> Result<PreparationPosterior> {
    if prep_elements.is_empty() {
        return Err(Error::Empty("preparation elements"));
    }
    let channel = build_superoperator(params)?;
    let weights = prep_elements
        .iter()
        .map(|xi| {
            let tr = xi.op().trace().re;
            if tr.is_nan() || tr <= 0.0 {
                return Err(Error::Unnormalizable(tr));
            }
            Ok((xi.label().to_owned(), overlap(pom.op(), &channel.apply(xi.op()))))
        })
        .collect::<Result<Vec<_>>>()?;
    PreparationPosterior::from_weights(weights)
}

/// `exp(−iφσ̂₃/2)`, a rotation about the inversion axis.
pub fn z_rotation(phi: f64) -> Operator2 {
    let half = 0.5 * phi;
    Operator2::new([
        [Complex64::from_polar(1.0, -half), Complex64::new(0.0, 0.0)],
        [Complex64::new(0.0, 0.0), Complex64::from_polar(1.0, half)],
    ])
    .expect("finite phase")
}
