//! Predictive open-system evolution of the atom as exact 4×4 superoperators,
//! plus a fixed-step Runge–Kutta integrator of the master equation that
//! serves as an independent numerical oracle.
//!
//! Operators are vectorized in the order `(ee, eg, ge, gg)`; column `j` of a
//! [`Superoperator`] is the image of the `j`-th basis operator `|i⟩⟨k|`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qop::{normalize_to_density, pauli, DensityMatrix, Operator2, Pauli, Role, E, G};

/// Trace drift above which an RK4 result is renormalized (and flagged).
pub const RK4_TRACE_DRIFT_TOL: f64 = 1e-12;

/// `|Ω|²τ²` below which the Rabi terms use their Taylor series.
const RABI_SERIES_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    Spontaneous,
    Thermal,
    Driven,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 3] = [ChannelKind::Spontaneous, ChannelKind::Thermal, ChannelKind::Driven];

    pub fn name(self) -> &'static str {
        match self {
            ChannelKind::Spontaneous => "spontaneous",
            ChannelKind::Thermal => "thermal",
            ChannelKind::Driven => "driven",
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChannelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spontaneous" => Ok(ChannelKind::Spontaneous),
            "thermal" => Ok(ChannelKind::Thermal),
            "driven" => Ok(ChannelKind::Driven),
            other => Err(Error::InvalidParams(format!("unknown channel `{other}`"))),
        }
    }
}

/// Physical parameters of one of the three channels.
///
/// `gamma` is half the Einstein A-coefficient; `nbar` is only read by the
/// thermal channel and `v` only by the driven one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub kind: ChannelKind,
    pub gamma: f64,
    pub nbar: f64,
    pub v: f64,
    pub tau: f64,
}

impl ChannelParams {
    pub fn spontaneous(gamma: f64, tau: f64) -> Self {
        Self { kind: ChannelKind::Spontaneous, gamma, nbar: 0.0, v: 0.0, tau }
    }

    pub fn thermal(gamma: f64, nbar: f64, tau: f64) -> Self {
        Self { kind: ChannelKind::Thermal, gamma, nbar, v: 0.0, tau }
    }

    pub fn driven(gamma: f64, v: f64, tau: f64) -> Self {
        Self { kind: ChannelKind::Driven, gamma, nbar: 0.0, v, tau }
    }

    pub fn with_tau(self, tau: f64) -> Self {
        Self { tau, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let check = |name: &str, value: f64, ok: bool| {
            if value.is_finite() && ok {
                Ok(())
            } else {
                Err(Error::InvalidParams(format!("{name} = {value}")))
            }
        };
        check("gamma", self.gamma, self.gamma > 0.0)?;
        check("tau", self.tau, self.tau >= 0.0)?;
        check("nbar", self.nbar, self.nbar >= 0.0)?;
        check("v", self.v, self.v >= 0.0)
    }

    pub fn effective_nbar(&self) -> f64 {
        match self.kind {
            ChannelKind::Thermal => self.nbar,
            _ => 0.0,
        }
    }

    pub fn effective_v(&self) -> f64 {
        match self.kind {
            ChannelKind::Driven => self.v,
            _ => 0.0,
        }
    }
}

/// A linear map on the four-dimensional operator space of the atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Superoperator {
    matrix: [[Complex64; 4]; 4],
}

impl Superoperator {
    pub fn from_matrix(matrix: [[Complex64; 4]; 4]) -> Self {
        Self { matrix }
    }

    pub fn identity() -> Self {
        let mut matrix = [[Complex64::new(0.0, 0.0); 4]; 4];
        for (j, row) in matrix.iter_mut().enumerate() {
            row[j] = Complex64::new(1.0, 0.0);
        }
        Self { matrix }
    }

    /// Builds the matrix whose columns are the images of the basis operators.
    pub fn from_action(action: impl Fn(&Operator2) -> Operator2) -> Self {
        let mut matrix = [[Complex64::new(0.0, 0.0); 4]; 4];
        for (j, (i, k)) in BASIS.iter().enumerate() {
            let image = action(&Operator2::basis(*i, *k)).to_vec4();
            for (row, value) in matrix.iter_mut().zip(image) {
                row[j] = value;
            }
        }
        Self { matrix }
    }

    pub fn matrix(&self) -> &[[Complex64; 4]; 4] {
        &self.matrix
    }

    pub fn apply(&self, a: &Operator2) -> Operator2 {
        let x = a.to_vec4();
        let mut y = [Complex64::new(0.0, 0.0); 4];
        for (yi, row) in y.iter_mut().zip(&self.matrix) {
            *yi = row.iter().zip(&x).map(|(m, xj)| m * xj).sum();
        }
        Operator2::from_vec4(y)
    }

    /// Hilbert–Schmidt adjoint: the conjugate transpose in this vectorization.
    pub fn adjoint(&self) -> Self {
        let mut matrix = [[Complex64::new(0.0, 0.0); 4]; 4];
        for (r, row) in matrix.iter_mut().enumerate() {
            for (c, x) in row.iter_mut().enumerate() {
                *x = self.matrix[c][r].conj();
            }
        }
        Self { matrix }
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn compose(&self, first: &Self) -> Self {
        let mut matrix = [[Complex64::new(0.0, 0.0); 4]; 4];
        for (r, row) in matrix.iter_mut().enumerate() {
            for (c, x) in row.iter_mut().enumerate() {
                *x = (0..4).map(|k| self.matrix[r][k] * first.matrix[k][c]).sum();
            }
        }
        Self { matrix }
    }

    pub fn dist(&self, other: &Self) -> f64 {
        self.matrix.iter().flatten().zip(other.matrix.iter().flatten()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Choi matrix `Σ_ik |i⟩⟨k| ⊗ S(|i⟩⟨k|)`, indexed by `(2i + a, 2k + b)`.
    pub fn choi_matrix(&self) -> [[Complex64; 4]; 4] {
        let mut choi = [[Complex64::new(0.0, 0.0); 4]; 4];
        for (i, k) in BASIS {
            let image = self.apply(&Operator2::basis(i, k));
            for a in 0..2 {
                for b in 0..2 {
                    choi[2 * i + a][2 * k + b] = image.get(a, b);
                }
            }
        }
        choi
    }

    /// Whether the Choi matrix is positive semi-definite within `tol`.
    pub fn is_completely_positive(&self, tol: f64) -> bool {
        hermitian_psd_within(&self.choi_matrix(), tol)
    }
}

const BASIS: [(usize, usize); 4] = [(E, E), (E, G), (G, E), (G, G)];

/// Tests `A + tol·1 ⪰ 0` for a (numerically) Hermitian 4×4 matrix by
/// attempting a Cholesky factorization of the shifted matrix.
fn hermitian_psd_within(a: &[[Complex64; 4]; 4], tol: f64) -> bool {
    let n = 4;
    let mut h = [[Complex64::new(0.0, 0.0); 4]; 4];
    for r in 0..n {
        for c in 0..n {
            h[r][c] = 0.5 * (a[r][c] + a[c][r].conj());
        }
        h[r][r] += tol;
    }
    let mut l = [[Complex64::new(0.0, 0.0); 4]; 4];
    for j in 0..n {
        let diag = h[j][j].re - (0..j).map(|k| l[j][k].norm_sqr()).sum::<f64>();
        if diag < 0.0 {
            return false;
        }
        let pivot = diag.sqrt();
        l[j][j] = Complex64::new(pivot, 0.0);
        for i in j + 1..n {
            let s: Complex64 = (0..j).map(|k| l[i][k] * l[j][k].conj()).sum();
            l[i][j] = if pivot > 0.0 { (h[i][j] - s) / pivot } else { Complex64::new(0.0, 0.0) };
        }
    }
    true
}

/// `cos(Ωτ)` and `sin(Ωτ)/Ω` for `Ω² = V² − Γ²/4`, continued analytically
/// to `cosh`/`sinh` when `Ω²` is negative.
pub fn rabi_terms(gamma: f64, v: f64, tau: f64) -> (f64, f64) {
    let omega_sq = v * v - 0.25 * gamma * gamma;
    let z = omega_sq * tau * tau;
    if z.abs() < RABI_SERIES_THRESHOLD {
        let cos = 1.0 - z / 2.0 + z * z / 24.0;
        let sinc = tau * (1.0 - z / 6.0 + z * z / 120.0);
        (cos, sinc)
    } else if omega_sq > 0.0 {
        let omega = omega_sq.sqrt();
        ((omega * tau).cos(), (omega * tau).sin() / omega)
    } else {
        let kappa = (-omega_sq).sqrt();
        ((kappa * tau).cosh(), (kappa * tau).sinh() / kappa)
    }
}

/// Spontaneous emission into the vacuum.
fn spontaneous_action(gamma: f64, tau: f64, a: &Operator2) -> Operator2 {
    let pop = (-2.0 * gamma * tau).exp();
    let coh = (-gamma * tau).exp();
    Operator2::from_vec4([a.ee() * pop, a.eg() * coh, a.ge() * coh, a.gg() + a.ee() * (1.0 - pop)])
}

/// Thermal bath of mean occupation `nbar`. Coherences decay at `Γ(2n̄+1)`,
/// populations relax at twice that rate.
fn thermal_action(gamma: f64, nbar: f64, tau: f64, a: &Operator2) -> Operator2 {
    let width = 2.0 * nbar + 1.0;
    let up = nbar / width;
    let down = (nbar + 1.0) / width;
    let pop = (-2.0 * gamma * width * tau).exp();
    let coh = (-gamma * width * tau).exp();
    Operator2::from_vec4([
        a.ee() * (up + down * pop) + a.gg() * up * (1.0 - pop),
        a.eg() * coh,
        a.ge() * coh,
        a.gg() * (down + up * pop) + a.ee() * down * (1.0 - pop),
    ])
}

/// Resonant drive plus spontaneous emission: exact solution of the affine
/// Bloch equations `u̇ = −Γu`, `v̇ = −Γv − Vw`, `ẇ = Vv − 2Γ(w + 1)`,
/// extended linearly to non-Hermitian, non-unit-trace operators.
fn driven_action(gamma: f64, v: f64, tau: f64, a: &Operator2) -> Operator2 {
    let t = a.trace();
    let bu = pauli(Pauli::X).matmul(a).trace();
    let bv = pauli(Pauli::Y).matmul(a).trace();
    let bw = pauli(Pauli::Z).matmul(a).trace();

    let denom = v * v + 2.0 * gamma * gamma;
    let v_ss = t * (2.0 * gamma * v / denom);
    let w_ss = t * (-2.0 * gamma * gamma / denom);

    let (cos, sinc) = rabi_terms(gamma, v, tau);
    let envelope = (-1.5 * gamma * tau).exp();
    let dv = bv - v_ss;
    let dw = bw - w_ss;
    // exp(Bτ) = e^{−3Γτ/2}[cos Ωτ + (sin Ωτ/Ω) K], K = [[Γ/2, −V], [V, −Γ/2]]
    let u_t = bu * (-gamma * tau).exp();
    let v_t = v_ss + (dv * cos + (dv * (0.5 * gamma) - dw * v) * sinc) * envelope;
    let w_t = w_ss + (dw * cos + (dv * v - dw * (0.5 * gamma)) * sinc) * envelope;

    let half = 0.5;
    let i = Complex64::new(0.0, 1.0);
    Operator2::from_vec4([(t + w_t) * half, (u_t - i * v_t) * half, (u_t + i * v_t) * half, (t - w_t) * half])
}

/// Exact superoperator of the channel over the interval `params.tau`.
pub fn build_superoperator(params: &ChannelParams) -> Result<Superoperator> {
    params.validate()?;
    let p = *params;
    Ok(match p.kind {
        ChannelKind::Spontaneous => Superoperator::from_action(|a| spontaneous_action(p.gamma, p.tau, a)),
        ChannelKind::Thermal => Superoperator::from_action(|a| thermal_action(p.gamma, p.nbar, p.tau, a)),
        ChannelKind::Driven => Superoperator::from_action(|a| driven_action(p.gamma, p.v, p.tau, a)),
    })
}

pub fn apply(s: &Superoperator, a: &Operator2) -> Operator2 {
    s.apply(a)
}

pub fn adjoint(s: &Superoperator) -> Superoperator {
    s.adjoint()
}

/// Right-hand side `dρ/dt` of the master equation (`params.tau` is ignored).
///
/// `H = (V/2)(σ̂₊ + σ̂₋)`, emission at rate `Γ(n̄+1)` and absorption at `Γn̄`,
/// each with the dissipator `2LρL† − L†Lρ − ρL†L`.
pub fn lindblad_rhs(params: &ChannelParams, rho: &Operator2) -> Operator2 {
    let nbar = params.effective_nbar();
    let v = params.effective_v();
    let sp = Operator2::sigma_plus();
    let sm = Operator2::sigma_minus();

    let hamiltonian = (sp + sm) * (0.5 * v);
    let unitary = hamiltonian.commutator(rho) * Complex64::new(0.0, -1.0);
    let dissipator = |l: &Operator2, ld: &Operator2| {
        let ldl = ld.matmul(l);
        l.matmul(rho).matmul(ld) * 2.0 - ldl.matmul(rho) - rho.matmul(&ldl)
    };
    let emission = dissipator(&sm, &sp) * (params.gamma * (nbar + 1.0));
    let absorption = if nbar > 0.0 { dissipator(&sp, &sm) * (params.gamma * nbar) } else { Operator2::zero() };
    unitary + emission + absorption
}

/// Fixed-step classic RK4 over the master equation. Each call to `next`
/// advances one step, so long runs can be abandoned between steps.
#[derive(Debug, Clone)]
pub struct Rk4Stepper {
    params: ChannelParams,
    h: f64,
    state: Operator2,
    remaining: u64,
}

impl Rk4Stepper {
    pub fn new(params: &ChannelParams, initial: Operator2, steps: u64) -> Result<Self> {
        if steps == 0 {
            return Err(Error::ZeroSteps);
        }
        params.validate()?;
        Ok(Self { params: *params, h: params.tau / steps as f64, state: initial, remaining: steps })
    }

    pub fn state(&self) -> &Operator2 {
        &self.state
    }

    pub fn remaining(&self) -> u64 {
        self.remaining
    }

    /// Runs every remaining step and returns the final operator.
    pub fn finish(mut self) -> Operator2 {
        while self.next().is_some() {}
        self.state
    }
}

impl Iterator for Rk4Stepper {
    type Item = Operator2;

    fn next(&mut self) -> Option<Operator2> {
        if self.remaining == 0 {
            return None;
        }
        let f = |x: &Operator2| lindblad_rhs(&self.params, x);
        let h = self.h;
        let y = self.state;
        let k1 = f(&y);
        let k2 = f(&(y + k1 * (0.5 * h)));
        let k3 = f(&(y + k2 * (0.5 * h)));
        let k4 = f(&(y + k3 * h));
        self.state = y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        self.remaining -= 1;
        Some(self.state)
    }
}

/// Propagates an arbitrary operator through the master equation by RK4.
pub fn propagate_rk4(params: &ChannelParams, initial: &Operator2, steps: u64) -> Result<Operator2> {
    Ok(Rk4Stepper::new(params, *initial, steps)?.finish())
}

/// Result of [`integrate_lindblad`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integrated {
    pub rho: DensityMatrix,
    /// `|Tr ρ − 1|` before any renormalization.
    pub trace_drift: f64,
    /// Set when the drift exceeded [`RK4_TRACE_DRIFT_TOL`] and the state was rescaled.
    pub renormalized: bool,
}

pub fn integrate_lindblad(params: &ChannelParams, rho0: &DensityMatrix, steps: u64) -> Result<Integrated> {
    let out = propagate_rk4(params, rho0.op(), steps)?;
    let trace_drift = (out.trace() - Complex64::new(1.0, 0.0)).norm();
    let renormalized = trace_drift > RK4_TRACE_DRIFT_TOL;
    let rho = normalize_to_density(&out, Role::Predictive)?;
    Ok(Integrated { rho, trace_drift, renormalized })
}

/// Superoperator assembled column by column from RK4 propagation of the
/// basis operators.
pub fn rk4_superoperator(params: &ChannelParams, steps: u64) -> Result<Superoperator> {
    params.validate()?;
    if steps == 0 {
        return Err(Error::ZeroSteps);
    }
    Ok(Superoperator::from_action(|a| Rk4Stepper::new(params, *a, steps).expect("validated above").finish()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qop::{from_bloch, BlochVector};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_op(seed: u64) -> Operator2 {
        // small deterministic LCG, enough for a handful of generic operators
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        Operator2::from_vec4([c(next(), next()), c(next(), next()), c(next(), next()), c(next(), next())])
    }

    #[test]
    fn spontaneous_tau_zero_is_identity() {
        let s = build_superoperator(&ChannelParams::spontaneous(1.3, 0.0)).unwrap();
        assert_eq!(s, Superoperator::identity());
    }

    #[test]
    fn spontaneous_excited_population_decays() {
        let (g, t) = (0.7, 1.1);
        let s = build_superoperator(&ChannelParams::spontaneous(g, t)).unwrap();
        let out = s.apply(&Operator2::excited());
        let p = (-2.0 * g * t).exp();
        assert!(out.dist(&Operator2::real(p, 0.0, 0.0, 1.0 - p)) < 1e-15);
        let coh = s.apply(&Operator2::sigma_plus());
        assert!(coh.dist(&(Operator2::sigma_plus() * (-g * t).exp())) < 1e-15);
        let late = build_superoperator(&ChannelParams::spontaneous(1.0, 60.0)).unwrap();
        assert!(late.apply(&Operator2::excited()).dist(&Operator2::ground()) < 1e-15);
    }

    #[test]
    fn thermal_zero_nbar_matches_spontaneous() {
        for tau in [0.0, 0.3, 2.0, 9.0] {
            let a = build_superoperator(&ChannelParams::thermal(0.8, 0.0, tau)).unwrap();
            let b = build_superoperator(&ChannelParams::spontaneous(0.8, tau)).unwrap();
            assert!(a.dist(&b) < 1e-12);
            let a = build_superoperator(&ChannelParams::thermal(0.8, 1e-12, tau)).unwrap();
            assert!(a.dist(&b) < 1e-10);
        }
    }

    #[test]
    fn driven_without_drive_is_spontaneous() {
        for tau in [0.0, 0.4, 3.0] {
            let a = build_superoperator(&ChannelParams::driven(1.2, 0.0, tau)).unwrap();
            let b = build_superoperator(&ChannelParams::spontaneous(1.2, tau)).unwrap();
            assert!(a.dist(&b) < 1e-12, "tau={tau}: {}", a.dist(&b));
        }
    }

    #[test]
    fn driven_long_time_reaches_steady_state() {
        let (g, v) = (1.0, 4.0);
        let s = build_superoperator(&ChannelParams::driven(g, v, 20.0)).unwrap();
        let d = v * v + 2.0 * g * g;
        let expected = BlochVector::new(0.0, 2.0 * g * v / d, -2.0 * g * g / d);
        for b0 in [BlochVector::new(0.0, 0.0, 1.0), BlochVector::new(0.6, -0.3, 0.1), BlochVector::new(0.0, 0.0, -1.0)]
        {
            let rho = from_bloch(b0, Role::Predictive).unwrap();
            let out = DensityMatrix::new(s.apply(rho.op()), Role::Predictive).unwrap();
            assert!(crate::qop::to_bloch(&out).max_diff(&expected) < 1e-8);
        }
    }

    #[test]
    fn adjoint_defining_property() {
        let params = [
            ChannelParams::spontaneous(1.0, 0.7),
            ChannelParams::thermal(0.5, 1.5, 1.2),
            ChannelParams::driven(1.0, 3.0, 0.9),
            ChannelParams::driven(1.0, 0.2, 2.5),
        ];
        for (n, p) in params.iter().enumerate() {
            let s = build_superoperator(p).unwrap();
            let sd = s.adjoint();
            let a = random_op(n as u64 * 2);
            let b = random_op(n as u64 * 2 + 1);
            let lhs = a.hs_inner(&s.apply(&b));
            let rhs = sd.apply(&a).hs_inner(&b);
            assert!((lhs - rhs).norm() < 1e-12);
            assert_eq!(sd.adjoint(), s);
        }
        assert_eq!(Superoperator::identity().adjoint(), Superoperator::identity());
    }

    #[test]
    fn adjoint_spontaneous_on_ground() {
        let (g, t) = (1.0, 0.8);
        let s = build_superoperator(&ChannelParams::spontaneous(g, t)).unwrap();
        let out = s.adjoint().apply(&Operator2::ground());
        let p = (-2.0 * g * t).exp();
        assert!(out.dist(&Operator2::real(1.0 - p, 0.0, 0.0, 1.0)) < 1e-15);
    }

    #[test]
    fn adjoint_is_unital() {
        for kind in ChannelKind::ALL {
            let p = ChannelParams { kind, gamma: 0.9, nbar: 0.7, v: 2.2, tau: 1.4 };
            let s = build_superoperator(&p).unwrap();
            assert!(s.adjoint().apply(&Operator2::identity()).dist(&Operator2::identity()) < 1e-10);
        }
    }

    #[test]
    fn channels_are_completely_positive_and_hermiticity_preserving() {
        for kind in ChannelKind::ALL {
            for tau in [0.0, 0.2, 1.0, 5.0] {
                let p = ChannelParams { kind, gamma: 1.0, nbar: 0.5, v: 4.0, tau };
                let s = build_superoperator(&p).unwrap();
                assert!(s.is_completely_positive(1e-10), "{kind} tau={tau}");
                let a = random_op(tau.to_bits());
                assert!(s.apply(&a.dagger()).dist(&s.apply(&a).dagger()) < 1e-12);
            }
        }
    }

    #[test]
    fn choi_detects_non_cp_map() {
        // transpose is positive but not completely positive
        let transpose = Superoperator::from_action(|a| Operator2::from_vec4([a.ee(), a.ge(), a.eg(), a.gg()]));
        assert!(!transpose.is_completely_positive(1e-10));
        assert!(Superoperator::identity().is_completely_positive(1e-10));
    }

    #[test]
    fn rhs_examples() {
        let g = 0.9;
        let p = ChannelParams::spontaneous(g, 0.0);
        assert_eq!(lindblad_rhs(&p, &Operator2::ground()), Operator2::zero());
        let d = lindblad_rhs(&p, &Operator2::excited());
        assert!(d.dist(&Operator2::real(-2.0 * g, 0.0, 0.0, 2.0 * g)) < 1e-15);

        let (g, v) = (1.0, 4.0);
        let den = v * v + 2.0 * g * g;
        let ss = BlochVector::new(0.0, 2.0 * g * v / den, -2.0 * g * g / den).to_operator();
        assert!(lindblad_rhs(&ChannelParams::driven(g, v, 0.0), &ss).max_abs() < 1e-12);
    }

    #[test]
    fn rhs_is_traceless() {
        for kind in ChannelKind::ALL {
            let p = ChannelParams { kind, gamma: 1.3, nbar: 2.0, v: 1.7, tau: 0.0 };
            for seed in 0..5 {
                assert!(lindblad_rhs(&p, &random_op(seed)).trace().norm() < 1e-14);
            }
        }
    }

    #[test]
    fn integrate_rejects_zero_steps_and_handles_tau_zero() {
        let rho = DensityMatrix::new(Operator2::excited(), Role::Predictive).unwrap();
        let p = ChannelParams::driven(1.0, 2.0, 0.0);
        assert!(matches!(integrate_lindblad(&p, &rho, 0), Err(Error::ZeroSteps)));
        let out = integrate_lindblad(&p, &rho, 7).unwrap();
        assert_eq!(*out.rho.op(), Operator2::excited());
        assert!(!out.renormalized);
    }

    #[test]
    fn stepper_can_stop_early() {
        let p = ChannelParams::spontaneous(1.0, 1.0);
        let mut stepper = Rk4Stepper::new(&p, Operator2::excited(), 100).unwrap();
        let partial = stepper.by_ref().take(50).last().unwrap();
        assert_eq!(stepper.remaining(), 50);
        assert!((partial.ee().re - (-1.0f64).exp()).abs() < 1e-8);
    }

    #[test]
    fn rabi_terms_continuous_through_critical_damping() {
        let g = 1.0;
        for tau in [0.1, 1.0, 4.0] {
            let (c0, s0) = rabi_terms(g, 0.5 - 1e-6, tau);
            let (c1, s1) = rabi_terms(g, 0.5, tau);
            let (c2, s2) = rabi_terms(g, 0.5 + 1e-6, tau);
            assert!((c0 - c1).abs() < 1e-4 && (c2 - c1).abs() < 1e-4);
            assert!((s0 - s1).abs() < 1e-4 && (s2 - s1).abs() < 1e-4);
            assert_eq!(c1, 1.0);
            assert_eq!(s1, tau);
        }
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(build_superoperator(&ChannelParams::spontaneous(0.0, 1.0)).is_err());
        assert!(build_superoperator(&ChannelParams::spontaneous(1.0, -1.0)).is_err());
        assert!(build_superoperator(&ChannelParams::thermal(1.0, -0.1, 1.0)).is_err());
        assert!(build_superoperator(&ChannelParams::driven(1.0, f64::NAN, 1.0)).is_err());
        assert!("lossy".parse::<ChannelKind>().is_err());
    }
}
