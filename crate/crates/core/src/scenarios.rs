//! Closed-form results for the spontaneous, thermal and driven atom,
//! written out element by element. They are kept independent of the
//! superoperator machinery so each can be checked against it, and they
//! also produce the figure data series.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::channels::{build_superoperator, rabi_terms, ChannelParams};
use crate::error::{Error, Result};
use crate::qop::{BlochVector, Operator2, PomElement};
use crate::retrodiction::{retrodict_open, IMPOSSIBLE_OUTCOME_TOL};

/// `(P(e|g), P(g|g))` for an unbiased `{e, g}` source and a ground-state
/// detection after an interval `tau` of free decay.
pub fn spont_prep_probs(gamma: f64, tau: f64) -> (f64, f64) {
    let x = (-2.0 * gamma * tau).exp();
    let n = 2.0 - x;
    ((1.0 - x) / n, 1.0 / n)
}

fn checked_norm(n: f64) -> Result<f64> {
    if n > IMPOSSIBLE_OUTCOME_TOL {
        Ok(n)
    } else {
        Err(Error::ImpossibleOutcome(n))
    }
}

/// Normalized retrodictive matrix under spontaneous emission, element by element.
pub fn spont_retro_elements(pom: &PomElement, gamma: f64, tau: f64) -> Result<Operator2> {
    let m = pom.op();
    let x = (-2.0 * gamma * tau).exp();
    let coh = (-gamma * tau).exp();
    let (pee, pgg) = (m.ee().re, m.gg().re);
    let n = checked_norm(x * pee + (2.0 - x) * pgg)?;
    Ok(Operator2::from_vec4([
        Complex64::new((x * pee + (1.0 - x) * pgg) / n, 0.0),
        m.eg() * (coh / n),
        m.ge() * (coh / n),
        Complex64::new(pgg / n, 0.0),
    ]))
}

/// Retrodictive matrix for a `|θ⟩⟨θ|` outcome under spontaneous emission.
pub fn spont_theta_elements(theta: f64, gamma: f64, tau: f64) -> Operator2 {
    let (s, c) = theta.sin_cos();
    let x = (-2.0 * gamma * tau).exp();
    let den = 1.0 + c * (1.0 - x);
    let off = 0.5 * s * (-gamma * tau).exp() / den;
    Operator2::real(0.5 * (1.0 + c * (1.0 - 2.0 * x)) / den, off, off, 0.5 * (1.0 + c) / den)
}

/// `(P(e|θ), P(+|θ))` for the `{p|e⟩⟨e|, (1−p)|+⟩⟨+|}` source.
///
/// The `|+⟩` numerator carries `sin θ·e^{−Γτ}`, the only factor for which
/// the two probabilities sum to one.
pub fn superposition_posterior(theta: f64, p: f64, gamma: f64, tau: f64) -> (f64, f64) {
    let (s, c) = theta.sin_cos();
    let x = (-2.0 * gamma * tau).exp();
    let coh = (-gamma * tau).exp();
    let den = 1.0 + c * (1.0 - x) + (1.0 - p) * s * coh - p * c * x;
    let pe = p * (1.0 + c * (1.0 - 2.0 * x)) / den;
    let pplus = (1.0 - p) * (1.0 + c * (1.0 - x) + s * coh) / den;
    (pe, pplus)
}

/// The `τ = 0` limit of [`superposition_posterior`].
pub fn superposition_posterior_at_zero(theta: f64, p: f64) -> (f64, f64) {
    let (s, c) = theta.sin_cos();
    let e = p * (1.0 - c);
    let plus = (1.0 - p) * (1.0 + s);
    (e / (e + plus), plus / (e + plus))
}

/// Normalized retrodictive matrix for a thermal bath, element by element.
pub fn thermal_retro_elements(pom: &PomElement, gamma: f64, nbar: f64, tau: f64) -> Result<Operator2> {
    let m = pom.op();
    let width = 2.0 * nbar + 1.0;
    let x = (-2.0 * gamma * width * tau).exp();
    let coh = (-gamma * width * tau).exp();
    let (pee, pgg) = (m.ee().re, m.gg().re);
    let up = nbar / width;
    let down = (nbar + 1.0) / width;
    let n = checked_norm(pee * (2.0 * nbar / width + x / width) + pgg * ((2.0 * nbar + 2.0) / width - x / width))?;
    let ee = pee * (up + down * x) + pgg * down * (1.0 - x);
    let gg = pgg * (down + up * x) + pee * up * (1.0 - x);
    Ok(Operator2::from_vec4([
        Complex64::new(ee / n, 0.0),
        m.eg() * (coh / n),
        m.ge() * (coh / n),
        Complex64::new(gg / n, 0.0),
    ]))
}

/// Steady-state Bloch vector of the resonantly driven, damped atom.
pub fn driven_steady_state(gamma: f64, v: f64) -> BlochVector {
    let d = v * v + 2.0 * gamma * gamma;
    BlochVector::new(0.0, 2.0 * gamma * v / d, -2.0 * gamma * gamma / d)
}

/// Bloch vector of the driven atom after `tau`, from the printed solution
/// of the optical Bloch equations.
pub fn driven_bloch(b0: BlochVector, gamma: f64, v: f64, tau: f64) -> BlochVector {
    let d = v * v + 2.0 * gamma * gamma;
    let g2 = gamma * gamma;
    let (cos, sinc) = rabi_terms(gamma, v, tau);
    let env = (-1.5 * gamma * tau).exp();
    let u = b0.u * (-gamma * tau).exp();
    let vv = (2.0 * gamma * v
        + env * ((d * b0.v - 2.0 * gamma * v) * cos + (-3.0 * g2 * v + d * (-v * b0.w + gamma * b0.v / 2.0)) * sinc))
        / d;
    let w = (-2.0 * g2
        + env
            * ((2.0 * g2 + d * b0.w) * cos
                + (-2.0 * gamma * (v * v + g2 / 2.0) + d * (v * b0.v - gamma * b0.w / 2.0)) * sinc))
        / d;
    BlochVector::new(u, vv, w)
}

fn from_numerators(ee: f64, gg: f64, eg: Complex64, ge: Complex64) -> Operator2 {
    let n = ee + gg;
    Operator2::from_vec4([Complex64::new(ee / n, 0.0), eg / n, ge / n, Complex64::new(gg / n, 0.0)])
}

/// Retrodictive matrix of the driven atom for the outcome `|e⟩⟨e|`.
pub fn driven_retro_excited(gamma: f64, v: f64, tau: f64) -> Operator2 {
    let d = v * v + 2.0 * gamma * gamma;
    let g2 = gamma * gamma;
    let (cos, sinc) = rabi_terms(gamma, v, tau);
    let env = (-1.5 * gamma * tau).exp();
    let ee = (v * v + env * ((v * v + 4.0 * g2) * cos - 0.5 * gamma * (5.0 * v * v + 4.0 * g2) * sinc)) / (2.0 * d);
    let gg = v * v / (2.0 * d) * (1.0 - env * (cos + 1.5 * gamma * sinc));
    let eg = Complex64::new(0.0, -0.5 * v * env * sinc);
    from_numerators(ee, gg, eg, -eg)
}

/// Retrodictive matrix of the driven atom for the outcome `½(1̂ + σ̂₂)`.
pub fn driven_retro_sigma2(gamma: f64, v: f64, tau: f64) -> Operator2 {
    let d = v * v + 2.0 * gamma * gamma;
    let g2 = gamma * gamma;
    let (cos, sinc) = rabi_terms(gamma, v, tau);
    let env = (-1.5 * gamma * tau).exp();
    let drift = 2.0 * gamma * v;
    let ee = 0.5 * (1.0 + (drift - env * (drift * cos + v * (v * v + 5.0 * g2) * sinc)) / d);
    let gg = 0.5 * (1.0 + (drift - env * (drift * cos + v * (g2 - v * v) * sinc)) / d);
    let eg = Complex64::new(0.0, -0.5 * env * (cos + 0.5 * gamma * sinc));
    from_numerators(ee, gg, eg, -eg)
}

/// Retrodictive matrix of the driven atom for the outcome `½(1̂ + σ̂₁)`:
/// diagonals stay at ½ and the real coherences decay as `½e^{−Γτ}`.
pub fn driven_retro_sigma1(gamma: f64, _v: f64, tau: f64) -> Operator2 {
    let off = 0.5 * (-gamma * tau).exp();
    Operator2::real(0.5, off, off, 0.5)
}

/// A tabulated set of named series over a common `tau` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioCurve {
    tau_grid: Vec<f64>,
    series: Vec<(String, Vec<f64>)>,
}

impl ScenarioCurve {
    pub fn new(tau_grid: Vec<f64>, series: Vec<(String, Vec<f64>)>) -> Result<Self> {
        if series.iter().any(|(_, s)| s.len() != tau_grid.len()) {
            return Err(Error::InvalidGrid("series length differs from tau grid"));
        }
        Ok(Self { tau_grid, series })
    }

    pub fn tau_grid(&self) -> &[f64] {
        &self.tau_grid
    }

    pub fn series(&self) -> &[(String, Vec<f64>)] {
        &self.series
    }

    pub fn get(&self, name: &str) -> Option<&[f64]> {
        self.series.iter().find(|(n, _)| n == name).map(|(_, s)| s.as_slice())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FigureId {
    F1a,
    F1b,
    F2a,
    F2b,
    F2c,
    F2d,
    F3a,
    F3b,
    F3c,
    F3d,
    F4a,
    F4b,
}

impl FigureId {
    pub const ALL: [FigureId; 12] = [
        FigureId::F1a,
        FigureId::F1b,
        FigureId::F2a,
        FigureId::F2b,
        FigureId::F2c,
        FigureId::F2d,
        FigureId::F3a,
        FigureId::F3b,
        FigureId::F3c,
        FigureId::F3d,
        FigureId::F4a,
        FigureId::F4b,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::F1a => "1a",
            FigureId::F1b => "1b",
            FigureId::F2a => "2a",
            FigureId::F2b => "2b",
            FigureId::F2c => "2c",
            FigureId::F2d => "2d",
            FigureId::F3a => "3a",
            FigureId::F3b => "3b",
            FigureId::F3c => "3c",
            FigureId::F3d => "3d",
            FigureId::F4a => "4a",
            FigureId::F4b => "4b",
        }
    }

    /// Upper end of the default grid, in units of `1/Γ`.
    pub fn default_gamma_tau_max(self) -> f64 {
        match self {
            FigureId::F1a | FigureId::F1b => 6.0,
            _ => 5.0,
        }
    }

    pub fn is_retrodictive(self) -> bool {
        matches!(
            self,
            FigureId::F1b
                | FigureId::F2b
                | FigureId::F2d
                | FigureId::F3b
                | FigureId::F3d
                | FigureId::F4a
                | FigureId::F4b
        )
    }

    pub fn series_names(self) -> &'static [&'static str] {
        match self {
            FigureId::F2c | FigureId::F2d | FigureId::F3c | FigureId::F3d => &["im_rho_eg", "im_rho_ge"],
            FigureId::F4b => &["re_rho_eg", "im_rho_eg", "re_rho_ge", "im_rho_ge"],
            _ => &["rho_ee", "rho_gg"],
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| Error::UnknownFigure(s.to_owned()))
    }
}

/// Physical parameters for figure generation. Figure 1 reads `gamma` and
/// `nbar`; figures 2–4 read `gamma` and `v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureParams {
    pub gamma: f64,
    pub nbar: f64,
    pub v: f64,
}

impl Default for FigureParams {
    fn default() -> Self {
        Self { gamma: 1.0, nbar: 1.0, v: 4.0 }
    }
}

/// `points` evenly spaced values of `τ` from 0 to the figure's default
/// `Γτ` range.
pub fn default_grid(figure: FigureId, gamma: f64, points: usize) -> Vec<f64> {
    linspace(0.0, figure.default_gamma_tau_max() / gamma, points)
}

pub fn linspace(start: f64, end: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        n => (0..n).map(|i| start + (end - start) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// The POM element measured (retrodictive figures) or the state prepared
/// (predictive figures) for each figure.
pub fn figure_operator(figure: FigureId, params: &FigureParams) -> Operator2 {
    match figure {
        FigureId::F1a | FigureId::F1b | FigureId::F2a | FigureId::F2b | FigureId::F2c | FigureId::F2d => {
            Operator2::excited()
        }
        FigureId::F3a | FigureId::F3b | FigureId::F3c | FigureId::F3d => BlochVector::new(0.0, 1.0, 0.0).to_operator(),
        FigureId::F4a | FigureId::F4b => driven_steady_state(params.gamma, params.v).to_operator(),
    }
}

fn figure_channel(figure: FigureId, params: &FigureParams, tau: f64) -> ChannelParams {
    match figure {
        FigureId::F1a | FigureId::F1b => ChannelParams::thermal(params.gamma, params.nbar, tau),
        _ => ChannelParams::driven(params.gamma, params.v, tau),
    }
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("empty"));
    }
    if grid.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::InvalidGrid("values must be finite and non-negative"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid("values must be strictly ascending"));
    }
    Ok(())
}

/// Series plotted in one panel of figures 1–4.
pub fn figure_data(figure: FigureId, params: &FigureParams, tau_grid: &[f64]) -> Result<ScenarioCurve> {
    validate_grid(tau_grid)?;
    let op = figure_operator(figure, params);
    let names = figure.series_names();
    let mut columns: Vec<Vec<f64>> = vec![Vec::with_capacity(tau_grid.len()); names.len()];
    let pom = PomElement::new(figure.name(), op)?;

    for &tau in tau_grid {
        let channel = figure_channel(figure, params, tau);
        let rho = if figure.is_retrodictive() {
            *retrodict_open(&channel, &pom)?.rho_retr.op()
        } else {
            build_superoperator(&channel)?.apply(&op)
        };
        let row: Vec<f64> = match names.len() {
            2 if names[0] == "rho_ee" => vec![rho.ee().re, rho.gg().re],
            2 => vec![rho.eg().im, rho.ge().im],
            _ => vec![rho.eg().re, rho.eg().im, rho.ge().re, rho.ge().im],
        };
        for (col, value) in columns.iter_mut().zip(row) {
            col.push(value);
        }
    }
    let series = names.iter().map(|n| n.to_string()).zip(columns).collect();
    ScenarioCurve::new(tau_grid.to_vec(), series)
}
