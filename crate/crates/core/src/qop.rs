//! Exact 2×2 complex operator algebra and the validated quantum-mechanical
//! types built on it.
//!
//! The basis ordering is `(e, g)` everywhere: index 0 is the excited state
//! and index 1 the ground state, so `entries[0][1]` is `⟨e|A|g⟩`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub const HERMITICITY_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const COMPLETENESS_TOL: f64 = 1e-10;
pub const ENSEMBLE_TRACE_TOL: f64 = 1e-10;
pub const BLOCH_NORM_TOL: f64 = 1e-10;

/// Index of the excited state.
pub const E: usize = 0;
/// Index of the ground state.
pub const G: usize = 1;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// A 2×2 complex matrix in the `(e, g)` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Operator2 {
    entries: [[Complex64; 2]; 2],
}

impl Operator2 {
    pub fn new(entries: [[Complex64; 2]; 2]) -> Result<Self> {
        let op = Self { entries };
        if op.is_finite() {
            Ok(op)
        } else {
            Err(Error::NonFinite)
        }
    }

    pub(crate) const fn from_entries(entries: [[Complex64; 2]; 2]) -> Self {
        Self { entries }
    }

    /// Builds an operator from real entries `[[ee, eg], [ge, gg]]`.
    pub fn real(ee: f64, eg: f64, ge: f64, gg: f64) -> Self {
        Self::from_entries([
            [Complex64::new(ee, 0.0), Complex64::new(eg, 0.0)],
            [Complex64::new(ge, 0.0), Complex64::new(gg, 0.0)],
        ])
    }

    pub const fn zero() -> Self {
        Self::from_entries([[ZERO, ZERO], [ZERO, ZERO]])
    }

    pub const fn identity() -> Self {
        Self::from_entries([[ONE, ZERO], [ZERO, ONE]])
    }

    /// The basis operator `|row⟩⟨col|`.
    pub fn basis(row: usize, col: usize) -> Self {
        let mut entries = [[ZERO; 2]; 2];
        entries[row][col] = ONE;
        Self::from_entries(entries)
    }

    /// `|e⟩⟨e|`
    pub fn excited() -> Self {
        Self::basis(E, E)
    }

    /// `|g⟩⟨g|`
    pub fn ground() -> Self {
        Self::basis(G, G)
    }

    /// `σ̂₊ = |e⟩⟨g|`
    pub fn sigma_plus() -> Self {
        Self::basis(E, G)
    }

    /// `σ̂₋ = |g⟩⟨e|`
    pub fn sigma_minus() -> Self {
        Self::basis(G, E)
    }

    /// Outer product `|a⟩⟨b|` of two kets given as `(e, g)` amplitudes.
    pub fn outer(a: [Complex64; 2], b: [Complex64; 2]) -> Self {
        let mut entries = [[ZERO; 2]; 2];
        for (i, row) in entries.iter_mut().enumerate() {
            for (k, x) in row.iter_mut().enumerate() {
                *x = a[i] * b[k].conj();
            }
        }
        Self::from_entries(entries)
    }

    pub fn entries(&self) -> &[[Complex64; 2]; 2] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row][col]
    }

    pub fn ee(&self) -> Complex64 {
        self.entries[E][E]
    }

    pub fn eg(&self) -> Complex64 {
        self.entries[E][G]
    }

    pub fn ge(&self) -> Complex64 {
        self.entries[G][E]
    }

    pub fn gg(&self) -> Complex64 {
        self.entries[G][G]
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn scale(&self, c: impl Into<Complex64>) -> Self {
        let c = c.into();
        self.map(|z| z * c)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        let e = &self.entries;
        Self::from_entries([[f(e[0][0]), f(e[0][1])], [f(e[1][0]), f(e[1][1])]])
    }

    pub fn dagger(&self) -> Self {
        let e = &self.entries;
        Self::from_entries([[e[0][0].conj(), e[1][0].conj()], [e[0][1].conj(), e[1][1].conj()]])
    }

    pub fn trace(&self) -> Complex64 {
        self.entries[0][0] + self.entries[1][1]
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        let a = &self.entries;
        let b = &rhs.entries;
        let mut out = [[ZERO; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (k, x) in row.iter_mut().enumerate() {
                *x = a[i][0] * b[0][k] + a[i][1] * b[1][k];
            }
        }
        Self::from_entries(out)
    }

    pub fn commutator(&self, rhs: &Self) -> Self {
        self.matmul(rhs) - rhs.matmul(self)
    }

    /// Hilbert–Schmidt inner product `Tr(A†B)`.
    pub fn hs_inner(&self, rhs: &Self) -> Complex64 {
        self.entries.iter().flatten().zip(rhs.entries.iter().flatten()).map(|(a, b)| a.conj() * b).sum()
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `‖self − rhs‖∞` taken entrywise.
    pub fn dist(&self, rhs: &Self) -> f64 {
        (*self - *rhs).max_abs()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.dist(&self.dagger())
    }

    /// Eigenvalues of the Hermitian part, ascending, from the closed-form
    /// trace/determinant formula.
    pub fn eigenvalues_hermitian(&self) -> [f64; 2] {
        let a = self.entries[0][0].re;
        let d = self.entries[1][1].re;
        let b = 0.5 * (self.entries[0][1] + self.entries[1][0].conj());
        let mean = 0.5 * (a + d);
        let half_gap = 0.5 * (a - d);
        let radius = half_gap.hypot(b.norm());
        [mean - radius, mean + radius]
    }

    pub(crate) fn check_hermitian_psd(&self) -> Result<()> {
        if !self.is_finite() {
            return Err(Error::NonFinite);
        }
        let defect = self.hermiticity_defect();
        if defect > HERMITICITY_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let min = self.eigenvalues_hermitian()[0];
        if min < -PSD_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(())
    }

    /// Vectorization in the order `(ee, eg, ge, gg)`.
    pub fn to_vec4(&self) -> [Complex64; 4] {
        let e = &self.entries;
        [e[0][0], e[0][1], e[1][0], e[1][1]]
    }

    pub fn from_vec4(v: [Complex64; 4]) -> Self {
        Self::from_entries([[v[0], v[1]], [v[2], v[3]]])
    }
}

impl Add for Operator2 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let (a, b) = (&self.entries, &rhs.entries);
        Self::from_entries([[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]])
    }
}

impl Sub for Operator2 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for Operator2 {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|z| -z)
    }
}

impl Mul for Operator2 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.matmul(&rhs)
    }
}

impl Mul<f64> for Operator2 {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self.scale(rhs)
    }
}

impl Mul<Complex64> for Operator2 {
    type Output = Self;
    fn mul(self, rhs: Complex64) -> Self {
        self.scale(rhs)
    }
}

impl fmt::Display for Operator2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = &self.entries;
        write!(f, "[[{}, {}], [{}, {}]]", e[0][0], e[0][1], e[1][0], e[1][1])
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LabelledEntries {
    ee: [f64; 2],
    eg: [f64; 2],
    ge: [f64; 2],
    gg: [f64; 2],
}

/// Serialized as `{"ee":[re,im],"eg":[re,im],"ge":[re,im],"gg":[re,im]}`.
impl Serialize for Operator2 {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let pair = |z: Complex64| [z.re, z.im];
        LabelledEntries { ee: pair(self.ee()), eg: pair(self.eg()), ge: pair(self.ge()), gg: pair(self.gg()) }
            .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Operator2 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let l = LabelledEntries::deserialize(deserializer)?;
        let c = |p: [f64; 2]| Complex64::new(p[0], p[1]);
        Operator2::new([[c(l.ee), c(l.eg)], [c(l.ge), c(l.gg)]]).map_err(serde::de::Error::custom)
    }
}

/// Which of the three Pauli operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    X = 1,
    Y = 2,
    Z = 3,
}

impl Pauli {
    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_index(index: u8) -> Option<Self> {
        match index {
            1 => Some(Pauli::X),
            2 => Some(Pauli::Y),
            3 => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// `σ̂₁ = |e⟩⟨g| + |g⟩⟨e|`, `σ̂₂ = i(|g⟩⟨e| − |e⟩⟨g|)`, `σ̂₃ = |e⟩⟨e| − |g⟩⟨g|`.
pub fn pauli(which: Pauli) -> Operator2 {
    match which {
        Pauli::X => Operator2::from_entries([[ZERO, ONE], [ONE, ZERO]]),
        Pauli::Y => Operator2::from_entries([[ZERO, -I], [I, ZERO]]),
        Pauli::Z => Operator2::from_entries([[ONE, ZERO], [ZERO, -ONE]]),
    }
}

/// Amplitudes `(e, g)` of `|θ⟩ = cos(θ/2)|g⟩ + sin(θ/2)|e⟩`.
pub fn theta_ket(theta: f64) -> [Complex64; 2] {
    let (s, c) = (0.5 * theta).sin_cos();
    [Complex64::new(s, 0.0), Complex64::new(c, 0.0)]
}

/// The projector `|θ⟩⟨θ|`.
pub fn projector_theta(theta: f64) -> Result<PomElement> {
    if !theta.is_finite() {
        return Err(Error::NonFinite);
    }
    let ket = theta_ket(theta);
    PomElement::new(format!("theta:{theta}"), Operator2::outer(ket, ket))
}

/// Role of a density matrix: assigned from a preparation or from a measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    Predictive,
    Retrodictive,
}

/// A Hermitian, unit-trace, positive semi-definite operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    op: Operator2,
    role: Role,
}

impl DensityMatrix {
    pub fn new(op: Operator2, role: Role) -> Result<Self> {
        op.check_hermitian_psd()?;
        let tr = op.trace();
        if (tr - ONE).norm() > TRACE_TOL {
            return Err(Error::NotUnitTrace(tr.re));
        }
        Ok(Self { op, role })
    }

    pub fn op(&self) -> &Operator2 {
        &self.op
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn with_role(self, role: Role) -> Self {
        Self { role, ..self }
    }

    pub fn maximally_mixed(role: Role) -> Self {
        Self { op: Operator2::identity() * 0.5, role }
    }
}

/// Rescale a Hermitian PSD operator to unit trace.
pub fn normalize_to_density(op: &Operator2, role: Role) -> Result<DensityMatrix> {
    if !op.is_finite() {
        return Err(Error::NonFinite);
    }
    let tr = op.trace().re;
    if tr.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::Unnormalizable(tr));
    }
    let scaled = op.scale(1.0 / tr);
    scaled.check_hermitian_psd()?;
    // diagonal snapped to real entries with exact unit trace
    let mut e = *scaled.entries();
    e[0][0].im = 0.0;
    e[1][1].im = 0.0;
    e[1][1].re = 1.0 - e[0][0].re;
    DensityMatrix::new(Operator2::from_entries(e), role)
}

/// A positive semi-definite measurement (or unbiased-preparation) element.
#[derive(Debug, Clone, PartialEq)]
pub struct PomElement {
    label: String,
    op: Operator2,
}

impl PomElement {
    pub fn new(label: impl Into<String>, op: Operator2) -> Result<Self> {
        op.check_hermitian_psd()?;
        Ok(Self { label: label.into(), op })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn op(&self) -> &Operator2 {
        &self.op
    }
}

/// A complete set of POM elements.
#[derive(Debug, Clone, PartialEq)]
pub struct PomSet {
    elements: Vec<PomElement>,
}

impl PomSet {
    pub fn new(elements: Vec<PomElement>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::Empty("POM set"));
        }
        let sum = elements.iter().fold(Operator2::zero(), |acc, el| acc + el.op);
        let defect = sum.dist(&Operator2::identity());
        if defect > COMPLETENESS_TOL {
            return Err(Error::IncompletePom(defect));
        }
        Ok(Self { elements })
    }

    pub fn elements(&self) -> &[PomElement] {
        &self.elements
    }

    pub fn into_elements(self) -> Vec<PomElement> {
        self.elements
    }
}

/// Weighted preparation operators `Λ̂_p = P(p)·ρ̂_p` whose traces sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparationEnsemble {
    items: Vec<(String, Operator2)>,
}

impl PreparationEnsemble {
    pub fn new(items: Vec<(String, Operator2)>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::Empty("preparation ensemble"));
        }
        for (_, op) in &items {
            op.check_hermitian_psd()?;
        }
        let total: f64 = items.iter().map(|(_, op)| op.trace().re).sum();
        if (total - 1.0).abs() > ENSEMBLE_TRACE_TOL {
            return Err(Error::EnsembleTrace(total));
        }
        Ok(Self { items })
    }

    /// Unbiased ensemble `{½|e⟩⟨e|, ½|g⟩⟨g|}`.
    pub fn unbiased_eg() -> Self {
        Self { items: vec![("e".into(), Operator2::excited() * 0.5), ("g".into(), Operator2::ground() * 0.5)] }
    }

    /// `{p|e⟩⟨e|, (1−p)|+⟩⟨+|}` with `|+⟩ = (|e⟩ + |g⟩)/√2`.
    pub fn biased_e_plus(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParams(format!("prior p = {p} outside [0, 1]")));
        }
        let plus = Operator2::real(0.5, 0.5, 0.5, 0.5);
        Self::new(vec![("e".into(), Operator2::excited() * p), ("+".into(), plus * (1.0 - p))])
    }

    pub fn items(&self) -> &[(String, Operator2)] {
        &self.items
    }

    /// The a priori density operator `Σ_p Λ̂_p`.
    pub fn prior(&self) -> Operator2 {
        self.items.iter().fold(Operator2::zero(), |acc, (_, op)| acc + *op)
    }
}

/// Expectation values `(⟨σ̂₁⟩, ⟨σ̂₂⟩, ⟨σ̂₃⟩)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub u: f64,
    pub v: f64,
    pub w: f64,
}

impl BlochVector {
    pub const fn new(u: f64, v: f64, w: f64) -> Self {
        Self { u, v, w }
    }

    pub fn norm(&self) -> f64 {
        (self.u * self.u + self.v * self.v + self.w * self.w).sqrt()
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        (self.u - other.u).abs().max((self.v - other.v).abs()).max((self.w - other.w).abs())
    }

    /// `½[1̂ + uσ̂₁ + vσ̂₂ + wσ̂₃]` without the physicality check.
    pub fn to_operator(&self) -> Operator2 {
        let half = 0.5;
        Operator2::from_entries([
            [Complex64::new(half * (1.0 + self.w), 0.0), Complex64::new(half * self.u, -half * self.v)],
            [Complex64::new(half * self.u, half * self.v), Complex64::new(half * (1.0 - self.w), 0.0)],
        ])
    }
}

pub fn to_bloch(rho: &DensityMatrix) -> BlochVector {
    let op = rho.op();
    BlochVector { u: 2.0 * op.eg().re, v: -2.0 * op.eg().im, w: (op.ee() - op.gg()).re }
}

pub fn from_bloch(b: BlochVector, role: Role) -> Result<DensityMatrix> {
    let n = b.norm();
    if !n.is_finite() {
        return Err(Error::NonFinite);
    }
    if n > 1.0 + BLOCH_NORM_TOL {
        return Err(Error::NonPhysicalBloch(n));
    }
    // pull tolerated overshoot back onto the sphere
    let b = if n > 1.0 { BlochVector::new(b.u / n, b.v / n, b.w / n) } else { b };
    DensityMatrix::new(b.to_operator(), role)
}
