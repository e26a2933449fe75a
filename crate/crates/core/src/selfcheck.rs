//! The cross-route and oracle invariant suite run by `retroatom check`.
//!
//! Every invariant row compares two independently computed quantities and
//! records the worst deviation seen. Transcription rows compare the printed
//! closed forms with the generator exponential; they are reported but never
//! affect [`CheckReport::passed`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channels::{
    build_superoperator, propagate_rk4, rk4_superoperator, ChannelKind, ChannelParams, Superoperator,
};
use crate::error::Result;
use crate::qop::{BlochVector, DensityMatrix, Operator2, PomElement, PreparationEnsemble, Role};
use crate::retrodiction::{
    forward_bayes_by, forward_bayes_with, preparation_posterior, retrodict_pauli_with, retrodict_with,
};
use crate::sampling::{random_ensemble, random_kind, random_params, random_pom, random_psd};
use crate::scenarios::{
    driven_bloch, driven_retro_excited, driven_retro_sigma1, driven_retro_sigma2, linspace, spont_prep_probs,
    spont_retro_elements, superposition_posterior, thermal_retro_elements,
};

pub const RK4_STEPS: u64 = 10_000;
const SEED: u64 = 0x5EED_A70A;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RowKind {
    Invariant,
    Transcription,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub kind: RowKind,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
    pub cases: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub rows: Vec<CheckRow>,
}

impl CheckReport {
    /// True when every invariant row passed.
    pub fn passed(&self) -> bool {
        self.rows.iter().filter(|r| r.kind == RowKind::Invariant).all(|r| r.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRow> {
        self.rows.iter().filter(|r| r.kind == RowKind::Invariant && !r.passed)
    }
}

/// Deliberate defects used as negative controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Thermal coherences decay at `2Γ(2n̄+1)` instead of `Γ(2n̄+1)`.
    ThermalCoherence,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckOptions {
    /// Multiplies every invariant tolerance.
    pub tolerance_scale: f64,
    pub fault: Option<Fault>,
    pub rk4_steps: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self { tolerance_scale: 1.0, fault: None, rk4_steps: RK4_STEPS }
    }
}

struct Suite {
    options: CheckOptions,
    rows: Vec<CheckRow>,
}

impl Suite {
    fn build(&self, params: &ChannelParams) -> Result<Superoperator> {
        let s = build_superoperator(params)?;
        match (self.options.fault, params.kind) {
            (Some(Fault::ThermalCoherence), ChannelKind::Thermal) => {
                let extra = (-params.gamma * (2.0 * params.nbar + 1.0) * params.tau).exp();
                let mut m = *s.matrix();
                m[1][1] *= extra;
                m[2][2] *= extra;
                Ok(Superoperator::from_matrix(m))
            }
            _ => Ok(s),
        }
    }

    fn invariant(&mut self, name: &str, tolerance: f64, deviations: Result<Vec<f64>>) {
        let tolerance = tolerance * self.options.tolerance_scale;
        self.push(name, RowKind::Invariant, tolerance, deviations);
    }

    fn transcription(&mut self, name: &str, tolerance: f64, deviations: Result<Vec<f64>>) {
        self.push(name, RowKind::Transcription, tolerance, deviations);
    }

    fn push(&mut self, name: &str, kind: RowKind, tolerance: f64, deviations: Result<Vec<f64>>) {
        let (measured, cases) = match deviations {
            Ok(d) => (d.iter().copied().fold(0.0, nan_max), d.len()),
            Err(_) => (f64::INFINITY, 0),
        };
        self.rows.push(CheckRow {
            name: name.to_owned(),
            kind,
            passed: measured <= tolerance,
            measured,
            tolerance,
            cases,
        });
    }
}

fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

struct RandomCase {
    params: ChannelParams,
    pom: PomElement,
    ensemble: PreparationEnsemble,
}

fn random_cases(count: usize, seed: u64) -> Vec<RandomCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let kind = random_kind(&mut rng);
            RandomCase {
                params: random_params(&mut rng, kind, 4.0),
                pom: random_pom(&mut rng),
                ensemble: random_ensemble(&mut rng),
            }
        })
        .collect()
}

fn distinct_poms() -> Vec<PomElement> {
    [
        ("excited", Operator2::excited()),
        ("ground", Operator2::ground()),
        ("plus", BlochVector::new(1.0, 0.0, 0.0).to_operator()),
        ("sigma2-plus", BlochVector::new(0.0, 1.0, 0.0).to_operator()),
        ("mixed", Operator2::real(0.3, 0.2, 0.2, 0.5)),
    ]
    .into_iter()
    .map(|(l, op)| PomElement::new(l, op).expect("valid preset"))
    .collect()
}

/// Runs the full suite.
pub fn run_checks(options: CheckOptions) -> CheckReport {
    let mut suite = Suite { options, rows: Vec::new() };
    let cases = random_cases(100, SEED);

    let d = cases
        .iter()
        .map(|c| {
            let s = suite.build(&c.params)?;
            let retro = preparation_posterior(&retrodict_with(&s, &c.pom)?.rho_retr, &c.ensemble)?;
            Ok(retro.max_deviation(&forward_bayes_with(&s, &c.ensemble, &c.pom)?))
        })
        .collect();
    suite.invariant("bayes equivalence, analytic channel", 1e-10, d);

    let steps = options.rk4_steps;
    let d = cases
        .iter()
        .map(|c| {
            let s = suite.build(&c.params)?;
            let retro = preparation_posterior(&retrodict_with(&s, &c.pom)?.rho_retr, &c.ensemble)?;
            let oracle = forward_bayes_by(|l| propagate_rk4(&c.params, l, steps), &c.ensemble, &c.pom)?;
            Ok(retro.max_deviation(&oracle))
        })
        .collect();
    suite.invariant("bayes equivalence, RK4 channel", 1e-6, d);

    let d = cases
        .iter()
        .map(|c| {
            let s = suite.build(&c.params)?;
            let a = retrodict_with(&s, &c.pom)?;
            let b = retrodict_pauli_with(&s, &c.pom)?;
            Ok(a.rho_retr.op().dist(b.rho_retr.op()))
        })
        .collect();
    suite.invariant("adjoint vs Pauli-expansion retrodiction", 1e-12, d);

    let d = cases
        .iter()
        .map(|c| {
            let s = suite.build(&c.params)?;
            let r = retrodict_with(&s, &c.pom)?;
            let sum: f64 = preparation_posterior(&r.rho_retr, &c.ensemble)?.probabilities().iter().sum();
            Ok((sum - 1.0).abs())
        })
        .collect();
    suite.invariant("posterior normalization", 1e-10, d);

    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut d = Vec::new();
    for kind in ChannelKind::ALL {
        for _ in 0..20 {
            let params = random_params(&mut rng, kind, 4.0).with_tau(0.0);
            let pom = random_pom(&mut rng);
            d.push(suite.build(&params).and_then(|s| retrodict_with(&s, &pom)).map(|r| {
                let expected = pom.op().scale(1.0 / pom.op().trace().re);
                r.rho_retr.op().dist(&expected)
            }));
        }
    }
    suite.invariant("tau = 0 retrodiction is the normalized POM", 1e-12, d.into_iter().collect());

    let excited = PomElement::new("excited", Operator2::excited()).expect("valid");
    let d = [0.0, 0.1, 1.0, 10.0, 30.0]
        .iter()
        .map(|&gt| {
            let s = suite.build(&ChannelParams::spontaneous(1.0, gt))?;
            let r = retrodict_with(&s, &excited)?;
            let post = preparation_posterior(&r.rho_retr, &PreparationEnsemble::unbiased_eg())?;
            let p = post.probabilities();
            Ok(r.rho_retr.op().dist(&Operator2::excited()).max((p[0] - 1.0).abs()).max(p[1].abs()))
        })
        .collect();
    suite.invariant("excited outcome under spontaneous emission", 1e-12, d);

    let half = Operator2::identity() * 0.5;
    let mut d = Vec::new();
    for params in [ChannelParams::thermal(1.0, 1.0, 30.0), ChannelParams::driven(1.0, 4.0, 30.0)] {
        for pom in distinct_poms() {
            d.push(suite.build(&params).and_then(|s| retrodict_with(&s, &pom)).map(|r| r.rho_retr.op().dist(&half)));
        }
    }
    suite.invariant("long-time retrodiction is 1/2", 1e-6, d.into_iter().collect());

    let d = (|| {
        let s = suite.build(&ChannelParams::thermal(1.0, 1.0, 30.0))?;
        let out = s.apply(&Operator2::excited());
        Ok(vec![(out.ee().re / out.gg().re - 0.5).abs()])
    })();
    suite.invariant("thermal predictive population ratio n/(n+1)", 1e-6, d);

    let ground = PomElement::new("ground", Operator2::ground()).expect("valid");
    let anchor = |suite: &Suite, tau: f64, expected: (f64, f64)| -> Result<Vec<f64>> {
        let (a, b) = spont_prep_probs(1.0, tau);
        let s = suite.build(&ChannelParams::spontaneous(1.0, tau))?;
        let r = retrodict_with(&s, &ground)?;
        let post = preparation_posterior(&r.rho_retr, &PreparationEnsemble::unbiased_eg())?.probabilities();
        Ok(vec![
            (a - expected.0).abs(),
            (b - expected.1).abs(),
            (post[0] - expected.0).abs(),
            (post[1] - expected.1).abs(),
        ])
    };
    let d = anchor(&suite, std::f64::consts::LN_2 / 2.0, (1.0 / 3.0, 2.0 / 3.0));
    suite.invariant("ground outcome at half decay gives (1/3, 2/3)", 1e-12, d);
    let d = anchor(&suite, 0.0, (0.0, 1.0)).and_then(|mut a| {
        a.extend(anchor(&suite, 30.0, (0.5, 0.5))?);
        Ok(a)
    });
    suite.invariant("ground outcome limits (0, 1) and (1/2, 1/2)", 1e-8, d);

    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let mut oracle = Vec::new();
    let mut semigroup = Vec::new();
    let mut trace = Vec::new();
    let mut unital = Vec::new();
    let mut cp = Vec::new();
    let mut hermiticity = Vec::new();
    for kind in ChannelKind::ALL {
        for _ in 0..50 {
            let params = random_params(&mut rng, kind, 5.0);
            let rho = random_psd(&mut rng);
            let rho = rho.scale(1.0 / rho.trace().re);
            let generic = crate::sampling::random_operator(&mut rng);
            let split: f64 = rand::Rng::gen_range(&mut rng, 0.0..1.0);
            oracle
                .push(suite.build(&params).and_then(|s| Ok(s.apply(&rho).dist(&propagate_rk4(&params, &rho, steps)?))));
            semigroup.push((|| {
                let whole = suite.build(&params)?;
                let first = suite.build(&params.with_tau(params.tau * split))?;
                let second = suite.build(&params.with_tau(params.tau * (1.0 - split)))?;
                Ok(whole.dist(&second.compose(&first)))
            })());
            let s = suite.build(&params);
            trace.push(s.as_ref().map(|s| (s.apply(&rho).trace().re - 1.0).abs()).map_err(Clone::clone));
            unital.push(
                s.as_ref()
                    .map(|s| s.adjoint().apply(&Operator2::identity()).dist(&Operator2::identity()))
                    .map_err(Clone::clone),
            );
            cp.push(s.as_ref().map(|s| if s.is_completely_positive(1e-10) { 0.0 } else { 1.0 }).map_err(Clone::clone));
            hermiticity.push(s.map(|s| s.apply(&generic.dagger()).dist(&s.apply(&generic).dagger())));
        }
    }
    suite.invariant("closed-form channel vs RK4 master equation", 1e-6, oracle.into_iter().collect());
    suite.invariant("semigroup composition", 1e-10, semigroup.into_iter().collect());
    suite.invariant("trace preservation", 1e-12, trace.into_iter().collect());
    suite.invariant("adjoint maps identity to identity", 1e-10, unital.into_iter().collect());
    suite.invariant("complete positivity (Choi PSD, 1 = violated)", 0.5, cp.into_iter().collect());
    suite.invariant("hermiticity preservation", 1e-12, hermiticity.into_iter().collect());

    let d = (|| {
        let mut out = Vec::new();
        for tau in linspace(0.0, 5.0, 11) {
            let rk4 = rk4_superoperator(&ChannelParams::thermal(1.0, 0.8, tau), steps)?;
            out.push(suite.build(&ChannelParams::thermal(1.0, 0.8, tau))?.dist(&rk4));
        }
        Ok(out)
    })();
    suite.invariant("thermal superoperator vs RK4 superoperator", 1e-6, d);

    let d = linspace(0.0, 5.0, 11)
        .into_iter()
        .map(|tau| {
            let thermal = suite.build(&ChannelParams::thermal(1.0, 1e-12, tau))?;
            let spont = suite.build(&ChannelParams::spontaneous(1.0, tau))?;
            Ok(thermal.dist(&spont))
        })
        .collect();
    suite.invariant("thermal channel at vanishing occupation", 1e-10, d);

    let d = linspace(0.0, 5.0, 11)
        .into_iter()
        .map(|tau| {
            let below = suite.build(&ChannelParams::driven(1.0, 0.5 - 1e-6, tau))?;
            let above = suite.build(&ChannelParams::driven(1.0, 0.5 + 1e-6, tau))?;
            Ok(below.dist(&above))
        })
        .collect();
    suite.invariant("driven channel continuity at critical damping", 1e-4, d);

    let grid = linspace(0.0, 5.0, 50);
    let sigma1 = PomElement::new("plus", BlochVector::new(1.0, 0.0, 0.0).to_operator()).expect("valid");
    let d = grid
        .iter()
        .map(|&gt| {
            let s = suite.build(&ChannelParams::driven(1.0, 4.0, gt))?;
            let r = retrodict_with(&s, &sigma1)?;
            Ok(r.rho_retr.op().dist(&driven_retro_sigma1(1.0, 4.0, gt)))
        })
        .collect();
    suite.invariant("driven sigma1 outcome: flat diagonals, e^-Gt/2 coherences", 1e-10, d);

    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let poms: Vec<PomElement> = (0..5).map(|_| random_pom(&mut rng)).collect();
    let d = grid
        .iter()
        .flat_map(|&gt| poms.iter().map(move |pom| (gt, pom)))
        .map(|(gt, pom)| {
            let s = suite.build(&ChannelParams::spontaneous(1.0, gt))?;
            Ok(retrodict_with(&s, pom)?.rho_retr.op().dist(&spont_retro_elements(pom, 1.0, gt)?))
        })
        .collect();
    suite.invariant("spontaneous closed-form elements vs adjoint route", 1e-12, d);

    let d = grid
        .iter()
        .flat_map(|&gt| poms.iter().map(move |pom| (gt, pom)))
        .map(|(gt, pom)| {
            let s = suite.build(&ChannelParams::thermal(1.0, 1.0, gt))?;
            Ok(retrodict_with(&s, pom)?.rho_retr.op().dist(&thermal_retro_elements(pom, 1.0, 1.0, gt)?))
        })
        .collect();
    suite.invariant("thermal closed-form elements vs adjoint route", 1e-12, d);

    let d = grid
        .iter()
        .flat_map(|&gt| [(0.4, 0.3), (std::f64::consts::FRAC_PI_3, 0.5), (2.2, 0.8)].map(move |tp| (gt, tp)))
        .map(|(gt, (theta, p))| {
            let ens = PreparationEnsemble::biased_e_plus(p)?;
            let pom = crate::qop::projector_theta(theta)?;
            let s = suite.build(&ChannelParams::spontaneous(1.0, gt))?;
            let post = forward_bayes_with(&s, &ens, &pom)?.probabilities();
            let (pe, pp) = superposition_posterior(theta, p, 1.0, gt);
            Ok((post[0] - pe).abs().max((post[1] - pp).abs()))
        })
        .collect();
    suite.invariant("superposition posterior closed form vs forward Bayes", 1e-12, d);

    transcription_rows(&mut suite, &grid);

    CheckReport { rows: suite.rows }
}

/// Printed closed forms against the generator exponential.
/// `(gamma, v, tau)` to the printed retrodictive elements.
type PrintedForm = fn(f64, f64, f64) -> Operator2;

fn transcription_rows(suite: &mut Suite, grid: &[f64]) {
    let (gamma, v) = (1.0, 4.0);
    let starts = [BlochVector::new(0.0, 0.0, 1.0), BlochVector::new(0.0, 1.0, 0.0), BlochVector::new(0.6, -0.2, -0.5)];
    let d = grid
        .iter()
        .flat_map(|&gt| starts.map(move |b| (gt, b)))
        .map(|(gt, b0)| {
            let s = build_superoperator(&ChannelParams::driven(gamma, v, gt))?;
            let exact = crate::qop::to_bloch(&DensityMatrix::new(s.apply(&b0.to_operator()), Role::Predictive)?);
            Ok(exact.max_diff(&driven_bloch(b0, gamma, v, gt)))
        })
        .collect();
    suite.transcription("printed driven Bloch solution u, v, w", 1e-6, d);

    let forms: [(&str, Operator2, PrintedForm); 2] = [
        ("printed driven excited-outcome elements", Operator2::excited(), driven_retro_excited),
        ("printed driven sigma2-outcome elements", BlochVector::new(0.0, 1.0, 0.0).to_operator(), driven_retro_sigma2),
    ];
    for (name, op, printed) in forms {
        let pom = PomElement::new(name, op).expect("valid");
        let d = grid
            .iter()
            .map(|&gt| {
                let s = build_superoperator(&ChannelParams::driven(gamma, v, gt))?;
                Ok(retrodict_with(&s, &pom)?.rho_retr.op().dist(&printed(gamma, v, gt)))
            })
            .collect();
        suite.transcription(name, 1e-6, d);
    }

    // The two printed typos that were corrected in the implementation,
    // measured against the oracle so the size of the defect is on record.
    let d = grid
        .iter()
        .map(|&gt| {
            let (gamma, nbar) = (1.0, 1.0);
            let s = build_superoperator(&ChannelParams::thermal(gamma, nbar, gt))?;
            let printed = (-2.0 * gamma * (2.0 * nbar + 1.0) * gt).exp();
            Ok((s.apply(&Operator2::sigma_plus()).eg().re - printed).abs())
        })
        .collect();
    suite.transcription("thermal coherence factor as printed, exp(-2G(2n+1)t)", 1e-6, d);

    let d = grid
        .iter()
        .map(|&gt| {
            let (theta, p) = (std::f64::consts::FRAC_PI_3, 0.5);
            let (s, c) = theta.sin_cos();
            let x = (-2.0 * gt).exp();
            let den = 1.0 + c * (1.0 - x) + (1.0 - p) * s * (-gt).exp() - p * c * x;
            let printed = (1.0 - p) * (1.0 + c * (1.0 - x) + s * x) / den;
            let ens = PreparationEnsemble::biased_e_plus(p)?;
            let pom = crate::qop::projector_theta(theta)?;
            let post = forward_bayes_with(&build_superoperator(&ChannelParams::spontaneous(1.0, gt))?, &ens, &pom)?;
            Ok((post.probabilities()[1] - printed).abs())
        })
        .collect();
    suite.transcription("superposition P(+|theta) numerator as printed, sin(theta) e^-2Gt", 1e-6, d);
}
