//! Named presets and inline JSON for POM elements and preparation ensembles.

use serde::Deserialize;

use retroatom::channels::ChannelParams;
use retroatom::qop::{projector_theta, BlochVector, Operator2, PomElement, PreparationEnsemble};
use retroatom::scenarios::driven_steady_state;

use crate::error::{CliError, CliResult};

pub const POM_PRESETS: &str = "excited, ground, plus, sigma2-plus, theta:<radians>, steady-state";
pub const ENSEMBLE_PRESETS: &str = "unbiased-eg, biased-e-plus:<p>";

/// `steady-state` is the driven steady state for the channel's `gamma` and `v`.
pub fn parse_pom(arg: &str, params: &ChannelParams) -> CliResult<PomElement> {
    let arg = arg.trim();
    if arg.starts_with('{') {
        let op: Operator2 = serde_json::from_str(arg).map_err(|e| CliError::Config(format!("POM JSON: {e}")))?;
        return Ok(PomElement::new("custom", op)?);
    }
    let op = match arg {
        "excited" => Operator2::excited(),
        "ground" => Operator2::ground(),
        "plus" => BlochVector::new(1.0, 0.0, 0.0).to_operator(),
        "sigma2-plus" => BlochVector::new(0.0, 1.0, 0.0).to_operator(),
        "steady-state" => driven_steady_state(params.gamma, params.v).to_operator(),
        _ => match arg.strip_prefix("theta:") {
            Some(theta) => return Ok(projector_theta(parse_number("theta", theta)?)?),
            None => return Err(CliError::Config(format!("unknown POM `{arg}` (expected {POM_PRESETS} or JSON)"))),
        },
    };
    Ok(PomElement::new(arg, op)?)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EnsembleItem {
    label: String,
    op: Operator2,
}

pub fn parse_ensemble(arg: &str) -> CliResult<PreparationEnsemble> {
    let arg = arg.trim();
    if arg.starts_with('[') {
        let items: Vec<EnsembleItem> =
            serde_json::from_str(arg).map_err(|e| CliError::Config(format!("ensemble JSON: {e}")))?;
        return Ok(PreparationEnsemble::new(items.into_iter().map(|i| (i.label, i.op)).collect())?);
    }
    if arg == "unbiased-eg" {
        return Ok(PreparationEnsemble::unbiased_eg());
    }
    match arg.strip_prefix("biased-e-plus:") {
        Some(p) => Ok(PreparationEnsemble::biased_e_plus(parse_number("p", p)?)?),
        None => Err(CliError::Config(format!("unknown ensemble `{arg}` (expected {ENSEMBLE_PRESETS} or JSON)"))),
    }
}

fn parse_number(name: &str, text: &str) -> CliResult<f64> {
    text.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| CliError::Config(format!("{name} must be a finite number, got `{text}`")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_parse() {
        let params = ChannelParams::driven(1.0, 4.0, 0.0);
        for name in ["excited", "ground", "plus", "sigma2-plus", "theta:1.0472", "steady-state"] {
            assert!(parse_pom(name, &params).is_ok(), "{name}");
        }
        assert!(parse_ensemble("unbiased-eg").is_ok());
        assert!(parse_ensemble("biased-e-plus:0.25").is_ok());
    }

    #[test]
    fn inline_json() {
        let params = ChannelParams::spontaneous(1.0, 0.0);
        let pom = parse_pom(r#"{"ee":[0.5,0],"eg":[0,0],"ge":[0,0],"gg":[0.25,0]}"#, &params).unwrap();
        assert_eq!(pom.op().gg().re, 0.25);
        let ens = parse_ensemble(
            r#"[{"label":"a","op":{"ee":[0.5,0],"eg":[0,0],"ge":[0,0],"gg":[0,0]}},
                {"label":"b","op":{"ee":[0,0],"eg":[0,0],"ge":[0,0],"gg":[0.5,0]}}]"#,
        )
        .unwrap();
        assert_eq!(ens.items().len(), 2);
    }

    #[test]
    fn bad_inputs_are_config_errors() {
        let params = ChannelParams::spontaneous(1.0, 0.0);
        for arg in
            ["bogus", "theta:x", "theta:inf", r#"{"ee":[1,0]}"#, r#"{"ee":[-1,0],"eg":[0,0],"ge":[0,0],"gg":[0,0]}"#]
        {
            assert!(matches!(parse_pom(arg, &params), Err(CliError::Config(_))), "{arg}");
        }
        for arg in ["biased-e-plus:2", "nope", "[]"] {
            assert!(matches!(parse_ensemble(arg), Err(CliError::Config(_))), "{arg}");
        }
    }
}
