use quatsync_core::lion::{classify_regime, Regime, RegimeTag};
use serde::Serialize;

use super::equilibria::lion_params;
use super::Outcome;
use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{Envelope, IntegratorInfo};

#[derive(Serialize)]
struct RegimeOutput {
    omega: f64,
    lambda: f64,
    n_osc: usize,
    regime: Regime,
}

pub fn regime(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let p = lion_params(cfg)?;
    let regime = classify_regime(&p);
    let json = cfg.out_dir().join("regime.json");
    let report = RegimeOutput { omega: p.omega, lambda: p.lambda, n_osc: p.n_osc, regime };
    Envelope::new("regime", cfg, IntegratorInfo::default(), report).write(&json)?;
    let summary = format!(
        "{} (lambda = {}, critically weak at {}, critical coupling {})",
        tag_name(regime.tag),
        p.lambda,
        regime.lambda_crit,
        regime.lambda_c
    );
    Ok(Outcome { files: vec![json], summary })
}

pub(super) fn tag_name(tag: RegimeTag) -> &'static str {
    match tag {
        RegimeTag::SuperWeak => "super_weak",
        RegimeTag::CriticallyWeak => "critically_weak",
        RegimeTag::Weak => "weak",
        RegimeTag::AtOrAboveLambdaC => "at_or_above_lambda_c",
    }
}
