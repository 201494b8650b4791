//! Plain-text `key=value` config files mirroring the CLI flags. Flags given
//! on the command line override file values.

use std::collections::BTreeMap;
use std::path::PathBuf;

use tsgauss::pipeline::{RpOverride, RunConfig};
use tsgauss::projection::MarginalTest;

#[derive(Debug, Default, Clone)]
pub struct FileConfig {
    pub inputs: Vec<PathBuf>,
    pub n_max: Option<usize>,
    pub alpha: Option<f64>,
    pub lb_h: Option<usize>,
    pub seed: Option<u64>,
    pub rp_projections: Option<usize>,
    pub cap_fdr: Option<bool>,
    pub fdr_independent: Option<bool>,
    pub format: Option<String>,
    pub workers: Option<usize>,
    pub rp_overrides: BTreeMap<String, RpOverride>,
}

pub fn parse_config(text: &str) -> Result<FileConfig, String> {
    let mut cfg = FileConfig::default();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = idx + 1;
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {lineno}: expected key=value, got {line:?}"))?;
        let key = key.trim();
        let value = value.trim();
        let parse_err = |what: &str| format!("line {lineno}: invalid {what} {value:?}");
        match key {
            "input" => {
                cfg.inputs
                    .extend(value.split(',').map(|s| PathBuf::from(s.trim())));
            }
            "n_max" => cfg.n_max = Some(value.parse().map_err(|_| parse_err("n_max"))?),
            "alpha" => cfg.alpha = Some(value.parse().map_err(|_| parse_err("alpha"))?),
            "lb_h" => cfg.lb_h = Some(value.parse().map_err(|_| parse_err("lb_h"))?),
            "seed" => cfg.seed = Some(value.parse().map_err(|_| parse_err("seed"))?),
            "rp_projections" => {
                cfg.rp_projections = Some(value.parse().map_err(|_| parse_err("rp_projections"))?)
            }
            "cap_fdr" => cfg.cap_fdr = Some(value.parse().map_err(|_| parse_err("cap_fdr"))?),
            "fdr_independent" => {
                cfg.fdr_independent = Some(value.parse().map_err(|_| parse_err("fdr_independent"))?)
            }
            "format" => cfg.format = Some(value.to_string()),
            "workers" => cfg.workers = Some(value.parse().map_err(|_| parse_err("workers"))?),
            _ if key.starts_with("rp_override_") => {
                let station = key.trim_start_matches("rp_override_").to_string();
                let parts: Vec<&str> = value.split(',').map(str::trim).collect();
                if parts.len() != 3 {
                    return Err(format!(
                        "line {lineno}: rp_override wants lambda1,lambda2,test"
                    ));
                }
                let lambda1: f64 = parts[0].parse().map_err(|_| parse_err("lambda1"))?;
                let lambda2: f64 = parts[1].parse().map_err(|_| parse_err("lambda2"))?;
                let marginal_test = match parts[2] {
                    "epps" => MarginalTest::Epps,
                    "lobato-velasco" | "lv" => MarginalTest::LobatoVelasco,
                    other => return Err(format!("line {lineno}: unknown test {other:?}")),
                };
                cfg.rp_overrides.insert(
                    station,
                    RpOverride {
                        lambda1,
                        lambda2,
                        marginal_test,
                    },
                );
            }
            other => return Err(format!("line {lineno}: unknown key {other:?}")),
        }
    }
    Ok(cfg)
}

/// Flag values as given on the command line; `None` means unset.
#[derive(Debug, Default, Clone)]
pub struct FlagOverrides {
    pub n_max: Option<usize>,
    pub alpha: Option<f64>,
    pub lb_h: Option<usize>,
    pub seed: Option<u64>,
    pub rp_projections: Option<usize>,
    pub cap_fdr: bool,
    pub fdr_independent: bool,
}

/// Overlay file values under CLI flags: a flag that was given wins.
pub fn merge_run_config(file: &FileConfig, flags: &FlagOverrides) -> RunConfig {
    let defaults = RunConfig::default();
    RunConfig {
        n_max: flags.n_max.or(file.n_max).unwrap_or(defaults.n_max),
        alpha: flags.alpha.or(file.alpha).unwrap_or(defaults.alpha),
        ljung_box_h: flags.lb_h.or(file.lb_h).unwrap_or(defaults.ljung_box_h),
        master_seed: flags.seed.or(file.seed).unwrap_or(defaults.master_seed),
        rp_num_projections: flags
            .rp_projections
            .or(file.rp_projections)
            .unwrap_or(defaults.rp_num_projections),
        cap_fdr: flags.cap_fdr || file.cap_fdr.unwrap_or(false),
        fdr_independent: flags.fdr_independent || file.fdr_independent.unwrap_or(false),
        epps_points: defaults.epps_points,
        rp_overrides: file.rp_overrides.clone(),
    }
}
