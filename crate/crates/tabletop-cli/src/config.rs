//! Runtime parameters: built-in defaults, overridden by a `key = value`
//! file, overridden again by command-line flags.
//!
//! Every tunable of the pipeline lives here under a dotted key, listed
//! in the README. Unknown keys are rejected so a typo cannot silently
//! run with defaults.

use std::path::Path;
use std::str::FromStr;

use tabletop_core::estimation::EstimationParams;
use tabletop_core::geometry::GeometryParams;
use tabletop_core::knowledge::PriorMode;
use tabletop_core::sampler::ProposalParams;
use tabletop_core::sensing::NoiseParams;
use tabletop_core::Error;

use crate::{CmdResult, Failure};

/// How query marginals are computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InferenceMode {
    Exact,
    Gibbs,
    /// Exact when the ground network fits the enumeration cap, Gibbs
    /// otherwise.
    Auto,
}

impl FromStr for InferenceMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exact" => Ok(Self::Exact),
            "gibbs" => Ok(Self::Gibbs),
            "auto" => Ok(Self::Auto),
            other => Err(format!("unknown inference mode '{other}'; expected exact, gibbs, or auto")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub contact_eps: f64,
    pub stable_angle_tol_deg: f64,
    pub sigma_x: f64,
    pub sigma_y: f64,
    pub proposal_n: usize,
    pub proposal_sigma_trans: f64,
    pub proposal_sigma_rot: f64,
    pub iterations: u64,
    pub seed: Option<u64>,
    pub mode: InferenceMode,
    pub exact_cap: usize,
    pub gibbs_sweeps: u64,
    /// Defaults to a tenth of the sweeps when unset.
    pub gibbs_burn_in: Option<u64>,
    pub hard_cap_weight: f64,
    pub lo: f64,
    pub hi: f64,
    /// How the chain scores a scene's prior. The best-world score keeps
    /// refinement from drifting toward poses that merely trigger fewer
    /// hard rules; the world-sum stays available as `prior.mode
    /// marginalize`.
    pub prior_mode: PriorMode,
    pub inlier_eps: f64,
    pub pos_eps: f64,
    pub rot_eps: f64,
    pub attempts: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let geo = GeometryParams::default();
        let prop = ProposalParams::default();
        let est = EstimationParams::default();
        Self {
            contact_eps: geo.contact_eps,
            stable_angle_tol_deg: geo.stable_angle_tol.to_degrees(),
            sigma_x: 1.0,
            sigma_y: 1.0,
            proposal_n: prop.n,
            proposal_sigma_trans: prop.sigma_trans,
            proposal_sigma_rot: prop.sigma_rot,
            iterations: 15,
            seed: None,
            mode: InferenceMode::Auto,
            exact_cap: 22,
            gibbs_sweeps: 100_000,
            gibbs_burn_in: None,
            hard_cap_weight: 100.0,
            lo: 0.05,
            hi: 0.9,
            prior_mode: PriorMode::MapWorld,
            inlier_eps: est.inlier_eps,
            pos_eps: est.pos_eps,
            rot_eps: est.rot_eps,
            attempts: est.attempts,
        }
    }
}

impl RunConfig {
    pub fn geometry(&self) -> GeometryParams {
        GeometryParams {
            contact_eps: self.contact_eps,
            stable_angle_tol: self.stable_angle_tol_deg.to_radians(),
            ..GeometryParams::default()
        }
    }

    pub fn noise(&self) -> CmdResult<NoiseParams> {
        Ok(NoiseParams::new(self.sigma_x, self.sigma_y)?)
    }

    pub fn proposals(&self) -> ProposalParams {
        ProposalParams {
            n: self.proposal_n,
            sigma_trans: self.proposal_sigma_trans,
            sigma_rot: self.proposal_sigma_rot,
        }
    }

    pub fn estimation(&self) -> EstimationParams {
        EstimationParams {
            inlier_eps: self.inlier_eps,
            pos_eps: self.pos_eps,
            rot_eps: self.rot_eps,
            attempts: self.attempts,
        }
    }

    pub fn burn_in(&self) -> u64 {
        self.gibbs_burn_in.unwrap_or(self.gibbs_sweeps / 10)
    }

    pub fn require_seed(&self, command: &str) -> CmdResult<u64> {
        self.seed.ok_or_else(|| {
            Failure::Usage(format!("{command} is randomized; pass --seed or set chain.seed"))
        })
    }

    fn validate(&self) -> Result<(), Error> {
        let bad = |msg: String| Err(Error::Schema(format!("config: {msg}")));
        if !(self.lo < self.hi) {
            return bad(format!(
                "thresholds.lo ({}) must be below thresholds.hi ({})",
                self.lo, self.hi
            ));
        }
        if !(self.sigma_x > 0.0 && self.sigma_y > 0.0) {
            return bad("noise sigmas must be positive".into());
        }
        if self.contact_eps <= 0.0 {
            return bad("geometry.contact_eps must be positive".into());
        }
        if self.proposal_n == 0 {
            return bad("proposals.n must be at least 1".into());
        }
        if self.burn_in() >= self.gibbs_sweeps {
            return bad(format!(
                "inference.gibbs_burn_in ({}) must be below inference.gibbs_sweeps ({})",
                self.burn_in(),
                self.gibbs_sweeps
            ));
        }
        if self.attempts == 0 {
            return bad("estimation.attempts must be at least 1".into());
        }
        Ok(())
    }
}

/// Defaults, then the file, then the one flag-owned field (the seed).
pub fn load(path: Option<&Path>, seed_flag: Option<u64>) -> CmdResult<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(p) = path {
        let text = crate::read_input(p)?;
        apply(&mut cfg, &text)?;
    }
    if seed_flag.is_some() {
        cfg.seed = seed_flag;
    }
    cfg.validate().map_err(Failure::Core)?;
    Ok(cfg)
}

fn apply(cfg: &mut RunConfig, text: &str) -> CmdResult<()> {
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Failure::Core(Error::Parse { line: line_no, msg: "expected key = value".into() })
        })?;
        set_key(cfg, key.trim(), value.trim())
            .map_err(|msg| Failure::Core(Error::Parse { line: line_no, msg }))?;
    }
    Ok(())
}

fn set_key(cfg: &mut RunConfig, key: &str, value: &str) -> Result<(), String> {
    fn num<T: FromStr>(key: &str, value: &str) -> Result<T, String> {
        value.parse().map_err(|_| format!("bad value '{value}' for {key}"))
    }
    match key {
        "geometry.contact_eps" => cfg.contact_eps = num(key, value)?,
        "geometry.stable_angle_tol_deg" => cfg.stable_angle_tol_deg = num(key, value)?,
        "noise.sigma_x" => cfg.sigma_x = num(key, value)?,
        "noise.sigma_y" => cfg.sigma_y = num(key, value)?,
        "proposals.n" => cfg.proposal_n = num(key, value)?,
        "proposals.sigma_trans" => cfg.proposal_sigma_trans = num(key, value)?,
        "proposals.sigma_rot" => cfg.proposal_sigma_rot = num(key, value)?,
        "chain.iterations" => cfg.iterations = num(key, value)?,
        "chain.seed" => cfg.seed = Some(num(key, value)?),
        "inference.mode" => cfg.mode = value.parse()?,
        "inference.exact_cap" => cfg.exact_cap = num(key, value)?,
        "inference.gibbs_sweeps" => cfg.gibbs_sweeps = num(key, value)?,
        "inference.gibbs_burn_in" => cfg.gibbs_burn_in = Some(num(key, value)?),
        "inference.hard_cap_weight" => cfg.hard_cap_weight = num(key, value)?,
        "thresholds.lo" => cfg.lo = num(key, value)?,
        "thresholds.hi" => cfg.hi = num(key, value)?,
        "prior.mode" => {
            cfg.prior_mode = match value {
                "marginalize" => PriorMode::Marginalize,
                "map" => PriorMode::MapWorld,
                other => return Err(format!("unknown prior mode '{other}'; expected marginalize or map")),
            }
        }
        "estimation.inlier_eps" => cfg.inlier_eps = num(key, value)?,
        "estimation.pos_eps" => cfg.pos_eps = num(key, value)?,
        "estimation.rot_eps" => cfg.rot_eps = num(key, value)?,
        "estimation.attempts" => cfg.attempts = num(key, value)?,
        other => return Err(format!("unknown config key '{other}'")),
    }
    Ok(())
}
