//! Derivation of every modulation parameter from the target bandwidth
//! expansion `1/eta`.
//!
//! An order-`M` cascade covers `M <= 1/eta <= M + 1`. Stages `1..M-1` quantize
//! their whole input; stage `M` splits its (interleaved) input into `n_p`
//! transitional samples, which are quantized once more, and `n_r` samples
//! forwarded as the residual analog segment. The multiplex therefore holds
//! `(M - 1) N + n_r + 2 n_p = M N + n_p` samples, and `n_p = round(N (1/eta - M))`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantizer::QuantizerSpec;

/// Integer expansion factors within this distance snap to the integer.
const INTEGER_SNAP: f64 = 1e-9;

/// Per-stage quantizer templates. `full_scale` in a template is only a
/// placeholder: the realised range is set from the stage input at modulation time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantizerProfile {
    pub first: QuantizerSpec,
    pub rest: QuantizerSpec,
}

impl QuantizerProfile {
    pub fn uniform(spec: QuantizerSpec) -> Self {
        Self {
            first: spec,
            rest: spec,
        }
    }

    pub fn stage(&self, stage: usize) -> QuantizerSpec {
        if stage <= 1 {
            self.first
        } else {
            self.rest
        }
    }
}

impl Default for QuantizerProfile {
    /// 7 levels per axis on the Gaussian-like first stage, 4 on later stages.
    fn default() -> Self {
        Self {
            first: QuantizerSpec::cartesian(7, 1.0),
            rest: QuantizerSpec::cartesian(4, 1.0),
        }
    }
}

/// Tunables that the derivation does not fix by itself.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanOptions {
    pub profile: QuantizerProfile,
    /// Stage full-scale as a multiple of the stage input's peak amplitude.
    pub r_a: f64,
    /// RMS the analog residual is renormalised to before the next stage.
    pub r_b: f64,
    pub alpha_r: f64,
    pub alpha_d: f64,
    pub alpha_a: f64,
    pub interleaver_seed: u64,
}

impl Default for PlanOptions {
    fn default() -> Self {
        Self {
            profile: QuantizerProfile::default(),
            r_a: 1.0,
            r_b: 1.0,
            alpha_r: 1.0,
            alpha_d: 1.0,
            alpha_a: 1.0,
            interleaver_seed: 0x5EED,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModulationPlan {
    /// Bandwidth expansion `1/eta` relative to A-RoF.
    pub inv_eta: f64,
    pub order_m: usize,
    pub frame_len: usize,
    pub n_p: usize,
    pub n_r: usize,
    pub r_a: f64,
    pub r_b: f64,
    pub stage_quantizers: Vec<QuantizerSpec>,
    /// Target RMS of the `S_R`, `S_D,i` and `S_A` segments in the multiplex.
    pub alpha_r: f64,
    pub alpha_d: f64,
    pub alpha_a: f64,
    pub interleaver_seed: u64,
    /// Drop `S_A` and `S_R` from the multiplex.
    pub drof_mode: bool,
}

impl ModulationPlan {
    pub fn eta(&self) -> f64 {
        1.0 / self.inv_eta
    }

    /// Transitional/residual split used by `stage` (1-based).
    pub fn stage_partition(&self, stage: usize) -> (usize, usize) {
        if stage == self.order_m {
            (self.n_p, self.n_r)
        } else {
            (self.frame_len, 0)
        }
    }

    /// Length of the multiplexed waveform this plan produces.
    pub fn mux_len(&self) -> usize {
        let full = (self.order_m - 1) * self.frame_len;
        if self.drof_mode {
            full + self.n_p
        } else {
            full + self.n_r + 2 * self.n_p
        }
    }
}

fn snap_inv_eta(inv_eta: f64) -> f64 {
    let r = inv_eta.round();
    if (inv_eta - r).abs() < INTEGER_SNAP {
        r
    } else {
        inv_eta
    }
}

/// Cascade order for a bandwidth expansion: the smaller `M` at integer boundaries.
pub fn order_for(inv_eta: f64) -> usize {
    let x = snap_inv_eta(inv_eta);
    (x.ceil() as usize).saturating_sub(1).max(1)
}

/// Derives a plan with default options and the given quantizer profile.
pub fn derive_plan(
    inv_eta: f64,
    frame_len: usize,
    profile: &QuantizerProfile,
) -> Result<ModulationPlan> {
    derive_plan_with(
        inv_eta,
        frame_len,
        &PlanOptions {
            profile: *profile,
            ..PlanOptions::default()
        },
    )
}

pub fn derive_plan_with(
    inv_eta: f64,
    frame_len: usize,
    opts: &PlanOptions,
) -> Result<ModulationPlan> {
    if !(inv_eta >= 1.0) || !inv_eta.is_finite() {
        return Err(Error::domain(format!("1/eta must be >= 1, got {inv_eta}")));
    }
    if frame_len == 0 {
        return Err(Error::domain("frame length must be positive"));
    }
    check_options(opts)?;
    let x = snap_inv_eta(inv_eta);
    let order_m = order_for(x);
    let fraction = (x - order_m as f64).clamp(0.0, 1.0);
    // round half up
    let n_p = ((frame_len as f64 * fraction + 0.5).floor() as usize).min(frame_len);
    Ok(build(x, order_m, frame_len, n_p, false, opts))
}

/// All-digital plan: `order` full stages, no `S_A`/`S_R` in the multiplex.
pub fn derive_drof_plan(
    order: usize,
    frame_len: usize,
    opts: &PlanOptions,
) -> Result<ModulationPlan> {
    if order == 0 {
        return Err(Error::domain("drof order must be >= 1"));
    }
    if frame_len == 0 {
        return Err(Error::domain("frame length must be positive"));
    }
    check_options(opts)?;
    Ok(build(order as f64, order, frame_len, frame_len, true, opts))
}

fn check_options(opts: &PlanOptions) -> Result<()> {
    for (name, v) in [
        ("r_a", opts.r_a),
        ("r_b", opts.r_b),
        ("alpha_r", opts.alpha_r),
        ("alpha_d", opts.alpha_d),
        ("alpha_a", opts.alpha_a),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::domain(format!("{name} must be positive, got {v}")));
        }
    }
    opts.profile.first.validate()?;
    opts.profile.rest.validate()
}

fn build(
    inv_eta: f64,
    order_m: usize,
    frame_len: usize,
    n_p: usize,
    drof_mode: bool,
    opts: &PlanOptions,
) -> ModulationPlan {
    ModulationPlan {
        inv_eta,
        order_m,
        frame_len,
        n_p,
        n_r: frame_len - n_p,
        r_a: opts.r_a,
        r_b: opts.r_b,
        stage_quantizers: (1..=order_m).map(|s| opts.profile.stage(s)).collect(),
        alpha_r: opts.alpha_r,
        alpha_d: opts.alpha_d,
        alpha_a: opts.alpha_a,
        interleaver_seed: opts.interleaver_seed,
        drof_mode,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub code: &'static str,
    pub detail: String,
}

/// Every broken plan invariant, each with a stable machine-readable code.
pub fn validate_plan(plan: &ModulationPlan) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |code, detail: String| out.push(Violation { code, detail });

    if plan.frame_len == 0 {
        push("frame-len", "frame length is zero".into());
    }
    if plan.order_m == 0 {
        push("order", "order must be >= 1".into());
    }
    if !(plan.inv_eta >= 1.0 && plan.inv_eta.is_finite()) {
        push(
            "eta-range",
            format!("1/eta = {} outside [1, inf)", plan.inv_eta),
        );
    }
    if plan.n_p + plan.n_r != plan.frame_len {
        push(
            "partition-sum",
            format!(
                "n_p + n_r = {} != N = {}",
                plan.n_p + plan.n_r,
                plan.frame_len
            ),
        );
    }
    if plan.stage_quantizers.len() != plan.order_m {
        push(
            "stage-count",
            format!(
                "{} stage quantizers for order {}",
                plan.stage_quantizers.len(),
                plan.order_m
            ),
        );
    }
    for (i, q) in plan.stage_quantizers.iter().enumerate() {
        if let Err(e) = q.validate() {
            push("quantizer", format!("stage {}: {e}", i + 1));
        }
    }
    for (name, v) in [
        ("alpha_r", plan.alpha_r),
        ("alpha_d", plan.alpha_d),
        ("alpha_a", plan.alpha_a),
        ("r_a", plan.r_a),
        ("r_b", plan.r_b),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            push("scaling", format!("{name} = {v} must be positive"));
        }
    }
    if plan.drof_mode {
        if plan.n_r != 0 {
            push(
                "drof-residual",
                format!("drof plan keeps n_r = {}", plan.n_r),
            );
        }
        if plan.n_p != plan.frame_len {
            push(
                "drof-partition",
                format!("drof plan has n_p = {} != N", plan.n_p),
            );
        }
    } else if plan.order_m >= 1 {
        let m = plan.order_m as f64;
        let tol = 1e-12;
        if plan.inv_eta < m - tol || plan.inv_eta > m + 1.0 + tol {
            push(
                "order-bound",
                format!("1/eta = {} outside [{}, {}]", plan.inv_eta, m, m + 1.0),
            );
        }
        let arof = (plan.inv_eta - 1.0).abs() < tol;
        if (plan.n_p == 0) != arof {
            push(
                "arof-partition",
                format!("n_p = {} but 1/eta = {}", plan.n_p, plan.inv_eta),
            );
        }
    }
    out
}
