//! Secrecy, per-type and reliability exponents.
//!
//! The tilted log-partition functions F₀ and G₀ drive everything here. For a
//! joint law of (X, Z) with posterior `P_{X|Z}` and information density
//! `ι(x,z) = ln P_{X|Z}(x|z)/P_X(x)`, write
//!
//! ```text
//! L_z(λ) = ln Σ_x P_{X|Z}(x|z) exp(λ ι(x,z))
//! F₀(λ)  = ln Σ_z P_Z(z) exp(L_z(λ))
//! G₀(P,λ) = Σ_z P(z) L_z(λ)
//! ```
//!
//! Pairs with `P_{X|Z}(x|z) = 0` never enter the inner sums. Every exponent
//! is a one-dimensional concave maximization of `λ·r − G₀` (or `− F₀`) over an
//! interval; intervals that are unbounded in theory are clamped to
//! `[-rho_max, rho_max]`.

use rayon::prelude::*;

use crate::combinatorics::compositions;
use crate::error::{Error, Result};
use crate::optimize::{maximize_concave, Maximum, ARG_TOLERANCE};
use crate::prob::{
    conditional_kl, kl_divergence, log_sum_exp, mutual_information, Channel, Distribution, JointXZ,
    WiretapInstance,
};

pub const DEFAULT_RHO_MAX: f64 = 50.0;

/// Exponents within this distance of zero are reported as zero.
pub const ZERO_TOLERANCE: f64 = 1e-9;

/// Slack used when deciding whether a level lies outside the achievable range.
const LEVEL_RANGE_SLACK: f64 = 1e-12;

/// Grid points allowed in [`secrecy_exponent_min_form`].
pub const MIN_FORM_GRID_CAP: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentResult {
    /// Exponent in nats; may be `+inf`.
    pub value: f64,
    /// Optimizing λ (or ρ).
    pub arg_lambda: f64,
    /// The optimizer landed on an end of its search interval.
    pub boundary_hit: bool,
    /// The optimizer stopped on an artificial clamp; `value` only bounds the
    /// true exponent from below.
    pub lower_bound: bool,
}

impl ExponentResult {
    fn infinite(arg: f64) -> Self {
        Self {
            value: f64::INFINITY,
            arg_lambda: arg,
            boundary_hit: true,
            lower_bound: false,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }

    pub fn is_zero(&self) -> bool {
        self.value.abs() <= ZERO_TOLERANCE
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualOptions {
    pub rho_max: f64,
    pub tolerance: f64,
}

impl Default for DualOptions {
    fn default() -> Self {
        Self {
            rho_max: DEFAULT_RHO_MAX,
            tolerance: ARG_TOLERANCE,
        }
    }
}

/// Per-output-symbol lists of `(ln P_{X|Z}(x|z), ι(x,z))` over the support.
struct Tilts {
    rows: Vec<Vec<(f64, f64)>>,
    ln_output: Vec<f64>,
}

impl Tilts {
    fn new(joint: &JointXZ) -> Self {
        let rows = (0..joint.output_size())
            .map(|z| {
                (0..joint.input_size())
                    .filter(|&x| joint.posterior().prob(z, x) > 0.0)
                    .map(|x| {
                        let ln_post = joint.posterior().prob(z, x).ln();
                        (ln_post, ln_post - joint.input().get(x).ln())
                    })
                    .collect()
            })
            .collect();
        Self {
            rows,
            ln_output: joint.output().ln_probs(),
        }
    }

    fn log_inner(&self, z: usize, lambda: f64) -> f64 {
        log_sum_exp(self.rows[z].iter().map(|&(lp, iota)| lp + lambda * iota))
    }

    fn f0(&self, lambda: f64) -> f64 {
        if lambda == 0.0 {
            return 0.0;
        }
        log_sum_exp((0..self.rows.len()).map(|z| self.ln_output[z] + self.log_inner(z, lambda)))
    }

    fn g0(&self, weights: &Distribution, lambda: f64) -> f64 {
        if lambda == 0.0 {
            return 0.0;
        }
        weights
            .probs()
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(z, &p)| p * self.log_inner(z, lambda))
            .sum()
    }

    /// Closure of the range of λ ↦ ∂G₀/∂λ, which is also the set of levels
    /// A(P; Q) reachable by some Q.
    fn level_range(&self, weights: &Distribution) -> (f64, f64) {
        let mut lo = 0.0;
        let mut hi = 0.0;
        for (z, &p) in weights.probs().iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let row = &self.rows[z];
            lo += p * row.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
            hi += p * row.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
        }
        (lo, hi)
    }
}

fn check_weights(joint: &JointXZ, weights: &Distribution) -> Result<()> {
    if weights.len() != joint.output_size() {
        return Err(Error::DimensionMismatch {
            expected: joint.output_size(),
            actual: weights.len(),
        });
    }
    Ok(())
}

fn check_rate(rate: f64) -> Result<()> {
    if rate.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidRate(rate))
    }
}

/// Maximizes a concave objective that is exactly zero at λ = 0, keeping
/// λ = 0 as an explicit candidate when it lies in `[lo, hi]`. Like the
/// interval ends, the origin wins ties with the golden-section candidate.
fn maximize_through_origin<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Maximum {
    let mut m = maximize_concave(&f, lo, hi, tol);
    if lo <= 0.0 && 0.0 <= hi && m.arg != 0.0 {
        let v0 = f(0.0);
        if v0 >= m.value - 1e-14 * m.value.abs().max(1.0) {
            m = Maximum {
                arg: 0.0,
                value: v0,
                at_lower: lo == 0.0,
                at_upper: hi == 0.0,
            };
        }
    }
    m
}

/// Builds a result from a search whose ends at `±rho_max` are artificial.
fn clamped_result(m: Maximum, lower_is_clamp: bool, upper_is_clamp: bool) -> ExponentResult {
    ExponentResult {
        value: m.value,
        arg_lambda: m.arg,
        boundary_hit: m.on_boundary(),
        lower_bound: (m.at_lower && lower_is_clamp) || (m.at_upper && upper_is_clamp),
    }
}

/// F₀(λ) = ln Σ_z P_Z(z) Σ_x P_{X|Z}(x|z)^{1+λ} P_X(x)^{-λ}.
pub fn f0(joint: &JointXZ, lambda: f64) -> f64 {
    Tilts::new(joint).f0(lambda)
}

/// G₀(P, λ) = Σ_z P(z) ln Σ_x P_{X|Z}(x|z)^{1+λ} P_X(x)^{-λ}.
pub fn g0(joint: &JointXZ, weights: &Distribution, lambda: f64) -> Result<f64> {
    check_weights(joint, weights)?;
    Ok(Tilts::new(joint).g0(weights, lambda))
}

/// Smallest and largest level `A(P; Q)` over channels `Q` that avoid the
/// zeros of the posterior.
pub fn level_range(joint: &JointXZ, weights: &Distribution) -> Result<(f64, f64)> {
    check_weights(joint, weights)?;
    Ok(Tilts::new(joint).level_range(weights))
}

/// Secrecy exponent `max_{0≤λ≤1} {λR' − F₀(λ)}`.
///
/// The objective is concave and vanishes at λ = 0 with slope `R' − I(X;Z)`,
/// so the result is exactly zero whenever `R' ≤ I(X;Z)`.
pub fn secrecy_exponent(joint: &JointXZ, rate_prime: f64) -> Result<ExponentResult> {
    check_rate(rate_prime)?;
    let tilts = Tilts::new(joint);
    let m = maximize_through_origin(|l| l * rate_prime - tilts.f0(l), 0.0, 1.0, ARG_TOLERANCE);
    Ok(ExponentResult {
        value: m.value.max(0.0),
        arg_lambda: m.arg,
        boundary_hit: m.on_boundary(),
        lower_bound: false,
    })
}

/// Secrecy exponent swept over increasing rates.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentCurve {
    pub points: Vec<(f64, ExponentResult)>,
}

/// Evaluates [`secrecy_exponent`] at each rate. Rates must be strictly
/// increasing. Points are computed independently, so the output does not
/// depend on scheduling.
pub fn secrecy_curve(joint: &JointXZ, rates: &[f64]) -> Result<ExponentCurve> {
    if rates.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "sweep rates must be strictly increasing".into(),
        ));
    }
    let points = rates
        .par_iter()
        .map(|&r| secrecy_exponent(joint, r).map(|e| (r, e)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExponentCurve { points })
}

/// `A(P; Q) = D(Q‖P_X|P) − D(Q‖P_{X|Z}|P)`, with `Q` a channel from Z to X.
///
/// Returns `-inf` when `Q` charges a pair where the posterior vanishes.
pub fn a_value(joint: &JointXZ, weights: &Distribution, q: &Channel) -> Result<f64> {
    check_weights(joint, weights)?;
    let to_input = conditional_kl(q, &joint.replicated_input(), weights)?;
    let to_posterior = conditional_kl(q, joint.posterior(), weights)?;
    if to_posterior.is_infinite() {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(to_input - to_posterior)
}

/// `Q_ρ(x|z) ∝ P_{X|Z}(x|z) exp(ρ ι(x,z))`, the minimizer behind the
/// closed form of E_b.
pub fn tilted_posterior(joint: &JointXZ, rho: f64) -> Result<Channel> {
    let tilts = Tilts::new(joint);
    let rows = (0..joint.output_size())
        .map(|z| {
            let norm = tilts.log_inner(z, rho);
            let row = (0..joint.input_size())
                .map(|x| {
                    let post = joint.posterior().prob(z, x);
                    if post == 0.0 {
                        0.0
                    } else {
                        (post.ln() + rho * joint.information_density(x, z) - norm).exp()
                    }
                })
                .collect();
            Distribution::normalized(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Channel::from_rows(rows)
}

/// `E_b(a) = a + sup_ρ {ρa − G₀(P,ρ)}`, the smallest `D(Q‖P_X|P)` over
/// channels `Q` at level `A(P;Q) = a`.
///
/// Levels outside the achievable range give `+inf`. Inside it the search is
/// clamped to `[-rho_max, rho_max]`.
pub fn eb_closed_form(
    joint: &JointXZ,
    weights: &Distribution,
    level: f64,
    opts: DualOptions,
) -> Result<ExponentResult> {
    check_weights(joint, weights)?;
    check_rate(level)?;
    let tilts = Tilts::new(joint);
    let (lo, hi) = tilts.level_range(weights);
    if level < lo - LEVEL_RANGE_SLACK {
        return Ok(ExponentResult::infinite(-opts.rho_max));
    }
    if level > hi + LEVEL_RANGE_SLACK {
        return Ok(ExponentResult::infinite(opts.rho_max));
    }
    let m = maximize_through_origin(
        |r| r * level - tilts.g0(weights, r),
        -opts.rho_max,
        opts.rho_max,
        opts.tolerance,
    );
    let mut result = clamped_result(m, true, true);
    result.value = level + m.value.max(0.0);
    Ok(result)
}

/// The three pieces of the per-type exponent decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TypeExponents {
    /// `max_{λ≤1} {λR' − G₀(λ)}`.
    pub e1: ExponentResult,
    /// `max_{λ≥0} {λR' − G₀(λ)}`, equal to `min_{a>R'} {E_b(a) − a}`.
    pub e2: ExponentResult,
    /// `min_{a≤R'} {E_b(a) − a}`, equal to `max_{λ≤0} {λR' − G₀(λ)}`.
    pub e2_bar: ExponentResult,
}

pub fn e1_e2(
    joint: &JointXZ,
    weights: &Distribution,
    rate_prime: f64,
    opts: DualOptions,
) -> Result<TypeExponents> {
    check_weights(joint, weights)?;
    check_rate(rate_prime)?;
    let tilts = Tilts::new(joint);
    let (lo, hi) = tilts.level_range(weights);
    let objective = |l: f64| l * rate_prime - tilts.g0(weights, l);
    let below = rate_prime < lo - LEVEL_RANGE_SLACK;
    let above = rate_prime > hi + LEVEL_RANGE_SLACK;

    let e1 = if below {
        ExponentResult::infinite(-opts.rho_max)
    } else {
        let m = maximize_through_origin(objective, -opts.rho_max, 1.0, opts.tolerance);
        clamped_result(m, true, false)
    };
    let e2 = if above {
        ExponentResult::infinite(opts.rho_max)
    } else {
        let m = maximize_through_origin(objective, 0.0, opts.rho_max, opts.tolerance);
        clamped_result(m, false, true)
    };
    let e2_bar = if below {
        ExponentResult::infinite(-opts.rho_max)
    } else {
        let m = maximize_through_origin(objective, -opts.rho_max, 0.0, opts.tolerance);
        clamped_result(m, true, false)
    };
    Ok(TypeExponents { e1, e2, e2_bar })
}

/// Per-type exponent `E_t = max_{0≤λ≤1} {λR' − G₀(P,λ)}`.
pub fn et(joint: &JointXZ, weights: &Distribution, rate_prime: f64) -> Result<ExponentResult> {
    check_weights(joint, weights)?;
    check_rate(rate_prime)?;
    let tilts = Tilts::new(joint);
    let m = maximize_through_origin(
        |l| l * rate_prime - tilts.g0(weights, l),
        0.0,
        1.0,
        ARG_TOLERANCE,
    );
    let result = ExponentResult {
        value: m.value.max(0.0),
        arg_lambda: m.arg,
        boundary_hit: m.on_boundary(),
        lower_bound: false,
    };
    #[cfg(debug_assertions)]
    {
        let parts = e1_e2(joint, weights, rate_prime, DualOptions::default())?;
        if parts.e1.is_finite() && parts.e2.is_finite() {
            let min = parts.e1.value.min(parts.e2.value);
            debug_assert!(
                (min - result.value).abs() <= 1e-9,
                "E_t = {} but min(E1, E2) = {}",
                result.value,
                min
            );
        }
    }
    Ok(result)
}

/// `D(P‖P_Z) + E_t(P, R')`, the quantity minimized in the min-form secrecy
/// exponent.
pub fn min_form_objective(joint: &JointXZ, weights: &Distribution, rate_prime: f64) -> Result<f64> {
    let divergence = kl_divergence(weights, joint.output())?;
    Ok(divergence + et(joint, weights, rate_prime)?.value)
}

/// `P(z) ∝ P_Z(z) Σ_x P_{X|Z}(x|z)^{1+λ} P_X(x)^{-λ}`, the minimizing output
/// distribution for a given λ.
pub fn tilted_output(joint: &JointXZ, lambda: f64) -> Result<Distribution> {
    let tilts = Tilts::new(joint);
    let logs: Vec<f64> = (0..joint.output_size())
        .map(|z| tilts.ln_output[z] + tilts.log_inner(z, lambda))
        .collect();
    let norm = log_sum_exp(logs.iter().copied());
    Distribution::normalized(logs.iter().map(|l| (l - norm).exp()).collect())
}

/// `min_P {D(P‖P_Z) + E_t(P, R')}` over the simplex grid with step
/// `1/grid_resolution`, plus the analytic minimizer at the outer optimal λ.
///
/// `arg_lambda` is the per-type optimizer at the minimizing `P`.
pub fn secrecy_exponent_min_form(
    joint: &JointXZ,
    rate_prime: f64,
    grid_resolution: usize,
) -> Result<ExponentResult> {
    if grid_resolution < 2 {
        return Err(Error::InvalidParameter(format!(
            "grid resolution must be at least 2, got {grid_resolution}"
        )));
    }
    let k = joint.output_size();
    let grid = compositions(grid_resolution, k, MIN_FORM_GRID_CAP)?;
    let outer = secrecy_exponent(joint, rate_prime)?;
    let mut candidates: Vec<Distribution> = grid
        .into_iter()
        .map(|counts| {
            Distribution::normalized(counts.iter().map(|&c| c as f64).collect())
                .expect("compositions are non-empty")
        })
        .collect();
    candidates.push(tilted_output(joint, outer.arg_lambda)?);

    let scored = candidates
        .par_iter()
        .map(|p| min_form_objective(joint, p, rate_prime))
        .collect::<Result<Vec<_>>>()?;
    let (best, _) = scored
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid is non-empty");
    let per_type = et(joint, &candidates[best], rate_prime)?;
    Ok(ExponentResult {
        value: scored[best],
        ..per_type
    })
}

/// Gallager's `E₀(ρ) = −ln Σ_y [Σ_x P_X(x) V(y|x)^{1/(1+ρ)}]^{1+ρ}`.
pub fn gallager_e0(input: &Distribution, channel: &Channel, rho: f64) -> Result<f64> {
    if input.len() != channel.input_size() {
        return Err(Error::DimensionMismatch {
            expected: channel.input_size(),
            actual: input.len(),
        });
    }
    if !rho.is_finite() || rho <= -1.0 {
        return Err(Error::InvalidParameter(format!(
            "E0 needs rho > -1, got {rho}"
        )));
    }
    if rho == 0.0 {
        return Ok(0.0);
    }
    Ok(gallager_e0_unchecked(input, channel, rho))
}

fn gallager_e0_unchecked(input: &Distribution, channel: &Channel, rho: f64) -> f64 {
    if rho == 0.0 {
        return 0.0;
    }
    let s = 1.0 / (1.0 + rho);
    let per_output = (0..channel.output_size()).map(|y| {
        let inner = log_sum_exp((0..channel.input_size()).filter_map(|x| {
            let (p, v) = (input.get(x), channel.prob(x, y));
            (p > 0.0 && v > 0.0).then(|| p.ln() + s * v.ln())
        }));
        (1.0 + rho) * inner
    });
    -log_sum_exp(per_output)
}

/// Gallager's random-coding exponent `max_{0≤ρ≤1} {E₀(ρ) − ρ·rate}`.
pub fn gallager_er(input: &Distribution, channel: &Channel, rate: f64) -> Result<ExponentResult> {
    check_rate(rate)?;
    gallager_e0(input, channel, 1.0)?;
    let m = maximize_through_origin(
        |r| gallager_e0_unchecked(input, channel, r) - r * rate,
        0.0,
        1.0,
        ARG_TOLERANCE,
    );
    Ok(ExponentResult {
        value: m.value.max(0.0),
        arg_lambda: m.arg,
        boundary_hit: m.on_boundary(),
        lower_bound: false,
    })
}

/// `(E_r(P_X, V, R + R'), E_s(P_X, W, R'))` for a wire-tap instance.
pub fn corollary_exponent_pair(
    instance: &WiretapInstance,
) -> Result<(ExponentResult, ExponentResult)> {
    let reliability = gallager_er(
        instance.input(),
        instance.main_channel(),
        instance.rate() + instance.rate_prime(),
    )?;
    let secrecy = secrecy_exponent(instance.joint(), instance.rate_prime())?;
    Ok((reliability, secrecy))
}

/// `I(X;Y)` for Bob's channel of an instance.
pub fn main_mutual_information(instance: &WiretapInstance) -> f64 {
    mutual_information(instance.input(), instance.main_channel())
        .expect("dimensions checked at construction")
}
