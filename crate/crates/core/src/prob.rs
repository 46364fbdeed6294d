//! Finite-alphabet probability primitives.
//!
//! Everything here works in nats. Distributions and channels are validated at
//! construction: probabilities at or below [`ZERO_THRESHOLD`] in magnitude are
//! snapped to exact zeros, and sums must equal one within [`SUM_TOLERANCE`].
//! The conventions `0 ln 0 = 0` and `0 ln(0/0) = 0` hold throughout.

use crate::error::{Error, Result};

/// Magnitudes at or below this value are treated as exact zeros.
pub const ZERO_THRESHOLD: f64 = 1e-15;

/// Allowed deviation of a probability vector's sum from one.
pub const SUM_TOLERANCE: f64 = 1e-12;

/// A point on the probability simplex over `{0, .., len-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        let mut probs = probs;
        for (index, p) in probs.iter_mut().enumerate() {
            if !p.is_finite() || *p < -ZERO_THRESHOLD || *p > 1.0 + SUM_TOLERANCE {
                return Err(Error::InvalidProbability { index, value: *p });
            }
            if p.abs() <= ZERO_THRESHOLD {
                *p = 0.0;
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::NotNormalized { sum });
        }
        Ok(Self { probs })
    }

    /// Scales non-negative weights to sum to one.
    pub fn normalized(weights: Vec<f64>) -> Result<Self> {
        if let Some((index, &value)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !w.is_finite() || **w < 0.0)
        {
            return Err(Error::InvalidProbability { index, value });
        }
        let sum: f64 = weights.iter().sum();
        if sum <= 0.0 {
            return Err(Error::NotNormalized { sum });
        }
        Self::new(weights.into_iter().map(|w| w / sum).collect())
    }

    pub fn uniform(size: usize) -> Self {
        assert!(size > 0, "uniform distribution needs a non-empty alphabet");
        Self {
            probs: vec![1.0 / size as f64; size],
        }
    }

    /// Point mass on `symbol`.
    pub fn point(size: usize, symbol: usize) -> Self {
        assert!(symbol < size);
        let mut probs = vec![0.0; size];
        probs[symbol] = 1.0;
        Self { probs }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, symbol: usize) -> f64 {
        self.probs[symbol]
    }

    pub fn is_full_support(&self) -> bool {
        self.probs.iter().all(|&p| p > 0.0)
    }

    /// Fails with [`Error::SupportViolation`] naming `what` if some entry is zero.
    pub fn require_full_support(&self, what: &'static str) -> Result<()> {
        match self.probs.iter().position(|&p| p <= 0.0) {
            Some(index) => Err(Error::SupportViolation { what, index }),
            None => Ok(()),
        }
    }

    /// Natural logs of the entries; zero entries map to `-inf`.
    pub fn ln_probs(&self) -> Vec<f64> {
        self.probs.iter().map(|p| p.ln()).collect()
    }
}

/// A row-stochastic matrix from an input alphabet to an output alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    rows: Vec<Distribution>,
}

impl Channel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let rows = rows
            .into_iter()
            .enumerate()
            .map(|(row, r)| {
                Distribution::new(r).map_err(|e| Error::InvalidRow {
                    row,
                    source: Box::new(e),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(rows)
    }

    pub fn from_rows(rows: Vec<Distribution>) -> Result<Self> {
        let first = rows.first().ok_or(Error::EmptyAlphabet)?;
        let output_size = first.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != output_size) {
            return Err(Error::DimensionMismatch {
                expected: output_size,
                actual: bad.len(),
            });
        }
        Ok(Self { rows })
    }

    /// Binary symmetric channel with the given crossover probability.
    pub fn bsc(crossover: f64) -> Result<Self> {
        Self::new(vec![
            vec![1.0 - crossover, crossover],
            vec![crossover, 1.0 - crossover],
        ])
    }

    /// Binary erasure channel; outputs are `0`, `1`, `erasure`.
    pub fn bec(erasure: f64) -> Result<Self> {
        Self::new(vec![
            vec![1.0 - erasure, 0.0, erasure],
            vec![0.0, 1.0 - erasure, erasure],
        ])
    }

    pub fn identity(size: usize) -> Self {
        Self {
            rows: (0..size).map(|i| Distribution::point(size, i)).collect(),
        }
    }

    /// Every input maps to the same output distribution.
    pub fn constant(input_size: usize, row: Distribution) -> Self {
        Self {
            rows: vec![row; input_size],
        }
    }

    pub fn input_size(&self) -> usize {
        self.rows.len()
    }

    pub fn output_size(&self) -> usize {
        self.rows[0].len()
    }

    pub fn row(&self, input: usize) -> &Distribution {
        &self.rows[input]
    }

    pub fn rows(&self) -> &[Distribution] {
        &self.rows
    }

    pub fn prob(&self, input: usize, output: usize) -> f64 {
        self.rows[input].get(output)
    }

    /// Cascade `self` followed by `next`.
    pub fn compose(&self, next: &Channel) -> Result<Channel> {
        if self.output_size() != next.input_size() {
            return Err(Error::DimensionMismatch {
                expected: self.output_size(),
                actual: next.input_size(),
            });
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut out = vec![0.0; next.output_size()];
                for (mid, &p) in row.probs().iter().enumerate() {
                    for (o, &q) in out.iter_mut().zip(next.row(mid).probs()) {
                        *o += p * q;
                    }
                }
                out
            })
            .collect();
        Channel::new(rows)
    }
}

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}

/// Distribution of the channel output when the input is drawn from `input`.
pub fn output_marginal(input: &Distribution, channel: &Channel) -> Result<Distribution> {
    check_len(channel.input_size(), input.len())?;
    let mut out = vec![0.0; channel.output_size()];
    for (x, &px) in input.probs().iter().enumerate() {
        for (o, &w) in out.iter_mut().zip(channel.row(x).probs()) {
            *o += px * w;
        }
    }
    Distribution::new(out)
}

/// Bayes posterior of the input given the output, as a channel from outputs
/// to inputs. Every output symbol must have positive probability.
pub fn posterior(input: &Distribution, channel: &Channel) -> Result<Channel> {
    let output = output_marginal(input, channel)?;
    output.require_full_support("output marginal")?;
    let rows = (0..channel.output_size())
        .map(|z| {
            let pz = output.get(z);
            let row = (0..channel.input_size())
                .map(|x| input.get(x) * channel.prob(x, z) / pz)
                .collect();
            Distribution::normalized(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Channel::from_rows(rows)
}

/// I(X;Z) in nats for `X ~ input` observed through `channel`.
pub fn mutual_information(input: &Distribution, channel: &Channel) -> Result<f64> {
    let output = output_marginal(input, channel)?;
    let mut total = 0.0;
    for (x, &px) in input.probs().iter().enumerate() {
        if px == 0.0 {
            continue;
        }
        for (z, &w) in channel.row(x).probs().iter().enumerate() {
            if w > 0.0 {
                total += px * w * (w / output.get(z)).ln();
            }
        }
    }
    Ok(total.max(0.0))
}

/// D(p‖q) in nats; `+inf` when `p` charges a symbol that `q` does not.
pub fn kl_divergence(p: &Distribution, q: &Distribution) -> Result<f64> {
    check_len(p.len(), q.len())?;
    let mut total = 0.0;
    for (&a, &b) in p.probs().iter().zip(q.probs()) {
        if a == 0.0 {
            continue;
        }
        if b == 0.0 {
            return Ok(f64::INFINITY);
        }
        total += a * (a / b).ln();
    }
    Ok(total.max(0.0))
}

/// Σ_z weights(z) · D(q(·|z) ‖ reference(·|z)).
///
/// Rows of both channels are indexed by the conditioning symbol. Rows with
/// zero weight are skipped even when their divergence is infinite.
pub fn conditional_kl(q: &Channel, reference: &Channel, weights: &Distribution) -> Result<f64> {
    check_len(weights.len(), q.input_size())?;
    check_len(weights.len(), reference.input_size())?;
    check_len(q.output_size(), reference.output_size())?;
    let mut total = 0.0;
    for (z, &w) in weights.probs().iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        total += w * kl_divergence(q.row(z), reference.row(z))?;
    }
    Ok(total)
}

/// ln P^n(seq) for the product distribution; `-inf` when a symbol has zero mass.
pub fn sequence_log_prob(p: &Distribution, seq: &[usize]) -> Result<f64> {
    seq.iter().try_fold(0.0, |acc, &s| {
        if s >= p.len() {
            Err(Error::SymbolOutOfRange {
                symbol: s,
                alphabet_size: p.len(),
            })
        } else {
            Ok(acc + p.get(s).ln())
        }
    })
}

/// Prefixes `channel` with an auxiliary channel `prefix: V -> X`.
///
/// Returns the induced input distribution on X and the end-to-end channel
/// from V, so every exponent computation applies to the prefixed system with
/// V as its input.
pub fn compose_prefix(
    aux: &Distribution,
    prefix: &Channel,
    channel: &Channel,
) -> Result<(Distribution, Channel)> {
    let induced = output_marginal(aux, prefix)?;
    let effective = prefix.compose(channel)?;
    Ok((induced, effective))
}

/// Joint law of (X, Z) with `P_{X,Z}(x,z) = P_X(x) W(z|x)`, its marginals,
/// and the posterior `P_{X|Z}`.
///
/// Construction enforces the standing assumption that both P_X and P_Z have
/// full support.
#[derive(Debug, Clone, PartialEq)]
pub struct JointXZ {
    input: Distribution,
    channel: Channel,
    matrix: Vec<Vec<f64>>,
    output: Distribution,
    posterior: Channel,
}

impl JointXZ {
    pub fn new(input: Distribution, channel: Channel) -> Result<Self> {
        check_len(channel.input_size(), input.len())?;
        input.require_full_support("input distribution")?;
        let output = output_marginal(&input, &channel)?;
        output.require_full_support("output marginal")?;
        let matrix = (0..input.len())
            .map(|x| {
                channel
                    .row(x)
                    .probs()
                    .iter()
                    .map(|&w| input.get(x) * w)
                    .collect()
            })
            .collect();
        let posterior = posterior(&input, &channel)?;
        Ok(Self {
            input,
            channel,
            matrix,
            output,
            posterior,
        })
    }

    pub fn input(&self) -> &Distribution {
        &self.input
    }

    pub fn channel(&self) -> &Channel {
        &self.channel
    }

    pub fn output(&self) -> &Distribution {
        &self.output
    }

    /// `P_{X|Z}` as a channel from Z to X.
    pub fn posterior(&self) -> &Channel {
        &self.posterior
    }

    pub fn prob(&self, x: usize, z: usize) -> f64 {
        self.matrix[x][z]
    }

    pub fn input_size(&self) -> usize {
        self.input.len()
    }

    pub fn output_size(&self) -> usize {
        self.output.len()
    }

    /// ln[P_{X,Z}(x,z) / (P_X(x) P_Z(z))]; `-inf` where the joint is zero.
    pub fn information_density(&self, x: usize, z: usize) -> f64 {
        (self.posterior.prob(z, x) / self.input.get(x)).ln()
    }

    /// The reference channel Z -> X whose every row is P_X.
    pub fn replicated_input(&self) -> Channel {
        Channel::constant(self.output_size(), self.input.clone())
    }

    pub fn mutual_information(&self) -> f64 {
        mutual_information(&self.input, &self.channel).expect("dimensions checked at construction")
    }
}

/// Input distribution, Bob's channel V, Eve's channel W and the two rates
/// (message rate R and randomization rate R'), both in nats per symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct WiretapInstance {
    main: Channel,
    joint: JointXZ,
    rate: f64,
    rate_prime: f64,
}

impl WiretapInstance {
    pub fn new(
        input: Distribution,
        main: Channel,
        wiretap: Channel,
        rate: f64,
        rate_prime: f64,
    ) -> Result<Self> {
        for r in [rate, rate_prime] {
            if !r.is_finite() || r < 0.0 {
                return Err(Error::InvalidRate(r));
            }
        }
        check_len(main.input_size(), input.len())?;
        let joint = JointXZ::new(input, wiretap)?;
        Ok(Self {
            main,
            joint,
            rate,
            rate_prime,
        })
    }

    pub fn input(&self) -> &Distribution {
        self.joint.input()
    }

    pub fn main_channel(&self) -> &Channel {
        &self.main
    }

    pub fn wiretap_channel(&self) -> &Channel {
        self.joint.channel()
    }

    pub fn joint(&self) -> &JointXZ {
        &self.joint
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn rate_prime(&self) -> f64 {
        self.rate_prime
    }
}

/// ln Σ exp(v_i), ignoring `-inf` entries; `-inf` for an empty or all-`-inf` input.
pub fn log_sum_exp<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let values: Vec<f64> = values.into_iter().collect();
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}
