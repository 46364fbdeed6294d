//! Seeded sampling of the sub-codebook ensemble and exact leakage computation.
//!
//! Each message `w` owns `M'` codewords drawn i.i.d. from `P_X^n`, and the
//! encoder sends one of them uniformly at random. For a fixed codebook the
//! conditional output distribution `P_{Z|W=w}` is tabulated over all of
//! `Z^n`, so leakage divergences are exact; only the average over codebooks
//! is estimated, by Monte Carlo or by exhaustive enumeration on tiny cases.
//!
//! Randomness is counter-based: the ChaCha8 key is built from the master
//! seed and the replicate index, the stream from the message index, and the
//! word position from `(w', i)`. Any replicate, message or symbol can be
//! regenerated in isolation, and results do not depend on the number of
//! worker threads.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::prob::{log_sum_exp, Channel, Distribution, WiretapInstance};

/// Names the deterministic construction behind [`Codebook::sample`].
pub const GENERATOR_ID: &str =
    "chacha8/rand_chacha-0.9/key=le(seed,replicate)/stream=w/word=2(w'<<32+i)/inverse-cdf-53bit";

/// Largest `|Z|^n` tabulated by default.
pub const OUTPUT_SPACE_CAP: usize = 1 << 20;

/// Largest number of codebook symbols `M·M'·n` sampled at once.
pub const CODEBOOK_SYMBOL_CAP: usize = 1 << 26;

/// Largest number of codebooks `|X|^{nM'}` enumerated by
/// [`exhaustive_ensemble_mean`].
pub const EXHAUSTIVE_CAP: usize = 1 << 20;

/// Mean divergences at or below this are indistinguishable from the rounding
/// of `ln(p/q)` in the tabulated terms and are reported as zero leakage.
pub const DIVERGENCE_FLOOR: f64 = 1e-24;

const TRANSMISSION_STREAM: u64 = 1 << 63;
const TIE_STREAM: u64 = (1 << 63) + 1;

fn rng_for(seed: u64, replicate: u64, stream: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&replicate.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(stream);
    rng
}

fn uniform01(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Inverse-CDF sampler for one distribution.
#[derive(Debug, Clone)]
struct Sampler {
    cdf: Vec<f64>,
    last: usize,
}

impl Sampler {
    fn new(p: &Distribution) -> Self {
        let mut acc = 0.0;
        let cdf = p
            .probs()
            .iter()
            .map(|&q| {
                acc += q;
                acc
            })
            .collect();
        let last = p.probs().iter().rposition(|&q| q > 0.0).unwrap_or(0);
        Self { cdf, last }
    }

    fn draw(&self, u: f64) -> usize {
        self.cdf
            .iter()
            .position(|&c| u < c)
            .map_or(self.last, |s| s.min(self.last))
    }
}

fn uniform_index(rng: &mut ChaCha8Rng, size: usize) -> usize {
    ((uniform01(rng) * size as f64) as usize).min(size - 1)
}

fn ceil_exp(n: usize, rate: f64) -> f64 {
    let x = (n as f64 * rate).exp();
    // exp(n ln k) can land a few ulps above the integer k.
    (x * (1.0 - 1e-12)).ceil().max(1.0)
}

/// `⌈exp(n·rate)⌉`, treating values within relative 1e-12 of an integer as
/// that integer.
pub fn codebook_size(n: usize, rate: f64, cap: usize) -> Result<usize> {
    if !rate.is_finite() || rate < 0.0 {
        return Err(Error::InvalidRate(rate));
    }
    let size = ceil_exp(n, rate);
    if size > cap as f64 {
        return Err(Error::CapExceeded {
            what: "codebook size exp(nR)",
            required: size,
            cap: cap as f64,
        });
    }
    Ok(size as usize)
}

/// `M` messages with `M'` codewords each, every codeword of length `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codebook {
    n: usize,
    messages: usize,
    m_prime: usize,
    words: Vec<usize>,
    seed: u64,
    replicate: u64,
    generator_id: &'static str,
}

impl Codebook {
    /// Draws every symbol i.i.d. from `input`. Codeword `(w, w')` depends
    /// only on `(seed, replicate, w, w')`, so enlarging `M` or `M'` keeps the
    /// existing codewords.
    pub fn sample(
        input: &Distribution,
        n: usize,
        messages: usize,
        m_prime: usize,
        seed: u64,
        replicate: u64,
    ) -> Result<Self> {
        if n == 0 || messages == 0 || m_prime == 0 {
            return Err(Error::InvalidParameter(
                "blocklength and codebook sizes must be positive".into(),
            ));
        }
        let symbols = n as f64 * messages as f64 * m_prime as f64;
        if symbols > CODEBOOK_SYMBOL_CAP as f64 {
            return Err(Error::CapExceeded {
                what: "codebook symbols M·M'·n",
                required: symbols,
                cap: CODEBOOK_SYMBOL_CAP as f64,
            });
        }
        let sampler = Sampler::new(input);
        let mut words = Vec::with_capacity(symbols as usize);
        for w in 0..messages {
            let mut rng = rng_for(seed, replicate, w as u64);
            for wp in 0..m_prime {
                rng.set_word_pos(2 * ((wp as u128) << 32));
                words.extend((0..n).map(|_| sampler.draw(uniform01(&mut rng))));
            }
        }
        Ok(Self {
            n,
            messages,
            m_prime,
            words,
            seed,
            replicate,
            generator_id: GENERATOR_ID,
        })
    }

    /// Builds a codebook from explicit words, indexed `[w][w'][i]`.
    pub fn from_words(words: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        let messages = words.len();
        let m_prime = words.first().map_or(0, Vec::len);
        let n = words.first().and_then(|w| w.first()).map_or(0, Vec::len);
        if messages == 0 || m_prime == 0 || n == 0 {
            return Err(Error::InvalidParameter("codebook must be non-empty".into()));
        }
        let mut flat = Vec::with_capacity(messages * m_prime * n);
        for sub in &words {
            if sub.len() != m_prime {
                return Err(Error::DimensionMismatch {
                    expected: m_prime,
                    actual: sub.len(),
                });
            }
            for word in sub {
                if word.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        actual: word.len(),
                    });
                }
                flat.extend_from_slice(word);
            }
        }
        Ok(Self {
            n,
            messages,
            m_prime,
            words: flat,
            seed: 0,
            replicate: 0,
            generator_id: "explicit",
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn messages(&self) -> usize {
        self.messages
    }

    pub fn m_prime(&self) -> usize {
        self.m_prime
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn replicate(&self) -> u64 {
        self.replicate
    }

    pub fn generator_id(&self) -> &'static str {
        self.generator_id
    }

    pub fn word(&self, w: usize, w_prime: usize) -> &[usize] {
        let start = (w * self.m_prime + w_prime) * self.n;
        &self.words[start..start + self.n]
    }

    fn check_channel(&self, channel: &Channel) -> Result<()> {
        match self.words.iter().find(|&&x| x >= channel.input_size()) {
            Some(&symbol) => Err(Error::SymbolOutOfRange {
                symbol,
                alphabet_size: channel.input_size(),
            }),
            None => Ok(()),
        }
    }

    fn check_message(&self, w: usize) -> Result<()> {
        if w >= self.messages {
            return Err(Error::SymbolOutOfRange {
                symbol: w,
                alphabet_size: self.messages,
            });
        }
        Ok(())
    }
}

/// Samples a codebook with `M = ⌈exp(nR)⌉` messages and `M' = ⌈exp(nR')⌉`
/// codewords per message.
pub fn sample_codebook(instance: &WiretapInstance, n: usize, seed: u64) -> Result<Codebook> {
    let m = codebook_size(n, instance.rate(), CODEBOOK_SYMBOL_CAP)?;
    let m_prime = codebook_size(n, instance.rate_prime(), CODEBOOK_SYMBOL_CAP)?;
    Codebook::sample(instance.input(), n, m, m_prime, seed, 0)
}

fn output_space(size: usize, n: usize) -> Result<usize> {
    let total = (size as f64).powi(n as i32);
    if total > OUTPUT_SPACE_CAP as f64 {
        return Err(Error::CapExceeded {
            what: "output space |Z|^n",
            required: total,
            cap: OUTPUT_SPACE_CAP as f64,
        });
    }
    Ok(total as usize)
}

/// Fills `out` with `Π_i row(x_i)(z_i)` over all `z` in lexicographic order
/// (first symbol most significant), reusing `out`'s allocation.
fn product_table(rows: &[&[f64]], out: &mut Vec<f64>) {
    out.clear();
    out.push(1.0);
    let mut scratch = Vec::new();
    for row in rows {
        scratch.clear();
        scratch.reserve(out.len() * row.len());
        for &v in out.iter() {
            scratch.extend(row.iter().map(|&p| v * p));
        }
        std::mem::swap(out, &mut scratch);
    }
}

/// Same enumeration as `product_table`, summing logs instead.
fn log_product_table(rows: &[Vec<f64>], out: &mut Vec<f64>) {
    out.clear();
    out.push(0.0);
    let mut scratch = Vec::new();
    for row in rows {
        scratch.clear();
        for &v in out.iter() {
            scratch.extend(row.iter().map(|&p| v + p));
        }
        std::mem::swap(out, &mut scratch);
    }
}

/// Products of up to `n` entries of `channel` stay normal floats.
fn linear_domain_is_safe(channel: &Channel, n: usize) -> bool {
    let min = channel
        .rows()
        .iter()
        .flat_map(|r| r.probs().iter().copied())
        .filter(|&p| p > 0.0)
        .fold(1.0, f64::min);
    n as f64 * min.ln() > -600.0
}

/// `P_Z^n` over `Z^n` in lexicographic order.
pub fn product_distribution(p: &Distribution, n: usize) -> Result<Vec<f64>> {
    output_space(p.len(), n)?;
    let rows = vec![p.probs(); n];
    let mut out = Vec::new();
    product_table(&rows, &mut out);
    Ok(out)
}

/// `P_{Z|W}(·|w) = (1/M') Σ_{w'} W^n(·|x_{w,w'})` over `Z^n` in lexicographic
/// order (first symbol most significant).
pub fn conditional_output_distribution(
    codebook: &Codebook,
    channel: &Channel,
    w: usize,
) -> Result<Vec<f64>> {
    codebook.check_channel(channel)?;
    codebook.check_message(w)?;
    let size = output_space(channel.output_size(), codebook.n)?;
    if linear_domain_is_safe(channel, codebook.n) {
        Ok(linear_output(codebook, channel, w, size))
    } else {
        Ok(log_output(codebook, channel, w, size))
    }
}

/// Applies `channel` along every axis of a table over `X^n` (first symbol
/// most significant), giving a table over `Z^n`.
fn apply_along_axes(mut table: Vec<f64>, channel: &Channel, n: usize) -> Vec<f64> {
    let (nx, nz) = (channel.input_size(), channel.output_size());
    // Axes before `axis` are already over Z, the rest still over X.
    for axis in 0..n {
        let outer = nz.pow(axis as u32);
        let inner = nx.pow((n - axis - 1) as u32);
        let mut next = vec![0.0; outer * nz * inner];
        for o in 0..outer {
            for x in 0..nx {
                let src = &table[(o * nx + x) * inner..][..inner];
                for (z, &v) in channel.row(x).probs().iter().enumerate() {
                    if v == 0.0 {
                        continue;
                    }
                    let dst = &mut next[(o * nz + z) * inner..][..inner];
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d += v * s;
                    }
                }
            }
        }
        table = next;
    }
    table
}

fn linear_output(codebook: &Codebook, channel: &Channel, w: usize, size: usize) -> Vec<f64> {
    let nx = channel.input_size();
    let words = (nx as f64).powi(codebook.n as i32);
    if words <= codebook.m_prime as f64 {
        // Many codewords repeat; weight each distinct word by its frequency.
        let mut freq = vec![0.0; words as usize];
        for wp in 0..codebook.m_prime {
            let index = codebook.word(w, wp).iter().fold(0, |i, &x| i * nx + x);
            freq[index] += 1.0;
        }
        let inv_m = 1.0 / codebook.m_prime as f64;
        freq.iter_mut().for_each(|f| *f *= inv_m);
        return apply_along_axes(freq, channel, codebook.n);
    }
    let mut acc = vec![0.0; size];
    let mut table = Vec::with_capacity(size);
    for wp in 0..codebook.m_prime {
        let rows: Vec<&[f64]> = codebook
            .word(w, wp)
            .iter()
            .map(|&x| channel.row(x).probs())
            .collect();
        product_table(&rows, &mut table);
        for (a, t) in acc.iter_mut().zip(&table) {
            *a += t;
        }
    }
    let inv_m = 1.0 / codebook.m_prime as f64;
    acc.iter_mut().for_each(|a| *a *= inv_m);
    acc
}

fn log_output(codebook: &Codebook, channel: &Channel, w: usize, size: usize) -> Vec<f64> {
    let log_rows: Vec<Vec<f64>> = channel.rows().iter().map(Distribution::ln_probs).collect();
    let tables: Vec<Vec<f64>> = (0..codebook.m_prime)
        .map(|wp| {
            let rows: Vec<Vec<f64>> = codebook
                .word(w, wp)
                .iter()
                .map(|&x| log_rows[x].clone())
                .collect();
            let mut t = Vec::with_capacity(size);
            log_product_table(&rows, &mut t);
            t
        })
        .collect();
    let ln_m = (codebook.m_prime as f64).ln();
    (0..size)
        .map(|z| (log_sum_exp(tables.iter().map(|t| t[z])) - ln_m).exp())
        .collect()
}

/// `D(p‖q)` for explicit tables, summed as `Σ q·(r e^r − (e^r − 1))` with
/// `r = ln(p/q)`, so every term is non-negative and small divergences keep
/// their relative precision.
pub fn table_divergence(p: &[f64], q: &[f64]) -> f64 {
    let terms: Vec<f64> = p
        .iter()
        .zip(q)
        .map(|(&pi, &qi)| {
            if pi <= 0.0 {
                qi
            } else if qi <= 0.0 {
                f64::INFINITY
            } else {
                let r = (pi / qi).ln();
                (qi * (r * r.exp() - r.exp_m1())).max(0.0)
            }
        })
        .collect();
    pairwise_sum(&terms)
}

/// `D(P_{Z|W=w} ‖ P_Z^n)` by exact summation over `Z^n`.
pub fn leakage_divergence(
    codebook: &Codebook,
    input: &Distribution,
    channel: &Channel,
    w: usize,
) -> Result<f64> {
    let output = crate::prob::output_marginal(input, channel)?;
    let reference = product_distribution(&output, codebook.n)?;
    let p = conditional_output_distribution(codebook, channel, w)?;
    Ok(table_divergence(&p, &reference))
}

/// Sum by recursive halving; the result depends only on the order of
/// `values`, not on how work was scheduled.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 16 {
        return values.iter().sum();
    }
    let (a, b) = values.split_at(values.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Estimate of an ensemble average.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimResult {
    pub estimate: f64,
    pub std_error: f64,
    pub replicates: usize,
    pub seed: u64,
    /// True when the value is an exact enumeration rather than a sample mean.
    pub exact: bool,
}

impl SimResult {
    fn from_samples(samples: &[f64], seed: u64) -> Self {
        let count = samples.len();
        let mean = pairwise_sum(samples) / count as f64;
        let std_error = if count > 1 {
            let dev: Vec<f64> = samples.iter().map(|s| (s - mean) * (s - mean)).collect();
            (pairwise_sum(&dev) / (count - 1) as f64 / count as f64).sqrt()
        } else {
            0.0
        };
        Self {
            estimate: mean,
            std_error,
            replicates: count,
            seed,
            exact: false,
        }
    }
}

/// Per-replicate leakage divergences `D(P_{Z|W=w}‖P_Z^n)`, in replicate
/// order. Replicate `r` uses the codebook keyed by `(seed, r)`.
pub fn leakage_samples(
    input: &Distribution,
    channel: &Channel,
    n: usize,
    m_prime: usize,
    replicates: usize,
    seed: u64,
    w: usize,
) -> Result<Vec<f64>> {
    let output = crate::prob::output_marginal(input, channel)?;
    let reference = product_distribution(&output, n)?;
    (0..replicates)
        .into_par_iter()
        .map(|r| {
            let book = Codebook::sample(input, n, w + 1, m_prime, seed, r as u64)?;
            let p = conditional_output_distribution(&book, channel, w)?;
            Ok(table_divergence(&p, &reference))
        })
        .collect()
}

/// Monte Carlo mean of the leakage divergence of message 0 over
/// independently keyed codebooks with `M'` codewords per message.
pub fn ensemble_mean_divergence(
    input: &Distribution,
    channel: &Channel,
    n: usize,
    m_prime: usize,
    replicates: usize,
    seed: u64,
) -> Result<SimResult> {
    if replicates == 0 {
        return Err(Error::InvalidParameter(
            "need at least one replicate".into(),
        ));
    }
    let samples = leakage_samples(input, channel, n, m_prime, replicates, seed, 0)?;
    Ok(SimResult::from_samples(&samples, seed))
}

/// Exact ensemble average over every codebook.
#[derive(Debug, Clone, PartialEq)]
pub struct ExhaustiveMean {
    /// `E[D(P_{Z|W=w}‖P_Z^n)]`, with `exact` set and zero standard error.
    pub divergence: SimResult,
    /// `E[P_{Z|W}(·|w)]` over `Z^n`.
    pub mean_output: Vec<f64>,
    /// `max_z |E[P_{Z|W}(z|w)] − P_Z^n(z)|`.
    pub max_output_deviation: f64,
}

/// Averages over all `|X|^{nM'}` sub-codebooks of one message, each weighted
/// by its probability `Π_{w'} P_X^n(x_{w'})`.
pub fn exhaustive_ensemble_mean(
    input: &Distribution,
    channel: &Channel,
    n: usize,
    m_prime: usize,
) -> Result<ExhaustiveMean> {
    if n == 0 || m_prime == 0 {
        return Err(Error::InvalidParameter(
            "blocklength and M' must be positive".into(),
        ));
    }
    if input.len() != channel.input_size() {
        return Err(Error::DimensionMismatch {
            expected: channel.input_size(),
            actual: input.len(),
        });
    }
    let nx = input.len();
    let words = (nx as f64).powi(n as i32);
    let books = words.powi(m_prime as i32);
    if books > EXHAUSTIVE_CAP as f64 {
        return Err(Error::CapExceeded {
            what: "exhaustive codebook enumeration |X|^{nM'}",
            required: books,
            cap: EXHAUSTIVE_CAP as f64,
        });
    }
    let (words, books) = (words as usize, books as usize);
    let output = crate::prob::output_marginal(input, channel)?;
    let reference = product_distribution(&output, n)?;
    let size = reference.len();

    // W^n(·|x) and P_X^n(x) for every x in X^n.
    let sequences: Vec<Vec<usize>> = (0..words).map(|k| digits(k, nx, n)).collect();
    let word_prob: Vec<f64> = sequences
        .iter()
        .map(|x| x.iter().map(|&s| input.get(s)).product())
        .collect();
    let word_output: Vec<Vec<f64>> = sequences
        .iter()
        .map(|x| {
            let rows: Vec<&[f64]> = x.iter().map(|&s| channel.row(s).probs()).collect();
            let mut t = Vec::new();
            product_table(&rows, &mut t);
            t
        })
        .collect();

    let inv_m = 1.0 / m_prime as f64;
    let per_book: Vec<(f64, f64, Vec<f64>)> = (0..books)
        .into_par_iter()
        .map(|b| {
            let members = digits(b, words, m_prime);
            let weight: f64 = members.iter().map(|&k| word_prob[k]).product();
            let mut p = vec![0.0; size];
            for &k in &members {
                for (a, v) in p.iter_mut().zip(&word_output[k]) {
                    *a += v;
                }
            }
            p.iter_mut().for_each(|a| *a *= inv_m);
            let d = table_divergence(&p, &reference);
            (weight, d, p)
        })
        .collect();

    let mut mean_output = vec![0.0; size];
    let weighted: Vec<f64> = per_book.iter().map(|(wt, d, _)| wt * d).collect();
    for (wt, _, p) in &per_book {
        for (m, v) in mean_output.iter_mut().zip(p) {
            *m += wt * v;
        }
    }
    let max_output_deviation = mean_output
        .iter()
        .zip(&reference)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(ExhaustiveMean {
        divergence: SimResult {
            estimate: pairwise_sum(&weighted),
            std_error: 0.0,
            replicates: books,
            seed: 0,
            exact: true,
        },
        mean_output,
        max_output_deviation,
    })
}

/// Base-`radix` digits of `k`, most significant first.
fn digits(mut k: usize, radix: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = k % radix;
        k /= radix;
    }
    out
}

/// One blocklength of an empirical decay-rate run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalPoint {
    pub n: usize,
    pub m_prime: usize,
    pub mean: SimResult,
    /// `−(1/n) ln(mean)`; `+inf` when the mean is at most [`DIVERGENCE_FLOOR`].
    pub exponent: f64,
    /// First-order propagated standard error of `exponent`.
    pub exponent_std_error: f64,
}

/// Empirical exponents `−(1/n) ln E[D]` at each `(n, M')`. Every blocklength
/// reuses the master seed, so neighbouring points share common random
/// numbers.
pub fn empirical_exponent(
    input: &Distribution,
    channel: &Channel,
    points: &[(usize, usize)],
    replicates: usize,
    seed: u64,
) -> Result<Vec<EmpiricalPoint>> {
    points
        .iter()
        .map(|&(n, m_prime)| {
            let mean = ensemble_mean_divergence(input, channel, n, m_prime, replicates, seed)?;
            let (exponent, exponent_std_error) = if mean.estimate > DIVERGENCE_FLOOR {
                (
                    -mean.estimate.ln() / n as f64,
                    mean.std_error / (n as f64 * mean.estimate),
                )
            } else {
                (f64::INFINITY, 0.0)
            };
            Ok(EmpiricalPoint {
                n,
                m_prime,
                mean,
                exponent,
                exponent_std_error,
            })
        })
        .collect()
}

/// Exact leakage of a full codebook under a message distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeakageReport {
    /// `I(W;Z)`.
    pub mutual_information: f64,
    /// `Σ_w P_W(w) D(P_{Z|W=w}‖P_Z^n)`.
    pub average_divergence: f64,
    /// `D(P_Z̄‖P_Z^n)` for the induced output distribution `P_Z̄`.
    pub output_divergence: f64,
}

/// `I(W;Z) = D(P_{Z|W}‖P_Z^n|P_W) − D(P_Z̄‖P_Z^n)`, all terms by exact
/// summation over `Z^n`.
pub fn exact_leakage_mutual_information(
    codebook: &Codebook,
    input: &Distribution,
    channel: &Channel,
    message_dist: &Distribution,
) -> Result<LeakageReport> {
    if message_dist.len() != codebook.messages {
        return Err(Error::DimensionMismatch {
            expected: codebook.messages,
            actual: message_dist.len(),
        });
    }
    let output = crate::prob::output_marginal(input, channel)?;
    let reference = product_distribution(&output, codebook.n)?;
    let mut induced = vec![0.0; reference.len()];
    let mut average = 0.0;
    for w in 0..codebook.messages {
        let pw = message_dist.get(w);
        if pw == 0.0 {
            continue;
        }
        let p = conditional_output_distribution(codebook, channel, w)?;
        average += pw * table_divergence(&p, &reference);
        for (m, v) in induced.iter_mut().zip(&p) {
            *m += pw * v;
        }
    }
    let output_divergence = table_divergence(&induced, &reference);
    Ok(LeakageReport {
        mutual_information: (average - output_divergence).max(0.0),
        average_divergence: average,
        output_divergence,
    })
}

fn log_likelihood(word: &[usize], y: &[usize], log_rows: &[Vec<f64>]) -> f64 {
    word.iter().zip(y).map(|(&x, &s)| log_rows[x][s]).sum()
}

fn is_tie(a: f64, best: f64) -> bool {
    a == best || (a - best).abs() <= 1e-12 * best.abs().max(1.0)
}

/// Exact `Pr[Ŵ ≠ w | W = w]` for every message under joint maximum-likelihood
/// decoding of `(w, w')` over `channel`, with `w'` uniform and ties broken
/// uniformly among maximizers.
pub fn ml_error_per_message(codebook: &Codebook, channel: &Channel) -> Result<Vec<f64>> {
    codebook.check_channel(channel)?;
    let ny = channel.output_size();
    let size = output_space(ny, codebook.n)?;
    let log_rows: Vec<Vec<f64>> = channel.rows().iter().map(Distribution::ln_probs).collect();
    let (m, mp) = (codebook.messages, codebook.m_prime);
    let correct: Vec<Vec<f64>> = (0..size)
        .into_par_iter()
        .map(|k| {
            let y = digits(k, ny, codebook.n);
            let ll: Vec<f64> = (0..m * mp)
                .map(|c| log_likelihood(codebook.word(c / mp, c % mp), &y, &log_rows))
                .collect();
            let best = ll.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mut winners = vec![0usize; m];
            if best > f64::NEG_INFINITY {
                for (c, &l) in ll.iter().enumerate() {
                    if is_tie(l, best) {
                        winners[c / mp] += 1;
                    }
                }
            }
            let total: usize = winners.iter().sum();
            (0..m)
                .map(|w| {
                    let sent: f64 = ll[w * mp..(w + 1) * mp].iter().map(|l| l.exp()).sum();
                    if total == 0 {
                        0.0
                    } else {
                        sent / mp as f64 * winners[w] as f64 / total as f64
                    }
                })
                .collect()
        })
        .collect();
    Ok((0..m)
        .map(|w| {
            let col: Vec<f64> = correct.iter().map(|c| c[w]).collect();
            (1.0 - pairwise_sum(&col)).max(0.0)
        })
        .collect())
}

/// Keeps the better half of the messages; their worst error is at most twice
/// the average over all messages. Returns `(kept indices, worst kept error)`.
pub fn expurgate(per_message: &[f64]) -> (Vec<usize>, f64) {
    let mut order: Vec<usize> = (0..per_message.len()).collect();
    order.sort_by(|&a, &b| per_message[a].total_cmp(&per_message[b]).then(a.cmp(&b)));
    order.truncate(per_message.len().div_ceil(2));
    let worst = order.iter().map(|&w| per_message[w]).fold(0.0, f64::max);
    order.sort_unstable();
    (order, worst)
}

/// Monte Carlo estimate of the message error probability under joint ML
/// decoding, with a fresh codebook, message, transmitted codeword and noise
/// per replicate.
pub fn error_probability_mc(
    input: &Distribution,
    channel: &Channel,
    n: usize,
    messages: usize,
    m_prime: usize,
    replicates: usize,
    seed: u64,
) -> Result<SimResult> {
    if replicates == 0 {
        return Err(Error::InvalidParameter(
            "need at least one replicate".into(),
        ));
    }
    let log_rows: Vec<Vec<f64>> = channel.rows().iter().map(Distribution::ln_probs).collect();
    let noise: Vec<Sampler> = channel.rows().iter().map(Sampler::new).collect();
    let outcomes: Vec<f64> = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let book = Codebook::sample(input, n, messages, m_prime, seed, r as u64)?;
            book.check_channel(channel)?;
            let mut tx = rng_for(seed, r as u64, TRANSMISSION_STREAM);
            let w = uniform_index(&mut tx, messages);
            let wp = uniform_index(&mut tx, m_prime);
            let y: Vec<usize> = book
                .word(w, wp)
                .iter()
                .map(|&x| noise[x].draw(uniform01(&mut tx)))
                .collect();
            let ll: Vec<f64> = (0..messages * m_prime)
                .map(|c| log_likelihood(book.word(c / m_prime, c % m_prime), &y, &log_rows))
                .collect();
            let best = ll.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let winners: Vec<usize> = (0..ll.len()).filter(|&c| is_tie(ll[c], best)).collect();
            let mut ties = rng_for(seed, r as u64, TIE_STREAM);
            let decoded = winners[uniform_index(&mut ties, winners.len())] / m_prime;
            Ok(if decoded == w { 0.0 } else { 1.0 })
        })
        .collect::<Result<_>>()?;
    Ok(SimResult::from_samples(&outcomes, seed))
}

/// Rate `R + R' + ln 2 / n` at which the ensemble bound must hold so that,
/// after discarding the worse half of the messages, `M = exp(nR)` good
/// messages remain.
pub fn expurgated_union_rate(rate: f64, rate_prime: f64, n: usize) -> f64 {
    rate + rate_prime + std::f64::consts::LN_2 / n as f64
}
