//! Method-of-types enumeration and brute-force oracles.
//!
//! These routines recompute the quantities behind the closed forms in
//! [`crate::exponents`] by explicit enumeration on small instances: n-types,
//! conditional types (shells), the grouping of shells into A-levels with their
//! exact probabilities, a grid minimization for E_b, and the exact moment
//! `E[U_n ln U_n]` of the likelihood ratio for a fixed output type.

use crate::combinatorics::{composition_count, compositions, for_each_composition, LnFactorial};
use crate::error::{Error, Result};
use crate::exponents::{a_value, eb_closed_form, tilted_posterior, DualOptions};
use crate::prob::{conditional_kl, log_sum_exp, Channel, Distribution, JointXZ};

pub const DEFAULT_ENUMERATION_CAP: usize = 1_000_000;

/// Levels closer than this are merged into one.
pub const LEVEL_MERGE_TOLERANCE: f64 = 1e-12;

/// Default per-row grid resolution of [`eb_bruteforce`].
pub const DEFAULT_EB_GRID: usize = 200;

/// Largest `|X|·|Z|` accepted by [`eb_bruteforce`].
pub const EB_MAX_CELLS: usize = 9;

const EB_GRID_CAP: f64 = 5e6;

/// An n-type given by its symbol counts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NType {
    counts: Vec<usize>,
}

impl NType {
    pub fn new(counts: Vec<usize>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        if counts.iter().sum::<usize>() == 0 {
            return Err(Error::InvalidParameter("n-type needs n >= 1".into()));
        }
        Ok(Self { counts })
    }

    pub fn n(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn alphabet_size(&self) -> usize {
        self.counts.len()
    }

    pub fn distribution(&self) -> Distribution {
        let n = self.n() as f64;
        Distribution::normalized(self.counts.iter().map(|&c| c as f64 / n).collect())
            .expect("counts are non-negative with positive sum")
    }

    /// The sorted sequence `0..0 1..1 ...` of this type.
    pub fn representative(&self) -> Vec<usize> {
        self.counts
            .iter()
            .enumerate()
            .flat_map(|(s, &c)| std::iter::repeat_n(s, c))
            .collect()
    }

    /// Type of a sequence over an alphabet of the given size.
    pub fn of_sequence(seq: &[usize], alphabet_size: usize) -> Result<Self> {
        let mut counts = vec![0; alphabet_size];
        for &s in seq {
            if s >= alphabet_size {
                return Err(Error::SymbolOutOfRange {
                    symbol: s,
                    alphabet_size,
                });
            }
            counts[s] += 1;
        }
        Self::new(counts)
    }
}

/// All n-types over `alphabet_size` symbols; earlier symbols get the larger
/// counts first.
pub fn enumerate_n_types(n: usize, alphabet_size: usize, cap: usize) -> Result<Vec<NType>> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "blocklength must be positive".into(),
        ));
    }
    Ok(compositions(n, alphabet_size, cap)?
        .into_iter()
        .map(|counts| NType { counts })
        .collect())
}

/// `ln P^n(T_t)`, the log-probability of the whole type class.
pub fn type_class_log_prob(p: &Distribution, t: &NType) -> Result<f64> {
    if p.len() != t.alphabet_size() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            actual: t.alphabet_size(),
        });
    }
    let lf = LnFactorial::new(t.n());
    Ok(lf.ln_multinomial(t.counts()) + weighted_log(p, t.counts()))
}

fn weighted_log(p: &Distribution, counts: &[usize]) -> f64 {
    counts
        .iter()
        .zip(p.probs())
        .filter(|(&c, _)| c > 0)
        .map(|(&c, &q)| c as f64 * q.ln())
        .sum()
}

/// Conditional type of an input sequence given an output sequence, stored
/// as joint counts `rows[z][x]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConditionalType {
    rows: Vec<Vec<usize>>,
}

impl ConditionalType {
    pub fn new(rows: Vec<Vec<usize>>) -> Self {
        Self { rows }
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    /// The conditional type as a channel Z -> X. Rows for output symbols
    /// absent from the type carry no weight and are set uniform.
    pub fn as_channel(&self) -> Channel {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let total: usize = r.iter().sum();
                if total == 0 {
                    Distribution::uniform(r.len())
                } else {
                    Distribution::normalized(r.iter().map(|&c| c as f64).collect())
                        .expect("non-empty count row")
                }
            })
            .collect();
        Channel::from_rows(rows).expect("rows share the input alphabet")
    }
}

/// Every conditional type of an input sequence over `input_size` symbols
/// given an output sequence of type `z_type`.
pub fn conditional_types(
    z_type: &NType,
    input_size: usize,
    cap: usize,
) -> Result<Vec<ConditionalType>> {
    let total: f64 = z_type
        .counts()
        .iter()
        .map(|&c| composition_count(c, input_size))
        .product();
    if total > cap as f64 {
        return Err(Error::CapExceeded {
            what: "conditional type enumeration",
            required: total,
            cap: cap as f64,
        });
    }
    let per_row = z_type
        .counts()
        .iter()
        .map(|&c| compositions(c, input_size, cap))
        .collect::<Result<Vec<_>>>()?;
    let mut out = vec![ConditionalType { rows: Vec::new() }];
    for choices in per_row {
        out = out
            .into_iter()
            .flat_map(|partial| {
                choices.iter().map(move |row| {
                    let mut rows = partial.rows.clone();
                    rows.push(row.clone());
                    ConditionalType { rows }
                })
            })
            .collect();
    }
    Ok(out)
}

/// `ln P_X^n(T_Q(z))` for a sequence `z` of type `z_type`: the probability
/// that an i.i.d. input sequence has conditional type `q` given `z`.
pub fn shell_log_prob(input: &Distribution, z_type: &NType, q: &ConditionalType) -> Result<f64> {
    if q.rows.len() != z_type.alphabet_size() {
        return Err(Error::DimensionMismatch {
            expected: z_type.alphabet_size(),
            actual: q.rows.len(),
        });
    }
    let mut total = 0.0;
    let lf = LnFactorial::new(z_type.n());
    for (row, &nz) in q.rows.iter().zip(z_type.counts()) {
        if row.len() != input.len() {
            return Err(Error::DimensionMismatch {
                expected: input.len(),
                actual: row.len(),
            });
        }
        if row.iter().sum::<usize>() != nz {
            return Err(Error::InvalidParameter(format!(
                "conditional type row sums to {} but the output type has {nz} such symbols",
                row.iter().sum::<usize>()
            )));
        }
        total += lf.ln_multinomial(row) + weighted_log(input, row);
    }
    Ok(total)
}

/// One A-level: the union of shells sharing the value `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    pub a: f64,
    /// `ln p_a`, the log-probability that an i.i.d. codeword falls in the level.
    pub log_prob: f64,
    pub members: Vec<ConditionalType>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ALevelSet {
    pub z_type: NType,
    /// Finite levels in increasing order of `a`.
    pub levels: Vec<Level>,
    /// Shells at level `-inf`; their codewords have zero likelihood.
    pub neg_inf: Option<Level>,
}

impl ALevelSet {
    /// Σ p_a over all levels including `-inf`; one up to rounding.
    pub fn total_prob(&self) -> f64 {
        self.levels
            .iter()
            .chain(self.neg_inf.iter())
            .map(|l| l.log_prob.exp())
            .sum()
    }
}

/// Groups the conditional types of a `z_type` sequence by their level
/// `A(P̂; Q̂)` and sums shell probabilities within each group.
pub fn a_level_set(joint: &JointXZ, z_type: &NType, cap: usize) -> Result<ALevelSet> {
    if z_type.alphabet_size() != joint.output_size() {
        return Err(Error::DimensionMismatch {
            expected: joint.output_size(),
            actual: z_type.alphabet_size(),
        });
    }
    let p_hat = z_type.distribution();
    let mut finite = Vec::new();
    let mut neg_inf: Option<Level> = None;
    for q in conditional_types(z_type, joint.input_size(), cap)? {
        let a = a_value(joint, &p_hat, &q.as_channel())?;
        let lp = shell_log_prob(joint.input(), z_type, &q)?;
        if a == f64::NEG_INFINITY {
            let level = neg_inf.get_or_insert(Level {
                a,
                log_prob: f64::NEG_INFINITY,
                members: Vec::new(),
            });
            level.log_prob = log_sum_exp([level.log_prob, lp]);
            level.members.push(q);
        } else {
            finite.push((a, lp, q));
        }
    }
    finite.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut levels: Vec<Level> = Vec::new();
    for (a, lp, q) in finite {
        match levels.last_mut() {
            Some(last) if (a - last.a).abs() <= LEVEL_MERGE_TOLERANCE => {
                last.log_prob = log_sum_exp([last.log_prob, lp]);
                last.members.push(q);
            }
            _ => levels.push(Level {
                a,
                log_prob: lp,
                members: vec![q],
            }),
        }
    }
    Ok(ALevelSet {
        z_type: z_type.clone(),
        levels,
        neg_inf,
    })
}

/// Outcome of the grid search for E_b.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EbOracle {
    /// Smallest divergence found, including the analytic candidate.
    pub value: f64,
    /// Smallest divergence over grid points alone.
    pub grid_value: f64,
    /// Grid step in the coordinates of Q.
    pub slack: f64,
    /// Divergence of the tilted minimizer, when it sits on the level.
    pub candidate: Option<f64>,
    pub feasible_points: usize,
}

/// Per-row precomputation for the E_b grid: achievable `(Σ_x Q ι, D(Q‖P_X))`
/// pairs of one row.
struct RowGrid {
    weight: f64,
    points: Vec<(f64, f64)>,
}

/// Minimizes `D(Q‖P_X|P)` over channels `Q: Z -> X` with `A(P;Q) = a`.
///
/// All rows but one are enumerated on simplex grids of step
/// `1/grid_resolution` over the posterior's support. On the remaining
/// (pivot) row every coordinate except two is gridded and the last two are
/// solved from the linear level constraint, so every candidate lies exactly on
/// the level. The tilted minimizer from the closed form is added as one more
/// candidate.
pub fn eb_bruteforce(
    joint: &JointXZ,
    weights: &Distribution,
    level: f64,
    grid_resolution: usize,
) -> Result<EbOracle> {
    let (nx, nz) = (joint.input_size(), joint.output_size());
    if weights.len() != nz {
        return Err(Error::DimensionMismatch {
            expected: nz,
            actual: weights.len(),
        });
    }
    if nx * nz > EB_MAX_CELLS {
        return Err(Error::CapExceeded {
            what: "E_b brute force cells |X|·|Z|",
            required: (nx * nz) as f64,
            cap: EB_MAX_CELLS as f64,
        });
    }
    if grid_resolution < 1 {
        return Err(Error::InvalidParameter(
            "grid resolution must be positive".into(),
        ));
    }
    let res = grid_resolution;
    let step = 1.0 / res as f64;

    // Support and information density of each charged row.
    let rows: Vec<(usize, Vec<(usize, f64)>)> = (0..nz)
        .filter(|&z| weights.get(z) > 0.0)
        .map(|z| {
            let support = (0..nx)
                .filter(|&x| joint.posterior().prob(z, x) > 0.0)
                .map(|x| (x, joint.information_density(x, z)))
                .collect();
            (z, support)
        })
        .collect();

    // Pivot: the row and pair of symbols with the largest weighted spread
    // P(z)|ι_a − ι_b|. A grid step in another row then moves the pivot row's
    // solved coordinates the least.
    let mut pivot: Option<(usize, usize, usize, f64)> = None;
    for (ri, (z, support)) in rows.iter().enumerate() {
        for (i, &(_, ia)) in support.iter().enumerate() {
            for (j, &(_, ib)) in support.iter().enumerate().skip(i + 1) {
                let spread = weights.get(*z) * (ia - ib).abs();
                if spread > 1e-12 && pivot.is_none_or(|p| spread > p.3) {
                    pivot = Some((ri, i, j, spread));
                }
            }
        }
    }

    let ln_px = joint.input().ln_probs();
    let row_grid = |z: usize, support: &[(usize, f64)]| -> Result<RowGrid> {
        let mut points = Vec::new();
        for counts in compositions(res, support.len(), usize::MAX)? {
            let (mut lev, mut div) = (0.0, 0.0);
            for (&c, &(x, iota)) in counts.iter().zip(support) {
                if c > 0 {
                    let q = c as f64 * step;
                    lev += q * iota;
                    div += q * (q.ln() - ln_px[x]);
                }
            }
            points.push((lev, div));
        }
        Ok(RowGrid {
            weight: weights.get(z),
            points,
        })
    };

    let mut size = 1.0;
    for (ri, (_, support)) in rows.iter().enumerate() {
        let free = match pivot {
            Some((p, ..)) if p == ri => support.len() - 1,
            _ => support.len(),
        };
        size *= composition_count(res, free);
    }
    if size > EB_GRID_CAP {
        return Err(Error::CapExceeded {
            what: "E_b brute force grid",
            required: size,
            cap: EB_GRID_CAP,
        });
    }

    let free_rows = rows
        .iter()
        .enumerate()
        .filter(|(ri, _)| pivot.is_none_or(|p| p.0 != *ri))
        .map(|(_, (z, support))| row_grid(*z, support))
        .collect::<Result<Vec<_>>>()?;

    // Sum of (level, divergence) over the free rows, as a flat list.
    let mut partial = vec![(0.0, 0.0)];
    for row in &free_rows {
        let mut next = Vec::with_capacity(partial.len() * row.points.len());
        for &(l0, d0) in &partial {
            for &(l, d) in &row.points {
                next.push((l0 + row.weight * l, d0 + row.weight * d));
            }
        }
        partial = next;
    }

    let mut best = f64::INFINITY;
    let mut feasible = 0usize;
    match pivot {
        None => {
            for &(l, d) in &partial {
                if (l - level).abs() <= 1e-9 {
                    feasible += 1;
                    best = best.min(d);
                }
            }
        }
        Some((ri, ia, ib, _)) => {
            let (z, support) = &rows[ri];
            let w = weights.get(*z);
            let others: Vec<(usize, f64)> = support
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != ia && *k != ib)
                .map(|(_, &s)| s)
                .collect();
            let (xa, iota_a) = support[ia];
            let (xb, iota_b) = support[ib];
            let entropy_term = |q: f64, x: usize| {
                if q > 0.0 {
                    q * (q.ln() - ln_px[x])
                } else {
                    0.0
                }
            };
            // Grid over the other coordinates plus the mass left for the pair.
            let mut pivot_points: Vec<(f64, f64, f64)> = Vec::new();
            for_each_composition(res, others.len() + 1, |counts| {
                let (mut lev, mut div) = (0.0, 0.0);
                for (&c, &(x, iota)) in counts.iter().zip(&others) {
                    let q = c as f64 * step;
                    lev += q * iota;
                    div += entropy_term(q, x);
                }
                let mass = counts[others.len()] as f64 * step;
                pivot_points.push((lev, div, mass));
            });
            for &(l0, d0) in &partial {
                let row_target = (level - l0) / w;
                for &(lev, div, mass) in &pivot_points {
                    let t = row_target - lev;
                    let qa = (t - mass * iota_b) / (iota_a - iota_b);
                    if qa < -1e-12 || qa > mass + 1e-12 {
                        continue;
                    }
                    let qa = qa.clamp(0.0, mass);
                    let qb = mass - qa;
                    let d = d0 + w * (div + entropy_term(qa, xa) + entropy_term(qb, xb));
                    feasible += 1;
                    best = best.min(d);
                }
            }
        }
    }

    let candidate = eb_closed_form(joint, weights, level, DualOptions::default())
        .ok()
        .filter(|e| e.is_finite())
        .and_then(|e| tilted_posterior(joint, e.arg_lambda).ok())
        .and_then(|q| {
            let on_level = a_value(joint, weights, &q).ok()?;
            ((on_level - level).abs() <= 1e-9)
                .then(|| conditional_kl(&q, &joint.replicated_input(), weights).ok())
                .flatten()
        });

    if feasible == 0 && candidate.is_none() {
        return Err(Error::InfeasibleLevel { level });
    }
    Ok(EbOracle {
        value: candidate.map_or(best, |c| c.min(best)),
        grid_value: best,
        slack: step,
        candidate,
        feasible_points: feasible,
    })
}

/// Exact `E[U_n ln U_n]` at an output sequence of type `z_type` when `m_prime`
/// codewords are drawn i.i.d. from `P_X^n`.
///
/// With `N_a` the number of codewords in level `a`, `U_n = (1/M') Σ_a N_a
/// e^{na}` and `(N_a)` is multinomial over the levels (including `-inf`).
/// The expectation is an exact sum over all outcomes of that multinomial.
pub fn exact_un_log_moment(
    joint: &JointXZ,
    z_type: &NType,
    m_prime: usize,
    cap: usize,
) -> Result<f64> {
    if m_prime == 0 {
        return Err(Error::InvalidParameter("M' must be positive".into()));
    }
    let set = a_level_set(joint, z_type, cap)?;
    let n = z_type.n() as f64;
    // (ln p, e^{na}) per category; -inf level contributes nothing to U.
    let categories: Vec<(f64, f64)> = set
        .levels
        .iter()
        .map(|l| (l.log_prob, (n * l.a).exp()))
        .chain(set.neg_inf.iter().map(|l| (l.log_prob, 0.0)))
        .filter(|c| c.0 > f64::NEG_INFINITY)
        .collect();
    let outcomes = composition_count(m_prime, categories.len());
    if outcomes > cap as f64 {
        return Err(Error::CapExceeded {
            what: "multinomial outcome enumeration",
            required: outcomes,
            cap: cap as f64,
        });
    }
    let lf = LnFactorial::new(m_prime);
    let inv_m = 1.0 / m_prime as f64;
    let mut total = 0.0;
    for_each_composition(m_prime, categories.len(), |counts| {
        let mut ln_prob = lf.get(m_prime);
        let mut u = 0.0;
        for (&c, &(lp, ratio)) in counts.iter().zip(&categories) {
            if c > 0 {
                ln_prob += c as f64 * lp - lf.get(c);
                u += c as f64 * ratio;
            }
        }
        u *= inv_m;
        if u > 0.0 {
            total += ln_prob.exp() * u * u.ln();
        }
    });
    Ok(total)
}

/// `Σ_{P̂} P_Z^n(T_P̂) · E[U_n ln U_n | P̂]`, the ensemble-mean leakage
/// divergence assembled type class by type class.
pub fn type_decomposition(joint: &JointXZ, n: usize, m_prime: usize, cap: usize) -> Result<f64> {
    enumerate_n_types(n, joint.output_size(), cap)?
        .iter()
        .map(|t| {
            let weight = type_class_log_prob(joint.output(), t)?.exp();
            Ok(weight * exact_un_log_moment(joint, t, m_prime, cap)?)
        })
        .sum()
}
