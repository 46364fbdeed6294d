//! Compositions and log-factorials.

use crate::error::{Error, Result};

/// C(n, k) as a float, for cap checks.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Number of ways to write `total` as an ordered sum of `parts` non-negative integers.
pub fn composition_count(total: usize, parts: usize) -> f64 {
    if parts == 0 {
        return if total == 0 { 1.0 } else { 0.0 };
    }
    binomial(total + parts - 1, parts - 1)
}

/// All compositions of `total` into `parts` non-negative parts, ordered so
/// that earlier coordinates are as large as possible first; for two parts
/// and total 2 this is `(2,0), (1,1), (0,2)`.
pub fn compositions(total: usize, parts: usize, cap: usize) -> Result<Vec<Vec<usize>>> {
    if parts == 0 {
        return Err(Error::EmptyAlphabet);
    }
    let count = composition_count(total, parts);
    if count > cap as f64 {
        return Err(Error::CapExceeded {
            what: "composition enumeration",
            required: count,
            cap: cap as f64,
        });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut current = vec![0; parts];
    fill(total, 0, &mut current, &mut out);
    Ok(out)
}

fn fill(remaining: usize, pos: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(current.clone());
        return;
    }
    for c in (0..=remaining).rev() {
        current[pos] = c;
        fill(remaining - c, pos + 1, current, out);
    }
}

/// Calls `visit` on every composition of `total` into `parts` parts, in the
/// same order as [`compositions`], without materializing the list.
pub fn for_each_composition<F: FnMut(&[usize])>(total: usize, parts: usize, mut visit: F) {
    if parts == 0 {
        return;
    }
    let mut current = vec![0; parts];
    walk(total, 0, &mut current, &mut visit);
}

fn walk<F: FnMut(&[usize])>(remaining: usize, pos: usize, current: &mut [usize], visit: &mut F) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        visit(current);
        return;
    }
    for c in (0..=remaining).rev() {
        current[pos] = c;
        walk(remaining - c, pos + 1, current, visit);
    }
}

/// Table of `ln k!` for `k = 0..=max`.
#[derive(Debug, Clone)]
pub struct LnFactorial {
    table: Vec<f64>,
}

impl LnFactorial {
    pub fn new(max: usize) -> Self {
        let mut table = Vec::with_capacity(max + 1);
        let mut acc = 0.0;
        table.push(0.0);
        for k in 1..=max {
            acc += (k as f64).ln();
            table.push(acc);
        }
        Self { table }
    }

    pub fn get(&self, k: usize) -> f64 {
        self.table[k]
    }

    /// ln of the multinomial coefficient `(Σ counts)! / Π counts!`.
    pub fn ln_multinomial(&self, counts: &[usize]) -> f64 {
        let n: usize = counts.iter().sum();
        self.get(n) - counts.iter().map(|&c| self.get(c)).sum::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_enumeration() {
        assert_eq!(compositions(1, 3, 100).unwrap().len(), 3);
        assert_eq!(
            compositions(2, 2, 100).unwrap(),
            vec![vec![2, 0], vec![1, 1], vec![0, 2]]
        );
        assert_eq!(compositions(4, 3, 100).unwrap().len(), 15);
        assert_eq!(composition_count(4, 3), 15.0);
        for c in compositions(5, 4, 1000).unwrap() {
            assert_eq!(c.iter().sum::<usize>(), 5);
        }
    }

    #[test]
    fn visitor_matches_list() {
        let mut seen = Vec::new();
        for_each_composition(4, 3, |c| seen.push(c.to_vec()));
        assert_eq!(seen, compositions(4, 3, 100).unwrap());
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            compositions(10, 5, 100),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn multinomial_coefficients() {
        let lf = LnFactorial::new(10);
        assert!((lf.ln_multinomial(&[2, 2]) - 6f64.ln()).abs() < 1e-14);
        assert!((lf.ln_multinomial(&[1, 2, 3]) - 60f64.ln()).abs() < 1e-13);
        assert_eq!(lf.ln_multinomial(&[0, 0]), 0.0);
    }
}
