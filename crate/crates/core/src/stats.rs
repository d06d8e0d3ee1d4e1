//! Mann-Whitney U test and Vargha-Delaney Â12 effect size.

use std::fmt;

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

pub const SIGNIFICANCE_LEVEL: f64 = 0.05;

/// Largest combined sample size for which the exact null distribution is enumerated.
pub const EXACT_MAX_TOTAL: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alternative {
    /// `x` tends to be larger than `y`.
    Greater,
    /// `x` tends to be smaller than `y`.
    Less,
    TwoSided,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UMethod {
    /// Exact when tie-free and `|x| + |y| <= EXACT_MAX_TOTAL`, asymptotic otherwise.
    Auto,
    Exact,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UTest {
    /// `U` statistic of `x`: pairs with `x_i > y_j`, ties counted half.
    pub u: f64,
    pub p_value: f64,
    pub exact: bool,
}

fn check_sample(name: &str, s: &[f64]) -> Result<()> {
    if s.is_empty() {
        return Err(Error::InvalidData(format!("sample {name} is empty")));
    }
    if s.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidData(format!("sample {name} contains NaN")));
    }
    Ok(())
}

/// Midranks (1-based) of the pooled sample plus the tie sizes.
fn midranks(pooled: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&a, &b| pooled[a].total_cmp(&pooled[b]));
    let mut ranks = vec![0.0; pooled.len()];
    let mut ties = Vec::new();
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && pooled[order[end]] == pooled[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &k in &order[start..end] {
            ranks[k] = rank;
        }
        if end - start > 1 {
            ties.push(end - start);
        }
        start = end;
    }
    (ranks, ties)
}

/// Exact `(P(U <= u), P(U >= u))` by enumerating every placement of `n1` ranks among `n1 + n2`.
fn exact_tails(u: f64, n1: usize, n2: usize) -> (f64, f64) {
    let total = n1 + n2;
    let base = (n1 * (n1 + 1) / 2) as i64;
    let target = u.round() as i64;
    let (mut below, mut above, mut count) = (0u64, 0u64, 0u64);
    for mask in 0u32..(1u32 << total) {
        if mask.count_ones() as usize != n1 {
            continue;
        }
        let rank_sum: i64 = (0..total)
            .filter(|b| mask & (1 << b) != 0)
            .map(|b| b as i64 + 1)
            .sum();
        let ux = rank_sum - base;
        count += 1;
        if ux <= target {
            below += 1;
        }
        if ux >= target {
            above += 1;
        }
    }
    (below as f64 / count as f64, above as f64 / count as f64)
}

pub fn mann_whitney_u_with(
    x: &[f64],
    y: &[f64],
    alternative: Alternative,
    method: UMethod,
) -> Result<UTest> {
    check_sample("x", x)?;
    check_sample("y", y)?;
    let (n1, n2) = (x.len(), y.len());
    let pooled: Vec<f64> = x.iter().chain(y).copied().collect();
    let (ranks, ties) = midranks(&pooled);
    let rank_sum_x: f64 = ranks[..n1].iter().sum();
    let u = rank_sum_x - (n1 * (n1 + 1)) as f64 / 2.0;

    let exact = match method {
        UMethod::Auto => ties.is_empty() && n1 + n2 <= EXACT_MAX_TOTAL,
        UMethod::Exact => {
            if !ties.is_empty() {
                return Err(Error::Parameter("exact U test requires tie-free samples".into()));
            }
            if n1 + n2 > EXACT_MAX_TOTAL {
                return Err(Error::Parameter(format!(
                    "exact U test supports at most {EXACT_MAX_TOTAL} observations"
                )));
            }
            true
        }
        UMethod::Asymptotic => false,
    };

    let p_value = if exact {
        let (below, above) = exact_tails(u, n1, n2);
        match alternative {
            Alternative::Greater => above,
            Alternative::Less => below,
            Alternative::TwoSided => (2.0 * below.min(above)).min(1.0),
        }
    } else {
        let n = (n1 + n2) as f64;
        let mean = (n1 * n2) as f64 / 2.0;
        let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / (n * (n - 1.0));
        let variance = (n1 * n2) as f64 / 12.0 * ((n + 1.0) - tie_term);
        if variance <= 0.0 {
            1.0
        } else {
            let sd = variance.sqrt();
            let normal = Normal::new(0.0, 1.0).expect("standard normal");
            match alternative {
                Alternative::Greater => normal.sf((u - mean - 0.5) / sd),
                Alternative::Less => normal.cdf((u - mean + 0.5) / sd),
                Alternative::TwoSided => {
                    let z = ((u - mean).abs() - 0.5).max(0.0) / sd;
                    (2.0 * normal.sf(z)).min(1.0)
                }
            }
        }
    };
    Ok(UTest {
        u,
        p_value: p_value.clamp(0.0, 1.0),
        exact,
    })
}

/// p-value of the Mann-Whitney U test with the automatic exact/asymptotic choice.
pub fn mann_whitney_u(x: &[f64], y: &[f64], alternative: Alternative) -> Result<f64> {
    Ok(mann_whitney_u_with(x, y, alternative, UMethod::Auto)?.p_value)
}

/// Probability that a draw from `x` exceeds a draw from `y`, ties counted half.
pub fn vargha_delaney_a12(x: &[f64], y: &[f64]) -> Result<f64> {
    check_sample("x", x)?;
    check_sample("y", y)?;
    let mut wins = 0.0;
    for &a in x {
        for &b in y {
            if a > b {
                wins += 1.0;
            } else if a == b {
                wins += 0.5;
            }
        }
    }
    Ok(wins / (x.len() * y.len()) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Magnitude {
    Negligible,
    Small,
    Medium,
    Large,
}

impl Magnitude {
    pub fn label(self) -> &'static str {
        match self {
            Magnitude::Negligible => "negligible",
            Magnitude::Small => "small",
            Magnitude::Medium => "medium",
            Magnitude::Large => "large",
        }
    }
}

impl fmt::Display for Magnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Large on `[0, 0.29] ∪ [0.71, 1]`, medium on `(0.29, 0.34] ∪ [0.64, 0.71)`,
/// small on `(0.34, 0.44] ∪ [0.56, 0.64)`, negligible in between.
pub fn classify_magnitude(a12: f64) -> Result<Magnitude> {
    if !(0.0..=1.0).contains(&a12) {
        return Err(Error::InvalidData(format!("A12 = {a12} outside [0, 1]")));
    }
    Ok(if a12 <= 0.29 || a12 >= 0.71 {
        Magnitude::Large
    } else if a12 <= 0.34 || a12 >= 0.64 {
        Magnitude::Medium
    } else if a12 <= 0.44 || a12 >= 0.56 {
        Magnitude::Small
    } else {
        Magnitude::Negligible
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatReport {
    pub hypothesis: String,
    pub p_value: f64,
    pub a12: f64,
    pub magnitude: Magnitude,
    pub significant: bool,
}

impl StatReport {
    /// Tests `hypothesis` about `x` versus `y` and measures the effect size of `x` over `y`.
    pub fn compare(
        hypothesis: impl Into<String>,
        x: &[f64],
        y: &[f64],
        alternative: Alternative,
    ) -> Result<StatReport> {
        let p_value = mann_whitney_u(x, y, alternative)?;
        let a12 = vargha_delaney_a12(x, y)?;
        Ok(StatReport {
            hypothesis: hypothesis.into(),
            p_value,
            a12,
            magnitude: classify_magnitude(a12)?,
            significant: p_value < SIGNIFICANCE_LEVEL,
        })
    }

    /// `<hypothesis>,<p_value>,<a12>,<magnitude>`
    pub fn to_line(&self) -> String {
        format!(
            "{},{:.6},{:.6},{}",
            self.hypothesis, self.p_value, self.a12, self.magnitude
        )
    }
}
