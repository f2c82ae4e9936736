//! The exponential surrogate for the first rows and columns of a random
//! partition, and Monte Carlo estimators for the events that bound the
//! graphical and comparable probabilities.
//!
//! Indices follow the usual 1-based convention in names and docs; storage is
//! 0-based, so `walk.s()[j - 1]` is `S_j`.

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};
use crate::rng::{par_count_hits, RandomStream};
use crate::sampling::scaling_constant;
use crate::stats::{wilson_interval, CompensatedSum, Z95};

/// Two independent exponential walks `S_j = X_1 + … + X_j` and `S′_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkPath {
    x: Vec<f64>,
    xp: Vec<f64>,
    s: Vec<f64>,
    sp: Vec<f64>,
}

fn cumsum(xs: &[f64]) -> Vec<f64> {
    xs.iter()
        .scan(0.0, |acc, &x| {
            *acc += x;
            Some(*acc)
        })
        .collect()
}

impl WalkPath {
    pub fn from_increments(x: Vec<f64>, xp: Vec<f64>) -> Result<Self> {
        if x.is_empty() || x.len() != xp.len() {
            return Err(Error::invalid("walk", "increment sequences must be nonempty and of equal length"));
        }
        if x.iter().chain(&xp).any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::invalid("walk", "increments must be positive and finite"));
        }
        let s = cumsum(&x);
        let sp = cumsum(&xp);
        Ok(WalkPath { x, xp, s, sp })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn xp(&self) -> &[f64] {
        &self.xp
    }

    pub fn s(&self) -> &[f64] {
        &self.s
    }

    pub fn sp(&self) -> &[f64] {
        &self.sp
    }

    /// `R_j = S_j − j`.
    pub fn r(&self, j: usize) -> f64 {
        self.s[j - 1] - j as f64
    }

    /// `R′_j = S′_j − j`.
    pub fn rp(&self, j: usize) -> f64 {
        self.sp[j - 1] - j as f64
    }
}

pub fn gen_walk(m: usize, rng: &mut RandomStream) -> Result<WalkPath> {
    if m == 0 {
        return Err(Error::invalid("m", "walk length must be at least 1"));
    }
    let x: Vec<f64> = (0..m).map(|_| rng.exponential()).collect();
    let xp: Vec<f64> = (0..m).map(|_| rng.exponential()).collect();
    WalkPath::from_increments(x, xp)
}

/// `⌊n^γ⌋`, corrected for floating-point error at exact powers.
pub fn floor_pow(n: u64, gamma: f64) -> u64 {
    if n == 0 {
        return 0;
    }
    let approx = (n as f64).powf(gamma).floor();
    let mut k = approx as u64;
    let target = gamma * (n as f64).ln();
    let eps = 1e-12 * target.abs().max(1.0);
    // k ≤ n^γ ⟺ ln k ≤ γ ln n
    while k > 0 && (k as f64).ln() > target + eps {
        k -= 1;
    }
    while ((k + 1) as f64).ln() <= target + eps {
        k += 1;
    }
    k
}

/// `⌈log³ n⌉`, the cutoff between the Chernoff and law-of-large-numbers regimes.
pub fn log_cube_len(n: u64) -> usize {
    (n as f64).ln().powi(3).ceil() as usize
}

/// `⌈log^{3/2} n⌉`.
fn log_three_halves_ceil(n: u64) -> f64 {
    (n as f64).ln().powf(1.5).ceil()
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma < 0.25) {
        return Err(Error::invalid("gamma", format!("{gamma} not in (0, 1/4)")));
    }
    Ok(())
}

/// Rows and columns of the surrogate diagram:
/// `rows_i = ⌈(√n/c) log((√n/c)/S_i)⌉`, `cols_i` likewise from `S′`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurrogateRowsCols {
    pub n: u64,
    pub gamma: f64,
    pub rows: Vec<i64>,
    pub cols: Vec<i64>,
}

fn surrogate_length(scale: f64, sum: f64) -> i64 {
    (scale * (scale.ln() - sum.ln())).ceil() as i64
}

/// `√n/c` with `c = π/√6`.
pub fn surrogate_scale(n: u64) -> f64 {
    (n as f64).sqrt() / scaling_constant()
}

pub fn surrogate_rows_cols(n: u64, gamma: f64, walk: &WalkPath) -> Result<SurrogateRowsCols> {
    check_gamma(gamma)?;
    let len = floor_pow(n, gamma) as usize;
    if len == 0 {
        return Err(Error::invalid("n", format!("⌊n^γ⌋ = 0 for n = {n}")));
    }
    if walk.len() < len {
        return Err(Error::invalid(
            "walk",
            format!("walk length {} shorter than ⌊n^γ⌋ = {len}", walk.len()),
        ));
    }
    let scale = surrogate_scale(n);
    Ok(SurrogateRowsCols {
        n,
        gamma,
        rows: walk.s[..len].iter().map(|&s| surrogate_length(scale, s)).collect(),
        cols: walk.sp[..len].iter().map(|&s| surrogate_length(scale, s)).collect(),
    })
}

/// Surrogate largest part `⌈(√n/c) log((√n/c)/X_1)⌉` for a single exponential draw.
pub fn surrogate_largest_part(n: u64, rng: &mut RandomStream) -> i64 {
    surrogate_length(surrogate_scale(n), rng.exponential())
}

/// Erdős–Gallai inequalities on the surrogate diagram:
/// `Σ_{j≤i} rows_j ≥ Σ_{j≤i} cols_j + i` for every `i ≤ ⌊n^γ⌋`.
pub fn event_eg_surrogate(n: u64, gamma: f64, walk: &WalkPath) -> Result<bool> {
    let rc = surrogate_rows_cols(n, gamma, walk)?;
    let mut lhs = 0i64;
    let mut rhs = 0i64;
    for (i, (r, c)) in rc.rows.iter().zip(&rc.cols).enumerate() {
        lhs += r;
        rhs += c;
        if lhs < rhs + (i as i64 + 1) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Dominance inequalities on the surrogate diagram (the comparable-pair
/// analogue of [`event_eg_surrogate`], without the `+ i`).
pub fn event_dominance_surrogate(n: u64, gamma: f64, walk: &WalkPath) -> Result<bool> {
    let rc = surrogate_rows_cols(n, gamma, walk)?;
    let mut lhs = 0i64;
    let mut rhs = 0i64;
    for (r, c) in rc.rows.iter().zip(&rc.cols) {
        lhs += r;
        rhs += c;
        if lhs < rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `log(S′_j/S_j)` evaluated as a difference of logs.
fn log_ratio(walk: &WalkPath, j: usize) -> f64 {
    walk.sp[j - 1].ln() - walk.s[j - 1].ln()
}

/// `Σ_{j≤i} log(S′_j/S_j) ≥ threshold` for every `i ≤ ⌊n^γ⌋`.
pub fn event_log(n: u64, gamma: f64, walk: &WalkPath, threshold: f64) -> Result<bool> {
    check_gamma(gamma)?;
    let len = floor_pow(n, gamma) as usize;
    if walk.len() < len || len == 0 {
        return Err(Error::invalid("walk", format!("need a walk of length ⌊n^γ⌋ = {len}")));
    }
    let mut acc = CompensatedSum::default();
    for j in 1..=len {
        acc.add(log_ratio(walk, j));
        if !(acc.value() >= threshold) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `min_{1≤ℓ≤L} Σ_{j≤ℓ} (R′_j − R_j)/j`.
pub fn min_weighted_stat(walk: &WalkPath, len: usize) -> Result<f64> {
    if len == 0 || len > walk.len() {
        return Err(Error::OutOfRange {
            what: "L",
            value: len.to_string(),
            limit: walk.len().to_string(),
        });
    }
    let mut acc = CompensatedSum::default();
    let mut min = f64::INFINITY;
    for j in 1..=len {
        acc.add((walk.rp(j) - walk.r(j)) / j as f64);
        min = min.min(acc.value());
    }
    Ok(min)
}

/// Threshold `−multiplier · n^{δ/2} ⌈log^{3/2} n⌉` of the headline event.
pub fn headline_threshold(n: u64, delta: f64, multiplier: f64) -> f64 {
    -multiplier * (n as f64).powf(delta / 2.0) * log_three_halves_ceil(n)
}

/// Some `j ≤ ⌈log³ n⌉` has `S′_j/S_j ≥ 1 + n^{δ/2}/√j`.
pub fn event_e1(n: u64, delta: f64, walk: &WalkPath) -> Result<bool> {
    let k = log_cube_len(n);
    require_len(walk, k)?;
    let lift = (n as f64).powf(delta / 2.0);
    Ok((1..=k).any(|j| walk.sp[j - 1] / walk.s[j - 1] >= 1.0 + lift / (j as f64).sqrt()))
}

/// Some `ℓ ∈ (K, ⌊n^γ⌋]` has `Σ_{K<j≤ℓ} log(S′_j/S_j) > Σ_{K<j≤ℓ} (R′_j − R_j)/j + log³ n`,
/// with `K = ⌈log³ n⌉`. Empty (false) whenever `⌊n^γ⌋ ≤ K`.
pub fn event_e2(n: u64, gamma: f64, walk: &WalkPath) -> Result<bool> {
    check_gamma(gamma)?;
    let k = log_cube_len(n);
    let len = floor_pow(n, gamma) as usize;
    require_len(walk, len.max(k))?;
    let slack = (n as f64).ln().powi(3);
    let mut logs = CompensatedSum::default();
    let mut linear = CompensatedSum::default();
    for j in k + 1..=len {
        logs.add(log_ratio(walk, j));
        linear.add((walk.rp(j) - walk.r(j)) / j as f64);
        if logs.value() > linear.value() + slack {
            return Ok(true);
        }
    }
    Ok(false)
}

/// `min_{i≤⌈log³ n⌉} Σ_{j≤i} (R′_j − R_j)/j ≤ −n^{δ/2} ⌈log^{3/2} n⌉`.
pub fn event_e4(n: u64, delta: f64, walk: &WalkPath) -> Result<bool> {
    let k = log_cube_len(n);
    require_len(walk, k)?;
    Ok(min_weighted_stat(walk, k)? <= headline_threshold(n, delta, 1.0))
}

/// On the complement of E₁ the first `⌈log³ n⌉` log-ratios sum to at most
/// `2 n^{δ/2} ⌈log^{3/2} n⌉`. Returns `(sum, bound)`; only meaningful when
/// [`event_e1`] is false.
pub fn prefix_log_bound(n: u64, delta: f64, walk: &WalkPath) -> Result<(f64, f64)> {
    let k = log_cube_len(n);
    require_len(walk, k)?;
    let mut acc = CompensatedSum::default();
    for j in 1..=k {
        acc.add(log_ratio(walk, j));
    }
    Ok((acc.value(), -2.0 * headline_threshold(n, delta, 1.0)))
}

fn require_len(walk: &WalkPath, len: usize) -> Result<()> {
    if walk.len() < len {
        return Err(Error::invalid(
            "walk",
            format!("walk length {} shorter than required {len}", walk.len()),
        ));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum EventKind {
    /// Erdős–Gallai inequalities on the surrogate rows and columns.
    Eg,
    /// Dominance inequalities on the surrogate rows and columns.
    Dominance,
    /// All partial log-ratio sums at or above `threshold`.
    Log { threshold: f64 },
    /// The weighted min statistic at or above `−multiplier · n^{δ/2}⌈log^{3/2} n⌉`.
    Headline { multiplier: f64 },
    E1,
    E2,
    E4,
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::Eg => "eg",
            EventKind::Dominance => "dominance",
            EventKind::Log { .. } => "log",
            EventKind::Headline { .. } => "headline",
            EventKind::E1 => "e1",
            EventKind::E2 => "e2",
            EventKind::E4 => "e4",
        }
    }

    fn walk_len(&self, n: u64, gamma: f64) -> usize {
        let len = floor_pow(n, gamma) as usize;
        match self {
            EventKind::E1 | EventKind::E2 | EventKind::E4 => len.max(log_cube_len(n)),
            _ => len,
        }
    }

    /// Evaluates the event on one path.
    pub fn occurs(&self, n: u64, gamma: f64, delta: f64, walk: &WalkPath) -> Result<bool> {
        match *self {
            EventKind::Eg => event_eg_surrogate(n, gamma, walk),
            EventKind::Dominance => event_dominance_surrogate(n, gamma, walk),
            EventKind::Log { threshold } => event_log(n, gamma, walk, threshold),
            EventKind::Headline { multiplier } => {
                let len = floor_pow(n, gamma) as usize;
                Ok(min_weighted_stat(walk, len)? >= headline_threshold(n, delta, multiplier))
            }
            EventKind::E1 => event_e1(n, delta, walk),
            EventKind::E2 => event_e2(n, gamma, walk),
            EventKind::E4 => event_e4(n, delta, walk),
        }
    }
}

/// Binomial Monte Carlo estimate with a 95% Wilson interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventEstimate {
    pub event: String,
    pub n: u64,
    pub gamma: f64,
    pub delta: f64,
    pub trials: u64,
    pub hits: u64,
    pub seed: u64,
}

impl EventEstimate {
    pub const CSV_HEADER: &'static str = "event,n,gamma,delta,trials,hits,estimate,ci_lo,ci_hi,seed";

    pub fn estimate(&self) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        self.hits as f64 / self.trials as f64
    }

    pub fn ci(&self) -> (f64, f64) {
        wilson_interval(self.hits, self.trials, Z95)
    }

    pub fn ci_halfwidth(&self) -> f64 {
        let (lo, hi) = self.ci();
        (hi - lo) / 2.0
    }

    pub fn csv_row(&self) -> String {
        let (lo, hi) = self.ci();
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.event,
            self.n,
            self.gamma,
            self.delta,
            self.trials,
            self.hits,
            self.estimate(),
            lo,
            hi,
            self.seed
        )
    }
}

pub fn estimate_event(
    kind: EventKind,
    n: u64,
    gamma: f64,
    delta: f64,
    trials: u64,
    seed: u64,
) -> Result<EventEstimate> {
    check_gamma(gamma)?;
    if trials == 0 {
        return Err(Error::invalid("trials", "must be at least 1"));
    }
    if !(delta > 0.0) {
        return Err(Error::invalid("delta", "must be positive"));
    }
    let len = kind.walk_len(n, gamma);
    if len == 0 {
        return Err(Error::invalid("n", "⌊n^γ⌋ = 0"));
    }
    // surface parameter errors once, before spawning trials
    kind.occurs(n, gamma, delta, &gen_walk(len, &mut RandomStream::new(seed, u64::MAX))?)?;
    let hits = par_count_hits(trials, seed, |rng| {
        let walk = gen_walk(len, rng).expect("len >= 1");
        kind.occurs(n, gamma, delta, &walk).expect("validated above")
    });
    Ok(EventEstimate {
        event: kind.name().to_owned(),
        n,
        gamma,
        delta,
        trials,
        hits,
        seed,
    })
}

/// Empirical check of the union bound over the small-index regime:
/// `Σ_{j≤⌈log³ n⌉} P(S′_j/S_j ≥ 1 + n^{δ/2}/√j) ≤ 8 n^{−δ/2}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChernoffDiagnostic {
    pub n: u64,
    pub delta: f64,
    pub terms: usize,
    pub trials_per_term: u64,
    pub hits: Vec<u64>,
    /// Σ_j of empirical frequencies.
    pub frequency_sum: f64,
    /// Σ_j of the per-term 95% Wilson half-widths.
    pub aggregate_ci: f64,
    /// `8 n^{−δ/2}`.
    pub bound: f64,
    /// Σ_j of the exact probabilities, `S_j/(S_j+S′_j) ~ Beta(j, j)`.
    pub exact_sum: f64,
}

impl ChernoffDiagnostic {
    pub fn within_bound(&self) -> bool {
        self.frequency_sum <= self.bound + self.aggregate_ci
    }
}

/// Exact `P(S′_j/S_j ≥ b)` for independent Gamma(j, 1) sums.
pub fn ratio_tail_exact(j: usize, b: f64) -> f64 {
    let jf = j as f64;
    beta_reg(jf, jf, 1.0 / (1.0 + b))
}

/// Every trial draws one walk of length `⌈log³ n⌉` and contributes to all
/// `j` at once; each term therefore sees `trials` independent samples.
pub fn chernoff_diagnostic(n: u64, delta: f64, trials: u64, seed: u64) -> Result<ChernoffDiagnostic> {
    use rayon::prelude::*;
    if trials == 0 {
        return Err(Error::invalid("trials", "must be at least 1"));
    }
    if !(delta > 0.0) {
        return Err(Error::invalid("delta", "must be positive"));
    }
    let k = log_cube_len(n).max(1);
    let lift = (n as f64).powf(delta / 2.0);
    let thresholds: Vec<f64> = (1..=k).map(|j| 1.0 + lift / (j as f64).sqrt()).collect();
    let hits = (0..trials)
        .into_par_iter()
        .fold(
            || vec![0u64; k],
            |mut acc, t| {
                let walk = gen_walk(k, &mut RandomStream::new(seed, t)).expect("k >= 1");
                for (j, h) in acc.iter_mut().enumerate() {
                    *h += (walk.sp[j] / walk.s[j] >= thresholds[j]) as u64;
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; k],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let frequency_sum = hits.iter().map(|&h| h as f64 / trials as f64).sum();
    let aggregate_ci = hits
        .iter()
        .map(|&h| {
            let (lo, hi) = wilson_interval(h, trials, Z95);
            (hi - lo) / 2.0
        })
        .sum();
    let exact_sum = (1..=k).map(|j| ratio_tail_exact(j, thresholds[j - 1])).sum();
    Ok(ChernoffDiagnostic {
        n,
        delta,
        terms: k,
        trials_per_term: trials,
        hits,
        frequency_sum,
        aggregate_ci,
        bound: 8.0 * (n as f64).powf(-delta / 2.0),
        exact_sum,
    })
}

/// Frequency of `|R_j/j| ≥ log(n)/√j` against the bound `2 exp(−log²(n)/6)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RjConcentration {
    pub j: usize,
    pub n: f64,
    pub trials: u64,
    pub hits: u64,
    pub bound: f64,
}

impl RjConcentration {
    pub fn frequency(&self) -> f64 {
        self.hits as f64 / self.trials as f64
    }

    /// A bound of at least 1 says nothing.
    pub fn vacuous(&self) -> bool {
        self.bound >= 1.0
    }

    pub fn within_bound(&self) -> bool {
        let (lo, hi) = wilson_interval(self.hits, self.trials, Z95);
        self.frequency() <= self.bound + (hi - lo) / 2.0
    }
}

/// `n` is real-valued here so regimes like `n = e^10` can be hit exactly.
pub fn check_rj_concentration(j: usize, n: f64, trials: u64, seed: u64) -> Result<RjConcentration> {
    let log_n = n.ln();
    if !(n > 1.0) {
        return Err(Error::invalid("n", "must exceed 1"));
    }
    if (j as f64) <= log_n * log_n {
        return Err(Error::invalid(
            "j",
            format!("j = {j} must exceed log²(n) = {}", log_n * log_n),
        ));
    }
    if trials == 0 {
        return Err(Error::invalid("trials", "must be at least 1"));
    }
    let cut = log_n / (j as f64).sqrt();
    let hits = par_count_hits(trials, seed, |rng| {
        let mut s = CompensatedSum::default();
        for _ in 0..j {
            s.add(rng.exponential());
        }
        ((s.value() - j as f64) / j as f64).abs() >= cut
    });
    Ok(RjConcentration {
        j,
        n,
        trials,
        hits,
        bound: 2.0 * (-log_n * log_n / 6.0).exp(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::mean_var;

    fn twin_walk(len: usize, seed: u64) -> WalkPath {
        let mut rng = RandomStream::new(seed, 0);
        let x: Vec<f64> = (0..len).map(|_| rng.exponential()).collect();
        WalkPath::from_increments(x.clone(), x).unwrap()
    }

    #[test]
    fn single_step_walk() {
        let w = WalkPath::from_increments(vec![0.7], vec![1.3]).unwrap();
        assert_eq!(w.s()[0], 0.7);
        assert!((w.r(1) - (0.7 - 1.0)).abs() < 1e-15);
        assert!((w.rp(1) - 0.3).abs() < 1e-15);
        assert!(WalkPath::from_increments(vec![], vec![]).is_err());
        assert!(WalkPath::from_increments(vec![-1.0], vec![1.0]).is_err());
    }

    #[test]
    fn walk_invariants() {
        let w = gen_walk(200, &mut RandomStream::new(3, 1)).unwrap();
        assert!(w.s().windows(2).all(|p| p[1] > p[0]));
        assert!(w.s()[0] > 0.0);
        for j in 1..=200 {
            assert_eq!(w.r(j), w.s()[j - 1] - j as f64);
        }
    }

    #[test]
    fn walk_moments() {
        let paths = 100_000;
        let mut r100 = Vec::with_capacity(paths);
        let mut r50 = Vec::with_capacity(paths);
        for t in 0..paths as u64 {
            let w = gen_walk(100, &mut RandomStream::new(17, t)).unwrap();
            r100.push(w.r(100) / 100.0);
            r50.push(w.r(50));
        }
        let (mean, _) = mean_var(&r100);
        assert!(mean.abs() < 0.0013, "mean {mean}");
        let (_, var) = mean_var(&r50);
        assert!((var - 50.0).abs() < 1.0, "var {var}");
    }

    #[test]
    fn floor_pow_exact_boundaries() {
        assert_eq!(floor_pow(10_000, 0.25), 10);
        assert_eq!(floor_pow(10_000, 0.24), 9);
        assert_eq!(floor_pow(1_000_000, 0.2483513948), 30);
        assert_eq!(floor_pow(16, 0.25), 2);
        assert_eq!(floor_pow(15, 0.25), 1);
        assert_eq!(floor_pow(1, 0.2), 1);
    }

    #[test]
    fn rows_cols_examples() {
        let n = 10_000;
        let scale = surrogate_scale(n);
        let w = WalkPath::from_increments(vec![scale], vec![1.0]).unwrap();
        let rc = surrogate_rows_cols(n, 0.01, &w).unwrap();
        assert_eq!(rc.rows, vec![0]);
        // ⌈77.9697 · ln 77.9697⌉ = ⌈339.66⌉
        assert_eq!(rc.cols, vec![340]);
        assert!(surrogate_rows_cols(n, 0.3, &w).is_err());
        assert!(surrogate_rows_cols(n, 0.24, &w).is_err());

        let w = gen_walk(9, &mut RandomStream::new(1, 0)).unwrap();
        let rc = surrogate_rows_cols(n, 0.24, &w).unwrap();
        assert_eq!(rc.rows.len(), 9);
        assert!(rc.rows.windows(2).all(|p| p[0] >= p[1]));
    }

    #[test]
    fn rows_are_unclamped() {
        let n = 10_000;
        let w = WalkPath::from_increments(vec![500.0], vec![1.0]).unwrap();
        assert!(surrogate_rows_cols(n, 0.01, &w).unwrap().rows[0] < 0);
    }

    #[test]
    fn identical_walks() {
        let n = 10_000;
        let w = twin_walk(800, 2);
        assert!(!event_eg_surrogate(n, 0.24, &w).unwrap());
        assert!(event_dominance_surrogate(n, 0.24, &w).unwrap());
        assert!(event_log(n, 0.24, &w, -1.0).unwrap());
        assert!(!event_log(n, 0.24, &w, f64::INFINITY).unwrap());
        assert_eq!(min_weighted_stat(&w, 9).unwrap(), 0.0);
    }

    #[test]
    fn eg_matches_direct_display() {
        let n = 10_000u64;
        let scale = (n as f64).sqrt() / (std::f64::consts::PI / 6f64.sqrt());
        for t in 0..200 {
            let w = gen_walk(9, &mut RandomStream::new(23, t)).unwrap();
            let mut ok = true;
            for i in 1..=9 {
                let lhs: f64 = (0..i).map(|j| (scale * (scale / w.s()[j]).ln()).ceil()).sum();
                let rhs: f64 = (0..i).map(|j| (scale * (scale / w.sp()[j]).ln()).ceil()).sum();
                ok &= lhs >= rhs + i as f64;
            }
            assert_eq!(event_eg_surrogate(n, 0.24, &w).unwrap(), ok, "trial {t}");
        }
    }

    #[test]
    fn weighted_stat_single_term() {
        let w = WalkPath::from_increments(vec![0.5, 2.0], vec![1.5, 0.1]).unwrap();
        assert!((min_weighted_stat(&w, 1).unwrap() - 1.0).abs() < 1e-15);
        assert!(min_weighted_stat(&w, 3).is_err());
        assert!(min_weighted_stat(&w, 0).is_err());
    }

    #[test]
    fn weighted_sum_is_centered() {
        // E[Σ_{j≤ℓ}(R′_j − R_j)/j] = 0 and swapping X, X′ flips the sign
        let paths = 100_000u64;
        let mut sums = Vec::new();
        for t in 0..paths {
            let w = gen_walk(10, &mut RandomStream::new(31, t)).unwrap();
            let swapped = WalkPath::from_increments(w.xp().to_vec(), w.x().to_vec()).unwrap();
            let s: f64 = (1..=10).map(|j| (w.rp(j) - w.r(j)) / j as f64).sum();
            let s2: f64 = (1..=10).map(|j| (swapped.rp(j) - swapped.r(j)) / j as f64).sum();
            assert!((s + s2).abs() < 1e-12);
            sums.push(s);
        }
        let (mean, var) = mean_var(&sums);
        let se = (var / paths as f64).sqrt();
        assert!(mean.abs() < 4.0 * se, "mean {mean} se {se}");
    }

    #[test]
    fn estimator_basics() {
        let est = estimate_event(EventKind::Log { threshold: f64::NEG_INFINITY }, 10_000, 0.24, 0.01, 1, 1).unwrap();
        assert_eq!(est.estimate(), 1.0);
        assert!(estimate_event(EventKind::Eg, 10_000, 0.3, 0.01, 10, 1).is_err());
        assert!(estimate_event(EventKind::Eg, 10_000, 0.2, 0.01, 0, 1).is_err());
        let a = estimate_event(EventKind::Eg, 10_000, 0.24, 0.01, 500, 9).unwrap();
        let b = estimate_event(EventKind::Eg, 10_000, 0.24, 0.01, 500, 9).unwrap();
        assert_eq!(a.csv_row(), b.csv_row());
    }

    #[test]
    fn rj_regime_and_vacuity() {
        assert!(check_rj_concentration(10, 1e6, 10, 1).is_err());
        let r = check_rj_concentration(5, 3.0, 1000, 1).unwrap();
        assert!(r.vacuous());
        let r = check_rj_concentration(101, 10f64.exp(), 100_000, 1).unwrap();
        assert!(!r.vacuous());
        assert!(r.within_bound());
    }

    #[test]
    fn exact_ratio_tail() {
        // S′_1/S_1 ≥ b has probability 1/(1 + b)
        assert!((ratio_tail_exact(1, 2.0) - 1.0 / 3.0).abs() < 1e-12);
        assert!((ratio_tail_exact(5, 1.0) - 0.5).abs() < 1e-12);
    }
}
