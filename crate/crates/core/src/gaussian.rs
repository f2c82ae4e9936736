//! The Gaussian process `Z_n = Σ_{k≤n} B_k/k` built on a standard Brownian
//! motion sampled at integer times, its covariance, two exact samplers, its
//! persistence probabilities, and the constants of the decay exponent.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{par_count_hits, RandomStream};
use crate::stats::{wilson_interval, CompensatedSum, Z95};

/// Largest `N` for which the dense covariance is factored.
pub const CHOLESKY_CAP: usize = 2000;

/// `H_k = Σ_{j≤k} 1/j`, with `H_0 = 0`.
pub fn harmonic(k: u64) -> f64 {
    let mut acc = CompensatedSum::default();
    for j in 1..=k {
        acc.add(1.0 / j as f64);
    }
    acc.value()
}

/// `[H_0, H_1, …, H_n]`.
pub fn harmonic_table(n: usize) -> Vec<f64> {
    let mut acc = CompensatedSum::default();
    let mut out = Vec::with_capacity(n + 1);
    out.push(0.0);
    for j in 1..=n {
        acc.add(1.0 / j as f64);
        out.push(acc.value());
    }
    out
}

fn cov_closed_form(h: &[f64], m: usize, n: usize) -> f64 {
    let (m, n) = if m <= n { (m, n) } else { (n, m) };
    let mf = m as f64;
    2.0 * mf - (mf + 1.0) * h[m] + mf * h[n]
}

/// `Cov(Z_m, Z_n) = 2m − (m+1) H_m + m H_n` for `m ≤ n`, symmetric otherwise.
pub fn gp_cov(m: u64, n: u64) -> Result<f64> {
    if m < 1 || n < 1 {
        return Err(Error::invalid("m, n", "covariance indices start at 1"));
    }
    let h = harmonic_table(m.max(n) as usize);
    Ok(cov_closed_form(&h, m as usize, n as usize))
}

/// Dense `N × N` covariance of `(Z_1, …, Z_N)`.
#[derive(Clone, Debug)]
pub struct CovMatrix(DMatrix<f64>);

impl CovMatrix {
    pub fn new(n: usize) -> Self {
        let h = harmonic_table(n);
        CovMatrix(DMatrix::from_fn(n, n, |i, j| cov_closed_form(&h, i + 1, j + 1)))
    }

    pub fn size(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }
}

/// One realization of `B_1..B_N` and `Z_1..Z_N`.
#[derive(Clone, Debug, PartialEq)]
pub struct GpPath {
    pub b: Vec<f64>,
    pub z: Vec<f64>,
}

impl GpPath {
    /// Builds the path from the Brownian increments `B_k − B_{k−1}`.
    pub fn from_increments(increments: &[f64]) -> Self {
        let mut b = Vec::with_capacity(increments.len());
        let mut z = Vec::with_capacity(increments.len());
        let mut bk = 0.0;
        let mut zk = 0.0;
        for (k, &inc) in increments.iter().enumerate() {
            bk += inc;
            zk += bk / (k + 1) as f64;
            b.push(bk);
            z.push(zk);
        }
        GpPath { b, z }
    }

    pub fn max_z(&self) -> f64 {
        self.z.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn sample_gp_incremental(n: usize, rng: &mut RandomStream) -> Result<GpPath> {
    if n == 0 {
        return Err(Error::invalid("N", "path length must be at least 1"));
    }
    let inc: Vec<f64> = (0..n).map(|_| rng.standard_normal()).collect();
    Ok(GpPath::from_increments(&inc))
}

/// Lower Cholesky factor of [`CovMatrix`], reusable across draws.
#[derive(Clone, Debug)]
pub struct GpCholesky {
    lower: DMatrix<f64>,
}

impl GpCholesky {
    pub fn new(n: usize) -> Result<Self> {
        Self::with_jitter(n, 0.0)
    }

    /// Factors `Σ + jitter·I`.
    pub fn with_jitter(n: usize, jitter: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("N", "path length must be at least 1"));
        }
        if n > CHOLESKY_CAP {
            return Err(Error::AboveCap {
                what: "dense Cholesky",
                value: n as u64,
                cap: CHOLESKY_CAP as u64,
            });
        }
        let mut cov = CovMatrix::new(n).0;
        if jitter > 0.0 {
            for i in 0..n {
                cov[(i, i)] += jitter;
            }
        }
        let chol = cov
            .cholesky()
            .ok_or(Error::NotPositiveDefinite { size: n })?;
        Ok(GpCholesky { lower: chol.l() })
    }

    pub fn lower(&self) -> &DMatrix<f64> {
        &self.lower
    }

    /// `Z = L ξ` with `ξ` iid standard normal.
    pub fn sample(&self, rng: &mut RandomStream) -> Vec<f64> {
        let n = self.lower.nrows();
        let xi: Vec<f64> = (0..n).map(|_| rng.standard_normal()).collect();
        (0..n)
            .map(|i| (0..=i).map(|j| self.lower[(i, j)] * xi[j]).sum())
            .collect()
    }
}

pub fn sample_gp_cholesky(n: usize, rng: &mut RandomStream) -> Result<Vec<f64>> {
    Ok(GpCholesky::new(n)?.sample(rng))
}

/// Monte Carlo estimate of `P(max_{k≤N} Z_k ≤ N^α)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PersistenceEstimate {
    pub n_max: usize,
    pub alpha: f64,
    pub trials: u64,
    pub hits: u64,
    pub seed: u64,
}

impl PersistenceEstimate {
    pub const CSV_HEADER: &'static str = "event,N,alpha,trials,hits,estimate,ci_lo,ci_hi,seed";

    pub fn estimate(&self) -> f64 {
        self.hits as f64 / self.trials as f64
    }

    pub fn ci(&self) -> (f64, f64) {
        wilson_interval(self.hits, self.trials, Z95)
    }

    pub fn csv_row(&self) -> String {
        let (lo, hi) = self.ci();
        format!(
            "persist,{},{},{},{},{},{},{},{}",
            self.n_max,
            self.alpha,
            self.trials,
            self.hits,
            self.estimate(),
            lo,
            hi,
            self.seed
        )
    }
}

pub fn persistence_prob(n: usize, alpha: f64, trials: u64, seed: u64) -> Result<PersistenceEstimate> {
    if n == 0 {
        return Err(Error::invalid("N", "must be at least 1"));
    }
    if !(0.0..0.5).contains(&alpha) {
        return Err(Error::invalid("alpha", format!("{alpha} not in [0, 1/2)")));
    }
    if trials == 0 {
        return Err(Error::invalid("trials", "must be at least 1"));
    }
    let level = (n as f64).powf(alpha);
    let hits = par_count_hits(trials, seed, |rng| {
        let mut b = 0.0;
        let mut z = 0.0;
        for k in 1..=n {
            b += rng.standard_normal();
            z += b / k as f64;
            if z > level {
                return false;
            }
        }
        true
    });
    Ok(PersistenceEstimate {
        n_max: n,
        alpha,
        trials,
        hits,
        seed,
    })
}

/// `g(ρ) = 1 + 2(ρ^{−1/2}/(1 − ρ^{−1/2}) + (log ρ/2)·ρ^{−1/2}/(1 − ρ^{−1/2})²)`,
/// the bound on a row sum of absolute correlations at geometric spacing `ρ`.
pub fn g_rho(rho: f64) -> Result<f64> {
    if !(rho > 1.0) {
        return Err(Error::invalid("rho", format!("{rho} must exceed 1")));
    }
    let x = rho.powf(-0.5);
    let one_minus = 1.0 - x;
    Ok(1.0 + 2.0 * (x / one_minus + 0.5 * rho.ln() * x / (one_minus * one_minus)))
}

/// Target value of `g` at the optimal spacing.
pub const G_TARGET: f64 = 1.25;
const RHO_BRACKET: (f64, f64) = (1.0 + 1e-9, 1e6);

/// Checks that `g` decreases along a log-spaced grid on `(1.01, 10^6)`.
pub fn g_is_decreasing_on_scan(points: usize) -> bool {
    let (lo, hi) = (1.01f64.ln(), 1e6f64.ln());
    let vals: Vec<f64> = (0..points)
        .map(|i| {
            let t = lo + (hi - lo) * i as f64 / (points - 1) as f64;
            g_rho(t.exp()).expect("grid stays above 1")
        })
        .collect();
    vals.windows(2).all(|w| w[1] < w[0])
}

/// Root of `g(ρ) = 5/4` by bisection.
pub fn solve_rho_star(tolerance: f64) -> Result<f64> {
    if !(tolerance > 0.0) {
        return Err(Error::invalid("tolerance", "must be positive"));
    }
    if !g_is_decreasing_on_scan(2001) {
        return Err(Error::Degenerate("g is not decreasing on the scan grid".into()));
    }
    let (mut lo, mut hi) = RHO_BRACKET;
    let f = |r: f64| g_rho(r).map(|g| g - G_TARGET);
    let (flo, fhi) = (f(lo)?, f(hi)?);
    if flo.signum() == fhi.signum() {
        return Err(Error::BracketFailure { lo, hi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    let residual = f(root)?.abs();
    if residual > tolerance {
        return Err(Error::Degenerate(format!(
            "bisection stalled with residual {residual} above tolerance {tolerance}"
        )));
    }
    Ok(root)
}

/// `β = 1/(10 log ρ)`.
pub fn beta_from_rho(rho: f64) -> Result<f64> {
    if !(rho > 1.0) {
        return Err(Error::invalid("rho", format!("{rho} must exceed 1")));
    }
    Ok(1.0 / (10.0 * rho.ln()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentSolution {
    /// `None` when `β` was supplied directly rather than derived from `ρ*`.
    pub rho_star: Option<f64>,
    pub beta: f64,
    pub delta: f64,
    pub gamma: f64,
    pub exponent: f64,
}

impl ExponentSolution {
    /// The three competing rates `(1/2 − 2γ, δ/2, β(γ − δ))`.
    pub fn terms(&self) -> [f64; 3] {
        objective_terms(self.beta, self.delta, self.gamma)
    }
}

fn objective_terms(beta: f64, delta: f64, gamma: f64) -> [f64; 3] {
    [0.5 - 2.0 * gamma, delta / 2.0, beta * (gamma - delta)]
}

fn objective(beta: f64, delta: f64, gamma: f64) -> f64 {
    let [a, b, c] = objective_terms(beta, delta, gamma);
    a.min(b).min(c)
}

fn golden_max(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if hi - lo < 1e-15 {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

/// Derivative-free maximization of `min{1/2 − 2γ, δ/2, β(γ − δ)}` over
/// `0 < δ < γ < 1/4`. Returns `(δ, γ, value)`.
pub fn search_exponents(beta: f64) -> (f64, f64, f64) {
    let best_gamma = |delta: f64| golden_max(delta, 0.25, |g| objective(beta, delta, g));
    let delta = golden_max(0.0, 0.25, |d| objective(beta, d, best_gamma(d)));
    let gamma = best_gamma(delta);
    (delta, gamma, objective(beta, delta, gamma))
}

/// Balances `1/2 − 2γ = δ/2 = β(γ − δ)`: `δ = β/(2 + 5β)`, `γ = 1/4 − δ/4`.
pub fn optimize_exponents(beta: f64) -> Result<ExponentSolution> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::invalid("beta", format!("{beta} must be positive")));
    }
    let delta = beta / (2.0 + 5.0 * beta);
    let gamma = 0.25 - delta / 4.0;
    let (d_search, g_search, _) = search_exponents(beta);
    if (d_search - delta).abs() > 1e-6 || (g_search - gamma).abs() > 1e-6 {
        return Err(Error::Degenerate(format!(
            "closed form (δ={delta}, γ={gamma}) disagrees with search (δ={d_search}, γ={g_search})"
        )));
    }
    Ok(ExponentSolution {
        rho_star: None,
        beta,
        delta,
        gamma,
        exponent: delta / 2.0,
    })
}

/// Full pipeline: `ρ*`, then `β`, then the balanced exponents.
pub fn solve_exponents(tolerance: f64) -> Result<ExponentSolution> {
    let rho = solve_rho_star(tolerance)?;
    let mut sol = optimize_exponents(beta_from_rho(rho)?)?;
    sol.rho_star = Some(rho);
    Ok(sol)
}

/// Least-squares line through `(log n, log p)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub points: usize,
}

pub fn decay_fit(values: &[(f64, f64)]) -> Result<DecayFit> {
    if values.len() < 3 {
        return Err(Error::Degenerate(format!("need at least 3 points, got {}", values.len())));
    }
    if let Some(&(n, p)) = values.iter().find(|&&(n, p)| !(n > 0.0) || !(p > 0.0 && p < 1.0)) {
        return Err(Error::Degenerate(format!("point ({n}, {p}) outside n > 0, 0 < p < 1")));
    }
    let xs: Vec<f64> = values.iter().map(|&(n, _)| n.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|&(_, p)| p.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("all n coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(DecayFit {
        slope,
        intercept,
        slope_stderr: (ssr / (k - 2.0) / sxx).sqrt(),
        points: values.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{ks_one_sample, standard_normal_cdf};

    #[test]
    fn harmonic_values() {
        assert_eq!(harmonic(0), 0.0);
        assert_eq!(harmonic(1), 1.0);
        assert_eq!(harmonic(2), 1.5);
        let h100 = harmonic(100);
        assert!((h100 - 5.187_377_517_639_621).abs() < 1e-13);
        let euler_gamma = 0.577_215_664_901_532_9;
        assert!((h100 - (100f64.ln() + euler_gamma + 1.0 / 200.0)).abs() < 1e-4);
        assert_eq!(harmonic_table(100)[100], h100);
    }

    #[test]
    fn covariance_spot_values() {
        assert_eq!(gp_cov(1, 1).unwrap(), 1.0);
        assert_eq!(gp_cov(1, 2).unwrap(), 1.5);
        assert_eq!(gp_cov(2, 1).unwrap(), 1.5);
        assert_eq!(gp_cov(2, 2).unwrap(), 2.5);
        assert!(gp_cov(0, 3).is_err());
    }

    #[test]
    fn zero_increments_give_zero_path() {
        let path = GpPath::from_increments(&[0.0; 10]);
        assert!(path.z.iter().all(|&z| z == 0.0));
    }

    #[test]
    fn increments_relation() {
        let path = sample_gp_incremental(50, &mut RandomStream::new(5, 0)).unwrap();
        for k in 1..50 {
            let d = path.z[k] - path.z[k - 1];
            assert!((d - path.b[k] / (k + 1) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn z1_is_standard_normal() {
        let xs: Vec<f64> = (0..100_000u64)
            .map(|t| sample_gp_incremental(1, &mut RandomStream::new(6, t)).unwrap().z[0])
            .collect();
        assert!(ks_one_sample(&xs, standard_normal_cdf).p_value > 0.001);
    }

    #[test]
    fn cholesky_small() {
        let chol = GpCholesky::new(5).unwrap();
        assert!((chol.lower()[(0, 0)] - 1.0).abs() < 1e-15);
        let z = sample_gp_cholesky(1, &mut RandomStream::new(1, 1)).unwrap();
        assert_eq!(z.len(), 1);
        assert!(matches!(GpCholesky::new(CHOLESKY_CAP + 1), Err(Error::AboveCap { .. })));
    }

    #[test]
    fn persistence_single_step() {
        let est = persistence_prob(1, 0.0, 100_000, 3).unwrap();
        let (lo, hi) = est.ci();
        let phi1 = standard_normal_cdf(1.0);
        assert!(lo <= phi1 && phi1 <= hi, "{lo} {hi}");
        assert!(persistence_prob(10, 0.5, 10, 1).is_err());
    }

    #[test]
    fn persistence_near_half_exponent() {
        // the level 100^0.49 ≈ 9.5 is still below sd(Z_100) ≈ 14, so the
        // probability rises well above the α = 0 value without reaching 1
        let high = persistence_prob(100, 0.49, 10_000, 4).unwrap();
        let low = persistence_prob(100, 0.0, 10_000, 4).unwrap();
        assert!(high.ci().0 > low.ci().1 + 0.2, "{} vs {}", high.estimate(), low.estimate());
    }

    #[test]
    fn g_limits() {
        assert!(g_rho(1.0 + 1e-9).unwrap() > 1e3);
        assert!((g_rho(1e30).unwrap() - 1.0).abs() < 1e-12);
        assert!(g_rho(1.0).is_err());
        assert!((g_rho(1528.691213).unwrap() - 1.25).abs() < 5e-9);
    }

    #[test]
    fn rho_star_and_beta() {
        assert!(g_is_decreasing_on_scan(2001));
        let rho = solve_rho_star(1e-12).unwrap();
        assert!(((rho - 1528.691213) / 1528.691213).abs() < 1e-6);
        assert!((g_rho(rho).unwrap() - 1.25).abs() <= 1e-12);
        assert!((beta_from_rho(rho).unwrap() - 0.01363853235).abs() < 1e-9);
        assert!((beta_from_rho(10f64.exp()).unwrap() - 0.01).abs() < 1e-15);
        assert!(beta_from_rho(100.0).unwrap() > beta_from_rho(101.0).unwrap());
        assert!(solve_rho_star(0.0).is_err());
    }

    #[test]
    fn exponents_closed_form() {
        let sol = optimize_exponents(2.0).unwrap();
        assert!((sol.delta - 1.0 / 6.0).abs() < 1e-15);
        assert!((sol.gamma - 5.0 / 24.0).abs() < 1e-15);
        for t in sol.terms() {
            assert!((t - 1.0 / 12.0).abs() < 1e-15);
        }
        let sol = optimize_exponents(0.01363853235).unwrap();
        assert!((sol.delta - 0.006594420627).abs() < 1e-11);
        assert!((sol.gamma - 0.2483513948).abs() < 1e-10);
        assert!((sol.exponent - 0.003297210314).abs() < 1e-11);
        assert!(optimize_exponents(0.0).is_err());
        assert!(optimize_exponents(-1.0).is_err());
    }

    #[test]
    fn decay_fit_cases() {
        let pts: Vec<(f64, f64)> = [10.0, 20.0, 40.0, 80.0].iter().map(|&n: &f64| (n, 0.3 / n.sqrt())).collect();
        let fit = decay_fit(&pts).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-12);
        let flat = decay_fit(&[(1.0, 0.2), (2.0, 0.2), (3.0, 0.2)]).unwrap();
        assert!(flat.slope.abs() < 1e-15);
        assert!(decay_fit(&[(1.0, 0.2), (2.0, 0.2)]).is_err());
        assert!(decay_fit(&[(1.0, 0.2), (2.0, 1.2), (3.0, 0.1)]).is_err());
        assert!(decay_fit(&[(2.0, 0.2), (2.0, 0.3), (2.0, 0.1)]).is_err());
    }
}
