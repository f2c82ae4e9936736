//! Uniform random partitions.
//!
//! Two exact samplers are provided: unranking a uniform index through a
//! [`PartitionTable`], and Fristedt's conditioned Boltzmann sampler, which
//! draws independent geometric multiplicities and keeps the draw only when
//! the total weight is exactly `n`. The Boltzmann sampler also comes in a
//! divide-and-conquer flavour where the multiplicity of part 1 is fixed by
//! the deficit and accepted with probability `q^deficit`; the accepted law is
//! the same but far fewer draws are wasted for large `n`.

use std::f64::consts::PI;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::PartitionTable;
use crate::partition::Partition;
use crate::rng::RandomStream;

pub const DEFAULT_MAX_REJECTIONS: u64 = 10_000_000;
/// Largest `n` for which the exact-unrank sampler builds its table.
pub const EXACT_TABLE_CAP: u64 = 500;

/// `π/√6`, the scaling constant of row and column lengths.
pub fn scaling_constant() -> f64 {
    PI / 6f64.sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleMethod {
    ExactUnrank,
    Fristedt,
    FristedtSplit,
}

impl FromStr for SampleMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" | "exact-unrank" => Ok(SampleMethod::ExactUnrank),
            "fristedt" => Ok(SampleMethod::Fristedt),
            "fristedt-split" => Ok(SampleMethod::FristedtSplit),
            other => Err(Error::invalid(
                "method",
                format!("unknown sampler {other:?}; expected exact|fristedt|fristedt-split"),
            )),
        }
    }
}

impl std::fmt::Display for SampleMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SampleMethod::ExactUnrank => "exact",
            SampleMethod::Fristedt => "fristedt",
            SampleMethod::FristedtSplit => "fristedt-split",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub n: u64,
    pub method: SampleMethod,
    pub max_rejections: u64,
}

impl SamplerConfig {
    pub fn new(n: u64, method: SampleMethod) -> Self {
        SamplerConfig {
            n,
            method,
            max_rejections: DEFAULT_MAX_REJECTIONS,
        }
    }
}

pub fn sample_exact_uniform(
    table: &PartitionTable,
    n: u64,
    rng: &mut RandomStream,
) -> Result<Partition> {
    let total = table.count(n)?;
    let idx = rng.biguint_below(total);
    table.unrank(n, &idx)
}

/// One accepted Boltzmann draw and the number of draws rejected before it.
#[derive(Clone, Debug, PartialEq)]
pub struct FristedtDraw {
    pub partition: Partition,
    pub rejections: u64,
}

/// Precomputed parameters of the Boltzmann sampler at a fixed `n`.
#[derive(Clone, Debug)]
pub struct FristedtSampler {
    n: u64,
    log_q: f64,
    /// q^k for k = 0..=n
    q_pow: Vec<f64>,
}

impl FristedtSampler {
    pub fn new(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", "Boltzmann sampler needs n >= 1"));
        }
        let log_q = -scaling_constant() / (n as f64).sqrt();
        let q_pow = (0..=n).map(|k| (log_q * k as f64).exp()).collect();
        Ok(FristedtSampler { n, log_q, q_pow })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn q(&self) -> f64 {
        self.log_q.exp()
    }

    /// Multiplicity of part `k`: `P(m = j) = (1 − q^k) q^{kj}`.
    fn multiplicity(&self, k: u64, rng: &mut RandomStream) -> u64 {
        let u = rng.open01();
        if u > self.q_pow[k as usize] {
            return 0;
        }
        (u.ln() / (self.log_q * k as f64)).floor() as u64
    }

    fn attempt_plain(&self, rng: &mut RandomStream, mult: &mut [u64]) -> bool {
        let mut total = 0u64;
        for k in 1..=self.n {
            let m = self.multiplicity(k, rng);
            mult[k as usize] = m;
            total += k * m;
            if total > self.n {
                return false;
            }
        }
        total == self.n
    }

    fn attempt_split(&self, rng: &mut RandomStream, mult: &mut [u64]) -> bool {
        let mut total = 0u64;
        for k in 2..=self.n {
            let m = self.multiplicity(k, rng);
            mult[k as usize] = m;
            total += k * m;
            if total > self.n {
                return false;
            }
        }
        let deficit = self.n - total;
        // P(m_1 = d) / max_j P(m_1 = j) = q^d
        if rng.open01() >= (self.log_q * deficit as f64).exp() {
            return false;
        }
        mult[1] = deficit;
        true
    }

    pub fn sample(
        &self,
        rng: &mut RandomStream,
        max_rejections: u64,
        split: bool,
    ) -> Result<FristedtDraw> {
        let mut mult = vec![0u64; self.n as usize + 1];
        let mut rejections = 0u64;
        loop {
            let ok = if split {
                self.attempt_split(rng, &mut mult)
            } else {
                self.attempt_plain(rng, &mut mult)
            };
            if ok {
                return Ok(FristedtDraw {
                    partition: Partition::from_multiplicities(&mult),
                    rejections,
                });
            }
            rejections += 1;
            if rejections >= max_rejections {
                return Err(Error::RejectionLimit { rejections });
            }
            mult.iter_mut().for_each(|m| *m = 0);
        }
    }
}

pub fn sample_fristedt(n: u64, rng: &mut RandomStream, max_rejections: u64) -> Result<Partition> {
    Ok(FristedtSampler::new(n)?
        .sample(rng, max_rejections, false)?
        .partition)
}

pub fn sample_fristedt_split(
    n: u64,
    rng: &mut RandomStream,
    max_rejections: u64,
) -> Result<Partition> {
    Ok(FristedtSampler::new(n)?
        .sample(rng, max_rejections, true)?
        .partition)
}

/// A validated sampler ready to draw repeatedly.
#[derive(Clone, Debug)]
pub enum Sampler {
    Exact { n: u64, table: PartitionTable },
    Boltzmann {
        sampler: FristedtSampler,
        max_rejections: u64,
        split: bool,
    },
}

impl Sampler {
    pub fn new(config: &SamplerConfig) -> Result<Self> {
        Self::with_table_cap(config, EXACT_TABLE_CAP)
    }

    pub fn with_table_cap(config: &SamplerConfig, cap: u64) -> Result<Self> {
        if config.max_rejections == 0 {
            return Err(Error::invalid("max_rejections", "must be positive"));
        }
        match config.method {
            SampleMethod::ExactUnrank => {
                if config.n > cap {
                    return Err(Error::AboveCap {
                        what: "exact-unrank table",
                        value: config.n,
                        cap,
                    });
                }
                Ok(Sampler::Exact {
                    n: config.n,
                    table: PartitionTable::build(config.n as usize),
                })
            }
            SampleMethod::Fristedt | SampleMethod::FristedtSplit => Ok(Sampler::Boltzmann {
                sampler: FristedtSampler::new(config.n)?,
                max_rejections: config.max_rejections,
                split: config.method == SampleMethod::FristedtSplit,
            }),
        }
    }

    pub fn sample(&self, rng: &mut RandomStream) -> Result<Partition> {
        match self {
            Sampler::Exact { n, table } => sample_exact_uniform(table, *n, rng),
            Sampler::Boltzmann {
                sampler,
                max_rejections,
                split,
            } => Ok(sampler.sample(rng, *max_rejections, *split)?.partition),
        }
    }
}

/// `trials` independent samples, sample `t` drawn from stream `(seed, t)`.
pub fn sample_many(config: &SamplerConfig, trials: u64, seed: u64) -> Result<Vec<Partition>> {
    let sampler = Sampler::new(config)?;
    crate::rng::par_map_trials(trials, seed, |rng| sampler.sample(rng))
        .into_iter()
        .collect()
}

/// Monte Carlo estimate of `p(n)` or `r(n)` from uniform samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityEstimate {
    pub statistic: String,
    pub n: u64,
    pub method: SampleMethod,
    pub trials: u64,
    pub hits: u64,
    pub seed: u64,
}

impl ProbabilityEstimate {
    pub const CSV_HEADER: &'static str = "statistic,n,method,trials,hits,estimate,ci_lo,ci_hi,seed";

    pub fn estimate(&self) -> f64 {
        self.hits as f64 / self.trials as f64
    }

    /// Wilson interval at normal quantile `z`.
    pub fn interval(&self, z: f64) -> (f64, f64) {
        crate::stats::wilson_interval(self.hits, self.trials, z)
    }

    pub fn csv_row(&self) -> String {
        let (lo, hi) = self.interval(crate::stats::Z95);
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.statistic,
            self.n,
            self.method,
            self.trials,
            self.hits,
            self.estimate(),
            lo,
            hi,
            self.seed
        )
    }
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::invalid("trials", "must be at least 1"));
    }
    Ok(())
}

/// Fraction of `trials` uniform partitions of `n` that are graphical.
pub fn estimate_p(config: &SamplerConfig, trials: u64, seed: u64) -> Result<ProbabilityEstimate> {
    check_trials(trials)?;
    let sampler = Sampler::new(config)?;
    sampler.sample(&mut RandomStream::new(seed, u64::MAX))?;
    let hits = crate::rng::par_count_hits(trials, seed, |rng| {
        let lambda = sampler.sample(rng).expect("sampler validated");
        crate::partition::is_graphical_eg(&lambda)
    });
    Ok(ProbabilityEstimate {
        statistic: "p".into(),
        n: config.n,
        method: config.method,
        trials,
        hits,
        seed,
    })
}

/// Fraction of `trials` independent uniform pairs `(λ, μ)` with `λ ⪯ μ`.
pub fn estimate_r(config: &SamplerConfig, trials: u64, seed: u64) -> Result<ProbabilityEstimate> {
    check_trials(trials)?;
    let sampler = Sampler::new(config)?;
    sampler.sample(&mut RandomStream::new(seed, u64::MAX))?;
    let hits = crate::rng::par_count_hits(trials, seed, |rng| {
        let lambda = sampler.sample(rng).expect("sampler validated");
        let mu = sampler.sample(rng).expect("sampler validated");
        crate::partition::dominated_unchecked(&lambda, &mu)
    });
    Ok(ProbabilityEstimate {
        statistic: "r".into(),
        n: config.n,
        method: config.method,
        trials,
        hits,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{build_table, enumerate};
    use crate::stats::chi_square_gof;
    use std::collections::HashMap;

    #[test]
    fn singleton_cases() {
        let t = build_table(4);
        let mut rng = RandomStream::new(1, 0);
        for _ in 0..10 {
            assert_eq!(sample_exact_uniform(&t, 1, &mut rng).unwrap(), Partition::new(vec![1]));
            assert_eq!(sample_fristedt(1, &mut rng, 1000).unwrap(), Partition::new(vec![1]));
            assert_eq!(sample_fristedt_split(1, &mut rng, 1000).unwrap(), Partition::new(vec![1]));
        }
        assert!(sample_exact_uniform(&t, 5, &mut rng).is_err());
    }

    #[test]
    fn exact_two_is_fair() {
        let t = build_table(2);
        let mut rng = RandomStream::new(11, 0);
        let draws = 100_000;
        let ones = (0..draws)
            .filter(|_| sample_exact_uniform(&t, 2, &mut rng).unwrap().len() == 2)
            .count();
        let freq = ones as f64 / draws as f64;
        assert!((freq - 0.5).abs() < 0.01, "{freq}");
    }

    #[test]
    fn fristedt_thirty_matches_uniform() {
        let all: Vec<Partition> = enumerate(30).collect();
        let index: HashMap<Partition, usize> =
            all.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let sampler = FristedtSampler::new(30).unwrap();
        let mut counts = vec![0u64; all.len()];
        for trial in 0..10_000u64 {
            let mut rng = RandomStream::new(5, trial);
            let draw = sampler.sample(&mut rng, DEFAULT_MAX_REJECTIONS, false).unwrap();
            counts[index[&draw.partition]] += 1;
        }
        let expected = vec![1.0 / all.len() as f64; all.len()];
        let p = chi_square_gof(&counts, &expected).p_value;
        assert!(p > 0.001, "p = {p}");
    }

    #[test]
    fn split_sampler_matches_uniform_at_twelve() {
        let all: Vec<Partition> = enumerate(12).collect();
        let index: HashMap<Partition, usize> =
            all.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let mut counts = vec![0u64; all.len()];
        let sampler = FristedtSampler::new(12).unwrap();
        for trial in 0..20_000u64 {
            let mut rng = RandomStream::new(9, trial);
            let draw = sampler.sample(&mut rng, DEFAULT_MAX_REJECTIONS, true).unwrap();
            counts[index[&draw.partition]] += 1;
        }
        let expected = vec![1.0 / all.len() as f64; all.len()];
        assert!(chi_square_gof(&counts, &expected).p_value > 0.001);
    }

    #[test]
    fn rejection_limit_reports_count() {
        let mut rng = RandomStream::new(2, 0);
        match sample_fristedt(10_000, &mut rng, 3) {
            Err(Error::RejectionLimit { rejections }) => assert_eq!(rejections, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn config_validation() {
        let cfg = SamplerConfig::new(600, SampleMethod::ExactUnrank);
        assert!(matches!(Sampler::new(&cfg), Err(Error::AboveCap { .. })));
        let cfg = SamplerConfig::new(0, SampleMethod::Fristedt);
        assert!(Sampler::new(&cfg).is_err());
        assert_eq!("exact".parse::<SampleMethod>().unwrap(), SampleMethod::ExactUnrank);
        assert!("nope".parse::<SampleMethod>().is_err());
    }

    #[test]
    fn deterministic_under_seed() {
        let cfg = SamplerConfig::new(50, SampleMethod::Fristedt);
        let s = Sampler::new(&cfg).unwrap();
        let a: Vec<_> = (0..20).map(|i| s.sample(&mut RandomStream::new(8, i)).unwrap()).collect();
        let b: Vec<_> = (0..20).map(|i| s.sample(&mut RandomStream::new(8, i)).unwrap()).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn estimates_track_exact_values() {
        let cfg = SamplerConfig::new(10, SampleMethod::ExactUnrank);
        let p = estimate_p(&cfg, 20_000, 1).unwrap();
        let exact = crate::exact::exact_p(10).unwrap().p.to_f64();
        let (lo, hi) = p.interval(4.0);
        assert!(lo <= exact && exact <= hi, "{lo} {exact} {hi}");
        let r = estimate_r(&cfg, 20_000, 2).unwrap();
        let exact = crate::exact::exact_r(10).unwrap().r.to_f64();
        let (lo, hi) = r.interval(4.0);
        assert!(lo <= exact && exact <= hi, "{lo} {exact} {hi}");
        assert_eq!(estimate_p(&cfg, 500, 3).unwrap(), estimate_p(&cfg, 500, 3).unwrap());
        assert!(estimate_p(&cfg, 0, 3).is_err());
    }

    #[test]
    fn acceptance_rate_shrinks_with_n() {
        // plain acceptance decays like n^{-3/4}; check the ordering only
        let rate = |n: u64| {
            let s = FristedtSampler::new(n).unwrap();
            let mut rng = RandomStream::new(4, n);
            let rej: u64 = (0..200)
                .map(|_| s.sample(&mut rng, DEFAULT_MAX_REJECTIONS, false).unwrap().rejections)
                .sum();
            200.0 / (200 + rej) as f64
        };
        assert!(rate(100) < rate(10));
    }
}
