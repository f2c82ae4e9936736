//! Exact counting, enumeration and unranking of partitions, and the exact
//! probabilities `p(n)` (graphical) and `r(n)` (dominance-comparable pairs)
//! obtained by exhaustion.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::partition::{is_graphical_eg, is_graphical_hh, Partition};

/// Default largest `n` for which `exact_p` enumerates every partition.
pub const ENUMERATION_CAP: u64 = 60;
/// Default largest `n` for which `exact_r` scans every ordered pair.
pub const PAIR_CAP: u64 = 30;

/// `c(m, k)`: the number of partitions of `m` with largest part at most `k`.
#[derive(Clone, Debug)]
pub struct PartitionTable {
    max_n: usize,
    counts: Vec<Vec<BigUint>>,
}

impl PartitionTable {
    pub fn build(max_n: usize) -> Self {
        let mut counts: Vec<Vec<BigUint>> = Vec::with_capacity(max_n + 1);
        for m in 0..=max_n {
            let mut row = Vec::with_capacity(max_n + 1);
            row.push(if m == 0 { BigUint::one() } else { BigUint::zero() });
            for k in 1..=max_n {
                let v = if k > m {
                    row[m].clone()
                } else {
                    &row[k - 1] + &counts[m - k][k]
                };
                row.push(v);
            }
            counts.push(row);
        }
        PartitionTable { max_n, counts }
    }

    pub fn max_n(&self) -> usize {
        self.max_n
    }

    /// `c(m, k)`; `k` beyond the table is clamped since `c(m, k) = c(m, m)` for `k ≥ m`.
    pub fn restricted(&self, m: usize, k: usize) -> Result<&BigUint> {
        self.check_n(m as u64)?;
        Ok(&self.counts[m][k.min(self.max_n)])
    }

    fn check_n(&self, n: u64) -> Result<()> {
        if n > self.max_n as u64 {
            return Err(Error::OutOfRange {
                what: "n",
                value: n.to_string(),
                limit: self.max_n.to_string(),
            });
        }
        Ok(())
    }

    /// `π(n)`.
    pub fn count(&self, n: u64) -> Result<&BigUint> {
        self.check_n(n)?;
        Ok(&self.counts[n as usize][n as usize])
    }

    /// The `idx`-th partition of `n` in the order produced by [`enumerate`].
    pub fn unrank(&self, n: u64, idx: &BigUint) -> Result<Partition> {
        let total = self.count(n)?;
        if idx >= total {
            return Err(Error::OutOfRange {
                what: "rank",
                value: idx.to_string(),
                limit: total.to_string(),
            });
        }
        let mut idx = idx.clone();
        let mut parts = Vec::new();
        let mut m = n as usize;
        let mut k = m;
        while m > 0 {
            // partitions whose next part is exactly j, tried in decreasing j
            let mut j = k.min(m);
            loop {
                let block = &self.counts[m - j][j];
                if &idx < block {
                    break;
                }
                idx -= block;
                j -= 1;
            }
            parts.push(j as u32);
            m -= j;
            k = j;
        }
        Partition::from_sorted(parts)
    }

    /// Inverse of [`PartitionTable::unrank`].
    pub fn rank(&self, lambda: &Partition) -> Result<BigUint> {
        let n = lambda.weight();
        self.check_n(n)?;
        let mut idx = BigUint::zero();
        let mut m = n as usize;
        let mut k = m;
        for &part in lambda.parts() {
            let part = part as usize;
            for j in (part + 1..=k.min(m)).rev() {
                idx += &self.counts[m - j][j];
            }
            m -= part;
            k = part;
        }
        Ok(idx)
    }
}

pub fn build_table(max_n: usize) -> PartitionTable {
    PartitionTable::build(max_n)
}

pub fn count_partitions(table: &PartitionTable, n: u64) -> Result<BigUint> {
    table.count(n).cloned()
}

/// `π(0..=max_n)` from Euler's pentagonal-number recurrence.
///
/// Shares no code with [`PartitionTable`] so the two can check each other.
pub fn pentagonal_counts(max_n: usize) -> Vec<BigUint> {
    let mut p: Vec<BigInt> = Vec::with_capacity(max_n + 1);
    p.push(BigInt::one());
    for i in 1..=max_n {
        let mut sum = BigInt::zero();
        for k in 1i64.. {
            let g1 = (k * (3 * k - 1) / 2) as usize;
            if g1 > i {
                break;
            }
            let g2 = (k * (3 * k + 1) / 2) as usize;
            let mut term = p[i - g1].clone();
            if g2 <= i {
                term += &p[i - g2];
            }
            if k % 2 == 1 {
                sum += term;
            } else {
                sum -= term;
            }
        }
        p.push(sum);
    }
    p.into_iter()
        .map(|v| v.to_biguint().expect("partition counts are nonnegative"))
        .collect()
}

/// Every partition of `n` in reverse-lexicographic order, `(n)` first and `(1^n)` last.
pub fn enumerate(n: u64) -> Enumerate {
    enumerate_bounded(n, n)
}

/// Partitions of `n` with largest part at most `max_part`, in reverse-lexicographic order.
pub fn enumerate_bounded(n: u64, max_part: u64) -> Enumerate {
    let mut first = Vec::new();
    let mut rest = n;
    let k = max_part.max(1);
    while rest > 0 {
        let p = rest.min(k);
        first.push(p as u32);
        rest -= p;
    }
    let done = n > 0 && max_part == 0;
    Enumerate {
        current: if done { None } else { Some(first) },
    }
}

#[derive(Clone, Debug)]
pub struct Enumerate {
    current: Option<Vec<u32>>,
}

impl Iterator for Enumerate {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        let cur = self.current.take()?;
        let out = Partition::from_sorted(cur.clone()).expect("generator keeps parts sorted");
        // Find the rightmost part above 1, decrement it and redistribute the
        // remainder greedily in chunks no larger than the decremented part.
        let mut parts = cur;
        let ones = parts.iter().rev().take_while(|&&p| p == 1).count();
        if ones < parts.len() {
            let i = parts.len() - ones - 1;
            let v = parts[i] - 1;
            let mut rest = ones as u32 + 1;
            parts.truncate(i);
            parts.push(v);
            while rest > 0 {
                let q = rest.min(v);
                parts.push(q);
                rest -= q;
            }
            self.current = Some(parts);
        }
        Some(out)
    }
}

/// Exact rational probability in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ExactProbability(BigRational);

impl ExactProbability {
    pub fn new(numerator: BigUint, denominator: BigUint) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::Degenerate("zero denominator".into()));
        }
        if numerator > denominator {
            return Err(Error::Degenerate(format!(
                "probability {numerator}/{denominator} exceeds 1"
            )));
        }
        Ok(ExactProbability(BigRational::new(
            numerator.into(),
            denominator.into(),
        )))
    }

    pub fn numerator(&self) -> BigUint {
        self.0.numer().to_biguint().expect("nonnegative")
    }

    pub fn denominator(&self) -> BigUint {
        self.0.denom().to_biguint().expect("positive")
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for ExactProbability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

/// Outcome of exhausting the partitions of `n` for graphicality.
#[derive(Clone, Debug)]
pub struct GraphicalCount {
    pub n: u64,
    pub total: BigUint,
    pub graphical: BigUint,
    /// Partitions where the Erdős–Gallai and Havel–Hakimi answers differ.
    pub oracle_mismatches: u64,
    pub p: ExactProbability,
}

impl GraphicalCount {
    /// CSV row `n,pi_n,graphical_count,p_exact`.
    pub fn csv_row(&self) -> String {
        format!("{},{},{},{}", self.n, self.total, self.graphical, self.p)
    }

    pub const CSV_HEADER: &'static str = "n,pi_n,graphical_count,p_exact";
}

fn check_cap(what: &'static str, n: u64, cap: u64) -> Result<()> {
    if n > cap {
        return Err(Error::AboveCap {
            what,
            value: n,
            cap,
        });
    }
    Ok(())
}

/// Work is split by largest part so blocks can run on separate workers.
fn blocks(n: u64) -> Vec<u64> {
    if n == 0 {
        vec![0]
    } else {
        (1..=n).collect()
    }
}

fn block_iter(n: u64, largest: u64) -> impl Iterator<Item = Partition> {
    let tail = if n == 0 { n } else { n - largest };
    let head = largest as u32;
    enumerate_bounded(tail, largest).map(move |rest| {
        if n == 0 {
            return rest;
        }
        let mut parts = Vec::with_capacity(rest.len() + 1);
        parts.push(head);
        parts.extend_from_slice(rest.parts());
        Partition::from_sorted(parts).expect("sorted by construction")
    })
}

pub fn exact_p(n: u64) -> Result<GraphicalCount> {
    exact_p_with_cap(n, ENUMERATION_CAP)
}

pub fn exact_p_with_cap(n: u64, cap: u64) -> Result<GraphicalCount> {
    check_cap("exact p(n) enumeration", n, cap)?;
    let (total, graphical, mismatches) = blocks(n)
        .into_par_iter()
        .map(|largest| {
            let mut t = 0u64;
            let mut g = 0u64;
            let mut bad = 0u64;
            for lambda in block_iter(n, largest) {
                t += 1;
                let eg = is_graphical_eg(&lambda);
                if eg != is_graphical_hh(&lambda) {
                    bad += 1;
                }
                g += eg as u64;
            }
            (t, g, bad)
        })
        .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    let total = BigUint::from(total);
    let graphical = BigUint::from(graphical);
    Ok(GraphicalCount {
        n,
        p: ExactProbability::new(graphical.clone(), total.clone())?,
        total,
        graphical,
        oracle_mismatches: mismatches,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Comparability {
    /// Ordered pairs with `λ ⪯ μ`, ties included.
    #[default]
    OneSided,
    /// Pairs comparable in either direction.
    TwoSided,
}

#[derive(Clone, Debug)]
pub struct ComparableCount {
    pub n: u64,
    pub mode: Comparability,
    pub total_pairs: BigUint,
    pub comparable_pairs: BigUint,
    pub r: ExactProbability,
}

impl ComparableCount {
    /// CSV row `n,comparable_pairs,r_exact`.
    pub fn csv_row(&self) -> String {
        format!("{},{},{}", self.n, self.comparable_pairs, self.r)
    }

    pub const CSV_HEADER: &'static str = "n,comparable_pairs,r_exact";
}

pub fn exact_r(n: u64) -> Result<ComparableCount> {
    exact_r_with(n, PAIR_CAP, Comparability::OneSided)
}

pub fn exact_r_with(n: u64, cap: u64, mode: Comparability) -> Result<ComparableCount> {
    check_cap("exact r(n) pair scan", n, cap)?;
    let len = n as usize;
    let prefix: Vec<Vec<u32>> = enumerate(n)
        .map(|lambda| {
            let mut acc = 0u32;
            (1..=len)
                .map(|i| {
                    acc += lambda.part(i);
                    acc
                })
                .collect()
        })
        .collect();
    let below = |a: &[u32], b: &[u32]| a.iter().zip(b).all(|(x, y)| x <= y);
    let hits: u64 = prefix
        .par_iter()
        .map(|a| {
            prefix
                .iter()
                .filter(|b| match mode {
                    Comparability::OneSided => below(a, b),
                    Comparability::TwoSided => below(a, b) || below(b, a),
                })
                .count() as u64
        })
        .sum();
    let count = prefix.len() as u64;
    let total_pairs = BigUint::from(count) * BigUint::from(count);
    let comparable_pairs = BigUint::from(hits);
    Ok(ComparableCount {
        n,
        mode,
        r: ExactProbability::new(comparable_pairs.clone(), total_pairs.clone())?,
        total_pairs,
        comparable_pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Partition {
        s.parse().unwrap()
    }

    #[test]
    fn table_examples() {
        let t0 = build_table(0);
        assert_eq!(t0.restricted(0, 0).unwrap(), &BigUint::from(1u32));
        let t5 = build_table(5);
        assert_eq!(t5.restricted(5, 5).unwrap(), &BigUint::from(7u32));
        let t4 = build_table(4);
        assert_eq!(t4.restricted(4, 2).unwrap(), &BigUint::from(3u32));
    }

    #[test]
    fn table_recurrence_invariants() {
        let t = build_table(40);
        for k in 0..=40 {
            assert!(t.restricted(0, k).unwrap().is_one());
        }
        for m in 1..=40 {
            assert!(t.restricted(m, 0).unwrap().is_zero());
            for k in 1..=m {
                let lhs = t.restricted(m, k).unwrap();
                let rhs = t.restricted(m, k - 1).unwrap() + t.restricted(m - k, k).unwrap();
                assert_eq!(lhs, &rhs);
            }
        }
    }

    #[test]
    fn count_examples() {
        let t = build_table(100);
        assert_eq!(count_partitions(&t, 0).unwrap(), BigUint::from(1u32));
        assert_eq!(count_partitions(&t, 5).unwrap(), BigUint::from(7u32));
        assert_eq!(count_partitions(&t, 100).unwrap(), BigUint::from(190569292u64));
        assert!(count_partitions(&t, 101).is_err());
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(enumerate(0).collect::<Vec<_>>(), vec![Partition::empty()]);
        let four: Vec<_> = enumerate(4).collect();
        assert_eq!(four, vec![p("4"), p("3,1"), p("2,2"), p("2,1,1"), p("1,1,1,1")]);
        assert_eq!(enumerate(5).count(), 7);
        assert_eq!(enumerate_bounded(4, 2).count(), 3);
        assert_eq!(enumerate_bounded(3, 0).count(), 0);
    }

    #[test]
    fn enumerate_length_matches_table() {
        let t = build_table(30);
        for n in 0..=30u64 {
            let len = enumerate(n).count();
            assert_eq!(BigUint::from(len), *t.count(n).unwrap(), "n={n}");
        }
    }

    #[test]
    fn unrank_examples() {
        let t = build_table(5);
        assert_eq!(t.unrank(4, &BigUint::from(0u32)).unwrap(), p("4"));
        assert_eq!(t.unrank(4, &BigUint::from(4u32)).unwrap(), p("1,1,1,1"));
        let fifth: Vec<_> = enumerate(5).collect();
        assert_eq!(t.unrank(5, &BigUint::from(3u32)).unwrap(), fifth[3]);
        assert!(t.unrank(4, &BigUint::from(5u32)).is_err());
    }

    #[test]
    fn rank_unrank_identity() {
        let t = build_table(20);
        for n in 0..=20u64 {
            for (i, lambda) in enumerate(n).enumerate() {
                let idx = BigUint::from(i);
                assert_eq!(t.unrank(n, &idx).unwrap(), lambda);
                assert_eq!(t.rank(&lambda).unwrap(), idx);
            }
        }
    }

    #[test]
    fn exact_p_examples() {
        assert_eq!(exact_p(1).unwrap().p.to_string(), "0/1");
        assert_eq!(exact_p(2).unwrap().p.to_string(), "1/2");
        let four = exact_p(4).unwrap();
        assert_eq!(four.p.to_string(), "2/5");
        assert_eq!(four.csv_row(), "4,5,2,2/5");
        assert_eq!(four.oracle_mismatches, 0);
        assert!(matches!(exact_p(61), Err(Error::AboveCap { .. })));
        assert_eq!(exact_p(0).unwrap().p.to_string(), "1/1");
    }

    #[test]
    fn exact_r_examples() {
        assert_eq!(exact_r(1).unwrap().r.to_string(), "1/1");
        assert_eq!(exact_r(2).unwrap().r.to_string(), "3/4");
        assert_eq!(exact_r(3).unwrap().r.to_string(), "2/3");
        assert!(exact_r(31).is_err());
        // (3,1,1,1) and (2,2,2) are the first incomparable pair, at n = 6
        let two = exact_r_with(6, PAIR_CAP, Comparability::TwoSided).unwrap();
        let one = exact_r(6).unwrap();
        assert_eq!(
            &two.comparable_pairs + BigUint::from(11u32),
            BigUint::from(2u32) * &one.comparable_pairs
        );
    }

    #[test]
    fn exact_probability_rejects_invalid() {
        assert!(ExactProbability::new(BigUint::from(3u32), BigUint::from(2u32)).is_err());
        assert!(ExactProbability::new(BigUint::from(0u32), BigUint::from(0u32)).is_err());
        let half = ExactProbability::new(BigUint::from(2u32), BigUint::from(4u32)).unwrap();
        assert_eq!(half.numerator(), BigUint::from(1u32));
        assert_eq!(half.denominator(), BigUint::from(2u32));
    }
}
