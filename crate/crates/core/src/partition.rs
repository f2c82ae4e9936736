//! Integer partitions and exact predicates on them.
//!
//! A [`Partition`] is stored in canonical form: parts sorted non-increasingly,
//! all positive. The text form is the comma-separated part list (`4,2,1,1`),
//! with the empty string standing for the empty partition.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default weight cap for brute-force Kostka enumeration.
pub const KOSTKA_CAP: u64 = 20;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Partition {
    parts: Vec<u32>,
    weight: u64,
}

impl Partition {
    /// Builds a partition from parts in any order; zeros are dropped.
    pub fn new(mut parts: Vec<u32>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        let weight = parts.iter().map(|&p| p as u64).sum();
        Partition { parts, weight }
    }

    /// Builds a partition from parts already in non-increasing order.
    pub fn from_sorted(parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::invalid("parts", "parts must be positive"));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::invalid("parts", "parts must be non-increasing"));
        }
        let weight = parts.iter().map(|&p| p as u64).sum();
        Ok(Partition { parts, weight })
    }

    /// Builds a partition from a multiplicity vector: `mult[k]` copies of part `k`.
    pub fn from_multiplicities(mult: &[u64]) -> Self {
        let mut parts = Vec::new();
        for (k, &m) in mult.iter().enumerate().rev() {
            if k == 0 {
                continue;
            }
            parts.extend(std::iter::repeat_n(k as u32, m as usize));
        }
        let weight = parts.iter().map(|&p| p as u64).sum();
        Partition { parts, weight }
    }

    pub fn empty() -> Self {
        Partition {
            parts: Vec::new(),
            weight: 0,
        }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn weight(&self) -> u64 {
        self.weight
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Largest part, 0 for the empty partition.
    pub fn largest(&self) -> u32 {
        self.parts.first().copied().unwrap_or(0)
    }

    /// 1-indexed part access with zero padding.
    pub fn part(&self, i: usize) -> u32 {
        if i == 0 {
            return 0;
        }
        self.parts.get(i - 1).copied().unwrap_or(0)
    }

    pub fn conjugate(&self) -> Partition {
        let cols = self.largest() as usize;
        let mut conj = vec![0u32; cols];
        // parts are sorted, so row r contributes to columns 0..parts[r]
        for &p in &self.parts {
            for c in conj.iter_mut().take(p as usize) {
                *c += 1;
            }
        }
        Partition {
            parts: conj,
            weight: self.weight,
        }
    }

    /// Side of the Durfee square: the largest `k` with `λ_k ≥ k`.
    ///
    /// For a partition `λ_k ≥ k` already forces `λ′_k ≥ k`, so one scan suffices.
    pub fn durfee(&self) -> usize {
        self.parts
            .iter()
            .enumerate()
            .take_while(|&(i, &p)| p as usize > i)
            .count()
    }

    fn prefix_sums(&self, len: usize) -> impl Iterator<Item = u64> + '_ {
        (1..=len).scan(0u64, move |acc, i| {
            *acc += self.part(i) as u64;
            Some(*acc)
        })
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for p in &self.parts {
            if !first {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
            first = false;
        }
        Ok(())
    }
}

impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Partition::empty());
        }
        let parts = s
            .split(',')
            .map(|t| {
                t.trim().parse::<u32>().map_err(|e| Error::Parse {
                    input: s.to_owned(),
                    reason: e.to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Partition::from_sorted(parts).map_err(|e| Error::Parse {
            input: s.to_owned(),
            reason: e.to_string(),
        })
    }
}

pub fn conjugate(lambda: &Partition) -> Partition {
    lambda.conjugate()
}

pub fn durfee(lambda: &Partition) -> usize {
    lambda.durfee()
}

fn check_same_weight(alpha: &Partition, beta: &Partition) -> Result<()> {
    if alpha.weight != beta.weight {
        return Err(Error::WeightMismatch {
            left: alpha.weight,
            right: beta.weight,
        });
    }
    Ok(())
}

/// `true` iff `alpha ⪯ beta` in dominance order.
pub fn dominates(alpha: &Partition, beta: &Partition) -> Result<bool> {
    check_same_weight(alpha, beta)?;
    Ok(dominated_unchecked(alpha, beta))
}

/// Dominance test for partitions already known to share a weight.
pub(crate) fn dominated_unchecked(alpha: &Partition, beta: &Partition) -> bool {
    let len = alpha.len().max(beta.len());
    alpha
        .prefix_sums(len)
        .zip(beta.prefix_sums(len))
        .all(|(a, b)| a <= b)
}

/// Graphicality via the Durfee-square form of the Erdős–Gallai criterion,
/// guarded by the even-weight condition.
pub fn is_graphical_eg(lambda: &Partition) -> bool {
    if !lambda.weight.is_multiple_of(2) {
        return false;
    }
    let d = lambda.durfee();
    let conj = lambda.conjugate();
    let mut lhs = 0u64;
    let mut rhs = 0u64;
    for i in 1..=d {
        lhs += conj.part(i) as u64;
        rhs += lambda.part(i) as u64;
        if lhs < rhs + i as u64 {
            return false;
        }
    }
    true
}

/// Havel–Hakimi reduction, run as a decision procedure.
pub fn is_graphical_hh(lambda: &Partition) -> bool {
    let mut degrees: Vec<u32> = lambda.parts.clone();
    loop {
        // degrees is sorted non-increasingly and free of zeros here
        let Some(d) = degrees.first().copied() else {
            return true;
        };
        let d = d as usize;
        degrees.remove(0);
        if d > degrees.len() {
            return false;
        }
        for x in degrees.iter_mut().take(d) {
            // every entry is positive, so decrementing never underflows
            *x -= 1;
        }
        degrees.retain(|&x| x > 0);
        degrees.sort_unstable_by(|a, b| b.cmp(a));
    }
}

/// Gale–Ryser: a bipartite graph with side degree sequences `alpha`, `beta`
/// exists iff `alpha ⪯ beta′`.
pub fn gale_ryser(alpha: &Partition, beta: &Partition) -> Result<bool> {
    check_same_weight(alpha, beta)?;
    Ok(dominated_unchecked(alpha, &beta.conjugate()))
}

/// Number of semistandard Young tableaux of shape `lambda` and content `mu`,
/// by depth-first enumeration. Uses [`KOSTKA_CAP`].
pub fn kostka(lambda: &Partition, mu: &Partition) -> Result<BigUint> {
    kostka_with_cap(lambda, mu, KOSTKA_CAP)
}

pub fn kostka_with_cap(lambda: &Partition, mu: &Partition, cap: u64) -> Result<BigUint> {
    check_same_weight(lambda, mu)?;
    if lambda.weight > cap {
        return Err(Error::AboveCap {
            what: "kostka enumeration",
            value: lambda.weight,
            cap,
        });
    }
    if lambda.is_empty() {
        return Ok(BigUint::from(1u32));
    }
    let mut filler = SsytFiller::new(lambda, mu);
    filler.fill(0, 0);
    Ok(BigUint::from(filler.count))
}

struct SsytFiller<'a> {
    shape: &'a [u32],
    col_heights: Vec<u32>,
    /// remaining[v] for values 1..=ℓ(μ); index 0 unused
    remaining: Vec<u32>,
    grid: Vec<Vec<u32>>,
    count: u64,
}

impl<'a> SsytFiller<'a> {
    fn new(lambda: &'a Partition, mu: &Partition) -> Self {
        let mut remaining = vec![0];
        remaining.extend_from_slice(mu.parts());
        SsytFiller {
            shape: lambda.parts(),
            col_heights: lambda.conjugate().parts().to_vec(),
            remaining,
            grid: lambda.parts().iter().map(|&p| vec![0; p as usize]).collect(),
            count: 0,
        }
    }

    fn fill(&mut self, row: usize, col: usize) {
        if col == self.shape[row] as usize {
            // value v may only occupy rows < v, so all values ≤ row+1 are spent
            if self.remaining[1..].iter().take(row + 1).any(|&r| r > 0) {
                return;
            }
            if row + 1 == self.shape.len() {
                self.count += 1;
            } else {
                self.fill(row + 1, 0);
            }
            return;
        }
        let max_value = self.remaining.len() as u32 - 1;
        let mut lo = 1;
        if col > 0 {
            lo = lo.max(self.grid[row][col - 1]);
        }
        if row > 0 {
            lo = lo.max(self.grid[row - 1][col] + 1);
        }
        // the cells below in this column need strictly larger values
        let below = self.col_heights[col] - 1 - row as u32;
        if below >= max_value {
            return;
        }
        let hi = max_value - below;
        for v in lo..=hi {
            if self.remaining[v as usize] == 0 {
                continue;
            }
            self.remaining[v as usize] -= 1;
            self.grid[row][col] = v;
            self.fill(row, col + 1);
            self.remaining[v as usize] += 1;
        }
        self.grid[row][col] = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Partition {
        s.parse().unwrap()
    }

    #[test]
    fn conjugate_examples() {
        assert_eq!(p("1").conjugate(), p("1"));
        assert_eq!(p("3,1").conjugate(), p("2,1,1"));
        assert_eq!(p("3,3,3").conjugate(), p("3,3,3"));
        assert_eq!(p("").conjugate(), p(""));
    }

    #[test]
    fn durfee_examples() {
        assert_eq!(p("1").durfee(), 1);
        assert_eq!(p("3,3,3").durfee(), 3);
        assert_eq!(p("2,1,1").durfee(), 1);
        assert_eq!(p("").durfee(), 0);
    }

    #[test]
    fn dominance_examples() {
        assert!(dominates(&p("1,1,1"), &p("3")).unwrap());
        assert!(dominates(&p("2,2"), &p("3,1")).unwrap());
        assert!(!dominates(&p("3,1"), &p("2,2")).unwrap());
        assert!(dominates(&p(""), &p("")).unwrap());
    }

    #[test]
    fn dominance_rejects_weight_mismatch() {
        let err = dominates(&p("2"), &p("1")).unwrap_err();
        assert!(err.to_string().contains("dominance undefined across different n"));
    }

    #[test]
    fn graphical_examples() {
        assert!(!is_graphical_eg(&p("1,1,1")));
        assert!(is_graphical_eg(&p("2,1,1")));
        assert!(!is_graphical_eg(&p("3,1")));
        assert!(!is_graphical_eg(&p("2,2")));
        assert!(is_graphical_eg(&p("")));

        assert!(is_graphical_hh(&p("1,1")));
        assert!(is_graphical_hh(&p("4,2,2,2,2")));
        assert!(!is_graphical_hh(&p("3,1")));
        assert!(is_graphical_hh(&p("")));
    }

    #[test]
    fn gale_ryser_examples() {
        assert!(gale_ryser(&p("1,1"), &p("2")).unwrap());
        assert!(gale_ryser(&p("2,2"), &p("1,1,1,1")).unwrap());
        assert!(gale_ryser(&p("3"), &p("1,1")).is_err());
        assert!(gale_ryser(&p("3"), &p("1,1,1")).unwrap());
    }

    #[test]
    fn kostka_examples() {
        assert_eq!(kostka(&p("2,1"), &p("2,1")).unwrap(), BigUint::from(1u32));
        assert_eq!(kostka(&p("2,1"), &p("1,1,1")).unwrap(), BigUint::from(2u32));
        assert_eq!(kostka(&p("1,1"), &p("2")).unwrap(), BigUint::from(0u32));
        // standard Young tableaux of shape (3,2): hook length formula gives 5
        assert_eq!(kostka(&p("3,2"), &p("1,1,1,1,1")).unwrap(), BigUint::from(5u32));
    }

    #[test]
    fn kostka_errors() {
        assert!(matches!(
            kostka(&p("2"), &p("1")),
            Err(Error::WeightMismatch { .. })
        ));
        let big = Partition::new(vec![21]);
        assert!(matches!(kostka(&big, &big), Err(Error::AboveCap { .. })));
        assert_eq!(kostka_with_cap(&p("2,1"), &p("2,1"), 2).unwrap_err().to_string(),
            "kostka enumeration infeasible: 3 exceeds cap 2");
    }

    #[test]
    fn text_form() {
        assert_eq!(p("4,2,1,1").to_string(), "4,2,1,1");
        assert_eq!(Partition::empty().to_string(), "");
        assert!("1,2".parse::<Partition>().is_err());
        assert!("1,0".parse::<Partition>().is_err());
        assert!("a".parse::<Partition>().is_err());
    }

    #[test]
    fn canonical_construction() {
        let a = Partition::new(vec![1, 3, 0, 2]);
        assert_eq!(a.parts(), &[3, 2, 1]);
        assert_eq!(a.weight(), 6);
        assert_eq!(Partition::from_multiplicities(&[0, 2, 1]), p("2,1,1"));
    }
}
