//! Brute-force reference computations. Deliberately naive and independent of
//! the closed forms and recurrences they are compared against.

/// `Σ_{i≤m} Σ_{j≤n} min(i, j)/(ij)`, the covariance of `Z_m` and `Z_n` read off
/// from `Cov(B_i, B_j) = min(i, j)`.
pub fn gp_cov_double_sum(m: u64, n: u64) -> f64 {
    let mut total = 0.0;
    for i in 1..=m {
        for j in 1..=n {
            total += i.min(j) as f64 / (i * j) as f64;
        }
    }
    total
}
