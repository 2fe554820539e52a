//! Checked binomial coefficients.

use crate::error::{Error, Result};

/// `n choose k` in 128-bit arithmetic. Overflow is reported, never wrapped.
pub fn binom(n: u64, k: u64) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k as u128 {
        // acc * (n - k + i) is divisible by i at every step
        acc = acc
            .checked_mul(n as u128 - k as u128 + i)
            .ok_or_else(|| Error::Overflow(format!("binom({n}, {k})")))?
            / i;
    }
    Ok(acc)
}

/// Smallest `t` with `binom(t, r) >= m`.
pub fn min_vertices_for(r: u32, m: u64) -> Result<u32> {
    let mut t = r;
    while binom(t as u64, r as u64)? < m as u128 {
        t += 1;
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(binom(5, 3).unwrap(), 10);
        assert_eq!(binom(4, 0).unwrap(), 1);
        assert_eq!(binom(3, 4).unwrap(), 0);
        assert_eq!(binom(200, 8).unwrap(), 55_098_996_177_225);
    }

    #[test]
    fn pascal_rule() {
        for n in 1..60u64 {
            for k in 1..n {
                assert_eq!(
                    binom(n, k).unwrap(),
                    binom(n - 1, k - 1).unwrap() + binom(n - 1, k).unwrap()
                );
            }
        }
    }

    #[test]
    fn overflow_is_an_error() {
        assert!(matches!(binom(400, 200), Err(Error::Overflow(_))));
    }

    #[test]
    fn min_vertices() {
        assert_eq!(min_vertices_for(3, 1).unwrap(), 3);
        assert_eq!(min_vertices_for(3, 5).unwrap(), 5);
        assert_eq!(min_vertices_for(3, 10).unwrap(), 5);
        assert_eq!(min_vertices_for(3, 11).unwrap(), 6);
    }
}
