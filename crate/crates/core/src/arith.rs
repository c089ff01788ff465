//! Small integer helpers: factorisation by trial division and the functions
//! derived from it.

use crate::error::{Error, Result};

/// Distinct prime factors of `n` in increasing order, with multiplicities.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    for p in [2u64, 3] {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    let mut d = 5u64;
    let mut step = 2;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += step;
        step = 6 - step;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Product of the distinct primes dividing `n`; `radical(1) == 1`.
pub fn radical(n: u64) -> u64 {
    factorize(n).iter().map(|&(p, _)| p).product::<u64>().max(1)
}

pub fn totient(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    factorize(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

pub fn is_squarefree(n: u64) -> bool {
    n >= 1 && factorize(n).iter().all(|&(_, e)| e == 1)
}

/// Number of distinct prime factors.
pub fn omega(n: u64) -> usize {
    factorize(n).len()
}

pub fn checked_product(factors: &[u64], what: &str) -> Result<u64> {
    factors.iter().try_fold(1u64, |acc, &f| {
        acc.checked_mul(f)
            .ok_or_else(|| Error::ArithmeticOverflow(format!("{what} exceeds 64 bits")))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorization_basics() {
        assert_eq!(factorize(1), vec![]);
        assert_eq!(factorize(12), vec![(2, 2), (3, 1)]);
        assert_eq!(factorize(105), vec![(3, 1), (5, 1), (7, 1)]);
        assert_eq!(factorize(3461), vec![(3461, 1)]);
        assert_eq!(radical(12), 6);
        assert_eq!(radical(1), 1);
        assert_eq!(totient(105), 48);
        assert_eq!(totient(1), 1);
        assert!(is_squarefree(105));
        assert!(!is_squarefree(12));
        assert_eq!(omega(210), 4);
    }

    #[test]
    fn totient_matches_gcd_count() {
        for n in 1u64..500 {
            let count = (1..=n).filter(|&a| num_integer::gcd(a, n) == 1).count() as u64;
            assert_eq!(totient(n), count, "n = {n}");
        }
    }
}
