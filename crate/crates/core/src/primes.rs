//! Deterministic 64-bit primality and prime search along arithmetic
//! progressions.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const TRIAL_PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Strong-pseudoprime bases sufficient for every `n < 2^64`
/// (the first twelve primes; see Sorenson and Webster, 2015).
const MR_BASES: [u64; 12] = TRIAL_PRIMES;

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in TRIAL_PRIMES {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    if n < 41 * 41 {
        return true;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for a in MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Smallest prime strictly greater than `n`, if one fits in 64 bits.
pub fn next_prime(n: u64) -> Option<u64> {
    let mut c = n.checked_add(1)?;
    while !is_prime(c) {
        c = c.checked_add(1)?;
    }
    Some(c)
}

/// A request for the smallest prime `> lower_bound`, `≡ residue (mod modulus)`,
/// and `<= search_cap`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct APQuery {
    pub residue: u64,
    pub modulus: u64,
    pub lower_bound: u64,
    pub search_cap: u64,
}

impl APQuery {
    pub fn new(residue: u64, modulus: u64, lower_bound: u64, search_cap: u64) -> Self {
        APQuery {
            residue,
            modulus,
            lower_bound,
            search_cap,
        }
    }
}

/// Linear scan `a, a+m, a+2m, ...` starting at the first term above
/// `lower_bound`.
pub fn next_prime_in_ap(query: &APQuery) -> Result<u64> {
    let APQuery {
        residue,
        modulus,
        lower_bound,
        search_cap,
    } = *query;
    if modulus == 0 {
        return Err(Error::invalid("modulus must be positive"));
    }
    if search_cap <= lower_bound {
        return Err(Error::invalid(format!(
            "search cap {search_cap} must exceed lower bound {lower_bound}"
        )));
    }
    let a = residue % modulus;
    if a.gcd(&modulus) != 1 {
        // The only prime a class with gcd(a, m) > 1 can hold is gcd itself.
        return Err(Error::invalid(format!(
            "residue class {a} mod {modulus} is not coprime to its modulus"
        )));
    }

    // first term of the progression strictly above lower_bound
    let mut c = if a > lower_bound {
        a
    } else {
        let steps = (lower_bound - a) / modulus + 1;
        steps
            .checked_mul(modulus)
            .and_then(|s| s.checked_add(a))
            .ok_or_else(|| {
                Error::ArithmeticOverflow(format!(
                    "progression {a} mod {modulus} has no 64-bit term above {lower_bound}"
                ))
            })?
    };
    loop {
        if c > search_cap {
            return Err(Error::NotFound {
                stage: format!("{a} mod {modulus} above {lower_bound}"),
                cap: search_cap,
            });
        }
        if is_prime(c) {
            return Ok(c);
        }
        c = c.checked_add(modulus).ok_or_else(|| {
            Error::ArithmeticOverflow(format!(
                "progression {a} mod {modulus} left 64-bit range above {lower_bound}"
            ))
        })?;
    }
}

/// All primes `<= limit`, by a sieve of Eratosthenes over odd numbers.
pub fn small_primes(limit: u64, max_limit: u64) -> Result<Vec<u64>> {
    if limit < 2 {
        return Err(Error::invalid("sieve limit must be at least 2"));
    }
    if limit > max_limit {
        return Err(Error::Resource {
            what: "prime sieve".into(),
            needed: limit as u128,
            budget: max_limit as u128,
        });
    }
    let limit = limit as usize;
    // index i stands for 2i + 1
    let half = (limit - 1) / 2 + 1;
    let mut composite = vec![false; half];
    composite[0] = true;
    let mut i = 1;
    while (2 * i + 1) * (2 * i + 1) <= limit {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut j = p * p / 2;
            while j < half {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    let mut out = vec![2u64];
    out.extend(
        composite
            .iter()
            .enumerate()
            .filter(|(_, &c)| !c)
            .map(|(i, _)| (2 * i + 1) as u64),
    );
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn trial_division(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        let mut d = 2;
        while d * d <= n {
            if n % d == 0 {
                return false;
            }
            d += 1;
        }
        true
    }

    #[test]
    fn is_prime_examples() {
        assert!(is_prime(157));
        assert!(!is_prime(1));
        assert!(is_prime(3461));
        assert!(!is_prime(0));
        assert!(is_prime(2));
    }

    #[test]
    fn is_prime_agrees_with_trial_division_to_a_million() {
        for n in 0..=1_000_000u64 {
            assert_eq!(is_prime(n), trial_division(n), "n = {n}");
        }
    }

    #[test]
    fn is_prime_large_known_values() {
        assert!(is_prime(18_446_744_073_709_551_557)); // largest 64-bit prime
        assert!(!is_prime(u64::MAX));
        // strong pseudoprime to every base up to 23
        assert!(!is_prime(3_825_123_056_546_413_051));
        assert!(is_prime((1u64 << 61) - 1));
        assert!(!is_prime(((1u64 << 31) - 1) * ((1u64 << 31) - 1)));
    }

    #[test]
    fn ap_examples() {
        let q = APQuery::new(2, 3, 3, 1000);
        assert_eq!(next_prime_in_ap(&q).unwrap(), 5);
        assert_eq!(
            next_prime_in_ap(&APQuery::new(8, 15, 15, 1000)).unwrap(),
            23
        );
        assert_eq!(
            next_prime_in_ap(&APQuery::new(3, 77, 11, 1000)).unwrap(),
            157
        );
    }

    #[test]
    fn ap_errors() {
        assert!(matches!(
            next_prime_in_ap(&APQuery::new(3, 15, 0, 1000)),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            next_prime_in_ap(&APQuery::new(3, 77, 11, 150)),
            Err(Error::NotFound { cap: 150, .. })
        ));
        assert!(matches!(
            next_prime_in_ap(&APQuery::new(3, 77, 11, 11)),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            next_prime_in_ap(&APQuery::new(1, u64::MAX / 2, u64::MAX - 5, u64::MAX)),
            Err(Error::ArithmeticOverflow(_))
        ));
    }

    #[test]
    fn sieve_examples() {
        assert_eq!(small_primes(10, 1000).unwrap(), vec![2, 3, 5, 7]);
        assert_eq!(small_primes(2, 1000).unwrap(), vec![2]);
        assert_eq!(small_primes(10, 1000).unwrap()[1], 3);
        assert!(matches!(
            small_primes(2000, 1000),
            Err(Error::Resource { .. })
        ));
        let sieved = small_primes(100_000, u64::MAX).unwrap();
        let direct: Vec<u64> = (0..=100_000).filter(|&n| is_prime(n)).collect();
        assert_eq!(sieved, direct);
    }

    proptest! {
        #[test]
        fn ap_result_is_minimal(a in 0u64..500, m in 1u64..500, lb in 0u64..5000) {
            prop_assume!(a.gcd(&m) == 1);
            let q = APQuery::new(a, m, lb, lb + 1_000_000);
            let p = next_prime_in_ap(&q).unwrap();
            prop_assert_eq!(p % m, a % m);
            prop_assert!(p > lb);
            prop_assert!(is_prime(p));
            let mut c = p;
            while c >= m && c - m > lb {
                c -= m;
                prop_assert!(!is_prime(c));
            }
        }
    }
}
