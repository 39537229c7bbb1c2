use serde::{Deserialize, Serialize};

use super::ArithError;

/// All primes up to `limit`, ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Primes in the closed interval `[lo, hi]`.
    pub fn range(&self, lo: f64, hi: f64) -> &[u64] {
        let start = self.primes.partition_point(|&p| (p as f64) < lo);
        let end = self.primes.partition_point(|&p| (p as f64) <= hi);
        if start >= end {
            &[]
        } else {
            &self.primes[start..end]
        }
    }

    /// Number of primes `<= x`.
    pub fn count_upto(&self, x: f64) -> usize {
        self.primes.partition_point(|&p| (p as f64) <= x)
    }

    pub fn contains(&self, n: u64) -> bool {
        self.primes.binary_search(&n).is_ok()
    }
}

/// Sieve of Eratosthenes over the odd numbers.
pub fn sieve_primes(limit: u64) -> Result<PrimeTable, ArithError> {
    if limit < 2 {
        return Err(ArithError::EmptyDomain(format!(
            "sieve limit {limit} is below the first prime"
        )));
    }
    let limit_usize = usize::try_from(limit)
        .map_err(|_| ArithError::EmptyDomain(format!("sieve limit {limit} too large")))?;
    // index i represents the odd number 2i + 1
    let half = limit_usize / 2 + 1;
    let mut composite = vec![false; half];
    composite[0] = true;
    let mut i = 1;
    while (2 * i + 1) * (2 * i + 1) <= limit_usize {
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
    let mut primes = Vec::with_capacity(estimate_count(limit));
    primes.push(2);
    primes.extend(
        composite
            .iter()
            .enumerate()
            .filter(|&(i, &c)| !c && (2 * i + 1) <= limit_usize)
            .map(|(i, _)| (2 * i + 1) as u64),
    );
    Ok(PrimeTable { limit, primes })
}

fn estimate_count(limit: u64) -> usize {
    let x = limit as f64;
    if x < 17.0 {
        8
    } else {
        (1.3 * x / x.ln()) as usize
    }
}

/// Deterministic trial division.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Prime factorisation as `(p, e)` pairs, ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn totient(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_primes() {
        assert_eq!(sieve_primes(10).unwrap().primes(), &[2, 3, 5, 7]);
        assert_eq!(sieve_primes(2).unwrap().primes(), &[2]);
        assert_eq!(sieve_primes(3).unwrap().primes(), &[2, 3]);
    }

    #[test]
    fn rejects_empty_domain() {
        assert!(matches!(sieve_primes(1), Err(ArithError::EmptyDomain(_))));
        assert!(matches!(sieve_primes(0), Err(ArithError::EmptyDomain(_))));
    }

    #[test]
    fn agrees_with_trial_division() {
        let table = sieve_primes(100_000).unwrap();
        let oracle: Vec<u64> = (2..=100_000).filter(|&n| is_prime(n)).collect();
        assert_eq!(table.primes(), oracle.as_slice());
    }

    #[test]
    fn prime_count_to_one_million() {
        // frozen from the trial-division oracle
        let oracle = (2..=1_000_000u64).filter(|&n| is_prime(n)).count();
        assert_eq!(oracle, 78_498);
        assert_eq!(sieve_primes(1_000_000).unwrap().len(), oracle);
    }

    #[test]
    fn range_queries() {
        let table = sieve_primes(100).unwrap();
        assert_eq!(table.range(10.0, 20.0), &[11, 13, 17, 19]);
        assert_eq!(table.range(24.0, 28.0), &[] as &[u64]);
        assert_eq!(table.count_upto(10.0), 4);
    }

    #[test]
    fn totients() {
        assert_eq!(totient(1), 1);
        assert_eq!(totient(12), 4);
        assert_eq!(totient(97), 96);
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
    }
}
