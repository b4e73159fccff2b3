//! Small-integer number theory: divisors, factorization, totient, units.

use num_integer::Integer;

/// Divisors of `n` in increasing order. `divisors(0)` is empty.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut i = 1;
    while i * i <= n {
        if n.is_multiple_of(i) {
            small.push(i);
            if i != n / i {
                large.push(n / i);
            }
        }
        i += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Prime factorization as `(p, e)` pairs with increasing `p`.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn prime_divisors(n: u64) -> Vec<u64> {
    factorize(n).into_iter().map(|(p, _)| p).collect()
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n) == [(n, 1)]
}

pub fn primes_up_to(bound: u64) -> Vec<u64> {
    (2..=bound).filter(|&p| is_prime(p)).collect()
}

/// p-adic valuation of a positive integer.
pub fn valuation(mut n: u64, p: u64) -> u32 {
    debug_assert!(n > 0 && p > 1);
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

pub fn totient(n: u64) -> u64 {
    factorize(n).into_iter().fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// Residues `u` in `0..m` with `gcd(u, m) = 1`. For `m = 1` this is `[0]`.
pub fn units(m: u64) -> Vec<u64> {
    (0..m).filter(|&u| u.gcd(&m) == 1).collect()
}

pub fn lcm_all<I: IntoIterator<Item = u64>>(xs: I) -> u64 {
    xs.into_iter().fold(1, |acc, x| acc.lcm(&x))
}

/// Inverse of `u` modulo `m`, if it exists.
pub fn inverse_mod(u: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let e = (u as i64).extended_gcd(&(m as i64));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m as i64) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divisors_sorted() {
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(49), vec![1, 7, 49]);
    }

    #[test]
    fn factorization_and_totient() {
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factorize(1), vec![]);
        assert_eq!(totient(1), 1);
        assert_eq!(totient(20), 8);
        assert_eq!(totient(13), 12);
        for n in 1..60u64 {
            let s: u64 = divisors(n).into_iter().map(totient).sum();
            assert_eq!(s, n);
        }
    }

    #[test]
    fn unit_residues() {
        assert_eq!(units(1), vec![0]);
        assert_eq!(units(8), vec![1, 3, 5, 7]);
        assert_eq!(inverse_mod(3, 8), Some(3));
        assert_eq!(inverse_mod(2, 8), None);
        assert_eq!(primes_up_to(13), vec![2, 3, 5, 7, 11, 13]);
    }
}
