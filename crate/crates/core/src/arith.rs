//! Elementary integer arithmetic: primes, squarefree kernels, Kronecker symbols.

use crate::error::{Error, Result};

/// Primes `p <= bound` by the sieve of Eratosthenes.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factorization by trial division, as `(prime, exponent)` pairs in increasing order.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// The primes dividing `n` to an odd power; their product is the squarefree kernel.
pub fn odd_primes_of(n: u64) -> Vec<u64> {
    factor(n)
        .into_iter()
        .filter(|&(_, e)| e % 2 == 1)
        .map(|(p, _)| p)
        .collect()
}

pub fn squarefree_kernel(n: u64) -> u64 {
    odd_primes_of(n).into_iter().product()
}

pub fn is_squarefree(n: u64) -> bool {
    n != 0 && factor(n).iter().all(|&(_, e)| e == 1)
}

/// Discriminant of `Q(sqrt(d))` for squarefree `d`.
pub fn fundamental_discriminant(d: i64) -> i64 {
    if d.rem_euclid(4) == 1 {
        d
    } else {
        4 * d
    }
}

/// True for `1` and for discriminants of real quadratic fields.
pub fn is_positive_fundamental(disc: i64) -> bool {
    if disc == 1 {
        return true;
    }
    if disc <= 1 {
        return false;
    }
    match disc.rem_euclid(4) {
        1 => is_squarefree(disc as u64),
        0 => {
            let d = disc / 4;
            matches!(d.rem_euclid(4), 2 | 3) && is_squarefree(d as u64)
        }
        _ => false,
    }
}

const TAB2: [i8; 8] = [0, 1, 0, -1, 0, -1, 0, 1];

/// Kronecker symbol `(a | n)`.
pub fn kronecker(a: i64, n: i64) -> i8 {
    let mut a = a as i128;
    let mut b = n as i128;
    if b == 0 {
        return if a.abs() == 1 { 1 } else { 0 };
    }
    if a % 2 == 0 && b % 2 == 0 {
        return 0;
    }
    let mut v = 0;
    while b % 2 == 0 {
        v += 1;
        b /= 2;
    }
    let mut k: i8 = if v % 2 == 0 {
        1
    } else {
        TAB2[(a & 7) as usize]
    };
    if b < 0 {
        b = -b;
        if a < 0 {
            k = -k;
        }
    }
    loop {
        if a == 0 {
            return if b > 1 { 0 } else { k };
        }
        let mut v = 0;
        while a % 2 == 0 {
            v += 1;
            a /= 2;
        }
        if v % 2 == 1 {
            k *= TAB2[(b & 7) as usize];
        }
        if a & b & 2 != 0 {
            k = -k;
        }
        let r = a.abs();
        a = b % r;
        b = r;
    }
}

/// Integer square root when `n` is a perfect square.
pub fn exact_sqrt(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let mut x = (n as f64).sqrt() as i128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    (x * x == n).then_some(x)
}

pub(crate) fn ensure_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn legendre_by_squares(a: i64, p: i64) -> i8 {
        let a = a.rem_euclid(p);
        if a == 0 {
            return 0;
        }
        if (1..p).any(|x| (x * x) % p == a) {
            1
        } else {
            -1
        }
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(5, 19), 1);
        assert_eq!((81 % 19), 5);
        for a in -20..20 {
            assert_eq!(kronecker(a, 1), 1);
        }
        for p in [7i64, 17, 23, 31, 41, 47] {
            assert_eq!(kronecker(2, p), 1, "p = {p}");
        }
        for p in [3i64, 5, 11, 13, 19, 29] {
            assert_eq!(kronecker(2, p), -1, "p = {p}");
        }
    }

    #[test]
    fn kronecker_matches_euler_on_odd_primes() {
        for p in primes_up_to(200).into_iter().filter(|&p| p > 2) {
            for a in -30..30 {
                assert_eq!(kronecker(a, p as i64), legendre_by_squares(a, p as i64));
            }
        }
    }

    #[test]
    fn kronecker_at_two_for_discriminants() {
        // (D|2) = 1 for D = 1 mod 8, -1 for D = 5 mod 8
        assert_eq!(kronecker(17, 2), 1);
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(8, 2), 0);
    }

    #[test]
    fn discriminants() {
        assert_eq!(fundamental_discriminant(5), 5);
        assert_eq!(fundamental_discriminant(2), 8);
        assert_eq!(fundamental_discriminant(3), 12);
        assert!(is_positive_fundamental(1));
        assert!(is_positive_fundamental(5));
        assert!(is_positive_fundamental(8));
        assert!(is_positive_fundamental(12));
        assert!(!is_positive_fundamental(4));
        assert!(!is_positive_fundamental(16));
        assert!(!is_positive_fundamental(9));
        assert!(!is_positive_fundamental(-4));
    }

    #[test]
    fn kernels() {
        assert_eq!(squarefree_kernel(8), 2);
        assert_eq!(squarefree_kernel(16), 1);
        assert_eq!(squarefree_kernel(60), 15);
        assert_eq!(primes_up_to(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }
}
