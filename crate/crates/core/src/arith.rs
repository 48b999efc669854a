//! Small integer helpers shared by the field, cyclotomic and divisor layers.

use num_integer::Integer;

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

/// Prime factorization by trial division, as (prime, exponent) pairs in increasing order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
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
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn prime_divisors(n: u64) -> Vec<u64> {
    factorize(n).into_iter().map(|(p, _)| p).collect()
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factorize(n) {
        let len = out.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n).into_iter().fold(n, |acc, (p, _)| acc / p * (p - 1))
}

pub fn mobius(n: u64) -> i64 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

pub fn gcd_i(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

/// Reduce a signed integer into `[0, m)`.
pub fn modu(a: i64, m: u64) -> u64 {
    a.rem_euclid(m as i64) as u64
}

pub fn mod_mul(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mod_mul(r, b, m);
        }
        b = mod_mul(b, b, m);
        e >>= 1;
    }
    r
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inv(a: u64, m: u64) -> Option<u64> {
    let g = (a as i128).extended_gcd(&(m as i128));
    if g.gcd != 1 {
        return None;
    }
    Some(g.x.rem_euclid(m as i128) as u64)
}

/// Solve `n·u ≡ t (mod m)` for u. Returns `(u0, step)` with all solutions `u0 + k·step`.
pub fn solve_linear(n: i64, t: u64, m: u64) -> Option<(u64, u64)> {
    let n = modu(n, m);
    let g = gcd(n, m);
    if !t.is_multiple_of(g) {
        return None;
    }
    let m2 = m / g;
    if m2 == 1 {
        return Some((0, 1));
    }
    let inv = mod_inv((n / g) % m2, m2)?;
    Some((mod_mul(t / g % m2, inv, m2), m2))
}

/// Merge `u ≡ a1 (mod m1)` and `u ≡ a2 (mod m2)`; moduli need not be coprime.
pub fn crt_merge(a1: u64, m1: u64, a2: u64, m2: u64) -> Option<(u64, u64)> {
    let g = gcd(m1, m2);
    let diff = (a2 as i128 - a1 as i128).rem_euclid(m2 as i128) as u64;
    if !diff.is_multiple_of(g) {
        return None;
    }
    let l = m1 / g * m2;
    let m2g = m2 / g;
    let k = if m2g == 1 { 0 } else { mod_mul(diff / g % m2g, mod_inv((m1 / g) % m2g, m2g)?, m2g) };
    let u = (a1 as u128 + m1 as u128 * k as u128) % l as u128;
    Some((u as u64, l))
}

/// Solve the simultaneous system `n_i·u ≡ t_i (mod m)`; returns `(u0, step)`.
pub fn solve_system(eqs: &[(i64, u64)], m: u64) -> Option<(u64, u64)> {
    let mut acc = (0u64, 1u64);
    for &(n, t) in eqs {
        let (u, step) = solve_linear(n, t % m, m)?;
        acc = crt_merge(acc.0, acc.1, u, step)?;
    }
    Some(acc)
}

pub fn binomial(n: i64, k: i64) -> u128 {
    if n < 0 || k < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_and_factors() {
        assert!(is_prime(2) && is_prime(13) && !is_prime(1) && !is_prime(4));
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(euler_phi(2394), 648);
        assert_eq!(mobius(30), -1);
        assert_eq!(mobius(12), 0);
    }

    #[test]
    fn congruences() {
        assert_eq!(mod_inv(3, 7), Some(5));
        assert_eq!(mod_inv(2, 4), None);
        assert_eq!(solve_linear(2, 4, 6), Some((2, 3)));
        assert_eq!(solve_linear(2, 3, 6), None);
        assert_eq!(solve_linear(-1, 2, 6), Some((4, 6)));
        assert_eq!(crt_merge(2, 3, 1, 4), Some((5, 12)));
        assert_eq!(crt_merge(1, 4, 2, 6), None);
        assert_eq!(solve_system(&[(2, 2), (3, 3)], 12), Some((1, 12)));
        assert_eq!(solve_system(&[(2, 1)], 12), None);
        for (n, t) in [(2i64, 2u64), (3, 3)] {
            let (u, _) = solve_system(&[(2, 2), (3, 3)], 12).unwrap();
            assert_eq!(modu(n * u as i64, 12), t);
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(-1, 0), 0);
        assert_eq!(binomial(3, 4), 0);
    }
}
