//! Small-integer number theory helpers.

use dashu_int::IBig;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

/// Prime factorization as `(p, k)` pairs in increasing order of `p`.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut k = 0;
            while n % p == 0 {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Positive divisors in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

pub fn factorial(n: usize) -> IBig {
    (1..=n).fold(IBig::ONE, |acc, k| acc * IBig::from(k))
}

pub fn binomial(n: usize, k: usize) -> IBig {
    if k > n {
        return IBig::ZERO;
    }
    let k = k.min(n - k);
    let mut acc = IBig::ONE;
    for i in 0..k {
        acc = acc * IBig::from(n - i) / IBig::from(i + 1);
    }
    acc
}

/// Multinomial coefficient `(sum ks)! / prod(k!)`.
pub fn multinomial(ks: &[usize]) -> IBig {
    let mut total = 0;
    let mut acc = IBig::ONE;
    for &k in ks {
        total += k;
        acc *= binomial(total, k);
    }
    acc
}

pub fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = (acc as u128 * base as u128 % m as u128) as u64;
        }
        base = (base as u128 * base as u128 % m as u128) as u64;
        exp >>= 1;
    }
    acc
}
