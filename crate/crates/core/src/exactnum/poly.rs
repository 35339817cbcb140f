//! Dense univariate polynomials, lowest degree first.

use dashu_int::IBig;

use super::Rational;

pub(crate) fn trim<T, F: Fn(&T) -> bool>(p: &mut Vec<T>, is_zero: F) {
    while p.last().is_some_and(&is_zero) {
        p.pop();
    }
}

/// Exact division of integer polynomials by a monic divisor. Returns `None`
/// if the remainder is nonzero.
pub(crate) fn div_exact_monic(num: &[IBig], den: &[IBig]) -> Option<Vec<IBig>> {
    let dn = den.len() - 1;
    debug_assert!(den[dn] == IBig::ONE);
    if num.len() < den.len() {
        return num.iter().all(|c| c.is_zero()).then(Vec::new);
    }
    let mut rem = num.to_vec();
    let mut quot = vec![IBig::ZERO; num.len() - dn];
    for k in (0..quot.len()).rev() {
        let c = std::mem::take(&mut rem[k + dn]);
        if c.is_zero() {
            continue;
        }
        for (i, d) in den[..dn].iter().enumerate() {
            if !d.is_zero() {
                rem[k + i] -= &c * d;
            }
        }
        quot[k] = c;
    }
    rem.iter().all(|c| c.is_zero()).then_some(quot)
}

fn divrem(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut r = a.to_vec();
    trim(&mut r, Rational::is_zero);
    let db = b.len() - 1;
    let lead = b[db].recip().expect("trimmed divisor");
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![Rational::ZERO; r.len() - db];
    for k in (0..q.len()).rev() {
        let c = &r[k + db] * &lead;
        if c.is_zero() {
            continue;
        }
        for (i, bi) in b.iter().enumerate() {
            r[k + i] -= &(&c * bi);
        }
        q[k] = c;
    }
    r.truncate(db);
    trim(&mut r, Rational::is_zero);
    (q, r)
}

fn mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::ZERO; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += &(x * y);
        }
    }
    out
}

fn sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let n = a.len().max(b.len());
    let mut out: Vec<Rational> = (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_default();
            match b.get(i) {
                Some(y) => x - y,
                None => x,
            }
        })
        .collect();
    trim(&mut out, Rational::is_zero);
    out
}

/// Inverse of `a` modulo `modulus` over Q via the extended Euclidean
/// algorithm. `None` when `gcd(a, modulus)` is not a constant.
pub(crate) fn inverse_mod(a: &[Rational], modulus: &[Rational]) -> Option<Vec<Rational>> {
    let mut r0 = modulus.to_vec();
    let mut r1 = a.to_vec();
    trim(&mut r1, Rational::is_zero);
    if r1.is_empty() {
        return None;
    }
    let mut s0: Vec<Rational> = Vec::new();
    let mut s1 = vec![Rational::ONE];
    while !r1.is_empty() {
        let (q, r) = divrem(&r0, &r1);
        let s2 = sub(&s0, &mul(&q, &s1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
    }
    if r0.len() != 1 {
        return None;
    }
    let c = r0[0].recip().ok()?;
    let inv: Vec<Rational> = s0.iter().map(|x| x * &c).collect();
    Some(divrem(&inv, modulus).1)
}
