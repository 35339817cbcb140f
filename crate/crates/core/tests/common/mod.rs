//! Test-side oracle. Shares no arithmetic with the library: elements of
//! `Q(ζ_m)` are coefficient vectors reduced by a `Φ_m` obtained from
//! `x^m - 1` by exact division, inverses come from Gaussian elimination on
//! the multiplication matrix, and twisted Bernoulli numbers come from the
//! Stirling-number closed form
//! `B_{n,ξ} = n Σ_k (-1)^k k! S(n-1,k) ξ^k/(ξ-1)^{k+1}`.

#![allow(dead_code)]

use dashu_int::IBig;
use dashu_ratio::RBig;
use twistsym::dirichlet::DirichletCharacter;
use twistsym::{CyclotomicNumber, Rational};

fn q(n: i64) -> RBig {
    RBig::from(IBig::from(n))
}

/// Quotient and remainder of `a / b` for monic `b`, coefficients low first.
fn divmod(a: &[RBig], b: &[RBig]) -> (Vec<RBig>, Vec<RBig>) {
    let mut rem = a.to_vec();
    let db = b.len() - 1;
    if rem.len() <= db {
        return (vec![], rem);
    }
    let mut quo = vec![RBig::ZERO; rem.len() - db];
    for i in (0..quo.len()).rev() {
        let c = rem[i + db].clone();
        if c != RBig::ZERO {
            for (k, bk) in b.iter().enumerate() {
                rem[i + k] = &rem[i + k] - &c * bk;
            }
        }
        quo[i] = c;
    }
    rem.truncate(db);
    (quo, rem)
}

fn mul_poly(a: &[RBig], b: &[RBig]) -> Vec<RBig> {
    let mut out = vec![RBig::ZERO; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + x * y;
        }
    }
    out
}

thread_local! {
    static PHI: std::cell::RefCell<std::collections::HashMap<u64, Vec<RBig>>> = Default::default();
}

/// `Φ_m` as `(x^m - 1) / Π_{d | m, d < m} Φ_d`.
pub fn phi_poly(m: u64) -> Vec<RBig> {
    if let Some(p) = PHI.with(|c| c.borrow().get(&m).cloned()) {
        return p;
    }
    let p = phi_poly_uncached(m);
    PHI.with(|c| c.borrow_mut().insert(m, p.clone()));
    p
}

fn phi_poly_uncached(m: u64) -> Vec<RBig> {
    let mut num = vec![RBig::ZERO; m as usize + 1];
    num[0] = q(-1);
    num[m as usize] = q(1);
    for d in 1..m {
        if m % d == 0 {
            let (quo, rem) = divmod(&num, &phi_poly(d));
            assert!(rem.iter().all(|c| *c == RBig::ZERO));
            num = quo;
        }
    }
    num
}

/// An element of `Q(ζ_m)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Oc {
    pub m: u64,
    pub v: Vec<RBig>,
}

impl Oc {
    fn reduce(m: u64, v: Vec<RBig>) -> Oc {
        let phi = phi_poly(m);
        let deg = phi.len() - 1;
        let (_, mut r) = divmod(&v, &phi);
        r.resize(deg, RBig::ZERO);
        Oc { m, v: r }
    }

    pub fn rat(m: u64, x: RBig) -> Oc {
        Oc::reduce(m, vec![x])
    }

    pub fn int(m: u64, n: i64) -> Oc {
        Oc::rat(m, q(n))
    }

    /// `ζ_m^k`.
    pub fn zeta(m: u64, k: i64) -> Oc {
        let e = k.rem_euclid(m as i64) as usize;
        let mut v = vec![RBig::ZERO; e + 1];
        v[e] = q(1);
        Oc::reduce(m, v)
    }

    pub fn add(&self, o: &Oc) -> Oc {
        Oc { m: self.m, v: self.v.iter().zip(&o.v).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Oc) -> Oc {
        Oc { m: self.m, v: self.v.iter().zip(&o.v).map(|(a, b)| a - b).collect() }
    }

    pub fn mul(&self, o: &Oc) -> Oc {
        Oc::reduce(self.m, mul_poly(&self.v, &o.v))
    }

    pub fn scale(&self, c: &RBig) -> Oc {
        Oc { m: self.m, v: self.v.iter().map(|a| a * c).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.v.iter().all(|c| *c == RBig::ZERO)
    }

    /// Solves `self * y = 1` by elimination on the multiplication matrix.
    pub fn inv(&self) -> Option<Oc> {
        let n = self.v.len();
        // column k of the matrix is self * x^k
        let cols: Vec<Vec<RBig>> = (0..n)
            .map(|k| {
                let mut xk = vec![RBig::ZERO; k + 1];
                xk[k] = q(1);
                Oc::reduce(self.m, mul_poly(&self.v, &xk)).v
            })
            .collect();
        let mut a: Vec<Vec<RBig>> = (0..n)
            .map(|i| {
                let mut row: Vec<RBig> = (0..n).map(|k| cols[k][i].clone()).collect();
                row.push(if i == 0 { q(1) } else { RBig::ZERO });
                row
            })
            .collect();
        for c in 0..n {
            let p = (c..n).find(|&r| a[r][c] != RBig::ZERO)?;
            a.swap(c, p);
            let piv = a[c][c].clone();
            for x in a[c].iter_mut() {
                *x = &*x / &piv;
            }
            for r in 0..n {
                if r != c && a[r][c] != RBig::ZERO {
                    let f = a[r][c].clone();
                    let pivot_row = a[c].clone();
                    for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                        *x = &*x - &f * y;
                    }
                }
            }
        }
        Some(Oc { m: self.m, v: a.into_iter().map(|row| row[n].clone()).collect() })
    }

    pub fn pow(&self, e: u64) -> Oc {
        (0..e).fold(Oc::int(self.m, 1), |acc, _| acc.mul(self))
    }

    /// Whether the library value equals this one.
    pub fn matches(&self, x: &CyclotomicNumber) -> bool {
        let x = x.embed(self.m).expect("library value lives in a subfield");
        x.coeffs().iter().map(|c| c.inner().clone()).collect::<Vec<_>>() == self.v
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    let mut g = (a, b);
    while g.1 != 0 {
        g = (g.1, g.0 % g.1);
    }
    a / g.0 * b
}

/// Stirling numbers of the second kind `S(n, k)` for `n, k ≤ n_max`.
pub fn stirling2(n_max: usize) -> Vec<Vec<IBig>> {
    let mut s = vec![vec![IBig::ZERO; n_max + 1]; n_max + 1];
    s[0][0] = IBig::ONE;
    for n in 1..=n_max {
        for k in 1..=n {
            s[n][k] = IBig::from(k) * &s[n - 1][k] + &s[n - 1][k - 1];
        }
    }
    s
}

fn factorial(n: usize) -> IBig {
    (1..=n).fold(IBig::ONE, |a, k| a * IBig::from(k))
}

fn binom(n: usize, k: usize) -> IBig {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// `B_{n,ξ}` for `n ≤ n_max`, with `ξ` given in `Q(ζ_m)`; `ξ ≠ 1`.
pub fn twisted_plain(xi: &Oc, n_max: usize) -> Vec<Oc> {
    let m = xi.m;
    let s = stirling2(n_max);
    let u = xi.sub(&Oc::int(m, 1)).inv().expect("ξ ≠ 1");
    let mut out = vec![Oc::int(m, 0)];
    for n in 1..=n_max {
        let mut acc = Oc::int(m, 0);
        for k in 0..n {
            let c = IBig::from(if k % 2 == 0 { 1 } else { -1 }) * factorial(k) * &s[n - 1][k];
            let term = xi.pow(k as u64).mul(&u.pow(k as u64 + 1)).scale(&RBig::from(c));
            acc = acc.add(&term);
        }
        out.push(acc.scale(&q(n as i64)));
    }
    out
}

/// `B_{n,ξ}(x) = Σ_i C(n,i) B_{i,ξ} x^{n-i}`.
pub fn twisted_plain_poly(b: &[Oc], n: usize, x: &RBig) -> Oc {
    let mut acc = Oc::int(b[0].m, 0);
    for i in 0..=n {
        let mut xp = q(1);
        for _ in 0..n - i {
            xp = &xp * x;
        }
        acc = acc.add(&b[i].scale(&(RBig::from(binom(n, i)) * xp)));
    }
    acc
}

/// The field used for a character of order `e` and a twist `ζ_r^{jw}`.
pub fn field(chi: &DirichletCharacter, r: u64) -> u64 {
    lcm(chi.order(), r)
}

/// `χ(a)` in `Q(ζ_m)`, from the library's value table.
pub fn chi_value(chi: &DirichletCharacter, a: i64, m: u64) -> Oc {
    match chi.value_exponent(a) {
        None => Oc::int(m, 0),
        Some(e) => Oc::zeta(m, (e * (m / chi.order())) as i64),
    }
}

/// `B_{n,χ,ξ}` for `n ≤ n_max`, `ξ = ζ_r^{e}`, through
/// `B_{n,χ,ξ} = d^{n-1} Σ_a χ(a) ξ^a B_{n,ξ^d}(a/d)`.
pub fn generalized(chi: &DirichletCharacter, r: u64, e: i64, n_max: usize) -> Vec<Oc> {
    let d = chi.modulus();
    let m = field(chi, r);
    let xi = Oc::zeta(m, e * (m / r) as i64);
    let plain = twisted_plain(&xi.pow(d), n_max);
    (0..=n_max)
        .map(|n| {
            let mut acc = Oc::int(m, 0);
            for a in 0..d {
                let c = chi_value(chi, a as i64, m).mul(&xi.pow(a));
                if c.is_zero() {
                    continue;
                }
                let x = RBig::from(IBig::from(a)) / RBig::from(IBig::from(d));
                acc = acc.add(&c.mul(&twisted_plain_poly(&plain, n, &x)));
            }
            // d^{n-1}, with n = 0 giving 1/d
            let mut scale = q(1) / q(d as i64);
            for _ in 0..n {
                scale = scale * q(d as i64);
            }
            acc.scale(&scale)
        })
        .collect()
}

/// `Σ_{a=0}^{upper} χ(a) ξ^a a^k` by direct summation, `ξ = ζ_r^e`.
pub fn power_sum(chi: &DirichletCharacter, r: u64, e: i64, upper: u64, k: u32) -> Oc {
    let m = field(chi, r);
    let mut acc = Oc::int(m, 0);
    for a in 0..=upper {
        let ak = if k == 0 { 1 } else { (a as i64).pow(k) };
        let t = chi_value(chi, a as i64, m).mul(&Oc::zeta(m, e * a as i64 * (m / r) as i64)).scale(&q(ak));
        acc = acc.add(&t);
    }
    acc
}

pub fn rational(x: &RBig) -> Rational {
    Rational::from(x.clone())
}
