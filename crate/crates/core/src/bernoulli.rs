//! Twisted generalized Bernoulli numbers, polynomials and power sums.
//!
//! For a character `χ` mod `d` and a root of unity `ξ` with `ξ^d ≠ 1`,
//!
//! ```text
//! t Σ_{a<d} χ(a) ξ^a e^{at} / (ξ^d e^{dt} - 1) = Σ_n B_{n,χ,ξ} t^n / n!
//! ```
//!
//! and `B_{n,χ,ξ}(x) = Σ_k C(n,k) B_{k,χ,ξ} x^{n-k}`. The numbers are
//! computed exactly from this generating function.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use dashu_int::IBig;
use serde::{Deserialize, Serialize};

use crate::dirichlet::DirichletCharacter;
use crate::error::{Error, Result};
use crate::exactnum::int::{binomial, gcd, lcm};
use crate::exactnum::{CyclotomicNumber, Rational};
use crate::series::{egf_coefficient, exp_rational, TruncatedSeries};

/// The twisting root `ξ = ζ_r^j`, primitive of order `r ≥ 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TwistSpec {
    pub r: u64,
    pub j: u64,
}

impl TwistSpec {
    pub fn new(r: u64, j: u64) -> Result<Self> {
        if r < 2 {
            return Err(Error::Precondition(format!("twist order must be at least 2, got {r}")));
        }
        if gcd(j % r, r) != 1 {
            return Err(Error::Precondition(format!("ζ_{r}^{j} is not a primitive root of unity")));
        }
        Ok(TwistSpec { r, j: j % r })
    }

    /// `k` with `ξ^w = ζ_r^k`, `0 <= k < r`.
    pub fn exponent(&self, w: i64) -> u64 {
        (self.j as i128 * w as i128).rem_euclid(self.r as i128) as u64
    }

    /// Whether `ξ^w = 1`.
    pub fn kills(&self, w: i64) -> bool {
        w.rem_euclid(self.r as i64) == 0
    }
}

/// A character together with a twist, and caches of the sequences derived
/// from them. All values live in `Q(ζ_m)` with `m = lcm(r, ord χ)`.
pub struct Setting {
    chi: DirichletCharacter,
    twist: TwistSpec,
    m: u64,
    bern: RefCell<HashMap<u64, Rc<Vec<CyclotomicNumber>>>>,
    sums: RefCell<HashMap<(u64, u64), Rc<Vec<CyclotomicNumber>>>>,
}

impl Setting {
    pub fn new(chi: DirichletCharacter, twist: TwistSpec) -> Self {
        let m = lcm(twist.r, chi.order());
        Setting { chi, twist, m, bern: Default::default(), sums: Default::default() }
    }

    pub fn chi(&self) -> &DirichletCharacter {
        &self.chi
    }

    pub fn twist(&self) -> TwistSpec {
        self.twist
    }

    pub fn modulus(&self) -> u64 {
        self.chi.modulus()
    }

    /// Conductor of the field holding every value of this setting.
    pub fn conductor(&self) -> u64 {
        self.m
    }

    /// Whether `gcd(r, d) = 1`.
    pub fn coprime(&self) -> bool {
        gcd(self.twist.r, self.modulus()) == 1
    }

    /// Exponent `e` with `ζ_m^e = ξ^w`.
    pub fn root_exponent(&self, w: i64) -> u64 {
        self.twist.exponent(w) * (self.m / self.twist.r)
    }

    /// Exponent `e` with `ζ_m^e = χ(a) ξ^{wa}`, or `None` where `χ(a) = 0`.
    pub fn unit_exponent(&self, a: i64, w: i64) -> Option<u64> {
        let v = self.chi.value_exponent(a)?;
        let c = v * (self.m / self.chi.order());
        let x = self.twist.exponent(w.wrapping_mul(a)) * (self.m / self.twist.r);
        Some((c + x) % self.m)
    }

    pub fn root(&self, e: i64) -> CyclotomicNumber {
        CyclotomicNumber::root_of_unity(self.m, e).unwrap()
    }

    pub fn rational(&self, q: &Rational) -> CyclotomicNumber {
        CyclotomicNumber::from_rational(self.m, q).unwrap()
    }

    pub fn zero(&self) -> CyclotomicNumber {
        CyclotomicNumber::zero(self.m).unwrap()
    }

    /// `Σ_{a<n} χ(a) ξ^{wa} e^{a s t}` to order `order`.
    pub fn character_exponential_sum(&self, n: u64, w: i64, s: &Rational, order: usize) -> TruncatedSeries {
        let mut acc = TruncatedSeries::zero(self.m, order).unwrap();
        for a in 0..n as i64 {
            if let Some(e) = self.unit_exponent(a, w) {
                let term = exp_rational(&(s * &Rational::from_int(a)), self.m, order);
                acc = acc.add(&term.scale(&self.root(e as i64)));
            }
        }
        acc
    }

    /// `ξ^{w c} e^{c s t} - 1` to order `order`.
    pub fn shifted_exponential(&self, c: i64, w: i64, s: &Rational, order: usize) -> TruncatedSeries {
        let e = exp_rational(&(s * &Rational::from_int(c)), self.m, order);
        let one = TruncatedSeries::constant(&CyclotomicNumber::one(self.m).unwrap(), order);
        e.scale(&self.root(self.root_exponent(w.wrapping_mul(c)) as i64)).sub(&one)
    }

    /// `B_{0,χ,ξ^w}, …, B_{n_max,χ,ξ^w}`. Fails if `ξ^{wd} = 1`.
    pub fn bernoulli(&self, w: i64, n_max: usize) -> Result<Rc<Vec<CyclotomicNumber>>> {
        let key = self.twist.exponent(w);
        if let Some(v) = self.bern.borrow().get(&key) {
            if v.len() > n_max {
                return Ok(v.clone());
            }
        }
        let d = self.modulus() as i64;
        let order = n_max.max(1);
        let one = Rational::ONE;
        let numer = self.character_exponential_sum(d as u64, w, &one, order);
        let denom = self.shifted_exponential(d, w, &one, order);
        let name = format!("ξ^{{{}}} e^{{{d}t}} - 1 with ξ^{{{}}} = 1", w * d, w * d);
        let q = numer.div_named(&denom, &name)?;
        let t = TruncatedSeries::variable(self.m, order)?;
        let gen = t.mul(&q);
        let values: Vec<_> = (0..=order).map(|n| egf_coefficient(&gen, n)).collect::<Result<_>>()?;
        let values = Rc::new(values);
        self.bern.borrow_mut().insert(key, values.clone());
        Ok(values)
    }

    /// `S_k(upper; χ, ξ^w) = Σ_{a=0}^{upper} χ(a) ξ^{wa} a^k` for
    /// `k = 0..=k_max`, with `0^0 = 1`.
    pub fn power_sums(&self, upper: u64, w: i64, k_max: usize) -> Rc<Vec<CyclotomicNumber>> {
        let key = (upper, self.twist.exponent(w));
        if let Some(v) = self.sums.borrow().get(&key) {
            if v.len() > k_max {
                return v.clone();
            }
        }
        // bins[e][k] = Σ a^k over the a whose unit is ζ_m^e
        let mut bins: HashMap<u64, Vec<IBig>> = HashMap::new();
        for a in 0..=upper {
            if let Some(e) = self.unit_exponent(a as i64, w) {
                let bin = bins.entry(e).or_insert_with(|| vec![IBig::ZERO; k_max + 1]);
                let mut p = IBig::ONE;
                for slot in bin.iter_mut() {
                    *slot += &p;
                    p *= IBig::from(a);
                }
            }
        }
        let mut exps: Vec<_> = bins.into_iter().collect();
        exps.sort_by_key(|(e, _)| *e);
        let values: Vec<_> = (0..=k_max)
            .map(|k| {
                let terms: Vec<(i64, Rational)> =
                    exps.iter().map(|(e, v)| (*e as i64, Rational::from(v[k].clone()))).collect();
                CyclotomicNumber::from_exponents(self.m, terms.iter().map(|(e, q)| (*e, q))).unwrap()
            })
            .collect();
        let values = Rc::new(values);
        self.sums.borrow_mut().insert(key, values.clone());
        values
    }
}

/// `B_{0,χ,ξ^w}, …, B_{n_max,χ,ξ^w}` with `ξ = ζ_r^j`.
pub fn gen_bernoulli_numbers(
    chi: &DirichletCharacter,
    twist: TwistSpec,
    w: i64,
    n_max: usize,
) -> Result<Vec<CyclotomicNumber>> {
    let setting = Setting::new(chi.clone(), twist);
    let v = setting.bernoulli(w, n_max)?;
    Ok(v[..=n_max].to_vec())
}

/// `B_n(x) = Σ_k C(n,k) B_k x^{n-k}`, stored by ascending power of `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BernoulliPolynomial {
    coeffs: Vec<CyclotomicNumber>,
}

impl BernoulliPolynomial {
    /// Builds `B_n(x)` from `B_0, …, B_n`.
    pub fn new(numbers: &[CyclotomicNumber], n: usize) -> Result<Self> {
        if numbers.len() <= n {
            return Err(Error::OrderExceeded { index: n, order: numbers.len().saturating_sub(1) });
        }
        let coeffs = (0..=n)
            .map(|i| numbers[n - i].scale_int(&binomial(n, n - i)))
            .collect();
        Ok(BernoulliPolynomial { coeffs })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `x^i`.
    pub fn coeffs(&self) -> &[CyclotomicNumber] {
        &self.coeffs
    }

    pub fn eval(&self, x: &Rational) -> CyclotomicNumber {
        let mut acc = self.coeffs.last().unwrap().clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = &acc.scale(x) + c;
        }
        acc
    }

    pub fn eval_cyclotomic(&self, x: &CyclotomicNumber) -> CyclotomicNumber {
        let mut acc = self.coeffs.last().unwrap().clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = &(&acc * x) + c;
        }
        acc
    }
}

/// `S_k(upper; χ, ξ^w) = Σ_{a=0}^{upper} χ(a) ξ^{wa} a^k`, with `0^0 = 1`.
/// The twist power may be any integer.
pub fn power_sum(k: usize, upper: u64, chi: &DirichletCharacter, twist: TwistSpec, w: i64) -> CyclotomicNumber {
    Setting::new(chi.clone(), twist).power_sums(upper, w, k)[k].clone()
}

/// Outcome of [`power_sum_egf_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EgfCheck {
    pub order: usize,
    /// First `k` at which the closed quotient and the power sum disagree,
    /// with both values.
    pub mismatch: Option<(usize, CyclotomicNumber, CyclotomicNumber)>,
}

impl EgfCheck {
    pub fn pass(&self) -> bool {
        self.mismatch.is_none()
    }
}

/// Checks that
/// `(ξ^{dw} e^{dwt} - 1) / (ξ^d e^{dt} - 1) · Σ_{a<d} χ(a) ξ^a e^{at}`
/// equals `Σ_{a<dw} χ(a) ξ^a e^{at}` to order `order`, and that its EGF
/// coefficients are `S_k(dw-1; χ, ξ)`.
pub fn power_sum_egf_check(chi: &DirichletCharacter, twist: TwistSpec, w: u64, order: usize) -> Result<EgfCheck> {
    let d = chi.modulus();
    let set = Setting::new(chi.clone(), twist);
    for (what, v) in [("w", w), ("d", d), ("dw", d * w)] {
        if twist.kills(v as i64) {
            return Err(Error::Precondition(format!("r = {} divides {what} = {v}", twist.r)));
        }
    }
    let one = Rational::ONE;
    let dw = (d * w) as i64;
    let top = set.shifted_exponential(dw, 1, &one, order);
    let bottom = set.shifted_exponential(d as i64, 1, &one, order);
    let chars = set.character_exponential_sum(d, 1, &one, order);
    let closed = top.mul(&chars).div_named(&bottom, "ξ^d e^{dt} - 1")?;
    let direct = set.character_exponential_sum(d * w, 1, &one, order);
    let sums = set.power_sums(d * w - 1, 1, order);
    for k in 0..=order {
        let lhs = egf_coefficient(&closed, k)?;
        if closed.coeffs()[k] != direct.coeffs()[k] {
            return Ok(EgfCheck { order, mismatch: Some((k, lhs, egf_coefficient(&direct, k)?)) });
        }
        if lhs != sums[k] {
            return Ok(EgfCheck { order, mismatch: Some((k, lhs, sums[k].clone())) });
        }
    }
    Ok(EgfCheck { order, mismatch: None })
}
