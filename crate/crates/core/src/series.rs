//! Truncated power series over cyclotomic fields.
//!
//! A [`TruncatedSeries`] of order `N` holds the coefficients of
//! `t^0, …, t^N`; binary operations truncate to the smaller order. Series
//! are read as exponential generating functions through [`egf_coefficient`].

use std::fmt;

use dashu_int::IBig;

use crate::error::{Error, Result};
use crate::exactnum::int::{factorial, lcm};
use crate::exactnum::{CyclotomicNumber, Rational};

#[derive(Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    m: u64,
    coeffs: Vec<CyclotomicNumber>,
}

impl TruncatedSeries {
    /// Series with the given coefficients of `t^0, …, t^N`, all moved into
    /// one common field.
    pub fn new(coeffs: Vec<CyclotomicNumber>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Precondition("a series needs at least one coefficient".into()));
        }
        let m = coeffs.iter().fold(1, |l, c| lcm(l, c.conductor()));
        let coeffs = coeffs.iter().map(|c| c.embed(m)).collect::<Result<_>>()?;
        Ok(TruncatedSeries { m, coeffs })
    }

    pub fn zero(m: u64, order: usize) -> Result<Self> {
        Ok(TruncatedSeries { m, coeffs: vec![CyclotomicNumber::zero(m)?; order + 1] })
    }

    pub fn constant(c: &CyclotomicNumber, order: usize) -> Self {
        let mut coeffs = vec![CyclotomicNumber::zero(c.conductor()).unwrap(); order + 1];
        coeffs[0] = c.clone();
        TruncatedSeries { m: c.conductor(), coeffs }
    }

    /// The series `t`.
    pub fn variable(m: u64, order: usize) -> Result<Self> {
        let mut s = Self::zero(m, order)?;
        if order >= 1 {
            s.coeffs[1] = CyclotomicNumber::one(m)?;
        }
        Ok(s)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn conductor(&self) -> u64 {
        self.m
    }

    pub fn coeffs(&self) -> &[CyclotomicNumber] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Result<&CyclotomicNumber> {
        self.coeffs.get(n).ok_or(Error::OrderExceeded { index: n, order: self.order() })
    }

    pub fn truncate(&self, order: usize) -> Self {
        let keep = (order + 1).min(self.coeffs.len());
        TruncatedSeries { m: self.m, coeffs: self.coeffs[..keep].to_vec() }
    }

    fn zip<F>(&self, rhs: &Self, f: F) -> Self
    where
        F: Fn(&CyclotomicNumber, &CyclotomicNumber) -> CyclotomicNumber,
    {
        let coeffs: Vec<_> = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| f(a, b)).collect();
        TruncatedSeries::new(coeffs).expect("nonempty")
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.zip(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.zip(rhs, |a, b| a - b)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let n = self.order().min(rhs.order());
        let coeffs = (0..=n)
            .map(|k| {
                let mut acc = CyclotomicNumber::zero(lcm(self.m, rhs.m)).unwrap();
                for i in 0..=k {
                    let (a, b) = (&self.coeffs[i], &rhs.coeffs[k - i]);
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &(a * b);
                    }
                }
                acc
            })
            .collect();
        TruncatedSeries::new(coeffs).expect("nonempty")
    }

    /// Quotient `self / rhs`; fails when the constant term of `rhs` is zero.
    pub fn div(&self, rhs: &Self) -> Result<Self> {
        self.div_named(rhs, "divisor")
    }

    /// Like [`div`](Self::div), naming the divisor in the error.
    pub fn div_named(&self, rhs: &Self, name: &str) -> Result<Self> {
        if rhs.coeffs[0].is_zero() {
            return Err(Error::NonUnitConstantTerm(name.to_string()));
        }
        let inv0 = rhs.coeffs[0].inv()?;
        let n = self.order().min(rhs.order());
        let mut q: Vec<CyclotomicNumber> = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let mut acc = self.coeffs[k].clone();
            for i in 0..k {
                let b = &rhs.coeffs[k - i];
                if !b.is_zero() && !q[i].is_zero() {
                    acc = &acc - &(&q[i] * b);
                }
            }
            q.push(&acc * &inv0);
        }
        TruncatedSeries::new(q)
    }

    pub fn scale(&self, c: &CyclotomicNumber) -> Self {
        TruncatedSeries::new(self.coeffs.iter().map(|a| a * c).collect()).expect("nonempty")
    }

    pub fn scale_rational(&self, q: &Rational) -> Self {
        TruncatedSeries { m: self.m, coeffs: self.coeffs.iter().map(|a| a.scale(q)).collect() }
    }

    /// Multiplies by `t^k`, keeping the order.
    pub fn shift(&self, k: usize) -> Self {
        let zero = CyclotomicNumber::zero(self.m).unwrap();
        let coeffs = (0..self.coeffs.len())
            .map(|i| if i < k { zero.clone() } else { self.coeffs[i - k].clone() })
            .collect();
        TruncatedSeries { m: self.m, coeffs }
    }

    /// Substitutes `t ↦ w t`.
    pub fn scale_variable(&self, w: &Rational) -> Self {
        let mut p = Rational::ONE;
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| {
                let out = a.scale(&p);
                p = &p * w;
                out
            })
            .collect();
        TruncatedSeries { m: self.m, coeffs }
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::constant(&CyclotomicNumber::one(self.m).unwrap(), self.order());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// `n! c_n` for every `n` up to the order.
    pub fn egf_coefficients(&self) -> Vec<CyclotomicNumber> {
        let mut f = IBig::ONE;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| {
                if n > 0 {
                    f *= IBig::from(n);
                }
                c.scale_int(&f)
            })
            .collect()
    }
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, c) in self.coeffs.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c}) t^{n}")?;
        }
        write!(f, " + O(t^{})", self.coeffs.len())
    }
}

/// `e^{c t} = Σ c^n t^n / n!` to order `order`.
pub fn exp_linear(c: &CyclotomicNumber, order: usize) -> TruncatedSeries {
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut term = CyclotomicNumber::one(c.conductor()).unwrap();
    for n in 0..=order {
        if n > 0 {
            term = (&term * c).scale(&Rational::new(1, n as i64));
        }
        coeffs.push(term.clone());
    }
    TruncatedSeries { m: c.conductor(), coeffs }
}

/// `e^{q t}` for a rational `q`, in `Q(ζ_m)`.
pub fn exp_rational(q: &Rational, m: u64, order: usize) -> TruncatedSeries {
    exp_linear(&CyclotomicNumber::from_rational(m, q).unwrap(), order)
}

/// `n! · [t^n] s`.
pub fn egf_coefficient(s: &TruncatedSeries, n: usize) -> Result<CyclotomicNumber> {
    Ok(s.coeff(n)?.scale_int(&factorial(n)))
}
