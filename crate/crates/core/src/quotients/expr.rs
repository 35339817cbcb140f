//! Structural descriptors for the finite sums that make up expansion forms
//! and theorem sides.
//!
//! An [`Expression`] stands for the sequence (over `n`)
//!
//! ```text
//! P(w)^n Σ_{a_1 < d U_1(w)} … χ(a_1) ξ^{a_1 V_1(w)} …
//!        Σ_{k_1 + … + k_s = n} C(n; k_1, …, k_s) Π_i slot_i(k_i) · scale_i(w)^{k_i}
//! ```
//!
//! where each slot is either a twisted Bernoulli polynomial
//! `B_{k,χ,ξ^{W(w)}}(c(w) y_v + Σ q_j(w) a_j)` or a power sum
//! `S_k(d U(w) - 1; χ, ξ^{W(w)})`. Every `w`-dependence is a [`Mono`].

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::Rational;

/// A Laurent monomial `w1^a w2^b w3^c`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Mono(pub [i32; 3]);

impl Mono {
    pub const ONE: Mono = Mono([0, 0, 0]);

    pub const fn var(i: usize) -> Mono {
        let mut e = [0; 3];
        e[i] = 1;
        Mono(e)
    }

    pub fn mul(self, rhs: Mono) -> Mono {
        Mono([self.0[0] + rhs.0[0], self.0[1] + rhs.0[1], self.0[2] + rhs.0[2]])
    }

    pub fn div(self, rhs: Mono) -> Mono {
        Mono([self.0[0] - rhs.0[0], self.0[1] - rhs.0[1], self.0[2] - rhs.0[2]])
    }

    pub fn degree(self) -> i32 {
        self.0.iter().sum()
    }

    /// Renames `w_i` to `w_{sigma[i]}`.
    pub fn permute(self, sigma: &[usize]) -> Mono {
        let mut e = [0; 3];
        for (i, &x) in self.0.iter().enumerate() {
            if x != 0 {
                e[sigma[i]] += x;
            }
        }
        Mono(e)
    }

    /// Substitutes `w_i ↦ images[i]`.
    pub fn substitute(self, images: &[Mono; 3]) -> Mono {
        let mut out = Mono::ONE;
        for (i, &x) in self.0.iter().enumerate() {
            for _ in 0..x.abs() {
                out = if x > 0 { out.mul(images[i]) } else { out.div(images[i]) };
            }
        }
        out
    }

    pub fn eval(self, w: &[u64]) -> Result<Rational> {
        let mut acc = Rational::ONE;
        for (i, &x) in self.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            let wi = *w.get(i).ok_or_else(|| Error::Precondition(format!("w{} is not set", i + 1)))?;
            if wi == 0 {
                return Err(Error::Precondition(format!("w{} must be positive", i + 1)));
            }
            acc = &acc * &Rational::from_int(wi as i64).pow(x as i64)?;
        }
        Ok(acc)
    }

    /// Value at `w` as an integer; fails for non-integral values.
    pub fn eval_int(self, w: &[u64]) -> Result<i64> {
        let v = self.eval(w)?;
        if !v.is_integer() {
            return Err(Error::Precondition(format!("{self} is not an integer at w = {w:?}")));
        }
        i64::try_from(v.numer()).map_err(|_| Error::Precondition(format!("{self} overflows")))
    }
}

impl fmt::Display for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let part = |sign: i32| {
            let mut s = String::new();
            for (i, &x) in self.0.iter().enumerate() {
                let x = x * sign;
                if x > 0 {
                    s.push_str(&format!("w{}", i + 1));
                    if x > 1 {
                        s.push_str(&format!("^{x}"));
                    }
                }
            }
            s
        };
        let (num, den) = (part(1), part(-1));
        let num = if num.is_empty() { "1".to_string() } else { num };
        if den.is_empty() {
            write!(f, "{num}")
        } else {
            write!(f, "{num}/{den}")
        }
    }
}

impl Serialize for Mono {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Argument `c y_v + Σ q_j a_j` of a Bernoulli slot.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Arg {
    /// `(v, c)`: the y-variable index and its coefficient.
    pub y: Option<(usize, Mono)>,
    /// `(j, q_j)`: outer summation index and its coefficient.
    pub shifts: Vec<(usize, Mono)>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub enum Slot {
    /// `B_{k,χ,ξ^W}(arg) · scale^k`.
    Bernoulli { twist: Mono, arg: Arg, scale: Mono },
    /// `S_k(d·upper - 1; χ, ξ^W) · scale^k`.
    PowerSum { upper: Mono, twist: Mono, scale: Mono },
}

impl Slot {
    pub fn scale(&self) -> Mono {
        match self {
            Slot::Bernoulli { scale, .. } | Slot::PowerSum { scale, .. } => *scale,
        }
    }

    fn scale_mut(&mut self) -> &mut Mono {
        match self {
            Slot::Bernoulli { scale, .. } | Slot::PowerSum { scale, .. } => scale,
        }
    }

    pub fn twist(&self) -> Mono {
        match self {
            Slot::Bernoulli { twist, .. } | Slot::PowerSum { twist, .. } => *twist,
        }
    }

    fn twist_mut(&mut self) -> &mut Mono {
        match self {
            Slot::Bernoulli { twist, .. } | Slot::PowerSum { twist, .. } => twist,
        }
    }
}

/// `Σ_{a < d·upper} χ(a) ξ^{a·twist}`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct Outer {
    pub upper: Mono,
    pub twist: Mono,
}

/// How the compositions of `n` are weighted.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub enum Coefficient {
    Multinomial,
    /// The multinomial weight, except that the given composition gets
    /// `delta` added to it.
    Perturbed { composition: Vec<usize>, delta: i64 },
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Expression {
    pub label: String,
    pub prefactor: Mono,
    pub outers: Vec<Outer>,
    pub slots: Vec<Slot>,
    pub coefficient: Coefficient,
}

impl Expression {
    pub fn new(label: impl Into<String>, slots: Vec<Slot>) -> Self {
        Expression {
            label: label.into(),
            prefactor: Mono::ONE,
            outers: Vec::new(),
            slots,
            coefficient: Coefficient::Multinomial,
        }
    }

    pub fn with_prefactor(mut self, p: Mono) -> Self {
        self.prefactor = p;
        self
    }

    pub fn with_outer(mut self, upper: Mono, twist: Mono) -> Self {
        self.outers.push(Outer { upper, twist });
        self
    }

    pub fn relabel(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Product of the twist monomials of the Bernoulli slots.
    pub fn weight(&self) -> Mono {
        self.slots
            .iter()
            .filter(|s| matches!(s, Slot::Bernoulli { .. }))
            .fold(Mono::ONE, |acc, s| acc.mul(s.twist()))
    }

    /// Highest index of a y-variable used, plus one.
    pub fn y_count(&self) -> usize {
        self.slots
            .iter()
            .filter_map(|s| match s {
                Slot::Bernoulli { arg: Arg { y: Some((v, _)), .. }, .. } => Some(v + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// Applies `f` to every monomial; `g` to the ξ-exponents (slot and outer
    /// twists) and `h` to the slot scales instead.
    fn map_monos<F, G, H>(&self, f: F, g: G, h: H) -> Expression
    where
        F: Fn(Mono) -> Mono,
        G: Fn(Mono) -> Mono,
        H: Fn(Mono) -> Mono,
    {
        let mut out = self.clone();
        out.prefactor = f(out.prefactor);
        for o in &mut out.outers {
            o.upper = f(o.upper);
            o.twist = g(o.twist);
        }
        for s in &mut out.slots {
            *s.scale_mut() = h(s.scale());
            *s.twist_mut() = g(s.twist());
            match s {
                Slot::Bernoulli { arg, .. } => {
                    if let Some((_, c)) = &mut arg.y {
                        *c = f(*c);
                    }
                    for (_, q) in &mut arg.shifts {
                        *q = f(*q);
                    }
                }
                Slot::PowerSum { upper, .. } => *upper = f(*upper),
            }
        }
        out
    }

    /// Renames `w_i` to `w_{sigma[i]}` throughout.
    pub fn permute(&self, sigma: &[usize]) -> Expression {
        let p = |m: Mono| m.permute(sigma);
        self.map_monos(p, p, p)
    }

    /// Substitutes `w1, w2, w3 ↦ w2w3, w1w3, w1w2`, divides the whole
    /// expression by `(w1w2w3)^n` and then reads `ξ^{w1w2w3}` as `ξ`.
    pub fn pair_products_to_singletons(&self) -> Result<Expression> {
        let images = [Mono([0, 1, 1]), Mono([1, 0, 1]), Mono([1, 1, 0])];
        let p = Mono([1, 1, 1]);
        let out = self.map_monos(
            |m| m.substitute(&images),
            |m| m.substitute(&images).div(p),
            |m| m.substitute(&images).div(p),
        );
        let twists = out.outers.iter().map(|o| o.twist).chain(out.slots.iter().map(Slot::twist));
        for t in twists {
            if t.0.iter().any(|&x| x < 0) {
                return Err(Error::Unsupported(format!(
                    "ξ-exponent of {} is not divisible by w1w2w3",
                    self.label
                )));
            }
        }
        Ok(out)
    }
}

/// Shorthand constructors used by the form and theorem tables.
pub mod build {
    use super::*;

    pub const ONE: Mono = Mono::ONE;
    pub const W1: Mono = Mono([1, 0, 0]);
    pub const W2: Mono = Mono([0, 1, 0]);
    pub const W3: Mono = Mono([0, 0, 1]);
    pub const W12: Mono = Mono([1, 1, 0]);
    pub const W13: Mono = Mono([1, 0, 1]);
    pub const W23: Mono = Mono([0, 1, 1]);
    pub const W123: Mono = Mono([1, 1, 1]);

    /// `w_num / w_den` for variable indices starting at 1.
    pub const fn ratio(num: usize, den: usize) -> Mono {
        let mut e = [0; 3];
        e[num - 1] += 1;
        e[den - 1] -= 1;
        Mono(e)
    }

    /// `B_{k,χ,ξ^twist}(c y_v) · scale^k`; `v` counts from 1.
    pub fn b(twist: Mono, c: Mono, v: usize, scale: Mono) -> Slot {
        Slot::Bernoulli { twist, arg: Arg { y: Some((v - 1, c)), shifts: vec![] }, scale }
    }

    /// `B_{k,χ,ξ^twist}(c y_v + Σ q a_j) · scale^k`; outer indices count
    /// from 0.
    pub fn bs(twist: Mono, c: Mono, v: usize, shifts: &[(usize, Mono)], scale: Mono) -> Slot {
        Slot::Bernoulli { twist, arg: Arg { y: Some((v - 1, c)), shifts: shifts.to_vec() }, scale }
    }

    /// `S_k(d·upper - 1; χ, ξ^twist) · scale^k`.
    pub fn s(upper: Mono, twist: Mono, scale: Mono) -> Slot {
        Slot::PowerSum { upper, twist, scale }
    }
}
