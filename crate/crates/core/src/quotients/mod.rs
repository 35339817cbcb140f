//! Closed-form quotient series and their structured expansions.
//!
//! Each [`QuotientType`] has a closed-form generating function built from
//!
//! ```text
//! A(W) = Σ_{a<d} χ(a) ξ^{Wa} e^{aWt},    D(W) = ξ^{Wd} e^{dWt} - 1,
//! ```
//!
//! and one or more [`ExpansionForm`]s, finite sums of products of twisted
//! Bernoulli polynomials and power sums. A form's values equal its
//! [`weight`](Expression::weight) times the EGF coefficients of the closed
//! form; [`consistency_check`] verifies this.

pub mod eval;
pub mod expr;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::bernoulli::Setting;
use crate::error::{Error, Result};
use crate::exactnum::{CyclotomicNumber, Rational};
use crate::series::{egf_coefficient, exp_rational, TruncatedSeries};
use eval::{evaluate, YGrid};
use expr::build::*;
use expr::{Expression, Mono};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Gamma,
    L23,
    L13,
    L12,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuotientType {
    pub family: Family,
    pub index: u8,
}

impl QuotientType {
    pub fn new(family: Family, index: u8) -> Result<Self> {
        let max = match family {
            Family::Gamma => 2,
            Family::L23 | Family::L13 => 3,
            Family::L12 => 1,
        };
        if index > max {
            return Err(Error::Parse(format!("no quotient type {family:?} with index {index}")));
        }
        Ok(QuotientType { family, index })
    }

    /// Every type, in display order.
    pub fn all() -> Vec<QuotientType> {
        let mut out = Vec::new();
        for (f, max) in [(Family::Gamma, 2), (Family::L23, 3), (Family::L13, 3), (Family::L12, 1)] {
            for i in 0..=max {
                out.push(QuotientType { family: f, index: i });
            }
        }
        out
    }

    /// Length of the w-tuple.
    pub fn arity(&self) -> usize {
        if self.family == Family::Gamma {
            2
        } else {
            3
        }
    }

    pub fn y_count(&self) -> usize {
        let i = self.index as usize;
        match self.family {
            Family::Gamma => 2 - i,
            Family::L23 | Family::L13 => 3 - i,
            Family::L12 => 1 - i,
        }
    }

    /// Monomials that `r` must not divide.
    pub fn conditions(&self) -> Vec<Mono> {
        let (f, i) = (self.family, self.index);
        match (f, i) {
            (Family::Gamma, 0) => vec![W1, W2],
            (Family::Gamma, _) => vec![W12],
            (Family::L23, 0) => vec![W23, W13, W12],
            (Family::L13, 0) | (Family::L12, 0) => vec![W1, W2, W3],
            (Family::L23 | Family::L13, _) => vec![W123],
            (Family::L12, _) => vec![W23, W13, W12],
        }
    }

    /// Checks `gcd(r, d) = 1` and the divisibility conditions at `w`.
    pub fn check(&self, set: &Setting, w: &[u64]) -> Result<()> {
        check_conditions(&self.conditions(), set, w, self.arity())
    }
}

/// Fails with a message naming the first violated condition.
pub fn check_conditions(conds: &[Mono], set: &Setting, w: &[u64], arity: usize) -> Result<()> {
    if w.len() != arity {
        return Err(Error::Precondition(format!("expected {arity} w-values, got {}", w.len())));
    }
    if w.iter().any(|&x| x == 0) {
        return Err(Error::Precondition("w-values must be positive".into()));
    }
    let r = set.twist().r;
    if !set.coprime() {
        return Err(Error::Precondition(format!("gcd(r, d) = gcd({r}, {}) is not 1", set.modulus())));
    }
    for c in conds {
        let v = c.eval_int(w)?;
        if v % r as i64 == 0 {
            return Err(Error::Precondition(format!("r = {r} divides {c} = {v}")));
        }
    }
    Ok(())
}

impl fmt::Display for QuotientType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Gamma => write!(f, "G{}", self.index),
            Family::L23 => write!(f, "L23:{}", self.index),
            Family::L13 => write!(f, "L13:{}", self.index),
            Family::L12 => write!(f, "L12:{}", self.index),
        }
    }
}

impl FromStr for QuotientType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unknown quotient type {s:?}"));
        let (family, idx) = if let Some(i) = s.strip_prefix('G') {
            (Family::Gamma, i)
        } else {
            let (fam, i) = s.split_once(':').ok_or_else(bad)?;
            let fam = match fam {
                "L23" => Family::L23,
                "L13" => Family::L13,
                "L12" => Family::L12,
                _ => return Err(bad()),
            };
            (fam, i)
        };
        QuotientType::new(family, idx.parse().map_err(|_| bad())?)
    }
}

impl Serialize for QuotientType {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

struct Builder<'a> {
    set: &'a Setting,
    w: &'a [u64],
    order: usize,
}

impl Builder<'_> {
    fn val(&self, m: Mono) -> Result<i64> {
        m.eval_int(self.w)
    }

    fn a(&self, m: Mono) -> Result<TruncatedSeries> {
        let v = self.val(m)?;
        Ok(self.set.character_exponential_sum(self.set.modulus(), v, &Rational::from_int(v), self.order))
    }

    fn d(&self, m: Mono) -> Result<TruncatedSeries> {
        let v = self.val(m)?;
        Ok(self.set.shifted_exponential(self.set.modulus() as i64, v, &Rational::from_int(v), self.order))
    }

    fn e(&self, c: &Rational) -> TruncatedSeries {
        exp_rational(c, self.set.conductor(), self.order)
    }

    fn quotient(&self, num: TruncatedSeries, dens: &[Mono]) -> Result<TruncatedSeries> {
        let mut acc = num;
        for &m in dens {
            let name = format!("ξ^{{{m} d}} e^{{{m} d t}} - 1 at {m} = {}", self.val(m)?);
            acc = acc.div_named(&self.d(m)?, &name)?;
        }
        Ok(acc)
    }
}

/// The closed-form series of `qt` at `w` and the y-values `y`, to order
/// `order`.
pub fn closed_form_series(
    qt: QuotientType,
    set: &Setting,
    w: &[u64],
    y: &[Rational],
    order: usize,
) -> Result<TruncatedSeries> {
    if w.len() != qt.arity() {
        return Err(Error::Precondition(format!("{qt} takes {} w-values", qt.arity())));
    }
    if y.len() != qt.y_count() {
        return Err(Error::Precondition(format!("{qt} takes {} y-values", qt.y_count())));
    }
    let b = Builder { set, w, order };
    let m = set.conductor();
    let one = TruncatedSeries::constant(&CyclotomicNumber::one(m)?, order);
    let t = TruncatedSeries::variable(m, order)?;
    let ysum = y.iter().fold(Rational::ZERO, |acc, v| &acc + v);
    let i = qt.index as usize;
    let product = |ms: &[Mono], f: &dyn Fn(Mono) -> Result<TruncatedSeries>| -> Result<TruncatedSeries> {
        ms.iter().try_fold(one.clone(), |acc, &m| Ok(acc.mul(&f(m)?)))
    };
    let (num, dens): (TruncatedSeries, Vec<Mono>) = match qt.family {
        Family::Gamma => {
            let num = t
                .pow(2 - i)
                .mul(&b.e(&(&ysum * &W12.eval(w)?)))
                .mul(&b.d(W12)?.pow(i))
                .mul(&product(&[W1, W2], &|m| b.a(m))?);
            (num, vec![W1, W2])
        }
        Family::L23 | Family::L13 => {
            let singles = qt.family == Family::L13;
            let ms = if singles { [W1, W2, W3] } else { [W23, W13, W12] };
            let num = t
                .pow(3 - i)
                .mul(&b.e(&(&ysum * &W123.eval(w)?)))
                .mul(&b.d(W123)?.pow(i))
                .mul(&product(&ms, &|m| b.a(m))?);
            (num, ms.to_vec())
        }
        Family::L12 => {
            let a3 = product(&[W1, W2, W3], &|m| b.a(m))?;
            let num = if i == 0 {
                let c = [W23, W13, W12].iter().try_fold(Rational::ZERO, |acc, m| Ok::<_, Error>(&acc + &m.eval(w)?))?;
                t.pow(3).mul(&b.e(&(&c * &ysum))).mul(&a3)
            } else {
                product(&[W23, W13, W12], &|m| b.d(m))?.mul(&a3)
            };
            (num, vec![W1, W2, W3])
        }
    };
    b.quotient(num, &dens)
}

/// One structured expansion of a quotient type.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExpansionForm {
    pub qtype: QuotientType,
    pub expr: Expression,
}

impl ExpansionForm {
    pub fn name(&self) -> &str {
        &self.expr.label
    }

    pub fn weight(&self) -> Mono {
        self.expr.weight()
    }
}

fn l23_forms(i: u8) -> Vec<Expression> {
    let f1 = |rest: Vec<expr::Slot>| {
        let mut slots = vec![b(W23, W1, 1, W23), b(W13, W2, 2, W13), b(W12, W3, 3, W12)];
        slots.truncate(3 - rest.len());
        slots.extend(rest);
        slots
    };
    match i {
        0 => vec![Expression::new("F1", f1(vec![]))],
        1 => vec![
            Expression::new("F1", f1(vec![s(W3, W12, W12)])),
            Expression::new("F2", vec![b(W23, W1, 1, W2), bs(W13, W2, 2, &[(0, ratio(2, 3))], W1)])
                .with_prefactor(W3)
                .with_outer(W3, W12),
        ],
        2 => vec![
            Expression::new("F1", f1(vec![s(W2, W13, W13), s(W3, W12, W12)])),
            Expression::new("F2", vec![bs(W23, W1, 1, &[(0, ratio(1, 2))], W3), s(W3, W12, W1)])
                .with_prefactor(W2)
                .with_outer(W2, W13),
            Expression::new("F3", vec![bs(W23, W1, 1, &[(0, ratio(1, 2)), (1, ratio(1, 3))], ONE)])
                .with_prefactor(W23)
                .with_outer(W2, W13)
                .with_outer(W3, W12),
        ],
        _ => vec![Expression::new("F1", vec![s(W1, W23, W23), s(W2, W13, W13), s(W3, W12, W12)])],
    }
}

/// Every expansion form of `qt`.
pub fn expansion_forms(qt: QuotientType) -> Result<Vec<ExpansionForm>> {
    let exprs = match (qt.family, qt.index) {
        (Family::Gamma, 0) => vec![Expression::new("F1", vec![b(W1, W2, 1, W1), b(W2, W1, 2, W2)])],
        (Family::Gamma, 1) => vec![
            Expression::new("F1", vec![b(W1, W2, 1, W1), s(W1, W2, W2)]),
            Expression::new("F2", vec![bs(W1, W2, 1, &[(0, ratio(2, 1))], ONE)])
                .with_prefactor(W1)
                .with_outer(W1, W2),
        ],
        (Family::Gamma, _) => vec![Expression::new("F1", vec![s(W2, W1, W1), s(W1, W2, W2)])],
        (Family::L23, i) => l23_forms(i),
        (Family::L13, i) => l23_forms(i)
            .iter()
            .map(Expression::pair_products_to_singletons)
            .collect::<Result<_>>()?,
        (Family::L12, 0) => vec![Expression::new("F1", vec![b(W1, W2, 1, W1), b(W2, W3, 1, W2), b(W3, W1, 1, W3)])],
        (Family::L12, _) => vec![Expression::new("F1", vec![s(W2, W1, W1), s(W3, W2, W2), s(W1, W3, W3)])],
    };
    Ok(exprs
        .into_iter()
        .map(|e| {
            let label = format!("{qt}/{}", e.label);
            ExpansionForm { qtype: qt, expr: e.relabel(label) }
        })
        .collect())
}

/// Looks a form up by name, e.g. `G1/F2`.
pub fn find_form(name: &str) -> Result<ExpansionForm> {
    let (qt, _) = name.split_once('/').ok_or_else(|| Error::Parse(format!("bad form name {name:?}")))?;
    expansion_forms(qt.parse()?)?
        .into_iter()
        .find(|f| f.name() == name)
        .ok_or_else(|| Error::Parse(format!("no form {name:?}")))
}

/// The weight monomial of a form, evaluated at `w`.
pub fn form_weight(form: &ExpansionForm, w: &[u64]) -> Result<Rational> {
    form.weight().eval(w)
}

/// Values of `form` for `n = 0..=n_max` at one y-point.
pub fn expansion_coefficients(
    form: &ExpansionForm,
    set: &Setting,
    w: &[u64],
    y: &[Rational],
    n_max: usize,
) -> Result<Vec<CyclotomicNumber>> {
    let table = evaluate(&form.expr, set, w, n_max, &YGrid::single(y, n_max))?;
    Ok(table.values.into_iter().map(|mut row| row.swap_remove(0)).collect())
}

/// First index where a form and its weighted closed form disagree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub n: usize,
    pub expansion: CyclotomicNumber,
    pub weighted_closed_form: CyclotomicNumber,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FormCheck {
    pub form: String,
    pub weight: Mono,
    pub mismatch: Option<Mismatch>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConsistencyReport {
    pub qtype: QuotientType,
    pub w: Vec<u64>,
    pub y: Vec<Rational>,
    pub n_max: usize,
    pub closed_form: Vec<CyclotomicNumber>,
    pub forms: Vec<FormCheck>,
}

impl ConsistencyReport {
    pub fn pass(&self) -> bool {
        self.forms.iter().all(|f| f.mismatch.is_none())
    }
}

/// Compares every form of `qt` with `weight × closed form` for `n ≤ n_max`.
/// `weight_override` replaces every form's weight (for mutation controls).
pub fn consistency_check(
    qt: QuotientType,
    set: &Setting,
    w: &[u64],
    y: &[Rational],
    n_max: usize,
    weight_override: Option<&Rational>,
) -> Result<ConsistencyReport> {
    qt.check(set, w)?;
    let series = closed_form_series(qt, set, w, y, n_max)?;
    let closed: Vec<_> = (0..=n_max).map(|n| egf_coefficient(&series, n)).collect::<Result<_>>()?;
    let mut forms = Vec::new();
    for form in expansion_forms(qt)? {
        let weight = match weight_override {
            Some(q) => q.clone(),
            None => form_weight(&form, w)?,
        };
        let got = expansion_coefficients(&form, set, w, y, n_max)?;
        let mismatch = got.iter().zip(&closed).enumerate().find_map(|(n, (g, c))| {
            let want = c.scale(&weight);
            (*g != want).then(|| Mismatch { n, expansion: g.clone(), weighted_closed_form: want })
        });
        forms.push(FormCheck { form: form.name().to_string(), weight: form.weight(), mismatch });
    }
    Ok(ConsistencyReport { qtype: qt, w: w.to_vec(), y: y.to_vec(), n_max, closed_form: closed, forms })
}
