//! Exact evaluation of [`Expression`]s on a grid of y-points.
//!
//! Each slot is first reduced to a table of polynomials in its own
//! y-variable (outer sums are folded into the one slot whose argument uses
//! them, through the moments `Σ_a χ(a) ξ^{aV} s(a)^p`). Slots sharing a
//! variable are multiplied as exponential generating functions pointwise;
//! the variables are then combined, computing only the coefficient of `n`
//! at the last step.

use std::collections::BTreeMap;

use dashu_int::IBig;

use super::expr::{Coefficient, Expression, Slot};
use crate::bernoulli::Setting;
use crate::error::{Error, Result};
use crate::exactnum::int::binomial;
use crate::exactnum::{CyclotomicNumber, Rational};

/// Points at which each y-variable is sampled. At order `n` only the first
/// `counts[n]` points of every variable are used.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct YGrid {
    pub points: Vec<Vec<Rational>>,
    pub counts: Vec<usize>,
}

impl YGrid {
    /// `n + 2` points `0, s, 2s, …` per variable at order `n`.
    pub fn arithmetic(vars: usize, n_max: usize, step: &Rational) -> Self {
        let pts: Vec<Rational> = (0..n_max as i64 + 2).map(|k| step * &Rational::from_int(k)).collect();
        YGrid { points: vec![pts; vars], counts: (0..=n_max).map(|n| n + 2).collect() }
    }

    /// One fixed point per variable.
    pub fn single(y: &[Rational], n_max: usize) -> Self {
        YGrid { points: y.iter().map(|v| vec![v.clone()]).collect(), counts: vec![1; n_max + 1] }
    }

    pub fn vars(&self) -> usize {
        self.points.len()
    }

    /// Number of points at order `n`.
    pub fn size(&self, n: usize) -> usize {
        self.counts[n].pow(self.vars() as u32)
    }

    /// Point indices at order `n`, in lexicographic order.
    pub fn indices(&self, n: usize) -> Vec<Vec<usize>> {
        let c = self.counts[n];
        let mut out = vec![vec![]];
        for _ in 0..self.vars() {
            out = out
                .into_iter()
                .flat_map(|p| {
                    (0..c).map(move |i| {
                        let mut p = p.clone();
                        p.push(i);
                        p
                    })
                })
                .collect();
        }
        out
    }

    pub fn point(&self, idx: &[usize]) -> Vec<Rational> {
        idx.iter().enumerate().map(|(v, &i)| self.points[v][i].clone()).collect()
    }
}

/// Values of one expression: `values[n][p]` at the `p`-th point of
/// [`YGrid::indices`]`(n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub values: Vec<Vec<CyclotomicNumber>>,
}

struct Binomials(Vec<Vec<IBig>>);

impl Binomials {
    fn new(n_max: usize) -> Self {
        Binomials((0..=n_max).map(|n| (0..=n).map(|k| binomial(n, k)).collect()).collect())
    }

    fn get(&self, n: usize, k: usize) -> &IBig {
        &self.0[n][k]
    }
}

// EGF product truncated at n_max.
fn egf_mul(a: &[CyclotomicNumber], b: &[CyclotomicNumber], bin: &Binomials, zero: &CyclotomicNumber) -> Vec<CyclotomicNumber> {
    let n_max = a.len().min(b.len()) - 1;
    (0..=n_max)
        .map(|n| {
            let mut acc = zero.clone();
            for k in 0..=n {
                if a[k].is_zero() || b[n - k].is_zero() {
                    continue;
                }
                let t = &a[k] * &b[n - k];
                acc = &acc + &t.scale_int(bin.get(n, k));
            }
            acc
        })
        .collect()
}

struct ResolvedOuter {
    count: u64,
    twist: i64,
}

// Σ over outer tuples of χ(a)ξ^{aV} s(a)^p, p = 0..=p_max.
fn moments(set: &Setting, outers: &[(&ResolvedOuter, Rational)], p_max: usize) -> Vec<CyclotomicNumber> {
    let mut bins: BTreeMap<u64, Vec<Rational>> = BTreeMap::new();
    let mut idx = vec![0u64; outers.len()];
    'walk: loop {
        let mut e = 0u64;
        let mut live = true;
        let mut s = Rational::ZERO;
        for ((o, q), &a) in outers.iter().zip(&idx) {
            match set.unit_exponent(a as i64, o.twist) {
                Some(x) => e += x,
                None => {
                    live = false;
                    break;
                }
            }
            s += &(q * &Rational::from_int(a as i64));
        }
        if live {
            let bin = bins
                .entry(e % set.conductor())
                .or_insert_with(|| vec![Rational::ZERO; p_max + 1]);
            let mut pw = Rational::ONE;
            for slot in bin.iter_mut() {
                *slot += &pw;
                pw = &pw * &s;
            }
        }
        for i in 0..idx.len() {
            idx[i] += 1;
            if idx[i] < outers[i].0.count {
                continue 'walk;
            }
            idx[i] = 0;
        }
        break;
    }
    (0..=p_max)
        .map(|p| {
            CyclotomicNumber::from_exponents(set.conductor(), bins.iter().map(|(e, v)| (*e as i64, &v[p]))).unwrap()
        })
        .collect()
}

// The slot as polys[k][j] = coefficient of y^j in slot(k)·scale^k.
struct SlotPoly {
    var: Option<usize>,
    polys: Vec<Vec<CyclotomicNumber>>,
}

impl SlotPoly {
    fn at(&self, k: usize, y: &Rational) -> CyclotomicNumber {
        let p = &self.polys[k];
        let mut acc = p.last().unwrap().clone();
        for c in p.iter().rev().skip(1) {
            acc = &acc.scale(y) + c;
        }
        acc
    }
}

fn resolve_slot(
    slot: &Slot,
    set: &Setting,
    w: &[u64],
    outers: &[ResolvedOuter],
    n_max: usize,
    bin: &Binomials,
) -> Result<SlotPoly> {
    let d = set.modulus();
    let zero = set.zero();
    match slot {
        Slot::PowerSum { upper, twist, scale } => {
            let u = upper.eval_int(w)?;
            if u < 1 {
                return Err(Error::Precondition(format!("power-sum bound {upper} must be positive")));
            }
            let sums = set.power_sums(d * u as u64 - 1, twist.eval_int(w)?, n_max);
            let s = scale.eval(w)?;
            let mut sp = Rational::ONE;
            let polys = (0..=n_max)
                .map(|k| {
                    let v = sums[k].scale(&sp);
                    sp = &sp * &s;
                    vec![v]
                })
                .collect();
            Ok(SlotPoly { var: None, polys })
        }
        Slot::Bernoulli { twist, arg, scale } => {
            let bern = set.bernoulli(twist.eval_int(w)?, n_max)?;
            let s = scale.eval(w)?;
            let (var, c) = match &arg.y {
                Some((v, c)) => (Some(*v), c.eval(w)?),
                None => (None, Rational::ZERO),
            };
            let mom = if arg.shifts.is_empty() {
                None
            } else {
                let refs: Vec<(&ResolvedOuter, Rational)> = arg
                    .shifts
                    .iter()
                    .map(|(j, q)| Ok((&outers[*j], q.eval(w)?)))
                    .collect::<Result<_>>()?;
                Some(moments(set, &refs, n_max))
            };
            let mut sp = Rational::ONE;
            let mut polys = Vec::with_capacity(n_max + 1);
            for k in 0..=n_max {
                let top = if var.is_some() { k } else { 0 };
                let mut coeffs = Vec::with_capacity(top + 1);
                let mut cj = Rational::ONE;
                for j in 0..=top {
                    let v = match &mom {
                        // only i = k - j survives when there are no shifts
                        None => bern[k - j].scale_int(bin.get(k, j)),
                        Some(m) => {
                            let mut acc = zero.clone();
                            for i in 0..=k - j {
                                if bern[i].is_zero() || m[k - i - j].is_zero() {
                                    continue;
                                }
                                let f = bin.get(k, i) * bin.get(k - i, j);
                                acc = &acc + &(&bern[i] * &m[k - i - j]).scale_int(&f);
                            }
                            acc
                        }
                    };
                    coeffs.push(v.scale(&(&cj * &sp)));
                    cj = &cj * &c;
                }
                polys.push(coeffs);
                sp = &sp * &s;
            }
            Ok(SlotPoly { var, polys })
        }
    }
}

/// Evaluates `expr` for `n = 0..=n_max` at every point of `ys`.
pub fn evaluate(expr: &Expression, set: &Setting, w: &[u64], n_max: usize, ys: &YGrid) -> Result<Table> {
    let d = set.modulus() as i64;
    let nvars = ys.vars();
    let bin = Binomials::new(n_max);
    let zero = set.zero();
    let one = CyclotomicNumber::one(set.conductor())?;

    let outers: Vec<ResolvedOuter> = expr
        .outers
        .iter()
        .map(|o| {
            let u = o.upper.eval_int(w)?;
            if u < 1 {
                return Err(Error::Precondition(format!("summation bound {} must be positive", o.upper)));
            }
            Ok(ResolvedOuter { count: (d * u) as u64, twist: o.twist.eval_int(w)? })
        })
        .collect::<Result<_>>()?;

    let mut owner: Vec<Option<usize>> = vec![None; outers.len()];
    for (si, slot) in expr.slots.iter().enumerate() {
        if let Slot::Bernoulli { arg, .. } = slot {
            for (j, _) in &arg.shifts {
                let o = owner.get_mut(*j).ok_or_else(|| Error::Unsupported(format!("no outer sum {j}")))?;
                if o.is_some_and(|x| x != si) {
                    return Err(Error::Unsupported(format!(
                        "outer sum {j} of {} feeds more than one slot",
                        expr.label
                    )));
                }
                *o = Some(si);
            }
        }
    }
    // outer sums no slot depends on are plain factors
    let mut konst = one.clone();
    for (j, o) in outers.iter().enumerate() {
        if owner[j].is_none() {
            konst = &konst * &moments(set, &[(o, Rational::ZERO)], 0)[0];
        }
    }

    let slots: Vec<SlotPoly> = expr
        .slots
        .iter()
        .map(|s| resolve_slot(s, set, w, &outers, n_max, &bin))
        .collect::<Result<_>>()?;
    for s in &slots {
        if let Some(v) = s.var {
            if v >= nvars {
                return Err(Error::Precondition(format!("{} uses y{} but only {nvars} given", expr.label, v + 1)));
            }
        }
    }

    // slot values at each point of its variable: vals[slot][point][k]
    let cmax = ys.counts.iter().copied().max().unwrap_or(1);
    let vals: Vec<Vec<Vec<CyclotomicNumber>>> = slots
        .iter()
        .map(|s| match s.var {
            None => vec![(0..=n_max).map(|k| s.polys[k][0].clone()).collect()],
            Some(v) => (0..cmax)
                .map(|p| (0..=n_max).map(|k| s.at(k, &ys.points[v][p])).collect())
                .collect(),
        })
        .collect();

    let mut constant: Vec<CyclotomicNumber> = (0..=n_max).map(|k| if k == 0 { konst.clone() } else { zero.clone() }).collect();
    for (s, v) in slots.iter().zip(&vals) {
        if s.var.is_none() {
            constant = egf_mul(&constant, &v[0], &bin, &zero);
        }
    }
    let used: Vec<usize> = (0..nvars).filter(|v| slots.iter().any(|s| s.var == Some(*v))).collect();
    // per used variable: g[point][k]
    let g: Vec<Vec<Vec<CyclotomicNumber>>> = used
        .iter()
        .map(|&v| {
            (0..cmax)
                .map(|p| {
                    let mut acc: Option<Vec<CyclotomicNumber>> = None;
                    for (s, sv) in slots.iter().zip(&vals) {
                        if s.var == Some(v) {
                            acc = Some(match acc {
                                None => sv[p].clone(),
                                Some(a) => egf_mul(&a, &sv[p], &bin, &zero),
                            });
                        }
                    }
                    acc.unwrap()
                })
                .collect()
        })
        .collect();

    // rest[q] for q indexing points of used[1..] (lexicographic, cmax each)
    let rest_dims = used.len().saturating_sub(1);
    let mut rest: Vec<Vec<CyclotomicNumber>> = vec![constant];
    for gv in g.iter().skip(1) {
        let (bin, zero) = (&bin, &zero);
        rest = rest
            .iter()
            .flat_map(|r| gv.iter().map(move |x| egf_mul(r, x, bin, zero)))
            .collect();
    }

    let prefactor = expr.prefactor.eval(w)?;
    let mut values = Vec::with_capacity(n_max + 1);
    let mut pn = Rational::ONE;
    for n in 0..=n_max {
        let mut row = Vec::with_capacity(ys.size(n));
        for idx in ys.indices(n) {
            let v = if used.is_empty() {
                rest[0][n].clone()
            } else {
                let first = &g[0][idx[used[0]]];
                let mut q = 0;
                for &u in &used[1..] {
                    q = q * cmax + idx[u];
                }
                debug_assert!(q < cmax.pow(rest_dims as u32));
                let r = &rest[q];
                let mut acc = zero.clone();
                for k in 0..=n {
                    if first[k].is_zero() || r[n - k].is_zero() {
                        continue;
                    }
                    acc = &acc + &(&first[k] * &r[n - k]).scale_int(bin.get(n, k));
                }
                acc
            };
            row.push(v.scale(&pn));
        }
        values.push(row);
        pn = &pn * &prefactor;
    }

    if let Coefficient::Perturbed { composition, delta } = &expr.coefficient {
        if composition.len() != slots.len() {
            return Err(Error::Precondition("perturbed composition has the wrong length".into()));
        }
        let n: usize = composition.iter().sum();
        if n <= n_max {
            let scale = prefactor.pow(n as i64)?;
            for (row, idx) in values[n].iter_mut().zip(ys.indices(n)) {
                let mut term = konst.clone();
                for ((s, sv), &k) in slots.iter().zip(&vals).zip(composition) {
                    let p = s.var.map_or(0, |v| idx[v]);
                    term = &term * &sv[p][k];
                }
                *row = &*row + &term.scale(&(&scale * &Rational::from_int(*delta)));
            }
        }
    }
    Ok(Table { values })
}
