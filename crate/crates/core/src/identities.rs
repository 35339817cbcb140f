//! The symmetry theorems, their verification, and grid audits.
//!
//! Every theorem is a list of [`Side`]s that the source asserts are equal.
//! Each side carries a weight monomial (the product of its Bernoulli twist
//! scales). Sides are compared either as stated or after division by their
//! weights; the latter is what the quotient closed forms actually support.
//! Sides with equal weights form an orbit and agree in both modes.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bernoulli::{Setting, TwistSpec};
use crate::dirichlet::{all_characters, DirichletCharacter};
use crate::error::{Error, Result};
use crate::exactnum::int::gcd;
use crate::exactnum::{CyclotomicNumber, Rational};
use crate::quotients::check_conditions;
use crate::quotients::eval::{evaluate, Table, YGrid};
use crate::quotients::expr::build::*;
use crate::quotients::expr::{Coefficient, Expression, Mono, Slot};

/// One displayed expression of a theorem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Side {
    pub expr: Expression,
    pub weight: Mono,
}

impl Side {
    fn new(expr: Expression) -> Self {
        let weight = expr.weight();
        Side { expr, weight }
    }

    pub fn label(&self) -> &str {
        &self.expr.label
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theorem {
    pub id: u8,
    pub arity: usize,
    /// Monomials that `r` must not divide.
    pub conditions: Vec<Mono>,
    pub sides: Vec<Side>,
}

impl Theorem {
    fn new(id: u8, arity: usize, conditions: Vec<Mono>, sides: Vec<(&str, Expression)>) -> Self {
        let sides = sides
            .into_iter()
            .map(|(tag, e)| Side::new(e.relabel(format!("T{id}.{tag}"))))
            .collect();
        Theorem { id, arity, conditions, sides }
    }

    pub fn y_vars(&self) -> usize {
        self.sides.iter().map(|s| s.expr.y_count()).max().unwrap_or(0)
    }

    pub fn check(&self, set: &Setting, w: &[u64]) -> Result<()> {
        check_conditions(&self.conditions, set, w, self.arity)
    }

    /// Side indices grouped by weight, in order of first appearance.
    pub fn orbits(&self) -> Vec<(Mono, Vec<usize>)> {
        let mut out: Vec<(Mono, Vec<usize>)> = Vec::new();
        for (i, s) in self.sides.iter().enumerate() {
            match out.iter_mut().find(|(m, _)| *m == s.weight) {
                Some((_, v)) => v.push(i),
                None => out.push((s.weight, vec![i])),
            }
        }
        out
    }
}

fn th4_side(order: [(Mono, Mono); 3]) -> Expression {
    let slots = order.iter().enumerate().map(|(v, &(t, c))| b(t, c, v + 1, t)).collect();
    Expression::new("", slots)
}

fn th5_side(b1: (Mono, Mono), b2: (Mono, Mono), s1: (Mono, Mono)) -> Expression {
    Expression::new("", vec![b(b1.0, b1.1, 1, b1.0), b(b2.0, b2.1, 2, b2.0), s(s1.0, s1.1, s1.1)])
}

// pref P; outer (P, T); B(t1, c1 y1) at scale s1; B(t2, c2 y2 + q a) at scale s2
fn th6_side(p: Mono, t: Mono, b1: (Mono, Mono, Mono), b2: (Mono, Mono, Mono, Mono)) -> Expression {
    Expression::new("", vec![b(b1.0, b1.1, 1, b1.2), bs(b2.0, b2.1, 2, &[(0, b2.2)], b2.3)])
        .with_prefactor(p)
        .with_outer(p, t)
}

fn th7_side(b1: (Mono, Mono), s1: (Mono, Mono), s2: (Mono, Mono)) -> Expression {
    Expression::new("", vec![b(b1.0, b1.1, 1, b1.0), s(s1.0, s1.1, s1.1), s(s2.0, s2.1, s2.1)])
}

// pref P; outer (P, T); B(t, c y1 + q a) at scale sb; S(u, tw) at scale ss
fn th8_side(p: Mono, t: Mono, bb: (Mono, Mono, Mono, Mono), ss: (Mono, Mono, Mono)) -> Expression {
    Expression::new("", vec![bs(bb.0, bb.1, 1, &[(0, bb.2)], bb.3), s(ss.0, ss.1, ss.2)])
        .with_prefactor(p)
        .with_outer(p, t)
}

fn th9_side(p: Mono, o1: (Mono, Mono), o2: (Mono, Mono), bb: (Mono, Mono, Mono, Mono)) -> Expression {
    Expression::new("", vec![bs(bb.0, bb.1, 1, &[(0, bb.2), (1, bb.3)], ONE)])
        .with_prefactor(p)
        .with_outer(o1.0, o1.1)
        .with_outer(o2.0, o2.1)
}

fn th11_side(slots: [(Mono, Mono); 3]) -> Expression {
    Expression::new("", slots.iter().map(|&(u, t)| s(u, t, t)).collect())
}

/// Theorem `id`, for `id` in `1..=11`.
pub fn theorem(id: u8) -> Result<Theorem> {
    let pairs = vec![W23, W13, W12];
    let singles = vec![W1, W2, W3];
    let th = match id {
        1 => Theorem::new(
            1,
            2,
            vec![W1, W2],
            vec![
                ("L", Expression::new("", vec![b(W1, W2, 1, W1), b(W2, W1, 2, W2)])),
                ("R", Expression::new("", vec![b(W2, W1, 1, W2), b(W1, W2, 2, W1)])),
            ],
        ),
        2 => Theorem::new(
            2,
            2,
            vec![W12],
            vec![
                ("L", Expression::new("", vec![b(W1, W2, 1, W1), s(W1, W2, W2)])),
                ("R", Expression::new("", vec![b(W2, W1, 1, W2), s(W2, W1, W1)])),
            ],
        ),
        3 => Theorem::new(
            3,
            2,
            vec![W12],
            vec![
                (
                    "L",
                    Expression::new("", vec![bs(W1, W2, 1, &[(0, ratio(2, 1))], ONE)]).with_prefactor(W1).with_outer(W1, W2),
                ),
                (
                    "R",
                    Expression::new("", vec![bs(W2, W1, 1, &[(0, ratio(1, 2))], ONE)]).with_prefactor(W2).with_outer(W2, W1),
                ),
            ],
        ),
        4 => Theorem::new(
            4,
            3,
            pairs,
            vec![
                ("1", th4_side([(W23, W1), (W13, W2), (W12, W3)])),
                ("2", th4_side([(W23, W1), (W12, W3), (W13, W2)])),
                ("3", th4_side([(W13, W2), (W23, W1), (W12, W3)])),
                ("4", th4_side([(W13, W2), (W12, W3), (W23, W1)])),
                ("5", th4_side([(W12, W3), (W23, W1), (W13, W2)])),
                ("6", th4_side([(W12, W3), (W13, W2), (W23, W1)])),
            ],
        ),
        5 => Theorem::new(
            5,
            3,
            vec![W123],
            vec![
                ("1", th5_side((W23, W1), (W13, W2), (W3, W12))),
                ("2", th5_side((W23, W1), (W12, W3), (W2, W13))),
                ("3", th5_side((W13, W2), (W23, W1), (W3, W12))),
                ("4", th5_side((W13, W2), (W12, W3), (W1, W23))),
                ("5", th5_side((W12, W3), (W13, W2), (W1, W23))),
                ("6", th5_side((W12, W3), (W23, W1), (W2, W13))),
            ],
        ),
        6 => Theorem::new(
            6,
            3,
            vec![W123],
            vec![
                ("1", th6_side(W1, W23, (W12, W3, W2), (W13, W2, ratio(2, 1), W3))),
                ("2", th6_side(W1, W23, (W13, W2, W3), (W12, W3, ratio(3, 1), W2))),
                ("3", th6_side(W2, W13, (W12, W3, W1), (W23, W1, ratio(1, 2), W3))),
                ("4", th6_side(W2, W13, (W23, W1, W3), (W12, W3, ratio(3, 2), W1))),
                ("5", th6_side(W3, W12, (W13, W2, W1), (W23, W1, ratio(1, 3), W2))),
                ("6", th6_side(W3, W12, (W23, W1, W2), (W13, W2, ratio(2, 3), W1))),
            ],
        ),
        7 => Theorem::new(
            7,
            3,
            vec![W123],
            vec![
                ("1", th7_side((W23, W1), (W2, W13), (W3, W12))),
                ("2", th7_side((W13, W2), (W3, W12), (W1, W23))),
                ("3", th7_side((W12, W3), (W1, W23), (W2, W13))),
            ],
        ),
        8 => Theorem::new(
            8,
            3,
            vec![W123],
            vec![
                ("1", th8_side(W1, W23, (W13, W2, ratio(2, 1), W3), (W3, W12, W2))),
                ("2", th8_side(W1, W23, (W12, W3, ratio(3, 1), W2), (W2, W13, W3))),
                ("3", th8_side(W2, W13, (W23, W1, ratio(1, 2), W3), (W3, W12, W1))),
                ("4", th8_side(W2, W13, (W12, W3, ratio(3, 2), W1), (W1, W23, W3))),
                ("5", th8_side(W3, W12, (W23, W1, ratio(1, 3), W2), (W2, W13, W1))),
                ("6", th8_side(W3, W12, (W13, W2, ratio(2, 3), W1), (W1, W23, W2))),
            ],
        ),
        9 => Theorem::new(
            9,
            3,
            vec![W123],
            vec![
                ("1", th9_side(W12, (W1, W23), (W2, W13), (W12, W3, ratio(3, 1), ratio(3, 2)))),
                ("2", th9_side(W23, (W2, W13), (W3, W12), (W23, W1, ratio(1, 2), ratio(1, 3)))),
                ("3", th9_side(W13, (W3, W12), (W1, W23), (W13, W2, ratio(2, 3), ratio(2, 1)))),
            ],
        ),
        10 => Theorem::new(
            10,
            3,
            singles,
            vec![
                ("L", Expression::new("", vec![b(W3, W1, 1, W3), b(W1, W2, 1, W1), b(W2, W3, 1, W2)])),
                ("R", Expression::new("", vec![b(W2, W1, 1, W2), b(W1, W3, 1, W1), b(W3, W2, 1, W3)])),
            ],
        ),
        11 => Theorem::new(
            11,
            3,
            pairs,
            vec![
                ("L", th11_side([(W1, W3), (W2, W1), (W3, W2)])),
                ("R", th11_side([(W1, W2), (W3, W1), (W2, W3)])),
            ],
        ),
        _ => return Err(Error::Precondition(format!("no theorem {id}; ids run from 1 to 11"))),
    };
    Ok(th)
}

pub fn catalog() -> Vec<Theorem> {
    (1..=11).map(|i| theorem(i).unwrap()).collect()
}

/// The six-fold symmetry displayed up front, which is theorem 8.
pub fn intro_display() -> Theorem {
    theorem(8).unwrap()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    AsStated,
    Normalized,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::AsStated => "as-stated",
            Mode::Normalized => "normalized",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "as-stated" => Ok(Mode::AsStated),
            "normalized" => Ok(Mode::Normalized),
            _ => Err(Error::Parse(format!("unknown mode {s:?}; expected as-stated or normalized"))),
        }
    }
}

/// Where the y-variables are sampled.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum YSpec {
    /// `0, 1, …, n+1` at order `n`.
    Grid,
    /// One fixed value per variable.
    Points(Vec<Rational>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TheoremInstance {
    pub theorem: u8,
    pub d: u64,
    pub chi: Vec<u64>,
    pub r: u64,
    pub j: u64,
    pub w: Vec<u64>,
    pub n_max: usize,
    pub y: YSpec,
}

impl TheoremInstance {
    pub fn setting(&self) -> Result<Setting> {
        Ok(Setting::new(DirichletCharacter::new(self.d, &self.chi)?, TwistSpec::new(self.r, self.j)?))
    }

    fn grid(&self, vars: usize) -> Result<YGrid> {
        match &self.y {
            YSpec::Grid => Ok(YGrid::arithmetic(vars, self.n_max, &Rational::ONE)),
            YSpec::Points(p) if p.len() >= vars => Ok(YGrid::single(p, self.n_max)),
            YSpec::Points(p) => Err(Error::Precondition(format!("{vars} y-values needed, {} given", p.len()))),
        }
    }

    /// Sort key for deterministic reports.
    pub fn key(&self) -> (u8, u64, Vec<u64>, u64, u64, Vec<u64>) {
        (self.theorem, self.d, self.chi.clone(), self.r, self.j, self.w.clone())
    }
}

impl fmt::Display for TheoremInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let chi: Vec<String> = self.chi.iter().map(u64::to_string).collect();
        let w: Vec<String> = self.w.iter().map(u64::to_string).collect();
        write!(
            f,
            "T{} d={} chi=({}) r={} j={} w=({}) n<={}",
            self.theorem,
            self.d,
            chi.join(","),
            self.r,
            self.j,
            w.join(","),
            self.n_max
        )
    }
}

/// Values of every side of a theorem at one instance.
pub struct Evaluation {
    pub instance: TheoremInstance,
    pub theorem: Theorem,
    pub ys: YGrid,
    pub tables: Vec<Table>,
    pub weights: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SideReport {
    pub label: String,
    pub weight: Mono,
    pub values: Vec<Vec<CyclotomicNumber>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitReport {
    pub weight: Mono,
    pub sides: Vec<String>,
    pub pass: bool,
}

/// First disagreement found, with both values as compared.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub n: usize,
    pub y: Vec<Rational>,
    pub sides: [String; 2],
    pub values: [CyclotomicNumber; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub instance: TheoremInstance,
    pub mode: Mode,
    pub y_points: Vec<Vec<Rational>>,
    pub sides: Vec<SideReport>,
    pub orbits: Vec<OrbitReport>,
    pub pass: bool,
    pub witness: Option<Witness>,
}

impl Evaluation {
    fn value(&self, side: usize, n: usize, p: usize, mode: Mode) -> CyclotomicNumber {
        let v = &self.tables[side].values[n][p];
        match mode {
            Mode::AsStated => v.clone(),
            Mode::Normalized => v.scale(&self.weights[side].recip().expect("weights are nonzero")),
        }
    }

    /// First point where a side in `sides` differs from the first of them.
    pub fn first_mismatch(&self, sides: &[usize], mode: Mode) -> Option<Witness> {
        let (&s0, rest) = sides.split_first()?;
        for n in 0..self.tables[s0].values.len() {
            for (p, idx) in self.ys.indices(n).iter().enumerate() {
                let v0 = self.value(s0, n, p, mode);
                for &s in rest {
                    let v = self.value(s, n, p, mode);
                    if v != v0 {
                        let lab = |i: usize| self.theorem.sides[i].label().to_string();
                        return Some(Witness {
                            n,
                            y: self.ys.point(idx),
                            sides: [lab(s0), lab(s)],
                            values: [v0, v],
                        });
                    }
                }
            }
        }
        None
    }

    pub fn orbit_reports(&self) -> Vec<OrbitReport> {
        self.theorem
            .orbits()
            .into_iter()
            .map(|(weight, idx)| OrbitReport {
                weight,
                sides: idx.iter().map(|&i| self.theorem.sides[i].label().to_string()).collect(),
                pass: self.first_mismatch(&idx, Mode::AsStated).is_none(),
            })
            .collect()
    }

    pub fn passes(&self, mode: Mode) -> bool {
        let all: Vec<usize> = (0..self.tables.len()).collect();
        self.first_mismatch(&all, mode).is_none()
    }

    pub fn report(&self, mode: Mode) -> VerificationReport {
        let all: Vec<usize> = (0..self.tables.len()).collect();
        let witness = self.first_mismatch(&all, mode);
        let used = self.theorem.y_vars();
        VerificationReport {
            instance: self.instance.clone(),
            mode,
            y_points: self.ys.points.iter().take(used).cloned().collect(),
            sides: self
                .theorem
                .sides
                .iter()
                .zip(&self.tables)
                .map(|(s, t)| SideReport { label: s.label().to_string(), weight: s.weight, values: t.values.clone() })
                .collect(),
            orbits: self.orbit_reports(),
            pass: witness.is_none(),
            witness,
        }
    }
}

/// Evaluates every side of `th` on a shared setting.
pub fn evaluate_theorem(th: &Theorem, set: &Setting, w: &[u64], n_max: usize, ys: &YGrid) -> Result<Vec<Table>> {
    th.check(set, w)?;
    th.sides.iter().map(|s| evaluate(&s.expr, set, w, n_max, ys)).collect()
}

fn evaluate_with(th: Theorem, inst: &TheoremInstance, set: &Setting) -> Result<Evaluation> {
    let ys = inst.grid(th.y_vars())?;
    let tables = evaluate_theorem(&th, set, &inst.w, inst.n_max, &ys)?;
    let weights = th.sides.iter().map(|s| s.weight.eval(&inst.w)).collect::<Result<_>>()?;
    Ok(Evaluation { instance: inst.clone(), theorem: th, ys, tables, weights })
}

pub fn evaluate_instance(inst: &TheoremInstance) -> Result<Evaluation> {
    if gcd(inst.r, inst.d) != 1 {
        return Err(Error::Precondition(format!("gcd(r, d) = gcd({}, {}) is not 1", inst.r, inst.d)));
    }
    evaluate_with(theorem(inst.theorem)?, inst, &inst.setting()?)
}

/// Every side of the theorem, with its weight and values.
pub fn theorem_sides(inst: &TheoremInstance) -> Result<Vec<SideReport>> {
    Ok(evaluate_instance(inst)?.report(Mode::AsStated).sides)
}

pub fn verify_instance(inst: &TheoremInstance, mode: Mode) -> Result<VerificationReport> {
    Ok(evaluate_instance(inst)?.report(mode))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairCheck {
    pub left: String,
    pub right: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RedundancyReport {
    pub w: Vec<u64>,
    pub n_max: usize,
    pub pairs: Vec<PairCheck>,
}

impl RedundancyReport {
    pub fn pass(&self) -> bool {
        self.pairs.iter().all(|p| p.pass)
    }
}

/// Rewritings that relabel summation order only: the theorem 7 sides with
/// their two power sums swapped, and cyclic rotations of the theorem 11
/// sides. Returns `(rewritten, original)` pairs.
pub fn redundant_forms() -> Vec<(u8, Expression, usize)> {
    let t7 = theorem(7).unwrap();
    let t11 = theorem(11).unwrap();
    let mut out = Vec::new();
    for (i, side) in t7.sides.iter().enumerate() {
        let mut e = side.expr.clone();
        e.slots.swap(1, 2);
        out.push((7, e.relabel(format!("{}-swap", side.label())), i));
    }
    for (i, side) in t11.sides.iter().enumerate() {
        for k in 1..=2 {
            let mut e = side.expr.clone();
            e.slots.rotate_left(k);
            out.push((11, e.relabel(format!("{}-rot{k}", side.label())), i));
        }
    }
    out
}

/// Checks every rewriting of [`redundant_forms`] against its original.
pub fn redundancy_check(set: &Setting, w: &[u64], n_max: usize) -> Result<RedundancyReport> {
    let t7 = theorem(7)?;
    let t11 = theorem(11)?;
    t7.check(set, w)?;
    t11.check(set, w)?;
    let ys = YGrid::arithmetic(1, n_max, &Rational::ONE);
    let mut pairs = Vec::new();
    for (id, e, i) in redundant_forms() {
        let th = if id == 7 { &t7 } else { &t11 };
        let a = evaluate(&e, set, w, n_max, &ys)?;
        let b = evaluate(&th.sides[i].expr, set, w, n_max, &ys)?;
        pairs.push(PairCheck { left: e.label.clone(), right: th.sides[i].label().to_string(), pass: a == b });
    }
    Ok(RedundancyReport { w: w.to_vec(), n_max, pairs })
}

/// A deliberately corrupted copy of a theorem.
#[derive(Clone, Debug)]
pub struct Mutation {
    pub description: String,
    pub theorem: Theorem,
}

/// Single-site corruptions of every side of `th`: multinomial weights,
/// ξ-exponents, and powers of `w`. Side weights are left as declared.
pub fn mutations(th: &Theorem) -> Vec<Mutation> {
    let mut out = Vec::new();
    for (si, side) in th.sides.iter().enumerate() {
        let k = side.expr.slots.len();
        let mut push = |what: String, e: Expression| {
            let mut t = th.clone();
            t.sides[si].expr = e;
            out.push(Mutation { description: format!("{}: {what}", side.label()), theorem: t });
        };
        let mut comps = vec![vec![1; k]];
        for i in 0..k {
            let mut c = vec![1; k];
            c[i] = 2;
            comps.push(c);
        }
        for c in comps {
            let mut e = side.expr.clone();
            e.coefficient = Coefficient::Perturbed { composition: c.clone(), delta: 1 };
            push(format!("multinomial weight at {c:?} plus one"), e);
        }
        for i in 0..k {
            let mut e = side.expr.clone();
            match &mut e.slots[i] {
                Slot::Bernoulli { twist, .. } | Slot::PowerSum { twist, .. } => *twist = twist.mul(W1),
            }
            push(format!("slot {} twist times w1", i + 1), e);
            let mut e = side.expr.clone();
            match &mut e.slots[i] {
                Slot::Bernoulli { scale, .. } | Slot::PowerSum { scale, .. } => *scale = scale.mul(W1),
            }
            push(format!("slot {} scale times w1", i + 1), e);
        }
        for i in 0..side.expr.outers.len() {
            let mut e = side.expr.clone();
            e.outers[i].twist = e.outers[i].twist.mul(W1);
            push(format!("outer sum {} twist times w1", i + 1), e);
        }
        let mut e = side.expr.clone();
        e.prefactor = e.prefactor.mul(W1);
        push("prefactor times w1".into(), e);
    }
    out
}

/// Runs `mutation` on `instances` in normalized mode; returns the first
/// instance where it is caught. Instances the mutant cannot evaluate are
/// skipped.
pub fn detect_mutation<'a>(mutation: &Mutation, instances: &'a [TheoremInstance]) -> Option<&'a TheoremInstance> {
    instances.iter().find(|inst| {
        let Ok(set) = inst.setting() else { return false };
        match evaluate_with(mutation.theorem.clone(), inst, &set) {
            Ok(ev) => !ev.passes(Mode::Normalized),
            Err(_) => false,
        }
    })
}

/// Weight homogeneity and normalized agreement under `w ↦ c w`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScalingReport {
    pub theorem: u8,
    pub w: Vec<u64>,
    pub c: u64,
    pub homogeneous: bool,
    pub pass_at_w: bool,
    pub pass_at_cw: bool,
}

impl ScalingReport {
    pub fn pass(&self) -> bool {
        self.homogeneous && self.pass_at_w && self.pass_at_cw
    }
}

pub fn scaling_check(inst: &TheoremInstance, c: u64) -> Result<ScalingReport> {
    let th = theorem(inst.theorem)?;
    let cw: Vec<u64> = inst.w.iter().map(|x| x * c).collect();
    let cq = Rational::from_int(c as i64);
    let mut homogeneous = true;
    for s in &th.sides {
        let scaled = &s.weight.eval(&inst.w)? * &cq.pow(s.weight.degree() as i64)?;
        homogeneous &= s.weight.eval(&cw)? == scaled;
    }
    let at = |w: Vec<u64>| -> Result<bool> {
        let i = TheoremInstance { w, ..inst.clone() };
        Ok(evaluate_instance(&i)?.passes(Mode::Normalized))
    };
    Ok(ScalingReport {
        theorem: inst.theorem,
        w: inst.w.clone(),
        c,
        homogeneous,
        pass_at_w: at(inst.w.clone())?,
        pass_at_cw: at(cw)?,
    })
}

/// Which characters a grid uses.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CharSelector {
    All,
    Primitive,
    /// Explicit labels; each applies to the moduli where it is valid.
    Labels(Vec<Vec<u64>>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GridConfig {
    pub theorems: Vec<u8>,
    pub d: Vec<u64>,
    pub chars: CharSelector,
    pub r: Vec<u64>,
    pub j: Vec<u64>,
    /// Values each w-component ranges over.
    pub w: Vec<u64>,
    pub n_max: usize,
    pub y: YSpec,
    pub modes: Vec<Mode>,
}

impl GridConfig {
    /// d ∈ {1,3,4,5}, every character, r ∈ {3,4,5,7}, j = 1, w-components
    /// in {1,2,3,4}, n ≤ 6, y-points 0..=n+1, both modes.
    pub fn standard() -> Self {
        GridConfig {
            theorems: (1..=11).collect(),
            d: vec![1, 3, 4, 5],
            chars: CharSelector::All,
            r: vec![3, 4, 5, 7],
            j: vec![1],
            w: vec![1, 2, 3, 4],
            n_max: 6,
            y: YSpec::Grid,
            modes: vec![Mode::AsStated, Mode::Normalized],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let empty = [
            ("theorems", self.theorems.is_empty()),
            ("d", self.d.is_empty()),
            ("r", self.r.is_empty()),
            ("j", self.j.is_empty()),
            ("w", self.w.is_empty()),
            ("modes", self.modes.is_empty()),
        ];
        if let Some((k, _)) = empty.iter().find(|(_, e)| *e) {
            return Err(Error::Precondition(format!("grid list {k} is empty")));
        }
        for &t in &self.theorems {
            theorem(t)?;
        }
        Ok(())
    }

    fn characters(&self, d: u64) -> Result<Vec<DirichletCharacter>> {
        let all = all_characters(d)?;
        Ok(match &self.chars {
            CharSelector::All => all,
            CharSelector::Primitive => all.into_iter().filter(|c| c.conductor().1).collect(),
            CharSelector::Labels(ls) => all.into_iter().filter(|c| ls.iter().any(|l| l == c.exponents())).collect(),
        })
    }
}

fn tuples(values: &[u64], k: usize) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t| {
                values.iter().map(move |&v| {
                    let mut t = t.clone();
                    t.push(v);
                    t
                })
            })
            .collect();
    }
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub instances: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TheoremSummary {
    pub theorem: u8,
    pub mode: Mode,
    pub skipped: usize,
    #[serde(flatten)]
    pub tally: Tally,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub instance: TheoremInstance,
    pub mode: Mode,
    pub witness: Option<Witness>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GridReport {
    pub config: GridConfig,
    pub summary: Vec<TheoremSummary>,
    pub failures: Vec<Failure>,
}

impl GridReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs every instance of the grid. `visit` sees each evaluated instance
/// (in an unspecified order); the report itself is ordered by instance key.
pub fn grid_verify_with<F>(config: &GridConfig, mut visit: F) -> Result<GridReport>
where
    F: FnMut(&Evaluation),
{
    config.validate()?;
    let theorems: Vec<Theorem> = config.theorems.iter().map(|&t| theorem(t)).collect::<Result<_>>()?;
    let mut skipped: BTreeMap<u8, usize> = BTreeMap::new();
    let mut tallies: BTreeMap<(u8, Mode), Tally> = BTreeMap::new();
    let mut failures = Vec::new();
    for &d in &config.d {
        let chars = config.characters(d)?;
        for chi in &chars {
            for &r in &config.r {
                for &j in &config.j {
                    let twist = TwistSpec::new(r, j)?;
                    let set = Setting::new(chi.clone(), twist);
                    for th in &theorems {
                        for w in tuples(&config.w, th.arity) {
                            let inst = TheoremInstance {
                                theorem: th.id,
                                d,
                                chi: chi.exponents().to_vec(),
                                r,
                                j: twist.j,
                                w: w.clone(),
                                n_max: config.n_max,
                                y: config.y.clone(),
                            };
                            if th.check(&set, &w).is_err() {
                                *skipped.entry(th.id).or_default() += 1;
                                continue;
                            }
                            match evaluate_with(th.clone(), &inst, &set) {
                                Ok(ev) => {
                                    for &mode in &config.modes {
                                        let t = tallies.entry((th.id, mode)).or_default();
                                        t.instances += 1;
                                        let report = ev.report_witness(mode);
                                        match report {
                                            None => t.passed += 1,
                                            Some(w) => {
                                                t.failed += 1;
                                                failures.push(Failure {
                                                    instance: inst.clone(),
                                                    mode,
                                                    witness: Some(w),
                                                    error: None,
                                                });
                                            }
                                        }
                                    }
                                    visit(&ev);
                                }
                                Err(e) => {
                                    for &mode in &config.modes {
                                        let t = tallies.entry((th.id, mode)).or_default();
                                        t.instances += 1;
                                        t.failed += 1;
                                        failures.push(Failure {
                                            instance: inst.clone(),
                                            mode,
                                            witness: None,
                                            error: Some(e.to_string()),
                                        });
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    failures.sort_by(|a, b| (a.instance.key(), a.mode).cmp(&(b.instance.key(), b.mode)));
    let mut summary = Vec::new();
    for th in &theorems {
        for &mode in &config.modes {
            summary.push(TheoremSummary {
                theorem: th.id,
                mode,
                skipped: skipped.get(&th.id).copied().unwrap_or(0),
                tally: tallies.get(&(th.id, mode)).cloned().unwrap_or_default(),
            });
        }
    }
    Ok(GridReport { config: config.clone(), summary, failures })
}

pub fn grid_verify(config: &GridConfig) -> Result<GridReport> {
    grid_verify_with(config, |_| {})
}

impl Evaluation {
    fn report_witness(&self, mode: Mode) -> Option<Witness> {
        let all: Vec<usize> = (0..self.tables.len()).collect();
        self.first_mismatch(&all, mode)
    }
}
