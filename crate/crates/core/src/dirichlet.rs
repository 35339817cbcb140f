//! Dirichlet characters with exact cyclotomic values.
//!
//! A character mod `d` is labelled by one exponent per generator of
//! `(Z/dZ)^*`: the label `(k_1, …, k_s)` sends the `i`-th generator of order
//! `n_i` to `ζ_{n_i}^{k_i}`. Generators are fixed as follows: the 2-part
//! contributes `-1` (for `4 | d`) and `5` (for `8 | d`); each odd prime power
//! contributes its smallest primitive root; every generator is lifted to a
//! residue mod `d` that is `1` on the other prime-power components.
//!
//! The character mod 1 is identically 1, including at 0. For `d > 1` every
//! character vanishes off the units.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::int::{divisors, euler_phi, factorize, gcd, lcm, mod_pow};
use crate::exactnum::CyclotomicNumber;

/// One cyclic factor of the unit group: a residue mod `d` and its order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub residue: u64,
    pub order: u64,
}

/// Decomposes `(Z/dZ)^*` into cyclic factors, in the generator order used by
/// character labels.
pub fn unit_group_structure(d: u64) -> Result<Vec<Generator>> {
    if d == 0 {
        return Err(Error::Precondition("modulus must be positive".into()));
    }
    let mut gens = Vec::new();
    for (p, k) in factorize(d) {
        let q = p.pow(k);
        let local: Vec<(u64, u64)> = match (p, k) {
            (2, 1) => vec![],
            (2, 2) => vec![(3, 2)],
            (2, _) => vec![(q - 1, 2), (5, q / 4)],
            _ => vec![(smallest_primitive_root(p, q), q / p * (p - 1))],
        };
        for (g, order) in local {
            gens.push(Generator { residue: crt_lift(g, q, d), order });
        }
    }
    Ok(gens)
}

fn smallest_primitive_root(p: u64, q: u64) -> u64 {
    let phi = q / p * (p - 1);
    let primes: Vec<u64> = factorize(phi).into_iter().map(|(f, _)| f).collect();
    (2..q)
        .find(|&g| g % p != 0 && primes.iter().all(|&f| mod_pow(g, phi / f, q) != 1))
        .expect("odd prime powers have primitive roots")
}

// The residue mod d congruent to g mod q and to 1 mod d/q.
fn crt_lift(g: u64, q: u64, d: u64) -> u64 {
    let rest = d / q;
    (0..rest)
        .map(|t| g + q * t)
        .find(|x| x % rest == 1 % rest)
        .expect("coprime moduli")
}

/// A Dirichlet character with its full value table.
#[derive(Clone, PartialEq, Eq)]
pub struct DirichletCharacter {
    modulus: u64,
    exponents: Vec<u64>,
    order: u64,
    // χ(a) = ζ_order^v for a in 0..modulus, None off the units
    table: Vec<Option<u64>>,
}

/// Serialized form of a character label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterLabel {
    pub d: u64,
    pub exponents: Vec<u64>,
    pub order: u64,
}

impl DirichletCharacter {
    pub fn new(d: u64, exponents: &[u64]) -> Result<Self> {
        let gens = unit_group_structure(d)?;
        let bad = || Error::InvalidCharacterLabel { modulus: d, label: exponents.to_vec() };
        if exponents.len() != gens.len() {
            return Err(bad());
        }
        if gens.iter().zip(exponents).any(|(g, &k)| k >= g.order) {
            return Err(bad());
        }
        let exponent = gens.iter().fold(1, |l, g| lcm(l, g.order));
        let order = gens
            .iter()
            .zip(exponents)
            .fold(1, |l, (g, &k)| lcm(l, g.order / gcd(g.order, k)));
        let mut table = vec![None; d as usize];
        if d == 1 {
            table[0] = Some(0);
        }
        // walk every exponent vector of the generators
        let mut e = vec![0u64; gens.len()];
        loop {
            let residue = gens
                .iter()
                .zip(&e)
                .fold(1 % d, |acc, (g, &ei)| acc * mod_pow(g.residue, ei, d) % d);
            let v: u64 = gens
                .iter()
                .zip(exponents)
                .zip(&e)
                .map(|((g, &k), &ei)| k * ei % g.order * (exponent / g.order))
                .sum::<u64>()
                % exponent;
            debug_assert_eq!(v * order % exponent, 0);
            table[residue as usize] = Some(v * order / exponent);
            let mut i = 0;
            while i < e.len() {
                e[i] += 1;
                if e[i] < gens[i].order {
                    break;
                }
                e[i] = 0;
                i += 1;
            }
            if i == e.len() {
                break;
            }
        }
        Ok(DirichletCharacter { modulus: d, exponents: exponents.to_vec(), order, table })
    }

    pub fn trivial(d: u64) -> Result<Self> {
        let n = unit_group_structure(d)?.len();
        Self::new(d, &vec![0; n])
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    pub fn label(&self) -> CharacterLabel {
        CharacterLabel { d: self.modulus, exponents: self.exponents.clone(), order: self.order }
    }

    /// `v` with `χ(a) = ζ_order^v`, or `None` where `χ(a) = 0`.
    pub fn value_exponent(&self, a: i64) -> Option<u64> {
        self.table[a.rem_euclid(self.modulus as i64) as usize]
    }

    /// `χ(a)` in `Q(ζ_order)`.
    pub fn eval(&self, a: i64) -> CyclotomicNumber {
        match self.value_exponent(a) {
            Some(v) => CyclotomicNumber::root_of_unity(self.order, v as i64),
            None => CyclotomicNumber::zero(self.order),
        }
        .expect("positive order")
    }

    /// Conductor and primitivity flag.
    pub fn conductor(&self) -> (u64, bool) {
        let d = self.modulus;
        let f = divisors(d)
            .into_iter()
            .find(|&f| {
                (1..d)
                    .step_by(f as usize)
                    .filter(|&a| gcd(a, d) == 1)
                    .all(|a| self.table[a as usize] == Some(0))
            })
            .unwrap_or(d);
        (f, f == d)
    }
}

impl fmt::Debug for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "χ[{} ; {:?}]", self.modulus, self.exponents)
    }
}

impl fmt::Display for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.exponents.iter().map(u64::to_string).collect();
        write!(f, "mod {} ({})", self.modulus, labels.join(","))
    }
}

/// Every character mod `d`, ordered lexicographically by label.
pub fn all_characters(d: u64) -> Result<Vec<DirichletCharacter>> {
    let gens = unit_group_structure(d)?;
    let mut labels: Vec<Vec<u64>> = vec![vec![]];
    for g in &gens {
        labels = labels
            .into_iter()
            .flat_map(|l| {
                (0..g.order).map(move |k| {
                    let mut l = l.clone();
                    l.push(k);
                    l
                })
            })
            .collect();
    }
    debug_assert_eq!(labels.len() as u64, euler_phi(d));
    labels.iter().map(|l| DirichletCharacter::new(d, l)).collect()
}

/// Conductor table of every character mod `d`, keyed by label.
pub fn conductor_table(d: u64) -> Result<BTreeMap<Vec<u64>, (u64, bool)>> {
    Ok(all_characters(d)?
        .into_iter()
        .map(|c| (c.exponents.clone(), c.conductor()))
        .collect())
}
