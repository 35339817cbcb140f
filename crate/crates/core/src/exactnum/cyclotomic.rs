use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use dashu_int::ops::Gcd;
use dashu_int::IBig;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::int::{divisors, gcd, lcm};
use super::poly::{div_exact_monic, inverse_mod};
use super::Rational;
use crate::error::{Error, Result};

/// The `m`-th cyclotomic polynomial, lowest degree first.
///
/// Computed by exact division of `x^m - 1` by the product of `Φ_d` over the
/// proper divisors `d` of `m`, and cached.
pub fn cyclotomic_polynomial(m: u64) -> Result<Vec<IBig>> {
    if m == 0 {
        return Err(Error::InvalidConductor(m));
    }
    static CACHE: OnceLock<Mutex<HashMap<u64, Vec<IBig>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(p) = cache.lock().unwrap().get(&m) {
        return Ok(p.clone());
    }
    let mut num = vec![IBig::ZERO; m as usize + 1];
    num[0] = IBig::NEG_ONE;
    num[m as usize] = IBig::ONE;
    let mut den = vec![IBig::ONE];
    for d in divisors(m).into_iter().filter(|&d| d < m) {
        den = poly_mul(&den, &cyclotomic_polynomial(d)?);
    }
    let phi = div_exact_monic(&num, &den).expect("x^m - 1 is divisible by its proper cyclotomic factors");
    cache.lock().unwrap().insert(m, phi.clone());
    Ok(phi)
}

fn poly_mul(a: &[IBig], b: &[IBig]) -> Vec<IBig> {
    let mut out = vec![IBig::ZERO; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Precomputed data for `Q(ζ_m)` in the power basis `1, ζ, …, ζ^{φ(m)-1}`.
pub struct CyclotomicField {
    m: u64,
    phi: usize,
    poly: Vec<IBig>,
    // nonzero coefficients of Φ_m below the leading term
    lower: Vec<(usize, IBig)>,
    // sparse power-basis vectors of ζ^k for 0 <= k < m
    roots: Vec<Vec<(usize, IBig)>>,
}

impl CyclotomicField {
    pub fn get(m: u64) -> Result<Arc<CyclotomicField>> {
        static FIELDS: OnceLock<Mutex<HashMap<u64, Arc<CyclotomicField>>>> = OnceLock::new();
        let fields = FIELDS.get_or_init(Default::default);
        if let Some(f) = fields.lock().unwrap().get(&m) {
            return Ok(f.clone());
        }
        let f = Arc::new(CyclotomicField::build(m)?);
        fields.lock().unwrap().insert(m, f.clone());
        Ok(f)
    }

    fn build(m: u64) -> Result<CyclotomicField> {
        let poly = cyclotomic_polynomial(m)?;
        let phi = poly.len() - 1;
        let lower: Vec<(usize, IBig)> = poly[..phi]
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i, c.clone()))
            .collect();
        let mut roots = Vec::with_capacity(m as usize);
        let mut v = vec![IBig::ZERO; phi];
        v[0] = IBig::ONE;
        for _ in 0..m {
            roots.push(
                v.iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(i, c)| (i, c.clone()))
                    .collect(),
            );
            let top = v.pop().unwrap();
            v.insert(0, IBig::ZERO);
            if !top.is_zero() {
                for (i, c) in &lower {
                    v[*i] -= &top * c;
                }
            }
        }
        Ok(CyclotomicField { m, phi, poly, lower, roots })
    }

    pub fn conductor(&self) -> u64 {
        self.m
    }

    pub fn degree(&self) -> usize {
        self.phi
    }

    pub fn polynomial(&self) -> &[IBig] {
        &self.poly
    }

    fn root(&self, k: i64) -> &[(usize, IBig)] {
        &self.roots[k.rem_euclid(self.m as i64) as usize]
    }

    // Reduces a coefficient vector of any length modulo Φ_m in place.
    fn reduce(&self, v: &mut Vec<IBig>) {
        let phi = self.phi;
        for k in (phi..v.len()).rev() {
            let c = std::mem::take(&mut v[k]);
            if c.is_zero() {
                continue;
            }
            for (i, p) in &self.lower {
                v[k - phi + i] -= &c * p;
            }
        }
        v.resize(phi, IBig::ZERO);
    }
}

impl fmt::Debug for CyclotomicField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(ζ{})", self.m)
    }
}

/// An exact element of the cyclotomic field `Q(ζ_m)`.
///
/// Stored as integer numerators over one positive common denominator with no
/// common factor, so the representation of each value is unique. Values with
/// different conductors combine in the field of the least common multiple,
/// through `ζ_m ↦ ζ_M^{M/m}`.
#[derive(Clone)]
pub struct CyclotomicNumber {
    field: Arc<CyclotomicField>,
    num: Vec<IBig>,
    den: IBig,
}

impl CyclotomicNumber {
    fn raw(field: Arc<CyclotomicField>, num: Vec<IBig>, den: IBig) -> Self {
        let mut x = CyclotomicNumber { field, num, den };
        x.normalize();
        x
    }

    fn normalize(&mut self) {
        if self.den < IBig::ZERO {
            self.den = -std::mem::take(&mut self.den);
            for c in &mut self.num {
                *c = -std::mem::take(c);
            }
        }
        if self.num.iter().all(|c| c.is_zero()) {
            self.den = IBig::ONE;
            return;
        }
        if self.den.is_one() {
            return;
        }
        let mut nonzero = self.num.iter().filter(|c| !c.is_zero());
        let mut g = (&self.den).gcd(nonzero.next().unwrap());
        for c in nonzero {
            if g.is_one() {
                return;
            }
            g = (&g).gcd(c);
        }
        if g.is_one() {
            return;
        }
        let g = IBig::from(g);
        for c in &mut self.num {
            if !c.is_zero() {
                *c = &*c / &g;
            }
        }
        self.den = &self.den / &g;
    }

    pub fn zero(m: u64) -> Result<Self> {
        let field = CyclotomicField::get(m)?;
        let num = vec![IBig::ZERO; field.phi];
        Ok(CyclotomicNumber { field, num, den: IBig::ONE })
    }

    pub fn one(m: u64) -> Result<Self> {
        Self::from_rational(m, &Rational::ONE)
    }

    pub fn from_rational(m: u64, q: &Rational) -> Result<Self> {
        let field = CyclotomicField::get(m)?;
        let mut num = vec![IBig::ZERO; field.phi];
        num[0] = q.numer().clone();
        Ok(CyclotomicNumber { field, num, den: IBig::from(q.denom().clone()) })
    }

    pub fn from_int(m: u64, n: i64) -> Result<Self> {
        Self::from_rational(m, &Rational::from_int(n))
    }

    /// `ζ_m^k` for any integer `k`.
    pub fn root_of_unity(m: u64, k: i64) -> Result<Self> {
        let field = CyclotomicField::get(m)?;
        let mut num = vec![IBig::ZERO; field.phi];
        for (i, c) in field.root(k) {
            num[*i] = c.clone();
        }
        Ok(CyclotomicNumber { field, num, den: IBig::ONE })
    }

    /// `Σ c_k ζ_m^k`. The slice may be longer than `φ(m)`; it is read as a
    /// polynomial in `ζ_m` and reduced.
    pub fn from_coeffs(m: u64, coeffs: &[Rational]) -> Result<Self> {
        Self::from_exponents(m, coeffs.iter().enumerate().map(|(k, c)| (k as i64, c)))
    }

    /// `Σ c ζ_m^k` over the given `(k, c)` pairs.
    pub fn from_exponents<'a, I>(m: u64, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, &'a Rational)>,
    {
        let field = CyclotomicField::get(m)?;
        let mut acc = vec![Rational::ZERO; field.phi];
        for (k, c) in terms {
            if c.is_zero() {
                continue;
            }
            for (i, r) in field.root(k) {
                acc[*i] += &(c * &Rational::from(r.clone()));
            }
        }
        let den = acc.iter().fold(IBig::ONE, |l, q| {
            let d = IBig::from(q.denom().clone());
            let g = IBig::from((&l).gcd(&d));
            &l / &g * d
        });
        let num = acc
            .iter()
            .map(|q| q.numer() * (&den / IBig::from(q.denom().clone())))
            .collect();
        Ok(Self::raw(field, num, den))
    }

    pub fn conductor(&self) -> u64 {
        self.field.m
    }

    pub fn field(&self) -> &Arc<CyclotomicField> {
        &self.field
    }

    /// Power-basis coordinates, length `φ(m)`.
    pub fn coeffs(&self) -> Vec<Rational> {
        self.num
            .iter()
            .map(|c| Rational::from_parts(c.clone(), self.den.clone()).expect("positive denominator"))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num[0].is_one() && self.num[1..].iter().all(|c| c.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.num[1..].iter().all(|c| c.is_zero())
    }

    pub fn to_rational(&self) -> Option<Rational> {
        self.is_rational()
            .then(|| Rational::from_parts(self.num[0].clone(), self.den.clone()).expect("positive denominator"))
    }

    /// The same value in `Q(ζ_M)`. Requires `m | M`.
    pub fn embed(&self, big: u64) -> Result<Self> {
        let m = self.field.m;
        if big == 0 || big % m != 0 {
            return Err(Error::NotASubfield { from: m, to: big });
        }
        if big == m {
            return Ok(self.clone());
        }
        let field = CyclotomicField::get(big)?;
        let step = (big / m) as i64;
        let mut num = vec![IBig::ZERO; field.phi];
        for (j, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (i, r) in field.root(j as i64 * step) {
                num[*i] += c * r;
            }
        }
        Ok(Self::raw(field, num, self.den.clone()))
    }

    fn lift_pair(a: &Self, b: &Self) -> (Self, Self) {
        let big = lcm(a.field.m, b.field.m);
        (a.embed(big).unwrap(), b.embed(big).unwrap())
    }

    fn add_same(&self, rhs: &Self, negate: bool) -> Self {
        let comb = |x: &IBig, y: &IBig| if negate { x - y } else { x + y };
        if self.den == rhs.den {
            let num = self.num.iter().zip(&rhs.num).map(|(x, y)| comb(x, y)).collect();
            return Self::raw(self.field.clone(), num, self.den.clone());
        }
        let g = IBig::from((&self.den).gcd(&rhs.den));
        let la = &rhs.den / &g;
        let lb = &self.den / &g;
        let num = self
            .num
            .iter()
            .zip(&rhs.num)
            .map(|(x, y)| comb(&(x * &la), &(y * &lb)))
            .collect();
        Self::raw(self.field.clone(), num, &self.den * &la)
    }

    fn mul_same(&self, rhs: &Self) -> Self {
        let f = &self.field;
        if f.phi == 1 {
            let num = vec![&self.num[0] * &rhs.num[0]];
            return Self::raw(f.clone(), num, &self.den * &rhs.den);
        }
        let mut prod = vec![IBig::ZERO; 2 * f.phi - 1];
        for (i, x) in self.num.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in rhs.num.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        f.reduce(&mut prod);
        Self::raw(f.clone(), prod, &self.den * &rhs.den)
    }

    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_one() {
            return self.clone();
        }
        let p = q.numer();
        let num = self.num.iter().map(|c| c * p).collect();
        Self::raw(self.field.clone(), num, &self.den * IBig::from(q.denom().clone()))
    }

    pub fn scale_int(&self, n: &IBig) -> Self {
        let num = self.num.iter().map(|c| c * n).collect();
        Self::raw(self.field.clone(), num, self.den.clone())
    }

    /// Multiplies by `ζ_m^k`.
    pub fn mul_root(&self, k: i64) -> Self {
        let f = &self.field;
        let mut num = vec![IBig::ZERO; f.phi];
        for (j, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (i, r) in f.root(j as i64 + k) {
                num[*i] += c * r;
            }
        }
        CyclotomicNumber { field: f.clone(), num, den: self.den.clone() }
    }

    /// Multiplicative inverse by the extended Euclidean algorithm against
    /// `Φ_m`.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let m = self.field.m;
        if self.is_rational() {
            let q = Rational::from_parts(self.den.clone(), self.num[0].clone())?;
            return Self::from_rational(m, &q);
        }
        let a: Vec<Rational> = self.num.iter().map(|c| Rational::from(c.clone())).collect();
        let modulus: Vec<Rational> = self.field.poly.iter().map(|c| Rational::from(c.clone())).collect();
        let inv = inverse_mod(&a, &modulus).ok_or(Error::DivisionByZero)?;
        Ok(Self::from_coeffs(m, &inv)?.scale_int(&self.den))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        Ok(self * &rhs.inv()?)
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, e: i64) -> Result<Self> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        let mut acc = Self::one(self.field.m)?;
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(acc)
    }

    /// Image under `ζ_m ↦ ζ_m^k`, `gcd(k, m) = 1`.
    pub fn galois(&self, k: i64) -> Result<Self> {
        let m = self.field.m;
        if gcd(k.rem_euclid(m as i64) as u64, m) != 1 {
            return Err(Error::Precondition(format!("{k} is not a unit modulo {m}")));
        }
        let mut num = vec![IBig::ZERO; self.field.phi];
        for (j, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (i, r) in self.field.root(j as i64 * k) {
                num[*i] += c * r;
            }
        }
        Ok(Self::raw(self.field.clone(), num, self.den.clone()))
    }
}

impl PartialEq for CyclotomicNumber {
    fn eq(&self, other: &Self) -> bool {
        if self.field.m == other.field.m {
            return self.den == other.den && self.num == other.num;
        }
        let (a, b) = Self::lift_pair(self, other);
        a.den == b.den && a.num == b.num
    }
}

impl Eq for CyclotomicNumber {}

impl Add for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn add(self, rhs: &CyclotomicNumber) -> CyclotomicNumber {
        if self.field.m == rhs.field.m {
            return self.add_same(rhs, false);
        }
        let (a, b) = CyclotomicNumber::lift_pair(self, rhs);
        a.add_same(&b, false)
    }
}

impl Sub for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn sub(self, rhs: &CyclotomicNumber) -> CyclotomicNumber {
        if self.field.m == rhs.field.m {
            return self.add_same(rhs, true);
        }
        let (a, b) = CyclotomicNumber::lift_pair(self, rhs);
        a.add_same(&b, true)
    }
}

impl Mul for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn mul(self, rhs: &CyclotomicNumber) -> CyclotomicNumber {
        if self.field.m == rhs.field.m {
            return self.mul_same(rhs);
        }
        let (a, b) = CyclotomicNumber::lift_pair(self, rhs);
        a.mul_same(&b)
    }
}

impl Add for CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn add(self, rhs: CyclotomicNumber) -> CyclotomicNumber {
        &self + &rhs
    }
}

impl Sub for CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn sub(self, rhs: CyclotomicNumber) -> CyclotomicNumber {
        &self - &rhs
    }
}

impl Mul for CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn mul(self, rhs: CyclotomicNumber) -> CyclotomicNumber {
        &self * &rhs
    }
}

impl Neg for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn neg(self) -> CyclotomicNumber {
        CyclotomicNumber {
            field: self.field.clone(),
            num: self.num.iter().map(|c| -c).collect(),
            den: self.den.clone(),
        }
    }
}

impl Neg for CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn neg(self) -> CyclotomicNumber {
        -&self
    }
}

impl fmt::Display for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = *c.numer() < IBig::ZERO;
            let abs = if neg { -c } else { c.clone() };
            match (first, neg) {
                (true, true) => write!(f, "-")?,
                (false, true) => write!(f, " - ")?,
                (false, false) => write!(f, " + ")?,
                (true, false) => {}
            }
            first = false;
            match i {
                0 => write!(f, "{abs}")?,
                _ => {
                    if !abs.is_one() {
                        write!(f, "{abs}*")?;
                    }
                    write!(f, "ζ{}", self.field.m)?;
                    if i > 1 {
                        write!(f, "^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.field.m, self)
    }
}

#[derive(Serialize, Deserialize)]
struct Wire {
    m: u64,
    coeffs: Vec<Rational>,
}

impl Serialize for CyclotomicNumber {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        Wire { m: self.field.m, coeffs: self.coeffs() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CyclotomicNumber {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = Wire::deserialize(d)?;
        CyclotomicNumber::from_coeffs(w.m, &w.coeffs).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<IBig> {
        v.iter().map(|&x| IBig::from(x)).collect()
    }

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1).unwrap(), ints(&[-1, 1]));
        assert_eq!(cyclotomic_polynomial(2).unwrap(), ints(&[1, 1]));
        assert_eq!(cyclotomic_polynomial(4).unwrap(), ints(&[1, 0, 1]));
        assert_eq!(cyclotomic_polynomial(6).unwrap(), ints(&[1, -1, 1]));
        assert_eq!(cyclotomic_polynomial(12).unwrap(), ints(&[1, 0, -1, 0, 1]));
        assert!(cyclotomic_polynomial(0).is_err());
    }

    #[test]
    fn phi_105_has_a_coefficient_minus_two() {
        let p = cyclotomic_polynomial(105).unwrap();
        assert_eq!(p.len(), 49);
        assert_eq!(p[7], IBig::from(-2));
        assert_eq!(p[41], IBig::from(-2));
    }

    #[test]
    fn inverse_of_zeta3_minus_one() {
        let z = CyclotomicNumber::root_of_unity(3, 1).unwrap();
        let one = CyclotomicNumber::one(3).unwrap();
        let x = (&z - &one).inv().unwrap();
        let z2 = CyclotomicNumber::root_of_unity(3, 2).unwrap();
        let expected = (&z2 - &one).scale(&Rational::new(1, 3));
        assert_eq!(x, expected);
        assert_eq!(x.to_string(), "-2/3 - 1/3*ζ3");
    }

    #[test]
    fn mixed_conductors_meet_in_the_lcm() {
        let z4 = CyclotomicNumber::root_of_unity(4, 1).unwrap();
        let z6 = CyclotomicNumber::root_of_unity(6, 1).unwrap();
        let s = &z4 + &z6;
        assert_eq!(s.conductor(), 12);
        assert_eq!(s, z4.embed(12).unwrap() + z6.embed(12).unwrap());
        assert_eq!(z4.embed(12).unwrap(), CyclotomicNumber::root_of_unity(12, 3).unwrap());
        let minus_one = CyclotomicNumber::from_int(1, -1).unwrap();
        assert_eq!(z4.pow(2).unwrap(), minus_one);
        assert!(z4.embed(6).is_err());
    }

    #[test]
    fn zero_has_no_inverse() {
        assert_eq!(CyclotomicNumber::zero(5).unwrap().inv().unwrap_err(), Error::DivisionByZero);
    }

    #[test]
    fn serialization_round_trip() {
        let z = CyclotomicNumber::root_of_unity(3, 2).unwrap().scale(&Rational::new(2, 3));
        let json = serde_json::to_string(&z).unwrap();
        assert_eq!(json, r#"{"m":3,"coeffs":["-2/3","-2/3"]}"#);
        let back: CyclotomicNumber = serde_json::from_str(&json).unwrap();
        assert_eq!(back, z);
    }
}
