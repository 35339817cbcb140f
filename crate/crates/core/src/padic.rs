//! Finite-level realisation of the twisted p-adic measure.
//!
//! Values live in `Z[x] / (Φ_r(x), p^M)`, where `x` stands for the image of
//! `ζ_r`. With `gcd(r, p) = 1` this ring is a product of unramified
//! extensions of `Z/p^M`, which is all a convergence check needs. The
//! measure of a residue class is
//!
//! ```text
//! μ_z(a + d p^N Z_p) = z^a / (z^{d p^N} - 1)
//! ```
//!
//! and level-`N` Riemann sums approximate `∫ χ(x) f(x) dμ_ξ`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use dashu_int::IBig;
use serde::Serialize;

use crate::bernoulli::{Setting, TwistSpec};
use crate::dirichlet::DirichletCharacter;
use crate::error::{Error, Result};
use crate::exactnum::int::{factorize, gcd};
use crate::exactnum::{cyclotomic_polynomial, CyclotomicNumber, Rational};

/// The ring `Z[x] / (Φ_r(x), p^M)`.
#[derive(PartialEq, Eq)]
pub struct PadicRing {
    p: u64,
    precision: u32,
    r: u64,
    modulus: IBig,
    // Φ_r, lowest degree first
    phi: Vec<IBig>,
}

impl PadicRing {
    pub fn new(p: u64, precision: u32, r: u64) -> Result<Arc<Self>> {
        if p < 2 || factorize(p) != [(p, 1)] {
            return Err(Error::Precondition(format!("{p} is not prime")));
        }
        if p >= 1 << 31 {
            return Err(Error::Precondition(format!("prime {p} is too large")));
        }
        if precision == 0 {
            return Err(Error::Precondition("precision must be positive".into()));
        }
        if r == 0 || gcd(r, p) != 1 {
            return Err(Error::Precondition(format!("r = {r} must be positive and prime to p = {p}")));
        }
        let modulus = IBig::from(p).pow(precision as usize);
        Ok(Arc::new(PadicRing { p, precision, r, modulus, phi: cyclotomic_polynomial(r)? }))
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn root_order(&self) -> u64 {
        self.r
    }

    fn degree(&self) -> usize {
        self.phi.len() - 1
    }

    fn reduce(&self, mut c: Vec<IBig>) -> Vec<IBig> {
        let n = self.degree();
        // Φ_r is monic: clear the top coefficients from the highest down
        for top in (n..c.len()).rev() {
            let lead = std::mem::take(&mut c[top]);
            if lead == IBig::ZERO {
                continue;
            }
            for (i, f) in self.phi[..n].iter().enumerate() {
                c[top - n + i] -= &lead * f;
            }
        }
        c.truncate(n);
        c.resize(n, IBig::ZERO);
        c.iter().map(|x| x.clone() % &self.modulus).map(|x| self.canon(x)).collect()
    }

    fn canon(&self, x: IBig) -> IBig {
        if x < IBig::ZERO {
            x + &self.modulus
        } else {
            x
        }
    }

    /// `p^{-1}`-free reduction of a rational mod `p^M`.
    fn rational(&self, q: &Rational) -> Result<IBig> {
        let den = IBig::from(q.denom().clone());
        let inv = mod_inverse(&(den % &self.modulus), &self.modulus)
            .ok_or_else(|| Error::NotAUnit(format!("denominator of {q} is divisible by {}", self.p)))?;
        Ok(self.canon((q.numer() * inv) % &self.modulus))
    }
}

impl fmt::Debug for PadicRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z[ζ{}]/{}^{}", self.r, self.p, self.precision)
    }
}

fn mod_inverse(a: &IBig, m: &IBig) -> Option<IBig> {
    // extended Euclid on integers
    let (mut r0, mut r1) = (m.clone(), a.clone() % m);
    let (mut s0, mut s1) = (IBig::ZERO, IBig::ONE);
    while r1 != IBig::ZERO {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let s2 = &s0 - &q * &s1;
        r0 = std::mem::replace(&mut r1, r2);
        s0 = std::mem::replace(&mut s1, s2);
    }
    if r0 == IBig::ONE || r0 == IBig::NEG_ONE {
        let inv = (s0 * r0) % m;
        Some(if inv < IBig::ZERO { inv + m } else { inv })
    } else {
        None
    }
}

/// An element of a [`PadicRing`].
#[derive(Clone, PartialEq, Eq)]
pub struct PadicCycNumber {
    ring: Arc<PadicRing>,
    coeffs: Vec<IBig>,
}

impl PadicCycNumber {
    pub fn zero(ring: &Arc<PadicRing>) -> Self {
        PadicCycNumber { ring: ring.clone(), coeffs: vec![IBig::ZERO; ring.degree()] }
    }

    pub fn from_int(ring: &Arc<PadicRing>, n: &IBig) -> Self {
        let mut c = vec![IBig::ZERO; ring.degree() + 1];
        c[0] = n.clone();
        PadicCycNumber { ring: ring.clone(), coeffs: ring.reduce(c) }
    }

    pub fn one(ring: &Arc<PadicRing>) -> Self {
        Self::from_int(ring, &IBig::ONE)
    }

    pub fn from_rational(ring: &Arc<PadicRing>, q: &Rational) -> Result<Self> {
        Ok(Self::from_int(ring, &ring.rational(q)?))
    }

    /// `x^k`, the image of `ζ_r^k`.
    pub fn root(ring: &Arc<PadicRing>, k: i64) -> Self {
        let k = k.rem_euclid(ring.r as i64) as usize;
        let mut c = vec![IBig::ZERO; k.max(ring.degree()) + 1];
        c[k] = IBig::ONE;
        PadicCycNumber { ring: ring.clone(), coeffs: ring.reduce(c) }
    }

    /// Coefficients on `1, x, …, x^{φ(r)-1}`, each in `[0, p^M)`.
    pub fn coeffs(&self) -> &[IBig] {
        &self.coeffs
    }

    pub fn ring(&self) -> &Arc<PadicRing> {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == IBig::ZERO)
    }

    /// Largest `k ≤ M` with `p^k` dividing every coefficient.
    pub fn valuation(&self) -> u32 {
        let p = IBig::from(self.ring.p);
        self.coeffs
            .iter()
            .map(|c| {
                let mut c = c.clone();
                let mut k = 0;
                while k < self.ring.precision && c != IBig::ZERO && (&c % &p) == IBig::ZERO {
                    c = &c / &p;
                    k += 1;
                }
                if c == IBig::ZERO {
                    self.ring.precision
                } else {
                    k
                }
            })
            .min()
            .unwrap_or(self.ring.precision)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.ring);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Inverse, found mod `p` by a polynomial gcd over `F_p` and lifted by
    /// Newton iteration.
    pub fn inv(&self) -> Result<Self> {
        let p = self.ring.p;
        let pb = IBig::from(p);
        let to_fp = |v: &[IBig]| -> Vec<u64> {
            v.iter()
                .map(|c| {
                    let x = c % &pb;
                    u64::try_from(if x < IBig::ZERO { x + &pb } else { x }).unwrap()
                })
                .collect()
        };
        let phi = to_fp(&self.ring.phi);
        let a = to_fp(&self.coeffs);
        let inv0 = fp_inverse(&a, &phi, p).ok_or_else(|| Error::NotAUnit(format!("{self:?}")))?;
        let mut y = PadicCycNumber {
            ring: self.ring.clone(),
            coeffs: self.ring.reduce(inv0.into_iter().map(IBig::from).collect()),
        };
        let two = Self::from_int(&self.ring, &IBig::from(2u8));
        let mut prec = 1;
        while prec < self.ring.precision {
            y = &y * &(&two - &(self * &y));
            prec *= 2;
        }
        debug_assert!((self * &y) == Self::one(&self.ring));
        Ok(y)
    }
}

// Polynomials over F_p, lowest degree first.
fn fp_trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
    a
}

fn fp_inv(a: u64, p: u64) -> u64 {
    crate::exactnum::int::mod_pow(a, p - 2, p)
}

fn fp_divrem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let mut r = a.to_vec();
    let b = fp_trim(b.to_vec());
    let db = b.len() - 1;
    let lead_inv = fp_inv(b[db], p);
    let mut q = vec![0; r.len().saturating_sub(db).max(1)];
    while r.len() > db && !(r.len() == 1 && r[0] == 0) {
        let dr = r.len() - 1;
        let c = r[dr] * lead_inv % p;
        q[dr - db] = c;
        for (i, &bi) in b.iter().enumerate() {
            r[dr - db + i] = (r[dr - db + i] + p - c * bi % p) % p;
        }
        r = fp_trim(r);
        if dr == 0 {
            break;
        }
    }
    (fp_trim(q), r)
}

fn fp_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    fp_trim(out)
}

fn fp_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let get = |v: &[u64], i: usize| v.get(i).copied().unwrap_or(0);
    fp_trim((0..n).map(|i| (get(a, i) + p - get(b, i)) % p).collect())
}

// u with a u ≡ 1 mod (f, p), if a is a unit there.
fn fp_inverse(a: &[u64], f: &[u64], p: u64) -> Option<Vec<u64>> {
    let (mut r0, mut r1) = (fp_trim(f.to_vec()), fp_trim(a.to_vec()));
    let (mut s0, mut s1) = (vec![0], vec![1]);
    while !(r1.len() == 1 && r1[0] == 0) {
        let (q, r2) = fp_divrem(&r0, &r1, p);
        let s2 = fp_sub(&s0, &fp_mul(&q, &s1, p), p);
        r0 = std::mem::replace(&mut r1, r2);
        s0 = std::mem::replace(&mut s1, s2);
    }
    if r0.len() != 1 || r0[0] == 0 {
        return None;
    }
    let c = fp_inv(r0[0], p);
    Some(s0.into_iter().map(|x| x * c % p).collect())
}

impl Add for &PadicCycNumber {
    type Output = PadicCycNumber;

    fn add(self, rhs: &PadicCycNumber) -> PadicCycNumber {
        let m = &self.ring.modulus;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| {
                let s = a + b;
                if &s >= m {
                    s - m
                } else {
                    s
                }
            })
            .collect();
        PadicCycNumber { ring: self.ring.clone(), coeffs }
    }
}

impl Neg for &PadicCycNumber {
    type Output = PadicCycNumber;

    fn neg(self) -> PadicCycNumber {
        let m = &self.ring.modulus;
        let coeffs = self.coeffs.iter().map(|a| if *a == IBig::ZERO { IBig::ZERO } else { m - a }).collect();
        PadicCycNumber { ring: self.ring.clone(), coeffs }
    }
}

impl Sub for &PadicCycNumber {
    type Output = PadicCycNumber;

    fn sub(self, rhs: &PadicCycNumber) -> PadicCycNumber {
        self + &(-rhs)
    }
}

impl Mul for &PadicCycNumber {
    type Output = PadicCycNumber;

    fn mul(self, rhs: &PadicCycNumber) -> PadicCycNumber {
        let n = self.coeffs.len();
        let mut out = vec![IBig::ZERO; 2 * n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == IBig::ZERO {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        PadicCycNumber { ring: self.ring.clone(), coeffs: self.ring.reduce(out) }
    }
}

impl fmt::Debug for PadicCycNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{:?}", self.ring, self.coeffs)
    }
}

impl Serialize for PadicCycNumber {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("PadicCycNumber", 4)?;
        st.serialize_field("p", &self.ring.p)?;
        st.serialize_field("M", &self.ring.precision)?;
        st.serialize_field("r", &self.ring.r)?;
        let c: Vec<String> = self.coeffs.iter().map(IBig::to_string).collect();
        st.serialize_field("coeffs", &c)?;
        st.end()
    }
}

// Image of ζ_m in the ring, when Q(ζ_m) sits inside Q(ζ_r).
fn root_image(ring: &Arc<PadicRing>, m: u64) -> Option<PadicCycNumber> {
    let r = ring.r;
    if r % m == 0 {
        return Some(PadicCycNumber::root(ring, (r / m) as i64));
    }
    // r odd, m = 2k with k | r: ζ_{2k} = -ζ_k^{(k+1)/2}
    let k = m / 2;
    if m % 2 == 0 && r % 2 == 1 && r % k == 0 {
        let e = (r / k) * (k + 1) / 2;
        return Some(-&PadicCycNumber::root(ring, e as i64));
    }
    None
}

/// The image of an algebraic number under `ζ_r ↦ x`.
pub fn embed_algebraic(x: &CyclotomicNumber, ring: &Arc<PadicRing>) -> Result<PadicCycNumber> {
    let m = x.conductor();
    let z = root_image(ring, m)
        .ok_or_else(|| Error::Precondition(format!("Q(ζ{m}) does not embed in the ring generated by ζ{}", ring.r)))?;
    let mut acc = PadicCycNumber::zero(ring);
    let mut pw = PadicCycNumber::one(ring);
    for c in x.coeffs() {
        if !c.is_zero() {
            acc = &acc + &(&pw * &PadicCycNumber::from_rational(ring, &c)?);
        }
        pw = &pw * &z;
    }
    Ok(acc)
}

/// `χ(a)` in the ring; fails when the character's values do not embed.
fn character_table(chi: &DirichletCharacter, ring: &Arc<PadicRing>) -> Result<Vec<Option<PadicCycNumber>>> {
    let z = root_image(ring, chi.order()).ok_or_else(|| {
        Error::Precondition(format!("character of order {} does not embed alongside ζ{}", chi.order(), ring.r))
    })?;
    Ok((0..chi.modulus() as i64)
        .map(|a| chi.value_exponent(a).map(|v| z.pow(v)))
        .collect())
}

/// A residue class `a + d p^N Z_p` and the twist power of `ξ` used as `z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MeasureQuery {
    pub d: u64,
    pub level: u32,
    pub twist_power: u64,
    pub a: u64,
}

/// The measure on one level, with `1/(z^{dp^N} - 1)` computed once.
pub struct Level {
    z: PadicCycNumber,
    size: u64,
    scale: PadicCycNumber,
}

impl Level {
    pub fn new(ring: &Arc<PadicRing>, twist: TwistSpec, twist_power: u64, d: u64, level: u32) -> Result<Self> {
        if twist.r != ring.r {
            return Err(Error::Precondition(format!("twist order {} differs from ring order {}", twist.r, ring.r)));
        }
        if gcd(ring.r, ring.p * d) != 1 {
            return Err(Error::Precondition(format!("gcd(r, p d) = gcd({}, {}) is not 1", ring.r, ring.p * d)));
        }
        if twist.kills(twist_power as i64) {
            return Err(Error::Precondition(format!("r = {} divides the twist power {twist_power}", ring.r)));
        }
        let z = PadicCycNumber::root(ring, twist.exponent(twist_power as i64) as i64);
        let size = d * ring.p.pow(level);
        let scale = (&z.pow(size) - &PadicCycNumber::one(ring)).inv()?;
        Ok(Level { z, size, scale })
    }

    /// Number of residue classes, `d p^N`.
    pub fn size(&self) -> u64 {
        self.size
    }

    /// `z^a / (z^{dp^N} - 1)`.
    pub fn measure(&self, a: u64) -> Result<PadicCycNumber> {
        if a >= self.size {
            return Err(Error::Precondition(format!("residue {a} is not below {}", self.size)));
        }
        Ok(&self.z.pow(a) * &self.scale)
    }
}

pub fn measure_value(q: &MeasureQuery, twist: TwistSpec, ring: &Arc<PadicRing>) -> Result<PadicCycNumber> {
    Level::new(ring, twist, q.twist_power, q.d, q.level)?.measure(q.a)
}

/// Whether `Σ_{i<p} μ(a + i d p^N + d p^{N+1}) = μ(a + d p^N)` for every
/// `a < d p^N`.
pub fn distribution_check(ring: &Arc<PadicRing>, twist: TwistSpec, twist_power: u64, d: u64, level: u32) -> Result<bool> {
    let coarse = Level::new(ring, twist, twist_power, d, level)?;
    let fine = Level::new(ring, twist, twist_power, d, level + 1)?;
    for a in 0..coarse.size() {
        let mut acc = PadicCycNumber::zero(ring);
        for i in 0..ring.p {
            acc = &acc + &fine.measure(a + i * coarse.size())?;
        }
        if acc != coarse.measure(a)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `Σ_{a < d p^N} χ(a) f(a) μ_z(a + d p^N Z_p)` for a polynomial `f` with
/// the given coefficients (constant first). Without a character the sum
/// runs over every residue.
pub fn riemann_sum(
    f: &[Rational],
    chi: Option<&DirichletCharacter>,
    twist: TwistSpec,
    twist_power: u64,
    d: u64,
    ring: &Arc<PadicRing>,
    level: u32,
) -> Result<PadicCycNumber> {
    if let Some(c) = chi {
        if c.modulus() != d {
            return Err(Error::Precondition(format!("character modulus {} is not d = {d}", c.modulus())));
        }
    }
    let coeffs: Vec<IBig> = f.iter().map(|q| ring.rational(q)).collect::<Result<_>>()?;
    let table = chi.map(|c| character_table(c, ring)).transpose()?;
    let lv = Level::new(ring, twist, twist_power, d, level)?;
    let r = ring.r;
    let e = twist.exponent(twist_power as i64);
    // bins[k] = Σ χ-free part over the a with z^a = x^k; character values
    // are folded in per residue class mod d
    let mut acc = PadicCycNumber::zero(ring);
    let classes = if table.is_some() { d } else { 1 };
    for class in 0..classes {
        let chi_val = match &table {
            Some(t) => match &t[class as usize] {
                Some(v) => Some(v.clone()),
                None => continue,
            },
            None => None,
        };
        let mut bins = vec![IBig::ZERO; r as usize];
        let mut a = class;
        while a < lv.size() {
            let ai = IBig::from(a);
            let mut v = IBig::ZERO;
            for c in coeffs.iter().rev() {
                v = (v * &ai + c) % &ring.modulus;
            }
            let k = (a % r * e % r) as usize;
            bins[k] += v;
            a += classes;
        }
        let mut part = PadicCycNumber::zero(ring);
        for (k, v) in bins.into_iter().enumerate() {
            if v != IBig::ZERO {
                part = &part + &(&PadicCycNumber::root(ring, k as i64) * &PadicCycNumber::from_int(ring, &v));
            }
        }
        if let Some(cv) = chi_val {
            part = &part * &cv;
        }
        acc = &acc + &part;
    }
    Ok(&acc * &lv.scale)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelRow {
    pub level: u32,
    pub valuation: u32,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConvergenceReport {
    pub p: u64,
    pub precision: u32,
    pub r: u64,
    pub j: u64,
    pub d: u64,
    pub chi: Vec<u64>,
    pub n: usize,
    pub target: CyclotomicNumber,
    pub rows: Vec<LevelRow>,
    pub pass: bool,
}

/// Compares level sums of `χ(x) x^n` with `B_{n+1,χ,ξ}/(n+1)` at levels
/// `1..=levels`. Valuations at or above `M - 4` are treated as saturated.
pub fn convergence_check(
    n: usize,
    chi: &DirichletCharacter,
    twist: TwistSpec,
    p: u64,
    levels: u32,
    precision: u32,
) -> Result<ConvergenceReport> {
    if p as usize <= n + 1 {
        return Err(Error::Precondition(format!("p = {p} must exceed n + 1 = {}", n + 1)));
    }
    if levels == 0 {
        return Err(Error::Precondition("at least one level is needed".into()));
    }
    let ring = PadicRing::new(p, precision, twist.r)?;
    let d = chi.modulus();
    if gcd(twist.r, p * d) != 1 {
        return Err(Error::Precondition(format!("gcd(r, p d) = gcd({}, {}) is not 1", twist.r, p * d)));
    }
    let set = Setting::new(chi.clone(), twist);
    let b = set.bernoulli(1, n + 1)?;
    let target = b[n + 1].scale(&Rational::new(1, n as i64 + 1));
    let embedded = embed_algebraic(&target, &ring)?;
    let mut f = vec![Rational::ZERO; n + 1];
    f[n] = Rational::ONE;
    let chi_arg = if chi.modulus() == 1 { None } else { Some(chi) };
    let mut rows = Vec::new();
    for level in 1..=levels {
        let s = riemann_sum(&f, chi_arg, twist, 1, d, &ring, level)?;
        let diff = &s - &embedded;
        rows.push(LevelRow { level, valuation: diff.valuation(), exact: diff.is_zero() });
    }
    let trusted = precision.saturating_sub(4);
    let capped: Vec<u32> = rows.iter().map(|r| r.valuation.min(trusted)).collect();
    let monotone = capped.windows(2).all(|w| w[0] <= w[1]);
    let all_exact = rows.iter().all(|r| r.exact);
    let grows = capped.last() > capped.first();
    Ok(ConvergenceReport {
        p,
        precision,
        r: twist.r,
        j: twist.j,
        d,
        chi: chi.exponents().to_vec(),
        n,
        target,
        rows,
        pass: all_exact || (monotone && grows),
    })
}
