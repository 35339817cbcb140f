mod common;

use common::{generalized, power_sum as oracle_power_sum, Oc};
use dashu_int::IBig;
use dashu_ratio::RBig;
use twistsym::bernoulli::{gen_bernoulli_numbers, power_sum, power_sum_egf_check, BernoulliPolynomial, Setting, TwistSpec};
use twistsym::dirichlet::{all_characters, unit_group_structure, DirichletCharacter};
use twistsym::exactnum::cyclotomic_polynomial;
use twistsym::identities::{redundancy_check, verify_instance, Mode, TheoremInstance, YSpec};
use twistsym::padic::{embed_algebraic, measure_value, riemann_sum, MeasureQuery, PadicCycNumber, PadicRing};
use twistsym::quotients::{closed_form_series, consistency_check, expansion_coefficients, find_form, form_weight, QuotientType};
use twistsym::series::{egf_coefficient, TruncatedSeries};
use twistsym::{CyclotomicNumber, Rational};

fn rq(s: &str) -> Rational {
    s.parse().unwrap()
}

fn z3(k: i64) -> CyclotomicNumber {
    CyclotomicNumber::root_of_unity(3, k).unwrap()
}

/// `(ζ3² - 1)/3`, built in the oracle.
fn b1_zeta3() -> Oc {
    Oc::zeta(3, 2).sub(&Oc::int(3, 1)).scale(&(RBig::ONE / RBig::from(IBig::from(3))))
}

fn trivial() -> DirichletCharacter {
    DirichletCharacter::trivial(1).unwrap()
}

fn mobius(n: u64) -> i32 {
    let mut n = n;
    let mut mu = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            mu = -mu;
        }
        p += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    mu
}

/// `Φ_m = Π_{d | m} (x^d - 1)^{μ(m/d)}`, as integer coefficients.
fn phi_mobius(m: u64) -> Vec<i64> {
    let mut num = vec![1i64];
    let mut den = vec![1i64];
    let mul = |a: &[i64], b: &[i64]| {
        let mut out = vec![0i64; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    };
    for d in 1..=m {
        if m % d != 0 {
            continue;
        }
        let mut f = vec![0i64; d as usize + 1];
        f[0] = -1;
        f[d as usize] = 1;
        match mobius(m / d) {
            1 => num = mul(&num, &f),
            -1 => den = mul(&den, &f),
            _ => {}
        }
    }
    // exact long division by the monic-up-to-sign denominator
    let lead = *den.last().unwrap();
    let mut quo = vec![0i64; num.len() - den.len() + 1];
    for i in (0..quo.len()).rev() {
        let c = num[i + den.len() - 1] / lead;
        quo[i] = c;
        for (k, dk) in den.iter().enumerate() {
            num[i + k] -= c * dk;
        }
    }
    assert!(num.iter().all(|&c| c == 0));
    quo
}

#[test]
fn cyclotomic_polynomials_match_mobius_product() {
    assert_eq!(
        cyclotomic_polynomial(6).unwrap(),
        vec![IBig::from(1), IBig::from(-1), IBig::from(1)]
    );
    for m in 1..=40 {
        let want: Vec<IBig> = phi_mobius(m).into_iter().map(IBig::from).collect();
        assert_eq!(cyclotomic_polynomial(m).unwrap(), want, "Φ_{m}");
    }
}

#[test]
fn inverse_of_zeta3_minus_one() {
    let x = &z3(1) - &CyclotomicNumber::one(3).unwrap();
    assert!(b1_zeta3().matches(&x.inv().unwrap()));
    let o = Oc::zeta(3, 1).sub(&Oc::int(3, 1));
    assert_eq!(o.inv().unwrap(), b1_zeta3());
}

fn brute_generates(g: u64, d: u64) -> bool {
    let units = (1..d).filter(|a| common::lcm(*a, d) == a * d).count();
    let mut seen = std::collections::BTreeSet::new();
    let mut x = 1 % d;
    for _ in 0..units {
        x = x * g % d;
        seen.insert(x);
    }
    seen.len() == units
}

#[test]
fn characters_mod_five() {
    let g = unit_group_structure(5).unwrap();
    assert_eq!((g.len(), g[0].residue, g[0].order), (1, 2, 4));
    assert!(brute_generates(2, 5));
    let chars = all_characters(5).unwrap();
    let mut orders: Vec<u64> = chars.iter().map(|c| c.order()).collect();
    orders.sort();
    assert_eq!(orders, vec![1, 2, 4, 4]);
    // χ(2) = ζ4 forces χ(3) = χ(2)^3 = -ζ4
    let chi = chars.iter().find(|c| c.eval(2) == CyclotomicNumber::root_of_unity(4, 1).unwrap()).unwrap();
    assert_eq!(chi.eval(3), -CyclotomicNumber::root_of_unity(4, 1).unwrap());
}

/// Homomorphism and support checks against brute force for every d ≤ 30.
#[test]
fn characters_are_homomorphisms() {
    for d in 1..=30u64 {
        let chars = all_characters(d).unwrap();
        let phi = (0..d).filter(|&a| common::lcm(a.max(1), d) == a.max(1) * d && (d == 1 || a > 0)).count();
        assert_eq!(chars.len(), phi.max(1), "d = {d}");
        for c in &chars {
            for a in 0..d as i64 {
                for b in 0..d as i64 {
                    assert_eq!(c.eval(a * b), &c.eval(a) * &c.eval(b));
                }
                assert_eq!(c.eval(a), c.eval(a + d as i64));
            }
        }
    }
}

#[test]
fn conductors_by_brute_force() {
    let chars = all_characters(4).unwrap();
    let nontrivial = chars.iter().find(|c| !c.is_trivial()).unwrap();
    assert_eq!(nontrivial.conductor(), (4, true));
    let chars = all_characters(6).unwrap();
    let c = chars.iter().find(|c| c.eval(5) == CyclotomicNumber::from_int(1, -1).unwrap()).unwrap();
    assert_eq!(c.conductor(), (3, false));
    // brute force: the conductor is the least f | d with χ(a) = 1 whenever
    // a ≡ 1 mod f and gcd(a, d) = 1
    for d in 1..=30u64 {
        for c in all_characters(d).unwrap() {
            let one = CyclotomicNumber::one(1).unwrap();
            let f = (1..=d)
                .filter(|f| d % f == 0)
                .find(|&f| (0..d).filter(|a| a % f == 1 % f).all(|a| c.value_exponent(a as i64).is_none() || c.eval(a as i64) == one))
                .unwrap();
            assert_eq!(c.conductor(), (f, f == d), "d = {d} {:?}", c.exponents());
        }
    }
}

#[test]
fn series_examples() {
    let m = 3;
    let t = TruncatedSeries::variable(m, 1).unwrap();
    let den = twistsym::series::exp_linear(&CyclotomicNumber::one(m).unwrap(), 1)
        .scale(&z3(1))
        .sub(&TruncatedSeries::constant(&CyclotomicNumber::one(m).unwrap(), 1));
    let s = t.div(&den).unwrap();
    assert!(s.coeffs()[0].is_zero());
    assert!(b1_zeta3().matches(&s.coeffs()[1]));
    assert!(b1_zeta3().matches(&egf_coefficient(&s, 1).unwrap()));
}

#[test]
fn bernoulli_examples_zeta3() {
    let b = gen_bernoulli_numbers(&trivial(), TwistSpec::new(3, 1).unwrap(), 1, 2).unwrap();
    assert!(b[0].is_zero());
    assert!(b1_zeta3().matches(&b[1]));
    assert_eq!(b[2], CyclotomicNumber::from_rational(1, &rq("2/3")).unwrap());
    let p1 = BernoulliPolynomial::new(&b, 1).unwrap();
    assert_eq!(p1.coeffs().len(), 2);
    assert!(p1.coeffs()[1].is_zero());
    assert!(b1_zeta3().matches(&p1.coeffs()[0]));
    let p2 = BernoulliPolynomial::new(&b, 2).unwrap();
    assert!(b1_zeta3().scale(&RBig::from(IBig::from(2))).matches(&p2.coeffs()[1]));
    assert_eq!(p2.coeffs()[0], b[2]);
}

/// Every (d, χ, r, j, w) near the standard grid against the Stirling oracle.
#[test]
fn bernoulli_numbers_match_oracle() {
    for d in [1u64, 3, 4, 5] {
        for chi in all_characters(d).unwrap() {
            for r in [3u64, 4, 5, 7] {
                if common::lcm(r, d) != r * d {
                    continue;
                }
                for (j, w) in [(1u64, 1i64), (1, 2), (2, 1), (1, 3), (3, 2), (1, -1)] {
                    let Ok(tw) = TwistSpec::new(r, j) else { continue };
                    if tw.kills(w) || tw.kills(w * d as i64) {
                        continue;
                    }
                    let set = Setting::new(chi.clone(), tw);
                    let lib = set.bernoulli(w, 6).unwrap();
                    let e = (j as i64 * w).rem_euclid(r as i64);
                    let want = generalized(&chi, r, e, 6);
                    for n in 0..=6 {
                        assert!(want[n].matches(&lib[n]), "d={d} chi={:?} r={r} j={j} w={w} n={n}: {}", chi.exponents(), lib[n]);
                    }
                }
            }
        }
    }
}

#[test]
fn power_sums_match_direct_summation() {
    for d in [1u64, 4, 5] {
        for chi in all_characters(d).unwrap() {
            for r in [3u64, 7] {
                let tw = TwistSpec::new(r, 1).unwrap();
                for upper in [0u64, 1, 5, 11] {
                    for k in 0..4u32 {
                        let got = power_sum(k as usize, upper, &chi, tw, 2);
                        assert!(oracle_power_sum(&chi, r, 2, upper, k).matches(&got));
                    }
                }
            }
        }
    }
}

#[test]
fn power_sum_egf_examples() {
    let tw = TwistSpec::new(3, 1).unwrap();
    assert!(power_sum_egf_check(&trivial(), tw, 2, 10).unwrap().pass());
    let chi4 = all_characters(4).unwrap().into_iter().find(|c| !c.is_trivial()).unwrap();
    assert!(power_sum_egf_check(&chi4, tw, 2, 10).unwrap().pass());
    assert!(power_sum_egf_check(&trivial(), tw, 3, 4).is_err());
    // w = 3 is refused by the precondition, but the series identity itself
    // still holds there since ξ^4 e^{4t} - 1 stays a unit
    assert!(power_sum_egf_check(&chi4, tw, 3, 10).is_err());
    let set = Setting::new(chi4.clone(), tw);
    let one = Rational::ONE;
    let top = set.shifted_exponential(12, 1, &one, 10);
    let bottom = set.shifted_exponential(4, 1, &one, 10);
    let closed = top.mul(&set.character_exponential_sum(4, 1, &one, 10)).div(&bottom).unwrap();
    for k in 0..=10u32 {
        assert!(oracle_power_sum(&chi4, 3, 1, 11, k).matches(&egf_coefficient(&closed, k as usize).unwrap()));
    }
}

#[test]
fn gamma_one_examples() {
    let set = Setting::new(trivial(), TwistSpec::new(3, 1).unwrap());
    let g1: QuotientType = "G1".parse().unwrap();
    let s = closed_form_series(g1, &set, &[1, 2], &[Rational::ZERO], 8).unwrap();
    // closed form is t/(ζ3 e^t - 1), whose EGF coefficients are B_{n,ζ3}
    let b = set.bernoulli(1, 8).unwrap();
    for n in 0..=8 {
        assert_eq!(egf_coefficient(&s, n).unwrap(), b[n]);
    }
    for name in ["G1/F1", "G1/F2"] {
        let f = find_form(name).unwrap();
        let v = expansion_coefficients(&f, &set, &[1, 2], &[Rational::ZERO], 1).unwrap();
        assert!(b1_zeta3().matches(&v[1]), "{name}");
    }
    assert_eq!(form_weight(&find_form("G1/F1").unwrap(), &[1, 2]).unwrap(), Rational::ONE);
    assert_eq!(form_weight(&find_form("L23:0/F1").unwrap(), &[2, 3, 4]).unwrap(), Rational::from_int(576));
    assert_eq!(form_weight(&find_form("L12:1/F1").unwrap(), &[2, 3, 4]).unwrap(), Rational::ONE);
    assert!(consistency_check(g1, &set, &[1, 2], &[Rational::ZERO], 8, None).unwrap().pass());
    let rep = consistency_check(g1, &set, &[2, 1], &[Rational::ZERO], 8, None).unwrap();
    assert!(rep.pass());
    assert_eq!(form_weight(&find_form("G1/F1").unwrap(), &[2, 1]).unwrap(), Rational::from_int(2));
    // unit weight would be wrong at w = (2, 1)
    let bad = consistency_check(g1, &set, &[2, 1], &[Rational::ZERO], 8, Some(&Rational::ONE)).unwrap();
    assert!(!bad.pass());
    // the form at n = 1 is 2 B_1 while the closed form gives B_1
    let f = find_form("G1/F1").unwrap();
    let v = expansion_coefficients(&f, &set, &[2, 1], &[Rational::ZERO], 1).unwrap();
    assert!(b1_zeta3().scale(&RBig::from(IBig::from(2))).matches(&v[1]));
    assert!(b1_zeta3().matches(&rep.closed_form[1]));
}

fn inst(theorem: u8, w: &[u64], n_max: usize, y: YSpec) -> TheoremInstance {
    TheoremInstance { theorem, d: 1, chi: vec![], r: 3, j: 1, w: w.to_vec(), n_max, y }
}

#[test]
fn theorem_examples() {
    let rep = verify_instance(&inst(1, &[1, 2], 2, YSpec::Points(vec![Rational::ZERO, Rational::ZERO])), Mode::AsStated).unwrap();
    assert!(rep.pass);
    let four_thirds = CyclotomicNumber::from_rational(3, &rq("4/3")).unwrap();
    for s in &rep.sides {
        assert_eq!(s.values[2][0], four_thirds);
    }

    let i3 = inst(3, &[1, 2], 1, YSpec::Points(vec![Rational::ZERO]));
    let rep = verify_instance(&i3, Mode::AsStated).unwrap();
    assert!(!rep.pass);
    let w = rep.witness.unwrap();
    assert_eq!((w.n, w.y.clone()), (1, vec![Rational::ZERO]));
    assert!(b1_zeta3().matches(&w.values[0]));
    assert!(b1_zeta3().scale(&RBig::from(IBig::from(2))).matches(&w.values[1]));
    let rep = verify_instance(&i3, Mode::Normalized).unwrap();
    assert!(rep.pass);

    let rep = verify_instance(&inst(11, &[1, 1, 2], 1, YSpec::Grid), Mode::AsStated).unwrap();
    assert!(rep.pass);
    for s in &rep.sides {
        assert!(s.values[1].iter().all(|v| *v == z3(1)));
    }
}

#[test]
fn redundancy_examples() {
    let set5 = Setting::new(trivial(), TwistSpec::new(5, 1).unwrap());
    assert!(redundancy_check(&set5, &[1, 2, 3], 5).unwrap().pass());
    let set3 = Setting::new(trivial(), TwistSpec::new(3, 1).unwrap());
    assert!(redundancy_check(&set3, &[1, 1, 2], 1).unwrap().pass());
}

#[test]
fn equal_w_passes_every_theorem_as_stated() {
    for th in 1..=11u8 {
        let arity = twistsym::identities::theorem(th).unwrap().arity;
        for r in [4u64, 5] {
            for v in [1u64, 2, 3] {
                let i = TheoremInstance { r, ..inst(th, &vec![v; arity], 3, YSpec::Grid) };
                match verify_instance(&i, Mode::AsStated) {
                    Ok(rep) => assert!(rep.pass, "{i}"),
                    Err(e) => assert!(matches!(e, twistsym::Error::Precondition(_)), "{i}: {e}"),
                }
            }
        }
    }
}

#[test]
fn padic_examples() {
    let ring = PadicRing::new(5, 20, 3).unwrap();
    let x = &PadicCycNumber::root(&ring, 1) - &PadicCycNumber::one(&ring);
    assert_eq!(&x * &x.inv().unwrap(), PadicCycNumber::one(&ring));
    // μ(0 + 5 Z_5) = 1/(ζ3^5 - 1) = (ζ3 - 1)/3
    let tw = TwistSpec::new(3, 1).unwrap();
    let mu = measure_value(&MeasureQuery { d: 1, level: 1, twist_power: 1, a: 0 }, tw, &ring).unwrap();
    let want = embed_algebraic(&(&z3(1) - &CyclotomicNumber::one(3).unwrap()).scale(&rq("1/3")), &ring).unwrap();
    assert_eq!(mu, want);

    // f ≡ 1 gives 1/(ξ - 1) = B_{1,ξ} at every level
    let b1 = embed_algebraic(&(&z3(1) - &CyclotomicNumber::one(3).unwrap()).inv().unwrap(), &ring).unwrap();
    for level in 0..4 {
        assert_eq!(riemann_sum(&[Rational::ONE], None, tw, 1, 1, &ring, level).unwrap(), b1);
    }
    // f(x) = x: successive levels differ by something of positive valuation
    let f = [Rational::ZERO, Rational::ONE];
    let a = riemann_sum(&f, None, tw, 1, 1, &ring, 1).unwrap();
    let b = riemann_sum(&f, None, tw, 1, 1, &ring, 2).unwrap();
    assert!((&a - &b).valuation() > 0);
}

#[test]
fn stirling_oracle_is_sane() {
    let s = common::stirling2(5);
    assert_eq!(s[5][2], IBig::from(15));
    // classical B_{1,ξ} = 1/(ξ - 1)
    let xi = Oc::zeta(5, 2);
    let b = common::twisted_plain(&xi, 1);
    assert_eq!(b[1], xi.sub(&Oc::int(5, 1)).inv().unwrap());
}
