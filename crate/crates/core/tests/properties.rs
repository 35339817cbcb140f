use dashu_int::IBig;
use proptest::prelude::*;

use twistsym::bernoulli::{BernoulliPolynomial, Setting, TwistSpec};
use twistsym::dirichlet::{all_characters, DirichletCharacter};
use twistsym::exactnum::cyclotomic_polynomial;
use twistsym::exactnum::int::{divisors, euler_phi, gcd};
use twistsym::padic::{riemann_sum, PadicCycNumber, PadicRing};
use twistsym::series::{exp_rational, TruncatedSeries};
use twistsym::{CyclotomicNumber, Rational};

fn rational() -> impl Strategy<Value = Rational> {
    (-40i64..40, 1i64..12).prop_map(|(n, d)| Rational::new(n, d))
}

fn nonzero_rational() -> impl Strategy<Value = Rational> {
    rational().prop_filter("nonzero", |q| !q.is_zero())
}

const FIELDS: [u64; 7] = [1, 3, 4, 5, 7, 8, 12];

fn cyc_in(m: u64) -> impl Strategy<Value = CyclotomicNumber> {
    prop::collection::vec(rational(), m as usize).prop_map(move |c| CyclotomicNumber::from_coeffs(m, &c).unwrap())
}

fn cyc_triple() -> impl Strategy<Value = (CyclotomicNumber, CyclotomicNumber, CyclotomicNumber)> {
    prop::sample::select(FIELDS.to_vec()).prop_flat_map(|m| (cyc_in(m), cyc_in(m), cyc_in(m)))
}

fn series_in(m: u64, order: usize) -> impl Strategy<Value = TruncatedSeries> {
    prop::collection::vec(cyc_in(m), order + 1).prop_map(|c| TruncatedSeries::new(c).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_field_axioms(a in rational(), b in rational(), c in rational(), nz in nonzero_rational()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        prop_assert!((&nz * &nz.recip().unwrap()).is_one());
        prop_assert_eq!(a.to_string().parse::<Rational>().unwrap(), a);
    }

    #[test]
    fn cyclotomic_field_axioms((a, b, c) in cyc_triple()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        if !a.is_zero() {
            prop_assert!((&a * &a.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn embedding_is_a_ring_map((a, b, _) in cyc_triple(), k in 1u64..4) {
        let big = a.conductor() * k;
        let (ea, eb) = (a.embed(big).unwrap(), b.embed(big).unwrap());
        prop_assert_eq!(&ea * &eb, (&a * &b).embed(big).unwrap());
        prop_assert_eq!(&ea + &eb, (&a + &b).embed(big).unwrap());
        prop_assert_eq!(ea, a);
    }

    #[test]
    fn roots_of_unity_multiply(m in prop::sample::select(FIELDS.to_vec()), j in -30i64..30, k in -30i64..30) {
        let z = |e| CyclotomicNumber::root_of_unity(m, e).unwrap();
        prop_assert_eq!(&z(j) * &z(k), z(j + k));
        prop_assert!(z(m as i64 * j).is_one());
    }

    #[test]
    fn series_ring_laws((a, b, c) in series_triple()) {
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        if !b.coeffs()[0].is_zero() {
            prop_assert_eq!(a.mul(&b).div(&b).unwrap(), a.clone());
        } else {
            prop_assert!(a.div(&b).is_err());
        }
    }

    #[test]
    fn exponential_is_a_homomorphism(p in rational(), q in rational(), w in rational()) {
        let e = |x: &Rational| exp_rational(x, 1, 8);
        prop_assert_eq!(e(&p).mul(&e(&q)), e(&(&p + &q)));
        prop_assert_eq!(e(&p).scale_variable(&w), e(&(&p * &w)));
    }

    #[test]
    fn scale_variable_is_multiplicative((a, b, _) in series_triple(), u in nonzero_rational(), v in nonzero_rational()) {
        prop_assert_eq!(a.scale_variable(&u).scale_variable(&v), a.scale_variable(&(&u * &v)));
        prop_assert_eq!(a.mul(&b).scale_variable(&u), a.scale_variable(&u).mul(&b.scale_variable(&u)));
    }

    #[test]
    fn characters_are_multiplicative(d in 1u64..=30, a in 0i64..200, b in 0i64..200) {
        for chi in all_characters(d).unwrap() {
            prop_assert_eq!(chi.eval(a * b), &chi.eval(a) * &chi.eval(b));
            prop_assert_eq!(chi.value_exponent(a).is_some(), gcd(a as u64 % d.max(1), d) == 1 || d == 1);
        }
    }

    #[test]
    fn character_orthogonality(d in 1u64..=30, a in 0i64..60) {
        let chars = all_characters(d).unwrap();
        let m = chars.iter().map(|c| c.order()).fold(1, twistsym::exactnum::int::lcm);
        let sum = chars.iter().fold(CyclotomicNumber::zero(m).unwrap(), |acc, c| &acc + &c.eval(a));
        let want = if (a as u64) % d == 1 % d { euler_phi(d) as i64 } else { 0 };
        prop_assert_eq!(sum, CyclotomicNumber::from_int(1, want).unwrap());
    }

    #[test]
    fn cyclotomic_polynomials_multiply_to_x_m_minus_one(m in 1u64..=30) {
        let mut prod = vec![IBig::ONE];
        for d in divisors(m) {
            let f = cyclotomic_polynomial(d).unwrap();
            prop_assert_eq!(f.len() as u64 - 1, euler_phi(d));
            let mut out = vec![IBig::ZERO; prod.len() + f.len() - 1];
            for (i, x) in prod.iter().enumerate() {
                for (j, y) in f.iter().enumerate() {
                    out[i + j] += x * y;
                }
            }
            prod = out;
        }
        let mut want = vec![IBig::ZERO; m as usize + 1];
        want[0] = IBig::from(-1);
        want[m as usize] = IBig::ONE;
        prop_assert_eq!(prod, want);
    }

    #[test]
    fn bernoulli_shift_identity(
        (d, r, k) in setting(),
        n in 0usize..7,
        x in rational(),
        y in rational(),
    ) {
        let chars = all_characters(d).unwrap();
        let chi: DirichletCharacter = chars[k % chars.len()].clone();
        let b = Setting::new(chi, TwistSpec::new(r, 1).unwrap()).bernoulli(1, n).unwrap();
        prop_assert!(b[0].is_zero());
        let bn = BernoulliPolynomial::new(&b, n).unwrap();
        prop_assert_eq!(bn.eval(&Rational::ZERO), b[n].clone());
        // B_n(x + y) = Σ_k C(n,k) B_k(x) y^{n-k}
        let mut rhs = CyclotomicNumber::zero(1).unwrap();
        for k in 0..=n {
            let bk = BernoulliPolynomial::new(&b, k).unwrap().eval(&x);
            let c = Rational::from(twistsym::exactnum::int::binomial(n, k)) * y.pow((n - k) as i64).unwrap();
            rhs = &rhs + &bk.scale(&c);
        }
        prop_assert_eq!(bn.eval(&(&x + &y)), rhs);
    }

    #[test]
    fn padic_valuation_and_linearity(
        p in prop::sample::select(vec![5u64, 7, 11]),
        r in prop::sample::select(vec![3u64, 4]),
        k in 0u32..6,
        u in 1i64..1000,
        f in prop::collection::vec(rational(), 1..4),
        g in prop::collection::vec(rational(), 1..4),
        c in rational(),
    ) {
        prop_assume!(u as u64 % p != 0 && gcd(r, p) == 1);
        let p_integral = |q: &Rational| q.denom() % p != 0;
        prop_assume!(f.iter().chain(&g).chain([&c]).all(p_integral));
        let ring = PadicRing::new(p, 20, r).unwrap();
        let pk = PadicCycNumber::from_int(&ring, &IBig::from(p).pow(k as usize));
        let unit = PadicCycNumber::from_int(&ring, &IBig::from(u));
        let v = (&pk * &unit).valuation();
        prop_assert_eq!(v, k);
        let tw = TwistSpec::new(r, 1).unwrap();
        let sum = |h: &[Rational]| riemann_sum(h, None, tw, 1, 1, &ring, 1).unwrap();
        let len = f.len().max(g.len());
        let pad = |h: &[Rational]| { let mut h = h.to_vec(); h.resize(len, Rational::ZERO); h };
        let fg: Vec<Rational> = pad(&f).iter().zip(pad(&g)).map(|(a, b)| a + &b).collect();
        prop_assert_eq!(sum(&fg), &sum(&f) + &sum(&g));
        let cf: Vec<Rational> = f.iter().map(|a| a * &c).collect();
        prop_assert_eq!(sum(&cf), &PadicCycNumber::from_rational(&ring, &c).unwrap() * &sum(&f));
    }
}

fn series_triple() -> impl Strategy<Value = (TruncatedSeries, TruncatedSeries, TruncatedSeries)> {
    prop::sample::select(vec![1u64, 3, 4]).prop_flat_map(|m| (series_in(m, 5), series_in(m, 5), series_in(m, 5)))
}

fn setting() -> impl Strategy<Value = (u64, u64, usize)> {
    (prop::sample::select(vec![1u64, 3, 4, 5]), prop::sample::select(vec![3u64, 4, 5, 7]), 0usize..4)
        .prop_filter("r prime to d", |(d, r, _)| gcd(*d, *r) == 1)
}
