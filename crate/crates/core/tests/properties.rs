use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use proptest::prelude::*;

use sector_count::arith::Surd;
use sector_count::asymptotics::{
    classify_regime, main_term, predicted_count, rational_closed_form, sector_area, AlphaKind, Regime,
};
use sector_count::counting::{
    count_rational_fast, count_sector_brute, count_sector_fast, count_triangle_brute, count_triangle_fast,
    floor_certified, CountOptions, EpsSchedule, ExactExpr, SectorQuery,
};
use sector_count::slopes::first_admissible_convergent;
use sector_count::SlopeValue;

fn slope_strategy() -> impl Strategy<Value = SlopeValue> {
    prop_oneof![
        (-100i64..=100, 1i64..=50).prop_map(|(p, q)| SlopeValue::rational(p, q).unwrap()),
        (-5i64..=5, prop_oneof![-3i64..=-1, 1i64..=3], 1i64..=5, 2i64..=30)
            .prop_map(|(a, b, c, d)| SlopeValue::quadratic(a, b, c, d).unwrap()),
    ]
}

/// `m·2^-k` in roughly `[2^-40, 1/2)`.
fn eps_strategy() -> impl Strategy<Value = BigRational> {
    (1u64..(1 << 20), 21u32..=40).prop_map(|(m, k)| BigRational::new(m.into(), BigInt::one() << k))
}

fn query_strategy(max_r: i64) -> impl Strategy<Value = SectorQuery> {
    (slope_strategy(), eps_strategy(), 1i64..=max_r).prop_filter_map("eps too wide", |(a, e, r)| {
        SectorQuery::new(a, e, BigRational::from_integer(r.into())).ok()
    })
}

fn opts() -> CountOptions {
    CountOptions::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn fast_equals_brute(query in query_strategy(3000)) {
        let brute = count_sector_brute(&query, &opts()).unwrap();
        let fast = count_sector_fast(&query, &opts()).unwrap();
        prop_assert_eq!(&fast.s, &brute.s);
        prop_assert_eq!(&fast.delta, &brute.delta);
        let tri = count_triangle_brute(&query, &opts()).unwrap();
        let (fast_tri, b) = if query.alpha().is_rational() {
            count_rational_fast(&query).unwrap()
        } else {
            let conv = first_admissible_convergent(query.alpha(), query.epsilon()).unwrap();
            count_triangle_fast(&query, &conv).unwrap()
        };
        prop_assert_eq!(&fast_tri, &tri);
        // partition identity
        prop_assert_eq!(b.total(), tri);
        prop_assert_eq!(b.delta_zero, b.m_max.clone() / b.q_used.clone());
    }

    #[test]
    fn rational_radius(query in query_strategy(500), num in 0i64..7, den in 2i64..8) {
        let r = query.radius() + BigRational::new(num.into(), den.into());
        let q = query.with_radius(r).unwrap();
        prop_assert_eq!(
            count_sector_fast(&q, &opts()).unwrap().s,
            count_sector_brute(&q, &opts()).unwrap().s
        );
    }

    #[test]
    fn monotone_in_eps_and_radius(query in query_strategy(1500), bump in 1u32..4, extra in 1i64..200) {
        let s = count_sector_fast(&query, &opts()).unwrap().s;
        let wider = query.epsilon() * BigRational::new((bump + 4).into(), 4.into());
        if let Ok(wq) = query.with_epsilon(wider) {
            prop_assert!(count_sector_fast(&wq, &opts()).unwrap().s >= s);
        }
        let bigger = query.radius() + BigRational::from_integer(extra.into());
        let bq = query.with_radius(bigger).unwrap();
        prop_assert!(count_sector_fast(&bq, &opts()).unwrap().s >= s);
    }

    #[test]
    fn symmetric_under_negation(query in query_strategy(2000)) {
        let m = query.mirrored();
        prop_assert_eq!(
            count_sector_brute(&query, &opts()).unwrap().s,
            count_sector_brute(&m, &opts()).unwrap().s
        );
        prop_assert_eq!(
            count_sector_fast(&query, &opts()).unwrap().s,
            count_sector_fast(&m, &opts()).unwrap().s
        );
    }

    #[test]
    fn lemma_bound(query in query_strategy(3000)) {
        let r = count_sector_fast(&query, &opts()).unwrap();
        let re = query.radius().to_f64().unwrap() * query.epsilon().to_f64().unwrap();
        let c = (&r.s - &r.delta).abs().to_f64().unwrap() / (1.0 + re * re);
        prop_assert!(c <= 10.0, "C = {}", c);
    }

    #[test]
    fn rational_line_only(p in -30i64..=30, q in 1i64..=30, r in 1i64..100_000, shrink in 1u32..1000) {
        let alpha = SlopeValue::rational(p, q).unwrap();
        let (p, q) = match &alpha { SlopeValue::Rational { p, q } => (p.clone(), q.clone()), _ => unreachable!() };
        let n = &p * &p + &q * &q;
        let radius = BigRational::from_integer(r.into());
        // ε = 1/(q²R·(1 + shrink/1000)·⌈√N⌉) keeps εq²R/√N < 1
        let root_ceil = n.sqrt() + 1;
        let eps = BigRational::new(1000.into(), (&q * &q) * BigInt::from(r) * (1000 + shrink) * root_ceil);
        let query = SectorQuery::new(alpha, eps, radius.clone()).unwrap();
        let s = count_sector_fast(&query, &opts()).unwrap().s;
        let want = floor_certified(&ExactExpr::OverSqrt {
            numerator: radius,
            radicand: Surd::from_integer(n),
        }).unwrap();
        prop_assert_eq!(&s, &want);
        // line-only prediction within 2
        let v = classify_regime(&AlphaKind::Rational, &BigRational::from_integer(2.into())).unwrap();
        let pred = predicted_count(&query, &v).unwrap().value.mid_f64();
        prop_assert!((s.to_f64().unwrap() - pred).abs() <= 2.0);
    }

    #[test]
    fn beta_in_range(p in -50i64..=50, q in 1i64..=50, e in eps_strategy(), r in 1i64..1_000_000) {
        let alpha = SlopeValue::rational(p, q).unwrap();
        let (p, q) = match &alpha { SlopeValue::Rational { p, q } => (p.clone(), q.clone()), _ => unreachable!() };
        let f = rational_closed_form(&p, &q, &e, &BigRational::from_integer(r.into()), true).unwrap();
        let cap = BigRational::new(BigInt::one(), BigInt::from(4) * &q * &q);
        prop_assert!(!f.beta_exact.is_negative());
        prop_assert!(f.beta_exact.cmp_rational(&cap).is_le());
        prop_assert!(f.frac_arg.contains(&BigRational::from_integer(f.frac_floor.clone())) || f.frac_arg.lo() > &BigRational::from_integer(f.frac_floor.clone()));
    }

    #[test]
    fn area_close_to_main_term(query in query_strategy(100_000)) {
        prop_assume!(query.epsilon() <= &BigRational::new(1.into(), 10.into()));
        let area = sector_area(&query);
        let rel = area.relative_width().unwrap();
        prop_assert!(rel <= BigRational::new(BigInt::one(), BigInt::one() << 64));
        let main = main_term(&query).enclose(256);
        let diff = area.sub(&main);
        let e = query.epsilon();
        let bound = BigRational::from_integer(2.into()) * e * e * e * query.radius() * query.radius();
        prop_assert!(diff.hi() <= &bound && diff.lo() >= &-bound.clone());
    }

    #[test]
    fn regimes_are_piecewise_constant(eta_num in 4i64..40, lam_num in 0i64..400) {
        let eta = BigRational::new(eta_num.into(), 4.into());
        let lambda = BigRational::new(lam_num.into(), 100.into());
        let kind = AlphaKind::IrrationalType(eta.clone());
        let v = classify_regime(&kind, &lambda).unwrap();
        let one = BigRational::one();
        let b = [
            BigRational::new(1.into(), 2.into()),
            (&one + &eta) / (&one + BigRational::from_integer(2.into()) * &eta),
            &one + eta.recip(),
            &one + &eta,
        ];
        let expected = if lambda < b[0] { Regime::Slow }
            else if lambda < b[1] || lambda < b[2] { Regime::Main }
            else if lambda <= b[3] { Regime::Gap }
            else { Regime::VeryQuick };
        prop_assert_eq!(v.regime, expected);
        prop_assert_eq!(v.predicted_error_exponent.is_some(), matches!(v.regime, Regime::Slow | Regime::Main));
        // rational table: exponent always present
        let r = classify_regime(&AlphaKind::Rational, &lambda).unwrap();
        prop_assert!(r.predicted_error_exponent.is_some());
    }

    #[test]
    fn dyadic_schedule_brackets_target(lam_num in 0i64..30, lam_den in 1i64..6, r in 10i64..1_000_000) {
        let lambda = BigRational::new(lam_num.into(), lam_den.into());
        let s = EpsSchedule::unit(lambda.clone()).unwrap();
        let radius = BigRational::from_integer(r.into());
        let e = s.epsilon_at(&radius).unwrap();
        // ε^b ≤ R^-a < (ε + ulp)^b
        let (a, b) = (lambda.numer().to_u32().unwrap(), lambda.denom().to_u32().unwrap());
        let target: BigRational = Pow::pow(radius.recip(), a);
        prop_assert!(Pow::pow(&e.value, b) <= target);
        prop_assert!(Pow::pow(&e.value + &e.perturbation, b) > target);
        prop_assert!(!e.value.is_zero());
    }
}
