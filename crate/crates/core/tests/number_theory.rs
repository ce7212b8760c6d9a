//! Exhaustive checks of the cosine/sine rationality predicates, with a
//! fixed-point (160-bit) numerical oracle as an independent cross-check.

use granular::exact::{cos_rationality_class, sin_is_dyadic, CosClass, Dyadic};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

const PREC: u64 = 160;
/// Values within 2^-120 of an integer multiple are treated as exact hits.
const THRESHOLD_BITS: u64 = 120;

fn dyadics_in_open_unit(k_max: u32) -> impl Iterator<Item = Dyadic> {
    (1..=k_max).flat_map(|k| (1i64..(1 << k)).step_by(2).map(move |p| Dyadic::new(p, k)))
}

fn arctan_inv(x: u32) -> BigInt {
    let x2 = BigInt::from(x * x);
    let mut power = (BigInt::one() << PREC) / x;
    let mut sum = power.clone();
    let mut n = 1u32;
    while !power.is_zero() {
        power /= &x2;
        let term = &power / (2 * n + 1);
        if n % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
        n += 1;
    }
    sum
}

/// pi * 2^PREC
fn pi_fixed() -> BigInt {
    16 * arctan_inv(5) - 4 * arctan_inv(239)
}

/// cos(x) * 2^PREC for x given as fixed point, |x| <= 2 pi.
fn cos_fixed(x: &BigInt) -> BigInt {
    let one = BigInt::one() << PREC;
    let x2 = (x * x) >> PREC;
    let mut term = one.clone();
    let mut sum = one;
    let mut n = 1u32;
    while !term.is_zero() {
        term = -((&term * &x2) >> PREC) / ((2 * n - 1) * (2 * n));
        sum += &term;
        n += 1;
    }
    sum
}

fn near_multiple(value: &BigInt, unit_shift: u64) -> bool {
    // distance from value to the nearest multiple of 2^(PREC - unit_shift)
    let unit = BigInt::one() << (PREC - unit_shift);
    let r = ((value % &unit) + &unit) % &unit;
    let dist = r.clone().min(&unit - r);
    dist < (BigInt::one() << (PREC - THRESHOLD_BITS))
}

#[test]
fn cosines_of_dyadic_multiples_are_irrational() {
    // every dyadic q with k >= 2 and odd numerator, k <= 10, over a full turn
    for k in 2..=10u32 {
        for p in (1i64..(4 << k)).step_by(2) {
            let q = Dyadic::new(p, k);
            assert_eq!(cos_rationality_class(&q), CosClass::Irrational, "q={q}");
        }
    }
}

#[test]
fn cos_class_agrees_with_fixed_point_oracle() {
    let pi = pi_fixed();
    for k in 0..=10u32 {
        for p in 0i64..(2 << k) {
            let q = Dyadic::new(p, k);
            let x = (&pi * p) >> k;
            let c = cos_fixed(&x);
            // rational cosines of rational multiples of pi lie in {0, ±1/2, ±1}
            let oracle_rational = near_multiple(&c, 1);
            let class = cos_rationality_class(&q);
            assert_eq!(matches!(class, CosClass::RationalValue(_)), oracle_rational, "q={q}");
            if let CosClass::RationalValue(v) = class {
                let expected = (v.numer().clone() << PREC) >> v.exponent();
                assert!((c - expected).abs() < BigInt::one() << (PREC - THRESHOLD_BITS), "q={q}");
            }
        }
    }
}

#[test]
fn sine_of_dyadic_cosine_is_never_dyadic_inside_unit_interval() {
    for c in dyadics_in_open_unit(10) {
        assert!(!sin_is_dyadic(&c).unwrap(), "c={c}");
    }
    assert!(sin_is_dyadic(&Dyadic::zero()).unwrap());
    assert!(sin_is_dyadic(&Dyadic::one()).unwrap());
}

#[test]
fn sin_predicate_agrees_with_fixed_point_oracle() {
    for c in dyadics_in_open_unit(10).chain([Dyadic::zero(), Dyadic::one()]) {
        let k = c.exponent() as u64;
        // sqrt(1 - c^2) * 2^PREC
        let c_fixed = (c.numer().clone() << PREC) >> k;
        let one = BigInt::one() << (2 * PREC);
        let s = (one - &c_fixed * &c_fixed).sqrt();
        // a dyadic sine would be a multiple of 2^-k
        assert_eq!(near_multiple(&s, k), sin_is_dyadic(&c).unwrap(), "c={c}");
    }
}

#[test]
fn dyadic_add_sub_round_trip_on_grid() {
    let grid: Vec<Dyadic> = (-16i64..=16)
        .flat_map(|p| (0..6).map(move |k| Dyadic::new(p, k)))
        .collect();
    for a in &grid {
        for b in &grid {
            assert_eq!(&(a + b) - b, *a);
            assert_eq!(a + b, b + a);
            assert_eq!(a * b, b * a);
        }
    }
}
