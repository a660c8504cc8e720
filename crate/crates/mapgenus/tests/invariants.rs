use std::sync::OnceLock;

use mapgenus::counts::{count_at, divisible_by_nu_nu1, regular, two_legged, CountKind};
use mapgenus::exact::{factorial, linsolve, matvec, parse_rat, pochhammer, rat, rat_int, rat_to_string, Int, PolyNu, Rat, RatFuncNu};
use mapgenus::hypergeom::{pfq, PFQSpec};
use mapgenus::oracle::{face_lengths, genus_of, MapInstance};
use mapgenus::series::{build_tables, FreeTable, RecTable};
use mapgenus::verify::genus_bound;
use proptest::prelude::*;

fn tables() -> &'static (RecTable, FreeTable) {
    static T: OnceLock<(RecTable, FreeTable)> = OnceLock::new();
    T.get_or_init(|| build_tables(4, 6).unwrap())
}

fn small_tables() -> &'static (RecTable, FreeTable) {
    static T: OnceLock<(RecTable, FreeTable)> = OnceLock::new();
    T.get_or_init(|| build_tables(5, 3).unwrap())
}

fn poly() -> impl Strategy<Value = PolyNu> {
    prop::collection::vec(-6i64..=6, 1..5).prop_map(|c| PolyNu::from_ints(&c))
}

fn nonzero_poly() -> impl Strategy<Value = PolyNu> {
    poly().prop_filter("nonzero", |p| !p.is_zero())
}

fn ratfunc() -> impl Strategy<Value = RatFuncNu> {
    (poly(), nonzero_poly()).prop_map(|(n, d)| RatFuncNu::new(n, d).unwrap())
}

fn divides(d: &PolyNu, p: &PolyNu) -> bool {
    p.divrem(d).is_some_and(|(_, r)| r.is_zero())
}

proptest! {
    #[test]
    fn gcd_divides_both(p in nonzero_poly(), q in nonzero_poly(), r in nonzero_poly()) {
        let (pr, qr) = (&p * &r, &q * &r);
        let g = pr.gcd(&qr);
        prop_assert!(divides(&g, &pr) && divides(&g, &qr));
        prop_assert!(divides(&r, &g) || r.is_constant());
    }

    #[test]
    fn field_inverse_and_cancellation(f in ratfunc(), g in ratfunc()) {
        prop_assume!(!f.is_zero());
        prop_assert_eq!(&f * &f.recip().unwrap(), RatFuncNu::one());
        prop_assert_eq!(&(&f + &g) - &g, f.clone());
        // Canonical form: monic denominator, no common factor.
        prop_assert!(f.den().leading().is_some_and(|c| *c == Rat::from_integer(1.into())));
        prop_assert!(f.num().gcd(f.den()).is_constant());
    }

    #[test]
    fn linsolve_recovers_solution(entries in prop::collection::vec(poly(), 9), x in prop::collection::vec(ratfunc(), 3)) {
        let a: Vec<Vec<RatFuncNu>> = entries.chunks(3).map(|r| r.iter().cloned().map(RatFuncNu::from_poly).collect()).collect();
        let b = matvec(&a, &x);
        if let Ok(sol) = linsolve(&a, &b) {
            prop_assert_eq!(matvec(&a, &sol), b);
        }
    }

    #[test]
    fn rational_text_round_trip(n in -10_000i64..10_000, d in 1i64..10_000) {
        let r = rat(n, d);
        prop_assert_eq!(parse_rat(&rat_to_string(&r)).unwrap(), r);
    }

    #[test]
    fn terminating_pfq_is_the_finite_sum(n in 0i64..8, b in -9i64..9, c in 1i64..9, zn in -5i64..5, zd in 1i64..5) {
        let z = rat(zn, zd);
        let got = pfq(&PFQSpec::ints(&[-n, b], &[c], z.clone())).unwrap();
        let mut want = Rat::from_integer(0.into());
        for k in 0..=n as usize {
            want += pochhammer(&rat_int(-n), k) * pochhammer(&rat_int(b), k) / (pochhammer(&rat_int(c), k) * Rat::from_integer(factorial(k as u64))) * z.pow(k as i32);
        }
        prop_assert_eq!(got, want);
    }

    #[test]
    fn counts_are_nonnegative_integers(nu in 2i64..=8, g in 0u32..=4, j in 1u32..=6) {
        let (rec, free) = tables();
        for kind in [CountKind::Regular, CountKind::TwoLegged] {
            let c = count_at(kind, g, j, nu, rec, free).unwrap();
            prop_assert!(c >= Int::from(0));
            if g as i64 > genus_bound(kind, nu, j as i64) {
                prop_assert_eq!(c, Int::from(0));
            }
        }
    }

    #[test]
    fn random_matchings_obey_euler(nu in 1usize..=3, j in 1usize..=3, legs in prop::sample::select(vec![0usize, 2]), seed in prop::collection::vec(any::<u32>(), 24)) {
        let h = 2 * nu * j + legs;
        prop_assume!(h <= 24);
        // Fisher-Yates from the seed, then pair neighbours.
        let mut perm: Vec<usize> = (0..h).collect();
        for i in (1..h).rev() {
            perm.swap(i, seed[i] as usize % (i + 1));
        }
        let mut matching = vec![0; h];
        for p in perm.chunks(2) {
            matching[p[0]] = p[1];
            matching[p[1]] = p[0];
        }
        let map = MapInstance { nu, j, legs, matching };
        let faces = face_lengths(&map);
        prop_assert_eq!(faces.iter().sum::<usize>(), h);
        if let Ok(g) = genus_of(&map) {
            let v = j + legs;
            prop_assert_eq!(2 * g as i64, 2 - v as i64 + (h / 2) as i64 - faces.len() as i64);
        }
    }
}

#[test]
fn degree_laws_hold() {
    let (rec, free) = tables();
    for g in 0..=4 {
        for j in 1..=6 {
            assert!(two_legged(g, j, rec).unwrap().degree_law_holds(), "Q g={g} j={j}");
            assert!(regular(g, j, free).unwrap().degree_law_holds(), "S g={g} j={j}");
        }
    }
}

#[test]
fn regular_polynomial_divisible_by_nu_and_nu_plus_one() {
    let (_, free) = small_tables();
    for g in 1..=5 {
        for j in 1..=3 {
            let s = regular(g, j, free).unwrap().polynomial;
            assert!(divisible_by_nu_nu1(&s, j), "S g={g} j={j}");
        }
    }
}

#[test]
fn free_energy_coefficients_are_polynomial_from_genus_one() {
    let (rec, free) = tables();
    for g in 1..=4 {
        for j in 1..=6 {
            assert!(free.coeff(g, j).coeff.as_poly().is_some(), "alpha g={g} j={j}");
        }
    }
    for g in 0..=4 {
        for j in 0..=6 {
            assert!(rec.coeff(g, j).coeff.as_poly().is_some(), "beta g={g} j={j}");
        }
    }
}
