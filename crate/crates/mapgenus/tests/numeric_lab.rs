use mapgenus::lab::{expansion_check, lattice, moments, residuals, ExpansionOptions, LatticeState, ResidualOptions};
use proptest::prelude::*;

/// Independent m_0: composite Simpson in f64 on [−L, L].
fn simpson_m0(nu: u32, n: u32, u: f64) -> f64 {
    let f = |z: f64| (-(n as f64) * (z * z / 2.0 + u * z.powi(2 * nu as i32) / (2 * nu) as f64)).exp();
    let (l, steps) = (12.0, 200_000usize);
    let h = 2.0 * l / steps as f64;
    let mut s = f(-l) + f(l);
    for i in 1..steps {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(-l + i as f64 * h);
    }
    s * h / 3.0
}

fn state_for(nu: u32, n: u32, u: f64) -> LatticeState {
    lattice(nu, n, u, (3 * n / 2 + nu + 1) as usize).unwrap()
}

#[test]
fn hermite_sanity() {
    let st = lattice(3, 1, 0.0, 20).unwrap();
    assert_eq!(st.r.len(), 20);
    for (k, r) in st.r.iter().enumerate() {
        assert!((r - (k + 1) as f64).abs() < 1e-9);
    }
}

#[test]
fn quadrature_against_simpson() {
    let m = moments(2, 8, 0.1, 1).unwrap().to_f64()[0];
    let want = simpson_m0(2, 8, 0.1);
    assert!(m > 0.0 && m.is_finite());
    assert!((m - want).abs() / want < 1e-12, "{m} vs {want}");
}

#[test]
fn residual_grid_below_tolerance() {
    for nu in [2u32, 3] {
        for n in [8u32, 16] {
            for u in [0.05, 0.1] {
                let st = state_for(nu, n, u);
                let rep = residuals(&st, &ResidualOptions::default()).unwrap();
                assert!(rep.rows.len() as u32 > n / 2, "range too short at nu={nu} N={n}");
                assert!(rep.max_freud() < 1e-8);
                assert!(rep.max_volterra().unwrap() < 1e-8);
                assert!(rep.max_toda().unwrap() < 1e-8);
                assert_eq!(rep.max_hexic().is_some(), nu == 3);
                assert!(rep.max_all() < 1e-8, "{}", rep.to_csv());
            }
        }
    }
}

#[test]
fn volterra_difference_converges_quadratically() {
    let st = state_for(2, 8, 0.1);
    let at = |s: f64| residuals(&st, &ResidualOptions { rel_step: s, n_range: None }).unwrap();
    let (a, b) = (at(0.02), at(0.01));
    let ratio = a.max_volterra().unwrap() / b.max_volterra().unwrap();
    assert!((3.5..4.5).contains(&ratio), "{ratio}");
    let ratio = a.max_toda().unwrap() / b.max_toda().unwrap();
    assert!((3.5..4.5).contains(&ratio), "{ratio}");
}

#[test]
fn gaussian_limit_is_exact() {
    let st = lattice(2, 8, 0.0, 14).unwrap();
    let rep = residuals(&st, &ResidualOptions::default()).unwrap();
    assert!(rep.max_freud() < 1e-100);
    let e = expansion_check(2, 0.0, &[4, 8], &ExpansionOptions { j_rec: 4, j_free: 4 }).unwrap();
    assert!(e.rows.iter().all(|r| r.err_r < 1e-100 && r.err_f < 1e-100));
    assert!(e.ratios.is_empty());
}

#[test]
fn expansion_order_ratios() {
    for (nu, u) in [(2u32, 0.02), (3, 0.004)] {
        let rep = expansion_check(nu, u, &[8, 16, 32], &ExpansionOptions::default()).unwrap();
        assert_eq!(rep.ratios.len(), 2);
        assert!(rep.ratios_pass(), "{:?}", rep.ratios);
        assert!(rep.f0_agrees());
    }
}

#[test]
fn planar_free_energy_closed_form_matches_series() {
    let rep = expansion_check(2, 0.05, &[8], &ExpansionOptions::default()).unwrap();
    assert!(rep.f0_agrees(), "{} vs {} (tail {})", rep.f0_closed, rep.f0_series, rep.f0_tail);
    assert!(rep.f0_tail < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]
    #[test]
    fn freud_equation_holds(nu in 2u32..=3, u in 0.001f64..0.15) {
        let st = lattice(nu, 8, u, 14).unwrap();
        let rep = residuals(&st, &ResidualOptions { rel_step: 1e-12, n_range: Some((1, 8)) }).unwrap();
        prop_assert!(rep.max_freud() < 1e-8);
        prop_assert!(st.h.iter().all(|&h| h > 0.0));
        prop_assert!(st.r.iter().all(|&r| r > 0.0));
    }
}
