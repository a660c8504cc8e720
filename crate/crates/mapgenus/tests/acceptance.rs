//! The eight acceptance criteria, run without the libtest harness so the
//! result lines are never captured. Each criterion prints one line of the
//! form `criterion N (name): PASS|FAIL - detail [elapsed]`; the process
//! exits nonzero if any criterion fails.

use std::panic::catch_unwind;
use std::process::ExitCode;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use mapgenus::coeffs::{solve_coeffs, CoeffKind, CoeffTable};
use mapgenus::counts::{count_at, fixture_dir, golden_check, CountKind, GoldenId};
use mapgenus::exact::{binom, rat, Int, PolyNu, RatFuncNu};
use mapgenus::freud::{freud_recursion, gen_freud};
use mapgenus::hypergeom::{count_general, hexic_closed, hexic_series, quartic_closed};
use mapgenus::lab::{expansion_check, lattice, residuals, ExpansionOptions, ResidualOptions};
use mapgenus::oracle::enumerate_with;
use mapgenus::series::{build_tables, AffineExp, FreeTable, RecTable, SeriesError};
use mapgenus::verify::genus_bound;

type Tables = (RecTable, FreeTable);

fn small() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| build_tables(5, 3).expect("tables g<=5, j<=3"))
}

fn wide() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| build_tables(4, 16).expect("tables g<=4, j<=16"))
}

fn report(id: u32, name: &str, start: Instant, budget: Duration, res: Result<String, String>) {
    let el = start.elapsed();
    let res = res.and_then(|d| if el <= budget { Ok(d) } else { Err(format!("{d}; over the {budget:?} budget")) });
    match &res {
        Ok(d) => println!("criterion {id} ({name}): PASS - {d} [{el:.2?}]"),
        Err(d) => println!("criterion {id} ({name}): FAIL - {d} [{el:.2?}]"),
    }
    if let Err(d) = res {
        panic!("criterion {id} failed: {d}");
    }
}

fn e(x: impl std::fmt::Display) -> String {
    x.to_string()
}

fn kinds() -> [CountKind; 2] {
    [CountKind::Regular, CountKind::TwoLegged]
}

/// c·ν^k as a rational function.
fn mono(n: i64, d: i64, k: u32) -> RatFuncNu {
    RatFuncNu::from_poly(PolyNu::nu().pow(k).scale(&rat(n, d)))
}

fn criterion_1_polynomial_golden_suite() {
    let t = Instant::now();
    let res = (|| {
        let mut n = 0;
        for id in GoldenId::ALL {
            let (g, j) = id.extent();
            let (rec, free) = if g <= 5 && j <= 3 { small() } else { wide() };
            let rep = golden_check(id, &fixture_dir(), rec, free).map_err(e)?;
            if !rep.passed() {
                let m = &rep.mismatches[0];
                return Err(format!("{id:?}: {} mismatches, first {} ({},{})", rep.mismatches.len(), m.kind, m.g, m.j));
            }
            n += rep.checked;
        }
        Ok(format!("{n} polynomials equal their fixtures"))
    })();
    report(1, "polynomial golden suite", t, Duration::from_secs(120), res);
}

fn criterion_2_coefficient_tables() {
    let t = Instant::now();
    let res = (|| {
        let dir = fixture_dir();
        let mut solved = Vec::new();
        for (kind, gs) in [(CoeffKind::A, 1..=4u32), (CoeffKind::B, 2..=4u32)] {
            for g in gs {
                let s = solve_coeffs(kind, g).map_err(e)?;
                if s != CoeffTable::from_fixture(kind, g, &dir).map_err(e)? {
                    return Err(format!("{kind:?} g={g} differs from its fixture"));
                }
                solved.push(s);
            }
        }
        let pick = |k: CoeffKind, g: u32, l: usize| solved.iter().find(|s| s.kind == k && s.g == g).map(|s| s.entries[l].clone());
        let spot = [
            (CoeffKind::A, 1, 2, mono(1, 6, 2)),
            (CoeffKind::B, 2, 3, mono(7, 360, 3)),
            (CoeffKind::A, 4, 11, mono(4412401, 10368, 11)),
        ];
        for (k, g, l, want) in spot {
            if pick(k, g, l) != Some(want) {
                return Err(format!("{k:?} g={g} entry {l}"));
            }
        }
        Ok(format!("{} tables solved exactly, spot values confirmed", solved.len()))
    })();
    report(2, "coefficient tables", t, Duration::from_secs(300), res);
}

fn criterion_3_quartic_fixed_nu() {
    let t = Instant::now();
    let (rec, free) = wide();
    let res = (|| {
        for g in 0..=3 {
            for j in 1..=10 {
                let engine = count_at(CountKind::Regular, g, j, 2, rec, free).map_err(e)?;
                let closed = quartic_closed(g, j as i64).map_err(e)?;
                if engine != closed {
                    return Err(format!("g={g} j={j}: engine {engine}, closed form {closed}"));
                }
            }
        }
        for (g, j, want) in [(0, 1, 2), (1, 2, 60), (2, 1, 0), (3, 4, 0)] {
            let got = count_at(CountKind::Regular, g, j, 2, rec, free).map_err(e)?;
            if got != Int::from(want) {
                return Err(format!("N_{g}(4,{j}) = {got}, expected {want}"));
            }
        }
        Ok("g<=3, j<=10 and the listed values".into())
    })();
    report(3, "quartic fixed-nu", t, Duration::from_secs(600), res);
}

fn criterion_4_hexic_fixed_nu() {
    let t = Instant::now();
    let (rec, free) = wide();
    let res = (|| {
        let listed: [(CountKind, u32, u32, Int); 9] = [
            (CountKind::Regular, 2, 2, Int::from(4770)),
            (CountKind::Regular, 2, 3, Int::from(17290800)),
            (CountKind::Regular, 2, 4, Int::from(54015984u64) * 1000u32),
            (CountKind::Regular, 2, 5, Int::from(174855024u64) * 1_000_000u32),
            (CountKind::TwoLegged, 1, 1, Int::from(30)),
            (CountKind::TwoLegged, 2, 2, Int::from(21240)),
            (CountKind::TwoLegged, 2, 3, Int::from(355492800)),
            (CountKind::TwoLegged, 2, 4, Int::from(2543591808u64) * 1000u32),
            (CountKind::TwoLegged, 2, 1, Int::from(0)),
        ];
        for (kind, g, j, want) in listed {
            let got = count_at(kind, g, j, 3, rec, free).map_err(e)?;
            if got != want {
                return Err(format!("{kind:?} g={g} j={j}: {got}, expected {want}"));
            }
        }
        for kind in kinds() {
            for g in 0..=2 {
                for j in 1..=12u32 {
                    let engine = count_at(kind, g, j, 3, rec, free).map_err(e)?;
                    let closed = hexic_closed(kind, g, j as i64).map_err(e)?;
                    if engine != closed {
                        return Err(format!("{kind:?} g={g} j={j}: engine {engine}, closed form {closed}"));
                    }
                    let (c, xp) = hexic_series(kind, g, j as i64).map_err(e)?;
                    let table = if kind == CountKind::Regular { &free } else { &rec };
                    let sc = table.true_coeff_at(g, j, 3).ok_or("pole at nu=3")?;
                    if sc != c || (c != rat(0, 1) && table.coeff(g, j).xexp.at(3) != xp) {
                        return Err(format!("series {kind:?} g={g} j={j}: {sc} vs {c} x^{xp}"));
                    }
                }
            }
        }
        let beta = (rec.true_coeff_at(2, 2, 3), rec.coeff(2, 2).xexp.at(3));
        let alpha = (free.true_coeff_at(2, 2, 3), free.coeff(2, 2).xexp.at(3));
        if beta != (Some(rat(295, 1)), 1) || alpha != (Some(rat(265, 4)), 0) {
            return Err(format!("beta_(4,2) {beta:?}, alpha_(4,2) {alpha:?}"));
        }
        Ok("listed counts, closed forms and series coefficients for g<=2, j<=12".into())
    })();
    report(4, "hexic fixed-nu", t, Duration::from_secs(600), res);
}

/// Every (ν, j, legs) with ν ≥ 2, legs ∈ {0, 2} and at most `h_max` half-edges.
fn oracle_configs(h_max: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for legs in [0, 2] {
        for nu in 2..=h_max / 2 {
            for j in 1.. {
                if 2 * nu * j + legs > h_max {
                    break;
                }
                out.push((nu, j, legs));
            }
        }
    }
    out
}

fn criterion_5_oracle_equivalence() {
    let t = Instant::now();
    let res = (|| {
        let configs = oracle_configs(20);
        let desk = [(2, 1, 0), (2, 2, 0), (2, 3, 0), (2, 4, 0), (3, 1, 0), (3, 2, 0), (2, 1, 2), (2, 2, 2), (2, 3, 2), (3, 1, 2), (3, 2, 2), (4, 1, 0), (4, 1, 2), (5, 1, 0)];
        if let Some(c) = desk.iter().find(|c| !configs.contains(c)) {
            return Err(format!("{c:?} missing from the sweep"));
        }
        let (rec, free) = build_tables(5, 5).map_err(e)?;
        let mut matchings = 0u64;
        for &(nu, j, legs) in &configs {
            let kind = if legs == 0 { CountKind::Regular } else { CountKind::TwoLegged };
            let bound = genus_bound(kind, nu as i64, j as i64) as u32;
            if bound > 5 || j > 5 {
                return Err(format!("({nu},{j},{legs}) needs tables beyond g<=5, j<=5"));
            }
            let h = enumerate_with(nu, j, legs, 24, Some(1)).map_err(e)?;
            if let Some(&g) = h.counts.keys().find(|&&g| g > bound) {
                return Err(format!("({nu},{j},{legs}): maps of genus {g} above the bound {bound}"));
            }
            for g in 0..=bound {
                let want = count_at(kind, g, j as u32, nu as i64, &rec, &free).map_err(e)?;
                if Int::from(h.get(g)) != want {
                    return Err(format!("({nu},{j},{legs}) g={g}: oracle {}, engine {want}", h.get(g)));
                }
            }
            matchings += h.total_matchings;
        }
        Ok(format!("{} configurations, {matchings} matchings, single-threaded", configs.len()))
    })();
    report(5, "oracle equivalence", t, Duration::from_secs(600), res);
}

fn criterion_6_cross_engine_identity() {
    let t = Instant::now();
    let (rec, free) = wide();
    let res = (|| {
        for nu in 2..=4u32 {
            let fixed = freud_recursion(nu, 4, 6).map_err(e)?;
            for g in 0..=4 {
                for j in 0..=6 {
                    let want = rec.true_coeff_at(g, j, nu as i64).ok_or("pole")?;
                    if fixed.coeff(g, j) != want {
                        return Err(format!("freud nu={nu} g={g} j={j}"));
                    }
                }
            }
        }
        let mut n = 0;
        for g in 2..=4u32 {
            for (ck, kind) in [(CoeffKind::A, CountKind::TwoLegged), (CoeffKind::B, CountKind::Regular)] {
                let table = solve_coeffs(ck, g).map_err(e)?;
                for nu in 2..=6 {
                    for j in 1..=3 * g + 4 {
                        let a = count_general(kind, g, nu, j, &table).map_err(e)?;
                        let b = count_at(kind, g, j, nu, rec, free).map_err(e)?;
                        if a != b {
                            return Err(format!("{kind:?} g={g} nu={nu} j={j}: hypergeometric {a}, series {b}"));
                        }
                        n += 1;
                    }
                }
            }
        }
        Ok(format!("freud recursion for nu<=4, g<=4, j<=6; {n} hypergeometric counts"))
    })();
    report(6, "cross-engine identity", t, Duration::from_secs(600), res);
}

fn criterion_7_structural_invariants() {
    let t = Instant::now();
    let res = (|| {
        // A monomial-closure violation surfaces as InconsistentExponent from
        // the builder; the tables used above built cleanly, and each stored
        // exponent is the affine law.
        for (g, j) in [(5, 3), (4, 16)] {
            if let Err(err @ SeriesError::InconsistentExponent { .. }) = build_tables(g, j) {
                return Err(e(err));
            }
        }
        let mut entries = 0;
        for (rec, free) in [small(), wide()] {
            for (&(g, j), c) in rec.iter() {
                if c.xexp != AffineExp::beta(g, j) {
                    return Err(format!("beta exponent at ({g},{j})"));
                }
                entries += 1;
            }
            for (&(g, j), c) in free.iter() {
                if c.xexp != AffineExp::alpha(g, j) {
                    return Err(format!("alpha exponent at ({g},{j})"));
                }
                entries += 1;
            }
        }
        for nu in 1..=8u32 {
            let f = gen_freud(nu).map_err(e)?;
            if Int::from(f.terms.len()) != binom(2 * nu as i64 - 1, nu as i64) {
                return Err(format!("nu={nu}: {} Freud terms", f.terms.len()));
            }
        }
        let mut zeros = 0;
        for (rec, free) in [small(), wide()] {
            for kind in kinds() {
                let table = if kind == CountKind::Regular { free } else { rec };
                for (&(g, j), _) in table.iter() {
                    if j == 0 {
                        continue;
                    }
                    for nu in 2..=8i64 {
                        if g as i64 > genus_bound(kind, nu, j as i64) {
                            let c = count_at(kind, g, j, nu, rec, free).map_err(e)?;
                            if c != Int::from(0) {
                                return Err(format!("{kind:?} nu={nu} g={g} j={j} = {c} above the genus bound"));
                            }
                            zeros += 1;
                        }
                    }
                }
            }
        }
        Ok(format!("{entries} exponents on the affine law, Freud term counts for nu<=8, {zeros} vanishing entries"))
    })();
    report(7, "structural invariants", t, Duration::from_secs(600), res);
}

fn criterion_8_numeric_lab() {
    let t = Instant::now();
    let res = (|| {
        let st = lattice(2, 1, 0.0, 20).map_err(e)?;
        let herm = st.r.iter().enumerate().map(|(k, r)| (r - (k + 1) as f64).abs()).fold(0.0, f64::max);
        if herm >= 1e-9 {
            return Err(format!("Hermite |R_n - n| = {herm:e}"));
        }
        let mut worst: f64 = 0.0;
        for nu in [2u32, 3] {
            for n in [8u32, 16] {
                for u in [0.05, 0.1] {
                    let st = lattice(nu, n, u, (3 * n / 2 + nu + 1) as usize).map_err(e)?;
                    let rep = residuals(&st, &ResidualOptions::default()).map_err(e)?;
                    let parts = [Some(rep.max_freud()), rep.max_volterra(), rep.max_toda(), if nu == 3 { rep.max_hexic() } else { Some(0.0) }];
                    if parts.iter().any(Option::is_none) {
                        return Err(format!("missing residual family at nu={nu} N={n} u={u}"));
                    }
                    let m = rep.max_all();
                    if m >= 1e-8 {
                        return Err(format!("residual {m:e} at nu={nu} N={n} u={u}"));
                    }
                    worst = worst.max(m);
                }
            }
        }
        for (nu, u) in [(2u32, 0.02), (3, 0.004)] {
            let rep = expansion_check(nu, u, &[8, 16, 32], &ExpansionOptions::default()).map_err(e)?;
            if !rep.ratios_pass() {
                return Err(format!("order ratios at nu={nu} u={u}: {:?}", rep.ratios));
            }
            if !rep.f0_agrees() {
                return Err(format!("f0 at nu={nu} u={u}: {} vs {}", rep.f0_closed, rep.f0_series));
            }
        }
        let rep = expansion_check(2, 0.05, &[8], &ExpansionOptions::default()).map_err(e)?;
        if !rep.f0_agrees() {
            return Err(format!("f0 at nu=2 u=0.05: {} vs {}", rep.f0_closed, rep.f0_series));
        }
        Ok(format!("Hermite error {herm:.1e}, worst residual {worst:.1e}, ratio and f0 checks hold"))
    })();
    report(8, "numeric-lab properties", t, Duration::from_secs(300), res);
}

fn main() -> ExitCode {
    let criteria: [fn(); 8] = [
        criterion_1_polynomial_golden_suite,
        criterion_2_coefficient_tables,
        criterion_3_quartic_fixed_nu,
        criterion_4_hexic_fixed_nu,
        criterion_5_oracle_equivalence,
        criterion_6_cross_engine_identity,
        criterion_7_structural_invariants,
        criterion_8_numeric_lab,
    ];
    // Only the criterion lines matter here; the panic payload is already in them.
    std::panic::set_hook(Box::new(|_| {}));
    let failed = criteria.iter().filter(|c| catch_unwind(**c).is_err()).count();
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
