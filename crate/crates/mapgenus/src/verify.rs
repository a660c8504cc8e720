//! The cross-validation matrix behind `mapgenus verify`: series tables
//! against golden fixtures, closed forms, the fixed-ν Freud recursion, the
//! brute-force oracle and the numeric lab.

use std::path::Path;

use serde::Serialize;

use crate::coeffs::{solve_coeffs, CoeffKind, CoeffTable};
use crate::counts::{count_at, golden_check, CountKind, GoldenId};
use crate::exact::{binom, Int};
use crate::freud::{freud_recursion, gen_freud};
use crate::hypergeom::{count_general, count_sphere, count_torus, hexic_closed, quartic_closed};
use crate::lab::{expansion_check, lattice, residuals, ExpansionOptions, ResidualOptions};
use crate::oracle::enumerate;
use crate::series::{build_tables, FreeTable, RecTable};

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

type Outcome = Result<String, String>;

fn check(name: &str, f: impl FnOnce() -> Outcome) -> Check {
    match f() {
        Ok(detail) => Check { name: name.into(), passed: true, detail },
        Err(detail) => Check { name: name.into(), passed: false, detail },
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Oracle configurations (ν, j, legs); the quick list keeps H ≤ 12.
const ORACLE_QUICK: [(usize, usize, usize); 8] =
    [(2, 1, 0), (2, 2, 0), (3, 1, 0), (2, 1, 2), (2, 2, 2), (3, 1, 2), (4, 1, 0), (5, 1, 0)];
const ORACLE_FULL: [(usize, usize, usize); 14] = [
    (2, 1, 0),
    (2, 2, 0),
    (2, 3, 0),
    (2, 4, 0),
    (3, 1, 0),
    (3, 2, 0),
    (2, 1, 2),
    (2, 2, 2),
    (2, 3, 2),
    (3, 1, 2),
    (3, 2, 2),
    (4, 1, 0),
    (4, 1, 2),
    (5, 1, 0),
];

/// Largest genus a connected map with j vertices of valence 2ν can have.
pub fn genus_bound(kind: CountKind, nu: i64, j: i64) -> i64 {
    match kind {
        CountKind::Regular => ((nu - 1) * j + 1) / 2,
        CountKind::TwoLegged => (nu - 1) * j / 2,
    }
}

struct Tables {
    small: (RecTable, FreeTable),
    mid: (RecTable, FreeTable),
    /// (g, j) reach of `mid`.
    reach: (u32, u32),
}

fn both_kinds() -> [CountKind; 2] {
    [CountKind::Regular, CountKind::TwoLegged]
}

pub fn run_checks(quick: bool, dir: &Path) -> Vec<Check> {
    let reach = if quick { (3, 6) } else { (4, 16) };
    let tables = match (build_tables(5, 3), build_tables(reach.0, reach.1)) {
        (Ok(small), Ok(mid)) => Tables { small, mid, reach },
        (Err(e), _) | (_, Err(e)) => {
            return vec![Check { name: "series tables".into(), passed: false, detail: e.to_string() }]
        }
    };
    let t = &tables;
    let (rec, free) = (&t.mid.0, &t.mid.1);
    let mut out = vec![Check { name: "series tables".into(), passed: true, detail: format!("g<=5,j<=3 and g<={},j<={}", reach.0, reach.1) }];

    out.push(check("golden fixtures", || {
        let ids: &[GoldenId] = if quick { &[GoldenId::QSmall, GoldenId::SSmall] } else { &GoldenId::ALL };
        let mut checked = 0;
        for &id in ids {
            let (g, j) = id.extent();
            let (r, f) = if g <= 5 && j <= 3 { (&t.small.0, &t.small.1) } else { (rec, free) };
            if !r.covers(g, j) {
                return Err(format!("{id:?} needs tables to g={g}, j={j}"));
            }
            let rep = golden_check(id, dir, r, f).map_err(err)?;
            if !rep.passed() {
                return Err(format!("{id:?}: {} mismatches, first {:?}", rep.mismatches.len(), rep.mismatches[0]));
            }
            checked += rep.checked;
        }
        Ok(format!("{checked} polynomials"))
    }));

    out.push(check("coefficient tables", || {
        let list: Vec<(CoeffKind, u32)> = if quick {
            vec![(CoeffKind::A, 1), (CoeffKind::A, 2), (CoeffKind::B, 2)]
        } else {
            (1..=4).map(|g| (CoeffKind::A, g)).chain((2..=4).map(|g| (CoeffKind::B, g))).collect()
        };
        for &(k, g) in &list {
            let solved = solve_coeffs(k, g).map_err(err)?;
            let fixture = CoeffTable::from_fixture(k, g, dir).map_err(err)?;
            if solved != fixture {
                return Err(format!("{k:?} g={g} differs from fixture"));
            }
        }
        Ok(format!("{} tables", list.len()))
    }));

    out.push(check("quartic closed forms", || {
        let (gm, jm) = if quick { (2, 6) } else { (3, 10) };
        for g in 0..=gm {
            for j in 1..=jm {
                let a = quartic_closed(g, j as i64).map_err(err)?;
                let b = count_at(CountKind::Regular, g, j, 2, rec, free).map_err(err)?;
                if a != b {
                    return Err(format!("g={g} j={j}: formula {a}, engine {b}"));
                }
            }
        }
        Ok(format!("g<={gm}, j<={jm}"))
    }));

    out.push(check("hexic closed forms", || {
        let jm = if quick { 6 } else { 10 };
        for kind in both_kinds() {
            for g in 0..=2 {
                for j in 1..=jm {
                    let a = hexic_closed(kind, g, j as i64).map_err(err)?;
                    let b = count_at(kind, g, j, 3, rec, free).map_err(err)?;
                    if a != b {
                        return Err(format!("{kind:?} g={g} j={j}: formula {a}, engine {b}"));
                    }
                }
            }
        }
        Ok(format!("g<=2, j<={jm}"))
    }));

    out.push(check("sphere and torus formulas", || {
        let (nm, jm) = if quick { (4, 5) } else { (6, 10) };
        for nu in 2..=nm {
            for j in 1..=jm {
                let s = count_sphere(nu, j as i64).map_err(err)?;
                let tor = count_torus(nu, j as i64).map_err(err)?;
                let (es, et) = (
                    count_at(CountKind::Regular, 0, j, nu, rec, free).map_err(err)?,
                    count_at(CountKind::Regular, 1, j, nu, rec, free).map_err(err)?,
                );
                if s != es || tor != et {
                    return Err(format!("nu={nu} j={j}"));
                }
            }
        }
        Ok(format!("nu<={nm}, j<={jm}"))
    }));

    out.push(check("general hypergeometric counts", || {
        let (gs, nm): (Vec<u32>, i64) = if quick { (vec![2], 4) } else { (vec![2, 3, 4], 6) };
        let mut n = 0;
        for &g in &gs {
            for kind in both_kinds() {
                let ck = if kind == CountKind::Regular { CoeffKind::B } else { CoeffKind::A };
                let table = CoeffTable::from_fixture(ck, g, dir).map_err(err)?;
                for nu in 2..=nm {
                    for j in 1..=(3 * g + 4).min(t.reach.1) {
                        let a = count_general(kind, g, nu, j, &table).map_err(err)?;
                        let b = count_at(kind, g, j, nu, rec, free).map_err(err)?;
                        if a != b {
                            return Err(format!("{kind:?} g={g} nu={nu} j={j}: formula {a}, engine {b}"));
                        }
                        n += 1;
                    }
                }
            }
        }
        Ok(format!("{n} counts"))
    }));

    out.push(check("freud recursion vs series", || {
        let (nm, gm, jm) = if quick { (3, 2, 4) } else { (4, 4, 6) };
        for nu in 2..=nm {
            let fixed = freud_recursion(nu, gm, jm).map_err(err)?;
            for g in 0..=gm {
                for j in 0..=jm {
                    let want = rec.true_coeff_at(g, j, nu as i64).ok_or_else(|| format!("pole at nu={nu}"))?;
                    if fixed.coeff(g, j) != want {
                        return Err(format!("nu={nu} g={g} j={j}"));
                    }
                }
            }
        }
        Ok(format!("nu<={nm}, g<={gm}, j<={jm}"))
    }));

    out.push(check("freud term structure", || {
        let nm = if quick { 6 } else { 8 };
        for nu in 1..=nm {
            let f = gen_freud(nu).map_err(err)?;
            let want = binom(2 * nu as i64 - 1, nu as i64);
            if Int::from(f.terms.len()) != want {
                return Err(format!("nu={nu}: {} terms, expected {want}", f.terms.len()));
            }
            let lim = nu as i32 - 1;
            if f.terms.iter().any(|t| t.shifts.len() != nu as usize || t.shifts.iter().any(|s| s.abs() > lim)) {
                return Err(format!("nu={nu}: term outside the shift window"));
            }
        }
        Ok(format!("nu<={nm}"))
    }));

    out.push(check("genus-bound vanishing", || {
        let mut n = 0;
        for kind in both_kinds() {
            for nu in 2..=6i64 {
                for j in 1..=t.reach.1 {
                    for g in 0..=t.reach.0 {
                        if g as i64 > genus_bound(kind, nu, j as i64) {
                            let c = count_at(kind, g, j, nu, rec, free).map_err(err)?;
                            if c != Int::from(0) {
                                return Err(format!("{kind:?} nu={nu} g={g} j={j} = {c}"));
                            }
                            n += 1;
                        }
                    }
                }
            }
        }
        Ok(format!("{n} vanishing entries"))
    }));

    out.push(check("oracle enumeration", || {
        let list: &[(usize, usize, usize)] = if quick { &ORACLE_QUICK } else { &ORACLE_FULL };
        for &(nu, j, legs) in list {
            let h = enumerate(nu, j, legs).map_err(err)?;
            let kind = if legs == 0 { CountKind::Regular } else { CountKind::TwoLegged };
            for g in 0..=t.reach.0 {
                let want = count_at(kind, g, j as u32, nu as i64, rec, free).map_err(err)?;
                if Int::from(h.get(g)) != want {
                    return Err(format!("({nu},{j},{legs}) g={g}: oracle {}, engine {want}", h.get(g)));
                }
            }
        }
        Ok(format!("{} configurations", list.len()))
    }));

    out.push(check("numeric lab", || {
        let st = lattice(2, 1, 0.0, 20).map_err(err)?;
        if st.r.iter().enumerate().any(|(k, r)| (r - (k + 1) as f64).abs() >= 1e-9) {
            return Err("Hermite recurrence off".into());
        }
        let grid: Vec<(u32, u32, f64)> = if quick {
            vec![(2, 8, 0.1), (3, 8, 0.05)]
        } else {
            [2, 3].iter().flat_map(|&nu| [8, 16].iter().flat_map(move |&n| [0.05, 0.1].map(|u| (nu, n, u)))).collect()
        };
        let mut worst: f64 = 0.0;
        for &(nu, n, u) in &grid {
            let st = lattice(nu, n, u, (3 * n / 2 + nu + 1) as usize).map_err(err)?;
            let m = residuals(&st, &ResidualOptions::default()).map_err(err)?.max_all();
            if m >= 1e-8 {
                return Err(format!("residual {m:e} at nu={nu} N={n} u={u}"));
            }
            worst = worst.max(m);
        }
        if !quick {
            for (nu, u) in [(2, 0.02), (3, 0.004)] {
                let rep = expansion_check(nu, u, &[8, 16, 32], &ExpansionOptions::default()).map_err(err)?;
                if !rep.ratios_pass() || !rep.f0_agrees() {
                    return Err(format!("expansion check failed at nu={nu} u={u}: {:?}", rep.ratios));
                }
            }
        }
        Ok(format!("{} grid points, max residual {worst:.1e}", grid.len()))
    }));

    out
}
