use std::time::Instant;

use mapgenus::counts::{count_at, CountKind};
use mapgenus::exact::Int;
use mapgenus::oracle::enumerate_with;
use mapgenus::series::build_tables;

const DESK: [(usize, usize, usize); 14] = [
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

fn check(cases: &[(usize, usize, usize)], threads: Option<usize>) {
    let (rec, free) = build_tables(6, 5).unwrap();
    for &(nu, j, legs) in cases {
        let t = Instant::now();
        let h = enumerate_with(nu, j, legs, 24, threads).unwrap();
        let kind = if legs == 0 { CountKind::Regular } else { CountKind::TwoLegged };
        let gmax = h.counts.keys().max().copied().unwrap_or(0).max(3);
        for g in 0..=gmax {
            let want = count_at(kind, g, j as u32, nu as i64, &rec, &free).unwrap();
            assert_eq!(Int::from(h.get(g)), want, "nu={nu} j={j} legs={legs} g={g}");
        }
        eprintln!("({nu},{j},{legs}) {:?} in {:?}", h.counts, t.elapsed());
    }
}

#[test]
fn oracle_matches_engine_on_desk_grid() {
    check(&DESK, None);
}

#[test]
fn oracle_hexic_three_vertices() {
    check(&[(3, 3, 0)], None);
}
