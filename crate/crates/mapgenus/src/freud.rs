//! Fixed-valence engine: the Freud function F_ν from lattice paths, and the
//! recurrence-coefficient table re-derived order by order from the Freud
//! equation R_n + u·F_ν = x, with plain rational coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::exact::{binom, factorial, rat_int, rat_to_string, Rat};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FreudError {
    #[error("index {index} appears an odd number of times in a walk product")]
    PairingFailure { index: i32 },
    #[error("nonzero coefficient at (g={g}, j={j}) below the genus bound")]
    GenusBoundViolation { g: u32, j: u32 },
    #[error("odd power N^-{k} survives at u^{j}")]
    OddOrder { k: usize, j: u32 },
    #[error("root solve did not converge")]
    NoConvergence,
    #[error("valence must be at least {0}")]
    Valence(i64),
}

/// One product ∏ R_{n+s} over the multiset of shifts, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FreudTerm {
    pub shifts: Vec<i32>,
}

impl fmt::Display for FreudTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.shifts.iter().map(|s| s.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreudFunction {
    pub nu: u32,
    /// Sorted lexicographically; equal terms are listed once per occurrence.
    pub terms: Vec<FreudTerm>,
}

impl FreudFunction {
    /// Distinct terms with their multiplicities.
    pub fn grouped(&self) -> BTreeMap<FreudTerm, usize> {
        let mut m = BTreeMap::new();
        for t in &self.terms {
            *m.entry(t.clone()).or_insert(0) += 1;
        }
        m
    }
}

/// Turn the 2ν collected γ-indices of one walk into ν paired R-shifts.
fn pair_indices(mut idx: Vec<i32>) -> Result<FreudTerm, FreudError> {
    idx.sort_unstable();
    let mut shifts = Vec::with_capacity(idx.len() / 2);
    let mut it = idx.chunks(2);
    for c in &mut it {
        if c.len() != 2 || c[0] != c[1] {
            // The smallest index of the first unequal pair has odd multiplicity.
            return Err(FreudError::PairingFailure { index: c[0] });
        }
        shifts.push(c[0]);
    }
    Ok(FreudTerm { shifts })
}

/// Walks of ±1 steps of length 2ν−1 from level 0 to level −1. An up-step from
/// level i multiplies by γ_{n+i+1}, a down-step from level i by γ_{n+i}; the
/// leading γ_n completes the coefficient of P_{n−1} in z^{2ν−1}P_n.
pub fn gen_freud(nu: u32) -> Result<FreudFunction, FreudError> {
    if nu < 1 {
        return Err(FreudError::Valence(1));
    }
    let len = 2 * nu - 1;
    let walks: Vec<Vec<i32>> = (0u64..(1u64 << len))
        .into_par_iter()
        .filter(|m| m.count_ones() == nu - 1)
        .map(|m| {
            let mut level = 0i32;
            let mut idx = vec![0i32];
            for b in 0..len {
                if m >> b & 1 == 1 {
                    idx.push(level + 1);
                    level += 1;
                } else {
                    idx.push(level);
                    level -= 1;
                }
            }
            debug_assert_eq!(level, -1);
            idx
        })
        .collect();
    let mut terms = walks.into_iter().map(pair_indices).collect::<Result<Vec<_>, _>>()?;
    terms.sort();
    Ok(FreudFunction { nu, terms })
}

/// Fixed-ν recurrence table: β_{2g,j}(x) = coeff(g, j)·x^{j(ν−1)+1−2g}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedRecTable {
    pub nu: u32,
    pub g_max: u32,
    pub j_max: u32,
    entries: BTreeMap<(u32, u32), Rat>,
}

impl FixedRecTable {
    pub fn coeff(&self, g: u32, j: u32) -> Rat {
        self.entries.get(&(g, j)).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn exponent(&self, g: u32, j: u32) -> i64 {
        j as i64 * (self.nu as i64 - 1) + 1 - 2 * g as i64
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(u32, u32), &Rat)> {
        self.entries.iter()
    }

    /// r_{2g}(x = 1; u) truncated at u^{j_max}, in floating point.
    pub fn r_at_one(&self, g: u32, u: f64) -> f64 {
        (0..=self.j_max).rev().fold(0.0, |acc, j| acc * u + crate::exact::rat_to_f64(&self.coeff(g, j)))
    }

    pub fn dump(&self) -> Vec<(u32, u32, String, i64)> {
        let mut v = Vec::new();
        for g in 0..=self.g_max {
            for j in 0..=self.j_max {
                v.push((g, j, rat_to_string(&self.coeff(g, j)), self.exponent(g, j)));
            }
        }
        v
    }
}

/// Falling factorial d(d−1)⋯(d−l+1) for an integer d.
fn falling_int(d: i64, l: usize) -> Rat {
    let mut r = Rat::one();
    for i in 0..l as i64 {
        r *= rat_int(d - i);
    }
    r
}

/// Table of β_{2g,j} at fixed ν from the Freud equation.
///
/// With every R_{n+s} expanded as Σ_{m,l} N^{−2m−l} (s^l/l!)·∂_x^l r_{2m}(x) and
/// each r_{2m} a sum of monomials c·x^D, the (N^{−2G}, u^J) coefficient of
/// R_n + u·F_ν = x isolates c_{G,J} against products of already known lower-j
/// entries. Evaluated at x = 1; homogeneity in x is automatic.
pub fn freud_recursion(nu: u32, g_max: u32, j_max: u32) -> Result<FixedRecTable, FreudError> {
    if nu < 2 {
        return Err(FreudError::Valence(2));
    }
    let f = gen_freud(nu)?;
    let groups: Vec<(Vec<i32>, Rat)> = f.grouped().into_iter().map(|(t, m)| (t.shifts, rat_int(m as i64))).collect();
    // Orders k = 0..=kmax of N^{−k}; one odd order above the target is kept to
    // check that it cancels.
    let kmax = 2 * g_max as usize + 1;
    let nj = j_max as usize + 1;
    let mut c = vec![vec![Rat::zero(); nj]; g_max as usize + 1];
    c[0][0] = Rat::one();
    let exp_of = |g: usize, j: usize| j as i64 * (nu as i64 - 1) + 1 - 2 * g as i64;
    let smin = -(nu as i32 - 1);
    // a[s][k][j]: coefficient of N^{−k}u^j in R_{n+s} at x = 1.
    let zero_grid = || vec![vec![Rat::zero(); nj]; kmax + 1];
    let mut a: Vec<Vec<Vec<Rat>>> = (0..(2 * nu - 1)).map(|_| zero_grid()).collect();
    // prefix[t][i]: product of the first i+1 factors of group t.
    let mut prefix: Vec<Vec<Vec<Vec<Rat>>>> = groups.iter().map(|(s, _)| (0..s.len()).map(|_| zero_grid()).collect()).collect();

    let fill_column = |a: &mut Vec<Vec<Vec<Rat>>>, c: &Vec<Vec<Rat>>, j: usize| {
        for (si, grid) in a.iter_mut().enumerate() {
            let s = rat_int(smin as i64 + si as i64);
            for k in 0..=kmax {
                let mut acc = Rat::zero();
                for m in 0..=(k / 2).min(g_max as usize) {
                    let l = k - 2 * m;
                    if c[m][j].is_zero() {
                        continue;
                    }
                    let w = s.pow(l as i32) / Rat::from_integer(factorial(l as u64));
                    acc += w * &c[m][j] * falling_int(exp_of(m, j), l);
                }
                grid[k][j] = acc;
            }
        }
    };

    fill_column(&mut a, &c, 0);
    for big_j in 1..nj {
        let col = big_j - 1;
        // Extend every prefix product by the u^{col} column.
        for (t, (shifts, _)) in groups.iter().enumerate() {
            let p = &mut prefix[t];
            let first = (shifts[0] - smin) as usize;
            for k in 0..=kmax {
                p[0][k][col] = a[first][k][col].clone();
            }
            for i in 1..shifts.len() {
                let ai = &a[(shifts[i] - smin) as usize];
                for k in 0..=kmax {
                    let mut acc = Rat::zero();
                    for k1 in 0..=k {
                        for j1 in 0..=col {
                            let x = &p[i - 1][k1][j1];
                            if x.is_zero() {
                                continue;
                            }
                            let y = &ai[k - k1][col - j1];
                            if !y.is_zero() {
                                acc += x * y;
                            }
                        }
                    }
                    p[i][k][col] = acc;
                }
            }
        }
        let fcoef = |k: usize| -> Rat {
            groups
                .iter()
                .enumerate()
                .map(|(t, (s, mult))| mult * &prefix[t][s.len() - 1][k][col])
                .sum()
        };
        for k in (1..=kmax).step_by(2) {
            if !fcoef(k).is_zero() {
                return Err(FreudError::OddOrder { k, j: col as u32 });
            }
        }
        for g in 0..=g_max as usize {
            let v = -fcoef(2 * g);
            if !v.is_zero() && exp_of(g, big_j) < 0 {
                return Err(FreudError::GenusBoundViolation { g: g as u32, j: big_j as u32 });
            }
            c[g][big_j] = v;
        }
        fill_column(&mut a, &c, big_j);
    }

    let mut entries = BTreeMap::new();
    for (g, row) in c.into_iter().enumerate() {
        for (j, v) in row.into_iter().enumerate() {
            if !v.is_zero() {
                entries.insert((g as u32, j as u32), v);
            }
        }
    }
    Ok(FixedRecTable { nu, g_max, j_max, entries })
}

/// Real root of r + binom(2ν−1, ν)·u·r^ν = x continuous with r = x at u = 0.
pub fn r0_numeric(nu: u32, x: f64, u: f64) -> Result<f64, FreudError> {
    if nu < 1 {
        return Err(FreudError::Valence(1));
    }
    let b = binom(2 * nu as i64 - 1, nu as i64).to_string().parse::<f64>().unwrap();
    let n = nu as i32;
    let f = |r: f64| r + b * u * r.powi(n) - x;
    let df = |r: f64| 1.0 + b * u * n as f64 * r.powi(n - 1);
    // f is increasing on (0, ∞) with f(0) = −x < 0 ≤ f(x): bracket [0, x].
    let (mut lo, mut hi) = (0.0f64, x);
    let mut r = x;
    for _ in 0..200 {
        let v = f(r);
        if v.abs() <= 1e-15 * x.abs().max(1e-300) {
            return Ok(r);
        }
        if v > 0.0 {
            hi = r;
        } else {
            lo = r;
        }
        let step = r - v / df(r);
        r = if step > lo && step < hi { step } else { 0.5 * (lo + hi) };
        if hi - lo < 1e-17 * x {
            break;
        }
    }
    if f(r).abs() <= 1e-13 * x.abs() {
        Ok(r)
    } else {
        Err(FreudError::NoConvergence)
    }
}

/// The hexic r_0 by Cardano's formula for r + 10ur³ = x, u > 0.
pub fn r0_hexic_closed(x: f64, u: f64) -> f64 {
    let s = (x * x / 400.0 + 1.0 / (27000.0 * u)).sqrt();
    u.powf(-1.0 / 3.0) * ((x / 20.0 + s).cbrt() + (x / 20.0 - s).cbrt())
}
