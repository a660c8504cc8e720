//! The coefficient vectors a_ℓ^{(g,ν)} and b_ℓ^{(g,ν)} of the general-genus
//! hypergeometric count formulas, recovered by solving a linear system over
//! Q(ν) whose right-hand sides come from the series tables.
//!
//! For the regular family, row j reads
//!
//! ```text
//! α̂_{2g,j} = (ν−1)^j Σ_ℓ b_ℓ · binom(2g+ℓ+j−4, j) · ₂F₁(−j, 1−νj; 4−2g−ℓ−j; 1/(1−ν))
//! ```
//!
//! and multiplying through by (−1)^j turns every ₂F₁ term into a polynomial:
//! (ν−1)^j (1−ν)^{−k} = (−1)^j (1−ν)^{j−k}. The two-legged family is the same
//! with β̂, binom(2g+ℓ+j−2, j) and ₂F₁(−j, −νj; 2−2g−ℓ−j; ·).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::counts::{load_fixture, CountError};
use crate::exact::{binom_int, factorial, linsolve, pochhammer, rat_int, ExactError, PolyNu, Rat, RatFuncNu};
use crate::series::{build_tables, FreeTable, RecTable, SeriesError};

#[derive(Debug, Error)]
pub enum CoeffError {
    #[error("kind {kind:?} needs g >= {min}, got {g}")]
    GenusTooSmall { kind: CoeffKind, g: u32, min: u32 },
    #[error("series table does not reach (g={g}, j={j})")]
    TableTooSmall { g: u32, j: u32 },
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Count(#[from] CountError),
    #[error("bad coefficient table: {0}")]
    Format(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoeffKind {
    /// Two-legged coefficients, 3g of them.
    A,
    /// Regular coefficients, 3g−2 of them.
    B,
}

impl CoeffKind {
    pub fn min_genus(&self) -> u32 {
        match self {
            CoeffKind::A => 1,
            CoeffKind::B => 2,
        }
    }

    pub fn unknowns(&self, g: u32) -> usize {
        match self {
            CoeffKind::A => 3 * g as usize,
            CoeffKind::B => 3 * g as usize - 2,
        }
    }

    /// Shift s in d_ℓ = binom(2g+ℓ+j−s, j).
    fn d_shift(&self) -> i64 {
        match self {
            CoeffKind::A => 2,
            CoeffKind::B => 4,
        }
    }

    /// ₂F₁ parameters (b as the polynomial bν + b0 pair, c) for row j, column ℓ.
    fn params(&self, g: u32, l: usize, j: u32) -> ((i64, i64), i64) {
        let (g, l, j) = (g as i64, l as i64, j as i64);
        match self {
            CoeffKind::A => ((-j, 0), 2 - 2 * g - l - j),
            CoeffKind::B => ((-j, 1), 4 - 2 * g - l - j),
        }
    }

    fn check(&self, g: u32) -> Result<(), CoeffError> {
        if g < self.min_genus() {
            return Err(CoeffError::GenusTooSmall { kind: *self, g, min: self.min_genus() });
        }
        Ok(())
    }
}

/// d_ℓ^{(g,j)} with the family's shift; the top is nonnegative in range.
pub fn d_coeff(kind: CoeffKind, g: u32, l: usize, j: u32) -> Rat {
    let top = 2 * g as i64 + l as i64 + j as i64 - kind.d_shift();
    Rat::from_integer(binom_int(top, j as i64).expect("top of d_l is nonnegative for admissible g"))
}

/// Σ_{k≤j} (−j)_k (bν+b0)_k / ((c)_k k!) · (1−ν)^{j−k}: the ₂F₁ at 1/(1−ν)
/// with the row factor (1−ν)^j cleared.
pub fn cleared_2f1(j: u32, b: (i64, i64), c: i64) -> PolyNu {
    let one_minus_nu = PolyNu::linear(-1, 1);
    let bp = PolyNu::linear(b.0, b.1);
    let mut acc = PolyNu::zero();
    for k in 0..=j as usize {
        let ck = pochhammer(&rat_int(c), k);
        assert!(ck != Rat::from_integer(0.into()), "lower Pochhammer vanishes at k={k}");
        let scal = pochhammer(&rat_int(-(j as i64)), k) / (ck * Rat::from_integer(factorial(k as u64)));
        let term = (&bp.pochhammer(k) * &one_minus_nu.pow(j - k as u32)).scale(&scal);
        acc = &acc + &term;
    }
    acc
}

/// Matrix entry for row j (1-based), column ℓ.
pub fn entry(kind: CoeffKind, g: u32, l: usize, j: u32) -> PolyNu {
    let (b, c) = kind.params(g, l, j);
    cleared_2f1(j, b, c).scale(&d_coeff(kind, g, l, j))
}

/// Series-side right-hand side (−1)^j·β̂ or (−1)^j·α̂ at (g, j).
fn rhs_entry(kind: CoeffKind, g: u32, j: u32, rec: &RecTable, free: &FreeTable) -> Result<RatFuncNu, CoeffError> {
    let t = match kind {
        CoeffKind::A => rec,
        CoeffKind::B => free,
    };
    if !t.covers(g, j) {
        return Err(CoeffError::TableTooSmall { g, j });
    }
    let v = t.coeff(g, j).coeff;
    Ok(if j % 2 == 1 { -&v } else { v })
}

pub struct LinearSystem {
    pub matrix: Vec<Vec<RatFuncNu>>,
    pub rhs: Vec<RatFuncNu>,
}

/// Rows j = 1..n with n the number of unknowns.
pub fn build_system(kind: CoeffKind, g: u32, rec: &RecTable, free: &FreeTable) -> Result<LinearSystem, CoeffError> {
    kind.check(g)?;
    let n = kind.unknowns(g);
    let mut matrix = Vec::with_capacity(n);
    let mut rhs = Vec::with_capacity(n);
    for j in 1..=n as u32 {
        matrix.push((0..n).map(|l| RatFuncNu::from_poly(entry(kind, g, l, j))).collect());
        rhs.push(rhs_entry(kind, g, j, rec, free)?);
    }
    Ok(LinearSystem { matrix, rhs })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffTable {
    pub kind: CoeffKind,
    pub g: u32,
    pub entries: Vec<RatFuncNu>,
}

#[derive(Serialize, Deserialize)]
struct EntryJson {
    l: usize,
    num: Vec<String>,
    den: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    kind: CoeffKind,
    g: u32,
    entries: Vec<EntryJson>,
}

impl CoeffTable {
    pub fn to_json(&self) -> String {
        let t = TableJson {
            kind: self.kind,
            g: self.g,
            entries: self
                .entries
                .iter()
                .enumerate()
                .map(|(l, e)| EntryJson { l, num: e.num().to_rat_strings(), den: e.den().to_rat_strings() })
                .collect(),
        };
        serde_json::to_string_pretty(&t).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self, CoeffError> {
        let t: TableJson = serde_json::from_str(s).map_err(|e| CoeffError::Format(e.to_string()))?;
        let mut entries = vec![RatFuncNu::zero(); t.entries.len()];
        for e in t.entries {
            let num = PolyNu::from_rat_strings(&e.num)?;
            let den = PolyNu::from_rat_strings(&e.den)?;
            let slot = entries.get_mut(e.l).ok_or_else(|| CoeffError::Format(format!("index {} out of range", e.l)))?;
            *slot = RatFuncNu::new(num, den)?;
        }
        if entries.len() != t.kind.unknowns(t.g) {
            return Err(CoeffError::Format(format!("expected {} entries, got {}", t.kind.unknowns(t.g), entries.len())));
        }
        Ok(CoeffTable { kind: t.kind, g: t.g, entries })
    }

    /// Load one genus from a fixture file in the a/b table format.
    pub fn from_fixture(kind: CoeffKind, g: u32, dir: &std::path::Path) -> Result<Self, CoeffError> {
        let file = match kind {
            CoeffKind::A => "a_table.json",
            CoeffKind::B => "b_table.json",
        };
        let rows = load_fixture(&dir.join(file))?;
        let mut entries = vec![None; kind.unknowns(g)];
        for r in rows.iter().filter(|r| r.g == g) {
            let l = r.index() as usize;
            let slot = entries.get_mut(l).ok_or_else(|| CoeffError::Format(format!("l={l} out of range")))?;
            *slot = Some(RatFuncNu::from_poly(r.poly()?));
        }
        let entries = entries
            .into_iter()
            .enumerate()
            .map(|(l, e)| e.ok_or_else(|| CoeffError::Format(format!("fixture lacks g={g}, l={l}"))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CoeffTable { kind, g, entries })
    }

    /// Every entry reduced to a polynomial over a constant denominator.
    pub fn all_polynomial(&self) -> bool {
        self.entries.iter().all(|e| e.as_poly().is_some())
    }
}

/// Solve the system for one (kind, g) from tables that reach j = 3g.
pub fn solve_with(kind: CoeffKind, g: u32, rec: &RecTable, free: &FreeTable) -> Result<CoeffTable, CoeffError> {
    let sys = build_system(kind, g, rec, free)?;
    let entries = linsolve(&sys.matrix, &sys.rhs)?;
    Ok(CoeffTable { kind, g, entries })
}

/// Build the needed series tables and solve.
pub fn solve_coeffs(kind: CoeffKind, g: u32) -> Result<CoeffTable, CoeffError> {
    kind.check(g)?;
    let (rec, free) = build_tables(g, kind.unknowns(g) as u32)?;
    solve_with(kind, g, &rec, &free)
}
