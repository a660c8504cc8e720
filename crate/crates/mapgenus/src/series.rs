//! Symbolic-ν Taylor tables of the topological expansion.
//!
//! The recurrence coefficient expands as r_{2g}(x;u) = Σ_j β_{2g,j} u^j and the
//! free energy as f_{2g}(x;u) = Σ_j α_{2g,j} u^j. Every coefficient is a single
//! monomial in x whose exponent is affine in ν, and after factoring out
//! (−binom(2ν−1,ν))^j the remaining coefficient lives in Q(ν). This module
//! stores that normalized coefficient (written β̂, α̂) together with its
//! exponent and fills the tables order by order from the Volterra lattice
//!
//!   ν u ∂_u R_n + R_n = (N/2) R_n (R_{n+1} − R_{n−1})
//!
//! and the second-order Toda relation
//!
//!   ν² u² ∂²_u F + ν(ν+1) u ∂_u F + 1/2 = R_n (R_{n+1} + R_{n−1}) / (4x²).

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exact::{factorial, rat_int, rat_to_string, ExactError, PolyNu, Rat, RatFuncNu};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("inconsistent exponent at (g={g}, j={j}): expected {expected:?}, got {got:?}")]
    InconsistentExponent { g: u32, j: u32, expected: AffineExp, got: AffineExp },
    #[error("zero divisor at (g={g}, j={j})")]
    ZeroDivisor { g: u32, j: u32 },
    #[error("table is missing entries required for (g={g}, j={j})")]
    MissingPrerequisite { g: u32, j: u32 },
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Exponent a·ν + b of x.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct AffineExp {
    pub a: i64,
    pub b: i64,
}

impl AffineExp {
    pub fn new(a: i64, b: i64) -> Self {
        AffineExp { a, b }
    }

    /// Exponent of β_{2g,j}: j(ν−1) + 1 − 2g.
    pub fn beta(g: u32, j: u32) -> Self {
        AffineExp::new(j as i64, 1 - j as i64 - 2 * g as i64)
    }

    /// Exponent of α_{2g,j}: j(ν−1) − 2g.
    pub fn alpha(g: u32, j: u32) -> Self {
        AffineExp::new(j as i64, -(j as i64) - 2 * g as i64)
    }

    pub fn at(&self, nu: i64) -> i64 {
        self.a * nu + self.b
    }

    pub fn poly(&self) -> PolyNu {
        PolyNu::linear(self.a, self.b)
    }
}

/// One normalized coefficient: the true coefficient is
/// coeff · (−binom(2ν−1,ν))^j · x^{xexp}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesCoeff {
    pub coeff: RatFuncNu,
    pub xexp: AffineExp,
}

impl SeriesCoeff {
    pub fn new(coeff: RatFuncNu, xexp: AffineExp) -> Self {
        SeriesCoeff { coeff, xexp }
    }
}

/// Falling factorial e(e−1)...(e−l+1) of an affine exponent, as a polynomial.
fn falling(e: AffineExp, l: u32) -> PolyNu {
    let mut acc = PolyNu::one();
    for i in 0..l as i64 {
        acc = &acc * &PolyNu::linear(e.a, e.b - i);
    }
    acc
}

/// d/dx of one monomial coefficient.
pub fn deriv_x(t: &SeriesCoeff) -> SeriesCoeff {
    SeriesCoeff {
        coeff: t.coeff.mul_poly(&t.xexp.poly()),
        xexp: AffineExp::new(t.xexp.a, t.xexp.b - 1),
    }
}

/// β̂_{0,j} = (1/j!) ∏_{i=0}^{j−2} (j(ν−1) + 2 + i), the planar coefficient.
pub fn base_r0(j: u32) -> SeriesCoeff {
    let mut p = PolyNu::one();
    for i in 0..(j as i64 - 1).max(0) {
        p = &p * &PolyNu::linear(j as i64, 2 + i - j as i64);
    }
    let p = p.scale(&Rat::new(1.into(), factorial(j as u64)));
    SeriesCoeff::new(RatFuncNu::from_poly(p), AffineExp::beta(0, j))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TableKind {
    Rec,
    Free,
}

/// Sparse table keyed by (g, j); an absent entry is identically zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesTable {
    pub kind: TableKind,
    pub g_max: u32,
    pub j_max: u32,
    entries: BTreeMap<(u32, u32), SeriesCoeff>,
}

pub type RecTable = SeriesTable;
pub type FreeTable = SeriesTable;

/// One row of the JSON table dump.
#[derive(Clone, Debug, Serialize)]
pub struct TableRow {
    pub g: u32,
    pub j: u32,
    pub coeff_num: Vec<String>,
    pub coeff_den: String,
    pub exp_a: i64,
    pub exp_b: i64,
}

impl SeriesTable {
    pub fn new(kind: TableKind) -> Self {
        SeriesTable { kind, g_max: 0, j_max: 0, entries: BTreeMap::new() }
    }

    fn exp_of(&self, g: u32, j: u32) -> AffineExp {
        match self.kind {
            TableKind::Rec => AffineExp::beta(g, j),
            TableKind::Free => AffineExp::alpha(g, j),
        }
    }

    pub fn insert(&mut self, g: u32, j: u32, c: SeriesCoeff) {
        self.g_max = self.g_max.max(g);
        self.j_max = self.j_max.max(j);
        if c.coeff.is_zero() {
            self.entries.remove(&(g, j));
        } else {
            self.entries.insert((g, j), c);
        }
    }

    pub fn get(&self, g: u32, j: u32) -> Option<&SeriesCoeff> {
        self.entries.get(&(g, j))
    }

    /// Lookup with the zero default for absent entries.
    pub fn coeff(&self, g: u32, j: u32) -> SeriesCoeff {
        self.get(g, j)
            .cloned()
            .unwrap_or_else(|| SeriesCoeff::new(RatFuncNu::zero(), self.exp_of(g, j)))
    }

    pub fn covers(&self, g: u32, j: u32) -> bool {
        g <= self.g_max && j <= self.j_max
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(u32, u32), &SeriesCoeff)> {
        self.entries.iter()
    }

    pub fn rows(&self) -> Vec<TableRow> {
        let mut out = Vec::new();
        for g in 0..=self.g_max {
            for j in 0..=self.j_max {
                let c = self.coeff(g, j);
                // Canonical denominators are monic; a constant one means the
                // coefficient is a polynomial and the row carries its content.
                let (num, den) = match c.coeff.as_poly() {
                    Some(p) => {
                        let d = p.coeffs().iter().fold(num_bigint::BigInt::one(), |acc, x| {
                            num_integer::Integer::lcm(&acc, x.denom())
                        });
                        let dr = Rat::from_integer(d);
                        (p.scale(&dr).to_rat_strings(), rat_to_string(&dr))
                    }
                    None => (c.coeff.num().to_rat_strings(), format!("({})", c.coeff.den())),
                };
                out.push(TableRow { g, j, coeff_num: num, coeff_den: den, exp_a: c.xexp.a, exp_b: c.xexp.b });
            }
        }
        out
    }

    /// Fixed-ν specialization of the true coefficient (binomial factor restored).
    pub fn true_coeff_at(&self, g: u32, j: u32, nu: i64) -> Option<Rat> {
        let c = self.coeff(g, j);
        let v = c.coeff.eval(&rat_int(nu))?;
        let b = crate::exact::binom(2 * nu - 1, nu);
        Some(v * Rat::from_integer(-b).pow(j as i32))
    }
}

/// Working state while filling the β table; caches x-derivatives.
struct BetaWork {
    beta: HashMap<(u32, u32), PolyNu>,
    deriv: HashMap<(u32, u32, u32), PolyNu>,
}

impl BetaWork {
    fn from_table(t: &RecTable) -> Result<Self, SeriesError> {
        let mut beta = HashMap::new();
        for (&(g, j), c) in t.iter() {
            let p = c.coeff.as_poly().ok_or(ExactError::DivisionByZero)?.clone();
            beta.insert((g, j), p);
        }
        Ok(BetaWork { beta, deriv: HashMap::new() })
    }

    fn zero_default(&self, g: u32, j: u32) -> Option<PolyNu> {
        if g == 0 && j == 0 {
            return Some(PolyNu::one());
        }
        self.beta.get(&(g, j)).cloned()
    }

    /// Coefficient of the l-th x-derivative of β_{2g,j}; None if zero.
    fn deriv(&mut self, g: u32, j: u32, l: u32) -> Option<PolyNu> {
        if let Some(p) = self.deriv.get(&(g, j, l)) {
            return (!p.is_zero()).then(|| p.clone());
        }
        let base = self.zero_default(g, j)?;
        let p = &base * &falling(AffineExp::beta(g, j), l);
        self.deriv.insert((g, j, l), p.clone());
        (!p.is_zero()).then_some(p)
    }

    fn set(&mut self, g: u32, j: u32, p: PolyNu) {
        if !p.is_zero() {
            self.beta.insert((g, j), p);
        }
    }

    /// λ_{G,J}: u^J, N^{−2G} coefficient of Σ r_{2g} r_{2h}^{(2l+1)}/(2l+1)!
    /// with the two terms linear in β_{2G,J} removed.
    fn volterra_rhs(&mut self, big_g: u32, big_j: u32) -> Result<PolyNu, SeriesError> {
        let want = AffineExp::beta(big_g, big_j);
        let mut acc = PolyNu::zero();
        for g in 0..=big_g {
            for h in 0..=(big_g - g) {
                let l = big_g - g - h;
                let ord = 2 * l + 1;
                let inv_fact = Rat::new(1.into(), factorial(ord as u64));
                for j1 in 0..=big_j {
                    let j2 = big_j - j1;
                    if (g, j1) == (big_g, big_j) || (h, j2) == (big_g, big_j) {
                        continue;
                    }
                    let Some(a) = self.zero_default(g, j1) else { continue };
                    let Some(b) = self.deriv(h, j2, ord) else { continue };
                    let e1 = AffineExp::beta(g, j1);
                    let e2 = AffineExp::beta(h, j2);
                    let got = AffineExp::new(e1.a + e2.a, e1.b + e2.b - ord as i64);
                    if got != want {
                        return Err(SeriesError::InconsistentExponent { g: big_g, j: big_j, expected: want, got });
                    }
                    acc = &acc + &(&a * &b).scale(&inv_fact);
                }
            }
        }
        Ok(acc)
    }

    fn solve_beta(&mut self, big_g: u32, big_j: u32) -> Result<PolyNu, SeriesError> {
        let d = big_j as i64 + 2 * big_g as i64 - 1;
        if d == 0 {
            return Err(SeriesError::ZeroDivisor { g: big_g, j: big_j });
        }
        Ok(self.volterra_rhs(big_g, big_j)?.scale(&Rat::new(1.into(), d.into())))
    }

    /// u^J, N^{−2G} coefficient of R_n(R_{n+1}+R_{n−1}) / (4x²), normalized.
    fn toda_rhs(&mut self, big_g: u32, big_j: u32) -> Result<PolyNu, SeriesError> {
        let want = AffineExp::alpha(big_g, big_j);
        let mut acc = PolyNu::zero();
        for g in 0..=big_g {
            for m in 0..=(big_g - g) {
                let l2 = big_g - g - m;
                let ord = 2 * l2;
                // 2/l! from the even shift expansion, 1/4 from the prefactor.
                let w = Rat::new(1.into(), factorial(ord as u64) * 2u32);
                for j1 in 0..=big_j {
                    let j2 = big_j - j1;
                    let Some(a) = self.zero_default(g, j1) else { continue };
                    let Some(b) = self.deriv(m, j2, ord) else { continue };
                    let e1 = AffineExp::beta(g, j1);
                    let e2 = AffineExp::beta(m, j2);
                    let got = AffineExp::new(e1.a + e2.a, e1.b + e2.b - ord as i64 - 2);
                    if got != want {
                        return Err(SeriesError::InconsistentExponent { g: big_g, j: big_j, expected: want, got });
                    }
                    acc = &acc + &(&a * &b).scale(&w);
                }
            }
        }
        Ok(acc)
    }

    fn solve_alpha(&mut self, big_g: u32, big_j: u32) -> Result<RatFuncNu, SeriesError> {
        if big_j == 0 {
            return Ok(RatFuncNu::zero());
        }
        let rhs = self.toda_rhs(big_g, big_j)?;
        // ν²u²∂² + ν(ν+1)u∂ sends u^J to νJ(νJ+1) u^J.
        let jj = big_j as i64;
        let divisor = &PolyNu::linear(jj, 0) * &PolyNu::linear(jj, 1);
        Ok(RatFuncNu::new(rhs, divisor)?)
    }
}

fn check_prereq_beta(t: &RecTable, big_g: u32, big_j: u32) -> Result<(), SeriesError> {
    let ok = big_g == 0 || t.covers(big_g - 1, big_j);
    let ok = ok && (big_j == 0 || t.covers(big_g, big_j - 1));
    if ok {
        Ok(())
    } else {
        Err(SeriesError::MissingPrerequisite { g: big_g, j: big_j })
    }
}

/// λ_{G,J} · x^{J(ν−1)+1−2G}, the inhomogeneous side of the Volterra step.
pub fn volterra_rhs(big_g: u32, big_j: u32, table: &RecTable) -> Result<SeriesCoeff, SeriesError> {
    check_prereq_beta(table, big_g, big_j)?;
    let mut w = BetaWork::from_table(table)?;
    let p = w.volterra_rhs(big_g, big_j)?;
    Ok(SeriesCoeff::new(RatFuncNu::from_poly(p), AffineExp::beta(big_g, big_j)))
}

/// β̂_{2G,J} = λ_{G,J} / (J + 2G − 1).
pub fn solve_beta(big_g: u32, big_j: u32, table: &RecTable) -> Result<SeriesCoeff, SeriesError> {
    check_prereq_beta(table, big_g, big_j)?;
    let mut w = BetaWork::from_table(table)?;
    let p = w.solve_beta(big_g, big_j)?;
    Ok(SeriesCoeff::new(RatFuncNu::from_poly(p), AffineExp::beta(big_g, big_j)))
}

/// α̂_{2G,J} from a recurrence table complete up to (G, J).
pub fn solve_alpha(big_g: u32, big_j: u32, rec: &RecTable) -> Result<SeriesCoeff, SeriesError> {
    if !rec.covers(big_g, big_j) {
        return Err(SeriesError::MissingPrerequisite { g: big_g, j: big_j });
    }
    let mut w = BetaWork::from_table(rec)?;
    let a = w.solve_alpha(big_g, big_j)?;
    Ok(SeriesCoeff::new(a, AffineExp::alpha(big_g, big_j)))
}

/// β table only: the planar column from the closed form, higher genera from
/// the Volterra recursion in g-outer, j-inner order.
pub fn build_rec(g_max: u32, j_max: u32) -> Result<RecTable, SeriesError> {
    let (rec, _) = build_inner(g_max, j_max, false)?;
    Ok(rec)
}

pub fn build_tables(g_max: u32, j_max: u32) -> Result<(RecTable, FreeTable), SeriesError> {
    build_inner(g_max, j_max, true)
}

fn build_inner(g_max: u32, j_max: u32, with_free: bool) -> Result<(RecTable, FreeTable), SeriesError> {
    let mut w = BetaWork { beta: HashMap::new(), deriv: HashMap::new() };
    let mut rec = SeriesTable::new(TableKind::Rec);
    rec.g_max = g_max;
    rec.j_max = j_max;
    for j in 0..=j_max {
        let b = base_r0(j);
        w.set(0, j, b.coeff.as_poly().expect("planar coefficient is polynomial").clone());
        rec.insert(0, j, b);
    }
    for g in 1..=g_max {
        for j in 1..=j_max {
            let p = w.solve_beta(g, j)?;
            w.set(g, j, p.clone());
            rec.insert(g, j, SeriesCoeff::new(RatFuncNu::from_poly(p), AffineExp::beta(g, j)));
        }
    }
    let mut free = SeriesTable::new(TableKind::Free);
    free.g_max = g_max;
    free.j_max = j_max;
    if with_free {
        for g in 0..=g_max {
            for j in 1..=j_max {
                let a = w.solve_alpha(g, j)?;
                free.insert(g, j, SeriesCoeff::new(a, AffineExp::alpha(g, j)));
            }
        }
    }
    Ok((rec, free))
}

/// Whether the specialization at an integer ν vanishes (poles count as nonzero).
pub fn coeff_zero_at(c: &SeriesCoeff, nu: i64) -> bool {
    c.coeff.eval(&rat_int(nu)).is_some_and(|v| v.is_zero())
}
