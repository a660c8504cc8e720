//! Graph counts from the series tables, their polynomial normal forms Q and S,
//! golden-table comparison and a numeric root finder for exploring the
//! polynomials' zeros.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{binom, factorial, parse_rat, rat_to_f64, Int, PolyNu, Rat, RatFuncNu};
use crate::series::{FreeTable, RecTable};

#[derive(Debug, Error)]
pub enum CountError {
    #[error("table has no entry for (g={g}, j={j})")]
    Missing { g: u32, j: u32 },
    #[error("count polynomial at (g={g}, j={j}) is not a polynomial in nu")]
    NotPolynomial { g: u32, j: u32 },
    #[error("fixture missing: {0}")]
    FixtureMissing(String),
    #[error("fixture malformed: {0}")]
    FixtureParse(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountKind {
    Regular,
    TwoLegged,
}

/// Which constant is raised to the j-th power in front of the polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Prefactor {
    /// c_ν = 2ν·binom(2ν−1, ν)
    SmallC,
    /// C_ν, the ν-th Catalan number
    Catalan,
}

impl Prefactor {
    pub fn at(&self, nu: i64) -> Int {
        match self {
            Prefactor::SmallC => c_nu(nu),
            Prefactor::Catalan => catalan(nu),
        }
    }
}

pub fn catalan(nu: i64) -> Int {
    binom(2 * nu, nu) / Int::from(nu + 1)
}

pub fn c_nu(nu: i64) -> Int {
    Int::from(2 * nu) * binom(2 * nu - 1, nu)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountResult {
    pub kind: CountKind,
    pub g: u32,
    pub j: u32,
    pub polynomial: PolyNu,
    pub prefactor: Prefactor,
    pub value_at: BTreeMap<i64, Int>,
}

impl CountResult {
    /// prefactor(ν₀)^j · polynomial(ν₀), exact.
    pub fn value(&self, nu: i64) -> Rat {
        let p = Rat::from_integer(self.prefactor.at(nu)).pow(self.j as i32);
        p * self.polynomial.eval_int(nu)
    }

    /// The count as an integer, or `None` if the value is not integral (which
    /// would indicate a broken table).
    pub fn value_int(&self, nu: i64) -> Option<Int> {
        let v = self.value(nu);
        v.is_integer().then(|| v.to_integer())
    }

    /// Fill `value_at` for the given valences.
    pub fn with_values(mut self, nus: &[i64]) -> Self {
        for &nu in nus {
            if let Some(v) = self.value_int(nu) {
                self.value_at.insert(nu, v);
            }
        }
        self
    }

    /// Degree law observed in all published tables: 3g+j−1 for Q, 3(g+j−1) for S.
    pub fn degree_law_holds(&self) -> bool {
        let expect = match self.kind {
            CountKind::TwoLegged => 3 * self.g + self.j - 1,
            CountKind::Regular => 3 * (self.g + self.j - 1),
        };
        self.polynomial.degree() == Some(expect as usize)
    }
}

fn require_poly(f: RatFuncNu, g: u32, j: u32) -> Result<PolyNu, CountError> {
    f.as_poly().cloned().ok_or(CountError::NotPolynomial { g, j })
}

/// Q_{g,j}(ν) = j!·β̂_{2g,j}; 𝒩_g(2ν, j) = c_ν^j·Q_{g,j}(ν).
pub fn two_legged(g: u32, j: u32, rec: &RecTable) -> Result<CountResult, CountError> {
    if !rec.covers(g, j) {
        return Err(CountError::Missing { g, j });
    }
    let f = rec.coeff(g, j).coeff.scale(&Rat::from_integer(factorial(j as u64)));
    Ok(CountResult {
        kind: CountKind::TwoLegged,
        g,
        j,
        polynomial: require_poly(f, g, j)?,
        prefactor: Prefactor::SmallC,
        value_at: BTreeMap::new(),
    })
}

/// j!·α̂_{2g,j}: the polynomial multiplying c_ν^j in the regular count.
pub fn regular_c_form(g: u32, j: u32, free: &FreeTable) -> Result<PolyNu, CountError> {
    if !free.covers(g, j) || j == 0 {
        return Err(CountError::Missing { g, j });
    }
    let f = free.coeff(g, j).coeff.scale(&Rat::from_integer(factorial(j as u64)));
    require_poly(f, g, j)
}

/// S_{g,j}(ν) = (ν(ν+1))^j·j!·α̂_{2g,j}; 𝒩_g(2ν, j) = C_ν^j·S_{g,j}(ν).
pub fn regular(g: u32, j: u32, free: &FreeTable) -> Result<CountResult, CountError> {
    if !free.covers(g, j) || j == 0 {
        return Err(CountError::Missing { g, j });
    }
    let nn1 = PolyNu::from_ints(&[0, 1, 1]).pow(j);
    let f = free
        .coeff(g, j)
        .coeff
        .scale(&Rat::from_integer(factorial(j as u64)))
        .mul_poly(&nn1);
    Ok(CountResult {
        kind: CountKind::Regular,
        g,
        j,
        polynomial: require_poly(f, g, j)?,
        prefactor: Prefactor::Catalan,
        value_at: BTreeMap::new(),
    })
}

/// Plain integer count at a fixed valence, straight from the tables.
pub fn count_at(kind: CountKind, g: u32, j: u32, nu: i64, rec: &RecTable, free: &FreeTable) -> Result<Int, CountError> {
    let r = match kind {
        CountKind::TwoLegged => two_legged(g, j, rec)?,
        CountKind::Regular => regular(g, j, free)?,
    };
    r.value_int(nu).ok_or(CountError::NotPolynomial { g, j })
}

// ---------------------------------------------------------------------------
// Golden fixtures

/// One row of a fixture file: the polynomial (Σ num_coeffs[i]·ν^i)/den.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FixtureRow {
    pub kind: String,
    pub g: u32,
    #[serde(default)]
    pub j: Option<u32>,
    #[serde(default)]
    pub l: Option<u32>,
    pub den: String,
    pub num_coeffs: Vec<String>,
    #[serde(default)]
    pub source: String,
}

impl FixtureRow {
    pub fn poly(&self) -> Result<PolyNu, CountError> {
        let den = parse_rat(&self.den).map_err(|e| CountError::FixtureParse(e.to_string()))?;
        let p = PolyNu::from_rat_strings(&self.num_coeffs).map_err(|e| CountError::FixtureParse(e.to_string()))?;
        Ok(p.scale(&(Rat::one() / den)))
    }

    pub fn index(&self) -> u32 {
        self.j.or(self.l).unwrap_or(0)
    }
}

/// Environment variable overriding the fixture directory.
pub const FIXTURE_ENV: &str = "MAPGENUS_DATA_DIR";

pub fn fixture_dir() -> PathBuf {
    match std::env::var_os(FIXTURE_ENV) {
        Some(d) => PathBuf::from(d),
        None => PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/data")),
    }
}

pub fn load_fixture(path: &Path) -> Result<Vec<FixtureRow>, CountError> {
    let text = std::fs::read_to_string(path).map_err(|_| CountError::FixtureMissing(path.display().to_string()))?;
    serde_json::from_str(&text).map_err(|e| CountError::FixtureParse(format!("{}: {e}", path.display())))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GoldenId {
    QSmall,
    SSmall,
    QExt,
    SExt,
}

impl GoldenId {
    pub const ALL: [GoldenId; 4] = [GoldenId::QSmall, GoldenId::SSmall, GoldenId::QExt, GoldenId::SExt];

    pub fn file(&self) -> &'static str {
        match self {
            GoldenId::QSmall => "q_small.json",
            GoldenId::SSmall => "s_small.json",
            GoldenId::QExt => "q_ext.json",
            GoldenId::SExt => "s_ext.json",
        }
    }

    /// Table extent (g_max, j_max) needed to check this fixture.
    pub fn extent(&self) -> (u32, u32) {
        match self {
            GoldenId::QSmall | GoldenId::SSmall => (5, 3),
            GoldenId::QExt => (4, 12),
            GoldenId::SExt => (4, 10),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Mismatch {
    pub kind: String,
    pub g: u32,
    pub j: u32,
    pub expected: String,
    pub computed: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct GoldenReport {
    pub table: GoldenId,
    pub checked: usize,
    pub mismatches: Vec<Mismatch>,
}

impl GoldenReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.checked > 0
    }
}

/// Compare every row of a fixture against the polynomial computed from the
/// tables. Rows of kind `S_c` are compared against j!·α̂ (the c_ν form).
pub fn golden_check(id: GoldenId, dir: &Path, rec: &RecTable, free: &FreeTable) -> Result<GoldenReport, CountError> {
    let rows = load_fixture(&dir.join(id.file()))?;
    let mut report = GoldenReport { table: id, checked: 0, mismatches: Vec::new() };
    for row in &rows {
        let (g, j) = (row.g, row.index());
        let expected = row.poly()?;
        let computed = match row.kind.as_str() {
            "Q" => two_legged(g, j, rec).map(|r| r.polynomial),
            "S" => regular(g, j, free).map(|r| r.polynomial),
            "S_c" => regular_c_form(g, j, free),
            other => return Err(CountError::FixtureParse(format!("unknown kind {other}"))),
        };
        report.checked += 1;
        match computed {
            Ok(p) if p == expected => {}
            Ok(p) => report.mismatches.push(Mismatch {
                kind: row.kind.clone(),
                g,
                j,
                expected: expected.to_string(),
                computed: p.to_string(),
            }),
            Err(e) => report.mismatches.push(Mismatch {
                kind: row.kind.clone(),
                g,
                j,
                expected: expected.to_string(),
                computed: format!("error: {e}"),
            }),
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Roots

/// All complex roots of a nonzero polynomial by Aberth–Ehrlich iteration in
/// double precision. Exact zero roots are split off first.
pub fn roots_numeric(poly: &PolyNu) -> Vec<Complex64> {
    assert!(!poly.is_zero(), "roots of the zero polynomial");
    let cs = poly.coeffs();
    let low = cs.iter().position(|c| !c.is_zero()).unwrap();
    let mut out = vec![Complex64::new(0.0, 0.0); low];
    let lead = cs.last().unwrap().clone();
    // Monic, with the zero roots removed.
    let monic: Vec<f64> = cs[low..].iter().map(|c| rat_to_f64(&(c / &lead))).collect();
    let deg = monic.len() - 1;
    if deg == 0 {
        return out;
    }
    let eval = |z: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in monic.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    };
    // Initial guesses on a circle of the Cauchy-bound radius.
    let radius = 1.0 + monic[..deg].iter().fold(0.0f64, |m, c| m.max(c.abs())).powf(1.0 / deg as f64).min(1e6);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / deg as f64 + 0.4))
        .collect();
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for i in 0..deg {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..deg).filter(|&k| k != i).map(|k| Complex64::new(1.0, 0.0) / (z[i] - z[k])).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            z[i] -= w;
            moved = moved.max(w.norm() / (1.0 + z[i].norm()));
        }
        if moved < 1e-15 {
            break;
        }
    }
    // A few Newton polishing steps per root.
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = eval(*zi);
            if dp.norm() > 0.0 {
                *zi -= p / dp;
            }
        }
    }
    out.extend(z);
    out.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
    out
}

/// |p(z)| relative to Σ|c_i||z|^i, the scale-free residual used by tests.
pub fn relative_residual(poly: &PolyNu, z: Complex64) -> f64 {
    let mut p = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    for c in poly.coeffs().iter().rev() {
        let c = rat_to_f64(c);
        p = p * z + c;
        scale = scale * z.norm() + c.abs();
    }
    p.norm() / scale.max(f64::MIN_POSITIVE)
}

/// Whether ν^k and (ν+1)^k both divide p.
pub fn divisible_by_nu_nu1(p: &PolyNu, k: u32) -> bool {
    let f = PolyNu::from_ints(&[0, 1, 1]).pow(k);
    p.divrem(&f).is_some_and(|(_, r)| r.is_zero())
}

/// Nonnegative exact integer check used by integrality sweeps.
pub fn is_nonneg_integer(r: &Rat) -> bool {
    r.is_integer() && !r.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{build_rec, build_tables};

    #[test]
    fn catalan_and_c() {
        let cs: Vec<Int> = (1..=10).map(catalan).collect();
        let want = [1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796];
        assert_eq!(cs, want.iter().map(|&w| Int::from(w)).collect::<Vec<_>>());
        let small = [2, 12, 60, 280, 1260, 5544, 24024, 102960, 437580, 1847560];
        for (nu, w) in (1..=10).zip(small) {
            assert_eq!(c_nu(nu), Int::from(w));
            assert_eq!(c_nu(nu), Int::from(nu * (nu + 1)) * catalan(nu));
        }
    }

    #[test]
    fn two_legged_examples() {
        let rec = build_rec(2, 2).unwrap();
        let r = two_legged(0, 1, &rec).unwrap();
        assert_eq!(r.polynomial, PolyNu::one());
        assert_eq!(r.value_int(3), Some(Int::from(60)));
        let r = two_legged(1, 1, &rec).unwrap();
        assert_eq!(r.value_int(3), Some(Int::from(30)));
        let r = two_legged(2, 1, &rec).unwrap();
        assert_eq!(r.value_int(2), Some(Int::zero()));
    }

    #[test]
    fn regular_examples() {
        let (_, free) = build_tables(2, 2).unwrap();
        assert_eq!(regular(0, 1, &free).unwrap().polynomial, PolyNu::one());
        assert_eq!(regular(0, 1, &free).unwrap().value_int(2), Some(Int::from(2)));
        assert_eq!(regular(1, 2, &free).unwrap().value_int(2), Some(Int::from(60)));
        assert_eq!(regular(2, 1, &free).unwrap().value_int(2), Some(Int::zero()));
        let r = regular(1, 1, &free).unwrap().with_values(&[2, 3]);
        assert_eq!(r.value_at.get(&3), Some(&Int::from(10)));
    }

    #[test]
    fn roots_of_small_polys() {
        let (rec, free) = build_tables(2, 1).unwrap();
        let q11 = two_legged(1, 1, &rec).unwrap().polynomial;
        let r = roots_numeric(&q11);
        for (z, w) in r.iter().zip([0.0, 1.0, 2.0]) {
            assert!((z - Complex64::new(w, 0.0)).norm() < 1e-10, "{z}");
        }
        let s21 = regular(2, 1, &free).unwrap().polynomial;
        let mut re: Vec<f64> = roots_numeric(&s21).iter().map(|z| z.re).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in re.iter().zip([-1.0, 0.0, 0.4, 1.0, 2.0, 3.0]) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
        for z in roots_numeric(&s21) {
            assert!(relative_residual(&s21, z) < 1e-10);
        }
    }

    #[test]
    fn missing_entry() {
        let rec = build_rec(1, 1).unwrap();
        assert!(matches!(two_legged(2, 1, &rec), Err(CountError::Missing { .. })));
    }
}
