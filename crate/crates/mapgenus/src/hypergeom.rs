//! Exact terminating hypergeometric sums and the closed-form count formulas
//! built from them: planar, torus, general genus with a coefficient table,
//! the quartic (ν = 2) closed forms for g ≤ 3, and the hexic (ν = 3) results
//! for g ≤ 2.

use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::coeffs::{d_coeff, CoeffKind, CoeffTable};
use crate::counts::{c_nu, CountKind};
use crate::exact::{binom, factorial, rat, rat_int, Int, Rat};
#[cfg(test)]
use crate::exact::pochhammer;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HyperError {
    #[error("series has no nonpositive-integer upper parameter")]
    NonTerminating,
    #[error("lower Pochhammer symbol vanishes at k = {k}")]
    ZeroLowerPochhammer { k: usize },
    #[error("formula needs {0}")]
    Domain(String),
    #[error("coefficient table is for {have:?} g={have_g}, need {want:?} g={want_g}")]
    WrongTable { have: CoeffKind, have_g: u32, want: CoeffKind, want_g: u32 },
    #[error("coefficient ℓ={l} does not evaluate at ν={nu}")]
    Pole { l: usize, nu: i64 },
    #[error("result {0} is not an integer")]
    NotIntegral(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PFQSpec {
    pub upper: Vec<Rat>,
    pub lower: Vec<Rat>,
    pub z: Rat,
}

impl PFQSpec {
    pub fn new(upper: Vec<Rat>, lower: Vec<Rat>, z: Rat) -> Self {
        PFQSpec { upper, lower, z }
    }

    /// Integer parameters with a rational argument.
    pub fn ints(upper: &[i64], lower: &[i64], z: Rat) -> Self {
        PFQSpec::new(upper.iter().map(|&a| rat_int(a)).collect(), lower.iter().map(|&b| rat_int(b)).collect(), z)
    }

    /// The index after which every term vanishes.
    pub fn termination(&self) -> Option<usize> {
        self.upper
            .iter()
            .filter(|a| a.is_integer() && !a.is_positive())
            .map(|a| (-a.to_integer()).to_usize().expect("termination index fits"))
            .min()
    }
}

fn nonpos_int(r: &Rat) -> Option<usize> {
    (r.is_integer() && !r.is_positive()).then(|| (-r.to_integer()).to_usize().unwrap())
}

/// Σ_{k=0}^{m} ∏(a_i)_k / (∏(b_i)_k · k!) · z^k with m the termination index.
pub fn pfq(spec: &PFQSpec) -> Result<Rat, HyperError> {
    let m = spec.termination().ok_or(HyperError::NonTerminating)?;
    for b in &spec.lower {
        if let Some(nb) = nonpos_int(b) {
            // (b)_k = 0 for k > −b
            if nb < m {
                return Err(HyperError::ZeroLowerPochhammer { k: nb + 1 });
            }
        }
    }
    let mut term = Rat::one();
    let mut sum = Rat::one();
    for k in 0..m {
        let kk = rat_int(k as i64);
        for a in &spec.upper {
            term *= a + &kk;
        }
        for b in &spec.lower {
            term /= b + &kk;
        }
        term *= &spec.z;
        term /= &kk + Rat::one();
        sum += &term;
    }
    Ok(sum)
}

fn to_int(r: Rat) -> Result<Int, HyperError> {
    if r.is_integer() {
        Ok(r.to_integer())
    } else {
        Err(HyperError::NotIntegral(crate::exact::rat_to_string(&r)))
    }
}

fn big(n: i64) -> Rat {
    rat_int(n)
}

fn fact(n: i64) -> Rat {
    Rat::from_integer(factorial(n as u64))
}

fn ipow(b: i64, e: i64) -> Rat {
    rat_int(b).pow(e as i32)
}

fn cb(n: i64, k: i64) -> Rat {
    Rat::from_integer(binom(n, k))
}

/// 𝒩_0(2ν, j) = c_ν^j (νj−1)! / ((ν−1)j+2)!.
pub fn count_sphere(nu: i64, j: i64) -> Result<Int, HyperError> {
    if nu < 1 || j < 1 {
        return Err(HyperError::Domain("nu >= 1, j >= 1".into()));
    }
    let c = Rat::from_integer(c_nu(nu)).pow(j as i32);
    to_int(c * fact(nu * j - 1) / fact((nu - 1) * j + 2))
}

/// Genus-one regular count as a difference of two ₃F₂ sums at 1−ν; binomials
/// with a negative lower index are zero, which removes the second sum at j = 1.
pub fn count_torus(nu: i64, j: i64) -> Result<Int, HyperError> {
    if nu < 2 || j < 1 {
        return Err(HyperError::Domain("nu >= 2, j >= 1".into()));
    }
    let z = big(1 - nu);
    let first = cb(nu * j - 1, j - 1) * big(nu - 1)
        * pfq(&PFQSpec::ints(&[1, 1, 1 - j], &[2, (nu - 1) * j + 1], z.clone()))?;
    let b2 = cb(nu * j - 1, j - 2);
    let second = if b2.is_zero() {
        Rat::zero()
    } else {
        b2 * big(nu - 1).pow(2) * pfq(&PFQSpec::ints(&[1, 1, 2 - j], &[2, (nu - 1) * j + 2], z))?
    };
    let pre = fact(j) * Rat::from_integer(c_nu(nu)).pow(j as i32) / big(12);
    to_int(pre * (first - second))
}

/// j!·c_ν^j·(ν−1)^j·Σ_ℓ coeff_ℓ(ν)·d_ℓ·₂F₁(−j, p; q_ℓ; 1/(1−ν)).
pub fn count_general(kind: CountKind, g: u32, nu: i64, j: u32, coeffs: &CoeffTable) -> Result<Int, HyperError> {
    let ck = match kind {
        CountKind::Regular => CoeffKind::B,
        CountKind::TwoLegged => CoeffKind::A,
    };
    if coeffs.kind != ck || coeffs.g != g {
        return Err(HyperError::WrongTable { have: coeffs.kind, have_g: coeffs.g, want: ck, want_g: g });
    }
    if g < ck.min_genus() || nu < 2 || j < 1 {
        return Err(HyperError::Domain(format!("g >= {}, nu >= 2, j >= 1", ck.min_genus())));
    }
    let (gi, ji) = (g as i64, j as i64);
    let z = rat(1, 1 - nu);
    let mut sum = Rat::zero();
    for (l, c) in coeffs.entries.iter().enumerate() {
        let li = l as i64;
        let (p, q) = match kind {
            CountKind::Regular => (1 - nu * ji, 4 - 2 * gi - li - ji),
            CountKind::TwoLegged => (-nu * ji, 2 - 2 * gi - li - ji),
        };
        // First vanishing lower index is 1−q ≥ j+1 for admissible g; pfq
        // reports a violation as ZeroLowerPochhammer.
        let f = pfq(&PFQSpec::ints(&[-ji, p], &[q], z.clone()))?;
        let cv = c.eval(&rat_int(nu)).ok_or(HyperError::Pole { l, nu })?;
        sum += cv * d_coeff(ck, g, l, j) * f;
    }
    let pre = fact(ji) * Rat::from_integer(c_nu(nu)).pow(j as i32) * big(nu - 1).pow(j as i32);
    to_int(pre * sum)
}

/// Closed forms for 𝒩_g(4, j), g ≤ 3, with the listed zeros below the
/// shifted ranges.
pub fn quartic_closed(g: u32, j: i64) -> Result<Int, HyperError> {
    if j < 1 {
        return Err(HyperError::Domain("j >= 1".into()));
    }
    let r = match g {
        0 => ipow(12, j) * fact(2 * j - 1) / fact(j + 2),
        1 => ipow(12, j) * (ipow(4, j) * fact(j).pow(2) - fact(2 * j)) / (big(24 * j) * fact(j)),
        2 => {
            if j == 1 {
                return Ok(Int::zero());
            }
            let m = j - 1;
            ipow(12, m) * fact(2 * m + 2) * big(28 * m + 37) / (big(360 * (m + 1)) * fact(m - 1))
                - big(13 * m * (m + 1)) * fact(m) * ipow(48, m - 1)
        }
        3 => {
            if j <= 4 {
                return Ok(Int::zero());
            }
            let m = j - 4;
            let pre = big(16) * ipow(48, m) * fact(m + 3) / (big(3) * fact(m));
            let inner = rat(2741, 10) * fact(m + 5) - rat(291, 10) * big(m) * fact(m + 4)
                - rat(2741, 1260) * fact(2 * m + 9) / (ipow(4, m) * fact(m + 4))
                - big(292 * m) * fact(2 * m + 7) / (big(315) * ipow(4, m) * fact(m + 3));
            pre * inner
        }
        _ => return Err(HyperError::Domain("g <= 3".into())),
    };
    to_int(r)
}

/// ₂F₁(a, b; c; −2), the argument every hexic formula uses.
fn f2(a: i64, b: i64, c: i64) -> Rat {
    pfq(&PFQSpec::ints(&[a, b], &[c], big(-2))).expect("hexic 2F1 terminates with safe lower parameter")
}

/// Σ_i w_i · binom(3j, j−s_i) · ₂F₁(a, s_i−j; 1+s_i+2j; −2) over (w_i, s_i).
fn hexic_bracket(j: i64, a: i64, terms: &[(i64, i64)]) -> Rat {
    terms
        .iter()
        .filter(|&&(_, s)| j - s >= 0)
        .map(|&(w, s)| big(w) * cb(3 * j, j - s) * f2(a, s - j, 1 + s + 2 * j))
        .sum()
}

const BETA4_TERMS: [(i64, i64); 4] = [(59, 2), (4011, 3), (27528, 4), (34268, 5)];
const ALPHA4_TERMS: [(i64, i64); 5] = [(371, 2), (6735, 3), (23496, 4), (25004, 5), (7872, 6)];

/// The literal hexic coefficient β_{2g,j} (rec) or α_{2g,j} (free) at ν = 3,
/// returned as (rational factor, power of x).
pub fn hexic_series(kind: CountKind, g: u32, j: i64) -> Result<(Rat, i64), HyperError> {
    if j < 1 || g > 2 {
        return Err(HyperError::Domain("g <= 2, j >= 1".into()));
    }
    let s = ipow(-10, j);
    let gi = g as i64;
    match kind {
        CountKind::TwoLegged => {
            let xp = 2 * j + 1 - 2 * gi;
            let v = match g {
                0 => s * fact(3 * j) / (fact(j) * fact(2 * j + 1)),
                1 => {
                    if j == 1 {
                        big(-5)
                    } else {
                        s / big(2) * (big(10) * cb(3 * j, j - 2) * f2(3, 2 - j, 3 + 2 * j) + cb(3 * j, j - 1) * f2(3, 1 - j, 2 + 2 * j))
                    }
                }
                _ => match j {
                    1 => Rat::zero(),
                    2 => big(295),
                    3 => big(-274300),
                    4 => big(81777000),
                    _ => s / big(20) * hexic_bracket(j, 8, &BETA4_TERMS),
                },
            };
            Ok((v, xp))
        }
        CountKind::Regular => {
            let xp = 2 * j - 2 * gi;
            let v = match g {
                0 => s * (cb(3 * j + 1, j) - big(2) * cb(3 * j + 1, j - 1)) / big(6 * j * (3 * j + 1)),
                1 => s * big(2) * cb(2 + 3 * j, j - 1) * f2(3, 1 - j, 4 + 2 * j) / big(3 * j * (3 * j + 1)),
                _ => match j {
                    1 => Rat::zero(),
                    2 => rat(265, 4),
                    3 => rat(-40025, 3),
                    4 => big(1736625),
                    5 => big(-187387500),
                    _ => s / big(40 * j * (3 * j + 1)) * hexic_bracket(j, 8, &ALPHA4_TERMS),
                },
            };
            Ok((v, xp))
        }
    }
}

/// Hexic counts 𝒩_g(6, j) for g ≤ 2, from the explicit formulas with their
/// listed small-j values.
pub fn hexic_closed(kind: CountKind, g: u32, j: i64) -> Result<Int, HyperError> {
    if j < 1 || g > 2 {
        return Err(HyperError::Domain("g <= 2, j >= 1".into()));
    }
    let r = match (kind, g) {
        (CountKind::Regular, 0) => ipow(60, j) * fact(3 * j - 1) / fact(2 * j + 2),
        (CountKind::Regular, 1) => {
            big(40) / big(3 * j + 1) * fact(j - 1) * ipow(60, j - 1) * cb(2 + 3 * j, j - 1) * f2(3, 1 - j, 4 + 2 * j)
        }
        (CountKind::Regular, _) => match j {
            1 => Rat::zero(),
            2 => big(4770),
            3 => big(17290800),
            4 => big(54015984) * ipow(10, 3),
            5 => big(174855024) * ipow(10, 6),
            _ => rat(3, 2) / big(3 * j + 1) * fact(j - 1) * ipow(60, j - 1) * hexic_bracket(j, 8, &ALPHA4_TERMS),
        },
        (CountKind::TwoLegged, 0) => ipow(60, j) * fact(3 * j) / fact(2 * j + 1),
        (CountKind::TwoLegged, 1) => {
            if j == 1 {
                big(30)
            } else {
                fact(j) * ipow(60, j) / big(2)
                    * (big(10) * cb(3 * j, j - 2) * f2(3, 2 - j, 3 + 2 * j) + cb(3 * j, j - 1) * f2(3, 1 - j, 2 + 2 * j))
            }
        }
        (CountKind::TwoLegged, _) => match j {
            1 => Rat::zero(),
            2 => big(21240),
            3 => big(355492800),
            4 => big(2543591808) * ipow(10, 3),
            // Same pairing of weights with ₂F₁ parameters as β_{4,j}.
            _ => fact(j) * ipow(60, j) / big(20) * hexic_bracket(j, 8, &BETA4_TERMS),
        },
    };
    to_int(r)
}

/// ₂F₁ with integer parameters at a rational argument.
pub fn hyp2f1(a: i64, b: i64, c: i64, z: Rat) -> Result<Rat, HyperError> {
    pfq(&PFQSpec::ints(&[a, b], &[c], z))
}
