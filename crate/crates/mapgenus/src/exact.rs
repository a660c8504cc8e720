//! Exact scalars, dense polynomials in the formal valence variable ν, rational
//! functions in ν, and Gaussian elimination over Q(ν).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Rat = BigRational;
pub type Int = BigInt;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("singular system: no pivot available in column {column}")]
    SingularSystem { column: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("binomial with negative top ({n} choose {k})")]
    NegativeTop { n: i64, k: i64 },
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("cannot parse rational {0:?}")]
    Parse(String),
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

pub fn rat_int(n: impl Into<Int>) -> Rat {
    Rat::from_integer(n.into())
}

/// Canonical text form: `p/q`, or `p` when the denominator is one.
pub fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rat(s: &str) -> Result<Rat, ExactError> {
    let s = s.trim();
    let bad = || ExactError::Parse(s.to_string());
    match s.split_once('/') {
        Some((p, q)) => {
            let p: Int = p.trim().parse().map_err(|_| bad())?;
            let q: Int = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rat::new(p, q))
        }
        None => Ok(Rat::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Rising factorial a(a+1)...(a+k-1).
pub fn pochhammer(a: &Rat, k: usize) -> Rat {
    let mut acc = Rat::one();
    let mut t = a.clone();
    for _ in 0..k {
        if t.is_zero() {
            return Rat::zero();
        }
        acc *= &t;
        t += Rat::one();
    }
    acc
}

pub fn factorial(n: u64) -> Int {
    (1..=n).fold(Int::one(), |acc, i| acc * i)
}

/// Binomial coefficient with the convention that it vanishes for k < 0 and
/// for k > n >= 0. Negative tops are rejected rather than generalized.
pub fn binom_int(n: i64, k: i64) -> Result<Int, ExactError> {
    if n < 0 {
        return Err(ExactError::NegativeTop { n, k });
    }
    if k < 0 || k > n {
        return Ok(Int::zero());
    }
    let k = k.min(n - k);
    let mut acc = Int::one();
    for i in 0..k {
        acc = acc * Int::from(n - i) / Int::from(i + 1);
    }
    Ok(acc)
}

/// Binomial where the caller guarantees a nonnegative top.
pub fn binom(n: i64, k: i64) -> Int {
    binom_int(n, k).expect("binomial top must be nonnegative here")
}

/// Univariate polynomial in ν with rational coefficients, lowest degree first.
/// The zero polynomial is the empty list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct PolyNu {
    coeffs: Vec<Rat>,
}

impl PolyNu {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        PolyNu { coeffs }
    }

    pub fn from_ints(cs: &[i64]) -> Self {
        PolyNu::new(cs.iter().map(|&c| rat_int(c)).collect())
    }

    pub fn zero() -> Self {
        PolyNu { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        PolyNu::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        PolyNu::new(vec![c])
    }

    /// The polynomial ν itself.
    pub fn nu() -> Self {
        PolyNu::from_ints(&[0, 1])
    }

    /// a·ν + b.
    pub fn linear(a: i64, b: i64) -> Self {
        PolyNu::from_ints(&[b, a])
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn scale(&self, c: &Rat) -> PolyNu {
        if c.is_zero() {
            return PolyNu::zero();
        }
        PolyNu { coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_int(&self, x: i64) -> Rat {
        self.eval(&rat_int(x))
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + rat_to_f64(c);
        }
        acc
    }

    pub fn pow(&self, k: u32) -> PolyNu {
        let mut acc = PolyNu::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Rising factorial p(p+1)...(p+k-1) as a polynomial.
    pub fn pochhammer(&self, k: usize) -> PolyNu {
        let mut acc = PolyNu::one();
        let mut t = self.clone();
        for _ in 0..k {
            acc = &acc * &t;
            t = &t + &PolyNu::one();
        }
        acc
    }

    /// Euclidean division; `None` when dividing by zero.
    pub fn divrem(&self, d: &PolyNu) -> Option<(PolyNu, PolyNu)> {
        let dd = d.degree()?;
        let lc = d.leading()?.clone();
        let mut r = self.coeffs.clone();
        if r.len() < d.coeffs.len() {
            return Some((PolyNu::zero(), self.clone()));
        }
        let mut q = vec![Rat::zero(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let c = &r[i + dd] / &lc;
            if !c.is_zero() {
                for (k, dk) in d.coeffs.iter().enumerate() {
                    r[i + k] -= &c * dk;
                }
            }
            q[i] = c;
        }
        r.truncate(dd);
        Some((PolyNu::new(q), PolyNu::new(r)))
    }

    /// Exact quotient, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &PolyNu) -> Option<PolyNu> {
        let (q, r) = self.divrem(d)?;
        r.is_zero().then_some(q)
    }

    /// Rational c such that self / c has coprime integer coefficients and a
    /// positive leading term.
    pub fn content(&self) -> Rat {
        if self.is_zero() {
            return Rat::one();
        }
        let mut num_gcd = Int::zero();
        let mut den_lcm = Int::one();
        for c in &self.coeffs {
            if c.is_zero() {
                continue;
            }
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut c = Rat::new(num_gcd, den_lcm);
        if self.leading().is_some_and(|l| l.is_negative()) {
            c = -c;
        }
        c
    }

    /// Integer coefficients of the primitive part (content removed).
    fn primitive_ints(&self) -> Vec<Int> {
        let c = self.content();
        self.coeffs
            .iter()
            .map(|x| {
                let y = x / &c;
                debug_assert!(y.is_integer());
                y.to_integer()
            })
            .collect()
    }

    pub fn primitive(&self) -> PolyNu {
        if self.is_zero() {
            return PolyNu::zero();
        }
        let c = self.content();
        self.scale(&c.recip())
    }

    pub fn gcd(&self, other: &PolyNu) -> PolyNu {
        poly_gcd(self, other)
    }

    pub fn to_rat_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(rat_to_string).collect()
    }

    pub fn from_rat_strings<S: AsRef<str>>(v: &[S]) -> Result<PolyNu, ExactError> {
        Ok(PolyNu::new(v.iter().map(|s| parse_rat(s.as_ref())).collect::<Result<_, _>>()?))
    }
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    // Ratio of big integers can overflow f64 individually; shift both.
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            let nb = r.numer().bits() as i64;
            let db = r.denom().bits() as i64;
            let shift_n = (nb - 900).max(0);
            let shift_d = (db - 900).max(0);
            let n = (r.numer() >> shift_n as usize).to_f64().unwrap_or(f64::NAN);
            let d = (r.denom() >> shift_d as usize).to_f64().unwrap_or(f64::NAN);
            n / d * 2f64.powi((shift_n - shift_d) as i32)
        }
    }
}

fn trim_ints(v: &mut Vec<Int>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

fn ints_content(v: &[Int]) -> Int {
    v.iter().fold(Int::zero(), |g, c| g.gcd(c))
}

/// Pseudo-remainder of a by b over Z (b nonzero, deg a >= deg b).
fn prem(a: &[Int], b: &[Int]) -> Vec<Int> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lb = &b[db];
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        for c in r.iter_mut() {
            *c *= lb;
        }
        let shift = dr - db;
        for (k, bk) in b.iter().enumerate() {
            r[shift + k] -= &lr * bk;
        }
        trim_ints(&mut r);
    }
    r
}

/// Greatest common divisor normalized to content 1 and positive leading
/// coefficient; gcd(0, 0) is 0. Runs the primitive remainder sequence over Z.
pub fn poly_gcd(p: &PolyNu, q: &PolyNu) -> PolyNu {
    if p.is_zero() && q.is_zero() {
        return PolyNu::zero();
    }
    if p.is_zero() {
        return q.primitive();
    }
    if q.is_zero() {
        return p.primitive();
    }
    let mut a = p.primitive_ints();
    let mut b = q.primitive_ints();
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        if b.len() == 1 {
            return PolyNu::one();
        }
        let mut r = prem(&a, &b);
        if !r.is_empty() {
            let c = ints_content(&r);
            for x in r.iter_mut() {
                *x = &*x / &c;
            }
        }
        a = b;
        b = r;
    }
    PolyNu::new(a.into_iter().map(Rat::from_integer).collect()).primitive()
}

impl fmt::Display for PolyNu {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let mag = rat_to_string(&a);
            match (i, a.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "nu")?,
                (1, false) => write!(f, "{mag}*nu")?,
                (_, true) => write!(f, "nu^{i}")?,
                (_, false) => write!(f, "{mag}*nu^{i}")?,
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a PolyNu> for &'a PolyNu {
    type Output = PolyNu;
    fn add(self, o: &PolyNu) -> PolyNu {
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            v.push(match (self.coeffs.get(i), o.coeffs.get(i)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            });
        }
        PolyNu::new(v)
    }
}

impl<'a> Sub<&'a PolyNu> for &'a PolyNu {
    type Output = PolyNu;
    fn sub(self, o: &PolyNu) -> PolyNu {
        self + &(-o)
    }
}

impl Neg for &PolyNu {
    type Output = PolyNu;
    fn neg(self) -> PolyNu {
        PolyNu { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl<'a> Mul<&'a PolyNu> for &'a PolyNu {
    type Output = PolyNu;
    fn mul(self, o: &PolyNu) -> PolyNu {
        if self.is_zero() || o.is_zero() {
            return PolyNu::zero();
        }
        let mut v = vec![Rat::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        PolyNu::new(v)
    }
}

macro_rules! owned_ops {
    ($t:ty) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, o: $t) -> $t {
                &self + &o
            }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, o: $t) -> $t {
                &self - &o
            }
        }
        impl Mul for $t {
            type Output = $t;
            fn mul(self, o: $t) -> $t {
                &self * &o
            }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                -&self
            }
        }
    };
}

owned_ops!(PolyNu);
owned_ops!(RatFuncNu);

/// Reduced quotient num/den of polynomials in ν. Canonical form: the
/// numerator and denominator are coprime and the denominator is monic, so
/// structural equality is mathematical equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFuncNu {
    num: PolyNu,
    den: PolyNu,
}

impl Default for RatFuncNu {
    fn default() -> Self {
        RatFuncNu::zero()
    }
}

impl RatFuncNu {
    pub fn new(num: PolyNu, den: PolyNu) -> Result<Self, ExactError> {
        if den.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: PolyNu, den: PolyNu) -> Self {
        if num.is_zero() {
            return RatFuncNu::zero();
        }
        let (num, den) = if den.is_constant() {
            (num, den)
        } else {
            let g = poly_gcd(&num, &den);
            if g.is_constant() {
                (num, den)
            } else {
                (num.div_exact(&g).expect("gcd divides"), den.div_exact(&g).expect("gcd divides"))
            }
        };
        let lc = den.leading().expect("nonzero denominator").recip();
        RatFuncNu { num: num.scale(&lc), den: den.scale(&lc) }
    }

    pub fn zero() -> Self {
        RatFuncNu { num: PolyNu::zero(), den: PolyNu::one() }
    }

    pub fn one() -> Self {
        RatFuncNu::from_poly(PolyNu::one())
    }

    pub fn from_poly(p: PolyNu) -> Self {
        RatFuncNu { num: p, den: PolyNu::one() }
    }

    pub fn from_rat(r: Rat) -> Self {
        RatFuncNu::from_poly(PolyNu::constant(r))
    }

    pub fn num(&self) -> &PolyNu {
        &self.num
    }

    pub fn den(&self) -> &PolyNu {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// The polynomial when the denominator is constant (always 1 in canonical form).
    pub fn as_poly(&self) -> Option<&PolyNu> {
        self.den.is_constant().then_some(&self.num)
    }

    pub fn recip(&self) -> Result<Self, ExactError> {
        RatFuncNu::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, o: &RatFuncNu) -> Result<Self, ExactError> {
        Ok(self * &o.recip()?)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return RatFuncNu::zero();
        }
        RatFuncNu { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn mul_poly(&self, p: &PolyNu) -> Self {
        RatFuncNu::reduce(&self.num * p, self.den.clone())
    }

    pub fn div_poly(&self, p: &PolyNu) -> Result<Self, ExactError> {
        RatFuncNu::new(self.num.clone(), &self.den * p)
    }

    /// Evaluate at a rational point; `None` at a pole.
    pub fn eval(&self, x: &Rat) -> Option<Rat> {
        let d = self.den.eval(x);
        (!d.is_zero()).then(|| self.num.eval(x) / d)
    }

    /// Degree used as the pivot cost: deg num + deg den.
    pub fn total_degree(&self) -> usize {
        self.num.degree().unwrap_or(0) + self.den.degree().unwrap_or(0)
    }
}

impl fmt::Display for RatFuncNu {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl<'a> Add<&'a RatFuncNu> for &'a RatFuncNu {
    type Output = RatFuncNu;
    fn add(self, o: &RatFuncNu) -> RatFuncNu {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            return RatFuncNu::reduce(&self.num + &o.num, self.den.clone());
        }
        let num = &(&self.num * &o.den) + &(&o.num * &self.den);
        RatFuncNu::reduce(num, &self.den * &o.den)
    }
}

impl<'a> Sub<&'a RatFuncNu> for &'a RatFuncNu {
    type Output = RatFuncNu;
    fn sub(self, o: &RatFuncNu) -> RatFuncNu {
        self + &(-o)
    }
}

impl Neg for &RatFuncNu {
    type Output = RatFuncNu;
    fn neg(self) -> RatFuncNu {
        RatFuncNu { num: -&self.num, den: self.den.clone() }
    }
}

impl<'a> Mul<&'a RatFuncNu> for &'a RatFuncNu {
    type Output = RatFuncNu;
    fn mul(self, o: &RatFuncNu) -> RatFuncNu {
        if self.is_zero() || o.is_zero() {
            return RatFuncNu::zero();
        }
        // Cross-cancel first to keep the products small.
        let g1 = poly_gcd(&self.num, &o.den);
        let g2 = poly_gcd(&o.num, &self.den);
        let n1 = self.num.div_exact(&g1).expect("gcd divides");
        let d2 = o.den.div_exact(&g1).expect("gcd divides");
        let n2 = o.num.div_exact(&g2).expect("gcd divides");
        let d1 = self.den.div_exact(&g2).expect("gcd divides");
        let num = &n1 * &n2;
        let den = &d1 * &d2;
        let lc = den.leading().expect("nonzero").recip();
        RatFuncNu { num: num.scale(&lc), den: den.scale(&lc) }
    }
}

/// Solve `matrix · x = rhs` exactly over Q(ν) by Gaussian elimination with
/// full pivoting, choosing the nonzero pivot of lowest total degree.
pub fn linsolve(matrix: &[Vec<RatFuncNu>], rhs: &[RatFuncNu]) -> Result<Vec<RatFuncNu>, ExactError> {
    let n = matrix.len();
    if rhs.len() != n {
        return Err(ExactError::DimensionMismatch(format!("{n} rows but rhs of length {}", rhs.len())));
    }
    if let Some(row) = matrix.iter().find(|r| r.len() != n) {
        return Err(ExactError::DimensionMismatch(format!("row of length {} in {n}x{n} system", row.len())));
    }
    let mut a: Vec<Vec<RatFuncNu>> = matrix.to_vec();
    let mut b: Vec<RatFuncNu> = rhs.to_vec();
    // perm[k] is the original unknown sitting in working column k.
    let mut perm: Vec<usize> = (0..n).collect();

    for k in 0..n {
        let mut best: Option<(usize, usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(k) {
            for (j, e) in row.iter().enumerate().skip(k) {
                if e.is_zero() {
                    continue;
                }
                let cost = e.total_degree();
                if best.is_none_or(|(_, _, c)| cost < c) {
                    best = Some((i, j, cost));
                }
            }
        }
        let (pi, pj, _) = best.ok_or(ExactError::SingularSystem { column: perm[k] })?;
        a.swap(k, pi);
        b.swap(k, pi);
        if pj != k {
            for row in a.iter_mut() {
                row.swap(k, pj);
            }
            perm.swap(k, pj);
        }
        let inv = a[k][k].recip()?;
        for i in (k + 1)..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] * &inv;
            for j in (k + 1)..n {
                if a[k][j].is_zero() {
                    continue;
                }
                let t = &f * &a[k][j];
                a[i][j] = &a[i][j] - &t;
            }
            let t = &f * &b[k];
            b[i] = &b[i] - &t;
            a[i][k] = RatFuncNu::zero();
        }
    }

    let mut y = vec![RatFuncNu::zero(); n];
    for k in (0..n).rev() {
        let mut s = b[k].clone();
        for j in (k + 1)..n {
            if !a[k][j].is_zero() {
                s = &s - &(&a[k][j] * &y[j]);
            }
        }
        y[k] = s.div(&a[k][k])?;
    }
    let mut x = vec![RatFuncNu::zero(); n];
    for (k, v) in y.into_iter().enumerate() {
        x[perm[k]] = v;
    }
    Ok(x)
}

/// Matrix-vector product over Q(ν), used to certify solutions.
pub fn matvec(matrix: &[Vec<RatFuncNu>], x: &[RatFuncNu]) -> Vec<RatFuncNu> {
    matrix
        .iter()
        .map(|row| row.iter().zip(x).fold(RatFuncNu::zero(), |acc, (a, b)| &acc + &(a * b)))
        .collect()
}
