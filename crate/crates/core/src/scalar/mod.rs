//! Exact coefficients: rational functions over the rationals in the formal
//! variables `s`, `r`, `t`, with the conventions `q = s^4` and `p = r^4`.

mod poly;

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use poly::{gcd, Exps, Poly, NVARS};

/// Index of `s` (fourth root of q).
pub const VAR_S: usize = 0;
/// Index of `r` (fourth root of p).
pub const VAR_R: usize = 1;
/// Index of the auxiliary parameter `t`.
pub const VAR_T: usize = 2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScalarError {
    #[error("malformed scalar: zero denominator")]
    ZeroDenominator,
    #[error("denominator vanishes at the evaluation point")]
    Singular,
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
}

/// A rational function kept in canonical reduced form: numerator and
/// denominator coprime, denominator with leading coefficient one.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Scalar {
    num: Poly,
    den: Poly,
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        Scalar {
            num: Poly::one(),
            den: Poly::one(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::from_poly(Poly::from_int(n))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        Scalar::from_rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn from_rational(c: BigRational) -> Self {
        Scalar::from_poly(Poly::constant(c))
    }

    pub fn from_poly(p: Poly) -> Self {
        Scalar {
            num: p,
            den: Poly::one(),
        }
    }

    /// Builds `num / den` and reduces it.
    pub fn from_fraction(num: Poly, den: Poly) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::ZeroDenominator);
        }
        Ok(Scalar::reduce(num, den))
    }

    pub fn s() -> Self {
        Scalar::from_poly(Poly::var(VAR_S))
    }

    pub fn r() -> Self {
        Scalar::from_poly(Poly::var(VAR_R))
    }

    pub fn t() -> Self {
        Scalar::from_poly(Poly::var(VAR_T))
    }

    /// `q = s^4`.
    pub fn q() -> Self {
        Scalar::q_pow(4)
    }

    /// `p = r^4`.
    pub fn p() -> Self {
        Scalar::p_pow(4)
    }

    /// `q^(quarters/4)`, i.e. `s^quarters`; negative exponents allowed.
    pub fn q_pow(quarters: i32) -> Self {
        Scalar::var_pow(VAR_S, quarters)
    }

    /// `p^(quarters/4)`.
    pub fn p_pow(quarters: i32) -> Self {
        Scalar::var_pow(VAR_R, quarters)
    }

    pub fn var_pow(var: usize, e: i32) -> Self {
        let mut exps = [0u32; NVARS];
        exps[var] = e.unsigned_abs();
        let m = Poly::monomial(exps, BigRational::one());
        if e >= 0 {
            Scalar::from_poly(m)
        } else {
            Scalar {
                num: Poly::one(),
                den: m,
            }
        }
    }

    /// Canonical form of an arbitrary fraction (exposed as the simplify operation).
    pub fn simplify(num: &Poly, den: &Poly) -> Result<Self, ScalarError> {
        Scalar::from_fraction(num.clone(), den.clone())
    }

    fn reduce(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return Scalar::zero();
        }
        let (num, den) = if den.is_constant() {
            (num, den)
        } else {
            let g = gcd(&num, &den);
            if g.is_one() {
                (num, den)
            } else {
                (num.div_exact(&g).unwrap(), den.div_exact(&g).unwrap())
            }
        };
        let lc = den.leading_coeff();
        if lc.is_one() {
            Scalar { num, den }
        } else {
            let inv = lc.recip();
            Scalar {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    /// The rational value of a constant scalar.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.den.is_constant() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero scalar");
        Scalar::reduce(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, n: i32) -> Self {
        let base = if n < 0 { self.inv() } else { self.clone() };
        let mut acc = Scalar::one();
        for _ in 0..n.unsigned_abs() {
            acc = &acc * &base;
        }
        acc
    }

    /// Evaluates with `q`, `p` given directly; `s = q^(1/4)`, `r = p^(1/4)`.
    pub fn evaluate(&self, q: f64, p: f64, t: f64) -> Result<Complex64, ScalarError> {
        let point = [q.powf(0.25), p.powf(0.25), t];
        let d = self.den.eval_f64(&point);
        if d == 0.0 || !d.is_finite() {
            return Err(ScalarError::Singular);
        }
        Ok(Complex64::new(self.num.eval_f64(&point) / d, 0.0))
    }

    /// Evaluates from named bindings (`q`, `p`, `s`, `r`, `t`); missing parameters default to zero.
    pub fn evaluate_named(&self, bindings: &[(&str, f64)]) -> Result<Complex64, ScalarError> {
        let mut point = [0.0; NVARS];
        for (name, v) in bindings {
            match *name {
                "q" => point[VAR_S] = v.powf(0.25),
                "p" => point[VAR_R] = v.powf(0.25),
                "s" => point[VAR_S] = *v,
                "r" => point[VAR_R] = *v,
                "t" => point[VAR_T] = *v,
                other => return Err(ScalarError::UnknownParameter(other.to_string())),
            }
        }
        let d = self.den.eval_f64(&point);
        if d == 0.0 || !d.is_finite() {
            return Err(ScalarError::Singular);
        }
        Ok(Complex64::new(self.num.eval_f64(&point) / d, 0.0))
    }

    /// Exact value at a rational point `(s, r, t)`.
    pub fn eval_rational(&self, point: &[BigRational; NVARS]) -> Result<BigRational, ScalarError> {
        let d = self.den.eval_rational(point);
        if d.is_zero() {
            return Err(ScalarError::Singular);
        }
        Ok(self.num.eval_rational(point) / d)
    }

    /// Reduction modulo the prime `m` at the point `(s, r, t)` given as residues.
    pub fn eval_mod(&self, point: &[u64; NVARS], m: u64) -> Result<u64, ScalarError> {
        let d = eval_poly_mod(&self.den, point, m).ok_or(ScalarError::Singular)?;
        if d == 0 {
            return Err(ScalarError::Singular);
        }
        let n = eval_poly_mod(&self.num, point, m).ok_or(ScalarError::Singular)?;
        Ok(mulmod(n, powmod(d, m - 2, m), m))
    }

    /// Substitutes `r -> s` (specializes `p = q`).
    pub fn identify_p_with_q(&self) -> Self {
        let sub = |p: &Poly| {
            Poly::from_terms(
                p.terms()
                    .iter()
                    .map(|(e, c)| {
                        let mut e2 = *e;
                        e2[VAR_S] += e2[VAR_R];
                        e2[VAR_R] = 0;
                        (e2, c.clone())
                    })
                    .collect(),
            )
        };
        Scalar::reduce(sub(&self.num), sub(&self.den))
    }
}

pub(crate) fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn powmod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a, m);
        }
        a = mulmod(a, a, m);
        e >>= 1;
    }
    acc
}

fn bigint_mod(x: &BigInt, m: u64) -> u64 {
    let r = x % BigInt::from(m);
    let r = if r.is_negative() { r + BigInt::from(m) } else { r };
    r.try_into().unwrap()
}

fn eval_poly_mod(p: &Poly, point: &[u64; NVARS], m: u64) -> Option<u64> {
    let mut acc = 0u64;
    for (e, c) in p.terms() {
        let d = bigint_mod(c.denom(), m);
        if d == 0 {
            return None;
        }
        let mut term = mulmod(bigint_mod(c.numer(), m), powmod(d, m - 2, m), m);
        for i in 0..NVARS {
            if e[i] > 0 {
                term = mulmod(term, powmod(point[i], e[i] as u64, m), m);
            }
        }
        acc = (acc + term) % m;
    }
    Some(acc)
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            let num = self.num.add(&o.num);
            if self.den.is_one() {
                return Scalar::from_poly(num);
            }
            return Scalar::reduce(num, self.den.clone());
        }
        let g = gcd(&self.den, &o.den);
        let b = self.den.div_exact(&g).unwrap();
        let d = o.den.div_exact(&g).unwrap();
        let num = self.num.mul(&d).add(&o.num.mul(&b));
        Scalar::reduce(num, b.mul(&o.den))
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        self + &(-o)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        if self.is_zero() || o.is_zero() {
            return Scalar::zero();
        }
        if self.den.is_one() && o.den.is_one() {
            return Scalar::from_poly(self.num.mul(&o.num));
        }
        let g1 = gcd(&self.num, &o.den);
        let g2 = gcd(&o.num, &self.den);
        let a = self.num.div_exact(&g1).unwrap();
        let d = o.den.div_exact(&g1).unwrap();
        let c = o.num.div_exact(&g2).unwrap();
        let b = self.den.div_exact(&g2).unwrap();
        let num = a.mul(&c);
        let den = b.mul(&d);
        let lc = den.leading_coeff();
        if lc.is_one() {
            Scalar { num, den }
        } else {
            let inv = lc.recip();
            Scalar {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: &Scalar) -> Scalar {
        self * &o.inv()
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! owned_binop {
    ($tr:ident, $f:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $f(self, o: Scalar) -> Scalar {
                (&self).$f(&o)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $f(self, o: &Scalar) -> Scalar {
                (&self).$f(o)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);
owned_binop!(Div, div);

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

// ---------------------------------------------------------------------------
// rendering

fn fmt_exponent(e: i64, denom: i64) -> String {
    let g = num_integer::gcd(e.abs(), denom);
    let (n, d) = (e / g, denom / g);
    if d == 1 {
        format!("{}", n)
    } else {
        format!("({}/{})", n, d)
    }
}

/// Renders a monomial with signed exponents, e.g. `q^-1 p^(1/2)`.
fn fmt_monomial(exps: &[i64; NVARS]) -> String {
    let mut parts = Vec::new();
    let names = ["q", "p", "t"];
    let denoms = [4, 4, 1];
    for v in 0..NVARS {
        let e = exps[v];
        if e == 0 {
            continue;
        }
        if e == denoms[v] {
            parts.push(names[v].to_string());
        } else {
            parts.push(format!("{}^{}", names[v], fmt_exponent(e, denoms[v])));
        }
    }
    parts.join(" ")
}

/// Terms of a Laurent polynomial in ascending exponent order.
fn fmt_laurent(terms: &[([i64; NVARS], BigRational)]) -> String {
    let mut out = String::new();
    for (i, (e, c)) in terms.iter().enumerate() {
        let neg = c.is_negative();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let a = c.abs();
        let mono = fmt_monomial(e);
        if mono.is_empty() {
            out.push_str(&a.to_string());
        } else if a.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&format!("{} {}", a, mono));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn laurent_terms(p: &Poly, shift: &Exps, scale: &BigRational) -> Vec<([i64; NVARS], BigRational)> {
    let mut v: Vec<([i64; NVARS], BigRational)> = p
        .terms()
        .iter()
        .map(|(e, c)| {
            let mut le = [0i64; NVARS];
            for i in 0..NVARS {
                le[i] = e[i] as i64 - shift[i] as i64;
            }
            (le, c * scale)
        })
        .collect();
    v.sort_by_key(|a| a.0);
    v
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_monomial() {
            let (e, c) = self.den.leading().unwrap();
            let terms = laurent_terms(&self.num, e, &c.recip());
            return write!(f, "{}", fmt_laurent(&terms));
        }
        let zero = [0u32; NVARS];
        let one = BigRational::one();
        let n = fmt_laurent(&laurent_terms(&self.num, &zero, &one));
        let d = fmt_laurent(&laurent_terms(&self.den, &zero, &one));
        let n = if self.num.terms().len() > 1 {
            format!("({})", n)
        } else {
            n
        };
        write!(f, "{}/({})", n, d)
    }
}

impl Scalar {
    /// True if the rendering is a single signed term (no top-level `+`/`-` between terms).
    pub fn is_single_term(&self) -> bool {
        self.num.terms().len() <= 1
    }
}

impl serde::Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplify_examples() {
        let q = Scalar::q();
        let one = Scalar::one();
        let a = &(&one - &(&q * &q)) / &(&one - &q);
        assert_eq!(a, &one + &q);
        let p = Scalar::p();
        let b = &(&p - &q) + &(&one - &p);
        assert_eq!(b, &one - &q);
        assert_eq!(Scalar::s().pow(4), q);
    }

    #[test]
    fn zero_denominator_is_error() {
        assert_eq!(
            Scalar::from_fraction(Poly::one(), Poly::zero()),
            Err(ScalarError::ZeroDenominator)
        );
    }

    #[test]
    fn evaluate_examples() {
        let v = (&Scalar::one() - &Scalar::q()).evaluate(0.5, 0.5, 0.0).unwrap();
        assert!((v.re - 0.5).abs() < 1e-15);
        let v = (-Scalar::s()).evaluate(0.0625, 0.5, 0.0).unwrap();
        assert!((v.re + 0.5).abs() < 1e-15);
        let h = &Scalar::q_pow(2) + &Scalar::q_pow(-2);
        let v = h.evaluate(0.25, 0.5, 0.0).unwrap();
        assert!((v.re - 2.5).abs() < 1e-14);
        let sing = Scalar::one() / (Scalar::one() - Scalar::q());
        assert_eq!(sing.evaluate(1.0, 0.5, 0.0), Err(ScalarError::Singular));
    }

    #[test]
    fn rendering() {
        assert_eq!((&Scalar::one() - &Scalar::q()).to_string(), "1 - q");
        assert_eq!(Scalar::s().to_string(), "q^(1/4)");
        assert_eq!(Scalar::q_pow(-4).to_string(), "q^-1");
        assert_eq!(Scalar::q_pow(5).to_string(), "q^(5/4)");
        assert_eq!(Scalar::from_ratio(-3, 2).to_string(), "-3/2");
        let x = Scalar::one() / (Scalar::one() + Scalar::q());
        assert_eq!(x.to_string(), "1/(1 + q)");
    }

    #[test]
    fn modular_evaluation_matches_rational() {
        let x = (Scalar::q() - Scalar::p()) / (Scalar::one() + Scalar::q_pow(2));
        let m = 1_000_000_007u64;
        let pt = [3u64, 5, 0];
        let v = x.eval_mod(&pt, m).unwrap();
        let rp = [
            BigRational::from_integer(3.into()),
            BigRational::from_integer(5.into()),
            BigRational::zero(),
        ];
        let exact = x.eval_rational(&rp).unwrap();
        let n = bigint_mod(exact.numer(), m);
        let d = bigint_mod(exact.denom(), m);
        assert_eq!(v, mulmod(n, powmod(d, m - 2, m), m));
    }
}
