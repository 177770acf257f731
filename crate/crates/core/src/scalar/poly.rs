//! Sparse multivariate polynomials over the rationals.
//!
//! Terms are kept sorted in descending lexicographic order of their exponent
//! vectors (variable 0 is the most significant), without zero coefficients.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Number of formal variables available to scalars.
pub const NVARS: usize = 3;

/// Exponent vector of a monomial.
pub type Exps = [u32; NVARS];

const ZERO_EXPS: Exps = [0; NVARS];

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    terms: Vec<(Exps, BigRational)>,
}

fn cmp_exps(a: &Exps, b: &Exps) -> Ordering {
    a.iter().cmp(b.iter())
}

fn exps_add(a: &Exps, b: &Exps) -> Exps {
    let mut r = *a;
    for i in 0..NVARS {
        r[i] += b[i];
    }
    r
}

fn exps_divides(a: &Exps, b: &Exps) -> bool {
    (0..NVARS).all(|i| a[i] <= b[i])
}

fn exps_sub(a: &Exps, b: &Exps) -> Exps {
    let mut r = *a;
    for i in 0..NVARS {
        r[i] -= b[i];
    }
    r
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Poly {
                terms: vec![(ZERO_EXPS, c)],
            }
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn monomial(exps: Exps, c: BigRational) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Poly {
                terms: vec![(exps, c)],
            }
        }
    }

    /// The single variable `var`.
    pub fn var(var: usize) -> Self {
        let mut e = ZERO_EXPS;
        e[var] = 1;
        Self::monomial(e, BigRational::one())
    }

    /// Builds a polynomial from arbitrary (possibly repeated, unsorted) terms.
    pub fn from_terms(mut raw: Vec<(Exps, BigRational)>) -> Self {
        raw.sort_by(|a, b| cmp_exps(&b.0, &a.0));
        let mut terms: Vec<(Exps, BigRational)> = Vec::with_capacity(raw.len());
        for (e, c) in raw {
            match terms.last_mut() {
                Some(last) if last.0 == e => last.1 += c,
                _ => terms.push((e, c)),
            }
        }
        terms.retain(|t| !t.1.is_zero());
        Poly { terms }
    }

    pub fn terms(&self) -> &[(Exps, BigRational)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == ZERO_EXPS && self.terms[0].1.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0 == ZERO_EXPS)
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn constant_value(&self) -> Option<BigRational> {
        if self.terms.is_empty() {
            Some(BigRational::zero())
        } else if self.is_constant() {
            Some(self.terms[0].1.clone())
        } else {
            None
        }
    }

    pub fn leading(&self) -> Option<&(Exps, BigRational)> {
        self.terms.first()
    }

    pub fn leading_coeff(&self) -> BigRational {
        self.terms
            .first()
            .map(|t| t.1.clone())
            .unwrap_or_else(BigRational::zero)
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(e, x)| (*e, x * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, exps: &Exps) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (exps_add(e, exps), c.clone()))
                .collect(),
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let (a, b) = (&self.terms[i], &other.terms[j]);
            match cmp_exps(&a.0, &b.0) {
                Ordering::Greater => {
                    out.push(a.clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push(b.clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = &a.1 + &b.1;
                    if !c.is_zero() {
                        out.push((a.0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&other.terms[j..]);
        Poly { terms: out }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if other.is_monomial() {
            let (e, c) = &other.terms[0];
            return self.mul_monomial(e).scale(c);
        }
        if self.is_monomial() {
            let (e, c) = &self.terms[0];
            return other.mul_monomial(e).scale(c);
        }
        let mut raw = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                raw.push((exps_add(ea, eb), ca * cb));
            }
        }
        Poly::from_terms(raw)
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exact division; `None` if `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if divisor.is_monomial() {
            let (de, dc) = &divisor.terms[0];
            let inv = dc.recip();
            let mut terms = Vec::with_capacity(self.terms.len());
            for (e, c) in &self.terms {
                if !exps_divides(de, e) {
                    return None;
                }
                terms.push((exps_sub(e, de), c * &inv));
            }
            return Some(Poly { terms });
        }
        let (lde, ldc) = divisor.terms[0].clone();
        let inv = ldc.recip();
        let mut rem = self.clone();
        let mut quot = Vec::new();
        while let Some((e, c)) = rem.terms.first().cloned() {
            if !exps_divides(&lde, &e) {
                return None;
            }
            let qe = exps_sub(&e, &lde);
            let qc = &c * &inv;
            rem = rem.sub(&divisor.mul_monomial(&qe).scale(&qc));
            quot.push((qe, qc));
        }
        Some(Poly::from_terms(quot))
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.iter().map(|t| t.0[var]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|t| t.0.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    fn uses_var(&self, var: usize) -> bool {
        self.terms.iter().any(|t| t.0[var] > 0)
    }

    fn min_exps(&self) -> Exps {
        let mut m = [u32::MAX; NVARS];
        for (e, _) in &self.terms {
            for i in 0..NVARS {
                m[i] = m[i].min(e[i]);
            }
        }
        if self.terms.is_empty() {
            ZERO_EXPS
        } else {
            m
        }
    }

    /// Divides every coefficient by the leading one.
    pub fn monic(&self) -> Poly {
        match self.terms.first() {
            None => Poly::zero(),
            Some((_, c)) if c.is_one() => self.clone(),
            Some((_, c)) => self.scale(&c.recip()),
        }
    }

    /// Coefficient of `var^k`, as a polynomial free of `var`.
    fn coeff_in(&self, var: usize, k: u32) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|t| t.0[var] == k)
                .map(|(e, c)| {
                    let mut e2 = *e;
                    e2[var] = 0;
                    (e2, c.clone())
                })
                .collect(),
        }
        .resorted()
    }

    fn resorted(mut self) -> Poly {
        self.terms.sort_by(|a, b| cmp_exps(&b.0, &a.0));
        self
    }

    fn coeffs_in(&self, var: usize) -> Vec<Poly> {
        let d = self.degree_in(var);
        (0..=d)
            .map(|k| self.coeff_in(var, k))
            .filter(|p| !p.is_zero())
            .collect()
    }

    /// Substitutes `var -> var^(1/g)`; every exponent of `var` must be divisible by `g`.
    fn deflate(&self, var: usize, g: u32) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut e2 = *e;
                    e2[var] /= g;
                    (e2, c.clone())
                })
                .collect(),
        }
    }

    fn inflate(&self, var: usize, g: u32) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut e2 = *e;
                    e2[var] *= g;
                    (e2, c.clone())
                })
                .collect(),
        }
    }

    /// Evaluates at a point (one value per variable).
    pub fn eval_f64(&self, point: &[f64; NVARS]) -> f64 {
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let mut m = ratio_to_f64(c);
            for i in 0..NVARS {
                if e[i] > 0 {
                    m *= point[i].powi(e[i] as i32);
                }
            }
            acc += m;
        }
        acc
    }

    /// Evaluates at an exact rational point.
    pub fn eval_rational(&self, point: &[BigRational; NVARS]) -> BigRational {
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut m = c.clone();
            for i in 0..NVARS {
                for _ in 0..e[i] {
                    m *= &point[i];
                }
            }
            acc += m;
        }
        acc
    }

    /// Least common multiple of the coefficient denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.terms
            .iter()
            .fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()))
    }

    /// Lexicographically first term has negative coefficient.
    pub fn leading_is_negative(&self) -> bool {
        self.terms.first().map(|t| t.1.is_negative()).unwrap_or(false)
    }
}

pub(crate) fn ratio_to_f64(c: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    c.to_f64().unwrap_or_else(|| {
        let n = c.numer().to_f64().unwrap_or(f64::NAN);
        let d = c.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Monic greatest common divisor over the rationals (zero only if both inputs are).
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    // common monomial factor
    let ma = a.min_exps();
    let mb = b.min_exps();
    let mut m = ZERO_EXPS;
    for i in 0..NVARS {
        m[i] = ma[i].min(mb[i]);
    }
    let mono = Poly::monomial(m, BigRational::one());
    if a.is_monomial() || b.is_monomial() {
        return mono;
    }
    let a1 = a.div_exact(&Poly::monomial(ma, BigRational::one())).unwrap();
    let b1 = b.div_exact(&Poly::monomial(mb, BigRational::one())).unwrap();
    gcd_no_monomial(&a1, &b1).mul(&mono)
}

fn gcd_no_monomial(a: &Poly, b: &Poly) -> Poly {
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    // deflate variables whose exponents share a common factor
    for var in 0..NVARS {
        let g = a
            .terms
            .iter()
            .chain(b.terms.iter())
            .fold(0u32, |acc, t| acc.gcd(&t.0[var]));
        if g > 1 {
            let r = gcd_no_monomial(&a.deflate(var, g), &b.deflate(var, g));
            return r.inflate(var, g);
        }
    }
    let var = match (0..NVARS).find(|&v| a.uses_var(v) || b.uses_var(v)) {
        Some(v) => v,
        None => return Poly::one(),
    };
    if !a.uses_var(var) {
        return gcd_many(b.coeffs_in(var).iter().chain(std::iter::once(a)));
    }
    if !b.uses_var(var) {
        return gcd_many(a.coeffs_in(var).iter().chain(std::iter::once(b)));
    }
    let ca = gcd_many(a.coeffs_in(var).iter());
    let cb = gcd_many(b.coeffs_in(var).iter());
    let content = gcd(&ca, &cb);
    let mut pa = a.div_exact(&ca).unwrap();
    let mut pb = b.div_exact(&cb).unwrap();
    if pa.degree_in(var) < pb.degree_in(var) {
        std::mem::swap(&mut pa, &mut pb);
    }
    let univariate = (0..NVARS).all(|v| v == var || !(pa.uses_var(v) || pb.uses_var(v)));
    let g = if univariate {
        euclid_univariate(pa, pb, var)
    } else {
        primitive_prs(pa, pb, var)
    };
    g.mul(&content).monic()
}

fn gcd_many<'a>(polys: impl Iterator<Item = &'a Poly>) -> Poly {
    let mut acc = Poly::zero();
    for p in polys {
        acc = gcd(&acc, p);
        if acc.is_one() {
            break;
        }
    }
    acc
}

fn lc_in(p: &Poly, var: usize) -> Poly {
    p.coeff_in(var, p.degree_in(var))
}

fn var_pow(var: usize, k: u32) -> Exps {
    let mut e = ZERO_EXPS;
    e[var] = k;
    e
}

fn euclid_univariate(mut a: Poly, mut b: Poly, var: usize) -> Poly {
    while !b.is_zero() {
        let db = b.degree_in(var);
        let lb = b.leading_coeff().recip();
        let mut r = a;
        while !r.is_zero() && r.degree_in(var) >= db {
            let dr = r.degree_in(var);
            let c = r.leading_coeff() * &lb;
            r = r.sub(&b.mul_monomial(&var_pow(var, dr - db)).scale(&c));
        }
        a = b;
        b = r.monic();
    }
    a.monic()
}

fn pseudo_rem(a: &Poly, b: &Poly, var: usize) -> Poly {
    let db = b.degree_in(var);
    let lb = lc_in(b, var);
    let mut r = a.clone();
    while !r.is_zero() && r.degree_in(var) >= db {
        let dr = r.degree_in(var);
        let lr = lc_in(&r, var);
        r = r
            .mul(&lb)
            .sub(&b.mul(&lr).mul_monomial(&var_pow(var, dr - db)));
    }
    r
}

fn primitive_part(p: &Poly, var: usize) -> Poly {
    let c = gcd_many(p.coeffs_in(var).iter());
    p.div_exact(&c).unwrap()
}

fn primitive_prs(mut a: Poly, mut b: Poly, var: usize) -> Poly {
    while !b.is_zero() && b.degree_in(var) > 0 {
        let r = pseudo_rem(&a, &b, var);
        a = b;
        b = if r.is_zero() {
            r
        } else {
            primitive_part(&r, var)
        };
    }
    if b.is_zero() {
        primitive_part(&a, var)
    } else {
        // b is free of var: the primitive parts are coprime in var
        Poly::one()
    }
}

impl fmt::Display for Poly {
    /// Raw rendering in `s`, `r`, `t` (ascending order). Scalar rendering uses the q/p convention.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        const NAMES: [&str; NVARS] = ["s", "r", "t"];
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let a = c.abs();
            let is_const = *e == ZERO_EXPS;
            if !a.is_one() || is_const {
                write!(f, "{}", a)?;
                if !is_const {
                    write!(f, " ")?;
                }
            }
            let mut first = true;
            for v in 0..NVARS {
                if e[v] > 0 {
                    if !first {
                        write!(f, " ")?;
                    }
                    first = false;
                    if e[v] == 1 {
                        write!(f, "{}", NAMES[v])?;
                    } else {
                        write!(f, "{}^{}", NAMES[v], e[v])?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s() -> Poly {
        Poly::var(0)
    }
    fn r() -> Poly {
        Poly::var(1)
    }

    #[test]
    fn gcd_univariate() {
        // (s-1)(s+2) and (s-1)(s-3)
        let a = s().sub(&Poly::one()).mul(&s().add(&Poly::from_int(2)));
        let b = s().sub(&Poly::one()).mul(&s().sub(&Poly::from_int(3)));
        assert_eq!(gcd(&a, &b), s().sub(&Poly::one()));
    }

    #[test]
    fn gcd_bivariate() {
        let common = s().pow(4).sub(&r().pow(4));
        let a = common.mul(&s().add(&r()).add(&Poly::one()));
        let b = common.mul(&s().mul(&r()).sub(&Poly::from_int(2)));
        assert_eq!(gcd(&a, &b), common.monic());
    }

    #[test]
    fn gcd_with_deflation() {
        let q = s().pow(4);
        let a = Poly::one().sub(&q.pow(2));
        let b = Poly::one().sub(&q);
        assert_eq!(gcd(&a, &b), q.sub(&Poly::one()));
    }

    #[test]
    fn exact_division() {
        let a = s().add(&r()).pow(3);
        let b = s().add(&r());
        assert_eq!(a.div_exact(&b).unwrap(), b.pow(2));
        assert!(a.div_exact(&s().sub(&r())).is_none());
    }
}
