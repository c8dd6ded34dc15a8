//! Exact real exponents of the form `q + s·√m`.
//!
//! With rational `λ`, `c` and spectrum, every indicial root is
//! `-1/2 ± √D` with `D` rational, so integer shifts and root coincidences
//! can be decided without any floating-point tolerance.

use std::cmp::Ordering;
use std::fmt;

use num::{BigRational, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, exact_sqrt};

/// `base + sign(surd)·√|surd|`, with `surd == 0` whenever the value is rational.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Exponent {
    base: BigRational,
    surd: BigRational,
}

fn sign_of(q: &BigRational) -> i8 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

fn to_ordering(s: i8) -> Ordering {
    s.cmp(&0)
}

/// Sign of `r + q·√m` for rational `r`, `q` and `m ≥ 0`.
fn sign_linear_surd(r: &BigRational, q: &BigRational, m: &BigRational) -> i8 {
    let sr = sign_of(r);
    let sq = if m.is_zero() { 0 } else { sign_of(q) };
    if sq == 0 {
        return sr;
    }
    if sr == 0 || sr == sq {
        return sq;
    }
    match (r * r).cmp(&(q * q * m)) {
        Ordering::Greater => sr,
        Ordering::Less => sq,
        Ordering::Equal => 0,
    }
}

impl Exponent {
    pub fn rational(q: BigRational) -> Self {
        Self {
            base: q,
            surd: BigRational::zero(),
        }
    }

    pub fn integer(v: i64) -> Self {
        Self::rational(rational::int(v))
    }

    /// `base + sign·√radicand` for `radicand ≥ 0`.
    pub fn with_root(base: BigRational, sign: i8, radicand: BigRational) -> Result<Self> {
        if radicand.is_negative() {
            return Err(Error::InvalidParameter(format!(
                "negative radicand {}",
                rational::display(&radicand)
            )));
        }
        if sign == 0 || radicand.is_zero() {
            return Ok(Self::rational(base));
        }
        if let Some(root) = exact_sqrt(&radicand) {
            let base = if sign > 0 { base + root } else { base - root };
            return Ok(Self::rational(base));
        }
        let surd = if sign > 0 { radicand } else { -radicand };
        Ok(Self { base, surd })
    }

    pub fn is_rational(&self) -> bool {
        self.surd.is_zero()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.is_rational().then_some(&self.base)
    }

    pub fn base(&self) -> &BigRational {
        &self.base
    }

    pub fn to_f64(&self) -> f64 {
        let b = rational::to_f64(&self.base);
        if self.is_rational() {
            return b;
        }
        let s = rational::to_f64(&self.surd.abs()).sqrt();
        if self.surd.is_positive() {
            b + s
        } else {
            b - s
        }
    }

    pub fn shifted(&self, by: i64) -> Self {
        Self {
            base: &self.base + rational::int(by),
            surd: self.surd.clone(),
        }
    }

    fn radical_sign(&self) -> i8 {
        sign_of(&self.surd)
    }

    fn radicand(&self) -> BigRational {
        self.surd.abs()
    }

    /// Exact comparison against a rational.
    pub fn cmp_rational(&self, q: &BigRational) -> Ordering {
        self.cmp(&Self::rational(q.clone()))
    }

    /// If `self - other` is an integer, return it.
    pub fn integer_offset(&self, other: &Exponent) -> Option<i64> {
        if self.surd != other.surd {
            return None;
        }
        let d = &self.base - &other.base;
        if d.is_integer() {
            num::ToPrimitive::to_i64(d.numer())
        } else {
            None
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let Some(pos) = t.find("sqrt(") else {
            return Ok(Self::rational(rational::parse(&t)?));
        };
        let err = || Error::Parse(format!("not an exponent: {s:?}"));
        let inner = t[pos + 5..].strip_suffix(')').ok_or_else(err)?;
        let radicand = rational::parse(inner)?;
        let head = &t[..pos];
        let (base_str, sign) = if let Some(b) = head.strip_suffix('+') {
            (b, 1)
        } else if let Some(b) = head.strip_suffix('-') {
            (b, -1)
        } else if head.is_empty() {
            ("0", 1)
        } else {
            return Err(err());
        };
        let base = if base_str.is_empty() {
            BigRational::zero()
        } else {
            rational::parse(base_str)?
        };
        Self::with_root(base, sign, radicand)
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        let r = &self.base - &other.base;
        let (sa, ma) = (self.radical_sign(), self.radicand());
        let (sb, mb) = (other.radical_sign(), other.radicand());
        if ma == mb || sb == 0 {
            // Same radical (or none on the right): r + (sa·√m − sb·√m).
            let q = BigRational::from_integer((sa - if ma == mb { sb } else { 0 }).into());
            return to_ordering(sign_linear_surd(&r, &q, &ma));
        }
        if sa == 0 {
            // r − sb·√mb
            let q = BigRational::from_integer((-sb).into());
            return to_ordering(sign_linear_surd(&r, &q, &mb));
        }
        // P = r + sa√ma versus Q = sb√mb.
        let sp = sign_linear_surd(&r, &BigRational::from_integer(sa.into()), &ma);
        if sp != sb {
            return to_ordering((sp - sb).signum());
        }
        // Same sign: compare squares, P² − Q² = r² + ma − mb + 2·r·sa·√ma.
        let lin = &r * &r + &ma - &mb;
        let coeff = &r * BigRational::from_integer((2 * sa).into());
        let s = sign_linear_surd(&lin, &coeff, &ma);
        to_ordering(if sp > 0 { s } else { -s })
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", rational::display(&self.base));
        }
        let op = if self.surd.is_positive() { '+' } else { '-' };
        let m = rational::display(&self.radicand());
        if self.base.is_zero() {
            if op == '+' {
                write!(f, "sqrt({m})")
            } else {
                write!(f, "-sqrt({m})")
            }
        } else {
            write!(f, "{}{op}sqrt({m})", rational::display(&self.base))
        }
    }
}

impl From<i64> for Exponent {
    fn from(v: i64) -> Self {
        Self::integer(v)
    }
}

impl Exponent {
    pub fn one() -> Self {
        Self::rational(BigRational::one())
    }
}
