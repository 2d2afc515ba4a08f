//! Exact Gaussian rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

pub type Rational = BigRational;

/// Build a rational from a numerator and a nonzero denominator.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parse `"p"`, `"-p"` or `"p/q"`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Rational with a machine-word fast path.  `S(n, d)` is reduced with
/// `d > 0`; values that fit are always stored as `S`, so the derived
/// equality and hashing are value-based.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
enum Q {
    S(i64, i64),
    B(BigRational),
}

impl Q {
    const ZERO: Q = Q::S(0, 1);
    const ONE: Q = Q::S(1, 1);

    fn from_i128(n: i128, d: i128) -> Q {
        debug_assert!(d != 0);
        let g = n.gcd(&d);
        let (mut n, mut d) = (n / g, d / g);
        if d < 0 {
            n = -n;
            d = -d;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(a), Ok(b)) => Q::S(a, b),
            _ => Q::B(BigRational::new(BigInt::from(n), BigInt::from(d))),
        }
    }
    fn from_big(r: BigRational) -> Q {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(a), Some(b)) => Q::S(a, b),
            _ => Q::B(r),
        }
    }
    fn to_big(&self) -> BigRational {
        match self {
            Q::S(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Q::B(r) => r.clone(),
        }
    }
    fn is_zero(&self) -> bool {
        matches!(self, Q::S(0, _))
    }
    fn is_one(&self) -> bool {
        matches!(self, Q::S(1, 1))
    }
    fn is_negative(&self) -> bool {
        match self {
            Q::S(n, _) => *n < 0,
            Q::B(r) => r.is_negative(),
        }
    }
    fn add(&self, o: &Q) -> Q {
        match (self, o) {
            (Q::S(0, _), _) => o.clone(),
            (_, Q::S(0, _)) => self.clone(),
            (Q::S(a, b), Q::S(c, d)) => {
                if b == d {
                    Q::from_i128(*a as i128 + *c as i128, *b as i128)
                } else {
                    match (*a as i128 * *d as i128).checked_add(*c as i128 * *b as i128) {
                        Some(n) => Q::from_i128(n, *b as i128 * *d as i128),
                        None => Q::from_big(self.to_big() + o.to_big()),
                    }
                }
            }
            _ => Q::from_big(self.to_big() + o.to_big()),
        }
    }
    fn neg(&self) -> Q {
        match self {
            Q::S(n, d) => Q::from_i128(-(*n as i128), *d as i128),
            Q::B(r) => Q::from_big(-r.clone()),
        }
    }
    fn sub(&self, o: &Q) -> Q {
        self.add(&o.neg())
    }
    fn mul(&self, o: &Q) -> Q {
        match (self, o) {
            (Q::S(0, _), _) | (_, Q::S(0, _)) => Q::ZERO,
            (Q::S(1, 1), _) => o.clone(),
            (_, Q::S(1, 1)) => self.clone(),
            (Q::S(a, b), Q::S(c, d)) => Q::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128),
            _ => Q::from_big(self.to_big() * o.to_big()),
        }
    }
    fn div(&self, o: &Q) -> Q {
        match (self, o) {
            (Q::S(a, b), Q::S(c, d)) => Q::from_i128(*a as i128 * *d as i128, *b as i128 * *c as i128),
            _ => Q::from_big(self.to_big() / o.to_big()),
        }
    }
}

impl Ord for Q {
    fn cmp(&self, o: &Q) -> Ordering {
        match (self, o) {
            (Q::S(a, b), Q::S(c, d)) => (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128)),
            _ => self.to_big().cmp(&o.to_big()),
        }
    }
}
impl PartialOrd for Q {
    fn partial_cmp(&self, o: &Q) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// A complex number with rational real and imaginary parts.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Scalar {
    re: Q,
    im: Q,
}

impl Scalar {
    pub fn new(re: Rational, im: Rational) -> Self {
        Scalar { re: Q::from_big(re), im: Q::from_big(im) }
    }
    pub fn zero() -> Self {
        Scalar { re: Q::ZERO, im: Q::ZERO }
    }
    pub fn one() -> Self {
        Scalar { re: Q::ONE, im: Q::ZERO }
    }
    /// The imaginary unit.
    pub fn i() -> Self {
        Scalar { re: Q::ZERO, im: Q::ONE }
    }
    pub fn from_int(n: i64) -> Self {
        Scalar { re: Q::S(n, 1), im: Q::ZERO }
    }
    pub fn from_rational(r: Rational) -> Self {
        Scalar { re: Q::from_big(r), im: Q::ZERO }
    }
    pub fn ratio(n: i64, d: i64) -> Self {
        Scalar { re: Q::from_i128(n as i128, d as i128), im: Q::ZERO }
    }
    pub fn complex(re: Rational, im: Rational) -> Self {
        Scalar::new(re, im)
    }
    /// Real part as a rational.
    pub fn real(&self) -> Rational {
        self.re.to_big()
    }
    /// Imaginary part as a rational.
    pub fn imag(&self) -> Rational {
        self.im.to_big()
    }
    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }
    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }
    /// Real and negative.
    pub fn is_negative_real(&self) -> bool {
        self.im.is_zero() && self.re.is_negative()
    }
    pub fn conj(&self) -> Self {
        Scalar { re: self.re.clone(), im: self.im.neg() }
    }
    pub fn norm_sq(&self) -> Rational {
        self.re.mul(&self.re).add(&self.im.mul(&self.im)).to_big()
    }
    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.im.is_zero() {
            return Some(Scalar { re: Q::ONE.div(&self.re), im: Q::ZERO });
        }
        let n = self.re.mul(&self.re).add(&self.im.mul(&self.im));
        Some(Scalar { re: self.re.div(&n), im: self.im.neg().div(&n) })
    }
    pub fn re_part(&self) -> Self {
        Scalar { re: self.re.clone(), im: Q::ZERO }
    }
    pub fn im_part(&self) -> Self {
        Scalar { re: self.im.clone(), im: Q::ZERO }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = (self.real(), self.imag());
        if im.is_zero() {
            write!(f, "{}", format_rational(&re))
        } else if re.is_zero() {
            if im.is_one() {
                write!(f, "i")
            } else if (-&im).is_one() {
                write!(f, "-i")
            } else {
                write!(f, "{}*i", format_rational(&im))
            }
        } else {
            let sign = if im.is_negative() { "-" } else { "+" };
            let abs = im.abs();
            if abs.is_one() {
                write!(f, "({}{}i)", format_rational(&re), sign)
            } else {
                write!(f, "({}{}{}*i)", format_rational(&re), sign, format_rational(&abs))
            }
        }
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        Scalar { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }
}
impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        Scalar { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }
}
impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        if self.im.is_zero() && o.im.is_zero() {
            return Scalar { re: self.re.mul(&o.re), im: Q::ZERO };
        }
        Scalar {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }
}
impl Div for &Scalar {
    type Output = Scalar;
    fn div(self, o: &Scalar) -> Scalar {
        self * &o.inv().expect("division by zero scalar")
    }
}
impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { re: self.re.neg(), im: self.im.neg() }
    }
}
impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}
impl Add for Scalar {
    type Output = Scalar;
    fn add(self, o: Scalar) -> Scalar {
        &self + &o
    }
}
impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, o: Scalar) -> Scalar {
        &self - &o
    }
}
impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, o: Scalar) -> Scalar {
        &self * &o
    }
}
impl Div for Scalar {
    type Output = Scalar;
    fn div(self, o: Scalar) -> Scalar {
        &self / &o
    }
}
impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, o: &Scalar) {
        self.re = self.re.add(&o.re);
        if !o.im.is_zero() {
            self.im = self.im.add(&o.im);
        }
    }
}
impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, o: &Scalar) {
        self.re = self.re.sub(&o.re);
        if !o.im.is_zero() {
            self.im = self.im.sub(&o.im);
        }
    }
}
impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, o: &Scalar) {
        *self = &*self * o;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_conjugate() {
        let z = Scalar::new(rat(1, 2), rat(-3, 4));
        assert_eq!(&z * &z.inv().unwrap(), Scalar::one());
        assert_eq!(z.conj().conj(), z);
        assert!((&z * &z.conj()).is_real());
    }

    #[test]
    fn word_overflow_promotes_and_demotes() {
        let big = Scalar::from_int(i64::MAX);
        let sq = &big * &big;
        assert_eq!(sq.real(), Rational::from_integer(BigInt::from(i64::MAX) * BigInt::from(i64::MAX)));
        let back = &sq / &big;
        assert_eq!(back, big);
        let m = Scalar::from_int(i64::MIN);
        assert_eq!((-&m).real(), -Rational::from_integer(BigInt::from(i64::MIN)));
        assert_eq!(&(&m + &big) + &Scalar::one(), Scalar::zero());
    }

    #[test]
    fn rational_text_round_trip() {
        for s in ["3", "-7/2", "0", "5/10"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
        }
        assert!(parse_rational("1/0").is_none());
        assert_eq!(Scalar::i().to_string(), "i");
        assert_eq!(Scalar::new(rat(1, 1), rat(-2, 1)).to_string(), "(1-2*i)");
    }
}
