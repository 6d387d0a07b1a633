//! Exact rationals and finite formal linear combinations.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Self {
        Rational(BigRational::new(numer.into(), denom.into()))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        Rational(self.0.recip())
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn pow(&self, exp: i32) -> Self {
        Rational(num_traits::Pow::pow(&self.0, exp))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Accepts `"3"`, `"-1/2"`, and finite decimals such as `"0.125"` (read exactly).
impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Some((n, d)) = t.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| Error::parse(0, format!("bad numerator in {t:?}")))?;
            let d: BigInt = d.trim().parse().map_err(|_| Error::parse(0, format!("bad denominator in {t:?}")))?;
            if d.is_zero() {
                return Err(Error::parse(0, "zero denominator"));
            }
            return Ok(Rational::new(n, d));
        }
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t.strip_prefix('+').unwrap_or(t)),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(Error::parse(0, format!("empty number {t:?}")));
        }
        for (i, c) in body.char_indices() {
            if !(c.is_ascii_digit() || c == '.') {
                return Err(Error::parse(i, format!("unexpected character {c:?} in number")));
            }
        }
        let digits = format!("{int_part}{frac_part}");
        let mut n: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().unwrap() };
        if neg {
            n = -n;
        }
        let d = num_traits::pow(BigInt::from(10), frac_part.len());
        Ok(Rational::new(n, d))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

/// Finite formal sum over a basis with exact rational coefficients.
///
/// Keys must already be canonical; zero coefficients are never stored, so
/// structural equality is coefficient-map equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LinComb<B: Ord> {
    terms: BTreeMap<B, Rational>,
}

impl<B: Ord> Default for LinComb<B> {
    fn default() -> Self {
        LinComb { terms: BTreeMap::new() }
    }
}

impl<B: Ord + Clone> LinComb<B> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(b: B) -> Self {
        Self::term(b, Rational::one())
    }

    pub fn term(b: B, c: Rational) -> Self {
        let mut out = Self::default();
        out.add_term(b, c);
        out
    }

    pub fn add_term(&mut self, b: B, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(b) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, b: &B) -> Rational {
        self.terms.get(b).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&B, &Rational)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (b, c) in &other.terms {
            out.add_term(b.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&Rational::from(-1)))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::default();
        }
        LinComb { terms: self.terms.iter().map(|(b, x)| (b.clone(), x * c)).collect() }
    }

    /// Bilinear extension of a basis-level product.
    pub fn mul<F>(&self, other: &Self, mut product: F) -> Self
    where
        F: FnMut(&B, &B) -> LinComb<B>,
    {
        let mut out = Self::default();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let coeff = ca * cb;
                for (k, ck) in product(a, b).terms {
                    out.add_term(k, &coeff * &ck);
                }
            }
        }
        out
    }

    /// Linear extension of a basis map into another combination type.
    pub fn map_linear<C: Ord + Clone, F>(&self, mut f: F) -> LinComb<C>
    where
        F: FnMut(&B) -> LinComb<C>,
    {
        let mut out = LinComb::default();
        for (b, c) in &self.terms {
            for (k, ck) in f(b).terms {
                out.add_term(k, c * &ck);
            }
        }
        out
    }

    /// Sum of all coefficients.
    pub fn mass(&self) -> Rational {
        self.terms.values().fold(Rational::zero(), |acc, c| acc + c.clone())
    }
}

impl<B: Ord + Clone> FromIterator<(B, Rational)> for LinComb<B> {
    fn from_iter<I: IntoIterator<Item = (B, Rational)>>(iter: I) -> Self {
        let mut out = Self::default();
        for (b, c) in iter {
            out.add_term(b, c);
        }
        out
    }
}

impl<B: Ord + fmt::Display> fmt::Display for LinComb<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (b, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if mag != Rational::one() {
                write!(f, "{mag}*")?;
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl<B: Ord + fmt::Debug> fmt::Debug for LinComb<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn rational_is_reduced() {
        let x = r(6, -4);
        assert_eq!(x.numer(), &BigInt::from(-3));
        assert_eq!(x.denom(), &BigInt::from(2));
        assert_eq!(r(0, 7), Rational::zero());
        assert_eq!(Rational::zero().denom(), &BigInt::from(1));
    }

    #[test]
    fn rational_parse() {
        assert_eq!("-1/2".parse::<Rational>().unwrap(), r(-1, 2));
        assert_eq!("0.125".parse::<Rational>().unwrap(), r(1, 8));
        assert_eq!("-3".parse::<Rational>().unwrap(), r(-3, 1));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("1.2a".parse::<Rational>().is_err());
    }

    #[test]
    fn add_cancels_and_sums() {
        let a = LinComb::term("t", r(1, 1));
        let b = LinComb::term("t", r(-1, 1));
        assert!(a.add(&b).is_zero());

        let a = LinComb::term("t", r(1, 2));
        let b = LinComb::term("t", r(1, 3));
        assert_eq!(a.add(&b), LinComb::term("t", r(5, 6)));

        let u = LinComb::term("u", r(2, 1));
        assert_eq!(LinComb::zero().add(&u), u);
    }

    #[test]
    fn scale_cases() {
        let a = LinComb::term("t", r(3, 1));
        assert!(a.scale(&Rational::zero()).is_zero());
        assert_eq!(a.scale(&Rational::one()), a);
        let b: LinComb<&str> = [("t", r(2, 1)), ("u", r(-1, 1))].into_iter().collect();
        let expect: LinComb<&str> = [("t", r(1, 1)), ("u", r(-1, 2))].into_iter().collect();
        assert_eq!(b.scale(&r(1, 2)), expect);
    }

    #[test]
    fn mul_cases() {
        let p = |a: &&str, b: &&str| match (*a, *b) {
            ("t", "u") => LinComb::basis("v"),
            ("t", "t") => LinComb::basis("t"),
            _ => LinComb::zero(),
        };
        assert_eq!(LinComb::basis("t").mul(&LinComb::basis("u"), p), LinComb::basis("v"));
        assert!(LinComb::zero().mul(&LinComb::basis("u"), p).is_zero());
        let a = LinComb::term("t", r(2, 1));
        let b = LinComb::term("t", r(3, 1));
        assert_eq!(a.mul(&b, p), LinComb::term("t", r(6, 1)));
    }

    fn arb_rat() -> impl Strategy<Value = Rational> {
        (-50i64..50, 1i64..20).prop_map(|(n, d)| r(n, d))
    }

    fn arb_comb() -> impl Strategy<Value = LinComb<u8>> {
        proptest::collection::vec((0u8..5, arb_rat()), 0..5).prop_map(|v| v.into_iter().collect())
    }

    // Commutative product on integer keys: k1*k2 -> key (k1+k2) mod 7.
    fn cyclic(a: &u8, b: &u8) -> LinComb<u8> {
        LinComb::basis((a + b) % 7)
    }

    proptest! {
        #[test]
        fn field_axioms(a in arb_rat(), b in arb_rat(), c in arb_rat()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            if !a.is_zero() {
                prop_assert_eq!(&a * &a.recip(), Rational::one());
            }
        }

        #[test]
        fn lincomb_add_comm_assoc(a in arb_comb(), b in arb_comb(), c in arb_comb()) {
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        }

        #[test]
        fn lincomb_mul_commutes(a in arb_comb(), b in arb_comb()) {
            prop_assert_eq!(a.mul(&b, cyclic), b.mul(&a, cyclic));
        }
    }
}
