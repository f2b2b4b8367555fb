//! Exact arithmetic in `Q(√2)`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

/// `a + b√2` with rational `a`, `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Surd2 {
    pub a: BigRational,
    pub b: BigRational,
}

impl Surd2 {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        Self { a, b }
    }

    pub fn rational(a: BigRational) -> Self {
        Self::new(a, BigRational::zero())
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        a + b * std::f64::consts::SQRT_2
    }

    fn conjugate(&self) -> Self {
        Self::new(self.a.clone(), -self.b.clone())
    }

    /// `a² − 2b²`, the field norm.
    fn norm(&self) -> BigRational {
        &self.a * &self.a - BigRational::from_integer(BigInt::from(2)) * &self.b * &self.b
    }
}

impl Add for Surd2 {
    type Output = Surd2;
    fn add(self, o: Surd2) -> Surd2 {
        Surd2::new(self.a + o.a, self.b + o.b)
    }
}

impl Sub for Surd2 {
    type Output = Surd2;
    fn sub(self, o: Surd2) -> Surd2 {
        Surd2::new(self.a - o.a, self.b - o.b)
    }
}

impl Neg for Surd2 {
    type Output = Surd2;
    fn neg(self) -> Surd2 {
        Surd2::new(-self.a, -self.b)
    }
}

impl Mul for Surd2 {
    type Output = Surd2;
    fn mul(self, o: Surd2) -> Surd2 {
        let two = BigRational::from_integer(BigInt::from(2));
        Surd2::new(
            &self.a * &o.a + two * &self.b * &o.b,
            &self.a * &o.b + &self.b * &o.a,
        )
    }
}

impl Div for Surd2 {
    type Output = Surd2;
    /// Panics on division by zero, like rational division.
    fn div(self, o: Surd2) -> Surd2 {
        let n = o.norm();
        let num = self * o.conjugate();
        Surd2::new(num.a / &n, num.b / n)
    }
}

impl fmt::Display for Surd2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else if self.a.is_zero() {
            write!(f, "({})·√2", self.b)
        } else {
            write!(f, "{} + ({})·√2", self.a, self.b)
        }
    }
}
