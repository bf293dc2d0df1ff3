use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Rational64;
use num_traits::Zero;

/// A valuation: a rational number or +infinity (the valuation of zero).
///
/// Variant order makes every finite value compare below `Inf`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Val {
    Fin(Rational64),
    Inf,
}

impl Val {
    pub fn zero() -> Self {
        Val::Fin(Rational64::zero())
    }

    pub fn from_int(n: i64) -> Self {
        Val::Fin(Rational64::from_integer(n))
    }

    pub fn new(n: i64, d: i64) -> Self {
        Val::Fin(Rational64::new(n, d))
    }

    pub fn is_inf(&self) -> bool {
        matches!(self, Val::Inf)
    }

    pub fn finite(&self) -> Option<Rational64> {
        match self {
            Val::Fin(r) => Some(*r),
            Val::Inf => None,
        }
    }

    /// Panics on infinity; use where the caller has excluded zero.
    pub fn unwrap(&self) -> Rational64 {
        self.finite().expect("infinite valuation")
    }
}

impl From<Rational64> for Val {
    fn from(r: Rational64) -> Self {
        Val::Fin(r)
    }
}

impl Add for Val {
    type Output = Val;
    fn add(self, rhs: Val) -> Val {
        match (self, rhs) {
            (Val::Fin(a), Val::Fin(b)) => Val::Fin(a + b),
            _ => Val::Inf,
        }
    }
}

impl Sub<Rational64> for Val {
    type Output = Val;
    fn sub(self, rhs: Rational64) -> Val {
        match self {
            Val::Fin(a) => Val::Fin(a - rhs),
            Val::Inf => Val::Inf,
        }
    }
}

impl Mul<i64> for Val {
    type Output = Val;
    fn mul(self, rhs: i64) -> Val {
        match self {
            Val::Fin(a) => Val::Fin(a * rhs),
            Val::Inf if rhs == 0 => Val::zero(),
            Val::Inf => Val::Inf,
        }
    }
}

impl Neg for Val {
    type Output = Val;
    fn neg(self) -> Val {
        match self {
            Val::Fin(a) => Val::Fin(-a),
            Val::Inf => panic!("negating infinite valuation"),
        }
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Fin(r) => write!(f, "{}", r),
            Val::Inf => write!(f, "inf"),
        }
    }
}
