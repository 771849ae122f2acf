//! Lexicographic costs.
//!
//! A cost is the pair (unreachable ordered pairs, amount). Any loss of
//! connectivity outweighs every finite amount, so the pair is compared
//! lexicographically and never collapsed into one number.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Neg, Sub};

use num::{BigInt, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::rational::{self, Rational};

/// Integer usage cost of one vertex or a whole graph.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Usage {
    pub unreachable: u64,
    pub finite: u64,
}

impl Usage {
    pub fn cost(self) -> Cost {
        Cost {
            unreachable: self.unreachable as i64,
            amount: Rational::from_integer(BigInt::from(self.finite)),
        }
    }

    pub fn is_finite(self) -> bool {
        self.unreachable == 0
    }
}

impl Add for Usage {
    type Output = Usage;
    fn add(self, rhs: Usage) -> Usage {
        Usage {
            unreachable: self.unreachable + rhs.unreachable,
            finite: self.finite + rhs.finite,
        }
    }
}

impl Sum for Usage {
    fn sum<I: Iterator<Item = Usage>>(iter: I) -> Usage {
        iter.fold(Usage::default(), Add::add)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cost {
    pub unreachable: i64,
    pub amount: Rational,
}

impl Cost {
    pub fn zero() -> Self {
        Cost::default()
    }

    pub fn finite(amount: Rational) -> Self {
        Cost {
            unreachable: 0,
            amount,
        }
    }

    pub fn from_parts(unreachable: i64, amount: i64) -> Self {
        Cost {
            unreachable,
            amount: rational::int(amount),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.unreachable == 0
    }

    pub fn is_positive(&self) -> bool {
        *self > Cost::zero()
    }

    pub fn is_zero(&self) -> bool {
        self.unreachable == 0 && self.amount.is_zero()
    }

    /// `self > amount`, where a positive unreachable count beats any finite amount.
    pub fn exceeds(&self, amount: &Rational) -> bool {
        self.unreachable > 0 || (self.unreachable == 0 && self.amount > *amount)
    }

    /// `self < amount` with the same lexicographic convention.
    pub fn below(&self, amount: &Rational) -> bool {
        self.unreachable < 0 || (self.unreachable == 0 && self.amount < *amount)
    }
}

impl From<Rational> for Cost {
    fn from(amount: Rational) -> Self {
        Cost::finite(amount)
    }
}

impl Add for Cost {
    type Output = Cost;
    fn add(self, rhs: Cost) -> Cost {
        Cost {
            unreachable: self.unreachable + rhs.unreachable,
            amount: self.amount + rhs.amount,
        }
    }
}

impl<'a> Add<&'a Cost> for Cost {
    type Output = Cost;
    fn add(self, rhs: &'a Cost) -> Cost {
        Cost {
            unreachable: self.unreachable + rhs.unreachable,
            amount: self.amount + &rhs.amount,
        }
    }
}

impl AddAssign<&Cost> for Cost {
    fn add_assign(&mut self, rhs: &Cost) {
        self.unreachable += rhs.unreachable;
        self.amount += &rhs.amount;
    }
}

impl Sub for Cost {
    type Output = Cost;
    fn sub(self, rhs: Cost) -> Cost {
        Cost {
            unreachable: self.unreachable - rhs.unreachable,
            amount: self.amount - rhs.amount,
        }
    }
}

impl<'a> Sub<&'a Cost> for &'a Cost {
    type Output = Cost;
    fn sub(self, rhs: &'a Cost) -> Cost {
        Cost {
            unreachable: self.unreachable - rhs.unreachable,
            amount: &self.amount - &rhs.amount,
        }
    }
}

impl Neg for Cost {
    type Output = Cost;
    fn neg(self) -> Cost {
        Cost {
            unreachable: -self.unreachable,
            amount: -self.amount,
        }
    }
}

impl Sum for Cost {
    fn sum<I: Iterator<Item = Cost>>(iter: I) -> Cost {
        iter.fold(Cost::zero(), Add::add)
    }
}

impl<'a> Sum<&'a Cost> for Cost {
    fn sum<I: Iterator<Item = &'a Cost>>(iter: I) -> Cost {
        iter.fold(Cost::zero(), |acc, c| acc + c)
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.unreachable == 0 {
            write!(f, "{}", rational::format(&self.amount))
        } else if self.amount.is_zero() {
            write!(f, "{}*inf", self.unreachable)
        } else {
            let sign = if self.amount.is_negative() { "-" } else { "+" };
            write!(
                f,
                "{}*inf{}{}",
                self.unreachable,
                sign,
                rational::format(&self.amount.abs())
            )
        }
    }
}

impl Serialize for Cost {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}
