//! Exact rational arithmetic used for every distance value.
//!
//! A thin wrapper around [`num_rational::Ratio<i64>`] fixing canonical form
//! (positive denominator, reduced fraction) and the textual format `p/q`
//! (or a bare integer) used by the file formats and the CLI.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Signed, Zero};

/// An exact rational number in canonical form.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Rat(Ratio<i64>);

impl Rat {
    /// `p/q` in lowest terms. Panics if `q == 0`.
    pub fn new(p: i64, q: i64) -> Self {
        Rat(Ratio::new(p, q))
    }

    /// The integer `n` as a rational.
    pub fn int(n: i64) -> Self {
        Rat(Ratio::from_integer(n))
    }

    pub fn zero() -> Self {
        Rat(Ratio::zero())
    }

    pub fn one() -> Self {
        Rat::int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn abs(&self) -> Self {
        Rat(self.0.abs())
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    /// Reciprocal. Panics on zero.
    pub fn recip(&self) -> Self {
        Rat(self.0.recip())
    }

    /// Largest integer `n ≤ self`.
    pub fn floor(&self) -> i64 {
        self.0.floor().to_integer()
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

/// Error parsing a rational from text.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal `{0}` (expected `p` or `p/q` with q > 0)")]
pub struct ParseRatError(pub String);

impl FromStr for Rat {
    type Err = ParseRatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ParseRatError(s.to_string());
        match s.split_once('/') {
            None => s.trim().parse::<i64>().map(Rat::int).map_err(|_| bad()),
            Some((p, q)) => {
                let p: i64 = p.trim().parse().map_err(|_| bad())?;
                let q: i64 = q.trim().parse().map_err(|_| bad())?;
                if q <= 0 {
                    return Err(bad());
                }
                Ok(Rat::new(p, q))
            }
        }
    }
}

impl Add for Rat {
    type Output = Rat;
    fn add(self, rhs: Rat) -> Rat {
        Rat(self.0 + rhs.0)
    }
}

impl AddAssign for Rat {
    fn add_assign(&mut self, rhs: Rat) {
        self.0 += rhs.0;
    }
}

impl Sub for Rat {
    type Output = Rat;
    fn sub(self, rhs: Rat) -> Rat {
        Rat(self.0 - rhs.0)
    }
}

impl Mul for Rat {
    type Output = Rat;
    fn mul(self, rhs: Rat) -> Rat {
        Rat(self.0 * rhs.0)
    }
}

impl Div for Rat {
    type Output = Rat;
    fn div(self, rhs: Rat) -> Rat {
        Rat(self.0 / rhs.0)
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), Add::add)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form() {
        assert_eq!(Rat::new(2, 4), Rat::new(1, 2));
        assert_eq!(Rat::new(-2, 4).to_string(), "-1/2");
        assert_eq!(Rat::int(3).to_string(), "3");
    }

    #[test]
    fn parsing() {
        assert_eq!("3/4".parse::<Rat>().unwrap(), Rat::new(3, 4));
        assert_eq!("7".parse::<Rat>().unwrap(), Rat::int(7));
        assert!("3/0".parse::<Rat>().is_err());
        assert!("x".parse::<Rat>().is_err());
    }

    #[test]
    fn arithmetic() {
        let a = Rat::new(3, 4);
        let b = Rat::new(1, 2);
        assert_eq!(a + b, Rat::new(5, 4));
        assert_eq!(a - b, Rat::new(1, 4));
        assert_eq!(a * b, Rat::new(3, 8));
        assert_eq!(a / b, Rat::new(3, 2));
    }
}
