//! Grassmann parity (Z_2 grading).

use std::fmt;
use std::ops::Add;

/// Grassmann parity of a generator, monomial or operator.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    /// Koszul sign picked up when two factors of these parities are swapped.
    pub fn swap_sign(a: Parity, b: Parity) -> i8 {
        if a.is_odd() && b.is_odd() {
            -1
        } else {
            1
        }
    }

    pub fn from_odd_count(k: usize) -> Parity {
        if k % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

impl Add for Parity {
    type Output = Parity;

    fn add(self, rhs: Parity) -> Parity {
        if self == rhs {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parity::Even => write!(f, "even"),
            Parity::Odd => write!(f, "odd"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn addition_is_mod_two() {
        assert_eq!(Parity::Even + Parity::Even, Parity::Even);
        assert_eq!(Parity::Even + Parity::Odd, Parity::Odd);
        assert_eq!(Parity::Odd + Parity::Odd, Parity::Even);
    }

    #[test]
    fn swap_sign_only_for_odd_pairs() {
        assert_eq!(Parity::swap_sign(Parity::Odd, Parity::Odd), -1);
        assert_eq!(Parity::swap_sign(Parity::Odd, Parity::Even), 1);
        assert_eq!(Parity::swap_sign(Parity::Even, Parity::Even), 1);
    }
}
