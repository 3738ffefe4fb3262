//! Four-valued qualitative sign algebra.

use std::fmt;
use std::ops::{Add, Mul, Neg};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Qualitative sign of an influence or synergy.
///
/// `Zero` is compatible with either weak direction: `Positive + Zero` is
/// `Positive`, and `Positive + Negative` cannot be resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Positive,
    Negative,
    Zero,
    Ambiguous,
}

impl Sign {
    /// Sign of a scalar with `|value| <= eps` treated as zero.
    pub fn of(value: f64, eps: f64) -> Sign {
        if value.is_nan() {
            Sign::Ambiguous
        } else if value > eps {
            Sign::Positive
        } else if value < -eps {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    pub fn is_definite(self) -> bool {
        self != Sign::Ambiguous
    }

    /// True when a value of sign `self` satisfies the weak claim `claim`.
    pub fn satisfies(self, claim: Sign) -> bool {
        match claim {
            Sign::Ambiguous => true,
            Sign::Zero => self == Sign::Zero,
            Sign::Positive => matches!(self, Sign::Positive | Sign::Zero),
            Sign::Negative => matches!(self, Sign::Negative | Sign::Zero),
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Positive => '+',
            Sign::Negative => '-',
            Sign::Zero => '0',
            Sign::Ambiguous => '?',
        }
    }

    /// Combine observations of weak inequality directions: the strongest
    /// sign consistent with all of them.
    pub fn join<I: IntoIterator<Item = Sign>>(signs: I) -> Sign {
        signs.into_iter().fold(Sign::Zero, |acc, s| acc + s)
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
            s => s,
        }
    }
}

/// Sign of a sum.
impl Add for Sign {
    type Output = Sign;

    fn add(self, rhs: Sign) -> Sign {
        match (self, rhs) {
            (Sign::Ambiguous, _) | (_, Sign::Ambiguous) => Sign::Ambiguous,
            (Sign::Zero, s) | (s, Sign::Zero) => s,
            (a, b) if a == b => a,
            _ => Sign::Ambiguous,
        }
    }
}

/// Sign of a product.
impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        match (self, rhs) {
            (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
            (Sign::Ambiguous, _) | (_, Sign::Ambiguous) => Sign::Ambiguous,
            (a, b) if a == b => Sign::Positive,
            _ => Sign::Negative,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let word = match self {
            Sign::Positive => "positive",
            Sign::Negative => "negative",
            Sign::Zero => "zero",
            Sign::Ambiguous => "ambiguous",
        };
        f.write_str(word)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unrecognized sign `{0}` (expected one of + - 0 ?)")]
pub struct ParseSignError(pub String);

impl FromStr for Sign {
    type Err = ParseSignError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "+" | "pos" | "positive" => Ok(Sign::Positive),
            "-" | "neg" | "negative" => Ok(Sign::Negative),
            "0" | "zero" => Ok(Sign::Zero),
            "?" | "amb" | "ambiguous" => Ok(Sign::Ambiguous),
            _ => Err(ParseSignError(s.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ALL: [Sign; 4] = [Sign::Positive, Sign::Negative, Sign::Zero, Sign::Ambiguous];

    #[test]
    fn addition_table() {
        assert_eq!(Sign::Positive + Sign::Zero, Sign::Positive);
        assert_eq!(Sign::Negative + Sign::Negative, Sign::Negative);
        assert_eq!(Sign::Positive + Sign::Negative, Sign::Ambiguous);
        assert_eq!(Sign::Zero + Sign::Zero, Sign::Zero);
        for s in ALL {
            assert_eq!(s + Sign::Ambiguous, Sign::Ambiguous);
            assert_eq!(s + Sign::Zero, s);
        }
    }

    #[test]
    fn product_and_negation() {
        assert_eq!(Sign::Negative * Sign::Negative, Sign::Positive);
        assert_eq!(Sign::Negative * Sign::Positive, Sign::Negative);
        assert_eq!(Sign::Ambiguous * Sign::Zero, Sign::Zero);
        for s in ALL {
            assert_eq!(-(-s), s);
            assert_eq!(s * Sign::Positive, s);
        }
    }

    #[test]
    fn join_follows_weak_inequalities() {
        assert_eq!(Sign::join([]), Sign::Zero);
        assert_eq!(Sign::join([Sign::Zero, Sign::Negative, Sign::Zero]), Sign::Negative);
        assert_eq!(Sign::join([Sign::Positive, Sign::Negative]), Sign::Ambiguous);
    }

    #[test]
    fn parse_round_trip() {
        for s in ALL {
            assert_eq!(s.symbol().to_string().parse::<Sign>().unwrap(), s);
            assert_eq!(s.to_string().parse::<Sign>().unwrap(), s);
        }
        assert!("x".parse::<Sign>().is_err());
    }

    #[test]
    fn satisfies_claim() {
        assert!(Sign::Zero.satisfies(Sign::Negative));
        assert!(!Sign::Positive.satisfies(Sign::Negative));
        assert!(!Sign::Negative.satisfies(Sign::Zero));
    }
}
