//! Lag tuples identifying joint moments of the noise.
//!
//! A tuple `j = (j_1, ..., j_q)` names the moment `R(j) = E[chi_{j_1} ... chi_{j_q}]`.
//! Order is kept exactly as given: the block statistics pair lag position `r`
//! with its own centering block, so `(0, 2)` and `(2, 0)` are different
//! statistics even though they share an estimand.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct IndexTuple(Vec<i64>);

impl IndexTuple {
    pub fn new(lags: Vec<i64>) -> Result<Self, Error> {
        if lags.is_empty() {
            return Err(Error::EmptyTuple);
        }
        Ok(Self(lags))
    }

    /// The covariance tuple `(0, lag)`.
    pub fn pair(lag: i64) -> Self {
        Self(vec![0, lag])
    }

    pub fn lags(&self) -> &[i64] {
        &self.0
    }

    /// Number of factors, `q(j)`.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; kept for clippy's `len_without_is_empty`.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest lag, `mu(j)`.
    pub fn mu(&self) -> i64 {
        *self.0.iter().max().expect("tuple is non-empty")
    }

    /// Concatenation `j ⊕ j'`.
    pub fn oplus(&self, other: &IndexTuple) -> IndexTuple {
        let mut lags = Vec::with_capacity(self.len() + other.len());
        lags.extend_from_slice(&self.0);
        lags.extend_from_slice(&other.0);
        IndexTuple(lags)
    }

    /// Every lag shifted by `m`.
    pub fn shift(&self, m: i64) -> IndexTuple {
        IndexTuple(self.0.iter().map(|l| l + m).collect())
    }

    /// All lags non-negative (usable as an estimation target).
    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&l| l >= 0)
    }

    /// Canonical target form: first lag zero, at least two factors.
    pub fn is_canonical_target(&self) -> bool {
        self.is_nonnegative() && self.0[0] == 0 && self.len() >= 2
    }

    pub(crate) fn require_nonnegative(&self) -> Result<(), Error> {
        if self.is_nonnegative() {
            Ok(())
        } else {
            Err(Error::NegativeLag(self.clone()))
        }
    }
}

impl TryFrom<Vec<i64>> for IndexTuple {
    type Error = Error;

    fn try_from(lags: Vec<i64>) -> Result<Self, Error> {
        IndexTuple::new(lags)
    }
}

impl From<IndexTuple> for Vec<i64> {
    fn from(t: IndexTuple) -> Self {
        t.0
    }
}

impl fmt::Display for IndexTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str(")")
    }
}

impl FromStr for IndexTuple {
    type Err = Error;

    /// Parses `"(0,2,2)"`; the parentheses are optional.
    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::ParseTuple(s.to_string());
        let body = s.trim();
        let body = body.strip_prefix('(').unwrap_or(body);
        let body = body.strip_suffix(')').unwrap_or(body);
        let lags = body
            .split(',')
            .map(|p| p.trim().parse::<i64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>, _>>()?;
        IndexTuple::new(lags).map_err(|_| bad())
    }
}

#[macro_export]
macro_rules! tuple {
    ($($l:expr),+ $(,)?) => {
        $crate::IndexTuple::new(vec![$($l as i64),+]).unwrap()
    };
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn mu_examples() {
        assert_eq!(tuple!(0, 0).mu(), 0);
        assert_eq!(tuple!(0, 3, 1).mu(), 3);
        assert_eq!(tuple!(5).mu(), 5);
    }

    #[test]
    fn oplus_examples() {
        assert_eq!(tuple!(0, 2).oplus(&tuple!(0, 1)), tuple!(0, 2, 0, 1));
        assert_eq!(tuple!(0).oplus(&tuple!(0)), tuple!(0, 0));
        assert_eq!(tuple!(0, 1).oplus(&tuple!(0, 1).shift(3)), tuple!(0, 1, 3, 4));
    }

    #[test]
    fn shift_examples() {
        assert_eq!(tuple!(0, 1).shift(2), tuple!(2, 3));
        assert_eq!(tuple!(0, 0).shift(0), tuple!(0, 0));
        assert_eq!(tuple!(1, 4).shift(-1), tuple!(0, 3));
    }

    #[test]
    fn empty_tuple_rejected() {
        assert!(IndexTuple::new(vec![]).is_err());
    }

    #[test]
    fn target_sets() {
        assert!(tuple!(0, 2).is_canonical_target());
        assert!(!tuple!(1, 2).is_canonical_target());
        assert!(!tuple!(0).is_canonical_target());
        assert!(!tuple!(0, -1).is_nonnegative());
    }

    #[test]
    fn text_form() {
        let t: IndexTuple = "(0,2,2)".parse().unwrap();
        assert_eq!(t, tuple!(0, 2, 2));
        assert_eq!(t.to_string(), "(0,2,2)");
        assert_eq!(" ( 0 , 1 ) ".parse::<IndexTuple>().unwrap(), tuple!(0, 1));
        assert!("()".parse::<IndexTuple>().is_err());
        assert!("(0,x)".parse::<IndexTuple>().is_err());
    }

    fn arb_tuple() -> impl Strategy<Value = IndexTuple> {
        prop::collection::vec(-20i64..20, 1..8).prop_map(|v| IndexTuple::new(v).unwrap())
    }

    proptest! {
        #[test]
        fn shift_moves_mu(j in arb_tuple(), m in -50i64..50) {
            prop_assert_eq!(j.shift(m).mu(), j.mu() + m);
        }

        #[test]
        fn oplus_adds_lengths(a in arb_tuple(), b in arb_tuple()) {
            prop_assert_eq!(a.oplus(&b).len(), a.len() + b.len());
        }

        #[test]
        fn shifts_compose(j in arb_tuple(), a in -30i64..30, b in -30i64..30) {
            prop_assert_eq!(j.shift(a).shift(b), j.shift(a + b));
        }

        #[test]
        fn display_parse_roundtrip(j in arb_tuple()) {
            prop_assert_eq!(j.to_string().parse::<IndexTuple>().unwrap(), j);
        }
    }
}
