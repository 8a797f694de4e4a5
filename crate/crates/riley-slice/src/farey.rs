//! Rational slopes, canonicalization modulo `x ≈ ±x + 2n`, and Farey
//! enumeration.
//!
//! A [`Slope`] is a reduced fraction `p/q` with `q >= 1`. Two slopes label
//! the same curve class exactly when they differ by the relation
//! `x ≈ ±x + 2n`; [`Slope::canonicalize`] picks the unique representative in
//! `[0, 1]`. The slope `∞` (denominator zero) is rejected at construction:
//! it corresponds to the compressing curve, which has trivial image in the
//! group and carries no pleating ray.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SlopeError {
    #[error("infinite slope unsupported")]
    InfiniteSlope,
    #[error("root slope has no parents")]
    RootSlope,
    #[error("invalid slope `{0}`: expected p/q with q != 0")]
    Parse(String),
}

/// A reduced rational slope p/q with positive denominator.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Slope {
    p: i64,
    q: i64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

impl Slope {
    /// Reduce `p/q` to lowest terms with `q >= 1`.
    pub fn reduce(p: i64, q: i64) -> Result<Self, SlopeError> {
        if q == 0 {
            return Err(SlopeError::InfiniteSlope);
        }
        let g = gcd(p.unsigned_abs(), q.unsigned_abs()) as i64;
        let s = if q < 0 { -1 } else { 1 };
        Ok(Slope {
            p: s * (p / g),
            q: s * (q / g),
        })
    }

    /// Shorthand used in tests; panics on a zero denominator.
    pub fn new(p: i64, q: i64) -> Self {
        Self::reduce(p, q).expect("finite slope")
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn value(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    /// True when `0 <= p/q <= 1`, the fundamental domain of `≈`.
    pub fn is_canonical(&self) -> bool {
        0 <= self.p && self.p <= self.q
    }

    /// The unique representative of the `≈`-class of `self` in `[0, 1]`.
    ///
    /// `x ≈ y` iff `x = ±y + 2n`: reduce p/q mod 2 into `[0, 2)`, then fold
    /// the upper half back by `x ↦ 2 - x`. Idempotent.
    pub fn canonicalize(&self) -> Slope {
        let m = self.p.rem_euclid(2 * self.q);
        let p = if m <= self.q { m } else { 2 * self.q - m };
        Slope::reduce(p, self.q).expect("q >= 1")
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl fmt::Debug for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for Slope {
    type Err = SlopeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (num, den) = s
            .split_once('/')
            .ok_or_else(|| SlopeError::Parse(s.to_string()))?;
        let p: i64 = num
            .trim()
            .parse()
            .map_err(|_| SlopeError::Parse(s.to_string()))?;
        let q: i64 = den
            .trim()
            .parse()
            .map_err(|_| SlopeError::Parse(s.to_string()))?;
        Slope::reduce(p, q)
    }
}

impl PartialOrd for Slope {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Slope {
    fn cmp(&self, other: &Self) -> Ordering {
        // q > 0 on both sides, so cross-multiplication preserves order.
        (self.p as i128 * other.q as i128).cmp(&(other.p as i128 * self.q as i128))
    }
}

impl Serialize for Slope {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Slope {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// All canonical slopes with denominator at most `q_max`, ascending.
///
/// This is the Farey sequence F_{q_max} generated by the mediant recurrence.
pub fn farey_enumerate(q_max: u32) -> Vec<Slope> {
    assert!(q_max >= 1, "q_max must be at least 1");
    let q_max = q_max as i64;
    let mut out = vec![Slope { p: 0, q: 1 }];
    let (mut a, mut b, mut c, mut d) = (0i64, 1i64, 1i64, q_max);
    while c <= q_max {
        let k = (q_max + b) / d;
        let (a2, b2) = (c, d);
        let (c2, d2) = (k * c - a, k * d - b);
        a = a2;
        b = b2;
        c = c2;
        d = d2;
        out.push(Slope { p: a, q: b });
    }
    out
}

/// Farey parents `(a/b, c/d)` of a canonical slope strictly inside `(0, 1)`:
/// `a/b < s < c/d`, `ad - bc = -1`, and `s` is the mediant `(a+c)/(b+d)`.
pub fn farey_neighbors(s: Slope) -> Result<(Slope, Slope), SlopeError> {
    if !s.is_canonical() || s.p == 0 || s.p == s.q {
        return Err(SlopeError::RootSlope);
    }
    let (p, q) = (s.p, s.q);
    // b is the inverse of p mod q in [1, q-1]; then pb - aq = 1.
    let b = mod_inverse(p, q);
    let a = ((p as i128 * b as i128 - 1) / q as i128) as i64;
    let left = Slope { p: a, q: b };
    let right = Slope {
        p: p - a,
        q: q - b,
    };
    Ok((left, right))
}

fn mod_inverse(a: i64, m: i64) -> i64 {
    // extended Euclid; gcd(a, m) = 1 is guaranteed by the reduced invariant
    let (mut r0, mut r1) = (m, a.rem_euclid(m));
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let k = r0 / r1;
        (r0, r1) = (r1, r0 - k * r1);
        (t0, t1) = (t1, t0 - k * t1);
    }
    t0.rem_euclid(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reduce_examples() {
        assert_eq!(Slope::reduce(2, 4).unwrap(), Slope::new(1, 2));
        assert_eq!(Slope::reduce(-3, -6).unwrap(), Slope::new(1, 2));
        assert_eq!(Slope::reduce(5, 1).unwrap(), Slope::new(5, 1));
        assert_eq!(Slope::reduce(1, 0), Err(SlopeError::InfiniteSlope));
    }

    #[test]
    fn canonicalize_examples() {
        assert_eq!(Slope::new(7, 3).canonicalize(), Slope::new(1, 3));
        assert_eq!(Slope::new(-1, 3).canonicalize(), Slope::new(1, 3));
        assert_eq!(Slope::new(5, 3).canonicalize(), Slope::new(1, 3));
        assert_eq!(Slope::new(0, 1).canonicalize(), Slope::new(0, 1));
        assert_eq!(Slope::new(1, 1).canonicalize(), Slope::new(1, 1));
        assert_eq!(Slope::new(2, 1).canonicalize(), Slope::new(0, 1));
        assert_eq!(Slope::new(-7, 5).canonicalize(), Slope::new(3, 5));
    }

    #[test]
    fn enumerate_small() {
        let f1: Vec<String> = farey_enumerate(1).iter().map(|s| s.to_string()).collect();
        assert_eq!(f1, ["0/1", "1/1"]);
        let f2: Vec<String> = farey_enumerate(2).iter().map(|s| s.to_string()).collect();
        assert_eq!(f2, ["0/1", "1/2", "1/1"]);
        let f3: Vec<String> = farey_enumerate(3).iter().map(|s| s.to_string()).collect();
        assert_eq!(f3, ["0/1", "1/3", "1/2", "2/3", "1/1"]);
    }

    #[test]
    fn enumerate_counts() {
        // |F_n| = 2 + sum of Euler phi over 2..=n
        let expected = [2usize, 3, 5, 7, 11, 13, 19, 23];
        for (i, want) in expected.iter().enumerate() {
            assert_eq!(farey_enumerate(i as u32 + 1).len(), *want);
        }
    }

    #[test]
    fn enumerate_sorted_and_complete() {
        let f = farey_enumerate(9);
        assert!(f.windows(2).all(|w| w[0] < w[1]));
        for q in 1..=9i64 {
            for p in 0..=q {
                let s = Slope::reduce(p, q).unwrap();
                if s.q <= 9 {
                    assert!(f.contains(&s.canonicalize()));
                }
            }
        }
    }

    #[test]
    fn neighbors_examples() {
        assert_eq!(
            farey_neighbors(Slope::new(1, 2)).unwrap(),
            (Slope::new(0, 1), Slope::new(1, 1))
        );
        assert_eq!(
            farey_neighbors(Slope::new(2, 5)).unwrap(),
            (Slope::new(1, 3), Slope::new(1, 2))
        );
        assert_eq!(
            farey_neighbors(Slope::new(3, 4)).unwrap(),
            (Slope::new(2, 3), Slope::new(1, 1))
        );
        assert_eq!(
            farey_neighbors(Slope::new(0, 1)),
            Err(SlopeError::RootSlope)
        );
        assert_eq!(
            farey_neighbors(Slope::new(1, 1)),
            Err(SlopeError::RootSlope)
        );
    }

    #[test]
    fn parse_round_trip() {
        let s: Slope = "7/3".parse().unwrap();
        assert_eq!(s, Slope::new(7, 3));
        assert!("1/0".parse::<Slope>().is_err());
        assert!("abc".parse::<Slope>().is_err());
        assert!("3".parse::<Slope>().is_err());
        assert_eq!("-2/4".parse::<Slope>().unwrap(), Slope::new(-1, 2));
    }

    proptest! {
        #[test]
        fn canonicalize_is_idempotent_and_class_constant(p in -400i64..400, q in 1i64..50, n in -5i64..5) {
            let s = Slope::reduce(p, q).unwrap();
            let c = s.canonicalize();
            prop_assert!(c.is_canonical());
            prop_assert_eq!(c.canonicalize(), c);
            // x + 2n and -x + 2n land in the same class
            let shifted = Slope::reduce(s.p() + 2 * n * s.q(), s.q()).unwrap();
            let negated = Slope::reduce(-s.p() + 2 * n * s.q(), s.q()).unwrap();
            prop_assert_eq!(shifted.canonicalize(), c);
            prop_assert_eq!(negated.canonicalize(), c);
        }

        #[test]
        fn neighbors_are_farey_parents(p in 1i64..200, q in 2i64..201) {
            prop_assume!(p < q);
            let s = Slope::reduce(p, q).unwrap();
            prop_assume!(s.p() != 0 && s.p() != s.q());
            let (l, r) = farey_neighbors(s).unwrap();
            prop_assert!(l < s && s < r);
            prop_assert_eq!(l.p() * r.q() - r.p() * l.q(), -1);
            let mediant = Slope::reduce(l.p() + r.p(), l.q() + r.q()).unwrap();
            prop_assert_eq!(mediant, s);
        }
    }
}
