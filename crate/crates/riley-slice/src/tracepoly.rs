//! Exact integer-coefficient polynomials in ρ, unimodular 2×2 matrices over
//! them, and trace polynomials of G-words.
//!
//! The generators are represented by
//!
//! ```text
//! X = [1 1]      Y = [1 0]
//!     [0 1]          [ρ 1]
//! ```
//!
//! so the trace of any word is a polynomial in ρ with integer coefficients.
//! Coefficients are arbitrary-precision: the identity checks in the test
//! suite rely on exact equality. Traces are taken in SL(2); no sign-lifting
//! choices arise because the groups are defined as matrix groups, never
//! reduced mod ±I.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::words::{GGen, GWord, Letter};

/// Dense polynomial in ρ with arbitrary-precision integer coefficients,
/// lowest degree first. The zero polynomial has an empty coefficient list.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: i64) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn from_coeffs<T: Into<BigInt>>(coeffs: Vec<T>) -> Self {
        let mut p = IntPoly {
            coeffs: coeffs.into_iter().map(Into::into).collect(),
        };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn add(&self, other: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![BigInt::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i] += c;
        }
        IntPoly::from_coeffs(out)
    }

    pub fn sub(&self, other: &IntPoly) -> IntPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> IntPoly {
        IntPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::from_coeffs(out)
    }

    /// f(-ρ): negate the odd-degree coefficients.
    pub fn compose_neg(&self) -> IntPoly {
        IntPoly {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
                .collect(),
        }
    }

    pub fn derivative(&self) -> IntPoly {
        if self.coeffs.len() <= 1 {
            return IntPoly::zero();
        }
        IntPoly::from_coeffs(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * BigInt::from(i as i64 + 1))
                .collect::<Vec<_>>(),
        )
    }

    /// Coefficients as doubles, lowest first. Exact up to 2^53; larger
    /// coefficients round.
    pub fn coeffs_f64(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::INFINITY * c.signum().to_f64().unwrap()))
            .collect()
    }

    /// Horner evaluation in double-precision complex arithmetic.
    pub fn eval(&self, rho: Complex64) -> Complex64 {
        horner(&self.coeffs_f64(), rho)
    }

    /// Derivative value at ρ, same precision model as [`IntPoly::eval`].
    pub fn eval_deriv(&self, rho: Complex64) -> Complex64 {
        self.derivative().eval(rho)
    }
}

pub(crate) fn horner(coeffs: &[f64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

#[derive(Serialize, Deserialize)]
struct IntPolyDto {
    coeffs: Vec<String>,
}

impl Serialize for IntPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        IntPolyDto {
            coeffs: self.coeffs.iter().map(|c| c.to_string()).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IntPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let dto = IntPolyDto::deserialize(deserializer)?;
        let coeffs = dto
            .coeffs
            .iter()
            .map(|s| s.parse::<BigInt>().map_err(serde::de::Error::custom))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(IntPoly::from_coeffs(coeffs))
    }
}

/// 2×2 matrix with [`IntPoly`] entries. Every matrix built from letters has
/// determinant identically 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    pub a: IntPoly,
    pub b: IntPoly,
    pub c: IntPoly,
    pub d: IntPoly,
}

impl PolyMatrix {
    pub fn identity() -> Self {
        PolyMatrix {
            a: IntPoly::constant(1),
            b: IntPoly::zero(),
            c: IntPoly::zero(),
            d: IntPoly::constant(1),
        }
    }

    pub fn mul(&self, o: &PolyMatrix) -> PolyMatrix {
        PolyMatrix {
            a: self.a.mul(&o.a).add(&self.b.mul(&o.c)),
            b: self.a.mul(&o.b).add(&self.b.mul(&o.d)),
            c: self.c.mul(&o.a).add(&self.d.mul(&o.c)),
            d: self.c.mul(&o.b).add(&self.d.mul(&o.d)),
        }
    }

    pub fn det(&self) -> IntPoly {
        self.a.mul(&self.d).sub(&self.b.mul(&self.c))
    }

    pub fn trace(&self) -> IntPoly {
        self.a.add(&self.d)
    }
}

/// Matrix of a single generator letter.
pub fn letter_matrix(l: Letter<GGen>) -> PolyMatrix {
    let one = IntPoly::constant(1);
    let zero = IntPoly::zero();
    match (l.gen, l.inv) {
        (GGen::X, false) => PolyMatrix {
            a: one.clone(),
            b: IntPoly::constant(1),
            c: zero,
            d: one,
        },
        (GGen::X, true) => PolyMatrix {
            a: one.clone(),
            b: IntPoly::constant(-1),
            c: zero,
            d: one,
        },
        (GGen::Y, false) => PolyMatrix {
            a: one.clone(),
            b: zero,
            c: IntPoly::from_coeffs(vec![0, 1]),
            d: one,
        },
        (GGen::Y, true) => PolyMatrix {
            a: one.clone(),
            b: zero,
            c: IntPoly::from_coeffs(vec![0, -1]),
            d: one,
        },
    }
}

/// Left-to-right product of the letter matrices of `w`.
pub fn word_matrix(w: &GWord) -> PolyMatrix {
    w.letters()
        .iter()
        .fold(PolyMatrix::identity(), |acc, &l| {
            acc.mul(&letter_matrix(l))
        })
}

/// Tr of the word matrix: a polynomial in ρ with integer coefficients,
/// invariant under cyclic rotation and inversion of `w`.
pub fn trace_polynomial(w: &GWord) -> IntPoly {
    word_matrix(w).trace()
}
