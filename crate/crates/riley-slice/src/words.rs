//! Free-group words over two generators and the cutting-sequence
//! construction of the slope words V_{p/q}.
//!
//! Words come in two alphabets: G-words over `X^{±1}, Y^{±1}` and Γ-words
//! over `ξ^{±1}, η^{±1}, β^{±1}`. A line of rational slope in the plane,
//! read against the Γ-tessellation, yields a periodic Γ-cutting sequence;
//! dropping the β letters and renaming ξ ↦ X, η ↦ Y gives the G-word of the
//! corresponding curve class. The class is only defined up to cyclic
//! rotation and inversion (I-equivalence); [`Word::canonical_rep`] fixes a
//! unique representative.
//!
//! Geometry of the tessellation: the plane minus the integer lattice is
//! tiled by 1×2 rectangles `[m, m+1] × [2n, 2n+2]`. Each rectangle has six
//! sides: its vertical edges are split at mid-height. The base rectangle
//! `[0,1] × [0,2]` carries, anticlockwise from 0, the labels
//! `β, η^{-1}, η, β^{-1}, ξ^{-1}, ξ`; labels propagate to the other
//! rectangles by the group action, which is periodic under translation by
//! (2, 0) and (0, 2) and swaps ξ-edges with η-edges between adjacent
//! columns. Crossing an edge records the label interior to the region being
//! entered.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use thiserror::Error;

use crate::farey::Slope;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("word is not alternating in X and Y")]
    NotAlternating,
    #[error("invalid word character `{0}`")]
    Parse(char),
}

/// Generator symbols for the two-generator free group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GGen {
    X,
    Y,
}

/// Generator symbols for the plane group Γ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GammaGen {
    Xi,
    Eta,
    Beta,
}

/// Letter alphabets: an uppercase ASCII char for exponent +1 and the
/// corresponding lowercase char for exponent -1.
pub trait Alphabet: Copy + Eq + Ord + fmt::Debug {
    fn to_char(self, inv: bool) -> char;
    fn from_char(c: char) -> Option<(Self, bool)>;
}

impl Alphabet for GGen {
    fn to_char(self, inv: bool) -> char {
        match (self, inv) {
            (GGen::X, false) => 'X',
            (GGen::X, true) => 'x',
            (GGen::Y, false) => 'Y',
            (GGen::Y, true) => 'y',
        }
    }

    fn from_char(c: char) -> Option<(Self, bool)> {
        match c {
            'X' => Some((GGen::X, false)),
            'x' => Some((GGen::X, true)),
            'Y' => Some((GGen::Y, false)),
            'y' => Some((GGen::Y, true)),
            _ => None,
        }
    }
}

impl Alphabet for GammaGen {
    fn to_char(self, inv: bool) -> char {
        match (self, inv) {
            (GammaGen::Xi, false) => 'G',
            (GammaGen::Xi, true) => 'g',
            (GammaGen::Eta, false) => 'H',
            (GammaGen::Eta, true) => 'h',
            (GammaGen::Beta, false) => 'B',
            (GammaGen::Beta, true) => 'b',
        }
    }

    fn from_char(c: char) -> Option<(Self, bool)> {
        match c {
            'G' => Some((GammaGen::Xi, false)),
            'g' => Some((GammaGen::Xi, true)),
            'H' => Some((GammaGen::Eta, false)),
            'h' => Some((GammaGen::Eta, true)),
            'B' => Some((GammaGen::Beta, false)),
            'b' => Some((GammaGen::Beta, true)),
            _ => None,
        }
    }
}

/// A single generator with exponent ±1. `inv == true` means exponent -1.
///
/// The derived ordering is the fixed letter order X < X⁻¹ < Y < Y⁻¹ used by
/// [`Word::canonical_rep`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter<A> {
    pub gen: A,
    pub inv: bool,
}

impl<A: Copy> Letter<A> {
    pub fn new(gen: A, inv: bool) -> Self {
        Letter { gen, inv }
    }

    pub fn inverse(self) -> Self {
        Letter {
            gen: self.gen,
            inv: !self.inv,
        }
    }
}

/// A word in a free group: a finite sequence of letters, not necessarily
/// reduced.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word<A>(Vec<Letter<A>>);

pub type GWord = Word<GGen>;
pub type GammaWord = Word<GammaGen>;

impl<A: Alphabet> Word<A> {
    pub fn from_letters(letters: Vec<Letter<A>>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[Letter<A>] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Freely reduce: cancel adjacent inverse pairs until none remain.
    pub fn free_reduce(&self) -> Word<A> {
        let mut stack: Vec<Letter<A>> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if stack.last().is_some_and(|&top| top == l.inverse()) {
                stack.pop();
            } else {
                stack.push(l);
            }
        }
        Word(stack)
    }

    /// Cyclically reduce: freely reduce, then strip cancelling first/last
    /// pairs. The result is empty or cyclically reduced.
    pub fn cyclic_reduce(&self) -> Word<A> {
        let v = self.free_reduce().0;
        let mut start = 0;
        let mut end = v.len();
        while end - start >= 2 && v[start] == v[end - 1].inverse() {
            start += 1;
            end -= 1;
        }
        Word(v[start..end].to_vec())
    }

    /// The inverse word: reversed letters with negated exponents.
    pub fn invert(&self) -> Word<A> {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// Cyclic rotation moving the first `k` letters to the end.
    pub fn rotate(&self, k: usize) -> Word<A> {
        if self.0.is_empty() {
            return self.clone();
        }
        let k = k % self.0.len();
        let mut v = self.0[k..].to_vec();
        v.extend_from_slice(&self.0[..k]);
        Word(v)
    }

    pub fn is_reduced(&self) -> bool {
        self.0
            .windows(2)
            .all(|w| w[0] != w[1].inverse())
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        self.is_reduced()
            && (self.0.len() < 2 || self.0[0] != self.0[self.0.len() - 1].inverse())
    }

    /// The lexicographically least word among all cyclic rotations of the
    /// cyclic reduction of `self` and of its inverse.
    ///
    /// Two words have equal canonical representatives exactly when they are
    /// conjugate up to inversion (I-equivalent).
    pub fn canonical_rep(&self) -> Word<A> {
        let w = self.cyclic_reduce();
        if w.is_empty() {
            return w;
        }
        let inv = w.invert();
        let n = w.len();
        let mut best: Option<Word<A>> = None;
        for base in [&w, &inv] {
            for k in 0..n {
                let cand = base.rotate(k);
                if best.as_ref().is_none_or(|b| cand < *b) {
                    best = Some(cand);
                }
            }
        }
        best.unwrap()
    }

    /// Free-group conjugacy up to inversion: true iff the cyclic reductions
    /// are cyclic rotations of each other or of each other's inverses.
    pub fn i_equivalent(&self, other: &Word<A>) -> bool {
        self.canonical_rep() == other.canonical_rep()
    }
}

impl<A: Alphabet> fmt::Display for Word<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{}", l.gen.to_char(l.inv))?;
        }
        Ok(())
    }
}

impl<A: Alphabet> fmt::Debug for Word<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl<A: Alphabet> FromStr for Word<A> {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| {
                A::from_char(c)
                    .map(|(gen, inv)| Letter { gen, inv })
                    .ok_or(WordError::Parse(c))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Word)
    }
}

/// Number of cyclic positions where the exponent sign changes between
/// consecutive letters. Requires an alternating X/Y word.
pub fn sign_changes(w: &GWord) -> Result<u32, WordError> {
    let n = w.0.len();
    if n == 0 {
        return Ok(0);
    }
    for i in 0..n {
        if w.0[i].gen == w.0[(i + 1) % n].gen {
            return Err(WordError::NotAlternating);
        }
    }
    Ok((0..n)
        .filter(|&i| w.0[i].inv != w.0[(i + 1) % n].inv)
        .count() as u32)
}

// --- cutting sequences ---------------------------------------------------

type Frac = Ratio<i64>;

/// One period of the Γ-cutting sequence of an oriented line of slope
/// `p/q`, started on the left edge of the base rectangle at height
/// `basepoint_index + 1/(q+1)`.
///
/// The fractional offset keeps the line off every lattice point and edge
/// corner. Works for any reduced slope; canonical slopes are the primary
/// use. The line runs with direction vector (q, p): rightwards, and upwards
/// or downwards with the sign of p.
pub fn gamma_cutting_sequence(s: Slope, basepoint_index: i64) -> GammaWord {
    let (p, q) = (s.p(), s.q());
    let c: Frac = Ratio::from_integer(basepoint_index) + Ratio::new(1, q + 1);
    let mut events: Vec<(Frac, Letter<GammaGen>)> = Vec::with_capacity((2 * q + p.abs()) as usize);

    // crossings of vertical edges: x = 0, 1, ..., 2q-1, entering column k
    for k in 0..2 * q {
        let y = c + Ratio::new(k * p, q);
        let upper = y.floor().to_integer().rem_euclid(2) == 1;
        let gen = if k % 2 == 0 {
            GammaGen::Xi
        } else {
            GammaGen::Eta
        };
        events.push((Ratio::from_integer(k), Letter::new(gen, upper)));
    }

    // crossings of horizontal edges: y = 2m strictly between the period's
    // start and end heights
    if p != 0 {
        let y_end = c + Ratio::from_integer(2 * p);
        let (lo, hi) = if p > 0 { (c, y_end) } else { (y_end, c) };
        let m_lo = (lo / 2).floor().to_integer() + 1;
        let m_hi = (hi / 2).ceil().to_integer() - 1;
        for m in m_lo..=m_hi {
            let x = (Ratio::from_integer(2 * m) - c) * Ratio::new(q, p);
            let col_even = x.floor().to_integer().rem_euclid(2) == 0;
            // upwards into a bottom edge: β in even columns; downwards into
            // a top edge: the labels swap
            let inv = if p > 0 { !col_even } else { col_even };
            events.push((x, Letter::new(GammaGen::Beta, inv)));
        }
    }

    events.sort_by_key(|e| e.0);
    debug_assert!(events.windows(2).all(|w| w[0].0 != w[1].0));
    Word(events.into_iter().map(|(_, l)| l).collect())
}

/// The G-word read from the Γ-cutting sequence of a line of slope `s`:
/// drop every β letter and rename ξ ↦ X, η ↦ Y.
pub fn g_word_of_line(s: Slope, basepoint_index: i64) -> GWord {
    let gamma = gamma_cutting_sequence(s, basepoint_index);
    Word(
        gamma
            .0
            .into_iter()
            .filter_map(|l| match l.gen {
                GammaGen::Xi => Some(Letter::new(GGen::X, l.inv)),
                GammaGen::Eta => Some(Letter::new(GGen::Y, l.inv)),
                GammaGen::Beta => None,
            })
            .collect(),
    )
}

/// The word V_{p/q}: the canonical representative of the G-word of a line
/// of the canonicalized slope. Cyclically reduced, alternating, length 2q.
pub fn v_word(s: Slope) -> GWord {
    g_word_of_line(s.canonicalize(), 0).canonical_rep()
}

/// Closed-form cross-check: the alternating word
/// `Y^{ε1} X^{ε2} Y^{ε3} ⋯ X^{ε_{2q}}` with `ε_i = (-1)^{⌊i·p/q⌋}`.
///
/// Must be I-equivalent to [`v_word`] on every slope; the geometric
/// construction is authoritative if they ever disagree.
pub fn v_word_oracle(s: Slope) -> GWord {
    let s = s.canonicalize();
    let (p, q) = (s.p(), s.q());
    let letters = (1..=2 * q)
        .map(|i| {
            let gen = if i % 2 == 1 { GGen::Y } else { GGen::X };
            let inv = (i * p).div_euclid(q) % 2 != 0;
            Letter::new(gen, inv)
        })
        .collect();
    Word(letters)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gw(s: &str) -> GWord {
        s.parse().unwrap()
    }

    fn slope(p: i64, q: i64) -> Slope {
        Slope::new(p, q)
    }

    #[test]
    fn cyclic_reduce_examples() {
        assert_eq!(gw("XYy").cyclic_reduce(), gw("X"));
        assert_eq!(gw("yXY").cyclic_reduce(), gw("X"));
        assert_eq!(gw("Xy").cyclic_reduce(), gw("Xy"));
        assert_eq!(gw("Xx").cyclic_reduce(), gw(""));
    }

    #[test]
    fn invert_examples() {
        assert_eq!(gw("Xy").invert(), gw("Yx"));
        assert_eq!(gw("").invert(), gw(""));
        assert_eq!(gw("XYx").invert(), gw("Xyx"));
    }

    #[test]
    fn i_equivalent_examples() {
        assert!(gw("Xy").i_equivalent(&gw("Yx")));
        assert!(gw("Xy").i_equivalent(&gw("xY")));
        assert!(!gw("XY").i_equivalent(&gw("Xy")));
    }

    #[test]
    fn i_equivalent_matches_rotation_search() {
        // independent definition: rotation of the reduction or of its inverse
        let words = ["XY", "Xy", "XYxy", "YxyX", "XXY", "xxY", "XYXy"];
        for a in words {
            for b in words {
                let (wa, wb) = (gw(a).cyclic_reduce(), gw(b).cyclic_reduce());
                let direct = (0..wb.len().max(1)).any(|k| wa == wb.rotate(k))
                    || (0..wb.len().max(1)).any(|k| wa == wb.invert().rotate(k));
                assert_eq!(gw(a).i_equivalent(&gw(b)), direct, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn canonical_rep_examples() {
        assert_eq!(gw("Xy").canonical_rep(), gw("Xy"));
        assert_eq!(gw("Yx").canonical_rep(), gw("Xy"));
        assert_eq!(gw("").canonical_rep(), gw(""));
        assert_eq!(gw("XYxy").canonical_rep(), gw("XYxy"));
    }

    #[test]
    fn sign_changes_examples() {
        assert_eq!(sign_changes(&v_word(slope(0, 1))).unwrap(), 0);
        assert_eq!(sign_changes(&v_word(slope(1, 1))).unwrap(), 2);
        assert_eq!(sign_changes(&v_word(slope(2, 3))).unwrap(), 4);
        assert_eq!(sign_changes(&gw("XXY")), Err(WordError::NotAlternating));
    }

    #[test]
    fn gamma_sequence_anchors() {
        // slope 1/1 with initial point between 0 and i
        assert_eq!(
            gamma_cutting_sequence(slope(1, 1), 0).to_string(),
            "Ghb" // ξ η⁻¹ β⁻¹
        );
        // slope 1/1 with initial point between i and 2i
        assert_eq!(
            gamma_cutting_sequence(slope(1, 1), 1).to_string(),
            "gBH" // ξ⁻¹ β η
        );
    }

    #[test]
    fn gamma_sequence_zero_slope() {
        let g = gamma_cutting_sequence(slope(0, 1), 0);
        assert!(g.len() <= 3);
        assert!(g_word_of_line(slope(0, 1), 0).i_equivalent(&gw("XY")));
    }

    #[test]
    fn v_word_examples() {
        assert!(v_word(slope(1, 1)).i_equivalent(&gw("Xy")));
        assert!(v_word(slope(0, 1)).i_equivalent(&gw("XY")));
        assert!(v_word(slope(1, 2)).i_equivalent(&gw("XyxY")));
    }

    #[test]
    fn v_word_oracle_examples() {
        assert_eq!(v_word_oracle(slope(0, 1)), gw("YX"));
        assert_eq!(v_word_oracle(slope(1, 1)), gw("yX"));
        assert_eq!(v_word_oracle(slope(1, 2)), gw("YxyX"));
    }

    #[test]
    fn v_word_shape_small_denominators() {
        for s in crate::farey::farey_enumerate(12) {
            let w = v_word(s);
            assert_eq!(w.len() as i64, 2 * s.q(), "length of V_{s}");
            assert!(w.is_cyclically_reduced());
            assert_eq!(sign_changes(&w).unwrap() as i64, 2 * s.p(), "signs of V_{s}");
            assert!(w.i_equivalent(&v_word_oracle(s)), "oracle mismatch at {s}");
        }
    }

    #[test]
    fn negated_and_shifted_slopes_give_same_class() {
        for s in crate::farey::farey_enumerate(8) {
            let w = v_word(s);
            let neg = g_word_of_line(Slope::new(-s.p(), s.q()), 0);
            let shift = g_word_of_line(Slope::new(s.p() + 2 * s.q(), s.q()), 0);
            assert!(w.i_equivalent(&neg), "slope -{s}");
            assert!(w.i_equivalent(&shift), "slope {s}+2");
        }
    }

    #[test]
    fn y_swap_shifts_slope_by_one() {
        for s in crate::farey::farey_enumerate(8) {
            let swapped = Word(
                v_word(s)
                    .letters()
                    .iter()
                    .map(|l| match l.gen {
                        GGen::Y => l.inverse(),
                        GGen::X => *l,
                    })
                    .collect(),
            );
            let shifted = v_word(Slope::new(s.p() + s.q(), s.q()).canonicalize());
            assert!(swapped.i_equivalent(&shifted), "slope {s}");
        }
    }

    #[test]
    fn word_parse_rejects_garbage() {
        assert_eq!(
            "XZ".parse::<GWord>().unwrap_err(),
            WordError::Parse('Z')
        );
    }

    fn arb_gword(max_len: usize) -> impl Strategy<Value = GWord> {
        proptest::collection::vec((0..2usize, proptest::bool::ANY), 0..max_len).prop_map(|v| {
            Word(
                v.into_iter()
                    .map(|(g, inv)| Letter::new(if g == 0 { GGen::X } else { GGen::Y }, inv))
                    .collect(),
            )
        })
    }

    proptest! {
        #[test]
        fn canonical_rep_is_class_invariant(w in arb_gword(12), k in 0usize..12) {
            let c = w.canonical_rep();
            prop_assert_eq!(w.rotate(k).canonical_rep(), c.clone());
            prop_assert_eq!(w.invert().canonical_rep(), c.clone());
            prop_assert_eq!(c.canonical_rep(), c);
        }

        #[test]
        fn i_equivalence_is_an_equivalence(a in arb_gword(8), b in arb_gword(8), c in arb_gword(8)) {
            prop_assert!(a.i_equivalent(&a));
            prop_assert_eq!(a.i_equivalent(&b), b.i_equivalent(&a));
            if a.i_equivalent(&b) && b.i_equivalent(&c) {
                prop_assert!(a.i_equivalent(&c));
            }
        }

        #[test]
        fn free_reduce_is_reduced(w in arb_gword(20)) {
            prop_assert!(w.free_reduce().is_reduced());
            prop_assert!(w.cyclic_reduce().is_cyclically_reduced() || w.cyclic_reduce().is_empty());
        }
    }
}
