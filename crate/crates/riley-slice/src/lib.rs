//! Pleating rays of the Riley slice.
//!
//! The Riley slice is the set of complex parameters ρ for which the group
//! generated by the two parabolic matrices
//!
//! ```text
//! X = [1 1]      Y = [1 0]
//!     [0 1]          [ρ 1]
//! ```
//!
//! has a four-times punctured sphere as quotient regular set. It is foliated
//! by rational pleating rays indexed by slopes p/q ∈ [0, 1]: for each slope
//! there is a word V_{p/q} in X, Y whose trace polynomial cuts out the ray
//! as two complex-conjugate branches of its real locus (one real branch for
//! the ends 0/1 and 1/1), ending at a cusp where the trace reaches -2.
//!
//! The crate builds this picture end to end:
//!
//! - [`farey`]: slope arithmetic, canonicalization mod `x ≈ ±x + 2n`, Farey
//!   enumeration and neighbors;
//! - [`words`]: free-group words, cutting sequences, the slope words
//!   V_{p/q} and their closed-form oracle;
//! - [`tracepoly`]: exact big-integer trace polynomials and 2×2 matrices;
//! - [`rays`]: Newton continuation of ray branches, cusp refinement,
//!   simultaneous root finding, pleating length;
//! - [`slice`]: the batch diagram with symmetry/disjointness audits and
//!   CSV/JSON/SVG exporters;
//! - [`checks`]: the named verification suites behind `riley check`.

pub mod checks;
pub mod farey;
pub mod rays;
pub mod slice;
pub mod tracepoly;
pub mod words;

pub use farey::{farey_enumerate, farey_neighbors, Slope, SlopeError};
pub use rays::{
    all_parabolic_roots, asymptotic_seed, branches_for, cusp, pleating_length, point_for_length,
    solve_trace_eq, trace_polynomial_of, trace_ray, Branch, RayError, RayPath, RaySample, Schedule,
};
pub use slice::{build_slice, disjointness_audit, export, locate, symmetry_audit, SliceDiagram};
pub use tracepoly::{letter_matrix, trace_polynomial, word_matrix, IntPoly, PolyMatrix};
pub use words::{
    gamma_cutting_sequence, g_word_of_line, sign_changes, v_word, v_word_oracle, GWord, GammaWord,
    Word, WordError,
};
