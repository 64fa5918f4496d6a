//! Exact rational face cuboids from rational points on the curve family
//! `E1(s): y² = x(x − (2s)²)(x + (s² − 1)²)`.
//!
//! A *face cuboid* is a box whose three edges, two of its three face
//! diagonals and its space diagonal are all rational. Every non-torsion
//! point `(α, β)` on `E1(s)` yields one, and every similarity class of face
//! cuboids arises from exactly 32 such triples `(s, α, β)`.
//!
//! Modules, bottom-up:
//!
//! * [`exactq`]: exact square roots of rationals and the `"p/q"` text form.
//! * [`curves`]: the group law and the explicit torsion subgroups.
//! * [`correspondence`]: the maps between points, parameters and the Γ-action.
//! * [`cuboid`]: cuboid construction, similarity classes, inversion.
//! * [`oracle`]: brute-force integer face-cuboid search for cross-checking.
//! * [`cli`]: the `facecuboid` command-line front end.

pub mod cli;
pub mod correspondence;
pub mod cuboid;
pub mod curves;
pub mod error;
pub mod exactq;
pub mod oracle;

pub use correspondence::{GammaElement, PairA, PairB, TripleA, TripleB};
pub use cuboid::{CuboidClass, FaceCuboid};
pub use curves::{CurveKind, CurveParams, CurvePoint};
pub use error::{Error, Result};
pub use exactq::BigRational;
pub use oracle::IntegerCuboidHit;
