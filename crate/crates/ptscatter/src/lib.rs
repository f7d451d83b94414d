//! Scattering of spin-½ particles from a balanced gain/loss bilayer, with
//! optional spin-flipper elements on either side.
//!
//! Conventions used throughout:
//!
//! - Internal units are eV and nm with ħ²/(2mₑ) = 0.0380998 eV·nm²; public
//!   APIs accept lengths in μm and energies in eV.
//! - The complex potential is V = V_R + iV_I on the left half of the barrier
//!   (gain) and its conjugate on the right half (loss).
//! - The scattering-matrix (star product) evaluator in [`stack`] is the
//!   authoritative numeric path; the boundary-matching closed form in
//!   [`scattering`] is exact algebra but ill-conditioned at large barrier
//!   opacity and is guarded accordingly.

// Validation predicates are written `!(x > 0.0)` so that NaN fails them;
// reference constants keep every digit of the external oracle they were
// frozen from; matrix kernels use index loops where row/column symmetry
// is the point of the code.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::excessive_precision)]
#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod dataset;
pub mod eigen;
pub mod error;
pub mod phase;
pub mod runconfig;
pub mod scattering;
pub mod spinflip;
pub mod stack;
pub mod sweep;
pub mod units;
pub mod verify;

pub use error::{Error, Result};
