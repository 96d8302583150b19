//! Exact constructions of 4-phase Golay complementary sets, complex base
//! sequences, perfect sequences over signed permutation groups and Hadamard
//! matrices, with integer-only verification.

pub mod codec;
pub mod constructions;
pub mod gauss;
pub mod golay;
pub mod hadamard;
mod ntt;
pub mod seq;
pub mod signed_perm;

pub use gauss::GaussInt;
pub use seq::{CorrMode, CorrProfile, QSeq, VerificationReport};
