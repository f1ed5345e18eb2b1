//! Polar codes with successive-cancellation (SC) and list-SC decoding in the
//! negative log-likelihood (LL) domain.
//!
//! The list decoder keeps one LL state-memory per path and a small pointer
//! memory that records, per path and stage, which state-memory holds that
//! path's intermediate LLs. Path duplication copies pointer rows, partial
//! sums and path bits; LLs are never copied.
//!
//! Modules:
//! - [`code`]: frozen-set construction and the `F^{⊗n}` encoder.
//! - [`channel`]: BPSK over AWGN, channel LLs and their quantization.
//! - [`arith`]: the `f`/`g` kernels (exact min*, min approximation, fixed point).
//! - [`scdec`]: the single-path SC engine.
//! - [`listdec`]: pointer-memory list-SC decoder plus a copy-based reference.
//! - [`hwmodel`]: storage, comparator, cycle and throughput formulas.
//! - [`sim`]: seeded, parallel Monte-Carlo FER/BER estimation.

pub mod arith;
pub mod channel;
pub mod code;
mod error;
pub mod hwmodel;
pub mod listdec;
pub mod scdec;
pub mod sim;

pub use arith::{ArithModel, FixedPoint, Kernel, LlPair, MinApprox, MinStar};
pub use code::{Construction, PolarCode};
pub use error::{Error, Result};
pub use listdec::{list_decode, reference_list_decode, ListDecoder, ListOutput};
pub use scdec::{sc_decode, ScDecoder};
