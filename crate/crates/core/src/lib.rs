//! Colossally abundant numbers in factored form.
//!
//! The [`engine`] walks the CA sequence `n_1 = 2, n_2 = 6, …` one prime
//! factor at a time without ever materializing `n_i`, carrying only the
//! top-down factorization and log-domain accumulators. [`robin`] evaluates
//! Robin's quantities along that walk, [`oscillation`] covers the geometry of
//! the oscillation quotient, and [`oracle`] provides brute-force references
//! for small `n`.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dd;
pub mod engine;
pub mod error;
pub mod factored;
pub mod oracle;
pub mod oscillation;
pub mod primes;
pub mod report;
pub mod robin;

pub use dd::DoubleDouble;
pub use engine::{
    ca_parameter, generate, select_next_trigger, CaRecord, CaSequence, CaState, Checkpoint,
};
pub use error::{Error, Result};
pub use factored::{BottomUpForm, LogStats, TopDownForm};
pub use oscillation::OscParams;
pub use primes::PrimeSieve;
pub use robin::{GlWindow, KiSearch};
