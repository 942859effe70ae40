//! Single-pass detection of ℓ2 heavy hitters in streams whose element order
//! is random (or at least random for the heavy elements themselves).
//!
//! The core pipeline: split the stream into windows, sample one candidate per
//! window per hash repetition, and confirm candidates by re-observing them
//! across geometrically growing window intervals. Confirmation is delegated to
//! a small state machine ([`kshh`]) that holds at most one candidate identity
//! at a time, so the whole detector runs in a simulated space budget that a
//! ledger ([`spacemeter`]) audits window by window.
//!
//! Supporting cast: exact brute-force ground truth ([`oracle`]), synthetic
//! stream construction ([`streamgen`]), a prefix second-moment tracker and the
//! guess ladders that remove the known-length / known-norm assumptions
//! ([`tracking`]), and a registry of statistical claims with pass/fail
//! verdicts ([`claims`]).

pub mod claims;
pub mod config;
pub mod detector;
pub mod files;
pub mod forest;
pub mod kshh;
pub mod oracle;
pub mod randomness;
pub mod spacemeter;
pub mod stream;
pub mod streamgen;
pub mod tracking;

mod error;

pub use config::{DetectorConfig, DetectorParams, EpsRatio, StreamOrderMode};
pub use detector::{Detector, DetectorResult};
pub use error::Error;
pub use stream::{frequency_vector, windowize, Element, FrequencyVector};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            mod $name {}
        };
    }

    chapter!(intro, "../../../book/src/intro.md");
    chapter!(streams, "../../../book/src/streams.md");
    chapter!(sampling, "../../../book/src/sampling.md");
    chapter!(confirming, "../../../book/src/confirming.md");
    chapter!(forest, "../../../book/src/forest.md");
    chapter!(detector, "../../../book/src/detector.md");
    chapter!(unknowns, "../../../book/src/unknowns.md");
    chapter!(space, "../../../book/src/space.md");
    chapter!(verification, "../../../book/src/verification.md");
}
