//! Exact trace distributions and statistical distances for the deletion channel.
//!
//! The crate centres on the padded pair `x = (01)^k 1 (01)^{k+1}`,
//! `y = (01)^{k+1} 1 (01)^k`, whose trace distributions are hard to tell apart.
//! It provides:
//!
//! * exact subsequence counts, both brute force and through closed forms
//!   ([`strings`], [`combinatorics`], [`channel`]);
//! * brute-force and Monte Carlo distances between trace distributions
//!   ([`distance`]);
//! * an exact polynomial-time evaluator of the squared-difference sums per
//!   `(length, contiguous-01)` profile and the resulting chi-square surrogate and
//!   scaling fits ([`pairsum`]);
//! * numerical audits of the binomial approximation lemmas ([`asymptotics`]);
//! * likelihood-ratio tests, sample-complexity search and the power-sum/k-deck
//!   distinguisher for strings that differ on a whole block ([`distinguisher`]).

pub mod asymptotics;
pub mod channel;
pub mod combinatorics;
pub mod distance;
pub mod distinguisher;
pub mod enumerate;
pub mod error;
pub mod numeric;
pub mod pairsum;
pub mod stats;
pub mod strings;

pub use channel::ChannelSpec;
pub use error::{Error, Result};
pub use pairsum::CountProfile;
pub use strings::{
    contiguous_01_count, is_ead_pair, make_padded_pair, subsequence_count_oracle, BitString,
    EadPair, PaddedPair, Variant,
};
