//! Exact Weingarten calculus on `U(N)` and moments of traces of words in
//! independent Haar unitaries.
//!
//! The exact side works in rationals throughout: [`weingarten`] builds the
//! Weingarten function on conjugacy classes, [`moments`] sums it over the
//! permutation tuples of a trace-word spec, and [`asymptotics`] gives the
//! Gaussian large-`N` limit. [`haar`] is an independent Monte Carlo check.

pub mod asymptotics;
pub mod error;
pub mod haar;
pub mod moments;
pub mod perm;
pub mod rational;
pub mod verify;
pub mod weingarten;
pub mod words;

pub use asymptotics::{convergence_scan, predict, AsymptoticPrediction, ConvergenceReport};
pub use error::{Error, Result};
pub use haar::{estimate_moment, haar_sample, MCEstimate, UnitaryMatrix};
pub use moments::{exact_abs_square_moment, exact_moment, ExactMoment, MomentOptions};
pub use perm::{CycleType, Permutation};
pub use rational::ExactRational;
pub use weingarten::{entry_integral, weingarten_table, SingularPolicy, WeingartenTable};
pub use words::{parse_word, MomentSpec, MomentTerm, Word};
