//! Locally nonlinear distributed evaluation: N separated senders feed one-bit
//! XOR channels, a single receiver applies arbitrary local logic to the
//! delivered bits.
//!
//! The crate models both sides of the resulting dichotomy for distributed
//! integer addition:
//!
//! * the classical side, where every deterministic strategy is enumerable and
//!   the receiver's outputs can never exceed algebraic degree m (the channel
//!   count) — including exhaustive searches showing the sum digits are
//!   unreachable;
//! * the entanglement-assisted side, where senders measure shared GHZ states
//!   and the receiver reconstructs every binary digit of the sum through the
//!   same m = ⌊log2 N⌋ + 1 channels, simulated exactly with a dyadic phase
//!   ledger and cross-checked against a dense statevector simulator.

pub mod adder;
pub mod boolfn;
pub mod bus;
pub mod classical;
mod error;
pub mod statevector;
pub mod verify;

pub use adder::{
    channel_count, ghz_budget, run_quantum_adder, run_quantum_adder_with, AdderTranscript,
    GhzPhaseLedger, RunOptions,
};
pub use boolfn::{
    anf_to_truth_table, moebius_transform, sum_digit_function, BitTable, BooleanFunction,
    NonlinearityOrder, MAX_ARITY,
};
pub use bus::{bit_string, parse_bit_string, ChannelBus};
pub use classical::{
    enumerate_strategies, search_realizable, strategy_count, verify_lemma_bound, ClassicalStrategy,
    LemmaBoundReport, SearchResult, DEFAULT_SEARCH_BUDGET,
};
pub use error::{Error, Result};
pub use statevector::{run_adder_statevector, DenseState};
pub use verify::{run_verification, CheckOutcome, VerificationReport, VerifyOptions};
