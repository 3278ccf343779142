//! Entanglement-assisted distributed integer addition, simulated exactly.
//!
//! One (N+1)-qubit GHZ state per channel q ≥ 1 is tracked by a
//! [`GhzPhaseLedger`]: the state stays of the form |0…0⟩ + e^{iπk/2^q}|1…1⟩
//! (with the senders' branch collapsing as they measure), so an integer k
//! modulo 2^{q+1} — units of π/2^q — captures it completely. No floating
//! point appears anywhere on this path, which turns the ±1 residual-phase
//! condition into an exact equality check.
//!
//! Conventions: a sender's rotation for input bit x adds x units to k;
//! a sender measurement outcome of 1 flips the receiver-branch sign
//! (adds 2^q units); the receiver's correction subtracts Σ_{p<q} 2^p·y_p
//! units, i.e. rotates by α_q = −π·(Σ 2^p·y_p)/2^q.

use std::fmt::Write as _;

use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};

use crate::bus::{bit_string, ChannelBus};
use crate::error::{Error, Result};

/// Exact dyadic phase of one GHZ state as channel q consumes it.
#[derive(Debug, Clone)]
pub struct GhzPhaseLedger {
    n_senders: usize,
    channel: usize,
    /// Phase numerator modulo 2^{q+1}, in units of π/2^q.
    phase_units: u32,
    senders_measured: usize,
    consumed: bool,
}

impl GhzPhaseLedger {
    pub fn new(n_senders: usize, channel: usize) -> Result<Self> {
        if n_senders == 0 {
            return Err(Error::InvalidInput("ledger needs at least one sender".into()));
        }
        if channel == 0 || channel > 30 {
            return Err(Error::InvalidInput(format!(
                "GHZ channels are indexed 1..=30, got {channel}"
            )));
        }
        Ok(GhzPhaseLedger {
            n_senders,
            channel,
            phase_units: 0,
            senders_measured: 0,
            consumed: false,
        })
    }

    pub fn channel(&self) -> usize {
        self.channel
    }

    /// Current phase numerator k; the relative phase is π·k/2^q.
    pub fn phase_units(&self) -> u32 {
        self.phase_units
    }

    pub fn senders_measured(&self) -> usize {
        self.senders_measured
    }

    pub fn is_consumed(&self) -> bool {
        self.consumed
    }

    fn modulus(&self) -> u32 {
        1 << (self.channel + 1)
    }

    fn half_turn(&self) -> u32 {
        1 << self.channel
    }

    /// One sender's z-rotation by −π·x/2^q: the |1…1⟩ branch gains
    /// e^{+iπ·x/2^q}, i.e. k gains x.
    pub fn sender_rotate(&mut self, input: bool) -> Result<()> {
        self.rotate_units(u32::from(input))
    }

    /// Sign-inverted rotation (k loses x). Diagnostic path used as a
    /// negative control by the verification suite.
    pub fn sender_rotate_inverted(&mut self, input: bool) -> Result<()> {
        let units = self.modulus() - u32::from(input);
        self.rotate_units(units % self.modulus())
    }

    fn rotate_units(&mut self, units: u32) -> Result<()> {
        if self.consumed {
            return Err(Error::ProtocolViolation("ledger already consumed".into()));
        }
        if self.senders_measured > 0 {
            return Err(Error::ProtocolViolation(
                "rotation after a sender measurement".into(),
            ));
        }
        self.phase_units = (self.phase_units + units) % self.modulus();
        Ok(())
    }

    /// One sender's Hadamard-and-measure. The outcome is a fair bit; an
    /// outcome of 1 flips the sign of the receiver's |1⟩ branch (a π flip,
    /// 2^q units).
    pub fn sender_measure<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<bool> {
        if self.consumed {
            return Err(Error::ProtocolViolation("ledger already consumed".into()));
        }
        if self.senders_measured == self.n_senders {
            return Err(Error::ProtocolViolation(format!(
                "all {} senders measured this ledger already",
                self.n_senders
            )));
        }
        let outcome = rng.random::<f64>() >= 0.5;
        if outcome {
            self.phase_units = (self.phase_units + self.half_turn()) % self.modulus();
        }
        self.senders_measured += 1;
        Ok(outcome)
    }

    /// The receiver's correction rotation α_q = −π·(Σ_{p<q} 2^p·y_p)/2^q,
    /// Hadamard, and measurement.
    ///
    /// After the correction the residual phase must be an exact multiple of
    /// π; the measurement result is its half-turn parity, and the output bit
    /// is that result XOR the channel's received bit.
    pub fn olga_correct_and_measure(
        &mut self,
        prior_outputs: &[bool],
        received: bool,
    ) -> Result<bool> {
        if self.consumed {
            return Err(Error::ProtocolViolation("ledger already consumed".into()));
        }
        if self.senders_measured != self.n_senders {
            return Err(Error::ProtocolViolation(format!(
                "receiver acted after {} of {} sender measurements",
                self.senders_measured, self.n_senders
            )));
        }
        if prior_outputs.len() != self.channel {
            return Err(Error::InvalidInput(format!(
                "channel {} correction needs {} prior output bits, got {}",
                self.channel,
                self.channel,
                prior_outputs.len()
            )));
        }
        let correction: u32 = prior_outputs
            .iter()
            .enumerate()
            .map(|(p, &y)| u32::from(y) << p)
            .sum();
        let modulus = self.modulus();
        self.phase_units = (self.phase_units + modulus - correction % modulus) % modulus;

        let half = self.half_turn();
        if !self.phase_units.is_multiple_of(half) {
            return Err(Error::InternalConsistency(format!(
                "residual phase {}π/{} is not a multiple of π after correction",
                self.phase_units, half
            )));
        }
        let result = (self.phase_units / half) & 1 == 1;
        self.consumed = true;
        Ok(result ^ received)
    }
}

/// Channel count for n senders: every binary digit of the sum needs one.
pub fn channel_count(n_senders: usize) -> usize {
    assert!(n_senders >= 1, "channel count needs at least one sender");
    n_senders.ilog2() as usize + 1
}

/// GHZ states one run consumes: one per channel except channel 0.
pub fn ghz_budget(n_senders: usize) -> usize {
    assert!(n_senders >= 2, "the adder is defined for N >= 2");
    n_senders.ilog2() as usize
}

/// Everything one protocol run produced, bit for bit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdderTranscript {
    pub n_senders: usize,
    pub channels: usize,
    pub seed: u64,
    pub inputs: Vec<bool>,
    /// Per channel, the N sent bits in sender order (channel 0 = inputs).
    pub sent: Vec<Vec<bool>>,
    pub received: Vec<bool>,
    /// The receiver's raw measurement results for channels q ≥ 1.
    pub olga_results: Vec<bool>,
    pub outputs: Vec<bool>,
    pub ghz_consumed: usize,
}

impl AdderTranscript {
    /// S = Σ x_i.
    pub fn sum(&self) -> u32 {
        self.inputs.iter().map(|&b| u32::from(b)).sum()
    }

    /// The outputs read as a binary integer, y_0 least significant.
    pub fn output_value(&self) -> u32 {
        self.outputs
            .iter()
            .enumerate()
            .map(|(q, &y)| u32::from(y) << q)
            .sum()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "N={}", self.n_senders);
        let _ = writeln!(out, "m={}", self.channels);
        let _ = writeln!(out, "seed={}", self.seed);
        let _ = writeln!(out, "inputs={}", bit_string(&self.inputs));
        for (q, sent) in self.sent.iter().enumerate() {
            let _ = writeln!(out, "sent[{q}]={}", bit_string(sent));
        }
        let _ = writeln!(out, "received={}", bit_string(&self.received));
        let _ = writeln!(out, "olga_results={}", bit_string(&self.olga_results));
        let _ = writeln!(out, "outputs={}", bit_string(&self.outputs));
        let _ = writeln!(out, "S={}", self.sum());
        let _ = writeln!(out, "ghz_consumed={}", self.ghz_consumed);
        out
    }
}

/// Knobs for a run. `flip_rotation_sign` inverts the senders' rotation
/// direction — a deliberate convention bug for negative-control tests.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub flip_rotation_sign: bool,
}

/// Each channel draws from its own PRNG stream so channels are independent
/// and both simulator backends can consume identical draws.
pub(crate) fn channel_rng(seed: u64, channel: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(channel as u64);
    rng
}

/// Run the full adder on the phase-ledger backend.
///
/// Channel 0 carries the inputs directly; each channel q ≥ 1 consumes one
/// GHZ ledger: all senders rotate, then all senders measure and upload, and
/// after delivery the receiver corrects and measures channel by channel.
pub fn run_quantum_adder(inputs: &[bool], seed: u64) -> Result<AdderTranscript> {
    run_quantum_adder_with(inputs, seed, RunOptions::default())
}

pub fn run_quantum_adder_with(
    inputs: &[bool],
    seed: u64,
    options: RunOptions,
) -> Result<AdderTranscript> {
    let n = inputs.len();
    if n < 2 {
        return Err(Error::InvalidInput(
            "the adder needs at least two senders".into(),
        ));
    }
    let m = channel_count(n);
    let mut bus = ChannelBus::new(n, m)?;
    let mut sent: Vec<Vec<bool>> = Vec::with_capacity(m);

    sent.push(inputs.to_vec());
    for (i, &x) in inputs.iter().enumerate() {
        bus.upload(i, 0, x)?;
    }

    let mut ledgers: Vec<GhzPhaseLedger> = Vec::with_capacity(m - 1);
    for q in 1..m {
        let mut ledger = GhzPhaseLedger::new(n, q)?;
        for &x in inputs {
            if options.flip_rotation_sign {
                ledger.sender_rotate_inverted(x)?;
            } else {
                ledger.sender_rotate(x)?;
            }
        }
        let mut rng = channel_rng(seed, q);
        let mut channel_sent = Vec::with_capacity(n);
        for i in 0..n {
            let bit = ledger.sender_measure(&mut rng)?;
            bus.upload(i, q, bit)?;
            channel_sent.push(bit);
        }
        sent.push(channel_sent);
        ledgers.push(ledger);
    }

    let received = bus.deliver()?;
    let mut outputs = vec![received[0]];
    let mut olga_results = Vec::with_capacity(m - 1);
    for (q, ledger) in ledgers.iter_mut().enumerate().map(|(i, l)| (i + 1, l)) {
        let y = ledger.olga_correct_and_measure(&outputs, received[q])?;
        olga_results.push(y ^ received[q]);
        outputs.push(y);
    }

    Ok(AdderTranscript {
        n_senders: n,
        channels: m,
        seed,
        inputs: inputs.to_vec(),
        sent,
        received,
        olga_results,
        outputs,
        ghz_consumed: ledgers.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    /// Feeds scripted measurement outcomes: a large word for 1, zero for 0.
    struct ScriptedRng {
        bits: std::collections::VecDeque<bool>,
    }

    impl ScriptedRng {
        fn new(bits: &[bool]) -> Self {
            ScriptedRng {
                bits: bits.iter().copied().collect(),
            }
        }
    }

    impl RngCore for ScriptedRng {
        fn next_u32(&mut self) -> u32 {
            self.next_u64() as u32
        }

        fn next_u64(&mut self) -> u64 {
            match self.bits.pop_front() {
                Some(true) => u64::MAX,
                Some(false) | None => 0,
            }
        }

        fn fill_bytes(&mut self, dest: &mut [u8]) {
            let word = self.next_u64().to_le_bytes();
            for (i, byte) in dest.iter_mut().enumerate() {
                *byte = word[i % 8];
            }
        }
    }

    fn bits_of(x: u32, n: usize) -> Vec<bool> {
        (0..n).map(|i| x >> i & 1 == 1).collect()
    }

    #[test]
    fn rotation_accumulates_phase() {
        let mut ledger = GhzPhaseLedger::new(2, 1).unwrap();
        ledger.sender_rotate(false).unwrap();
        assert_eq!(ledger.phase_units(), 0);
        ledger.sender_rotate(true).unwrap();
        ledger.sender_rotate(true).unwrap();
        assert_eq!(ledger.phase_units(), 2); // phase π

        let mut ledger = GhzPhaseLedger::new(4, 2).unwrap();
        for _ in 0..4 {
            ledger.sender_rotate(true).unwrap();
        }
        assert_eq!(ledger.phase_units(), 4); // phase π, modulo 8
    }

    #[test]
    fn measurement_outcomes_flip_the_sign() {
        let mut ledger = GhzPhaseLedger::new(3, 1).unwrap();
        let mut rng = ScriptedRng::new(&[false]);
        assert!(!ledger.sender_measure(&mut rng).unwrap());
        assert_eq!(ledger.phase_units(), 0);

        let mut rng = ScriptedRng::new(&[true, true]);
        ledger.sender_measure(&mut rng).unwrap();
        assert_eq!(ledger.phase_units(), 2);
        ledger.sender_measure(&mut rng).unwrap();
        assert_eq!(ledger.phase_units(), 0); // two π flips cancel
    }

    #[test]
    fn ledger_enforces_operation_order() {
        let mut ledger = GhzPhaseLedger::new(2, 1).unwrap();
        let mut rng = ScriptedRng::new(&[false, false]);
        ledger.sender_rotate(true).unwrap();
        ledger.sender_measure(&mut rng).unwrap();
        assert!(matches!(
            ledger.sender_rotate(true),
            Err(Error::ProtocolViolation(_))
        ));
        assert!(matches!(
            ledger.olga_correct_and_measure(&[false], false),
            Err(Error::ProtocolViolation(_))
        ));
        ledger.sender_measure(&mut rng).unwrap();
        assert!(matches!(
            ledger.sender_measure(&mut rng),
            Err(Error::ProtocolViolation(_))
        ));
        ledger.olga_correct_and_measure(&[true], false).unwrap();
        assert!(matches!(
            ledger.olga_correct_and_measure(&[true], false),
            Err(Error::ProtocolViolation(_))
        ));
    }

    #[test]
    fn worked_three_ones_example() {
        // x = (1,1,1): S = 3, y_0 = 1. On channel 1 the phase is 3π/2; the
        // correction −π/2 leaves π regardless of the measured sent bits.
        for script in [[false, false, false], [true, false, true], [true, true, true]] {
            let mut ledger = GhzPhaseLedger::new(3, 1).unwrap();
            for _ in 0..3 {
                ledger.sender_rotate(true).unwrap();
            }
            assert_eq!(ledger.phase_units(), 3);
            let mut rng = ScriptedRng::new(&script);
            let mut parity = false;
            for _ in 0..3 {
                parity ^= ledger.sender_measure(&mut rng).unwrap();
            }
            let y1 = ledger.olga_correct_and_measure(&[true], parity).unwrap();
            assert!(y1, "script {script:?}");
        }
    }

    #[test]
    fn residual_check_fires_on_inconsistent_corrections() {
        let mut ledger = GhzPhaseLedger::new(4, 2).unwrap();
        for x in [true, false, false, false] {
            ledger.sender_rotate(x).unwrap();
        }
        let mut rng = ScriptedRng::new(&[false; 4]);
        for _ in 0..4 {
            ledger.sender_measure(&mut rng).unwrap();
        }
        // True prior digits for S=1 are (1,0); feed (0,1) instead.
        assert!(matches!(
            ledger.olga_correct_and_measure(&[false, true], false),
            Err(Error::InternalConsistency(_))
        ));
    }

    #[test]
    fn adder_matches_integer_sum_spot_checks() {
        let t = run_quantum_adder(&bits_of(0b101, 3), 9).unwrap();
        assert_eq!(t.outputs, vec![false, true]); // S = 2
        let t = run_quantum_adder(&[true; 8], 9).unwrap();
        assert_eq!(t.outputs, vec![false, false, false, true]); // S = 8
        let t = run_quantum_adder(&[false; 5], 9).unwrap();
        assert_eq!(t.outputs, vec![false, false, false]);
    }

    #[test]
    fn adder_exhaustive_small_n() {
        for n in 2..=7usize {
            for x in 0..1u32 << n {
                for seed in [1u64, 2, 3] {
                    let t = run_quantum_adder(&bits_of(x, n), seed).unwrap();
                    assert_eq!(t.output_value(), x.count_ones(), "n={n} x={x:b}");
                    assert_eq!(t.channels, channel_count(n));
                    assert_eq!(t.ghz_consumed, ghz_budget(n));
                }
            }
        }
    }

    #[test]
    fn adder_rejects_single_sender() {
        assert!(matches!(
            run_quantum_adder(&[true], 1),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn budgets() {
        assert_eq!(ghz_budget(3), 1);
        assert_eq!(ghz_budget(4), 2);
        assert_eq!(ghz_budget(16), 4);
        assert_eq!(channel_count(3), 2);
        assert_eq!(channel_count(16), 5);
    }

    #[test]
    fn outputs_constant_across_seeds_transcripts_not() {
        let inputs = bits_of(0b10110, 5);
        let reference = run_quantum_adder(&inputs, 0).unwrap();
        let mut distinct_sent = std::collections::HashSet::new();
        for seed in 0..100u64 {
            let t = run_quantum_adder(&inputs, seed).unwrap();
            assert_eq!(t.outputs, reference.outputs);
            distinct_sent.insert(t.sent[1].clone());
        }
        assert!(distinct_sent.len() > 1, "sent bits never varied");
    }

    #[test]
    fn flipped_rotation_sign_breaks_digits() {
        // The sign flip makes the run produce the digits of (−S) mod 2^m, so
        // inputs with 2S ≢ 0 (mod 2^m) must come out wrong.
        let inputs = bits_of(0b0111, 4); // S = 3, −3 ≡ 5 (mod 8)
        let t = run_quantum_adder_with(
            &inputs,
            5,
            RunOptions {
                flip_rotation_sign: true,
            },
        )
        .unwrap();
        assert_eq!(t.output_value(), 5);
    }

    #[test]
    fn transcript_text_round_shape() {
        let t = run_quantum_adder(&bits_of(0b11, 2), 4).unwrap();
        let text = t.to_text();
        assert!(text.starts_with("N=2\nm=2\nseed=4\ninputs=11\n"));
        assert!(text.contains("S=2\nghz_consumed=1\n"));
    }

    #[test]
    fn transcript_received_bits_are_channel_parities() {
        for seed in 0..20u64 {
            let t = run_quantum_adder(&bits_of(0b1011, 4), seed).unwrap();
            for q in 0..t.channels {
                let parity = t.sent[q].iter().fold(false, |acc, &b| acc ^ b);
                assert_eq!(t.received[q], parity);
            }
            assert_eq!(
                t.received[0],
                t.inputs.iter().fold(false, |acc, &b| acc ^ b)
            );
        }
    }
}
