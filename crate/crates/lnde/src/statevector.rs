//! Dense complex-amplitude simulation of the full (N+1)-qubit protocol.
//!
//! This is the slow, independent cross-check for the phase-ledger backend:
//! it stores all 2^{N+1} amplitudes, applies the actual gates, and samples
//! measurements from the actual marginals. Qubit i belongs to sender i for
//! i < N; qubit N is the receiver's. Both backends consume one uniform draw
//! per sender measurement in sender order from the same per-channel PRNG
//! stream, so whole transcripts compare bitwise, not just statistically.

use num_complex::Complex64;
use rand::Rng;

use crate::adder::{channel_count, AdderTranscript};
use crate::bus::ChannelBus;
use crate::error::{Error, Result};

/// Amplitude-vector size cap: 13 qubits = 8192 amplitudes.
pub const MAX_QUBITS: usize = 13;

/// Unit-norm tolerance; the protocol only uses Hadamards and dyadic phase
/// gates, so drift stays many orders below this.
pub const NORM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct DenseState {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl DenseState {
    /// (|0…0⟩ + |1…1⟩)/√2 on `n_qubits` qubits.
    pub fn ghz(n_qubits: usize) -> Result<Self> {
        if n_qubits < 2 {
            return Err(Error::InvalidInput(
                "a GHZ state needs at least two qubits".into(),
            ));
        }
        if n_qubits > MAX_QUBITS {
            return Err(Error::ResourceLimit(format!(
                "{n_qubits} qubits exceed the cap of {MAX_QUBITS}"
            )));
        }
        let dim = 1usize << n_qubits;
        let mut amps = vec![Complex64::ZERO; dim];
        amps[0] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        amps[dim - 1] = amps[0];
        Ok(DenseState { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::InvalidInput(format!(
                "qubit {qubit} out of range ({} qubits)",
                self.n_qubits
            )));
        }
        Ok(())
    }

    /// z-rotation by `angle`: the |1⟩ component of `qubit` gains
    /// e^{−i·angle}, so rotating by −θ multiplies it by e^{iθ}.
    pub fn apply_z_rotation(&mut self, qubit: usize, angle: f64) -> Result<()> {
        self.check_qubit(qubit)?;
        let phase = Complex64::from_polar(1.0, -angle);
        let mask = 1usize << qubit;
        for (idx, amp) in self.amps.iter_mut().enumerate() {
            if idx & mask != 0 {
                *amp *= phase;
            }
        }
        Ok(())
    }

    pub fn apply_hadamard(&mut self, qubit: usize) -> Result<()> {
        self.check_qubit(qubit)?;
        let mask = 1usize << qubit;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for idx in 0..self.amps.len() {
            if idx & mask == 0 {
                let low = self.amps[idx];
                let high = self.amps[idx | mask];
                self.amps[idx] = (low + high) * s;
                self.amps[idx | mask] = (low - high) * s;
            }
        }
        Ok(())
    }

    /// Computational-basis measurement: samples the qubit's marginal,
    /// collapses, and renormalizes.
    pub fn measure_qubit<R: Rng + ?Sized>(&mut self, qubit: usize, rng: &mut R) -> Result<bool> {
        self.check_qubit(qubit)?;
        let mask = 1usize << qubit;
        let mut p0 = 0.0;
        let mut p1 = 0.0;
        for (idx, amp) in self.amps.iter().enumerate() {
            if idx & mask == 0 {
                p0 += amp.norm_sqr();
            } else {
                p1 += amp.norm_sqr();
            }
        }
        let total = p0 + p1;
        if total < 1e-9 {
            return Err(Error::InternalConsistency(
                "state has vanished: both measurement branches have near-zero probability".into(),
            ));
        }
        let outcome = rng.random::<f64>() >= p0 / total;
        let keep = if outcome { p1 } else { p0 };
        let scale = 1.0 / keep.sqrt();
        for (idx, amp) in self.amps.iter_mut().enumerate() {
            if (idx & mask != 0) == outcome {
                *amp *= scale;
            } else {
                *amp = Complex64::ZERO;
            }
        }
        Ok(outcome)
    }

    /// `(index, re, im)` lines for nonzero amplitudes; debugging aid.
    pub fn amplitude_dump(&self) -> String {
        let mut out = String::new();
        for (idx, amp) in self.amps.iter().enumerate() {
            if amp.norm_sqr() > 1e-24 {
                out.push_str(&format!("{idx} {:+.17e} {:+.17e}\n", amp.re, amp.im));
            }
        }
        out
    }
}

fn audit_norm(state: &DenseState) -> Result<()> {
    let drift = (state.norm() - 1.0).abs();
    if drift > NORM_TOLERANCE {
        return Err(Error::InternalConsistency(format!(
            "state norm drifted by {drift:e}"
        )));
    }
    Ok(())
}

/// Run the adder with the identical protocol script as the ledger backend,
/// but on dense states. Transcripts match the ledger run bitwise for the
/// same seed.
pub fn run_adder_statevector(inputs: &[bool], seed: u64) -> Result<AdderTranscript> {
    let n = inputs.len();
    if n < 2 {
        return Err(Error::InvalidInput(
            "the adder needs at least two senders".into(),
        ));
    }
    if n + 1 > MAX_QUBITS {
        return Err(Error::ResourceLimit(format!(
            "statevector backend supports up to {} senders, got {n}",
            MAX_QUBITS - 1
        )));
    }
    let m = channel_count(n);
    let olga = n;
    let mut bus = ChannelBus::new(n, m)?;
    let mut sent: Vec<Vec<bool>> = Vec::with_capacity(m);

    sent.push(inputs.to_vec());
    for (i, &x) in inputs.iter().enumerate() {
        bus.upload(i, 0, x)?;
    }

    let mut pending: Vec<(DenseState, rand_chacha::ChaCha8Rng)> = Vec::with_capacity(m - 1);
    for q in 1..m {
        let mut state = DenseState::ghz(n + 1)?;
        let step = std::f64::consts::PI / f64::from(1u32 << q);
        for (i, &x) in inputs.iter().enumerate() {
            if x {
                state.apply_z_rotation(i, -step)?;
            }
            audit_norm(&state)?;
        }
        for i in 0..n {
            state.apply_hadamard(i)?;
            audit_norm(&state)?;
        }
        let mut rng = crate::adder::channel_rng(seed, q);
        let mut channel_sent = Vec::with_capacity(n);
        for i in 0..n {
            let bit = state.measure_qubit(i, &mut rng)?;
            audit_norm(&state)?;
            bus.upload(i, q, bit)?;
            channel_sent.push(bit);
        }
        sent.push(channel_sent);
        pending.push((state, rng));
    }

    let received = bus.deliver()?;
    let mut outputs = vec![received[0]];
    let mut olga_results = Vec::with_capacity(m - 1);
    for (q, (state, rng)) in pending.iter_mut().enumerate().map(|(i, p)| (i + 1, p)) {
        let correction: u32 = outputs
            .iter()
            .enumerate()
            .map(|(p, &y)| u32::from(y) << p)
            .sum();
        let angle = std::f64::consts::PI * f64::from(correction) / f64::from(1u32 << q);
        state.apply_z_rotation(olga, angle)?;
        audit_norm(state)?;
        state.apply_hadamard(olga)?;
        audit_norm(state)?;
        let result = state.measure_qubit(olga, rng)?;
        audit_norm(state)?;
        olga_results.push(result);
        outputs.push(result ^ received[q]);
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
        ghz_consumed: pending.len(),
    })
}
