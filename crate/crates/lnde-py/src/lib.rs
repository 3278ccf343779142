//! Python bindings: Boolean function analysis, the XOR bus, strategy
//! search, and both adder backends, mirroring the `lnde` crate's public
//! surface.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use lnde::verify::DEFAULT_SEED;
use lnde::{bit_string, parse_bit_string, VerifyOptions};

fn pyerr(err: lnde::Error) -> PyErr {
    match err {
        lnde::Error::InvalidInput(_) => PyValueError::new_err(err.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

/// A Boolean function held as a truth table with its Zhegalkin polynomial.
#[pyclass(name = "BooleanFunction")]
struct PyBooleanFunction {
    inner: lnde::BooleanFunction,
}

#[pymethods]
impl PyBooleanFunction {
    /// Build from a hex truth table, most significant index first.
    #[staticmethod]
    fn from_truth_hex(arity: usize, hex: &str) -> PyResult<Self> {
        let inner =
            lnde::BooleanFunction::from_text(&format!("k={arity}\n{hex}\n")).map_err(pyerr)?;
        Ok(PyBooleanFunction { inner })
    }

    /// The q-th binary digit of the sum of `n` input bits.
    #[staticmethod]
    fn sum_digit(n: usize, q: u32) -> PyResult<Self> {
        Ok(PyBooleanFunction {
            inner: lnde::sum_digit_function(n, q).map_err(pyerr)?,
        })
    }

    fn arity(&self) -> usize {
        self.inner.arity()
    }

    fn evaluate(&self, input: u32) -> PyResult<bool> {
        if (input as usize) >= 1usize << self.inner.arity() {
            return Err(PyValueError::new_err(format!(
                "input {input} out of range for arity {}",
                self.inner.arity()
            )));
        }
        Ok(self.inner.evaluate(input))
    }

    fn degree(&self) -> usize {
        self.inner.algebraic_degree().value()
    }

    fn is_linear(&self) -> bool {
        self.inner.is_linear()
    }

    /// ANF string such as `x0*x2 + x1 + 1`.
    fn anf(&self) -> String {
        self.inner.anf_string()
    }

    fn truth_hex(&self) -> String {
        self.inner.truth_table().to_hex()
    }

    fn text(&self) -> String {
        self.inner.to_text()
    }

    fn __repr__(&self) -> String {
        format!(
            "BooleanFunction(arity={}, tt={})",
            self.inner.arity(),
            self.inner.truth_table().to_hex()
        )
    }
}

/// The m-channel XOR bus.
#[pyclass(name = "ChannelBus")]
struct PyChannelBus {
    inner: lnde::ChannelBus,
}

#[pymethods]
impl PyChannelBus {
    #[new]
    fn new(n_senders: usize, n_channels: usize) -> PyResult<Self> {
        Ok(PyChannelBus {
            inner: lnde::ChannelBus::new(n_senders, n_channels).map_err(pyerr)?,
        })
    }

    fn upload(&mut self, sender: usize, channel: usize, bit: bool) -> PyResult<()> {
        self.inner.upload(sender, channel, bit).map_err(pyerr)
    }

    fn deliver(&mut self) -> PyResult<Vec<bool>> {
        self.inner.deliver().map_err(pyerr)
    }

    fn is_sealed(&self) -> bool {
        self.inner.is_sealed()
    }

    fn transcript(&self) -> String {
        self.inner.transcript_text()
    }
}

/// One adder run, bit for bit.
#[pyclass(name = "AdderTranscript")]
struct PyAdderTranscript {
    inner: lnde::AdderTranscript,
}

#[pymethods]
impl PyAdderTranscript {
    #[getter]
    fn n_senders(&self) -> usize {
        self.inner.n_senders
    }

    #[getter]
    fn channels(&self) -> usize {
        self.inner.channels
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    #[getter]
    fn inputs(&self) -> String {
        bit_string(&self.inner.inputs)
    }

    #[getter]
    fn sent(&self) -> Vec<String> {
        self.inner.sent.iter().map(|bits| bit_string(bits)).collect()
    }

    #[getter]
    fn received(&self) -> String {
        bit_string(&self.inner.received)
    }

    #[getter]
    fn olga_results(&self) -> String {
        bit_string(&self.inner.olga_results)
    }

    #[getter]
    fn outputs(&self) -> String {
        bit_string(&self.inner.outputs)
    }

    #[getter]
    fn ghz_consumed(&self) -> usize {
        self.inner.ghz_consumed
    }

    fn sum(&self) -> u32 {
        self.inner.sum()
    }

    fn output_value(&self) -> u32 {
        self.inner.output_value()
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn __repr__(&self) -> String {
        format!(
            "AdderTranscript(N={}, inputs={}, outputs={}, S={})",
            self.inner.n_senders,
            bit_string(&self.inner.inputs),
            bit_string(&self.inner.outputs),
            self.inner.sum()
        )
    }
}

/// Run the adder on `inputs` (a 0/1 string, x0 first).
#[pyfunction]
#[pyo3(signature = (inputs, seed=None, backend="ledger"))]
fn run_adder(inputs: &str, seed: Option<u64>, backend: &str) -> PyResult<PyAdderTranscript> {
    let bits = parse_bit_string(inputs).map_err(pyerr)?;
    let seed = seed.unwrap_or(DEFAULT_SEED);
    let inner = match backend {
        "ledger" => lnde::run_quantum_adder(&bits, seed).map_err(pyerr)?,
        "statevector" => lnde::run_adder_statevector(&bits, seed).map_err(pyerr)?,
        other => {
            return Err(PyValueError::new_err(format!(
                "backend must be 'ledger' or 'statevector', got {other:?}"
            )))
        }
    };
    Ok(PyAdderTranscript { inner })
}

/// GHZ states one run consumes: floor(log2 N).
#[pyfunction]
fn ghz_budget(n_senders: usize) -> PyResult<usize> {
    if n_senders < 2 {
        return Err(PyValueError::new_err("the adder needs at least two senders"));
    }
    Ok(lnde::ghz_budget(n_senders))
}

/// Channel count for n senders: floor(log2 N) + 1.
#[pyfunction]
fn channel_count(n_senders: usize) -> PyResult<usize> {
    if n_senders < 1 {
        return Err(PyValueError::new_err("need at least one sender"));
    }
    Ok(lnde::channel_count(n_senders))
}

/// Exhaustive realizability search outcome.
#[pyclass(name = "SearchOutcome")]
struct PySearchOutcome {
    #[pyo3(get)]
    feasible: bool,
    #[pyo3(get)]
    strategies_examined: u128,
    #[pyo3(get)]
    witness_taps: Option<Vec<String>>,
    #[pyo3(get)]
    witness_offsets: Option<String>,
    #[pyo3(get)]
    witness_receivers_hex: Option<Vec<String>>,
}

/// Search every classical strategy with `m` channels for the digit s_q of
/// `n` senders.
#[pyfunction]
#[pyo3(signature = (n, q, m=None, budget=None))]
fn search_digit(n: usize, q: u32, m: Option<usize>, budget: Option<u128>) -> PyResult<PySearchOutcome> {
    let target = lnde::sum_digit_function(n, q).map_err(pyerr)?;
    let m = m.unwrap_or_else(|| lnde::channel_count(n));
    let result = lnde::search_realizable(&target, m, budget).map_err(pyerr)?;
    let witness = result.witness.as_ref();
    Ok(PySearchOutcome {
        feasible: result.feasible,
        strategies_examined: result.strategies_examined,
        witness_taps: witness.map(|w| {
            w.taps()
                .iter()
                .map(|&row| {
                    let bits: Vec<bool> = (0..n).map(|i| row >> i & 1 == 1).collect();
                    bit_string(&bits)
                })
                .collect()
        }),
        witness_offsets: witness.map(|w| bit_string(w.offsets())),
        witness_receivers_hex: witness.map(|w| {
            w.receivers()
                .iter()
                .map(|h| h.truth_table().to_hex())
                .collect()
        }),
    })
}

/// Run the invariant suite; returns (name, passed, detail) triples.
#[pyfunction]
#[pyo3(signature = (full=false, seed=None))]
fn verify(full: bool, seed: Option<u64>) -> Vec<(String, bool, String)> {
    let report = lnde::run_verification(&VerifyOptions {
        full,
        seed: seed.unwrap_or(DEFAULT_SEED),
        flip_rotation_sign: false,
    });
    report
        .checks
        .into_iter()
        .map(|c| (c.name.to_string(), c.passed, c.detail))
        .collect()
}

#[pymodule]
fn lnde_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBooleanFunction>()?;
    m.add_class::<PyChannelBus>()?;
    m.add_class::<PyAdderTranscript>()?;
    m.add_class::<PySearchOutcome>()?;
    m.add_function(wrap_pyfunction!(run_adder, m)?)?;
    m.add_function(wrap_pyfunction!(ghz_budget, m)?)?;
    m.add_function(wrap_pyfunction!(channel_count, m)?)?;
    m.add_function(wrap_pyfunction!(search_digit, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add("DEFAULT_SEED", DEFAULT_SEED)?;
    Ok(())
}
