//! Boolean functions of up to [`MAX_ARITY`] variables: packed truth tables,
//! algebraic normal form (Zhegalkin polynomial) via the Möbius transform, the
//! algebraic degree, and the binary digit functions of an integer sum.
//!
//! Index convention: the input tuple `(x_0, …, x_{k-1})` maps to the table
//! index `Σ x_i · 2^i` (`x_0` least significant). A monomial index `m` stands
//! for the product of all `x_i` with bit `i` of `m` set; index 0 is the empty
//! (constant) monomial.

use std::fmt;

use once_cell::sync::OnceCell;

use crate::error::{Error, Result};

/// Arity cap; a 2^24-bit table is 2 MiB packed, which is as large as any
/// desk-scale sweep here needs.
pub const MAX_ARITY: usize = 24;

/// A packed vector of bits indexed by input tuple or by monomial mask.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitTable {
    len: usize,
    words: Vec<u64>,
}

impl BitTable {
    pub fn zeros(len: usize) -> Self {
        BitTable {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut table = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            table.set(i, b);
        }
        table
    }

    pub fn from_fn(len: usize, mut f: impl FnMut(usize) -> bool) -> Self {
        let mut table = Self::zeros(len);
        for i in 0..len {
            table.set(i, f(i));
        }
        table
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, index: usize) -> bool {
        assert!(index < self.len, "bit index {index} out of range");
        self.words[index / 64] >> (index % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, index: usize, value: bool) {
        assert!(index < self.len, "bit index {index} out of range");
        let mask = 1u64 << (index % 64);
        if value {
            self.words[index / 64] |= mask;
        } else {
            self.words[index / 64] &= !mask;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Indices of set bits, ascending.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let b = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    /// Hex rendering, most significant index first. Tables shorter than four
    /// bits still occupy one digit.
    pub fn to_hex(&self) -> String {
        let digits = self.len.div_ceil(4).max(1);
        let mut out = String::with_capacity(digits);
        for d in (0..digits).rev() {
            let mut nibble = 0u8;
            for b in 0..4 {
                let idx = d * 4 + b;
                if idx < self.len && self.get(idx) {
                    nibble |= 1 << b;
                }
            }
            out.push(char::from_digit(nibble as u32, 16).unwrap());
        }
        out
    }

    /// Parse the [`to_hex`](Self::to_hex) rendering of a table of `len` bits.
    pub fn from_hex(len: usize, hex: &str) -> Result<Self> {
        let digits = len.div_ceil(4).max(1);
        if hex.len() != digits {
            return Err(Error::InvalidInput(format!(
                "expected {digits} hex digits for a {len}-bit table, got {}",
                hex.len()
            )));
        }
        let mut table = Self::zeros(len);
        for (pos, c) in hex.chars().enumerate() {
            let nibble = c.to_digit(16).ok_or_else(|| {
                Error::InvalidInput(format!("bad hex digit {c:?} in truth table"))
            })? as usize;
            let d = digits - 1 - pos;
            for b in 0..4 {
                let idx = d * 4 + b;
                if nibble >> b & 1 == 1 {
                    if idx >= len {
                        return Err(Error::InvalidInput(format!(
                            "hex table sets bit {idx} beyond length {len}"
                        )));
                    }
                    table.set(idx, true);
                }
            }
        }
        Ok(table)
    }
}

impl fmt::Debug for BitTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitTable[{}]({})", self.len, self.to_hex())
    }
}

// Intra-word butterfly masks: MASKS[i] selects positions whose bit i is 0.
const MASKS: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0f0f_0f0f_0f0f_0f0f,
    0x00ff_00ff_00ff_00ff,
    0x0000_ffff_0000_ffff,
    0x0000_0000_ffff_ffff,
];

fn butterfly_in_place(words: &mut [u64], k: u32) {
    for i in 0..k.min(6) {
        let shift = 1usize << i;
        let mask = MASKS[i as usize];
        for w in words.iter_mut() {
            *w ^= (*w & mask) << shift;
        }
    }
    for i in 6..k {
        let step = 1usize << (i - 6);
        let mut base = 0;
        while base < words.len() {
            for off in 0..step {
                let low = words[base + off];
                words[base + step + off] ^= low;
            }
            base += step * 2;
        }
    }
}

/// Möbius transform of a word-sized table (arity ≤ 6) held in the low
/// `2^k` bits; higher bits must be zero.
pub(crate) fn moebius_word(table: u64, k: u32) -> u64 {
    debug_assert!(k <= 6);
    let mut t = table;
    for i in 0..k {
        t ^= (t & MASKS[i as usize]) << (1usize << i);
    }
    t
}

/// The Möbius transform over GF(2): truth table to Zhegalkin coefficients.
///
/// The transform is an involution, so applying it to an ANF coefficient
/// table recovers the truth table.
pub fn moebius_transform(table: &BitTable) -> Result<BitTable> {
    if !table.len().is_power_of_two() {
        return Err(Error::InvalidInput(format!(
            "table length {} is not a power of two",
            table.len()
        )));
    }
    let mut out = table.clone();
    butterfly_in_place(&mut out.words, out.len.trailing_zeros());
    Ok(out)
}

/// Inverse direction of [`moebius_transform`] (the same butterfly).
pub fn anf_to_truth_table(coefficients: &BitTable) -> Result<BitTable> {
    moebius_transform(coefficients)
}

/// Algebraic degree of a Boolean function: the largest number of variables
/// combined in a monomial with nonzero ANF coefficient. Constants have
/// order 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NonlinearityOrder(usize);

impl NonlinearityOrder {
    pub fn new(value: usize) -> Self {
        NonlinearityOrder(value)
    }

    pub fn value(self) -> usize {
        self.0
    }
}

impl fmt::Display for NonlinearityOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A Boolean function of `arity` variables, stored as a packed truth table
/// with the ANF coefficient table derived on first use.
#[derive(Clone)]
pub struct BooleanFunction {
    arity: usize,
    truth: BitTable,
    anf: OnceCell<BitTable>,
}

impl BooleanFunction {
    pub fn from_truth_table(arity: usize, truth: BitTable) -> Result<Self> {
        check_arity(arity)?;
        if truth.len() != 1 << arity {
            return Err(Error::InvalidInput(format!(
                "truth table has {} bits, arity {arity} needs {}",
                truth.len(),
                1usize << arity
            )));
        }
        Ok(BooleanFunction {
            arity,
            truth,
            anf: OnceCell::new(),
        })
    }

    pub fn from_anf(arity: usize, coefficients: BitTable) -> Result<Self> {
        check_arity(arity)?;
        if coefficients.len() != 1 << arity {
            return Err(Error::InvalidInput(format!(
                "ANF table has {} bits, arity {arity} needs {}",
                coefficients.len(),
                1usize << arity
            )));
        }
        let truth = anf_to_truth_table(&coefficients)?;
        let cell = OnceCell::new();
        cell.set(coefficients).ok();
        Ok(BooleanFunction {
            arity,
            truth,
            anf: cell,
        })
    }

    pub fn from_fn(arity: usize, mut f: impl FnMut(u32) -> bool) -> Result<Self> {
        check_arity(arity)?;
        Ok(BooleanFunction {
            arity,
            truth: BitTable::from_fn(1 << arity, |i| f(i as u32)),
            anf: OnceCell::new(),
        })
    }

    pub fn constant(arity: usize, value: bool) -> Result<Self> {
        Self::from_fn(arity, |_| value)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn truth_table(&self) -> &BitTable {
        &self.truth
    }

    /// Zhegalkin coefficient table, derived lazily and cached.
    pub fn anf_table(&self) -> &BitTable {
        self.anf
            .get_or_init(|| moebius_transform(&self.truth).expect("table length is a power of two"))
    }

    pub fn evaluate(&self, input: u32) -> bool {
        assert!(
            (input as usize) < (1usize << self.arity),
            "input {input} out of range for arity {}",
            self.arity
        );
        self.truth.get(input as usize)
    }

    /// Monomial masks with nonzero ANF coefficient, ascending.
    pub fn anf_monomials(&self) -> Vec<u32> {
        self.anf_table().iter_ones().map(|m| m as u32).collect()
    }

    pub fn algebraic_degree(&self) -> NonlinearityOrder {
        let degree = self
            .anf_table()
            .iter_ones()
            .map(|m| m.count_ones() as usize)
            .max()
            .unwrap_or(0);
        NonlinearityOrder(degree)
    }

    /// True iff the algebraic degree is at most 1 (constants included).
    pub fn is_linear(&self) -> bool {
        self.algebraic_degree().value() <= 1
    }

    /// ANF rendered as monomials sorted by descending degree, then by
    /// variable list, e.g. `x0*x2 + x1 + 1`. The zero function prints `0`.
    pub fn anf_string(&self) -> String {
        let mut monomials: Vec<Vec<usize>> = self
            .anf_table()
            .iter_ones()
            .map(|m| (0..self.arity).filter(|&i| m >> i & 1 == 1).collect())
            .collect();
        if monomials.is_empty() {
            return "0".to_string();
        }
        monomials.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        monomials
            .iter()
            .map(|vars| {
                if vars.is_empty() {
                    "1".to_string()
                } else {
                    vars.iter()
                        .map(|v| format!("x{v}"))
                        .collect::<Vec<_>>()
                        .join("*")
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// Two-line text form: `k=<arity>` then the truth table as hex, most
    /// significant index first.
    pub fn to_text(&self) -> String {
        format!("k={}\n{}\n", self.arity, self.truth.to_hex())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidInput("empty function text".into()))?;
        let arity: usize = header
            .strip_prefix("k=")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::InvalidInput(format!("expected `k=<arity>`, got {header:?}")))?;
        check_arity(arity)?;
        let hex = lines
            .next()
            .ok_or_else(|| Error::InvalidInput("missing truth table line".into()))?;
        let truth = BitTable::from_hex(1 << arity, hex)?;
        Self::from_truth_table(arity, truth)
    }
}

impl PartialEq for BooleanFunction {
    fn eq(&self, other: &Self) -> bool {
        self.arity == other.arity && self.truth == other.truth
    }
}

impl Eq for BooleanFunction {}

impl fmt::Debug for BooleanFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BooleanFunction(k={}, tt={})", self.arity, self.truth.to_hex())
    }
}

fn check_arity(arity: usize) -> Result<()> {
    if arity > MAX_ARITY {
        return Err(Error::ResourceLimit(format!(
            "arity {arity} exceeds the cap of {MAX_ARITY}"
        )));
    }
    Ok(())
}

/// The q-th binary digit of `S = Σ x_i` as a Boolean function of the
/// `n_senders` input bits. Its algebraic degree is `2^q`.
pub fn sum_digit_function(n_senders: usize, digit: u32) -> Result<BooleanFunction> {
    if n_senders == 0 {
        return Err(Error::InvalidInput("sender count must be at least 1".into()));
    }
    check_arity(n_senders)?;
    let top = n_senders.ilog2();
    if digit > top {
        return Err(Error::InvalidInput(format!(
            "digit index {digit} out of range for {n_senders} senders (max {top})"
        )));
    }
    BooleanFunction::from_fn(n_senders, |x| x.count_ones() >> digit & 1 == 1)
}
