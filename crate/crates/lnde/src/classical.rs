//! Deterministic sender strategies over the XOR bus and exhaustive search
//! over them.
//!
//! A strategy is a tap matrix C (which senders feed which channel), one
//! collapsed offset bit per channel, and a local receiver function per
//! output. Only the XOR of the per-sender offsets ever reaches the receiver,
//! so a single offset bit per channel loses no generality.
//!
//! The search space for one output is every (C, B, receiver) triple,
//! `2^(m·N) · 2^m · 2^(2^m)` in total, enumerated in a fixed order: C rows
//! lexicographic (row 0 most significant), then B, then the receiver truth
//! table as an integer.

use rayon::prelude::*;

use crate::boolfn::{BitTable, BooleanFunction, NonlinearityOrder};
use crate::bus::ChannelBus;
use crate::error::{Error, Result};

/// Default cap on the number of (C, B, receiver) triples a sweep may visit.
pub const DEFAULT_SEARCH_BUDGET: u128 = 1 << 28;

/// Largest sender count for which induced truth tables are built (2^N runs).
pub const DEGREE_SWEEP_MAX_SENDERS: usize = 20;

/// One full classical protocol: taps, per-channel offsets, and the
/// receiver's local functions of the delivered bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalStrategy {
    n_senders: usize,
    taps: Vec<u32>,
    offsets: Vec<bool>,
    receivers: Vec<BooleanFunction>,
}

impl ClassicalStrategy {
    pub fn new(
        n_senders: usize,
        taps: Vec<u32>,
        offsets: Vec<bool>,
        receivers: Vec<BooleanFunction>,
    ) -> Result<Self> {
        if n_senders == 0 || n_senders > 32 {
            return Err(Error::InvalidInput(format!(
                "sender count {n_senders} out of range (1..=32)"
            )));
        }
        if taps.is_empty() || taps.len() != offsets.len() {
            return Err(Error::InvalidInput(
                "tap rows and offsets must be non-empty and equally long".into(),
            ));
        }
        let m = taps.len();
        let row_mask = if n_senders == 32 {
            u32::MAX
        } else {
            (1u32 << n_senders) - 1
        };
        if taps.iter().any(|&row| row & !row_mask != 0) {
            return Err(Error::InvalidInput(format!(
                "tap row references senders beyond N={n_senders}"
            )));
        }
        if receivers.is_empty() {
            return Err(Error::InvalidInput("at least one receiver function".into()));
        }
        if receivers.iter().any(|h| h.arity() != m) {
            return Err(Error::InvalidInput(format!(
                "every receiver must have arity m={m}"
            )));
        }
        Ok(ClassicalStrategy {
            n_senders,
            taps,
            offsets,
            receivers,
        })
    }

    pub fn sender_count(&self) -> usize {
        self.n_senders
    }

    pub fn channel_count(&self) -> usize {
        self.taps.len()
    }

    pub fn output_count(&self) -> usize {
        self.receivers.len()
    }

    pub fn taps(&self) -> &[u32] {
        &self.taps
    }

    pub fn offsets(&self) -> &[bool] {
        &self.offsets
    }

    pub fn receivers(&self) -> &[BooleanFunction] {
        &self.receivers
    }

    fn input_mask(&self, inputs: &[bool]) -> Result<u32> {
        if inputs.len() != self.n_senders {
            return Err(Error::InvalidInput(format!(
                "expected {} input bits, got {}",
                self.n_senders,
                inputs.len()
            )));
        }
        Ok(inputs
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | (u32::from(b) << i)))
    }

    fn received_index(&self, x: u32) -> u32 {
        self.taps
            .iter()
            .zip(&self.offsets)
            .enumerate()
            .fold(0, |acc, (j, (&row, &off))| {
                let bit = (row & x).count_ones() & 1 == 1;
                acc | (u32::from(bit ^ off) << j)
            })
    }

    /// Received bits computed algebraically: r_j = (C_j · x) ⊕ B_j.
    pub fn received_bits(&self, inputs: &[bool]) -> Result<Vec<bool>> {
        let x = self.input_mask(inputs)?;
        let r = self.received_index(x);
        Ok((0..self.channel_count()).map(|j| r >> j & 1 == 1).collect())
    }

    /// Output bits without the bus: receivers applied to [`received_bits`].
    ///
    /// [`received_bits`]: Self::received_bits
    pub fn outputs_direct(&self, inputs: &[bool]) -> Result<Vec<bool>> {
        let x = self.input_mask(inputs)?;
        let r = self.received_index(x);
        Ok(self.receivers.iter().map(|h| h.evaluate(r)).collect())
    }

    /// Run the protocol through a [`ChannelBus`]: sender i uploads
    /// `c_{ji}·x_i` to channel j (sender 0 also carries the channel offset),
    /// the delivered bits feed the receiver functions.
    pub fn run(&self, inputs: &[bool]) -> Result<Vec<bool>> {
        self.input_mask(inputs)?;
        let m = self.channel_count();
        let mut bus = ChannelBus::new(self.n_senders, m)?;
        for (j, (&row, &off)) in self.taps.iter().zip(&self.offsets).enumerate() {
            for (i, &input) in inputs.iter().enumerate() {
                let mut bit = row >> i & 1 == 1 && input;
                if i == 0 {
                    bit ^= off;
                }
                bus.upload(i, j, bit)?;
            }
        }
        let received = bus.deliver()?;
        let r = received
            .iter()
            .enumerate()
            .fold(0u32, |acc, (j, &b)| acc | (u32::from(b) << j));
        Ok(self.receivers.iter().map(|h| h.evaluate(r)).collect())
    }

    /// The output bit `output` as a function of the inputs, built by running
    /// the bus protocol on every input tuple.
    pub fn induced_function(&self, output: usize) -> Result<BooleanFunction> {
        if output >= self.output_count() {
            return Err(Error::InvalidInput(format!(
                "output index {output} out of range"
            )));
        }
        if self.n_senders > DEGREE_SWEEP_MAX_SENDERS {
            return Err(Error::ResourceLimit(format!(
                "induced truth table over {} senders exceeds the {} cap",
                self.n_senders, DEGREE_SWEEP_MAX_SENDERS
            )));
        }
        let mut table = BitTable::zeros(1 << self.n_senders);
        let mut inputs = vec![false; self.n_senders];
        for x in 0..1u32 << self.n_senders {
            for (i, slot) in inputs.iter_mut().enumerate() {
                *slot = x >> i & 1 == 1;
            }
            table.set(x as usize, self.run(&inputs)?[output]);
        }
        BooleanFunction::from_truth_table(self.n_senders, table)
    }

    /// Algebraic degree of the induced output; Lemma-bounded by the channel
    /// count.
    pub fn output_degree(&self, output: usize) -> Result<NonlinearityOrder> {
        Ok(self.induced_function(output)?.algebraic_degree())
    }
}

/// Outcome of a realizability search for one target function.
#[derive(Debug, Clone)]
pub struct SearchResult {
    pub feasible: bool,
    pub witness: Option<ClassicalStrategy>,
    pub strategies_examined: u128,
}

/// Size of the single-output strategy space, `2^(m·N + m + 2^m)`, or `None`
/// when it does not fit in a u128.
pub fn strategy_count(n_senders: usize, n_channels: usize) -> Option<u128> {
    if n_channels >= 32 {
        return None;
    }
    let exp = n_channels
        .checked_mul(n_senders)?
        .checked_add(n_channels)?
        .checked_add(1usize.checked_shl(n_channels as u32)?)?;
    if exp >= 128 {
        None
    } else {
        Some(1u128 << exp)
    }
}

fn budget_gate(n_senders: usize, n_channels: usize, budget: Option<u128>) -> Result<u128> {
    if n_senders == 0 || n_channels == 0 {
        return Err(Error::InvalidInput(
            "sender and channel counts must be at least 1".into(),
        ));
    }
    let budget = budget.unwrap_or(DEFAULT_SEARCH_BUDGET);
    match strategy_count(n_senders, n_channels) {
        Some(total) if total <= budget => Ok(total),
        Some(total) => Err(Error::ResourceLimit(format!(
            "strategy space for N={n_senders}, m={n_channels} holds {total} triples, budget is {budget}"
        ))),
        None => Err(Error::ResourceLimit(format!(
            "strategy space for N={n_senders}, m={n_channels} exceeds 2^127 triples, budget is {budget}"
        ))),
    }
}

fn decode_strategy(n: usize, m: usize, index: u128) -> ClassicalStrategy {
    let h_bits = 1usize << m;
    let h_space = 1u128 << h_bits;
    let h_idx = index % h_space;
    let rest = index / h_space;
    let b_idx = (rest % (1u128 << m)) as u32;
    let c_idx = rest >> m;
    let row_mask = (1u128 << n) - 1;
    let taps: Vec<u32> = (0..m)
        .map(|j| ((c_idx >> ((m - 1 - j) * n)) & row_mask) as u32)
        .collect();
    let offsets: Vec<bool> = (0..m).map(|j| b_idx >> (m - 1 - j) & 1 == 1).collect();
    let receiver = BitTable::from_fn(h_bits, |z| h_idx >> z & 1 == 1);
    ClassicalStrategy::new(
        n,
        taps,
        offsets,
        vec![BooleanFunction::from_truth_table(m, receiver).expect("receiver arity checked")],
    )
    .expect("decoded strategy is well-formed")
}

/// Iterator over every (C, B, receiver) triple exactly once, in canonical
/// order.
#[derive(Debug)]
pub struct StrategyEnumeration {
    n: usize,
    m: usize,
    index: u128,
    total: u128,
}

impl StrategyEnumeration {
    pub fn total(&self) -> u128 {
        self.total
    }
}

impl Iterator for StrategyEnumeration {
    type Item = ClassicalStrategy;

    fn next(&mut self) -> Option<Self::Item> {
        if self.index == self.total {
            return None;
        }
        let strategy = decode_strategy(self.n, self.m, self.index);
        self.index += 1;
        Some(strategy)
    }
}

/// Enumerate single-output strategies for `n_senders` and `n_channels`,
/// refusing spaces larger than the budget (default
/// [`DEFAULT_SEARCH_BUDGET`]).
pub fn enumerate_strategies(
    n_senders: usize,
    n_channels: usize,
    budget: Option<u128>,
) -> Result<StrategyEnumeration> {
    let total = budget_gate(n_senders, n_channels, budget)?;
    Ok(StrategyEnumeration {
        n: n_senders,
        m: n_channels,
        index: 0,
        total,
    })
}

// Per (C, B) pair: bit z of the returned mask is the forced receiver value
// on cell z; None when the target is not constant on some cell.
fn forced_receiver(target: &BooleanFunction, taps: &[u32], offsets_mask: u32) -> Option<u64> {
    let m = taps.len();
    let mut seen = vec![0u8; 1 << m]; // 0 unseen, 1 forced-0, 2 forced-1
    for x in 0..1u32 << target.arity() {
        let mut r = 0u32;
        for (j, &row) in taps.iter().enumerate() {
            r |= ((row & x).count_ones() & 1) << j;
        }
        r ^= offsets_mask;
        let want = u8::from(target.evaluate(x)) + 1;
        match seen[r as usize] {
            0 => seen[r as usize] = want,
            v if v == want => {}
            _ => return None,
        }
    }
    Some(
        seen.iter()
            .enumerate()
            .filter(|&(_, &v)| v == 2)
            .fold(0u64, |acc, (z, _)| acc | 1 << z),
    )
}

fn decode_pair(n: usize, m: usize, cb: u64) -> (Vec<u32>, u32) {
    let b_idx = (cb & ((1 << m) - 1)) as u32;
    let c_idx = cb >> m;
    let row_mask = (1u64 << n) - 1;
    let taps: Vec<u32> = (0..m)
        .map(|j| ((c_idx >> ((m - 1 - j) * n)) & row_mask) as u32)
        .collect();
    // Offset mask in received-index order (bit j = channel j).
    let offsets_mask = (0..m).fold(0u32, |acc, j| acc | ((b_idx >> (m - 1 - j) & 1) << j));
    (taps, offsets_mask)
}

/// Exhaustively decide whether any single-output strategy with `n_channels`
/// channels reproduces `target` on every input, returning the first witness
/// in canonical order.
pub fn search_realizable(
    target: &BooleanFunction,
    n_channels: usize,
    budget: Option<u128>,
) -> Result<SearchResult> {
    let n = target.arity();
    let total = budget_gate(n, n_channels, budget)?;
    let m = n_channels;
    let h_bits = 1usize << m;
    let h_space = 1u128 << h_bits;
    let cb_total = total / h_space;
    if cb_total > u64::MAX as u128 {
        return Err(Error::ResourceLimit(
            "pair space exceeds the enumerable range".into(),
        ));
    }

    let hit = (0..cb_total as u64).into_par_iter().find_map_first(|cb| {
        let (taps, offsets_mask) = decode_pair(n, m, cb);
        forced_receiver(target, &taps, offsets_mask).map(|h| (cb, h))
    });

    match hit {
        Some((cb, h_idx)) => {
            let (taps, offsets_mask) = decode_pair(n, m, cb);
            let offsets = (0..m).map(|j| offsets_mask >> j & 1 == 1).collect();
            let receiver = BooleanFunction::from_truth_table(
                m,
                BitTable::from_fn(h_bits, |z| h_idx >> z & 1 == 1),
            )?;
            let witness = ClassicalStrategy::new(n, taps, offsets, vec![receiver])?;
            Ok(SearchResult {
                feasible: true,
                witness: Some(witness),
                strategies_examined: cb as u128 * h_space + h_idx as u128 + 1,
            })
        }
        None => Ok(SearchResult {
            feasible: false,
            witness: None,
            strategies_examined: total,
        }),
    }
}

/// Joint variant: one shared (C, B) must support every target at once, each
/// with its own receiver. The budget bounds the (C, B) pair count here.
#[derive(Debug, Clone)]
pub struct JointSearchResult {
    pub feasible: bool,
    pub witness: Option<ClassicalStrategy>,
    pub pairs_examined: u128,
}

pub fn search_realizable_joint(
    targets: &[BooleanFunction],
    n_channels: usize,
    budget: Option<u128>,
) -> Result<JointSearchResult> {
    let first = targets
        .first()
        .ok_or_else(|| Error::InvalidInput("need at least one target".into()))?;
    let n = first.arity();
    if targets.iter().any(|t| t.arity() != n) {
        return Err(Error::InvalidInput("targets must share one arity".into()));
    }
    let m = n_channels;
    budget_gate(n, m, budget)?;
    let cb_total = 1u64 << (m * n + m);

    let hit = (0..cb_total).into_par_iter().find_map_first(|cb| {
        let (taps, offsets_mask) = decode_pair(n, m, cb);
        targets
            .iter()
            .map(|t| forced_receiver(t, &taps, offsets_mask))
            .collect::<Option<Vec<u64>>>()
            .map(|hs| (cb, hs))
    });

    match hit {
        Some((cb, hs)) => {
            let (taps, offsets_mask) = decode_pair(n, m, cb);
            let offsets = (0..m).map(|j| offsets_mask >> j & 1 == 1).collect();
            let receivers = hs
                .iter()
                .map(|&h| {
                    BooleanFunction::from_truth_table(
                        m,
                        BitTable::from_fn(1 << m, |z| h >> z & 1 == 1),
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(JointSearchResult {
                feasible: true,
                witness: Some(ClassicalStrategy::new(n, taps, offsets, receivers)?),
                pairs_examined: cb as u128 + 1,
            })
        }
        None => Ok(JointSearchResult {
            feasible: false,
            witness: None,
            pairs_examined: cb_total as u128,
        }),
    }
}

/// Result of sweeping every strategy and measuring the induced output
/// degrees against the channel count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaBoundReport {
    pub n_senders: usize,
    pub n_channels: usize,
    pub max_output_degree: usize,
    /// Whether every output stayed at degree ≤ m (must hold).
    pub bound_satisfied: bool,
    /// Whether some strategy reached degree exactly m.
    pub bound_attained: bool,
    pub strategies_examined: u128,
}

/// Exhaustively measure the maximum induced output degree over the whole
/// strategy space. Supports up to 6 senders (the sweep builds word-sized
/// truth tables).
pub fn verify_lemma_bound(
    n_senders: usize,
    n_channels: usize,
    budget: Option<u128>,
) -> Result<LemmaBoundReport> {
    let total = budget_gate(n_senders, n_channels, budget)?;
    if n_senders > 6 {
        return Err(Error::ResourceLimit(format!(
            "lemma sweep supports up to 6 senders, got {n_senders}"
        )));
    }
    let n = n_senders;
    let m = n_channels;
    let h_bits = 1usize << m;
    let cb_total = 1u64 << (m * n + m);

    // Degree of every word truth table, precomputed when small enough.
    let lut: Option<Vec<u8>> = (n <= 4).then(|| {
        (0..1u64 << (1 << n))
            .map(|tt| degree_word(crate::boolfn::moebius_word(tt, n as u32)) as u8)
            .collect()
    });
    let degree_of = |tt: u64| -> usize {
        match &lut {
            Some(lut) => lut[tt as usize] as usize,
            None => degree_word(crate::boolfn::moebius_word(tt, n as u32)),
        }
    };

    let max_degree = (0..cb_total)
        .into_par_iter()
        .map(|cb| {
            let (taps, offsets_mask) = decode_pair(n, m, cb);
            let mut cells = vec![0u64; h_bits];
            for x in 0..1u32 << n {
                let mut r = 0u32;
                for (j, &row) in taps.iter().enumerate() {
                    r |= ((row & x).count_ones() & 1) << j;
                }
                cells[(r ^ offsets_mask) as usize] |= 1 << x;
            }
            let mut local_max = 0usize;
            for h in 0..1u64 << h_bits {
                let mut tt = 0u64;
                let mut bits = h;
                while bits != 0 {
                    let z = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    tt |= cells[z];
                }
                local_max = local_max.max(degree_of(tt));
            }
            local_max
        })
        .reduce(|| 0, usize::max);

    Ok(LemmaBoundReport {
        n_senders,
        n_channels,
        max_output_degree: max_degree,
        bound_satisfied: max_degree <= m,
        bound_attained: max_degree == m,
        strategies_examined: total,
    })
}

fn degree_word(anf: u64) -> usize {
    let mut bits = anf;
    let mut max = 0;
    while bits != 0 {
        let idx = bits.trailing_zeros();
        bits &= bits - 1;
        max = max.max(idx.count_ones() as usize);
    }
    max
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::sum_digit_function;
    use proptest::prelude::*;

    fn projection(m: usize, j: usize) -> BooleanFunction {
        BooleanFunction::from_fn(m, move |r| r >> j & 1 == 1).unwrap()
    }

    fn bits_of(x: u32, n: usize) -> Vec<bool> {
        (0..n).map(|i| x >> i & 1 == 1).collect()
    }

    #[test]
    fn parity_strategy() {
        let strategy =
            ClassicalStrategy::new(4, vec![0b1111], vec![false], vec![projection(1, 0)]).unwrap();
        for x in 0..16u32 {
            let out = strategy.run(&bits_of(x, 4)).unwrap();
            assert_eq!(out, vec![x.count_ones() % 2 == 1]);
        }
        assert_eq!(strategy.output_degree(0).unwrap().value(), 1);
    }

    #[test]
    fn product_of_two_forms() {
        // r_0 = a^c, r_1 = b^c, output = r_0 * r_1 = ab ^ ac ^ bc ^ c.
        let and2 = BooleanFunction::from_fn(2, |r| r == 3).unwrap();
        let strategy =
            ClassicalStrategy::new(3, vec![0b101, 0b110], vec![false, false], vec![and2]).unwrap();
        for x in 0..8u32 {
            let bit = |i: u32| x >> i & 1 == 1;
            let expected = (bit(0) & bit(1)) ^ (bit(0) & bit(2)) ^ (bit(1) & bit(2)) ^ bit(2);
            assert_eq!(strategy.run(&bits_of(x, 3)).unwrap(), vec![expected]);
        }
        assert_eq!(strategy.output_degree(0).unwrap().value(), 2);
    }

    #[test]
    fn degenerate_taps_give_constant() {
        let strategy = ClassicalStrategy::new(
            3,
            vec![0, 0],
            vec![true, false],
            vec![projection(2, 0)],
        )
        .unwrap();
        for x in 0..8u32 {
            assert_eq!(strategy.run(&bits_of(x, 3)).unwrap(), vec![true]);
        }
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let strategy =
            ClassicalStrategy::new(3, vec![0b111], vec![false], vec![projection(1, 0)]).unwrap();
        assert!(matches!(
            strategy.run(&[true, false]),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(strategy_count(3, 2), Some(4096));
        assert_eq!(strategy_count(1, 1), Some(16));
        assert_eq!(enumerate_strategies(1, 1, None).unwrap().count(), 16);
        assert_eq!(enumerate_strategies(3, 2, None).unwrap().count(), 4096);
    }

    #[test]
    fn enumeration_budget_rule() {
        let err = enumerate_strategies(10, 5, None).unwrap_err();
        match err {
            Error::ResourceLimit(msg) => {
                assert!(msg.contains("154742504910672534362390528"), "{msg}");
            }
            other => panic!("expected resource limit, got {other:?}"),
        }
    }

    #[test]
    fn enumeration_yields_distinct_triples() {
        let mut seen = std::collections::HashSet::new();
        for s in enumerate_strategies(2, 1, None).unwrap() {
            let key = (
                s.taps().to_vec(),
                s.offsets().to_vec(),
                s.receivers()[0].truth_table().to_hex(),
            );
            assert!(seen.insert(key));
        }
        assert_eq!(seen.len(), 32);
    }

    #[test]
    fn search_finds_parity_witness() {
        let s0 = sum_digit_function(3, 0).unwrap();
        let result = search_realizable(&s0, 1, None).unwrap();
        assert!(result.feasible);
        let witness = result.witness.unwrap();
        assert_eq!(witness.taps(), &[0b111]);
        assert_eq!(witness.offsets(), &[false]);
        assert_eq!(witness.receivers()[0].truth_table().to_hex(), "2");
        for x in 0..8u32 {
            assert_eq!(witness.run(&bits_of(x, 3)).unwrap()[0], s0.evaluate(x));
        }
    }

    #[test]
    fn majority_digit_is_unreachable_with_two_channels() {
        let s1 = sum_digit_function(3, 1).unwrap();
        let result = search_realizable(&s1, 2, None).unwrap();
        assert!(!result.feasible);
        assert_eq!(result.strategies_examined, 4096);
    }

    #[test]
    fn constructed_product_target_is_reachable() {
        let target = BooleanFunction::from_fn(3, |x| {
            let bit = |i: u32| x >> i & 1 == 1;
            (bit(0) ^ bit(2)) & (bit(1) ^ bit(2))
        })
        .unwrap();
        let result = search_realizable(&target, 2, None).unwrap();
        assert!(result.feasible);
        let witness = result.witness.unwrap();
        for x in 0..8u32 {
            assert_eq!(witness.run(&bits_of(x, 3)).unwrap()[0], target.evaluate(x));
        }
    }

    // Independent route: scan the public enumeration with the bus protocol
    // and compare against the partition-based search.
    #[test]
    fn search_agrees_with_naive_enumeration() {
        for (target, expect) in [
            (sum_digit_function(3, 1).unwrap(), false),
            (sum_digit_function(3, 0).unwrap(), true),
        ] {
            let mut naive_first: Option<u128> = None;
            for (idx, strategy) in enumerate_strategies(3, 2, None).unwrap().enumerate() {
                let reproduces = (0..8u32).all(|x| {
                    strategy.run(&bits_of(x, 3)).unwrap()[0] == target.evaluate(x)
                });
                if reproduces {
                    naive_first = Some(idx as u128);
                    break;
                }
            }
            let result = search_realizable(&target, 2, None).unwrap();
            assert_eq!(result.feasible, expect);
            assert_eq!(naive_first.is_some(), expect);
            if let Some(idx) = naive_first {
                assert_eq!(result.strategies_examined, idx + 1);
            }
        }
    }

    #[test]
    fn joint_search_shares_taps() {
        let parity = sum_digit_function(3, 0).unwrap();
        let gated = BooleanFunction::from_fn(3, |x| {
            (x.count_ones() % 2 == 1) & (x & 1 == 1)
        })
        .unwrap();
        let joint = search_realizable_joint(&[parity.clone(), gated], 2, None).unwrap();
        assert!(joint.feasible);
        let witness = joint.witness.unwrap();
        assert_eq!(witness.output_count(), 2);

        let s1 = sum_digit_function(3, 1).unwrap();
        let blocked = search_realizable_joint(&[parity, s1], 2, None).unwrap();
        assert!(!blocked.feasible);
    }

    #[test]
    fn lemma_bound_small_cases() {
        let report = verify_lemma_bound(2, 1, None).unwrap();
        assert_eq!(report.max_output_degree, 1);
        assert!(report.bound_satisfied && report.bound_attained);

        let report = verify_lemma_bound(3, 2, None).unwrap();
        assert_eq!(report.max_output_degree, 2);
        assert!(report.bound_satisfied && report.bound_attained);
        assert_eq!(report.strategies_examined, 4096);
    }

    #[test]
    fn induced_degree_never_exceeds_channel_count_sampled() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..50 {
            let taps: Vec<u32> = (0..3).map(|_| rng.random_range(0..16)).collect();
            let offsets: Vec<bool> = (0..3).map(|_| rng.random()).collect();
            let receiver = BooleanFunction::from_fn(3, |_| rng.random()).unwrap();
            let strategy = ClassicalStrategy::new(4, taps, offsets, vec![receiver]).unwrap();
            assert!(strategy.output_degree(0).unwrap().value() <= 3);
        }
    }

    #[test]
    fn offset_collapse_is_lossless() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        let (n, m) = (4usize, 2usize);
        for _ in 0..20 {
            let taps: Vec<u32> = (0..m).map(|_| rng.random_range(0..16)).collect();
            let per_sender_offsets: Vec<Vec<bool>> =
                (0..m).map(|_| (0..n).map(|_| rng.random()).collect()).collect();
            let receiver = BooleanFunction::from_fn(m, |_| rng.random()).unwrap();
            let collapsed: Vec<bool> = per_sender_offsets
                .iter()
                .map(|row| row.iter().fold(false, |acc, &b| acc ^ b))
                .collect();
            let strategy =
                ClassicalStrategy::new(n, taps.clone(), collapsed, vec![receiver.clone()])
                    .unwrap();

            for x in 0..1u32 << n {
                let inputs = bits_of(x, n);
                // Full per-sender offset matrix routed through the bus.
                let mut bus = ChannelBus::new(n, m).unwrap();
                for (j, &row) in taps.iter().enumerate() {
                    for i in 0..n {
                        let bit = (row >> i & 1 == 1 && inputs[i]) ^ per_sender_offsets[j][i];
                        bus.upload(i, j, bit).unwrap();
                    }
                }
                let received = bus.deliver().unwrap();
                let r = received
                    .iter()
                    .enumerate()
                    .fold(0u32, |acc, (j, &b)| acc | (u32::from(b) << j));
                assert_eq!(receiver.evaluate(r), strategy.run(&inputs).unwrap()[0]);
            }
        }
    }

    proptest! {
        // The bus route and the direct algebraic route agree everywhere.
        #[test]
        fn bus_matches_direct_evaluation(
            n in 1usize..6,
            m in 1usize..4,
            seed: u64,
            x in 0u32..32,
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let taps: Vec<u32> = (0..m).map(|_| rng.random_range(0..1u32 << n)).collect();
            let offsets: Vec<bool> = (0..m).map(|_| rng.random()).collect();
            let receivers: Vec<BooleanFunction> = (0..2)
                .map(|_| BooleanFunction::from_fn(m, |_| rng.random()).unwrap())
                .collect();
            let strategy = ClassicalStrategy::new(n, taps, offsets, receivers).unwrap();
            let inputs = bits_of(x & ((1 << n) - 1), n);
            prop_assert_eq!(
                strategy.run(&inputs).unwrap(),
                strategy.outputs_direct(&inputs).unwrap()
            );
        }
    }
}
