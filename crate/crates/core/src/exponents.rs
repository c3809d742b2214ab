//! Estimators for the asymptotic exponent `v_{b,A}` and the uniform exponent
//! `v̂_{b,A}` of a digit prefix.
//!
//! For every index `j` with `x_{a_j+1}` in `{0, b-1}` the run of that digit
//! ends at the matching time `m'_j`, and `b^-(m'_j - a_j) < ||b^{a_j} xi|| <
//! b^-(m'_j - a_j - 1)`. The record-setting matching times (strictly larger run
//! gaps) form the dominant subsequence, which carries both exponents:
//!
//! * `v  = limsup (m_k - a_{i_k}) / a_{i_k}`
//! * `v̂ = liminf (m_k - a_{i_k}) / a_{i_{k+1} - 1}`
//!
//! On a finite prefix the limits become max/min over the dominant pairs left
//! after a burn-in. Runs still open at the end of the prefix are dropped.

use thiserror::Error;

use crate::digits::{run_blocks, DigitStream, RunBlock};
use crate::rational::to_f64;
use crate::sequences::{default_window, eta_estimate, DenominatorSequence, SequenceError};

/// Fraction of dominant pairs discarded before taking window statistics.
pub const DEFAULT_BURN_IN: f64 = 0.2;

#[derive(Debug, Error)]
pub enum ExponentError {
    #[error("prefix of {prefix_len} digits is shorter than a(1) + 2 = {needed}")]
    PrefixTooShort { prefix_len: usize, needed: u64 },
    #[error("need more than {needed} dominant pairs, have {have}")]
    TooFewPairs { needed: usize, have: usize },
    #[error("grid index {0} exceeds the usable prefix")]
    GridExceedsPrefix(usize),
    #[error("empty grid")]
    EmptyGrid,
    #[error("vhat estimate {vhat} is not below eta {eta}")]
    VhatNotBelowEta { vhat: f64, eta: f64 },
    #[error("burn-in fraction {0} outside [0, 1)")]
    BadBurnIn(f64),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
}

/// One matching time: the digit run after position `a_j` breaks at `end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatchPair {
    /// The index `j` into the denominator sequence.
    pub index: usize,
    /// `a_j`.
    pub start: u64,
    /// `m'_j`, the first position whose digit breaks the run.
    pub end: u64,
}

impl MatchPair {
    /// `m'_j - a_j`.
    pub fn gap(&self) -> u64 {
        self.end - self.start
    }
}

#[derive(Debug, Clone)]
pub struct MatchingTimes {
    pub prefix_len: usize,
    /// Every `j` in `J` whose run closes inside the prefix, in index order.
    pub pairs: Vec<MatchPair>,
    /// Greedy subsequence of `pairs` with strictly increasing gaps.
    pub dominant: Vec<MatchPair>,
    /// First index whose run is still open at the end of the prefix.
    pub truncated_at: Option<usize>,
    /// Largest `j` with `a_j + 1 <= prefix_len`.
    pub last_index: usize,
}

impl MatchingTimes {
    /// `J` has no completed member inside the prefix.
    pub fn is_flagged_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Greedy record chain: the first pair, then each first later pair whose gap
/// beats the current record.
pub fn dominant_subsequence(pairs: &[MatchPair]) -> Vec<MatchPair> {
    let mut out: Vec<MatchPair> = Vec::new();
    for &p in pairs {
        if out.last().is_none_or(|last| p.gap() > last.gap()) {
            out.push(p);
        }
    }
    out
}

pub fn matching_times(stream: &DigitStream, seq: &DenominatorSequence) -> Result<MatchingTimes, ExponentError> {
    let prefix_len = stream.prefix_len();
    let a1 = seq.a(1).expect("sequences have a first term");
    if a1.saturating_add(2) > prefix_len as u64 {
        return Err(ExponentError::PrefixTooShort { prefix_len, needed: a1 + 2 });
    }
    let digits = stream.digits();
    // next_break[i]: 0-based index of the first digit after i that differs
    // from digits[i]; prefix_len when the run reaches the end
    let mut next_break = vec![prefix_len; prefix_len];
    for i in (0..prefix_len.saturating_sub(1)).rev() {
        next_break[i] = if digits[i + 1] != digits[i] { i + 1 } else { next_break[i + 1] };
    }

    let mut pairs = Vec::new();
    let mut truncated_at = None;
    let mut last_index = 0;
    let mut j = 1;
    while let Some(a) = seq.a(j) {
        // the digit x_{a+1} sits at 0-based index a
        let Ok(idx) = usize::try_from(a) else { break };
        if idx >= prefix_len {
            break;
        }
        last_index = j;
        if stream.is_run_digit(digits[idx]) {
            let brk = next_break[idx];
            if brk == prefix_len {
                truncated_at.get_or_insert(j);
            } else {
                pairs.push(MatchPair { index: j, start: a, end: brk as u64 + 1 });
            }
        }
        j += 1;
    }
    let dominant = dominant_subsequence(&pairs);
    Ok(MatchingTimes { prefix_len, pairs, dominant, truncated_at, last_index })
}

/// `max (m_k - a_{i_k}) / a_{i_k}` over the dominant pairs after `burn_in`.
pub fn estimate_v(mt: &MatchingTimes, burn_in: usize) -> Result<f64, ExponentError> {
    if mt.dominant.len() <= burn_in {
        return Err(ExponentError::TooFewPairs { needed: burn_in, have: mt.dominant.len() });
    }
    Ok(mt.dominant[burn_in..].iter().map(|p| p.gap() as f64 / p.start as f64).fold(f64::NEG_INFINITY, f64::max))
}

/// `min (m_k - a_{i_k}) / a(i_{k+1} - 1)` over the dominant pairs after
/// `burn_in` that have a successor.
pub fn estimate_vhat_blocks(
    mt: &MatchingTimes,
    seq: &DenominatorSequence,
    burn_in: usize,
) -> Result<f64, ExponentError> {
    if mt.dominant.len() <= burn_in + 1 {
        return Err(ExponentError::TooFewPairs { needed: burn_in + 1, have: mt.dominant.len() });
    }
    Ok(mt.dominant[burn_in..]
        .windows(2)
        .map(|w| {
            let denom = seq.a(w[1].index - 1).expect("index below a materialized one");
            w[0].gap() as f64 / denom as f64
        })
        .fold(f64::INFINITY, f64::min))
}

/// Finite surrogate of the uniform-exponent definition:
/// `min over N in grid of (max_{n <= N} run(n)) / a_N`, where `run(n)` is
/// `m'_n - a_n` for `n` in `J` and 0 otherwise.
///
/// Refuses grids reaching a run that is still open at the end of the prefix,
/// and grids with `a(max N) + longest run > prefix_len`.
pub fn estimate_vhat_definition(
    stream: &DigitStream,
    seq: &DenominatorSequence,
    grid: &[usize],
) -> Result<f64, ExponentError> {
    let n_max = *grid.iter().max().ok_or(ExponentError::EmptyGrid)?;
    if grid.contains(&0) {
        return Err(ExponentError::GridExceedsPrefix(0));
    }
    let runs = RunLengths::new(stream, seq, n_max).ok_or(ExponentError::GridExceedsPrefix(n_max))?;
    let a_max = seq.a(n_max).ok_or(ExponentError::GridExceedsPrefix(n_max))?;
    if a_max + runs.running_max[n_max] > stream.prefix_len() as u64 {
        return Err(ExponentError::GridExceedsPrefix(n_max));
    }
    Ok(grid
        .iter()
        .map(|&n| runs.running_max[n] as f64 / seq.a(n).expect("checked above") as f64)
        .fold(f64::INFINITY, f64::min))
}

/// Run lengths after each `a_n`, found by locating `x_{a_n+1}` in the maximal
/// run blocks of the stream.
struct RunLengths {
    /// running_max[n] = max_{1 <= i <= n} run(i); index 0 unused.
    running_max: Vec<u64>,
}

impl RunLengths {
    /// `None` if some `n <= n_max` has `a_n + 1` past the prefix or a run
    /// that never closes.
    fn new(stream: &DigitStream, seq: &DenominatorSequence, n_max: usize) -> Option<Self> {
        let blocks = run_blocks(stream);
        let prefix_len = stream.prefix_len();
        let mut running_max = vec![0u64; n_max + 1];
        for n in 1..=n_max {
            let a = seq.a(n)?;
            let pos = usize::try_from(a).ok()? + 1;
            if pos > prefix_len {
                return None;
            }
            let run = match block_containing(&blocks, pos) {
                Some(block) if block.last() == prefix_len => return None,
                // the run breaks at block.last() + 1
                Some(block) => (block.last() + 1) as u64 - a,
                None => 0,
            };
            running_max[n] = running_max[n - 1].max(run);
        }
        Some(Self { running_max })
    }
}

fn block_containing(blocks: &[RunBlock], pos: usize) -> Option<&RunBlock> {
    let i = blocks.partition_point(|b| b.start <= pos);
    let block = blocks.get(i.checked_sub(1)?)?;
    (block.last() >= pos).then_some(block)
}

/// The widest grid `N = first..=last` accepted by
/// [`estimate_vhat_definition`], starting at the dominant index `burn_in`.
pub fn default_vhat_grid(
    stream: &DigitStream,
    seq: &DenominatorSequence,
    mt: &MatchingTimes,
    burn_in: usize,
) -> Vec<usize> {
    let Some(first) = mt.dominant.get(burn_in).map(|p| p.index) else {
        return Vec::new();
    };
    let mut last = match mt.truncated_at {
        Some(t) => t - 1,
        None => mt.last_index,
    };
    let Some(runs) = RunLengths::new(stream, seq, last) else {
        return Vec::new();
    };
    let prefix_len = stream.prefix_len() as u64;
    while last >= first {
        let a = seq.a(last).expect("materialized");
        if a + runs.running_max[last] <= prefix_len {
            break;
        }
        last -= 1;
    }
    (first..=last).collect()
}

/// Whether `v + tol >= v̂ / (eta - v̂)`.
pub fn check_lemma21(v_est: f64, vhat_est: f64, eta: f64, tol: f64) -> Result<bool, ExponentError> {
    if vhat_est >= eta {
        return Err(ExponentError::VhatNotBelowEta { vhat: vhat_est, eta });
    }
    Ok(v_est + tol >= vhat_est / (eta - vhat_est))
}

/// Number of leading pairs dropped for a burn-in `fraction` (rounded up).
pub fn burn_in_count(len: usize, fraction: f64) -> usize {
    ((fraction * len as f64) - 1e-9).ceil().max(0.0) as usize
}

/// Both exponents of one prefix together with the bookkeeping behind them.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentEstimate {
    pub v_est: f64,
    pub vhat_est: f64,
    /// Digits consumed.
    pub depth: usize,
    /// Dominant pairs observed.
    pub k_count: usize,
    /// Dominant pairs discarded.
    pub burn_in: usize,
}

pub fn estimate_exponents(
    stream: &DigitStream,
    seq: &DenominatorSequence,
    burn_in_fraction: f64,
) -> Result<ExponentEstimate, ExponentError> {
    if !(0.0..1.0).contains(&burn_in_fraction) {
        return Err(ExponentError::BadBurnIn(burn_in_fraction));
    }
    let mt = matching_times(stream, seq)?;
    let burn_in = burn_in_count(mt.dominant.len(), burn_in_fraction);
    let v_est = estimate_v(&mt, burn_in)?;
    let vhat_est = estimate_vhat_blocks(&mt, seq, burn_in)?;
    // each block term divides by a(i_{k+1}-1) >= a_{i_k}
    debug_assert!(vhat_est <= v_est + 1e-12);
    Ok(ExponentEstimate { v_est, vhat_est, depth: stream.prefix_len(), k_count: mt.dominant.len(), burn_in })
}

/// Growth-exponent surrogate over the indices a prefix of `depth` digits reaches.
pub fn eta_for_depth(seq: &DenominatorSequence, depth: usize) -> Result<f64, ExponentError> {
    if let Some(eta) = seq.eta_declared() {
        return Ok(to_f64(eta));
    }
    let n_max = seq.last_index_at_most(depth as u64);
    Ok(to_f64(&eta_estimate(seq, n_max, default_window(n_max))?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digits::{digits_from_string, DigitStream};

    /// Digits of sum 2^(-2^k): ones exactly at positions 1, 2, 4, 8, ...
    fn double_exponential(prefix: usize) -> DigitStream {
        let mut digits = vec![0u8; prefix];
        let mut p = 1;
        while p <= prefix {
            digits[p - 1] = 1;
            p *= 2;
        }
        DigitStream::new(2, digits).unwrap()
    }

    fn gaps(pairs: &[MatchPair]) -> Vec<(u64, u64)> {
        pairs.iter().map(|p| (p.start, p.end)).collect()
    }

    #[test]
    fn double_exponential_dominant_pairs() {
        let mt = matching_times(&double_exponential(64), &DenominatorSequence::linear()).unwrap();
        // (2, 4) has the same gap as (1, 3) and so is not a record
        assert_eq!(gaps(&mt.dominant), vec![(1, 3), (4, 8), (8, 16), (16, 32), (32, 64)]);
        for p in &mt.pairs {
            assert!(p.end >= p.start + 2);
        }
    }

    #[test]
    fn equal_gaps_keep_one_dominant_pair() {
        let digits = "1001".repeat(20);
        let s = digits_from_string(&digits, 3).unwrap();
        let mt = matching_times(&s, &DenominatorSequence::linear()).unwrap();
        assert!(mt.pairs.len() > 10);
        assert_eq!(mt.dominant.len(), 1);
    }

    #[test]
    fn no_run_digits_flags_empty() {
        let s = digits_from_string(&"1".repeat(50), 3).unwrap();
        let mt = matching_times(&s, &DenominatorSequence::linear()).unwrap();
        assert!(mt.is_flagged_empty());
        assert!(mt.dominant.is_empty());
        assert!(matches!(estimate_v(&mt, 0), Err(ExponentError::TooFewPairs { .. })));
    }

    #[test]
    fn prefix_too_short() {
        let s = digits_from_string("10", 3).unwrap();
        assert!(matches!(
            matching_times(&s, &DenominatorSequence::linear()),
            Err(ExponentError::PrefixTooShort { .. })
        ));
    }

    #[test]
    fn open_run_is_discarded() {
        let s = digits_from_string("1210000", 3).unwrap();
        let mt = matching_times(&s, &DenominatorSequence::linear()).unwrap();
        // j=1: x_2 = 2 breaks at 3; j=2: x_3 = 1 not in J; j=3..: zeros to the end
        assert_eq!(gaps(&mt.pairs), vec![(1, 3)]);
        assert_eq!(mt.truncated_at, Some(3));
        assert_eq!(mt.last_index, 6);
    }

    #[test]
    fn double_exponential_estimates() {
        let s = double_exponential(1 << 16);
        let seq = DenominatorSequence::linear();
        let mt = matching_times(&s, &seq).unwrap();
        let v = estimate_v(&mt, 2).unwrap();
        assert!((v - 1.0).abs() <= 0.05, "v = {v}");
        let vhat = estimate_vhat_blocks(&mt, &seq, 2).unwrap();
        assert!((vhat - 0.5).abs() <= 0.05, "vhat = {vhat}");
        let grid: Vec<usize> = (8..=15).map(|k| (1 << k) - 1).collect();
        let vdef = estimate_vhat_definition(&s, &seq, &grid).unwrap();
        assert!((vdef - 0.5).abs() <= 0.05, "vhat_def = {vdef}");
    }

    #[test]
    fn definition_estimator_refuses_long_leading_run() {
        let mut text = "0".repeat(2000);
        text.push_str("3141592653");
        let s = digits_from_string(&text, 10).unwrap();
        let seq = DenominatorSequence::linear();
        assert!(matches!(
            estimate_vhat_definition(&s, &seq, &(1..=15).collect::<Vec<_>>()),
            Err(ExponentError::GridExceedsPrefix(15))
        ));
        // a grid entry whose run is still open at the end
        let s = digits_from_string("12100000", 3).unwrap();
        assert!(estimate_vhat_definition(&s, &seq, &[3]).is_err());
        assert!(matches!(estimate_vhat_definition(&s, &seq, &[]), Err(ExponentError::EmptyGrid)));
    }

    #[test]
    fn lemma21_examples() {
        assert!(check_lemma21(1.0, 0.5, 1.0, 0.05).unwrap());
        assert!(!check_lemma21(0.3, 0.5, 1.0, 0.05).unwrap());
        assert!(check_lemma21(0.0, 0.0, 1.0, 0.0).unwrap());
        assert!(check_lemma21(123.0, 0.0, 1.0, 0.0).unwrap());
        assert!(matches!(check_lemma21(1.0, 1.0, 1.0, 0.05), Err(ExponentError::VhatNotBelowEta { .. })));
    }

    #[test]
    fn burn_in_rounds_up() {
        assert_eq!(burn_in_count(10, 0.2), 2);
        assert_eq!(burn_in_count(11, 0.2), 3);
        assert_eq!(burn_in_count(15, 0.2), 3);
        assert_eq!(burn_in_count(6, 0.2), 2);
        assert_eq!(burn_in_count(0, 0.2), 0);
        assert_eq!(burn_in_count(7, 0.0), 0);
    }
}
