//! Restricted denominator sequences `A = (a_n)` and their growth exponent.

use std::fmt;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use num_traits::{One, ToPrimitive};
use thiserror::Error;

use crate::rational::{self, parse_rational, Rational};

/// Geometric tables stop once values exceed this.
pub const GEOMETRIC_VALUE_CAP: u64 = 1 << 62;
/// ... or once this many terms have been produced.
pub const GEOMETRIC_LEN_CAP: usize = 10_000_000;

#[derive(Debug, Error)]
pub enum SequenceError {
    #[error("malformed sequence spec `{0}`")]
    Malformed(String),
    #[error("geometric ratio must exceed 1, got {0}")]
    RatioTooSmall(String),
    #[error("explicit sequence is not strictly increasing at line {0}")]
    NotIncreasing(usize),
    #[error("explicit sequence has a non-positive or unparsable entry at line {0}")]
    BadEntry(usize),
    #[error("explicit sequence is empty")]
    Empty,
    #[error("eta estimate needs n_max >= 2, got {0}")]
    TooFewTerms(usize),
    #[error("window {window} must be in 1..=n_max-1 (n_max = {n_max})")]
    BadWindow { window: usize, n_max: usize },
    #[error("a({0}) is beyond the materialized sequence")]
    OutOfRange(usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub enum SequenceKind {
    /// `a_n = n`
    Linear,
    /// `a_n = n^degree`
    Polynomial {
        degree: u32,
    },
    /// `a_1 = seed`, `a_{n+1} = max(a_n + 1, round(eta * a_n))`
    Geometric {
        eta: Rational,
        seed: u64,
    },
    Explicit,
}

/// Strictly increasing sequence of positive integers, indexed from 1.
#[derive(Debug, Clone)]
pub struct DenominatorSequence {
    kind: SequenceKind,
    table: Option<Arc<[u64]>>,
}

impl DenominatorSequence {
    pub fn linear() -> Self {
        Self { kind: SequenceKind::Linear, table: None }
    }

    pub fn polynomial(degree: u32) -> Result<Self, SequenceError> {
        if degree < 2 {
            return Err(SequenceError::Malformed(format!("poly:d={degree}")));
        }
        Ok(Self { kind: SequenceKind::Polynomial { degree }, table: None })
    }

    pub fn geometric(eta: Rational, seed: u64) -> Result<Self, SequenceError> {
        if eta <= Rational::one() {
            return Err(SequenceError::RatioTooSmall(rational::display(&eta)));
        }
        if seed == 0 {
            return Err(SequenceError::Malformed("geometric seed a1 must be >= 1".into()));
        }
        let p = eta.numer().to_u128();
        let q = eta.denom().to_u128();
        let (p, q) = match (p, q) {
            (Some(p), Some(q)) if p < 1 << 60 && q < 1 << 60 => (p, q),
            _ => return Err(SequenceError::Malformed("geometric ratio too large".into())),
        };
        let mut values = vec![seed];
        let mut a = u128::from(seed);
        while values.len() < GEOMETRIC_LEN_CAP {
            // round half up: floor(eta * a + 1/2)
            let rounded = (2 * p * a + q) / (2 * q);
            let next = rounded.max(a + 1);
            if next > u128::from(GEOMETRIC_VALUE_CAP) {
                break;
            }
            values.push(next as u64);
            a = next;
        }
        Ok(Self { kind: SequenceKind::Geometric { eta, seed }, table: Some(values.into()) })
    }

    pub fn explicit(values: Vec<u64>) -> Result<Self, SequenceError> {
        if values.is_empty() {
            return Err(SequenceError::Empty);
        }
        if values[0] == 0 {
            return Err(SequenceError::BadEntry(1));
        }
        if let Some(i) = values.windows(2).position(|w| w[1] <= w[0]) {
            return Err(SequenceError::NotIncreasing(i + 2));
        }
        Ok(Self { kind: SequenceKind::Explicit, table: Some(values.into()) })
    }

    /// One positive integer per line, strictly increasing; blank lines ignored.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, SequenceError> {
        let text = fs::read_to_string(path)?;
        let mut values = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let v: u64 = line.parse().map_err(|_| SequenceError::BadEntry(i + 1))?;
            if v == 0 {
                return Err(SequenceError::BadEntry(i + 1));
            }
            if values.last().is_some_and(|&last| v <= last) {
                return Err(SequenceError::NotIncreasing(i + 1));
            }
            values.push(v);
        }
        Self::explicit(values)
    }

    pub fn kind(&self) -> &SequenceKind {
        &self.kind
    }

    /// The exact ratio a geometric sequence was built with.
    pub fn eta_declared(&self) -> Option<&Rational> {
        match &self.kind {
            SequenceKind::Geometric { eta, .. } => Some(eta),
            _ => None,
        }
    }

    /// `lim a_{n+1}/a_n` when it is known from the kind alone.
    pub fn eta_limit(&self) -> Option<Rational> {
        match &self.kind {
            SequenceKind::Linear | SequenceKind::Polynomial { .. } => Some(Rational::one()),
            SequenceKind::Geometric { eta, .. } => Some(eta.clone()),
            SequenceKind::Explicit => None,
        }
    }

    /// `a(n)` for `n >= 1`, or `None` past the supported range.
    pub fn a(&self, n: usize) -> Option<u64> {
        if n == 0 {
            return None;
        }
        match &self.kind {
            SequenceKind::Linear => u64::try_from(n).ok(),
            SequenceKind::Polynomial { degree } => u64::try_from(n).ok()?.checked_pow(*degree),
            _ => self.table.as_ref()?.get(n - 1).copied(),
        }
    }

    /// Largest materialized index, if the sequence is finite.
    pub fn materialized_len(&self) -> Option<usize> {
        self.table.as_ref().map(|t| t.len())
    }

    /// Smallest `n` with `a(n) > value`.
    pub fn first_index_above(&self, value: u64) -> Option<usize> {
        // gallop to an upper bound, then bisect; `None` counts as +infinity
        let above = |n: usize| self.a(n).is_none_or(|a| a > value);
        if above(1) {
            return self.a(1).map(|_| 1);
        }
        let mut lo = 1;
        let mut hi = 2;
        while !above(hi) {
            lo = hi;
            hi = hi.checked_mul(2)?;
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if above(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        self.a(hi).map(|_| hi)
    }

    /// Largest `n` with `a(n) <= value` (0 when even `a(1)` is larger).
    pub fn last_index_at_most(&self, value: u64) -> usize {
        match self.first_index_above(value) {
            Some(n) => n - 1,
            // every materialized term is <= value
            None => self.materialized_len().unwrap_or(0),
        }
    }
}

impl fmt::Display for DenominatorSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            SequenceKind::Linear => write!(f, "linear"),
            SequenceKind::Polynomial { degree } => write!(f, "poly:d={degree}"),
            SequenceKind::Geometric { eta, seed } => {
                write!(f, "geometric:eta={},a1={seed}", rational::display(eta))
            }
            SequenceKind::Explicit => write!(f, "explicit({} terms)", self.materialized_len().unwrap_or(0)),
        }
    }
}

/// Builds a sequence from `linear`, `poly:d=<d>`, `geometric:eta=<p/q>,a1=<n>`
/// or `file:<path>`.
pub fn make_sequence(spec: &str) -> Result<DenominatorSequence, SequenceError> {
    let spec = spec.trim();
    let malformed = || SequenceError::Malformed(spec.to_string());
    if spec == "linear" {
        return Ok(DenominatorSequence::linear());
    }
    if let Some(rest) = spec.strip_prefix("poly:") {
        let degree = rest.strip_prefix("d=").and_then(|d| d.parse::<u32>().ok()).ok_or_else(malformed)?;
        return DenominatorSequence::polynomial(degree).map_err(|_| malformed());
    }
    if let Some(rest) = spec.strip_prefix("geometric:") {
        let mut eta = None;
        let mut seed = None;
        for part in rest.split(',') {
            match part.trim().split_once('=') {
                Some(("eta", v)) if eta.is_none() => {
                    eta = Some(parse_rational(v).map_err(|_| malformed())?);
                }
                Some(("a1", v)) if seed.is_none() => {
                    seed = Some(v.trim().parse::<u64>().map_err(|_| malformed())?);
                }
                _ => return Err(malformed()),
            }
        }
        let (eta, seed) = eta.zip(seed).ok_or_else(malformed)?;
        return DenominatorSequence::geometric(eta, seed);
    }
    if let Some(path) = spec.strip_prefix("file:") {
        return DenominatorSequence::from_file(path);
    }
    Err(malformed())
}

/// Finite limsup surrogate: `max a(n+1)/a(n)` over the last `window` ratios
/// ending at `a(n_max)`.
pub fn eta_estimate(seq: &DenominatorSequence, n_max: usize, window: usize) -> Result<Rational, SequenceError> {
    if n_max < 2 {
        return Err(SequenceError::TooFewTerms(n_max));
    }
    if window == 0 || window > n_max - 1 {
        return Err(SequenceError::BadWindow { window, n_max });
    }
    let mut best: Option<Rational> = None;
    for n in (n_max - window)..n_max {
        let lo = seq.a(n).ok_or(SequenceError::OutOfRange(n))?;
        let hi = seq.a(n + 1).ok_or(SequenceError::OutOfRange(n + 1))?;
        let r = Rational::new(hi.into(), lo.into());
        if best.as_ref().is_none_or(|b| &r > b) {
            best = Some(r);
        }
    }
    Ok(best.expect("window is non-empty"))
}

/// Default window: the last 10% of the indices up to `n_max` (at least one).
pub fn default_window(n_max: usize) -> usize {
    ((n_max.saturating_sub(1)) / 10).max(1)
}
