//! Base-b digit streams and their maximal runs of `0` or `b-1`.
//!
//! A [`DigitStream`] is the materialized prefix `x_1 .. x_P` of the fractional
//! expansion of some real number. Positions are 1-based throughout the crate,
//! matching the way digit positions are indexed by the denominator sequence.

use std::fmt;
use std::fs;
use std::path::Path;

use thiserror::Error;

/// Number of trailing digits inspected by [`DigitStream::passes_tail_guard`].
pub const TAIL_GUARD: usize = 64;

pub const MAX_BASE: u32 = 36;

#[derive(Debug, Error)]
pub enum DigitsError {
    #[error("base {0} outside 2..=36")]
    BadBase(u32),
    #[error("digit {digit} at position {position} is not below base {base}")]
    DigitOutOfRange { position: usize, digit: u32, base: u32 },
    #[error("character {ch:?} at position {position} is not a base-{base} digit")]
    BadCharacter { position: usize, ch: char, base: u32 },
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("{p}/{q} is not in [0, 1)")]
    NotInUnitInterval { p: u64, q: u64 },
    #[error("digit count must be at least 1")]
    EmptyRequest,
    #[error("digit file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitStream {
    base: u32,
    digits: Vec<u8>,
}

impl DigitStream {
    pub fn new(base: u32, digits: Vec<u8>) -> Result<Self, DigitsError> {
        check_base(base)?;
        if let Some((i, &d)) = digits.iter().enumerate().find(|(_, &d)| u32::from(d) >= base) {
            return Err(DigitsError::DigitOutOfRange { position: i + 1, digit: u32::from(d), base });
        }
        Ok(Self { base, digits })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn prefix_len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    /// Digit at 1-based `position`, if materialized.
    pub fn digit(&self, position: usize) -> Option<u8> {
        position.checked_sub(1).and_then(|i| self.digits.get(i).copied())
    }

    /// The largest digit value, `b - 1`.
    pub fn top_digit(&self) -> u8 {
        (self.base - 1) as u8
    }

    /// Whether `digit` starts a run that can make `||b^a xi||` small.
    pub fn is_run_digit(&self, digit: u8) -> bool {
        digit == 0 || digit == self.top_digit()
    }

    /// Keeps the first `len` digits.
    pub fn truncated(&self, len: usize) -> Self {
        Self { base: self.base, digits: self.digits[..len.min(self.digits.len())].to_vec() }
    }

    /// Irrationality proxy: the last [`TAIL_GUARD`] digits (or the whole
    /// prefix, if shorter) are neither all `0` nor all `b-1`.
    pub fn passes_tail_guard(&self) -> bool {
        let tail = &self.digits[self.digits.len().saturating_sub(TAIL_GUARD)..];
        if tail.is_empty() {
            return true;
        }
        let top = self.top_digit();
        !(tail.iter().all(|&d| d == 0) || tail.iter().all(|&d| d == top))
    }

    /// Text form used by digit files: `base=<b>` then the digit string.
    pub fn to_file_string(&self) -> String {
        format!("base={}\n{}\n", self.base, self)
    }

    pub fn parse_file(text: &str) -> Result<Self, DigitsError> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| DigitsError::Format("missing `base=` header".into()))?;
        let base = header
            .trim()
            .strip_prefix("base=")
            .and_then(|b| b.trim().parse::<u32>().ok())
            .ok_or_else(|| DigitsError::Format(format!("bad header line `{header}`")))?;
        let body: String = lines.map(str::trim_end).collect();
        digits_from_string(&body, base)
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Self, DigitsError> {
        Self::parse_file(&fs::read_to_string(path)?)
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<(), DigitsError> {
        fs::write(path, self.to_file_string())?;
        Ok(())
    }
}

impl fmt::Display for DigitStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text: String =
            self.digits.iter().map(|&d| char::from_digit(u32::from(d), MAX_BASE).expect("digit below base")).collect();
        f.write_str(&text)
    }
}

fn check_base(base: u32) -> Result<(), DigitsError> {
    if (2..=MAX_BASE).contains(&base) {
        Ok(())
    } else {
        Err(DigitsError::BadBase(base))
    }
}

/// First `count` digits of `p/q` by long division. Rationals with two
/// expansions get the terminating one (`1/2 = 0.1000..` in base 2).
pub fn digits_from_rational(p: u64, q: u64, base: u32, count: usize) -> Result<DigitStream, DigitsError> {
    check_base(base)?;
    if q == 0 {
        return Err(DigitsError::ZeroDenominator);
    }
    if p >= q {
        return Err(DigitsError::NotInUnitInterval { p, q });
    }
    if count == 0 {
        return Err(DigitsError::EmptyRequest);
    }
    let (q, b) = (u128::from(q), u128::from(base));
    let mut rem = u128::from(p);
    let digits = (0..count)
        .map(|_| {
            rem *= b;
            let d = rem / q;
            rem %= q;
            d as u8
        })
        .collect();
    Ok(DigitStream { base, digits })
}

/// Parses digit characters `0-9a-z` (case-insensitive) in the given base.
pub fn digits_from_string(text: &str, base: u32) -> Result<DigitStream, DigitsError> {
    check_base(base)?;
    let digits = text
        .chars()
        .enumerate()
        .map(|(i, ch)| {
            ch.to_digit(base).map(|d| d as u8).ok_or(DigitsError::BadCharacter { position: i + 1, ch, base })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DigitStream { base, digits })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RunKind {
    Zero,
    BMinusOne,
}

/// A maximal run of a repeated `0` or `b-1` digit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunBlock {
    /// 1-based position of the first digit of the block.
    pub start: usize,
    pub len: usize,
    pub kind: RunKind,
}

impl RunBlock {
    /// 1-based position of the last digit of the block.
    pub fn last(&self) -> usize {
        self.start + self.len - 1
    }
}

/// All maximal runs of `0` and of `b-1`, in increasing start order.
pub fn run_blocks(stream: &DigitStream) -> Vec<RunBlock> {
    let top = stream.top_digit();
    let mut blocks = Vec::new();
    let digits = stream.digits();
    let mut i = 0;
    while i < digits.len() {
        let d = digits[i];
        let mut j = i + 1;
        while j < digits.len() && digits[j] == d {
            j += 1;
        }
        let kind = if d == 0 {
            Some(RunKind::Zero)
        } else if d == top {
            Some(RunKind::BMinusOne)
        } else {
            None
        };
        if let Some(kind) = kind {
            blocks.push(RunBlock { start: i + 1, len: j - i, kind });
        }
        i = j;
    }
    blocks
}
