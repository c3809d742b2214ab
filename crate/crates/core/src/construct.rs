//! Cantor-type digit schedules realizing a prescribed pair `(v̂, θv̂)`.
//!
//! Each schedule entry `k` owns the positions `a_{i_k} .. a_{i_{k+1}} - 1`:
//! a marker `1` at `a_{i_k}`, zeros up to `m_k - 1`, a marker at `m_k`, then
//! `t_k` spaced markers at stride `d_k = m_k - a_{i_k}`. In base 2 a forced
//! zero also sits right before each spaced marker. Every other position is
//! free.

use std::fmt::Write as _;

use num_traits::{One, Signed};
use thiserror::Error;

use crate::digits::{DigitStream, DigitsError, MAX_BASE};
use crate::dimfx::{self, DomainError};
use crate::rational::{self, floor_u64, from_u64, pow, Rational};
use crate::sequences::{default_window, eta_estimate, DenominatorSequence, SequenceKind};

/// Start indices tried by [`schedule_geometric`] before giving up.
pub const START_SCAN_CAP: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum ConstructError {
    #[error("construction degenerate: {0}")]
    Degenerate(String),
    #[error("wrong regime: {0}")]
    WrongRegime(String),
    #[error("theta = {theta} outside [{lo}, {hi})")]
    ThetaOutOfRange { theta: String, lo: String, hi: String },
    #[error("stride l = {l} below l' = {lprime}")]
    StrideTooSmall { l: i64, lprime: i64 },
    #[error("sequence too short for the requested schedule")]
    SequenceTooShort,
    #[error("no valid start index among the first {0} indices")]
    NoStartIndex(usize),
    #[error("schedule entry {k}: {what}")]
    InvariantViolated { k: usize, what: String },
    #[error("position {pos} beyond schedule coverage {covered}")]
    BeyondCoverage { pos: u64, covered: u64 },
    #[error("depth must be at least 1")]
    ZeroDepth,
    #[error("base {0} outside 2..=36")]
    BadBase(u32),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Digits(#[from] DigitsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Eta1,
    Geometric { l: i64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScheduleEntry {
    /// Dominant index `i_k`.
    pub index: usize,
    /// `a_{i_k}`.
    pub start: u64,
    /// `m_k`.
    pub end: u64,
    /// `t_k`.
    pub spaced: u64,
    /// `a_{i_{k+1}}`, where the next entry begins.
    pub boundary: u64,
}

impl ScheduleEntry {
    pub fn gap(&self) -> u64 {
        self.end - self.start
    }
}

/// How far a schedule is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Horizon {
    /// Exactly this many entries.
    Entries(usize),
    /// Enough entries to cover positions `1..=depth`.
    Depth(u64),
}

#[derive(Debug, Clone)]
pub struct CantorSchedule {
    pub seq: DenominatorSequence,
    pub theta: Rational,
    pub vhat: Rational,
    pub regime: Regime,
    pub entries: Vec<ScheduleEntry>,
}

/// What a schedule dictates at one digit position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constraint {
    Free,
    Forced(u8),
}

impl CantorSchedule {
    /// Last position whose constraint is determined.
    pub fn covered_len(&self) -> u64 {
        self.entries.last().map_or(0, |e| e.boundary - 1)
    }

    pub fn target_v(&self) -> Rational {
        &self.theta * &self.vhat
    }

    /// Limit of the local dimension along `n = m_k`.
    pub fn local_dimension_limit(&self) -> Rational {
        let one = Rational::one();
        let tv = self.target_v();
        let span = match self.regime {
            Regime::Eta1 => &self.theta - &one,
            Regime::Geometric { l } => {
                let eta = self.seq.eta_declared().expect("geometric schedules carry eta");
                pow(eta, l + 1) - &one
            }
        };
        (&span - &tv) / (&span * (&one + &tv))
    }

    /// Entry whose region `a_{i_k} ..= a_{i_{k+1}} - 1` holds `pos`.
    fn entry_for(&self, pos: u64) -> Option<(usize, &ScheduleEntry)> {
        let k = self.entries.partition_point(|e| e.start <= pos).checked_sub(1)?;
        Some((k, &self.entries[k]))
    }

    /// Constraint at 1-based `pos`; `None` past coverage.
    pub fn constraint_at(&self, pos: u64, base: u32) -> Option<Constraint> {
        if pos == 0 || pos > self.covered_len() {
            return None;
        }
        let Some((_, e)) = self.entry_for(pos) else {
            return Some(Constraint::Free);
        };
        let c = if pos == e.start || pos == e.end {
            Constraint::Forced(1)
        } else if pos < e.end {
            Constraint::Forced(0)
        } else {
            let d = e.gap();
            let off = pos - e.end;
            if off.is_multiple_of(d) && off / d <= e.spaced {
                Constraint::Forced(1)
            } else if base == 2 && (off + 1).is_multiple_of(d) && (off + 1) / d <= e.spaced {
                Constraint::Forced(0)
            } else {
                Constraint::Free
            }
        };
        Some(c)
    }

    /// Schedule dump: `k,i_k,a_ik,m_k,t_k` with 1-based `k`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,i_k,a_ik,m_k,t_k\n");
        for (k, e) in self.entries.iter().enumerate() {
            writeln!(out, "{},{},{},{},{}", k + 1, e.index, e.start, e.end, e.spaced).expect("write to string");
        }
        out
    }
}

fn check_base(base: u32) -> Result<(), ConstructError> {
    if (2..=MAX_BASE).contains(&base) {
        Ok(())
    } else {
        Err(ConstructError::BadBase(base))
    }
}

fn value_at(seq: &DenominatorSequence, n: usize) -> Result<u64, ConstructError> {
    seq.a(n).ok_or(ConstructError::SequenceTooShort)
}

fn floor_of(r: &Rational) -> Result<u64, ConstructError> {
    floor_u64(r).ok_or(ConstructError::SequenceTooShort)
}

/// Builds one entry and checks the sandwich `a + 3 <= m <= a_next - 2`.
fn make_entry(
    k: usize,
    index: usize,
    start: u64,
    next_index: usize,
    boundary: u64,
    one_plus_tv: &Rational,
) -> Result<ScheduleEntry, ConstructError> {
    let end = floor_of(&(one_plus_tv * from_u64(start)))?;
    let violated = |what: String| ConstructError::InvariantViolated { k: k + 1, what };
    if next_index <= index {
        return Err(violated(format!("next index {next_index} not after {index}")));
    }
    if start + 3 > end {
        return Err(violated(format!("m_k = {end} < a_ik + 3 = {}", start + 3)));
    }
    if end + 2 > boundary {
        return Err(violated(format!("m_k = {end} > a(i_(k+1)) - 2 = {}", boundary.saturating_sub(2))));
    }
    let spaced = (boundary - 1 - end) / (end - start);
    Ok(ScheduleEntry { index, start, end, spaced, boundary })
}

fn check_gap_growth(entries: &[ScheduleEntry]) -> Result<(), ConstructError> {
    if let [.., prev, last] = entries {
        if last.gap() <= prev.gap() {
            return Err(ConstructError::InvariantViolated {
                k: entries.len(),
                what: format!("gap {} does not exceed previous gap {}", last.gap(), prev.gap()),
            });
        }
    }
    Ok(())
}

fn horizon_reached(entries: &[ScheduleEntry], horizon: Horizon) -> bool {
    match horizon {
        Horizon::Entries(n) => entries.len() >= n,
        Horizon::Depth(depth) => entries.last().is_some_and(|e| e.boundary > depth),
    }
}

/// `k_max` entries of the `eta = 1` schedule.
pub fn schedule_eta1(
    seq: &DenominatorSequence,
    theta: &Rational,
    vhat: &Rational,
    k_max: usize,
) -> Result<CantorSchedule, ConstructError> {
    build_eta1(seq, theta, vhat, Horizon::Entries(k_max))
}

/// The `eta = 1` schedule up to the first entry covering `depth`.
pub fn schedule_eta1_covering(
    seq: &DenominatorSequence,
    theta: &Rational,
    vhat: &Rational,
    depth: u64,
) -> Result<CantorSchedule, ConstructError> {
    build_eta1(seq, theta, vhat, Horizon::Depth(depth))
}

pub fn build_eta1(
    seq: &DenominatorSequence,
    theta: &Rational,
    vhat: &Rational,
    horizon: Horizon,
) -> Result<CantorSchedule, ConstructError> {
    let one = Rational::one();
    if !(vhat.is_positive() && vhat < &one) {
        return Err(ConstructError::Degenerate(format!("vhat = {} not in (0, 1)", rational::display(vhat))));
    }
    let threshold = (&one - vhat).recip();
    if theta <= &threshold {
        return Err(ConstructError::Degenerate(format!(
            "theta = {} <= 1/(1-vhat) = {}",
            rational::display(theta),
            rational::display(&threshold)
        )));
    }
    check_eta_one(seq)?;

    let tv = theta * vhat;
    let candidates = [rational::int(3) / &tv, (&tv * (theta - &one)).recip(), (theta - &one - &tv).recip()];
    let lower = candidates.into_iter().max().expect("three candidates");
    let one_plus_tv = &one + &tv;
    let mut index = seq.first_index_above(floor_of(&lower)?).ok_or(ConstructError::SequenceTooShort)?;
    let spaced_cap = floor_of(&(rational::int(2) / vhat).ceil())? + 1;

    let mut entries = Vec::new();
    while !horizon_reached(&entries, horizon) {
        let start = value_at(seq, index)?;
        let next_index =
            seq.first_index_above(floor_of(&(theta * from_u64(start)))?).ok_or(ConstructError::SequenceTooShort)?;
        let boundary = value_at(seq, next_index)?;
        let entry = make_entry(entries.len(), index, start, next_index, boundary, &one_plus_tv)?;
        // t_k is bounded once transients from the first entries pass
        if entries.len() >= 3 && entry.spaced > spaced_cap {
            return Err(ConstructError::InvariantViolated {
                k: entries.len() + 1,
                what: format!("t_k = {} exceeds ceil(2/vhat) + 1 = {spaced_cap}", entry.spaced),
            });
        }
        entries.push(entry);
        check_gap_growth(&entries)?;
        index = next_index;
    }
    Ok(CantorSchedule { seq: seq.clone(), theta: theta.clone(), vhat: vhat.clone(), regime: Regime::Eta1, entries })
}

fn check_eta_one(seq: &DenominatorSequence) -> Result<(), ConstructError> {
    match seq.kind() {
        SequenceKind::Geometric { eta, .. } => Err(ConstructError::WrongRegime(format!(
            "eta = {} sequence given to the eta = 1 construction",
            rational::display(eta)
        ))),
        SequenceKind::Explicit => {
            let n = seq.materialized_len().unwrap_or(0);
            if n < 3 {
                return Err(ConstructError::SequenceTooShort);
            }
            let eta = eta_estimate(seq, n, default_window(n)).map_err(|_| ConstructError::SequenceTooShort)?;
            if eta > rational::ratio(11, 10) {
                return Err(ConstructError::WrongRegime(format!(
                    "explicit sequence has tail ratio {} > 11/10",
                    rational::display(&eta)
                )));
            }
            Ok(())
        }
        _ => Ok(()),
    }
}

/// `k_max` entries of the fixed-stride schedule for a geometric sequence.
pub fn schedule_geometric(
    seq: &DenominatorSequence,
    theta: &Rational,
    vhat: &Rational,
    l: i64,
    k_max: usize,
) -> Result<CantorSchedule, ConstructError> {
    build_geometric(seq, theta, vhat, l, Horizon::Entries(k_max))
}

/// The geometric schedule up to the first entry covering `depth`.
pub fn schedule_geometric_covering(
    seq: &DenominatorSequence,
    theta: &Rational,
    vhat: &Rational,
    l: i64,
    depth: u64,
) -> Result<CantorSchedule, ConstructError> {
    build_geometric(seq, theta, vhat, l, Horizon::Depth(depth))
}

pub fn build_geometric(
    seq: &DenominatorSequence,
    theta: &Rational,
    vhat: &Rational,
    l: i64,
    horizon: Horizon,
) -> Result<CantorSchedule, ConstructError> {
    let eta = seq
        .eta_declared()
        .ok_or_else(|| ConstructError::WrongRegime("the eta > 1 construction needs a geometric sequence".into()))?
        .clone();
    let th = dimfx::thresholds(&eta, vhat)?;
    if l < th.lprime {
        return Err(ConstructError::StrideTooSmall { l, lprime: th.lprime });
    }
    let one = Rational::one();
    let lo = pow(&eta, l);
    let hi = (pow(&eta, l + 1) - &one) / vhat;
    if theta < &lo || theta >= &hi {
        return Err(ConstructError::ThetaOutOfRange {
            theta: rational::display(theta),
            lo: rational::display(&lo),
            hi: rational::display(&hi),
        });
    }
    let tv = theta * vhat;
    let one_plus_tv = &one + &tv;
    let min_start = rational::int(3) / &tv;
    let min_step = tv.recip();
    let stride = usize::try_from(l + 1).expect("positive stride");

    // the start conditions are checked on every index the chain visits
    let chain_from = |first: usize| -> Result<Option<Vec<ScheduleEntry>>, ConstructError> {
        let mut entries = Vec::new();
        let mut index = first;
        while !horizon_reached(&entries, horizon) {
            let start = value_at(seq, index)?;
            let next_index = index + stride;
            let boundary = value_at(seq, next_index)?;
            let (a, a_next) = (from_u64(start), from_u64(boundary));
            let ok = a > min_start && &a_next - &a > min_step && &one_plus_tv * &a <= &a_next - rational::int(2);
            if !ok {
                return Ok(None);
            }
            entries.push(make_entry(entries.len(), index, start, next_index, boundary, &one_plus_tv)?);
            check_gap_growth(&entries)?;
            index = next_index;
        }
        Ok(Some(entries))
    };

    let mut first = 1;
    let entries = loop {
        if first > START_SCAN_CAP {
            return Err(ConstructError::NoStartIndex(START_SCAN_CAP));
        }
        if let Some(entries) = chain_from(first)? {
            break entries;
        }
        first += 1;
    };
    Ok(CantorSchedule {
        seq: seq.clone(),
        theta: theta.clone(),
        vhat: vhat.clone(),
        regime: Regime::Geometric { l },
        entries,
    })
}

/// Digits `x_1 ..= x_upto` of the schedule's witness point, free positions set to `1`.
pub fn emit_digits(sched: &CantorSchedule, base: u32, upto: u64) -> Result<DigitStream, ConstructError> {
    check_base(base)?;
    if upto > sched.covered_len() {
        return Err(ConstructError::BeyondCoverage { pos: upto, covered: sched.covered_len() });
    }
    let len = usize::try_from(upto).expect("depth fits in memory");
    let mut digits = vec![1u8; len];
    let mut set = |pos: u64, d: u8| {
        if pos <= upto {
            digits[(pos - 1) as usize] = d;
        }
    };
    for e in &sched.entries {
        if e.start > upto {
            break;
        }
        for pos in e.start + 1..e.end {
            set(pos, 0);
        }
        if base == 2 {
            for t in 1..=e.spaced {
                set(e.end + t * e.gap() - 1, 0);
            }
        }
    }
    Ok(DigitStream::new(base, digits)?)
}

/// `mu(I_n) = b^(-log_b_mu)` for the uniform measure on the schedule's set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeasureValue {
    pub log_b_mu: u64,
    pub n: u64,
}

/// Closed form for the measure of a depth-`n` admissible cylinder.
pub fn mu_cylinder(sched: &CantorSchedule, base: u32, n: u64) -> Result<MeasureValue, ConstructError> {
    check_base(base)?;
    if n > sched.covered_len() {
        return Err(ConstructError::BeyondCoverage { pos: n, covered: sched.covered_len() });
    }
    // base 2 also forces a zero per spaced marker
    let per_marker = if base == 2 { 2 } else { 1 };
    let Some((k, e)) = sched.entry_for(n) else {
        return Ok(MeasureValue { log_b_mu: n, n });
    };
    let mut log_b_mu = sched.entries[0].start - 1;
    for prev in &sched.entries[..k] {
        log_b_mu += prev.boundary - prev.end - 1 - per_marker * prev.spaced;
    }
    if n > e.end {
        let off = n - e.end;
        let markers = off / e.gap();
        let zeros = if base == 2 { ((off + 1) / e.gap()).min(e.spaced) } else { 0 };
        log_b_mu += off - markers - zeros;
    }
    Ok(MeasureValue { log_b_mu, n })
}

/// `log_b mu(I_n) / log_b |I_n|`.
pub fn local_dimension(sched: &CantorSchedule, base: u32, n: u64) -> Result<f64, ConstructError> {
    if n == 0 {
        return Err(ConstructError::ZeroDepth);
    }
    Ok(mu_cylinder(sched, base, n)?.log_b_mu as f64 / n as f64)
}

/// A parent cylinder whose admissible children do not carry its mass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdditivityFailure {
    pub prefix: Vec<u8>,
    pub parent_log_b_mu: u64,
    pub children: usize,
    pub child_log_b_mu: u64,
}

/// Walks every admissible cylinder of depth `< max_depth` and checks that
/// its admissible children sum to its measure. Returns the number of
/// parents checked.
pub fn check_child_additivity(
    sched: &CantorSchedule,
    base: u32,
    max_depth: u64,
) -> Result<Result<usize, AdditivityFailure>, ConstructError> {
    check_base(base)?;
    if max_depth > sched.covered_len() {
        return Err(ConstructError::BeyondCoverage { pos: max_depth, covered: sched.covered_len() });
    }
    let mut checked = 0usize;
    let mut prefix = Vec::new();
    let result = additivity_dfs(sched, base, max_depth, &mut prefix, &mut checked)?;
    Ok(result.map(|()| checked))
}

fn additivity_dfs(
    sched: &CantorSchedule,
    base: u32,
    max_depth: u64,
    prefix: &mut Vec<u8>,
    checked: &mut usize,
) -> Result<Result<(), AdditivityFailure>, ConstructError> {
    let n = prefix.len() as u64;
    if n >= max_depth {
        return Ok(Ok(()));
    }
    let parent = mu_cylinder(sched, base, n)?.log_b_mu;
    let child = mu_cylinder(sched, base, n + 1)?.log_b_mu;
    let allowed: Vec<u8> = match sched.constraint_at(n + 1, base).expect("within coverage") {
        Constraint::Free => (0..base as u8).collect(),
        Constraint::Forced(d) => vec![d],
    };
    // children * b^-child == b^-parent  <=>  children == b^(child - parent)
    let balanced = child >= parent
        && u32::try_from(child - parent)
            .ok()
            .and_then(|e| u128::from(base).checked_pow(e))
            .is_some_and(|p| p == allowed.len() as u128);
    *checked += 1;
    if !balanced {
        return Ok(Err(AdditivityFailure {
            prefix: prefix.clone(),
            parent_log_b_mu: parent,
            children: allowed.len(),
            child_log_b_mu: child,
        }));
    }
    for d in allowed {
        prefix.push(d);
        let r = additivity_dfs(sched, base, max_depth, prefix, checked)?;
        prefix.pop();
        if r.is_err() {
            return Ok(r);
        }
    }
    Ok(Ok(()))
}
