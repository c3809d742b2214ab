//! Cylinder counting for constructed Cantor sets.

use thiserror::Error;

use crate::construct::{mu_cylinder, CantorSchedule, Constraint, ConstructError};
use crate::exponents::burn_in_count;

/// Fraction of block ends dropped before the [`SlopeMode::AtBlockEnds`] minimum.
pub const BLOCK_END_BURN_IN: f64 = 0.2;

#[derive(Debug, Error)]
pub enum BoxDimError {
    #[error("need at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("count exponent {got} differs from measure exponent {expected} at depth {n}")]
    Mismatch { n: u64, got: u64, expected: u64 },
    #[error(transparent)]
    Construct(#[from] ConstructError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountPoint {
    pub n: u64,
    /// `log_b` of the number of depth-`n` cylinders meeting the set.
    pub log_b_count: u64,
}

impl CountPoint {
    pub fn ratio(&self) -> f64 {
        self.log_b_count as f64 / self.n as f64
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CountSeries {
    pub points: Vec<CountPoint>,
}

impl CountSeries {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,log_b_count,ratio\n");
        for p in &self.points {
            out.push_str(&format!("{},{},{:.12}\n", p.n, p.log_b_count, p.ratio()));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlopeMode {
    AllDepths,
    AtBlockEnds,
}

/// Free positions among `1..=n`, counted position by position.
pub fn count_cylinders(sched: &CantorSchedule, base: u32, n: u64) -> Result<u64, BoxDimError> {
    Ok(free_prefix_counts(sched, base, n)?.last().copied().unwrap_or(0))
}

/// `log_b` counts at every depth `0..=max_depth` from one scan.
fn free_prefix_counts(sched: &CantorSchedule, base: u32, max_depth: u64) -> Result<Vec<u64>, BoxDimError> {
    let covered = sched.covered_len();
    if max_depth > covered {
        return Err(ConstructError::BeyondCoverage { pos: max_depth, covered }.into());
    }
    let mut counts = Vec::with_capacity(max_depth as usize + 1);
    counts.push(0);
    let mut free = 0;
    for pos in 1..=max_depth {
        if sched.constraint_at(pos, base) == Some(Constraint::Free) {
            free += 1;
        }
        counts.push(free);
    }
    Ok(counts)
}

/// Counts at every depth `1..=max_depth`.
pub fn series_all_depths(sched: &CantorSchedule, base: u32, max_depth: u64) -> Result<CountSeries, BoxDimError> {
    let counts = free_prefix_counts(sched, base, max_depth)?;
    let points = (1..=max_depth).map(|n| CountPoint { n, log_b_count: counts[n as usize] }).collect();
    Ok(CountSeries { points })
}

/// Counts at the block ends `m_k <= max_depth`.
pub fn series_at_block_ends(sched: &CantorSchedule, base: u32, max_depth: u64) -> Result<CountSeries, BoxDimError> {
    let counts = free_prefix_counts(sched, base, max_depth)?;
    let points = sched
        .entries
        .iter()
        .filter(|e| e.end <= max_depth)
        .map(|e| CountPoint { n: e.end, log_b_count: counts[e.end as usize] })
        .collect();
    Ok(CountSeries { points })
}

/// Checks the count exponent against the closed-form measure at every depth `1..=max_depth`.
pub fn cross_check_measure(sched: &CantorSchedule, base: u32, max_depth: u64) -> Result<(), BoxDimError> {
    let counts = free_prefix_counts(sched, base, max_depth)?;
    for n in 1..=max_depth {
        let expected = mu_cylinder(sched, base, n)?.log_b_mu;
        let got = counts[n as usize];
        if got != expected {
            return Err(BoxDimError::Mismatch { n, got, expected });
        }
    }
    Ok(())
}

/// Least-squares slope of `log_b_count` against `n`, or the minimum ratio
/// past a 20% burn-in.
pub fn dimension_slope(series: &CountSeries, mode: SlopeMode) -> Result<f64, BoxDimError> {
    let pts = &series.points;
    if pts.len() < 3 {
        return Err(BoxDimError::TooFewPoints(pts.len()));
    }
    match mode {
        SlopeMode::AllDepths => {
            let len = pts.len() as f64;
            let mean_x = pts.iter().map(|p| p.n as f64).sum::<f64>() / len;
            let mean_y = pts.iter().map(|p| p.log_b_count as f64).sum::<f64>() / len;
            let (mut sxy, mut sxx) = (0.0, 0.0);
            for p in pts {
                let dx = p.n as f64 - mean_x;
                sxy += dx * (p.log_b_count as f64 - mean_y);
                sxx += dx * dx;
            }
            Ok(sxy / sxx)
        }
        SlopeMode::AtBlockEnds => {
            let skip = burn_in_count(pts.len(), BLOCK_END_BURN_IN).min(pts.len() - 1);
            Ok(pts[skip..].iter().map(CountPoint::ratio).fold(f64::INFINITY, f64::min))
        }
    }
}
