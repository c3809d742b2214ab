//! Closed-form Hausdorff dimension values, bounds and threshold indices.
//!
//! Everything here is evaluated in exact rational arithmetic. Threshold
//! indices are floors of logarithm ratios and are found by walking exact
//! powers of `eta`, since the interval endpoints sit exactly on such powers.

use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{self, floor_log, int, pow, Decimal, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct DomainError(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportKind {
    Exact,
    UpperBound,
    LowerBound,
    Empty,
}

impl fmt::Display for ReportKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportKind::Exact => "exact",
            ReportKind::UpperBound => "upper",
            ReportKind::LowerBound => "lower",
            ReportKind::Empty => "empty",
        })
    }
}

/// One formula evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionReport {
    /// `None` when the parameters fall outside the formula's domain.
    pub value: Option<Rational>,
    pub kind: ReportKind,
    pub source: &'static str,
    pub domain_ok: bool,
    /// The membership condition that was checked.
    pub condition: String,
}

impl DimensionReport {
    fn new(kind: ReportKind, source: &'static str, value: Rational, condition: impl Into<String>) -> Self {
        debug_assert!(
            value >= Rational::zero() && value <= Rational::one(),
            "{source} produced {} outside [0, 1]",
            rational::display(&value)
        );
        Self { value: Some(value), kind, source, domain_ok: true, condition: condition.into() }
    }

    fn empty(source: &'static str, condition: impl Into<String>) -> Self {
        Self {
            value: Some(Rational::zero()),
            kind: ReportKind::Empty,
            source,
            domain_ok: true,
            condition: condition.into(),
        }
    }

    fn outside(kind: ReportKind, source: &'static str, condition: impl Into<String>) -> Self {
        Self { value: None, kind, source, domain_ok: false, condition: condition.into() }
    }

    /// The value, panicking when the domain check failed.
    pub fn expect_value(&self) -> &Rational {
        self.value.as_ref().unwrap_or_else(|| panic!("{} outside its domain", self.source))
    }

    pub fn is_empty_set(&self) -> bool {
        self.kind == ReportKind::Empty
    }

    pub fn exact_string(&self) -> String {
        self.value.as_ref().map_or_else(|| "-".into(), rational::display)
    }

    pub fn decimal_string(&self) -> String {
        self.value.as_ref().map_or_else(|| "-".into(), |v| Decimal(v, 12).to_string())
    }
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<(), DomainError> {
    if cond {
        Ok(())
    } else {
        Err(DomainError(msg()))
    }
}

fn q(r: &Rational) -> String {
    rational::display(r)
}

/// `((1 - v̂) / (1 + v̂))^2`, the dimension for `eta = 1`.
pub fn dim_eta1(vhat: &Rational) -> Result<DimensionReport, DomainError> {
    let one = Rational::one();
    require(!vhat.is_negative() && vhat <= &one, || format!("vhat = {} not in [0, 1]", q(vhat)))?;
    let r = (&one - vhat) / (&one + vhat);
    Ok(DimensionReport::new(ReportKind::Exact, "dim_eta1", &r * &r, "0 <= vhat <= 1"))
}

/// Dimension of the pair set `{v̂ exactly, v = theta v̂}` when `eta = 1`.
pub fn dim_pair_eta1(vhat: &Rational, theta: &Rational) -> Result<DimensionReport, DomainError> {
    let one = Rational::one();
    require(vhat.is_positive() && vhat < &one, || format!("vhat = {} not in (0, 1)", q(vhat)))?;
    let threshold = (&one - vhat).recip();
    if theta < &threshold {
        return Ok(DimensionReport::empty("dim_pair_eta1", format!("theta < 1/(1-vhat) = {}", q(&threshold))));
    }
    let tv = theta * vhat;
    let value = (theta - &one - &tv) / ((theta - &one) * (&one + &tv));
    Ok(DimensionReport::new(
        ReportKind::Exact,
        "dim_pair_eta1",
        value,
        format!("theta >= 1/(1-vhat) = {}", q(&threshold)),
    ))
}

/// `max{1, 1/(eta - v̂)}`, below which the pair set is empty.
pub fn pair_threshold(eta: &Rational, vhat: &Rational) -> Rational {
    let t = (eta - vhat).recip();
    if t > Rational::one() {
        t
    } else {
        Rational::one()
    }
}

/// Upper bound for the pair set `{v̂ >= v̂, v = theta v̂}` at growth `eta`.
pub fn upper_bound_pair(eta: &Rational, vhat: &Rational, theta: &Rational) -> Result<DimensionReport, DomainError> {
    require(vhat.is_positive() && vhat < eta, || format!("vhat = {} not in (0, eta = {})", q(vhat), q(eta)))?;
    let threshold = pair_threshold(eta, vhat);
    if theta < &threshold {
        return Ok(DimensionReport::empty(
            "upper_bound_pair",
            format!("theta < max(1, 1/(eta-vhat)) = {}", q(&threshold)),
        ));
    }
    let one = Rational::one();
    let et = eta * theta;
    let tv = theta * vhat;
    let value = (&et - &one - &tv) / ((&et - &one) * (&one + &tv));
    Ok(DimensionReport::new(
        ReportKind::UpperBound,
        "upper_bound_pair",
        value,
        format!("theta >= max(1, 1/(eta-vhat)) = {}", q(&threshold)),
    ))
}

/// Upper bound for `{v̂ >= v̂, theta v̂ <= v <= theta v̂ + rho}`.
pub fn upper_bound_strip(
    eta: &Rational,
    vhat: &Rational,
    theta: &Rational,
    rho: &Rational,
) -> Result<DimensionReport, DomainError> {
    require(vhat.is_positive() && vhat < eta, || format!("vhat = {} not in (0, eta = {})", q(vhat), q(eta)))?;
    let threshold = pair_threshold(eta, vhat);
    require(theta >= &threshold, || format!("theta = {} below max(1, 1/(eta-vhat)) = {}", q(theta), q(&threshold)))?;
    require(!rho.is_negative(), || format!("rho = {} is negative", q(rho)))?;
    let one = Rational::one();
    let et = eta * theta;
    let tv = theta * vhat;
    let numer = vhat * (&et - &one - &tv) + rho * (eta - vhat);
    let denom = (&one + &tv) * ((&et - &one) * vhat + eta * rho);
    Ok(DimensionReport::new(
        ReportKind::UpperBound,
        "upper_bound_strip",
        numer / denom,
        "theta >= max(1, 1/(eta-vhat)), rho >= 0",
    ))
}

/// Integer thresholds partitioning the `(eta, v̂)` plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Thresholds {
    pub l0: i64,
    pub l1: i64,
    pub ltilde: i64,
    pub lprime: i64,
}

/// `max{1, floor(log_eta(2/(eta-1))) + 1}`.
pub fn l0(eta: &Rational) -> Result<i64, DomainError> {
    let one = Rational::one();
    require(eta > &one, || format!("eta = {} must exceed 1", q(eta)))?;
    Ok((floor_log(eta, &(int(2) / (eta - &one))) + 1).max(1))
}

pub fn thresholds(eta: &Rational, vhat: &Rational) -> Result<Thresholds, DomainError> {
    let l0 = l0(eta)?;
    require(vhat.is_positive() && vhat < eta, || format!("vhat = {} not in (0, eta = {})", q(vhat), q(eta)))?;
    let gap = eta - vhat;
    let l1 = floor_log(eta, &(int(2) / &gap)) + 1;
    let ltilde = floor_log(eta, &((eta + Rational::one()) / &gap)).max(1);
    let lprime = (floor_log(eta, &gap.recip()) + 1).max(1);
    Ok(Thresholds { l0, l1, ltilde, lprime })
}

/// `((eta - v̂)/(eta + v̂))^2`.
pub fn baseline_bound(eta: &Rational, vhat: &Rational) -> Result<DimensionReport, DomainError> {
    require(eta.is_positive(), || format!("eta = {} must be positive", q(eta)))?;
    require(!vhat.is_negative() && vhat <= eta, || format!("vhat = {} not in [0, eta = {}]", q(vhat), q(eta)))?;
    let r = (eta - vhat) / (eta + vhat);
    Ok(DimensionReport::new(ReportKind::UpperBound, "baseline_bound", &r * &r, "0 <= vhat <= eta"))
}

/// `(eta^{l+1} - 1 - eta^l v̂) / ((eta^{l+1} - 1)(1 + eta^l v̂))`, the value of
/// the stride-`l` construction with `theta = eta^l`.
pub fn stride_value(eta: &Rational, vhat: &Rational, l: i64) -> Rational {
    let one = Rational::one();
    let el = pow(eta, l);
    let el1 = &el * eta - &one;
    let elv = &el * vhat;
    (&el1 - &elv) / (&el1 * (&one + &elv))
}

/// Second branch of the eta > 1 upper bound:
/// `(eta^l - 1 - eta^{l-1} v̂) / (eta^{l-1}(eta(eta^l - 1) - v̂))`.
fn left_edge_value(eta: &Rational, vhat: &Rational, l: i64) -> Option<Rational> {
    let one = Rational::one();
    let el = pow(eta, l);
    let elm = pow(eta, l - 1);
    let denom = &elm * (eta * (&el - &one) - vhat);
    if !denom.is_positive() {
        return None;
    }
    Some((&el - &one - &elm * vhat) / denom)
}

fn open_contains(lo: &Rational, hi: &Rational, x: &Rational) -> bool {
    lo < x && x < hi
}

fn max_with_one(r: Rational) -> Rational {
    if r > Rational::one() {
        r
    } else {
        Rational::one()
    }
}

/// The `l` whose open upper-bound interval contains `v̂`, if any.
fn upper_interval_index(eta: &Rational, vhat: &Rational) -> Result<Option<i64>, DomainError> {
    let l0 = l0(eta)?;
    if vhat >= eta {
        return Ok(None);
    }
    let two = int(2);
    let mut l = l0;
    loop {
        let el = pow(eta, l);
        let lo_raw = eta - &two * eta / (&el + Rational::one());
        if &lo_raw >= vhat {
            return Ok(None);
        }
        let lo = if l == l0 { max_with_one(lo_raw) } else { lo_raw };
        let hi = eta - &two / &el;
        if open_contains(&lo, &hi, vhat) {
            return Ok(Some(l));
        }
        l += 1;
    }
}

/// Upper bound holding on the union of open intervals
/// `(max{1, eta - 2 eta/(eta^l0 + 1)}, eta - 2/eta^l0) ∪ ⋃_{l > l0} (eta - 2 eta/(eta^l + 1), eta - 2/eta^l)`.
pub fn thm12_upper(eta: &Rational, vhat: &Rational) -> Result<DimensionReport, DomainError> {
    const SOURCE: &str = "thm12_upper";
    let condition =
        "vhat in the open l-intervals (eta - 2eta/(eta^l+1), eta - 2/eta^l), l >= l0; lim a_{n+1}/a_n assumed to exist";
    let Some(l) = upper_interval_index(eta, vhat)? else {
        return Ok(DimensionReport::outside(ReportKind::UpperBound, SOURCE, condition));
    };
    let th = thresholds(eta, vhat)?;
    debug_assert_eq!(th.l1, l);
    let first = stride_value(eta, vhat, th.l1);
    let value = match left_edge_value(eta, vhat, th.l1) {
        Some(second) if second > first => second,
        _ => first,
    };
    let baseline = baseline_bound(eta, vhat)?;
    assert!(&value < baseline.expect_value(), "upper bound must sit strictly below the baseline");
    Ok(DimensionReport::new(ReportKind::UpperBound, SOURCE, value, format!("{condition} (l1 = {})", th.l1)))
}

/// Lower bound valid for every `v̂ in (0, eta)`.
pub fn thm13_lower(eta: &Rational, vhat: &Rational) -> Result<DimensionReport, DomainError> {
    let th = thresholds(eta, vhat)?;
    Ok(DimensionReport::new(
        ReportKind::LowerBound,
        "thm13_lower",
        stride_value(eta, vhat, th.ltilde),
        format!("0 < vhat < eta (ltilde = {})", th.ltilde),
    ))
}

/// Exact dimension on the half-open window
/// `(max{1, eta - (eta^l0 + eta^{l0+1} - 1)/eta^{2 l0}}, eta - 2/eta^l0] ∪ ⋃_{l > l0} (eta - (eta^l + eta^{l+1} - 1)/eta^{2l}, eta - 2/eta^l]`
/// and at every `v̂ = eta - 2/eta^l`, `l >= l0`.
pub fn cor16_exact(eta: &Rational, vhat: &Rational) -> Result<DimensionReport, DomainError> {
    const SOURCE: &str = "cor16_exact";
    let condition = "vhat in the half-open l-windows (eta - (eta^l+eta^{l+1}-1)/eta^{2l}, eta - 2/eta^l], l >= l0";
    let l0 = l0(eta)?;
    if !vhat.is_positive() || vhat >= eta {
        return Ok(DimensionReport::outside(ReportKind::Exact, SOURCE, condition));
    }
    let one = Rational::one();
    let two = int(2);
    let mut l = l0;
    let hit = loop {
        let el = pow(eta, l);
        let hi = eta - &two / &el;
        if vhat == &hi {
            break Some(l);
        }
        let lo_raw = eta - (&el + &el * eta - &one) / (&el * &el);
        if &lo_raw >= vhat {
            break None;
        }
        let lo = if l == l0 { max_with_one(lo_raw) } else { lo_raw };
        if &lo < vhat && vhat <= &hi {
            break Some(l);
        }
        l += 1;
    };
    match hit {
        None => Ok(DimensionReport::outside(ReportKind::Exact, SOURCE, condition)),
        Some(l) => {
            let th = thresholds(eta, vhat)?;
            debug_assert_eq!(th.ltilde, l);
            Ok(DimensionReport::new(
                ReportKind::Exact,
                SOURCE,
                stride_value(eta, vhat, th.ltilde),
                format!("{condition} (l = {l})"),
            ))
        }
    }
}

/// An interval of `theta` values with explicit endpoint conventions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaInterval {
    pub lo: Rational,
    pub hi: Rational,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl ThetaInterval {
    pub fn contains(&self, x: &Rational) -> bool {
        let above = if self.lo_closed { x >= &self.lo } else { x > &self.lo };
        let below = if self.hi_closed { x <= &self.hi } else { x < &self.hi };
        above && below
    }
}

impl fmt::Display for ThetaInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            q(&self.lo),
            q(&self.hi),
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

/// The `theta` values for which the pair set is empty when `v̂ in [1, eta)`:
/// `[0, max{1, 1/(eta - v̂)})` and the gaps `((eta^l - 1)/v̂, eta^l)` for
/// `l = 1..=l_max`, with overlapping pieces merged.
pub fn forbidden_theta_gaps(eta: &Rational, vhat: &Rational, l_max: u32) -> Result<Vec<ThetaInterval>, DomainError> {
    let one = Rational::one();
    require(eta > &one, || format!("eta = {} must exceed 1", q(eta)))?;
    require(vhat >= &one && vhat < eta, || format!("vhat = {} not in [1, eta = {})", q(vhat), q(eta)))?;
    let mut pieces =
        vec![ThetaInterval { lo: Rational::zero(), hi: pair_threshold(eta, vhat), lo_closed: true, hi_closed: false }];
    for l in 1..=i64::from(l_max) {
        let el = pow(eta, l);
        pieces.push(ThetaInterval { lo: (&el - &one) / vhat, hi: el, lo_closed: false, hi_closed: false });
    }
    pieces.sort_by(|a, b| a.lo.cmp(&b.lo));
    let mut merged: Vec<ThetaInterval> = Vec::new();
    for piece in pieces {
        if let Some(cur) = merged.last_mut() {
            let overlaps = piece.lo < cur.hi || (piece.lo == cur.hi && (cur.hi_closed || piece.lo_closed));
            if overlaps {
                if piece.hi > cur.hi || (piece.hi == cur.hi && piece.hi_closed) {
                    cur.hi = piece.hi;
                    cur.hi_closed = piece.hi_closed;
                }
                if piece.lo == cur.lo {
                    cur.lo_closed |= piece.lo_closed;
                }
                continue;
            }
        }
        merged.push(piece);
    }
    Ok(merged)
}

/// Pair-set verdict at `theta`, combining the emptiness threshold, the
/// forbidden gaps (when `eta > 1` and `v̂ >= 1`) and the pair upper bound.
pub fn pair_verdict(eta: &Rational, vhat: &Rational, theta: &Rational) -> Result<DimensionReport, DomainError> {
    let one = Rational::one();
    if eta > &one && vhat >= &one && vhat < eta {
        // the gap lying at or above theta has index at most floor(log_eta(theta)) + 1
        let l_max = if theta.is_positive() { (floor_log(eta, theta) + 1).max(1) } else { 1 };
        let gaps = forbidden_theta_gaps(eta, vhat, l_max as u32)?;
        if let Some(gap) = gaps.iter().find(|g| g.contains(theta)) {
            return Ok(DimensionReport::empty("pair_verdict", format!("theta in forbidden gap {gap}")));
        }
    }
    upper_bound_pair(eta, vhat, theta)
}
