use std::fmt::Write as _;
use std::fs;

use dioph_lab::boxdim::{dimension_slope, series_all_depths, series_at_block_ends, SlopeMode};
use dioph_lab::construct::{emit_digits, local_dimension, CantorSchedule};
use dioph_lab::digits::DigitStream;
use dioph_lab::dimfx::{
    baseline_bound, cor16_exact, dim_eta1, dim_pair_eta1, pair_verdict, thm12_upper, thm13_lower, thresholds,
    upper_bound_pair, upper_bound_strip, DimensionReport, DomainError,
};
use dioph_lab::exponents::{check_lemma21, estimate_exponents, eta_for_depth, DEFAULT_BURN_IN};
use dioph_lab::rational::{display, int, pow, to_f64, Rational};
use dioph_lab::sequences::{make_sequence, DenominatorSequence};
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::params::{build_schedule, RegimeArg};

pub const THREADS_ENV: &str = "DIOPH_LAB_THREADS";
pub const LEMMA_TOL: f64 = 0.05;

pub fn write_output(path: Option<&str>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub struct FormulaRow {
    pub name: &'static str,
    pub kind: String,
    pub exact: String,
    pub decimal: String,
    pub domain_ok: bool,
}

fn row(name: &'static str, r: Result<DimensionReport, DomainError>) -> FormulaRow {
    match r {
        Ok(rep) => FormulaRow {
            name,
            kind: rep.kind.to_string(),
            exact: rep.exact_string(),
            decimal: rep.decimal_string(),
            domain_ok: rep.domain_ok,
        },
        Err(_) => FormulaRow { name, kind: "-".into(), exact: "-".into(), decimal: "-".into(), domain_ok: false },
    }
}

/// Every formula that applies at `(eta, vhat)`, plus the `theta`/`rho` ones when given.
pub fn formula_rows(
    eta: &Rational,
    vhat: &Rational,
    theta: Option<&Rational>,
    rho: Option<&Rational>,
) -> Vec<FormulaRow> {
    let mut rows = Vec::new();
    if eta.is_one() {
        rows.push(row("dim_eta1", dim_eta1(vhat)));
    } else {
        rows.push(row("thm12_upper", thm12_upper(eta, vhat)));
        rows.push(row("thm13_lower", thm13_lower(eta, vhat)));
        rows.push(row("cor16_exact", cor16_exact(eta, vhat)));
    }
    rows.push(row("baseline_bound", baseline_bound(eta, vhat)));
    if let Some(theta) = theta {
        if eta.is_one() {
            rows.push(row("dim_pair_eta1", dim_pair_eta1(vhat, theta)));
        }
        rows.push(row("upper_bound_pair", upper_bound_pair(eta, vhat, theta)));
        if !eta.is_one() {
            rows.push(row("pair_verdict", pair_verdict(eta, vhat, theta)));
        }
        if let Some(rho) = rho {
            rows.push(row("upper_bound_strip", upper_bound_strip(eta, vhat, theta, rho)));
        }
    }
    rows
}

fn check_eta(eta: &Rational) -> Result<(), CliError> {
    if eta < &Rational::one() {
        return Err(CliError::Invalid(format!("eta = {} must be at least 1", display(eta))));
    }
    Ok(())
}

pub struct EvalDimArgs {
    pub eta: Rational,
    pub vhat: Vec<Rational>,
    pub theta: Option<Rational>,
    pub rho: Option<Rational>,
    pub csv: bool,
}

pub fn eval_dim(args: &EvalDimArgs) -> Result<String, CliError> {
    check_eta(&args.eta)?;
    if args.rho.is_some() && args.theta.is_none() {
        return Err(CliError::Usage("--rho needs --theta".into()));
    }
    let mut out = String::new();
    if args.csv {
        out.push_str("eta,vhat,theta,rho,formula,kind,exact,decimal,domain_ok\n");
    }
    let opt = |r: &Option<Rational>| r.as_ref().map(display).unwrap_or_default();
    for vhat in &args.vhat {
        let rows = formula_rows(&args.eta, vhat, args.theta.as_ref(), args.rho.as_ref());
        if args.csv {
            for r in &rows {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    display(&args.eta),
                    display(vhat),
                    opt(&args.theta),
                    opt(&args.rho),
                    r.name,
                    r.kind,
                    r.exact,
                    r.decimal,
                    r.domain_ok
                )
                .unwrap();
            }
            continue;
        }
        writeln!(out, "eta = {}, vhat = {}", display(&args.eta), display(vhat)).unwrap();
        if let Some(theta) = &args.theta {
            writeln!(
                out,
                "theta = {}{}",
                display(theta),
                args.rho.as_ref().map(|r| format!(", rho = {}", display(r))).unwrap_or_default()
            )
            .unwrap();
        }
        if !args.eta.is_one() {
            if let Ok(t) = thresholds(&args.eta, vhat) {
                writeln!(out, "thresholds: l0 = {}, l1 = {}, ltilde = {}, lprime = {}", t.l0, t.l1, t.ltilde, t.lprime)
                    .unwrap();
            }
        }
        out.push_str(&render_table(&rows));
    }
    Ok(out)
}

fn render_table(rows: &[FormulaRow]) -> String {
    let header = ["formula", "kind", "exact", "decimal", "domain_ok"];
    let cells: Vec<[String; 5]> = rows
        .iter()
        .map(|r| [r.name.to_string(), r.kind.clone(), r.exact.clone(), r.decimal.clone(), r.domain_ok.to_string()])
        .collect();
    let mut widths = header.map(str::len);
    for c in &cells {
        for (w, s) in widths.iter_mut().zip(c) {
            *w = (*w).max(s.len());
        }
    }
    let mut out = String::new();
    let mut line = |cols: [&str; 5]| {
        let parts: Vec<String> = cols.iter().zip(widths).map(|(s, w)| format!("{s:<w$}")).collect();
        writeln!(out, "{}", parts.join("  ").trim_end()).unwrap();
    };
    line(header);
    for c in &cells {
        line([&c[0], &c[1], &c[2], &c[3], &c[4]]);
    }
    out
}

pub struct ScheduleArgs {
    pub seq: String,
    pub theta: Rational,
    pub vhat: Rational,
    pub base: u32,
    pub regime: RegimeArg,
}

impl ScheduleArgs {
    pub fn build(&self, depth: u64) -> Result<CantorSchedule, CliError> {
        let seq = make_sequence(&self.seq)?;
        Ok(build_schedule(&seq, &self.theta, &self.vhat, self.regime, depth)?)
    }
}

/// Returns the digit file text and the schedule dump.
pub fn gen_digits(args: &ScheduleArgs, depth: u64) -> Result<(String, String), CliError> {
    let sched = args.build(depth)?;
    let stream = emit_digits(&sched, args.base, depth)?;
    Ok((stream.to_file_string(), sched.to_csv()))
}

pub struct EstimateArgs {
    pub digits: String,
    pub seq: String,
    pub depth: Option<usize>,
    pub burn_in: f64,
}

pub fn estimate(args: &EstimateArgs) -> Result<(String, String), CliError> {
    let stream = DigitStream::read_file(&args.digits).map_err(dioph_lab::Error::from)?;
    let stream = match args.depth {
        Some(d) if d > stream.prefix_len() => {
            return Err(CliError::Invalid(format!(
                "--depth {d} exceeds the {} digits in {}",
                stream.prefix_len(),
                args.digits
            )))
        }
        Some(d) => stream.truncated(d),
        None => stream,
    };
    let seq = make_sequence(&args.seq)?;
    let est = estimate_exponents(&stream, &seq, args.burn_in)?;
    let eta = eta_for_depth(&seq, stream.prefix_len())?;
    let lemma = match check_lemma21(est.v_est, est.vhat_est, eta, LEMMA_TOL) {
        Ok(ok) => ok.to_string(),
        Err(_) => "n/a".into(),
    };
    let csv = format!(
        "depth,k_count,v_est,vhat_est,lemma21_ok\n{},{},{:.6},{:.6},{lemma}\n",
        est.depth, est.k_count, est.v_est, est.vhat_est
    );
    let summary = format!(
        "depth {}: {} dominant pairs ({} burn-in), v ~ {:.6}, vhat ~ {:.6}, eta ~ {eta:.6}, v >= vhat/(eta - vhat): {lemma}",
        est.depth, est.k_count, est.burn_in, est.v_est, est.vhat_est
    );
    Ok((csv, summary))
}

pub fn box_dim(args: &ScheduleArgs, max_depth: u64, mode: SlopeMode) -> Result<(String, String), CliError> {
    let sched = args.build(max_depth)?;
    let series = match mode {
        SlopeMode::AllDepths => series_all_depths(&sched, args.base, max_depth)?,
        SlopeMode::AtBlockEnds => series_at_block_ends(&sched, args.base, max_depth)?,
    };
    let slope = dimension_slope(&series, mode)?;
    let name = match mode {
        SlopeMode::AllDepths => "least-squares slope",
        SlopeMode::AtBlockEnds => "block-end minimum",
    };
    let summary = format!(
        "{name} = {slope:.6} over {} points (local-dimension limit {:.6})",
        series.points.len(),
        to_f64(&sched.local_dimension_limit())
    );
    Ok((series.to_csv(), summary))
}

const SWEEP_HEADER: &str = "index,eta,vhat,theta,dim_eta1,dim_pair_eta1,upper_bound_pair,upper_bound_strip,baseline_bound,thm12_upper,thm13_lower,cor16_exact,v_est,vhat_est,local_dim,random_vhat,note";

struct SweepPlan {
    eta: Rational,
    seq: Option<DenominatorSequence>,
    base: u32,
    depth: u64,
    regime: Option<RegimeArg>,
    rho: Option<Rational>,
    burn_in: f64,
    seed: Option<u64>,
    points: Vec<(Rational, Option<Rational>)>,
}

fn plan(cfg: &ExperimentConfig) -> Result<SweepPlan, CliError> {
    let seq = cfg.seq.as_deref().map(make_sequence).transpose()?;
    let eta = match (&cfg.eta, seq.as_ref().and_then(DenominatorSequence::eta_limit)) {
        (Some(e), Some(s)) if e != &s => {
            return Err(CliError::Invalid(format!(
                "eta = {} disagrees with the sequence's {}",
                display(e),
                display(&s)
            )))
        }
        (Some(e), _) => e.clone(),
        (None, Some(s)) => s,
        (None, None) => {
            return Err(CliError::Invalid("sweep needs `eta` or a sequence with a known growth ratio".into()))
        }
    };
    check_eta(&eta)?;
    let points = match (&cfg.vhat_grid, &cfg.theta_grid) {
        (Some(_), Some(_)) => {
            return Err(CliError::Invalid("give one of `vhat_grid` and `theta_grid`, not both".into()))
        }
        (Some(g), None) => g.points().into_iter().map(|v| (v, cfg.theta.clone())).collect(),
        (None, Some(g)) => {
            let vhat = cfg.vhat.clone().ok_or_else(|| CliError::Invalid("`theta_grid` needs `vhat`".into()))?;
            g.points().into_iter().map(|t| (vhat.clone(), Some(t))).collect()
        }
        (None, None) => return Err(CliError::Invalid("sweep needs `vhat_grid` or `theta_grid`".into())),
    };
    let depth = cfg.depth.unwrap_or(0);
    if depth > 0 && seq.is_none() {
        return Err(CliError::Invalid("`depth` needs `seq`".into()));
    }
    Ok(SweepPlan {
        eta,
        seq,
        base: cfg.base.unwrap_or(3),
        depth,
        regime: cfg.regime,
        rho: cfg.rho.clone(),
        burn_in: cfg.burn_in.unwrap_or(DEFAULT_BURN_IN),
        seed: cfg.seed,
        points,
    })
}

/// `theta` used when a sweep point leaves it open: the optimizer `2/(1 - vhat)`
/// for `eta = 1`, and `eta^ltilde` otherwise.
fn default_theta(eta: &Rational, vhat: &Rational) -> Option<(Rational, RegimeArg)> {
    let one = Rational::one();
    if eta.is_one() {
        (vhat < &one).then(|| (int(2) / (&one - vhat), RegimeArg::Eta1))
    } else {
        let l = thresholds(eta, vhat).ok()?.ltilde;
        Some((pow(eta, l), RegimeArg::Geometric { l }))
    }
}

fn cell(r: Result<DimensionReport, DomainError>) -> String {
    match r {
        Ok(rep) if rep.domain_ok => rep.exact_string(),
        _ => String::new(),
    }
}

fn sweep_row(plan: &SweepPlan, index: usize, vhat: &Rational, theta: Option<&Rational>) -> String {
    let eta = &plan.eta;
    let mut notes: Vec<String> = Vec::new();
    let defaulted = default_theta(eta, vhat);
    let theta = theta.cloned().or_else(|| defaulted.as_ref().map(|d| d.0.clone()));
    let regime = plan.regime.or_else(|| match (&defaulted, eta.is_one()) {
        (_, true) => Some(RegimeArg::Eta1),
        (Some((_, r)), false) => Some(*r),
        (None, false) => None,
    });
    let is_eta1 = eta.is_one();
    let th = theta.as_ref();
    let cols = [
        if is_eta1 { cell(dim_eta1(vhat)) } else { String::new() },
        match (is_eta1, th) {
            (true, Some(t)) => cell(dim_pair_eta1(vhat, t)),
            _ => String::new(),
        },
        th.map(|t| cell(pair_verdict(eta, vhat, t))).unwrap_or_default(),
        match (th, &plan.rho) {
            (Some(t), Some(r)) => cell(upper_bound_strip(eta, vhat, t, r)),
            _ => String::new(),
        },
        cell(baseline_bound(eta, vhat)),
        if is_eta1 { String::new() } else { cell(thm12_upper(eta, vhat)) },
        if is_eta1 { String::new() } else { cell(thm13_lower(eta, vhat)) },
        if is_eta1 { String::new() } else { cell(cor16_exact(eta, vhat)) },
    ];

    let mut est_cols = [String::new(), String::new(), String::new(), String::new()];
    if let (Some(seq), true) = (&plan.seq, plan.depth > 0) {
        match (th, regime) {
            (Some(t), Some(regime)) => match construct_estimate(seq, t, vhat, regime, plan) {
                Ok((v, vh, ld)) => {
                    est_cols[0] = format!("{v:.6}");
                    est_cols[1] = format!("{vh:.6}");
                    est_cols[2] = ld.map(|d| format!("{d:.6}")).unwrap_or_default();
                }
                Err(e) => notes.push(e),
            },
            _ => notes.push("no construction parameters".into()),
        }
        if let Some(seed) = plan.seed {
            match random_baseline(seq, plan, seed.wrapping_add(index as u64)) {
                Ok(v) => est_cols[3] = format!("{v:.6}"),
                Err(e) => notes.push(format!("random baseline: {e}")),
            }
        }
    }
    let note = notes.join("; ").replace(',', ";");
    format!(
        "{index},{},{},{},{},{},{note}",
        display(eta),
        display(vhat),
        th.map(display).unwrap_or_default(),
        cols.join(","),
        est_cols.join(",")
    )
}

fn construct_estimate(
    seq: &DenominatorSequence,
    theta: &Rational,
    vhat: &Rational,
    regime: RegimeArg,
    plan: &SweepPlan,
) -> Result<(f64, f64, Option<f64>), String> {
    let sched = build_schedule(seq, theta, vhat, regime, plan.depth).map_err(|e| e.to_string())?;
    let stream = emit_digits(&sched, plan.base, plan.depth).map_err(|e| e.to_string())?;
    let est = estimate_exponents(&stream, seq, plan.burn_in).map_err(|e| e.to_string())?;
    let last_end = sched.entries.iter().map(|e| e.end).filter(|&m| m <= plan.depth).max();
    let ld = last_end.and_then(|m| local_dimension(&sched, plan.base, m).ok());
    Ok((est.v_est, est.vhat_est, ld))
}

fn random_baseline(seq: &DenominatorSequence, plan: &SweepPlan, seed: u64) -> Result<f64, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let digits = (0..plan.depth).map(|_| rng.gen_range(0..plan.base) as u8).collect();
    let stream = DigitStream::new(plan.base, digits).map_err(|e| e.to_string())?;
    Ok(estimate_exponents(&stream, seq, plan.burn_in).map_err(|e| e.to_string())?.vhat_est)
}

/// Worker count from `DIOPH_LAB_THREADS` (unset or 0 means one per core).
pub fn thread_count() -> Result<usize, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(0),
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Invalid(format!("{THREADS_ENV} = `{v}` is not a nonnegative integer"))),
    }
}

pub fn sweep(cfg: &ExperimentConfig) -> Result<String, CliError> {
    let plan = plan(cfg)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count()?)
        .build()
        .map_err(|e| CliError::Invalid(e.to_string()))?;
    // collect() keeps grid order whatever the scheduling
    let rows: Vec<String> = pool.install(|| {
        plan.points.par_iter().enumerate().map(|(i, (vhat, theta))| sweep_row(&plan, i, vhat, theta.as_ref())).collect()
    });
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    Ok(out)
}
