//! Acceptance criteria, one PASS/FAIL line each.

use std::process::ExitCode;
use std::time::Instant;

use dioph_lab::boxdim::{cross_check_measure, dimension_slope, series_at_block_ends, SlopeMode};
use dioph_lab::construct::{
    check_child_additivity, emit_digits, local_dimension, schedule_eta1, schedule_eta1_covering,
    schedule_geometric_covering, CantorSchedule,
};
use dioph_lab::digits::DigitStream;
use dioph_lab::dimfx::{
    baseline_bound, cor16_exact, dim_eta1, l0, pair_verdict, thm12_upper, thm13_lower, upper_bound_pair,
};
use dioph_lab::exponents::{
    check_lemma21, default_vhat_grid, estimate_exponents, estimate_vhat_definition, eta_for_depth, matching_times,
    ExponentEstimate, DEFAULT_BURN_IN,
};
use dioph_lab::rational::{int, pow, ratio, Rational};
use dioph_lab::sequences::{make_sequence, DenominatorSequence};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DEPTH: u64 = 1_000_000;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, ok: impl Into<String>, fail: impl Into<String>) -> Outcome {
    if cond {
        Ok(ok.into())
    } else {
        Err(fail.into())
    }
}

fn value(r: &dioph_lab::dimfx::DimensionReport) -> Rational {
    r.value.clone().expect("value present")
}

fn eta1_schedule() -> CantorSchedule {
    schedule_eta1_covering(&DenominatorSequence::linear(), &int(3), &ratio(1, 3), DEPTH).unwrap()
}

fn geometric_schedule() -> CantorSchedule {
    let seq = make_sequence("geometric:eta=2,a1=1").unwrap();
    schedule_geometric_covering(&seq, &int(4), &ratio(3, 2), 2, DEPTH).unwrap()
}

struct RoundTrip {
    est: ExponentEstimate,
    vhat_def: f64,
}

fn round_trip(sched: &CantorSchedule, base: u32) -> Result<RoundTrip, String> {
    let stream = emit_digits(sched, base, DEPTH).map_err(|e| e.to_string())?;
    let est = estimate_exponents(&stream, &sched.seq, DEFAULT_BURN_IN).map_err(|e| e.to_string())?;
    let mt = matching_times(&stream, &sched.seq).map_err(|e| e.to_string())?;
    let grid = default_vhat_grid(&stream, &sched.seq, &mt, est.burn_in);
    let vhat_def = estimate_vhat_definition(&stream, &sched.seq, &grid).map_err(|e| e.to_string())?;
    Ok(RoundTrip { est, vhat_def })
}

fn criterion1() -> Outcome {
    let a = value(&dim_eta1(&ratio(1, 3)).unwrap());
    let b = value(&upper_bound_pair(&int(2), &ratio(3, 2), &int(4)).unwrap());
    let c = value(&thm13_lower(&int(2), &ratio(3, 2)).unwrap());
    let d = value(&baseline_bound(&int(2), &ratio(3, 2)).unwrap());
    let e = value(&cor16_exact(&int(2), &ratio(7, 5)).unwrap());
    // oracle: the same fractions reduced by hand
    let oracle_pair = (int(8) - int(1) - int(6)) / ((int(8) - int(1)) * (int(1) + int(6)));
    let oracle_eta1 = (ratio(2, 3) / ratio(4, 3)) * (ratio(2, 3) / ratio(4, 3));
    let ok =
        a == oracle_eta1 && a == ratio(1, 4) && b == oracle_pair && c == ratio(1, 49) && d == c && e == ratio(1, 33);
    check(ok, "1/4, 1/49, 1/49 = 1/49, 1/33", format!("got {a}, {b}, {c}, {d}, {e}"))
}

/// Rational samples strictly inside the open intervals for `l = l0..l0+3`.
fn thm12_samples(eta: &Rational, count: usize) -> Vec<Rational> {
    let l0 = l0(eta).unwrap();
    let per = count / 4;
    let mut out = Vec::new();
    for l in l0..l0 + 4 {
        let el = pow(eta, l);
        let mut lo = eta - int(2) * eta / (&el + int(1));
        if l == l0 && lo < int(1) {
            lo = int(1);
        }
        let hi = eta - int(2) / &el;
        for j in 1..=per {
            out.push(&lo + (&hi - &lo) * ratio(j as i64, per as i64 + 1));
        }
    }
    out
}

fn criterion2() -> Outcome {
    let mut checked = 0;
    for eta in [ratio(3, 2), int(2), int(3)] {
        for vhat in thm12_samples(&eta, 200) {
            let upper = thm12_upper(&eta, &vhat).unwrap();
            if !upper.domain_ok {
                return Err(format!("eta {eta} vhat {vhat}: sample outside the union"));
            }
            let upper = value(&upper);
            let base = value(&baseline_bound(&eta, &vhat).unwrap());
            let lower = value(&thm13_lower(&eta, &vhat).unwrap());
            if upper >= base || lower > upper {
                return Err(format!("eta {eta} vhat {vhat}: lower {lower} upper {upper} baseline {base}"));
            }
            checked += 1;
        }
    }
    check(checked == 600, format!("{checked} samples strict"), format!("only {checked} samples"))
}

fn criterion3() -> Outcome {
    let mut checked = 0;
    for eta in [ratio(3, 2), int(2), int(3)] {
        let l0 = l0(&eta).unwrap();
        for l in l0..=l0 + 3 {
            let vhat = &eta - int(2) / pow(&eta, l);
            let lower = value(&thm13_lower(&eta, &vhat).unwrap());
            let base = value(&baseline_bound(&eta, &vhat).unwrap());
            if lower != base {
                return Err(format!("eta {eta} l {l}: {lower} != {base}"));
            }
            checked += 1;
        }
    }
    check(true, format!("{checked} exact equalities"), "")
}

fn near(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn criterion4() -> Outcome {
    let sched = eta1_schedule();
    let mut lines = Vec::new();
    let mut ok = true;
    for base in [3, 2] {
        let rt = round_trip(&sched, base)?;
        let agree = (rt.est.vhat_est - rt.vhat_def).abs();
        ok &= near(rt.est.vhat_est, 1.0 / 3.0, 0.02) && near(rt.est.v_est, 1.0, 0.05) && agree <= 0.01;
        lines.push(format!("b={base}: vhat {:.6} v {:.6} vhat_def {:.6}", rt.est.vhat_est, rt.est.v_est, rt.vhat_def));
    }
    check(ok, lines.join("; "), lines.join("; "))
}

fn criterion5() -> Outcome {
    let rt = round_trip(&geometric_schedule(), 3)?;
    let msg = format!("vhat {:.6} v {:.6} ({} dominant pairs)", rt.est.vhat_est, rt.est.v_est, rt.est.k_count);
    check(near(rt.est.vhat_est, 1.5, 0.05) && near(rt.est.v_est, 6.0, 0.1), msg.clone(), msg)
}

fn last_block_end(sched: &CantorSchedule) -> u64 {
    sched.entries.iter().map(|e| e.end).filter(|&m| m <= DEPTH).max().unwrap()
}

fn criterion6() -> Outcome {
    let (s1, s2) = (eta1_schedule(), geometric_schedule());
    let (m1, m2) = (last_block_end(&s1), last_block_end(&s2));
    let d1 = local_dimension(&s1, 3, m1).map_err(|e| e.to_string())?;
    let d2 = local_dimension(&s2, 3, m2).map_err(|e| e.to_string())?;
    let msg = format!("eta=1: {d1:.6} at m_k={m1}; eta=2: {d2:.6} at m_k={m2}");
    check(m1 >= 100_000 && m2 >= 100_000 && near(d1, 0.25, 0.02) && near(d2, 1.0 / 49.0, 0.01), msg.clone(), msg)
}

fn criterion7() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for (sched, target, tol) in [(eta1_schedule(), 0.25, 0.02), (geometric_schedule(), 1.0 / 49.0, 0.01)] {
        for base in [3, 2] {
            if let Err(e) = cross_check_measure(&sched, base, 100_000) {
                return Err(format!("count vs measure, base {base}: {e}"));
            }
        }
        let series = series_at_block_ends(&sched, 3, DEPTH).map_err(|e| e.to_string())?;
        let slope = dimension_slope(&series, SlopeMode::AtBlockEnds).map_err(|e| e.to_string())?;
        ok &= near(slope, target, tol);
        lines.push(format!("block-end slope {slope:.6} (target {target:.6})"));
    }
    check(ok, format!("counts exact to 1e5; {}", lines.join("; ")), lines.join("; "))
}

fn random_stream(rng: &mut ChaCha8Rng) -> (DigitStream, DenominatorSequence) {
    let base = [2u32, 3, 10][rng.gen_range(0..3)];
    let seq = DenominatorSequence::linear();
    let digits = (0..100_000).map(|_| rng.gen_range(0..base) as u8).collect();
    (DigitStream::new(base, digits).unwrap(), seq)
}

fn criterion8() -> Outcome {
    const TOL: f64 = 0.05;
    let mut checked = 0;
    for sched in [eta1_schedule(), geometric_schedule()] {
        let stream = emit_digits(&sched, 3, DEPTH).map_err(|e| e.to_string())?;
        let est = estimate_exponents(&stream, &sched.seq, DEFAULT_BURN_IN).map_err(|e| e.to_string())?;
        let eta = eta_for_depth(&sched.seq, stream.prefix_len()).map_err(|e| e.to_string())?;
        if !check_lemma21(est.v_est, est.vhat_est, eta, TOL).map_err(|e| e.to_string())? {
            return Err(format!("construction: v {} vhat {} eta {eta}", est.v_est, est.vhat_est));
        }
        checked += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for i in 0..100 {
        let (stream, seq) = random_stream(&mut rng);
        let est = estimate_exponents(&stream, &seq, DEFAULT_BURN_IN).map_err(|e| format!("stream {i}: {e}"))?;
        let eta = eta_for_depth(&seq, stream.prefix_len()).map_err(|e| e.to_string())?;
        if !check_lemma21(est.v_est, est.vhat_est, eta, TOL).map_err(|e| e.to_string())? {
            return Err(format!("random stream {i}: v {} vhat {} eta {eta}", est.v_est, est.vhat_est));
        }
        checked += 1;
    }
    check(true, format!("{checked} streams"), "")
}

fn criterion9() -> Outcome {
    let (eta, vhat) = (int(2), ratio(3, 2));
    let mut grid_points = 0;
    for k in 0..400 {
        let theta = ratio(k, 100);
        if theta == int(2) {
            continue;
        }
        let r = pair_verdict(&eta, &vhat, &theta).map_err(|e| e.to_string())?;
        if !r.is_empty_set() {
            return Err(format!("theta {theta} not reported empty"));
        }
        grid_points += 1;
    }
    for theta in [int(2), int(4), ratio(9, 2)] {
        if pair_verdict(&eta, &vhat, &theta).map_err(|e| e.to_string())?.is_empty_set() {
            return Err(format!("theta {theta} wrongly reported empty"));
        }
    }
    check(true, format!("{grid_points} grid points empty; 2, 4, 9/2 admissible"), "")
}

fn criterion10() -> Outcome {
    let sched = schedule_eta1(&DenominatorSequence::linear(), &int(3), &ratio(1, 3), 3).unwrap();
    match check_child_additivity(&sched, 3, 30).map_err(|e| e.to_string())? {
        Ok(parents) => check(true, format!("{parents} admissible parents balanced"), ""),
        Err(f) => Err(format!("{f:?}")),
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("exact formulas", criterion1),
        ("strictness sweep", criterion2),
        ("remark equality", criterion3),
        ("round-trip eta=1", criterion4),
        ("round-trip eta=2", criterion5),
        ("local dimension", criterion6),
        ("box counting", criterion7),
        ("exponent inequality", criterion8),
        ("forbidden gaps", criterion9),
        ("child-mass additivity", criterion10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2} {name}: {detail} [{secs:.2}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {:>2} {name}: {detail} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
