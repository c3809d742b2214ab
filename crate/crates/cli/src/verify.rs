//! Quick-scale invariant checks behind `dioph-lab verify`.

use dioph_lab::boxdim::cross_check_measure;
use dioph_lab::construct::{
    check_child_additivity, emit_digits, local_dimension, schedule_eta1_covering, schedule_geometric_covering,
    CantorSchedule,
};
use dioph_lab::digits::DigitStream;
use dioph_lab::dimfx::{baseline_bound, cor16_exact, dim_eta1, thm12_upper, thm13_lower};
use dioph_lab::exponents::{check_lemma21, estimate_exponents, eta_for_depth, matching_times, DEFAULT_BURN_IN};
use dioph_lab::rational::{int, ratio, to_f64, Rational};
use dioph_lab::sequences::{make_sequence, DenominatorSequence};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Check {
    pub name: &'static str,
    pub ok: bool,
    pub detail: String,
}

type Outcome = Result<(bool, String), String>;
type CheckFn = (&'static str, fn() -> Outcome);

fn eta1() -> Result<CantorSchedule, String> {
    schedule_eta1_covering(&DenominatorSequence::linear(), &int(3), &ratio(1, 3), 60_000).map_err(|e| e.to_string())
}

fn geometric() -> Result<CantorSchedule, String> {
    let seq = make_sequence("geometric:eta=2,a1=1").map_err(|e| e.to_string())?;
    schedule_geometric_covering(&seq, &int(4), &ratio(3, 2), 2, 60_000).map_err(|e| e.to_string())
}

fn round_trip() -> Outcome {
    let mut detail = Vec::new();
    for (name, sched) in [("eta1", eta1()?), ("geometric", geometric()?)] {
        for base in [2, 3] {
            let depth = 60_000;
            let stream = emit_digits(&sched, base, depth).map_err(|e| e.to_string())?;
            let mt = matching_times(&stream, &sched.seq).map_err(|e| e.to_string())?;
            let first = sched.entries[0].index;
            let found: Vec<_> =
                mt.dominant.iter().filter(|p| p.index > first).map(|p| (p.index, p.start, p.end)).collect();
            let want: Vec<_> =
                sched.entries[1..].iter().filter(|e| e.end <= depth).map(|e| (e.index, e.start, e.end)).collect();
            if found != want {
                return Ok((
                    false,
                    format!("{name} base {base}: found {} pairs, scheduled {}", found.len(), want.len()),
                ));
            }
            detail.push(format!("{name}/b{base}: {}", want.len()));
        }
    }
    Ok((true, detail.join(", ")))
}

fn measure_vs_count() -> Outcome {
    for sched in [eta1()?, geometric()?] {
        for base in [2, 3, 10] {
            if let Err(e) = cross_check_measure(&sched, base, 20_000) {
                return Ok((false, e.to_string()));
            }
        }
    }
    Ok((true, "bases 2, 3, 10 up to depth 20000".into()))
}

fn additivity() -> Outcome {
    let sched = eta1()?;
    match check_child_additivity(&sched, 3, 20).map_err(|e| e.to_string())? {
        Ok(n) => Ok((true, format!("{n} parents"))),
        Err(f) => Ok((false, format!("{f:?}"))),
    }
}

fn local_dim() -> Outcome {
    let mut detail = Vec::new();
    for sched in [eta1()?, geometric()?] {
        let limit = to_f64(&sched.local_dimension_limit());
        let m = sched.entries.iter().map(|e| e.end).filter(|&m| m <= 60_000).max().ok_or("no block ends")?;
        let d = local_dimension(&sched, 3, m).map_err(|e| e.to_string())?;
        if (d - limit).abs() > 0.03 {
            return Ok((false, format!("{d:.6} at {m} vs limit {limit:.6}")));
        }
        detail.push(format!("{d:.6} -> {limit:.6}"));
    }
    Ok((true, detail.join(", ")))
}

fn estimator_recovers_vhat() -> Outcome {
    let stream = emit_digits(&eta1()?, 3, 60_000).map_err(|e| e.to_string())?;
    let est =
        estimate_exponents(&stream, &DenominatorSequence::linear(), DEFAULT_BURN_IN).map_err(|e| e.to_string())?;
    let ok = (est.vhat_est - 1.0 / 3.0).abs() < 0.02 && est.vhat_est <= est.v_est;
    Ok((ok, format!("vhat ~ {:.6}, v ~ {:.6}", est.vhat_est, est.v_est)))
}

fn lemma_on_random_streams() -> Outcome {
    let seq = DenominatorSequence::linear();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut checked = 0;
    for _ in 0..10 {
        let base = [2u32, 3, 10][rng.gen_range(0..3)];
        let digits = (0..20_000).map(|_| rng.gen_range(0..base) as u8).collect();
        let stream = DigitStream::new(base, digits).map_err(|e| e.to_string())?;
        let Ok(est) = estimate_exponents(&stream, &seq, DEFAULT_BURN_IN) else { continue };
        let eta = eta_for_depth(&seq, stream.prefix_len()).map_err(|e| e.to_string())?;
        if let Ok(false) = check_lemma21(est.v_est, est.vhat_est, eta, 0.05) {
            return Ok((false, format!("v = {:.6}, vhat = {:.6}", est.v_est, est.vhat_est)));
        }
        checked += 1;
    }
    Ok((checked > 0, format!("{checked} streams")))
}

fn formula_anchors() -> Outcome {
    let val = |r: Result<_, _>| -> Result<Rational, String> {
        let rep: dioph_lab::dimfx::DimensionReport = r.map_err(|e: dioph_lab::DomainError| e.to_string())?;
        Ok(rep.value.ok_or("no value")?)
    };
    let eta = int(2);
    let v = ratio(7, 5);
    let got = [
        val(dim_eta1(&ratio(1, 3)))?,
        val(cor16_exact(&eta, &v))?,
        val(thm12_upper(&eta, &v))?,
        val(thm13_lower(&eta, &v))?,
    ];
    let ok = got[0] == ratio(1, 4) && got[1] == ratio(1, 33) && got[2] == got[1] && got[3] == got[1];
    Ok((ok, format!("dim_eta1(1/3) = {}, (2, 7/5) -> {}", got[0], got[1])))
}

fn sequences_increase() -> Outcome {
    for spec in ["linear", "poly:d=2", "poly:d=3", "geometric:eta=2,a1=1", "geometric:eta=3/2,a1=2"] {
        let seq = make_sequence(spec).map_err(|e| e.to_string())?;
        let terms: Vec<u64> = (1..=40).map_while(|n| seq.a(n)).collect();
        if terms.len() < 10 || terms.windows(2).any(|w| w[0] >= w[1]) {
            return Ok((false, format!("{spec}: {terms:?}")));
        }
    }
    Ok((true, "5 sequences".into()))
}

fn dominant_gaps_increase() -> Outcome {
    let seq = DenominatorSequence::linear();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..5 {
        let digits = (0..20_000).map(|_| rng.gen_range(0..2u8)).collect();
        let stream = DigitStream::new(2, digits).map_err(|e| e.to_string())?;
        let mt = matching_times(&stream, &seq).map_err(|e| e.to_string())?;
        if mt.dominant.windows(2).any(|w| w[0].gap() >= w[1].gap() || w[0].index >= w[1].index) {
            return Ok((false, "dominant gaps not strictly increasing".into()));
        }
    }
    Ok((true, "5 binary streams".into()))
}

fn bounds_are_ordered() -> Outcome {
    let mut checked = 0;
    for eta in [ratio(3, 2), int(2), int(3)] {
        for p in 1..60 {
            let vhat = &eta * ratio(p, 60);
            let (Ok(up), Ok(lo), Ok(base)) =
                (thm12_upper(&eta, &vhat), thm13_lower(&eta, &vhat), baseline_bound(&eta, &vhat))
            else {
                continue;
            };
            let (Some(up), Some(base)) = (up.value, base.value) else { continue };
            if up >= base || lo.value.is_some_and(|lo| lo > up) {
                return Ok((false, format!("eta = {eta}, vhat = {vhat}")));
            }
            checked += 1;
        }
    }
    Ok((checked > 0, format!("{checked} grid points")))
}

pub fn run() -> Vec<Check> {
    let checks: [CheckFn; 10] = [
        ("formula anchors", formula_anchors),
        ("sequences strictly increase", sequences_increase),
        ("dominant gaps strictly increase", dominant_gaps_increase),
        ("thm13_lower <= thm12_upper < baseline_bound", bounds_are_ordered),
        ("schedule round trip", round_trip),
        ("measure equals cylinder count", measure_vs_count),
        ("child additivity", additivity),
        ("local dimension near limit", local_dim),
        ("estimator recovers vhat", estimator_recovers_vhat),
        ("v >= vhat/(eta - vhat) on random streams", lemma_on_random_streams),
    ];
    checks
        .iter()
        .map(|(name, f)| match f() {
            Ok((ok, detail)) => Check { name, ok, detail },
            Err(e) => Check { name, ok: false, detail: format!("error: {e}") },
        })
        .collect()
}
