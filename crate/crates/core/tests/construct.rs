use dioph_lab::boxdim::cross_check_measure;
use dioph_lab::construct::{
    check_child_additivity, emit_digits, local_dimension, mu_cylinder, schedule_eta1, schedule_eta1_covering,
    schedule_geometric_covering, CantorSchedule, Constraint,
};
use dioph_lab::exponents::matching_times;
use dioph_lab::rational::{from_u64, int, ratio, to_f64, Rational};
use dioph_lab::sequences::{make_sequence, DenominatorSequence};
use proptest::prelude::*;

type Pairs = Vec<(usize, u64, u64)>;

fn pairs_of(sched: &CantorSchedule, base: u32, depth: u64) -> (Pairs, Pairs) {
    let stream = emit_digits(sched, base, depth).unwrap();
    let mt = matching_times(&stream, &sched.seq).unwrap();
    let first = sched.entries[0].index;
    let found = mt.dominant.iter().filter(|p| p.index > first).map(|p| (p.index, p.start, p.end)).collect();
    let want = sched.entries[1..].iter().filter(|e| e.end <= depth).map(|e| (e.index, e.start, e.end)).collect();
    (found, want)
}

#[test]
fn round_trip_recovers_schedule() {
    let eta1 = schedule_eta1_covering(&DenominatorSequence::linear(), &int(3), &ratio(1, 3), 100_000).unwrap();
    let geo_seq = make_sequence("geometric:eta=2,a1=1").unwrap();
    let geo = schedule_geometric_covering(&geo_seq, &int(4), &ratio(3, 2), 2, 100_000).unwrap();
    for sched in [&eta1, &geo] {
        for base in [3, 2] {
            let (found, want) = pairs_of(sched, base, 100_000);
            assert!(want.len() >= 4);
            assert_eq!(found, want, "base {base}");
        }
    }
}

#[test]
fn base2_first_entry_is_shadowed() {
    // the leading 1s of a base-2 stream form a run of length a_{i_1} after a_1
    let sched = schedule_eta1(&DenominatorSequence::linear(), &int(3), &ratio(1, 3), 4).unwrap();
    let stream = emit_digits(&sched, 2, 100).unwrap();
    let mt = matching_times(&stream, &sched.seq).unwrap();
    assert_eq!((mt.dominant[0].start, mt.dominant[0].end), (1, 5));
}

#[test]
fn local_dimension_tends_to_limit() {
    let eta1 = schedule_eta1_covering(&DenominatorSequence::linear(), &int(3), &ratio(1, 3), 1_000_000).unwrap();
    // (theta - 1 - theta vhat) / ((theta - 1)(1 + theta vhat)) at theta = 3, vhat = 1/3
    assert_eq!(eta1.local_dimension_limit(), ratio(1, 4));
    let geo_seq = make_sequence("geometric:eta=2,a1=1").unwrap();
    let geo = schedule_geometric_covering(&geo_seq, &int(4), &ratio(3, 2), 2, 1_000_000).unwrap();
    assert_eq!(geo.local_dimension_limit(), ratio(1, 49));
    for sched in [&eta1, &geo] {
        let limit = to_f64(&sched.local_dimension_limit());
        for e in sched.entries.iter().filter(|e| e.end >= 100_000 && e.end <= 1_000_000) {
            let d = local_dimension(sched, 3, e.end).unwrap();
            assert!((d - limit).abs() <= 0.02, "m_k = {}: {d}", e.end);
        }
    }
}

#[test]
fn measure_is_non_decreasing_and_bounded() {
    let sched = schedule_eta1_covering(&make_sequence("poly:d=2").unwrap(), &int(4), &ratio(1, 2), 50_000).unwrap();
    let mut prev = 0;
    for n in 1..=50_000 {
        let f = mu_cylinder(&sched, 3, n).unwrap().log_b_mu;
        assert!(f >= prev && f <= n);
        prev = f;
    }
}

fn params() -> impl Strategy<Value = (Rational, Rational)> {
    (1i64..=8, 9i64..=12, 1i64..=40).prop_map(|(p, q, extra)| {
        let vhat = ratio(p, q);
        let theta = (int(1) - &vhat).recip() + ratio(extra, 10);
        (vhat, theta)
    })
}

fn seqs() -> impl Strategy<Value = DenominatorSequence> {
    prop_oneof![Just(DenominatorSequence::linear()), Just(make_sequence("poly:d=2").unwrap())]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn schedules_satisfy_invariants((vhat, theta) in params(), seq in seqs()) {
        let sched = schedule_eta1_covering(&seq, &theta, &vhat, 20_000).unwrap();
        let one_plus = int(1) + &theta * &vhat;
        for (k, e) in sched.entries.iter().enumerate() {
            prop_assert!(e.start + 3 <= e.end && e.end + 2 <= e.boundary);
            let m = (&one_plus * from_u64(e.start)).floor();
            prop_assert_eq!(from_u64(e.end), m);
            prop_assert!(e.end + e.spaced * e.gap() < e.boundary);
            prop_assert!(e.end + (e.spaced + 1) * e.gap() >= e.boundary);
            prop_assert_eq!(seq.a(e.index), Some(e.start));
            if let Some(next) = sched.entries.get(k + 1) {
                prop_assert!(next.gap() > e.gap());
                prop_assert_eq!(next.start, e.boundary);
                // the next index is the first with a_j > theta a_{i_k}
                prop_assert!(from_u64(next.start) > &theta * from_u64(e.start));
                prop_assert!(from_u64(seq.a(next.index - 1).unwrap()) <= &theta * from_u64(e.start));
            }
        }
    }

    #[test]
    fn round_trip_in_higher_bases((vhat, theta) in params(), base in prop_oneof![Just(3u32), Just(4), Just(10)]) {
        let sched = schedule_eta1_covering(&DenominatorSequence::linear(), &theta, &vhat, 20_000).unwrap();
        let stream = emit_digits(&sched, base, 20_000).unwrap();
        let mt = matching_times(&stream, &sched.seq).unwrap();
        let found: Vec<_> = mt.dominant.iter().map(|p| (p.index, p.start, p.end)).collect();
        let want: Vec<_> = sched.entries.iter().filter(|e| e.end <= 20_000).map(|e| (e.index, e.start, e.end)).collect();
        prop_assert_eq!(found, want);
    }

    #[test]
    fn counting_matches_measure((vhat, theta) in params(), base in 2u32..=4) {
        let sched = schedule_eta1_covering(&DenominatorSequence::linear(), &theta, &vhat, 5_000).unwrap();
        prop_assert!(cross_check_measure(&sched, base, 5_000).is_ok());
    }

    #[test]
    fn children_carry_parent_mass((vhat, theta) in params(), base in 2u32..=3) {
        let sched = schedule_eta1_covering(&DenominatorSequence::linear(), &theta, &vhat, 24).unwrap();
        // keep the enumeration to at most base^8 leaves
        let depth = (1..=24).take_while(|&n| mu_cylinder(&sched, base, n).unwrap().log_b_mu <= 8).last().unwrap();
        let r = check_child_additivity(&sched, base, depth).unwrap();
        prop_assert!(r.is_ok(), "{:?}", r);
    }

    #[test]
    fn emitted_digits_honor_constraints((vhat, theta) in params(), base in 2u32..=5) {
        let sched = schedule_eta1_covering(&DenominatorSequence::linear(), &theta, &vhat, 3_000).unwrap();
        let stream = emit_digits(&sched, base, 3_000).unwrap();
        for pos in 1..=3_000u64 {
            match sched.constraint_at(pos, base).unwrap() {
                Constraint::Forced(d) => prop_assert_eq!(stream.digit(pos as usize), Some(d)),
                Constraint::Free => prop_assert_eq!(stream.digit(pos as usize), Some(1)),
            }
        }
    }
}
