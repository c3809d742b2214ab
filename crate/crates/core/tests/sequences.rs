use dioph_lab::rational::{from_u64, int, ratio, to_f64};
use dioph_lab::sequences::{default_window, eta_estimate, make_sequence, DenominatorSequence};

#[test]
fn polynomial_kinds_approach_one() {
    for spec in ["linear", "poly:d=2", "poly:d=3"] {
        let seq = make_sequence(spec).unwrap();
        for n_max in [10_000usize, 100_000] {
            let eta = eta_estimate(&seq, n_max, default_window(n_max)).unwrap();
            assert!(eta >= int(1));
            assert!(to_f64(&eta) - 1.0 < 1e-3, "{spec} at {n_max}: {eta}");
        }
    }
}

#[test]
fn geometric_estimate_close_to_ratio() {
    for (eta, a1) in [(int(2), 1u64), (ratio(3, 2), 1), (int(3), 5), (ratio(7, 5), 10)] {
        let seq = DenominatorSequence::geometric(eta.clone(), a1).unwrap();
        let len = seq.materialized_len().unwrap();
        let window = default_window(len);
        let est = eta_estimate(&seq, len, window).unwrap();
        let tol = from_u64(seq.a(len - window).unwrap()).recip();
        let diff = if est > eta { &est - &eta } else { &eta - &est };
        assert!(diff <= tol, "eta {eta}: estimate {est}");
    }
}

#[test]
fn sequences_strictly_increase() {
    for spec in ["linear", "poly:d=2", "geometric:eta=3/2,a1=1", "geometric:eta=2,a1=1"] {
        let seq = make_sequence(spec).unwrap();
        let upto = seq.materialized_len().unwrap_or(10_000).min(10_000);
        for n in 1..upto {
            assert!(seq.a(n).unwrap() < seq.a(n + 1).unwrap(), "{spec} at {n}");
        }
    }
}

#[test]
fn index_search_agrees_with_scan() {
    let seq = make_sequence("poly:d=2").unwrap();
    for value in 0..2000u64 {
        let scan = (1..).find(|&n| seq.a(n).unwrap() > value).unwrap();
        assert_eq!(seq.first_index_above(value), Some(scan));
        assert_eq!(seq.last_index_at_most(value), scan - 1);
    }
}

#[test]
fn explicit_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.txt");
    std::fs::write(&path, "1\n4\n9\n16\n").unwrap();
    let seq = make_sequence(&format!("file:{}", path.display())).unwrap();
    assert_eq!(seq.a(3), Some(9));
    assert_eq!(seq.a(5), None);
    std::fs::write(&path, "1\n4\n4\n").unwrap();
    assert!(make_sequence(&format!("file:{}", path.display())).is_err());
}
