//! Every confined path on `{0, 1, 2, 3}` up to sixteen steps.

mod common;

use common::{confined_paths, exhaustive_check, stream_table};
use trapwalk::paths::{check_stream_lipschitz, StreamSeries};
use trapwalk::walk::{InteractionKernel, TrajectoryLog, WalkParameters};

#[test]
fn path_counts() {
    // Forced endpoints: from 0 the count of n-step paths follows the
    // transfer matrix of the path graph on four vertices.
    let counts: Vec<usize> = (0..=8).map(|n| confined_paths(2, n).len()).collect();
    assert_eq!(counts, vec![1, 1, 2, 3, 5, 8, 13, 21, 34]);
}

#[test]
fn hand_streams_match_library() {
    let kernel = InteractionKernel::nearest(0.8);
    for path in confined_paths(2, 10) {
        let hand = stream_table(&path, 2, 0.8);
        let series = StreamSeries::from_positions(&kernel, &path, 2).unwrap();
        for (n, row) in hand.iter().enumerate() {
            for j in 0..=3 {
                assert!((series.stream(n as u64, j) - row[j as usize]).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn all_paths_alpha_08() {
    let rep = exhaustive_check(0.8, 16);
    assert!(rep.clean(), "{rep:?}");
}

#[test]
fn all_paths_alpha_045() {
    let rep = exhaustive_check(0.45, 14);
    assert!(rep.clean(), "{rep:?}");
}

#[test]
fn full_log_checker_on_every_path() {
    let params = WalkParameters::new(0.8, 1.0, 0).confined(2);
    for path in confined_paths(2, 12) {
        let log = TrajectoryLog::from_path(params.clone(), &path).unwrap();
        let rep = check_stream_lipschitz(&log, 2).unwrap();
        assert!(rep.holds(), "{path:?} {rep:?}");
    }
}
