use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{LocalTimeField, WalkError, WalkParameters, WalkState};
use crate::format::{g17, parse_f64};
use crate::rng::walk_rng;

/// One jump: where the walker was, the stream it felt, and where it went.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    /// Time before the jump.
    pub n: u64,
    /// Position before the jump.
    pub position: i64,
    /// Stream `Δ_n` felt at `position`.
    pub delta: f64,
    /// `+1` or `-1`.
    pub dir: i8,
}

/// Local-time field captured at time `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub n: u64,
    pub position: i64,
    pub local_times: LocalTimeField,
}

/// What `run_walk` keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Recording {
    /// Every step, with its stream.
    Full,
    /// A snapshot every `k` steps.
    Every(u64),
    /// Snapshots at geometrically spaced times, `per_decade` per factor ten.
    Geometric { per_decade: u32 },
}

impl Recording {
    /// `1` means full recording, `0` geometric snapshots, `k > 1` a snapshot
    /// every `k` steps.
    pub fn from_interval(record_interval: u64) -> Self {
        match record_interval {
            0 => Recording::Geometric { per_decade: 10 },
            1 => Recording::Full,
            k => Recording::Every(k),
        }
    }
}

/// Output of [`run_walk`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrajectoryLog {
    pub params: WalkParameters,
    pub steps: u64,
    pub recording: Recording,
    /// Per-step records; empty unless `recording` is `Full`.
    pub records: Vec<StepRecord>,
    /// Thinned snapshots; empty under `Full`.
    pub snapshots: Vec<Snapshot>,
    pub final_position: i64,
    pub final_local_times: LocalTimeField,
}

impl TrajectoryLog {
    pub fn is_full(&self) -> bool {
        self.recording == Recording::Full
    }

    /// Positions `X_0, ..., X_n`; only meaningful for full logs.
    pub fn positions(&self) -> Vec<i64> {
        let mut out: Vec<i64> = self.records.iter().map(|r| r.position).collect();
        out.push(self.final_position);
        out
    }

    /// Rebuilds a full log from a position sequence starting anywhere.
    ///
    /// Streams are recomputed with `params.kernel`; the path must be
    /// nearest-neighbour.
    pub fn from_path(params: WalkParameters, path: &[i64]) -> Option<Self> {
        path.first()?;
        let mut lt = LocalTimeField::new();
        let mut records = Vec::with_capacity(path.len().saturating_sub(1));
        for (n, w) in path.windows(2).enumerate() {
            let dir = w[1] - w[0];
            if dir.abs() != 1 {
                return None;
            }
            let delta = params.kernel.stream(&lt, w[0]);
            records.push(StepRecord {
                n: n as u64,
                position: w[0],
                delta,
                dir: dir as i8,
            });
            lt.increment(if dir > 0 { w[0] + 1 } else { w[0] });
        }
        Some(Self {
            params,
            steps: records.len() as u64,
            recording: Recording::Full,
            records,
            snapshots: Vec::new(),
            final_position: *path.last()?,
            final_local_times: lt,
        })
    }
}

/// Ascending checkpoints `round(H · 10^(-i/per_decade))`, deduplicated,
/// always ending at `horizon`. Empty for a zero horizon.
pub fn geometric_checkpoints(horizon: u64, per_decade: u32) -> Vec<u64> {
    if horizon == 0 {
        return Vec::new();
    }
    let per_decade = per_decade.max(1) as f64;
    let mut out = Vec::new();
    let mut i = 0u32;
    loop {
        let n = (horizon as f64 * 10f64.powf(-(i as f64) / per_decade)).round() as u64;
        if n < 1 {
            break;
        }
        if out.last() != Some(&n) {
            out.push(n);
        }
        if n == 1 {
            break;
        }
        i += 1;
    }
    out.reverse();
    out
}

/// Runs a walk for `steps` steps; see [`Recording::from_interval`].
pub fn run_walk(
    params: WalkParameters,
    steps: u64,
    record_interval: u64,
) -> Result<TrajectoryLog, WalkError> {
    run_walk_with(params, steps, Recording::from_interval(record_interval))
}

pub fn run_walk_with(
    params: WalkParameters,
    steps: u64,
    recording: Recording,
) -> Result<TrajectoryLog, WalkError> {
    let mut state = WalkState::new(params.clone())?;
    let mut rng = walk_rng(params.seed);
    let mut records = Vec::new();
    let mut snapshots = Vec::new();
    let snapshot = |s: &WalkState| Snapshot {
        n: s.steps(),
        position: s.position(),
        local_times: s.local_times().clone(),
    };
    match recording {
        Recording::Full => {
            records.reserve(steps as usize);
            for _ in 0..steps {
                records.push(state.step(&mut rng));
            }
        }
        Recording::Every(k) => {
            let k = k.max(1);
            for _ in 0..steps {
                state.step(&mut rng);
                if state.steps() % k == 0 {
                    snapshots.push(snapshot(&state));
                }
            }
        }
        Recording::Geometric { per_decade } => {
            for target in geometric_checkpoints(steps, per_decade) {
                while state.steps() < target {
                    state.step(&mut rng);
                }
                snapshots.push(snapshot(&state));
            }
        }
    }
    Ok(TrajectoryLog {
        params,
        steps,
        recording,
        records,
        snapshots,
        final_position: state.position(),
        final_local_times: state.local_times().clone(),
    })
}

/// Writes `n,position,delta,dir`, one row per step.
pub fn write_trajectory_csv<W: Write>(mut w: W, records: &[StepRecord]) -> io::Result<()> {
    writeln!(w, "n,position,delta,dir")?;
    for r in records {
        writeln!(w, "{},{},{},{}", r.n, r.position, g17(r.delta), r.dir)?;
    }
    w.flush()
}

fn bad_data(line: usize, msg: impl Into<String>) -> io::Error {
    io::Error::new(
        io::ErrorKind::InvalidData,
        format!("line {}: {}", line, msg.into()),
    )
}

/// Reads what [`write_trajectory_csv`] writes.
pub fn read_trajectory_csv<R: BufRead>(r: R) -> io::Result<Vec<StepRecord>> {
    let mut lines = r.lines();
    let header = lines.next().transpose()?;
    if header.as_deref().map(str::trim) != Some("n,position,delta,dir") {
        return Err(bad_data(1, "expected header n,position,delta,dir"));
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let lineno = i + 2;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(bad_data(lineno, "expected 4 fields"));
        }
        let n = fields[0].parse().map_err(|_| bad_data(lineno, "bad n"))?;
        let position = fields[1]
            .parse()
            .map_err(|_| bad_data(lineno, "bad position"))?;
        let delta = parse_f64(fields[2]).ok_or_else(|| bad_data(lineno, "bad delta"))?;
        let dir: i8 = fields[3].parse().map_err(|_| bad_data(lineno, "bad dir"))?;
        if dir != 1 && dir != -1 {
            return Err(bad_data(lineno, "dir must be 1 or -1"));
        }
        out.push(StepRecord {
            n,
            position,
            delta,
            dir,
        });
    }
    Ok(out)
}

/// Writes `j,ell` for every edge of the support, in increasing `j`.
pub fn write_local_times_csv<W: Write>(mut w: W, lt: &LocalTimeField) -> io::Result<()> {
    writeln!(w, "j,ell")?;
    for (j, c) in lt.iter() {
        writeln!(w, "{},{}", j, c)?;
    }
    w.flush()
}

pub fn read_local_times_csv<R: BufRead>(r: R) -> io::Result<LocalTimeField> {
    let mut lines = r.lines();
    let header = lines.next().transpose()?;
    if header.as_deref().map(str::trim) != Some("j,ell") {
        return Err(bad_data(1, "expected header j,ell"));
    }
    let mut lt = LocalTimeField::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (j, c) = line
            .split_once(',')
            .ok_or_else(|| bad_data(i + 2, "expected 2 fields"))?;
        let j: i64 = j.parse().map_err(|_| bad_data(i + 2, "bad j"))?;
        let c: u64 = c.trim().parse().map_err(|_| bad_data(i + 2, "bad ell"))?;
        lt.set(j, c);
    }
    Ok(lt)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checkpoints_are_geometric() {
        assert_eq!(geometric_checkpoints(0, 4), Vec::<u64>::new());
        assert_eq!(geometric_checkpoints(1000, 1), vec![1, 10, 100, 1000]);
        let c = geometric_checkpoints(1_000_000, 4);
        assert_eq!(*c.last().unwrap(), 1_000_000);
        assert!(c.contains(&10_000));
        assert!(c.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn zero_steps() {
        let log = run_walk(WalkParameters::new(0.8, 1.0, 7), 0, 1).unwrap();
        assert!(log.records.is_empty());
        assert_eq!(log.final_position, 0);
        assert_eq!(log.final_local_times.total(), 0);
    }

    #[test]
    fn same_seed_same_log() {
        let p = WalkParameters::new(0.8, 1.0, 99).confined(3);
        let a = run_walk(p.clone(), 5000, 1).unwrap();
        let b = run_walk(p, 5000, 1).unwrap();
        assert_eq!(a.records, b.records);
        assert_eq!(a.final_local_times, b.final_local_times);
    }

    #[test]
    fn nearest_neighbour_records() {
        let log = run_walk(WalkParameters::new(0.5, 1.0, 3), 2000, 1).unwrap();
        let pos = log.positions();
        assert!(pos.windows(2).all(|w| (w[1] - w[0]).abs() == 1));
    }

    #[test]
    fn thinned_recording() {
        let log = run_walk(WalkParameters::new(0.5, 1.0, 3), 1000, 100).unwrap();
        assert!(log.records.is_empty());
        assert_eq!(log.snapshots.len(), 10);
        assert_eq!(log.snapshots[9].local_times, log.final_local_times);
        let full = run_walk(WalkParameters::new(0.5, 1.0, 3), 1000, 1).unwrap();
        assert_eq!(full.final_local_times, log.final_local_times);
    }

    #[test]
    fn csv_round_trip() {
        let log = run_walk(WalkParameters::new(0.8, 1.0, 5).confined(2), 300, 1).unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &log.records).unwrap();
        assert!(buf.starts_with(b"n,position,delta,dir\n"));
        let back = read_trajectory_csv(&buf[..]).unwrap();
        assert_eq!(back, log.records);

        let mut buf = Vec::new();
        write_local_times_csv(&mut buf, &log.final_local_times).unwrap();
        let lt = read_local_times_csv(&buf[..]).unwrap();
        assert_eq!(lt.total(), 300);
        for j in 0..5 {
            assert_eq!(lt.get(j), log.final_local_times.get(j));
        }
    }

    #[test]
    fn rejects_garbage() {
        assert!(read_trajectory_csv(&b"a,b\n"[..]).is_err());
        assert!(read_trajectory_csv(&b"n,position,delta,dir\n0,0,0,2\n"[..]).is_err());
    }

    #[test]
    fn from_path_recomputes_streams() {
        let log = TrajectoryLog::from_path(WalkParameters::new(0.8, 1.0, 0), &[0, 1, 2, 1]).unwrap();
        assert_eq!(log.records.len(), 3);
        assert!((log.records[2].delta - 0.2).abs() < 1e-12);
        assert!(TrajectoryLog::from_path(WalkParameters::new(0.8, 1.0, 0), &[0, 2]).is_none());
    }
}
