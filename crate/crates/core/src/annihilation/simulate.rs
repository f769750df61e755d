//! Exact event-driven simulation of the annihilation dynamics.
//!
//! State: sinks (at rest accumulating mass at rate 2, or moving at unit
//! speed) and the monotone runs of the initial potential, each consumed
//! bottom-up by the sink it feeds while that sink rests. Events are
//! run exhaustions (a resting sink's side empties, it starts moving) and
//! sink meets over empty gaps. Everything between events is linear, so
//! event times are closed-form; no time stepping.

use super::potential::{EvolvedPotential, Feature, Potential};
use super::AnnihilationError;
use std::cmp::Reverse;
use std::collections::BinaryHeap;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MergeEvent {
    pub t: f64,
    pub partner: usize,
    pub merged_into: usize,
}

/// Trajectory of one sink: breakpoints `(t, x, mass)` at its state changes;
/// between breakpoints both position and mass are linear.
#[derive(Debug, Clone)]
pub struct SinkTrajectory {
    pub id: usize,
    pub born: f64,
    pub breakpoints: Vec<(f64, f64, f64)>,
    pub merge: Option<MergeEvent>,
}

impl SinkTrajectory {
    /// Position and mass at `t` within this trajectory's lifetime. Valid on
    /// fully simulated trajectories, where every phase is closed by a
    /// breakpoint; linear interpolation between breakpoints is then exact.
    pub fn state_at(&self, t: f64) -> Option<(f64, f64)> {
        if t < self.born - 1e-12 {
            return None;
        }
        if let Some(m) = &self.merge {
            if t > m.t + 1e-12 {
                return None;
            }
        }
        let bp = &self.breakpoints;
        let i = bp.partition_point(|p| p.0 <= t);
        if i == 0 {
            return Some((bp[0].1, bp[0].2));
        }
        let (t0, x0, m0) = bp[i - 1];
        if i == bp.len() {
            return Some((x0, m0));
        }
        let (t1, x1, m1) = bp[i];
        if t1 <= t0 {
            return Some((x1, m1));
        }
        let w = (t - t0) / (t1 - t0);
        Some((x0 + w * (x1 - x0), m0 + w * (m1 - m0)))
    }

    /// Is the sink accumulating mass at `t` (strictly inside a rest phase)?
    pub fn growing_at(&self, t: f64) -> Option<bool> {
        if t < self.born - 1e-12 {
            return None;
        }
        if let Some(m) = &self.merge {
            if t > m.t + 1e-12 {
                return None;
            }
        }
        let bp = &self.breakpoints;
        let i = bp.partition_point(|p| p.0 <= t);
        if i == 0 || i == bp.len() {
            return Some(false);
        }
        let (t0, _, m0) = bp[i - 1];
        let (t1, _, m1) = bp[i];
        Some(t1 > t0 && m1 > m0 + 1e-15 * (1.0 + m0))
    }
}

#[derive(Debug, Clone, Copy)]
struct Run {
    /// Potential value at the consumed (bottom) end.
    lo: f64,
    /// Potential value at the top (saddle or boundary zero).
    hi: f64,
    /// Position of the bottom extremum.
    x_bottom: f64,
    /// Potential increases with x (particles drift left).
    ascending: bool,
    /// Consumed height so far.
    front: f64,
    front_t: f64,
    /// Front advancing now (the eater rests).
    active: bool,
    exhausted: bool,
}

impl Run {
    fn front_at(&self, t: f64) -> f64 {
        if self.exhausted {
            return self.hi;
        }
        if self.active {
            (self.front + (t - self.front_t)).min(self.hi)
        } else {
            self.front
        }
    }

    /// Physical x-interval and psi-range of the alive part at time `t`:
    /// ((x_lo, psi_lo), (x_hi, psi_hi)) with x increasing.
    fn alive_piece(&self, t: f64) -> Option<((f64, f64), (f64, f64))> {
        let f = self.front_at(t);
        if f >= self.hi {
            return None;
        }
        if self.ascending {
            // orig x of height p: x_bottom + (p - lo); drift -t
            let x0 = self.x_bottom + (f - self.lo) - t;
            let x1 = self.x_bottom + (self.hi - self.lo) - t;
            Some(((x0, f), (x1, self.hi)))
        } else {
            // orig x of height p: x_bottom - (p - lo); drift +t
            let x0 = self.x_bottom - (self.hi - self.lo) + t;
            let x1 = self.x_bottom - (f - self.lo) + t;
            Some(((x0, self.hi), (x1, f)))
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct SinkState {
    alive: bool,
    pos0: f64,
    t0: f64,
    vel: f64,
    mass0: f64,
    rate: f64,
    left_run: Option<usize>,
    right_run: Option<usize>,
    left_nb: Option<usize>,
    right_nb: Option<usize>,
    seq: u64,
}

impl SinkState {
    fn pos(&self, t: f64) -> f64 {
        self.pos0 + self.vel * (t - self.t0)
    }
    fn mass(&self, t: f64) -> f64 {
        self.mass0 + self.rate * (t - self.t0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Event {
    /// A resting sink's run empties: `side` is 0 for left, 1 for right.
    Exhaust { sink: usize, side: u8, seq: u64 },
    Meet { left: usize, right: usize, seq: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Scheduled {
    t: f64,
    event: Event,
}

impl Eq for Scheduled {}
impl PartialOrd for Scheduled {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Scheduled {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.t
            .partial_cmp(&other.t)
            .unwrap_or(std::cmp::Ordering::Equal)
    }
}

/// Event-driven annihilation simulation of one potential.
pub struct Simulation {
    x_left: f64,
    x_right: f64,
    t_max: f64,
    now: f64,
    runs: Vec<Run>,
    sinks: Vec<SinkState>,
    heap: BinaryHeap<Reverse<Scheduled>>,
    pub trajectories: Vec<SinkTrajectory>,
    finished: bool,
}

pub fn simulate_sinks(pot: &Potential) -> Result<Vec<SinkTrajectory>, AnnihilationError> {
    let mut sim = Simulation::new(pot)?;
    // The terminal event sits at t_max up to rounding; drain everything.
    sim.run_to(f64::INFINITY);
    Ok(sim.trajectories)
}

impl Simulation {
    pub fn new(pot: &Potential) -> Result<Self, AnnihilationError> {
        let e = pot.excursion().extrema();
        let xs = pot.positions();
        let n = pot.excursion().num_maxima();
        // Monotone runs between consecutive extrema. Run k spans extrema
        // (k, k+1); its bottom is whichever end is a potential minimum.
        let mut runs = Vec::with_capacity(2 * n);
        for k in 0..e.len() - 1 {
            let (p0, p1) = (-e[k], -e[k + 1]);
            let ascending = p1 > p0;
            let (lo, hi, x_bottom) = if ascending {
                (p0, p1, xs[k])
            } else {
                (p1, p0, xs[k + 1])
            };
            runs.push(Run {
                lo,
                hi,
                x_bottom,
                ascending,
                front: lo,
                front_t: 0.0,
                active: true,
                exhausted: false,
            });
        }
        let mut sinks = Vec::with_capacity(n);
        let mut trajectories = Vec::with_capacity(2 * n);
        for j in 0..n {
            let idx = 2 * j + 1;
            sinks.push(SinkState {
                alive: true,
                pos0: xs[idx],
                t0: 0.0,
                vel: 0.0,
                mass0: 0.0,
                rate: 2.0,
                left_run: Some(idx - 1),
                right_run: Some(idx),
                left_nb: j.checked_sub(1),
                right_nb: (j + 1 < n).then_some(j + 1),
                seq: 0,
            });
            trajectories.push(SinkTrajectory {
                id: j,
                born: 0.0,
                breakpoints: vec![(0.0, xs[idx], 0.0)],
                merge: None,
            });
        }
        let mut sim = Simulation {
            x_left: xs[0],
            x_right: *xs.last().unwrap(),
            t_max: pot.t_max(),
            now: 0.0,
            runs,
            sinks,
            heap: BinaryHeap::new(),
            trajectories,
            finished: false,
        };
        for j in 0..n {
            sim.schedule_exhausts(j);
        }
        Ok(sim)
    }

    fn schedule_exhausts(&mut self, s: usize) {
        let sink = self.sinks[s];
        if !sink.alive || sink.rate == 0.0 {
            return;
        }
        for (side, run) in [(0u8, sink.left_run), (1u8, sink.right_run)] {
            if let Some(r) = run {
                let remaining = self.runs[r].hi - self.runs[r].front_at(self.now);
                self.heap.push(Reverse(Scheduled {
                    t: self.now + remaining,
                    event: Event::Exhaust {
                        sink: s,
                        side,
                        seq: sink.seq,
                    },
                }));
            }
        }
    }

    fn try_schedule_meet(&mut self, l: usize, r: usize) {
        let (sl, sr) = (self.sinks[l], self.sinks[r]);
        if !sl.alive || !sr.alive {
            return;
        }
        // Particles between them block a meet.
        for run in [sl.right_run, sr.left_run].into_iter().flatten() {
            if !self.runs[run].exhausted {
                return;
            }
        }
        let closing = sl.vel - sr.vel;
        if closing <= 0.0 {
            return;
        }
        let gap = sr.pos(self.now) - sl.pos(self.now);
        let t = self.now + gap / closing;
        self.heap.push(Reverse(Scheduled {
            t,
            event: Event::Meet {
                left: l,
                right: r,
                seq: sl.seq.wrapping_add(sr.seq << 32),
            },
        }));
    }

    fn freeze_run(&mut self, run: Option<usize>) {
        if let Some(r) = run {
            let now = self.now;
            let rr = &mut self.runs[r];
            if rr.active && !rr.exhausted {
                rr.front = rr.front_at(now);
                rr.front_t = now;
                rr.active = false;
            }
        }
    }

    fn activate_run(&mut self, run: Option<usize>) {
        if let Some(r) = run {
            let now = self.now;
            let rr = &mut self.runs[r];
            if !rr.exhausted {
                rr.front_t = now;
                rr.active = true;
            }
        }
    }

    fn record(&mut self, s: usize) {
        let sink = self.sinks[s];
        let t = self.now;
        self.trajectories[s]
            .breakpoints
            .push((t, sink.pos(t), sink.mass(t)));
    }

    /// Advance the simulation through every event with time <= t.
    pub fn run_to(&mut self, t: f64) {
        while let Some(&Reverse(top)) = self.heap.peek() {
            if top.t > t || self.finished {
                break;
            }
            let Reverse(ev) = self.heap.pop().unwrap();
            self.dispatch(ev);
        }
    }

    fn dispatch(&mut self, ev: Scheduled) {
        match ev.event {
            Event::Exhaust { sink, side, seq } => {
                let st = self.sinks[sink];
                if !st.alive || st.seq != seq || st.rate == 0.0 {
                    return;
                }
                self.now = ev.t;
                let (this_run, other_run) = if side == 0 {
                    (st.left_run, st.right_run)
                } else {
                    (st.right_run, st.left_run)
                };
                let Some(tr) = this_run else { return };
                {
                    let rr = &mut self.runs[tr];
                    rr.front = rr.hi;
                    rr.exhausted = true;
                    rr.active = false;
                }
                // Other feed freezes while this sink moves.
                self.freeze_run(other_run);
                let nb = if side == 0 { st.left_nb } else { st.right_nb };
                if nb.is_none() {
                    // Boundary run consumed: only the final sink does this,
                    // simultaneously on both sides, at t_max.
                    let s = &mut self.sinks[sink];
                    s.mass0 = s.mass(ev.t);
                    s.pos0 = s.pos(ev.t);
                    s.t0 = ev.t;
                    s.vel = 0.0;
                    s.rate = 0.0;
                    s.seq += 1;
                    self.finished = true;
                    self.record(sink);
                    return;
                }
                // Start moving toward the emptied side.
                {
                    let s = &mut self.sinks[sink];
                    s.mass0 = s.mass(ev.t);
                    s.pos0 = s.pos(ev.t);
                    s.t0 = ev.t;
                    s.vel = if side == 0 { -1.0 } else { 1.0 };
                    s.rate = 0.0;
                    if side == 0 {
                        s.left_run = None;
                    } else {
                        s.right_run = None;
                    }
                    s.seq += 1;
                }
                self.record(sink);
                let nb = nb.unwrap();
                if side == 0 {
                    self.try_schedule_meet(nb, sink);
                } else {
                    self.try_schedule_meet(sink, nb);
                }
            }
            Event::Meet { left, right, seq } => {
                let (sl, sr) = (self.sinks[left], self.sinks[right]);
                if !sl.alive || !sr.alive || sl.seq.wrapping_add(sr.seq << 32) != seq {
                    return;
                }
                self.now = ev.t;
                let pos = 0.5 * (sl.pos(ev.t) + sr.pos(ev.t));
                let mass = sl.mass(ev.t) + sr.mass(ev.t);
                // Close both trajectories.
                self.record(left);
                self.record(right);
                let new_id = self.trajectories.len();
                self.trajectories[left].merge = Some(MergeEvent {
                    t: ev.t,
                    partner: right,
                    merged_into: new_id,
                });
                self.trajectories[right].merge = Some(MergeEvent {
                    t: ev.t,
                    partner: left,
                    merged_into: new_id,
                });
                self.trajectories.push(SinkTrajectory {
                    id: new_id,
                    born: ev.t,
                    breakpoints: vec![(ev.t, pos, mass)],
                    merge: None,
                });
                self.sinks[left].alive = false;
                self.sinks[right].alive = false;
                self.sinks[left].seq += 1;
                self.sinks[right].seq += 1;
                let merged = SinkState {
                    alive: true,
                    pos0: pos,
                    t0: ev.t,
                    vel: 0.0,
                    mass0: mass,
                    rate: 0.0,
                    left_run: sl.left_run,
                    right_run: sr.right_run,
                    left_nb: sl.left_nb,
                    right_nb: sr.right_nb,
                    seq: 0,
                };
                let mid = self.sinks.len();
                self.sinks.push(merged);
                // Trajectory index must match sink index.
                debug_assert_eq!(mid, new_id);
                if let Some(nb) = sl.left_nb {
                    self.sinks[nb].right_nb = Some(mid);
                }
                if let Some(nb) = sr.right_nb {
                    self.sinks[nb].left_nb = Some(mid);
                }
                // Behavior: rest if both feeds alive, else move toward the
                // missing side.
                let left_alive = sl.left_run.map(|r| !self.runs[r].exhausted).unwrap_or(false);
                let right_alive = sr
                    .right_run
                    .map(|r| !self.runs[r].exhausted)
                    .unwrap_or(false);
                match (left_alive, right_alive) {
                    (true, true) => {
                        self.sinks[mid].rate = 2.0;
                        self.activate_run(sl.left_run);
                        self.activate_run(sr.right_run);
                        self.schedule_exhausts(mid);
                    }
                    (true, false) => {
                        self.sinks[mid].vel = 1.0;
                        self.sinks[mid].right_run = None;
                        self.freeze_run(sl.left_run);
                        if let Some(nb) = sr.right_nb {
                            self.try_schedule_meet(mid, nb);
                        }
                    }
                    (false, true) => {
                        self.sinks[mid].vel = -1.0;
                        self.sinks[mid].left_run = None;
                        self.freeze_run(sr.right_run);
                        if let Some(nb) = sl.left_nb {
                            self.try_schedule_meet(nb, mid);
                        }
                    }
                    (false, false) => {
                        // Both empty: only possible as the terminal state of
                        // a degenerate potential; rest with no accumulation.
                        self.finished = true;
                    }
                }
            }
        }
    }

    /// Snapshot of the physical potential at time `t` (all events up to and
    /// including `t` must be processed; call after `run_to(t)`).
    pub fn snapshot(&self, t: f64) -> Result<EvolvedPotential, AnnihilationError> {
        let tol = 1e-9 * (1.0 + self.t_max);
        if t >= self.t_max - tol {
            // Terminal state: a single point of mass b - a.
            let c = 0.5 * (self.x_left + self.x_right);
            return Ok(EvolvedPotential {
                t: self.t_max,
                points: vec![(c, 0.0)],
                features: vec![Feature::RestingSink {
                    x: c,
                    psi: 0.0,
                    mass: self.x_right - self.x_left,
                }],
            });
        }
        // Alive pieces in x order (runs are stored left to right).
        let mut points: Vec<(f64, f64)> = Vec::new();
        let mut features: Vec<Feature> = Vec::new();
        let sink_positions: Vec<(f64, f64)> = self
            .sinks
            .iter()
            .filter(|s| s.alive)
            .map(|s| (s.pos(t), s.mass(t)))
            .collect();
        let mut prev_end: Option<(f64, f64)> = None;
        for run in &self.runs {
            let Some(((x0, p0), (x1, p1))) = run.alive_piece(t) else {
                continue;
            };
            match prev_end {
                None => {
                    points.push((x0, p0));
                    points.push((x1, p1));
                }
                Some((xe, pe)) => {
                    let gap = x0 - xe;
                    if gap.abs() <= tol {
                        // zero gap: resting sink kink or plain saddle point
                        if (pe - p0).abs() > tol {
                            return Err(AnnihilationError::Inconsistent(format!(
                                "zero gap with mismatched levels {pe} vs {p0}"
                            )));
                        }
                        if t > 0.0 {
                            if let Some(&(sx, sm)) = sink_positions
                                .iter()
                                .find(|&&(sx, _)| (sx - xe).abs() <= tol)
                            {
                                features.push(Feature::RestingSink {
                                    x: sx,
                                    psi: pe,
                                    mass: sm,
                                });
                            }
                        }
                        points.push((x1, p1));
                    } else {
                        // plateau: classify by the sinks sitting in it
                        if (pe - p0).abs() > tol {
                            return Err(AnnihilationError::Inconsistent(format!(
                                "plateau with mismatched levels {pe} vs {p0}"
                            )));
                        }
                        let mut inside: Vec<(f64, f64)> = sink_positions
                            .iter()
                            .copied()
                            .filter(|&(sx, _)| sx >= xe - tol && sx <= x0 + tol)
                            .collect();
                        inside.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
                        match inside.len() {
                            0 => features.push(Feature::SaddleGap {
                                x0: xe,
                                len: gap,
                                psi: pe,
                            }),
                            1 => {
                                let (sx, sm) = inside[0];
                                let at_right_end = (sx - x0).abs() <= tol;
                                if !at_right_end && (sx - xe).abs() > tol {
                                    return Err(AnnihilationError::Inconsistent(format!(
                                        "moving sink at {sx} not at a plateau end [{xe}, {x0}]"
                                    )));
                                }
                                features.push(Feature::MovingSink {
                                    x0: xe,
                                    len: gap,
                                    psi: pe,
                                    mass: sm,
                                    at_right_end,
                                });
                            }
                            2 => features.push(Feature::SinkPair {
                                x0: xe,
                                len: gap,
                                psi: pe,
                                mass_left: inside[0].1,
                                mass_right: inside[1].1,
                            }),
                            k => {
                                return Err(AnnihilationError::Inconsistent(format!(
                                    "{k} sinks in one plateau"
                                )))
                            }
                        }
                        points.push((x0, p0));
                        points.push((x1, p1));
                    }
                }
            }
            prev_end = Some((x1, p1));
        }
        Ok(EvolvedPotential {
            t,
            points: super::potential::canonicalize_points(points),
            features,
        })
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }
}
