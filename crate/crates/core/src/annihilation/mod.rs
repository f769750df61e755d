//! Continuum 1-D ballistic annihilation for unit-slope potentials.
//!
//! Two independent routes compute the same evolution: an exact event-driven
//! simulation of the sinks ([`simulate::Simulation`]) and mass-equipped
//! pruning of the level-set tree of the initial potential
//! ([`construct::evolve`]). Their agreement is the central cross-check of
//! this crate. The shock tree of the sink trajectories is built by
//! shortest-basin-first unfolding in [`shock`].

mod construct;
mod potential;
mod shock;
mod simulate;

pub use construct::{evolve, mass_tree_to_potential, potential_to_mass_tree};
pub use potential::{Basin, EvolvedPotential, Feature, Potential};

/// Canonical polyline form used by both evolution routes.
pub fn canonicalize_points_pub(points: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    potential::canonicalize_points(points)
}
pub use shock::{shock_tree, ShockNode, ShockTree};
pub use simulate::{simulate_sinks, MergeEvent, Simulation, SinkTrajectory};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnnihilationError {
    #[error("potential is not generic: {0}")]
    Genericity(String),
    #[error("potential breakpoints are not a negative unit-slope excursion: {0}")]
    BadPotential(String),
    #[error("time {t} outside [0, {t_max}]")]
    BadTime { t: f64, t_max: f64 },
    #[error("point {x} outside the domain [{a}, {b}]")]
    OutOfDomain { x: f64, a: f64, b: f64 },
    #[error("mass tree is not admissible at t = {0}")]
    NotAdmissible(f64),
    #[error("evolved potential is inconsistent: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Excursion(#[from] crate::harris::ExcursionError),
    #[error(transparent)]
    Sample(#[from] crate::gw::GwError),
    #[error(transparent)]
    Prune(#[from] crate::pruning::PruneError),
    #[error(transparent)]
    Tree(#[from] crate::tree::TreeError),
}

/// Time until the particles at `x` and `y` collide (as particles or through
/// the sinks that absorbed them): half the length of the minimal basin of
/// the initial potential containing both. An ultrametric on the domain;
/// `h1(x, x) = 0` by convention.
pub fn collision_time(pot: &Potential, x: f64, y: f64) -> Result<f64, AnnihilationError> {
    let (a, b) = pot.domain();
    for z in [x, y] {
        if !(a..=b).contains(&z) {
            return Err(AnnihilationError::OutOfDomain { x: z, a, b });
        }
    }
    if x == y {
        return Ok(0.0);
    }
    let (lo, hi) = (x.min(y), x.max(y));
    let m = pot.max_on(lo, hi);
    let left = pot.last_reach_left(lo, m);
    let right = pot.first_reach_right(hi, m);
    Ok(0.5 * (right - left))
}

/// The tree-in-continuous-path distance on the quotient by annihilating
/// pairs: `2 sup_{[x,y]} psi - psi(x) - psi(y)`; the total mass the two
/// particles' sinks accumulate before colliding.
pub fn h2_distance(pot: &Potential, x: f64, y: f64) -> Result<f64, AnnihilationError> {
    let (a, b) = pot.domain();
    for z in [x, y] {
        if !(a..=b).contains(&z) {
            return Err(AnnihilationError::OutOfDomain { x: z, a, b });
        }
    }
    let (lo, hi) = (x.min(y), x.max(y));
    Ok(2.0 * pot.max_on(lo, hi) - pot.psi_at(x) - pot.psi_at(y))
}


#[cfg(test)]
mod speed_law_tests {
    use super::*;
    use crate::gw::GwParams;

    #[test]
    fn sink_speed_and_accumulation_law() {
        // Every trajectory segment moves at dx/dt in {0, +-1}; mass grows
        // at rate 2 exactly on the resting segments and is frozen while
        // moving.
        for i in 0..60u64 {
            let Ok(pot) = Potential::sample_exp(
                &GwParams::new(1.0, 400).stream(i).cap(10_000),
                0.0,
            ) else {
                continue;
            };
            let trajs = simulate_sinks(&pot).unwrap();
            for tr in &trajs {
                for w in tr.breakpoints.windows(2) {
                    let (t0, x0, m0) = w[0];
                    let (t1, x1, m1) = w[1];
                    let dt = t1 - t0;
                    if dt <= 1e-12 {
                        continue;
                    }
                    let v = (x1 - x0) / dt;
                    let rate = (m1 - m0) / dt;
                    let still = v.abs() < 1e-9;
                    let unit = (v.abs() - 1.0).abs() < 1e-9;
                    assert!(still || unit, "sink {} speed {v}", tr.id);
                    if still {
                        assert!((rate - 2.0).abs() < 1e-9, "resting rate {rate}");
                    } else {
                        assert!(rate.abs() < 1e-9, "moving rate {rate}");
                    }
                }
            }
        }
    }
}
