//! Evolution by mass-equipped pruning, and the two constructions linking
//! evolved potentials and mass-equipped trees.
//!
//! The evolved potential at time `t` is the contour walk of the pruned tree
//! with empty intervals inserted: `2t` at every surviving saddle, the mass
//! at every interior (moving-sink) mass point on the walk side given by its
//! orientation, and `m_L + m_R - 2t` at every double-mass leaf. Resting
//! sinks (single leaf masses, `m = 2t`) occupy single points.

use super::potential::{EvolvedPotential, Feature, Potential};
use super::AnnihilationError;
use crate::harris::{level_set_tree, level_set_tree_indexed, Excursion};
use crate::numeric::Kahan;
use crate::pruning::{prune_mass_equipped, InteriorMass, LeafMass, MassTree};
use crate::tree::NodeId;

/// Ballistic annihilation state at time `t`, computed by pruning the
/// level-set tree of the initial potential and walking the result back into
/// physical space.
pub fn evolve(pot: &Potential, t: f64) -> Result<EvolvedPotential, AnnihilationError> {
    let t_max = pot.t_max();
    if !(0.0..=t_max + 1e-12 * (1.0 + t_max)).contains(&t) {
        return Err(AnnihilationError::BadTime { t, t_max });
    }
    let (a, b) = pot.domain();
    if t >= t_max - 1e-12 * (1.0 + t_max) {
        let c = 0.5 * (a + b);
        return Ok(EvolvedPotential {
            t: t_max,
            points: vec![(c, 0.0)],
            features: vec![Feature::RestingSink {
                x: c,
                psi: 0.0,
                mass: b - a,
            }],
        });
    }
    let tree = level_set_tree(pot.excursion())?;
    let mt = prune_mass_equipped(&tree, t)?;
    mass_tree_to_potential(&mt, t, a + t)
}

/// Construction of the physical potential from a t-admissible mass tree:
/// the contour walk of the base tree starting at `x_start`, with plateaus
/// inserted for saddles, interior masses, and double leaf masses.
pub fn mass_tree_to_potential(
    mt: &MassTree,
    t: f64,
    x_start: f64,
) -> Result<EvolvedPotential, AnnihilationError> {
    if !mt.is_admissible(t, 1e-9) {
        return Err(AnnihilationError::NotAdmissible(t));
    }
    let base = &mt.base;
    if base.is_empty() {
        return Ok(EvolvedPotential {
            t,
            points: vec![(x_start, 0.0)],
            features: vec![],
        });
    }
    if !base.is_planted() {
        return Err(AnnihilationError::Tree(crate::tree::TreeError::NotPlanted));
    }

    // Interior masses per edge, split by walk side: left-oriented masses
    // are passed on the way down (descending potential), top first;
    // right-oriented on the way up, bottom first.
    let n = base.arena_size();
    let mut down: Vec<Vec<&InteriorMass>> = vec![Vec::new(); n];
    let mut up: Vec<Vec<&InteriorMass>> = vec![Vec::new(); n];
    for m in &mt.interior_masses {
        match m.side {
            crate::tree::Side::L => down[m.edge.0].push(m),
            crate::tree::Side::R => up[m.edge.0].push(m),
        }
    }
    for v in down.iter_mut() {
        v.sort_by(|a, b| b.offset.partial_cmp(&a.offset).unwrap());
    }
    for v in up.iter_mut() {
        v.sort_by(|a, b| a.offset.partial_cmp(&b.offset).unwrap());
    }
    let leaf_mass: Vec<Option<&LeafMass>> = {
        let mut lm: Vec<Option<&LeafMass>> = vec![None; n];
        for (id, m) in &mt.leaf_masses {
            lm[id.0] = Some(m);
        }
        lm
    };

    let mut out = Walker {
        t,
        x: Kahan::new(x_start),
        points: Vec::new(),
        features: Vec::new(),
    };
    out.points.push((x_start, 0.0));

    // Contour walk with explicit stack: depth is the distance from the
    // root; the potential value is its negation.
    enum Step {
        Down(NodeId, f64),    // enter edge, depth at its top
        Between(f64), // finished the left child, at this vertex depth
        Up(NodeId, f64),      // leave edge, depth at its bottom
    }
    let stem = base.stem().unwrap();
    let mut stack = vec![Step::Down(stem, 0.0)];
    while let Some(step) = stack.pop() {
        match step {
            Step::Down(v, d_top) => {
                let d_bot = d_top + base.edge_len(v);
                // descend, pausing at left-oriented interior masses
                let mut d = d_top;
                for m in &down[v.0] {
                    let level = d_bot - m.offset;
                    out.slope_to(d, level);
                    out.moving_plateau(level, m.mass, false);
                    d = level;
                }
                out.slope_to(d, d_bot);
                match base.children(v) {
                    (None, None) => {
                        match leaf_mass[v.0] {
                            Some(LeafMass::Single(m)) => out.resting_sink(d_bot, *m),
                            Some(LeafMass::Double { left, right }) => {
                                out.sink_pair(d_bot, *left, *right)
                            }
                            None => {} // bare leaf, only at t = 0
                        }
                        stack.push(Step::Up(v, d_bot));
                    }
                    (Some(l), Some(r)) => {
                        stack.push(Step::Up(v, d_bot));
                        stack.push(Step::Down(r, d_bot));
                        stack.push(Step::Between(d_bot));
                        stack.push(Step::Down(l, d_bot));
                    }
                    _ => unreachable!("pruned trees are reduced"),
                }
            }
            Step::Between(d) => {
                out.saddle_gap(d);
            }
            Step::Up(v, d_bot) => {
                let d_top = d_bot - base.edge_len(v);
                let mut d = d_bot;
                for m in &up[v.0] {
                    let level = d_bot - m.offset;
                    out.slope_to(d, level);
                    out.moving_plateau(level, m.mass, true);
                    d = level;
                }
                out.slope_to(d, d_top);
            }
        }
    }

    Ok(EvolvedPotential {
        t,
        points: super::potential::canonicalize_points(out.points),
        features: out.features,
    })
}

struct Walker {
    t: f64,
    x: Kahan,
    points: Vec<(f64, f64)>,
    features: Vec<Feature>,
}

impl Walker {
    /// Emit the slope segment from depth `from` to depth `to`.
    fn slope_to(&mut self, from: f64, to: f64) {
        let run = (to - from).abs();
        if run == 0.0 {
            return;
        }
        self.x.add(run);
        self.points.push((self.x.value(), -to));
    }

    fn moving_plateau(&mut self, depth: f64, mass: f64, at_right_end: bool) {
        let x0 = self.x.value();
        self.x.add(mass);
        self.points.push((self.x.value(), -depth));
        self.features.push(Feature::MovingSink {
            x0,
            len: mass,
            psi: -depth,
            mass,
            at_right_end,
        });
    }

    fn resting_sink(&mut self, depth: f64, mass: f64) {
        self.features.push(Feature::RestingSink {
            x: self.x.value(),
            psi: -depth,
            mass,
        });
    }

    fn sink_pair(&mut self, depth: f64, mass_left: f64, mass_right: f64) {
        let eps = mass_left + mass_right - 2.0 * self.t;
        let x0 = self.x.value();
        self.x.add(eps);
        self.points.push((self.x.value(), -depth));
        self.features.push(Feature::SinkPair {
            x0,
            len: eps,
            psi: -depth,
            mass_left,
            mass_right,
        });
    }

    fn saddle_gap(&mut self, depth: f64) {
        if self.t == 0.0 {
            return;
        }
        let x0 = self.x.value();
        self.x.add(2.0 * self.t);
        self.points.push((self.x.value(), -depth));
        self.features.push(Feature::SaddleGap {
            x0,
            len: 2.0 * self.t,
            psi: -depth,
        });
    }
}

/// Construction of the mass-equipped tree from an evolved potential: the
/// level-set tree of the glued (plateau-free) potential, decorated with the
/// sink masses. The inverse of [`mass_tree_to_potential`] on admissible
/// inputs.
pub fn potential_to_mass_tree(
    ep: &EvolvedPotential,
    t: f64,
) -> Result<MassTree, AnnihilationError> {
    // Glued extrema: boundary zeros plus one extremum per non-monotone
    // feature (sinks are minima, saddle gaps are maxima). Moving-sink
    // plateaus are monotone joins and vanish when glued.
    let mut extrema: Vec<f64> = vec![0.0];
    #[derive(Clone, Copy)]
    enum Kind<'a> {
        Min(&'a Feature),
        Max,
    }
    let mut kinds: Vec<Kind> = Vec::new();
    for f in &ep.features {
        match f {
            Feature::RestingSink { psi, .. } => {
                extrema.push(-psi);
                kinds.push(Kind::Min(f));
            }
            Feature::SinkPair { psi, .. } => {
                extrema.push(-psi);
                kinds.push(Kind::Min(f));
            }
            Feature::SaddleGap { psi, .. } => {
                extrema.push(-psi);
                kinds.push(Kind::Max);
            }
            Feature::MovingSink { .. } => {}
        }
    }
    extrema.push(0.0);
    if extrema.len() < 3 {
        return Err(AnnihilationError::Inconsistent(
            "no sinks in evolved potential".into(),
        ));
    }
    let exc = Excursion::from_extrema(extrema)
        .map_err(|e| AnnihilationError::Inconsistent(format!("glued potential: {e}")))?;
    let (base, vertex_of) = level_set_tree_indexed(&exc)?;

    let mut leaf_masses = Vec::new();
    let mut interior_masses = Vec::new();
    for (i, kind) in kinds.iter().enumerate() {
        let vertex = vertex_of[i + 1];
        match kind {
            Kind::Min(Feature::RestingSink { mass, .. }) => {
                leaf_masses.push((vertex, LeafMass::Single(*mass)));
            }
            Kind::Min(Feature::SinkPair {
                mass_left,
                mass_right,
                ..
            }) => {
                leaf_masses.push((
                    vertex,
                    LeafMass::Double {
                        left: *mass_left,
                        right: *mass_right,
                    },
                ));
            }
            _ => {}
        }
    }

    // Interior masses: a moving sink lies on the monotone glued stretch
    // between its neighboring extrema; on a falling stretch (walk down
    // toward a leaf) the owning edge is found on the path from that leaf
    // upward, and the orientation is left. Rising stretches mirror this.
    let depth_of = |v: NodeId| base.depth_of(v);
    let mut ext_cursor = 0usize; // index into kinds: extremum features passed
    for f in &ep.features {
        match f {
            Feature::MovingSink {
                psi, at_right_end, ..
            } => {
                let level = -psi; // depth on the positive excursion
                // The stretch runs between extremum `ext_cursor` (left) and
                // `ext_cursor + 1` (right) in glued order; exactly one side
                // is a minimum (leaf); walk up from that leaf.
                let (leaf_idx, side) = if *at_right_end {
                    // sink at right end: rising stretch out of a minimum on
                    // its left
                    (ext_cursor.checked_sub(1), crate::tree::Side::R)
                } else {
                    // falling stretch into the minimum on its right
                    (Some(ext_cursor), crate::tree::Side::L)
                };
                let Some(leaf_idx) = leaf_idx else {
                    return Err(AnnihilationError::Inconsistent(
                        "interior mass before any extremum".into(),
                    ));
                };
                if leaf_idx >= kinds.len() || !matches!(kinds[leaf_idx], Kind::Min(_)) {
                    return Err(AnnihilationError::Inconsistent(
                        "interior mass not adjacent to a leaf stretch".into(),
                    ));
                }
                let leaf = vertex_of[leaf_idx + 1];
                // Find the edge on the rootward path whose depth span
                // contains `level`.
                let mut v = leaf;
                let mut d_child = depth_of(leaf);
                loop {
                    let d_parent = d_child - base.edge_len(v);
                    if level >= d_parent - 1e-9 && level <= d_child + 1e-9 {
                        interior_masses.push(InteriorMass {
                            edge: v,
                            offset: (d_child - level).clamp(0.0, base.edge_len(v)),
                            mass: match f {
                                Feature::MovingSink { mass, .. } => *mass,
                                _ => unreachable!(),
                            },
                            side,
                        });
                        break;
                    }
                    match base.parent(v) {
                        Some(p) => {
                            v = p;
                            d_child = d_parent;
                        }
                        None => {
                            return Err(AnnihilationError::Inconsistent(format!(
                                "interior mass level {level} outside the tree"
                            )));
                        }
                    }
                }
            }
            _ => ext_cursor += 1,
        }
    }

    let mt = MassTree {
        base,
        leaf_masses,
        interior_masses,
    };
    if !mt.is_admissible(t, 1e-9) {
        return Err(AnnihilationError::NotAdmissible(t));
    }
    Ok(mt)
}
