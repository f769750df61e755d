//! Generalized dynamical pruning.
//!
//! `prune(T, phi, t)` keeps the root together with every point `x` whose
//! descendant tree has `phi` value at least `t`, then series-reduces. Cut
//! points (the boundary of the removed part) are reported with provenance,
//! and the mass-equipped variant decorates them with point masses equal to
//! twice the removed tree length, which is the annihilated spatial mass.
//!
//! Built-in pruning functions: tree height (leaf erasure at unit speed),
//! Horton-Strahler order (leaf cutting with series reduction), total tree
//! length, and leaf count. For Horton order the threshold is floored so that
//! `prune(T, HortonOrder, t)` equals `t.floor()` rounds of Horton pruning,
//! which is the convention the closed-form survival probability uses.

use crate::tree::{NodeId, PlaneTree, Side, TreeError, TreePoint};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PruneError {
    #[error("pruning time must be nonnegative, got {0}")]
    NegativeTime(f64),
    #[error("custom pruning function is not monotone along an edge (node {node}): {lo} > {hi}")]
    NonMonotone { node: usize, lo: f64, hi: f64 },
    #[error("mass-equipped pruning requires a planted tree")]
    NotPlanted,
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// Built-in pruning function kinds with closed-form theory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhiKind {
    Height,
    HortonOrder,
    Length,
    LeafCount,
}

impl PhiKind {
    pub fn name(&self) -> &'static str {
        match self {
            PhiKind::Height => "height",
            PhiKind::HortonOrder => "horton",
            PhiKind::Length => "length",
            PhiKind::LeafCount => "leaves",
        }
    }
}

/// A monotone non-decreasing pruning function.
pub enum Phi {
    Height,
    HortonOrder,
    Length,
    LeafCount,
    Custom(CustomPhi),
}

/// User-supplied pruning function: `value` evaluates phi on a descendant
/// subtree (rooted at a vertex, so stemless or degenerate), `edge_profile`
/// evaluates phi of the point at `offset` above that subtree, given the
/// subtree's value. The profile must be non-decreasing in the offset.
pub struct CustomPhi {
    pub value: Box<dyn Fn(&PlaneTree) -> f64 + Send + Sync>,
    pub edge_profile: Box<dyn Fn(f64, &PlaneTree, f64) -> f64 + Send + Sync>,
}

impl From<PhiKind> for Phi {
    fn from(k: PhiKind) -> Self {
        match k {
            PhiKind::Height => Phi::Height,
            PhiKind::HortonOrder => Phi::HortonOrder,
            PhiKind::Length => Phi::Length,
            PhiKind::LeafCount => Phi::LeafCount,
        }
    }
}

impl Phi {
    pub fn kind(&self) -> Option<PhiKind> {
        match self {
            Phi::Height => Some(PhiKind::Height),
            Phi::HortonOrder => Some(PhiKind::HortonOrder),
            Phi::Length => Some(PhiKind::Length),
            Phi::LeafCount => Some(PhiKind::LeafCount),
            Phi::Custom(_) => None,
        }
    }

    /// Phi evaluated on a standalone tree.
    pub fn value_of(&self, t: &PlaneTree) -> f64 {
        match self {
            Phi::Height => t.height(),
            Phi::HortonOrder => t.horton_order() as f64 - 1.0,
            Phi::Length => t.length(),
            Phi::LeafCount => t.num_leaves() as f64,
            Phi::Custom(c) => (c.value)(t),
        }
    }
}

/// Where a cut sits in the original tree.
#[derive(Debug, Clone, PartialEq)]
pub enum CutSite {
    /// At an original vertex (its whole child branch or branches removed).
    AtVertex(NodeId),
    /// Interior point of an original edge: `offset` above the child vertex.
    OnEdge(NodeId, f64),
    /// At the tree root (the pruned tree died, or a stemless root branch
    /// was removed).
    AtRoot,
}

/// One removed subtree hanging at a cut.
#[derive(Debug, Clone, PartialEq)]
pub struct RemovedPart {
    /// Plane side of the removed child for vertex cuts; `None` for cuts in
    /// the interior of an edge (the removed part is the continuation).
    pub side: Option<Side>,
    /// Total length of the removed subtree.
    pub length: f64,
    /// Phi value of the removed subtree (its value at the cut point).
    pub phi_value: f64,
}

/// A cut: boundary point of the pruned-away part.
#[derive(Debug, Clone, PartialEq)]
pub struct Cut {
    /// Location in the pruned tree; `None` when the pruned tree is empty.
    pub pruned: Option<TreePoint>,
    pub site: CutSite,
    pub parts: Vec<RemovedPart>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CutSet {
    pub cuts: Vec<Cut>,
}

impl CutSet {
    pub fn total_removed_length(&self) -> f64 {
        self.cuts
            .iter()
            .flat_map(|c| c.parts.iter())
            .map(|p| p.length)
            .sum()
    }
}

/// Oriented or leaf mass decorations on a plane tree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LeafMass {
    Single(f64),
    Double { left: f64, right: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteriorMass {
    /// Edge of the base tree carrying the mass.
    pub edge: NodeId,
    /// Distance from the child endpoint of that edge.
    pub offset: f64,
    pub mass: f64,
    /// Side of the removed subtree the mass stands for.
    pub side: Side,
}

/// Plane tree decorated with oriented point masses. Masses record
/// pruned-away subtrees; a removed subtree of length `l` carries spatial
/// mass `2 l`.
#[derive(Debug, Clone)]
pub struct MassTree {
    pub base: PlaneTree,
    pub leaf_masses: Vec<(NodeId, LeafMass)>,
    pub interior_masses: Vec<InteriorMass>,
}

impl MassTree {
    pub fn total_mass(&self) -> f64 {
        let leaves: f64 = self
            .leaf_masses
            .iter()
            .map(|(_, m)| match m {
                LeafMass::Single(x) => *x,
                LeafMass::Double { left, right } => left + right,
            })
            .sum();
        leaves + self.interior_masses.iter().map(|m| m.mass).sum::<f64>()
    }

    /// t-admissibility: internal masses below `2t`, single leaf masses equal
    /// to `2t`, double leaf masses summing above `2t`.
    pub fn is_admissible(&self, t: f64, tol: f64) -> bool {
        let two_t = 2.0 * t;
        for m in &self.interior_masses {
            if !(m.mass < two_t + tol) || m.mass <= 0.0 {
                return false;
            }
        }
        for (_, m) in &self.leaf_masses {
            match m {
                LeafMass::Single(x) => {
                    if (x - two_t).abs() > tol {
                        return false;
                    }
                }
                LeafMass::Double { left, right } => {
                    if !(left + right > two_t - tol) || *left <= 0.0 || *right <= 0.0 {
                        return false;
                    }
                }
            }
        }
        true
    }
}

// Per-node tables driving a prune pass.
struct PhiTables {
    /// Is the vertex itself kept (phi of its zero-stem descendant tree >= t,
    /// in the limit-from-above sense for integer-valued functions)?
    keep: Vec<bool>,
    /// For a branch whose vertex dies but whose edge is partially kept:
    /// smallest offset with phi >= t, strictly inside (0, len).
    crossing: Vec<Option<f64>>,
    /// Length of edge + descendant subtree, per node.
    branch_len: Vec<f64>,
    /// Phi of the branch seen from just below the parent vertex
    /// (offset = len), used for removed-part bookkeeping.
    phi_top: Vec<f64>,
}

fn build_tables(tree: &PlaneTree, phi: &Phi, t: f64) -> Result<PhiTables, PruneError> {
    let n = tree.arena_size();
    let mut keep = vec![false; n];
    let mut crossing: Vec<Option<f64>> = vec![None; n];
    let mut branch_len = vec![0.0f64; n];
    let mut phi_top = vec![0.0f64; n];

    // Aggregates bottom-up.
    let post = tree.postorder();
    match phi {
        Phi::Length => {
            let mut sub = vec![0.0f64; n];
            for &v in &post {
                let (l, r) = tree.children(v);
                let mut s = 0.0;
                for c in [l, r].into_iter().flatten() {
                    s += branch_len[c.0];
                }
                sub[v.0] = s;
                branch_len[v.0] = s + tree.edge_len(v);
                phi_top[v.0] = s + tree.edge_len(v);
                keep[v.0] = s >= t;
                if !keep[v.0] {
                    let need = t - s;
                    if need < tree.edge_len(v) {
                        crossing[v.0] = Some(need);
                    }
                }
            }
        }
        Phi::Height => {
            let mut subh = vec![0.0f64; n];
            for &v in &post {
                let (l, r) = tree.children(v);
                let mut h: f64 = 0.0;
                let mut s = 0.0;
                for c in [l, r].into_iter().flatten() {
                    h = h.max(subh[c.0] + tree.edge_len(c));
                    s += branch_len[c.0];
                }
                subh[v.0] = h;
                branch_len[v.0] = s + tree.edge_len(v);
                phi_top[v.0] = h + tree.edge_len(v);
                keep[v.0] = h >= t;
                if !keep[v.0] {
                    let need = t - h;
                    if need < tree.edge_len(v) {
                        crossing[v.0] = Some(need);
                    }
                }
            }
        }
        Phi::HortonOrder => {
            // S_t = floor(t) rounds of Horton pruning.
            let teff = t.floor();
            let mut k = vec![0u32; n];
            for &v in &post {
                let (l, r) = tree.children(v);
                let mut s = 0.0;
                k[v.0] = match (l, r) {
                    (None, None) => 1,
                    (Some(a), Some(b)) => {
                        s = branch_len[a.0] + branch_len[b.0];
                        let (ka, kb) = (k[a.0], k[b.0]);
                        if ka == kb {
                            ka + 1
                        } else {
                            ka.max(kb)
                        }
                    }
                    (a, b) => {
                        let c = a.or(b).unwrap();
                        s = branch_len[c.0];
                        k[c.0]
                    }
                };
                branch_len[v.0] = s + tree.edge_len(v);
                let val = k[v.0] as f64 - 1.0;
                phi_top[v.0] = val;
                keep[v.0] = val >= teff;
            }
        }
        Phi::LeafCount => {
            let mut leaves = vec![0usize; n];
            for &v in &post {
                let (l, r) = tree.children(v);
                let mut s = 0.0;
                leaves[v.0] = match (l, r) {
                    (None, None) => 1,
                    (Some(a), Some(b)) => {
                        s = branch_len[a.0] + branch_len[b.0];
                        leaves[a.0] + leaves[b.0]
                    }
                    (a, b) => {
                        let c = a.or(b).unwrap();
                        s = branch_len[c.0];
                        leaves[c.0]
                    }
                };
                branch_len[v.0] = s + tree.edge_len(v);
                let val = leaves[v.0] as f64;
                phi_top[v.0] = val;
                keep[v.0] = val >= t;
            }
        }
        Phi::Custom(c) => {
            for &v in &post {
                let (l, r) = tree.children(v);
                let mut s = 0.0;
                for ch in [l, r].into_iter().flatten() {
                    s += branch_len[ch.0];
                }
                branch_len[v.0] = s + tree.edge_len(v);
                let sub = tree.descendant_subtree(&TreePoint { node: v, offset: 0.0 })?;
                let v0 = (c.value)(&sub);
                let len = tree.edge_len(v);
                let at0 = (c.edge_profile)(v0, &sub, 0.0);
                let at_top = (c.edge_profile)(v0, &sub, len);
                if at_top < at0 - 1e-9 {
                    return Err(PruneError::NonMonotone {
                        node: v.0,
                        lo: at0,
                        hi: at_top,
                    });
                }
                for ch in [l, r].into_iter().flatten() {
                    if phi_top[ch.0] > at0 + 1e-9 {
                        return Err(PruneError::NonMonotone {
                            node: v.0,
                            lo: phi_top[ch.0],
                            hi: at0,
                        });
                    }
                }
                phi_top[v.0] = at_top;
                keep[v.0] = at0 >= t;
                if !keep[v.0] && at_top >= t {
                    // Bisect the monotone profile for the smallest offset
                    // with value >= t.
                    let (mut lo, mut hi) = (0.0f64, len);
                    for _ in 0..100 {
                        let mid = 0.5 * (lo + hi);
                        if (c.edge_profile)(v0, &sub, mid) >= t {
                            hi = mid;
                        } else {
                            lo = mid;
                        }
                    }
                    if hi < len {
                        crossing[v.0] = Some(hi);
                    }
                }
            }
        }
    }
    Ok(PhiTables {
        keep,
        crossing,
        branch_len,
        phi_top,
    })
}

/// Smallest offset above `child` (a standalone descendant subtree) at which
/// phi reaches `t` along an edge of length `edge_len`, or `None` if the
/// whole edge stays below `t`. Analytic for height and length; integer
/// valued functions never cross in an edge interior.
pub fn edge_crossing(child: &PlaneTree, phi: &Phi, t: f64, edge_len: f64) -> Option<f64> {
    let v0 = phi.value_of(child);
    match phi {
        Phi::Length | Phi::Height => {
            if v0 >= t {
                return Some(0.0);
            }
            let need = t - v0;
            (need <= edge_len).then_some(need)
        }
        Phi::HortonOrder | Phi::LeafCount => {
            // Constant in the edge interior; for Horton the value on the
            // interior is that of the planted subtree, i.e. order 1 above a
            // bare leaf point.
            let interior = match phi {
                Phi::HortonOrder => {
                    if child.is_empty() {
                        0.0
                    } else {
                        v0
                    }
                }
                _ => {
                    if child.is_empty() {
                        1.0
                    } else {
                        v0
                    }
                }
            };
            (interior >= t).then_some(0.0)
        }
        Phi::Custom(c) => {
            let at = |s: f64| (c.edge_profile)(v0, child, s);
            if at(0.0) >= t {
                return Some(0.0);
            }
            if at(edge_len) < t {
                return None;
            }
            let (mut lo, mut hi) = (0.0, edge_len);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if at(mid) >= t {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            Some(hi)
        }
    }
}

/// Generalized dynamical pruning: the reduced tree of kept points plus the
/// cut set. `prune(T, phi, 0)` is `T` itself with no cuts.
pub fn prune(tree: &PlaneTree, phi: &Phi, t: f64) -> Result<(PlaneTree, CutSet), PruneError> {
    if !(t >= 0.0) {
        return Err(PruneError::NegativeTime(t));
    }
    let mut out = PlaneTree::empty();
    let mut cuts = CutSet::default();
    if tree.is_empty() {
        return Ok((out, cuts));
    }
    let tables = build_tables(tree, phi, t)?;
    let survives = |c: NodeId| tables.keep[c.0] || tables.crossing[c.0].is_some();

    // Root: record cuts for dead root branches, spawn jobs for live ones.
    let live: Vec<NodeId> = tree
        .root_children()
        .iter()
        .copied()
        .filter(|&c| survives(c))
        .collect();
    for &c in tree.root_children() {
        if !survives(c) {
            cuts.cuts.push(Cut {
                pruned: None,
                site: CutSite::AtRoot,
                parts: vec![RemovedPart {
                    side: tree.side_of(c),
                    length: tables.branch_len[c.0],
                    phi_value: tables.phi_top[c.0],
                }],
            });
        }
    }

    struct Job {
        top: NodeId,
        attach: Option<(NodeId, Side)>, // None = root child
    }
    let mut jobs: Vec<Job> = live
        .iter()
        .rev()
        .map(|&c| Job {
            top: c,
            attach: None,
        })
        .collect();

    while let Some(job) = jobs.pop() {
        let mut cur = job.top;
        let mut acc = 0.0f64; // pruned-edge length accumulated from its top
        // cuts on this pruned edge: (depth from top, site, parts)
        let mut edge_cuts: Vec<(f64, CutSite, Vec<RemovedPart>)> = Vec::new();
        // what ends the edge
        enum End {
            Leaf { cut: Option<(CutSite, Vec<RemovedPart>)> },
            Junction(NodeId, NodeId),
        }
        let end: End;
        loop {
            if tables.keep[cur.0] {
                acc += tree.edge_len(cur);
                let (l, r) = tree.children(cur);
                match (l, r) {
                    (None, None) => {
                        end = End::Leaf { cut: None };
                        break;
                    }
                    (Some(a), Some(b)) => {
                        let (sa, sb) = (survives(a), survives(b));
                        if sa && sb {
                            end = End::Junction(a, b);
                            break;
                        } else if sa || sb {
                            let (alive, dead, side) =
                                if sa { (a, b, Side::R) } else { (b, a, Side::L) };
                            edge_cuts.push((
                                acc,
                                CutSite::AtVertex(cur),
                                vec![RemovedPart {
                                    side: Some(side),
                                    length: tables.branch_len[dead.0],
                                    phi_value: tables.phi_top[dead.0],
                                }],
                            ));
                            cur = alive;
                        } else {
                            end = End::Leaf {
                                cut: Some((
                                    CutSite::AtVertex(cur),
                                    vec![
                                        RemovedPart {
                                            side: Some(Side::L),
                                            length: tables.branch_len[a.0],
                                            phi_value: tables.phi_top[a.0],
                                        },
                                        RemovedPart {
                                            side: Some(Side::R),
                                            length: tables.branch_len[b.0],
                                            phi_value: tables.phi_top[b.0],
                                        },
                                    ],
                                )),
                            };
                            break;
                        }
                    }
                    _ => {
                        // Degree-2 intermediate vertex in the input: treat
                        // its sole branch as the continuation.
                        let c = l.or(r).unwrap();
                        cur = c;
                    }
                }
            } else {
                // Partial edge: pendant piece above the crossing.
                let s = tables.crossing[cur.0].expect("caller checked survives");
                acc += tree.edge_len(cur) - s;
                let removed_len = match phi {
                    // For length pruning the removed subtree at a crossing
                    // has length exactly t.
                    Phi::Length => t,
                    _ => tables.branch_len[cur.0] - (tree.edge_len(cur) - s),
                };
                end = End::Leaf {
                    cut: Some((
                        CutSite::OnEdge(cur, s),
                        vec![RemovedPart {
                            side: None,
                            length: removed_len,
                            phi_value: t,
                        }],
                    )),
                };
                break;
            }
        }
        // Materialize the pruned edge.
        let new_id = match job.attach {
            None => out.add_root_child(acc)?,
            Some((p, side)) => out.add_child(p, side, acc)?,
        };
        for (depth, site, parts) in edge_cuts {
            cuts.cuts.push(Cut {
                pruned: Some(TreePoint {
                    node: new_id,
                    offset: acc - depth,
                }),
                site,
                parts,
            });
        }
        match end {
            End::Leaf { cut } => {
                if let Some((site, parts)) = cut {
                    cuts.cuts.push(Cut {
                        pruned: Some(TreePoint {
                            node: new_id,
                            offset: 0.0,
                        }),
                        site,
                        parts,
                    });
                }
            }
            End::Junction(a, b) => {
                jobs.push(Job {
                    top: b,
                    attach: Some((new_id, Side::R)),
                });
                jobs.push(Job {
                    top: a,
                    attach: Some((new_id, Side::L)),
                });
            }
        }
    }
    Ok((out, cuts))
}

/// One round of Horton pruning: cut the leaves, then series-reduce.
/// Implemented directly; equals `prune(tree, HortonOrder, 1)` (tested).
pub fn horton_prune(tree: &PlaneTree) -> PlaneTree {
    let mut t = tree.clone();
    for v in tree.node_ids() {
        if tree.is_leaf(v) {
            t.remove_subtree(v);
        }
    }
    t.series_reduce()
}

/// Mass-equipped pruning with phi = tree length: prune, then attach at each
/// cut point the mass of the removed subtree (twice its length), oriented
/// by the plane side it was removed from.
pub fn prune_mass_equipped(tree: &PlaneTree, t: f64) -> Result<MassTree, PruneError> {
    if tree.is_stemless() {
        return Err(PruneError::NotPlanted);
    }
    let (base, cuts) = prune(tree, &Phi::Length, t)?;
    let mut leaf_masses = Vec::new();
    let mut interior_masses = Vec::new();
    for cut in &cuts.cuts {
        let Some(point) = cut.pruned else { continue };
        match cut.parts.as_slice() {
            [one] if one.side.is_none() => {
                // Pendant cut: the pruned-tree leaf carries the single mass.
                leaf_masses.push((point.node, LeafMass::Single(2.0 * one.length)));
            }
            [one] => {
                interior_masses.push(InteriorMass {
                    edge: point.node,
                    offset: point.offset,
                    mass: 2.0 * one.length,
                    side: one.side.unwrap(),
                });
            }
            [l, r] => {
                debug_assert_eq!(l.side, Some(Side::L));
                debug_assert_eq!(r.side, Some(Side::R));
                leaf_masses.push((
                    point.node,
                    LeafMass::Double {
                        left: 2.0 * l.length,
                        right: 2.0 * r.length,
                    },
                ));
            }
            _ => unreachable!("cuts carry one or two removed parts"),
        }
    }
    Ok(MassTree {
        base,
        leaf_masses,
        interior_masses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::PlaneTree;

    fn fig6_y() -> PlaneTree {
        // Y-shaped tree with leaf lengths a=1 (left), b=2 (right), stem c=3.
        PlaneTree::y_tree(3.0, 1.0, 2.0)
    }

    #[test]
    fn length_pruning_stages_of_y_tree() {
        let y = fig6_y();
        // Stage II: t < a, still Y-shaped with leaf edges truncated by t.
        let (p, _) = prune(&y, &Phi::Length, 0.5).unwrap();
        assert!(p.same_tree(&PlaneTree::y_tree(3.0, 0.5, 1.5), 1e-12));
        // Stage III: a <= t < b, single edge of length c + b - t.
        let (p, cuts) = prune(&y, &Phi::Length, 1.5).unwrap();
        assert!(p.same_tree(&PlaneTree::single_edge(3.5), 1e-12));
        assert_eq!(cuts.cuts.len(), 2);
        // Stage IV: b <= t <= a+b, single edge of length c, constant.
        for t in [2.0, 2.5, 3.0] {
            let (p, _) = prune(&y, &Phi::Length, t).unwrap();
            assert!(p.same_tree(&PlaneTree::single_edge(3.0), 1e-12), "t={t}");
        }
        // Stage V: a+b < t < a+b+c, single edge of length a+b+c-t.
        let (p, _) = prune(&y, &Phi::Length, 4.0).unwrap();
        assert!(p.same_tree(&PlaneTree::single_edge(2.0), 1e-12));
        // Death beyond total length.
        let (p, cuts) = prune(&y, &Phi::Length, 6.5).unwrap();
        assert!(p.is_empty());
        assert_eq!(cuts.cuts.len(), 1);
        assert!(matches!(cuts.cuts[0].site, CutSite::AtRoot));
        // S_0 = T.
        let (p, cuts) = prune(&y, &Phi::Length, 0.0).unwrap();
        assert!(p.same_tree(&y, 1e-12));
        assert!(cuts.cuts.is_empty());
    }

    #[test]
    fn height_pruning_erases_from_leaves() {
        let e = PlaneTree::single_edge(3.0);
        let (p, _) = prune(&e, &Phi::Height, 1.0).unwrap();
        assert!(p.same_tree(&PlaneTree::single_edge(2.0), 1e-12));
        let (p, _) = prune(&e, &Phi::Height, 3.5).unwrap();
        assert!(p.is_empty());
        // Y-tree: every leafward point within distance t of the leaves goes.
        let y = fig6_y();
        let (p, _) = prune(&y, &Phi::Height, 1.5).unwrap();
        // left leg (1) gone entirely, cut 0.5 into the junction edge... the
        // junction's subtree has height 2, so the crossing sits on the stem:
        // height profile along stem = 2 + s, crossing at s = -0.5 < 0: the
        // junction itself survives iff 2 >= 1.5: yes. Right leg keeps 0.5.
        // Left leg dies at the junction (interior cut), so the result is the
        // series-reduced path stem + right remainder = 3 + 0.5.
        assert!(p.same_tree(&PlaneTree::single_edge(3.5), 1e-12));
    }

    #[test]
    fn height_semigroup_on_hand_trees() {
        let y = fig6_y();
        for (s, t) in [(0.3, 0.4), (0.5, 1.0), (1.2, 0.7)] {
            let (ps, _) = prune(&y, &Phi::Height, s).unwrap();
            let (pst, _) = prune(&ps, &Phi::Height, t).unwrap();
            let (direct, _) = prune(&y, &Phi::Height, s + t).unwrap();
            assert!(pst.same_tree(&direct, 1e-9), "s={s} t={t}");
        }
    }

    #[test]
    fn length_semigroup_violation_fig6() {
        let y = fig6_y();
        let (p15, _) = prune(&y, &Phi::Length, 1.5).unwrap();
        let (p_compose, _) = prune(&p15, &Phi::Length, 1.0).unwrap();
        let (p_direct, _) = prune(&y, &Phi::Length, 2.5).unwrap();
        // Stage IV memory loss: direct pruning at 2.5 gives the stem c = 3,
        // but composing loses the removed-subtree record and gives 2.5.
        assert!(p_direct.same_tree(&PlaneTree::single_edge(3.0), 1e-12));
        assert!(p_compose.same_tree(&PlaneTree::single_edge(2.5), 1e-12));
        assert!(!p_compose.same_tree(&p_direct, 1e-9));
    }

    #[test]
    fn horton_pruning_trajectory() {
        // Perfect 4-leaf planted tree: order 3, eliminated in three prunings.
        let mut t = PlaneTree::empty();
        let s = t.add_root_child(1.0).unwrap();
        let l = t.add_child(s, Side::L, 1.0).unwrap();
        let r = t.add_child(s, Side::R, 1.0).unwrap();
        for v in [l, r] {
            t.add_child(v, Side::L, 1.0).unwrap();
            t.add_child(v, Side::R, 1.0).unwrap();
        }
        let r1 = horton_prune(&t);
        assert_eq!(r1.num_leaves(), 2);
        let r2 = horton_prune(&r1);
        assert_eq!(r2.num_edges(), 1);
        let r3 = horton_prune(&r2);
        assert!(r3.is_empty());
        // horton_order counts the prunings
        assert_eq!(t.horton_order(), 3);
        // prune(HortonOrder, j) equals j rounds
        let (p1, _) = prune(&t, &Phi::HortonOrder, 1.0).unwrap();
        assert!(p1.same_tree(&r1, 1e-12));
        let (p2, _) = prune(&t, &Phi::HortonOrder, 2.0).unwrap();
        assert!(p2.same_tree(&r2, 1e-12));
        let (p3, _) = prune(&t, &Phi::HortonOrder, 3.0).unwrap();
        assert!(p3.is_empty());
        // floor convention: t in [1, 2) behaves like one round
        let (p, _) = prune(&t, &Phi::HortonOrder, 1.9).unwrap();
        assert!(p.same_tree(&r1, 1e-12));
        // horton_order recursion: k(T) = 1 + k(R(T)) for planted non-empty
        assert_eq!(t.horton_order(), 1 + r1.horton_order());
        // the two routes agree on random trees as well
        for i in 0..300u64 {
            let g = match crate::gw::sample_gw(
                &crate::gw::GwParams::new(1.0, 123).stream(i).cap(10_000),
            ) {
                Ok(g) => g,
                Err(_) => continue,
            };
            let direct = horton_prune(&g);
            let (via_prune, _) = prune(&g, &Phi::HortonOrder, 1.0).unwrap();
            assert!(direct.same_tree(&via_prune, 1e-12), "stream {i}");
        }
    }

    #[test]
    fn leafcount_keeps_points_with_enough_leaves() {
        let y = fig6_y();
        // every point has >= 1 descendant leaf through its edge
        let (p, _) = prune(&y, &Phi::LeafCount, 1.0).unwrap();
        assert!(p.same_tree(&y, 1e-12));
        // only the stem has 2 descendant leaves
        let (p, _) = prune(&y, &Phi::LeafCount, 2.0).unwrap();
        assert!(p.same_tree(&PlaneTree::single_edge(3.0), 1e-12));
        let (p, _) = prune(&y, &Phi::LeafCount, 3.0).unwrap();
        assert!(p.is_empty());
    }

    #[test]
    fn leafcount_matches_pointwise_classification() {
        // Brute-force the kept length by classifying points through
        // descendant_subtree, independently of the prune implementation.
        let mut t = PlaneTree::empty();
        let s = t.add_root_child(0.8).unwrap();
        let j = t.add_child(s, Side::L, 0.6).unwrap();
        t.add_child(s, Side::R, 1.1).unwrap();
        t.add_child(j, Side::L, 0.4).unwrap();
        t.add_child(j, Side::R, 0.9).unwrap();
        for phi in [Phi::LeafCount, Phi::Length, Phi::Height] {
            for tt in [0.3, 0.7, 1.0, 1.6, 2.0, 3.0] {
                let (p, _) = prune(&t, &phi, tt).unwrap();
                let mut kept = 0.0;
                let steps = 4000;
                for v in t.node_ids() {
                    let len = t.edge_len(v);
                    for i in 0..steps {
                        let s_off = (i as f64 + 0.5) / steps as f64 * len;
                        let sub = t
                            .descendant_subtree(&TreePoint { node: v, offset: s_off })
                            .unwrap();
                        if phi.value_of(&sub) >= tt {
                            kept += len / steps as f64;
                        }
                    }
                }
                assert!(
                    (kept - p.length()).abs() < 4.0 * 3.8 / steps as f64 + 1e-9,
                    "phi={:?} t={} brute={} pruned={}",
                    phi.kind(),
                    tt,
                    kept,
                    p.length()
                );
            }
        }
    }

    #[test]
    fn nesting_under_embedding() {
        let y = fig6_y();
        let times = [0.0, 0.4, 0.9, 1.7, 2.4, 3.2, 4.5];
        for phi in [Phi::Length, Phi::Height] {
            for w in times.windows(2) {
                let (a, _) = prune(&y, &phi, w[1]).unwrap();
                let (b, _) = prune(&y, &phi, w[0]).unwrap();
                assert!(crate::tree::is_embeddable(&a, &b, 1e-9).unwrap());
            }
        }
    }

    #[test]
    fn edge_crossing_examples() {
        let child = PlaneTree::single_edge(1.0);
        assert_eq!(edge_crossing(&child, &Phi::Length, 1.5, 2.0), Some(0.5));
        assert_eq!(edge_crossing(&child, &Phi::HortonOrder, 1.0, 2.0), None);
        // height 2 child, t=5 on an edge of length 2: fully pruned
        let tall = PlaneTree::single_edge(2.0);
        assert_eq!(edge_crossing(&tall, &Phi::Height, 5.0, 2.0), None);
    }

    #[test]
    fn mass_equipped_w_potential_stages() {
        // Level-set tree of a W potential with v1=1 (left), v3=2 (right):
        // saddle depth 1 below zero, so stem c=1, legs 1 and 2.
        let w = PlaneTree::y_tree(1.0, 1.0, 2.0);
        // Stage 2: t in [v_min, v_max): I-shaped, interior mass 2*v_min
        // at distance v_max - t above the leaf, leaf mass 2t.
        let mt = prune_mass_equipped(&w, 1.5).unwrap();
        assert!(mt.base.same_tree(&PlaneTree::single_edge(1.0 + 2.0 - 1.5), 1e-12));
        assert_eq!(mt.interior_masses.len(), 1);
        let im = mt.interior_masses[0];
        assert!((im.mass - 2.0).abs() < 1e-12);
        assert_eq!(im.side, Side::L);
        // distance from the leaf = offset from the child endpoint
        assert!((im.offset - (2.0 - 1.5)).abs() < 1e-12);
        assert_eq!(mt.leaf_masses.len(), 1);
        assert!(matches!(mt.leaf_masses[0].1, LeafMass::Single(m) if (m - 3.0).abs() < 1e-12));
        assert!(mt.is_admissible(1.5, 1e-9));
        // Stage 3: t in [v_max, v1+v3): double leaf mass (2 v1, 2 v3).
        let mt = prune_mass_equipped(&w, 2.5).unwrap();
        assert!(mt.base.same_tree(&PlaneTree::single_edge(1.0), 1e-12));
        assert!(mt.interior_masses.is_empty());
        assert_eq!(mt.leaf_masses.len(), 1);
        match mt.leaf_masses[0].1 {
            LeafMass::Double { left, right } => {
                assert!((left - 2.0).abs() < 1e-12);
                assert!((right - 4.0).abs() < 1e-12);
            }
            _ => panic!("expected double mass"),
        }
        assert!(mt.is_admissible(2.5, 1e-9));
        // t = 0: original tree, no masses.
        let mt = prune_mass_equipped(&w, 0.0).unwrap();
        assert!(mt.base.same_tree(&w, 1e-12));
        assert!(mt.leaf_masses.is_empty() && mt.interior_masses.is_empty());
    }

    #[test]
    fn mass_conservation() {
        let y = fig6_y();
        for t in [0.3, 0.9, 1.4, 2.2, 2.9, 4.1] {
            let mt = prune_mass_equipped(&y, t).unwrap();
            let removed = y.length() - mt.base.length();
            assert!(
                (mt.total_mass() - 2.0 * removed).abs() < 1e-9,
                "t={t}: mass {} vs 2*removed {}",
                mt.total_mass(),
                2.0 * removed
            );
        }
    }

    #[test]
    fn custom_phi_matches_builtin_length() {
        let y = fig6_y();
        let custom = Phi::Custom(CustomPhi {
            value: Box::new(|t: &PlaneTree| t.length()),
            edge_profile: Box::new(|v, _t: &PlaneTree, s| v + s),
        });
        for t in [0.5, 1.5, 2.5, 4.0] {
            let (a, _) = prune(&y, &custom, t).unwrap();
            let (b, _) = prune(&y, &Phi::Length, t).unwrap();
            assert!(a.same_tree(&b, 1e-9), "t={t}");
        }
    }

    #[test]
    fn custom_phi_non_monotone_rejected() {
        let y = fig6_y();
        let bad = Phi::Custom(CustomPhi {
            value: Box::new(|t: &PlaneTree| t.length()),
            edge_profile: Box::new(|v, _t: &PlaneTree, s| v - s),
        });
        assert!(matches!(
            prune(&y, &bad, 1.0),
            Err(PruneError::NonMonotone { .. })
        ));
    }
}
