//! Shock tree construction by shortest-basin-first unfolding.
//!
//! Sinks are born at the local minima of the potential. The shortest basin
//! always spans a W-shaped piece of the (unfolded) potential; merging its
//! two sinks and replacing the basin by a V repeats until a single sink
//! remains. Each merge fixes the vertical (rest) and horizontal (motion)
//! components of the two child edges: `v = psi(saddle) - psi(child's own
//! extremum)` and `h = |basin center - child position|`.

use super::potential::{Basin, Potential};
use super::AnnihilationError;
use crate::tree::{NodeId, PlaneTree, Side, TreePoint};

/// Per-vertex decoration of the shock tree.
#[derive(Debug, Clone, Copy)]
pub struct ShockNode {
    /// Rest (mass accumulation) duration of the sink on this edge.
    pub v: f64,
    /// Motion duration of the sink on this edge.
    pub h: f64,
    /// Sink position while resting: the local minimum for a leaf, the basin
    /// center for a merged sink.
    pub x: f64,
    /// Potential value at the node's extremum (minimum or saddle).
    pub psi: f64,
    /// Time the sink is created (0 for leaves, half the basin length for
    /// merge vertices).
    pub birth: f64,
    /// Basin of the saddle for internal vertices.
    pub basin: Option<(f64, f64)>,
}

/// Shock tree: plane tree with edge lengths `v + h` plus per-vertex
/// geometry. Vertex `i` of `base` owns `nodes[i]`.
#[derive(Debug, Clone)]
pub struct ShockTree {
    pub base: PlaneTree,
    nodes: Vec<ShockNode>,
}

struct Scratch {
    v: f64,
    h: f64,
    x: f64,
    psi: f64,
    birth: f64,
    basin: Option<(f64, f64)>,
    left: Option<usize>,
    right: Option<usize>,
}

/// Entry of the current-minima list during unfolding.
#[derive(Clone, Copy)]
struct Entry {
    scratch: usize,
    /// Current sink position (min location or basin center).
    q: f64,
    /// Potential value of the entry's own extremum.
    psi: f64,
}

pub fn shock_tree(pot: &Potential) -> Result<ShockTree, AnnihilationError> {
    let e = pot.excursion().extrema();
    let xs = pot.positions();
    let n = pot.excursion().num_maxima(); // number of sinks

    let mut scratch: Vec<Scratch> = Vec::with_capacity(2 * n);
    // Leaf per local minimum of the potential (exc maximum, odd index).
    let mut entries: Vec<Entry> = (0..n)
        .map(|k| {
            let idx = 2 * k + 1;
            scratch.push(Scratch {
                v: 0.0,
                h: 0.0,
                x: xs[idx],
                psi: -e[idx],
                birth: 0.0,
                basin: None,
                left: None,
                right: None,
            });
            Entry {
                scratch: k,
                q: xs[idx],
                psi: -e[idx],
            }
        })
        .collect();

    // Saddles ordered by basin length; unfolding does not change the basins
    // of the remaining saddles, so they are precomputed. For each saddle,
    // `slot[j]` is its position in the entries list: saddle j sits between
    // entries j and j+1 initially; a merge collapses two adjacent entries.
    let mut basins: Vec<Basin> = pot.basins();
    basins.sort_by(|a, b| a.len().partial_cmp(&b.len()).unwrap());
    if basins.windows(2).any(|w| w[0].len() == w[1].len()) {
        return Err(AnnihilationError::Genericity("tied basin lengths".into()));
    }

    // Merges keep the left slot as the representative of the coalesced
    // range of original minima; union-find with path halving locates the
    // slot covering any original minimum, and prev/next link alive slots.
    let mut rep: Vec<usize> = (0..n).collect();
    let mut next: Vec<usize> = (1..=n).collect();
    let mut prev: Vec<usize> = (0..n).map(|i| i.wrapping_sub(1)).collect();
    fn find(rep: &mut [usize], mut i: usize) -> usize {
        while rep[i] != i {
            rep[i] = rep[rep[i]];
            i = rep[i];
        }
        i
    }

    for b in &basins {
        // saddle at extremum index 2k sits between original minima k-1 | k
        let k = b.saddle / 2;
        let r = find(&mut rep, k);
        let l = prev[r];
        debug_assert!(l < n, "saddle has no left neighbor");
        let (el, er) = (entries[l], entries[r]);
        // W-step: the basin must cover exactly these two sinks.
        debug_assert!(
            el.q > b.x_left - 1e-9 && er.q < b.x_right + 1e-9,
            "shortest basin is not W-shaped"
        );
        let c = b.center();
        let birth = 0.5 * b.len();
        // Children pick up their vertical and horizontal components.
        {
            let s = &mut scratch[el.scratch];
            s.v = b.psi - el.psi;
            s.h = (c - el.q).abs();
        }
        {
            let s = &mut scratch[er.scratch];
            s.v = b.psi - er.psi;
            s.h = (c - er.q).abs();
        }
        let merged = scratch.len();
        scratch.push(Scratch {
            v: 0.0,
            h: 0.0,
            x: c,
            psi: b.psi,
            birth,
            basin: Some((b.x_left, b.x_right)),
            left: Some(entries[l].scratch),
            right: Some(entries[r].scratch),
        });
        // Collapse r into l.
        entries[l] = Entry {
            scratch: merged,
            q: c,
            psi: b.psi,
        };
        rep[r] = l;
        let rn = next[r];
        next[l] = rn;
        if rn < n {
            prev[rn] = l;
        }
    }

    // The remaining entry is the root child: it rests until everything is
    // consumed; the stem has no horizontal part.
    let top = entries[find(&mut rep, 0)];
    {
        let s = &mut scratch[top.scratch];
        s.v = 0.0 - top.psi;
        s.h = 0.0;
    }

    // Materialize the plane tree top-down.
    let mut base = PlaneTree::empty();
    let mut nodes: Vec<ShockNode> = Vec::with_capacity(scratch.len());
    let mut work: Vec<(usize, Option<(NodeId, Side)>)> = vec![(top.scratch, None)];
    while let Some((si, attach)) = work.pop() {
        let s = &scratch[si];
        let len = s.v + s.h;
        let id = match attach {
            None => base.add_root_child(len)?,
            Some((p, side)) => base.add_child(p, side, len)?,
        };
        debug_assert_eq!(id.0, nodes.len());
        nodes.push(ShockNode {
            v: s.v,
            h: s.h,
            x: s.x,
            psi: s.psi,
            birth: s.birth,
            basin: s.basin,
        });
        if let (Some(l), Some(r)) = (s.left, s.right) {
            work.push((r, Some((id, Side::R))));
            work.push((l, Some((id, Side::L))));
        }
    }

    let st = ShockTree { base, nodes };
    debug_assert!(st.check_equidistant(1e-7 * (1.0 + pot.t_max())));
    Ok(st)
}

impl ShockTree {
    pub fn node(&self, id: NodeId) -> &ShockNode {
        &self.nodes[id.0]
    }

    /// Tree of the vertical components only: same combinatorial structure
    /// and embedding, edge lengths `v_i`. Isometric to the level-set tree
    /// of the negated potential.
    pub fn vertical_tree(&self) -> PlaneTree {
        let mut out = PlaneTree::empty();
        let mut work: Vec<(NodeId, Option<(NodeId, Side)>)> = self
            .base
            .root_children()
            .iter()
            .map(|&c| (c, None))
            .collect();
        while let Some((v, attach)) = work.pop() {
            let len = self.nodes[v.0].v;
            let id = match attach {
                None => out.add_root_child(len).unwrap(),
                Some((p, side)) => out.add_child(p, side, len).unwrap(),
            };
            let (l, r) = self.base.children(v);
            if let (Some(a), Some(b)) = (l, r) {
                work.push((b, Some((id, Side::R))));
                work.push((a, Some((id, Side::L))));
            }
        }
        out
    }

    /// Total vertical length strictly below vertex `v` (its descendants'
    /// edges, not its own).
    fn vert_below(&self, v: NodeId) -> f64 {
        let mut sum = 0.0;
        let mut stack: Vec<NodeId> = {
            let (l, r) = self.base.children(v);
            [l, r].into_iter().flatten().collect()
        };
        while let Some(u) = stack.pop() {
            sum += self.nodes[u.0].v;
            let (l, r) = self.base.children(u);
            for c in [l, r].into_iter().flatten() {
                stack.push(c);
            }
        }
        sum
    }

    /// Sink mass at a point of the shock tree: twice the vertical length of
    /// the part of the tree descendant to it. The lower `v` portion of each
    /// edge is the vertical part.
    pub fn mass_at(&self, p: &TreePoint) -> f64 {
        let n = &self.nodes[p.node.0];
        2.0 * (self.vert_below(p.node) + p.offset.min(n.v))
    }

    /// Time at a point of the shock tree: distance to any descendant leaf.
    pub fn time_at(&self, p: &TreePoint) -> f64 {
        let n = &self.nodes[p.node.0];
        n.birth + p.offset.min(n.v) + (p.offset - n.v).max(0.0)
    }

    /// Sink position at a point: constant `x` on the vertical portion, then
    /// moving at unit speed toward the parent's center.
    pub fn position_at(&self, p: &TreePoint) -> f64 {
        let n = &self.nodes[p.node.0];
        if p.offset <= n.v {
            return n.x;
        }
        let run = p.offset - n.v;
        let target = match self.base.parent(p.node) {
            Some(par) => self.nodes[par.0].x,
            None => n.x,
        };
        if target >= n.x {
            n.x + run
        } else {
            n.x - run
        }
    }

    fn check_equidistant(&self, tol: f64) -> bool {
        // every leaf at the same distance from the root (= t_max)
        let mut depths = Vec::new();
        for v in self.base.node_ids() {
            if self.base.is_leaf(v) {
                depths.push(self.base.depth_of(v));
            }
        }
        depths
            .windows(2)
            .all(|w| (w[0] - w[1]).abs() <= tol)
    }

    /// Merge record per internal vertex: (merge time, center x, span of
    /// original sink indices below), sorted by time. Leaves are indexed
    /// left to right.
    pub fn merge_records(&self) -> Vec<(f64, f64, usize, usize)> {
        // leaf order by plane traversal
        let mut leaf_index = vec![usize::MAX; self.base.arena_size()];
        let mut count = 0usize;
        for v in self.base.dfs_preorder() {
            if self.base.is_leaf(v) {
                leaf_index[v.0] = count;
                count += 1;
            }
        }
        let mut lo = vec![usize::MAX; self.base.arena_size()];
        let mut hi = vec![0usize; self.base.arena_size()];
        let mut recs = Vec::new();
        for v in self.base.postorder() {
            if self.base.is_leaf(v) {
                lo[v.0] = leaf_index[v.0];
                hi[v.0] = leaf_index[v.0];
            } else {
                let (l, r) = self.base.children(v);
                let (l, r) = (l.unwrap(), r.unwrap());
                lo[v.0] = lo[l.0].min(lo[r.0]);
                hi[v.0] = hi[l.0].max(hi[r.0]);
                let n = &self.nodes[v.0];
                recs.push((n.birth, n.x, lo[v.0], hi[v.0]));
            }
        }
        recs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        recs
    }

    /// Phase-space polylines of the graphical shock tree: one vertical
    /// segment per local minimum, one vertical segment per basin center,
    /// one horizontal segment per saddle connecting the children's centers.
    pub fn phase_polylines(&self) -> Vec<[(f64, f64); 2]> {
        let mut segs = Vec::new();
        for v in self.base.dfs_preorder() {
            let n = &self.nodes[v.0];
            // vertical part of this node's sink trajectory
            segs.push([(n.x, n.psi), (n.x, n.psi + n.v)]);
            if let (Some(l), Some(r)) = self.base.children(v) {
                let (nl, nr) = (&self.nodes[l.0], &self.nodes[r.0]);
                segs.push([(nl.x, n.psi), (nr.x, n.psi)]);
            }
        }
        segs
    }
}
