//! Finite rooted reduced binary plane trees with positive edge lengths.
//!
//! Nodes live in a flat arena indexed by [`NodeId`]. Each non-root node
//! stores its parent edge length; the root is implicit and owns one ordered
//! child (planted tree) or two (stemless tree). Deleted nodes are tombstoned
//! and the arena is compacted on demand, so subtree deletion stays cheap.
//!
//! Trees are immutable once built; every operation that changes structure
//! returns a fresh tree.

use thiserror::Error;

/// Index into the node arena.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub usize);

/// Plane orientation of a child relative to its parent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Side {
    L,
    R,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::L => Side::R,
            Side::R => Side::L,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum TreeError {
    #[error("operation requires a non-empty tree")]
    EmptyTree,
    #[error("operation requires a planted tree")]
    NotPlanted,
    #[error("edge length must be positive and finite, got {0}")]
    BadLength(f64),
    #[error("node {0} does not exist")]
    NoSuchNode(usize),
    #[error("child slot already occupied")]
    SlotTaken,
    #[error("root already has two children")]
    RootFull,
    #[error("point offset {offset} outside edge of length {len}")]
    BadOffset { offset: f64, len: f64 },
    #[error("tree has a vertex with exactly one child; not reduced")]
    NotReduced,
    #[error("embeddability search is limited to trees with at most {0} edges")]
    EmbedTooLarge(usize),
}

/// A non-root vertex together with its parent edge.
#[derive(Debug, Clone)]
pub struct NodeRecord {
    /// Parent vertex; `None` means the edge hangs from the root.
    pub parent: Option<NodeId>,
    pub left: Option<NodeId>,
    pub right: Option<NodeId>,
    /// Length of the edge from this vertex up to its parent.
    pub len: f64,
}

/// A location inside a tree: the edge above `node`, at distance `offset`
/// from the child endpoint toward the parent. `offset = 0` is the vertex
/// itself; `offset = len` is the parent vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreePoint {
    pub node: NodeId,
    pub offset: f64,
}

/// Finite rooted reduced binary plane tree with edge lengths. The empty
/// tree (a bare root, no edges) is a valid value.
#[derive(Debug, Clone, Default)]
pub struct PlaneTree {
    nodes: Vec<Option<NodeRecord>>,
    root: Vec<NodeId>,
}

impl PlaneTree {
    pub fn empty() -> Self {
        PlaneTree::default()
    }

    /// Planted tree consisting of a single stem edge.
    pub fn single_edge(len: f64) -> Self {
        let mut t = PlaneTree::empty();
        t.add_root_child(len).expect("fresh tree");
        t
    }

    /// Planted Y: a stem carrying a left leaf edge and a right leaf edge.
    pub fn y_tree(stem: f64, left: f64, right: f64) -> Self {
        let mut t = PlaneTree::empty();
        let v = t.add_root_child(stem).unwrap();
        t.add_child(v, Side::L, left).unwrap();
        t.add_child(v, Side::R, right).unwrap();
        t
    }

    fn push_node(&mut self, rec: NodeRecord) -> NodeId {
        let id = NodeId(self.nodes.len());
        self.nodes.push(Some(rec));
        id
    }

    fn check_len(len: f64) -> Result<(), TreeError> {
        if !(len > 0.0 && len.is_finite()) {
            return Err(TreeError::BadLength(len));
        }
        Ok(())
    }

    /// Attach an edge to the root. One call makes a planted tree, a second
    /// makes it stemless (first child is the left one).
    pub fn add_root_child(&mut self, len: f64) -> Result<NodeId, TreeError> {
        Self::check_len(len)?;
        if self.root.len() == 2 {
            return Err(TreeError::RootFull);
        }
        let id = self.push_node(NodeRecord {
            parent: None,
            left: None,
            right: None,
            len,
        });
        self.root.push(id);
        Ok(id)
    }

    pub fn add_child(&mut self, parent: NodeId, side: Side, len: f64) -> Result<NodeId, TreeError> {
        Self::check_len(len)?;
        if self.get(parent).is_none() {
            return Err(TreeError::NoSuchNode(parent.0));
        }
        let taken = {
            let p = self.get(parent).unwrap();
            match side {
                Side::L => p.left.is_some(),
                Side::R => p.right.is_some(),
            }
        };
        if taken {
            return Err(TreeError::SlotTaken);
        }
        let id = self.push_node(NodeRecord {
            parent: Some(parent),
            left: None,
            right: None,
            len,
        });
        let p = self.nodes[parent.0].as_mut().unwrap();
        match side {
            Side::L => p.left = Some(id),
            Side::R => p.right = Some(id),
        }
        Ok(id)
    }

    pub fn get(&self, id: NodeId) -> Option<&NodeRecord> {
        self.nodes.get(id.0).and_then(|n| n.as_ref())
    }

    fn rec(&self, id: NodeId) -> &NodeRecord {
        self.nodes[id.0].as_ref().expect("live node")
    }

    pub fn is_empty(&self) -> bool {
        self.root.is_empty()
    }

    pub fn is_planted(&self) -> bool {
        self.root.len() == 1
    }

    pub fn is_stemless(&self) -> bool {
        self.root.len() == 2
    }

    pub fn root_children(&self) -> &[NodeId] {
        &self.root
    }

    /// The stem edge of a planted tree.
    pub fn stem(&self) -> Option<NodeId> {
        if self.is_planted() {
            Some(self.root[0])
        } else {
            None
        }
    }

    pub fn edge_len(&self, id: NodeId) -> f64 {
        self.rec(id).len
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.rec(id).parent
    }

    pub fn children(&self, id: NodeId) -> (Option<NodeId>, Option<NodeId>) {
        let r = self.rec(id);
        (r.left, r.right)
    }

    pub fn is_leaf(&self, id: NodeId) -> bool {
        let r = self.rec(id);
        r.left.is_none() && r.right.is_none()
    }

    /// Side of `id` relative to its parent (`None` for a root child of a
    /// planted tree; root children of a stemless tree report L and R).
    pub fn side_of(&self, id: NodeId) -> Option<Side> {
        match self.rec(id).parent {
            Some(p) => {
                let r = self.rec(p);
                if r.left == Some(id) {
                    Some(Side::L)
                } else {
                    Some(Side::R)
                }
            }
            None => {
                if self.root.len() == 2 {
                    if self.root[0] == id {
                        Some(Side::L)
                    } else {
                        Some(Side::R)
                    }
                } else {
                    None
                }
            }
        }
    }

    pub fn num_edges(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_some()).count()
    }

    /// Raw arena length including tombstones; node indices are below this.
    pub fn arena_size(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter_map(|(i, n)| n.as_ref().map(|_| NodeId(i)))
    }

    /// Depth-first preorder, left before right, root children in plane order.
    pub fn dfs_preorder(&self) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.num_edges());
        let mut stack: Vec<NodeId> = self.root.iter().rev().copied().collect();
        while let Some(v) = stack.pop() {
            out.push(v);
            let r = self.rec(v);
            if let Some(c) = r.right {
                stack.push(c);
            }
            if let Some(c) = r.left {
                stack.push(c);
            }
        }
        out
    }

    /// Children-before-parent order.
    pub fn postorder(&self) -> Vec<NodeId> {
        let mut pre = self.dfs_preorder();
        pre.reverse();
        pre
    }

    pub fn leaves(&self) -> Vec<NodeId> {
        self.dfs_preorder()
            .into_iter()
            .filter(|&v| self.is_leaf(v))
            .collect()
    }

    /// Distance from the root to the vertex `id`.
    pub fn depth_of(&self, id: NodeId) -> f64 {
        let mut d = 0.0;
        let mut cur = Some(id);
        while let Some(v) = cur {
            let r = self.rec(v);
            d += r.len;
            cur = r.parent;
        }
        d
    }

    /// Structural validation: parent/child links consistent, lengths
    /// positive, every vertex with 0 or 2 children, acyclic from the root.
    pub fn validate(&self) -> Result<(), TreeError> {
        let mut seen = 0usize;
        for v in self.dfs_preorder() {
            seen += 1;
            let r = self.rec(v);
            Self::check_len(r.len)?;
            if r.left.is_some() != r.right.is_some() {
                return Err(TreeError::NotReduced);
            }
            for (c, side) in [(r.left, Side::L), (r.right, Side::R)] {
                if let Some(c) = c {
                    let cr = self.get(c).ok_or(TreeError::NoSuchNode(c.0))?;
                    if cr.parent != Some(v) {
                        return Err(TreeError::NoSuchNode(c.0));
                    }
                    let _ = side;
                }
            }
        }
        if seen != self.num_edges() {
            return Err(TreeError::NoSuchNode(0));
        }
        Ok(())
    }

    /// Sum of the edge lengths; 0 for the empty tree.
    pub fn length(&self) -> f64 {
        self.node_ids().map(|v| self.rec(v).len).sum()
    }

    /// Maximal distance between the root and a vertex; 0 for the empty tree.
    pub fn height(&self) -> f64 {
        let mut best = 0.0f64;
        let mut stack: Vec<(NodeId, f64)> = self.root.iter().map(|&v| (v, 0.0)).collect();
        while let Some((v, d)) = stack.pop() {
            let r = self.rec(v);
            let dv = d + r.len;
            if dv > best {
                best = dv;
            }
            if let Some(c) = r.left {
                stack.push((c, dv));
            }
            if let Some(c) = r.right {
                stack.push((c, dv));
            }
        }
        best
    }

    pub fn num_leaves(&self) -> usize {
        self.node_ids().filter(|&v| self.is_leaf(v)).count()
    }

    /// Horton-Strahler order: the number of Horton prunings that eliminate a
    /// planted tree, that number plus one for a stemless tree, and 0 for the
    /// empty tree by convention.
    pub fn horton_order(&self) -> u32 {
        if self.is_empty() {
            return 0;
        }
        let mut k = vec![0u32; self.nodes.len()];
        for v in self.postorder() {
            let r = self.rec(v);
            k[v.0] = match (r.left, r.right) {
                (None, None) => 1,
                (Some(a), Some(b)) => {
                    let (ka, kb) = (k[a.0], k[b.0]);
                    if ka == kb {
                        ka + 1
                    } else {
                        ka.max(kb)
                    }
                }
                _ => k[r.left.or(r.right).unwrap().0],
            };
        }
        if self.is_planted() {
            k[self.root[0].0]
        } else {
            let (a, b) = (k[self.root[0].0], k[self.root[1].0]);
            if a == b {
                a + 1
            } else {
                a.max(b)
            }
        }
    }

    /// The descendant tree of the point `p`: everything at or below `p`,
    /// rooted at `p`. The partial parent edge below `p` becomes the stem.
    /// At a leaf vertex (offset 0) the result degenerates to the empty tree;
    /// at an internal vertex it is stemless.
    pub fn descendant_subtree(&self, p: &TreePoint) -> Result<PlaneTree, TreeError> {
        let rec = self
            .nodes
            .get(p.node.0)
            .and_then(|n| n.as_ref())
            .ok_or(TreeError::NoSuchNode(p.node.0))?;
        if !(p.offset >= 0.0 && p.offset <= rec.len) {
            return Err(TreeError::BadOffset {
                offset: p.offset,
                len: rec.len,
            });
        }
        let mut out = PlaneTree::empty();
        // Worklist of (original node, attachment in the new tree).
        enum Attach {
            Root,
            Under(NodeId, Side),
        }
        let mut work: Vec<(NodeId, Attach)> = Vec::new();
        if p.offset > 0.0 {
            let stem = out.push_node(NodeRecord {
                parent: None,
                left: None,
                right: None,
                len: p.offset,
            });
            out.root.push(stem);
            let r = self.rec(p.node);
            if let Some(c) = r.left {
                work.push((c, Attach::Under(stem, Side::L)));
            }
            if let Some(c) = r.right {
                work.push((c, Attach::Under(stem, Side::R)));
            }
        } else {
            // offset 0: the point is the vertex itself.
            let r = self.rec(p.node);
            match (r.left, r.right) {
                (None, None) => return Ok(out), // empty tree convention
                (l, rr) => {
                    if let Some(c) = rr {
                        work.push((c, Attach::Root));
                    }
                    if let Some(c) = l {
                        work.push((c, Attach::Root));
                    }
                    work.reverse();
                }
            }
        }
        // Copy subtrees iteratively (DFS).
        while let Some((orig, at)) = work.pop() {
            let r = self.rec(orig);
            let new_id = match at {
                Attach::Root => {
                    let id = out.push_node(NodeRecord {
                        parent: None,
                        left: None,
                        right: None,
                        len: r.len,
                    });
                    out.root.push(id);
                    id
                }
                Attach::Under(p, s) => {
                    let id = out.push_node(NodeRecord {
                        parent: Some(p),
                        left: None,
                        right: None,
                        len: r.len,
                    });
                    let pr = out.nodes[p.0].as_mut().unwrap();
                    match s {
                        Side::L => pr.left = Some(id),
                        Side::R => pr.right = Some(id),
                    }
                    id
                }
            };
            if let Some(c) = r.right {
                work.push((c, Attach::Under(new_id, Side::R)));
            }
            if let Some(c) = r.left {
                work.push((c, Attach::Under(new_id, Side::L)));
            }
        }
        Ok(out)
    }

    /// Tombstone a vertex and everything below it.
    pub fn remove_subtree(&mut self, id: NodeId) {
        if self.get(id).is_none() {
            return;
        }
        if let Some(p) = self.rec(id).parent {
            let pr = self.nodes[p.0].as_mut().unwrap();
            if pr.left == Some(id) {
                pr.left = None;
            }
            if pr.right == Some(id) {
                pr.right = None;
            }
        } else {
            self.root.retain(|&r| r != id);
        }
        let mut stack = vec![id];
        while let Some(v) = stack.pop() {
            if let Some(r) = self.nodes[v.0].take() {
                if let Some(c) = r.left {
                    stack.push(c);
                }
                if let Some(c) = r.right {
                    stack.push(c);
                }
            }
        }
    }

    /// Rebuild the arena without tombstones; ids become DFS preorder.
    pub fn compact(&mut self) {
        let order = self.dfs_preorder();
        let mut map = vec![usize::MAX; self.nodes.len()];
        for (new, old) in order.iter().enumerate() {
            map[old.0] = new;
        }
        let mut nodes: Vec<Option<NodeRecord>> = Vec::with_capacity(order.len());
        for old in &order {
            let r = self.rec(*old);
            nodes.push(Some(NodeRecord {
                parent: r.parent.map(|p| NodeId(map[p.0])),
                left: r.left.map(|c| NodeId(map[c.0])),
                right: r.right.map(|c| NodeId(map[c.0])),
                len: r.len,
            }));
        }
        self.root = self.root.iter().map(|r| NodeId(map[r.0])).collect();
        self.nodes = nodes;
    }

    /// Remove every degree-2 non-root vertex by merging its two edges,
    /// lengths adding. Idempotent; total length is preserved.
    pub fn series_reduce(&self) -> PlaneTree {
        let mut t = self.clone();
        let ids: Vec<NodeId> = t.node_ids().collect();
        for v in ids {
            if t.get(v).is_none() {
                continue;
            }
            let r = t.rec(v);
            let sole = match (r.left, r.right) {
                (Some(c), None) | (None, Some(c)) => Some(c),
                _ => None,
            };
            if let Some(c) = sole {
                // Merge edge of v into edge of c, then drop v.
                let vlen = r.len;
                let vparent = r.parent;
                let vside = t.side_of(v);
                {
                    let cr = t.nodes[c.0].as_mut().unwrap();
                    cr.len += vlen;
                    cr.parent = vparent;
                }
                match vparent {
                    Some(p) => {
                        let pr = t.nodes[p.0].as_mut().unwrap();
                        match vside.unwrap() {
                            Side::L => pr.left = Some(c),
                            Side::R => pr.right = Some(c),
                        }
                    }
                    None => {
                        let slot = t.root.iter().position(|&x| x == v).unwrap();
                        t.root[slot] = c;
                    }
                }
                t.nodes[v.0] = None;
            }
        }
        t.compact();
        t
    }

    /// Structural equality: same plane shape, edge lengths within `tol`
    /// (absolute), same planted/stemless status.
    pub fn same_tree(&self, other: &PlaneTree, tol: f64) -> bool {
        if self.root.len() != other.root.len() {
            return false;
        }
        let mut stack: Vec<(NodeId, NodeId)> = self
            .root
            .iter()
            .copied()
            .zip(other.root.iter().copied())
            .collect();
        while let Some((a, b)) = stack.pop() {
            let ra = self.rec(a);
            let rb = other.rec(b);
            if (ra.len - rb.len).abs() > tol {
                return false;
            }
            match (ra.left, rb.left, ra.right, rb.right) {
                (None, None, None, None) => {}
                (Some(x), Some(y), Some(u), Some(v)) => {
                    stack.push((x, y));
                    stack.push((u, v));
                }
                _ => return false,
            }
        }
        true
    }

    /// Combinatorial shape with plane order retained.
    pub fn p_shape(&self) -> CombinatorialShape {
        self.shape_impl(true)
    }

    /// Combinatorial shape with plane order forgotten (children canonically
    /// sorted).
    pub fn shape(&self) -> CombinatorialShape {
        self.shape_impl(false)
    }

    fn shape_impl(&self, plane: bool) -> CombinatorialShape {
        // Encode bottom-up to keep this iterative.
        let mut enc: Vec<Option<String>> = vec![None; self.nodes.len()];
        for v in self.postorder() {
            let r = self.rec(v);
            let s = match (r.left, r.right) {
                (None, None) => "o".to_string(),
                (Some(a), Some(b)) => {
                    let (mut x, mut y) = (
                        enc[a.0].clone().unwrap(),
                        enc[b.0].clone().unwrap(),
                    );
                    if !plane && x > y {
                        std::mem::swap(&mut x, &mut y);
                    }
                    format!("({x}{y})")
                }
                (l, rr) => enc[l.or(rr).unwrap().0].clone().unwrap(),
            };
            enc[v.0] = Some(s);
        }
        let body = match self.root.len() {
            0 => String::new(),
            1 => enc[self.root[0].0].clone().unwrap(),
            _ => {
                let (mut x, mut y) = (
                    enc[self.root[0].0].clone().unwrap(),
                    enc[self.root[1].0].clone().unwrap(),
                );
                if !plane && x > y {
                    std::mem::swap(&mut x, &mut y);
                }
                format!("({x}{y})")
            }
        };
        CombinatorialShape {
            planted: self.is_planted(),
            code: body,
        }
    }
}

/// Branching structure of a tree, without edge lengths. Two shapes compare
/// equal iff the trees have the same combinatorial structure (and, for
/// `p_shape`, the same plane order).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CombinatorialShape {
    pub planted: bool,
    pub code: String,
}

/// Maximum tree size accepted by [`is_embeddable`].
pub const EMBED_MAX_EDGES: usize = 12;

/// Does an isometric root-preserving embedding of `small` into `big` exist?
/// Exhaustive search over attachment points; sibling order may be swapped
/// (the partial order is metric, not planar). Lengths compare within `tol`
/// (absolute).
pub fn is_embeddable(small: &PlaneTree, big: &PlaneTree, tol: f64) -> Result<bool, TreeError> {
    if small.num_edges() > EMBED_MAX_EDGES || big.num_edges() > EMBED_MAX_EDGES {
        return Err(TreeError::EmbedTooLarge(EMBED_MAX_EDGES));
    }
    if small.is_empty() {
        return Ok(true); // phi <= T for all T
    }
    if big.is_empty() {
        return Ok(false);
    }
    let emb = Embedder { small, big, tol };
    let sroots = small.root_children();
    if sroots.len() == 1 {
        let stem = sroots[0];
        let (a, b) = small.children(stem);
        match (a, b) {
            // Single descending path: any branch tall enough will do.
            (None, None) => Ok(small.edge_len(stem) <= big.height() + tol),
            (Some(a), Some(b)) => {
                // The first junction of `small` must land on a junction of
                // `big` at depth >= stem length below the attachment point,
                // i.e. at depth >= stem length from the root of `big`.
                let s = small.edge_len(stem);
                for v in big.node_ids() {
                    let (x, y) = big.children(v);
                    if let (Some(x), Some(y)) = (x, y) {
                        if big.depth_of(v) + tol >= s && emb.match_pair(a, b, x, y) {
                            return Ok(true);
                        }
                    }
                }
                Ok(false)
            }
            _ => Err(TreeError::NotReduced),
        }
    } else {
        // Stemless: the root image must itself be a branching point.
        let (a, b) = (sroots[0], sroots[1]);
        if big.root_children().len() == 2 {
            let (x, y) = (big.root_children()[0], big.root_children()[1]);
            if emb.match_pair(a, b, x, y) {
                return Ok(true);
            }
        }
        for v in big.node_ids() {
            let (x, y) = big.children(v);
            if let (Some(x), Some(y)) = (x, y) {
                if emb.match_pair(a, b, x, y) {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }
}

struct Embedder<'a> {
    small: &'a PlaneTree,
    big: &'a PlaneTree,
    tol: f64,
}

impl Embedder<'_> {
    fn match_pair(&self, a: NodeId, b: NodeId, x: NodeId, y: NodeId) -> bool {
        (self.fit(a, self.small.edge_len(a), x) && self.fit(b, self.small.edge_len(b), y))
            || (self.fit(a, self.small.edge_len(a), y) && self.fit(b, self.small.edge_len(b), x))
    }

    /// Fit the `small` branch topped by edge `se` into `big` starting at the
    /// top of edge `be`, with `need` descent still required before reaching
    /// the structure at the bottom of `se`.
    fn fit(&self, se: NodeId, need: f64, be: NodeId) -> bool {
        let avail = self.big.edge_len(be);
        let (a, b) = self.small.children(se);
        match (a, b) {
            (None, None) => {
                if need <= avail + self.tol {
                    return true;
                }
                let (x, y) = self.big.children(be);
                [x, y]
                    .into_iter()
                    .flatten()
                    .any(|c| self.fit(se, need - avail, c))
            }
            (Some(a), Some(b)) => {
                if (need - avail).abs() <= self.tol {
                    // Junction lands on be's bottom vertex.
                    let (x, y) = self.big.children(be);
                    if let (Some(x), Some(y)) = (x, y) {
                        return self.match_pair(a, b, x, y);
                    }
                    false
                } else if need > avail {
                    let (x, y) = self.big.children(be);
                    [x, y]
                        .into_iter()
                        .flatten()
                        .any(|c| self.fit(se, need - avail, c))
                } else {
                    false
                }
            }
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn functionals_on_small_trees() {
        let phi = PlaneTree::empty();
        assert_eq!(phi.length(), 0.0);
        assert_eq!(phi.height(), 0.0);
        assert_eq!(phi.num_leaves(), 0);
        assert_eq!(phi.horton_order(), 0);

        let e = PlaneTree::single_edge(2.5);
        assert_eq!(e.length(), 2.5);
        assert_eq!(e.height(), 2.5);
        assert_eq!(e.num_leaves(), 1);
        assert_eq!(e.horton_order(), 1);

        let y = PlaneTree::y_tree(3.0, 1.0, 2.0);
        assert_eq!(y.length(), 6.0);
        assert_eq!(y.height(), 5.0);
        assert_eq!(y.num_leaves(), 2);
        assert_eq!(y.horton_order(), 2);
    }

    /// Perfect planted binary tree with 2^depth leaves, all edges unit.
    pub fn perfect(depth: u32) -> PlaneTree {
        let mut t = PlaneTree::empty();
        let top = t.add_root_child(1.0).unwrap();
        let mut frontier = vec![top];
        for _ in 0..depth {
            let mut next = Vec::new();
            for v in frontier {
                next.push(t.add_child(v, Side::L, 1.0).unwrap());
                next.push(t.add_child(v, Side::R, 1.0).unwrap());
            }
            frontier = next;
        }
        t
    }

    #[test]
    fn horton_order_of_perfect_trees() {
        // 4 leaves: eliminated in three prunings.
        assert_eq!(perfect(2).horton_order(), 3);
        // 8 leaves: four prunings.
        assert_eq!(perfect(3).horton_order(), 4);
    }

    #[test]
    fn horton_order_stemless_convention() {
        // Stemless Y: one pruning eliminates it, order = prunings + 1.
        let mut t = PlaneTree::empty();
        t.add_root_child(1.0).unwrap();
        t.add_root_child(2.0).unwrap();
        assert!(t.is_stemless());
        assert_eq!(t.horton_order(), 2);
    }

    #[test]
    fn descendant_subtree_cases() {
        let y = PlaneTree::y_tree(3.0, 1.0, 2.0);
        let stem = y.stem().unwrap();
        // leaf vertex, offset 0 -> empty tree
        let leaf = y.children(stem).0.unwrap();
        let d = y.descendant_subtree(&TreePoint { node: leaf, offset: 0.0 }).unwrap();
        assert!(d.is_empty());
        // halfway up a leaf edge -> single edge of length 0.5
        let d = y.descendant_subtree(&TreePoint { node: leaf, offset: 0.5 }).unwrap();
        assert!(d.same_tree(&PlaneTree::single_edge(0.5), 1e-12));
        // internal vertex (offset 0 on stem) -> stemless Y {1,2}, length 3
        let d = y.descendant_subtree(&TreePoint { node: stem, offset: 0.0 }).unwrap();
        assert!(d.is_stemless());
        assert!((d.length() - 3.0).abs() < 1e-12);
        // root point (top of stem) -> the whole tree
        let d = y.descendant_subtree(&TreePoint { node: stem, offset: 3.0 }).unwrap();
        assert!(d.same_tree(&y, 1e-12));
        // out of range offset
        assert!(y
            .descendant_subtree(&TreePoint { node: stem, offset: 3.5 })
            .is_err());
    }

    #[test]
    fn series_reduce_merges_chains() {
        // path of two edges 1 and 2 through a degree-2 vertex -> edge 3
        let mut t = PlaneTree::empty();
        let a = t.add_root_child(2.0).unwrap();
        t.add_child(a, Side::L, 1.0).unwrap();
        let r = t.series_reduce();
        assert!(r.same_tree(&PlaneTree::single_edge(3.0), 1e-12));

        // chained 1,1,1 -> edge 3
        let mut t = PlaneTree::empty();
        let a = t.add_root_child(1.0).unwrap();
        let b = t.add_child(a, Side::R, 1.0).unwrap();
        t.add_child(b, Side::L, 1.0).unwrap();
        let r = t.series_reduce();
        assert!(r.same_tree(&PlaneTree::single_edge(3.0), 1e-12));

        // idempotent on reduced trees, length preserved
        let y = PlaneTree::y_tree(3.0, 1.0, 2.0);
        let r = y.series_reduce();
        assert!(r.same_tree(&y, 1e-12));
        assert!((r.length() - y.length()).abs() < 1e-12);
    }

    #[test]
    fn embeddability_basics() {
        let y = PlaneTree::y_tree(3.0, 1.0, 2.0);
        // reflexivity and phi
        assert!(is_embeddable(&y, &y, 1e-9).unwrap());
        assert!(is_embeddable(&PlaneTree::empty(), &y, 1e-9).unwrap());
        // single edge into taller structures, attached mid-edge
        assert!(is_embeddable(&PlaneTree::single_edge(1.5), &y, 1e-9).unwrap());
        assert!(is_embeddable(&PlaneTree::single_edge(5.0), &y, 1e-9).unwrap());
        assert!(!is_embeddable(&PlaneTree::single_edge(5.1), &y, 1e-9).unwrap());
        // a Y with shorter legs embeds, including with swapped siblings
        let small = PlaneTree::y_tree(0.5, 1.5, 0.5);
        assert!(is_embeddable(&small, &y, 1e-9).unwrap());
        // too-long leg does not
        let small = PlaneTree::y_tree(0.5, 2.5, 0.5);
        assert!(!is_embeddable(&small, &y, 1e-9).unwrap());
        // size limit
        let big = perfect(3);
        assert!(is_embeddable(&PlaneTree::single_edge(1.0), &big, 1e-9).is_err());
    }

    #[test]
    fn embedding_mid_edge_attachment() {
        // T2: stem 2 over a junction with legs 2 and (1 over junction legs 1,1).
        let mut t2 = PlaneTree::empty();
        let s = t2.add_root_child(2.0).unwrap();
        t2.add_child(s, Side::L, 2.0).unwrap();
        let r = t2.add_child(s, Side::R, 1.0).unwrap();
        t2.add_child(r, Side::L, 1.0).unwrap();
        t2.add_child(r, Side::R, 1.0).unwrap();
        // T1 needs to attach one unit above the second junction.
        let t1 = PlaneTree::y_tree(2.0, 0.5, 1.0);
        assert!(is_embeddable(&t1, &t2, 1e-9).unwrap());
        // Lengthening one sub-leg past what's available breaks it.
        let t1 = PlaneTree::y_tree(2.0, 0.5, 2.5);
        assert!(!is_embeddable(&t1, &t2, 1e-9).unwrap());
    }

    #[test]
    fn functionals_monotone_under_embedding() {
        // Exhaustive small pairs drawn from shapes with <= 3 leaves and a
        // small set of lengths.
        let mut trees = vec![
            PlaneTree::empty(),
            PlaneTree::single_edge(1.0),
            PlaneTree::single_edge(2.0),
            PlaneTree::y_tree(1.0, 1.0, 2.0),
            PlaneTree::y_tree(2.0, 2.0, 1.0),
            PlaneTree::y_tree(1.0, 2.0, 2.0),
        ];
        // three-leaf caterpillars and the perfect 2-level tree
        let mut cat = PlaneTree::empty();
        let s = cat.add_root_child(1.0).unwrap();
        let j = cat.add_child(s, Side::L, 1.0).unwrap();
        cat.add_child(s, Side::R, 2.0).unwrap();
        cat.add_child(j, Side::L, 1.0).unwrap();
        cat.add_child(j, Side::R, 1.0).unwrap();
        trees.push(cat);
        trees.push(perfect(2));
        for a in &trees {
            for b in &trees {
                if is_embeddable(a, b, 1e-9).unwrap() {
                    assert!(a.length() <= b.length() + 1e-9);
                    assert!(a.height() <= b.height() + 1e-9);
                    assert!(a.num_leaves() <= b.num_leaves());
                    assert!(a.horton_order() <= b.horton_order());
                }
            }
        }
    }

    #[test]
    fn shapes_distinguish_plane_order() {
        let a = PlaneTree::y_tree(1.0, 1.0, 2.0);
        let b = PlaneTree::y_tree(9.0, 5.0, 7.0);
        assert_eq!(a.p_shape(), b.p_shape());
        let mut cat_l = PlaneTree::empty();
        let s = cat_l.add_root_child(1.0).unwrap();
        let j = cat_l.add_child(s, Side::L, 1.0).unwrap();
        cat_l.add_child(s, Side::R, 1.0).unwrap();
        cat_l.add_child(j, Side::L, 1.0).unwrap();
        cat_l.add_child(j, Side::R, 1.0).unwrap();
        let mut cat_r = PlaneTree::empty();
        let s = cat_r.add_root_child(1.0).unwrap();
        cat_r.add_child(s, Side::L, 1.0).unwrap();
        let j = cat_r.add_child(s, Side::R, 1.0).unwrap();
        cat_r.add_child(j, Side::L, 1.0).unwrap();
        cat_r.add_child(j, Side::R, 1.0).unwrap();
        assert_ne!(cat_l.p_shape(), cat_r.p_shape());
        assert_eq!(cat_l.shape(), cat_r.shape());
    }

    #[test]
    fn remove_and_compact() {
        let mut t = perfect(2);
        let top = t.stem().unwrap();
        let (l, _) = t.children(top);
        t.remove_subtree(l.unwrap());
        assert_eq!(t.num_leaves(), 2);
        t.compact();
        assert_eq!(t.num_edges(), 4);
        // after compaction ids are dense
        assert!(t.node_ids().all(|v| v.0 < 4));
    }
}
