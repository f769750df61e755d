//! Harris paths and level-set trees.
//!
//! A plane tree with edge lengths corresponds to a piecewise-linear positive
//! excursion with slopes +-1: the Harris path is the distance-from-root
//! profile of the depth-first contour walk, and the level-set tree inverts
//! it. Since the slopes are fixed, an excursion is stored as the sequence of
//! its local extrema values alone.

use crate::tree::{NodeId, PlaneTree, Side, TreeError};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ExcursionError {
    #[error("excursion needs at least [0, max, 0]")]
    TooShort,
    #[error("extrema count must be odd (alternating min/max closing at zero)")]
    BadParity,
    #[error("excursion must start and end at exactly 0")]
    BadEndpoints,
    #[error("extremum {index} breaks strict alternation")]
    NotAlternating { index: usize },
    #[error("interior extremum {index} is not strictly positive")]
    NotPositive { index: usize },
    #[error("interior minima at {i} and {j} share the value {value}; level-set tree would not be binary")]
    DuplicateMinima { i: usize, j: usize, value: f64 },
    #[error("partial sums return to zero before the final fall")]
    PrematureZero,
    #[error("rise/fall magnitudes must alternate ending on a rise")]
    BadLengthSequence,
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// Piecewise-linear positive excursion with slopes +-1, stored by the values
/// of its local extrema: `v[0] = 0, v[1], ..., v[2n] = 0` where odd indices
/// are the local maxima and even interior indices the local minima.
///
/// Construction enforces strict alternation and positivity. Distinctness of
/// the interior minima is *not* required here; [`level_set_tree`] rejects
/// duplicates when asked to build a binary tree.
#[derive(Debug, Clone, PartialEq)]
pub struct Excursion {
    extrema: Vec<f64>,
}

impl Excursion {
    pub fn from_extrema(extrema: Vec<f64>) -> Result<Self, ExcursionError> {
        if extrema.len() < 3 {
            return Err(ExcursionError::TooShort);
        }
        if extrema.len() % 2 == 0 {
            return Err(ExcursionError::BadParity);
        }
        if extrema[0] != 0.0 || *extrema.last().unwrap() != 0.0 {
            return Err(ExcursionError::BadEndpoints);
        }
        for (i, &v) in extrema.iter().enumerate().skip(1) {
            if i + 1 < extrema.len() && v <= 0.0 {
                return Err(ExcursionError::NotPositive { index: i });
            }
            let prev = extrema[i - 1];
            let ok = if i % 2 == 1 { v > prev } else { v < prev };
            if !ok {
                return Err(ExcursionError::NotAlternating { index: i });
            }
        }
        Ok(Excursion { extrema })
    }

    pub fn extrema(&self) -> &[f64] {
        &self.extrema
    }

    /// Number of local maxima (leaves of the level-set tree).
    pub fn num_maxima(&self) -> usize {
        self.extrema.len() / 2
    }

    /// Horizontal extent of the excursion (slopes are +-1).
    pub fn domain_length(&self) -> f64 {
        self.extrema.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
    }

    /// Breakpoints `(t, value)` with the domain starting at `t0`.
    pub fn breakpoints(&self, t0: f64) -> Vec<(f64, f64)> {
        let mut t = t0;
        let mut out = Vec::with_capacity(self.extrema.len());
        out.push((t, self.extrema[0]));
        for w in self.extrema.windows(2) {
            t += (w[1] - w[0]).abs();
            out.push((t, w[1]));
        }
        out
    }
}

/// Build an excursion from alternating rise/fall magnitudes
/// `r1, f1, r2, f2, ..., rn`; the closing fall is implied.
pub fn excursion_from_lengths(seq: &[f64]) -> Result<Excursion, ExcursionError> {
    if seq.is_empty() || seq.len() % 2 == 0 {
        return Err(ExcursionError::BadLengthSequence);
    }
    if seq.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(ExcursionError::BadLengthSequence);
    }
    let mut extrema = Vec::with_capacity(seq.len() + 2);
    let mut level = 0.0;
    extrema.push(0.0);
    for (i, &x) in seq.iter().enumerate() {
        if i % 2 == 0 {
            level += x;
        } else {
            level -= x;
            if level <= 0.0 {
                return Err(ExcursionError::PrematureZero);
            }
        }
        extrema.push(level);
    }
    extrema.push(0.0);
    Excursion::from_extrema(extrema)
}

/// Harris path of a non-empty planted tree: the depth-first contour profile,
/// an excursion of horizontal extent `2 * length(tree)` with one maximum per
/// leaf.
pub fn harris_path(tree: &PlaneTree) -> Result<Excursion, ExcursionError> {
    if tree.is_empty() {
        return Err(ExcursionError::Tree(TreeError::EmptyTree));
    }
    if !tree.is_planted() {
        return Err(ExcursionError::Tree(TreeError::NotPlanted));
    }
    let mut extrema = vec![0.0];
    // (node, depth at its bottom vertex, next step: 0 = descend, 1 = between
    // children, 2 = done)
    let mut stack: Vec<(NodeId, f64, u8)> = Vec::new();
    let stem = tree.stem().unwrap();
    stack.push((stem, tree.edge_len(stem), 0));
    while let Some((v, depth, state)) = stack.pop() {
        let (l, r) = tree.children(v);
        match state {
            0 => {
                if l.is_none() {
                    extrema.push(depth); // leaf: local maximum
                } else {
                    stack.push((v, depth, 1));
                    let c = l.unwrap();
                    stack.push((c, depth + tree.edge_len(c), 0));
                }
            }
            1 => {
                extrema.push(depth); // junction revisit: local minimum
                stack.push((v, depth, 2));
                let c = r.unwrap();
                stack.push((c, depth + tree.edge_len(c), 0));
            }
            _ => {}
        }
    }
    extrema.push(0.0);
    Excursion::from_extrema(extrema)
}

/// Level-set tree of an excursion: one leaf per local maximum, one internal
/// vertex per interior local minimum, parent of each extremum given by the
/// higher of its two nearest lower minima, edge lengths equal to the value
/// differences, plane order following time order. Fails on duplicate
/// interior minima (the tree would not be binary).
pub fn level_set_tree(x: &Excursion) -> Result<PlaneTree, ExcursionError> {
    Ok(level_set_tree_indexed(x)?.0)
}

/// As [`level_set_tree`], also returning, for every extremum index `1..2n`
/// of the excursion, the tree vertex it maps to (maxima to leaves, interior
/// minima to internal vertices; index 0 and 2n map to the root and are
/// reported as the stem vertex).
pub fn level_set_tree_indexed(x: &Excursion) -> Result<(PlaneTree, Vec<NodeId>), ExcursionError> {
    let e = x.extrema();
    let n = x.num_maxima();
    // Interior minima at even indices 2, 4, ..., 2n-2. Duplicate values
    // would create a non-binary vertex; exact equality is the rejection
    // test, detected on a sorted copy.
    let minima: Vec<usize> = (1..n).map(|k| 2 * k).collect();
    let mut sorted: Vec<usize> = minima.clone();
    sorted.sort_by(|&a, &b| e[a].partial_cmp(&e[b]).unwrap());
    for w in sorted.windows(2) {
        if e[w[0]] == e[w[1]] {
            return Err(ExcursionError::DuplicateMinima {
                i: w[0].min(w[1]),
                j: w[0].max(w[1]),
                value: e[w[0]],
            });
        }
    }
    let mut tree = PlaneTree::empty();
    if n == 1 {
        let stem = tree.add_root_child(e[1])?;
        return Ok((tree, vec![stem, stem, stem]));
    }

    // Nearest lower minimum to the left/right of each interior minimum,
    // by monotone stack over the minima sequence.
    let m = minima.len();
    let mut left_lower: Vec<Option<usize>> = vec![None; m]; // indices into `minima`
    let mut right_lower: Vec<Option<usize>> = vec![None; m];
    let mut stack: Vec<usize> = Vec::new();
    for k in 0..m {
        while let Some(&top) = stack.last() {
            if e[minima[top]] > e[minima[k]] {
                stack.pop();
            } else {
                break;
            }
        }
        left_lower[k] = stack.last().copied();
        stack.push(k);
    }
    stack.clear();
    for k in (0..m).rev() {
        while let Some(&top) = stack.last() {
            if e[minima[top]] > e[minima[k]] {
                stack.pop();
            } else {
                break;
            }
        }
        right_lower[k] = stack.last().copied();
        stack.push(k);
    }

    // Parent of interior minimum k: the higher of its two nearest lower
    // minima; the global interior minimum hangs from the root (stem).
    // Create internal vertices in order of decreasing value so that parents
    // exist before children... simpler: create all nodes first as detached
    // records via a two-pass scheme. We instead build top-down: sort minima
    // by value ascending; the lowest is the stem vertex.
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| e[minima[a]].partial_cmp(&e[minima[b]]).unwrap());

    let mut vertex_of_min: Vec<Option<NodeId>> = vec![None; m];
    for &k in &order {
        let (parent_min, parent_val) = match (left_lower[k], right_lower[k]) {
            (None, None) => (None, 0.0),
            (Some(l), None) => (Some(l), e[minima[l]]),
            (None, Some(r)) => (Some(r), e[minima[r]]),
            (Some(l), Some(r)) => {
                if e[minima[l]] > e[minima[r]] {
                    (Some(l), e[minima[l]])
                } else {
                    (Some(r), e[minima[r]])
                }
            }
        };
        let len = e[minima[k]] - parent_val;
        let id = match parent_min {
            None => tree.add_root_child(len)?,
            Some(p) => {
                let pid = vertex_of_min[p].expect("parent created first");
                // Plane side: this minimum is left of its parent minimum in
                // time iff its index is smaller.
                let side = if minima[k] < minima[p] { Side::L } else { Side::R };
                tree.add_child(pid, side, len)?
            }
        };
        vertex_of_min[k] = Some(id);
    }

    // Leaves: maximum at index 2k+1 hangs from the higher of the adjacent
    // minima (boundary zeros behave as value 0, never the higher one here
    // since n >= 2 guarantees at least one interior neighbor... except at
    // the ends where one neighbor is the boundary zero).
    let mut vertex_of_extremum: Vec<NodeId> = vec![NodeId(0); e.len()];
    for k in 0..m {
        vertex_of_extremum[minima[k]] = vertex_of_min[k].unwrap();
    }
    for k in 0..n {
        let i = 2 * k + 1;
        let lmin = if i == 1 { None } else { Some((i - 1) / 2 - 1) }; // minima index left
        let rmin = if i == 2 * n - 1 { None } else { Some((i + 1) / 2 - 1) };
        let (pmin, pval) = match (lmin, rmin) {
            (None, Some(r)) => (r, e[minima[r]]),
            (Some(l), None) => (l, e[minima[l]]),
            (Some(l), Some(r)) => {
                if e[minima[l]] > e[minima[r]] {
                    (l, e[minima[l]])
                } else {
                    (r, e[minima[r]])
                }
            }
            (None, None) => unreachable!("n >= 2"),
        };
        let pid = vertex_of_min[pmin].unwrap();
        let side = if i < minima[pmin] { Side::L } else { Side::R };
        let id = tree.add_child(pid, side, e[i] - pval)?;
        vertex_of_extremum[i] = id;
    }
    // Boundary zeros map to the stem for completeness.
    let stem = tree.stem().unwrap();
    vertex_of_extremum[0] = stem;
    vertex_of_extremum[e.len() - 1] = stem;

    debug_assert!(tree.validate().is_ok());
    Ok((tree, vertex_of_extremum))
}
