//! Initial and evolved potentials.
//!
//! An initial potential is a negative unit-slope excursion on `[a, b]`,
//! stored as the positive excursion of its negation plus the left endpoint.
//! An evolved potential is the physical-space picture at time `t`: the
//! surviving particles' polyline together with the empty intervals
//! (plateaus) and the sinks that carry the annihilated mass.

use super::AnnihilationError;
use crate::gw::GwParams;
use crate::harris::Excursion;

/// Negative unit-slope excursion `Psi_0` on a finite interval.
#[derive(Debug, Clone)]
pub struct Potential {
    x_left: f64,
    /// The positive excursion `-Psi_0`.
    exc: Excursion,
    /// Positions of the extrema, aligned with `exc.extrema()`.
    xs: Vec<f64>,
}

/// Basin of a local maximum of the potential: the shortest interval around
/// it supporting a non-positive sub-excursion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Basin {
    /// Extremum index of the saddle in the potential's breakpoint list.
    pub saddle: usize,
    pub x_left: f64,
    pub x_right: f64,
    /// Potential value at the saddle.
    pub psi: f64,
}

impl Basin {
    pub fn len(&self) -> f64 {
        self.x_right - self.x_left
    }
    pub fn center(&self) -> f64 {
        0.5 * (self.x_left + self.x_right)
    }
}

impl Potential {
    /// Build from the negation of the potential (a positive excursion).
    pub fn from_excursion(x_left: f64, exc: Excursion) -> Result<Self, AnnihilationError> {
        let mut xs = Vec::with_capacity(exc.extrema().len());
        let mut x = crate::numeric::Kahan::new(x_left);
        xs.push(x_left);
        for w in exc.extrema().windows(2) {
            x.add((w[1] - w[0]).abs());
            xs.push(x.value());
        }
        let pot = Potential { x_left, exc, xs };
        pot.validate_generic()?;
        Ok(pot)
    }

    /// Build from the potential's own extremum values
    /// `[0, m_1, M_2, ..., 0]`, all interior values negative.
    pub fn from_psi_extrema(x_left: f64, psi: Vec<f64>) -> Result<Self, AnnihilationError> {
        let neg: Vec<f64> = psi.iter().map(|v| -v).collect();
        let exc = Excursion::from_extrema(neg)
            .map_err(|e| AnnihilationError::BadPotential(e.to_string()))?;
        Self::from_excursion(x_left, exc)
    }

    /// Random exponential potential: the negative Harris path of a
    /// GW(lambda) tree. Fails if the walk exceeds the node cap, or on the
    /// (float-quantization) chance of tied basin lengths; Monte Carlo
    /// callers skip such draws.
    pub fn sample_exp(params: &GwParams, x_left: f64) -> Result<Self, AnnihilationError> {
        let exc = crate::gw::sample_exp_excursion(params)?;
        Self::from_excursion(x_left, exc)
    }

    fn validate_generic(&self) -> Result<(), AnnihilationError> {
        let e = self.exc.extrema();
        let n = self.exc.num_maxima();
        // Distinct sink depths (exc maxima) and distinct saddle values
        // (exc interior minima); exact equality is the rejection test.
        let mut maxima: Vec<f64> = (0..n).map(|k| e[2 * k + 1]).collect();
        maxima.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if maxima.windows(2).any(|w| w[0] == w[1]) {
            return Err(AnnihilationError::Genericity(
                "tied local minima values".into(),
            ));
        }
        let mut minima: Vec<f64> = (1..n).map(|k| e[2 * k]).collect();
        minima.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if minima.windows(2).any(|w| w[0] == w[1]) {
            return Err(AnnihilationError::Genericity(
                "tied local maxima (saddle) values".into(),
            ));
        }
        // Distinct basin lengths.
        let mut lens: Vec<f64> = self.basins().iter().map(|b| b.len()).collect();
        lens.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if lens.windows(2).any(|w| w[0] == w[1]) {
            return Err(AnnihilationError::Genericity("tied basin lengths".into()));
        }
        Ok(())
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x_left, *self.xs.last().unwrap())
    }

    pub fn t_max(&self) -> f64 {
        let (a, b) = self.domain();
        0.5 * (b - a)
    }

    /// The positive excursion `-Psi_0`.
    pub fn excursion(&self) -> &Excursion {
        &self.exc
    }

    /// Extremum positions, aligned with `excursion().extrema()`.
    pub fn positions(&self) -> &[f64] {
        &self.xs
    }

    /// Potential value at extremum index `k`.
    pub fn psi_of(&self, k: usize) -> f64 {
        -self.exc.extrema()[k]
    }

    /// Breakpoints `(x, psi)` of the potential.
    pub fn breakpoints(&self) -> Vec<(f64, f64)> {
        self.xs
            .iter()
            .zip(self.exc.extrema())
            .map(|(&x, &e)| (x, -e))
            .collect()
    }

    /// Potential value at an arbitrary point of the domain.
    pub fn psi_at(&self, x: f64) -> f64 {
        let i = match self
            .xs
            .binary_search_by(|p| p.partial_cmp(&x).unwrap())
        {
            Ok(i) => return self.psi_of(i),
            Err(i) => i,
        };
        if i == 0 {
            return self.psi_of(0);
        }
        if i >= self.xs.len() {
            return self.psi_of(self.xs.len() - 1);
        }
        let (x0, p0) = (self.xs[i - 1], self.psi_of(i - 1));
        let p1 = self.psi_of(i);
        let slope = if p1 > p0 { 1.0 } else { -1.0 };
        p0 + slope * (x - x0)
    }

    /// Max of the potential over `[lo, hi]`.
    pub fn max_on(&self, lo: f64, hi: f64) -> f64 {
        let mut m = self.psi_at(lo).max(self.psi_at(hi));
        for (k, &x) in self.xs.iter().enumerate() {
            if x > lo && x < hi {
                m = m.max(self.psi_of(k));
            }
        }
        m
    }

    /// Largest `z <= x0` with `psi(z) >= level` (the left end of a basin).
    pub(super) fn last_reach_left(&self, x0: f64, level: f64) -> f64 {
        // Walk breakpoints leftward from x0.
        let mut i = self.xs.partition_point(|&p| p <= x0);
        // position between breakpoints i-1 and i
        let mut x_hi = x0;
        let mut p_hi = self.psi_at(x0);
        if p_hi >= level {
            return x0;
        }
        while i > 0 {
            let (x_lo, p_lo) = (self.xs[i - 1], self.psi_of(i - 1));
            if p_lo >= level {
                // crossing inside this segment; psi moves linearly
                let slope = if p_hi > p_lo { 1.0 } else { -1.0 };
                // psi(z) = p_lo + slope (z - x_lo); solve psi = level
                return x_lo + (level - p_lo) / slope;
            }
            x_hi = x_lo;
            p_hi = p_lo;
            i -= 1;
        }
        let _ = (x_hi, p_hi);
        self.x_left
    }

    /// Smallest `z >= x0` with `psi(z) >= level`.
    pub(super) fn first_reach_right(&self, x0: f64, level: f64) -> f64 {
        let mut i = self.xs.partition_point(|&p| p < x0);
        let mut x_lo = x0;
        let mut p_lo = self.psi_at(x0);
        if p_lo >= level {
            return x0;
        }
        while i < self.xs.len() {
            let (x_hi, p_hi) = (self.xs[i], self.psi_of(i));
            if p_hi >= level {
                let slope = if p_hi > p_lo { 1.0 } else { -1.0 };
                // psi(z) = p_lo + slope (z - x_lo)
                return x_lo + (level - p_lo) / slope;
            }
            x_lo = x_hi;
            p_lo = p_hi;
            i += 1;
        }
        let _ = (x_lo, p_lo);
        *self.xs.last().unwrap()
    }

    /// Basins of all saddles (interior local maxima of the potential), in
    /// extremum-index order. Linear time via nearest-lower-extremum stacks
    /// on the negated excursion.
    pub fn basins(&self) -> Vec<Basin> {
        let e = self.exc.extrema();
        let n = self.exc.num_maxima();
        let xs = &self.xs;
        let mut out = Vec::with_capacity(n.saturating_sub(1));
        // For saddle at extremum index s (exc-minimum), the basin ends where
        // exc dips below e[s]: on each side, at the nearest exc-minimum with
        // smaller value (boundary zeros count), crossing on the adjacent
        // up-slope at distance (e[s] - e[j]) from it.
        let mins: Vec<usize> = (1..n).map(|k| 2 * k).collect();
        let m = mins.len();
        let mut left_lower: Vec<Option<usize>> = vec![None; m];
        let mut right_lower: Vec<Option<usize>> = vec![None; m];
        let mut stack: Vec<usize> = Vec::new();
        for k in 0..m {
            while let Some(&top) = stack.last() {
                if e[mins[top]] > e[mins[k]] {
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
                if e[mins[top]] > e[mins[k]] {
                    stack.pop();
                } else {
                    break;
                }
            }
            right_lower[k] = stack.last().copied();
            stack.push(k);
        }
        for k in 0..m {
            let s = mins[k];
            let es = e[s];
            // Left end: ascending slope up from the nearest lower minimum
            // (or the domain start) crosses level es.
            let xl = match left_lower[k] {
                Some(j) => xs[mins[j]] + (es - e[mins[j]]),
                None => xs[0] + es, // up-slope from the boundary zero
            };
            let xr = match right_lower[k] {
                Some(j) => xs[mins[j]] - (es - e[mins[j]]),
                None => xs[xs.len() - 1] - es,
            };
            out.push(Basin {
                saddle: s,
                x_left: xl,
                x_right: xr,
                psi: -es,
            });
        }
        out
    }
}

/// One annotated feature of an evolved potential, in left-to-right order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Feature {
    /// Sink at rest in a V-shaped local minimum; no empty interval.
    RestingSink { x: f64, psi: f64, mass: f64 },
    /// Moving sink at one end of an empty interval on a monotone stretch.
    MovingSink {
        x0: f64,
        len: f64,
        psi: f64,
        mass: f64,
        /// Sink at the right end (moving left) or the left end (moving
        /// right).
        at_right_end: bool,
    },
    /// Two sinks approaching each other over an empty local-minimum
    /// plateau.
    SinkPair {
        x0: f64,
        len: f64,
        psi: f64,
        mass_left: f64,
        mass_right: f64,
    },
    /// Empty interval straddling a surviving saddle; no sink inside.
    SaddleGap { x0: f64, len: f64, psi: f64 },
}

impl Feature {
    pub fn x_span(&self) -> (f64, f64) {
        match *self {
            Feature::RestingSink { x, .. } => (x, x),
            Feature::MovingSink { x0, len, .. } => (x0, x0 + len),
            Feature::SinkPair { x0, len, .. } => (x0, x0 + len),
            Feature::SaddleGap { x0, len, .. } => (x0, x0 + len),
        }
    }

    /// Sinks carried by this feature, as (position, mass).
    pub fn sinks(&self) -> Vec<(f64, f64)> {
        match *self {
            Feature::RestingSink { x, mass, .. } => vec![(x, mass)],
            Feature::MovingSink {
                x0,
                len,
                mass,
                at_right_end,
                ..
            } => vec![(if at_right_end { x0 + len } else { x0 }, mass)],
            Feature::SinkPair {
                x0,
                len,
                mass_left,
                mass_right,
                ..
            } => vec![(x0, mass_left), (x0 + len, mass_right)],
            Feature::SaddleGap { .. } => vec![],
        }
    }
}

/// Snapshot of the annihilation dynamics at time `t`, in physical space:
/// polyline of the surviving potential (plateaus included as horizontal
/// segments) plus the annotated features.
#[derive(Debug, Clone)]
pub struct EvolvedPotential {
    pub t: f64,
    /// Polyline breakpoints `(x, psi)`, increasing in x.
    pub points: Vec<(f64, f64)>,
    pub features: Vec<Feature>,
}

/// Drop interior polyline points where the slope does not change, so both
/// construction routes produce the same canonical breakpoint list.
pub(super) fn canonicalize_points(points: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    for p in points {
        if let Some(&last) = out.last() {
            if (p.0 - last.0).abs() <= 1e-15 && (p.1 - last.1).abs() <= 1e-15 {
                continue;
            }
        }
        while out.len() >= 2 {
            let a = out[out.len() - 2];
            let b = out[out.len() - 1];
            let s1 = (b.1 - a.1) / (b.0 - a.0);
            let s2 = (p.1 - b.1) / (p.0 - b.0);
            if (s1 - s2).abs() <= 1e-9 {
                out.pop();
            } else {
                break;
            }
        }
        out.push(p);
    }
    out
}

impl EvolvedPotential {
    /// All sinks as (position, mass), left to right.
    pub fn sinks(&self) -> Vec<(f64, f64)> {
        self.features.iter().flat_map(|f| f.sinks()).collect()
    }

    pub fn total_sink_mass(&self) -> f64 {
        self.sinks().iter().map(|s| s.1).sum()
    }

    /// Total length of surviving (particle-carrying) support.
    pub fn alive_length(&self) -> f64 {
        let plateaus: f64 = self
            .features
            .iter()
            .map(|f| {
                let (a, b) = f.x_span();
                b - a
            })
            .sum();
        match (self.points.first(), self.points.last()) {
            (Some(&(a, _)), Some(&(b, _))) => (b - a) - plateaus,
            _ => 0.0,
        }
    }

    /// Structural comparison with tolerance; returns the first mismatch.
    pub fn approx_eq(&self, other: &EvolvedPotential, tol: f64) -> Result<(), String> {
        if (self.t - other.t).abs() > tol {
            return Err(format!("t: {} vs {}", self.t, other.t));
        }
        if self.points.len() != other.points.len() {
            return Err(format!(
                "point count: {} vs {}",
                self.points.len(),
                other.points.len()
            ));
        }
        for (i, (p, q)) in self.points.iter().zip(&other.points).enumerate() {
            if (p.0 - q.0).abs() > tol || (p.1 - q.1).abs() > tol {
                return Err(format!("point {i}: {p:?} vs {q:?}"));
            }
        }
        if self.features.len() != other.features.len() {
            return Err(format!(
                "feature count: {} vs {}",
                self.features.len(),
                other.features.len()
            ));
        }
        for (i, (f, g)) in self.features.iter().zip(&other.features).enumerate() {
            let ok = match (f, g) {
                (
                    Feature::RestingSink { x, psi, mass },
                    Feature::RestingSink {
                        x: x2,
                        psi: p2,
                        mass: m2,
                    },
                ) => (x - x2).abs() <= tol && (psi - p2).abs() <= tol && (mass - m2).abs() <= tol,
                (
                    Feature::MovingSink {
                        x0,
                        len,
                        psi,
                        mass,
                        at_right_end,
                    },
                    Feature::MovingSink {
                        x0: y0,
                        len: l2,
                        psi: p2,
                        mass: m2,
                        at_right_end: r2,
                    },
                ) => {
                    (x0 - y0).abs() <= tol
                        && (len - l2).abs() <= tol
                        && (psi - p2).abs() <= tol
                        && (mass - m2).abs() <= tol
                        && at_right_end == r2
                }
                (
                    Feature::SinkPair {
                        x0,
                        len,
                        psi,
                        mass_left,
                        mass_right,
                    },
                    Feature::SinkPair {
                        x0: y0,
                        len: l2,
                        psi: p2,
                        mass_left: a2,
                        mass_right: b2,
                    },
                ) => {
                    (x0 - y0).abs() <= tol
                        && (len - l2).abs() <= tol
                        && (psi - p2).abs() <= tol
                        && (mass_left - a2).abs() <= tol
                        && (mass_right - b2).abs() <= tol
                }
                (
                    Feature::SaddleGap { x0, len, psi },
                    Feature::SaddleGap {
                        x0: y0,
                        len: l2,
                        psi: p2,
                    },
                ) => (x0 - y0).abs() <= tol && (len - l2).abs() <= tol && (psi - p2).abs() <= tol,
                _ => false,
            };
            if !ok {
                return Err(format!("feature {i}: {f:?} vs {g:?}"));
            }
        }
        Ok(())
    }
}
