//! Exponential critical binary Galton-Watson trees and their closed-form
//! statistics.
//!
//! `sample_gw` draws a tree in which every vertex independently terminates
//! or branches with probability 1/2 and edge lengths are i.i.d. Exp(lambda).
//! The trees are a.s. finite but heavy tailed, so sampling is guarded by a
//! node cap. The closed forms cover the tree-length density, the survival
//! probabilities of the three pruning functions with known theory, and the
//! growth/mass laws of a random sink.

use crate::bessel::{bessel_i, bessel_i_scaled};
use crate::harris::Excursion;
use crate::pruning::PhiKind;
use crate::rng::Rng;
use crate::tree::{PlaneTree, Side};
use thiserror::Error;

/// Default guard against pathologically large samples (the size
/// distribution has infinite mean).
pub const DEFAULT_NODE_CAP: usize = 10_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum GwError {
    #[error("lambda must be positive, got {0}")]
    BadLambda(f64),
    #[error("sampled tree exceeded the node cap of {0}")]
    NodeCapExceeded(usize),
    #[error("no closed form for pruning function {0:?}")]
    NoClosedForm(PhiKind),
    #[error("argument {name} = {value} outside domain {domain}")]
    BadArgument {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },
}

#[derive(Debug, Clone, Copy)]
pub struct GwParams {
    pub lambda: f64,
    pub seed: u64,
    /// Replicate stream; each Monte Carlo replicate gets its own.
    pub stream: u64,
    pub node_cap: usize,
}

impl GwParams {
    pub fn new(lambda: f64, seed: u64) -> Self {
        GwParams {
            lambda,
            seed,
            stream: 0,
            node_cap: DEFAULT_NODE_CAP,
        }
    }
    pub fn stream(mut self, stream: u64) -> Self {
        self.stream = stream;
        self
    }
    pub fn cap(mut self, cap: usize) -> Self {
        self.node_cap = cap;
        self
    }
    fn check(&self) -> Result<(), GwError> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(GwError::BadLambda(self.lambda));
        }
        Ok(())
    }
}

/// Sample a GW(lambda) tree: planted, critical binary shape, i.i.d.
/// exponential edge lengths. Deterministic given (seed, stream). Children
/// of a branching are generated i.i.d., which realizes the symmetric random
/// plane orientation.
pub fn sample_gw(params: &GwParams) -> Result<PlaneTree, GwError> {
    params.check()?;
    let mut rng = Rng::with_stream(params.seed, params.stream);
    sample_gw_with(&mut rng, params.lambda, params.node_cap)
}

/// As [`sample_gw`] but drawing from a caller-owned generator.
pub fn sample_gw_with(rng: &mut Rng, lambda: f64, node_cap: usize) -> Result<PlaneTree, GwError> {
    let mut tree = PlaneTree::empty();
    let stem = tree
        .add_root_child(rng.exp(lambda))
        .expect("fresh tree accepts a stem");
    let mut work = vec![stem];
    while let Some(v) = work.pop() {
        if rng.coin() {
            // branch: left then right, lengths drawn in order
            if tree.arena_size() + 2 > node_cap {
                return Err(GwError::NodeCapExceeded(node_cap));
            }
            let l = tree.add_child(v, Side::L, rng.exp(lambda)).unwrap();
            let r = tree.add_child(v, Side::R, rng.exp(lambda)).unwrap();
            work.push(r);
            work.push(l);
        }
    }
    Ok(tree)
}

/// Sample the Harris path of GW(lambda) directly as an excursion of the
/// symmetric exponential random walk: rises and falls i.i.d. Exp(lambda/2),
/// the walk closed at its first return to zero with the last fall replaced
/// by the exact remaining drop.
pub fn sample_exp_excursion(params: &GwParams) -> Result<Excursion, GwError> {
    params.check()?;
    let mut rng = Rng::with_stream(params.seed, params.stream);
    sample_exp_excursion_with(&mut rng, params.lambda, params.node_cap)
}

pub fn sample_exp_excursion_with(
    rng: &mut Rng,
    lambda: f64,
    node_cap: usize,
) -> Result<Excursion, GwError> {
    let rate = lambda / 2.0;
    let mut extrema = vec![0.0f64];
    let mut level = 0.0f64;
    loop {
        level += rng.exp(rate);
        extrema.push(level);
        let fall = rng.exp(rate);
        if fall >= level {
            extrema.push(0.0);
            break;
        }
        level -= fall;
        extrema.push(level);
        if extrema.len() > 2 * node_cap {
            return Err(GwError::NodeCapExceeded(node_cap));
        }
    }
    Ok(Excursion::from_extrema(extrema).expect("walk produces a valid excursion"))
}

fn check_lambda(lambda: f64) -> Result<(), GwError> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(GwError::BadLambda(lambda));
    }
    Ok(())
}

/// Probability density of the total length of a GW(lambda) tree:
/// `(1/x) e^{-lambda x} I_1(lambda x)` for `x > 0`.
pub fn length_pdf(x: f64, lambda: f64) -> Result<f64, GwError> {
    check_lambda(lambda)?;
    if !(x > 0.0) {
        return Err(GwError::BadArgument {
            name: "x",
            value: x,
            domain: "(0, inf)",
        });
    }
    Ok(bessel_i_scaled(1, lambda * x) / x)
}

/// P(length of GW(lambda) > t) = e^{-lambda t} [I_0 + I_1](lambda t).
pub fn length_survival(t: f64, lambda: f64) -> f64 {
    let z = lambda * t;
    bessel_i_scaled(0, z) + bessel_i_scaled(1, z)
}

/// Survival probability of the pruned tree, `P(S_delta != phi)`, for the
/// pruning functions with closed forms. Leaf count has none and errs.
pub fn survival_prob(kind: PhiKind, lambda: f64, delta: f64) -> Result<f64, GwError> {
    check_lambda(lambda)?;
    if !(delta >= 0.0) {
        return Err(GwError::BadArgument {
            name: "delta",
            value: delta,
            domain: "[0, inf)",
        });
    }
    match kind {
        PhiKind::Length => Ok(length_survival(delta, lambda)),
        PhiKind::Height => Ok(2.0 / (lambda * delta + 2.0)),
        PhiKind::HortonOrder => Ok(2.0f64.powi(-(delta.floor() as i32))),
        PhiKind::LeafCount => Err(GwError::NoClosedForm(kind)),
    }
}

/// Parameter of the pruned tree conditioned on survival:
/// `lambda * survival_prob`.
pub fn pruned_rate(kind: PhiKind, lambda: f64, delta: f64) -> Result<f64, GwError> {
    Ok(lambda * survival_prob(kind, lambda, delta)?)
}

/// Probability that a random sink in the infinite exponential potential is
/// growing (at rest, accumulating mass) at time `t`: `e^{-lambda t} I_0`.
pub fn growth_probability(t: f64, lambda: f64) -> Result<f64, GwError> {
    check_lambda(lambda)?;
    if !(t >= 0.0) {
        return Err(GwError::BadArgument {
            name: "t",
            value: t,
            domain: "[0, inf)",
        });
    }
    Ok(bessel_i_scaled(0, lambda * t))
}

/// Mass law of a random sink at time `t`: continuous density on `(0, 2t)`
/// plus an atom of weight `e^{-lambda t} I_0(lambda t)` at `2t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinkMassPdf {
    /// Continuous density at the queried mass.
    pub density: f64,
    /// Location of the atom, `2t`.
    pub atom_at: f64,
    /// Weight of the atom, the growth probability.
    pub atom_weight: f64,
}

pub fn sink_mass_pdf(a: f64, t: f64, lambda: f64) -> Result<SinkMassPdf, GwError> {
    check_lambda(lambda)?;
    if !(t > 0.0) {
        return Err(GwError::BadArgument {
            name: "t",
            value: t,
            domain: "(0, inf)",
        });
    }
    if !(0.0..=2.0 * t).contains(&a) {
        return Err(GwError::BadArgument {
            name: "a",
            value: a,
            domain: "[0, 2t]",
        });
    }
    let density = sink_mass_density(a, t, lambda);
    Ok(SinkMassPdf {
        density,
        atom_at: 2.0 * t,
        atom_weight: bessel_i_scaled(0, lambda * t),
    })
}

/// Continuous part of the sink mass law, evaluated without the domain
/// checks (0 outside `(0, 2t)`).
pub fn sink_mass_density(a: f64, t: f64, lambda: f64) -> f64 {
    if a <= 0.0 || a >= 2.0 * t {
        return 0.0;
    }
    // (lambda/2) e^{-lambda t} [I0 + I1](lambda (t - a/2)) I0(lambda a/2),
    // assembled from scaled Bessel factors so the exponentials cancel.
    let z1 = lambda * (t - 0.5 * a);
    let z2 = lambda * 0.5 * a;
    0.5 * lambda
        * (bessel_i_scaled(0, z1) + bessel_i_scaled(1, z1))
        * bessel_i_scaled(0, z2)
}

/// Probability of the single-mass (rather than double-mass) decoration at a
/// leaf of the mass-equipped pruned tree at time `t`:
/// `(2 / lambda) ell(t) / p_t^2`.
pub fn single_mass_prob(t: f64, lambda: f64) -> Result<f64, GwError> {
    let ell = length_pdf(t, lambda)?;
    let p = length_survival(t, lambda);
    Ok(2.0 / lambda * ell / (p * p))
}

/// CDF of an interior mass size: masses are `2 h` with `h` the removed
/// subtree length conditioned below `t`, so
/// `F(a) = (1 - p_{a/2}) / (1 - p_t)` on `(0, 2t)`.
pub fn interior_mass_cdf(a: f64, t: f64, lambda: f64) -> f64 {
    if a <= 0.0 {
        return 0.0;
    }
    if a >= 2.0 * t {
        return 1.0;
    }
    (1.0 - length_survival(0.5 * a, lambda)) / (1.0 - length_survival(t, lambda))
}

/// Joint density of a double leaf mass `(a, b)` at time `t`:
/// `(1/4) ell(a/2) ell(b/2) / (p_t^2 - (2/lambda) ell(t))` on the region
/// `a, b > 0`, `max(a,b) <= 2t < a + b`.
pub fn double_mass_pdf(a: f64, b: f64, t: f64, lambda: f64) -> Result<f64, GwError> {
    check_lambda(lambda)?;
    if a <= 0.0 || b <= 0.0 || a.max(b) > 2.0 * t || a + b <= 2.0 * t {
        return Ok(0.0);
    }
    let ell = |x: f64| bessel_i_scaled(1, lambda * x) / x;
    let p = length_survival(t, lambda);
    let z = p * p - 2.0 / lambda * (bessel_i_scaled(1, lambda * t) / t);
    Ok(0.25 * ell(0.5 * a) * ell(0.5 * b) / z)
}

/// Catalan probability of a GW tree having `n >= 1` leaves:
/// `C_{n-1} / 2^{2n-1}`.
pub fn leaf_count_prob(n: usize) -> f64 {
    assert!(n >= 1);
    // C_{n-1} / 2^{2n-1} built multiplicatively to avoid overflow.
    let mut p = 0.5f64; // n = 1
    for k in 1..n {
        // C_k / C_{k-1} = 2(2k-1)/(k+1); each extra leaf adds factor /4.
        p *= 2.0 * (2.0 * k as f64 - 1.0) / (k as f64 + 1.0) / 4.0;
    }
    p
}

/// Leaf-count probabilities for `1..=max_n` in one pass.
pub fn leaf_count_probs(max_n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(max_n);
    let mut p = 0.5f64;
    for n in 1..=max_n {
        out.push(p);
        p *= 2.0 * (2.0 * n as f64 - 1.0) / (n as f64 + 1.0) / 4.0;
    }
    out
}

/// Total length of a GW(lambda) tree, or the fact that it exceeds `bound`.
/// Sampling aborts as soon as the running length passes the bound, which
/// leaves the law of the reported quantity untouched (the exact length is
/// only needed below the bound).
pub enum BoundedLength {
    Length(f64),
    Exceeds,
}

pub fn sample_gw_length_bounded(
    rng: &mut Rng,
    lambda: f64,
    bound: f64,
    node_cap: usize,
) -> Result<BoundedLength, GwError> {
    let mut total = rng.exp(lambda);
    if total > bound {
        return Ok(BoundedLength::Exceeds);
    }
    // pending vertices awaiting their branch/terminate decision
    let mut pending = 1usize;
    let mut nodes = 1usize;
    while pending > 0 {
        pending -= 1;
        if rng.coin() {
            nodes += 2;
            if nodes > node_cap {
                return Err(GwError::NodeCapExceeded(node_cap));
            }
            total += rng.exp(lambda);
            if total > bound {
                return Ok(BoundedLength::Exceeds);
            }
            total += rng.exp(lambda);
            if total > bound {
                return Ok(BoundedLength::Exceeds);
            }
            pending += 2;
        }
    }
    Ok(BoundedLength::Length(total))
}

/// Direct sampler of the random-sink phase sequence: alternating rest
/// durations `v_i ~ Exp(lambda)` and motion durations `h_i` distributed as
/// the total length of an independent GW(lambda) tree. Returns the state at
/// time `t`: growing flag and accumulated mass.
pub struct RandomSinkState {
    pub growing: bool,
    pub mass: f64,
}

pub fn sample_random_sink(
    rng: &mut Rng,
    lambda: f64,
    t: f64,
    node_cap: usize,
) -> Result<RandomSinkState, GwError> {
    let mut elapsed = 0.0f64;
    loop {
        let v = rng.exp(lambda);
        if elapsed + v > t {
            // Growing: own rest accumulation plus merged partners comes to
            // exactly 2t while at rest.
            return Ok(RandomSinkState {
                growing: true,
                mass: 2.0 * t,
            });
        }
        elapsed += v;
        match sample_gw_length_bounded(rng, lambda, t - elapsed, node_cap)? {
            BoundedLength::Exceeds => {
                // In motion: mass frozen at twice the phase time already
                // completed (rests accumulate at rate 2; each finished
                // motion phase absorbs a partner of mass 2h).
                return Ok(RandomSinkState {
                    growing: false,
                    mass: 2.0 * elapsed,
                });
            }
            BoundedLength::Length(h) => elapsed += h,
        }
    }
}

/// Convenience wrappers mirroring the Bessel surface of this module.
pub fn bessel(nu: u8, z: f64) -> f64 {
    bessel_i(nu, z)
}
