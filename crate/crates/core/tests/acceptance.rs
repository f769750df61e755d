//! Acceptance suite: every criterion runs at its stated tolerance and
//! prints one pass/fail line (visible with `cargo test --test acceptance
//! -- --nocapture`). The criteria run sequentially inside a single test so
//! the printed lines and the runtime measurements are well defined.

use prunetree::annihilation::{collision_time, shock_tree, simulate_sinks, Potential, Simulation};
use prunetree::gw::{self, GwParams};
use prunetree::harris::{harris_path, level_set_tree};
use prunetree::numeric::integrate;
use prunetree::pruning::{prune, Phi, PhiKind};
use prunetree::rng::Rng;
use prunetree::tree::{PlaneTree, TreePoint};
use prunetree::verify::{
    verify_annihilation_equivalence, verify_invariance, verify_random_sink, verify_theorem8,
    McConfig,
};
use std::time::Instant;

struct Gate {
    failures: Vec<String>,
}

impl Gate {
    fn new() -> Gate {
        Gate { failures: vec![] }
    }
    fn report(&mut self, criterion: &str, pass: bool, detail: String) {
        let line = format!(
            "{} criterion {criterion}: {detail}",
            if pass { "PASS" } else { "FAIL" }
        );
        println!("{line}");
        if !pass {
            self.failures.push(line);
        }
    }
}

#[test]
fn acceptance() {
    let mut gate = Gate::new();
    criterion_1_reciprocity(&mut gate);
    criterion_2_prune_invariance(&mut gate);
    criterion_3_semigroup(&mut gate);
    criterion_4_annihilation_equivalence(&mut gate);
    criterion_5_shock_tree_identities(&mut gate);
    criterion_6_mass_decoration(&mut gate);
    criterion_7_random_sink_laws(&mut gate);
    criterion_8_numerics(&mut gate);
    criterion_9_determinism(&mut gate);
    assert!(
        gate.failures.is_empty(),
        "acceptance failures:\n{}",
        gate.failures.join("\n")
    );
}

/// 1: exact reciprocity on 1e4 random trees and 1e4 random excursions,
/// lengths to 1e-12, under 10 s.
fn criterion_1_reciprocity(gate: &mut Gate) {
    let start = Instant::now();
    let n = 10_000u64;
    let mut worst = 0.0f64;
    let mut shape_bad = 0u64;
    for i in 0..n {
        let tree = match gw::sample_gw(&GwParams::new(1.0, 101).stream(i).cap(1_000_000)) {
            Ok(t) => t,
            Err(_) => continue,
        };
        let x = harris_path(&tree).unwrap();
        let back = level_set_tree(&x).unwrap();
        if !tree.same_tree(&back, f64::INFINITY) {
            shape_bad += 1;
            continue;
        }
        for (a, b) in tree.dfs_preorder().iter().zip(back.dfs_preorder()) {
            worst = worst.max((tree.edge_len(*a) - back.edge_len(b)).abs());
        }
    }
    for i in 0..n {
        let x = match gw::sample_exp_excursion(&GwParams::new(1.0, 202).stream(i).cap(1_000_000)) {
            Ok(x) => x,
            Err(_) => continue,
        };
        let t = level_set_tree(&x).unwrap();
        let back = harris_path(&t).unwrap();
        if x.extrema().len() != back.extrema().len() {
            shape_bad += 1;
            continue;
        }
        for (a, b) in x.extrema().iter().zip(back.extrema()) {
            worst = worst.max((a - b).abs());
        }
    }
    let dt = start.elapsed().as_secs_f64();
    let pass = shape_bad == 0 && worst <= 1e-12 && dt < 10.0;
    gate.report(
        "1 (reciprocity)",
        pass,
        format!("2x{n} round trips, worst length error {worst:.2e}, {shape_bad} shape mismatches, {dt:.1} s"),
    );
}

/// 2: prune invariance for each closed-form pruning function at
/// lambda = 1, Delta in {0.5, 1, 2}, n = 1e5 per cell.
fn criterion_2_prune_invariance(gate: &mut Gate) {
    for kind in [PhiKind::Length, PhiKind::Height, PhiKind::HortonOrder] {
        for delta in [0.5, 1.0, 2.0] {
            let start = Instant::now();
            let cfg = McConfig::new(1.0, delta, 100_000, 11);
            let report = verify_invariance(&cfg, kind);
            let dt = start.elapsed().as_secs_f64();
            let pass = report.passed && dt < 120.0;
            let stats: Vec<String> = report
                .checks
                .iter()
                .map(|c| format!("{}={}", c.name, if c.pass { "ok" } else { "FAIL" }))
                .collect();
            gate.report(
                "2 (prune invariance)",
                pass,
                format!(
                    "phi={} delta={delta}: {} ({dt:.1} s)",
                    kind.name(),
                    stats.join(", ")
                ),
            );
        }
    }
}

/// 3: height pruning satisfies the semigroup property on 1e3 random trees
/// to 1e-9; length pruning violates it on the three-edge Y at
/// (s, t) = (1.5, 1.0).
fn criterion_3_semigroup(gate: &mut Gate) {
    let start = Instant::now();
    let mut rng = Rng::new(314);
    let mut bad = 0u64;
    for i in 0..1_000u64 {
        let tree = match gw::sample_gw(&GwParams::new(1.0, 55).stream(i).cap(100_000)) {
            Ok(t) => t,
            Err(_) => continue,
        };
        let s = 0.2 + rng.uniform();
        let t = 0.2 + rng.uniform();
        let (first, _) = prune(&tree, &Phi::Height, s).unwrap();
        let (composed, _) = prune(&first, &Phi::Height, t).unwrap();
        let (direct, _) = prune(&tree, &Phi::Height, s + t).unwrap();
        if !composed.same_tree(&direct, 1e-9) {
            bad += 1;
        }
    }
    let y = PlaneTree::y_tree(3.0, 1.0, 2.0);
    let (p15, _) = prune(&y, &Phi::Length, 1.5).unwrap();
    let (comp, _) = prune(&p15, &Phi::Length, 1.0).unwrap();
    let (direct, _) = prune(&y, &Phi::Length, 2.5).unwrap();
    let violated = !comp.same_tree(&direct, 1e-9)
        && direct.same_tree(&PlaneTree::single_edge(3.0), 1e-12);
    let dt = start.elapsed().as_secs_f64();
    let pass = bad == 0 && violated;
    gate.report(
        "3 (semigroup)",
        pass,
        format!("height composed=direct on 1000 trees ({bad} bad); length violation on the Y tree: {violated} ({dt:.1} s)"),
    );
}

/// 4: the pruning route equals the event-driven route on 1e3 random
/// exponential potentials at 8 interior times each, to 1e-9, zero failures.
fn criterion_4_annihilation_equivalence(gate: &mut Gate) {
    let start = Instant::now();
    let cfg = McConfig::new(1.0, 0.0, 1_000, 21);
    let report = verify_annihilation_equivalence(&cfg);
    let dt = start.elapsed().as_secs_f64();
    let pass = report.passed && dt < 60.0;
    let detail: Vec<String> = report
        .checks
        .iter()
        .map(|c| format!("{}={}", c.name, if c.pass { "ok" } else { "FAIL" }))
        .collect();
    gate.report(
        "4 (annihilation equivalence)",
        pass,
        format!("{} ({dt:.1} s)", detail.join(", ")),
    );
}

/// 5: shock-tree identities: the vertical tree equals the level-set tree
/// exactly; W symmetry h1 = v3, h3 = v1 to 1e-12; the sink mass at a point
/// is twice the descendant vertical length (vs the simulator); conservation
/// at t_max.
fn criterion_5_shock_tree_identities(gate: &mut Gate) {
    let start = Instant::now();
    let mut isometry_bad = 0u64;
    let mut mass_bad = 0u64;
    let mut cons_worst = 0.0f64;
    let mut rng = Rng::new(500);
    let mut used = 0;
    let mut stream = 0u64;
    while used < 200 {
        stream += 1;
        let Ok(pot) = Potential::sample_exp(&GwParams::new(1.0, 77).stream(stream).cap(10_000), 0.0)
        else {
            continue;
        };
        used += 1;
        let st = shock_tree(&pot).unwrap();
        if !st
            .vertical_tree()
            .same_tree(&level_set_tree(pot.excursion()).unwrap(), 0.0)
        {
            isometry_bad += 1;
        }
        if used <= 50 {
            let trajs = simulate_sinks(&pot).unwrap();
            let ids: Vec<_> = st.base.node_ids().collect();
            for _ in 0..10 {
                let v = ids[rng.below(ids.len())];
                let off = rng.uniform() * st.base.edge_len(v);
                let p = TreePoint { node: v, offset: off };
                let mass = st.mass_at(&p);
                let t_z = st.time_at(&p);
                let x_z = st.position_at(&p);
                let found = trajs.iter().any(|tr| {
                    tr.state_at(t_z)
                        .map(|(x, m)| (x - x_z).abs() < 1e-9 && (m - mass).abs() < 1e-9)
                        .unwrap_or(false)
                });
                if !found {
                    mass_bad += 1;
                }
            }
            let (a, b) = pot.domain();
            let last = trajs.last().unwrap();
            let (_, m) = last.state_at(pot.t_max()).unwrap();
            cons_worst = cons_worst.max(((m - (b - a)) / (b - a)).abs());
        }
    }
    // W symmetry on random bracket shapes
    let mut sym_worst = 0.0f64;
    for _ in 0..200 {
        let v1 = 0.2 + rng.uniform();
        let v3 = 0.2 + rng.uniform();
        if (v1 - v3).abs() < 1e-3 {
            continue;
        }
        let s = 0.2 + rng.uniform();
        let pot =
            Potential::from_psi_extrema(0.0, vec![0.0, -(s + v1), -s, -(s + v3), 0.0]).unwrap();
        let st = shock_tree(&pot).unwrap();
        let stem = st.base.stem().unwrap();
        let (l, r) = st.base.children(stem);
        let (nl, nr) = (st.node(l.unwrap()), st.node(r.unwrap()));
        sym_worst = sym_worst
            .max((nl.h - nr.v).abs())
            .max((nr.h - nl.v).abs());
    }
    let dt = start.elapsed().as_secs_f64();
    let pass = isometry_bad == 0 && mass_bad == 0 && sym_worst <= 1e-12 && cons_worst <= 1e-9;
    gate.report(
        "5 (shock-tree identities)",
        pass,
        format!(
            "vertical=level-set on 200 potentials ({isometry_bad} bad); mass rule at 500 points ({mass_bad} bad); W symmetry worst {sym_worst:.2e}; conservation worst {cons_worst:.2e} ({dt:.1} s)"
        ),
    );
}

/// 6: mass decoration of the pruned tree at lambda = 1,
/// t in {0.5, 1, 2}, 1e5 surviving prunes per cell.
fn criterion_6_mass_decoration(gate: &mut Gate) {
    for t in [0.5, 1.0, 2.0] {
        let start = Instant::now();
        let cfg = McConfig::new(1.0, t, 100_000, 31);
        let report = verify_theorem8(&cfg);
        let dt = start.elapsed().as_secs_f64();
        let pass = report.passed && dt < 300.0;
        let detail: Vec<String> = report
            .checks
            .iter()
            .map(|c| format!("{}={}", c.name, if c.pass { "ok" } else { "FAIL" }))
            .collect();
        gate.report(
            "6 (mass decoration)",
            pass,
            format!("t={t}: {} ({dt:.1} s)", detail.join(", ")),
        );
    }
}

/// 7: random-sink laws at lambda = 1, t in {0.5, 1, 2}, n = 1e5.
fn criterion_7_random_sink_laws(gate: &mut Gate) {
    for t in [0.5, 1.0, 2.0] {
        let start = Instant::now();
        let cfg = McConfig::new(1.0, t, 100_000, 41);
        let report = verify_random_sink(&cfg);
        let dt = start.elapsed().as_secs_f64();
        let pass = report.passed && dt < 120.0;
        let detail: Vec<String> = report
            .checks
            .iter()
            .map(|c| format!("{}={}", c.name, if c.pass { "ok" } else { "FAIL" }))
            .collect();
        gate.report(
            "7 (random sink laws)",
            pass,
            format!("t={t}: {} ({dt:.1} s)", detail.join(", ")),
        );
    }
}

/// 8: numeric verification: Bessel against a high-precision reference
/// series (at least 50 terms, exact-recurrence double-double arithmetic)
/// to 1e-12 relative; density normalizations to 1e-6; the convolution
/// identity for the length density to 1e-6 on a grid.
fn criterion_8_numerics(gate: &mut Gate) {
    let start = Instant::now();
    // double-double reference series
    fn two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let v = s - a;
        (s, (a - (s - v)) + (b - v))
    }
    fn dd_mul(hi: f64, lo: f64, x: f64) -> (f64, f64) {
        let p = hi * x;
        let e = hi.mul_add(x, -p) + lo * x;
        two_sum(p, e)
    }
    fn dd_div(hi: f64, lo: f64, x: f64) -> (f64, f64) {
        let q1 = hi / x;
        let r = hi - q1 * x + lo;
        two_sum(q1, r / x)
    }
    fn reference_i(nu: u8, z: f64) -> f64 {
        let (mut th, mut tl) = if nu == 0 { (1.0, 0.0) } else { (0.5 * z, 0.0) };
        let (mut sh, mut sl) = (th, tl);
        let mut n = 0u32;
        loop {
            n += 1;
            let (a, b) = dd_mul(th, tl, 0.5 * z);
            let (a, b) = dd_mul(a, b, 0.5 * z);
            let (a, b) = dd_div(a, b, n as f64);
            let (a, b) = dd_div(a, b, (n + nu as u32) as f64);
            th = a;
            tl = b;
            let (x, y) = two_sum(sh, th);
            sh = x;
            sl += y + tl;
            if n >= 50 && th.abs() < sh.abs() * 1e-20 {
                return sh + sl;
            }
            if n > 3000 {
                return sh + sl;
            }
        }
    }
    let mut bessel_worst = 0.0f64;
    for &z in &[0.1, 1.0, 10.0, 50.0] {
        for nu in [0u8, 1] {
            let r = reference_i(nu, z);
            bessel_worst = bessel_worst.max(((gw::bessel(nu, z) - r) / r).abs());
        }
    }
    // normalization of the length density
    let x_max = 1.0e13;
    let ell_total = integrate(|x| gw::length_pdf(x, 1.0).unwrap(), 1e-12, 50.0, 1e-9)
        + prunetree::numeric::integrate_log(|x| gw::length_pdf(x, 1.0).unwrap(), 50.0, x_max, 1e-9)
        + gw::length_survival(x_max, 1.0);
    let ell_err = (ell_total - 1.0).abs();
    // normalization of the sink mass law
    let mut mu_err = 0.0f64;
    for t in [0.5, 1.0, 2.0] {
        let total = integrate(|a| gw::sink_mass_density(a, t, 1.0), 0.0, 2.0 * t, 1e-10)
            + gw::growth_probability(t, 1.0).unwrap();
        mu_err = mu_err.max((total - 1.0).abs());
    }
    // convolution identity
    let ell = |x: f64| {
        if x <= 0.0 {
            0.5
        } else {
            gw::length_pdf(x, 1.0).unwrap()
        }
    };
    let phi = |x: f64| (-x as f64).exp();
    let conv2 = |y: f64| integrate(|u| ell(u) * ell(y - u), 0.0, y, 1e-10);
    let mut conv_err = 0.0f64;
    for x in [0.5, 1.0, 1.5, 2.0, 3.0] {
        let triple = integrate(|y| phi(x - y) * conv2(y), 0.0, x, 1e-9);
        conv_err = conv_err.max((ell(x) - 0.5 * phi(x) - 0.5 * triple).abs());
    }
    let dt = start.elapsed().as_secs_f64();
    let pass = bessel_worst <= 1e-12 && ell_err <= 1e-6 && mu_err <= 1e-6 && conv_err <= 1e-6;
    gate.report(
        "8 (numerics)",
        pass,
        format!(
            "bessel worst rel {bessel_worst:.2e}; |int ell - 1| = {ell_err:.2e}; |int mu - 1| worst {mu_err:.2e}; convolution worst {conv_err:.2e} ({dt:.1} s)"
        ),
    );
}

/// 9: the full verification run is byte-identical across two executions.
fn criterion_9_determinism(gate: &mut Gate) {
    let start = Instant::now();
    let run = || {
        let cfg = McConfig::new(1.0, 1.0, 2_000, 1);
        let reports = prunetree::verify::verify_all(&cfg);
        serde_json::to_string(&reports).unwrap()
    };
    let a = run();
    let b = run();
    let dt = start.elapsed().as_secs_f64();
    let pass = a == b;
    gate.report(
        "9 (determinism)",
        pass,
        format!(
            "two verify-all runs at seed 1: {} bytes, identical: {pass} ({dt:.1} s)",
            a.len()
        ),
    );
}

// Smaller helpers exercised here to keep the gate honest end to end.
#[test]
fn collision_time_is_t_max_for_domain_ends() {
    let pot = Potential::from_psi_extrema(0.0, vec![0.0, -1.0, -0.4, -2.0, 0.0]).unwrap();
    assert!((collision_time(&pot, 0.0, pot.domain().1).unwrap() - pot.t_max()).abs() < 1e-12);
    let mut sim = Simulation::new(&pot).unwrap();
    sim.run_to(0.1);
    assert!(sim.snapshot(0.1).is_ok());
}
