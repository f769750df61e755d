//! C ABI for the prunetree library: opaque handles, integer status codes,
//! UTF-8 JSON strings for structured data. The generated header lives at
//! `include/prunetree.h`.
//!
//! Ownership: every constructor hands back a handle that must be released
//! with the matching `pr_*_free`; strings returned through `char**`
//! out-params must be released with `pr_string_free`.

use prunetree::annihilation::{evolve, shock_tree, simulate_sinks, Potential};
use prunetree::gw::{self, GwParams};
use prunetree::harris::{harris_path, level_set_tree, Excursion};
use prunetree::pruning::{prune, prune_mass_equipped, PhiKind};
use prunetree::verify::{self, McConfig};
use prunetree::{io, PlaneTree};
use std::ffi::{c_char, CStr, CString};

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    InvalidJson = 3,
    DomainError = 4,
    NodeCapExceeded = 5,
    VerifyFailed = 6,
}

/// Opaque plane tree handle.
pub struct PrTree(PlaneTree);
/// Opaque initial potential handle.
pub struct PrPotential(Potential);

// --------------------------------------------------------------------
// strings
// --------------------------------------------------------------------

fn give_string(s: String, out: *mut *mut c_char) -> PrStatus {
    if out.is_null() {
        return PrStatus::NullArgument;
    }
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            PrStatus::Ok
        }
        Err(_) => PrStatus::InvalidUtf8,
    }
}

unsafe fn take_str<'a>(s: *const c_char) -> Result<&'a str, PrStatus> {
    if s.is_null() {
        return Err(PrStatus::NullArgument);
    }
    CStr::from_ptr(s).to_str().map_err(|_| PrStatus::InvalidUtf8)
}

/// Release a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn pr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// --------------------------------------------------------------------
// trees
// --------------------------------------------------------------------

/// Parse a tree from its JSON schema.
#[no_mangle]
pub unsafe extern "C" fn pr_tree_from_json(json: *const c_char, out: *mut *mut PrTree) -> PrStatus {
    if out.is_null() {
        return PrStatus::NullArgument;
    }
    let s = match take_str(json) {
        Ok(s) => s,
        Err(e) => return e,
    };
    match io::tree_from_json_str(s) {
        Ok(t) => {
            *out = Box::into_raw(Box::new(PrTree(t)));
            PrStatus::Ok
        }
        Err(_) => PrStatus::InvalidJson,
    }
}

/// Serialize a tree to its JSON schema.
#[no_mangle]
pub unsafe extern "C" fn pr_tree_to_json(tree: *const PrTree, out: *mut *mut c_char) -> PrStatus {
    let Some(t) = tree.as_ref() else {
        return PrStatus::NullArgument;
    };
    give_string(io::tree_to_json_string(&t.0), out)
}

/// Serialize a tree to Newick with branch lengths.
#[no_mangle]
pub unsafe extern "C" fn pr_tree_to_newick(tree: *const PrTree, out: *mut *mut c_char) -> PrStatus {
    let Some(t) = tree.as_ref() else {
        return PrStatus::NullArgument;
    };
    give_string(io::tree_to_newick(&t.0), out)
}

#[no_mangle]
pub unsafe extern "C" fn pr_tree_free(tree: *mut PrTree) {
    if !tree.is_null() {
        drop(Box::from_raw(tree));
    }
}

/// Total edge length of the tree.
#[no_mangle]
pub unsafe extern "C" fn pr_tree_length(tree: *const PrTree, out: *mut f64) -> PrStatus {
    let (Some(t), false) = (tree.as_ref(), out.is_null()) else {
        return PrStatus::NullArgument;
    };
    *out = t.0.length();
    PrStatus::Ok
}

/// Maximal root-to-vertex distance.
#[no_mangle]
pub unsafe extern "C" fn pr_tree_height(tree: *const PrTree, out: *mut f64) -> PrStatus {
    let (Some(t), false) = (tree.as_ref(), out.is_null()) else {
        return PrStatus::NullArgument;
    };
    *out = t.0.height();
    PrStatus::Ok
}

#[no_mangle]
pub unsafe extern "C" fn pr_tree_num_leaves(tree: *const PrTree, out: *mut u64) -> PrStatus {
    let (Some(t), false) = (tree.as_ref(), out.is_null()) else {
        return PrStatus::NullArgument;
    };
    *out = t.0.num_leaves() as u64;
    PrStatus::Ok
}

/// Horton-Strahler order (0 for the empty tree).
#[no_mangle]
pub unsafe extern "C" fn pr_tree_horton_order(tree: *const PrTree, out: *mut u32) -> PrStatus {
    let (Some(t), false) = (tree.as_ref(), out.is_null()) else {
        return PrStatus::NullArgument;
    };
    *out = t.0.horton_order();
    PrStatus::Ok
}

/// Sample an exponential critical Galton-Watson tree. `node_cap = 0` uses
/// the default cap.
#[no_mangle]
pub unsafe extern "C" fn pr_sample_gw(
    lambda: f64,
    seed: u64,
    stream: u64,
    node_cap: usize,
    out: *mut *mut PrTree,
) -> PrStatus {
    if out.is_null() {
        return PrStatus::NullArgument;
    }
    let cap = if node_cap == 0 {
        gw::DEFAULT_NODE_CAP
    } else {
        node_cap
    };
    match gw::sample_gw(&GwParams::new(lambda, seed).stream(stream).cap(cap)) {
        Ok(t) => {
            *out = Box::into_raw(Box::new(PrTree(t)));
            PrStatus::Ok
        }
        Err(gw::GwError::NodeCapExceeded(_)) => PrStatus::NodeCapExceeded,
        Err(_) => PrStatus::DomainError,
    }
}

/// Pruning function selector for the C surface.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrPhi {
    Height = 0,
    HortonOrder = 1,
    Length = 2,
    LeafCount = 3,
}

impl From<PrPhi> for PhiKind {
    fn from(p: PrPhi) -> PhiKind {
        match p {
            PrPhi::Height => PhiKind::Height,
            PrPhi::HortonOrder => PhiKind::HortonOrder,
            PrPhi::Length => PhiKind::Length,
            PrPhi::LeafCount => PhiKind::LeafCount,
        }
    }
}

/// Generalized dynamical pruning; returns the pruned tree.
#[no_mangle]
pub unsafe extern "C" fn pr_prune(
    tree: *const PrTree,
    phi: PrPhi,
    t: f64,
    out: *mut *mut PrTree,
) -> PrStatus {
    let (Some(tr), false) = (tree.as_ref(), out.is_null()) else {
        return PrStatus::NullArgument;
    };
    match prune(&tr.0, &PhiKind::from(phi).into(), t) {
        Ok((p, _)) => {
            *out = Box::into_raw(Box::new(PrTree(p)));
            PrStatus::Ok
        }
        Err(_) => PrStatus::DomainError,
    }
}

/// Generalized dynamical pruning with the cut set as JSON.
#[no_mangle]
pub unsafe extern "C" fn pr_prune_with_cuts(
    tree: *const PrTree,
    phi: PrPhi,
    t: f64,
    out: *mut *mut PrTree,
    cuts_json: *mut *mut c_char,
) -> PrStatus {
    let (Some(tr), false) = (tree.as_ref(), out.is_null()) else {
        return PrStatus::NullArgument;
    };
    match prune(&tr.0, &PhiKind::from(phi).into(), t) {
        Ok((p, cuts)) => {
            if !cuts_json.is_null() {
                let j = io::cuts_to_json(&cuts, &p);
                let status = give_string(serde_json::to_string(&j).unwrap(), cuts_json);
                if status != PrStatus::Ok {
                    return status;
                }
            }
            *out = Box::into_raw(Box::new(PrTree(p)));
            PrStatus::Ok
        }
        Err(_) => PrStatus::DomainError,
    }
}

/// Mass-equipped pruning (phi = length); mass tree as JSON.
#[no_mangle]
pub unsafe extern "C" fn pr_prune_mass_equipped_json(
    tree: *const PrTree,
    t: f64,
    out: *mut *mut c_char,
) -> PrStatus {
    let Some(tr) = tree.as_ref() else {
        return PrStatus::NullArgument;
    };
    match prune_mass_equipped(&tr.0, t) {
        Ok(mt) => give_string(
            serde_json::to_string(&io::mass_tree_to_json(&mt, t)).unwrap(),
            out,
        ),
        Err(_) => PrStatus::DomainError,
    }
}

// --------------------------------------------------------------------
// Harris path / level-set tree
// --------------------------------------------------------------------

/// Harris path extrema of a planted tree. The caller owns `*out` and frees
/// it with `pr_doubles_free(*out, *len)`.
#[no_mangle]
pub unsafe extern "C" fn pr_harris_path(
    tree: *const PrTree,
    out: *mut *mut f64,
    len: *mut usize,
) -> PrStatus {
    let (Some(t), false, false) = (tree.as_ref(), out.is_null(), len.is_null()) else {
        return PrStatus::NullArgument;
    };
    match harris_path(&t.0) {
        Ok(x) => {
            let mut v = x.extrema().to_vec().into_boxed_slice();
            *len = v.len();
            *out = v.as_mut_ptr();
            std::mem::forget(v);
            PrStatus::Ok
        }
        Err(_) => PrStatus::DomainError,
    }
}

/// Level-set tree of an excursion given by its extrema values.
#[no_mangle]
pub unsafe extern "C" fn pr_level_set_tree(
    extrema: *const f64,
    len: usize,
    out: *mut *mut PrTree,
) -> PrStatus {
    if extrema.is_null() || out.is_null() {
        return PrStatus::NullArgument;
    }
    let vals = std::slice::from_raw_parts(extrema, len).to_vec();
    let Ok(x) = Excursion::from_extrema(vals) else {
        return PrStatus::DomainError;
    };
    match level_set_tree(&x) {
        Ok(t) => {
            *out = Box::into_raw(Box::new(PrTree(t)));
            PrStatus::Ok
        }
        Err(_) => PrStatus::DomainError,
    }
}

#[no_mangle]
pub unsafe extern "C" fn pr_doubles_free(p: *mut f64, len: usize) {
    if !p.is_null() {
        drop(Box::from_raw(std::ptr::slice_from_raw_parts_mut(p, len)));
    }
}

// --------------------------------------------------------------------
// closed forms
// --------------------------------------------------------------------

/// Modified Bessel function of the first kind, order 0 or 1.
#[no_mangle]
pub unsafe extern "C" fn pr_bessel_i(nu: u32, z: f64, out: *mut f64) -> PrStatus {
    if out.is_null() || nu > 1 || z < 0.0 {
        return PrStatus::NullArgument;
    }
    *out = gw::bessel(nu as u8, z);
    PrStatus::Ok
}

/// Probability density of the total tree length.
#[no_mangle]
pub unsafe extern "C" fn pr_length_pdf(x: f64, lambda: f64, out: *mut f64) -> PrStatus {
    if out.is_null() {
        return PrStatus::NullArgument;
    }
    match gw::length_pdf(x, lambda) {
        Ok(v) => {
            *out = v;
            PrStatus::Ok
        }
        Err(_) => PrStatus::DomainError,
    }
}

/// Survival probability of the pruned tree (no closed form for leaf count).
#[no_mangle]
pub unsafe extern "C" fn pr_survival_prob(
    phi: PrPhi,
    lambda: f64,
    delta: f64,
    out: *mut f64,
) -> PrStatus {
    if out.is_null() {
        return PrStatus::NullArgument;
    }
    match gw::survival_prob(phi.into(), lambda, delta) {
        Ok(v) => {
            *out = v;
            PrStatus::Ok
        }
        Err(_) => PrStatus::DomainError,
    }
}

/// Probability that a random sink is growing at time `t`.
#[no_mangle]
pub unsafe extern "C" fn pr_growth_probability(t: f64, lambda: f64, out: *mut f64) -> PrStatus {
    if out.is_null() {
        return PrStatus::NullArgument;
    }
    match gw::growth_probability(t, lambda) {
        Ok(v) => {
            *out = v;
            PrStatus::Ok
        }
        Err(_) => PrStatus::DomainError,
    }
}

/// Sink mass law at time `t`: continuous density at `a` plus the weight of
/// the atom at `2t`.
#[no_mangle]
pub unsafe extern "C" fn pr_sink_mass_pdf(
    a: f64,
    t: f64,
    lambda: f64,
    density: *mut f64,
    atom_weight: *mut f64,
) -> PrStatus {
    if density.is_null() || atom_weight.is_null() {
        return PrStatus::NullArgument;
    }
    match gw::sink_mass_pdf(a, t, lambda) {
        Ok(r) => {
            *density = r.density;
            *atom_weight = r.atom_weight;
            PrStatus::Ok
        }
        Err(_) => PrStatus::DomainError,
    }
}

// --------------------------------------------------------------------
// annihilation
// --------------------------------------------------------------------

/// Parse an initial potential from JSON ({a, b, extrema}).
#[no_mangle]
pub unsafe extern "C" fn pr_potential_from_json(
    json: *const c_char,
    out: *mut *mut PrPotential,
) -> PrStatus {
    if out.is_null() {
        return PrStatus::NullArgument;
    }
    let s = match take_str(json) {
        Ok(s) => s,
        Err(e) => return e,
    };
    let Ok(j) = serde_json::from_str::<io::PotentialJson>(s) else {
        return PrStatus::InvalidJson;
    };
    match io::potential_from_json(&j) {
        Ok(p) => {
            *out = Box::into_raw(Box::new(PrPotential(p)));
            PrStatus::Ok
        }
        Err(_) => PrStatus::DomainError,
    }
}

/// Random exponential potential (negative Harris path of GW(lambda)).
#[no_mangle]
pub unsafe extern "C" fn pr_potential_sample_exp(
    lambda: f64,
    seed: u64,
    stream: u64,
    out: *mut *mut PrPotential,
) -> PrStatus {
    if out.is_null() {
        return PrStatus::NullArgument;
    }
    match Potential::sample_exp(&GwParams::new(lambda, seed).stream(stream).cap(100_000), 0.0) {
        Ok(p) => {
            *out = Box::into_raw(Box::new(PrPotential(p)));
            PrStatus::Ok
        }
        Err(_) => PrStatus::DomainError,
    }
}

#[no_mangle]
pub unsafe extern "C" fn pr_potential_free(p: *mut PrPotential) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Final aggregation time of the potential, half the domain length.
#[no_mangle]
pub unsafe extern "C" fn pr_potential_t_max(p: *const PrPotential, out: *mut f64) -> PrStatus {
    let (Some(p), false) = (p.as_ref(), out.is_null()) else {
        return PrStatus::NullArgument;
    };
    *out = p.0.t_max();
    PrStatus::Ok
}

/// Evolve the annihilation dynamics to time `t`; evolved-potential JSON.
#[no_mangle]
pub unsafe extern "C" fn pr_evolve_json(
    p: *const PrPotential,
    t: f64,
    out: *mut *mut c_char,
) -> PrStatus {
    let Some(p) = p.as_ref() else {
        return PrStatus::NullArgument;
    };
    match evolve(&p.0, t) {
        Ok(ep) => give_string(
            serde_json::to_string(&io::evolved_to_json(&ep)).unwrap(),
            out,
        ),
        Err(_) => PrStatus::DomainError,
    }
}

/// Event-driven sink trajectories as CSV (sink_id, t, x, mass).
#[no_mangle]
pub unsafe extern "C" fn pr_simulate_sinks_csv(
    p: *const PrPotential,
    out: *mut *mut c_char,
) -> PrStatus {
    let Some(p) = p.as_ref() else {
        return PrStatus::NullArgument;
    };
    match simulate_sinks(&p.0) {
        Ok(trajs) => give_string(io::trajectories_to_csv(&trajs), out),
        Err(_) => PrStatus::DomainError,
    }
}

/// Phase-space shock tree rendered as SVG.
#[no_mangle]
pub unsafe extern "C" fn pr_shock_tree_svg(
    p: *const PrPotential,
    out: *mut *mut c_char,
) -> PrStatus {
    let Some(p) = p.as_ref() else {
        return PrStatus::NullArgument;
    };
    match shock_tree(&p.0) {
        Ok(st) => give_string(io::shock_tree_svg(&p.0, &st), out),
        Err(_) => PrStatus::DomainError,
    }
}

/// Time until the particles at `x` and `y` collide.
#[no_mangle]
pub unsafe extern "C" fn pr_collision_time(
    p: *const PrPotential,
    x: f64,
    y: f64,
    out: *mut f64,
) -> PrStatus {
    let (Some(p), false) = (p.as_ref(), out.is_null()) else {
        return PrStatus::NullArgument;
    };
    match prunetree::annihilation::collision_time(&p.0, x, y) {
        Ok(v) => {
            *out = v;
            PrStatus::Ok
        }
        Err(_) => PrStatus::DomainError,
    }
}

// --------------------------------------------------------------------
// verification
// --------------------------------------------------------------------

/// Run a verification suite ("invariance-length", "invariance-height",
/// "invariance-horton", "invariance-leaves", "theorem8", "sink",
/// "equivalence", "roundtrip", or "all"); the JSON report goes to
/// `report_json`. Returns `VerifyFailed` when a check fails.
#[no_mangle]
pub unsafe extern "C" fn pr_verify(
    suite: *const c_char,
    lambda: f64,
    t: f64,
    n_samples: u64,
    seed: u64,
    report_json: *mut *mut c_char,
) -> PrStatus {
    let name = match take_str(suite) {
        Ok(s) => s,
        Err(e) => return e,
    };
    let cfg = McConfig::new(lambda, t, n_samples, seed);
    let reports = match name {
        "invariance-length" => vec![verify::verify_invariance(&cfg, PhiKind::Length)],
        "invariance-height" => vec![verify::verify_invariance(&cfg, PhiKind::Height)],
        "invariance-horton" => vec![verify::verify_invariance(&cfg, PhiKind::HortonOrder)],
        "invariance-leaves" => vec![verify::verify_invariance(&cfg, PhiKind::LeafCount)],
        "theorem8" => vec![verify::verify_theorem8(&cfg)],
        "sink" => vec![verify::verify_random_sink(&cfg)],
        "equivalence" => vec![verify::verify_annihilation_equivalence(&cfg)],
        "roundtrip" => vec![verify::verify_reciprocity(&cfg)],
        "all" => verify::verify_all(&cfg),
        _ => return PrStatus::DomainError,
    };
    let ok = reports.iter().all(|r| r.passed);
    if !report_json.is_null() {
        let status = give_string(serde_json::to_string(&reports).unwrap(), report_json);
        if status != PrStatus::Ok {
            return status;
        }
    }
    if ok {
        PrStatus::Ok
    } else {
        PrStatus::VerifyFailed
    }
}

/// Library version as a static string (do not free).
#[no_mangle]
pub extern "C" fn pr_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr() as *const c_char
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    fn cstr(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    #[test]
    fn tree_surface_roundtrip() {
        unsafe {
            let mut tree: *mut PrTree = ptr::null_mut();
            assert_eq!(pr_sample_gw(1.0, 42, 0, 0, &mut tree), PrStatus::Ok);
            let mut len = 0.0;
            assert_eq!(pr_tree_length(tree, &mut len), PrStatus::Ok);
            assert!(len > 0.0);
            let mut json: *mut c_char = ptr::null_mut();
            assert_eq!(pr_tree_to_json(tree, &mut json), PrStatus::Ok);
            let s = CStr::from_ptr(json).to_str().unwrap().to_owned();
            let mut back: *mut PrTree = ptr::null_mut();
            let cs = cstr(&s);
            assert_eq!(pr_tree_from_json(cs.as_ptr(), &mut back), PrStatus::Ok);
            let mut len2 = 0.0;
            assert_eq!(pr_tree_length(back, &mut len2), PrStatus::Ok);
            assert!((len - len2).abs() < 1e-12);
            let mut nw: *mut c_char = ptr::null_mut();
            assert_eq!(pr_tree_to_newick(tree, &mut nw), PrStatus::Ok);
            assert!(CStr::from_ptr(nw).to_str().unwrap().ends_with(';'));
            pr_string_free(nw);
            pr_string_free(json);
            pr_tree_free(back);
            pr_tree_free(tree);
        }
    }

    #[test]
    fn prune_and_harris_surface() {
        unsafe {
            let mut tree: *mut PrTree = ptr::null_mut();
            assert_eq!(pr_sample_gw(1.0, 7, 3, 0, &mut tree), PrStatus::Ok);
            let mut pruned: *mut PrTree = ptr::null_mut();
            let mut cuts: *mut c_char = ptr::null_mut();
            assert_eq!(
                pr_prune_with_cuts(tree, PrPhi::Length, 0.5, &mut pruned, &mut cuts),
                PrStatus::Ok
            );
            assert!(!cuts.is_null());
            pr_string_free(cuts);
            let mut mt: *mut c_char = ptr::null_mut();
            assert_eq!(pr_prune_mass_equipped_json(tree, 0.5, &mut mt), PrStatus::Ok);
            pr_string_free(mt);
            let mut extrema: *mut f64 = ptr::null_mut();
            let mut n = 0usize;
            assert_eq!(pr_harris_path(tree, &mut extrema, &mut n), PrStatus::Ok);
            assert!(n >= 3);
            let mut back: *mut PrTree = ptr::null_mut();
            assert_eq!(pr_level_set_tree(extrema, n, &mut back), PrStatus::Ok);
            let mut l1 = 0.0;
            let mut l2 = 0.0;
            pr_tree_length(tree, &mut l1);
            pr_tree_length(back, &mut l2);
            assert!((l1 - l2).abs() < 1e-9);
            pr_doubles_free(extrema, n);
            pr_tree_free(back);
            pr_tree_free(pruned);
            pr_tree_free(tree);
        }
    }

    #[test]
    fn closed_forms_surface() {
        unsafe {
            let mut v = 0.0;
            assert_eq!(pr_bessel_i(0, 1.0, &mut v), PrStatus::Ok);
            assert!((v - 1.2660658777520084).abs() < 1e-12);
            assert_eq!(pr_survival_prob(PrPhi::Length, 1.0, 1.0, &mut v), PrStatus::Ok);
            assert!((v - 0.6736700229433489).abs() < 1e-12);
            assert_eq!(
                pr_survival_prob(PrPhi::LeafCount, 1.0, 1.0, &mut v),
                PrStatus::DomainError
            );
            let (mut d, mut w) = (0.0, 0.0);
            assert_eq!(pr_sink_mass_pdf(1.0, 1.0, 1.0, &mut d, &mut w), PrStatus::Ok);
            assert!(d > 0.0 && w > 0.0);
            assert_eq!(pr_length_pdf(-1.0, 1.0, &mut v), PrStatus::DomainError);
            assert_eq!(pr_growth_probability(1.0, 1.0, &mut v), PrStatus::Ok);
            assert!((v - 0.4657596075936404).abs() < 1e-12);
        }
    }

    #[test]
    fn annihilation_surface() {
        unsafe {
            let mut pot: *mut PrPotential = ptr::null_mut();
            let json = cstr(r#"{"a":0.0,"b":7.4,"extrema":[0.0,-1.7,-0.7,-2.7,0.0]}"#);
            assert_eq!(pr_potential_from_json(json.as_ptr(), &mut pot), PrStatus::Ok);
            let mut tmax = 0.0;
            assert_eq!(pr_potential_t_max(pot, &mut tmax), PrStatus::Ok);
            assert!((tmax - 3.7).abs() < 1e-12);
            let mut evolved: *mut c_char = ptr::null_mut();
            assert_eq!(pr_evolve_json(pot, 1.5, &mut evolved), PrStatus::Ok);
            let s = CStr::from_ptr(evolved).to_str().unwrap();
            assert!(s.contains("plateaus"));
            pr_string_free(evolved);
            let mut csv: *mut c_char = ptr::null_mut();
            assert_eq!(pr_simulate_sinks_csv(pot, &mut csv), PrStatus::Ok);
            assert!(CStr::from_ptr(csv).to_str().unwrap().starts_with("sink_id"));
            pr_string_free(csv);
            let mut svg: *mut c_char = ptr::null_mut();
            assert_eq!(pr_shock_tree_svg(pot, &mut svg), PrStatus::Ok);
            pr_string_free(svg);
            let mut h1 = 0.0;
            assert_eq!(pr_collision_time(pot, 0.0, 7.4, &mut h1), PrStatus::Ok);
            assert!((h1 - 3.7).abs() < 1e-12);
            assert_eq!(
                pr_collision_time(pot, -1.0, 2.0, &mut h1),
                PrStatus::DomainError
            );
            pr_potential_free(pot);
        }
    }

    #[test]
    fn verify_surface() {
        unsafe {
            let suite = cstr("roundtrip");
            let mut report: *mut c_char = ptr::null_mut();
            let st = pr_verify(suite.as_ptr(), 1.0, 0.0, 500, 1, &mut report);
            assert_eq!(st, PrStatus::Ok);
            let s = CStr::from_ptr(report).to_str().unwrap();
            assert!(s.contains("\"passed\":true"));
            pr_string_free(report);
            let bad = cstr("nope");
            assert_eq!(
                pr_verify(bad.as_ptr(), 1.0, 0.0, 10, 1, ptr::null_mut()),
                PrStatus::DomainError
            );
        }
    }

    #[test]
    fn version_is_c_string() {
        let v = pr_version();
        assert!(!v.is_null());
        let s = unsafe { CStr::from_ptr(v) }.to_str().unwrap();
        assert!(s.starts_with(char::is_numeric));
    }
}
