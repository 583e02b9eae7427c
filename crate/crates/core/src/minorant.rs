//! Linear-time α-Lipschitz minorant of a sampled path.
//!
//! The minorant is the min-plus convolution of `w = f ∧ f(-)` with the cone
//! `α|t|`. Restricted to a grid it splits into a forward and a backward pass:
//!
//! ```text
//! a_i = min_{j <= i} w_j + α (t_i - t_j)
//! b_i = min_{j >= i} w_j + α (t_j - t_i)
//! m_i = min(a_i, b_i)
//! ```
//!
//! Each pass only needs the running apex: the minimiser for `i` is either `i`
//! itself or the minimiser for its neighbour, because moving along the grid
//! adds the same amount to every older candidate. Values are recomputed from
//! the apex rather than accumulated so that they agree bit-for-bit with the
//! direct double loop up to a single rounding.
//!
//! Points outside the window are treated as `+∞`, so the result is the
//! minorant of the restriction. Indices whose value is determined near the
//! window edge are flagged as contaminated instead of being corrected.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::path::CadlagPath;

/// Contact tolerance used when none is given; contacts found by the scans are exact.
pub const DEFAULT_CONTACT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct MinorantResult {
    pub m: Vec<f64>,
    pub contact_mask: Vec<bool>,
    /// Apex of the forward scan (an index `<= i`).
    pub argmin_left: Vec<usize>,
    /// Apex of the backward scan (an index `>= i`).
    pub argmin_right: Vec<usize>,
    pub contaminated: Vec<bool>,
    pub alpha: f64,
    pub tol: f64,
    pub guard: f64,
}

impl MinorantResult {
    pub fn len(&self) -> usize {
        self.m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m.is_empty()
    }

    pub fn contact_count(&self) -> usize {
        self.contact_mask.iter().filter(|&&c| c).count()
    }
}

/// Guard band `range / α`, clipped to a tenth of the window length.
pub fn default_guard(path: &CadlagPath, alpha: f64) -> f64 {
    let (lo, hi) = (0..path.len()).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), i| {
        (lo.min(path.lower(i)), hi.max(path.values()[i]))
    });
    let span = path.end() - path.start();
    ((hi - lo) / alpha).min(0.1 * span)
}

pub fn compute_minorant(path: &CadlagPath, alpha: f64, guard: f64) -> Result<MinorantResult> {
    compute_minorant_with_tol(path, alpha, guard, DEFAULT_CONTACT_TOL)
}

pub fn compute_minorant_with_tol(path: &CadlagPath, alpha: f64, guard: f64, tol: f64) -> Result<MinorantResult> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::param(format!("alpha must be positive and finite, got {alpha}")));
    }
    if !(guard >= 0.0) {
        return Err(Error::param(format!("guard must be nonnegative, got {guard}")));
    }
    if !(tol >= 0.0) {
        return Err(Error::param(format!("contact tolerance must be nonnegative, got {tol}")));
    }
    let n = path.len();
    let t = path.times();
    let w = path.lower_values();

    let mut forward = vec![0.0; n];
    let mut argmin_left = vec![0usize; n];
    let mut apex = 0;
    forward[0] = w[0];
    for i in 1..n {
        let through_apex = w[apex] + alpha * (t[i] - t[apex]);
        if w[i] < through_apex {
            apex = i;
            forward[i] = w[i];
        } else {
            forward[i] = through_apex;
        }
        argmin_left[i] = apex;
    }

    let mut m = vec![0.0; n];
    let mut argmin_right = vec![0usize; n];
    let mut contact_mask = vec![false; n];
    let mut contaminated = vec![false; n];
    let (start, end) = (t[0], t[n - 1]);
    let near_edge = |s: f64| s - start < guard || end - s < guard;

    let mut apex = n - 1;
    for i in (0..n).rev() {
        let backward = if i == n - 1 {
            w[i]
        } else {
            let through_apex = w[apex] + alpha * (t[apex] - t[i]);
            // `<=` so that the smallest index wins a tie.
            if w[i] <= through_apex {
                apex = i;
                w[i]
            } else {
                through_apex
            }
        };
        argmin_right[i] = apex;
        let (value, achieving) = if forward[i] <= backward {
            (forward[i], argmin_left[i])
        } else {
            (backward, apex)
        };
        m[i] = value;
        contact_mask[i] = w[i] - value <= tol;
        contaminated[i] = near_edge(t[i]) || near_edge(t[achieving]);
    }

    Ok(MinorantResult {
        m,
        contact_mask,
        argmin_left,
        argmin_right,
        contaminated,
        alpha,
        tol,
        guard,
    })
}

/// Maximal runs of consecutive uncontaminated contact indices, in time order.
pub fn extract_contact_set(result: &MinorantResult) -> Vec<Range<usize>> {
    let mut runs = Vec::new();
    let mut open: Option<usize> = None;
    for i in 0..result.len() {
        let inside = result.contact_mask[i] && !result.contaminated[i];
        match (inside, open) {
            (true, None) => open = Some(i),
            (false, Some(s)) => {
                runs.push(s..i);
                open = None;
            }
            _ => {}
        }
    }
    if let Some(s) = open {
        runs.push(s..result.len());
    }
    runs
}

/// The complementary interval of the contact set that straddles the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StraddleInterval {
    /// Last contact before 0.
    pub g: f64,
    /// First contact after 0.
    pub d: f64,
    /// Peak of the sawtooth on `[g, d]`.
    pub t: f64,
    /// Recipe stopping time: first `t > 0` with `w(t) - αt <= inf_{u<=0} w(u) - αu`.
    pub s: f64,
    pub k: f64,
    /// Path minus minorant at the peak.
    pub h: f64,
    pub l: f64,
    pub r: f64,
    pub g_index: usize,
    pub d_index: usize,
    pub degenerate: bool,
}

impl StraddleInterval {
    fn degenerate_at(origin: usize) -> Self {
        StraddleInterval {
            g: 0.0,
            d: 0.0,
            t: 0.0,
            s: 0.0,
            k: 0.0,
            h: 0.0,
            l: 0.0,
            r: 0.0,
            g_index: origin,
            d_index: origin,
            degenerate: true,
        }
    }
}

fn require_origin(path: &CadlagPath) -> Result<usize> {
    path.origin_index()
        .ok_or_else(|| Error::InvalidPath("the grid has no sample at t = 0".into()))
}

pub fn straddle_interval(path: &CadlagPath, result: &MinorantResult) -> Result<StraddleInterval> {
    if result.len() != path.len() {
        return Err(Error::param("minorant result does not belong to this path"));
    }
    let origin = require_origin(path)?;
    if result.contact_mask[origin] {
        return Ok(StraddleInterval::degenerate_at(origin));
    }
    let alpha = result.alpha;
    let times = path.times();

    let g_index = (0..origin)
        .rev()
        .find(|&i| result.contact_mask[i])
        .ok_or_else(|| Error::Contaminated("no contact before 0 inside the window".into()))?;
    let d_index = (origin + 1..path.len())
        .find(|&i| result.contact_mask[i])
        .ok_or_else(|| Error::Contaminated("no contact after 0 inside the window".into()))?;
    if result.contaminated[g_index] || result.contaminated[d_index] {
        return Err(Error::Contaminated(format!(
            "straddling contacts at {} and {} fall in the guard band",
            times[g_index], times[d_index]
        )));
    }

    let (g, d) = (times[g_index], times[d_index]);
    let (wg, wd) = (path.lower(g_index), path.lower(d_index));
    let t = (wd - wg + alpha * (d + g)) / (2.0 * alpha);
    let peak_index = path.cell_index(t).expect("peak lies inside [g, d]");
    let h = path.values()[peak_index] - (wg + alpha * (t - g));
    let s = recipe_stop(path, alpha, origin)?.1;

    Ok(StraddleInterval {
        g,
        d,
        t,
        s,
        k: d - g,
        h,
        l: t - g,
        r: d - t,
        g_index,
        d_index,
        degenerate: false,
    })
}

/// Index and time of the recipe stopping point.
fn recipe_stop(path: &CadlagPath, alpha: f64, origin: usize) -> Result<(usize, f64)> {
    let times = path.times();
    let past_inf = (0..=origin)
        .map(|i| path.lower(i) - alpha * times[i])
        .fold(f64::INFINITY, f64::min);
    (origin + 1..path.len())
        .find(|&i| path.lower(i) - alpha * times[i] <= past_inf)
        .map(|i| (i, times[i]))
        .ok_or_else(|| Error::Contaminated("recipe stopping time lies beyond the window".into()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Recipe {
    pub s: f64,
    pub e: f64,
    pub s_index: usize,
    pub e_index: usize,
}

/// First contact after 0, found without computing the minorant.
///
/// `s` is the first time the line of slope `α` through the past infimum is
/// crossed; `e` is the first minimiser of `w(u) + α(u - s)` over `u >= s`.
/// The two agree with the first positive contact when `f(s) <= f(s-)`.
pub fn recipe_d(path: &CadlagPath, alpha: f64) -> Result<Recipe> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::param(format!("alpha must be positive and finite, got {alpha}")));
    }
    let origin = require_origin(path)?;
    let (s_index, s) = recipe_stop(path, alpha, origin)?;
    if let Some(left) = path.left_values()[s_index] {
        if path.values()[s_index] > left {
            return Err(Error::Precondition(format!(
                "upward jump at the stopping time {s}: f(s) = {} > f(s-) = {left}",
                path.values()[s_index]
            )));
        }
    }
    let times = path.times();
    let mut e_index = s_index;
    let mut best = path.lower(s_index);
    for i in s_index + 1..path.len() {
        let v = path.lower(i) + alpha * (times[i] - s);
        if v < best {
            best = v;
            e_index = i;
        }
    }
    if e_index == path.len() - 1 {
        return Err(Error::Contaminated("recipe minimiser sits on the window edge".into()));
    }
    Ok(Recipe {
        s,
        e: times[e_index],
        s_index,
        e_index,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapCheck {
    pub start: usize,
    pub end: usize,
    pub max_deviation: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SawtoothReport {
    pub gaps: Vec<GapCheck>,
}

impl SawtoothReport {
    pub fn all_pass(&self) -> bool {
        self.gaps.iter().all(|g| g.pass)
    }

    pub fn failures(&self) -> usize {
        self.gaps.iter().filter(|g| !g.pass).count()
    }
}

/// Checks that between consecutive contacts the minorant is a single tent of slopes `±α`.
pub fn sawtooth_check(path: &CadlagPath, result: &MinorantResult) -> SawtoothReport {
    let alpha = result.alpha;
    let times = path.times();
    let contacts: Vec<usize> = (0..result.len()).filter(|&i| result.contact_mask[i]).collect();
    let mut gaps = Vec::new();
    for pair in contacts.windows(2) {
        let (i, j) = (pair[0], pair[1]);
        if j == i + 1 {
            continue;
        }
        let (wi, wj) = (path.lower(i), path.lower(j));
        let mut max_deviation = 0.0_f64;
        let mut pass = true;
        for k in i + 1..j {
            let tent = (wi + alpha * (times[k] - times[i])).min(wj + alpha * (times[j] - times[k]));
            let dev = (result.m[k] - tent).abs();
            max_deviation = max_deviation.max(dev);
            if dev > 1e-9 * (1.0 + tent.abs()) {
                pass = false;
            }
        }
        gaps.push(GapCheck {
            start: i,
            end: j,
            max_deviation,
            pass,
        });
    }
    SawtoothReport { gaps }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(ts: &[f64], vs: &[f64]) -> CadlagPath {
        CadlagPath::continuous(ts.to_vec(), vs.to_vec()).unwrap()
    }

    #[test]
    fn constant_path_is_its_own_minorant() {
        let ts: Vec<f64> = (0..11).map(|i| i as f64 * 0.3 - 1.5).collect();
        let p = grid(&ts, &vec![3.0; 11]);
        let r = compute_minorant(&p, 1.0, 0.0).unwrap();
        assert!(r.m.iter().all(|&m| m == 3.0));
        assert!(r.contact_mask.iter().all(|&c| c));
        assert_eq!(extract_contact_set(&r), vec![0..11]);
    }

    #[test]
    fn absolute_value_with_shallow_cone() {
        let ts = [-2.0, -1.0, 0.0, 1.0, 2.0];
        let p = grid(&ts, &[2.0, 1.0, 0.0, 1.0, 2.0]);
        let r = compute_minorant(&p, 0.5, 0.0).unwrap();
        for (m, t) in r.m.iter().zip(ts) {
            assert_eq!(*m, 0.5 * t.abs());
        }
        assert_eq!(r.contact_mask, vec![false, false, true, false, false]);
        assert_eq!(extract_contact_set(&r), vec![2..3]);
        assert!(r.argmin_left.iter().skip(2).all(|&a| a == 2));
        assert!(r.argmin_right.iter().take(3).all(|&a| a == 2));
    }

    #[test]
    fn jump_uses_lower_limit() {
        // A downward spike carried only by the left limit still pins the minorant.
        let p = CadlagPath::new(vec![-1.0, 0.0, 1.0], vec![5.0, 5.0, 5.0], vec![None, Some(1.0), None]).unwrap();
        let r = compute_minorant(&p, 1.0, 0.0).unwrap();
        assert_eq!(r.m, vec![2.0, 1.0, 2.0]);
        assert_eq!(r.contact_mask, vec![false, true, false]);
    }

    #[test]
    fn ties_go_to_first_index() {
        let p = grid(&[0.0, 1.0, 2.0], &[0.0, 1.0, 0.0]);
        let r = compute_minorant(&p, 0.5, 0.0).unwrap();
        // At index 1 both apexes give 0.5.
        assert_eq!(r.m[1], 0.5);
        assert_eq!(r.argmin_left[1], 0);
        assert_eq!(r.argmin_right[1], 2);
        let flat = grid(&[0.0, 1.0, 2.0], &[0.0, 0.0, 0.0]);
        let r = compute_minorant(&flat, 1.0, 0.0).unwrap();
        assert_eq!(r.argmin_right, vec![0, 1, 2]);
        assert_eq!(r.argmin_left, vec![0, 1, 2]);
    }

    #[test]
    fn rejects_bad_parameters() {
        let p = grid(&[0.0, 1.0], &[0.0, 0.0]);
        assert!(matches!(compute_minorant(&p, 0.0, 0.0), Err(Error::InvalidParameter(_))));
        assert!(matches!(compute_minorant(&p, -1.0, 0.0), Err(Error::InvalidParameter(_))));
        assert!(matches!(compute_minorant(&p, 1.0, -0.1), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn guard_band_flags_edge_apexes() {
        let ts: Vec<f64> = (0..21).map(|i| i as f64 - 10.0).collect();
        // Deep minimum at the left edge drags the minorant there.
        let vs: Vec<f64> = ts.iter().map(|&t| if t == -10.0 { -5.0 } else { 0.0 }).collect();
        let p = grid(&ts, &vs);
        let r = compute_minorant(&p, 1.0, 2.0).unwrap();
        assert!(r.contaminated[0] && r.contaminated[1] && r.contaminated[4]);
        assert!(!r.contaminated[10]);
        assert!(r.contaminated[19] && r.contaminated[20]);
        let runs = extract_contact_set(&r);
        assert!(runs.iter().all(|run| run.clone().all(|i| !r.contaminated[i])));
    }

    #[test]
    fn default_guard_is_clipped() {
        let ts: Vec<f64> = (0..101).map(|i| i as f64 * 0.1 - 5.0).collect();
        let vs: Vec<f64> = ts.iter().map(|t| 100.0 * t.sin()).collect();
        let p = grid(&ts, &vs);
        assert!((default_guard(&p, 1.0) - 1.0).abs() < 1e-12);
        let flat = grid(&ts, &vec![0.0; 101]);
        assert_eq!(default_guard(&flat, 1.0), 0.0);
    }

    fn bump_path() -> CadlagPath {
        // Contacts at ±1 (value 0); everything in between sits high.
        let ts: Vec<f64> = (0..=40).map(|i| i as f64 * 0.1 - 2.0).collect();
        let vs: Vec<f64> = ts
            .iter()
            .map(|&t| if (t.abs() - 1.0).abs() < 1e-9 { 0.0 } else if t.abs() < 1.0 { 3.0 } else { 0.5 + (t.abs() - 1.0) })
            .collect();
        grid(&ts, &vs)
    }

    #[test]
    fn symmetric_bump_peaks_at_origin() {
        let p = bump_path();
        let r = compute_minorant(&p, 1.0, 0.0).unwrap();
        let s = straddle_interval(&p, &r).unwrap();
        assert!((s.g + 1.0).abs() < 1e-12 && (s.d - 1.0).abs() < 1e-12);
        assert!(s.t.abs() < 1e-12);
        assert!((s.k - 2.0).abs() < 1e-12);
        // Path value 3 at the peak, minorant 1.
        assert!((s.h - 2.0).abs() < 1e-12);
        assert!(s.g <= s.t && s.t <= s.s && s.s <= s.d);
        let recipe = recipe_d(&p, 1.0).unwrap();
        assert_eq!(recipe.e, s.d);
    }

    #[test]
    fn contact_at_origin_is_degenerate() {
        let p = grid(&[-1.0, 0.0, 1.0], &[1.0, 0.0, 1.0]);
        let r = compute_minorant(&p, 0.5, 0.0).unwrap();
        let s = straddle_interval(&p, &r).unwrap();
        assert!(s.degenerate);
        assert_eq!((s.g, s.d, s.t, s.s, s.k, s.h), (0.0, 0.0, 0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn straddle_requires_origin_and_interior_contacts() {
        let no_origin = grid(&[1.0, 2.0], &[0.0, 0.0]);
        let r = compute_minorant(&no_origin, 1.0, 0.0).unwrap();
        assert!(matches!(straddle_interval(&no_origin, &r), Err(Error::InvalidPath(_))));

        let p = bump_path();
        let r = compute_minorant(&p, 1.0, 1.5).unwrap();
        assert!(matches!(straddle_interval(&p, &r), Err(Error::Contaminated(_))));
    }

    #[test]
    fn recipe_on_staircase() {
        // Flat before 0, then a rising staircase with w(u) - u minimised at 0.
        let ts: Vec<f64> = (0..=20).map(|i| i as f64 * 0.5 - 5.0).collect();
        let vs: Vec<f64> = ts.iter().map(|&t| if t <= 0.0 { 0.0 } else { (t * 0.5).floor() * 0.5 + 1.0 }).collect();
        let p = grid(&ts, &vs);
        let rec = recipe_d(&p, 1.0).unwrap();
        // First positive grid time with w(t) <= t.
        let expected = ts.iter().zip(&vs).find(|(t, v)| **t > 0.0 && **v <= **t).map(|(t, _)| *t).unwrap();
        assert_eq!(rec.s, expected);
        let r = compute_minorant(&p, 1.0, 0.0).unwrap();
        let first_contact = (11..p.len()).find(|&i| r.contact_mask[i]).unwrap();
        assert_eq!(rec.e, ts[first_contact]);
    }

    #[test]
    fn recipe_reports_upward_jump_at_stop() {
        let ts = vec![-1.0, 0.0, 1.0, 2.0, 3.0];
        let vs = vec![0.0, 0.5, 0.5, 4.0, 5.0];
        // At t = 1 the left limit is -3 and the value 0.5: an upward jump.
        let lv = vec![None, None, Some(-3.0), None, None];
        let p = CadlagPath::new(ts, vs, lv).unwrap();
        assert!(matches!(recipe_d(&p, 1.0), Err(Error::Precondition(_))));
    }

    #[test]
    fn recipe_stop_beyond_window_is_contamination() {
        let p = grid(&[-1.0, 0.0, 1.0], &[0.0, 5.0, 10.0]);
        assert!(matches!(recipe_d(&p, 1.0), Err(Error::Contaminated(_))));
    }

    #[test]
    fn sawtooth_passes_on_scan_output_and_catches_tampering() {
        let p = bump_path();
        let mut r = compute_minorant(&p, 1.0, 0.0).unwrap();
        let report = sawtooth_check(&p, &r);
        assert!(!report.gaps.is_empty());
        assert!(report.all_pass());
        r.m[20] -= 0.3;
        let report = sawtooth_check(&p, &r);
        assert_eq!(report.failures(), 1);
    }
}
