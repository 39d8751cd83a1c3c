//! Lattice points on short arcs of conics: strip scanners for circles,
//! hyperbolas and divisor pairs, the near-square regime sets, shift-pattern
//! search with the Pell relation linking pattern points, and the
//! diophantine-approximation statistics (nearest-integer quality, rational
//! independence of square roots, effective Pell bounds).
//!
//! Scanners are exact integer enumerations; thresholds of the form
//! `6 N^(1/4) log^(kappa/4) N` are transcendental and therefore evaluated in
//! floating point, with membership decisions near a regime boundary flagged
//! rather than silently taken.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::arith::{divisors, isqrt, perfect_sqrt, squarefree_decompose, Surd};
use crate::error::{Error, Result};
use crate::qform::RepSet;

/// All `(m, n)` with `m^2 + n^2 = N` and `|n| <= t`; complete within the strip.
pub fn circle_strip(n: u64, t: f64) -> RepSet {
    let mut pts = Vec::new();
    if t >= 0.0 {
        let y_lim = (t.floor() as u128).min(isqrt(n as u128)) as i128;
        for y in 0..=y_lim {
            if let Some(s) = perfect_sqrt(n as i128 - y * y) {
                for m in if s == 0 { vec![0] } else { vec![s, -s] } {
                    for yy in if y == 0 { vec![0] } else { vec![y, -y] } {
                        pts.push((m, yy));
                    }
                }
            }
        }
    }
    RepSet::sorted(n as i128, pts, true, None)
}

/// All `(m, n)` with `m^2 - n^2 = N` and `|n| <= t`; complete within the
/// strip. Unlike the circle, the hyperbola is unbounded in `n`, so thresholds
/// beyond `2^33` are truncated there and flagged incomplete.
pub fn hyperbola_strip(n: u64, t: f64) -> RepSet {
    const Y_CAP: i128 = 1 << 33;
    let mut pts = Vec::new();
    let mut complete = true;
    let mut box_bound = None;
    if t >= 0.0 {
        let mut y_lim = t.floor().min(1e38) as i128;
        if y_lim > Y_CAP {
            y_lim = Y_CAP;
            complete = false;
            box_bound = Some(Y_CAP as u64);
        }
        for y in 0..=y_lim {
            if let Some(s) = perfect_sqrt(n as i128 + y * y) {
                for m in if s == 0 { vec![0] } else { vec![s, -s] } {
                    for yy in if y == 0 { vec![0] } else { vec![y, -y] } {
                        pts.push((m, yy));
                    }
                }
            }
        }
    }
    RepSet::sorted(n as i128, pts, complete, box_bound)
}

/// All `(m, n)` with `m n = N` and `|n - sqrt(N)| <= t`; complete within the
/// window (divisors are scanned directly when the window is short, through
/// the full divisor list otherwise).
pub fn divisor_window(n: u64, t: f64) -> Result<RepSet> {
    let sqrt_n = (n as f64).sqrt();
    let keep = |d: i128| -> bool { (d as f64 - sqrt_n).abs() <= t };
    let mut pts: Vec<(i128, i128)> = Vec::new();
    if t >= 0.0 {
        if t >= sqrt_n || t >= 1e9 {
            for d in divisors(n as i128)? {
                for dd in [d as i128, -(d as i128)] {
                    if keep(dd) {
                        pts.push((n as i128 / dd, dd));
                    }
                }
            }
        } else {
            let lo = ((sqrt_n - t).floor() as i128 - 2).max(1);
            let hi = ((sqrt_n + t).ceil() as i128 + 2).min(n as i128);
            for d in lo..=hi {
                if n as i128 % d == 0 && keep(d) {
                    pts.push((n as i128 / d, d));
                }
            }
        }
    }
    Ok(RepSet::sorted(n as i128, pts, true, None))
}

/// All lattice points on the circle `x^2 + y^2 = N`.
pub fn circle_points(n: u64) -> Vec<(i64, i64)> {
    circle_strip(n, (isqrt(n as u128) + 1) as f64)
        .reps
        .into_iter()
        .map(|(x, y)| (x as i64, y as i64))
        .collect()
}

/// Number of lattice points of `x^2 + y^2 = N` on the arc of length
/// `arc_len` (measured on the circle of radius `sqrt(N)`) centered at the
/// angle `center`.
pub fn arc_count(n: u64, center: f64, arc_len: f64) -> u64 {
    if arc_len <= 0.0 {
        return 0;
    }
    let half_angle = arc_len / (2.0 * (n as f64).sqrt());
    let mut count = 0u64;
    for (x, y) in circle_points(n) {
        if half_angle >= PI {
            count += 1;
            continue;
        }
        let theta = (y as f64).atan2(x as f64);
        let d = (theta - center).rem_euclid(2.0 * PI);
        if d.min(2.0 * PI - d) <= half_angle {
            count += 1;
        }
    }
    count
}

/// Maximum of [`arc_count`] over all arc positions, via a sliding window over
/// the sorted point angles.
pub fn max_arc_count(n: u64, arc_len: f64) -> u64 {
    let pts = circle_points(n);
    if pts.is_empty() || arc_len <= 0.0 {
        return 0;
    }
    let span = arc_len / (n as f64).sqrt();
    if span >= 2.0 * PI {
        return pts.len() as u64;
    }
    let mut angles: Vec<f64> = pts
        .iter()
        .map(|&(x, y)| (y as f64).atan2(x as f64).rem_euclid(2.0 * PI))
        .collect();
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let len = angles.len();
    let wrapped: Vec<f64> = angles
        .iter()
        .copied()
        .chain(angles.iter().map(|a| a + 2.0 * PI))
        .collect();
    let mut best = 0usize;
    let mut hi = 0usize;
    for lo in 0..len {
        if hi < lo {
            hi = lo;
        }
        while hi + 1 < lo + len && wrapped[hi + 1] - wrapped[lo] <= span {
            hi += 1;
        }
        best = best.max(hi - lo + 1);
    }
    best as u64
}

/// `N = R^2 + r` with `R` the nearest square root (ties toward `floor`),
/// minimizing `|r|`.
pub fn nearest_square_decomp(n: u64) -> (u64, i64) {
    let f = isqrt(n as u128) as u64;
    let r_lo = n as i128 - (f as i128) * (f as i128);
    let r_hi = n as i128 - (f as i128 + 1) * (f as i128 + 1);
    if r_lo.abs() <= r_hi.abs() {
        (f, r_lo as i64)
    } else {
        (f + 1, r_hi as i64)
    }
}

/// Membership of `N` in the near-square regimes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcRegime {
    pub n: u64,
    pub big_r: u64,
    pub r: i64,
    /// `|r| <= R^(1/2 - rho)`.
    pub in_s: bool,
    /// `|r| <= 16 exp(2 log^kappa N)`.
    pub in_e: bool,
    /// `|r| <= 4 exp(2 log^kappa N)`.
    pub in_f: bool,
    /// Set when `|r|` lies within `1e-6` relative of a threshold; such
    /// memberships should not be trusted silently.
    pub borderline: bool,
    pub kappa: f64,
    pub rho: f64,
}

fn near(x: f64, threshold: f64) -> bool {
    (x - threshold).abs() <= 1e-6 * threshold.abs().max(1e-300)
}

/// Computes the regime data for `N >= 2`, `0 < kappa < 1/2`, `0 < rho <= 1/2`.
pub fn regime_membership(n: u64, kappa: f64, rho: f64) -> Result<ArcRegime> {
    if n < 2 {
        return Err(Error::invalid("regime membership needs N >= 2"));
    }
    if !kappa.is_finite() || kappa <= 0.0 || kappa >= 0.5 {
        return Err(Error::invalid("kappa must lie in (0, 1/2)"));
    }
    if !rho.is_finite() || rho <= 0.0 || rho > 0.5 {
        return Err(Error::invalid("rho must lie in (0, 1/2]"));
    }
    let (big_r, r) = nearest_square_decomp(n);
    let abs_r = r.unsigned_abs() as f64;
    let s_thr = (big_r as f64).powf(0.5 - rho);
    let e_thr = 16.0 * (2.0 * (n as f64).ln().powf(kappa)).exp();
    let f_thr = e_thr / 4.0;
    Ok(ArcRegime {
        n,
        big_r,
        r,
        in_s: abs_r <= s_thr,
        in_e: abs_r <= e_thr,
        in_f: abs_r <= f_thr,
        borderline: near(abs_r, s_thr) || near(abs_r, e_thr) || near(abs_r, f_thr),
        kappa,
        rho,
    })
}

/// A strictly increasing sequence of positive shifts `h_1 < ... < h_l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternSpec {
    shifts: Vec<u64>,
}

impl PatternSpec {
    pub fn new(shifts: Vec<u64>) -> Result<Self> {
        if shifts.is_empty() {
            return Err(Error::invalid("pattern needs at least one shift"));
        }
        if shifts[0] == 0 || shifts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid(
                "shifts must be strictly increasing positive integers",
            ));
        }
        Ok(PatternSpec { shifts })
    }

    pub fn shifts(&self) -> &[u64] {
        &self.shifts
    }

    pub fn len(&self) -> usize {
        self.shifts.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// A realized pattern: for each shift `h_i` a lattice point
/// `(R - h_i, n_i)` on the circle of `N = R^2 + r`, with `n_i > 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternInstance {
    pub n: u64,
    pub big_r: u64,
    pub r: i64,
    /// `(h_i, n_i)` pairs, ascending in `h_i`.
    pub pairs: Vec<(u64, u64)>,
}

impl PatternInstance {
    /// Checks `(R - h_i)^2 + n_i^2 = N` for every pair.
    pub fn verify_circle(&self) -> bool {
        self.pairs.iter().all(|&(h, ni)| {
            h < self.big_r && {
                let m = self.big_r as i128 - h as i128;
                m * m + (ni as i128) * (ni as i128) == self.n as i128
            }
        })
    }

    /// The invariant value `h_ij = (h_i - h_j)(h_i h_j + r)`.
    pub fn h_ij(&self, i: usize, j: usize) -> i128 {
        let hi = self.pairs[i].0 as i128;
        let hj = self.pairs[j].0 as i128;
        (hi - hj) * (hi * hj + self.r as i128)
    }
}

/// Scans `lo..=hi` for every `N` realizing the pattern at the near-square
/// root `R` of `N`; instances come back ordered by `N`.
pub fn pattern_scan(spec: &PatternSpec, lo: u64, hi: u64) -> Vec<PatternInstance> {
    let mut out = Vec::new();
    for n in lo.max(1)..=hi {
        if let Some(inst) = pattern_at(spec, n) {
            out.push(inst);
        }
    }
    out
}

/// The pattern instance at a single `N`, when every shift is realized.
pub fn pattern_at(spec: &PatternSpec, n: u64) -> Option<PatternInstance> {
    let (big_r, r) = nearest_square_decomp(n);
    let mut pairs = Vec::with_capacity(spec.len());
    for &h in spec.shifts() {
        if h >= big_r {
            return None;
        }
        let m = big_r as i128 - h as i128;
        let v = n as i128 - m * m;
        if v <= 0 {
            return None;
        }
        match perfect_sqrt(v) {
            Some(s) if s > 0 => pairs.push((h, s as u64)),
            _ => return None,
        }
    }
    Some(PatternInstance {
        n,
        big_r,
        r,
        pairs,
    })
}

/// The infinite family realizing the shift pattern `(1, 2)`:
/// `N = (4j^3)^2 + (2j^2 + 1)^2` carries the three circle points
/// `(4j^3 - 1, 2j^2 + 2j)`, `(4j^3, 2j^2 + 1)`, `(4j^3 + 1, 2j^2 - 2j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyTriple {
    pub j: u64,
    pub n: u64,
    pub points: [(u64, u64); 3],
}

pub fn pattern_family(j: u64) -> Result<FamilyTriple> {
    if j == 0 {
        return Err(Error::NonPositive);
    }
    let j = j as u128;
    let cube = 4 * j * j * j;
    let n = cube * cube + (2 * j * j + 1) * (2 * j * j + 1);
    if n > u64::MAX as u128 {
        return Err(Error::Overflow("family target beyond 64-bit range"));
    }
    let pts = [
        (cube - 1, 2 * j * j + 2 * j),
        (cube, 2 * j * j + 1),
        (cube + 1, 2 * j * j - 2 * j),
    ];
    for &(x, y) in &pts {
        if x * x + y * y != n {
            return Err(Error::Internal(format!("family point off circle at j={j}")));
        }
    }
    Ok(FamilyTriple {
        j: j as u64,
        n: n as u64,
        points: pts.map(|(x, y)| (x as u64, y as u64)),
    })
}

impl FamilyTriple {
    /// The family triple as a pattern instance for `h = (1, 2)` anchored at
    /// `R = 4j^3 + 1` (not necessarily the nearest square root of `N`).
    pub fn instance(&self) -> PatternInstance {
        let big_r = self.points[2].0;
        let r = self.n as i128 - (big_r as i128) * (big_r as i128);
        PatternInstance {
            n: self.n,
            big_r,
            r: r as i64,
            pairs: vec![
                (1, self.points[1].1),
                (2, self.points[0].1),
            ],
        }
    }
}

/// Both sides of the Pell relation `h_i n_j^2 - h_j n_i^2 = (h_i - h_j)(h_i h_j + r)`
/// together with the strip bounds `R h < n^2 < 3 R h` for the two indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PellCheck {
    pub lhs: i128,
    pub rhs: i128,
    pub equal: bool,
    /// `(h, R h < n^2 < 3 R h)` for the two indices, reported not asserted.
    pub strip_bounds: [(u64, bool); 2],
    /// Whether `R` is in the asymptotic regime `R^(rho eps) >= h_l^(100 l)`
    /// (evaluated at `rho = 1/2`) under which the strip bounds are
    /// guaranteed; at desk scale it essentially never is.
    pub asymptotic_regime: bool,
}

/// Evaluates the Pell relation for pair indices `i < j` of an instance.
pub fn pell_relation_check(inst: &PatternInstance, i: usize, j: usize) -> Result<PellCheck> {
    if i >= j || j >= inst.pairs.len() {
        return Err(Error::invalid("need indices i < j inside the instance"));
    }
    let (hi, ni) = inst.pairs[i];
    let (hj, nj) = inst.pairs[j];
    let (hi, ni, hj, nj) = (hi as i128, ni as i128, hj as i128, nj as i128);
    let lhs = hi
        .checked_mul(nj * nj)
        .and_then(|t| t.checked_sub(hj * ni * ni))
        .ok_or(Error::Overflow("Pell relation"))?;
    let rhs = (hi - hj) * (hi * hj + inst.r as i128);
    let strip = |h: i128, nn: i128| -> bool {
        let rr = inst.big_r as i128;
        rr * h < nn * nn && nn * nn < 3 * rr * h
    };
    let l = inst.pairs.len() as u32;
    let h_last = inst.pairs.last().unwrap().0;
    // rho = 1/2 gives eps = min(1, l-2)/4; the condition R^(rho eps) >= h_l^(100 l).
    let eps = 1f64.min((l as f64 - 2.0) / 4.0).max(0.0) * 0.5;
    let asymptotic_regime = (inst.big_r as f64).powf(0.5 * eps)
        >= (h_last as f64).powf(100.0 * l as f64);
    Ok(PellCheck {
        lhs,
        rhs,
        equal: lhs == rhs,
        strip_bounds: [
            (hi as u64, strip(hi, ni)),
            (hj as u64, strip(hj, nj)),
        ],
        asymptotic_regime,
    })
}

/// Near-square context `(R, rho)` supplying the distance bound
/// `2 h_l^2 R^(-rho)` that genuine instances must respect.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeContext {
    pub big_r: u64,
    pub rho: f64,
}

/// The simultaneous-approximation quality statistic
/// `n_l^(1+eps) * prod_i ||sqrt(h_i/h_l) n_l||`.
#[derive(Debug, Clone, PartialEq)]
pub struct QualityReport {
    pub quality: f64,
    /// `||sqrt(h_i/h_l) n_l||` for `i = 1..l-1`.
    pub per_term: Vec<f64>,
    /// `2 h_l^2 R^(-rho)` when instance context was supplied.
    pub regime_bound: Option<f64>,
}

/// Evaluates the quality statistic via exact surd arithmetic; needs `l >= 2`.
pub fn approx_quality(
    spec: &PatternSpec,
    n_last: u64,
    eps: f64,
    context: Option<RegimeContext>,
) -> Result<QualityReport> {
    if spec.len() < 2 {
        return Err(Error::invalid("quality statistic needs at least two shifts"));
    }
    if n_last == 0 {
        return Err(Error::NonPositive);
    }
    if !eps.is_finite() || eps <= 0.0 {
        return Err(Error::NonPositive);
    }
    let h_last = *spec.shifts().last().unwrap();
    let mut per_term = Vec::with_capacity(spec.len() - 1);
    let mut quality = (n_last as f64).powf(1.0 + eps);
    for &h in &spec.shifts()[..spec.len() - 1] {
        let dist = Surd::new(h, h_last)?.nearest_int_distance(n_last);
        per_term.push(dist.value());
        quality *= dist.value();
    }
    let regime_bound = context
        .map(|c| 2.0 * (h_last as f64) * (h_last as f64) * (c.big_r as f64).powf(-c.rho));
    Ok(QualityReport {
        quality,
        per_term,
        regime_bound,
    })
}

/// True exactly when the squarefree parts of the shifts are pairwise
/// distinct, i.e. when `1, sqrt(h_1/h_l), ..., sqrt(h_{l-1}/h_l)` are
/// linearly independent over the rationals.
pub fn besicovitch_independent(spec: &PatternSpec) -> Result<bool> {
    if spec.len() < 2 {
        return Err(Error::invalid("independence needs at least two shifts"));
    }
    let mut seen = std::collections::BTreeSet::new();
    for &h in spec.shifts() {
        if !seen.insert(squarefree_decompose(h)?.squarefree) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Parameters of the simultaneous Pell system `x^2 - a y^2 = u`,
/// `z^2 - b y^2 = v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BugeaudParams {
    pub a: u64,
    pub b: u64,
    pub u: i64,
    pub v: i64,
    /// The effective absolute constant, caller-supplied.
    pub c: f64,
}

impl BugeaudParams {
    pub fn new(a: u64, b: u64, u: i64, v: i64, c: f64) -> Result<Self> {
        if a == 0 || b == 0 {
            return Err(Error::NonPositive);
        }
        for (name, x) in [("a", a as u128), ("b", b as u128), ("ab", a as u128 * b as u128)] {
            let sd = squarefree_decompose(u128_to_u64(x)?)?;
            if sd.squarefree == 1 {
                return Err(Error::invalid(format!("{name} must not be a perfect square")));
            }
        }
        if u == 0 || v == 0 {
            return Err(Error::ZeroInput);
        }
        if !c.is_finite() || c <= 0.0 {
            return Err(Error::NonPositive);
        }
        Ok(BugeaudParams { a, b, u, v, c })
    }
}

fn u128_to_u64(x: u128) -> Result<u64> {
    u64::try_from(x).map_err(|_| Error::Overflow("Pell parameter product"))
}

/// The size bound, kept in log scale: solutions satisfy
/// `max(x, y, z) <= max(|u|, |v|, 2)^exponent` with
/// `exponent = C sqrt(ab) log(a) log(b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BugeaudBound {
    pub exponent: f64,
    /// `exponent * log(max(|u|, |v|, 2))`.
    pub log_bound: f64,
}

pub fn bugeaud_bound(params: &BugeaudParams) -> Result<BugeaudBound> {
    let a = params.a as f64;
    let b = params.b as f64;
    let exponent = params.c * (a * b).sqrt() * a.ln() * b.ln();
    let base = (params.u.unsigned_abs().max(params.v.unsigned_abs()).max(2)) as f64;
    Ok(BugeaudBound {
        exponent,
        log_bound: exponent * base.ln(),
    })
}

/// One row of the strip census: exact cardinalities of the three strip sets
/// at the regime thresholds, for `N` in the regime set `E`.
#[derive(Debug, Clone, PartialEq)]
pub struct CensusRow {
    pub n: u64,
    pub big_r: u64,
    pub r: i64,
    pub in_e: bool,
    pub in_f: bool,
    pub borderline: bool,
    /// `6 N^(1/4) log^(kappa/4) N`.
    pub strip_threshold: f64,
    /// `2 N^(1/4) log^(kappa/4) N`.
    pub window_threshold: f64,
    pub circle_count: u64,
    pub hyperbola_count: u64,
    pub divisor_count: u64,
}

/// The census row for a single `N`; `None` when `N` is not in `E`.
pub fn census_row(n: u64, kappa: f64) -> Result<Option<CensusRow>> {
    if n < 2 {
        return Err(Error::invalid("census needs N >= 2"));
    }
    if !kappa.is_finite() || kappa <= 0.0 || kappa >= 0.5 {
        return Err(Error::invalid("kappa must lie in (0, 1/2)"));
    }
    let (big_r, r) = nearest_square_decomp(n);
    let abs_r = r.unsigned_abs() as f64;
    let e_thr = 16.0 * (2.0 * (n as f64).ln().powf(kappa)).exp();
    let f_thr = e_thr / 4.0;
    if abs_r > e_thr {
        return Ok(None);
    }
    let quarter = (n as f64).powf(0.25) * (n as f64).ln().powf(kappa / 4.0);
    let strip_threshold = 6.0 * quarter;
    let window_threshold = 2.0 * quarter;
    Ok(Some(CensusRow {
        n,
        big_r,
        r,
        in_e: true,
        in_f: abs_r <= f_thr,
        borderline: near(abs_r, e_thr) || near(abs_r, f_thr),
        strip_threshold,
        window_threshold,
        circle_count: circle_strip(n, strip_threshold).reps.len() as u64,
        hyperbola_count: hyperbola_strip(n, strip_threshold).reps.len() as u64,
        divisor_count: divisor_window(n, window_threshold)?.reps.len() as u64,
    }))
}

/// Census over an inclusive range, ordered by `N`.
pub fn strip_census(lo: u64, hi: u64, kappa: f64) -> Result<Vec<CensusRow>> {
    let mut rows = Vec::new();
    for n in lo.max(2)..=hi {
        if let Some(row) = census_row(n, kappa)? {
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Running maxima, witnesses, and count histograms of a census.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CensusSummary {
    pub rows: u64,
    pub max_circle: u64,
    pub argmax_circle: u64,
    pub max_hyperbola: u64,
    pub argmax_hyperbola: u64,
    pub max_divisor: u64,
    pub argmax_divisor: u64,
    pub circle_hist: BTreeMap<u64, u64>,
    pub hyperbola_hist: BTreeMap<u64, u64>,
    pub divisor_hist: BTreeMap<u64, u64>,
}

pub fn census_summary(rows: &[CensusRow]) -> CensusSummary {
    let mut s = CensusSummary::default();
    for row in rows {
        s.rows += 1;
        if row.circle_count > s.max_circle {
            s.max_circle = row.circle_count;
            s.argmax_circle = row.n;
        }
        if row.hyperbola_count > s.max_hyperbola {
            s.max_hyperbola = row.hyperbola_count;
            s.argmax_hyperbola = row.n;
        }
        if row.divisor_count > s.max_divisor {
            s.max_divisor = row.divisor_count;
            s.argmax_divisor = row.n;
        }
        *s.circle_hist.entry(row.circle_count).or_default() += 1;
        *s.hyperbola_hist.entry(row.hyperbola_count).or_default() += 1;
        *s.divisor_hist.entry(row.divisor_count).or_default() += 1;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_traits::ToPrimitive;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rayon::prelude::*;

    #[test]
    fn circle_strip_examples() {
        assert_eq!(circle_strip(25, 3.0).reps.len(), 6);
        assert_eq!(circle_strip(25, 5.0).reps.len(), 12);
        assert!(circle_strip(3, 100.0).reps.is_empty());
    }

    #[test]
    fn hyperbola_strip_examples() {
        assert_eq!(hyperbola_strip(16, 3.0).reps.len(), 6);
        assert!(hyperbola_strip(2, 50.0).reps.is_empty());
        assert_eq!(hyperbola_strip(1, 0.0).reps, vec![(-1, 0), (1, 0)]);
    }

    #[test]
    fn divisor_window_examples() {
        let w = divisor_window(36, 2.0).unwrap();
        assert_eq!(w.reps, vec![(6, 6), (9, 4)]);
        let w = divisor_window(97, 3.0).unwrap(); // prime, sqrt ~ 9.8
        assert!(w.reps.is_empty());
        let w = divisor_window(36, 0.0).unwrap();
        assert_eq!(w.reps, vec![(6, 6)]);
    }

    #[test]
    fn strips_match_brute_force_to_2000() {
        for n in 1u64..=2000 {
            for t in [
                (n as f64).powf(0.24),
                (n as f64).powf(0.25),
                6.0 * (n as f64).powf(0.25),
            ] {
                let circle = circle_strip(n, t);
                let mut brute = Vec::new();
                let lim = isqrt(n as u128) as i128;
                for x in -lim..=lim {
                    for y in -lim..=lim {
                        if x * x + y * y == n as i128 && (y.abs() as f64) <= t {
                            brute.push((x, y));
                        }
                    }
                }
                assert_eq!(circle.reps, brute, "circle N={n} t={t}");

                let hyp = hyperbola_strip(n, t);
                let mut brute = Vec::new();
                let ylim = t.floor() as i128;
                for y in -ylim..=ylim {
                    if let Some(x) = perfect_sqrt(n as i128 + y * y) {
                        for xx in if x == 0 { vec![0] } else { vec![x, -x] } {
                            brute.push((xx, y));
                        }
                    }
                }
                brute.sort_unstable();
                brute.dedup();
                assert_eq!(hyp.reps, brute, "hyperbola N={n} t={t}");

                let win = divisor_window(n, t).unwrap();
                let mut brute = Vec::new();
                let s = (n as f64).sqrt();
                for d in divisors(n as i128).unwrap() {
                    for dd in [d as i128, -(d as i128)] {
                        if (dd as f64 - s).abs() <= t {
                            brute.push((n as i128 / dd, dd));
                        }
                    }
                }
                brute.sort_unstable();
                assert_eq!(win.reps, brute, "window N={n} t={t}");
            }
        }
    }

    #[test]
    fn arc_count_examples() {
        assert_eq!(arc_count(25, 0.0, 3.0), 1);
        assert_eq!(arc_count(25, 0.0, 2.0 * PI * 5.0), 12);
        assert_eq!(arc_count(3, 0.0, 100.0), 0);
    }

    #[test]
    fn max_arc_count_dominates_fixed_centers() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5d5d_000e);
        for _ in 0..200 {
            let n: u64 = rng.gen_range(1..=5000);
            let len: f64 = rng.gen_range(0.1..50.0);
            let best = max_arc_count(n, len);
            for _ in 0..10 {
                let center: f64 = rng.gen_range(-4.0..4.0);
                assert!(arc_count(n, center, len) <= best, "N={n} len={len}");
            }
            // centering the arc at an actual lattice point must realize >= 1
            if let Some(&(x, y)) = circle_points(n).first() {
                let theta = (y as f64).atan2(x as f64);
                assert!(arc_count(n, theta, len) >= 1);
                assert!(best >= 1);
            }
        }
    }

    #[test]
    fn short_arc_maximum_stable_under_doubling() {
        // max over N of the short-arc count at L = N^0.24, stable under
        // doubling of the range end
        let max_to = |end: u64| -> u64 {
            (2..=end)
                .into_par_iter()
                .map(|n| max_arc_count(n, (n as f64).powf(0.24)))
                .max()
                .unwrap()
        };
        let half = max_to(500_000);
        let full = max_to(1_000_000);
        assert_eq!(half, full, "short-arc maximum moved when doubling the range");
    }

    #[test]
    fn nearest_square_examples() {
        assert_eq!(nearest_square_decomp(1105), (33, 16));
        assert_eq!(nearest_square_decomp(1089), (33, 0));
        assert_eq!(nearest_square_decomp(1156), (34, 0));
        // tie r = +-(R) broken toward floor: N = R^2 + R vs (R+1)^2 - (R+1)
        assert_eq!(nearest_square_decomp(12), (3, 3)); // 12 = 9+3 = 16-4
        for n in 1u64..=100_000 {
            let (big_r, r) = nearest_square_decomp(n);
            assert_eq!(big_r as i128 * big_r as i128 + r as i128, n as i128);
            let f = isqrt(n as u128) as i128;
            let alt = (n as i128 - f * f).min(((f + 1) * (f + 1) - n as i128).abs());
            assert_eq!(r.unsigned_abs() as i128, alt);
        }
    }

    #[test]
    fn regime_membership_examples() {
        let reg = regime_membership(1105, 0.49, 0.25).unwrap();
        assert_eq!((reg.big_r, reg.r), (33, 16));
        assert!(reg.in_e && reg.in_f);

        let reg = regime_membership(1089, 0.49, 0.25).unwrap();
        assert_eq!(reg.r, 0);
        assert!(reg.in_s && reg.in_e && reg.in_f);

        assert!(regime_membership(1, 0.49, 0.25).is_err());
        assert!(regime_membership(10, 0.6, 0.25).is_err());
    }

    #[test]
    fn pattern_scan_finds_1105() {
        let spec = PatternSpec::new(vec![1, 2]).unwrap();
        let found = pattern_scan(&spec, 1000, 1200);
        let inst = found.iter().find(|i| i.n == 1105).expect("1105 realizes (1,2)");
        assert_eq!(inst.big_r, 33);
        assert_eq!(inst.pairs, vec![(1, 9), (2, 12)]);
        assert!(inst.verify_circle());
    }

    #[test]
    fn pattern_scan_single_shift_and_empty() {
        let spec = PatternSpec::new(vec![1]).unwrap();
        assert!(!pattern_scan(&spec, 2, 2000).is_empty());

        let impossible = PatternSpec::new(vec![1, 2, 3, 4, 5]).unwrap();
        assert!(pattern_scan(&impossible, 2, 50).is_empty());
    }

    #[test]
    fn family_examples() {
        let fam = pattern_family(2).unwrap();
        assert_eq!(fam.n, 1105);
        assert_eq!(fam.points, [(31, 12), (32, 9), (33, 4)]);

        let fam = pattern_family(1).unwrap();
        assert_eq!(fam.n, 25);
        assert_eq!(fam.points, [(3, 4), (4, 3), (5, 0)]);

        for j in 1..=1000u64 {
            let fam = pattern_family(j).unwrap();
            for (x, y) in fam.points {
                assert_eq!(
                    (x as u128) * (x as u128) + (y as u128) * (y as u128),
                    fam.n as u128
                );
            }
        }
    }

    #[test]
    fn family_instance_satisfies_pell_relation() {
        for j in 1..=1000u64 {
            let inst = pattern_family(j).unwrap().instance();
            assert!(inst.verify_circle(), "j={j}");
            let check = pell_relation_check(&inst, 0, 1).unwrap();
            assert!(check.equal, "j={j}: {} vs {}", check.lhs, check.rhs);
        }
        // j = 1: N = 25, R = 5, r = 0, pairs (1,3), (2,4)
        let inst = pattern_family(1).unwrap().instance();
        let check = pell_relation_check(&inst, 0, 1).unwrap();
        assert_eq!(check.lhs, 16 - 2 * 9);
        assert_eq!(check.rhs, -2);
    }

    #[test]
    fn pell_check_on_scanned_1105() {
        let spec = PatternSpec::new(vec![1, 2]).unwrap();
        let inst = pattern_at(&spec, 1105).unwrap();
        let check = pell_relation_check(&inst, 0, 1).unwrap();
        assert_eq!(check.lhs, -18); // 1*144 - 2*81
        assert_eq!(check.rhs, -18); // (1-2)(2+16)
        assert!(check.equal);
        assert!(!check.asymptotic_regime);
    }

    #[test]
    fn pell_check_detects_synthetic_violation() {
        let fake = PatternInstance {
            n: 1105,
            big_r: 33,
            r: 16,
            pairs: vec![(1, 9), (2, 13)], // (31, 13) is off the circle
        };
        assert!(!fake.verify_circle());
        let check = pell_relation_check(&fake, 0, 1).unwrap();
        assert!(!check.equal);
    }

    #[test]
    fn pell_relation_exact_over_scan() {
        let spec = PatternSpec::new(vec![1, 2]).unwrap();
        let found = pattern_scan(&spec, 2, 200_000);
        assert!(!found.is_empty());
        for inst in &found {
            assert!(inst.verify_circle());
            let check = pell_relation_check(inst, 0, 1).unwrap();
            assert!(check.equal, "N={}", inst.n);
            assert_eq!(check.lhs, inst.h_ij(0, 1));
        }
    }

    #[test]
    fn quality_examples() {
        // h = (1, 2), n = 12, eps = 0.25: 12^1.25 * ||12/sqrt(2)|| ~ 10.84
        let spec = PatternSpec::new(vec![1, 2]).unwrap();
        let q = approx_quality(&spec, 12, 0.25, None).unwrap();
        assert!((q.per_term[0] - 0.485_281_374_238_57).abs() < 1e-12);
        assert!((q.quality - 10.84).abs() < 0.01);

        // rational slope: ||n/2|| is 0 or 1/2
        let spec = PatternSpec::new(vec![1, 4]).unwrap();
        let q = approx_quality(&spec, 12, 0.25, None).unwrap();
        assert_eq!(q.per_term[0], 0.0);
        assert_eq!(q.quality, 0.0);
        let q = approx_quality(&spec, 13, 0.25, None).unwrap();
        assert!((q.per_term[0] - 0.5).abs() < 1e-15);

        // family instance context supplies the distance bound
        let inst = pattern_family(5).unwrap().instance();
        let spec = PatternSpec::new(vec![1, 2]).unwrap();
        let n_last = inst.pairs[1].1;
        let q = approx_quality(
            &spec,
            n_last,
            0.25,
            Some(RegimeContext {
                big_r: inst.big_r,
                rho: 0.25,
            }),
        )
        .unwrap();
        assert!(q.regime_bound.unwrap() > 0.0);
    }

    #[test]
    fn distance_bound_holds_over_scan() {
        // per-term distance <= 2 h_l^2 R^(-rho) with rho fitted to |r|
        let spec = PatternSpec::new(vec![1, 2]).unwrap();
        let scanned = pattern_scan(&spec, 2, 1_000_000);
        assert!(scanned.len() > 50, "expected a populated scan");
        for inst in scanned {
            let abs_r = inst.r.unsigned_abs().max(1) as f64;
            let big_r = inst.big_r as f64;
            let rho = (0.5 - abs_r.ln() / big_r.ln()).min(0.5);
            if rho <= 0.0 {
                continue; // no valid rho: |r| >= sqrt(R)
            }
            let n_last = inst.pairs[1].1;
            let q = approx_quality(
                &spec,
                n_last,
                0.25,
                Some(RegimeContext {
                    big_r: inst.big_r,
                    rho,
                }),
            )
            .unwrap();
            let bound = q.regime_bound.unwrap();
            for &term in &q.per_term {
                assert!(
                    term <= bound + 1e-9,
                    "N={}: term {} above bound {} at rho {}",
                    inst.n,
                    term,
                    bound,
                    rho
                );
            }
        }
    }

    #[test]
    fn besicovitch_examples() {
        let t = |v: Vec<u64>| besicovitch_independent(&PatternSpec::new(v).unwrap()).unwrap();
        assert!(t(vec![1, 2, 3]));
        assert!(!t(vec![2, 8])); // squarefree parts 2, 2
        assert!(!t(vec![4, 9])); // both 1: sqrt(4/9) rational
    }

    /// Fixed-point sqrt oracle: floor(sqrt(h) * 2^96) as i128.
    fn sqrt_fixed(h: u64) -> i128 {
        let big: BigInt = BigInt::from(h) << 192usize;
        big.sqrt().to_i128().unwrap()
    }

    #[test]
    fn besicovitch_agrees_with_dependence_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5d5d_000f);
        for trial in 0..1000 {
            let l = if trial % 20 == 0 { 4 } else { rng.gen_range(2..=3) };
            let mut shifts: Vec<u64> = Vec::new();
            while shifts.len() < l {
                let h = rng.gen_range(1..=60);
                if !shifts.contains(&h) {
                    shifts.push(h);
                }
            }
            shifts.sort_unstable();
            let spec = PatternSpec::new(shifts.clone()).unwrap();
            let claim = besicovitch_independent(&spec).unwrap();

            // direct dependence search: c in [-20, 20]^l, nonzero, over
            // sum c_i sqrt(h_i) evaluated in 96-bit fixed point. True nonzero
            // sums exceed 2^-64 by the conjugate-product bound, the fixed
            // point error stays below 20*l, so |sum| <= 2^16 detects zero.
            let roots: Vec<i128> = shifts.iter().map(|&h| sqrt_fixed(h)).collect();
            let mut dependent = false;
            let mut c = vec![-20i128; l];
            'search: loop {
                if c.iter().any(|&x| x != 0) {
                    let sum: i128 = c.iter().zip(&roots).map(|(&ci, &ri)| ci * ri).sum();
                    if sum.abs() <= 1 << 16 {
                        dependent = true;
                        break 'search;
                    }
                }
                let mut idx = 0;
                loop {
                    if idx == l {
                        break 'search;
                    }
                    c[idx] += 1;
                    if c[idx] <= 20 {
                        break;
                    }
                    c[idx] = -20;
                    idx += 1;
                }
            }
            assert_eq!(
                claim, !dependent,
                "shifts {shifts:?}: criterion {claim}, search dependent {dependent}"
            );
        }
    }

    #[test]
    fn bugeaud_examples() {
        let p = BugeaudParams::new(2, 3, 1, 1, 1.0).unwrap();
        let b = bugeaud_bound(&p).unwrap();
        assert!((b.log_bound - 1.292918).abs() < 1e-4);

        // max(|u|,|v|,2) = 2 whenever u = v = 1
        assert!((b.log_bound - b.exponent * 2f64.ln()).abs() < 1e-15);

        assert!(BugeaudParams::new(2, 8, 1, 1, 1.0).is_err()); // ab = 16 square
        assert!(BugeaudParams::new(4, 3, 1, 1, 1.0).is_err());
        assert!(BugeaudParams::new(2, 3, 0, 1, 1.0).is_err());
    }

    #[test]
    fn census_small_values() {
        let row = census_row(1105, 0.49).unwrap().expect("1105 is in E");
        assert!(row.in_e && row.in_f);
        // counts recomputed by the strip scanners at the same thresholds
        assert_eq!(
            row.circle_count,
            circle_strip(1105, row.strip_threshold).reps.len() as u64
        );

        let row = census_row(25, 0.49).unwrap().expect("25 is in E");
        // strip threshold ~ 15.5 holds the full circle of 12 points
        assert_eq!(row.circle_count, 12);
        assert_eq!(row.hyperbola_count, 6); // (+-5,0) and (+-13,+-12)
        assert_eq!(row.divisor_count, 2); // divisors 1 and 5 within |d-5| <= 5.16
    }

    #[test]
    fn census_range_is_ordered_and_summarized() {
        let rows = strip_census(2, 2000, 0.49).unwrap();
        assert!(rows.windows(2).all(|w| w[0].n < w[1].n));
        let summary = census_summary(&rows);
        assert_eq!(summary.rows, rows.len() as u64);
        assert!(summary.max_circle >= 8); // e.g. 325 = 1^2+18^2 = 6^2+17^2 = 10^2+15^2
        let hist_total: u64 = summary.circle_hist.values().sum();
        assert_eq!(hist_total, summary.rows);
    }

    #[test]
    fn empty_census_range() {
        let rows = strip_census(10, 9, 0.49).unwrap();
        assert!(rows.is_empty());
        let summary = census_summary(&rows);
        assert_eq!(summary.rows, 0);
    }
}
