//! Discrete fractional integral sums along a quadratic phase polynomial: the
//! inner sums `sum 1/|m|^lambda` over representation sets, application of the
//! operator `I f(n) = sum_{m != 0} f(P(m,n)) / |m|^lambda` to finitely
//! supported signals, and the explicit witness computations (shifted-circle
//! identity, the divisor counterexample for `c = 0`, the off-diagonal
//! sharpness witness).
//!
//! Exactness lives in the integer layer; real accumulation uses compensated
//! (Kahan) summation in a deterministic order, and every sum carries a
//! completeness flag plus the cutoff it was computed with.

use std::collections::BTreeMap;

use crate::arith::{divisors, perfect_sqrt, primes_up_to};
use crate::error::{Error, Result};
use crate::qform::{representations, FormClass, QuadForm};
use crate::reduce::{correspond, gamma_solvable, poly_representations, QuadPoly};

/// Operator parameters: the exponent `lambda` in `(0, 1]`, the Lebesgue
/// exponent `p >= 1`, and the `|m|` cutoff used when a sum is truncated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DfiParams {
    pub lambda: f64,
    pub p: f64,
    pub cutoff: u64,
}

impl DfiParams {
    pub fn new(lambda: f64, p: f64, cutoff: u64) -> Result<Self> {
        if !lambda.is_finite() || lambda <= 0.0 || lambda > 1.0 {
            return Err(Error::invalid("lambda must lie in (0, 1]"));
        }
        if !p.is_finite() || p < 1.0 {
            return Err(Error::invalid("p must be at least 1"));
        }
        if cutoff == 0 {
            return Err(Error::invalid("cutoff must be at least 1"));
        }
        Ok(DfiParams { lambda, p, cutoff })
    }
}

/// A finitely supported real-valued signal on the integers.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FiniteSignal {
    values: BTreeMap<i128, f64>,
}

impl FiniteSignal {
    /// Unit point mass at `k`.
    pub fn delta(k: i128) -> Self {
        let mut values = BTreeMap::new();
        values.insert(k, 1.0);
        FiniteSignal { values }
    }

    /// Signal from `(k, value)` pairs; repeated keys accumulate.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (i128, f64)>) -> Self {
        let mut values = BTreeMap::new();
        for (k, v) in pairs {
            *values.entry(k).or_insert(0.0) += v;
        }
        values.retain(|_, v| *v != 0.0);
        FiniteSignal { values }
    }

    pub fn get(&self, k: i128) -> f64 {
        self.values.get(&k).copied().unwrap_or(0.0)
    }

    pub fn support(&self) -> impl Iterator<Item = (&i128, &f64)> {
        self.values.iter()
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        let mut acc = KahanSum::new();
        for v in self.values.values() {
            acc.add(v.abs().powf(p));
        }
        acc.value().powf(1.0 / p)
    }
}

/// Compensated summation; the accumulation order is the caller's enumeration
/// order, which is deterministic throughout this crate.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// A real sum with truncation metadata.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumResult {
    pub value: f64,
    /// True when the enumeration provably exhausted every solution with
    /// `0 < |m| <= cutoff` *and* no solution beyond the cutoff was dropped.
    pub complete: bool,
    pub cutoff: u64,
    pub terms: u64,
}

/// `sum 1/|m|^lambda` over `{(m,n) : P(m,n) = k, 0 < |m| <= cutoff}`.
///
/// Complete for negative discriminant and for square discriminant with
/// `k != gamma` (finitely many representations, all enumerated); truncated for
/// positive nonsquare discriminant and along the solution lines of
/// `k = gamma`.
pub fn s_lambda_sum(poly: &QuadPoly, k: i128, params: &DfiParams) -> Result<SumResult> {
    let lambda = params.lambda;
    let cutoff = params.cutoff;
    let class = poly.form().classify().class;
    match class {
        FormClass::Zero => Err(Error::ZeroDiscriminant),
        FormClass::Negative => {
            let reps = poly_representations(poly, k, None)?;
            let mut acc = KahanSum::new();
            let mut terms = 0u64;
            let mut dropped = false;
            for &(m, _) in &reps.reps {
                if m == 0 {
                    continue;
                }
                if m.unsigned_abs() > cutoff as u128 {
                    dropped = true;
                    continue;
                }
                acc.add(inv_pow(m, lambda));
                terms += 1;
            }
            Ok(SumResult {
                value: acc.value(),
                complete: !dropped,
                cutoff,
                terms,
            })
        }
        FormClass::PositiveSquare { .. } => {
            let corr = correspond(poly, k)?;
            if corr.k_prime != 0 {
                let reps = poly_representations(poly, k, None)?;
                let mut acc = KahanSum::new();
                let mut terms = 0u64;
                let mut dropped = false;
                for &(m, _) in &reps.reps {
                    if m == 0 {
                        continue;
                    }
                    if m.unsigned_abs() > cutoff as u128 {
                        dropped = true;
                        continue;
                    }
                    acc.add(inv_pow(m, lambda));
                    terms += 1;
                }
                Ok(SumResult {
                    value: acc.value(),
                    complete: !dropped,
                    cutoff,
                    terms,
                })
            } else {
                line_strip_sum(poly, lambda, cutoff)
            }
        }
        FormClass::PositiveNonsquare => {
            // Enumerate the strip |m| <= cutoff directly: for fixed m the
            // equation is an honest quadratic in n (c != 0 here).
            let (a, b, c, d, e, f) = poly.coeffs();
            let (a, b, c, d, e, f) = (
                a as i128, b as i128, c as i128, d as i128, e as i128, f as i128,
            );
            let mut acc = KahanSum::new();
            let mut terms = 0u64;
            for mm in 1..=cutoff as i128 {
                for m in [mm, -mm] {
                    let bq = b * m + e;
                    let cq = a * m * m + d * m + f - k;
                    let disc_n = bq * bq - 4 * c * cq;
                    if let Some(s) = perfect_sqrt(disc_n) {
                        let roots = if s == 0 { vec![0] } else { vec![s, -s] };
                        for sv in roots {
                            if (sv - bq).rem_euclid(2 * c) == 0 {
                                acc.add(inv_pow(m, lambda));
                                terms += 1;
                            }
                        }
                    }
                }
            }
            Ok(SumResult {
                value: acc.value(),
                complete: false,
                cutoff,
                terms,
            })
        }
    }
}

/// Sum over the solution lines of `P = gamma` (square discriminant, `k' = 0`).
fn line_strip_sum(poly: &QuadPoly, lambda: f64, cutoff: u64) -> Result<SumResult> {
    let sol = gamma_solvable(poly)?;
    let mut acc = KahanSum::new();
    let mut terms = 0u64;
    let mut any_tail = false;
    for line in &sol.lines {
        if line.dir.0 == 0 {
            if line.base.0 != 0 {
                // A vertical line m = const != 0 carries infinitely many terms
                // of equal size inside the strip: the sum itself diverges.
                return Ok(SumResult {
                    value: f64::INFINITY,
                    complete: true,
                    cutoff,
                    terms: 0,
                });
            }
            continue; // the whole line sits at m = 0
        }
        any_tail = true;
        let base = line.base.0;
        // m values form the arithmetic progression base + t*dir.
        let lo = (-(cutoff as i128) - base).div_euclid(line.dir.0);
        let hi = ((cutoff as i128) - base).div_euclid(line.dir.0);
        let (lo, hi) = (lo.min(hi), lo.max(hi));
        for t in lo..=hi {
            let m = base + t * line.dir.0;
            if m != 0 && m.unsigned_abs() <= cutoff as u128 {
                acc.add(inv_pow(m, lambda));
                terms += 1;
            }
        }
    }
    Ok(SumResult {
        value: acc.value(),
        // With a nonvertical line the progression continues past any cutoff.
        complete: !any_tail,
        cutoff,
        terms,
    })
}

fn inv_pow(m: i128, lambda: f64) -> f64 {
    (m.unsigned_abs() as f64).powf(-lambda)
}

/// Operator output on a window `|n| <= window`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorOutput {
    /// `(n, I f(n))`, ascending in `n`.
    pub values: Vec<(i64, f64)>,
    /// `lp` norm of the window values with the exponent from [`DfiParams`].
    pub lp_norm: f64,
    pub p: f64,
    /// True when some solution fell beyond the `|m|` cutoff (or a whole line
    /// of solutions was truncated).
    pub truncated: bool,
}

/// Applies `I f(n) = sum_{m != 0} f(P(m,n)) / |m|^lambda` on the window.
///
/// For each `n` and each point of the support the `m`-solutions are found by
/// solving the quadratic exactly, so the only truncation is the `|m|` cutoff.
pub fn apply_operator(
    poly: &QuadPoly,
    signal: &FiniteSignal,
    params: &DfiParams,
    window: u64,
) -> Result<OperatorOutput> {
    let (a, b, c, d, e, f) = poly.coeffs();
    let (a, b, c, d, e, f) = (
        a as i128, b as i128, c as i128, d as i128, e as i128, f as i128,
    );
    let lambda = params.lambda;
    let cutoff = params.cutoff as i128;
    let mut truncated = false;
    let mut values = Vec::with_capacity(2 * window as usize + 1);
    for n in -(window as i64)..=window as i64 {
        let n_i = n as i128;
        let mut acc = KahanSum::new();
        for (&k, &fk) in signal.support() {
            if fk == 0.0 {
                continue;
            }
            // a m^2 + (b n + d) m + (c n^2 + e n + f - k) = 0
            let bq = b * n_i + d;
            let cq = c * n_i * n_i + e * n_i + f - k;
            if a != 0 {
                let disc_m = bq * bq - 4 * a * cq;
                if let Some(s) = perfect_sqrt(disc_m) {
                    let roots = if s == 0 { vec![0] } else { vec![s, -s] };
                    for sv in roots {
                        if (sv - bq).rem_euclid(2 * a) == 0 {
                            let m = (sv - bq) / (2 * a);
                            if m != 0 {
                                if m.abs() <= cutoff {
                                    acc.add(fk * inv_pow(m, lambda));
                                } else {
                                    truncated = true;
                                }
                            }
                        }
                    }
                }
            } else if bq != 0 {
                if cq % bq == 0 {
                    let m = -cq / bq;
                    if m != 0 {
                        if m.abs() <= cutoff {
                            acc.add(fk * inv_pow(m, lambda));
                        } else {
                            truncated = true;
                        }
                    }
                }
            } else if cq == 0 {
                // Every m solves: sum the truncated tail explicitly.
                truncated = true;
                for m in 1..=cutoff {
                    acc.add(2.0 * fk * inv_pow(m, lambda));
                }
            }
        }
        values.push((n, acc.value()));
    }
    let mut norm = KahanSum::new();
    for &(_, v) in &values {
        norm.add(v.abs().powf(params.p));
    }
    Ok(OperatorOutput {
        values,
        lp_norm: norm.value().powf(1.0 / params.p),
        p: params.p,
        truncated,
    })
}

/// The two evaluation routes of the shifted-circle identity for
/// `P_j = m^2 + n^2 + 2jm` and the point mass at zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PjCheck {
    /// `l1` norm of the operator applied to the point mass at 0.
    pub direct: f64,
    /// `sum 1/|m - j|^lambda` over the circle `m^2 + n^2 = j^2`, `m != j`.
    pub shifted: f64,
}

/// Evaluates both sides of the identity; they are the same finite sum.
pub fn pj_consistency(j: u32, lambda: f64) -> Result<PjCheck> {
    if j == 0 {
        return Err(Error::NonPositive);
    }
    let two_j = 2i64 * j as i64;
    let poly = QuadPoly::new(1, 0, 1, two_j, 0, 0)?;
    let params = DfiParams::new(lambda, 1.0, 2 * j as u64 + 1)?;
    let direct = apply_operator(&poly, &FiniteSignal::delta(0), &params, j as u64)?;

    let circle = QuadForm::new(1, 0, 1)?;
    let target = (j as i128) * (j as i128);
    let reps = representations(&circle, target, None)?;
    debug_assert!(reps.complete);
    let mut acc = KahanSum::new();
    for &(m, _) in &reps.reps {
        if m != j as i128 {
            acc.add(inv_pow(m - j as i128, lambda));
        }
    }
    Ok(PjCheck {
        direct: direct.lp_norm,
        shifted: acc.value(),
    })
}

/// Witness that for `q = m^2 + mn` the representation sum at `k` is not
/// bounded in `k`: with `k` the product of the first `j` primes it dominates
/// `sum 1/p_i^lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct C0Witness {
    /// Product of the first `j` primes.
    pub k: u64,
    /// `sum_{i <= j} p_i^-lambda`.
    pub lower_bound: f64,
    /// Exact representation sum `sum_{(m,n) in A_k} |m|^-lambda`.
    pub exact_sum: f64,
}

/// Builds the witness for `1 <= j <= 15` (the primorial must fit in `u64`).
pub fn c0_counterexample(j: u32, lambda: f64) -> Result<C0Witness> {
    if j == 0 {
        return Err(Error::NonPositive);
    }
    if j > 15 {
        return Err(Error::invalid("primorial exceeds the 64-bit budget"));
    }
    let primes = primes_up_to(50);
    let mut k = 1u64;
    let mut lower = KahanSum::new();
    for &p in primes.iter().take(j as usize) {
        k *= p;
        lower.add((p as f64).powf(-lambda));
    }
    // For q = m(m + n), every divisor m of k (either sign) pairs with exactly
    // one n = k/m - m, so the sum is 2 * sum_{d | k} d^-lambda.
    let mut acc = KahanSum::new();
    for d in divisors(k as i128)? {
        acc.add(2.0 * (d as f64).powf(-lambda));
    }
    Ok(C0Witness {
        k,
        lower_bound: lower.value(),
        exact_sum: acc.value(),
    })
}

/// Truncated evaluation of the off-diagonal sharpness witness
/// `f(j^2 + 1) = j^(-1/p - eps)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharpnessReport {
    /// Partial sum of `sum n^(-(1/p + eps) q)` up to the truncation.
    pub lq_partial: f64,
    pub lq_exponent: f64,
    /// Divergence of the series by the integral test (exponent <= 1).
    pub lq_diverges: bool,
    /// Partial sum of `sum m^(-1/p - lambda - eps)` up to the truncation.
    pub dual_partial: f64,
    pub dual_exponent: f64,
    pub dual_diverges: bool,
}

/// Evaluates both lower-bound routes for the witness with the given `q`.
pub fn sharpness_witness(
    p: f64,
    eps: f64,
    lambda: f64,
    q: f64,
    truncation: u64,
) -> Result<SharpnessReport> {
    let valid = p.is_finite() && p > 1.0 && eps.is_finite() && eps > 0.0
        && lambda.is_finite() && lambda > 0.0 && q.is_finite() && q >= 1.0;
    if !valid {
        return Err(Error::invalid(
            "require p > 1, eps > 0, lambda > 0, q >= 1",
        ));
    }
    if truncation < 2 {
        return Err(Error::invalid("truncation must be at least 2"));
    }
    let lq_exponent = (1.0 / p + eps) * q;
    let dual_exponent = 1.0 / p + lambda + eps;
    let mut lq = KahanSum::new();
    let mut dual = KahanSum::new();
    for n in 1..=truncation {
        let nf = n as f64;
        lq.add(nf.powf(-lq_exponent));
        dual.add(nf.powf(-dual_exponent));
    }
    Ok(SharpnessReport {
        lq_partial: lq.value(),
        lq_exponent,
        lq_diverges: lq_exponent <= 1.0,
        dual_partial: dual.value(),
        dual_exponent,
        dual_diverges: dual_exponent <= 1.0,
    })
}
