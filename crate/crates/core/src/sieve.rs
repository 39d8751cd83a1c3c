//! Quadratic-residue machinery and the large sieve for conic strips.
//!
//! The chain: Jacobi symbols (via quadratic reciprocity) identify the primes
//! `p` making a fixed `-a` a nonresidue; those primes live in `2 phi(r)`
//! residue classes mod `8r`. For each usable prime, the classes
//! `Omega_p = {m : N - a m^2 is a nonresidue mod p}` obstruct membership in
//! `E_tau = {m near tau : a m^2 + n^2 = N solvable}`, Perron's shifted
//! nonresidue counts guarantee `#Omega_p >= (p-5)/2`, and the large sieve
//! turns the obstructions into the density bound `(2M + Q^2)/H`.
//!
//! The analytic half of the story is recorded for context only: past an
//! ineffective interval-length threshold `K_a`, the prime number theorem in
//! arithmetic progressions guarantees enough usable primes that the bound
//! becomes `O(sqrt(M) log M)`. Validation always counts primes and solutions
//! exactly; `K_a` is carried in [`SieveQuery`] as a reporting field.

use std::collections::{BTreeMap, BTreeSet};

use crate::arith::{euler_phi, is_prime, isqrt, perfect_sqrt, primes_up_to, squarefree_decompose};
use crate::dfi::{KahanSum, SumResult};
use crate::error::{Error, Result};

/// Jacobi symbol `(m | n)` for positive odd `n`; extends the Legendre symbol,
/// is zero exactly when `gcd(m, n) > 1`, and `(m | 1) = 1`.
pub fn jacobi_symbol(m: i128, n: u64) -> Result<i8> {
    if n == 0 || n.is_multiple_of(2) {
        return Err(Error::EvenModulus);
    }
    let mut num = m.rem_euclid(n as i128) as u64;
    let mut den = n;
    let mut sign = 1i8;
    loop {
        num %= den;
        if num == 0 {
            return Ok(if den == 1 { sign } else { 0 });
        }
        // pull out factors of two: (2|den) = -1 iff den = 3, 5 mod 8
        while num.is_multiple_of(2) {
            num /= 2;
            if den % 8 == 3 || den % 8 == 5 {
                sign = -sign;
            }
        }
        if num == 1 {
            return Ok(sign);
        }
        // reciprocity flip for two odd values
        if num % 4 == 3 && den % 4 == 3 {
            sign = -sign;
        }
        std::mem::swap(&mut num, &mut den);
    }
}

/// The nonzero quadratic residues of an odd prime `p`.
pub fn quadratic_residues(p: u64) -> BTreeSet<u64> {
    let mut set = BTreeSet::new();
    for x in 1..p {
        set.insert(x * x % p);
    }
    set
}

/// The quadratic nonresidues of an odd prime `p`.
pub fn nonresidues(p: u64) -> BTreeSet<u64> {
    let residues = quadratic_residues(p);
    (1..p).filter(|x| !residues.contains(x)).collect()
}

fn check_odd_prime(p: u64) -> Result<()> {
    if p < 3 || !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not an odd prime")));
    }
    Ok(())
}

/// `#((N_p + s) intersect N_p)` by direct set intersection, where `N_p` is
/// the nonresidue set of the odd prime `p` and `gcd(s, p) = 1`.
pub fn perron_count(p: u64, s: i64) -> Result<u64> {
    check_odd_prime(p)?;
    let shift = s.rem_euclid(p as i64) as u64;
    if shift == 0 {
        return Err(Error::invalid("shift must be coprime to p"));
    }
    let nr = nonresidues(p);
    let count = nr.iter().filter(|&&x| nr.contains(&((x + shift) % p))).count();
    Ok(count as u64)
}

/// Perron's closed form for [`perron_count`]: with `p = 4k - 1` the count is
/// `k - 1`; with `p = 4k + 1` it is `k` when `s` is a residue-shift outsider
/// (`s` not a nonresidue) and `k - 1` otherwise.
pub fn perron_formula(p: u64, s: i64) -> Result<u64> {
    check_odd_prime(p)?;
    let shift = s.rem_euclid(p as i64) as u64;
    if shift == 0 {
        return Err(Error::invalid("shift must be coprime to p"));
    }
    Ok(if p % 4 == 3 {
        (p + 1) / 4 - 1
    } else {
        let k = p / 4;
        if jacobi_symbol(shift as i128, p)? == -1 {
            k - 1
        } else {
            k
        }
    })
}

/// The residue classes modulo `8r` containing every odd prime that makes a
/// fixed nonsquare integer a quadratic nonresidue.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonresidueClasses {
    /// `8r`, where `r` is the odd part of the squarefree part of `|-a|`.
    pub modulus: u64,
    /// Classes `c` with: every prime `p = c (mod modulus)`, `p` not dividing
    /// `2a`, satisfies `(-a | p) = -1`.
    pub classes: BTreeSet<u64>,
    /// `2 phi(r)`, the guaranteed class count.
    pub expected: u64,
    /// The odd core `r`.
    pub odd_core: u64,
}

/// Characterizes `{p : (-a | p) = -1}` by residue classes mod `8r`.
///
/// Writes `-a = (-1)^i * s * t^2` with `s = 2^j * r` squarefree and `r` odd;
/// the symbol then depends on `p` only through `p mod 8` (the sign part) and
/// `p mod r` (reciprocity), so membership is a function of `p mod 8r`.
pub fn nonresidue_prime_classes(a: i64) -> Result<NonresidueClasses> {
    let m = -(a as i128);
    if m >= 0 && perfect_sqrt(m).is_some() {
        return Err(Error::invalid("-a must not be a perfect square"));
    }
    let neg = m < 0;
    let sd = squarefree_decompose(m.unsigned_abs() as u64)?;
    let (two_part, odd_core) = if sd.squarefree % 2 == 0 {
        (1u64, sd.squarefree / 2)
    } else {
        (0u64, sd.squarefree)
    };
    let modulus = 8 * odd_core;
    let mut classes = BTreeSet::new();
    let mut seen = 0u64;
    for c in (1..modulus).step_by(2) {
        if crate::arith::gcd_i128(c as i128, odd_core as i128) != 1 {
            continue;
        }
        seen += 1;
        // (-a|p) = (-1)^(i (p-1)/2 + j (p^2-1)/8 + (r-1)(p-1)/4) * (p|r),
        // evaluated at the class representative c.
        let mut exponent = 0u64;
        if neg {
            exponent += (c - 1) / 2;
        }
        exponent += two_part * (c * c - 1) / 8;
        exponent += (odd_core - 1) / 2 * ((c - 1) / 2);
        let sign = if exponent % 2 == 1 { -1 } else { 1 };
        if sign * jacobi_symbol(c as i128, odd_core)? == -1 {
            classes.insert(c);
        }
    }
    let expected = 2 * euler_phi(odd_core)?;
    if classes.len() as u64 != expected {
        return Err(Error::Internal(format!(
            "a={a}: found {} nonresidue classes, expected {expected} (of {seen} units)",
            classes.len()
        )));
    }
    Ok(NonresidueClasses {
        modulus,
        classes,
        expected,
        odd_core,
    })
}

/// A prime usable for sieving the conic `a m^2 + n^2 = N`: greater than 5,
/// not dividing `2a`, with `(-a | p) = -1`.
pub fn usable_prime(a: i64, p: u64) -> bool {
    p > 5
        && is_prime(p)
        && (a as i128).rem_euclid(p as i128) != 0
        && jacobi_symbol(-(a as i128), p) == Ok(-1)
}

/// `Omega_p = {m mod p : N - a m^2 is a quadratic nonresidue mod p}` for a
/// usable prime.
pub fn omega_set(a: i64, target: u64, p: u64) -> Result<BTreeSet<u64>> {
    if !usable_prime(a, p) {
        return Err(Error::invalid(format!(
            "prime {p} is not usable for a={a} (need p > 5, p not dividing 2a, (-a|p) = -1)"
        )));
    }
    let residues = quadratic_residues(p);
    let a_mod = (a as i128).rem_euclid(p as i128) as u64;
    let n_mod = target % p;
    let mut out = BTreeSet::new();
    for m in 0..p {
        let t = (n_mod as i128 - (a_mod * m % p * m % p) as i128).rem_euclid(p as i128) as u64;
        if t != 0 && !residues.contains(&t) {
            out.insert(m);
        }
    }
    Ok(out)
}

/// Sieving data for the conic `a m^2 + n^2 = N`: the usable primes up to the
/// level, their obstruction classes, and the sieve mass `H`.
#[derive(Debug, Clone, PartialEq)]
pub struct SieveSystem {
    pub a: i64,
    pub target: u64,
    pub q_level: u64,
    pub primes: Vec<u64>,
    pub omega: BTreeMap<u64, BTreeSet<u64>>,
    /// `H = sum #Omega_p / (p - #Omega_p)`.
    pub mass: f64,
}

impl SieveSystem {
    /// Builds the system from all usable primes `<= q_level`.
    pub fn build(a: i64, target: u64, q_level: u64) -> Result<Self> {
        let m = -(a as i128);
        if m >= 0 && perfect_sqrt(m).is_some() {
            return Err(Error::invalid("-a must not be a perfect square"));
        }
        let mut primes = Vec::new();
        let mut omega = BTreeMap::new();
        let mut mass = KahanSum::new();
        for p in primes_up_to(q_level) {
            if !usable_prime(a, p) {
                continue;
            }
            let om = omega_set(a, target, p)?;
            let size = om.len() as u64;
            if size >= p {
                return Err(Error::Internal(format!("Omega_{p} covers every class")));
            }
            let floor = if target.is_multiple_of(p) { p - 1 } else { (p - 5) / 2 };
            if size < floor {
                return Err(Error::Internal(format!(
                    "Omega_{p} has {size} classes, below the guaranteed {floor}"
                )));
            }
            mass.add(size as f64 / (p - size) as f64);
            primes.push(p);
            omega.insert(p, om);
        }
        Ok(SieveSystem {
            a,
            target,
            q_level,
            primes,
            omega,
            mass: mass.value(),
        })
    }
}

/// The default sieving level `floor(sqrt(2M))` for interval half-width `M`.
pub fn default_q_level(half_width: u64) -> u64 {
    isqrt(2 * half_width as u128) as u64
}

/// An interval query `(tau - M, tau + M)` around the center `tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SieveQuery {
    pub tau: i64,
    pub half_width: u64,
    /// The interval-length threshold `[8(3 + 2 log|a|)]^4` beyond which the
    /// usable primes are guaranteed dense enough; reporting only (its
    /// companion constant from the prime number theorem in progressions is
    /// ineffective).
    pub k_a: f64,
}

impl SieveQuery {
    pub fn new(tau: i64, half_width: u64, a: i64) -> Result<Self> {
        if half_width == 0 {
            return Err(Error::NonPositive);
        }
        if a == 0 {
            return Err(Error::ZeroInput);
        }
        let k_a = (8.0 * (3.0 + 2.0 * (a.unsigned_abs() as f64).ln())).powi(4);
        Ok(SieveQuery {
            tau,
            half_width,
            k_a,
        })
    }
}

/// The large-sieve density bound `(2M + Q^2)/H` on the number of `m` in the
/// interval avoiding every `Omega_p`; `None` when no usable primes were found
/// (`H = 0`, no bound).
pub fn large_sieve_bound(system: &SieveSystem, query: &SieveQuery) -> Option<f64> {
    if system.mass <= 0.0 {
        return None;
    }
    let interval_len = 2.0 * query.half_width as f64;
    let q = system.q_level as f64;
    Some((interval_len + q * q) / system.mass)
}

/// Exact `#E_tau`: the number of `m` in the open interval
/// `(tau - M, tau + M)` with `N - a m^2` a perfect square.
pub fn representable_count_exact(a: i64, target: u64, tau: i64, half_width: u64) -> u64 {
    let lo = tau as i128 - half_width as i128 + 1;
    let hi = tau as i128 + half_width as i128 - 1;
    let mut count = 0u64;
    for m in lo..=hi {
        let v = target as i128 - a as i128 * m * m;
        if perfect_sqrt(v).is_some() {
            count += 1;
        }
    }
    count
}

/// `sum 1/|m - tau|^lambda` over solutions of `a m^2 + n^2 = N` with
/// `m != tau`, `|m - tau| <= cutoff`, counted with multiplicity in `n`.
///
/// For `a >= 1` the solution set is finite (`|m| <= sqrt(N/a)`) and the sum
/// is complete whenever the window covers that range.
pub fn strip_sum(a: i64, target: u64, tau: i64, lambda: f64, cutoff: u64) -> Result<SumResult> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::NonPositive);
    }
    let tau = tau as i128;
    let window_lo = tau - cutoff as i128;
    let window_hi = tau + cutoff as i128;
    let (lo, hi, complete) = if a >= 1 {
        let m_sup = isqrt((target / a as u64) as u128) as i128;
        (
            window_lo.max(-m_sup),
            window_hi.min(m_sup),
            window_lo <= -m_sup && m_sup <= window_hi,
        )
    } else {
        (window_lo, window_hi, false)
    };
    let mut acc = KahanSum::new();
    let mut terms = 0u64;
    for m in lo..=hi {
        if m == tau {
            continue;
        }
        let v = target as i128 - a as i128 * m * m;
        if let Some(s) = perfect_sqrt(v) {
            let mult = if s == 0 { 1 } else { 2 };
            let w = ((m - tau).unsigned_abs() as f64).powf(-lambda);
            acc.add(mult as f64 * w);
            terms += mult;
        }
    }
    Ok(SumResult {
        value: acc.value(),
        complete,
        cutoff,
        terms,
    })
}
