//! Shared exact integer utilities: integer square roots, divisor and prime
//! enumeration, squarefree decomposition, Euler's totient, modular
//! exponentiation, and exact arithmetic with quadratic surds.
//!
//! Everything here is deterministic trial-division / integer arithmetic; no
//! floating point is used as a source of truth. Fixed-width paths use `u128`
//! or `i128` with explicit overflow guards, big-integer paths use `BigUint`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use std::cmp::Ordering;

use crate::error::{Error, Result};

/// Floor of the square root of `n`.
pub fn isqrt(n: u128) -> u128 {
    n.isqrt()
}

/// `Some(s)` with `s >= 0` and `s^2 == n`, or `None` when `n` is negative or
/// not a perfect square.
pub fn perfect_sqrt(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let s = (n as u128).isqrt() as i128;
    (s * s == n).then_some(s)
}

/// Nonnegative gcd of two `i128` values.
pub fn gcd_i128(a: i128, b: i128) -> i128 {
    a.gcd(&b)
}

/// Extended gcd: returns `(g, x, y)` with `g = gcd(a, b) >= 0` and
/// `a x + b y = g`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut x0, mut x1) = (1i128, 0i128);
    let (mut y0, mut y1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (x0, x1) = (x1, x0 - q * x1);
        (y0, y1) = (y1, y0 - q * y1);
    }
    if r0 < 0 {
        (-r0, -x0, -y0)
    } else {
        (r0, x0, y0)
    }
}

/// `base^exp mod modulus` for `modulus >= 1`, via square-and-multiply.
pub fn mod_pow(base: u64, mut exp: u64, modulus: u64) -> u64 {
    assert!(modulus >= 1, "modulus must be positive");
    if modulus == 1 {
        return 0;
    }
    let m = modulus as u128;
    let mut acc: u128 = 1;
    let mut b = (base as u128) % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// Deterministic trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut p = 3u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            return false;
        }
        p += 2;
    }
    true
}

/// All primes `<= x`, ascending (sieve of Eratosthenes).
pub fn primes_up_to(x: u64) -> Vec<u64> {
    if x < 2 {
        return Vec::new();
    }
    let n = x as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            primes.push(p as u64);
            let mut q = p * p;
            while q <= n {
                composite[q] = true;
                q += p;
            }
        }
    }
    primes
}

/// Prime factorization of `n >= 1` as `(prime, exponent)` pairs, ascending.
///
/// Plain trial division; intended for desk scale (roughly `n <= 10^12`,
/// where the scan stays below `10^6` candidates).
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut push = |p: u64, e: u32| {
        if e > 0 {
            out.push((p, e));
        }
    };
    let mut e = 0;
    while n.is_multiple_of(2) {
        n /= 2;
        e += 1;
    }
    push(2, e);
    let mut p = 3u64;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        push(p, e);
        p += 2;
    }
    if n > 1 {
        push(n, 1);
    }
    out
}

/// All positive divisors of `|n|`, ascending.
///
/// Errors on `n == 0`; errors with [`Error::Overflow`] when `|n|` exceeds the
/// `u64` trial-division budget.
pub fn divisors(n: i128) -> Result<Vec<u64>> {
    if n == 0 {
        return Err(Error::ZeroInput);
    }
    let mag = n.unsigned_abs();
    if mag > u64::MAX as u128 {
        return Err(Error::Overflow("divisor enumeration beyond 64-bit range"));
    }
    let mut divs = vec![1u64];
    for (p, e) in factorize(mag as u64) {
        let prev = divs.clone();
        let mut pe = 1u64;
        for _ in 0..e {
            pe *= p;
            divs.extend(prev.iter().map(|d| d * pe));
        }
    }
    divs.sort_unstable();
    Ok(divs)
}

/// Decomposition `h = squarefree * root^2` with `squarefree` squarefree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SquarefreeDecomp {
    pub squarefree: u64,
    pub root: u64,
}

/// Squarefree decomposition of `h >= 1`.
pub fn squarefree_decompose(h: u64) -> Result<SquarefreeDecomp> {
    if h == 0 {
        return Err(Error::NonPositive);
    }
    let mut squarefree = 1u64;
    let mut root = 1u64;
    for (p, e) in factorize(h) {
        if e % 2 == 1 {
            squarefree *= p;
        }
        for _ in 0..e / 2 {
            root *= p;
        }
    }
    Ok(SquarefreeDecomp { squarefree, root })
}

/// Euler's totient of `n >= 1`.
pub fn euler_phi(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::NonPositive);
    }
    let mut phi = n;
    for (p, _) in factorize(n) {
        phi = phi / p * (p - 1);
    }
    Ok(phi)
}

/// The real number `sqrt(radicand / denom)`, stored exactly.
///
/// Comparisons against rationals are decided by squaring in integer
/// arithmetic, never through floating point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Surd {
    radicand: u64,
    denom: u64,
}

impl Surd {
    /// `sqrt(radicand / denom)`; requires `denom >= 1`.
    pub fn new(radicand: u64, denom: u64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::NonPositive);
        }
        Ok(Surd { radicand, denom })
    }

    pub fn radicand(&self) -> u64 {
        self.radicand
    }

    pub fn denom(&self) -> u64 {
        self.denom
    }

    /// True when the represented value is rational, i.e. `radicand * denom`
    /// is a perfect square.
    pub fn is_rational(&self) -> bool {
        perfect_sqrt((self.radicand as i128) * (self.denom as i128)).is_some()
    }

    /// Compares `sqrt(radicand/denom)` with the nonnegative rational `a/b`.
    pub fn cmp_rational(&self, a: u64, b: u64) -> Result<Ordering> {
        if b == 0 {
            return Err(Error::NonPositive);
        }
        // sqrt(p/q) vs a/b  <=>  p b^2 vs a^2 q, all sides nonnegative.
        let lhs = BigUint::from(self.radicand) * BigUint::from(b) * BigUint::from(b);
        let rhs = BigUint::from(a) * BigUint::from(a) * BigUint::from(self.denom);
        Ok(lhs.cmp(&rhs))
    }

    /// Distance from `scale * sqrt(radicand/denom)` to the nearest integer,
    /// as an exact comparison object plus a high-precision real.
    pub fn nearest_int_distance(&self, scale: u64) -> SurdDistance {
        // value = scale * sqrt(p/q) = sqrt(scale^2 * p * q) / q =: sqrt(A)/D.
        let a = BigUint::from(scale) * BigUint::from(scale) * BigUint::from(self.radicand)
            * BigUint::from(self.denom);
        let d = BigUint::from(self.denom);
        let root = a.sqrt();
        // floor(sqrt(A)/D) = floor(floor(sqrt(A))/D) since D is a positive integer.
        let floor = &root / &d;
        let ceil = &floor + 1u32;
        // Pick the nearer of floor and floor+1: dist(floor) <= dist(ceil)
        //   <=> 2 sqrt(A) <= (floor+ceil) D  <=> 4A <= ((floor+ceil) D)^2.
        let mid = (&floor + &ceil) * &d;
        let nearest = if BigUint::from(4u32) * &a <= &mid * &mid {
            floor
        } else {
            ceil
        };
        let nd = &nearest * &d;
        let sqrt_exceeds = &nd * &nd <= a;
        let exact_integer = &nd * &nd == a;
        let mut dist = SurdDistance {
            scaled_radicand: a,
            denom: d,
            nearest,
            sqrt_exceeds,
            exact_integer,
            value: 0.0,
        };
        dist.value = dist.evaluate();
        dist
    }
}

/// Result of [`Surd::nearest_int_distance`]: the distance `|sqrt(A)/D - m|`
/// where `m` is the nearest integer, with exact predicates decided in integer
/// arithmetic and a real value carrying at least 64 bits of working precision.
#[derive(Debug, Clone)]
pub struct SurdDistance {
    scaled_radicand: BigUint, // A
    denom: BigUint,           // D
    nearest: BigUint,         // m
    sqrt_exceeds: bool,       // sqrt(A) >= m D
    exact_integer: bool,
    value: f64,
}

impl SurdDistance {
    /// The distance as a real number.
    pub fn value(&self) -> f64 {
        self.value
    }

    /// Nearest integer to the scaled surd.
    pub fn nearest(&self) -> &BigUint {
        &self.nearest
    }

    /// True when the scaled surd is exactly an integer (distance zero).
    pub fn is_integer(&self) -> bool {
        self.exact_integer
    }

    /// `floor(distance * 2^bits)`, exact up to one unit in the last place.
    pub fn fixed_point(&self, bits: u32) -> BigUint {
        if self.exact_integer {
            return BigUint::zero();
        }
        let scaled = (&self.scaled_radicand << (2 * bits as usize)).sqrt();
        let anchor = BigInt::from(&self.nearest * &self.denom) << (bits as usize);
        let diff = (BigInt::from(scaled) - anchor).abs().to_biguint().unwrap();
        diff / &self.denom
    }

    /// Exact comparison of the distance with the rational `num/den`, `den >= 1`.
    pub fn cmp_frac(&self, num: u64, den: u64) -> Result<Ordering> {
        if den == 0 {
            return Err(Error::NonPositive);
        }
        if self.exact_integer {
            // distance is exactly zero
            return Ok(if num == 0 {
                Ordering::Equal
            } else {
                Ordering::Less
            });
        }
        let b = BigInt::from(den);
        let a = BigInt::from(num);
        let d = BigInt::from(self.denom.clone());
        let md = BigInt::from(&self.nearest * &self.denom);
        let big_a = BigInt::from(self.scaled_radicand.clone());
        // distance = |sqrt(A) - mD| / D; compare b * |sqrt(A) - mD| with a * D.
        let rhs = &a * &d;
        if self.sqrt_exceeds {
            // b*sqrt(A) - b*mD  vs  aD  <=>  b^2 A  vs  (aD + b mD)^2
            let t = rhs + &b * &md;
            Ok((&b * &b * big_a).cmp(&(&t * &t)))
        } else {
            // b*mD - b*sqrt(A)  vs  aD  <=>  (b mD - aD)  vs  b*sqrt(A)
            let lhs = &b * &md - rhs;
            if lhs.is_negative() {
                return Ok(Ordering::Less);
            }
            Ok((&lhs * &lhs).cmp(&(&b * &b * big_a)))
        }
    }

    fn evaluate(&self) -> f64 {
        if self.exact_integer {
            return 0.0;
        }
        // If sqrt(A)/D is not an integer, |sqrt(A) - mD| >= 1/(sqrt(A)+mD),
        // so bits(A)/2 + bits(D) + 80 fractional bits always leave at least
        // 64 significant bits in the fixed-point mantissa.
        let bits = (self.scaled_radicand.bits() / 2 + self.denom.bits() + 80) as u32;
        let fixed = self.fixed_point(bits);
        let fb = fixed.bits();
        // to_f64 on BigUint rounds correctly; rescale by 2^-bits.
        let mantissa = fixed.to_f64().unwrap_or(f64::INFINITY);
        debug_assert!(fb > 64, "fixed-point distance lost precision");
        mantissa * (-(bits as f64)).exp2()
    }
}
