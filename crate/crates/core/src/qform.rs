//! Binary quadratic forms `a m^2 + b m n + c n^2`: discriminant
//! classification, the factorization into two integer linear forms when the
//! discriminant is a positive square, and exact enumeration of the
//! representations of an integer.
//!
//! The geometry splits on the discriminant `disc = b^2 - 4ac`:
//!
//! * `disc < 0`: ellipses, so finitely many representations, enumerated
//!   completely from the bound `|disc| n^2 <= 4|a k|`;
//! * `disc > 0` square: two transversal lines / degenerate hyperbolas; the
//!   form factors as `(a2 m + c1 n)(a1 m + c2 n)` and nonzero targets are
//!   enumerated completely through divisor pairs;
//! * `disc > 0` nonsquare: hyperbolas with irrational asymptotes, infinitely
//!   many representations, enumerated inside an explicit box only;
//! * `disc = 0`: out of scope here.

use crate::arith::{divisors, gcd_i128, isqrt, perfect_sqrt};
use crate::error::{Error, Result};

/// Coefficient magnitudes are capped so that every `i128` expression in this
/// crate (discriminants, factor products, correspondence values) stays far
/// from overflow at desk scale.
pub const COEFF_LIMIT: i64 = 1 << 31;

/// Default half-width of the enumeration box for the cases with infinitely
/// many representations.
pub const DEFAULT_BOX: u64 = 1_000_000;

/// An integral binary quadratic form `a m^2 + b m n + c n^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuadForm {
    a: i64,
    b: i64,
    c: i64,
}

/// Discriminant class of a form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormClass {
    Negative,
    PositiveNonsquare,
    PositiveSquare { sqrt_disc: i128 },
    Zero,
}

/// A form together with its discriminant and class tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassifiedForm {
    pub disc: i128,
    pub class: FormClass,
}

impl QuadForm {
    /// Requires at least one of `a, b, c` nonzero and all magnitudes below
    /// [`COEFF_LIMIT`].
    pub fn new(a: i64, b: i64, c: i64) -> Result<Self> {
        if a == 0 && b == 0 && c == 0 {
            return Err(Error::invalid("form must have a nonzero coefficient"));
        }
        for v in [a, b, c] {
            if v.abs() > COEFF_LIMIT {
                return Err(Error::Overflow("form coefficient magnitude"));
            }
        }
        Ok(QuadForm { a, b, c })
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn c(&self) -> i64 {
        self.c
    }

    /// The form with the roles of `m` and `n` exchanged.
    pub fn transpose(&self) -> QuadForm {
        QuadForm {
            a: self.c,
            b: self.b,
            c: self.a,
        }
    }

    pub fn neg(&self) -> QuadForm {
        QuadForm {
            a: -self.a,
            b: -self.b,
            c: -self.c,
        }
    }

    /// Value at `(m, n)`. Exact for `|m|, |n| <= 2^46` given [`COEFF_LIMIT`].
    pub fn eval(&self, m: i128, n: i128) -> i128 {
        self.a as i128 * m * m + self.b as i128 * m * n + self.c as i128 * n * n
    }

    pub fn disc(&self) -> i128 {
        let (a, b, c) = (self.a as i128, self.b as i128, self.c as i128);
        b * b - 4 * a * c
    }

    /// Discriminant, class tag, and the square root of the discriminant when
    /// it is a positive square.
    pub fn classify(&self) -> ClassifiedForm {
        let disc = self.disc();
        let class = if disc < 0 {
            FormClass::Negative
        } else if disc == 0 {
            FormClass::Zero
        } else {
            match perfect_sqrt(disc) {
                Some(sqrt_disc) => FormClass::PositiveSquare { sqrt_disc },
                None => FormClass::PositiveNonsquare,
            }
        };
        ClassifiedForm { disc, class }
    }
}

/// Factorization data of a square-discriminant form:
/// `a m^2 + b m n + c n^2 = (a2 m + c1 n)(a1 m + c2 n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactoredForm {
    pub sqrt_disc: i128,
    pub a1: i128,
    pub a2: i128,
    pub c1: i128,
    pub c2: i128,
    /// gcd(a2, c1)
    pub g1: i128,
    /// gcd(a1, c2)
    pub g2: i128,
}

/// Splits a form of positive square discriminant (`a != 0`) into its two
/// integer linear factors.
///
/// `a1 = gcd((b - sqrt_disc)/2, a)`, `a2 = a/a1`, `c1 = (b - sqrt_disc)/(2 a1)`,
/// `c2 = ((b + sqrt_disc)/2) / a2`; the division defining `c2` is exact because
/// `gcd(a2, c1) = 1` and `c1 (b + sqrt_disc)/2 = a2 c`.
pub fn factor_square_disc(form: &QuadForm) -> Result<FactoredForm> {
    let cf = form.classify();
    let sqrt_disc = match cf.class {
        FormClass::PositiveSquare { sqrt_disc } => sqrt_disc,
        _ => return Err(Error::NotSquareDiscriminant),
    };
    if form.a == 0 {
        return Err(Error::invalid(
            "square-discriminant factorization requires a nonzero leading coefficient",
        ));
    }
    let a = form.a as i128;
    let b = form.b as i128;
    let c = form.c as i128;
    // (b - sqrt_disc)(b + sqrt_disc) = 4ac forces both halves to be even.
    let lo = (b - sqrt_disc) / 2;
    let hi = (b + sqrt_disc) / 2;
    debug_assert_eq!(lo * 2, b - sqrt_disc);
    let a1 = gcd_i128(lo, a);
    let a2 = a / a1;
    let c1 = lo / a1;
    if hi % a2 != 0 {
        return Err(Error::Internal(format!(
            "a2={a2} does not divide (b+sqrt_disc)/2={hi} for form {form:?}"
        )));
    }
    let c2 = hi / a2;
    let ff = FactoredForm {
        sqrt_disc,
        a1,
        a2,
        c1,
        c2,
        g1: gcd_i128(a2, c1),
        g2: gcd_i128(a1, c2),
    };
    if ff.a1 * ff.a2 != a
        || ff.c1 * ff.c2 != c
        || ff.a2 * ff.c2 + ff.a1 * ff.c1 != b
        || ff.a2 * ff.c2 - ff.a1 * ff.c1 != sqrt_disc
    {
        return Err(Error::Internal(format!(
            "factored form {ff:?} fails the product identity for {form:?}"
        )));
    }
    Ok(ff)
}

/// Primitive direction vectors of the two lines of representations of zero.
///
/// Every representation of `0` is an integer multiple of one of the returned
/// vectors. Signs follow the gcd normalization (both entries divided by the
/// positive `g1` resp. `g2`); callers must accept either orientation.
pub fn zero_rep_lines(ff: &FactoredForm) -> [(i128, i128); 2] {
    [
        (ff.c1 / ff.g1, -ff.a2 / ff.g1),
        (ff.c2 / ff.g2, -ff.a1 / ff.g2),
    ]
}

/// The representations of `target` by a form, with completeness metadata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepSet {
    pub target: i128,
    /// Duplicate-free, lexicographically sorted.
    pub reps: Vec<(i128, i128)>,
    /// True only when the enumeration provably exhausts all integer solutions.
    pub complete: bool,
    /// The box half-width used when the listing is truncated.
    pub box_bound: Option<u64>,
}

impl RepSet {
    /// Sorts lexicographically, removes duplicates, attaches metadata.
    pub(crate) fn sorted(
        target: i128,
        mut reps: Vec<(i128, i128)>,
        complete: bool,
        box_bound: Option<u64>,
    ) -> Self {
        reps.sort_unstable();
        reps.dedup();
        RepSet {
            target,
            reps,
            complete,
            box_bound,
        }
    }
}

/// Enumerates `{(m, n) : q(m, n) = target}`.
///
/// Complete for negative discriminant and for square discriminant with
/// `target != 0`; otherwise a box-truncated listing (`box_bound`, defaulting
/// to [`DEFAULT_BOX`]) flagged `complete = false`. Zero discriminant is
/// rejected.
pub fn representations(form: &QuadForm, target: i128, box_bound: Option<u64>) -> Result<RepSet> {
    match form.classify().class {
        FormClass::Zero => Err(Error::ZeroDiscriminant),
        FormClass::Negative => negative_disc_reps(form, target),
        FormClass::PositiveSquare { .. } => {
            if target != 0 {
                let reps = square_disc_nonzero_reps(form, target)?;
                Ok(RepSet::sorted(target, reps, true, None))
            } else {
                let bb = box_bound.unwrap_or(DEFAULT_BOX);
                let reps = square_disc_zero_listing(form, bb)?;
                Ok(RepSet::sorted(target, reps, false, Some(bb)))
            }
        }
        FormClass::PositiveNonsquare => {
            let bb = box_bound.unwrap_or(DEFAULT_BOX);
            let reps = nonsquare_box_reps(form, target, bb)?;
            Ok(RepSet::sorted(target, reps, false, Some(bb)))
        }
    }
}

fn negative_disc_reps(form: &QuadForm, target: i128) -> Result<RepSet> {
    if form.a < 0 {
        // q(m,n) = k  <=>  (-q)(m,n) = -k, and -q is positive definite.
        let mut flipped = negative_disc_reps(&form.neg(), -target)?;
        flipped.target = target;
        return Ok(flipped);
    }
    let a = form.a as i128;
    let b = form.b as i128;
    let disc = form.disc();
    let mut reps = Vec::new();
    if target > 0 {
        // 4a q(m,n) = (2am + bn)^2 - disc n^2, so |disc| n^2 <= 4 a k.
        let four_ak = 4i128
            .checked_mul(a)
            .and_then(|t| t.checked_mul(target))
            .ok_or(Error::Overflow("negative-discriminant bound"))?;
        let n_max = isqrt((four_ak / -disc) as u128) as i128;
        for n in -n_max..=n_max {
            let s2 = four_ak + disc * n * n;
            if let Some(s) = perfect_sqrt(s2) {
                for sv in if s == 0 { vec![0] } else { vec![s, -s] } {
                    let num = sv - b * n;
                    if num.rem_euclid(2 * a) == 0 {
                        reps.push((num / (2 * a), n));
                    }
                }
            }
        }
    } else if target == 0 {
        reps.push((0, 0));
    }
    // target < 0 with a > 0: positive definite form, no solutions.
    Ok(RepSet::sorted(target, reps, true, None))
}

fn square_disc_nonzero_reps(form: &QuadForm, target: i128) -> Result<Vec<(i128, i128)>> {
    if form.a == 0 {
        if form.c != 0 {
            let swapped = square_disc_nonzero_reps(&form.transpose(), target)?;
            return Ok(swapped.into_iter().map(|(m, n)| (n, m)).collect());
        }
        // q = b m n
        let b = form.b as i128;
        let mut reps = Vec::new();
        if target % b == 0 {
            for d in divisors(target / b)? {
                let d = d as i128;
                let q = target / b / d;
                reps.push((d, q));
                reps.push((-d, -q));
            }
        }
        return Ok(reps);
    }
    let ff = factor_square_disc(form)?;
    let mut reps = Vec::new();
    for d in divisors(target)? {
        for u in [d as i128, -(d as i128)] {
            let v = target / u;
            // Solve a2 m + c1 n = u, a1 m + c2 n = v; determinant is sqrt_disc.
            let m_num = ff.c2 * u - ff.c1 * v;
            let n_num = ff.a2 * v - ff.a1 * u;
            if m_num % ff.sqrt_disc == 0 && n_num % ff.sqrt_disc == 0 {
                reps.push((m_num / ff.sqrt_disc, n_num / ff.sqrt_disc));
            }
        }
    }
    Ok(reps)
}

/// Line generators of the representations of zero, valid for any square
/// discriminant (the `a = 0` cases degenerate to coordinate-axis lines).
pub(crate) fn zero_line_dirs(form: &QuadForm) -> Result<[(i128, i128); 2]> {
    if form.a == 0 {
        if form.c != 0 {
            let [u, v] = zero_line_dirs(&form.transpose())?;
            return Ok([(u.1, u.0), (v.1, v.0)]);
        }
        // q = b m n vanishes exactly on the two axes.
        return Ok([(1, 0), (0, 1)]);
    }
    Ok(zero_rep_lines(&factor_square_disc(form)?))
}

fn square_disc_zero_listing(form: &QuadForm, box_bound: u64) -> Result<Vec<(i128, i128)>> {
    let dirs = zero_line_dirs(form)?;
    let bb = box_bound as i128;
    let mut reps = vec![(0, 0)];
    for (dm, dn) in dirs {
        let step = dm.abs().max(dn.abs());
        debug_assert!(step > 0);
        let mut j = 1i128;
        while j * step <= bb {
            reps.push((j * dm, j * dn));
            reps.push((-j * dm, -j * dn));
            j += 1;
        }
    }
    Ok(reps)
}

fn nonsquare_box_reps(form: &QuadForm, target: i128, box_bound: u64) -> Result<Vec<(i128, i128)>> {
    // A positive nonsquare discriminant forces a != 0 and c != 0 (either
    // vanishing would make the discriminant the square b^2).
    debug_assert!(form.a != 0 && form.c != 0);
    let b = form.b as i128;
    let c = form.c as i128;
    let disc = form.disc();
    let bb = box_bound as i128;
    let mut reps = Vec::new();
    for m in -bb..=bb {
        // c n^2 + b m n + (a m^2 - target) = 0 for fixed m.
        let d_n = disc
            .checked_mul(m * m)
            .and_then(|t| t.checked_add(4 * c * target))
            .ok_or(Error::Overflow("box enumeration discriminant"))?;
        if let Some(s) = perfect_sqrt(d_n) {
            for sv in if s == 0 { vec![0] } else { vec![s, -s] } {
                let num = sv - b * m;
                if num.rem_euclid(2 * c) == 0 {
                    let n = num / (2 * c);
                    if n.abs() <= bb {
                        reps.push((m, n));
                    }
                }
            }
        }
    }
    Ok(reps)
}

/// Exact number of solutions of `q(m, n) = target` with
/// `|m| <= |target|^(1/4) / sqrt_disc` (the small-`|m|` regime, at most 4
/// solutions for square discriminant with `a, c != 0`).
pub fn count_small_m(form: &QuadForm, target: i128) -> Result<u64> {
    let sqrt_disc = match form.classify().class {
        FormClass::PositiveSquare { sqrt_disc } => sqrt_disc,
        _ => return Err(Error::NotSquareDiscriminant),
    };
    if form.a == 0 || form.c == 0 {
        return Err(Error::invalid("small-m count requires a != 0 and c != 0"));
    }
    if target == 0 {
        return Err(Error::ZeroInput);
    }
    let b = form.b as i128;
    let c = form.c as i128;
    let disc = form.disc();
    let abs_k = target.unsigned_abs();
    // |m| <= |k|^(1/4)/sqrt_disc  <=>  sqrt_disc^4 m^4 <= |k|, decided exactly.
    let fits = |m: i128| -> bool {
        let dm = (sqrt_disc * m.abs()) as u128;
        match dm.checked_mul(dm).and_then(|t| t.checked_mul(t)) {
            Some(fourth) => fourth <= abs_k,
            None => false,
        }
    };
    let mut count = 0u64;
    let mut m = 0i128;
    while fits(m) {
        for mv in if m == 0 { vec![0] } else { vec![m, -m] } {
            let d_n = disc * mv * mv + 4 * c * target;
            if let Some(s) = perfect_sqrt(d_n) {
                for sv in if s == 0 { vec![0] } else { vec![s, -s] } {
                    let num = sv - b * mv;
                    if num.rem_euclid(2 * c) == 0 {
                        count += 1;
                    }
                }
            }
        }
        m += 1;
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Brute-force oracle: scan the full box.
    fn brute_reps(form: &QuadForm, target: i128, half: i128) -> Vec<(i128, i128)> {
        let mut out = Vec::new();
        for m in -half..=half {
            for n in -half..=half {
                if form.eval(m, n) == target {
                    out.push((m, n));
                }
            }
        }
        out
    }

    /// Random square-discriminant form with `a, c != 0` and small coefficients,
    /// built from random linear factors.
    pub(crate) fn random_square_disc_form(rng: &mut impl Rng) -> (QuadForm, FactoredForm) {
        loop {
            let pick = |rng: &mut dyn rand::RngCore| -> i128 {
                let v: i128 = rand::Rng::gen_range(rng, -7..=7);
                if v == 0 {
                    1
                } else {
                    v
                }
            };
            let (a1, a2, c1, c2) = (pick(rng), pick(rng), pick(rng), pick(rng));
            let a = a1 * a2;
            let c = c1 * c2;
            let b = a2 * c2 + a1 * c1;
            if a2 * c2 == a1 * c1 || b.abs() > 50 {
                continue; // zero discriminant or coefficient out of range
            }
            let form = QuadForm::new(a as i64, b as i64, c as i64).unwrap();
            if let FormClass::PositiveSquare { .. } = form.classify().class {
                let ff = factor_square_disc(&form).unwrap();
                return (form, ff);
            }
        }
    }

    #[test]
    fn classify_examples() {
        let f = QuadForm::new(1, 0, 1).unwrap().classify();
        assert_eq!(f.disc, -4);
        assert_eq!(f.class, FormClass::Negative);

        let f = QuadForm::new(1, 0, -2).unwrap().classify();
        assert_eq!(f.disc, 8);
        assert_eq!(f.class, FormClass::PositiveNonsquare);

        let f = QuadForm::new(1, 0, -1).unwrap().classify();
        assert_eq!(f.disc, 4);
        assert_eq!(f.class, FormClass::PositiveSquare { sqrt_disc: 2 });

        let f = QuadForm::new(1, 2, 1).unwrap().classify();
        assert_eq!(f.disc, 0);
        assert_eq!(f.class, FormClass::Zero);
    }

    #[test]
    fn factor_examples() {
        // m^2 - n^2 = (m - n)(m + n)
        let ff = factor_square_disc(&QuadForm::new(1, 0, -1).unwrap()).unwrap();
        assert_eq!((ff.a1, ff.a2, ff.c1, ff.c2), (1, 1, -1, 1));

        // 6m^2 + 5mn + n^2 = (3m + n)(2m + n)
        let ff = factor_square_disc(&QuadForm::new(6, 5, 1).unwrap()).unwrap();
        assert_eq!(ff.sqrt_disc, 1);
        assert_eq!((ff.a1, ff.a2, ff.c1, ff.c2), (2, 3, 1, 1));

        // m^2 - 4n^2 = (m - 2n)(m + 2n)
        let ff = factor_square_disc(&QuadForm::new(1, 0, -4).unwrap()).unwrap();
        assert_eq!(ff.sqrt_disc, 4);
        assert_eq!((ff.a1, ff.a2, ff.c1, ff.c2), (1, 1, -2, 2));

        assert!(factor_square_disc(&QuadForm::new(1, 0, 1).unwrap()).is_err());
        assert!(factor_square_disc(&QuadForm::new(0, 1, 0).unwrap()).is_err());
    }

    #[test]
    fn factorization_identity_random_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5d5d_0002);
        for _ in 0..60 {
            let (form, ff) = random_square_disc_form(&mut rng);
            for m in -20..=20i128 {
                for n in -20..=20i128 {
                    let product = (ff.a2 * m + ff.c1 * n) * (ff.a1 * m + ff.c2 * n);
                    assert_eq!(product, form.eval(m, n), "form {form:?} at ({m},{n})");
                }
            }
        }
    }

    #[test]
    fn zero_lines_examples() {
        let ff = factor_square_disc(&QuadForm::new(1, 0, -1).unwrap()).unwrap();
        assert_eq!(zero_rep_lines(&ff), [(-1, -1), (1, -1)]);

        let ff = factor_square_disc(&QuadForm::new(6, 5, 1).unwrap()).unwrap();
        assert_eq!(zero_rep_lines(&ff), [(1, -3), (1, -2)]);

        // (m - 2n)(m + 2n): directions are +-(2, 1) and +-(2, -1)
        let form = QuadForm::new(1, 0, -4).unwrap();
        let ff = factor_square_disc(&form).unwrap();
        for (dm, dn) in zero_rep_lines(&ff) {
            assert_eq!(gcd_i128(dm, dn), 1);
            assert!(dm.abs() == 2 && dn.abs() == 1);
        }
    }

    #[test]
    fn zero_lines_vanish_along_multiples() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5d5d_0003);
        for _ in 0..40 {
            let (form, ff) = random_square_disc_form(&mut rng);
            for (dm, dn) in zero_rep_lines(&ff) {
                for j in -100..=100i128 {
                    assert_eq!(form.eval(j * dm, j * dn), 0, "form {form:?}");
                }
            }
        }
    }

    #[test]
    fn representations_circle() {
        let form = QuadForm::new(1, 0, 1).unwrap();
        let reps = representations(&form, 25, None).unwrap();
        assert!(reps.complete);
        assert_eq!(reps.reps.len(), 12);
        let expected = brute_reps(&form, 25, 6);
        assert_eq!(reps.reps, expected);

        let empty = representations(&form, -1, None).unwrap();
        assert!(empty.complete);
        assert!(empty.reps.is_empty());
    }

    #[test]
    fn representations_square_disc_divisors() {
        let form = QuadForm::new(1, 0, -1).unwrap();
        let reps = representations(&form, 9, None).unwrap();
        assert!(reps.complete);
        assert_eq!(
            reps.reps,
            vec![(-5, -4), (-5, 4), (-3, 0), (3, 0), (5, -4), (5, 4)]
        );
    }

    #[test]
    fn representations_zero_square_disc_lists_lines() {
        let form = QuadForm::new(1, 0, -1).unwrap();
        let reps = representations(&form, 0, Some(10)).unwrap();
        assert!(!reps.complete);
        assert_eq!(reps.box_bound, Some(10));
        let expected = brute_reps(&form, 0, 10);
        assert_eq!(reps.reps, expected);
    }

    #[test]
    fn representations_nonsquare_box() {
        let form = QuadForm::new(1, 0, -2).unwrap(); // Pell-type
        let reps = representations(&form, 1, Some(100)).unwrap();
        assert!(!reps.complete);
        let expected = brute_reps(&form, 1, 100);
        assert_eq!(reps.reps, expected);
        assert!(reps.reps.contains(&(3, 2)), "3^2 - 2*2^2 = 1");
    }

    #[test]
    fn negative_disc_matches_brute_force_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5d5d_0004);
        for _ in 0..200 {
            let a: i64 = rng.gen_range(1..=6);
            let b: i64 = rng.gen_range(-6..=6);
            let c_min = (b * b / (4 * a)) + 1;
            let c: i64 = rng.gen_range(c_min..=c_min + 6);
            let sign: bool = rng.gen();
            let form = if sign {
                QuadForm::new(a, b, c).unwrap()
            } else {
                QuadForm::new(-a, -b, -c).unwrap()
            };
            assert!(matches!(form.classify().class, FormClass::Negative));
            let k: i128 = rng.gen_range(-200..=200);
            let reps = representations(&form, k, None).unwrap();
            let half = isqrt(4 * (form.a() as i128 * k * form.c() as i128).unsigned_abs())
                as i128
                + 1;
            assert_eq!(reps.reps, brute_reps(&form, k, half), "form {form:?} k={k}");
        }
    }

    #[test]
    fn square_disc_count_bounded_by_divisors() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5d5d_0005);
        for _ in 0..100 {
            let (form, _) = random_square_disc_form(&mut rng);
            let k: i128 = rng.gen_range(1..=10_000);
            let reps = representations(&form, k, None).unwrap();
            let dcount = divisors(k).unwrap().len();
            // Injective map into divisor pairs (u, k/u), u ranging over 2*d(k) signs.
            assert!(
                reps.reps.len() <= 2 * dcount,
                "form {form:?} k={k}: {} reps vs {} divisors",
                reps.reps.len(),
                dcount
            );
            // Every enumerated pair solves the equation, and inside a modest
            // box the enumeration matches brute force exactly.
            for &(m, n) in &reps.reps {
                assert_eq!(form.eval(m, n), k, "form {form:?} k={k}");
            }
            let half = 80i128;
            let in_box: Vec<_> = reps
                .reps
                .iter()
                .copied()
                .filter(|&(m, n)| m.abs() <= half && n.abs() <= half)
                .collect();
            assert_eq!(in_box, brute_reps(&form, k, half), "form {form:?} k={k}");
        }
    }

    #[test]
    fn count_small_m_examples() {
        let form = QuadForm::new(1, 0, -1).unwrap();
        assert_eq!(count_small_m(&form, -9999).unwrap(), 4); // (+-1, +-100)
        assert_eq!(count_small_m(&form, 10_000).unwrap(), 0);
        assert_eq!(count_small_m(&form, 9).unwrap(), 0);
        assert!(count_small_m(&form, 0).is_err());
    }

    #[test]
    fn count_small_m_lemma_bound_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5d5d_0006);
        for _ in 0..120 {
            let (form, ff) = random_square_disc_form(&mut rng);
            let k: i128 = {
                let k: i128 = rng.gen_range(1..=1_000_000);
                if rng.gen() {
                    k
                } else {
                    -k
                }
            };
            let count = count_small_m(&form, k).unwrap();
            assert!(count <= 4, "Lemma bound violated: form {form:?} k={k}");
            // Independent recount from the exhaustive divisor-pair enumeration.
            let reps = representations(&form, k, None).unwrap();
            let delta = ff.sqrt_disc;
            let recount = reps
                .reps
                .iter()
                .filter(|(m, _)| {
                    let dm = (delta * m.abs()) as u128;
                    dm.checked_mul(dm)
                        .and_then(|t| t.checked_mul(t))
                        .map(|f| f <= k.unsigned_abs())
                        .unwrap_or(false)
                })
                .count() as u64;
            assert_eq!(count, recount, "form {form:?} k={k}");
        }
    }
}
