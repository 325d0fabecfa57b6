//! Class numbers of imaginary quadratic orders by enumerating reduced
//! primitive binary quadratic forms, plus the Kronecker and Hurwitz class
//! numbers and the weight `psi(f_t)` solved out of the class-number form of
//! `I(t)`.

use num_rational::Ratio;
use serde::Serialize;

use crate::arith::{check_discriminant, conductor_split, divisors, isqrt, validate_field_size};
use crate::error::{Error, Result};

/// Reduced primitive form `a x^2 + b x y + c y^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadForm {
    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_reduced(&self) -> bool {
        let (a, b, c) = (self.a, self.b, self.c);
        b.abs() <= a && a <= c && (b >= 0 || (b.abs() != a && a != c))
    }
}

fn gcd3(a: i64, b: i64, c: i64) -> u64 {
    use num_integer::Integer;
    a.unsigned_abs()
        .gcd(&b.unsigned_abs())
        .gcd(&c.unsigned_abs())
}

/// All primitive reduced forms of discriminant `d`, ordered by `(a, b)`.
pub fn reduced_forms(d: i64) -> Result<Vec<QuadForm>> {
    check_discriminant(d)?;
    let mut forms = Vec::new();
    let n = d.unsigned_abs() as i64;
    let a_max = isqrt((n / 3) as u128) as i64;
    for a in 1..=a_max {
        for b in -a..=a {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let f = QuadForm { a, b, c: num / (4 * a) };
            if f.is_reduced() && gcd3(f.a, f.b, f.c) == 1 {
                forms.push(f);
            }
        }
    }
    Ok(forms)
}

/// Counts reduced primitive forms without materializing them.
pub fn class_number(d: i64) -> Result<u64> {
    check_discriminant(d)?;
    let n = d.unsigned_abs() as i64;
    let a_max = isqrt((n / 3) as u128) as i64;
    let mut h = 0u64;
    // b has the parity of d
    let b0 = n & 1;
    for a in 1..=a_max {
        let mut b = -a + ((a + b0) & 1);
        while b <= a {
            let num = b * b + n;
            if num % (4 * a) == 0 {
                let c = num / (4 * a);
                let reduced = c >= a && (b >= 0 || (-b != a && a != c));
                if reduced && gcd3(a, b, c) == 1 {
                    h += 1;
                }
            }
            b += 2;
        }
    }
    Ok(h)
}

/// `sum_{g | f} h(g^2 D*)`.
pub fn kronecker_class_number(d: i64) -> Result<u64> {
    let split = conductor_split(d)?;
    divisors(split.f)
        .into_iter()
        .map(|g| class_number(split.d_star * (g * g) as i64))
        .sum()
}

fn hurwitz_weight(d: i64) -> Ratio<u64> {
    match d {
        -3 => Ratio::new(1, 3),
        -4 => Ratio::new(1, 2),
        _ => Ratio::from_integer(1),
    }
}

/// Hurwitz class number `H(N)`, weights 1/3 at discriminant -3 and 1/2 at -4.
pub fn hurwitz(n: u64) -> Result<Ratio<u64>> {
    if n == 0 || n > i64::MAX as u64 {
        return Err(Error::Invalid(format!("Hurwitz class number needs N > 0, got {n}")));
    }
    let split = conductor_split(-(n as i64))?;
    let mut acc = Ratio::from_integer(0);
    for g in divisors(split.f) {
        let d = split.d_star * (g * g) as i64;
        acc += hurwitz_weight(d) * class_number(d)?;
    }
    Ok(acc)
}

/// Class-number data for one discriminant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassNumberBundle {
    pub d: i64,
    pub d_star: i64,
    pub f: u64,
    pub w: u32,
    pub h: u64,
    pub h_star: u64,
    pub kronecker: u64,
    pub hurwitz: Ratio<u64>,
}

pub fn class_number_bundle(d: i64) -> Result<ClassNumberBundle> {
    let split = conductor_split(d)?;
    Ok(ClassNumberBundle {
        d,
        d_star: split.d_star,
        f: split.f,
        w: split.w,
        h: class_number(d)?,
        h_star: class_number(split.d_star)?,
        kronecker: kronecker_class_number(d)?,
        hurwitz: hurwitz(d.unsigned_abs())?,
    })
}

/// Checks `0 < |t| < 2 sqrt q` and `p` does not divide `t`; returns `t^2 - 4q`.
pub fn ordinary_discriminant(q: u64, t: i64) -> Result<i64> {
    let (p, _) = validate_field_size(q)?;
    let t2 = (t as i128) * (t as i128);
    if t == 0 || t2 >= 4 * q as i128 || t.unsigned_abs().is_multiple_of(p) {
        return Err(Error::NotOrdinary { q, t });
    }
    Ok((t2 - 4 * q as i128) as i64)
}

/// Number of `F_q`-isomorphism classes with ordinary trace `t`, from the
/// class-number formula; valid for prime powers `q`.
pub fn isogeny_class_size(q: u64, t: i64) -> Result<u64> {
    kronecker_class_number(ordinary_discriminant(q, t)?)
}

/// `psi(f_t) = w(D*) K(t^2 - 4q) / (f_t h(D*))`.
pub fn psi_derived(q: u64, t: i64) -> Result<Ratio<u64>> {
    let d = ordinary_discriminant(q, t)?;
    let split = conductor_split(d)?;
    let k = kronecker_class_number(d)?;
    let h_star = class_number(split.d_star)?;
    Ok(Ratio::new(split.w as u64 * k, split.f * h_star))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::hasse_bound;

    fn forms(d: i64) -> Vec<(i64, i64, i64)> {
        reduced_forms(d).unwrap().iter().map(|f| (f.a, f.b, f.c)).collect()
    }

    // Counts SL2(Z)-classes by reducing every form with small coefficients.
    fn class_number_by_reduction(d: i64) -> u64 {
        fn reduce(mut a: i64, mut b: i64, mut c: i64) -> (i64, i64, i64) {
            loop {
                if c < a || (c == a && b < 0) {
                    // (a, b, c) -> (c, -b, a)
                    std::mem::swap(&mut a, &mut c);
                    b = -b;
                    continue;
                }
                if b > a || b <= -a {
                    // translate b into (-a, a]
                    let k = (a - b).div_euclid(2 * a);
                    let nb = b + 2 * a * k;
                    c += (nb * nb - b * b) / (4 * a);
                    b = nb;
                    continue;
                }
                if a == c && b < 0 {
                    b = -b;
                    continue;
                }
                return (a, b, c);
            }
        }
        let n = -d;
        let mut classes = std::collections::BTreeSet::new();
        for a in 1..=n {
            for b in -a..=a {
                if (b * b - d) % (4 * a) != 0 {
                    continue;
                }
                let c = (b * b - d) / (4 * a);
                if gcd3(a, b, c) == 1 {
                    classes.insert(reduce(a, b, c));
                }
            }
        }
        classes.len() as u64
    }

    #[test]
    fn reduced_form_examples() {
        assert_eq!(forms(-3), vec![(1, 1, 1)]);
        assert_eq!(forms(-4), vec![(1, 0, 1)]);
        assert_eq!(forms(-23), vec![(1, 1, 6), (2, -1, 3), (2, 1, 3)]);
        assert_eq!(forms(-16), vec![(1, 0, 4)]);
        assert!(reduced_forms(-5).is_err());
        assert!(reduced_forms(8).is_err());
    }

    #[test]
    fn class_number_examples() {
        assert_eq!(class_number(-19).unwrap(), 1);
        assert_eq!(class_number(-4).unwrap(), 1);
        assert_eq!(class_number(-16).unwrap(), 1);
        assert_eq!(class_number(-23).unwrap(), 3);
        assert_eq!(class_number(-47).unwrap(), 5);
        assert_eq!(class_number(-71).unwrap(), 7);
        assert_eq!(class_number(-163).unwrap(), 1);
        assert_eq!(class_number(-56).unwrap(), 4);
    }

    #[test]
    fn class_number_matches_reduction_oracle() {
        for d in (-400..0i64).filter(|d| matches!(d.rem_euclid(4), 0 | 1)) {
            let h = class_number(d).unwrap();
            assert_eq!(h, reduced_forms(d).unwrap().len() as u64);
            assert_eq!(h, class_number_by_reduction(d), "d={d}");
        }
    }

    #[test]
    fn forms_satisfy_invariants() {
        for d in (-2000..0i64).filter(|d| matches!(d.rem_euclid(4), 0 | 1)) {
            for f in reduced_forms(d).unwrap() {
                assert_eq!(f.discriminant(), d);
                assert!(f.is_reduced());
                assert_eq!(gcd3(f.a, f.b, f.c), 1);
            }
        }
    }

    #[test]
    fn kronecker_class_number_examples() {
        assert_eq!(kronecker_class_number(-19).unwrap(), 1);
        assert_eq!(kronecker_class_number(-16).unwrap(), 2);
        assert_eq!(kronecker_class_number(-12).unwrap(), 2);
    }

    #[test]
    fn hurwitz_examples() {
        assert_eq!(hurwitz(3).unwrap(), Ratio::new(1, 3));
        assert_eq!(hurwitz(4).unwrap(), Ratio::new(1, 2));
        assert_eq!(hurwitz(16).unwrap(), Ratio::new(3, 2));
        assert_eq!(hurwitz(12).unwrap(), Ratio::new(4, 3));
        assert!(hurwitz(5).is_err());
        assert!(hurwitz(0).is_err());
    }

    #[test]
    fn kronecker_hurwitz_relation_small_primes() {
        for p in [5u64, 7, 11, 13, 101, 211] {
            let bound = hasse_bound(p);
            let sum: Ratio<u64> = (-bound..=bound)
                .map(|t| hurwitz(4 * p - (t * t) as u64).unwrap())
                .sum();
            assert_eq!(sum, Ratio::from_integer(2 * p), "p={p}");
        }
    }

    #[test]
    fn bundle_relations() {
        for d in (-3000..0i64).filter(|d| matches!(d.rem_euclid(4), 0 | 1)) {
            let b = class_number_bundle(d).unwrap();
            assert!(b.kronecker >= b.h_star && b.h_star >= 1);
            let unweighted: u64 = divisors(b.f)
                .into_iter()
                .map(|g| class_number(b.d_star * (g * g) as i64).unwrap())
                .sum();
            assert_eq!(unweighted, b.kronecker);
            if b.d_star != -3 && b.d_star != -4 {
                assert_eq!(b.hurwitz, Ratio::from_integer(b.kronecker));
            } else {
                assert!(b.hurwitz < Ratio::from_integer(b.kronecker));
            }
        }
    }

    #[test]
    fn psi_examples() {
        assert_eq!(psi_derived(5, 1).unwrap(), Ratio::from_integer(2));
        assert_eq!(psi_derived(5, 2).unwrap(), Ratio::from_integer(4));
        assert_eq!(psi_derived(7, 4).unwrap(), Ratio::from_integer(6));
        assert!(psi_derived(5, 0).is_err());
        assert!(psi_derived(5, 5).is_err());
        assert!(psi_derived(25, 5).is_err());
        assert!(psi_derived(25, 3).is_ok());
        assert!(psi_derived(100, 3).is_err());
    }

    #[test]
    fn psi_lower_bound_and_unit_factor() {
        for q in [5u64, 7, 9, 25, 27, 101, 1009] {
            let bound = hasse_bound(q);
            for t in 1..=bound {
                let Ok(psi) = psi_derived(q, t) else { continue };
                assert!(psi >= Ratio::from_integer(1));
                let split = conductor_split(t * t - 4 * q as i64).unwrap();
                if split.f == 1 {
                    assert_eq!(psi, Ratio::from_integer(split.w as u64));
                }
            }
        }
    }
}
