//! `L(1, chi)` for the characters attached to a trace: truncated Dirichlet
//! series, the class number formula at the fundamental discriminant, the
//! Euler-factor bridge between `L*(t)` and `L(t)`, and dyadic averages.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{chi_disc_unchecked, conductor_split, factorize, is_fundamental, validate_window};
use crate::characters::{CharacterHandle, CharacterMode};
use crate::error::{Error, Result};
use crate::quadforms::{class_number, ordinary_discriminant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LMethod {
    Truncated,
    ClassNumberFormula,
}

/// Default truncation length for `LMethod::Truncated`.
pub const DEFAULT_TRUNCATION: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LValueRecord {
    pub q: u64,
    pub t: i64,
    pub d_star: i64,
    pub f: u64,
    pub l_star: f64,
    pub l_full: f64,
    pub euler_product: f64,
    pub method: LMethod,
}

/// `sum_{n <= N} xi(n) / n`.
pub fn l_truncated(h: &CharacterHandle, n: u64) -> Result<f64> {
    if h.is_principal() {
        return Err(Error::PrincipalCharacter { q: h.q(), t: h.t() });
    }
    let mut acc = 0.0f64;
    for k in 1..=n {
        let c = h.xi(k as i64);
        if c != 0 {
            acc += c as f64 / k as f64;
        }
    }
    Ok(acc)
}

/// Worst-case distance between `l_truncated(h, n)` and `L(1, xi)`.
pub fn truncation_bound(modulus: u64, n: u64) -> f64 {
    let m = modulus as f64;
    2.0 * m.sqrt() * m.ln() / n as f64
}

/// `2 pi h(D*) / (w(D*) sqrt|D*|)`.
pub fn l_exact_fundamental(d_star: i64) -> Result<f64> {
    if !is_fundamental(d_star) {
        return Err(Error::NotFundamental(d_star));
    }
    let split = conductor_split(d_star)?;
    let h = class_number(d_star)? as f64;
    Ok(2.0 * PI * h / (split.w as f64 * (d_star.unsigned_abs() as f64).sqrt()))
}

/// `prod_{l | f} (1 - chi*(l) / l)` with `chi*` the character of `D*`.
pub fn euler_product(d_star: i64, f: u64) -> f64 {
    factorize(f)
        .into_iter()
        .map(|(l, _)| 1.0 - chi_disc_unchecked(d_star, l as i64) as f64 / l as f64)
        .product()
}

pub fn l_star_and_full(q: u64, t: i64) -> Result<LValueRecord> {
    let d = ordinary_discriminant(q, t)?;
    let split = conductor_split(d)?;
    let l_star = l_exact_fundamental(split.d_star)?;
    let euler = euler_product(split.d_star, split.f);
    Ok(LValueRecord {
        q,
        t,
        d_star: split.d_star,
        f: split.f,
        l_star,
        l_full: l_star * euler,
        euler_product: euler,
        method: LMethod::ClassNumberFormula,
    })
}

/// Same record with `l_full` from the truncated series of the field character.
pub fn l_record_truncated(q: u64, t: i64, n: u64) -> Result<LValueRecord> {
    let mut rec = l_star_and_full(q, t)?;
    let h = CharacterHandle::new(q, t, CharacterMode::FieldDisc)?;
    rec.l_full = l_truncated(&h, n)?;
    rec.method = LMethod::Truncated;
    Ok(rec)
}

/// `euler_product^{-1} / log log(f + 2)`, the constant in the Mertens-type bound.
pub fn mertens_ratio(rec: &LValueRecord) -> f64 {
    (1.0 / rec.euler_product) / ((rec.f as f64 + 2.0).ln().ln())
}

/// Dyadic average of `|L(t)|` over `t ~ R`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LAverage {
    pub q: u64,
    pub r: u64,
    pub method: LMethod,
    /// `sum_{t ~ R} |L(t)|`.
    pub sum: f64,
    /// `sum / R`.
    pub average: f64,
    /// `log q sqrt(log log q / log R)`.
    pub envelope: f64,
    pub ratio: f64,
    /// Whether `(log q)^2 < R` also holds.
    pub in_long_window: bool,
}

pub fn avg_abs_l(q: u64, r: u64, method: LMethod) -> Result<LAverage> {
    avg_abs_l_with(q, r, method, DEFAULT_TRUNCATION)
}

pub fn avg_abs_l_with(q: u64, r: u64, method: LMethod, truncation: u64) -> Result<LAverage> {
    let (p, _) = validate_window(q, r)?;
    if r < 2 {
        return Err(Error::InvalidWindow {
            q,
            r,
            reason: "R >= 2 needed for log R > 0",
        });
    }
    let values: Vec<f64> = (r as i64 + 1..=2 * r as i64)
        .into_par_iter()
        .map(|t| {
            if t.unsigned_abs() % p == 0 {
                return Err(Error::NotOrdinary { q, t });
            }
            let rec = match method {
                LMethod::ClassNumberFormula => l_star_and_full(q, t)?,
                LMethod::Truncated => l_record_truncated(q, t, truncation)?,
            };
            Ok(rec.l_full.abs())
        })
        .collect::<Result<_>>()?;
    let sum: f64 = values.iter().sum();
    let average = sum / r as f64;
    let lq = (q as f64).ln();
    let envelope = lq * (lq.ln() / (r as f64).ln()).sqrt();
    Ok(LAverage {
        q,
        r,
        method,
        sum,
        average,
        envelope,
        ratio: average / envelope,
        in_long_window: lq * lq < r as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::hasse_bound;
    use crate::quadforms::isogeny_class_size;

    #[test]
    fn truncated_examples() {
        let h = CharacterHandle::new(5, 1, CharacterMode::FieldDisc).unwrap();
        let v = l_truncated(&h, 100_000).unwrap();
        assert!((v - PI / 19f64.sqrt()).abs() < 1e-3);
        assert_eq!(l_truncated(&h, 1).unwrap(), 1.0);
        // t^2 - 4q = -4
        let h4 = CharacterHandle::new(5, 4, CharacterMode::FieldDisc).unwrap();
        assert_eq!(h4.discriminant(), -4);
        let v = l_truncated(&h4, 100_000).unwrap();
        assert!((v - PI / 4.0).abs() < 1e-4);
        let principal = CharacterHandle::new(5, 2, CharacterMode::PaperLiteral).unwrap();
        assert!(matches!(
            l_truncated(&principal, 10),
            Err(Error::PrincipalCharacter { .. })
        ));
    }

    #[test]
    fn exact_fundamental_examples() {
        assert!((l_exact_fundamental(-4).unwrap() - PI / 4.0).abs() < 1e-15);
        assert!((l_exact_fundamental(-3).unwrap() - 0.604_599_788_078_072_6).abs() < 1e-12);
        assert!((l_exact_fundamental(-19).unwrap() - 0.720_730_784_145_667_8).abs() < 1e-12);
        assert!(l_exact_fundamental(-12).is_err());
        assert!(l_exact_fundamental(-16).is_err());
    }

    #[test]
    fn euler_bridge_examples() {
        let r = l_star_and_full(5, 1).unwrap();
        assert_eq!(r.euler_product, 1.0);
        assert_eq!(r.l_full, r.l_star);
        let r = l_star_and_full(7, 4).unwrap();
        assert_eq!((r.d_star, r.f), (-3, 2));
        assert!((r.euler_product - 1.5).abs() < 1e-15);
        let r = l_star_and_full(5, 2).unwrap();
        assert_eq!((r.d_star, r.f), (-4, 2));
        assert!((r.euler_product - 1.0).abs() < 1e-15);
        assert!(l_star_and_full(5, 0).is_err());
    }

    #[test]
    fn truncated_series_converges_to_formula() {
        for q in [101u64, 1009] {
            for t in 1..=hasse_bound(q) {
                let Ok(rec) = l_star_and_full(q, t) else { continue };
                let trunc = l_record_truncated(q, t, 200_000).unwrap();
                let modulus = (4 * q as i64 - t * t) as u64;
                let bound = truncation_bound(modulus, 200_000);
                assert!((trunc.l_full - rec.l_full).abs() <= bound, "q={q} t={t}");
                assert!(rec.l_star > 0.0 && rec.l_full > 0.0);
            }
        }
    }

    #[test]
    fn class_number_closure() {
        // sqrt(Delta)/(2 pi) L* psi = K(t^2 - 4q)
        for q in [5u64, 7, 49, 101] {
            for t in 1..=hasse_bound(q) {
                let Ok(rec) = l_star_and_full(q, t) else { continue };
                let psi = crate::quadforms::psi_derived(q, t).unwrap();
                let psi = *psi.numer() as f64 / *psi.denom() as f64;
                let delta = (4 * q as i64 - t * t) as f64;
                let lhs = delta.sqrt() / (2.0 * PI) * rec.l_star * psi;
                let k = isogeny_class_size(q, t).unwrap() as f64;
                assert!((lhs - k).abs() <= 1e-9 * k);
            }
        }
    }

    #[test]
    fn dyadic_average_matches_direct_loop() {
        let avg = avg_abs_l(1009, 8, LMethod::ClassNumberFormula).unwrap();
        let direct: f64 = (9..=16).map(|t| l_star_and_full(1009, t).unwrap().l_full.abs()).sum();
        assert!((avg.sum - direct).abs() < 1e-12);
        assert!((avg.average - direct / 8.0).abs() < 1e-12);
        assert!(avg.average > 0.0 && avg.envelope > 0.0);
        assert!(!avg.in_long_window);
        let trunc = avg_abs_l_with(1009, 8, LMethod::Truncated, 100_000).unwrap();
        assert!((trunc.average - avg.average).abs() < 0.05);
        assert!(avg_abs_l(1009, 1, LMethod::ClassNumberFormula).is_err());
        assert!(avg_abs_l(1009, 40, LMethod::ClassNumberFormula).is_err());
    }

    #[test]
    fn mertens_ratio_is_finite() {
        for t in 1..=hasse_bound(1009) {
            if let Ok(rec) = l_star_and_full(1009, t) {
                let c = mertens_ratio(&rec);
                assert!(c.is_finite() && c > 0.0);
            }
        }
    }
}
