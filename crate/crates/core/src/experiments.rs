//! Window statistics of `iota(t)`: the dyadic-window average against its
//! `log q / sqrt(log R) (log log q)^{7/2}` envelope, Sato-Tate window
//! masses, and the parameters `X` and the least admissible `L` used by the
//! character-sum bounds.

use std::f64::consts::PI;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::arith::{hasse_bound, isqrt_ceil, validate_field_size, validate_window};
use crate::census::TraceTable;
use crate::error::{Error, Result};
use crate::quadforms::isogeny_class_size;

/// Source of exact class counts `I(t)` for a fixed field size.
pub trait ClassCounts: Sync {
    fn field_size(&self) -> u64;
    fn class_count(&self, t: i64) -> Result<u64>;
}

impl ClassCounts for TraceTable {
    fn field_size(&self) -> u64 {
        self.p
    }

    fn class_count(&self, t: i64) -> Result<u64> {
        Ok(self.count(t))
    }
}

/// Class counts from Kronecker class numbers, for any prime power `q`.
/// Traces divisible by `p` count zero unless a supersingular curve has that
/// trace, in which case the count is not available.
#[derive(Debug, Clone, Copy)]
pub struct FormulaCounts {
    q: u64,
    p: u64,
    k: u32,
    bound: i64,
}

impl FormulaCounts {
    pub fn new(q: u64) -> Result<Self> {
        let (p, k) = validate_field_size(q)?;
        Ok(FormulaCounts {
            q,
            p,
            k,
            bound: hasse_bound(q),
        })
    }

    /// Nonzero supersingular traces with `t^2 < 4q` that occur over `F_q`.
    fn is_supersingular_trace(&self, t: i64) -> bool {
        let t2 = (t as i128).pow(2);
        let q = self.q as i128;
        if self.k.is_multiple_of(2) {
            t2 == q && self.p % 3 != 1
        } else {
            (self.p == 2 && t2 == 2 * q) || (self.p == 3 && t2 == 3 * q)
        }
    }
}

impl ClassCounts for FormulaCounts {
    fn field_size(&self) -> u64 {
        self.q
    }

    fn class_count(&self, t: i64) -> Result<u64> {
        if t.abs() > self.bound {
            return Ok(0);
        }
        if t != 0 && t.unsigned_abs().is_multiple_of(self.p) && !self.is_supersingular_trace(t) {
            return Ok(0);
        }
        isogeny_class_size(self.q, t)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub command: String,
    pub params: Map<String, Value>,
    pub statistic: f64,
    pub envelope: f64,
    pub ratio: f64,
    pub seed: Option<u64>,
}

impl ReportRow {
    pub fn new(command: &str, params: Map<String, Value>, statistic: f64, envelope: f64) -> Self {
        let ratio = if envelope > 0.0 {
            statistic / envelope
        } else {
            f64::NAN
        };
        ReportRow {
            command: command.to_string(),
            params,
            statistic,
            envelope,
            ratio,
            seed: None,
        }
    }
}

/// A dyadic window `R < t <= 2R` inside the Hasse interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WindowSpec {
    pub q: u64,
    pub r: u64,
}

impl WindowSpec {
    pub fn new(q: u64, r: u64) -> Result<Self> {
        validate_window(q, r)?;
        Ok(WindowSpec { q, r })
    }

    pub fn traces(&self) -> std::ops::RangeInclusive<i64> {
        self.r as i64 + 1..=2 * self.r as i64
    }
}

fn iota_scale(q: u64) -> f64 {
    0.5 * (q as f64).sqrt()
}

/// Sum of `I(t)` and of `iota(t)` over `lo < t <= hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WindowSum {
    pub count: u64,
    pub class_total: u64,
    pub sum_iota: f64,
}

pub fn window_sum(counts: &dyn ClassCounts, lo: i64, hi: i64) -> Result<WindowSum> {
    let mut class_total = 0u64;
    for t in lo + 1..=hi {
        class_total += counts.class_count(t)?;
    }
    Ok(WindowSum {
        count: (hi - lo).max(0) as u64,
        class_total,
        sum_iota: class_total as f64 / iota_scale(counts.field_size()),
    })
}

/// `log q / sqrt(log R) * (log log q)^{7/2}`.
pub fn theorem_envelope(q: u64, r: u64) -> f64 {
    let lq = (q as f64).ln();
    lq / (r as f64).ln().sqrt() * lq.ln().powf(3.5)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WindowAverage {
    pub q: u64,
    pub r: u64,
    pub count: u64,
    pub class_total: u64,
    pub sum_iota: f64,
    pub avg_iota: f64,
    pub envelope: f64,
    pub ratio: f64,
}

fn check_counts_source(w: &WindowSpec, counts: &dyn ClassCounts) -> Result<()> {
    if counts.field_size() != w.q {
        return Err(Error::Invalid(format!(
            "class counts are for q = {}, window is for q = {}",
            counts.field_size(),
            w.q
        )));
    }
    if w.r < 2 {
        return Err(Error::InvalidWindow {
            q: w.q,
            r: w.r,
            reason: "R >= 2 needed for log R > 0",
        });
    }
    Ok(())
}

/// `(1/R) sum_{t ~ R} iota(t)` with its envelope.
pub fn window_average(w: &WindowSpec, counts: &dyn ClassCounts) -> Result<WindowAverage> {
    check_counts_source(w, counts)?;
    let s = window_sum(counts, w.r as i64, 2 * w.r as i64)?;
    Ok(average_from_sum(w, s))
}

/// The same average over the negative window `-2R <= t < -R`.
pub fn mirror_window_average(w: &WindowSpec, counts: &dyn ClassCounts) -> Result<WindowAverage> {
    check_counts_source(w, counts)?;
    let s = window_sum(counts, -2 * w.r as i64 - 1, -(w.r as i64) - 1)?;
    Ok(average_from_sum(w, s))
}

fn average_from_sum(w: &WindowSpec, s: WindowSum) -> WindowAverage {
    let avg = s.sum_iota / w.r as f64;
    let envelope = theorem_envelope(w.q, w.r);
    WindowAverage {
        q: w.q,
        r: w.r,
        count: s.count,
        class_total: s.class_total,
        sum_iota: s.sum_iota,
        avg_iota: avg,
        envelope,
        ratio: avg / envelope,
    }
}

pub fn theorem_window_average(w: &WindowSpec, counts: &dyn ClassCounts) -> Result<ReportRow> {
    let a = window_average(w, counts)?;
    let mut params = Map::new();
    params.insert("q".into(), json!(a.q));
    params.insert("R".into(), json!(a.r));
    params.insert("count".into(), json!(a.count));
    params.insert("class_total".into(), json!(a.class_total));
    params.insert("sum_iota".into(), json!(a.sum_iota));
    Ok(ReportRow::new("theorem", params, a.avg_iota, a.envelope))
}

/// Windows `(1, 2], (2, 4], (4, 8], ...` up to `T`, with their exact class
/// totals; together they partition `(1, T]`.
pub fn dyadic_partition(counts: &dyn ClassCounts) -> Result<Vec<(u64, WindowSum)>> {
    let bound = hasse_bound(counts.field_size());
    let mut out = Vec::new();
    let mut r = 1i64;
    while r < bound {
        out.push((r as u64, window_sum(counts, r, (2 * r).min(bound))?));
        r *= 2;
    }
    Ok(out)
}

/// `ln p (ln ln p)^2`, the individual upper envelope for `iota(t)`.
pub fn individual_envelope(p: u64) -> f64 {
    let lp = (p as f64).ln();
    lp * lp.ln().powi(2)
}

/// `max_t iota(t) / (ln p (ln ln p)^2)` over the whole Hasse interval.
pub fn max_iota_ratio(table: &TraceTable) -> f64 {
    let scale = iota_scale(table.p) * individual_envelope(table.p);
    table.counts.iter().copied().max().unwrap_or(0) as f64 / scale
}

/// Sato-Tate mass `(2/pi) int sin^2` over `cos(theta)` in `[alpha, beta]`.
pub fn mu_density(alpha: f64, beta: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&alpha) || !(-1.0..=1.0).contains(&beta) || alpha > beta {
        return Err(Error::Invalid(format!(
            "need -1 <= alpha <= beta <= 1 (alpha = {alpha}, beta = {beta})"
        )));
    }
    let antiderivative = |theta: f64| (theta - theta.sin() * theta.cos()) / 2.0;
    Ok(2.0 / PI * (antiderivative(alpha.acos()) - antiderivative(beta.acos())))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SatoTateRow {
    pub q: u64,
    pub alpha: f64,
    pub beta: f64,
    /// `sum_{alpha T <= t <= beta T} iota(t) / T`.
    pub statistic: f64,
    pub mu: f64,
    /// Full-interval mass `statistic(-1, 1) / mu(-1, 1)`.
    pub c: f64,
    /// `statistic / (c mu)`.
    pub ratio: f64,
}

fn sato_tate_mass(table: &TraceTable, alpha: f64, beta: f64) -> f64 {
    let bound = table.bound;
    let tf = bound as f64;
    let lo = (alpha * tf).ceil() as i64;
    let hi = (beta * tf).floor() as i64;
    let classes: u64 = (lo..=hi).map(|t| table.count(t)).sum();
    classes as f64 / iota_scale(table.p) / tf
}

pub fn sato_tate_compare(table: &TraceTable, alpha: f64, beta: f64) -> Result<SatoTateRow> {
    if alpha >= beta {
        return Err(Error::Invalid(format!("need alpha < beta (alpha = {alpha}, beta = {beta})")));
    }
    let mu = mu_density(alpha, beta)?;
    let c = sato_tate_mass(table, -1.0, 1.0) / mu_density(-1.0, 1.0)?;
    let statistic = sato_tate_mass(table, alpha, beta);
    Ok(SatoTateRow {
        q: table.p,
        alpha,
        beta,
        statistic,
        mu,
        c,
        ratio: statistic / (c * mu),
    })
}

/// `X = ceil(max(q sqrt(R), q^2 / R^2))`, exact.
pub fn x_parameter(q: u64, r: u64) -> Result<u128> {
    if r < 2 {
        return Err(Error::OutOfRange {
            name: "R",
            value: r as i128,
            min: 2,
            max: i64::MAX as i128,
        });
    }
    let (q, r) = (q as u128, r as u128);
    let first = isqrt_ceil(q * q * r);
    let second = (q * q).div_ceil(r * r);
    Ok(first.max(second))
}

/// `log L / sqrt(log log L) >= 4 log X / sqrt(log R)`.
pub fn l_condition_holds(x: u128, r: u64, l: u128) -> bool {
    let ll = (l as f64).ln();
    ll / ll.ln().sqrt() >= 4.0 * (x as f64).ln() / (r as f64).ln().sqrt()
}

/// Least `L >= 16` satisfying the length condition; bracketing by doubling,
/// then bisection (the left side is increasing for `L >= 16`).
pub fn l_threshold(q: u64, r: u64) -> Result<u128> {
    let x = x_parameter(q, r)?;
    let mut hi: u128 = 16;
    if l_condition_holds(x, r, hi) {
        return Ok(hi);
    }
    while !l_condition_holds(x, r, hi) {
        if hi > u128::MAX / 4 {
            return Err(Error::InstanceTooLarge(format!(
                "L threshold for q = {q}, R = {r} exceeds 128 bits"
            )));
        }
        hi *= 2;
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if l_condition_holds(x, r, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::{census, iota};

    #[test]
    fn theorem_window_examples() {
        let table = census(5).unwrap();
        assert!(WindowSpec::new(5, 1).is_ok());
        let w1 = WindowSpec::new(5, 1).unwrap();
        assert!(theorem_window_average(&w1, &table).is_err());
        let w2 = WindowSpec::new(5, 2).unwrap();
        let a = window_average(&w2, &table).unwrap();
        assert_eq!((table.count(3), table.count(4)), (1, 1));
        assert_eq!(a.class_total, 2);
        assert!((a.avg_iota - (iota(&table, 3) + iota(&table, 4)) / 2.0).abs() < 1e-15);
        assert!(WindowSpec::new(5, 3).is_err());
        assert!(WindowSpec::new(5, 0).is_err());
    }

    #[test]
    fn window_average_matches_census() {
        let table = census(101).unwrap();
        let w = WindowSpec::new(101, 4).unwrap();
        let a = window_average(&w, &table).unwrap();
        let direct: f64 = (5..=8).map(|t| iota(&table, t)).sum::<f64>() / 4.0;
        assert!((a.avg_iota - direct).abs() < 1e-12);
        let m = mirror_window_average(&w, &table).unwrap();
        assert_eq!(m.class_total, a.class_total);
        let formula = FormulaCounts::new(101).unwrap();
        let f = window_average(&w, &formula).unwrap();
        assert_eq!(f.class_total, a.class_total);
        let row = theorem_window_average(&w, &table).unwrap();
        assert!((row.ratio - row.statistic / row.envelope).abs() < 1e-12);
        let other = census(103).unwrap();
        assert!(window_average(&w, &other).is_err());
    }

    #[test]
    fn dyadic_partition_reconstructs_sum() {
        let table = census(1009).unwrap();
        let parts = dyadic_partition(&table).unwrap();
        let total: u64 = parts.iter().map(|(_, s)| s.class_total).sum();
        let direct: u64 = (2..=table.bound).map(|t| table.count(t)).sum();
        assert_eq!(total, direct);
        let iota_total: f64 = parts.iter().map(|(_, s)| s.sum_iota).sum();
        let iota_direct: f64 = (2..=table.bound).map(|t| iota(&table, t)).sum();
        assert!((iota_total - iota_direct).abs() < 1e-9);
    }

    #[test]
    fn prime_power_windows_use_formula() {
        let counts = FormulaCounts::new(3u64.pow(7)).unwrap();
        let w = WindowSpec::new(2187, 4).unwrap();
        assert!(window_average(&w, &counts).is_ok());
        assert_eq!(counts.class_count(6).unwrap(), 0);
        // 81 = sqrt(3 q) is a supersingular trace
        let w = WindowSpec::new(2187, 46).unwrap();
        assert!(matches!(window_average(&w, &counts), Err(Error::NotOrdinary { .. })));
        // prime q: formula and census agree on every nonzero trace
        let table = census(211).unwrap();
        let formula = FormulaCounts::new(211).unwrap();
        for t in 1..=table.bound {
            assert_eq!(formula.class_count(t).unwrap(), table.count(t));
        }
    }

    #[test]
    fn mu_examples() {
        assert!((mu_density(-1.0, 1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((mu_density(0.0, 1.0).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(mu_density(0.3, 0.3).unwrap(), 0.0);
        assert!(mu_density(0.5, 0.1).is_err());
        assert!(mu_density(-1.5, 0.1).is_err());
        let a = mu_density(-1.0, -0.5).unwrap();
        let b = mu_density(0.5, 1.0).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert!((a - (1.0 / 3.0 - 3f64.sqrt() / (4.0 * PI))).abs() < 1e-12);
        // simpson quadrature as a second route
        let n = 2000;
        let (lo, hi) = (0.5f64.acos(), 0.2f64.acos());
        let h = (hi - lo) / n as f64;
        let f = |x: f64| x.sin().powi(2);
        let mut s = f(lo) + f(hi);
        for i in 1..n {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(lo + i as f64 * h);
        }
        let quad = 2.0 / PI * s * h / 3.0;
        assert!((mu_density(0.2, 0.5).unwrap() - quad).abs() < 1e-10);
    }

    #[test]
    fn sato_tate_additivity() {
        let table = census(1009).unwrap();
        let whole = sato_tate_compare(&table, -1.0, 1.0).unwrap();
        assert!((whole.ratio - 1.0).abs() < 1e-12);
        let max_iota = table.counts.iter().copied().max().unwrap() as f64 / (0.5 * 1009f64.sqrt());
        let tf = table.bound as f64;
        let a = sato_tate_compare(&table, -0.3, 0.2).unwrap().statistic;
        let b = sato_tate_compare(&table, 0.2, 0.7).unwrap().statistic;
        let ab = sato_tate_compare(&table, -0.3, 0.7).unwrap().statistic;
        assert!((ab - (a + b)).abs() <= 2.0 * max_iota / tf);
        assert!(sato_tate_compare(&table, 0.5, 0.5).is_err());
    }

    #[test]
    fn x_parameter_examples() {
        assert_eq!(x_parameter(100, 4).unwrap(), 625);
        assert_eq!(x_parameter(100, 16).unwrap(), 400);
        assert_eq!(x_parameter(10, 2).unwrap(), 25);
        // ceil(10 * sqrt(3)) = 18, ceil(100 / 9) = 12
        assert_eq!(x_parameter(10, 3).unwrap(), 18);
        assert!(x_parameter(100, 1).is_err());
    }

    #[test]
    fn l_threshold_is_least_and_monotone() {
        for q in [100u64, 1009, 10007] {
            let mut last: Option<u128> = None;
            let mut found = 0;
            for r in 2..((q as f64).sqrt() as u64) {
                // small R can push the threshold past 128 bits
                let l = match l_threshold(q, r) {
                    Ok(l) => l,
                    Err(Error::InstanceTooLarge(_)) => {
                        assert!(last.is_none(), "q={q} R={r}");
                        continue;
                    }
                    Err(e) => panic!("{e}"),
                };
                let x = x_parameter(q, r).unwrap();
                assert!(l_condition_holds(x, r, l));
                assert!(l == 16 || !l_condition_holds(x, r, l - 1));
                assert!(last.is_none_or(|prev| l <= prev), "q={q} R={r}");
                last = Some(l);
                found += 1;
            }
            assert!(found > 0, "q={q}");
        }
    }

    #[test]
    fn individual_envelope_dominates() {
        for p in [101u64, 1009] {
            let t = census(p).unwrap();
            let r = max_iota_ratio(&t);
            assert!(r > 0.0 && r < 1.0, "p={p} ratio={r}");
        }
    }
}
