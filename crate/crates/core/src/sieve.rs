//! Brute-force side of the large sieve with moduli `Delta(t) = 4q - t^2`:
//! the trigonometric polynomial and the sieve sum over coprime Farey
//! points, the Farey-point counter `P(alpha)`, quadratic Gauss sums, the
//! restricted multiple divisor function and the coefficients `rho_{b,nu}`.

use std::collections::HashMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::arith::{divisors, e, euler_phi, gcd, root_of_unity, validate_window};
use crate::error::{Error, Result};

/// Size guard for the sieve sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SieveLimits {
    pub max_q: u64,
    pub max_r: u64,
    pub max_n: usize,
}

impl Default for SieveLimits {
    fn default() -> Self {
        SieveLimits {
            max_q: 20_011,
            max_r: 64,
            max_n: 4096,
        }
    }
}

/// Coefficients `alpha_1..alpha_N` together with the window `t ~ R`.
#[derive(Debug, Clone, PartialEq)]
pub struct SieveInstance {
    q: u64,
    r: u64,
    coeffs: Vec<Complex64>,
    z: f64,
}

impl SieveInstance {
    pub fn new(q: u64, r: u64, coeffs: Vec<Complex64>) -> Result<Self> {
        validate_window(q, r)?;
        if coeffs.is_empty() {
            return Err(Error::Invalid("need at least one coefficient".into()));
        }
        let z = coeffs.iter().map(|c| c.norm_sqr()).sum();
        Ok(SieveInstance { q, r, coeffs, z })
    }

    /// Coefficients with real and imaginary parts uniform in `[-1, 1)`.
    pub fn random(q: u64, r: u64, n: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        Self::new(q, r, coeffs)
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `Z = sum |alpha_n|^2`.
    pub fn z(&self) -> f64 {
        self.z
    }

    /// The moduli `Delta(t)` for `t ~ R`, in increasing `t`.
    pub fn moduli(&self) -> Vec<u64> {
        (self.r + 1..=2 * self.r)
            .map(|t| 4 * self.q - t * t)
            .collect()
    }

    /// `T(x) = sum_n alpha_n e(n x)`.
    pub fn trig_poly(&self, x: f64) -> Complex64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| c * e((i as f64 + 1.0) * x))
            .sum()
    }

    /// `T(a / m)` with the phases reduced exactly modulo `m`.
    pub fn trig_poly_at(&self, a: u64, m: u64) -> Complex64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let k = ((i as u128 + 1) * a as u128 % m as u128) as i64;
                c * root_of_unity(m, k)
            })
            .sum()
    }

    /// `T(a / m)` for every `a` in `0..m`, by folding the coefficients modulo
    /// `m` and one inverse DFT.
    pub fn values_at_modulus(&self, m: u64) -> Vec<Complex64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); m as usize];
        for (i, &c) in self.coeffs.iter().enumerate() {
            buf[(i + 1) % m as usize] += c;
        }
        let mut planner = FftPlanner::new();
        planner.plan_fft_inverse(m as usize).process(&mut buf);
        buf
    }

    fn inner(&self, m: u64, coprime_only: bool) -> f64 {
        self.values_at_modulus(m)
            .iter()
            .enumerate()
            .filter(|&(a, _)| !coprime_only || gcd(a as u64, m) == 1)
            .map(|(_, v)| v.norm_sqr())
            .sum()
    }

    /// Inner sum for one modulus `Delta(t)`; `coprime_only = false` drops
    /// the condition `gcd(a, Delta) = 1`.
    pub fn inner_sum(&self, t: u64, coprime_only: bool) -> f64 {
        self.inner(4 * self.q - t * t, coprime_only)
    }

    fn check_limits(&self, limits: &SieveLimits) -> Result<()> {
        if self.q > limits.max_q || self.r > limits.max_r || self.n() > limits.max_n {
            return Err(Error::InstanceTooLarge(format!(
                "sieve instance q = {}, R = {}, N = {} exceeds q <= {}, R <= {}, N <= {}",
                self.q,
                self.r,
                self.n(),
                limits.max_q,
                limits.max_r,
                limits.max_n
            )));
        }
        Ok(())
    }

    fn window_sum(&self, coprime_only: bool) -> f64 {
        let parts: Vec<f64> = self
            .moduli()
            .into_par_iter()
            .map(|m| self.inner(m, coprime_only))
            .collect();
        parts.iter().sum()
    }
}

/// `sum_{t ~ R} sum_{a <= Delta(t), gcd(a, Delta(t)) = 1} |T(a / Delta(t))|^2`.
pub fn sieve_lhs(inst: &SieveInstance) -> Result<f64> {
    sieve_lhs_with_limits(inst, &SieveLimits::default())
}

pub fn sieve_lhs_with_limits(inst: &SieveInstance, limits: &SieveLimits) -> Result<f64> {
    inst.check_limits(limits)?;
    Ok(inst.window_sum(true))
}

/// The sieve sum over all residues `a`, coprime or not.
pub fn sieve_lhs_full_residue(inst: &SieveInstance) -> Result<f64> {
    inst.check_limits(&SieveLimits::default())?;
    Ok(inst.window_sum(false))
}

/// Point-by-point evaluation with `trig_poly_at`; quadratic in the moduli.
pub fn sieve_lhs_direct(inst: &SieveInstance) -> f64 {
    inst.moduli()
        .into_iter()
        .map(|m| {
            (1..=m)
                .filter(|&a| gcd(a, m) == 1)
                .map(|a| inst.trig_poly_at(a, m).norm_sqr())
                .sum::<f64>()
        })
        .sum()
}

/// Upper envelopes for `sieve_lhs / Z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SieveEnvelopes {
    /// `qR + N + min(sqrt(R) N + sqrt(q) N^{3/4}, sqrt(N) q)`.
    pub paper: f64,
    /// `q^2 + N`.
    pub classical: f64,
    /// `qR + N`.
    pub conjecture: f64,
}

pub fn sieve_envelopes(q: u64, r: u64, n: usize) -> SieveEnvelopes {
    let (q, r, n) = (q as f64, r as f64, n as f64);
    let short = (r.sqrt() * n + q.sqrt() * n.powf(0.75)).min(n.sqrt() * q);
    SieveEnvelopes {
        paper: q * r + n + short,
        classical: q * q + n,
        conjecture: q * r + n,
    }
}

/// Shortest distance from `a / m` to `alpha` on the circle `R / Z`.
fn circle_distance(a: u64, m: u64, alpha: f64) -> f64 {
    let x = a as f64 / m as f64 - alpha;
    (x - x.round()).abs()
}

/// `P(alpha)`: fractions `a / Delta(t)` in lowest terms, `t ~ R`, within
/// circle distance `d` of `alpha`.
pub fn farey_near_count(q: u64, r: u64, alpha: f64, d: f64) -> Result<u64> {
    validate_window(q, r)?;
    if !(d > 0.0 && d <= 0.5) || !alpha.is_finite() {
        return Err(Error::Invalid(format!("need 0 < D <= 1/2 and finite alpha (D = {d})")));
    }
    let moduli: Vec<u64> = (r + 1..=2 * r).map(|t| 4 * q - t * t).collect();
    let counts: Vec<u64> = moduli
        .into_par_iter()
        .map(|m| {
            if d >= 0.5 {
                return euler_phi(m);
            }
            let near = |a: u64| gcd(a, m) == 1 && circle_distance(a, m, alpha) <= d;
            let centre = alpha * m as f64;
            let span = d * m as f64;
            let lo = (centre - span).floor() as i64 - 1;
            let hi = (centre + span).ceil() as i64 + 1;
            if hi - lo + 1 >= m as i64 {
                (1..=m).filter(|&a| near(a)).count() as u64
            } else {
                (lo..=hi)
                    .map(|a| match a.rem_euclid(m as i64) as u64 {
                        0 => m,
                        x => x,
                    })
                    .filter(|&a| near(a))
                    .count() as u64
            }
        })
        .collect();
    Ok(counts.iter().sum())
}

/// `G(a, l; c) = sum_{d=1}^{c} e((a d^2 + l d) / c)`.
pub fn quad_gauss(a: i64, l: i64, c: u64) -> Complex64 {
    assert!(c >= 1, "c must be positive");
    let cm = c as i128;
    (1..=c as i128)
        .map(|d| {
            let k = ((a as i128 % cm) * (d * d % cm) + (l as i128 % cm) * d).rem_euclid(cm);
            root_of_unity(c, k as i64)
        })
        .sum()
}

/// `d_{nu,M}(k)`: ordered factorizations `k = m_1 ... m_nu` with `1 <= m_i <= M`.
pub fn multi_divisor(k: u64, nu: u32, m: u64) -> u128 {
    assert!(k >= 1 && nu >= 1 && m >= 1, "k, nu, M must be positive");
    let divs = divisors(k);
    let index: HashMap<u64, usize> = divs.iter().enumerate().map(|(i, &d)| (d, i)).collect();
    let mut ways = vec![0u128; divs.len()];
    ways[0] = 1;
    for _ in 0..nu {
        let mut next = vec![0u128; divs.len()];
        for (i, &d) in divs.iter().enumerate() {
            if ways[i] == 0 {
                continue;
            }
            let rest = k / d;
            for &f in divs.iter().take_while(|&&f| f <= m.min(rest)) {
                if rest.is_multiple_of(f) {
                    next[index[&(d * f)]] += ways[i];
                }
            }
        }
        ways = next;
    }
    ways[divs.len() - 1]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaraevCheck {
    pub nu: u32,
    pub m: u64,
    pub lhs: u128,
    pub rhs: f64,
    pub ok: bool,
}

/// Largest `M^nu` accepted by `garaev_check`.
pub const GARAEV_MAX_RANGE: u64 = 10_000_000;

/// `sum_{k <= M^nu} d_{nu,M}(k)^2` against `M^nu (e log M / nu + e)^{nu^2}`.
pub fn garaev_check(nu: u32, m: u64) -> Result<GaraevCheck> {
    if nu == 0 || m == 0 {
        return Err(Error::Invalid("nu and M must be positive".into()));
    }
    let range = (m as u128)
        .checked_pow(nu)
        .filter(|&x| x <= GARAEV_MAX_RANGE as u128)
        .ok_or_else(|| {
            Error::InstanceTooLarge(format!("M^nu = {m}^{nu} exceeds {GARAEV_MAX_RANGE}"))
        })? as usize;
    let mut counts = vec![0u64; range + 1];
    for x in counts.iter_mut().take(m as usize + 1).skip(1) {
        *x = 1;
    }
    for _ in 1..nu {
        let mut next = vec![0u64; range + 1];
        for (k, &c) in counts.iter().enumerate().skip(1) {
            if c == 0 {
                continue;
            }
            for f in 1..=m as usize {
                let km = k * f;
                if km > range {
                    break;
                }
                next[km] += c;
            }
        }
        counts = next;
    }
    let lhs: u128 = counts.iter().map(|&c| (c as u128) * (c as u128)).sum();
    let (mf, nuf) = (m as f64, nu as f64);
    let base = std::f64::consts::E * mf.ln() / nuf + std::f64::consts::E;
    let rhs = mf.powf(nuf) * base.powf(nuf * nuf);
    Ok(GaraevCheck {
        nu,
        m,
        lhs,
        rhs,
        ok: (lhs as f64) <= rhs,
    })
}

/// `rho_{b,nu}(k) = sum over m_1 ... m_nu = k, m_i <= M of e_M(b (m_1 + ... + m_nu))`.
pub fn rho_coeff(b: i64, nu: u32, m: u64, k: u64) -> Result<Complex64> {
    if k == 0 || nu == 0 || m == 0 {
        return Err(Error::Invalid("k, nu, M must be positive".into()));
    }
    let divs = divisors(k);
    let work = (nu as u128) * (divs.len() as u128).pow(2) * m as u128;
    if work > 1_000_000_000 {
        return Err(Error::InstanceTooLarge(format!(
            "rho_(b,nu)(k) with nu = {nu}, M = {m}, k = {k}"
        )));
    }
    let index: HashMap<u64, usize> = divs.iter().enumerate().map(|(i, &d)| (d, i)).collect();
    let width = m as usize;
    // ways[i][s]: partial products equal to divs[i] with digit sum = s mod M
    let mut ways = vec![vec![0u128; width]; divs.len()];
    ways[0][0] = 1;
    for _ in 0..nu {
        let mut next = vec![vec![0u128; width]; divs.len()];
        for (i, &d) in divs.iter().enumerate() {
            let rest = k / d;
            for &f in divs.iter().take_while(|&&f| f <= m.min(rest)) {
                if !rest.is_multiple_of(f) {
                    continue;
                }
                let j = index[&(d * f)];
                let shift = (f % m) as usize;
                for s in 0..width {
                    let w = ways[i][s];
                    if w != 0 {
                        next[j][(s + shift) % width] += w;
                    }
                }
            }
        }
        ways = next;
    }
    Ok(ways[divs.len() - 1]
        .iter()
        .enumerate()
        .filter(|(_, &w)| w != 0)
        .map(|(s, &w)| root_of_unity(m, ((b as i128 * s as i128) % m as i128) as i64) * w as f64)
        .sum())
}
