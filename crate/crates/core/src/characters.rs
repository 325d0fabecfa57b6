//! Quadratic characters attached to a trace `t`, their partial sums and
//! window maxima, Gauss sums `tau_r`, and the twisted sums `W_b`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{
    chi2, chi_disc_unchecked, gcd, hasse_bound, legendre, root_of_unity, validate_field_size,
    validate_window, QuadraticSymbol,
};
use crate::error::{Error, Result};
use crate::experiments::{l_condition_holds, x_parameter};

/// Moduli up to this size get a full period table.
const TABLE_LIMIT: u64 = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CharacterMode {
    /// `n -> chi_{Delta(t)}(n)`, the symbol built from the modulus `4q - t^2`.
    PaperLiteral,
    /// `n -> (t^2 - 4q / n)`, the character of the imaginary quadratic order.
    FieldDisc,
}

/// The character `xi_t` for one trace, with a cached period table for
/// moderate moduli.
#[derive(Debug, Clone)]
pub struct CharacterHandle {
    q: u64,
    t: i64,
    delta: u64,
    mode: CharacterMode,
    symbol: QuadraticSymbol,
    table: Option<Vec<i8>>,
    prefix: Option<Vec<i32>>,
}

/// Values of a completely multiplicative function on `0..n` given its
/// values at primes, via a smallest-prime-factor sieve.
fn multiplicative_table(n: usize, at_prime: impl Fn(u64) -> i8) -> Vec<i8> {
    let mut values = vec![0i8; n];
    if n > 1 {
        values[1] = 1;
    }
    let mut spf = vec![0u32; n];
    let mut primes: Vec<u32> = Vec::new();
    for m in 2..n {
        if spf[m] == 0 {
            spf[m] = m as u32;
            primes.push(m as u32);
            values[m] = at_prime(m as u64);
        } else {
            let p = spf[m] as usize;
            values[m] = values[p] * values[m / p];
        }
        for &p in &primes {
            let k = m * p as usize;
            if p > spf[m] || k >= n {
                break;
            }
            spf[k] = p;
        }
    }
    values
}

impl CharacterHandle {
    pub fn new(q: u64, t: i64, mode: CharacterMode) -> Result<Self> {
        validate_field_size(q)?;
        let bound = hasse_bound(q);
        let t2 = (t as i128) * (t as i128);
        if t == 0 || t.abs() > bound || t2 >= 4 * q as i128 {
            return Err(Error::OutOfRange {
                name: "t",
                value: t as i128,
                min: 1,
                max: bound as i128,
            });
        }
        let delta = (4 * q as i128 - t2) as u64;
        let symbol = QuadraticSymbol::new(delta);
        let mut handle = CharacterHandle {
            q,
            t,
            delta,
            mode,
            symbol,
            table: None,
            prefix: None,
        };
        if delta <= TABLE_LIMIT {
            let d = handle.discriminant();
            let table = match mode {
                CharacterMode::PaperLiteral => {
                    let sym = &handle.symbol;
                    multiplicative_table(delta as usize, |l| sym.eval(l as i64))
                }
                CharacterMode::FieldDisc => multiplicative_table(delta as usize, |l| {
                    if l == 2 {
                        chi2(d)
                    } else {
                        legendre(d, l)
                    }
                }),
            };
            let mut prefix = Vec::with_capacity(table.len() + 1);
            let mut acc = 0i32;
            prefix.push(0);
            for &v in &table {
                acc += v as i32;
                prefix.push(acc);
            }
            handle.table = Some(table);
            handle.prefix = Some(prefix);
        }
        Ok(handle)
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn t(&self) -> i64 {
        self.t
    }

    /// `Delta(t) = 4q - t^2`, the period in both modes.
    pub fn delta(&self) -> u64 {
        self.delta
    }

    pub fn mode(&self) -> CharacterMode {
        self.mode
    }

    /// `t^2 - 4q`.
    pub fn discriminant(&self) -> i64 {
        -(self.delta as i64)
    }

    pub fn is_principal(&self) -> bool {
        match self.mode {
            CharacterMode::PaperLiteral => self.symbol.is_principal(),
            CharacterMode::FieldDisc => false,
        }
    }

    pub fn xi(&self, n: i64) -> i8 {
        let m = n.rem_euclid(self.delta as i64);
        if let Some(table) = &self.table {
            return table[m as usize];
        }
        match self.mode {
            CharacterMode::PaperLiteral => self.symbol.eval(m),
            CharacterMode::FieldDisc => chi_disc_unchecked(self.discriminant(), m),
        }
    }

    /// `S_t(N) = sum_{n=1}^{N} xi(n)`.
    pub fn char_sum(&self, n: u64) -> i64 {
        if let Some(prefix) = &self.prefix {
            let full = prefix[self.delta as usize] as i64;
            let (k, r) = (n / self.delta, n % self.delta);
            // prefix[i] covers residues 0..i, and xi(0) = 0
            return k as i64 * full + prefix[r as usize + 1] as i64;
        }
        (1..=n as i64).map(|m| self.xi(m) as i64).sum()
    }

    /// `(N*, |S(N*)|)` maximizing `|S(N)|` over `L < N <= 2L`, smallest `N` on ties.
    pub fn max_char_sum(&self, l: u64) -> (u64, u64) {
        assert!(l >= 1, "L must be positive");
        let mut s = self.char_sum(l);
        let mut best = (0u64, 0u64);
        for n in l + 1..=2 * l {
            s += self.xi(n as i64) as i64;
            let v = s.unsigned_abs();
            if best.0 == 0 || v > best.1 {
                best = (n, v);
            }
        }
        best
    }
}

/// `sum_{t ~ R} max_{N ~ L} |S_t(N)|` and its normalized form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CharSumAverage {
    pub q: u64,
    pub r: u64,
    pub l: u64,
    pub mode: CharacterMode,
    pub sum_max: u64,
    pub average: f64,
    /// `L exp(-(7/8) sqrt(log R log log L))`, the per-`t` envelope; absent
    /// when `R < 2` or `L < 3` make the logarithms degenerate.
    pub envelope: Option<f64>,
    /// Whether `L` is long enough for the envelope to be claimed.
    pub l_condition: bool,
}

pub fn avg_max_char_sum(q: u64, r: u64, l: u64, mode: CharacterMode) -> Result<CharSumAverage> {
    validate_window(q, r)?;
    if l == 0 {
        return Err(Error::Invalid("L must be at least 1".into()));
    }
    let maxima: Vec<u64> = (r as i64 + 1..=2 * r as i64)
        .into_par_iter()
        .map(|t| CharacterHandle::new(q, t, mode).map(|h| h.max_char_sum(l).1))
        .collect::<Result<_>>()?;
    let sum_max: u64 = maxima.iter().sum();
    let (lr, ll) = ((r as f64).ln(), (l as f64).ln().ln());
    let envelope = (r >= 2 && l >= 3).then(|| l as f64 * (-(7.0 / 8.0) * (lr * ll).sqrt()).exp());
    let l_condition = r >= 2 && l >= 16 && l_condition_holds(x_parameter(q, r)?, r, l as u128);
    Ok(CharSumAverage {
        q,
        r,
        l,
        mode,
        sum_max,
        average: sum_max as f64 / r as f64,
        envelope,
        l_condition,
    })
}

/// `tau_r = sum_{v=1}^{r} chi_r(v) e_r(v)`.
pub fn gauss_sum(r: u64) -> Complex64 {
    let sym = QuadraticSymbol::new(r);
    (1..=r as i64)
        .map(|v| root_of_unity(r, v) * sym.eval(v) as f64)
        .sum()
}

/// `|chi_r(v) tau_r - sum_{b=1}^{r} chi_r(b) e_r(b v)|`.
///
/// Vanishes up to rounding whenever `chi_r` is periodic modulo `r`, which
/// fails only for `r = 2 mod 4`.
pub fn gauss_twist_residual(v: i64, r: u64) -> Result<f64> {
    if r == 0 {
        return Err(Error::Invalid("r must be positive".into()));
    }
    if gcd(v.unsigned_abs(), r) != 1 {
        return Err(Error::NotCoprime { v, r });
    }
    let sym = QuadraticSymbol::new(r);
    let tau: Complex64 = (1..=r as i64)
        .map(|b| root_of_unity(r, b) * sym.eval(b) as f64)
        .sum();
    let twisted: Complex64 = (1..=r as i64)
        .map(|b| root_of_unity(r, ((b as i128 * v as i128) % r as i128) as i64) * sym.eval(b) as f64)
        .sum();
    Ok((tau * sym.eval(v) as f64 - twisted).norm())
}

/// `W_b = sum_{t ~ R} |sum_{m=1}^{M} xi_t(m) e_M(b m)|`.
pub fn twisted_sum_w(q: u64, r: u64, b: i64, m: u64, mode: CharacterMode) -> Result<f64> {
    validate_window(q, r)?;
    if m == 0 || b.unsigned_abs() > m {
        return Err(Error::Invalid(format!("need M >= 1 and |b| <= M (b = {b}, M = {m})")));
    }
    let terms: Vec<f64> = (r as i64 + 1..=2 * r as i64)
        .into_par_iter()
        .map(|t| {
            let h = CharacterHandle::new(q, t, mode)?;
            let s: Complex64 = (1..=m as i64)
                .map(|n| root_of_unity(m, b * n) * h.xi(n) as f64)
                .sum();
            Ok(s.norm())
        })
        .collect::<Result<_>>()?;
    Ok(terms.iter().sum())
}
