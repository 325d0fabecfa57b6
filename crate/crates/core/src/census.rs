//! Isomorphism classes of short Weierstrass curves `y^2 = x^3 + a x + b`
//! over a prime field and the trace table `t -> I(t)`.
//!
//! Classes are orbits of `(a, b) -> (u^4 a, u^6 b)`, `u` in `F_p^*`. Each
//! orbit is represented by its lexicographically least pair. Minimizing the
//! first coordinate only needs the coset of `a` modulo fourth powers; once
//! `a` is minimal, the remaining freedom is `u^4 = 1` (or all of `F_p^*`
//! when `a = 0`), which fixes the least `b`.

use std::collections::BTreeMap;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{gcd, hasse_bound, is_prime, pow_mod};
use crate::error::{Error, Result};

/// Default upper limit on the census prime.
pub const DEFAULT_MAX_P: u64 = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CurveEq {
    pub p: u64,
    pub a: u64,
    pub b: u64,
}

impl CurveEq {
    pub fn new(p: u64, a: u64, b: u64) -> Result<Self> {
        check_census_prime(p, u64::MAX)?;
        let (a, b) = (a % p, b % p);
        if is_singular(p, a, b) {
            return Err(Error::SingularCurve { p, a, b });
        }
        Ok(CurveEq { p, a, b })
    }
}

fn is_singular(p: u64, a: u64, b: u64) -> bool {
    let p = p as u128;
    let (a, b) = (a as u128, b as u128);
    (4 * (a * a % p) * a + 27 * (b * b % p)).is_multiple_of(p)
}

fn check_census_prime(p: u64, max_p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::NotPrime { name: "p", value: p });
    }
    if p <= 3 || p > max_p {
        return Err(Error::OutOfRange {
            name: "p",
            value: p as i128,
            min: 5,
            max: max_p as i128,
        });
    }
    Ok(())
}

/// Quadratic character of `F_p` as a lookup table, plus cubes.
struct FieldTables {
    p: u64,
    chi: Vec<i8>,
    cube: Vec<u32>,
}

impl FieldTables {
    fn new(p: u64) -> Self {
        let n = p as usize;
        let mut chi = vec![-1i8; n];
        chi[0] = 0;
        for x in 1..=(p - 1) / 2 {
            chi[(x * x % p) as usize] = 1;
        }
        let cube = (0..p).map(|x| (x * x % p * x % p) as u32).collect();
        FieldTables { p, chi, cube }
    }

    /// `t = -sum_x chi(x^3 + a x + b)`.
    fn trace(&self, a: u64, b: u64) -> i64 {
        let p = self.p as u32;
        let (a, b) = (a as u32, b as u32);
        let mut ax = 0u32;
        let mut s = 0i64;
        for x in 0..self.p as usize {
            let mut v = self.cube[x] + ax;
            if v >= p {
                v -= p;
            }
            v += b;
            if v >= p {
                v -= p;
            }
            s += self.chi[v as usize] as i64;
            ax += a;
            if ax >= p {
                ax -= p;
            }
        }
        -s
    }
}

pub fn trace_of_curve(curve: &CurveEq) -> i64 {
    FieldTables::new(curve.p).trace(curve.a, curve.b)
}

/// Coset structure of `F_p^*` needed for canonical representatives.
struct OrbitTables {
    p: u64,
    min_mod_fourth: Vec<u32>,
    min_mod_sixth: Vec<u32>,
    mu4: Vec<u64>,
    mu12: Vec<u64>,
}

fn generator(p: u64) -> u64 {
    let factors = crate::arith::factorize(p - 1);
    (2..p)
        .find(|&g| factors.iter().all(|&(l, _)| pow_mod(g, (p - 1) / l, p) != 1))
        .expect("prime field has a generator")
}

/// For each `x != 0`, the least element of `x * (F_p^*)^k`.
fn coset_minima(p: u64, dlog: &[u64], k: u64) -> Vec<u32> {
    let d = gcd(k, p - 1);
    let mut least = vec![u32::MAX; d as usize];
    for x in 1..p {
        let c = (dlog[x as usize] % d) as usize;
        least[c] = least[c].min(x as u32);
    }
    let mut out = vec![0u32; p as usize];
    for x in 1..p {
        out[x as usize] = least[(dlog[x as usize] % d) as usize];
    }
    out
}

fn roots_of_unity(p: u64, g: u64, n: u64) -> Vec<u64> {
    let d = gcd(n, p - 1);
    let h = pow_mod(g, (p - 1) / d, p);
    let mut out = Vec::with_capacity(d as usize);
    let mut x = 1;
    for _ in 0..d {
        out.push(x);
        x = x * h % p;
    }
    out
}

impl OrbitTables {
    fn new(p: u64) -> Self {
        let g = generator(p);
        let mut dlog = vec![0u64; p as usize];
        let mut x = 1u64;
        for k in 0..p - 1 {
            dlog[x as usize] = k;
            x = x * g % p;
        }
        OrbitTables {
            p,
            min_mod_fourth: coset_minima(p, &dlog, 4),
            min_mod_sixth: coset_minima(p, &dlog, 6),
            mu4: roots_of_unity(p, g, 4),
            mu12: roots_of_unity(p, g, 12),
        }
    }

    fn is_canonical(&self, a: u64, b: u64) -> bool {
        let p = self.p;
        if a == 0 {
            return self.min_mod_sixth[b as usize] as u64 == b;
        }
        if self.min_mod_fourth[a as usize] as u64 != a {
            return false;
        }
        self.mu4
            .iter()
            .all(|&v| b <= pow_mod(v, 6, p) * b % p)
    }

    /// `#Aut = #{u : u^4 a = a, u^6 b = b}`; always a subgroup of the 12th roots.
    fn automorphisms(&self, a: u64, b: u64) -> u32 {
        let p = self.p;
        self.mu12
            .iter()
            .filter(|&&u| pow_mod(u, 4, p) * a % p == a && pow_mod(u, 6, p) * b % p == b)
            .count() as u32
    }
}

/// Exact class counts per Frobenius trace for one prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceTable {
    pub p: u64,
    /// Hasse bound `T = floor(2 sqrt p)`; `counts[i]` is `I(i - T)`.
    pub bound: i64,
    pub counts: Vec<u64>,
    /// Number of isomorphism classes `J`.
    pub total: u64,
    /// Number of classes keyed by automorphism group order.
    pub classes_by_aut: BTreeMap<u32, u64>,
}

impl TraceTable {
    pub fn count(&self, t: i64) -> u64 {
        if t.abs() > self.bound {
            return 0;
        }
        self.counts[(t + self.bound) as usize]
    }

    pub fn traces(&self) -> impl Iterator<Item = i64> {
        -self.bound..=self.bound
    }

    /// `sum over classes of 1 / #Aut`.
    pub fn aut_weighted_total(&self) -> Ratio<u64> {
        self.classes_by_aut
            .iter()
            .fold(Ratio::from_integer(0), |acc, (&aut, &n)| {
                acc + Ratio::new(n, aut as u64)
            })
    }
}

pub fn census(p: u64) -> Result<TraceTable> {
    census_with_limit(p, DEFAULT_MAX_P)
}

/// Enumerates every class once; parallel over `a` on the current rayon pool.
pub fn census_with_limit(p: u64, max_p: u64) -> Result<TraceTable> {
    check_census_prime(p, max_p)?;
    let field = FieldTables::new(p);
    let orbits = OrbitTables::new(p);
    let bound = hasse_bound(p);
    let width = (2 * bound + 1) as usize;

    let (counts, by_aut) = (0..p)
        .into_par_iter()
        .map(|a| {
            let mut counts = vec![0u64; width];
            let mut by_aut = [0u64; 13];
            for b in 0..p {
                if is_singular(p, a, b) || !orbits.is_canonical(a, b) {
                    continue;
                }
                let t = field.trace(a, b);
                debug_assert!(t.abs() <= bound);
                counts[(t + bound) as usize] += 1;
                by_aut[orbits.automorphisms(a, b) as usize] += 1;
            }
            (counts, by_aut)
        })
        .reduce(
            || (vec![0u64; width], [0u64; 13]),
            |(mut c1, mut a1), (c2, a2)| {
                c1.iter_mut().zip(&c2).for_each(|(x, y)| *x += y);
                a1.iter_mut().zip(&a2).for_each(|(x, y)| *x += y);
                (c1, a1)
            },
        );

    let total = counts.iter().sum();
    let classes_by_aut = by_aut
        .iter()
        .enumerate()
        .filter(|(_, &n)| n > 0)
        .map(|(aut, &n)| (aut as u32, n))
        .collect();
    Ok(TraceTable {
        p,
        bound,
        counts,
        total,
        classes_by_aut,
    })
}

/// `iota(t) = I(t) / (0.5 sqrt p)`.
pub fn iota(table: &TraceTable, t: i64) -> f64 {
    table.count(t) as f64 / (0.5 * (table.p as f64).sqrt())
}

/// Number of Weierstrass models, `sum over classes of (p - 1) / #Aut`;
/// equals `p^2 - p`.
pub fn model_count_check(table: &TraceTable) -> Ratio<u64> {
    table
        .classes_by_aut
        .iter()
        .fold(Ratio::from_integer(0), |acc, (&aut, &n)| {
            acc + Ratio::new(n * (table.p - 1), aut as u64)
        })
}
