//! Exact integer arithmetic: primality, factorization, the quadratic symbol
//! `chi_r` (Jacobi symbol extended multiplicatively by the 2-adic table),
//! the field character of a negative discriminant, conductor decomposition
//! and additive characters `e_r(z) = exp(2 pi i z / r)`.
//!
//! Values handled here stay below `8 * 10^9` (four times the largest
//! supported field size); intermediate products are carried in 128 bits.

use num_complex::Complex64;
use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};

/// Largest field size accepted anywhere in the crate.
pub const MAX_Q: u64 = 2_000_000_000;

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Floor of the square root of `n`.
pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// Smallest `x` with `x^2 >= n`.
pub fn isqrt_ceil(n: u128) -> u128 {
    let s = isqrt(n);
    if s * s == n {
        s
    } else {
        s + 1
    }
}

pub fn is_square(n: u64) -> bool {
    let s = isqrt(n as u128);
    s * s == n as u128
}

/// `floor(2 sqrt(q))`, the Hasse-Weil trace bound.
pub fn hasse_bound(q: u64) -> i64 {
    isqrt(4 * q as u128) as i64
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorization by trial division, primes in increasing order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let tz = n.trailing_zeros();
    if tz > 0 {
        out.push((2, tz));
        n >>= tz;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 2;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Positive divisors of `n` in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut divs = vec![1u64];
    for (p, e) in factorize(n) {
        let len = divs.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs.sort_unstable();
    divs
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// Splits `q = p^k`; `None` when `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    match factorize(q).as_slice() {
        [(p, k)] => Some((*p, *k)),
        _ => None,
    }
}

/// Checks `2 <= q <= MAX_Q` and that `q` is a prime power; returns `(p, k)`.
pub fn validate_field_size(q: u64) -> Result<(u64, u32)> {
    if !(2..=MAX_Q).contains(&q) {
        return Err(Error::OutOfRange {
            name: "q",
            value: q as i128,
            min: 2,
            max: MAX_Q as i128,
        });
    }
    prime_power(q).ok_or(Error::NotPrimePower(q))
}

/// Checks a dyadic window `t ~ R`: `0 < R < 2R < 2 sqrt(q)`, i.e. `R^2 < q`.
pub fn validate_window(q: u64, r: u64) -> Result<(u64, u32)> {
    let pk = validate_field_size(q)?;
    if r == 0 {
        return Err(Error::InvalidWindow {
            q,
            r,
            reason: "R must be positive",
        });
    }
    if (r as u128) * (r as u128) >= q as u128 {
        return Err(Error::InvalidWindow {
            q,
            r,
            reason: "need 2R < 2 sqrt(q)",
        });
    }
    Ok(pk)
}

/// `chi_2(v)`: 0 for even `v`, 1 for `v = +-1 mod 8`, -1 for `v = +-3 mod 8`.
pub fn chi2(v: i64) -> i8 {
    match v.rem_euclid(8) {
        1 | 7 => 1,
        3 | 5 => -1,
        _ => 0,
    }
}

/// Legendre symbol `(v / l)` for an odd prime `l`, via Euler's criterion.
pub fn legendre(v: i64, l: u64) -> i8 {
    let a = v.rem_euclid(l as i64) as u64;
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (l - 1) / 2, l) == 1 {
        1
    } else {
        -1
    }
}

/// The quadratic symbol `chi_r` for a fixed modulus `r`, with the prime
/// factorization of `r` cached so repeated evaluation costs one Legendre
/// symbol per odd prime factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticSymbol {
    modulus: u64,
    twos: u32,
    odd: Vec<(u64, u32)>,
}

impl QuadraticSymbol {
    pub fn new(r: u64) -> Self {
        assert!(r >= 1, "modulus must be positive");
        let mut twos = 0;
        let mut odd = Vec::new();
        for (p, e) in factorize(r) {
            if p == 2 {
                twos = e;
            } else {
                odd.push((p, e));
            }
        }
        QuadraticSymbol {
            modulus: r,
            twos,
            odd,
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Prime factorization of the modulus.
    pub fn factors(&self) -> Vec<(u64, u32)> {
        let mut f = Vec::with_capacity(self.odd.len() + 1);
        if self.twos > 0 {
            f.push((2, self.twos));
        }
        f.extend_from_slice(&self.odd);
        f
    }

    /// True when the symbol is trivial on integers coprime to the modulus,
    /// i.e. every prime occurs to an even power.
    pub fn is_principal(&self) -> bool {
        self.twos.is_multiple_of(2) && self.odd.iter().all(|&(_, e)| e % 2 == 0)
    }

    pub fn eval(&self, v: i64) -> i8 {
        let mut acc = 1i8;
        if self.twos > 0 {
            let c = chi2(v);
            if c == 0 {
                return 0;
            }
            if self.twos % 2 == 1 {
                acc *= c;
            }
        }
        for &(l, e) in &self.odd {
            let c = legendre(v, l);
            if c == 0 {
                return 0;
            }
            if e % 2 == 1 {
                acc *= c;
            }
        }
        acc
    }
}

/// `chi_r(v)`: completely multiplicative in both arguments, the Legendre
/// symbol for odd prime `r`, and `chi_2` at each factor 2 of `r`.
pub fn kronecker(v: i64, r: u64) -> i8 {
    QuadraticSymbol::new(r).eval(v)
}

pub fn check_discriminant(d: i64) -> Result<()> {
    if d >= 0 || !matches!(d.rem_euclid(4), 0 | 1) {
        return Err(Error::InvalidDiscriminant(d));
    }
    Ok(())
}

/// Field character `n -> (d / n)` of a negative discriminant `d`, extended
/// to all integers by periodicity modulo `|d|`.
pub fn chi_disc(d: i64, n: i64) -> Result<i8> {
    check_discriminant(d)?;
    Ok(chi_disc_unchecked(d, n))
}

pub(crate) fn chi_disc_unchecked(d: i64, n: i64) -> i8 {
    let m = n.rem_euclid(d.unsigned_abs() as i64) as u64;
    if m == 0 {
        return 0;
    }
    kronecker(d, m)
}

fn is_squarefree(n: u64) -> bool {
    factorize(n).iter().all(|&(_, e)| e == 1)
}

/// Whether `d < 0` is the discriminant of an imaginary quadratic field.
pub fn is_fundamental(d: i64) -> bool {
    if d >= 0 {
        return false;
    }
    let m = d.unsigned_abs();
    match d.rem_euclid(4) {
        1 => is_squarefree(m),
        0 => {
            let m4 = (d / 4).rem_euclid(4);
            (m4 == 2 || m4 == 3) && is_squarefree(m / 4)
        }
        _ => false,
    }
}

/// Number of units of the maximal order of discriminant `d_star`.
pub fn unit_count(d_star: i64) -> u32 {
    match d_star {
        -3 => 6,
        -4 => 4,
        _ => 2,
    }
}

/// `D = D* f^2` with `D*` fundamental, together with `w(D*)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DiscriminantSplit {
    pub d: i64,
    pub d_star: i64,
    pub f: u64,
    pub w: u32,
}

pub fn conductor_split(d: i64) -> Result<DiscriminantSplit> {
    check_discriminant(d)?;
    let mut core = 1u64;
    let mut f = 1u64;
    for (p, e) in factorize(d.unsigned_abs()) {
        f *= p.pow(e / 2);
        if e % 2 == 1 {
            core *= p;
        }
    }
    // d = -core * f^2 with core squarefree
    let neg_core = -(core as i64);
    let (d_star, f) = if neg_core.rem_euclid(4) == 1 {
        (neg_core, f)
    } else {
        // core = 2, 3 mod 4 here, so f is even because d = 0 mod 4
        (4 * neg_core, f / 2)
    };
    debug_assert_eq!(d_star * (f * f) as i64, d);
    Ok(DiscriminantSplit {
        d,
        d_star,
        f,
        w: unit_count(d_star),
    })
}

/// `e_r(z) = exp(2 pi i z / r)`; `z` is reduced modulo `r` first.
pub fn root_of_unity(r: u64, z: i64) -> Complex64 {
    assert!(r >= 1, "modulus must be positive");
    let k = (z as i128).rem_euclid(r as i128) as f64;
    let (s, c) = (std::f64::consts::TAU * k / r as f64).sin_cos();
    Complex64::new(c, s)
}

/// `exp(2 pi i x)` for real `x`.
pub fn e(x: f64) -> Complex64 {
    let frac = x - x.floor();
    let (s, c) = (std::f64::consts::TAU * frac).sin_cos();
    Complex64::new(c, s)
}

/// Incomplete geometric sum `sum_{n=K+1}^{K+L} e_r(b n)`.
pub fn geometric_esum(r: u64, b: i64, k: i64, l: u64) -> Result<Complex64> {
    if l < 1 {
        return Err(Error::Invalid("L must be at least 1".into()));
    }
    let r128 = r as i128;
    let mut phase = ((b as i128) * (k as i128 + 1)).rem_euclid(r128);
    let step = (b as i128).rem_euclid(r128);
    let mut acc = Complex64::new(0.0, 0.0);
    for _ in 0..l {
        acc += root_of_unity(r, phase as i64);
        phase = (phase + step) % r128;
    }
    Ok(acc)
}

/// Explicit form of the incomplete-sum bound: `min(L, r / (2|b|)) * pi / 2`.
pub fn geometric_esum_bound(r: u64, b: i64, l: u64) -> f64 {
    let b = b.unsigned_abs() as f64;
    (l as f64).min(r as f64 / (2.0 * b)) * std::f64::consts::FRAC_PI_2
}
