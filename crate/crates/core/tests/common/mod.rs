#![allow(dead_code)]

/// Kronecker symbol `(a / n)` for `n >= 1`, by the binary algorithm.
pub fn kronecker(a: i64, n: u64) -> i8 {
    let mut a = a as i128;
    let mut n = n as i128;
    if n == 1 {
        return 1;
    }
    let mut sign = 1i8;
    let mut twos = 0;
    while n % 2 == 0 {
        n /= 2;
        twos += 1;
    }
    if twos > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if twos % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            sign = -sign;
        }
    }
    // Jacobi (a / n), n odd
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

/// Largest `T` with `T^2 <= 4q`.
pub fn hasse(q: u64) -> i64 {
    let mut t = 0i64;
    while ((t + 1) * (t + 1)) as u64 <= 4 * q {
        t += 1;
    }
    t
}
