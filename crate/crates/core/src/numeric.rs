//! Small numeric helpers shared by the parameter formulas.

/// Relative slack under which a real is treated as the integer it rounds to.
///
/// Parameter formulas such as `6 * 5 * 0.1^-2` land a few ulps away from an
/// exact integer; without the slack `ceil` would overshoot by one.
const INTEGER_SLACK: f64 = 1e-9;

fn near_integer(x: f64) -> Option<f64> {
    let r = x.round();
    ((x - r).abs() <= INTEGER_SLACK * r.abs().max(1.0)).then_some(r)
}

pub fn ceil_tol(x: f64) -> f64 {
    near_integer(x).unwrap_or_else(|| x.ceil())
}

pub fn floor_tol(x: f64) -> f64 {
    near_integer(x).unwrap_or_else(|| x.floor())
}

/// `ceil_tol` converted to `u64`, saturating at `u64::MAX`.
pub fn ceil_u64(x: f64) -> u64 {
    let c = ceil_tol(x);
    if c <= 0.0 {
        0
    } else if c >= u64::MAX as f64 {
        u64::MAX
    } else {
        c as u64
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
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
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
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

/// Smallest prime `>= n`. Panics past the largest 64-bit prime.
pub fn next_prime(n: u64) -> u64 {
    let mut c = n.max(2);
    while !is_prime(c) {
        c = c.checked_add(1).expect("no 64-bit prime above input");
    }
    c
}
