//! Exact integer and modular arithmetic.
//!
//! Everything here works on [`Int`] (`i128`) with overflow checked where a
//! product can leave the range; modular routines additionally require the
//! modulus to be below 2^64 so that products of two residues fit in `u128`.

mod power;
mod prime;
mod sqrt;

pub use power::{ceil_nth_root, floor_nth_root, PowerProduct};
pub use prime::{factorize, is_prime, primes_up_to, PRIME_LIMIT, TRIAL_DIVISION_LIMIT};
pub use sqrt::{sqrt_mod, sqrt_mod_scan, sqrt_mod_with, FactoredModulus, SCAN_THRESHOLD};

use crate::error::{domain, Error, Result};
use crate::{Int, Rat};
use num_traits::{Signed, Zero};

/// Non-negative greatest common divisor, with `gcd(0, 0) = 0`.
pub fn gcd(a: Int, b: Int) -> Int {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a as Int
}

/// Extended Euclid: `(g, x, y)` with `a·x + b·y = g = gcd(a, b)`.
pub fn ext_gcd(a: Int, b: Int) -> (Int, Int, Int) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1, 0);
    let (mut old_t, mut t) = (0, 1);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// The inverse of `a` modulo `m`, normalized into `[0, m)`.
pub fn mod_inverse(a: Int, m: Int) -> Result<Int> {
    if m < 1 {
        return Err(domain(format!("modulus must be positive, got {m}")));
    }
    let (g, x, _) = ext_gcd(a.rem_euclid(m), m);
    if g != 1 {
        return Err(Error::NotInvertible { a, m });
    }
    let inv = x.rem_euclid(m);
    debug_assert_eq!(mul_mod(a.rem_euclid(m), inv, m), 1 % m);
    Ok(inv)
}

/// `a·b mod m` for `0 < m < 2^64`; inputs may be any integers.
pub fn mul_mod(a: Int, b: Int, m: Int) -> Int {
    debug_assert!(m > 0 && m <= u64::MAX as Int);
    let (a, b) = (a.rem_euclid(m) as u128, b.rem_euclid(m) as u128);
    ((a * b) % m as u128) as Int
}

/// `base^exp mod m` for `0 < m < 2^64`.
pub fn pow_mod(base: Int, mut exp: u128, m: Int) -> Int {
    let mut result = 1 % m;
    let mut b = base.rem_euclid(m);
    while exp > 0 {
        if exp & 1 == 1 {
            result = mul_mod(result, b, m);
        }
        b = mul_mod(b, b, m);
        exp >>= 1;
    }
    result
}

pub(crate) fn isqrt_u128(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    // f64 is off by at most a few units here; settle exactly.
    while x.checked_mul(x).is_none_or(|sq| sq > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|sq| sq <= n) {
        x += 1;
    }
    x
}

/// `⌊√n⌋`.
pub fn isqrt(n: Int) -> Result<Int> {
    if n < 0 {
        return Err(domain(format!("isqrt of negative {n}")));
    }
    Ok(isqrt_u128(n as u128) as Int)
}

/// True iff `n = k²` for some integer `k ≥ 0`. Negative numbers never are.
pub fn is_perfect_square(n: Int) -> bool {
    if n < 0 {
        return false;
    }
    // Quadratic residues mod 64 reject most non-squares cheaply.
    const SQ64: u64 = {
        let mut mask = 0u64;
        let mut z = 0;
        while z < 64 {
            mask |= 1 << (z * z % 64);
            z += 1;
        }
        mask
    };
    if (SQ64 >> (n & 63)) & 1 == 0 {
        return false;
    }
    let r = isqrt_u128(n as u128);
    r * r == n as u128
}

/// `⌊√r⌋` for a non-negative rational.
pub fn isqrt_rat(r: &Rat) -> Result<Int> {
    if r.is_negative() {
        return Err(domain("isqrt of negative rational"));
    }
    isqrt(r.floor().to_integer())
}

/// The squarefree part `s` of `q = s·t²`; equivalently the least `x ≥ 1`
/// making `x·q` a perfect square.
pub fn squarefree_kernel(q: Int) -> Result<Int> {
    if q <= 0 {
        return Err(domain(format!("squarefree kernel needs q ≥ 1, got {q}")));
    }
    Ok(factorize(q)?
        .into_iter()
        .filter(|&(_, e)| e % 2 == 1)
        .map(|(p, _)| p)
        .product())
}

/// Jacobi symbol `(a | n)` for odd `n ≥ 1`.
pub fn jacobi(a: Int, n: Int) -> Result<i8> {
    if n < 1 || n % 2 == 0 {
        return Err(domain(format!("Jacobi symbol needs odd positive n, got {n}")));
    }
    let mut n = n as u128;
    let mut a = a.rem_euclid(n as Int) as u128;
    let mut t = 1i8;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz % 2 == 1 && matches!(n % 8, 3 | 5) {
            t = -t;
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    Ok(if n == 1 { t } else { 0 })
}

/// The least quadratic non-residue modulo the odd prime `p`.
pub fn least_qnr(p: Int) -> Result<Int> {
    if p < 3 || p % 2 == 0 || !is_prime(p)? {
        return Err(domain(format!("least non-residue needs an odd prime, got {p}")));
    }
    let mut k = 2;
    loop {
        if jacobi(k, p)? == -1 {
            return Ok(k);
        }
        k += 1;
    }
}

/// Chinese remaindering of `x ≡ r1 (mod m1)`, `x ≡ r2 (mod m2)` for coprime
/// moduli; result in `[0, m1·m2)`.
pub(crate) fn crt_pair(r1: Int, m1: Int, r2: Int, m2: Int) -> Int {
    let m = m1 * m2;
    let inv = mod_inverse(m1, m2).expect("coprime moduli");
    // x = r1 + m1·((r2 − r1)·inv mod m2)
    let k = mul_mod(r2 - r1, inv, m2);
    (r1 + m1 * k).rem_euclid(m)
}

/// Round `num/den` to the nearest integer, ties toward zero.
pub fn round_ties_to_zero(num: Int, den: Int) -> Int {
    assert!(den > 0);
    let q = num.div_euclid(den);
    let r = num.rem_euclid(den);
    match (2 * r).cmp(&den) {
        std::cmp::Ordering::Less => q,
        std::cmp::Ordering::Greater => q + 1,
        std::cmp::Ordering::Equal => {
            // halfway between q and q + 1
            if q >= 0 {
                q
            } else {
                q + 1
            }
        }
    }
}

pub(crate) fn checked_mul(a: Int, b: Int, ctx: &'static str) -> Result<Int> {
    a.checked_mul(b).ok_or(Error::Overflow(ctx))
}

pub(crate) fn checked_add(a: Int, b: Int, ctx: &'static str) -> Result<Int> {
    a.checked_add(b).ok_or(Error::Overflow(ctx))
}

pub(crate) fn rat_is_nonneg(r: &Rat) -> bool {
    !r.is_negative() || r.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scan_inverse(a: Int, m: Int) -> Option<Int> {
        (0..m).find(|&x| (a * x - 1).rem_euclid(m) == 0)
    }

    #[test]
    fn gcd_cases() {
        assert_eq!(gcd(6, 10), 2);
        assert_eq!(gcd(0, 7), 7);
        assert_eq!(gcd(0, 0), 0);
        assert_eq!(gcd(-12, 18), 6);
        assert_eq!(gcd(13, 15), 1);
    }

    #[test]
    fn inverse_cases() {
        assert_eq!(mod_inverse(2, 5), Ok(3));
        assert_eq!(mod_inverse(1, 17), Ok(1));
        assert_eq!(scan_inverse(3, 13), Some(9));
        assert_eq!(mod_inverse(3, 13), Ok(9));
        assert_eq!(mod_inverse(-2, 5), Ok(2));
        assert_eq!(mod_inverse(4, 6), Err(Error::NotInvertible { a: 4, m: 6 }));
        assert!(mod_inverse(1, 0).is_err());
    }

    #[test]
    fn inverse_matches_scan() {
        for m in 1..60 {
            for a in -60..60 {
                match scan_inverse(a, m) {
                    Some(x) => assert_eq!(mod_inverse(a, m), Ok(x), "a={a} m={m}"),
                    None => assert!(mod_inverse(a, m).is_err()),
                }
            }
        }
    }

    #[test]
    fn isqrt_cases() {
        assert_eq!(isqrt(49), Ok(7));
        assert!(is_perfect_square(49));
        assert_eq!(isqrt(48), Ok(6));
        assert!(!is_perfect_square(48));
        assert_eq!(isqrt(0), Ok(0));
        assert!(is_perfect_square(0));
        assert!(!is_perfect_square(-4));
        assert!(isqrt(-1).is_err());
        let big = (1i128 << 62) + 12345;
        assert_eq!(isqrt(big * big), Ok(big));
        assert_eq!(isqrt(big * big - 1), Ok(big - 1));
        assert_eq!(isqrt(Int::MAX), Ok(13043817825332782212));
    }

    #[test]
    fn kernel_cases() {
        assert_eq!(squarefree_kernel(12), Ok(3));
        assert_eq!(squarefree_kernel(1), Ok(1));
        let brute = (1..).find(|x| is_perfect_square(x * 360)).unwrap();
        assert_eq!(brute, 10);
        assert_eq!(squarefree_kernel(360), Ok(10));
        assert!(squarefree_kernel(0).is_err());
    }

    #[test]
    fn kernel_properties_small() {
        for q in 1..=10_000 {
            let s = squarefree_kernel(q).unwrap();
            assert_eq!(q % s, 0);
            assert!(is_perfect_square(q / s));
            let sf = (2..).take_while(|p| p * p <= s).all(|p| s % (p * p) != 0);
            assert!(sf, "kernel {s} of {q} not squarefree");
        }
    }

    #[test]
    fn jacobi_cases() {
        assert_eq!(jacobi(2, 7), Ok(1));
        assert_eq!(jacobi(3, 7), Ok(-1));
        assert_eq!(jacobi(0, 5), Ok(0));
        assert_eq!(jacobi(5, 1), Ok(1));
        assert!(jacobi(3, 8).is_err());
        assert!(jacobi(3, -7).is_err());
    }

    #[test]
    fn jacobi_matches_euler_definition() {
        for p in primes_up_to(10_000).into_iter().filter(|&p| p > 2) {
            let mut is_sq = vec![false; p as usize];
            for z in 1..p {
                is_sq[(z * z % p) as usize] = true;
            }
            // spot-check a spread of residues per prime, all of them below 200
            let step = (p / 97).max(1);
            for a in (0..p).step_by(step as usize).chain(-5..5) {
                let r = a.rem_euclid(p);
                let expect = if r == 0 {
                    0
                } else if is_sq[r as usize] {
                    1
                } else {
                    -1
                };
                assert_eq!(jacobi(a, p), Ok(expect), "({a}|{p})");
            }
        }
    }

    #[test]
    fn least_qnr_cases() {
        assert_eq!(least_qnr(5), Ok(2));
        assert_eq!(least_qnr(17), Ok(3));
        assert_eq!(least_qnr(13), Ok(2));
        assert_eq!(least_qnr(3), Ok(2));
        assert!(least_qnr(2).is_err());
        assert!(least_qnr(15).is_err());
    }

    #[test]
    fn least_qnr_below_sqrt_plus_one() {
        for p in primes_up_to(1_000_000).into_iter().filter(|&p| p > 2) {
            let n = least_qnr(p).unwrap();
            // n < √p + 1  ⇔  (n − 1)² < p
            assert!((n - 1) * (n - 1) < p, "n({p}) = {n}");
        }
    }

    #[test]
    fn rounding_ties_toward_zero() {
        assert_eq!(round_ties_to_zero(5, 2), 2);
        assert_eq!(round_ties_to_zero(-5, 2), -2);
        assert_eq!(round_ties_to_zero(7, 5), 1);
        assert_eq!(round_ties_to_zero(-9, 5), -2);
        assert_eq!(round_ties_to_zero(8, 5), 2);
        assert_eq!(round_ties_to_zero(0, 3), 0);
    }

    #[test]
    fn crt_pair_combines() {
        let x = crt_pair(2, 3, 3, 5);
        assert_eq!(x, 8);
    }
}
