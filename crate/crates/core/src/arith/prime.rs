//! Primality and factorization over the certified range `[0, 2^64)`.

use super::{gcd, isqrt_u128, mul_mod, pow_mod};
use crate::error::{domain, Error, Result};
use crate::Int;

/// Below this bound primality is decided by trial division.
pub const TRIAL_DIVISION_LIMIT: Int = 1_000_000;

/// Exclusive upper end of the range on which [`is_prime`] is certified.
pub const PRIME_LIMIT: Int = 1 << 64;

// The first twelve primes as strong-pseudoprime bases are exact for every
// n < 3.18·10^23, which covers all of u64.
const WITNESSES: [Int; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn is_prime_trial(n: Int) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn strong_probable_prime(n: Int, base: Int) -> bool {
    let d_full = n - 1;
    let s = d_full.trailing_zeros();
    let d = d_full >> s;
    let mut x = pow_mod(base, d as u128, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Deterministic primality for `0 ≤ n < 2^64`; errors outside that range
/// rather than answering probabilistically.
pub fn is_prime(n: Int) -> Result<bool> {
    if n < 0 {
        return Err(domain(format!("primality of negative {n}")));
    }
    if n >= PRIME_LIMIT {
        return Err(Error::OutOfRange(n));
    }
    if n < TRIAL_DIVISION_LIMIT {
        return Ok(is_prime_trial(n));
    }
    if n % 2 == 0 {
        return Ok(false);
    }
    Ok(WITNESSES.iter().all(|&a| strong_probable_prime(n, a)))
}

/// Brent's variant of Pollard rho with a fixed increment; `None` if this
/// increment cycles without a split.
fn rho(n: Int, c: Int) -> Option<Int> {
    let f = |x: Int| (mul_mod(x, x, n) + c) % n;
    let (mut y, mut r, mut q) = (2 % n, 1u64, 1);
    let m = 128u64;
    let mut g = 1;
    let (mut x, mut ys) = (y, y);
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..m.min(r - k) {
                y = f(y);
                q = mul_mod(q, (x - y).abs(), n);
            }
            g = gcd(q, n);
            k += m;
        }
        r *= 2;
        if r > 1 << 40 {
            return None;
        }
    }
    if g == n {
        loop {
            ys = f(ys);
            g = gcd((x - ys).abs(), n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

fn split_large(n: Int, out: &mut Vec<Int>) -> Result<()> {
    if n == 1 {
        return Ok(());
    }
    if is_prime(n)? {
        out.push(n);
        return Ok(());
    }
    let r = isqrt_u128(n as u128);
    if r * r == n as u128 {
        split_large(r as Int, out)?;
        return split_large(r as Int, out);
    }
    for c in 1..64 {
        if let Some(f) = rho(n, c) {
            split_large(f, out)?;
            return split_large(n / f, out);
        }
    }
    Err(Error::FactorizationFailed(n))
}

/// Prime factorization `[(p, e)]` with `p` ascending; `factorize(1)` is
/// empty. Trial division to 10^6, Pollard rho beyond (deterministic
/// increments 1, 2, …); cofactors of 2^64 or more are refused.
pub fn factorize(n: Int) -> Result<Vec<(Int, u32)>> {
    if n < 1 {
        return Err(domain(format!("factorize needs n ≥ 1, got {n}")));
    }
    let mut n = n;
    let mut out: Vec<(Int, u32)> = Vec::new();
    let mut push = |p: Int, n: &mut Int| {
        let mut e = 0;
        while *n % p == 0 {
            *n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    };
    push(2, &mut n);
    let mut d = 3;
    while d <= TRIAL_DIVISION_LIMIT && d * d <= n {
        push(d, &mut n);
        d += 2;
    }
    if n > 1 {
        if n < TRIAL_DIVISION_LIMIT * TRIAL_DIVISION_LIMIT {
            out.push((n, 1));
        } else if n >= PRIME_LIMIT {
            return Err(Error::FactorizationFailed(n));
        } else {
            let mut primes = Vec::new();
            split_large(n, &mut primes)?;
            primes.sort_unstable();
            for p in primes {
                match out.last_mut() {
                    Some((q, e)) if *q == p => *e += 1,
                    _ => out.push((p, 1)),
                }
            }
        }
    }
    Ok(out)
}

/// All primes `≤ limit` (sieve of Eratosthenes).
pub fn primes_up_to(limit: Int) -> Vec<Int> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut i = 2;
    while i * i <= n {
        if !composite[i] {
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
        i += 1;
    }
    (2..=n).filter(|&k| !composite[k]).map(|k| k as Int).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        assert_eq!(is_prime(13), Ok(true));
        assert_eq!(is_prime(1), Ok(false));
        assert_eq!(is_prime(0), Ok(false));
        assert_eq!(is_prime(2), Ok(true));
        assert!(is_trial_prime_oracle(1_000_003));
        assert_eq!(is_prime(1_000_003), Ok(true));
        assert!(is_prime(-3).is_err());
        assert_eq!(is_prime(PRIME_LIMIT), Err(Error::OutOfRange(PRIME_LIMIT)));
    }

    fn is_trial_prime_oracle(n: Int) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn miller_rabin_agrees_with_trial_division_above_limit() {
        for n in TRIAL_DIVISION_LIMIT..TRIAL_DIVISION_LIMIT + 20_000 {
            assert_eq!(is_prime(n).unwrap(), is_trial_prime_oracle(n), "{n}");
        }
    }

    #[test]
    fn strong_pseudoprimes_rejected() {
        // strong pseudoprimes to several small bases
        for n in [
            3_215_031_751i128,
            2_152_302_898_747,
            3_474_749_660_383,
            341_550_071_728_321,
        ] {
            assert_eq!(is_prime(n), Ok(false), "{n}");
        }
        assert_eq!(is_prime(18_446_744_073_709_551_557), Ok(true)); // largest u64 prime
        assert_eq!(is_prime(18_446_744_073_709_551_615), Ok(false));
    }

    #[test]
    fn sieve_matches_is_prime() {
        let ps = primes_up_to(5000);
        let direct: Vec<Int> = (0..=5000).filter(|&n| is_prime(n).unwrap()).collect();
        assert_eq!(ps, direct);
        assert!(primes_up_to(1).is_empty());
    }

    #[test]
    fn factorize_reconstructs() {
        for n in 1..3000 {
            let f = factorize(n).unwrap();
            let back: Int = f.iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(back, n);
            assert!(f.iter().all(|&(p, _)| is_prime(p).unwrap()));
        }
        assert_eq!(factorize(360).unwrap(), vec![(2, 3), (3, 2), (5, 1)]);
    }

    #[test]
    fn factorize_large_semiprimes() {
        let p = 1_000_000_007i128;
        let q = 998_244_353i128;
        assert_eq!(factorize(p * q).unwrap(), vec![(q, 1), (p, 1)]);
        assert_eq!(factorize(p * p).unwrap(), vec![(p, 2)]);
        let r = 4_294_967_291i128; // 2^32 − 5
        assert_eq!(factorize(r * 3_037_000_493).unwrap(), vec![(3_037_000_493, 1), (r, 1)]);
        assert!(matches!(
            factorize(p * q * 4_294_967_311),
            Err(Error::FactorizationFailed(_))
        ));
    }
}
