//! Square roots modulo composite moduli: Tonelli–Shanks at each odd prime,
//! Hensel lifting to prime powers, the 2/4/8 conditions at powers of two,
//! and CRT recombination.

use super::{crt_pair, factorize, gcd, mul_mod, pow_mod, PRIME_LIMIT};
use crate::error::{domain, Error, Result};
use crate::Int;

/// Moduli below this are solved by scanning every residue.
pub const SCAN_THRESHOLD: Int = 1_000_000;

/// A modulus together with its factorization, for repeated root queries.
#[derive(Debug, Clone)]
pub struct FactoredModulus {
    m: Int,
    factors: Vec<(Int, u32)>,
}

fn tonelli_shanks(a: Int, p: Int) -> Int {
    if p % 4 == 3 {
        return pow_mod(a, ((p + 1) / 4) as u128, p);
    }
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    let mut z = 2;
    while pow_mod(z, ((p - 1) / 2) as u128, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q as u128, p);
    let mut t = pow_mod(a, q as u128, p);
    let mut r = pow_mod(a, ((q + 1) / 2) as u128, p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1u128 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    r
}

/// Both roots of `a` modulo `p^e` (odd `p`, `a` a unit), or empty.
fn odd_prime_power_roots(a: Int, p: Int, e: u32) -> Vec<Int> {
    let a_p = a.rem_euclid(p);
    if pow_mod(a_p, ((p - 1) / 2) as u128, p) != 1 {
        return Vec::new();
    }
    let mut r = tonelli_shanks(a_p, p);
    let mut pk = p;
    for _ in 1..e {
        let next = pk * p;
        // r ← r − (r² − a)/(2r)  (mod p^{k+1})
        let f = (mul_mod(r, r, next) - a).rem_euclid(next);
        let inv = super::mod_inverse(2 * r, next).expect("2r is a unit");
        r = (r - mul_mod(f, inv, next)).rem_euclid(next);
        pk = next;
    }
    let mut roots = vec![r, (pk - r) % pk];
    roots.sort_unstable();
    roots.dedup();
    roots
}

/// All roots of the odd `a` modulo `2^e`.
fn two_power_roots(a: Int, e: u32) -> Vec<Int> {
    let m = 1i128 << e;
    let a = a.rem_euclid(m);
    let mut roots = match e {
        1 => vec![1],
        2 if a % 4 == 1 => vec![1, 3],
        2 => vec![],
        _ if a % 8 != 1 => vec![],
        _ => {
            let mut r: Int = 1;
            for j in 3..e {
                if (r * r - a).rem_euclid(1 << (j + 1)) != 0 {
                    r += 1 << (j - 1);
                }
            }
            let half = m / 2;
            vec![r, m - r, (r + half) % m, (m - r + half) % m]
        }
    };
    roots.sort_unstable();
    roots.dedup();
    roots
}

impl FactoredModulus {
    pub fn new(m: Int) -> Result<Self> {
        if m < 1 {
            return Err(domain(format!("modulus must be positive, got {m}")));
        }
        if m >= PRIME_LIMIT {
            return Err(Error::FactorizationFailed(m));
        }
        Ok(FactoredModulus {
            m,
            factors: factorize(m)?,
        })
    }

    pub fn modulus(&self) -> Int {
        self.m
    }

    pub fn factors(&self) -> &[(Int, u32)] {
        &self.factors
    }

    fn check_unit(&self, a: Int) -> Result<()> {
        if gcd(a, self.m) != 1 {
            return Err(Error::NotCoprime { a, m: self.m });
        }
        Ok(())
    }

    /// Whether the unit `a` is a square modulo `m`, via the local criteria
    /// only (no root is built).
    pub fn is_square(&self, a: Int) -> Result<bool> {
        self.check_unit(a)?;
        Ok(self.factors.iter().all(|&(p, e)| {
            if p == 2 {
                match e {
                    1 => true,
                    2 => a.rem_euclid(4) == 1,
                    _ => a.rem_euclid(8) == 1,
                }
            } else {
                pow_mod(a.rem_euclid(p), ((p - 1) / 2) as u128, p) == 1
            }
        }))
    }

    /// Every square root of the unit `a`, ascending.
    pub fn roots(&self, a: Int) -> Result<Vec<Int>> {
        self.check_unit(a)?;
        let mut acc: Vec<Int> = vec![0];
        let mut acc_mod: Int = 1;
        for &(p, e) in &self.factors {
            let local = if p == 2 {
                two_power_roots(a, e)
            } else {
                odd_prime_power_roots(a, p, e)
            };
            if local.is_empty() {
                return Ok(Vec::new());
            }
            let pe = p.pow(e);
            acc = acc
                .iter()
                .flat_map(|&r1| local.iter().map(move |&r2| crt_pair(r1, acc_mod, r2, pe)))
                .collect();
            acc_mod *= pe;
        }
        acc.iter_mut().for_each(|r| *r = r.rem_euclid(self.m));
        acc.sort_unstable();
        acc.dedup();
        Ok(acc)
    }

    /// The smallest root of the unit `a`, if it has one.
    pub fn sqrt(&self, a: Int) -> Result<Option<Int>> {
        let root = self.roots(a)?.first().copied();
        if let Some(c) = root {
            debug_assert_eq!(mul_mod(c, c, self.m), a.rem_euclid(self.m));
        }
        Ok(root)
    }
}

/// Smallest `c ∈ [0, m)` with `c² ≡ a (mod m)` by trying every residue.
pub fn sqrt_mod_scan(a: Int, m: Int) -> Result<Option<Int>> {
    if m < 1 {
        return Err(domain(format!("modulus must be positive, got {m}")));
    }
    if gcd(a, m) != 1 {
        return Err(Error::NotCoprime { a, m });
    }
    let target = a.rem_euclid(m);
    Ok((0..m).find(|&c| mul_mod(c, c, m) == target))
}

/// [`sqrt_mod`] with an explicit scan threshold: moduli below `scan_below`
/// are scanned, the rest factored.
pub fn sqrt_mod_with(a: Int, m: Int, scan_below: Int) -> Result<Option<Int>> {
    if m < scan_below {
        sqrt_mod_scan(a, m)
    } else {
        FactoredModulus::new(m)?.sqrt(a)
    }
}

/// The numerically smallest square root of the unit `a` modulo `m`, or
/// `None` when `a` is a non-residue.
pub fn sqrt_mod(a: Int, m: Int) -> Result<Option<Int>> {
    sqrt_mod_with(a, m, SCAN_THRESHOLD)
}
