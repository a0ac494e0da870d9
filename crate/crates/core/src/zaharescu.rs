//! Small square values `x1·q1 + x2·q2 = n²` with `1 ≤ n ≤ N` for coprime
//! steps, built constructively:
//!
//! 1. scan `b = 1, −1, 2, −2, …` coprime to `q1` until `b·q2` is a square
//!    `c²` modulo `q1` (the first hit has `|b| ≤ H(q1)`);
//! 2. invert `c` modulo `q1`;
//! 3. pick `n ≤ N` with `‖n·c̄/q1‖ ≤ 1/N` from the continued fraction of
//!    `c̄/q1` and round `m` so that `d = n·c̄ + m·q1` has `|d| ≤ q1/N`;
//! 4. set `x2 = b·d²` and `x1 = (n² − b·q2·d²)/q1`, which is integral
//!    because `n² ≡ d²c² ≡ b·q2·d² (mod q1)`.

use crate::arith::{checked_mul, gcd, mod_inverse, mul_mod, round_ties_to_zero, FactoredModulus, PowerProduct};
use crate::bounds::balanced_n;
use crate::error::{domain, Error, Result};
use crate::exec::Exec;
use crate::progression::SquareWitness;
use crate::schema::dec;
use crate::{Int, Rat};
use serde::{Deserialize, Serialize};

/// Largest `k` for which [`capital_h`] enumerates by default.
pub const H_GUARD: Int = 100_000;

/// Default ceiling for the empirical bound ratios.
pub const DEFAULT_RATIO_CEILING: Int = 64;

/// `H(k)`: the least `h ≥ 1` such that every unit `x` modulo `k` is
/// `y·z² (mod k)` for some `|y| ≤ h`. `H(1) = H(2) = 1`.
pub fn capital_h(k: Int) -> Result<Int> {
    capital_h_with_guard(k, H_GUARD)
}

pub fn capital_h_with_guard(k: Int, guard: Int) -> Result<Int> {
    if k < 1 {
        return Err(domain(format!("H(k) needs k ≥ 1, got {k}")));
    }
    if k > guard {
        return Err(Error::TooLarge {
            what: "H(k) enumeration",
            size: k as u128,
            guard: guard as u128,
        });
    }
    let ku = k as usize;
    let mut is_square = vec![false; ku];
    for z in 0..k {
        is_square[(z * z % k) as usize] = true;
    }
    let squares: Vec<Int> = (0..k).filter(|&s| is_square[s as usize]).collect();
    let mut covered = vec![false; ku];
    let mut missing = (0..k).filter(|&x| gcd(x, k) == 1).count();
    let mut h = 0;
    while missing > 0 {
        h += 1;
        for y in [h, -h] {
            for &s in &squares {
                let x = (y * s).rem_euclid(k) as usize;
                if !covered[x] && gcd(x as Int, k) == 1 {
                    covered[x] = true;
                    missing -= 1;
                }
            }
        }
    }
    Ok(h.max(1))
}

/// Full record of one run of the construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZaharescuTrace {
    #[serde(with = "dec")]
    pub q1: Int,
    #[serde(with = "dec")]
    pub q2: Int,
    #[serde(rename = "N", with = "dec")]
    pub big_n: Int,
    #[serde(with = "dec")]
    pub b: Int,
    #[serde(with = "dec")]
    pub c: Int,
    #[serde(with = "dec")]
    pub c_bar: Int,
    #[serde(with = "dec")]
    pub n: Int,
    #[serde(with = "dec")]
    pub m: Int,
    #[serde(with = "dec")]
    pub approx_d: Int,
    pub witness: SquareWitness,
}

impl ZaharescuTrace {
    /// Check every defining relation of the trace.
    pub fn verify(&self) -> Result<()> {
        let fail = |what: &str| Err(Error::Invariant(format!("trace {self:?}: {what}")));
        let q1 = self.q1;
        if gcd(self.b, q1) != 1 {
            return fail("b not coprime to q1");
        }
        if (self.b * self.q2 - self.c * self.c).rem_euclid(q1) != 0 {
            return fail("b·q2 ≢ c² (mod q1)");
        }
        if mul_mod(self.c, self.c_bar, q1) != 1 % q1 {
            return fail("c·c̄ ≢ 1 (mod q1)");
        }
        if !(1..=self.big_n).contains(&self.n) {
            return fail("n outside [1, N]");
        }
        if self.approx_d != self.n * self.c_bar + self.m * q1 {
            return fail("d ≠ n·c̄ + m·q1");
        }
        if self.big_n * self.approx_d.abs() > q1 {
            return fail("|d| > q1/N");
        }
        let d2 = self.approx_d * self.approx_d;
        let w = &self.witness;
        if w.n != self.n || w.x2 != self.b * d2 || w.x1 * q1 != self.n * self.n - self.b * self.q2 * d2 {
            return fail("witness does not match b, d, n");
        }
        if w.x1 * q1 + w.x2 * self.q2 != self.n * self.n {
            return fail("x1·q1 + x2·q2 ≠ n²");
        }
        Ok(())
    }
}

/// Whether `‖n·c̄/q1‖ ≤ 1/N`, decided exactly.
pub fn dirichlet_ok(n: Int, c_bar: Int, q1: Int, big_n: Int) -> bool {
    let r = mul_mod(n, c_bar, q1);
    big_n * r.min(q1 - r) <= q1
}

/// The largest continued-fraction convergent denominator of `num/den`
/// that does not exceed `big_n`. It satisfies the Dirichlet condition.
pub fn dirichlet_convergent(num: Int, den: Int, big_n: Int) -> Int {
    let (mut a, mut b) = (num, den);
    let (mut k_prev, mut k) = (0i128, 1i128);
    let mut best = 1;
    // first partial quotient only shifts the numerators
    let q = a.div_euclid(b);
    (a, b) = (b, a - q * b);
    while b != 0 {
        let q = a / b;
        (a, b) = (b, a - q * b);
        let next = q * k + k_prev;
        if next > big_n {
            break;
        }
        (k_prev, k) = (k, next);
        best = k;
    }
    best
}

/// First `n` in `1..=N` meeting the Dirichlet condition, by scanning.
pub fn dirichlet_scan(c_bar: Int, q1: Int, big_n: Int) -> Option<Int> {
    (1..=big_n).find(|&n| dirichlet_ok(n, c_bar, q1, big_n))
}

/// The construction for a fixed `q1`, reusing its factorization across
/// many `q2`.
#[derive(Debug, Clone)]
pub struct SmallSquareBuilder {
    modulus: FactoredModulus,
}

impl SmallSquareBuilder {
    pub fn new(q1: Int) -> Result<Self> {
        if q1 < 1 {
            return Err(domain(format!("q1 must be ≥ 1, got {q1}")));
        }
        Ok(SmallSquareBuilder {
            modulus: FactoredModulus::new(q1)?,
        })
    }

    pub fn construct(&self, q2: Int, big_n: Int) -> Result<ZaharescuTrace> {
        let q1 = self.modulus.modulus();
        if q2 < 1 || big_n < 1 {
            return Err(domain(format!("need q2 ≥ 1 and N ≥ 1, got q2={q2} N={big_n}")));
        }
        if gcd(q1, q2) != 1 {
            return Err(Error::NotCoprime { a: q2, m: q1 });
        }
        if q1 == 1 {
            let trace = ZaharescuTrace {
                q1,
                q2,
                big_n,
                b: 1,
                c: 0,
                c_bar: 0,
                n: 1,
                m: 0,
                approx_d: 0,
                witness: SquareWitness { x1: 1, x2: 0, n: 1 },
            };
            trace.verify()?;
            return Ok(trace);
        }

        // (i) smallest |b|, positive first
        let (b, c) = (1..)
            .flat_map(|k: Int| [k, -k])
            .filter(|&b| gcd(b, q1) == 1)
            .find_map(|b| {
                let target = mul_mod(b, q2, q1);
                self.modulus.sqrt(target).expect("unit by construction").map(|c| (b, c))
            })
            .expect("H(q1) is finite");
        // (ii)
        let c_bar = mod_inverse(c, q1)?;
        // (iii)
        let mut n = dirichlet_convergent(c_bar, q1, big_n);
        if !dirichlet_ok(n, c_bar, q1, big_n) {
            // unreachable by the convergent bound; fall back rather than fail
            debug_assert!(false, "convergent missed the Dirichlet bound");
            n = dirichlet_scan(c_bar, q1, big_n).expect("Dirichlet's theorem");
        }
        let m = round_ties_to_zero(-n * c_bar, q1);
        let approx_d = n * c_bar + m * q1;
        // (iv)
        let d2 = checked_mul(approx_d, approx_d, "small square")?;
        let x2 = checked_mul(b, d2, "small square")?;
        let bq2d2 = checked_mul(x2, q2, "small square")?;
        let num = n * n - bq2d2;
        if num % q1 != 0 {
            return Err(Error::Invariant(format!("(n² − b·q2·d²) not divisible by q1={q1}")));
        }
        let trace = ZaharescuTrace {
            q1,
            q2,
            big_n,
            b,
            c,
            c_bar,
            n,
            m,
            approx_d,
            witness: SquareWitness { x1: num / q1, x2, n },
        };
        trace.verify()?;
        Ok(trace)
    }
}

/// Run the construction for coprime `q1, q2` and `N ≥ 1`.
pub fn construct_small_square(q1: Int, q2: Int, big_n: Int) -> Result<ZaharescuTrace> {
    if q1 >= 1 && q2 >= 1 && gcd(q1, q2) != 1 {
        return Err(Error::NotCoprime { a: q2, m: q1 });
    }
    SmallSquareBuilder::new(q1)?.construct(q2, big_n)
}

/// Default work cap for [`existence_check`].
pub const EXISTENCE_GUARD: u128 = 50_000_000;

/// Exhaustive search, over `1 ≤ n ≤ N` and the box `|xi| ≤ q2²`, for the
/// representation `x1·q1 + x2·q2 = n²` minimizing `max(|x1|, |x2|)`
/// (then `n`, then `|x2|`, then `x2 ≥ 0`).
pub fn existence_check(q1: Int, q2: Int, big_n: Int) -> Result<SquareWitness> {
    existence_check_with_guard(q1, q2, big_n, EXISTENCE_GUARD)
}

pub fn existence_check_with_guard(q1: Int, q2: Int, big_n: Int, guard: u128) -> Result<SquareWitness> {
    if !(1 <= q1 && q1 <= q2) || big_n < 1 {
        return Err(domain(format!(
            "need 1 ≤ q1 ≤ q2 and N ≥ 1, got q1={q1} q2={q2} N={big_n}"
        )));
    }
    if gcd(q1, q2) != 1 {
        return Err(Error::NotCoprime { a: q2, m: q1 });
    }
    let radius = checked_mul(q2, q2, "existence box")?;
    let work = (big_n as u128).saturating_mul(2 * q2 as u128 + 1);
    if work > guard {
        return Err(Error::TooLarge {
            what: "existence search",
            size: work,
            guard,
        });
    }
    let inv = if q2 == 1 { 0 } else { mod_inverse(q1, q2)? };
    let key = |w: &SquareWitness| (w.x1.abs().max(w.x2.abs()), w.n, w.x2.abs(), w.x2 < 0);
    let mut best: Option<SquareWitness> = None;
    for n in 1..=big_n {
        let n2 = n * n;
        // every x1 ≡ n²·q1⁻¹ (mod q2) in the box
        let x0 = if q2 == 1 { 0 } else { mul_mod(n2, inv, q2) };
        let mut x1 = x0 - ((x0 + radius) / q2) * q2;
        while x1 <= radius {
            let x2 = (n2 - x1 * q1) / q2;
            if x2.abs() <= radius {
                let w = SquareWitness { x1, x2, n };
                if best.is_none_or(|b| key(&w) < key(&b)) {
                    best = Some(w);
                }
            }
            x1 += q2;
        }
    }
    best.ok_or_else(|| Error::NotFound(format!("no n ≤ {big_n} represented with |xi| ≤ {radius}")))
}

/// Choice of `N` for a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NRule {
    /// `⌈q1^{1/2}⌉`
    SqrtQ1,
    /// `q1`
    Q1,
    /// `⌈q1^{9/16}·q2^{1/4}⌉`
    Balanced,
}

impl NRule {
    pub fn choose(self, q1: Int, q2: Int) -> Int {
        match self {
            NRule::SqrtQ1 => {
                let r = crate::arith::isqrt_u128(q1 as u128) as Int;
                if r * r == q1 {
                    r
                } else {
                    r + 1
                }
            }
            NRule::Q1 => q1,
            NRule::Balanced => balanced_n(q1, q2),
        }
    }
}

/// One sweep row with the empirical bound ratios
/// `ratio_x1 = |x1| / (N²/q1 + q1^{5/4}·q2/N²)` and
/// `ratio_x2 = |x2|·N²/q1^{9/4}` (floating point, display only) and their
/// exact comparison against the ceiling.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    #[serde(with = "dec")]
    pub q1: Int,
    #[serde(with = "dec")]
    pub q2: Int,
    #[serde(rename = "N", with = "dec")]
    pub big_n: Int,
    #[serde(with = "dec")]
    pub b: Int,
    #[serde(with = "dec")]
    pub n: Int,
    #[serde(with = "dec")]
    pub x1: Int,
    #[serde(with = "dec")]
    pub x2: Int,
    pub ratio_x1: f64,
    pub ratio_x2: f64,
    #[serde(skip)]
    pub x1_within: bool,
    #[serde(skip)]
    pub x2_within: bool,
}

impl SweepRow {
    pub const CSV_HEADER: &'static str = "q1,q2,N,b,n,x1,x2,ratio_x1,ratio_x2";

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{:.6},{:.6}",
            self.q1, self.q2, self.big_n, self.b, self.n, self.x1, self.x2, self.ratio_x1, self.ratio_x2
        )
    }

    pub fn from_trace(t: &ZaharescuTrace, ceiling: Rat) -> Self {
        let (q1, q2, nn) = (t.q1, t.q2, t.big_n);
        let (x1, x2) = (t.witness.x1.abs(), t.witness.x2.abs());
        let n2 = nn * nn;
        let (cn, cd) = (*ceiling.numer(), *ceiling.denom());
        let r = |e: Int, d: Int| Rat::new(e, d);
        let q1_94 = PowerProduct::one().times(q1, r(9, 4));
        // |x2|·N² < C·q1^{9/4}
        let x2_within = x2 == 0
            || PowerProduct::one()
                .times_int(x2 * n2 * cd, 1)
                .lt(&q1_94.clone().times_int(cn, 1));
        // |x1|·q1·N² − C·N⁴ < C·q1^{9/4}·q2, scaled by the ceiling denominator
        let lhs = x1 * q1 * n2 * cd - cn * n2 * n2;
        let x1_within = lhs <= 0 || PowerProduct::one().times_int(lhs, 1).lt(&q1_94.times_int(cn * q2, 1));
        let (q1f, q2f, n2f) = (q1 as f64, q2 as f64, n2 as f64);
        SweepRow {
            q1,
            q2,
            big_n: nn,
            b: t.b,
            n: t.n,
            x1: t.witness.x1,
            x2: t.witness.x2,
            ratio_x1: x1 as f64 / (n2f / q1f + q1f.powf(1.25) * q2f / n2f),
            ratio_x2: x2 as f64 * n2f / q1f.powf(2.25),
            x1_within,
            x2_within,
        }
    }
}

/// Aggregate of a construction sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    #[serde(with = "dec")]
    pub pairs: usize,
    pub max_ratio_x1: f64,
    pub max_ratio_x2: f64,
    #[serde(with = "dec")]
    pub x1_exceeding: usize,
    #[serde(with = "dec")]
    pub x2_exceeding: usize,
}

impl SweepSummary {
    pub fn of(rows: &[SweepRow]) -> Self {
        SweepSummary {
            pairs: rows.len(),
            max_ratio_x1: rows.iter().map(|r| r.ratio_x1).fold(0.0, f64::max),
            max_ratio_x2: rows.iter().map(|r| r.ratio_x2).fold(0.0, f64::max),
            x1_exceeding: rows.iter().filter(|r| !r.x1_within).count(),
            x2_exceeding: rows.iter().filter(|r| !r.x2_within).count(),
        }
    }
}

/// Run the construction on every coprime pair `lo ≤ q1 ≤ q2 ≤ hi`, rows
/// ordered by `(q1, q2)`. Every trace is verified; a failure aborts.
pub fn construct_sweep(lo: Int, hi: Int, rule: NRule, ceiling: Rat, exec: Exec) -> Result<Vec<SweepRow>> {
    if lo < 1 || hi < lo {
        return Err(domain(format!("bad sweep range [{lo}, {hi}]")));
    }
    let q1s: Vec<Int> = (lo..=hi).collect();
    let per_q1 = exec.map(&q1s, |&q1| -> Result<Vec<SweepRow>> {
        let builder = SmallSquareBuilder::new(q1)?;
        (q1..=hi)
            .filter(|&q2| gcd(q1, q2) == 1)
            .map(|q2| {
                let trace = builder.construct(q2, rule.choose(q1, q2))?;
                Ok(SweepRow::from_trace(&trace, ceiling))
            })
            .collect()
    });
    let mut rows = Vec::new();
    for chunk in per_q1 {
        rows.extend(chunk?);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h_oracle(k: Int) -> Int {
        // direct reading of the definition: smallest h that works for all units
        (1..)
            .find(|&h| {
                (0..k)
                    .filter(|&x| gcd(x, k) == 1)
                    .all(|x| (-h..=h).any(|y| (0..k).any(|z| (y * z * z - x).rem_euclid(k) == 0)))
            })
            .unwrap()
    }

    #[test]
    fn h_examples() {
        assert_eq!(capital_h(1), Ok(1));
        assert_eq!(capital_h(2), Ok(1));
        assert_eq!(capital_h(5), Ok(2));
        assert_eq!(capital_h(7), Ok(1));
        assert!(capital_h(0).is_err());
        assert!(matches!(capital_h(H_GUARD + 1), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn h_matches_definition() {
        for k in 1..=120 {
            assert_eq!(capital_h(k).unwrap(), h_oracle(k), "H({k})");
        }
    }

    #[test]
    fn construct_hand_example() {
        let t = construct_small_square(5, 7, 3).unwrap();
        assert_eq!((t.b, t.c, t.c_bar), (2, 2, 3));
        // convergents of 3/5 have denominators 1, 1, 2, 5: the largest ≤ 3 is 2
        assert_eq!(t.n, 2);
        assert_eq!((t.m, t.approx_d), (-1, 1));
        assert_eq!(t.witness, SquareWitness { x1: -2, x2: 2, n: 2 });
        assert!(3 * t.approx_d.abs() <= 5);
        // n = 3 also meets the Dirichlet bound, giving −5 + 14 = 9
        assert!(dirichlet_ok(3, 3, 5, 3));
        assert_eq!(round_ties_to_zero(-9, 5), -2);
        assert_eq!(-5 + 2 * 7, 9);
    }

    #[test]
    fn construct_modulus_one() {
        let t = construct_small_square(1, 12345, 1).unwrap();
        assert_eq!(t.witness, SquareWitness { x1: 1, x2: 0, n: 1 });
    }

    #[test]
    fn construct_rejects_bad_input() {
        assert_eq!(construct_small_square(6, 9, 3), Err(Error::NotCoprime { a: 9, m: 6 }));
        assert!(construct_small_square(5, 7, 0).is_err());
        assert!(construct_small_square(0, 7, 3).is_err());
    }

    #[test]
    fn convergent_matches_scan_condition() {
        for q1 in 2..200 {
            for c_bar in (1..q1).filter(|&c| gcd(c, q1) == 1) {
                for big_n in [1, 2, 3, 5, 8, 13, 50, 300] {
                    let n = dirichlet_convergent(c_bar, q1, big_n);
                    assert!((1..=big_n).contains(&n));
                    assert!(dirichlet_ok(n, c_bar, q1, big_n), "c̄={c_bar} q1={q1} N={big_n}");
                    assert!(dirichlet_scan(c_bar, q1, big_n).is_some());
                }
            }
        }
    }

    #[test]
    fn chosen_b_is_within_h() {
        for q1 in 2..300 {
            let h = capital_h(q1).unwrap();
            let builder = SmallSquareBuilder::new(q1).unwrap();
            for q2 in (q1..q1 + 40).filter(|&q2| gcd(q1, q2) == 1) {
                let t = builder.construct(q2, NRule::Balanced.choose(q1, q2)).unwrap();
                assert!(t.b.abs() <= h, "q1={q1} q2={q2} b={} H={h}", t.b);
            }
        }
    }

    #[test]
    fn construction_stays_in_existence_box() {
        for q1 in 1..25 {
            for q2 in (q1..40).filter(|&q2| gcd(q1, q2) == 1) {
                for big_n in [1, 3, NRule::Balanced.choose(q1, q2)] {
                    let t = construct_small_square(q1, q2, big_n).unwrap();
                    let best = existence_check(q1, q2, big_n).unwrap();
                    let radius = q2 * q2;
                    assert!(t.witness.x1.abs() <= radius && t.witness.x2.abs() <= radius);
                    let built = t.witness.x1.abs().max(t.witness.x2.abs());
                    assert!(best.x1.abs().max(best.x2.abs()) <= built);
                    assert_eq!(best.x1 * q1 + best.x2 * q2, best.n * best.n);
                }
            }
        }
    }

    #[test]
    fn existence_examples() {
        let w = existence_check(3, 5, 5).unwrap();
        assert_eq!(w.x1 * 3 + w.x2 * 5, w.n * w.n);
        // 3·2 − 5 = 1 has max coordinate 2; nothing reaches max 1 with n ≤ 5
        assert_eq!(w.x1.abs().max(w.x2.abs()), 2);
        assert_eq!(existence_check(1, 9, 4), Ok(SquareWitness { x1: 1, x2: 0, n: 1 }));
        assert_eq!(existence_check(1, 1, 4), Ok(SquareWitness { x1: 1, x2: 0, n: 1 }));
        let t = construct_small_square(5, 7, 3).unwrap();
        let o = existence_check(5, 7, 3).unwrap();
        assert!(o.x1.abs().max(o.x2.abs()) <= t.witness.x1.abs().max(t.witness.x2.abs()));
        assert!(existence_check(7, 5, 3).is_err());
        assert!(matches!(
            existence_check_with_guard(3, 1000, 1000, 10),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn sweep_rows_certify_and_order() {
        let rows = construct_sweep(2, 60, NRule::Balanced, Rat::from_integer(64), Exec::default()).unwrap();
        let seq = construct_sweep(2, 60, NRule::Balanced, Rat::from_integer(64), Exec::Sequential).unwrap();
        assert_eq!(rows, seq);
        assert!(rows.windows(2).all(|w| (w[0].q1, w[0].q2) < (w[1].q1, w[1].q2)));
        for r in &rows {
            assert_eq!(r.x1 * r.q1 + r.x2 * r.q2, r.n * r.n);
            assert!(r.x2_within && r.x1_within, "{r:?}");
            assert_eq!(r.x2_within, r.ratio_x2 < 64.0);
        }
        let summary = SweepSummary::of(&rows);
        assert_eq!(summary.x2_exceeding, 0);
        assert!(rows[0].to_csv().split(',').count() == SweepRow::CSV_HEADER.split(',').count());
    }

    #[test]
    fn exact_ratio_verdict_tracks_float_ratio() {
        // a tiny ceiling forces both verdicts to fail somewhere
        let rows = construct_sweep(2, 40, NRule::Q1, Rat::new(1, 2), Exec::Sequential).unwrap();
        for r in &rows {
            if (r.ratio_x2 - 0.5).abs() > 1e-9 {
                assert_eq!(r.x2_within, r.ratio_x2 < 0.5, "{r:?}");
            }
            if (r.ratio_x1 - 0.5).abs() > 1e-9 {
                assert_eq!(r.x1_within, r.ratio_x1 < 0.5, "{r:?}");
            }
        }
        assert!(rows.iter().any(|r| !r.x1_within || !r.x2_within));
    }

    #[test]
    fn bound_conformance_across_n_rules() {
        let ceiling = Rat::from_integer(DEFAULT_RATIO_CEILING);
        for rule in [NRule::SqrtQ1, NRule::Q1, NRule::Balanced] {
            let rows = construct_sweep(2, 150, rule, ceiling, Exec::default()).unwrap();
            let s = SweepSummary::of(&rows);
            assert_eq!((s.x1_exceeding, s.x2_exceeding), (0, 0), "{rule:?}: {s:?}");
        }
    }
}
