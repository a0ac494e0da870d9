//! Square-avoiding progressions of size `≫ T^{1/2}·n(p)` built from primes
//! `p ≡ 1 (mod 4)`, with step-by-step residue certificates, and the
//! least-non-residue scan.
//!
//! For `q ∈ [p, 2p)` a non-residue mod `p`, the progression
//! `A_{p,q}(p − 1, n(p) − 1)` sits in `[−2p², 2p²]` and contains no square:
//! a square `n² = x1·p + x2·q` with `p ∤ n` would make `x2·q` a residue,
//! which fails because `|x2| < n(p)` is a residue, `−1` is a residue and
//! `q` is not; with `p | n` one gets `x2 = 0` and `p | x1`, so `x1 = 0`.

use crate::arith::{gcd, is_prime, isqrt, jacobi, least_qnr, primes_up_to};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::progression::TwoDap;
use crate::schema::dec;
use crate::{Int, Rat};
use serde::{Deserialize, Serialize};

/// Smallest admissible prime.
pub const MIN_PRIME: Int = 13;

/// The least quadratic non-residue of a prime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonResidueRecord {
    #[serde(with = "dec")]
    pub p: Int,
    #[serde(with = "dec")]
    pub nqr: Int,
    /// `n(p)/ln p` in `f64`; display only.
    pub ratio_log: f64,
}

impl NonResidueRecord {
    pub fn new(p: Int, nqr: Int) -> Self {
        NonResidueRecord {
            p,
            nqr,
            ratio_log: nqr as f64 / (p as f64).ln(),
        }
    }

    /// `n(p) < √p + 1`, decided as `(n − 1)² < p`.
    pub fn below_sqrt_bound(&self) -> bool {
        (self.nqr - 1) * (self.nqr - 1) < self.p
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LowerBoundInstance {
    #[serde(with = "dec")]
    pub p: Int,
    #[serde(with = "dec")]
    pub q: Int,
    #[serde(with = "dec")]
    pub nqr: Int,
    #[serde(rename = "X1", with = "dec")]
    pub x1: Int,
    #[serde(rename = "X2", with = "dec")]
    pub x2: Int,
    #[serde(rename = "T", with = "dec")]
    pub t: Int,
    #[serde(with = "dec")]
    pub size: Int,
}

impl LowerBoundInstance {
    pub const CSV_HEADER: &'static str = "p,q,n_p,X1,X2,T,size,ratio";

    pub fn progression(&self) -> Result<TwoDap> {
        TwoDap::with_int_bounds(self.p, self.q, self.x1, self.x2)
    }

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.p,
            self.q,
            self.nqr,
            self.x1,
            self.x2,
            self.t,
            self.size,
            crate::schema::rat_to_string(&size_vs_t(self))
        )
    }
}

fn check_prime(p: Int) -> Result<()> {
    let bad = |reason| Err(Error::BadPrime { p, reason });
    if p < 2 || !is_prime(p)? {
        return bad("p is not prime");
    }
    if p % 4 != 1 {
        return bad("p is not 1 mod 4");
    }
    if p < MIN_PRIME {
        return bad("p must be at least 13");
    }
    Ok(())
}

/// The instance for `p` with the smallest non-residue `q ∈ [p, 2p)`.
pub fn build_instance(p: Int) -> Result<LowerBoundInstance> {
    check_prime(p)?;
    let mut q = p + 1;
    while jacobi(q, p)? != -1 {
        q += 1;
    }
    let nqr = least_qnr(p)?;
    let (x1, x2) = (p - 1, nqr - 1);
    Ok(LowerBoundInstance {
        p,
        q,
        nqr,
        x1,
        x2,
        t: 2 * p * p,
        size: (2 * x1 + 1) * (2 * x2 + 1),
    })
}

/// One checked step of the residue argument.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubVerdict {
    pub step: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueCertificate {
    pub passed: bool,
    pub steps: Vec<SubVerdict>,
}

impl ResidueCertificate {
    /// First failing step, if any.
    pub fn failure(&self) -> Option<&SubVerdict> {
        self.steps.iter().find(|s| !s.passed)
    }
}

fn sub(step: &str, passed: bool, detail: String) -> SubVerdict {
    SubVerdict {
        step: step.to_string(),
        passed,
        detail,
    }
}

/// Machine-check the square-avoidance argument for `inst`:
///
/// * `shape`: `p` admissible, `p ≤ q < 2p`, `X1 = p − 1`, `T = 2p²`, size,
///   and every value inside `[−T, T]`;
/// * `non_residue_q`: `(q | p) = −1`;
/// * `small_x2`: `(−1 | p) = 1` and `(k | p) = 1` for `1 ≤ k ≤ X2`, so
///   `x2·q` is a non-residue for every `1 ≤ |x2| ≤ X2`;
/// * `p_divides_n`: `gcd(p, q) = 1`, `X2 < p` and `X1 < p`, so `p | n`
///   forces `x2 = 0`, then `p | x1`, then `x1 = 0`;
/// * `properness`: `2·X2 < p` (a collision needs `p | x2 − y2`), `X2² < p`,
///   and the closed-form test agrees.
pub fn residue_certificate(inst: &LowerBoundInstance) -> Result<ResidueCertificate> {
    let (p, q, x1, x2) = (inst.p, inst.q, inst.x1, inst.x2);
    let mut steps = Vec::new();

    let shape_ok = check_prime(p).is_ok()
        && p <= q
        && q < 2 * p
        && x1 == p - 1
        && x2 >= 0
        && inst.t == 2 * p * p
        && inst.size == (2 * x1 + 1) * (2 * x2 + 1)
        && x1 * p + x2 * q <= inst.t;
    steps.push(sub(
        "shape",
        shape_ok,
        format!("p={p} q={q} X1={x1} X2={x2} T={}", inst.t),
    ));
    if !shape_ok {
        return Ok(ResidueCertificate { passed: false, steps });
    }

    let jq = jacobi(q, p)?;
    steps.push(sub("non_residue_q", jq == -1, format!("(q|p) = {jq}")));

    let minus_one = jacobi(-1, p)?;
    let bad_k = (1..=x2).find(|&k| jacobi(k, p) != Ok(1));
    steps.push(sub(
        "small_x2",
        minus_one == 1 && bad_k.is_none(),
        match bad_k {
            Some(k) => format!("({k}|p) ≠ 1"),
            None => format!("(-1|p) = {minus_one}, (k|p) = 1 for 1 ≤ k ≤ {x2}"),
        },
    ));

    let div_ok = gcd(p, q) == 1 && x2 < p && x1 < p;
    steps.push(sub(
        "p_divides_n",
        div_ok,
        format!("gcd(p,q) = {}, X1 < p, X2 < p", gcd(p, q)),
    ));

    let proper = 2 * x2 < p && x2 * x2 < p && inst.progression()?.is_proper();
    steps.push(sub(
        "properness",
        proper,
        format!("2·X2 = {} < p, X2² = {} < p", 2 * x2, x2 * x2),
    ));

    Ok(ResidueCertificate {
        passed: steps.iter().all(|s| s.passed),
        steps,
    })
}

/// `size/(⌊√T⌋·n(p))`.
pub fn size_vs_t(inst: &LowerBoundInstance) -> Rat {
    let root = isqrt(inst.t).expect("T ≥ 0");
    Rat::new(inst.size, root * inst.nqr)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    #[serde(with = "dec")]
    pub count: usize,
    #[serde(with = "dec")]
    pub max_nqr: Int,
    #[serde(with = "dec")]
    pub argmax_p: Int,
    pub max_ratio_log: f64,
    #[serde(with = "dec")]
    pub argmax_ratio_p: Int,
    /// `max n(p)·p^{−1/(4√e)}`; display only.
    pub max_burgess_ratio: f64,
    /// Primes where `n(p)` exceeds every smaller scanned prime.
    pub running_records: Vec<(String, String)>,
    pub all_below_sqrt: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub records: Vec<NonResidueRecord>,
    pub summary: Option<ScanSummary>,
}

const SHARD: usize = 2048;

/// `n(p)` for every prime `p ≡ 1 (mod 4)` with `13 ≤ p ≤ to`.
pub fn salie_scan(to: Int, exec: Exec) -> Result<ScanReport> {
    salie_scan_range(MIN_PRIME, to, exec)
}

/// [`salie_scan`] restricted to `from ≤ p ≤ to`; output sorted by `p`.
pub fn salie_scan_range(from: Int, to: Int, exec: Exec) -> Result<ScanReport> {
    let primes: Vec<Int> = primes_up_to(to)
        .into_iter()
        .filter(|&p| p >= from.max(MIN_PRIME) && p % 4 == 1)
        .collect();
    let shards: Vec<&[Int]> = primes.chunks(SHARD).collect();
    let records: Vec<NonResidueRecord> = exec
        .map(&shards, |shard| {
            shard
                .iter()
                .map(|&p| least_qnr(p).map(|n| NonResidueRecord::new(p, n)))
                .collect::<Result<Vec<_>>>()
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let summary = summarize(&records);
    Ok(ScanReport { records, summary })
}

fn summarize(records: &[NonResidueRecord]) -> Option<ScanSummary> {
    let first = records.first()?;
    let burgess = 1.0 / (4.0 * std::f64::consts::E.sqrt());
    let mut s = ScanSummary {
        count: records.len(),
        max_nqr: first.nqr,
        argmax_p: first.p,
        max_ratio_log: first.ratio_log,
        argmax_ratio_p: first.p,
        max_burgess_ratio: 0.0,
        running_records: Vec::new(),
        all_below_sqrt: true,
    };
    let mut best = 0;
    for r in records {
        if r.nqr > best {
            best = r.nqr;
            s.running_records.push((r.p.to_string(), r.nqr.to_string()));
        }
        if r.nqr > s.max_nqr {
            s.max_nqr = r.nqr;
            s.argmax_p = r.p;
        }
        if r.ratio_log > s.max_ratio_log {
            s.max_ratio_log = r.ratio_log;
            s.argmax_ratio_p = r.p;
        }
        s.max_burgess_ratio = s.max_burgess_ratio.max(r.nqr as f64 / (r.p as f64).powf(burgess));
        s.all_below_sqrt &= r.below_sqrt_bound();
    }
    Some(s)
}

/// Rational `size/(⌊√T⌋·n(p))` as a string, for reports.
pub fn ratio_string(inst: &LowerBoundInstance) -> String {
    crate::schema::rat_to_string(&size_vs_t(inst))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::progression::{brute_force_witness_within, DEFAULT_GUARD};

    fn legendre_oracle(a: Int, p: Int) -> i8 {
        let a = a.rem_euclid(p);
        if a == 0 {
            0
        } else if (1..p).any(|x| x * x % p == a) {
            1
        } else {
            -1
        }
    }

    #[test]
    fn build_examples() {
        let i = build_instance(13).unwrap();
        assert_eq!((i.q, i.x1, i.x2, i.t, i.size), (15, 12, 1, 338, 75));
        let i = build_instance(17).unwrap();
        assert_eq!((i.q, i.nqr, i.size), (20, 3, 165));
        let q_oracle = (18..34).find(|&q| legendre_oracle(q, 17) == -1).unwrap();
        assert_eq!(q_oracle, 20);
        assert!(matches!(build_instance(11), Err(Error::BadPrime { p: 11, .. })));
        assert!(matches!(build_instance(5), Err(Error::BadPrime { .. })));
        assert!(matches!(build_instance(21), Err(Error::BadPrime { .. })));
    }

    #[test]
    fn certificate_and_brute_force_agree() {
        for p in (13..=400).filter(|&p| p % 4 == 1 && is_prime(p).unwrap()) {
            let i = build_instance(p).unwrap();
            let c = residue_certificate(&i).unwrap();
            assert!(c.passed, "p={p}: {:?}", c.failure());
            let ap = i.progression().unwrap();
            assert_eq!(brute_force_witness_within(&ap, i.t, DEFAULT_GUARD).unwrap(), None);
            assert!(size_vs_t(&i) >= Rat::from_integer(1));
        }
    }

    #[test]
    fn tampered_instance_fails_small_x2() {
        let mut i = build_instance(13).unwrap();
        i.x2 = i.nqr;
        i.size = (2 * i.x1 + 1) * (2 * i.x2 + 1);
        let c = residue_certificate(&i).unwrap();
        assert!(!c.passed);
        assert_eq!(c.failure().unwrap().step, "small_x2");
    }

    #[test]
    fn size_ratio_examples() {
        assert_eq!(size_vs_t(&build_instance(13).unwrap()), Rat::new(75, 36));
        assert_eq!(size_vs_t(&build_instance(17).unwrap()), Rat::new(165, 72));
    }

    #[test]
    fn scan_examples() {
        let r = salie_scan(100, Exec::default()).unwrap();
        let got: Vec<(Int, Int)> = r.records.iter().map(|x| (x.p, x.nqr)).collect();
        assert_eq!(
            got,
            vec![
                (13, 2),
                (17, 3),
                (29, 2),
                (37, 2),
                (41, 3),
                (53, 2),
                (61, 2),
                (73, 5),
                (89, 3),
                (97, 5)
            ]
        );
        for &(p, n) in &got {
            assert_eq!(legendre_oracle(n, p), -1);
            assert!((2..n).all(|k| legendre_oracle(k, p) == 1));
        }
        let s = r.summary.unwrap();
        assert_eq!((s.max_nqr, s.argmax_p), (5, 73));
        assert!(s.all_below_sqrt);
        assert_eq!(salie_scan(12, Exec::default()).unwrap().records, vec![]);
        let part = salie_scan_range(30, 60, Exec::Sequential).unwrap();
        assert_eq!(part.records.iter().map(|x| x.p).collect::<Vec<_>>(), vec![37, 41, 53]);
    }

    #[test]
    fn scan_strategies_agree() {
        let a = salie_scan(60_000, Exec::Sequential).unwrap();
        let b = salie_scan(60_000, Exec::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
