//! Symmetric two-dimensional progressions, their properness, and the
//! search for (or certified absence of) non-zero square values.

use crate::arith::{checked_add, checked_mul, gcd, is_perfect_square, isqrt, mod_inverse, rat_is_nonneg};
use crate::error::{domain, Error, Result};
use crate::exec::Exec;
use crate::schema::{dec, rat};
use crate::{Int, Rat};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

/// Default cap on the number of box points a brute-force enumeration may
/// visit.
pub const DEFAULT_GUARD: u128 = 100_000_000;

/// `{x1·q1 + x2·q2 : |x1| ≤ X1, |x2| ≤ X2}` with integer `x1, x2`.
///
/// Radii are exact rationals; only their floors enter any enumeration.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TwoDap {
    #[serde(with = "dec")]
    q1: Int,
    #[serde(with = "dec")]
    q2: Int,
    #[serde(rename = "x1bound", with = "rat")]
    x1_bound: Rat,
    #[serde(rename = "x2bound", with = "rat")]
    x2_bound: Rat,
}

impl TwoDap {
    pub fn new(q1: Int, q2: Int, x1_bound: Rat, x2_bound: Rat) -> Result<Self> {
        if q1 < 1 || q2 < 1 {
            return Err(domain(format!("steps must be ≥ 1, got q1={q1} q2={q2}")));
        }
        if !rat_is_nonneg(&x1_bound) || !rat_is_nonneg(&x2_bound) {
            return Err(domain("box radii must be non-negative"));
        }
        let ap = TwoDap {
            q1,
            q2,
            x1_bound,
            x2_bound,
        };
        ap.value_bound()?;
        Ok(ap)
    }

    pub fn with_int_bounds(q1: Int, q2: Int, x1: Int, x2: Int) -> Result<Self> {
        Self::new(q1, q2, Rat::from_integer(x1), Rat::from_integer(x2))
    }

    /// Re-validate after deserialization.
    pub fn validated(self) -> Result<Self> {
        Self::new(self.q1, self.q2, self.x1_bound, self.x2_bound)
    }

    pub fn q1(&self) -> Int {
        self.q1
    }

    pub fn q2(&self) -> Int {
        self.q2
    }

    pub fn x1_bound(&self) -> Rat {
        self.x1_bound
    }

    pub fn x2_bound(&self) -> Rat {
        self.x2_bound
    }

    /// `⌊X1⌋`.
    pub fn b1(&self) -> Int {
        self.x1_bound.floor().to_integer()
    }

    /// `⌊X2⌋`.
    pub fn b2(&self) -> Int {
        self.x2_bound.floor().to_integer()
    }

    /// `B1·q1 + B2·q2`, the largest absolute value in the progression.
    pub fn value_bound(&self) -> Result<Int> {
        checked_add(
            checked_mul(self.b1(), self.q1, "value bound")?,
            checked_mul(self.b2(), self.q2, "value bound")?,
            "value bound",
        )
    }

    /// `(2B1 + 1)(2B2 + 1)`; the number of elements when proper.
    pub fn cardinality(&self) -> Result<Int> {
        checked_mul(2 * self.b1() + 1, 2 * self.b2() + 1, "cardinality")
    }

    /// Number of box points, for enumeration guards.
    pub fn box_points(&self) -> u128 {
        (2 * self.b1() as u128 + 1).saturating_mul(2 * self.b2() as u128 + 1)
    }

    /// Whether every value has a unique representation. A collision
    /// `Δ1·q1 = −Δ2·q2` with `|Δi| ≤ 2Bi` exists iff `q2/d ≤ 2B1` and
    /// `q1/d ≤ 2B2`, where `d = gcd(q1, q2)`.
    pub fn is_proper(&self) -> bool {
        let d = gcd(self.q1, self.q2);
        !(self.q2 / d <= 2 * self.b1() && self.q1 / d <= 2 * self.b2())
    }

    /// `x1·q1 + x2·q2` for a box point, or `None` outside the box.
    pub fn value_at(&self, x1: Int, x2: Int) -> Option<Int> {
        (x1.abs() <= self.b1() && x2.abs() <= self.b2()).then(|| x1 * self.q1 + x2 * self.q2)
    }

    /// The same progression with the two axes exchanged.
    pub fn swapped(&self) -> TwoDap {
        TwoDap {
            q1: self.q2,
            q2: self.q1,
            x1_bound: self.x2_bound,
            x2_bound: self.x1_bound,
        }
    }
}

/// A point `(x1, x2)` of the box with `x1·q1 + x2·q2 = n²`, `n ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SquareWitness {
    #[serde(with = "dec")]
    pub x1: Int,
    #[serde(with = "dec")]
    pub x2: Int,
    #[serde(with = "dec")]
    pub n: Int,
}

impl SquareWitness {
    /// Build a witness, checking the identity and box membership.
    pub fn checked(ap: &TwoDap, x1: Int, x2: Int, n: Int) -> Result<Self> {
        let w = SquareWitness { x1, x2, n };
        w.verify(ap)?;
        Ok(w)
    }

    pub fn verify(&self, ap: &TwoDap) -> Result<()> {
        if self.n < 1 {
            return Err(Error::Invariant(format!("witness n = {} is not positive", self.n)));
        }
        match ap.value_at(self.x1, self.x2) {
            None => Err(Error::Invariant(format!("witness {self:?} lies outside the box"))),
            Some(v) if Some(v) != self.n.checked_mul(self.n) => {
                Err(Error::Invariant(format!("witness {self:?} has value {v} ≠ n²")))
            }
            Some(_) => Ok(()),
        }
    }

    /// Shared tie-break: smallest `n`, then smallest `|x1|`, then `x1 > 0`.
    fn order_key(&self) -> (Int, Int, bool) {
        (self.n, self.x1.abs(), self.x1 < 0)
    }
}

/// Outcome of an exhaustive square search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Certificate {
    /// A square was found.
    Witness(SquareWitness),
    /// No `n` with `1 ≤ n ≤ max_n` and `n² ≤ T` is represented. Every `n²`
    /// up to the ambient bound was covered.
    SquareFree {
        #[serde(with = "dec")]
        max_n: Int,
    },
}

impl Certificate {
    pub fn is_square_free(&self) -> bool {
        matches!(self, Certificate::SquareFree { .. })
    }

    pub fn witness(&self) -> Option<SquareWitness> {
        match self {
            Certificate::Witness(w) => Some(*w),
            Certificate::SquareFree { .. } => None,
        }
    }
}

/// Per-progression data reused for every `n`.
struct Solver {
    d: Int,
    q1r: Int,
    q2r: Int,
    inv: Int,
    b1: Int,
    b2: Int,
}

impl Solver {
    fn new(ap: &TwoDap) -> Self {
        let d = gcd(ap.q1, ap.q2);
        let (q1r, q2r) = (ap.q1 / d, ap.q2 / d);
        let inv = if q2r == 1 {
            0
        } else {
            mod_inverse(q1r, q2r).expect("coprime after gcd split")
        };
        Solver {
            d,
            q1r,
            q2r,
            inv,
            b1: ap.b1(),
            b2: ap.b2(),
        }
    }

    /// The tie-break-minimal box point with value `n²`, if any.
    fn solve(&self, n: Int) -> Option<SquareWitness> {
        let n2 = n * n;
        if n2 % self.d != 0 {
            return None;
        }
        let r = n2 / self.d;
        // x1·q1r + x2·q2r = r with |x2| ≤ B2 confines x1 to an interval.
        let slack = self.b2 * self.q2r;
        let lo = (-self.b1).max(div_ceil(r - slack, self.q1r));
        let hi = self.b1.min((r + slack).div_euclid(self.q1r));
        if lo > hi {
            return None;
        }
        // and the congruence x1 ≡ r·q1r⁻¹ (mod q2r) picks a residue class
        let x0 = if self.q2r == 1 {
            0
        } else {
            crate::arith::mul_mod(r, self.inv, self.q2r)
        };
        let m = self.q2r;
        let pos = {
            let start = lo.max(0);
            let x = start + (x0 - start).rem_euclid(m);
            (x <= hi).then_some(x)
        };
        let neg = {
            let end = hi.min(-1);
            let x = end - (end - x0).rem_euclid(m);
            (x >= lo && end >= lo).then_some(x)
        };
        let x1 = match (pos, neg) {
            (Some(p), Some(q)) => {
                if p <= -q {
                    p
                } else {
                    q
                }
            }
            (Some(p), None) => p,
            (None, Some(q)) => q,
            (None, None) => return None,
        };
        let x2 = (r - x1 * self.q1r) / self.q2r;
        debug_assert_eq!(x1 * self.q1r + x2 * self.q2r, r);
        Some(SquareWitness { x1, x2, n })
    }
}

fn div_ceil(a: Int, b: Int) -> Int {
    -((-a).div_euclid(b))
}

fn search_limit(ap: &TwoDap, t: Int) -> Result<Int> {
    if t < 0 {
        return Err(domain(format!("ambient bound T must be non-negative, got {t}")));
    }
    isqrt(t.min(ap.value_bound()?))
}

/// The minimal square witness with `n² ≤ min(T, value_bound)`.
///
/// For each `n` in ascending order the equation `x1·q1 + x2·q2 = n²` is
/// reduced by `d = gcd(q1, q2)` (skipping `n` with `d ∤ n²`), solved as a
/// congruence in `x1` modulo `q2/d`, and the admissible class member of
/// least `|x1|` inside the box is taken directly.
pub fn find_square_witness(ap: &TwoDap, t: Int) -> Result<Option<SquareWitness>> {
    let limit = search_limit(ap, t)?;
    let solver = Solver::new(ap);
    Ok((1..=limit).find_map(|n| solver.solve(n)))
}

const CHUNK: Int = 1 << 14;

/// [`find_square_witness`] with the `n`-range split into chunks searched
/// under `exec`; the first chunk holding a witness wins, so the result is
/// identical to the sequential search.
pub fn find_square_witness_with(ap: &TwoDap, t: Int, exec: Exec) -> Result<Option<SquareWitness>> {
    let limit = search_limit(ap, t)?;
    if limit <= CHUNK || exec == Exec::Sequential {
        return find_square_witness(ap, t);
    }
    let solver = Solver::new(ap);
    let starts: Vec<Int> = (0..).map(|k| 1 + k * CHUNK).take_while(|&s| s <= limit).collect();
    // batches of chunks bound the wasted work past the first hit
    for batch in starts.chunks(64) {
        let found = exec.map(batch, |&s| {
            (s..=(s + CHUNK - 1).min(limit)).find_map(|n| solver.solve(n))
        });
        if let Some(w) = found.into_iter().flatten().next() {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Exhaustive certificate: a witness, or `SquareFree` with `max_n = ⌊√T⌋`
/// (squares beyond `value_bound` cannot be hit, so the whole of `[1, T]`
/// is covered).
pub fn certify_square_free(ap: &TwoDap, t: Int) -> Result<Certificate> {
    certify_square_free_with(ap, t, Exec::Sequential)
}

pub fn certify_square_free_with(ap: &TwoDap, t: Int, exec: Exec) -> Result<Certificate> {
    match find_square_witness_with(ap, t, exec)? {
        Some(w) => {
            w.verify(ap)?;
            Ok(Certificate::Witness(w))
        }
        None => Ok(Certificate::SquareFree { max_n: isqrt(t)? }),
    }
}

/// Double loop over the whole box; the independent oracle for
/// [`find_square_witness`] with `T = value_bound`.
pub fn brute_force_witness(ap: &TwoDap) -> Result<Option<SquareWitness>> {
    brute_force_witness_within(ap, ap.value_bound()?, DEFAULT_GUARD)
}

/// Brute force restricted to squares `≤ t`, visiting at most `guard` points.
pub fn brute_force_witness_within(ap: &TwoDap, t: Int, guard: u128) -> Result<Option<SquareWitness>> {
    if t < 0 {
        return Err(domain(format!("ambient bound T must be non-negative, got {t}")));
    }
    let size = ap.box_points();
    if size > guard {
        return Err(Error::TooLarge {
            what: "brute-force box",
            size,
            guard,
        });
    }
    let (b1, b2) = (ap.b1(), ap.b2());
    let mut best: Option<SquareWitness> = None;
    for x1 in -b1..=b1 {
        for x2 in -b2..=b2 {
            let v = x1 * ap.q1 + x2 * ap.q2;
            if v >= 1 && v <= t && is_perfect_square(v) {
                let w = SquareWitness { x1, x2, n: isqrt(v)? };
                if best.is_none_or(|b| w.order_key() < b.order_key()) {
                    best = Some(w);
                }
            }
        }
    }
    Ok(best)
}

/// Properness by listing every value; guarded like the brute-force search.
pub fn is_proper_by_enumeration(ap: &TwoDap, guard: u128) -> Result<bool> {
    let size = ap.box_points();
    if size > guard {
        return Err(Error::TooLarge {
            what: "properness enumeration",
            size,
            guard,
        });
    }
    let mut seen = HashSet::with_capacity(size as usize);
    for x1 in -ap.b1()..=ap.b1() {
        for x2 in -ap.b2()..=ap.b2() {
            if !seen.insert(x1 * ap.q1 + x2 * ap.q2) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
