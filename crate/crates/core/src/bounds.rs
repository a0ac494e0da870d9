//! Size bounds for square-avoiding progressions, evaluated exactly with
//! every `ε` set to zero (or passed explicitly).
//!
//! Writing `q1 = T^a`, `q2 = T^b` with `0 ≤ a ≤ b ≤ 1`, the upper-bound
//! argument splits on which coordinate radius is at most `q2^{1/2}`:
//!
//! * radius 1 small: exponent `5/7` when `b ≤ 4/7`, else `1 − b/2`;
//! * radius 2 small: for `b ≥ 2/3` the smaller of the product bound
//!   `1 + a/8 − b/2` and the containment bound `2 − a − b`; for `b < 2/3`,
//!   `20/27` when `a + 2b ≤ 52/27` (an admissible `N` exists) and
//!   `1 − a + b/2` otherwise.
//!
//! The overall exponent at a point is the larger of the two branches, and
//! its supremum over the simplex is `20/27`, attained at `(16/27, 2/3)`.

use crate::arith::{ceil_nth_root, gcd, isqrt, squarefree_kernel, PowerProduct};
use crate::error::{domain, Error, Result};
use crate::exec::Exec;
use crate::progression::SquareWitness;
use crate::schema::rat_to_string;
use crate::zaharescu::{construct_small_square, ZaharescuTrace};
use crate::{Int, Rat};
use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use std::fmt;

fn r(n: Int, d: Int) -> Rat {
    Rat::new(n, d)
}

/// Largest `B` such that `{x·q : |x| ≤ B} ⊂ [−T, T]` contains no non-zero
/// square: `min(⌊T/q⌋, s(q) − 1)` where `s(q)` is the squarefree kernel.
/// Always `B < √T`.
pub fn one_d_bound(q: Int, t: Int) -> Result<Int> {
    if q < 1 || t < 0 {
        return Err(domain(format!("need q ≥ 1 and T ≥ 0, got q={q} T={t}")));
    }
    Ok((t / q).min(squarefree_kernel(q)? - 1))
}

/// `(T/q1, T/q2)`: no progression inside `[−T, T]` can have larger radii.
pub fn containment_caps(q1: Int, q2: Int, t: Int) -> Result<(Rat, Rat)> {
    if q1 < 1 || q2 < 1 {
        return Err(domain(format!("steps must be ≥ 1, got q1={q1} q2={q2}")));
    }
    Ok((r(t, q1), r(t, q2)))
}

/// `(a, b) = (log_T q1, log_T q2)` with `0 ≤ a ≤ b ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExponentPoint {
    pub a: Rat,
    pub b: Rat,
}

impl ExponentPoint {
    pub fn new(a: Rat, b: Rat) -> Result<Self> {
        if !(Rat::zero() <= a && a <= b && b <= Rat::from_integer(1)) {
            return Err(domain(format!(
                "exponent point ({}, {}) outside 0 ≤ a ≤ b ≤ 1",
                rat_to_string(&a),
                rat_to_string(&b)
            )));
        }
        Ok(ExponentPoint { a, b })
    }
}

impl fmt::Display for ExponentPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", rat_to_string(&self.a), rat_to_string(&self.b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CaseLabel {
    IA,
    IB,
    IIA1,
    IIA2,
    IIB1,
    IIB2,
}

impl CaseLabel {
    /// The bounds combined in this branch.
    pub fn constituents(self) -> &'static [&'static str] {
        match self {
            CaseLabel::IA => &["coordinate_dichotomy", "reversed_small_square", "one_dimensional"],
            CaseLabel::IB => &["coordinate_dichotomy", "containment"],
            CaseLabel::IIA1 => &["coordinate_dichotomy", "product_bound"],
            CaseLabel::IIA2 => &["coordinate_dichotomy", "containment"],
            CaseLabel::IIB1 => &["coordinate_dichotomy", "small_square", "containment"],
            CaseLabel::IIB2 => &["coordinate_dichotomy", "containment"],
        }
    }

    pub fn is_case_one(self) -> bool {
        matches!(self, CaseLabel::IA | CaseLabel::IB)
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseReport {
    pub point: ExponentPoint,
    /// Branch attaining the overall exponent (radius-2 branch on ties).
    pub case_label: CaseLabel,
    pub exponent: Rat,
    pub case_one: (CaseLabel, Rat),
    pub case_two: (CaseLabel, Rat),
    pub constituents: Vec<&'static str>,
}

fn case_one(p: &ExponentPoint) -> (CaseLabel, Rat) {
    if p.b <= r(4, 7) {
        // X2 ≪ T^{5/7}/X1 + X1 together with X1² ≪ T^{4/7}; only the
        // resulting product exponent is kept
        (CaseLabel::IA, r(5, 7))
    } else {
        (CaseLabel::IB, Rat::from_integer(1) - p.b / 2)
    }
}

fn case_two(p: &ExponentPoint) -> (CaseLabel, Rat) {
    let one = Rat::from_integer(1);
    if p.b >= r(2, 3) {
        let product = one + p.a / 8 - p.b / 2;
        let containment = Rat::from_integer(2) - p.a - p.b;
        if product <= containment {
            (CaseLabel::IIA1, product)
        } else {
            (CaseLabel::IIA2, containment)
        }
    } else if p.a + p.b * 2 <= r(52, 27) {
        (CaseLabel::IIB1, r(20, 27))
    } else {
        (CaseLabel::IIB2, one - p.a + p.b / 2)
    }
}

/// The piecewise exponent at `p`.
pub fn case_exponent(p: ExponentPoint) -> CaseReport {
    let one = case_one(&p);
    let two = case_two(&p);
    let (case_label, exponent) = if one.1 > two.1 { one } else { two };
    CaseReport {
        point: p,
        case_label,
        exponent,
        case_one: one,
        case_two: two,
        constituents: case_label.constituents().to_vec(),
    }
}

/// Every grid point `(i/r, j/r)`, `0 ≤ i ≤ j ≤ r`, row by row (`j`
/// ascending, then `i`).
pub fn exponent_grid(resolution: Int, exec: Exec) -> Result<Vec<CaseReport>> {
    if resolution < 1 {
        return Err(domain(format!("grid resolution must be ≥ 1, got {resolution}")));
    }
    let rows: Vec<Int> = (0..=resolution).collect();
    Ok(exec.flat_map(&rows, |&j| {
        (0..=j)
            .map(|i| {
                case_exponent(ExponentPoint {
                    a: r(i, resolution),
                    b: r(j, resolution),
                })
            })
            .collect()
    }))
}

/// Intersections, inside the simplex, of the lines on which the piecewise
/// definition changes, plus the simplex sides.
pub fn corner_points() -> Vec<ExponentPoint> {
    // α·a + β·b = γ
    let lines: [(Rat, Rat, Rat); 8] = [
        (r(0, 1), r(1, 1), r(4, 7)),
        (r(0, 1), r(1, 1), r(2, 3)),
        (r(1, 1), r(0, 1), r(16, 27)),
        (r(1, 1), r(2, 1), r(52, 27)),
        (r(1, 1), r(4, 9), r(8, 9)),
        (r(1, 1), r(-1, 1), r(0, 1)),
        (r(1, 1), r(0, 1), r(0, 1)),
        (r(0, 1), r(1, 1), r(1, 1)),
    ];
    let mut pts = Vec::new();
    for (i, l1) in lines.iter().enumerate() {
        for l2 in &lines[i + 1..] {
            let det = l1.0 * l2.1 - l1.1 * l2.0;
            if det.is_zero() {
                continue;
            }
            let a = (l1.2 * l2.1 - l1.1 * l2.2) / det;
            let b = (l1.0 * l2.2 - l1.2 * l2.0) / det;
            if let Ok(p) = ExponentPoint::new(a, b) {
                pts.push(p);
            }
        }
    }
    pts.sort();
    pts.dedup();
    pts
}

/// Which part of the report to maximize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    Overall,
    CaseOne,
    CaseTwo,
}

/// Restriction of the simplex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Full,
    /// `b ≤ 4/7`
    SmallSecondStep,
}

impl Region {
    fn contains(self, p: &ExponentPoint) -> bool {
        match self {
            Region::Full => true,
            Region::SmallSecondStep => p.b <= r(4, 7),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentSurvey {
    pub supremum: Rat,
    /// Every evaluated point attaining the supremum, sorted.
    pub attaining: Vec<ExponentPoint>,
    pub evaluated: usize,
}

impl ExponentSurvey {
    pub fn attained_at(&self, p: ExponentPoint) -> bool {
        self.attaining.binary_search(&p).is_ok()
    }
}

/// Supremum of the overall exponent over the grid of the given resolution
/// together with all corner points.
pub fn exponent_supremum(resolution: Int) -> Result<ExponentSurvey> {
    exponent_supremum_where(resolution, Region::Full, Component::Overall, Exec::default())
}

pub fn exponent_supremum_where(
    resolution: Int,
    region: Region,
    component: Component,
    exec: Exec,
) -> Result<ExponentSurvey> {
    if resolution < 27 {
        return Err(domain(format!("resolution must be ≥ 27, got {resolution}")));
    }
    let pick = |c: &CaseReport| match component {
        Component::Overall => c.exponent,
        Component::CaseOne => c.case_one.1,
        Component::CaseTwo => c.case_two.1,
    };
    let mut values: Vec<(ExponentPoint, Rat)> = exponent_grid(resolution, exec)?
        .iter()
        .chain(
            corner_points()
                .into_iter()
                .map(case_exponent)
                .collect::<Vec<_>>()
                .iter(),
        )
        .filter(|c| region.contains(&c.point))
        .map(|c| (c.point, pick(c)))
        .collect();
    values.sort();
    values.dedup();
    let supremum = values.iter().map(|v| v.1).max().ok_or_else(|| domain("empty region"))?;
    let attaining = values.iter().filter(|v| v.1 == supremum).map(|v| v.0).collect();
    Ok(ExponentSurvey {
        supremum,
        attaining,
        evaluated: values.len(),
    })
}

/// Smallest `N` with `N^16 ≥ q1^9·q2^4`, i.e. `⌈q1^{9/16}·q2^{1/4}⌉`.
pub fn balanced_n(q1: Int, q2: Int) -> Int {
    assert!(q1 >= 1 && q2 >= 1, "steps must be ≥ 1");
    let x = BigUint::from(q1 as u128).pow(9) * BigUint::from(q2 as u128).pow(4);
    ceil_nth_root(&x, 16).to_i128().expect("fits")
}

/// The three conditions on `N` that make the small-square branch give
/// exponent `20/27`:
///
/// * upper: `N² ≤ q1·q2^{−1/2−ε}·T^{20/27+2ε}`
/// * lower: `N² ≥ q1^{5/4+ε}·q2^{3/2+ε}·T^{−20/27−ε}`
/// * lower: `N² ≥ q1^{5/4+ε}·T^{7/27}`
#[derive(Debug, Clone)]
pub struct NConditions {
    upper: PowerProduct,
    lower_mixed: PowerProduct,
    lower_plain: PowerProduct,
}

impl NConditions {
    pub fn new(q1: Int, q2: Int, t: Int, eps: Rat) -> Result<Self> {
        if !(1 <= q1 && q1 <= q2 && q2 <= t) {
            return Err(domain(format!("need 1 ≤ q1 ≤ q2 ≤ T, got q1={q1} q2={q2} T={t}")));
        }
        if eps < Rat::zero() {
            return Err(domain("eps must be non-negative"));
        }
        let upper = PowerProduct::one()
            .times_int(q1, 1)
            .times(q2, r(-1, 2) - eps)
            .times(t, r(20, 27) + eps * 2);
        let lower_mixed = PowerProduct::one()
            .times(q1, r(5, 4) + eps)
            .times(q2, r(3, 2) + eps)
            .times(t, r(-20, 27) - eps);
        let lower_plain = PowerProduct::one().times(q1, r(5, 4) + eps).times(t, r(7, 27));
        Ok(NConditions {
            upper,
            lower_mixed,
            lower_plain,
        })
    }

    fn n_squared(n: Int) -> PowerProduct {
        PowerProduct::one().times_int(n, 2)
    }

    pub fn upper_holds(&self, n: Int) -> bool {
        Self::n_squared(n).le(&self.upper)
    }

    pub fn lower_holds(&self, n: Int) -> bool {
        let n2 = Self::n_squared(n);
        self.lower_mixed.le(&n2) && self.lower_plain.le(&n2)
    }

    /// Smallest `N ≥ 1` meeting both lower bounds.
    fn lowest(&self) -> Int {
        if self.lower_holds(1) {
            return 1;
        }
        let mut hi = 2;
        while !self.lower_holds(hi) {
            hi *= 2;
        }
        let mut lo = hi / 2; // fails
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.lower_holds(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    /// Largest `N ≥ 1` meeting the upper bound.
    fn highest(&self) -> Option<Int> {
        if !self.upper_holds(1) {
            return None;
        }
        let mut lo = 1;
        while self.upper_holds(lo * 2) {
            lo *= 2;
        }
        let mut hi = lo * 2; // fails
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.upper_holds(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(lo)
    }
}

/// The integer window `[N_lo, N_hi]` of admissible `N`, or `None` if empty.
pub fn n_window(q1: Int, q2: Int, t: Int, eps: Rat) -> Result<Option<(Int, Int)>> {
    let c = NConditions::new(q1, q2, t, eps)?;
    let Some(hi) = c.highest() else {
        return Ok(None);
    };
    let lo = c.lowest();
    Ok((lo <= hi).then_some((lo, hi)))
}

/// Outcome of the coordinate-dichotomy check on one box.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DichotomyVerdict {
    /// Some radius is at most `ceiling·q2^{1/2}`; nothing to check.
    Vacuous,
    /// Both radii are large and the constructed square lies in the box.
    WitnessInBox(SquareWitness),
    /// Both radii are large but the constructed square falls outside the
    /// box: a counterexample to this ceiling for the construction.
    Flagged(Box<ZaharescuTrace>),
}

impl DichotomyVerdict {
    pub fn passed(&self) -> bool {
        !matches!(self, DichotomyVerdict::Flagged(_))
    }
}

/// `X > c·√q2` for non-negative rationals, decided as `X² > c²·q2`.
fn exceeds_scaled_root(x: Rat, c: Rat, q2: Int) -> bool {
    x * x > c * c * Rat::from_integer(q2)
}

/// If both radii exceed `ceiling·q2^{1/2}`, run the small-square
/// construction with `N = ⌈q2^{3/4}⌉` and report whether its square lands
/// in the box.
pub fn dichotomy_check(q1: Int, q2: Int, x1: Rat, x2: Rat, ceiling: Rat) -> Result<DichotomyVerdict> {
    if gcd(q1, q2) != 1 {
        return Err(Error::NotCoprime { a: q2, m: q1 });
    }
    if !(exceeds_scaled_root(x1, ceiling, q2) && exceeds_scaled_root(x2, ceiling, q2)) {
        return Ok(DichotomyVerdict::Vacuous);
    }
    let big_n = ceil_nth_root(&BigUint::from(q2 as u128).pow(3), 4)
        .to_i128()
        .expect("fits");
    let trace = construct_small_square(q1, q2, big_n)?;
    let w = trace.witness;
    let inside = Rat::from_integer(w.x1.abs()) <= x1 && Rat::from_integer(w.x2.abs()) <= x2;
    Ok(if inside {
        DichotomyVerdict::WitnessInBox(w)
    } else {
        DichotomyVerdict::Flagged(Box::new(trace))
    })
}

/// `isqrt(T) + 1`, the strict upper limit for [`one_d_bound`].
pub fn one_d_ceiling(t: Int) -> Result<Int> {
    Ok(isqrt(t)? + 1)
}
