//! Lattice reduction for progressions whose steps share a factor.
//!
//! With `d = gcd(q1, q2)` and `q̃i = qi/d`, the box points whose value is
//! divisible by `d²` form the lattice `L = {x : x1·q̃1 + x2·q̃2 ≡ 0 (mod d)}`
//! of determinant `d`. Minima of the box gauge
//! `g(x) = max(|x1|·U^{1/2}, |x2|·U^{−1/2})` with `U = X2/X1` give a
//! progression with steps `p_i = (u·q̃)/d` and ambient `⌊T/d²⌋` whose
//! values, times `d²`, lie in the original one.
//!
//! All gauges are handled squared: with `U = a/b` in lowest terms,
//! `g(x)² = M(x)²/(ab)` where `M(x) = max(|a·x1|, |b·x2|)` is an integer.

use crate::arith::{checked_mul, gcd, isqrt, mod_inverse};
use crate::error::{domain, Error, Result};
use crate::progression::{brute_force_witness_within, is_proper_by_enumeration, TwoDap};
use crate::schema::{dec, dec_pair, rat};
use crate::{Int, Rat};
use num_traits::{CheckedMul, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub type Vector = (Int, Int);

/// Default Case I threshold: gcds up to this size are divided out directly.
pub const DEFAULT_C0: Int = 16;

/// Cap on the lattice points visited when picking minima attainers.
pub const MINIMA_GUARD: u128 = 50_000_000;

/// `{x ∈ ℤ² : x1·q̃1 + x2·q̃2 ≡ 0 (mod d)}` with an upper-triangular
/// basis `(g, h), (0, d/g)`, `0 ≤ h < d/g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lattice2 {
    #[serde(with = "dec_pair")]
    pub row1: Vector,
    #[serde(with = "dec_pair")]
    pub row2: Vector,
    #[serde(with = "dec")]
    pub det: Int,
    #[serde(with = "dec")]
    d: Int,
    #[serde(with = "dec")]
    qt1: Int,
    #[serde(with = "dec")]
    qt2: Int,
}

impl Lattice2 {
    pub fn basis(&self) -> [Vector; 2] {
        [self.row1, self.row2]
    }

    pub fn contains(&self, x: Vector) -> bool {
        (x.0 % self.d * (self.qt1 % self.d) + x.1 % self.d * (self.qt2 % self.d)) % self.d == 0
    }

    fn g(&self) -> Int {
        self.row1.0
    }

    fn h(&self) -> Int {
        self.row1.1
    }

    fn e(&self) -> Int {
        self.row2.1
    }
}

/// Hermite basis of the kernel of `x ↦ x1·q̃1 + x2·q̃2 mod d`.
pub fn congruence_lattice(d: Int, qt1: Int, qt2: Int) -> Result<Lattice2> {
    if d < 1 {
        return Err(domain(format!("modulus must be ≥ 1, got {d}")));
    }
    if gcd(gcd(qt1, qt2), d) != 1 {
        return Err(domain(format!("gcd(q̃1, q̃2, d) must be 1, got q̃1={qt1} q̃2={qt2} d={d}")));
    }
    // x1 ≡ 0 (mod g) since gcd(q̃1, g) = 1; and gcd(q̃2/g, d/g) = 1
    let g = gcd(qt2, d);
    let e = d / g;
    let h = if e == 1 {
        0
    } else {
        let inv = mod_inverse((qt2 / g).rem_euclid(e), e)?;
        (-(qt1.rem_euclid(e)) * inv).rem_euclid(e)
    };
    Ok(Lattice2 {
        row1: (g, h),
        row2: (0, e),
        det: d,
        d,
        qt1,
        qt2,
    })
}

/// The integer form `M(x) = max(|a·x1|, |b·x2|)` for `U = a/b`.
#[derive(Debug, Clone, Copy)]
struct BoxNorm {
    a: Int,
    b: Int,
}

impl BoxNorm {
    fn new(u: Rat) -> Result<Self> {
        if !u.is_positive() {
            return Err(domain("U must be positive"));
        }
        Ok(BoxNorm {
            a: *u.numer(),
            b: *u.denom(),
        })
    }

    fn of(&self, x: Vector) -> Result<Int> {
        Ok(checked_mul(self.a, x.0.abs(), "box norm")?.max(checked_mul(self.b, x.1.abs(), "box norm")?))
    }

    fn lambda_sq(&self, m: Int) -> Result<Rat> {
        Ok(Rat::new(checked_mul(m, m, "λ²")?, checked_mul(self.a, self.b, "λ²")?))
    }
}

fn sub_mul(x: Vector, mu: Int, y: Vector) -> Result<Vector> {
    let c = |p: Int, q: Int| {
        mu.checked_mul(q)
            .and_then(|t| p.checked_sub(t))
            .ok_or(Error::Overflow("basis reduction"))
    };
    Ok((c(x.0, y.0)?, c(x.1, y.1)?))
}

fn floor_div(n: Int, d: Int) -> Int {
    n.div_euclid(d) - if d < 0 && n.rem_euclid(d) != 0 { 1 } else { 0 }
}

/// Integer `μ` minimizing `M(x − μ·y)`. The real minimizer of this convex
/// piecewise-linear function sits at a breakpoint, so the floors and
/// ceilings of the breakpoints suffice.
fn best_multiplier(norm: &BoxNorm, x: Vector, y: Vector) -> Result<Int> {
    let lin = |s: Int, w: Vector| -> Result<Int> {
        checked_mul(norm.a, w.0, "basis reduction")?
            .checked_sub(s * checked_mul(norm.b, w.1, "basis reduction")?)
            .ok_or(Error::Overflow("basis reduction"))
    };
    let mut fracs: Vec<(Int, Int)> = vec![(x.0, y.0), (x.1, y.1)];
    for s in [1, -1] {
        fracs.push((lin(s, x)?, lin(s, y)?));
    }
    let mut cands = vec![0];
    for (n, d) in fracs {
        if d != 0 {
            let f = floor_div(n, d);
            cands.extend([f, f + 1]);
        }
    }
    let mut best = (norm.of(x)?, 0, 0);
    for mu in cands {
        let m = norm.of(sub_mul(x, mu, y)?)?;
        if (m, mu.abs(), mu) < best {
            best = (m, mu.abs(), mu);
        }
    }
    Ok(best.2)
}

/// Gauss reduction under `M`: returns a basis with `M(b1) ≤ M(b2)` and
/// `M(b2) ≤ M(b2 + k·b1)` for every integer `k`, which attains both
/// successive minima.
fn gauss_reduce(norm: &BoxNorm, mut b1: Vector, mut b2: Vector) -> Result<(Vector, Vector)> {
    for _ in 0..10_000 {
        if norm.of(b1)? > norm.of(b2)? {
            std::mem::swap(&mut b1, &mut b2);
        }
        let mu = best_multiplier(norm, b2, b1)?;
        let c = sub_mul(b2, mu, b1)?;
        if norm.of(c)? >= norm.of(b1)? {
            return Ok((b1, c));
        }
        b2 = b1;
        b1 = c;
    }
    Err(Error::Invariant("basis reduction did not terminate".into()))
}

fn tie_key(x: &Vector) -> (Int, Int, bool, bool) {
    (x.0.abs(), x.1.abs(), x.0 < 0, x.1 < 0)
}

fn parallel(x: Vector, y: Vector) -> bool {
    x.0 * y.1 == x.1 * y.0
}

/// Every non-zero lattice vector with `M(x) = r` exactly.
fn vectors_on_level(l: &Lattice2, norm: &BoxNorm, r: Int) -> Result<Vec<Vector>> {
    let (g, h, e) = (l.g(), l.h(), l.e());
    let kmax = r / (norm.a * g);
    let ymax = r / norm.b;
    let lines = 2 * kmax as u128 + 1;
    let per_line = 2 * (ymax / e) as u128 + 3;
    if lines.saturating_mul(per_line) > MINIMA_GUARD {
        return Err(Error::TooLarge {
            what: "minima enumeration",
            size: lines.saturating_mul(per_line),
            guard: MINIMA_GUARD,
        });
    }
    let mut out = Vec::new();
    for k in -kmax..=kmax {
        let x1 = k * g;
        let res = (k * h).rem_euclid(e);
        if norm.a * x1.abs() == r {
            let mut x2 = -ymax + (res + ymax).rem_euclid(e);
            while x2 <= ymax {
                out.push((x1, x2));
                x2 += e;
            }
        } else if r % norm.b == 0 {
            for x2 in [ymax, -ymax] {
                if (x2 - res).rem_euclid(e) == 0 && (x1, x2) != (0, 0) && !out.contains(&(x1, x2)) {
                    out.push((x1, x2));
                }
            }
        }
    }
    out.retain(|&x| x != (0, 0));
    Ok(out)
}

/// Successive minima of the box gauge, stored squared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxMinima {
    #[serde(with = "rat")]
    pub lambda1_sq: Rat,
    #[serde(with = "dec_pair")]
    pub u: Vector,
    #[serde(with = "rat")]
    pub lambda2_sq: Rat,
    #[serde(with = "dec_pair")]
    pub v: Vector,
}

impl BoxMinima {
    /// `d/2 ≤ λ1·λ2 ≤ d`, decided on squares.
    pub fn minkowski_ok(&self, d: Int) -> bool {
        let prod = self.lambda1_sq * self.lambda2_sq;
        let d2 = Rat::from_integer(d * d);
        d2 / 4 <= prod && prod <= d2
    }
}

/// Exact successive minima of `g` on `L` with attainers chosen by the key
/// `(|x1|, |x2|, x1 < 0, x2 < 0)`: `u` is the least vector with
/// `g(u) = λ1`, `v` the least vector independent of `u` with `g(v) = λ2`.
pub fn box_minima(l: &Lattice2, u: Rat) -> Result<BoxMinima> {
    let norm = BoxNorm::new(u)?;
    let (b1, b2) = gauss_reduce(&norm, l.row1, l.row2)?;
    let (m1, m2) = (norm.of(b1)?, norm.of(b2)?);
    let first = vectors_on_level(l, &norm, m1)?
        .into_iter()
        .min_by_key(tie_key)
        .ok_or_else(|| Error::Invariant("no vector on the first minimum".into()))?;
    let second = vectors_on_level(l, &norm, m2)?
        .into_iter()
        .filter(|&x| !parallel(x, first))
        .min_by_key(tie_key)
        .ok_or_else(|| Error::Invariant("no independent vector on the second minimum".into()))?;
    Ok(BoxMinima {
        lambda1_sq: norm.lambda_sq(m1)?,
        u: first,
        lambda2_sq: norm.lambda_sq(m2)?,
        v: second,
    })
}

/// Minima by scanning every integer point of the box `g(x) ≤ λ` for a
/// radius `λ² = radius_sq`; `None` when fewer than two independent lattice
/// vectors lie inside. Used to certify [`box_minima`].
pub fn minima_by_enumeration(l: &Lattice2, u: Rat, radius_sq: Rat, guard: u128) -> Result<Option<(Rat, Rat)>> {
    let norm = BoxNorm::new(u)?;
    // M ≤ R with R² = λ²·ab
    let r = isqrt((radius_sq * Rat::from_integer(norm.a * norm.b)).floor().to_integer())?;
    let (k1, k2) = (r / norm.a, r / norm.b);
    let size = (2 * k1 as u128 + 1).saturating_mul(2 * k2 as u128 + 1);
    if size > guard {
        return Err(Error::TooLarge {
            what: "minima certification box",
            size,
            guard,
        });
    }
    let mut pts = Vec::new();
    for x1 in -k1..=k1 {
        for x2 in -k2..=k2 {
            if (x1, x2) != (0, 0) && l.contains((x1, x2)) {
                pts.push((norm.of((x1, x2))?, (x1, x2)));
            }
        }
    }
    pts.sort();
    let Some(&(m1, w)) = pts.first() else {
        return Ok(None);
    };
    let m2 = pts.iter().find(|p| !parallel(p.1, w)).map(|p| p.0);
    Ok(match m2 {
        Some(m2) => Some((norm.lambda_sq(m1)?, norm.lambda_sq(m2)?)),
        None => None,
    })
}

/// One lattice substitution `x = a1·u + a2·v`.
///
/// Coordinates are ordered so that `X1 ≤ X2` (`swapped` records an
/// exchange); `q`, `X` are the input in its original orientation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionStep {
    #[serde(with = "dec")]
    pub q1: Int,
    #[serde(with = "dec")]
    pub q2: Int,
    #[serde(rename = "x1bound", with = "rat")]
    pub x1: Rat,
    #[serde(rename = "x2bound", with = "rat")]
    pub x2: Rat,
    pub swapped: bool,
    #[serde(with = "dec")]
    pub d: Int,
    #[serde(with = "dec")]
    pub qt1: Int,
    #[serde(with = "dec")]
    pub qt2: Int,
    #[serde(rename = "U", with = "rat")]
    pub u_ratio: Rat,
    #[serde(with = "rat")]
    pub lambda1_sq: Rat,
    #[serde(with = "rat")]
    pub lambda2_sq: Rat,
    #[serde(with = "dec_pair")]
    pub u: Vector,
    #[serde(with = "dec_pair")]
    pub v: Vector,
    #[serde(with = "dec")]
    pub p1: Int,
    #[serde(with = "dec")]
    pub p2: Int,
    /// `X̃1² = X1·X2/(4λ1²)` in ordered coordinates.
    #[serde(with = "rat")]
    pub xt1_sq: Rat,
    #[serde(with = "rat")]
    pub xt2_sq: Rat,
    #[serde(with = "dec")]
    pub xt1_floor: Int,
    #[serde(with = "dec")]
    pub xt2_floor: Int,
}

fn rmul(a: &Rat, b: &Rat) -> Result<Rat> {
    a.checked_mul(b).ok_or(Error::Overflow("rational product"))
}

/// `⌊√r⌋` for a non-negative rational.
fn floor_sqrt(r: &Rat) -> Result<Int> {
    isqrt(r.floor().to_integer())
}

impl ReductionStep {
    /// `(X1, X2)` in ordered coordinates.
    pub fn ordered_bounds(&self) -> (Rat, Rat) {
        if self.swapped {
            (self.x2, self.x1)
        } else {
            (self.x1, self.x2)
        }
    }

    pub fn source(&self) -> Result<TwoDap> {
        TwoDap::new(self.q1, self.q2, self.x1, self.x2)
    }

    /// Steps `|p1|, |p2|` with radii `X̃1, X̃2`. A zero step is only
    /// allowed when its radius floors to zero.
    pub fn derived(&self) -> Result<TwoDap> {
        let step = |p: Int, f: Int| -> Result<Int> {
            match (p, f) {
                (0, 0) => Ok(1),
                (0, _) => Err(domain(
                    "reduction maps a box vector to 0: the progression is not proper",
                )),
                _ => Ok(p.abs()),
            }
        };
        TwoDap::new(
            step(self.p1, self.xt1_floor)?,
            step(self.p2, self.xt2_floor)?,
            Rat::from_integer(self.xt1_floor),
            Rat::from_integer(self.xt2_floor),
        )
    }

    /// Original box point for a point `y` of the derived progression.
    pub fn lift(&self, y: Vector) -> Vector {
        let a1 = if self.p1 < 0 { -y.0 } else { y.0 };
        let a2 = if self.p2 < 0 { -y.1 } else { y.1 };
        let x = (a1 * self.u.0 + a2 * self.v.0, a1 * self.u.1 + a2 * self.v.1);
        if self.swapped {
            (x.1, x.0)
        } else {
            x
        }
    }
}

/// Assemble the substitution for `A_{q1,q2}(X1, X2)` with `d = gcd ≥ 2`.
pub fn reduce_step(q1: Int, q2: Int, x1: Rat, x2: Rat) -> Result<ReductionStep> {
    let d = gcd(q1, q2);
    if d < 2 {
        return Err(domain(format!("gcd(q1, q2) = {d}; a lattice step needs d ≥ 2")));
    }
    let one = Rat::from_integer(1);
    if x1 < one || x2 < one {
        return Err(domain("box radii must be ≥ 1"));
    }
    let swapped = x1 > x2;
    let (oq1, oq2, ox1, ox2) = if swapped { (q2, q1, x2, x1) } else { (q1, q2, x1, x2) };
    let (qt1, qt2) = (oq1 / d, oq2 / d);
    let u_ratio = ox2 / ox1;
    let lat = congruence_lattice(d, qt1, qt2)?;
    let m = box_minima(&lat, u_ratio)?;
    let dot = |w: Vector| -> Result<Int> {
        let s = checked_mul(w.0, qt1, "step")?
            .checked_add(checked_mul(w.1, qt2, "step")?)
            .ok_or(Error::Overflow("step"))?;
        debug_assert_eq!(s % d, 0);
        Ok(s / d)
    };
    let prod = rmul(&ox1, &ox2)?;
    let xt1_sq = prod / (m.lambda1_sq * 4);
    let xt2_sq = prod / (m.lambda2_sq * 4);
    Ok(ReductionStep {
        q1,
        q2,
        x1,
        x2,
        swapped,
        d,
        qt1,
        qt2,
        u_ratio,
        lambda1_sq: m.lambda1_sq,
        lambda2_sq: m.lambda2_sq,
        u: m.u,
        v: m.v,
        p1: dot(m.u)?,
        p2: dot(m.v)?,
        xt1_floor: floor_sqrt(&xt1_sq)?,
        xt2_floor: floor_sqrt(&xt2_sq)?,
        xt1_sq,
        xt2_sq,
    })
}

/// Outcome of [`verify_reduction`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum ReductionVerdict {
    Pass,
    /// The source already contains a square, so there is nothing to transfer.
    HypothesisFails,
    Fail {
        check: String,
        #[serde(with = "dec_pair")]
        point: Vector,
    },
}

impl ReductionVerdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, ReductionVerdict::Pass | ReductionVerdict::HypothesisFails)
    }
}

fn fail(check: &str, point: Vector) -> ReductionVerdict {
    ReductionVerdict::Fail {
        check: check.to_string(),
        point,
    }
}

/// Re-check every invariant of `step`, the embedding on corners plus 100
/// seeded interior points, and (by brute force within `guard`) that
/// square-freeness and properness pass from the source to the derived
/// progression.
pub fn verify_reduction(step: &ReductionStep, t: Int, guard: u128) -> Result<ReductionVerdict> {
    let (ox1, ox2) = step.ordered_bounds();
    let d = step.d;
    if gcd(step.q1, step.q2) != d
        || d < 2
        || gcd(step.qt1, step.qt2) != 1
        || step.qt1 * step.qt2 * d * d != step.q1 * step.q2
    {
        return Ok(fail("gcd split", (step.qt1, step.qt2)));
    }
    if step.u_ratio != ox2 / ox1 || step.u_ratio < Rat::from_integer(1) || step.lambda1_sq > step.lambda2_sq {
        return Ok(fail("ordering", (0, 0)));
    }
    let lat = congruence_lattice(d, step.qt1, step.qt2)?;
    let norm = BoxNorm::new(step.u_ratio)?;
    for (w, l2, p) in [(step.u, step.lambda1_sq, step.p1), (step.v, step.lambda2_sq, step.p2)] {
        if !lat.contains(w) || norm.lambda_sq(norm.of(w)?)? != l2 {
            return Ok(fail("minimum attainer", w));
        }
        if w.0 * step.qt1 + w.1 * step.qt2 != d * p {
            return Ok(fail("step identity", w));
        }
    }
    if parallel(step.u, step.v) {
        return Ok(fail("independence", step.v));
    }
    let m = BoxMinima {
        lambda1_sq: step.lambda1_sq,
        u: step.u,
        lambda2_sq: step.lambda2_sq,
        v: step.v,
    };
    if !m.minkowski_ok(d) {
        return Ok(fail("minkowski window", step.u));
    }
    let prod = ox1 * ox2;
    if step.xt1_sq * step.lambda1_sq * 4 != prod || step.xt2_sq * step.lambda2_sq * 4 != prod {
        return Ok(fail("scaled radii", (step.xt1_floor, step.xt2_floor)));
    }
    if step.xt1_floor != floor_sqrt(&step.xt1_sq)? || step.xt2_floor != floor_sqrt(&step.xt2_sq)? {
        return Ok(fail("radius floors", (step.xt1_floor, step.xt2_floor)));
    }

    let source = step.source()?;
    let derived = step.derived()?;
    let (f1, f2) = (step.xt1_floor, step.xt2_floor);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut probes: Vec<Vector> = vec![(f1, f2), (f1, -f2), (-f1, f2), (-f1, -f2), (0, 0)];
    probes.extend((0..100).map(|_| (rng.gen_range(-f1..=f1), rng.gen_range(-f2..=f2))));
    for y in probes {
        let x = step.lift(y);
        let inside = Rat::from_integer(x.0.abs()) <= step.x1 && Rat::from_integer(x.1.abs()) <= step.x2;
        let value = x.0 * step.q1 + x.1 * step.q2;
        let dv = y.0 * derived.q1() + y.1 * derived.q2();
        if !inside || value != d * d * dv {
            return Ok(fail("embedding", y));
        }
    }

    if brute_force_witness_within(&source, t, guard)?.is_some() {
        return Ok(ReductionVerdict::HypothesisFails);
    }
    if let Some(w) = brute_force_witness_within(&derived, t / (d * d), guard)? {
        return Ok(fail("square transfer", (w.x1, w.x2)));
    }
    if source.is_proper() && !(derived.is_proper() && is_proper_by_enumeration(&derived, guard)?) {
        return Ok(fail("properness transfer", (derived.q1(), derived.q2())));
    }
    Ok(ReductionVerdict::Pass)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    /// `x_i = d·a_i`.
    Divide,
    Lattice,
}

/// One link of a reduction chain: `source` at ambient `ambient` maps onto
/// `derived` at `⌊ambient/d²⌋` with values scaled by `d²`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainStep {
    pub kind: StepKind,
    #[serde(with = "dec")]
    pub d: Int,
    pub source: TwoDap,
    #[serde(with = "dec")]
    pub ambient: Int,
    pub derived: TwoDap,
    #[serde(with = "dec")]
    pub derived_ambient: Int,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lattice: Option<ReductionStep>,
}

impl ChainStep {
    pub fn lift(&self, y: Vector) -> Vector {
        match &self.lattice {
            Some(s) => s.lift(y),
            None => (self.d * y.0, self.d * y.1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "terminal", rename_all = "snake_case")]
pub enum Terminal {
    Coprime,
    /// A radius is below 1, so the box is a line.
    Degenerate,
    /// `d² ≥ T`. Properness then forces `X1 ≤ q̃2` or `X2 ≤ q̃1`.
    LargeGcd {
        dichotomy: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chain {
    pub steps: Vec<ChainStep>,
    pub terminal: Terminal,
    pub last: TwoDap,
    #[serde(with = "dec")]
    pub last_ambient: Int,
}

impl Chain {
    /// `Π d_i²`.
    pub fn scale(&self) -> Result<Int> {
        self.steps.iter().try_fold(1, |acc: Int, s| {
            checked_mul(acc, checked_mul(s.d, s.d, "chain scale")?, "chain scale")
        })
    }

    /// Original box point for a point of the last instance.
    pub fn lift(&self, y: Vector) -> Vector {
        self.steps.iter().rev().fold(y, |y, s| s.lift(y))
    }
}

/// Drive the gcd case split to a coprime, degenerate or large-gcd instance.
/// Small gcds (`d ≤ c0`) with both radii `≥ d` are divided out; everything
/// else with `d² < T` takes a lattice step.
pub fn reduce_recursive(ap: &TwoDap, t: Int, c0: Int) -> Result<Chain> {
    if t < 0 {
        return Err(domain(format!("ambient bound T must be non-negative, got {t}")));
    }
    let mut cur = ap.clone();
    let mut amb = t;
    let mut steps = Vec::new();
    let one = Rat::from_integer(1);
    let terminal = loop {
        let d = gcd(cur.q1(), cur.q2());
        if d == 1 {
            break Terminal::Coprime;
        }
        if cur.x1_bound() < one || cur.x2_bound() < one {
            break Terminal::Degenerate;
        }
        let (qt1, qt2) = (cur.q1() / d, cur.q2() / d);
        if d * d >= amb {
            let dichotomy = cur.x1_bound() <= Rat::from_integer(qt2) || cur.x2_bound() <= Rat::from_integer(qt1);
            break Terminal::LargeGcd { dichotomy };
        }
        let dr = Rat::from_integer(d);
        let (derived, lattice, kind) = if d <= c0 && cur.x1_bound() >= dr && cur.x2_bound() >= dr {
            let derived = TwoDap::new(qt1, qt2, cur.x1_bound() / dr, cur.x2_bound() / dr)?;
            (derived, None, StepKind::Divide)
        } else {
            let s = reduce_step(cur.q1(), cur.q2(), cur.x1_bound(), cur.x2_bound())?;
            (s.derived()?, Some(s), StepKind::Lattice)
        };
        let next_amb = amb / (d * d);
        steps.push(ChainStep {
            kind,
            d,
            source: cur,
            ambient: amb,
            derived: derived.clone(),
            derived_ambient: next_amb,
            lattice,
        });
        cur = derived;
        amb = next_amb;
    };
    Ok(Chain {
        steps,
        terminal,
        last: cur,
        last_ambient: amb,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::progression::find_square_witness;

    fn r(n: Int, d: Int) -> Rat {
        Rat::new(n, d)
    }

    fn ri(n: Int) -> Rat {
        Rat::from_integer(n)
    }

    #[test]
    fn congruence_examples() {
        let l = congruence_lattice(2, 3, 5).unwrap();
        assert_eq!(l.basis(), [(1, 1), (0, 2)]);
        assert_eq!(l.det, 2);
        let l = congruence_lattice(1, 4, 9).unwrap();
        assert_eq!(l.basis(), [(1, 0), (0, 1)]);
        let l = congruence_lattice(6, 1, 0).unwrap();
        assert_eq!(l.basis(), [(6, 0), (0, 1)]);
        assert!(congruence_lattice(4, 2, 6).is_err());
        assert!(congruence_lattice(0, 1, 1).is_err());
    }

    #[test]
    fn congruence_lattice_is_the_kernel() {
        for d in 1..40 {
            for qt1 in -6..12 {
                for qt2 in 0..12 {
                    let Ok(l) = congruence_lattice(d, qt1, qt2) else {
                        assert_ne!(gcd(gcd(qt1, qt2), d), 1);
                        continue;
                    };
                    assert_eq!(l.row1.0 * l.row2.1, d);
                    assert!(l.contains(l.row1) && l.contains(l.row2));
                    // index d in the box [0, d)²: exactly d kernel points
                    let count = (0..d)
                        .flat_map(|a| (0..d).map(move |b| (a, b)))
                        .filter(|&x| l.contains(x))
                        .count();
                    assert_eq!(count as Int, d);
                }
            }
        }
    }

    #[test]
    fn minima_examples() {
        let l = congruence_lattice(2, 3, 5).unwrap();
        let m = box_minima(&l, ri(1)).unwrap();
        assert_eq!((m.lambda1_sq, m.u), (ri(1), (1, 1)));
        assert_eq!((m.lambda2_sq, m.v), (ri(1), (1, -1)));
        assert!(m.minkowski_ok(2));

        let z = congruence_lattice(1, 0, 0).unwrap();
        for u in [ri(1), ri(4), r(9, 2)] {
            let m = box_minima(&z, u).unwrap();
            assert_eq!((m.lambda1_sq, m.u), (u.recip(), (0, 1)));
            assert_eq!((m.lambda2_sq, m.v), (u, (1, 0)));
        }
        let m = box_minima(&z, ri(1)).unwrap();
        assert_eq!((m.u, m.v), ((0, 1), (1, 0)));

        let l = congruence_lattice(6, 1, 0).unwrap();
        let m = box_minima(&l, ri(1)).unwrap();
        assert_eq!((m.lambda1_sq, m.u), (ri(1), (0, 1)));
        assert_eq!((m.lambda2_sq, m.v), (ri(36), (6, 0)));
        assert!(box_minima(&l, ri(0)).is_err());
        assert!(box_minima(&l, ri(-2)).is_err());
    }

    #[test]
    fn minima_certified_small() {
        for d in 2..60 {
            for qt1 in 1..d.min(12) {
                for qt2 in [1, 2, 3, 5, 7, 11] {
                    let Ok(l) = congruence_lattice(d, qt1, qt2) else {
                        continue;
                    };
                    for u in [ri(1), r(3, 2), ri(5), r(1, 3), r(17, 4)] {
                        let m = box_minima(&l, u).unwrap();
                        assert!(m.minkowski_ok(d), "d={d} qt=({qt1},{qt2}) U={u}");
                        let e = minima_by_enumeration(&l, u, m.lambda2_sq, 10_000_000).unwrap();
                        assert_eq!(e, Some((m.lambda1_sq, m.lambda2_sq)), "d={d} qt=({qt1},{qt2}) U={u}");
                    }
                }
            }
        }
    }

    #[test]
    fn step_example() {
        let s = reduce_step(6, 10, ri(4), ri(4)).unwrap();
        assert_eq!((s.d, s.qt1, s.qt2, s.u_ratio), (2, 3, 5, ri(1)));
        assert_eq!((s.lambda1_sq, s.lambda2_sq), (ri(1), ri(1)));
        assert_eq!((s.u, s.v), ((1, 1), (1, -1)));
        assert_eq!((s.p1, s.p2), (4, -1));
        assert_eq!((s.xt1_sq, s.xt2_sq), (ri(4), ri(4)));
        assert_eq!((s.xt1_floor, s.xt2_floor), (2, 2));
        // every derived point lands in the source box with value ×4
        let derived = s.derived().unwrap();
        assert_eq!((derived.q1(), derived.q2()), (4, 1));
        for a in -2..=2 {
            for b in -2..=2 {
                let x = s.lift((a, b));
                assert!(x.0.abs() <= 4 && x.1.abs() <= 4);
                assert_eq!(6 * x.0 + 10 * x.1, 4 * (4 * a + b));
            }
        }
        assert_eq!(
            verify_reduction(&s, 338, 1_000_000).unwrap(),
            ReductionVerdict::HypothesisFails
        );
        assert!(reduce_step(3, 5, ri(4), ri(4)).is_err());
        assert!(reduce_step(6, 10, r(1, 2), ri(4)).is_err());
        assert_eq!(s, reduce_step(6, 10, ri(4), ri(4)).unwrap());
    }

    #[test]
    fn transfer_on_square_free_instance() {
        // 6·x1 + 10·x2 over |x| ≤ 4 hits 4, so use an ambient bound below it
        let s = reduce_step(6, 10, ri(4), ri(4)).unwrap();
        let src = s.source().unwrap();
        assert_eq!(find_square_witness(&src, 3).unwrap(), None);
        assert_eq!(verify_reduction(&s, 3, 1_000_000).unwrap(), ReductionVerdict::Pass);
    }

    #[test]
    fn swapped_axes() {
        let s = reduce_step(10, 6, ri(7), ri(3)).unwrap();
        assert!(s.swapped);
        assert_eq!((s.qt1, s.qt2), (3, 5));
        for y in [(1, 0), (0, 1), (-1, 1)] {
            let x = s.lift(y);
            assert!(x.0.abs() <= 7 && x.1.abs() <= 3);
        }
        assert!(verify_reduction(&s, 10, 1_000_000).unwrap().is_pass());
    }

    #[test]
    fn recursion_examples() {
        let ap = TwoDap::with_int_bounds(7, 9, 5, 5).unwrap();
        let c = reduce_recursive(&ap, 100, DEFAULT_C0).unwrap();
        assert!(c.steps.is_empty());
        assert_eq!(c.terminal, Terminal::Coprime);

        let ap = TwoDap::with_int_bounds(12, 20, 10, 10).unwrap();
        let c = reduce_recursive(&ap, 1000, DEFAULT_C0).unwrap();
        assert!(!c.steps.is_empty());
        assert!(matches!(
            c.terminal,
            Terminal::Coprime | Terminal::LargeGcd { .. } | Terminal::Degenerate
        ));
        assert_eq!(c.steps[0].kind, StepKind::Divide);
        let scale = c.scale().unwrap();
        for a in -c.last.b1()..=c.last.b1() {
            for b in -c.last.b2()..=c.last.b2() {
                let x = c.lift((a, b));
                assert_eq!(ap.value_at(x.0, x.1), Some(scale * (a * c.last.q1() + b * c.last.q2())));
            }
        }

        // d = 20 > C0 forces a lattice step
        let ap = TwoDap::with_int_bounds(20, 60 + 20 * 7, 30, 40).unwrap();
        let c = reduce_recursive(&ap, 1_000_000, DEFAULT_C0).unwrap();
        assert_eq!(c.steps[0].kind, StepKind::Lattice);
        assert!(c.steps[0].lattice.as_ref().unwrap().d == 20);

        let ap = TwoDap::with_int_bounds(50, 150, 1, 5).unwrap();
        assert!(ap.is_proper());
        let c = reduce_recursive(&ap, 400, DEFAULT_C0).unwrap();
        assert_eq!(c.terminal, Terminal::LargeGcd { dichotomy: true });
        // 2·50 = 1·100 collides, and the dichotomy fails with it
        let ap = TwoDap::with_int_bounds(50, 100, 3, 3).unwrap();
        assert!(!ap.is_proper());
        let c = reduce_recursive(&ap, 400, DEFAULT_C0).unwrap();
        assert_eq!(c.terminal, Terminal::LargeGcd { dichotomy: false });
    }

    #[test]
    fn chain_json_round_trip() {
        let ap = TwoDap::with_int_bounds(12, 20, 10, 10).unwrap();
        let c = reduce_recursive(&ap, 1000, DEFAULT_C0).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        let back: Chain = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
    }
}
