use crate::output::{CliError, Out};
use crate::{ApArgs, Cli, Command, Format};
use num_bigint::BigInt;
use serde_json::{json, Map, Value};
use sqap::arith::is_prime;
use sqap::bounds::{
    case_exponent, exponent_grid, exponent_supremum_where, CaseReport, Component, ExponentPoint, Region,
};
use sqap::lattice::{reduce_recursive, verify_reduction, ReductionVerdict};
use sqap::lowerbound::{
    build_instance, residue_certificate, salie_scan_range, size_vs_t, LowerBoundInstance, MIN_PRIME,
};
use sqap::progression::{brute_force_witness_within, certify_square_free_with, find_square_witness_with, TwoDap};
use sqap::schema::{parse_rat, rat_to_string};
use sqap::sweep::{run_sweep, Family, SweepConfig};
use sqap::zaharescu::{construct_small_square, construct_sweep, NRule, SweepRow, SweepSummary};
use sqap::{Exec, Int, Rat};

type Res<T> = Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Rule {
    /// ⌈q1^{9/16}·q2^{1/4}⌉
    Balanced,
    /// ⌈√q1⌉
    SqrtQ1,
    /// q1
    Q1,
}

impl From<Rule> for NRule {
    fn from(r: Rule) -> Self {
        match r {
            Rule::Balanced => NRule::Balanced,
            Rule::SqrtQ1 => NRule::SqrtQ1,
            Rule::Q1 => NRule::Q1,
        }
    }
}

/// Decimal integer of any length; values beyond the library range are
/// reported as `OutOfRange`.
pub fn int(s: &str, name: &str) -> Res<Int> {
    let big: BigInt = s
        .trim()
        .parse()
        .map_err(|_| CliError::usage(format!("--{name}: {s:?} is not a decimal integer")))?;
    Int::try_from(&big).map_err(|_| CliError {
        kind: "OutOfRange",
        message: format!("--{name}: {s} is outside the supported range |x| < 2^127"),
    })
}

/// Integer, `p/q` or terminating decimal.
pub fn rational(s: &str, name: &str) -> Res<Rat> {
    if let Some((n, d)) = s.split_once('/') {
        let (n, d) = (int(n, name)?, int(d, name)?);
        if d == 0 {
            return Err(CliError::usage(format!("--{name}: zero denominator")));
        }
        return Ok(Rat::new(n, d));
    }
    if s.contains('.') {
        return parse_rat(s).ok_or_else(|| CliError::usage(format!("--{name}: {s:?} is not a number")));
    }
    Ok(Rat::from_integer(int(s, name)?))
}

fn progression(a: &ApArgs) -> Res<TwoDap> {
    Ok(TwoDap::new(
        int(&a.q1, "q1")?,
        int(&a.q2, "q2")?,
        rational(&a.x1, "x1")?,
        rational(&a.x2, "x2")?,
    )?)
}

fn no_csv(out: &Out, cmd: &str) -> Res<()> {
    if out.format == Format::Csv {
        return Err(CliError::usage(format!("{cmd} has no CSV form; use --format jsonl")));
    }
    Ok(())
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Some(b), Value::Object(e)) = (base.as_object_mut(), extra) {
        b.extend(e);
    }
    base
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("records serialize")
}

/// Execution strategy from `--threads`.
pub fn exec(cli: &Cli) -> Res<Exec> {
    match cli.threads {
        Some(0) => Err(CliError::usage("--threads must be ≥ 1")),
        Some(1) => Ok(Exec::Sequential),
        #[cfg(feature = "parallel")]
        Some(n) => {
            // the global pool can only be configured once per process
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            Ok(Exec::Parallel)
        }
        _ => Ok(Exec::default()),
    }
}

pub fn run(cli: &Cli, exec: Exec, out: &mut Out) -> Res<u8> {
    match &cli.command {
        Command::Witness { ap, t } => witness(out, exec, ap, t.as_deref()),
        Command::Verify { ap, t, brute } => verify(out, exec, ap, t, *brute, cli.guard),
        Command::Construct {
            q1,
            q2,
            big_n,
            rule,
            from,
            to,
            ceiling,
        } => {
            let ceiling = rational(ceiling, "ceiling")?;
            match (from, to) {
                (Some(f), Some(t)) => construct_range(out, exec, int(f, "from")?, int(t, "to")?, *rule, ceiling),
                _ => {
                    let (q1, q2) = (
                        int(q1.as_deref().unwrap_or_default(), "q1")?,
                        int(q2.as_deref().unwrap_or_default(), "q2")?,
                    );
                    let n = match big_n {
                        Some(n) => int(n, "n")?,
                        None => NRule::from(*rule).choose(q1.max(1), q2.max(1)),
                    };
                    construct_one(out, q1, q2, n, ceiling)
                }
            }
        }
        Command::Reduce { ap, t, c0, verify } => reduce(out, ap, int(t, "t")?, int(c0, "c0")?, *verify, cli.guard),
        Command::Lower { p, from, to } => match p {
            Some(p) => lower(out, vec![int(p, "p")?]),
            None => {
                let from = from.as_deref().map_or(Ok(MIN_PRIME), |f| int(f, "from"))?;
                let to = int(to.as_deref().unwrap_or_default(), "to")?;
                let mut ps = Vec::new();
                for p in from.max(MIN_PRIME)..=to {
                    if p % 4 == 1 && is_prime(p)? {
                        ps.push(p);
                    }
                }
                lower(out, ps)
            }
        },
        Command::ScanNqr { from, to } => scan_nqr(out, exec, int(from, "from")?, int(to, "to")?),
        Command::Exponent { grid, a, b } => match (grid, a, b) {
            (Some(g), _, _) => exponent(out, exec, int(g, "grid")?),
            (None, Some(a), Some(b)) => {
                let p = ExponentPoint::new(rational(a, "a")?, rational(b, "b")?)?;
                let c = case_exponent(p);
                emit_case(out, &c)?;
                eprintln!("exponent at {}: {} ({})", p, rat_to_string(&c.exponent), c.case_label);
                Ok(0)
            }
            _ => Err(CliError::usage("give --grid or both --a and --b")),
        },
        Command::Sweep { t, families, budget } => {
            sweep(out, exec, int(t, "t")?, families, int(budget, "budget")?, cli.seed)
        }
    }
}

fn witness(out: &mut Out, exec: Exec, a: &ApArgs, t: Option<&str>) -> Res<u8> {
    no_csv(out, "witness")?;
    let ap = progression(a)?;
    let t = match t {
        Some(t) => int(t, "t")?,
        None => ap.value_bound()?,
    };
    let w = find_square_witness_with(&ap, t, exec)?;
    out.record(
        "witness",
        json!({ "progression": ap, "T": t.to_string(), "witness": w }),
    )?;
    match w {
        Some(w) => {
            eprintln!("square {}² = {}·{} + {}·{}", w.n, w.x1, ap.q1(), w.x2, ap.q2());
            Ok(1)
        }
        None => {
            eprintln!("no square n² ≤ {t}");
            Ok(0)
        }
    }
}

fn verify(out: &mut Out, exec: Exec, a: &ApArgs, t: &str, brute: bool, guard: u128) -> Res<u8> {
    no_csv(out, "verify")?;
    let ap = progression(a)?;
    let t = int(t, "t")?;
    let cert = certify_square_free_with(&ap, t, exec)?;
    let agrees = if brute {
        let b = brute_force_witness_within(&ap, t, guard)?;
        if b != cert.witness() {
            return Err(CliError {
                kind: "Invariant",
                message: format!("search and brute force disagree: {:?} vs {:?}", cert.witness(), b),
            });
        }
        Some(true)
    } else {
        None
    };
    let mut body = json!({
        "progression": ap,
        "T": t.to_string(),
        "proper": ap.is_proper(),
        "contained": ap.value_bound()? <= t,
    });
    if let Some(a) = agrees {
        body["brute_force_agrees"] = json!(a);
    }
    out.record("verify", merge(body, to_value(&cert)))?;
    match cert.witness() {
        Some(w) => {
            eprintln!(
                "NOT square-free: {}² = {}·{} + {}·{}",
                w.n,
                w.x1,
                ap.q1(),
                w.x2,
                ap.q2()
            );
            Ok(1)
        }
        None => {
            eprintln!("square-free in [-{t}, {t}]");
            Ok(0)
        }
    }
}

fn construct_one(out: &mut Out, q1: Int, q2: Int, n: Int, ceiling: Rat) -> Res<u8> {
    let trace = construct_small_square(q1, q2, n)?;
    match out.format {
        Format::Jsonl => out.record("construct", &trace)?,
        Format::Csv => out.csv(SweepRow::CSV_HEADER, &SweepRow::from_trace(&trace, ceiling).to_csv())?,
    }
    let w = trace.witness;
    eprintln!("{}² = {}·{} + {}·{} (N = {})", w.n, w.x1, q1, w.x2, q2, n);
    Ok(0)
}

fn construct_range(out: &mut Out, exec: Exec, from: Int, to: Int, rule: Rule, ceiling: Rat) -> Res<u8> {
    let from = from.max(1);
    let rows = construct_sweep(from, to, rule.into(), ceiling, exec)?;
    for r in &rows {
        match out.format {
            Format::Jsonl => out.record("construct_row", r)?,
            Format::Csv => out.csv(SweepRow::CSV_HEADER, &r.to_csv())?,
        }
    }
    let s = SweepSummary::of(&rows);
    if out.format == Format::Jsonl {
        out.record(
            "construct_summary",
            merge(to_value(&s), json!({ "ceiling": rat_to_string(&ceiling) })),
        )?;
    }
    eprintln!(
        "{} pairs, max ratio_x1 {:.4}, max ratio_x2 {:.4}, {} / {} above ceiling {}",
        s.pairs,
        s.max_ratio_x1,
        s.max_ratio_x2,
        s.x1_exceeding,
        s.x2_exceeding,
        rat_to_string(&ceiling)
    );
    Ok(0)
}

fn reduce(out: &mut Out, a: &ApArgs, t: Int, c0: Int, verify: bool, guard: u128) -> Res<u8> {
    no_csv(out, "reduce")?;
    let ap = progression(a)?;
    let chain = reduce_recursive(&ap, t, c0)?;
    let mut failed = false;
    for s in &chain.steps {
        let mut body = to_value(s);
        if let (true, Some(l)) = (verify, &s.lattice) {
            let v = verify_reduction(l, s.ambient, guard)?;
            failed |= matches!(v, ReductionVerdict::Fail { .. });
            body["verification"] = to_value(&v);
        }
        out.record("reduction_step", body)?;
    }
    out.record(
        "reduction_chain",
        merge(
            to_value(&chain.terminal),
            json!({
                "steps": chain.steps.len().to_string(),
                "scale": chain.scale()?.to_string(),
                "last": chain.last,
                "last_ambient": chain.last_ambient.to_string(),
            }),
        ),
    )?;
    eprintln!("{} step(s), terminal {:?}", chain.steps.len(), chain.terminal);
    Ok(u8::from(failed))
}

fn lower(out: &mut Out, ps: Vec<Int>) -> Res<u8> {
    let mut failed = 0;
    for &p in &ps {
        let inst: LowerBoundInstance = build_instance(p)?;
        let cert = residue_certificate(&inst)?;
        if !cert.passed {
            failed += 1;
        }
        match out.format {
            Format::Jsonl => out.record(
                "lower_bound",
                merge(
                    to_value(&inst),
                    json!({ "ratio": rat_to_string(&size_vs_t(&inst)), "certificate": cert }),
                ),
            )?,
            Format::Csv => out.csv(LowerBoundInstance::CSV_HEADER, &inst.to_csv())?,
        }
    }
    eprintln!("{} instance(s), {} certificate failure(s)", ps.len(), failed);
    Ok(u8::from(failed > 0))
}

fn scan_nqr(out: &mut Out, exec: Exec, from: Int, to: Int) -> Res<u8> {
    let r = salie_scan_range(from, to, exec)?;
    for rec in &r.records {
        match out.format {
            Format::Jsonl => out.record("nqr", rec)?,
            Format::Csv => out.csv(
                "p,n_p,ratio_log",
                &format!("{},{},{:.6}", rec.p, rec.nqr, rec.ratio_log),
            )?,
        }
    }
    match &r.summary {
        Some(s) => {
            if out.format == Format::Jsonl {
                out.record("nqr_summary", s)?;
            }
            eprintln!(
                "{} primes; max n(p) = {} at p = {}; max n(p)/ln p = {:.4} at p = {}; n(p) < √p + 1 for all: {}",
                s.count, s.max_nqr, s.argmax_p, s.max_ratio_log, s.argmax_ratio_p, s.all_below_sqrt
            );
        }
        None => eprintln!("no primes p ≡ 1 (mod 4) with {} ≤ p ≤ {}", from.max(MIN_PRIME), to),
    }
    Ok(0)
}

const EXPONENT_HEADER: &str = "a,b,case,exponent,case_one,case_two";

fn emit_case(out: &mut Out, c: &CaseReport) -> Res<()> {
    match out.format {
        Format::Jsonl => {
            let mut m = Map::new();
            m.insert("a".into(), json!(rat_to_string(&c.point.a)));
            m.insert("b".into(), json!(rat_to_string(&c.point.b)));
            m.insert("case".into(), json!(c.case_label.to_string()));
            m.insert("exponent".into(), json!(rat_to_string(&c.exponent)));
            m.insert(
                "case_one".into(),
                json!({ "case": c.case_one.0.to_string(), "exponent": rat_to_string(&c.case_one.1) }),
            );
            m.insert(
                "case_two".into(),
                json!({ "case": c.case_two.0.to_string(), "exponent": rat_to_string(&c.case_two.1) }),
            );
            m.insert("constituents".into(), json!(c.constituents));
            out.record("exponent_point", Value::Object(m))
        }
        Format::Csv => out.csv(
            EXPONENT_HEADER,
            &format!(
                "{},{},{},{},{},{}",
                rat_to_string(&c.point.a),
                rat_to_string(&c.point.b),
                c.case_label,
                rat_to_string(&c.exponent),
                rat_to_string(&c.case_one.1),
                rat_to_string(&c.case_two.1)
            ),
        ),
    }
}

fn exponent(out: &mut Out, exec: Exec, grid: Int) -> Res<u8> {
    for c in exponent_grid(grid, exec)? {
        emit_case(out, &c)?;
    }
    let full = exponent_supremum_where(grid, Region::Full, Component::Overall, exec)?;
    let small = exponent_supremum_where(grid, Region::SmallSecondStep, Component::CaseOne, exec)?;
    let key = ExponentPoint::new(Rat::new(16, 27), Rat::new(2, 3))?;
    let shown = if full.attained_at(key) { key } else { full.attaining[0] };
    let small_at = small.attaining[0];
    match out.format {
        Format::Jsonl => out.record(
            "exponent_supremum",
            json!({
                "resolution": grid.to_string(),
                "evaluated": full.evaluated.to_string(),
                "supremum": rat_to_string(&full.supremum),
                "attaining_points": full.attaining.len().to_string(),
                "attained_at": [rat_to_string(&shown.a), rat_to_string(&shown.b)],
                "restricted_region": "b <= 4/7",
                "restricted_component": "case_one",
                "restricted_supremum": rat_to_string(&small.supremum),
            }),
        )?,
        Format::Csv => {
            let row = |label: &str, p: ExponentPoint, v: &Rat| {
                format!(
                    "{},{},{},{},,",
                    rat_to_string(&p.a),
                    rat_to_string(&p.b),
                    label,
                    rat_to_string(v)
                )
            };
            out.csv(EXPONENT_HEADER, &row("supremum", shown, &full.supremum))?;
            out.csv(EXPONENT_HEADER, &row("restricted_supremum", small_at, &small.supremum))?;
        }
    }
    eprintln!(
        "supremum {} attained at {} ({} points); case-one supremum on b ≤ 4/7: {}",
        rat_to_string(&full.supremum),
        shown,
        full.attaining.len(),
        rat_to_string(&small.supremum)
    );
    Ok(0)
}

fn sweep(out: &mut Out, exec: Exec, t: Int, families: &str, budget: Int, seed: u64) -> Res<u8> {
    let families = families
        .split(',')
        .map(|f| f.trim().parse::<Family>())
        .collect::<Result<Vec<_>, _>>()?;
    let config = SweepConfig {
        t,
        families,
        budget,
        seed,
    };
    let r = run_sweep(&config, exec)?;
    match out.format {
        Format::Jsonl => out.record("sweep", &r)?,
        Format::Csv => out.csv(
            "T,family,q1,q2,x1bound,x2bound,size,ratio_t_20_27,ratio_sqrt_t_log_t",
            &format!(
                "{},{},{},{},{},{},{},{},{}",
                r.t,
                r.family,
                r.best.q1(),
                r.best.q2(),
                rat_to_string(&r.best.x1_bound()),
                rat_to_string(&r.best.x2_bound()),
                r.size,
                r.ratio_to_t_20_27,
                r.ratio_to_sqrt_t_log_t
            ),
        )?,
    }
    eprintln!(
        "best size {} from {} (q1 = {}, q2 = {}); size/T^(20/27) = {}, size/(√T ln T) = {}",
        r.size,
        r.family,
        r.best.q1(),
        r.best.q2(),
        r.ratio_to_t_20_27,
        r.ratio_to_sqrt_t_log_t
    );
    Ok(0)
}
