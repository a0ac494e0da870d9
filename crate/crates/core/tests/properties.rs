use proptest::prelude::*;
use sqap::arith::{gcd, isqrt, PowerProduct};
use sqap::bounds::{n_window, one_d_bound, NConditions};
use sqap::lattice::{reduce_recursive, DEFAULT_C0};
use sqap::lowerbound::build_instance;
use sqap::progression::{
    brute_force_witness_within, certify_square_free, find_square_witness, find_square_witness_with, Certificate,
    SquareWitness, TwoDap, DEFAULT_GUARD,
};
use sqap::schema::Record;
use sqap::sweep::{admissible, run_sweep, SweepConfig};
use sqap::zaharescu::construct_small_square;
use sqap::{Exec, Int, Rat};

#[test]
fn record_wire_format() {
    let ap = TwoDap::new(13, 15, Rat::from_integer(12), Rat::new(3, 2)).unwrap();
    assert_eq!(
        Record::new("progression", &ap).to_json_line(),
        r#"{"schema_version":1,"record":"progression","q1":"13","q2":"15","x1bound":"12","x2bound":"3/2"}"#
    );
    let c = Certificate::Witness(SquareWitness { x1: 2, x2: -1, n: 1 });
    assert_eq!(
        serde_json::to_string(&c).unwrap(),
        r#"{"kind":"Witness","x1":"2","x2":"-1","n":"1"}"#
    );
    let c = Certificate::SquareFree { max_n: 18 };
    assert_eq!(
        serde_json::to_string(&c).unwrap(),
        r#"{"kind":"SquareFree","max_n":"18"}"#
    );
    let back: TwoDap = serde_json::from_str(r#"{"q1":"13","q2":"15","x1bound":"12","x2bound":"3/2"}"#).unwrap();
    assert_eq!(back.validated().unwrap(), ap);
}

#[test]
fn large_values_stay_exact_on_the_wire() {
    let big: Int = 1 << 100;
    let w = SquareWitness {
        x1: big,
        x2: -big,
        n: 3,
    };
    let s = serde_json::to_string(&w).unwrap();
    assert!(s.contains("\"1267650600228229401496703205376\""));
    assert_eq!(serde_json::from_str::<SquareWitness>(&s).unwrap(), w);
}

#[test]
fn parallel_search_matches_sequential_on_long_ranges() {
    // n runs past several chunks before the first hit
    for (q1, q2, x1, x2) in [(1_000_003, 1_000_033, 3000, 3000), (999_983, 2, 40_000, 1)] {
        let ap = TwoDap::with_int_bounds(q1, q2, x1, x2).unwrap();
        let t = ap.value_bound().unwrap();
        assert_eq!(
            find_square_witness_with(&ap, t, Exec::Parallel).unwrap(),
            find_square_witness(&ap, t).unwrap()
        );
    }
}

#[test]
fn lower_bound_instances_survive_the_full_search() {
    for p in [13, 17, 29, 37, 41, 53, 61, 73, 89, 97, 101, 109, 113] {
        let i = build_instance(p).unwrap();
        let ap = i.progression().unwrap();
        assert!(certify_square_free(&ap, i.t).unwrap().is_square_free(), "p={p}");
        assert!(admissible(&ap, i.t).unwrap());
    }
}

#[test]
fn sweep_bounds_hold() {
    for t in [10_000, 100_000, 1_000_000] {
        let mut cfg = SweepConfig::new(t);
        cfg.budget = 200;
        let r = run_sweep(&cfg, Exec::default()).unwrap();
        let (q1, q2) = (r.best.q1(), r.best.q2());
        let cap = (2 * (t / q1) + 1) * (2 * (t / q2) + 1);
        assert!(r.size >= isqrt(t).unwrap() && r.size <= cap, "T={t}");
        assert!(admissible(&r.best, t).unwrap());
    }
}

/// The real window `[√lower, √upper]` is non-empty here, but holds no
/// integer.
#[test]
fn n_window_can_be_empty_over_the_integers() {
    let (q1, q2, t) = (1, 2, 4);
    let c = NConditions::new(q1, q2, t, Rat::from_integer(0)).unwrap();
    assert!(c.upper_holds(1) && !c.upper_holds(2));
    assert!(!c.lower_holds(1));
    // lower·upper check on squares: q1^{5/4}·T^{7/27} ≤ q1·q2^{-1/2}·T^{20/27}
    let lower = PowerProduct::one().times(q1, Rat::new(5, 4)).times(t, Rat::new(7, 27));
    let upper = PowerProduct::one()
        .times_int(q1, 1)
        .times(q2, Rat::new(-1, 2))
        .times(t, Rat::new(20, 27));
    let mixed = PowerProduct::one()
        .times(q1, Rat::new(5, 4))
        .times(q2, Rat::new(3, 2))
        .times(t, Rat::new(-20, 27));
    assert!(lower.le(&upper) && mixed.le(&upper));
    assert_eq!(n_window(q1, q2, t, Rat::from_integer(0)).unwrap(), None);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn one_d_bound_below_root(q in 1i128..5000, t in 0i128..2_000_000) {
        let b = one_d_bound(q, t).unwrap();
        prop_assert!(b * b < t.max(1));
        let ap = TwoDap::with_int_bounds(q, q, b, 0).unwrap();
        prop_assert_eq!(brute_force_witness_within(&ap, t, DEFAULT_GUARD).unwrap(), None);
    }

    #[test]
    fn construction_identity(q1 in 1i128..3000, q2 in 1i128..3000, n in 1i128..200) {
        prop_assume!(gcd(q1, q2) == 1);
        let tr = construct_small_square(q1, q2, n).unwrap();
        let w = tr.witness;
        prop_assert_eq!(w.x1 * q1 + w.x2 * q2, w.n * w.n);
        prop_assert!(1 <= w.n && w.n <= n);
    }

    #[test]
    fn chains_transfer_square_freeness(
        d in 2i128..=20, qt1 in 1i128..30, qt2 in 1i128..30, x1 in 1i128..40, x2 in 1i128..40, k in 2i128..10,
    ) {
        prop_assume!(gcd(qt1, qt2) == 1);
        let ap = TwoDap::with_int_bounds(d * qt1, d * qt2, x1, x2).unwrap();
        prop_assume!(ap.is_proper());
        let t = k * d * d;
        let chain = reduce_recursive(&ap, t, DEFAULT_C0).unwrap();
        if brute_force_witness_within(&ap, t, DEFAULT_GUARD).unwrap().is_none() {
            for s in &chain.steps {
                prop_assert_eq!(brute_force_witness_within(&s.derived, s.derived_ambient, DEFAULT_GUARD).unwrap(), None);
            }
        }
        let last = &chain.last;
        let scale = chain.scale().unwrap();
        for y in [(last.b1(), last.b2()), (-last.b1(), last.b2())] {
            let x = chain.lift(y);
            prop_assert_eq!(ap.value_at(x.0, x.1), Some(scale * (y.0 * last.q1() + y.1 * last.q2())));
        }
    }
}
