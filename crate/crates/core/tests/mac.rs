use fabnet_core::event::{NS_PER_MS, NS_PER_S};
use fabnet_core::mac::{AccessMethod, PhyParams, Scenario, SchedulerKind};
use proptest::prelude::*;

#[test]
fn lone_dcf_station_matches_closed_form_access_delay() {
    let phy = PhyParams::default();
    let sc = Scenario {
        n_safety: 1,
        n_ar: 0,
        access: AccessMethod::Dcf,
        duration: 90 * NS_PER_S,
        ..Scenario::default()
    };
    let s = sc.run(&phy).unwrap();
    assert!(s.safety.delivered >= 10_000);
    let oracle = phy.difs as f64 + phy.cw_min as f64 / 2.0 * phy.slot as f64 + phy.tx_time(64) as f64;
    let rel = (s.safety.mean_access_ns - oracle).abs() / oracle;
    assert!(rel < 0.01, "mean {} oracle {oracle}", s.safety.mean_access_ns);
}

#[test]
fn reference_scheduler_holds_safety_deadline_at_30_ar() {
    let s = Scenario::default().with_n_ar(30).run(&PhyParams::default()).unwrap();
    assert!(s.safety.max_delay_ns <= 8 * NS_PER_MS);
    assert_eq!(s.safety.deadline_misses, 0);
}

#[test]
fn reference_scheduler_overloads_ar_at_35() {
    let s = Scenario::default().with_n_ar(35).run(&PhyParams::default()).unwrap();
    assert!(s.ar.max_delay_ns > 50 * NS_PER_MS);
    assert!(s.admission_failed());
}

#[test]
fn dcf_misses_safety_deadline_at_50_ar() {
    let sc = Scenario {
        duration: 5 * NS_PER_S,
        ..Scenario::default().with_access(AccessMethod::Dcf).with_n_ar(50)
    };
    let s = sc.run(&PhyParams::default()).unwrap();
    assert!(s.safety.max_delay_ns > 8 * NS_PER_MS);
}

fn method() -> impl Strategy<Value = (AccessMethod, SchedulerKind)> {
    prop_oneof![
        Just((AccessMethod::Dcf, SchedulerKind::Reference)),
        Just((AccessMethod::Pcf, SchedulerKind::Reference)),
        Just((AccessMethod::Hcca, SchedulerKind::Reference)),
        Just((AccessMethod::Hcca, SchedulerKind::Edf)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn packets_are_conserved((access, scheduler) in method(), n_safety in 0u32..4, n_ar in 0u32..40, seed in any::<u64>()) {
        let sc = Scenario {
            n_safety,
            n_ar,
            access,
            scheduler,
            duration: NS_PER_S / 2,
            seed,
            ..Scenario::default()
        };
        let s = sc.run(&PhyParams::default()).unwrap();
        prop_assert!(s.safety.is_conserved());
        prop_assert!(s.ar.is_conserved());
        if access != AccessMethod::Dcf {
            prop_assert_eq!(s.collisions, 0);
        }
    }

    #[test]
    fn same_seed_same_stats((access, scheduler) in method(), n_ar in 0u32..20, seed in any::<u64>()) {
        let sc = Scenario { n_ar, access, scheduler, duration: NS_PER_S / 4, seed, ..Scenario::default() };
        let phy = PhyParams::default();
        prop_assert_eq!(sc.run(&phy).unwrap(), sc.run(&phy).unwrap());
    }
}

#[test]
fn trace_is_recorded_only_on_request() {
    let phy = PhyParams::default();
    for access in [AccessMethod::Dcf, AccessMethod::Pcf, AccessMethod::Hcca] {
        let sc = Scenario {
            duration: 50 * NS_PER_MS,
            ..Scenario::default().with_access(access)
        };
        assert!(sc.run(&phy).unwrap().trace.is_empty());
        let traced = Scenario { trace: true, ..sc.clone() }.run(&phy).unwrap();
        assert!(!traced.trace.is_empty());
        assert!(traced.trace.windows(2).all(|w| (w[0].time, w[0].seq) < (w[1].time, w[1].seq)));
        let mut plain = traced.clone();
        plain.trace.clear();
        assert_eq!(plain, sc.run(&phy).unwrap());
    }
}
