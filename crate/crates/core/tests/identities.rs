use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rqkz_core::idsuite::*;
use rqkz_core::repkit::{build_eval_rep, GradingChoice, SiteKind};
use rqkz_core::rsolve::{LocalCache, Normalization, RFamily};
use rqkz_core::{QContext, C};

const KINDS: [SiteKind; 2] = [SiteKind::V, SiteKind::VDual];

fn ctx() -> QContext {
    QContext::new(C::new(0.7, 0.0)).unwrap()
}

fn gradings() -> [GradingChoice; 2] {
    [GradingChoice::symmetric(), GradingChoice::new(1, 0).unwrap()]
}

#[test]
fn representation_level_checks() {
    let c = ctx();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for m in 1..=3 {
        for g in gradings() {
            for _ in 0..3 {
                let z = sample_zeta(&mut rng);
                for r in [
                    check_representation(m, g, z, &c, 1e-12),
                    check_hopf_axioms(m, g, z, &c, 1e-12),
                    check_double_dual(m, g, z, &c, 1e-12),
                    check_self_dual(m, g, z, &c, 1e-12),
                ] {
                    assert!(r.passed, "{r:?}");
                }
            }
        }
    }
}

#[test]
fn intertwiners_have_a_clean_nullspace() {
    let c = ctx();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for m in 1..=3 {
        let rep = build_eval_rep(m, GradingChoice::symmetric(), &c);
        for a in KINDS {
            for b in KINDS {
                let z = sample_generic_zetas(&mut rng, 2, &rep);
                let r = check_intertwiner(&rep, [a, b], [z[0], z[1]], 1e6, 1e-11);
                assert!(r.passed, "{r:?}");
            }
        }
    }
}

#[test]
fn degenerate_points_are_detected() {
    let c = ctx();
    for m in 1..=2 {
        let rep = build_eval_rep(m, GradingChoice::symmetric(), &c);
        let ks: Vec<i32> = (1..=m as i32).flat_map(|k| [k, -k]).collect();
        let r = check_degenerate_scan(&rep, &ks, &[1e-3, -1e-3, 1e-2]);
        assert!(r.passed, "{r:?}");
    }
}

#[test]
fn unitarity_initial_condition_and_ybe() {
    let c = ctx();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for m in 1..=2 {
        let rep = build_eval_rep(m, GradingChoice::symmetric(), &c);
        let cache = LocalCache::new();
        for norm in [Normalization::Hw, Normalization::Kappa] {
            let f = RFamily::new(&rep, C::new(0.2, 0.0), norm, &cache);
            for a in KINDS {
                for b in KINDS {
                    let z = sample_generic_zetas(&mut rng, 2, &rep);
                    let r = check_unitarity(&f, [a, b], [z[0], z[1]], 1e-10);
                    assert!(r.passed, "{r:?}");
                    for k in KINDS {
                        let z = sample_generic_zetas(&mut rng, 3, &rep);
                        let r = check_ybe(&f, [a, b, k], [z[0], z[1], z[2]], 1e-9);
                        assert!(r.passed, "{r:?}");
                    }
                }
                let r = check_initial_condition(&f, [a, a], sample_zeta(&mut rng), 1e-12);
                assert!(r.passed, "{r:?}");
            }
            let r = check_mixed_coincident(&f, sample_zeta(&mut rng), &[1e-1, 1e-2], 1e-9);
            assert!(r.passed, "{r:?}");
        }
    }
}

#[test]
fn mixed_pairs_are_not_identity_at_coincidence() {
    let c = ctx();
    let rep = build_eval_rep(1, GradingChoice::symmetric(), &c);
    let cache = LocalCache::new();
    let f = RFamily::new(&rep, C::new(0.0, 0.0), Normalization::Hw, &cache);
    let r = check_initial_condition(&f, [SiteKind::VDual, SiteKind::V], C::new(1.0, 0.0), 1e-12);
    assert!(!r.passed);
}
