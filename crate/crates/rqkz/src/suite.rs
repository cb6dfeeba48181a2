//! The registry of named checks and their deterministic execution.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rqkz_core::idsuite::*;
use rqkz_core::qkzengine::{p_general, p_self_dual, ChainSpec, DeltaAssignment, DeltaSource};
use rqkz_core::reduction::{check_rpr, theorem_check_general, theorem_check_selfdual, ReductionCase, ReductionMode};
use rqkz_core::repkit::{build_eval_rep, EvalRep, GradingChoice, SiteKind};
use rqkz_core::rsolve::{Normalization, RCache, RFamily};
use rqkz_core::tensorops::Permutation;
use rqkz_core::C;

use crate::cache::SharedCache;
use crate::config::RunConfig;
use crate::error::CliError;
use crate::report::report_order;

pub const TOL_REP: f64 = 1e-12;
pub const TOL_INTERTWINER: f64 = 1e-11;
pub const GAP_MIN: f64 = 1e6;
pub const TOL_UNITARITY: f64 = 1e-10;
pub const TOL_INITIAL: f64 = 1e-12;
pub const TOL_YBE: f64 = 1e-9;
pub const TOL_SCALAR: f64 = 1e-10;
pub const TOL_CROSSING: f64 = 1e-9;
pub const TOL_CROSSING_SPREAD: f64 = 1e-8;
pub const TOL_INVARIANCE: f64 = 1e-11;
pub const TOL_LAMBDA: f64 = 1e-10;
pub const TOL_DDR: f64 = 1e-11;
pub const TOL_COMPAT: f64 = 1e-9;
pub const TOL_THEOREM: f64 = 1e-9;
pub const TOL_END_TO_END: f64 = 1e-8;
pub const TOL_RPR: f64 = 1e-9;

pub const KINDS: [SiteKind; 2] = [SiteKind::V, SiteKind::VDual];

pub type CheckFn = fn(&RunConfig, &mut ChaCha8Rng, &dyn RCache) -> Vec<VerificationReport>;

pub struct Check {
    pub name: &'static str,
    pub about: &'static str,
    pub run: CheckFn,
}

pub const CHECKS: &[Check] = &[
    Check {
        name: "representation",
        about: "dual families and commutation relations",
        run: representation,
    },
    Check {
        name: "hopf_axioms",
        about: "coproduct and antipode relations",
        run: hopf_axioms,
    },
    Check {
        name: "double_dual",
        about: "double dual conjugated by X",
        run: double_dual,
    },
    Check {
        name: "self_dual",
        about: "dual conjugated by O",
        run: self_dual,
    },
    Check {
        name: "intertwiner",
        about: "nullspace gap and intertwining residual",
        run: intertwiner,
    },
    Check {
        name: "degenerate_scan",
        about: "detection of non-simple points",
        run: degenerate_scan,
    },
    Check {
        name: "unitarity",
        about: "Ř12 Ř21 = id",
        run: unitarity,
    },
    Check {
        name: "initial_condition",
        about: "Ř(ζ|ζ) = id for equal kinds",
        run: initial_condition,
    },
    Check {
        name: "mixed_coincident",
        about: "mixed pairs near coincidence",
        run: mixed_coincident,
    },
    Check {
        name: "ybe",
        about: "Yang-Baxter equation on all kind triples",
        run: ybe,
    },
    Check {
        name: "scalars",
        about: "κ and ρ⁰ identities",
        run: scalars,
    },
    Check {
        name: "crossing",
        about: "crossing proportionality and its scalars",
        run: crossing,
    },
    Check {
        name: "invariance",
        about: "invariance under the distinguished operators",
        run: invariance,
    },
    Check {
        name: "lambda_forms",
        about: "R-form and Ř-form of Λ agree",
        run: lambda_forms,
    },
    Check {
        name: "ddr",
        about: "Δ⊗Δ commutes with R",
        run: ddr,
    },
    Check {
        name: "qkz_compatibility",
        about: "compatibility of the qKZ system",
        run: qkz_compatibility,
    },
    Check {
        name: "braid",
        about: "transport along equivalent words",
        run: braid,
    },
    Check {
        name: "theorem_selfdual",
        about: "reduction in the self-dual case",
        run: theorem_selfdual,
    },
    Check {
        name: "theorem_general",
        about: "reduction in the general case",
        run: theorem_general,
    },
    Check {
        name: "rpr",
        about: "exchange relation of Ψ",
        run: rpr,
    },
];

pub fn find_check(name: &str) -> Result<&'static Check, CliError> {
    CHECKS
        .iter()
        .find(|c| c.name == name)
        .ok_or_else(|| CliError::UnknownCheck(name.to_string()))
}

/// Stable per-check seed derived from the run seed and the check name.
pub fn check_seed(seed: u64, name: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h = (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = seed ^ h;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn run_one(check: &Check, cfg: &RunConfig, cache: &dyn RCache) -> Vec<VerificationReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(check_seed(cfg.seed, check.name));
    let start = Instant::now();
    let mut out = (check.run)(cfg, &mut rng, cache);
    let ms = start.elapsed().as_secs_f64() * 1e3;
    for r in &mut out {
        if let Some(t) = cfg.tol {
            *r = r.clone().with_tolerance(t);
        }
        r.wall_ms = cfg.timings.then_some(ms);
    }
    out
}

/// Runs `checks` in parallel and returns the reports sorted by name, then params.
pub fn run_checks(checks: &[&Check], cfg: &RunConfig) -> Vec<VerificationReport> {
    let cache = SharedCache::new();
    let work = || -> Vec<VerificationReport> { checks.par_iter().flat_map_iter(|c| run_one(c, cfg, &cache)).collect() };
    let mut reports = match cfg.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map(|p| p.install(work))
            .unwrap_or_else(|_| work()),
        None => work(),
    };
    reports.sort_by(report_order);
    reports
}

pub fn run_suite(cfg: &RunConfig) -> Vec<VerificationReport> {
    let all: Vec<&Check> = CHECKS.iter().collect();
    run_checks(&all, cfg)
}

fn rep(cfg: &RunConfig) -> EvalRep {
    build_eval_rep(cfg.m, cfg.grading, &cfg.ctx)
}

fn pair(rng: &mut ChaCha8Rng, rep: &EvalRep) -> [C; 2] {
    let z = sample_generic_zetas(rng, 2, rep);
    [z[0], z[1]]
}

fn triple(rng: &mut ChaCha8Rng, rep: &EvalRep) -> [C; 3] {
    let z = sample_generic_zetas(rng, 3, rep);
    [z[0], z[1], z[2]]
}

/// Runs `body` on one family per configured normalization and twist.
fn per_family(
    cfg: &RunConfig,
    rng: &mut ChaCha8Rng,
    cache: &dyn RCache,
    mut body: impl FnMut(&RFamily, &mut ChaCha8Rng, &mut Vec<VerificationReport>),
) -> Vec<VerificationReport> {
    let rep = rep(cfg);
    let mut out = Vec::new();
    for &norm in &cfg.norms {
        for &alpha in &cfg.alphas {
            let f = RFamily::new(&rep, alpha, norm, cache);
            let before = out.len();
            body(&f, rng, &mut out);
            for r in &mut out[before..] {
                *r = r.clone().param("alpha", alpha);
            }
        }
    }
    out
}

fn rep_level(
    cfg: &RunConfig,
    rng: &mut ChaCha8Rng,
    check: fn(usize, GradingChoice, C, &rqkz_core::QContext, f64) -> VerificationReport,
) -> Vec<VerificationReport> {
    (0..cfg.samples)
        .map(|_| check(cfg.m, cfg.grading, sample_zeta(rng), &cfg.ctx, TOL_REP))
        .collect()
}

fn representation(cfg: &RunConfig, rng: &mut ChaCha8Rng, _: &dyn RCache) -> Vec<VerificationReport> {
    rep_level(cfg, rng, check_representation)
}

fn hopf_axioms(cfg: &RunConfig, rng: &mut ChaCha8Rng, _: &dyn RCache) -> Vec<VerificationReport> {
    rep_level(cfg, rng, check_hopf_axioms)
}

fn double_dual(cfg: &RunConfig, rng: &mut ChaCha8Rng, _: &dyn RCache) -> Vec<VerificationReport> {
    rep_level(cfg, rng, check_double_dual)
}

fn self_dual(cfg: &RunConfig, rng: &mut ChaCha8Rng, _: &dyn RCache) -> Vec<VerificationReport> {
    rep_level(cfg, rng, check_self_dual)
}

fn intertwiner(cfg: &RunConfig, rng: &mut ChaCha8Rng, _: &dyn RCache) -> Vec<VerificationReport> {
    let rep = rep(cfg);
    let mut out = Vec::new();
    for _ in 0..cfg.samples {
        for a in KINDS {
            for b in KINDS {
                out.push(check_intertwiner(
                    &rep,
                    [a, b],
                    pair(rng, &rep),
                    GAP_MIN,
                    TOL_INTERTWINER,
                ));
            }
        }
    }
    out
}

fn degenerate_scan(cfg: &RunConfig, _: &mut ChaCha8Rng, _: &dyn RCache) -> Vec<VerificationReport> {
    let ks: Vec<i32> = (1..=cfg.m as i32).flat_map(|k| [k, -k]).collect();
    vec![check_degenerate_scan(&rep(cfg), &ks, &[1e-3, -1e-3, 1e-2])]
}

fn unitarity(cfg: &RunConfig, rng: &mut ChaCha8Rng, cache: &dyn RCache) -> Vec<VerificationReport> {
    let samples = cfg.samples;
    per_family(cfg, rng, cache, |f, rng, out| {
        for _ in 0..samples {
            for a in KINDS {
                for b in KINDS {
                    out.push(check_unitarity(f, [a, b], pair(rng, &f.rep), TOL_UNITARITY));
                }
            }
        }
    })
}

fn initial_condition(cfg: &RunConfig, rng: &mut ChaCha8Rng, cache: &dyn RCache) -> Vec<VerificationReport> {
    let samples = cfg.samples;
    per_family(cfg, rng, cache, |f, rng, out| {
        for _ in 0..samples {
            for k in KINDS {
                out.push(check_initial_condition(f, [k, k], sample_zeta(rng), TOL_INITIAL));
            }
        }
    })
}

fn mixed_coincident(cfg: &RunConfig, rng: &mut ChaCha8Rng, cache: &dyn RCache) -> Vec<VerificationReport> {
    per_family(cfg, rng, cache, |f, rng, out| {
        out.push(check_mixed_coincident(
            f,
            sample_zeta(rng),
            &[1e-1, 1e-2],
            TOL_UNITARITY,
        ));
    })
}

fn ybe(cfg: &RunConfig, rng: &mut ChaCha8Rng, cache: &dyn RCache) -> Vec<VerificationReport> {
    let samples = cfg.samples;
    per_family(cfg, rng, cache, |f, rng, out| {
        for _ in 0..samples {
            for a in KINDS {
                for b in KINDS {
                    for c in KINDS {
                        out.push(check_ybe(f, [a, b, c], triple(rng, &f.rep), TOL_YBE));
                    }
                }
            }
        }
    })
}

fn scalars(cfg: &RunConfig, rng: &mut ChaCha8Rng, _: &dyn RCache) -> Vec<VerificationReport> {
    let c = &cfg.ctx;
    let mut out = Vec::new();
    for fam in [ScalarFamily::Sl2(cfg.m as u32), ScalarFamily::Sllpo(cfg.l)] {
        for _ in 0..cfg.samples {
            let z = sample_scalar_z(rng, fam, c);
            out.push(check_kappa_reflection(fam, z, c, TOL_SCALAR));
            out.push(check_difference_equation(fam, z, c, TOL_SCALAR));
            out.push(check_rho0_ratio(fam, z, c, TOL_SCALAR));
            if let ScalarFamily::Sl2(m) = fam {
                if m % 2 == 0 {
                    out.push(check_even_kappa(m / 2, z, c, TOL_SCALAR));
                }
            }
        }
    }
    for _ in 0..cfg.samples {
        let z = C::from_polar(rng.random_range(0.05..0.4), rng.random_range(-3.0..3.0));
        out.push(check_rho0_series(cfg.l, z, c, TOL_SCALAR));
    }
    out
}

fn crossing(cfg: &RunConfig, rng: &mut ChaCha8Rng, cache: &dyn RCache) -> Vec<VerificationReport> {
    let rep = rep(cfg);
    let mut out = Vec::new();
    for &alpha in &cfg.alphas {
        let hw = RFamily::new(&rep, alpha, Normalization::Hw, cache);
        let kp = RFamily::new(&rep, alpha, Normalization::Kappa, cache);
        let samples: Vec<[C; 2]> = (0..cfg.samples.max(2))
            .map(|_| sample_branch_safe_pair(rng, &rep))
            .collect();
        for &z in &samples {
            out.push(check_crossing(&hw, &kp, z, TOL_CROSSING).param("alpha", alpha));
        }
        for r in check_crossing_constancy(&hw, &kp, &samples, TOL_CROSSING_SPREAD, TOL_CROSSING_SPREAD) {
            out.push(r.param("alpha", alpha));
        }
    }
    out
}

fn invariance(cfg: &RunConfig, rng: &mut ChaCha8Rng, cache: &dyn RCache) -> Vec<VerificationReport> {
    let rep = rep(cfg);
    let mut alphas = cfg.alphas.clone();
    alphas.push(C::new(rng.random_range(-1.0..1.0), 0.0));
    let mut out = Vec::new();
    for &norm in &cfg.norms {
        for &alpha in &alphas {
            let f = RFamily::new(&rep, alpha, norm, cache);
            for a in KINDS {
                for b in KINDS {
                    let z = sample_branch_safe_pair(rng, &rep);
                    out.push(check_invariance_x(&f, [a, b], z, TOL_INVARIANCE).param("alpha", alpha));
                    out.push(check_invariance_a(&f, [a, b], z, TOL_INVARIANCE).param("alpha", alpha));
                }
            }
            let z = sample_branch_safe_pair(rng, &rep);
            out.push(check_invariance_xtilde(&f, z, TOL_INVARIANCE).param("alpha", alpha));
        }
    }
    out
}

/// Chains used by the qKZ checks: alternating kinds on `N ∈ {2, 4}` sites
/// with general `Δ`, and all-`V` chains with self-dual `Δ`.
pub fn qkz_chains(f: &RFamily, rng: &mut ChaCha8Rng) -> Vec<ChainSpec> {
    let mut chains = Vec::new();
    for n in [2usize, 4] {
        let etas = sample_generic_zetas(rng, n, &f.rep);
        let kinds: Vec<SiteKind> = (0..n).map(|i| KINDS[(i + i / 2) % 2]).collect();
        chains.push(
            ChainSpec::new(
                kinds,
                etas.clone(),
                p_general(f),
                vec![DeltaAssignment::new(DeltaSource::General); n],
            )
            .expect("valid chain"),
        );
        chains.push(
            ChainSpec::new(
                vec![SiteKind::V; n],
                etas,
                p_self_dual(f),
                vec![DeltaAssignment::new(DeltaSource::SelfDual { n: n / 2 }); n],
            )
            .expect("valid chain"),
        );
    }
    chains
}

/// qKZ-level checks run on the `hw` family, whose mixed-pair operators are
/// single-valued in `ζ`.
fn per_chain(
    cfg: &RunConfig,
    rng: &mut ChaCha8Rng,
    cache: &dyn RCache,
    mut body: impl FnMut(&RFamily, &ChainSpec, &mut ChaCha8Rng, &mut Vec<VerificationReport>),
) -> Vec<VerificationReport> {
    let rep = rep(cfg);
    let mut out = Vec::new();
    for &alpha in &cfg.alphas {
        let f = RFamily::new(&rep, alpha, Normalization::Hw, cache);
        for chain in qkz_chains(&f, rng) {
            let before = out.len();
            body(&f, &chain, rng, &mut out);
            for r in &mut out[before..] {
                *r = r.clone().param("alpha", alpha).param("delta", delta_label(&chain));
            }
        }
    }
    out
}

fn delta_label(chain: &ChainSpec) -> &'static str {
    match chain.deltas[0].source {
        DeltaSource::SelfDual { .. } => "self_dual",
        DeltaSource::General => "general",
        DeltaSource::Identity => "identity",
        DeltaSource::Custom(_) => "custom",
    }
}

fn lambda_forms(cfg: &RunConfig, rng: &mut ChaCha8Rng, cache: &dyn RCache) -> Vec<VerificationReport> {
    per_chain(cfg, rng, cache, |f, chain, _, out| {
        for i in 0..chain.len() {
            out.push(check_lambda_forms(f, chain, i, TOL_LAMBDA));
        }
    })
}

fn ddr(cfg: &RunConfig, rng: &mut ChaCha8Rng, cache: &dyn RCache) -> Vec<VerificationReport> {
    per_chain(cfg, rng, cache, |f, chain, _, out| {
        for j in 0..chain.len() {
            for k in 0..chain.len() {
                if j != k {
                    out.push(check_ddr(f, chain, j, k, TOL_DDR));
                }
            }
        }
    })
}

fn qkz_compatibility(cfg: &RunConfig, rng: &mut ChaCha8Rng, cache: &dyn RCache) -> Vec<VerificationReport> {
    per_chain(cfg, rng, cache, |f, chain, _, out| {
        for i in 0..chain.len() {
            for j in i + 1..chain.len() {
                out.push(check_qkz_compatibility(f, chain, i, j, TOL_COMPAT));
            }
        }
    })
}

fn braid(cfg: &RunConfig, rng: &mut ChaCha8Rng, cache: &dyn RCache) -> Vec<VerificationReport> {
    per_chain(cfg, rng, cache, |f, chain, rng, out| {
        let n = chain.len();
        let dim: usize = chain.dims(f).iter().product();
        let phi = random_tensor(rng, dim, 1);
        let words: Vec<(Vec<usize>, Vec<usize>)> = if n >= 3 {
            vec![(vec![0, 1, 0], vec![1, 0, 1]), (vec![0, 2], vec![2, 0])]
        } else {
            vec![(vec![0, 0], vec![])]
        };
        for (w1, w2) in words {
            if w1.iter().chain(&w2).all(|&k| k + 1 < n) {
                out.push(check_braid_welldefined(f, chain, &phi, &w1, &w2, TOL_LAMBDA));
            }
        }
        let s = Permutation::lambda(n);
        let w1 = s.reduced_word(true);
        let w2 = s.reduced_word(false);
        if w1 != w2 {
            out.push(check_braid_welldefined(f, chain, &phi, &w1, &w2, TOL_LAMBDA));
        }
    })
}

fn case(cfg: &RunConfig, mode: ReductionMode, n: usize) -> Option<ReductionCase> {
    ReductionCase::new(mode, n, cfg.m, cfg.grading, cfg.ctx, cfg.alphas[0]).ok()
}

fn theorem_selfdual(cfg: &RunConfig, rng: &mut ChaCha8Rng, cache: &dyn RCache) -> Vec<VerificationReport> {
    let Some(c) = case(cfg, ReductionMode::SelfDual, cfg.n) else {
        return Vec::new();
    };
    let f = c.family(cache);
    (0..cfg.samples)
        .flat_map(|_| {
            let z = sample_generic_zetas(rng, c.n, &f.rep);
            let seed = rng.random::<u32>() as u64;
            theorem_check_selfdual(&c, &f, &z, seed, TOL_THEOREM, TOL_END_TO_END)
        })
        .collect()
}

fn theorem_general(cfg: &RunConfig, rng: &mut ChaCha8Rng, cache: &dyn RCache) -> Vec<VerificationReport> {
    let Some(c) = case(cfg, ReductionMode::General, cfg.n.min(2)) else {
        return Vec::new();
    };
    let f = c.family(cache);
    (0..cfg.samples)
        .flat_map(|_| {
            let z = sample_generic_zetas(rng, c.n, &f.rep);
            let seed = rng.random::<u32>() as u64;
            theorem_check_general(&c, &f, &z, seed, TOL_THEOREM, TOL_THEOREM)
        })
        .collect()
}

fn rpr(cfg: &RunConfig, rng: &mut ChaCha8Rng, cache: &dyn RCache) -> Vec<VerificationReport> {
    let n = cfg.n.max(2);
    let mut out = Vec::new();
    for mode in [ReductionMode::SelfDual, ReductionMode::General] {
        let Some(c) = case(cfg, mode, n) else { continue };
        let f = c.family(cache);
        for _ in 0..cfg.samples {
            let z = sample_generic_zetas(rng, n, &f.rep);
            let seed = rng.random::<u32>() as u64;
            for i in 0..n - 1 {
                out.push(check_rpr(&c, &f, &z, i, seed, TOL_RPR));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rqkz_core::rsolve::LocalCache;

    #[test]
    fn names_are_unique_and_sorted_lookup_works() {
        let mut names: Vec<&str> = CHECKS.iter().map(|c| c.name).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), CHECKS.len());
        assert!(find_check("ybe").is_ok());
        assert!(matches!(find_check("nope"), Err(CliError::UnknownCheck(_))));
    }

    #[test]
    fn check_seeds_depend_on_both_inputs() {
        assert_eq!(check_seed(42, "ybe"), check_seed(42, "ybe"));
        assert_ne!(check_seed(42, "ybe"), check_seed(43, "ybe"));
        assert_ne!(check_seed(42, "ybe"), check_seed(42, "ddr"));
    }

    #[test]
    fn each_check_passes_on_the_default_config() {
        let cfg = RunConfig {
            samples: 1,
            ..RunConfig::default()
        };
        for c in CHECKS {
            let mut rng = ChaCha8Rng::seed_from_u64(check_seed(cfg.seed, c.name));
            let reports = (c.run)(&cfg, &mut rng, &LocalCache::new());
            assert!(!reports.is_empty(), "{}", c.name);
            for r in reports {
                assert!(r.passed, "{r:?}");
            }
        }
    }

    #[test]
    fn tolerance_override_and_timings() {
        let cfg = RunConfig {
            tol: Some(1e-30),
            timings: true,
            samples: 1,
            ..RunConfig::default()
        };
        let reports = run_checks(&[find_check("unitarity").unwrap()], &cfg);
        assert!(reports.iter().all(|r| r.tolerance == 1e-30 && r.wall_ms.is_some()));
        assert!(reports.iter().any(|r| !r.passed));
    }
}
