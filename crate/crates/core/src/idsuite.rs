//! Identity checks producing [`VerificationReport`]s.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{fro, identity, inverse, kron, rel_commutator, rel_diff, Mat, C, ONE};
use crate::qkzengine::{self, ChainSpec};
use crate::repkit::{
    build_eval_rep, displayed_dual_family, operator_o, operator_x, EvalRep, Generator, GradingChoice, SiteKind,
};
use crate::rsolve::{solve_normalized, Normalization, RFamily, RRequest};
use crate::scalarlib::{self, QContext};
use crate::tensorops::{partial_transpose, scalar_ratio, Factor};

#[derive(Debug, Clone, PartialEq)]
pub enum ParamValue {
    Int(i64),
    Real(f64),
    Complex(C),
    Text(String),
}

impl From<usize> for ParamValue {
    fn from(v: usize) -> Self {
        ParamValue::Int(v as i64)
    }
}

impl From<u32> for ParamValue {
    fn from(v: u32) -> Self {
        ParamValue::Int(v as i64)
    }
}

impl From<u64> for ParamValue {
    fn from(v: u64) -> Self {
        ParamValue::Int(v as i64)
    }
}

impl From<f64> for ParamValue {
    fn from(v: f64) -> Self {
        ParamValue::Real(v)
    }
}

impl From<C> for ParamValue {
    fn from(v: C) -> Self {
        ParamValue::Complex(v)
    }
}

impl From<&str> for ParamValue {
    fn from(v: &str) -> Self {
        ParamValue::Text(v.to_string())
    }
}

impl From<String> for ParamValue {
    fn from(v: String) -> Self {
        ParamValue::Text(v)
    }
}

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub name: String,
    pub params: Vec<(String, ParamValue)>,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub wall_ms: Option<f64>,
    pub extracted_scalars: Vec<(String, C)>,
    pub error: Option<String>,
}

impl VerificationReport {
    pub fn new(name: &str, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            params: Vec::new(),
            residual: f64::INFINITY,
            tolerance,
            passed: false,
            wall_ms: None,
            extracted_scalars: Vec::new(),
            error: None,
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<ParamValue>) -> Self {
        self.params.push((key.to_string(), value.into()));
        self
    }

    pub fn scalar(mut self, key: &str, value: C) -> Self {
        self.extracted_scalars.push((key.to_string(), value));
        self
    }

    /// Records the residual, or the error that prevented computing it.
    pub fn finish(mut self, residual: Result<f64>) -> Self {
        match residual {
            Ok(r) => {
                self.residual = r;
                self.passed = r <= self.tolerance;
            }
            Err(e) => {
                self.residual = f64::INFINITY;
                self.passed = false;
                self.error = Some(e.to_string());
            }
        }
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.passed = self.error.is_none() && self.residual <= tolerance;
        self
    }
}

/// A spectral parameter with modulus in `[0.5, 2]` and uniform argument.
pub fn sample_zeta(rng: &mut ChaCha8Rng) -> C {
    C::from_polar(
        rng.random_range(0.5..2.0),
        rng.random_range(-core::f64::consts::PI..core::f64::consts::PI),
    )
}

/// `n` spectral parameters such that every `(ζ_i/ζ_j)^s` stays at relative
/// distance at least `1e−3` from `q^{2k}`, `|k| ≤ 2m + 6`.
pub fn sample_generic_zetas(rng: &mut ChaCha8Rng, n: usize, rep: &EvalRep) -> Vec<C> {
    let s = rep.grading.s() as i32;
    let kmax = 2 * rep.m as i32 + 6;
    loop {
        let z: Vec<C> = (0..n).map(|_| sample_zeta(rng)).collect();
        let ok = (0..n).all(|i| {
            (0..n).filter(|&j| j != i).all(|j| {
                let w = (z[i] / z[j]).powi(s);
                (-kmax..=kmax).all(|k| {
                    let p = rep.ctx.powi(2 * k);
                    (w - p).norm() > 1e-3 * p.norm()
                })
            })
        });
        if ok {
            return z;
        }
    }
}

pub fn random_tensor(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Mat {
    Mat::from_fn(rows, cols, |_, _| {
        C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

fn kinds_label(kinds: &[SiteKind]) -> String {
    kinds.iter().map(|k| k.label()).collect::<Vec<_>>().join(",")
}

fn norm_label(n: Normalization) -> &'static str {
    match n {
        Normalization::Hw => "hw",
        Normalization::Kappa => "kappa",
    }
}

fn family_params(r: VerificationReport, f: &RFamily) -> VerificationReport {
    r.param("m", f.rep.m)
        .param("s0", f.rep.grading.s0)
        .param("s1", f.rep.grading.s1)
        .param("norm", norm_label(f.normalization))
}

/// `(E_i, F_i, K_i^ν)` for one simple root.
type RootTriple = (Generator, Generator, fn(C) -> Generator);

/// Representation data: the dual matches the displayed families, and the
/// commutation relations and grading covariance hold.
pub fn check_representation(m: usize, grading: GradingChoice, zeta: C, ctx: &QContext, tol: f64) -> VerificationReport {
    let rep = build_eval_rep(m, grading, ctx);
    let run = || -> Result<f64> {
        let dual = rep.antipode_dual();
        let mut worst: f64 = 0.0;
        for g in Generator::standard() {
            worst = worst.max(rel_diff(
                &dual.gen(g, zeta),
                &displayed_dual_family(m, g, zeta, grading, ctx),
            ));
        }
        let den = ctx.q() - ctx.q().inv();
        for r in [rep, dual] {
            let pairs: [RootTriple; 2] = [
                (Generator::E0, Generator::F0, Generator::K0),
                (Generator::E1, Generator::F1, Generator::K1),
            ];
            for (eg, fg, kg) in pairs {
                let (e, f) = (r.gen(eg, zeta), r.gen(fg, zeta));
                let lhs = &e * &f - &f * &e;
                let rhs = (r.gen(kg(ONE), zeta) - r.gen(kg(-ONE), zeta)) / den;
                worst = worst.max(rel_diff(&lhs, &rhs));
                let nu = C::new(0.37, 0.0);
                let conj = r.gen(kg(nu), zeta) * &e * r.gen(kg(-nu), zeta);
                worst = worst.max(rel_diff(&conj, &(&e * ctx.pow(nu * 2.0))));
                let conj = r.gen(kg(nu), zeta) * &f * r.gen(kg(-nu), zeta);
                worst = worst.max(rel_diff(&conj, &(&f * ctx.pow(-nu * 2.0))));
            }
            let (s0, s1) = (grading.s0 as i32, grading.s1 as i32);
            for (g, p) in [
                (Generator::E0, s0),
                (Generator::E1, s1),
                (Generator::F0, -s0),
                (Generator::F1, -s1),
            ] {
                worst = worst.max(rel_diff(&r.gen(g, zeta), &(r.gen(g, ONE) * zeta.powi(p))));
            }
        }
        Ok(worst)
    };
    VerificationReport::new("representation", tol)
        .param("m", m)
        .param("s0", grading.s0)
        .param("s1", grading.s1)
        .param("zeta", zeta)
        .finish(run())
}

/// `m(S⊗id)Δ(a) = ε(a)` for the generators, per site.
pub fn check_hopf_axioms(m: usize, grading: GradingChoice, zeta: C, ctx: &QContext, tol: f64) -> VerificationReport {
    let rep = build_eval_rep(m, grading, ctx);
    let dual = rep.antipode_dual();
    let s_of = |g: Generator| dual.gen(g, zeta).transpose();
    let mut worst: f64 = 0.0;
    let pairs: [RootTriple; 2] = [
        (Generator::E0, Generator::F0, Generator::K0),
        (Generator::E1, Generator::F1, Generator::K1),
    ];
    for (eg, fg, kg) in pairs {
        let e_part = s_of(eg) + s_of(kg(ONE)) * rep.gen(eg, zeta);
        let f_part = s_of(fg) * rep.gen(kg(-ONE), zeta) + rep.gen(fg, zeta);
        let scale = fro(&rep.gen(eg, zeta)).max(fro(&rep.gen(fg, zeta))).max(1.0);
        worst = worst.max(fro(&e_part) / scale).max(fro(&f_part) / scale);
        let k_part = s_of(kg(ONE)) * rep.gen(kg(ONE), zeta);
        worst = worst.max(rel_diff(&k_part, &identity(m + 1)));
    }
    VerificationReport::new("hopf_axioms", tol)
        .param("m", m)
        .param("zeta", zeta)
        .finish(Ok(worst))
}

/// `φ**_ζ(a) = X φ_{q^{−ε}ζ}(a) X^{−1}`.
pub fn check_double_dual(m: usize, grading: GradingChoice, zeta: C, ctx: &QContext, tol: f64) -> VerificationReport {
    let run = || -> Result<f64> {
        let rep = build_eval_rep(m, grading, ctx);
        let dd = rep.antipode_dual().antipode_dual();
        let x = operator_x(m, grading, ctx);
        let xi = inverse(&x)?;
        let zs = ctx.powr(-grading.epsilon()) * zeta;
        Ok(Generator::standard()
            .iter()
            .map(|g| rel_diff(&dd.gen(*g, zeta), &(&x * rep.gen(*g, zs) * &xi)))
            .fold(0.0, f64::max))
    };
    VerificationReport::new("double_dual", tol)
        .param("m", m)
        .param("s0", grading.s0)
        .param("s1", grading.s1)
        .param("zeta", zeta)
        .finish(run())
}

/// `φ*_ζ(a) = O φ_{q^δ ζ}(a) O^{−1}` with `δ = −2/s`.
pub fn check_self_dual(m: usize, grading: GradingChoice, zeta: C, ctx: &QContext, tol: f64) -> VerificationReport {
    let run = || -> Result<f64> {
        let rep = build_eval_rep(m, grading, ctx);
        let dual = rep.antipode_dual();
        let o = operator_o(m, grading, ctx);
        let oi = inverse(&o)?;
        let zs = ctx.powr(grading.delta()) * zeta;
        Ok(Generator::standard()
            .iter()
            .map(|g| rel_diff(&dual.gen(*g, zeta), &(&o * rep.gen(*g, zs) * &oi)))
            .fold(0.0, f64::max))
    };
    VerificationReport::new("self_dual", tol)
        .param("m", m)
        .param("s0", grading.s0)
        .param("s1", grading.s1)
        .param("zeta", zeta)
        .finish(run())
}

/// Nullspace gap and intertwining residual of an independent solve.
pub fn check_intertwiner(
    rep: &EvalRep,
    kinds: [SiteKind; 2],
    zetas: [C; 2],
    gap_min: f64,
    tol: f64,
) -> VerificationReport {
    let req = RRequest::new(rep, kinds[0], zetas[0], kinds[1], zetas[1], Normalization::Hw);
    let base = VerificationReport::new("intertwiner", tol)
        .param("m", rep.m)
        .param("kinds", kinds_label(&kinds))
        .param("zeta1", zetas[0])
        .param("zeta2", zetas[1]);
    match solve_normalized(&req) {
        Ok(res) => {
            let r = base.scalar("nullspace_gap", C::new(res.nullspace_gap, 0.0));
            let gap_ok = res.nullspace_gap > gap_min;
            let out = r.finish(Ok(res.max_residual()));
            if gap_ok {
                out
            } else {
                let mut out = out;
                out.passed = false;
                out.error = Some(format!("nullspace gap {:e} below {gap_min:e}", res.nullspace_gap));
                out
            }
        }
        Err(e) => base.finish(Err(e)),
    }
}

/// Scans `ζ_{12}^s = q^{2k}(1 + t)` and reports whether the degenerate-point
/// error fires exactly at the non-simple points (`t = 0`) and not nearby.
pub fn check_degenerate_scan(rep: &EvalRep, ks: &[i32], offsets: &[f64]) -> VerificationReport {
    let s = rep.grading.s() as f64;
    let z2 = C::new(1.0, 0.0);
    let mut wrong = 0usize;
    let mut fired = 0usize;
    for &k in ks {
        for &t in core::iter::once(&0.0).chain(offsets.iter()) {
            let w = rep.ctx.powi(2 * k) * (1.0 + t);
            let z1 = z2 * scalarlib::principal_pow(w, 1.0 / s);
            let req = RRequest::new(rep, SiteKind::V, z1, SiteKind::V, z2, Normalization::Hw);
            let err = solve_normalized(&req).is_err();
            if err {
                fired += 1;
            }
            if err != (t == 0.0) {
                wrong += 1;
            }
        }
    }
    VerificationReport::new("degenerate_scan", 0.0)
        .param("m", rep.m)
        .scalar("fired", C::new(fired as f64, 0.0))
        .finish(Ok(wrong as f64))
}

/// `R^{(12)}R^{(13)}R^{(23)} = R^{(23)}R^{(13)}R^{(12)}`.
pub fn check_ybe(f: &RFamily, kinds: [SiteKind; 3], zetas: [C; 3], tol: f64) -> VerificationReport {
    let run = || -> Result<f64> {
        let d = f.dim();
        let dims = [d, d, d];
        let r = |a: usize, b: usize| f.r(kinds[a], zetas[a], kinds[b], zetas[b]);
        let (r12, r13, r23) = (r(0, 1)?, r(0, 2)?, r(1, 2)?);
        let e =
            |op: &Mat, a: usize, b: usize| -> Result<Mat> { Ok(crate::tensorops::embed_pair(op, a, b, &dims)?.data) };
        let (e12, e13, e23) = (e(&r12, 0, 1)?, e(&r13, 0, 2)?, e(&r23, 1, 2)?);
        Ok(rel_diff(&(&e12 * &e13 * &e23), &(&e23 * &e13 * &e12)))
    };
    family_params(VerificationReport::new("ybe", tol), f)
        .param("kinds", kinds_label(&kinds))
        .param("zeta1", zetas[0])
        .param("zeta2", zetas[1])
        .param("zeta3", zetas[2])
        .finish(run())
}

/// `Ř_{W_1|W_2}(ζ_1|ζ_2) Ř_{W_2|W_1}(ζ_2|ζ_1) = id`.
pub fn check_unitarity(f: &RFamily, kinds: [SiteKind; 2], zetas: [C; 2], tol: f64) -> VerificationReport {
    let run = || -> Result<f64> {
        let a = f.rcheck(kinds[0], zetas[0], kinds[1], zetas[1])?;
        let b = f.rcheck(kinds[1], zetas[1], kinds[0], zetas[0])?;
        Ok(rel_diff(&(b * a), &identity(f.dim() * f.dim())))
    };
    family_params(VerificationReport::new("unitarity", tol), f)
        .param("kinds", kinds_label(&kinds))
        .param("zeta1", zetas[0])
        .param("zeta2", zetas[1])
        .finish(run())
}

/// `Ř_{W_1|W_2}(ζ|ζ) = id`.
pub fn check_initial_condition(f: &RFamily, kinds: [SiteKind; 2], zeta: C, tol: f64) -> VerificationReport {
    let run = || -> Result<f64> {
        let a = f.rcheck(kinds[0], zeta, kinds[1], zeta)?;
        Ok(rel_diff(&a, &identity(f.dim() * f.dim())))
    };
    family_params(VerificationReport::new("initial_condition", tol), f)
        .param("kinds", kinds_label(&kinds))
        .param("zeta", zeta)
        .finish(run())
}

/// `Ř_{V*|V}(ζ|ζ)` loses rank while `Ř_{V|V*}(a|b)Ř_{V*|V}(b|a) = id` holds
/// at points `b = a(1 + t)` approaching the coincident point.
pub fn check_mixed_coincident(f: &RFamily, zeta: C, offsets: &[f64], tol: f64) -> VerificationReport {
    let run = || -> Result<(f64, f64)> {
        let d = f.dim();
        let at = f.rcheck(SiteKind::VDual, zeta, SiteKind::V, zeta)?;
        let rank_ratio = crate::linalg::inverse_condition(&at);
        let mut worst: f64 = 0.0;
        for t in offsets {
            let b = zeta * (1.0 + t);
            let x = f.rcheck(SiteKind::VDual, b, SiteKind::V, zeta)?;
            let y = f.rcheck(SiteKind::V, zeta, SiteKind::VDual, b)?;
            worst = worst.max(rel_diff(&(y * x), &identity(d * d)));
        }
        Ok((worst, rank_ratio))
    };
    let base = family_params(VerificationReport::new("mixed_coincident", tol), f).param("zeta", zeta);
    match run() {
        Ok((worst, rank_ratio)) => {
            let singular = rank_ratio < 1e-12;
            let mut r = base
                .scalar("inverse_condition_at_coincidence", C::new(rank_ratio, 0.0))
                .finish(Ok(worst));
            if !singular {
                r.passed = false;
                r.error = Some("coincident mixed operator is unexpectedly invertible".into());
            }
            r
        }
        Err(e) => base.finish(Err(e)),
    }
}

/// Like [`sample_generic_zetas`] for two points, additionally keeping
/// `|arg ζ_{12}^s| < π/2` so that principal-branch powers of shifted arguments
/// stay on one sheet.
pub fn sample_branch_safe_pair(rng: &mut ChaCha8Rng, rep: &EvalRep) -> [C; 2] {
    let s = rep.grading.s() as i32;
    loop {
        let z = sample_generic_zetas(rng, 2, rep);
        if (z[0] / z[1]).powi(s).arg().abs() < core::f64::consts::FRAC_PI_2 {
            return [z[0], z[1]];
        }
    }
}

/// Scalars extracted by [`crossing_scalars`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingScalars {
    /// `((R_{V|V})^{−1})^{t_1}` against the hw-solved `R_{V*|V}`, times `ρ⁰`-ratio at `z`.
    pub d_t1: C,
    /// The `X`-conjugated, `q^{−ε}`-shifted form against the hw-solved
    /// `R_{V|V*}`, times the `ρ⁰`-ratio at `q⁴z`.
    pub d_t2: C,
    /// `κ` family: `((R_{V|V}(ζ_1|ζ_2))^{−1})^{t_1}` against
    /// `(O⊗1) R_{V|V}(q^{−ω}ζ_1|ζ_2) (O^{−1}⊗1)`.
    pub d_first: C,
    /// `κ` family: `[(1⊗X) R_{V|V}(ζ_1|q^{−ε}ζ_2)^{−1} (1⊗X^{−1})]^{t_2}` against
    /// `(1⊗O) R_{V|V}(ζ_1|q^{−ω}ζ_2) (1⊗O^{−1})`.
    pub d_second: C,
    /// Largest proportionality residual among the four comparisons.
    pub residual: f64,
}

/// Extracts the crossing scalars at one point.
pub fn crossing_scalars(hw: &RFamily, kappa: &RFamily, zetas: [C; 2]) -> Result<CrossingScalars> {
    let rep = hw.rep;
    let ctx = hw.ctx();
    let m = rep.m as u32;
    let d = rep.dim();
    let id = Mat::identity(d, d);
    let (z1, z2) = (zetas[0], zetas[1]);
    let z = hw.z(z1, z2);
    let x = kron(&id, &hw.ops.x);
    let xi = kron(&id, &inverse(&hw.ops.x)?);
    let shifted_form = |f: &RFamily| -> Result<Mat> {
        let r = f.r(SiteKind::V, z1, SiteKind::V, ctx.powr(-f.ops.epsilon) * z2)?;
        partial_transpose(&(&x * inverse(&r)? * &xi), d, d, Factor::Second)
    };
    let t1_form = |f: &RFamily| -> Result<Mat> {
        partial_transpose(&inverse(&f.r(SiteKind::V, z1, SiteKind::V, z2)?)?, d, d, Factor::First)
    };
    let solved =
        |k1, k2| -> Result<Mat> { Ok(solve_normalized(&RRequest::new(&rep, k1, z1, k2, z2, Normalization::Hw))?.r) };
    let (l1, r1) = scalar_ratio(&t1_form(hw)?, &solved(SiteKind::VDual, SiteKind::V)?)?;
    let d_t1 = l1 * scalarlib::rho0_ratio_sl2(m, z, ctx)?;
    let (l2, r2) = scalar_ratio(&shifted_form(hw)?, &solved(SiteKind::V, SiteKind::VDual)?)?;
    let d_t2 = l2 * scalarlib::rho0_ratio_sl2(m, ctx.powi(4) * z, ctx)?;
    let o = &kappa.ops.o;
    let oi = inverse(o)?;
    let w = ctx.powr(-kappa.ops.omega);
    let first = kron(o, &id) * kappa.r(SiteKind::V, w * z1, SiteKind::V, z2)? * kron(&oi, &id);
    let (d_first, r3) = scalar_ratio(&t1_form(kappa)?, &first)?;
    let second = kron(&id, o) * kappa.r(SiteKind::V, z1, SiteKind::V, w * z2)? * kron(&id, &oi);
    let (d_second, r4) = scalar_ratio(&shifted_form(kappa)?, &second)?;
    Ok(CrossingScalars {
        d_t1,
        d_t2,
        d_first,
        d_second,
        residual: r1.max(r2).max(r3).max(r4),
    })
}

/// Proportionality of the crossing forms at one point, with the extracted scalars.
pub fn check_crossing(hw: &RFamily, kappa: &RFamily, zetas: [C; 2], tol: f64) -> VerificationReport {
    let base = family_params(VerificationReport::new("crossing", tol), hw)
        .param("zeta1", zetas[0])
        .param("zeta2", zetas[1]);
    match crossing_scalars(hw, kappa, zetas) {
        Ok(cs) => base
            .scalar("D_t1", cs.d_t1)
            .scalar("D_t2", cs.d_t2)
            .scalar("d_first", cs.d_first)
            .scalar("d_second", cs.d_second)
            .scalar("loop", cs.d_first * cs.d_second)
            .finish(Ok(cs.residual)),
        Err(e) => base.finish(Err(e)),
    }
}

fn spread(values: &[C]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mean: C = values.iter().sum::<C>() / values.len() as f64;
    let dev = values.iter().map(|v| (v - mean).norm()).fold(0.0, f64::max);
    dev / mean.norm().max(f64::MIN_POSITIVE)
}

/// Over several points: relative spread of `D_t1`, `D_t2` (hw family), and the
/// distance of `d_first`, `d_second` from `(−1)^m` and of their product from `1`.
pub fn check_crossing_constancy(
    hw: &RFamily,
    kappa: &RFamily,
    samples: &[[C; 2]],
    spread_tol: f64,
    d_tol: f64,
) -> Vec<VerificationReport> {
    let mut all = Vec::new();
    for z in samples {
        match crossing_scalars(hw, kappa, *z) {
            Ok(cs) => all.push(cs),
            Err(e) => {
                return ["crossing_spread", "crossing_kappa_d", "crossing_loop"]
                    .iter()
                    .map(|n| family_params(VerificationReport::new(n, d_tol), hw).finish(Err(e.clone())))
                    .collect()
            }
        }
    }
    let t1: Vec<C> = all.iter().map(|c| c.d_t1).collect();
    let t2: Vec<C> = all.iter().map(|c| c.d_t2).collect();
    let mean = |v: &[C]| v.iter().sum::<C>() / v.len().max(1) as f64;
    let sign = C::new(hw.d_sign(), 0.0);
    let d_dev = all
        .iter()
        .map(|c| (c.d_first - sign).norm().max((c.d_second - sign).norm()))
        .fold(0.0, f64::max);
    let loop_dev = all
        .iter()
        .map(|c| (c.d_first * c.d_second - ONE).norm())
        .fold(0.0, f64::max);
    let n = samples.len();
    let spread_r = family_params(VerificationReport::new("crossing_spread", spread_tol), hw)
        .param("samples", n)
        .scalar("mean_D_t1", mean(&t1))
        .scalar("mean_D_t2", mean(&t2))
        .finish(Ok(spread(&t1).max(spread(&t2))));
    let d_r = family_params(VerificationReport::new("crossing_kappa_d", d_tol), kappa)
        .param("samples", n)
        .scalar("expected", sign)
        .scalar("d_first", all.first().map(|c| c.d_first).unwrap_or(ONE))
        .scalar("d_second", all.first().map(|c| c.d_second).unwrap_or(ONE))
        .finish(Ok(d_dev));
    let loop_r = family_params(VerificationReport::new("crossing_loop", d_tol), kappa)
        .param("samples", n)
        .finish(Ok(loop_dev));
    alloc::vec![spread_r, d_r, loop_r]
}

fn commutator_report(
    name: &str,
    f: &RFamily,
    kinds: [SiteKind; 2],
    zetas: [C; 2],
    tol: f64,
    a: Result<Mat>,
) -> VerificationReport {
    let run = || -> Result<f64> {
        let a = a?;
        let r = f.r(kinds[0], zetas[0], kinds[1], zetas[1])?;
        Ok(rel_commutator(&a, &r))
    };
    family_params(VerificationReport::new(name, tol), f)
        .param("kinds", kinds_label(&kinds))
        .param("zeta1", zetas[0])
        .param("zeta2", zetas[1])
        .finish(run())
}

/// `[(X_{W_1}⊗X_{W_2}), R_{W_1|W_2}] = 0`.
pub fn check_invariance_x(f: &RFamily, kinds: [SiteKind; 2], zetas: [C; 2], tol: f64) -> VerificationReport {
    let a = kron(f.ops.x_for(kinds[0]), f.ops.x_for(kinds[1]));
    commutator_report("invariance_x", f, kinds, zetas, tol, Ok(a))
}

/// `[(A^α_{W_1}⊗A^α_{W_2}), R_{W_1|W_2}] = 0`.
pub fn check_invariance_a(f: &RFamily, kinds: [SiteKind; 2], zetas: [C; 2], tol: f64) -> VerificationReport {
    let a = kron(f.ops.a_for(kinds[0]), f.ops.a_for(kinds[1]));
    commutator_report("invariance_a", f, kinds, zetas, tol, Ok(a)).param("alpha", f.ops.alpha)
}

/// Invariance of `X̃ = Oᵗ X` as a bilinear form on `V`:
/// `(X̃⊗X̃) R_{V|V} = R_{V|V}^{t_1 t_2} (X̃⊗X̃)`, together with
/// `[(X̃^{−1})ᵗX̃ ⊗ (X̃^{−1})ᵗX̃, R_{V|V}] = 0`.
pub fn check_invariance_xtilde(f: &RFamily, zetas: [C; 2], tol: f64) -> VerificationReport {
    let run = || -> Result<f64> {
        let d = f.dim();
        let r = f.r(SiteKind::V, zetas[0], SiteKind::V, zetas[1])?;
        let xt = &f.ops.xtilde;
        let xx = kron(xt, xt);
        let rtt = partial_transpose(&partial_transpose(&r, d, d, Factor::First)?, d, d, Factor::Second)?;
        let form = rel_diff(&(&xx * &r), &(&rtt * &xx));
        let g = inverse(xt)?.transpose() * xt;
        Ok(form.max(rel_commutator(&kron(&g, &g), &r)))
    };
    family_params(VerificationReport::new("invariance_xtilde", tol), f)
        .param("zeta1", zetas[0])
        .param("zeta2", zetas[1])
        .finish(run())
}

/// Scalar function families covered by the scalar checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarFamily {
    /// Spin-`m` `sl2`.
    Sl2(u32),
    /// Fundamental `sl(l+1)`.
    Sllpo(u32),
}

impl ScalarFamily {
    pub fn label(&self) -> String {
        match self {
            ScalarFamily::Sl2(m) => format!("sl2/m={m}"),
            ScalarFamily::Sllpo(l) => format!("sl{}/fund", l + 1),
        }
    }

    pub fn kappa(&self, z: C, ctx: &QContext) -> Result<C> {
        match *self {
            ScalarFamily::Sl2(m) => scalarlib::kappa_sl2(m, z, ctx),
            ScalarFamily::Sllpo(l) => scalarlib::kappa_sllpo(l, z, ctx),
        }
    }

    pub fn rho0(&self, z: C, ctx: &QContext) -> Result<C> {
        match *self {
            ScalarFamily::Sl2(m) => scalarlib::rho0_sl2(m, z, ctx),
            ScalarFamily::Sllpo(l) => scalarlib::rho0_sllpo(l, z, ctx),
        }
    }

    /// The constant value of the difference equation.
    pub fn expected_d(&self) -> C {
        match *self {
            ScalarFamily::Sl2(m) if m % 2 == 1 => -ONE,
            _ => ONE,
        }
    }
}

fn scalar_report(name: &str, fam: ScalarFamily, z: C, tol: f64) -> VerificationReport {
    VerificationReport::new(name, tol)
        .param("family", fam.label())
        .param("z", z)
}

/// `κ(1) = 1` and `κ(z) κ(1/z) = 1`.
pub fn check_kappa_reflection(fam: ScalarFamily, z: C, ctx: &QContext, tol: f64) -> VerificationReport {
    let run = || -> Result<(C, C)> {
        let k1 = fam.kappa(ONE, ctx)?;
        let prod = fam.kappa(z, ctx)? * fam.kappa(z.inv(), ctx)?;
        Ok((k1, prod))
    };
    let base = scalar_report("kappa_reflection", fam, z, tol);
    match run() {
        Ok((k1, prod)) => base
            .scalar("kappa_at_1", k1)
            .scalar("reflection_product", prod)
            .finish(Ok((k1 - ONE).norm().max((prod - ONE).norm()))),
        Err(e) => base.finish(Err(e)),
    }
}

/// The difference equation for `ρ⁰ κ`, constant `(−1)^m` for `sl2` and `1` for `sl(l+1)`.
pub fn check_difference_equation(fam: ScalarFamily, z: C, ctx: &QContext, tol: f64) -> VerificationReport {
    let probe = match fam {
        ScalarFamily::Sl2(m) => scalarlib::kappa_difference_check_sl2(m, z, ctx),
        ScalarFamily::Sllpo(l) => scalarlib::kappa_difference_check_sllpo(l, z, ctx),
    };
    let base = scalar_report("difference_equation", fam, z, tol);
    match probe {
        Ok(p) => base
            .scalar("expected", p.expected)
            .scalar("all_inverse", p.all_inverse)
            .scalar("mixed", p.mixed)
            .finish(Ok(p.residual)),
        Err(e) => base.finish(Err(e)),
    }
}

/// Finite `ρ⁰` ratio formulas against quotients of the infinite products.
pub fn check_rho0_ratio(fam: ScalarFamily, z: C, ctx: &QContext, tol: f64) -> VerificationReport {
    let run = || -> Result<(C, C)> {
        match fam {
            ScalarFamily::Sl2(m) => {
                let zs = ctx.powi(-2) * z;
                let direct = (fam.rho0(zs, ctx)? * fam.rho0(z, ctx)?).inv();
                Ok((scalarlib::rho0_ratio_sl2(m, z, ctx)?, direct))
            }
            ScalarFamily::Sllpo(l) => {
                let zs = ctx.powi(-2 * (l as i32 + 1)) * z;
                let direct = fam.rho0(zs, ctx)? / fam.rho0(z, ctx)?;
                Ok((scalarlib::rho0_ratio_sllpo(l, z, ctx)?, direct))
            }
        }
    };
    let base = scalar_report("rho0_ratio", fam, z, tol);
    match run() {
        Ok((finite, direct)) => base
            .scalar("finite", finite)
            .scalar("product", direct)
            .finish(Ok((finite - direct).norm() / direct.norm())),
        Err(e) => base.finish(Err(e)),
    }
}

/// The finite `κ` for even `m = 2k` against the product form.
pub fn check_even_kappa(k: u32, z: C, ctx: &QContext, tol: f64) -> VerificationReport {
    let fam = ScalarFamily::Sl2(2 * k);
    let run = || -> Result<(C, C)> { Ok((scalarlib::kappa_sl2_even_rational(k, z, ctx)?, fam.kappa(z, ctx)?)) };
    let base = scalar_report("even_kappa", fam, z, tol);
    match run() {
        Ok((finite, product)) => base
            .scalar("finite", finite)
            .scalar("product", product)
            .finish(Ok((finite - product).norm() / product.norm())),
        Err(e) => base.finish(Err(e)),
    }
}

/// `ρ⁰` for `sl(l+1)` from the `F`-series against the product form.
pub fn check_rho0_series(l: u32, z: C, ctx: &QContext, tol: f64) -> VerificationReport {
    let fam = ScalarFamily::Sllpo(l);
    let run = || -> Result<(C, C)> { Ok((scalarlib::rho0_sllpo_series(l, z, ctx)?, fam.rho0(z, ctx)?)) };
    let base = scalar_report("rho0_series", fam, z, tol);
    match run() {
        Ok((series, product)) => base
            .scalar("series", series)
            .scalar("product", product)
            .finish(Ok((series - product).norm() / product.norm())),
        Err(e) => base.finish(Err(e)),
    }
}

/// Samples `z` in the annulus `0.6 < |z| < 0.95`, a region where every product
/// and series involved converges and no pole lies within `10⁻³`.
pub fn sample_scalar_z(rng: &mut ChaCha8Rng, fam: ScalarFamily, ctx: &QContext) -> C {
    loop {
        let r = rng.random_range(0.6..0.95);
        let t = rng.random_range(-0.9 * core::f64::consts::PI..0.9 * core::f64::consts::PI);
        let z = C::from_polar(r, t);
        let probes = [
            fam.rho0(z, ctx),
            fam.rho0(ctx.powi(-2) * z, ctx),
            fam.kappa(z, ctx),
            fam.kappa(z.inv(), ctx),
        ];
        if probes
            .iter()
            .all(|p| p.as_ref().map(|v| v.norm() > 1e-3 && v.norm() < 1e3).unwrap_or(false))
        {
            return z;
        }
    }
}

fn chain_params(r: VerificationReport, f: &RFamily, chain: &ChainSpec) -> VerificationReport {
    family_params(r, f)
        .param("N", chain.len())
        .param("kinds", kinds_label(&chain.kinds))
        .param("p", chain.p)
}

/// Both displayed forms of `Λ_{𝒲 i}` agree.
pub fn check_lambda_forms(f: &RFamily, chain: &ChainSpec, i: usize, tol: f64) -> VerificationReport {
    chain_params(VerificationReport::new("lambda_forms", tol), f, chain)
        .param("i", i)
        .finish(qkzengine::lambda_forms_residual(f, chain, i))
}

/// `[(Δ_j⊗Δ_k), R_{W_j|W_k}] = 0`.
pub fn check_ddr(f: &RFamily, chain: &ChainSpec, j: usize, k: usize, tol: f64) -> VerificationReport {
    chain_params(VerificationReport::new("ddr", tol), f, chain)
        .param("j", j)
        .param("k", k)
        .finish(qkzengine::ddr_residual(f, chain, j, k))
}

/// `Λ_i(η_j→pη_j) Λ_j = Λ_j(η_i→pη_i) Λ_i`.
pub fn check_qkz_compatibility(f: &RFamily, chain: &ChainSpec, i: usize, j: usize, tol: f64) -> VerificationReport {
    chain_params(VerificationReport::new("qkz_compatibility", tol), f, chain)
        .param("i", i)
        .param("j", j)
        .finish(qkzengine::compatibility_residual(f, chain, i, j))
}

/// Transport of `phi` along two words of one permutation gives one tensor.
pub fn check_braid_welldefined(
    f: &RFamily,
    chain: &ChainSpec,
    phi: &Mat,
    word1: &[usize],
    word2: &[usize],
    tol: f64,
) -> VerificationReport {
    let run = || -> Result<f64> {
        let a = qkzengine::transport_phi(f, chain, phi, word1)?;
        let b = qkzengine::transport_phi(f, chain, phi, word2)?;
        if a.perm != b.perm {
            return Err(Error::Config(format!(
                "words {word1:?} and {word2:?} give different permutations"
            )));
        }
        Ok(rel_diff(&a.phi, &b.phi))
    };
    let w = |w: &[usize]| w.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(",");
    chain_params(VerificationReport::new("braid_welldefined", tol), f, chain)
        .param("word1", w(word1))
        .param("word2", w(word2))
        .finish(run())
}
