//! R-operators: intertwiner solves, highest-weight and `κ` normalization, and
//! the normalized family used by the qKZ layer.

use alloc::collections::BTreeMap;
use core::cell::RefCell;

use crate::error::{Error, Result};
use crate::linalg::{flip, fro, inverse, inverse_condition, kron, Mat, C, ZERO};
use crate::repkit::{coproduct_image, DistinguishedOps, EvalRep, Generator, SiteKind, SiteModule};
use crate::scalarlib::{kappa_sl2, rho0_shift_quotient_sl2, QContext};
use crate::tensorops::{partial_transpose, Factor};

/// Minimum ratio of the two smallest singular values of the commutant system.
pub const GAP_THRESHOLD: f64 = 1e6;
/// Minimum `σ_min / σ_max` of an intertwiner between simple modules.
pub const INV_COND_THRESHOLD: f64 = 1e-9;
/// Minimum relative size of the highest-weight entry.
pub const HW_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Normalization {
    Hw,
    Kappa,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RRequest {
    pub site1: SiteModule,
    pub site2: SiteModule,
    pub normalization: Normalization,
}

impl RRequest {
    pub fn new(rep: &EvalRep, k1: SiteKind, z1: C, k2: SiteKind, z2: C, normalization: Normalization) -> Self {
        Self {
            site1: SiteModule::new(k1, rep, z1),
            site2: SiteModule::new(k2, rep, z2),
            normalization,
        }
    }

    fn ctx(&self) -> &QContext {
        &self.site1.rep.ctx
    }

    /// `z = (ζ_1/ζ_2)^s`.
    pub fn z(&self) -> C {
        (self.site1.zeta / self.site2.zeta).powi(self.site1.rep.grading.s() as i32)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RResult {
    pub r: Mat,
    pub rcheck: Mat,
    pub nullspace_gap: f64,
    pub inv_cond: f64,
    pub norm_scalar_applied: C,
    /// `‖Ř A_g − B_g Ř‖ / ‖Ř‖` for `e0, e1, f0, f1, qh0, qh1`.
    pub residuals: [f64; 6],
}

impl RResult {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }

    fn rescale(mut self, s: C) -> Self {
        self.r *= s;
        self.rcheck *= s;
        self.norm_scalar_applied *= s;
        self
    }
}

/// Intertwining residuals of `rcheck : V_1⊗V_2 → V_2⊗V_1`.
pub fn intertwining_residuals(rcheck: &Mat, site1: &SiteModule, site2: &SiteModule) -> [f64; 6] {
    let norm = fro(rcheck);
    let mut out = [0.0; 6];
    for (k, g) in Generator::standard().iter().enumerate() {
        let a = coproduct_image(*g, site1, site2);
        let b = coproduct_image(*g, site2, site1);
        out[k] = fro(&(rcheck * a - b * rcheck)) / norm;
    }
    out
}

/// Solves `Ř (φ_1⊗φ_2)Δ(a) = (φ_2⊗φ_1)Δ(a) Ř` for the unique intertwiner up to scale.
pub fn solve_intertwiner(req: &RRequest) -> Result<RResult> {
    let (s1, s2) = (&req.site1, &req.site2);
    let (d1, d2) = (s1.dim(), s2.dim());
    let d = d1 * d2;
    let wa = coproduct_image(Generator::K1(crate::linalg::ONE), s1, s2);
    let wb = coproduct_image(Generator::K1(crate::linalg::ONE), s2, s1);
    let mut index = alloc::vec![usize::MAX; d * d];
    let mut unknowns = alloc::vec::Vec::new();
    for r in 0..d {
        for c in 0..d {
            let (x, y) = (wb[(r, r)], wa[(c, c)]);
            if (x - y).norm() <= 1e-9 * x.norm().max(y.norm()) {
                index[r * d + c] = unknowns.len();
                unknowns.push((r, c));
            }
        }
    }
    let nu = unknowns.len();
    let gens = [Generator::E0, Generator::E1, Generator::F0, Generator::F1];
    let mut rows: alloc::vec::Vec<alloc::vec::Vec<C>> = alloc::vec::Vec::new();
    for g in gens {
        let a = coproduct_image(g, s1, s2);
        let b = coproduct_image(g, s2, s1);
        for r in 0..d {
            for c in 0..d {
                let mut row = alloc::vec![ZERO; nu];
                let mut any = false;
                for k in 0..d {
                    let u = index[r * d + k];
                    if u != usize::MAX && a[(k, c)] != ZERO {
                        row[u] += a[(k, c)];
                        any = true;
                    }
                    let u = index[k * d + c];
                    if u != usize::MAX && b[(r, k)] != ZERO {
                        row[u] -= b[(r, k)];
                        any = true;
                    }
                }
                if any {
                    rows.push(row);
                }
            }
        }
    }
    let n_rows = rows.len().max(nu);
    let mut l = Mat::zeros(n_rows, nu);
    for (i, row) in rows.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            l[(i, j)] = *v;
        }
    }
    let svd = l.svd(false, true);
    let v_t = svd.v_t.ok_or(Error::Singular)?;
    let mut order: alloc::vec::Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    let smin = svd.singular_values[order[0]];
    let gap = if order.len() < 2 || smin == 0.0 {
        f64::INFINITY
    } else {
        svd.singular_values[order[1]] / smin
    };
    let mut rcheck = Mat::zeros(d, d);
    for (u, &(r, c)) in unknowns.iter().enumerate() {
        rcheck[(r, c)] = v_t[(order[0], u)].conj();
    }
    let inv_cond = inverse_condition(&rcheck);
    if gap < GAP_THRESHOLD || inv_cond < INV_COND_THRESHOLD {
        return Err(Error::DegeneratePoint { gap, inv_cond });
    }
    let residuals = intertwining_residuals(&rcheck, s1, s2);
    let r = flip(d2, d1) * &rcheck;
    Ok(RResult {
        r,
        rcheck,
        nullspace_gap: gap,
        inv_cond,
        norm_scalar_applied: crate::linalg::ONE,
        residuals,
    })
}

/// Rescales so that `R(v_0⊗v_0) = v_0⊗v_0` for the highest weight vectors.
pub fn normalize_hw(res: RResult, req: &RRequest) -> Result<RResult> {
    let d2 = req.site2.dim();
    let c = req.site1.hw_index() * d2 + req.site2.hw_index();
    let entry = res.r[(c, c)];
    let rel = entry.norm() / fro(&res.r);
    if rel < HW_THRESHOLD {
        return Err(Error::HwComponentZero(rel));
    }
    Ok(res.rescale(entry.inv()))
}

/// `κ^{−1}` on same-kind pairs and `κ` on mixed pairs, `κ = κ(ζ_{12}^s)`.
pub fn apply_kappa(res: RResult, req: &RRequest) -> Result<RResult> {
    let kappa = kappa_sl2(req.site1.rep.m as u32, req.z(), req.ctx())?;
    let s = if req.site1.kind == req.site2.kind {
        kappa.inv()
    } else {
        kappa
    };
    Ok(res.rescale(s))
}

/// The full pipeline for one request: solve, hw-normalize, optionally `κ`.
pub fn solve_normalized(req: &RRequest) -> Result<RResult> {
    let res = normalize_hw(solve_intertwiner(req)?, req)?;
    match req.normalization {
        Normalization::Hw => Ok(res),
        Normalization::Kappa => apply_kappa(res, req),
    }
}

/// Cache key: kinds, module data, spectral parameters, normalization and `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RKey {
    pub kinds: (SiteKind, SiteKind),
    pub m: usize,
    pub dual_order: u8,
    pub grading: (u32, u32),
    pub zeta1: (u64, u64),
    pub zeta2: (u64, u64),
    pub normalization: Normalization,
    pub q: (u64, u64),
}

fn bits(z: C) -> (u64, u64) {
    (z.re.to_bits(), z.im.to_bits())
}

impl RKey {
    pub fn new(rep: &EvalRep, k1: SiteKind, z1: C, k2: SiteKind, z2: C, normalization: Normalization) -> Self {
        Self {
            kinds: (k1, k2),
            m: rep.m,
            dual_order: rep.dual_order(),
            grading: (rep.grading.s0, rep.grading.s1),
            zeta1: bits(z1),
            zeta2: bits(z2),
            normalization,
            q: bits(rep.ctx.q()),
        }
    }
}

/// Memoization of normalized R-operators.
pub trait RCache {
    fn get(&self, key: &RKey) -> Option<Mat>;
    fn put(&self, key: RKey, value: Mat);
}

pub struct NoCache;

impl RCache for NoCache {
    fn get(&self, _: &RKey) -> Option<Mat> {
        None
    }
    fn put(&self, _: RKey, _: Mat) {}
}

/// Single-threaded cache.
#[derive(Default)]
pub struct LocalCache {
    map: RefCell<BTreeMap<RKey, Mat>>,
}

impl LocalCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.borrow().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl RCache for LocalCache {
    fn get(&self, key: &RKey) -> Option<Mat> {
        self.map.borrow().get(key).cloned()
    }
    fn put(&self, key: RKey, value: Mat) {
        self.map.borrow_mut().insert(key, value);
    }
}

/// Normalized R-operators `R_{W_1|W_2}(ζ_1|ζ_2)` for all kind pairs.
///
/// Same-kind pairs come from hw-normalized intertwiner solves (times `κ^{−1}`
/// in [`Normalization::Kappa`]). Mixed pairs follow the `ρ⁰` convention:
/// `R_{V*|V} = ((R_{V|V})^{−1})^{t_1}` and
/// `R_{V|V*}(ζ_1|ζ_2) = c(z) [(1⊗X) R_{V|V}(ζ_1|q^{−ε}ζ_2)^{−1} (1⊗X^{−1})]^{t_2}`
/// with `c = ρ⁰(z)/ρ⁰(q⁴z)` for `Hw` and `c = 1` for `Kappa`.
pub struct RFamily<'a> {
    pub rep: EvalRep,
    pub ops: DistinguishedOps,
    pub normalization: Normalization,
    cache: &'a dyn RCache,
}

impl<'a> RFamily<'a> {
    pub fn new(rep: &EvalRep, alpha: C, normalization: Normalization, cache: &'a dyn RCache) -> Self {
        Self {
            rep: *rep,
            ops: DistinguishedOps::new(rep, alpha),
            normalization,
            cache,
        }
    }

    pub fn ctx(&self) -> &QContext {
        &self.rep.ctx
    }

    pub fn dim(&self) -> usize {
        self.rep.dim()
    }

    /// `z = (ζ_1/ζ_2)^s`.
    pub fn z(&self, z1: C, z2: C) -> C {
        (z1 / z2).powi(self.rep.grading.s() as i32)
    }

    /// `(−1)^m`.
    pub fn d_sign(&self) -> f64 {
        if self.rep.m.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    pub fn r(&self, k1: SiteKind, z1: C, k2: SiteKind, z2: C) -> Result<Mat> {
        let key = RKey::new(&self.rep, k1, z1, k2, z2, self.normalization);
        if let Some(m) = self.cache.get(&key) {
            return Ok(m);
        }
        let value = match (k1, k2) {
            (SiteKind::V, SiteKind::V) | (SiteKind::VDual, SiteKind::VDual) => self.same_kind(k1, z1, z2, true)?,
            (SiteKind::VDual, SiteKind::V) => self.dual_v(z1, z2)?,
            (SiteKind::V, SiteKind::VDual) => self.v_dual(z1, z2)?,
        };
        self.cache.put(key, value.clone());
        Ok(value)
    }

    /// `Ř = P R`.
    pub fn rcheck(&self, k1: SiteKind, z1: C, k2: SiteKind, z2: C) -> Result<Mat> {
        let d = self.dim();
        Ok(flip(d, d) * self.r(k1, z1, k2, z2)?)
    }

    fn same_kind(&self, kind: SiteKind, z1: C, z2: C, allow_crossing: bool) -> Result<Mat> {
        let req = RRequest::new(&self.rep, kind, z1, kind, z2, self.normalization);
        match solve_normalized(&req) {
            Ok(res) => Ok(res.r),
            Err(Error::DegeneratePoint { .. } | Error::HwComponentZero(_) | Error::Pole(_))
                if allow_crossing && self.normalization == Normalization::Kappa =>
            {
                self.same_kind_by_crossing(kind, z1, z2)
            }
            Err(e) => Err(e),
        }
    }

    /// `R^κ_{V|V}(ζ_1|ζ_2) = d (O^{−1}⊗1) ((R^κ_{V|V}(q^ω ζ_1|ζ_2))^{−1})^{t_1} (O⊗1)`
    /// and `R^κ_{V*|V*} = (R^κ_{V|V})^t`.
    fn same_kind_by_crossing(&self, kind: SiteKind, z1: C, z2: C) -> Result<Mat> {
        let d = self.dim();
        if kind == SiteKind::VDual {
            return Ok(self.same_kind(SiteKind::V, z1, z2, true)?.transpose());
        }
        let shifted = self.same_kind(SiteKind::V, self.ctx().powr(self.ops.omega) * z1, z2, false)?;
        let t = partial_transpose(&inverse(&shifted)?, d, d, Factor::First)?;
        let id = Mat::identity(d, d);
        let o = kron(&self.ops.o, &id);
        let oi = kron(&inverse(&self.ops.o)?, &id);
        Ok(oi * t * o * C::new(self.d_sign(), 0.0))
    }

    fn dual_v(&self, z1: C, z2: C) -> Result<Mat> {
        let d = self.dim();
        let r = self.r(SiteKind::V, z1, SiteKind::V, z2)?;
        partial_transpose(&inverse(&r)?, d, d, Factor::First)
    }

    fn v_dual(&self, z1: C, z2: C) -> Result<Mat> {
        let d = self.dim();
        let shifted = self.ctx().powr(-self.ops.epsilon) * z2;
        let r = self.r(SiteKind::V, z1, SiteKind::V, shifted)?;
        let id = Mat::identity(d, d);
        let x = kron(&id, &self.ops.x);
        let xi = kron(&id, &inverse(&self.ops.x)?);
        let t = partial_transpose(&(x * inverse(&r)? * xi), d, d, Factor::Second)?;
        let c = match self.normalization {
            Normalization::Hw => rho0_shift_quotient_sl2(self.rep.m as u32, self.z(z1, z2), self.ctx())?,
            Normalization::Kappa => crate::linalg::ONE,
        };
        Ok(t * c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, rel_diff, ONE};
    use crate::repkit::{build_eval_rep, GradingChoice};
    use crate::tensorops::scalar_ratio;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const KINDS: [SiteKind; 2] = [SiteKind::V, SiteKind::VDual];

    fn ctx() -> QContext {
        QContext::new(C::new(0.6, 0.15)).unwrap()
    }

    fn zeta(rng: &mut ChaCha8Rng) -> C {
        C::from_polar(rng.random_range(0.5..2.0), rng.random_range(-3.1..3.1))
    }

    /// Intertwiner from the full `d²`-unknown system assembled with Kronecker
    /// products, `vec(ŘA) = (I⊗Aᵗ) vec Ř` and `vec(BŘ) = (B⊗I) vec Ř`.
    fn brute_force_rcheck(s1: &SiteModule, s2: &SiteModule) -> Mat {
        let d = s1.dim() * s2.dim();
        let id = identity(d);
        let mut blocks = alloc::vec::Vec::new();
        for g in Generator::standard() {
            let a = coproduct_image(g, s1, s2);
            let b = coproduct_image(g, s2, s1);
            blocks.push(kron(&id, &a.transpose()) - kron(&b, &id));
        }
        let mut l = Mat::zeros(6 * d * d, d * d);
        for (k, b) in blocks.iter().enumerate() {
            l.view_mut((k * d * d, 0), (d * d, d * d)).copy_from(b);
        }
        let svd = l.svd(false, true);
        let v_t = svd.v_t.unwrap();
        let k = (0..d * d)
            .min_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]))
            .unwrap();
        Mat::from_fn(d, d, |r, c| v_t[(k, r * d + c)].conj())
    }

    #[test]
    fn spin_half_initial_condition() {
        let c = ctx();
        let rep = build_eval_rep(1, GradingChoice::symmetric(), &c);
        let z = C::from_polar(1.3, 0.4);
        let req = RRequest::new(&rep, SiteKind::V, z, SiteKind::V, z, Normalization::Hw);
        let res = solve_normalized(&req).unwrap();
        assert!(rel_diff(&res.rcheck, &identity(4)) < 1e-13);
    }

    #[test]
    fn matches_brute_force_solve() {
        let c = ctx();
        let rep = build_eval_rep(1, GradingChoice::symmetric(), &c);
        let (z1, z2) = (C::from_polar(0.9, 0.7), C::from_polar(1.4, -0.2));
        for (k1, k2) in [(SiteKind::V, SiteKind::V), (SiteKind::VDual, SiteKind::V)] {
            let req = RRequest::new(&rep, k1, z1, k2, z2, Normalization::Hw);
            let res = solve_intertwiner(&req).unwrap();
            let brute = brute_force_rcheck(&req.site1, &req.site2);
            let (_, resid) = scalar_ratio(&res.rcheck, &brute).unwrap();
            assert!(resid < 1e-12);
        }
    }

    #[test]
    fn generic_solves_are_certified() {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for m in 1..=3 {
            let rep = build_eval_rep(m, GradingChoice::new(1, 2).unwrap(), &c);
            for k1 in KINDS {
                for k2 in KINDS {
                    let req = RRequest::new(&rep, k1, zeta(&mut rng), k2, zeta(&mut rng), Normalization::Hw);
                    let res = solve_normalized(&req).unwrap();
                    assert!(res.nullspace_gap > GAP_THRESHOLD, "m={m} gap {}", res.nullspace_gap);
                    assert!(res.max_residual() < 1e-11, "m={m} {:?}", res.residuals);
                }
            }
        }
    }

    #[test]
    fn degenerate_points_are_detected() {
        let c = QContext::new(C::new(0.7, 0.0)).unwrap();
        let rep = build_eval_rep(1, GradingChoice::symmetric(), &c);
        let z2 = C::new(1.1, 0.3);
        for k in [2, -2] {
            // ζ_{12}^2 = q^k
            let z1 = z2 * c.powr(k as f64 / 2.0);
            let req = RRequest::new(&rep, SiteKind::V, z1, SiteKind::V, z2, Normalization::Hw);
            assert!(solve_normalized(&req).is_err(), "k={k}");
            for t in [1e-2, -1e-2, 1e-3] {
                let z1 = z2 * (c.powr(k as f64) * (1.0 + t)).sqrt();
                let req = RRequest::new(&rep, SiteKind::V, z1, SiteKind::V, z2, Normalization::Hw);
                assert!(solve_normalized(&req).is_ok(), "k={k} t={t}");
            }
        }
    }

    #[test]
    fn depends_only_on_ratio() {
        let c = ctx();
        let rep = build_eval_rep(2, GradingChoice::new(2, 1).unwrap(), &c);
        let (z1, z2, nu) = (
            C::from_polar(0.8, 1.0),
            C::from_polar(1.5, -0.5),
            C::from_polar(1.7, 2.2),
        );
        for k1 in KINDS {
            for k2 in KINDS {
                let a = solve_normalized(&RRequest::new(&rep, k1, z1, k2, z2, Normalization::Kappa)).unwrap();
                let b = solve_normalized(&RRequest::new(&rep, k1, z1 * nu, k2, z2 * nu, Normalization::Kappa)).unwrap();
                assert!(rel_diff(&a.r, &b.r) < 1e-10);
            }
        }
    }

    #[test]
    fn independent_solves_are_unitary() {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for m in 1..=2 {
            let rep = build_eval_rep(m, GradingChoice::symmetric(), &c);
            for norm in [Normalization::Hw, Normalization::Kappa] {
                for k1 in KINDS {
                    for k2 in KINDS {
                        let (z1, z2) = (zeta(&mut rng), zeta(&mut rng));
                        let a = solve_normalized(&RRequest::new(&rep, k1, z1, k2, z2, norm)).unwrap();
                        let b = solve_normalized(&RRequest::new(&rep, k2, z2, k1, z1, norm)).unwrap();
                        let d = rel_diff(&(b.rcheck * a.rcheck), &identity((m + 1) * (m + 1)));
                        assert!(d < 1e-10, "m={m} {k1:?}{k2:?} {norm:?}: {d}");
                    }
                }
            }
        }
    }

    #[test]
    fn kappa_entries_are_rational_for_even_spin() {
        let c = ctx();
        let rep = build_eval_rep(2, GradingChoice::symmetric(), &c);
        let (z1, z2) = (C::from_polar(0.9, 0.3), C::from_polar(1.2, -0.4));
        let req = RRequest::new(&rep, SiteKind::V, z1, SiteKind::V, z2, Normalization::Kappa);
        let res = solve_normalized(&req).unwrap();
        let z = req.z();
        let k = crate::scalarlib::kappa_sl2_even_rational(1, z, &c).unwrap();
        assert!((res.r[(0, 0)] - k.inv()).norm() < 1e-11);
    }

    fn family(m: usize, g: GradingChoice, norm: Normalization, cache: &dyn RCache) -> RFamily<'_> {
        RFamily::new(&build_eval_rep(m, g, &ctx()), ZERO, norm, cache)
    }

    #[test]
    fn family_dual_dual_is_transpose() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for m in 1..=2 {
            let f = family(m, GradingChoice::new(1, 0).unwrap(), Normalization::Hw, &NoCache);
            let (z1, z2) = (zeta(&mut rng), zeta(&mut rng));
            let dd = f.r(SiteKind::VDual, z1, SiteKind::VDual, z2).unwrap();
            let vv = f.r(SiteKind::V, z1, SiteKind::V, z2).unwrap();
            assert!(rel_diff(&dd, &vv.transpose()) < 1e-11);
        }
    }

    #[test]
    fn family_crossing_fallback_matches_direct() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for m in 1..=2 {
            for g in [GradingChoice::symmetric(), GradingChoice::new(1, 0).unwrap()] {
                let f = family(m, g, Normalization::Kappa, &NoCache);
                let (z1, z2) = (zeta(&mut rng), zeta(&mut rng));
                let direct = f.r(SiteKind::V, z1, SiteKind::V, z2).unwrap();
                let crossed = f.same_kind_by_crossing(SiteKind::V, z1, z2).unwrap();
                assert!(rel_diff(&direct, &crossed) < 1e-10, "m={m}");
            }
        }
    }

    #[test]
    fn family_kappa_is_kappa_times_hw() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for m in 1..=2 {
            let g = GradingChoice::new(2, 1).unwrap();
            let hw = family(m, g, Normalization::Hw, &NoCache);
            let ka = family(m, g, Normalization::Kappa, &NoCache);
            let (z1, z2) = (zeta(&mut rng), zeta(&mut rng));
            let kappa = kappa_sl2(m as u32, hw.z(z1, z2), hw.ctx()).unwrap();
            for (k1, k2) in [(SiteKind::V, SiteKind::VDual), (SiteKind::VDual, SiteKind::V)] {
                let a = ka.r(k1, z1, k2, z2).unwrap();
                let b = hw.r(k1, z1, k2, z2).unwrap() * kappa;
                assert!(rel_diff(&a, &b) < 1e-10, "m={m} {k1:?}");
            }
        }
    }

    #[test]
    fn family_mixed_pairs_intertwine_and_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for m in 1..=2 {
            for norm in [Normalization::Hw, Normalization::Kappa] {
                let f = family(m, GradingChoice::new(1, 2).unwrap(), norm, &NoCache);
                let (z1, z2) = (zeta(&mut rng), zeta(&mut rng));
                for (k1, k2) in [(SiteKind::V, SiteKind::VDual), (SiteKind::VDual, SiteKind::V)] {
                    let rc = f.rcheck(k1, z1, k2, z2).unwrap();
                    let s1 = SiteModule::new(k1, &f.rep, z1);
                    let s2 = SiteModule::new(k2, &f.rep, z2);
                    let res = intertwining_residuals(&rc, &s1, &s2);
                    assert!(res.iter().all(|r| *r < 1e-11), "{res:?}");
                    let back = f.rcheck(k2, z2, k1, z1).unwrap();
                    let d = m + 1;
                    assert!(rel_diff(&(back * rc), &identity(d * d)) < 1e-10, "m={m} {norm:?}");
                }
            }
        }
    }

    #[test]
    fn cache_returns_identical_matrices() {
        let cache = LocalCache::new();
        let f = family(2, GradingChoice::symmetric(), Normalization::Kappa, &cache);
        let (z1, z2) = (C::new(0.8, 0.1), C::new(1.1, -0.3));
        let a = f.r(SiteKind::V, z1, SiteKind::VDual, z2).unwrap();
        assert!(!cache.is_empty());
        let b = f.r(SiteKind::V, z1, SiteKind::VDual, z2).unwrap();
        assert_eq!(a, b);
        let g = family(2, GradingChoice::symmetric(), Normalization::Kappa, &NoCache);
        assert_eq!(a, g.r(SiteKind::V, z1, SiteKind::VDual, z2).unwrap());
        let _ = ONE;
    }
}
