//! Reduction of the qKZ system on `2n` sites to the reduced qKZ equation for
//! `Ψ_n`, in the almost self-dual and the general setting.
//!
//! A chain of `2n` sites is evaluated on the mirrored arguments
//! `(ζ_1, …, ζ_n, sζ_n, …, sζ_1)` with `s = q^ω` (self-dual) or `s = q^ε`
//! (general). Sites are 0-based: slot `n + r` carries `sζ_{n−1−r}`.
//!
//! `Ψ` is the `d^n × d^n` matrix obtained by contracting the second half of
//! `Φ` with `Y = X̃` (self-dual) or `Y = X` (general), slot `2n−1−c` against
//! column site `c`.

use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::idsuite::VerificationReport;
use crate::linalg::{inverse, rel_diff, Mat, C};
use crate::qkzengine::{build_delta, lambda_op, ChainSpec, DeltaAssignment, DeltaSource};
use crate::repkit::{build_eval_rep, GradingChoice, SiteKind};
use crate::rsolve::{Normalization, RCache, RFamily};
use crate::scalarlib::QContext;
use crate::tensorops::{
    apply_pair, apply_pair_right, apply_single, apply_single_right, partial_transpose, permute_rows, Factor,
    Permutation,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionMode {
    SelfDual,
    General,
}

impl ReductionMode {
    pub fn label(&self) -> &'static str {
        match self {
            ReductionMode::SelfDual => "self_dual",
            ReductionMode::General => "general",
        }
    }
}

/// One reduction setting: mode, `n`, the representation and the twist `α`.
#[derive(Debug, Clone, Copy)]
pub struct ReductionCase {
    pub mode: ReductionMode,
    pub n: usize,
    pub m: usize,
    pub grading: GradingChoice,
    pub ctx: QContext,
    pub alpha: C,
    pub normalization: Normalization,
}

impl ReductionCase {
    /// The self-dual case needs `R_{V|V}` at `z = q^{−2}`, which only the
    /// `κ`-normalized family provides; it is used for both modes.
    pub fn new(
        mode: ReductionMode,
        n: usize,
        m: usize,
        grading: GradingChoice,
        ctx: QContext,
        alpha: C,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("n must be positive".into()));
        }
        if m == 0 {
            return Err(Error::Config("m must be positive".into()));
        }
        Ok(Self {
            mode,
            n,
            m,
            grading,
            ctx,
            alpha,
            normalization: Normalization::Kappa,
        })
    }

    pub fn family<'a>(&self, cache: &'a dyn RCache) -> RFamily<'a> {
        let rep = build_eval_rep(self.m, self.grading, &self.ctx);
        RFamily::new(&rep, self.alpha, self.normalization, cache)
    }

    /// The mirror shift `q^ω` or `q^ε`.
    pub fn mirror_shift(&self, f: &RFamily) -> C {
        match self.mode {
            ReductionMode::SelfDual => self.ctx.powr(f.ops.omega),
            ReductionMode::General => self.ctx.powr(f.ops.epsilon),
        }
    }

    /// The qKZ shift `p = q^{2ω}` or `q^ε`.
    pub fn p(&self, f: &RFamily) -> C {
        match self.mode {
            ReductionMode::SelfDual => self.ctx.powr(2.0 * f.ops.omega),
            ReductionMode::General => self.ctx.powr(f.ops.epsilon),
        }
    }

    pub fn second_kind(&self) -> SiteKind {
        match self.mode {
            ReductionMode::SelfDual => SiteKind::V,
            ReductionMode::General => SiteKind::VDual,
        }
    }

    pub fn kinds(&self) -> Vec<SiteKind> {
        let mut k = alloc::vec![SiteKind::V; self.n];
        k.extend(core::iter::repeat_n(self.second_kind(), self.n));
        k
    }

    /// `(ζ_1, …, ζ_n, sζ_n, …, sζ_1)`.
    pub fn args(&self, f: &RFamily, zetas: &[C]) -> Result<Vec<C>> {
        if zetas.len() != self.n {
            return Err(Error::Config(format!(
                "expected {} spectral parameters, got {}",
                self.n,
                zetas.len()
            )));
        }
        let s = self.mirror_shift(f);
        let mut a = zetas.to_vec();
        a.extend(zetas.iter().rev().map(|z| s * z));
        Ok(a)
    }

    /// The contraction operator `Y`.
    pub fn contraction(&self, f: &RFamily) -> Mat {
        match self.mode {
            ReductionMode::SelfDual => f.ops.xtilde.clone(),
            ReductionMode::General => f.ops.x.clone(),
        }
    }

    pub fn delta_assignment(&self) -> DeltaAssignment {
        match self.mode {
            ReductionMode::SelfDual => DeltaAssignment::new(DeltaSource::SelfDual { n: self.n }),
            ReductionMode::General => DeltaAssignment::new(DeltaSource::General),
        }
    }

    /// The `2n`-site chain on the given arguments.
    pub fn chain_on(&self, f: &RFamily, args: Vec<C>) -> Result<ChainSpec> {
        ChainSpec::new(
            self.kinds(),
            args,
            self.p(f),
            alloc::vec![self.delta_assignment(); 2 * self.n],
        )
    }

    pub fn chain(&self, f: &RFamily, zetas: &[C]) -> Result<ChainSpec> {
        self.chain_on(f, self.args(f, zetas)?)
    }

    fn base_report(&self, name: &str, tol: f64) -> VerificationReport {
        VerificationReport::new(name, tol)
            .param("mode", self.mode.label())
            .param("n", self.n)
            .param("m", self.m)
            .param("s0", self.grading.s0 as usize)
            .param("s1", self.grading.s1 as usize)
            .param("alpha", self.alpha)
    }
}

/// One factor of a composite, applied to the left of what is already there.
#[derive(Debug, Clone)]
pub enum Step {
    /// A two-site operator with its first factor on `first`.
    Pair {
        op: Mat,
        first: usize,
        second: usize,
    },
    Single {
        op: Mat,
        site: usize,
    },
    /// `P^{(site, site+1)}`.
    Swap {
        site: usize,
    },
}

impl Step {
    fn apply(&self, target: &mut Mat, dims: &[usize]) -> Result<()> {
        match self {
            Step::Pair { op, first, second } => apply_pair(target, dims, op, *first, *second),
            Step::Single { op, site } => apply_single(target, dims, op, *site),
            Step::Swap { site } => {
                *target = permute_rows(target, dims, &Permutation::sigma(*site, dims.len()))?.0;
                Ok(())
            }
        }
    }

    /// The same factor acting on `Ψ` through the mirrored contraction with `y`.
    /// Slots below `n` act on rows; slot `t ≥ n` acts on column site `2n−1−t`
    /// as `Y^{−1} opᵗ Y` from the right; `P^{(n−1,n)}` becomes a partial
    /// transpose of the last site, sandwiched between `Y^{−1}` and `Y`.
    fn apply_psi(&self, psi: &mut Mat, n: usize, y: &Mat, yinv: &Mat) -> Result<()> {
        let dims = alloc::vec![y.nrows(); n];
        let col = |t: usize| 2 * n - 1 - t;
        match self {
            Step::Pair { op, first, second } if *first < n && *second < n => {
                apply_pair(psi, &dims, op, *first, *second)
            }
            Step::Pair { op, first, second } if *first >= n && *second >= n => {
                let (a, b) = (col(*first), col(*second));
                apply_single_right(psi, &dims, yinv, a)?;
                apply_single_right(psi, &dims, yinv, b)?;
                apply_pair_right(psi, &dims, &op.transpose(), a, b)?;
                apply_single_right(psi, &dims, y, a)?;
                apply_single_right(psi, &dims, y, b)
            }
            Step::Single { op, site } if *site < n => apply_single(psi, &dims, op, *site),
            Step::Single { op, site } => {
                let a = col(*site);
                apply_single_right(psi, &dims, yinv, a)?;
                apply_single_right(psi, &dims, &op.transpose(), a)?;
                apply_single_right(psi, &dims, y, a)
            }
            Step::Swap { site } if *site + 1 == n => {
                let d = y.nrows();
                let rest = psi.nrows() / d;
                apply_single_right(psi, &dims, yinv, n - 1)?;
                *psi = partial_transpose(psi, rest, d, Factor::Second)?;
                apply_single_right(psi, &dims, y, n - 1)
            }
            _ => Err(Error::Config(format!("{self:?} has no Ψ form for n = {n}"))),
        }
    }
}

/// Applies `steps` in order to the identity on `dims`.
pub fn assemble(steps: &[Step], dims: &[usize]) -> Result<Mat> {
    let total: usize = dims.iter().product();
    let mut m = Mat::identity(total, total);
    for s in steps {
        s.apply(&mut m, dims)?;
    }
    Ok(m)
}

/// Applies `steps` in order to `Ψ`.
pub fn apply_steps_psi(steps: &[Step], psi: &Mat, n: usize, y: &Mat) -> Result<Mat> {
    let yinv = inverse(y)?;
    let mut out = psi.clone();
    for s in steps {
        s.apply_psi(&mut out, n, y, &yinv)?;
    }
    Ok(out)
}

/// One block `R^{(n+1..2n−1, n)} P^{(n−1,n)} Δ^{(n−1)} R^{(0..n−2, n−1)}`
/// (0-based) as steps in application order. The moving site carries
/// `kind_a` and `eta` before the swap and `eta_after` behind it; `left` holds
/// the first-half kinds and arguments and `right` the second-half ones.
fn block_steps(
    f: &RFamily,
    n: usize,
    left: (&[SiteKind], &[C]),
    moving: (SiteKind, C, C),
    right: (&[SiteKind], &[C]),
    delta: &Mat,
) -> Result<Vec<Step>> {
    let (kind, eta, eta_after) = moving;
    let mut steps = Vec::new();
    for k in (0..n - 1).rev() {
        steps.push(Step::Pair {
            op: f.r(left.0[k], left.1[k], kind, eta)?,
            first: k,
            second: n - 1,
        });
    }
    steps.push(Step::Single {
        op: delta.clone(),
        site: n - 1,
    });
    steps.push(Step::Swap { site: n - 1 });
    for j in (n + 1..2 * n).rev() {
        steps.push(Step::Pair {
            op: f.r(right.0[j - n - 1], right.1[j - n - 1], kind, eta_after)?,
            first: j,
            second: n,
        });
    }
    Ok(steps)
}

/// Steps of the self-dual right-hand side
/// `R^{(n+2,n+1)}…R^{(2n,n+1)} P^{(n,n+1)} Δ^{(n)}(ζ_n) R^{(1,n)}…R^{(n−1,n)}`.
pub fn rhs_steps_selfdual(case: &ReductionCase, f: &RFamily, zetas: &[C]) -> Result<Vec<Step>> {
    let n = case.n;
    let a = case.args(f, zetas)?;
    let w = case.mirror_shift(f);
    let kinds = case.kinds();
    let zn = zetas[n - 1];
    let delta = build_delta(&case.delta_assignment(), f, SiteKind::V, zn)?;
    block_steps(
        f,
        n,
        (&kinds[..n], &a[..n]),
        (SiteKind::V, zn, w * w * zn),
        (&kinds[n + 1..], &a[n + 1..]),
        &delta,
    )
}

/// Steps of the general right-hand side (two blocks).
pub fn rhs_steps_general(case: &ReductionCase, f: &RFamily, zetas: &[C]) -> Result<Vec<Step>> {
    let n = case.n;
    let a = case.args(f, zetas)?;
    let e = case.mirror_shift(f);
    let zn = zetas[n - 1];
    let vs = alloc::vec![SiteKind::V; n];
    let ds = alloc::vec![SiteKind::VDual; n];
    let delta = build_delta(&case.delta_assignment(), f, SiteKind::V, zn)?;
    let delta_dual = build_delta(&case.delta_assignment(), f, SiteKind::VDual, e * zn)?;
    let mut steps = block_steps(
        f,
        n,
        (&vs, &a[..n]),
        (SiteKind::V, zn, e * zn),
        (&ds[1..], &a[n + 1..]),
        &delta,
    )?;
    steps.extend(block_steps(
        f,
        n,
        (&vs, &a[..n]),
        (SiteKind::VDual, e * zn, e * e * zn),
        (&ds[1..], &a[n + 1..]),
        &delta_dual,
    )?);
    Ok(steps)
}

pub fn rhs_steps(case: &ReductionCase, f: &RFamily, zetas: &[C]) -> Result<Vec<Step>> {
    match case.mode {
        ReductionMode::SelfDual => rhs_steps_selfdual(case, f, zetas),
        ReductionMode::General => rhs_steps_general(case, f, zetas),
    }
}

/// The self-dual right-hand side as one dense operator on `V^{⊗2n}`.
pub fn rhs_operator_selfdual(case: &ReductionCase, f: &RFamily, zetas: &[C]) -> Result<Mat> {
    assemble(&rhs_steps_selfdual(case, f, zetas)?, &alloc::vec![f.dim(); 2 * case.n])
}

/// The general right-hand side as one dense operator on `V^{⊗n}⊗V^{*⊗n}`.
pub fn rhs_operator_general(case: &ReductionCase, f: &RFamily, zetas: &[C]) -> Result<Mat> {
    assemble(&rhs_steps_general(case, f, zetas)?, &alloc::vec![f.dim(); 2 * case.n])
}

fn digits_reversed(mut j: usize, d: usize, n: usize) -> usize {
    let mut r = 0;
    for _ in 0..n {
        r = r * d + j % d;
        j /= d;
    }
    r
}

/// `Ψ^{i_1…i_n}_{j_1…j_n} = Σ Φ^{i_1…i_n k_n…k_1} Y_{k_n j_n} ⋯ Y_{k_1 j_1}`.
pub fn psi_extract(phi: &Mat, n: usize, y: &Mat) -> Result<Mat> {
    let d = y.nrows();
    let half = d.pow(n as u32);
    if phi.shape() != (half * half, 1) {
        return Err(Error::ShapeMismatch(format!(
            "Φ has shape {:?}, expected ({}, 1)",
            phi.shape(),
            half * half
        )));
    }
    let g = Mat::from_fn(half, half, |i, j| phi[(i * half + digits_reversed(j, d, n), 0)]);
    let mut psi = g;
    for c in 0..n {
        apply_single_right(&mut psi, &alloc::vec![d; n], y, c)?;
    }
    Ok(psi)
}

/// The inverse of [`psi_extract`].
pub fn psi_unextract(psi: &Mat, n: usize, y: &Mat) -> Result<Mat> {
    let d = y.nrows();
    let half = d.pow(n as u32);
    if psi.shape() != (half, half) {
        return Err(Error::ShapeMismatch(format!(
            "Ψ has shape {:?}, expected {half}x{half}",
            psi.shape()
        )));
    }
    let yinv = inverse(y)?;
    let mut g = psi.clone();
    for c in 0..n {
        apply_single_right(&mut g, &alloc::vec![d; n], &yinv, c)?;
    }
    let mut phi = Mat::zeros(half * half, 1);
    for i in 0..half {
        for j in 0..half {
            phi[(i * half + digits_reversed(j, d, n), 0)] = g[(i, j)];
        }
    }
    Ok(phi)
}

/// A random `Φ` on `2n` sites of dimension `d`, entries uniform in the unit square.
pub fn random_phi(seed: u64, n: usize, d: usize) -> Mat {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = d.pow(2 * n as u32);
    Mat::from_fn(rows, 1, |_, _| {
        C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

/// `Λ_{𝒲 i}` with its outermost factors optionally dropped: `drop_left`
/// removes `Ř^{(i,i+1)}(η_{i+1}|pη_i)`, `drop_right` removes `Ř^{(i−1,i)}(η_{i−1}|η_i)`.
pub fn lambda_trimmed(f: &RFamily, chain: &ChainSpec, i: usize, drop_left: bool, drop_right: bool) -> Result<Mat> {
    let n = chain.len();
    let dims = chain.dims(f);
    let total: usize = dims.iter().product();
    let (ki, ei) = (chain.kinds[i], chain.etas[i]);
    let mut m = Mat::identity(total, total);
    for k in (0..i).rev() {
        if drop_right && k + 1 == i {
            continue;
        }
        let op = f.rcheck(chain.kinds[k], chain.etas[k], ki, ei)?;
        apply_pair(&mut m, &dims, &op, k, k + 1)?;
    }
    apply_single(&mut m, &dims, &chain.delta(f, i)?, 0)?;
    m = permute_rows(&m, &dims, &Permutation::lambda(n))?.0;
    let pe = chain.p * ei;
    for k in (i + 1..n).rev() {
        if drop_left && k == i + 1 {
            continue;
        }
        let op = f.rcheck(chain.kinds[k], chain.etas[k], ki, pe)?;
        apply_pair(&mut m, &dims, &op, k - 1, k)?;
    }
    Ok(m)
}

/// The self-dual theorem: the operator identity
/// `Ř^{(n,n+1)}(q^ωζ_n|q^{2ω}ζ_n) · rhs = Λ_{𝒲 n}` and the implication on a
/// random `Φ₀`: with `Φ₁ = Λ_{𝒲 n} Φ₀`, the `Ψ` predicted by the reduced step
/// reproduces `Φ₁` after `Ř^{(n,n+1)}`.
pub fn theorem_check_selfdual(
    case: &ReductionCase,
    f: &RFamily,
    zetas: &[C],
    seed: u64,
    tol_op: f64,
    tol_e2e: f64,
) -> Vec<VerificationReport> {
    let n = case.n;
    let run = || -> Result<(f64, f64)> {
        if case.mode != ReductionMode::SelfDual {
            return Err(Error::Config("theorem_check_selfdual needs the self-dual mode".into()));
        }
        let dims = alloc::vec![f.dim(); 2 * n];
        let w = case.mirror_shift(f);
        let zn = zetas
            .get(n - 1)
            .copied()
            .ok_or_else(|| Error::Config("missing ζ_n".into()))?;
        let steps = rhs_steps_selfdual(case, f, zetas)?;
        let rhs = assemble(&steps, &dims)?;
        let rc = f.rcheck(SiteKind::V, w * zn, SiteKind::V, w * w * zn)?;
        let mut lhs = rhs;
        apply_pair(&mut lhs, &dims, &rc, n - 1, n)?;
        let chain = case.chain(f, zetas)?;
        let lam = lambda_op(f, &chain, n - 1)?.data;
        let op_res = rel_diff(&lhs, &lam);

        let y = case.contraction(f);
        let phi0 = random_phi(seed, n, f.dim());
        let phi1 = &lam * &phi0;
        let psi_pred = apply_steps_psi(&steps, &psi_extract(&phi0, n, &y)?, n, &y)?;
        let mut phi_pred = psi_unextract(&psi_pred, n, &y)?;
        apply_pair(&mut phi_pred, &dims, &rc, n - 1, n)?;
        Ok((op_res, rel_diff(&phi_pred, &phi1)))
    };
    let (a, b) = split(run());
    alloc::vec![
        case.base_report("theorem_selfdual_operator", tol_op)
            .param("seed", seed as usize)
            .finish(a),
        case.base_report("theorem_selfdual_end_to_end", tol_e2e)
            .param("seed", seed as usize)
            .finish(b),
    ]
}

fn split(r: Result<(f64, f64)>) -> (Result<f64>, Result<f64>) {
    match r {
        Ok((a, b)) => (Ok(a), Ok(b)),
        Err(e) => (Err(e.clone()), Err(e)),
    }
}

/// Relative size of the perturbation used to step off the coincident mixed pair.
pub const INSERTION_OFFSET: f64 = 1e-1;

/// The general theorem. Reports, in order:
/// the operator identity `rhs = Λ'_{𝒲,n+1} Λ'_{𝒲 n}` with the cancelling pair
/// `Ř_{V|V*}(q^εζ_n|q^εζ_n) Ř_{V*|V}(q^εζ_n|q^εζ_n)` removed from both `Λ`s;
/// the invariance of `rhs` under inserting that pair slightly off coincidence;
/// the untrimmed product `Λ_{𝒲,n+1} Λ_{𝒲 n}` at the perturbed point against the
/// trimmed one there; and the implication on a random `Φ₀` through `Ψ`.
pub fn theorem_check_general(
    case: &ReductionCase,
    f: &RFamily,
    zetas: &[C],
    seed: u64,
    tol_op: f64,
    tol_e2e: f64,
) -> Vec<VerificationReport> {
    let n = case.n;
    let dims = alloc::vec![f.dim(); 2 * n];
    let steps = || -> Result<Vec<Step>> {
        if case.mode != ReductionMode::General {
            return Err(Error::Config("theorem_check_general needs the general mode".into()));
        }
        rhs_steps_general(case, f, zetas)
    };
    let product = |args: Vec<C>, trim: bool| -> Result<Mat> {
        let chain = case.chain_on(f, args)?;
        let lam_n = lambda_trimmed(f, &chain, n - 1, trim, false)?;
        let lam_n1 = lambda_trimmed(f, &chain.shifted(n - 1), n, false, trim)?;
        Ok(lam_n1 * lam_n)
    };
    let operator = || -> Result<f64> {
        let rhs = assemble(&steps()?, &dims)?;
        Ok(rel_diff(&rhs, &product(case.args(f, zetas)?, true)?))
    };
    let e = case.mirror_shift(f);
    let a = e * zetas.get(n - 1).copied().unwrap_or(C::new(1.0, 0.0));
    let ap = a * (1.0 + INSERTION_OFFSET);
    let insertion = || -> Result<f64> {
        let st = steps()?;
        let rhs = assemble(&st, &dims)?;
        let half = st.len() / 2;
        let mut inserted = st[..half].to_vec();
        inserted.push(Step::Pair {
            op: f.rcheck(SiteKind::VDual, ap, SiteKind::V, a)?,
            first: n - 1,
            second: n,
        });
        inserted.push(Step::Pair {
            op: f.rcheck(SiteKind::V, a, SiteKind::VDual, ap)?,
            first: n - 1,
            second: n,
        });
        inserted.extend_from_slice(&st[half..]);
        Ok(rel_diff(&rhs, &assemble(&inserted, &dims)?))
    };
    let untrimmed = || -> Result<f64> {
        steps()?;
        let mut args = case.args(f, zetas)?;
        args[n] = ap;
        Ok(rel_diff(&product(args.clone(), false)?, &product(args, true)?))
    };
    let end_to_end = || -> Result<f64> {
        let st = steps()?;
        let y = case.contraction(f);
        let phi0 = random_phi(seed, n, f.dim());
        let phi1 = product(case.args(f, zetas)?, true)? * &phi0;
        let psi_pred = apply_steps_psi(&st, &psi_extract(&phi0, n, &y)?, n, &y)?;
        Ok(rel_diff(&psi_pred, &psi_extract(&phi1, n, &y)?))
    };
    let seed_p = seed as usize;
    alloc::vec![
        case.base_report("theorem_general_operator", tol_op)
            .param("seed", seed_p)
            .finish(operator()),
        case.base_report("theorem_general_insertion", tol_op)
            .param("offset", INSERTION_OFFSET)
            .finish(insertion()),
        case.base_report("theorem_general_untrimmed", tol_op)
            .param("offset", INSERTION_OFFSET)
            .finish(untrimmed()),
        case.base_report("theorem_general_end_to_end", tol_e2e)
            .param("seed", seed_p)
            .finish(end_to_end()),
    ]
}

/// The exchange relation
/// `Ř^{(i,i+1)}(ζ_i|ζ_{i+1}) Ψ(…ζ_i, ζ_{i+1}…) = Ψ(…ζ_{i+1}, ζ_i…) Ř^{(i,i+1)}(ζ_i|ζ_{i+1})`
/// with `Ψ(…ζ_{i+1}, ζ_i…)` obtained from a random `Φ₀` by the exchange of both
/// the first-half pair and its mirrored second-half pair.
pub fn check_rpr(case: &ReductionCase, f: &RFamily, zetas: &[C], i: usize, seed: u64, tol: f64) -> VerificationReport {
    let n = case.n;
    let run = || -> Result<f64> {
        if i + 1 >= n {
            return Err(Error::Config(format!("site pair ({i}, {}) outside n = {n}", i + 1)));
        }
        let dims = alloc::vec![f.dim(); 2 * n];
        let s = case.mirror_shift(f);
        let k2 = case.second_kind();
        let y = case.contraction(f);
        let phi0 = random_phi(seed, n, f.dim());
        let first = f.rcheck(SiteKind::V, zetas[i], SiteKind::V, zetas[i + 1])?;
        let mirrored = f.rcheck(k2, s * zetas[i + 1], k2, s * zetas[i])?;
        let mut phi1 = phi0.clone();
        apply_pair(&mut phi1, &dims, &first, i, i + 1)?;
        apply_pair(&mut phi1, &dims, &mirrored, 2 * n - 2 - i, 2 * n - 1 - i)?;
        let psi0 = psi_extract(&phi0, n, &y)?;
        let psi1 = psi_extract(&phi1, n, &y)?;
        let hd = alloc::vec![f.dim(); n];
        let mut lhs = psi0;
        apply_pair(&mut lhs, &hd, &first, i, i + 1)?;
        let mut rhs = psi1;
        apply_pair_right(&mut rhs, &hd, &first, i, i + 1)?;
        Ok(rel_diff(&lhs, &rhs))
    };
    case.base_report("rpr", tol)
        .param("i", i)
        .param("seed", seed as usize)
        .finish(run())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kron, ONE};
    use crate::rsolve::LocalCache;
    use proptest::prelude::*;

    fn ctx() -> QContext {
        QContext::new(C::new(0.6, 0.15)).unwrap()
    }

    fn case(mode: ReductionMode, n: usize, m: usize, s0: u32, s1: u32) -> ReductionCase {
        ReductionCase::new(
            mode,
            n,
            m,
            GradingChoice::new(s0, s1).unwrap(),
            ctx(),
            C::new(0.3, -0.2),
        )
        .unwrap()
    }

    fn zetas(n: usize) -> Vec<C> {
        [
            C::from_polar(1.1, 0.4),
            C::from_polar(0.8, -0.9),
            C::from_polar(1.3, 1.7),
        ][..n]
            .to_vec()
    }

    fn swap_matrix(d: usize) -> Mat {
        Mat::from_fn(d * d, d * d, |r, c| {
            if r == (c % d) * d + c / d {
                ONE
            } else {
                C::new(0.0, 0.0)
            }
        })
    }

    fn eye(k: usize) -> Mat {
        Mat::identity(k, k)
    }

    #[test]
    fn psi_extract_matches_index_sum() {
        let (n, d) = (2, 3);
        let y = Mat::from_fn(d, d, |i, j| C::new(1.0 + i as f64, 0.5 * j as f64 - 0.2 * i as f64));
        let phi = random_phi(7, n, d);
        let psi = psi_extract(&phi, n, &y).unwrap();
        for i1 in 0..d {
            for i2 in 0..d {
                for j1 in 0..d {
                    for j2 in 0..d {
                        let mut s = C::new(0.0, 0.0);
                        for k1 in 0..d {
                            for k2 in 0..d {
                                let row = ((i1 * d + i2) * d + k2) * d + k1;
                                s += phi[(row, 0)] * y[(k2, j2)] * y[(k1, j1)];
                            }
                        }
                        assert!((psi[(i1 * d + i2, j1 * d + j2)] - s).norm() < 1e-12);
                    }
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn extract_roundtrip(seed in 0u64..1000, n in 1usize..3, m in 1usize..3) {
            let c = case(ReductionMode::SelfDual, n, m, 1, 0);
            let cache = LocalCache::new();
            let f = c.family(&cache);
            let y = c.contraction(&f);
            let phi = random_phi(seed, n, f.dim());
            let back = psi_unextract(&psi_extract(&phi, n, &y).unwrap(), n, &y).unwrap();
            prop_assert!(rel_diff(&back, &phi) < 1e-12);
        }
    }

    #[test]
    fn step_psi_forms_match_dense_action() {
        let (n, d) = (2, 3);
        let dims = alloc::vec![d; 2 * n];
        let y = Mat::from_fn(d, d, |i, j| {
            C::new(if i == j { 2.0 } else { 0.3 }, 0.1 * (i + 2 * j) as f64)
        });
        let pair = Mat::from_fn(d * d, d * d, |i, j| {
            C::new((i * 7 + j * 3) as f64 % 5.0 - 2.0, (i + j) as f64 * 0.1)
        });
        let single = Mat::from_fn(d, d, |i, j| C::new((i + 2 * j) as f64, 1.0 - j as f64));
        let steps = [
            Step::Pair {
                op: pair.clone(),
                first: 0,
                second: 1,
            },
            Step::Pair {
                op: pair.clone(),
                first: 3,
                second: 2,
            },
            Step::Pair {
                op: pair,
                first: 2,
                second: 3,
            },
            Step::Single {
                op: single.clone(),
                site: 1,
            },
            Step::Single { op: single, site: 3 },
            Step::Swap { site: 1 },
        ];
        for (k, s) in steps.iter().enumerate() {
            let phi = random_phi(k as u64, n, d);
            let mut dense = phi.clone();
            s.apply(&mut dense, &dims).unwrap();
            let via_psi = apply_steps_psi(core::slice::from_ref(s), &psi_extract(&phi, n, &y).unwrap(), n, &y).unwrap();
            assert!(
                rel_diff(&via_psi, &psi_extract(&dense, n, &y).unwrap()) < 1e-12,
                "step {k}"
            );
        }
        assert!(apply_steps_psi(&[Step::Swap { site: 0 }], &Mat::identity(9, 9), n, &y).is_err());
    }

    #[test]
    fn selfdual_rhs_by_kronecker_products() {
        let c = case(ReductionMode::SelfDual, 2, 1, 1, 0);
        let cache = LocalCache::new();
        let f = c.family(&cache);
        let z = zetas(2);
        let w = c.mirror_shift(&f);
        let a = c.args(&f, &z).unwrap();
        let d = f.dim();
        let p = swap_matrix(d);
        let r01 = kron(&f.r(SiteKind::V, a[0], SiteKind::V, z[1]).unwrap(), &eye(d * d));
        let delta = build_delta(&c.delta_assignment(), &f, SiteKind::V, z[1]).unwrap();
        let d1 = kron(&kron(&eye(d), &delta), &eye(d * d));
        let p12 = kron(&kron(&eye(d), &p), &eye(d));
        let r32 = kron(
            &eye(d * d),
            &(&p * f.r(SiteKind::V, a[3], SiteKind::V, w * w * z[1]).unwrap() * &p),
        );
        let oracle = r32 * p12 * d1 * r01;
        let rhs = rhs_operator_selfdual(&c, &f, &z).unwrap();
        assert!(rel_diff(&rhs, &oracle) < 1e-12);
    }

    #[test]
    fn single_pair_reduction_is_the_swap_of_delta() {
        let c = case(ReductionMode::SelfDual, 1, 1, 1, 1);
        let cache = LocalCache::new();
        let f = c.family(&cache);
        let z = zetas(1);
        let steps = rhs_steps_selfdual(&c, &f, &z).unwrap();
        assert_eq!(steps.len(), 2);
        let d = f.dim();
        let delta = build_delta(&c.delta_assignment(), &f, SiteKind::V, z[0]).unwrap();
        let oracle = swap_matrix(d) * kron(&delta, &eye(d));
        assert!(rel_diff(&assemble(&steps, &[d, d]).unwrap(), &oracle) < 1e-12);
    }

    #[test]
    fn theorem_selfdual_holds() {
        let cache = LocalCache::new();
        for n in 1..=3 {
            for (m, s0, s1) in [(1, 1, 0), (1, 1, 1), (2, 1, 0), (2, 0, 1)] {
                if n == 3 && m == 2 {
                    continue;
                }
                let c = case(ReductionMode::SelfDual, n, m, s0, s1);
                let f = c.family(&cache);
                for r in theorem_check_selfdual(&c, &f, &zetas(n), 11, 1e-9, 1e-9) {
                    assert!(r.passed, "{r:?}");
                }
            }
        }
    }

    #[test]
    fn theorem_general_holds() {
        let cache = LocalCache::new();
        for n in 1..=2 {
            for (m, s0, s1) in [(1, 1, 0), (1, 1, 1), (2, 1, 0), (2, 0, 1)] {
                let c = case(ReductionMode::General, n, m, s0, s1);
                let f = c.family(&cache);
                for r in theorem_check_general(&c, &f, &zetas(n), 5, 1e-9, 1e-9) {
                    assert!(r.passed, "{r:?}");
                }
            }
        }
    }

    #[test]
    fn exchange_relation_in_both_modes() {
        let cache = LocalCache::new();
        for mode in [ReductionMode::SelfDual, ReductionMode::General] {
            for m in 1..=2 {
                let c = case(mode, 2, m, 1, 0);
                let f = c.family(&cache);
                let r = check_rpr(&c, &f, &zetas(2), 0, 3, 1e-9);
                assert!(r.passed, "{r:?}");
            }
        }
    }

    #[test]
    fn rhs_scales_with_spectral_parameters() {
        let cache = LocalCache::new();
        for mode in [ReductionMode::SelfDual, ReductionMode::General] {
            let c = case(mode, 2, 1, 1, 0);
            let f = c.family(&cache);
            let z = zetas(2);
            let nu = C::from_polar(1.7, 0.6);
            let scaled: Vec<C> = z.iter().map(|x| nu * x).collect();
            let a = assemble(&rhs_steps(&c, &f, &z).unwrap(), &alloc::vec![f.dim(); 4]).unwrap();
            let b = assemble(&rhs_steps(&c, &f, &scaled).unwrap(), &alloc::vec![f.dim(); 4]).unwrap();
            assert!(rel_diff(&a, &b) < 1e-10, "{}", mode.label());
        }
    }

    #[test]
    fn configuration_errors() {
        assert!(ReductionCase::new(
            ReductionMode::General,
            0,
            1,
            GradingChoice::new(1, 0).unwrap(),
            ctx(),
            ONE
        )
        .is_err());
        let c = case(ReductionMode::SelfDual, 2, 1, 1, 0);
        let cache = LocalCache::new();
        let f = c.family(&cache);
        assert!(c.args(&f, &zetas(1)).is_err());
        let reports = theorem_check_general(&c, &f, &zetas(2), 1, 1e-9, 1e-9);
        assert!(reports.iter().all(|r| !r.passed));
        assert!(!check_rpr(&c, &f, &zetas(2), 1, 1, 1e-9).passed);
    }
}
