//! qKZ operators `Λ_{𝒲 i}` on a chain of `V`/`V*` sites, the site operators
//! `Δ_i`, and transport of `Φ` along reduced words.
//!
//! Sites are 0-based here: site `k` carries `kinds[k]` and `etas[k]`.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{inverse, kron, rel_commutator, rel_diff, Mat, C, ONE};
use crate::repkit::SiteKind;
use crate::rsolve::RFamily;
use crate::tensorops::{apply_pair, apply_single, permute_rows, Permutation, TensorOperator};

/// Where a site operator `Δ` comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum DeltaSource {
    /// `d^{n−1} φ(ζ) (X̃^{−1})ᵗ X̃ A^α` on `V`, for a chain of `2n` sites.
    SelfDual {
        n: usize,
    },
    /// `φ(ζ) X_W A^α_W` with `W` the site kind.
    General,
    Identity,
    Custom(Mat),
}

/// A site operator recipe. `phi_hook` is the scalar prefactor `φ(ζ)`.
#[derive(Debug, Clone)]
pub struct DeltaAssignment {
    pub source: DeltaSource,
    pub phi_hook: fn(C) -> C,
}

fn unit_hook(_: C) -> C {
    ONE
}

impl DeltaAssignment {
    pub fn new(source: DeltaSource) -> Self {
        Self {
            source,
            phi_hook: unit_hook,
        }
    }

    pub fn with_hook(mut self, hook: fn(C) -> C) -> Self {
        self.phi_hook = hook;
        self
    }
}

/// `Δ(ζ)` for a site of the given kind. The twist `A^α` is the one carried by
/// the family, so that `Δ` and the `R`-operators share `α`.
pub fn build_delta(assign: &DeltaAssignment, f: &RFamily, kind: SiteKind, zeta: C) -> Result<Mat> {
    let phi = (assign.phi_hook)(zeta);
    let m = match &assign.source {
        DeltaSource::SelfDual { n } => {
            if kind != SiteKind::V {
                return Err(Error::Config("the self-dual Δ is defined on V only".into()));
            }
            let xt = &f.ops.xtilde;
            let d = libm::pow(f.d_sign(), n.saturating_sub(1) as f64);
            inverse(xt)?.transpose() * xt * f.ops.a_for(kind) * C::new(d, 0.0)
        }
        DeltaSource::General => f.ops.x_for(kind) * f.ops.a_for(kind),
        DeltaSource::Identity => Mat::identity(f.dim(), f.dim()),
        DeltaSource::Custom(m) => m.clone(),
    };
    let m = m * phi;
    inverse(&m)?;
    Ok(m)
}

/// Sites, spectral parameters, shift and site operators of one qKZ system.
#[derive(Debug, Clone)]
pub struct ChainSpec {
    pub kinds: Vec<SiteKind>,
    pub etas: Vec<C>,
    pub p: C,
    pub deltas: Vec<DeltaAssignment>,
}

impl ChainSpec {
    pub fn new(kinds: Vec<SiteKind>, etas: Vec<C>, p: C, deltas: Vec<DeltaAssignment>) -> Result<Self> {
        let n = kinds.len();
        if n == 0 || etas.len() != n || deltas.len() != n {
            return Err(Error::Config(format!(
                "chain needs matching non-empty kinds/etas/deltas, got {}/{}/{}",
                n,
                etas.len(),
                deltas.len()
            )));
        }
        if p.norm() == 0.0 {
            return Err(Error::Config("p must be non-zero".into()));
        }
        Ok(Self { kinds, etas, p, deltas })
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn dims(&self, f: &RFamily) -> Vec<usize> {
        alloc::vec![f.dim(); self.len()]
    }

    /// A copy with `η_i` replaced by `p η_i`.
    pub fn shifted(&self, i: usize) -> Self {
        let mut c = self.clone();
        c.etas[i] *= self.p;
        c
    }

    pub fn delta(&self, f: &RFamily, i: usize) -> Result<Mat> {
        build_delta(&self.deltas[i], f, self.kinds[i], self.etas[i])
    }
}

/// `p = q^{2ω}`, the shift of the self-dual reduction.
pub fn p_self_dual(f: &RFamily) -> C {
    f.ctx().powr(2.0 * f.ops.omega)
}

/// `p = q^ε`, the shift of the general reduction.
pub fn p_general(f: &RFamily) -> C {
    f.ctx().powr(f.ops.epsilon)
}

fn check_site(chain: &ChainSpec, i: usize) -> Result<()> {
    if i >= chain.len() {
        return Err(Error::Config(format!("site {i} outside a chain of {}", chain.len())));
    }
    Ok(())
}

/// `Λ_{𝒲 i}` as a string of `Ř`-operators around `P_λ Δ^{(1)}_i`.
pub fn lambda_op(f: &RFamily, chain: &ChainSpec, i: usize) -> Result<TensorOperator> {
    check_site(chain, i)?;
    let n = chain.len();
    let dims = chain.dims(f);
    let total: usize = dims.iter().product();
    let (ki, ei) = (chain.kinds[i], chain.etas[i]);
    let mut m = Mat::identity(total, total);
    for k in (0..i).rev() {
        let op = f.rcheck(chain.kinds[k], chain.etas[k], ki, ei)?;
        apply_pair(&mut m, &dims, &op, k, k + 1)?;
    }
    apply_single(&mut m, &dims, &chain.delta(f, i)?, 0)?;
    m = permute_rows(&m, &dims, &Permutation::lambda(n))?.0;
    let pe = chain.p * ei;
    for k in (i + 1..n).rev() {
        let op = f.rcheck(chain.kinds[k], chain.etas[k], ki, pe)?;
        apply_pair(&mut m, &dims, &op, k - 1, k)?;
    }
    TensorOperator::new(dims.clone(), dims, m)
}

/// `Λ_{𝒲 i}` rewritten with `R^{(j,i)}` embeddings and `Δ^{(i)}_i`.
pub fn lambda_op_r_form(f: &RFamily, chain: &ChainSpec, i: usize) -> Result<TensorOperator> {
    check_site(chain, i)?;
    let n = chain.len();
    let dims = chain.dims(f);
    let total: usize = dims.iter().product();
    let (ki, ei) = (chain.kinds[i], chain.etas[i]);
    let mut m = Mat::identity(total, total);
    for k in (0..i).rev() {
        let op = f.r(chain.kinds[k], chain.etas[k], ki, ei)?;
        apply_pair(&mut m, &dims, &op, k, i)?;
    }
    apply_single(&mut m, &dims, &chain.delta(f, i)?, i)?;
    let pe = chain.p * ei;
    for k in (i + 1..n).rev() {
        let op = f.r(chain.kinds[k], chain.etas[k], ki, pe)?;
        apply_pair(&mut m, &dims, &op, k, i)?;
    }
    TensorOperator::new(dims.clone(), dims, m)
}

/// The relative difference of the two forms of `Λ_{𝒲 i}`.
pub fn lambda_forms_residual(f: &RFamily, chain: &ChainSpec, i: usize) -> Result<f64> {
    let a = lambda_op(f, chain, i)?;
    let b = lambda_op_r_form(f, chain, i)?;
    Ok(rel_diff(&a.data, &b.data))
}

/// `‖[Δ_j ⊗ Δ_k, R_{W_j|W_k}(η_j|η_k)]‖` relative.
pub fn ddr_residual(f: &RFamily, chain: &ChainSpec, j: usize, k: usize) -> Result<f64> {
    check_site(chain, j)?;
    check_site(chain, k)?;
    let dd = kron(&chain.delta(f, j)?, &chain.delta(f, k)?);
    let r = f.r(chain.kinds[j], chain.etas[j], chain.kinds[k], chain.etas[k])?;
    Ok(rel_commutator(&dd, &r))
}

/// `Λ_i(…, pη_j, …) Λ_j(η) − Λ_j(…, pη_i, …) Λ_i(η)`, relative.
pub fn compatibility_residual(f: &RFamily, chain: &ChainSpec, i: usize, j: usize) -> Result<f64> {
    let lhs = lambda_op(f, &chain.shifted(j), i)?.data * lambda_op(f, chain, j)?.data;
    let rhs = lambda_op(f, &chain.shifted(i), j)?.data * lambda_op(f, chain, i)?.data;
    Ok(rel_diff(&lhs, &rhs))
}

/// `Φ_{s𝒲}` and the arrangement it lives on.
#[derive(Debug, Clone)]
pub struct Transported {
    pub phi: Mat,
    pub kinds: Vec<SiteKind>,
    pub etas: Vec<C>,
    /// `s`, with `s(k)` the position the original site `k` ends up at.
    pub perm: Permutation,
}

/// Applies the `Ř` recurrence along `word = [i_1, …, i_k]`, i.e. towards
/// `s = σ_{i_k} ⋯ σ_{i_1}`, starting from `Φ_𝒲 = phi` on the chain's arrangement.
pub fn transport_phi(f: &RFamily, chain: &ChainSpec, phi: &Mat, word: &[usize]) -> Result<Transported> {
    let n = chain.len();
    let dims = chain.dims(f);
    let mut out = Transported {
        phi: phi.clone(),
        kinds: chain.kinds.clone(),
        etas: chain.etas.clone(),
        perm: Permutation::identity(n),
    };
    for &a in word {
        if a + 1 >= n {
            return Err(Error::Config(format!("σ_{a} outside a chain of {n}")));
        }
        let op = f.rcheck(out.kinds[a], out.etas[a], out.kinds[a + 1], out.etas[a + 1])?;
        apply_pair(&mut out.phi, &dims, &op, a, a + 1)?;
        out.kinds.swap(a, a + 1);
        out.etas.swap(a, a + 1);
        out.perm = Permutation::sigma(a, n).compose(&out.perm);
    }
    Ok(out)
}
