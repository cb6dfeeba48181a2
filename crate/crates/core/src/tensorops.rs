//! Dense operators on tensor products of site spaces.
//!
//! Sites are numbered from 0. A multi-index is flattened row-major, so site 0
//! is the slowest index.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{fro, Mat, C, ZERO};

/// A dense operator together with the site dimensions of its target and source.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorOperator {
    pub site_dims_out: Vec<usize>,
    pub site_dims_in: Vec<usize>,
    pub data: Mat,
}

impl TensorOperator {
    pub fn new(site_dims_out: Vec<usize>, site_dims_in: Vec<usize>, data: Mat) -> Result<Self> {
        let (r, c) = (site_dims_out.iter().product(), site_dims_in.iter().product());
        if data.shape() != (r, c) {
            return Err(Error::ShapeMismatch(format!(
                "data is {:?}, site dims give ({r}, {c})",
                data.shape()
            )));
        }
        Ok(Self {
            site_dims_out,
            site_dims_in,
            data,
        })
    }

    pub fn identity(dims: &[usize]) -> Self {
        let d = dims.iter().product();
        Self {
            site_dims_out: dims.to_vec(),
            site_dims_in: dims.to_vec(),
            data: Mat::identity(d, d),
        }
    }

    pub fn compose(&self, rhs: &TensorOperator) -> Result<TensorOperator> {
        if self.site_dims_in != rhs.site_dims_out {
            return Err(Error::ShapeMismatch(format!(
                "cannot compose {:?} after {:?}",
                self.site_dims_in, rhs.site_dims_out
            )));
        }
        Ok(TensorOperator {
            site_dims_out: self.site_dims_out.clone(),
            site_dims_in: rhs.site_dims_in.clone(),
            data: &self.data * &rhs.data,
        })
    }
}

pub fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = alloc::vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

fn check_pair(op: &Mat, i: usize, j: usize, dims: &[usize]) -> Result<()> {
    if i == j || i >= dims.len() || j >= dims.len() {
        return Err(Error::ShapeMismatch(format!(
            "invalid site pair ({i}, {j}) for {} sites",
            dims.len()
        )));
    }
    let d = dims[i] * dims[j];
    if op.shape() != (d, d) {
        return Err(Error::ShapeMismatch(format!(
            "two-site op is {:?}, expected {d}x{d}",
            op.shape()
        )));
    }
    Ok(())
}

/// Replaces `target` by `op^{(i,j)} · target`, where the first tensor factor of
/// `op` acts on site `i` and the second on site `j`.
pub fn apply_pair(target: &mut Mat, dims: &[usize], op: &Mat, i: usize, j: usize) -> Result<()> {
    check_pair(op, i, j, dims)?;
    let total: usize = dims.iter().product();
    if target.nrows() != total {
        return Err(Error::ShapeMismatch(format!(
            "target has {} rows, expected {total}",
            target.nrows()
        )));
    }
    let st = strides(dims);
    let (di, dj) = (dims[i], dims[j]);
    let d = di * dj;
    let mut rows = alloc::vec![0usize; d];
    let mut buf = alloc::vec![ZERO; d];
    for base in 0..total {
        if !(base / st[i]).is_multiple_of(di) || !(base / st[j]).is_multiple_of(dj) {
            continue;
        }
        for a in 0..di {
            for b in 0..dj {
                rows[a * dj + b] = base + a * st[i] + b * st[j];
            }
        }
        for col in 0..target.ncols() {
            for (k, r) in rows.iter().enumerate() {
                buf[k] = target[(*r, col)];
            }
            for (k, r) in rows.iter().enumerate() {
                let mut acc = ZERO;
                for (l, v) in buf.iter().enumerate() {
                    acc += op[(k, l)] * v;
                }
                target[(*r, col)] = acc;
            }
        }
    }
    Ok(())
}

/// Replaces `target` by `target · op^{(i,j)}`.
pub fn apply_pair_right(target: &mut Mat, dims: &[usize], op: &Mat, i: usize, j: usize) -> Result<()> {
    let mut t = target.transpose();
    apply_pair(&mut t, dims, &op.transpose(), i, j)?;
    *target = t.transpose();
    Ok(())
}

/// Replaces `target` by `op^{(i)} · target`.
pub fn apply_single(target: &mut Mat, dims: &[usize], op: &Mat, i: usize) -> Result<()> {
    if i >= dims.len() || op.shape() != (dims[i], dims[i]) {
        return Err(Error::ShapeMismatch(format!(
            "single-site op at {i} has shape {:?}",
            op.shape()
        )));
    }
    let st = strides(dims);
    let total: usize = dims.iter().product();
    let di = dims[i];
    let mut buf = alloc::vec![ZERO; di];
    for base in 0..total {
        if !(base / st[i]).is_multiple_of(di) {
            continue;
        }
        for col in 0..target.ncols() {
            for (a, b) in buf.iter_mut().enumerate() {
                *b = target[(base + a * st[i], col)];
            }
            for a in 0..di {
                let mut acc = ZERO;
                for (l, v) in buf.iter().enumerate() {
                    acc += op[(a, l)] * v;
                }
                target[(base + a * st[i], col)] = acc;
            }
        }
    }
    Ok(())
}

pub fn apply_single_right(target: &mut Mat, dims: &[usize], op: &Mat, i: usize) -> Result<()> {
    let mut t = target.transpose();
    apply_single(&mut t, dims, &op.transpose(), i)?;
    *target = t.transpose();
    Ok(())
}

/// `op^{(i,j)}` on the full space, identity on the other sites.
pub fn embed_pair(op: &Mat, i: usize, j: usize, dims: &[usize]) -> Result<TensorOperator> {
    let mut t = TensorOperator::identity(dims);
    apply_pair(&mut t.data, dims, op, i, j)?;
    Ok(t)
}

/// A permutation of sites: the object at position `k` goes to position `images[k]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    pub images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let mut seen = alloc::vec![false; images.len()];
        for &k in &images {
            if k >= images.len() || seen[k] {
                return Err(Error::Config(format!("{images:?} is not a permutation")));
            }
            seen[k] = true;
        }
        Ok(Self { images })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            images: (0..n).collect(),
        }
    }

    /// The transposition of positions `i` and `i + 1`.
    pub fn sigma(i: usize, n: usize) -> Self {
        let mut p = Self::identity(n);
        p.images.swap(i, i + 1);
        p
    }

    /// The cyclic left shift: `0 → n−1`, `k → k−1`.
    pub fn lambda(n: usize) -> Self {
        Self {
            images: (0..n).map(|k| if k == 0 { n - 1 } else { k - 1 }).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// `(self ∘ rhs)(k) = self(rhs(k))`.
    pub fn compose(&self, rhs: &Permutation) -> Permutation {
        Permutation {
            images: rhs.images.iter().map(|&k| self.images[k]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = alloc::vec![0; self.len()];
        for (k, &v) in self.images.iter().enumerate() {
            inv[v] = k;
        }
        Permutation { images: inv }
    }

    pub fn inversions(&self) -> usize {
        let n = self.len();
        (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .filter(|&(a, b)| self.images[a] > self.images[b])
            .count()
    }

    /// A reduced word `[i_1, …, i_k]` with `self = σ_{i_k} ⋯ σ_{i_1}`, built by
    /// peeling off the first (or last) available descent.
    pub fn reduced_word(&self, from_left: bool) -> Vec<usize> {
        let mut cur = self.clone();
        let mut word = Vec::new();
        let n = self.len();
        loop {
            let descents: Vec<usize> = (0..n.saturating_sub(1))
                .filter(|&i| cur.inverse().images[i] > cur.inverse().images[i + 1])
                .collect();
            let pick = if from_left { descents.first() } else { descents.last() };
            match pick {
                Some(&i) => {
                    word.push(i);
                    cur = Permutation::sigma(i, n).compose(&cur);
                }
                None => break,
            }
        }
        word.reverse();
        word
    }
}

/// `P_s · target`, where `P_s(v_1⊗…⊗v_N) = v_{s^{−1}(1)}⊗…⊗v_{s^{−1}(N)}`.
pub fn permute_rows(target: &Mat, dims: &[usize], s: &Permutation) -> Result<(Mat, Vec<usize>)> {
    if s.len() != dims.len() {
        return Err(Error::ShapeMismatch(format!(
            "permutation of {} sites on {} sites",
            s.len(),
            dims.len()
        )));
    }
    let n = dims.len();
    let mut out_dims = alloc::vec![0; n];
    for k in 0..n {
        out_dims[s.images[k]] = dims[k];
    }
    let st_in = strides(dims);
    let st_out = strides(&out_dims);
    let total: usize = dims.iter().product();
    let mut out = Mat::zeros(total, target.ncols());
    for r in 0..total {
        let mut o = 0;
        for k in 0..n {
            o += ((r / st_in[k]) % dims[k]) * st_out[s.images[k]];
        }
        out.set_row(o, &target.row(r));
    }
    Ok((out, out_dims))
}

pub fn permutation_op(s: &Permutation, dims: &[usize]) -> Result<TensorOperator> {
    let d = dims.iter().product();
    let (data, out_dims) = permute_rows(&Mat::identity(d, d), dims, s)?;
    Ok(TensorOperator {
        site_dims_out: out_dims,
        site_dims_in: dims.to_vec(),
        data,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    First,
    Second,
}

/// Transpose over one tensor factor of an operator on `C^{d1} ⊗ C^{d2}`.
pub fn partial_transpose(op: &Mat, d1: usize, d2: usize, which: Factor) -> Result<Mat> {
    let d = d1 * d2;
    if op.shape() != (d, d) {
        return Err(Error::ShapeMismatch(format!("expected {d}x{d}, got {:?}", op.shape())));
    }
    let mut out = Mat::zeros(d, d);
    for a in 0..d1 {
        for b in 0..d2 {
            for a2 in 0..d1 {
                for b2 in 0..d2 {
                    let (r, c) = match which {
                        Factor::First => (a2 * d2 + b, a * d2 + b2),
                        Factor::Second => (a * d2 + b2, a2 * d2 + b),
                    };
                    out[(r, c)] = op[(a * d2 + b, a2 * d2 + b2)];
                }
            }
        }
    }
    Ok(out)
}

/// The least-squares `λ` with `A ≈ λB` and `‖A − λB‖ / ‖A‖`.
pub fn scalar_ratio(a: &Mat, b: &Mat) -> Result<(C, f64)> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch(format!("{:?} vs {:?}", a.shape(), b.shape())));
    }
    let bb: f64 = b.iter().map(|z| z.norm_sqr()).sum();
    if bb == 0.0 {
        return Err(Error::ShapeMismatch("scalar_ratio against a zero operator".into()));
    }
    let ab: C = b.iter().zip(a.iter()).map(|(y, x)| y.conj() * x).sum();
    let lambda = ab / bb;
    let na = fro(a);
    let residual = if na == 0.0 { 0.0 } else { fro(&(a - b * lambda)) / na };
    Ok((lambda, residual))
}
