//! q-numbers, q-Pochhammer products and the normalization scalars
//! `ρ⁰`, `κ` and `F_m` for spin-m `sl2` and the fundamental `sl(l+1)` case.

use crate::error::{Error, Result};
use crate::linalg::{C, ONE, ZERO};

/// Factors smaller than this in modulus are treated as exact zeros.
pub const POLE_TOL: f64 = 1e-12;

/// The deformation parameter together with the numeric policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QContext {
    q: C,
    hbar: C,
    pub eps_residual: f64,
    pub trunc_terms: usize,
    pub root_unity_guard: usize,
}

impl QContext {
    pub fn new(q: C) -> Result<Self> {
        Self::with_policy(q, 1e-10, 96, 24)
    }

    pub fn with_policy(q: C, eps_residual: f64, trunc_terms: usize, root_unity_guard: usize) -> Result<Self> {
        if trunc_terms == 0 || root_unity_guard == 0 {
            return Err(Error::Config(
                "trunc_terms and root_unity_guard must be positive".into(),
            ));
        }
        if !(q.re.is_finite() && q.im.is_finite()) || q == ZERO {
            return Err(Error::DegenerateQ(0.0));
        }
        let mut qk = ONE;
        for k in 1..=root_unity_guard {
            qk *= q;
            let distance = (qk - ONE).norm();
            if distance <= 10.0 * f64::EPSILON * k as f64 {
                return Err(Error::RootOfUnity { order: k, distance });
            }
        }
        let gap = (q - q.inv()).norm();
        if gap < 1e3 * f64::MIN_POSITIVE {
            return Err(Error::DegenerateQ(gap));
        }
        if q.norm() >= 1.0 {
            return Err(Error::QOutsideDisk(q.norm()));
        }
        Ok(Self {
            q,
            hbar: q.ln(),
            eps_residual,
            trunc_terms,
            root_unity_guard,
        })
    }

    pub fn q(&self) -> C {
        self.q
    }

    /// `q^ν = exp(ν log q)` on the principal branch of `log q`.
    pub fn pow(&self, nu: C) -> C {
        (nu * self.hbar).exp()
    }

    pub fn powr(&self, nu: f64) -> C {
        (self.hbar * nu).exp()
    }

    pub fn powi(&self, k: i32) -> C {
        self.q.powi(k)
    }
}

/// Root system data needed for `ε`, `x` and the difference equations.
#[derive(Debug, Clone, PartialEq)]
pub struct LieData {
    pub algebra: Algebra,
    pub kac_labels: alloc::vec::Vec<u32>,
    pub d: alloc::vec::Vec<u32>,
    /// Inverse Cartan matrix, row-major, `rank × rank`.
    pub b: alloc::vec::Vec<f64>,
    pub theta_norm: f64,
    pub dual_coxeter: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algebra {
    A1,
    Al(u32),
}

impl LieData {
    pub fn a1() -> Self {
        Self::al(1)
    }

    pub fn al(l: u32) -> Self {
        let l = l.max(1);
        let n = l as usize;
        let mut b = alloc::vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let (a, c) = ((i + 1) as f64, (j + 1) as f64);
                b[i * n + j] = a.min(c) - a * c / (l as f64 + 1.0);
            }
        }
        Self {
            algebra: if l == 1 { Algebra::A1 } else { Algebra::Al(l) },
            kac_labels: alloc::vec![1; n + 1],
            d: alloc::vec![1; n + 1],
            b,
            theta_norm: 2.0,
            dual_coxeter: l + 1,
        }
    }

    pub fn rank(&self) -> usize {
        self.kac_labels.len() - 1
    }

    /// `ε = (θ|θ) h∨ / (2s)`, so that `ε s = 2 h∨`.
    pub fn epsilon(&self, s: u32) -> f64 {
        self.theta_norm * self.dual_coxeter as f64 / s as f64
    }

    /// Coefficients `c_j` of `x = Σ_j c_j h_j` for the grading `(s_0, …, s_l)`.
    pub fn x_coefficients(&self, grading: &[u32]) -> alloc::vec::Vec<f64> {
        let n = self.rank();
        let s: u32 = grading.iter().zip(&self.kac_labels).map(|(si, ai)| si * ai).sum();
        let eps_s = self.theta_norm * self.dual_coxeter as f64;
        (0..n)
            .map(|j| {
                -(0..n)
                    .map(|i| {
                        let t = 2.0 * self.d[i + 1] as f64 - eps_s * grading[i + 1] as f64 / s as f64;
                        t * self.b[i * n + j]
                    })
                    .sum::<f64>()
            })
            .collect()
    }
}

/// A truncated product or series and a bound on what the truncation dropped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncated {
    pub value: C,
    pub tail: f64,
    /// Smallest modulus among the kept factors (products only).
    pub min_factor: f64,
}

impl Truncated {
    pub fn certified(self, tol: f64) -> Result<C> {
        if self.tail > tol {
            Err(Error::TruncationInsufficient { tail: self.tail, tol })
        } else {
            Ok(self.value)
        }
    }
}

/// `[ν]_q = (q^ν − q^{−ν}) / (q − q^{−1})`.
pub fn q_number(nu: C, ctx: &QContext) -> Result<C> {
    q_number_log(nu, ctx.hbar)
}

fn q_number_log(nu: C, hbar: C) -> Result<C> {
    let den = hbar.exp() - (-hbar).exp();
    if den.norm() < 1e3 * f64::MIN_POSITIVE {
        return Err(Error::DegenerateQ(den.norm()));
    }
    Ok(((nu * hbar).exp() - (-nu * hbar).exp()) / den)
}

/// `(a; p)_∞` truncated after `trunc_terms` factors.
pub fn q_pochhammer(a: C, p: C, ctx: &QContext) -> Result<Truncated> {
    let ap = p.norm();
    if ap >= 1.0 {
        return Err(Error::DivergentBase(ap));
    }
    let mut value = ONE;
    let mut pk = ONE;
    let mut min_factor = f64::INFINITY;
    for _ in 0..ctx.trunc_terms {
        let f = ONE - a * pk;
        min_factor = min_factor.min(f.norm());
        value *= f;
        pk *= p;
    }
    let lead = a.norm() * pk.norm();
    let tail = if lead < 0.5 {
        let s = lead / ((1.0 - ap) * (1.0 - lead));
        libm::expm1(s)
    } else {
        f64::INFINITY
    };
    Ok(Truncated {
        value,
        tail,
        min_factor,
    })
}

fn poch(a: C, p: C, ctx: &QContext) -> Result<C> {
    q_pochhammer(a, p, ctx)?.certified(ctx.eps_residual)
}

fn poch_den(a: C, p: C, ctx: &QContext, what: &'static str) -> Result<C> {
    let t = q_pochhammer(a, p, ctx)?;
    if t.min_factor < POLE_TOL {
        return Err(Error::Pole(what));
    }
    t.certified(ctx.eps_residual)
}

/// `F_m(ζ) = Σ_{n≥1} ζⁿ / (n [m]_{qⁿ})`.
pub fn f_series(m: u32, zeta_arg: C, ctx: &QContext) -> Result<Truncated> {
    let az = zeta_arg.norm();
    if az >= 1.0 {
        return Err(Error::Divergence(az));
    }
    let mut sum = ZERO;
    let mut zn = ONE;
    for n in 1..=ctx.trunc_terms {
        zn *= zeta_arg;
        let qn = q_number_log(C::new(m as f64, 0.0), ctx.hbar * n as f64)?;
        sum += zn / (qn * n as f64);
    }
    let t = ctx.trunc_terms as f64;
    let aq = ctx.q.norm();
    let r = az * libm::pow(aq, m as f64 - 1.0);
    let c_t = (1.0 + libm::pow(aq, 2.0 * t)) / (1.0 - libm::pow(aq, 2.0 * t * m as f64));
    let tail = if r < 1.0 {
        c_t * libm::pow(r, t + 1.0) / ((t + 1.0) * (1.0 - r))
    } else {
        f64::INFINITY
    };
    Ok(Truncated {
        value: sum,
        tail,
        min_factor: f64::INFINITY,
    })
}

/// Principal branch of `z^e`.
pub fn principal_pow(z: C, e: f64) -> C {
    if z == ZERO {
        ZERO
    } else {
        (z.ln() * e).exp()
    }
}

/// `ρ⁰` for spin-m `sl2`:
/// `q^{−m²/2} (q²z; q⁴)² / ((q^{2m+2}z; q⁴)(q^{−2m+2}z; q⁴))`.
pub fn rho0_sl2(m: u32, z: C, ctx: &QContext) -> Result<C> {
    let m = m as i32;
    let p = ctx.powi(4);
    let num = poch(ctx.powi(2) * z, p, ctx)?;
    let d1 = poch_den(ctx.powi(2 * m + 2) * z, p, ctx, "rho0_sl2")?;
    let d2 = poch_den(ctx.powi(2 - 2 * m) * z, p, ctx, "rho0_sl2")?;
    Ok(ctx.powr(-(m * m) as f64 / 2.0) * num * num / (d1 * d2))
}

/// `ρ⁰(q^{−2}z)^{−1} ρ⁰(z)^{−1}` as the finite product
/// `q^{m²} ∏_{i<m} (1 − q^{−2m+2i}z) / (1 − q^{2m−2i−2}z)`.
pub fn rho0_ratio_sl2(m: u32, z: C, ctx: &QContext) -> Result<C> {
    let m = m as i32;
    let mut v = ctx.powi(m * m);
    for i in 0..m {
        let den = ONE - ctx.powi(2 * m - 2 * i - 2) * z;
        if den.norm() < POLE_TOL {
            return Err(Error::Pole("rho0_ratio_sl2"));
        }
        v *= (ONE - ctx.powi(-2 * m + 2 * i) * z) / den;
    }
    Ok(v)
}

/// `ρ⁰(z) / ρ⁰(q⁴z) = (1 − q²z)² / ((1 − q^{2m+2}z)(1 − q^{2−2m}z))`.
pub fn rho0_shift_quotient_sl2(m: u32, z: C, ctx: &QContext) -> Result<C> {
    let m = m as i32;
    let num = ONE - ctx.powi(2) * z;
    let den = (ONE - ctx.powi(2 * m + 2) * z) * (ONE - ctx.powi(2 - 2 * m) * z);
    if den.norm() < POLE_TOL {
        return Err(Error::Pole("rho0_shift_quotient_sl2"));
    }
    Ok(num * num / den)
}

/// `κ` for spin-m `sl2`:
/// `z^{m/2} (q^{2m+2}z; q⁴)/(q^{2m+2}z^{−1}; q⁴) · (q²z^{−1}; q⁴)/(q²z; q⁴)`.
pub fn kappa_sl2(m: u32, z: C, ctx: &QContext) -> Result<C> {
    if z.norm() < POLE_TOL {
        return Err(Error::Pole("kappa_sl2"));
    }
    let mi = m as i32;
    let p = ctx.powi(4);
    let zi = z.inv();
    let a = ctx.powi(2 * mi + 2);
    let n1 = poch(a * z, p, ctx)?;
    let n2 = poch(ctx.powi(2) * zi, p, ctx)?;
    let d1 = poch_den(a * zi, p, ctx, "kappa_sl2")?;
    let d2 = poch_den(ctx.powi(2) * z, p, ctx, "kappa_sl2")?;
    let v = principal_pow(z, m as f64 / 2.0) * n1 * n2 / (d1 * d2);
    if v.norm() < POLE_TOL {
        return Err(Error::Pole("kappa_sl2 (zero)"));
    }
    Ok(v)
}

/// `κ` for `m = 2k` as a finite product:
/// `z^k ∏_{i=1}^{k} (1 − q^{4i−2}z^{−1}) / (1 − q^{4i−2}z)`.
///
/// The printed closed form has each factor inverted; it equals
/// `z^{2k} / kappa_sl2(2k, z)` and is available as
/// [`kappa_sl2_even_rational_printed`].
pub fn kappa_sl2_even_rational(k: u32, z: C, ctx: &QContext) -> Result<C> {
    let v = kappa_sl2_even_rational_printed(k, z, ctx)?;
    if v.norm() < POLE_TOL {
        return Err(Error::Pole("kappa_sl2_even_rational"));
    }
    Ok(z.powi(2 * k as i32) / v)
}

/// `z^k ∏_{i=1}^{k} (1 − q^{4i−2}z) / (1 − q^{4i−2}z^{−1})`, verbatim.
pub fn kappa_sl2_even_rational_printed(k: u32, z: C, ctx: &QContext) -> Result<C> {
    if z.norm() < POLE_TOL {
        return Err(Error::Pole("kappa_sl2_even_rational"));
    }
    let mut v = z.powi(k as i32);
    for i in 1..=k as i32 {
        let a = ctx.powi(4 * i - 2);
        let den = ONE - a * z.inv();
        if den.norm() < POLE_TOL {
            return Err(Error::Pole("kappa_sl2_even_rational"));
        }
        v *= (ONE - a * z) / den;
    }
    Ok(v)
}

/// Values of the two candidate difference-equation patterns at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DifferenceProbe {
    /// `ρ⁰(z′)^{−1} ρ⁰(z)^{−1} κ(z′)^{−1} κ(z)^{−1}`.
    pub all_inverse: C,
    /// `ρ⁰(z′)^{−1} ρ⁰(z) κ(z′)^{−1} κ(z)`.
    pub mixed: C,
    pub expected: C,
    /// Distance of the pattern that is expected to be constant from `expected`.
    pub residual: f64,
}

/// Evaluates both patterns at `z′ = q^{−2}z` and measures the all-inverse one
/// against `(−1)^m`.
pub fn kappa_difference_check_sl2(m: u32, z: C, ctx: &QContext) -> Result<DifferenceProbe> {
    let zs = ctx.powi(-2) * z;
    let (r0, r1) = (rho0_sl2(m, zs, ctx)?, rho0_sl2(m, z, ctx)?);
    let (k0, k1) = (kappa_sl2(m, zs, ctx)?, kappa_sl2(m, z, ctx)?);
    let all_inverse = (r0 * r1 * k0 * k1).inv();
    let mixed = r1 * k1 / (r0 * k0);
    let expected = if m.is_multiple_of(2) { ONE } else { -ONE };
    Ok(DifferenceProbe {
        all_inverse,
        mixed,
        expected,
        residual: (all_inverse - expected).norm(),
    })
}

/// `ρ⁰` for fundamental `sl(l+1)` with `Q = q^{2(l+1)}`:
/// `q^{−l/(l+1)} (q²z; Q)(q^{2l}z; Q) / ((z; Q)(Qz; Q))`.
pub fn rho0_sllpo(l: u32, z: C, ctx: &QContext) -> Result<C> {
    let li = l as i32;
    let big_q = ctx.powi(2 * (li + 1));
    let n1 = poch(ctx.powi(2) * z, big_q, ctx)?;
    let n2 = poch(ctx.powi(2 * li) * z, big_q, ctx)?;
    let d1 = poch_den(z, big_q, ctx, "rho0_sllpo")?;
    let d2 = poch_den(big_q * z, big_q, ctx, "rho0_sllpo")?;
    Ok(ctx.powr(-(l as f64) / (l as f64 + 1.0)) * n1 * n2 / (d1 * d2))
}

/// `ρ⁰` for fundamental `sl(l+1)` through the `F_{l+1}` series:
/// `q^{−l/(l+1)} exp(F_{l+1}(q^{−l}z) − F_{l+1}(q^{l}z))`.
pub fn rho0_sllpo_series(l: u32, z: C, ctx: &QContext) -> Result<C> {
    let li = l as i32;
    let a = f_series(l + 1, ctx.powi(-li) * z, ctx)?.certified(ctx.eps_residual)?;
    let b = f_series(l + 1, ctx.powi(li) * z, ctx)?.certified(ctx.eps_residual)?;
    Ok(ctx.powr(-(l as f64) / (l as f64 + 1.0)) * (a - b).exp())
}

/// The printed finite ratio for `sl(l+1)`:
/// `(1 − q^{−2}z)(1 − q^{−2l}z) / ((1 − z)(1 − q^{−2(l+1)}z))`.
pub fn rho0_ratio_sllpo(l: u32, z: C, ctx: &QContext) -> Result<C> {
    let li = l as i32;
    let den = (ONE - z) * (ONE - ctx.powi(-2 * (li + 1)) * z);
    if den.norm() < POLE_TOL {
        return Err(Error::Pole("rho0_ratio_sllpo"));
    }
    Ok((ONE - ctx.powi(-2) * z) * (ONE - ctx.powi(-2 * li) * z) / den)
}

/// `κ` for fundamental `sl(l+1)`:
/// `z^{l/(l+1)} (q²z^{−1}; Q)(Qz; Q) / ((q²z; Q)(Qz^{−1}; Q))`.
pub fn kappa_sllpo(l: u32, z: C, ctx: &QContext) -> Result<C> {
    if z.norm() < POLE_TOL {
        return Err(Error::Pole("kappa_sllpo"));
    }
    let li = l as i32;
    let big_q = ctx.powi(2 * (li + 1));
    let zi = z.inv();
    let n1 = poch(ctx.powi(2) * zi, big_q, ctx)?;
    let n2 = poch(big_q * z, big_q, ctx)?;
    let d1 = poch_den(ctx.powi(2) * z, big_q, ctx, "kappa_sllpo")?;
    let d2 = poch_den(big_q * zi, big_q, ctx, "kappa_sllpo")?;
    let v = principal_pow(z, l as f64 / (l as f64 + 1.0)) * n1 * n2 / (d1 * d2);
    if v.norm() < POLE_TOL {
        return Err(Error::Pole("kappa_sllpo (zero)"));
    }
    Ok(v)
}

/// Evaluates both patterns at `z′ = q^{−2(l+1)}z` and measures the mixed one
/// against `1`.
pub fn kappa_difference_check_sllpo(l: u32, z: C, ctx: &QContext) -> Result<DifferenceProbe> {
    let zs = ctx.powi(-2 * (l as i32 + 1)) * z;
    let (r0, r1) = (rho0_sllpo(l, zs, ctx)?, rho0_sllpo(l, z, ctx)?);
    let (k0, k1) = (kappa_sllpo(l, zs, ctx)?, kappa_sllpo(l, z, ctx)?);
    let all_inverse = (r0 * r1 * k0 * k1).inv();
    let mixed = r1 * k1 / (r0 * k0);
    Ok(DifferenceProbe {
        all_inverse,
        mixed,
        expected: ONE,
        residual: (mixed - ONE).norm(),
    })
}
