//! Evaluation representations `φ^m_ζ` of `U_q(L(sl2))`, their duals and the
//! distinguished operators `X`, `O`, `X̃` and `A^α`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{diag, kron, Mat, C, ONE};
use crate::scalarlib::{q_number, LieData, QContext};

/// Spectral-parameter grading `(s_0, s_1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GradingChoice {
    pub s0: u32,
    pub s1: u32,
}

impl GradingChoice {
    pub fn new(s0: u32, s1: u32) -> Result<Self> {
        if s0 == 0 && s1 == 0 {
            return Err(Error::Config("grading (s0, s1) must not be (0, 0)".into()));
        }
        Ok(Self { s0, s1 })
    }

    pub fn symmetric() -> Self {
        Self { s0: 1, s1: 1 }
    }

    pub fn s(&self) -> u32 {
        self.s0 + self.s1
    }

    /// `ε = 4/s`.
    pub fn epsilon(&self) -> f64 {
        LieData::a1().epsilon(self.s())
    }

    /// `δ = −2/s`.
    pub fn delta(&self) -> f64 {
        -2.0 / self.s() as f64
    }

    /// `ω = ε + δ = 2/s`.
    pub fn omega(&self) -> f64 {
        self.epsilon() + self.delta()
    }

    /// Coefficient `c` in `x = c h_1`.
    pub fn x_coefficient(&self) -> f64 {
        LieData::a1().x_coefficients(&[self.s0, self.s1])[0]
    }
}

/// Generators whose images are represented.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Generator {
    E0,
    E1,
    F0,
    F1,
    /// `q^{ν h_0}`.
    K0(C),
    /// `q^{ν h_1}`.
    K1(C),
}

impl Generator {
    /// The six generators used for intertwining conditions.
    pub fn standard() -> [Generator; 6] {
        [
            Generator::E0,
            Generator::E1,
            Generator::F0,
            Generator::F1,
            Generator::K0(ONE),
            Generator::K1(ONE),
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            Generator::E0 => "e0",
            Generator::E1 => "e1",
            Generator::F0 => "f0",
            Generator::F1 => "f1",
            Generator::K0(_) => "qh0",
            Generator::K1(_) => "qh1",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SiteKind {
    V,
    VDual,
}

impl SiteKind {
    pub fn label(&self) -> &'static str {
        match self {
            SiteKind::V => "V",
            SiteKind::VDual => "V*",
        }
    }
}

/// `φ^m` or one of its iterated antipode duals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalRep {
    pub m: usize,
    pub grading: GradingChoice,
    pub ctx: QContext,
    dual_order: u8,
}

pub fn build_eval_rep(m: usize, grading: GradingChoice, ctx: &QContext) -> EvalRep {
    EvalRep {
        m,
        grading,
        ctx: *ctx,
        dual_order: 0,
    }
}

impl EvalRep {
    pub fn dim(&self) -> usize {
        self.m + 1
    }

    pub fn dual_order(&self) -> u8 {
        self.dual_order
    }

    /// `h_1` eigenvalues `m − 2i + 2`, `i = 1..m+1`, of the undualized module.
    pub fn weights(&self) -> Vec<f64> {
        (0..=self.m).map(|i| self.m as f64 - 2.0 * i as f64).collect()
    }

    pub fn antipode_dual(&self) -> EvalRep {
        EvalRep {
            dual_order: self.dual_order + 1,
            ..*self
        }
    }

    pub fn for_kind(&self, kind: SiteKind) -> EvalRep {
        let base = EvalRep { dual_order: 0, ..*self };
        match kind {
            SiteKind::V => base,
            SiteKind::VDual => base.antipode_dual(),
        }
    }

    pub fn gen(&self, g: Generator, zeta: C) -> Mat {
        if self.dual_order == 0 {
            return self.base_gen(g, zeta);
        }
        let prev = EvalRep {
            dual_order: self.dual_order - 1,
            ..*self
        };
        let img = match g {
            Generator::K0(nu) => prev.gen(Generator::K0(-nu), zeta),
            Generator::K1(nu) => prev.gen(Generator::K1(-nu), zeta),
            Generator::E0 => -(prev.gen(Generator::K0(-ONE), zeta) * prev.gen(g, zeta)),
            Generator::E1 => -(prev.gen(Generator::K1(-ONE), zeta) * prev.gen(g, zeta)),
            Generator::F0 => -(prev.gen(g, zeta) * prev.gen(Generator::K0(ONE), zeta)),
            Generator::F1 => -(prev.gen(g, zeta) * prev.gen(Generator::K1(ONE), zeta)),
        };
        img.transpose()
    }

    fn base_gen(&self, g: Generator, zeta: C) -> Mat {
        let m = self.m;
        let d = m + 1;
        let ctx = &self.ctx;
        let qq = |i: usize| {
            let a = q_number(C::new(i as f64, 0.0), ctx).unwrap_or(ONE);
            let b = q_number(C::new((m - i + 1) as f64, 0.0), ctx).unwrap_or(ONE);
            a * b
        };
        let (s0, s1) = (self.grading.s0 as i32, self.grading.s1 as i32);
        let mut out = Mat::zeros(d, d);
        match g {
            Generator::K1(nu) | Generator::K0(nu) => {
                let sign = if matches!(g, Generator::K1(_)) { 1.0 } else { -1.0 };
                let entries: Vec<C> = self.weights().iter().map(|w| ctx.pow(nu * (sign * w))).collect();
                return diag(&entries);
            }
            Generator::E1 => {
                let z = zeta.powi(s1);
                for i in 1..=m {
                    out[(i - 1, i)] = z * qq(i);
                }
            }
            Generator::F1 => {
                let z = zeta.powi(-s1);
                for i in 1..=m {
                    out[(i, i - 1)] = z;
                }
            }
            Generator::E0 => {
                let z = zeta.powi(s0);
                for i in 1..=m {
                    out[(i, i - 1)] = z;
                }
            }
            Generator::F0 => {
                let z = zeta.powi(-s0);
                for i in 1..=m {
                    out[(i - 1, i)] = z * qq(i);
                }
            }
        }
        out
    }
}

/// A module placed at a site together with its spectral parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiteModule {
    pub kind: SiteKind,
    pub rep: EvalRep,
    pub zeta: C,
}

impl SiteModule {
    pub fn new(kind: SiteKind, rep: &EvalRep, zeta: C) -> Self {
        Self {
            kind,
            rep: rep.for_kind(SiteKind::V),
            zeta,
        }
    }

    /// Index of the highest weight vector (0-based).
    pub fn hw_index(&self) -> usize {
        match self.kind {
            SiteKind::V => 0,
            SiteKind::VDual => self.rep.m,
        }
    }

    pub fn dim(&self) -> usize {
        self.rep.dim()
    }

    pub fn gen(&self, g: Generator) -> Mat {
        self.rep.for_kind(self.kind).gen(g, self.zeta)
    }
}

/// `(φ_1 ⊗ φ_2)(Δ(g))` with `Δ(e) = e⊗1 + q^h⊗e`, `Δ(f) = f⊗q^{−h} + 1⊗f`.
pub fn coproduct_image(g: Generator, site1: &SiteModule, site2: &SiteModule) -> Mat {
    let id1 = Mat::identity(site1.dim(), site1.dim());
    let id2 = Mat::identity(site2.dim(), site2.dim());
    let k = |s: &SiteModule, g: Generator, nu: C| match g {
        Generator::E0 | Generator::F0 => s.gen(Generator::K0(nu)),
        _ => s.gen(Generator::K1(nu)),
    };
    match g {
        Generator::K0(_) | Generator::K1(_) => kron(&site1.gen(g), &site2.gen(g)),
        Generator::E0 | Generator::E1 => kron(&site1.gen(g), &id2) + kron(&k(site1, g, ONE), &site2.gen(g)),
        Generator::F0 | Generator::F1 => kron(&site1.gen(g), &k(site2, g, -ONE)) + kron(&id1, &site2.gen(g)),
    }
}

/// `X = φ(q^x)` with `x = (2 s_1/s − 1) h_1`.
pub fn operator_x(m: usize, grading: GradingChoice, ctx: &QContext) -> Mat {
    let c = grading.x_coefficient();
    build_eval_rep(m, grading, ctx).gen(Generator::K1(C::new(c, 0.0)), ONE)
}

/// `O = Σ_i (−1)^{m−i+1} q^{(m−i+1)(2−2s_0/s−i)} E_{m−i+2, i}`.
pub fn operator_o(m: usize, grading: GradingChoice, ctx: &QContext) -> Mat {
    let d = m + 1;
    let s0s = grading.s0 as f64 / grading.s() as f64;
    let mut o = Mat::zeros(d, d);
    for i in 1..=d {
        let k = (m + 1 - i) as f64;
        let sign = if (m + 1 - i).is_multiple_of(2) { 1.0 } else { -1.0 };
        o[(m + 1 - i, i - 1)] = ctx.powr(k * (2.0 - 2.0 * s0s - i as f64)) * sign;
    }
    o
}

/// `A^α = φ(q^{α h_1})` on `V`, its dual image on `V*`.
pub fn operator_a(alpha: C, m: usize, kind: SiteKind, ctx: &QContext) -> Mat {
    let rep = build_eval_rep(m, GradingChoice::symmetric(), ctx).for_kind(kind);
    rep.gen(Generator::K1(alpha), ONE)
}

/// The operators attached to a representation and grading.
#[derive(Debug, Clone, PartialEq)]
pub struct DistinguishedOps {
    pub x: Mat,
    pub x_dual: Mat,
    pub o: Mat,
    pub xtilde: Mat,
    pub alpha: C,
    pub a_alpha: Mat,
    pub a_alpha_dual: Mat,
    pub epsilon: f64,
    pub delta: f64,
    pub omega: f64,
}

impl DistinguishedOps {
    pub fn new(rep: &EvalRep, alpha: C) -> Self {
        let (m, g, ctx) = (rep.m, rep.grading, &rep.ctx);
        let x = operator_x(m, g, ctx);
        let c = C::new(g.x_coefficient(), 0.0);
        let x_dual = rep.for_kind(SiteKind::VDual).gen(Generator::K1(c), ONE);
        let o = operator_o(m, g, ctx);
        let xtilde = o.transpose() * &x;
        Self {
            x,
            x_dual,
            o,
            xtilde,
            alpha,
            a_alpha: operator_a(alpha, m, SiteKind::V, ctx),
            a_alpha_dual: operator_a(alpha, m, SiteKind::VDual, ctx),
            epsilon: g.epsilon(),
            delta: g.delta(),
            omega: g.omega(),
        }
    }

    pub fn x_for(&self, kind: SiteKind) -> &Mat {
        match kind {
            SiteKind::V => &self.x,
            SiteKind::VDual => &self.x_dual,
        }
    }

    pub fn a_for(&self, kind: SiteKind) -> &Mat {
        match kind {
            SiteKind::V => &self.a_alpha,
            SiteKind::VDual => &self.a_alpha_dual,
        }
    }
}

fn unit(d: usize, i: usize, j: usize) -> Mat {
    let mut m = Mat::zeros(d, d);
    m[(i - 1, j - 1)] = ONE;
    m
}

fn qn(k: i64, c: &QContext) -> C {
    let q = c.q();
    (q.powi(k as i32) - q.powi(-k as i32)) / (q - q.inv())
}

/// The dual families `φ^{m*}_ζ` exactly as displayed, entry by entry, for
/// comparison with [`EvalRep::antipode_dual`].
pub fn displayed_dual_family(m: usize, g: Generator, zeta: C, gr: GradingChoice, c: &QContext) -> Mat {
    let d = m + 1;
    let mi = m as i64;
    let (s0, s1) = (gr.s0 as i32, gr.s1 as i32);
    let mut out = Mat::zeros(d, d);
    for i in 1..=m {
        let ii = i as i64;
        let pair = qn(ii, c) * qn(mi - ii + 1, c);
        match g {
            Generator::E0 => out += unit(d, i, i + 1) * (-zeta.powi(s0) * c.powi((mi - 2 * ii) as i32)),
            Generator::E1 => out += unit(d, i + 1, i) * (-zeta.powi(s1) * c.powi(-(mi - 2 * ii + 2) as i32) * pair),
            Generator::F0 => out += unit(d, i + 1, i) * (-zeta.powi(-s0) * c.powi(-(mi - 2 * ii) as i32) * pair),
            Generator::F1 => out += unit(d, i, i + 1) * (-zeta.powi(-s1) * c.powi((mi - 2 * ii + 2) as i32)),
            _ => {}
        }
    }
    match g {
        Generator::K0(nu) | Generator::K1(nu) => {
            let sign = if matches!(g, Generator::K0(_)) { 1.0 } else { -1.0 };
            let entries: Vec<C> = (1..=d)
                .map(|i| c.pow(nu * sign * (mi - 2 * i as i64 + 2) as f64))
                .collect();
            diag(&entries)
        }
        _ => out,
    }
}
