//! The associated system f̃ = x - β₀ - w₀/f: its moments, Riccati data in x
//! and t, and the closed-form ladder coefficients.

use rug::Float;

use crate::error::{Error, Result};
use crate::laxpairs::{ladder_lenient, ladder_t, ladder_x, LadderData};
use crate::numerics::{rel_residual, Jet2, Poly, PrecisionContext};
use crate::opseq::{hankel_ratio_logderiv, recurrence_to, RecurrenceCoeffs};
use crate::weights::{
    moment_table, pearson_quadruple_t, pearson_quadruple_x, Direction, MomentTable, RiccatiQuadruple,
    WeightParams,
};

/// w̃_n = (w_{n+2} - β₀w_{n+1} - Σ_{k=1}^n w_k w̃_{n-k}) / w₀ for n = 0..=N.
pub fn tilde_moments(m: &MomentTable, beta0: &Jet2, n: usize) -> Result<MomentTable> {
    if m.w.len() < n + 3 {
        return Err(Error::InvalidParameter(format!(
            "{} base moments cannot give tilde moments up to {n}",
            m.w.len()
        )));
    }
    let w = &m.w;
    let inv_w0 = w[0].recip();
    let mut out: Vec<Jet2> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut acc = &w[k + 2] - &(beta0 * &w[k + 1]);
        for j in 1..=k {
            acc -= &(&w[j] * &out[k - j]);
        }
        out.push(&acc * &inv_w0);
    }
    Ok(MomentTable::from_jets(m.params.clone(), out))
}

fn cst(v: &Float) -> Jet2 {
    Jet2::constant(v.clone())
}

/// (Ã, B̃, C̃, D̃) from the explicit coefficient formulas in α, β, μ, t, β₀.
pub fn tilde_quadruple_x(params: &WeightParams, beta0: &Jet2) -> RiccatiQuadruple {
    let prec = params.prec();
    let t = params.t_jet();
    let one = Jet2::one(prec);
    let (al, be, mu) = (cst(&params.alpha), cst(&params.beta), cst(&params.mu));
    let s = cst(&params.s());
    let ab = &al + &be;
    let a = Poly::new(prec, vec![Jet2::zero(prec), t.clone(), -(&one + &t), one.clone()]);

    // B̃(0) = -(2+s)β₀ + 1+α+μ + (1+α+β)t
    let b0 = &(&(-(&s.add_i(2) * beta0)) + &(&al + &mu).add_i(1)) + &(&ab.add_i(1) * &t);
    let b = Poly::new(prec, vec![b0.clone(), -s.add_i(1)]);

    let c1 = &(&(-(&al + &mu).add_i(2)) - &(&ab.add_i(2) * &t)) + &beta0.scale_i(2);
    let c0 = &(-(&al * &t)) + &(&b0 * beta0).scale_i(2);
    let c = Poly::new(prec, vec![c0, c1, s.add_i(2)]);

    let b2 = beta0.sqr();
    let lin = &(&(&s.add_i(3) * &b2) - &(&(&(&al + &mu).add_i(2) + &(&ab.add_i(2) * &t)) * beta0))
        + &(&al.add_i(1) * &t);
    let c_lin = &(&al + &mu).add_i(1) + &(&ab.add_i(1) * &t);
    let d0 = &(&(-(&s.add_i(2) * &(&b2 * beta0))) + &(&c_lin * &b2)) - &(&(&al * &t) * beta0);
    let d = Poly::new(prec, vec![d0, lin]);
    RiccatiQuadruple {
        a,
        b,
        c,
        d,
        direction: Direction::X,
    }
}

/// The same quadruple obtained by substituting f = w₀/(x - β₀ - f̃) into the
/// base Pearson equation: B̃ = D/w₀, C̃ = -C - 2(x-β₀)D/w₀,
/// D̃ = A + C(x-β₀) + (D/w₀)(x-β₀)².
pub fn tilde_quadruple_x_from_base(base: &RiccatiQuadruple, w0: &Jet2, beta0: &Jet2) -> RiccatiQuadruple {
    let xb = Poly::x_minus(beta0);
    let dw = base.d.scale(&w0.recip());
    let c = &(-&base.c) - &(&xb * &dw).scale(&Jet2::from_i64(w0.prec(), 2));
    let d = &(&base.a + &(&base.c * &xb)) + &(&dw * &(&xb * &xb));
    RiccatiQuadruple {
        a: base.a.clone(),
        b: dw,
        c,
        d,
        direction: Direction::X,
    }
}

/// (Â, B̂, Ĉ, D̂) = (x - t, L, -Lx + (2β₀ - t)L + μ, -(β₀ - t)β₀') with L = ∂_t ln w₀.
pub fn tilde_quadruple_t(params: &WeightParams, w0: &Jet2, beta0: &Jet2) -> RiccatiQuadruple {
    let prec = params.prec();
    let t = params.t_jet();
    let lw = &w0.derivative() / w0;
    let c0 = &(&(&beta0.scale_i(2) - &t) * &lw) + &cst(&params.mu);
    let d = -(&(beta0 - &t) * &beta0.derivative());
    RiccatiQuadruple {
        a: Poly::x_minus(&t),
        b: Poly::constant(lw.clone()),
        c: Poly::new(prec, vec![c0, -lw]),
        d: Poly::constant(d),
        direction: Direction::T,
    }
}

/// Test hook: a deliberate perturbation of one tilde recurrence coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Corruption {
    Gamma { n: usize, factor: f64 },
    Beta { n: usize, factor: f64 },
}

#[derive(Debug, Clone)]
pub struct TildeSystem {
    pub params: WeightParams,
    pub ctx: PrecisionContext,
    pub n_max: usize,
    pub base: MomentTable,
    /// Base recurrence up to n_max + 2.
    pub rc: RecurrenceCoeffs,
    pub base_qx: RiccatiQuadruple,
    pub base_qt: RiccatiQuadruple,
    /// w̃_0..w̃_{2 n_max + 3}
    pub tmoments: MomentTable,
    /// Tilde recurrence up to n_max + 1, from the tilde moments.
    pub trc: RecurrenceCoeffs,
    /// Tilde recurrence up to n_max + 1, from the index shift of `rc`.
    pub trc_shift: RecurrenceCoeffs,
    pub qx: RiccatiQuadruple,
    pub qt: RiccatiQuadruple,
    /// Set once a corruption is applied; ladders then skip degree checks.
    pub lenient: bool,
}

impl TildeSystem {
    /// Number of base moments (0..=k) needed for ladders up to n_max.
    pub fn moments_needed(n_max: usize) -> usize {
        2 * n_max + 5
    }

    pub fn new(params: &WeightParams, n_max: usize, ctx: &PrecisionContext) -> Result<Self> {
        let m = moment_table(params, Self::moments_needed(n_max), ctx)?;
        Self::from_moments(m, n_max, ctx)
    }

    pub fn from_moments(base: MomentTable, n_max: usize, ctx: &PrecisionContext) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::InvalidParameter("n_max must be at least 1".into()));
        }
        let params = base.params.clone();
        let rc = recurrence_to(&base, n_max + 2, ctx)?;
        let w0 = rc.w0().clone();
        let beta0 = rc.beta[0].clone();
        let base_qx = pearson_quadruple_x(&params, &w0, &beta0);
        let base_qt = pearson_quadruple_t(&params, &w0, &beta0, ctx)?;
        let tmoments = tilde_moments(&base, &beta0, 2 * n_max + 3)?;
        let trc = recurrence_to(&tmoments, n_max + 1, ctx)?;
        let trc_shift = rc.shifted();
        let qx = tilde_quadruple_x(&params, &beta0);
        let qt = tilde_quadruple_t(&params, &w0, &beta0);
        Ok(Self {
            params,
            ctx: *ctx,
            n_max,
            base,
            rc,
            base_qx,
            base_qt,
            tmoments,
            trc,
            trc_shift,
            qx,
            qt,
            lenient: false,
        })
    }

    pub fn w0(&self) -> &Jet2 {
        self.rc.w0()
    }

    pub fn beta0(&self) -> &Jet2 {
        &self.rc.beta[0]
    }

    pub fn tw0(&self) -> &Jet2 {
        self.trc.w0()
    }

    pub fn prec(&self) -> u32 {
        self.ctx.bits()
    }

    pub fn corrupt(&mut self, c: Corruption) -> Result<()> {
        let (v, n, factor) = match c {
            Corruption::Gamma { n, factor } => (&mut self.trc.gamma, n, factor),
            Corruption::Beta { n, factor } => (&mut self.trc.beta, n, factor),
        };
        let slot = v
            .get_mut(n)
            .ok_or_else(|| Error::InvalidParameter(format!("corruption index {n} out of range")))?;
        *slot = slot.scale(&Float::with_val(self.ctx.bits(), factor));
        self.lenient = true;
        Ok(())
    }

    fn ladder(&self, q: &RiccatiQuadruple, w0: &Jet2, rc: &RecurrenceCoeffs) -> Result<LadderData> {
        if self.lenient {
            ladder_lenient(q, w0, rc, self.n_max, &self.ctx)
        } else if q.direction == Direction::X {
            ladder_x(q, w0, rc, self.n_max, &self.ctx)
        } else {
            ladder_t(q, w0, rc, self.n_max, &self.ctx)
        }
    }

    pub fn base_ladder_x(&self) -> Result<LadderData> {
        ladder_x(&self.base_qx, self.w0(), &self.rc, self.n_max, &self.ctx)
    }

    pub fn base_ladder_t(&self) -> Result<LadderData> {
        ladder_t(&self.base_qt, self.w0(), &self.rc, self.n_max, &self.ctx)
    }

    pub fn tilde_ladder_x(&self) -> Result<LadderData> {
        self.ladder(&self.qx, self.tw0(), &self.trc)
    }

    pub fn tilde_ladder_t(&self) -> Result<LadderData> {
        self.ladder(&self.qt, self.tw0(), &self.trc)
    }

    /// Largest relative mismatch between the Hankel and the shifted tilde
    /// coefficients, over β̃_0..β̃_{n} and γ̃_0..γ̃_{n}.
    pub fn shift_mismatch(&self, n: usize) -> Float {
        let mut worst = self.ctx.zero();
        for k in 0..=n.min(self.trc.n()) {
            for (a, b) in [
                (&self.trc.beta[k], &self.trc_shift.beta[k]),
                (&self.trc.gamma[k], &self.trc_shift.gamma[k]),
            ] {
                let r = rel_residual(&a.v, &b.v);
                if r > worst {
                    worst = r;
                }
            }
        }
        worst
    }
}

#[derive(Debug, Clone)]
pub struct ClosedFormLadder {
    pub n: usize,
    pub nu_n: Jet2,
    pub vartheta_n: Jet2,
    pub l_n2: Jet2,
    pub l_n1: Jet2,
    pub l_n0: Jet2,
    /// l̃_{n,0} with the two extra terms of the commonly quoted form.
    pub l_n0_as_printed: Jet2,
    pub theta_n1: Jet2,
    pub theta_n0: Jet2,
    pub lhat_n1: Jet2,
    pub lhat_n0: Jet2,
    pub thetahat_n: Jet2,
}

/// Closed-form tilde ladder coefficients at index n (needs trc up to n+1).
pub fn closed_form_ladder(ts: &TildeSystem, n: usize) -> Result<ClosedFormLadder> {
    let trc = &ts.trc;
    if n + 1 > trc.n() {
        return Err(Error::InvalidParameter(format!(
            "closed forms at n = {n} need tilde coefficients up to {}",
            n + 1
        )));
    }
    let p = &ts.params;
    let prec = ts.prec();
    let t = p.t_jet();
    let one_t = t.add_i(1);
    let (al, be, mu) = (cst(&p.alpha), cst(&p.beta), cst(&p.mu));
    let beta0 = ts.beta0();
    let lw = &ts.w0().derivative() / ts.w0();

    let nu = cst(&p.s()).add_i(2 * n as i64 + 5);
    let nu1 = nu.add_i(-1);
    let gnext = &trc.gamma[n + 1];
    let bnext = &trc.beta[n + 1];

    let mut sum_b = Jet2::zero(prec);
    let mut sum_quad = Jet2::zero(prec);
    let mut sum_db = Jet2::zero(prec);
    for j in 0..=n {
        let b = &trc.beta[j];
        sum_b += b;
        sum_quad += &(&(&b.sqr() - &(&one_t * b)) + &trc.gamma[j].scale_i(2));
        sum_db += &b.derivative();
    }
    let mut sum_lg = lw.clone();
    for g in &trc.gamma[..=n + 1] {
        sum_lg += &(&g.derivative() / g);
    }

    let vartheta = &(&(&(&nu * &(bnext - &one_t)) + &sum_b.scale_i(2)) + bnext)
        + &(&(&(&mu * &t) + &be) + &beta0.scale_i(2));
    let l_n2 = nu1.half();
    let l_n1 = &(&(&sum_b - &(&nu1 * &one_t).half()) + &(&be + &(&mu * &t)).half()) + beta0;
    let common = &(&sum_quad + &(&nu1 * &t).half()) + &(&nu * gnext);
    let l_n0 = &(&common + &(beta0 * &(beta0 - &one_t))) - &(&(&be + &mu) * &t).half();
    let amt2 = &al + &(&mu * &t.sqr());
    let l_n0_as_printed = &(&(&(&(&common - &(&one_t * &(&al + &(&mu * &t))).half()) + &amt2.half())
        + &(beta0 * &(&(beta0 - &one_t) - &be)))
        - &(&(&be + &mu) * &t).half())
        - &amt2.half();
    let theta_n1 = -(&nu * gnext);
    let theta_n0 = -(&vartheta * gnext);
    let lhat_n1 = -lw.half();
    let lhat_n0 = &(&(&(&beta0.scale_i(2) - &t) * &lw) + &mu).half() - &sum_db;
    let thetahat_n = &sum_lg * gnext;
    Ok(ClosedFormLadder {
        n,
        nu_n: nu,
        vartheta_n: vartheta,
        l_n2,
        l_n1,
        l_n0,
        l_n0_as_printed,
        theta_n1,
        theta_n0,
        lhat_n1,
        lhat_n0,
        thetahat_n,
    })
}

/// Per-coefficient relative mismatches between a closed-form ladder and the
/// recursion output at the same n.
#[derive(Debug, Clone)]
pub struct LadderComparison {
    pub n: usize,
    pub l: Float,
    pub theta: Float,
    pub lhat: Float,
    pub thetahat: Float,
    /// Discrepancy of the as-printed l̃_{n,0} against the recursion.
    pub l_n0_as_printed: Float,
}

impl LadderComparison {
    pub fn max(&self) -> Float {
        [&self.l, &self.theta, &self.lhat, &self.thetahat]
            .into_iter()
            .fold(Float::new(self.l.prec()), |m, r| if *r > m { r.clone() } else { m })
    }
}

fn worst(pairs: &[(&Jet2, Jet2)]) -> Float {
    let mut w = Float::new(pairs[0].0.prec());
    for (a, b) in pairs {
        let r = rel_residual(&a.v, &b.v);
        if r > w || r.is_nan() {
            w = r;
        }
    }
    w
}

pub fn compare_closed_form(cfl: &ClosedFormLadder, ldx: &LadderData, ldt: &LadderData) -> LadderComparison {
    let n = cfl.n as isize;
    let (l, th) = (ldx.l(n), ldx.theta(n));
    let (lh, thh) = (ldt.l(n), ldt.theta(n));
    LadderComparison {
        n: cfl.n,
        l: worst(&[(&cfl.l_n2, l.coeff(2)), (&cfl.l_n1, l.coeff(1)), (&cfl.l_n0, l.coeff(0))]),
        theta: worst(&[(&cfl.theta_n1, th.coeff(1)), (&cfl.theta_n0, th.coeff(0))]),
        lhat: worst(&[(&cfl.lhat_n1, lh.coeff(1)), (&cfl.lhat_n0, lh.coeff(0))]),
        thetahat: worst(&[(&cfl.thetahat_n, thh.coeff(0))]),
        l_n0_as_printed: worst(&[(&cfl.l_n0_as_printed, l.coeff(0))]),
    }
}

/// l̂_n + l̃_n(t)/(t(t-1)) and Θ̂_n + Θ̃_n(t)/(t(t-1)), as the larger relative
/// residual of the two.
pub fn residue_matching(ldx: &LadderData, ldt: &LadderData, n: usize) -> Float {
    let prec = ldx.prec();
    let ni = n as isize;
    let t = ldx.quadruple.a.coeff(1);
    let tj = Jet2::constant(Float::with_val(prec, &t.v));
    let tt1 = Float::with_val(prec, &t.v * Float::with_val(prec, &t.v - 1u32));
    let mut w = Float::new(prec);
    for (hat, tilde) in [(ldt.l(ni), ldx.l(ni)), (ldt.theta(ni), ldx.theta(ni))] {
        let h = hat.eval(&tj).v;
        let r = Float::with_val(prec, -(tilde.eval(&tj).v / &tt1));
        let res = rel_residual(&h, &r);
        if res > w || res.is_nan() {
            w = res;
        }
    }
    w
}

#[derive(Debug, Clone)]
pub struct AuxReport {
    /// Θ̂_n in its alternative summed form against the recursion.
    pub another_thetahat: Float,
    pub w0_via_beta0: Float,
    pub w0_via_beta0_as_printed: Float,
    /// `None` when μ = 0 (the relation is 0/0).
    pub tildebeta_beta: Option<Float>,
    pub gn: Float,
}

/// Auxiliary identities at index n (needs trc up to n+1 and the tilde t-ladder).
pub fn auxiliary_identities(ts: &TildeSystem, ldt: &LadderData, n: usize) -> Result<AuxReport> {
    let p = &ts.params;
    let prec = ts.prec();
    let trc = &ts.trc;
    let t = p.t_jet();
    let beta0 = ts.beta0();
    let lw = &ts.w0().derivative() / ts.w0();
    let tw0 = ts.tw0();

    // (i)
    let mut alt = &(&(&t - &trc.beta[0]) * &trc.beta[0].derivative()) + &(tw0 * &lw);
    for j in 1..=n {
        let (b, g) = (&trc.beta[j], &trc.gamma[j]);
        alt -= &g.derivative();
        alt += &(&t * &b.derivative());
        alt -= &b.sqr().derivative().half();
    }
    let another_thetahat = rel_residual(&ldt.theta(n as isize).coeff(0).v, &alt.v);

    // (ii)
    // w̃₀ = -d₁₁/(3+s) with d₁₁ the x-coefficient of D̃. The commonly quoted
    // form has 2+α+β+μ where D̃ carries 2+α+μ; both are reported.
    let s = cst(&p.s());
    let ab2t = &cst(&Float::with_val(prec, &p.alpha + &p.beta)).add_i(2) * &t;
    let tail = &cst(&p.alpha).add_i(1) * &t;
    let k_of = |lead: Jet2| &(&(&(&lead + &ab2t) * beta0) - &tail) / &s.add_i(3);
    let k = k_of(cst(&Float::with_val(prec, &p.alpha + &p.mu)).add_i(2));
    let k_printed = k_of(s.add_i(2));
    let w0_via_beta0 = rel_residual(&tw0.v, &(&(-beta0.sqr()) + &k).v);
    let w0_via_beta0_as_printed = rel_residual(&tw0.v, &(&(-beta0.sqr()) + &k_printed).v);

    // (iii)
    let tildebeta_beta = if p.mu_is_zero() {
        None
    } else {
        let db0 = beta0.derivative();
        let num = &(&(&trc.beta[0] - &t) * &(beta0 - &t)) * &db0;
        let den = &(&(&(beta0 - &t) * &lw) - &db0) - &trc.beta[0].derivative();
        let lhs = &num / &den;
        let rhs = &beta0.sqr() - &k;
        Some(rel_residual(&lhs.v, &rhs.v))
    };

    // (iv)
    let mut lhs = Jet2::zero(prec);
    for g in &trc.gamma[1..=n + 1] {
        lhs += &(&g.derivative() / g);
    }
    let rhs = hankel_ratio_logderiv(trc, n)?;
    let gn = rel_residual(&lhs.v, &rhs.v);

    Ok(AuxReport {
        another_thetahat,
        w0_via_beta0,
        w0_via_beta0_as_printed,
        tildebeta_beta,
        gn,
    })
}

#[cfg(test)]
mod tests;
