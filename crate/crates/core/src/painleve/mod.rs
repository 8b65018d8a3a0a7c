//! The sixth Painlevé transcendent q = -ϑ_n/ν_n built from the associated
//! system, with the Toda flow, the derivative lemma, φ at the poles, the
//! Hamilton equations and the PVI residual.

use rug::Float;

use crate::error::{Error, Result};
use crate::mobius::{ClosedFormLadder, TildeSystem};
use crate::numerics::{rel_residual, Jet2, Poly};

/// Distance from {0, 1, t} below which q is treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-6;

/// φ = (D̃/w̃₀)(Ã + w̃₀B̃) - C̃²/4 as a polynomial in x.
pub fn phi_poly(ts: &TildeSystem) -> Poly {
    let q = &ts.qx;
    let tw0 = ts.tw0();
    let lhs = &q.d.scale(&tw0.recip()) * &(&q.a + &q.b.scale(tw0));
    let quarter = Jet2::constant(Float::with_val(ts.prec(), 0.25));
    &lhs - &(&q.c * &q.c).scale(&quarter)
}

/// φ(0), φ(1), φ(t) and their relative residuals against -α²t²/4,
/// -β²(t-1)²/4 and -μ²t²(t-1)²/4.
pub fn phi_checks(ts: &TildeSystem) -> ([Jet2; 3], [Float; 3]) {
    let prec = ts.prec();
    let p = &ts.params;
    let phi = phi_poly(ts);
    let t = p.t_jet();
    let t1 = t.add_i(-1);
    let vals = [phi.eval(&Jet2::zero(prec)), phi.eval(&Jet2::one(prec)), phi.eval(&t)];
    let minus_quarter_sq = |c: &Float| Jet2::constant(-Float::with_val(prec, c * c) / 4u32);
    let want = [
        &minus_quarter_sq(&p.alpha) * &t.sqr(),
        &minus_quarter_sq(&p.beta) * &t1.sqr(),
        &minus_quarter_sq(&p.mu) * &(&t * &t1).sqr(),
    ];
    let res = [0, 1, 2].map(|i| rel_residual(&vals[i].v, &want[i].v));
    (vals, res)
}

/// φ(0), φ(1), φ(t); errors if any misses its closed value by more than tol_rel.
pub fn phi_eval(ts: &TildeSystem) -> Result<(Jet2, Jet2, Jet2)> {
    let ([p0, p1, pt], res) = phi_checks(ts);
    for (at, r) in ["x = 0", "x = 1", "x = t"].into_iter().zip(res) {
        if !(r <= ts.ctx.tol_rel()) {
            return Err(Error::PhiMismatch {
                at,
                residual: r.to_f64(),
            });
        }
    }
    Ok((p0, p1, pt))
}

/// Hamiltonian parameters v₁..v₄.
pub type VParams = [Float; 4];

/// δ₁..δ₄ from v₁..v₄.
pub fn delta_from_v(v: &VParams) -> [Float; 4] {
    let prec = v[0].prec();
    let half_sq = |x: Float| Float::with_val(prec, x.square_ref()) / 2u32;
    let d1 = half_sq(Float::with_val(prec, &v[0] - &v[1]));
    let d2 = -half_sq(Float::with_val(prec, &v[2] + &v[3]));
    let d3 = half_sq(Float::with_val(prec, &v[2] - &v[3]));
    let s = Float::with_val(prec, 1u32 - Float::with_val(prec, &v[0] + &v[1]));
    let d4 = (Float::with_val(prec, 1u32) - Float::with_val(prec, s.square_ref())) / 2u32;
    [d1, d2, d3, d4]
}

/// v from v₁-v₂, v₁+v₂, v₃+v₄, v₃-v₄.
pub fn v_from_combinations(diff12: &Float, sum12: &Float, sum34: &Float, diff34: &Float) -> VParams {
    let prec = diff12.prec();
    let half = |a: &Float, b: &Float, plus: bool| {
        let s = if plus {
            Float::with_val(prec, a + b)
        } else {
            Float::with_val(prec, a - b)
        };
        s / 2u32
    };
    [
        half(sum12, diff12, true),
        half(sum12, diff12, false),
        half(sum34, diff34, true),
        half(sum34, diff34, false),
    ]
}

#[derive(Debug, Clone)]
pub struct PainleveState {
    pub n: usize,
    pub t: Float,
    pub nu_n: Jet2,
    pub vartheta_n: Jet2,
    pub xi_n: Jet2,
    pub l_n1: Jet2,
    pub l_n0: Jet2,
    pub q: Jet2,
    pub p: Jet2,
    pub v: VParams,
    pub delta: [Float; 4],
    /// Signs applied to (v₃+v₄, v₃-v₄) by the branch lock.
    pub branch: (i8, i8),
    pub phi0: Jet2,
    pub phi1: Jet2,
    pub phit: Jet2,
}

fn check_nondegenerate(q: &Float, t: &Float) -> Result<()> {
    let prec = q.prec();
    for pole in [Float::new(prec), Float::with_val(prec, 1), t.clone()] {
        if Float::with_val(prec, q - &pole).abs() < DEGENERACY_TOL {
            return Err(Error::DegenerateTranscendent);
        }
    }
    Ok(())
}

/// p from q, l̃_{n,1}, l̃_{n,0} and v.
pub fn p_of(q: &Jet2, l1: &Jet2, l0: &Jet2, nu: &Jet2, t: &Jet2, v: &VParams) -> Jet2 {
    let q1 = q.add_i(-1);
    let qt = q - t;
    let num = &(&(&(nu * &q.sqr()) + &(q * l1).scale_i(2)) - q) + &l0.scale_i(2);
    let c = |x: &Float| Jet2::constant(x.clone());
    let prec = q.prec();
    let s34 = c(&Float::with_val(prec, &v[2] + &v[3]));
    let d34 = c(&Float::with_val(prec, &v[2] - &v[3]));
    let s12 = c(&Float::with_val(prec, &v[0] + &v[1]));
    let main = &num / &(&(q * &q1) * &qt).scale_i(2);
    &(&(&main + &(&s34 / &q.scale_i(2))) + &(&d34 / &q1.scale_i(2))) - &(&s12 / &qt.scale_i(2))
}

impl PainleveState {
    /// State with an explicit choice of v (no branch search).
    pub fn with_v(ts: &TildeSystem, cfl: &ClosedFormLadder, v: VParams, branch: (i8, i8)) -> Result<Self> {
        let (phi0, phi1, phit) = phi_eval(ts)?;
        let nu = cfl.nu_n.clone();
        let q = -(&cfl.vartheta_n / &nu);
        let t = ts.params.t.clone();
        check_nondegenerate(&q.v, &t)?;
        let xi = &(&cfl.vartheta_n * &cfl.l_n1) - &(&nu * &cfl.l_n0);
        let p = p_of(&q, &cfl.l_n1, &cfl.l_n0, &nu, &ts.params.t_jet(), &v);
        let delta = delta_from_v(&v);
        Ok(Self {
            n: cfl.n,
            t,
            nu_n: nu,
            vartheta_n: cfl.vartheta_n.clone(),
            xi_n: xi,
            l_n1: cfl.l_n1.clone(),
            l_n0: cfl.l_n0.clone(),
            q,
            p,
            v,
            delta,
            branch,
            phi0,
            phi1,
            phit,
        })
    }

    /// v with the given v₁-v₂ and the remaining combinations fixed by
    /// v₁+v₂ = 1-μ, v₃+v₄ = ±α, v₃-v₄ = ±β.
    pub fn v_for(ts: &TildeSystem, diff12: &Float, branch: (i8, i8)) -> VParams {
        let p = &ts.params;
        let prec = ts.prec();
        let sum12 = Float::with_val(prec, 1u32 - &p.mu);
        let sum34 = Float::with_val(prec, &p.alpha * branch.0 as i32);
        let diff34 = Float::with_val(prec, &p.beta * branch.1 as i32);
        v_from_combinations(diff12, &sum12, &sum34, &diff34)
    }

    /// Recomputes p (and δ) for a different v.
    pub fn rebranch(&self, t_jet: &Jet2, v: VParams, branch: (i8, i8)) -> Self {
        let mut s = self.clone();
        s.p = p_of(&self.q, &self.l_n1, &self.l_n0, &self.nu_n, t_jet, &v);
        s.delta = delta_from_v(&v);
        s.v = v;
        s.branch = branch;
        s
    }

    /// t(t-1)q' + q - ν_n q² + 2ξ_n/ν_n, relative.
    pub fn q_flow_residual(&self) -> Float {
        let prec = self.q.prec();
        let tt1 = Float::with_val(prec, &self.t * Float::with_val(prec, &self.t - 1u32));
        let lhs = Float::with_val(prec, &tt1 * &self.q.d1);
        let rhs = &(&(&self.nu_n * &self.q.sqr()) - &self.q) - &(&self.xi_n / &self.nu_n).scale_i(2);
        rel_residual(&lhs, &rhs.v)
    }
}

/// State at index n with v₁-v₂ = 1 and the (v₃+v₄, v₃-v₄) signs locked to
/// the branch minimising the Hamilton residuals.
pub fn pvi_state(ts: &TildeSystem, cfl: &ClosedFormLadder) -> Result<PainleveState> {
    pvi_state_with_diff(ts, cfl, &Float::with_val(ts.prec(), 1))
}

/// As [`pvi_state`] but with v₁-v₂ = ν_n, the value for which both Hamilton
/// equations and PVI hold (δ₁ = ν_n²/2).
pub fn pvi_state_derived(ts: &TildeSystem, cfl: &ClosedFormLadder) -> Result<PainleveState> {
    pvi_state_with_diff(ts, cfl, &cfl.nu_n.v)
}

pub fn pvi_state_with_diff(ts: &TildeSystem, cfl: &ClosedFormLadder, diff12: &Float) -> Result<PainleveState> {
    let base = PainleveState::with_v(ts, cfl, PainleveState::v_for(ts, diff12, (1, 1)), (1, 1))?;
    Ok(lock_branch(ts, &base, diff12))
}

/// Among the four sign choices of (v₃+v₄, v₃-v₄), the one with the smallest
/// combined Hamilton residual. Ties keep the earlier candidate, (+, +) first.
pub fn lock_branch(ts: &TildeSystem, st: &PainleveState, diff12: &Float) -> PainleveState {
    let t_jet = ts.params.t_jet();
    let mut best: Option<(Float, PainleveState)> = None;
    for br in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
        let cand = st.rebranch(&t_jet, PainleveState::v_for(ts, diff12, br), br);
        let r1 = hamilton_residual(&cand).unwrap_or_else(|_| Float::with_val(ts.prec(), 1));
        let r2 = hamilton_p_residual(&cand).unwrap_or_else(|_| Float::with_val(ts.prec(), 1));
        let mut r = if r2 > r1 { r2 } else { r1 };
        // residuals at rounding level count as ties
        if r < ts.ctx.tol_rel() {
            r = Float::new(ts.prec());
        }
        if best.as_ref().map_or(true, |(b, _)| r < *b) {
            best = Some((r, cand));
        }
    }
    best.unwrap().1
}

/// Relative residual of q'' against the PVI right-hand side with the given δ.
pub fn pvi_residual_with(st: &PainleveState, delta: &[Float; 4]) -> Result<Float> {
    let prec = st.q.prec();
    let (q, dq, ddq) = (&st.q.v, &st.q.d1, &st.q.d2);
    let t = &st.t;
    check_nondegenerate(q, t)?;
    let f = |x: Float| x;
    let q1 = f(Float::with_val(prec, q - 1u32));
    let qt = f(Float::with_val(prec, q - t));
    let t1 = f(Float::with_val(prec, t - 1u32));
    let inv = |x: &Float| Float::with_val(prec, x.recip_ref());
    let a = Float::with_val(prec, inv(q) + inv(&q1)) + inv(&qt);
    let b = Float::with_val(prec, inv(t) + inv(&t1)) + inv(&qt);
    let dq2 = Float::with_val(prec, dq.square_ref());
    let kin = Float::with_val(prec, &a * &dq2) / 2u32 - Float::with_val(prec, &b * dq);
    let qq = Float::with_val(prec, q * &q1) * &qt;
    let tt = Float::with_val(prec, t * &t1);
    let tt2 = Float::with_val(prec, tt.square_ref());
    let mut bracket = delta[0].clone();
    bracket += Float::with_val(prec, &delta[1] * t) / Float::with_val(prec, q.square_ref());
    bracket += Float::with_val(prec, &delta[2] * &t1) / Float::with_val(prec, q1.square_ref());
    bracket += Float::with_val(prec, &delta[3] * &tt) / Float::with_val(prec, qt.square_ref());
    let rhs = kin + Float::with_val(prec, &qq / &tt2) * bracket;
    Ok(rel_residual(ddq, &rhs))
}

/// PVI residual with the state's own δ.
pub fn pvi_residual(st: &PainleveState) -> Result<Float> {
    pvi_residual_with(st, &st.delta)
}

fn k_poly_parts(st: &PainleveState) -> (Float, Float, Float) {
    let prec = st.q.prec();
    let v = &st.v;
    (
        Float::with_val(prec, &v[2] + &v[3]),
        Float::with_val(prec, &v[2] - &v[3]),
        Float::with_val(prec, &v[0] + &v[1]),
    )
}

/// q' against ∂H/∂p.
pub fn hamilton_residual(st: &PainleveState) -> Result<Float> {
    let prec = st.q.prec();
    let (q, p, t) = (&st.q.v, &st.p.v, &st.t);
    check_nondegenerate(q, t)?;
    let q1 = Float::with_val(prec, q - 1u32);
    let qt = Float::with_val(prec, q - t);
    let (s34, d34, s12) = k_poly_parts(st);
    let k = Float::with_val(prec, &s34 * Float::with_val(prec, &q1 * &qt))
        + Float::with_val(prec, &d34 * Float::with_val(prec, q * &qt))
        - Float::with_val(prec, &s12 * Float::with_val(prec, q * &q1));
    let qq = Float::with_val(prec, q * &q1) * &qt;
    let tt = Float::with_val(prec, t * Float::with_val(prec, t - 1u32));
    let hp = (Float::with_val(prec, &qq * p) * 2u32 - k) / tt;
    Ok(rel_residual(&st.q.d1, &hp))
}

/// p' against -∂H/∂q.
pub fn hamilton_p_residual(st: &PainleveState) -> Result<Float> {
    let prec = st.q.prec();
    let (q, p, t) = (&st.q.v, &st.p.v, &st.t);
    check_nondegenerate(q, t)?;
    let (s34, d34, s12) = k_poly_parts(st);
    let two_q = Float::with_val(prec, q * 2u32);
    let dk = Float::with_val(prec, &s34 * Float::with_val(prec, &two_q - Float::with_val(prec, t + 1u32)))
        + Float::with_val(prec, &d34 * Float::with_val(prec, &two_q - t))
        - Float::with_val(prec, &s12 * Float::with_val(prec, &two_q - 1u32));
    let q2 = Float::with_val(prec, q.square_ref());
    let cubic_d = Float::with_val(prec, &q2 * 3u32) - Float::with_val(prec, Float::with_val(prec, t + 1u32) * &two_q) + t;
    let v = &st.v;
    let c = Float::with_val(prec, &v[2] - &v[0]) * Float::with_val(prec, &v[2] - &v[1]);
    let tt = Float::with_val(prec, t * Float::with_val(prec, t - 1u32));
    let hq = (Float::with_val(prec, &cubic_d * Float::with_val(prec, p.square_ref())) - Float::with_val(prec, &dk * p) + c)
        / tt;
    Ok(rel_residual(&st.p.d1, &Float::with_val(prec, -hq)))
}

/// Toda residuals for β̃_n and ln γ̃_n (n ≥ 1).
pub fn toda_residual(ts: &TildeSystem, n: usize) -> Result<(Float, Float)> {
    let trc = &ts.trc;
    if n == 0 || n + 1 > trc.n() {
        return Err(Error::InvalidParameter(format!("Toda check needs 1 <= n <= {}", trc.n() - 1)));
    }
    let prec = ts.prec();
    let t = &ts.params.t;
    let tt = Float::with_val(prec, t * Float::with_val(prec, t - 1u32));
    let nu = Float::with_val(prec, ts.params.s() + (2 * n + 3) as u32);
    let (b, bm, g, gn) = (&trc.beta[n], &trc.beta[n - 1], &trc.gamma[n], &trc.gamma[n + 1]);
    let lhs_b = Float::with_val(prec, &tt * &b.d1);
    let rhs_b = Float::with_val(prec, &b.v * Float::with_val(prec, &b.v - 1u32))
        + Float::with_val(prec, Float::with_val(prec, &nu + 2u32) * &gn.v)
        - Float::with_val(prec, Float::with_val(prec, &nu - 2u32) * &g.v);
    let lhs_g = Float::with_val(prec, &tt * g.log_derivative());
    let rhs_g = Float::with_val(prec, Float::with_val(prec, &nu + 1u32) * &b.v)
        - Float::with_val(prec, Float::with_val(prec, &nu - 3u32) * &bm.v)
        - 2u32;
    Ok((rel_residual(&lhs_b, &rhs_b), rel_residual(&lhs_g, &rhs_g)))
}

#[derive(Debug, Clone)]
pub struct DerivativeReport {
    pub der_ln0: Float,
    pub der_ln1: Float,
    pub der_vartheta: Float,
    pub det_x0: Float,
    pub det_x1: Float,
    pub det_xt: Float,
    pub ident_ln0: Float,
}

impl DerivativeReport {
    pub fn entries(&self) -> [(&'static str, &Float); 7] {
        [
            ("der-ln0", &self.der_ln0),
            ("der-ln1", &self.der_ln1),
            ("der-vartheta", &self.der_vartheta),
            ("det-x0", &self.det_x0),
            ("det-x1", &self.det_x1),
            ("det-xt", &self.det_xt),
            ("ident-ln0", &self.ident_ln0),
        ]
    }
}

/// Derivative lemma, the determinant evaluations at x ∈ {0, 1, t} and the
/// closed identity for l̃_{n,0}, at index n = cfl.n ≥ 1 (`prev` at n - 1).
pub fn derivative_lemma_residuals(
    ts: &TildeSystem,
    cfl: &ClosedFormLadder,
    prev: &ClosedFormLadder,
    phi: &(Jet2, Jet2, Jet2),
) -> Result<DerivativeReport> {
    let prec = ts.prec();
    let t = ts.params.t_jet();
    let tv = &ts.params.t;
    let t1 = t.add_i(-1);
    let tt = &t * &t1;
    let (nu, th, l1, l0) = (&cfl.nu_n, &cfl.vartheta_n, &cfl.l_n1, &cfl.l_n0);
    let (nup, thp) = (&prev.nu_n, &prev.vartheta_n);
    let g = &ts.trc.gamma[cfl.n + 1];
    let xi = &(th * l1) - &(nu * l0);
    let q = -(th / nu);
    check_nondegenerate(&q.v, tv)?;
    for den in [&(nu + th), &(&(nu * &t) + th)] {
        if den.v.is_zero() {
            return Err(Error::DegenerateTranscendent);
        }
    }
    let (phi0, phi1, phit) = phi;
    let nu1 = nu.add_i(-1);
    let r = |a: &Float, b: &Jet2| rel_residual(a, &b.v);

    let rhs0 = &(l0 / &t) - &(&(g * &(&(nu * thp) - &(th * nup))) / &tt);
    let der_ln0 = r(&l0.d1, &rhs0);
    let rhs1 = &(&(&nu1 / &t1).half() + &(l1 / &t1)) + &(l0 / &tt);
    let der_ln1 = r(&l1.d1, &rhs1);
    let rhs_th = &(&(&(-th) - &th.sqr()) + &xi.scale_i(2)) / &tt;
    let der_vartheta = r(&th.d1, &rhs_th);

    let l_at = |x: &Jet2| &(&(&cfl.l_n2 * &x.sqr()) + &(l1 * x)) + l0;
    let det_x0 = r(&(g * thp).v, &(&(&l0.sqr() + phi0) / th));
    let l_1 = l_at(&Jet2::one(prec));
    let det_x1 = r(
        &(g * nup).v,
        &(&(&(&l_1.sqr() + phi1) / &(nu + th)) - &(g * thp)),
    );
    // Θ̃_n(t) = -(ν_n t + ϑ_n)γ̃_{n+1}; Θ̃_{n-1}(t)/γ̃_n = -(ν_{n-1}t + ϑ_{n-1})
    let l_t = l_at(&t);
    let theta_t = -(&(&(nu * &t) + th) * g);
    let lhs_t = -(&(nup * &t) + thp);
    let det_xt = r(&lhs_t.v, &(&(&l_t.sqr() + phit) / &theta_t));

    let first = &(&(-(phi0 / &(&t * &nu1))) + &(&(th * phi1) / &(&(&t1 * &nu1) * &(nu + th))))
        - &(&(th * phit) / &(&(&tt * &nu1) * &(&(nu * &t) + th)));
    let quarter = Jet2::constant(Float::with_val(prec, 0.25));
    let inner = &(&(&nu1 * th) * &(&(&(&t * &t.add_i(1)) * nu) + &(&(&t.sqr() + &t).add_i(1) * th))) * &quarter;
    let mid = &(&(nu * &t) + &(&t.add_i(1) * th)) * &xi;
    let tail = &xi.sqr() / &nu1;
    let second = &(&(&inner + &mid) + &tail) / &(&(nu + th) * &(&(nu * &t) + th));
    let ident_ln0 = r(&l0.v, &(&first - &second));

    Ok(DerivativeReport {
        der_ln0,
        der_ln1,
        der_vartheta,
        det_x0,
        det_x1,
        det_xt,
        ident_ln0,
    })
}
