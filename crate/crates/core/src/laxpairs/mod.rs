//! Ladder polynomials (l_n, Θ_n) in x and (l̂_n, Θ̂_n) in t, the Lax matrices
//! built from them, and residual checks of the Sylvester, trace, determinant
//! and compatibility identities.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Float;

use crate::error::{Error, Result};
use crate::numerics::mat2::{jm_add, jm_mul, jm_residual, jm_sub};
use crate::numerics::{rel_residual, Jet2, JetMat, Mat2, Poly, PrecisionContext};
use crate::opseq::{eval_polys, RecurrenceCoeffs};
use crate::weights::{Direction, RiccatiQuadruple};

#[derive(Debug, Clone)]
pub struct LadderData {
    pub direction: Direction,
    /// l_{-1}..l_N; use [`LadderData::l`]
    pub l: Vec<Poly>,
    /// Θ_{-1}..Θ_N; use [`LadderData::theta`]
    pub theta: Vec<Poly>,
    pub quadruple: RiccatiQuadruple,
    pub w0: Jet2,
    pub rc: RecurrenceCoeffs,
    pub bound_l: Option<usize>,
    pub bound_theta: Option<usize>,
    /// Largest relative coefficient found above a degree bound before truncation.
    pub overflow: Float,
}

impl LadderData {
    pub fn l(&self, n: isize) -> &Poly {
        &self.l[(n + 1) as usize]
    }

    pub fn theta(&self, n: isize) -> &Poly {
        &self.theta[(n + 1) as usize]
    }

    pub fn n_max(&self) -> usize {
        self.l.len() - 2
    }

    pub fn prec(&self) -> u32 {
        self.w0.prec()
    }

    /// Θ_k / γ_{k+1}, with D/w₀ standing in for Θ_{-1}/γ₀.
    pub fn ratio(&self, k: isize) -> Poly {
        if k < 0 {
            self.quadruple.d.scale(&self.w0.recip())
        } else {
            self.theta(k).scale(&self.rc.gamma[(k + 1) as usize].recip())
        }
    }

    fn x_minus_beta(&self, n: usize) -> Poly {
        Poly::x_minus(&self.rc.beta[n])
    }

    /// Both forms of the (2,2) entry of A·𝒜_n (or Â·ℬ_n).
    fn entry22(&self, n: usize) -> Poly {
        let ni = n as isize;
        self.l(ni - 1) + self.x_minus_beta(n) * self.ratio(ni - 1)
    }
}

fn deg(p: &Poly, ctx: &PrecisionContext) -> Option<isize> {
    p.degree(&ctx.drop()).map(|d| d as isize)
}

fn max_deg(ds: &[Option<isize>]) -> Option<usize> {
    ds.iter().flatten().copied().max().filter(|&d| d >= 0).map(|d| d as usize)
}

fn bounds(q: &RiccatiQuadruple, ctx: &PrecisionContext) -> (Option<usize>, Option<usize>) {
    let (a, b, c) = (deg(&q.a, ctx), deg(&q.b, ctx), deg(&q.c, ctx));
    let sub = |d: Option<isize>, k: isize| d.map(|d| d - k);
    match q.direction {
        Direction::X => {
            let l = max_deg(&[sub(a, 1), sub(b, 1), c]);
            (l, l.and_then(|d| d.checked_sub(1)))
        }
        Direction::T => (
            max_deg(&[sub(a, 1), sub(b, 1), c]),
            max_deg(&[sub(a, 1), sub(b, 2), sub(c, 1)]),
        ),
    }
}

struct Builder<'a> {
    ctx: &'a PrecisionContext,
    strict: bool,
    bound_l: Option<usize>,
    bound_theta: Option<usize>,
    overflow: Float,
}

impl Builder<'_> {
    fn settle(&mut self, mut p: Poly, what: &'static str, n: isize) -> Result<Poly> {
        let bound = if what == "l" { self.bound_l } else { self.bound_theta };
        let over = p.overflow_above(bound);
        if over > self.overflow {
            self.overflow = over.clone();
        }
        if self.strict && over > self.ctx.tol_rel() {
            return Err(Error::DegreeOverflow {
                what,
                n,
                bound: bound.unwrap_or(0),
                overflow: over.to_f64(),
            });
        }
        p.truncate(bound);
        Ok(p)
    }
}

fn build(
    q: &RiccatiQuadruple,
    w0: &Jet2,
    rc: &RecurrenceCoeffs,
    n_max: usize,
    ctx: &PrecisionContext,
    strict: bool,
) -> Result<LadderData> {
    if n_max > rc.n() {
        return Err(Error::InvalidParameter(format!(
            "ladder to n = {n_max} needs recurrence coefficients up to {n_max}, have {}",
            rc.n()
        )));
    }
    let prec = w0.prec();
    let (bound_l, bound_theta) = bounds(q, ctx);
    let mut b = Builder {
        ctx,
        strict,
        bound_l,
        bound_theta,
        overflow: Float::new(prec),
    };
    let mut ld = LadderData {
        direction: q.direction,
        l: Vec::with_capacity(n_max + 2),
        theta: Vec::with_capacity(n_max + 2),
        quadruple: q.clone(),
        w0: w0.clone(),
        rc: rc.clone(),
        bound_l,
        bound_theta,
        overflow: Float::new(prec),
    };
    let half_c = q.c.scale(&Jet2::constant(Float::with_val(prec, 0.5)));
    let d_over_w0 = q.d.scale(&w0.recip());
    let xb0 = Poly::x_minus(&rc.beta[0]);
    ld.l.push(half_c.clone());
    ld.theta.push(q.d.scale(w0));
    match q.direction {
        Direction::X => {
            let l0 = -&half_c - &xb0 * &d_over_w0;
            let th0 = &(&q.a + &(&xb0 * &(&half_c - &l0))) + &q.b.scale(w0);
            ld.l.push(b.settle(l0, "l", 0)?);
            ld.theta.push(b.settle(th0, "theta", 0)?);
            for n in 1..=n_max {
                let ni = n as isize;
                let xb = ld.x_minus_beta(n);
                let ln = -ld.l(ni - 1) - &xb * &ld.ratio(ni - 1);
                let ln = b.settle(ln, "l", ni)?;
                let thn = &(&q.a + &ld.ratio(ni - 2).scale(&rc.gamma[n])) - &(&xb * &(&ln - ld.l(ni - 1)));
                let thn = b.settle(thn, "theta", ni)?;
                ld.l.push(ln);
                ld.theta.push(thn);
            }
        }
        Direction::T => {
            let lw = w0.derivative() / w0;
            let l0 = &(-&half_c - &xb0 * &d_over_w0) + &q.a.scale(&lw);
            let th0 = &(&(-&q.a.scale(&rc.beta[0].derivative())) + &(&xb0 * &(&half_c - &l0))) + &q.b.scale(w0);
            ld.l.push(b.settle(l0, "l", 0)?);
            ld.theta.push(b.settle(th0, "theta", 0)?);
            for n in 1..=n_max {
                let ni = n as isize;
                let xb = ld.x_minus_beta(n);
                let xb1 = ld.x_minus_beta(n - 1);
                let lg = rc.gamma[n].derivative() / &rc.gamma[n];
                let ln = &(&(ld.l(ni - 2) + &(&xb1 * &ld.ratio(ni - 2))) - &(&xb * &ld.ratio(ni - 1)))
                    + &q.a.scale(&lg);
                let ln = b.settle(ln, "l", ni)?;
                let thn = &(&(-&q.a.scale(&rc.beta[n].derivative())) + &(&xb * &(ld.l(ni - 1) - &ln)))
                    + &ld.ratio(ni - 2).scale(&rc.gamma[n]);
                let thn = b.settle(thn, "theta", ni)?;
                ld.l.push(ln);
                ld.theta.push(thn);
            }
        }
    }
    ld.overflow = b.overflow;
    Ok(ld)
}

/// x-direction ladder up to n_max; errors on a non-dust coefficient above the
/// degree bound.
pub fn ladder_x(
    q: &RiccatiQuadruple,
    w0: &Jet2,
    rc: &RecurrenceCoeffs,
    n_max: usize,
    ctx: &PrecisionContext,
) -> Result<LadderData> {
    debug_assert_eq!(q.direction, Direction::X);
    build(q, w0, rc, n_max, ctx, true)
}

/// t-direction ladder up to n_max.
pub fn ladder_t(
    q: &RiccatiQuadruple,
    w0: &Jet2,
    rc: &RecurrenceCoeffs,
    n_max: usize,
    ctx: &PrecisionContext,
) -> Result<LadderData> {
    debug_assert_eq!(q.direction, Direction::T);
    build(q, w0, rc, n_max, ctx, true)
}

/// Same recursion, but overflow is only recorded in `overflow` and the result
/// truncated. Used for deliberately inconsistent inputs.
pub fn ladder_lenient(
    q: &RiccatiQuadruple,
    w0: &Jet2,
    rc: &RecurrenceCoeffs,
    n_max: usize,
    ctx: &PrecisionContext,
) -> Result<LadderData> {
    build(q, w0, rc, n_max, ctx, false)
}

#[derive(Debug, Clone)]
pub struct LaxPair {
    /// 𝒜_n or ℬ_n
    pub an: Mat2,
    /// 𝒞 or 𝒞̂
    pub cmat: Mat2,
    pub n: usize,
    pub direction: Direction,
    /// Relative coefficient mismatch between -l_n and l_{n-1} + (x-β_n)Θ_{n-1}/γ_n
    /// (x-direction only; zero otherwise).
    pub trace_defect: Float,
}

fn poly_mismatch(a: &Poly, b: &Poly) -> Float {
    let n = a.len().max(b.len());
    let mut worst = Float::new(a.prec());
    for i in 0..n {
        let r = rel_residual(&a.coeff(i).v, &b.coeff(i).v);
        if r > worst {
            worst = r;
        }
    }
    worst
}

pub fn lax_matrices(ld: &LadderData, n: usize) -> LaxPair {
    let ni = n as isize;
    let prec = ld.prec();
    let q = &ld.quadruple;
    let e22 = ld.entry22(n);
    let trace_defect = match ld.direction {
        Direction::X => poly_mismatch(&-ld.l(ni), &e22),
        Direction::T => Float::new(prec),
    };
    let an = Mat2::over(
        &q.a,
        [
            [ld.l(ni).clone(), ld.theta(ni).clone()],
            [-&ld.ratio(ni - 1), e22],
        ],
    );
    let half_c = q.c.scale(&Jet2::constant(Float::with_val(prec, 0.5)));
    let c22 = match ld.direction {
        Direction::X => -&half_c,
        Direction::T => &(-&half_c) + &q.a.scale(&(ld.w0.derivative() / &ld.w0)),
    };
    let cmat = Mat2::over(
        &q.a,
        [
            [half_c, -&q.d.scale(&ld.w0.recip())],
            [q.b.scale(&ld.w0), c22],
        ],
    );
    LaxPair {
        an,
        cmat,
        n,
        direction: ld.direction,
        trace_defect,
    }
}

/// {-0.5, 0.3, 0.9, 1.7} plus three seeded points in (-1, t) kept 0.05 away
/// from 0, 1 and t.
pub fn default_samples(t: &Float, seed: u64) -> Vec<Float> {
    let prec = t.prec();
    let tf = t.to_f64();
    let mut out: Vec<Float> = [-0.5, 0.3, 0.9, 1.7]
        .iter()
        .map(|&x| Float::with_val(prec, x))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < 7 {
        let x: f64 = rng.gen_range(-1.0..tf);
        if [0.0, 1.0, tf].iter().all(|p| (x - p).abs() > 0.05) {
            out.push(Float::with_val(prec, x));
        }
    }
    out
}

fn check_pole(den: &Poly, x: &Jet2) -> Result<()> {
    let v = den.eval(x).v;
    if v.clone().abs() < 1e-12 {
        return Err(Error::SampleAtPole { x: x.v.to_f64() });
    }
    Ok(())
}

fn y_matrix(rc: &RecurrenceCoeffs, x: &Float, n: usize) -> (JetMat, JetMat) {
    let ev = eval_polys(rc, x, n + 1);
    let ni = n as isize;
    let y = [
        [ev.p[n + 1].clone(), ev.assoc(ni).clone()],
        [ev.p[n].clone(), ev.assoc(ni - 1).clone()],
    ];
    let dy = [
        [ev.dp[n + 1].clone(), ev.dassoc(ni).clone()],
        [ev.dp[n].clone(), ev.dassoc(ni - 1).clone()],
    ];
    (y, dy)
}

fn map_jm(m: &JetMat, f: impl Fn(&Jet2) -> Jet2) -> JetMat {
    [[f(&m[0][0]), f(&m[0][1])], [f(&m[1][0]), f(&m[1][1])]]
}

/// max over samples of the entrywise residual of ∂Y_n = 𝒜_nY_n - Y_n𝒞 (x) or
/// ∂_tY_n = ℬ_nY_n - Y_n𝒞̂ (t).
pub fn sylvester_residual(lp: &LaxPair, rc: &RecurrenceCoeffs, samples: &[Float]) -> Result<Float> {
    let prec = rc.prec();
    let mut worst = Float::new(prec);
    for x in samples {
        let xj = Jet2::constant(Float::with_val(prec, x));
        check_pole(&lp.an.e[0][0].den, &xj)?;
        let (y, dy) = y_matrix(rc, x, lp.n);
        let lhs = match lp.direction {
            Direction::X => dy,
            Direction::T => map_jm(&y, |j| j.derivative()),
        };
        let rhs = jm_sub(&jm_mul(&lp.an.eval(&xj), &y), &jm_mul(&y, &lp.cmat.eval(&xj)));
        let r = jm_residual(&lhs, &rhs);
        if r.is_nan() || r > worst {
            worst = r;
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone)]
pub struct DetTraceReport {
    pub trace: Float,
    pub det: Float,
}

const IDENTITY_POINTS: [f64; 5] = [-0.5, 0.3, 0.9, 1.7, 2.6];

/// Trace and determinant identities of the breve matrix at n, direction X:
/// tr = 0 and det B̆_n = det B̆_0 + A Σ Θ_{k-1}/γ_k; direction T:
/// tr = Â Σ_{k≤n} ∂_t ln γ_k and the telescoped determinant formula.
pub fn det_trace_identities(ld: &LadderData, n: usize) -> DetTraceReport {
    let prec = ld.prec();
    let q = &ld.quadruple;
    let ni = n as isize;
    let tr_poly = ld.l(ni) + &ld.entry22(n);
    let det_of = |k: usize| -> Poly {
        let ki = k as isize;
        ld.l(ki) * &ld.entry22(k) + ld.theta(ki) * &ld.ratio(ki - 1)
    };
    let det_n = det_of(n);
    let half = Jet2::constant(Float::with_val(prec, 0.5));
    let quarter = Jet2::constant(Float::with_val(prec, 0.25));
    let (tr_rhs, det_rhs) = match ld.direction {
        Direction::X => {
            let det0 = &(&q.d.scale(&ld.w0.recip()) * &(&q.a + &q.b.scale(&ld.w0))) - &(&q.c * &q.c).scale(&quarter);
            let mut sum = Poly::zero(prec);
            for k in 1..=n {
                sum = &sum + &ld.ratio(k as isize - 1);
            }
            (Poly::zero(prec), &det0 + &(&q.a * &sum))
        }
        Direction::T => {
            let lw = ld.w0.derivative() / &ld.w0;
            let mut lsum = Jet2::zero(prec);
            for k in 0..=n {
                lsum += &(ld.rc.gamma[k].derivative() / &ld.rc.gamma[k]);
            }
            let b0p = ld.rc.beta[0].derivative();
            let first = &(&q.a.scale(&(-&b0p / &ld.w0)) + &q.b) * &q.d;
            let det0 = &(&first + &(&q.a * &q.c).scale(&(&lw * &half))) - &(&q.c * &q.c).scale(&quarter);
            let mut sum = Poly::zero(prec);
            for k in 1..=n {
                let ki = k as isize;
                let lg = ld.rc.gamma[k].derivative() / &ld.rc.gamma[k];
                let term = &ld.l(ki - 1).scale(&lg) - &ld.ratio(ki - 1).scale(&ld.rc.beta[k].derivative());
                sum = &sum + &term;
            }
            (q.a.scale(&lsum), &det0 + &(&q.a * &sum))
        }
    };
    let mut trace = Float::new(prec);
    let mut det = Float::new(prec);
    for &x in &IDENTITY_POINTS {
        let xj = Jet2::constant(Float::with_val(prec, x));
        let rt = rel_residual(&tr_poly.eval(&xj).v, &tr_rhs.eval(&xj).v);
        let rd = rel_residual(&det_n.eval(&xj).v, &det_rhs.eval(&xj).v);
        if rt > trace {
            trace = rt;
        }
        if rd > det {
            det = rd;
        }
    }
    DetTraceReport { trace, det }
}

/// Direct formula for l_n from P_n, P^{(1)} at sample points:
/// (Π γ_k) l_n = A(P^{(1)}_n' P_n - P_{n+1}' P^{(1)}_{n-1}) - C/2(P^{(1)}_nP_n + P_{n+1}P^{(1)}_{n-1})
///               - D/w₀ P_{n+1}P_n - w₀B P^{(1)}_nP^{(1)}_{n-1}.
pub fn ln_definition_residual(ld: &LadderData, n: usize, samples: &[Float]) -> Float {
    let prec = ld.prec();
    let q = &ld.quadruple;
    let ni = n as isize;
    let mut prod = Jet2::one(prec);
    for k in 1..=n {
        prod = &prod * &ld.rc.gamma[k];
    }
    let mut worst = Float::new(prec);
    for x in samples {
        let xj = Jet2::constant(Float::with_val(prec, x));
        let ev = eval_polys(&ld.rc, x, n + 1);
        let (a, b, c, d) = (q.a.eval(&xj), q.b.eval(&xj), q.c.eval(&xj), q.d.eval(&xj));
        let wr = &(ev.dassoc(ni) * &ev.p[n]) - &(&ev.dp[n + 1] * ev.assoc(ni - 1));
        let sym = &(ev.assoc(ni) * &ev.p[n]) + &(&ev.p[n + 1] * ev.assoc(ni - 1));
        let rhs = &(&(&a * &wr) - &(&c.half() * &sym))
            - &(&(&(&d / &ld.w0) * &(&ev.p[n + 1] * &ev.p[n])) + &(&(&b * &ld.w0) * &(ev.assoc(ni) * ev.assoc(ni - 1))));
        let lhs = &prod * &ld.l(ni).eval(&xj);
        let r = rel_residual(&lhs.v, &rhs.v);
        if r > worst {
            worst = r;
        }
    }
    worst
}

/// max over samples of ∂_t𝒜_n - ∂_xℬ_n - ℬ_n𝒜_n + 𝒜_nℬ_n.
pub fn compatibility_residual(ldx: &LadderData, ldt: &LadderData, n: usize, samples: &[Float]) -> Result<Float> {
    let prec = ldx.prec();
    let ax = lax_matrices(ldx, n).an;
    let bt = lax_matrices(ldt, n).an;
    let mut worst = Float::new(prec);
    for x in samples {
        let xj = Jet2::constant(Float::with_val(prec, x));
        check_pole(&ax.e[0][0].den, &xj)?;
        check_pole(&bt.e[0][0].den, &xj)?;
        let a = ax.eval(&xj);
        let b = bt.eval(&xj);
        let lhs = map_jm(&a, |j| j.derivative());
        let rhs = jm_add(&bt.eval_dx(&xj), &jm_sub(&jm_mul(&b, &a), &jm_mul(&a, &b)));
        let r = jm_residual(&lhs, &rhs);
        if r.is_nan() || r > worst {
            worst = r;
        }
    }
    Ok(worst)
}

/// The same check with the commutator formed over the rational-function field
/// before evaluation.
pub fn compatibility_residual_symbolic(ldx: &LadderData, ldt: &LadderData, n: usize, samples: &[Float]) -> Result<Float> {
    let prec = ldx.prec();
    let ax = lax_matrices(ldx, n).an;
    let bt = lax_matrices(ldt, n).an;
    let comm = bt.commutator(&ax);
    let mut worst = Float::new(prec);
    for x in samples {
        let xj = Jet2::constant(Float::with_val(prec, x));
        check_pole(&ax.e[0][0].den, &xj)?;
        check_pole(&bt.e[0][0].den, &xj)?;
        let lhs = map_jm(&ax.eval(&xj), |j| j.derivative());
        let rhs = jm_add(&bt.eval_dx(&xj), &comm.eval(&xj));
        let r = jm_residual(&lhs, &rhs);
        if r.is_nan() || r > worst {
            worst = r;
        }
    }
    Ok(worst)
}
