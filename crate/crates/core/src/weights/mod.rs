//! The weight x^α (1-x)^β (t-x)^μ on [0,1], t > 1: moments with t-jets and
//! the Riccati data of its Stieltjes function.

pub mod cache;
pub mod quadrature;

use rug::ops::Pow;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{rel_residual, to_decimal, Jet2, Poly, PrecisionContext};

pub use cache::MomentCache;

#[derive(Debug, Clone, PartialEq)]
pub struct WeightParams {
    pub alpha: Float,
    pub beta: Float,
    pub mu: Float,
    pub t: Float,
}

impl WeightParams {
    pub fn new(alpha: Float, beta: Float, mu: Float, t: Float) -> Result<Self> {
        let p = Self { alpha, beta, mu, t };
        p.validate()?;
        Ok(p)
    }

    /// Parses decimal strings at the context precision.
    pub fn parse(ctx: &PrecisionContext, alpha: &str, beta: &str, mu: &str, t: &str) -> Result<Self> {
        Self::new(ctx.parse(alpha)?, ctx.parse(beta)?, ctx.parse(mu)?, ctx.parse(t)?)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("alpha", &self.alpha), ("beta", &self.beta), ("mu", &self.mu)] {
            if !v.is_finite() || *v <= -1 {
                return Err(Error::Integrability(format!("{name} = {} must exceed -1", v.to_f64())));
            }
        }
        if !self.t.is_finite() || self.t <= 1 {
            return Err(Error::InvalidParameter(format!("t = {} must exceed 1", self.t.to_f64())));
        }
        Ok(())
    }

    pub fn prec(&self) -> u32 {
        self.t.prec()
    }

    pub fn with_t(&self, t: Float) -> Result<Self> {
        Self::new(self.alpha.clone(), self.beta.clone(), self.mu.clone(), t)
    }

    /// s = α + β + μ
    pub fn s(&self) -> Float {
        Float::with_val(self.prec(), &self.alpha + &self.beta) + &self.mu
    }

    pub fn t_jet(&self) -> Jet2 {
        Jet2::variable(self.t.clone())
    }

    pub fn mu_is_zero(&self) -> bool {
        self.mu.is_zero()
    }

    pub fn key(&self) -> String {
        format!(
            "a={};b={};m={};t={}",
            to_decimal(&self.alpha),
            to_decimal(&self.beta),
            to_decimal(&self.mu),
            to_decimal(&self.t)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    X,
    T,
}

/// A ∂f = B f² + C f + D in the direction `direction`.
#[derive(Debug, Clone)]
pub struct RiccatiQuadruple {
    pub a: Poly,
    pub b: Poly,
    pub c: Poly,
    pub d: Poly,
    pub direction: Direction,
}

#[derive(Debug, Clone)]
pub struct MomentTable {
    pub params: WeightParams,
    pub w: Vec<Jet2>,
}

impl MomentTable {
    pub fn from_jets(params: WeightParams, w: Vec<Jet2>) -> Self {
        Self { params, w }
    }

    /// Highest moment index.
    pub fn n(&self) -> usize {
        self.w.len().saturating_sub(1)
    }

    pub fn prec(&self) -> u32 {
        self.w.first().map_or(self.params.prec(), |j| j.prec())
    }
}

const GUARD_BITS: u32 = 32;
const MIN_NODES: usize = 32;
pub const MAX_NODES: usize = 4096;

/// Raw integrals M(k, e) = ∫₀¹ x^{k+α}(1-x)^β(t-x)^{μ+e} dx for k ≤ kmax and
/// e ∈ {s, s-1, s-2}, at `prec` bits using an n-point rule.
fn raw_moments(params: &WeightParams, kmax: usize, shift: i32, n: usize, prec: u32) -> Result<Vec<[Float; 3]>> {
    let rule = quadrature::gauss_jacobi_01(&params.alpha, &params.beta, n, prec)?;
    let t = Float::with_val(prec, &params.t);
    let nu = Float::with_val(prec, &params.mu + shift);
    let mut out = vec![[Float::new(prec), Float::new(prec), Float::new(prec)]; kmax + 1];
    for (x, lam) in rule.nodes.iter().zip(&rule.weights) {
        let tx = Float::with_val(prec, &t - x);
        let g0 = Float::with_val(prec, (&tx).pow(&nu)) * lam;
        let g1 = Float::with_val(prec, &g0 / &tx);
        let g2 = Float::with_val(prec, &g1 / &tx);
        let mut xk = Float::with_val(prec, 1);
        for row in out.iter_mut() {
            row[0] += Float::with_val(prec, &xk * &g0);
            row[1] += Float::with_val(prec, &xk * &g1);
            row[2] += Float::with_val(prec, &xk * &g2);
            xk *= x;
        }
    }
    Ok(out)
}

/// Doubles the node count until two successive tables agree to 2^-bits
/// relative (computed with guard bits), then rounds to `bits`.
fn converged_moments(params: &WeightParams, kmax: usize, shift: i32, bits: u32) -> Result<Vec<[Float; 3]>> {
    let prec = bits + GUARD_BITS;
    let target = Float::with_val(prec, Float::i_exp(1, -(bits as i32)));
    let mut n = MIN_NODES.max(kmax + 4);
    let mut prev = raw_moments(params, kmax, shift, n, prec)?;
    let mut last_change = f64::INFINITY;
    while n < MAX_NODES {
        n *= 2;
        let next = raw_moments(params, kmax, shift, n, prec)?;
        let mut worst = Float::new(prec);
        for (a, b) in prev.iter().zip(&next) {
            for j in 0..3 {
                let d = Float::with_val(prec, &a[j] - &b[j]).abs() / Float::with_val(prec, b[j].abs_ref());
                if d > worst {
                    worst = d;
                }
            }
        }
        last_change = worst.to_f64();
        if worst <= target {
            return Ok(next
                .into_iter()
                .map(|r| r.map(|v| Float::with_val(bits, v)))
                .collect());
        }
        prev = next;
    }
    Err(Error::QuadratureNonconvergence {
        nodes: MAX_NODES,
        last_change,
    })
}

fn check_shift(params: &WeightParams, shift: i32) -> Result<()> {
    params.validate()?;
    let e = Float::with_val(params.prec(), &params.mu + shift);
    if e <= -1 {
        return Err(Error::Integrability(format!(
            "mu + shift = {} must exceed -1",
            e.to_f64()
        )));
    }
    Ok(())
}

fn jet_from_raw(params: &WeightParams, shift: i32, r: &[Float; 3], bits: u32) -> Jet2 {
    let nu = Float::with_val(bits, &params.mu + shift);
    let nu1 = Float::with_val(bits, &nu - 1u32);
    let d1 = Float::with_val(bits, &nu * &r[1]);
    let d2 = Float::with_val(bits, &nu * &nu1) * &r[2];
    Jet2::new(r[0].clone(), d1, d2)
}

/// ∫₀¹ x^{k+α}(1-x)^β(t-x)^{μ+shift} dx with its first two t-derivatives.
///
/// Only the requested exponent μ+shift must exceed -1; the lower exponents
/// used for the derivatives are harmless because t - x ≥ t - 1 > 0.
pub fn moment(params: &WeightParams, k: usize, mu_shift: i32, ctx: &PrecisionContext) -> Result<Jet2> {
    check_shift(params, mu_shift)?;
    let raw = converged_moments(params, k, mu_shift, ctx.bits())?;
    Ok(jet_from_raw(params, mu_shift, &raw[k], ctx.bits()))
}

/// Moments w_0..w_n of the unshifted weight.
pub fn moment_table(params: &WeightParams, n: usize, ctx: &PrecisionContext) -> Result<MomentTable> {
    if n < 1 {
        return Err(Error::InvalidParameter("moment table needs N >= 1".into()));
    }
    check_shift(params, 0)?;
    let raw = converged_moments(params, n, 0, ctx.bits())?;
    let w = raw.iter().map(|r| jet_from_raw(params, 0, r, ctx.bits())).collect();
    Ok(MomentTable::from_jets(params.clone(), w))
}

fn cst(v: Float) -> Jet2 {
    Jet2::constant(v)
}

/// Pearson data in x: A = x(x-1)(x-t), B = 0, C from the exponents and
/// D = d₁x + d₀ with d₁ = -(1+s)w₀, d₀ = [-(2+s)β₀ + 1+α+μ + (1+α+β)t]w₀.
pub fn pearson_quadruple_x(params: &WeightParams, w0: &Jet2, beta0: &Jet2) -> RiccatiQuadruple {
    let prec = params.prec();
    let t = params.t_jet();
    let one = Jet2::one(prec);
    let a = Poly::new(
        prec,
        vec![Jet2::zero(prec), t.clone(), -(&one + &t), one.clone()],
    );
    let (al, be, mu) = (
        cst(params.alpha.clone()),
        cst(params.beta.clone()),
        cst(params.mu.clone()),
    );
    let s = cst(params.s());
    let c = Poly::new(
        prec,
        vec![
            &al * &t,
            -(&(&al * &(&one + &t)) + &(&(&be * &t) + &mu)),
            s.clone(),
        ],
    );
    let d1 = -(w0 * &s.add_i(1));
    let lead = -(&s.add_i(2) * beta0);
    let d0 = w0 * &(&(&lead + &al.add_i(1)) + &(&(&al + &be).add_i(1) * &t) + &mu);
    let d = Poly::new(prec, vec![d0, d1]);
    RiccatiQuadruple {
        a,
        b: Poly::zero(prec),
        c,
        d,
        direction: Direction::X,
    }
}

/// Pearson data in t: (x - t, 0, -μ, ∂_t w₀), checked against D(t) + t(t-1)∂_t w₀ = 0.
pub fn pearson_quadruple_t(
    params: &WeightParams,
    w0: &Jet2,
    beta0: &Jet2,
    ctx: &PrecisionContext,
) -> Result<RiccatiQuadruple> {
    let prec = params.prec();
    let t = params.t_jet();
    let qx = pearson_quadruple_x(params, w0, beta0);
    let d_at_t = qx.d.eval(&Jet2::constant(params.t.clone())).v;
    let tt1 = Float::with_val(prec, &params.t * Float::with_val(prec, &params.t - 1u32));
    let rhs = -(tt1 * &w0.d1);
    let res = rel_residual(&d_at_t, &rhs);
    if res > ctx.tol_rel() {
        return Err(Error::Compatibility(format!(
            "D(t) + t(t-1) dw0/dt residual {:e}",
            res.to_f64()
        )));
    }
    let c = if params.mu_is_zero() {
        Poly::zero(prec)
    } else {
        Poly::constant(cst(-params.mu.clone()))
    };
    Ok(RiccatiQuadruple {
        a: Poly::x_minus(&t),
        b: Poly::zero(prec),
        c,
        d: Poly::constant(w0.derivative()),
        direction: Direction::T,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(192).unwrap()
    }

    fn params(a: &str, b: &str, m: &str, t: &str) -> WeightParams {
        WeightParams::parse(&ctx(), a, b, m, t).unwrap()
    }

    fn close(a: &Float, b: f64, tol: f64) -> bool {
        Float::with_val(a.prec(), a - b).abs() < tol
    }

    #[test]
    fn trivial_moments() {
        let c = ctx();
        let m = moment(&params("0", "0", "0", "2"), 3, 0, &c).unwrap();
        assert!(close(&m.v, 0.25, 1e-50));
        let m = moment(&params("0", "0", "1", "2"), 0, 0, &c).unwrap();
        assert!(close(&m.v, 1.5, 1e-50));
        assert!(close(&m.d1, 1.0, 1e-50));
        let m = moment(&params("0.5", "0.5", "0", "2"), 0, 0, &c).unwrap();
        let pi8 = Float::with_val(192, rug::float::Constant::Pi) / 8u32;
        assert!(Float::with_val(192, &m.v - &pi8).abs() < 1e-50);
    }

    #[test]
    fn table_examples() {
        let c = ctx();
        let tab = moment_table(&params("0", "0", "1", "2"), 1, &c).unwrap();
        assert!(close(&tab.w[1].v, 2.0 / 3.0, 1e-15));
        assert!(close(&tab.w[1].d1, 0.5, 1e-50));
        let tab = moment_table(&params("0", "0", "0", "5"), 3, &c).unwrap();
        for (k, w) in tab.w.iter().enumerate() {
            assert!(close(&w.v, 1.0 / (k as f64 + 1.0), 1e-15));
            assert!(w.d1.is_zero() && w.d2.is_zero());
        }
    }

    #[test]
    fn rejects_bad_exponents() {
        let c = ctx();
        assert!(WeightParams::parse(&c, "-1", "0", "0", "2").is_err());
        assert!(WeightParams::parse(&c, "0", "0", "0", "1").is_err());
        let p = params("0", "0", "-0.5", "2");
        assert!(matches!(moment(&p, 0, -1, &c), Err(Error::Integrability(_))));
    }

    #[test]
    fn quadruple_x_examples() {
        let p = params("1", "1", "1", "2");
        let w0 = Jet2::one(192);
        let q = pearson_quadruple_x(&p, &w0, &Jet2::one(192));
        // (x-1)(x-2) + x(x-2) + x(x-1) = 3x² - 6x + 2
        let coeffs: Vec<f64> = q.c.coeffs().iter().map(|c| c.v.to_f64()).collect();
        assert_eq!(coeffs, vec![2.0, -6.0, 3.0]);
        assert_eq!(q.a.len(), 4);
        // ∂_t of the x-coefficient of A is 1
        assert_eq!(q.a.coeff(1).d1, 1);
    }

    #[test]
    fn derivative_of_w0_relation() {
        // (t - β₀) ∂_t ln w₀ - ∂_t β₀ - μ = 0
        let c = ctx();
        let tab = moment_table(&params("0.3", "0.7", "1.5", "2"), 2, &c).unwrap();
        let beta0 = &tab.w[1] / &tab.w[0];
        let lhs = Float::with_val(192, &tab.params.t - &beta0.v) * tab.w[0].log_derivative() - &beta0.d1;
        assert!(close(&lhs, 1.5, 1e-50));
        let q = pearson_quadruple_t(&tab.params, &tab.w[0], &beta0, &c);
        assert!(q.is_ok());
    }
}
