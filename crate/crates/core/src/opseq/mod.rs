//! Recurrence coefficients, orthogonal and associated polynomials, and
//! Hankel determinants from a moment table.

use rug::Float;

use crate::error::{Error, Result};
use crate::numerics::{Jet2, PrecisionContext};
use crate::weights::MomentTable;

/// x P_n = P_{n+1} + β_n P_n + γ_n P_{n-1}, with `gamma[0] = w0`.
#[derive(Debug, Clone)]
pub struct RecurrenceCoeffs {
    pub beta: Vec<Jet2>,
    pub gamma: Vec<Jet2>,
    /// h_n = ∫ P_n² w
    pub h: Vec<Jet2>,
    /// Δ_1..Δ_{N+1}; `hankel[j]` is Δ_{j+1}
    pub hankel: Vec<Jet2>,
}

impl RecurrenceCoeffs {
    /// Largest n with β_n and γ_n available.
    pub fn n(&self) -> usize {
        self.beta.len() - 1
    }

    pub fn w0(&self) -> &Jet2 {
        &self.gamma[0]
    }

    pub fn prec(&self) -> u32 {
        self.beta[0].prec()
    }

    /// Δ_k for k ≥ 0 (Δ_0 = 1).
    pub fn delta(&self, k: usize) -> Jet2 {
        if k == 0 {
            Jet2::one(self.prec())
        } else {
            self.hankel[k - 1].clone()
        }
    }

    /// Coefficients 0..=n of the associated family: β̃_k = β_{k+1}, γ̃_k = γ_{k+1}
    /// (γ̃_0 = γ_1 is then also the mass of the associated functional).
    pub fn shifted(&self) -> RecurrenceCoeffs {
        let n = self.n();
        let beta: Vec<Jet2> = self.beta[1..=n].to_vec();
        let gamma: Vec<Jet2> = self.gamma[1..=n].to_vec();
        let mut h = Vec::with_capacity(gamma.len());
        let mut acc = Jet2::one(self.prec());
        for g in &gamma {
            acc = &acc * g;
            h.push(acc.clone());
        }
        let mut hankel = Vec::with_capacity(h.len());
        let mut d = Jet2::one(self.prec());
        for hk in &h {
            d = &d * hk;
            hankel.push(d.clone());
        }
        RecurrenceCoeffs { beta, gamma, h, hankel }
    }
}

/// Recurrence coefficients up to index n via an LDLᵀ factorization of the
/// moment Hankel matrix. Needs moments w_0..w_{2n+1}.
pub fn recurrence_to(m: &MomentTable, n: usize, ctx: &PrecisionContext) -> Result<RecurrenceCoeffs> {
    let w = &m.w;
    if w.len() < 2 * n + 2 {
        return Err(Error::InvalidParameter(format!(
            "{} moments cannot give recurrence coefficients up to n = {n}",
            w.len()
        )));
    }
    let prec = m.prec();
    let drop = ctx.drop();
    let rows = n + 2;
    let mut l: Vec<Vec<Jet2>> = vec![Vec::new(); rows];
    let mut d: Vec<Jet2> = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let mut piv = w[2 * j].clone();
        let mut scale = Float::with_val(prec, w[2 * j].v.abs_ref());
        for k in 0..j {
            let term = &l[j][k].sqr() * &d[k];
            scale += Float::with_val(prec, term.v.abs_ref());
            piv -= &term;
        }
        let ratio = Float::with_val(prec, piv.v.abs_ref()) / &scale;
        if ratio <= drop || !piv.is_finite() {
            return Err(Error::Regularity {
                index: j,
                ratio: ratio.to_f64(),
            });
        }
        for i in (j + 1)..rows {
            let mut s = w[i + j].clone();
            for k in 0..j {
                s -= &(&(&l[i][k] * &l[j][k]) * &d[k]);
            }
            let lij = &s / &piv;
            l[i].push(lij);
        }
        d.push(piv);
    }
    let mut beta = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let b = if j == 0 {
            l[1][0].clone()
        } else {
            &l[j + 1][j] - &l[j][j - 1]
        };
        beta.push(b);
    }
    let mut gamma = Vec::with_capacity(n + 1);
    gamma.push(w[0].clone());
    for j in 1..=n {
        gamma.push(&d[j] / &d[j - 1]);
    }
    let mut hankel = Vec::with_capacity(n + 1);
    let mut acc = Jet2::one(prec);
    for dj in &d {
        acc = &acc * dj;
        hankel.push(acc.clone());
    }
    Ok(RecurrenceCoeffs {
        beta,
        gamma,
        h: d,
        hankel,
    })
}

/// As [`recurrence_to`] with the largest n the table supports.
pub fn recurrence_from_moments(m: &MomentTable, ctx: &PrecisionContext) -> Result<RecurrenceCoeffs> {
    if m.w.len() < 2 {
        return Err(Error::InvalidParameter("need at least two moments".into()));
    }
    recurrence_to(m, (m.w.len() - 2) / 2, ctx)
}

/// Values and x-derivatives of P_k and P^{(1)}_{k-1} at a real point.
#[derive(Debug, Clone)]
pub struct PolyPairEval {
    pub x: Float,
    /// P_0..P_N
    pub p: Vec<Jet2>,
    /// P^{(1)}_{-1}..P^{(1)}_{N-1}; `p1[k]` is P^{(1)}_{k-1}
    pub p1: Vec<Jet2>,
    pub dp: Vec<Jet2>,
    pub dp1: Vec<Jet2>,
}

impl PolyPairEval {
    /// P^{(1)}_k
    pub fn assoc(&self, k: isize) -> &Jet2 {
        &self.p1[(k + 1) as usize]
    }

    pub fn dassoc(&self, k: isize) -> &Jet2 {
        &self.dp1[(k + 1) as usize]
    }
}

/// Runs both three-term recurrences up to P_N and P^{(1)}_{N-1}; needs
/// β_0..β_{N-1}, γ_1..γ_{N-1}.
pub fn eval_polys(rc: &RecurrenceCoeffs, x: &Float, n: usize) -> PolyPairEval {
    let prec = rc.prec();
    let xj = Jet2::constant(Float::with_val(prec, x));
    let zero = Jet2::zero(prec);
    let one = Jet2::one(prec);
    let mut p = vec![one.clone()];
    let mut dp = vec![zero.clone()];
    let mut p1 = vec![zero.clone(), one.clone()];
    let mut dp1 = vec![zero.clone(), zero.clone()];
    for k in 0..n {
        let xb = &xj - &rc.beta[k];
        // P_{k+1} = (x - β_k) P_k - γ_k P_{k-1}
        let (prev, dprev) = if k == 0 {
            (zero.clone(), zero.clone())
        } else {
            (p[k - 1].clone(), dp[k - 1].clone())
        };
        let next = &(&xb * &p[k]) - &(&rc.gamma[k] * &prev);
        let dnext = &(&p[k] + &(&xb * &dp[k])) - &(&rc.gamma[k] * &dprev);
        p.push(next);
        dp.push(dnext);
        // P^{(1)}_k = (x - β_k) P^{(1)}_{k-1} - γ_k P^{(1)}_{k-2}, k ≥ 1
        if k >= 1 && p1.len() < n + 1 {
            let a = &p1[k];
            let b = &p1[k - 1];
            let next1 = &(&xb * a) - &(&rc.gamma[k] * b);
            let dnext1 = &(a + &(&xb * &dp1[k])) - &(&rc.gamma[k] * &dp1[k - 1]);
            p1.push(next1);
            dp1.push(dnext1);
        }
    }
    p1.truncate(n + 1);
    dp1.truncate(n + 1);
    PolyPairEval {
        x: Float::with_val(prec, x),
        p,
        p1,
        dp,
        dp1,
    }
}

/// ∂_t(ln(Δ_{n+2}/Δ_{n+1}) - ln w₀) as a jet (its d2 is unknown).
pub fn hankel_ratio_logderiv(rc: &RecurrenceCoeffs, n: usize) -> Result<Jet2> {
    if n + 2 > rc.hankel.len() {
        return Err(Error::InvalidParameter(format!(
            "Δ_{} is outside the Hankel range",
            n + 2
        )));
    }
    let r = &(&rc.delta(n + 2) / &rc.delta(n + 1)) / rc.w0();
    Ok(&r.derivative() / &r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{moment_table, WeightParams};

    fn legendre(prec: u32, n: usize) -> MomentTable {
        let ctx = PrecisionContext::new(prec).unwrap();
        let params = WeightParams::parse(&ctx, "0", "0", "0", "2").unwrap();
        let w = (0..=n)
            .map(|k| Jet2::constant(Float::with_val(prec, 1) / Float::with_val(prec, k + 1)))
            .collect();
        MomentTable::from_jets(params, w)
    }

    #[test]
    fn legendre_coefficients() {
        let ctx = PrecisionContext::new(192).unwrap();
        let rc = recurrence_from_moments(&legendre(192, 13), &ctx).unwrap();
        assert_eq!(rc.n(), 6);
        for b in &rc.beta {
            assert!(Float::with_val(192, &b.v - 0.5).abs() < 1e-50);
        }
        let g1 = Float::with_val(192, &rc.gamma[1].v - Float::with_val(192, 1) / 12u32);
        assert!(g1.abs() < 1e-50);
    }

    #[test]
    fn gamma_via_determinants() {
        let ctx = PrecisionContext::new(192).unwrap();
        let rc = recurrence_from_moments(&legendre(192, 13), &ctx).unwrap();
        for n in 1..=6 {
            let r = &(&rc.delta(n - 1) * &rc.delta(n + 1)) / &rc.delta(n).sqr();
            assert!(Float::with_val(192, &r.v - &rc.gamma[n].v).abs() < 1e-45);
        }
    }

    #[test]
    fn degenerate_moments_rejected() {
        let ctx = PrecisionContext::new(128).unwrap();
        let mut m = legendre(128, 5);
        for w in m.w.iter_mut() {
            *w = Jet2::one(128);
        }
        assert!(matches!(
            recurrence_from_moments(&m, &ctx),
            Err(Error::Regularity { index: 1, .. })
        ));
    }

    #[test]
    fn low_order_polys() {
        let ctx = PrecisionContext::new(128).unwrap();
        let rc = recurrence_from_moments(&legendre(128, 9), &ctx).unwrap();
        let x = Float::with_val(128, 1);
        let ev = eval_polys(&rc, &x, 3);
        assert_eq!(ev.p[0].v, 1);
        assert!(Float::with_val(128, &ev.p[1].v - 0.5).abs() < 1e-35);
        let p2 = Float::with_val(128, 1) / 6u32;
        assert!(Float::with_val(128, &ev.p[2].v - &p2).abs() < 1e-35);
        assert_eq!(ev.assoc(-1).v, 0);
        assert_eq!(ev.assoc(0).v, 1);
    }

    #[test]
    fn liouville_identity() {
        let ctx = PrecisionContext::new(192).unwrap();
        let rc = recurrence_from_moments(&legendre(192, 13), &ctx).unwrap();
        let x = Float::with_val(192, 0.3);
        let ev = eval_polys(&rc, &x, 6);
        let mut prod = Jet2::one(192);
        for n in 1..=5usize {
            prod = &prod * &rc.gamma[n];
            let ni = n as isize;
            let lhs = &(ev.assoc(ni) * &ev.p[n]) - &(&ev.p[n + 1] * ev.assoc(ni - 1));
            assert!(Float::with_val(192, &lhs.v - &prod.v).abs() < 1e-45);
        }
    }

    #[test]
    fn logderiv_telescopes() {
        let ctx = PrecisionContext::new(192).unwrap();
        let p = WeightParams::parse(&ctx, "0.3", "0.7", "1.5", "2").unwrap();
        let rc = recurrence_from_moments(&moment_table(&p, 11, &ctx).unwrap(), &ctx).unwrap();
        for n in 0..=3 {
            let lhs = hankel_ratio_logderiv(&rc, n).unwrap();
            let mut sum = Float::new(192);
            for k in 1..=n + 1 {
                sum += rc.gamma[k].log_derivative();
            }
            assert!(Float::with_val(192, &lhs.v - &sum).abs() < 1e-45);
        }
        let q = PrecisionContext::new(192).unwrap();
        let p0 = WeightParams::parse(&q, "0.3", "0.7", "0", "2").unwrap();
        let rc0 = recurrence_from_moments(&moment_table(&p0, 7, &q).unwrap(), &q).unwrap();
        assert!(hankel_ratio_logderiv(&rc0, 1).unwrap().v.is_zero());
    }
}
