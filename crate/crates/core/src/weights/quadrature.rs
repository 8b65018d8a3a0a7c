//! Gauss-Jacobi rules on [0,1] for the weight x^a (1-x)^b.
//!
//! Nodes start from the f64 eigenvalues of the Jacobi matrix and are polished
//! by Newton's method on the monic three-term recurrence at full precision.
//! Weights come from the Christoffel sum over the same recurrence.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use rug::Float;

use crate::error::{Error, Result};
use crate::numerics::to_decimal;

#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<Float>,
    pub weights: Vec<Float>,
}

type RuleKey = (String, String, usize, u32);

fn rule_cache() -> &'static Mutex<HashMap<RuleKey, Arc<GaussRule>>> {
    static CACHE: OnceLock<Mutex<HashMap<RuleKey, Arc<GaussRule>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Monic recurrence coefficients (diagonal, off-diagonal squared) for the
/// Jacobi weight (1-z)^a (1+z)^b on [-1,1].
fn jacobi_coeffs(a: &Float, b: &Float, n: usize, prec: u32) -> (Vec<Float>, Vec<Float>) {
    let ab = Float::with_val(prec, a + b);
    let mut diag = Vec::with_capacity(n);
    let mut off = Vec::with_capacity(n);
    for k in 0..n {
        let two_k_ab = Float::with_val(prec, &ab + (2 * k) as u32);
        let d = if k == 0 {
            Float::with_val(prec, b - a) / Float::with_val(prec, &ab + 2u32)
        } else {
            let num = Float::with_val(prec, b.square_ref()) - Float::with_val(prec, a.square_ref());
            num / (Float::with_val(prec, &two_k_ab * Float::with_val(prec, &two_k_ab + 2u32)))
        };
        diag.push(d);
        // off[k] = g_k, with off[0] unused
        let g = if k == 0 {
            Float::new(prec)
        } else if k == 1 {
            let num = Float::with_val(prec, a + 1u32) * Float::with_val(prec, b + 1u32) * 4u32;
            let s = Float::with_val(prec, &ab + 2u32);
            num / (Float::with_val(prec, s.square_ref()) * Float::with_val(prec, &ab + 3u32))
        } else {
            let kf = Float::with_val(prec, k as u32);
            let num = Float::with_val(prec, &kf * 4u32)
                * Float::with_val(prec, &kf + a)
                * Float::with_val(prec, &kf + b)
                * Float::with_val(prec, &kf + &ab);
            let den = Float::with_val(prec, two_k_ab.square_ref())
                * Float::with_val(prec, &two_k_ab + 1u32)
                * Float::with_val(prec, &two_k_ab - 1u32);
            num / den
        };
        off.push(g);
    }
    (diag, off)
}

fn initial_nodes(diag: &[Float], off: &[Float]) -> Vec<f64> {
    let n = diag.len();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = diag[i].to_f64();
        if i + 1 < n {
            let s = off[i + 1].to_f64().sqrt();
            m[(i, i + 1)] = s;
            m[(i + 1, i)] = s;
        }
    }
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// (P_n(z), P_n'(z)) and the sum Σ_{k<n} P_k(z)^2 / h_k with h_k = g_1⋯g_k.
fn eval_monic(z: &Float, diag: &[Float], off: &[Float], prec: u32) -> (Float, Float, Float) {
    let n = diag.len();
    let mut p_prev = Float::new(prec);
    let mut p = Float::with_val(prec, 1);
    let mut dp_prev = Float::new(prec);
    let mut dp = Float::new(prec);
    let mut h = Float::with_val(prec, 1);
    let mut christoffel = Float::with_val(prec, 1);
    for k in 0..n {
        let zb = Float::with_val(prec, z - &diag[k]);
        let p_next = Float::with_val(prec, &zb * &p) - Float::with_val(prec, &off[k] * &p_prev);
        let dp_next = Float::with_val(prec, &p + Float::with_val(prec, &zb * &dp))
            - Float::with_val(prec, &off[k] * &dp_prev);
        p_prev = std::mem::replace(&mut p, p_next);
        dp_prev = std::mem::replace(&mut dp, dp_next);
        if k + 1 < n {
            h *= &off[k + 1];
            christoffel += Float::with_val(prec, p.square_ref()) / &h;
        }
    }
    (p, dp, christoffel)
}

/// n-point rule for ∫₀¹ x^a (1-x)^b f(x) dx, computed at `prec` bits.
pub fn gauss_jacobi_01(a: &Float, b: &Float, n: usize, prec: u32) -> Result<Arc<GaussRule>> {
    let key = (to_decimal(a), to_decimal(b), n, prec);
    if let Some(r) = rule_cache().lock().unwrap().get(&key) {
        return Ok(r.clone());
    }
    // on [-1,1] the factor (1-z) carries b and (1+z) carries a
    let (diag, off) = jacobi_coeffs(b, a, n, prec);
    let guesses = initial_nodes(&diag, &off);

    let mass = {
        let ga = Float::with_val(prec, a + 1u32).gamma();
        let gb = Float::with_val(prec, b + 1u32).gamma();
        let gab = Float::with_val(prec, Float::with_val(prec, a + b) + 2u32).gamma();
        ga * gb / gab
    };

    let tiny = Float::with_val(prec, Float::i_exp(1, 8 - prec as i32));
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for g in guesses {
        let mut z = Float::with_val(prec, g);
        let mut converged = false;
        for _ in 0..64 {
            let (p, dp, _) = eval_monic(&z, &diag, &off, prec);
            let step = p / dp;
            z -= &step;
            if step.abs() <= tiny {
                converged = true;
                break;
            }
        }
        if !converged || !z.is_finite() {
            return Err(Error::QuadratureNonconvergence {
                nodes: n,
                last_change: f64::NAN,
            });
        }
        let (_, _, christoffel) = eval_monic(&z, &diag, &off, prec);
        let x = (Float::with_val(prec, &z + 1u32)) / 2u32;
        nodes.push(x);
        weights.push(Float::with_val(prec, &mass / &christoffel));
    }
    let rule = Arc::new(GaussRule { nodes, weights });
    rule_cache().lock().unwrap().insert(key, rule.clone());
    Ok(rule)
}
