//! Independent oracles for the moments and the recurrence.

use num::{BigInt, BigRational, One, Zero};
use rug::ops::Pow;
use rug::Float;

use lhpvi_core::numerics::{rel_residual, Jet2, PrecisionContext};
use lhpvi_core::opseq::recurrence_to;
use lhpvi_core::weights::{moment_table, MomentTable, WeightParams};

const BITS: u32 = 320;

/// ∫₀¹ x^{a-1}(1-x)^{b-1}(t-x)^m dx = t^m B(a,b) ₂F₁(-m, a; a+b; 1/t).
fn hypergeometric_moment(a: &Float, b: &Float, m: &Float, t: &Float) -> Float {
    let p = BITS + 64;
    let z = Float::with_val(p, 1u32) / t;
    let ab = Float::with_val(p, a + b);
    let mut term = Float::with_val(p, 1u32);
    let mut sum = Float::with_val(p, 1u32);
    let eps = Float::with_val(p, Float::i_exp(1, -(p as i32)));
    for j in 0u32.. {
        let num = Float::with_val(p, j - Float::with_val(p, m)) * Float::with_val(p, a + j);
        let den = Float::with_val(p, &ab + j) * (j + 1);
        term = term * num / den * &z;
        sum += &term;
        if Float::with_val(p, term.abs_ref()) < eps && j > 8 {
            break;
        }
    }
    let beta = Float::with_val(p, a.gamma_ref()) * Float::with_val(p, b.gamma_ref()) / Float::with_val(p, ab.gamma_ref());
    Float::with_val(BITS, Float::with_val(p, t.pow(m)) * beta * sum)
}

fn oracle_jet(alpha: &Float, beta: &Float, mu: &Float, t: &Float, k: usize) -> Jet2 {
    let a = Float::with_val(BITS, alpha + (k as u32 + 1));
    let b = Float::with_val(BITS, beta + 1u32);
    let m1 = Float::with_val(BITS, mu - 1u32);
    let m2 = Float::with_val(BITS, mu - 2u32);
    let v = hypergeometric_moment(&a, &b, mu, t);
    let d1 = Float::with_val(BITS, mu * hypergeometric_moment(&a, &b, &m1, t));
    let d2 = Float::with_val(BITS, mu * &m1) * hypergeometric_moment(&a, &b, &m2, t);
    Jet2::new(v, d1, d2)
}

#[test]
fn moments_match_hypergeometric_series() {
    let ctx = PrecisionContext::new(BITS).unwrap();
    let tol = ctx.tol_rel();
    for (al, be, mu, t) in [
        ("0.3", "0.7", "1.5", "2"),
        ("0.3", "0.7", "1.5", "1.5"),
        ("0.3", "0.7", "1.5", "3"),
        ("-0.5", "2.25", "0.75", "1.25"),
        ("1", "-0.4", "3.5", "6"),
    ] {
        let p = WeightParams::parse(&ctx, al, be, mu, t).unwrap();
        let tab = moment_table(&p, 12, &ctx).unwrap();
        for k in 0..=12 {
            let o = oracle_jet(&p.alpha, &p.beta, &p.mu, &p.t, k);
            for (got, want) in [(&tab.w[k].v, &o.v), (&tab.w[k].d1, &o.d1), (&tab.w[k].d2, &o.d2)] {
                let r = rel_residual(got, want);
                assert!(r < tol, "({al},{be},{mu},{t}) k={k}: {}", r.to_f64());
            }
        }
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn det(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut d = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return BigRational::zero();
        };
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d *= &m[c][c];
        for r in c + 1..n {
            let f = &m[r][c] / &m[c][c];
            for k in c..n {
                let s = &f * &m[c][k];
                m[r][k] -= s;
            }
        }
    }
    d
}

/// Δ_n and the same determinant with its last column shifted by one moment.
fn hankel_pair(w: &[BigRational], n: usize) -> (BigRational, BigRational) {
    if n == 0 {
        return (BigRational::one(), BigRational::zero());
    }
    let h = |shift: bool| {
        (0..n)
            .map(|i| (0..n).map(|j| w[i + j + usize::from(shift && j == n - 1)].clone()).collect())
            .collect::<Vec<Vec<_>>>()
    };
    (det(h(false)), det(h(true)))
}

/// β_n = Δ'_{n+1}/Δ_{n+1} - Δ'_n/Δ_n, γ_n = Δ_{n+1}Δ_{n-1}/Δ_n².
fn exact_coeffs(w: &[BigRational], n_max: usize) -> (Vec<BigRational>, Vec<BigRational>) {
    let pairs: Vec<_> = (0..=n_max + 1).map(|n| hankel_pair(w, n)).collect();
    let ratio = |n: usize| {
        if n == 0 {
            BigRational::zero()
        } else {
            &pairs[n].1 / &pairs[n].0
        }
    };
    let beta = (0..=n_max).map(|n| ratio(n + 1) - ratio(n)).collect();
    let gamma = (0..=n_max)
        .map(|n| {
            if n == 0 {
                pairs[1].0.clone()
            } else {
                &pairs[n + 1].0 * &pairs[n - 1].0 / (&pairs[n].0 * &pairs[n].0)
            }
        })
        .collect();
    (beta, gamma)
}

fn to_float(r: &BigRational) -> Float {
    let n = Float::with_val(BITS, Float::parse(r.numer().to_string()).unwrap());
    n / Float::with_val(BITS, Float::parse(r.denom().to_string()).unwrap())
}

fn check_against_exact(tab: &MomentTable, exact: &[BigRational], n_max: usize, bound: &Float) {
    let ctx = PrecisionContext::new(BITS).unwrap();
    let rc = recurrence_to(tab, n_max, &ctx).unwrap();
    let (eb, eg) = exact_coeffs(exact, n_max);
    for n in 0..=n_max {
        for (got, want) in [(&rc.beta[n].v, &eb[n]), (&rc.gamma[n].v, &eg[n])] {
            let d = Float::with_val(BITS, got - to_float(want)).abs();
            assert!(d < *bound, "n={n}: {}", d.to_f64());
        }
    }
}

#[test]
fn legendre_against_exact_hankel_determinants() {
    let ctx = PrecisionContext::new(BITS).unwrap();
    let n_max = 8;
    let exact: Vec<BigRational> = (0..=2 * n_max + 2).map(|k| rat(1, k as i64 + 1)).collect();
    let (eb, eg) = exact_coeffs(&exact, n_max);
    for n in 1..=n_max {
        let n = n as i64;
        assert_eq!(eb[n as usize], rat(1, 2));
        assert_eq!(eg[n as usize], rat(n * n, 4 * (2 * n - 1) * (2 * n + 1)));
    }
    let w = exact.iter().map(|r| Jet2::constant(to_float(r))).collect();
    let p = WeightParams::parse(&ctx, "0", "0", "0", "2").unwrap();
    let bound = Float::with_val(BITS, Float::parse("1e-40").unwrap());
    check_against_exact(&MomentTable::from_jets(p, w), &exact, n_max, &bound);
}

/// x^1 (1-x)^2 (t-x) with t = 5/2 has rational moments.
#[test]
fn integer_exponent_weight_against_exact_hankel() {
    let ctx = PrecisionContext::new(BITS).unwrap();
    let n_max = 6;
    let t = rat(5, 2);
    // x^{k+1}(1 - 2x + x²)(t - x), integrated termwise
    let exact: Vec<BigRational> = (0..=2 * n_max + 2)
        .map(|k| {
            let k = k as i64;
            let m = |e: i64| rat(1, k + e + 1);
            &t * (m(1) - m(2) * rat(2, 1) + m(3)) - (m(2) - m(3) * rat(2, 1) + m(4))
        })
        .collect();
    let p = WeightParams::parse(&ctx, "1", "2", "1", "5/2").unwrap();
    let tab = moment_table(&p, 2 * n_max + 1, &ctx).unwrap();
    for (k, w) in tab.w.iter().enumerate() {
        assert!(rel_residual(&w.v, &to_float(&exact[k])) < ctx.tol_rel(), "k={k}");
        // d/dt of the moment is ∫ x^{k+1}(1-x)² dx
        let k = k as i64;
        let dt = rat(1, k + 2) - rat(2, k + 3) + rat(1, k + 4);
        assert!(rel_residual(&w.d1, &to_float(&dt)) < ctx.tol_rel(), "k={k}");
        assert!(w.d2.is_zero() || Float::with_val(BITS, w.d2.abs_ref()) < ctx.tol_rel());
    }
    check_against_exact(&tab, &exact, n_max, &ctx.tol_rel());
}
