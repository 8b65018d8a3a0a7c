use super::*;
use crate::laxpairs::{
    compatibility_residual, default_samples, det_trace_identities, lax_matrices, sylvester_residual,
};
use std::sync::OnceLock;

fn ref_system() -> &'static TildeSystem {
    static TS: OnceLock<TildeSystem> = OnceLock::new();
    TS.get_or_init(|| {
        let ctx = PrecisionContext::new(256).unwrap();
        let p = WeightParams::parse(&ctx, "0.3", "0.7", "1.5", "2").unwrap();
        TildeSystem::new(&p, 4, &ctx).unwrap()
    })
}

fn tol() -> Float {
    ref_system().ctx.tol_rel()
}

#[test]
fn legendre_tilde_mass() {
    let ctx = PrecisionContext::new(128).unwrap();
    let p = WeightParams::parse(&ctx, "0", "0", "0", "2").unwrap();
    let w = (0..6)
        .map(|k| Jet2::constant(Float::with_val(128, 1) / Float::with_val(128, k + 1)))
        .collect();
    let m = MomentTable::from_jets(p, w);
    let half = Jet2::constant(Float::with_val(128, 0.5));
    let tm = tilde_moments(&m, &half, 2).unwrap();
    let twelfth = Float::with_val(128, 1) / 12u32;
    assert!(rel_residual(&tm.w[0].v, &twelfth) < 1e-35);
    // symmetric weight: odd central moments vanish, so w̃_1 = w̃_0 / 2
    assert!(rel_residual(&tm.w[1].v, &Float::with_val(128, &twelfth / 2u32)) < 1e-35);
}

#[test]
fn associated_shift() {
    let ts = ref_system();
    assert!(ts.shift_mismatch(ts.n_max + 1) < tol());
    assert!(rel_residual(&ts.tw0().v, &ts.rc.gamma[1].v) < tol());
    assert!(ts.tw0().v > 0);
}

#[test]
fn explicit_quadruple_matches_substitution() {
    let ts = ref_system();
    let sub = tilde_quadruple_x_from_base(&ts.base_qx, ts.w0(), ts.beta0());
    for (a, b) in [(&ts.qx.b, &sub.b), (&ts.qx.c, &sub.c), (&ts.qx.d, &sub.d)] {
        for i in 0..4 {
            let r = rel_residual(&a.coeff(i).v, &b.coeff(i).v);
            assert!(r < tol(), "coefficient {i}: {r}");
        }
    }
    let drop = ts.ctx.drop();
    assert_eq!(ts.qx.b.degree(&drop), Some(1));
    assert_eq!(ts.qx.c.degree(&drop), Some(2));
    assert_eq!(ts.qx.d.degree(&drop), Some(1));
}

#[test]
fn hat_c_at_t() {
    let ts = ref_system();
    let t = ts.params.t_jet();
    let lw = &ts.w0().derivative() / ts.w0();
    let want = &(&(ts.beta0() - &t) * &lw).scale_i(2) + &cst(&ts.params.mu);
    let got = ts.qt.c.eval(&Jet2::constant(ts.params.t.clone()));
    assert!(rel_residual(&got.v, &want.v) < tol());
}

#[test]
fn closed_forms_match_recursion() {
    let ts = ref_system();
    let lx = ts.tilde_ladder_x().unwrap();
    let lt = ts.tilde_ladder_t().unwrap();
    assert_eq!(lx.bound_l, Some(2));
    assert_eq!(lx.bound_theta, Some(1));
    for n in 1..=ts.n_max {
        let cfl = closed_form_ladder(ts, n).unwrap();
        let cmp = compare_closed_form(&cfl, &lx, &lt);
        assert!(cmp.max() < tol(), "n = {n}: {cmp:?}");
        assert!(cmp.l_n0_as_printed > 1e-3);
    }
    let c1 = closed_form_ladder(ts, 1).unwrap();
    assert_eq!(c1.nu_n.v, 9.5);
}

#[test]
fn tilde_sylvester_and_identities() {
    let ts = ref_system();
    let samples = default_samples(&ts.params.t, 7);
    let lx = ts.tilde_ladder_x().unwrap();
    let lt = ts.tilde_ladder_t().unwrap();
    for n in 1..=ts.n_max {
        let rx = sylvester_residual(&lax_matrices(&lx, n), &ts.trc, &samples).unwrap();
        let rt = sylvester_residual(&lax_matrices(&lt, n), &ts.trc, &samples).unwrap();
        assert!(rx < tol() && rt < tol(), "n = {n}: {rx} {rt}");
        let dx = det_trace_identities(&lx, n);
        let dt = det_trace_identities(&lt, n);
        assert!(dx.trace < tol() && dx.det < tol(), "{dx:?}");
        assert!(dt.trace < tol() && dt.det < tol(), "{dt:?}");
        assert!(residue_matching(&lx, &lt, n) < tol());
        let c = compatibility_residual(&lx, &lt, n, &samples).unwrap();
        assert!(c < tol(), "compat {n}: {c}");
    }
}

#[test]
fn auxiliary() {
    let ts = ref_system();
    let lt = ts.tilde_ladder_t().unwrap();
    for n in 1..=3 {
        let a = auxiliary_identities(ts, &lt, n).unwrap();
        assert!(a.another_thetahat < tol(), "{a:?}");
        assert!(a.w0_via_beta0 < tol(), "{a:?}");
        assert!(a.w0_via_beta0_as_printed > 1e-3);
        assert!(a.tildebeta_beta.as_ref().unwrap() < &tol(), "{a:?}");
        assert!(a.gn < tol(), "{a:?}");
    }
}

#[test]
fn mu_zero_skips_tildebeta_relation() {
    let ctx = PrecisionContext::new(192).unwrap();
    let p = WeightParams::parse(&ctx, "0.3", "0.7", "0", "2").unwrap();
    let ts = TildeSystem::new(&p, 2, &ctx).unwrap();
    let lt = ts.tilde_ladder_t().unwrap();
    let a = auxiliary_identities(&ts, &lt, 1).unwrap();
    assert!(a.tildebeta_beta.is_none());
    assert!(ts.qt.b.coeff(0).v.is_zero());
    assert!(ts.qt.d.coeff(0).v.is_zero());
}

#[test]
fn corruption_breaks_shift() {
    let mut ts = ref_system().clone();
    ts.corrupt(Corruption::Gamma { n: 2, factor: 1.01 }).unwrap();
    assert!(ts.lenient);
    assert!(ts.shift_mismatch(3) > 1e-5);
    assert!(ts.tilde_ladder_x().is_ok());
    assert!(ts.corrupt(Corruption::Beta { n: 99, factor: 1.0 }).is_err());
}
