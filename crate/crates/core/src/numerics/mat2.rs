//! 2x2 matrices over rational functions in x, and their point evaluations.

use rug::Float;

use super::jet::Jet2;
use super::poly::Poly;
use super::precision::rel_residual;

/// num(x) / den(x). Not reduced; products simply multiply denominators.
#[derive(Clone, Debug)]
pub struct RatFn {
    pub num: Poly,
    pub den: Poly,
}

impl RatFn {
    pub fn new(num: Poly, den: Poly) -> Self {
        Self { num, den }
    }

    pub fn poly(p: Poly) -> Self {
        let prec = p.prec();
        Self::new(p, Poly::constant(Jet2::one(prec)))
    }

    pub fn zero(prec: u32) -> Self {
        Self::poly(Poly::zero(prec))
    }

    pub fn add(&self, o: &RatFn) -> RatFn {
        RatFn::new(&self.num * &o.den + &o.num * &self.den, &self.den * &o.den)
    }

    pub fn sub(&self, o: &RatFn) -> RatFn {
        RatFn::new(&self.num * &o.den - &o.num * &self.den, &self.den * &o.den)
    }

    pub fn mul(&self, o: &RatFn) -> RatFn {
        RatFn::new(&self.num * &o.num, &self.den * &o.den)
    }

    pub fn eval(&self, x: &Jet2) -> Jet2 {
        &self.num.eval(x) / &self.den.eval(x)
    }

    /// x-derivative at x: (N'D - ND')/D^2.
    pub fn eval_dx(&self, x: &Jet2) -> Jet2 {
        let n = self.num.eval(x);
        let d = self.den.eval(x);
        let top = &self.num.eval_dx(x) * &d - &n * &self.den.eval_dx(x);
        &top / &d.sqr()
    }
}

pub type JetMat = [[Jet2; 2]; 2];

pub fn jm_mul(a: &JetMat, b: &JetMat) -> JetMat {
    let e = |i: usize, j: usize| &(&a[i][0] * &b[0][j]) + &(&a[i][1] * &b[1][j]);
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

pub fn jm_sub(a: &JetMat, b: &JetMat) -> JetMat {
    let e = |i: usize, j: usize| &a[i][j] - &b[i][j];
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

pub fn jm_add(a: &JetMat, b: &JetMat) -> JetMat {
    let e = |i: usize, j: usize| &a[i][j] + &b[i][j];
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

/// Max entrywise relative residual between the value parts of `l` and `r`.
pub fn jm_residual(l: &JetMat, r: &JetMat) -> Float {
    let mut worst = Float::new(l[0][0].prec());
    for i in 0..2 {
        for j in 0..2 {
            let res = rel_residual(&l[i][j].v, &r[i][j].v);
            if res.is_nan() || res > worst {
                worst = res;
            }
        }
    }
    worst
}

#[derive(Clone, Debug)]
pub struct Mat2 {
    pub e: [[RatFn; 2]; 2],
}

impl Mat2 {
    pub fn new(e: [[RatFn; 2]; 2]) -> Self {
        Self { e }
    }

    /// Matrix of polynomials over a common denominator.
    pub fn over(den: &Poly, nums: [[Poly; 2]; 2]) -> Self {
        let [[a, b], [c, d]] = nums;
        let r = |p: Poly| RatFn::new(p, den.clone());
        Self::new([[r(a), r(b)], [r(c), r(d)]])
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let e = |i: usize, j: usize| self.e[i][0].mul(&o.e[0][j]).add(&self.e[i][1].mul(&o.e[1][j]));
        Mat2::new([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }

    pub fn sub(&self, o: &Mat2) -> Mat2 {
        let e = |i: usize, j: usize| self.e[i][j].sub(&o.e[i][j]);
        Mat2::new([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }

    pub fn add(&self, o: &Mat2) -> Mat2 {
        let e = |i: usize, j: usize| self.e[i][j].add(&o.e[i][j]);
        Mat2::new([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }

    /// [self, o] = self o - o self
    pub fn commutator(&self, o: &Mat2) -> Mat2 {
        self.mul(o).sub(&o.mul(self))
    }

    pub fn eval(&self, x: &Jet2) -> JetMat {
        let e = |i: usize, j: usize| self.e[i][j].eval(x);
        [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
    }

    pub fn eval_dx(&self, x: &Jet2) -> JetMat {
        let e = |i: usize, j: usize| self.e[i][j].eval_dx(x);
        [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
    }

    pub fn trace(&self) -> RatFn {
        self.e[0][0].add(&self.e[1][1])
    }

    pub fn det(&self) -> RatFn {
        self.e[0][0].mul(&self.e[1][1]).sub(&self.e[0][1].mul(&self.e[1][0]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 128;

    fn c(v: f64) -> Jet2 {
        Jet2::constant(Float::with_val(P, v))
    }

    fn p(cs: &[f64]) -> Poly {
        Poly::from_f64(P, cs)
    }

    #[test]
    fn commutator_matches_pointwise() {
        let den = p(&[0.0, 1.0]);
        let m = Mat2::over(&den, [[p(&[1.0, 2.0]), p(&[0.5])], [p(&[0.0, 0.0, 1.0]), p(&[-1.0])]]);
        let n = Mat2::over(&p(&[1.0]), [[p(&[3.0]), p(&[0.0, 1.0])], [p(&[2.0]), p(&[1.0, 1.0])]]);
        let x = c(0.7);
        let direct = jm_sub(&jm_mul(&m.eval(&x), &n.eval(&x)), &jm_mul(&n.eval(&x), &m.eval(&x)));
        let via = m.commutator(&n).eval(&x);
        assert!(jm_residual(&direct, &via).to_f64() < 1e-35);
    }

    #[test]
    fn rational_x_derivative() {
        // (x^2)/(x+1) at x = 1: derivative (2x(x+1) - x^2)/(x+1)^2 = 3/4
        let r = RatFn::new(p(&[0.0, 0.0, 1.0]), p(&[1.0, 1.0]));
        assert_eq!(r.eval_dx(&c(1.0)).v, 0.75);
    }
}
