//! Polynomials in x with jet coefficients (ascending order).

use std::ops::{Add, Mul, Neg, Sub};

use rug::Float;

use super::jet::Jet2;

#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    coeffs: Vec<Jet2>,
    prec: u32,
}

impl Poly {
    pub fn new(prec: u32, coeffs: Vec<Jet2>) -> Self {
        Self { coeffs, prec }
    }

    pub fn zero(prec: u32) -> Self {
        Self::new(prec, Vec::new())
    }

    pub fn constant(c: Jet2) -> Self {
        Self::new(c.prec(), vec![c])
    }

    /// x - c
    pub fn x_minus(c: &Jet2) -> Self {
        Self::new(c.prec(), vec![-c, Jet2::one(c.prec())])
    }

    pub fn from_f64(prec: u32, cs: &[f64]) -> Self {
        Self::new(
            prec,
            cs.iter().map(|&c| Jet2::constant(Float::with_val(prec, c))).collect(),
        )
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn coeffs(&self) -> &[Jet2] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, i: usize) -> Jet2 {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| Jet2::zero(self.prec))
    }

    fn max_abs(&self) -> Float {
        let mut m = Float::new(self.prec);
        for c in &self.coeffs {
            let a = c.abs_max();
            if a > m {
                m = a;
            }
        }
        m
    }

    /// Degree after discarding coefficients below `drop` relative to the
    /// largest one. `None` for the zero polynomial.
    pub fn degree(&self, drop: &Float) -> Option<usize> {
        let m = self.max_abs();
        if m.is_zero() {
            return None;
        }
        let cut = Float::with_val(self.prec, &m * drop);
        (0..self.coeffs.len()).rev().find(|&i| self.coeffs[i].abs_max() > cut)
    }

    /// Largest coefficient above `bound`, relative to the largest overall.
    pub fn overflow_above(&self, bound: Option<usize>) -> Float {
        let m = self.max_abs();
        let start = bound.map_or(0, |b| b + 1);
        let mut over = Float::new(self.prec);
        if m.is_zero() {
            return over;
        }
        for c in self.coeffs.iter().skip(start) {
            let a = c.abs_max();
            if a > over {
                over = a;
            }
        }
        over / m
    }

    /// Keeps coefficients up to and including `bound`.
    pub fn truncate(&mut self, bound: Option<usize>) {
        self.coeffs.truncate(bound.map_or(0, |b| b + 1));
    }

    pub fn scale(&self, c: &Jet2) -> Self {
        Self::new(self.prec, self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn eval(&self, x: &Jet2) -> Jet2 {
        let mut acc = Jet2::zero(self.prec);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    pub fn derivative_x(&self) -> Self {
        Self::new(
            self.prec,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.scale_i(i as i64))
                .collect(),
        )
    }

    pub fn eval_dx(&self, x: &Jet2) -> Jet2 {
        self.derivative_x().eval(x)
    }
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.len().max(o.len());
        Poly::new(
            self.prec.max(o.prec),
            (0..n).map(|i| &self.coeff(i) + &o.coeff(i)).collect(),
        )
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let n = self.len().max(o.len());
        Poly::new(
            self.prec.max(o.prec),
            (0..n).map(|i| &self.coeff(i) - &o.coeff(i)).collect(),
        )
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        let prec = self.prec.max(o.prec);
        if self.is_empty() || o.is_empty() {
            return Poly::zero(prec);
        }
        let mut out = vec![Jet2::zero(prec); self.len() + o.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        Poly::new(prec, out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.prec, self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $m(self, o: Poly) -> Poly {
                (&self).$m(&o)
            }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $m(self, o: &Poly) -> Poly {
                (&self).$m(o)
            }
        }
        impl $tr<Poly> for &Poly {
            type Output = Poly;
            fn $m(self, o: Poly) -> Poly {
                self.$m(&o)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 128;

    fn c(v: f64) -> Jet2 {
        Jet2::constant(Float::with_val(P, v))
    }

    #[test]
    fn product_and_eval() {
        let a = Poly::x_minus(&c(1.0));
        let b = Poly::x_minus(&c(2.0));
        let ab = &a * &b;
        assert_eq!(ab.eval(&c(3.0)).v, 2);
        assert_eq!(ab.eval_dx(&c(3.0)).v, 3);
    }

    #[test]
    fn degree_ignores_dust() {
        let mut p = Poly::from_f64(P, &[1.0, 2.0, 1e-20]);
        let drop = Float::with_val(P, Float::i_exp(1, -100));
        assert_eq!(p.degree(&drop), Some(2));
        let drop = Float::with_val(P, Float::i_exp(1, -50));
        assert_eq!(p.degree(&drop), Some(1));
        assert!(p.overflow_above(Some(1)).to_f64() < 1e-19);
        p.truncate(Some(1));
        assert_eq!(p.len(), 2);
        assert_eq!(Poly::zero(P).degree(&drop), None);
    }
}
