//! Second-order jets in the deformation variable t.
//!
//! A `Jet2` stores (f, f', f'') at a fixed t. Arithmetic follows the Leibniz
//! rule, so any rational expression built from jets carries exact first and
//! second t-derivatives without finite differences.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::ops::NegAssign;
use rug::Float;

#[derive(Clone, PartialEq)]
pub struct Jet2 {
    pub v: Float,
    pub d1: Float,
    pub d2: Float,
}

impl Jet2 {
    pub fn new(v: Float, d1: Float, d2: Float) -> Self {
        Self { v, d1, d2 }
    }

    pub fn zero(prec: u32) -> Self {
        Self::constant(Float::new(prec))
    }

    pub fn one(prec: u32) -> Self {
        Self::constant(Float::with_val(prec, 1))
    }

    pub fn constant(v: Float) -> Self {
        let prec = v.prec();
        Self {
            v,
            d1: Float::new(prec),
            d2: Float::new(prec),
        }
    }

    pub fn from_i64(prec: u32, k: i64) -> Self {
        Self::constant(Float::with_val(prec, k))
    }

    /// The independent variable itself: (t, 1, 0).
    pub fn variable(t: Float) -> Self {
        let prec = t.prec();
        Self {
            v: t,
            d1: Float::with_val(prec, 1),
            d2: Float::new(prec),
        }
    }

    pub fn prec(&self) -> u32 {
        self.v.prec()
    }

    /// The jet of f' = (f', f'', ?). The unknown third derivative is NaN so
    /// that any accidental use of it is visible downstream.
    pub fn derivative(&self) -> Self {
        Self {
            v: self.d1.clone(),
            d1: self.d2.clone(),
            d2: Float::with_val(self.prec(), rug::float::Special::Nan),
        }
    }

    pub fn sqr(&self) -> Self {
        self * self
    }

    pub fn recip(&self) -> Self {
        Self::one(self.prec()) / self
    }

    pub fn scale(&self, c: &Float) -> Self {
        let p = self.prec();
        Self {
            v: Float::with_val(p, &self.v * c),
            d1: Float::with_val(p, &self.d1 * c),
            d2: Float::with_val(p, &self.d2 * c),
        }
    }

    pub fn scale_i(&self, c: i64) -> Self {
        let p = self.prec();
        Self {
            v: Float::with_val(p, &self.v * c),
            d1: Float::with_val(p, &self.d1 * c),
            d2: Float::with_val(p, &self.d2 * c),
        }
    }

    pub fn half(&self) -> Self {
        Self {
            v: Float::with_val(self.prec(), &self.v / 2u32),
            d1: Float::with_val(self.prec(), &self.d1 / 2u32),
            d2: Float::with_val(self.prec(), &self.d2 / 2u32),
        }
    }

    pub fn add_f(&self, c: &Float) -> Self {
        let mut r = self.clone();
        r.v += c;
        r
    }

    pub fn add_i(&self, c: i64) -> Self {
        let mut r = self.clone();
        r.v += c;
        r
    }

    /// ∂_t ln f = f'/f as a plain number.
    pub fn log_derivative(&self) -> Float {
        Float::with_val(self.prec(), &self.d1 / &self.v)
    }

    pub fn abs_max(&self) -> Float {
        let mut m = Float::with_val(self.prec(), self.v.abs_ref());
        let a = Float::with_val(self.prec(), self.d1.abs_ref());
        if a > m {
            m = a;
        }
        let b = Float::with_val(self.prec(), self.d2.abs_ref());
        if b > m {
            m = b;
        }
        m
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite() && self.d1.is_finite() && self.d2.is_finite()
    }
}

impl fmt::Debug for Jet2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Jet2({:.6e}, {:.6e}, {:.6e})",
            self.v.to_f64(),
            self.d1.to_f64(),
            self.d2.to_f64()
        )
    }
}

impl Add<&Jet2> for &Jet2 {
    type Output = Jet2;
    fn add(self, o: &Jet2) -> Jet2 {
        let p = self.prec().max(o.prec());
        Jet2 {
            v: Float::with_val(p, &self.v + &o.v),
            d1: Float::with_val(p, &self.d1 + &o.d1),
            d2: Float::with_val(p, &self.d2 + &o.d2),
        }
    }
}

impl Sub<&Jet2> for &Jet2 {
    type Output = Jet2;
    fn sub(self, o: &Jet2) -> Jet2 {
        let p = self.prec().max(o.prec());
        Jet2 {
            v: Float::with_val(p, &self.v - &o.v),
            d1: Float::with_val(p, &self.d1 - &o.d1),
            d2: Float::with_val(p, &self.d2 - &o.d2),
        }
    }
}

impl Mul<&Jet2> for &Jet2 {
    type Output = Jet2;
    fn mul(self, o: &Jet2) -> Jet2 {
        let p = self.prec().max(o.prec());
        let v = Float::with_val(p, &self.v * &o.v);
        let d1 = Float::with_val(p, &self.d1 * &o.v) + Float::with_val(p, &self.v * &o.d1);
        let cross = Float::with_val(p, &self.d1 * &o.d1) * 2u32;
        let d2 = Float::with_val(p, &self.d2 * &o.v) + cross + Float::with_val(p, &self.v * &o.d2);
        Jet2 { v, d1, d2 }
    }
}

impl Div<&Jet2> for &Jet2 {
    type Output = Jet2;
    fn div(self, o: &Jet2) -> Jet2 {
        let p = self.prec().max(o.prec());
        let q = Float::with_val(p, &self.v / &o.v);
        let q1 = (Float::with_val(p, &self.d1) - Float::with_val(p, &q * &o.d1)) / &o.v;
        let q2 = (Float::with_val(p, &self.d2)
            - Float::with_val(p, &q1 * &o.d1) * 2u32
            - Float::with_val(p, &q * &o.d2))
            / &o.v;
        Jet2 { v: q, d1: q1, d2: q2 }
    }
}

impl Neg for &Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        let mut r = self.clone();
        r.v.neg_assign();
        r.d1.neg_assign();
        r.d2.neg_assign();
        r
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(mut self) -> Jet2 {
        self.v.neg_assign();
        self.d1.neg_assign();
        self.d2.neg_assign();
        self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Jet2> for Jet2 {
            type Output = Jet2;
            fn $m(self, o: Jet2) -> Jet2 {
                (&self).$m(&o)
            }
        }
        impl $tr<&Jet2> for Jet2 {
            type Output = Jet2;
            fn $m(self, o: &Jet2) -> Jet2 {
                (&self).$m(o)
            }
        }
        impl $tr<Jet2> for &Jet2 {
            type Output = Jet2;
            fn $m(self, o: Jet2) -> Jet2 {
                self.$m(&o)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl AddAssign<&Jet2> for Jet2 {
    fn add_assign(&mut self, o: &Jet2) {
        self.v += &o.v;
        self.d1 += &o.d1;
        self.d2 += &o.d2;
    }
}

impl SubAssign<&Jet2> for Jet2 {
    fn sub_assign(&mut self, o: &Jet2) {
        self.v -= &o.v;
        self.d1 -= &o.d1;
        self.d2 -= &o.d2;
    }
}

impl MulAssign<&Jet2> for Jet2 {
    fn mul_assign(&mut self, o: &Jet2) {
        *self = &*self * o;
    }
}
