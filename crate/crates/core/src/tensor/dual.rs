//! First-order multivariate dual numbers, used to carry one extra derivative
//! through the curvature formulas (for `∂S` in the Cotton tensor).

use std::ops::{Add, Mul, Neg, Sub};

use crate::expr::MAX_DIM;

/// Arithmetic needed by the curvature formulas.
pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn zero() -> Self;
    fn scale(self, c: f64) -> Self;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }

    fn scale(self, c: f64) -> Self {
        self * c
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual {
    pub value: f64,
    pub grad: [f64; MAX_DIM],
}

impl Dual {
    pub fn new(value: f64, grad: [f64; MAX_DIM]) -> Dual {
        Dual { value, grad }
    }
}

impl Add for Dual {
    type Output = Dual;

    fn add(self, o: Dual) -> Dual {
        let mut grad = self.grad;
        for (g, h) in grad.iter_mut().zip(o.grad) {
            *g += h;
        }
        Dual::new(self.value + o.value, grad)
    }
}

impl Sub for Dual {
    type Output = Dual;

    fn sub(self, o: Dual) -> Dual {
        let mut grad = self.grad;
        for (g, h) in grad.iter_mut().zip(o.grad) {
            *g -= h;
        }
        Dual::new(self.value - o.value, grad)
    }
}

impl Mul for Dual {
    type Output = Dual;

    fn mul(self, o: Dual) -> Dual {
        let mut grad = [0.0; MAX_DIM];
        for (k, g) in grad.iter_mut().enumerate() {
            *g = self.grad[k] * o.value + self.value * o.grad[k];
        }
        Dual::new(self.value * o.value, grad)
    }
}

impl Neg for Dual {
    type Output = Dual;

    fn neg(self) -> Dual {
        self.scale(-1.0)
    }
}

impl Scalar for Dual {
    fn zero() -> Self {
        Dual::new(0.0, [0.0; MAX_DIM])
    }

    fn scale(self, c: f64) -> Self {
        let mut grad = self.grad;
        for g in grad.iter_mut() {
            *g *= c;
        }
        Dual::new(self.value * c, grad)
    }
}
