//! Truncated third-order multivariate Taylor jets.
//!
//! Only canonical index tuples (`i <= j <= k`) are computed; the remaining
//! entries are copies, so the second and third blocks are exactly symmetric.

use crate::error::{Error, Result};

use super::ast::{integer_exponent, BinaryOp, UnaryOp};

/// Largest supported chart dimension.
pub const MAX_DIM: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct Jet3 {
    n: usize,
    pub value: f64,
    pub first: [f64; MAX_DIM],
    pub second: [[f64; MAX_DIM]; MAX_DIM],
    pub third: [[[f64; MAX_DIM]; MAX_DIM]; MAX_DIM],
}

impl Jet3 {
    pub fn constant(n: usize, value: f64) -> Jet3 {
        assert!(n <= MAX_DIM, "jet dimension {n} exceeds {MAX_DIM}");
        Jet3 {
            n,
            value,
            first: [0.0; MAX_DIM],
            second: [[0.0; MAX_DIM]; MAX_DIM],
            third: [[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM],
        }
    }

    pub fn variable(n: usize, index: usize, value: f64) -> Jet3 {
        let mut jet = Jet3::constant(n, value);
        jet.first[index] = 1.0;
        jet
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `∂_i f`
    pub fn d1(&self, i: usize) -> f64 {
        self.first[i]
    }

    /// `∂_i ∂_j f`
    pub fn d2(&self, i: usize, j: usize) -> f64 {
        self.second[i][j]
    }

    /// `∂_i ∂_j ∂_k f`
    pub fn d3(&self, i: usize, j: usize, k: usize) -> f64 {
        self.third[i][j][k]
    }

    fn set2(&mut self, i: usize, j: usize, v: f64) {
        self.second[i][j] = v;
        self.second[j][i] = v;
    }

    fn set3(&mut self, i: usize, j: usize, k: usize, v: f64) {
        self.third[i][j][k] = v;
        self.third[i][k][j] = v;
        self.third[j][i][k] = v;
        self.third[j][k][i] = v;
        self.third[k][i][j] = v;
        self.third[k][j][i] = v;
    }

    fn zip(&self, other: &Jet3, f: impl Fn(f64, f64) -> f64) -> Jet3 {
        let n = self.n;
        let mut out = Jet3::constant(n, f(self.value, other.value));
        for i in 0..n {
            out.first[i] = f(self.first[i], other.first[i]);
            for j in i..n {
                out.set2(i, j, f(self.second[i][j], other.second[i][j]));
                for k in j..n {
                    out.set3(i, j, k, f(self.third[i][j][k], other.third[i][j][k]));
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Jet3) -> Jet3 {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Jet3) -> Jet3 {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> Jet3 {
        self.zip(self, |a, _| c * a)
    }

    pub fn mul(&self, b: &Jet3) -> Jet3 {
        let a = self;
        let n = a.n;
        let mut out = Jet3::constant(n, a.value * b.value);
        for i in 0..n {
            out.first[i] = a.first[i] * b.value + a.value * b.first[i];
            for j in i..n {
                let s = a.second[i][j] * b.value
                    + a.first[i] * b.first[j]
                    + a.first[j] * b.first[i]
                    + a.value * b.second[i][j];
                out.set2(i, j, s);
                for k in j..n {
                    let t = a.third[i][j][k] * b.value
                        + a.second[i][j] * b.first[k]
                        + a.second[i][k] * b.first[j]
                        + a.second[j][k] * b.first[i]
                        + a.first[i] * b.second[j][k]
                        + a.first[j] * b.second[i][k]
                        + a.first[k] * b.second[i][j]
                        + a.value * b.third[i][j][k];
                    out.set3(i, j, k, t);
                }
            }
        }
        out
    }

    /// Chain rule for `φ(self)` given `φ(v), φ'(v), φ''(v), φ'''(v)` at the
    /// jet's value `v`.
    pub fn compose(&self, phi: [f64; 4]) -> Jet3 {
        let [d0, d1, d2, d3] = phi;
        let (f, s, t) = (&self.first, &self.second, &self.third);
        let n = self.n;
        let mut out = Jet3::constant(n, d0);
        for i in 0..n {
            out.first[i] = d1 * f[i];
            for j in i..n {
                out.set2(i, j, d2 * f[i] * f[j] + d1 * s[i][j]);
                for k in j..n {
                    let v = d3 * f[i] * f[j] * f[k]
                        + d2 * (s[i][j] * f[k] + s[i][k] * f[j] + s[j][k] * f[i])
                        + d1 * t[i][j][k];
                    out.set3(i, j, k, v);
                }
            }
        }
        out
    }

    pub fn recip(&self) -> Result<Jet3> {
        let x = self.value;
        if x == 0.0 || !x.is_finite() {
            return Err(Error::Domain(format!("division by {x}")));
        }
        let r = 1.0 / x;
        Ok(self.compose([r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r]))
    }

    pub fn div(&self, other: &Jet3) -> Result<Jet3> {
        Ok(self.mul(&other.recip()?))
    }

    pub fn unary(&self, op: UnaryOp) -> Result<Jet3> {
        let x = self.value;
        let phi = match op {
            UnaryOp::Neg => return Ok(self.scale(-1.0)),
            UnaryOp::Sin => {
                let (s, c) = x.sin_cos();
                [s, c, -s, -c]
            }
            UnaryOp::Cos => {
                let (s, c) = x.sin_cos();
                [c, -s, -c, s]
            }
            UnaryOp::Sinh => {
                let (s, c) = (x.sinh(), x.cosh());
                [s, c, s, c]
            }
            UnaryOp::Cosh => {
                let (s, c) = (x.sinh(), x.cosh());
                [c, s, c, s]
            }
            UnaryOp::Tanh => {
                let t = x.tanh();
                let sech2 = 1.0 - t * t;
                [t, sech2, -2.0 * t * sech2, sech2 * (6.0 * t * t - 2.0)]
            }
            UnaryOp::Exp => {
                let e = x.exp();
                [e, e, e, e]
            }
            UnaryOp::Log => {
                if x <= 0.0 {
                    return Err(Error::Domain(format!("log of non-positive value {x}")));
                }
                let r = 1.0 / x;
                [x.ln(), r, -r * r, 2.0 * r * r * r]
            }
            UnaryOp::Sqrt => {
                if x <= 0.0 {
                    return Err(Error::Domain(format!("sqrt of non-positive value {x}")));
                }
                let s = x.sqrt();
                let r = 1.0 / x;
                [s, 0.5 / s, -0.25 * r / s, 0.375 * r * r / s]
            }
            UnaryOp::Atan => {
                let q = 1.0 / (1.0 + x * x);
                [x.atan(), q, -2.0 * x * q * q, (6.0 * x * x - 2.0) * q * q * q]
            }
            UnaryOp::Flat => {
                let e = super::ast::flat(x);
                if e == 0.0 {
                    [0.0; 4]
                } else {
                    let r = 1.0 / x;
                    let r2 = r * r;
                    [
                        e,
                        e * r2,
                        e * (1.0 - 2.0 * x) * r2 * r2,
                        e * (1.0 - 6.0 * x + 6.0 * x * x) * r2 * r2 * r2,
                    ]
                }
            }
        };
        Ok(self.compose(phi))
    }

    pub fn binary(&self, op: BinaryOp, other: &Jet3) -> Result<Jet3> {
        match op {
            BinaryOp::Add => Ok(self.add(other)),
            BinaryOp::Sub => Ok(self.sub(other)),
            BinaryOp::Mul => Ok(self.mul(other)),
            BinaryOp::Div => self.div(other),
            BinaryOp::Pow => {
                if other.first[..other.n].iter().any(|&d| d != 0.0) {
                    return Err(Error::Domain("exponent is not constant".into()));
                }
                self.pow_const(other.value)
            }
        }
    }

    /// `self^c` for a constant exponent. Integer exponents use the power
    /// rule directly; anything else goes through `exp(c log self)`.
    pub fn pow_const(&self, c: f64) -> Result<Jet3> {
        let x = self.value;
        match integer_exponent(c) {
            Some(0) => Ok(Jet3::constant(self.n, 1.0)),
            Some(1) => Ok(self.clone()),
            Some(k) => {
                if k < 0 && x == 0.0 {
                    return Err(Error::Domain("negative power of zero".into()));
                }
                let kf = k as f64;
                let term = |coef: f64, m: i32| if coef == 0.0 { 0.0 } else { coef * x.powi(m) };
                Ok(self.compose([
                    x.powi(k),
                    term(kf, k - 1),
                    term(kf * (kf - 1.0), k - 2),
                    term(kf * (kf - 1.0) * (kf - 2.0), k - 3),
                ]))
            }
            None => {
                if x <= 0.0 {
                    return Err(Error::Domain(format!(
                        "non-integer power of non-positive base {x}"
                    )));
                }
                self.unary(UnaryOp::Log)?.scale(c).unary(UnaryOp::Exp)
            }
        }
    }
}
