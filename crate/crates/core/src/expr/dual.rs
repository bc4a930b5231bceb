use std::ops::{Add, Div, Mul, Neg, Sub};

/// Scalar types an expression can be evaluated over.
pub trait Real:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn constant(v: f64) -> Self;
    /// Seed for coordinate `index`: value `v`, unit derivative in that slot.
    fn coordinate(v: f64, index: usize) -> Self;
    fn value(&self) -> f64;
    /// True when every tracked derivative is exactly zero.
    fn is_constant(&self) -> bool;

    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn tan(self) -> Self;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;
    fn tanh(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn abs(self) -> Self;
    fn powi(self, n: i32) -> Self;
    /// `self^exponent` for a positive base.
    fn powf(self, exponent: Self) -> Self;
    /// `self^exponent` for a constant real exponent (base may be zero).
    fn powc(self, exponent: f64) -> Self;
}

impl Real for f64 {
    fn constant(v: f64) -> Self {
        v
    }
    fn coordinate(v: f64, _index: usize) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn is_constant(&self) -> bool {
        true
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn tan(self) -> Self {
        f64::tan(self)
    }
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
    fn tanh(self) -> Self {
        f64::tanh(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    fn powf(self, exponent: Self) -> Self {
        f64::powf(self, exponent)
    }
    fn powc(self, exponent: f64) -> Self {
        f64::powf(self, exponent)
    }
}

/// First-order dual number carrying the three coordinate partials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualScalar {
    pub value: f64,
    pub partials: [f64; 3],
}

impl DualScalar {
    pub fn new(value: f64, partials: [f64; 3]) -> Self {
        DualScalar { value, partials }
    }

    /// Chain rule: `f(self)` where `f(value) = fv` and `f'(value) = dfv`.
    fn chain(self, fv: f64, dfv: f64) -> Self {
        DualScalar {
            value: fv,
            partials: self.partials.map(|d| dfv * d),
        }
    }
}

impl Add for DualScalar {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        DualScalar {
            value: self.value + o.value,
            partials: [0, 1, 2].map(|i| self.partials[i] + o.partials[i]),
        }
    }
}

impl Sub for DualScalar {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        DualScalar {
            value: self.value - o.value,
            partials: [0, 1, 2].map(|i| self.partials[i] - o.partials[i]),
        }
    }
}

impl Mul for DualScalar {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        DualScalar {
            value: self.value * o.value,
            partials: [0, 1, 2].map(|i| self.partials[i] * o.value + self.value * o.partials[i]),
        }
    }
}

impl Div for DualScalar {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let inv = 1.0 / o.value;
        let q = self.value * inv;
        DualScalar {
            value: q,
            partials: [0, 1, 2].map(|i| (self.partials[i] - q * o.partials[i]) * inv),
        }
    }
}

impl Neg for DualScalar {
    type Output = Self;
    fn neg(self) -> Self {
        DualScalar {
            value: -self.value,
            partials: self.partials.map(|d| -d),
        }
    }
}

impl Real for DualScalar {
    fn constant(v: f64) -> Self {
        DualScalar::new(v, [0.0; 3])
    }
    fn coordinate(v: f64, index: usize) -> Self {
        let mut partials = [0.0; 3];
        partials[index] = 1.0;
        DualScalar::new(v, partials)
    }
    fn value(&self) -> f64 {
        self.value
    }
    fn is_constant(&self) -> bool {
        self.partials.iter().all(|&d| d == 0.0)
    }
    fn sin(self) -> Self {
        self.chain(self.value.sin(), self.value.cos())
    }
    fn cos(self) -> Self {
        self.chain(self.value.cos(), -self.value.sin())
    }
    fn tan(self) -> Self {
        let t = self.value.tan();
        self.chain(t, 1.0 + t * t)
    }
    fn sinh(self) -> Self {
        self.chain(self.value.sinh(), self.value.cosh())
    }
    fn cosh(self) -> Self {
        self.chain(self.value.cosh(), self.value.sinh())
    }
    fn tanh(self) -> Self {
        let t = self.value.tanh();
        self.chain(t, 1.0 - t * t)
    }
    fn exp(self) -> Self {
        let e = self.value.exp();
        self.chain(e, e)
    }
    fn ln(self) -> Self {
        self.chain(self.value.ln(), 1.0 / self.value)
    }
    fn sqrt(self) -> Self {
        let s = self.value.sqrt();
        self.chain(s, 0.5 / s)
    }
    fn abs(self) -> Self {
        let sign = if self.value > 0.0 {
            1.0
        } else if self.value < 0.0 {
            -1.0
        } else {
            0.0
        };
        self.chain(self.value.abs(), sign)
    }
    fn powi(self, n: i32) -> Self {
        let d = if n == 0 { 0.0 } else { n as f64 * self.value.powi(n - 1) };
        self.chain(self.value.powi(n), d)
    }
    fn powf(self, exponent: Self) -> Self {
        let v = self.value.powf(exponent.value);
        let ln_a = self.value.ln();
        DualScalar {
            value: v,
            partials: [0, 1, 2].map(|i| {
                v * (exponent.partials[i] * ln_a + exponent.value * self.partials[i] / self.value)
            }),
        }
    }
    fn powc(self, exponent: f64) -> Self {
        let d = if exponent == 0.0 { 0.0 } else { exponent * self.value.powf(exponent - 1.0) };
        self.chain(self.value.powf(exponent), d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize, v: f64) -> DualScalar {
        DualScalar::coordinate(v, i)
    }

    #[test]
    fn product_rule() {
        let p = x(0, 3.0) * x(1, 5.0);
        assert_eq!(p.value, 15.0);
        assert_eq!(p.partials, [5.0, 3.0, 0.0]);
    }

    #[test]
    fn quotient_rule() {
        let q = x(0, 1.0) / x(2, 2.0);
        assert_eq!(q.value, 0.5);
        assert_eq!(q.partials, [0.5, 0.0, -0.25]);
    }

    #[test]
    fn chain_rule_through_sin() {
        let s = (x(0, 0.5) * x(0, 0.5)).sin();
        assert!((s.partials[0] - 2.0 * 0.5 * (0.25f64).cos()).abs() < 1e-15);
    }

    #[test]
    fn general_power_matches_symbolic() {
        // d/dx x^x = x^x (ln x + 1)
        let a = x(0, 1.7);
        let p = a.powf(a);
        let expected = 1.7f64.powf(1.7) * (1.7f64.ln() + 1.0);
        assert!((p.partials[0] - expected).abs() < 1e-13);
    }

    #[test]
    fn integer_power_of_negative_base() {
        let p = x(1, -2.0).powi(3);
        assert_eq!(p.value, -8.0);
        assert_eq!(p.partials[1], 12.0);
    }
}
