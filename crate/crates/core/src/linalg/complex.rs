use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// A complex number as an explicit `(re, im)` pair of `f64`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Cx {
    pub re: f64,
    pub im: f64,
}

impl Cx {
    pub const ZERO: Cx = Cx { re: 0.0, im: 0.0 };
    pub const ONE: Cx = Cx { re: 1.0, im: 0.0 };
    pub const I: Cx = Cx { re: 0.0, im: 1.0 };

    pub const fn new(re: f64, im: f64) -> Self {
        Cx { re, im }
    }

    pub const fn real(re: f64) -> Self {
        Cx { re, im: 0.0 }
    }

    /// `e^{i theta}`
    pub fn cis(theta: f64) -> Self {
        Cx {
            re: theta.cos(),
            im: theta.sin(),
        }
    }

    pub fn conj(self) -> Self {
        Cx {
            re: self.re,
            im: -self.im,
        }
    }

    pub fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn scale(self, k: f64) -> Self {
        Cx {
            re: self.re * k,
            im: self.im * k,
        }
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn powi(self, k: u32) -> Self {
        let mut acc = Cx::ONE;
        for _ in 0..k {
            acc *= self;
        }
        acc
    }

    /// Cayley transform `(x - i) / (x + i)` of a real number.
    pub fn cayley(x: f64) -> Self {
        // (x - i)^2 / (x^2 + 1)
        let d = x * x + 1.0;
        Cx {
            re: (x * x - 1.0) / d,
            im: -2.0 * x / d,
        }
    }
}

impl fmt::Display for Cx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im >= 0.0 {
            write!(f, "{}+{}i", self.re, self.im)
        } else {
            write!(f, "{}{}i", self.re, self.im)
        }
    }
}

impl From<f64> for Cx {
    fn from(re: f64) -> Self {
        Cx::real(re)
    }
}

impl Add for Cx {
    type Output = Cx;
    fn add(self, o: Cx) -> Cx {
        Cx {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }
}

impl Sub for Cx {
    type Output = Cx;
    fn sub(self, o: Cx) -> Cx {
        Cx {
            re: self.re - o.re,
            im: self.im - o.im,
        }
    }
}

impl Mul for Cx {
    type Output = Cx;
    fn mul(self, o: Cx) -> Cx {
        Cx {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}

impl Mul<f64> for Cx {
    type Output = Cx;
    fn mul(self, k: f64) -> Cx {
        self.scale(k)
    }
}

impl Div for Cx {
    type Output = Cx;
    // Smith's algorithm
    fn div(self, o: Cx) -> Cx {
        if o.re.abs() >= o.im.abs() {
            let r = o.im / o.re;
            let d = o.re + o.im * r;
            Cx {
                re: (self.re + self.im * r) / d,
                im: (self.im - self.re * r) / d,
            }
        } else {
            let r = o.re / o.im;
            let d = o.re * r + o.im;
            Cx {
                re: (self.re * r + self.im) / d,
                im: (self.im * r - self.re) / d,
            }
        }
    }
}

impl Neg for Cx {
    type Output = Cx;
    fn neg(self) -> Cx {
        Cx {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl AddAssign for Cx {
    fn add_assign(&mut self, o: Cx) {
        self.re += o.re;
        self.im += o.im;
    }
}

impl SubAssign for Cx {
    fn sub_assign(&mut self, o: Cx) {
        self.re -= o.re;
        self.im -= o.im;
    }
}

impl MulAssign for Cx {
    fn mul_assign(&mut self, o: Cx) {
        *self = *self * o;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cayley_of_one_is_minus_i() {
        let c = Cx::cayley(1.0);
        assert!((c - Cx::new(0.0, -1.0)).abs() < 1e-15);
        assert_eq!(Cx::cayley(0.0), Cx::new(-1.0, 0.0));
    }

    #[test]
    fn cayley_matches_quotient() {
        for &x in &[-3.0, -0.2, 0.7, 12.0] {
            let q = (Cx::real(x) - Cx::I) / (Cx::real(x) + Cx::I);
            assert!((q - Cx::cayley(x)).abs() < 1e-15);
            assert!((Cx::cayley(x).abs() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn division_inverts_multiplication() {
        let a = Cx::new(1.5, -2.0);
        let b = Cx::new(-0.3, 4.0);
        assert!(((a * b) / b - a).abs() < 1e-14);
        let tiny = Cx::new(1e-200, 3e-200);
        assert!(((a * tiny) / tiny - a).abs() < 1e-14);
    }
}
