//! Gaussian integers, used to evaluate correlations of sequences over the
//! quaternary (and binary) unit circle without rounding.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct GaussInt {
    pub re: i64,
    pub im: i64,
}

impl GaussInt {
    pub const ZERO: GaussInt = GaussInt { re: 0, im: 0 };
    pub const ONE: GaussInt = GaussInt { re: 1, im: 0 };

    pub const fn new(re: i64, im: i64) -> Self {
        GaussInt { re, im }
    }

    /// `j^k`.
    pub fn quarter_turn(k: u32) -> Self {
        match k % 4 {
            0 => GaussInt::new(1, 0),
            1 => GaussInt::new(0, 1),
            2 => GaussInt::new(-1, 0),
            _ => GaussInt::new(0, -1),
        }
    }

    pub fn conj(self) -> Self {
        GaussInt::new(self.re, -self.im)
    }

    pub fn norm_sqr(self) -> i64 {
        self.re * self.re + self.im * self.im
    }

    pub fn is_zero(self) -> bool {
        self.re == 0 && self.im == 0
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re as f64, self.im as f64)
    }
}

impl Add for GaussInt {
    type Output = GaussInt;
    fn add(self, rhs: GaussInt) -> GaussInt {
        GaussInt::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl AddAssign for GaussInt {
    fn add_assign(&mut self, rhs: GaussInt) {
        self.re += rhs.re;
        self.im += rhs.im;
    }
}

impl Sub for GaussInt {
    type Output = GaussInt;
    fn sub(self, rhs: GaussInt) -> GaussInt {
        GaussInt::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Neg for GaussInt {
    type Output = GaussInt;
    fn neg(self) -> GaussInt {
        GaussInt::new(-self.re, -self.im)
    }
}

impl Mul for GaussInt {
    type Output = GaussInt;
    fn mul(self, rhs: GaussInt) -> GaussInt {
        GaussInt::new(
            self.re * rhs.re - self.im * rhs.im,
            self.re * rhs.im + self.im * rhs.re,
        )
    }
}

/// Aperiodic autocorrelation at non-negative shifts `0..len`.
pub fn aacf_exact(x: &[GaussInt]) -> Vec<GaussInt> {
    let n = x.len();
    (0..n)
        .map(|k| {
            let mut acc = GaussInt::ZERO;
            for i in 0..n - k {
                acc += x[i] * x[i + k].conj();
            }
            acc
        })
        .collect()
}

/// Periodic autocorrelation at shifts `0..len`.
pub fn pacf_exact(x: &[GaussInt]) -> Vec<GaussInt> {
    let n = x.len();
    (0..n)
        .map(|k| {
            let mut acc = GaussInt::ZERO;
            for i in 0..n {
                acc += x[i] * x[(i + k) % n].conj();
            }
            acc
        })
        .collect()
}
