use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

/// Real scalar type behind the numerical kernels (`f32` or `f64`).
pub trait Real: Float + FloatConst + FromPrimitive + Default + Debug + Display + Send + Sync + 'static {
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }
}

impl<T> Real for T where T: Float + FloatConst + FromPrimitive + Default + Debug + Display + Send + Sync + 'static {}

/// `exp(2πi·k/n)`.
pub fn root_of_unity<T: Real>(n: usize, k: i64) -> Complex<T> {
    let k = k.rem_euclid(n as i64);
    // exact values on the axes
    if (4 * k) % n as i64 == 0 {
        return match 4 * k / n as i64 {
            0 => Complex::new(T::one(), T::zero()),
            1 => Complex::new(T::zero(), T::one()),
            2 => Complex::new(-T::one(), T::zero()),
            _ => Complex::new(T::zero(), -T::one()),
        };
    }
    let angle = T::lit(2.0) * T::PI() * T::lit(k as f64) / T::lit(n as f64);
    Complex::new(angle.cos(), angle.sin())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots() {
        let w: Complex<f64> = root_of_unity(3, 1);
        assert!(((w * w * w) - Complex::new(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(root_of_unity::<f64>(2, 1), Complex::new(-1.0, 0.0));
        assert_eq!(root_of_unity::<f32>(4, -1), Complex::new(0.0, -1.0));
        assert_eq!(root_of_unity::<f64>(8, 8), Complex::new(1.0, 0.0));
    }
}
