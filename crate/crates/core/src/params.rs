//! Operator parameters.

use crate::error::{Error, Result};

/// Lower bound on the integrability exponent `p`. Below this the signed
/// power and its derivative are numerically degenerate.
pub const P_MIN: f64 = 1.01;
/// Upper bound on `p`, for the same reason.
pub const P_MAX: f64 = 50.0;

/// The parameter triple `(s, p, N)` of the operator, with the kernel
/// normalization fixed to one.
///
/// Every kernel evaluation in the crate uses the exponent `N + s*p` and the
/// signed power `t -> |t|^{p-2} t`; this type is the single source for both.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracParams {
    s: f64,
    p: f64,
    dim: usize,
    norm_const: f64,
}

impl FracParams {
    /// Validates `0 < s < 1`, `1.01 < p < 50`, `dim ∈ {1, 2}`.
    pub fn new(s: f64, p: f64, dim: usize) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) || !s.is_finite() {
            return Err(Error::InvalidParams(format!("s out of range (0, 1): {s}")));
        }
        if !(p > P_MIN && p < P_MAX) || !p.is_finite() {
            return Err(Error::InvalidParams(format!(
                "p out of range ({P_MIN}, {P_MAX}): {p}"
            )));
        }
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidParams(format!("dim must be 1 or 2: {dim}")));
        }
        Ok(Self {
            s,
            p,
            dim,
            norm_const: 1.0,
        })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Kernel normalization; fixed to one.
    pub fn norm_const(&self) -> f64 {
        self.norm_const
    }

    /// The kernel exponent `N + s*p`: the kernel is `|x - y|^{-(N + s*p)}`.
    pub fn kernel_exponent(&self) -> f64 {
        self.dim as f64 + self.s * self.p
    }

    /// `s * p`, the order of the operator in the scaling sense.
    pub fn sp(&self) -> f64 {
        self.s * self.p
    }

    /// Same parameters with `p = 2` (used for warm starts).
    pub fn with_p2(&self) -> Self {
        Self {
            s: self.s,
            p: 2.0,
            dim: self.dim,
            norm_const: self.norm_const,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_typical_parameters() {
        let prm = FracParams::new(0.5, 2.0, 1).unwrap();
        assert_eq!(prm.kernel_exponent(), 2.0);
        assert_eq!(prm.norm_const(), 1.0);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(FracParams::new(0.0, 2.0, 1).is_err());
        assert!(FracParams::new(1.0, 2.0, 1).is_err());
        assert!(FracParams::new(0.5, 1.005, 1).is_err());
        assert!(FracParams::new(0.5, 50.0, 1).is_err());
        assert!(FracParams::new(0.5, 0.5, 1).is_err());
        assert!(FracParams::new(0.5, 2.0, 3).is_err());
        assert!(FracParams::new(f64::NAN, 2.0, 2).is_err());
    }
}
