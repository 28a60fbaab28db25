//! Piecewise-linear approximation of quadratic ohmic losses `r f^2`.
//!
//! Each segment's line is the least-squares fit of `r f^2` over the segment;
//! the LP bounds losses from below by every segment line, so the active value
//! is the maximum over segments. The fit may sit above the quadratic near a
//! segment's center, so losses can be slightly under-estimated there.

use crate::error::{Error, Result};

pub const DEFAULT_SEGMENTS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossSegment {
    /// Slope, pu loss per pu flow.
    pub alpha: f64,
    /// Intercept, pu.
    pub beta: f64,
    pub lo: f64,
    pub hi: f64,
}

impl LossSegment {
    pub fn value(&self, f: f64) -> f64 {
        self.alpha * f + self.beta
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossEnvelope {
    /// Flow limit `F` in pu; breakpoints span `[-F, F]`.
    pub limit: f64,
    pub segments: Vec<LossSegment>,
}

impl LossEnvelope {
    pub fn segment_count(&self) -> usize {
        self.segments.len()
    }

    /// Envelope with every segment zero, used for lossless lines.
    pub fn zero(limit: f64) -> Self {
        LossEnvelope {
            limit,
            segments: vec![LossSegment {
                alpha: 0.0,
                beta: 0.0,
                lo: -limit,
                hi: limit,
            }],
        }
    }
}

/// Closed-form least-squares line through `r f^2` on `[a, b]`.
pub fn closed_form_segment(r: f64, a: f64, b: f64) -> (f64, f64) {
    (r * (a + b), -r * (a * a + 4.0 * a * b + b * b) / 6.0)
}

/// Solves the 2x2 normal equations of `min int_a^b (r f^2 - alpha f - beta)^2 df`.
///
/// The integral is taken in the shifted variable `u = f - (a + b) / 2` so the
/// moment matrix stays well conditioned for intervals far from the origin.
pub fn fit_segment(r: f64, a: f64, b: f64) -> Result<(f64, f64)> {
    if !(b > a) {
        return Err(Error::DegenerateSegment { a, b });
    }
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    // moments of u^k over [-h, h]
    let moment = |k: i32| -> f64 {
        if k % 2 == 1 {
            0.0
        } else {
            2.0 * h.powi(k + 1) / (k + 1) as f64
        }
    };
    let (m0, m1, m2, m3) = (moment(0), moment(1), moment(2), moment(3));
    // right-hand sides: int r (u + c)^2 u^k du
    let rhs_u = r * (m3 + 2.0 * c * m2 + c * c * m1);
    let rhs_1 = r * (m2 + 2.0 * c * m1 + c * c * m0);
    // [m2 m1; m1 m0] [alpha; beta_u] = [rhs_u; rhs_1]
    let det = m2 * m0 - m1 * m1;
    if det.abs() <= f64::MIN_POSITIVE {
        return Err(Error::DegenerateSegment { a, b });
    }
    let alpha = (rhs_u * m0 - m1 * rhs_1) / det;
    let beta_u = (m2 * rhs_1 - m1 * rhs_u) / det;
    Ok((alpha, beta_u - alpha * c))
}

/// Equal-width breakpoints over `[-limit, limit]`.
pub fn uniform_breakpoints(limit: f64, segments: usize) -> Vec<f64> {
    (0..=segments)
        .map(|k| {
            if k == segments {
                limit
            } else {
                -limit + 2.0 * limit * k as f64 / segments as f64
            }
        })
        .collect()
}

/// Fits the loss envelope of a line with resistance `r_pu` and flow limit
/// `limit_pu`.
///
/// Without explicit `breakpoints` the range is split into `segments` equal
/// pieces. Explicit breakpoints must start at `-limit_pu`, end at `limit_pu`
/// and hold `segments + 1` values.
pub fn fit_segments(
    r_pu: f64,
    limit_pu: f64,
    segments: usize,
    breakpoints: Option<&[f64]>,
) -> Result<LossEnvelope> {
    if !(r_pu >= 0.0) {
        return Err(Error::Domain(format!("resistance must be >= 0, got {r_pu}")));
    }
    if !(limit_pu > 0.0) {
        return Err(Error::Domain(format!("flow limit must be > 0, got {limit_pu}")));
    }
    if segments == 0 {
        return Err(Error::Domain("at least one loss segment is required".into()));
    }
    let points = match breakpoints {
        Some(bp) => {
            if bp.len() != segments + 1 {
                return Err(Error::Domain(format!(
                    "expected {} breakpoints, got {}",
                    segments + 1,
                    bp.len()
                )));
            }
            let tol = 1e-12 * limit_pu.max(1.0);
            if (bp[0] + limit_pu).abs() > tol || (bp[segments] - limit_pu).abs() > tol {
                return Err(Error::Domain("breakpoints must span [-F, F]".into()));
            }
            bp.to_vec()
        }
        None => uniform_breakpoints(limit_pu, segments),
    };
    let segments = points
        .windows(2)
        .map(|w| {
            let (alpha, beta) = fit_segment(r_pu, w[0], w[1])?;
            Ok(LossSegment {
                alpha,
                beta,
                lo: w[0],
                hi: w[1],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LossEnvelope {
        limit: limit_pu,
        segments,
    })
}

/// Loss value the LP enforces at flow `f`: the maximum over segment lines.
pub fn envelope_value(env: &LossEnvelope, f: f64) -> Result<f64> {
    if !(f.abs() <= env.limit * (1.0 + 1e-12)) {
        return Err(Error::OutOfRange {
            value: f,
            limit: env.limit,
        });
    }
    Ok(env
        .segments
        .iter()
        .map(|s| s.value(f))
        .fold(f64::NEG_INFINITY, f64::max))
}
