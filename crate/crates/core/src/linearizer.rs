//! Lifting of the four-link closure equation to a linear equation.
//!
//! For one frame with squared projected lengths `(A, B, C, D)`, the closure
//! condition `sqrt(a-A) +- sqrt(b-B) +- sqrt(c-C) +- sqrt(d-D) = 0` squared
//! out three times becomes a quartic polynomial in `(a, b, c, d)`. Grouping
//! its monomials gives
//!
//! ```text
//! f1 x1 + f2 x2 + ... + f19 x19 + f0 = 0
//! ```
//!
//! where the 19 lifted unknowns `x` depend only on the shape and the 20
//! coefficients `f` only on the frame.
//!
//! Note that `f5 + f6 + ... + f14` vanishes identically, so the lifted
//! system always has the null direction `e5 + ... + e14`: the quadratic
//! lifted unknowns are determined only up to a common shift.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sum::{cdot, csum};

/// Number of lifted unknowns of the four-link loop.
pub const LIFTED_LEN: usize = 19;

/// The 19 lifted unknowns `x1..x19`, stored zero-based.
///
/// | index | value |
/// |-------|-------|
/// | x1..x4 | a, b, c, d |
/// | x5..x8 | a^2, b^2, c^2, d^2 |
/// | x9..x14 | ab, ac, ad, bc, bd, cd |
/// | x15..x18 | cubic forms multiplying A, B, C, D |
/// | x19 | quartic form (the constant term) |
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LiftedVector(pub [f64; LIFTED_LEN]);

impl LiftedVector {
    /// Evaluate every lifted polynomial at `(a, b, c, d)` without validation.
    pub fn evaluate(sq: [f64; 4]) -> Self {
        let [a, b, c, d] = sq;
        Self([
            a,
            b,
            c,
            d,
            a * a,
            b * b,
            c * c,
            d * d,
            a * b,
            a * c,
            a * d,
            b * c,
            b * d,
            c * d,
            cubic_15(a, b, c, d),
            cubic_16(a, b, c, d),
            cubic_17(a, b, c, d),
            cubic_18(a, b, c, d),
            quartic_19(a, b, c, d),
        ])
    }

    /// One-based accessor matching the `x1..x19` numbering.
    pub fn x(&self, k: usize) -> f64 {
        self.0[k - 1]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Lift a four-link shape given as squared lengths `(a, b, c, d)`.
pub fn lift_shape(sq: [f64; 4]) -> Result<LiftedVector> {
    if sq.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::NonPositiveShape);
    }
    Ok(LiftedVector::evaluate(sq))
}

/// Frame coefficients `f0..f19`, stored at indices `0..=19`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CoefficientRow(pub [f64; LIFTED_LEN + 1]);

impl CoefficientRow {
    /// `f0`, the free term.
    pub fn constant(&self) -> f64 {
        self.0[0]
    }

    /// `f1..f19`, the factors of `x1..x19`.
    pub fn factors(&self) -> &[f64] {
        &self.0[1..]
    }

    pub fn f(&self, k: usize) -> f64 {
        self.0[k]
    }

    /// `f0 + sum f_k x_k`, compensated.
    pub fn evaluate(&self, x: &LiftedVector) -> f64 {
        let mut lhs = [0.0; LIFTED_LEN + 1];
        let mut rhs = [1.0; LIFTED_LEN + 1];
        lhs.copy_from_slice(&self.0);
        rhs[1..].copy_from_slice(&x.0);
        cdot(&lhs, &rhs)
    }
}

/// Coefficients of the lifted equation for one frame's `(A, B, C, D)`.
pub fn coefficient_row(obs: [f64; 4]) -> CoefficientRow {
    debug_assert!(obs.iter().all(|v| v.is_finite()));
    let [a, b, c, d] = obs;
    let (a2, b2, c2, d2) = (a * a, b * b, c * c, d * d);
    let (a3, b3, c3, d3) = (a2 * a, b2 * b, c2 * c, d2 * d);

    let f0 = csum(&[
        a2 * a2,
        b2 * b2,
        c2 * c2,
        d2 * d2,
        6.0 * a2 * b2,
        6.0 * a2 * c2,
        6.0 * a2 * d2,
        6.0 * b2 * c2,
        6.0 * b2 * d2,
        6.0 * c2 * d2,
        -40.0 * a * b * c * d,
        -4.0 * a3 * b,
        -4.0 * a3 * c,
        -4.0 * a3 * d,
        -4.0 * a * b3,
        -4.0 * b3 * c,
        -4.0 * b3 * d,
        -4.0 * a * c3,
        -4.0 * b * c3,
        -4.0 * c3 * d,
        -4.0 * a * d3,
        -4.0 * b * d3,
        -4.0 * c * d3,
        4.0 * a2 * b * c,
        4.0 * a2 * b * d,
        4.0 * a2 * c * d,
        4.0 * a * b2 * c,
        4.0 * a * b2 * d,
        4.0 * b2 * c * d,
        4.0 * a * b * c2,
        4.0 * a * c2 * d,
        4.0 * b * c2 * d,
        4.0 * a * b * d2,
        4.0 * a * c * d2,
        4.0 * b * c * d2,
    ]);

    let f1 = csum(&[
        -4.0 * a3,
        -12.0 * a * b2,
        -12.0 * a * c2,
        -12.0 * a * d2,
        40.0 * b * c * d,
        4.0 * b3,
        4.0 * c3,
        4.0 * d3,
        12.0 * a2 * d,
        12.0 * a2 * c,
        12.0 * a2 * b,
        -8.0 * a * b * c,
        -8.0 * a * b * d,
        -8.0 * a * c * d,
        -4.0 * b2 * c,
        -4.0 * c * d2,
        -4.0 * b * c2,
        -4.0 * c2 * d,
        -4.0 * b * d2,
        -4.0 * b2 * d,
    ]);

    let f2 = csum(&[
        -4.0 * b3,
        -12.0 * b * c2,
        -12.0 * b * d2,
        -12.0 * a2 * b,
        40.0 * a * c * d,
        4.0 * a3,
        4.0 * c3,
        4.0 * d3,
        12.0 * b2 * d,
        12.0 * b2 * c,
        12.0 * a * b2,
        -8.0 * a * b * c,
        -8.0 * a * b * d,
        -8.0 * b * c * d,
        -4.0 * a2 * c,
        -4.0 * a2 * d,
        -4.0 * a * c2,
        -4.0 * c2 * d,
        -4.0 * a * d2,
        -4.0 * c * d2,
    ]);

    let f3 = csum(&[
        -4.0 * c3,
        -12.0 * c * d2,
        -12.0 * a2 * c,
        -12.0 * b2 * c,
        40.0 * a * b * d,
        4.0 * a3,
        4.0 * b3,
        4.0 * d3,
        12.0 * c2 * d,
        12.0 * b * c2,
        12.0 * a * c2,
        -8.0 * a * b * c,
        -8.0 * a * c * d,
        -8.0 * b * c * d,
        -4.0 * a2 * b,
        -4.0 * a2 * d,
        -4.0 * a * b2,
        -4.0 * b2 * d,
        -4.0 * a * d2,
        -4.0 * b * d2,
    ]);

    let f4 = csum(&[
        -4.0 * d3,
        -12.0 * a2 * d,
        -12.0 * b2 * d,
        -12.0 * c2 * d,
        40.0 * a * b * c,
        4.0 * a3,
        4.0 * b3,
        4.0 * c3,
        12.0 * c * d2,
        12.0 * b * d2,
        12.0 * a * d2,
        -8.0 * a * b * d,
        -8.0 * a * c * d,
        -8.0 * b * c * d,
        -4.0 * a2 * b,
        -4.0 * a2 * c,
        -4.0 * a * b2,
        -4.0 * b2 * c,
        -4.0 * a * c2,
        -4.0 * b * c2,
    ]);

    let f5 = csum(&[
        6.0 * a2,
        6.0 * b2,
        6.0 * c2,
        6.0 * d2,
        -12.0 * a * b,
        -12.0 * a * c,
        -12.0 * a * d,
        4.0 * b * c,
        4.0 * b * d,
        4.0 * c * d,
    ]);
    let f6 = csum(&[
        6.0 * b2,
        6.0 * a2,
        6.0 * c2,
        6.0 * d2,
        -12.0 * a * b,
        -12.0 * b * c,
        -12.0 * b * d,
        4.0 * a * c,
        4.0 * a * d,
        4.0 * c * d,
    ]);
    let f7 = csum(&[
        6.0 * c2,
        6.0 * a2,
        6.0 * b2,
        6.0 * d2,
        -12.0 * a * c,
        -12.0 * b * c,
        -12.0 * c * d,
        4.0 * a * b,
        4.0 * a * d,
        4.0 * b * d,
    ]);
    let f8 = csum(&[
        6.0 * d2,
        6.0 * a2,
        6.0 * b2,
        6.0 * c2,
        -12.0 * a * d,
        -12.0 * b * d,
        -12.0 * c * d,
        4.0 * a * b,
        4.0 * a * c,
        4.0 * b * c,
    ]);

    let f9 = csum(&[
        24.0 * a * b,
        -40.0 * c * d,
        -12.0 * a2,
        -12.0 * b2,
        8.0 * a * c,
        8.0 * a * d,
        8.0 * b * c,
        8.0 * b * d,
        4.0 * c2,
        4.0 * d2,
    ]);
    let f10 = csum(&[
        24.0 * a * c,
        -40.0 * b * d,
        -12.0 * a2,
        -12.0 * c2,
        8.0 * a * b,
        8.0 * a * d,
        4.0 * b2,
        8.0 * b * c,
        8.0 * c * d,
        4.0 * d2,
    ]);
    let f11 = csum(&[
        24.0 * a * d,
        -40.0 * b * c,
        -12.0 * a2,
        -12.0 * d2,
        8.0 * a * b,
        8.0 * a * c,
        4.0 * b2,
        4.0 * c2,
        8.0 * b * d,
        8.0 * c * d,
    ]);
    let f12 = csum(&[
        24.0 * b * c,
        -40.0 * a * d,
        -12.0 * b2,
        -12.0 * c2,
        4.0 * a2,
        8.0 * a * b,
        8.0 * b * d,
        8.0 * a * c,
        8.0 * c * d,
        4.0 * d2,
    ]);
    let f13 = csum(&[
        24.0 * b * d,
        -40.0 * a * c,
        -12.0 * b2,
        -12.0 * d2,
        4.0 * a2,
        8.0 * a * b,
        8.0 * b * c,
        4.0 * c2,
        8.0 * a * d,
        8.0 * c * d,
    ]);
    let f14 = csum(&[
        24.0 * c * d,
        -40.0 * a * b,
        -12.0 * c2,
        -12.0 * d2,
        4.0 * a2,
        4.0 * b2,
        8.0 * a * c,
        8.0 * b * c,
        8.0 * a * d,
        8.0 * b * d,
    ]);

    CoefficientRow([
        f0, f1, f2, f3, f4, f5, f6, f7, f8, f9, f10, f11, f12, f13, f14, a, b, c, d, 1.0,
    ])
}

fn cubic_15(a: f64, b: f64, c: f64, d: f64) -> f64 {
    let (a2, b2, c2, d2) = (a * a, b * b, c * c, d * d);
    csum(&[
        -4.0 * a2 * a,
        -12.0 * a * b2,
        -12.0 * a * c2,
        -12.0 * a * d2,
        40.0 * b * c * d,
        4.0 * b2 * b,
        4.0 * c2 * c,
        4.0 * d2 * d,
        12.0 * a2 * b,
        12.0 * a2 * c,
        12.0 * a2 * d,
        -4.0 * b2 * c,
        -4.0 * b2 * d,
        -4.0 * b * c2,
        -4.0 * c2 * d,
        -4.0 * b * d2,
        -4.0 * c * d2,
        -8.0 * a * b * c,
        -8.0 * a * b * d,
        -8.0 * a * c * d,
    ])
}

fn cubic_16(a: f64, b: f64, c: f64, d: f64) -> f64 {
    let (a2, b2, c2, d2) = (a * a, b * b, c * c, d * d);
    csum(&[
        -4.0 * b2 * b,
        -12.0 * a2 * b,
        -12.0 * b * c2,
        -12.0 * b * d2,
        40.0 * a * c * d,
        4.0 * a2 * a,
        4.0 * c2 * c,
        4.0 * d2 * d,
        12.0 * a * b2,
        12.0 * b2 * c,
        12.0 * b2 * d,
        -4.0 * a2 * c,
        -4.0 * a2 * d,
        -4.0 * a * c2,
        -4.0 * c2 * d,
        -4.0 * a * d2,
        -4.0 * c * d2,
        -8.0 * a * b * c,
        -8.0 * a * b * d,
        -8.0 * b * c * d,
    ])
}

fn cubic_17(a: f64, b: f64, c: f64, d: f64) -> f64 {
    let (a2, b2, c2, d2) = (a * a, b * b, c * c, d * d);
    csum(&[
        -4.0 * c2 * c,
        -12.0 * a2 * c,
        -12.0 * b2 * c,
        -12.0 * c * d2,
        40.0 * a * b * d,
        4.0 * a2 * a,
        4.0 * b2 * b,
        4.0 * d2 * d,
        12.0 * a * c2,
        12.0 * b * c2,
        12.0 * c2 * d,
        -4.0 * a2 * b,
        -4.0 * a2 * d,
        -4.0 * a * b2,
        -4.0 * b2 * d,
        -4.0 * a * d2,
        -4.0 * b * d2,
        -8.0 * a * b * c,
        -8.0 * a * c * d,
        -8.0 * b * c * d,
    ])
}

fn cubic_18(a: f64, b: f64, c: f64, d: f64) -> f64 {
    let (a2, b2, c2, d2) = (a * a, b * b, c * c, d * d);
    csum(&[
        -4.0 * d2 * d,
        -12.0 * a2 * d,
        -12.0 * b2 * d,
        -12.0 * c2 * d,
        40.0 * a * b * c,
        4.0 * a2 * a,
        4.0 * b2 * b,
        4.0 * c2 * c,
        12.0 * a * d2,
        12.0 * b * d2,
        12.0 * c * d2,
        -4.0 * a2 * b,
        -4.0 * a2 * c,
        -4.0 * a * b2,
        -4.0 * b2 * c,
        -4.0 * a * c2,
        -4.0 * b * c2,
        -8.0 * a * b * d,
        -8.0 * a * c * d,
        -8.0 * b * c * d,
    ])
}

fn quartic_19(a: f64, b: f64, c: f64, d: f64) -> f64 {
    let (a2, b2, c2, d2) = (a * a, b * b, c * c, d * d);
    let (a3, b3, c3, d3) = (a2 * a, b2 * b, c2 * c, d2 * d);
    csum(&[
        a2 * a2,
        b2 * b2,
        c2 * c2,
        d2 * d2,
        6.0 * a2 * b2,
        6.0 * a2 * c2,
        6.0 * a2 * d2,
        6.0 * b2 * c2,
        6.0 * b2 * d2,
        6.0 * c2 * d2,
        -40.0 * a * b * c * d,
        -4.0 * a3 * b,
        -4.0 * a3 * c,
        -4.0 * a3 * d,
        -4.0 * a * b3,
        -4.0 * b3 * c,
        -4.0 * b3 * d,
        -4.0 * a * c3,
        -4.0 * b * c3,
        -4.0 * c3 * d,
        -4.0 * a * d3,
        -4.0 * b * d3,
        -4.0 * c * d3,
        4.0 * a2 * b * c,
        4.0 * a2 * b * d,
        4.0 * a2 * c * d,
        4.0 * a * b2 * c,
        4.0 * a * b2 * d,
        4.0 * b2 * c * d,
        4.0 * a * b * c2,
        4.0 * a * c2 * d,
        4.0 * b * c2 * d,
        4.0 * a * b * d2,
        4.0 * a * c * d2,
        4.0 * b * c * d2,
    ])
}

fn radicands<const N: usize>(shape: [f64; N], obs: [f64; N]) -> Result<[f64; N]> {
    let mut out = [0.0; N];
    for (k, (s, o)) in shape.iter().zip(&obs).enumerate() {
        let r = s - o;
        if r < 0.0 {
            return Err(Error::NegativeRadicand {
                link: k,
                sq_length: *s,
                sq_proj: *o,
            });
        }
        out[k] = r.sqrt();
    }
    Ok(out)
}

/// Product of `sqrt(a-A) +- sqrt(b-B) +- sqrt(c-C) +- sqrt(d-D)` over the
/// eight sign patterns with the first sign fixed.
///
/// This is the polynomial the repeated squaring produces, computed directly
/// from the radicals; it vanishes exactly when some sign pattern closes.
pub fn sign_product_oracle(shape: [f64; 4], obs: [f64; 4]) -> Result<f64> {
    let [p, q, r, s] = radicands(shape, obs)?;
    let mut prod = 1.0;
    for mask in 0..8u8 {
        let sq = if mask & 1 == 0 { q } else { -q };
        let sr = if mask & 2 == 0 { r } else { -r };
        let ss = if mask & 4 == 0 { s } else { -s };
        prod *= p + sq + sr + ss;
    }
    Ok(prod)
}

/// Lifted unknowns of a three-link loop: `(a, b, c, s)` with
/// `s = a^2 + b^2 + c^2 - 2ab - 2ac - 2bc`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Lifted3Vector(pub [f64; 4]);

impl Lifted3Vector {
    pub fn evaluate(sq: [f64; 3]) -> Self {
        let [a, b, c] = sq;
        Self([a, b, c, triangle_form(a, b, c)])
    }
}

/// `u^2 + v^2 + w^2 - 2uv - 2uw - 2vw`.
fn triangle_form(u: f64, v: f64, w: f64) -> f64 {
    csum(&[
        u * u,
        v * v,
        w * w,
        -2.0 * u * v,
        -2.0 * u * w,
        -2.0 * v * w,
    ])
}

pub fn lift3_shape(sq: [f64; 3]) -> Result<Lifted3Vector> {
    if sq.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::NonPositiveShape);
    }
    Ok(Lifted3Vector::evaluate(sq))
}

/// Coefficients `[g0, g_a, g_b, g_c, g_s]` of the three-link lifted equation
/// `g0 + g_a a + g_b b + g_c c + g_s s = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Coefficient3Row(pub [f64; 5]);

impl Coefficient3Row {
    pub fn constant(&self) -> f64 {
        self.0[0]
    }

    pub fn factors(&self) -> &[f64] {
        &self.0[1..]
    }

    pub fn evaluate(&self, x: &Lifted3Vector) -> f64 {
        cdot(&self.0, &[1.0, x.0[0], x.0[1], x.0[2], x.0[3]])
    }
}

/// Coefficients of the lifted three-link equation for one frame `(A, B, C)`.
///
/// With `u = a - A`, `v = b - B`, `w = c - C`, squaring
/// `sqrt(u) +- sqrt(v) +- sqrt(w) = 0` twice gives `(u + v - w)^2 = 4uv`,
/// i.e. `u^2 + v^2 + w^2 - 2uv - 2uw - 2vw = 0`. Expanding in `(a, b, c)`:
/// the quadratic part is `s`, the linear factors are `2(B + C - A)`,
/// `2(A + C - B)`, `2(A + B - C)`, and the free term is the same form in
/// `(A, B, C)`.
pub fn coefficient3_row(obs: [f64; 3]) -> Coefficient3Row {
    let [a, b, c] = obs;
    Coefficient3Row([
        triangle_form(a, b, c),
        2.0 * (b + c - a),
        2.0 * (a + c - b),
        2.0 * (a + b - c),
        1.0,
    ])
}

/// Product of `sqrt(a-A) +- sqrt(b-B) +- sqrt(c-C)` over the four sign
/// patterns with the first sign fixed.
pub fn sign_product3_oracle(shape: [f64; 3], obs: [f64; 3]) -> Result<f64> {
    let [p, q, r] = radicands(shape, obs)?;
    Ok((p + q + r) * (p + q - r) * (p - q + r) * (p - q - r))
}
