use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaussBranch {
    /// `ν ≠ 0`: diagonal solution, unique up to a global sign.
    Unique,
    /// `ν = 0`: `h_33 = h_13 = h_23 = 0` and any `h_11 h_22 − h_12² = μ`.
    Family,
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussN3Solution {
    pub branch: GaussBranch,
    /// Representative with positive sign for the unique branch.
    pub h: Option<[[f64; 3]; 3]>,
}

impl GaussN3Solution {
    /// A member of the `ν = 0` family: `h_22 = (μ + h_12²)/h_11`.
    pub fn family_member(mu: f64, h11: f64, h12: f64) -> Result<[[f64; 3]; 3]> {
        if h11 == 0.0 || !h11.is_finite() {
            return Err(Error::InvalidArgument(format!("h11 = {h11}")));
        }
        let h22 = (mu + h12 * h12) / h11;
        Ok([[h11, h12, 0.0], [h12, h22, 0.0], [0.0, 0.0, 0.0]])
    }
}

/// Residuals of
/// `h11h22 − h12² = μ, h11h33 − h13² = ν, h22h33 − h23² = ν,
///  h23h11 = h12h13, h13h11 = h12h23, h12h33 = h13h23`.
pub fn gauss_n3_residuals(mu: f64, nu: f64, h: &[[f64; 3]; 3]) -> [f64; 6] {
    let [h11, h12, h13] = h[0];
    let [_, h22, h23] = h[1];
    let h33 = h[2][2];
    [
        h11 * h22 - h12 * h12 - mu,
        h11 * h33 - h13 * h13 - nu,
        h22 * h33 - h23 * h23 - nu,
        h23 * h11 - h12 * h13,
        h13 * h11 - h12 * h23,
        h12 * h33 - h13 * h23,
    ]
}

/// Solves the Gauss system of a hypersurface in dimension 3 with
/// `μ = H + κ` on the horizontal plane and `ν = N + κ` on the planes
/// containing the line field.
pub fn solve_gauss_n3(mu: f64, nu: f64) -> Result<GaussN3Solution> {
    if !(mu > 0.0) {
        return Err(Error::InvalidMu(mu));
    }
    if !nu.is_finite() || !mu.is_finite() {
        return Ok(GaussN3Solution {
            branch: GaussBranch::None,
            h: None,
        });
    }
    if nu == 0.0 {
        let a = mu.sqrt();
        return Ok(GaussN3Solution {
            branch: GaussBranch::Family,
            h: Some([[a, 0.0, 0.0], [0.0, a, 0.0], [0.0, 0.0, 0.0]]),
        });
    }
    let a = mu.sqrt();
    Ok(GaussN3Solution {
        branch: GaussBranch::Unique,
        h: Some([[a, 0.0, 0.0], [0.0, a, 0.0], [0.0, 0.0, nu / a]]),
    })
}
