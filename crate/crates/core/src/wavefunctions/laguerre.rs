//! Associated Laguerre polynomials L_n^b(x).

use crate::error::{Error, Result};

/// Largest degree for which the forward recurrence is used.
pub const MAX_LAGUERRE_DEGREE: usize = 50;

/// L_n^b(x) by the three-term recurrence
/// (k+1) L_{k+1} = (2k+1+b−x) L_k − (k+b) L_{k−1}.
pub fn laguerre(n: usize, b: f64, x: f64) -> Result<f64> {
    if !(b > -1.0) {
        return Err(Error::InvalidParameter(format!("Laguerre index b = {b} must exceed -1")));
    }
    if n > MAX_LAGUERRE_DEGREE {
        return Err(Error::InvalidParameter(format!(
            "Laguerre degree {n} exceeds {MAX_LAGUERRE_DEGREE}"
        )));
    }
    if !(x >= 0.0) {
        return Err(Error::InvalidParameter(format!("Laguerre argument {x} must be non-negative")));
    }
    if n == 0 {
        return Ok(1.0);
    }
    let mut prev = 1.0;
    let mut curr = 1.0 + b - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + b - x) * curr - (kf + b) * prev) / (kf + 1.0);
        prev = curr;
        curr = next;
    }
    Ok(curr)
}
