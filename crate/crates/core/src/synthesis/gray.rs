//! Gray-code CNOT placement and the matching Walsh–Hadamard angle transform.
//!
//! A uniformly controlled `RZ` over `n` controls is realized as `2^n`
//! rotations on the target, each followed by a CNOT. After `i` CNOTs the
//! target carries `t ⊕ χ_{g(i)}(c)` where `g(i) = i ^ (i >> 1)` is the i-th
//! Gray code, so rotation `i` acts on that parity. [`walsh_angles`] turns
//! per-control-value angles into the per-step angles of that walk.

use crate::error::{Error, Result};

pub const MAX_GRAY_BITS: usize = 20;

/// The i-th reflected binary Gray code.
pub fn gray_code(i: usize) -> usize {
    i ^ (i >> 1)
}

/// Index of the bit that flips between consecutive Gray codes, wrapping
/// from the last code back to zero.
///
/// ```
/// use vqreg::synthesis::gray_sequence;
/// assert_eq!(gray_sequence(3).unwrap(), vec![0, 1, 0, 2, 0, 1, 0, 2]);
/// ```
pub fn gray_sequence(n: usize) -> Result<Vec<usize>> {
    if n == 0 {
        return Err(Error::invalid("gray sequence needs at least one bit"));
    }
    if n > MAX_GRAY_BITS {
        return Err(Error::Capacity { what: "gray bits", got: n, limit: MAX_GRAY_BITS });
    }
    let len = 1usize << n;
    Ok((0..len)
        .map(|i| if i + 1 < len { (i + 1).trailing_zeros() as usize } else { n - 1 })
        .collect())
}

/// Per-step rotation angles for the Gray walk:
/// `θ_i = 2^{-n} Σ_j (−1)^{popcount(g(i) & j)} α_j`.
///
/// The sum runs in ascending `j` and each term is scaled before it is added,
/// which matches the accumulation order of phase folding over a naive
/// construction; the two paths produce bit-identical angles.
pub fn walsh_angles(alphas: &[f64]) -> Result<Vec<f64>> {
    let len = alphas.len();
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::invalid(format!("walsh transform needs a power-of-two length, got {len}")));
    }
    let scale = len as f64;
    Ok((0..len)
        .map(|i| {
            let g = gray_code(i);
            alphas.iter().enumerate().fold(0.0, |acc, (j, a)| {
                let sign = if (g & j).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                acc + sign * (a / scale)
            })
        })
        .collect())
}
