//! The polar transform `x = u·G_N` over GF(2).

use crate::error::{Error, Result};

/// In-place butterfly computing `u·G_2^{⊗m}`; the map is an involution.
pub fn polar_transform_in_place(x: &mut [u8]) -> Result<()> {
    let n = x.len();
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::Domain(format!("length {n} is not a power of two")));
    }
    let mut s = 1;
    while s < n {
        for block in x.chunks_exact_mut(2 * s) {
            let (lo, hi) = block.split_at_mut(s);
            for (a, b) in lo.iter_mut().zip(hi.iter()) {
                *a ^= *b;
            }
        }
        s *= 2;
    }
    Ok(())
}

pub fn polar_transform(u: &[u8]) -> Result<Vec<u8>> {
    let mut x = u.to_vec();
    polar_transform_in_place(&mut x)?;
    Ok(x)
}
