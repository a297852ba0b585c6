//! Statevector construction of the mean-estimation state
//! `(1/sqrt N) sum_i |i>|x_i>(sqrt(x_i)|1> + sqrt(1 - x_i)|0>)`.
//!
//! Basis ordering is `index | value register (b qubits) | flag`, flag as the
//! least significant qubit. Amplitudes stay real throughout.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};

pub const MAX_STATEVECTOR_SIZE: usize = 1 << 12;
pub const MAX_STATEVECTOR_BITS: u32 = 10;

/// Rounds `x` to the `b`-bit grid `{0, 1/(2^b - 1), ..., 1}`; the rounding
/// error is at most `1/(2 (2^b - 1)) <= 2^-b`.
pub fn discretize(x: f64, bits: u32) -> u64 {
    let top = (1u64 << bits) - 1;
    (x.clamp(0.0, 1.0) * top as f64).round() as u64
}

fn hadamard(state: &mut [f64], stride: usize) {
    let block = stride * 2;
    for chunk in state.chunks_mut(block) {
        let (lo, hi) = chunk.split_at_mut(stride);
        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
            let (x, y) = (*a, *b);
            *a = (x + y) * FRAC_1_SQRT_2;
            *b = (x - y) * FRAC_1_SQRT_2;
        }
    }
}

/// Builds the state gate by gate and returns the probability of flag `1`.
pub fn statevector_crosscheck(values: &[f64], bits: u32) -> Result<f64> {
    let n = values.len();
    if n == 0 || !n.is_power_of_two() || n > MAX_STATEVECTOR_SIZE {
        return Err(Error::SizeLimit {
            reason: format!("N = {n} must be a power of two no larger than {MAX_STATEVECTOR_SIZE}"),
        });
    }
    if bits == 0 || bits > MAX_STATEVECTOR_BITS {
        return Err(Error::SizeLimit {
            reason: format!("b = {bits} must lie in 1..={MAX_STATEVECTOR_BITS}"),
        });
    }
    if let Some((index, &value)) = values.iter().enumerate().find(|(_, x)| !(0.0..=1.0).contains(*x)) {
        return Err(Error::InvalidMeasure { index, value });
    }
    let levels = 1usize << bits;
    let top = (levels - 1) as f64;
    let index_stride = levels * 2;
    let mut state = vec![0.0; n * index_stride];
    state[0] = 1.0;

    // Uniform superposition on the index register.
    let mut stride = index_stride;
    while stride < state.len() {
        hadamard(&mut state, stride);
        stride *= 2;
    }

    // O_x: |i, v, f> -> |i, v xor x_i, f>
    for (i, &x) in values.iter().enumerate() {
        let shift = discretize(x, bits) as usize;
        if shift == 0 {
            continue;
        }
        let block = &mut state[i * index_stride..(i + 1) * index_stride];
        let old = block.to_vec();
        for v in 0..levels {
            for f in 0..2 {
                block[((v ^ shift) << 1) | f] = old[(v << 1) | f];
            }
        }
    }

    // U_CR: |v>|0> -> |v>(sqrt(v/top)|1> + sqrt(1 - v/top)|0>)
    for (k, pair) in state.chunks_mut(2).enumerate() {
        let v = (k % levels) as f64 / top;
        let (s, c) = (v.sqrt(), (1.0 - v).sqrt());
        let (a0, a1) = (pair[0], pair[1]);
        pair[0] = c * a0 - s * a1;
        pair[1] = s * a0 + c * a1;
    }

    Ok(state.iter().skip(1).step_by(2).map(|a| a * a).sum())
}
