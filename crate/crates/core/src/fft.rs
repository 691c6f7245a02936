//! Discrete Fourier transforms for spectral packet construction.
//!
//! Power-of-two lengths go through an iterative radix-2 FFT; any other
//! length falls back to a table-driven direct transform (O(n²), used only
//! at initialization).

use alloc::vec::Vec;
use core::f64::consts::TAU;
use num_complex::Complex64;
// Float methods come from num_traits under no_std (libm); std shadows them.
#[allow(unused_imports)]
use num_traits::Float;

/// Angular wavenumber of each DFT bin in standard order: non-negative
/// frequencies first, then negative.
pub fn fourier_modes(n: usize, dx: f64) -> Vec<f64> {
    let dk = TAU / (n as f64 * dx);
    (0..n)
        .map(|j| {
            if j <= n / 2 {
                j as f64 * dk
            } else {
                (j as f64 - n as f64) * dk
            }
        })
        .collect()
}

/// Forward transform: `F_j = Σ_k f_k e^{-2πi jk/n}`.
pub fn dft_forward(input: &[Complex64]) -> Vec<Complex64> {
    transform(input, -1.0)
}

/// Inverse transform, normalized so `dft_inverse(dft_forward(f)) = f`.
pub fn dft_inverse(input: &[Complex64]) -> Vec<Complex64> {
    let n = input.len();
    let mut out = transform(input, 1.0);
    let scale = 1.0 / n as f64;
    for z in &mut out {
        *z *= scale;
    }
    out
}

fn transform(input: &[Complex64], sign: f64) -> Vec<Complex64> {
    let n = input.len();
    if n.is_power_of_two() && n > 1 {
        let mut buf = input.to_vec();
        fft_radix2(&mut buf, sign);
        buf
    } else {
        direct(input, sign)
    }
}

fn fft_radix2(buf: &mut [Complex64], sign: f64) {
    let n = buf.len();
    // Bit-reversal permutation.
    let mut j = 0usize;
    for i in 0..n {
        if i < j {
            buf.swap(i, j);
        }
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
    }
    // Butterflies, twiddles from a precomputed half table.
    let half = n / 2;
    let table: Vec<Complex64> = (0..half)
        .map(|k| Complex64::from_polar(1.0, sign * TAU * k as f64 / n as f64))
        .collect();
    let mut len = 2;
    while len <= n {
        let stride = n / len;
        let half_len = len / 2;
        let mut start = 0;
        while start < n {
            for k in 0..half_len {
                let w = table[k * stride];
                let a = buf[start + k];
                let b = buf[start + k + half_len] * w;
                buf[start + k] = a + b;
                buf[start + k + half_len] = a - b;
            }
            start += len;
        }
        len <<= 1;
    }
}

fn direct(input: &[Complex64], sign: f64) -> Vec<Complex64> {
    let n = input.len();
    let roots: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(1.0, sign * TAU * k as f64 / n as f64))
        .collect();
    (0..n)
        .map(|j| {
            let mut acc = Complex64::default();
            for (k, f) in input.iter().enumerate() {
                acc += f * roots[(j * k) % n];
            }
            acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_ish(n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|k| {
                let x = k as f64;
                Complex64::new((1.3 * x).sin() + 0.2, (0.7 * x).cos() - 0.4)
            })
            .collect()
    }

    #[test]
    fn roundtrip_pow2() {
        let f = random_ish(64);
        let back = dft_inverse(&dft_forward(&f));
        for (a, b) in f.iter().zip(&back) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn fft_matches_direct_transform() {
        let f = random_ish(16);
        let fast = dft_forward(&f);
        let slow = direct(&f, -1.0);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn non_pow2_roundtrip() {
        let f = random_ish(12);
        let back = dft_inverse(&dft_forward(&f));
        for (a, b) in f.iter().zip(&back) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn plane_wave_is_a_single_bin() {
        let n = 32;
        let j0 = 5;
        let f: Vec<Complex64> = (0..n)
            .map(|k| Complex64::from_polar(1.0, TAU * (j0 * k) as f64 / n as f64))
            .collect();
        let spec = dft_forward(&f);
        for (j, z) in spec.iter().enumerate() {
            if j == j0 {
                assert!((z - Complex64::new(n as f64, 0.0)).norm() < 1e-9);
            } else {
                assert!(z.norm() < 1e-9, "bin {j} leaked {z}");
            }
        }
    }

    #[test]
    fn mode_frequencies() {
        let modes = fourier_modes(8, 0.5);
        let dk = TAU / 4.0;
        assert_eq!(modes[0], 0.0);
        assert!((modes[1] - dk).abs() < 1e-15);
        assert!((modes[4] - 4.0 * dk).abs() < 1e-15);
        assert!((modes[5] + 3.0 * dk).abs() < 1e-15);
        assert!((modes[7] + dk).abs() < 1e-15);
    }
}
