//! Square 2-D FFTs and zero-padded linear convolution of square arrays.

use num_complex::Complex;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Upper bound on the bytes a single convolution may allocate.
pub const DEFAULT_FFT_BUDGET_BYTES: u64 = 2 << 30;

fn transpose<T: Copy + Send + Sync>(data: &mut [T], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

/// In-place unnormalized 2-D DFT of an `n × n` row-major array.
/// The forward direction uses `e(−jk/n)`.
pub fn fft2<T: Real>(data: &mut [Complex<T>], n: usize, inverse: bool) {
    assert_eq!(data.len(), n * n);
    let mut planner = FftPlanner::<T>::new();
    let plan = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    for _ in 0..2 {
        data.par_chunks_mut(n).for_each(|row| plan.process(row));
        transpose(data, n);
    }
}

/// Side of the padded square for a linear convolution producing `out_side` samples per axis.
pub fn padded_side(out_side: usize) -> usize {
    out_side.next_power_of_two()
}

fn check_budget(side: usize, arrays: u64, element_bytes: u64) -> Result<()> {
    let required = (side as u64).pow(2) * element_bytes * arrays;
    if required > DEFAULT_FFT_BUDGET_BYTES {
        return Err(Error::Capacity {
            required_bytes: required,
            budget_bytes: DEFAULT_FFT_BUDGET_BYTES,
            hint: format!("padded FFT side {side} is too large; lower N"),
        });
    }
    Ok(())
}

fn embed<T: Real>(src: &[T], src_side: usize, side: usize) -> Vec<Complex<T>> {
    let mut buf = vec![Complex::new(T::zero(), T::zero()); side * side];
    for r in 0..src_side {
        for c in 0..src_side {
            buf[r * side + c] = Complex::new(src[r * src_side + c], T::zero());
        }
    }
    buf
}

fn extract<T: Real>(buf: &[Complex<T>], side: usize, out_side: usize) -> Vec<T> {
    let scale = T::one() / T::of((side * side) as f64);
    let mut out = vec![T::zero(); out_side * out_side];
    for r in 0..out_side {
        for c in 0..out_side {
            out[r * out_side + c] = buf[r * side + c].re * scale;
        }
    }
    out
}

/// Linear convolution of square arrays of sides `sa` and `sb`; the result has side `sa + sb − 1`.
pub fn convolve_square<T: Real>(a: &[T], sa: usize, b: &[T], sb: usize) -> Result<Vec<T>> {
    assert_eq!(a.len(), sa * sa);
    assert_eq!(b.len(), sb * sb);
    let out_side = sa + sb - 1;
    let side = padded_side(out_side);
    check_budget(side, 2, 2 * std::mem::size_of::<T>() as u64)?;
    let mut fa = embed(a, sa, side);
    let mut fb = embed(b, sb, side);
    fft2(&mut fa, side, false);
    fft2(&mut fb, side, false);
    fa.par_iter_mut().zip(fb.par_iter()).for_each(|(x, y)| *x = *x * *y);
    drop(fb);
    fft2(&mut fa, side, true);
    Ok(extract(&fa, side, out_side))
}

/// The `k`-fold self-convolution of a square array of side `s`; the result has side `k(s − 1) + 1`.
pub fn convolve_power<T: Real>(a: &[T], s: usize, k: u32) -> Result<Vec<T>> {
    assert_eq!(a.len(), s * s);
    if k == 0 {
        return Err(Error::InvalidParameter("convolution power must be positive".into()));
    }
    let out_side = k as usize * (s - 1) + 1;
    let side = padded_side(out_side);
    check_budget(side, 1, 2 * std::mem::size_of::<T>() as u64)?;
    let mut fa = embed(a, s, side);
    fft2(&mut fa, side, false);
    fa.par_iter_mut().for_each(|x| *x = x.powu(k));
    fft2(&mut fa, side, true);
    Ok(extract(&fa, side, out_side))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn direct(a: &[f64], sa: usize, b: &[f64], sb: usize) -> Vec<f64> {
        let so = sa + sb - 1;
        let mut out = vec![0.0; so * so];
        for i in 0..sa {
            for j in 0..sa {
                for k in 0..sb {
                    for l in 0..sb {
                        out[(i + k) * so + j + l] += a[i * sa + j] * b[k * sb + l];
                    }
                }
            }
        }
        out
    }

    #[test]
    fn matches_direct_summation() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..32 {
            let sa = rng.gen_range(1..9);
            let sb = rng.gen_range(1..9);
            let a: Vec<f64> = (0..sa * sa).map(|_| rng.gen_range(0.0..1.0)).collect();
            let b: Vec<f64> = (0..sb * sb).map(|_| rng.gen_range(0.0..1.0)).collect();
            let want = direct(&a, sa, &b, sb);
            let got = convolve_square(&a, sa, &b, sb).unwrap();
            let scale = want.iter().cloned().fold(0.0, f64::max);
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() <= 1e-9 * scale);
            }
        }
    }

    #[test]
    fn power_matches_repeated_convolution() {
        let a: Vec<f64> = (0..25).map(|i| (i % 3) as f64).collect();
        let twice = convolve_square(&a, 5, &a, 5).unwrap();
        let thrice = convolve_square(&twice, 9, &a, 5).unwrap();
        let p = convolve_power(&a, 5, 3).unwrap();
        for (x, y) in p.iter().zip(&thrice) {
            assert!((x - y).abs() < 1e-9);
        }
        assert!(convolve_power(&a, 5, 0).is_err());
    }

    #[test]
    fn square_indicator_gives_pyramid() {
        let s = 4;
        let ones = vec![1.0f32; s * s];
        let out = convolve_square(&ones, s, &ones, s).unwrap();
        let so = 2 * s - 1;
        for i in 0..so {
            for j in 0..so {
                let tent = |t: usize| (s - (t as i64 - (s as i64 - 1)).unsigned_abs() as usize) as f32;
                assert!((out[i * so + j] - tent(i) * tent(j)).abs() < 1e-4);
            }
        }
    }
}
