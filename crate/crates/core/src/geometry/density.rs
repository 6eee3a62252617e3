use num_complex::Complex64;
use rustfft::FftPlanner;

use super::field::{Mode, TransverseField};

/// Grid points per axis for the density quadrature.
fn grid_size(dim: usize) -> usize {
    match dim {
        0..=2 => 64,
        3..=4 => 32,
        _ => 16,
    }
}

fn wrap(k: i32, ng: usize) -> usize {
    k.rem_euclid(ng as i32) as usize
}

/// In-place multidimensional FFT over a row-major `ng^dim` array.
fn fft_nd(data: &mut [Complex64], ng: usize, dim: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse { planner.plan_fft_inverse(ng) } else { planner.plan_fft_forward(ng) };
    let mut line = vec![Complex64::new(0.0, 0.0); ng];
    for axis in 0..dim {
        let stride = ng.pow((dim - 1 - axis) as u32);
        let block = stride * ng;
        for start in (0..data.len()).step_by(block) {
            for offset in 0..stride {
                let base = start + offset;
                for (i, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + i * stride];
                }
                fft.process(&mut line);
                for (i, v) in line.iter().enumerate() {
                    data[base + i * stride] = *v;
                }
            }
        }
    }
}

/// Fourier coefficients of `ρ = e^f` by the trapezoid rule on a uniform grid.
///
/// Returns the coefficients with `|q|∞ ≤ radius` (clamped below Nyquist)
/// and the largest coefficient modulus on the Nyquist shell, which bounds
/// the quadrature error.
pub(crate) fn density_coefficients(
    log_density: &TransverseField<Complex64>,
    radius: i32,
) -> (TransverseField<Complex64>, f64) {
    let dim = log_density.dim();
    if log_density.is_empty() {
        return (TransverseField::constant(dim, radius, Complex64::new(1.0, 0.0)), 0.0);
    }
    let ng = grid_size(dim);
    let total = ng.pow(dim as u32);
    let flat = |k: &Mode| {
        k.components().iter().fold(0usize, |acc, &c| acc * ng + wrap(c, ng))
    };
    let mut grid = vec![Complex64::new(0.0, 0.0); total];
    for (k, v) in log_density.iter() {
        grid[flat(k)] += v;
    }
    // inverse FFT without normalization evaluates Σ_k f_k e^{2πi k·x} on the grid
    fft_nd(&mut grid, ng, dim, true);
    for z in grid.iter_mut() {
        *z = Complex64::new(z.re.exp(), 0.0);
    }
    fft_nd(&mut grid, ng, dim, false);
    let norm = 1.0 / total as f64;
    let half = (ng / 2) as i32;
    let keep = radius.min(half - 1);
    let mut out = TransverseField::new(dim, keep);
    for k in Mode::cube(dim, keep) {
        let v = grid[flat(&k)] * norm;
        if v.norm() > 1e-18 {
            out.insert(k, v).expect("inside cutoff");
        }
    }
    let nyquist = Mode::cube(dim, half)
        .into_iter()
        .filter(|k| k.linf() == half)
        .map(|k| (grid[flat(&k)] * norm).norm())
        .fold(0.0, f64::max);
    (out, nyquist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn matches_bessel_series_for_cosine() {
        // e^{a cos 2πx} = I₀(a) + 2 Σ I_m(a) cos(2πmx)
        let a = 0.1;
        let f = TransverseField::from_modes(
            2,
            1,
            vec![
                (Mode::new(vec![1, 0]), Complex64::new(a / 2.0, 0.0)),
                (Mode::new(vec![-1, 0]), Complex64::new(a / 2.0, 0.0)),
            ],
        )
        .unwrap();
        let (rho, nyq) = density_coefficients(&f, 12);
        let i0: f64 = (0..20).map(|j| (a / 2.0f64).powi(2 * j) / fact(j).powi(2)).sum();
        let i1: f64 = (0..20).map(|j| (a / 2.0f64).powi(2 * j + 1) / (fact(j) * fact(j + 1))).sum();
        assert!((rho.zero_mode().unwrap().re - i0).abs() < 1e-15);
        assert!((rho.get(&Mode::new(vec![1, 0])).unwrap().re - i1).abs() < 1e-15);
        assert!(rho.get(&Mode::new(vec![0, 1])).is_none());
        assert!(nyq < 1e-15);
        let x = [0.3, 0.9];
        let want = (a * (2.0 * PI * x[0]).cos()).exp();
        let got = rho.evaluate(&x).unwrap();
        assert!((got.re - want).abs() < 1e-14, "{got} {want}");
    }

    fn fact(n: i32) -> f64 {
        (1..=n).map(|i| i as f64).product()
    }
}
