//! Band-limited evaluation of a periodic trigonometric interpolant on a stretched copy of
//! its own grid, via the chirp-z transform.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

/// Given samples `v_j = v(x_j)` on `x_j = -L + j·2L/M`, returns `v(a·x_j)` for the
/// trigonometric interpolant of degree `M/2` (Nyquist term symmetrized). Points with
/// `|a·x_j| > L` evaluate to zero, treating `v` as supported in the box.
pub(crate) fn stretch_line(line: &[Complex64], a: f64, planner: &mut FftPlanner<f64>) -> Vec<Complex64> {
    let m = line.len();
    let half = m / 2;

    // interpolation coefficients ĉ_k, k ∈ [-M/2, M/2) stored at k + M/2
    let mut coef = line.to_vec();
    planner.plan_fft_forward(m).process(&mut coef);
    let inv_m = 1.0 / m as f64;
    let mut centred = vec![Complex64::new(0.0, 0.0); m];
    for (q, c) in coef.iter().enumerate() {
        let k = if q < half { q as i64 } else { q as i64 - m as i64 };
        centred[(k + half as i64) as usize] = c * inv_m;
    }
    let nyquist = centred[0];
    centred[0] = Complex64::new(0.0, 0.0);

    // v(a x_j) = Σ_k ĉ_k e^{iπk(1-a)} e^{2πi (a/M) j k}
    let rate = a / m as f64;
    let b: Vec<Complex64> = centred
        .iter()
        .enumerate()
        .map(|(kp, c)| {
            let k = kp as f64 - half as f64;
            c * cis(PI * k * (1.0 - a))
        })
        .collect();

    // Bluestein: Σ_{k'} B_{k'} e^{2πi r j k'} = e^{πi r j²} Σ_{k'} (B_{k'} e^{πi r k'²}) e^{-πi r (j-k')²}
    let p = (2 * m).next_power_of_two();
    let mut f = vec![Complex64::new(0.0, 0.0); p];
    for (kp, bk) in b.iter().enumerate() {
        f[kp] = bk * chirp(rate, kp as f64);
    }
    let mut g = vec![Complex64::new(0.0, 0.0); p];
    for n in 0..m {
        let w = chirp(rate, n as f64).conj();
        g[n] = w;
        if n > 0 {
            g[p - n] = w;
        }
    }
    let fwd = planner.plan_fft_forward(p);
    let inv = planner.plan_fft_inverse(p);
    fwd.process(&mut f);
    fwd.process(&mut g);
    for (x, y) in f.iter_mut().zip(&g) {
        *x *= y;
    }
    inv.process(&mut f);
    let inv_p = 1.0 / p as f64;

    let l_frac = |j: usize| -1.0 + 2.0 * j as f64 / m as f64; // x_j / L
    (0..m)
        .map(|j| {
            let y = a * l_frac(j);
            if y.abs() > 1.0 + 1e-12 {
                return Complex64::new(0.0, 0.0);
            }
            let jf = j as f64;
            // shift k' = k + M/2 back: e^{2πi r j k} = e^{2πi r j k'} e^{-πi r j M}
            let main = f[j] * inv_p * chirp(rate, jf) * cis(-PI * rate * jf * m as f64);
            let nyq = nyquist * (PI * half as f64 * (y + 1.0)).cos();
            main + nyq
        })
        .collect()
}

fn cis(theta: f64) -> Complex64 {
    Complex64::new(theta.cos(), theta.sin())
}

/// `e^{πi r n²}` with the phase reduced before the trig call.
fn chirp(rate: f64, n: f64) -> Complex64 {
    let t = (rate * n * n).rem_euclid(2.0);
    cis(PI * t)
}
