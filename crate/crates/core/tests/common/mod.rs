#![allow(dead_code)]

use gkp_qpc::{wrapped_pdf, NoiseParams, SQRT_PI};

/// Adaptive Simpson quadrature, independent of the library's image-sum CDFs.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    if b <= a {
        return 0.0;
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    recurse(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, 40)
}

/// Mass of the wrapped density on `lo <= |u| <= hi` by quadrature.
pub fn quadrature_band(sigma: f64, lo: f64, hi: f64) -> f64 {
    let noise = NoiseParams::new(sigma).unwrap();
    let f = move |u: f64| wrapped_pdf(u, noise).unwrap();
    2.0 * adaptive_simpson(&f, lo, hi, 1e-13)
}

/// Dual (Fourier) form of the wrapped density: the theta-function series.
pub fn theta_series_pdf(u: f64, sigma: f64) -> f64 {
    let mut total = 1.0;
    let mut m = 1.0f64;
    loop {
        let w = (-std::f64::consts::PI * sigma * sigma * m * m / 2.0).exp();
        if w < 1e-18 {
            break;
        }
        total += 2.0 * w * (SQRT_PI * m * u).cos();
        m += 1.0;
    }
    total / (2.0 * SQRT_PI)
}
