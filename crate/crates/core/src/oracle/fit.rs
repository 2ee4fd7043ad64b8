//! Rate extraction from ensemble-mean energy series.

/// Least-squares slope of `ln y` against `t`.
pub(crate) fn log_linear_slope(t: &[f64], y: &[f64]) -> f64 {
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    linear_slope(t, &ly)
}

fn linear_slope(t: &[f64], y: &[f64]) -> f64 {
    let n = t.len() as f64;
    let tm = t.iter().sum::<f64>() / n;
    let ym = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (ti, yi) in t.iter().zip(y) {
        sxy += (ti - tm) * (yi - ym);
        sxx += (ti - tm) * (ti - tm);
    }
    sxy / sxx
}

/// For fixed rate, the best `a + b exp(-rate t)` in closed form; returns
/// the residual sum of squares.
fn projected_residual(t: &[f64], y: &[f64], rate: f64) -> f64 {
    let basis: Vec<f64> = t.iter().map(|ti| (-rate * ti).exp()).collect();
    let n = t.len() as f64;
    let (sb, sbb) = basis
        .iter()
        .fold((0.0, 0.0), |(s, ss), b| (s + b, ss + b * b));
    let sy: f64 = y.iter().sum();
    let sby: f64 = basis.iter().zip(y).map(|(b, v)| b * v).sum();
    let det = n * sbb - sb * sb;
    if det.abs() < f64::MIN_POSITIVE {
        return f64::INFINITY;
    }
    let a = (sbb * sy - sb * sby) / det;
    let b = (n * sby - sb * sy) / det;
    basis
        .iter()
        .zip(y)
        .map(|(bi, yi)| (yi - a - b * bi).powi(2))
        .sum()
}

/// Relaxation rate of `y(t) = a + b exp(-rate t)`, by variable projection: a
/// log-spaced scan of the rate followed by golden-section refinement.
pub(crate) fn relaxation_rate(t: &[f64], y: &[f64]) -> f64 {
    let span = t[t.len() - 1] - t[0];
    let (lo, hi) = ((0.05 / span).ln(), (200.0 / span).ln());
    let n_scan = 240;
    let cost = |log_rate: f64| projected_residual(t, y, log_rate.exp());
    let step = (hi - lo) / n_scan as f64;
    let mut best = (lo, f64::INFINITY);
    for i in 0..=n_scan {
        let x = lo + step * i as f64;
        let c = cost(x);
        if c < best.1 {
            best = (x, c);
        }
    }
    let (mut a, mut b) = (best.0 - step, best.0 + step);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (cost(c), cost(d));
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = cost(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = cost(d);
        }
    }
    (0.5 * (a + b)).exp()
}

/// Mean and standard error of the mean.
pub(crate) fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
