use std::fmt;

/// Point estimate with a standard error.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimateWithCI {
    pub value: f64,
    pub stderr: f64,
    pub trials: usize,
    pub method: String,
}

impl fmt::Display for EstimateWithCI {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6} +- {:.6} ({}, {} trials)", self.value, self.stderr, self.method, self.trials)
    }
}

/// Mean and standard error of the mean (the delete-one jackknife of the mean).
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Grouped jackknife standard error from leave-one-group-out estimates.
pub fn jackknife_stderr(leave_out: &[f64]) -> f64 {
    let g = leave_out.len();
    if g < 2 {
        return 0.0;
    }
    let m = leave_out.iter().sum::<f64>() / g as f64;
    ((g - 1) as f64 / g as f64 * leave_out.iter().map(|x| (x - m).powi(2)).sum::<f64>()).sqrt()
}

/// Least-squares slope with its standard error from the residuals.
pub fn slope_fit(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let icpt = my - slope * mx;
    let se = if pts.len() > 2 && sxx > 0.0 {
        let ssr: f64 = pts.iter().map(|p| (p.1 - icpt - slope * p.0).powi(2)).sum();
        (ssr / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    (slope, icpt, se)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line_has_zero_stderr() {
        let pts: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, 2.0 * i as f64 + 1.0)).collect();
        let (s, c, e) = slope_fit(&pts);
        assert!((s - 2.0).abs() < 1e-12 && (c - 1.0).abs() < 1e-12 && e < 1e-12);
    }

    #[test]
    fn jackknife_of_mean_matches_classical() {
        let xs = [1.0, 4.0, 2.0, 8.0, 5.0];
        let n = xs.len();
        let total: f64 = xs.iter().sum();
        let lo: Vec<f64> = xs.iter().map(|x| (total - x) / (n - 1) as f64).collect();
        assert!((jackknife_stderr(&lo) - mean_stderr(&xs).1).abs() < 1e-12);
    }
}
