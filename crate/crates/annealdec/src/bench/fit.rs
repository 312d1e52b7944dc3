//! Least-squares fits for the two quantities the experiments report:
//! the growth exponent of decoding effort with problem size, and the
//! below-threshold power law of the logical error rate
//!
//!   log P_L = log c1 + c2 * d_e * log(p / p_th),   d_e = floor((d+1)/2),
//!
//! where d_e counts the minimum number of physical errors that can cause
//! a logical failure.

use crate::{Error, Result};

/// Minimum number of errors a logical failure needs at distance d.
pub fn effective_distance(d: usize) -> usize {
    d.div_ceil(2)
}

fn linear_regression(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Fit iterations ~ N^exponent on log-log axes. Points are (size, mean
/// iterations); returns (exponent, intercept) with the intercept in log
/// space.
pub fn fit_loglog_exponent(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    if points.len() < 3 {
        return Err(Error::Fit(format!("need at least 3 points, got {}", points.len())));
    }
    if let Some(&(n, it)) = points.iter().find(|&&(n, it)| n <= 0.0 || it <= 0.0) {
        return Err(Error::Fit(format!("nonpositive point ({n}, {it}) on log-log axes")));
    }
    let xs: Vec<f64> = points.iter().map(|&(n, _)| n.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, it)| it.ln()).collect();
    let distinct = xs.iter().any(|&x| (x - xs[0]).abs() > 1e-12);
    if !distinct {
        return Err(Error::Fit("all points share one size; exponent undefined".into()));
    }
    Ok(linear_regression(&xs, &ys))
}

/// Fit (c1, c2) of the logical-error power law. Cells are (d, p, P_L),
/// already restricted to the intended window of error rates.
pub fn fit_power_law(cells: &[(usize, f64, f64)], p_th: f64) -> Result<(f64, f64)> {
    if cells.len() < 2 {
        return Err(Error::Fit(format!("need at least 2 cells, got {}", cells.len())));
    }
    if p_th <= 0.0 {
        return Err(Error::Fit(format!("threshold rate must be positive, got {p_th}")));
    }
    if let Some(&(d, p, pl)) = cells.iter().find(|&&(_, p, pl)| p <= 0.0 || pl <= 0.0) {
        return Err(Error::Fit(format!(
            "cell (d={d}, p={p}, P_L={pl}) is nonpositive; cannot fit logs"
        )));
    }
    let xs: Vec<f64> = cells
        .iter()
        .map(|&(d, p, _)| effective_distance(d) as f64 * (p / p_th).ln())
        .collect();
    let ys: Vec<f64> = cells.iter().map(|&(_, _, pl)| pl.ln()).collect();
    let distinct = xs.iter().any(|&x| (x - xs[0]).abs() > 1e-12);
    if !distinct {
        return Err(Error::Fit("degenerate window: all cells share one abscissa".into()));
    }
    let (c2, log_c1) = linear_regression(&xs, &ys);
    Ok((log_c1.exp(), c2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn effective_distance_floor() {
        assert_eq!(effective_distance(4), 2);
        assert_eq!(effective_distance(5), 3);
        assert_eq!(effective_distance(11), 6);
        assert_eq!(effective_distance(41), 21);
    }

    #[test]
    fn exact_square_law() {
        let points: Vec<(f64, f64)> =
            (2..10).map(|k| (k as f64, (k * k) as f64)).collect();
        let (exp, intercept) = fit_loglog_exponent(&points).unwrap();
        assert!((exp - 2.0).abs() < 1e-9, "{exp}");
        assert!(intercept.abs() < 1e-9, "{intercept}");
    }

    #[test]
    fn noisy_power_law_recovers_exponent() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let points: Vec<(f64, f64)> = (4..=16)
            .step_by(2)
            .map(|d| {
                let n = (d * d + (d - 1) * (d - 1)) as f64;
                let noise = 1.0 + 0.01 * (rng.random::<f64>() - 0.5);
                (n, 7.0 * n.powf(1.5) * noise)
            })
            .collect();
        let (exp, _) = fit_loglog_exponent(&points).unwrap();
        assert!((exp - 1.5).abs() < 0.05, "{exp}");
    }

    #[test]
    fn loglog_domain_errors() {
        assert!(fit_loglog_exponent(&[(1.0, 1.0), (2.0, 2.0)]).is_err());
        assert!(fit_loglog_exponent(&[(1.0, 1.0), (2.0, 0.0), (3.0, 2.0)]).is_err());
        assert!(fit_loglog_exponent(&[(2.0, 1.0), (2.0, 2.0), (2.0, 3.0)]).is_err());
    }

    #[test]
    fn power_law_exact_recovery() {
        let (c1, c2) = (0.2f64, 0.8f64);
        let p_th = 0.096f64;
        let mut cells = Vec::new();
        for d in [5usize, 7, 9, 11] {
            for p in [0.04, 0.05, 0.06, 0.07, 0.08] {
                let de = effective_distance(d) as f64;
                let pl = c1 * (p / p_th).powf(c2 * de);
                cells.push((d, p, pl));
            }
        }
        let (f1, f2) = fit_power_law(&cells, p_th).unwrap();
        assert!((f1 - c1).abs() < 1e-6, "{f1}");
        assert!((f2 - c2).abs() < 1e-6, "{f2}");
    }

    #[test]
    fn power_law_threshold_shift_keeps_slope_for_single_distance() {
        // For one distance the p_th choice shifts all abscissas equally,
        // so only c1 moves.
        let cells: Vec<(usize, f64, f64)> = [0.04, 0.05, 0.06, 0.07, 0.08]
            .iter()
            .map(|&p| (11usize, p, 0.2 * (p / 0.096f64).powf(0.8 * 6.0)))
            .collect();
        let (_, c2_a) = fit_power_law(&cells, 0.096).unwrap();
        let (_, c2_b) = fit_power_law(&cells, 0.11).unwrap();
        assert!((c2_a - c2_b).abs() < 1e-9);
    }

    #[test]
    fn power_law_domain_errors() {
        assert!(fit_power_law(&[(5, 0.05, 0.1)], 0.096).is_err());
        assert!(fit_power_law(&[(5, 0.05, 0.1), (5, 0.06, 0.0)], 0.096).is_err());
        assert!(fit_power_law(&[(5, 0.05, 0.1), (5, 0.06, 0.2)], 0.0).is_err());
        assert!(fit_power_law(&[(5, 0.05, 0.1), (5, 0.05, 0.2)], 0.096).is_err());
    }
}
