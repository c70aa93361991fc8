use chrono::NaiveDate;
use serde::Serialize;

use crate::{Error, Result};

/// Smallest tail a power-law fit is reported for.
pub const MIN_TAIL: usize = 10;

const GAMMA_MIN: f64 = 1.0 + 1e-9;
const GAMMA_MAX: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub gamma: f64,
    pub xmin: u64,
    pub n_tail: usize,
    /// Kolmogorov-Smirnov distance between tail and fitted law.
    pub ks: f64,
}

/// Hurwitz zeta `sum_{k>=0} (q + k)^-s` for `s > 1`, `q > 0`, by
/// Euler-Maclaurin summation after shifting `q` past 15.
pub fn hurwitz_zeta(s: f64, q: f64) -> f64 {
    // B_2j / (2j)!
    const B2J_OVER_FACT: [f64; 7] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
        -691.0 / 1307674368000.0,
        1.0 / 74724249600.0,
    ];
    debug_assert!(s > 1.0 && q > 0.0);
    let shift = if q < 15.0 { (15.0 - q).ceil() as usize } else { 0 };
    let mut sum = 0.0;
    for k in (0..shift).rev() {
        sum += (q + k as f64).powf(-s);
    }
    let a = q + shift as f64;
    let mut tail = a.powf(1.0 - s) / (s - 1.0) + 0.5 * a.powf(-s);
    // Rising factorial s (s+1) ... (s+2j-2) times a^(-s-2j+1).
    let mut term = s * a.powf(-s - 1.0);
    for (j, c) in B2J_OVER_FACT.iter().enumerate() {
        tail += c * term;
        let j = j as f64 + 1.0;
        term *= (s + 2.0 * j - 1.0) * (s + 2.0 * j) / (a * a);
    }
    sum + tail
}

/// Discrete power-law fit `p(x) ∝ x^-gamma` for `x >= xmin`.
///
/// The exponent is the maximum-likelihood estimate over the tail. Without an
/// explicit `xmin`, every observed value leaving at least [`MIN_TAIL`]
/// samples is tried and the one minimising the KS distance is kept.
pub fn powerlaw_fit(samples: &[u64], xmin: Option<u64>) -> Result<PowerLawFit> {
    let mut sorted: Vec<u64> = samples.iter().copied().filter(|&x| x > 0).collect();
    sorted.sort_unstable();
    if sorted.len() < MIN_TAIL {
        return Err(Error::TooFewSamples {
            needed: MIN_TAIL,
            got: sorted.len(),
        });
    }
    match xmin {
        Some(xmin) => {
            let tail = &sorted[sorted.partition_point(|&x| x < xmin.max(1))..];
            fit_tail(tail, xmin.max(1))
        }
        None => {
            let mut candidates: Vec<u64> = sorted.clone();
            candidates.dedup();
            let mut best: Option<PowerLawFit> = None;
            for xmin in candidates {
                let tail = &sorted[sorted.partition_point(|&x| x < xmin)..];
                if tail.len() < MIN_TAIL {
                    break;
                }
                let Ok(fit) = fit_tail(tail, xmin) else { continue };
                if best.is_none_or(|b| fit.ks < b.ks) {
                    best = Some(fit);
                }
            }
            best.ok_or_else(|| Error::Degenerate("no cutoff leaves a non-degenerate tail".into()))
        }
    }
}

fn fit_tail(tail: &[u64], xmin: u64) -> Result<PowerLawFit> {
    if tail.len() < MIN_TAIL {
        return Err(Error::TooFewSamples {
            needed: MIN_TAIL,
            got: tail.len(),
        });
    }
    if tail.first() == tail.last() {
        return Err(Error::Degenerate(format!(
            "all {} tail samples equal {}",
            tail.len(),
            tail[0]
        )));
    }
    let n = tail.len() as f64;
    let sum_ln: f64 = tail.iter().map(|&x| (x as f64).ln()).sum();
    let q = xmin as f64;
    let neg_ll = |g: f64| n * hurwitz_zeta(g, q).ln() + g * sum_ln;
    let gamma = golden_min(neg_ll, GAMMA_MIN, GAMMA_MAX, 1e-10);

    let norm = hurwitz_zeta(gamma, q);
    let mut ks: f64 = 0.0;
    let mut i = 0;
    while i < tail.len() {
        let x = tail[i];
        let below = i as f64 / n;
        while i < tail.len() && tail[i] == x {
            i += 1;
        }
        let upto = i as f64 / n;
        let model_below = 1.0 - hurwitz_zeta(gamma, x as f64) / norm;
        let model_upto = 1.0 - hurwitz_zeta(gamma, x as f64 + 1.0) / norm;
        ks = ks.max((upto - model_upto).abs()).max((below - model_below).abs());
    }
    Ok(PowerLawFit {
        gamma,
        xmin,
        n_tail: tail.len(),
        ks,
    })
}

fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > tol {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    0.5 * (lo + hi)
}

/// Two least-squares lines sharing the breakpoint sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BreakpointFit {
    /// Index of the breakpoint sample; it belongs to both segments.
    pub index: usize,
    pub x: f64,
    pub slope_before: f64,
    pub intercept_before: f64,
    pub slope_after: f64,
    pub intercept_after: f64,
    /// Total squared residual of both segments.
    pub sse: f64,
}

/// Single-breakpoint piecewise-linear fit over strictly increasing `x`.
/// Every interior sample is tried; the earliest minimum wins.
pub fn breakpoint_fit(points: &[(f64, f64)]) -> Result<BreakpointFit> {
    if points.len() < 4 {
        return Err(Error::TooFewSamples {
            needed: 4,
            got: points.len(),
        });
    }
    if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::InvalidParameter("x values must be strictly increasing".into()));
    }
    let mut best: Option<BreakpointFit> = None;
    for k in 1..points.len() - 1 {
        let (s1, i1, e1) = ols(&points[..=k]);
        let (s2, i2, e2) = ols(&points[k..]);
        let sse = e1 + e2;
        if best.is_none_or(|b| sse < b.sse) {
            best = Some(BreakpointFit {
                index: k,
                x: points[k].0,
                slope_before: s1,
                intercept_before: i1,
                slope_after: s2,
                intercept_after: i2,
                sse,
            });
        }
    }
    Ok(best.expect("at least one interior point"))
}

fn ols(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse = points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    (slope, intercept, sse)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DatedBreakpointFit {
    pub breakpoint: NaiveDate,
    /// Units of the series per day.
    pub slope_before: f64,
    pub slope_after: f64,
    pub sse: f64,
}

/// [`breakpoint_fit`] over a date-ordered series, time measured in days.
pub fn breakpoint_fit_dated(series: &[(NaiveDate, f64)]) -> Result<DatedBreakpointFit> {
    let Some(&(origin, _)) = series.first() else {
        return Err(Error::TooFewSamples { needed: 4, got: 0 });
    };
    let points: Vec<(f64, f64)> = series
        .iter()
        .map(|&(d, v)| ((d - origin).num_days() as f64, v))
        .collect();
    let fit = breakpoint_fit(&points)?;
    Ok(DatedBreakpointFit {
        breakpoint: series[fit.index].0,
        slope_before: fit.slope_before,
        slope_after: fit.slope_after,
        sse: fit.sse,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_known_values() {
        let pi2_6 = std::f64::consts::PI.powi(2) / 6.0;
        assert!((hurwitz_zeta(2.0, 1.0) - pi2_6).abs() < 1e-14);
        assert!((hurwitz_zeta(2.0, 2.0) - (pi2_6 - 1.0)).abs() < 1e-14);
        // zeta(4) = pi^4 / 90
        assert!((hurwitz_zeta(4.0, 1.0) - std::f64::consts::PI.powi(4) / 90.0).abs() < 1e-14);
        // Direct sum for a large offset where the series converges quickly.
        let direct: f64 = (0..200_000).map(|k| (1000.0 + k as f64).powf(-6.0)).sum();
        assert!((hurwitz_zeta(6.0, 1000.0) - direct).abs() / direct < 1e-10);
    }

    #[test]
    fn zeta_recurrence() {
        for &s in &[1.3, 2.5, 3.7] {
            for &q in &[0.5, 1.0, 3.0, 14.5, 40.0] {
                let lhs = hurwitz_zeta(s, q) - hurwitz_zeta(s, q + 1.0);
                let rhs = q.powf(-s);
                assert!((lhs - rhs).abs() < 1e-12 * rhs.max(1.0), "s={s} q={q}");
            }
        }
    }

    #[test]
    fn equal_samples_are_rejected() {
        let samples = vec![3u64; 50];
        assert!(matches!(powerlaw_fit(&samples, Some(1)), Err(Error::Degenerate(_))));
        assert!(powerlaw_fit(&samples, None).is_err());
    }

    #[test]
    fn too_few_samples() {
        assert!(matches!(
            powerlaw_fit(&[1, 2, 3], None),
            Err(Error::TooFewSamples { .. })
        ));
        let s: Vec<u64> = (1..=20).collect();
        assert!(matches!(powerlaw_fit(&s, Some(15)), Err(Error::TooFewSamples { .. })));
    }

    #[test]
    fn two_slope_series() {
        let pts: Vec<(f64, f64)> = (0..=100)
            .map(|t| {
                let t = t as f64;
                (t, if t <= 50.0 { t } else { 50.0 + 3.0 * (t - 50.0) })
            })
            .collect();
        let fit = breakpoint_fit(&pts).unwrap();
        assert_eq!(fit.index, 50);
        assert!((fit.slope_before - 1.0).abs() < 1e-9);
        assert!((fit.slope_after - 3.0).abs() < 1e-9);
    }

    #[test]
    fn constant_series() {
        let pts: Vec<(f64, f64)> = (0..10).map(|t| (t as f64, 7.0)).collect();
        let fit = breakpoint_fit(&pts).unwrap();
        assert_eq!((fit.slope_before, fit.slope_after), (0.0, 0.0));
    }

    #[test]
    fn short_or_unordered_series() {
        assert!(breakpoint_fit(&[(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)]).is_err());
        assert!(breakpoint_fit(&[(0.0, 0.0), (2.0, 1.0), (1.0, 2.0), (3.0, 0.0)]).is_err());
    }

    #[test]
    fn dated_series_slopes_are_per_day() {
        let d0 = NaiveDate::from_ymd_opt(2020, 1, 1).unwrap();
        let series: Vec<(NaiveDate, f64)> = (0..30)
            .map(|i| {
                let v = if i <= 10 {
                    2.0 * i as f64
                } else {
                    20.0 + 5.0 * (i - 10) as f64
                };
                (d0 + chrono::Days::new(i), v)
            })
            .collect();
        let fit = breakpoint_fit_dated(&series).unwrap();
        assert_eq!(fit.breakpoint, d0 + chrono::Days::new(10));
        assert!((fit.slope_before - 2.0).abs() < 1e-9);
        assert!((fit.slope_after - 5.0).abs() < 1e-9);
    }
}
