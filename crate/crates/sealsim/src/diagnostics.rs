//! Periodicity diagnostics on transient records: phase-portrait points
//! (g against dg/dt) and sup-distance closure between consecutive periods.

use crate::dynamics::TimeSeriesRecord;
use crate::model::{min_clearance_rate, RotorMotion};

/// One phase-portrait sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub t: f64,
    pub g: f64,
    pub dg_dt: f64,
}

/// Phase-portrait samples at the recorded step times.
pub fn phase_points(records: &[TimeSeriesRecord], motion: RotorMotion) -> Vec<PhasePoint> {
    records
        .iter()
        .map(|r| PhasePoint {
            t: r.t,
            g: r.g,
            dg_dt: min_clearance_rate(r.dh_s_dt, motion, r.t),
        })
        .collect()
}

/// Splits phase points into forcing periods of length `period`; period k
/// covers t in [k*period, (k+1)*period).
pub fn split_periods(points: &[PhasePoint], period: f64) -> Vec<Vec<PhasePoint>> {
    let mut out: Vec<Vec<PhasePoint>> = Vec::new();
    for &p in points {
        let k = (p.t / period).floor() as usize;
        // Final sample at t = n*period belongs to the last period's close.
        let k = if k > 0 && (p.t - k as f64 * period).abs() < 1e-12 {
            k - 1
        } else {
            k
        };
        while out.len() <= k {
            out.push(Vec::new());
        }
        out[k].push(p);
    }
    out
}

/// Linear interpolation of (g, dg/dt) at time `t` from samples sorted by t.
fn interp(samples: &[PhasePoint], t: f64) -> (f64, f64) {
    match samples.binary_search_by(|p| p.t.partial_cmp(&t).unwrap()) {
        Ok(i) => (samples[i].g, samples[i].dg_dt),
        Err(0) => (samples[0].g, samples[0].dg_dt),
        Err(i) if i >= samples.len() => {
            let p = samples[samples.len() - 1];
            (p.g, p.dg_dt)
        }
        Err(i) => {
            let a = samples[i - 1];
            let b = samples[i];
            let w = (t - a.t) / (b.t - a.t);
            (
                a.g + w * (b.g - a.g),
                a.dg_dt + w * (b.dg_dt - a.dg_dt),
            )
        }
    }
}

/// Sup-distance between the phase curves of period k and period k-1, for
/// k = 1..n_periods: the maximum Euclidean distance between (g, dg/dt) at
/// time t and at t - period.
pub fn period_closures(points: &[PhasePoint], period: f64) -> Vec<f64> {
    let periods = split_periods(points, period);
    let mut out = Vec::new();
    for k in 1..periods.len() {
        let prev = &periods[k - 1];
        let cur = &periods[k];
        if prev.is_empty() || cur.is_empty() {
            out.push(f64::NAN);
            continue;
        }
        let mut worst: f64 = 0.0;
        for p in cur {
            let (g0, dg0) = interp(prev, p.t - period);
            let d = ((p.g - g0).powi(2) + (p.dg_dt - dg0).powi(2)).sqrt();
            worst = worst.max(d);
        }
        out.push(worst);
    }
    out
}

/// Minimum clearance within each period.
pub fn period_min_g(points: &[PhasePoint], period: f64) -> Vec<f64> {
    split_periods(points, period)
        .iter()
        .map(|p| p.iter().map(|s| s.g).fold(f64::INFINITY, f64::min))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(t: f64, g: f64, x2: f64) -> TimeSeriesRecord {
        TimeSeriesRecord {
            t,
            h_s: g,
            dh_s_dt: x2,
            force: 0.0,
            g,
            dt: 0.1,
            n_cells: 0,
            n_dofs: 0,
        }
    }

    #[test]
    fn exactly_periodic_signal_has_zero_closure() {
        let period = 1.0;
        let records: Vec<TimeSeriesRecord> = (0..=200)
            .map(|i| {
                let t = i as f64 * 0.01;
                rec(t, (std::f64::consts::TAU * t).sin(), 0.0)
            })
            .collect();
        let points = phase_points(&records, RotorMotion::Stationary);
        let closures = period_closures(&points, period);
        // Two full periods: one closure (period 1 against period 0).
        assert_eq!(closures.len(), 1);
        for c in closures {
            assert!(c < 1e-9, "closure {c}");
        }
    }

    #[test]
    fn drifting_signal_has_nonzero_closure() {
        let period = 1.0;
        let records: Vec<TimeSeriesRecord> = (0..=200)
            .map(|i| {
                let t = i as f64 * 0.01;
                rec(t, t, 0.0)
            })
            .collect();
        let points = phase_points(&records, RotorMotion::Stationary);
        let closures = period_closures(&points, period);
        for c in closures {
            assert!((c - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn per_period_minima() {
        let period = 1.0;
        let records: Vec<TimeSeriesRecord> = (0..=199)
            .map(|i| {
                let t = i as f64 * 0.01;
                rec(t, 1.0 + (t / period).floor(), 0.0)
            })
            .collect();
        let points = phase_points(&records, RotorMotion::Stationary);
        let mins = period_min_g(&points, period);
        assert_eq!(mins, vec![1.0, 2.0]);
    }
}
