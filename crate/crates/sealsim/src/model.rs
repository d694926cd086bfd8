//! Rotor motion laws and the analytic gap/clearance formulas shared by every
//! other module.

/// Prescribed axial motion of the rotor centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RotorMotion {
    /// Rotor held at height 0.
    Stationary,
    /// h_R(t) = eps * sin(t).
    Sinusoidal { eps: f64 },
    /// Smooth compactly supported bump centred at t = 2:
    /// h_R(t) = eps * exp(-1 / (1 - (t-2)^2/4)) for |t - 2| < 2, else 0.
    Bump { eps: f64 },
}

impl RotorMotion {
    /// Rotor centre height h_R(t).
    pub fn height(&self, t: f64) -> f64 {
        match *self {
            RotorMotion::Stationary => 0.0,
            RotorMotion::Sinusoidal { eps } => eps * t.sin(),
            RotorMotion::Bump { eps } => {
                let s = t - 2.0;
                if s.abs() < 2.0 {
                    eps * (-1.0 / (1.0 - 0.25 * s * s)).exp()
                } else {
                    0.0
                }
            }
        }
    }

    /// Exact analytic derivative of `height`. The bump derivative is 0 at and
    /// outside the support endpoints (the one-sided limits vanish).
    pub fn height_rate(&self, t: f64) -> f64 {
        match *self {
            RotorMotion::Stationary => 0.0,
            RotorMotion::Sinusoidal { eps } => eps * t.cos(),
            RotorMotion::Bump { eps } => {
                let s = t - 2.0;
                if s.abs() < 2.0 {
                    let q = 1.0 - 0.25 * s * s;
                    eps * (-1.0 / q).exp() * (-(0.5 * s) / (q * q))
                } else {
                    0.0
                }
            }
        }
    }

    /// Forcing amplitude, 0 for a stationary rotor.
    pub fn amplitude(&self) -> f64 {
        match *self {
            RotorMotion::Stationary => 0.0,
            RotorMotion::Sinusoidal { eps } | RotorMotion::Bump { eps } => eps,
        }
    }
}

/// Rotor-stator clearance h = h_s - h_R - r * beta * sin(theta - source_phase).
///
/// Negative values are returned as-is; callers guard.
pub fn gap(r: f64, theta: f64, h_s: f64, h_rotor: f64, beta: f64, source_phase: f64) -> f64 {
    h_s - h_rotor - r * beta * (theta - source_phase).sin()
}

/// Minimum of `gap` over the annulus: g = h_s - h_R - |beta|, attained at
/// r = 1 where sin(theta - phase) = sign(beta).
pub fn min_clearance(h_s: f64, h_rotor: f64, beta: f64) -> f64 {
    h_s - h_rotor - beta.abs()
}

/// Rate of change of the minimum clearance: dg/dt = x2 - dh_R/dt, since beta
/// is fixed and the minimising location does not move.
pub fn min_clearance_rate(x2: f64, motion: RotorMotion, t: f64) -> f64 {
    x2 - motion.height_rate(t)
}

/// Stator height and axial velocity at a time instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatorState {
    /// Stator height h_s.
    pub x1: f64,
    /// Stator axial velocity dh_s/dt.
    pub x2: f64,
    pub t: f64,
}

impl StatorState {
    pub fn new(x1: f64, x2: f64, t: f64) -> Self {
        StatorState { x1, x2, t }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    const FRAC_PI_2: f64 = std::f64::consts::FRAC_PI_2;

    #[test]
    fn sinusoidal_height_values() {
        let m = RotorMotion::Sinusoidal { eps: 1.2 };
        assert_eq!(m.height(0.0), 0.0);
        assert!((m.height(FRAC_PI_2) - 1.2).abs() < 1e-15);
        assert!((m.height_rate(0.0) - 1.2).abs() < 1e-15);
        assert!(m.height_rate(FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn bump_height_values() {
        let m = RotorMotion::Bump { eps: 1.2 };
        assert!((m.height(2.0) - 1.2 * (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(m.height(4.5), 0.0);
        assert_eq!(m.height(0.0), 0.0);
        assert_eq!(m.height(4.0), 0.0);
        assert_eq!(m.height_rate(2.0), 0.0);
        assert_eq!(m.height_rate(4.0), 0.0);
    }

    #[test]
    fn gap_values() {
        assert!((gap(0.5, 1.234, 1.0, 0.0, 0.0, 0.0) - 1.0).abs() < 1e-15);
        assert!((gap(1.0, FRAC_PI_2, 1.5, 1.2, 0.25, 0.0) - 0.05).abs() < 1e-15);
        assert!((gap(1.0, -FRAC_PI_2, 1.5, 1.2, 0.25, 0.0) - 0.55).abs() < 1e-15);
    }

    #[test]
    fn min_clearance_values() {
        assert_eq!(min_clearance(1.0, 0.0, 0.0), 1.0);
        assert!((min_clearance(1.5, 1.2, 0.25) - 0.05).abs() < 1e-15);
        assert!((min_clearance(1.5, 1.2, -0.25) - 0.05).abs() < 1e-15);
    }

    #[test]
    fn min_clearance_rate_values() {
        assert_eq!(min_clearance_rate(0.0, RotorMotion::Stationary, 3.7), 0.0);
        let m = RotorMotion::Sinusoidal { eps: 1.2 };
        assert!((min_clearance_rate(0.3, m, 0.0) - (-0.9)).abs() < 1e-15);
        let b = RotorMotion::Bump { eps: 1.2 };
        assert_eq!(min_clearance_rate(0.5, b, 2.0), 0.5);
    }

    #[test]
    fn gap_is_linear_in_heights_and_beta() {
        let (r, th, phase) = (0.7, 1.1, 0.3);
        for &(hs, hr, beta) in &[(1.0, 0.2, 0.1), (2.0, -0.5, -0.3), (0.5, 0.0, 0.0)] {
            let base = gap(r, th, hs, hr, beta, phase);
            assert!((gap(r, th, 2.0 * hs, hr, beta, phase) - (base + hs)).abs() < 1e-12);
            assert!((gap(r, th, hs, hr + 1.0, beta, phase) - (base - 1.0)).abs() < 1e-12);
            let wedge = gap(r, th, hs, hr, 2.0 * beta, phase) - base;
            assert!((wedge - (base - gap(r, th, hs, hr, 0.0, phase))).abs() < 1e-12);
        }
    }

    #[test]
    fn gap_rotational_covariance() {
        // Shifting theta and source_phase together leaves the gap unchanged.
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..50 {
            let r: f64 = rng.random_range(0.2..1.0);
            let th: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let phi: f64 = rng.random_range(-3.0..3.0);
            let g0 = gap(r, th, 1.3, 0.1, 0.25, 0.0);
            let g1 = gap(r, th + phi, 1.3, 0.1, 0.25, phi);
            assert!((g0 - g1).abs() < 1e-12);
        }
    }

    #[test]
    fn gap_with_zero_beta_is_uniform() {
        let g0 = gap(0.2, 0.0, 1.3, 0.2, 0.0, 0.0);
        for i in 0..20 {
            let r = 0.2 + 0.04 * i as f64;
            let th = 0.31 * i as f64;
            assert_eq!(gap(r, th, 1.3, 0.2, 0.0, 0.0), g0);
        }
    }

    #[test]
    fn min_clearance_matches_brute_force_grid() {
        for &(hs, hr, beta) in &[(1.5, 1.2, 0.25), (1.0, 0.0, -0.4), (2.0, 0.5, 0.0)] {
            let mut best = f64::INFINITY;
            for i in 0..=400 {
                let r = 0.2 + 0.8 * i as f64 / 400.0;
                for j in 0..400 {
                    let th = std::f64::consts::TAU * j as f64 / 400.0;
                    best = best.min(gap(r, th, hs, hr, beta, 0.0));
                }
            }
            let g = min_clearance(hs, hr, beta);
            // Grid resolution limits agreement near the minimiser.
            assert!((best - g).abs() < 1e-3, "grid {best} vs formula {g}");
            assert!(best >= g - 1e-12);
        }
    }

    #[test]
    fn height_rate_matches_central_differences() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(42);
        let motions = [
            RotorMotion::Stationary,
            RotorMotion::Sinusoidal { eps: 1.2 },
            RotorMotion::Bump { eps: 0.8 },
        ];
        let delta = 1e-5;
        for m in motions {
            for _ in 0..100 {
                let t: f64 = rng.random_range(-1.0..6.0);
                // Keep clear of the bump support endpoints where the
                // one-sided derivative convention differs from the stencil.
                if matches!(m, RotorMotion::Bump { .. })
                    && ((t - 0.0).abs() < 10.0 * delta || (t - 4.0).abs() < 10.0 * delta)
                {
                    continue;
                }
                let fd = (m.height(t + delta) - m.height(t - delta)) / (2.0 * delta);
                let exact = m.height_rate(t);
                assert!(
                    (fd - exact).abs() < 1e-7 * (1.0 + exact.abs()),
                    "{m:?} at t = {t}: fd {fd} vs exact {exact}"
                );
            }
        }
    }
}
