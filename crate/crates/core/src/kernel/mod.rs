//! Helmholtz fundamental solution and panel quadrature.

pub mod quadrature;
pub mod singular;

use std::f64::consts::PI;

use nalgebra::Point3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use quadrature::{gauss_legendre, QuadratureRule};
pub use singular::{
    panel_integral, singular_panel_integral, static_triangle_integral, PanelWeights,
    DEFAULT_SINGULAR_ORDER,
};

/// Positive wave number `k`, or the static (`k = 0`) validation mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveNumber {
    k: f64,
    static_mode: bool,
}

impl WaveNumber {
    pub fn new(k: f64) -> Result<Self> {
        if k.is_finite() && k > 0.0 {
            Ok(WaveNumber {
                k,
                static_mode: false,
            })
        } else {
            Err(Error::param(
                "wavenumber",
                format!("must be positive and finite, got {k}"),
            ))
        }
    }

    /// `k = 0`, the Laplace limit. Only the validation checks use this; the
    /// scattering entry points reject it.
    pub fn static_mode() -> Self {
        WaveNumber {
            k: 0.0,
            static_mode: true,
        }
    }

    pub fn value(&self) -> f64 {
        self.k
    }

    pub fn is_static(&self) -> bool {
        self.static_mode
    }

    /// The wave number for a genuine scattering run.
    pub fn require_scattering(&self) -> Result<f64> {
        if self.static_mode {
            Err(Error::param(
                "wavenumber",
                "static validation mode is not allowed in scattering runs",
            ))
        } else {
            Ok(self.k)
        }
    }
}

/// `e^{ikr} / (4πr)` for `r > 0`.
#[inline]
pub fn phi_of_distance(k: f64, r: f64) -> Complex64 {
    Complex64::cis(k * r) / (4.0 * PI * r)
}

/// `(e^{ikr} - 1) / (4πr)`, bounded and continuous at `r = 0`.
#[inline]
pub fn phi_remainder(k: f64, r: f64) -> Complex64 {
    let kr = k * r;
    if kr.abs() < 1e-8 {
        return Complex64::new(-0.5 * k * kr, k) / (4.0 * PI);
    }
    let half = (0.5 * kr).sin();
    Complex64::new(-2.0 * half * half, kr.sin()) / (4.0 * PI * r)
}

/// Outgoing fundamental solution `Φ(x, y) = e^{ik|x−y|} / (4π|x−y|)`.
pub fn phi(k: WaveNumber, x: &Point3<f64>, y: &Point3<f64>) -> Result<Complex64> {
    let r = (x - y).norm();
    if r == 0.0 {
        return Err(Error::Domain(
            "fundamental solution at coincident points".into(),
        ));
    }
    Ok(phi_of_distance(k.value(), r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Vector3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn phi_reference_values() {
        let o = Point3::origin();
        let e3 = Point3::new(0.0, 0.0, 1.0);
        let v = phi(WaveNumber::static_mode(), &e3, &o).unwrap();
        assert!((v.re - 0.079_577_471_5).abs() < 1e-10 && v.im == 0.0);
        let v = phi(WaveNumber::new(PI).unwrap(), &e3, &o).unwrap();
        assert!((v.re + 1.0 / (4.0 * PI)).abs() < 1e-15 && v.im.abs() < 1e-15);
        let v = phi(WaveNumber::new(1.0).unwrap(), &e3, &o).unwrap();
        assert!((v.re - 1f64.cos() / (4.0 * PI)).abs() < 1e-16);
        assert!((v.im - 1f64.sin() / (4.0 * PI)).abs() < 1e-16);
    }

    #[test]
    fn phi_rejects_coincident_points_and_bad_k() {
        let p = Point3::new(0.3, 0.2, 0.1);
        assert!(matches!(
            phi(WaveNumber::new(1.0).unwrap(), &p, &p),
            Err(Error::Domain(_))
        ));
        assert!(WaveNumber::new(0.0).is_err());
        assert!(WaveNumber::new(-2.0).is_err());
        assert!(WaveNumber::static_mode().require_scattering().is_err());
    }

    #[test]
    fn phi_is_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let k = WaveNumber::new(3.7).unwrap();
        for _ in 0..100 {
            let x = Point3::new(rng.random(), rng.random(), rng.random());
            let y = Point3::new(rng.random(), rng.random(), rng.random());
            assert_eq!(phi(k, &x, &y).unwrap(), phi(k, &y, &x).unwrap());
        }
    }

    #[test]
    fn remainder_matches_direct_difference() {
        for &(k, r) in &[(6.0, 0.3), (1.0, 1e-3), (16.0, 0.05), (2.0, 1e-10)] {
            let direct = (Complex64::cis(k * r) - 1.0) / (4.0 * PI * r);
            let diff = (phi_remainder(k, r) - direct).norm();
            assert!(diff <= 1e-6 * direct.norm(), "k={k} r={r}");
        }
    }

    /// Fourth-order central Laplacian of Φ(·, y) at x.
    fn fd_laplacian(k: WaveNumber, x: Point3<f64>, y: Point3<f64>, h: f64) -> Complex64 {
        let f = |p: Point3<f64>| phi(k, &p, &y).unwrap();
        let mut lap = Complex64::new(0.0, 0.0);
        for axis in 0..3 {
            let mut e = Vector3::zeros();
            e[axis] = h;
            lap += (-f(x + 2.0 * e) + 16.0 * f(x + e) - 30.0 * f(x) + 16.0 * f(x - e)
                - f(x - 2.0 * e))
                / (12.0 * h * h);
        }
        lap
    }

    #[test]
    fn phi_solves_helmholtz_away_from_source() {
        let k = WaveNumber::new(2.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let y = Point3::origin();
        for _ in 0..5 {
            let dir = Vector3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            )
            .normalize();
            let x = y + dir * rng.random_range(0.8..1.5);
            let residual = |h: f64| {
                (fd_laplacian(k, x, y, h) + k.value().powi(2) * phi(k, &x, &y).unwrap()).norm()
            };
            let (r1, r2) = (residual(0.04), residual(0.02));
            let order = (r1 / r2).log2();
            assert!(r1 < 1e-3, "{r1}");
            assert!(order > 1.8, "observed order {order}");
        }
    }
}
