//! Incident waves: entire solutions of the Helmholtz equation.

use std::f64::consts::PI;

use nalgebra::{Point2, Point3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ScreenShape;
use crate::kernel::{gauss_legendre, phi_of_distance};

fn unit_amplitude() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum IncidentWave {
    /// `A · e^{ik d·x}`.
    Plane {
        direction: [f64; 3],
        amplitude: Complex64,
    },
    /// `A · Φ(x, z)`.
    PointSource {
        location: [f64; 3],
        #[serde(default = "unit_amplitude")]
        amplitude: Complex64,
    },
    /// `Σ_m w_m g_m e^{ik d_m·x}`, a quadrature of a Herglotz wave function.
    Herglotz {
        directions: Vec<[f64; 3]>,
        weights: Vec<f64>,
        density: Vec<Complex64>,
    },
    Superposition {
        waves: Vec<IncidentWave>,
    },
}

impl IncidentWave {
    pub fn plane(direction: Vector3<f64>, amplitude: Complex64) -> Self {
        let d = direction.normalize();
        IncidentWave::Plane {
            direction: [d.x, d.y, d.z],
            amplitude,
        }
    }

    pub fn point_source(location: Point3<f64>) -> Self {
        IncidentWave::PointSource {
            location: [location.x, location.y, location.z],
            amplitude: unit_amplitude(),
        }
    }

    /// `sin(k x₃)` as the superposition of the plane waves `±e₃` with
    /// amplitudes `±1/(2i)`. Odd in `x₃`.
    pub fn sine_x3() -> Self {
        IncidentWave::Superposition {
            waves: vec![
                IncidentWave::plane(Vector3::z(), Complex64::new(0.0, -0.5)),
                IncidentWave::plane(-Vector3::z(), Complex64::new(0.0, 0.5)),
            ],
        }
    }

    /// Herglotz wave with density `g`, discretized with a Gauss–Legendre
    /// (in cos θ) × uniform (in φ) rule on the whole sphere.
    pub fn herglotz_from_fn<G>(n_theta: usize, n_phi: usize, g: G) -> Self
    where
        G: Fn(&Vector3<f64>) -> Complex64,
    {
        let (nodes, w) = gauss_legendre(n_theta);
        let mut directions = Vec::new();
        let mut weights = Vec::new();
        let mut density = Vec::new();
        for (u, wu) in nodes.iter().zip(&w) {
            let cos_t = 2.0 * u - 1.0;
            let sin_t = (1.0 - cos_t * cos_t).max(0.0).sqrt();
            for j in 0..n_phi {
                let phi = 2.0 * PI * j as f64 / n_phi as f64;
                let d = Vector3::new(sin_t * phi.cos(), sin_t * phi.sin(), cos_t);
                directions.push([d.x, d.y, d.z]);
                weights.push(2.0 * wu * 2.0 * PI / n_phi as f64);
                density.push(g(&d));
            }
        }
        IncidentWave::Herglotz {
            directions,
            weights,
            density,
        }
    }

    /// `u_i(x)` at wave number `k`.
    pub fn evaluate(&self, k: f64, x: &Point3<f64>) -> Complex64 {
        match self {
            IncidentWave::Plane {
                direction,
                amplitude,
            } => {
                let d = Vector3::from(*direction);
                amplitude * Complex64::cis(k * d.dot(&x.coords))
            }
            IncidentWave::PointSource {
                location,
                amplitude,
            } => {
                let r = (x - Point3::from(*location)).norm();
                amplitude * phi_of_distance(k, r)
            }
            IncidentWave::Herglotz {
                directions,
                weights,
                density,
            } => directions
                .iter()
                .zip(weights)
                .zip(density)
                .map(|((d, w), g)| g * Complex64::cis(k * Vector3::from(*d).dot(&x.coords)) * *w)
                .sum(),
            IncidentWave::Superposition { waves } => waves.iter().map(|w| w.evaluate(k, x)).sum(),
        }
    }

    /// Value on the screen plane at `(x′, 0)`.
    pub fn on_plane(&self, k: f64, x: &Point2<f64>) -> Complex64 {
        self.evaluate(k, &Point3::new(x.x, x.y, 0.0))
    }

    /// Check the wave's parameters; point sources must lie off `Ω‾`.
    pub fn validate(&self, shape: Option<&ScreenShape>) -> Result<()> {
        match self {
            IncidentWave::Plane {
                direction,
                amplitude,
            } => {
                let n = Vector3::from(*direction).norm();
                if !n.is_finite() || (n - 1.0).abs() > 1e-12 {
                    return Err(Error::param(
                        "incident.direction",
                        format!("must be a unit vector (norm {n})"),
                    ));
                }
                if !(amplitude.re.is_finite() && amplitude.im.is_finite()) {
                    return Err(Error::param("incident.amplitude", "must be finite"));
                }
            }
            IncidentWave::PointSource { location, .. } => {
                if location.iter().any(|c| !c.is_finite()) {
                    return Err(Error::param("incident.location", "must be finite"));
                }
                if let Some(shape) = shape {
                    let p = Point2::new(location[0], location[1]);
                    if location[2] == 0.0
                        && (shape.contains(&p) || shape.distance_to_boundary(&p) == 0.0)
                    {
                        return Err(Error::param(
                            "incident.location",
                            "point source lies on the screen",
                        ));
                    }
                }
            }
            IncidentWave::Herglotz {
                directions,
                weights,
                density,
            } => {
                if directions.len() != weights.len() || directions.len() != density.len() {
                    return Err(Error::param(
                        "incident.density",
                        "directions, weights and density must have equal length",
                    ));
                }
                for d in directions {
                    let n = Vector3::from(*d).norm();
                    if (n - 1.0).abs() > 1e-12 {
                        return Err(Error::param("incident.directions", "must be unit vectors"));
                    }
                }
            }
            IncidentWave::Superposition { waves } => {
                for w in waves {
                    w.validate(shape)?;
                }
            }
        }
        Ok(())
    }

    /// Same wave scaled by `alpha`.
    pub fn scaled(&self, alpha: Complex64) -> Self {
        match self {
            IncidentWave::Plane {
                direction,
                amplitude,
            } => IncidentWave::Plane {
                direction: *direction,
                amplitude: amplitude * alpha,
            },
            IncidentWave::PointSource {
                location,
                amplitude,
            } => IncidentWave::PointSource {
                location: *location,
                amplitude: amplitude * alpha,
            },
            IncidentWave::Herglotz {
                directions,
                weights,
                density,
            } => IncidentWave::Herglotz {
                directions: directions.clone(),
                weights: weights.clone(),
                density: density.iter().map(|g| g * alpha).collect(),
            },
            IncidentWave::Superposition { waves } => IncidentWave::Superposition {
                waves: waves.iter().map(|w| w.scaled(alpha)).collect(),
            },
        }
    }
}
