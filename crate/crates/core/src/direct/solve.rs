//! Dense LU solution of the Galerkin system.

use faer::linalg::solvers::{PartialPivLu, Solve};
use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::assembly::LinearSystem;
use super::density::Density;
use crate::error::{Error, Result};

/// Relative residual every returned solution satisfies.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;
/// Condition estimates above this are reported as ill-conditioning.
pub const CONDITION_LIMIT: f64 = 1e14;
const MAX_REFINEMENT_STEPS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub unknowns: usize,
    /// `‖S c − b‖₂ / ‖b‖₂` (zero for a zero right-hand side).
    pub residual: f64,
    /// Estimate of the 1-norm condition number.
    pub condition_estimate: f64,
    pub refinement_steps: usize,
}

/// LU factorization of a system matrix, reusable across right-hand sides.
pub struct Factorization<'a> {
    system: &'a LinearSystem,
    lu: PartialPivLu<Complex64>,
    condition_estimate: f64,
}

fn norm2(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn column(v: &[Complex64]) -> Mat<Complex64> {
    Mat::from_fn(v.len(), 1, |i, _| v[i])
}

impl<'a> Factorization<'a> {
    pub fn new(system: &'a LinearSystem) -> Result<Self> {
        if system.is_empty() {
            return Err(Error::Empty("system has no unknowns".into()));
        }
        let lu = system.matrix().partial_piv_lu();
        let mut f = Factorization {
            system,
            lu,
            condition_estimate: f64::NAN,
        };
        let estimate = one_norm(system.matrix()) * f.inverse_one_norm();
        f.condition_estimate = estimate;
        if !estimate.is_finite() || estimate > CONDITION_LIMIT {
            return Err(Error::IllConditioned {
                context: format!(
                    "{} panels, target_h {}, grading {}, k {}",
                    system.len(),
                    system.mesh().target_h(),
                    system.mesh().grading(),
                    system.k().value()
                ),
                estimate,
            });
        }
        Ok(f)
    }

    pub fn condition_estimate(&self) -> f64 {
        self.condition_estimate
    }

    /// Hager–Higham estimate of `‖A⁻¹‖₁`.
    fn inverse_one_norm(&self) -> f64 {
        let n = self.system.len();
        let mut x = Mat::from_fn(n, 1, |_, _| Complex64::new(1.0 / n as f64, 0.0));
        let mut estimate = 0.0;
        let mut last = usize::MAX;
        for _ in 0..5 {
            let mut y = x.clone();
            self.lu.solve_in_place(&mut y);
            estimate = y.col(0).iter().map(|z| z.norm()).sum::<f64>();
            let mut z = Mat::from_fn(n, 1, |i, _| {
                let v = y[(i, 0)];
                if v.norm() > 0.0 {
                    v / v.norm()
                } else {
                    Complex64::new(1.0, 0.0)
                }
            });
            self.lu.solve_adjoint_in_place(&mut z);
            let (j, zmax) = z
                .col(0)
                .iter()
                .enumerate()
                .map(|(i, v)| (i, v.norm()))
                .fold((0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
            let ztx: f64 = (0..n).map(|i| (z[(i, 0)].conj() * x[(i, 0)]).re).sum();
            if zmax <= ztx || j == last {
                break;
            }
            last = j;
            x = Mat::zeros(n, 1);
            x[(j, 0)] = Complex64::new(1.0, 0.0);
        }
        estimate
    }

    /// Solve `S c = rhs` with iterative refinement.
    pub fn solve_rhs(&self, rhs: &[Complex64]) -> Result<(Vec<Complex64>, SolveReport)> {
        let n = self.system.len();
        if rhs.len() != n {
            return Err(Error::param("rhs", "length does not match the system"));
        }
        let b = column(rhs);
        let b_norm = norm2(rhs);
        let mut x = b.clone();
        self.lu.solve_in_place(&mut x);
        let mut steps = 0;
        let mut residual = self.residual(&x, &b, b_norm);
        while residual > 1e-2 * RESIDUAL_TOLERANCE && steps < MAX_REFINEMENT_STEPS {
            let mut r = &b - self.system.matrix() * &x;
            self.lu.solve_in_place(&mut r);
            x += &r;
            steps += 1;
            let next = self.residual(&x, &b, b_norm);
            if next >= residual {
                residual = next;
                break;
            }
            residual = next;
        }
        let coefficients: Vec<Complex64> = x.col(0).iter().copied().collect();
        if !residual.is_finite() || residual > RESIDUAL_TOLERANCE {
            return Err(Error::Numerical(format!(
                "solver residual {residual:e} exceeds {RESIDUAL_TOLERANCE:e}"
            )));
        }
        Ok((
            coefficients,
            SolveReport {
                unknowns: n,
                residual,
                condition_estimate: self.condition_estimate,
                refinement_steps: steps,
            },
        ))
    }

    fn residual(&self, x: &Mat<Complex64>, b: &Mat<Complex64>, b_norm: f64) -> f64 {
        if b_norm == 0.0 {
            return x.col(0).iter().map(|z| z.norm()).fold(0.0, f64::max);
        }
        let r = b - self.system.matrix() * x;
        let r: Vec<Complex64> = r.col(0).iter().copied().collect();
        norm2(&r) / b_norm
    }

    /// Density for the system's own right-hand side.
    pub fn solve_density(&self) -> Result<(Density, SolveReport)> {
        let (c, report) = self.solve_rhs(self.system.rhs())?;
        let density = Density::new(self.system.mesh().clone(), self.system.basis(), c)?;
        Ok((density, report))
    }
}

fn one_norm(a: &Mat<Complex64>) -> f64 {
    a.col_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Solve the system, returning the density and solver diagnostics.
pub fn solve_with_report(system: &LinearSystem) -> Result<(Density, SolveReport)> {
    Factorization::new(system)?.solve_density()
}

/// Solve the system for the density.
pub fn solve(system: &LinearSystem) -> Result<Density> {
    solve_with_report(system).map(|(d, _)| d)
}
