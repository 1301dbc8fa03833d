//! The five verification suites behind the subcommands, plus shared
//! quadrature setup and the calibration preflight.

pub mod dirichlet;
pub mod energy;
pub mod geometry;
pub mod identities;
pub mod variation;

use khess::domain::build_ball_quadrature;
use khess::QuadratureRule64;

use crate::config::RunConfig;
use crate::CliError;

fn factorial(m: usize) -> f64 {
    (1..=m).map(|i| i as f64).product()
}

/// Builds the ball rule from the config and verifies it against closed
/// forms before any suite runs on it: volume, sphere area, and the
/// quadratic moment must match within `5e-3 * tol_scale` relative. A miss
/// is a calibration failure (exit 3), not a verdict failure — nothing
/// downstream is meaningful on a miscalibrated rule.
pub fn calibrated_rule(cfg: &RunConfig) -> Result<QuadratureRule64, CliError> {
    let rule = build_ball_quadrature(cfg.n, cfg.radius, cfg.radial_order, cfg.angular_count, cfg.seed)
        .map_err(|e| CliError::validation(format!("quadrature setup: {e}")))?;
    let n = cfg.n;
    let r = cfg.radius;
    let pi_n = std::f64::consts::PI.powi(n as i32);
    let volume = pi_n * r.powi(2 * n as i32) / factorial(n);
    let area = 2.0 * pi_n * r.powi(2 * n as i32 - 1) / factorial(n - 1);
    // integral of |z|^2 over the ball.
    let moment = volume * r * r * (n as f64) / (n as f64 + 1.0);
    let tol = 5e-3 * cfg.tol_scale;
    let gates = [
        ("ball volume", rule.interior_volume(), volume),
        ("sphere area", rule.boundary_area(), area),
        ("quadratic moment", rule.integrate_interior(|p| p.iter().map(|x| x * x).sum()), moment),
    ];
    for (what, got, want) in gates {
        let rel = (got - want).abs() / want.abs();
        if rel > tol {
            return Err(CliError::calibration(format!(
                "{what} off by {rel:.3e} relative (measured {got:.12e}, closed form {want:.12e}, \
                 tolerance {tol:.1e}) at radial_order={}, angular_count={}, n={n}, R={r}",
                cfg.radial_order, cfg.angular_count
            )));
        }
    }
    Ok(rule)
}
