//! Anisotropic Besov norms from the parabolic dyadic decomposition. A
//! datum supported in one shell `l` has norm `2^{s l}` times its `L^q` norm.

use std::f64::consts::PI;

use tp_stokes::setup::Problem;
use tp_stokes::spectral::norms::{besov_norm, besov_shells, lq_norm_pieces};
use tp_stokes::spectral::transform::forward;
use tp_stokes::spectral::PhysicalField;
use tp_stokes::symbols::partition::ParabolicScale;

fn main() -> tp_stokes::Result<()> {
    let problem = Problem::default();
    let boundary = std::sync::Arc::new(problem.grid()?.boundary());
    let tau = boundary.tau();
    // Time frequency 4 and tangential wavenumber 1: rho = (16 + 1)^{1/4}.
    let h = forward(&PhysicalField::from_fn(boundary.clone(), 1, |_, t, x, _| {
        (8.0 * PI * t / tau).cos() * x[0].cos() + 0.3 * (2.0 * PI * t / tau).sin()
    }));
    let scale = ParabolicScale::parabolic();
    for q in [2.0, 4.0] {
        let s = 2.0 - 1.0 / q;
        println!("q = {q}, s = {s}");
        for (l, w) in besov_shells(&h, s, q, scale)? {
            if w > 0.0 {
                println!("  shell {l:3}: {w:.6e}");
            }
        }
        let lq = lq_norm_pieces(std::slice::from_ref(&h), q)?;
        println!("  Besov {:.6e}, L^q {:.6e}", besov_norm(&h, s, q, scale)?, lq);
    }
    Ok(())
}
