//! Solves for the data of each catalogue recipe and compares with the
//! exact solution.

use tp_stokes::halfspace::{solve, SolverOptions};
use tp_stokes::setup::Problem;
use tp_stokes::spectral::norms::lq_norm_pieces;
use tp_stokes::spectral::SpectralField;
use tp_stokes::verification::manufactured::{catalogue_for, manufactured};
use tp_stokes::verification::residual::residual_check;

fn main() -> tp_stokes::Result<()> {
    let problem = Problem::default();
    let grid = problem.grid()?;
    for recipe in catalogue_for(problem.n) {
        let m = manufactured(&recipe, grid.clone())?;
        let sol = solve(&m.data, &SolverOptions::default())?;
        let rel = |a: &SpectralField, b: &SpectralField| -> tp_stokes::Result<f64> {
            let size = lq_norm_pieces(std::slice::from_ref(b), 2.0)?;
            let err = lq_norm_pieces(&[a.sub(b)?], 2.0)?;
            Ok(if size > 0.0 { err / size } else { err })
        };
        let eu = rel(sol.velocity.value(), m.velocity.value())?;
        let residual = residual_check(&sol, &m.data, 2.0)?.max_relative();
        println!("{:16} velocity error {eu:.2e}, max relative residual {residual:.2e}", recipe.name);
    }
    Ok(())
}

