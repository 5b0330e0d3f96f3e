//! Data given as samples: a boundary velocity on `x_n = 0` with zero force
//! and divergence, written to field files and read back before solving.

use std::f64::consts::PI;
use std::sync::Arc;

use tp_stokes::halfspace::{solve, SolverOptions, StokesData};
use tp_stokes::setup::Problem;
use tp_stokes::spectral::io::{read_field, write_field};
use tp_stokes::spectral::PhysicalField;
use tp_stokes::verification::residual::residual_check;

fn main() -> tp_stokes::Result<()> {
    let problem = Problem::default();
    let grid = problem.grid()?;
    let boundary = Arc::new(grid.boundary());
    let tau = grid.tau();
    let n = grid.dim();
    // Tangential slip oscillating in time; the normal flux has zero
    // tangential mean, as compatibility requires.
    let h = PhysicalField::from_fn(boundary, n, |c, t, x, _| match c {
        0 => (2.0 * PI * t / tau).sin() * (1.0 + 0.5 * x[0].cos()),
        _ => 0.2 * (2.0 * PI * t / tau).cos() * (2.0 * x[0]).sin(),
    });
    let dir = std::env::temp_dir().join("tp-stokes-physical-data");
    std::fs::create_dir_all(&dir)?;
    write_field(&dir.join("boundary.field"), &h)?;
    let h = read_field(&dir.join("boundary.field"))?;

    let f = PhysicalField::zeros(grid.clone(), n);
    let g = PhysicalField::zeros(grid, 1);
    let data = StokesData::from_physical(&f, &g, &h)?;
    let sol = solve(&data, &SolverOptions::default())?;
    for q in &problem.q {
        let r = residual_check(&sol, &data, *q)?;
        println!("q = {q}: max relative residual {:.2e}", r.max_relative());
    }
    println!("stages: {}", sol.stages.len());
    Ok(())
}
