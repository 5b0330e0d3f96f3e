//! Averaged Fourier transform on the time-space grid and the split into
//! steady and purely oscillatory parts.

use std::f64::consts::PI;

use tp_stokes::setup::Problem;
use tp_stokes::spectral::transform::{forward, inverse, oscillatory_part, steady_part};
use tp_stokes::spectral::PhysicalField;

fn main() -> tp_stokes::Result<()> {
    let grid = Problem::default().grid()?;
    let u = PhysicalField::from_fn(grid.clone(), 1, |_, t, x, xn| {
        (1.0 + (2.0 * PI * t / grid.tau()).cos() + (3.0 * x[0]).sin()) * (-xn).exp()
    });
    let hat = forward(&u);
    let back = inverse(&hat)?;
    let err = u.data().iter().zip(back.data()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("round trip max error {err:.2e}");

    let steady = steady_part(&hat);
    let osc = oscillatory_part(&hat);
    let sum = steady.add(&osc)?.sub(&hat)?.max_abs();
    println!("steady + oscillatory - u: {sum:.2e}");
    println!("oscillatory part of the steady part: {:.2e}", oscillatory_part(&steady).max_abs());
    // At x_n = 0 the steady part is 1 + sin(3 x).
    let s = inverse(&steady)?;
    println!("steady part at the first sample: {:.6}", s.data()[0]);
    Ok(())
}
