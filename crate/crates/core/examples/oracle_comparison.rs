//! Closed-form boundary-layer profiles of one Fourier mode against an
//! independent finite-difference solve of the same ODE system.

use num_complex::Complex64;
use tp_stokes::symbols::boundary::PressureSign;
use tp_stokes::symbols::ModePoint;
use tp_stokes::verification::oracle::{compare_mode, OracleGrid};

fn main() -> tp_stokes::Result<()> {
    let h_tan = [Complex64::new(1.0, 0.5)];
    let h_n = Complex64::new(-0.3, 0.2);
    for (eta, xi) in [(1.0, 1.0), (8.0, 0.5), (0.5, 6.0), (-3.0, 2.0)] {
        let mode = ModePoint::new(eta, vec![xi]);
        for sign in [PressureSign::Correct, PressureSign::Flipped] {
            let c = compare_mode(&mode, &h_tan, h_n, sign, OracleGrid::default())?;
            println!(
                "eta {eta:5}, xi {xi:4}, {sign:?}: relative error {:.2e}, oracle order {:.3}",
                c.relative_error, c.order
            );
        }
    }
    Ok(())
}
