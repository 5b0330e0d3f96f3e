//! The smooth dyadic partition in the parabolic scale `(eta^2 + |xi|^4)^{1/4}`.

use tp_stokes::symbols::partition::{shell_range, shell_weight, ParabolicScale};

fn main() {
    let scale = ParabolicScale::parabolic();
    for (eta, xi) in [(0.0, 0.3), (1.0, 1.0), (40.0, 2.0), (1e4, 0.0)] {
        let rho = scale.eval(eta, &[xi]);
        let weights: Vec<(i32, f64)> = shell_range(rho, rho)
            .map(|l| (l, shell_weight(l, rho)))
            .filter(|(_, w)| *w > 0.0)
            .collect();
        let total: f64 = weights.iter().map(|(_, w)| w).sum();
        println!("eta {eta:8}, xi {xi:4}: rho {rho:.4}, shells {weights:?}, sum - 1 = {:.1e}", total - 1.0);
    }
}
