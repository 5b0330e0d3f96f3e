//! Empirical constants of the maximal-regularity estimates over a small
//! seeded ensemble of random data.

use tp_stokes::halfspace::SolverOptions;
use tp_stokes::setup::Problem;
use tp_stokes::verification::estimates::estimate_sweep;
use tp_stokes::verification::suites::bundle_generator;

fn main() -> tp_stokes::Result<()> {
    let problem = Problem::default();
    let grid = problem.grid()?;
    let mut gen = bundle_generator(&problem, 7);
    let ensemble = (0..8)
        .map(|i| Ok((format!("bundle {i}"), gen.bundle().data(grid.clone())?)))
        .collect::<tp_stokes::Result<Vec<_>>>()?;
    for report in estimate_sweep(&ensemble, &problem.q, &SolverOptions::default())? {
        println!("q = {}", report.q);
        for t in &report.trials {
            let fmt = |r: Option<tp_stokes::verification::estimates::Ratio>| {
                r.map_or("-".to_string(), |r| format!("{:.4}", r.ratio))
            };
            println!("  {:10} oscillatory {:>8}  steady {:>8}", t.label, fmt(t.oscillatory), fmt(t.steady));
        }
        if let Some(s) = report.oscillatory {
            println!("  oscillatory max {:.4}, median {:.4}", s.max, s.median);
        }
    }
    Ok(())
}
