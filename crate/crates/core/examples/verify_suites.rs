//! Runs the fast verification suites on a reduced problem, once as is and
//! once with the boundary pressure sign flipped.

use tp_stokes::setup::Problem;
use tp_stokes::symbols::boundary::PressureSign;
use tp_stokes::verification::suites::{run_suite, Suite, SuiteOptions};

fn main() -> tp_stokes::Result<()> {
    let problem = Problem {
        time_modes: 8,
        tangential: 32,
        ..Problem::default()
    };
    for sign in [PressureSign::Correct, PressureSign::Flipped] {
        let opts = SuiteOptions { sign, ..SuiteOptions::default() };
        println!("{sign:?}");
        for suite in [Suite::Transforms, Suite::Partition, Suite::Oracle, Suite::Identities] {
            let r = run_suite(suite, &problem, &opts)?;
            println!("  {:12} {}", suite.name(), if r.passed() { "pass" } else { "FAIL" });
            for c in r.failures().take(2) {
                println!("    {}: {:.3e} (limit {:.1e})", c.name, c.value, c.limit);
            }
        }
    }
    Ok(())
}
