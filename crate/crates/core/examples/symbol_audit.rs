//! Marcinkiewicz audit: suprema of `prod |z_j| |d_{z_j} m|` over a dyadic
//! lattice for the solver's multipliers, plus one unbounded control.

use tp_stokes::symbols::audit::{marcinkiewicz_audit, standard_symbols, unbounded_example, AuditLattice};

fn main() -> tp_stokes::Result<()> {
    let lattice = AuditLattice { per_octave: 2, ..AuditLattice::default() };
    for (name, symbol) in standard_symbols().into_iter().take(5) {
        let r = marcinkiewicz_audit(&name, 1, &symbol, &lattice)?;
        println!("{name:26} sup {:.6}, growth {:.4}, divergent {}", r.max_sup(), r.growth, r.divergent);
    }
    let r = marcinkiewicz_audit("inverse |xi|", 1, &unbounded_example(), &lattice)?;
    println!("{:26} sup {:.3e}, growth {:.4}, divergent {}", r.symbol, r.max_sup(), r.growth, r.divergent);
    Ok(())
}
