//! Weight filtrations of M, L_beta and L_sbar on SH with n = 2, b2 = 6:
//! Gr^M dimensions against the bigrading, and the perverse and conjugate
//! Hodge cross-checks.

use hklab::filtration::{compare_gr_dims, conjugate_hodge_check, crosscheck_perverse_weight, graded_weight_filtration};
use hklab::verifier::{Instance, InstanceConfig};

fn main() -> hklab::Result<()> {
    let inst = Instance::build(&InstanceConfig::standard(2, 6, 0))?;
    let d = &inst.data;
    let wm = graded_weight_filtration(&d.m, 2)?;
    for (deg, w) in wm.iter().enumerate().filter(|(deg, _)| deg % 2 == 0) {
        println!("Gr^M H^{deg}: {:?}", w.gr_dims());
    }
    let cmp = compare_gr_dims(&wm, &d.big);
    print!("{}", cmp.monodromy.render_text("deg", "W"));
    println!("Gr^M agrees with the bigrading: {}", cmp.holds);
    println!("W(L_beta) matches the perverse filtration: {}", crosscheck_perverse_weight(&d.ops.l_beta, 2)?);
    println!("W(L_sbar) matches the conjugate Hodge filtration: {}", conjugate_hodge_check(&d.ops.l_sbar, &d.big)?);
    Ok(())
}
