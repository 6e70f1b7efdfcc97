//! Homology of the model complex as a module over `T` and `U`, element
//! arithmetic, the `E^2` page, and the cyclicity decision procedure.

mod cyclic;
pub(crate) mod homology;
pub mod pid;
mod presentation;

pub use cyclic::{
    divisors, find_u_cyclic_class, find_u_cyclic_class_from, is_cyclic_for, is_u_cyclic, operator_label, CyclicWitness,
    CyclicityReport, Verdict,
};
pub use homology::{
    cokernel_module, e2_page, e2_page_with, homology, homology_with, sigma_class, HomologyOptions, Part,
};
pub use presentation::{HClass, ModuleInvariants, PresentedUModule, RawPresentation, Variable};

use crate::complex::ChainComplex;
use crate::error::Result;

/// Outcome of [`check_assoc_graded_u`].
#[derive(Clone, Debug, serde::Serialize)]
pub struct AssocGradedReport {
    pub lowers_filtration: bool,
    pub annihilated: bool,
    /// Smallest `j` with `(1 - U^N)^j = 0` on the total homology.
    pub nilpotency: Option<u32>,
    pub height: u32,
}

impl AssocGradedReport {
    pub fn holds(&self) -> bool {
        self.lowers_filtration && self.annihilated
    }
}

/// Checks that `U - T^-1` strictly lowers the Morse filtration on cycle
/// representatives and that `(1 - U^N)^(b1 + 1)` vanishes on homology.
pub fn check_assoc_graded_u(cx: &ChainComplex) -> Result<AssocGradedReport> {
    let height = cx.b1() as u32 + 1;
    let (w, _) = homology::working(cx)?;
    let cx = &*w;
    let mut lowers = true;
    if let Some(p) = cx.perturbation() {
        for part in [Part::Even, Part::Odd] {
            let m = homology_with(cx, part, HomologyOptions { power: None, check_stability: false })?;
            let (blocks, size) = m.block_morse().expect("chain-level module");
            let a = crate::complex::TruncatedRing::new(cx.n_value(), m.power());
            let parity = if part == Part::Even { crate::complex::Parity::Even } else { crate::complex::Parity::Odd };
            let idx = cx.parity_indices(parity);
            let pm = a.realize(&p.select(&idx, &idx))?;
            let level = |v: &[num_bigint::BigInt]| {
                (0..blocks.len())
                    .filter(|&b| v[b * size..(b + 1) * size].iter().any(|x| !num_traits::Zero::is_zero(x)))
                    .map(|b| blocks[b])
                    .max()
            };
            for z in m.cycle_basis().expect("chain-level module") {
                let pz = pm.mul_vec(z);
                if let (Some(lp), Some(lz)) = (level(&pz), level(z)) {
                    if lp >= lz {
                        lowers = false;
                    }
                }
            }
        }
    }
    let total = homology(cx, Part::Total)?;
    let nil = total.nilpotency(Variable::U, height + 1);
    Ok(AssocGradedReport {
        lowers_filtration: lowers,
        annihilated: nil.is_some_and(|j| j <= height),
        nilpotency: nil,
        height,
    })
}
