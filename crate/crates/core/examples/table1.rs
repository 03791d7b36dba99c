//! Prints reliability and mixed designs for the four standard BPSK-AWGN
//! setups: w_min, A_wmin, ΣP_i^SC, UB_wmin and the set difference.

use polarforge::construction::{compare_sets, construct_mixed_with_profile, DesignSpec, Strategy};
use polarforge::reliability::{GaVariant, TieBreak};
use polarforge::weight::WeightReport;

fn main() -> polarforge::Result<()> {
    let rows = [
        (7, 64, 4.0),
        (9, 256, 5.0),
        (10, 512, 3.0),
        (10, 512, 4.0),
        (15, 16384, 5.0),
    ];
    for (m, k, db) in rows {
        let spec = DesignSpec::awgn(m, k, db, Strategy::Reliability)?
            .with_ga_variant(GaVariant::Saturating {
                cap: GaVariant::TABLE_CAP,
            })
            .with_tie_break(TieBreak::SmallerIndex);
        let profile = spec.profile()?;
        let space = spec.space()?;
        let rel_set = profile.top_k(k, spec.tie_break)?;
        let rel = WeightReport::formula(&rel_set, space, &profile)?;
        let mixed = construct_mixed_with_profile(&spec, &profile)?;
        let mix = WeightReport::new(&mixed.set, space, &profile)?;
        let rel_info = polarforge::construction::construct_reliability(&spec)?;
        let cmp = compare_sets(&rel_info, &mixed, &spec.channel)?;
        println!(
            "N={} K={k} {db} dB | rel wmin={} A={} sum={:.3e} ub={:.2e} dec={} | mix wmin={} A={} sum={:.3e} ub={:.2e} | delta={}",
            space.n(), rel.wmin, rel.awmin, rel.sc_sum, rel.ub_wmin, rel.decreasing,
            mix.wmin, mix.awmin, mix.sc_sum, mix.ub_wmin, cmp.symmetric_difference.len()
        );
    }
    Ok(())
}
