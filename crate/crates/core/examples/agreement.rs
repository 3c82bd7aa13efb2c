//! Agreement between two measurement methods: Bland-Altman bias and limits,
//! and a Welch t-test between two subgroups of the differences.
//!
//!     cargo run --example agreement

use tremor_core::stats::{
    bland_altman, parse_pairs, subgroup_compare, welch_t_test, GroupTest, TTestVariant,
};

const PAIRS: &str = "\
cv_cm,ref_cm,skin
1.92,2.00,light
0.55,0.50,light
4.81,5.00,light
2.10,2.00,light
0.47,0.50,dark
5.22,5.00,dark
1.75,2.00,dark
9.60,10.0,dark
";

fn main() -> tremor_core::Result<()> {
    let pairs = parse_pairs(PAIRS.as_bytes())?;
    let r = bland_altman(&pairs)?;
    println!(
        "bias {:+.4} cm, sd {:.4}, limits [{:+.4}, {:+.4}]",
        r.bias_cm, r.sd_cm, r.loa_low_cm, r.loa_high_cm
    );

    let cmp = subgroup_compare(&pairs, "skin", TTestVariant::Welch)?;
    for (skin, g) in &cmp.groups {
        println!("  {skin:<6} n={} bias {:+.4}", g.n, g.bias_cm);
    }
    if let GroupTest::Compared {
        first,
        second,
        result,
    } = &cmp.test
    {
        println!(
            "{first} vs {second}: t={:.4} df={:.2} p={:.4}",
            result.t_stat, result.df, result.p_two_sided
        );
    }

    let t = welch_t_test(&[1.0, 2.0, 3.0, 4.0], &[2.0, 3.0, 4.0, 5.0])?;
    println!(
        "textbook case: t={:.4} df={} p={:.6}",
        t.t_stat, t.df, t.p_two_sided
    );
    Ok(())
}
