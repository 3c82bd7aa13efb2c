//! Methods-agreement statistics: Bland-Altman bias and limits of agreement,
//! two-sample t-tests, and the Bland-Altman plot.

mod agreement;
mod pairs;
mod plot;
pub mod special;

pub use agreement::{
    bland_altman, subgroup_compare, t_test, welch_t_test, AgreementResult, GroupTest, MethodPair,
    SubgroupComparison, TTestResult, TTestVariant, LOA_Z,
};
pub use pairs::{parse_pairs, serialize_pairs};
pub use plot::bland_altman_svg;
