use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::special::t_two_sided_p;
use crate::error::{Error, Result};

/// Multiplier of the SD of differences for 95% limits of agreement.
pub const LOA_Z: f64 = 1.96;

/// One measurement by both methods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodPair {
    /// Pipeline measurement.
    pub cv_cm: f64,
    /// Reference measurement.
    pub ref_cm: f64,
    #[serde(default)]
    pub labels: BTreeMap<String, String>,
}

impl MethodPair {
    pub fn new(cv_cm: f64, ref_cm: f64) -> Self {
        Self {
            cv_cm,
            ref_cm,
            labels: BTreeMap::new(),
        }
    }

    pub fn with_label(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.labels.insert(key.into(), value.into());
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("cv_cm", self.cv_cm), ("ref_cm", self.ref_cm)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(format!(
                    "{name} must be finite and >= 0, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// `cv - ref`
    pub fn difference(&self) -> f64 {
        self.cv_cm - self.ref_cm
    }

    pub fn mean(&self) -> f64 {
        0.5 * (self.cv_cm + self.ref_cm)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgreementResult {
    pub n: usize,
    pub bias_cm: f64,
    pub sd_cm: f64,
    pub loa_low_cm: f64,
    pub loa_high_cm: f64,
}

impl AgreementResult {
    pub fn loa_half_width(&self) -> f64 {
        0.5 * (self.loa_high_cm - self.loa_low_cm)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TTestVariant {
    /// Unequal variances, Welch-Satterthwaite degrees of freedom.
    #[default]
    Welch,
    /// Equal variances, pooled estimate, `n_a + n_b - 2` degrees of freedom.
    Pooled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub variant: TTestVariant,
    pub t_stat: f64,
    pub df: f64,
    pub p_two_sided: f64,
    pub group_means: (f64, f64),
    pub group_ns: (usize, usize),
}

fn mean_var(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let ss: f64 = v.iter().map(|x| (x - mean).powi(2)).sum();
    (mean, ss / (n - 1.0))
}

/// Bias and 95% limits of agreement of `cv - ref`.
pub fn bland_altman(pairs: &[MethodPair]) -> Result<AgreementResult> {
    if pairs.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: pairs.len(),
        });
    }
    for p in pairs {
        p.validate()?;
    }
    let diffs: Vec<f64> = pairs.iter().map(MethodPair::difference).collect();
    Ok(agreement_of(&diffs))
}

fn agreement_of(diffs: &[f64]) -> AgreementResult {
    let (bias, var) = mean_var(diffs);
    let sd = var.sqrt();
    AgreementResult {
        n: diffs.len(),
        bias_cm: bias,
        sd_cm: sd,
        loa_low_cm: bias - LOA_Z * sd,
        loa_high_cm: bias + LOA_Z * sd,
    }
}

pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<TTestResult> {
    t_test(a, b, TTestVariant::Welch)
}

/// Two-sample t-test of `mean(a) - mean(b)`.
pub fn t_test(a: &[f64], b: &[f64], variant: TTestVariant) -> Result<TTestResult> {
    let short = a.len().min(b.len());
    if short < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: short,
        });
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::invalid("t-test samples must be finite"));
    }
    let (ma, va) = mean_var(a);
    let (mb, vb) = mean_var(b);
    if va == 0.0 && vb == 0.0 {
        return Err(Error::DegenerateVariance);
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (se2, df) = match variant {
        TTestVariant::Welch => {
            let (sa, sb) = (va / na, vb / nb);
            let df = (sa + sb).powi(2) / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
            (sa + sb, df)
        }
        TTestVariant::Pooled => {
            let df = na + nb - 2.0;
            let pooled = ((na - 1.0) * va + (nb - 1.0) * vb) / df;
            (pooled * (1.0 / na + 1.0 / nb), df)
        }
    };
    let t = (ma - mb) / se2.sqrt();
    Ok(TTestResult {
        variant,
        t_stat: t,
        df,
        p_two_sided: t_two_sided_p(t, df),
        group_means: (ma, mb),
        group_ns: (a.len(), b.len()),
    })
}

/// Outcome of the between-group test in [`subgroup_compare`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum GroupTest {
    /// Only one group: nothing to compare.
    SingleGroup,
    Compared {
        /// Group whose differences form the first sample.
        first: String,
        second: String,
        result: TTestResult,
    },
    /// More than two groups; per-group agreement is still reported.
    Unsupported { reason: String },
    /// The test could not be computed (e.g. both groups constant).
    Failed { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubgroupComparison {
    pub label_key: String,
    pub groups: BTreeMap<String, AgreementResult>,
    pub test: GroupTest,
}

/// Per-group Bland-Altman plus a t-test between the groups' differences.
pub fn subgroup_compare(
    pairs: &[MethodPair],
    label_key: &str,
    variant: TTestVariant,
) -> Result<SubgroupComparison> {
    let mut diffs: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for (i, p) in pairs.iter().enumerate() {
        p.validate()?;
        let value = p
            .labels
            .get(label_key)
            .ok_or_else(|| Error::invalid(format!("pair {i} has no `{label_key}` label")))?;
        diffs.entry(value.clone()).or_default().push(p.difference());
    }
    if diffs.is_empty() {
        return Err(Error::InsufficientData { needed: 2, got: 0 });
    }

    let mut groups = BTreeMap::new();
    for (value, d) in &diffs {
        if d.len() < 2 {
            return Err(Error::InsufficientData {
                needed: 2,
                got: d.len(),
            });
        }
        groups.insert(value.clone(), agreement_of(d));
    }

    let test = match diffs.len() {
        1 => GroupTest::SingleGroup,
        2 => {
            let mut it = diffs.iter();
            let (first, a) = it.next().expect("two groups");
            let (second, b) = it.next().expect("two groups");
            match t_test(a, b, variant) {
                Ok(result) => GroupTest::Compared {
                    first: first.clone(),
                    second: second.clone(),
                    result,
                },
                Err(e) => GroupTest::Failed {
                    reason: e.to_string(),
                },
            }
        }
        _ => GroupTest::Unsupported {
            reason: Error::UnsupportedGrouping {
                groups: diffs.keys().cloned().collect(),
            }
            .to_string(),
        },
    };
    Ok(SubgroupComparison {
        label_key: label_key.to_string(),
        groups,
        test,
    })
}
