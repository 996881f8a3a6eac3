//! Salient-concept extraction, sparsity curves, and order histograms.
//!
//! A concept is salient when its effect strength `|I(S|x)|` exceeds a
//! threshold; the default threshold is a fixed ratio (0.05) of the maximum
//! strength in the table.

use crate::error::{Error, Result};
use crate::lattice::{InteractionTable, ValueTable};
use crate::subset::VariableSet;

/// Default threshold ratio for salient-concept extraction.
pub const DEFAULT_SALIENCE_RATIO: f64 = 0.05;

/// Concepts whose strength strictly exceeds `threshold`, sorted by descending
/// strength with ties broken by ascending mask value.
#[derive(Debug, Clone)]
pub struct SalientSet {
    threshold: f64,
    n: usize,
    entries: Vec<(u32, f64)>,
}

impl SalientSet {
    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `(mask, effect)` pairs, strongest first.
    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn contains(&self, mask: u32) -> bool {
        self.entries.iter().any(|&(m, _)| m == mask)
    }

    /// Sum of `|I(S|x)|` over all non-salient concepts; upper bound for every
    /// reconstruction residual.
    pub fn excluded_strength(&self, table: &InteractionTable) -> f64 {
        let included: f64 = self.entries.iter().map(|&(_, e)| e.abs()).sum();
        let total: f64 = table.as_slice().iter().map(|e| e.abs()).sum();
        (total - included).max(0.0)
    }
}

/// `ratio * max_S |I(S|x)|`; zero for an all-zero table.
pub fn relative_threshold(table: &InteractionTable, ratio: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&ratio) {
        return Err(Error::InvalidConfig(format!(
            "salience ratio {ratio} outside [0, 1]"
        )));
    }
    let max = table.as_slice().iter().fold(0.0f64, |a, e| a.max(e.abs()));
    Ok(ratio * max)
}

/// Extract concepts with `|I(S|x)| > tau_sal` (strict inequality; ties at the
/// threshold are excluded).
pub fn extract_salient(table: &InteractionTable, tau_sal: f64) -> Result<SalientSet> {
    if !(tau_sal >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "salience threshold {tau_sal} must be >= 0"
        )));
    }
    let mut entries: Vec<(u32, f64)> = table
        .as_slice()
        .iter()
        .enumerate()
        .filter(|(_, e)| e.abs() > tau_sal)
        .map(|(m, &e)| (m as u32, e))
        .collect();
    entries.sort_by(|a, b| {
        b.1.abs()
            .partial_cmp(&a.1.abs())
            .expect("finite effects")
            .then(a.0.cmp(&b.0))
    });
    Ok(SalientSet {
        threshold: tau_sal,
        n: table.n(),
        entries,
    })
}

/// Residual `eps_T = v(x_T) - sum_{S subseteq T, S salient} I(S|x)`:
/// the summed effect of all non-salient concepts inside `T`.
pub fn reconstruction_residual(
    values: &ValueTable,
    salient: &SalientSet,
    t: VariableSet,
) -> Result<f64> {
    if values.n() != salient.n || values.n() != t.n() {
        return Err(Error::DimensionMismatch {
            expected: values.n(),
            got: salient.n.max(t.n()),
        });
    }
    let t_mask = t.mask();
    let mut approx = 0.0;
    for &(m, e) in &salient.entries {
        if m & !t_mask == 0 {
            approx += e;
        }
    }
    Ok(values.value(t_mask) - approx)
}

/// Counts of salient concepts per order; `counts[s]` is the number of salient
/// concepts with `|S| = s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderHistogram {
    pub counts: Vec<usize>,
}

pub fn order_histogram(salient: &SalientSet, n: usize) -> OrderHistogram {
    let mut counts = vec![0usize; n + 1];
    for &(m, _) in &salient.entries {
        counts[m.count_ones() as usize] += 1;
    }
    OrderHistogram { counts }
}

/// All `2^n` strengths `|I(S|x)|` sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsityCurve {
    pub strengths: Vec<f64>,
}

pub fn sparsity_curve(table: &InteractionTable) -> SparsityCurve {
    let mut strengths: Vec<f64> = table.as_slice().iter().map(|e| e.abs()).collect();
    strengths.sort_by(|a, b| b.partial_cmp(a).expect("finite strengths"));
    SparsityCurve { strengths }
}

impl SparsityCurve {
    /// Fraction of entries strictly below `ratio * max`.
    pub fn fraction_below_ratio(&self, ratio: f64) -> f64 {
        let max = self.strengths.first().copied().unwrap_or(0.0);
        if max == 0.0 {
            return 0.0;
        }
        let cutoff = ratio * max;
        let below = self.strengths.iter().filter(|&&s| s < cutoff).count();
        below as f64 / self.strengths.len() as f64
    }
}
