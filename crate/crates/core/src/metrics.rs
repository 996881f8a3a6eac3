//! Similarity and strength metrics over interaction tables.
//!
//! Effect distributions are compared with a Jaccard similarity on
//! non-negatively split vectors: a length-`d` effect vector becomes the
//! length-`2d` vector `[max(v,0), -min(v,0)]` and two such vectors score
//! `|min(a,b)|_1 / |max(a,b)|_1`.
//!
//! Two averaging conventions are used deliberately: train/test
//! generalization similarity averages effects over samples per category
//! before comparing, while learning progress compares per-sample vectors and
//! averages the similarities.

use crate::error::{Error, Result};
use crate::lattice::{InteractionTable, ValueTable};
use crate::subset::{binomial, subsets_of_order};
use std::collections::BTreeMap;

/// Mean effects of all `C(n,m)` subsets of one order, in ascending mask
/// order so vectors from different runs align.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderEffectVector {
    order: usize,
    n: usize,
    entries: Vec<f64>,
}

impl OrderEffectVector {
    pub fn from_entries(n: usize, order: usize, entries: Vec<f64>) -> Result<Self> {
        let d = binomial(n as u64, order as u64) as usize;
        if entries.len() != d {
            return Err(Error::LengthMismatch {
                left: entries.len(),
                right: d,
            });
        }
        Ok(Self { order, n, entries })
    }

    /// The `m`-order slice of one table, ascending mask order.
    pub fn from_table(table: &InteractionTable, order: usize) -> Self {
        let entries = subsets_of_order(table.n(), order)
            .map(|m| table.effect(m))
            .collect();
        Self {
            order,
            n: table.n(),
            entries,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }
}

/// Entrywise mean of the `m`-order effects over a set of tables.
pub fn mean_effect_vector(tables: &[InteractionTable], order: usize) -> Result<OrderEffectVector> {
    let first = tables.first().ok_or(Error::EmptyInput("table list"))?;
    let n = first.n();
    if let Some(bad) = tables.iter().find(|t| t.n() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: bad.n(),
        });
    }
    let masks: Vec<u32> = subsets_of_order(n, order).collect();
    let inv = 1.0 / tables.len() as f64;
    let entries = masks
        .iter()
        .map(|&m| tables.iter().map(|t| t.effect(m)).sum::<f64>() * inv)
        .collect();
    Ok(OrderEffectVector { order, n, entries })
}

/// Non-negative split `[max(v,0), -min(v,0)]` of an effect vector.
#[derive(Debug, Clone, PartialEq)]
pub struct NonNegSplit {
    entries: Vec<f64>,
}

impl NonNegSplit {
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Reconstruct the original vector: `first_half - second_half`.
    pub fn reconstruct(&self) -> Vec<f64> {
        let d = self.entries.len() / 2;
        (0..d)
            .map(|i| self.entries[i] - self.entries[d + i])
            .collect()
    }
}

pub fn nonneg_extend(v: &OrderEffectVector) -> NonNegSplit {
    nonneg_extend_slice(&v.entries)
}

pub fn nonneg_extend_slice(v: &[f64]) -> NonNegSplit {
    let mut entries = Vec::with_capacity(2 * v.len());
    entries.extend(v.iter().map(|&x| x.max(0.0)));
    entries.extend(v.iter().map(|&x| (-x).max(0.0)));
    NonNegSplit { entries }
}

/// `|min(a,b)|_1 / |max(a,b)|_1`. Both-zero vectors count as identical
/// distributions and score 1.
pub fn jaccard_similarity(a: &NonNegSplit, b: &NonNegSplit) -> Result<f64> {
    if a.entries.len() != b.entries.len() {
        return Err(Error::LengthMismatch {
            left: a.entries.len(),
            right: b.entries.len(),
        });
    }
    let mut lo = 0.0;
    let mut hi = 0.0;
    for (&x, &y) in a.entries.iter().zip(&b.entries) {
        lo += x.min(y);
        hi += x.max(y);
    }
    if hi == 0.0 {
        Ok(1.0)
    } else {
        Ok(lo / hi)
    }
}

/// Tables grouped by category label.
pub type CategoryTables = BTreeMap<String, Vec<InteractionTable>>;

/// Mean over categories of the Jaccard similarity between the
/// sample-averaged `m`-order effect vectors of two sides.
pub fn generalization_similarity(
    train: &CategoryTables,
    test: &CategoryTables,
    order: usize,
) -> Result<f64> {
    if train.is_empty() {
        return Err(Error::EmptyInput("train categories"));
    }
    for c in train.keys() {
        if !test.contains_key(c) {
            return Err(Error::CategoryMismatch(c.clone()));
        }
    }
    for c in test.keys() {
        if !train.contains_key(c) {
            return Err(Error::CategoryMismatch(c.clone()));
        }
    }
    let mut acc = 0.0;
    for (c, train_tables) in train {
        let a = nonneg_extend(&mean_effect_vector(train_tables, order)?);
        let b = nonneg_extend(&mean_effect_vector(&test[c], order)?);
        acc += jaccard_similarity(&a, &b)?;
    }
    Ok(acc / train.len() as f64)
}

/// Per-order interaction strength normalised by the mean output span:
/// `E_x E_{|S|=m} |I(S|x)|  /  E_x |v(x_N) - v(x_empty)|`.
pub fn normalized_order_strength(
    tables: &[InteractionTable],
    values: &[ValueTable],
    order: usize,
) -> Result<f64> {
    if tables.is_empty() {
        return Err(Error::EmptyInput("table list"));
    }
    if tables.len() != values.len() {
        return Err(Error::LengthMismatch {
            left: tables.len(),
            right: values.len(),
        });
    }
    let n = tables[0].n();
    let masks: Vec<u32> = subsets_of_order(n, order).collect();
    let mut strength = 0.0;
    for t in tables {
        let per_subset: f64 = masks.iter().map(|&m| t.effect(m).abs()).sum();
        strength += per_subset / masks.len() as f64;
    }
    strength /= tables.len() as f64;

    let full = crate::subset::full_mask(n);
    let span: f64 = values
        .iter()
        .map(|v| (v.value(full) - v.value(0)).abs())
        .sum::<f64>()
        / values.len() as f64;
    if span == 0.0 {
        return Err(Error::Degenerate(
            "mean |v(x_N) - v(x_empty)| is zero; model output does not separate full and empty masks",
        ));
    }
    Ok(strength / span)
}

/// Learning progress: mean over samples of the Jaccard similarity between
/// the per-sample `m`-order effect vectors at a snapshot and at convergence.
pub fn learning_progress(
    snapshot: &[InteractionTable],
    final_tables: &[InteractionTable],
    order: usize,
) -> Result<f64> {
    if snapshot.is_empty() {
        return Err(Error::EmptyInput("snapshot tables"));
    }
    if snapshot.len() != final_tables.len() {
        return Err(Error::LengthMismatch {
            left: snapshot.len(),
            right: final_tables.len(),
        });
    }
    let mut acc = 0.0;
    for (s, f) in snapshot.iter().zip(final_tables) {
        let a = nonneg_extend(&OrderEffectVector::from_table(s, order));
        let b = nonneg_extend(&OrderEffectVector::from_table(f, order));
        acc += jaccard_similarity(&a, &b)?;
    }
    Ok(acc / snapshot.len() as f64)
}
