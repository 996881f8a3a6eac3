//! Polynomial value functions with closed-form interaction effects.
//!
//! A [`PolynomialValueFunction`] is an explicit sum of monomial terms in
//! `(x_i - b_i)`; the effect of a subset `S` is then the sum of the terms
//! whose degree-vector support is exactly `S`, evaluated at the input. This
//! closed form is cross-checked against the lattice transform of the
//! tabulated masked values.

use crate::error::{Error, Result};
use crate::lattice::ValueTable;
use crate::subset::{check_var_count, VariableSet};

/// Non-negative integer degree per variable; the support (variables with
/// positive degree) determines which subset the term contributes to.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DegreeVector(Vec<u32>);

impl DegreeVector {
    pub fn new(degrees: Vec<u32>) -> Self {
        Self(degrees)
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn degrees(&self) -> &[u32] {
        &self.0
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Mask of variables with positive degree.
    pub fn support_mask(&self) -> u32 {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &k)| k > 0)
            .fold(0u32, |acc, (i, _)| acc | (1 << i))
    }

    pub fn support(&self) -> Result<VariableSet> {
        VariableSet::new(self.support_mask(), self.n())
    }
}

/// `v(x) = constant + sum_j coeff_j * prod_i (x_i - b_i)^{k_i}` with the
/// coefficient absorbing the multinomial factor and derivative of a Taylor
/// term.
#[derive(Debug, Clone)]
pub struct PolynomialValueFunction {
    n: usize,
    baseline: Vec<f64>,
    constant: f64,
    terms: Vec<(DegreeVector, f64)>,
}

impl PolynomialValueFunction {
    pub fn new(
        baseline: Vec<f64>,
        constant: f64,
        terms: Vec<(DegreeVector, f64)>,
    ) -> Result<Self> {
        let n = baseline.len();
        check_var_count(n)?;
        for (i, (k, _)) in terms.iter().enumerate() {
            if k.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: k.n(),
                });
            }
            if terms[..i].iter().any(|(other, _)| other == k) {
                return Err(Error::InvalidConfig(format!(
                    "duplicate degree vector {:?}",
                    k.degrees()
                )));
            }
        }
        Ok(Self {
            n,
            baseline,
            constant,
            terms,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn baseline(&self) -> &[f64] {
        &self.baseline
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.n);
        let mut acc = self.constant;
        for (k, coeff) in &self.terms {
            acc += coeff * monomial(x, &self.baseline, k);
        }
        acc
    }

    /// Tabulate `v(x_T)` over all masks, masking with this function's own
    /// baseline.
    pub fn value_table(&self, x: &[f64]) -> Result<ValueTable> {
        ValueTable::build_masked(x, &self.baseline, |masked| self.evaluate(masked))
    }

    /// Closed-form effect of `S`: sum over terms whose support is exactly `S`
    /// of `coeff * prod_{i in S}(x_i - b_i)^{k_i}`.
    pub fn harsanyi_closed_form(&self, s: VariableSet, x: &[f64]) -> f64 {
        let target = s.mask();
        let mut acc = if target == 0 { self.constant } else { 0.0 };
        for (k, coeff) in &self.terms {
            if k.support_mask() == target {
                acc += coeff * monomial(x, &self.baseline, k);
            }
        }
        acc
    }
}

fn monomial(x: &[f64], baseline: &[f64], k: &DegreeVector) -> f64 {
    let mut acc = 1.0;
    for (i, &deg) in k.degrees().iter().enumerate() {
        if deg > 0 {
            acc *= (x[i] - baseline[i]).powi(deg as i32);
        }
    }
    acc
}

/// Random polynomial with terms of bounded total degree; used by tests and
/// the self-check suite.
pub fn random_polynomial(
    n: usize,
    max_total_degree: u32,
    num_terms: usize,
    rng: &mut impl rand::Rng,
) -> PolynomialValueFunction {
    let baseline: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let constant = rng.gen_range(-1.0..1.0);
    let mut terms: Vec<(DegreeVector, f64)> = Vec::new();
    while terms.len() < num_terms {
        let total = rng.gen_range(1..=max_total_degree);
        let mut degrees = vec![0u32; n];
        for _ in 0..total {
            degrees[rng.gen_range(0..n)] += 1;
        }
        let k = DegreeVector::new(degrees);
        if terms.iter().any(|(other, _)| *other == k) {
            continue;
        }
        let coeff = rng.gen_range(-1.0..1.0);
        terms.push((k, coeff));
    }
    PolynomialValueFunction::new(baseline, constant, terms).expect("construction is valid")
}
