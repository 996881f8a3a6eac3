//! Value tables over the full subset lattice and the Harsanyi-dividend
//! transform pair.
//!
//! A [`ValueTable`] holds `v(x_T)` for every mask `T`; [`mobius_transform`]
//! turns it into the [`InteractionTable`] of effects `I(S|x)` such that
//! `v(x_T) = sum_{S subseteq T} I(S|x)` for every `T`. [`harsanyi_single`]
//! computes one effect by direct alternating-sum enumeration and is the
//! independent oracle for the fast transform; it is never used as the
//! production path.

use crate::error::{Error, Result};
use crate::exec;
use crate::subset::{check_var_count, full_mask, VariableSet};

/// A sample/baseline pair together with the mask selecting which variables
/// keep their sample value.
#[derive(Debug, Clone)]
pub struct MaskedSampleSpec {
    pub sample: Vec<f64>,
    pub baseline: Vec<f64>,
    pub mask: VariableSet,
}

impl MaskedSampleSpec {
    pub fn new(sample: Vec<f64>, baseline: Vec<f64>, mask: VariableSet) -> Result<Self> {
        if sample.len() != mask.n() {
            return Err(Error::DimensionMismatch {
                expected: mask.n(),
                got: sample.len(),
            });
        }
        if baseline.len() != mask.n() {
            return Err(Error::DimensionMismatch {
                expected: mask.n(),
                got: baseline.len(),
            });
        }
        Ok(Self {
            sample,
            baseline,
            mask,
        })
    }
}

/// Masked input: component `i` is `sample[i]` where bit `i` is set, else
/// `baseline[i]`.
pub fn apply_mask(spec: &MaskedSampleSpec) -> Vec<f64> {
    apply_mask_into(
        &spec.sample,
        &spec.baseline,
        spec.mask.mask(),
        &mut Vec::new(),
    )
}

/// Allocation-free variant used by the table builders; returns the filled
/// buffer for convenience.
pub(crate) fn apply_mask_into(
    sample: &[f64],
    baseline: &[f64],
    mask: u32,
    buf: &mut Vec<f64>,
) -> Vec<f64> {
    buf.clear();
    buf.extend(
        sample
            .iter()
            .zip(baseline)
            .enumerate()
            .map(|(i, (&x, &b))| if (mask >> i) & 1 == 1 { x } else { b }),
    );
    std::mem::take(buf)
}

/// All `2^n` masked-model outputs `v(x_T)` for one sample, indexed by mask.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueTable {
    n: usize,
    values: Vec<f64>,
}

/// All `2^n` Harsanyi effects `I(S|x)` for one sample, indexed by mask.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionTable {
    n: usize,
    effects: Vec<f64>,
}

macro_rules! table_impl {
    ($ty:ident, $field:ident, $get:ident) => {
        impl $ty {
            /// Wrap a dense table; the slice must have length `2^n` and only
            /// finite entries.
            pub fn from_vec(n: usize, $field: Vec<f64>) -> Result<Self> {
                check_var_count(n)?;
                if $field.len() != 1usize << n {
                    return Err(Error::TableLength {
                        n,
                        got: $field.len(),
                    });
                }
                if let Some(bad) = $field.iter().position(|v| !v.is_finite()) {
                    return Err(Error::NonFiniteValue { mask: bad as u32 });
                }
                Ok(Self { n, $field })
            }

            #[inline]
            pub fn n(&self) -> usize {
                self.n
            }

            #[inline]
            pub fn len(&self) -> usize {
                self.$field.len()
            }

            #[inline]
            pub fn is_empty(&self) -> bool {
                false
            }

            /// Entry for a raw mask.
            #[inline]
            pub fn $get(&self, mask: u32) -> f64 {
                self.$field[mask as usize]
            }

            #[inline]
            pub fn as_slice(&self) -> &[f64] {
                &self.$field
            }

            pub fn into_vec(self) -> Vec<f64> {
                self.$field
            }

            pub fn full_set(&self) -> VariableSet {
                VariableSet::full(self.n).expect("validated at construction")
            }
        }
    };
}

table_impl!(ValueTable, values, value);
table_impl!(InteractionTable, effects, effect);

impl ValueTable {
    /// Tabulate `value_fn` on every mask. Evaluations may run in parallel;
    /// each result lands at its mask index, so the table is identical at any
    /// thread count. A non-finite result aborts with the offending mask.
    pub fn build<F>(n: usize, value_fn: F) -> Result<Self>
    where
        F: Fn(VariableSet) -> f64 + Sync,
    {
        check_var_count(n)?;
        let values = exec::try_map_range(1usize << n, |m| {
            let set = VariableSet::new(m as u32, n).expect("mask in range");
            let v = value_fn(set);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::NonFiniteValue { mask: m as u32 })
            }
        })?;
        Ok(Self { n, values })
    }

    /// Sequential variant of [`ValueTable::build`]; same results, no fan-out.
    pub fn build_seq<F>(n: usize, mut value_fn: F) -> Result<Self>
    where
        F: FnMut(VariableSet) -> f64,
    {
        check_var_count(n)?;
        let mut values = Vec::with_capacity(1usize << n);
        for m in 0..1u64 << n {
            let set = VariableSet::new(m as u32, n).expect("mask in range");
            let v = value_fn(set);
            if !v.is_finite() {
                return Err(Error::NonFiniteValue { mask: m as u32 });
            }
            values.push(v);
        }
        Ok(Self { n, values })
    }

    /// Tabulate a model over all maskings of one sample.
    pub fn build_masked<F>(sample: &[f64], baseline: &[f64], model: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let n = sample.len();
        check_var_count(n)?;
        if baseline.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: baseline.len(),
            });
        }
        Self::build(n, |set| {
            let x = apply_mask_into(sample, baseline, set.mask(), &mut Vec::new());
            model(&x)
        })
    }
}

/// Free-function forms of the table builders, matching the operation names
/// used throughout the docs.
pub fn build_value_table<F>(value_fn: F, n: usize) -> Result<ValueTable>
where
    F: Fn(VariableSet) -> f64 + Sync,
{
    ValueTable::build(n, value_fn)
}

pub fn build_value_table_seq<F>(value_fn: F, n: usize) -> Result<ValueTable>
where
    F: FnMut(VariableSet) -> f64,
{
    ValueTable::build_seq(n, value_fn)
}

/// Fast subset-lattice Moebius transform: entry `S` of the result is
/// `sum_{T subseteq S} (-1)^{|S|-|T|} v(x_T)`, in `O(n 2^n)` operations.
/// Single-threaded per table; callers parallelise across samples.
pub fn mobius_transform(table: &ValueTable) -> InteractionTable {
    let n = table.n;
    let mut f = table.values.clone();
    for i in 0..n {
        let bit = 1usize << i;
        for m in 0..f.len() {
            if m & bit != 0 {
                f[m] -= f[m ^ bit];
            }
        }
    }
    InteractionTable { n, effects: f }
}

/// Inverse of [`mobius_transform`]: entry `T` is `sum_{S subseteq T} I(S|x)`.
pub fn zeta_transform(table: &InteractionTable) -> ValueTable {
    let n = table.n;
    let mut f = table.effects.clone();
    for i in 0..n {
        let bit = 1usize << i;
        for m in 0..f.len() {
            if m & bit != 0 {
                f[m] += f[m ^ bit];
            }
        }
    }
    ValueTable { n, values: f }
}

/// One Harsanyi effect by explicit enumeration of the `2^|S|` submasks.
/// Independent oracle for [`mobius_transform`], never the production path.
pub fn harsanyi_single(table: &ValueTable, s: VariableSet) -> f64 {
    debug_assert_eq!(table.n, s.n());
    let order = s.order() as u32;
    let mask = s.mask();
    let mut acc = 0.0;
    let mut sub = mask;
    loop {
        let sign = if (order - sub.count_ones()) & 1 == 0 {
            1.0
        } else {
            -1.0
        };
        acc += sign * table.values[sub as usize];
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & mask;
    }
    acc
}

/// Reconstruct `v(x_T)` from effects by summing `I(S|x)` over `S subseteq T`.
pub fn zeta_reconstruct(table: &InteractionTable, t: VariableSet) -> f64 {
    debug_assert_eq!(table.n, t.n());
    let mask = t.mask();
    let mut acc = 0.0;
    let mut sub = mask;
    loop {
        acc += table.effects[sub as usize];
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & mask;
    }
    acc
}

/// AND interaction function parameterised by a context `T` and amplitude `c`:
/// returns `c` on masks containing `T`, `0` otherwise. Its interaction table
/// has a single nonzero effect `c` at `T`.
pub fn and_interaction_table(context: VariableSet, c: f64) -> Result<ValueTable> {
    let t = context.mask();
    ValueTable::build_seq(context.n(), |s| {
        if t & !s.mask() == 0 {
            c
        } else {
            0.0
        }
    })
}

/// Sum of all effects equals `v(x_N)`; exposed for the self-check suite.
pub fn efficiency_gap(values: &ValueTable, effects: &InteractionTable) -> f64 {
    let total: f64 = effects.effects.iter().sum();
    total - values.values[full_mask(values.n) as usize]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn set(mask: u32, n: usize) -> VariableSet {
        VariableSet::new(mask, n).unwrap()
    }

    fn random_table(n: usize, seed: u64) -> ValueTable {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..1usize << n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        ValueTable::from_vec(n, values).unwrap()
    }

    #[test]
    fn apply_mask_componentwise() {
        let full = MaskedSampleSpec::new(vec![3.0, 4.0], vec![0.0, 0.0], set(0b11, 2)).unwrap();
        assert_eq!(apply_mask(&full), vec![3.0, 4.0]);

        let none = MaskedSampleSpec::new(vec![3.0, 4.0], vec![0.0, 0.0], set(0b00, 2)).unwrap();
        assert_eq!(apply_mask(&none), vec![0.0, 0.0]);

        // variable 0 kept, variable 1 masked
        let lo = MaskedSampleSpec::new(vec![3.0, 4.0], vec![1.0, 2.0], set(0b01, 2)).unwrap();
        assert_eq!(apply_mask(&lo), vec![3.0, 2.0]);
    }

    #[test]
    fn masked_spec_rejects_length_mismatch() {
        assert!(matches!(
            MaskedSampleSpec::new(vec![1.0], vec![0.0, 0.0], set(0b01, 2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn build_constant_and_popcount() {
        let c = ValueTable::build(2, |_| 7.5).unwrap();
        assert_eq!(c.as_slice(), &[7.5, 7.5, 7.5, 7.5]);

        let pc = ValueTable::build(2, |s| s.order() as f64).unwrap();
        assert_eq!(pc.as_slice(), &[0.0, 1.0, 1.0, 2.0]);
    }

    #[test]
    fn build_reports_non_finite_mask() {
        let err = ValueTable::build(3, |s| {
            if s.mask() == 0b101 {
                f64::NAN
            } else {
                0.0
            }
        })
        .unwrap_err();
        assert!(matches!(err, Error::NonFiniteValue { mask: 0b101 }));
    }

    #[test]
    fn build_seq_matches_build() {
        let f = |s: VariableSet| (s.mask() as f64).sin();
        let a = ValueTable::build(8, f).unwrap();
        let b = ValueTable::build_seq(8, f).unwrap();
        assert_eq!(a.as_slice(), b.as_slice());
    }

    // Hand-evaluated inclusion-exclusion: v(0)=0, v({1})=1, v({2})=2, v(both)=5.
    // I({1,2}) = 5 - 1 - 2 + 0 = 2.
    #[test]
    fn mobius_small_hand_example() {
        let v = ValueTable::from_vec(2, vec![0.0, 1.0, 2.0, 5.0]).unwrap();
        let i = mobius_transform(&v);
        assert_eq!(i.as_slice(), &[0.0, 1.0, 2.0, 2.0]);
        assert_eq!(harsanyi_single(&v, set(0b11, 2)), 2.0);
    }

    #[test]
    fn and_function_has_single_effect() {
        let ctx = set(0b011, 3);
        let v = and_interaction_table(ctx, 1.0).unwrap();
        let i = mobius_transform(&v);
        for m in 0..8u32 {
            let expected = if m == 0b011 { 1.0 } else { 0.0 };
            assert_eq!(i.effect(m), expected, "mask {m:#05b}");
        }
    }

    #[test]
    fn additive_function_has_no_high_order_effects() {
        let n = 6;
        let v = ValueTable::build(n, |s| s.vars().map(|j| (j + 1) as f64).sum()).unwrap();
        let i = mobius_transform(&v);
        for m in 0..1u32 << n {
            if m.count_ones() >= 2 {
                assert_eq!(i.effect(m), 0.0, "mask {m:#b}");
            }
        }
    }

    #[test]
    fn harsanyi_single_of_empty_set_is_baseline_value() {
        let v = random_table(5, 11);
        assert_eq!(harsanyi_single(&v, set(0, 5)), v.value(0));
    }

    #[test]
    fn oracle_agrees_with_fast_transform_n10() {
        let v = random_table(10, 42);
        let fast = mobius_transform(&v);
        for m in 0..1u32 << 10 {
            let direct = harsanyi_single(&v, set(m, 10));
            assert!(
                (direct - fast.effect(m)).abs() <= 1e-9,
                "mask {m:#b}: direct {direct} vs fast {}",
                fast.effect(m)
            );
        }
    }

    #[test]
    fn zeta_reconstruct_round_trip_n10() {
        let v = random_table(10, 7);
        let i = mobius_transform(&v);
        let scale = v.as_slice().iter().fold(1.0f64, |a, x| a.max(x.abs()));
        for m in 0..1u32 << 10 {
            let back = zeta_reconstruct(&i, set(m, 10));
            assert!(
                (back - v.value(m)).abs() <= 1e-9 * scale,
                "mask {m:#b}: {back} vs {}",
                v.value(m)
            );
        }
        // full-table inverse agrees too
        let round = zeta_transform(&i);
        for m in 0..1usize << 10 {
            assert!((round.as_slice()[m] - v.as_slice()[m]).abs() <= 1e-9 * scale);
        }
    }

    #[test]
    fn efficiency_sum_of_effects() {
        let v = random_table(8, 3);
        let i = mobius_transform(&v);
        assert!(efficiency_gap(&v, &i).abs() <= 1e-10);
    }

    #[test]
    fn table_from_vec_validation() {
        assert!(matches!(
            ValueTable::from_vec(3, vec![0.0; 7]),
            Err(Error::TableLength { n: 3, got: 7 })
        ));
        let mut vals = vec![0.0; 8];
        vals[5] = f64::INFINITY;
        assert!(matches!(
            ValueTable::from_vec(3, vals),
            Err(Error::NonFiniteValue { mask: 5 })
        ));
    }

    proptest! {
        // Round trip and oracle equivalence on random tables.
        #[test]
        fn prop_round_trip_and_oracle(n in 1usize..=8, seed in 0u64..1000) {
            let v = random_table(n, seed);
            let i = mobius_transform(&v);
            let scale = v.as_slice().iter().fold(1.0f64, |a, x| a.max(x.abs()));
            for m in 0..1u32 << n {
                let s = set(m, n);
                prop_assert!((zeta_reconstruct(&i, s) - v.value(m)).abs() <= 1e-9 * scale);
                prop_assert!((harsanyi_single(&v, s) - i.effect(m)).abs() <= 1e-9 * scale);
            }
        }

        // Linearity: transform of alpha*U + beta*V matches the combination of
        // the transforms up to float associativity.
        #[test]
        fn prop_linearity(seed in 0u64..500, alpha in -2.0f64..2.0, beta in -2.0f64..2.0) {
            let n = 6;
            let u = random_table(n, seed);
            let v = random_table(n, seed.wrapping_add(1));
            let combo: Vec<f64> = u
                .as_slice()
                .iter()
                .zip(v.as_slice())
                .map(|(&a, &b)| alpha * a + beta * b)
                .collect();
            let combined = mobius_transform(&ValueTable::from_vec(n, combo).unwrap());
            let iu = mobius_transform(&u);
            let iv = mobius_transform(&v);
            for m in 0..1usize << n {
                let expect = alpha * iu.as_slice()[m] + beta * iv.as_slice()[m];
                prop_assert!((combined.as_slice()[m] - expect).abs() <= 1e-9);
            }
        }
    }
}
