//! Shifted masking baselines, standard AND interactions under Gaussian input
//! noise, their closed-form second moments, and the per-order effect-variance
//! scan.
//!
//! The shifted baseline places each variable's masking value a fixed distance
//! `tau_shift` from its sample value, on the side of the data mean. With that
//! construction, the standard AND interaction
//! `pi_hat(kappa|x') = prod_i (sign(x_i - b_i)/tau)^{k_i} (x'_i - b_i)^{k_i}`
//! equals 1 at the unperturbed input, and its moments under
//! `x' = x + eps, eps ~ N(0, delta^2 I)` have the closed forms checked here by
//! Monte Carlo.

use crate::error::{Error, Result};
use crate::exec;
use crate::lattice::{mobius_transform, InteractionTable, ValueTable};
use crate::poly::DegreeVector;
use crate::stats;
use crate::subset::{binomial, check_var_count, subsets_of_order};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;

/// Baseline rule `b_i = x_i + tau_shift` when `x_i < mu_i`, else
/// `b_i = x_i - tau_shift` (ties at the mean take the minus branch).
#[derive(Debug, Clone)]
pub struct ShiftedBaseline {
    pub tau_shift: f64,
    pub mu: Vec<f64>,
}

impl ShiftedBaseline {
    pub fn new(tau_shift: f64, mu: Vec<f64>) -> Result<Self> {
        if !(tau_shift > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "tau_shift {tau_shift} must be > 0"
            )));
        }
        Ok(Self { tau_shift, mu })
    }
}

/// Per-variable shifted baseline for one sample.
pub fn shifted_baseline(x: &[f64], rule: &ShiftedBaseline) -> Vec<f64> {
    debug_assert_eq!(x.len(), rule.mu.len());
    x.iter()
        .zip(&rule.mu)
        .map(|(&xi, &mi)| {
            if xi < mi {
                xi + rule.tau_shift
            } else {
                xi - rule.tau_shift
            }
        })
        .collect()
}

/// How masking baselines are derived from a sample.
#[derive(Debug, Clone)]
pub enum BaselineRule {
    /// Distance-`tau_shift` shift toward the data mean.
    Shifted(ShiftedBaseline),
    /// Fixed vector (e.g. per-variable data means).
    Fixed(Vec<f64>),
}

impl BaselineRule {
    pub fn baseline_for(&self, x: &[f64]) -> Vec<f64> {
        match self {
            BaselineRule::Shifted(rule) => shifted_baseline(x, rule),
            BaselineRule::Fixed(b) => b.clone(),
        }
    }
}

/// Isotropic Gaussian perturbation plan. `delta = 0` is the degenerate
/// noiseless case and is accepted so it can serve as a control.
#[derive(Debug, Clone)]
pub struct PerturbationSpec {
    pub delta: f64,
    pub trials: usize,
    pub seed: u64,
}

impl PerturbationSpec {
    pub fn new(delta: f64, trials: usize, seed: u64) -> Result<Self> {
        if !(delta >= 0.0) || !delta.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "perturbation delta {delta} must be finite and >= 0"
            )));
        }
        if trials < 1 {
            return Err(Error::InvalidConfig("trials must be >= 1".into()));
        }
        Ok(Self {
            delta,
            trials,
            seed,
        })
    }
}

/// Independent RNG substream for a (seed, lane, step) triple, so parallel and
/// serial execution draw identical noise.
pub(crate) fn substream_rng(seed: u64, lane: u64, step: u64) -> ChaCha8Rng {
    fn splitmix64(state: &mut u64) -> u64 {
        *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = *state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    let mut state = seed
        ^ lane.wrapping_mul(0xA076_1D64_78BD_642F)
        ^ step.wrapping_mul(0xE703_7ED1_A0B4_28DB);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Standard AND interaction
/// `prod_i [sign(x_i - b_i) * (x'_i - b_i) / tau_shift]^{k_i}`.
pub fn standard_and(
    kappa: &DegreeVector,
    x_prime: &[f64],
    x: &[f64],
    b: &[f64],
    tau_shift: f64,
) -> f64 {
    debug_assert!(kappa.n() == x.len() && x.len() == b.len() && x.len() == x_prime.len());
    let mut acc = 1.0;
    for (i, &k) in kappa.degrees().iter().enumerate() {
        if k == 0 {
            continue;
        }
        let factor = (x[i] - b[i]).signum() * (x_prime[i] - b[i]) / tau_shift;
        acc *= factor.powi(k as i32);
    }
    acc
}

/// Even central moment of `N(0, delta^2)`: `delta^{2m} (2m-1)!!`.
pub fn gaussian_even_moment(delta: f64, m: u32) -> f64 {
    let mut acc = 1.0;
    for j in 1..=m {
        acc *= (2 * j - 1) as f64;
    }
    acc * delta.powi(2 * m as i32)
}

/// Closed-form second moment of the standard AND interaction under isotropic
/// Gaussian noise:
/// `prod_{i in S} [1 + sum_{m=1}^{k_i} C(2k_i, 2m) delta^{2m} (2m-1)!! / tau^{2m}]`.
pub fn predicted_second_moment(kappa: &DegreeVector, delta: f64, tau_shift: f64) -> Result<f64> {
    if kappa.support_mask() == 0 {
        return Err(Error::EmptyInput("degree-vector support"));
    }
    let mut acc = 1.0;
    for &k in kappa.degrees().iter().filter(|&&k| k > 0) {
        let mut factor = 1.0;
        for m in 1..=k {
            factor += binomial(2 * k as u64, 2 * m as u64) * gaussian_even_moment(delta, m)
                / tau_shift.powi(2 * m as i32);
        }
        acc *= factor;
    }
    Ok(acc)
}

/// Monte-Carlo moments of the standard AND interaction.
#[derive(Debug, Clone, Copy)]
pub struct StandardAndMoments {
    pub mean: f64,
    pub second_moment: f64,
    /// Standard error of `mean`.
    pub se_mean: f64,
    /// Standard error of `second_moment`.
    pub se_second: f64,
}

/// Estimate `E[pi_hat]` and `E[pi_hat^2]` under `x' = x + eps`.
pub fn monte_carlo_standard_and(
    kappa: &DegreeVector,
    x: &[f64],
    b: &[f64],
    tau_shift: f64,
    delta: f64,
    trials: usize,
    seed: u64,
) -> StandardAndMoments {
    assert!(trials >= 2);
    let normal = Normal::new(0.0, delta).expect("delta >= 0");
    let mut rng = substream_rng(seed, 0, 0);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut sum_4 = 0.0;
    let mut x_prime = vec![0.0; x.len()];
    for _ in 0..trials {
        for (xp, &xi) in x_prime.iter_mut().zip(x) {
            *xp = xi + normal.sample(&mut rng);
        }
        let pi = standard_and(kappa, &x_prime, x, b, tau_shift);
        sum += pi;
        sum_sq += pi * pi;
        sum_4 += pi * pi * pi * pi;
    }
    let t = trials as f64;
    let mean = sum / t;
    let second = sum_sq / t;
    let var_pi = (sum_sq / t - mean * mean).max(0.0);
    let var_pi_sq = (sum_4 / t - second * second).max(0.0);
    StandardAndMoments {
        mean,
        second_moment: second,
        se_mean: (var_pi / t).sqrt(),
        se_second: (var_pi_sq / t).sqrt(),
    }
}

/// Per-order mean effect variance under input perturbation:
/// `V^(s) = E_x[ E_{|S|=s}[ Var_eps[ I(S | x + eps) ] ] ]`,
/// with an unbiased variance estimator over `trials` perturbed copies. Each
/// (sample, trial) pair owns its RNG substream, so results are identical in
/// parallel and serial runs.
pub fn effect_variance_scan<F>(
    eval: F,
    samples: &[Vec<f64>],
    baseline: &BaselineRule,
    pert: &PerturbationSpec,
    orders: &[usize],
) -> Result<Vec<(usize, f64)>>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if samples.is_empty() {
        return Err(Error::EmptyInput("samples"));
    }
    if pert.trials < 2 {
        return Err(Error::InvalidConfig(
            "variance scan needs trials >= 2".into(),
        ));
    }
    let n = samples[0].len();
    check_var_count(n)?;

    let order_masks: Vec<Vec<u32>> = orders
        .iter()
        .map(|&s| subsets_of_order(n, s).collect())
        .collect();
    let mut per_order_acc = vec![0.0f64; orders.len()];

    for (si, x) in samples.iter().enumerate() {
        if x.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: x.len(),
            });
        }
        let b = baseline.baseline_for(x);
        let tables: Vec<InteractionTable> = exec::try_map_range(pert.trials, |ti| {
            let x_prime = perturbed_copy(x, pert, si as u64, ti as u64);
            let table = ValueTable::build_masked(&x_prime, &b, &eval).map_err(|e| match e {
                Error::NonFiniteValue { .. } => Error::NonFiniteTrial {
                    sample: si,
                    trial: ti,
                },
                other => other,
            })?;
            Ok::<_, Error>(mobius_transform(&table))
        })?;

        let mut trial_values = vec![0.0f64; pert.trials];
        for (oi, masks) in order_masks.iter().enumerate() {
            let mut var_sum = 0.0;
            for &m in masks {
                for (ti, t) in tables.iter().enumerate() {
                    trial_values[ti] = t.effect(m);
                }
                var_sum += exact_aware_variance(&trial_values);
            }
            per_order_acc[oi] += var_sum / masks.len() as f64;
        }
    }

    let inv = 1.0 / samples.len() as f64;
    Ok(orders
        .iter()
        .zip(per_order_acc)
        .map(|(&s, acc)| (s, acc * inv))
        .collect())
}

fn perturbed_copy(x: &[f64], pert: &PerturbationSpec, sample: u64, trial: u64) -> Vec<f64> {
    let normal = Normal::new(0.0, pert.delta).expect("delta >= 0");
    let mut rng = substream_rng(pert.seed, sample, trial);
    x.iter().map(|&xi| xi + normal.sample(&mut rng)).collect()
}

/// Unbiased sample variance that returns exactly 0 for bitwise-identical
/// observations (the delta = 0 control would otherwise pick up rounding dust).
fn exact_aware_variance(xs: &[f64]) -> f64 {
    if xs.windows(2).all(|w| w[0] == w[1]) {
        return 0.0;
    }
    stats::sample_variance(xs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::within_rel;

    #[test]
    fn shifted_baseline_rule() {
        let rule = ShiftedBaseline::new(0.5, vec![1.0]).unwrap();
        assert_eq!(shifted_baseline(&[0.0], &rule), vec![0.5]);
        assert_eq!(shifted_baseline(&[2.0], &rule), vec![1.5]);
        // tie at the mean takes the minus branch
        assert_eq!(shifted_baseline(&[1.0], &rule), vec![0.5]);
        assert!(ShiftedBaseline::new(0.0, vec![1.0]).is_err());
    }

    #[test]
    fn standard_and_is_one_without_noise() {
        let rule = ShiftedBaseline::new(0.5, vec![0.3, 0.8, -1.0]).unwrap();
        let x = vec![0.1, 1.4, -2.0];
        let b = shifted_baseline(&x, &rule);
        let kappa = DegreeVector::new(vec![2, 1, 3]);
        let pi = standard_and(&kappa, &x, &x, &b, 0.5);
        assert!((pi - 1.0).abs() <= 1e-12);

        // kappa = 0: empty product
        let zero = DegreeVector::new(vec![0, 0, 0]);
        assert_eq!(standard_and(&zero, &x, &x, &b, 0.5), 1.0);
    }

    #[test]
    fn gaussian_moments_closed_form() {
        let d: f64 = 0.1;
        assert!((gaussian_even_moment(d, 1) - d.powi(2)).abs() <= 1e-18);
        assert!((gaussian_even_moment(d, 2) - 3.0 * d.powi(4)).abs() <= 1e-18);
        assert!((gaussian_even_moment(d, 3) - 15.0 * d.powi(6)).abs() <= 1e-18);
    }

    #[test]
    fn predicted_second_moment_plug_ins() {
        // all-ones kappa on |S| variables: (1 + delta^2/tau^2)^{|S|}
        let (delta, tau) = (0.05, 0.5);
        for s in 1..=4usize {
            let mut deg = vec![0u32; 6];
            deg.iter_mut().take(s).for_each(|d| *d = 1);
            let kappa = DegreeVector::new(deg);
            let got = predicted_second_moment(&kappa, delta, tau).unwrap();
            let expect = (1.0 + delta * delta / (tau * tau)).powi(s as i32);
            assert!(within_rel(got, expect, 1e-12, 1.0), "s={s}: {got} vs {expect}");
        }

        // kappa_i = 2 on one variable: 1 + C(4,2) d^2/t^2 + C(4,4) 3 d^4/t^4
        let kappa = DegreeVector::new(vec![2]);
        let (d, t) = (0.1f64, 0.5f64);
        let got = predicted_second_moment(&kappa, d, t).unwrap();
        let expect = 1.0 + 6.0 * d * d / (t * t) + 3.0 * d.powi(4) / t.powi(4);
        assert!(within_rel(got, expect, 1e-12, 1.0));

        // noiseless limit
        let one = predicted_second_moment(&kappa, 0.0, 0.5).unwrap();
        assert_eq!(one, 1.0);

        assert!(predicted_second_moment(&DegreeVector::new(vec![0, 0]), 0.1, 0.5).is_err());
    }

    #[test]
    fn predicted_second_moment_grows_with_support() {
        let (delta, tau) = (0.05, 0.5);
        let mut last = 1.0;
        for s in 1..=6usize {
            let mut deg = vec![0u32; 6];
            deg.iter_mut().take(s).for_each(|d| *d = 2);
            let m = predicted_second_moment(&DegreeVector::new(deg), delta, tau).unwrap();
            assert!(m > last, "order {s}: {m} <= {last}");
            last = m;
        }
    }

    #[test]
    fn mc_matches_closed_form_small() {
        let rule = ShiftedBaseline::new(0.5, vec![0.0, 0.0, 5.0]).unwrap();
        let x = vec![0.7, -0.3, 2.0];
        let b = shifted_baseline(&x, &rule);
        let kappa = DegreeVector::new(vec![1, 2, 1]);
        let (delta, tau) = (0.05, 0.5);
        let mc = monte_carlo_standard_and(&kappa, &x, &b, tau, delta, 40_000, 12345);
        let predicted = predicted_second_moment(&kappa, delta, tau).unwrap();
        assert!(
            (mc.second_moment - predicted).abs() <= 3.0 * mc.se_second,
            "mc {} vs predicted {predicted} (se {})",
            mc.second_moment,
            mc.se_second
        );
        // mean = 1 + O(delta^2) with the documented conservative envelope
        let budget = 5.0 * delta * delta * kappa.total_degree() as f64 / (tau * tau);
        assert!((mc.mean - 1.0).abs() <= budget + 3.0 * mc.se_mean);
    }

    #[test]
    fn substreams_differ_and_repeat() {
        let a: Vec<u64> = substream_rng(1, 2, 3).sample_iter(rand::distributions::Standard).take(4).collect();
        let b: Vec<u64> = substream_rng(1, 2, 3).sample_iter(rand::distributions::Standard).take(4).collect();
        let c: Vec<u64> = substream_rng(1, 2, 4).sample_iter(rand::distributions::Standard).take(4).collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn variance_scan_zero_delta_and_linear_model() {
        let samples = vec![vec![0.3, -0.2, 0.9], vec![1.0, 0.5, -0.5]];
        let rule = BaselineRule::Shifted(ShiftedBaseline::new(0.5, vec![0.0; 3]).unwrap());
        let eval = |x: &[f64]| x.iter().enumerate().map(|(i, v)| (i + 1) as f64 * v).sum::<f64>();

        // delta = 0: no variance at any order
        let pert0 = PerturbationSpec::new(0.0, 5, 9).unwrap();
        let v0 = effect_variance_scan(eval, &samples, &rule, &pert0, &[1, 2, 3]).unwrap();
        assert!(v0.iter().all(|&(_, v)| v == 0.0), "{v0:?}");

        // linear model: orders >= 2 carry no interaction under any noise
        let pert = PerturbationSpec::new(0.05, 8, 9).unwrap();
        let v = effect_variance_scan(eval, &samples, &rule, &pert, &[1, 2, 3]).unwrap();
        assert!(v[0].1 > 0.0);
        assert!(v[1].1 <= 1e-28, "{:?}", v[1]);
        assert!(v[2].1 <= 1e-28, "{:?}", v[2]);
    }

    #[test]
    fn variance_scan_deterministic_and_validated() {
        let samples = vec![vec![0.3, -0.2]];
        let rule = BaselineRule::Fixed(vec![0.0, 0.0]);
        let eval = |x: &[f64]| (x[0] * x[1]).sin() + x[0];
        let pert = PerturbationSpec::new(0.05, 6, 42).unwrap();
        let a = effect_variance_scan(eval, &samples, &rule, &pert, &[1, 2]).unwrap();
        let b = effect_variance_scan(eval, &samples, &rule, &pert, &[1, 2]).unwrap();
        assert_eq!(a, b);

        let one_trial = PerturbationSpec::new(0.05, 1, 42).unwrap();
        assert!(effect_variance_scan(eval, &samples, &rule, &one_trial, &[1]).is_err());
    }

    #[test]
    fn variance_scan_flags_non_finite_with_indices() {
        let samples = vec![vec![0.5, 0.5]];
        let rule = BaselineRule::Fixed(vec![0.0, 0.0]);
        let eval = |x: &[f64]| if x[0] > 0.6 { f64::NAN } else { x[0] };
        let pert = PerturbationSpec::new(0.2, 4, 7).unwrap();
        let err = effect_variance_scan(eval, &samples, &rule, &pert, &[1]).unwrap_err();
        assert!(matches!(err, Error::NonFiniteTrial { sample: 0, .. }), "{err:?}");
    }
}
