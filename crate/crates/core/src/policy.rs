//! Linear signature stopping policies.
//!
//! A policy is a dual vector `ℓ` with a positive threshold `k`: the rule
//! stops at the first grid index `j` with `Σ_{i≤j} ⟨ℓ, 𝕏_{0,tᵢ}⟩² ≥ k`, and
//! at the horizon if the sum never clears the threshold. Its randomized
//! ancestor replaces `k` by a draw of a positive random variable `Z`.
//! Training minimizes the negated expected payoff with the hard indicator
//! smoothed by a sigmoid of sharpness `μ`, which keeps the objective
//! differentiable in `ℓ`.

use rand::distributions::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{cast, cast_usize, Scalar};
use crate::signature::{
    augment, pair, prefix_signatures, DualVector, Path, TimeScaling, TruncatedSignature,
};

/// Affine transform applied to raw path values before augmentation and
/// signature computation; payoffs always see raw values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalizer<T> {
    pub mean: T,
    pub scale: T,
}

impl<T: Scalar> Normalizer<T> {
    pub fn identity() -> Self {
        Self {
            mean: T::zero(),
            scale: T::one(),
        }
    }

    /// Mean/standard-deviation transform fitted over a value corpus. Falls
    /// back to unit scale when the corpus is (numerically) constant.
    pub fn fit(values: impl Iterator<Item = T> + Clone) -> Self {
        let mut count = 0usize;
        let mut mean = T::zero();
        for v in values.clone() {
            mean += v;
            count += 1;
        }
        if count == 0 {
            return Self::identity();
        }
        mean /= cast_usize::<T>(count);
        let mut var = T::zero();
        for v in values {
            var += (v - mean) * (v - mean);
        }
        var /= cast_usize::<T>(count);
        let std = var.sqrt();
        let scale = if std > cast::<T>(1e-12) {
            std
        } else {
            T::one()
        };
        Self { mean, scale }
    }

    #[inline]
    pub fn apply(&self, x: T) -> T {
        (x - self.mean) / self.scale
    }

    pub fn apply_all(&self, xs: &[T]) -> Vec<T> {
        xs.iter().map(|&x| self.apply(x)).collect()
    }
}

/// A trained (or hand-built) linear signature stopping policy.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearPolicy<T> {
    pub coefficients: DualVector<T>,
    pub threshold: T,
    pub sharpness: T,
    pub normalizer: Normalizer<T>,
}

#[derive(Serialize, Deserialize)]
struct PolicyJson<T> {
    dimension: usize,
    order: usize,
    threshold: T,
    sharpness: T,
    normalizer: Normalizer<T>,
    coefficients: Vec<T>,
}

impl<T: Scalar> LinearPolicy<T> {
    pub fn new(
        coefficients: DualVector<T>,
        threshold: T,
        sharpness: T,
        normalizer: Normalizer<T>,
    ) -> Result<Self> {
        if threshold <= T::zero() || !threshold.is_finite() {
            return Err(Error::InvalidArgument(
                "threshold must be positive and finite".into(),
            ));
        }
        if sharpness <= T::zero() || !sharpness.is_finite() {
            return Err(Error::InvalidArgument(
                "sharpness must be positive and finite".into(),
            ));
        }
        Ok(Self {
            coefficients,
            threshold,
            sharpness,
            normalizer,
        })
    }

    pub fn dimension(&self) -> usize {
        self.coefficients.dimension()
    }

    pub fn order(&self) -> usize {
        self.coefficients.order()
    }

    /// Apply the hard stopping rule to a raw observed series: standardize
    /// with the stored normalizer, augment with unit-rescaled time, take
    /// prefix signatures at the policy's order, and scan the cumulative sum.
    /// Returns the stop index and whether the threshold actually triggered
    /// (false means the horizon cap).
    pub fn evaluate_stop(&self, times: &[T], raw_values: &[T]) -> Result<(usize, bool)> {
        let standardized = self.normalizer.apply_all(raw_values);
        let path = Path::from_values(times.to_vec(), standardized)?;
        let augmented = augment(&path, TimeScaling::Unit);
        let prefixes = prefix_signatures(&augmented, self.order())?;
        first_index_at_level(self, &prefixes, self.threshold)
    }

    pub fn to_json(&self) -> String
    where
        T: Serialize,
    {
        let doc = PolicyJson {
            dimension: self.dimension(),
            order: self.order(),
            threshold: self.threshold,
            sharpness: self.sharpness,
            normalizer: self.normalizer,
            coefficients: self.coefficients.as_slice().to_vec(),
        };
        serde_json::to_string(&doc).expect("policy serializes")
    }

    pub fn from_json(text: &str) -> Result<Self>
    where
        T: serde::de::DeserializeOwned,
    {
        let doc: PolicyJson<T> = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line() as u64,
            msg: e.to_string(),
        })?;
        let coefficients = DualVector::from_coeffs(doc.dimension, doc.order, doc.coefficients)?;
        Self::new(coefficients, doc.threshold, doc.sharpness, doc.normalizer)
    }
}

/// A payoff series aligned with a path's time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffPath<T> {
    values: Vec<T>,
}

impl<T: Scalar> PayoffPath<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("empty payoff series".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "payoff values must be finite".into(),
            ));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// One training sample: precomputed prefix signatures plus the aligned payoff.
#[derive(Debug, Clone)]
pub struct TrainingSample<T> {
    pub prefixes: Vec<TruncatedSignature<T>>,
    pub payoff: PayoffPath<T>,
}

/// A set of training samples on a common `(dimension, order, grid)` shape,
/// together with the normalizer the sample paths were standardized with.
#[derive(Debug, Clone)]
pub struct TrainingSet<T> {
    dimension: usize,
    order: usize,
    grid_len: usize,
    samples: Vec<TrainingSample<T>>,
    normalizer: Normalizer<T>,
}

impl<T: Scalar> TrainingSet<T> {
    pub fn new(samples: Vec<TrainingSample<T>>, normalizer: Normalizer<T>) -> Result<Self> {
        let first = samples
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty training set".into()))?;
        let grid_len = first.prefixes.len();
        let sig0 = first
            .prefixes
            .first()
            .ok_or_else(|| Error::InvalidArgument("sample with no prefixes".into()))?;
        let (dimension, order) = (sig0.dimension(), sig0.order());
        for (m, s) in samples.iter().enumerate() {
            if s.prefixes.len() != grid_len || s.payoff.len() != grid_len {
                return Err(Error::ShapeMismatch(format!(
                    "sample {m}: {} prefixes / {} payoffs, expected {grid_len}",
                    s.prefixes.len(),
                    s.payoff.len()
                )));
            }
            if s.prefixes
                .iter()
                .any(|p| p.dimension() != dimension || p.order() != order)
            {
                return Err(Error::ShapeMismatch(format!(
                    "sample {m}: prefix shape differs from (d={dimension}, N={order})"
                )));
            }
        }
        Ok(Self {
            dimension,
            order,
            grid_len,
            samples,
            normalizer,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Grid length `n + 1` shared by every sample.
    pub fn grid_len(&self) -> usize {
        self.grid_len
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[TrainingSample<T>] {
        &self.samples
    }

    pub fn normalizer(&self) -> &Normalizer<T> {
        &self.normalizer
    }
}

/// First-order trainer settings. `threshold` and `sharpness` are stamped
/// into the trained policy; initial coefficients are drawn i.i.d. normal
/// with standard deviation `init_scale / graded-length`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig<T> {
    pub iterations: usize,
    pub step_size: T,
    pub init_scale: T,
    pub seed: u64,
    pub sharpness: T,
    pub threshold: T,
}

impl<T: Scalar> Default for OptimizerConfig<T> {
    fn default() -> Self {
        Self {
            iterations: 200,
            step_size: cast(0.01),
            init_scale: cast(0.1),
            seed: 42,
            sharpness: cast(20.0),
            threshold: cast(0.05),
        }
    }
}

impl<T: Scalar> OptimizerConfig<T> {
    fn validate(&self) -> Result<()> {
        if self.iterations < 1 {
            return Err(Error::InvalidArgument("iterations must be >= 1".into()));
        }
        if self.step_size <= T::zero() || self.step_size.is_nan() {
            return Err(Error::InvalidArgument("step_size must be positive".into()));
        }
        if self.init_scale < T::zero() {
            return Err(Error::InvalidArgument(
                "init_scale must be non-negative".into(),
            ));
        }
        if self.threshold <= T::zero()
            || self.sharpness <= T::zero()
            || self.threshold.is_nan()
            || self.sharpness.is_nan()
        {
            return Err(Error::InvalidArgument(
                "threshold and sharpness must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Law of the positive randomization level `Z` with `P(Z ≤ 0) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ZLaw<T> {
    Exponential { rate: T },
}

/// The randomizing level for randomized stopping times: a positive law and seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomizationSource<T> {
    pub law: ZLaw<T>,
    pub seed: u64,
}

impl<T: Scalar> RandomizationSource<T> {
    /// Unit-rate exponential, the default law: `G_Z(x) = e^{-x}`.
    pub fn exponential(rate: T, seed: u64) -> Result<Self> {
        if rate <= T::zero() || !rate.is_finite() {
            return Err(Error::InvalidArgument("rate must be positive".into()));
        }
        Ok(Self {
            law: ZLaw::Exponential { rate },
            seed,
        })
    }

    /// Survival function `G_Z(x) = 1 - F_Z(x)`.
    pub fn survival(&self, x: T) -> T {
        match self.law {
            ZLaw::Exponential { rate } => (-rate * x).exp(),
        }
    }

    pub fn cdf(&self, x: T) -> T {
        T::one() - self.survival(x)
    }

    /// Deterministic stream of draws via inverse CDF.
    pub fn sample(&self, count: usize) -> Vec<T> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        match self.law {
            ZLaw::Exponential { rate } => (0..count)
                .map(|_| {
                    let u: f64 = rng.gen_range(0.0..1.0);
                    -cast::<T>((1.0 - u).ln()) / rate
                })
                .collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// Stopping rules
// ---------------------------------------------------------------------------

fn check_prefix_shapes<T: Scalar>(
    policy: &LinearPolicy<T>,
    prefixes: &[TruncatedSignature<T>],
) -> Result<()> {
    let first = prefixes
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty prefix sequence".into()))?;
    if first.dimension() != policy.dimension() || first.order() != policy.order() {
        return Err(Error::ShapeMismatch(format!(
            "policy (d={}, N={}) vs prefixes (d={}, N={})",
            policy.dimension(),
            policy.order(),
            first.dimension(),
            first.order()
        )));
    }
    Ok(())
}

fn first_index_at_level<T: Scalar>(
    policy: &LinearPolicy<T>,
    prefixes: &[TruncatedSignature<T>],
    level: T,
) -> Result<(usize, bool)> {
    check_prefix_shapes(policy, prefixes)?;
    let mut cum = T::zero();
    for (j, sig) in prefixes.iter().enumerate() {
        let p = pair(&policy.coefficients, sig)?;
        cum += p * p;
        if cum >= level {
            return Ok((j, true));
        }
    }
    Ok((prefixes.len() - 1, false))
}

/// Deterministic stopping rule: smallest `j` with
/// `Σ_{i≤j} ⟨ℓ, 𝕏_{0,tᵢ}⟩² ≥ k`, or the horizon index when the sum never
/// clears the threshold (forced stop, `Y_{τ∧T}` semantics).
pub fn stopping_index<T: Scalar>(
    policy: &LinearPolicy<T>,
    prefixes: &[TruncatedSignature<T>],
) -> Result<usize> {
    first_index_at_level(policy, prefixes, policy.threshold).map(|(j, _)| j)
}

/// Randomized variant: the threshold is a realized draw `z` of `Z`.
pub fn randomized_stopping_index<T: Scalar>(
    policy: &LinearPolicy<T>,
    prefixes: &[TruncatedSignature<T>],
    z: T,
) -> Result<usize> {
    if z <= T::zero() || !z.is_finite() {
        return Err(Error::InvalidArgument(
            "randomization level z must be positive".into(),
        ));
    }
    first_index_at_level(policy, prefixes, z).map(|(j, _)| j)
}

/// Sigmoid CDF surrogate `F̂_k(x) = 1 / (1 + e^{-μ(x-k)})`; saturates to 0/1
/// without overflow.
pub fn smoothed_cdf<T: Scalar>(x: T, threshold: T, sharpness: T) -> T {
    T::one() / (T::one() + (-sharpness * (x - threshold)).exp())
}

fn pair_cumsums<T: Scalar>(
    coeffs: &DualVector<T>,
    prefixes: &[TruncatedSignature<T>],
) -> Result<(Vec<T>, Vec<T>)> {
    let mut pairs = Vec::with_capacity(prefixes.len());
    let mut cums = Vec::with_capacity(prefixes.len());
    let mut acc = T::zero();
    for sig in prefixes {
        let p = pair(coeffs, sig)?;
        acc += p * p;
        pairs.push(p);
        cums.push(acc);
    }
    Ok((pairs, cums))
}

/// Smoothed expected payoff of one sample:
/// `Y₀ + Σ_{j<n} Ĝ_k(Σ_{i≤j} ⟨ℓ,𝕏ᵢ⟩²)·(Y_{j+1} − Y_j)` with `Ĝ_k = 1 − F̂_k`.
pub fn smoothed_expected_payoff<T: Scalar>(
    policy: &LinearPolicy<T>,
    prefixes: &[TruncatedSignature<T>],
    payoff: &PayoffPath<T>,
) -> Result<T> {
    check_prefix_shapes(policy, prefixes)?;
    if payoff.len() != prefixes.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} payoffs vs {} prefixes",
            payoff.len(),
            prefixes.len()
        )));
    }
    let (_, cums) = pair_cumsums(&policy.coefficients, prefixes)?;
    let y = payoff.values();
    let mut total = y[0];
    for j in 0..y.len() - 1 {
        let survive = T::one() - smoothed_cdf(cums[j], policy.threshold, policy.sharpness);
        total += survive * (y[j + 1] - y[j]);
    }
    Ok(total)
}

/// Closed-form expected payoff under the randomized rule:
/// `Y₀ + Σ_{j<n} G_Z(Σ_{i≤j} ⟨ℓ,𝕏ᵢ⟩²)·(Y_{j+1} − Y_j)`.
pub fn randomized_expected_payoff<T: Scalar>(
    policy: &LinearPolicy<T>,
    prefixes: &[TruncatedSignature<T>],
    payoff: &PayoffPath<T>,
    source: &RandomizationSource<T>,
) -> Result<T> {
    check_prefix_shapes(policy, prefixes)?;
    if payoff.len() != prefixes.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} payoffs vs {} prefixes",
            payoff.len(),
            prefixes.len()
        )));
    }
    let (_, cums) = pair_cumsums(&policy.coefficients, prefixes)?;
    let y = payoff.values();
    let mut total = y[0];
    for j in 0..y.len() - 1 {
        total += source.survival(cums[j]) * (y[j + 1] - y[j]);
    }
    Ok(total)
}

/// Training loss: negated mean smoothed expected payoff over the set.
pub fn loss<T: Scalar>(policy: &LinearPolicy<T>, set: &TrainingSet<T>) -> Result<T> {
    if set.is_empty() {
        return Err(Error::InvalidArgument("empty training set".into()));
    }
    let per_sample: Vec<Result<T>> = set
        .samples
        .par_iter()
        .map(|s| smoothed_expected_payoff(policy, &s.prefixes, &s.payoff))
        .collect();
    let mut total = T::zero();
    for v in per_sample {
        total += v?;
    }
    Ok(-total / cast_usize::<T>(set.len()))
}

fn sample_loss_and_gradient<T: Scalar>(
    policy: &LinearPolicy<T>,
    sample: &TrainingSample<T>,
) -> Result<(T, Vec<T>)> {
    let (pairs, cums) = pair_cumsums(&policy.coefficients, &sample.prefixes)?;
    let y = sample.payoff.values();
    if y.len() != sample.prefixes.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} payoffs vs {} prefixes",
            y.len(),
            sample.prefixes.len()
        )));
    }
    let n = y.len() - 1;
    let mu = policy.sharpness;
    // value = Y0 + sum_j (1 - F_j) dY_j; dG/dx = -mu F (1 - F).
    let mut value = y[0];
    let mut weights = vec![T::zero(); n];
    for j in 0..n {
        let f = smoothed_cdf(cums[j], policy.threshold, mu);
        let dy = y[j + 1] - y[j];
        value += (T::one() - f) * dy;
        weights[j] = -mu * f * (T::one() - f) * dy;
    }
    // d value / d ell = sum_j w_j * dS_j/d ell, with
    // dS_j/d ell = sum_{i<=j} 2 p_i X_i; accumulate by reverse-summing w.
    let mut grad = vec![T::zero(); policy.coefficients.as_slice().len()];
    let mut tail_weight = T::zero();
    for i in (0..n).rev() {
        tail_weight += weights[i];
        let coeff = cast::<T>(2.0) * pairs[i] * tail_weight;
        if coeff == T::zero() {
            continue;
        }
        for (g, &x) in grad.iter_mut().zip(sample.prefixes[i].as_slice()) {
            *g += coeff * x;
        }
    }
    Ok((value, grad))
}

/// Exact gradient of [`loss`] with respect to the flat coefficient array.
pub fn loss_gradient<T: Scalar>(
    policy: &LinearPolicy<T>,
    set: &TrainingSet<T>,
) -> Result<DualVector<T>> {
    if set.is_empty() {
        return Err(Error::InvalidArgument("empty training set".into()));
    }
    let per_sample: Vec<Result<(T, Vec<T>)>> = set
        .samples
        .par_iter()
        .map(|s| sample_loss_and_gradient(policy, s))
        .collect();
    let mut grad = vec![T::zero(); policy.coefficients.as_slice().len()];
    for r in per_sample {
        let (_, g) = r?;
        for (slot, v) in grad.iter_mut().zip(g) {
            *slot += v;
        }
    }
    let inv_m = -(T::one() / cast_usize::<T>(set.len()));
    for g in &mut grad {
        *g *= inv_m;
    }
    DualVector::from_coeffs(set.dimension, set.order, grad)
}

fn loss_and_gradient_flat<T: Scalar>(
    policy: &LinearPolicy<T>,
    set: &TrainingSet<T>,
) -> Result<(T, Vec<T>)> {
    let per_sample: Vec<Result<(T, Vec<T>)>> = set
        .samples
        .par_iter()
        .map(|s| sample_loss_and_gradient(policy, s))
        .collect();
    let mut grad = vec![T::zero(); policy.coefficients.as_slice().len()];
    let mut total = T::zero();
    for r in per_sample {
        let (v, g) = r?;
        total += v;
        for (slot, gv) in grad.iter_mut().zip(g) {
            *slot += gv;
        }
    }
    let inv_m = T::one() / cast_usize::<T>(set.len());
    for g in &mut grad {
        *g = -*g * inv_m;
    }
    Ok((-total * inv_m, grad))
}

/// Result of a training run: the best-loss policy plus diagnostics.
#[derive(Debug, Clone)]
pub struct TrainOutcome<T> {
    pub policy: LinearPolicy<T>,
    pub best_loss: T,
    /// Loss at every visited iterate, including the final one.
    pub loss_history: Vec<T>,
}

/// Minimize the smoothed loss with per-coordinate moment-scaled steps
/// (Adam), returning the best iterate seen. Deterministic given the seed.
pub fn train<T: Scalar>(
    set: &TrainingSet<T>,
    config: &OptimizerConfig<T>,
) -> Result<TrainOutcome<T>>
where
    StandardNormal: Distribution<T>,
{
    if set.is_empty() {
        return Err(Error::InvalidArgument("empty training set".into()));
    }
    config.validate()?;
    let len = crate::signature::graded_len(set.dimension, set.order);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let sigma = config.init_scale / cast_usize::<T>(len);
    let init: Vec<T> = (0..len)
        .map(|_| {
            let z: T = StandardNormal.sample(&mut rng);
            z * sigma
        })
        .collect();
    let mut policy = LinearPolicy::new(
        DualVector::from_coeffs(set.dimension, set.order, init)?,
        config.threshold,
        config.sharpness,
        *set.normalizer(),
    )?;

    let beta1 = cast::<T>(0.9);
    let beta2 = cast::<T>(0.999);
    let eps = cast::<T>(1e-8);
    let mut m = vec![T::zero(); len];
    let mut v = vec![T::zero(); len];
    let mut best_loss = T::infinity();
    let mut best_coeffs = policy.coefficients.as_slice().to_vec();
    let mut history = Vec::with_capacity(config.iterations + 1);

    for t in 1..=config.iterations {
        let (current, grad) = loss_and_gradient_flat(&policy, set)?;
        if !current.is_finite() {
            return Err(Error::TrainingDiverged { iteration: t });
        }
        history.push(current);
        if current < best_loss {
            best_loss = current;
            best_coeffs.copy_from_slice(policy.coefficients.as_slice());
        }
        let t_scalar = cast_usize::<T>(t);
        let bc1 = T::one() - beta1.powf(t_scalar);
        let bc2 = T::one() - beta2.powf(t_scalar);
        let coeffs = policy.coefficients.as_mut_slice();
        for i in 0..len {
            m[i] = beta1 * m[i] + (T::one() - beta1) * grad[i];
            v[i] = beta2 * v[i] + (T::one() - beta2) * grad[i] * grad[i];
            let m_hat = m[i] / bc1;
            let v_hat = v[i] / bc2;
            coeffs[i] -= config.step_size * m_hat / (v_hat.sqrt() + eps);
        }
    }
    let final_loss = loss(&policy, set)?;
    if !final_loss.is_finite() {
        return Err(Error::TrainingDiverged {
            iteration: config.iterations,
        });
    }
    history.push(final_loss);
    if final_loss < best_loss {
        best_loss = final_loss;
        best_coeffs.copy_from_slice(policy.coefficients.as_slice());
    }
    policy.coefficients = DualVector::from_coeffs(set.dimension, set.order, best_coeffs)?;
    Ok(TrainOutcome {
        policy,
        best_loss,
        loss_history: history,
    })
}
