//! Mean-reversion modeling and training-sample generation: exact OU
//! simulation, closed-form MLE fitting, spread construction by
//! likelihood-maximizing hedge ratio, and block-bootstrap resampling.

use rand::distributions::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::policy::{Normalizer, PayoffPath, TrainingSample, TrainingSet};
use crate::scalar::{cast, cast_usize, Scalar};
use crate::signature::{augment, prefix_signatures, Path, TimeScaling};

/// Parameters of `dX = speed·(mean_level − X)·dt + vol·dW`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OuParams<T> {
    pub mean_level: T,
    pub speed: T,
    pub vol: T,
}

impl<T: Scalar> OuParams<T> {
    pub fn new(mean_level: T, speed: T, vol: T) -> Result<Self> {
        if !mean_level.is_finite() || !speed.is_finite() || !vol.is_finite() {
            return Err(Error::InvalidArgument(
                "OU parameters must be finite".into(),
            ));
        }
        if speed <= T::zero() {
            return Err(Error::InvalidArgument("speed must be positive".into()));
        }
        if vol < T::zero() {
            return Err(Error::InvalidArgument("vol must be non-negative".into()));
        }
        Ok(Self {
            mean_level,
            speed,
            vol,
        })
    }
}

/// An equidistant grid of `n` steps over `[0, t_max]` (so `n + 1` points).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid<T> {
    n: usize,
    t_max: T,
}

impl<T: Scalar> TimeGrid<T> {
    pub fn new(n: usize, t_max: T) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidArgument(
                "grid needs at least one step".into(),
            ));
        }
        if t_max <= T::zero() || !t_max.is_finite() {
            return Err(Error::InvalidArgument("t_max must be positive".into()));
        }
        Ok(Self { n, t_max })
    }

    pub fn steps(&self) -> usize {
        self.n
    }

    /// Number of grid points, `n + 1`.
    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn t_max(&self) -> T {
        self.t_max
    }

    pub fn dt(&self) -> T {
        self.t_max / cast_usize::<T>(self.n)
    }

    pub fn times(&self) -> Vec<T> {
        let dt = self.dt();
        (0..=self.n).map(|j| cast_usize::<T>(j) * dt).collect()
    }
}

/// Deterministic seed derivation for independent substreams.
pub fn mix_seed(seed: u64, salt: u64) -> u64 {
    // splitmix64 finalizer over seed + salt * golden gamma
    let mut z = seed.wrapping_add(salt.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn ou_step_coefficients<T: Scalar>(params: &OuParams<T>, dt: T) -> (T, T) {
    let decay = (-params.speed * dt).exp();
    let two = cast::<T>(2.0);
    let var = params.vol * params.vol * (T::one() - (-two * params.speed * dt).exp())
        / (two * params.speed);
    (decay, var.sqrt())
}

fn simulate_ou_with_rng<T: Scalar>(
    params: &OuParams<T>,
    x0: T,
    grid: &TimeGrid<T>,
    rng: &mut ChaCha8Rng,
) -> Path<T>
where
    StandardNormal: Distribution<T>,
{
    let (decay, step_std) = ou_step_coefficients(params, grid.dt());
    let m = params.mean_level;
    let mut values = Vec::with_capacity(grid.len());
    let mut x = x0;
    values.push(x);
    for _ in 0..grid.steps() {
        let z: T = StandardNormal.sample(rng);
        x = m + (x - m) * decay + step_std * z;
        values.push(x);
    }
    Path::from_values(grid.times(), values).expect("grid is strictly increasing")
}

/// Simulate one OU path by its exact Gaussian transition
/// `X_{j+1} = m + (X_j − m)e^{−θΔ} + σ·sqrt((1−e^{−2θΔ})/2θ)·ξ_j`.
/// Deterministic given the seed.
pub fn simulate_ou<T: Scalar>(params: &OuParams<T>, x0: T, grid: &TimeGrid<T>, seed: u64) -> Path<T>
where
    StandardNormal: Distribution<T>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    simulate_ou_with_rng(params, x0, grid, &mut rng)
}

/// Simulate `m` OU paths; sample `i` draws from the independent substream
/// `(seed, i)`, so parallel and serial generation agree exactly and sample 0
/// equals [`simulate_ou`] with the same seed.
pub fn simulate_ou_batch<T: Scalar>(
    params: &OuParams<T>,
    x0: T,
    grid: &TimeGrid<T>,
    m: usize,
    seed: u64,
) -> Vec<Path<T>>
where
    StandardNormal: Distribution<T>,
{
    (0..m as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            simulate_ou_with_rng(params, x0, grid, &mut rng)
        })
        .collect()
}

struct Ar1Fit<T> {
    slope: T,
    intercept: T,
    resid_var: T,
    log_likelihood: T,
}

/// Closed-form conditional-ML AR(1) regression `x_{j+1} = a·x_j + b + ε`.
fn ar1_fit<T: Scalar>(values: &[T]) -> Result<Ar1Fit<T>> {
    if values.len() < 3 {
        return Err(Error::InvalidArgument(
            "need at least 3 observations to fit".into(),
        ));
    }
    let n = values.len() - 1;
    let nf = cast_usize::<T>(n);
    let xs = &values[..n];
    let ys = &values[1..];
    let x_mean = xs.iter().copied().sum::<T>() / nf;
    let y_mean = ys.iter().copied().sum::<T>() / nf;
    let mut cov = T::zero();
    let mut var = T::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        cov += (x - x_mean) * (y - y_mean);
        var += (x - x_mean) * (x - x_mean);
    }
    if var <= T::epsilon() * nf {
        return Err(Error::FitDegenerate(
            "series has (numerically) zero variance".into(),
        ));
    }
    let slope = cov / var;
    let intercept = y_mean - slope * x_mean;
    let mut rss = T::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        let r = y - slope * x - intercept;
        rss += r * r;
    }
    let resid_var = rss / nf;
    if resid_var <= T::zero() {
        return Err(Error::FitDegenerate(
            "zero residual variance: transition likelihood unbounded".into(),
        ));
    }
    // ML value of the Gaussian transition log-likelihood at the fitted
    // parameters: -n/2 (ln(2 pi v) + 1).
    let two_pi = cast::<T>(2.0 * std::f64::consts::PI);
    let half = cast::<T>(0.5);
    let log_likelihood = -half * nf * ((two_pi * resid_var).ln() + T::one());
    Ok(Ar1Fit {
        slope,
        intercept,
        resid_var,
        log_likelihood,
    })
}

fn ar1_to_ou<T: Scalar>(fit: &Ar1Fit<T>, dt: T) -> Result<OuParams<T>> {
    let a = fit.slope;
    if a >= T::one() {
        return Err(Error::NonMeanReverting {
            ar_coeff: a.to_f64().unwrap_or(f64::NAN),
        });
    }
    if a <= T::zero() {
        return Err(Error::FitDegenerate(format!(
            "AR(1) coefficient {a} is not in (0, 1); no OU transition maps to it"
        )));
    }
    let speed = -a.ln() / dt;
    let mean_level = fit.intercept / (T::one() - a);
    let two = cast::<T>(2.0);
    let vol = (fit.resid_var * two * speed / (T::one() - a * a)).sqrt();
    OuParams::new(mean_level, speed, vol)
}

/// Fit OU parameters to a 1-D series sampled at spacing `dt` by maximizing
/// the exact Gaussian transition likelihood (closed-form AR(1) regression
/// mapped back to `(θ, μ, σ)`).
pub fn fit_ou_mle<T: Scalar>(values: &[T], dt: T) -> Result<OuParams<T>> {
    if dt <= T::zero() || dt.is_nan() {
        return Err(Error::InvalidArgument("dt must be positive".into()));
    }
    ar1_to_ou(&ar1_fit(values)?, dt)
}

/// Exact Gaussian transition log-likelihood of a series under OU parameters.
pub fn ou_log_likelihood<T: Scalar>(values: &[T], params: &OuParams<T>, dt: T) -> T {
    let (decay, step_std) = ou_step_coefficients(params, dt);
    let var = step_std * step_std;
    if var <= T::zero() || var.is_nan() {
        return T::neg_infinity();
    }
    let two_pi = cast::<T>(2.0 * std::f64::consts::PI);
    let half = cast::<T>(0.5);
    let mut ll = T::zero();
    for w in values.windows(2) {
        let mean = params.mean_level + (w[0] - params.mean_level) * decay;
        let r = w[1] - mean;
        ll -= half * ((two_pi * var).ln() + r * r / var);
    }
    ll
}

/// A constructed spread `A − β·B` on first-value-normalized prices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpreadSpec<T> {
    pub symbol_a: String,
    pub symbol_b: String,
    pub hedge_ratio: T,
    pub fitted: OuParams<T>,
    pub log_likelihood: T,
}

/// Default hedge-ratio candidates: 101 points spanning ±3 around the
/// through-origin OLS ratio of the normalized series.
pub fn default_beta_grid<T: Scalar>(prices_a: &[T], prices_b: &[T]) -> Result<Vec<T>> {
    if prices_a.len() != prices_b.len() || prices_a.len() < 3 {
        return Err(Error::InvalidArgument(
            "need aligned series of length >= 3".into(),
        ));
    }
    let a0 = prices_a[0];
    let b0 = prices_b[0];
    if a0 <= T::zero() || b0 <= T::zero() || a0.is_nan() || b0.is_nan() {
        return Err(Error::InvalidArgument("prices must be positive".into()));
    }
    let mut num = T::zero();
    let mut den = T::zero();
    for (&a, &b) in prices_a.iter().zip(prices_b) {
        let an = a / a0;
        let bn = b / b0;
        num += an * bn;
        den += bn * bn;
    }
    let center = num / den;
    let half_span = cast::<T>(3.0);
    let step = half_span / cast::<T>(50.0);
    Ok((0..101)
        .map(|i| center + step * (cast_usize::<T>(i) - cast::<T>(50.0)))
        .collect())
}

/// Pick the hedge ratio from `beta_grid` whose spread maximizes the OU
/// transition likelihood; ties (within 1e-9 relative) break toward smaller
/// `|β|`. Candidates whose fit degenerates are skipped.
pub fn construct_spread<T: Scalar>(
    symbol_a: &str,
    prices_a: &[T],
    symbol_b: &str,
    prices_b: &[T],
    beta_grid: &[T],
    dt: T,
) -> Result<(SpreadSpec<T>, Path<T>)> {
    if prices_a.len() != prices_b.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} vs {} prices",
            prices_a.len(),
            prices_b.len()
        )));
    }
    if prices_a.len() < 3 {
        return Err(Error::InvalidArgument(
            "need at least 3 aligned prices".into(),
        ));
    }
    if beta_grid.is_empty() {
        return Err(Error::InvalidArgument("empty hedge-ratio grid".into()));
    }
    if prices_a
        .iter()
        .chain(prices_b)
        .any(|&p| p <= T::zero() || p.is_nan())
    {
        return Err(Error::Validation("prices must be positive".into()));
    }
    let a0 = prices_a[0];
    let b0 = prices_b[0];
    let norm_a: Vec<T> = prices_a.iter().map(|&p| p / a0).collect();
    let norm_b: Vec<T> = prices_b.iter().map(|&p| p / b0).collect();

    let mut best: Option<(T, T, OuParams<T>, Vec<T>)> = None; // (loglik, beta, params, spread)
    let tie_tol = cast::<T>(1e-9);
    for &beta in beta_grid {
        let spread: Vec<T> = norm_a
            .iter()
            .zip(&norm_b)
            .map(|(&a, &b)| a - beta * b)
            .collect();
        let fit = match ar1_fit(&spread) {
            Ok(f) => f,
            Err(_) => continue,
        };
        let params = match ar1_to_ou(&fit, dt) {
            Ok(p) => p,
            Err(_) => continue,
        };
        let ll = fit.log_likelihood;
        let better = match &best {
            None => true,
            Some((best_ll, best_beta, _, _)) => {
                let gap = ll - *best_ll;
                let tol = tie_tol * (T::one() + best_ll.abs());
                gap > tol || (gap.abs() <= tol && beta.abs() < best_beta.abs())
            }
        };
        if better {
            best = Some((ll, beta, params, spread));
        }
    }
    let (log_likelihood, hedge_ratio, fitted, spread) = best.ok_or_else(|| {
        Error::ConstructionFailed("every hedge-ratio candidate produced a degenerate fit".into())
    })?;
    let times = (0..spread.len()).map(|j| cast_usize::<T>(j) * dt).collect();
    let path = Path::from_values(times, spread)?;
    Ok((
        SpreadSpec {
            symbol_a: symbol_a.to_string(),
            symbol_b: symbol_b.to_string(),
            hedge_ratio,
            fitted,
            log_likelihood,
        },
        path,
    ))
}

/// Block-bootstrap settings; `block_length` may not exceed the source length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub block_length: usize,
    pub sample_count: usize,
    pub seed: u64,
}

/// Default bootstrap block length for a source of `n` points.
pub fn default_block_length(n: usize) -> usize {
    (n / 10).max(5)
}

/// Resample the source's first differences in contiguous blocks and
/// cumulative-sum from `anchor`, producing `sample_count` paths on `grid`.
/// Sample `i` draws from the substream `(seed, i)`.
pub fn block_bootstrap<T: Scalar>(
    source: &[T],
    config: &BootstrapConfig,
    grid: &TimeGrid<T>,
    anchor: T,
) -> Result<Vec<Path<T>>> {
    if config.block_length < 1 {
        return Err(Error::InvalidArgument("block_length must be >= 1".into()));
    }
    if source.len() < 2 {
        return Err(Error::InvalidArgument(
            "bootstrap source needs at least 2 points".into(),
        ));
    }
    if config.block_length > source.len() {
        return Err(Error::InvalidArgument(format!(
            "block_length {} exceeds source length {}",
            config.block_length,
            source.len()
        )));
    }
    let diffs: Vec<T> = source.windows(2).map(|w| w[1] - w[0]).collect();
    let block = config.block_length.min(diffs.len());
    let max_start = diffs.len() - block;
    let needed = grid.steps();
    let times = grid.times();
    Ok((0..config.sample_count as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(i);
            let mut values = Vec::with_capacity(needed + 1);
            let mut x = anchor;
            values.push(x);
            'outer: loop {
                let start = rng.gen_range(0..=max_start);
                for &d in &diffs[start..start + block] {
                    x += d;
                    values.push(x);
                    if values.len() == needed + 1 {
                        break 'outer;
                    }
                }
            }
            Path::from_values(times.clone(), values).expect("grid is strictly increasing")
        })
        .collect())
}

/// Source of training sample paths for a stopping problem.
#[derive(Debug, Clone)]
pub enum SampleGenerator<T> {
    /// Exact OU transitions with the given parameters.
    Ou { params: OuParams<T> },
    /// Difference-block bootstrap of an observed source series.
    Bootstrap { source: Vec<T>, block_length: usize },
}

impl<T: Scalar> SampleGenerator<T> {
    pub fn generate(&self, x0: T, grid: &TimeGrid<T>, m: usize, seed: u64) -> Result<Vec<Path<T>>>
    where
        StandardNormal: Distribution<T>,
    {
        match self {
            SampleGenerator::Ou { params } => Ok(simulate_ou_batch(params, x0, grid, m, seed)),
            SampleGenerator::Bootstrap {
                source,
                block_length,
            } => block_bootstrap(
                source,
                &BootstrapConfig {
                    block_length: *block_length,
                    sample_count: m,
                    seed,
                },
                grid,
                x0,
            ),
        }
    }
}

/// Generate `m` sample paths anchored at `x0`, evaluate the payoff on raw
/// values, standardize the values over the whole set, augment with
/// unit-rescaled time, and precompute prefix signatures of the given order.
pub fn generate_training_set<T, F>(
    generator: &SampleGenerator<T>,
    x0: T,
    grid: &TimeGrid<T>,
    m: usize,
    order: usize,
    payoff: F,
    seed: u64,
) -> Result<TrainingSet<T>>
where
    T: Scalar,
    F: Fn(&[T], &[T]) -> Vec<T> + Sync,
    StandardNormal: Distribution<T>,
{
    if m < 1 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let paths = generator.generate(x0, grid, m, seed)?;
    let normalizer = Normalizer::fit(
        paths
            .iter()
            .flat_map(|p| p.coordinate(0))
            .collect::<Vec<_>>()
            .into_iter(),
    );
    let samples: Vec<Result<TrainingSample<T>>> = paths
        .par_iter()
        .map(|path| {
            let raw = path.coordinate(0);
            let times = path.times();
            let payoff_values = payoff(times, &raw);
            let standardized = normalizer.apply_all(&raw);
            let std_path = Path::from_values(times.to_vec(), standardized)?;
            let augmented = augment(&std_path, TimeScaling::Unit);
            Ok(TrainingSample {
                prefixes: prefix_signatures(&augmented, order)?,
                payoff: PayoffPath::new(payoff_values)?,
            })
        })
        .collect();
    let samples = samples.into_iter().collect::<Result<Vec<_>>>()?;
    TrainingSet::new(samples, normalizer)
}
