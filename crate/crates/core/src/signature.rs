//! Truncated signatures of time-augmented paths and the tensor-algebra
//! operations behind them.
//!
//! Discrete series are read as piecewise-linear interpolants. A single
//! segment with increment `Δ` has the closed-form signature
//! `(1, Δ, Δ⊗Δ/2!, …, Δ⊗ⁿ/n!)`; signatures of longer paths fold those
//! per-segment terms through the truncated tensor product, which is exact
//! for the interpolant and costs one product per segment.
//!
//! Level `n` coefficients are indexed by multi-indices `(i₁,…,iₙ)`,
//! `iⱼ ∈ {1..d}`, in lexicographic order, and all levels are stored as one
//! flat graded array so that pairing a dual vector against a signature is a
//! single dot product.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{cast_usize, Scalar};

/// Number of coefficients in levels `0..=order` for alphabet size `dimension`.
pub fn graded_len(dimension: usize, order: usize) -> usize {
    let mut len = 0;
    let mut pow = 1;
    for _ in 0..=order {
        len += pow;
        pow *= dimension;
    }
    len
}

/// Flat offsets of each level within the graded array; `offsets[n]..offsets[n+1]`
/// spans level `n`.
pub fn level_offsets(dimension: usize, order: usize) -> Vec<usize> {
    let mut offs = Vec::with_capacity(order + 2);
    let mut acc = 0;
    let mut pow = 1;
    offs.push(0);
    for _ in 0..=order {
        acc += pow;
        pow *= dimension;
        offs.push(acc);
    }
    offs
}

fn check_finite<T: Scalar>(values: &[T], what: &str) -> Result<()> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(format!("{what} must be finite")));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Paths
// ---------------------------------------------------------------------------

/// A discrete `d`-dimensional path: strictly increasing timestamps and one
/// point per timestamp.
#[derive(Debug, Clone, PartialEq)]
pub struct Path<T> {
    times: Vec<T>,
    points: Vec<Vec<T>>,
}

impl<T: Scalar> Path<T> {
    pub fn new(times: Vec<T>, points: Vec<Vec<T>>) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::InvalidArgument(
                "path needs at least two points".into(),
            ));
        }
        if times.len() != points.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} timestamps vs {} points",
                times.len(),
                points.len()
            )));
        }
        check_finite(&times, "timestamps")?;
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument(
                "timestamps must be strictly increasing".into(),
            ));
        }
        let d = points[0].len();
        if d == 0 {
            return Err(Error::InvalidArgument("path dimension must be >= 1".into()));
        }
        for p in &points {
            if p.len() != d {
                return Err(Error::ShapeMismatch(format!(
                    "point dimension {} vs {}",
                    p.len(),
                    d
                )));
            }
            check_finite(p, "path values")?;
        }
        Ok(Self { times, points })
    }

    /// One-dimensional path from a value series.
    pub fn from_values(times: Vec<T>, values: Vec<T>) -> Result<Self> {
        let points = values.into_iter().map(|v| vec![v]).collect();
        Self::new(times, points)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false // invariant: length >= 2
    }

    pub fn dimension(&self) -> usize {
        self.points[0].len()
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn points(&self) -> &[Vec<T>] {
        &self.points
    }

    /// The `i`-th coordinate as a contiguous series.
    pub fn coordinate(&self, i: usize) -> Vec<T> {
        self.points.iter().map(|p| p[i]).collect()
    }
}

/// Whether the time grid of the augmented path is affinely rescaled to
/// `[0,1]` before signature computation. Rescaling keeps level-`n`
/// magnitudes comparable across horizons and is the default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TimeScaling {
    Unit,
    Raw,
}

/// A path whose first coordinate is its own (possibly rescaled) time grid,
/// which makes the signature a complete characterization of the path.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedPath<T> {
    inner: Path<T>,
}

impl<T: Scalar> AugmentedPath<T> {
    /// Wrap a path whose first coordinate already equals its time grid.
    pub fn from_path(path: Path<T>) -> Result<Self> {
        if path.times.iter().zip(&path.points).any(|(t, p)| *t != p[0]) {
            return Err(Error::InvalidArgument(
                "first coordinate must equal the time grid".into(),
            ));
        }
        Ok(Self { inner: path })
    }

    pub fn inner(&self) -> &Path<T> {
        &self.inner
    }

    /// Dimension including the time coordinate (`1 + d`).
    pub fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    pub fn len(&self) -> usize {
        self.inner.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Split at an interior grid index; both halves share the boundary point.
    pub fn split_at(&self, index: usize) -> Result<(Self, Self)> {
        if index == 0 || index + 1 >= self.len() {
            return Err(Error::InvalidArgument(format!(
                "split index {index} must be interior"
            )));
        }
        let head = Path::new(
            self.inner.times[..=index].to_vec(),
            self.inner.points[..=index].to_vec(),
        )?;
        let tail = Path::new(
            self.inner.times[index..].to_vec(),
            self.inner.points[index..].to_vec(),
        )?;
        Ok((Self { inner: head }, Self { inner: tail }))
    }
}

/// Prepend the time grid as coordinate 0, optionally rescaling it to `[0,1]`.
pub fn augment<T: Scalar>(path: &Path<T>, scaling: TimeScaling) -> AugmentedPath<T> {
    let t0 = path.times[0];
    let span = *path.times.last().unwrap() - t0;
    let times: Vec<T> = match scaling {
        TimeScaling::Unit => path.times.iter().map(|&t| (t - t0) / span).collect(),
        TimeScaling::Raw => path.times.clone(),
    };
    let points = times
        .iter()
        .zip(&path.points)
        .map(|(&t, p)| {
            let mut q = Vec::with_capacity(1 + p.len());
            q.push(t);
            q.extend_from_slice(p);
            q
        })
        .collect();
    AugmentedPath {
        inner: Path { times, points },
    }
}

// ---------------------------------------------------------------------------
// Graded coefficient arrays
// ---------------------------------------------------------------------------

/// The truncated signature `(1, 𝕏¹, …, 𝕏ᴺ)` stored as one flat graded array.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSignature<T> {
    dimension: usize,
    order: usize,
    coeffs: Vec<T>,
}

impl<T: Scalar> TruncatedSignature<T> {
    /// The unit element `(1, 0, …, 0)` — the signature of an empty interval.
    pub fn unit(dimension: usize, order: usize) -> Self {
        let mut coeffs = vec![T::zero(); graded_len(dimension, order)];
        coeffs[0] = T::one();
        Self {
            dimension,
            order,
            coeffs,
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Flat graded coefficients, levels `0..=order` concatenated.
    pub fn as_slice(&self) -> &[T] {
        &self.coeffs
    }

    /// Coefficients of level `n` (length `dᶰ`).
    pub fn level(&self, n: usize) -> &[T] {
        let offs = level_offsets(self.dimension, self.order);
        &self.coeffs[offs[n]..offs[n + 1]]
    }

    /// Levels as nested arrays, the JSON wire layout.
    pub fn levels(&self) -> Vec<Vec<T>> {
        (0..=self.order).map(|n| self.level(n).to_vec()).collect()
    }

    pub fn to_json(&self) -> String
    where
        T: Serialize,
    {
        let doc = SignatureJson {
            dimension: self.dimension,
            order: self.order,
            levels: self.levels(),
        };
        serde_json::to_string(&doc).expect("signature serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct SignatureJson<T> {
    dimension: usize,
    order: usize,
    levels: Vec<Vec<T>>,
}

/// A linear functional on truncated signatures, stored in the same graded
/// layout so pairing is a dot product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualVector<T> {
    dimension: usize,
    order: usize,
    coeffs: Vec<T>,
}

impl<T: Scalar> DualVector<T> {
    pub fn zeros(dimension: usize, order: usize) -> Self {
        Self {
            dimension,
            order,
            coeffs: vec![T::zero(); graded_len(dimension, order)],
        }
    }

    pub fn from_coeffs(dimension: usize, order: usize, coeffs: Vec<T>) -> Result<Self> {
        let want = graded_len(dimension, order);
        if coeffs.len() != want {
            return Err(Error::ShapeMismatch(format!(
                "graded array has {} coefficients, expected {} for (d={}, N={})",
                coeffs.len(),
                want,
                dimension,
                order
            )));
        }
        check_finite(&coeffs, "dual coefficients")?;
        Ok(Self {
            dimension,
            order,
            coeffs,
        })
    }

    /// Basis functional: 1 on the given flat slot, 0 elsewhere.
    pub fn basis(dimension: usize, order: usize, flat_index: usize) -> Self {
        let mut v = Self::zeros(dimension, order);
        v.coeffs[flat_index] = T::one();
        v
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn as_slice(&self) -> &[T] {
        &self.coeffs
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.coeffs
    }
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Outer (tensor) product of two flat arrays, row-major: entry `(i,j)` is
/// `u[i]·v[j]`. Folding generalizes it associatively to n-way products.
pub fn tensor_product<T: Scalar>(u: &[T], v: &[T]) -> Result<Vec<T>> {
    if u.is_empty() || v.is_empty() {
        return Err(Error::InvalidArgument(
            "tensor product of an empty array".into(),
        ));
    }
    let mut out = Vec::with_capacity(u.len() * v.len());
    for &a in u {
        for &b in v {
            out.push(a * b);
        }
    }
    Ok(out)
}

/// Per-segment powers `Δ⊗ᵐ/m!` for `m = 0..=order`.
fn segment_powers<T: Scalar>(increment: &[T], order: usize) -> Vec<Vec<T>> {
    let mut powers: Vec<Vec<T>> = Vec::with_capacity(order + 1);
    powers.push(vec![T::one()]);
    for m in 1..=order {
        let prev = &powers[m - 1];
        let mut next = Vec::with_capacity(prev.len() * increment.len());
        let inv_m = T::one() / cast_usize::<T>(m);
        for &a in prev {
            for &b in increment {
                next.push(a * b * inv_m);
            }
        }
        powers.push(next);
    }
    powers
}

/// Closed-form signature of one linear segment: level `n` is `Δ⊗ⁿ/n!`.
pub fn segment_signature<T: Scalar>(
    increment: &[T],
    order: usize,
) -> Result<TruncatedSignature<T>> {
    if increment.is_empty() {
        return Err(Error::InvalidArgument("empty increment".into()));
    }
    if order < 1 {
        return Err(Error::InvalidArgument("order must be >= 1".into()));
    }
    check_finite(increment, "increment")?;
    let d = increment.len();
    let mut coeffs = Vec::with_capacity(graded_len(d, order));
    for level in segment_powers(increment, order) {
        coeffs.extend(level);
    }
    Ok(TruncatedSignature {
        dimension: d,
        order,
        coeffs,
    })
}

/// Truncated tensor product of two signatures over the same interval split:
/// level `n` of the output is `Σₖ aₖ ⊗ bₙ₋ₖ`. By Chen's identity this is the
/// signature of the concatenated path.
pub fn chen_concat<T: Scalar>(
    a: &TruncatedSignature<T>,
    b: &TruncatedSignature<T>,
) -> Result<TruncatedSignature<T>> {
    if a.dimension != b.dimension || a.order != b.order {
        return Err(Error::ShapeMismatch(format!(
            "(d={}, N={}) vs (d={}, N={})",
            a.dimension, a.order, b.dimension, b.order
        )));
    }
    let d = a.dimension;
    let order = a.order;
    let offs = level_offsets(d, order);
    let mut coeffs = vec![T::zero(); graded_len(d, order)];
    coeffs[0] = T::one();
    for n in 1..=order {
        let out = &mut coeffs[offs[n]..offs[n + 1]];
        for k in 0..=n {
            let left = &a.coeffs[offs[k]..offs[k + 1]];
            let right = &b.coeffs[offs[n - k]..offs[n - k + 1]];
            let stride = right.len();
            for (i, &x) in left.iter().enumerate() {
                if x == T::zero() {
                    continue;
                }
                let row = &mut out[i * stride..(i + 1) * stride];
                for (slot, &y) in row.iter_mut().zip(right) {
                    *slot += x * y;
                }
            }
        }
    }
    Ok(TruncatedSignature {
        dimension: d,
        order,
        coeffs,
    })
}

/// In-place Chen product with one segment's closed-form signature. Levels are
/// updated top-down so lower levels still hold their previous values.
fn concat_segment_in_place<T: Scalar>(
    coeffs: &mut [T],
    offs: &[usize],
    order: usize,
    increment: &[T],
) {
    let powers = segment_powers(increment, order);
    for n in (1..=order).rev() {
        // Split so `out` (level n) and the lower levels can be borrowed together.
        let (lower, upper) = coeffs.split_at_mut(offs[n]);
        let out = &mut upper[..offs[n + 1] - offs[n]];
        for k in 0..n {
            let left = &lower[offs[k]..offs[k + 1]];
            let right = &powers[n - k];
            let stride = right.len();
            for (i, &x) in left.iter().enumerate() {
                if x == T::zero() {
                    continue;
                }
                let row = &mut out[i * stride..(i + 1) * stride];
                for (slot, &y) in row.iter_mut().zip(right) {
                    *slot += x * y;
                }
            }
        }
    }
}

/// Truncated signature of an augmented path over its whole interval.
pub fn signature<T: Scalar>(
    path: &AugmentedPath<T>,
    order: usize,
) -> Result<TruncatedSignature<T>> {
    if order < 1 {
        return Err(Error::InvalidArgument("order must be >= 1".into()));
    }
    if path.len() < 2 {
        return Err(Error::InvalidArgument(
            "path needs at least two points".into(),
        ));
    }
    let d = path.dimension();
    let offs = level_offsets(d, order);
    let mut sig = TruncatedSignature::unit(d, order);
    let pts = path.inner.points();
    let mut delta = vec![T::zero(); d];
    for w in pts.windows(2) {
        for (slot, (&b, &a)) in delta.iter_mut().zip(w[1].iter().zip(w[0].iter())) {
            *slot = b - a;
        }
        concat_segment_in_place(&mut sig.coeffs, &offs, order, &delta);
    }
    Ok(sig)
}

/// Signatures of the augmented path over `[t₀, tⱼ]` for every grid index `j`;
/// element 0 is the unit signature. One Chen product per step.
pub fn prefix_signatures<T: Scalar>(
    path: &AugmentedPath<T>,
    order: usize,
) -> Result<Vec<TruncatedSignature<T>>> {
    if order < 1 {
        return Err(Error::InvalidArgument("order must be >= 1".into()));
    }
    if path.len() < 2 {
        return Err(Error::InvalidArgument(
            "path needs at least two points".into(),
        ));
    }
    let d = path.dimension();
    let offs = level_offsets(d, order);
    let pts = path.inner.points();
    let mut out = Vec::with_capacity(pts.len());
    let mut sig = TruncatedSignature::unit(d, order);
    out.push(sig.clone());
    let mut delta = vec![T::zero(); d];
    for w in pts.windows(2) {
        for (slot, (&b, &a)) in delta.iter_mut().zip(w[1].iter().zip(w[0].iter())) {
            *slot = b - a;
        }
        concat_segment_in_place(&mut sig.coeffs, &offs, order, &delta);
        out.push(sig.clone());
    }
    Ok(out)
}

/// Natural pairing `⟨ℓ, 𝕏⟩`: dot product over the flat graded arrays.
pub fn pair<T: Scalar>(l: &DualVector<T>, s: &TruncatedSignature<T>) -> Result<T> {
    if l.dimension != s.dimension || l.order != s.order {
        return Err(Error::ShapeMismatch(format!(
            "dual (d={}, N={}) vs signature (d={}, N={})",
            l.dimension, l.order, s.dimension, s.order
        )));
    }
    Ok(dot(&l.coeffs, &s.coeffs))
}

#[inline]
pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}
