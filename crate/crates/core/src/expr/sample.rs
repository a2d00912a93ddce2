//! Randomized numeric equality oracle.
//!
//! Identities between expressions are decided by sampling: draw points
//! uniformly from a box, evaluate both sides, and compare with a relative
//! tolerance. Points where either side raises a *domain* error are skipped
//! and redrawn, up to a fixed multiple of the requested count; anything
//! else (an unbound variable, or too few valid points) is a hard error so
//! misconfigured checks cannot silently pass.
//!
//! Sampling is counter-based: coordinate `j` of point `k` is a pure
//! function of `(seed, k, j)` through a SplitMix64-style finalizer, so a
//! given box always yields the same points bit for bit, on any platform,
//! with no sequential generator state to thread around.

use super::{Bindings, EvalError, Expr};
use thiserror::Error;

/// How many draws are allowed per requested sample: `count` points must be
/// retained within `RESAMPLE_BUDGET * count` attempts.
pub const RESAMPLE_BUDGET: u64 = 10;

/// Sampling failure.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SampleError {
    #[error("interval for `{var}` is invalid: [{lo}, {hi}]")]
    InvalidInterval { var: String, lo: f64, hi: f64 },
    #[error("sample count must be at least 1")]
    InvalidCount,
    #[error(
        "only {retained} of {wanted} sample points were valid after {attempted} draws \
         (the rest hit domain errors); shrink or move the box"
    )]
    InsufficientSamples {
        wanted: usize,
        retained: usize,
        attempted: u64,
    },
    /// An unbound variable or similar hard evaluation failure: the box does
    /// not cover the expression's variables.
    #[error("evaluation failed at a sample point: {0}")]
    Eval(#[from] EvalError),
}

/// Axis-aligned sampling box: an interval per variable, a seed, and the
/// number of points identity checks must retain.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBox {
    intervals: Vec<(String, f64, f64)>, // sorted by name
    seed: u64,
    count: usize,
}

impl SampleBox {
    /// Build a box from `(name, [lo, hi])` pairs. Intervals must be finite
    /// with `lo < hi`, and `count` at least 1.
    pub fn new<S: Into<String>>(
        intervals: impl IntoIterator<Item = (S, (f64, f64))>,
        seed: u64,
        count: usize,
    ) -> Result<SampleBox, SampleError> {
        if count == 0 {
            return Err(SampleError::InvalidCount);
        }
        let mut list: Vec<(String, f64, f64)> = Vec::new();
        for (name, (lo, hi)) in intervals {
            let name = name.into();
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(SampleError::InvalidInterval { var: name, lo, hi });
            }
            list.push((name, lo, hi));
        }
        list.sort_by(|a, b| a.0.cmp(&b.0));
        list.dedup_by(|a, b| a.0 == b.0);
        Ok(SampleBox {
            intervals: list,
            seed,
            count,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Same box, different seed.
    pub fn with_seed(&self, seed: u64) -> SampleBox {
        SampleBox {
            intervals: self.intervals.clone(),
            seed,
            count: self.count,
        }
    }

    /// Variable names covered by the box, sorted.
    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.intervals.iter().map(|(name, _, _)| name.as_str())
    }

    /// The `k`-th sample point. A pure function of the box and `k`.
    pub fn point(&self, k: u64) -> Bindings {
        self.intervals
            .iter()
            .enumerate()
            .map(|(j, (name, lo, hi))| {
                let u = unit(self.seed, k, j as u64);
                (name.clone(), lo + u * (hi - lo))
            })
            .collect()
    }

    /// Draw points until `predicate`-valid ones reach `self.count`, skipping
    /// draws where `predicate` reports a domain error. Returns the retained
    /// `(index, point)` pairs or an error if the budget runs out.
    pub fn retained<T>(
        &self,
        mut value_at: impl FnMut(&Bindings) -> Result<T, EvalError>,
    ) -> Result<Vec<(Bindings, T)>, SampleError> {
        let wanted = self.count;
        let budget = RESAMPLE_BUDGET * wanted as u64;
        let mut kept = Vec::with_capacity(wanted);
        let mut k = 0u64;
        while kept.len() < wanted && k < budget {
            let point = self.point(k);
            k += 1;
            match value_at(&point) {
                Ok(value) => kept.push((point, value)),
                Err(err) if err.is_domain() => continue,
                Err(err) => return Err(SampleError::Eval(err)),
            }
        }
        if kept.len() < wanted {
            return Err(SampleError::InsufficientSamples {
                wanted,
                retained: kept.len(),
                attempted: k,
            });
        }
        Ok(kept)
    }

    /// First sample point at which `value_at` succeeds. Used to pick
    /// deterministic initial conditions and triviality probes.
    pub fn first_valid<T>(
        &self,
        mut value_at: impl FnMut(&Bindings) -> Result<T, EvalError>,
    ) -> Result<(Bindings, T), SampleError> {
        let budget = RESAMPLE_BUDGET * self.count as u64;
        for k in 0..budget {
            let point = self.point(k);
            match value_at(&point) {
                Ok(value) => return Ok((point, value)),
                Err(err) if err.is_domain() => continue,
                Err(err) => return Err(SampleError::Eval(err)),
            }
        }
        Err(SampleError::InsufficientSamples {
            wanted: 1,
            retained: 0,
            attempted: budget,
        })
    }
}

/// SplitMix64 finalizer: a well-mixed bijection on 64-bit words.
pub(crate) fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform value in [0, 1) for coordinate `j` of point `k` under `seed`.
fn unit(seed: u64, k: u64, j: u64) -> f64 {
    let word = mix(seed ^ mix(k ^ mix(j)));
    // Top 53 bits -> [0, 1) with full double resolution.
    (word >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Outcome of a randomized equality check.
#[derive(Debug, Clone, PartialEq)]
pub struct EqualityReport {
    /// True when every retained point satisfied the tolerance.
    pub equal: bool,
    /// Largest observed residual `|a - b| / (1 + max(|a|, |b|))`.
    pub worst_residual: f64,
    /// Point where the worst residual occurred.
    pub worst_point: Bindings,
    /// Number of retained (valid) sample points; always `box.count`.
    pub retained: usize,
    /// Tolerance the residuals were compared against.
    pub rtol: f64,
}

/// Decide `a == b` numerically on `sample_box` at relative tolerance
/// `rtol`: equal iff `|a - b| <= rtol * (1 + max(|a|, |b|))` at every
/// retained point.
pub fn equal_numeric(
    a: &Expr,
    b: &Expr,
    sample_box: &SampleBox,
    rtol: f64,
) -> Result<EqualityReport, SampleError> {
    let kept = sample_box.retained(|point| {
        let va = a.eval(point)?;
        let vb = b.eval(point)?;
        Ok((va, vb))
    })?;
    let mut worst_residual = -1.0;
    let mut worst_point = Bindings::new();
    for (point, (va, vb)) in &kept {
        let residual = (va - vb).abs() / (1.0 + va.abs().max(vb.abs()));
        if residual > worst_residual {
            worst_residual = residual;
            worst_point = point.clone();
        }
    }
    Ok(EqualityReport {
        equal: worst_residual <= rtol,
        worst_residual,
        worst_point,
        retained: kept.len(),
        rtol,
    })
}

/// Finite-difference spot check of the symbolic derivative of `e` with
/// respect to `var` at the point `at`: returns
/// `|d_sym - d_fd| / (1 + |d_sym|)` where `d_fd` is the central difference
/// with stencil width `h`.
pub fn fd_check(e: &Expr, var: &str, at: &Bindings, h: f64) -> Result<f64, EvalError> {
    let d_sym = e.diff(var).eval(at)?;
    let x = at
        .get(var)
        .ok_or_else(|| EvalError::Unbound(var.to_string()))?;
    let plus = e.eval(&at.clone().with(var, x + h))?;
    let minus = e.eval(&at.clone().with(var, x - h))?;
    let d_fd = (plus - minus) / (2.0 * h);
    Ok((d_sym - d_fd).abs() / (1.0 + d_sym.abs()))
}
