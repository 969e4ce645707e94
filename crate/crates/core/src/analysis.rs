//! Large-system analysis: density evolution for the peeling decoder, the
//! constant optimizer, and closed-form scheme sizes.
//!
//! With `M = c·K` bins and left degree `ℓ`, a random edge of the pruned graph
//! sees a bin of degree one with probability `ρ₁ = e^{-λ}` and degree two with
//! probability `ρ₂ = λe^{-λ}`, where `λ = ℓ/c`. Peeling resolves singletons
//! and resolvable doubletons only, so the probability `p_j` that an edge's
//! item is still unknown after `j` rounds obeys
//!
//! ```text
//! p_{j+1} = [1 - (ρ₁ + ρ₂(1 - p_j))]^{ℓ-1}
//! ```
//!
//! Natural logarithms are used for `log K` in parameter formulas; test counts
//! use `⌈log₂ r⌉` bits per index.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ecc::CodeSpec;
use crate::graph::{divisible_bins, BinSizing};
use crate::signature::index_bits;
use crate::{Error, Result};

pub const DE_MAX_ITER: usize = 10_000;
pub const DE_TOL: f64 = 1e-12;
pub const C_RESOLUTION: f64 = 0.01;
pub const LEFT_DEGREE_RANGE: std::ops::RangeInclusive<u32> = 2..=40;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DEParams {
    pub left_degree: u32,
    /// Bins per defective, `M / K`.
    pub c: f64,
}

impl DEParams {
    pub fn new(left_degree: u32, c: f64) -> Result<Self> {
        if left_degree < 2 {
            return Err(Error::config(format!("left degree must be ≥ 2 (got {left_degree})")));
        }
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::config(format!("c must be positive (got {c})")));
        }
        Ok(DEParams { left_degree, c })
    }

    pub fn lambda(&self) -> f64 {
        self.left_degree as f64 / self.c
    }

    /// One step of the recursion.
    pub fn step(&self, p: f64) -> f64 {
        let (r1, r2) = edge_dd_limit(self.left_degree, self.c);
        (1.0 - (r1 + r2 * (1.0 - p))).max(0.0).powi(self.left_degree as i32 - 1)
    }

    /// Fraction of defectives none of whose `ℓ` edges is resolved when edges
    /// carry unknown-probability `p`.
    pub fn unidentified_fraction(&self, p: f64) -> f64 {
        let (r1, r2) = edge_dd_limit(self.left_degree, self.c);
        (1.0 - (r1 + r2 * (1.0 - p))).max(0.0).powi(self.left_degree as i32)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DEResult {
    pub fixed_point: f64,
    /// Every iterate, starting with `p₀`.
    pub trajectory: Vec<f64>,
    pub converged: bool,
}

/// Limiting singleton and doubleton edge coefficients `(ρ₁, ρ₂)`.
pub fn edge_dd_limit(left_degree: u32, c: f64) -> (f64, f64) {
    let lambda = left_degree as f64 / c;
    let e = (-lambda).exp();
    (e, lambda * e)
}

/// Iterate from `p0` until successive iterates differ by less than `tol` or
/// `max_iter` steps have run.
pub fn de_iterate(params: DEParams, p0: f64, max_iter: usize, tol: f64) -> DEResult {
    let mut trajectory = vec![p0];
    let mut p = p0;
    let mut converged = false;
    for _ in 0..max_iter {
        let next = params.step(p);
        trajectory.push(next);
        let done = (next - p).abs() < tol;
        p = next;
        if done {
            converged = true;
            break;
        }
    }
    DEResult {
        fixed_point: p,
        trajectory,
        converged,
    }
}

/// `p∞` with the default start, cap and tolerance.
pub fn de_fixed_point(params: DEParams) -> f64 {
    de_iterate(params, 1.0, DE_MAX_ITER, DE_TOL).fixed_point
}

fn meets(left_degree: u32, c: f64, epsilon: f64) -> bool {
    de_fixed_point(DEParams { left_degree, c }) <= epsilon
}

/// Smallest `c` on the grid `resolution·ℕ` with `p∞(ℓ, c) ≤ ε`, searched up
/// to `c_max`. `None` if even `c_max` misses.
pub fn min_c(epsilon: f64, left_degree: u32, resolution: f64, c_max: f64) -> Option<f64> {
    let mut hi = (c_max / resolution).ceil() as u64;
    if !meets(left_degree, hi as f64 * resolution, epsilon) {
        return None;
    }
    let mut lo = 0u64; // c = 0 never meets
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if meets(left_degree, mid as f64 * resolution, epsilon) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi as f64 * resolution)
}

/// `(ℓ*, c*)` minimizing bins per defective for error floor `ε`; ties go to
/// the smaller `ℓ`.
pub fn optimize_constants(epsilon: f64) -> Result<(u32, f64)> {
    optimize_constants_with(epsilon, LEFT_DEGREE_RANGE, C_RESOLUTION)
}

pub fn optimize_constants_with(
    epsilon: f64,
    left_degrees: std::ops::RangeInclusive<u32>,
    resolution: f64,
) -> Result<(u32, f64)> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::config(format!("ε must lie in (0, 1) (got {epsilon})")));
    }
    if *left_degrees.start() < 2 || left_degrees.is_empty() {
        return Err(Error::config("left degree range must be nonempty and start at ≥ 2"));
    }
    if resolution.is_nan() || resolution <= 0.0 {
        return Err(Error::config("resolution must be positive"));
    }
    let c_max = 4.0 * *left_degrees.end() as f64 + 10.0;
    left_degrees
        .into_par_iter()
        .filter_map(|l| min_c(epsilon, l, resolution, c_max).map(|c| (l, c)))
        .collect::<Vec<_>>()
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
        .ok_or_else(|| Error::config(format!("no left degree reaches ε = {epsilon}")))
}

/// Expected fraction of bins holding exactly `d` defectives when each of the
/// `r` slots is defective with probability `β = K/N`.
pub fn pruned_right_dd(r: u64, beta: f64, d: u64) -> f64 {
    if d > r {
        return 0.0;
    }
    let ln_choose: f64 = (0..d).map(|i| ((r - i) as f64).ln() - ((i + 1) as f64).ln()).sum();
    (ln_choose + d as f64 * beta.ln() + (r - d) as f64 * (1.0 - beta).ln()).exp()
}

/// Concrete sizes of a scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeSize {
    pub left_degree: u32,
    pub n_bins: u64,
    /// Largest bin size.
    pub r: u64,
    pub sections: usize,
    /// Bits per segment.
    pub n_seg: usize,
    /// Total tests, `2·s·M·n_seg`.
    pub m: u64,
}

fn size_bins(n: u64, left_degree: u32, target: u64, sizing: BinSizing) -> Result<(u64, u64)> {
    match sizing {
        BinSizing::Exact => divisible_bins(n, left_degree, target),
        BinSizing::Balanced => {
            let m = target.max(1);
            let edges = n
                .checked_mul(left_degree as u64)
                .ok_or_else(|| Error::config("N·ℓ overflows"))?;
            Ok((m, edges.div_ceil(m)))
        }
    }
}

fn finish(left_degree: u32, n_bins: u64, r: u64, sections: usize, code: CodeSpec) -> Result<SchemeSize> {
    if r < 2 {
        return Err(Error::config(format!("bins of size {r} carry no index")));
    }
    if sections < 1 {
        return Err(Error::config("need at least one section"));
    }
    let n_seg = code.build(index_bits(r))?.codeword_bits();
    Ok(SchemeSize {
        left_degree,
        n_bins,
        r,
        sections,
        n_seg,
        m: 2 * sections as u64 * n_bins * n_seg as u64,
    })
}

/// Peeling scheme with `M = ⌈cK⌉` (before sizing adjustment). Use
/// `CodeSpec::Identity` for the noiseless decoder.
pub fn peeling_size(
    n: u64,
    k: u64,
    left_degree: u32,
    c: f64,
    sections: usize,
    code: CodeSpec,
    sizing: BinSizing,
) -> Result<SchemeSize> {
    if k == 0 || k > n {
        return Err(Error::config(format!("need 1 ≤ K ≤ N (K = {k}, N = {n})")));
    }
    if c.is_nan() || c <= 0.0 {
        return Err(Error::config("c must be positive"));
    }
    let target = (c * k as f64).ceil() as u64;
    let (m, r) = size_bins(n, left_degree, target, sizing)?;
    finish(left_degree, m, r, sections, code)
}

/// `c_α = e(1+α)`.
pub fn c_alpha(alpha: f64) -> f64 {
    std::f64::consts::E * (1.0 + alpha)
}

/// Left degree `⌈c_α ln K⌉` for real `K`, clamped to at least 1.
pub fn singleton_only_left_degree(k: f64, alpha: f64) -> u32 {
    ((c_alpha(alpha) * k.ln()).ceil() as u32).max(1)
}

/// `(ℓ, r, M)` for whole-set recovery with the singleton-only decoder:
/// `ℓ = ⌈c_α ln K⌉`, `r = ⌈N/K⌉` and `M = N·ℓ/r`, rounded up to a divisor of
/// `N·ℓ` under exact sizing.
pub fn singleton_only_params(n: u64, k: u64, alpha: f64, sizing: BinSizing) -> Result<(u32, u64, u64)> {
    if k == 0 || k > n {
        return Err(Error::config(format!("need 1 ≤ K ≤ N (K = {k}, N = {n})")));
    }
    if alpha < 0.0 {
        return Err(Error::config("α must be nonnegative"));
    }
    let l = singleton_only_left_degree(k as f64, alpha);
    let r0 = n.div_ceil(k).max(2);
    let target = (n * l as u64).div_ceil(r0);
    let (m, r) = size_bins(n, l, target, sizing)?;
    Ok((l, r, m))
}

/// Test count of the singleton-only scheme (one section, uncoded).
pub fn singleton_only_size(n: u64, k: u64, alpha: f64, sizing: BinSizing) -> Result<SchemeSize> {
    let (l, r, m) = singleton_only_params(n, k, alpha, sizing)?;
    finish(l, m, r, 1, CodeSpec::Identity)
}
