//! Model-agnostic cut-off machinery.
//!
//! An [`RdeModel`] exposes a distribution-level push-forward and a
//! sample-level relation; everything else here (plain and cut-off iteration,
//! stationary limits, the center function, displacement dynamics, block
//! construction, assumption checking) is written once against that interface
//! and shared by the hierarchical-graph and cavity families.

pub mod assumptions;
pub mod blocks;

pub use assumptions::{check_assumptions, AssumptionItem, AssumptionReport, ReportSpec};
pub use blocks::{
    build_block, build_schedule, choose_b1_n, Block, BlockSearchParams, CutoffSchedule, Subblock,
};

use crate::error::Error;
use crate::measure::{GridMeasure, GridSpec};
use crate::Result;

/// One draw of the environment variable attached to a tree node.
#[derive(Debug, Clone)]
pub enum NoiseValue {
    /// A single real (the metric model's log rescaling factor).
    Scalar(f64),
    /// Ascending point list (the cavity model's truncated Poisson process).
    Points(Vec<f64>),
}

/// Branching structure of the underlying tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arity {
    Finite(usize),
    Poisson,
}

/// Whether the relation is monotone directly or only after two iterations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Increasing,
    TwoStepIncreasing,
}

/// Deterministic seed derivation: one master seed, distinct streams per
/// (tag, index). SplitMix64 finalizer over the combined words; documented so
/// that every parallel chunk layout is reproducible.
pub fn derive_seed(seed: u64, tag: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(0x9e3779b97f4a7c15u64.wrapping_mul(tag.wrapping_add(1)))
        .wrapping_add(0xbf58476d1ce4e5b9u64.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// The abstract recursive distributional equation.
pub trait RdeModel: Sync {
    /// Grid all measures of this model live on.
    fn grid(&self) -> GridSpec;

    /// One application of the cut-off operator at `cutoff` (`+inf` for the
    /// plain operator). Must be a pure function of `(mu, cutoff, seed)`.
    fn pushforward(&self, mu: &GridMeasure, cutoff: f64, seed: u64) -> Result<GridMeasure>;

    /// Draw one node's noise.
    fn sample_noise(&self, rng: &mut rand_chacha::ChaCha8Rng) -> NoiseValue;

    /// The relation function applied at a node given children's values.
    fn relation(&self, children: &[f64], noise: &NoiseValue) -> f64;

    fn arity(&self) -> Arity;

    fn orientation(&self) -> Orientation;

    /// Translation-equivariant location statistic used by the center
    /// machinery. Monte Carlo models report the grid median; quadrature
    /// models may override with a higher-resolution locator.
    fn location(&self, mu: &GridMeasure) -> f64 {
        mu.median()
    }

    /// Optional variance-reduced estimate of the displacement
    /// `Delta_a(c) = c - S_a(c)`; models with a cheap coupled estimator
    /// override this, everything else routes through [`s_fn`].
    fn delta_estimate(&self, _mu_bar: &GridMeasure, _a: f64, _c: f64, _seed: u64) -> Option<f64> {
        None
    }
}

/// `n_iter` plain applications of the operator.
pub fn phi(model: &dyn RdeModel, mu: &GridMeasure, n_iter: usize, seed: u64) -> Result<GridMeasure> {
    if n_iter == 0 {
        return Err(Error::Domain("phi needs at least one iteration".into()));
    }
    let mut m = mu.clone();
    for i in 0..n_iter {
        m = model.pushforward(&m, f64::INFINITY, derive_seed(seed, 1, i as u64))?;
    }
    Ok(m)
}

/// One application of the cut-off operator at finite `a`.
pub fn phi_cut(model: &dyn RdeModel, mu: &GridMeasure, a: f64, seed: u64) -> Result<GridMeasure> {
    if !a.is_finite() {
        return Err(Error::Domain("phi_cut needs a finite cut-off".into()));
    }
    if a < model.grid().grid_min {
        return Err(Error::DegenerateCutoff(a));
    }
    model.pushforward(mu, a, derive_seed(seed, 2, 0))
}

/// Apply a block of cut-off entries right-to-left (`entries[0]` last).
pub fn phi_block(
    model: &dyn RdeModel,
    mu: &GridMeasure,
    block: &blocks::Block,
    seed: u64,
) -> Result<GridMeasure> {
    let mut m = mu.clone();
    for (j, &a) in block.entries.iter().enumerate().rev() {
        m = model.pushforward(&m, a, derive_seed(seed, 3, j as u64))?;
    }
    Ok(m)
}

/// Iterate the cut-off operator from the point mass at plus infinity until
/// successive iterates are within `tol` in the weak metric. By monotonicity
/// the iterates decrease stochastically; the limit may well be the point
/// mass at minus infinity (that is the subcritical phase).
pub fn stationary_cutoff(
    model: &dyn RdeModel,
    a: f64,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<GridMeasure> {
    if !a.is_finite() {
        return Err(Error::Domain("stationary_cutoff needs a finite cut-off".into()));
    }
    let mut m = GridMeasure::dirac(f64::INFINITY, model.grid());
    let mut last_residual = f64::INFINITY;
    for i in 0..max_iter {
        let next = model.pushforward(&m, a, derive_seed(seed, 4, i as u64))?;
        let d = next.d_weak(&m)?;
        m = next;
        last_residual = d;
        if d <= tol && i > 0 {
            return Ok(m);
        }
    }
    Err(Error::NotConverged {
        iters: max_iter,
        residual: last_residual,
        tol,
    })
}

/// Tuning for the center iteration.
#[derive(Debug, Clone, Copy)]
pub struct CenterParams {
    /// Weak-metric tolerance for "the iterate is a translate of the
    /// reference"; must absorb the model's sampling noise floor.
    pub tol: f64,
    pub max_iter: usize,
    /// Iterations to keep averaging the location difference after first
    /// matching, to damp sampling noise (1 = no averaging).
    pub settle: usize,
}

impl Default for CenterParams {
    fn default() -> Self {
        CenterParams {
            tol: 0.05,
            max_iter: 80,
            settle: 4,
        }
    }
}

/// The center function: iterate the plain operator (two steps at a time for
/// two-step models) until the iterate matches a translate of `mu_bar`, then
/// report the location difference.
pub fn center(
    model: &dyn RdeModel,
    mu: &GridMeasure,
    mu_bar: &GridMeasure,
    params: &CenterParams,
    seed: u64,
) -> Result<f64> {
    let steps_per = match model.orientation() {
        Orientation::Increasing => 1,
        Orientation::TwoStepIncreasing => 2,
    };
    let ref_loc = model.location(mu_bar);
    let mut m = mu.clone();
    let mut residual = f64::INFINITY;
    for i in 0..params.max_iter {
        for j in 0..steps_per {
            m = model.pushforward(
                &m,
                f64::INFINITY,
                derive_seed(seed, 5, (i * steps_per + j) as u64),
            )?;
        }
        let c = model.location(&m) - ref_loc;
        let shifted = mu_bar.translate(c)?;
        residual = m.d_weak(&shifted)?;
        if residual <= params.tol {
            // settle: average the located center over a few more iterations
            let mut acc = c;
            let mut cnt = 1usize;
            for k in 0..params.settle.saturating_sub(1) {
                for j in 0..steps_per {
                    m = model.pushforward(
                        &m,
                        f64::INFINITY,
                        derive_seed(seed, 6, (k * steps_per + j) as u64),
                    )?;
                }
                acc += model.location(&m) - ref_loc;
                cnt += 1;
            }
            return Ok(acc / cnt as f64);
        }
    }
    Err(Error::NotConverged {
        iters: params.max_iter,
        residual,
        tol: params.tol,
    })
}

/// The center-dynamics map `S_a(c)`: the center of the cut-off image of the
/// translate at `c`. `c = +inf` is the paper's boundary case, the center of
/// the point mass at `a`. Two-step models route the cut through one plain
/// step first, so the composition stays monotone.
pub fn s_fn(
    model: &dyn RdeModel,
    mu_bar: &GridMeasure,
    c: f64,
    a: f64,
    params: &CenterParams,
    seed: u64,
) -> Result<f64> {
    let start: GridMeasure = if c == f64::INFINITY {
        GridMeasure::dirac(a, model.grid())
    } else {
        let shifted = mu_bar.translate(c)?;
        let pre = match model.orientation() {
            Orientation::Increasing => shifted,
            Orientation::TwoStepIncreasing => {
                model.pushforward(&shifted, f64::INFINITY, derive_seed(seed, 7, 0))?
            }
        };
        model.pushforward(&pre, a, derive_seed(seed, 7, 1))?
    };
    center(model, &start, mu_bar, params, derive_seed(seed, 7, 2))
}

/// Displacement `Delta_a(c) = c - S_a(c)`; `Delta(a)` of the superexponential
/// assumption is `delta_fn(.., a, 0, ..)`. Uses the model's coupled estimator
/// when it has one, otherwise two center measurements.
pub fn delta_fn(
    model: &dyn RdeModel,
    mu_bar: &GridMeasure,
    a: f64,
    c: f64,
    params: &CenterParams,
    seed: u64,
) -> Result<f64> {
    if let Some(d) = model.delta_estimate(mu_bar, a, c, seed) {
        return Ok(d);
    }
    let s = s_fn(model, mu_bar, c, a, params, seed)?;
    Ok(c - s)
}
