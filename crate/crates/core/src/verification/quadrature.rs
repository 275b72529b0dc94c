use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use super::geometry::Geometry;
use crate::error::{Error, Result};
use crate::util::derive_seed;
use crate::wavefunctions::StateEvaluator;

/// Largest coordinate count accepted by the grid method.
pub const GRID_MAX_DIMS: usize = 3;
const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum QuadratureMethod {
    /// Tensor trapezoid rule with `points` nodes per coordinate.
    Grid { points: usize },
    /// Importance sampling from the product Gaussian envelope.
    MonteCarlo { samples: usize, seed: u64 },
}

impl QuadratureMethod {
    fn label(&self) -> &'static str {
        match self {
            QuadratureMethod::Grid { .. } => "grid",
            QuadratureMethod::MonteCarlo { .. } => "monte_carlo",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormEstimate {
    pub value: f64,
    /// Standard error (Monte Carlo) or half-resolution difference (grid).
    pub std_error: f64,
    pub method: &'static str,
    pub samples: usize,
}

/// Density values σ(x) normalised so that ∫σ = N.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityScan {
    pub x: Vec<f64>,
    pub sigma: Vec<f64>,
    pub err: Vec<f64>,
    pub norm: NormEstimate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityValue {
    pub value: f64,
    pub err: f64,
}

struct Grid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    half_weights: Vec<f64>,
}

impl Grid {
    fn new(geometry: &Geometry, points: usize) -> Result<Self> {
        if points < 8 {
            return Err(Error::Method(format!("grid needs at least 8 points, got {points}")));
        }
        let c = geometry.center;
        match geometry.period {
            Some(period) => {
                let n = points + points % 2;
                let h = period / n as f64;
                let nodes = (0..n).map(|k| c - 0.5 * period + k as f64 * h).collect();
                let half = (0..n).map(|k| if k % 2 == 0 { 2.0 * h } else { 0.0 }).collect();
                Ok(Self {
                    nodes,
                    weights: vec![h; n],
                    half_weights: half,
                })
            }
            None => {
                let n = points + 1 - points % 2;
                let a = geometry.half_width;
                let h = 2.0 * a / (n - 1) as f64;
                let nodes = (0..n).map(|k| c - a + k as f64 * h).collect();
                let end = |k: usize| k == 0 || k == n - 1;
                let weights = (0..n).map(|k| if end(k) { 0.5 * h } else { h }).collect();
                let half = (0..n)
                    .map(|k| match (k % 2, end(k)) {
                        (1, _) => 0.0,
                        (_, true) => h,
                        _ => 2.0 * h,
                    })
                    .collect();
                Ok(Self {
                    nodes,
                    weights,
                    half_weights: half,
                })
            }
        }
    }

    /// (full, half-resolution) tensor sums of f over `dims` coordinates,
    /// with `prefix` prepended to every configuration.
    fn integrate<F>(&self, dims: usize, prefix: &[f64], f: &F) -> Result<(f64, f64)>
    where
        F: Fn(&[f64]) -> Result<f64> + Sync,
    {
        let n = self.nodes.len();
        if dims == 0 {
            let v = f(prefix)?;
            return Ok((v, v));
        }
        let rows: Vec<(f64, f64)> = (0..n)
            .into_par_iter()
            .map(|i0| {
                let mut x = prefix.to_vec();
                x.push(self.nodes[i0]);
                x.resize(prefix.len() + dims, 0.0);
                let mut idx = vec![0usize; dims - 1];
                let mut full = 0.0;
                let mut half = 0.0;
                loop {
                    let mut w = self.weights[i0];
                    let mut wh = self.half_weights[i0];
                    for (k, &i) in idx.iter().enumerate() {
                        x[prefix.len() + 1 + k] = self.nodes[i];
                        w *= self.weights[i];
                        wh *= self.half_weights[i];
                    }
                    let v = f(&x)?;
                    full += w * v;
                    half += wh * v;
                    let mut k = 0;
                    while k < idx.len() {
                        idx[k] += 1;
                        if idx[k] < n {
                            break;
                        }
                        idx[k] = 0;
                        k += 1;
                    }
                    if k == idx.len() {
                        break;
                    }
                }
                Ok((full, half))
            })
            .collect::<Result<_>>()?;
        Ok(rows
            .iter()
            .fold((0.0, 0.0), |(a, b), (f, h)| (a + f, b + h)))
    }
}

fn density_of<S: StateEvaluator + ?Sized>(state: &S, t: f64) -> Result<impl Fn(&[f64]) -> Result<f64> + Sync + '_> {
    let snap = state.snapshot(t)?;
    Ok(move |x: &[f64]| {
        let a = snap.log_amplitude(x)?;
        Ok((2.0 * a.log_modulus).exp())
    })
}

fn grid_setup<S: StateEvaluator + ?Sized>(state: &S, t: f64, points: usize) -> Result<(Geometry, Grid)> {
    let geometry = Geometry::of(state, t)?;
    if geometry.dims > GRID_MAX_DIMS {
        return Err(Error::Method(format!(
            "grid quadrature supports at most {GRID_MAX_DIMS} coordinates, the state has {}",
            geometry.dims
        )));
    }
    let grid = Grid::new(&geometry, points)?;
    Ok((geometry, grid))
}

fn grid_norm<S: StateEvaluator + ?Sized>(state: &S, t: f64, points: usize) -> Result<(NormEstimate, Geometry, Grid)> {
    let (geometry, grid) = grid_setup(state, t, points)?;
    let f = density_of(state, t)?;
    let (full, half) = grid.integrate(geometry.dims, &[], &f)?;
    let estimate = NormEstimate {
        value: full,
        std_error: (full - half).abs(),
        method: "grid",
        samples: grid.nodes.len().pow(geometry.dims as u32),
    };
    Ok((estimate, geometry, grid))
}

/// Proposal sampler shared by the Monte-Carlo estimators.
struct Proposal {
    geometry: Geometry,
}

impl Proposal {
    /// Draws one configuration and returns ln q at it.
    fn draw(&self, rng: &mut ChaCha8Rng, x: &mut [f64]) -> f64 {
        let g = &self.geometry;
        match g.period {
            Some(period) => {
                for xi in x.iter_mut() {
                    let u: f64 = rand::Rng::random(rng);
                    *xi = g.center - 0.5 * period + period * u;
                }
                -(g.dims as f64) * period.ln()
            }
            None => {
                let mut log_q = 0.0;
                for xi in x.iter_mut() {
                    let z: f64 = StandardNormal.sample(rng);
                    *xi = g.center + g.spread * z;
                    log_q -= 0.5 * z * z;
                }
                log_q - g.dims as f64 * (g.spread * (2.0 * std::f64::consts::PI).sqrt()).ln()
            }
        }
    }
}

struct ChunkTally {
    weight: f64,
    weight_sq: f64,
    count: usize,
    histogram: Vec<f64>,
}

/// Importance-sampling pass; histogram bins are [lo + kΔ, lo + (k+1)Δ).
fn monte_carlo<S: StateEvaluator + ?Sized>(
    state: &S,
    t: f64,
    samples: usize,
    seed: u64,
    bins: Option<(f64, f64, usize)>,
) -> Result<Vec<ChunkTally>> {
    if samples < 2 {
        return Err(Error::InsufficientSamples(format!(
            "Monte Carlo needs at least 2 samples, got {samples}"
        )));
    }
    let geometry = Geometry::of(state, t)?;
    let proposal = Proposal { geometry };
    let snap = state.snapshot(t)?;
    let model = state.model();
    let exclusion = model.exclusion_radius();
    let chunks = samples.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let count = CHUNK.min(samples - c * CHUNK);
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, c as u64));
            let mut x = vec![0.0; geometry.dims];
            let mut tally = ChunkTally {
                weight: 0.0,
                weight_sq: 0.0,
                count,
                histogram: vec![0.0; bins.map_or(0, |b| b.2)],
            };
            for _ in 0..count {
                let log_q = proposal.draw(&mut rng, &mut x);
                let w = if model.hyperplane_distance(&x)? < exclusion {
                    0.0
                } else {
                    (2.0 * snap.log_amplitude(&x)?.log_modulus - log_q).exp()
                };
                tally.weight += w;
                tally.weight_sq += w * w;
                if let Some((lo, width, n)) = bins {
                    if w > 0.0 {
                        for p in model.particle_positions(&x)? {
                            let k = ((p - lo) / width).floor();
                            if k >= 0.0 && (k as usize) < n {
                                tally.histogram[k as usize] += w;
                            }
                        }
                    }
                }
            }
            Ok(tally)
        })
        .collect()
}

fn mc_norm(tallies: &[ChunkTally]) -> NormEstimate {
    let n: usize = tallies.iter().map(|c| c.count).sum();
    let sum: f64 = tallies.iter().map(|c| c.weight).sum();
    let sum_sq: f64 = tallies.iter().map(|c| c.weight_sq).sum();
    let mean = sum / n as f64;
    let var = ((sum_sq / n as f64 - mean * mean) * n as f64 / (n - 1) as f64).max(0.0);
    NormEstimate {
        value: mean,
        std_error: (var / n as f64).sqrt(),
        method: "monte_carlo",
        samples: n,
    }
}

/// ∫∏dx_i |ψ(t,x)|² with an error estimate.
pub fn norm_estimate<S: StateEvaluator + ?Sized>(
    state: &S,
    t: f64,
    method: QuadratureMethod,
) -> Result<NormEstimate> {
    let estimate = match method {
        QuadratureMethod::Grid { points } => grid_norm(state, t, points)?.0,
        QuadratureMethod::MonteCarlo { samples, seed } => {
            mc_norm(&monte_carlo(state, t, samples, seed, None)?)
        }
    };
    if !(estimate.value > 0.0) {
        return Err(Error::Method(format!(
            "{} norm estimate {} is not positive",
            method.label(),
            estimate.value
        )));
    }
    Ok(estimate)
}

/// σ(t, x) = N ∫ |ψ(t, x, x_2, …)|² / ∫|ψ|² at each query point.
///
/// The grid method integrates the remaining coordinates of an
/// identical-particle state. The Monte-Carlo method histograms all particle
/// positions into bins centred on `xs`, which must be evenly spaced.
pub fn density_scan<S: StateEvaluator + ?Sized>(
    state: &S,
    t: f64,
    xs: &[f64],
    method: QuadratureMethod,
) -> Result<DensityScan> {
    if xs.is_empty() {
        return Err(Error::InvalidParameter("density scan needs query points".into()));
    }
    let model = state.model();
    let n = model.n_particles as f64;
    match method {
        QuadratureMethod::Grid { points } => {
            if !model.has_identical_particles() {
                return Err(Error::Method(format!(
                    "grid marginals need identical particles in native coordinates; use monte_carlo for {}",
                    model.kind.name()
                )));
            }
            let (norm, geometry, grid) = grid_norm(state, t, points)?;
            let f = density_of(state, t)?;
            let mut sigma = Vec::with_capacity(xs.len());
            let mut err = Vec::with_capacity(xs.len());
            for &x in xs {
                let (full, half) = grid.integrate(geometry.dims - 1, &[x], &f)?;
                let value = n * full / norm.value;
                sigma.push(value);
                err.push(n * (full - half).abs() / norm.value + value * norm.std_error / norm.value);
            }
            Ok(DensityScan {
                x: xs.to_vec(),
                sigma,
                err,
                norm,
            })
        }
        QuadratureMethod::MonteCarlo { samples, seed } => {
            let width = if xs.len() == 1 {
                0.1 * Geometry::of(state, t)?.spread
            } else {
                (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64
            };
            if !(width > 0.0) {
                return Err(Error::InvalidParameter("density points must increase".into()));
            }
            for (k, &x) in xs.iter().enumerate() {
                let expected = xs[0] + k as f64 * width;
                if (x - expected).abs() > 1e-9 * width.max(x.abs()) {
                    return Err(Error::InvalidParameter(
                        "Monte-Carlo density points must be evenly spaced".into(),
                    ));
                }
            }
            let lo = xs[0] - 0.5 * width;
            let tallies = monte_carlo(state, t, samples, seed, Some((lo, width, xs.len())))?;
            let norm = mc_norm(&tallies);
            let total: f64 = tallies.iter().map(|c| c.weight).sum();
            let mut sigma = vec![0.0; xs.len()];
            for c in &tallies {
                for (s, h) in sigma.iter_mut().zip(&c.histogram) {
                    *s += h;
                }
            }
            for s in sigma.iter_mut() {
                *s /= total * width;
            }
            let mut err = vec![0.0; xs.len()];
            let usable: Vec<&ChunkTally> = tallies.iter().filter(|c| c.weight > 0.0).collect();
            if usable.len() >= 2 {
                let k = usable.len() as f64;
                for (b, e) in err.iter_mut().enumerate() {
                    let per: Vec<f64> = usable
                        .iter()
                        .map(|c| c.histogram[b] / (c.weight * width))
                        .collect();
                    let mean = per.iter().sum::<f64>() / k;
                    let var = per.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (k - 1.0);
                    *e = (var / k).sqrt();
                }
            }
            Ok(DensityScan {
                x: xs.to_vec(),
                sigma,
                err,
                norm,
            })
        }
    }
}

/// σ(t, x) at a single point.
pub fn marginal_density<S: StateEvaluator + ?Sized>(
    state: &S,
    t: f64,
    x: f64,
    method: QuadratureMethod,
) -> Result<DensityValue> {
    let scan = density_scan(state, t, &[x], method)?;
    Ok(DensityValue {
        value: scan.sigma[0],
        err: scan.err[0],
    })
}
