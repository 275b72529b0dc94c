use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::geometry::Geometry;
use crate::error::{Error, Result};
use crate::wavefunctions::StateEvaluator;

/// Draws `count` points (t, x) with t uniform in `times` and x from the
/// state's envelope, keeping only configurations at least `buffer` away
/// from every singular hyperplane (and never closer than the model's
/// exclusion radius).
pub fn buffered_points<S: StateEvaluator + ?Sized>(
    state: &S,
    times: (f64, f64),
    count: usize,
    buffer: f64,
    seed: u64,
) -> Result<Vec<(f64, Vec<f64>)>> {
    if !(times.1 >= times.0) {
        return Err(Error::InvalidParameter(format!(
            "time range [{}, {}] is empty",
            times.0, times.1
        )));
    }
    let model = state.model();
    let buffer = buffer.max(model.exclusion_radius());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(count);
    let max_attempts = 1000 * count.max(1);
    let mut attempts = 0;
    while points.len() < count {
        attempts += 1;
        if attempts > max_attempts {
            return Err(Error::InsufficientSamples(format!(
                "only {} of {count} configurations cleared the buffer {buffer}",
                points.len()
            )));
        }
        let t = if times.1 > times.0 {
            rng.random_range(times.0..times.1)
        } else {
            times.0
        };
        let g = Geometry::of(state, t)?;
        let x: Vec<f64> = (0..g.dims)
            .map(|_| match g.period {
                Some(p) => g.center + p * (rng.random::<f64>() - 0.5),
                None => {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    g.center + g.spread * z
                }
            })
            .collect();
        if model.hyperplane_distance(&x)? >= buffer {
            points.push((t, x));
        }
    }
    Ok(points)
}

/// Configurations only, at a single time.
pub fn buffered_configurations<S: StateEvaluator + ?Sized>(
    state: &S,
    t: f64,
    count: usize,
    buffer: f64,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    Ok(buffered_points(state, (t, t), count, buffer, seed)?
        .into_iter()
        .map(|(_, x)| x)
        .collect())
}
