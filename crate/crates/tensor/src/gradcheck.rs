use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::Matrix;

/// Outcome of a finite-difference check.
#[derive(Debug, Clone)]
pub struct GradCheckReport {
    pub max_rel_err: f64,
    pub coords_checked: usize,
}

impl GradCheckReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_rel_err < tol
    }
}

/// Compare analytic gradients against central finite differences.
///
/// `f` evaluates the scalar objective from the current parameter values;
/// it must be deterministic. `analytic` holds one gradient per parameter
/// tensor, same shapes. For tensors larger than `max_coords_per_tensor`
/// a seeded random subset of coordinates is probed (at least 64 when the
/// tensor has that many).
///
/// Relative error per coordinate is |a - n| / max(1, |a|, |n|).
pub fn numeric_gradient_check<F>(
    mut f: F,
    params: &mut [Matrix],
    analytic: &[Matrix],
    h: f64,
    max_coords_per_tensor: usize,
    seed: u64,
) -> GradCheckReport
where
    F: FnMut(&[Matrix]) -> f64,
{
    assert_eq!(params.len(), analytic.len(), "one gradient per parameter");
    let budget = max_coords_per_tensor.max(64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_rel_err: f64 = 0.0;
    let mut coords_checked = 0;

    for t in 0..params.len() {
        assert_eq!(params[t].dim(), analytic[t].dim(), "gradient shape mismatch");
        let total = params[t].len();
        let mut coords: Vec<usize> = (0..total).collect();
        if total > budget {
            coords.shuffle(&mut rng);
            coords.truncate(budget);
            coords.sort_unstable();
        }
        let cols = params[t].ncols();
        for flat in coords {
            let (i, j) = (flat / cols, flat % cols);
            let orig = params[t][(i, j)];
            params[t][(i, j)] = orig + h;
            let plus = f(params);
            params[t][(i, j)] = orig - h;
            let minus = f(params);
            params[t][(i, j)] = orig;

            let numeric = (plus - minus) / (2.0 * h);
            let a = analytic[t][(i, j)];
            let rel = (a - numeric).abs() / 1.0_f64.max(a.abs()).max(numeric.abs());
            max_rel_err = max_rel_err.max(rel);
            coords_checked += 1;
        }
    }
    GradCheckReport {
        max_rel_err,
        coords_checked,
    }
}
