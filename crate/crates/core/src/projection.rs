//! Exact t-SNE for projecting entity embeddings to two dimensions.
//!
//! Dense O(n²) implementation: entity counts are in the tens to hundreds, so
//! no tree or FFT approximation is used. Inputs above [`MAX_POINTS`] are
//! refused.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::trainer::EmbeddingModel;

pub const MAX_POINTS: usize = 5000;
/// Tolerance on achieved perplexity during bandwidth search.
pub const PERPLEXITY_TOL: f64 = 1e-4;
pub const MAX_BISECTION_STEPS: usize = 200;
const P_FLOOR: f64 = 1e-12;
const DUPLICATE_JITTER: f64 = 1e-10;
const INIT_STD: f64 = 1e-4;
const MIN_GAIN: f64 = 0.01;
/// Rows whose distance spread is below this fraction of the largest distance
/// are treated as exactly uniform.
const UNIFORM_ROW_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum ProjectionError {
    #[error("invalid t-SNE config: {0}")]
    Config(String),
    #[error("t-SNE needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("{0} points exceed the exact t-SNE limit of {MAX_POINTS}; down-select entities first")]
    TooManyPoints(usize),
    #[error("input contains non-finite values")]
    NonFiniteInput,
    #[error("duplicate points")]
    DuplicatePoints,
    #[error("non-finite value during descent at iteration {0}")]
    Diverged(usize),
    #[error("{0} labels for {1} points")]
    LabelMismatch(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TsneConfig {
    pub perplexity: f64,
    pub iterations: usize,
    pub learning_rate: f64,
    pub early_exaggeration: f64,
    /// Iterations run with exaggerated affinities and initial momentum.
    pub exaggeration_iters: usize,
    pub initial_momentum: f64,
    pub final_momentum: f64,
    pub seed: u64,
}

impl Default for TsneConfig {
    fn default() -> Self {
        Self {
            perplexity: 30.0,
            iterations: 1000,
            learning_rate: 200.0,
            early_exaggeration: 12.0,
            exaggeration_iters: 250,
            initial_momentum: 0.5,
            final_momentum: 0.8,
            seed: 7,
        }
    }
}

impl TsneConfig {
    pub fn validate(&self) -> Result<(), ProjectionError> {
        if !(self.perplexity >= 1.0) {
            return Err(ProjectionError::Config(format!(
                "perplexity must be >= 1, got {}",
                self.perplexity
            )));
        }
        if self.iterations < 1 {
            return Err(ProjectionError::Config("iterations must be >= 1".into()));
        }
        if !(self.learning_rate > 0.0) {
            return Err(ProjectionError::Config("learning_rate must be > 0".into()));
        }
        Ok(())
    }

    /// Perplexity actually used for `n` points: capped at `(n - 1) / 3`,
    /// but never below 1.
    pub fn effective_perplexity(&self, n: usize) -> f64 {
        let cap = ((n as f64 - 1.0) / 3.0).max(1.0);
        self.perplexity.min(cap)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projection2D {
    pub labels: Vec<String>,
    pub points: Vec<[f64; 2]>,
    pub final_kl: f64,
    /// `(iteration, KL(P||Q))` sampled every 10 iterations and at the end.
    pub kl_history: Vec<(usize, f64)>,
    pub perplexity: f64,
}

impl Projection2D {
    pub fn kl_at(&self, iteration: usize) -> Option<f64> {
        self.kl_history
            .iter()
            .find(|(it, _)| *it == iteration)
            .map(|(_, kl)| *kl)
    }

    /// `label,x,y` lines with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("label,x,y\n");
        for (label, [x, y]) in self.labels.iter().zip(&self.points) {
            out.push_str(&format!("{label},{x},{y}\n"));
        }
        out
    }
}

/// Result of the per-point bandwidth search.
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    /// Precision `β` of `p_{j|i} ∝ exp(-β d_ij)`.
    pub beta: f64,
    /// Achieved perplexity `2^H`.
    pub perplexity: f64,
    pub converged: bool,
    pub probabilities: Vec<f64>,
}

fn conditional(sq_dists: &[f64], beta: f64, min: f64, out: &mut [f64]) -> f64 {
    let mut sum = 0.0;
    for (p, &d) in out.iter_mut().zip(sq_dists) {
        *p = (-beta * (d - min)).exp();
        sum += *p;
    }
    let mut weighted = 0.0;
    for (p, &d) in out.iter_mut().zip(sq_dists) {
        *p /= sum;
        weighted += *p * (d - min);
    }
    // Shannon entropy in nats; perplexity = e^H = 2^(H / ln 2)
    let entropy = sum.ln() + beta * weighted;
    entropy.exp()
}

/// Bisection over `β` so that the conditional distribution over the other
/// points reaches `target` perplexity within [`PERPLEXITY_TOL`].
pub fn perplexity_calibration(sq_dists: &[f64], target: f64) -> Result<Calibration, ProjectionError> {
    if sq_dists.iter().any(|d| !d.is_finite() || *d < 0.0) {
        return Err(ProjectionError::NonFiniteInput);
    }
    if sq_dists.iter().all(|&d| d == 0.0) {
        return Err(ProjectionError::DuplicatePoints);
    }
    let min = sq_dists.iter().copied().fold(f64::INFINITY, f64::min);
    let max = sq_dists.iter().copied().fold(0.0, f64::max);
    if max - min <= UNIFORM_ROW_TOL * max {
        // every β gives the uniform distribution; rounding noise must not
        // be sharpened into a nearest-neighbour choice
        let m = sq_dists.len() as f64;
        let converged = (m - target).abs() <= PERPLEXITY_TOL;
        if !converged {
            log::warn!("equidistant row cannot reach perplexity {target}; using uniform affinities");
        }
        return Ok(Calibration {
            beta: 1.0,
            perplexity: m,
            converged,
            probabilities: vec![1.0 / m; sq_dists.len()],
        });
    }
    let mut probs = vec![0.0; sq_dists.len()];
    let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
    let mut beta = 1.0;
    let mut best = (f64::INFINITY, beta);
    for _ in 0..MAX_BISECTION_STEPS {
        let perp = conditional(sq_dists, beta, min, &mut probs);
        let gap = perp - target;
        if gap.abs() < best.0 {
            best = (gap.abs(), beta);
        }
        if gap.abs() <= PERPLEXITY_TOL {
            return Ok(Calibration {
                beta,
                perplexity: perp,
                converged: true,
                probabilities: probs,
            });
        }
        if gap > 0.0 {
            // too flat: sharpen
            lo = beta;
            beta = if hi.is_infinite() { beta * 2.0 } else { (beta + hi) / 2.0 };
        } else {
            hi = beta;
            beta = (beta + lo) / 2.0;
        }
    }
    let beta = best.1;
    let perp = conditional(sq_dists, beta, min, &mut probs);
    log::warn!(
        "perplexity search did not converge: target {target}, reached {perp:.6} after {MAX_BISECTION_STEPS} steps"
    );
    Ok(Calibration {
        beta,
        perplexity: perp,
        converged: false,
        probabilities: probs,
    })
}

fn squared_distances(data: &[f64], n: usize, dim: usize) -> Vec<f64> {
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let a = &data[i * dim..(i + 1) * dim];
            let b = &data[j * dim..(j + 1) * dim];
            let s: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
            d[i * n + j] = s;
            d[j * n + i] = s;
        }
    }
    d
}

/// Symmetrized affinity matrix `p_ij = (p_{j|i} + p_{i|j}) / 2n`, floored at
/// 1e-12 off the diagonal, zero on it. Row-major `n x n`.
pub fn joint_probabilities(
    data: &[f64],
    dim: usize,
    perplexity: f64,
) -> Result<Vec<f64>, ProjectionError> {
    let n = data.len() / dim;
    let d = squared_distances(data, n, dim);
    let mut cond = vec![0.0; n * n];
    let mut row = Vec::with_capacity(n - 1);
    for i in 0..n {
        row.clear();
        row.extend((0..n).filter(|&j| j != i).map(|j| d[i * n + j]));
        let cal = perplexity_calibration(&row, perplexity)?;
        let mut probs = cal.probabilities.into_iter();
        for j in (0..n).filter(|&j| j != i) {
            cond[i * n + j] = probs.next().unwrap();
        }
    }
    let mut p = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                p[i * n + j] = ((cond[i * n + j] + cond[j * n + i]) / (2 * n) as f64).max(P_FLOOR);
            }
        }
    }
    Ok(p)
}

fn jitter_duplicates(data: &mut [f64], n: usize, dim: usize, rng: &mut ChaCha8Rng) {
    let noise = Normal::new(0.0, DUPLICATE_JITTER).unwrap();
    let d = squared_distances(data, n, dim);
    let mut jittered = 0;
    for j in 1..n {
        if (0..j).any(|i| d[i * n + j] == 0.0) {
            for x in &mut data[j * dim..(j + 1) * dim] {
                *x += noise.sample(rng);
            }
            jittered += 1;
        }
    }
    if jittered > 0 {
        log::warn!("jittered {jittered} duplicate input rows by {DUPLICATE_JITTER}");
    }
}

fn kl_divergence(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(pi, _)| **pi > 0.0)
        .map(|(pi, qi)| pi * (pi / qi).ln())
        .sum::<f64>()
        .max(0.0)
}

/// Student-t affinities: fills `num` with `1/(1+|yi-yj|²)` and returns `Q`.
fn low_dim_affinities(y: &[[f64; 2]], num: &mut [f64], q: &mut [f64]) {
    let n = y.len();
    let mut sum = 0.0;
    for i in 0..n {
        num[i * n + i] = 0.0;
        for j in i + 1..n {
            let dx = y[i][0] - y[j][0];
            let dy = y[i][1] - y[j][1];
            let v = 1.0 / (1.0 + dx * dx + dy * dy);
            num[i * n + j] = v;
            num[j * n + i] = v;
            sum += 2.0 * v;
        }
    }
    for (qi, &v) in q.iter_mut().zip(num.iter()) {
        *qi = (v / sum).max(P_FLOOR);
    }
    for i in 0..n {
        q[i * n + i] = 0.0;
    }
}

/// Projects the `n x dim` row-major `data` to 2-D.
pub fn tsne(
    data: &[f64],
    dim: usize,
    labels: Vec<String>,
    config: &TsneConfig,
) -> Result<Projection2D, ProjectionError> {
    config.validate()?;
    if dim == 0 {
        return Err(ProjectionError::Config("input dimension is zero".into()));
    }
    let n = data.len() / dim;
    if labels.len() != n {
        return Err(ProjectionError::LabelMismatch(labels.len(), n));
    }
    if n < 3 {
        return Err(ProjectionError::TooFewPoints(n));
    }
    if n > MAX_POINTS {
        return Err(ProjectionError::TooManyPoints(n));
    }
    if data.iter().any(|x| !x.is_finite()) {
        return Err(ProjectionError::NonFiniteInput);
    }
    let perplexity = config.effective_perplexity(n);
    if perplexity < config.perplexity {
        log::warn!(
            "perplexity {} too large for {n} points, capped at {perplexity:.4}",
            config.perplexity
        );
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut data = data.to_vec();
    jitter_duplicates(&mut data, n, dim, &mut rng);
    let p = joint_probabilities(&data, dim, perplexity)?;

    let init = Normal::new(0.0, INIT_STD).unwrap();
    let mut y: Vec<[f64; 2]> = (0..n)
        .map(|_| [init.sample(&mut rng), init.sample(&mut rng)])
        .collect();
    let mut update = vec![[0.0f64; 2]; n];
    let mut gains = vec![[1.0f64; 2]; n];
    let mut num = vec![0.0; n * n];
    let mut q = vec![0.0; n * n];
    let mut grad = vec![[0.0f64; 2]; n];
    let mut kl_history = Vec::new();

    for it in 0..config.iterations {
        let early = it < config.exaggeration_iters;
        let exaggeration = if early { config.early_exaggeration } else { 1.0 };
        let momentum = if early {
            config.initial_momentum
        } else {
            config.final_momentum
        };

        low_dim_affinities(&y, &mut num, &mut q);
        for i in 0..n {
            let mut g = [0.0; 2];
            for j in 0..n {
                if i == j {
                    continue;
                }
                let coeff = (exaggeration * p[i * n + j] - q[i * n + j]) * num[i * n + j];
                g[0] += coeff * (y[i][0] - y[j][0]);
                g[1] += coeff * (y[i][1] - y[j][1]);
            }
            grad[i] = [4.0 * g[0], 4.0 * g[1]];
        }

        for i in 0..n {
            for k in 0..2 {
                // grow while the step keeps its direction, shrink otherwise
                gains[i][k] = if update[i][k] * grad[i][k] < 0.0 {
                    gains[i][k] + 0.2
                } else {
                    (gains[i][k] * 0.8).max(MIN_GAIN)
                };
                update[i][k] = momentum * update[i][k] - config.learning_rate * gains[i][k] * grad[i][k];
                y[i][k] += update[i][k];
            }
        }
        let mean = y.iter().fold([0.0; 2], |m, p| [m[0] + p[0], m[1] + p[1]]);
        for pt in &mut y {
            pt[0] -= mean[0] / n as f64;
            pt[1] -= mean[1] / n as f64;
        }
        if y.iter().any(|pt| !pt[0].is_finite() || !pt[1].is_finite()) {
            return Err(ProjectionError::Diverged(it + 1));
        }

        let done = it + 1;
        if done % 10 == 0 || done == config.iterations {
            low_dim_affinities(&y, &mut num, &mut q);
            let kl = kl_divergence(&p, &q);
            log::trace!("t-SNE iteration {done}: KL {kl:.6}");
            kl_history.push((done, kl));
        }
    }

    let final_kl = kl_history.last().map(|h| h.1).unwrap_or(f64::NAN);
    Ok(Projection2D {
        labels,
        points: y,
        final_kl,
        kl_history,
        perplexity,
    })
}

/// Projects every entity row of a trained model.
pub fn project_model(model: &EmbeddingModel, config: &TsneConfig) -> Result<Projection2D, ProjectionError> {
    let data: Vec<f64> = model.entity_matrix().iter().map(|&x| x as f64).collect();
    tsne(&data, model.dim(), model.catalog().names(), config)
}
