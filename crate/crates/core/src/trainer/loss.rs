use num_traits::Float;

/// Lower bound applied to probabilities before taking logs.
pub const LOG_FLOOR: f64 = 1e-12;

pub fn sigmoid<T: Float>(x: T) -> T {
    T::one() / (T::one() + (-x).exp())
}

fn neg_log<T: Float>(p: T) -> T {
    if p.is_nan() {
        return p;
    }
    let floor = T::from(LOG_FLOOR).expect("float type holds 1e-12");
    -p.max(floor).ln()
}

/// Negative-sampling loss of one `(entity, word)` pair together with its
/// analytic gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct NsLoss<T> {
    pub loss: T,
    pub grad_entity: Vec<T>,
    pub grad_positive: Vec<T>,
    pub grad_negatives: Vec<Vec<T>>,
}

/// `-log σ(v·u₊) - Σₙ log σ(-v·uₙ)` and its partials with respect to the
/// entity vector, the positive output vector and each negative output vector.
pub fn pair_loss_ns<T: Float>(entity: &[T], positive: &[T], negatives: &[&[T]]) -> NsLoss<T> {
    let n = entity.len();
    debug_assert_eq!(positive.len(), n);
    let dot = |u: &[T]| entity.iter().zip(u).fold(T::zero(), |acc, (&a, &b)| acc + a * b);

    let s_pos = dot(positive);
    // d loss / d score
    let g_pos = sigmoid(s_pos) - T::one();
    let mut loss = neg_log(sigmoid(s_pos));
    let mut grad_entity: Vec<T> = positive.iter().map(|&u| g_pos * u).collect();
    let grad_positive = entity.iter().map(|&v| g_pos * v).collect();

    let mut grad_negatives = Vec::with_capacity(negatives.len());
    for &u in negatives {
        debug_assert_eq!(u.len(), n);
        let s = dot(u);
        loss = loss + neg_log(sigmoid(-s));
        let g = sigmoid(s);
        for (ge, &ui) in grad_entity.iter_mut().zip(u) {
            *ge = *ge + g * ui;
        }
        grad_negatives.push(entity.iter().map(|&v| g * v).collect());
    }
    NsLoss {
        loss,
        grad_entity,
        grad_positive,
        grad_negatives,
    }
}

/// Mean `-log softmax(logits)[w]` over `targets`, computed stably.
pub fn softmax_nll(logits: &[f64], targets: &[u32]) -> f64 {
    let (arg, max) = logits
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, z)| if z > best.1 { (i, z) } else { best });
    let rest: f64 = logits
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != arg)
        .map(|(_, &z)| (z - max).exp())
        .sum();
    // log-sum-exp minus the target logit, split so that a dominant target
    // keeps full relative precision
    let log_norm = rest.ln_1p();
    let total: f64 = targets
        .iter()
        .map(|&w| (max - logits[w as usize]) + log_norm)
        .sum();
    total / targets.len() as f64
}

/// Softmax over `logits` written into `out`.
pub fn softmax_into(logits: &[f64], out: &mut [f64]) {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for (o, &z) in out.iter_mut().zip(logits) {
        *o = (z - max).exp();
        sum += *o;
    }
    out.iter_mut().for_each(|o| *o /= sum);
}
