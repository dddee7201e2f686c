/// Softmax cross-entropy of `logits` against `label`, computed with
/// max-subtraction. Writes `softmax - onehot` into `dlogits`.
pub(crate) fn softmax_xent(logits: &[f64], label: usize, dlogits: &mut [f64]) -> f64 {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for (d, &z) in dlogits.iter_mut().zip(logits) {
        *d = (z - max).exp();
        sum += *d;
    }
    let log_sum = sum.ln() + max;
    for d in dlogits.iter_mut() {
        *d /= sum;
    }
    dlogits[label] -= 1.0;
    log_sum - logits[label]
}

/// Loss only.
pub(crate) fn xent(logits: &[f64], label: usize) -> f64 {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = logits.iter().map(|&z| (z - max).exp()).sum();
    sum.ln() + max - logits[label]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_logits_give_ln_classes() {
        let mut d = [0.0; 3];
        let l = softmax_xent(&[0.0, 0.0, 0.0], 1, &mut d);
        assert!((l - 3f64.ln()).abs() < 1e-15);
        assert!((d.iter().sum::<f64>()).abs() < 1e-15);
        assert_eq!(xent(&[0.0, 0.0, 0.0], 1), l);
    }

    #[test]
    fn large_logits_stay_finite() {
        let mut d = [0.0; 2];
        let l = softmax_xent(&[1000.0, -1000.0], 1, &mut d);
        assert!((l - 2000.0).abs() < 1e-9);
        assert!(d.iter().all(|v| v.is_finite()));
    }
}
