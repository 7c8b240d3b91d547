//! Adam with bias correction.

use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// Per-parameter moment estimates and the step counter.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamState {
    pub m: Vec<Tensor>,
    pub v: Vec<Tensor>,
    pub t: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl AdamState {
    /// Zeroed moments for the given parameters with the usual
    /// β1 = 0.9, β2 = 0.999, ε = 1e-8.
    pub fn new(params: &[Tensor]) -> Self {
        Self::with_hyper(params, 0.9, 0.999, 1e-8)
    }

    pub fn with_hyper(params: &[Tensor], beta1: f64, beta2: f64, eps: f64) -> Self {
        let zeros: Vec<Tensor> = params.iter().map(|p| Tensor::zeros(p.shape())).collect();
        Self {
            m: zeros.clone(),
            v: zeros,
            t: 0,
            beta1,
            beta2,
            eps,
        }
    }
}

/// Applies one Adam update in place.
///
/// Fails without touching anything if shapes disagree or any gradient
/// entry is non-finite.
pub fn adam_step(params: &mut [Tensor], grads: &[Tensor], state: &mut AdamState, lr: f64) -> Result<()> {
    if !(lr >= 0.0) {
        return Err(Error::InvalidArgument(format!("learning rate must be >= 0, got {lr}")));
    }
    if params.len() != grads.len() || params.len() != state.m.len() {
        return Err(Error::ShapeMismatch {
            op: "adam_step",
            left: vec![params.len()],
            right: vec![grads.len()],
        });
    }
    for (i, (p, g)) in params.iter().zip(grads).enumerate() {
        if p.shape() != g.shape() || p.shape() != state.m[i].shape() {
            return Err(Error::ShapeMismatch {
                op: "adam_step",
                left: p.shape().to_vec(),
                right: g.shape().to_vec(),
            });
        }
        if let Some(element) = g.data().iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteGradient { index: i, element });
        }
    }

    state.t += 1;
    let (b1, b2) = (state.beta1, state.beta2);
    let c1 = 1.0 - b1.powi(state.t as i32);
    let c2 = 1.0 - b2.powi(state.t as i32);
    for ((p, g), (m, v)) in params
        .iter_mut()
        .zip(grads)
        .zip(state.m.iter_mut().zip(state.v.iter_mut()))
    {
        for (((w, &gi), mi), vi) in p
            .data_mut()
            .iter_mut()
            .zip(g.data())
            .zip(m.data_mut())
            .zip(v.data_mut())
        {
            *mi = b1 * *mi + (1.0 - b1) * gi;
            *vi = b2 * *vi + (1.0 - b2) * gi * gi;
            let m_hat = *mi / c1;
            let v_hat = *vi / c2;
            *w -= lr * m_hat / (v_hat.sqrt() + state.eps);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(v: f64) -> Tensor {
        Tensor::scalar(v)
    }

    #[test]
    fn first_step_from_zero_with_unit_gradient() {
        let mut p = vec![scalar(0.0)];
        let mut st = AdamState::new(&p);
        adam_step(&mut p, &[scalar(1.0)], &mut st, 0.001).unwrap();
        // m̂ = v̂ = 1, so the step is lr / (1 + ε)
        let want = -0.001 / (1.0 + 1e-8);
        assert!((p[0].item() - want).abs() < 1e-18);
        assert!((p[0].item() + 0.000999999995).abs() < 1e-11);
        assert_eq!(st.t, 1);
    }

    #[test]
    fn zero_gradient_leaves_weights() {
        let mut p = vec![Tensor::full(&[3], 0.7)];
        let mut st = AdamState::new(&p);
        adam_step(&mut p, &[Tensor::zeros(&[3])], &mut st, 0.001).unwrap();
        assert_eq!(p[0].data(), &[0.7; 3]);
    }

    #[test]
    fn quadratic_descends_monotonically() {
        let mut p = vec![scalar(1.0)];
        let mut st = AdamState::new(&p);
        let mut prev = 1.0f64;
        for _ in 0..100 {
            let g = scalar(2.0 * p[0].item());
            adam_step(&mut p, &[g], &mut st, 0.001).unwrap();
            let w = p[0].item().abs();
            assert!(w < prev);
            prev = w;
        }
    }

    #[test]
    fn zero_learning_rate_is_identity() {
        let mut p = vec![Tensor::new(vec![2], vec![0.3, -1.2]).unwrap()];
        let before = p.clone();
        let mut st = AdamState::new(&p);
        for _ in 0..5 {
            adam_step(&mut p, &[Tensor::new(vec![2], vec![5.0, -3.0]).unwrap()], &mut st, 0.0).unwrap();
        }
        assert_eq!(p, before);
        assert_eq!(st.t, 5);
    }

    #[test]
    fn rejects_non_finite_and_mismatched_gradients() {
        let mut p = vec![Tensor::zeros(&[2])];
        let mut st = AdamState::new(&p);
        let bad = Tensor::new(vec![2], vec![1.0, f64::NAN]).unwrap();
        assert!(matches!(
            adam_step(&mut p, &[bad], &mut st, 0.001),
            Err(Error::NonFiniteGradient { index: 0, element: 1 })
        ));
        assert_eq!(st.t, 0);
        assert!(adam_step(&mut p, &[Tensor::zeros(&[3])], &mut st, 0.001).is_err());
    }
}
