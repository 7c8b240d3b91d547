//! Central finite-difference verification of tape gradients.

use crate::autodiff::{Tape, Var};
use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// Default finite-difference step.
pub const DEFAULT_STEP: f64 = 1e-5;

fn eval_scalar<F>(f: &F, x: &Tensor) -> Result<f64>
where
    F: Fn(&Tape, Var) -> Result<Var>,
{
    let tape = Tape::new();
    let xv = tape.param(x.clone());
    let out = f(&tape, xv)?;
    let v = tape.value(out);
    if !v.is_scalar() {
        return Err(Error::NonScalarLoss(v.shape().to_vec()));
    }
    Ok(v.item())
}

/// Compares the tape gradient of `f` at `x` against central differences
/// with step `h`.
///
/// Returns `max_i |g_ad − g_fd| / max(1, |g_ad|, |g_fd|)`.
pub fn grad_check<F>(f: F, x: &Tensor, h: f64) -> Result<f64>
where
    F: Fn(&Tape, Var) -> Result<Var>,
{
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("step must be > 0, got {h}")));
    }
    let tape = Tape::new();
    let xv = tape.param(x.clone());
    let out = f(&tape, xv)?;
    let grads = tape.backward(out)?;
    let analytic = grads
        .get(xv)
        .cloned()
        .unwrap_or_else(|| Tensor::zeros(x.shape()));

    let mut worst: f64 = 0.0;
    let mut probe = x.clone();
    for i in 0..x.len() {
        let orig = x.data()[i];
        probe.data_mut()[i] = orig + h;
        let plus = eval_scalar(&f, &probe)?;
        probe.data_mut()[i] = orig - h;
        let minus = eval_scalar(&f, &probe)?;
        probe.data_mut()[i] = orig;
        let fd = (plus - minus) / (2.0 * h);
        let ad = analytic.data()[i];
        let err = (ad - fd).abs() / 1.0f64.max(ad.abs()).max(fd.abs());
        worst = worst.max(err);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_is_exact() {
        let x = Tensor::new(vec![2, 3], vec![0.1, -2.0, 3.5, 4.0, 0.0, 1.0]).unwrap();
        let err = grad_check(|t, x| Ok(t.sum(x)), &x, DEFAULT_STEP).unwrap();
        assert!(err <= 1e-10, "{err}");
    }

    #[test]
    fn vector_output_is_rejected() {
        let x = Tensor::full(&[3], 1.0);
        let r = grad_check(|t, x| Ok(t.scale(x, 2.0)), &x, DEFAULT_STEP);
        assert!(matches!(r, Err(Error::NonScalarLoss(_))));
    }

    #[test]
    fn detects_wrong_gradient() {
        // d/dx of sum(x*x) computed with a constant copy of x on one side
        // has half the true gradient.
        let x = Tensor::new(vec![3], vec![1.0, 2.0, 3.0]).unwrap();
        let err = grad_check(
            |t, x| {
                let c = t.constant(t.value(x));
                Ok(t.sum(t.mul(x, c)?))
            },
            &x,
            DEFAULT_STEP,
        )
        .unwrap();
        assert!(err > 0.3);
    }
}
