use super::MotionSequence;
use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// Fills every unobserved cell by linear interpolation in time between the
/// nearest observed neighbours of the same coordinate. Leading and trailing
/// gaps take the nearest observed value. Observed cells are copied as is.
pub fn linear_interpolate(seq: &MotionSequence) -> Result<Tensor> {
    seq.validate()?;
    let (len, dim) = (seq.num_frames, seq.dim());
    let mut out = seq.frames.clone();
    for c in 0..dim {
        let observed: Vec<usize> = (0..len).filter(|&t| seq.observed(t, c)).collect();
        let (Some(&first), Some(&last)) = (observed.first(), observed.last()) else {
            return Err(Error::InvalidArgument(format!(
                "sequence {}: coordinate {c} has no observed values",
                seq.id
            )));
        };
        for t in 0..first {
            out[t * dim + c] = seq.value(first, c);
        }
        for t in last + 1..len {
            out[t * dim + c] = seq.value(last, c);
        }
        for pair in observed.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let (va, vb) = (seq.value(a, c), seq.value(b, c));
            for t in a + 1..b {
                let w = (t - a) as f64 / (b - a) as f64;
                out[t * dim + c] = va + w * (vb - va);
            }
        }
    }
    Tensor::new(vec![len, dim], out)
}
