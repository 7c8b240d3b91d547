//! Pre-norm transformer encoder with reconstruction and anomaly heads.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crate::autodiff::{Tape, Var};
use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// [`positional_encoding`] memoized per `(T, d)`.
pub fn cached_positional_encoding(len: usize, d: usize) -> Result<Tensor> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Tensor>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().expect("cache lock").get(&(len, d)) {
        return Ok(t.clone());
    }
    let t = positional_encoding(len, d)?;
    cache.lock().expect("cache lock").insert((len, d), t.clone());
    Ok(t)
}

/// Sinusoidal position features, `T × d`:
/// `PE(pos, 2i) = sin(pos / 10000^(2i/d))`, `PE(pos, 2i+1) = cos(pos / 10000^(2i/d))`.
pub fn positional_encoding(len: usize, d: usize) -> Result<Tensor> {
    if d % 2 != 0 || d == 0 {
        return Err(Error::InvalidArgument(format!(
            "positional encoding needs an even width, got {d}"
        )));
    }
    if len == 0 {
        return Err(Error::InvalidArgument("sequence length must be >= 1".into()));
    }
    let mut data = vec![0.0; len * d];
    for pos in 0..len {
        for i in 0..d / 2 {
            let angle = pos as f64 / 10000f64.powf((2 * i) as f64 / d as f64);
            data[pos * d + 2 * i] = angle.sin();
            data[pos * d + 2 * i + 1] = angle.cos();
        }
    }
    Tensor::new(vec![len, d], data)
}

/// Tape handles for one encoder layer.
#[derive(Clone, Debug)]
pub struct EncoderLayer {
    pub wq: Vec<Var>,
    pub wk: Vec<Var>,
    pub wv: Vec<Var>,
    pub wo: Vec<Var>,
    pub bo: Var,
    pub ln1_gamma: Var,
    pub ln1_beta: Var,
    pub ffn_w1: Var,
    pub ffn_b1: Var,
    pub ffn_w2: Var,
    pub ffn_b2: Var,
    pub ln2_gamma: Var,
    pub ln2_beta: Var,
}

/// Projects `[frames ‖ imputed]` to the model width and adds `pe` if given.
///
/// `imputed` is 1.0 where a value was filled in and 0.0 where observed.
pub fn embed_input(
    tape: &Tape,
    frames: Var,
    imputed: Var,
    proj_frames: Var,
    proj_mask: Var,
    bias: Var,
    pe: Option<&Tensor>,
) -> Result<Var> {
    if tape.shape(frames) != tape.shape(imputed) {
        return Err(Error::ShapeMismatch {
            op: "embed_input",
            left: tape.shape(frames),
            right: tape.shape(imputed),
        });
    }
    let xf = tape.matmul(frames, proj_frames)?;
    let xm = tape.matmul(imputed, proj_mask)?;
    let x = tape.add(xf, xm)?;
    let x = tape.add_row(x, bias)?;
    match pe {
        Some(pe) => {
            let pe = tape.constant(pe.clone());
            tape.add(x, pe)
        }
        None => Ok(x),
    }
}

/// Unmasked multi-head self-attention over all frames.
///
/// Head `h` computes `softmax(Q_h K_hᵀ / sqrt(d_k)) V_h`; the per-head
/// results pass through their slice of the output projection and are summed,
/// which equals concatenation followed by one projection. Returns the
/// output and each head's `T × T` attention weights.
pub fn multi_head_attention(tape: &Tape, x: Var, layer: &EncoderLayer) -> Result<(Var, Vec<Var>)> {
    let heads = layer.wq.len();
    if heads == 0 || layer.wk.len() != heads || layer.wv.len() != heads || layer.wo.len() != heads {
        return Err(Error::Config("attention layer has inconsistent head count".into()));
    }
    let dk = tape.shape(layer.wq[0])[1];
    let scale = 1.0 / (dk as f64).sqrt();
    let mut out: Option<Var> = None;
    let mut weights = Vec::with_capacity(heads);
    for h in 0..heads {
        let q = tape.matmul(x, layer.wq[h])?;
        let k = tape.matmul(x, layer.wk[h])?;
        let v = tape.matmul(x, layer.wv[h])?;
        let scores = tape.scale(tape.matmul_nt(q, k)?, scale);
        let attn = tape.softmax(scores, 1)?;
        let mixed = tape.matmul(attn, v)?;
        let projected = tape.matmul(mixed, layer.wo[h])?;
        out = Some(match out {
            Some(acc) => tape.add(acc, projected)?,
            None => projected,
        });
        weights.push(attn);
    }
    let out = tape.add_row(out.expect("at least one head"), layer.bo)?;
    Ok((out, weights))
}

pub fn feed_forward(tape: &Tape, x: Var, layer: &EncoderLayer) -> Result<Var> {
    let h = tape.add_row(tape.matmul(x, layer.ffn_w1)?, layer.ffn_b1)?;
    let h = tape.gelu(h);
    tape.add_row(tape.matmul(h, layer.ffn_w2)?, layer.ffn_b2)
}

/// One pre-norm layer: `x + MHA(LN(x))`, then `x + FFN(LN(x))`.
pub fn encoder_layer(tape: &Tape, x: Var, layer: &EncoderLayer, eps: f64) -> Result<(Var, Vec<Var>)> {
    let n1 = tape.layer_norm(x, layer.ln1_gamma, layer.ln1_beta, eps)?;
    let (attn, weights) = multi_head_attention(tape, n1, layer)?;
    let x = tape.add(x, attn)?;
    let n2 = tape.layer_norm(x, layer.ln2_gamma, layer.ln2_beta, eps)?;
    let ff = feed_forward(tape, n2, layer)?;
    Ok((tape.add(x, ff)?, weights))
}

/// Runs the layer stack over an already embedded sequence.
pub fn encoder_forward(
    tape: &Tape,
    embedded: Var,
    layers: &[EncoderLayer],
    eps: f64,
) -> Result<(Var, Vec<Vec<Var>>)> {
    let mut x = embedded;
    let mut maps = Vec::with_capacity(layers.len());
    for layer in layers {
        let (next, w) = encoder_layer(tape, x, layer, eps)?;
        x = next;
        maps.push(w);
    }
    Ok((x, maps))
}

/// Per-frame affine map from hidden width back to frame width.
pub fn reconstruct(tape: &Tape, hidden: Var, weight: Var, bias: Var) -> Result<Var> {
    tape.add_row(tape.matmul(hidden, weight)?, bias)
}

/// Per-frame abnormality probability `sigmoid(w·h_t + b)`, shape `T × 1`.
pub fn classify_anomaly(tape: &Tape, hidden: Var, weight: Var, bias: Var) -> Result<Var> {
    let logits = tape.add_row(tape.matmul(hidden, weight)?, bias)?;
    Ok(tape.sigmoid(logits))
}
