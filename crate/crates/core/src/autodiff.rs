//! Tape-based reverse-mode automatic differentiation over [`Tensor`]s.
//!
//! Every differentiable operation appends a node to a [`Tape`]; the node
//! stores its output value and whatever the backward rule needs. A single
//! call to [`Tape::backward`] walks the nodes in exact reverse execution
//! order, accumulating gradients into each input, and returns the
//! gradients of all parameter leaves. A tape serves exactly one backward
//! pass.
//!
//! ```
//! use mocap_core::{Tape, Tensor};
//!
//! let tape = Tape::new();
//! let x = tape.param(Tensor::new(vec![3], vec![1.0, 2.0, 3.0]).unwrap());
//! let sq = tape.mul(x, x).unwrap();
//! let loss = tape.sum(sq);
//! let grads = tape.backward(loss).unwrap();
//! assert_eq!(grads.get(x).unwrap().data(), &[2.0, 4.0, 6.0]);
//! ```

use std::cell::{Cell, RefCell};

use crate::error::{Error, Result};
use crate::kernels;
use crate::tensor::Tensor;

/// Handle to a node recorded on a [`Tape`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Var(usize);

impl Var {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug)]
enum Op {
    Leaf,
    MatMul(Var, Var),
    MatMulNT(Var, Var),
    Add(Var, Var),
    Sub(Var, Var),
    Mul(Var, Var),
    AddRow(Var, Var),
    Scale(Var, f64),
    Square(Var),
    Sum(Var),
    Softmax(Var, usize),
    LayerNorm {
        x: Var,
        gamma: Var,
        beta: Var,
        xhat: Vec<f64>,
        rstd: Vec<f64>,
    },
    Gelu(Var),
    Sigmoid(Var),
    Bce {
        probs: Var,
        targets: Vec<f64>,
    },
}

#[derive(Debug)]
struct Node {
    value: Tensor,
    op: Op,
    requires_grad: bool,
}

/// Ordered record of executed operations.
#[derive(Debug, Default)]
pub struct Tape {
    nodes: RefCell<Vec<Node>>,
    consumed: Cell<bool>,
}

/// Gradients of the parameter leaves of one backward pass.
#[derive(Debug)]
pub struct Gradients {
    grads: Vec<Option<Tensor>>,
}

impl Gradients {
    /// Gradient of a parameter leaf. `None` for constants, interior nodes,
    /// and parameters the loss does not depend on.
    pub fn get(&self, var: Var) -> Option<&Tensor> {
        self.grads.get(var.0).and_then(Option::as_ref)
    }

    /// Removes and returns a gradient, or zeros of `shape` if it is absent.
    pub fn take_or_zeros(&mut self, var: Var, shape: &[usize]) -> Tensor {
        self.grads
            .get_mut(var.0)
            .and_then(Option::take)
            .unwrap_or_else(|| Tensor::zeros(shape))
    }
}

fn mismatch(op: &'static str, a: &Tensor, b: &Tensor) -> Error {
    Error::ShapeMismatch {
        op,
        left: a.shape().to_vec(),
        right: b.shape().to_vec(),
    }
}

impl Tape {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.borrow().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn push(&self, value: Tensor, op: Op, requires_grad: bool) -> Var {
        let mut nodes = self.nodes.borrow_mut();
        nodes.push(Node {
            value,
            op,
            requires_grad,
        });
        Var(nodes.len() - 1)
    }

    fn needs(&self, vars: &[Var]) -> bool {
        let nodes = self.nodes.borrow();
        vars.iter().any(|v| nodes[v.0].requires_grad)
    }

    /// Records a leaf whose gradient is wanted.
    pub fn param(&self, value: Tensor) -> Var {
        self.push(value, Op::Leaf, true)
    }

    /// Records a leaf that never receives a gradient.
    pub fn constant(&self, value: Tensor) -> Var {
        self.push(value, Op::Leaf, false)
    }

    /// Copy of a node's value.
    pub fn value(&self, var: Var) -> Tensor {
        self.nodes.borrow()[var.0].value.clone()
    }

    pub fn with_value<R>(&self, var: Var, f: impl FnOnce(&Tensor) -> R) -> R {
        f(&self.nodes.borrow()[var.0].value)
    }

    pub fn shape(&self, var: Var) -> Vec<usize> {
        self.nodes.borrow()[var.0].value.shape().to_vec()
    }

    fn unary(&self, a: Var, f: impl FnOnce(&Tensor) -> Result<Tensor>, op: Op) -> Result<Var> {
        let out = f(&self.nodes.borrow()[a.0].value)?;
        let rg = self.needs(&[a]);
        Ok(self.push(out, op, rg))
    }

    fn binary(
        &self,
        a: Var,
        b: Var,
        f: impl FnOnce(&Tensor, &Tensor) -> Result<Tensor>,
        op: Op,
    ) -> Result<Var> {
        let out = {
            let nodes = self.nodes.borrow();
            f(&nodes[a.0].value, &nodes[b.0].value)?
        };
        let rg = self.needs(&[a, b]);
        Ok(self.push(out, op, rg))
    }

    /// Matrix product `a[M×K] · b[K×N]`.
    pub fn matmul(&self, a: Var, b: Var) -> Result<Var> {
        self.binary(
            a,
            b,
            |x, y| {
                let (m, k) = x.matrix_dims("matmul")?;
                let (k2, n) = y.matrix_dims("matmul")?;
                if k != k2 {
                    return Err(mismatch("matmul", x, y));
                }
                Tensor::new(vec![m, n], kernels::matmul(x.data(), y.data(), m, k, n))
            },
            Op::MatMul(a, b),
        )
    }

    /// Matrix product with the second operand transposed: `a[M×K] · b[N×K]ᵀ`.
    pub fn matmul_nt(&self, a: Var, b: Var) -> Result<Var> {
        self.binary(
            a,
            b,
            |x, y| {
                let (m, k) = x.matrix_dims("matmul_nt")?;
                let (n, k2) = y.matrix_dims("matmul_nt")?;
                if k != k2 {
                    return Err(mismatch("matmul_nt", x, y));
                }
                Tensor::new(vec![m, n], kernels::matmul_nt(x.data(), y.data(), m, k, n))
            },
            Op::MatMulNT(a, b),
        )
    }

    fn zip_same(
        &self,
        name: &'static str,
        a: Var,
        b: Var,
        f: fn(f64, f64) -> f64,
        op: Op,
    ) -> Result<Var> {
        self.binary(
            a,
            b,
            |x, y| {
                if x.shape() != y.shape() {
                    return Err(mismatch(name, x, y));
                }
                let data = x.data().iter().zip(y.data()).map(|(p, q)| f(*p, *q)).collect();
                Tensor::new(x.shape().to_vec(), data)
            },
            op,
        )
    }

    pub fn add(&self, a: Var, b: Var) -> Result<Var> {
        self.zip_same("add", a, b, |p, q| p + q, Op::Add(a, b))
    }

    pub fn sub(&self, a: Var, b: Var) -> Result<Var> {
        self.zip_same("sub", a, b, |p, q| p - q, Op::Sub(a, b))
    }

    /// Elementwise product.
    pub fn mul(&self, a: Var, b: Var) -> Result<Var> {
        self.zip_same("mul", a, b, |p, q| p * q, Op::Mul(a, b))
    }

    /// Adds a length-N vector to every row of an `M×N` matrix.
    pub fn add_row(&self, a: Var, bias: Var) -> Result<Var> {
        self.binary(
            a,
            bias,
            |x, b| {
                let n = x.cols();
                if b.len() != n || x.shape().len() != 2 {
                    return Err(mismatch("add_row", x, b));
                }
                let mut data = x.data().to_vec();
                for row in data.chunks_mut(n) {
                    for (v, bv) in row.iter_mut().zip(b.data()) {
                        *v += bv;
                    }
                }
                Tensor::new(x.shape().to_vec(), data)
            },
            Op::AddRow(a, bias),
        )
    }

    pub fn scale(&self, a: Var, c: f64) -> Var {
        self.unary(
            a,
            |x| Tensor::new(x.shape().to_vec(), x.data().iter().map(|v| v * c).collect()),
            Op::Scale(a, c),
        )
        .expect("elementwise op preserves shape")
    }

    pub fn square(&self, a: Var) -> Var {
        self.unary(
            a,
            |x| Tensor::new(x.shape().to_vec(), x.data().iter().map(|v| v * v).collect()),
            Op::Square(a),
        )
        .expect("elementwise op preserves shape")
    }

    /// Sum of all elements, as a one-element tensor.
    pub fn sum(&self, a: Var) -> Var {
        self.unary(
            a,
            |x| Ok(Tensor::scalar(x.data().iter().sum())),
            Op::Sum(a),
        )
        .expect("sum is total")
    }

    pub fn mean(&self, a: Var) -> Var {
        let n = self.with_value(a, Tensor::len) as f64;
        let s = self.sum(a);
        self.scale(s, 1.0 / n)
    }

    /// Softmax along `axis`, computed with max-subtraction.
    pub fn softmax(&self, a: Var, axis: usize) -> Result<Var> {
        self.unary(
            a,
            |x| {
                if axis >= x.shape().len() {
                    return Err(Error::InvalidAxis {
                        op: "softmax",
                        axis,
                        shape: x.shape().to_vec(),
                    });
                }
                Tensor::new(x.shape().to_vec(), kernels::softmax(x.data(), x.shape(), axis))
            },
            Op::Softmax(a, axis),
        )
    }

    /// Normalizes each row over the last dimension, then applies
    /// `gamma * x̂ + beta`.
    pub fn layer_norm(&self, x: Var, gamma: Var, beta: Var, eps: f64) -> Result<Var> {
        if !(eps > 0.0) {
            return Err(Error::InvalidArgument(format!("layer_norm eps must be > 0, got {eps}")));
        }
        let (out, xhat, rstd) = {
            let nodes = self.nodes.borrow();
            let (xv, g, b) = (&nodes[x.0].value, &nodes[gamma.0].value, &nodes[beta.0].value);
            let d = xv.cols();
            if g.len() != d {
                return Err(mismatch("layer_norm", xv, g));
            }
            if b.len() != d {
                return Err(mismatch("layer_norm", xv, b));
            }
            let rows = xv.len() / d;
            let mut out = vec![0.0; xv.len()];
            let mut xhat = vec![0.0; xv.len()];
            let mut rstd = vec![0.0; rows];
            for r in 0..rows {
                let row = &xv.data()[r * d..(r + 1) * d];
                let mean = row.iter().sum::<f64>() / d as f64;
                let var = row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / d as f64;
                let rs = 1.0 / (var + eps).sqrt();
                rstd[r] = rs;
                for j in 0..d {
                    let h = (row[j] - mean) * rs;
                    xhat[r * d + j] = h;
                    out[r * d + j] = g.data()[j] * h + b.data()[j];
                }
            }
            (Tensor::new(xv.shape().to_vec(), out)?, xhat, rstd)
        };
        let rg = self.needs(&[x, gamma, beta]);
        Ok(self.push(
            out,
            Op::LayerNorm {
                x,
                gamma,
                beta,
                xhat,
                rstd,
            },
            rg,
        ))
    }

    pub fn gelu(&self, a: Var) -> Var {
        self.unary(
            a,
            |x| Tensor::new(x.shape().to_vec(), x.data().iter().map(|&v| kernels::gelu(v)).collect()),
            Op::Gelu(a),
        )
        .expect("elementwise op preserves shape")
    }

    pub fn sigmoid(&self, a: Var) -> Var {
        self.unary(
            a,
            |x| {
                Tensor::new(
                    x.shape().to_vec(),
                    x.data().iter().map(|&v| kernels::sigmoid(v)).collect(),
                )
            },
            Op::Sigmoid(a),
        )
        .expect("elementwise op preserves shape")
    }

    /// Mean binary cross-entropy of probabilities against 0/1 targets.
    /// Probabilities are clamped to `[BCE_CLAMP, 1 - BCE_CLAMP]` before the logs.
    pub fn bce(&self, probs: Var, targets: &[f64]) -> Result<Var> {
        let value = {
            let nodes = self.nodes.borrow();
            let p = &nodes[probs.0].value;
            if p.len() != targets.len() {
                return Err(Error::ShapeMismatch {
                    op: "bce",
                    left: p.shape().to_vec(),
                    right: vec![targets.len()],
                });
            }
            let mut acc = 0.0;
            for (&pv, &y) in p.data().iter().zip(targets) {
                let pc = pv.clamp(BCE_CLAMP, 1.0 - BCE_CLAMP);
                acc += y * pc.ln() + (1.0 - y) * (1.0 - pc).ln();
            }
            -acc / targets.len() as f64
        };
        let rg = self.needs(&[probs]);
        Ok(self.push(
            Tensor::scalar(value),
            Op::Bce {
                probs,
                targets: targets.to_vec(),
            },
            rg,
        ))
    }

    /// Runs the backward pass from a scalar `loss`.
    ///
    /// Consumes the tape: a second call fails with [`Error::TapeConsumed`].
    pub fn backward(&self, loss: Var) -> Result<Gradients> {
        if self.consumed.get() {
            return Err(Error::TapeConsumed);
        }
        let nodes = self.nodes.borrow();
        if !nodes[loss.0].value.is_scalar() {
            return Err(Error::NonScalarLoss(nodes[loss.0].value.shape().to_vec()));
        }
        self.consumed.set(true);

        let mut grads: Vec<Option<Vec<f64>>> = vec![None; nodes.len()];
        grads[loss.0] = Some(vec![1.0]);

        for id in (0..=loss.0).rev() {
            let node = &nodes[id];
            if !node.requires_grad {
                continue;
            }
            let Some(g) = grads[id].take() else { continue };
            if matches!(node.op, Op::Leaf) {
                grads[id] = Some(g);
                continue;
            }
            let val = |v: Var| &nodes[v.0].value;
            let rg = |v: Var| nodes[v.0].requires_grad;
            let mut acc = |v: Var, delta: Vec<f64>| accumulate(&mut grads[v.0], delta);
            match &node.op {
                Op::Leaf => unreachable!(),
                Op::MatMul(a, b) => {
                    let (m, k) = (val(*a).rows(), val(*a).cols());
                    let n = val(*b).cols();
                    if rg(*a) {
                        acc(*a, kernels::matmul_nt(&g, val(*b).data(), m, n, k));
                    }
                    if rg(*b) {
                        acc(*b, kernels::matmul_tn(val(*a).data(), &g, m, k, n));
                    }
                }
                Op::MatMulNT(a, b) => {
                    let (m, k) = (val(*a).rows(), val(*a).cols());
                    let n = val(*b).rows();
                    if rg(*a) {
                        acc(*a, kernels::matmul(&g, val(*b).data(), m, n, k));
                    }
                    if rg(*b) {
                        acc(*b, kernels::matmul_tn(&g, val(*a).data(), m, n, k));
                    }
                }
                Op::Add(a, b) => {
                    if rg(*a) {
                        acc(*a, g.clone());
                    }
                    if rg(*b) {
                        acc(*b, g);
                    }
                }
                Op::Sub(a, b) => {
                    if rg(*a) {
                        acc(*a, g.clone());
                    }
                    if rg(*b) {
                        acc(*b, g.iter().map(|v| -v).collect());
                    }
                }
                Op::Mul(a, b) => {
                    if rg(*a) {
                        acc(*a, g.iter().zip(val(*b).data()).map(|(p, q)| p * q).collect());
                    }
                    if rg(*b) {
                        acc(*b, g.iter().zip(val(*a).data()).map(|(p, q)| p * q).collect());
                    }
                }
                Op::AddRow(a, bias) => {
                    let n = val(*bias).len();
                    if rg(*bias) {
                        let mut gb = vec![0.0; n];
                        for row in g.chunks(n) {
                            for (s, v) in gb.iter_mut().zip(row) {
                                *s += v;
                            }
                        }
                        acc(*bias, gb);
                    }
                    if rg(*a) {
                        acc(*a, g);
                    }
                }
                Op::Scale(a, c) => acc(*a, g.iter().map(|v| v * c).collect()),
                Op::Square(a) => {
                    acc(*a, g.iter().zip(val(*a).data()).map(|(p, x)| 2.0 * x * p).collect())
                }
                Op::Sum(a) => acc(*a, vec![g[0]; val(*a).len()]),
                Op::Softmax(a, axis) => {
                    let y = node.value.data();
                    let (outer, len, inner) = kernels::axis_extents(node.value.shape(), *axis);
                    let mut dx = vec![0.0; y.len()];
                    for o in 0..outer {
                        for i in 0..inner {
                            let idx = |j: usize| (o * len + j) * inner + i;
                            let mut dot = 0.0;
                            for j in 0..len {
                                dot += y[idx(j)] * g[idx(j)];
                            }
                            for j in 0..len {
                                dx[idx(j)] = y[idx(j)] * (g[idx(j)] - dot);
                            }
                        }
                    }
                    acc(*a, dx);
                }
                Op::LayerNorm {
                    x,
                    gamma,
                    beta,
                    xhat,
                    rstd,
                } => {
                    let d = val(*gamma).len();
                    let gv = val(*gamma).data();
                    if rg(*gamma) {
                        let mut dg = vec![0.0; d];
                        for (row_g, row_h) in g.chunks(d).zip(xhat.chunks(d)) {
                            for j in 0..d {
                                dg[j] += row_g[j] * row_h[j];
                            }
                        }
                        acc(*gamma, dg);
                    }
                    if rg(*beta) {
                        let mut db = vec![0.0; d];
                        for row_g in g.chunks(d) {
                            for j in 0..d {
                                db[j] += row_g[j];
                            }
                        }
                        acc(*beta, db);
                    }
                    if rg(*x) {
                        let mut dx = vec![0.0; g.len()];
                        for (r, rs) in rstd.iter().enumerate() {
                            let row_g = &g[r * d..(r + 1) * d];
                            let row_h = &xhat[r * d..(r + 1) * d];
                            let mut sum_dh = 0.0;
                            let mut sum_dh_h = 0.0;
                            for j in 0..d {
                                let dh = row_g[j] * gv[j];
                                sum_dh += dh;
                                sum_dh_h += dh * row_h[j];
                            }
                            for j in 0..d {
                                let dh = row_g[j] * gv[j];
                                dx[r * d + j] = rs / d as f64
                                    * (d as f64 * dh - sum_dh - row_h[j] * sum_dh_h);
                            }
                        }
                        acc(*x, dx);
                    }
                }
                Op::Gelu(a) => acc(
                    *a,
                    g.iter()
                        .zip(val(*a).data())
                        .map(|(p, &x)| p * kernels::gelu_grad(x))
                        .collect(),
                ),
                Op::Sigmoid(a) => acc(
                    *a,
                    g.iter()
                        .zip(node.value.data())
                        .map(|(p, y)| p * y * (1.0 - y))
                        .collect(),
                ),
                Op::Bce { probs, targets } => {
                    let n = targets.len() as f64;
                    let dp = val(*probs)
                        .data()
                        .iter()
                        .zip(targets)
                        .map(|(&p, &y)| {
                            if p <= BCE_CLAMP || p >= 1.0 - BCE_CLAMP {
                                0.0
                            } else {
                                -g[0] / n * (y / p - (1.0 - y) / (1.0 - p))
                            }
                        })
                        .collect();
                    acc(*probs, dp);
                }
            }
        }

        let grads = grads
            .into_iter()
            .zip(nodes.iter())
            .map(|(g, node)| match (g, &node.op, node.requires_grad) {
                (Some(g), Op::Leaf, true) => {
                    Some(Tensor::new(node.value.shape().to_vec(), g).expect("grad matches shape"))
                }
                _ => None,
            })
            .collect();
        Ok(Gradients { grads })
    }
}

/// Lower clamp applied to probabilities before taking logs.
pub const BCE_CLAMP: f64 = 1e-12;

fn accumulate(slot: &mut Option<Vec<f64>>, delta: Vec<f64>) {
    match slot {
        Some(existing) => {
            for (e, d) in existing.iter_mut().zip(&delta) {
                *e += d;
            }
        }
        None => *slot = Some(delta),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(shape: &[usize], data: &[f64]) -> Tensor {
        Tensor::new(shape.to_vec(), data.to_vec()).unwrap()
    }

    #[test]
    fn matmul_identity_and_hand_product() {
        let tape = Tape::new();
        let i2 = tape.constant(Tensor::eye(2));
        let a = tape.constant(t(&[2, 2], &[1.0, 2.0, 3.0, 4.0]));
        let b = tape.constant(t(&[2, 2], &[5.0, 6.0, 7.0, 8.0]));
        let ia = tape.matmul(i2, a).unwrap();
        assert_eq!(tape.value(ia).data(), &[1.0, 2.0, 3.0, 4.0]);
        let ab = tape.matmul(a, b).unwrap();
        assert_eq!(tape.value(ab).data(), &[19.0, 22.0, 43.0, 50.0]);
    }

    #[test]
    fn matmul_shape_mismatch_names_both_shapes() {
        let tape = Tape::new();
        let a = tape.constant(Tensor::zeros(&[2, 3]));
        let b = tape.constant(Tensor::zeros(&[2, 3]));
        let err = tape.matmul(a, b).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("[2, 3]"), "{msg}");
        assert!(matches!(err, Error::ShapeMismatch { .. }));
    }

    #[test]
    fn softmax_examples() {
        let tape = Tape::new();
        let a = tape.constant(t(&[2], &[0.0, 0.0]));
        assert_eq!(tape.value(tape.softmax(a, 0).unwrap()).data(), &[0.5, 0.5]);

        let b = tape.constant(t(&[3], &[1.0, 2.0, 3.0]));
        let sb = tape.value(tape.softmax(b, 0).unwrap());
        for (got, want) in sb.data().iter().zip([0.09003, 0.24473, 0.66524]) {
            assert!((got - want).abs() < 1e-5);
        }

        let c = tape.constant(t(&[2], &[1000.0, 0.0]));
        let sc = tape.value(tape.softmax(c, 0).unwrap());
        assert_eq!(sc.data()[0], 1.0);
        assert!(sc.data()[1] >= 0.0 && sc.data()[1] < 1e-300);
        assert!(sc.is_finite());
    }

    #[test]
    fn softmax_rejects_bad_axis() {
        let tape = Tape::new();
        let a = tape.constant(Tensor::zeros(&[2, 2]));
        assert!(matches!(tape.softmax(a, 2), Err(Error::InvalidAxis { .. })));
    }

    #[test]
    fn softmax_along_leading_axis_normalizes_columns() {
        let tape = Tape::new();
        let a = tape.constant(t(&[2, 3], &[1.0, 5.0, -2.0, 3.0, 0.0, 4.0]));
        let s = tape.value(tape.softmax(a, 0).unwrap());
        for j in 0..3 {
            assert!((s.get2(0, j) + s.get2(1, j) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn layer_norm_examples() {
        let tape = Tape::new();
        let ones = tape.constant(Tensor::full(&[4], 1.0));
        let zeros = tape.constant(Tensor::zeros(&[4]));
        let c = tape.constant(Tensor::full(&[1, 4], 3.7));
        let y = tape.value(tape.layer_norm(c, ones, zeros, 1e-5).unwrap());
        assert!(y.data().iter().all(|v| *v == 0.0));

        let g2 = tape.constant(Tensor::full(&[2], 1.0));
        let b2 = tape.constant(Tensor::zeros(&[2]));
        let x = tape.constant(t(&[1, 2], &[1.0, 3.0]));
        let y = tape.value(tape.layer_norm(x, g2, b2, 1e-15).unwrap());
        assert!((y.data()[0] + 1.0).abs() < 1e-12);
        assert!((y.data()[1] - 1.0).abs() < 1e-12);

        let g3 = tape.constant(Tensor::full(&[3], 1.0));
        assert!(tape.layer_norm(x, g3, b2, 1e-5).is_err());
    }

    #[test]
    fn backward_of_sum_is_ones() {
        let tape = Tape::new();
        let x = tape.param(Tensor::full(&[2, 3], 0.4));
        let loss = tape.sum(x);
        let g = tape.backward(loss).unwrap();
        assert_eq!(g.get(x).unwrap().data(), &[1.0; 6]);
        assert_eq!(g.get(x).unwrap().shape(), &[2, 3]);
    }

    #[test]
    fn backward_accumulates_shared_inputs() {
        let tape = Tape::new();
        let x = tape.param(t(&[3], &[1.0, 2.0, 3.0]));
        let sq = tape.mul(x, x).unwrap();
        let loss = tape.sum(sq);
        let g = tape.backward(loss).unwrap();
        assert_eq!(g.get(x).unwrap().data(), &[2.0, 4.0, 6.0]);
    }

    #[test]
    fn second_backward_fails() {
        let tape = Tape::new();
        let x = tape.param(t(&[2], &[1.0, 2.0]));
        let l1 = tape.sum(x);
        let l2 = tape.sum(tape.square(x));
        tape.backward(l1).unwrap();
        assert!(matches!(tape.backward(l2), Err(Error::TapeConsumed)));
    }

    #[test]
    fn non_scalar_loss_is_rejected() {
        let tape = Tape::new();
        let x = tape.param(t(&[2], &[1.0, 2.0]));
        assert!(matches!(tape.backward(x), Err(Error::NonScalarLoss(_))));
        // a rejected call does not consume the tape
        let l = tape.sum(x);
        assert!(tape.backward(l).is_ok());
    }

    #[test]
    fn constants_get_no_gradient() {
        let tape = Tape::new();
        let c = tape.constant(t(&[2], &[1.0, 2.0]));
        let x = tape.param(t(&[2], &[3.0, 4.0]));
        let p = tape.mul(c, x).unwrap();
        let g = tape.backward(tape.sum(p)).unwrap();
        assert!(g.get(c).is_none());
        assert_eq!(g.get(x).unwrap().data(), &[1.0, 2.0]);
    }

    #[test]
    fn bce_of_half_is_ln2() {
        let tape = Tape::new();
        let p = tape.param(t(&[2], &[0.5, 0.5]));
        let l = tape.bce(p, &[0.0, 1.0]).unwrap();
        assert!((tape.value(l).item() - std::f64::consts::LN_2).abs() < 1e-15);
    }
}
