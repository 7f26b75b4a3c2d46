//! Dependency-light feed-forward network with hand-rolled backpropagation.
//!
//! The same code runs in f32 (training) and f64 (the finite-difference
//! gradient oracle), so the two paths cannot drift apart.

use num_traits::Float;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub trait Scalar:
    Float + std::ops::AddAssign + std::ops::SubAssign + Send + Sync + 'static
{
    fn from_f64(v: f64) -> Self;
    fn to_f64(self) -> f64;
}

impl Scalar for f32 {
    fn from_f64(v: f64) -> Self {
        v as f32
    }
    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64(self) -> f64 {
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LayerKind {
    Dense {
        in_dim: usize,
        out_dim: usize,
    },
    Conv {
        in_c: usize,
        in_h: usize,
        in_w: usize,
        out_c: usize,
        kernel: usize,
        stride: usize,
    },
    Relu,
}

impl LayerKind {
    fn out_len(&self, in_len: usize) -> usize {
        match self {
            LayerKind::Dense { out_dim, .. } => *out_dim,
            LayerKind::Conv {
                in_h,
                in_w,
                out_c,
                kernel,
                stride,
                ..
            } => {
                let oh = (in_h - kernel) / stride + 1;
                let ow = (in_w - kernel) / stride + 1;
                out_c * oh * ow
            }
            LayerKind::Relu => in_len,
        }
    }

    fn param_counts(&self) -> (usize, usize) {
        match self {
            LayerKind::Dense { in_dim, out_dim } => (in_dim * out_dim, *out_dim),
            LayerKind::Conv {
                in_c,
                out_c,
                kernel,
                ..
            } => (out_c * in_c * kernel * kernel, *out_c),
            LayerKind::Relu => (0, 0),
        }
    }

    fn fan_in(&self) -> usize {
        match self {
            LayerKind::Dense { in_dim, .. } => *in_dim,
            LayerKind::Conv {
                in_c, kernel, ..
            } => in_c * kernel * kernel,
            LayerKind::Relu => 0,
        }
    }
}

#[derive(Debug, Clone)]
struct Span {
    w_off: usize,
    w_len: usize,
    b_off: usize,
    b_len: usize,
}

/// A feed-forward network with all parameters in one flat vector.
#[derive(Debug, Clone)]
pub struct Net<T: Scalar> {
    kinds: Vec<LayerKind>,
    spans: Vec<Span>,
    params: Vec<T>,
    input_len: usize,
    output_len: usize,
}

impl<T: Scalar> Net<T> {
    /// Builds the layer stack and draws initial weights from the seed:
    /// uniform in `±1/sqrt(fan_in)`, biases zero.
    pub fn new(kinds: Vec<LayerKind>, input_len: usize, seed: u64) -> Result<Self> {
        let mut spans = Vec::with_capacity(kinds.len());
        let mut total = 0;
        let mut len = input_len;
        for kind in &kinds {
            let (w_len, b_len) = kind.param_counts();
            spans.push(Span {
                w_off: total,
                w_len,
                b_off: total + w_len,
                b_len,
            });
            total += w_len + b_len;
            let out = kind.out_len(len);
            if out == 0 {
                return Err(Error::input("layer produces no outputs"));
            }
            len = out;
        }
        let mut params = vec![T::zero(); total];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (kind, span) in kinds.iter().zip(&spans) {
            let fan_in = kind.fan_in().max(1);
            let bound = 1.0 / (fan_in as f64).sqrt();
            for p in &mut params[span.w_off..span.w_off + span.w_len] {
                *p = T::from_f64(rng.gen_range(-bound..bound));
            }
            // biases stay zero
        }
        Ok(Net {
            kinds,
            spans,
            params,
            input_len,
            output_len: len,
        })
    }

    pub fn input_len(&self) -> usize {
        self.input_len
    }

    pub fn output_len(&self) -> usize {
        self.output_len
    }

    pub fn params(&self) -> &[T] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [T] {
        &mut self.params
    }

    pub fn set_params(&mut self, values: &[T]) -> Result<()> {
        if values.len() != self.params.len() {
            return Err(Error::input(format!(
                "parameter vector has {} entries, network expects {}",
                values.len(),
                self.params.len()
            )));
        }
        self.params.copy_from_slice(values);
        Ok(())
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    /// Forward pass returning the logits; `cache`, when given, receives the
    /// input of every layer for the backward pass.
    pub fn forward(&self, x: &[T], mut cache: Option<&mut Vec<Vec<T>>>) -> Result<Vec<T>> {
        if x.len() != self.input_len {
            return Err(Error::input(format!(
                "input has {} values, network expects {}",
                x.len(),
                self.input_len
            )));
        }
        if let Some(c) = cache.as_deref_mut() {
            c.clear();
        }
        let mut cur = x.to_vec();
        for (kind, span) in self.kinds.iter().zip(&self.spans) {
            if let Some(c) = cache.as_deref_mut() {
                c.push(cur.clone());
            }
            cur = self.apply(kind, span, &cur);
        }
        Ok(cur)
    }

    fn apply(&self, kind: &LayerKind, span: &Span, x: &[T]) -> Vec<T> {
        let w = &self.params[span.w_off..span.w_off + span.w_len];
        let b = &self.params[span.b_off..span.b_off + span.b_len];
        match kind {
            LayerKind::Dense { in_dim, out_dim } => {
                let mut y = Vec::with_capacity(*out_dim);
                for o in 0..*out_dim {
                    let row = &w[o * in_dim..(o + 1) * in_dim];
                    let mut acc = b[o];
                    for (wi, xi) in row.iter().zip(x) {
                        acc += *wi * *xi;
                    }
                    y.push(acc);
                }
                y
            }
            LayerKind::Conv {
                in_c,
                in_h,
                in_w,
                out_c,
                kernel,
                stride,
            } => {
                let oh = (in_h - kernel) / stride + 1;
                let ow = (in_w - kernel) / stride + 1;
                let mut y = vec![T::zero(); out_c * oh * ow];
                for oc in 0..*out_c {
                    for oy in 0..oh {
                        for ox in 0..ow {
                            let mut acc = b[oc];
                            for ic in 0..*in_c {
                                for ky in 0..*kernel {
                                    let iy = oy * stride + ky;
                                    let x_row = &x[(ic * in_h + iy) * in_w..];
                                    let w_row = &w[((oc * in_c + ic) * kernel + ky) * kernel..];
                                    for kx in 0..*kernel {
                                        acc += w_row[kx] * x_row[ox * stride + kx];
                                    }
                                }
                            }
                            y[(oc * oh + oy) * ow + ox] = acc;
                        }
                    }
                }
                y
            }
            LayerKind::Relu => x
                .iter()
                .map(|&v| if v > T::zero() { v } else { T::zero() })
                .collect(),
        }
    }

    /// Backward pass; accumulates parameter gradients into `grads` (same
    /// layout as `params`). `cache` must come from a matching forward call.
    pub fn backward(&self, cache: &[Vec<T>], dy: &[T], grads: &mut [T]) {
        assert_eq!(grads.len(), self.params.len());
        let mut delta = dy.to_vec();
        for ((kind, span), x) in self.kinds.iter().zip(&self.spans).zip(cache).rev() {
            delta = self.apply_backward(kind, span, x, &delta, grads);
        }
    }

    fn apply_backward(
        &self,
        kind: &LayerKind,
        span: &Span,
        x: &[T],
        dy: &[T],
        grads: &mut [T],
    ) -> Vec<T> {
        let w = &self.params[span.w_off..span.w_off + span.w_len];
        match kind {
            LayerKind::Dense { in_dim, out_dim } => {
                let (gw, gb) = {
                    let (head, tail) = grads.split_at_mut(span.b_off);
                    (
                        &mut head[span.w_off..span.w_off + span.w_len],
                        &mut tail[..span.b_len],
                    )
                };
                let mut dx = vec![T::zero(); *in_dim];
                for o in 0..*out_dim {
                    let d = dy[o];
                    gb[o] += d;
                    let w_row = &w[o * in_dim..(o + 1) * in_dim];
                    let g_row = &mut gw[o * in_dim..(o + 1) * in_dim];
                    for i in 0..*in_dim {
                        g_row[i] += d * x[i];
                        dx[i] += d * w_row[i];
                    }
                }
                dx
            }
            LayerKind::Conv {
                in_c,
                in_h,
                in_w,
                out_c,
                kernel,
                stride,
            } => {
                let oh = (in_h - kernel) / stride + 1;
                let ow = (in_w - kernel) / stride + 1;
                let (gw, gb) = {
                    let (head, tail) = grads.split_at_mut(span.b_off);
                    (
                        &mut head[span.w_off..span.w_off + span.w_len],
                        &mut tail[..span.b_len],
                    )
                };
                let mut dx = vec![T::zero(); in_c * in_h * in_w];
                for oc in 0..*out_c {
                    for oy in 0..oh {
                        for ox in 0..ow {
                            let d = dy[(oc * oh + oy) * ow + ox];
                            gb[oc] += d;
                            for ic in 0..*in_c {
                                for ky in 0..*kernel {
                                    let iy = oy * stride + ky;
                                    for kx in 0..*kernel {
                                        let ix = ox * stride + kx;
                                        let wi = ((oc * in_c + ic) * kernel + ky) * kernel + kx;
                                        let xi = (ic * in_h + iy) * in_w + ix;
                                        gw[wi] += d * x[xi];
                                        dx[xi] += d * w[wi];
                                    }
                                }
                            }
                        }
                    }
                }
                dx
            }
            LayerKind::Relu => x
                .iter()
                .zip(dy)
                .map(|(&xi, &di)| if xi > T::zero() { di } else { T::zero() })
                .collect(),
        }
    }
}

/// Numerically stable softmax.
pub fn softmax<T: Scalar>(logits: &[T]) -> Vec<T> {
    let max = logits
        .iter()
        .cloned()
        .fold(T::neg_infinity(), |a, b| if b > a { b } else { a });
    let exps: Vec<T> = logits.iter().map(|&l| (l - max).exp()).collect();
    let sum = exps.iter().fold(T::zero(), |a, &b| a + b);
    exps.into_iter().map(|e| e / sum).collect()
}

/// Index of the largest logit; ties break toward the lowest label index.
pub fn argmax<T: Scalar>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Cross-entropy loss of one sample and the matching logit gradient.
pub fn softmax_cross_entropy<T: Scalar>(logits: &[T], label: usize) -> (T, Vec<T>) {
    let probs = softmax(logits);
    let eps = T::from_f64(1e-30);
    let loss = -(probs[label] + eps).ln();
    let mut dlogits = probs;
    dlogits[label] = dlogits[label] - T::one();
    (loss, dlogits)
}

/// Adam optimizer over the flat parameter vector.
#[derive(Debug, Clone)]
pub struct Adam<T: Scalar> {
    m: Vec<T>,
    v: Vec<T>,
    t: i32,
    lr: T,
    beta1: T,
    beta2: T,
    eps: T,
}

impl<T: Scalar> Adam<T> {
    pub fn new(num_params: usize, lr: f64) -> Self {
        Adam {
            m: vec![T::zero(); num_params],
            v: vec![T::zero(); num_params],
            t: 0,
            lr: T::from_f64(lr),
            beta1: T::from_f64(0.9),
            beta2: T::from_f64(0.999),
            eps: T::from_f64(1e-8),
        }
    }

    pub fn step(&mut self, params: &mut [T], grads: &[T]) {
        self.t += 1;
        let bc1 = T::one() - self.beta1.powi(self.t);
        let bc2 = T::one() - self.beta2.powi(self.t);
        for i in 0..params.len() {
            let g = grads[i];
            self.m[i] = self.beta1 * self.m[i] + (T::one() - self.beta1) * g;
            self.v[i] = self.beta2 * self.v[i] + (T::one() - self.beta2) * g * g;
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            params[i] -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
        }
    }
}
