use ndarray::Array2;
use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{check_widths, glorot_bound, sigmoid, Params};
use crate::error::{Error, Result};
use crate::vecmat::{vec_matmul, VecMatrix};

/// One layer: `A^l = σ(W ⊗ A^{l−1} + B)`, with `B` broadcast across columns.
#[derive(Debug, Clone, PartialEq)]
pub struct VpLayer {
    w: VecMatrix,
    b: VecMatrix,
}

impl VpLayer {
    pub fn new(w: VecMatrix, b: VecMatrix) -> Result<Self> {
        if b.cols() != 1 || b.rows() != w.rows() {
            return Err(Error::ShapeMismatch {
                op: "VpLayer::new",
                left: w.dim(),
                right: b.dim(),
            });
        }
        Ok(VpLayer { w, b })
    }

    pub fn weights(&self) -> &VecMatrix {
        &self.w
    }

    pub fn bias(&self) -> &VecMatrix {
        &self.b
    }

    pub fn inputs(&self) -> usize {
        self.w.cols()
    }

    pub fn outputs(&self) -> usize {
        self.w.rows()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VpNetwork {
    layers: Vec<VpLayer>,
}

impl VpNetwork {
    pub fn new(layers: Vec<VpLayer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::EmptyInput("VpNetwork::new"));
        }
        for pair in layers.windows(2) {
            if pair[1].inputs() != pair[0].outputs() {
                return Err(Error::ShapeMismatch {
                    op: "VpNetwork::new",
                    left: pair[0].w.dim(),
                    right: pair[1].w.dim(),
                });
            }
        }
        Ok(VpNetwork { layers })
    }

    /// `widths = [input, hidden.., output]`. Each component plane of each
    /// weight matrix is drawn independently from the Glorot uniform range.
    pub fn init(widths: &[usize], seed: u64) -> Result<Self> {
        check_widths(widths)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layers = widths
            .windows(2)
            .map(|w| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let bound = glorot_bound(fan_in, fan_out);
                let dist = Uniform::new_inclusive(-bound, bound);
                let mut plane = || Array2::from_shape_fn((fan_out, fan_in), |_| dist.sample(&mut rng));
                let weights =
                    VecMatrix::from_planes(plane(), plane(), plane()).expect("planes share a shape");
                VpLayer {
                    w: weights,
                    b: VecMatrix::zeros(fan_out, 1),
                }
            })
            .collect();
        Ok(VpNetwork { layers })
    }

    pub fn layers(&self) -> &[VpLayer] {
        &self.layers
    }

    pub fn widths(&self) -> Vec<usize> {
        let mut w = vec![self.layers[0].inputs()];
        w.extend(self.layers.iter().map(VpLayer::outputs));
        w
    }

    pub fn input_rows(&self) -> usize {
        self.layers[0].inputs()
    }
}

impl Params for VpNetwork {
    fn planes(&self) -> Vec<&Array2<f64>> {
        self.layers
            .iter()
            .flat_map(|l| l.w.planes().into_iter().chain(l.b.planes()))
            .collect()
    }

    fn planes_mut(&mut self) -> Vec<&mut Array2<f64>> {
        self.layers
            .iter_mut()
            .flat_map(|l| {
                let VpLayer { w, b } = l;
                w.planes_mut().into_iter().chain(b.planes_mut())
            })
            .collect()
    }
}

/// Activations of every layer, input included (`activations[0] = A⁰`).
#[derive(Debug, Clone)]
pub struct VpCache {
    activations: Vec<VecMatrix>,
}

impl VpCache {
    pub fn activations(&self) -> &[VecMatrix] {
        &self.activations
    }

    pub fn output(&self) -> &VecMatrix {
        self.activations.last().expect("cache holds at least the input")
    }
}

/// Per-layer gradients, congruent with [`VpNetwork`]'s parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct VpGradients {
    layers: Vec<VpLayer>,
}

impl VpGradients {
    pub fn zeros_like(net: &VpNetwork) -> Self {
        VpGradients {
            layers: net
                .layers
                .iter()
                .map(|l| VpLayer {
                    w: VecMatrix::zeros(l.w.rows(), l.w.cols()),
                    b: VecMatrix::zeros(l.b.rows(), 1),
                })
                .collect(),
        }
    }

    pub fn weight(&self, layer: usize) -> &VecMatrix {
        &self.layers[layer].w
    }

    pub fn bias(&self, layer: usize) -> &VecMatrix {
        &self.layers[layer].b
    }
}

impl Params for VpGradients {
    fn planes(&self) -> Vec<&Array2<f64>> {
        self.layers
            .iter()
            .flat_map(|l| l.w.planes().into_iter().chain(l.b.planes()))
            .collect()
    }

    fn planes_mut(&mut self) -> Vec<&mut Array2<f64>> {
        self.layers
            .iter_mut()
            .flat_map(|l| {
                let VpLayer { w, b } = l;
                w.planes_mut().into_iter().chain(b.planes_mut())
            })
            .collect()
    }
}

pub fn vp_forward(net: &VpNetwork, input: &VecMatrix) -> Result<(VecMatrix, VpCache)> {
    vp_forward_with(net, input, vec_matmul)
}

/// Forward pass with a caller-chosen vector-valued product, so the fast and
/// naive products can be compared end to end.
pub fn vp_forward_with(
    net: &VpNetwork,
    input: &VecMatrix,
    product: impl Fn(&VecMatrix, &VecMatrix) -> Result<VecMatrix>,
) -> Result<(VecMatrix, VpCache)> {
    if input.rows() != net.input_rows() {
        return Err(Error::ShapeMismatch {
            op: "vp_forward",
            left: net.layers[0].w.dim(),
            right: input.dim(),
        });
    }
    let mut activations = Vec::with_capacity(net.layers.len() + 1);
    activations.push(input.clone());
    for layer in &net.layers {
        let prev = activations.last().expect("non-empty");
        let z = product(&layer.w, prev)?.add_column(&layer.b)?;
        activations.push(z.map(sigmoid));
    }
    let y = activations.last().expect("non-empty").clone();
    Ok((y, VpCache { activations }))
}

/// Backpropagates `∂L/∂Y` through the network.
///
/// With `g = ∂L/∂z` at `z = Σ w × a + b`, the scalar triple product gives
/// `∂L/∂w = a × g` and `∂L/∂a = g × w`. In matrix form these are
/// `dW = −(G ⊗ Aᵀ)` and `dA = −(Wᵀ ⊗ G)`.
pub fn vp_backward(net: &VpNetwork, cache: &VpCache, grad_output: &VecMatrix) -> Result<VpGradients> {
    if cache.activations.len() != net.layers.len() + 1 {
        return Err(Error::InvalidParameter(format!(
            "cache holds {} activations for a {}-layer network",
            cache.activations.len(),
            net.layers.len()
        )));
    }
    for (layer, a) in net.layers.iter().zip(&cache.activations[1..]) {
        if a.rows() != layer.outputs() {
            return Err(Error::ShapeMismatch {
                op: "vp_backward (cache)",
                left: layer.w.dim(),
                right: a.dim(),
            });
        }
    }
    if grad_output.dim() != cache.output().dim() {
        return Err(Error::ShapeMismatch {
            op: "vp_backward",
            left: cache.output().dim(),
            right: grad_output.dim(),
        });
    }

    let mut grads = Vec::with_capacity(net.layers.len());
    let mut upstream = grad_output.clone();
    for (l, layer) in net.layers.iter().enumerate().rev() {
        let out = &cache.activations[l + 1];
        let input = &cache.activations[l];
        let g = sigmoid_adjoint(out, &upstream);
        let dw = vec_matmul(&g, &input.t())?.map(|v| -v);
        let db = g.sum_cols();
        if l > 0 {
            upstream = vec_matmul(&layer.w.t(), &g)?.map(|v| -v);
        }
        grads.push(VpLayer { w: dw, b: db });
    }
    grads.reverse();
    Ok(VpGradients { layers: grads })
}

/// `upstream ⊙ σ'(z)` where `σ'(z) = a(1 − a)` per component.
fn sigmoid_adjoint(activation: &VecMatrix, upstream: &VecMatrix) -> VecMatrix {
    let [a1, a2, a3] = activation.planes();
    let [u1, u2, u3] = upstream.planes();
    let d = |a: &Array2<f64>, u: &Array2<f64>| {
        let mut out = u.clone();
        out.zip_mut_with(a, |g, &s| *g *= s * (1.0 - s));
        out
    };
    VecMatrix::from_planes(d(a1, u1), d(a2, u2), d(a3, u3)).expect("congruent planes")
}
