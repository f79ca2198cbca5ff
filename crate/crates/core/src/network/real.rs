use ndarray::{Array1, Array2, Axis};
use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{check_widths, glorot_bound, sigmoid, Params};
use crate::error::{Error, Result};

/// Dense sigmoid layer. The bias is stored as an `out × 1` matrix so that it
/// shares the plane representation used by the optimizer.
#[derive(Debug, Clone, PartialEq)]
pub struct RealLayer {
    w: Array2<f64>,
    b: Array2<f64>,
}

impl RealLayer {
    pub fn new(w: Array2<f64>, b: Array1<f64>) -> Result<Self> {
        if b.len() != w.nrows() {
            return Err(Error::ShapeMismatch {
                op: "RealLayer::new",
                left: w.dim(),
                right: (b.len(), 1),
            });
        }
        Ok(RealLayer {
            w,
            b: b.insert_axis(Axis(1)),
        })
    }

    pub fn weights(&self) -> &Array2<f64> {
        &self.w
    }

    pub fn bias(&self) -> &Array2<f64> {
        &self.b
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealNetwork {
    layers: Vec<RealLayer>,
}

impl RealNetwork {
    pub fn new(layers: Vec<RealLayer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::EmptyInput("RealNetwork::new"));
        }
        for pair in layers.windows(2) {
            if pair[1].w.ncols() != pair[0].w.nrows() {
                return Err(Error::ShapeMismatch {
                    op: "RealNetwork::new",
                    left: pair[0].w.dim(),
                    right: pair[1].w.dim(),
                });
            }
        }
        Ok(RealNetwork { layers })
    }

    pub fn init(widths: &[usize], seed: u64) -> Result<Self> {
        check_widths(widths)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layers = widths
            .windows(2)
            .map(|w| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let bound = glorot_bound(fan_in, fan_out);
                let dist = Uniform::new_inclusive(-bound, bound);
                RealLayer {
                    w: Array2::from_shape_fn((fan_out, fan_in), |_| dist.sample(&mut rng)),
                    b: Array2::zeros((fan_out, 1)),
                }
            })
            .collect();
        Ok(RealNetwork { layers })
    }

    pub fn layers(&self) -> &[RealLayer] {
        &self.layers
    }

    pub fn widths(&self) -> Vec<usize> {
        let mut w = vec![self.layers[0].w.ncols()];
        w.extend(self.layers.iter().map(|l| l.w.nrows()));
        w
    }
}

impl Params for RealNetwork {
    fn planes(&self) -> Vec<&Array2<f64>> {
        self.layers.iter().flat_map(|l| [&l.w, &l.b]).collect()
    }

    fn planes_mut(&mut self) -> Vec<&mut Array2<f64>> {
        self.layers
            .iter_mut()
            .flat_map(|l| [&mut l.w, &mut l.b])
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct RealCache {
    activations: Vec<Array2<f64>>,
}

impl RealCache {
    pub fn activations(&self) -> &[Array2<f64>] {
        &self.activations
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealGradients {
    layers: Vec<RealLayer>,
}

impl RealGradients {
    pub fn weight(&self, layer: usize) -> &Array2<f64> {
        &self.layers[layer].w
    }

    pub fn bias(&self, layer: usize) -> &Array2<f64> {
        &self.layers[layer].b
    }
}

impl Params for RealGradients {
    fn planes(&self) -> Vec<&Array2<f64>> {
        self.layers.iter().flat_map(|l| [&l.w, &l.b]).collect()
    }

    fn planes_mut(&mut self) -> Vec<&mut Array2<f64>> {
        self.layers
            .iter_mut()
            .flat_map(|l| [&mut l.w, &mut l.b])
            .collect()
    }
}

pub fn real_forward(net: &RealNetwork, input: &Array2<f64>) -> Result<(Array2<f64>, RealCache)> {
    if input.nrows() != net.layers[0].w.ncols() {
        return Err(Error::ShapeMismatch {
            op: "real_forward",
            left: net.layers[0].w.dim(),
            right: input.dim(),
        });
    }
    let mut activations = Vec::with_capacity(net.layers.len() + 1);
    activations.push(input.clone());
    for layer in &net.layers {
        let prev = activations.last().expect("non-empty");
        let mut z = layer.w.dot(prev);
        z += &layer.b;
        z.mapv_inplace(sigmoid);
        activations.push(z);
    }
    let y = activations.last().expect("non-empty").clone();
    Ok((y, RealCache { activations }))
}

pub fn real_backward(
    net: &RealNetwork,
    cache: &RealCache,
    grad_output: &Array2<f64>,
) -> Result<RealGradients> {
    if cache.activations.len() != net.layers.len() + 1 {
        return Err(Error::InvalidParameter(format!(
            "cache holds {} activations for a {}-layer network",
            cache.activations.len(),
            net.layers.len()
        )));
    }
    for (layer, a) in net.layers.iter().zip(&cache.activations[1..]) {
        if a.nrows() != layer.w.nrows() {
            return Err(Error::ShapeMismatch {
                op: "real_backward (cache)",
                left: layer.w.dim(),
                right: a.dim(),
            });
        }
    }
    let out = cache.activations.last().expect("non-empty");
    if grad_output.dim() != out.dim() {
        return Err(Error::ShapeMismatch {
            op: "real_backward",
            left: out.dim(),
            right: grad_output.dim(),
        });
    }

    let mut grads = Vec::with_capacity(net.layers.len());
    let mut upstream = grad_output.clone();
    for (l, layer) in net.layers.iter().enumerate().rev() {
        let mut g = upstream;
        g.zip_mut_with(&cache.activations[l + 1], |g, &s| *g *= s * (1.0 - s));
        let dw = g.dot(&cache.activations[l].t());
        let db = g.sum_axis(Axis(1)).insert_axis(Axis(1));
        upstream = if l > 0 {
            layer.w.t().dot(&g)
        } else {
            Array2::zeros((0, 0))
        };
        grads.push(RealLayer { w: dw, b: db });
    }
    grads.reverse();
    Ok(RealGradients { layers: grads })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{param_count, ModelKind};

    #[test]
    fn zero_net_outputs_half() {
        let mut net = RealNetwork::init(&[3, 4, 2], 0).unwrap();
        for p in net.planes_mut() {
            p.fill(0.0);
        }
        let x = Array2::from_shape_fn((3, 5), |(i, j)| (i * j) as f64);
        let (y, _) = real_forward(&net, &x).unwrap();
        assert!(y.iter().all(|&v| v == 0.5));
    }

    #[test]
    fn dnn3_shapes() {
        let widths = ModelKind::Dnn3.widths(8, 6, 2);
        let net = RealNetwork::init(&widths, 1).unwrap();
        let x = Array2::from_elem((24, 4), 0.1);
        let (y, _) = real_forward(&net, &x).unwrap();
        assert_eq!(y.dim(), (16, 4));
        assert!(real_forward(&net, &Array2::zeros((8, 4))).is_err());
    }

    #[test]
    fn count_includes_biases() {
        let net = RealNetwork::init(&[2, 3], 0).unwrap();
        assert_eq!(param_count(&net), 9);
    }
}
