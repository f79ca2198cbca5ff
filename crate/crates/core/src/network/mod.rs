//! Vector-product networks, their real-valued baselines, and the separation
//! objective.
//!
//! Both network families use the logistic sigmoid on every layer (the output
//! layer included), applied independently to each component of a [`Vec3`].
//! Outputs therefore lie in `(0, 1)` and training targets are normalized
//! magnitudes.
//!
//! [`Vec3`]: crate::vecmat::Vec3

mod real;
mod vector;

use std::fmt;
use std::str::FromStr;

use ndarray::{s, Array2};

use crate::error::{check_shape, Error, Result};
use crate::vecmat::{vm_frob_sq, vm_scale, vm_sub, VecMatrix};

pub use real::{real_backward, real_forward, RealCache, RealGradients, RealLayer, RealNetwork};
pub use vector::{vp_backward, vp_forward, vp_forward_with, VpCache, VpGradients, VpLayer, VpNetwork};

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Anything made of real parameter planes: networks and their gradients.
///
/// The plane order is fixed per type so that optimizer state can be kept as a
/// parallel list of planes.
pub trait Params {
    fn planes(&self) -> Vec<&Array2<f64>>;
    fn planes_mut(&mut self) -> Vec<&mut Array2<f64>>;

    fn plane_shapes(&self) -> Vec<(usize, usize)> {
        self.planes().iter().map(|p| p.dim()).collect()
    }
}

/// Total number of scalar parameters. A `Vec3` weight counts as three.
pub fn param_count<P: Params + ?Sized>(net: &P) -> usize {
    net.planes().iter().map(|p| p.len()).sum()
}

/// The five architectures compared in the separation experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// Real-valued, one frame per input, 512 wide.
    Dnn1,
    /// Real-valued, one frame per input, 1536 wide.
    Dnn2,
    /// Real-valued, three stacked context frames per input, 1536 wide.
    Dnn3,
    /// Vector-product network fed with context-window vectors.
    Wvpnn,
    /// Vector-product network fed with spectral colors.
    Cvpnn,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::Dnn1,
        ModelKind::Dnn2,
        ModelKind::Cvpnn,
        ModelKind::Dnn3,
        ModelKind::Wvpnn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Dnn1 => "DNN1",
            ModelKind::Dnn2 => "DNN2",
            ModelKind::Dnn3 => "DNN3",
            ModelKind::Wvpnn => "WVPNN",
            ModelKind::Cvpnn => "CVPNN",
        }
    }

    pub fn is_vector(self) -> bool {
        matches!(self, ModelKind::Wvpnn | ModelKind::Cvpnn)
    }

    /// Frames of temporal context seen per t-f unit.
    pub fn context(self) -> usize {
        match self {
            ModelKind::Dnn3 | ModelKind::Wvpnn => 3,
            _ => 1,
        }
    }

    pub fn default_hidden_width(self) -> usize {
        match self {
            ModelKind::Dnn2 | ModelKind::Dnn3 => 1536,
            _ => 512,
        }
    }

    pub const DEFAULT_HIDDEN_LAYERS: usize = 3;

    /// Layer widths from input to output for `bins` frequency bins.
    ///
    /// Every model predicts both sources jointly, so the output has `2 * bins`
    /// rows. `DNN3` takes the three context frames stacked (`3 * bins` rows).
    pub fn widths(self, bins: usize, hidden_width: usize, hidden_layers: usize) -> Vec<usize> {
        let input = if self == ModelKind::Dnn3 { 3 * bins } else { bins };
        let mut w = Vec::with_capacity(hidden_layers + 2);
        w.push(input);
        w.extend(std::iter::repeat_n(hidden_width, hidden_layers));
        w.push(2 * bins);
        w
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "DNN1" => Ok(ModelKind::Dnn1),
            "DNN2" => Ok(ModelKind::Dnn2),
            "DNN3" => Ok(ModelKind::Dnn3),
            "WVPNN" => Ok(ModelKind::Wvpnn),
            "CVPNN" => Ok(ModelKind::Cvpnn),
            other => Err(Error::Config(format!("unknown model `{other}`"))),
        }
    }
}

/// Either network family behind one interface.
#[derive(Debug, Clone, PartialEq)]
pub enum Network {
    Vector(VpNetwork),
    Real(RealNetwork),
}

impl Network {
    /// Glorot-uniform weights, zero biases; deterministic in `seed`.
    pub fn init(kind: ModelKind, widths: &[usize], seed: u64) -> Result<Self> {
        if kind.is_vector() {
            VpNetwork::init(widths, seed).map(Network::Vector)
        } else {
            RealNetwork::init(widths, seed).map(Network::Real)
        }
    }

    pub fn widths(&self) -> Vec<usize> {
        match self {
            Network::Vector(n) => n.widths(),
            Network::Real(n) => n.widths(),
        }
    }
}

impl Params for Network {
    fn planes(&self) -> Vec<&Array2<f64>> {
        match self {
            Network::Vector(n) => n.planes(),
            Network::Real(n) => n.planes(),
        }
    }

    fn planes_mut(&mut self) -> Vec<&mut Array2<f64>> {
        match self {
            Network::Vector(n) => n.planes_mut(),
            Network::Real(n) => n.planes_mut(),
        }
    }
}

/// Value of the two-source objective and its gradient with respect to both
/// predictions.
#[derive(Debug, Clone)]
pub struct Loss<M> {
    pub value: f64,
    pub grad1: M,
    pub grad2: M,
}

/// `J = ‖Z̃₁ − Z₁‖² + ‖Z̃₂ − Z₂‖²` over all three component planes.
pub fn loss_j(
    z1_pred: &VecMatrix,
    z1: &VecMatrix,
    z2_pred: &VecMatrix,
    z2: &VecMatrix,
) -> Result<Loss<VecMatrix>> {
    let r1 = vm_sub(z1_pred, z1)?;
    let r2 = vm_sub(z2_pred, z2)?;
    Ok(Loss {
        value: vm_frob_sq(&r1) + vm_frob_sq(&r2),
        grad1: vm_scale(&r1, 2.0),
        grad2: vm_scale(&r2, 2.0),
    })
}

/// Real-valued analogue of [`loss_j`].
pub fn loss_j_real(
    z1_pred: &Array2<f64>,
    z1: &Array2<f64>,
    z2_pred: &Array2<f64>,
    z2: &Array2<f64>,
) -> Result<Loss<Array2<f64>>> {
    check_shape("loss_j_real", z1_pred.dim(), z1.dim())?;
    check_shape("loss_j_real", z2_pred.dim(), z2.dim())?;
    let r1 = z1_pred - z1;
    let r2 = z2_pred - z2;
    Ok(Loss {
        value: r1.iter().map(|v| v * v).sum::<f64>() + r2.iter().map(|v| v * v).sum::<f64>(),
        grad1: r1 * 2.0,
        grad2: r2 * 2.0,
    })
}

/// Objective on a jointly predicted output whose top half is source 1 and
/// bottom half source 2. Returns `J` and `∂J/∂output`.
pub fn stacked_loss(output: &VecMatrix, target: &VecMatrix) -> Result<(f64, VecMatrix)> {
    check_shape("stacked_loss", output.dim(), target.dim())?;
    let half = split_point(output.rows())?;
    let n = output.rows();
    let l = loss_j(
        &output.row_block(0, half),
        &target.row_block(0, half),
        &output.row_block(half, n),
        &target.row_block(half, n),
    )?;
    Ok((l.value, VecMatrix::vstack(&l.grad1, &l.grad2)?))
}

/// Real-valued analogue of [`stacked_loss`].
pub fn stacked_loss_real(output: &Array2<f64>, target: &Array2<f64>) -> Result<(f64, Array2<f64>)> {
    check_shape("stacked_loss_real", output.dim(), target.dim())?;
    let half = split_point(output.nrows())?;
    let l = loss_j_real(
        &output.slice(s![..half, ..]).to_owned(),
        &target.slice(s![..half, ..]).to_owned(),
        &output.slice(s![half.., ..]).to_owned(),
        &target.slice(s![half.., ..]).to_owned(),
    )?;
    let grad = ndarray::concatenate(ndarray::Axis(0), &[l.grad1.view(), l.grad2.view()])
        .expect("halves share column count");
    Ok((l.value, grad))
}

fn split_point(rows: usize) -> Result<usize> {
    if !rows.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "stacked output must have an even row count, got {rows}"
        )));
    }
    Ok(rows / 2)
}

pub(crate) fn glorot_bound(fan_in: usize, fan_out: usize) -> f64 {
    (6.0 / (fan_in + fan_out) as f64).sqrt()
}

pub(crate) fn check_widths(widths: &[usize]) -> Result<()> {
    if widths.len() < 2 {
        return Err(Error::InvalidParameter(
            "a network needs at least an input and an output width".into(),
        ));
    }
    if widths.contains(&0) {
        return Err(Error::InvalidParameter(format!("zero-width layer in {widths:?}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vecmat::Vec3;

    #[test]
    fn loss_examples() {
        let z = VecMatrix::from_fn(2, 3, |i, j| Vec3::new(i as f64, j as f64, 0.5));
        let l = loss_j(&z, &z, &z, &z).unwrap();
        assert_eq!(l.value, 0.0);

        let target = VecMatrix::zeros(1, 1);
        let pred = VecMatrix::from_fn(1, 1, |_, _| Vec3::splat(1.0));
        let l = loss_j(&pred, &target, &target, &target).unwrap();
        assert_eq!(l.value, 3.0);
        assert_eq!(l.grad1.get(0, 0), Vec3::splat(2.0));
        assert_eq!(l.grad2, VecMatrix::zeros(1, 1));
    }

    #[test]
    fn loss_gradient_matches_finite_differences() {
        let z1 = VecMatrix::from_fn(2, 2, |i, j| Vec3::new(0.1 * i as f64, 0.3, 0.2 * j as f64));
        let z2 = VecMatrix::from_fn(2, 2, |i, j| Vec3::new(0.4, 0.1 * (i + j) as f64, 0.9));
        let p1 = VecMatrix::from_fn(2, 2, |i, j| Vec3::new(0.7, 0.2 * i as f64, 0.1 * j as f64));
        let p2 = VecMatrix::from_fn(2, 2, |i, _| Vec3::new(0.05, 0.6, 0.3 * i as f64));
        let l = loss_j(&p1, &z1, &p2, &z2).unwrap();
        let eps = 1e-6;
        for plane in 0..3 {
            for i in 0..2 {
                for j in 0..2 {
                    let mut plus = p1.clone();
                    plus.planes_mut()[plane][[i, j]] += eps;
                    let mut minus = p1.clone();
                    minus.planes_mut()[plane][[i, j]] -= eps;
                    let fd = (loss_j(&plus, &z1, &p2, &z2).unwrap().value
                        - loss_j(&minus, &z1, &p2, &z2).unwrap().value)
                        / (2.0 * eps);
                    assert!((fd - l.grad1.planes()[plane][[i, j]]).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn loss_shape_mismatch() {
        let a = VecMatrix::zeros(2, 2);
        let b = VecMatrix::zeros(2, 3);
        assert!(loss_j(&a, &b, &a, &a).is_err());
        assert!(stacked_loss(&VecMatrix::zeros(3, 1), &VecMatrix::zeros(3, 1)).is_err());
    }

    #[test]
    fn model_widths() {
        assert_eq!(
            ModelKind::Dnn3.widths(513, 1536, 3),
            vec![1539, 1536, 1536, 1536, 1026]
        );
        assert_eq!(
            ModelKind::Cvpnn.widths(513, 512, 3),
            vec![513, 512, 512, 512, 1026]
        );
        assert_eq!("cvpnn".parse::<ModelKind>().unwrap(), ModelKind::Cvpnn);
        assert!("rnn".parse::<ModelKind>().is_err());
    }

    #[test]
    fn cvpnn_has_three_times_dnn1_parameters() {
        let cv = ModelKind::Cvpnn.widths(513, 512, 3);
        let dn = ModelKind::Dnn1.widths(513, 512, 3);
        let cv_count = param_count(&VpNetwork::init(&cv, 0).unwrap());
        let dn_count = param_count(&RealNetwork::init(&dn, 0).unwrap());
        assert_eq!(cv_count, 3 * dn_count);
    }
}
