//! Finite-difference checks over a range of small architectures.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vpnn::network::{
    real_backward, real_forward, stacked_loss, stacked_loss_real, vp_backward, vp_forward, Params,
    RealNetwork, VpNetwork,
};
use vpnn::vecmat::{Vec3, VecMatrix};

const H: f64 = 1e-6;
const TOL: f64 = 1e-4;

fn check<N: Params + Clone>(net: &N, analytic: &impl Params, j: impl Fn(&N) -> f64) {
    // gradients below the central-difference round-off level are compared
    // against that level rather than relatively
    let floor = 4.0 * f64::EPSILON * j(net).abs() / (H * TOL);
    for (p, &(rows, cols)) in net.plane_shapes().iter().enumerate() {
        for r in 0..rows {
            for c in 0..cols {
                let mut plus = net.clone();
                plus.planes_mut()[p][[r, c]] += H;
                let mut minus = net.clone();
                minus.planes_mut()[p][[r, c]] -= H;
                let numeric = (j(&plus) - j(&minus)) / (2.0 * H);
                let a = analytic.planes()[p][[r, c]];
                let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(floor);
                assert!(rel < TOL, "plane {p} [{r},{c}]: analytic {a}, numeric {numeric}");
            }
        }
    }
}

const ARCHS: [&[usize]; 4] = [&[3, 2], &[4, 6, 8], &[5, 16, 3, 10], &[16, 8, 8, 16]];

#[test]
fn vector_networks() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (i, widths) in ARCHS.iter().enumerate() {
        let net = VpNetwork::init(widths, i as u64).unwrap();
        let frames = 3;
        let mut draw = |r| VecMatrix::from_fn(r, frames, |_, _| Vec3::new(rng.gen(), rng.gen(), rng.gen()));
        let x = draw(widths[0]);
        let z = draw(*widths.last().unwrap());
        let (y, cache) = vp_forward(&net, &x).unwrap();
        let g = vp_backward(&net, &cache, &stacked_loss(&y, &z).unwrap().1).unwrap();
        check(&net, &g, |n| {
            stacked_loss(&vp_forward(n, &x).unwrap().0, &z).unwrap().0
        });
    }
}

#[test]
fn real_networks() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for (i, widths) in ARCHS.iter().enumerate() {
        let net = RealNetwork::init(widths, 10 + i as u64).unwrap();
        let x = Array2::from_shape_fn((widths[0], 4), |_| rng.gen_range(0.0..1.0));
        let z = Array2::from_shape_fn((*widths.last().unwrap(), 4), |_| rng.gen_range(0.0..1.0));
        let (y, cache) = real_forward(&net, &x).unwrap();
        let g = real_backward(&net, &cache, &stacked_loss_real(&y, &z).unwrap().1).unwrap();
        check(&net, &g, |n| {
            stacked_loss_real(&real_forward(n, &x).unwrap().0, &z).unwrap().0
        });
    }
}
