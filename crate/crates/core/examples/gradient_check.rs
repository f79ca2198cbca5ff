//! Compares backpropagated gradients of a small vector-product network
//! against central finite differences of the objective.
//!
//! Run with `cargo run --example gradient_check`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vpnn::network::{stacked_loss, vp_backward, vp_forward, Params, VpNetwork};
use vpnn::vecmat::{Vec3, VecMatrix};

fn objective(net: &VpNetwork, x: &VecMatrix, z: &VecMatrix) -> f64 {
    let (y, _) = vp_forward(net, x).unwrap();
    stacked_loss(&y, z).unwrap().0
}

fn main() -> vpnn::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let net = VpNetwork::init(&[4, 5, 6], 3)?;
    let mut sample = |r, c| VecMatrix::from_fn(r, c, |_, _| Vec3::new(rng.gen(), rng.gen(), rng.gen()));
    let x = sample(4, 3);
    let z = sample(6, 3);

    let (y, cache) = vp_forward(&net, &x)?;
    let (_, grad) = stacked_loss(&y, &z)?;
    let analytic = vp_backward(&net, &cache, &grad)?;

    let h = 1e-6;
    let mut worst: f64 = 0.0;
    let n_planes = net.planes().len();
    for p in 0..n_planes {
        let shape = net.planes()[p].dim();
        for i in 0..shape.0 {
            for j in 0..shape.1 {
                let mut plus = net.clone();
                plus.planes_mut()[p][[i, j]] += h;
                let mut minus = net.clone();
                minus.planes_mut()[p][[i, j]] -= h;
                let numeric = (objective(&plus, &x, &z) - objective(&minus, &x, &z)) / (2.0 * h);
                let a = analytic.planes()[p][[i, j]];
                let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-8);
                worst = worst.max(rel);
            }
        }
    }
    println!(
        "checked {} parameters, worst relative error {worst:e}",
        vpnn::network::param_count(&net)
    );
    Ok(())
}
