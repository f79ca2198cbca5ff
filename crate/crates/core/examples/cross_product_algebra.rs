//! Cross products of vectors and vector-valued matrices.
//!
//! Run with `cargo run --example cross_product_algebra`.

use vpnn::vecmat::{cross, vec_matmul, vec_matmul_naive, Vec3, VecMatrix};

fn main() -> vpnn::Result<()> {
    let x = Vec3::new(1.0, 2.0, 3.0);
    let y = Vec3::new(4.0, 5.0, 6.0);
    let z = cross(x, y);
    println!("{x:?} x {y:?} = {z:?}");
    println!("orthogonal to both: x.z = {}, y.z = {}", x.dot(z), y.dot(z));
    println!("anticommutative: y x x = {:?}", cross(y, x));

    // A 2x3 by 3x2 product where every entry is a sum of cross products.
    let p = VecMatrix::from_fn(2, 3, |i, j| Vec3::new(i as f64, j as f64, 1.0));
    let q = VecMatrix::from_fn(3, 2, |i, j| Vec3::new(1.0, (i + j) as f64, -(j as f64)));
    let fast = vec_matmul(&p, &q)?;
    let slow = vec_matmul_naive(&p, &q)?;
    for i in 0..fast.rows() {
        for j in 0..fast.cols() {
            println!("R[{i},{j}] = {:?}", fast.get(i, j));
        }
    }
    println!("max |fast - naive| = {:e}", fast.max_abs_diff(&slow));
    Ok(())
}
