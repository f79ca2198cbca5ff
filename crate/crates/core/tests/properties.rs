use ndarray::Array2;
use proptest::prelude::*;
use vpnn::audio::soft_mask;
use vpnn::transform::{
    color_decode, color_encode, window_decode, window_encode, ColorParams, MagnitudeMatrix,
};
use vpnn::vecmat::{cross, vec_matmul, vec_matmul_naive, Vec3, VecMatrix};

fn vec3() -> impl Strategy<Value = Vec3> {
    (-10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64).prop_map(|(a, b, c)| Vec3::new(a, b, c))
}

fn close(a: Vec3, b: Vec3, tol: f64) -> bool {
    (a - b).norm_sq().sqrt() <= tol
}

proptest! {
    #[test]
    fn cross_is_anticommutative(x in vec3(), y in vec3()) {
        prop_assert!(close(cross(x, y), -cross(y, x), 1e-12));
        prop_assert_eq!(cross(x, x), Vec3::ZERO);
    }

    #[test]
    fn cross_is_orthogonal(x in vec3(), y in vec3()) {
        let z = cross(x, y);
        let scale = x.norm_sq() * y.norm_sq().sqrt() + 1.0;
        prop_assert!(x.dot(z).abs() <= 1e-12 * scale * 10.0);
        prop_assert!(y.dot(z).abs() <= 1e-12 * scale * 10.0);
    }

    #[test]
    fn lagrange_identity(x in vec3(), y in vec3()) {
        let lhs = cross(x, y).norm_sq();
        let rhs = x.norm_sq() * y.norm_sq() - x.dot(y).powi(2);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (x.norm_sq() * y.norm_sq() + 1.0));
    }

    #[test]
    fn cross_is_bilinear(x in vec3(), y in vec3(), w in vec3(), a in -3.0..3.0f64) {
        prop_assert!(close(cross(x * a + w, y), cross(x, y) * a + cross(w, y), 1e-9));
        prop_assert!(close(cross(x, y * a + w), cross(x, y) * a + cross(x, w), 1e-9));
    }

    #[test]
    fn matmul_matches_naive(m in 1usize..8, k in 1usize..8, n in 1usize..8, seed in any::<u64>()) {
        let mut s = seed;
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let p = VecMatrix::from_fn(m, k, |_, _| Vec3::new(next(), next(), next()));
        let q = VecMatrix::from_fn(k, n, |_, _| Vec3::new(next(), next(), next()));
        let d = vec_matmul(&p, &q).unwrap().max_abs_diff(&vec_matmul_naive(&p, &q).unwrap());
        prop_assert!(d <= 1e-12);
    }

    #[test]
    fn color_encoding_is_monotone(a in 0.0..1.0f64, b in 0.0..1.0f64) {
        let p = ColorParams::default();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (el, eh) = (p.encode(lo), p.encode(hi));
        prop_assert!((0..3).all(|i| el[i] <= eh[i]));
        prop_assert!((p.decode(p.encode(a)) - a).abs() <= 1e-9);
    }

    #[test]
    fn color_n_roundtrip(n in 0.01..0.49f64, x in 0.0..1.0f64) {
        let p = ColorParams::new(n).unwrap();
        prop_assert!((p.decode(p.encode(x)) - x).abs() <= 1e-9);
    }

    #[test]
    fn matrix_roundtrips(vals in proptest::collection::vec(0.0..1.0f64, 12)) {
        let s = MagnitudeMatrix::new(Array2::from_shape_vec((3, 4), vals).unwrap(), 1.0).unwrap();
        let windowed = window_decode(&window_encode(&s).unwrap());
        prop_assert_eq!(windowed.data(), s.data());
        let back = color_decode(&color_encode(&s, ColorParams::default()).unwrap(), ColorParams::default());
        prop_assert!(back.data().iter().zip(s.data()).all(|(a, b)| (a - b).abs() <= 1e-9));
    }

    #[test]
    fn soft_masks_are_complementary(vals in proptest::collection::vec(0.0..5.0f64, 16)) {
        let a = Array2::from_shape_vec((2, 4), vals[..8].to_vec()).unwrap();
        let b = Array2::from_shape_vec((2, 4), vals[8..].to_vec()).unwrap();
        let m = soft_mask(&a, &b).unwrap();
        for (x, y) in m.m1().iter().zip(m.m2()) {
            prop_assert!((0.0..=1.0).contains(x));
            prop_assert!((x + y - 1.0).abs() <= 1e-12);
        }
    }
}
