//! Adam and plain SGD over parameter planes.
//!
//! Vector-valued parameters are just three real planes here; the update never
//! couples components.

use ndarray::{Array2, Zip};

use crate::error::{Error, Result};
use crate::network::Params;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

impl AdamConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "learning rate must be > 0, got {}",
                self.lr
            )));
        }
        for (name, b) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !(0.0..1.0).contains(&b) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be in [0, 1), got {b}"
                )));
            }
        }
        if self.epsilon.is_nan() || self.epsilon < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be >= 0, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// First and second moment accumulators, one per parameter plane.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub config: AdamConfig,
    m: Vec<Array2<f64>>,
    v: Vec<Array2<f64>>,
    t: u64,
}

impl AdamState {
    pub fn new<P: Params + ?Sized>(config: AdamConfig, params: &P) -> Result<Self> {
        config.validate()?;
        let shapes = params.plane_shapes();
        Ok(AdamState {
            config,
            m: shapes.iter().map(|&s| Array2::zeros(s)).collect(),
            v: shapes.iter().map(|&s| Array2::zeros(s)).collect(),
            t: 0,
        })
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }

    pub fn first_moments(&self) -> &[Array2<f64>] {
        &self.m
    }

    pub fn second_moments(&self) -> &[Array2<f64>] {
        &self.v
    }
}

fn check_congruent(op: &'static str, params: &[(usize, usize)], grads: &[(usize, usize)]) -> Result<()> {
    if params.len() != grads.len() {
        return Err(Error::InvalidParameter(format!(
            "{op}: {} parameter planes but {} gradient planes",
            params.len(),
            grads.len()
        )));
    }
    for (&p, &g) in params.iter().zip(grads) {
        if p != g {
            return Err(Error::ShapeMismatch {
                op,
                left: p,
                right: g,
            });
        }
    }
    Ok(())
}

fn check_finite<G: Params + ?Sized>(grads: &G) -> Result<()> {
    if grads.planes().iter().all(|p| p.iter().all(|v| v.is_finite())) {
        Ok(())
    } else {
        Err(Error::NonFinite("gradient"))
    }
}

/// One Adam update in place.
pub fn adam_step<P, G>(params: &mut P, grads: &G, state: &mut AdamState) -> Result<()>
where
    P: Params + ?Sized,
    G: Params + ?Sized,
{
    state.config.validate()?;
    check_congruent("adam_step", &params.plane_shapes(), &grads.plane_shapes())?;
    check_congruent(
        "adam_step (state)",
        &params.plane_shapes(),
        &state.m.iter().map(|m| m.dim()).collect::<Vec<_>>(),
    )?;
    check_finite(grads)?;

    let AdamConfig {
        lr,
        beta1,
        beta2,
        epsilon,
    } = state.config;
    state.t += 1;
    let t = state.t as i32;
    let bc1 = 1.0 - beta1.powi(t);
    let bc2 = 1.0 - beta2.powi(t);

    for (((theta, g), m), v) in params
        .planes_mut()
        .into_iter()
        .zip(grads.planes())
        .zip(state.m.iter_mut())
        .zip(state.v.iter_mut())
    {
        Zip::from(theta).and(g).and(m).and(v).for_each(|theta, &g, m, v| {
            *m = beta1 * *m + (1.0 - beta1) * g;
            *v = beta2 * *v + (1.0 - beta2) * g * g;
            let m_hat = *m / bc1;
            let v_hat = *v / bc2;
            *theta -= lr * m_hat / (v_hat.sqrt() + epsilon);
        });
    }
    Ok(())
}

/// Functional form of [`adam_step`].
pub fn adam_step_pure<P, G>(params: &P, grads: &G, state: &AdamState) -> Result<(P, AdamState)>
where
    P: Params + Clone,
    G: Params + ?Sized,
{
    let mut p = params.clone();
    let mut s = state.clone();
    adam_step(&mut p, grads, &mut s)?;
    Ok((p, s))
}

/// `θ ← θ − lr·g`.
pub fn sgd_step<P, G>(params: &mut P, grads: &G, lr: f64) -> Result<()>
where
    P: Params + ?Sized,
    G: Params + ?Sized,
{
    if !(lr > 0.0 && lr.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "learning rate must be > 0, got {lr}"
        )));
    }
    check_congruent("sgd_step", &params.plane_shapes(), &grads.plane_shapes())?;
    check_finite(grads)?;
    for (theta, g) in params.planes_mut().into_iter().zip(grads.planes()) {
        theta.scaled_add(-lr, g);
    }
    Ok(())
}

/// Training-loop optimizer choice.
#[derive(Debug, Clone)]
pub enum Optimizer {
    Adam(AdamState),
    Sgd { lr: f64 },
}

impl Optimizer {
    pub fn step<P, G>(&mut self, params: &mut P, grads: &G) -> Result<()>
    where
        P: Params + ?Sized,
        G: Params + ?Sized,
    {
        match self {
            Optimizer::Adam(state) => adam_step(params, grads, state),
            Optimizer::Sgd { lr } => sgd_step(params, grads, *lr),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// A bare list of planes, enough to drive the optimizers.
    #[derive(Debug, Clone, PartialEq)]
    struct Planes(Vec<Array2<f64>>);

    impl Params for Planes {
        fn planes(&self) -> Vec<&Array2<f64>> {
            self.0.iter().collect()
        }
        fn planes_mut(&mut self) -> Vec<&mut Array2<f64>> {
            self.0.iter_mut().collect()
        }
    }

    fn scalar(v: f64) -> Planes {
        Planes(vec![Array2::from_elem((1, 1), v)])
    }

    fn value(p: &Planes) -> f64 {
        p.0[0][[0, 0]]
    }

    #[test]
    fn zero_gradient_is_fixed_point() {
        let mut p = Planes(vec![
            Array2::from_elem((2, 3), 0.7),
            Array2::from_elem((1, 1), -2.0),
        ]);
        let before = p.clone();
        let g = Planes(vec![Array2::zeros((2, 3)), Array2::zeros((1, 1))]);
        let mut s = AdamState::new(AdamConfig::default(), &p).unwrap();
        for _ in 0..10 {
            adam_step(&mut p, &g, &mut s).unwrap();
        }
        assert_eq!(p, before);
    }

    #[test]
    fn first_step_moves_by_learning_rate() {
        let cfg = AdamConfig {
            lr: 0.1,
            ..AdamConfig::default()
        };
        let mut p = scalar(0.0);
        let mut s = AdamState::new(cfg, &p).unwrap();
        adam_step(&mut p, &scalar(2.0), &mut s).unwrap();
        // m̂ = 2, v̂ = 4 → Δ = −0.1 · 2 / (2 + 1e-8)
        let expected = -0.1 * 2.0 / (2.0 + 1e-8);
        assert!((value(&p) - expected).abs() < 1e-15);
        assert!((value(&p) + 0.1).abs() < 1e-8);
    }

    #[test]
    fn two_steps_match_hand_evaluation() {
        let cfg = AdamConfig {
            lr: 0.1,
            ..AdamConfig::default()
        };
        let mut p = scalar(0.0);
        let mut s = AdamState::new(cfg, &p).unwrap();
        let g = scalar(2.0);
        adam_step(&mut p, &g, &mut s).unwrap();
        adam_step(&mut p, &g, &mut s).unwrap();

        // step 1: m = 0.2, v = 0.004; step 2: m = 0.38, v = 0.007996
        let m2: f64 = 0.9 * 0.2 + 0.1 * 2.0;
        let v2: f64 = 0.999 * 0.004 + 0.001 * 4.0;
        assert!((s.first_moments()[0][[0, 0]] - 0.38).abs() < 1e-12);
        assert!((s.second_moments()[0][[0, 0]] - 0.007996).abs() < 1e-12);
        let step1 = 0.1 * 2.0 / (2.0 + 1e-8);
        let m_hat = m2 / (1.0 - 0.81);
        let v_hat = v2 / (1.0 - 0.998001);
        let step2 = 0.1 * m_hat / (v_hat.sqrt() + 1e-8);
        assert!((value(&p) - (-step1 - step2)).abs() < 1e-12);
        assert_eq!(s.step_count(), 2);
    }

    #[test]
    fn sgd_example_and_sign_agreement() {
        let mut p = scalar(1.0);
        sgd_step(&mut p, &scalar(0.5), 0.1).unwrap();
        assert!((value(&p) - 0.95).abs() < 1e-15);
        assert!(sgd_step(&mut p, &scalar(0.5), 0.0).is_err());

        for g in [-3.0, -0.01, 0.2, 5.0] {
            let mut a = scalar(0.4);
            let mut b = scalar(0.4);
            let mut s = AdamState::new(AdamConfig::default(), &a).unwrap();
            adam_step(&mut a, &scalar(g), &mut s).unwrap();
            sgd_step(&mut b, &scalar(g), 1e-3).unwrap();
            assert_eq!((value(&a) - 0.4).signum(), (value(&b) - 0.4).signum());
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut p = scalar(0.0);
        let mut s = AdamState::new(AdamConfig::default(), &p).unwrap();
        assert!(matches!(
            adam_step(&mut p, &scalar(f64::NAN), &mut s),
            Err(Error::NonFinite(_))
        ));
        let wrong = Planes(vec![Array2::zeros((2, 1))]);
        assert!(adam_step(&mut p, &wrong, &mut s).is_err());
        let bad = AdamConfig {
            beta1: 1.0,
            ..AdamConfig::default()
        };
        assert!(AdamState::new(bad, &p).is_err());
        let bad = AdamConfig {
            lr: 0.0,
            ..AdamConfig::default()
        };
        assert!(AdamState::new(bad, &p).is_err());
    }

    #[test]
    fn pure_variant_matches_in_place() {
        let p = Planes(vec![Array2::from_shape_fn((2, 2), |(i, j)| (i + 2 * j) as f64)]);
        let g = Planes(vec![Array2::from_shape_fn((2, 2), |(i, j)| {
            i as f64 - j as f64 + 0.5
        })]);
        let s = AdamState::new(AdamConfig::default(), &p).unwrap();
        let (p2, s2) = adam_step_pure(&p, &g, &s).unwrap();
        let mut p3 = p.clone();
        let mut s3 = s.clone();
        adam_step(&mut p3, &g, &mut s3).unwrap();
        assert_eq!(p2, p3);
        assert_eq!(s2, s3);
    }
}
