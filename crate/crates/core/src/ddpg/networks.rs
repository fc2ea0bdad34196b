//! The two fixed topologies: the actor mapping a normalised state to an
//! action in `[0, 1]`, and the two-branch critic scoring a state-action pair.

use ndarray::{concatenate, s, Array2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::mlp::{Activation, ForwardCache, Layer, Mlp};
use crate::error::{Error, Result};

pub const STATE_DIM: usize = 4;

/// Activation pattern of the two actor hidden layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActorHidden {
    #[default]
    ReluTanh,
    ReluRelu,
}

/// Activation on the critic's scalar output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticOutput {
    #[default]
    Relu,
    Linear,
}

impl CriticOutput {
    fn activation(self) -> Activation {
        match self {
            CriticOutput::Relu => Activation::Relu,
            CriticOutput::Linear => Activation::Linear,
        }
    }
}

/// State -> hidden -> hidden -> tanh output, read as `beta = (y + 1) / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Actor {
    pub net: Mlp,
}

impl Actor {
    pub fn new<R: Rng + ?Sized>(hidden: usize, pattern: ActorHidden, rng: &mut R) -> Self {
        let second = match pattern {
            ActorHidden::ReluTanh => Activation::Tanh,
            ActorHidden::ReluRelu => Activation::Relu,
        };
        let layers = vec![
            Layer::uniform(STATE_DIM, hidden, Activation::Relu, 1.0, rng),
            Layer::uniform(hidden, hidden, second, 1.0, rng),
            Layer::uniform(hidden, 1, Activation::Tanh, 0.1, rng),
        ];
        Self { net: Mlp::new(layers).expect("fixed topology") }
    }

    pub fn from_net(net: Mlp) -> Result<Self> {
        if net.input_width() != STATE_DIM || net.output_width() != 1 {
            return Err(Error::Checkpoint("actor shape mismatch".into()));
        }
        Ok(Self { net })
    }

    /// Actions for a batch of states, one row each.
    pub fn act(&self, states: &Array2<f64>) -> Array2<f64> {
        self.net.forward(states).mapv(to_beta)
    }

    pub fn act_one(&self, state: &[f64; STATE_DIM]) -> Result<f64> {
        if state.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let x = Array2::from_shape_vec((1, STATE_DIM), state.to_vec()).expect("shape");
        let beta = self.act(&x)[[0, 0]];
        if beta.is_finite() { Ok(beta) } else { Err(Error::NonFinite) }
    }

    /// Forward pass keeping activations; `cache.output` holds `y`, not `beta`.
    pub fn forward_cached(&self, states: &Array2<f64>) -> ForwardCache {
        self.net.forward_cached(states)
    }

    /// Parameter gradient of `sum(dbeta * beta)`.
    pub fn backward_from_beta(&self, cache: &ForwardCache, dbeta: &Array2<f64>) -> Vec<f64> {
        self.net.backward(cache, &(dbeta * 0.5)).0
    }
}

pub fn to_beta(y: f64) -> f64 {
    (0.5 * (y + 1.0)).clamp(0.0, 1.0)
}

/// Gradients of a scalar critic objective.
#[derive(Debug, Clone)]
pub struct CriticGrads {
    pub params: Vec<f64>,
    pub states: Array2<f64>,
    pub actions: Array2<f64>,
}

#[derive(Debug, Clone)]
pub struct CriticCache {
    state: ForwardCache,
    action: ForwardCache,
    head: ForwardCache,
}

impl CriticCache {
    pub fn q(&self) -> &Array2<f64> {
        &self.head.output
    }
}

/// State branch and action branch, concatenated into a shared head.
#[derive(Debug, Clone, PartialEq)]
pub struct Critic {
    pub state_branch: Mlp,
    pub action_branch: Mlp,
    pub head: Mlp,
}

impl Critic {
    pub fn new<R: Rng + ?Sized>(hidden: usize, output: CriticOutput, rng: &mut R) -> Self {
        let state_branch = Mlp::uniform(&[STATE_DIM, hidden], &[Activation::Relu], rng);
        let action_branch = Mlp::uniform(&[1, hidden], &[Activation::Relu], rng);
        let head = Mlp::uniform(&[2 * hidden, hidden, 1], &[Activation::Relu, output.activation()], rng);
        Self { state_branch, action_branch, head }
    }

    pub fn from_parts(state_branch: Mlp, action_branch: Mlp, head: Mlp) -> Result<Self> {
        let ok = state_branch.input_width() == STATE_DIM
            && action_branch.input_width() == 1
            && head.input_width() == state_branch.output_width() + action_branch.output_width()
            && head.output_width() == 1;
        if !ok {
            return Err(Error::Checkpoint("critic shape mismatch".into()));
        }
        Ok(Self { state_branch, action_branch, head })
    }

    pub fn q(&self, states: &Array2<f64>, actions: &Array2<f64>) -> Array2<f64> {
        let hs = self.state_branch.forward(states);
        let ha = self.action_branch.forward(actions);
        let joined = concatenate(Axis(1), &[hs.view(), ha.view()]).expect("same batch");
        self.head.forward(&joined)
    }

    pub fn forward_cached(&self, states: &Array2<f64>, actions: &Array2<f64>) -> CriticCache {
        let state = self.state_branch.forward_cached(states);
        let action = self.action_branch.forward_cached(actions);
        let joined = concatenate(Axis(1), &[state.output.view(), action.output.view()]).expect("same batch");
        let head = self.head.forward_cached(&joined);
        CriticCache { state, action, head }
    }

    /// Gradients of `sum(upstream * q)`; parameter order is state branch,
    /// action branch, head.
    pub fn backward(&self, cache: &CriticCache, upstream: &Array2<f64>) -> CriticGrads {
        let (g_head, d_joined) = self.head.backward(&cache.head, upstream);
        let split = self.state_branch.output_width();
        let d_state_out = d_joined.slice(s![.., ..split]).to_owned();
        let d_action_out = d_joined.slice(s![.., split..]).to_owned();
        let (g_state, states) = self.state_branch.backward(&cache.state, &d_state_out);
        let (g_action, actions) = self.action_branch.backward(&cache.action, &d_action_out);
        let mut params = g_state;
        params.extend(g_action);
        params.extend(g_head);
        CriticGrads { params, states, actions }
    }

    pub fn num_params(&self) -> usize {
        self.state_branch.num_params() + self.action_branch.num_params() + self.head.num_params()
    }

    pub fn params(&self) -> impl Iterator<Item = &f64> {
        self.state_branch.params().chain(self.action_branch.params()).chain(self.head.params())
    }

    pub fn params_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.state_branch
            .params_mut()
            .chain(self.action_branch.params_mut())
            .chain(self.head.params_mut())
    }

    pub fn soft_update_from(&mut self, online: &Critic, tau: f64) {
        self.state_branch.soft_update_from(&online.state_branch, tau);
        self.action_branch.soft_update_from(&online.action_branch, tau);
        self.head.soft_update_from(&online.head, tau);
    }

    pub fn is_finite(&self) -> bool {
        self.params().all(|p| p.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::super::mlp::tests::close;
    use super::*;
    use crate::rng::{self, Stream};

    fn batch<R: Rng>(rows: usize, cols: usize, lo: f64, hi: f64, r: &mut R) -> Array2<f64> {
        Array2::from_shape_fn((rows, cols), |_| r.random_range(lo..hi))
    }

    #[test]
    fn zero_actor_outputs_half() {
        let mut r = rng::stream(0, Stream::WeightInit);
        let mut actor = Actor::new(64, ActorHidden::ReluTanh, &mut r);
        actor.net.params_mut().for_each(|p| *p = 0.0);
        assert_eq!(actor.act_one(&[0.3, 0.1, 0.9, 1.0]).unwrap(), 0.5);
    }

    #[test]
    fn initial_actor_is_near_half() {
        let mut r = rng::stream(5, Stream::WeightInit);
        let actor = Actor::new(64, ActorHidden::ReluTanh, &mut r);
        let states = batch(50, STATE_DIM, 0.0, 1.0, &mut r);
        for b in actor.act(&states) {
            assert!((b - 0.5).abs() < 0.1, "{b}");
        }
    }

    #[test]
    fn actor_rejects_non_finite_state() {
        let mut r = rng::stream(0, Stream::WeightInit);
        let actor = Actor::new(8, ActorHidden::ReluTanh, &mut r);
        assert!(matches!(actor.act_one(&[f64::NAN, 0.0, 0.0, 0.0]), Err(Error::NonFinite)));
    }

    #[test]
    fn actor_output_in_unit_interval_for_large_weights() {
        let mut r = rng::stream(2, Stream::WeightInit);
        let mut actor = Actor::new(16, ActorHidden::ReluRelu, &mut r);
        actor.net.params_mut().for_each(|p| *p *= 1e3);
        for b in actor.act(&batch(20, STATE_DIM, -5.0, 5.0, &mut r)) {
            assert!((0.0..=1.0).contains(&b));
        }
    }

    #[test]
    fn zero_critic_is_zero_and_relu_critic_is_nonnegative() {
        let mut r = rng::stream(3, Stream::WeightInit);
        let mut critic = Critic::new(64, CriticOutput::Relu, &mut r);
        let s = batch(30, STATE_DIM, 0.0, 1.0, &mut r);
        let a = batch(30, 1, 0.0, 1.0, &mut r);
        assert!(critic.q(&s, &a).iter().all(|&q| q >= 0.0));
        critic.params_mut().for_each(|p| *p = 0.0);
        assert!(critic.q(&s, &a).iter().all(|&q| q == 0.0));
    }

    #[test]
    fn critic_is_sensitive_to_action() {
        let mut r = rng::stream(4, Stream::WeightInit);
        let critic = Critic::new(64, CriticOutput::Linear, &mut r);
        let s = batch(1, STATE_DIM, 0.0, 1.0, &mut r);
        let q0 = critic.q(&s, &Array2::from_elem((1, 1), 0.2))[[0, 0]];
        let q1 = critic.q(&s, &Array2::from_elem((1, 1), 0.8))[[0, 0]];
        assert_ne!(q0, q1);
    }

    #[test]
    fn critic_gradients_match_finite_differences() {
        let mut r = rng::stream(8, Stream::WeightInit);
        let critic = Critic::new(16, CriticOutput::Linear, &mut r);
        let s = batch(4, STATE_DIM, 0.0, 1.0, &mut r);
        let a = batch(4, 1, 0.0, 1.0, &mut r);
        let c = batch(4, 1, -1.0, 1.0, &mut r);
        let g = critic.backward(&critic.forward_cached(&s, &a), &c);
        let f = |cr: &Critic, s: &Array2<f64>, a: &Array2<f64>| (cr.q(s, a) * &c).sum();
        let h = 1e-6;
        for k in 0..critic.num_params() {
            let mut p = critic.clone();
            *p.params_mut().nth(k).unwrap() += h;
            let mut m = critic.clone();
            *m.params_mut().nth(k).unwrap() -= h;
            let fd = (f(&p, &s, &a) - f(&m, &s, &a)) / (2.0 * h);
            assert!(close(g.params[k], fd, 1e-5), "param {k}: {} vs {fd}", g.params[k]);
        }
        for i in 0..4 {
            let mut ap = a.clone();
            ap[[i, 0]] += h;
            let mut am = a.clone();
            am[[i, 0]] -= h;
            let fd = (f(&critic, &s, &ap) - f(&critic, &s, &am)) / (2.0 * h);
            assert!(close(g.actions[[i, 0]], fd, 1e-5));
        }
    }
}
