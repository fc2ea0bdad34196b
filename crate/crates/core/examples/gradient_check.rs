//! Compare backpropagated gradients of the actor and critic with central
//! finite differences.

use crnoma::ddpg::{ActorHidden, CriticOutput};
use crnoma::harness::verify::{actor_gradient_error, critic_gradient_error};

fn main() {
    for pattern in [ActorHidden::ReluTanh, ActorHidden::ReluRelu] {
        println!("actor {pattern:?}: worst relative error {:.2e}", actor_gradient_error(pattern, 5, 200, 1));
    }
    for output in [CriticOutput::Relu, CriticOutput::Linear] {
        println!("critic {output:?}: worst relative error {:.2e}", critic_gradient_error(output, 5, 200, 2));
    }
}
