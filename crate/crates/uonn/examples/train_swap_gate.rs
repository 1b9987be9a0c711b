//! Train a single 2-mode MZI to realize the swap-like cross unitary
//! [[0, i], [i, 0]] by minimizing the fidelity loss with shift-rule
//! gradients.
//!
//! ```bash
//! cargo run -p uonn --example train_swap_gate
//! ```

use uonn::mesh::PhaseSlot;
use uonn::*;

fn main() -> Result<()> {
    // the cross unitary is an MZI at theta = 0, phi = 0
    let target = mzi_unitary(0.0, 0.0);
    println!("target: [[0, i], [i, 0]] (reachable exactly at theta = 0, phi = 0)\n");

    let loss = LossSpec::UnitaryFidelity { target };
    let dataset = vec![Sample { input: FieldVec::basis(2, 0)?, target: Target::None }];
    let cfg = TrainConfig {
        optimizer: Optimizer::adam(0.05),
        iterations: 300,
        seed: 1,
        ..Default::default()
    };

    let mut net = Network::single_mesh(mesh::MeshLayout::clements(2)?);
    let history = train(&mut net, &dataset, &loss, &cfg)?;

    println!("{:<6} {:>16} {:>14}", "iter", "fidelity loss", "grad norm");
    for r in history.records.iter().step_by(25) {
        println!("{:<6} {:>16.3e} {:>14.3e}", r.iter, r.loss, r.grad_norm);
    }
    let final_loss = history.final_loss().unwrap();
    println!("\nfinal loss after {} iterations: {final_loss:.3e}", history.len());

    let theta = net.get_phase(&ParamRef { layer: 0, slot: PhaseSlot::Theta(0) })?;
    let phi = net.get_phase(&ParamRef { layer: 0, slot: PhaseSlot::Phi(0) })?;
    println!("learned MZI phases: theta = {theta:.6}, phi = {phi:.6} (mod 2 pi)");

    let out = forward_field(&net, &FieldVec::basis(2, 0)?)?;
    println!(
        "trained network maps [1, 0] -> [{:+.6}{:+.6}i, {:+.6}{:+.6}i]",
        out.get(0).re,
        out.get(0).im,
        out.get(1).re,
        out.get(1).im
    );
    Ok(())
}
