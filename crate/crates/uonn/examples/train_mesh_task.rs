//! Train a 4-mode Clements mesh on the synthetic unitary-regression task:
//! random unit-power inputs labeled with the output intensities of a hidden
//! Haar-random unitary. Compares the three gradient routes on the same run.
//!
//! ```bash
//! cargo run -p uonn --release --example train_mesh_task
//! ```

use uonn::*;

fn main() -> Result<()> {
    let n = 4;
    let (dataset, loss) = make_unitary_task(n, 11)?;
    println!(
        "task: {} unit-power samples labeled by a hidden {n}x{n} Haar unitary (seed 11)\n",
        dataset.len()
    );

    for method in [GradMethod::Psr, GradMethod::Analytic, GradMethod::FiniteDifference] {
        let cfg = TrainConfig {
            optimizer: Optimizer::adam(0.05),
            iterations: 150,
            seed: 5,
            grad_method: method,
            ..Default::default()
        };
        let mut net = Network::single_mesh(mesh::MeshLayout::clements(n)?);
        let history = train(&mut net, &dataset, &loss, &cfg)?;
        let first = history.records.first().unwrap().loss;
        let last = history.final_loss().unwrap();
        println!("{method:?}: loss {first:.6} -> {last:.6} over {} iterations", history.len());
    }

    // a longer shift-rule run, with the curve sampled every 25 iterations
    let cfg = TrainConfig {
        optimizer: Optimizer::adam(0.05),
        iterations: 600,
        seed: 5,
        ..Default::default()
    };
    let mut net = Network::single_mesh(mesh::MeshLayout::clements(n)?);
    let history = train(&mut net, &dataset, &loss, &cfg)?;
    println!("\nshift-rule run, {} iterations:", history.len());
    println!("{:<6} {:>14} {:>14}", "iter", "mse loss", "grad norm");
    for r in history.records.iter().step_by(25) {
        println!("{:<6} {:>14.3e} {:>14.3e}", r.iter, r.loss, r.grad_norm);
    }
    println!("final loss: {:.3e}", history.final_loss().unwrap());

    // the mesh should now mimic the hidden unitary on fresh inputs
    let hidden = random_unitary(n, 11)?;
    let probe = FieldVec::basis(n, 2)?;
    let want = mat_apply(&hidden, &probe)?;
    let got = forward_field(&net, &probe)?;
    println!("\nhidden vs trained output intensities for the basis probe e_2:");
    for k in 0..n {
        println!("  mode {k}: {:.6} vs {:.6}", want.get(k).norm_sqr(), got.get(k).norm_sqr());
    }
    Ok(())
}
