//! The two forward modes: complex-field pass-through versus per-layer
//! intensity detection, including both detection re-injection conventions.
//!
//! ```bash
//! cargo run -p uonn --example forward_modes
//! ```

use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;
use uonn::mesh::PhaseSlot;
use uonn::*;

fn mzi_layout(theta: f64, phi: f64) -> Result<mesh::MeshLayout> {
    let mut layout = mesh::MeshLayout::clements(2)?;
    layout.set_phase(PhaseSlot::Theta(0), theta)?;
    layout.set_phase(PhaseSlot::Phi(0), phi)?;
    Ok(layout)
}

fn main() -> Result<()> {
    let input = FieldVec::new(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)])?;

    // a single balanced MZI: half the power leaves on each rail
    let net = Network::single_mesh(mzi_layout(FRAC_PI_2, 0.0)?);
    let field = forward_field(&net, &input)?;
    let intensity = forward_intensity(&net, &input)?;
    println!("single MZI at theta = pi/2, input [1, 0]:");
    println!(
        "  field mode:     [{:+.4}{:+.4}i, {:+.4}{:+.4}i]",
        field.get(0).re,
        field.get(0).im,
        field.get(1).re,
        field.get(1).im
    );
    println!("  intensity mode: {:?}", intensity.vals());
    println!("  power in {:.4} -> out {:.4}\n", input.power(), intensity.total());

    // observables pick out and combine intensities
    let z1 = Observable::projector(2, 0)?;
    let z_diff = Observable::new(vec![1.0, -1.0])?;
    println!("observables on the same output:");
    println!("  <Z1>         = {:+.6}", measure_observable(&field, &z1)?);
    println!("  <diag(1,-1)> = {:+.6}\n", measure_observable(&field, &z_diff)?);

    // a mid-network detection erases phase; the next mesh sees a real field
    for mode in [DetectionMode::Amplitude, DetectionMode::Intensity] {
        let net = Network::new(
            2,
            vec![
                Layer::Mesh(mzi_layout(1.2, 0.7)?),
                Layer::Detection(mode),
                Layer::Mesh(mzi_layout(0.4, 2.1)?),
            ],
        )?;
        let out = forward_intensity(&net, &input)?;
        println!(
            "mesh -> detection({mode:?}) -> mesh: intensities {:?} (total {:.4})",
            out.vals()
                .iter()
                .map(|v| (v * 1e4).round() / 1e4)
                .collect::<Vec<_>>(),
            out.total()
        );
        // complex pass-through refuses to cross a detection layer
        let err = forward_field(&net, &input).unwrap_err();
        println!("  field mode on the same network: {err}");
    }

    // software-defined activation on the complex field
    let net = Network::new(
        2,
        vec![Layer::Mesh(mzi_layout(1.2, 0.7)?), Layer::Activation(Activation::ModSquare)],
    )?;
    let out = forward_field(&net, &input)?;
    println!(
        "\nmesh -> modsquare activation (field mode allowed): [{:.4}, {:.4}]",
        out.get(0).re,
        out.get(1).re
    );
    Ok(())
}
