//! The elementary devices: beam splitter, phase shifter, and the composed
//! Mach-Zehnder interferometer, plus the shift-rule constants of the phase
//! shifter.
//!
//! ```bash
//! cargo run -p uonn --example mzi_components
//! ```

use std::f64::consts::PI;
use uonn::*;

fn print_2x2(label: &str, m: &CMatrix) {
    println!("{label}:");
    for r in 0..2 {
        let a = m.get(r, 0);
        let b = m.get(r, 1);
        println!("  [{:+.4}{:+.4}i  {:+.4}{:+.4}i]", a.re, a.im, b.re, b.im);
    }
}

fn main() -> Result<()> {
    let bs = beam_splitter();
    print_2x2("50:50 beam splitter", bs.matrix());
    println!("  unitarity residual: {:.2e}\n", bs.unitarity_residual()?);

    print_2x2("phase shifter at pi/2", phase_shifter(PI / 2.0).matrix());
    println!();

    // one MZI, once from the closed form and once as PS2 * BS * PS1 * BS
    let (theta, phi) = (1.0, 0.5);
    let closed = mzi_unitary(theta, phi);
    let product = mzi_from_components(theta, phi);
    print_2x2(&format!("MZI(theta={theta}, phi={phi}), closed form"), closed.matrix());
    print_2x2("same MZI as the four-component product", product.matrix());
    println!(
        "  max elementwise difference: {:.2e}\n",
        closed.frobenius_distance(product.matrix())
    );

    // notable settings
    print_2x2("MZI(0, 0) -- full cross", mzi_unitary(0.0, 0.0).matrix());
    print_2x2("MZI(pi, pi) -- identity", mzi_unitary(PI, PI).matrix());
    println!();

    // shift-rule constants of the phase shifter
    let spec = phase_shift_rule_spec();
    println!("phase-shifter shift rule:");
    println!("  generator eigenvalues: {{{}, {}}}", spec.e0, spec.e1);
    println!("  exponent constant a: {}", spec.a);
    println!("  shift constant r = (a/2)(e1 - e0) = {}", spec.r);
    println!("  shift |pi/(4r)| = {:.6} rad (pi/2)", spec.shift.abs());

    // the rule evaluated on a synthetic first-order signal is exact
    let f = |t: f64| 0.3 + 0.6 * t.cos() - 0.1 * t.sin();
    let df = |t: f64| -0.6 * t.sin() - 0.1 * t.cos();
    let t0 = 0.8;
    let g = shift_rule_general(f, t0, &spec)?;
    println!("  rule on a0 + a1 cos + b1 sin at {t0}: {g:.12} (exact {:.12})", df(t0));
    Ok(())
}
