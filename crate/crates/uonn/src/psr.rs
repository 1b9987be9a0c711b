//! Exact gradients of network outputs via two-point shift rules.
//!
//! Every stored phase enters the optical field linearly through one
//! `e^{i theta}` factor, so intensities and diagonal observables of a
//! unitary-only network are first-order trigonometric in each phase. Two
//! evaluations at shifted phase values then give the derivative exactly:
//!
//! ```text
//! real output     d f / d theta = (1/2)  [ f(theta + pi/2) - f(theta - pi/2) ]
//! complex output  d f / d theta = (1-i)/2 [ f(theta + pi/2) - f(theta) ]
//! ```
//!
//! The general two-eigenvalue rule `r [ f(theta + pi/4r) - f(theta - pi/4r) ]`
//! is available through [`shift_rule_general`]; the optical phase shifter has
//! r = -1/2, which reproduces the real rule above after folding the sign into
//! the evaluation order.
//!
//! For networks with mid-span detection or activation layers,
//! [`grad_loss_chained`] applies the complex rule inside each unitary span and
//! chains through the remaining layers analytically.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::FRAC_PI_2;

use crate::components::ShiftRuleSpec;
use crate::error::{Error, Result};
use crate::field::{CMatrix, FieldVec};
use crate::network::{
    forward_field_with, measure_observable, network_unitary_generator, network_unitary_with,
    Network, Observable, ParamRef,
};
use crate::trainer::{LossSpec, Sample};

/// Gradient computation route.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GradMethod {
    Psr,
    FiniteDifference,
    Analytic,
}

/// A gradient value: a real number or a complex field derivative vector.
#[derive(Clone, Debug)]
pub enum GradValue {
    Real(f64),
    Field(FieldVec),
}

impl GradValue {
    pub fn as_real(&self) -> Option<f64> {
        match self {
            GradValue::Real(x) => Some(*x),
            GradValue::Field(_) => None,
        }
    }
}

/// One per-parameter gradient record.
#[derive(Clone, Debug)]
pub struct GradEntry {
    pub param: ParamRef,
    pub value: GradValue,
    pub method: GradMethod,
    pub n_evals: usize,
}

/// Largest absolute difference between two gradient routes.
#[derive(Clone, Debug)]
pub struct CrossResidual {
    pub a: GradMethod,
    pub b: GradMethod,
    pub max_abs: f64,
    pub worst: ParamRef,
}

/// Per-parameter gradients plus cross-method residuals when several methods
/// were run. `shared_evals` counts evaluations amortized across parameters
/// (the unshifted base pass of the complex rule).
#[derive(Clone, Debug, Default)]
pub struct GradientReport {
    pub entries: Vec<GradEntry>,
    pub residuals: Vec<CrossResidual>,
    pub shared_evals: usize,
}

impl GradientReport {
    pub fn real_values(&self) -> Vec<f64> {
        self.entries.iter().filter_map(|e| e.value.as_real()).collect()
    }

    /// Largest entrywise difference against another report over the same
    /// parameter list; `None` when the lists differ or values are not real.
    pub fn cross_residual(&self, other: &GradientReport) -> Option<CrossResidual> {
        let mut worst: Option<CrossResidual> = None;
        for (a, b) in self.entries.iter().zip(other.entries.iter()) {
            if a.param != b.param {
                return None;
            }
            let (x, y) = (a.value.as_real()?, b.value.as_real()?);
            let d = (x - y).abs();
            if worst.as_ref().is_none_or(|w| d > w.max_abs) {
                worst = Some(CrossResidual { a: a.method, b: b.method, max_abs: d, worst: a.param });
            }
        }
        worst
    }
}

/// Evaluate the general two-point rule `r [f(theta + pi/4r) - f(theta - pi/4r)]`.
pub fn shift_rule_general<F>(mut f: F, theta: f64, spec: &ShiftRuleSpec) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    if spec.r == 0.0 || !spec.r.is_finite() {
        return Err(Error::InvalidArgument("shift rule requires finite r != 0".into()));
    }
    let h = std::f64::consts::PI / (4.0 * spec.r);
    Ok(spec.r * (f(theta + h) - f(theta - h)))
}

fn require_unitary_only(net: &Network, rule: &str) -> Result<()> {
    if !net.is_unitary_only() {
        return Err(Error::Mode(format!(
            "{rule} requires a unitary-only network; use grad_loss_chained for networks with \
             detection or activation layers"
        )));
    }
    Ok(())
}

/// Exact gradient of `Tr(O E E^dag)` for every listed phase via the real
/// two-point rule; exactly two forward evaluations per parameter.
pub fn grad_intensity_psr(
    net: &Network,
    input: &FieldVec,
    obs: &Observable,
    params: &[ParamRef],
) -> Result<GradientReport> {
    require_unitary_only(net, "the real two-point rule")?;
    net.check_input(input)?;
    if obs.len() != net.n_modes() {
        return Err(Error::DimensionMismatch {
            context: "observable width",
            expected: net.n_modes(),
            got: obs.len(),
        });
    }
    let entries = params
        .par_iter()
        .map(|p| {
            let theta = net.get_phase(p)?;
            let mut evals = 0usize;
            let mut eval = |t: f64| -> Result<f64> {
                evals += 1;
                let field = forward_field_with(net, input, Some((p, t)))?;
                measure_observable(&field, obs)
            };
            let plus = eval(theta + FRAC_PI_2)?;
            let minus = eval(theta - FRAC_PI_2)?;
            Ok(GradEntry {
                param: *p,
                value: GradValue::Real(0.5 * (plus - minus)),
                method: GradMethod::Psr,
                n_evals: evals,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GradientReport { entries, residuals: vec![], shared_evals: 0 })
}

/// (1-i)/2 applied to the difference of two field buffers.
fn complex_rule_combine(shifted: &[Complex64], base: &[Complex64]) -> Vec<Complex64> {
    let c = Complex64::new(0.5, -0.5);
    shifted.iter().zip(base.iter()).map(|(s, b)| c * (s - b)).collect()
}

/// Exact complex derivative dE_out/dtheta via the complex two-point rule.
pub fn grad_field_psr(net: &Network, input: &FieldVec, p: &ParamRef) -> Result<FieldVec> {
    grad_field_psr_counted(net, input, p).map(|(g, _)| g)
}

/// Same as [`grad_field_psr`], also returning the number of forward
/// evaluations performed (always 2: base and shifted).
pub fn grad_field_psr_counted(
    net: &Network,
    input: &FieldVec,
    p: &ParamRef,
) -> Result<(FieldVec, usize)> {
    require_unitary_only(net, "the complex two-point rule")?;
    let theta = net.get_phase(p)?;
    let mut evals = 0usize;
    let mut eval = |over: Option<(&ParamRef, f64)>| -> Result<FieldVec> {
        evals += 1;
        forward_field_with(net, input, over)
    };
    let base = eval(None)?;
    let shifted = eval(Some((p, theta + FRAC_PI_2)))?;
    let grad = FieldVec::new(complex_rule_combine(&shifted.to_vec(), &base.to_vec()))?;
    Ok((grad, evals))
}

/// Gradient of a scalar loss for every listed phase, for networks that may
/// contain detection and activation layers.
///
/// The complex rule runs inside the parameter's unitary span (its unshifted
/// output is computed once and reused across all parameters); the derivative
/// is then pushed through the downstream layers with the analytic chain rule
/// for real losses of complex variables, dL = 2 Re(conj(dL/dE_k) dE_k).
pub fn grad_loss_chained(
    net: &Network,
    sample: &Sample,
    loss: &LossSpec,
    params: &[ParamRef],
) -> Result<GradientReport> {
    grad_loss_report(net, sample, loss, params, GradMethod::Psr)
}

/// [`grad_loss_chained`] with a selectable span-derivative route: `Psr` uses
/// the complex two-point rule, `Analytic` the generator-insertion derivative.
pub fn grad_loss_report(
    net: &Network,
    sample: &Sample,
    loss: &LossSpec,
    params: &[ParamRef],
    method: GradMethod,
) -> Result<GradientReport> {
    if method == GradMethod::FiniteDifference {
        return Err(Error::InvalidArgument(
            "chained gradients support Psr and Analytic routes; finite differences apply to the \
             scalar loss directly"
                .into(),
        ));
    }
    if let LossSpec::UnitaryFidelity { target } = loss {
        return fidelity_grad_report(net, target.matrix(), params, method);
    }

    let traj = net.value_trajectory(&sample.input)?;
    let n_layers = net.layers().len();
    let final_value = &traj[n_layers];

    let entries = params
        .par_iter()
        .map(|p| {
            let (s, e) = net.unitary_span(p.layer)?;
            let mut evals = 0usize;

            // derivative of the span output with respect to the phase
            let mut deriv: Vec<Complex64> = match method {
                GradMethod::Psr => {
                    let theta = net.get_phase(p)?;
                    let mut buf = traj[s].clone();
                    evals += 1;
                    net.apply_layers(s, e, &mut buf, Some((p, theta + FRAC_PI_2)));
                    complex_rule_combine(&buf, &traj[e + 1])
                }
                GradMethod::Analytic => {
                    let mut buf = traj[s].clone();
                    evals += 1;
                    net.apply_layers_generator(s, e, &mut buf, p)?;
                    buf
                }
                GradMethod::FiniteDifference => unreachable!(),
            };

            // chain through the downstream layers at the base point
            for (j, value_in) in traj.iter().enumerate().take(n_layers).skip(e + 1) {
                net.apply_layer_jacobian(j, value_in, &mut deriv);
            }

            let dl = loss.directional(final_value, &deriv, &sample.target)?;
            Ok(GradEntry { param: *p, value: GradValue::Real(dl), method, n_evals: evals })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(GradientReport { entries, residuals: vec![], shared_evals: 1 })
}

fn trace_adjoint_product(target: &CMatrix, u: &CMatrix) -> Complex64 {
    // Tr(T^dag U) = sum_jk conj(T_jk) U_jk
    let mut acc = Complex64::new(0.0, 0.0);
    for r in 0..target.nrows() {
        for c in 0..target.ncols() {
            acc += target.get(r, c).conj() * u.get(r, c);
        }
    }
    acc
}

/// Gradient of the fidelity loss 1 - |Tr(T^dag U)|^2 / N^2 over the network
/// unitary. The trace is linear in each `e^{i theta}`, so the complex rule
/// applies to it directly; the base trace is shared across parameters.
fn fidelity_grad_report(
    net: &Network,
    target: &CMatrix,
    params: &[ParamRef],
    method: GradMethod,
) -> Result<GradientReport> {
    if target.nrows() != net.n_modes() || target.ncols() != net.n_modes() {
        return Err(Error::DimensionMismatch {
            context: "fidelity target",
            expected: net.n_modes(),
            got: target.nrows(),
        });
    }
    let n = net.n_modes() as f64;
    let u_base = network_unitary_with(net, None)?;
    let t_base = trace_adjoint_product(target, &u_base);
    let c_rule = Complex64::new(0.5, -0.5);

    let entries = params
        .par_iter()
        .map(|p| {
            let mut evals = 0usize;
            let dt = match method {
                GradMethod::Psr => {
                    let theta = net.get_phase(p)?;
                    evals += 1;
                    let u_shift = network_unitary_with(net, Some((p, theta + FRAC_PI_2)))?;
                    c_rule * (trace_adjoint_product(target, &u_shift) - t_base)
                }
                GradMethod::Analytic => {
                    evals += 1;
                    let du = network_unitary_generator(net, p)?;
                    trace_adjoint_product(target, &du)
                }
                GradMethod::FiniteDifference => unreachable!(),
            };
            let dl = -2.0 * (t_base.conj() * dt).re / (n * n);
            Ok(GradEntry { param: *p, value: GradValue::Real(dl), method, n_evals: evals })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(GradientReport { entries, residuals: vec![], shared_evals: 1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::components::phase_shift_rule_spec;
    use crate::field::random_unitary;
    use crate::mesh::{clements_decompose, MeshLayout, PhaseSlot};
    use crate::network::{forward_intensity, DetectionMode, IntensityVec, Layer};
    use crate::oracles::{grad_analytic, grad_observable_analytic};
    use crate::trainer::{loss_eval, Target};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{PI, TAU};

    fn mzi_net(theta: f64, phi: f64) -> Network {
        let mut layout = MeshLayout::clements(2).unwrap();
        layout.set_phase(PhaseSlot::Theta(0), theta).unwrap();
        layout.set_phase(PhaseSlot::Phi(0), phi).unwrap();
        Network::single_mesh(layout)
    }

    fn phase_net(theta: f64) -> Network {
        let mut layout = MeshLayout::clements(2).unwrap();
        layout.set_phase(PhaseSlot::Screen(0), theta).unwrap();
        Network::single_mesh(layout)
    }

    fn screen_param() -> ParamRef {
        ParamRef { layer: 0, slot: PhaseSlot::Screen(0) }
    }

    fn random_net(n: usize, depth: usize, seed: u64) -> Network {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layers = (0..depth)
            .map(|_| {
                let mut layout = MeshLayout::clements(n).unwrap();
                for slot in layout.slots() {
                    layout.set_phase(slot, rng.gen_range(0.0..TAU)).unwrap();
                }
                Layer::Mesh(layout)
            })
            .collect();
        Network::new(n, layers).unwrap()
    }

    #[test]
    fn shift_rule_general_examples() {
        let spec_half = ShiftRuleSpec::new(1.0, -0.5, 0.5).unwrap();
        assert_eq!(spec_half.r, 0.5);
        let g = shift_rule_general(|t| t.cos(), 0.0, &spec_half).unwrap();
        assert!(g.abs() < 1e-15);
        let g = shift_rule_general(|t| t.cos(), FRAC_PI_2, &spec_half).unwrap();
        assert!((g - (-1.0)).abs() < 1e-15);

        let optical = phase_shift_rule_spec();
        let g = shift_rule_general(|t| (t / 2.0).sin().powi(2), FRAC_PI_2, &optical).unwrap();
        assert!((g - 0.5).abs() < 1e-15);
    }

    #[test]
    fn optical_spec_matches_plus_minus_ordering() {
        // with r = -1/2 the rule evaluates to (1/2)[f(t + pi/2) - f(t - pi/2)]
        let optical = phase_shift_rule_spec();
        let f = |t: f64| 0.3 + 0.7 * t.cos() - 0.2 * t.sin();
        for &t in &[0.0, 0.3, 1.7, 4.0] {
            let lhs = shift_rule_general(f, t, &optical).unwrap();
            let rhs = 0.5 * (f(t + FRAC_PI_2) - f(t - FRAC_PI_2));
            assert!((lhs - rhs).abs() < 1e-15);
        }
    }

    #[test]
    fn two_point_rule_is_antisymmetric_in_shift_sign() {
        let f = |t: f64| 0.1 + 0.4 * t.cos() + 0.9 * t.sin();
        for &t in &[0.2, 1.1, 3.0] {
            let fwd = 0.5 * (f(t + FRAC_PI_2) - f(t - FRAC_PI_2));
            let swapped = 0.5 * (f(t - FRAC_PI_2) - f(t + FRAC_PI_2));
            assert_eq!(fwd, -swapped);
        }
    }

    #[test]
    fn intensity_gradient_examples() {
        let input = FieldVec::basis(2, 0).unwrap();
        let z1 = Observable::projector(2, 0).unwrap();
        let theta_ref = ParamRef { layer: 0, slot: PhaseSlot::Theta(0) };
        let phi_ref = ParamRef { layer: 0, slot: PhaseSlot::Phi(0) };

        // |E_o1|^2 = (1 - cos theta)/2: stationary at 0, slope 1/2 at pi/2
        let g0 = grad_intensity_psr(&mzi_net(0.0, 0.0), &input, &z1, &[theta_ref]).unwrap();
        assert!(g0.entries[0].value.as_real().unwrap().abs() < 1e-12);

        let gh = grad_intensity_psr(&mzi_net(FRAC_PI_2, 0.0), &input, &z1, &[theta_ref]).unwrap();
        assert!((gh.entries[0].value.as_real().unwrap() - 0.5).abs() < 1e-12);

        // the external phase never moves |E_o1|^2
        for phi in [0.0, 0.9, 2.5, 5.2] {
            let g = grad_intensity_psr(&mzi_net(1.3, phi), &input, &z1, &[phi_ref]).unwrap();
            assert!(g.entries[0].value.as_real().unwrap().abs() < 1e-12, "phi={phi}");
        }
    }

    #[test]
    fn intensity_gradient_counts_two_evals() {
        let net = random_net(4, 2, 3);
        let input = FieldVec::basis(4, 0).unwrap();
        let obs = Observable::projector(4, 2).unwrap();
        let params = net.all_params();
        let report = grad_intensity_psr(&net, &input, &obs, &params).unwrap();
        assert_eq!(report.entries.len(), params.len());
        for e in &report.entries {
            assert_eq!(e.n_evals, 2);
        }
    }

    #[test]
    fn field_gradient_examples() {
        let input = FieldVec::basis(2, 0).unwrap();
        let p = screen_param();

        let (g, n) = grad_field_psr_counted(&phase_net(0.0), &input, &p).unwrap();
        assert_eq!(n, 2);
        assert!((g.get(0) - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        assert!(g.get(1).norm() < 1e-15);

        let g = grad_field_psr(&phase_net(FRAC_PI_2), &input, &p).unwrap();
        assert!((g.get(0) - Complex64::new(-1.0, 0.0)).norm() < 1e-12);

        // untouched mode has no dependence
        let other = FieldVec::basis(2, 1).unwrap();
        let g = grad_field_psr(&phase_net(0.7), &other, &p).unwrap();
        assert!(g.get(0).norm() < 1e-15 && g.get(1).norm() < 1e-15);
    }

    #[test]
    fn field_rule_matches_analytic_oracle() {
        let net = random_net(4, 2, 41);
        let input = FieldVec::basis(4, 1).unwrap();
        for p in net.all_params() {
            let psr = grad_field_psr(&net, &input, &p).unwrap();
            let exact = grad_analytic(&net, &input, &p).unwrap();
            assert!(psr.max_abs_diff(&exact) < 1e-10, "{p:?}");
        }
    }

    #[test]
    fn real_rule_matches_analytic_oracle() {
        let net = random_net(4, 2, 42);
        let input = FieldVec::basis(4, 3).unwrap();
        let obs = Observable::projector(4, 0).unwrap();
        let params = net.all_params();
        let report = grad_intensity_psr(&net, &input, &obs, &params).unwrap();
        for (p, entry) in params.iter().zip(report.entries.iter()) {
            let exact = grad_observable_analytic(&net, &input, &obs, p).unwrap();
            let got = entry.value.as_real().unwrap();
            assert!((got - exact).abs() < 1e-10, "{p:?}: {got} vs {exact}");
        }
    }

    #[test]
    fn total_intensity_gradient_is_conserved() {
        let net = random_net(4, 3, 77);
        let input = FieldVec::basis(4, 2).unwrap();
        for p in net.all_params() {
            let mut total = 0.0;
            for k in 0..4 {
                let obs = Observable::projector(4, k).unwrap();
                let r = grad_intensity_psr(&net, &input, &obs, &[p]).unwrap();
                total += r.entries[0].value.as_real().unwrap();
            }
            assert!(total.abs() < 1e-10, "{p:?}: {total:.3e}");
        }
    }

    #[test]
    fn real_rule_rejects_detection_networks() {
        let net = Network::new(
            2,
            vec![
                Layer::Mesh(MeshLayout::clements(2).unwrap()),
                Layer::Detection(DetectionMode::Amplitude),
            ],
        )
        .unwrap();
        let input = FieldVec::basis(2, 0).unwrap();
        let obs = Observable::projector(2, 0).unwrap();
        let p = ParamRef { layer: 0, slot: PhaseSlot::Theta(0) };
        let err = grad_intensity_psr(&net, &input, &obs, &[p]).unwrap_err();
        assert!(err.to_string().contains("grad_loss_chained"));
    }

    #[test]
    fn chained_loss_reduces_to_intensity_rule_on_unitary_networks() {
        let net = random_net(4, 2, 99);
        let input = FieldVec::basis(4, 0).unwrap();
        let obs = Observable::projector(4, 1).unwrap();
        let params = net.all_params();
        let direct = grad_intensity_psr(&net, &input, &obs, &params).unwrap();
        let sample = Sample { input, target: Target::None };
        let loss = LossSpec::ObservableValue(obs);
        let chained = grad_loss_chained(&net, &sample, &loss, &params).unwrap();
        let res = direct.cross_residual(&chained).unwrap();
        assert!(res.max_abs < 1e-10, "max diff {:.3e}", res.max_abs);
    }

    #[test]
    fn chained_field_loss_examples() {
        // L = |E_0 - 1|^2 through a bare phase: L(theta) = 2 - 2 cos(theta)
        let target =
            FieldVec::new(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]).unwrap();
        let p = screen_param();
        for (theta, expect) in [(0.0, 0.0), (FRAC_PI_2, 2.0)] {
            let net = phase_net(theta);
            let sample = Sample {
                input: FieldVec::basis(2, 0).unwrap(),
                target: Target::Field(target.clone()),
            };
            let report = grad_loss_chained(&net, &sample, &LossSpec::MseField, &[p]).unwrap();
            let g = report.entries[0].value.as_real().unwrap();
            assert!((g - expect).abs() < 1e-12, "theta={theta}: {g}");
        }
    }

    #[test]
    fn chained_gradient_through_detection_matches_finite_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut l1 = MeshLayout::clements(3).unwrap();
        let mut l2 = MeshLayout::clements(3).unwrap();
        for layout in [&mut l1, &mut l2] {
            for slot in layout.slots() {
                layout.set_phase(slot, rng.gen_range(0.0..TAU)).unwrap();
            }
        }
        for mode in [DetectionMode::Amplitude, DetectionMode::Intensity] {
            let net = Network::new(
                3,
                vec![Layer::Mesh(l1.clone()), Layer::Detection(mode), Layer::Mesh(l2.clone())],
            )
            .unwrap();
            let target = IntensityVec::new(vec![0.2, 0.5, 0.3]).unwrap();
            let sample = Sample {
                input: FieldVec::basis(3, 0).unwrap(),
                target: Target::Intensity(target),
            };
            let params = net.all_params();
            let chained =
                grad_loss_chained(&net, &sample, &LossSpec::MseIntensity, &params).unwrap();
            // central differences on the scalar loss as the reference
            let h = 1e-6;
            for (p, entry) in params.iter().zip(chained.entries.iter()) {
                let mut probe = net.clone();
                let theta = probe.get_phase(p).unwrap();
                probe.set_phase(p, theta + h).unwrap();
                let fp = loss_eval(&probe, &sample, &LossSpec::MseIntensity).unwrap();
                probe.set_phase(p, theta - h).unwrap();
                let fm = loss_eval(&probe, &sample, &LossSpec::MseIntensity).unwrap();
                let fd = (fp - fm) / (2.0 * h);
                let got = entry.value.as_real().unwrap();
                assert!((got - fd).abs() < 1e-6, "{mode:?} {p:?}: {got} vs {fd}");
            }
        }
    }

    #[test]
    fn psr_and_analytic_chained_routes_agree() {
        let u = random_unitary(3, 6).unwrap();
        let layout = clements_decompose(u.matrix()).unwrap();
        let net = Network::single_mesh(layout);
        let sample = Sample {
            input: FieldVec::basis(3, 1).unwrap(),
            target: Target::Intensity(IntensityVec::new(vec![0.1, 0.6, 0.3]).unwrap()),
        };
        let params = net.all_params();
        let a = grad_loss_report(&net, &sample, &LossSpec::MseIntensity, &params, GradMethod::Psr)
            .unwrap();
        let b =
            grad_loss_report(&net, &sample, &LossSpec::MseIntensity, &params, GradMethod::Analytic)
                .unwrap();
        let res = a.cross_residual(&b).unwrap();
        assert!(res.max_abs < 1e-10);
    }

    #[test]
    fn fidelity_gradient_matches_finite_difference() {
        let target = random_unitary(3, 44).unwrap();
        let start = clements_decompose(random_unitary(3, 45).unwrap().matrix()).unwrap();
        let net = Network::single_mesh(start);
        let loss = LossSpec::UnitaryFidelity { target };
        let sample = Sample { input: FieldVec::basis(3, 0).unwrap(), target: Target::None };
        let params = net.all_params();
        let report = grad_loss_chained(&net, &sample, &loss, &params).unwrap();
        let h = 1e-6;
        for (p, entry) in params.iter().zip(report.entries.iter()) {
            let mut probe = net.clone();
            let theta = probe.get_phase(p).unwrap();
            probe.set_phase(p, theta + h).unwrap();
            let fp = loss_eval(&probe, &sample, &loss).unwrap();
            probe.set_phase(p, theta - h).unwrap();
            let fm = loss_eval(&probe, &sample, &loss).unwrap();
            let fd = (fp - fm) / (2.0 * h);
            let got = entry.value.as_real().unwrap();
            assert!((got - fd).abs() < 1e-6, "{p:?}: {got} vs {fd}");
        }
    }

    #[test]
    fn intensity_dependence_is_first_order_fourier() {
        // the structural precondition of the two-point rule, on a dense sample
        let net = random_net(4, 2, 1234);
        let input = FieldVec::basis(4, 0).unwrap();
        let p = net.all_params()[5];
        let mut probe = net.clone();
        let mut f = |t: f64| {
            probe.set_phase(&p, t).unwrap();
            forward_intensity(&probe, &input).unwrap().get(1)
        };
        let f0 = f(0.0);
        let f1 = f(TAU / 3.0);
        let f2 = f(2.0 * TAU / 3.0);
        let a0 = (f0 + f1 + f2) / 3.0;
        let a1 = (2.0 * f0 - f1 - f2) / 3.0;
        let b1 = (f1 - f2) / 3.0f64.sqrt();
        for k in 0..16 {
            let t = 0.05 + k as f64 * PI / 8.5;
            assert!((a0 + a1 * t.cos() + b1 * t.sin() - f(t)).abs() < 1e-8);
        }
    }
}
