//! Gradient-descent training of mesh networks with shift-rule, analytic, or
//! finite-difference gradients.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::field::{mat_apply, random_unitary, FieldVec, UnitaryMatrix};
use crate::network::{network_unitary_with, IntensityVec, Network, Observable};
use crate::oracles::FdConfig;
use crate::psr::{grad_loss_report, GradMethod};

/// Per-sample training target.
#[derive(Clone, Debug)]
pub enum Target {
    Intensity(IntensityVec),
    Field(FieldVec),
    None,
}

/// One training sample: an input field and its target.
#[derive(Clone, Debug)]
pub struct Sample {
    pub input: FieldVec,
    pub target: Target,
}

/// Loss functions over the network output.
#[derive(Clone, Debug)]
pub enum LossSpec {
    /// Mean over modes of (|E_k|^2 - t_k)^2 against per-sample intensity targets.
    MseIntensity,
    /// Sum over modes of |E_k - t_k|^2 against per-sample field targets.
    MseField,
    /// The raw expectation sum_k O_k |E_k|^2 as the objective.
    ObservableValue(Observable),
    /// Squared error (sum_k O_k |E_k|^2 - target)^2.
    ObservableTarget { observable: Observable, target: f64 },
    /// 1 - |Tr(T^dag U_net)|^2 / N^2; zero iff the mesh realizes the target
    /// up to a global phase. Ignores the sample.
    UnitaryFidelity { target: UnitaryMatrix },
}

impl LossSpec {
    /// Loss of a final output buffer. Not used for the fidelity loss.
    pub(crate) fn value_of(&self, out: &[Complex64], target: &Target) -> Result<f64> {
        match self {
            LossSpec::MseIntensity => {
                let t = intensity_target(target, out.len())?;
                let n = out.len() as f64;
                Ok(out
                    .iter()
                    .zip(t.vals().iter())
                    .map(|(z, t)| (z.norm_sqr() - t).powi(2))
                    .sum::<f64>()
                    / n)
            }
            LossSpec::MseField => {
                let t = field_target(target, out.len())?;
                Ok(out.iter().zip(t.amps().iter()).map(|(z, t)| (z - t).norm_sqr()).sum())
            }
            LossSpec::ObservableValue(obs) => expectation(out, obs),
            LossSpec::ObservableTarget { observable, target } => {
                Ok((expectation(out, observable)? - target).powi(2))
            }
            LossSpec::UnitaryFidelity { .. } => Err(Error::InvalidArgument(
                "fidelity loss is evaluated on the network unitary, not an output field".into(),
            )),
        }
    }

    /// Directional derivative of the loss at `out` along the output
    /// perturbation `dout` (a real derivative of a real loss).
    pub(crate) fn directional(
        &self,
        out: &[Complex64],
        dout: &[Complex64],
        target: &Target,
    ) -> Result<f64> {
        match self {
            LossSpec::MseIntensity => {
                let t = intensity_target(target, out.len())?;
                let n = out.len() as f64;
                Ok(out
                    .iter()
                    .zip(dout.iter())
                    .zip(t.vals().iter())
                    .map(|((z, d), t)| 2.0 * (z.norm_sqr() - t) * 2.0 * (z.conj() * d).re)
                    .sum::<f64>()
                    / n)
            }
            LossSpec::MseField => {
                let t = field_target(target, out.len())?;
                Ok(out
                    .iter()
                    .zip(dout.iter())
                    .zip(t.amps().iter())
                    .map(|((z, d), t)| 2.0 * ((z - t).conj() * d).re)
                    .sum())
            }
            LossSpec::ObservableValue(obs) => {
                check_obs(obs, out.len())?;
                Ok(out
                    .iter()
                    .zip(dout.iter())
                    .zip(obs.diag().iter())
                    .map(|((z, d), o)| o * 2.0 * (z.conj() * d).re)
                    .sum())
            }
            LossSpec::ObservableTarget { observable, target } => {
                let val = expectation(out, observable)?;
                let dval: f64 = out
                    .iter()
                    .zip(dout.iter())
                    .zip(observable.diag().iter())
                    .map(|((z, d), o)| o * 2.0 * (z.conj() * d).re)
                    .sum();
                Ok(2.0 * (val - target) * dval)
            }
            LossSpec::UnitaryFidelity { .. } => Err(Error::InvalidArgument(
                "fidelity loss gradients are computed on the network unitary".into(),
            )),
        }
    }
}

fn check_obs(obs: &Observable, n: usize) -> Result<()> {
    if obs.len() != n {
        return Err(Error::DimensionMismatch {
            context: "loss observable",
            expected: n,
            got: obs.len(),
        });
    }
    Ok(())
}

fn expectation(out: &[Complex64], obs: &Observable) -> Result<f64> {
    check_obs(obs, out.len())?;
    Ok(out.iter().zip(obs.diag().iter()).map(|(z, o)| o * z.norm_sqr()).sum())
}

fn intensity_target(target: &Target, n: usize) -> Result<&IntensityVec> {
    match target {
        Target::Intensity(t) if t.len() == n => Ok(t),
        Target::Intensity(t) => Err(Error::DimensionMismatch {
            context: "intensity target",
            expected: n,
            got: t.len(),
        }),
        _ => Err(Error::InvalidArgument("sample lacks an intensity target".into())),
    }
}

fn field_target(target: &Target, n: usize) -> Result<&FieldVec> {
    match target {
        Target::Field(t) if t.len() == n => Ok(t),
        Target::Field(t) => Err(Error::DimensionMismatch {
            context: "field target",
            expected: n,
            got: t.len(),
        }),
        _ => Err(Error::InvalidArgument("sample lacks a field target".into())),
    }
}

/// Evaluate a loss for one sample.
pub fn loss_eval(net: &Network, sample: &Sample, loss: &LossSpec) -> Result<f64> {
    if let LossSpec::UnitaryFidelity { target } = loss {
        if target.dim() != net.n_modes() {
            return Err(Error::DimensionMismatch {
                context: "fidelity target",
                expected: net.n_modes(),
                got: target.dim(),
            });
        }
        let u = network_unitary_with(net, None)?;
        let mut tr = Complex64::new(0.0, 0.0);
        for r in 0..u.nrows() {
            for c in 0..u.ncols() {
                tr += target.get(r, c).conj() * u.get(r, c);
            }
        }
        let n = net.n_modes() as f64;
        return Ok(1.0 - tr.norm_sqr() / (n * n));
    }
    let traj = net.value_trajectory(&sample.input)?;
    loss.value_of(&traj[traj.len() - 1], &sample.target)
}

/// Optimizer choice. Defaults follow the Adam convention
/// (lr 0.01, beta1 0.9, beta2 0.999, eps 1e-8).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Optimizer {
    Sgd { lr: f64 },
    Adam { lr: f64, beta1: f64, beta2: f64, eps: f64 },
}

impl Optimizer {
    pub fn adam(lr: f64) -> Self {
        Optimizer::Adam { lr, beta1: 0.9, beta2: 0.999, eps: 1e-8 }
    }

    fn lr(&self) -> f64 {
        match self {
            Optimizer::Sgd { lr } => *lr,
            Optimizer::Adam { lr, .. } => *lr,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.lr() > 0.0 && self.lr().is_finite()) {
            return Err(Error::InvalidArgument("learning rate must be positive".into()));
        }
        Ok(())
    }
}

impl Default for Optimizer {
    fn default() -> Self {
        Optimizer::adam(0.01)
    }
}

/// Training configuration. `batch_size == 0` means full-batch; otherwise
/// iteration i uses the cyclic slice starting at (i * batch_size) % len.
#[derive(Clone, Debug)]
pub struct TrainConfig {
    pub optimizer: Optimizer,
    pub iterations: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub grad_method: GradMethod,
    pub fd: FdConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            optimizer: Optimizer::default(),
            iterations: 100,
            batch_size: 0,
            seed: 0,
            grad_method: GradMethod::Psr,
            fd: FdConfig::default(),
        }
    }
}

/// One per-iteration record: loss and gradient norm at the pre-update point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainRecord {
    pub iter: usize,
    pub loss: f64,
    pub grad_norm: f64,
}

#[derive(Clone, Debug, Default)]
pub struct TrainHistory {
    pub records: Vec<TrainRecord>,
}

impl TrainHistory {
    pub fn final_loss(&self) -> Option<f64> {
        self.records.last().map(|r| r.loss)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Set every trainable phase to a seeded uniform draw from [0, 2*pi).
pub fn randomize_phases(net: &mut Network, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for p in net.all_params() {
        let v = rng.gen_range(0.0..TAU);
        net.set_phase(&p, v).expect("enumerated parameter resolves");
    }
}

const EARLY_STOP_LOSS: f64 = 1e-10;

/// Train in place. Phases are initialized to seeded uniform values, then
/// updated iteratively from batch gradients; they re-wrap into [0, 2*pi)
/// after every step. A zero-iteration config is a no-op. Aborts with the
/// iteration index if the loss stops being finite.
pub fn train(
    net: &mut Network,
    dataset: &[Sample],
    loss: &LossSpec,
    cfg: &TrainConfig,
) -> Result<TrainHistory> {
    if dataset.is_empty() {
        return Err(Error::InvalidArgument("training requires a non-empty dataset".into()));
    }
    cfg.optimizer.validate()?;
    cfg.fd.validate()?;
    let mut history = TrainHistory::default();
    if cfg.iterations == 0 {
        return Ok(history);
    }

    randomize_phases(net, cfg.seed);
    let params = net.all_params();
    let mut adam_m = vec![0.0; params.len()];
    let mut adam_v = vec![0.0; params.len()];

    for iter in 0..cfg.iterations {
        let batch = batch_indices(iter, cfg.batch_size, dataset.len());

        let mut loss_val = 0.0;
        for &ix in &batch {
            loss_val += loss_eval(net, &dataset[ix], loss)?;
        }
        loss_val /= batch.len() as f64;
        if !loss_val.is_finite() {
            return Err(Error::Diverged { iter, loss: loss_val });
        }

        let grad = batch_gradient(net, dataset, &batch, loss, cfg, &params)?;
        let grad_norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        history.records.push(TrainRecord { iter, loss: loss_val, grad_norm });
        if loss_val < EARLY_STOP_LOSS {
            break;
        }

        match cfg.optimizer {
            Optimizer::Sgd { lr } => {
                for (p, g) in params.iter().zip(grad.iter()) {
                    let v = net.get_phase(p)?;
                    net.set_phase(p, v - lr * g)?;
                }
            }
            Optimizer::Adam { lr, beta1, beta2, eps } => {
                let t = (iter + 1) as i32;
                for (k, (p, g)) in params.iter().zip(grad.iter()).enumerate() {
                    adam_m[k] = beta1 * adam_m[k] + (1.0 - beta1) * g;
                    adam_v[k] = beta2 * adam_v[k] + (1.0 - beta2) * g * g;
                    let m_hat = adam_m[k] / (1.0 - beta1.powi(t));
                    let v_hat = adam_v[k] / (1.0 - beta2.powi(t));
                    let v = net.get_phase(p)?;
                    net.set_phase(p, v - lr * m_hat / (v_hat.sqrt() + eps))?;
                }
            }
        }
    }
    Ok(history)
}

fn batch_indices(iter: usize, batch_size: usize, len: usize) -> Vec<usize> {
    if batch_size == 0 || batch_size >= len {
        (0..len).collect()
    } else {
        let start = (iter * batch_size) % len;
        (0..batch_size).map(|k| (start + k) % len).collect()
    }
}

/// Batch-averaged gradient over all parameters.
fn batch_gradient(
    net: &mut Network,
    dataset: &[Sample],
    batch: &[usize],
    loss: &LossSpec,
    cfg: &TrainConfig,
    params: &[crate::network::ParamRef],
) -> Result<Vec<f64>> {
    let mut grad = vec![0.0; params.len()];
    match cfg.grad_method {
        GradMethod::Psr | GradMethod::Analytic => {
            if matches!(loss, LossSpec::UnitaryFidelity { .. }) {
                // sample-independent objective: one report per iteration
                let report = grad_loss_report(
                    net,
                    &dataset[batch[0]],
                    loss,
                    params,
                    cfg.grad_method,
                )?;
                for (k, e) in report.entries.iter().enumerate() {
                    grad[k] = e.value.as_real().expect("real loss gradient");
                }
            } else {
                for &ix in batch {
                    let report =
                        grad_loss_report(net, &dataset[ix], loss, params, cfg.grad_method)?;
                    for (k, e) in report.entries.iter().enumerate() {
                        grad[k] += e.value.as_real().expect("real loss gradient");
                    }
                }
                for g in grad.iter_mut() {
                    *g /= batch.len() as f64;
                }
            }
        }
        GradMethod::FiniteDifference => {
            let h = cfg.fd.step;
            let fidelity = matches!(loss, LossSpec::UnitaryFidelity { .. });
            let eval_batch = |net: &Network| -> Result<f64> {
                if fidelity {
                    return loss_eval(net, &dataset[batch[0]], loss);
                }
                let mut acc = 0.0;
                for &ix in batch {
                    acc += loss_eval(net, &dataset[ix], loss)?;
                }
                Ok(acc / batch.len() as f64)
            };
            for (k, p) in params.iter().enumerate() {
                let theta = net.get_phase(p)?;
                net.set_phase(p, theta + h)?;
                let fp = eval_batch(net)?;
                net.set_phase(p, theta - h)?;
                let fm = eval_batch(net)?;
                net.set_phase(p, theta)?;
                if !fp.is_finite() || !fm.is_finite() {
                    return Err(Error::NonFinite("finite-difference loss evaluation"));
                }
                grad[k] = (fp - fm) / (2.0 * h);
            }
        }
    }
    Ok(grad)
}

/// Synthetic regression task: 4N unit-power random input fields labeled with
/// the output intensities of a hidden Haar-random unitary.
pub fn make_unitary_task(n: usize, seed: u64) -> Result<(Vec<Sample>, LossSpec)> {
    if n < 2 {
        return Err(Error::InvalidArgument("unitary task requires n >= 2".into()));
    }
    let hidden = random_unitary(n, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut samples = Vec::with_capacity(4 * n);
    for _ in 0..4 * n {
        let mut amps: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let power: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        let scale = power.sqrt().recip();
        for z in amps.iter_mut() {
            *z *= scale;
        }
        let input = FieldVec::new(amps)?;
        let out = mat_apply(&hidden, &input)?;
        let target =
            IntensityVec::new(out.amps().iter().map(|z| z.norm_sqr()).collect())?;
        samples.push(Sample { input, target: Target::Intensity(target) });
    }
    Ok((samples, LossSpec::MseIntensity))
}
