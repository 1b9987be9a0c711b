//! Independent gradient references used to certify the shift-rule engine:
//! central finite differences and the exact analytic derivative obtained by
//! inserting the phase-shifter generator, dU_PS/dtheta = iG U_PS.

use crate::error::{Error, Result};
use crate::field::FieldVec;
use crate::network::{forward_field, measure_observable, Network, Observable, ParamRef};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FdScheme {
    Central,
}

/// Finite-difference configuration; the step must lie in (0, 1e-2).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdConfig {
    pub step: f64,
    pub scheme: FdScheme,
}

impl Default for FdConfig {
    fn default() -> Self {
        Self { step: 1e-6, scheme: FdScheme::Central }
    }
}

impl FdConfig {
    pub fn with_step(step: f64) -> Result<Self> {
        let cfg = Self { step, scheme: FdScheme::Central };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step < 1e-2) {
            return Err(Error::InvalidArgument(format!(
                "finite-difference step must lie in (0, 1e-2), got {}",
                self.step
            )));
        }
        Ok(())
    }
}

/// Central difference [f(theta + h) - f(theta - h)] / (2h).
pub fn grad_fd<F>(mut f: F, theta: f64, cfg: &FdConfig) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    cfg.validate()?;
    let FdScheme::Central = cfg.scheme;
    let h = cfg.step;
    let plus = f(theta + h);
    let minus = f(theta - h);
    if !plus.is_finite() || !minus.is_finite() {
        return Err(Error::NonFinite("finite-difference evaluation"));
    }
    Ok((plus - minus) / (2.0 * h))
}

/// Exact complex derivative dE_out/dtheta for a unitary-only network:
/// the forward pass with iG inserted at the parameter's phase shifter,
/// `dE = U_L ... (iG U_j) ... U_1 E`.
pub fn grad_analytic(net: &Network, input: &FieldVec, p: &ParamRef) -> Result<FieldVec> {
    if !net.is_unitary_only() {
        return Err(Error::Mode(
            "the analytic field derivative requires a unitary-only network".into(),
        ));
    }
    net.check_input(input)?;
    net.get_phase(p)?;
    let mut buf = input.to_vec();
    let last = net.layers().len() - 1;
    net.apply_layers_generator(0, last, &mut buf, p)?;
    FieldVec::new(buf)
}

/// Analytic derivative of an observable expectation:
/// d<O>/dtheta = sum_k O_k 2 Re(conj(E_k) dE_k/dtheta).
pub fn grad_observable_analytic(
    net: &Network,
    input: &FieldVec,
    obs: &Observable,
    p: &ParamRef,
) -> Result<f64> {
    let field = forward_field(net, input)?;
    measure_observable(&field, obs)?; // dimension check
    let deriv = grad_analytic(net, input, p)?;
    Ok(field
        .amps()
        .iter()
        .zip(deriv.amps().iter())
        .zip(obs.diag().iter())
        .map(|((e, d), o)| o * 2.0 * (e.conj() * d).re)
        .sum())
}
