//! Multi-layer optical networks and their two forward modes.
//!
//! A network is an ordered stack of layers over N shared modes. Mesh layers
//! apply programmable unitaries; detection layers measure intensities and
//! re-inject them (either as amplitudes sqrt(I) with zero phase or as the raw
//! intensities, both conventions selectable per layer); activation layers
//! apply a software-defined elementwise nonlinearity.
//!
//! `forward_field` keeps the complex field end to end and rejects detection
//! layers; `forward_intensity` traverses everything and reads out
//! photodiode-style intensities |E_k|^2 at the end.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::FieldVec;
use crate::mesh::{MeshLayout, PhaseSlot};

/// How a mid-network detection re-injects its measurement into the next layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DetectionMode {
    /// Re-inject sqrt(I) with zero phase (power preserving).
    Amplitude,
    /// Re-inject the raw intensity I.
    Intensity,
}

/// Software-defined elementwise nonlinearity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Activation {
    Identity,
    ModSquare,
}

/// One network layer.
#[derive(Clone, Debug)]
pub enum Layer {
    Mesh(MeshLayout),
    Detection(DetectionMode),
    Activation(Activation),
}

/// An ordered stack of layers sharing `n_modes`.
#[derive(Clone, Debug)]
pub struct Network {
    n_modes: usize,
    layers: Vec<Layer>,
}

/// Reference to one trainable phase: a layer index plus a slot within that
/// layer's mesh.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParamRef {
    pub layer: usize,
    pub slot: PhaseSlot,
}

/// Re-export of the slot kind for parameter references.
pub use crate::mesh::PhaseSlot as ParamSlot;

impl Network {
    pub fn new(n_modes: usize, layers: Vec<Layer>) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::InvalidArgument("network requires n_modes >= 1".into()));
        }
        for (j, layer) in layers.iter().enumerate() {
            if let Layer::Mesh(layout) = layer {
                if layout.n_modes() != n_modes {
                    return Err(Error::DimensionMismatch {
                        context: "mesh layer width",
                        expected: n_modes,
                        got: layout.n_modes(),
                    });
                }
            }
            if j > 0 {
                if let (Layer::Detection(_), Layer::Detection(_)) = (&layers[j - 1], layer) {
                    return Err(Error::InvalidArgument(
                        "consecutive detection layers are not allowed".into(),
                    ));
                }
            }
        }
        Ok(Self { n_modes, layers })
    }

    /// A network holding a single mesh layer.
    pub fn single_mesh(layout: MeshLayout) -> Self {
        let n = layout.n_modes();
        Self { n_modes: n, layers: vec![Layer::Mesh(layout)] }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layer(&self, j: usize) -> Option<&Layer> {
        self.layers.get(j)
    }

    /// True iff every layer is a mesh.
    pub fn is_unitary_only(&self) -> bool {
        self.layers.iter().all(|l| matches!(l, Layer::Mesh(_)))
    }

    fn mesh_at(&self, j: usize) -> Result<&MeshLayout> {
        match self.layers.get(j) {
            Some(Layer::Mesh(layout)) => Ok(layout),
            Some(_) => Err(Error::BadParamRef(format!("layer {j} is not a mesh layer"))),
            None => Err(Error::BadParamRef(format!("layer {j} out of range"))),
        }
    }

    fn mesh_at_mut(&mut self, j: usize) -> Result<&mut MeshLayout> {
        match self.layers.get_mut(j) {
            Some(Layer::Mesh(layout)) => Ok(layout),
            Some(_) => Err(Error::BadParamRef(format!("layer {j} is not a mesh layer"))),
            None => Err(Error::BadParamRef(format!("layer {j} out of range"))),
        }
    }

    /// All trainable phases in enumeration order (layer by layer).
    pub fn all_params(&self) -> Vec<ParamRef> {
        let mut out = Vec::new();
        for (j, layer) in self.layers.iter().enumerate() {
            if let Layer::Mesh(layout) = layer {
                out.extend(layout.slots().into_iter().map(|slot| ParamRef { layer: j, slot }));
            }
        }
        out
    }

    pub fn param_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| match l {
                Layer::Mesh(layout) => layout.phase_count(),
                _ => 0,
            })
            .sum()
    }

    pub fn get_phase(&self, p: &ParamRef) -> Result<f64> {
        self.mesh_at(p.layer)?.get_phase(p.slot)
    }

    pub fn set_phase(&mut self, p: &ParamRef, value: f64) -> Result<()> {
        self.mesh_at_mut(p.layer)?.set_phase(p.slot, value)
    }

    /// Validate an input field against the network width.
    pub(crate) fn check_input(&self, input: &FieldVec) -> Result<()> {
        if input.len() != self.n_modes {
            return Err(Error::DimensionMismatch {
                context: "network input",
                expected: self.n_modes,
                got: input.len(),
            });
        }
        Ok(())
    }

    /// Apply layers `start..=end_inclusive` to a value buffer, substituting one
    /// phase when the override matches the absolute layer index being applied.
    pub(crate) fn apply_layers(
        &self,
        start: usize,
        end_inclusive: usize,
        buf: &mut [Complex64],
        over: Option<(&ParamRef, f64)>,
    ) {
        for j in start..=end_inclusive {
            match &self.layers[j] {
                Layer::Mesh(layout) => {
                    let local = over.and_then(|(p, v)| (p.layer == j).then_some((p.slot, v)));
                    layout.apply_to(buf, local);
                }
                Layer::Detection(mode) => apply_detection(*mode, buf),
                Layer::Activation(act) => apply_activation(*act, buf),
            }
        }
    }

    /// Value buffers entering each layer plus the final output
    /// (length `layers.len() + 1`).
    pub(crate) fn value_trajectory(&self, input: &FieldVec) -> Result<Vec<Vec<Complex64>>> {
        self.check_input(input)?;
        let mut traj = Vec::with_capacity(self.layers.len() + 1);
        let mut buf = input.to_vec();
        traj.push(buf.clone());
        for j in 0..self.layers.len() {
            self.apply_layers(j, j, &mut buf, None);
            traj.push(buf.clone());
        }
        Ok(traj)
    }

    /// The maximal run of consecutive mesh layers containing `j`.
    pub(crate) fn unitary_span(&self, j: usize) -> Result<(usize, usize)> {
        self.mesh_at(j)?;
        let mut s = j;
        while s > 0 && matches!(self.layers[s - 1], Layer::Mesh(_)) {
            s -= 1;
        }
        let mut e = j;
        while e + 1 < self.layers.len() && matches!(self.layers[e + 1], Layer::Mesh(_)) {
            e += 1;
        }
        Ok((s, e))
    }

    /// Apply mesh layers `start..=end_inclusive` with the phase-shifter
    /// generator inserted at `p`. Every layer in the range must be a mesh.
    pub(crate) fn apply_layers_generator(
        &self,
        start: usize,
        end_inclusive: usize,
        buf: &mut [Complex64],
        p: &ParamRef,
    ) -> Result<()> {
        self.mesh_at(p.layer)?;
        for j in start..=end_inclusive {
            let layout = self.mesh_at(j)?;
            if j == p.layer {
                layout.apply_with_generator(buf, p.slot);
            } else {
                layout.apply_to(buf, None);
            }
        }
        Ok(())
    }

    /// Push a derivative buffer through layer `j`'s Jacobian, evaluated at the
    /// base value entering that layer. Mesh layers are linear; detection and
    /// activation layers differentiate their elementwise maps.
    pub(crate) fn apply_layer_jacobian(
        &self,
        j: usize,
        value_in: &[Complex64],
        deriv: &mut [Complex64],
    ) {
        match &self.layers[j] {
            Layer::Mesh(layout) => layout.apply_to(deriv, None),
            Layer::Detection(mode) => {
                for (d, v) in deriv.iter_mut().zip(value_in.iter()) {
                    let slope = 2.0 * (v.conj() * *d).re;
                    *d = match mode {
                        // d|v|/dtheta = Re(conj(v) dv)/|v|, taken as 0 at v = 0
                        DetectionMode::Amplitude => {
                            let r = v.norm();
                            if r == 0.0 {
                                Complex64::new(0.0, 0.0)
                            } else {
                                Complex64::new(0.5 * slope / r, 0.0)
                            }
                        }
                        DetectionMode::Intensity => Complex64::new(slope, 0.0),
                    };
                }
            }
            Layer::Activation(act) => match act {
                Activation::Identity => {}
                Activation::ModSquare => {
                    for (d, v) in deriv.iter_mut().zip(value_in.iter()) {
                        *d = Complex64::new(2.0 * (v.conj() * *d).re, 0.0);
                    }
                }
            },
        }
    }
}

/// The composed unitary of an all-mesh network, built by passing basis
/// vectors through the stack; optionally with one phase overridden.
pub(crate) fn network_unitary_with(
    net: &Network,
    over: Option<(&ParamRef, f64)>,
) -> Result<crate::field::CMatrix> {
    if !net.is_unitary_only() {
        return Err(Error::Mode(
            "the network unitary is defined for unitary-only networks".into(),
        ));
    }
    let n = net.n_modes();
    let mut data = ndarray::Array2::zeros((n, n));
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for col in 0..n {
        buf.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        buf[col] = Complex64::new(1.0, 0.0);
        if !net.layers().is_empty() {
            net.apply_layers(0, net.layers().len() - 1, &mut buf, over);
        }
        for r in 0..n {
            data[[r, col]] = buf[r];
        }
    }
    Ok(crate::field::CMatrix::from_array(data))
}

/// dU_net/dtheta for an all-mesh network via generator insertion at `p`.
pub(crate) fn network_unitary_generator(
    net: &Network,
    p: &ParamRef,
) -> Result<crate::field::CMatrix> {
    if !net.is_unitary_only() {
        return Err(Error::Mode(
            "the network unitary is defined for unitary-only networks".into(),
        ));
    }
    let n = net.n_modes();
    let mut data = ndarray::Array2::zeros((n, n));
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for col in 0..n {
        buf.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        buf[col] = Complex64::new(1.0, 0.0);
        if !net.layers().is_empty() {
            net.apply_layers_generator(0, net.layers().len() - 1, &mut buf, p)?;
        }
        for r in 0..n {
            data[[r, col]] = buf[r];
        }
    }
    Ok(crate::field::CMatrix::from_array(data))
}

fn apply_detection(mode: DetectionMode, buf: &mut [Complex64]) {
    for z in buf.iter_mut() {
        let i = z.norm_sqr();
        *z = match mode {
            DetectionMode::Amplitude => Complex64::new(i.sqrt(), 0.0),
            DetectionMode::Intensity => Complex64::new(i, 0.0),
        };
    }
}

fn apply_activation(act: Activation, buf: &mut [Complex64]) {
    match act {
        Activation::Identity => {}
        Activation::ModSquare => {
            for z in buf.iter_mut() {
                *z = Complex64::new(z.norm_sqr(), 0.0);
            }
        }
    }
}

/// A vector of per-mode optical intensities.
#[derive(Clone, Debug, PartialEq)]
pub struct IntensityVec {
    vals: Vec<f64>,
}

impl IntensityVec {
    pub fn new(vals: Vec<f64>) -> Result<Self> {
        if !vals.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("intensity vector"));
        }
        if vals.iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidArgument("intensities must be non-negative".into()));
        }
        Ok(Self { vals })
    }

    pub fn vals(&self) -> &[f64] {
        &self.vals
    }

    pub fn len(&self) -> usize {
        self.vals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vals.is_empty()
    }

    pub fn get(&self, k: usize) -> f64 {
        self.vals[k]
    }

    pub fn total(&self) -> f64 {
        self.vals.iter().sum()
    }
}

/// A diagonal Hermitian measurement operator.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable {
    diag: Vec<f64>,
}

impl Observable {
    pub fn new(diag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::InvalidArgument("observable must be non-empty".into()));
        }
        if !diag.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("observable diagonal"));
        }
        Ok(Self { diag })
    }

    /// Projector onto a single output mode, e.g. diag(1, 0, ..., 0).
    pub fn projector(n: usize, mode: usize) -> Result<Self> {
        if mode >= n {
            return Err(Error::InvalidArgument(format!("mode {mode} out of range for {n}")));
        }
        let mut diag = vec![0.0; n];
        diag[mode] = 1.0;
        Self::new(diag)
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }
}

/// Complex-field forward pass `E_out = U_L ... U_1 E`.
///
/// Rejects networks containing detection layers; activations are applied
/// elementwise to the complex field.
pub fn forward_field(net: &Network, input: &FieldVec) -> Result<FieldVec> {
    forward_field_with(net, input, None)
}

pub(crate) fn forward_field_with(
    net: &Network,
    input: &FieldVec,
    over: Option<(&ParamRef, f64)>,
) -> Result<FieldVec> {
    net.check_input(input)?;
    if let Some(j) = net.layers().iter().position(|l| matches!(l, Layer::Detection(_))) {
        return Err(Error::Mode(format!(
            "field-mode forward crosses a detection layer at index {j}; use intensity mode"
        )));
    }
    let mut buf = input.to_vec();
    if !net.layers().is_empty() {
        net.apply_layers(0, net.layers().len() - 1, &mut buf, over);
    }
    FieldVec::new(buf)
}

/// Full traversal ending in photodiode intensities |E_k|^2. Mid-network
/// detection layers re-inject per their configured convention.
pub fn forward_intensity(net: &Network, input: &FieldVec) -> Result<IntensityVec> {
    net.check_input(input)?;
    let mut buf = input.to_vec();
    if !net.layers().is_empty() {
        net.apply_layers(0, net.layers().len() - 1, &mut buf, None);
    }
    IntensityVec::new(buf.iter().map(|z| z.norm_sqr()).collect())
}

/// Expectation value sum_k O_k |E_k|^2, identically Tr(O E E^dag).
pub fn measure_observable(field: &FieldVec, obs: &Observable) -> Result<f64> {
    if field.len() != obs.len() {
        return Err(Error::DimensionMismatch {
            context: "observable measurement",
            expected: obs.len(),
            got: field.len(),
        });
    }
    Ok(field
        .amps()
        .iter()
        .zip(obs.diag().iter())
        .map(|(z, o)| o * z.norm_sqr())
        .sum())
}
