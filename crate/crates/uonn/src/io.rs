//! File formats and artifact persistence.
//!
//! Complex values serialize as two-element real arrays `[re, im]`; fields as
//! arrays of those pairs; matrices as row-major nested arrays. Layouts and
//! networks are structured JSON documents built on the same scalar encoding.
//! All documents re-load through the validating constructors, so anything the
//! suite writes can be read back.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::components::MziParams;
use crate::error::{Error, Result};
use crate::field::{CMatrix, FieldVec};
use crate::mesh::{MeshLayout, MeshScheme, PhaseSlot};
use crate::network::{Activation, DetectionMode, Layer, Network, ParamRef};
use crate::psr::{GradMethod, GradientReport};
use crate::trainer::TrainHistory;

// -- scalar encoding ---------------------------------------------------------

type Pair = [f64; 2];

fn to_pair(z: Complex64) -> Pair {
    [z.re, z.im]
}

fn from_pair(p: Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

// -- fields and matrices -----------------------------------------------------

pub fn field_to_pairs(v: &FieldVec) -> Vec<Pair> {
    v.amps().iter().map(|z| to_pair(*z)).collect()
}

pub fn field_from_pairs(pairs: &[Pair]) -> Result<FieldVec> {
    FieldVec::new(pairs.iter().map(|p| from_pair(*p)).collect())
}

pub fn matrix_to_rows(m: &CMatrix) -> Vec<Vec<Pair>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| to_pair(m.get(r, c))).collect())
        .collect()
}

pub fn matrix_from_rows(rows: &[Vec<Pair>]) -> Result<CMatrix> {
    CMatrix::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|p| from_pair(*p)).collect())
            .collect(),
    )
}

pub fn save_matrix(path: &Path, m: &CMatrix) -> Result<()> {
    write_json(path, &matrix_to_rows(m))
}

pub fn load_matrix(path: &Path) -> Result<CMatrix> {
    let rows: Vec<Vec<Pair>> = read_json(path)?;
    matrix_from_rows(&rows)
}

pub fn save_field(path: &Path, v: &FieldVec) -> Result<()> {
    write_json(path, &field_to_pairs(v))
}

pub fn load_field(path: &Path) -> Result<FieldVec> {
    let pairs: Vec<Pair> = read_json(path)?;
    field_from_pairs(&pairs)
}

// -- mesh layouts --------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct PlacementDoc {
    top: usize,
    theta: f64,
    phi: f64,
}

#[derive(Serialize, Deserialize)]
struct LayoutDoc {
    scheme: String,
    n_modes: usize,
    placements: Vec<PlacementDoc>,
    input_phases: Vec<f64>,
}

pub fn scheme_name(scheme: MeshScheme) -> &'static str {
    match scheme {
        MeshScheme::Reck => "reck",
        MeshScheme::Clements => "clements",
    }
}

pub fn scheme_from_name(name: &str) -> Result<MeshScheme> {
    match name {
        "reck" => Ok(MeshScheme::Reck),
        "clements" => Ok(MeshScheme::Clements),
        other => Err(Error::InvalidArgument(format!(
            "unknown scheme '{other}' (expected 'reck' or 'clements')"
        ))),
    }
}

fn layout_to_doc(layout: &MeshLayout) -> LayoutDoc {
    LayoutDoc {
        scheme: scheme_name(layout.scheme()).to_string(),
        n_modes: layout.n_modes(),
        placements: layout
            .placements()
            .iter()
            .map(|p| PlacementDoc { top: p.top(), theta: p.theta(), phi: p.phi() })
            .collect(),
        input_phases: layout.input_phases().to_vec(),
    }
}

fn layout_from_doc(doc: &LayoutDoc) -> Result<MeshLayout> {
    let placements = doc
        .placements
        .iter()
        .map(|p| {
            if !(p.theta.is_finite() && p.phi.is_finite()) {
                return Err(Error::NonFinite("placement phases"));
            }
            Ok(MziParams::new(p.theta, p.phi, p.top))
        })
        .collect::<Result<Vec<_>>>()?;
    MeshLayout::new(
        scheme_from_name(&doc.scheme)?,
        doc.n_modes,
        placements,
        doc.input_phases.clone(),
    )
}

pub fn save_layout(path: &Path, layout: &MeshLayout) -> Result<()> {
    write_json(path, &layout_to_doc(layout))
}

pub fn load_layout(path: &Path) -> Result<MeshLayout> {
    let doc: LayoutDoc = read_json(path)?;
    layout_from_doc(&doc)
}

// -- networks --------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum LayerDoc {
    Mesh { layout: LayoutDoc },
    Detection { mode: String },
    Activation { activation: String },
}

#[derive(Serialize, Deserialize)]
struct NetworkDoc {
    n_modes: usize,
    layers: Vec<LayerDoc>,
}

fn detection_name(mode: DetectionMode) -> &'static str {
    match mode {
        DetectionMode::Amplitude => "amplitude",
        DetectionMode::Intensity => "intensity",
    }
}

fn detection_from_name(name: &str) -> Result<DetectionMode> {
    match name {
        "amplitude" => Ok(DetectionMode::Amplitude),
        "intensity" => Ok(DetectionMode::Intensity),
        other => Err(Error::InvalidArgument(format!(
            "unknown detection mode '{other}' (expected 'amplitude' or 'intensity')"
        ))),
    }
}

fn activation_name(act: Activation) -> &'static str {
    match act {
        Activation::Identity => "identity",
        Activation::ModSquare => "modsquare",
    }
}

fn activation_from_name(name: &str) -> Result<Activation> {
    match name {
        "identity" => Ok(Activation::Identity),
        "modsquare" => Ok(Activation::ModSquare),
        other => Err(Error::InvalidArgument(format!(
            "unknown activation '{other}' (expected 'identity' or 'modsquare')"
        ))),
    }
}

fn network_to_doc(net: &Network) -> NetworkDoc {
    NetworkDoc {
        n_modes: net.n_modes(),
        layers: net
            .layers()
            .iter()
            .map(|l| match l {
                Layer::Mesh(layout) => LayerDoc::Mesh { layout: layout_to_doc(layout) },
                Layer::Detection(mode) => {
                    LayerDoc::Detection { mode: detection_name(*mode).to_string() }
                }
                Layer::Activation(act) => {
                    LayerDoc::Activation { activation: activation_name(*act).to_string() }
                }
            })
            .collect(),
    }
}

fn network_from_doc(doc: &NetworkDoc) -> Result<Network> {
    let layers = doc
        .layers
        .iter()
        .map(|l| {
            Ok(match l {
                LayerDoc::Mesh { layout } => Layer::Mesh(layout_from_doc(layout)?),
                LayerDoc::Detection { mode } => Layer::Detection(detection_from_name(mode)?),
                LayerDoc::Activation { activation } => {
                    Layer::Activation(activation_from_name(activation)?)
                }
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Network::new(doc.n_modes, layers)
}

pub fn save_network(path: &Path, net: &Network) -> Result<()> {
    write_json(path, &network_to_doc(net))
}

pub fn load_network(path: &Path) -> Result<Network> {
    let doc: NetworkDoc = read_json(path)?;
    network_from_doc(&doc)
}

// -- gradient reports ----------------------------------------------------------

#[derive(Serialize, Deserialize)]
pub struct GradRecord {
    pub layer: usize,
    pub placement: usize,
    pub which: String,
    pub value_re: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value_im: Option<f64>,
    pub method: String,
    pub n_evals: usize,
}

pub fn method_name(m: GradMethod) -> &'static str {
    match m {
        GradMethod::Psr => "psr",
        GradMethod::FiniteDifference => "fd",
        GradMethod::Analytic => "analytic",
    }
}

pub fn method_from_name(name: &str) -> Result<GradMethod> {
    match name {
        "psr" => Ok(GradMethod::Psr),
        "fd" => Ok(GradMethod::FiniteDifference),
        "analytic" => Ok(GradMethod::Analytic),
        other => Err(Error::InvalidArgument(format!(
            "unknown gradient method '{other}' (expected 'psr', 'fd', or 'analytic')"
        ))),
    }
}

pub fn param_fields(p: &ParamRef) -> (usize, usize, &'static str) {
    match p.slot {
        PhaseSlot::Theta(k) => (p.layer, k, "theta"),
        PhaseSlot::Phi(k) => (p.layer, k, "phi"),
        PhaseSlot::Screen(m) => (p.layer, m, "screen"),
    }
}

pub fn report_records(report: &GradientReport) -> Vec<GradRecord> {
    report
        .entries
        .iter()
        .map(|e| {
            let (layer, placement, which) = param_fields(&e.param);
            let (value_re, value_im) = match &e.value {
                crate::psr::GradValue::Real(x) => (*x, None),
                crate::psr::GradValue::Field(f) => (f.get(0).re, Some(f.get(0).im)),
            };
            GradRecord {
                layer,
                placement,
                which: which.to_string(),
                value_re,
                value_im,
                method: method_name(e.method).to_string(),
                n_evals: e.n_evals,
            }
        })
        .collect()
}

pub fn save_report(path: &Path, report: &GradientReport) -> Result<()> {
    write_json(path, &report_records(report))
}

// -- training history ------------------------------------------------------------

/// CSV body with an `iter,loss,grad_norm` header; numbers carry 17
/// significant digits so doubles round-trip losslessly.
pub fn history_csv(history: &TrainHistory) -> String {
    let mut out = String::from("iter,loss,grad_norm\n");
    for r in &history.records {
        out.push_str(&format!("{},{:.16e},{:.16e}\n", r.iter, r.loss, r.grad_norm));
    }
    out
}

pub fn save_history_csv(path: &Path, history: &TrainHistory) -> Result<()> {
    std::fs::write(path, history_csv(history))?;
    Ok(())
}

// -- generic JSON helpers ----------------------------------------------------------

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text)?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::random_unitary;
    use crate::mesh::clements_decompose;
    use proptest::prelude::*;
    use tempfile::tempdir;

    #[test]
    fn layout_file_roundtrip_preserves_phases() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("layout.json");
        let u = random_unitary(5, 3).unwrap();
        let layout = clements_decompose(u.matrix()).unwrap();
        save_layout(&path, &layout).unwrap();
        let loaded = load_layout(&path).unwrap();
        for (a, b) in layout.placements().iter().zip(loaded.placements().iter()) {
            assert!((a.theta() - b.theta()).abs() <= 1e-12);
            assert!((a.phi() - b.phi()).abs() <= 1e-12);
            assert_eq!(a.top(), b.top());
        }
        for (a, b) in layout.input_phases().iter().zip(loaded.input_phases().iter()) {
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn network_file_roundtrip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("net.json");
        let layout = clements_decompose(random_unitary(3, 1).unwrap().matrix()).unwrap();
        let net = Network::new(
            3,
            vec![
                Layer::Mesh(layout.clone()),
                Layer::Detection(DetectionMode::Amplitude),
                Layer::Mesh(layout),
                Layer::Activation(Activation::ModSquare),
            ],
        )
        .unwrap();
        save_network(&path, &net).unwrap();
        let loaded = load_network(&path).unwrap();
        assert_eq!(loaded.layers().len(), 4);
        assert!(matches!(loaded.layers()[1], Layer::Detection(DetectionMode::Amplitude)));
        assert!(matches!(loaded.layers()[3], Layer::Activation(Activation::ModSquare)));
    }

    #[test]
    fn corrupted_network_file_is_a_parse_error() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.json");
        std::fs::write(&path, "{ not json").unwrap();
        assert!(matches!(load_network(&path), Err(Error::Parse(_))));
    }

    #[test]
    fn unknown_names_are_rejected() {
        assert!(scheme_from_name("triangular").is_err());
        assert!(detection_from_name("camera").is_err());
        assert!(activation_from_name("relu").is_err());
        assert!(method_from_name("adjoint").is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn matrix_json_roundtrip_is_exact(n in 1usize..6, seed in any::<u64>()) {
            let u = random_unitary(n, seed).unwrap();
            let rows = matrix_to_rows(u.matrix());
            let text = serde_json::to_string(&rows).unwrap();
            let back: Vec<Vec<[f64; 2]>> = serde_json::from_str(&text).unwrap();
            let m = matrix_from_rows(&back).unwrap();
            prop_assert_eq!(m, u.matrix().clone());
        }
    }
}
