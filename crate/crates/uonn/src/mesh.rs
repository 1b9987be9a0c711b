//! MZI mesh layouts: Reck (triangular) and Clements (rectangular) programs,
//! synthesis of the mesh unitary, and decomposition of arbitrary unitaries
//! back into phase programs.
//!
//! A layout is an ordered program: the field passes through a diagonal phase
//! screen first, then through the MZIs in program order, so in matrix form
//!
//! ```text
//! U = T_P ... T_2 T_1 diag(e^{i psi})
//! ```
//!
//! With this crate's MZI convention (external phase on the output arm) the
//! residual diagonal of a decomposition lands on the input side: N(N-1) MZI
//! phases plus the N-entry input screen cover all N^2 degrees of freedom of
//! the unitary group, which an output-side screen cannot do.

use ndarray::Array2;
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::components::{wrap_phase, MziParams};
use crate::error::{Error, Result};
use crate::field::{CMatrix, UnitaryMatrix};

/// Mesh topology family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeshScheme {
    Reck,
    Clements,
}

/// A reference to one stored phase within a mesh layout.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhaseSlot {
    /// Internal phase of placement k.
    Theta(usize),
    /// External phase of placement k.
    Phi(usize),
    /// Input phase screen entry for a mode.
    Screen(usize),
}

/// An ordered program of N(N-1)/2 MZI placements plus the input phase screen.
#[derive(Clone, Debug, PartialEq)]
pub struct MeshLayout {
    n_modes: usize,
    placements: Vec<MziParams>,
    input_phases: Vec<f64>,
    scheme: MeshScheme,
}

fn clements_slot_tops(n: usize) -> Vec<usize> {
    let mut tops = Vec::with_capacity(n * (n - 1) / 2);
    for col in 0..n {
        let start = col % 2;
        let mut m = start;
        while m + 1 < n {
            tops.push(m);
            m += 2;
        }
    }
    tops
}

fn reck_slot_tops(n: usize) -> Vec<usize> {
    let mut tops = Vec::with_capacity(n * (n - 1) / 2);
    for c in 0..n - 1 {
        for m in (c..=n - 2).rev() {
            tops.push(m);
        }
    }
    tops
}

fn scheme_slot_tops(scheme: MeshScheme, n: usize) -> Vec<usize> {
    match scheme {
        MeshScheme::Clements => clements_slot_tops(n),
        MeshScheme::Reck => reck_slot_tops(n),
    }
}

impl MeshLayout {
    /// Build a layout from parts, validating the placement program against the
    /// scheme's canonical ordering.
    pub fn new(
        scheme: MeshScheme,
        n_modes: usize,
        placements: Vec<MziParams>,
        input_phases: Vec<f64>,
    ) -> Result<Self> {
        if n_modes < 2 {
            return Err(Error::InvalidArgument("mesh requires n_modes >= 2".into()));
        }
        let expected = n_modes * (n_modes - 1) / 2;
        if placements.len() != expected {
            return Err(Error::DimensionMismatch {
                context: "mesh placements",
                expected,
                got: placements.len(),
            });
        }
        if input_phases.len() != n_modes {
            return Err(Error::DimensionMismatch {
                context: "mesh input phases",
                expected: n_modes,
                got: input_phases.len(),
            });
        }
        if !input_phases.iter().all(|p| p.is_finite()) {
            return Err(Error::NonFinite("mesh input phases"));
        }
        let tops: Vec<usize> = placements.iter().map(|p| p.top()).collect();
        if tops != scheme_slot_tops(scheme, n_modes) {
            return Err(Error::InvalidArgument(format!(
                "placement order does not follow the {scheme:?} program for {n_modes} modes"
            )));
        }
        let input_phases = input_phases.into_iter().map(wrap_phase).collect();
        Ok(Self { n_modes, placements, input_phases, scheme })
    }

    /// Rectangular layout: n columns alternating between pairs (0,1),(2,3),...
    /// and (1,2),(3,4),..., initialized to the identity mesh
    /// (every MZI at (pi, pi), screen at zero).
    pub fn clements(n_modes: usize) -> Result<Self> {
        if n_modes < 2 {
            return Err(Error::InvalidArgument("clements layout requires n >= 2".into()));
        }
        let placements = clements_slot_tops(n_modes)
            .into_iter()
            .map(MziParams::identity)
            .collect();
        Self::new(MeshScheme::Clements, n_modes, placements, vec![0.0; n_modes])
    }

    /// Triangular layout with diagonals of sizes N-1, N-2, ..., 1, initialized
    /// to the identity mesh.
    pub fn reck(n_modes: usize) -> Result<Self> {
        if n_modes < 2 {
            return Err(Error::InvalidArgument("reck layout requires n >= 2".into()));
        }
        let placements = reck_slot_tops(n_modes)
            .into_iter()
            .map(MziParams::identity)
            .collect();
        Self::new(MeshScheme::Reck, n_modes, placements, vec![0.0; n_modes])
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn scheme(&self) -> MeshScheme {
        self.scheme
    }

    pub fn placements(&self) -> &[MziParams] {
        &self.placements
    }

    pub fn input_phases(&self) -> &[f64] {
        &self.input_phases
    }

    /// Number of stored phases: 2 per MZI plus N screen entries.
    pub fn phase_count(&self) -> usize {
        2 * self.placements.len() + self.n_modes
    }

    /// All phase slots in enumeration order: (theta, phi) per placement in
    /// program order, then the screen modes.
    pub fn slots(&self) -> Vec<PhaseSlot> {
        let mut out = Vec::with_capacity(self.phase_count());
        for k in 0..self.placements.len() {
            out.push(PhaseSlot::Theta(k));
            out.push(PhaseSlot::Phi(k));
        }
        for m in 0..self.n_modes {
            out.push(PhaseSlot::Screen(m));
        }
        out
    }

    pub fn get_phase(&self, slot: PhaseSlot) -> Result<f64> {
        match slot {
            PhaseSlot::Theta(k) => self
                .placements
                .get(k)
                .map(|p| p.theta())
                .ok_or_else(|| Error::BadParamRef(format!("theta placement {k}"))),
            PhaseSlot::Phi(k) => self
                .placements
                .get(k)
                .map(|p| p.phi())
                .ok_or_else(|| Error::BadParamRef(format!("phi placement {k}"))),
            PhaseSlot::Screen(m) => self
                .input_phases
                .get(m)
                .copied()
                .ok_or_else(|| Error::BadParamRef(format!("screen mode {m}"))),
        }
    }

    pub fn set_phase(&mut self, slot: PhaseSlot, value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::NonFinite("phase value"));
        }
        match slot {
            PhaseSlot::Theta(k) => self
                .placements
                .get_mut(k)
                .map(|p| p.set_theta(value))
                .ok_or_else(|| Error::BadParamRef(format!("theta placement {k}"))),
            PhaseSlot::Phi(k) => self
                .placements
                .get_mut(k)
                .map(|p| p.set_phi(value))
                .ok_or_else(|| Error::BadParamRef(format!("phi placement {k}"))),
            PhaseSlot::Screen(m) => {
                match self.input_phases.get_mut(m) {
                    Some(p) => {
                        *p = wrap_phase(value);
                        Ok(())
                    }
                    None => Err(Error::BadParamRef(format!("screen mode {m}"))),
                }
            }
        }
    }

    /// Apply the mesh to a field buffer in signal order, optionally
    /// substituting one stored phase with `over`.
    pub(crate) fn apply_to(&self, v: &mut [Complex64], over: Option<(PhaseSlot, f64)>) {
        debug_assert_eq!(v.len(), self.n_modes);
        for (m, &psi) in self.input_phases.iter().enumerate() {
            let angle = match over {
                Some((PhaseSlot::Screen(om), val)) if om == m => val,
                _ => psi,
            };
            v[m] *= Complex64::from_polar(1.0, angle);
        }
        for (k, p) in self.placements.iter().enumerate() {
            let theta = match over {
                Some((PhaseSlot::Theta(ok), val)) if ok == k => val,
                _ => p.theta(),
            };
            let phi = match over {
                Some((PhaseSlot::Phi(ok), val)) if ok == k => val,
                _ => p.phi(),
            };
            let t = p.top();
            apply_bs(v, t);
            apply_ps(v, t, theta);
            apply_bs(v, t);
            apply_ps(v, t, phi);
        }
    }

    /// Apply the mesh with the phase-shifter generator inserted at `slot`:
    /// the result is the derivative d(mesh(v))/d(phase), using
    /// dU_PS/dtheta = iG U_PS with G the projector onto the shifted rail.
    pub(crate) fn apply_with_generator(&self, v: &mut [Complex64], slot: PhaseSlot) {
        for (m, &psi) in self.input_phases.iter().enumerate() {
            v[m] *= Complex64::from_polar(1.0, psi);
        }
        if let PhaseSlot::Screen(mode) = slot {
            project_rail(v, mode);
        }
        for (k, p) in self.placements.iter().enumerate() {
            let t = p.top();
            apply_bs(v, t);
            apply_ps(v, t, p.theta());
            if slot == PhaseSlot::Theta(k) {
                project_rail(v, t);
            }
            apply_bs(v, t);
            apply_ps(v, t, p.phi());
            if slot == PhaseSlot::Phi(k) {
                project_rail(v, t);
            }
        }
    }
}

#[inline]
fn apply_bs(v: &mut [Complex64], top: usize) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let i = Complex64::new(0.0, 1.0);
    let (a, b) = (v[top], v[top + 1]);
    v[top] = (a + i * b) * s;
    v[top + 1] = (i * a + b) * s;
}

#[inline]
fn apply_ps(v: &mut [Complex64], top: usize, angle: f64) {
    v[top] *= Complex64::from_polar(1.0, angle);
}

/// iG applied to the buffer: zero everywhere except rail `m`, scaled by i.
#[inline]
fn project_rail(v: &mut [Complex64], m: usize) {
    let keep = v[m];
    for z in v.iter_mut() {
        *z = Complex64::new(0.0, 0.0);
    }
    v[m] = Complex64::new(0.0, 1.0) * keep;
}

/// The N x N unitary realized by a layout: the input screen followed by all
/// MZI blocks in program order.
pub fn mesh_unitary(layout: &MeshLayout) -> Result<UnitaryMatrix> {
    let n = layout.n_modes();
    let mut data = Array2::zeros((n, n));
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for col in 0..n {
        buf.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        buf[col] = Complex64::new(1.0, 0.0);
        layout.apply_to(&mut buf, None);
        for r in 0..n {
            data[[r, col]] = buf[r];
        }
    }
    UnitaryMatrix::new(CMatrix::from_array(data), 1e-10)
}

// ---------------------------------------------------------------------------
// Decomposition
// ---------------------------------------------------------------------------

fn mzi_entries(theta: f64, phi: f64) -> [[Complex64; 2]; 2] {
    let et = Complex64::from_polar(1.0, theta);
    let ep = Complex64::from_polar(1.0, phi);
    let i = Complex64::new(0.0, 1.0);
    let one = Complex64::new(1.0, 0.0);
    [
        [0.5 * ep * (et - one), 0.5 * i * ep * (one + et)],
        [0.5 * i * (et + one), 0.5 * (one - et)],
    ]
}

/// W <- W * T(theta, phi) embedded at columns (m, m+1).
fn right_mul_block(w: &mut Array2<Complex64>, m: usize, theta: f64, phi: f64) {
    let t = mzi_entries(theta, phi);
    for r in 0..w.nrows() {
        let (a, b) = (w[[r, m]], w[[r, m + 1]]);
        w[[r, m]] = a * t[0][0] + b * t[1][0];
        w[[r, m + 1]] = a * t[0][1] + b * t[1][1];
    }
}

/// W <- T(theta, phi)^dag * W embedded at rows (m, m+1).
fn left_mul_block_adjoint(w: &mut Array2<Complex64>, m: usize, theta: f64, phi: f64) {
    let t = mzi_entries(theta, phi);
    for c in 0..w.ncols() {
        let (a, b) = (w[[m, c]], w[[m + 1, c]]);
        w[[m, c]] = t[0][0].conj() * a + t[1][0].conj() * b;
        w[[m + 1, c]] = t[0][1].conj() * a + t[1][1].conj() * b;
    }
}

/// Phases nulling W[m+1, c] by a left T^dag op on rows (m, m+1).
/// `u` is the target entry, `v` the helper above it. A target already at
/// exactly zero falls to the identity MZI (pi, pi).
fn null_left_lower(u: Complex64, v: Complex64) -> (f64, f64) {
    if u.norm() == 0.0 {
        return (PI, PI);
    }
    let theta = 2.0 * f64::atan2(v.norm(), u.norm());
    let phi = wrap_phase(v.arg() - u.arg());
    (theta, phi)
}

/// Phases nulling W[r, m] by a right T op on columns (m, m+1).
/// `u` is the target entry, `v` the helper to its right.
fn null_right_left_col(u: Complex64, v: Complex64) -> (f64, f64) {
    if u.norm() == 0.0 {
        return (PI, PI);
    }
    let theta = 2.0 * f64::atan2(v.norm(), u.norm());
    let phi = wrap_phase(v.arg() + PI - u.arg());
    (theta, phi)
}

fn is_identity_op(theta: f64, phi: f64) -> bool {
    theta == PI && phi == PI
}

/// Reorder a program by commuting adjacent disjoint-pair placements until it
/// matches the canonical slot sequence. Placements on overlapping pairs keep
/// their relative order, so the product is unchanged.
fn canonicalize_program(
    ops: Vec<(usize, f64, f64)>,
    slots: &[usize],
) -> Result<Vec<(usize, f64, f64)>> {
    let mut rem = ops;
    let mut out = Vec::with_capacity(slots.len());
    for &t in slots {
        let mut found = None;
        for (idx, op) in rem.iter().enumerate() {
            if op.0 == t {
                let blocked = rem[..idx]
                    .iter()
                    .any(|e| (e.0 as isize - t as isize).abs() < 2);
                if !blocked {
                    found = Some(idx);
                }
                break;
            }
        }
        match found {
            Some(idx) => out.push(rem.remove(idx)),
            None => {
                return Err(Error::InvalidArgument(
                    "internal: decomposition program does not reorder to the canonical mesh"
                        .into(),
                ))
            }
        }
    }
    Ok(out)
}

fn validate_decompose_input(u: &CMatrix) -> Result<usize> {
    let residual = u.unitarity_residual()?;
    if residual > 1e-8 {
        return Err(Error::NotUnitary { residual, tol: 1e-8 });
    }
    let n = u.nrows();
    if n < 2 {
        return Err(Error::InvalidArgument("decomposition requires n >= 2".into()));
    }
    Ok(n)
}

fn screen_from_diagonal(w: &Array2<Complex64>) -> Vec<f64> {
    (0..w.nrows()).map(|k| w[[k, k]].arg()).collect()
}

/// Decompose a unitary into the rectangular mesh program.
///
/// Elements below the diagonal are nulled along anti-diagonals, alternating
/// between right ops (W * T) and left ops (T^dag * W); the left factors join
/// the program directly while the accumulated diagonal is swept through the
/// right factors with the exact rewrite
/// `D T^dag(theta, phi) = T(theta, alpha - beta) D'`.
pub fn clements_decompose(u: &CMatrix) -> Result<MeshLayout> {
    let n = validate_decompose_input(u)?;
    let mut w = u.data().clone();
    let mut a_ops: Vec<(usize, f64, f64)> = Vec::new();
    let mut b_ops: Vec<(usize, f64, f64)> = Vec::new();

    for i in 1..n {
        if i % 2 == 1 {
            for j in 0..i {
                let m = i - 1 - j;
                let r = n - 1 - j;
                let (theta, phi) = null_right_left_col(w[[r, m]], w[[r, m + 1]]);
                if !is_identity_op(theta, phi) {
                    right_mul_block(&mut w, m, theta, phi);
                }
                b_ops.push((m, theta, phi));
            }
        } else {
            for j in 1..=i {
                let m = n + j - i - 2;
                let c = j - 1;
                let (theta, phi) = null_left_lower(w[[m + 1, c]], w[[m, c]]);
                if !is_identity_op(theta, phi) {
                    left_mul_block_adjoint(&mut w, m, theta, phi);
                }
                a_ops.push((m, theta, phi));
            }
        }
    }

    let mut d = screen_from_diagonal(&w);

    // Sweep the diagonal rightward through the accumulated T^dag factors.
    let mut tilde: Vec<(usize, f64, f64)> = Vec::with_capacity(b_ops.len());
    for &(m, theta, phi) in b_ops.iter().rev() {
        let (alpha, beta) = (d[m], d[m + 1]);
        if is_identity_op(theta, phi) {
            tilde.push((m, PI, PI));
        } else if theta == PI {
            // the block is diagonal; fold its phase into the screen
            tilde.push((m, PI, PI));
            d[m] = alpha - phi - PI;
        } else {
            tilde.push((m, theta, wrap_phase(alpha - beta)));
            d[m] = beta - phi - theta - PI;
            d[m + 1] = beta - theta - PI;
        }
    }

    let mut prog: Vec<(usize, f64, f64)> = tilde.into_iter().rev().collect();
    prog.extend(a_ops.into_iter().rev());
    let prog = canonicalize_program(prog, &clements_slot_tops(n))?;

    let placements = prog
        .into_iter()
        .map(|(m, theta, phi)| MziParams::new(theta, phi, m))
        .collect();
    MeshLayout::new(MeshScheme::Clements, n, placements, d.into_iter().map(wrap_phase).collect())
}

/// Decompose a unitary into the triangular mesh program.
///
/// Columns are nulled bottom-up with left ops only, so the diagonal is
/// already on the input side and no sweep is needed.
pub fn reck_decompose(u: &CMatrix) -> Result<MeshLayout> {
    let n = validate_decompose_input(u)?;
    let mut w = u.data().clone();
    let mut a_ops: Vec<(usize, f64, f64)> = Vec::new();

    for c in 0..n - 1 {
        for r in (c + 1..n).rev() {
            let m = r - 1;
            let (theta, phi) = null_left_lower(w[[r, c]], w[[m, c]]);
            if !is_identity_op(theta, phi) {
                left_mul_block_adjoint(&mut w, m, theta, phi);
            }
            a_ops.push((m, theta, phi));
        }
    }

    let d = screen_from_diagonal(&w);
    let prog: Vec<(usize, f64, f64)> = a_ops.into_iter().rev().collect();
    let prog = canonicalize_program(prog, &reck_slot_tops(n))?;

    let placements = prog
        .into_iter()
        .map(|(m, theta, phi)| MziParams::new(theta, phi, m))
        .collect();
    MeshLayout::new(MeshScheme::Reck, n, placements, d.into_iter().map(wrap_phase).collect())
}

/// Dispatch on scheme.
pub fn decompose(scheme: MeshScheme, u: &CMatrix) -> Result<MeshLayout> {
    match scheme {
        MeshScheme::Clements => clements_decompose(u),
        MeshScheme::Reck => reck_decompose(u),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::components::mzi_unitary;
    use crate::field::random_unitary;
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::TAU;

    fn roundtrip_residual(u: &CMatrix, scheme: MeshScheme) -> f64 {
        let layout = decompose(scheme, u).unwrap();
        mesh_unitary(&layout).unwrap().frobenius_distance(u)
    }

    #[test]
    fn clements_layout_counts() {
        let l2 = MeshLayout::clements(2).unwrap();
        assert_eq!(l2.placements().len(), 1);
        assert_eq!(l2.placements()[0].top(), 0);

        let l4 = MeshLayout::clements(4).unwrap();
        assert_eq!(l4.placements().len(), 6);
        let tops: Vec<usize> = l4.placements().iter().map(|p| p.top()).collect();
        // columns of sizes 2, 1, 2, 1
        assert_eq!(tops, vec![0, 2, 1, 0, 2, 1]);

        assert_eq!(MeshLayout::clements(3).unwrap().placements().len(), 3);
        assert!(MeshLayout::clements(1).is_err());
    }

    #[test]
    fn reck_layout_counts() {
        assert_eq!(MeshLayout::reck(2).unwrap().placements().len(), 1);
        let l4 = MeshLayout::reck(4).unwrap();
        let tops: Vec<usize> = l4.placements().iter().map(|p| p.top()).collect();
        // diagonals of sizes 3, 2, 1
        assert_eq!(tops, vec![2, 1, 0, 2, 1, 2]);
        assert_eq!(MeshLayout::reck(5).unwrap().placements().len(), 10);
        assert!(MeshLayout::reck(0).is_err());
    }

    #[test]
    fn identity_layout_gives_identity_unitary() {
        for n in 2..=6 {
            for layout in [MeshLayout::clements(n).unwrap(), MeshLayout::reck(n).unwrap()] {
                let u = mesh_unitary(&layout).unwrap();
                let d = u.frobenius_distance(&CMatrix::identity(n));
                assert!(d < 1e-12, "n={n}: residual {d:.3e}");
            }
        }
    }

    #[test]
    fn single_mzi_mesh_matches_block() {
        let mut layout = MeshLayout::clements(2).unwrap();
        layout.set_phase(PhaseSlot::Theta(0), 0.0).unwrap();
        layout.set_phase(PhaseSlot::Phi(0), 0.0).unwrap();
        let u = mesh_unitary(&layout).unwrap();
        let expect = mzi_unitary(0.0, 0.0);
        assert!(u.frobenius_distance(expect.matrix()) < 1e-12);
    }

    #[test]
    fn random_phases_stay_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut layout = MeshLayout::clements(6).unwrap();
        for slot in layout.slots() {
            layout.set_phase(slot, rng.gen_range(0.0..TAU)).unwrap();
        }
        let u = mesh_unitary(&layout).unwrap();
        assert!(u.unitarity_residual().unwrap() < 1e-10);
    }

    #[test]
    fn decompose_identity_is_all_identity_mzis() {
        let layout = clements_decompose(&CMatrix::identity(4)).unwrap();
        for p in layout.placements() {
            assert_eq!((p.theta(), p.phi()), (PI, PI));
        }
        for &psi in layout.input_phases() {
            assert!(psi == 0.0 || (psi - TAU).abs() < 1e-12);
        }

        let layout = reck_decompose(&CMatrix::identity(3)).unwrap();
        for p in layout.placements() {
            assert_eq!((p.theta(), p.phi()), (PI, PI));
        }
        assert!(layout.input_phases().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn decompose_single_embedded_mzi() {
        let u = mzi_unitary(1.0, 0.5);
        let r = roundtrip_residual(u.matrix(), MeshScheme::Clements);
        assert!(r < 1e-10, "residual {r:.3e}");
        let layout = clements_decompose(u.matrix()).unwrap();
        assert!((layout.placements()[0].theta() - 1.0).abs() < 1e-12);
        assert!((layout.placements()[0].phi() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn decompose_roundtrip_examples() {
        let u8 = random_unitary(8, 11).unwrap();
        assert!(roundtrip_residual(u8.matrix(), MeshScheme::Clements) < 1e-8);

        let u5 = random_unitary(5, 2).unwrap();
        assert!(roundtrip_residual(u5.matrix(), MeshScheme::Reck) < 1e-8);

        let u2 = random_unitary(2, 77).unwrap();
        assert!(roundtrip_residual(u2.matrix(), MeshScheme::Reck) < 1e-10);
    }

    #[test]
    fn decompose_rejects_non_unitary() {
        let m = CMatrix::from_rows(vec![
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            vec![Complex64::new(0.0, 0.0), Complex64::new(2.0, 0.0)],
        ])
        .unwrap();
        let err = clements_decompose(&m).unwrap_err();
        assert!(err.to_string().contains("not unitary"));
    }

    #[test]
    fn mesh_is_two_pi_periodic_in_every_phase() {
        let u = random_unitary(4, 21).unwrap();
        let layout = clements_decompose(u.matrix()).unwrap();
        let base = mesh_unitary(&layout).unwrap();
        for slot in layout.slots() {
            let mut shifted = layout.clone();
            let v = shifted.get_phase(slot).unwrap();
            shifted.set_phase(slot, v + TAU).unwrap();
            let d = mesh_unitary(&shifted).unwrap().frobenius_distance(base.matrix());
            assert!(d < 1e-12, "{slot:?}: {d:.3e}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn decompose_roundtrip_haar(n in 2usize..8, seed in any::<u64>()) {
            let u = random_unitary(n, seed).unwrap();
            for scheme in [MeshScheme::Clements, MeshScheme::Reck] {
                let r = roundtrip_residual(u.matrix(), scheme);
                prop_assert!(r < 1e-8, "{scheme:?} n={n}: {r:.3e}");
            }
        }
    }
}
