//! Stabilizer tableau with one symbolically tracked logical qubit.
//!
//! The state is |Ψ⟩ = α|0_L⟩ + β|1_L⟩ inside the simultaneous +1 eigenspace
//! of the stabilizer rows, where the logical basis is fixed by the tracked
//! logical operator pair. Row bookkeeping keeps exact phases, so measurement
//! signs and recovered amplitudes carry no approximation. Destabilizer row i
//! anticommutes with stabilizer row i and commutes with every other row;
//! that pairing is what makes group-membership decomposition a sequence of
//! symplectic inner products.

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::css::CssCode;
use crate::gf2::{BitMatrix, BitVector};
use crate::pauli::PauliWord;

const EPS: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum TableauError {
    #[error("qubit index {q} out of range ({n} qubits)")]
    OutOfRange { q: usize, n: usize },
    #[error("branch syndrome is uncorrectable")]
    Uncorrectable,
    #[error("no live logical qubit")]
    NoLogical,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmplitudePair {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl AmplitudePair {
    pub fn new(alpha: Complex64, beta: Complex64) -> AmplitudePair {
        let pair = AmplitudePair { alpha, beta };
        debug_assert!((pair.norm_sq() - 1.0).abs() < 1e-9, "amplitudes not normalized");
        pair
    }

    pub fn zero() -> AmplitudePair {
        AmplitudePair::new(Complex64::ONE, Complex64::ZERO)
    }

    pub fn plus() -> AmplitudePair {
        let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        AmplitudePair::new(s, s)
    }

    pub fn norm_sq(&self) -> f64 {
        self.alpha.norm_sqr() + self.beta.norm_sqr()
    }

    /// |⟨self|other⟩|², insensitive to global phase. Clamped to [0, 1] so
    /// unit-norm rounding dust cannot push an exact match off 1.0.
    /// Inputs are unit vectors up to f64 rounding, so values within 1e-12 of
    /// the endpoints are normalization dust and snap to exact 0 or 1.
    pub fn fidelity(&self, other: &AmplitudePair) -> f64 {
        let f = (self.alpha.conj() * other.alpha + self.beta.conj() * other.beta)
            .norm_sqr()
            .clamp(0.0, 1.0);
        if f > 1.0 - 1e-12 {
            1.0
        } else if f < 1e-12 {
            0.0
        } else {
            f
        }
    }

    pub fn apply_x(&mut self) {
        std::mem::swap(&mut self.alpha, &mut self.beta);
    }

    pub fn apply_z(&mut self) {
        self.beta = -self.beta;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Determinism {
    Deterministic,
    Random,
    LogicalCollapse,
}

#[derive(Clone, Debug)]
pub struct MeasurementRecord {
    pub outcome: bool,
    pub determinism: Determinism,
}

#[derive(Clone, Debug)]
pub struct LogicalTableau {
    num_qubits: usize,
    stabs: Vec<PauliWord>,
    destabs: Vec<PauliWord>,
    logical_x: Option<PauliWord>,
    logical_z: Option<PauliWord>,
    amps: Option<AmplitudePair>,
}

/// Offset a word into a wider register.
fn embed(word: &BitVector, total: usize, offset: usize) -> BitVector {
    let mut out = BitVector::zeros(total);
    for i in word.support() {
        out.set(offset + i, true);
    }
    out
}

/// Scatter a block-local word onto arbitrary register positions.
pub fn embed_at(word: &BitVector, total: usize, positions: &[usize]) -> BitVector {
    let mut out = BitVector::zeros(total);
    for i in word.support() {
        out.set(positions[i], true);
    }
    out
}

impl LogicalTableau {
    pub fn empty() -> LogicalTableau {
        LogicalTableau {
            num_qubits: 0,
            stabs: Vec::new(),
            destabs: Vec::new(),
            logical_x: None,
            logical_z: None,
            amps: None,
        }
    }

    /// |0⟩^n product state.
    pub fn zero_state(n: usize) -> LogicalTableau {
        let stabs = (0..n).map(|q| PauliWord::single_z(n, q)).collect();
        let destabs = (0..n).map(|q| PauliWord::single_x(n, q)).collect();
        let t = LogicalTableau {
            num_qubits: n,
            stabs,
            destabs,
            logical_x: None,
            logical_z: None,
            amps: None,
        };
        t.debug_check();
        t
    }

    /// Code block carrying α|0_L⟩ + β|1_L⟩ with the symbolic logical qubit
    /// live.
    pub fn prepare_encoded_secret(css: &CssCode, amps: AmplitudePair) -> LogicalTableau {
        let n = css.n();
        let (mut stabs, mut destabs) = css_rows(css);
        debug_assert_eq!(stabs.len(), n - 1);
        let logical_z = PauliWord::from_xz(BitVector::zeros(n), css.logical_z().clone());
        let logical_x = PauliWord::from_xz(css.logical_x().clone(), BitVector::zeros(n));
        let t = LogicalTableau {
            num_qubits: n,
            stabs: std::mem::take(&mut stabs),
            destabs: std::mem::take(&mut destabs),
            logical_x: Some(logical_x),
            logical_z: Some(logical_z),
            amps: Some(amps),
        };
        t.debug_check();
        t
    }

    /// Fully stabilized logical |0⟩: the logical phase-flip joins the
    /// stabilizer group.
    pub fn prepare_logical_zero(css: &CssCode) -> LogicalTableau {
        Self::prepare_logical_eigenstate(css, false)
    }

    /// Fully stabilized logical |+⟩: the logical bit-flip joins the group.
    pub fn prepare_logical_plus(css: &CssCode) -> LogicalTableau {
        Self::prepare_logical_eigenstate(css, true)
    }

    fn prepare_logical_eigenstate(css: &CssCode, plus: bool) -> LogicalTableau {
        let n = css.n();
        let (mut stabs, mut destabs) = css_rows(css);
        if plus {
            stabs.push(PauliWord::from_xz(
                css.logical_x().clone(),
                BitVector::zeros(n),
            ));
            destabs.push(PauliWord::from_xz(
                BitVector::zeros(n),
                css.logical_z().clone(),
            ));
        } else {
            stabs.push(PauliWord::from_xz(
                BitVector::zeros(n),
                css.logical_z().clone(),
            ));
            destabs.push(PauliWord::from_xz(
                css.logical_x().clone(),
                BitVector::zeros(n),
            ));
        }
        let t = LogicalTableau {
            num_qubits: n,
            stabs,
            destabs,
            logical_x: None,
            logical_z: None,
            amps: None,
        };
        t.debug_check();
        t
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn logical_live(&self) -> bool {
        self.amps.is_some()
    }

    pub fn amplitudes(&self) -> Option<AmplitudePair> {
        self.amps
    }

    pub fn set_amplitudes(&mut self, amps: AmplitudePair) {
        debug_assert!(self.amps.is_some());
        self.amps = Some(amps);
    }

    pub fn stabilizers(&self) -> &[PauliWord] {
        &self.stabs
    }

    pub fn logical_ops(&self) -> Option<(&PauliWord, &PauliWord)> {
        Some((self.logical_x.as_ref()?, self.logical_z.as_ref()?))
    }

    /// Absorb another tableau as fresh qubits appended on the right. At most
    /// one of the two may carry a live logical qubit.
    pub fn append(&mut self, other: LogicalTableau) {
        assert!(
            !(self.logical_live() && other.logical_live()),
            "only one symbolic logical qubit is supported"
        );
        let off = self.num_qubits;
        let total = off + other.num_qubits;
        let widen = |w: &PauliWord, at: usize| -> PauliWord {
            let mut p = PauliWord::from_xz(embed(&w.x, total, at), embed(&w.z, total, at));
            p.phase = w.phase;
            p
        };
        for row in &mut self.stabs {
            row.extend(other.num_qubits);
        }
        for row in &mut self.destabs {
            row.extend(other.num_qubits);
        }
        if let Some(l) = &mut self.logical_x {
            l.extend(other.num_qubits);
        }
        if let Some(l) = &mut self.logical_z {
            l.extend(other.num_qubits);
        }
        for row in &other.stabs {
            self.stabs.push(widen(row, off));
        }
        for row in &other.destabs {
            self.destabs.push(widen(row, off));
        }
        if other.logical_live() {
            self.logical_x = other.logical_x.as_ref().map(|l| widen(l, off));
            self.logical_z = other.logical_z.as_ref().map(|l| widen(l, off));
            self.amps = other.amps;
        }
        self.num_qubits = total;
        self.debug_check();
    }

    fn all_rows_mut(&mut self) -> impl Iterator<Item = &mut PauliWord> {
        self.stabs
            .iter_mut()
            .chain(self.destabs.iter_mut())
            .chain(self.logical_x.iter_mut())
            .chain(self.logical_z.iter_mut())
    }

    pub fn apply_h(&mut self, q: usize) {
        assert!(q < self.num_qubits);
        for row in self.all_rows_mut() {
            row.conj_h(q);
        }
        self.debug_check();
    }

    pub fn apply_s(&mut self, q: usize) {
        assert!(q < self.num_qubits);
        for row in self.all_rows_mut() {
            row.conj_s(q);
        }
        self.debug_check();
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) {
        assert!(control < self.num_qubits && target < self.num_qubits && control != target);
        for row in self.all_rows_mut() {
            row.conj_cnot(control, target);
        }
        self.debug_check();
    }

    /// Conjugating by a Pauli flips the sign of every row anticommuting
    /// with it.
    pub fn apply_pauli(&mut self, p: &PauliWord) {
        assert_eq!(p.len(), self.num_qubits);
        for row in self.all_rows_mut() {
            if row.anticommutes(p) {
                row.negate();
            }
        }
    }

    pub fn apply_x(&mut self, q: usize) {
        let p = PauliWord::single_x(self.num_qubits, q);
        self.apply_pauli(&p);
    }

    pub fn apply_z(&mut self, q: usize) {
        let p = PauliWord::single_z(self.num_qubits, q);
        self.apply_pauli(&p);
    }

    /// Decompose a word commuting with every stabilizer over the row basis:
    /// returns (stabilizer coefficient mask, logical_x coeff, logical_z
    /// coeff) read off by symplectic pairing.
    fn pair_decompose(&self, p: &PauliWord) -> (Vec<bool>, bool, bool) {
        let coeffs = self.destabs.iter().map(|d| d.anticommutes(p)).collect();
        let a = self
            .logical_z
            .as_ref()
            .is_some_and(|lz| lz.anticommutes(p));
        let b = self
            .logical_x
            .as_ref()
            .is_some_and(|lx| lx.anticommutes(p));
        (coeffs, a, b)
    }

    /// Measure a Hermitian word. `forced` pins the outcome (for oracle
    /// cross-checks); sampling honors the Born rule otherwise.
    pub fn measure_pauli<R: Rng + ?Sized>(
        &mut self,
        p: &PauliWord,
        rng: &mut R,
        forced: Option<bool>,
    ) -> MeasurementRecord {
        assert_eq!(p.len(), self.num_qubits);
        if let Some(pivot) = self.stabs.iter().position(|s| s.anticommutes(p)) {
            let outcome = forced.unwrap_or_else(|| rng.gen());
            let pivot_row = self.stabs[pivot].clone();
            for i in 0..self.stabs.len() {
                if i != pivot && self.stabs[i].anticommutes(p) {
                    self.stabs[i].mul_assign(&pivot_row);
                }
            }
            for d in &mut self.destabs {
                if d.anticommutes(p) {
                    d.mul_assign(&pivot_row);
                }
            }
            for l in self.logical_x.iter_mut().chain(self.logical_z.iter_mut()) {
                if l.anticommutes(p) {
                    l.mul_assign(&pivot_row);
                }
            }
            self.destabs[pivot] = pivot_row;
            let mut new_stab = p.clone();
            if outcome {
                new_stab.negate();
            }
            self.stabs[pivot] = new_stab;
            self.debug_check();
            return MeasurementRecord {
                outcome,
                determinism: Determinism::Random,
            };
        }

        let (coeffs, a, b) = self.pair_decompose(p);
        if !a && !b {
            // Pure stabilizer-group element: sign comparison is exact.
            let mut r = PauliWord::identity(self.num_qubits);
            for (i, &c) in coeffs.iter().enumerate() {
                if c {
                    r.mul_assign(&self.stabs[i]);
                }
            }
            debug_assert_eq!((r.x.clone(), r.z.clone()), (p.x.clone(), p.z.clone()));
            let outcome = (r.phase + 4 - p.phase) % 4 == 2;
            debug_assert!(forced.is_none_or(|f| f == outcome));
            return MeasurementRecord {
                outcome,
                determinism: Determinism::Deterministic,
            };
        }

        // Logical-revealing measurement: P = i^m · S · Lz^b · Lx^a, which
        // acts on the amplitude pair as i^m Z^b X^a.
        let amps = self.amps.expect("logical component implies live logical");
        let mut r = PauliWord::identity(self.num_qubits);
        for (i, &c) in coeffs.iter().enumerate() {
            if c {
                r.mul_assign(&self.stabs[i]);
            }
        }
        if b {
            r.mul_assign(self.logical_z.as_ref().unwrap());
        }
        if a {
            r.mul_assign(self.logical_x.as_ref().unwrap());
        }
        debug_assert_eq!((r.x.clone(), r.z.clone()), (p.x.clone(), p.z.clone()));
        let m = (p.phase + 4 - r.phase) % 4;
        let phase = match m {
            0 => Complex64::ONE,
            1 => Complex64::I,
            2 => -Complex64::ONE,
            _ => -Complex64::I,
        };
        // 2x2 matrix of Z^b X^a times the phase.
        let (m00, m01, m10, m11) = match (a, b) {
            (false, false) => unreachable!(),
            (true, false) => (Complex64::ZERO, Complex64::ONE, Complex64::ONE, Complex64::ZERO),
            (false, true) => (Complex64::ONE, Complex64::ZERO, Complex64::ZERO, -Complex64::ONE),
            (true, true) => (Complex64::ZERO, Complex64::ONE, -Complex64::ONE, Complex64::ZERO),
        };
        let (m00, m01, m10, m11) = (phase * m00, phase * m01, phase * m10, phase * m11);
        let exp = (amps.alpha.conj() * (m00 * amps.alpha + m01 * amps.beta)
            + amps.beta.conj() * (m10 * amps.alpha + m11 * amps.beta))
            .re;
        let p_plus = ((1.0 + exp) / 2.0).clamp(0.0, 1.0);
        let outcome = match forced {
            Some(o) => o,
            None => rng.gen::<f64>() >= p_plus,
        };
        let sgn = if outcome { -1.0 } else { 1.0 };
        let na = 0.5 * (amps.alpha + sgn * (m00 * amps.alpha + m01 * amps.beta));
        let nb = 0.5 * (amps.beta + sgn * (m10 * amps.alpha + m11 * amps.beta));
        assert!(
            (na.norm_sqr() + nb.norm_sqr()).sqrt() > EPS,
            "collapse onto a zero-probability outcome"
        );
        // The logical qubit dies: the measured word joins the stabilizer
        // group with an anticommuting logical operator as its destabilizer;
        // the collapsed state is fully captured by the new stabilizer row.
        let d = if a {
            self.logical_z.take().unwrap()
        } else {
            self.logical_x.take().unwrap()
        };
        self.logical_x = None;
        self.logical_z = None;
        self.amps = None;
        for row in &mut self.destabs {
            if row.anticommutes(p) {
                row.mul_assign(&d);
            }
        }
        let mut new_stab = p.clone();
        if outcome {
            new_stab.negate();
        }
        self.stabs.push(new_stab);
        self.destabs.push(d);

        self.debug_check();
        MeasurementRecord {
            outcome,
            determinism: Determinism::LogicalCollapse,
        }
    }

    pub fn measure_z<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> MeasurementRecord {
        let p = PauliWord::single_z(self.num_qubits, q);
        self.measure_pauli(&p, rng, None)
    }

    /// Sign of a Hermitian word lying in ± the stabilizer group: Some(false)
    /// for +, Some(true) for −, None when the word is outside the group.
    pub fn group_sign(&self, p: &PauliWord) -> Option<bool> {
        if self.stabs.iter().any(|s| s.anticommutes(p)) {
            return None;
        }
        let (coeffs, a, b) = self.pair_decompose(p);
        if a || b {
            return None;
        }
        let mut r = PauliWord::identity(self.num_qubits);
        for (i, &c) in coeffs.iter().enumerate() {
            if c {
                r.mul_assign(&self.stabs[i]);
            }
        }
        if (r.x.clone(), r.z.clone()) != (p.x.clone(), p.z.clone()) {
            return None;
        }
        Some((r.phase + 4 - p.phase) % 4 == 2)
    }

    /// Sign carried by a logical representative: for a word equal to
    /// ±S·(logical op), returns the ± bit. None if the word is not of that
    /// shape.
    pub fn logical_rep_sign(&self, p: &PauliWord, z_type: bool) -> Option<bool> {
        if self.stabs.iter().any(|s| s.anticommutes(p)) {
            return None;
        }
        let (coeffs, a, b) = self.pair_decompose(p);
        if z_type && (!b || a) {
            return None;
        }
        if !z_type && (!a || b) {
            return None;
        }
        let mut r = PauliWord::identity(self.num_qubits);
        for (i, &c) in coeffs.iter().enumerate() {
            if c {
                r.mul_assign(&self.stabs[i]);
            }
        }
        if b {
            r.mul_assign(self.logical_z.as_ref()?);
        }
        if a {
            r.mul_assign(self.logical_x.as_ref()?);
        }
        if (r.x.clone(), r.z.clone()) != (p.x.clone(), p.z.clone()) {
            return None;
        }
        Some((r.phase + 4 - p.phase) % 4 == 2)
    }

    /// Drop a qubit whose state is a known ±Z eigenstate (i.e. ±Z_q is in
    /// the stabilizer group, as after a Z measurement). Keeps the tableau at
    /// O(live qubits) width.
    pub fn retire_qubit(&mut self, q: usize) {
        let zq = PauliWord::single_z(self.num_qubits, q);
        debug_assert!(self.stabs.iter().all(|s| !s.anticommutes(&zq)));
        let (coeffs, a, b) = self.pair_decompose(&zq);
        assert!(!a && !b, "retiring a qubit that still carries logical data");
        let members: Vec<usize> = coeffs
            .iter()
            .enumerate()
            .filter_map(|(i, &c)| c.then_some(i))
            .collect();
        let pivot = *members.first().expect("±Z_q must be in the group");
        // Fold the remaining members into the pivot row; each stabilizer
        // transvection pairs with the inverse destabilizer transvection.
        for &i in &members[1..] {
            let row = self.stabs[i].clone();
            self.stabs[pivot].mul_assign(&row);
            let dp = self.destabs[pivot].clone();
            self.destabs[i].mul_assign(&dp);
        }
        debug_assert!(self.stabs[pivot].x.is_zero());
        debug_assert_eq!(self.stabs[pivot].z.support(), vec![q]);
        // Clear the retired column from every other row.
        let zrow = self.stabs[pivot].clone();
        for i in 0..self.stabs.len() {
            if i != pivot && self.stabs[i].z.get(q) {
                self.stabs[i].mul_assign(&zrow);
            }
        }
        for i in 0..self.destabs.len() {
            if i != pivot && self.destabs[i].z.get(q) {
                self.destabs[i].mul_assign(&zrow);
            }
        }
        for l in self.logical_x.iter_mut().chain(self.logical_z.iter_mut()) {
            if l.z.get(q) {
                l.mul_assign(&zrow);
            }
        }
        self.stabs.remove(pivot);
        self.destabs.remove(pivot);
        for row in self.all_rows_mut() {
            row.remove_qubit(q);
        }
        self.num_qubits -= 1;
        self.debug_check();
    }

    /// Decode one code block in place: measure the block's stabilizer
    /// generators, bounded-distance infer the Pauli error, undo it, then read
    /// the block's logical-operator signs and fold them into the amplitude
    /// pair. Consumes nothing; the block is left corrected.
    pub fn extract_logical<R: Rng + ?Sized>(
        &mut self,
        css: &CssCode,
        offset: usize,
        rng: &mut R,
    ) -> Result<AmplitudePair, TableauError> {
        let n = self.num_qubits;
        self.correct_block(css, offset, rng)?;

        let lz = PauliWord::from_xz(
            BitVector::zeros(n),
            embed(css.logical_z(), n, offset),
        );
        let lx = PauliWord::from_xz(
            embed(css.logical_x(), n, offset),
            BitVector::zeros(n),
        );
        let ez = self.logical_rep_sign(&lz, true).ok_or(TableauError::Uncorrectable)?;
        let ex = self.logical_rep_sign(&lx, false).ok_or(TableauError::Uncorrectable)?;
        let mut amps = self.amps.ok_or(TableauError::NoLogical)?;
        if ez {
            amps.apply_x();
        }
        if ex {
            amps.apply_z();
        }
        Ok(amps)
    }

    /// Measure a block's stabilizer generators and apply the inferred Pauli
    /// correction. Returns the corrected error's (x, z) supports within the
    /// block.
    pub fn correct_block<R: Rng + ?Sized>(
        &mut self,
        css: &CssCode,
        offset: usize,
        rng: &mut R,
    ) -> Result<(Vec<usize>, Vec<usize>), TableauError> {
        let positions: Vec<usize> = (offset..offset + css.n()).collect();
        self.correct_block_at(css, &positions, rng)
    }

    /// Same as correct_block for a block scattered over arbitrary register
    /// positions; returned supports are block-local.
    pub fn correct_block_at<R: Rng + ?Sized>(
        &mut self,
        css: &CssCode,
        positions: &[usize],
        rng: &mut R,
    ) -> Result<(Vec<usize>, Vec<usize>), TableauError> {
        let n = self.num_qubits;
        let mut syn_z = BitVector::zeros(css.z_stabilizers().rows());
        for (i, a) in css.z_stabilizers().row_iter().enumerate() {
            let p = PauliWord::from_xz(BitVector::zeros(n), embed_at(a, n, positions));
            let rec = self.measure_pauli(&p, rng, None);
            syn_z.set(i, rec.outcome);
        }
        let mut syn_x = BitVector::zeros(css.x_stabilizers().rows());
        for (i, b) in css.x_stabilizers().row_iter().enumerate() {
            let p = PauliWord::from_xz(embed_at(b, n, positions), BitVector::zeros(n));
            let rec = self.measure_pauli(&p, rng, None);
            syn_x.set(i, rec.outcome);
        }
        // Z-type stabilizer violations locate bit flips (syndrome over V's
        // parity check); X-type violations locate phase flips (over W's).
        let e_x = css.code_v().coset_leader(&syn_z).ok_or(TableauError::Uncorrectable)?;
        let e_z = css.code_w().coset_leader(&syn_x).ok_or(TableauError::Uncorrectable)?;
        let correction =
            PauliWord::from_xz(embed_at(&e_x, n, positions), embed_at(&e_z, n, positions));
        self.apply_pauli(&correction);
        Ok((e_x.support(), e_z.support()))
    }

    /// Debug dump: one signed word per line, stabilizers, destabilizers,
    /// then logicals.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for row in &self.stabs {
            s.push_str(&format!("S {row}\n"));
        }
        for row in &self.destabs {
            s.push_str(&format!("D {row}\n"));
        }
        if let Some(l) = &self.logical_x {
            s.push_str(&format!("LX {l}\n"));
        }
        if let Some(l) = &self.logical_z {
            s.push_str(&format!("LZ {l}\n"));
        }
        s
    }

    /// Structural invariants; checked only in debug builds and only for
    /// small tableaux, since the protocol calls operations in tight loops.
    fn debug_check(&self) {
        if !cfg!(debug_assertions) || self.num_qubits > 24 {
            return;
        }
        let live = usize::from(self.logical_live());
        assert_eq!(self.stabs.len() + live, self.num_qubits);
        assert_eq!(self.destabs.len(), self.stabs.len());
        for (i, s) in self.stabs.iter().enumerate() {
            for s2 in &self.stabs[i + 1..] {
                assert!(!s.anticommutes(s2), "stabilizers must commute");
            }
            for (j, d) in self.destabs.iter().enumerate() {
                assert_eq!(d.anticommutes(s), i == j, "pairing broken at ({i},{j})");
            }
            assert_eq!(s.sign().abs(), 1);
        }
        if let (Some(lx), Some(lz)) = (&self.logical_x, &self.logical_z) {
            assert!(lx.anticommutes(lz));
            for s in &self.stabs {
                assert!(!lx.anticommutes(s) && !lz.anticommutes(s));
            }
            for d in &self.destabs {
                assert!(!lx.anticommutes(d) && !lz.anticommutes(d));
            }
            let amps = self.amps.expect("live logical needs amplitudes");
            assert!((amps.norm_sq() - 1.0).abs() < 1e-9);
        }
    }
}

/// Stabilizer and destabilizer rows shared by every code-block preparation:
/// Z-type rows from dual(V), X-type rows from dual(W), with destabilizers
/// solved to hit exactly one row each while commuting with the logical pair.
fn css_rows(css: &CssCode) -> (Vec<PauliWord>, Vec<PauliWord>) {
    let n = css.n();
    let mut stabs = Vec::new();
    let mut destabs = Vec::new();
    // X^c destabilizer for Z-type row i: dual(V)·c = e_i, logical_z·c = 0.
    let mut a_z = css.z_stabilizers().clone();
    a_z.push_row(css.logical_z().clone());
    let m_z = css.z_stabilizers().rows();
    for i in 0..m_z {
        stabs.push(PauliWord::from_xz(
            BitVector::zeros(n),
            css.z_stabilizers().row(i).clone(),
        ));
        let rhs = BitVector::unit(m_z + 1, i);
        let c = a_z.solve(&rhs).expect("full-rank system");
        destabs.push(PauliWord::from_xz(c, BitVector::zeros(n)));
    }
    // Z^d destabilizer for X-type row i: dual(W)·d = e_i, logical_x·d = 0.
    let mut a_x = css.x_stabilizers().clone();
    a_x.push_row(css.logical_x().clone());
    let m_x = css.x_stabilizers().rows();
    for i in 0..m_x {
        stabs.push(PauliWord::from_xz(
            css.x_stabilizers().row(i).clone(),
            BitVector::zeros(n),
        ));
        let rhs = BitVector::unit(m_x + 1, i);
        let d = a_x.solve(&rhs).expect("full-rank system");
        destabs.push(PauliWord::from_xz(BitVector::zeros(n), d));
    }
    (stabs, destabs)
}

/// Synthesize an encoding circuit for the block: a gate list mapping
/// α|0⟩ + β|1⟩ on qubit `input` (|0⟩ elsewhere) to the encoded block state.
/// Returned gates reference block-local indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    H(usize),
    Cnot(usize, usize),
}

pub fn encoding_circuit(css: &CssCode) -> (usize, Vec<Gate>) {
    let (rref, pivots, rank) = css.x_stabilizers().rref();
    // A logical-x representative cleared at the pivots serves as the fan-out
    // pattern from the input qubit.
    let reduced = BitMatrix::from_rows(rref.row_iter().take(rank).cloned().collect());
    let lx = reduced.reduce(css.logical_x());
    let input = lx.leading_bit().expect("logical rep survives reduction");
    let mut gates = Vec::new();
    for j in lx.support() {
        if j != input {
            gates.push(Gate::Cnot(input, j));
        }
    }
    for (r, &p) in pivots.iter().enumerate() {
        gates.push(Gate::H(p));
        for j in reduced.row(r).support() {
            if j != p {
                gates.push(Gate::Cnot(p, j));
            }
        }
    }
    (input, gates)
}

impl LogicalTableau {
    pub fn apply_gates(&mut self, gates: &[Gate], offset: usize) {
        for g in gates {
            match *g {
                Gate::H(q) => self.apply_h(offset + q),
                Gate::Cnot(c, t) => self.apply_cnot(offset + c, offset + t),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::css::steane_code;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn zero_state_measurements() {
        let mut t = LogicalTableau::zero_state(3);
        let mut r = rng(1);
        for q in 0..3 {
            let rec = t.measure_z(q, &mut r);
            assert_eq!(rec.determinism, Determinism::Deterministic);
            assert!(!rec.outcome);
        }
    }

    #[test]
    fn plus_state_random_then_repeatable() {
        let mut t = LogicalTableau::zero_state(1);
        t.apply_h(0);
        let mut r = rng(7);
        let rec = t.measure_z(0, &mut r);
        assert_eq!(rec.determinism, Determinism::Random);
        let rec2 = t.measure_z(0, &mut r);
        assert_eq!(rec2.determinism, Determinism::Deterministic);
        assert_eq!(rec.outcome, rec2.outcome);
    }

    #[test]
    fn bell_state_correlations() {
        let mut r = rng(3);
        for seed in 0..20 {
            let mut t = LogicalTableau::zero_state(2);
            t.apply_h(0);
            t.apply_cnot(0, 1);
            let _ = seed;
            let a = t.measure_z(0, &mut r);
            let b = t.measure_z(1, &mut r);
            assert_eq!(a.outcome, b.outcome);
            assert_eq!(b.determinism, Determinism::Deterministic);
        }
    }

    #[test]
    fn logical_zero_measures_w_dual_codewords() {
        let css = steane_code();
        let w_dual = css.code_w().dual();
        let mut r = rng(11);
        for _ in 0..50 {
            let mut t = LogicalTableau::prepare_logical_zero(&css);
            let mut bits = BitVector::zeros(7);
            for q in 0..7 {
                bits.set(q, t.measure_z(q, &mut r).outcome);
            }
            assert!(w_dual.contains(&bits).unwrap());
        }
    }

    #[test]
    fn logical_plus_measures_v_codewords() {
        let css = steane_code();
        let mut r = rng(12);
        let mut seen = std::collections::HashSet::new();
        for _ in 0..400 {
            let mut t = LogicalTableau::prepare_logical_plus(&css);
            let mut bits = BitVector::zeros(7);
            for q in 0..7 {
                bits.set(q, t.measure_z(q, &mut r).outcome);
            }
            assert!(css.code_v().contains(&bits).unwrap());
            seen.insert(bits.to_bits());
        }
        // Uniform over all 16 codewords: all should appear in 400 draws.
        assert_eq!(seen.len(), 16);
    }

    #[test]
    fn hadamard_all_on_logical_zero_gives_w() {
        let css = steane_code();
        let mut r = rng(13);
        for _ in 0..50 {
            let mut t = LogicalTableau::prepare_logical_zero(&css);
            for q in 0..7 {
                t.apply_h(q);
            }
            let mut bits = BitVector::zeros(7);
            for q in 0..7 {
                bits.set(q, t.measure_z(q, &mut r).outcome);
            }
            assert!(css.code_w().contains(&bits).unwrap());
        }
    }

    #[test]
    fn encoded_secret_z_readout_follows_born_rule() {
        let css = steane_code();
        let amps = AmplitudePair::new(
            Complex64::new(0.3f64.sqrt(), 0.0),
            Complex64::new(0.7f64.sqrt(), 0.0),
        );
        let mut r = rng(21);
        let mut zeros = 0u32;
        let trials = 10_000;
        for _ in 0..trials {
            let mut t = LogicalTableau::prepare_encoded_secret(&css, amps);
            let mut bits = BitVector::zeros(7);
            for q in 0..7 {
                bits.set(q, t.measure_z(q, &mut r).outcome);
            }
            assert!(css.code_v().contains(&bits).unwrap());
            if !css.logical_bit_of(&bits) {
                zeros += 1;
            }
        }
        let freq = f64::from(zeros) / f64::from(trials);
        assert!((freq - 0.3).abs() < 0.02, "freq {freq}");
    }

    #[test]
    fn encoding_circuit_matches_prepared_block() {
        // Encode via the circuit and via direct preparation; both tableaux
        // must assign the same deterministic signs to all stabilizers and
        // logical representatives.
        let css = steane_code();
        let (input, gates) = encoding_circuit(&css);
        let amps = AmplitudePair::plus();
        let mut t = LogicalTableau::zero_state(6);
        t.append(single_qubit_block(amps));
        // Move the symbolic qubit to position `input` via swaps (CNOT×3).
        let from = 6;
        if input != from {
            t.apply_cnot(from, input);
            t.apply_cnot(input, from);
            t.apply_cnot(from, input);
        }
        t.apply_gates(&gates, 0);
        let direct = LogicalTableau::prepare_encoded_secret(&css, amps);
        for s in direct.stabilizers() {
            assert_eq!(t.group_sign(s), Some(false), "stab {s}");
        }
        let (lx, lz) = direct.logical_ops().unwrap();
        assert_eq!(t.logical_rep_sign(lz, true), Some(false));
        assert_eq!(t.logical_rep_sign(lx, false), Some(false));
    }

    fn single_qubit_block(amps: AmplitudePair) -> LogicalTableau {
        LogicalTableau {
            num_qubits: 1,
            stabs: Vec::new(),
            destabs: Vec::new(),
            logical_x: Some(PauliWord::single_x(1, 0)),
            logical_z: Some(PauliWord::single_z(1, 0)),
            amps: Some(amps),
        }
    }

    #[test]
    fn extract_round_trip() {
        let css = steane_code();
        let amps = AmplitudePair::new(
            Complex64::new(0.6, 0.0),
            Complex64::new(0.0, 0.8),
        );
        let mut t = LogicalTableau::prepare_encoded_secret(&css, amps);
        let mut r = rng(31);
        let got = t.extract_logical(&css, 0, &mut r).unwrap();
        assert!((got.fidelity(&amps) - 1.0).abs() < EPS);
    }

    #[test]
    fn extract_after_single_pauli_error() {
        let css = steane_code();
        let amps = AmplitudePair::new(
            Complex64::new(0.8, 0.0),
            Complex64::new(0.6, 0.0),
        );
        for q in 0..7 {
            for kind in 0..3 {
                let mut t = LogicalTableau::prepare_encoded_secret(&css, amps);
                match kind {
                    0 => t.apply_x(q),
                    1 => t.apply_z(q),
                    _ => {
                        t.apply_x(q);
                        t.apply_z(q);
                    }
                }
                let mut r = rng(41 + q as u64);
                let got = t.extract_logical(&css, 0, &mut r).unwrap();
                assert!((got.fidelity(&amps) - 1.0).abs() < EPS, "q={q} kind={kind}");
            }
        }
    }

    #[test]
    fn double_error_extracts_wrong_state() {
        // Weight 2 exceeds the correction radius: decoding "succeeds" but to
        // a logically flipped block whenever the residual crosses a logical
        // representative.
        let css = steane_code();
        let amps = AmplitudePair::zero();
        let mut t = LogicalTableau::prepare_encoded_secret(&css, amps);
        t.apply_x(0);
        t.apply_x(1);
        let mut r = rng(51);
        let got = t.extract_logical(&css, 0, &mut r).unwrap();
        // Residual error (weight 3, a logical-x rep) flips the logical bit.
        assert!(got.fidelity(&amps) < EPS);
    }

    #[test]
    fn transversal_cnot_into_plus_preserves_amplitudes() {
        let css = steane_code();
        let (a, b) = (Complex64::new(0.28, -0.45), Complex64::new(0.7, 0.48));
        let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let amps = AmplitudePair::new(a / norm, b / norm);
        let mut t = LogicalTableau::prepare_encoded_secret(&css, amps);
        t.append(LogicalTableau::prepare_logical_plus(&css));
        for q in 0..7 {
            t.apply_cnot(q, 7 + q);
        }
        let mut r = rng(61);
        let got = t.extract_logical(&css, 0, &mut r).unwrap();
        assert!((got.fidelity(&amps) - 1.0).abs() < EPS);
    }

    #[test]
    fn retire_measured_qubits() {
        let mut t = LogicalTableau::zero_state(4);
        t.apply_h(0);
        t.apply_cnot(0, 1);
        let mut r = rng(71);
        let a = t.measure_z(0, &mut r);
        t.retire_qubit(0);
        assert_eq!(t.num_qubits(), 3);
        // Former qubit 1 (now 0) is perfectly correlated.
        let b = t.measure_z(0, &mut r);
        assert_eq!(b.determinism, Determinism::Deterministic);
        assert_eq!(a.outcome, b.outcome);
    }

    #[test]
    fn retire_inside_encoded_block() {
        let css = steane_code();
        let amps = AmplitudePair::plus();
        let mut t = LogicalTableau::prepare_encoded_secret(&css, amps);
        let mut r = rng(81);
        // Fourier-basis measurement of one qubit leaves the logical intact
        // only if it is not logically revealing; a plain Z measurement of a
        // single data qubit is safe for |+_L⟩ since Z_q is not logical here.
        let rec = t.measure_z(0, &mut r);
        assert_eq!(rec.determinism, Determinism::Random);
        t.retire_qubit(0);
        assert_eq!(t.num_qubits(), 6);
        assert!(t.logical_live());
    }

    #[test]
    fn logical_collapse_case() {
        let css = steane_code();
        let amps = AmplitudePair::new(
            Complex64::new(0.3f64.sqrt(), 0.0),
            Complex64::new(0.7f64.sqrt(), 0.0),
        );
        let mut ones = 0u32;
        let trials = 10_000u32;
        let mut r = rng(91);
        for _ in 0..trials {
            let mut t = LogicalTableau::prepare_encoded_secret(&css, amps);
            let p = PauliWord::from_xz(BitVector::zeros(7), css.logical_z().clone());
            let rec = t.measure_pauli(&p, &mut r, None);
            assert_eq!(rec.determinism, Determinism::LogicalCollapse);
            assert!(!t.logical_live());
            if rec.outcome {
                ones += 1;
            }
            // Remeasuring is deterministic and consistent.
            let rec2 = t.measure_pauli(&p, &mut r, None);
            assert_eq!(rec2.determinism, Determinism::Deterministic);
            assert_eq!(rec.outcome, rec2.outcome);
        }
        let freq = f64::from(ones) / f64::from(trials);
        assert!((freq - 0.7).abs() < 0.02, "freq {freq}");
    }
}
