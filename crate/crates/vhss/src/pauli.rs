//! Signed Pauli strings on n qubits.
//!
//! A word is i^phase · Π_j X_j^{x_j} Z_j^{z_j} with phase mod 4, X factors
//! written to the left of Z factors on each qubit. Products therefore pick
//! up a factor (−1)^{z·x'} from commuting the left word's Z part past the
//! right word's X part.

use crate::gf2::BitVector;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PauliWord {
    pub x: BitVector,
    pub z: BitVector,
    /// Power of i, mod 4. Hermitian words used as stabilizers keep this even.
    pub phase: u8,
}

impl PauliWord {
    pub fn identity(n: usize) -> PauliWord {
        PauliWord {
            x: BitVector::zeros(n),
            z: BitVector::zeros(n),
            phase: 0,
        }
    }

    pub fn single_x(n: usize, q: usize) -> PauliWord {
        let mut p = PauliWord::identity(n);
        p.x.set(q, true);
        p
    }

    pub fn single_z(n: usize, q: usize) -> PauliWord {
        let mut p = PauliWord::identity(n);
        p.z.set(q, true);
        p
    }

    pub fn from_xz(x: BitVector, z: BitVector) -> PauliWord {
        assert_eq!(x.len(), z.len());
        PauliWord { x, z, phase: 0 }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.len() == 0
    }

    pub fn is_identity_up_to_phase(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    /// Sign of a Hermitian word. Each Y factor contributes i to the stored
    /// phase (Y = i·XZ here), so the sign is i^(phase − #Y), which must be
    /// real for a Hermitian word.
    pub fn sign(&self) -> i8 {
        let y = (0..self.len())
            .filter(|&q| self.x.get(q) && self.z.get(q))
            .count() as u8;
        let k = (self.phase + 4 - y % 4) % 4;
        debug_assert_eq!(k % 2, 0, "sign of a non-Hermitian word");
        if k == 0 { 1 } else { -1 }
    }

    pub fn negate(&mut self) {
        self.phase = (self.phase + 2) % 4;
    }

    /// True iff the two words anticommute.
    pub fn anticommutes(&self, other: &PauliWord) -> bool {
        self.x.dot(&other.z) ^ self.z.dot(&other.x)
    }

    /// self := self · other (right multiplication), with exact phase.
    pub fn mul_assign(&mut self, other: &PauliWord) {
        let cross = self.z.dot(&other.x);
        self.phase = (self.phase + other.phase + if cross { 2 } else { 0 }) % 4;
        self.x.xor_assign(&other.x);
        self.z.xor_assign(&other.z);
    }

    pub fn mul(&self, other: &PauliWord) -> PauliWord {
        let mut out = self.clone();
        out.mul_assign(other);
        out
    }

    /// Conjugate by a Hadamard on qubit q: X ↔ Z, Y → −Y.
    pub fn conj_h(&mut self, q: usize) {
        let xb = self.x.get(q);
        let zb = self.z.get(q);
        if xb && zb {
            self.phase = (self.phase + 2) % 4;
        }
        self.x.set(q, zb);
        self.z.set(q, xb);
    }

    /// Conjugate by a phase gate on qubit q: X → Y, Z fixed.
    pub fn conj_s(&mut self, q: usize) {
        let xb = self.x.get(q);
        if xb {
            // X → XZ·i; with X left of Z no extra reordering sign appears.
            self.phase = (self.phase + 1) % 4;
            self.z.flip(q);
        }
    }

    /// Conjugate by CNOT with the given control and target:
    /// X_c → X_c X_t, Z_t → Z_c Z_t, others fixed. In the x-left-of-z
    /// convention no phase correction arises.
    pub fn conj_cnot(&mut self, control: usize, target: usize) {
        if self.x.get(control) {
            self.x.flip(target);
        }
        if self.z.get(target) {
            self.z.flip(control);
        }
    }

    /// Extend with fresh identity qubits on the right.
    pub fn extend(&mut self, extra: usize) {
        self.x.extend_zeros(extra);
        self.z.extend_zeros(extra);
    }

    /// Drop qubit q, which must carry the identity.
    pub fn remove_qubit(&mut self, q: usize) {
        debug_assert!(!self.x.get(q) && !self.z.get(q));
        self.x.remove_bit(q);
        self.z.remove_bit(q);
    }

    /// Qubits where the word acts nontrivially.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&q| self.x.get(q) || self.z.get(q))
            .collect()
    }
}

impl std::fmt::Display for PauliWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.phase {
            0 => write!(f, "+")?,
            1 => write!(f, "+i")?,
            2 => write!(f, "-")?,
            _ => write!(f, "-i")?,
        }
        for q in 0..self.len() {
            let c = match (self.x.get(q), self.z.get(q)) {
                (false, false) => 'I',
                (true, false) => 'X',
                (false, true) => 'Z',
                (true, true) => 'Y',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}
