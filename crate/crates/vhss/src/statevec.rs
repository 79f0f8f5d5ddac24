//! Dense state-vector reference implementation for small qubit counts.
//!
//! Used only by tests as an independent oracle against the tableau engine.
//! Qubit q indexes bit q of the basis-state label (little endian).

use num_complex::Complex64;

use crate::pauli::PauliWord;

const EPS: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zero_state(n: usize) -> StateVector {
        assert!(n <= 16, "oracle is exponential; keep it small");
        let mut amps = vec![Complex64::ZERO; 1 << n];
        amps[0] = Complex64::ONE;
        StateVector { n, amps }
    }

    /// |ψ⟩ = α|0⟩ + β|1⟩ on qubit 0, |0⟩ elsewhere.
    pub fn single_qubit(n: usize, alpha: Complex64, beta: Complex64) -> StateVector {
        let mut sv = StateVector::zero_state(n);
        sv.amps[0] = alpha;
        sv.amps[1] = beta;
        sv
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply_h(&mut self, q: usize) {
        let bit = 1usize << q;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let a = self.amps[i];
                let b = self.amps[i | bit];
                self.amps[i] = s * (a + b);
                self.amps[i | bit] = s * (a - b);
            }
        }
    }

    pub fn apply_s(&mut self, q: usize) {
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit != 0 {
                self.amps[i] *= Complex64::I;
            }
        }
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) {
        let c = 1usize << control;
        let t = 1usize << target;
        for i in 0..self.amps.len() {
            if i & c != 0 && i & t == 0 {
                self.amps.swap(i, i | t);
            }
        }
    }

    pub fn apply_pauli(&mut self, p: &PauliWord) {
        assert_eq!(p.len(), self.n);
        let global = match p.phase {
            0 => Complex64::ONE,
            1 => Complex64::I,
            2 => -Complex64::ONE,
            _ => -Complex64::I,
        };
        let xmask: usize = p.support_mask_x();
        let zmask: usize = p.support_mask_z();
        let old = self.amps.clone();
        for (i, &a) in old.iter().enumerate() {
            // X^x Z^z |i⟩ = (−1)^{z·i} |i ⊕ x⟩
            let sign = if (zmask & i).count_ones() % 2 == 1 {
                -Complex64::ONE
            } else {
                Complex64::ONE
            };
            self.amps[i ^ xmask] = global * sign * a;
        }
    }

    /// ⟨ψ|P|ψ⟩ for a Hermitian word.
    pub fn expectation(&self, p: &PauliWord) -> f64 {
        let mut phi = self.clone();
        phi.apply_pauli(p);
        let val: Complex64 = self
            .amps
            .iter()
            .zip(&phi.amps)
            .map(|(a, b)| a.conj() * b)
            .sum();
        assert!(val.im.abs() < EPS, "expectation of Hermitian word is real");
        val.re
    }

    /// Probability of outcome 0 when measuring the Hermitian word P
    /// (eigenvalue +1 outcome).
    pub fn prob_plus(&self, p: &PauliWord) -> f64 {
        (1.0 + self.expectation(p)) / 2.0
    }

    /// Project onto the (−1)^outcome eigenspace of P and renormalize.
    pub fn project(&mut self, p: &PauliWord, outcome: bool) {
        let mut phi = self.clone();
        phi.apply_pauli(p);
        let sgn = if outcome { -1.0 } else { 1.0 };
        for (a, b) in self.amps.iter_mut().zip(&phi.amps) {
            *a = 0.5 * (*a + sgn * b);
        }
        let norm = self.norm_sq().sqrt();
        assert!(norm > EPS, "projection onto a zero-probability outcome");
        for a in &mut self.amps {
            *a /= norm;
        }
    }

    /// Joint standard-basis outcome distribution over qubits (a, b), indexed
    /// by (m_a << 1) | m_b.
    pub fn joint_z_distribution(&self, a: usize, b: usize) -> [f64; 4] {
        let mut out = [0.0f64; 4];
        for (i, amp) in self.amps.iter().enumerate() {
            let ma = (i >> a) & 1;
            let mb = (i >> b) & 1;
            out[(ma << 1) | mb] += amp.norm_sqr();
        }
        out
    }

    pub fn prob_z_zero(&self, q: usize) -> f64 {
        let bit = 1usize << q;
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit == 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Measure qubit q in the computational basis with a forced outcome.
    /// Returns the outcome's probability before projection.
    pub fn measure_z_forced(&mut self, q: usize, outcome: bool) -> f64 {
        let p0 = self.prob_z_zero(q);
        let p = if outcome { 1.0 - p0 } else { p0 };
        let bit = 1usize << q;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if ((i & bit != 0) as bool) != outcome {
                *a = Complex64::ZERO;
            }
        }
        let norm = self.norm_sq().sqrt();
        if norm > EPS {
            for a in &mut self.amps {
                *a /= norm;
            }
        }
        p
    }

    /// |⟨self|other⟩|².
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        let ip: Complex64 = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum();
        ip.norm_sqr()
    }
}

impl PauliWord {
    fn support_mask_x(&self) -> usize {
        (0..self.len()).filter(|&q| self.x.get(q)).map(|q| 1 << q).sum()
    }

    fn support_mask_z(&self) -> usize {
        (0..self.len()).filter(|&q| self.z.get(q)).map(|q| 1 << q).sum()
    }
}
