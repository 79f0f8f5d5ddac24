//! Classical binary linear codes with bounded-distance, erasure and
//! brute-force decoders.
//!
//! Codes here are small (k ≤ 20 enforced), so the minimum distance is an
//! exhaustive enumeration and bounded-distance decoding goes through a
//! syndrome table of coset leaders. Decode failure is a verdict, not an
//! error: the protocol treats it as evidence against a branch.

use thiserror::Error;

use crate::gf2::{BitMatrix, BitVector};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodeError {
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("generator has no nonzero rows")]
    ZeroGenerator,
    #[error("dimension {k} too large for exhaustive distance (limit 20)")]
    DimensionTooLarge { k: usize },
    #[error("erasing {erased} positions with distance {d} is ambiguous")]
    ErasureAmbiguous { erased: usize, d: usize },
    #[error("codes have different lengths")]
    IncompatibleLengths,
    #[error("bad fixture: {0}")]
    Fixture(String),
}

const MAX_EXHAUSTIVE_K: usize = 20;

/// An [n, k, d] binary linear code.
#[derive(Clone, Debug)]
pub struct LinearCode {
    n: usize,
    k: usize,
    generator: BitMatrix,
    parity_check: BitMatrix,
    d: usize,
    /// Set when the supplied generator was rank-deficient and got reduced.
    rank_reduced: bool,
    /// syndrome (little-endian bits as usize) -> coset leader of weight ≤ t,
    /// or None when the leader exceeds the correction radius.
    syndrome_table: Vec<Option<BitVector>>,
}

/// Outcome of a decode attempt.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecodeOutcome {
    Decoded {
        codeword: BitVector,
        error_positions: Vec<usize>,
        message: BitVector,
    },
    Failure,
}

impl DecodeOutcome {
    pub fn is_decoded(&self) -> bool {
        matches!(self, DecodeOutcome::Decoded { .. })
    }

    pub fn codeword(&self) -> Option<&BitVector> {
        match self {
            DecodeOutcome::Decoded { codeword, .. } => Some(codeword),
            DecodeOutcome::Failure => None,
        }
    }

    pub fn error_positions(&self) -> Option<&[usize]> {
        match self {
            DecodeOutcome::Decoded {
                error_positions, ..
            } => Some(error_positions),
            DecodeOutcome::Failure => None,
        }
    }
}

impl LinearCode {
    /// Build a code from a generator matrix. The generator is row reduced;
    /// a rank-deficient input yields a smaller k with `rank_reduced` set.
    pub fn from_generator(g: &BitMatrix) -> Result<LinearCode, CodeError> {
        let (rref, _, rank) = g.rref();
        if rank == 0 {
            return Err(CodeError::ZeroGenerator);
        }
        if rank > MAX_EXHAUSTIVE_K {
            return Err(CodeError::DimensionTooLarge { k: rank });
        }
        let generator = BitMatrix::from_rows(rref.row_iter().take(rank).cloned().collect());
        let parity_check = generator.null_space();
        let d = min_distance(&generator);
        let mut code = LinearCode {
            n: g.cols(),
            k: rank,
            generator,
            parity_check,
            d,
            rank_reduced: rank < g.rows(),
            syndrome_table: Vec::new(),
        };
        code.syndrome_table = build_syndrome_table(&code);
        Ok(code)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Correction radius ⌊(d−1)/2⌋.
    pub fn t(&self) -> usize {
        (self.d - 1) / 2
    }

    pub fn rank_reduced(&self) -> bool {
        self.rank_reduced
    }

    pub fn generator(&self) -> &BitMatrix {
        &self.generator
    }

    pub fn parity_check(&self) -> &BitMatrix {
        &self.parity_check
    }

    pub fn syndrome(&self, word: &BitVector) -> Result<BitVector, CodeError> {
        self.parity_check
            .mat_vec(word)
            .map_err(|_| CodeError::LengthMismatch {
                expected: self.n,
                got: word.len(),
            })
    }

    pub fn contains(&self, word: &BitVector) -> Result<bool, CodeError> {
        self.generator
            .in_row_space(word)
            .map_err(|_| CodeError::LengthMismatch {
                expected: self.n,
                got: word.len(),
            })
    }

    /// Dual code: generator of the dual is this code's parity check.
    pub fn dual(&self) -> LinearCode {
        LinearCode::from_generator(&self.parity_check)
            .expect("parity check of a proper code has full rank")
    }

    /// True iff every codeword of `self` lies in `other`.
    pub fn is_subcode_of(&self, other: &LinearCode) -> Result<bool, CodeError> {
        if self.n != other.n {
            return Err(CodeError::IncompatibleLengths);
        }
        for row in self.generator.row_iter() {
            if !other.contains(row)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn codewords(&self) -> Vec<BitVector> {
        let mut out = Vec::with_capacity(1 << self.k);
        for mask in 0..(1u32 << self.k) {
            let mut cw = BitVector::zeros(self.n);
            for i in 0..self.k {
                if mask >> i & 1 == 1 {
                    cw.xor_assign(self.generator.row(i));
                }
            }
            out.push(cw);
        }
        out
    }

    /// Message bits recovered from a codeword (coordinates at pivot columns
    /// of the row-reduced generator).
    pub fn message_of(&self, codeword: &BitVector) -> BitVector {
        let (_, pivots, _) = self.generator.rref();
        let mut msg = BitVector::zeros(self.k);
        for (i, &c) in pivots.iter().enumerate() {
            if codeword.get(c) {
                msg.set(i, true);
            }
        }
        msg
    }

    /// Syndrome-table bounded-distance decoding up to ⌊(d−1)/2⌋ errors.
    pub fn bounded_distance_decode(&self, received: &BitVector) -> Result<DecodeOutcome, CodeError> {
        let syn = self.syndrome(received)?;
        let idx = bits_to_index(&syn);
        match &self.syndrome_table[idx] {
            Some(leader) => {
                let codeword = received.xor(leader);
                Ok(DecodeOutcome::Decoded {
                    error_positions: leader.support(),
                    message: self.message_of(&codeword),
                    codeword,
                })
            }
            None => Ok(DecodeOutcome::Failure),
        }
    }

    /// Coset leader (weight ≤ t) for a raw syndrome vector, if one exists.
    /// The syndrome is ordered by this code's parity-check rows.
    pub fn coset_leader(&self, syndrome: &BitVector) -> Option<BitVector> {
        assert_eq!(syndrome.len(), self.n - self.k);
        self.syndrome_table[bits_to_index(syndrome)].clone()
    }

    /// Recover the unique codeword agreeing with `received` outside `erased`.
    pub fn erasure_decode(
        &self,
        received: &BitVector,
        erased: &[usize],
    ) -> Result<DecodeOutcome, CodeError> {
        if received.len() != self.n {
            return Err(CodeError::LengthMismatch {
                expected: self.n,
                got: received.len(),
            });
        }
        if erased.len() >= self.d {
            return Err(CodeError::ErasureAmbiguous {
                erased: erased.len(),
                d: self.d,
            });
        }
        let known: Vec<usize> = (0..self.n).filter(|i| !erased.contains(i)).collect();
        match self
            .generator
            .row_space_element_matching(received, &known)
        {
            Some(codeword) => Ok(DecodeOutcome::Decoded {
                error_positions: Vec::new(),
                message: self.message_of(&codeword),
                codeword,
            }),
            None => Ok(DecodeOutcome::Failure),
        }
    }

    /// Nearest-codeword decoding on the positions outside `erased`, tolerating
    /// up to ⌊(d−1−|erased|)/2⌋ errors there. Brute force over codewords.
    pub fn error_and_erasure_decode(
        &self,
        received: &BitVector,
        erased: &[usize],
    ) -> Result<DecodeOutcome, CodeError> {
        if received.len() != self.n {
            return Err(CodeError::LengthMismatch {
                expected: self.n,
                got: received.len(),
            });
        }
        if erased.len() >= self.d {
            return Err(CodeError::ErasureAmbiguous {
                erased: erased.len(),
                d: self.d,
            });
        }
        let budget = (self.d - 1 - erased.len()) / 2;
        let mut best: Option<(usize, BitVector, Vec<usize>)> = None;
        for cw in self.codewords() {
            let diff = cw.xor(received);
            let positions: Vec<usize> =
                diff.support().into_iter().filter(|p| !erased.contains(p)).collect();
            let dist = positions.len();
            if best.as_ref().is_none_or(|(bd, _, _)| dist < *bd) {
                best = Some((dist, cw, positions));
            }
        }
        match best {
            Some((dist, codeword, error_positions)) if dist <= budget => {
                Ok(DecodeOutcome::Decoded {
                    message: self.message_of(&codeword),
                    codeword,
                    error_positions,
                })
            }
            _ => Ok(DecodeOutcome::Failure),
        }
    }
}

fn min_distance(generator: &BitMatrix) -> usize {
    let k = generator.rows();
    let mut d = usize::MAX;
    for mask in 1..(1u32 << k) {
        let mut cw = BitVector::zeros(generator.cols());
        for i in 0..k {
            if mask >> i & 1 == 1 {
                cw.xor_assign(generator.row(i));
            }
        }
        d = d.min(cw.weight());
    }
    d
}

fn bits_to_index(v: &BitVector) -> usize {
    v.iter_bits()
        .enumerate()
        .fold(0, |acc, (i, b)| acc | (usize::from(b) << i))
}

fn build_syndrome_table(code: &LinearCode) -> Vec<Option<BitVector>> {
    let checks = code.n - code.k;
    let mut table: Vec<Option<BitVector>> = vec![None; 1 << checks];
    table[0] = Some(BitVector::zeros(code.n));
    let t = code.t();
    // Fill by increasing weight so each syndrome keeps its lightest leader.
    let mut frontier: Vec<BitVector> = vec![BitVector::zeros(code.n)];
    for _w in 1..=t {
        let mut next = Vec::new();
        for e in &frontier {
            let start = e.leading_bit_hi().map_or(0, |b| b + 1);
            for p in start..code.n {
                let mut e2 = e.clone();
                e2.set(p, true);
                let idx = bits_to_index(&code.syndrome(&e2).unwrap());
                if table[idx].is_none() {
                    table[idx] = Some(e2.clone());
                }
                next.push(e2);
            }
        }
        frontier = next;
    }
    table
}

impl BitVector {
    /// Index of the highest set bit, if any.
    fn leading_bit_hi(&self) -> Option<usize> {
        (0..self.len()).rev().find(|&i| self.get(i))
    }
}

/// The [7,4,3] Hamming code with the standard parity check whose columns are
/// the binary representations of 1..7.
pub fn hamming_7_4() -> LinearCode {
    let mut h = BitMatrix::zeros(3, 7);
    for c in 0..7usize {
        let val = c + 1;
        for b in 0..3 {
            if val >> b & 1 == 1 {
                h.set(b, c, true);
            }
        }
    }
    LinearCode::from_generator(&h.null_space()).expect("hamming generator is valid")
}

/// Load a code from the fixture text format (generator matrix).
pub fn code_from_fixture(text: &str) -> Result<LinearCode, CodeError> {
    let g = BitMatrix::from_text(text).map_err(|e| CodeError::Fixture(e.to_string()))?;
    LinearCode::from_generator(&g)
}
