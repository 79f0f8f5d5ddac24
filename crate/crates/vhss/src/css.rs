//! Code pairs for encoding one qubit.
//!
//! A pair of classical codes V, W with dual(V) ⊆ W defines an [[n, 1, d]]
//! quantum code. Basis states are Σ_{w ∈ dual(W)} |u + w⟩ with u ∈ V, so
//! phase-flip stabilizers come from dual(V), bit-flip stabilizers from
//! dual(W), a logical bit-flip is any element of V \ dual(W) and a logical
//! phase-flip any element of W \ dual(V).

use thiserror::Error;

use crate::codes::{code_from_fixture, CodeError, LinearCode};
use crate::gf2::{BitMatrix, BitVector};

#[derive(Debug, Error)]
pub enum CssError {
    #[error("codes have different lengths")]
    LengthMismatch,
    #[error("dual of the first code is not contained in the second")]
    NotDualContaining,
    #[error("code pair encodes {k} qubits, expected exactly one")]
    WrongDimension { k: usize },
    #[error("bad fixture: {0}")]
    Fixture(String),
    #[error(transparent)]
    Code(#[from] CodeError),
}

/// A one-qubit quantum code built from two classical codes.
#[derive(Clone, Debug)]
pub struct CssCode {
    code_v: LinearCode,
    code_w: LinearCode,
    /// dual(V), the phase-flip stabilizer group generators.
    z_stabilizers: BitMatrix,
    /// dual(W), the bit-flip stabilizer group generators.
    x_stabilizers: BitMatrix,
    logical_x: BitVector,
    logical_z: BitVector,
    distance: usize,
}

impl CssCode {
    /// Build from codes V and W with dual(V) ⊆ W. Requires k_V + k_W = n + 1
    /// so that exactly one qubit is encoded.
    pub fn new(code_v: LinearCode, code_w: LinearCode) -> Result<CssCode, CssError> {
        if code_v.n() != code_w.n() {
            return Err(CssError::LengthMismatch);
        }
        // Parity checks generate the duals; avoid building dual LinearCodes
        // before validation since degenerate duals (zero code) would panic.
        let z_stabilizers = code_v.parity_check().clone();
        let x_stabilizers = code_w.parity_check().clone();
        for row in z_stabilizers.row_iter() {
            if !code_w.contains(row).map_err(CssError::Code)? {
                return Err(CssError::NotDualContaining);
            }
        }
        // dual(V) ⊆ W implies dual(W) ⊆ V by taking duals.
        let k = code_v.k() + code_w.k() - code_v.n();
        if k != 1 {
            return Err(CssError::WrongDimension { k });
        }
        let logical_x = find_logical(&code_v, &x_stabilizers);
        let logical_z = find_logical(&code_w, &z_stabilizers);
        debug_assert!(logical_x.dot(&logical_z));
        let distance = logical_x.weight().min(logical_z.weight());
        Ok(CssCode {
            z_stabilizers,
            x_stabilizers,
            code_v,
            code_w,
            logical_x,
            logical_z,
            distance,
        })
    }

    pub fn n(&self) -> usize {
        self.code_v.n()
    }

    pub fn distance(&self) -> usize {
        self.distance
    }

    /// Errors of weight up to this are corrected.
    pub fn t(&self) -> usize {
        (self.distance - 1) / 2
    }

    /// Code whose codewords are the bit strings seen when measuring a basis
    /// state in the computational basis.
    pub fn code_v(&self) -> &LinearCode {
        &self.code_v
    }

    /// Same role after a global Fourier transform.
    pub fn code_w(&self) -> &LinearCode {
        &self.code_w
    }

    /// Generators of the phase-flip part of the stabilizer group.
    pub fn z_stabilizers(&self) -> &BitMatrix {
        &self.z_stabilizers
    }

    /// Generators of the bit-flip part.
    pub fn x_stabilizers(&self) -> &BitMatrix {
        &self.x_stabilizers
    }

    /// Support of a representative logical bit-flip (an element of V outside
    /// dual(W)).
    pub fn logical_x(&self) -> &BitVector {
        &self.logical_x
    }

    /// Support of a representative logical phase-flip (in W outside dual(V)).
    pub fn logical_z(&self) -> &BitVector {
        &self.logical_z
    }

    /// Logical bit carried by a measured codeword: its pairing with the
    /// logical phase-flip representative.
    pub fn logical_bit_of(&self, codeword: &BitVector) -> bool {
        codeword.dot(&self.logical_z)
    }

    /// Logical bit in the Fourier basis.
    pub fn fourier_logical_bit_of(&self, codeword: &BitVector) -> bool {
        codeword.dot(&self.logical_x)
    }
}

/// Minimum-weight representative search: lightest element of `code` outside
/// the row space of `inner`. Exhaustive, fine for k ≤ 20.
fn find_logical(code: &LinearCode, inner: &BitMatrix) -> BitVector {
    code.codewords()
        .into_iter()
        .filter(|cw| !cw.is_zero() && !inner.in_row_space(cw).unwrap())
        .min_by_key(BitVector::weight)
        .expect("code strictly contains inner")
}

/// The seven-qubit code: both classical codes are Hamming [7,4,3].
pub fn steane_code() -> CssCode {
    let h = crate::codes::hamming_7_4();
    CssCode::new(h.clone(), h).expect("hamming pair is dual containing")
}

/// Fixture format: two generator matrices separated by a blank line.
pub fn css_from_fixture(text: &str) -> Result<CssCode, CssError> {
    let parts: Vec<&str> = text.split("\n\n").collect();
    if parts.len() != 2 {
        return Err(CssError::Fixture(
            "expected two matrices separated by a blank line".into(),
        ));
    }
    let v = code_from_fixture(parts[0]).map_err(CssError::Code)?;
    let w = code_from_fixture(parts[1]).map_err(CssError::Code)?;
    CssCode::new(v, w)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchemeKind {
    Vhss,
    RampVhss,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VcssKind {
    /// Classical layer tolerating t_c < n/2 cheaters, unconditionally.
    RabinLike,
    /// Trade secrecy threshold for cheater count: needs n ≥ p + 3t + 1.
    StinsonLike,
}

/// Access structure of a full scheme instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SchemeParams {
    /// Secrecy threshold: any p nodes learn nothing.
    pub p: usize,
    /// Active cheaters tolerated.
    pub t: usize,
    /// Reconstruction slack: any n − t_prime nodes suffice (ramp only).
    pub t_prime: usize,
    /// Total nodes.
    pub n: usize,
    /// Quantum-capable nodes (one code branch each).
    pub n_q: usize,
    /// Classical-only nodes.
    pub n_c: usize,
    pub kind: SchemeKind,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SchemeError {
    #[error("classical node count {n_c} below code length {n_q}")]
    TooFewClassical { n_c: usize, n_q: usize },
    #[error("requested cheater count {t} exceeds code tolerance {max}")]
    CheaterBudget { t: usize, max: usize },
    #[error("cheater plus slack budget {t} + {t_prime} exceeds ⌊(d−1)/2⌋ = {max}")]
    RampBudget { t: usize, t_prime: usize, max: usize },
}

/// Scheme parameters for the full-threshold variant.
///
/// With the majority-tolerant classical layer the secrecy threshold is the
/// maximum p = ⌊(n−1)/2⌋. With the trade-off layer, p is the largest value
/// satisfying n ≥ p + 3t + 1 for the code's cheater count.
pub fn vhss_params(
    css: &CssCode,
    n_c: usize,
    vcss_kind: VcssKind,
) -> Result<SchemeParams, SchemeError> {
    let n_q = css.n();
    if n_c < n_q {
        return Err(SchemeError::TooFewClassical { n_c, n_q });
    }
    let t = css.t();
    let n = n_c.max(n_q);
    let p = match vcss_kind {
        VcssKind::RabinLike => (n - 1) / 2,
        VcssKind::StinsonLike => n.saturating_sub(3 * t + 1),
    };
    Ok(SchemeParams {
        p,
        t,
        t_prime: 0,
        n,
        n_q,
        n_c,
        kind: SchemeKind::Vhss,
    })
}

/// Ramp variant: give up reconstruction slack t′ against correction budget,
/// requiring t + t′ ≤ ⌊(d−1)/2⌋. Any n − t′ nodes reconstruct.
pub fn ramp_params(css: &CssCode, t: usize, t_prime: usize) -> Result<SchemeParams, SchemeError> {
    let max = css.t();
    if t + t_prime > max {
        return Err(SchemeError::RampBudget { t, t_prime, max });
    }
    let n = css.n();
    Ok(SchemeParams {
        p: (n - 1) / 2,
        t,
        t_prime,
        n,
        n_q: n,
        n_c: n,
        kind: SchemeKind::RampVhss,
    })
}

/// Code lengths n(t) of the four published distance-(2t+1) code families.
pub fn table1_families(t: usize) -> [(&'static str, usize); 4] {
    [
        ("2(t+1)^2", 2 * (t + 1) * (t + 1)),
        ("3t^2+3t+1", 3 * t * t + 3 * t + 1),
        ("6t^2+1", 6 * t * t + 1),
        ("8t^2+4t+1", 8 * t * t + 4 * t + 1),
    ]
}

/// Can a scheme be simultaneously strong-threshold in both secrecy and
/// reconstruction, i.e. p = n − t′ − 1, while tolerating t cheaters? The
/// required inequality n − t′ − t > p collapses to t < 1, so this holds
/// only for t = 0.
pub fn strong_threshold_feasible(p: usize, t: usize, t_prime: usize, n: usize) -> bool {
    debug_assert_eq!(p + t_prime + 1, n);
    let (n, t, t_prime) = (n as i64, t as i64, t_prime as i64);
    n - t_prime - t > n - t_prime - 1
}
