//! Verifiable classical secret sharing of the 2-bit pad key.
//!
//! Shamir sharing over a small binary field, with two add-ons that make it
//! verifiable: a cut-and-choose consistency phase (r rounds of masked
//! openings, each catching an inconsistent dealer with probability 1/2) and
//! pairwise information-checking tags so the reconstructor can discard
//! shares corrupted after the fact. The tag count per pair is ⌈r/8⌉ so the
//! forgery probability (256^-count) stays at or below 2^-r.
//!
//! The scheme tolerates t < n_c/2 corrupted share holders.

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VcssError {
    #[error("need t < n_c/2, got t = {t}, n_c = {n_c}")]
    BadThreshold { t: usize, n_c: usize },
    #[error("field supports at most {max} nodes, got {n_c}")]
    TooManyNodes { n_c: usize, max: usize },
    #[error("too few shares: {got} of {needed} needed")]
    TooFewShares { got: usize, needed: usize },
    #[error("accepted shares are not consistent with one polynomial")]
    Inconsistent,
    #[error("bad serialized share")]
    Serial,
}

/// Binary extension field in polynomial basis.
pub trait Field: Copy + Eq + std::fmt::Debug {
    const BITS: u32;
    const ZERO: Self;
    const ONE: Self;
    fn from_byte(b: u8) -> Self;
    fn to_byte(self) -> u8;
    fn add(self, o: Self) -> Self;
    fn mul(self, o: Self) -> Self;
    fn inv(self) -> Self;
    fn order() -> usize {
        1 << Self::BITS
    }
    fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::from_byte((rng.gen::<u8>()) & ((Self::order() - 1) as u8))
    }
    /// Distinct nonzero evaluation point for node index i.
    fn eval_point(i: usize) -> Self {
        assert!(i + 1 < Self::order());
        Self::from_byte((i + 1) as u8)
    }
}

macro_rules! binary_field {
    ($name:ident, $bits:expr, $poly:expr) => {
        #[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, PartialOrd, Ord)]
        pub struct $name(pub u8);

        impl Field for $name {
            const BITS: u32 = $bits;
            const ZERO: Self = $name(0);
            const ONE: Self = $name(1);

            fn from_byte(b: u8) -> Self {
                debug_assert!((b as usize) < (1usize << $bits));
                $name(b)
            }

            fn to_byte(self) -> u8 {
                self.0
            }

            fn add(self, o: Self) -> Self {
                $name(self.0 ^ o.0)
            }

            fn mul(self, o: Self) -> Self {
                let mut a = self.0 as u16;
                let mut b = o.0 as u16;
                let mut acc: u16 = 0;
                while b != 0 {
                    if b & 1 == 1 {
                        acc ^= a;
                    }
                    a <<= 1;
                    if a & (1 << $bits) != 0 {
                        a ^= $poly;
                    }
                    b >>= 1;
                }
                $name(acc as u8)
            }

            fn inv(self) -> Self {
                assert_ne!(self.0, 0, "zero has no inverse");
                // Tiny field: exponentiate to order − 2.
                let mut acc = $name(1);
                for _ in 0..((1usize << $bits) - 2) {
                    acc = acc.mul(self);
                }
                acc
            }
        }
    };
}

// x^8 + x^4 + x^3 + x + 1 and x^4 + x + 1.
binary_field!(Gf256, 8, 0x11b);
binary_field!(Gf16, 4, 0x13);

/// Degree-bounded polynomial, coefficients low to high; coeffs[0] is the
/// shared secret.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly<F: Field>(pub Vec<F>);

impl<F: Field> Poly<F> {
    pub fn random_with_constant<R: Rng + ?Sized>(c0: F, degree: usize, rng: &mut R) -> Poly<F> {
        let mut coeffs = vec![c0];
        for _ in 0..degree {
            coeffs.push(F::random(rng));
        }
        Poly(coeffs)
    }

    pub fn eval(&self, x: F) -> F {
        let mut acc = F::ZERO;
        for &c in self.0.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }
}

/// Lagrange interpolation at zero from (point, value) pairs.
pub fn interpolate_at_zero<F: Field>(points: &[(F, F)]) -> F {
    let mut acc = F::ZERO;
    for (i, &(xi, yi)) in points.iter().enumerate() {
        let mut num = F::ONE;
        let mut den = F::ONE;
        for (j, &(xj, _)) in points.iter().enumerate() {
            if i != j {
                num = num.mul(xj);
                den = den.mul(xi.add(xj));
            }
        }
        acc = acc.add(yi.mul(num.mul(den.inv())));
    }
    acc
}

/// True iff the given points all lie on one polynomial of degree ≤ t.
pub fn consistent_degree<F: Field>(points: &[(F, F)], t: usize) -> bool {
    if points.len() <= t + 1 {
        return true;
    }
    // Interpolate through the first t+1 points and check the rest.
    let base = &points[..t + 1];
    for &(x, y) in &points[t + 1..] {
        let mut acc = F::ZERO;
        for (i, &(xi, yi)) in base.iter().enumerate() {
            let mut num = F::ONE;
            let mut den = F::ONE;
            for (j, &(xj, _)) in base.iter().enumerate() {
                if i != j {
                    num = num.mul(x.add(xj));
                    den = den.mul(xi.add(xj));
                }
            }
            acc = acc.add(yi.mul(num.mul(den.inv())));
        }
        if acc != y {
            return false;
        }
    }
    true
}

/// One authentication tag pair: the holder of the authenticated share keeps
/// `y`; the checking peer keeps `(b, c)` with y = share·b + c.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Tag<F: Field> {
    pub y_a: F,
    pub y_b: F,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TagKey<F: Field> {
    pub b_a: F,
    pub c_a: F,
    pub b_b: F,
    pub c_b: F,
}

/// Everything node `node` holds after dealing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyShare<F: Field> {
    pub node: usize,
    pub eval_point: F,
    pub share_a: F,
    pub share_b: F,
    /// tags[j][k]: k-th tag authenticating this share to peer j.
    pub tags: Vec<Vec<Tag<F>>>,
    /// keys[j][k]: k-th key this node uses to check peer j's share.
    pub keys: Vec<Vec<TagKey<F>>>,
}

pub fn tag_count(r: usize) -> usize {
    r.div_ceil(8).max(1)
}

/// Deal Shamir shares of the 2-bit key (a, b) with degree-t polynomials and
/// pairwise tags sized for security parameter r.
pub fn vcss_share<F: Field, R: Rng + ?Sized>(
    key: (bool, bool),
    n_c: usize,
    t: usize,
    r: usize,
    rng: &mut R,
) -> Result<Vec<KeyShare<F>>, VcssError> {
    if 2 * t >= n_c {
        return Err(VcssError::BadThreshold { t, n_c });
    }
    if n_c >= F::order() {
        return Err(VcssError::TooManyNodes {
            n_c,
            max: F::order() - 1,
        });
    }
    let f_a = Poly::random_with_constant(if key.0 { F::ONE } else { F::ZERO }, t, rng);
    let f_b = Poly::random_with_constant(if key.1 { F::ONE } else { F::ZERO }, t, rng);
    let k = tag_count(r);
    let mut shares: Vec<KeyShare<F>> = (0..n_c)
        .map(|i| KeyShare {
            node: i,
            eval_point: F::eval_point(i),
            share_a: f_a.eval(F::eval_point(i)),
            share_b: f_b.eval(F::eval_point(i)),
            tags: vec![Vec::new(); n_c],
            keys: vec![Vec::new(); n_c],
        })
        .collect();
    for i in 0..n_c {
        for j in 0..n_c {
            if i == j {
                continue;
            }
            for _ in 0..k {
                let tk = TagKey {
                    b_a: F::random(rng),
                    c_a: F::random(rng),
                    b_b: F::random(rng),
                    c_b: F::random(rng),
                };
                let tag = Tag {
                    y_a: shares[i].share_a.mul(tk.b_a).add(tk.c_a),
                    y_b: shares[i].share_b.mul(tk.b_b).add(tk.c_b),
                };
                shares[i].tags[j].push(tag);
                shares[j].keys[i].push(tk);
            }
        }
    }
    Ok(shares)
}

/// Check one claimed share against the verifier's tag keys.
pub fn tags_verify<F: Field>(
    claimed_a: F,
    claimed_b: F,
    tags: &[Tag<F>],
    keys: &[TagKey<F>],
) -> bool {
    tags.len() == keys.len()
        && tags.iter().zip(keys).all(|(tag, key)| {
            tag.y_a == claimed_a.mul(key.b_a).add(key.c_a)
                && tag.y_b == claimed_b.mul(key.b_b).add(key.c_b)
        })
}

/// Dealer behavior during the consistency rounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DealerConduct {
    Honest,
    /// Mask polynomials are dealt consistently, so any inconsistency in the
    /// base shares survives into the masked opening.
    InconsistentBase,
}

/// Verdict of the verification phase.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VcssVerdict {
    Accept,
    Reject,
}

/// Cut-and-choose consistency check: r rounds; in each the dealer deals a
/// fresh random degree-t mask pair, the public coin picks whether nodes open
/// the mask alone or the masked base shares, and everyone checks the opened
/// points lie on a degree-t polynomial. A dealer whose base shares are off
/// every degree-t polynomial fails each round with probability 1/2, since at
/// most one of {mask, base + mask} can be consistent.
pub fn vcss_verify<F: Field, R: Rng + ?Sized>(
    shares: &[KeyShare<F>],
    t: usize,
    r: usize,
    coins: &[bool],
    conduct: DealerConduct,
    rng: &mut R,
) -> VcssVerdict {
    assert_eq!(coins.len(), r);
    let n_c = shares.len();
    for &coin in coins {
        let g_a = Poly::random_with_constant(F::random(rng), t, rng);
        let g_b = Poly::random_with_constant(F::random(rng), t, rng);
        let _ = conduct; // mask dealing is consistent under both conducts
        let opened: Vec<(F, F)> = (0..n_c)
            .map(|i| {
                let x = shares[i].eval_point;
                let mask = g_a.eval(x);
                let val = if coin {
                    shares[i].share_a.add(mask)
                } else {
                    mask
                };
                (x, val)
            })
            .collect();
        if !consistent_degree(&opened, t) {
            return VcssVerdict::Reject;
        }
        let opened_b: Vec<(F, F)> = (0..n_c)
            .map(|i| {
                let x = shares[i].eval_point;
                let mask = g_b.eval(x);
                let val = if coin {
                    shares[i].share_b.add(mask)
                } else {
                    mask
                };
                (x, val)
            })
            .collect();
        if !consistent_degree(&opened_b, t) {
            return VcssVerdict::Reject;
        }
    }
    VcssVerdict::Accept
}

/// A share as presented to the reconstructor, possibly altered by a cheater.
#[derive(Clone, Debug)]
pub struct ClaimedShare<F: Field> {
    pub node: usize,
    pub eval_point: F,
    pub share_a: F,
    pub share_b: F,
    pub tags: Vec<Vec<Tag<F>>>,
}

/// Reconstruct the key: tag-check every claimed share against every peer's
/// keys, accept shares passing at least n_c − 1 − t checks, then require the
/// accepted set to be degree-t consistent.
pub fn vcss_reconstruct<F: Field>(
    claims: &[ClaimedShare<F>],
    holders: &[KeyShare<F>],
    t: usize,
) -> Result<(bool, bool), VcssError> {
    let n_c = holders.len();
    let mut accepted: Vec<(F, F, F)> = Vec::new();
    for claim in claims {
        let mut ok = 0usize;
        for holder in holders {
            if holder.node == claim.node {
                continue;
            }
            if tags_verify(
                claim.share_a,
                claim.share_b,
                &claim.tags[holder.node],
                &holder.keys[claim.node],
            ) {
                ok += 1;
            }
        }
        if ok + 1 + t >= n_c {
            accepted.push((claim.eval_point, claim.share_a, claim.share_b));
        }
    }
    if accepted.len() < t + 1 {
        return Err(VcssError::TooFewShares {
            got: accepted.len(),
            needed: t + 1,
        });
    }
    let pts_a: Vec<(F, F)> = accepted.iter().map(|&(x, a, _)| (x, a)).collect();
    let pts_b: Vec<(F, F)> = accepted.iter().map(|&(x, _, b)| (x, b)).collect();
    if !consistent_degree(&pts_a, t) || !consistent_degree(&pts_b, t) {
        return Err(VcssError::Inconsistent);
    }
    let a = interpolate_at_zero(&pts_a[..t + 1]);
    let b = interpolate_at_zero(&pts_b[..t + 1]);
    Ok((a == F::ONE, b == F::ONE))
}

impl<F: Field> KeyShare<F> {
    pub fn claim(&self) -> ClaimedShare<F> {
        ClaimedShare {
            node: self.node,
            eval_point: self.eval_point,
            share_a: self.share_a,
            share_b: self.share_b,
            tags: self.tags.clone(),
        }
    }

    /// Length-prefixed binary layout: node u16, eval point, share bytes,
    /// then the tag and key tables row by row.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&(self.node as u16).to_le_bytes());
        out.push(self.eval_point.to_byte());
        out.push(self.share_a.to_byte());
        out.push(self.share_b.to_byte());
        out.extend_from_slice(&(self.tags.len() as u16).to_le_bytes());
        for row in &self.tags {
            out.extend_from_slice(&(row.len() as u16).to_le_bytes());
            for tag in row {
                out.push(tag.y_a.to_byte());
                out.push(tag.y_b.to_byte());
            }
        }
        for row in &self.keys {
            out.extend_from_slice(&(row.len() as u16).to_le_bytes());
            for key in row {
                out.extend_from_slice(&[
                    key.b_a.to_byte(),
                    key.c_a.to_byte(),
                    key.b_b.to_byte(),
                    key.c_b.to_byte(),
                ]);
            }
        }
        out
    }

    pub fn from_bytes(data: &[u8]) -> Result<KeyShare<F>, VcssError> {
        let mut pos = 0usize;
        let mut take = |n: usize| -> Result<&[u8], VcssError> {
            let end = pos.checked_add(n).ok_or(VcssError::Serial)?;
            let s = data.get(pos..end).ok_or(VcssError::Serial)?;
            pos = end;
            Ok(s)
        };
        let node = u16::from_le_bytes(take(2)?.try_into().unwrap()) as usize;
        let eval_point = F::from_byte(take(1)?[0]);
        let share_a = F::from_byte(take(1)?[0]);
        let share_b = F::from_byte(take(1)?[0]);
        let n = u16::from_le_bytes(take(2)?.try_into().unwrap()) as usize;
        let mut tags = Vec::with_capacity(n);
        for _ in 0..n {
            let k = u16::from_le_bytes(take(2)?.try_into().unwrap()) as usize;
            let mut row = Vec::with_capacity(k);
            for _ in 0..k {
                let s = take(2)?;
                row.push(Tag {
                    y_a: F::from_byte(s[0]),
                    y_b: F::from_byte(s[1]),
                });
            }
            tags.push(row);
        }
        let mut keys = Vec::with_capacity(n);
        for _ in 0..n {
            let k = u16::from_le_bytes(take(2)?.try_into().unwrap()) as usize;
            let mut row = Vec::with_capacity(k);
            for _ in 0..k {
                let s = take(4)?;
                row.push(TagKey {
                    b_a: F::from_byte(s[0]),
                    c_a: F::from_byte(s[1]),
                    b_b: F::from_byte(s[2]),
                    c_b: F::from_byte(s[3]),
                });
            }
            keys.push(row);
        }
        if pos != data.len() {
            return Err(VcssError::Serial);
        }
        Ok(KeyShare {
            node,
            eval_point,
            share_a,
            share_b,
            tags,
            keys,
        })
    }
}

/// Deal base shares that are off every degree-t polynomial: honest Shamir
/// shares with one half of the nodes shifted onto a different polynomial.
pub fn deal_inconsistent<F: Field, R: Rng + ?Sized>(
    n_c: usize,
    t: usize,
    r: usize,
    rng: &mut R,
) -> Vec<KeyShare<F>> {
    let mut shares = vcss_share::<F, R>((false, false), n_c, t, r, rng).unwrap();
    // Shift t+1 nodes by a nonzero constant: the union now needs degree > t.
    for share in shares.iter_mut().take(t + 1) {
        share.share_a = share.share_a.add(F::ONE);
    }
    shares
}
