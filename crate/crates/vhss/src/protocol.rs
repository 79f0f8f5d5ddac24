//! The hybrid sharing protocol: a padded qubit is dealt as a two-level code
//! tree while the pad key is dealt as classical verified shares; public-coin
//! rounds check the tree, and a reconstructor undoes both layers.
//!
//! One run owns a single global tableau. Every ancilla tree is dealt,
//! compared against the shares under a public coin, measured, and retired
//! before the next one exists, so per-node holdings stay within three code
//! blocks. Broadcast decode bookkeeping runs after the last round.

use std::collections::BTreeSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::css::CssCode;
use crate::gf2::BitVector;
use crate::netsim::{fnv64, AdversaryStrategy, Network, NetworkConfig, Phase};
use crate::pauli::PauliWord;
use crate::tableau::{embed_at, encoding_circuit, AmplitudePair, Gate, LogicalTableau};
use crate::vcss::{
    vcss_reconstruct, vcss_share, vcss_verify, ClaimedShare, DealerConduct, Field, Gf256,
    KeyShare, VcssVerdict,
};

/// Position of a physical qubit in the share tree: branch = which node's
/// re-encoding, leaf = which component of that block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeCoord {
    pub branch: usize,
    pub leaf: usize,
}

/// Accusation bookkeeping: per-branch flagged leaf positions and the global
/// accused-branch set, both cumulative over rounds.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct CheaterSets {
    pub per_branch: Vec<BTreeSet<usize>>,
    pub global: BTreeSet<usize>,
}

/// Per-node peak simultaneous qubit holdings, by phase.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct PeakWorkspace {
    pub sharing: Vec<usize>,
    pub z_rounds: Vec<usize>,
    pub x_rounds: Vec<usize>,
}

impl PeakWorkspace {
    pub fn max(&self) -> usize {
        self.sharing
            .iter()
            .chain(&self.z_rounds)
            .chain(&self.x_rounds)
            .copied()
            .max()
            .unwrap_or(0)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Transcript {
    pub aborted: bool,
    pub accused: Vec<usize>,
    /// Absent when the run aborted.
    pub fidelity: Option<f64>,
    pub peak_workspace: PeakWorkspace,
    pub seed: u64,
    pub theoretical_eps_c: f64,
}

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("too many accused branches ({accused}) for correction budget 2t = {budget}")]
    Unrecoverable { accused: usize, budget: usize },
    #[error("classical key reconstruction failed")]
    KeyLost,
    #[error("logical content lost during the run")]
    LogicalLost,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum RoundKind {
    /// Plus-ancilla comparison round m, standard basis.
    ZRound(usize),
    /// Ancilla-of-ancilla round (l, m), standard basis.
    Sub(usize, usize),
    /// Fourier-side comparison for main block l.
    XCheck(usize),
}

#[derive(Clone, Debug)]
struct RoundRecord {
    kind: RoundKind,
    words: Vec<BitVector>,
}

pub struct ProtocolState {
    css: CssCode,
    net: Network,
    tab: LogicalTableau,
    strategy: AdversaryStrategy,
    r: usize,
    plaintext: AmplitudePair,
    key_shares: Vec<KeyShare<Gf256>>,
    /// branch[i][j] = global qubit index of leaf j in branch i; leaf j is
    /// held by node j after dealing.
    branch: Vec<Vec<usize>>,
    enc_input: usize,
    enc_gates: Vec<Gate>,
    records: Vec<RoundRecord>,
    sets: CheaterSets,
    passed: Option<bool>,
    rng: ChaCha8Rng,
}

impl ProtocolState {
    pub fn qubit_at(&self, c: TreeCoord) -> usize {
        self.branch[c.branch][c.leaf]
    }

    pub fn sets(&self) -> &CheaterSets {
        &self.sets
    }

    pub fn network(&self) -> &Network {
        &self.net
    }

    pub fn key_shares(&self) -> &[KeyShare<Gf256>] {
        &self.key_shares
    }

    pub fn passed(&self) -> Option<bool> {
        self.passed
    }

    fn n_q(&self) -> usize {
        self.css.n()
    }

    fn t(&self) -> usize {
        self.css.t()
    }

    /// Deal a two-level tree from a level-1 block: the dealer sends leaf i
    /// to node i, every node re-encodes in the same round (holding one block
    /// at its peak), and the block components fan out to their leaf-index
    /// owners. `level1_x_flips` models a dealer preparing a wrong level-1
    /// block.
    fn deal_tree(
        &mut self,
        level1: LogicalTableau,
        level1_x_flips: Option<&BitVector>,
    ) -> Vec<Vec<usize>> {
        let n_q = self.n_q();
        let dealer = self.net.config().dealer;
        let base = self.tab.num_qubits();
        debug_assert_eq!(base, self.net.num_qubits());
        self.tab.append(level1);
        for _ in 0..n_q {
            self.net.alloc_qubit(dealer);
        }
        if let Some(flips) = level1_x_flips {
            for i in flips.support() {
                self.tab.apply_x(base + i);
            }
        }
        for i in 0..n_q {
            if i != dealer {
                self.net.send_qubit(dealer, i, base + i);
            }
        }
        self.net.flush();

        // Fresh blocks for every branch, then all nodes re-encode in the
        // same round.
        let mut layout: Vec<Vec<usize>> = Vec::with_capacity(n_q);
        for i in 0..n_q {
            let fresh_base = self.tab.num_qubits();
            self.tab.append(LogicalTableau::zero_state(n_q - 1));
            for _ in 0..n_q - 1 {
                self.net.alloc_qubit(i);
            }
            let mut map = vec![0usize; n_q];
            let mut next = fresh_base;
            for (j, slot) in map.iter_mut().enumerate() {
                if j == self.enc_input {
                    *slot = base + i;
                } else {
                    *slot = next;
                    next += 1;
                }
            }
            layout.push(map);
        }
        let gates = self.enc_gates.clone();
        for map in &layout {
            for g in &gates {
                match *g {
                    Gate::H(q) => self.tab.apply_h(map[q]),
                    Gate::Cnot(c, t) => self.tab.apply_cnot(map[c], map[t]),
                }
            }
        }
        for (i, map) in layout.iter().enumerate() {
            for (j, &q) in map.iter().enumerate() {
                if j != i {
                    self.net.send_qubit(i, j, q);
                }
            }
        }
        self.net.flush();
        layout
    }

    /// Measure a full tree in the standard basis; each node broadcasts its
    /// leaf bits in node order. Returns one broadcast word per branch.
    /// Lying nodes flip their announced bits; the physical record is honest.
    fn measure_tree(&mut self, layout: &[Vec<usize>]) -> Vec<BitVector> {
        let n_q = self.n_q();
        let lying = matches!(self.strategy, AdversaryStrategy::CheaterBroadcastLie);
        let cheaters = self.net.config().cheaters.clone();
        let mut words = vec![BitVector::zeros(n_q); n_q];
        for j in 0..n_q {
            let mut announced = Vec::with_capacity(n_q);
            for (i, word) in words.iter_mut().enumerate() {
                let rec = self.tab.measure_z(layout[i][j], &mut self.rng);
                let mut bit = rec.outcome;
                if lying && cheaters.contains(&j) {
                    bit = !bit;
                }
                word.set(j, bit);
                announced.push(u8::from(bit));
            }
            self.net.broadcast(j, announced);
        }
        words
    }

    /// Retire an entire measured tree, highest index first so earlier
    /// columns keep their numbering.
    fn retire_tree(&mut self, layout: &[Vec<usize>], level1_base: usize) {
        let mut qubits: Vec<usize> = layout.iter().flatten().copied().collect();
        debug_assert!(qubits.iter().all(|&q| q >= level1_base || self.branch.iter().all(|b| !b.contains(&q))));
        qubits.sort_unstable_by(|a, b| b.cmp(a));
        for q in qubits {
            self.tab.retire_qubit(q);
            self.net.retire_qubit(q);
        }
    }

    fn apply_cheater_paulis(&mut self, x: bool, z: bool) {
        let cheaters = self.net.config().cheaters.clone();
        for &j in &cheaters {
            if j >= self.n_q() {
                continue;
            }
            for i in 0..self.n_q() {
                let q = self.branch[i][j];
                if x {
                    self.tab.apply_x(q);
                }
                if z {
                    self.tab.apply_z(q);
                }
            }
        }
    }
}

/// Deal the padded secret: draw the pad key, share it classically, encode
/// the padded qubit into the two-level tree, and apply any dealer-side
/// corruption.
pub fn run_sharing(
    cfg: NetworkConfig,
    css: &CssCode,
    secret: AmplitudePair,
    strategy: AdversaryStrategy,
    r: usize,
    mut rng: ChaCha8Rng,
) -> ProtocolState {
    let mut net = Network::new(cfg);
    net.set_phase(Phase::Sharing);
    let pad = (rng.gen::<bool>(), rng.gen::<bool>());
    let mut padded = secret;
    if pad.1 {
        padded.apply_z();
    }
    if pad.0 {
        padded.apply_x();
    }
    let key_shares = vcss_share::<Gf256, _>(pad, net.config().n_c, css.t(), r, &mut rng)
        .expect("valid classical sharing parameters");
    for share in &key_shares {
        let bytes = share.to_bytes();
        net.send_private(net.config().dealer, share.node, &bytes);
    }

    let (enc_input, enc_gates) = encoding_circuit(css);
    let mut state = ProtocolState {
        css: css.clone(),
        net,
        tab: LogicalTableau::empty(),
        strategy,
        r,
        plaintext: secret,
        key_shares,
        branch: Vec::new(),
        enc_input,
        enc_gates,
        records: Vec::new(),
        sets: CheaterSets {
            per_branch: vec![BTreeSet::new(); css.n()],
            global: BTreeSet::new(),
        },
        passed: None,
        rng,
    };
    let level1 = LogicalTableau::prepare_encoded_secret(css, padded);
    state.branch = state.deal_tree(level1, None);

    match state.strategy {
        AdversaryStrategy::DealerInconsistentTree => {
            // Two branches each carry a two-leaf flip whose miscorrected
            // residue is a logical flip, so any coin = 1 comparison round
            // exposes an inconsistent root.
            for i in 0..2 {
                state.tab.apply_x(state.branch[i][0]);
                state.tab.apply_x(state.branch[i][1]);
            }
        }
        AdversaryStrategy::DealerOverweightErrors => {
            state.tab.apply_x(state.branch[0][0]);
            state.tab.apply_x(state.branch[0][1]);
        }
        _ => {}
    }
    state
}

/// Outcome of the public-coin checking phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Abort,
}

pub fn run_verification(state: &mut ProtocolState) -> Verdict {
    let (n_q, r) = (state.n_q(), state.r);

    // Classical layer first: cut-and-choose over the key shares.
    let coins: Vec<bool> = (0..r).map(|m| state.net.public_coin(&format!("key-{m}"))).collect();
    let verdict = vcss_verify(
        &state.key_shares,
        state.t(),
        r,
        &coins,
        DealerConduct::Honest,
        &mut state.rng,
    );
    if verdict == VcssVerdict::Reject {
        state.passed = Some(false);
        return Verdict::Abort;
    }

    match state.strategy {
        AdversaryStrategy::CheaterPauli {
            x,
            z,
            post_verification: false,
        } => state.apply_cheater_paulis(x, z),
        AdversaryStrategy::CheaterClifford => {
            let cheaters = state.net.config().cheaters.clone();
            for &j in &cheaters {
                if j < n_q {
                    for i in 0..n_q {
                        let q = state.branch[i][j];
                        state.tab.apply_s(q);
                        state.tab.apply_h(q);
                    }
                }
            }
        }
        _ => {}
    }

    // Standard-basis rounds: compare the shares against plus-state trees.
    state.net.set_phase(Phase::ZVerification);
    for m in 1..=r {
        let base = state.tab.num_qubits();
        let level1 = LogicalTableau::prepare_logical_plus(&state.css);
        let layout = state.deal_tree(level1, None);
        let coin = state.net.public_coin(&format!("z-{m}"));
        if coin {
            for i in 0..n_q {
                for j in 0..n_q {
                    state.tab.apply_cnot(state.branch[i][j], layout[i][j]);
                }
            }
        }
        let words = state.measure_tree(&layout);
        state.records.push(RoundRecord {
            kind: RoundKind::ZRound(m),
            words,
        });
        state.retire_tree(&layout, base);
        state.net.next_round();
    }

    // Fourier-side rounds: each main zero-tree is itself checked by r
    // sub-rounds, then compared against the Fourier-rotated shares.
    state.net.set_phase(Phase::XVerification);
    for l in 1..=r {
        let base = state.tab.num_qubits();
        let level1 = LogicalTableau::prepare_logical_zero(&state.css);
        let wrong = matches!(state.strategy, AdversaryStrategy::DealerWrongAncilla) && l == 1;
        let flips = wrong.then(|| state.css.logical_x().clone());
        let main = state.deal_tree(level1, flips.as_ref());
        for m in 1..=r {
            let sub_base = state.tab.num_qubits();
            let sub_level1 = LogicalTableau::prepare_logical_zero(&state.css);
            let sub = state.deal_tree(sub_level1, None);
            let coin = state.net.public_coin(&format!("x-{l}-{m}"));
            if coin {
                for i in 0..n_q {
                    for j in 0..n_q {
                        state.tab.apply_cnot(main[i][j], sub[i][j]);
                    }
                }
            }
            let words = state.measure_tree(&sub);
            state.records.push(RoundRecord {
                kind: RoundKind::Sub(l, m),
                words,
            });
            state.retire_tree(&sub, sub_base);
            state.net.next_round();
        }
        // Rotate shares and main block into the Fourier basis, compare,
        // then rotate the shares back.
        for i in 0..n_q {
            for j in 0..n_q {
                state.tab.apply_h(state.branch[i][j]);
                state.tab.apply_h(main[i][j]);
            }
        }
        let coin = state.net.public_coin(&format!("x-{l}-0"));
        if coin {
            for i in 0..n_q {
                for j in 0..n_q {
                    state.tab.apply_cnot(state.branch[i][j], main[i][j]);
                }
            }
        }
        let words = state.measure_tree(&main);
        state.records.push(RoundRecord {
            kind: RoundKind::XCheck(l),
            words,
        });
        state.retire_tree(&main, base);
        for i in 0..n_q {
            for j in 0..n_q {
                state.tab.apply_h(state.branch[i][j]);
            }
        }
        state.net.next_round();
    }

    let verdict = decode_records(state);
    state.passed = Some(verdict == Verdict::Pass);
    verdict
}

/// Steps run after the last broadcast: decode every leaf word and every
/// root word, accumulate accusations, and decide the verdict.
fn decode_records(state: &mut ProtocolState) -> Verdict {
    let n_q = state.n_q();
    let t = state.t();
    let mut hard_reject = false;
    let records = std::mem::take(&mut state.records);
    for rec in &records {
        let (code, fourier) = match rec.kind {
            RoundKind::ZRound(_) | RoundKind::Sub(..) => (state.css.code_v(), false),
            RoundKind::XCheck(_) => (state.css.code_w(), true),
        };
        let mut values = BitVector::zeros(n_q);
        let mut round_flagged: BTreeSet<usize> = BTreeSet::new();
        for (i, word) in rec.words.iter().enumerate() {
            match code.bounded_distance_decode(word) {
                Ok(outcome) => {
                    if let (Some(cw), Some(errs)) = (outcome.codeword(), outcome.error_positions())
                    {
                        let bit = if fourier {
                            state.css.fourier_logical_bit_of(cw)
                        } else {
                            state.css.logical_bit_of(cw)
                        };
                        values.set(i, bit);
                        if !errs.is_empty() {
                            round_flagged.insert(i);
                            for &p in errs {
                                state.sets.per_branch[i].insert(p);
                            }
                        }
                    } else {
                        // Beyond-budget leaf word: the whole branch is bad.
                        state.sets.global.insert(i);
                        round_flagged.insert(i);
                    }
                }
                Err(_) => unreachable!("word lengths are fixed by the code"),
            }
        }
        match code.bounded_distance_decode(&values) {
            Ok(outcome) => {
                if let (Some(cw), Some(errs)) = (outcome.codeword(), outcome.error_positions()) {
                    if !errs.is_empty() {
                        state.sets.global.extend(errs.iter().copied());
                        // A root inconsistency plus same-round leaf flags
                        // points at the branches behind the flags, not only
                        // at the nearest-codeword position.
                        state.sets.global.extend(round_flagged.iter().copied());
                    }
                    // Ancilla-on-ancilla roots carry no share data and must
                    // decode to the zero logical value.
                    if matches!(rec.kind, RoundKind::Sub(..)) && state.css.logical_bit_of(cw) {
                        hard_reject = true;
                    }
                } else {
                    hard_reject = true;
                }
            }
            Err(_) => unreachable!("root word length is fixed"),
        }
    }
    for (i, flags) in state.sets.per_branch.iter().enumerate() {
        if flags.len() > t {
            state.sets.global.insert(i);
        }
    }
    if hard_reject || state.sets.global.len() > t {
        Verdict::Abort
    } else {
        Verdict::Pass
    }
}

pub fn run_reconstruction(state: &mut ProtocolState) -> Result<(f64, BTreeSet<usize>), ProtocolError> {
    let n_q = state.n_q();
    let t = state.t();
    state.net.set_phase(Phase::Reconstruction);

    if let AdversaryStrategy::CheaterPauli {
        x,
        z,
        post_verification: true,
    } = state.strategy
    {
        state.apply_cheater_paulis(x, z);
    }

    // Everything travels to the reconstructor.
    let reconstructor = state.net.config().reconstructor;
    for i in 0..n_q {
        for j in 0..n_q {
            if j != reconstructor {
                let q = state.branch[i][j];
                state.net.send_qubit(j, reconstructor, q);
            }
        }
    }
    state.net.flush();

    // Classical key first.
    let lying = matches!(state.strategy, AdversaryStrategy::CheaterBroadcastLie);
    let cheaters = state.net.config().cheaters.clone();
    let claims: Vec<ClaimedShare<Gf256>> = state
        .key_shares
        .iter()
        .map(|s| {
            let mut c = s.claim();
            if lying && cheaters.contains(&c.node) {
                c.share_a = c.share_a.add(Gf256::ONE);
            }
            c
        })
        .collect();
    for c in &claims {
        let digest = fnv64(&[c.node as u8, c.share_a.0, c.share_b.0]);
        state
            .net
            .send_private(c.node, reconstructor, &digest.to_le_bytes());
    }
    let key =
        vcss_reconstruct(&claims, &state.key_shares, t).map_err(|_| ProtocolError::KeyLost)?;

    // Per-branch correction; a branch needing more than t fixes joins the
    // accused set.
    let mut accused = state.sets.global.clone();
    for i in 0..n_q {
        if accused.contains(&i) {
            continue;
        }
        let positions = state.branch[i].clone();
        match state.tab.correct_block_at(&state.css, &positions, &mut state.rng) {
            Ok((ex, ez)) => {
                let mut b_tilde = state.sets.per_branch[i].clone();
                b_tilde.extend(ex);
                b_tilde.extend(ez);
                if b_tilde.len() > t {
                    accused.insert(i);
                }
            }
            Err(_) => {
                accused.insert(i);
            }
        }
    }
    if accused.len() > 2 * t {
        return Err(ProtocolError::Unrecoverable {
            accused: accused.len(),
            budget: 2 * t,
        });
    }

    // Erasure recovery: read the logical through representatives supported
    // on a random (n_q − 2t)-subset of surviving branches.
    let mut survivors: Vec<usize> = (0..n_q).filter(|i| !accused.contains(i)).collect();
    let mut pick_rng =
        ChaCha8Rng::seed_from_u64(fnv64(&state.net.config().seed.to_le_bytes()) ^ 0x7265636f);
    for k in (1..survivors.len()).rev() {
        let j = pick_rng.gen_range(0..=k);
        survivors.swap(k, j);
    }
    survivors.truncate(n_q - 2 * t);
    survivors.sort_unstable();
    let erased: Vec<usize> = (0..n_q).filter(|i| !survivors.contains(i)).collect();

    let css = state.css.clone();
    let vz = css
        .z_stabilizers()
        .row_space_element_matching(css.logical_z(), &erased)
        .ok_or(ProtocolError::LogicalLost)?;
    let u_z = css.logical_z().xor(&vz);
    let vx = css
        .x_stabilizers()
        .row_space_element_matching(css.logical_x(), &erased)
        .ok_or(ProtocolError::LogicalLost)?;
    let u_x = css.logical_x().xor(&vx);

    let n_tot = state.tab.num_qubits();
    let mut lz_sup = BitVector::zeros(n_tot);
    for i in u_z.support() {
        lz_sup.xor_assign(&embed_at(css.logical_z(), n_tot, &state.branch[i]));
    }
    let mut lx_sup = BitVector::zeros(n_tot);
    for i in u_x.support() {
        lx_sup.xor_assign(&embed_at(css.logical_x(), n_tot, &state.branch[i]));
    }
    let lz = PauliWord::from_xz(BitVector::zeros(n_tot), lz_sup);
    let lx = PauliWord::from_xz(lx_sup, BitVector::zeros(n_tot));
    let ez = state
        .tab
        .logical_rep_sign(&lz, true)
        .ok_or(ProtocolError::LogicalLost)?;
    let ex = state
        .tab
        .logical_rep_sign(&lx, false)
        .ok_or(ProtocolError::LogicalLost)?;
    let mut amps = state.tab.amplitudes().ok_or(ProtocolError::LogicalLost)?;
    if ez {
        amps.apply_x();
    }
    if ex {
        amps.apply_z();
    }
    // Undo the pad.
    if key.0 {
        amps.apply_x();
    }
    if key.1 {
        amps.apply_z();
    }
    Ok((amps.fidelity(&state.plaintext), accused))
}

pub fn run_full(
    cfg: NetworkConfig,
    css: &CssCode,
    secret: AmplitudePair,
    strategy: AdversaryStrategy,
    r: usize,
    rng: ChaCha8Rng,
) -> Result<Transcript, ProtocolError> {
    let seed = cfg.seed;
    let mut state = run_sharing(cfg, css, secret, strategy, r, rng);
    let verdict = run_verification(&mut state);
    let (fidelity, accused) = match verdict {
        Verdict::Abort => (None, state.sets.global.clone()),
        Verdict::Pass => {
            let (f, accused) = run_reconstruction(&mut state)?;
            (Some(f), accused)
        }
    };
    let n = state.net.config().n;
    let peak_workspace = PeakWorkspace {
        sharing: (0..n).map(|j| state.net.peak(Phase::Sharing, j)).collect(),
        z_rounds: (0..n)
            .map(|j| state.net.peak(Phase::ZVerification, j))
            .collect(),
        x_rounds: (0..n)
            .map(|j| state.net.peak(Phase::XVerification, j))
            .collect(),
    };
    Ok(Transcript {
        aborted: verdict == Verdict::Abort,
        accused: accused.into_iter().collect(),
        fidelity,
        peak_workspace,
        seed,
        theoretical_eps_c: theoretical_bounds(r, 0.1, 0.1, 0.1).1,
    })
}

/// Closed-form bounds: abort probability lower bound given analysis
/// thresholds, the completeness slack (2 + r)·2^{−r}, and the implied
/// fidelity lower bound.
pub fn theoretical_bounds(r: usize, delta: f64, delta_p: f64, delta_pp: f64) -> (f64, f64, f64) {
    let p = 2f64.powi(-(r as i32));
    let abort = 1.0 - (p / delta).max(p / delta_p).max(p / delta_pp);
    let eps_c = (2.0 + r as f64) * p;
    (abort, eps_c, 1.0 - eps_c)
}

/// Average the padded single-qubit density operator over the four pad keys;
/// the off-diagonal terms cancel and the diagonal flattens, leaving I/2.
pub fn key_averaged_density(secret: &AmplitudePair) -> [[num_complex::Complex64; 2]; 2] {
    let mut acc = [[num_complex::Complex64::new(0.0, 0.0); 2]; 2];
    for key in 0..4u8 {
        let mut amps = *secret;
        if key & 2 != 0 {
            amps.apply_z();
        }
        if key & 1 != 0 {
            amps.apply_x();
        }
        let v = [amps.alpha, amps.beta];
        for r in 0..2 {
            for c in 0..2 {
                acc[r][c] += v[r] * v[c].conj() * 0.25;
            }
        }
    }
    acc
}

/// What a fixed node subset sees in one honest run: its classical key
/// shares plus every broadcast bit, folded into one digest. Used for the
/// view-indistinguishability estimate.
pub fn subset_view_digest(
    css: &CssCode,
    secret: AmplitudePair,
    r: usize,
    seed: u64,
    nodes: &[usize],
) -> u64 {
    let cfg = NetworkConfig::honest(css.n(), css.n(), seed);
    let rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = run_sharing(cfg, css, secret, AdversaryStrategy::Honest, r, rng);
    let _ = run_verification(&mut state);
    let mut bytes = Vec::new();
    for &j in nodes {
        bytes.extend_from_slice(&state.key_shares[j].to_bytes());
    }
    for (sender, payload) in state.net.broadcasts() {
        bytes.push(*sender as u8);
        bytes.extend_from_slice(payload);
    }
    fnv64(&bytes)
}
