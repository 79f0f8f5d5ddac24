//! Synchronous network bookkeeping for one protocol run.
//!
//! Qubits live in one global tableau; this module tracks who holds which
//! tableau column, meters per-node workspace peaks per phase, logs message
//! rounds, and serves public coins derived from the run seed. A qubit in
//! transit belongs to the channel, not to either endpoint; deliveries land
//! when the round is flushed, which is what keeps the receiving node's
//! simultaneous holdings at the protocol's advertised bounds.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub n: usize,
    pub n_q: usize,
    pub n_c: usize,
    pub cheaters: BTreeSet<usize>,
    pub dealer: usize,
    pub reconstructor: usize,
    pub seed: u64,
}

impl NetworkConfig {
    pub fn honest(n_q: usize, n_c: usize, seed: u64) -> NetworkConfig {
        NetworkConfig {
            n: n_q.max(n_c),
            n_q,
            n_c,
            cheaters: BTreeSet::new(),
            dealer: 0,
            reconstructor: 0,
            seed,
        }
    }

    pub fn with_cheaters(mut self, cheaters: &[usize]) -> NetworkConfig {
        self.cheaters = cheaters.iter().copied().collect();
        self
    }
}

/// Adversary playbook, fixed before round zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum AdversaryStrategy {
    Honest,
    /// Dealer injects leaf errors on two branches of the secret tree whose
    /// miscorrection flips those branches' logical readout, producing an
    /// inconsistent tree that only a coin value of zero leaves unseen.
    DealerInconsistentTree,
    /// Dealer injects more than t Pauli errors into a single branch.
    DealerOverweightErrors,
    /// Dealer distributes a logically wrong ancilla block in one round.
    DealerWrongAncilla,
    /// Cheater nodes apply the given Pauli to each of their held qubits.
    CheaterPauli {
        x: bool,
        z: bool,
        post_verification: bool,
    },
    /// Cheater nodes announce flipped measurement results.
    CheaterBroadcastLie,
    /// Cheater nodes run a fixed Clifford (S then H) on their qubits before
    /// verification.
    CheaterClifford,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    Sharing,
    ZVerification,
    XVerification,
    Reconstruction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Owner {
    Node(usize),
    /// In flight toward a node; delivered at round flush.
    Channel { to: usize },
}

/// Stable 64-bit digest for log lines and view bucketing.
pub fn fnv64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

#[derive(Debug)]
pub struct Network {
    config: NetworkConfig,
    owners: Vec<Owner>,
    held: Vec<usize>,
    phase: Phase,
    /// peak[phase][node]
    peaks: HashMap<Phase, Vec<usize>>,
    used_labels: BTreeSet<String>,
    round: usize,
    log: Vec<String>,
    broadcasts: Vec<(usize, Vec<u8>)>,
}

impl Network {
    pub fn new(config: NetworkConfig) -> Network {
        let n = config.n;
        Network {
            config,
            owners: Vec::new(),
            held: vec![0; n],
            phase: Phase::Sharing,
            peaks: HashMap::new(),
            used_labels: BTreeSet::new(),
            round: 0,
            log: Vec::new(),
            broadcasts: Vec::new(),
        }
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.config
    }

    pub fn set_phase(&mut self, phase: Phase) {
        self.phase = phase;
    }

    pub fn next_round(&mut self) {
        self.round += 1;
    }

    fn bump_peak(&mut self, node: usize) {
        let n = self.config.n;
        let entry = self.peaks.entry(self.phase).or_insert_with(|| vec![0; n]);
        entry[node] = entry[node].max(self.held[node]);
    }

    /// Register a fresh tableau qubit owned by `node` (appended column).
    pub fn alloc_qubit(&mut self, node: usize) -> usize {
        self.owners.push(Owner::Node(node));
        self.held[node] += 1;
        self.bump_peak(node);
        self.owners.len() - 1
    }

    pub fn owner(&self, q: usize) -> Owner {
        self.owners[q]
    }

    pub fn holds(&self, node: usize, q: usize) -> bool {
        self.owners[q] == Owner::Node(node)
    }

    pub fn qubits_of(&self, node: usize) -> Vec<usize> {
        (0..self.owners.len())
            .filter(|&q| self.owners[q] == Owner::Node(node))
            .collect()
    }

    /// Hand a qubit to the channel toward `to`.
    pub fn send_qubit(&mut self, from: usize, to: usize, q: usize) {
        assert_eq!(self.owners[q], Owner::Node(from), "sender must hold the qubit");
        self.owners[q] = Owner::Channel { to };
        self.held[from] -= 1;
        self.log.push(format!(
            "{} | quantum | {} | {} | qubit | {:016x}",
            self.round,
            from,
            to,
            fnv64(&q.to_le_bytes())
        ));
    }

    /// Deliver everything in flight.
    pub fn flush(&mut self) {
        for q in 0..self.owners.len() {
            if let Owner::Channel { to } = self.owners[q] {
                self.owners[q] = Owner::Node(to);
                self.held[to] += 1;
                self.bump_peak(to);
            }
        }
        self.round += 1;
    }

    /// Remove a measured qubit; callers retire the same column from the
    /// tableau.
    pub fn retire_qubit(&mut self, q: usize) {
        match self.owners.remove(q) {
            Owner::Node(node) => self.held[node] -= 1,
            Owner::Channel { .. } => panic!("cannot retire a qubit in flight"),
        }
    }

    /// Authenticated broadcast: everyone sees the same payload and sender.
    pub fn broadcast(&mut self, sender: usize, payload: Vec<u8>) {
        self.log.push(format!(
            "{} | broadcast | {} | * | msg | {:016x}",
            self.round,
            sender,
            fnv64(&payload)
        ));
        self.broadcasts.push((sender, payload));
    }

    pub fn broadcasts(&self) -> &[(usize, Vec<u8>)] {
        &self.broadcasts
    }

    /// Classical private message; logged with digest only.
    pub fn send_private(&mut self, from: usize, to: usize, payload: &[u8]) {
        self.log.push(format!(
            "{} | classical | {} | {} | msg | {:016x}",
            self.round,
            from,
            to,
            fnv64(payload)
        ));
    }

    /// Public coin for a fresh label: derived from the run seed, identical
    /// for all nodes, reproducible per (seed, label).
    pub fn public_coin(&mut self, label: &str) -> bool {
        assert!(
            self.used_labels.insert(label.to_string()),
            "public coin label reused: {label}"
        );
        let mut bytes = self.config.seed.to_le_bytes().to_vec();
        bytes.extend_from_slice(label.as_bytes());
        // FNV's low bit only depends on the input parity, so labels that
        // differ in one low bit would give complementary coins. Finalize
        // with an avalanche mix before taking a bit.
        let mut h = fnv64(&bytes);
        h = (h ^ (h >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        h = (h ^ (h >> 27)).wrapping_mul(0x94d049bb133111eb);
        h ^= h >> 31;
        h & 1 == 1
    }

    pub fn peak(&self, phase: Phase, node: usize) -> usize {
        self.peaks.get(&phase).map_or(0, |v| v[node])
    }

    pub fn max_peak(&self, phase: Phase) -> usize {
        self.peaks
            .get(&phase)
            .map_or(0, |v| v.iter().copied().max().unwrap_or(0))
    }

    pub fn round_log(&self) -> &[String] {
        &self.log
    }

    pub fn num_qubits(&self) -> usize {
        self.owners.len()
    }
}
