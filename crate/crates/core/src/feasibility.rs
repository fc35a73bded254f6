//! Single-stream IA feasibility by variable/equation counting.
//!
//! A configuration is feasible iff every sub-IC `(S_RX, S_TX)` has at least as
//! many beamformer variables as alignment equations. Two deciders live here:
//!
//! * [`is_feasible_bruteforce`] checks all `4^K` subset pairs;
//! * [`is_feasible`] only visits the sub-ICs produced by the ordered greedy
//!   scan (the same scan the CSIT allocation uses), started from the empty
//!   sub-IC and from every single transmitter and receiver.
//!
//! Their agreement is checked exhaustively in the test suites.

use std::cmp::Reverse;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{AntennaConfig, SubIc};
use crate::error::{Error, Result};

/// Largest `K` accepted by the brute-force oracle.
pub const BRUTE_FORCE_MAX_USERS: usize = 10;

/// `N_Var(S_RX, S_TX) = Σ_{i∈S_RX}(N_i − 1) + Σ_{j∈S_TX}(M_j − 1)`.
pub fn n_var(config: &AntennaConfig, s: SubIc) -> i64 {
    let rx: usize = s.rx_indices().map(|i| config.rx_antennas()[i] - 1).sum();
    let tx: usize = s.tx_indices().map(|j| config.tx_antennas()[j] - 1).sum();
    (rx + tx) as i64
}

/// `N_Eq(S_RX, S_TX)`: ordered pairs `(j, k)`, `j ∈ S_RX`, `k ∈ S_TX`, `j ≠ k`.
pub fn n_eq(s: SubIc) -> i64 {
    let paired = (s.rx_mask() & s.tx_mask()).count_ones();
    (s.rx_len() * s.tx_len()) as i64 - paired as i64
}

/// `N_Var − N_Eq`.
pub fn slack(config: &AntennaConfig, s: SubIc) -> i64 {
    n_var(config, s) - n_eq(s)
}

/// True for a non-empty sub-IC with exactly as many variables as equations.
pub fn is_tight(config: &AntennaConfig, s: SubIc) -> bool {
    !s.is_empty() && slack(config, s) == 0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Classification {
    Infeasible,
    Tight,
    Super,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub n_var: i64,
    pub n_eq: i64,
}

/// Verdict plus an optional witness sub-IC.
///
/// For an infeasible configuration the witness violates the counting bound;
/// otherwise it is a tight sub-IC when one was found.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub classification: Classification,
    pub witness: Option<SubIc>,
    pub counts: Option<Counts>,
}

impl FeasibilityReport {
    fn new(config: &AntennaConfig, feasible: bool, witness: Option<SubIc>) -> Self {
        let classification = if !feasible {
            Classification::Infeasible
        } else if excess_antennas(config) == 0 {
            Classification::Tight
        } else {
            Classification::Super
        };
        Self {
            feasible,
            classification,
            witness,
            counts: witness.map(|s| Counts {
                n_var: n_var(config, s),
                n_eq: n_eq(s),
            }),
        }
    }
}

/// `S = Σ(M_i + N_i) − K(K+1)`. Negative values are infeasible by counting.
pub fn excess_antennas(config: &AntennaConfig) -> i64 {
    let k = config.users() as i64;
    config.total_antennas() as i64 - k * (k + 1)
}

/// Checks every `(S_RX, S_TX)` pair.
///
/// Pairs are visited in lexicographic order of `(rx_mask, tx_mask)`; the first
/// violating pair is the witness. For feasible configurations the witness is
/// the first tight non-empty pair in the same order.
pub fn is_feasible_bruteforce(config: &AntennaConfig) -> Result<FeasibilityReport> {
    let k = config.users();
    if k > BRUTE_FORCE_MAX_USERS {
        return Err(Error::GuardExceeded(format!(
            "brute-force feasibility is limited to K <= {BRUTE_FORCE_MAX_USERS} (got {k})"
        )));
    }
    let span = 1u32 << k;
    let first_where = |pred: &(dyn Fn(SubIc) -> bool + Sync)| -> Option<SubIc> {
        let scan_rx = |rx: u32| (0..span).map(move |tx| SubIc::from_masks(rx, tx)).find(|&s| pred(s));
        if k >= 8 {
            // Each worker reports its own first hit; the smallest mask wins.
            (0..span).into_par_iter().filter_map(scan_rx).min()
        } else {
            (0..span).find_map(scan_rx)
        }
    };
    if let Some(bad) = first_where(&|s| slack(config, s) < 0) {
        return Ok(FeasibilityReport::new(config, false, Some(bad)));
    }
    let tight = first_where(&|s| is_tight(config, s));
    Ok(FeasibilityReport::new(config, true, tight))
}

/// Where a scan starts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Anchor {
    /// `S = (∅, ∅)`.
    Empty,
    /// `S = (∅, {j})`.
    Tx(usize),
    /// `S = ({i}, ∅)`.
    Rx(usize),
}

/// The transmitter and receiver permutations used by the scan.
///
/// Transmitters: increasing `M`; equal `M` by decreasing paired `N`.
/// Receivers: increasing `N`; equal `N` by decreasing paired `M`; users whose
/// `(N, M)` pairs coincide get receivers in the reverse of their transmitter
/// order. Remaining ties go by ascending index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanOrder {
    pub tx: Vec<usize>,
    pub rx: Vec<usize>,
}

impl ScanOrder {
    pub fn new(config: &AntennaConfig) -> Self {
        let n = config.rx_antennas();
        let m = config.tx_antennas();
        let mut tx: Vec<usize> = (0..config.users()).collect();
        tx.sort_by_key(|&j| (m[j], Reverse(n[j]), j));
        let mut tx_pos = vec![0; tx.len()];
        for (p, &j) in tx.iter().enumerate() {
            tx_pos[j] = p;
        }
        let mut rx: Vec<usize> = (0..config.users()).collect();
        rx.sort_by_key(|&i| (n[i], Reverse(m[i]), Reverse(tx_pos[i])));
        Self { tx, rx }
    }
}

/// Iterator over the sub-ICs visited by the greedy scan.
///
/// Each step adds the next receiver if doing so strictly lowers the slack
/// `N_Var − N_Eq` (the receiver brings more equations than variables),
/// otherwise the next transmitter. Once every transmitter is in, the scan
/// either stops (`drain_rx == false`, the allocation rule) or keeps adding the
/// remaining receivers (`drain_rx == true`, used by the feasibility tester).
pub struct Scan<'a> {
    config: &'a AntennaConfig,
    rx_queue: Vec<usize>,
    tx_queue: Vec<usize>,
    next_rx: usize,
    next_tx: usize,
    state: SubIc,
    started: bool,
    drain_rx: bool,
}

impl<'a> Scan<'a> {
    pub fn new(config: &'a AntennaConfig, order: &ScanOrder, anchor: Anchor, drain_rx: bool) -> Self {
        let state = match anchor {
            Anchor::Empty => SubIc::EMPTY,
            Anchor::Tx(j) => SubIc::EMPTY.with_tx(j),
            Anchor::Rx(i) => SubIc::EMPTY.with_rx(i),
        };
        Self {
            config,
            rx_queue: order.rx.iter().copied().filter(|&i| !state.has_rx(i)).collect(),
            tx_queue: order.tx.iter().copied().filter(|&j| !state.has_tx(j)).collect(),
            next_rx: 0,
            next_tx: 0,
            state,
            started: false,
            drain_rx,
        }
    }
}

impl Iterator for Scan<'_> {
    type Item = SubIc;

    fn next(&mut self) -> Option<SubIc> {
        if !self.started {
            self.started = true;
            return Some(self.state);
        }
        let s = self.state;
        if let Some(&r) = self.rx_queue.get(self.next_rx) {
            let grown = s.with_rx(r);
            if slack(self.config, grown) < slack(self.config, s) {
                self.next_rx += 1;
                self.state = grown;
                return Some(grown);
            }
        }
        if let Some(&t) = self.tx_queue.get(self.next_tx) {
            self.next_tx += 1;
            self.state = s.with_tx(t);
            return Some(self.state);
        }
        if self.drain_rx {
            if let Some(&r) = self.rx_queue.get(self.next_rx) {
                self.next_rx += 1;
                self.state = s.with_rx(r);
                return Some(self.state);
            }
        }
        None
    }
}

/// Runs the allocation scan from `anchor` and returns the first tight
/// sub-IC, or `None` if the scan ends (all transmitters included, next
/// receiver rejected) without reaching tightness.
pub fn smallest_tight_subic(config: &AntennaConfig, anchor: Anchor) -> Option<SubIc> {
    let order = ScanOrder::new(config);
    smallest_tight_with(config, &order, anchor)
}

pub(crate) fn smallest_tight_with(config: &AntennaConfig, order: &ScanOrder, anchor: Anchor) -> Option<SubIc> {
    Scan::new(config, order, anchor, false).find(|&s| is_tight(config, s))
}

/// Every scan start point the polynomial tester uses, in visiting order.
pub(crate) fn all_anchors(users: usize) -> impl Iterator<Item = Anchor> {
    std::iter::once(Anchor::Empty)
        .chain((0..users).map(Anchor::Tx))
        .chain((0..users).map(Anchor::Rx))
}

/// Polynomial-time feasibility test.
///
/// Runs the receiver-draining scan from `(∅, ∅)`, then from every single
/// transmitter, then from every single receiver; the first visited sub-IC
/// with `N_Var < N_Eq` is reported as the witness. Visits at most
/// `(2K + 1) · 2K` sub-ICs.
pub fn is_feasible(config: &AntennaConfig) -> FeasibilityReport {
    let order = ScanOrder::new(config);
    for anchor in all_anchors(config.users()) {
        if let Some(bad) = Scan::new(config, &order, anchor, true).find(|&s| slack(config, s) < 0) {
            return FeasibilityReport::new(config, false, Some(bad));
        }
    }
    let tight = Scan::new(config, &order, Anchor::Empty, true).find(|&s| is_tight(config, s));
    FeasibilityReport::new(config, true, tight)
}
