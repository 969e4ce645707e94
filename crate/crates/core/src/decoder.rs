//! Bin decoding and the peeling decoder.
//!
//! The bin decoder recognizes two situations: a bin holding exactly one
//! defective (a singleton), and a bin holding two defectives one of which is
//! already known (a resolvable doubleton). Everything else is left alone.
//! The peeling decoder runs the singleton test on every bin, then feeds each
//! recovered item back through its bins looking for resolvable doubletons.

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::ecc::{Bits, BitsRef};
use crate::encoder::{Measurements, TestingScheme};
use crate::graph::Edge;
use crate::signature::SignatureMatrix;
use crate::{Error, Result};

/// Outcome of a bin decode in slot coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotVerdict {
    Zeroton,
    Singleton(u64),
    Unresolved,
}

/// Outcome of a bin decode resolved to an item.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinVerdict {
    Zeroton,
    Singleton { slot: u64, item: u64 },
    Unresolved,
}

/// Which bin-decoding rules to apply.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BinRule {
    /// Identity-coded signatures, exact measurements. With `verify_reencode`
    /// a doubleton is only accepted if the two columns OR back to the
    /// observation exactly.
    Noiseless { verify_reencode: bool },
    /// Coded signatures under test noise. Bins whose weight is below
    /// `zeroton_weight · h` are declared empty.
    Robust { zeroton_weight: f64 },
}

impl BinRule {
    pub const NOISELESS: BinRule = BinRule::Noiseless { verify_reencode: true };
    pub const ROBUST: BinRule = BinRule::Robust { zeroton_weight: 0.25 };

    /// The default rule for a signature: noiseless for identity codes,
    /// robust otherwise.
    pub fn for_signature(sig: &SignatureMatrix) -> Self {
        if sig.is_coded() {
            Self::ROBUST
        } else {
            Self::NOISELESS
        }
    }

    pub fn decode_singleton(&self, sig: &SignatureMatrix, obs: &BitsRef) -> SlotVerdict {
        match *self {
            BinRule::Noiseless { .. } => decode_singleton(sig, obs),
            BinRule::Robust { zeroton_weight } => decode_singleton_robust_with(sig, obs, zeroton_weight),
        }
    }

    pub fn decode_resolvable_doubleton(&self, sig: &SignatureMatrix, obs: &BitsRef, known: u64) -> Option<u64> {
        match *self {
            BinRule::Noiseless { verify_reencode } => {
                decode_resolvable_doubleton_with(sig, obs, known, verify_reencode)
            }
            BinRule::Robust { .. } => decode_resolvable_doubleton_robust(sig, obs, known),
        }
    }
}

/// Column index agreed on by every section's first segment, if any.
fn consistent_slot<'a>(sig: &SignatureMatrix, segments: impl IntoIterator<Item = &'a BitsRef>) -> Option<u64> {
    let mut agreed = None;
    for (i, seg) in segments.into_iter().enumerate() {
        let j = sig.locate(i, seg)?;
        match agreed {
            None => agreed = Some(j),
            Some(a) if a != j => return None,
            _ => {}
        }
    }
    agreed
}

/// Noiseless singleton test: every section must hold a segment and its exact
/// complement, and all sections must point at the same column.
pub fn decode_singleton(sig: &SignatureMatrix, obs: &BitsRef) -> SlotVerdict {
    assert_eq!(obs.len(), sig.h(), "observation height");
    if obs.not_any() {
        return SlotVerdict::Zeroton;
    }
    for i in 0..sig.sections() {
        let (a, b) = sig.segment_ranges(i);
        let complement = obs[a].iter().by_vals().zip(obs[b].iter().by_vals()).all(|(x, y)| x != y);
        if !complement {
            return SlotVerdict::Unresolved;
        }
    }
    let segments = (0..sig.sections()).map(|i| &obs[sig.segment_ranges(i).0]);
    match consistent_slot(sig, segments) {
        Some(j) => SlotVerdict::Singleton(j),
        None => SlotVerdict::Unresolved,
    }
}

/// Robust singleton test with the default zeroton threshold.
pub fn decode_singleton_robust(sig: &SignatureMatrix, obs: &BitsRef) -> SlotVerdict {
    BinRule::ROBUST.decode_singleton(sig, obs)
}

fn decode_singleton_robust_with(sig: &SignatureMatrix, obs: &BitsRef, zeroton_weight: f64) -> SlotVerdict {
    assert_eq!(obs.len(), sig.h(), "observation height");
    // A nonempty bin carries exactly h/2 ones before noise.
    if (obs.count_ones() as f64) < zeroton_weight * sig.h() as f64 {
        return SlotVerdict::Zeroton;
    }
    let segments = (0..sig.sections()).map(|i| &obs[sig.segment_ranges(i).0]);
    match consistent_slot(sig, segments) {
        Some(j) => SlotVerdict::Singleton(j),
        None => SlotVerdict::Unresolved,
    }
}

/// Recover the first segments of the unknown partner in a bin holding a
/// known column. Where the known column's first segment is 0 the
/// observation's first segment is read directly; where it is 1 the known
/// column's second segment is 0, so the complement of the observation's
/// second segment is used.
pub fn strip_known(sig: &SignatureMatrix, obs: &BitsRef, known_slot: u64) -> Vec<Bits> {
    assert_eq!(obs.len(), sig.h(), "observation height");
    (0..sig.sections())
        .map(|i| {
            let (a, b) = sig.segment_ranges(i);
            let known = sig.first_segment(i, known_slot);
            known
                .iter()
                .by_vals()
                .zip(obs[a].iter().by_vals().zip(obs[b].iter().by_vals()))
                .map(|(k, (first, second))| if k { !second } else { first })
                .collect()
        })
        .collect()
}

/// Noiseless resolvable-doubleton decoding with re-encode verification.
/// Returns the partner slot, or `known_slot` itself when the bin is a pure
/// singleton on it.
pub fn decode_resolvable_doubleton(sig: &SignatureMatrix, obs: &BitsRef, known_slot: u64) -> Option<u64> {
    decode_resolvable_doubleton_with(sig, obs, known_slot, true)
}

/// As [`decode_resolvable_doubleton`], optionally without the final
/// re-encode check (cross-section consistency only).
pub fn decode_resolvable_doubleton_with(
    sig: &SignatureMatrix,
    obs: &BitsRef,
    known_slot: u64,
    verify_reencode: bool,
) -> Option<u64> {
    if known_slot >= sig.r() {
        return None;
    }
    let segments = strip_known(sig, obs, known_slot);
    let cand = consistent_slot(sig, segments.iter().map(|s| s.as_bitslice()))?;
    if verify_reencode {
        let mut both = sig.column_unchecked(known_slot);
        both |= sig.column_unchecked(cand).as_bitslice();
        if both.as_bitslice() != obs {
            return None;
        }
    }
    Some(cand)
}

/// Robust resolvable-doubleton decoding: strip, decode every section, and
/// require cross-section agreement.
pub fn decode_resolvable_doubleton_robust(sig: &SignatureMatrix, obs: &BitsRef, known_slot: u64) -> Option<u64> {
    decode_resolvable_doubleton_with(sig, obs, known_slot, false)
}

/// Run the singleton test on one bin of a scheme and resolve the item.
pub fn classify_bin(scheme: &TestingScheme, rule: BinRule, bin: u64, obs: &BitsRef) -> BinVerdict {
    match rule.decode_singleton(scheme.signature(), obs) {
        SlotVerdict::Zeroton => BinVerdict::Zeroton,
        SlotVerdict::Unresolved => BinVerdict::Unresolved,
        SlotVerdict::Singleton(slot) => match scheme.graph().edge_item(Edge { bin, slot }) {
            Some(item) => BinVerdict::Singleton { slot, item },
            // Slot beyond this bin's degree (balanced or baseline graphs).
            None => BinVerdict::Unresolved,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecodeOptions {
    pub rule: BinRule,
    /// Stop the peeling phase after this many items have been processed.
    pub max_pops: Option<usize>,
}

impl DecodeOptions {
    pub fn for_scheme(scheme: &TestingScheme) -> Self {
        DecodeOptions {
            rule: BinRule::for_signature(scheme.signature()),
            max_pops: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DecodeResult {
    /// Recovered items, sorted.
    pub recovered: Vec<u64>,
    /// Bin decodes attempted, singleton tests included.
    pub n_bin_decodes: u64,
    /// Items processed by the peeling phase.
    pub n_iterations: u64,
    /// Distinct items found by the singleton pass.
    pub initial_singletons: u64,
    /// Items found through resolvable doubletons.
    pub peeled_items: u64,
    /// The peeling phase stopped at `max_pops` with work left.
    pub hit_pop_cap: bool,
}

fn check_shapes(scheme: &TestingScheme, meas: &Measurements) -> Result<()> {
    let g = scheme.graph();
    if meas.n_bins() != g.n_bins() || meas.h() != scheme.h() || meas.n_items() != g.n_items() {
        return Err(Error::input(format!(
            "measurements ({} items, {} bins × {} bits) do not match the scheme ({} items, {} bins × {} bits)",
            meas.n_items(),
            meas.n_bins(),
            meas.h(),
            g.n_items(),
            g.n_bins(),
            scheme.h()
        )));
    }
    Ok(())
}

struct SingletonPass {
    queue: VecDeque<u64>,
    seen: HashSet<u64>,
    decodes: u64,
}

fn singleton_pass(scheme: &TestingScheme, meas: &Measurements, rule: BinRule) -> SingletonPass {
    let mut pass = SingletonPass {
        queue: VecDeque::new(),
        seen: HashSet::new(),
        decodes: 0,
    };
    for bin in 0..scheme.graph().n_bins() {
        pass.decodes += 1;
        if let BinVerdict::Singleton { item, .. } = classify_bin(scheme, rule, bin, meas.bin(bin)) {
            if pass.seen.insert(item) {
                pass.queue.push_back(item);
            }
        }
    }
    pass
}

/// Singleton pass followed by FIFO peeling through resolvable doubletons.
/// Each `(bin, known slot)` pair is decoded at most once.
pub fn peel_with(scheme: &TestingScheme, meas: &Measurements, opts: DecodeOptions) -> Result<DecodeResult> {
    check_shapes(scheme, meas)?;
    let graph = scheme.graph();
    let sig = scheme.signature();
    let SingletonPass {
        mut queue,
        mut seen,
        decodes,
    } = singleton_pass(scheme, meas, opts.rule);
    let mut result = DecodeResult {
        n_bin_decodes: decodes,
        initial_singletons: seen.len() as u64,
        ..DecodeResult::default()
    };
    let mut tried: HashSet<Edge> = HashSet::new();
    let mut done = Vec::with_capacity(seen.len());
    let mut edges = Vec::with_capacity(graph.left_degree() as usize);
    while let Some(&v) = queue.front() {
        if opts.max_pops.is_some_and(|cap| result.n_iterations as usize >= cap) {
            result.hit_pop_cap = true;
            break;
        }
        queue.pop_front();
        result.n_iterations += 1;
        done.push(v);
        graph.item_edges_into(v, &mut edges);
        for &e in &edges {
            if !tried.insert(e) {
                continue;
            }
            result.n_bin_decodes += 1;
            let Some(partner) = opts.rule.decode_resolvable_doubleton(sig, meas.bin(e.bin), e.slot) else {
                continue;
            };
            if partner == e.slot {
                continue;
            }
            if let Some(u) = graph.edge_item(Edge {
                bin: e.bin,
                slot: partner,
            }) {
                if seen.insert(u) {
                    queue.push_back(u);
                    result.peeled_items += 1;
                }
            }
        }
    }
    // Items still queued at a cap were identified but never processed.
    done.extend(queue);
    done.sort_unstable();
    result.recovered = done;
    Ok(result)
}

/// Noiseless peeling with re-encode verification.
pub fn peel(scheme: &TestingScheme, meas: &Measurements) -> Result<DecodeResult> {
    peel_with(
        scheme,
        meas,
        DecodeOptions {
            rule: BinRule::NOISELESS,
            max_pops: None,
        },
    )
}

/// Peeling with the robust bin decoder.
pub fn peel_robust(scheme: &TestingScheme, meas: &Measurements) -> Result<DecodeResult> {
    peel_with(
        scheme,
        meas,
        DecodeOptions {
            rule: BinRule::ROBUST,
            max_pops: None,
        },
    )
}

/// The singleton pass alone.
pub fn singleton_only_decode_with(scheme: &TestingScheme, meas: &Measurements, rule: BinRule) -> Result<DecodeResult> {
    check_shapes(scheme, meas)?;
    let pass = singleton_pass(scheme, meas, rule);
    let mut recovered: Vec<u64> = pass.queue.into_iter().collect();
    recovered.sort_unstable();
    Ok(DecodeResult {
        initial_singletons: recovered.len() as u64,
        recovered,
        n_bin_decodes: pass.decodes,
        ..DecodeResult::default()
    })
}

pub fn singleton_only_decode(scheme: &TestingScheme, meas: &Measurements) -> Result<DecodeResult> {
    singleton_only_decode_with(scheme, meas, BinRule::for_signature(scheme.signature()))
}
