//! Item-to-bin pooling graphs.
//!
//! The regular ensemble pairs the `N·ℓ` item-side edge endpoints with the
//! `M·r` bin-side slots through a single permutation: copy `j` of item `v` is
//! edge `v·ℓ + j`, which lands in global slot `π(v·ℓ + j)`. Global slots are
//! laid out bin after bin, so a slot index splits into `(bin, slot-in-bin)`
//! with a division. Parallel edges (an item landing twice in one bin) are
//! allowed, as in any configuration model.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::perm::{FeistelPermutation, Permutation, TablePermutation};
use crate::{Error, Result};

/// How bin sizes relate to `N·ℓ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BinSizing {
    /// Every bin holds exactly `r` slots; requires `N·ℓ = M·r`.
    Exact,
    /// `M` is free; bins hold `r` or `r - 1` slots with `r = ⌈N·ℓ / M⌉`.
    Balanced,
}

/// Which wiring a graph uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    /// Regular ensemble, permutation sampled and stored as a table.
    ExplicitPermutation,
    /// Regular ensemble, permutation evaluated by a keyed Feistel network.
    PseudorandomPermutation,
    /// Left-regular baseline: each edge picks a bin uniformly.
    LeftRegular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphParams {
    pub n_items: u64,
    pub n_bins: u64,
    pub left_degree: u32,
    /// Slots per bin. For balanced sizing this is the larger of the two bin
    /// sizes; for the left-regular baseline it is the largest realized degree.
    pub right_degree: u64,
    pub seed: u64,
    pub sizing: BinSizing,
}

impl GraphParams {
    /// Exactly regular parameters; fails unless `N·ℓ = M·r`.
    pub fn regular(n_items: u64, n_bins: u64, left_degree: u32, right_degree: u64, seed: u64) -> Result<Self> {
        let p = GraphParams {
            n_items,
            n_bins,
            left_degree,
            right_degree,
            seed,
            sizing: BinSizing::Exact,
        };
        p.validate()?;
        Ok(p)
    }

    /// Near-regular parameters for an arbitrary bin count.
    pub fn balanced(n_items: u64, n_bins: u64, left_degree: u32, seed: u64) -> Result<Self> {
        if n_bins == 0 {
            return Err(Error::config("bin count must be at least 1"));
        }
        let edges = total_edges(n_items, left_degree)?;
        let p = GraphParams {
            n_items,
            n_bins,
            left_degree,
            right_degree: edges.div_ceil(n_bins),
            seed,
            sizing: BinSizing::Balanced,
        };
        p.validate()?;
        Ok(p)
    }

    /// Parameters for a requested bin count. With exact sizing the count is
    /// raised to the nearest value dividing `N·ℓ`.
    pub fn with_target_bins(
        n_items: u64,
        left_degree: u32,
        target_bins: u64,
        sizing: BinSizing,
        seed: u64,
    ) -> Result<Self> {
        match sizing {
            BinSizing::Balanced => Self::balanced(n_items, target_bins, left_degree, seed),
            BinSizing::Exact => {
                let (m, r) = divisible_bins(n_items, left_degree, target_bins)?;
                Self::regular(n_items, m, left_degree, r, seed)
            }
        }
    }

    pub fn total_edges(&self) -> u64 {
        self.n_items * self.left_degree as u64
    }

    pub fn validate(&self) -> Result<()> {
        if self.left_degree < 1 {
            return Err(Error::config("left degree must be at least 1"));
        }
        if self.n_bins < 1 {
            return Err(Error::config("bin count must be at least 1"));
        }
        if self.right_degree < 2 {
            return Err(Error::config(format!(
                "right degree must be at least 2 (got {})",
                self.right_degree
            )));
        }
        let edges = total_edges(self.n_items, self.left_degree)?;
        let slots = self
            .n_bins
            .checked_mul(self.right_degree)
            .ok_or_else(|| Error::config("M·r overflows"))?;
        match self.sizing {
            BinSizing::Exact if edges != slots => Err(Error::config(format!(
                "N·ℓ = {edges} must equal M·r = {slots}"
            ))),
            BinSizing::Balanced if !(slots >= edges && slots - edges < self.n_bins) => {
                Err(Error::config(format!(
                    "balanced sizing needs M·(r-1) < N·ℓ ≤ M·r (N·ℓ = {edges}, M = {}, r = {})",
                    self.n_bins, self.right_degree
                )))
            }
            _ => Ok(()),
        }
    }
}

fn total_edges(n_items: u64, left_degree: u32) -> Result<u64> {
    n_items
        .checked_mul(left_degree as u64)
        .ok_or_else(|| Error::config("N·ℓ overflows"))
}

/// Smallest `M ≥ target` dividing `N·ℓ`, with the matching `r = N·ℓ / M`.
pub fn divisible_bins(n_items: u64, left_degree: u32, target: u64) -> Result<(u64, u64)> {
    let edges = total_edges(n_items, left_degree)?;
    let mut m = target.max(1);
    while m <= edges / 2 {
        if edges % m == 0 {
            return Ok((m, edges / m));
        }
        m += 1;
    }
    Err(Error::config(format!(
        "no bin count ≥ {target} divides N·ℓ = {edges} with r ≥ 2"
    )))
}

/// One edge endpoint on the bin side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub bin: u64,
    pub slot: u64,
}

/// Bijection between global slot numbers and `(bin, slot)` pairs. The first
/// `n_full` bins hold `r` slots, the rest hold `r - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct SlotLayout {
    n_bins: u64,
    r: u64,
    n_full: u64,
}

impl SlotLayout {
    fn new(params: &GraphParams) -> Self {
        let edges = params.total_edges();
        let r = params.right_degree;
        SlotLayout {
            n_bins: params.n_bins,
            r,
            n_full: edges - params.n_bins * (r - 1),
        }
    }

    #[inline]
    fn degree(&self, bin: u64) -> u64 {
        if bin < self.n_full {
            self.r
        } else {
            self.r - 1
        }
    }

    #[inline]
    fn locate(&self, global: u64) -> Edge {
        let full = self.n_full * self.r;
        if global < full {
            Edge {
                bin: global / self.r,
                slot: global % self.r,
            }
        } else {
            let rest = global - full;
            Edge {
                bin: self.n_full + rest / (self.r - 1),
                slot: rest % (self.r - 1),
            }
        }
    }

    #[inline]
    fn global(&self, edge: Edge) -> Option<u64> {
        if edge.bin >= self.n_bins || edge.slot >= self.degree(edge.bin) {
            return None;
        }
        Some(if edge.bin < self.n_full {
            edge.bin * self.r + edge.slot
        } else {
            self.n_full * self.r + (edge.bin - self.n_full) * (self.r - 1) + edge.slot
        })
    }
}

#[derive(Debug, Clone)]
enum Wiring {
    Permuted { perm: Permutation, layout: SlotLayout },
    LeftRegular { edges: Vec<Edge>, bins: Vec<Vec<u64>> },
}

/// An immutable pooling graph.
#[derive(Debug, Clone)]
pub struct BipartiteGraph {
    params: GraphParams,
    backend: Backend,
    wiring: Wiring,
}

/// Sample from the regular ensemble with a materialized permutation.
pub fn sample_regular(params: GraphParams) -> Result<BipartiteGraph> {
    BipartiteGraph::sample(params, Backend::ExplicitPermutation)
}

/// Sample from the left-regular baseline ensemble.
pub fn sample_left_regular(n_items: u64, n_bins: u64, left_degree: u32, seed: u64) -> Result<BipartiteGraph> {
    if left_degree < 1 || n_bins < 1 {
        return Err(Error::config("left-regular graph needs ℓ ≥ 1 and M ≥ 1"));
    }
    if left_degree as u64 > n_bins {
        return Err(Error::config(format!("ℓ = {left_degree} exceeds M = {n_bins}")));
    }
    total_edges(n_items, left_degree)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bins: Vec<Vec<u64>> = vec![Vec::new(); n_bins as usize];
    let mut edges = Vec::with_capacity((n_items * left_degree as u64) as usize);
    for v in 0..n_items {
        for _ in 0..left_degree {
            let bin = rng.gen_range(0..n_bins);
            let list = &mut bins[bin as usize];
            edges.push(Edge {
                bin,
                slot: list.len() as u64,
            });
            list.push(v);
        }
    }
    let max_degree = bins.iter().map(Vec::len).max().unwrap_or(0) as u64;
    Ok(BipartiteGraph {
        params: GraphParams {
            n_items,
            n_bins,
            left_degree,
            right_degree: max_degree,
            seed,
            sizing: BinSizing::Balanced,
        },
        backend: Backend::LeftRegular,
        wiring: Wiring::LeftRegular { edges, bins },
    })
}

impl BipartiteGraph {
    /// Sample a graph. For [`Backend::LeftRegular`] only `n_items`, `n_bins`,
    /// `left_degree` and `seed` are used.
    pub fn sample(params: GraphParams, backend: Backend) -> Result<Self> {
        if backend == Backend::LeftRegular {
            return sample_left_regular(params.n_items, params.n_bins, params.left_degree, params.seed);
        }
        params.validate()?;
        let edges = params.total_edges();
        let perm = match backend {
            Backend::ExplicitPermutation => {
                if usize::try_from(edges).is_err() || edges > 1 << 32 {
                    return Err(Error::config(format!(
                        "{edges} edges is too many for an explicit permutation"
                    )));
                }
                Permutation::Table(TablePermutation::sample(edges, params.seed))
            }
            _ => Permutation::Feistel(FeistelPermutation::new(edges, params.seed)),
        };
        Ok(BipartiteGraph {
            params,
            backend,
            wiring: Wiring::Permuted {
                layout: SlotLayout::new(&params),
                perm,
            },
        })
    }

    /// Build a regular graph from explicit bin contents. `bins[b][t]` is the
    /// item in slot `t` of bin `b`; every bin must hold `r` items and every
    /// item must appear exactly `ℓ` times.
    pub fn from_bin_lists(n_items: u64, left_degree: u32, bins: &[Vec<u64>]) -> Result<Self> {
        let r = bins.first().map_or(0, |b| b.len() as u64);
        if bins.iter().any(|b| b.len() as u64 != r) {
            return Err(Error::config("all bins must hold the same number of slots"));
        }
        let params = GraphParams::regular(n_items, bins.len() as u64, left_degree, r, 0)?;
        let layout = SlotLayout::new(&params);
        let mut copies = vec![0u32; n_items as usize];
        let mut forward = vec![u64::MAX; params.total_edges() as usize];
        for (b, list) in bins.iter().enumerate() {
            for (t, &v) in list.iter().enumerate() {
                if v >= n_items {
                    return Err(Error::input(format!("item {v} out of range")));
                }
                let j = copies[v as usize];
                if j >= left_degree {
                    return Err(Error::input(format!("item {v} appears more than ℓ times")));
                }
                copies[v as usize] += 1;
                let edge = v * left_degree as u64 + j as u64;
                let global = layout
                    .global(Edge {
                        bin: b as u64,
                        slot: t as u64,
                    })
                    .expect("slot inside layout");
                forward[edge as usize] = global;
            }
        }
        let perm = TablePermutation::from_forward(forward)
            .ok_or_else(|| Error::input("bin lists do not give every item exactly ℓ edges"))?;
        Ok(BipartiteGraph {
            params,
            backend: Backend::ExplicitPermutation,
            wiring: Wiring::Permuted {
                perm: Permutation::Table(perm),
                layout,
            },
        })
    }

    /// Items in every slot of every bin; the inverse of [`from_bin_lists`].
    /// Empty slots of the left-regular baseline are skipped.
    ///
    /// [`from_bin_lists`]: BipartiteGraph::from_bin_lists
    pub fn bin_lists(&self) -> Vec<Vec<u64>> {
        (0..self.n_bins())
            .map(|bin| {
                (0..self.bin_degree(bin))
                    .filter_map(|slot| self.edge_item(Edge { bin, slot }))
                    .collect()
            })
            .collect()
    }

    pub fn params(&self) -> &GraphParams {
        &self.params
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn n_items(&self) -> u64 {
        self.params.n_items
    }

    pub fn n_bins(&self) -> u64 {
        self.params.n_bins
    }

    pub fn left_degree(&self) -> u32 {
        self.params.left_degree
    }

    /// Largest number of slots in any bin.
    pub fn max_bin_degree(&self) -> u64 {
        self.params.right_degree
    }

    pub fn bin_degree(&self, bin: u64) -> u64 {
        match &self.wiring {
            Wiring::Permuted { layout, .. } => layout.degree(bin),
            Wiring::LeftRegular { bins, .. } => bins[bin as usize].len() as u64,
        }
    }

    /// The `ℓ` bin-side endpoints of item `v`, in copy order.
    pub fn item_edges(&self, v: u64) -> Vec<Edge> {
        let mut out = Vec::with_capacity(self.params.left_degree as usize);
        self.item_edges_into(v, &mut out);
        out
    }

    pub fn item_edges_into(&self, v: u64, out: &mut Vec<Edge>) {
        assert!(v < self.params.n_items, "item {v} out of range");
        out.clear();
        let l = self.params.left_degree as u64;
        match &self.wiring {
            Wiring::Permuted { perm, layout } => {
                out.extend((0..l).map(|j| layout.locate(perm.forward(v * l + j))));
            }
            Wiring::LeftRegular { edges, .. } => {
                let start = (v * l) as usize;
                out.extend_from_slice(&edges[start..start + l as usize]);
            }
        }
    }

    /// The item owning a bin slot, or `None` if the slot does not exist.
    pub fn edge_item(&self, edge: Edge) -> Option<u64> {
        match &self.wiring {
            Wiring::Permuted { perm, layout } => {
                let global = layout.global(edge)?;
                Some(perm.inverse(global) / self.params.left_degree as u64)
            }
            Wiring::LeftRegular { bins, .. } => {
                bins.get(edge.bin as usize)?.get(edge.slot as usize).copied()
            }
        }
    }

    /// Restrict the graph to a defective set.
    pub fn prune(&self, defectives: &[u64]) -> Result<PrunedGraph<'_>> {
        check_item_set(defectives, self.params.n_items)?;
        let mut occupancy: BTreeMap<u64, Vec<(u64, u64)>> = BTreeMap::new();
        let mut edges = Vec::with_capacity(self.params.left_degree as usize);
        for &v in defectives {
            self.item_edges_into(v, &mut edges);
            for e in &edges {
                occupancy.entry(e.bin).or_default().push((e.slot, v));
            }
        }
        for list in occupancy.values_mut() {
            list.sort_unstable();
        }
        Ok(PrunedGraph {
            graph: self,
            defectives: defectives.to_vec(),
            occupancy,
        })
    }
}

/// Checks that `items` is strictly increasing and inside `[0, n)`.
pub fn check_item_set(items: &[u64], n: u64) -> Result<()> {
    for w in items.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::input(format!(
                "item list must be sorted and unique (saw {} then {})",
                w[0], w[1]
            )));
        }
    }
    if let Some(&last) = items.last() {
        if last >= n {
            return Err(Error::input(format!("item {last} out of range [0, {n})")));
        }
    }
    Ok(())
}

/// A graph restricted to its defective items.
#[derive(Debug, Clone)]
pub struct PrunedGraph<'g> {
    pub graph: &'g BipartiteGraph,
    pub defectives: Vec<u64>,
    /// For each bin touched by a defective, its `(slot, item)` pairs sorted by
    /// slot. Untouched bins are absent.
    pub occupancy: BTreeMap<u64, Vec<(u64, u64)>>,
}

impl PrunedGraph<'_> {
    pub fn total_occupancy(&self) -> usize {
        self.occupancy.values().map(Vec::len).sum()
    }

    /// Bin degree histogram normalized over `n_bins_total` bins, untouched
    /// bins counted as degree 0. Index `i` holds the fraction of degree `i`.
    pub fn empirical_right_dd(&self, n_bins_total: u64) -> Vec<f64> {
        let max = self.graph.max_bin_degree() as usize;
        let mut hist = vec![0u64; max + 1];
        for list in self.occupancy.values() {
            hist[list.len()] += 1;
        }
        hist[0] = n_bins_total - self.occupancy.len() as u64;
        hist.iter().map(|&c| c as f64 / n_bins_total as f64).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn six_item() -> BipartiteGraph {
        BipartiteGraph::from_bin_lists(6, 2, &[vec![0, 1, 3, 5], vec![1, 2, 3, 4], vec![0, 2, 4, 5]]).unwrap()
    }

    #[test]
    fn regular_rejects_divisibility_violation() {
        assert!(GraphParams::regular(6, 3, 2, 5, 0).is_err());
        assert!(GraphParams::regular(1, 1, 1, 1, 0).is_err());
        assert!(GraphParams::regular(6, 3, 2, 4, 0).is_ok());
    }

    #[test]
    fn two_items_one_bin() {
        for seed in 0..10 {
            let g = sample_regular(GraphParams::regular(2, 1, 1, 2, seed).unwrap()).unwrap();
            let mut items: Vec<u64> = (0..2).map(|t| g.edge_item(Edge { bin: 0, slot: t }).unwrap()).collect();
            items.sort();
            assert_eq!(items, vec![0, 1]);
        }
    }

    #[test]
    fn round_trip_by_enumeration() {
        for backend in [Backend::ExplicitPermutation, Backend::PseudorandomPermutation] {
            let g = BipartiteGraph::sample(GraphParams::regular(64, 8, 2, 16, 7).unwrap(), backend).unwrap();
            for v in 0..64 {
                for e in g.item_edges(v) {
                    assert_eq!(g.edge_item(e), Some(v));
                }
            }
        }
    }

    #[test]
    fn exhaustive_bijection_and_degrees() {
        for backend in [Backend::ExplicitPermutation, Backend::PseudorandomPermutation] {
            let params = GraphParams::regular(1 << 12, 1 << 8, 3, 48, 99).unwrap();
            let g = BipartiteGraph::sample(params, backend).unwrap();
            let mut bin_deg = vec![0u64; 256];
            let mut seen = std::collections::HashSet::new();
            for v in 0..(1 << 12) {
                let edges = g.item_edges(v);
                assert_eq!(edges.len(), 3);
                for e in edges {
                    assert!(seen.insert(e));
                    assert!(e.slot < 48);
                    bin_deg[e.bin as usize] += 1;
                    assert_eq!(g.edge_item(e), Some(v));
                }
            }
            assert!(bin_deg.iter().all(|&d| d == 48));
        }
    }

    #[test]
    fn balanced_layout_round_trips() {
        let params = GraphParams::balanced(1000, 37, 3, 5).unwrap();
        assert_eq!(params.right_degree, 82);
        let g = BipartiteGraph::sample(params, Backend::PseudorandomPermutation).unwrap();
        let degrees: Vec<u64> = (0..37).map(|b| g.bin_degree(b)).collect();
        assert_eq!(degrees.iter().sum::<u64>(), 3000);
        assert!(degrees.iter().all(|&d| d == 81 || d == 82));
        for v in 0..1000 {
            for e in g.item_edges(v) {
                assert!(e.slot < g.bin_degree(e.bin));
                assert_eq!(g.edge_item(e), Some(v));
            }
        }
        let short_bin = 36;
        assert_eq!(g.edge_item(Edge { bin: short_bin, slot: 81 }), None);
    }

    #[test]
    fn divisible_bins_rounds_up() {
        assert_eq!(divisible_bins(6, 2, 3).unwrap(), (3, 4));
        assert_eq!(divisible_bins(100_000, 5, 8000).unwrap(), (10_000, 50));
        assert!(divisible_bins(4, 1, 3).is_err());
    }

    #[test]
    fn determinism_per_backend() {
        let p = GraphParams::regular(512, 64, 4, 32, 3).unwrap();
        for backend in [Backend::ExplicitPermutation, Backend::PseudorandomPermutation, Backend::LeftRegular] {
            let a = BipartiteGraph::sample(p, backend).unwrap();
            let b = BipartiteGraph::sample(p, backend).unwrap();
            for v in 0..512 {
                assert_eq!(a.item_edges(v), b.item_edges(v));
            }
        }
    }

    #[test]
    fn left_regular_every_item_has_l_edges() {
        let g = sample_left_regular(1000, 10, 3, 1).unwrap();
        for v in 0..1000 {
            let edges = g.item_edges(v);
            assert_eq!(edges.len(), 3);
            for e in edges {
                assert_eq!(g.edge_item(e), Some(v));
            }
        }
        let g = sample_left_regular(2, 1, 1, 5).unwrap();
        assert_eq!(g.bin_degree(0), 2);
        assert!(sample_left_regular(10, 2, 3, 0).is_err());
    }

    #[test]
    fn left_regular_bin_degree_mean() {
        // Each bin degree is Binomial(Nℓ, 1/M): mean 3000, variance 3000·(1 - 1/100).
        let g = sample_left_regular(100_000, 100, 3, 11).unwrap();
        let mean = (0..100).map(|b| g.bin_degree(b) as f64).sum::<f64>() / 100.0;
        assert!((mean - 3000.0).abs() < 1e-9, "degrees always sum to Nℓ");
        let var: f64 = 3000.0 * (1.0 - 0.01);
        for b in 0..100 {
            let d = g.bin_degree(b) as f64;
            assert!((d - 3000.0).abs() < 5.0 * var.sqrt(), "bin {b} degree {d}");
        }
    }

    #[test]
    fn six_item_pruning() {
        let g = six_item();
        assert_eq!(g.prune(&[]).unwrap().occupancy.len(), 0);
        let p = g.prune(&[0]).unwrap();
        assert_eq!(p.occupancy.keys().copied().collect::<Vec<_>>(), vec![0, 2]);
        assert_eq!(p.occupancy[&0], vec![(0, 0)]);
        assert_eq!(p.occupancy[&2], vec![(0, 0)]);
    }

    #[test]
    fn prune_rejects_bad_sets() {
        let g = six_item();
        assert!(g.prune(&[1, 1]).is_err());
        assert!(g.prune(&[3, 1]).is_err());
        assert!(g.prune(&[6]).is_err());
    }

    #[test]
    fn prune_occupancy_counts_every_edge() {
        let g = BipartiteGraph::sample(
            GraphParams::regular(10_000, 500, 5, 100, 1).unwrap(),
            Backend::PseudorandomPermutation,
        )
        .unwrap();
        let defectives: Vec<u64> = (0..50).map(|i| i * 199 + 3).collect();
        let p = g.prune(&defectives).unwrap();
        assert_eq!(p.total_occupancy(), 250);
        for (&bin, list) in &p.occupancy {
            for &(slot, item) in list {
                assert_eq!(g.edge_item(Edge { bin, slot }), Some(item));
                assert!(defectives.binary_search(&item).is_ok());
            }
        }
    }

    #[test]
    fn right_dd_extremes() {
        let g = BipartiteGraph::sample(GraphParams::regular(64, 8, 2, 16, 2).unwrap(), Backend::ExplicitPermutation)
            .unwrap();
        let empty = g.prune(&[]).unwrap().empirical_right_dd(8);
        assert_eq!(empty[0], 1.0);
        let all: Vec<u64> = (0..64).collect();
        let full = g.prune(&all).unwrap().empirical_right_dd(8);
        assert_eq!(full[16], 1.0);
        assert!((full.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bin_lists_invert_explicit_construction() {
        let lists = vec![vec![0, 1, 3, 5], vec![1, 2, 3, 4], vec![0, 2, 4, 5]];
        let g = BipartiteGraph::from_bin_lists(6, 2, &lists).unwrap();
        assert_eq!(g.bin_lists(), lists);
        let p = GraphParams::regular(60, 12, 3, 15, 4).unwrap();
        let g = BipartiteGraph::sample(p, Backend::PseudorandomPermutation).unwrap();
        let again = BipartiteGraph::from_bin_lists(60, 3, &g.bin_lists()).unwrap();
        for v in 0..60 {
            let mut a: Vec<u64> = g.item_edges(v).iter().map(|e| e.bin).collect();
            let mut b: Vec<u64> = again.item_edges(v).iter().map(|e| e.bin).collect();
            a.sort();
            b.sort();
            assert_eq!(a, b);
        }
    }
}
