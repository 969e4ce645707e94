//! Testing schemes and boolean measurements.
//!
//! A bin's observation is the OR of the signature columns at every slot held
//! by a defective, optionally passed through a binary symmetric channel. Work
//! is proportional to `K·ℓ·h + M·h` and never touches non-defective items.

use std::io::{Read, Write};

use bitvec::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};

use crate::ecc::BitsRef;
use crate::graph::{check_item_set, Backend, BipartiteGraph, Edge, GraphParams};
use crate::signature::{SignatureMatrix, SignatureParams};
use crate::{Error, Result};

/// Measurement container magic.
pub const MAGIC: &[u8; 4] = b"GTSF";
pub const FORMAT_VERSION: u16 = 1;
const HEADER_LEN: usize = 4 + 2 + 8 + 4 + 4 + 8;

/// Largest dense matrix [`assemble_dense`] will build, in bits.
pub const DENSE_LIMIT_BITS: u64 = 1 << 26;

/// A pooling graph paired with a signature matrix.
#[derive(Debug, Clone)]
pub struct TestingScheme {
    graph: BipartiteGraph,
    sig: SignatureMatrix,
}

impl TestingScheme {
    pub fn new(graph: BipartiteGraph, sig: SignatureMatrix) -> Result<Self> {
        let needed = graph.max_bin_degree();
        let ok = match graph.backend() {
            Backend::LeftRegular => sig.r() >= needed,
            _ => sig.r() == needed,
        };
        if !ok {
            return Err(Error::config(format!(
                "signature has {} columns but bins hold up to {needed} slots",
                sig.r()
            )));
        }
        Ok(TestingScheme { graph, sig })
    }

    pub fn graph(&self) -> &BipartiteGraph {
        &self.graph
    }

    pub fn signature(&self) -> &SignatureMatrix {
        &self.sig
    }

    /// Tests per bin.
    pub fn h(&self) -> usize {
        self.sig.h()
    }

    /// Total tests `m = M·h`.
    pub fn n_tests(&self) -> u64 {
        self.graph.n_bins() * self.sig.h() as u64
    }
}

/// Serializable description of a scheme. Graphs given by explicit bin lists
/// ignore the seed and backend.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeSpec {
    pub graph: GraphParams,
    pub backend: Backend,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bins: Option<Vec<Vec<u64>>>,
    pub signature: SignatureParams,
}

impl SchemeSpec {
    pub fn build(&self) -> Result<TestingScheme> {
        let graph = match &self.bins {
            Some(bins) => {
                let g = BipartiteGraph::from_bin_lists(self.graph.n_items, self.graph.left_degree, bins)?;
                if g.n_bins() != self.graph.n_bins || g.max_bin_degree() != self.graph.right_degree {
                    return Err(Error::input("bin lists disagree with the graph parameters"));
                }
                g
            }
            None => BipartiteGraph::sample(self.graph, self.backend)?,
        };
        TestingScheme::new(graph, SignatureMatrix::build(self.signature)?)
    }
}

/// Test noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NoiseModel {
    None,
    /// Every test result flips independently with probability `q`.
    Bsc { q: f64, seed: u64 },
}

impl NoiseModel {
    pub fn bsc(q: f64, seed: u64) -> Result<Self> {
        if !(q > 0.0 && q < 0.5) {
            return Err(Error::config(format!("BSC flip probability {q} outside (0, 1/2)")));
        }
        Ok(NoiseModel::Bsc { q, seed })
    }
}

/// Per-bin observations, `h` bits each, packed most-significant-bit first
/// with each bin padded to a whole number of bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Measurements {
    n_items: u64,
    n_bins: u64,
    h: usize,
    seed: u64,
    data: Vec<u8>,
}

impl Measurements {
    pub fn zeros(n_items: u64, n_bins: u64, h: usize, seed: u64) -> Self {
        let stride = h.div_ceil(8);
        Measurements {
            n_items,
            n_bins,
            h,
            seed,
            data: vec![0u8; stride * n_bins as usize],
        }
    }

    fn stride(&self) -> usize {
        self.h.div_ceil(8)
    }

    pub fn n_items(&self) -> u64 {
        self.n_items
    }

    pub fn n_bins(&self) -> u64 {
        self.n_bins
    }

    pub fn h(&self) -> usize {
        self.h
    }

    /// Graph seed of the scheme that produced these measurements.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn bin(&self, b: u64) -> &BitsRef {
        let s = self.stride();
        let start = b as usize * s;
        &self.data[start..start + s].view_bits::<Msb0>()[..self.h]
    }

    pub fn bin_mut(&mut self, b: u64) -> &mut BitsRef {
        let s = self.stride();
        let h = self.h;
        let start = b as usize * s;
        &mut self.data[start..start + s].view_bits_mut::<Msb0>()[..h]
    }

    /// Raw packed bytes of bin `b`, padding bits included.
    fn bin_bytes_mut(&mut self, b: u64) -> &mut [u8] {
        let s = self.stride();
        let start = b as usize * s;
        &mut self.data[start..start + s]
    }

    /// Total number of tests.
    pub fn len(&self) -> u64 {
        self.n_bins * self.h as u64
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn count_ones(&self) -> u64 {
        self.data.iter().map(|b| b.count_ones() as u64).sum()
    }

    pub fn hamming_distance(&self, other: &Measurements) -> u64 {
        assert_eq!(self.data.len(), other.data.len(), "measurement shapes differ");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a ^ b).count_ones() as u64)
            .sum()
    }

    /// Bitwise OR with another measurement set of the same shape.
    pub fn or_assign(&mut self, other: &Measurements) {
        assert_eq!(self.data.len(), other.data.len(), "measurement shapes differ");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a |= b;
        }
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        let n_bins = u32::try_from(self.n_bins).map_err(|_| Error::input("too many bins for the container"))?;
        let h = u32::try_from(self.h).map_err(|_| Error::input("bin height too large for the container"))?;
        w.write_all(MAGIC)?;
        w.write_all(&FORMAT_VERSION.to_le_bytes())?;
        w.write_all(&self.n_items.to_le_bytes())?;
        w.write_all(&n_bins.to_le_bytes())?;
        w.write_all(&h.to_le_bytes())?;
        w.write_all(&self.seed.to_le_bytes())?;
        w.write_all(&self.data)?;
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.data.len());
        self.write_to(&mut out).expect("writing to a Vec cannot fail");
        out
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut header = [0u8; HEADER_LEN];
        r.read_exact(&mut header)
            .map_err(|e| Error::Format(format!("truncated header: {e}")))?;
        if &header[0..4] != MAGIC {
            return Err(Error::Format("bad magic, expected GTSF".into()));
        }
        let version = u16::from_le_bytes(header[4..6].try_into().unwrap());
        if version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported container version {version}")));
        }
        let n_items = u64::from_le_bytes(header[6..14].try_into().unwrap());
        let n_bins = u32::from_le_bytes(header[14..18].try_into().unwrap()) as u64;
        let h = u32::from_le_bytes(header[18..22].try_into().unwrap()) as usize;
        let seed = u64::from_le_bytes(header[22..30].try_into().unwrap());
        let mut m = Measurements::zeros(n_items, n_bins, h, seed);
        r.read_exact(&mut m.data)
            .map_err(|e| Error::Format(format!("truncated payload: {e}")))?;
        let mut extra = [0u8; 1];
        if r.read(&mut extra)? != 0 {
            return Err(Error::Format("trailing bytes after payload".into()));
        }
        Ok(m)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        Self::read_from(bytes)
    }
}

/// Run the tests of `scheme` on a defective set.
pub fn measure(scheme: &TestingScheme, defectives: &[u64], noise: NoiseModel) -> Result<Measurements> {
    let graph = scheme.graph();
    check_item_set(defectives, graph.n_items())?;
    let sig = scheme.signature();
    let mut out = Measurements::zeros(graph.n_items(), graph.n_bins(), sig.h(), graph.params().seed);
    let mut edges: Vec<Edge> = Vec::with_capacity(graph.left_degree() as usize);
    for &v in defectives {
        graph.item_edges_into(v, &mut edges);
        for e in &edges {
            let col = sig.column_unchecked(e.slot);
            // Columns and bins share the MSB-first byte layout with zeroed padding.
            for (a, b) in out.bin_bytes_mut(e.bin).iter_mut().zip(col.as_raw_slice()) {
                *a |= b;
            }
        }
    }
    if let NoiseModel::Bsc { q, seed } = noise {
        apply_bsc(&mut out, q, seed)?;
    }
    Ok(out)
}

fn apply_bsc(m: &mut Measurements, q: f64, seed: u64) -> Result<()> {
    let geo = Geometric::new(q).map_err(|e| Error::config(format!("bad flip probability {q}: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total = m.len();
    let h = m.h as u64;
    // Gaps between flips are geometric, which is the same law as independent
    // Bernoulli(q) draws per test.
    let mut pos = geo.sample(&mut rng);
    while pos < total {
        let bits = m.bin_mut(pos / h);
        let i = (pos % h) as usize;
        let v = !bits[i];
        bits.set(i, v);
        pos = pos.saturating_add(1).saturating_add(geo.sample(&mut rng));
    }
    Ok(())
}

/// An `m × N` boolean matrix in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    bits: BitVec<u64, Lsb0>,
}

impl DenseMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bits[row * self.cols + col]
    }

    fn set(&mut self, row: usize, col: usize) {
        self.bits.set(row * self.cols + col, true);
    }

    /// Boolean product `A ⊙ x` for the indicator vector of `defectives`.
    pub fn apply(&self, defectives: &[u64]) -> Vec<bool> {
        (0..self.rows)
            .map(|row| defectives.iter().any(|&v| self.get(row, v as usize)))
            .collect()
    }

    /// One line per row, entries separated by commas.
    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(self.rows * (2 * self.cols + 1));
        for row in 0..self.rows {
            for col in 0..self.cols {
                if col > 0 {
                    s.push(',');
                }
                s.push(if self.get(row, col) { '1' } else { '0' });
            }
            s.push('\n');
        }
        s
    }
}

/// Materialize the full testing matrix. Block row `b` places signature
/// column `t` at the item occupying slot `t` of bin `b`.
pub fn assemble_dense(scheme: &TestingScheme) -> Result<DenseMatrix> {
    let graph = scheme.graph();
    let h = scheme.h();
    let rows = scheme.n_tests();
    let cols = graph.n_items();
    if rows.saturating_mul(cols) > DENSE_LIMIT_BITS {
        return Err(Error::input(format!(
            "dense matrix {rows}×{cols} exceeds the {DENSE_LIMIT_BITS}-bit limit"
        )));
    }
    let mut a = DenseMatrix {
        rows: rows as usize,
        cols: cols as usize,
        bits: bitvec![u64, Lsb0; 0; (rows * cols) as usize],
    };
    for bin in 0..graph.n_bins() {
        for slot in 0..graph.bin_degree(bin) {
            let item = graph.edge_item(Edge { bin, slot }).expect("slot within bin degree");
            let col = scheme.signature().column(slot)?;
            for i in col.iter_ones() {
                a.set(bin as usize * h + i, item as usize);
            }
        }
    }
    Ok(a)
}
