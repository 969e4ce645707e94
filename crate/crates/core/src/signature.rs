//! Per-bin signature matrices.
//!
//! Column `j` of the matrix stacks `s` sections. Section `i` holds the coded
//! expansion of `π^i(j)` followed by its bitwise complement, where `π^0` is
//! the identity and `π^1 .. π^(s-1)` are seeded random permutations of
//! `[0, r)`. Bits are ordered section-major, then segment, then bit.

use std::ops::Range;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::ecc::{collapse, expand, BinaryCode, Bits, BitsRef, CodeSpec};
use crate::perm::{mix_seed, FeistelPermutation, Permutation, TablePermutation};
use crate::{Error, Result};

/// Largest `r` whose section permutations are stored as tables. Above this
/// they are evaluated through a Feistel network.
pub const MAX_TABLE_PERMUTATION: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureParams {
    /// Number of columns (slots per bin).
    pub r: u64,
    /// Number of sections `s`.
    pub sections: usize,
    pub code: CodeSpec,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct SignatureMatrix {
    params: SignatureParams,
    n_msg: usize,
    n_seg: usize,
    code: Arc<dyn BinaryCode>,
    perms: Vec<Permutation>,
}

/// `⌈log2 r⌉` for `r ≥ 2`.
pub fn index_bits(r: u64) -> usize {
    (64 - (r - 1).leading_zeros()) as usize
}

impl SignatureMatrix {
    pub fn build(params: SignatureParams) -> Result<Self> {
        if params.r < 2 {
            return Err(Error::config(format!("signature needs r ≥ 2 (got {})", params.r)));
        }
        if params.sections < 1 {
            return Err(Error::config("signature needs at least one section"));
        }
        let n_msg = index_bits(params.r);
        let code: Arc<dyn BinaryCode> = Arc::from(params.code.build(n_msg)?);
        if code.message_bits() != n_msg {
            return Err(Error::config(format!(
                "code takes {}-bit messages but indices need {n_msg}",
                code.message_bits()
            )));
        }
        let perms = (0..params.sections)
            .map(|i| {
                if i == 0 {
                    Permutation::Identity(params.r)
                } else if params.r <= MAX_TABLE_PERMUTATION {
                    Permutation::Table(TablePermutation::sample(params.r, mix_seed(params.seed, i as u64)))
                } else {
                    Permutation::Feistel(FeistelPermutation::new(params.r, mix_seed(params.seed, i as u64)))
                }
            })
            .collect();
        Ok(SignatureMatrix {
            params,
            n_msg,
            n_seg: code.codeword_bits(),
            code,
            perms,
        })
    }

    pub fn params(&self) -> &SignatureParams {
        &self.params
    }

    pub fn r(&self) -> u64 {
        self.params.r
    }

    pub fn sections(&self) -> usize {
        self.params.sections
    }

    /// Bits per index, `⌈log2 r⌉`.
    pub fn n_msg(&self) -> usize {
        self.n_msg
    }

    /// Bits per segment.
    pub fn n_seg(&self) -> usize {
        self.n_seg
    }

    /// Rows, `2·s·n_seg`.
    pub fn h(&self) -> usize {
        2 * self.params.sections * self.n_seg
    }

    pub fn code(&self) -> &dyn BinaryCode {
        self.code.as_ref()
    }

    pub fn is_coded(&self) -> bool {
        !self.params.code.is_identity()
    }

    pub fn permutation(&self, section: usize) -> &Permutation {
        &self.perms[section]
    }

    /// Bit ranges of the first and second segment of a section.
    pub fn segment_ranges(&self, section: usize) -> (Range<usize>, Range<usize>) {
        let start = 2 * section * self.n_seg;
        (start..start + self.n_seg, start + self.n_seg..start + 2 * self.n_seg)
    }

    /// First segment of column `j` in `section`: the coded expansion of `π^section(j)`.
    pub fn first_segment(&self, section: usize, j: u64) -> Bits {
        let idx = self.perms[section].forward(j);
        self.code
            .encode(&expand(idx, self.n_msg))
            .expect("expansion width matches code")
    }

    pub fn column(&self, j: u64) -> Result<Bits> {
        if j >= self.params.r {
            return Err(Error::input(format!("column {j} out of range [0, {})", self.params.r)));
        }
        Ok(self.column_unchecked(j))
    }

    pub(crate) fn column_unchecked(&self, j: u64) -> Bits {
        let mut out = Bits::with_capacity(self.h());
        for i in 0..self.params.sections {
            let seg = self.first_segment(i, j);
            out.extend_from_bitslice(&seg);
            out.extend_from_bitslice(&!seg);
        }
        out
    }

    /// Decode a first segment to an index in the section's permuted
    /// coordinates. `None` if the code fails or the index is not below `r`.
    pub fn decode_index(&self, segment: &BitsRef) -> Option<u64> {
        if segment.len() != self.n_seg {
            return None;
        }
        let msg = self.code.decode(segment)?;
        collapse(&msg).filter(|&v| v < self.params.r)
    }

    /// Decode a first segment of `section` back to a column index.
    pub fn locate(&self, section: usize, segment: &BitsRef) -> Option<u64> {
        self.decode_index(segment).map(|l| self.perms[section].inverse(l))
    }
}
