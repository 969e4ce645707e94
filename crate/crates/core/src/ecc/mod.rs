//! Binary error-correcting codes for the robust signature matrix.
//!
//! A code maps an `n_msg`-bit index expansion to an `n_seg`-bit segment.
//! Bits are handled big-endian (most significant first) throughout.

pub mod gf;
pub mod rs;

use std::fmt;

use bitvec::prelude::*;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};
pub use rs::ReedSolomon;

pub type Bits = BitVec<u8, Msb0>;
pub type BitsRef = BitSlice<u8, Msb0>;

/// Which code to put on each signature segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CodeSpec {
    Identity,
    /// The message repeated `t` times back to back.
    Repetition { t: usize },
    /// RS(`n_sym`, `k_sym`) over GF(2^`field_bits`), message zero-padded in
    /// its high bits up to `k_sym·field_bits`.
    ReedSolomon { n_sym: usize, k_sym: usize, field_bits: u32 },
}

impl CodeSpec {
    pub fn is_identity(&self) -> bool {
        matches!(self, CodeSpec::Identity)
    }

    /// Instantiate the code for `n_msg`-bit messages.
    pub fn build(&self, n_msg: usize) -> Result<Box<dyn BinaryCode>> {
        if n_msg == 0 {
            return Err(Error::config("message length must be positive"));
        }
        Ok(match *self {
            CodeSpec::Identity => Box::new(IdentityCode { n_msg }),
            CodeSpec::Repetition { t } => {
                if t == 0 {
                    return Err(Error::config("repetition factor must be positive"));
                }
                Box::new(RepetitionCode { n_msg, t })
            }
            CodeSpec::ReedSolomon {
                n_sym,
                k_sym,
                field_bits,
            } => Box::new(RsBinaryCode::new(n_msg, n_sym, k_sym, field_bits)?),
        })
    }
}

impl fmt::Display for CodeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodeSpec::Identity => write!(f, "identity"),
            CodeSpec::Repetition { t } => write!(f, "rep({t})"),
            CodeSpec::ReedSolomon {
                n_sym,
                k_sym,
                field_bits,
            } => write!(f, "rs({n_sym};{k_sym};gf2^{field_bits})"),
        }
    }
}

impl std::str::FromStr for CodeSpec {
    type Err = Error;

    /// Parses the display form: `identity`, `rep(t)` or `rs(n;k;gf2^m)`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::config(format!("unrecognized code `{s}` (want identity, rep(t) or rs(n;k;gf2^m))"));
        let s = s.trim();
        if s == "identity" {
            return Ok(CodeSpec::Identity);
        }
        let inner = |prefix: &str| s.strip_prefix(prefix).and_then(|r| r.strip_suffix(')'));
        if let Some(t) = inner("rep(") {
            return Ok(CodeSpec::Repetition {
                t: t.parse().map_err(|_| bad())?,
            });
        }
        let args = inner("rs(").ok_or_else(bad)?;
        let parts: Vec<&str> = args.split(';').collect();
        let [n, k, m] = parts[..] else {
            return Err(bad());
        };
        Ok(CodeSpec::ReedSolomon {
            n_sym: n.parse().map_err(|_| bad())?,
            k_sym: k.parse().map_err(|_| bad())?,
            field_bits: m.strip_prefix("gf2^").ok_or_else(bad)?.parse().map_err(|_| bad())?,
        })
    }
}

/// Encoder `f` and bounded-distance decoder `g` of a binary code.
pub trait BinaryCode: fmt::Debug + Send + Sync {
    fn message_bits(&self) -> usize;

    fn codeword_bits(&self) -> usize;

    fn encode(&self, msg: &BitsRef) -> Result<Bits>;

    /// `None` when the word cannot be decoded.
    fn decode(&self, word: &BitsRef) -> Option<Bits>;

    /// Code rate `n_msg / n_seg`.
    fn rate(&self) -> Ratio<usize> {
        Ratio::new(self.message_bits(), self.codeword_bits())
    }
}

fn check_len(got: usize, want: usize, what: &str) -> Result<()> {
    if got != want {
        return Err(Error::input(format!("{what} has {got} bits, expected {want}")));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct IdentityCode {
    n_msg: usize,
}

impl BinaryCode for IdentityCode {
    fn message_bits(&self) -> usize {
        self.n_msg
    }

    fn codeword_bits(&self) -> usize {
        self.n_msg
    }

    fn encode(&self, msg: &BitsRef) -> Result<Bits> {
        check_len(msg.len(), self.n_msg, "message")?;
        Ok(msg.to_bitvec())
    }

    fn decode(&self, word: &BitsRef) -> Option<Bits> {
        (word.len() == self.n_msg).then(|| word.to_bitvec())
    }
}

/// Whole-message repetition with per-bit majority voting; ties decode to `None`.
#[derive(Debug, Clone)]
pub struct RepetitionCode {
    n_msg: usize,
    t: usize,
}

impl BinaryCode for RepetitionCode {
    fn message_bits(&self) -> usize {
        self.n_msg
    }

    fn codeword_bits(&self) -> usize {
        self.n_msg * self.t
    }

    fn encode(&self, msg: &BitsRef) -> Result<Bits> {
        check_len(msg.len(), self.n_msg, "message")?;
        let mut out = Bits::with_capacity(self.codeword_bits());
        for _ in 0..self.t {
            out.extend_from_bitslice(msg);
        }
        Ok(out)
    }

    fn decode(&self, word: &BitsRef) -> Option<Bits> {
        if word.len() != self.codeword_bits() {
            return None;
        }
        let mut out = Bits::with_capacity(self.n_msg);
        for i in 0..self.n_msg {
            let ones = (0..self.t).filter(|&c| word[c * self.n_msg + i]).count();
            let zeros = self.t - ones;
            if ones == zeros {
                return None;
            }
            out.push(ones > zeros);
        }
        Some(out)
    }
}

/// A Reed-Solomon code viewed as a binary code. Symbols are `field_bits`
/// wide, big-endian, laid out contiguously (message symbols then parity).
#[derive(Debug, Clone)]
pub struct RsBinaryCode {
    n_msg: usize,
    rs: ReedSolomon,
}

impl RsBinaryCode {
    pub fn new(n_msg: usize, n_sym: usize, k_sym: usize, field_bits: u32) -> Result<Self> {
        let rs = ReedSolomon::new(n_sym, k_sym, field_bits)?;
        let capacity = k_sym * field_bits as usize;
        if n_msg > capacity {
            return Err(Error::config(format!(
                "{n_msg}-bit messages do not fit in RS({n_sym},{k_sym}) over GF(2^{field_bits}) ({capacity} bits)"
            )));
        }
        Ok(RsBinaryCode { n_msg, rs })
    }

    pub fn inner(&self) -> &ReedSolomon {
        &self.rs
    }

    fn symbol_bits(&self) -> usize {
        self.rs.field().bits() as usize
    }

    fn padding(&self) -> usize {
        self.rs.k() * self.symbol_bits() - self.n_msg
    }

    fn to_symbols(&self, bits: &BitsRef) -> Vec<u16> {
        bits.chunks(self.symbol_bits()).map(|c| c.load_be::<u16>()).collect()
    }
}

impl BinaryCode for RsBinaryCode {
    fn message_bits(&self) -> usize {
        self.n_msg
    }

    fn codeword_bits(&self) -> usize {
        self.rs.n() * self.symbol_bits()
    }

    fn encode(&self, msg: &BitsRef) -> Result<Bits> {
        check_len(msg.len(), self.n_msg, "message")?;
        let mut padded = bitvec![u8, Msb0; 0; self.padding()];
        padded.extend_from_bitslice(msg);
        let cw = self.rs.encode(&self.to_symbols(&padded));
        let w = self.symbol_bits();
        let mut out = bitvec![u8, Msb0; 0; self.codeword_bits()];
        for (chunk, &s) in out.chunks_mut(w).zip(&cw) {
            chunk.store_be(s);
        }
        Ok(out)
    }

    fn decode(&self, word: &BitsRef) -> Option<Bits> {
        if word.len() != self.codeword_bits() {
            return None;
        }
        let msg = self.rs.decode(&self.to_symbols(word))?;
        let w = self.symbol_bits();
        let mut padded = bitvec![u8, Msb0; 0; msg.len() * w];
        for (chunk, &s) in padded.chunks_mut(w).zip(&msg) {
            chunk.store_be(s);
        }
        let pad = self.padding();
        if padded[..pad].any() {
            return None;
        }
        Some(padded[pad..].to_bitvec())
    }
}

/// Big-endian expansion of `value` on `width` bits.
pub fn expand(value: u64, width: usize) -> Bits {
    let mut out = bitvec![u8, Msb0; 0; width];
    for i in 0..width {
        out.set(i, (value >> (width - 1 - i)) & 1 == 1);
    }
    out
}

/// Inverse of [`expand`]; widths above 64 bits must have zero high bits.
pub fn collapse(bits: &BitsRef) -> Option<u64> {
    let mut v = 0u64;
    for b in bits.iter().by_vals() {
        if v >> 63 != 0 {
            return None;
        }
        v = (v << 1) | b as u64;
    }
    Some(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bits(s: &str) -> Bits {
        s.chars().map(|c| c == '1').collect()
    }

    #[test]
    fn spec_display_parses_back() {
        for spec in [
            CodeSpec::Identity,
            CodeSpec::Repetition { t: 3 },
            CodeSpec::ReedSolomon {
                n_sym: 6,
                k_sym: 4,
                field_bits: 7,
            },
        ] {
            assert_eq!(spec.to_string().parse::<CodeSpec>().unwrap(), spec);
        }
        for bad in ["", "rs(6;4)", "rs(6;4;7)", "rep()", "rep(x)", "hamming"] {
            assert!(bad.parse::<CodeSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn identity_round_trip() {
        let code = CodeSpec::Identity.build(5).unwrap();
        let m = bits("10110");
        assert_eq!(code.encode(&m).unwrap(), m);
        assert_eq!(code.decode(&m), Some(m));
        assert!(code.encode(&bits("101")).is_err());
    }

    #[test]
    fn repetition_layout_and_majority() {
        let code = CodeSpec::Repetition { t: 3 }.build(2).unwrap();
        assert_eq!(code.encode(&bits("10")).unwrap(), bits("101010"));
        // One flip per copy of each bit position, in different copies.
        assert_eq!(code.decode(&bits("001011")), Some(bits("10")));
        assert_eq!(code.decode(&bits("111000")), Some(bits("10")));
        let even = CodeSpec::Repetition { t: 2 }.build(2).unwrap();
        assert_eq!(even.decode(&bits("1001")), None);
    }

    #[test]
    fn repetition_corrects_any_single_flip_per_position() {
        let code = CodeSpec::Repetition { t: 3 }.build(4).unwrap();
        for m in 0..16u64 {
            let msg = expand(m, 4);
            let cw = code.encode(&msg).unwrap();
            for flip in 0..12 {
                let mut w = cw.clone();
                let v = !w[flip];
                w.set(flip, v);
                assert_eq!(code.decode(&w), Some(msg.clone()));
            }
        }
    }

    #[test]
    fn rs_binary_corrects_one_symbol() {
        let code = CodeSpec::ReedSolomon {
            n_sym: 6,
            k_sym: 4,
            field_bits: 7,
        }
        .build(26)
        .unwrap();
        assert_eq!(code.codeword_bits(), 42);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..300 {
            let msg = expand(rng.gen_range(0..1u64 << 26), 26);
            let mut w = code.encode(&msg).unwrap();
            let sym = rng.gen_range(0..6);
            for b in 0..7 {
                if rng.gen_bool(0.5) || b == 0 {
                    let i = sym * 7 + b;
                    let v = !w[i];
                    w.set(i, v);
                }
            }
            assert_eq!(code.decode(&w), Some(msg));
        }
    }

    #[test]
    fn rs_binary_rejects_nonzero_padding() {
        let code = RsBinaryCode::new(26, 6, 4, 7).unwrap();
        // A valid codeword of the 28-bit message with a high pad bit set.
        let full = RsBinaryCode::new(28, 6, 4, 7).unwrap();
        let mut m = bitvec![u8, Msb0; 0; 28];
        m.set(0, true);
        let w = full.encode(&m).unwrap();
        assert_eq!(code.decode(&w), None);
    }

    #[test]
    fn rs_binary_rejects_oversized_messages() {
        assert!(RsBinaryCode::new(29, 6, 4, 7).is_err());
    }

    #[test]
    fn rate_bookkeeping() {
        let code = CodeSpec::ReedSolomon {
            n_sym: 6,
            k_sym: 4,
            field_bits: 7,
        }
        .build(26)
        .unwrap();
        assert_eq!(code.rate() * code.codeword_bits(), Ratio::from_integer(26));
        let rep = CodeSpec::Repetition { t: 5 }.build(3).unwrap();
        assert_eq!(rep.rate(), Ratio::new(1, 5));
    }

    #[test]
    fn exhaustive_round_trip_small_messages() {
        let specs = [
            CodeSpec::Identity,
            CodeSpec::Repetition { t: 3 },
            CodeSpec::ReedSolomon {
                n_sym: 6,
                k_sym: 4,
                field_bits: 4,
            },
        ];
        for spec in specs {
            let code = spec.build(12).unwrap();
            for m in 0..(1u64 << 12) {
                let msg = expand(m, 12);
                assert_eq!(code.decode(&code.encode(&msg).unwrap()), Some(msg), "{spec}");
            }
        }
    }

    #[test]
    fn spec_serde_form() {
        let spec: CodeSpec =
            serde_json::from_str(r#"{"kind":"reed-solomon","n_sym":6,"k_sym":4,"field_bits":7}"#).unwrap();
        assert_eq!(
            spec,
            CodeSpec::ReedSolomon {
                n_sym: 6,
                k_sym: 4,
                field_bits: 7
            }
        );
        let id: CodeSpec = serde_json::from_str(r#"{"kind":"identity"}"#).unwrap();
        assert!(id.is_identity());
    }

    proptest! {
        #[test]
        fn expand_collapse(v in any::<u64>(), width in 1usize..=64) {
            let v = if width == 64 { v } else { v & ((1u64 << width) - 1) };
            prop_assert_eq!(collapse(&expand(v, width)), Some(v));
        }

        #[test]
        fn rs_random_errors_within_radius(
            seed in any::<u64>(),
            e in 0usize..=4,
        ) {
            let code = RsBinaryCode::new(26, 4 + 2 * e, 4, 7).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let msg = expand(rng.gen_range(0..1u64 << 26), 26);
            let mut w = code.encode(&msg).unwrap();
            let n = 4 + 2 * e;
            let mut positions: Vec<usize> = (0..n).collect();
            for i in 0..e {
                let j = rng.gen_range(i..n);
                positions.swap(i, j);
                let pattern: u8 = rng.gen_range(1..128);
                for b in 0..7 {
                    if (pattern >> b) & 1 == 1 {
                        let idx = positions[i] * 7 + b;
                        let v = !w[idx];
                        w.set(idx, v);
                    }
                }
            }
            prop_assert_eq!(code.decode(&w), Some(msg));
        }
    }
}
