//! Arithmetic in GF(2^m) through log/antilog tables.

use crate::{Error, Result};

/// Default primitive polynomials, indexed by field degree. Degree 7 uses
/// x^7 + x^3 + 1.
const PRIMITIVE_POLYS: [u32; 17] = [
    0, 0, 0x7, 0xB, 0x13, 0x25, 0x43, 0x89, 0x11D, 0x211, 0x409, 0x805, 0x1053, 0x201B, 0x4443, 0x8003,
    0x1100B,
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaloisField {
    bits: u32,
    poly: u32,
    exp: Vec<u16>,
    log: Vec<u16>,
}

impl GaloisField {
    pub fn new(bits: u32) -> Result<Self> {
        if !(2..=16).contains(&bits) {
            return Err(Error::config(format!("field degree {bits} outside 2..=16")));
        }
        Self::with_poly(bits, PRIMITIVE_POLYS[bits as usize])
    }

    pub fn with_poly(bits: u32, poly: u32) -> Result<Self> {
        let size = 1usize << bits;
        let order = size - 1;
        let mut exp = vec![0u16; 2 * order];
        let mut log = vec![0u16; size];
        let mut x = 1u32;
        for (i, slot) in exp.iter_mut().take(order).enumerate() {
            *slot = x as u16;
            if i > 0 && x == 1 {
                return Err(Error::config(format!("polynomial {poly:#x} is not primitive")));
            }
            log[x as usize] = i as u16;
            x <<= 1;
            if x & size as u32 != 0 {
                x ^= poly;
            }
        }
        if x != 1 {
            return Err(Error::config(format!("polynomial {poly:#x} is not primitive")));
        }
        for i in order..2 * order {
            exp[i] = exp[i - order];
        }
        Ok(GaloisField { bits, poly, exp, log })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn poly(&self) -> u32 {
        self.poly
    }

    /// Number of nonzero elements.
    pub fn order(&self) -> usize {
        (1usize << self.bits) - 1
    }

    /// α^i.
    #[inline]
    pub fn alpha_pow(&self, i: usize) -> u16 {
        self.exp[i % self.order()]
    }

    #[inline]
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize]
    }

    #[inline]
    pub fn div(&self, a: u16, b: u16) -> u16 {
        assert!(b != 0, "division by zero in GF(2^m)");
        if a == 0 {
            return 0;
        }
        let order = self.order();
        self.exp[self.log[a as usize] as usize + order - self.log[b as usize] as usize]
    }

    #[inline]
    pub fn inv(&self, a: u16) -> u16 {
        self.div(1, a)
    }

    /// Evaluate a polynomial with coefficients in descending degree order.
    pub fn eval_desc(&self, coeffs: &[u16], x: u16) -> u16 {
        coeffs.iter().fold(0, |acc, &c| self.mul(acc, x) ^ c)
    }
}
