//! Reed-Solomon codes over GF(2^m), BCH view, with bounded-distance decoding.
//!
//! Codewords are `n` symbols, message first then `n - k` parity symbols,
//! read as a polynomial with the first symbol as the highest-degree
//! coefficient. The generator has roots α^1 .. α^(n-k). Codes with
//! `n < 2^m - 1` are shortened.

use super::gf::GaloisField;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReedSolomon {
    field: GaloisField,
    n: usize,
    k: usize,
    /// Generator polynomial, descending degree, monic.
    generator: Vec<u16>,
}

impl ReedSolomon {
    pub fn new(n: usize, k: usize, field_bits: u32) -> Result<Self> {
        let field = GaloisField::new(field_bits)?;
        if k == 0 || k > n {
            return Err(Error::config(format!("RS({n},{k}) needs 0 < k ≤ n")));
        }
        if n > field.order() {
            return Err(Error::config(format!(
                "RS length {n} exceeds 2^{field_bits} - 1 = {}",
                field.order()
            )));
        }
        let mut generator = vec![1u16];
        for i in 1..=(n - k) {
            // Multiply by (x - α^i).
            let root = field.alpha_pow(i);
            let mut next = vec![0u16; generator.len() + 1];
            for (j, &g) in generator.iter().enumerate() {
                next[j] ^= g;
                next[j + 1] ^= field.mul(g, root);
            }
            generator = next;
        }
        Ok(ReedSolomon { field, n, k, generator })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    /// Correctable symbol errors.
    pub fn capacity(&self) -> usize {
        (self.n - self.k) / 2
    }

    pub fn encode(&self, msg: &[u16]) -> Vec<u16> {
        assert_eq!(msg.len(), self.k, "message length must be k");
        let parity_len = self.n - self.k;
        let mut rem = msg.to_vec();
        rem.resize(self.n, 0);
        // Polynomial long division by the monic generator.
        for i in 0..self.k {
            let coef = rem[i];
            if coef != 0 {
                for (j, &g) in self.generator.iter().enumerate().skip(1) {
                    rem[i + j] ^= self.field.mul(g, coef);
                }
            }
        }
        let mut out = msg.to_vec();
        out.extend_from_slice(&rem[self.k..self.k + parity_len]);
        out
    }

    fn syndromes(&self, word: &[u16]) -> Vec<u16> {
        (1..=(self.n - self.k))
            .map(|i| self.field.eval_desc(word, self.field.alpha_pow(i)))
            .collect()
    }

    /// Bounded-distance decoding. Returns the corrected message, or `None`
    /// when more than `capacity()` errors are detected.
    pub fn decode(&self, word: &[u16]) -> Option<Vec<u16>> {
        assert_eq!(word.len(), self.n, "word length must be n");
        let f = &self.field;
        let synd = self.syndromes(word);
        if synd.iter().all(|&s| s == 0) {
            return Some(word[..self.k].to_vec());
        }

        // Berlekamp-Massey; locator in ascending degree order.
        let mut lambda = vec![1u16];
        let mut prev = vec![1u16];
        let mut len = 0usize;
        let mut shift = 1usize;
        let mut prev_disc = 1u16;
        for step in 0..synd.len() {
            let mut disc = synd[step];
            for i in 1..=len.min(lambda.len() - 1) {
                disc ^= f.mul(lambda[i], synd[step - i]);
            }
            if disc == 0 {
                shift += 1;
                continue;
            }
            let scale = f.div(disc, prev_disc);
            let mut next = lambda.clone();
            if next.len() < prev.len() + shift {
                next.resize(prev.len() + shift, 0);
            }
            for (i, &p) in prev.iter().enumerate() {
                next[i + shift] ^= f.mul(scale, p);
            }
            if 2 * len <= step {
                prev = lambda;
                len = step + 1 - len;
                prev_disc = disc;
                shift = 1;
            } else {
                shift += 1;
            }
            lambda = next;
        }
        while lambda.len() > 1 && *lambda.last().unwrap() == 0 {
            lambda.pop();
        }
        let n_err = lambda.len() - 1;
        if n_err == 0 || n_err > self.capacity() || n_err != len {
            return None;
        }

        // Error evaluator Ω(x) = S(x)Λ(x) mod x^(2t), ascending.
        let two_t = synd.len();
        let mut omega = vec![0u16; two_t];
        for (i, &s) in synd.iter().enumerate() {
            for (j, &l) in lambda.iter().enumerate() {
                if i + j < two_t {
                    omega[i + j] ^= f.mul(s, l);
                }
            }
        }
        let eval_asc = |poly: &[u16], x: u16| poly.iter().rev().fold(0u16, |acc, &c| f.mul(acc, x) ^ c);
        // Formal derivative: only odd-degree terms survive in characteristic 2.
        let deriv: Vec<u16> = (1..lambda.len())
            .map(|i| if i % 2 == 1 { lambda[i] } else { 0 })
            .collect();

        // Chien search over the n positions. Position p has locator
        // X = α^(n-1-p); it is in error when Λ(X^-1) = 0.
        let mut corrected = word.to_vec();
        let mut found = 0usize;
        let order = f.order();
        for (p, symbol) in corrected.iter_mut().enumerate() {
            let power = self.n - 1 - p;
            let x_inv = f.alpha_pow(order - power % order);
            if eval_asc(&lambda, x_inv) == 0 {
                let denom = eval_asc(&deriv, x_inv);
                if denom == 0 {
                    return None;
                }
                *symbol ^= f.div(eval_asc(&omega, x_inv), denom);
                found += 1;
            }
        }
        if found != n_err {
            return None;
        }
        if self.syndromes(&corrected).iter().any(|&s| s != 0) {
            return None;
        }
        corrected.truncate(self.k);
        Some(corrected)
    }
}
