//! Code construction: reliability ordering, frozen/good sets, CRC and encoding.
//!
//! A [`CodeSpec`] fixes everything the decoders need to know about one code:
//! block length `n`, payload length, CRC attachment, the frozen-bit mask and
//! the mask of "good" (skippable) information bits.  Construction ranks bit
//! channels with the polarization-weight recursion (beta expansion with
//! `beta = 2^(1/4)`) and freezes the least reliable positions.
//!
//! # Example
//! ```
//! use polar_core::code::{CodeSpec, CrcSpec};
//!
//! let spec = CodeSpec::build(8, 4, CrcSpec::none(), 0).unwrap();
//! assert_eq!(spec.frozen_positions(), vec![0, 1, 2, 4]);
//! let codeword = spec.encode(&[true, false, true, false]).unwrap();
//! assert_eq!(codeword.len(), 8);
//! ```

use thiserror::Error;

/// Largest supported block length (`2^15`).
pub const MAX_BLOCK_LEN: usize = 1 << 15;

/// Errors raised while building or using a [`CodeSpec`].
#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodeError {
    #[error("block length {0} is not a power of two in [2, 32768]")]
    BadBlockLength(usize),
    #[error("payload {k_payload} + crc {crc_len} exceeds block length {n}")]
    RateOversubscribed { n: usize, k_payload: usize, crc_len: usize },
    #[error("good count {good_count} exceeds information bit count {k_total}")]
    BadGoodCount { good_count: usize, k_total: usize },
    #[error("crc width {0} out of range [0, 32]")]
    BadCrcWidth(usize),
    #[error("crc polynomial {poly:#x} has no leading coefficient for width {len}")]
    BadCrcPoly { poly: u64, len: usize },
    #[error("payload has {got} bits, expected {expected}")]
    PayloadLength { got: usize, expected: usize },
    #[error("mask has {got} entries, expected {expected}")]
    MaskLength { got: usize, expected: usize },
    #[error("good position {0} is frozen")]
    GoodOnFrozen(usize),
    #[error("malformed code file: {0}")]
    Parse(String),
}

/// Cyclic redundancy check attachment.
///
/// `poly` stores the full generator polynomial including the leading
/// coefficient, so the degree-8 polynomial `x^8 + x^2 + x + 1` is `0x107`.
/// A width of zero disables the CRC.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrcSpec {
    /// Number of CRC bits appended after the payload.
    pub len: usize,
    /// Generator polynomial, leading coefficient included.
    pub poly: u64,
    /// Initial shift-register value.
    pub init: u64,
}

impl CrcSpec {
    /// No CRC; `check` always passes.
    pub fn none() -> Self {
        CrcSpec { len: 0, poly: 0x1, init: 0 }
    }

    /// Eight-bit CRC with generator `x^8 + x^2 + x + 1` and zero init.
    pub fn crc8() -> Self {
        CrcSpec { len: 8, poly: 0x107, init: 0 }
    }

    /// Validates width and leading coefficient.
    pub fn new(len: usize, poly: u64, init: u64) -> Result<Self, CodeError> {
        if len > 32 {
            return Err(CodeError::BadCrcWidth(len));
        }
        if poly >> len != 1 {
            return Err(CodeError::BadCrcPoly { poly, len });
        }
        Ok(CrcSpec { len, poly, init: init & Self::mask(len) })
    }

    fn mask(len: usize) -> u64 {
        if len == 0 { 0 } else { (1u64 << len) - 1 }
    }

    /// Remainder of the payload under the generator polynomial, MSB first.
    ///
    /// Bit-serial long division: the register starts at `init`, shifts the
    /// message in MSB first and reduces by the generator on overflow.
    pub fn remainder(&self, payload: &[bool]) -> Vec<bool> {
        if self.len == 0 {
            return Vec::new();
        }
        let mask = Self::mask(self.len);
        let low = self.poly & mask;
        let mut reg = self.init & mask;
        for &bit in payload {
            let feedback = ((reg >> (self.len - 1)) & 1 == 1) ^ bit;
            reg = (reg << 1) & mask;
            if feedback {
                reg ^= low;
            }
        }
        (0..self.len).map(|i| (reg >> (self.len - 1 - i)) & 1 == 1).collect()
    }

    /// True when `crc` equals the recomputed remainder of `payload`.
    pub fn check(&self, payload: &[bool], crc: &[bool]) -> bool {
        crc.len() == self.len && self.remainder(payload) == crc
    }
}

/// In-place polar transform `x = u F^(⊗m)` in natural bit order.
///
/// The transform is an involution: applying it twice restores the input.
pub fn polar_transform(bits: &mut [bool]) {
    let n = bits.len();
    debug_assert!(n.is_power_of_two());
    let mut step = 1;
    while step < n {
        let mut base = 0;
        while base < n {
            for i in base..base + step {
                bits[i] ^= bits[i + step];
            }
            base += 2 * step;
        }
        step *= 2;
    }
}

/// Channel indices ordered least reliable first.
///
/// Reliability is the polarization weight `w(i) = Σ b_j(i)·2^(j/4)` over the
/// binary digits of `i`; ties cannot occur, but index order breaks them
/// deterministically anyway.
pub fn reliability_order(n: usize) -> Result<Vec<usize>, CodeError> {
    if !n.is_power_of_two() || n < 2 || n > MAX_BLOCK_LEN {
        return Err(CodeError::BadBlockLength(n));
    }
    let bits = n.trailing_zeros() as usize;
    let pow: Vec<f64> = (0..bits).map(|j| 2f64.powf(j as f64 / 4.0)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    let weight = |i: usize| -> f64 {
        (0..bits).filter(|&j| i >> j & 1 == 1).map(|j| pow[j]).sum()
    };
    order.sort_by(|&a, &b| {
        weight(a).partial_cmp(&weight(b)).unwrap().then(a.cmp(&b))
    });
    Ok(order)
}

/// Complete description of one polar code instance.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeSpec {
    n: usize,
    k_payload: usize,
    crc: CrcSpec,
    frozen: Vec<bool>,
    good: Vec<bool>,
    reliability: Vec<usize>,
    info: Vec<usize>,
}

impl CodeSpec {
    /// Builds a code from block length, payload length, CRC and good count.
    ///
    /// Freezes the `n - k_payload - crc.len` least reliable positions and
    /// marks the `good_count` most reliable information positions as good.
    pub fn build(
        n: usize,
        k_payload: usize,
        crc: CrcSpec,
        good_count: usize,
    ) -> Result<Self, CodeError> {
        let reliability = reliability_order(n)?;
        let k_total = k_payload + crc.len;
        if k_total > n {
            return Err(CodeError::RateOversubscribed { n, k_payload, crc_len: crc.len });
        }
        if good_count > k_total {
            return Err(CodeError::BadGoodCount { good_count, k_total });
        }
        let mut frozen = vec![false; n];
        for &i in &reliability[..n - k_total] {
            frozen[i] = true;
        }
        let mut good = vec![false; n];
        for &i in &reliability[n - good_count..] {
            good[i] = true;
        }
        Ok(Self::assemble(n, k_payload, crc, frozen, good, reliability))
    }

    /// Builds a code from explicit frozen/good masks.
    ///
    /// The reliability order is synthesized so frozen positions occupy its
    /// least reliable prefix while preserving polarization-weight order
    /// within each group.
    pub fn from_parts(
        n: usize,
        crc: CrcSpec,
        frozen: Vec<bool>,
        good: Vec<bool>,
    ) -> Result<Self, CodeError> {
        let beta = reliability_order(n)?;
        if frozen.len() != n {
            return Err(CodeError::MaskLength { got: frozen.len(), expected: n });
        }
        if good.len() != n {
            return Err(CodeError::MaskLength { got: good.len(), expected: n });
        }
        let k_total = frozen.iter().filter(|&&f| !f).count();
        if crc.len > k_total {
            return Err(CodeError::RateOversubscribed { n, k_payload: 0, crc_len: crc.len });
        }
        if let Some(i) = (0..n).find(|&i| good[i] && frozen[i]) {
            return Err(CodeError::GoodOnFrozen(i));
        }
        let k_payload = k_total - crc.len;
        let mut reliability: Vec<usize> = beta.iter().copied().filter(|&i| frozen[i]).collect();
        reliability.extend(beta.iter().copied().filter(|&i| !frozen[i]));
        Ok(Self::assemble(n, k_payload, crc, frozen, good, reliability))
    }

    fn assemble(
        n: usize,
        k_payload: usize,
        crc: CrcSpec,
        frozen: Vec<bool>,
        good: Vec<bool>,
        reliability: Vec<usize>,
    ) -> Self {
        let info = (0..n).filter(|&i| !frozen[i]).collect();
        CodeSpec { n, k_payload, crc, frozen, good, reliability, info }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of payload bits (CRC excluded).
    pub fn k_payload(&self) -> usize {
        self.k_payload
    }

    /// Number of information positions (payload plus CRC).
    pub fn k_total(&self) -> usize {
        self.info.len()
    }

    pub fn crc(&self) -> &CrcSpec {
        &self.crc
    }

    /// Number of tree stages: `log2(n)`.
    pub fn stages(&self) -> usize {
        self.n.trailing_zeros() as usize
    }

    pub fn is_frozen(&self, i: usize) -> bool {
        self.frozen[i]
    }

    pub fn is_good(&self, i: usize) -> bool {
        self.good[i]
    }

    /// Information positions in increasing index order.
    pub fn info_positions(&self) -> &[usize] {
        &self.info
    }

    pub fn frozen_positions(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.frozen[i]).collect()
    }

    pub fn good_positions(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.good[i]).collect()
    }

    pub fn good_count(&self) -> usize {
        self.good.iter().filter(|&&g| g).count()
    }

    /// Channel indices ordered least reliable first.
    pub fn reliability(&self) -> &[usize] {
        &self.reliability
    }

    /// Copy of this spec with every good mark cleared.
    pub fn without_good_bits(&self) -> Self {
        let mut spec = self.clone();
        spec.good = vec![false; spec.n];
        spec
    }

    /// Payload with its CRC remainder appended.
    pub fn attach_crc(&self, payload: &[bool]) -> Result<Vec<bool>, CodeError> {
        if payload.len() != self.k_payload {
            return Err(CodeError::PayloadLength { got: payload.len(), expected: self.k_payload });
        }
        let mut bits = payload.to_vec();
        bits.extend(self.crc.remainder(payload));
        Ok(bits)
    }

    /// Splits decided information bits into payload and CRC verdict.
    pub fn split_info(&self, info_bits: &[bool]) -> (Vec<bool>, bool) {
        debug_assert_eq!(info_bits.len(), self.k_total());
        let payload = info_bits[..self.k_payload].to_vec();
        let ok = self.crc.len == 0 || self.crc.check(&payload, &info_bits[self.k_payload..]);
        (payload, ok)
    }

    /// Extracts the information bits of a decided `u` vector and checks CRC.
    pub fn extract_payload(&self, u: &[bool]) -> (Vec<bool>, bool) {
        let info: Vec<bool> = self.info.iter().map(|&i| u[i]).collect();
        self.split_info(&info)
    }

    /// Encodes a payload: CRC attach, info placement, polar transform.
    pub fn encode(&self, payload: &[bool]) -> Result<Vec<bool>, CodeError> {
        let info_bits = self.attach_crc(payload)?;
        let mut u = vec![false; self.n];
        for (&pos, &bit) in self.info.iter().zip(info_bits.iter()) {
            u[pos] = bit;
        }
        polar_transform(&mut u);
        Ok(u)
    }

    /// Serializes to the plain-text code file format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("n {}\n", self.n));
        out.push_str(&format!("k_payload {}\n", self.k_payload));
        out.push_str(&format!("crc_len {}\n", self.crc.len));
        out.push_str(&format!("crc_poly {:#x}\n", self.crc.poly));
        out.push_str(&format!("crc_init {:#x}\n", self.crc.init));
        let join = |v: Vec<usize>| {
            v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ")
        };
        out.push_str(&format!("frozen {}\n", join(self.frozen_positions())));
        out.push_str(&format!("good {}\n", join(self.good_positions())));
        out
    }

    /// Parses the plain-text code file format written by [`CodeSpec::to_text`].
    pub fn from_text(text: &str) -> Result<Self, CodeError> {
        let mut n = None;
        let mut k_payload = None;
        let mut crc_len = None;
        let mut crc_poly = None;
        let mut crc_init = None;
        let mut frozen_list: Option<Vec<usize>> = None;
        let mut good_list: Option<Vec<usize>> = None;
        let parse_u64 = |s: &str| -> Result<u64, CodeError> {
            let t = s.trim();
            let r = if let Some(hex) = t.strip_prefix("0x") {
                u64::from_str_radix(hex, 16)
            } else {
                t.parse()
            };
            r.map_err(|_| CodeError::Parse(format!("bad number {t:?}")))
        };
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            match key {
                "n" => n = Some(parse_u64(rest)? as usize),
                "k_payload" => k_payload = Some(parse_u64(rest)? as usize),
                "crc_len" => crc_len = Some(parse_u64(rest)? as usize),
                "crc_poly" => crc_poly = Some(parse_u64(rest)?),
                "crc_init" => crc_init = Some(parse_u64(rest)?),
                "frozen" | "good" => {
                    let mut v = Vec::new();
                    for tok in rest.split_whitespace() {
                        v.push(parse_u64(tok)? as usize);
                    }
                    if key == "frozen" {
                        frozen_list = Some(v);
                    } else {
                        good_list = Some(v);
                    }
                }
                other => return Err(CodeError::Parse(format!("unknown key {other:?}"))),
            }
        }
        let n = n.ok_or_else(|| CodeError::Parse("missing n".into()))?;
        if !n.is_power_of_two() || n < 2 || n > MAX_BLOCK_LEN {
            return Err(CodeError::BadBlockLength(n));
        }
        let k_payload = k_payload.ok_or_else(|| CodeError::Parse("missing k_payload".into()))?;
        let crc = CrcSpec::new(
            crc_len.ok_or_else(|| CodeError::Parse("missing crc_len".into()))?,
            crc_poly.ok_or_else(|| CodeError::Parse("missing crc_poly".into()))?,
            crc_init.unwrap_or(0),
        )?;
        let mut frozen = vec![false; n];
        for i in frozen_list.ok_or_else(|| CodeError::Parse("missing frozen".into()))? {
            if i >= n {
                return Err(CodeError::Parse(format!("frozen position {i} out of range")));
            }
            frozen[i] = true;
        }
        let mut good = vec![false; n];
        for i in good_list.unwrap_or_default() {
            if i >= n {
                return Err(CodeError::Parse(format!("good position {i} out of range")));
            }
            good[i] = true;
        }
        let spec = CodeSpec::from_parts(n, crc, frozen, good)?;
        if spec.k_payload != k_payload {
            return Err(CodeError::Parse(format!(
                "k_payload {} inconsistent with {} unfrozen positions and crc_len {}",
                k_payload,
                spec.k_total(),
                spec.crc.len
            )));
        }
        Ok(spec)
    }
}
