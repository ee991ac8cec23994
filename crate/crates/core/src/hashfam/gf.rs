//! Arithmetic in GF(2^m) for m = 1..32.

use super::HashError;

/// Reduction polynomial for each supported m, including the leading term.
const IRREDUCIBLE: [u64; 33] = [
    0,
    0x3,
    0x7,
    0xB,
    0x13,
    0x25,
    0x43,
    0x83,
    0x11B,
    0x211,
    0x409,
    0x805,
    0x1053,
    0x201B,
    0x4443,
    0x8003,
    0x1002B,
    0x20009,
    0x40081,
    0x80027,
    0x100009,
    0x200005,
    0x400003,
    0x800021,
    0x100001B,
    0x2000009,
    0x4000047,
    0x8000027,
    0x10000009,
    0x20000005,
    0x40000053,
    0x80000009,
    0x1000000AF,
];

pub const MAX_M: u32 = 32;

pub fn irreducible(m: u32) -> Result<u64, HashError> {
    if (1..=MAX_M).contains(&m) {
        Ok(IRREDUCIBLE[m as usize])
    } else {
        Err(HashError::UnsupportedField(m))
    }
}

/// Carry-less product followed by reduction modulo `poly` (degree `m`).
/// Inputs must already be reduced (`< 2^m`).
#[inline]
pub fn mul_mod(a: u64, b: u64, m: u32, poly: u64) -> u64 {
    let mut prod = 0u64;
    let mut b = b;
    let mut i = 0;
    while b != 0 {
        if b & 1 == 1 {
            prod ^= a << i;
        }
        b >>= 1;
        i += 1;
    }
    for bit in (m..2 * m).rev() {
        if prod >> bit & 1 == 1 {
            prod ^= poly << (bit - m);
        }
    }
    prod
}

/// Product in GF(2^m) with the built-in reduction polynomial.
pub fn field_mul(a: u64, b: u64, m: u32) -> Result<u64, HashError> {
    let poly = irreducible(m)?;
    let mask = (1u64 << m) - 1;
    if a & !mask != 0 || b & !mask != 0 {
        return Err(HashError::ElementOutOfRange { m });
    }
    Ok(mul_mod(a, b, m, poly))
}
