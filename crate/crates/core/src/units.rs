//! Squeezing unit conversions.
//!
//! A squeezing parameter `k` (natural units) corresponds to `10 log10(e^{2k})` dB,
//! so 10 dB is roughly 1.1513.

use std::f64::consts::LOG10_E;

/// dB per natural unit of squeezing, `20 log10(e)`.
pub const DB_PER_NATURAL: f64 = 20.0 * LOG10_E;

pub fn db_to_natural(db: f64) -> f64 {
    db / DB_PER_NATURAL
}

pub fn natural_to_db(k: f64) -> f64 {
    k * DB_PER_NATURAL
}
