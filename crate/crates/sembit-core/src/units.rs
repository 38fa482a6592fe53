//! Decibel/linear conversions used throughout the crate.
//!
//! SINR thresholds are stored in dB; the scheme modules convert linear SINRs
//! to dB before evaluating the logistic model.

/// Converts a dB value to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear power ratio to dB. Zero maps to `-inf`.
pub fn linear_to_db(linear: f64) -> f64 {
    if linear == 0.0 {
        f64::NEG_INFINITY
    } else {
        10.0 * linear.log10()
    }
}

/// Converts a dBm value to watts.
pub fn dbm_to_watt(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}
