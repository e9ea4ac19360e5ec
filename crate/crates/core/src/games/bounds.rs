//! Closed-form values for the CHSH family.

/// `cos^2(pi/8)`, the CHSH quantum value.
pub const TSIRELSON: f64 = 0.853_553_390_593_273_7;

/// `1/2 + 2^{-(n+1)/2}`.
pub fn upper_bound_chsh_n(n: usize) -> f64 {
    0.5 + 2f64.powf(-((n + 1) as f64) / 2.0)
}

/// `1/2 + 1/2 2^{-n/2}`. This is a conjecture and only used in reports.
pub fn conjectured_value_chsh_n(n: usize) -> f64 {
    0.5 + 0.5 * 2f64.powf(-(n as f64) / 2.0)
}

/// Value of the shared-randomness guessing strategy, `1/2 + 2^{-(n+1)}`.
pub fn guessing_lower_bound(n: usize) -> f64 {
    0.5 + 2f64.powi(-((n + 1) as i32))
}

/// `cos^2(pi/8)^n`.
pub fn parallel_repetition_value(n: usize) -> f64 {
    TSIRELSON.powi(n as i32)
}
