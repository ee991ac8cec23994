//! Frozen regression constants, set to the largest ratios measured by the
//! acceptance suite. Measured ratios must not exceed these.

/// det-mis family: rounds ≤ C1 · ⌈log₂ Δ⌉ · ⌈log₂ n⌉.
pub const C1: f64 = 1611.0;
/// det-mis-congest: rounds ≤ C2 · D · ⌈log₂ n⌉².
pub const C2: f64 = 1317.0;
/// det-spanner: rounds ≤ C3 · k · ⌈log₂ n⌉.
pub const C3: f64 = 10.0;
/// det-spanner: |H| ≤ C_SIZE · k · n^{1+1/k} · log₂ n.
pub const C_SIZE: f64 = 0.1768;
