//! Closed-form constants that only need half-integer gamma values.

use std::f64::consts::PI;

/// Γ(m/2) for a positive integer `m`, by the recurrence Γ(x+1) = xΓ(x)
/// starting from Γ(1) = 1 or Γ(1/2) = √π.
pub fn gamma_half(m: u32) -> f64 {
    assert!(m > 0, "gamma_half needs a positive argument");
    let (mut value, mut twice_x) = if m % 2 == 0 { (1.0, 2) } else { (PI.sqrt(), 1) };
    while twice_x < m {
        value *= twice_x as f64 / 2.0;
        twice_x += 2;
    }
    value
}

/// Lebesgue measure of the unit ball in ℝ^d.
pub fn unit_ball_volume(d: usize) -> f64 {
    PI.powf(d as f64 / 2.0) / gamma_half(d as u32 + 2)
}

/// Surface measure of the unit sphere S^{d-1}.
pub fn unit_sphere_area(d: usize) -> f64 {
    d as f64 * unit_ball_volume(d)
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}
