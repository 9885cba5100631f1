//! Gamma-function helpers. Every ratio is formed as a difference of
//! log-gamma values and exponentiated once, so arguments such as `3κ` or
//! `2κ+1` never overflow.

pub use statrs::function::gamma::ln_gamma;

/// `Γ(num[0])·Γ(num[1])··· / (Γ(den[0])·Γ(den[1])···)`
pub fn gamma_ratio(num: &[f64], den: &[f64]) -> f64 {
    log_gamma_ratio(num, den).exp()
}

pub fn log_gamma_ratio(num: &[f64], den: &[f64]) -> f64 {
    num.iter().map(|&x| ln_gamma(x)).sum::<f64>() - den.iter().map(|&x| ln_gamma(x)).sum::<f64>()
}
