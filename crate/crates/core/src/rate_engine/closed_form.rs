//! Closed-form rates for binary replacement, binary erasure and Gaussian
//! routes.

use log::warn;

use super::{min_over_placements, require_all, RateReport};
use crate::channel_model::{ChannelKind, NetworkSpec, RouteSpec};
use crate::error::{Error, Result};
use crate::info_math::{h2, star_unchecked};

fn noise(route: &RouteSpec) -> f64 {
    route.noise().unwrap_or(0.0)
}

fn is_bsc(r: &RouteSpec) -> bool {
    matches!(r.channel, ChannelKind::Bsc { .. })
}

fn is_bec(r: &RouteSpec) -> bool {
    matches!(r.channel, ChannelKind::Bec { .. })
}

fn is_awgn(r: &RouteSpec) -> bool {
    matches!(r.channel, ChannelKind::Awgn { .. })
}

fn check_limit(spec: &NetworkSpec, max: f64, range: &'static str) -> Result<()> {
    for r in spec.routes() {
        if r.distortion_limit > max {
            return Err(Error::OutOfRange {
                name: "D",
                value: r.distortion_limit,
                range,
            });
        }
    }
    Ok(())
}

fn foreseer_replacement_warnings(spec: &NetworkSpec) -> Vec<String> {
    spec.routes()
        .iter()
        .enumerate()
        .filter(|(_, r)| r.distortion_limit > 0.25)
        .map(|(j, r)| {
            let msg = format!(
                "route {j}: D = {} > 0.25, H(2D) is past its peak and the foreseer \
                 lower bound is not monotone in D",
                r.distortion_limit
            );
            warn!("{msg}");
            msg
        })
        .collect()
}

/// Memoryless replacement capacity on BSC routes:
/// `Σ_j 1 - H(N_j * s(j) D̃_j)` minimized over placements, `D̃ = min(D, 1-D)`.
pub fn cap_memoryless_replacement(spec: &NetworkSpec) -> Result<RateReport> {
    require_all(spec, "cap_memoryless_replacement", "BSC", is_bsc)?;
    check_limit(spec, 1.0, "[0, 1]")?;
    min_over_placements(
        spec,
        "cap_memoryless_replacement",
        "memoryless capacity, binary replacement attack",
        |_, r, attacked| {
            let d = r.distortion_limit;
            let eff = if attacked { d.min(1.0 - d) } else { 0.0 };
            // H(N * N') grows as N * N' moves toward 1/2, so the inner max
            // over N' <= s D̃ sits at the endpoint.
            Ok(1.0 - h2(star_unchecked(noise(r), eff)))
        },
    )
}

/// Foreseer lower bound, replacement: `Σ_j [1 - H(N_j) - H(2 s(j) D_j)]^+`.
pub fn low_foreseer_replacement(spec: &NetworkSpec) -> Result<RateReport> {
    require_all(spec, "low_foreseer_replacement", "BSC", is_bsc)?;
    check_limit(spec, 0.5, "[0, 0.5] for foreseer replacement bounds")?;
    let mut report = min_over_placements(
        spec,
        "low_foreseer_replacement",
        "foreseer lower bound, binary replacement attack",
        |_, r, attacked| {
            let d = if attacked { 2.0 * r.distortion_limit } else { 0.0 };
            Ok((1.0 - h2(noise(r)) - h2(d)).max(0.0))
        },
    )?;
    report.warnings = foreseer_replacement_warnings(spec);
    Ok(report)
}

/// Foreseer upper bound, replacement: `Σ_j [1 - H(N_j) - H(s(j) D_j)]^+`.
pub fn up_foreseer_replacement(spec: &NetworkSpec) -> Result<RateReport> {
    require_all(spec, "up_foreseer_replacement", "BSC", is_bsc)?;
    check_limit(spec, 0.5, "[0, 0.5] for foreseer replacement bounds")?;
    let mut report = min_over_placements(
        spec,
        "up_foreseer_replacement",
        "foreseer upper bound, binary replacement attack",
        |_, r, attacked| {
            let d = if attacked { r.distortion_limit } else { 0.0 };
            Ok((1.0 - h2(noise(r)) - h2(d)).max(0.0))
        },
    )?;
    report.warnings = foreseer_replacement_warnings(spec);
    Ok(report)
}

/// Memoryless erasure capacity: `Σ_j (1 - s(j) D_j)(1 - N_j)`.
pub fn cap_memoryless_erasure(spec: &NetworkSpec) -> Result<RateReport> {
    require_all(spec, "cap_memoryless_erasure", "BEC", is_bec)?;
    check_limit(spec, 1.0, "[0, 1]")?;
    min_over_placements(
        spec,
        "cap_memoryless_erasure",
        "memoryless capacity, binary erasing attack",
        |_, r, attacked| {
            let d = if attacked { r.distortion_limit } else { 0.0 };
            Ok((1.0 - d) * (1.0 - noise(r)))
        },
    )
}

/// Foreseer lower bound, erasure. Per attacked route
/// `[(1 - N) - (N̄ H(D / N̄) + H(D) - D)]^+` with `N̄ = N(1 - D) + D`;
/// unattacked routes contribute `1 - N`.
pub fn low_foreseer_erasure(spec: &NetworkSpec) -> Result<RateReport> {
    require_all(spec, "low_foreseer_erasure", "BEC", is_bec)?;
    check_limit(spec, 1.0, "[0, 1]")?;
    min_over_placements(
        spec,
        "low_foreseer_erasure",
        "foreseer lower bound, binary erasing attack",
        |_, r, attacked| {
            let n = noise(r);
            let d = if attacked { r.distortion_limit } else { 0.0 };
            let n_bar = n * (1.0 - d) + d;
            let ambiguity = if n_bar > 0.0 { n_bar * h2(d / n_bar) } else { 0.0 };
            Ok(((1.0 - n) - (ambiguity + h2(d) - d)).max(0.0))
        },
    )
}

/// Foreseer upper bound, erasure:
/// `[H((1-N')(1-N)) + (1-N')(1-N-H(N)) - H(N'/2)]^+` with `N' = s(j) D_j`.
pub fn up_foreseer_erasure(spec: &NetworkSpec) -> Result<RateReport> {
    require_all(spec, "up_foreseer_erasure", "BEC", is_bec)?;
    check_limit(spec, 1.0, "[0, 1]")?;
    min_over_placements(
        spec,
        "up_foreseer_erasure",
        "foreseer upper bound, binary erasing attack",
        |_, r, attacked| {
            let n = noise(r);
            let d = if attacked { r.distortion_limit } else { 0.0 };
            let pass = (1.0 - d) * (1.0 - n);
            Ok((h2(pass) + (1.0 - d) * (1.0 - n - h2(n)) - h2(d / 2.0)).max(0.0))
        },
    )
}

/// `½ log2 x`.
fn theta(x: f64) -> f64 {
    0.5 * x.log2()
}

/// Memoryless Gaussian capacity:
/// `Σ_j θ((P_j - s(j)D_j + N_j) / (s(j)D_j + N_j))` minimized over placements.
pub fn cap_memoryless_gaussian(spec: &NetworkSpec) -> Result<RateReport> {
    require_all(spec, "cap_memoryless_gaussian", "AWGN", is_awgn)?;
    if spec.n_a() > 0 {
        for (j, r) in spec.routes().iter().enumerate() {
            let p = r.power.unwrap_or(0.0);
            if p <= r.distortion_limit {
                return Err(Error::Infeasible(format!(
                    "route {j}: power P = {p} must exceed distortion limit D = {} \
                     (the worst-case attack needs X_a ~ N(0, P - D))",
                    r.distortion_limit
                )));
            }
        }
    }
    min_over_placements(
        spec,
        "cap_memoryless_gaussian",
        "memoryless capacity, Gaussian replacement attack",
        |_, r, attacked| {
            let n = noise(r);
            let p = r.power.unwrap_or(0.0);
            let d = if attacked { r.distortion_limit } else { 0.0 };
            Ok(theta((p - d + n) / (d + n)))
        },
    )
}

/// Single attacked Gaussian route written as `½ log2(1 + (P - 2D)/(D + N))`.
pub fn gaussian_comparison_capacity(power: f64, noise: f64, distortion: f64) -> f64 {
    0.5 * (1.0 + (power - 2.0 * distortion) / (distortion + noise)).log2()
}

/// Per-route capacities with no adversary, for the built-in channel kinds.
pub fn clean_capacity(spec: &NetworkSpec) -> Result<RateReport> {
    require_all(spec, "clean_capacity", "BSC, BEC or AWGN", |r| {
        !matches!(r.channel, ChannelKind::General { .. })
    })?;
    let terms = spec
        .routes()
        .iter()
        .map(|r| match r.channel {
            ChannelKind::Bsc { crossover } => 1.0 - h2(crossover),
            ChannelKind::Bec { erasure } => 1.0 - erasure,
            ChannelKind::Awgn { variance } => theta(1.0 + r.power.unwrap_or(0.0) / variance),
            ChannelKind::General { .. } => unreachable!(),
        })
        .collect::<Vec<_>>();
    Ok(super::finish(
        "clean_capacity",
        "per-route capacity without adversaries",
        vec![super::PlacementRate {
            placement: crate::channel_model::PlacementVector::none(spec.n_r()),
            value: terms.iter().sum(),
            route_terms: terms,
        }],
    ))
}
