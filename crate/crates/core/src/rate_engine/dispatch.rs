use serde::{Deserialize, Serialize};

use super::closed_form::*;
use super::minimax::{cap_memoryless_general_both, SolverOptions};
use super::RateReport;
use crate::channel_model::{ChannelKind, NetworkSpec, RouteSpec};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundTriple {
    pub capacity: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Single attacked binary route, both attack families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Table1 {
    pub noise: f64,
    pub distortion: f64,
    pub replacement: BoundTriple,
    pub erasure: BoundTriple,
}

/// Binary table at `n_r = n_a = 1`.
pub fn table1(noise: f64, distortion: f64) -> Result<Table1> {
    for (name, v) in [("N", noise), ("D", distortion)] {
        if !(0.0..=0.5).contains(&v) {
            return Err(Error::OutOfRange {
                name,
                value: v,
                range: "[0, 0.5]",
            });
        }
    }
    let bsc = NetworkSpec::identical(1, 1, RouteSpec::bsc(noise, distortion)?)?;
    let bec = NetworkSpec::identical(1, 1, RouteSpec::bec(noise, distortion)?)?;
    Ok(Table1 {
        noise,
        distortion,
        replacement: BoundTriple {
            capacity: cap_memoryless_replacement(&bsc)?.overall,
            lower: low_foreseer_replacement(&bsc)?.overall,
            upper: up_foreseer_replacement(&bsc)?.overall,
        },
        erasure: BoundTriple {
            capacity: cap_memoryless_erasure(&bec)?.overall,
            lower: low_foreseer_erasure(&bec)?.overall,
            upper: up_foreseer_erasure(&bec)?.overall,
        },
    })
}

fn all(spec: &NetworkSpec, f: impl Fn(&RouteSpec) -> bool) -> bool {
    spec.routes().iter().all(f)
}

/// Every evaluator applicable to `spec`.
///
/// Closed forms cover uniform BSC, BEC and AWGN networks (they hold for both
/// CSI orders); other discrete networks go to the numerical solver, which
/// reports both orders. `n_a = 0` yields the clean capacities only.
pub fn evaluate_all(spec: &NetworkSpec, opts: &SolverOptions) -> Result<Vec<RateReport>> {
    let is_bsc = |r: &RouteSpec| matches!(r.channel, ChannelKind::Bsc { .. });
    let is_bec = |r: &RouteSpec| matches!(r.channel, ChannelKind::Bec { .. });
    let is_awgn = |r: &RouteSpec| matches!(r.channel, ChannelKind::Awgn { .. });
    let is_general = |r: &RouteSpec| matches!(r.channel, ChannelKind::General { .. });

    if spec.n_a() == 0 && !spec.routes().iter().any(is_general) {
        return Ok(vec![clean_capacity(spec)?]);
    }
    if all(spec, is_bsc) {
        let mut cap = cap_memoryless_replacement(spec)?;
        let mut out = Vec::new();
        match (low_foreseer_replacement(spec), up_foreseer_replacement(spec)) {
            (Ok(lo), Ok(up)) => {
                out.push(cap);
                out.push(lo);
                out.push(up);
            }
            (Err(e), _) | (_, Err(e)) => {
                cap.warnings.push(format!("foreseer bounds skipped: {e}"));
                out.push(cap);
            }
        }
        return Ok(out);
    }
    if all(spec, is_bec) {
        return Ok(vec![
            cap_memoryless_erasure(spec)?,
            low_foreseer_erasure(spec)?,
            up_foreseer_erasure(spec)?,
        ]);
    }
    if all(spec, is_awgn) {
        return Ok(vec![cap_memoryless_gaussian(spec)?]);
    }
    if spec.routes().iter().all(RouteSpec::is_discrete) {
        let both = cap_memoryless_general_both(spec, opts)?;
        return Ok(vec![both.no_csi, both.tx_csi]);
    }
    Err(Error::NotApplicable {
        evaluator: "evaluate_all",
        reason: "mixed Gaussian and discrete routes; applicable evaluators: \
                 cap_memoryless_gaussian (all AWGN), cap_memoryless_general (all discrete)"
            .into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info_math::h2;

    #[test]
    fn table_at_reference_point() {
        let t = table1(0.1, 0.1).unwrap();
        assert!((t.replacement.capacity - 0.3199229542717202).abs() < 1e-12);
        assert_eq!(t.replacement.lower, 0.0);
        assert!((t.replacement.upper - 0.06200881282143756).abs() < 1e-12);
        assert!((t.erasure.capacity - 0.81).abs() < 1e-12);
        assert!((t.erasure.lower - 0.3413842384749819).abs() < 1e-12);
        assert!((t.erasure.upper - 0.8029784685375882).abs() < 1e-12);
    }

    #[test]
    fn table_without_adversary() {
        assert_eq!(table1(0.0, 0.0).unwrap().erasure.upper, 1.0);
        let t = table1(0.2, 0.0).unwrap();
        for v in [t.replacement.capacity, t.replacement.lower, t.replacement.upper] {
            assert!((v - (1.0 - h2(0.2))).abs() < 1e-12);
        }
        for v in [t.erasure.capacity, t.erasure.lower, t.erasure.upper] {
            assert!((v - 0.8).abs() < 1e-12);
        }
        assert!(table1(0.6, 0.1).is_err());
    }

    #[test]
    fn dispatch_by_family() {
        let opts = SolverOptions {
            grid_resolution: 21,
            ..SolverOptions::default()
        };
        let bsc = NetworkSpec::identical(2, 1, RouteSpec::bsc(0.1, 0.1).unwrap()).unwrap();
        assert_eq!(evaluate_all(&bsc, &opts).unwrap().len(), 3);
        let clean = NetworkSpec::identical(2, 0, RouteSpec::bsc(0.1, 0.1).unwrap()).unwrap();
        let r = evaluate_all(&clean, &opts).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].evaluator, "clean_capacity");
        let wide = NetworkSpec::identical(1, 1, RouteSpec::bsc(0.1, 0.7).unwrap()).unwrap();
        let r = evaluate_all(&wide, &opts).unwrap();
        assert_eq!(r.len(), 1);
        assert!(!r[0].warnings.is_empty());
        let mixed = NetworkSpec::new(
            1,
            vec![RouteSpec::bsc(0.1, 0.1).unwrap(), RouteSpec::bec(0.1, 0.1).unwrap()],
        )
        .unwrap();
        let r = evaluate_all(&mixed, &opts).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r[0].overall <= r[1].overall + 1e-9);
        let bad = NetworkSpec::new(
            1,
            vec![RouteSpec::bsc(0.1, 0.1).unwrap(), RouteSpec::awgn(0.1, 0.1, 1.0).unwrap()],
        )
        .unwrap();
        assert!(matches!(evaluate_all(&bad, &opts), Err(Error::NotApplicable { .. })));
        let infeasible = NetworkSpec::identical(1, 1, RouteSpec::awgn(0.1, 1.0, 1.0).unwrap()).unwrap();
        assert!(matches!(evaluate_all(&infeasible, &opts), Err(Error::Infeasible(_))));
    }
}
