//! Finite ε-nets for `L(ℝ)` restricted to a window.
//!
//! Net elements are piecewise linear with nodes and values on a dyadic
//! lattice `δ = 2^{-p} ≤ ε`, adjacent values differing by at most one lattice
//! step. Dyadic spacing keeps every value difference exact, so each element
//! has Lipschitz defect exactly zero or `-δ`.
//!
//! Covering: for a 1-Lipschitz `f`, rounding `f` at each node to the nearest
//! lattice value moves adjacent values by at most one step, and the result
//! stays within `δ/2` at the nodes and within `δ` between them.

use super::Func01;
use crate::error::{Error, Result};

pub const DEFAULT_NET_CAP: usize = 1_000_000;

fn dyadic_spacing(eps: f64) -> Result<f64> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidConfig(format!("eps must be positive, got {eps}")));
    }
    let p = (-eps.log2()).ceil().max(0.0) as i32;
    Ok(0.5f64.powi(p))
}

fn node_count(window: (f64, f64), delta: f64) -> Result<usize> {
    let (a, b) = window;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::InvalidGrid(format!("bad window [{a}, {b}]")));
    }
    Ok(((b - a) / delta - 1e-9).ceil() as usize + 1)
}

/// Number of net elements for the given `eps` and window.
pub fn net_size(eps: f64, window: (f64, f64)) -> Result<u128> {
    let delta = dyadic_spacing(eps)?;
    let nodes = node_count(window, delta)?;
    let levels = (1.0 / delta) as usize + 1;
    // paths of length `nodes` through levels with steps in {-1, 0, 1}
    let mut counts = vec![1u128; levels];
    for _ in 1..nodes {
        let next: Vec<u128> = (0..levels)
            .map(|v| {
                let lo = v.saturating_sub(1);
                let hi = (v + 1).min(levels - 1);
                counts[lo..=hi]
                    .iter()
                    .fold(0u128, |acc, c| acc.saturating_add(*c))
            })
            .collect();
        counts = next;
    }
    Ok(counts.iter().fold(0u128, |acc, c| acc.saturating_add(*c)))
}

/// All net elements at scale `eps` on `window`, as functions on the net's
/// own grid (which may extend past the right end of the window).
///
/// Fails with [`Error::NetTooLarge`] when the net would exceed `cap`.
pub fn epsilon_net(eps: f64, window: (f64, f64), cap: usize) -> Result<Vec<Func01>> {
    let delta = dyadic_spacing(eps)?;
    let required = net_size(eps, window)?;
    if required > cap as u128 {
        return Err(Error::NetTooLarge { required, cap });
    }
    let nodes = node_count(window, delta)?;
    let top = (1.0 / delta) as i64;

    let mut out = Vec::with_capacity(required as usize);
    let mut levels = vec![0i64; nodes];
    // depth-first enumeration in lexicographic order
    fn fill(
        pos: usize,
        levels: &mut Vec<i64>,
        top: i64,
        start: f64,
        delta: f64,
        out: &mut Vec<Func01>,
    ) -> Result<()> {
        if pos == levels.len() {
            let values = levels.iter().map(|&l| l as f64 * delta).collect();
            out.push(Func01::new(start, delta, values)?);
            return Ok(());
        }
        let (lo, hi) = if pos == 0 {
            (0, top)
        } else {
            ((levels[pos - 1] - 1).max(0), (levels[pos - 1] + 1).min(top))
        };
        for l in lo..=hi {
            levels[pos] = l;
            fill(pos + 1, levels, top, start, delta, out)?;
        }
        Ok(())
    }
    fill(0, &mut levels, top, window.0, delta, &mut out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_space::is_in_l;

    #[test]
    fn smallest_net_is_all_admissible_pairs() {
        // eps = 1/4: levels {0, .25, .5, .75, 1}, two nodes
        let net = epsilon_net(0.25, (0.0, 0.25), DEFAULT_NET_CAP).unwrap();
        assert_eq!(net.len(), 5 + 4 + 4);
        assert_eq!(net_size(0.25, (0.0, 0.25)).unwrap(), 13);
        for e in &net {
            assert_eq!(e.len(), 2);
            assert!((e.values()[1] - e.values()[0]).abs() <= 0.25);
        }
    }

    #[test]
    fn elements_are_certified_members() {
        let net = epsilon_net(0.25, (0.0, 1.0), DEFAULT_NET_CAP).unwrap();
        assert_eq!(net.len() as u128, net_size(0.25, (0.0, 1.0)).unwrap());
        assert!(net.iter().all(|e| is_in_l(e, 0.0)));
    }

    #[test]
    fn non_dyadic_eps_rounds_down() {
        let net = epsilon_net(0.3, (0.0, 0.5), DEFAULT_NET_CAP).unwrap();
        assert!(net.iter().all(|e| e.step() == 0.25 && is_in_l(e, 0.0)));
        assert_eq!(net[0].window(), (0.0, 0.5));
    }

    #[test]
    fn cap_reports_required_size() {
        match epsilon_net(0.01, (0.0, 1.0), 1000) {
            Err(Error::NetTooLarge { required, cap }) => {
                assert_eq!(cap, 1000);
                assert!(required > 1000);
            }
            other => panic!("expected NetTooLarge, got {other:?}"),
        }
    }
}
