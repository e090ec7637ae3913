use serde::{Deserialize, Serialize};

use super::{index_of, r_of, smooth_component, PairIndex, QuadConfig};
use crate::error::{Error, Result};
use crate::function_space::{Func01, SeqFunc};

/// A coordinate `(i, j)` and time `t` at which `F(f)` and `F(g)` differ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub pair: PairIndex,
    pub t: f64,
    /// `|F_i^j(f)(t) - F_i^j(g)(t)|`, positive.
    pub gap: f64,
    /// Whether `f_i > g_i` on the run (otherwise `g_i > f_i`).
    pub f_above: bool,
}

/// Smallest `j > i` with `r_j < span`.
fn smallest_level(i: u64, span: f64) -> u64 {
    let mut j = (i + 1).max((1.0 / span).floor() as u64);
    while j > i + 1 && r_of(j - 1) < span {
        j -= 1;
    }
    while r_of(j) >= span {
        j += 1;
    }
    j
}

#[allow(clippy::too_many_arguments)]
fn try_run(
    fi: &Func01,
    gi: &Func01,
    i: u64,
    first: usize,
    last: usize,
    f_above: bool,
    max_k: u64,
) -> Result<Option<Witness>> {
    let h = fi.step();
    // the averaging interval [t, t + r_j] must sit strictly inside (t_first, t_last)
    let span = (last - first - 1) as f64 * h;
    let j = smallest_level(i, span);
    let pair = PairIndex::new(i, j)?;
    if index_of(pair) > max_k {
        return Ok(None);
    }
    let quad = QuadConfig::default();
    let len = last - first + 1;
    let a = smooth_component(&fi.slice(first, len)?, pair.r(), &quad)?;
    let b = smooth_component(&gi.slice(first, len)?, pair.r(), &quad)?;
    let diff = a.values()[1] - b.values()[1];
    let gap = if f_above { diff } else { -diff };
    Ok((gap > 0.0).then(|| Witness {
        pair,
        t: fi.time(first + 1),
        gap,
        f_above,
    }))
}

/// Finds a coordinate of `F` separating `f` and `g`.
///
/// Components are scanned in increasing `i`; within a component, the first
/// run of at least two grid cells on which `|f_i - g_i| > tol` with constant
/// sign yields the smallest `j > i` whose averaging interval fits strictly
/// inside the run. Returns `None` when no such run exists, which does not
/// prove `f = g`.
pub fn separation_witness(f: &SeqFunc, g: &SeqFunc, tol: f64) -> Result<Option<Witness>> {
    separation_witness_within(f, g, tol, u64::MAX)
}

/// [`separation_witness`] restricted to the first `depth_k` coordinates of
/// `F`: runs too short to fit some `r_j` with `index_of((i, j)) ≤ depth_k`
/// are skipped.
pub fn separation_witness_within(
    f: &SeqFunc,
    g: &SeqFunc,
    tol: f64,
    depth_k: u64,
) -> Result<Option<Witness>> {
    if f.depth() != g.depth() {
        return Err(Error::DepthMismatch {
            expected: f.depth(),
            found: g.depth(),
        });
    }
    for (idx, (fi, gi)) in f.components().iter().zip(g.components()).enumerate() {
        if fi.grid_offset(gi)? != 0 || fi.len() != gi.len() {
            return Err(Error::GridMismatch("witness needs identical grids".into()));
        }
        let i = idx as u64 + 1;
        let sign_at = |k: usize| {
            let d = fi.values()[k] - gi.values()[k];
            if d > tol {
                1
            } else if d < -tol {
                -1
            } else {
                0
            }
        };
        let mut k = 0;
        while k < fi.len() {
            let s = sign_at(k);
            if s == 0 {
                k += 1;
                continue;
            }
            let first = k;
            while k + 1 < fi.len() && sign_at(k + 1) == s {
                k += 1;
            }
            let last = k;
            if last - first >= 2 {
                if let Some(w) = try_run(fi, gi, i, first, last, s > 0, depth_k)? {
                    return Ok(Some(w));
                }
            }
            k += 1;
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(c: Vec<Func01>) -> SeqFunc {
        SeqFunc::new(c).unwrap()
    }

    #[test]
    fn equal_inputs_have_no_witness() {
        let f = seq(vec![
            Func01::sample((0.0, 2.0), 0.01, |t| 0.5 + 0.3 * t.sin()).unwrap()
        ]);
        assert_eq!(separation_witness(&f, &f, 1e-12).unwrap(), None);
    }

    #[test]
    fn constant_gap() {
        let f = seq(vec![Func01::constant((0.0, 2.0), 0.01, 0.6).unwrap()]);
        let g = seq(vec![Func01::constant((0.0, 2.0), 0.01, 0.4).unwrap()]);
        let w = separation_witness(&f, &g, 1e-9).unwrap().unwrap();
        assert_eq!(w.pair, PairIndex::new(1, 2).unwrap());
        assert!(w.f_above);
        assert!((w.gap - 0.2 / 3.0).abs() < 1e-14);
        let w = separation_witness(&g, &f, 1e-9).unwrap().unwrap();
        assert!(!w.f_above);
        assert!((w.gap - 1.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn short_runs_need_higher_levels() {
        // f exceeds g only on [1, 1.05]: five cells of width 0.01
        let g = Func01::constant((0.0, 2.0), 0.01, 0.5).unwrap();
        let f = Func01::sample((0.0, 2.0), 0.01, |t| {
            if (1.0 - 1e-9..=1.05 + 1e-9).contains(&t) {
                0.52
            } else {
                0.5
            }
        })
        .unwrap();
        let w = separation_witness(&seq(vec![f]), &seq(vec![g]), 1e-3)
            .unwrap()
            .unwrap();
        // needs 1/(j+1) < 0.04
        assert_eq!(w.pair.j(), 25);
        assert!(w.gap > 0.0);
        assert!((w.t - 1.01).abs() < 1e-12);
    }

    #[test]
    fn isolated_differences_are_not_witnessed() {
        let g = Func01::constant((0.0, 1.0), 0.1, 0.5).unwrap();
        let f = Func01::sample(
            (0.0, 1.0),
            0.1,
            |t| if (t - 0.5).abs() < 1e-9 { 0.55 } else { 0.5 },
        )
        .unwrap();
        assert_eq!(
            separation_witness(&seq(vec![f]), &seq(vec![g]), 1e-6).unwrap(),
            None
        );
    }

    #[test]
    fn later_components_are_searched() {
        let a = Func01::constant((0.0, 2.0), 0.05, 0.5).unwrap();
        let b = Func01::constant((0.0, 2.0), 0.05, 0.9).unwrap();
        let w = separation_witness(&seq(vec![a.clone(), a.clone()]), &seq(vec![a, b]), 1e-9)
            .unwrap()
            .unwrap();
        assert_eq!(w.pair, PairIndex::new(2, 3).unwrap());
        assert!((w.gap - 0.4 * 0.25).abs() < 1e-14);
    }

    #[test]
    fn depth_bound_skips_short_runs() {
        // a short run near the left edge, a long one later
        let g = Func01::constant((0.0, 3.0), 0.01, 0.5).unwrap();
        let f = Func01::sample((0.0, 3.0), 0.01, |t| {
            if !(0.05 + 1e-9..=1.5).contains(&t) {
                0.6
            } else {
                0.5
            }
        })
        .unwrap();
        let (f, g) = (seq(vec![f]), seq(vec![g]));
        assert!(separation_witness(&f, &g, 1e-6).unwrap().unwrap().pair.j() > 6);
        let w = separation_witness_within(&f, &g, 1e-6, 21).unwrap().unwrap();
        assert_eq!(w.pair, PairIndex::new(1, 2).unwrap());
        assert!(w.t > 1.5);
        assert!(separation_witness_within(&f, &g, 1e-6, 1).unwrap().is_none());
        assert!(separation_witness_within(
            &seq(vec![f.components()[0].slice(0, 10).unwrap()]),
            &seq(vec![g.components()[0].slice(0, 10).unwrap()]),
            1e-6,
            21
        )
        .unwrap()
        .is_none());
    }

    #[test]
    fn level_search() {
        assert_eq!(smallest_level(1, 2.0), 2);
        assert_eq!(smallest_level(1, 0.04), 25);
        assert_eq!(smallest_level(3, 0.3), 4);
        assert_eq!(smallest_level(1, 0.25), 4);
    }
}
