use crate::error::{Error, Result};
use crate::reduce::EffectiveSystem;

/// Root of the effective equation with its stability.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FixedPoint {
    pub x_star: f64,
    /// `dO/dx` at `x_star`, one-sided at the domain boundary.
    pub derivative: f64,
    pub stable: bool,
    /// `|O(x_star)|`.
    pub residual: f64,
}

const BISECT_WIDTH: f64 = 1e-12;
const DEDUP: f64 = 1e-9;

fn eval_finite(sys: &EffectiveSystem, x: f64) -> Result<f64> {
    let v = sys.eval(x)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Evaluation(format!("O({x}) = {v}")))
    }
}

/// Scan `O` on `grid + 1` equally spaced points of `[lo, hi]`, bisect every
/// sign change, and classify each root by the sign of a finite-difference
/// derivative. Roots are returned in ascending order.
pub fn find_fixed_points(
    sys: &EffectiveSystem,
    (lo, hi): (f64, f64),
    grid: usize,
) -> Result<Vec<FixedPoint>> {
    if grid < 16 {
        return Err(Error::InvalidParameter(format!(
            "root scan needs at least 16 intervals, got {grid}"
        )));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidParameter(format!(
            "invalid root domain [{lo}, {hi}]"
        )));
    }

    let xs: Vec<f64> = (0..=grid)
        .map(|k| {
            if k == grid {
                hi
            } else {
                lo + (hi - lo) * k as f64 / grid as f64
            }
        })
        .collect();
    let ys = xs
        .iter()
        .map(|&x| eval_finite(sys, x))
        .collect::<Result<Vec<_>>>()?;

    let mut roots = Vec::new();
    for k in 0..=grid {
        if ys[k] == 0.0 {
            roots.push(xs[k]);
        }
        if k < grid && ys[k] * ys[k + 1] < 0.0 {
            roots.push(bisect(sys, xs[k], xs[k + 1], ys[k])?);
        }
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|b, a| (*b - *a).abs() < DEDUP);

    roots
        .into_iter()
        .map(|x| {
            let derivative = derivative(sys, x, lo, hi)?;
            Ok(FixedPoint {
                x_star: x,
                derivative,
                stable: derivative < 0.0,
                residual: eval_finite(sys, x)?.abs(),
            })
        })
        .collect()
}

fn bisect(sys: &EffectiveSystem, mut a: f64, mut b: f64, mut fa: f64) -> Result<f64> {
    let mut fb = eval_finite(sys, b)?;
    while b - a >= BISECT_WIDTH {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = eval_finite(sys, mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fa * fm < 0.0 {
            b = mid;
            fb = fm;
        } else {
            a = mid;
            fa = fm;
        }
    }
    Ok(if fa.abs() <= fb.abs() { a } else { b })
}

fn derivative(sys: &EffectiveSystem, x: f64, lo: f64, hi: f64) -> Result<f64> {
    let h = 1e-6 * x.abs().max(1.0);
    if x - h < lo {
        Ok((eval_finite(sys, x + h)? - eval_finite(sys, x)?) / h)
    } else if x + h > hi {
        Ok((eval_finite(sys, x)? - eval_finite(sys, x - h)?) / h)
    } else {
        Ok((eval_finite(sys, x + h)? - eval_finite(sys, x - h)?) / (2.0 * h))
    }
}

/// Relative deviation `|x_num - x_ana| / |x_num|`, with the denominator
/// floored at `1e-12`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReductionError {
    pub value: f64,
    /// Set when `|x_num|` fell below the floor.
    pub degenerate: bool,
}

pub const ERR_FLOOR: f64 = 1e-12;

pub fn reduction_error(x_num: f64, x_ana: f64) -> ReductionError {
    let degenerate = x_num.abs() < ERR_FLOOR;
    ReductionError {
        value: (x_num - x_ana).abs() / x_num.abs().max(ERR_FLOOR),
        degenerate,
    }
}

/// The fixed point a numerical steady state is compared against.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchMatch {
    pub point: FixedPoint,
    /// True when no stable root existed and the nearest root was used.
    pub unstable_fallback: bool,
}

/// Nearest stable fixed point to `x_num`, or the nearest of any kind.
pub fn match_branch(x_num: f64, fps: &[FixedPoint]) -> Result<BranchMatch> {
    let nearest = |it: &mut dyn Iterator<Item = &FixedPoint>| {
        it.min_by(|a, b| {
            (a.x_star - x_num)
                .abs()
                .total_cmp(&(b.x_star - x_num).abs())
        })
        .copied()
    };
    if let Some(point) = nearest(&mut fps.iter().filter(|f| f.stable)) {
        return Ok(BranchMatch {
            point,
            unstable_fallback: false,
        });
    }
    nearest(&mut fps.iter())
        .map(|point| BranchMatch {
            point,
            unstable_fallback: true,
        })
        .ok_or(Error::NoRoots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::ModelKind;
    use crate::reduce::{build_effective_system, EffectiveParams, ReductionMode};

    fn sys(kind: ModelKind, e: f64, a: f64, p: f64) -> EffectiveSystem {
        build_effective_system(
            EffectiveParams {
                e_eff: e,
                a_eff: a,
                p,
                kind: Some(kind),
            },
            ReductionMode::Paper,
            None,
        )
        .unwrap()
    }

    fn fp(x: f64, stable: bool) -> FixedPoint {
        FixedPoint {
            x_star: x,
            derivative: if stable { -1.0 } else { 1.0 },
            stable,
            residual: 0.0,
        }
    }

    #[test]
    fn sis_p1_roots() {
        // O = -x + 2(1-x)x, O' = 1 - 4x
        let r = find_fixed_points(&sys(ModelKind::Sis, 1.0, 2.0, 1.0), (0.0, 1.0), 64).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r[0].x_star, 0.0);
        assert!(!r[0].stable && (r[0].derivative - 1.0).abs() < 1e-5);
        assert!((r[1].x_star - 0.5).abs() < 1e-11);
        assert!(r[1].stable && (r[1].derivative + 1.0).abs() < 1e-6);
    }

    #[test]
    fn sis_half_power_root() {
        // 2(1-x)sqrt(x) = x  <=>  sqrt(x) = (-1 + sqrt(17)) / 4
        let want = ((17f64.sqrt() - 1.0) / 4.0).powi(2);
        let r = find_fixed_points(&sys(ModelKind::Sis, 1.0, 2.0, 0.5), (0.0, 1.0), 128).unwrap();
        let stable: Vec<_> = r.iter().filter(|f| f.stable).collect();
        assert_eq!(stable.len(), 1);
        assert!((stable[0].x_star - want).abs() < 1e-11);
        assert!((stable[0].x_star - 0.610).abs() < 1e-3);
        // x = 0 is a root with infinite slope from the right
        assert_eq!(r[0].x_star, 0.0);
        assert!(!r[0].stable);
    }

    #[test]
    fn mm_p1_roots() {
        // O = -x + 2x/(1+x), O'(1) = -1 + 2/4
        let r = find_fixed_points(&sys(ModelKind::Mm, 1.0, 2.0, 1.0), (0.0, 10.0), 100).unwrap();
        assert_eq!(r.len(), 2);
        assert!(!r[0].stable);
        assert!((r[1].x_star - 1.0).abs() < 1e-11);
        assert!((r[1].derivative + 0.5).abs() < 1e-6);
    }

    #[test]
    fn residuals_are_small() {
        for p in [0.1, 0.25, 0.5, 0.75, 0.9] {
            for r in
                find_fixed_points(&sys(ModelKind::Sis, 100.0, 150.0, p), (0.0, 1.0), 1024).unwrap()
            {
                assert!(r.residual <= 1e-10, "{r:?}");
            }
        }
    }

    #[test]
    fn coarse_grid_rejected() {
        assert!(find_fixed_points(&sys(ModelKind::Sis, 1.0, 2.0, 1.0), (0.0, 1.0), 8).is_err());
    }

    #[test]
    fn error_metric() {
        assert!((reduction_error(0.9, 0.99).value - 0.1).abs() < 1e-15);
        assert_eq!(reduction_error(0.4, 0.4).value, 0.0);
        let d = reduction_error(0.0, 0.3);
        assert!(d.degenerate);
        assert!((d.value - 0.3e12).abs() < 1.0);
    }

    #[test]
    fn branch_selection() {
        let m = match_branch(0.48, &[fp(0.0, false), fp(0.5, true)]).unwrap();
        assert_eq!(m.point.x_star, 0.5);
        let m = match_branch(0.1, &[fp(0.05, true), fp(0.9, true)]).unwrap();
        assert_eq!(m.point.x_star, 0.05);
        let m = match_branch(0.7, &[fp(0.0, false), fp(0.6, false)]).unwrap();
        assert!(m.unstable_fallback);
        assert_eq!(m.point.x_star, 0.6);
        assert!(matches!(match_branch(0.1, &[]), Err(Error::NoRoots)));
    }
}
