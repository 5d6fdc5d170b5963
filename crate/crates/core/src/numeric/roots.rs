//! Bracketed scalar root finding: bisection down to a target width, then a
//! few Newton steps to polish the residual.

use super::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum RootError {
    #[error("no sign change on the bracket [{lo}, {hi}] (f(lo) = {f_lo}, f(hi) = {f_hi})")]
    NoBracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
    #[error("function is not finite at {at}")]
    NonFinite { at: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct RootOptions<T> {
    /// Bisection stops once the bracket is narrower than this.
    pub width: T,
    pub max_bisections: usize,
    pub max_newton: usize,
    /// Newton stops early once `|f| <= residual_tol`.
    pub residual_tol: T,
}

impl<T: Scalar> Default for RootOptions<T> {
    fn default() -> Self {
        Self {
            width: T::lit(1e-10),
            max_bisections: 200,
            max_newton: 5,
            residual_tol: T::zero(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root<T> {
    pub x: T,
    /// `|f(x)|` at the returned point.
    pub residual: T,
    pub bisections: usize,
    pub newton_steps: usize,
}

fn as_f64<T: Scalar>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Bisection on `[lo, hi]`, which must bracket a sign change of `f`.
///
/// Returns the final bracket `(lo, hi, f(lo), f(hi), iterations)`.
fn bisect<T: Scalar, F: Fn(T) -> T>(
    f: &F,
    mut lo: T,
    mut hi: T,
    opts: &RootOptions<T>,
) -> Result<(T, T, T, T, usize), RootError> {
    let mut f_lo = f(lo);
    let mut f_hi = f(hi);
    if f_lo.is_nan() {
        return Err(RootError::NonFinite { at: as_f64(lo) });
    }
    if f_hi.is_nan() {
        return Err(RootError::NonFinite { at: as_f64(hi) });
    }
    if f_lo == T::zero() {
        return Ok((lo, lo, f_lo, f_lo, 0));
    }
    if f_hi == T::zero() {
        return Ok((hi, hi, f_hi, f_hi, 0));
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(RootError::NoBracket {
            lo: as_f64(lo),
            hi: as_f64(hi),
            f_lo: as_f64(f_lo),
            f_hi: as_f64(f_hi),
        });
    }
    let two = T::lit(2.0);
    let mut iters = 0;
    while (hi - lo).abs() > opts.width && iters < opts.max_bisections {
        let mid = lo + (hi - lo) / two;
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        iters += 1;
        if f_mid.is_nan() {
            return Err(RootError::NonFinite { at: as_f64(mid) });
        }
        if f_mid == T::zero() {
            return Ok((mid, mid, f_mid, f_mid, iters));
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    Ok((lo, hi, f_lo, f_hi, iters))
}

/// Bisection followed by Newton polishing with the analytic derivative `df`.
///
/// Newton iterates that leave the final bracket or fail to reduce the
/// residual are discarded, so the result never gets worse than the
/// bisection midpoint.
pub fn solve<T: Scalar, F: Fn(T) -> T, D: Fn(T) -> T>(
    f: F,
    df: D,
    lo: T,
    hi: T,
    opts: RootOptions<T>,
) -> Result<Root<T>, RootError> {
    let (a, b, f_a, f_b, bisections) = bisect(&f, lo, hi, &opts)?;
    let (mut x, mut fx) = if a == b {
        (a, f_a)
    } else {
        // linear interpolation inside the final bracket
        let t = f_a / (f_a - f_b);
        let x = a + t * (b - a);
        (x, f(x))
    };
    let (lo_b, hi_b) = if a <= b { (a, b) } else { (b, a) };
    let mut newton_steps = 0;
    for _ in 0..opts.max_newton {
        if fx.abs() <= opts.residual_tol || fx == T::zero() {
            break;
        }
        let d = df(x);
        if d == T::zero() || !d.is_finite() {
            break;
        }
        let next = x - fx / d;
        if !(next >= lo_b - opts.width && next <= hi_b + opts.width) {
            break;
        }
        let f_next = f(next);
        if !(f_next.abs() < fx.abs()) {
            break;
        }
        newton_steps += 1;
        x = next;
        fx = f_next;
    }
    Ok(Root {
        x,
        residual: fx.abs(),
        bisections,
        newton_steps,
    })
}

/// Bisection alone, returning the midpoint of the final bracket.
pub fn bisection<T: Scalar, F: Fn(T) -> T>(
    f: F,
    lo: T,
    hi: T,
    opts: RootOptions<T>,
) -> Result<Root<T>, RootError> {
    let (a, b, _, _, bisections) = bisect(&f, lo, hi, &opts)?;
    let x = a + (b - a) / T::lit(2.0);
    Ok(Root {
        x,
        residual: f(x).abs(),
        bisections,
        newton_steps: 0,
    })
}

/// Finite-difference derivative, for callers without an analytic one.
pub fn central_difference<T: Scalar, F: Fn(T) -> T>(f: &F, x: T) -> T {
    let h = T::epsilon().cbrt() * x.abs().max(T::one());
    (f(x + h) - f(x - h)) / (h + h)
}
