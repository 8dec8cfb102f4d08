//! Shared numerical kernels: orthonormal Hermite functions, deterministic
//! adaptive quadrature, log-space combinatorics, and truncation planning.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// `ln n!` by direct summation of logarithms.
///
/// Exact enough for the photon-number ranges used here (n up to a few
/// hundred); accumulated rounding is O(n·eps).
pub fn ln_factorial<T: Real>(n: usize) -> T {
    let mut acc = T::zero();
    for i in 2..=n {
        acc += T::of_usize(i).ln();
    }
    acc
}

/// `ln (2m)!!` via the identity `(2m)!! = 2^m m!`.
pub fn ln_double_factorial_even<T: Real>(m: usize) -> T {
    T::of_usize(m) * T::of(2.0).ln() + ln_factorial::<T>(m)
}

/// Orthonormal Hermite function `psi_n(X) = pi^{-1/4} (2^n n!)^{-1/2} H_n(X) e^{-X^2/2}`,
/// evaluated with the stable normalized three-term recurrence.
pub fn hermite_function<T: Real>(n: usize, x: T) -> T {
    let mut prev = T::zero();
    let mut cur = T::of(std::f64::consts::PI.powf(-0.25)) * (-x * x / T::of(2.0)).exp();
    for j in 0..n {
        let jp1 = T::of_usize(j + 1);
        let next = x * (T::of(2.0) / jp1).sqrt() * cur - (T::of_usize(j) / jp1).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// All Hermite functions `psi_0(X) .. psi_{n_max}(X)` in one recurrence pass.
pub fn hermite_functions_upto<T: Real>(n_max: usize, x: T) -> Vec<T> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut prev = T::zero();
    let mut cur = T::of(std::f64::consts::PI.powf(-0.25)) * (-x * x / T::of(2.0)).exp();
    out.push(cur);
    for j in 0..n_max {
        let jp1 = T::of_usize(j + 1);
        let next = x * (T::of(2.0) / jp1).sqrt() * cur - (T::of_usize(j) / jp1).sqrt() * prev;
        prev = cur;
        cur = next;
        out.push(cur);
    }
    out
}

const MAX_DEPTH: usize = 40;
const INITIAL_PANELS: usize = 8;

fn simpson<T: Real, F: Fn(T) -> T>(f: &F, lo: T, hi: T, flo: T, fmid: T, fhi: T) -> T {
    let _ = f;
    (hi - lo) / T::of(6.0) * (flo + T::of(4.0) * fmid + fhi)
}

#[allow(clippy::too_many_arguments)]
fn adapt<T: Real, F: Fn(T) -> T>(
    f: &F,
    lo: T,
    hi: T,
    flo: T,
    fmid: T,
    fhi: T,
    whole: T,
    tol: T,
    depth: usize,
    achieved_err: &mut T,
) -> T {
    let mid = (lo + hi) / T::of(2.0);
    let lm = (lo + mid) / T::of(2.0);
    let rm = (mid + hi) / T::of(2.0);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(f, lo, mid, flo, flm, fmid);
    let right = simpson(f, mid, hi, fmid, frm, fhi);
    let err = (left + right - whole).abs();
    if err <= T::of(15.0) * tol || depth >= MAX_DEPTH {
        if depth >= MAX_DEPTH {
            *achieved_err += err / T::of(15.0);
        }
        left + right + (left + right - whole) / T::of(15.0)
    } else {
        let half_tol = tol / T::of(2.0);
        adapt(f, lo, mid, flo, flm, fmid, left, half_tol, depth + 1, achieved_err)
            + adapt(f, mid, hi, fmid, frm, fhi, right, half_tol, depth + 1, achieved_err)
    }
}

/// Deterministic adaptive Simpson quadrature with absolute-error target `tol`.
///
/// The interval is first split into a fixed number of panels so that narrow
/// features away from the midpoint are still seen; each panel is then bisected
/// recursively in a fixed order.
pub fn integrate<T: Real, F: Fn(T) -> T>(f: F, lo: T, hi: T, tol: T) -> Result<T> {
    if lo > hi {
        return Err(Error::Domain(format!("integrate: lo {lo} > hi {hi}")));
    }
    if lo == hi {
        return Ok(T::zero());
    }
    let n = INITIAL_PANELS;
    let width = (hi - lo) / T::of_usize(n);
    let panel_tol = tol / T::of_usize(n);
    let mut total = T::zero();
    let mut achieved = T::zero();
    for i in 0..n {
        let a = lo + width * T::of_usize(i);
        let b = if i == n - 1 { hi } else { a + width };
        let m = (a + b) / T::of(2.0);
        let (fa, fm, fb) = (f(a), f(m), f(b));
        let whole = simpson(&f, a, b, fa, fm, fb);
        total += adapt(&f, a, b, fa, fm, fb, whole, panel_tol, 0, &mut achieved);
    }
    if achieved > tol {
        return Err(Error::Quadrature {
            estimate: total.to_f64(),
            error: achieved.to_f64(),
        });
    }
    Ok(total)
}

/// Series and grid cutoffs for a given parameter point.
///
/// All infinite sums and integrals in the artifact carry explicit Gaussian or
/// Poissonian envelopes; this policy maps them onto finite computations with
/// tail mass below `tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationPolicy<T> {
    /// Tail-mass target for every truncated sum.
    pub tolerance: T,
    /// Photon-number cutoff for the conditional-state series.
    pub n_max: usize,
    /// Spike-index cutoff for the comb-state nu weights.
    pub m_max: usize,
    /// Momentum half-window beyond which the Gaussian envelope is below tolerance.
    pub p_cut: T,
    /// Position window covering every retained spike plus a guard band.
    pub x_window: (T, T),
    /// Position grid step; resolves the spike width `e^{-r}/sqrt(2)` with >= 14 points.
    pub grid_step: T,
}

/// Tail of the Poisson distribution with mean `lambda` beyond `n`:
/// sum_{j > n} e^{-lambda} lambda^j / j!.
pub fn poisson_tail<T: Real>(lambda: T, n: usize) -> T {
    if lambda <= T::zero() {
        return T::zero();
    }
    let ln_lambda = lambda.ln();
    let mut tail = T::zero();
    let mut j = n + 1;
    let mut ln_term = T::of_usize(j) * ln_lambda - lambda - ln_factorial::<T>(j);
    loop {
        let term = ln_term.exp();
        tail += term;
        // geometric bound once the ratio drops below 1/2
        let ratio = lambda / T::of_usize(j + 1);
        if ratio < T::of(0.5) && term * ratio / (T::one() - ratio) < tail * T::of(1e-16) + T::of(1e-300) {
            break;
        }
        j += 1;
        ln_term += ln_lambda - T::of_usize(j).ln();
        if j > n + 100_000 {
            break;
        }
    }
    tail
}

/// Smallest cutoff with Poisson(`lambda`) tail below `tol`, starting the
/// search at `floor`.
fn poisson_cutoff<T: Real>(lambda: T, tol: T, floor: usize) -> Result<usize> {
    let mut n = floor;
    loop {
        if poisson_tail(lambda, n) < tol {
            return Ok(n);
        }
        n += 1;
        if n > floor + 100_000 {
            return Err(Error::Truncation(format!(
                "Poisson tail for lambda {lambda} did not reach {tol}"
            )));
        }
    }
}

/// Builds the truncation policy for a comb-regime parameter point.
///
/// `n_max` covers the photon-number Poisson envelope (mean `alpha^2`), `m_max`
/// the spike-weight distribution (mean `alpha^2/2`), `p_cut` the momentum
/// Gaussian envelope, and `x_window` every retained spike `sqrt(2)(2m - beta)`
/// plus the guard band `w = 3 + 5 e^{-r}` (in units of the `2m` coordinate).
pub fn truncation_plan<T: Real>(alpha: T, r: T, beta: T, tolerance: T) -> Result<TruncationPolicy<T>> {
    if tolerance <= T::zero() || tolerance > T::of(1e-4) {
        return Err(Error::Domain(format!(
            "truncation tolerance must lie in (0, 1e-4], got {tolerance}"
        )));
    }
    if alpha < T::zero() {
        return Err(Error::Domain(format!("alpha must be >= 0, got {alpha}")));
    }
    let a = alpha.to_f64();
    let n_floor = (a * a + 10.0 * a + 20.0).ceil() as usize;
    let n_max = poisson_cutoff(alpha * alpha, tolerance, n_floor)?;
    let m_max = poisson_cutoff(alpha * alpha / T::of(2.0), tolerance, 1)?;

    let p_cut = r.exp() * (T::of(2.0) * tolerance.recip().ln()).sqrt();

    let sqrt2 = T::of(2.0).sqrt();
    let guard = T::of(3.0) + T::of(5.0) * (-r).exp();
    let lo = sqrt2 * (-beta - guard);
    let hi = sqrt2 * (T::of_usize(2 * m_max) - beta + guard);

    // step divides sqrt(2)/2 so spike lattices and error-region boundaries
    // land on grid points after alignment
    let target = (-r).exp() / T::of(20.0);
    let half_sqrt2 = sqrt2 / T::of(2.0);
    let subdiv = (half_sqrt2 / target).ceil();
    let grid_step = half_sqrt2 / subdiv;

    Ok(TruncationPolicy {
        tolerance,
        n_max,
        m_max,
        p_cut,
        x_window: (lo, hi),
        grid_step,
    })
}
