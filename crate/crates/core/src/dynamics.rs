//! Post-homodyne conditional ion wavefunction for arbitrary measurement
//! outcome X and scaled time tau, the homodyne-outcome probability density,
//! and windowed acceptance probabilities.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::numerics::{hermite_functions_upto, integrate, ln_factorial, TruncationPolicy};
use crate::scalar::{cr, Real, C};
use crate::wavefunction::{Axis, Wavefunction};

/// Dimensionless knobs of the encoding scheme.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct EncodingParams<T> {
    /// Cavity coherent-state amplitude (real, >= 0).
    pub alpha: T,
    /// Initial ion displacement.
    pub beta: T,
    /// Squeeze magnitude (>= 0).
    pub r: T,
    /// Squeeze phase in radians; the comb regime uses 0.
    pub phi: T,
    /// Coupling ratio g / omega_a.
    pub k: T,
    /// Scaled interaction time omega_a * t.
    pub tau: T,
}

impl<T: Real> EncodingParams<T> {
    /// Comb-regime constructor: k = 1/2, tau = pi, phi = 0.
    pub fn comb(alpha: T, beta: T, r: T) -> Self {
        EncodingParams {
            alpha,
            beta,
            r,
            phi: T::zero(),
            k: T::of(0.5),
            tau: T::PI(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha < T::zero() {
            return Err(Error::Domain(format!("alpha must be >= 0, got {}", self.alpha)));
        }
        if self.r < T::zero() {
            return Err(Error::Domain(format!("r must be >= 0, got {}", self.r)));
        }
        if self.k <= T::zero() {
            return Err(Error::Domain(format!("k must be > 0, got {}", self.k)));
        }
        if self.tau < T::zero() {
            return Err(Error::Domain(format!("tau must be >= 0, got {}", self.tau)));
        }
        Ok(())
    }

    /// Gamma = e^{2 i phi} tanh r.
    pub fn gamma(&self) -> C<T> {
        let phase = T::of(2.0) * self.phi;
        Complex::new(phase.cos(), phase.sin()) * cr(self.r.tanh())
    }

    /// The comb regime (k = 1/2, tau = pi, phi = 0, alpha, beta >= 0) is where
    /// the conditional state at X = 0 becomes the closed-form comb state.
    pub fn is_comb_regime(&self) -> bool {
        let eps = T::of(1e-12);
        (self.k - T::of(0.5)).abs() < eps
            && (self.tau - T::PI()).abs() < eps
            && self.phi.abs() < eps
            && self.alpha >= T::zero()
            && self.beta >= T::zero()
    }

    pub fn require_comb_regime(&self) -> Result<()> {
        if self.is_comb_regime() {
            Ok(())
        } else {
            Err(Error::Domain(
                "operation requires the comb regime (k = 1/2, tau = pi, phi = 0, alpha, beta >= 0)"
                    .into(),
            ))
        }
    }
}

/// zeta_n = n k (e^{i tau} - 1).
pub fn zeta_n<T: Real>(n: usize, k: T, tau: T) -> C<T> {
    let e = Complex::new(tau.cos(), tau.sin());
    (e - Complex::new(T::one(), T::zero())) * cr(k * T::of_usize(n))
}

/// Coefficients of the conditional-state photon-number series.
///
/// `log_b[n]` holds log B_n; the real part may be -inf (exact zero weight,
/// e.g. alpha = 0, n >= 1). Magnitudes are never formed outside log space.
#[derive(Debug, Clone)]
pub struct ConditionalCoefficients<T> {
    /// Global prefactor A = (cosh r)^{-1/2} e^{-(Gamma beta^2 + alpha^2)/2}.
    pub a: C<T>,
    /// log B_n for n = 0..=n_max.
    pub log_b: Vec<C<T>>,
    /// zeta_n for n = 0..=n_max.
    pub zeta: Vec<C<T>>,
    pub n_max: usize,
}

/// Evaluates A and log B_n up to the policy's photon-number cutoff.
pub fn conditional_coefficients<T: Real>(
    params: &EncodingParams<T>,
    trunc: &TruncationPolicy<T>,
) -> Result<ConditionalCoefficients<T>> {
    params.validate()?;
    let gamma = params.gamma();
    let beta = cr(params.beta);
    let a = cr(params.r.cosh().sqrt().recip())
        * (-(gamma * beta * beta + cr(params.alpha * params.alpha)) / cr(T::of(2.0))).exp();

    let ln_alpha = if params.alpha > T::zero() {
        params.alpha.ln()
    } else {
        T::neg_infinity()
    };
    let kerr = params.k * params.k * (params.tau - params.tau.sin());

    let n_max = trunc.n_max;
    let mut log_b = Vec::with_capacity(n_max + 1);
    let mut zeta = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let z = zeta_n(n, params.k, params.tau);
        let nf = T::of_usize(n);
        let ln_mag = if n == 0 { T::zero() } else { nf * ln_alpha };
        let bz = beta + z;
        let l = Complex::new(ln_mag - ln_factorial::<T>(n) / T::of(2.0), kerr * nf * nf)
            - gamma * z.conj() * (beta + z.conj() / cr(T::of(2.0)))
            - cr(bz.norm_sqr() / T::of(2.0));
        log_b.push(l);
        zeta.push(z);
    }
    Ok(ConditionalCoefficients { a, log_b, zeta, n_max })
}

/// The x-quadratic coefficients of the conditional state:
/// D_n(x) = quad * x^2 + lin[n] * x + cst[n], plus the n-independent prefactor.
struct SeriesForm<T> {
    prefactor: C<T>,
    quad: C<T>,
    lin: Vec<C<T>>,
    cst: Vec<C<T>>,
    log_b: Vec<C<T>>,
}

fn series_form<T: Real>(
    params: &EncodingParams<T>,
    trunc: &TruncationPolicy<T>,
) -> Result<SeriesForm<T>> {
    let coeffs = conditional_coefficients(params, trunc)?;
    let gamma = params.gamma();
    let tau = params.tau;
    let e_itau = Complex::new(tau.cos(), tau.sin());
    let e_2itau = Complex::new((T::of(2.0) * tau).cos(), (T::of(2.0) * tau).sin());
    let den = gamma - e_2itau;
    if den.norm() < T::of(1e-12) {
        return Err(Error::Domain(
            "singular prefactor: 1 - Gamma e^{-2 i tau} = 0".into(),
        ));
    }
    let inv = den.inv();
    let quad = inv * (gamma + e_2itau) / cr(T::of(2.0));
    if quad.re >= T::zero() {
        return Err(Error::Domain(
            "conditional state is not normalizable at these parameters".into(),
        ));
    }
    // prefactor A / (pi^{1/4} sqrt(1 - Gamma e^{-2 i tau}))
    let e_m2itau = e_2itau.conj();
    let root = (Complex::new(T::one(), T::zero()) - gamma * e_m2itau).sqrt();
    let prefactor = coeffs.a / (cr(T::of(std::f64::consts::PI.powf(0.25))) * root);

    let beta = cr(params.beta);
    let sqrt2 = T::of(2.0).sqrt();
    let mut lin = Vec::with_capacity(coeffs.n_max + 1);
    let mut cst = Vec::with_capacity(coeffs.n_max + 1);
    for z in &coeffs.zeta {
        let s = gamma * (beta + z.conj()) + beta + *z;
        lin.push(-inv * e_itau * s * cr(sqrt2));
        cst.push(inv * s * s / cr(T::of(2.0)));
    }
    Ok(SeriesForm {
        prefactor,
        quad,
        lin,
        cst,
        log_b: coeffs.log_b,
    })
}

/// Position window containing the full support of the series, from the
/// per-n Gaussian centers and the common width.
fn support_window<T: Real>(form: &SeriesForm<T>, trunc: &TruncationPolicy<T>) -> (T, T) {
    let sigma = ((-T::of(2.0) * form.quad.re).recip()).sqrt();
    let guard = sigma * ((T::of(2.0) * trunc.tolerance.recip().ln()).sqrt() + T::of(3.0));
    let max_log = form
        .log_b
        .iter()
        .map(|l| l.re)
        .fold(T::neg_infinity(), T::max);
    let keep = max_log + T::of(1e-18).ln();
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for (n, l) in form.log_b.iter().enumerate() {
        if l.re < keep {
            continue;
        }
        let center = -form.lin[n].re / (T::of(2.0) * form.quad.re);
        lo = lo.min(center - guard);
        hi = hi.max(center + guard);
    }
    (lo.min(trunc.x_window.0), hi.max(trunc.x_window.1))
}

fn evaluate_series<T: Real>(form: &SeriesForm<T>, hermite: &[T], x: T) -> C<T> {
    let mut acc = Complex::new(T::zero(), T::zero());
    for n in 0..form.log_b.len() {
        let h = hermite[n];
        if h == T::zero() {
            continue;
        }
        let exponent = form.log_b[n] + form.quad * cr(x * x) + form.lin[n] * cr(x) + form.cst[n];
        acc += cr(h) * exponent.exp();
    }
    form.prefactor * acc
}

/// Conditional position-space wavefunction after a homodyne outcome `X`
/// at scaled time tau (any parameters with a nonsingular prefactor).
///
/// With `normalized = false` the raw projected amplitude is returned, whose
/// squared norm is the homodyne outcome density.
pub fn conditional_wavefunction<T: Real>(
    params: &EncodingParams<T>,
    x_outcome: T,
    trunc: &TruncationPolicy<T>,
    normalized: bool,
) -> Result<Wavefunction<T>> {
    let form = series_form(params, trunc)?;
    let hermite = hermite_functions_upto(form.log_b.len() - 1, x_outcome);
    let (lo, hi) = support_window(&form, trunc);
    let anchor = -params.beta * T::of(2.0).sqrt();
    let mut wf = Wavefunction::sample(Axis::Position, lo, hi, trunc.grid_step, anchor, |x| {
        evaluate_series(&form, &hermite, x)
    });
    if normalized {
        wf.normalize()?;
    }
    Ok(wf)
}

/// Homodyne outcome density P(X) = int |Phi_unnorm(x)|^2 dx, evaluated in
/// closed form (each cross term is a Gaussian integral).
pub fn homodyne_density<T: Real>(
    params: &EncodingParams<T>,
    x_outcome: T,
    trunc: &TruncationPolicy<T>,
) -> Result<T> {
    let form = series_form(params, trunc)?;
    let hermite = hermite_functions_upto(form.log_b.len() - 1, x_outcome);
    let a2 = T::of(2.0) * form.quad.re; // < 0
    let gauss = (T::PI() / -a2).sqrt();
    let n_terms = form.log_b.len();
    let mut acc = T::zero();
    for n in 0..n_terms {
        if hermite[n] == T::zero() {
            continue;
        }
        for np in 0..=n {
            if hermite[np] == T::zero() {
                continue;
            }
            let b = form.lin[n] + form.lin[np].conj();
            let e = form.log_b[n] + form.log_b[np].conj() + form.cst[n] + form.cst[np].conj()
                + b * b / cr(-T::of(4.0) * a2);
            let term = (cr(hermite[n] * hermite[np]) * e.exp()).re;
            acc += if np == n { term } else { T::of(2.0) * term };
        }
    }
    let density = form.prefactor.norm_sqr() * gauss * acc;
    Ok(density.max(T::zero()))
}

/// Acceptance probability of the homodyne window `[x_lo, x_hi]` together with
/// the acceptance-weighted mean of the maximum intrinsic error probability of
/// the conditional states in the window.
pub fn window_acceptance<T: Real>(
    params: &EncodingParams<T>,
    x_lo: T,
    x_hi: T,
    trunc: &TruncationPolicy<T>,
) -> Result<(T, T)> {
    if x_lo >= x_hi {
        return Err(Error::Domain(format!(
            "window requires X_lo < X_hi, got [{x_lo}, {x_hi}]"
        )));
    }
    let probability = integrate(
        |x| homodyne_density(params, x, trunc).unwrap_or(T::zero()),
        x_lo,
        x_hi,
        T::of(1e-9),
    )?;

    // Simpson nodes across the window; p_max is evaluated on the actual
    // conditional state at each node.
    let width = (x_hi - x_lo).to_f64();
    let mut panels = ((width / 0.25).ceil() as usize).clamp(4, 16);
    if panels % 2 == 1 {
        panels += 1;
    }
    let h = (x_hi - x_lo) / T::of_usize(panels);
    let mut weighted = T::zero();
    let mut mass = T::zero();
    for i in 0..=panels {
        let x = x_lo + h * T::of_usize(i);
        let w = if i == 0 || i == panels {
            T::one()
        } else if i % 2 == 1 {
            T::of(4.0)
        } else {
            T::of(2.0)
        };
        let density = homodyne_density(params, x, trunc)?;
        if density <= T::of(1e-300) {
            continue;
        }
        let state = conditional_wavefunction(params, x, trunc, true)?;
        let p_max = crate::error_analysis::p_max_for_state(&state, params, trunc)?;
        weighted += w * density * p_max;
        mass += w * density;
    }
    let mean_error_bound = if mass > T::zero() { weighted / mass } else { T::zero() };
    Ok((probability, mean_error_bound))
}
