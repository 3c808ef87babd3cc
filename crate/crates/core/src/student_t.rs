//! Standard Student t distribution: tail probability, density and quantile.
//!
//! Tails come from the regularized incomplete beta function,
//! `P(T > t) = I_x(df/2, 1/2) / 2` with `x = df / (df + t^2)`. The log of the
//! beta-function prefactor is assembled with `ln_1p` and a Stirling remainder
//! so that it stays accurate at large degrees of freedom. Beyond
//! `LARGE_DF` the continued fraction loses precision (its argument sits
//! within `1/df` of one) and the tail switches to Fisher's expansion around
//! the normal distribution.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use statrs::function::erf::erfc;
use statrs::function::gamma::ln_gamma;

const LARGE_DF: f64 = 1e5;

const CF_MAX_ITER: usize = 10_000;
const CF_EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;

/// `ln Gamma(z) - [(z - 1/2) ln z - z + ln(2 pi)/2]`, for `z >= 10`.
fn stirling_remainder(z: f64) -> f64 {
    let z2 = z * z;
    (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - 1.0 / (1680.0 * z2)) / z2) / z2) / z
}

/// `ln Gamma(q) - ln Gamma(p + q)` without cancellation for large `q`.
fn ln_gamma_ratio(p: f64, q: f64) -> f64 {
    if q < 10.0 {
        return ln_gamma(q) - ln_gamma(p + q);
    }
    let s = p + q;
    -((q - 0.5) * (p / q).ln_1p() + p * s.ln() - p + stirling_remainder(s) - stirling_remainder(q))
}

pub(crate) fn ln_beta(a: f64, b: f64) -> f64 {
    let (p, q) = if a <= b { (a, b) } else { (b, a) };
    ln_gamma(p) + ln_gamma_ratio(p, q)
}

/// Continued fraction for the incomplete beta function (modified Lentz).
fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < CF_EPS {
            break;
        }
    }
    h
}

/// `I_x(a, b)` given both `x` and `y = 1 - x` and their logs, so callers can
/// supply each without the rounding of `1 - x`.
fn beta_reg_logs(a: f64, b: f64, x: f64, y: f64, ln_x: f64, ln_y: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if y <= 0.0 {
        return 1.0;
    }
    let front = (a * ln_x + b * ln_y - ln_beta(a, b)).exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(a, b, x) / a
    } else {
        1.0 - front * beta_continued_fraction(b, a, y) / b
    }
}

/// `P(T > t) = Q(t) + phi(t) * sum_i g_i(t) / df^i`, three terms.
fn upper_tail_expansion(t: f64, df: f64) -> f64 {
    let t2 = t * t;
    let normal_tail = 0.5 * erfc(t * FRAC_1_SQRT_2);
    let density = (-0.5 * t2).exp() / (2.0 * PI).sqrt();
    let g1 = t * (t2 + 1.0) / 4.0;
    let g2 = t * (((3.0 * t2 - 7.0) * t2 - 5.0) * t2 - 3.0) / 96.0;
    let g3 = t * (((((t2 - 11.0) * t2 + 14.0) * t2 + 6.0) * t2 - 3.0) * t2 - 15.0) / 384.0;
    normal_tail + density * (g1 + (g2 + g3 / df) / df) / df
}

/// `P(T > t)` for `t >= 0`.
fn upper_tail_nonneg(t: f64, df: f64) -> f64 {
    if t == 0.0 {
        return 0.5;
    }
    if t.is_infinite() {
        return 0.0;
    }
    if df >= LARGE_DF {
        return upper_tail_expansion(t, df);
    }
    let r = t * t / df;
    let x = 1.0 / (1.0 + r);
    let y = r / (1.0 + r);
    let ln_x = -r.ln_1p();
    let ln_y = r.ln() - r.ln_1p();
    0.5 * beta_reg_logs(0.5 * df, 0.5, x, y, ln_x, ln_y)
}

/// Survival function `P(T > t)`.
pub fn sf(t: f64, df: f64) -> f64 {
    if t >= 0.0 {
        upper_tail_nonneg(t, df)
    } else {
        1.0 - upper_tail_nonneg(-t, df)
    }
}

pub fn cdf(t: f64, df: f64) -> f64 {
    if t <= 0.0 {
        upper_tail_nonneg(-t, df)
    } else {
        1.0 - upper_tail_nonneg(t, df)
    }
}

pub fn pdf(t: f64, df: f64) -> f64 {
    let ln_norm = -0.5 * df.ln() - ln_beta(0.5 * df, 0.5);
    (ln_norm - 0.5 * (df + 1.0) * (t * t / df).ln_1p()).exp()
}

/// Inverse CDF. `p` must lie in `(0, 1)`.
pub fn quantile(p: f64, df: f64) -> f64 {
    if p == 0.5 {
        return 0.0;
    }
    if p < 0.5 {
        return -quantile(1.0 - p, df);
    }
    // solve sf(q) = 1 - p on q > 0
    let target = 1.0 - p;
    let mut lo = 0.0;
    let mut hi = 1.0;
    while sf(hi, df) > target {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return f64::INFINITY;
        }
    }
    let mut q = 0.5 * (lo + hi);
    for _ in 0..200 {
        let f = sf(q, df) - target;
        if f == 0.0 {
            return q;
        }
        if f > 0.0 {
            lo = q;
        } else {
            hi = q;
        }
        let step = f / pdf(q, df);
        let newton = q + step;
        if step.abs() <= 1e-15 * q {
            return newton;
        }
        q = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= 4.0 * f64::EPSILON * q {
            break;
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Adaptive Simpson integration of the density; independent of the
    /// incomplete beta route.
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, eps: f64, depth: u32) -> f64 {
        #[allow(clippy::too_many_arguments)]
        fn rec(
            f: &dyn Fn(f64) -> f64,
            a: f64,
            b: f64,
            fa: f64,
            fm: f64,
            fb: f64,
            whole: f64,
            eps: f64,
            depth: u32,
        ) -> f64 {
            let m = 0.5 * (a + b);
            let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
            let (flm, frm) = (f(lm), f(rm));
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * eps {
                left + right + (left + right - whole) / 15.0
            } else {
                rec(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1)
                    + rec(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
            }
        }
        let m = 0.5 * (a + b);
        let (fa, fm, fb) = (f(a), f(m), f(b));
        rec(
            f,
            a,
            b,
            fa,
            fm,
            fb,
            (b - a) / 6.0 * (fa + 4.0 * fm + fb),
            eps,
            depth,
        )
    }

    /// Density from its textbook definition via ln_gamma.
    fn density_oracle(df: f64) -> impl Fn(f64) -> f64 {
        let c = (ln_gamma((df + 1.0) / 2.0) - ln_gamma(df / 2.0)).exp() / (df * PI).sqrt();
        move |t: f64| c * (1.0 + t * t / df).powf(-(df + 1.0) / 2.0)
    }

    fn cdf_oracle(t: f64, df: f64) -> f64 {
        let f = density_oracle(df);
        0.5 + simpson(&f, 0.0, t, 1e-13, 40)
    }

    #[test]
    fn cdf_matches_numerical_integration() {
        for df in [1.0, 2.0, 3.0, 4.5, 10.0, 30.0, 200.0] {
            for t in [0.1, 0.5, 1.0, 1.96, 3.0, 6.0] {
                let got = cdf(t, df);
                let want = cdf_oracle(t, df);
                assert!((got - want).abs() < 1e-10, "df={df} t={t}: {got} vs {want}");
                assert!((cdf(-t, df) - (1.0 - want)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn closed_forms() {
        // df = 1: Cauchy
        for t in [0.3f64, 1.0, 5.0] {
            let want = 0.5 + t.atan() / PI;
            assert!((cdf(t, 1.0) - want).abs() < 1e-14);
        }
        // df = 2
        for t in [0.3f64, 1.0, 5.0] {
            let want = 0.5 + t / (2.0 * (t * t + 2.0).sqrt());
            assert!((cdf(t, 2.0) - want).abs() < 1e-14);
        }
    }

    #[test]
    #[allow(clippy::excessive_precision)]
    fn large_df_approaches_normal() {
        // standard normal upper tail at 1.959963984540054 is 0.025
        let z = 1.959963984540054;
        assert!((sf(z, 1e9) - 0.025).abs() < 1e-9);
        assert!((sf(z, 1e12) - 0.025).abs() < 1e-10);
        // 40-digit references for I_x(df/2, 1/2) / 2
        for (t, df, want) in [
            (1.0, 2e4, 0.15866130312395354846),
            (1.96, 2e4, 0.02500482749920271746),
            (1.0, 1e6, 0.15865537491678906464),
            (1.96, 1e6, 0.024998033792634898012),
            (1.0, 1e9, 0.15865525405244241364),
            (1.96, 1e9, 0.024997895286864800217),
        ] {
            assert!((sf(t, df) - want).abs() < 1e-10, "df={df} t={t}");
        }
        // df = 1e6: ratio of integrals of the unnormalized density, which
        // sidesteps the gamma-function constant entirely
        let df = 1e6;
        let kernel = |x: f64| (1.0 + x * x / df).powf(-(df + 1.0) / 2.0);
        let upper = simpson(&kernel, 1.959964, 60.0, 1e-13, 40);
        let half = simpson(&kernel, 0.0, 60.0, 1e-13, 40);
        let want = 0.5 * upper / half;
        assert!((sf(1.959964, 1e6) - want).abs() < 1e-10);
        assert!((2.0 * sf(1.959964, 1e6) - 0.05).abs() < 1e-4);
    }

    #[test]
    fn expansion_agrees_with_beta_route_at_the_switch() {
        for df in [2e4, 5e4, 99_999.0] {
            for t in [0.2, 1.0, 1.96, 3.5, 6.0] {
                let beta_route = {
                    let r: f64 = t * t / df;
                    0.5 * beta_reg_logs(
                        0.5 * df,
                        0.5,
                        1.0 / (1.0 + r),
                        r / (1.0 + r),
                        -r.ln_1p(),
                        r.ln() - r.ln_1p(),
                    )
                };
                let expansion = upper_tail_expansion(t, df);
                assert!(
                    (beta_route - expansion).abs() < 1e-10,
                    "df={df} t={t}: {beta_route} vs {expansion}"
                );
            }
        }
    }

    #[test]
    fn quantile_inverts_cdf() {
        for df in [1.0, 2.0, 5.0, 29.0, 1e3, 1e6, 1e9] {
            for p in [0.5, 0.6, 0.9, 0.975, 0.995, 1e-6] {
                let q = quantile(p, df);
                assert!((cdf(q, df) - p).abs() < 1e-13, "df={df} p={p}");
            }
        }
        assert!((quantile(0.975, 1.0) - 12.706204736174707).abs() < 1e-9);
        assert!((quantile(0.975, 1e9) - 1.959963984540054).abs() < 1e-6);
    }
}
