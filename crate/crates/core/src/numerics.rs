//! Scalar numerical building blocks: bracketing and golden-section
//! minimization, bisection, central differences and the classical
//! orthogonal-polynomial recurrences.
//!
//! Every extremum in the bound computations is reduced to a one-dimensional
//! minimization. Searches over strictly positive variables (contact points,
//! kinetic energies, radii, trial scales) run in the logarithm of the variable,
//! so the tolerances of [`LogSearch`] are relative.

use crate::error::{Error, Result};

/// Golden-section interior fraction, `2 - phi`.
const GOLDEN_FRACTION: f64 = 0.381_966_011_250_105_1;
/// Expansion factor used while bracketing, `phi`.
const GOLDEN_GROWTH: f64 = 1.618_033_988_749_895;

/// Default half-width of the bracket expansion in the search variable.
pub const DEFAULT_MAX_SPAN: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs_x: f64,
    pub abs_f: f64,
    pub max_iter: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs_x: 1e-10,
            abs_f: 1e-12,
            max_iter: 200,
        }
    }
}

impl Tolerance {
    pub fn new(abs_x: f64, abs_f: f64, max_iter: usize) -> Result<Self> {
        if !(abs_x > 0.0 && abs_x.is_finite()) {
            return Err(Error::InvalidTolerance("abs_x must be positive"));
        }
        if !(abs_f > 0.0 && abs_f.is_finite()) {
            return Err(Error::InvalidTolerance("abs_f must be positive"));
        }
        if max_iter == 0 {
            return Err(Error::InvalidTolerance("max_iter must be at least 1"));
        }
        Ok(Self {
            abs_x,
            abs_f,
            max_iter,
        })
    }

    /// Same tolerance with `abs_x` scaled by `factor`.
    pub fn loosened(self, factor: f64) -> Self {
        Self {
            abs_x: self.abs_x * factor,
            ..self
        }
    }
}

/// Three abscissae `lo < mid < hi` with the objective lower at `mid` than at
/// either end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub mid: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn new(lo: f64, mid: f64, hi: f64) -> Result<Self> {
        if !(lo < mid && mid < hi) {
            return Err(Error::BracketInvalid {
                lo,
                mid,
                hi,
                reason: "points are not strictly ordered",
            });
        }
        Ok(Self { lo, mid, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Location and value of a one-dimensional minimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub f: f64,
    pub iterations: usize,
}

fn nan_as_infinite(y: f64) -> f64 {
    if y.is_nan() {
        f64::INFINITY
    } else {
        y
    }
}

/// Golden-section search inside a valid bracket.
///
/// NaN values inside the bracket are treated as `+inf`, which lets callers
/// mark vacuous parameter regions without aborting the search.
pub fn minimize_scalar<F>(objective: F, bracket: Bracket, tol: Tolerance) -> Result<Minimum>
where
    F: Fn(f64) -> f64,
{
    let Bracket { lo, mid, hi } = bracket;
    if !(lo < mid && mid < hi) {
        return Err(Error::BracketInvalid {
            lo,
            mid,
            hi,
            reason: "points are not strictly ordered",
        });
    }
    let (mut a, mut b, mut c) = (lo, mid, hi);
    let fa = nan_as_infinite(objective(a));
    let mut fb = nan_as_infinite(objective(b));
    let fc = nan_as_infinite(objective(c));
    if !(fb < fa && fb < fc) {
        return Err(Error::BracketInvalid {
            lo,
            mid,
            hi,
            reason: "objective at mid is not below both ends",
        });
    }

    for iteration in 0..tol.max_iter {
        let tol_x = tol.abs_x.max(4.0 * f64::EPSILON * b.abs());
        if c - a <= tol_x {
            return Ok(Minimum {
                x: b,
                f: fb,
                iterations: iteration,
            });
        }
        let x = if c - b > b - a {
            b + GOLDEN_FRACTION * (c - b)
        } else {
            b - GOLDEN_FRACTION * (b - a)
        };
        let fx = nan_as_infinite(objective(x));
        if fx < fb {
            if x > b {
                a = b;
            } else {
                c = b;
            }
            b = x;
            fb = fx;
        } else if x > b {
            c = x;
        } else {
            a = x;
        }
    }
    let tol_x = tol.abs_x.max(4.0 * f64::EPSILON * b.abs());
    if c - a <= tol_x {
        return Ok(Minimum {
            x: b,
            f: fb,
            iterations: tol.max_iter,
        });
    }
    Err(Error::NoConvergence {
        iterations: tol.max_iter,
        width: c - a,
    })
}

/// Downhill expansion from `x0` until the objective turns up.
///
/// Fails with [`Error::NoBracketFound`] when the expansion leaves
/// `x0 ± DEFAULT_MAX_SPAN`, meets a non-finite value below the current best,
/// or cannot find a strict descent direction.
pub fn bracket_minimum<F>(objective: F, x0: f64, step: f64) -> Result<Bracket>
where
    F: Fn(f64) -> f64,
{
    bracket_minimum_within(
        objective,
        x0,
        step,
        x0 - DEFAULT_MAX_SPAN,
        x0 + DEFAULT_MAX_SPAN,
    )
}

/// [`bracket_minimum`] restricted to the window `[limit_lo, limit_hi]`.
pub fn bracket_minimum_within<F>(
    objective: F,
    x0: f64,
    step: f64,
    limit_lo: f64,
    limit_hi: f64,
) -> Result<Bracket>
where
    F: Fn(f64) -> f64,
{
    let fail = Error::NoBracketFound { start: x0 };
    if !(step != 0.0 && step.is_finite()) {
        return Err(fail);
    }
    let mut a = x0;
    let mut fa = objective(a);
    let mut b = x0 + step;
    let mut fb = objective(b);
    if fa.is_nan() || fb.is_nan() {
        return Err(fail);
    }
    if fb > fa {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut c = b + GOLDEN_GROWTH * (b - a);
    let mut fc = objective(c);
    while !(fc > fb) {
        if fc.is_nan() || fc == f64::NEG_INFINITY || c < limit_lo || c > limit_hi {
            return Err(fail);
        }
        a = b;
        fa = fb;
        b = c;
        fb = fc;
        c = b + GOLDEN_GROWTH * (b - a);
        fc = objective(c);
    }
    if fc.is_nan() || !(fb < fa) {
        return Err(fail);
    }
    let (lo, hi) = if a < c { (a, c) } else { (c, a) };
    Bracket::new(lo, b, hi)
}

/// Minimization over a strictly positive variable, carried out in `ln x`.
///
/// A coarse log-spaced scan over `[scan_lo, scan_hi]` locates the best grid
/// point; an interior winner gives the bracket directly, a winner on the scan
/// edge triggers an outward expansion that may not leave
/// `[limit_lo, limit_hi]`. Expansion failure means the objective decreases
/// without bound (or monotonically) towards `0` or `∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogSearch {
    pub scan_lo: f64,
    pub scan_hi: f64,
    pub per_decade: usize,
    pub limit_lo: f64,
    pub limit_hi: f64,
}

impl Default for LogSearch {
    fn default() -> Self {
        Self {
            scan_lo: 1e-6,
            scan_hi: 1e6,
            per_decade: 4,
            limit_lo: 1e-12,
            limit_hi: 1e12,
        }
    }
}

impl LogSearch {
    pub fn minimize<F>(&self, objective: F, tol: Tolerance) -> Result<Minimum>
    where
        F: Fn(f64) -> f64,
    {
        let g = |y: f64| objective(y.exp());
        let y_lo = self.scan_lo.ln();
        let y_hi = self.scan_hi.ln();
        let decades = (self.scan_hi / self.scan_lo).log10();
        let count = ((decades * self.per_decade as f64).ceil() as usize).max(2) + 1;
        let dy = (y_hi - y_lo) / (count - 1) as f64;
        let ys: Vec<f64> = (0..count).map(|i| y_lo + dy * i as f64).collect();
        let fs: Vec<f64> = ys.iter().map(|&y| nan_as_infinite(g(y))).collect();

        let (best, &f_best) = fs
            .iter()
            .enumerate()
            .min_by(|(_, p), (_, q)| p.total_cmp(q))
            .expect("scan grid is never empty");
        let start = ys[best].exp();
        if f_best.is_infinite() {
            return Err(Error::NoBracketFound { start });
        }

        let bracket = if best > 0 && best + 1 < count {
            if fs[best - 1] > f_best && fs[best + 1] > f_best {
                Bracket::new(ys[best - 1], ys[best], ys[best + 1])?
            } else {
                // plateau at the scan resolution
                return Err(Error::NoBracketFound { start });
            }
        } else {
            let step = if best == 0 { -dy } else { dy };
            bracket_minimum_within(
                g,
                ys[best] - step,
                step,
                self.limit_lo.ln(),
                self.limit_hi.ln(),
            )
            .map_err(|_| Error::NoBracketFound { start })?
        };
        let m = minimize_scalar(g, bracket, tol)?;
        Ok(Minimum {
            x: m.x.exp(),
            f: m.f,
            iterations: m.iterations,
        })
    }

    /// Maximum of `objective`; the returned `f` is the maximal value.
    pub fn maximize<F>(&self, objective: F, tol: Tolerance) -> Result<Minimum>
    where
        F: Fn(f64) -> f64,
    {
        let m = self.minimize(|x| -objective(x), tol)?;
        Ok(Minimum { f: -m.f, ..m })
    }
}

/// Root of `func` on `[lo, hi]` by bisection.
pub fn bisect_root<F>(func: F, lo: f64, hi: f64, tol: Tolerance) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let fa = func(a);
    let fb = func(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa * fb < 0.0) {
        return Err(Error::NoSignChange { lo, hi });
    }
    let negative_at_a = fa < 0.0;
    for _ in 0..tol.max_iter {
        let m = 0.5 * (a + b);
        let fm = func(m);
        if fm == 0.0 || fm.abs() <= tol.abs_f || b - a <= tol.abs_x {
            return Ok(m);
        }
        if (fm < 0.0) == negative_at_a {
            a = m;
        } else {
            b = m;
        }
    }
    if b - a <= tol.abs_x.max(4.0 * f64::EPSILON * a.abs()) {
        return Ok(0.5 * (a + b));
    }
    Err(Error::NoConvergence {
        iterations: tol.max_iter,
        width: b - a,
    })
}

/// Physicists' Hermite polynomial `H_n(y)` by the ascending recurrence
/// `H_{k+1} = 2y H_k - 2k H_{k-1}`.
pub fn hermite(n: u32, y: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * y;
    for k in 1..n {
        let next = 2.0 * y * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Generalized Laguerre polynomial `L_n^{(alpha)}(x)`.
pub fn laguerre(n: u32, alpha: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - x;
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivOrder {
    First,
    Second,
}

/// Central-difference derivative with `O(step^2)` truncation error.
pub fn finite_diff<F>(func: F, x: f64, order: DerivOrder, step: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    match order {
        DerivOrder::First => (func(x + step) - func(x - step)) / (2.0 * step),
        DerivOrder::Second => (func(x + step) - 2.0 * func(x) + func(x - step)) / (step * step),
    }
}

/// One Richardson step on [`finite_diff`]: `O(step^4)` truncation error.
pub fn richardson_diff<F>(func: F, x: f64, order: DerivOrder, step: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    let coarse = finite_diff(&func, x, order, step);
    let fine = finite_diff(&func, x, order, 0.5 * step);
    (4.0 * fine - coarse) / 3.0
}

/// `count` points geometrically spaced from `lo` to `hi` inclusive.
pub fn geometric_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let ratio = (hi / lo).ln() / (count - 1) as f64;
            (0..count)
                .map(|i| {
                    if i + 1 == count {
                        hi
                    } else {
                        lo * (ratio * i as f64).exp()
                    }
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn quadratic_minimum() {
        let m = minimize_scalar(
            |x| (x - 2.0) * (x - 2.0),
            Bracket::new(0.0, 1.0, 5.0).unwrap(),
            tol(),
        )
        .unwrap();
        assert_abs_diff_eq!(m.x, 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(m.f, 0.0, epsilon = 1e-18);
    }

    // Brute-force grid minimum refined on a fine local grid.
    fn brute_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
        let mut best = (lo, f(lo));
        let (mut a, mut b) = (lo, hi);
        for _ in 0..8 {
            let n = 2000;
            for i in 0..=n {
                let x = a + (b - a) * i as f64 / n as f64;
                let y = f(x);
                if y < best.1 {
                    best = (x, y);
                }
            }
            let w = (b - a) / n as f64;
            a = best.0 - 2.0 * w;
            b = best.0 + 2.0 * w;
        }
        best
    }

    #[test]
    fn combo_semiclassical_objectives() {
        let lower = |r: f64| 9.0 / (r * r) - 1.0 / r + r * r;
        let upper = |r: f64| 12.25 / (r * r) - 1.0 / r + r * r;
        let m = minimize_scalar(lower, Bracket::new(0.5, 1.5, 4.0).unwrap(), tol()).unwrap();
        let (xb, fb) = brute_min(lower, 0.5, 4.0);
        assert_abs_diff_eq!(m.x, xb, epsilon = 1e-8);
        assert_abs_diff_eq!(m.f, fb, epsilon = 1e-12);
        assert_abs_diff_eq!(m.x, 1.6899, epsilon = 1e-4);
        assert_abs_diff_eq!(m.f, 5.41553, epsilon = 5e-6);

        let m = minimize_scalar(upper, Bracket::new(0.5, 1.8, 4.0).unwrap(), tol()).unwrap();
        let (_, fb) = brute_min(upper, 0.5, 4.0);
        assert_abs_diff_eq!(m.f, fb, epsilon = 1e-12);
        assert_abs_diff_eq!(m.f, 6.46028, epsilon = 5e-6);
    }

    #[test]
    fn invalid_brackets_rejected() {
        assert!(matches!(
            Bracket::new(1.0, 0.5, 2.0),
            Err(Error::BracketInvalid { .. })
        ));
        let b = Bracket::new(0.0, 4.0, 5.0).unwrap();
        assert!(matches!(
            minimize_scalar(|x| (x - 1.0).powi(2), b, tol()),
            Err(Error::BracketInvalid { .. })
        ));
    }

    #[test]
    fn iteration_cap_reports_no_convergence() {
        let t = Tolerance::new(1e-10, 1e-12, 3).unwrap();
        let b = Bracket::new(0.0, 1.0, 5.0).unwrap();
        assert!(matches!(
            minimize_scalar(|x| (x - 2.0).powi(2), b, t),
            Err(Error::NoConvergence { .. })
        ));
    }

    #[test]
    fn bracket_expansion() {
        let f = |x: f64| (x - 2.0) * (x - 2.0);
        let b = bracket_minimum(f, 0.1, 0.5).unwrap();
        assert!(b.lo < 2.0 && 2.0 < b.hi);
        assert!(f(b.mid) < f(b.lo) && f(b.mid) < f(b.hi));

        assert!(matches!(
            bracket_minimum(|x| -x, 0.0, 1.0),
            Err(Error::NoBracketFound { .. })
        ));
        assert!(matches!(
            bracket_minimum(|_| 3.0, 0.0, 1.0),
            Err(Error::NoBracketFound { .. })
        ));
    }

    #[test]
    fn bracket_for_quartic_kinetic_objective() {
        // d/ds [s + p/s^2] = 1 - 2p/s^3 = 0  =>  s* = (2p)^(1/3), p = 0.5^4
        let p = 0.5f64.powi(4);
        let s_star = (2.0 * p).cbrt();
        let f = |s: f64| {
            if s > 0.0 {
                s + p / (s * s)
            } else {
                f64::INFINITY
            }
        };
        let b = bracket_minimum(f, 0.1, 0.05).unwrap();
        assert!(b.lo < s_star && s_star < b.hi);
        let m = minimize_scalar(f, b, tol()).unwrap();
        assert_abs_diff_eq!(m.x, s_star, epsilon = 1e-6);
    }

    #[test]
    fn log_search_finds_and_rejects() {
        let p = 0.5f64.powi(4);
        let m = LogSearch::default()
            .minimize(|s| s + p / (s * s), tol())
            .unwrap();
        assert_abs_diff_eq!(m.x, (2.0 * p).cbrt(), epsilon = 1e-6);
        assert_abs_diff_eq!(m.f, 1.5 * (2.0 * p).cbrt(), epsilon = 1e-14);

        // monotone towards infinity
        assert!(matches!(
            LogSearch::default().minimize(|s| 1.0 / s, tol()),
            Err(Error::NoBracketFound { .. })
        ));
        // unbounded below towards zero
        assert!(matches!(
            LogSearch::default().minimize(|r| -1.0 / r + r, tol()),
            Err(Error::NoBracketFound { .. })
        ));
        assert!(matches!(
            LogSearch::default().minimize(|r| -1.0 / (r * r) + 1.0 / r, tol()),
            Err(Error::NoBracketFound { .. })
        ));
    }

    #[test]
    fn minimum_beyond_scan_window() {
        let m = LogSearch::default()
            .minimize(|x| (x.ln() - 20.0).powi(2), tol())
            .unwrap();
        assert_abs_diff_eq!(m.x.ln(), 20.0, epsilon = 1e-6);
    }

    #[test]
    fn bisection_roots() {
        assert_abs_diff_eq!(
            bisect_root(|x| x * x - 4.0, 0.0, 5.0, tol()).unwrap(),
            2.0,
            epsilon = 1e-10
        );
        let r1 = bisect_root(|r| 2.0 * r.powi(4) + r - 18.0, 1.0, 3.0, tol()).unwrap();
        let r2 = bisect_root(|r| 2.0 * r.powi(4) + r - 24.5, 1.0, 3.0, tol()).unwrap();
        assert_abs_diff_eq!(r1, 1.6899, epsilon = 1e-4);
        assert_abs_diff_eq!(r2, 1.8348, epsilon = 1e-4);
        // stationarity of 9/r^2 - 1/r + r^2 is 2r^4 + r - 18 = 0
        let m = minimize_scalar(
            |r| 9.0 / (r * r) - 1.0 / r + r * r,
            Bracket::new(0.5, 1.5, 4.0).unwrap(),
            tol(),
        )
        .unwrap();
        assert_abs_diff_eq!(m.x, r1, epsilon = 1e-8);
        assert!(matches!(
            bisect_root(|x| x * x + 1.0, -1.0, 1.0, tol()),
            Err(Error::NoSignChange { .. })
        ));
    }

    #[test]
    fn hermite_values() {
        assert_eq!(hermite(0, 0.7), 1.0);
        assert_eq!(hermite(1, 0.7), 1.4);
        let y: f64 = 1.0;
        assert_eq!(hermite(3, y), 8.0 * y.powi(3) - 12.0 * y);
        assert_eq!(hermite(3, 1.0), -4.0);
        for n in 1..12u32 {
            for y in -4..=4 {
                let y = y as f64;
                assert_eq!(
                    hermite(n + 1, y),
                    2.0 * y * hermite(n, y) - 2.0 * n as f64 * hermite(n - 1, y)
                );
            }
        }
    }

    #[test]
    fn laguerre_values() {
        // explicit forms
        let (a, x) = (2.5, 0.8);
        assert_abs_diff_eq!(laguerre(1, a, x), 1.0 + a - x, epsilon = 1e-15);
        let l2 = 0.5 * (x * x - 2.0 * (a + 2.0) * x + (a + 1.0) * (a + 2.0));
        assert_abs_diff_eq!(laguerre(2, a, x), l2, epsilon = 1e-14);
    }

    #[test]
    fn finite_differences() {
        let sq = |x: f64| x * x;
        assert_abs_diff_eq!(
            finite_diff(sq, 3.0, DerivOrder::First, 1e-3),
            6.0,
            epsilon = 1e-8
        );
        assert_abs_diff_eq!(
            finite_diff(sq, 3.0, DerivOrder::Second, 1e-3),
            2.0,
            epsilon = 1e-5
        );
        let osc = |v: f64| v.sqrt();
        assert_abs_diff_eq!(
            finite_diff(osc, 1.0, DerivOrder::First, 1e-4),
            0.5,
            epsilon = 1e-8
        );
    }

    #[test]
    fn first_difference_error_is_second_order() {
        let cubic = |x: f64| x.powi(3) - 2.0 * x * x + 0.5 * x;
        let exact = |x: f64| 3.0 * x * x - 4.0 * x + 0.5;
        for &x in &[-1.3, 0.2, 2.7] {
            let e1 = (finite_diff(cubic, x, DerivOrder::First, 1e-2) - exact(x)).abs();
            let e2 = (finite_diff(cubic, x, DerivOrder::First, 5e-3) - exact(x)).abs();
            let ratio = e1 / e2;
            assert!((ratio - 4.0).abs() < 0.05, "ratio {ratio}");
        }
    }

    #[test]
    fn geometric_grid_endpoints() {
        let g = geometric_grid(0.25, 4.0, 10);
        assert_eq!(g.len(), 10);
        assert_eq!(g[0], 0.25);
        assert_eq!(g[9], 4.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(geometric_grid(1.0, 2.0, 0).is_empty());
    }

    proptest! {
        #[test]
        fn golden_section_hits_quadratic_minimizer(c in -50.0f64..50.0, k in 0.1f64..10.0) {
            let f = |x: f64| k * (x - c) * (x - c) + 1.0;
            let b = bracket_minimum(f, 0.0, 1.0).unwrap();
            let m = minimize_scalar(f, b, tol()).unwrap();
            prop_assert!((m.x - c).abs() <= 1e-6 * (1.0 + c.abs()));
        }

        #[test]
        fn power_sum_minimizers(p in 0.2f64..5.0, q in 1.0f64..4.0) {
            // p^2/r^2 + r^q is minimized at r* = (2p^2/q)^(1/(q+2))
            let f = |r: f64| p * p / (r * r) + r.powf(q);
            let r_star = (2.0 * p * p / q).powf(1.0 / (q + 2.0));
            let b = bracket_minimum(|r| if r > 0.0 { f(r) } else { f64::INFINITY }, r_star * 0.3, 0.1).unwrap();
            let m = minimize_scalar(f, b, tol()).unwrap();
            prop_assert!((m.x - r_star).abs() <= 1e-6 * r_star);
            prop_assert!((m.f - f(r_star)).abs() <= 1e-8);
        }
    }
}
