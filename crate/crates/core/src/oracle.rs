//! Node-counting shooting solver for the radial equation
//!
//! ```text
//! -u'' + [(k-1)(k-3)/(4r^2) + v f(r)] u = E u,   u ~ r^{(k-1)/2} as r -> 0
//! ```
//!
//! and for even one-dimensional problems on the whole line. The solution is
//! integrated outward with fixed-step RK4 and the energy is bisected between
//! the regimes with `n` and `n + 1` sign changes. The box radius is grown until
//! the WKB decay action beyond the outer turning point exceeds
//! [`DECAY_ACTION`], so the truncation error is far below the bisection
//! tolerance.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{geometric_grid, Tolerance};
use crate::potential::{Domain, PotentialShape};
use crate::spectra::{count_sign_changes, Mode, QuantumNumbers};

/// Required `∫ sqrt(V - E) dr` between the outer turning point and `r_max`.
pub const DECAY_ACTION: f64 = 18.5;
pub const DEFAULT_GRID_N: usize = 20_000;

const MAX_RADIUS: f64 = 1e6;
const MAX_RESIZES: usize = 40;
/// Geometric step fraction near the origin.
const NEAR_ORIGIN_STEP: f64 = 0.01;
/// Inner start radius relative to `r_max`.
const START_FRACTION: f64 = 1e-6;
const RENORMALIZE_ABOVE: f64 = 1e150;

#[derive(Debug, Clone, PartialEq)]
pub struct RadialProblem {
    pub f: PotentialShape,
    pub v: f64,
    pub qn: QuantumNumbers,
    /// Fixed truncation radius; `None` sizes the box automatically.
    pub r_max: Option<f64>,
    pub grid_n: usize,
}

impl RadialProblem {
    pub fn new(f: PotentialShape, v: f64, qn: QuantumNumbers) -> Self {
        Self {
            f,
            v,
            qn,
            r_max: None,
            grid_n: DEFAULT_GRID_N,
        }
    }

    pub fn with_r_max(mut self, r_max: f64) -> Self {
        self.r_max = Some(r_max);
        self
    }

    fn effective(&self, r: f64) -> f64 {
        self.qn.centrifugal() / (r * r) + self.v * self.f.value(r)
    }

    /// Outward solution `(r, u(r))` at energy `energy` on the box `r_max`. The
    /// profile stops early if the divergent tail would overflow.
    pub fn wavefunction(&self, energy: f64, r_max: f64) -> Vec<(f64, f64)> {
        let shooter = Shooter::radial(self, r_max);
        let us = shooter.integrate(energy, true).profile;
        shooter.grid.iter().copied().zip(us).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleResult {
    pub energy: f64,
    pub nodes_found: u32,
    /// WKB estimate `exp(-action)` of the relative eigenfunction amplitude at
    /// the truncation radius.
    pub residual: f64,
    pub bracket_width: f64,
    pub r_max: f64,
}

struct Trajectory {
    nodes: usize,
    profile: Vec<f64>,
}

/// Precomputed grid and effective potential for one truncation radius.
struct Shooter {
    grid: Vec<f64>,
    /// `V_eff` at grid points.
    w: Vec<f64>,
    /// `V_eff` at interval midpoints.
    w_mid: Vec<f64>,
    u0: f64,
    p0: f64,
}

impl Shooter {
    fn radial(problem: &RadialProblem, r_max: f64) -> Self {
        let h_max = r_max / problem.grid_n as f64;
        let mut r = r_max * START_FRACTION;
        let mut grid = vec![r];
        while r < r_max {
            let h = (NEAR_ORIGIN_STEP * r).min(h_max);
            r = (r + h).min(r_max);
            grid.push(r);
        }
        let (u0, p0) = series_start(problem, grid[0]);
        Self::build(grid, u0, p0, |r| problem.effective(r))
    }

    fn line(f: &PotentialShape, v: f64, parity_odd: bool, x_max: f64, grid_n: usize) -> Self {
        let h = x_max / grid_n as f64;
        let grid = (0..=grid_n).map(|i| h * i as f64).collect();
        let (u0, p0) = if parity_odd { (0.0, 1.0) } else { (1.0, 0.0) };
        Self::build(grid, u0, p0, |x| v * f.value(x))
    }

    fn build(grid: Vec<f64>, u0: f64, p0: f64, potential: impl Fn(f64) -> f64) -> Self {
        let w = grid.iter().map(|&r| potential(r)).collect();
        let w_mid = grid
            .windows(2)
            .map(|p| potential(0.5 * (p[0] + p[1])))
            .collect();
        Self {
            grid,
            w,
            w_mid,
            u0,
            p0,
        }
    }

    fn integrate(&self, energy: f64, keep: bool) -> Trajectory {
        let (mut u, mut p) = (self.u0, self.p0);
        let mut profile = Vec::new();
        if keep {
            profile.reserve(self.grid.len());
            profile.push(u);
        }
        let mut nodes = 0usize;
        let mut last = u;
        for i in 0..self.grid.len() - 1 {
            let h = self.grid[i + 1] - self.grid[i];
            let (a, b, c) = (
                self.w[i] - energy,
                self.w_mid[i] - energy,
                self.w[i + 1] - energy,
            );
            let k1u = p;
            let k1p = a * u;
            let k2u = p + 0.5 * h * k1p;
            let k2p = b * (u + 0.5 * h * k1u);
            let k3u = p + 0.5 * h * k2p;
            let k3p = b * (u + 0.5 * h * k2u);
            let k4u = p + h * k3p;
            let k4p = c * (u + h * k3u);
            u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
            p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);

            if u != 0.0 {
                if last != 0.0 && (u > 0.0) != (last > 0.0) {
                    nodes += 1;
                }
                last = u;
            }
            if u.abs() > RENORMALIZE_ABOVE {
                if keep {
                    break;
                }
                let s = 1.0 / u.abs();
                u *= s;
                p *= s;
                last *= s;
            }
            if keep {
                profile.push(u);
            }
        }
        Trajectory { nodes, profile }
    }

    fn nodes(&self, energy: f64) -> usize {
        self.integrate(energy, false).nodes
    }

    /// Lowest energy at which the solution has more than `target` sign changes.
    fn bisect(&self, target: usize, e_floor: f64, tol: Tolerance) -> Result<(f64, f64, usize)> {
        let mut lo = e_floor;
        let mut span = 1.0f64;
        let mut hi = lo + span;
        while self.nodes(hi) <= target {
            lo = hi;
            span *= 2.0;
            hi = lo + span;
            if span > 1e12 {
                return Err(Error::NoBoundState {
                    nodes: target as u32,
                    ceiling: hi,
                });
            }
        }
        for _ in 0..tol.max_iter {
            if hi - lo <= tol.abs_x.max(4.0 * f64::EPSILON * lo.abs()) {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if self.nodes(mid) <= target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if hi - lo > tol.abs_x.max(4.0 * f64::EPSILON * lo.abs()) {
            return Err(Error::NoConvergence {
                iterations: tol.max_iter,
                width: hi - lo,
            });
        }
        Ok((0.5 * (lo + hi), hi - lo, self.nodes(lo)))
    }

    /// Decay action from the last classically allowed point to the box edge.
    fn decay_action(&self, energy: f64) -> f64 {
        let excess: Vec<f64> = self.w.iter().map(|&w| w - energy).collect();
        if *excess.last().expect("grid is never empty") <= 0.0 {
            return 0.0;
        }
        let start = excess.iter().rposition(|&e| e <= 0.0).unwrap_or(0);
        (start..self.grid.len() - 1)
            .map(|i| {
                let h = self.grid[i + 1] - self.grid[i];
                0.5 * h * (excess[i].max(0.0).sqrt() + excess[i + 1].max(0.0).sqrt())
            })
            .sum()
    }

    fn energy_floor(&self) -> f64 {
        self.w.iter().copied().fold(f64::INFINITY, f64::min) - 1.0
    }
}

/// `u = r^a (1 + Σ c_j r^{q_j + 2})` near the origin, with one correction per
/// singular term `g r^q` of the potential. For `k = 2` the second solution is
/// `r^{1/2} ln r`, so without the correction the start error would leak into
/// the energy.
fn series_start(problem: &RadialProblem, r0: f64) -> (f64, f64) {
    let a = (problem.qn.k() as f64 - 1.0) / 2.0;
    let (mut u, mut p) = (r0.powf(a), a * r0.powf(a - 1.0));
    for term in problem.f.terms().iter().filter(|t| t.exponent < 0.0) {
        let q = term.exponent;
        let denom = (q + 2.0) * (2.0 * a + q + 1.0);
        if denom == 0.0 {
            continue;
        }
        let c = problem.v * term.coeff / denom;
        u += c * r0.powf(a + q + 2.0);
        p += c * (a + q + 2.0) * r0.powf(a + q + 1.0);
    }
    (u, p)
}

/// Radius beyond which the action from the turning point reaches `target`,
/// found by marching outward from `from`.
fn radius_for_action(
    potential: impl Fn(f64) -> f64,
    energy: f64,
    from: f64,
    target: f64,
) -> Option<f64> {
    let mut r = from;
    let mut action = 0.0;
    let mut step = from / 200.0;
    let mut prev = (potential(r) - energy).max(0.0).sqrt();
    while r < MAX_RADIUS {
        let next = r + step;
        let cur = (potential(next) - energy).max(0.0).sqrt();
        action += 0.5 * step * (prev + cur);
        r = next;
        prev = cur;
        if action >= target {
            return Some(r);
        }
        step *= 1.01;
    }
    None
}

/// Length where `v |f(r)| r^2 = 1`, a rough size of the low-lying states.
fn natural_length(potential: impl Fn(f64) -> f64) -> f64 {
    geometric_grid(1e-4, 1e4, 161)
        .into_iter()
        .find(|&r| potential(r).abs() * r * r >= 1.0)
        .unwrap_or(1.0)
}

pub fn solve_radial(problem: &RadialProblem, tol: Tolerance) -> Result<OracleResult> {
    if problem.qn.mode != Mode::Radial {
        return Err(Error::InvalidQuantumNumbers(
            "solve_radial needs radial quantum numbers".into(),
        ));
    }
    if problem.f.domain() != Domain::HalfLine {
        return Err(Error::InvalidShape(
            "radial solver needs a half-line shape".into(),
        ));
    }
    if !(problem.v > 0.0) {
        return Err(Error::InvalidShape(format!(
            "coupling must be positive, got {}",
            problem.v
        )));
    }
    if problem.qn.k() == 1
        && problem
            .f
            .terms()
            .iter()
            .any(|t| t.exponent <= -1.0 && t.coeff < 0.0)
    {
        return Err(Error::InvalidQuantumNumbers(
            "k = 1 with an attractive r^q, q <= -1, term has no even ground state".into(),
        ));
    }
    let target = problem.qn.n as usize;
    let mut r_max = problem.r_max.unwrap_or_else(|| {
        let len = natural_length(|r| problem.v * problem.f.value(r));
        8.0 * (problem.qn.n as f64 + problem.qn.k() as f64 / 2.0 + 2.0) * len
    });
    let mut last_energy = f64::NAN;
    for _ in 0..MAX_RESIZES {
        let shooter = Shooter::radial(problem, r_max);
        let (energy, width, nodes) = shooter.bisect(target, shooter.energy_floor(), tol)?;
        last_energy = energy;
        let action = shooter.decay_action(energy);
        if action >= DECAY_ACTION {
            return Ok(OracleResult {
                energy,
                nodes_found: nodes as u32,
                residual: (-action).exp(),
                bracket_width: width,
                r_max,
            });
        }
        if problem.r_max.is_some() {
            return Err(Error::TruncationTooSmall {
                r_max,
                tail: (-action).exp(),
            });
        }
        r_max = if problem.effective(r_max) <= energy {
            2.0 * r_max
        } else {
            radius_for_action(|r| problem.effective(r), energy, r_max, 1.25 * DECAY_ACTION)
                .map_or(2.0 * r_max, |r| r.max(1.1 * r_max))
        };
        if r_max > MAX_RADIUS {
            break;
        }
    }
    Err(Error::NoBoundState {
        nodes: problem.qn.n,
        ceiling: last_energy,
    })
}

/// Even potential on the whole line; `n` counts all sign changes. Even `n`
/// starts with `ψ'(0) = 0`, odd `n` with `ψ(0) = 0`.
pub fn solve_line(
    f: &PotentialShape,
    v: f64,
    n: u32,
    x_max: Option<f64>,
    tol: Tolerance,
) -> Result<OracleResult> {
    if f.domain() != Domain::FullLine {
        return Err(Error::InvalidShape(
            "line solver needs a full-line shape".into(),
        ));
    }
    if !(v > 0.0) {
        return Err(Error::InvalidShape(format!(
            "coupling must be positive, got {v}"
        )));
    }
    let odd = n % 2 == 1;
    let target = (n / 2) as usize;
    let potential = |x: f64| v * f.value(x);
    let fixed = x_max.is_some();
    let mut x_max =
        x_max.unwrap_or_else(|| 8.0 * (n as f64 + 2.0).sqrt() * natural_length(potential));
    let mut last_energy = f64::NAN;
    for _ in 0..MAX_RESIZES {
        let shooter = Shooter::line(f, v, odd, x_max, DEFAULT_GRID_N);
        let (energy, width, half_nodes) = shooter.bisect(target, shooter.energy_floor(), tol)?;
        last_energy = energy;
        let action = shooter.decay_action(energy);
        let nodes_found = (2 * half_nodes + odd as usize) as u32;
        if action >= DECAY_ACTION {
            return Ok(OracleResult {
                energy,
                nodes_found,
                residual: (-action).exp(),
                bracket_width: width,
                r_max: x_max,
            });
        }
        if fixed {
            return Err(Error::TruncationTooSmall {
                r_max: x_max,
                tail: (-action).exp(),
            });
        }
        x_max = if potential(x_max) <= energy {
            2.0 * x_max
        } else {
            radius_for_action(potential, energy, x_max, 1.25 * DECAY_ACTION)
                .map_or(2.0 * x_max, |x| x.max(1.1 * x_max))
        };
        if x_max > MAX_RADIUS {
            break;
        }
    }
    Err(Error::NoBoundState {
        nodes: n,
        ceiling: last_energy,
    })
}

/// Oracle samples of `F_n(v)` over `v_grid`, one result per coupling in grid
/// order.
pub fn energy_curve_sample(
    f: &PotentialShape,
    qn: QuantumNumbers,
    v_grid: &[f64],
    tol: Tolerance,
) -> Vec<Result<(f64, f64)>> {
    v_grid
        .par_iter()
        .map(|&v| solve_at(f, qn, v, tol).map(|r| (v, r.energy)))
        .collect()
}

/// Dispatches to [`solve_line`] or [`solve_radial`] by mode.
pub fn solve_at(
    f: &PotentialShape,
    qn: QuantumNumbers,
    v: f64,
    tol: Tolerance,
) -> Result<OracleResult> {
    match qn.mode {
        Mode::Line => solve_line(f, v, qn.n, None, tol),
        Mode::Radial => solve_radial(&RadialProblem::new(f.clone(), v, qn), tol),
    }
}

/// Sign changes of a sampled wave function up to `limit`.
pub fn nodes_within(profile: &[(f64, f64)], limit: f64) -> usize {
    count_sign_changes(
        profile
            .iter()
            .take_while(|(r, _)| *r <= limit)
            .map(|&(_, u)| u),
    )
}
