//! The Markov process attached to a Dirichlet generator.
//!
//! A generator with nonpositive off-diagonal entries and nonnegative row sums
//! drives a continuous-time Markov chain: exponential holding times with rate
//! `H_ii`, jumps along `P_ij = -H_ij / H_ii`, and — when row sums are
//! positive — killing to a cemetery state with the surplus rate. Sampling is
//! seeded and reproducible; every trajectory derives an independent stream
//! from `(seed, path index)`, so parallel aggregation is order-independent.

use std::io::Write;

use nalgebra::DVector;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forms::Generator;
use crate::semigroup::SemigroupEvaluator;
use crate::space::{Function, StateSpace};
use crate::tolerances::Tolerances;

/// Jump-chain data extracted from a Markovian generator.
#[derive(Debug, Clone)]
pub struct JumpChain {
    space: StateSpace,
    /// Total exit rate per vertex (diagonal of H); zero marks an absorbing
    /// vertex.
    exit_rate: Vec<f64>,
    /// Per-vertex jump table: `(target, cumulative probability)`, cumulative
    /// over the real targets only.
    jumps: Vec<Vec<(usize, f64)>>,
    /// Probability that a jump from `i` goes to the cemetery.
    cemetery: Vec<f64>,
    conservative: bool,
}

impl JumpChain {
    /// Extracts the chain from a generator. Fails with
    /// [`Error::NotMarkovGenerator`] naming the first positive off-diagonal
    /// entry; row sums more negative than roundoff fail the same way.
    pub fn from_generator(gen: &Generator) -> Result<Self> {
        let n = gen.space().n();
        let h = gen.matrix();
        let scale = h.amax().max(1.0);
        let floor = 1e-12 * scale;
        for i in 0..n {
            for j in 0..n {
                if i != j && h[(i, j)] > floor {
                    return Err(Error::NotMarkovGenerator { row: i, col: j, value: h[(i, j)] });
                }
            }
        }
        let mut exit_rate = vec![0.0; n];
        let mut jumps = vec![Vec::new(); n];
        let mut cemetery = vec![0.0; n];
        let mut conservative = true;
        for i in 0..n {
            let mut rates: Vec<(usize, f64)> = Vec::new();
            let mut total_off = 0.0;
            for j in 0..n {
                if i != j {
                    let r = (-h[(i, j)]).max(0.0);
                    if r > 0.0 {
                        rates.push((j, r));
                        total_off += r;
                    }
                }
            }
            let diag = h[(i, i)];
            let kill = diag - total_off;
            if kill < -floor {
                return Err(Error::NotMarkovGenerator { row: i, col: i, value: kill });
            }
            let kill = kill.max(0.0);
            let lambda = total_off + kill;
            exit_rate[i] = lambda;
            if lambda > 0.0 {
                let mut cum = 0.0;
                for (j, r) in rates {
                    cum += r / lambda;
                    jumps[i].push((j, cum));
                }
                cemetery[i] = kill / lambda;
                if kill / lambda > 1e-12 {
                    conservative = false;
                }
            }
        }
        Ok(Self { space: gen.space().clone(), exit_rate, jumps, cemetery, conservative })
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn exit_rate(&self, i: usize) -> f64 {
        self.exit_rate[i]
    }

    pub fn is_absorbing(&self, i: usize) -> bool {
        self.exit_rate[i] == 0.0
    }

    /// True when no vertex carries killing: the chain conserves mass.
    pub fn is_conservative(&self) -> bool {
        self.conservative
    }

    /// Jump probability from `i` to `j` (excluding the cemetery).
    pub fn jump_probability(&self, i: usize, j: usize) -> f64 {
        let mut prev = 0.0;
        for &(target, cum) in &self.jumps[i] {
            if target == j {
                return cum - prev;
            }
            prev = cum;
        }
        0.0
    }

    pub fn cemetery_probability(&self, i: usize) -> f64 {
        self.cemetery[i]
    }

    fn draw_next(&self, i: usize, rng: &mut ChaCha8Rng) -> Option<usize> {
        let u: f64 = rng.random();
        let row = &self.jumps[i];
        if let Some(&(_, last)) = row.last() {
            if u < last {
                let k = row.partition_point(|&(_, cum)| cum <= u);
                return Some(row[k.min(row.len() - 1)].0);
            }
        }
        if self.cemetery[i] > 0.0 {
            None
        } else {
            row.last().map(|&(j, _)| j)
        }
    }
}

/// One sampled trajectory: the start vertex, strictly increasing jump times,
/// the visited vertices, and the seed that reproduces it.
#[derive(Debug, Clone)]
pub struct PathSample {
    pub start: usize,
    /// Time of the k-th jump, landing on `vertices[k + 1]`.
    pub times: Vec<f64>,
    /// Visited vertices, starting vertex first.
    pub vertices: Vec<usize>,
    pub seed: u64,
    pub horizon: f64,
    /// Absorption time, when the path jumped to the cemetery.
    pub killed_at: Option<f64>,
}

impl PathSample {
    /// State at time `t`, or `None` once killed.
    pub fn state_at(&self, t: f64) -> Option<usize> {
        if let Some(k) = self.killed_at {
            if t >= k {
                return None;
            }
        }
        let idx = self.times.partition_point(|&s| s <= t);
        Some(self.vertices[idx])
    }

    /// CSV rows `t,vertex` with the seed embedded in a header comment. The
    /// cemetery appears as vertex `-1`.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "# seed {}", self.seed)?;
        writeln!(w, "t,vertex")?;
        writeln!(w, "{:e},{}", 0.0, self.start)?;
        for (k, &t) in self.times.iter().enumerate() {
            writeln!(w, "{:e},{}", t, self.vertices[k + 1])?;
        }
        if let Some(k) = self.killed_at {
            writeln!(w, "{k:e},-1")?;
        }
        Ok(())
    }
}

/// Samples one trajectory up to the horizon; reproducible from the seed.
pub fn sample_path(chain: &JumpChain, start: usize, horizon: f64, seed: u64) -> Result<PathSample> {
    chain.space().check_vertex(start)?;
    if !(horizon > 0.0) {
        return Err(Error::NonPositiveHorizon(horizon));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = 0.0;
    let mut current = start;
    let mut times = Vec::new();
    let mut vertices = vec![start];
    let mut killed_at = None;
    loop {
        let rate = chain.exit_rate(current);
        if rate == 0.0 {
            break;
        }
        let hold: f64 = rand_distr::Exp::new(rate).expect("positive rate").sample(&mut rng);
        t += hold;
        if t >= horizon {
            break;
        }
        match chain.draw_next(current, &mut rng) {
            Some(j) => {
                times.push(t);
                vertices.push(j);
                current = j;
            }
            None => {
                killed_at = Some(t);
                break;
            }
        }
    }
    Ok(PathSample { start, times, vertices, seed, horizon, killed_at })
}

/// Walks the chain without recording the trajectory; returns the state at
/// time `t`, or `None` if killed before then.
fn walk(chain: &JumpChain, start: usize, t: f64, rng: &mut ChaCha8Rng) -> Option<usize> {
    let mut clock = 0.0;
    let mut current = start;
    loop {
        let rate = chain.exit_rate(current);
        if rate == 0.0 {
            return Some(current);
        }
        let hold: f64 = rand_distr::Exp::new(rate).expect("positive rate").sample(rng);
        clock += hold;
        if clock >= t {
            return Some(current);
        }
        current = chain.draw_next(current, rng)?;
    }
}

fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Monte Carlo estimate of `E_x[f(X_t)]` with its standard error, over
/// independent paths. Killed paths contribute zero, matching the sub-Markov
/// semigroup. Paths are sampled in parallel but aggregated in path order, so
/// the result is deterministic in `(seed, n_paths)`.
pub fn empirical_semigroup(
    chain: &JumpChain,
    x: usize,
    t: f64,
    f: &Function,
    n_paths: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    chain.space().check_vertex(x)?;
    chain.space().check_function(f)?;
    if !(t >= 0.0) {
        return Err(Error::NegativeTime(t));
    }
    if n_paths == 0 {
        return Err(Error::NoPaths);
    }
    if t == 0.0 {
        return Ok((f[x], 0.0));
    }
    let values: Vec<f64> = (0..n_paths as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(seed, k);
            walk(chain, x, t, &mut rng).map_or(0.0, |v| f[v])
        })
        .collect();
    let mean = values.iter().sum::<f64>() / n_paths as f64;
    let std_error = if n_paths > 1 {
        let var =
            values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n_paths - 1) as f64;
        (var / n_paths as f64).sqrt()
    } else {
        0.0
    };
    Ok((mean, std_error))
}

/// Result of one proper-association check: the Monte Carlo expectation
/// against the semigroup value at the same `(x, t, f)`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct AssociationCheck {
    pub x: usize,
    pub t: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub exact: f64,
    pub deviation_sigmas: f64,
    pub pass: bool,
}

/// Checks `|E_x[f(X_t)] - (T_t f)(x)| ≤ mc_sigmas · SE`. A small absolute
/// guard covers degenerate cases where the standard error vanishes.
#[allow(clippy::too_many_arguments)]
pub fn verify_association(
    chain: &JumpChain,
    sg: &SemigroupEvaluator,
    x: usize,
    t: f64,
    f: &Function,
    n_paths: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<AssociationCheck> {
    let (estimate, std_error) = empirical_semigroup(chain, x, t, f, n_paths, seed)?;
    let exact = sg.apply(t, f)?[x];
    let dev = (estimate - exact).abs();
    let deviation_sigmas = if std_error > 0.0 { dev / std_error } else { 0.0 };
    let pass = dev <= tol.mc_sigmas * std_error + 1e-12 * (1.0 + exact.abs());
    Ok(AssociationCheck { x, t, estimate, std_error, exact, deviation_sigmas, pass })
}

/// Time-weighted occupation measure of one long trajectory, normalized to
/// total mass one after discarding the burn-in. The walk starts from the
/// vertex with the largest measure weight.
pub fn stationary_histogram(
    chain: &JumpChain,
    horizon: f64,
    burn_in: f64,
    seed: u64,
) -> Result<Function> {
    if !(horizon > burn_in) || !(burn_in >= 0.0) {
        return Err(Error::NonPositiveHorizon(horizon - burn_in));
    }
    if !chain.is_conservative() {
        return Err(Error::NoStationaryLaw { reason: "chain has killing".into() });
    }
    if !chain.space().is_connected() {
        return Err(Error::NoStationaryLaw { reason: "state space is disconnected".into() });
    }
    if (0..chain.space().n()).any(|i| chain.is_absorbing(i)) {
        return Err(Error::NoStationaryLaw { reason: "chain has absorbing vertices".into() });
    }
    let n = chain.space().n();
    let start = (0..n)
        .max_by(|&a, &b| chain.space().mu()[a].total_cmp(&chain.space().mu()[b]))
        .unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut occupation = DVector::zeros(n);
    let mut t = 0.0;
    let mut current = start;
    while t < horizon {
        let rate = chain.exit_rate(current);
        let hold: f64 = rand_distr::Exp::new(rate).expect("positive rate").sample(&mut rng);
        let leave = (t + hold).min(horizon);
        let overlap = leave.min(horizon) - t.max(burn_in);
        if overlap > 0.0 {
            occupation[current] += overlap;
        }
        t += hold;
        if t >= horizon {
            break;
        }
        // Conservative chains always produce a real target.
        current = chain.draw_next(current, &mut rng).expect("conservative chain");
    }
    occupation /= horizon - burn_in;
    Ok(occupation)
}

/// Samples an observable along one long trajectory on a uniform time grid
/// `burn_in + k dt`, up to the horizon. Used for autocorrelation estimates.
pub fn observable_time_series(
    chain: &JumpChain,
    start: usize,
    horizon: f64,
    burn_in: f64,
    dt: f64,
    seed: u64,
    f: &Function,
) -> Result<Vec<f64>> {
    chain.space().check_vertex(start)?;
    chain.space().check_function(f)?;
    if !(horizon > burn_in) || !(dt > 0.0) {
        return Err(Error::NonPositiveHorizon(horizon - burn_in));
    }
    if !chain.is_conservative() {
        return Err(Error::NoStationaryLaw { reason: "chain has killing".into() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(((horizon - burn_in) / dt) as usize + 1);
    let mut t = 0.0;
    let mut current = start;
    let mut next_sample = burn_in;
    loop {
        let rate = chain.exit_rate(current);
        if rate == 0.0 {
            while next_sample <= horizon {
                out.push(f[current]);
                next_sample += dt;
            }
            break;
        }
        let hold: f64 = rand_distr::Exp::new(rate).expect("positive rate").sample(&mut rng);
        let leave = t + hold;
        while next_sample <= horizon && next_sample < leave {
            out.push(f[current]);
            next_sample += dt;
        }
        if next_sample > horizon {
            break;
        }
        t = leave;
        current = chain.draw_next(current, &mut rng).expect("conservative chain");
    }
    Ok(out)
}

/// Centered empirical autocovariance of a uniformly sampled series at lags
/// `0, dt, ..., max_lags·dt`. Returns `(lag, C(lag))` pairs.
pub fn autocovariance(series: &[f64], dt: f64, max_lags: usize) -> Vec<(f64, f64)> {
    let n = series.len();
    if n == 0 {
        return Vec::new();
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let mut out = Vec::with_capacity(max_lags + 1);
    for lag in 0..=max_lags.min(n - 1) {
        let m = n - lag;
        let cov = (0..m)
            .map(|i| (series[i] - mean) * (series[i + lag] - mean))
            .sum::<f64>()
            / m as f64;
        out.push((lag as f64 * dt, cov));
    }
    out
}

/// Weighted log-linear fit of `C(s) ≈ c e^{-rate s}`. Points with
/// nonpositive value are skipped; remaining points are weighted by `C²`,
/// which is the Gauss-Newton weighting for an exponential observed with
/// additive noise. Returns `(c, rate)`.
pub fn fit_exponential_decay(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    let usable: Vec<(f64, f64, f64)> = points
        .iter()
        .filter(|(_, c)| *c > 0.0)
        .map(|&(s, c)| (s, c.ln(), c * c))
        .collect();
    if usable.len() < 2 {
        return None;
    }
    let sw: f64 = usable.iter().map(|(_, _, w)| w).sum();
    let sx: f64 = usable.iter().map(|(s, _, w)| w * s).sum();
    let sy: f64 = usable.iter().map(|(_, y, w)| w * y).sum();
    let sxx: f64 = usable.iter().map(|(s, _, w)| w * s * s).sum();
    let sxy: f64 = usable.iter().map(|(s, y, w)| w * s * y).sum();
    let denom = sw * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return None;
    }
    let slope = (sw * sxy - sx * sy) / denom;
    let intercept = (sy * sxx - sx * sxy) / denom;
    Some((intercept.exp(), -slope))
}
