//! Bond percolation on the (m+1) x m rectangle: crossing detection,
//! noise-sensitivity experiments, majority correlation over edge subsets,
//! and dynamical percolation.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use crate::estimate::Estimate;
use crate::rng::stream_rng;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

/// One bond of the rectangle, with its endpoint vertex indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub a: u32,
    pub b: u32,
    pub orientation: Orientation,
}

/// The (m+1) x m rectangle: m rows by m+1 columns of vertices, all horizontal
/// edges first (row-major), then all vertical edges. The edge count is
/// `2 m^2 - 1` (m^2 horizontal plus (m+1)(m-1) vertical). Left and right
/// boundaries are the full first and last vertex columns.
#[derive(Debug, Clone)]
pub struct GridRectangle {
    m: usize,
    edges: Vec<Edge>,
    /// Per-vertex incident edges as (edge index, other endpoint).
    incidence: Vec<Vec<(u32, u32)>>,
    left_boundary: Vec<u32>,
    right_boundary: Vec<u32>,
}

pub fn build_grid(m: usize) -> Result<GridRectangle> {
    if m < 1 {
        return Err(Error::contract("grid side parameter must be at least 1"));
    }
    let cols = m + 1;
    let rows = m;
    let vid = |r: usize, c: usize| (r * cols + c) as u32;

    let mut edges = Vec::with_capacity(2 * m * m - 1);
    for r in 0..rows {
        for c in 0..cols - 1 {
            edges.push(Edge {
                a: vid(r, c),
                b: vid(r, c + 1),
                orientation: Orientation::Horizontal,
            });
        }
    }
    for r in 0..rows.saturating_sub(1) {
        for c in 0..cols {
            edges.push(Edge {
                a: vid(r, c),
                b: vid(r + 1, c),
                orientation: Orientation::Vertical,
            });
        }
    }
    assert_eq!(edges.len(), 2 * m * m - 1);

    let mut incidence = vec![Vec::new(); rows * cols];
    for (i, e) in edges.iter().enumerate() {
        incidence[e.a as usize].push((i as u32, e.b));
        incidence[e.b as usize].push((i as u32, e.a));
    }

    let left_boundary = (0..rows).map(|r| vid(r, 0)).collect();
    let right_boundary = (0..rows).map(|r| vid(r, cols - 1)).collect();

    Ok(GridRectangle {
        m,
        edges,
        incidence,
        left_boundary,
        right_boundary,
    })
}

impl GridRectangle {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.m * (self.m + 1)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn left_boundary(&self) -> &[u32] {
        &self.left_boundary
    }

    pub fn right_boundary(&self) -> &[u32] {
        &self.right_boundary
    }

    fn is_right(&self, v: u32) -> bool {
        v as usize % (self.m + 1) == self.m
    }

    /// Edges whose midpoint x-coordinate is at least the rectangle's center;
    /// exactly centered edges are included.
    pub fn right_half_edges(&self) -> Vec<usize> {
        let center = self.m as f64 / 2.0;
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| {
                let col_a = (e.a as usize % (self.m + 1)) as f64;
                let mid = match e.orientation {
                    Orientation::Horizontal => col_a + 0.5,
                    Orientation::Vertical => col_a,
                };
                mid >= center
            })
            .map(|(i, _)| i)
            .collect()
    }
}

/// Packed open/closed states of the grid's edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    words: Vec<u64>,
    len: usize,
}

impl Configuration {
    pub fn closed(len: usize) -> Configuration {
        Configuration {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn random(len: usize, rng: &mut impl Rng) -> Configuration {
        let mut cfg = Configuration::closed(len);
        for w in cfg.words.iter_mut() {
            *w = rng.random();
        }
        let tail = len % 64;
        if tail != 0 {
            *cfg.words.last_mut().unwrap() &= (1u64 << tail) - 1;
        }
        cfg
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, open: bool) {
        if open {
            self.words[i / 64] |= 1 << (i % 64);
        } else {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn count_open(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Little-endian byte hex dump; parse with [`Configuration::from_hex`].
    pub fn to_hex(&self) -> String {
        use std::fmt::Write;
        let mut s = String::with_capacity(self.len.div_ceil(8) * 2);
        for byte_idx in 0..self.len.div_ceil(8) {
            let byte = (self.words[byte_idx / 8] >> (8 * (byte_idx % 8))) & 0xff;
            write!(s, "{byte:02x}").unwrap();
        }
        s
    }

    pub fn from_hex(len: usize, hex: &str) -> Result<Configuration> {
        let bytes = len.div_ceil(8);
        if hex.len() != bytes * 2 {
            return Err(Error::parse(format!(
                "expected {} hex chars for {len} edges, got {}",
                bytes * 2,
                hex.len()
            )));
        }
        let mut cfg = Configuration::closed(len);
        for byte_idx in 0..bytes {
            let byte = u8::from_str_radix(&hex[2 * byte_idx..2 * byte_idx + 2], 16)
                .map_err(|e| Error::parse(format!("bad hex byte: {e}")))?;
            cfg.words[byte_idx / 8] |= (byte as u64) << (8 * (byte_idx % 8));
        }
        let tail = len % 64;
        if tail != 0 && cfg.words.last().unwrap() >> tail != 0 {
            return Err(Error::parse("hex string sets bits beyond the edge count"));
        }
        Ok(cfg)
    }
}

/// Serializes a configuration with its grid header, `m=<int> <hex>`.
pub fn write_configuration(grid: &GridRectangle, cfg: &Configuration) -> String {
    format!("m={} {}", grid.m, cfg.to_hex())
}

pub fn parse_configuration(text: &str) -> Result<(usize, Configuration)> {
    let mut parts = text.split_whitespace();
    let header = parts
        .next()
        .ok_or_else(|| Error::parse("empty configuration line"))?;
    let m: usize = header
        .strip_prefix("m=")
        .ok_or_else(|| Error::parse("configuration line must start with m=<int>"))?
        .parse()
        .map_err(|e| Error::parse(format!("bad m: {e}")))?;
    let hex = parts
        .next()
        .ok_or_else(|| Error::parse("missing hex payload"))?;
    let cfg = Configuration::from_hex(2 * m * m - 1, hex)?;
    Ok((m, cfg))
}

struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let mut ra = self.find(a);
        let mut rb = self.find(b);
        if ra == rb {
            return;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
    }
}

/// True iff the open edges connect some left-boundary vertex to some
/// right-boundary vertex. All left vertices are pre-merged into a virtual
/// source and all right vertices into a virtual sink.
pub fn has_crossing(grid: &GridRectangle, cfg: &Configuration) -> Result<bool> {
    if cfg.len() != grid.edge_count() {
        return Err(Error::contract(format!(
            "configuration has {} edges, grid has {}",
            cfg.len(),
            grid.edge_count()
        )));
    }
    let source = grid.vertex_count() as u32;
    let sink = source + 1;
    let mut uf = UnionFind::new(grid.vertex_count() + 2);
    for v in &grid.left_boundary {
        uf.union(source, *v);
    }
    for v in &grid.right_boundary {
        uf.union(sink, *v);
    }
    for (i, e) in grid.edges.iter().enumerate() {
        if cfg.get(i) {
            uf.union(e.a, e.b);
        }
    }
    Ok(uf.find(source) == uf.find(sink))
}

/// Exploration-based crossing detection: grows the left-connected cluster
/// breadth-first, querying each frontier edge exactly once through the
/// oracle, and never looking at an edge the decision does not depend on.
/// Returns `(crossed, visited)` with `visited` the queried edge indices in
/// query order. Frontier edges are processed in FIFO order.
pub fn explore_crossing(
    grid: &GridRectangle,
    mut edge_oracle: impl FnMut(usize) -> bool,
) -> (bool, Vec<usize>) {
    let mut in_cluster = vec![false; grid.vertex_count()];
    let mut queried = vec![false; grid.edge_count()];
    let mut visited = Vec::new();
    let mut queue = std::collections::VecDeque::new();

    for v in &grid.left_boundary {
        in_cluster[*v as usize] = true;
    }
    for v in &grid.left_boundary {
        for (e, other) in &grid.incidence[*v as usize] {
            if !in_cluster[*other as usize] {
                queue.push_back(*e);
            }
        }
    }

    let mut crossed = false;
    while let Some(e) = queue.pop_front() {
        if queried[e as usize] {
            continue;
        }
        let edge = grid.edges[e as usize];
        let outside = if in_cluster[edge.a as usize] {
            edge.b
        } else {
            edge.a
        };
        if in_cluster[outside as usize] {
            // Both ends joined the cluster since the edge was queued; it is
            // no longer a frontier edge and must not be queried.
            continue;
        }
        queried[e as usize] = true;
        visited.push(e as usize);
        if edge_oracle(e as usize) {
            in_cluster[outside as usize] = true;
            if grid.is_right(outside) {
                crossed = true;
            }
            for (next, other) in &grid.incidence[outside as usize] {
                if !in_cluster[*other as usize] && !queried[*next as usize] {
                    queue.push_back(*next);
                }
            }
        }
    }
    (crossed, visited)
}

/// Monte Carlo estimate of the crossing probability over uniform
/// configurations.
pub fn estimate_crossing(grid: &GridRectangle, samples: u64, seed: u64) -> Result<Estimate> {
    if samples == 0 {
        return Err(Error::contract("sample count must be at least 1"));
    }
    let hits: u64 = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i);
            let cfg = Configuration::random(grid.edge_count(), &mut rng);
            u64::from(has_crossing(grid, &cfg).expect("sizes match"))
        })
        .sum();
    Ok(Estimate::bernoulli(hits, samples, seed))
}

const EXACT_CROSSING_CAP: usize = 24;

/// Exact crossing probability by enumeration of all configurations; only
/// feasible for very small grids (m <= 3).
pub fn exact_crossing(grid: &GridRectangle) -> Result<f64> {
    let e = grid.edge_count();
    if e > EXACT_CROSSING_CAP {
        return Err(Error::Resource {
            what: format!("exact crossing enumeration over 2^{e} configurations"),
            cap: EXACT_CROSSING_CAP,
        });
    }
    let mut hits = 0u64;
    let mut cfg = Configuration::closed(e);
    for bits in 0..1u64 << e {
        cfg.words[0] = bits;
        if has_crossing(grid, &cfg)? {
            hits += 1;
        }
    }
    Ok(hits as f64 / (1u64 << e) as f64)
}

/// Flips each open/closed state independently with probability `eps`,
/// writing the result into `out`. `scratch` is a stamped scratch pad of
/// length >= edge count, reused across draws.
fn noisy_copy(
    src: &Configuration,
    eps: f64,
    out: &mut Configuration,
    scratch: &mut [u64],
    stamp: &mut u64,
    rng: &mut impl Rng,
) {
    out.words.copy_from_slice(&src.words);
    let n = src.len();
    let flips = Binomial::new(n as u64, eps).expect("valid p").sample(rng) as usize;
    if flips == 0 {
        return;
    }
    *stamp += 1;
    if 2 * flips > n {
        // Flip everything except a uniform (n - flips)-subset.
        let keep = n - flips;
        let mut kept = 0usize;
        while kept < keep {
            let j = rng.random_range(0..n);
            if scratch[j] != *stamp {
                scratch[j] = *stamp;
                kept += 1;
            }
        }
        for (j, s) in scratch.iter().enumerate().take(n) {
            if *s != *stamp {
                out.flip(j);
            }
        }
    } else {
        let mut done = 0usize;
        while done < flips {
            let j = rng.random_range(0..n);
            if scratch[j] != *stamp {
                scratch[j] = *stamp;
                out.flip(j);
                done += 1;
            }
        }
    }
}

/// Report of the nested noise-sensitivity experiment.
#[derive(Debug, Clone)]
pub struct SensitivityReport {
    pub m: usize,
    pub eps: f64,
    pub outer: u64,
    pub inner: u64,
    pub seed: u64,
    /// Mean of the per-configuration crossing predictions.
    pub p_bar: f64,
    /// `(delta, fraction of configurations with |p_hat - p_bar| > delta)`.
    pub gamma_hat: Vec<(f64, f64)>,
    /// `E[chi(x) chi(N_eps x)] - p_bar^2`, the proxy for `VAR(C_m, eps)`.
    pub covariance: f64,
    pub covariance_std_error: f64,
    /// Estimate of `P[exactly one of x, N_eps(x) crosses]` from the first
    /// inner draw of each configuration.
    pub switch_prob: f64,
    /// Inner-sampling noise `sqrt(p_bar (1 - p_bar) / inner)`; gamma_hat is
    /// inflated for deltas not well above 3x this value.
    pub inner_sigma: f64,
}

/// For `outer` uniform configurations x, estimates
/// `p_hat(x) = P[N_eps(x) in C | x]` from `inner` noise draws, and reports
/// the deviation fractions over `delta_grid` plus the covariance proxy for
/// `VAR(C_m, eps)`.
pub fn estimate_noise_sensitivity(
    grid: &GridRectangle,
    eps: f64,
    delta_grid: &[f64],
    outer: u64,
    inner: u64,
    seed: u64,
) -> Result<SensitivityReport> {
    if outer == 0 || inner == 0 {
        return Err(Error::contract(
            "outer and inner sample counts must be >= 1",
        ));
    }
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::contract(format!("eps {eps} outside [0, 1]")));
    }

    // Per configuration: (chi(x), p_hat(x), chi(x) p_hat(x), first-draw switch).
    let per_cfg: Vec<(f64, f64, f64, f64)> = (0..outer)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i);
            let e = grid.edge_count();
            let x = Configuration::random(e, &mut rng);
            let chi = f64::from(has_crossing(grid, &x).expect("sizes match"));
            let mut y = Configuration::closed(e, );
            let mut scratch = vec![0u64; e];
            let mut stamp = 0u64;
            let mut hits = 0u64;
            let mut first_switch = 0.0;
            for draw in 0..inner {
                noisy_copy(&x, eps, &mut y, &mut scratch, &mut stamp, &mut rng);
                let crossed = has_crossing(grid, &y).expect("sizes match");
                hits += u64::from(crossed);
                if draw == 0 {
                    first_switch = f64::from(crossed != (chi == 1.0));
                }
            }
            let p_hat = hits as f64 / inner as f64;
            (chi, p_hat, chi * p_hat, first_switch)
        })
        .collect();

    let nf = outer as f64;
    let p_bar = per_cfg.iter().map(|c| c.1).sum::<f64>() / nf;
    let prod_mean = per_cfg.iter().map(|c| c.2).sum::<f64>() / nf;
    let switch_prob = per_cfg.iter().map(|c| c.3).sum::<f64>() / nf;
    let covariance = prod_mean - p_bar * p_bar;

    // Delta-method error for cov = mean(a) - mean(p)^2 with correlated
    // per-sample pairs (a_i, p_i).
    let var_a = per_cfg
        .iter()
        .map(|c| (c.2 - prod_mean).powi(2))
        .sum::<f64>()
        / nf;
    let var_p = per_cfg.iter().map(|c| (c.1 - p_bar).powi(2)).sum::<f64>() / nf;
    let cov_ap = per_cfg
        .iter()
        .map(|c| (c.2 - prod_mean) * (c.1 - p_bar))
        .sum::<f64>()
        / nf;
    let var_c = (var_a + 4.0 * p_bar * p_bar * var_p - 4.0 * p_bar * cov_ap).max(0.0);
    let covariance_std_error = (var_c / nf).sqrt();

    let gamma_hat = delta_grid
        .iter()
        .map(|delta| {
            let frac =
                per_cfg.iter().filter(|c| (c.1 - p_bar).abs() > *delta).count() as f64 / nf;
            (*delta, frac)
        })
        .collect();

    Ok(SensitivityReport {
        m: grid.m,
        eps,
        outer,
        inner,
        seed,
        p_bar,
        gamma_hat,
        covariance,
        covariance_std_error,
        switch_prob,
        inner_sigma: (p_bar * (1.0 - p_bar) / inner as f64).sqrt(),
    })
}

/// Which edges the majority runs on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EdgeSubset {
    RightHalf,
    Explicit(Vec<usize>),
}

/// Monte Carlo mean of `chi_C(x) M_K(x)` over uniform configurations.
pub fn estimate_majority_correlation(
    grid: &GridRectangle,
    subset: &EdgeSubset,
    samples: u64,
    seed: u64,
) -> Result<Estimate> {
    if samples == 0 {
        return Err(Error::contract("sample count must be at least 1"));
    }
    let k: Vec<usize> = match subset {
        EdgeSubset::RightHalf => grid.right_half_edges(),
        EdgeSubset::Explicit(edges) => {
            if edges.iter().any(|e| *e >= grid.edge_count()) {
                return Err(Error::contract("edge index out of range"));
            }
            edges.clone()
        }
    };
    if k.is_empty() {
        return Err(Error::contract("edge subset must be nonempty"));
    }
    let size = k.len() as i64;

    let (sum, sum_sq) = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i);
            let cfg = Configuration::random(grid.edge_count(), &mut rng);
            let chi = f64::from(has_crossing(grid, &cfg).expect("sizes match"));
            let open = k.iter().filter(|e| cfg.get(**e)).count() as i64;
            let sign = (2 * open - size).signum() as f64;
            let v = chi * sign;
            (v, v * v)
        })
        .reduce(|| (0.0, 0.0), |x, y| (x.0 + y.0, x.1 + y.1));
    Ok(Estimate::from_sums(sum, sum_sq, samples, seed))
}

/// One dynamical-percolation trajectory.
#[derive(Debug, Clone)]
pub struct SwitchingRecord {
    pub duration: f64,
    pub switch_times: Vec<f64>,
    pub initial_state: bool,
    /// Crossing state at the end of the run.
    pub final_state: bool,
}

/// Runs the edge-rerandomization process: every edge flips at the events of
/// an independent Poisson clock of the given rate, simulated event by event
/// through the merged next-event clock (exponential interarrivals at the
/// total rate, uniform edge choice). Crossing is re-evaluated only when the
/// flipped edge could change it: by monotonicity an opened edge cannot
/// destroy a crossing and a closed one cannot create it.
pub fn run_dynamical(
    grid: &GridRectangle,
    duration: f64,
    rate: f64,
    seed: u64,
) -> Result<SwitchingRecord> {
    run_dynamical_stream(grid, duration, rate, seed, 0)
}

/// As [`run_dynamical`], on the ChaCha stream `(seed, stream)`; replica
/// drivers use one stream per replica.
pub fn run_dynamical_stream(
    grid: &GridRectangle,
    duration: f64,
    rate: f64,
    seed: u64,
    stream: u64,
) -> Result<SwitchingRecord> {
    if duration <= 0.0 || rate <= 0.0 {
        return Err(Error::contract("duration and rate must be positive"));
    }
    let mut rng = stream_rng(seed, stream);
    let e = grid.edge_count();
    let mut cfg = Configuration::random(e, &mut rng);
    let initial_state = has_crossing(grid, &cfg)?;
    let mut state = initial_state;
    let total_rate = rate * e as f64;

    let mut t = 0.0f64;
    let mut switch_times = Vec::new();
    loop {
        let u: f64 = rng.random();
        t += -(1.0 - u).ln() / total_rate;
        if t > duration {
            break;
        }
        let edge = rng.random_range(0..e);
        cfg.flip(edge);
        let opened = cfg.get(edge);
        if opened != state {
            let now = has_crossing(grid, &cfg)?;
            if now != state {
                switch_times.push(t);
                state = now;
            }
        }
    }
    Ok(SwitchingRecord {
        duration,
        switch_times,
        initial_state,
        final_state: state,
    })
}

/// Switch-count records for independent replicas, one RNG stream each.
pub fn dynamical_replicas(
    grid: &GridRectangle,
    duration: f64,
    rate: f64,
    replicas: u64,
    seed: u64,
) -> Result<Vec<SwitchingRecord>> {
    if replicas == 0 {
        return Err(Error::contract("replica count must be at least 1"));
    }
    (0..replicas)
        .into_par_iter()
        .map(|i| run_dynamical_stream(grid, duration, rate, seed, i))
        .collect()
}

/// One-arm diagnostic: the probability that the middle left-boundary vertex
/// is connected to Chebyshev distance at least `radius` (in lattice units).
pub fn one_arm_probability(
    grid: &GridRectangle,
    radius: usize,
    samples: u64,
    seed: u64,
) -> Result<Estimate> {
    if samples == 0 {
        return Err(Error::contract("sample count must be at least 1"));
    }
    let cols = grid.m + 1;
    let start = ((grid.m / 2) * cols) as u32;
    let (sr, sc) = ((start as usize / cols) as i64, (start as usize % cols) as i64);

    let hits: u64 = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i);
            let cfg = Configuration::random(grid.edge_count(), &mut rng);
            let mut seen = vec![false; grid.vertex_count()];
            let mut stack = vec![start];
            seen[start as usize] = true;
            while let Some(v) = stack.pop() {
                let (r, c) = ((v as usize / cols) as i64, (v as usize % cols) as i64);
                if (r - sr).abs().max((c - sc).abs()) >= radius as i64 {
                    return 1u64;
                }
                for (e, other) in &grid.incidence[v as usize] {
                    if cfg.get(*e as usize) && !seen[*other as usize] {
                        seen[*other as usize] = true;
                        stack.push(*other);
                    }
                }
            }
            0u64
        })
        .sum();
    Ok(Estimate::bernoulli(hits, samples, seed))
}
