//! Place-cell codes from simulated navigation of a unit-square arena with
//! rectangular obstacles.

use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::code::{CodeMatrix, Codeword};
use crate::error::{Error, Result};

pub type Point = [f64; 2];

const EPS: f64 = 1e-12;

fn dist(p: Point, q: Point) -> f64 {
    (p[0] - q[0]).hypot(p[1] - q[1])
}

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Rect { x0, y0, x1, y1 }
    }

    /// Square of side `side` centred on `(cx, cy)`.
    pub fn centered(cx: f64, cy: f64, side: f64) -> Self {
        let h = side / 2.0;
        Rect::new(cx - h, cy - h, cx + h, cy + h)
    }

    pub fn contains(&self, p: Point) -> bool {
        p[0] >= self.x0 && p[0] <= self.x1 && p[1] >= self.y0 && p[1] <= self.y1
    }

    fn contains_strictly(&self, p: Point) -> bool {
        p[0] > self.x0 + EPS && p[0] < self.x1 - EPS && p[1] > self.y0 + EPS && p[1] < self.y1 - EPS
    }

    fn overlaps(&self, o: &Rect) -> bool {
        self.x0 <= o.x1 && o.x0 <= self.x1 && self.y0 <= o.y1 && o.y0 <= self.y1
    }

    pub fn corners(&self) -> [Point; 4] {
        [
            [self.x0, self.y0],
            [self.x1, self.y0],
            [self.x1, self.y1],
            [self.x0, self.y1],
        ]
    }

    /// Whether the segment `pq` passes through the interior. Grazing an
    /// edge or a corner does not count.
    pub fn blocks(&self, p: Point, q: Point) -> bool {
        let d = [q[0] - p[0], q[1] - p[1]];
        let (mut t0, mut t1) = (0.0f64, 1.0f64);
        for (delta, lo, hi, start) in [(d[0], self.x0, self.x1, p[0]), (d[1], self.y0, self.y1, p[1])] {
            if delta.abs() < EPS {
                if start < lo || start > hi {
                    return false;
                }
                continue;
            }
            let (a, b) = ((lo - start) / delta, (hi - start) / delta);
            t0 = t0.max(a.min(b));
            t1 = t1.min(a.max(b));
            if t0 > t1 {
                return false;
            }
        }
        let t = (t0 + t1) / 2.0;
        self.contains_strictly([p[0] + t * d[0], p[1] + t * d[1]])
    }
}

/// The unit square `[0, 1]²` with obstacles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    holes: Vec<Rect>,
}

impl Environment {
    /// Holes must be non-degenerate, pairwise disjoint and strictly inside
    /// the square; the free space is then connected.
    pub fn new(holes: Vec<Rect>) -> Result<Self> {
        for (i, h) in holes.iter().enumerate() {
            if !(h.x0 > 0.0 && h.y0 > 0.0 && h.x1 < 1.0 && h.y1 < 1.0 && h.x0 < h.x1 && h.y0 < h.y1) {
                return Err(Error::Config(format!(
                    "hole {h:?} is not strictly inside the unit square"
                )));
            }
            if holes[..i].iter().any(|o| o.overlaps(h)) {
                return Err(Error::Config(format!("hole {h:?} touches another hole")));
            }
        }
        Ok(Environment { holes })
    }

    pub fn holes(&self) -> &[Rect] {
        &self.holes
    }

    pub fn is_free(&self, p: Point) -> bool {
        (0.0..=1.0).contains(&p[0]) && (0.0..=1.0).contains(&p[1]) && !self.holes.iter().any(|h| h.contains(p))
    }

    pub fn visible(&self, p: Point, q: Point) -> bool {
        !self.holes.iter().any(|h| h.blocks(p, q))
    }

    pub fn random_free_point(&self, rng: &mut impl Rng) -> Point {
        loop {
            let p = [rng.random::<f64>(), rng.random::<f64>()];
            if self.is_free(p) {
                return p;
            }
        }
    }
}

/// Standard layouts: `n_holes` square holes of side [`HOLE_SIDE`]. One hole
/// sits in the centre, two side by side, three in a triangle.
pub fn make_environment(n_holes: usize) -> Result<Environment> {
    let centers: &[(f64, f64)] = match n_holes {
        0 => &[],
        1 => &[(0.5, 0.5)],
        2 => &[(0.28, 0.5), (0.72, 0.5)],
        3 => &[(0.27, 0.29), (0.73, 0.29), (0.5, 0.72)],
        _ => return Err(Error::Config(format!("n_holes must be 0..=3, got {n_holes}"))),
    };
    Environment::new(centers.iter().map(|&(x, y)| Rect::centered(x, y, HOLE_SIDE)).collect())
}

/// Side of the standard square holes in meters.
pub const HOLE_SIDE: f64 = 0.3;

/// Shortest-path distances around the obstacles. Shortest paths among
/// convex polygonal obstacles bend only at obstacle corners, so distances
/// are exact on the visibility graph of the corners.
#[derive(Clone, Debug)]
pub struct Geodesic {
    env: Environment,
    corners: Vec<Point>,
    targets: Vec<Point>,
    /// `to_target[t][c]`: distance from corner `c` to target `t`.
    to_target: Vec<Vec<f64>>,
}

impl Geodesic {
    pub fn new(env: &Environment, targets: &[Point]) -> Self {
        let corners: Vec<Point> = env.holes.iter().flat_map(Rect::corners).collect();
        let k = corners.len();
        let mut edge = vec![vec![f64::INFINITY; k]; k];
        for a in 0..k {
            for b in 0..k {
                if a == b {
                    edge[a][b] = 0.0;
                } else if env.visible(corners[a], corners[b]) {
                    edge[a][b] = dist(corners[a], corners[b]);
                }
            }
        }
        let to_target = targets
            .iter()
            .map(|&t| {
                let mut d: Vec<f64> = corners
                    .iter()
                    .map(|&c| if env.visible(c, t) { dist(c, t) } else { f64::INFINITY })
                    .collect();
                // Dijkstra on a dense graph with at most a dozen nodes
                let mut done = vec![false; k];
                for _ in 0..k {
                    let Some(u) = (0..k).filter(|&u| !done[u]).min_by(|&x, &y| d[x].total_cmp(&d[y])) else {
                        break;
                    };
                    done[u] = true;
                    for v in 0..k {
                        d[v] = d[v].min(d[u] + edge[u][v]);
                    }
                }
                d
            })
            .collect();
        Geodesic {
            env: env.clone(),
            corners,
            targets: targets.to_vec(),
            to_target,
        }
    }

    /// Distance from `p` to every target; `cutoff` skips targets whose
    /// straight-line distance already exceeds it (reported as infinity).
    pub fn distances(&self, p: Point, cutoff: f64, out: &mut Vec<f64>) {
        let visible: Vec<(usize, f64)> = self
            .corners
            .iter()
            .enumerate()
            .filter(|(_, &c)| self.env.visible(p, c))
            .map(|(i, &c)| (i, dist(p, c)))
            .collect();
        out.clear();
        out.extend(self.targets.iter().zip(&self.to_target).map(|(&t, via)| {
            let direct = dist(p, t);
            if direct > cutoff {
                f64::INFINITY
            } else if self.env.visible(p, t) {
                direct
            } else {
                visible.iter().map(|&(i, d)| d + via[i]).fold(f64::INFINITY, f64::min)
            }
        }));
    }

    pub fn distance(&self, p: Point, target: usize) -> f64 {
        let mut out = Vec::new();
        self.distances(p, f64::INFINITY, &mut out);
        out[target]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaceCellField {
    pub center: Point,
    pub width: f64,
    /// Firing probability per window at the centre, or a rate in Hz under
    /// [`SpikeModel::Poisson`].
    pub peak: f64,
}

/// How field centres are spread over the free space.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Placement {
    /// Independent uniform draws.
    Uniform,
    /// Uniform draws that keep away from earlier centres, so the fields
    /// cover the arena without large gaps.
    #[default]
    Spread,
}

/// `count` fields with centres in the free space.
pub fn sample_place_cells(
    env: &Environment,
    count: usize,
    width: f64,
    peak: f64,
    placement: Placement,
    rng: &mut impl Rng,
) -> Result<Vec<PlaceCellField>> {
    if count == 0 || width.is_nan() || width <= 0.0 || peak.is_nan() || peak <= 0.0 {
        return Err(Error::Config(format!(
            "need at least one cell with positive width and peak (got {count}, {width}, {peak})"
        )));
    }
    let centers = match placement {
        Placement::Uniform => (0..count).map(|_| env.random_free_point(rng)).collect(),
        Placement::Spread => spread_centers(env, count, rng),
    };
    Ok(centers
        .into_iter()
        .map(|center| PlaceCellField { center, width, peak })
        .collect())
}

/// Candidates drawn per centre by [`Placement::Spread`].
pub const SPREAD_CANDIDATES: usize = 5;

/// Best-candidate sampling: each new centre is the uniform candidate
/// farthest from the centres placed so far.
fn spread_centers(env: &Environment, count: usize, rng: &mut impl Rng) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::with_capacity(count);
    while out.len() < count {
        let mut best = (env.random_free_point(rng), -1.0);
        for k in 0..SPREAD_CANDIDATES {
            let p = if k == 0 { best.0 } else { env.random_free_point(rng) };
            let gap = out.iter().map(|&q| dist(p, q)).fold(f64::INFINITY, f64::min);
            if gap > best.1 {
                best = (p, gap);
            }
        }
        out.push(best.0);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrajectoryConfig {
    /// Seconds.
    pub duration: f64,
    pub dt: f64,
    /// Mean speed in m/s.
    pub speed_mean: f64,
    pub speed_std: f64,
    pub speed_coherence_time: f64,
    /// Rad/s.
    pub rotational_velocity_std: f64,
    pub rotational_velocity_coherence_time: f64,
    pub seed: u64,
}

impl Default for TrajectoryConfig {
    fn default() -> Self {
        TrajectoryConfig {
            duration: 20.0 * 60.0,
            dt: 0.01,
            speed_mean: 0.08,
            speed_std: 0.08,
            speed_coherence_time: 0.7,
            rotational_velocity_std: 120f64.to_radians(),
            rotational_velocity_coherence_time: 0.08,
            seed: 0,
        }
    }
}

impl TrajectoryConfig {
    pub fn n_steps(&self) -> usize {
        (self.duration / self.dt + 1e-9).floor() as usize
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.duration >= self.dt) {
            return Err(Error::Config(format!(
                "need dt > 0 and duration >= dt (got dt={}, duration={})",
                self.dt, self.duration
            )));
        }
        let nonneg = [self.speed_mean, self.speed_std, self.rotational_velocity_std];
        let pos = [self.speed_coherence_time, self.rotational_velocity_coherence_time];
        if nonneg.iter().any(|v| v.is_nan() || *v < 0.0) || pos.iter().any(|v| v.is_nan() || *v <= 0.0) {
            return Err(Error::Config(
                "speed and rotation parameters must be non-negative, coherence times positive".into(),
            ));
        }
        Ok(())
    }
}

/// One exact step of an Ornstein-Uhlenbeck process.
struct Ou {
    mean: f64,
    decay: f64,
    noise: f64,
}

impl Ou {
    fn new(mean: f64, std: f64, tau: f64, dt: f64) -> Self {
        let decay = (-dt / tau).exp();
        Ou {
            mean,
            decay,
            noise: std * (1.0 - decay * decay).sqrt(),
        }
    }

    fn step(&self, x: f64, rng: &mut impl Rng) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        self.mean + (x - self.mean) * self.decay + self.noise * z
    }
}

/// Positions at every `dt` step, starting from a random free point. Speed
/// and rotational velocity follow OU processes; the animal reflects off
/// walls and obstacles.
pub fn simulate_trajectory(env: &Environment, cfg: &TrajectoryConfig) -> Result<Vec<Point>> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(1);
    let speed_ou = Ou::new(cfg.speed_mean, cfg.speed_std, cfg.speed_coherence_time, cfg.dt);
    let turn_ou = Ou::new(
        0.0,
        cfg.rotational_velocity_std,
        cfg.rotational_velocity_coherence_time,
        cfg.dt,
    );

    let mut pos = env.random_free_point(&mut rng);
    let mut heading = rng.random::<f64>() * std::f64::consts::TAU;
    let mut speed = cfg.speed_mean;
    let mut omega = 0.0;
    let n = cfg.n_steps();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(pos);
        speed = speed_ou.step(speed, &mut rng);
        omega = turn_ou.step(omega, &mut rng);
        heading += omega * cfg.dt;
        let step = speed.abs() * cfg.dt;
        let (mut dx, mut dy) = (step * heading.cos(), step * heading.sin());
        // axis-by-axis moves so every obstacle face reflects one component
        if !env.is_free([pos[0] + dx, pos[1]]) {
            dx = -dx;
            heading = std::f64::consts::PI - heading;
        }
        if env.is_free([pos[0] + dx, pos[1]]) {
            pos[0] += dx;
        }
        if !env.is_free([pos[0], pos[1] + dy]) {
            dy = -dy;
            heading = -heading;
        }
        if env.is_free([pos[0], pos[1] + dy]) {
            pos[1] += dy;
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpikeModel {
    /// The Gaussian is the firing probability per window.
    #[default]
    Bernoulli,
    /// The Gaussian is a rate in Hz; a window fires if it holds a spike.
    Poisson,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CodeConfig {
    /// Trajectory steps per window.
    pub window_steps: usize,
    pub dt: f64,
    pub spike_model: SpikeModel,
    pub seed: u64,
}

/// Binary code with one row per window: neuron `i` fires with probability
/// `peak · exp(-d² / 2σ²)` for the geodesic distance `d` to its centre,
/// averaged over the window's positions.
pub fn generate_code(
    env: &Environment,
    fields: &[PlaceCellField],
    positions: &[Point],
    cfg: &CodeConfig,
) -> Result<CodeMatrix> {
    if fields.is_empty() || positions.is_empty() || cfg.window_steps == 0 {
        return Err(Error::InvalidInput(
            "need fields, positions and a positive window".into(),
        ));
    }
    if let Some(p) = positions.iter().find(|p| !env.is_free(**p)) {
        return Err(Error::InvalidInput(format!("position {p:?} is outside the free space")));
    }
    let centers: Vec<Point> = fields.iter().map(|f| f.center).collect();
    let geo = Geodesic::new(env, &centers);
    let cutoff = 8.0 * fields.iter().map(|f| f.width).fold(0.0, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(2);

    let n = fields.len();
    let mut d = Vec::with_capacity(n);
    let mut p = vec![0.0; n];
    let mut rows = Vec::with_capacity(positions.len() / cfg.window_steps + 1);
    for window in positions.chunks(cfg.window_steps) {
        p.iter_mut().for_each(|v| *v = 0.0);
        for &x in window {
            geo.distances(x, cutoff, &mut d);
            for (acc, (f, &di)) in p.iter_mut().zip(fields.iter().zip(&d)) {
                if di.is_finite() {
                    *acc += (-di * di / (2.0 * f.width * f.width)).exp();
                }
            }
        }
        let mut c = Codeword::zeros(n);
        for (i, (f, &g)) in fields.iter().zip(&p).enumerate() {
            let g = g / window.len() as f64;
            let prob = match cfg.spike_model {
                SpikeModel::Bernoulli => (f.peak * g).min(1.0),
                SpikeModel::Poisson => 1.0 - (-f.peak * g * cfg.dt * window.len() as f64).exp(),
            };
            if prob > 0.0 && rng.random::<f64>() < prob {
                c.set(i, true);
            }
        }
        rows.push(c);
    }
    CodeMatrix::from_codewords(n, rows)
}

/// Parameters for a full simulation, readable from TOML.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub n_holes: usize,
    pub n_cells: usize,
    /// Field width σ_f in meters.
    pub field_width: f64,
    pub peak: f64,
    pub placement: Placement,
    pub spike_model: SpikeModel,
    /// Window length in seconds; a multiple of the trajectory step.
    pub window: f64,
    pub seed: u64,
    pub trajectory: TrajectoryConfig,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n_holes: 1,
            n_cells: 40,
            field_width: 0.15,
            peak: 0.8,
            placement: Placement::Spread,
            spike_model: SpikeModel::Bernoulli,
            window: 0.01,
            seed: 0,
            trajectory: TrajectoryConfig::default(),
        }
    }
}

impl SimConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    fn window_steps(&self) -> Result<usize> {
        let ratio = self.window / self.trajectory.dt;
        let steps = ratio.round();
        if !(steps >= 1.0 && (ratio - steps).abs() < 1e-6) {
            return Err(Error::Config(format!(
                "window {} must be a positive multiple of dt {}",
                self.window, self.trajectory.dt
            )));
        }
        Ok(steps as usize)
    }
}

#[derive(Clone, Debug)]
pub struct Simulation {
    pub env: Environment,
    pub fields: Vec<PlaceCellField>,
    pub positions: Vec<Point>,
    pub dt: f64,
    pub code: CodeMatrix,
}

/// Environment, fields, walk and code from one seed. Cells, walk and
/// spikes draw from separate streams of the same generator.
pub fn simulate(cfg: &SimConfig) -> Result<Simulation> {
    let env = make_environment(cfg.n_holes)?;
    let window_steps = cfg.window_steps()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let fields = sample_place_cells(&env, cfg.n_cells, cfg.field_width, cfg.peak, cfg.placement, &mut rng)?;
    let traj = TrajectoryConfig {
        seed: cfg.seed,
        ..cfg.trajectory
    };
    let positions = simulate_trajectory(&env, &traj)?;
    let code = generate_code(
        &env,
        &fields,
        &positions,
        &CodeConfig {
            window_steps,
            dt: traj.dt,
            spike_model: cfg.spike_model,
            seed: cfg.seed,
        },
    )?;
    Ok(Simulation {
        env,
        fields,
        positions,
        dt: traj.dt,
        code,
    })
}

pub fn write_positions<W: Write>(positions: &[Point], dt: f64, mut w: W) -> std::io::Result<()> {
    writeln!(w, "t,x,y")?;
    for (k, p) in positions.iter().enumerate() {
        writeln!(w, "{},{},{}", k as f64 * dt, p[0], p[1])?;
    }
    Ok(())
}
