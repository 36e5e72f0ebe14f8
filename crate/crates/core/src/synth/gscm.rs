//! Simplified cluster-based geometric stochastic channel model with the
//! massive-MIMO extensions: 3D directions, cluster visibility that varies
//! along the array, and user-plane visibility regions.
//!
//! Clusters are drawn once per run. Each cluster is a bundle of multipath
//! components (MPCs) with Gaussian angular offsets around a base-station-side
//! and a user-side mean direction, exponential intra-cluster delays, log-normal
//! cluster shadowing and random 2×2 polarization coupling limited by the XPD.
//! A cluster contributes to a user only inside its visibility region, and to
//! an antenna element through a raised-cosine taper over the element index.
//! Users move on straight lines; the Doppler phase of every MPC follows from
//! its user-side direction, so time and frequency fading are spatially
//! consistent.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp, Normal};
use serde::{Deserialize, Serialize};

use super::complex_normal;
use super::seed::{rng_from, SeedPath, STREAM_CLUSTER, STREAM_ORIENTATION, STREAM_USER};
use crate::arrays::{
    direction, dot, norm, pattern_gain, steering_vector, ArrayGeometry, Polarization, UserAntenna,
    UserPattern, Vec3, SPEED_OF_LIGHT,
};
use crate::error::{Error, Result};
use crate::numeric::frequency_grid;
use crate::tensor::{ChannelTensor, Dims, TensorMeta};

/// Name of the built-in indoor parameter set.
pub const INDOOR_PRESET: &str = "indoor_closely_spaced_2_6ghz";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrajectoryConfig {
    pub speed_mps: f64,
    pub snapshot_rate_hz: f64,
    pub snapshots: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LayoutConfig {
    /// Horizontal distance from the array to the nominal user position.
    pub user_distance_m: f64,
    pub user_azimuth_deg: f64,
    /// User height relative to the array origin.
    pub user_height_m: f64,
    /// Users start uniformly inside a disc of this radius.
    pub user_spread_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusterConfig {
    pub count: usize,
    pub mpcs_per_cluster: usize,
    pub azimuth_spread_deg: f64,
    pub elevation_spread_deg: f64,
    /// Mean of the exponential intra-cluster excess delay.
    pub delay_spread_ns: f64,
    /// Cluster excess delays are uniform in [0, max_delay_ns].
    pub max_delay_ns: f64,
    /// Cluster power falls as exp(−τ/decay) with excess delay τ.
    pub power_decay_ns: f64,
    pub shadowing_std_db: f64,
    pub xpd_db: f64,
    /// Width of the azimuth sector, centred on the user, holding the
    /// base-station-side cluster directions.
    pub bs_sector_deg: f64,
    /// Cluster mean elevations are uniform in ±this.
    pub elevation_range_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LosConfig {
    /// LOS power over total mean cluster power; `-inf` disables LOS.
    pub k_factor_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VisibilityConfig {
    pub vr_radius_m: f64,
    /// Width of the raised-cosine edge inside each region.
    pub vr_transition_m: f64,
    /// Region centres are uniform in a disc of this radius around the
    /// nominal user position.
    pub vr_area_radius_m: f64,
    /// Raised-cosine roll-off length along the array, in elements.
    pub taper_length_elements: f64,
    /// Fully-visible share of the array per cluster.
    pub array_fraction: f64,
    /// Re-evaluate region membership at every snapshot instead of once at
    /// the start position.
    pub track_motion: bool,
}

/// A fixed cluster, used instead of random draws when listed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterSpec {
    pub bs_azimuth_deg: f64,
    pub bs_elevation_deg: f64,
    pub user_azimuth_deg: f64,
    pub user_elevation_deg: f64,
    pub excess_delay_ns: f64,
    pub power_db: f64,
    /// Visibility-region centre in the horizontal plane.
    pub vr_center_m: [f64; 2],
    /// Element index at the centre of the visible part of the array.
    pub array_center: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GscmConfig {
    pub name: String,
    pub seed: u64,
    pub carrier_hz: f64,
    pub bandwidth_hz: f64,
    pub freqs: usize,
    pub users: usize,
    pub trajectory: TrajectoryConfig,
    pub layout: LayoutConfig,
    pub clusters: ClusterConfig,
    pub los: LosConfig,
    pub visibility: VisibilityConfig,
    pub explicit_clusters: Vec<ClusterSpec>,
}

impl Default for TrajectoryConfig {
    fn default() -> Self {
        Self {
            speed_mps: 0.25,
            snapshot_rate_hz: 50.0,
            snapshots: 300,
        }
    }
}

impl Default for LayoutConfig {
    fn default() -> Self {
        Self {
            user_distance_m: 10.0,
            user_azimuth_deg: 0.0,
            user_height_m: -0.5,
            user_spread_m: 1.0,
        }
    }
}

impl Default for ClusterConfig {
    fn default() -> Self {
        Self {
            count: 15,
            mpcs_per_cluster: 20,
            azimuth_spread_deg: 10.0,
            elevation_spread_deg: 5.0,
            delay_spread_ns: 40.0,
            max_delay_ns: 500.0,
            power_decay_ns: 150.0,
            shadowing_std_db: 3.0,
            xpd_db: 8.0,
            bs_sector_deg: 180.0,
            elevation_range_deg: 15.0,
        }
    }
}

impl Default for LosConfig {
    fn default() -> Self {
        Self { k_factor_db: -3.0 }
    }
}

impl Default for VisibilityConfig {
    fn default() -> Self {
        Self {
            vr_radius_m: 5.0,
            vr_transition_m: 0.5,
            vr_area_radius_m: 7.0,
            taper_length_elements: 32.0,
            array_fraction: 0.5,
            track_motion: false,
        }
    }
}

impl Default for GscmConfig {
    fn default() -> Self {
        Self::indoor_closely_spaced_2_6ghz()
    }
}

impl GscmConfig {
    /// Built-in indoor stand-in parameter set (not fitted to measurements).
    pub fn indoor_closely_spaced_2_6ghz() -> Self {
        Self {
            name: INDOOR_PRESET.into(),
            seed: 0,
            carrier_hz: 2.6e9,
            bandwidth_hz: 40e6,
            freqs: 129,
            users: 3,
            trajectory: TrajectoryConfig::default(),
            layout: LayoutConfig::default(),
            clusters: ClusterConfig::default(),
            los: LosConfig::default(),
            visibility: VisibilityConfig::default(),
            explicit_clusters: Vec::new(),
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            INDOOR_PRESET => Ok(Self::indoor_closely_spaced_2_6ghz()),
            other => Err(Error::InvalidConfig(format!("unknown preset '{other}'"))),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    // Negated comparisons also reject NaN.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        let c = &self.clusters;
        let v = &self.visibility;
        if self.freqs == 0 || self.users == 0 || self.trajectory.snapshots == 0 {
            return bad("freqs, users and snapshots must be >= 1");
        }
        if !(self.carrier_hz > 0.0) || !(self.bandwidth_hz >= 0.0) {
            return bad("carrier must be positive and bandwidth non-negative");
        }
        if !(self.trajectory.snapshot_rate_hz > 0.0) || !(self.trajectory.speed_mps >= 0.0) {
            return bad("snapshot rate must be positive and speed non-negative");
        }
        if self.explicit_clusters.is_empty() && c.count == 0 {
            return bad("cluster count must be >= 1");
        }
        if c.mpcs_per_cluster == 0 {
            return bad("mpcs_per_cluster must be >= 1");
        }
        let spreads = [
            c.azimuth_spread_deg,
            c.elevation_spread_deg,
            c.delay_spread_ns,
            c.max_delay_ns,
            c.shadowing_std_db,
            c.bs_sector_deg,
            c.elevation_range_deg,
            self.layout.user_spread_m,
            v.vr_radius_m,
            v.vr_transition_m,
            v.vr_area_radius_m,
        ];
        if spreads.iter().any(|s| !(*s >= 0.0) || !s.is_finite()) {
            return bad("spreads, ranges and radii must be finite and >= 0");
        }
        if !(c.power_decay_ns > 0.0) {
            return bad("power_decay_ns must be positive");
        }
        if !c.xpd_db.is_finite() {
            return bad("xpd_db must be finite");
        }
        if !(v.taper_length_elements >= 1.0) {
            return bad("taper length must be >= 1 element");
        }
        if !(v.array_fraction > 0.0 && v.array_fraction <= 1.0) {
            return bad("array_fraction must lie in (0, 1]");
        }
        if self.los.k_factor_db.is_nan() || self.los.k_factor_db == f64::INFINITY {
            return bad("k_factor_db must be finite or -inf");
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct Mpc {
    bs_dir: Vec3,
    user_dir: Vec3,
    delay: f64,
    amplitude: f64,
    /// Polarization coupling [vv, vh, hv, hh] (BS port, user excitation).
    pol: [Complex64; 4],
}

#[derive(Debug, Clone)]
struct Cluster {
    vr_center: [f64; 2],
    array_center: f64,
    mpcs: Vec<Mpc>,
}

#[derive(Debug, Clone)]
struct Scene {
    nominal_user: Vec3,
    clusters: Vec<Cluster>,
    /// Linear K-factor, 0 without LOS.
    k_factor: f64,
    /// Sum of all cluster powers; LOS reference when no cluster is visible.
    total_power: f64,
}

fn db_to_lin(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

fn uniform_in_disc<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> [f64; 2] {
    let r = radius * rng.gen::<f64>().sqrt();
    let a = 2.0 * PI * rng.gen::<f64>();
    [r * a.cos(), r * a.sin()]
}

fn symmetric<R: Rng + ?Sized>(rng: &mut R, half_width: f64) -> f64 {
    (2.0 * rng.gen::<f64>() - 1.0) * half_width
}

impl Scene {
    fn build(config: &GscmConfig, antennas: usize) -> Result<Self> {
        let c = &config.clusters;
        let lay = &config.layout;
        let user_az = lay.user_azimuth_deg.to_radians();
        let nominal_user = [
            lay.user_distance_m * user_az.cos(),
            lay.user_distance_m * user_az.sin(),
            lay.user_height_m,
        ];
        let los_delay = norm(nominal_user) / SPEED_OF_LIGHT;
        let root = SeedPath::root(config.seed).child(STREAM_CLUSTER);
        let az_spread = Normal::new(0.0, c.azimuth_spread_deg.to_radians())
            .map_err(|e| Error::InvalidConfig(e.to_string()))?;
        let el_spread = Normal::new(0.0, c.elevation_spread_deg.to_radians())
            .map_err(|e| Error::InvalidConfig(e.to_string()))?;
        let shadowing = Normal::new(0.0, c.shadowing_std_db)
            .map_err(|e| Error::InvalidConfig(e.to_string()))?;
        let intra_delay = (c.delay_spread_ns > 0.0)
            .then(|| Exp::new(1.0 / (c.delay_spread_ns * 1e-9)))
            .transpose()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?;
        let xpd = db_to_lin(-c.xpd_db).sqrt();

        let explicit = !config.explicit_clusters.is_empty();
        let count = if explicit {
            config.explicit_clusters.len()
        } else {
            c.count
        };
        let mut clusters = Vec::with_capacity(count);
        let mut total_power = 0.0;
        for ci in 0..count {
            let node = root.child(ci as u64);
            let mut rng = rng_from(node);
            // mean directions, excess delay, power, regions
            let (bs_az, bs_el, us_az, us_el, excess, power, vr_center, array_center) = if explicit {
                let s = &config.explicit_clusters[ci];
                (
                    s.bs_azimuth_deg.to_radians(),
                    s.bs_elevation_deg.to_radians(),
                    s.user_azimuth_deg.to_radians(),
                    s.user_elevation_deg.to_radians(),
                    s.excess_delay_ns * 1e-9,
                    db_to_lin(s.power_db),
                    s.vr_center_m,
                    s.array_center,
                )
            } else {
                let el_range = c.elevation_range_deg.to_radians();
                let bs_az = user_az + symmetric(&mut rng, c.bs_sector_deg.to_radians() / 2.0);
                let bs_el = symmetric(&mut rng, el_range);
                let us_az = symmetric(&mut rng, PI);
                let us_el = symmetric(&mut rng, el_range);
                let excess = rng.gen::<f64>() * c.max_delay_ns * 1e-9;
                let shadow: f64 = shadowing.sample(&mut rng);
                let power = db_to_lin(shadow) * (-excess / (c.power_decay_ns * 1e-9)).exp();
                let offset = uniform_in_disc(&mut rng, config.visibility.vr_area_radius_m);
                let vr_center = [nominal_user[0] + offset[0], nominal_user[1] + offset[1]];
                let array_center = rng.gen::<f64>() * (antennas.max(1) - 1) as f64;
                (
                    bs_az,
                    bs_el,
                    us_az,
                    us_el,
                    excess,
                    power,
                    vr_center,
                    array_center,
                )
            };
            total_power += power;
            let amplitude = (power / c.mpcs_per_cluster as f64).sqrt();
            let mpcs = (0..c.mpcs_per_cluster)
                .map(|p| {
                    let mut rng = rng_from(node.child(p as u64));
                    let bs_dir = direction(
                        bs_az + az_spread.sample(&mut rng),
                        bs_el + el_spread.sample(&mut rng),
                    );
                    let user_dir = direction(
                        us_az + az_spread.sample(&mut rng),
                        us_el + el_spread.sample(&mut rng),
                    );
                    let extra = intra_delay.map_or(0.0, |d| d.sample(&mut rng));
                    let pol = [
                        complex_normal(&mut rng),
                        complex_normal(&mut rng) * xpd,
                        complex_normal(&mut rng) * xpd,
                        complex_normal(&mut rng),
                    ];
                    Mpc {
                        bs_dir,
                        user_dir,
                        delay: los_delay + excess + extra,
                        amplitude,
                        pol,
                    }
                })
                .collect();
            clusters.push(Cluster {
                vr_center,
                array_center,
                mpcs,
            });
        }
        Ok(Scene {
            nominal_user,
            clusters,
            k_factor: db_to_lin(config.los.k_factor_db),
            total_power,
        })
    }
}

/// Amplitude gain of a visibility region at horizontal distance `d`.
fn region_gain(d: f64, radius: f64, transition: f64) -> f64 {
    if d >= radius {
        0.0
    } else if transition <= 0.0 || d <= radius - transition {
        1.0
    } else {
        0.5 * (1.0 + (PI * (d - (radius - transition)) / transition).cos())
    }
}

/// Raised-cosine visibility of a cluster at element index `m`.
fn array_taper(m: usize, center: f64, half_width: f64, taper: f64) -> f64 {
    let excess = (m as f64 - center).abs() - half_width;
    if excess <= 0.0 {
        1.0
    } else if excess >= taper {
        0.0
    } else {
        0.5 * (1.0 + (PI * excess / taper).cos())
    }
}

#[derive(Debug, Clone, Copy)]
struct UserMotion {
    start: Vec3,
    velocity: Vec3,
}

fn draw_motion(config: &GscmConfig, scene: &Scene, user: usize) -> UserMotion {
    let mut rng = rng_from(
        SeedPath::root(config.seed)
            .child(STREAM_USER)
            .child(user as u64),
    );
    let offset = uniform_in_disc(&mut rng, config.layout.user_spread_m);
    let heading = symmetric(&mut rng, PI);
    let v = config.trajectory.speed_mps;
    UserMotion {
        start: [
            scene.nominal_user[0] + offset[0],
            scene.nominal_user[1] + offset[1],
            scene.nominal_user[2],
        ],
        velocity: [v * heading.cos(), v * heading.sin(), 0.0],
    }
}

/// Random initial orientation and total rotation, both uniform in [−π, π),
/// for user `user` under `config.seed`. Omni and directive users on the same
/// seed get the same draws.
pub fn draw_user_antenna(config: &GscmConfig, pattern: &UserPattern, user: usize) -> UserAntenna {
    let mut rng = rng_from(
        SeedPath::root(config.seed)
            .child(STREAM_ORIENTATION)
            .child(user as u64),
    );
    let initial = -PI + 2.0 * PI * rng.gen::<f64>();
    let total = -PI + 2.0 * PI * rng.gen::<f64>();
    UserAntenna::rotating(*pattern, initial, total, config.trajectory.snapshots)
}

fn synthesize_user(
    config: &GscmConfig,
    geometry: &ArrayGeometry,
    scene: &Scene,
    motion: UserMotion,
    antenna: &UserAntenna,
) -> Result<Vec<Complex64>> {
    let antennas = geometry.len();
    let freqs = config.freqs;
    let snapshots = config.trajectory.snapshots;
    if antenna.trajectory.len() < snapshots {
        return Err(Error::InvalidArgument(format!(
            "user trajectory covers {} of {snapshots} snapshots",
            antenna.trajectory.len()
        )));
    }
    let grid = frequency_grid(freqs, config.bandwidth_hz);
    let k = 2.0 * PI * geometry.carrier_hz / SPEED_OF_LIGHT;
    let (w_v, w_h) = antenna.pattern.polarization_weights();
    let vis = &config.visibility;
    let half_width = vis.array_fraction * antennas as f64 / 2.0;
    let position = |n: usize| -> Vec3 {
        let t = n as f64 / config.trajectory.snapshot_rate_hz;
        [
            motion.start[0] + motion.velocity[0] * t,
            motion.start[1] + motion.velocity[1] * t,
            motion.start[2] + motion.velocity[2] * t,
        ]
    };
    let region = |cluster: &Cluster, x: Vec3| -> f64 {
        let d =
            ((x[0] - cluster.vr_center[0]).powi(2) + (x[1] - cluster.vr_center[1]).powi(2)).sqrt();
        region_gain(d, vis.vr_radius_m, vis.vr_transition_m)
    };
    let port_pol: Vec<Polarization> = geometry
        .elements
        .iter()
        .map(|e| e.polarization.unwrap_or(Polarization::V))
        .collect();

    // Base-station side coefficients, one row of M per active MPC.
    let mut active: Vec<(&Cluster, &Mpc)> = Vec::new();
    let mut bs_rows: Vec<Complex64> = Vec::new();
    for cluster in &scene.clusters {
        if !vis.track_motion && region(cluster, motion.start) == 0.0 {
            continue;
        }
        let taper: Vec<f64> = (0..antennas)
            .map(|m| {
                array_taper(
                    m,
                    cluster.array_center,
                    half_width,
                    vis.taper_length_elements,
                )
            })
            .collect();
        if taper.iter().all(|t| *t == 0.0) {
            continue;
        }
        for mpc in &cluster.mpcs {
            let steer = steering_vector(geometry, mpc.bs_dir, geometry.carrier_hz)?;
            let co = mpc.pol[0] * w_v + mpc.pol[1] * w_h;
            let cross = mpc.pol[2] * w_v + mpc.pol[3] * w_h;
            bs_rows.extend((0..antennas).map(|m| {
                let pol = match port_pol[m] {
                    Polarization::V => co,
                    Polarization::H => cross,
                };
                steer[m]
                    * pol
                    * (mpc.amplitude * taper[m] * geometry.element_amplitude(m, mpc.bs_dir))
            }));
            active.push((cluster, mpc));
        }
    }
    let paths = active.len();
    let delay_phase: Vec<Complex64> = active
        .iter()
        .flat_map(|(_, mpc)| {
            grid.iter()
                .map(move |f| Complex64::from_polar(1.0, -2.0 * PI * f * mpc.delay))
        })
        .collect();

    let los_amplitude = los_amplitude(
        geometry,
        scene,
        antenna,
        motion.start,
        &active,
        &bs_rows,
        |c| region(c, motion.start),
        (w_v, w_h),
        &port_pol,
    )?;

    let block = freqs * antennas;
    let mut out = vec![Complex64::new(0.0, 0.0); snapshots * block];
    let mut user_side = vec![Complex64::new(0.0, 0.0); freqs * paths];
    for n in 0..snapshots {
        let x = position(n);
        let moved = [
            x[0] - motion.start[0],
            x[1] - motion.start[1],
            x[2] - motion.start[2],
        ];
        for (p, (cluster, mpc)) in active.iter().enumerate() {
            let visibility = if vis.track_motion {
                region(cluster, x)
            } else {
                region(cluster, motion.start)
            };
            let u = pattern_gain(antenna, n, mpc.user_dir)?
                * Complex64::from_polar(visibility, k * dot(moved, mpc.user_dir));
            for f in 0..freqs {
                user_side[f * paths + p] = u * delay_phase[p * freqs + f];
            }
        }
        let target = &mut out[n * block..(n + 1) * block];
        if paths > 0 {
            complex_gemm(freqs, paths, antennas, &user_side, &bs_rows, target);
        }
        if los_amplitude > 0.0 {
            add_los(
                geometry,
                los_amplitude,
                antenna,
                n,
                x,
                &grid,
                (w_v, w_h),
                &port_pol,
                target,
            )?;
        }
    }
    Ok(out)
}

/// LOS amplitude giving the configured K-factor against the diffuse power
/// the user sees at its start position, averaged over the array and over
/// MPC phases. Falls back to the total cluster power when nothing is
/// visible.
#[allow(clippy::too_many_arguments)]
fn los_amplitude(
    geometry: &ArrayGeometry,
    scene: &Scene,
    antenna: &UserAntenna,
    start: Vec3,
    active: &[(&Cluster, &Mpc)],
    bs_rows: &[Complex64],
    visibility: impl Fn(&Cluster) -> f64,
    (w_v, w_h): (f64, f64),
    port_pol: &[Polarization],
) -> Result<f64> {
    if scene.k_factor == 0.0 {
        return Ok(0.0);
    }
    let antennas = geometry.len();
    let mut diffuse = 0.0;
    for (p, (cluster, mpc)) in active.iter().enumerate() {
        let u = pattern_gain(antenna, 0, mpc.user_dir)?.norm_sqr() * visibility(cluster).powi(2);
        let row: f64 = bs_rows[p * antennas..(p + 1) * antennas]
            .iter()
            .map(|b| b.norm_sqr())
            .sum();
        diffuse += u * row / antennas as f64;
    }
    let distance = norm(start);
    let dir = [
        start[0] / distance,
        start[1] / distance,
        start[2] / distance,
    ];
    let user = pattern_gain(antenna, 0, [-dir[0], -dir[1], -dir[2]])?.norm_sqr();
    let unit: f64 = (0..antennas)
        .map(|m| {
            let pol = match port_pol[m] {
                Polarization::V => w_v,
                Polarization::H => w_h,
            };
            (pol * geometry.element_amplitude(m, dir)).powi(2) * user
        })
        .sum::<f64>()
        / antennas as f64;
    if diffuse > 0.0 && unit > 0.0 {
        Ok((scene.k_factor * diffuse / unit).sqrt())
    } else {
        Ok((scene.k_factor * scene.total_power).sqrt())
    }
}

#[allow(clippy::too_many_arguments)]
fn add_los(
    geometry: &ArrayGeometry,
    amplitude: f64,
    antenna: &UserAntenna,
    n: usize,
    x: Vec3,
    grid: &[f64],
    (w_v, w_h): (f64, f64),
    port_pol: &[Polarization],
    target: &mut [Complex64],
) -> Result<()> {
    let distance = norm(x);
    let dir = [x[0] / distance, x[1] / distance, x[2] / distance];
    let steer = steering_vector(geometry, dir, geometry.carrier_hz)?;
    let k = 2.0 * PI * geometry.carrier_hz / SPEED_OF_LIGHT;
    let user = pattern_gain(antenna, n, [-dir[0], -dir[1], -dir[2]])?;
    let common = user * Complex64::from_polar(amplitude, -k * distance);
    let bs: Vec<Complex64> = (0..geometry.len())
        .map(|m| {
            let pol = match port_pol[m] {
                Polarization::V => w_v,
                Polarization::H => w_h,
            };
            steer[m] * (pol * geometry.element_amplitude(m, dir))
        })
        .collect();
    let antennas = geometry.len();
    for (f, row) in target.chunks_exact_mut(antennas).enumerate() {
        let w =
            common * Complex64::from_polar(1.0, -2.0 * PI * grid[f] * distance / SPEED_OF_LIGHT);
        for (h, b) in row.iter_mut().zip(&bs) {
            *h += w * b;
        }
    }
    Ok(())
}

/// `c = a · b` for row-major complex matrices a (m×k) and b (k×n).
fn complex_gemm(
    m: usize,
    k: usize,
    n: usize,
    a: &[Complex64],
    b: &[Complex64],
    c: &mut [Complex64],
) {
    assert!(a.len() == m * k && b.len() == k * n && c.len() == m * n);
    // SAFETY: Complex64 is #[repr(C)] { re, im } and therefore layout
    // compatible with [f64; 2]; the slices are exactly m×k, k×n and m×n.
    unsafe {
        matrixmultiply::zgemm(
            matrixmultiply::CGemmOption::Standard,
            matrixmultiply::CGemmOption::Standard,
            m,
            k,
            n,
            [1.0, 0.0],
            a.as_ptr() as *const [f64; 2],
            k as isize,
            1,
            b.as_ptr() as *const [f64; 2],
            n as isize,
            1,
            [0.0, 0.0],
            c.as_mut_ptr() as *mut [f64; 2],
            n as isize,
            1,
        );
    }
}

fn gscm_meta(config: &GscmConfig, geometry: &ArrayGeometry) -> TensorMeta {
    TensorMeta {
        carrier_freq_hz: geometry.carrier_hz,
        bandwidth_hz: config.bandwidth_hz,
        snapshot_rate_hz: config.trajectory.snapshot_rate_hz,
        scenario_label: config.name.clone(),
        array_id: geometry.id.clone(),
    }
}

/// All `config.users` users, each with the given pattern and a randomly
/// drawn orientation trajectory.
pub fn gen_gscm(
    config: &GscmConfig,
    geometry: &ArrayGeometry,
    pattern: &UserPattern,
) -> Result<ChannelTensor> {
    let users: Vec<UserAntenna> = (0..config.users)
        .map(|k| draw_user_antenna(config, pattern, k))
        .collect();
    gen_gscm_with_users(config, geometry, &users)
}

/// Single-user tensor for user index `user` of the run described by
/// `config`; identical to that user's slice of [`gen_gscm`].
pub fn gen_gscm_user(
    config: &GscmConfig,
    geometry: &ArrayGeometry,
    pattern: &UserPattern,
    user: usize,
) -> Result<ChannelTensor> {
    config.validate()?;
    let scene = Scene::build(config, geometry.len())?;
    let antenna = draw_user_antenna(config, pattern, user);
    let samples = synthesize_user(
        config,
        geometry,
        &scene,
        draw_motion(config, &scene, user),
        &antenna,
    )?;
    ChannelTensor::new(
        Dims::new(1, config.trajectory.snapshots, config.freqs, geometry.len()),
        samples,
        gscm_meta(config, geometry),
    )
}

/// One user per entry of `users`, with explicit antennas and trajectories.
pub fn gen_gscm_with_users(
    config: &GscmConfig,
    geometry: &ArrayGeometry,
    users: &[UserAntenna],
) -> Result<ChannelTensor> {
    config.validate()?;
    if users.is_empty() || geometry.is_empty() {
        return Err(Error::InvalidArgument(
            "need at least one user and one element".into(),
        ));
    }
    let scene = Scene::build(config, geometry.len())?;
    let mut samples = Vec::new();
    for (k, antenna) in users.iter().enumerate() {
        samples.extend(synthesize_user(
            config,
            geometry,
            &scene,
            draw_motion(config, &scene, k),
            antenna,
        )?);
    }
    ChannelTensor::new(
        Dims::new(
            users.len(),
            config.trajectory.snapshots,
            config.freqs,
            geometry.len(),
        ),
        samples,
        gscm_meta(config, geometry),
    )
}
