//! Base-station array layouts, steering vectors, element patterns and the
//! user-side antenna model.
//!
//! Ports are numbered from 1 in the order the hardware reports them;
//! element vectors are indexed from 0 (`port - 1`).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub const CYLINDRICAL_ID: &str = "cylindrical-128";
pub const PLANAR_ID: &str = "planar-100";

const CYL_RINGS: usize = 4;
const CYL_POSITIONS_PER_RING: usize = 16;
const PLANAR_ROWS: usize = 4;
const PLANAR_COLUMNS: usize = 25;

pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

/// Unit vector at azimuth `az` (from +x towards +y) and elevation `el`.
pub fn direction(az: f64, el: f64) -> Vec3 {
    [el.cos() * az.cos(), el.cos() * az.sin(), el.sin()]
}

pub fn wavelength(freq_hz: f64) -> f64 {
    SPEED_OF_LIGHT / freq_hz
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarization {
    V,
    H,
}

/// Rotationally symmetric power pattern
/// `(1 − 1/R)·((1 + cos ψ)/2)^q + 1/R`, with ψ the angle off boresight and
/// R the linear front-to-back ratio: 1 on boresight, 1/R straight behind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CosinePowerPattern {
    pub exponent: f64,
    pub front_to_back_db: f64,
}

impl CosinePowerPattern {
    pub fn patch() -> Self {
        Self {
            exponent: 4.0,
            front_to_back_db: 10.0,
        }
    }

    pub fn handset() -> Self {
        Self {
            exponent: 4.0,
            front_to_back_db: 15.0,
        }
    }

    /// Power gain for a direction with `cos ψ = cos_off_boresight`.
    pub fn power(&self, cos_off_boresight: f64) -> f64 {
        let floor = 10f64.powf(-self.front_to_back_db / 10.0);
        let c = cos_off_boresight.clamp(-1.0, 1.0);
        (1.0 - floor) * ((1.0 + c) / 2.0).powf(self.exponent) + floor
    }

    pub fn amplitude(&self, cos_off_boresight: f64) -> f64 {
        self.power(cos_off_boresight).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Element {
    /// 1-based port number.
    pub port: usize,
    pub position: Vec3,
    pub boresight: Vec3,
    pub polarization: Option<Polarization>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrayGeometry {
    pub id: String,
    pub carrier_hz: f64,
    pub elements: Vec<Element>,
    /// Shared element pattern; `None` means isotropic elements.
    pub element_pattern: Option<CosinePowerPattern>,
    /// Physical element positions in traversal order, each listing the
    /// (0-based) ports mounted there.
    pub position_groups: Vec<Vec<usize>>,
    /// (V port, H port) pairs used for polarization-ratio statistics.
    pub pol_pairs: Vec<(usize, usize)>,
}

impl ArrayGeometry {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn wavelength(&self) -> f64 {
        wavelength(self.carrier_hz)
    }

    pub fn is_polarized(&self) -> bool {
        !self.elements.is_empty() && self.elements.iter().all(|e| e.polarization.is_some())
    }

    /// 0-based indices of the ports with polarization `pol`, ascending.
    pub fn ports_with(&self, pol: Polarization) -> Vec<usize> {
        self.elements
            .iter()
            .enumerate()
            .filter(|(_, e)| e.polarization == Some(pol))
            .map(|(i, _)| i)
            .collect()
    }

    /// Amplitude weight of element `index` towards `dir`.
    pub fn element_amplitude(&self, index: usize, dir: Vec3) -> f64 {
        match &self.element_pattern {
            Some(p) => p.amplitude(dot(self.elements[index].boresight, dir)),
            None => 1.0,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("geometry serializes")
    }

    fn check_invariants(&self) {
        debug_assert!(self
            .elements
            .iter()
            .enumerate()
            .all(|(i, e)| e.port == i + 1 && (norm(e.boresight) - 1.0).abs() < 1e-12));
    }
}

/// The 128-port cylinder: 4 rings of 16 dual-polarized patches, λ/2 apart
/// along the circumference and between rings, numbered from the lower ring
/// upwards with odd ports vertical and even ports horizontal.
pub fn build_cylindrical() -> ArrayGeometry {
    build_cylindrical_at(2.6e9)
}

pub fn build_cylindrical_at(carrier_hz: f64) -> ArrayGeometry {
    let half = wavelength(carrier_hz) / 2.0;
    let radius = cylinder_radius(carrier_hz);
    let mut elements = Vec::with_capacity(CYL_RINGS * CYL_POSITIONS_PER_RING * 2);
    let mut position_groups = Vec::new();
    let mut pol_pairs = Vec::new();
    for ring in 0..CYL_RINGS {
        for pos in 0..CYL_POSITIONS_PER_RING {
            let phi = 2.0 * PI * pos as f64 / CYL_POSITIONS_PER_RING as f64;
            let position = [radius * phi.cos(), radius * phi.sin(), ring as f64 * half];
            let boresight = [phi.cos(), phi.sin(), 0.0];
            let v = elements.len();
            for pol in [Polarization::V, Polarization::H] {
                elements.push(Element {
                    port: elements.len() + 1,
                    position,
                    boresight,
                    polarization: Some(pol),
                });
            }
            position_groups.push(vec![v, v + 1]);
            pol_pairs.push((v, v + 1));
        }
    }
    let g = ArrayGeometry {
        id: CYLINDRICAL_ID.into(),
        carrier_hz,
        elements,
        element_pattern: Some(CosinePowerPattern::patch()),
        position_groups,
        pol_pairs,
    };
    g.check_invariants();
    g
}

/// Radius giving λ/2 arc spacing between the 16 positions of a ring.
pub fn cylinder_radius(carrier_hz: f64) -> f64 {
    CYL_POSITIONS_PER_RING as f64 * (wavelength(carrier_hz) / 2.0) / (2.0 * PI)
}

/// Ring, position within ring and polarization of a 1-based cylinder port.
pub fn cylindrical_port_location(port: usize) -> Result<(usize, usize, Polarization)> {
    if port == 0 || port > CYL_RINGS * CYL_POSITIONS_PER_RING * 2 {
        return Err(Error::IndexOutOfRange {
            index: port,
            antennas: CYL_RINGS * CYL_POSITIONS_PER_RING * 2,
        });
    }
    let slot = (port - 1) / 2;
    let pol = if port % 2 == 1 {
        Polarization::V
    } else {
        Polarization::H
    };
    Ok((
        slot / CYL_POSITIONS_PER_RING,
        slot % CYL_POSITIONS_PER_RING,
        pol,
    ))
}

pub fn cylindrical_port(ring: usize, position: usize, pol: Polarization) -> Result<usize> {
    if ring >= CYL_RINGS || position >= CYL_POSITIONS_PER_RING {
        return Err(Error::InvalidArgument(format!(
            "no cylinder slot at ring {ring}, position {position}"
        )));
    }
    let slot = ring * CYL_POSITIONS_PER_RING + position;
    Ok(2 * slot + if pol == Polarization::V { 1 } else { 2 })
}

/// The 100-element planar array: 4 rows × 25 columns at λ/2 in the y–z
/// plane facing +x, polarization alternating along each row.
pub fn build_planar() -> ArrayGeometry {
    build_planar_at(3.7e9)
}

pub fn build_planar_at(carrier_hz: f64) -> ArrayGeometry {
    let d = wavelength(carrier_hz) / 2.0;
    let mut elements = Vec::with_capacity(PLANAR_ROWS * PLANAR_COLUMNS);
    let mut pol_pairs = Vec::new();
    for row in 0..PLANAR_ROWS {
        for col in 0..PLANAR_COLUMNS {
            let pol = if (row + col) % 2 == 0 {
                Polarization::V
            } else {
                Polarization::H
            };
            elements.push(Element {
                port: elements.len() + 1,
                position: [0.0, col as f64 * d, row as f64 * d],
                boresight: [1.0, 0.0, 0.0],
                polarization: Some(pol),
            });
        }
        // neighbouring columns form one V/H pair; the odd last column is left out
        for col in (0..PLANAR_COLUMNS - 1).step_by(2) {
            let a = row * PLANAR_COLUMNS + col;
            let b = a + 1;
            if elements[a].polarization == Some(Polarization::V) {
                pol_pairs.push((a, b));
            } else {
                pol_pairs.push((b, a));
            }
        }
    }
    let position_groups = (0..elements.len()).map(|i| vec![i]).collect();
    let g = ArrayGeometry {
        id: PLANAR_ID.into(),
        carrier_hz,
        elements,
        element_pattern: Some(CosinePowerPattern::patch()),
        position_groups,
        pol_pairs,
    };
    g.check_invariants();
    g
}

/// Uniform linear array of isotropic, untagged elements along +y with
/// spacing given in wavelengths.
pub fn build_linear(count: usize, spacing_wavelengths: f64, carrier_hz: f64) -> ArrayGeometry {
    let d = spacing_wavelengths * wavelength(carrier_hz);
    let elements = (0..count)
        .map(|i| Element {
            port: i + 1,
            position: [0.0, i as f64 * d, 0.0],
            boresight: [1.0, 0.0, 0.0],
            polarization: None,
        })
        .collect();
    ArrayGeometry {
        id: format!("linear-{count}"),
        carrier_hz,
        elements,
        element_pattern: None,
        position_groups: (0..count).map(|i| vec![i]).collect(),
        pol_pairs: Vec::new(),
    }
}

/// Resolves an array id as stored in tensor metadata.
pub fn geometry_for_id(id: &str) -> Result<ArrayGeometry> {
    match id {
        CYLINDRICAL_ID => Ok(build_cylindrical()),
        PLANAR_ID => Ok(build_planar()),
        other => other
            .strip_prefix("linear-")
            .and_then(|n| n.parse::<usize>().ok())
            .filter(|&n| n > 0)
            .map(|n| build_linear(n, 0.5, 2.6e9))
            .ok_or_else(|| Error::UnknownArray(other.to_string())),
    }
}

/// Per-element phase response `exp(−j2π(f/c)⟨r_m, Ω⟩)` to a plane wave
/// along the unit vector `dir`.
pub fn steering_vector(
    geometry: &ArrayGeometry,
    dir: Vec3,
    freq_hz: f64,
) -> Result<Vec<Complex64>> {
    if (norm(dir) - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "direction must be a unit vector, |d| = {}",
            norm(dir)
        )));
    }
    let k = 2.0 * PI * freq_hz / SPEED_OF_LIGHT;
    Ok(geometry
        .elements
        .iter()
        .map(|e| Complex64::from_polar(1.0, -k * dot(e.position, dir)))
        .collect())
}

/// How the user antenna radiates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UserPattern {
    Omni,
    /// Horizontal-boresight directive pattern; `tilt_deg` tilts the element
    /// away from vertical, which mixes its polarization.
    Directive {
        pattern: CosinePowerPattern,
        tilt_deg: f64,
    },
}

impl UserPattern {
    pub fn directive_default() -> Self {
        UserPattern::Directive {
            pattern: CosinePowerPattern::handset(),
            tilt_deg: 45.0,
        }
    }

    /// (V, H) excitation weights of the user antenna.
    pub fn polarization_weights(&self) -> (f64, f64) {
        match self {
            UserPattern::Omni => (1.0, 0.0),
            UserPattern::Directive { tilt_deg, .. } => {
                let t = tilt_deg.to_radians();
                (t.cos(), t.sin())
            }
        }
    }

    pub fn is_omni(&self) -> bool {
        matches!(self, UserPattern::Omni)
    }
}

/// User antenna: pattern plus its azimuth orientation per snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserAntenna {
    pub pattern: UserPattern,
    /// Boresight azimuth in radians for each snapshot.
    pub trajectory: Vec<f64>,
}

impl UserAntenna {
    pub fn omni(snapshots: usize) -> Self {
        Self {
            pattern: UserPattern::Omni,
            trajectory: vec![0.0; snapshots],
        }
    }

    /// Azimuth moving linearly from `initial` to `initial + total` over the
    /// snapshots.
    pub fn rotating(pattern: UserPattern, initial: f64, total: f64, snapshots: usize) -> Self {
        let trajectory = (0..snapshots)
            .map(|n| {
                if snapshots > 1 {
                    initial + total * n as f64 / (snapshots - 1) as f64
                } else {
                    initial
                }
            })
            .collect();
        Self {
            pattern,
            trajectory,
        }
    }

    /// Boresight direction at snapshot `n`.
    pub fn boresight(&self, n: usize) -> Result<Vec3> {
        let az = self.trajectory.get(n).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "snapshot {n} outside trajectory of {} snapshots",
                self.trajectory.len()
            ))
        })?;
        Ok(direction(*az, 0.0))
    }
}

/// Complex amplitude weight of the user antenna towards `dir` at snapshot `n`.
pub fn pattern_gain(user: &UserAntenna, n: usize, dir: Vec3) -> Result<Complex64> {
    let boresight = user.boresight(n)?;
    match &user.pattern {
        UserPattern::Omni => Ok(Complex64::new(1.0, 0.0)),
        UserPattern::Directive { pattern, .. } => {
            Ok(Complex64::new(pattern.amplitude(dot(boresight, dir)), 0.0))
        }
    }
}
