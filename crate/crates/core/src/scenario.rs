//! Problem instances: topology, per-satellite demand and compute capacity,
//! layer weights and hop limits, plus the JSON scenario schema.
//!
//! All volumes are held internally in Gbit per slot. Rates in a document
//! (link capacities in Gbit/s, compute in cycles/s) are multiplied by the
//! slot duration when loaded.

use std::path::{Path, PathBuf};

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constellation::{NodeId, Topology, TopologyDocument, WalkerStar};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Objective weights for computing locally, on another satellite, and on the ground.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Weights<T> {
    pub local: T,
    pub intersat: T,
    pub ground: T,
}

impl<T: Scalar> Weights<T> {
    pub fn reference() -> Self {
        Weights {
            local: T::lit(0.6),
            intersat: T::lit(0.3),
            ground: T::lit(0.1),
        }
    }
}

/// Maximum edge count of inter-satellite and satellite-to-ground routes.
/// The SGL edge counts toward the ground limit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HopLimits {
    pub intersat: usize,
    pub ground: usize,
}

impl HopLimits {
    pub fn uniform(h: usize) -> Self {
        HopLimits {
            intersat: h,
            ground: h,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario<T> {
    topology: Topology<T>,
    demands: Vec<T>,
    compute: Vec<T>,
    weights: Weights<T>,
    hops: HopLimits,
    slot_duration: T,
}

impl<T: Scalar> Scenario<T> {
    /// `demands` and `compute` are indexed by satellite, satellite `i` at position `i - 1`.
    pub fn new(
        topology: Topology<T>,
        demands: Vec<T>,
        compute: Vec<T>,
        weights: Weights<T>,
        hops: HopLimits,
        slot_duration: T,
    ) -> Result<Self> {
        let n = topology.num_satellites();
        if demands.len() != n || compute.len() != n {
            return Err(Error::InvalidParameter(format!(
                "expected {n} demands and capacities, got {} and {}",
                demands.len(),
                compute.len()
            )));
        }
        if let Some((i, d)) = demands
            .iter()
            .enumerate()
            .find(|(_, d)| !(d.is_finite() && **d >= T::zero()))
        {
            return Err(Error::InvalidParameter(format!(
                "demand of satellite {} must be finite and nonnegative, got {d}",
                i + 1
            )));
        }
        if let Some((i, c)) = compute
            .iter()
            .enumerate()
            .find(|(_, c)| !(c.is_finite() && **c > T::zero()))
        {
            return Err(Error::InvalidParameter(format!(
                "compute capacity of satellite {} must be positive, got {c}",
                i + 1
            )));
        }
        for (name, w) in [
            ("local", weights.local),
            ("intersat", weights.intersat),
            ("ground", weights.ground),
        ] {
            if !(w.is_finite() && w >= T::zero()) {
                return Err(Error::InvalidParameter(format!(
                    "weight {name} must be nonnegative"
                )));
            }
        }
        if !(slot_duration.is_finite() && slot_duration > T::zero()) {
            return Err(Error::InvalidParameter(
                "slot_duration must be positive".into(),
            ));
        }
        Ok(Scenario {
            topology,
            demands,
            compute,
            weights,
            hops,
            slot_duration,
        })
    }

    pub fn topology(&self) -> &Topology<T> {
        &self.topology
    }

    pub fn demands(&self) -> &[T] {
        &self.demands
    }

    pub fn compute_capacities(&self) -> &[T] {
        &self.compute
    }

    #[inline]
    pub fn demand(&self, sat: NodeId) -> T {
        self.demands[sat.index() - 1]
    }

    #[inline]
    pub fn compute(&self, sat: NodeId) -> T {
        self.compute[sat.index() - 1]
    }

    pub fn weights(&self) -> Weights<T> {
        self.weights
    }

    pub fn hops(&self) -> HopLimits {
        self.hops
    }

    pub fn slot_duration(&self) -> T {
        self.slot_duration
    }

    pub fn with_hops(mut self, hops: HopLimits) -> Self {
        self.hops = hops;
        self
    }

    pub fn with_demands(self, demands: Vec<T>) -> Result<Self> {
        Scenario::new(
            self.topology,
            demands,
            self.compute,
            self.weights,
            self.hops,
            self.slot_duration,
        )
    }

    pub fn with_weights(mut self, weights: Weights<T>) -> Self {
        self.weights = weights;
        self
    }

    /// Serialises to a self-contained document (explicit topology, demands and capacities).
    pub fn to_document(&self) -> ScenarioDocument {
        let topo = self.topology.to_document();
        let topo = TopologyDocument {
            planes: topo.planes,
            sats_per_plane: topo.sats_per_plane,
            seam_wrap: topo.seam_wrap,
            duplex_mode: topo.duplex_mode,
            nodes: topo.nodes,
            edges: topo
                .edges
                .into_iter()
                .map(|e| crate::constellation::EdgeEntry {
                    a: e.a,
                    b: e.b,
                    kind: e.kind,
                    capacity: e.capacity.as_f64(),
                })
                .collect(),
            gateways: topo.gateways,
        };
        ScenarioDocument {
            topology: TopologySpec::Explicit(topo),
            demands: DemandSpec::Explicit(self.demands.iter().map(|d| d.as_f64()).collect()),
            capacities: CapacitySpec {
                compute: Some(self.compute.iter().map(|c| c.as_f64()).collect()),
                ..CapacitySpec::default()
            },
            weights: [
                self.weights.local.as_f64(),
                self.weights.intersat.as_f64(),
                self.weights.ground.as_f64(),
            ],
            hops: [self.hops.intersat, self.hops.ground],
            slot_duration: Some(self.slot_duration.as_f64()),
        }
    }
}

/// `C_i = c_i / η`, scaled to one slot.
pub fn derive_compute_capacity<T: Scalar>(
    cycles_per_sec: T,
    processing_density: T,
    slot_duration: T,
) -> Result<T> {
    if !(cycles_per_sec > T::zero() && processing_density > T::zero() && slot_duration > T::zero())
    {
        return Err(Error::InvalidParameter(
            "cycles_per_sec, processing_density and slot_duration must be positive".into(),
        ));
    }
    Ok(cycles_per_sec / processing_density * slot_duration)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DataUnit {
    Gbit,
    /// Gigabyte, converted to Gbit by a factor of 8.
    GB,
}

impl DataUnit {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "Gbit" | "gbit" | "Gb" => Ok(DataUnit::Gbit),
            "GB" | "gbyte" | "GByte" => Ok(DataUnit::GB),
            other => Err(Error::UnknownUnit(other.to_string())),
        }
    }

    pub fn to_gbit(self) -> f64 {
        match self {
            DataUnit::Gbit => 1.0,
            DataUnit::GB => 8.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DataUnit::Gbit => "Gbit",
            DataUnit::GB => "GB",
        }
    }
}

/// Interpretation of [`DemandModel::sigma`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SigmaMode {
    /// Standard deviation of the underlying normal.
    #[default]
    Log,
    /// Standard deviation of the demand itself, in the demand unit.
    Absolute,
}

/// Lognormal demand model with a distribution mean of `mean`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DemandModel {
    pub mean: f64,
    pub sigma: f64,
    pub seed: u64,
    pub unit: DataUnit,
    pub sigma_mode: SigmaMode,
}

impl DemandModel {
    pub fn new(mean: f64, sigma: f64, seed: u64) -> Self {
        DemandModel {
            mean,
            sigma,
            seed,
            unit: DataUnit::Gbit,
            sigma_mode: SigmaMode::Log,
        }
    }

    /// Location and scale of the underlying normal.
    pub fn log_params(&self) -> (f64, f64) {
        let sigma = match self.sigma_mode {
            SigmaMode::Log => self.sigma,
            SigmaMode::Absolute => (1.0 + (self.sigma / self.mean).powi(2)).ln().sqrt(),
        };
        (self.mean.ln() - 0.5 * sigma * sigma, sigma)
    }
}

/// Portable normal-variate stream.
///
/// The bit stream is ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
/// `seed_from_u64(seed)`. Each uniform takes the top 53 bits of one `next_u64`
/// output: `u = ((x >> 11) + 1) * 2^-53`, so `u` lies in `(0, 1]`. Normals
/// come in Box-Muller pairs from two consecutive uniforms `u1, u2`:
/// `r = sqrt(-2 ln u1)`, `z0 = r cos(2π u2)`, `z1 = r sin(2π u2)`, emitted in
/// that order.
pub struct NormalStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl NormalStream {
    pub fn new(seed: u64) -> Self {
        NormalStream {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    pub fn next_uniform(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        (((self.rng.next_u64() >> 11) + 1) as f64) * SCALE
    }

    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.next_uniform();
        let u2 = self.next_uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }
}

/// Draws `n` demands in Gbit.
pub fn generate_demands(model: &DemandModel, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "demand count must be positive".into(),
        ));
    }
    if !(model.mean.is_finite() && model.mean > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "demand mean must be positive, got {}",
            model.mean
        )));
    }
    if !(model.sigma.is_finite() && model.sigma >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "demand sigma must be nonnegative, got {}",
            model.sigma
        )));
    }
    let scale = model.unit.to_gbit();
    if model.sigma == 0.0 {
        return Ok(vec![model.mean * scale; n]);
    }
    let (mu, sigma) = model.log_params();
    let mut stream = NormalStream::new(model.seed);
    Ok((0..n)
        .map(|_| (mu + sigma * stream.next_normal()).exp() * scale)
        .collect())
}

// ---------------------------------------------------------------------------
// Document schema

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    pub topology: TopologySpec,
    pub demands: DemandSpec,
    pub capacities: CapacitySpec,
    pub weights: [f64; 3],
    pub hops: [usize; 2],
    /// Seconds; defaults to 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slot_duration: Option<f64>,
}

/// Walker parameters, an explicit graph (capacities in Gbit per slot), or a
/// path to a JSON topology document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TopologySpec {
    File { file: PathBuf },
    Explicit(TopologyDocument<f64>),
    Walker(WalkerSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WalkerSpec {
    pub planes: usize,
    pub sats_per_plane: usize,
    pub gateway_phase: usize,
    #[serde(default = "default_true")]
    pub seam_wrap: bool,
    #[serde(default)]
    pub duplex: crate::constellation::DuplexMode,
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DemandSpec {
    /// Gbit per satellite, in satellite order.
    Explicit(Vec<f64>),
    Model(DemandModelSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandModelSpec {
    pub mean: f64,
    pub sigma: f64,
    pub seed: u64,
    #[serde(default = "default_unit")]
    pub unit: String,
    #[serde(default)]
    pub sigma_mode: SigmaMode,
}

fn default_unit() -> String {
    "Gbit".to_string()
}

impl DemandModelSpec {
    pub fn model(&self) -> Result<DemandModel> {
        Ok(DemandModel {
            mean: self.mean,
            sigma: self.sigma,
            seed: self.seed,
            unit: DataUnit::parse(&self.unit)?,
            sigma_mode: self.sigma_mode,
        })
    }
}

/// Link rates in Gbit/s (Walker topologies only) and compute either as a rate
/// pair or as an explicit per-satellite list in Gbit per slot.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapacitySpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub isl: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sgl: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycles_per_sec: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub processing_density: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compute: Option<Vec<f64>>,
}

impl ScenarioDocument {
    /// 6x5 torus, 5/1 Gbit/s links, 10^9 cycles/s at 10^8 cycles/Gbit,
    /// weights (0.6, 0.3, 0.1), lognormal demand with mean 20 and log-sigma 1.3.
    pub fn reference(seed: u64, hops: usize) -> Self {
        ScenarioDocument {
            topology: TopologySpec::Walker(WalkerSpec {
                planes: 6,
                sats_per_plane: 5,
                gateway_phase: 0,
                seam_wrap: true,
                duplex: Default::default(),
            }),
            demands: DemandSpec::Model(DemandModelSpec {
                mean: 20.0,
                sigma: 1.3,
                seed,
                unit: default_unit(),
                sigma_mode: SigmaMode::Log,
            }),
            capacities: CapacitySpec {
                isl: Some(5.0),
                sgl: Some(1.0),
                cycles_per_sec: Some(1e9),
                processing_density: Some(1e8),
                compute: None,
            },
            weights: [0.6, 0.3, 0.1],
            hops: [hops, hops],
            slot_duration: None,
        }
    }

    /// Replaces the demand seed when demands come from a model.
    pub fn set_seed(&mut self, seed: u64) {
        if let DemandSpec::Model(m) = &mut self.demands {
            m.seed = seed;
        }
    }

    pub fn set_demand_mean(&mut self, mean: f64) {
        if let DemandSpec::Model(m) = &mut self.demands {
            m.mean = mean;
        }
    }

    pub fn set_hops(&mut self, hops: HopLimits) {
        self.hops = [hops.intersat, hops.ground];
    }
}

/// Validates a document and builds the scenario. `base_dir` resolves relative
/// topology file references.
pub fn load_scenario<T: Scalar>(
    doc: &ScenarioDocument,
    base_dir: Option<&Path>,
) -> Result<Scenario<T>> {
    let slot = doc.slot_duration.unwrap_or(1.0);
    if !(slot.is_finite() && slot > 0.0) {
        return Err(Error::Schema(format!(
            "slot_duration must be positive, got {slot}"
        )));
    }

    let topology: Topology<T> = match &doc.topology {
        TopologySpec::Walker(w) => {
            let (isl, sgl) = match (doc.capacities.isl, doc.capacities.sgl) {
                (Some(i), Some(s)) => (i, s),
                _ => {
                    return Err(Error::Schema(
                        "capacities.isl and capacities.sgl are required for a walker topology"
                            .into(),
                    ))
                }
            };
            WalkerStar {
                planes: w.planes,
                sats_per_plane: w.sats_per_plane,
                gateway_phase: w.gateway_phase,
                seam_wrap: w.seam_wrap,
                isl_capacity: T::lit(isl * slot),
                sgl_capacity: T::lit(sgl * slot),
                duplex: w.duplex,
            }
            .build()?
        }
        TopologySpec::Explicit(t) => topology_from_f64_document(t)?,
        TopologySpec::File { file } => {
            let path = match base_dir {
                Some(dir) if file.is_relative() => dir.join(file),
                _ => file.clone(),
            };
            let text = std::fs::read_to_string(&path).map_err(|e| {
                Error::Schema(format!(
                    "unknown topology reference {}: {e}",
                    path.display()
                ))
            })?;
            let t: TopologyDocument<f64> = serde_json::from_str(&text)?;
            topology_from_f64_document(&t)?
        }
    };
    let n = topology.num_satellites();

    let demands: Vec<f64> = match &doc.demands {
        DemandSpec::Explicit(d) => d.clone(),
        DemandSpec::Model(m) => generate_demands(&m.model()?, n)?,
    };
    if demands.len() != n {
        return Err(Error::Schema(format!(
            "expected {n} demands, got {}",
            demands.len()
        )));
    }
    if let Some(d) = demands.iter().find(|d| !(d.is_finite() && **d >= 0.0)) {
        return Err(Error::Schema(format!(
            "demand must be nonnegative, got {d}"
        )));
    }

    let compute: Vec<f64> = match (&doc.capacities.compute, doc.capacities.cycles_per_sec, doc.capacities.processing_density) {
        (Some(list), None, None) => list.clone(),
        (None, Some(c), Some(eta)) => vec![derive_compute_capacity(c, eta, slot)?; n],
        _ => {
            return Err(Error::Schema(
                "give either capacities.compute or both capacities.cycles_per_sec and capacities.processing_density"
                    .into(),
            ))
        }
    };
    if compute.len() != n {
        return Err(Error::Schema(format!(
            "expected {n} compute capacities, got {}",
            compute.len()
        )));
    }

    let [a, b, c] = doc.weights;
    Scenario::new(
        topology,
        demands.into_iter().map(T::lit).collect(),
        compute.into_iter().map(T::lit).collect(),
        Weights {
            local: T::lit(a),
            intersat: T::lit(b),
            ground: T::lit(c),
        },
        HopLimits {
            intersat: doc.hops[0],
            ground: doc.hops[1],
        },
        T::lit(slot),
    )
    .map_err(|e| match e {
        Error::InvalidParameter(msg) => Error::Schema(msg),
        other => other,
    })
}

pub fn load_scenario_str<T: Scalar>(json: &str, base_dir: Option<&Path>) -> Result<Scenario<T>> {
    let doc: ScenarioDocument =
        serde_json::from_str(json).map_err(|e| Error::Schema(e.to_string()))?;
    load_scenario(&doc, base_dir)
}

pub fn load_scenario_file<T: Scalar>(path: &Path) -> Result<Scenario<T>> {
    let text = std::fs::read_to_string(path)?;
    load_scenario_str(&text, path.parent())
}

fn topology_from_f64_document<T: Scalar>(doc: &TopologyDocument<f64>) -> Result<Topology<T>> {
    let converted = TopologyDocument {
        planes: doc.planes,
        sats_per_plane: doc.sats_per_plane,
        seam_wrap: doc.seam_wrap,
        duplex_mode: doc.duplex_mode,
        nodes: doc.nodes.clone(),
        edges: doc
            .edges
            .iter()
            .map(|e| crate::constellation::EdgeEntry {
                a: e.a,
                b: e.b,
                kind: e.kind,
                capacity: T::lit(e.capacity),
            })
            .collect(),
        gateways: doc.gateways.clone(),
    };
    Topology::from_document(&converted)
}
