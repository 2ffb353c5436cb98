//! Run configuration: one JSON document, every field optional.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::CliError;
use crate::delta::{DeficiencyCandidate, MultiIndex};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Function fed to the Plancherel ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestFunctionKind {
    /// `exp(−(x² + y² + z²))`
    Gaussian,
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeodesicConfig {
    /// Rays `t ↦ Φ(t, θ₀, t·h₀)` as `[θ₀, h₀]` pairs.
    pub rays: Vec<[f64; 2]>,
    pub t_max: f64,
    pub samples: usize,
}

impl Default for GeodesicConfig {
    fn default() -> Self {
        GeodesicConfig { rays: vec![[0.0, 0.0], [0.5, 1.0], [1.0, 2.0], [2.0, -3.0]], t_max: 2.0, samples: 20 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Hermite truncations of the Plancherel refinement ladder.
    pub truncation_ladder: Vec<usize>,
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// λ-nodes per sign.
    pub lambda_nodes: usize,
    pub box_halfwidth: f64,
    pub spatial_nodes: usize,
    pub xi_nodes: usize,
    pub test_function: TestFunctionKind,
    pub fd_step: f64,
    pub r_nodes: usize,
    /// Deficiency candidate as `"a1,a2,a3" → [re, im]`.
    pub candidate: BTreeMap<String, [f64; 2]>,
    /// Raised to `max band + 1` over the candidate's indices when smaller.
    pub candidate_truncation: usize,
    pub lambda_lo: f64,
    pub cutoffs: Vec<f64>,
    pub alpha: String,
    pub delta_truncation: usize,
    pub geodesic: GeodesicConfig,
    /// Overrides for the named tolerances, see [`default_tolerances`].
    pub tolerances: BTreeMap<String, f64>,
    pub output_dir: PathBuf,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            truncation_ladder: vec![4, 8, 16],
            lambda_min: 1e-3,
            lambda_max: 12.0,
            lambda_nodes: 40,
            box_halfwidth: 6.0,
            spatial_nodes: 64,
            xi_nodes: 64,
            test_function: TestFunctionKind::Gaussian,
            fd_step: 1e-4,
            r_nodes: 4096,
            candidate: BTreeMap::from([("0,0,0".to_string(), [1.0, 0.0])]),
            candidate_truncation: 1,
            lambda_lo: 1.0,
            cutoffs: (1..=9).map(|k| 10f64.powi(k)).collect(),
            alpha: "0,1,0".into(),
            delta_truncation: 8,
            geodesic: GeodesicConfig::default(),
            tolerances: BTreeMap::new(),
            output_dir: PathBuf::from("out"),
            seed: 0,
        }
    }
}

pub fn default_tolerances() -> BTreeMap<&'static str, f64> {
    BTreeMap::from([
        ("associativity", 1e-12),
        ("dilation_homomorphism", 1e-12),
        ("koranyi_inverse", 1e-14),
        ("oscillator", 1e-9),
        ("hermite_commutation", 1e-12),
        ("b_band", 1e-14),
        ("b_composition", 1e-14),
        ("geodesic_round_trip", 1e-9),
        ("axis_distance", 1e-6),
        ("monotone_guard", 0.5),
        ("landmarks", 1e-9),
        ("hardy_ratio", 0.7985),
        ("hardy_convergence", 1e-8),
        ("garofalo", 1e-8),
        ("partial_norm_oracle", 1e-8),
        ("gamma_blowup", 0.1),
        ("weak_identity", 1e-2),
        ("commutator", 1e-6),
        ("sublaplacian_sum_of_squares", 1e-6),
        ("gamma_harmonic", 1e-5),
        ("jacobian", 1e-6),
        ("horizontality", 1e-6),
        ("unit_gradient", 1e-6),
        ("delta_fd", 1e-6),
        ("plancherel", 5e-2),
        ("deficiency_slope", 5e-2),
    ])
}

impl RunConfig {
    /// Reads `path` (or starts from defaults), applies `key=value` overrides
    /// and validates.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self, CliError> {
        let mut doc = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", p.display())))?;
                serde_json::from_str::<Value>(&text).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?
            }
            None => Value::Object(Default::default()),
        };
        if !doc.is_object() {
            return Err(CliError::Usage("config must be a JSON object".into()));
        }
        for item in overrides {
            apply_override(&mut doc, item)?;
        }
        let config: RunConfig = serde_json::from_value(doc).map_err(|e| CliError::Usage(format!("config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: &str| Err(CliError::Usage(msg.to_string()));
        if self.truncation_ladder.is_empty() || self.truncation_ladder.contains(&0) {
            return bad("truncation_ladder needs at least one entry, all ≥ 1");
        }
        let counts = [
            self.lambda_nodes,
            self.spatial_nodes,
            self.xi_nodes,
            self.r_nodes,
            self.candidate_truncation,
            self.delta_truncation,
            self.geodesic.samples,
        ];
        if counts.contains(&0) {
            return bad("all counts must be at least 1");
        }
        if !(self.lambda_min > 0.0 && self.lambda_max > self.lambda_min && self.lambda_max.is_finite()) {
            return bad("need 0 < lambda_min < lambda_max");
        }
        if !(self.box_halfwidth > 0.0 && self.box_halfwidth.is_finite()) {
            return bad("box_halfwidth must be positive");
        }
        if !(self.fd_step > 0.0 && self.fd_step.is_finite()) {
            return bad("fd_step must be positive");
        }
        if !(self.lambda_lo > 0.0) {
            return bad("lambda_lo must be positive");
        }
        if let Some((name, _)) = self.tolerances.iter().find(|(_, v)| !(**v > 0.0 && v.is_finite())) {
            return Err(CliError::Usage(format!("tolerance {name} must be positive")));
        }
        if let Some(name) = self.tolerances.keys().find(|k| !default_tolerances().contains_key(k.as_str())) {
            return Err(CliError::Usage(format!("unknown tolerance {name}")));
        }
        if !(self.geodesic.t_max > 0.0) {
            return bad("geodesic.t_max must be positive");
        }
        if self.geodesic.rays.iter().any(|r| !(r[0].is_finite() && (r[1] * self.geodesic.t_max).abs() < TWO_PI)) {
            return bad("every geodesic ray needs |h0·t_max| < 2π");
        }
        self.candidate()?;
        self.alpha()?;
        Ok(())
    }

    pub fn tolerance(&self, name: &str) -> f64 {
        self.tolerances.get(name).copied().or_else(|| default_tolerances().get(name).copied()).unwrap_or(f64::NAN)
    }

    pub fn alpha(&self) -> Result<MultiIndex, CliError> {
        self.alpha.parse().map_err(|e| CliError::Usage(format!("alpha {:?}: {e}", self.alpha)))
    }

    pub fn candidate_coefficients(&self) -> Result<BTreeMap<MultiIndex, Complex64>, CliError> {
        let mut map = BTreeMap::new();
        for (key, [re, im]) in &self.candidate {
            let alpha: MultiIndex = key.parse().map_err(|e| CliError::Usage(format!("candidate key {key:?}: {e}")))?;
            if !(re.is_finite() && im.is_finite()) {
                return Err(CliError::Usage(format!("candidate coefficient for {key} is not finite")));
            }
            *map.entry(alpha).or_insert(Complex64::new(0.0, 0.0)) += Complex64::new(*re, *im);
        }
        Ok(map)
    }

    pub fn candidate(&self) -> Result<DeficiencyCandidate, CliError> {
        let map = self.candidate_coefficients()?;
        // wide enough that every B_α keeps an entry inside the block
        let widest = map.keys().map(|a| a.band() + 1).max().unwrap_or(1);
        DeficiencyCandidate::new(&map, self.candidate_truncation.max(widest))
            .map_err(|e| CliError::Usage(format!("candidate: {e}")))
    }
}

/// `a.b.c=value`; the value is read as JSON and falls back to a string.
fn apply_override(doc: &mut Value, item: &str) -> Result<(), CliError> {
    let (key, raw) =
        item.split_once('=').ok_or_else(|| CliError::Usage(format!("override {item:?} is not KEY=VALUE")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut slot = doc;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        if part.is_empty() {
            return Err(CliError::Usage(format!("override key {key:?} has an empty segment")));
        }
        let map = slot
            .as_object_mut()
            .ok_or_else(|| CliError::Usage(format!("override {key:?} descends into a non-object")))?;
        if i + 1 == parts.len() {
            map.insert(part.to_string(), value);
            return Ok(());
        }
        slot = map.entry(part.to_string()).or_insert_with(|| Value::Object(Default::default()));
    }
    Ok(())
}
