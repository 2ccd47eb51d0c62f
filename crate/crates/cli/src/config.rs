//! Flat key=value config files for the `dynamics` command.

use std::collections::HashMap;
use std::path::Path;

use retrobell_core::dynamics::ExperimentConfig;
use retrobell_core::outcome::OutcomePair;
use retrobell_core::sphere::{Outcome, UnitVec3};

/// Parsed dynamics run description. Settings are coplanar angles in
/// degrees; the initial spin is a full 3-vector.
pub struct DynamicsSpec {
    pub a_deg: f64,
    pub b_deg: f64,
    pub s0: UnitVec3,
    pub s0_b: Option<UnitVec3>,
    pub length: f64,
    pub speed: f64,
    pub delta: f64,
    pub kappa: f64,
    pub h: f64,
    pub max_picard_iters: usize,
    pub picard_tol: f64,
}

impl DynamicsSpec {
    pub fn config_for_seed(&self, seed: OutcomePair) -> ExperimentConfig {
        let a = UnitVec3::from_plane_angle_deg(self.a_deg);
        let b = UnitVec3::from_plane_angle_deg(self.b_deg);
        let mut cfg = ExperimentConfig::new(a, b, self.s0, seed);
        cfg.length = self.length;
        cfg.speed = self.speed;
        cfg.delta = self.delta;
        cfg.kappa = self.kappa;
        cfg.h = self.h;
        cfg.s0_b = self.s0_b;
        cfg.max_picard_iters = self.max_picard_iters;
        cfg.picard_tol = self.picard_tol;
        cfg
    }
}

/// The four candidate outcome seeds in canonical order.
pub const SEEDS: [OutcomePair; 4] = [
    OutcomePair {
        a: Outcome::Up,
        b: Outcome::Up,
    },
    OutcomePair {
        a: Outcome::Up,
        b: Outcome::Down,
    },
    OutcomePair {
        a: Outcome::Down,
        b: Outcome::Up,
    },
    OutcomePair {
        a: Outcome::Down,
        b: Outcome::Down,
    },
];

fn parse_f64(map: &HashMap<String, String>, key: &str, default: f64) -> Result<f64, String> {
    match map.get(key) {
        None => Ok(default),
        Some(v) => v
            .parse()
            .map_err(|_| format!("config key `{key}`: not a number: {v}")),
    }
}

fn parse_vec3(raw: &str, key: &str) -> Result<UnitVec3, String> {
    let parts: Vec<&str> = raw.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("config key `{key}`: expected x,y,z, got {raw}"));
    }
    let mut c = [0.0f64; 3];
    for (slot, part) in c.iter_mut().zip(&parts) {
        *slot = part
            .parse()
            .map_err(|_| format!("config key `{key}`: not a number: {part}"))?;
    }
    UnitVec3::normalize(c[0], c[1], c[2]).map_err(|e| format!("config key `{key}`: {e}"))
}

const KNOWN_KEYS: [&str; 11] = [
    "a_deg", "b_deg", "s0", "s0_b", "length", "speed", "delta", "kappa", "h",
    "max_picard_iters", "picard_tol",
];

/// Parses a flat `key = value` file; `#` starts a comment, blank lines are
/// ignored. Unknown keys are rejected to catch typos.
pub fn parse_dynamics_config(path: &Path) -> Result<DynamicsSpec, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let mut map: HashMap<String, String> = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(format!("line {}: expected key = value", lineno + 1));
        };
        let key = key.trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(format!("line {}: unknown config key `{key}`", lineno + 1));
        }
        if map.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(format!("line {}: duplicate config key `{key}`", lineno + 1));
        }
    }
    let s0 = match map.get("s0") {
        Some(raw) => parse_vec3(raw, "s0")?,
        None => return Err("config key `s0` is required".into()),
    };
    let s0_b = match map.get("s0_b") {
        Some(raw) => Some(parse_vec3(raw, "s0_b")?),
        None => None,
    };
    let iters = match map.get("max_picard_iters") {
        None => 60,
        Some(v) => v
            .parse()
            .map_err(|_| format!("config key `max_picard_iters`: not an integer: {v}"))?,
    };
    Ok(DynamicsSpec {
        a_deg: parse_f64(&map, "a_deg", 90.0)?,
        b_deg: parse_f64(&map, "b_deg", 330.0)?,
        s0,
        s0_b,
        length: parse_f64(&map, "length", 1.0)?,
        speed: parse_f64(&map, "speed", 0.5)?,
        delta: parse_f64(&map, "delta", 0.3)?,
        kappa: parse_f64(&map, "kappa", 1.0)?,
        h: parse_f64(&map, "h", 0.005)?,
        max_picard_iters: iters,
        picard_tol: parse_f64(&map, "picard_tol", 1e-10)?,
    })
}
