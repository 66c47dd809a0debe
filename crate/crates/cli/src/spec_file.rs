//! JSON design spec accepted by the command line.
//!
//! ```json
//! {
//!   "schema": "impa-spec-v1",
//!   "f0": 6.5e9,
//!   "w": 0.0769230769,
//!   "prototype": { "order": 2, "g_min_db": 20, "ripple_db": 0.5 },
//!   "z_port": 50,
//!   "snail": { "l_j": 40e-12, "alpha": 0.25, "n_large": 3 },
//!   "c1_shunt": 5.25e-12,
//!   "z2": 12.7
//! }
//! ```
//!
//! `band_edges: [f1, f2]` may replace `f0` and `w`. `prototype.g` supplies
//! coefficients directly instead of a table lookup, and `phi_over_phi0` pins
//! the flux bias (otherwise it is tuned so the bare resonance sits at `f0`).

use std::path::Path;

use impa_core::chebyshev::{PrototypeSpec, PrototypeTable};
use impa_core::snail::{FluxBias, SnailParams};
use impa_core::synthesis::DesignSpec;
use serde::Deserialize;

use crate::error::{input, CliError, Result};

pub const SPEC_SCHEMA: &str = "impa-spec-v1";
pub const TABLE_ENV: &str = "IMPA_SYNTH_TABLE";

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    #[serde(default)]
    pub schema: Option<String>,
    #[serde(default)]
    pub f0: Option<f64>,
    #[serde(default)]
    pub w: Option<f64>,
    #[serde(default)]
    pub band_edges: Option<[f64; 2]>,
    pub prototype: PrototypeRef,
    #[serde(default = "default_z_port")]
    pub z_port: f64,
    pub snail: SnailParams,
    #[serde(default)]
    pub phi_over_phi0: Option<f64>,
    pub c1_shunt: f64,
    pub z2: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrototypeRef {
    pub order: usize,
    pub g_min_db: f64,
    pub ripple_db: f64,
    #[serde(default)]
    pub g: Option<Vec<f64>>,
}

fn default_z_port() -> f64 {
    50.0
}

impl SpecFile {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let spec: SpecFile = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::Input(format!("{origin}: at `{path}`: {}", e.inner()))
        })?;
        if let Some(schema) = &spec.schema {
            if schema != SPEC_SCHEMA {
                return Err(CliError::Input(format!(
                    "{origin}: at `schema`: expected {SPEC_SCHEMA:?}, got {schema:?}"
                )));
            }
        }
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let origin = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(input(&origin))?;
        Self::parse(&text, &origin)
    }

    /// Center frequency and fractional bandwidth.
    pub fn center_and_width(&self) -> Result<(f64, f64)> {
        match (self.f0, self.w, self.band_edges) {
            (Some(f0), Some(w), None) => Ok((f0, w)),
            (None, None, Some([f1, f2])) => {
                DesignSpec::center_and_width(f1, f2).map_err(input("at `band_edges`"))
            }
            _ => Err(CliError::Input(
                "spec needs either `f0` and `w` or `band_edges`, not both".into(),
            )),
        }
    }

    /// Resolves the prototype against `table` and builds the design inputs.
    pub fn to_design(&self, table: &PrototypeTable) -> Result<DesignSpec> {
        let (f0, w) = self.center_and_width()?;
        let p = &self.prototype;
        let prototype = match &p.g {
            Some(g) => PrototypeSpec::new(p.order, p.g_min_db, p.ripple_db, g.clone()),
            None => table.lookup(p.order, p.g_min_db, p.ripple_db),
        }
        .map_err(input("at `prototype`"))?;
        let spec = DesignSpec {
            f0,
            w,
            prototype,
            z_port: self.z_port,
            snail: self.snail,
            bias: self.phi_over_phi0.map(FluxBias::new),
            c1_shunt: self.c1_shunt,
            z2: self.z2,
        };
        spec.validate().map_err(input("spec"))?;
        Ok(spec)
    }
}

/// Built-in prototype rows, extended by the file named in `IMPA_SYNTH_TABLE`.
pub fn prototype_table() -> Result<PrototypeTable> {
    match std::env::var_os(TABLE_ENV) {
        Some(path) if !path.is_empty() => {
            let user = PrototypeTable::from_file(Path::new(&path)).map_err(input(TABLE_ENV))?;
            Ok(PrototypeTable::builtin().extended(user))
        }
        _ => Ok(PrototypeTable::builtin()),
    }
}
