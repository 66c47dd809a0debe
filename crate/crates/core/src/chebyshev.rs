//! Equal-ripple gain target: Chebyshev polynomials, the power-loss function
//! and the prototype coefficient table.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// dB values in a table row must match a request to this tolerance.
const TABLE_DB_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum PrototypeError {
    #[error("invalid prototype: {0}")]
    Invalid(String),
    #[error("minimum gain must be positive, got {0} dB")]
    GainDomain(f64),
    #[error("no prototype row for order {order}, {g_min_db} dB gain, {ripple_db} dB ripple; nearest available: {nearest}")]
    TableMiss {
        order: usize,
        g_min_db: f64,
        ripple_db: f64,
        nearest: String,
    },
    #[error("cannot read prototype table {path}: {source}")]
    TableIo { path: String, source: std::io::Error },
    #[error("malformed prototype table {path}: {source}")]
    TableFormat { path: String, source: serde_json::Error },
}

pub type Result<T> = std::result::Result<T, PrototypeError>;

/// Chebyshev polynomial of the first kind by the three-term recurrence.
pub fn chebyshev_t(n: u32, x: f64) -> f64 {
    match n {
        0 => 1.0,
        1 => x,
        _ => {
            let (mut prev, mut cur) = (1.0, x);
            for _ in 1..n {
                let next = 2.0 * x * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RippleConstant(f64);

impl RippleConstant {
    pub fn new(k: f64) -> Result<Self> {
        if k.is_finite() && k > 0.0 {
            Ok(Self(k))
        } else {
            Err(PrototypeError::Invalid(format!(
                "ripple constant must be positive, got {k}"
            )))
        }
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// `P_L = 1 + k^2 T_n(omega)^2`.
pub fn power_loss(k: RippleConstant, n: u32, omega_normalized: f64) -> f64 {
    let t = chebyshev_t(n, omega_normalized);
    1.0 + k.0 * k.0 * t * t
}

/// Reflection-amplifier gain `P_L / (P_L - 1)` for a given power loss.
pub fn reflection_gain(power_loss: f64) -> f64 {
    power_loss / (power_loss - 1.0)
}

/// Ripple constant whose gain at the ripple extrema (`T_n^2 = 1`) equals
/// the minimum gain: `k^2 = 1 / (G_min - 1)`, `G_min` linear.
pub fn ripple_constant_from_spec(g_min_db: f64, ripple_db: f64) -> Result<RippleConstant> {
    if !(g_min_db.is_finite() && g_min_db > 0.0) {
        return Err(PrototypeError::GainDomain(g_min_db));
    }
    if !(ripple_db.is_finite() && ripple_db > 0.0) {
        return Err(PrototypeError::Invalid(format!(
            "ripple must be positive, got {ripple_db} dB"
        )));
    }
    let g_min = 10f64.powf(g_min_db / 10.0);
    RippleConstant::new((1.0 / (g_min - 1.0)).sqrt())
}

/// Lowpass-to-bandpass substitution `(1/w) (f/f0 - f0/f)`.
///
/// Only used for overlaying the prototype response on a simulated sweep.
pub fn bandpass_to_lowpass(f: f64, f0: f64, w: f64) -> f64 {
    (f / f0 - f0 / f) / w
}

/// Prototype of order `N` with coefficients `g_1 ..= g_{N+1}` (`g_0 = 1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PrototypeRow", into = "PrototypeRow")]
pub struct PrototypeSpec {
    order_n: usize,
    g_min_db: f64,
    ripple_db: f64,
    g: Vec<f64>,
}

/// One row of a prototype table file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PrototypeRow {
    pub order: usize,
    pub g_min_db: f64,
    pub ripple_db: f64,
    pub g: Vec<f64>,
}

impl TryFrom<PrototypeRow> for PrototypeSpec {
    type Error = PrototypeError;

    fn try_from(row: PrototypeRow) -> Result<Self> {
        PrototypeSpec::new(row.order, row.g_min_db, row.ripple_db, row.g)
    }
}

impl From<PrototypeSpec> for PrototypeRow {
    fn from(p: PrototypeSpec) -> Self {
        PrototypeRow {
            order: p.order_n,
            g_min_db: p.g_min_db,
            ripple_db: p.ripple_db,
            g: p.g,
        }
    }
}

impl PrototypeSpec {
    pub fn new(order_n: usize, g_min_db: f64, ripple_db: f64, g: Vec<f64>) -> Result<Self> {
        if order_n < 1 {
            return Err(PrototypeError::Invalid("order must be at least 1".into()));
        }
        if g.len() != order_n + 1 {
            return Err(PrototypeError::Invalid(format!(
                "order {order_n} needs {} coefficients, got {}",
                order_n + 1,
                g.len()
            )));
        }
        if let Some(bad) = g.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(PrototypeError::Invalid(format!(
                "coefficients must be positive, got {bad}"
            )));
        }
        if !(g_min_db.is_finite() && g_min_db > 0.0) {
            return Err(PrototypeError::GainDomain(g_min_db));
        }
        if !(ripple_db.is_finite() && ripple_db > 0.0) {
            return Err(PrototypeError::Invalid(format!(
                "ripple must be positive, got {ripple_db} dB"
            )));
        }
        Ok(Self {
            order_n,
            g_min_db,
            ripple_db,
            g,
        })
    }

    pub fn order(&self) -> usize {
        self.order_n
    }

    pub fn g_min_db(&self) -> f64 {
        self.g_min_db
    }

    pub fn ripple_db(&self) -> f64 {
        self.ripple_db
    }

    /// `g_1 ..= g_{N+1}`.
    pub fn coefficients(&self) -> &[f64] {
        &self.g
    }

    /// Coefficient `g_i` with `g_0 = 1`.
    pub fn g(&self, i: usize) -> f64 {
        if i == 0 {
            1.0
        } else {
            self.g[i - 1]
        }
    }

    pub fn ripple_constant(&self) -> Result<RippleConstant> {
        ripple_constant_from_spec(self.g_min_db, self.ripple_db)
    }

    fn matches(&self, order: usize, g_min_db: f64, ripple_db: f64) -> bool {
        self.order_n == order
            && (self.g_min_db - g_min_db).abs() <= TABLE_DB_TOL
            && (self.ripple_db - ripple_db).abs() <= TABLE_DB_TOL
    }
}

/// Reflection-amplifier prototype rows.
#[derive(Debug, Clone, PartialEq)]
pub struct PrototypeTable {
    rows: Vec<PrototypeSpec>,
}

impl Default for PrototypeTable {
    fn default() -> Self {
        Self::builtin()
    }
}

impl PrototypeTable {
    /// Published rows only.
    pub fn builtin() -> Self {
        let rows =
            vec![PrototypeSpec::new(2, 20.0, 0.5, vec![0.5, 0.24, 1.22]).expect("built-in row is valid")];
        Self { rows }
    }

    pub fn rows(&self) -> &[PrototypeSpec] {
        &self.rows
    }

    /// Parses a JSON array of `{order, g_min_db, ripple_db, g}` rows.
    pub fn from_json(text: &str, origin: &str) -> Result<Self> {
        let rows: Vec<PrototypeSpec> =
            serde_json::from_str(text).map_err(|source| PrototypeError::TableFormat {
                path: origin.to_string(),
                source,
            })?;
        Ok(Self { rows })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| PrototypeError::TableIo {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text, &path.display().to_string())
    }

    /// Built-in rows followed by the user rows; user rows win on lookup.
    pub fn extended(mut self, user: PrototypeTable) -> Self {
        let mut rows = user.rows;
        rows.append(&mut self.rows);
        self.rows = rows;
        self
    }

    pub fn lookup(&self, order_n: usize, g_min_db: f64, ripple_db: f64) -> Result<PrototypeSpec> {
        if let Some(row) = self.rows.iter().find(|r| r.matches(order_n, g_min_db, ripple_db)) {
            return Ok(row.clone());
        }
        let distance = |r: &PrototypeSpec| {
            (r.order_n as f64 - order_n as f64).abs() * 10.0
                + (r.g_min_db - g_min_db).abs()
                + (r.ripple_db - ripple_db).abs()
        };
        let mut sorted: Vec<&PrototypeSpec> = self.rows.iter().collect();
        sorted.sort_by(|a, b| distance(a).total_cmp(&distance(b)));
        let nearest = sorted
            .iter()
            .take(3)
            .map(|r| format!("(N={}, {} dB, {} dB)", r.order_n, r.g_min_db, r.ripple_db))
            .collect::<Vec<_>>()
            .join(", ");
        Err(PrototypeError::TableMiss {
            order: order_n,
            g_min_db,
            ripple_db,
            nearest: if nearest.is_empty() {
                "none".into()
            } else {
                nearest
            },
        })
    }
}

/// Lookup in the built-in table.
pub fn prototype_lookup(order_n: usize, g_min_db: f64, ripple_db: f64) -> Result<PrototypeSpec> {
    PrototypeTable::builtin().lookup(order_n, g_min_db, ripple_db)
}
