use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::circuit::CliffordCircuit;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    None,
    /// `ρ → p ρ + (1 − p) I / 2ⁿ` after each moment; `p` is the fidelity.
    #[serde(rename = "depolarizing_global")]
    GlobalDepolarizing,
    /// Each qubit independently suffers X, Y or Z with probability `p/3` each.
    #[serde(rename = "depolarizing1q")]
    SingleQubitDepolarizing,
}

impl NoiseKind {
    pub fn name(self) -> &'static str {
        match self {
            NoiseKind::None => "none",
            NoiseKind::GlobalDepolarizing => "depolarizing_global",
            NoiseKind::SingleQubitDepolarizing => "depolarizing1q",
        }
    }
}

/// Which moments are followed by a noise channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoisePlacement {
    /// Every non-measurement moment, encoder included.
    #[default]
    AllMoments,
    /// Only moments after the encoder.
    PostEncoding,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    pub p: f64,
    #[serde(default)]
    pub placement: NoisePlacement,
}

impl NoiseModel {
    pub fn new(kind: NoiseKind, p: f64) -> Result<Self> {
        let nm = Self {
            kind,
            p,
            placement: NoisePlacement::AllMoments,
        };
        nm.check()?;
        Ok(nm)
    }

    pub fn noiseless() -> Self {
        Self {
            kind: NoiseKind::None,
            p: 0.0,
            placement: NoisePlacement::AllMoments,
        }
    }

    pub fn depolarizing1q(p: f64) -> Result<Self> {
        Self::new(NoiseKind::SingleQubitDepolarizing, p)
    }

    pub fn global(p: f64) -> Result<Self> {
        Self::new(NoiseKind::GlobalDepolarizing, p)
    }

    pub fn with_placement(mut self, placement: NoisePlacement) -> Self {
        self.placement = placement;
        self
    }

    pub fn check(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidParameter(format!(
                "noise rate {} outside [0, 1]",
                self.p
            )));
        }
        Ok(())
    }

    /// Whether the channel does nothing.
    pub fn is_trivial(&self) -> bool {
        match self.kind {
            NoiseKind::None => true,
            NoiseKind::GlobalDepolarizing => self.p == 1.0,
            NoiseKind::SingleQubitDepolarizing => self.p == 0.0,
        }
    }

    /// Indices of the moments followed by noise.
    pub fn noisy_moments(&self, c: &CliffordCircuit, noise_start: usize) -> Vec<usize> {
        if self.is_trivial() {
            return Vec::new();
        }
        let start = match self.placement {
            NoisePlacement::AllMoments => 0,
            NoisePlacement::PostEncoding => noise_start,
        };
        c.moments()
            .iter()
            .enumerate()
            .filter(|(i, m)| *i >= start && !m.has_measurement())
            .map(|(i, _)| i)
            .collect()
    }
}

/// `kind:rate`, or `none`.
impl fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            NoiseKind::None => write!(f, "none"),
            k => write!(f, "{}:{}", k.name(), self.p),
        }
    }
}

impl FromStr for NoiseModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rate) = match s.split_once(':') {
            Some((k, r)) => (k.trim(), Some(r.trim())),
            None => (s.trim(), None),
        };
        let kind = match kind {
            "none" => NoiseKind::None,
            "depolarizing1q" => NoiseKind::SingleQubitDepolarizing,
            "depolarizing_global" => NoiseKind::GlobalDepolarizing,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown noise kind `{other}`; expected none, depolarizing1q or depolarizing_global"
                )))
            }
        };
        let p = match (kind, rate) {
            (NoiseKind::None, None) => 0.0,
            (_, Some(r)) => r
                .parse::<f64>()
                .map_err(|e| Error::InvalidParameter(format!("bad noise rate `{r}`: {e}")))?,
            (_, None) => {
                return Err(Error::InvalidParameter(format!(
                    "noise kind `{}` needs a rate",
                    kind.name()
                )))
            }
        };
        NoiseModel::new(kind, p)
    }
}
