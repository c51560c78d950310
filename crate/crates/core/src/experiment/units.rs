//! Frequencies tagged with their unit, so a config can never hold a bare
//! number whose cyclic/angular meaning is ambiguous.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ion::Convention;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FreqUnit {
    #[serde(rename = "rad_per_s")]
    RadPerS,
    #[serde(rename = "Hz_cyclic")]
    HzCyclic,
    #[serde(rename = "kHz_cyclic")]
    KHzCyclic,
    #[serde(rename = "MHz_cyclic")]
    MHzCyclic,
    #[serde(rename = "THz_cyclic")]
    THzCyclic,
    /// A table value in MHz whose meaning is fixed by a convention switch.
    #[serde(rename = "MHz_by_convention")]
    MHzByConvention,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frequency {
    pub value: f64,
    pub unit: FreqUnit,
}

impl Frequency {
    pub fn rad_per_s(value: f64) -> Self {
        Self { value, unit: FreqUnit::RadPerS }
    }

    pub fn khz(value: f64) -> Self {
        Self { value, unit: FreqUnit::KHzCyclic }
    }

    pub fn mhz(value: f64) -> Self {
        Self { value, unit: FreqUnit::MHzCyclic }
    }

    pub fn thz(value: f64) -> Self {
        Self { value, unit: FreqUnit::THzCyclic }
    }

    pub fn by_convention(mhz: f64) -> Self {
        Self { value: mhz, unit: FreqUnit::MHzByConvention }
    }

    /// Angular value, rad/s. `MHz_by_convention` fields need `convention`.
    pub fn resolve(&self, convention: Option<Convention>) -> Result<f64> {
        if !self.value.is_finite() {
            return Err(Error::Config(format!("non-finite frequency {self}")));
        }
        Ok(match self.unit {
            FreqUnit::RadPerS => self.value,
            FreqUnit::HzCyclic => 2.0 * PI * self.value,
            FreqUnit::KHzCyclic => 2.0 * PI * self.value * 1e3,
            FreqUnit::MHzCyclic => 2.0 * PI * self.value * 1e6,
            FreqUnit::THzCyclic => 2.0 * PI * self.value * 1e12,
            FreqUnit::MHzByConvention => match convention {
                Some(c) => c.from_mhz(self.value),
                None => {
                    return Err(Error::Config(format!(
                        "{self} needs a convention switch and is only allowed for gamma and omega_d"
                    )))
                }
            },
        })
    }

    /// Angular value of a field that admits no convention switch.
    pub fn angular(&self) -> Result<f64> {
        self.resolve(None)
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let u = serde_json::to_value(self.unit).ok().and_then(|v| v.as_str().map(str::to_owned));
        write!(f, "{} {}", self.value, u.unwrap_or_default())
    }
}
