//! Hand-corrupted ledgers that a sound checker must flag.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ledger::EnergyLedger;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fault {
    /// Final `‖u‖²` and `‖w‖²` raised by 10%.
    EnergyBump,
    /// Sign of the logged trilinear term reversed.
    TrilinearFlip,
    /// `E` replaced by `E(τ₀)e^{−α(τ−τ₀)/2}`, half the proven rate.
    SubRate,
}

impl Fault {
    pub const ALL: [Fault; 3] = [Fault::EnergyBump, Fault::TrilinearFlip, Fault::SubRate];

    pub fn label(self) -> &'static str {
        match self {
            Fault::EnergyBump => "energy_bump",
            Fault::TrilinearFlip => "trilinear_flip",
            Fault::SubRate => "sub_rate",
        }
    }

    /// Corrupted copy of `ledger`; `alpha` sets the rate for [`Fault::SubRate`].
    pub fn apply(self, ledger: &EnergyLedger, alpha: f64) -> EnergyLedger {
        let mut out = ledger.clone();
        match self {
            Fault::EnergyBump => {
                if let Some(last) = out.rows.last_mut() {
                    last.u_l2sq *= 1.1;
                    last.w_l2sq *= 1.1;
                }
            }
            Fault::TrilinearFlip => {
                for row in &mut out.rows {
                    row.trilinear_w = -row.trilinear_w;
                }
            }
            Fault::SubRate => {
                if let Some(first) = ledger.rows.first() {
                    let (tau0, e0) = (first.tau, first.energy());
                    for row in &mut out.rows {
                        row.e_low = e0 * (-0.5 * alpha * (row.tau - tau0)).exp();
                        row.e_high = 0.0;
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Fault {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Fault::ALL
            .into_iter()
            .find(|f| f.label() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown fault {s:?}")))
    }
}
