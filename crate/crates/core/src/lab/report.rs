use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Which inequality family a report covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InequalityId {
    /// `½ d/dτ‖w‖² = −(‖∇w‖² − ¼‖w‖²)` and `‖u(t)‖` nonincreasing.
    EnergyL2,
    /// Gradient law, its fitted-constant form and the Gronwall envelope.
    GradientH1,
    /// Laplacian law and the tail decay rate of `‖Δw‖²`.
    LaplacianH2,
    /// Split-energy inequality, its exponential decay and the vanishing of
    /// the low part.
    DecompositionDecay,
    /// `(T−t)^{1/2}‖u(t)‖_∞ ≤ ε` on a tail.
    BlowupRate,
}

impl InequalityId {
    pub const ALL: [InequalityId; 5] = [
        InequalityId::EnergyL2,
        InequalityId::GradientH1,
        InequalityId::LaplacianH2,
        InequalityId::DecompositionDecay,
        InequalityId::BlowupRate,
    ];

    pub fn label(self) -> &'static str {
        match self {
            InequalityId::EnergyL2 => "energy_l2",
            InequalityId::GradientH1 => "gradient_h1",
            InequalityId::LaplacianH2 => "laplacian_h2",
            InequalityId::DecompositionDecay => "decomposition_decay",
            InequalityId::BlowupRate => "blowup_rate",
        }
    }
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Verdict, ordered from best to worst.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Holds,
    HoldsWithCertificate,
    Inconclusive,
    Violated,
}

impl Status {
    /// `holds` or `holds_with_certificate`.
    pub fn is_pass(self) -> bool {
        matches!(self, Status::Holds | Status::HoldsWithCertificate)
    }

    pub fn label(self) -> &'static str {
        match self {
            Status::Holds => "holds",
            Status::HoldsWithCertificate => "holds_with_certificate",
            Status::Inconclusive => "inconclusive",
            Status::Violated => "violated",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One residual stream inside a report. `max_residual` and `tolerance` are
/// taken at the row where `residual − tolerance` is largest, so a failing
/// check always has `max_residual > tolerance`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub max_residual: f64,
    pub tolerance: f64,
    pub tau: f64,
}

impl Check {
    /// Compares `residual[i]` against `tolerance[i]` row by row; a row
    /// exceeding its tolerance yields `on_fail`.
    pub fn rowwise(
        name: &str,
        taus: &[f64],
        residual: &[f64],
        tolerance: &[f64],
        on_fail: Status,
    ) -> Self {
        let worst = (0..residual.len())
            .max_by(|&a, &b| (residual[a] - tolerance[a]).total_cmp(&(residual[b] - tolerance[b])));
        match worst {
            None => Self::passed(name, 0.0, 0.0, f64::NAN),
            Some(i) => Self {
                name: name.to_string(),
                status: if residual[i] > tolerance[i] {
                    on_fail
                } else {
                    Status::Holds
                },
                max_residual: residual[i],
                tolerance: tolerance[i],
                tau: taus[i],
            },
        }
    }

    pub fn passed(name: &str, max_residual: f64, tolerance: f64, tau: f64) -> Self {
        Self {
            name: name.to_string(),
            status: Status::Holds,
            max_residual,
            tolerance,
            tau,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub id: InequalityId,
    pub status: Status,
    pub max_residual: f64,
    /// Smallest constant making the fitted form hold; 0 when none is needed.
    pub certificate: f64,
    pub tolerance: f64,
    pub tau_range: [f64; 2],
    pub checks: Vec<Check>,
    /// Fitted rates, raw certificates, times and similar side results.
    pub measurements: BTreeMap<String, f64>,
}

impl InequalityReport {
    /// Assembles a report whose status is the worst check status, upgraded
    /// to `holds_with_certificate` when `certificate > 0`.
    pub fn from_checks(
        id: InequalityId,
        tau_range: [f64; 2],
        checks: Vec<Check>,
        certificate: f64,
        measurements: BTreeMap<String, f64>,
    ) -> Self {
        let mut status = checks
            .iter()
            .map(|c| c.status)
            .max()
            .unwrap_or(Status::Holds);
        if status == Status::Holds && certificate > 0.0 {
            status = Status::HoldsWithCertificate;
        }
        let worst = checks
            .iter()
            .filter(|c| c.max_residual.is_finite() && c.tolerance.is_finite())
            .max_by(|a, b| {
                (a.max_residual - a.tolerance).total_cmp(&(b.max_residual - b.tolerance))
            });
        let (max_residual, tolerance) = worst.map_or((0.0, 0.0), |c| (c.max_residual, c.tolerance));
        Self {
            id,
            status,
            max_residual,
            certificate: certificate.max(0.0),
            tolerance,
            tau_range,
            checks,
            measurements,
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn measurement(&self, name: &str) -> Option<f64> {
        self.measurements.get(name).copied()
    }
}

/// A fitted constant tagged with where it was measured.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateConstant {
    pub id: InequalityId,
    pub value: f64,
    /// Signed fit before clamping at zero; compares runs whose clamped
    /// values are all zero.
    pub raw: f64,
    pub n: usize,
    pub delta: Option<f64>,
    pub alpha: f64,
}
