use serde::{Deserialize, Serialize};

use crate::similarity::{RouteEvaluation, SimilarityClock};
use crate::{Error, Result};

/// Column names of a ledger row, in order.
pub const LEDGER_COLUMNS: [&str; 20] = [
    "t",
    "tau",
    "dt",
    "u_l2sq",
    "u_h1sq",
    "u_h2sq",
    "u_sup",
    "w_l2sq",
    "w_h1sq",
    "w_h2sq",
    "w_sup",
    "E_low",
    "E_high",
    "low_l4",
    "low_sup",
    "grad_high_sq",
    "trilinear_w",
    "lap_coupling",
    "route_gap",
    "w_h3sq",
];

/// One logged time. The `w_*` and split columns come from the multiplier
/// route; `route_gap` is its largest relative distance from the scaling route.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LedgerRow {
    pub t: f64,
    pub tau: f64,
    pub dt: f64,
    pub u_l2sq: f64,
    pub u_h1sq: f64,
    pub u_h2sq: f64,
    pub u_sup: f64,
    pub w_l2sq: f64,
    pub w_h1sq: f64,
    pub w_h2sq: f64,
    pub w_sup: f64,
    #[serde(rename = "E_low")]
    pub e_low: f64,
    #[serde(rename = "E_high")]
    pub e_high: f64,
    pub low_l4: f64,
    pub low_sup: f64,
    pub grad_high_sq: f64,
    pub trilinear_w: f64,
    pub lap_coupling: f64,
    pub route_gap: f64,
    pub w_h3sq: f64,
}

impl LedgerRow {
    pub fn from_evaluation(clock: &SimilarityClock, dt: f64, eval: &RouteEvaluation) -> Self {
        let w = &eval.multiplier;
        Self {
            t: clock.t(),
            tau: clock.tau(),
            dt,
            u_l2sq: eval.u.l2_sq,
            u_h1sq: eval.u.h1_sq,
            u_h2sq: eval.u.h2_sq,
            u_sup: eval.u.sup,
            w_l2sq: w.l2_sq,
            w_h1sq: w.h1_sq,
            w_h2sq: w.h2_sq,
            w_sup: w.sup,
            e_low: w.e_low,
            e_high: w.e_high,
            low_l4: w.low_l4,
            low_sup: w.low_sup,
            grad_high_sq: w.grad_high_sq,
            trilinear_w: w.trilinear,
            lap_coupling: w.lap_coupling,
            route_gap: eval.gap,
            w_h3sq: w.h3_sq,
        }
    }

    /// `E = E_low + E_high`.
    pub fn energy(&self) -> f64 {
        self.e_low + self.e_high
    }

    pub fn values(&self) -> [f64; 20] {
        [
            self.t,
            self.tau,
            self.dt,
            self.u_l2sq,
            self.u_h1sq,
            self.u_h2sq,
            self.u_sup,
            self.w_l2sq,
            self.w_h1sq,
            self.w_h2sq,
            self.w_sup,
            self.e_low,
            self.e_high,
            self.low_l4,
            self.low_sup,
            self.grad_high_sq,
            self.trilinear_w,
            self.lap_coupling,
            self.route_gap,
            self.w_h3sq,
        ]
    }
}

/// Time-ordered rows of one trajectory.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyLedger {
    pub rows: Vec<LedgerRow>,
    /// Multiplier parameter the split columns were computed with, when known.
    #[serde(default)]
    pub alpha: Option<f64>,
}

impl EnergyLedger {
    pub fn new(rows: Vec<LedgerRow>) -> Self {
        Self { rows, alpha: None }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = Some(alpha);
        self
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn push(&mut self, row: LedgerRow) {
        self.rows.push(row);
    }

    pub fn column(&self, pick: impl Fn(&LedgerRow) -> f64) -> Vec<f64> {
        self.rows.iter().map(pick).collect()
    }

    pub fn taus(&self) -> Vec<f64> {
        self.column(|r| r.tau)
    }

    /// Every `factor`-th row, the last row always kept.
    pub fn subsample(&self, factor: usize) -> Self {
        let factor = factor.max(1);
        let last = self.rows.len().saturating_sub(1);
        let rows = self
            .rows
            .iter()
            .enumerate()
            .filter(|(i, _)| i % factor == 0 || *i == last)
            .map(|(_, r)| *r)
            .collect();
        Self {
            rows,
            alpha: self.alpha,
        }
    }

    /// Strictly increasing `τ`, no NaN or infinity anywhere.
    pub fn validate(&self) -> Result<()> {
        for (i, row) in self.rows.iter().enumerate() {
            if let Some(pos) = row.values().iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidLedger(format!(
                    "row {i}: column {} is not finite",
                    LEDGER_COLUMNS[pos]
                )));
            }
        }
        if let Some(i) = self.rows.windows(2).position(|w| w[1].tau <= w[0].tau) {
            return Err(Error::InvalidLedger(format!(
                "tau not strictly increasing at row {}",
                i + 1
            )));
        }
        Ok(())
    }

    /// Largest logged route gap.
    pub fn max_route_gap(&self) -> f64 {
        self.rows.iter().map(|r| r.route_gap).fold(0.0, f64::max)
    }
}
