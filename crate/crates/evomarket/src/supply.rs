//! Supply side: the reproduction relation `s = (1 + gamma) y`, the
//! inventory balance, and the aggregate reproduction coefficient whose sign
//! decides the market regime.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Supply flow of a brand, `(1 + gamma) * sales`.
///
/// Errors when `gamma < -1`; supply cannot be negative.
pub fn supply_flow(sales: f64, gamma: f64) -> Result<f64> {
    if gamma < -1.0 {
        return Err(Error::GammaBelowFloor(gamma));
    }
    Ok((1.0 + gamma) * sales)
}

/// Outcome of an inventory step: the new density and a stock-out flag raised
/// when clamping at zero occurred.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InventoryStep {
    pub inventory: f64,
    pub stock_out: bool,
}

/// One explicit Euler step of the inventory balance `dx/dtau = gamma * y`,
/// clamped at zero with a stock-out flag.
pub fn step_inventory(inventory: f64, sales: f64, gamma: f64, dt_tau: f64) -> InventoryStep {
    let next = inventory + gamma * sales * dt_tau;
    if next < 0.0 {
        InventoryStep {
            inventory: 0.0,
            stock_out: true,
        }
    } else {
        InventoryStep {
            inventory: next,
            stock_out: false,
        }
    }
}

/// Mean reproduction coefficient from total supply and the demand rate:
/// `s_t / d - 1`. Its sign decides the regime.
pub fn mean_reproduction(total_supply: f64, demand: f64) -> Result<f64> {
    if demand <= 0.0 {
        return Err(Error::ZeroDemand);
    }
    Ok(total_supply / demand - 1.0)
}

/// A scripted exogenous event: a reproduction-coefficient shift or a demand
/// shock at a given long time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShockEvent {
    /// Shift the reproduction coefficient by `delta`, for one brand or all.
    Gamma {
        time: f64,
        delta: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        brand: Option<usize>,
    },
    /// Multiply the maximum demand rate by `factor` from `time` onward.
    Demand { time: f64, factor: f64 },
}

impl ShockEvent {
    pub fn time(&self) -> f64 {
        match self {
            ShockEvent::Gamma { time, .. } | ShockEvent::Demand { time, .. } => *time,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ShockEvent::Gamma { time, delta, .. } => {
                if !time.is_finite() || !delta.is_finite() {
                    return Err(Error::invalid("shocks", "non-finite shock event"));
                }
            }
            ShockEvent::Demand { time, factor } => {
                if !time.is_finite() || !factor.is_finite() || *factor <= 0.0 {
                    return Err(Error::invalid(
                        "shocks",
                        format!("demand factor must be positive and finite: {factor}"),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Per-brand reproduction schedule: constant base coefficients plus scripted
/// shock events. Read-only after construction.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SupplyPolicy {
    pub base_gamma: Vec<f64>,
    pub shocks: Vec<ShockEvent>,
}

impl SupplyPolicy {
    pub fn constant(base_gamma: Vec<f64>) -> Self {
        SupplyPolicy {
            base_gamma,
            shocks: Vec::new(),
        }
    }

    /// Reproduction coefficient of `brand` at long time `t`, with every
    /// gamma shock at or before `t` applied.
    pub fn gamma_at(&self, brand: usize, t: f64) -> f64 {
        let mut gamma = self.base_gamma[brand];
        for shock in &self.shocks {
            if let ShockEvent::Gamma { time, delta, brand: target } = shock {
                if *time <= t && target.is_none_or(|b| b == brand) {
                    gamma += delta;
                }
            }
        }
        gamma
    }

    /// Combined demand factor of every demand shock at or before `t`.
    pub fn demand_factor_at(&self, t: f64) -> f64 {
        self.shocks
            .iter()
            .filter_map(|s| match s {
                ShockEvent::Demand { time, factor } if *time <= t => Some(*factor),
                _ => None,
            })
            .product()
    }
}
