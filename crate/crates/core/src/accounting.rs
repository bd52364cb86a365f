//! National-accounts identities: GDP by production, income and expenditure.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Aggregates used by the three GDP identities. Each approach only needs
/// its own subset, so every field is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GdpComponents {
    /// Household consumption.
    pub consumption: Option<f64>,
    /// Investment (gross fixed capital formation less stock variation).
    pub investment: Option<f64>,
    /// Government consumption.
    pub government: Option<f64>,
    /// Net exports.
    pub net_exports: Option<f64>,
    /// Gross value added.
    pub gross_value_added: Option<f64>,
    /// Intermediate consumption.
    pub intermediate_consumption: Option<f64>,
    /// Taxes on products.
    pub taxes: Option<f64>,
    /// Subsidies on products.
    pub subsidies: Option<f64>,
    /// Wages.
    pub wages: Option<f64>,
    /// Gross operating surplus.
    pub operating_surplus: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Approach {
    Production,
    Income,
    Expenditure,
}

fn field(value: Option<f64>, name: &str) -> Result<f64> {
    let v = value.ok_or_else(|| Error::input(format!("missing GDP component '{name}'")))?;
    if !v.is_finite() {
        return Err(Error::input(format!("GDP component '{name}' is not finite")));
    }
    Ok(v)
}

fn net_taxes(c: &GdpComponents) -> Result<f64> {
    let t = field(c.taxes, "taxes")?;
    let sub = field(c.subsidies, "subsidies")?;
    if t < 0.0 || sub < 0.0 {
        return Err(Error::input("taxes and subsidies must be non-negative"));
    }
    Ok(t - sub)
}

/// GDP from the components required by `approach`.
pub fn gdp_identity(c: &GdpComponents, approach: Approach) -> Result<f64> {
    match approach {
        Approach::Production => Ok(field(c.gross_value_added, "gross_value_added")?
            - field(c.intermediate_consumption, "intermediate_consumption")?
            + net_taxes(c)?),
        Approach::Income => Ok(field(c.wages, "wages")?
            + field(c.operating_surplus, "operating_surplus")?
            + net_taxes(c)?),
        Approach::Expenditure => Ok(field(c.consumption, "consumption")?
            + field(c.government, "government")?
            + field(c.investment, "investment")?
            + field(c.net_exports, "net_exports")?),
    }
}
