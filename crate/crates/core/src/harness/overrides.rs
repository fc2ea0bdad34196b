//! TOML overrides for the network and agent configuration.
//!
//! Top-level keys replace `NetworkConfig` fields; an optional `[agent]`
//! table replaces `AgentConfig` fields. Unknown keys are rejected.
//!
//! ```toml
//! battery_capacity = 0.2
//! primary_positions = [{ x = 0.0, y = 5.0 }, { x = 0.0, y = 50.0 }]
//!
//! [agent]
//! critic_output = "linear"
//! ```

use std::path::Path;

use serde::Serialize;
use toml::{Table, Value};

use super::scenario::Scenario;
use crate::error::{Error, Result};

fn to_table<T: Serialize>(value: &T) -> Result<Table> {
    Table::try_from(value).map_err(|e| Error::InvalidConfig(e.to_string()))
}

fn merge(base: &mut Table, over: Table, section: &str) -> Result<()> {
    for (k, v) in over {
        match base.get_mut(&k) {
            Some(slot) => *slot = v,
            None => return Err(Error::InvalidConfig(format!("unknown {section} key '{k}'"))),
        }
    }
    Ok(())
}

/// Applies the overrides in `text` to `scenario` and validates the result.
/// On error `scenario` is left unchanged.
pub fn apply_overrides(scenario: &mut Scenario, text: &str) -> Result<()> {
    let mut next = scenario.clone();
    overlay(&mut next, text)?;
    next.validate()?;
    *scenario = next;
    Ok(())
}

fn overlay(scenario: &mut Scenario, text: &str) -> Result<()> {
    let mut over: Table = text.parse().map_err(|e: toml::de::Error| Error::InvalidConfig(e.to_string()))?;
    if let Some(agent) = over.remove("agent") {
        let Value::Table(agent) = agent else {
            return Err(Error::InvalidConfig("[agent] must be a table".into()));
        };
        let mut base = to_table(&scenario.agent)?;
        merge(&mut base, agent, "agent")?;
        scenario.agent = Value::Table(base).try_into().map_err(|e: toml::de::Error| Error::InvalidConfig(e.to_string()))?;
    }
    let mut base = to_table(&scenario.network)?;
    merge(&mut base, over, "network")?;
    scenario.network = Value::Table(base).try_into().map_err(|e: toml::de::Error| Error::InvalidConfig(e.to_string()))?;
    Ok(())
}

pub fn apply_override_file(scenario: &mut Scenario, path: &Path) -> Result<()> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
    apply_overrides(scenario, &text)
}
