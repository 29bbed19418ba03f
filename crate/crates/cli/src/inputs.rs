//! File inputs that are recorded into reports and replayed by `verify`.

use std::path::Path;

use peakfn_core::io::{self, DomainSpec, PeakSpec};
use peakfn_core::numerics::C64;
use peakfn_core::transfer::ProperMap;
use peakfn_core::{Error, Result};
use serde_json::{Map, Value};

#[derive(Debug, Default)]
pub struct Inputs {
    /// Inputs taken from a saved report instead of the file system.
    embedded: Option<Map<String, Value>>,
    recorded: Map<String, Value>,
}

impl Inputs {
    pub fn from_files() -> Self {
        Self::default()
    }

    pub fn replay(embedded: Map<String, Value>) -> Self {
        Self { embedded: Some(embedded), recorded: Map::new() }
    }

    pub fn recorded(&self) -> &Map<String, Value> {
        &self.recorded
    }

    fn text(&mut self, key: &str, path: &Path) -> Result<String> {
        let text = match &self.embedded {
            Some(m) => m
                .get(key)
                .ok_or_else(|| Error::InvalidInput(format!("report does not embed the `{key}` input")))?
                .to_string(),
            None => std::fs::read_to_string(path)
                .map_err(|e| Error::InvalidInput(format!("{key}: cannot read {}: {e}", path.display())))?,
        };
        let value: Value = io::parse_json(&text, key)?;
        self.recorded.insert(key.to_string(), value);
        Ok(text)
    }

    pub fn domain(&mut self, path: &Path) -> Result<DomainSpec> {
        DomainSpec::from_json(&self.text("domain", path)?)
    }

    pub fn domain_as(&mut self, key: &str, path: &Path) -> Result<DomainSpec> {
        DomainSpec::from_json(&self.text(key, path)?)
    }

    pub fn map(&mut self, path: &Path) -> Result<ProperMap> {
        let map: ProperMap = io::parse_json(&self.text("map", path)?, "map")?;
        map.validate()?;
        Ok(map)
    }

    pub fn peak(&mut self, key: &str, path: &Path) -> Result<PeakSpec> {
        io::parse_json(&self.text(key, path)?, key)
    }

    pub fn points(&mut self, key: &str, path: &Path) -> Result<Vec<Vec<C64>>> {
        io::parse_json(&self.text(key, path)?, key)
    }
}
