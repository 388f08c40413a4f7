use serde::Serialize;
use serde_json::Value;

/// Provenance embedded in every output.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub params: Value,
    pub seed: Option<u64>,
    /// Milliseconds; left out unless timing is requested so that repeated
    /// runs stay byte-identical.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl RunManifest {
    pub fn new(command: &str, params: Value, seed: Option<u64>) -> Self {
        RunManifest {
            tool: "hyperedge",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            params,
            seed,
            wall_time_ms: None,
        }
    }

    /// The manifest as `# `-prefixed CSV comment lines.
    pub fn csv_header(&self) -> String {
        format!(
            "# manifest: {}\n",
            serde_json::to_string(self).expect("manifest serialises")
        )
    }
}
