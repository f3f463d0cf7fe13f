use serde::Serialize;
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// First 16 hex digits of SHA-256 over the tool name and version.
pub fn version_hash() -> String {
    let digest = Sha256::digest(format!("tracelab {VERSION}").as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Serialize)]
pub struct Header {
    pub tool: &'static str,
    pub version: &'static str,
    pub version_hash: String,
    pub config: serde_json::Value,
}

impl Header {
    pub fn new(config: serde_json::Value) -> Self {
        Self {
            tool: "tracelab",
            version: VERSION,
            version_hash: version_hash(),
            config,
        }
    }

    /// One-line comment form for CSV, text and trace dumps.
    pub fn comment(&self) -> String {
        format!(
            "# tracelab {} {} {}\n",
            self.version,
            self.version_hash,
            serde_json::to_string(&self.config).expect("config serializes")
        )
    }
}

/// A report document: `{"header": ..., "result": ...}`.
pub fn json_document<T: Serialize>(header: &Header, result: &T) -> String {
    let doc = serde_json::json!({ "header": header, "result": result });
    serde_json::to_string_pretty(&doc).expect("report serializes") + "\n"
}

/// A JSON-lines stream whose first line is the header.
pub fn json_lines<T: Serialize>(header: &Header, records: &[T]) -> String {
    let mut out = serde_json::to_string(&serde_json::json!({ "header": header })).expect("header serializes");
    out.push('\n');
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("record serializes"));
        out.push('\n');
    }
    out
}

/// CSV with the header comment on the first line.
pub fn csv_table<T: Serialize>(header: &Header, rows: &[T]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("row serializes");
    }
    let body = String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 csv");
    header.comment() + &body
}
