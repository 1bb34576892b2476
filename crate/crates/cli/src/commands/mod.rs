pub mod compare;
pub mod fit;
pub mod sig;
pub mod simulate;
pub mod table1;
pub mod trade;
pub mod train;

use std::io::Write;
use std::path::Path as FsPath;

use sigtrade_core::{Error, Result};

/// Write a wrapped JSON document: the resolved config rides along for audit
/// while the payload keeps its wire schema under its own key.
pub fn write_json_doc(
    out: Option<&FsPath>,
    config: serde_json::Value,
    payload_key: &str,
    payload: serde_json::Value,
) -> Result<()> {
    let doc = serde_json::json!({
        "config_version": crate::config::CONFIG_VERSION,
        "config": config,
        payload_key: payload,
    });
    let text = serde_json::to_string_pretty(&doc)
        .map_err(|e| Error::Validation(format!("serialization failed: {e}")))?;
    match out {
        Some(path) => {
            write_file(path, text.as_bytes())?;
        }
        None => println!("{text}"),
    }
    Ok(())
}

pub fn write_file(path: &FsPath, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut file = std::fs::File::create(path)
        .map_err(|e| Error::Validation(format!("cannot create {}: {e}", path.display())))?;
    file.write_all(bytes)?;
    Ok(())
}

pub fn to_value<T: serde::Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("config values serialize")
}
