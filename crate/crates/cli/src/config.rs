//! JSON config files merged under command-line flags, and the metadata block
//! written after every CSV.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

/// Overlays the non-null keys of `flags` on the config file (flags win) and
/// checks the result against the command's schema.
pub fn resolve<T: Serialize + DeserializeOwned>(flags: &T, file: Option<&Path>) -> Result<T> {
    let mut base = match file {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            match serde_json::from_str(&text)
                .with_context(|| format!("parsing config {}", path.display()))?
            {
                Value::Object(map) => map,
                _ => bail!(toeplitz_pnt::Error::Config(
                    "config file must hold a JSON object".into()
                )),
            }
        }
        None => Map::new(),
    };
    if let Value::Object(over) = serde_json::to_value(flags)? {
        for (k, v) in over {
            if !v.is_null() {
                base.insert(k, v);
            }
        }
    }
    serde_json::from_value(Value::Object(base))
        .map_err(|e| anyhow::Error::new(toeplitz_pnt::Error::Config(format!("config schema: {e}"))))
}

/// Canonical JSON of a resolved config: keys sorted, nulls kept.
pub fn canonical<T: Serialize>(cfg: &T) -> Result<String> {
    Ok(serde_json::to_string(&serde_json::to_value(cfg)?)?)
}

pub fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// `# key=value` lines: command, config hash, versions and the config itself.
pub fn metadata<T: Serialize>(command: &str, cfg: &T) -> Result<Vec<(String, String)>> {
    let json = canonical(cfg)?;
    Ok(vec![
        ("command".into(), command.into()),
        ("config_sha256".into(), sha256_hex(&json)),
        ("tpnt_version".into(), env!("CARGO_PKG_VERSION").into()),
        ("core_version".into(), toeplitz_pnt::VERSION.into()),
        ("config".into(), json),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;

    #[derive(Debug, Default, PartialEq, Serialize, Deserialize)]
    #[serde(default, deny_unknown_fields)]
    struct Flags {
        a: Option<u64>,
        b: Option<String>,
    }

    #[test]
    fn flags_override_file_keys() {
        let dir = std::env::temp_dir().join(format!("tpnt-config-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let file = dir.join("c.json");
        std::fs::write(&file, r#"{"a": 1, "b": "file"}"#).unwrap();
        let got = resolve(
            &Flags {
                a: None,
                b: Some("flag".into()),
            },
            Some(&file),
        )
        .unwrap();
        assert_eq!(
            got,
            Flags {
                a: Some(1),
                b: Some("flag".into())
            }
        );
        std::fs::write(&file, r#"{"c": 1}"#).unwrap();
        assert!(resolve(&Flags::default(), Some(&file)).is_err());
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn hash_is_stable() {
        assert_eq!(
            sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        let meta = metadata(
            "x",
            &Flags {
                a: Some(2),
                b: None,
            },
        )
        .unwrap();
        assert_eq!(meta[4].1, r#"{"a":2,"b":null}"#);
    }
}
