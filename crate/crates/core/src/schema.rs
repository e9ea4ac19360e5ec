//! Versioned JSON envelopes.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SCHEMA: &str = "xorlab/v1";

/// `{"schema": "xorlab/v1", ...fields of T}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Versioned<T> {
    pub schema: String,
    #[serde(flatten)]
    pub body: T,
}

impl<T> Versioned<T> {
    pub fn new(body: T) -> Self {
        Versioned {
            schema: SCHEMA.to_string(),
            body,
        }
    }
}

pub fn check_schema(found: &str) -> Result<()> {
    if found != SCHEMA {
        return Err(Error::Schema(format!(
            "expected schema {SCHEMA:?}, found {found:?}"
        )));
    }
    Ok(())
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string(&Versioned::new(value)).map_err(|e| Error::Schema(e.to_string()))
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(&Versioned::new(value)).map_err(|e| Error::Schema(e.to_string()))
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let v: Versioned<T> = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    check_schema(&v.schema)?;
    Ok(v.body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::states::PureState;

    #[test]
    fn round_trip_with_envelope() {
        let s = PureState::from_real(&[0.6, 0.8]).unwrap();
        let text = to_json(&s).unwrap();
        assert!(text.starts_with(r#"{"schema":"xorlab/v1","dim":2"#));
        let back: PureState = from_json(&text).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn wrong_schema_rejected() {
        let text = r#"{"schema":"xorlab/v0","dim":1,"amplitudes":[[1.0,0.0]]}"#;
        assert!(matches!(
            from_json::<PureState>(text),
            Err(Error::Schema(_))
        ));
    }
}
