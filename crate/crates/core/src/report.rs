//! Check reports shared by every verification suite.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// Why a check failed. A published value that does not reproduce is kept
/// apart from an internal inconsistency of the engine itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    PublishedValueMismatch,
    InternalInconsistency,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_id: String,
    /// Which published statement the check reproduces.
    pub reference: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub failure: Option<FailureKind>,
    pub details: Value,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub duration_ms: Option<u64>,
}

impl CheckReport {
    pub fn new(check_id: impl Into<String>, reference: impl Into<String>) -> Self {
        CheckReport {
            check_id: check_id.into(),
            reference: reference.into(),
            status: Status::Pass,
            failure: None,
            details: Value::Object(Default::default()),
            duration_ms: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn fail(&mut self, kind: FailureKind) {
        self.status = Status::Fail;
        self.failure.get_or_insert(kind);
    }

    pub fn detail(&mut self, key: &str, value: impl Serialize) {
        let value = serde_json::to_value(value).expect("detail serializes");
        if let Value::Object(map) = &mut self.details {
            map.insert(key.to_string(), value);
        }
    }

    pub fn with_detail(mut self, key: &str, value: impl Serialize) -> Self {
        self.detail(key, value);
        self
    }

    /// Records an expected/got sub-check and fails the report on mismatch.
    pub fn subcheck<T: Serialize + PartialEq>(
        &mut self,
        check: &str,
        expected: T,
        got: T,
        kind: FailureKind,
    ) -> bool {
        let ok = expected == got;
        let entry = json!({
            "check": check,
            "expected": expected,
            "got": got,
            "pass": ok,
        });
        if let Value::Object(map) = &mut self.details {
            map.entry("subchecks")
                .or_insert_with(|| Value::Array(Vec::new()))
                .as_array_mut()
                .expect("subchecks is an array")
                .push(entry);
        }
        if !ok {
            self.fail(kind);
        }
        ok
    }

    pub fn subcheck_count(&self) -> usize {
        self.details
            .get("subchecks")
            .and_then(Value::as_array)
            .map_or(0, Vec::len)
    }
}
