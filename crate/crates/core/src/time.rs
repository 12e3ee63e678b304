//! UTC instants with nanosecond resolution.

use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Nanoseconds since the Unix epoch, UTC.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct UtcTime(pub i64);

impl UtcTime {
    pub const fn from_nanos(ns: i64) -> Self {
        UtcTime(ns)
    }

    pub const fn nanos(self) -> i64 {
        self.0
    }

    /// Shift by a (possibly fractional) number of seconds, rounded to the nearest ns.
    pub fn add_seconds(self, s: f64) -> Self {
        UtcTime(self.0 + (s * 1e9).round() as i64)
    }

    /// Signed difference `self - earlier` in seconds.
    pub fn seconds_since(self, earlier: UtcTime) -> f64 {
        (self.0 - earlier.0) as f64 * 1e-9
    }

    pub fn to_rfc3339(self) -> String {
        let dt = DateTime::<Utc>::from_timestamp_nanos(self.0);
        dt.to_rfc3339_opts(SecondsFormat::AutoSi, true)
    }
}

impl fmt::Display for UtcTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_rfc3339())
    }
}

impl FromStr for UtcTime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let dt = DateTime::parse_from_rfc3339(s.trim())
            .map_err(|e| Error::invalid(format!("bad RFC3339 time {s:?}: {e}")))?;
        dt.with_timezone(&Utc)
            .timestamp_nanos_opt()
            .map(UtcTime)
            .ok_or_else(|| Error::invalid(format!("time {s:?} out of range")))
    }
}

impl Serialize for UtcTime {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_rfc3339())
    }
}

impl<'de> Deserialize<'de> for UtcTime {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
