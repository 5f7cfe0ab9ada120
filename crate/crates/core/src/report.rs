//! Named check results with deterministic JSON output.

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Where a set of checks came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// Catalog id or input path.
    pub source: String,
    pub grid: [usize; 2],
    pub order: u32,
}

/// Second run at `h/2`, when convergence was requested.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Refinement {
    pub residual: f64,
    pub tolerance: f64,
    /// Coarse residual over fine residual; `None` when both sit below the
    /// rounding floor and the ratio carries no information.
    pub ratio: Option<f64>,
    pub ratio_floor: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refinement: Option<Refinement>,
}

impl CheckEntry {
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        CheckEntry { name: name.into(), residual, tolerance, pass: residual <= tolerance, refinement: None }
    }

    /// Adds the `h/2` run; the entry passes only if both runs are within
    /// tolerance and the shrink factor meets the floor.
    pub fn refined(mut self, fine: f64, fine_tolerance: f64, ratio_floor: f64, noise: f64) -> Self {
        let ratio = if self.residual <= noise && fine <= noise { None } else { Some(self.residual / fine.max(f64::MIN_POSITIVE)) };
        let ratio_ok = ratio.map_or(true, |r| r >= ratio_floor);
        self.pass = self.residual <= self.tolerance && fine <= fine_tolerance && ratio_ok;
        self.refinement = Some(Refinement { residual: fine, tolerance: fine_tolerance, ratio, ratio_floor });
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub provenance: Provenance,
    pub checks: Vec<CheckEntry>,
}

impl CheckReport {
    pub fn new(provenance: Provenance) -> Self {
        CheckReport { provenance, checks: Vec::new() }
    }

    pub fn push(&mut self, entry: CheckEntry) {
        self.checks.push(entry);
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn first_failure(&self) -> Option<&CheckEntry> {
        self.checks.iter().find(|c| !c.pass)
    }

    /// Pretty JSON with every float printed as `%.6e`, so equal inputs give
    /// byte-identical files.
    pub fn to_json(&self) -> Result<String> {
        let v = serde_json::to_value(self)?;
        Ok(format!("{}\n", render(&v, 0)))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Serializes any report value with fixed float formatting.
pub fn to_fixed_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    Ok(format!("{}\n", render(&v, 0)))
}

fn render(v: &serde_json::Value, depth: usize) -> String {
    use serde_json::Value;
    let pad = "  ".repeat(depth + 1);
    let close = "  ".repeat(depth);
    match v {
        Value::Number(n) => match (n.as_i64(), n.as_u64(), n.as_f64()) {
            (Some(i), _, _) => i.to_string(),
            (_, Some(u), _) => u.to_string(),
            (_, _, Some(f)) => format!("{f:.6e}"),
            _ => n.to_string(),
        },
        Value::Array(items) if items.is_empty() => "[]".into(),
        Value::Array(items) => {
            let body: Vec<String> = items.iter().map(|x| format!("{pad}{}", render(x, depth + 1))).collect();
            format!("[\n{}\n{close}]", body.join(",\n"))
        }
        Value::Object(map) if map.is_empty() => "{}".into(),
        Value::Object(map) => {
            let body: Vec<String> = map
                .iter()
                .map(|(k, x)| format!("{pad}{}: {}", Value::String(k.clone()), render(x, depth + 1)))
                .collect();
            format!("{{\n{}\n{close}}}", body.join(",\n"))
        }
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_iff_within_tolerance() {
        assert!(CheckEntry::new("a", 1.0, 1.0).pass);
        assert!(!CheckEntry::new("a", 1.0 + 1e-12, 1.0).pass);
    }

    #[test]
    fn refinement_needs_ratio() {
        let e = CheckEntry::new("a", 0.1, 1.0).refined(0.05, 0.25, 3.0, 1e-11);
        assert!(!e.pass);
        let e = CheckEntry::new("a", 0.1, 1.0).refined(0.02, 0.25, 3.0, 1e-11);
        assert!(e.pass);
        let e = CheckEntry::new("a", 1e-14, 1.0).refined(2e-14, 0.25, 3.0, 1e-11);
        assert!(e.pass && e.refinement.unwrap().ratio.is_none());
    }

    #[test]
    fn json_is_stable_and_round_trips() {
        let mut r = CheckReport::new(Provenance { source: "clifford".into(), grid: [64, 64], order: 2 });
        r.push(CheckEntry::new("x", 1.0 / 3.0, 0.5).refined(1.0 / 12.0, 0.125, 3.0, 1e-11));
        let a = r.to_json().unwrap();
        assert_eq!(a, r.clone().to_json().unwrap());
        assert!(a.contains("3.333333e-1"));
        let back = CheckReport::from_json(&a).unwrap();
        assert_eq!(back.checks.len(), 1);
        assert!((back.checks[0].residual - 0.333333).abs() < 1e-6);
    }
}
