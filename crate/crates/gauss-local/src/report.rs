//! Structured verification reports with byte-stable serialization: numeric
//! fields are emitted with 17 significant digits, CSV uses '.' decimals and
//! '\n' line endings unconditionally, and field order is fixed, so identical
//! runs produce identical bytes.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRow {
    pub inputs: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Refinement {
    pub coarse: f64,
    pub fine: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub theorem_id: String,
    /// Full resolved configuration, canonical JSON.
    pub config: String,
    pub cases: Vec<CaseRow>,
    pub max_ratio: f64,
    pub refinement: Refinement,
    pub pass: bool,
    pub seed: u64,
    pub version: String,
}

/// `{:.16e}` gives exactly 17 significant digits and is a valid JSON
/// number.
fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "\"nan\"".to_string()
    } else if x > 0.0 {
        "\"inf\"".to_string()
    } else {
        "\"-inf\"".to_string()
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        let mut s = String::new();
        s.push_str("{\n");
        s.push_str(&format!("  \"theorem_id\": \"{}\",\n", escape(&self.theorem_id)));
        // config is itself canonical JSON: embed verbatim
        s.push_str(&format!("  \"config\": {},\n", self.config));
        s.push_str("  \"cases\": [\n");
        for (i, case) in self.cases.iter().enumerate() {
            s.push_str(&format!(
                "    {{\"inputs\": \"{}\", \"lhs\": {}, \"rhs\": {}, \"ratio\": {}}}{}\n",
                escape(&case.inputs),
                fmt17(case.lhs),
                fmt17(case.rhs),
                fmt17(case.ratio),
                if i + 1 < self.cases.len() { "," } else { "" }
            ));
        }
        s.push_str("  ],\n");
        s.push_str(&format!("  \"max_ratio\": {},\n", fmt17(self.max_ratio)));
        s.push_str(&format!(
            "  \"refinement\": {{\"coarse\": {}, \"fine\": {}, \"delta\": {}}},\n",
            fmt17(self.refinement.coarse),
            fmt17(self.refinement.fine),
            fmt17(self.refinement.delta)
        ));
        s.push_str(&format!("  \"pass\": {},\n", self.pass));
        s.push_str(&format!("  \"seed\": {},\n", self.seed));
        s.push_str(&format!("  \"version\": \"{}\"\n", escape(&self.version)));
        s.push_str("}\n");
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        s.push_str("case,inputs,lhs,rhs,ratio\n");
        for (i, case) in self.cases.iter().enumerate() {
            s.push_str(&format!(
                "{},\"{}\",{},{},{}\n",
                i,
                case.inputs.replace('"', "\"\""),
                fmt17(case.lhs),
                fmt17(case.rhs),
                fmt17(case.ratio)
            ));
        }
        s.push_str(&format!(
            "summary,\"theorem={} pass={} seed={} version={}\",{},{},{}\n",
            self.theorem_id,
            self.pass,
            self.seed,
            self.version,
            fmt17(self.refinement.coarse),
            fmt17(self.refinement.fine),
            fmt17(self.max_ratio)
        ));
        s
    }

    /// One human-readable pass/fail line.
    pub fn summary_line(&self) -> String {
        format!(
            "[{}] {}  max_ratio={:.6e}  refinement_delta={:.3e}  cases={}",
            if self.pass { "PASS" } else { "FAIL" },
            self.theorem_id,
            self.max_ratio,
            self.refinement.delta,
            self.cases.len()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report() -> VerificationReport {
        VerificationReport {
            theorem_id: "E4.13".into(),
            config: "{\"n\":1}".into(),
            cases: vec![CaseRow {
                inputs: "B(c=0, r=1), x=0".into(),
                lhs: 0.9179873599073763,
                rhs: 0.9179873599073764,
                ratio: 0.9999999999999999,
            }],
            max_ratio: 0.9999999999999999,
            refinement: Refinement { coarse: 1.0, fine: 1.0, delta: 0.0 },
            pass: true,
            seed: 42,
            version: "0.1.0".into(),
        }
    }

    #[test]
    fn json_is_parseable_and_deterministic() {
        let r = report();
        let j1 = r.to_json();
        let j2 = r.to_json();
        assert_eq!(j1, j2);
        let parsed: serde_json::Value = serde_json::from_str(&j1).unwrap();
        assert_eq!(parsed["theorem_id"], "E4.13");
        assert_eq!(parsed["pass"], true);
        assert!((parsed["max_ratio"].as_f64().unwrap() - 0.9999999999999999).abs() < 1e-15);
    }

    #[test]
    fn numbers_carry_17_significant_digits() {
        let s = fmt17(0.8427007929497149);
        assert_eq!(s, "8.4270079294971489e-1");
        // round trip is exact
        let back: f64 = s.parse().unwrap();
        assert_eq!(back.to_bits(), 0.8427007929497149f64.to_bits());
    }

    #[test]
    fn csv_uses_dot_and_newline() {
        let c = report().to_csv();
        assert!(c.contains('.'));
        assert!(!c.contains('\r'));
        assert!(c.ends_with('\n'));
        assert!(c.starts_with("case,inputs,lhs,rhs,ratio\n"));
    }
}
