//! Deterministic check reports: stable key order, 17-significant-digit
//! floats, byte-identical across runs.

/// Formats a float with 17 significant digits (round-trip exact for f64).
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        return "\"nan\"".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "\"inf\"".into() } else { "\"-inf\"".into() };
    }
    format!("{x:.16e}")
}

/// Where a checked value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// A quantity the source construction claims directly.
    PaperClaim,
    /// A constant derived here and tested at sharper tolerance.
    DerivedConstant,
    /// Informational line, never a pass/fail gate.
    Info,
}

impl Provenance {
    fn as_str(&self) -> &'static str {
        match self {
            Provenance::PaperClaim => "paper-claim",
            Provenance::DerivedConstant => "derived-constant",
            Provenance::Info => "info",
        }
    }
}

/// One named check with its measured value and tolerance.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub provenance: Provenance,
}

/// A structured run report, serialized deterministically.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub title: String,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(title: &str) -> Self {
        Report { title: title.into(), ..Default::default() }
    }

    /// Records a check that passes when `|measured| <= tolerance`.
    pub fn check_abs(&mut self, name: &str, measured: f64, tolerance: f64, prov: Provenance) {
        self.checks.push(Check {
            name: name.into(),
            measured,
            tolerance,
            passed: measured.abs() <= tolerance,
            provenance: prov,
        });
    }

    /// Records a check with an explicit verdict.
    pub fn check_bool(&mut self, name: &str, measured: f64, tolerance: f64, passed: bool, prov: Provenance) {
        self.checks.push(Check { name: name.into(), measured, tolerance, passed, provenance: prov });
    }

    pub fn note(&mut self, text: &str) {
        self.notes.push(text.into());
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn merge(&mut self, other: Report) {
        self.checks.extend(other.checks);
        self.notes.extend(other.notes);
    }

    /// One `PASS`/`FAIL` line per check plus notes, for terminal output.
    pub fn render_text(&self) -> String {
        let mut out = format!("== {} ==\n", self.title);
        for c in &self.checks {
            out.push_str(&format!(
                "{} {} (measured {:.6e}, tolerance {:.6e}) [{}]\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.measured,
                c.tolerance,
                c.provenance.as_str(),
            ));
        }
        for n in &self.notes {
            out.push_str(&format!("note: {n}\n"));
        }
        out
    }

    /// Deterministic JSON: fixed key order, 17-significant-digit floats.
    pub fn to_json(&self) -> String {
        let mut out = String::from("{\n");
        out.push_str(&format!("  \"title\": {},\n", json_escape(&self.title)));
        out.push_str(&format!("  \"all_passed\": {},\n", self.all_passed()));
        out.push_str("  \"checks\": [\n");
        for (i, c) in self.checks.iter().enumerate() {
            out.push_str(&format!(
                "    {{\"name\": {}, \"measured\": {}, \"tolerance\": {}, \"passed\": {}, \"provenance\": \"{}\"}}{}\n",
                json_escape(&c.name),
                fmt_f64(c.measured),
                fmt_f64(c.tolerance),
                c.passed,
                c.provenance.as_str(),
                if i + 1 < self.checks.len() { "," } else { "" },
            ));
        }
        out.push_str("  ],\n");
        out.push_str("  \"notes\": [");
        for (i, n) in self.notes.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            out.push_str(&json_escape(n));
        }
        out.push_str("]\n}\n");
        out
    }
}

fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}
