use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

/// Multiply values in `source` units by `factor` to express them in `target`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitRule {
    pub source: String,
    pub target: String,
    pub factor: f64,
}

impl UnitRule {
    pub fn new(source: impl Into<String>, target: impl Into<String>, factor: f64) -> Self {
        UnitRule { source: source.into(), target: target.into(), factor }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum UnitTableError {
    #[error("line {line}: expected `SOURCE TARGET FACTOR`")]
    Syntax { line: usize },
    #[error("line {line}: factor {text:?} is not a positive finite number")]
    BadFactor { line: usize, text: String },
    #[error("duplicate rule for unit {unit:?}")]
    Duplicate { unit: String },
}

/// Energies to MeV, cross sections to millibarn.
const DEFAULT_RULES: &[(&str, &str, f64)] = &[
    ("EV", "MEV", 1e-6),
    ("KEV", "MEV", 1e-3),
    ("MEV", "MEV", 1.0),
    ("GEV", "MEV", 1e3),
    ("B", "MB", 1e3),
    ("MB", "MB", 1.0),
    ("MICRO-B", "MB", 1e-3),
    ("NB", "MB", 1e-6),
];

/// Denominators marking per-nucleon (`MEV/A`) and momentum (`GEV/C`)
/// units. These are left alone rather than converted.
const QUALIFIER_DENOMINATORS: &[&str] = &["A", "C"];

/// Conversion rules for single unit tokens.
///
/// Compound units such as `B/SR` or `MB/SR/MEV` are not listed; they are
/// converted factor by factor, see [`UnitTable::rule_for`].
#[derive(Debug, Clone, PartialEq)]
pub struct UnitTable {
    rules: Vec<UnitRule>,
}

impl Default for UnitTable {
    fn default() -> Self {
        let rules = DEFAULT_RULES.iter().map(|&(s, t, f)| UnitRule::new(s, t, f)).collect();
        UnitTable { rules }
    }
}

impl UnitTable {
    pub fn empty() -> Self {
        UnitTable { rules: Vec::new() }
    }

    pub fn new(rules: Vec<UnitRule>) -> Result<Self, UnitTableError> {
        for (i, rule) in rules.iter().enumerate() {
            if !(rule.factor.is_finite() && rule.factor > 0.0) {
                return Err(UnitTableError::BadFactor { line: i + 1, text: rule.factor.to_string() });
            }
            if rules[..i].iter().any(|r| r.source == rule.source) {
                return Err(UnitTableError::Duplicate { unit: rule.source.clone() });
            }
        }
        Ok(UnitTable { rules })
    }

    /// Parse the plain-text rule format: one `SOURCE TARGET FACTOR` rule per
    /// line, `#` starting a comment.
    pub fn parse(text: &str) -> Result<Self, UnitTableError> {
        let mut rules: Vec<UnitRule> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or_default();
            let words: Vec<&str> = body.split_whitespace().collect();
            match words.as_slice() {
                [] => continue,
                [source, target, factor] => {
                    let value: f64 = factor
                        .parse()
                        .ok()
                        .filter(|f: &f64| f.is_finite() && *f > 0.0)
                        .ok_or_else(|| UnitTableError::BadFactor { line, text: factor.to_string() })?;
                    if rules.iter().any(|r| r.source == *source) {
                        return Err(UnitTableError::Duplicate { unit: source.to_string() });
                    }
                    rules.push(UnitRule::new(*source, *target, value));
                }
                _ => return Err(UnitTableError::Syntax { line }),
            }
        }
        Ok(UnitTable { rules })
    }

    /// Render in the format read by [`UnitTable::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::from("# SOURCE  TARGET  FACTOR\n");
        for rule in &self.rules {
            let _ = writeln!(out, "{:<10} {:<8} {:e}", rule.source, rule.target, rule.factor);
        }
        out
    }

    pub fn rules(&self) -> &[UnitRule] {
        &self.rules
    }

    /// The rule listed for exactly `unit`.
    pub fn get(&self, unit: &str) -> Option<&UnitRule> {
        self.rules.iter().find(|r| r.source == unit)
    }

    /// Conversion rule for a unit token, possibly compound.
    ///
    /// A compound unit `A/B/C` is read as `A` divided by `B` and `C`. Each
    /// factor with a rule is rewritten to its target; the numerator's
    /// factor multiplies and each denominator's factor divides. Unknown
    /// factors are kept unchanged. `None` when nothing is recognized, and for
    /// per-nucleon and momentum units.
    pub fn rule_for(&self, unit: &str) -> Option<UnitRule> {
        if let Some(rule) = self.get(unit) {
            return Some(rule.clone());
        }
        let parts: Vec<&str> = unit.split('/').collect();
        if parts.len() < 2 || parts.iter().any(|p| p.is_empty()) {
            return None;
        }
        if parts[1..].iter().any(|p| QUALIFIER_DENOMINATORS.contains(p)) {
            return None;
        }
        let mut recognized = false;
        let mut factor = 1.0;
        let mut target = String::with_capacity(unit.len());
        for (i, part) in parts.iter().enumerate() {
            if i > 0 {
                target.push('/');
            }
            match self.get(part) {
                Some(rule) => {
                    recognized = true;
                    target.push_str(&rule.target);
                    if i == 0 {
                        factor *= rule.factor;
                    } else {
                        factor /= rule.factor;
                    }
                }
                None => target.push_str(part),
            }
        }
        recognized.then(|| UnitRule { source: String::from(unit), target, factor })
    }
}

/// Rule for `unit` under `table`; `None` leaves the unit untouched.
pub fn unit_conversion_rule(table: &UnitTable, unit: &str) -> Option<UnitRule> {
    table.rule_for(unit.trim())
}

impl core::fmt::Display for UnitRule {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(&format!("{} -> {} (x{:e})", self.source, self.target, self.factor))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rule(unit: &str) -> Option<(String, f64)> {
        unit_conversion_rule(&UnitTable::default(), unit).map(|r| (r.target, r.factor))
    }

    #[test]
    fn energy_units() {
        assert_eq!(rule("EV"), Some(("MEV".into(), 1e-6)));
        assert_eq!(rule("KEV"), Some(("MEV".into(), 1e-3)));
        assert_eq!(rule("MEV"), Some(("MEV".into(), 1.0)));
        assert_eq!(rule("GEV"), Some(("MEV".into(), 1e3)));
    }

    #[test]
    fn cross_section_units() {
        assert_eq!(rule("B"), Some(("MB".into(), 1e3)));
        assert_eq!(rule("MB"), Some(("MB".into(), 1.0)));
        assert_eq!(rule("MICRO-B"), Some(("MB".into(), 1e-3)));
        assert_eq!(rule("NB"), Some(("MB".into(), 1e-6)));
    }

    #[test]
    fn compound_units() {
        assert_eq!(rule("B/SR"), Some(("MB/SR".into(), 1e3)));
        assert_eq!(rule("MB/MEV"), Some(("MB/MEV".into(), 1.0)));
        let (target, factor) = rule("B/KEV").unwrap();
        assert_eq!(target, "MB/MEV");
        assert!((factor - 1e6).abs() <= 1e-12 * 1e6);
        let (target, factor) = rule("MICRO-B/SR/KEV").unwrap();
        assert_eq!(target, "MB/SR/MEV");
        assert!((factor - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn unknown_units_pass_through() {
        assert_eq!(rule("ADEG"), None);
        assert_eq!(rule("NO-DIM"), None);
        assert_eq!(rule("MEV/A"), None);
        assert_eq!(rule("GEV/C"), None);
        assert_eq!(rule("B/"), None);
        assert_eq!(rule(""), None);
    }

    #[test]
    fn parse_rule_file() {
        let table = UnitTable::parse("# rules\nEV MEV 1e-6  # electronvolt\n\nB   MB 1000\n").unwrap();
        assert_eq!(table.rules().len(), 2);
        assert_eq!(table.get("B").unwrap().factor, 1000.0);
        assert_eq!(UnitTable::parse(&UnitTable::default().to_text()).unwrap(), UnitTable::default());
    }

    #[test]
    fn rule_file_errors() {
        assert_eq!(UnitTable::parse("EV MEV"), Err(UnitTableError::Syntax { line: 1 }));
        assert!(matches!(UnitTable::parse("EV MEV -1"), Err(UnitTableError::BadFactor { line: 1, .. })));
        assert!(matches!(UnitTable::parse("EV MEV x"), Err(UnitTableError::BadFactor { .. })));
        assert!(matches!(UnitTable::parse("EV MEV 1\nEV KEV 2"), Err(UnitTableError::Duplicate { .. })));
        assert!(UnitTable::new(alloc::vec![UnitRule::new("A", "B", 0.0)]).is_err());
    }
}
