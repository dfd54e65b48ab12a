use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(usize),
    Real(f64),
    Text(String),
}

impl Value {
    fn table(&self) -> String {
        match self {
            Value::Int(v) => v.to_string(),
            Value::Real(v) => real(*v),
            Value::Text(s) => s.clone(),
        }
    }

    /// TOML literal.
    fn literal(&self) -> String {
        match self {
            Value::Int(v) => v.to_string(),
            Value::Real(v) => real(*v),
            Value::Text(s) => toml::Value::String(s.clone()).to_string(),
        }
    }
}

fn real(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        let v = if v == 0.0 { 0.0 } else { v };
        format!("{v:.12e}")
    }
}

/// Ordered key/value results of a run, rendered as an aligned table
/// followed by a `[values]` block that parses as TOML.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub title: String,
    pub rows: Vec<(String, Value)>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            rows: Vec::new(),
        }
    }

    pub fn int(&mut self, key: impl Into<String>, v: usize) {
        self.rows.push((key.into(), Value::Int(v)));
    }

    pub fn real(&mut self, key: impl Into<String>, v: f64) {
        self.rows.push((key.into(), Value::Real(v)));
    }

    pub fn text(&mut self, key: impl Into<String>, v: impl Into<String>) {
        self.rows.push((key.into(), Value::Text(v.into())));
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.rows.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn real_value(&self, key: &str) -> Option<f64> {
        match self.get(key)? {
            Value::Real(v) => Some(*v),
            Value::Int(v) => Some(*v as f64),
            Value::Text(_) => None,
        }
    }

    pub fn to_text(&self) -> String {
        let width = self.rows.iter().map(|(k, _)| k.len()).max().unwrap_or(8).max(8);
        let mut s = String::new();
        let _ = writeln!(s, "{}", self.title);
        let _ = writeln!(s);
        let _ = writeln!(s, "{:<width$}  value", "quantity");
        let _ = writeln!(s, "{}  {}", "-".repeat(width), "-".repeat(20));
        for (k, v) in &self.rows {
            let _ = writeln!(s, "{k:<width$}  {}", v.table());
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "[values]");
        for (k, v) in &self.rows {
            let _ = writeln!(s, "{k} = {}", v.literal());
        }
        s
    }
}

/// Extracts the `[values]` block of a rendered report.
pub fn parse_values(text: &str) -> Option<toml::Table> {
    let start = text.find("\n[values]\n")?;
    text[start..].parse::<toml::Table>().ok()?.remove("values").and_then(|v| match v {
        toml::Value::Table(t) => Some(t),
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_block_parses() {
        let mut r = Report::new("t");
        r.int("nodes", 9);
        r.real("ratio", f64::NAN);
        r.real("energy", -0.0);
        r.text("solver", "direct \"x\"");
        let text = r.to_text();
        let t = parse_values(&text).unwrap();
        assert_eq!(t["nodes"].as_integer(), Some(9));
        assert!(t["ratio"].as_float().unwrap().is_nan());
        assert_eq!(t["energy"].as_float(), Some(0.0));
        assert_eq!(t["solver"].as_str(), Some("direct \"x\""));
        assert!(text.lines().any(|l| l.starts_with("nodes") && l.ends_with(" 9")));
    }
}
