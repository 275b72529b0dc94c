use std::collections::BTreeMap;
use std::fmt;

/// A problem found in a scenario file, with the offending line when known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: Option<usize>,
    pub message: String,
}

impl Diagnostic {
    pub fn at(line: usize, message: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            message: message.into(),
        }
    }

    pub fn general(message: impl Into<String>) -> Self {
        Self {
            line: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Entry {
    pub value: String,
    pub line: usize,
}

/// One `[name]` block. Keys are consumed as they are read so that leftovers
/// can be reported as unknown.
#[derive(Debug, Clone)]
pub struct Section {
    pub name: String,
    pub line: usize,
    entries: BTreeMap<String, Entry>,
}

impl Section {
    pub fn take(&mut self, key: &str) -> Option<Entry> {
        self.entries.remove(key)
    }

    /// Remaining keys, in file order.
    pub fn leftovers(&self) -> Vec<(&str, usize)> {
        let mut keys: Vec<(&str, usize)> = self
            .entries
            .iter()
            .map(|(k, e)| (k.as_str(), e.line))
            .collect();
        keys.sort_by_key(|(_, line)| *line);
        keys
    }
}

/// Parses `key = value` lines grouped under `[section]` headers.
/// `#` and `;` start comment lines; blank lines are ignored.
pub fn parse_ini(text: &str) -> Result<Vec<Section>, Vec<Diagnostic>> {
    let mut sections: Vec<Section> = Vec::new();
    let mut errors = Vec::new();
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with(';') {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                errors.push(Diagnostic::at(line, format!("unterminated section header `{trimmed}`")));
                continue;
            };
            let name = name.trim();
            if name.is_empty() {
                errors.push(Diagnostic::at(line, "empty section name"));
                continue;
            }
            if let Some(previous) = sections.iter().find(|s| s.name == name) {
                errors.push(Diagnostic::at(
                    line,
                    format!("section [{name}] already defined on line {}", previous.line),
                ));
                continue;
            }
            sections.push(Section {
                name: name.to_string(),
                line,
                entries: BTreeMap::new(),
            });
            continue;
        }
        let Some((key, value)) = trimmed.split_once('=') else {
            errors.push(Diagnostic::at(line, format!("expected `key = value`, found `{trimmed}`")));
            continue;
        };
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() {
            errors.push(Diagnostic::at(line, "missing key before `=`"));
            continue;
        }
        let Some(section) = sections.last_mut() else {
            errors.push(Diagnostic::at(line, format!("key `{key}` appears before any section")));
            continue;
        };
        if let Some(previous) = section.entries.get(key) {
            errors.push(Diagnostic::at(
                line,
                format!("duplicate key `{key}` (first set on line {})", previous.line),
            ));
            continue;
        }
        section.entries.insert(
            key.to_string(),
            Entry {
                value: value.to_string(),
                line,
            },
        );
    }
    if errors.is_empty() {
        Ok(sections)
    } else {
        Err(errors)
    }
}
