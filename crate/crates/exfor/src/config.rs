//! Run configuration: command-line flags layered over a `key=value` file.
//!
//! Precedence is flag, then config file, then the `EXFOR_STORE`
//! environment variable (store path only), then built-in defaults. Paths
//! in a config file are relative to the file's directory.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

pub const STORE_ENV: &str = "EXFOR_STORE";
pub const DEFAULT_STORE: &str = "exfor.ndjson";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputMode {
    Ndjson,
    PrettyJson,
    Summary,
}

impl FromStr for OutputMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ndjson" => Ok(OutputMode::Ndjson),
            "pretty-json" => Ok(OutputMode::PrettyJson),
            "summary" => Ok(OutputMode::Summary),
            other => Err(format!("unknown output mode {other:?} (expected ndjson, pretty-json or summary)")),
        }
    }
}

impl fmt::Display for OutputMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputMode::Ndjson => "ndjson",
            OutputMode::PrettyJson => "pretty-json",
            OutputMode::Summary => "summary",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: expected key=value")]
    Syntax { path: PathBuf, line: usize },
    #[error("{path}:{line}: unknown key {key:?}")]
    UnknownKey { path: PathBuf, line: usize, key: String },
    #[error("{path}:{line}: bad value for {key}: {message}")]
    BadValue { path: PathBuf, line: usize, key: String, message: String },
}

/// Settings that can come from flags or a config file. `None` means unset.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Settings {
    pub inputs: Vec<PathBuf>,
    pub out: Option<PathBuf>,
    pub store: Option<PathBuf>,
    pub units: Option<PathBuf>,
    pub query_file: Option<PathBuf>,
    pub strict: Option<bool>,
    pub pretty: Option<bool>,
    pub first: Option<bool>,
    pub count: Option<bool>,
    pub output: Option<OutputMode>,
}

impl Settings {
    /// Read a config file. Recognized keys: `input` (repeatable), `out`,
    /// `store`, `units`, `query-file`, `strict`, `pretty`, `first`,
    /// `count`, `output`. Blank lines and `#` comments are ignored.
    pub fn load(path: &Path) -> Result<Settings, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        let base = path.parent().unwrap_or(Path::new(""));
        Settings::parse(&text, path, base)
    }

    pub fn parse(text: &str, path: &Path, base: &Path) -> Result<Settings, ConfigError> {
        let mut settings = Settings::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let Some((key, value)) = trimmed.split_once('=') else {
                return Err(ConfigError::Syntax { path: path.into(), line });
            };
            let (key, value) = (key.trim(), value.trim());
            let bad = |message: String| ConfigError::BadValue { path: path.into(), line, key: key.into(), message };
            let flag = || parse_bool(value).ok_or_else(|| bad(format!("{value:?} is not a boolean")));
            match key {
                "input" => settings.inputs.push(base.join(value)),
                "out" => settings.out = Some(base.join(value)),
                "store" => settings.store = Some(base.join(value)),
                "units" => settings.units = Some(base.join(value)),
                "query-file" => settings.query_file = Some(base.join(value)),
                "strict" => settings.strict = Some(flag()?),
                "pretty" => settings.pretty = Some(flag()?),
                "first" => settings.first = Some(flag()?),
                "count" => settings.count = Some(flag()?),
                "output" => settings.output = Some(value.parse().map_err(bad)?),
                _ => return Err(ConfigError::UnknownKey { path: path.into(), line, key: key.into() }),
            }
        }
        Ok(settings)
    }

    /// Fill every unset value from `lower`.
    pub fn or(self, lower: Settings) -> Settings {
        Settings {
            inputs: if self.inputs.is_empty() { lower.inputs } else { self.inputs },
            out: self.out.or(lower.out),
            store: self.store.or(lower.store),
            units: self.units.or(lower.units),
            query_file: self.query_file.or(lower.query_file),
            strict: self.strict.or(lower.strict),
            pretty: self.pretty.or(lower.pretty),
            first: self.first.or(lower.first),
            count: self.count.or(lower.count),
            output: self.output.or(lower.output),
        }
    }
}

fn parse_bool(value: &str) -> Option<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Some(true),
        "false" | "no" | "off" | "0" => Some(false),
        _ => None,
    }
}

/// Fully resolved settings for one command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    pub out: Option<PathBuf>,
    pub store: PathBuf,
    pub units: Option<PathBuf>,
    pub query_file: Option<PathBuf>,
    pub strict: bool,
    pub first: bool,
    pub count: bool,
    /// `None` lets the command pick its own default.
    pub output: Option<OutputMode>,
}

impl RunConfig {
    /// Apply defaults to merged settings. `env_store` is the value of
    /// [`STORE_ENV`], if set.
    pub fn resolve(settings: Settings, env_store: Option<PathBuf>) -> RunConfig {
        let output = match (settings.output, settings.pretty) {
            (Some(mode), _) => Some(mode),
            (None, Some(true)) => Some(OutputMode::PrettyJson),
            (None, _) => None,
        };
        RunConfig {
            inputs: settings.inputs,
            out: settings.out,
            store: settings.store.or(env_store).unwrap_or_else(|| PathBuf::from(DEFAULT_STORE)),
            units: settings.units,
            query_file: settings.query_file,
            strict: settings.strict.unwrap_or(false),
            first: settings.first.unwrap_or(false),
            count: settings.count.unwrap_or(false),
            output,
        }
    }

    pub fn output_or(&self, default: OutputMode) -> OutputMode {
        self.output.unwrap_or(default)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Settings, ConfigError> {
        Settings::parse(text, Path::new("run.conf"), Path::new("/work"))
    }

    #[test]
    fn keys_and_comments() {
        let s = parse("# run\nstore = db/x.ndjson\nstrict=yes\n\ninput=a\ninput=b\noutput=summary\n").unwrap();
        assert_eq!(s.store, Some(PathBuf::from("/work/db/x.ndjson")));
        assert_eq!(s.strict, Some(true));
        assert_eq!(s.inputs, [PathBuf::from("/work/a"), PathBuf::from("/work/b")]);
        assert_eq!(s.output, Some(OutputMode::Summary));
    }

    #[test]
    fn errors_name_the_line() {
        assert!(matches!(parse("store\n"), Err(ConfigError::Syntax { line: 1, .. })));
        assert!(matches!(parse("\nbogus=1"), Err(ConfigError::UnknownKey { line: 2, .. })));
        assert!(matches!(parse("strict=maybe"), Err(ConfigError::BadValue { .. })));
        assert!(matches!(parse("output=xml"), Err(ConfigError::BadValue { .. })));
    }

    #[test]
    fn precedence() {
        let flags = Settings { strict: Some(true), ..Settings::default() };
        let file = parse("store=from-file\nstrict=false\ncount=true").unwrap();
        let config = RunConfig::resolve(flags.or(file), Some("from-env".into()));
        assert_eq!(config.store, PathBuf::from("/work/from-file"));
        assert!(config.strict);
        assert!(config.count);

        let config = RunConfig::resolve(Settings::default(), Some("from-env".into()));
        assert_eq!(config.store, PathBuf::from("from-env"));
        let config = RunConfig::resolve(Settings::default(), None);
        assert_eq!(config.store, PathBuf::from(DEFAULT_STORE));
        assert!(!config.strict);
    }

    #[test]
    fn pretty_is_an_output_mode() {
        let config = RunConfig::resolve(Settings { pretty: Some(true), ..Settings::default() }, None);
        assert_eq!(config.output, Some(OutputMode::PrettyJson));
        let config = RunConfig::resolve(
            Settings { pretty: Some(true), output: Some(OutputMode::Summary), ..Settings::default() },
            None,
        );
        assert_eq!(config.output, Some(OutputMode::Summary));
    }
}
