//! `--config FILE`: `key = value` lines using flag names without the
//! leading dashes. Blank lines and `#` comments are ignored; a key may
//! repeat for repeatable flags; `true`/`false` toggle switches. Flags on
//! the command line win over the file.

use std::ffi::OsString;

use super::CliError;

/// Global options that take a value and may precede the subcommand.
const GLOBAL_WITH_VALUE: [&str; 2] = ["--config", "--format"];

fn config_path(args: &[OsString]) -> Result<Option<(usize, OsString)>, CliError> {
    for (i, a) in args.iter().enumerate().skip(1) {
        let s = a.to_string_lossy();
        if s == "--" {
            break;
        }
        if s == "--config" {
            return match args.get(i + 1) {
                Some(v) => Ok(Some((i, v.clone()))),
                None => Err(CliError::Usage("--config needs a file name".into())),
            };
        }
        if let Some(v) = s.strip_prefix("--config=") {
            return Ok(Some((i, v.into())));
        }
    }
    Ok(None)
}

fn subcommand_index(args: &[OsString]) -> Option<usize> {
    let mut i = 1;
    while i < args.len() {
        let s = args[i].to_string_lossy();
        if GLOBAL_WITH_VALUE.contains(&s.as_ref()) {
            i += 2;
            continue;
        }
        if !s.starts_with('-') {
            return Some(i);
        }
        i += 1;
    }
    None
}

fn present(args: &[OsString], flag: &str) -> bool {
    let with_eq = format!("{flag}=");
    args.iter().any(|a| {
        let s = a.to_string_lossy();
        s == flag || s.starts_with(&with_eq)
    })
}

/// Parses config text into `(line, key, value)` triples.
pub fn parse_config(text: &str) -> Result<Vec<(usize, String, String)>, CliError> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Usage(format!("config line {}: expected `key = value`, got `{line}`", n + 1)));
        };
        let key = k.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() {
            return Err(CliError::Usage(format!("config line {}: empty key", n + 1)));
        }
        out.push((n + 1, key, v.trim().trim_matches('"').to_string()));
    }
    Ok(out)
}

/// Inserts flags from the config file named by `--config` right after the
/// subcommand, skipping any flag already given on the command line.
pub fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some((_, path)) = config_path(&args)? else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::Usage(format!("cannot read config file {}: {e}", path.to_string_lossy())))?;
    let mut extra: Vec<OsString> = Vec::new();
    for (line, key, value) in parse_config(&text)? {
        if key == "config" {
            return Err(CliError::Usage(format!("config line {line}: nested config files are not supported")));
        }
        let flag = format!("--{key}");
        if present(&args, &flag) {
            continue;
        }
        match value.as_str() {
            "true" => extra.push(flag.into()),
            "false" => {}
            _ => {
                extra.push(flag.into());
                extra.push(value.into());
            }
        }
    }
    let at = subcommand_index(&args).map_or(args.len(), |i| i + 1);
    let mut out = args;
    out.splice(at..at, extra);
    Ok(out)
}
