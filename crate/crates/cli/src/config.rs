use std::fs;

/// Splices `key = value` lines from `--config FILE` into the argument list.
///
/// A key becomes `--key value`; `true` and `false` switch a flag on or
/// leave it off. Keys already given on the command line are skipped, so
/// flags win over the file.
pub fn expand(args: Vec<String>) -> Result<Vec<String>, String> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let body = fs::read_to_string(&path).map_err(|e| format!("cannot read config file {path}: {e}"))?;
    let mut out = args;
    let given: Vec<String> = out.clone();
    for (lineno, line) in body.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("{path}:{}: expected key = value", lineno + 1))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key.is_empty() || key == "config" {
            return Err(format!("{path}:{}: invalid key {key:?}", lineno + 1));
        }
        let flag = format!("--{key}");
        let prefix = format!("{flag}=");
        if given.iter().any(|a| *a == flag || a.starts_with(&prefix)) {
            continue;
        }
        match value {
            "true" => out.push(flag),
            "false" => {}
            _ => {
                out.push(flag);
                out.push(value.to_string());
            }
        }
    }
    Ok(out)
}

fn config_path(args: &[String]) -> Option<String> {
    let mut iter = args.iter();
    while let Some(a) = iter.next() {
        if a == "--" {
            return None;
        }
        if a == "--config" {
            return iter.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn args(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn flags_override_file() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "# comment\nn = 4\nflip_seed=9\nquaternion = true\nrange = false").unwrap();
        let path = f.path().to_str().unwrap();
        let got = expand(args(&["granular", "superpose", "--n", "6", "--config", path])).unwrap();
        assert_eq!(
            got,
            args(&[
                "granular",
                "superpose",
                "--n",
                "6",
                "--config",
                path,
                "--flip-seed",
                "9",
                "--quaternion"
            ])
        );
    }

    #[test]
    fn missing_file_is_an_error() {
        assert!(expand(args(&["granular", "--config=/nonexistent/x.conf"])).is_err());
        assert_eq!(
            expand(args(&["granular", "cascade"])).unwrap(),
            args(&["granular", "cascade"])
        );
    }

    #[test]
    fn malformed_line_is_an_error() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "n 4").unwrap();
        let path = f.path().to_str().unwrap().to_string();
        assert!(expand(vec!["granular".into(), "--config".into(), path]).is_err());
    }
}
