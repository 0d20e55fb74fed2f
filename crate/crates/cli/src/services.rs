use ckab::dsl::Pos;
use ckab::engine::TableBackend;

use crate::CliError;

/// Reads a service table: one `f(a, b) = v` entry per line, `#` comments.
pub fn parse_service_table(name: &str, text: &str) -> Result<TableBackend, CliError> {
    let mut table = TableBackend::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let col = raw.len() - raw.trim_start().len() + 1;
        let at = Pos::new(i + 1, col);
        let bad = || CliError::spec_at(name, at, format!("expected `f(a, b) = v`, found `{line}`"));
        let (call, value) = line.split_once('=').ok_or_else(bad)?;
        let (func, args) = call.trim().split_once('(').ok_or_else(bad)?;
        let args = args.trim().strip_suffix(')').ok_or_else(bad)?;
        let args: Vec<&str> = args
            .split(',')
            .map(str::trim)
            .filter(|a| !a.is_empty())
            .collect();
        let value = value.trim();
        let ident = |s: &str| {
            !s.is_empty()
                && s.chars()
                    .all(|c| c.is_alphanumeric() || c == '_' || c == '#')
        };
        if !ident(func.trim()) || !ident(value) || !args.iter().all(|a| ident(a)) {
            return Err(bad());
        }
        table.insert(func.trim(), &args, value);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ckab::engine::ServiceBackend;

    #[test]
    fn entries_and_errors() {
        let t = parse_service_table("s.tbl", "# times\nnewTTD(w1, t5) = t7\n\n").unwrap();
        assert_eq!(t.call("newTTD", &["w1", "t5"]).unwrap(), "t7");
        let e = parse_service_table("s.tbl", "ok(a) = b\n  broken(a = b\n").unwrap_err();
        assert!(e.to_string().starts_with("s.tbl:2:3: error: "), "{e}");
    }
}
