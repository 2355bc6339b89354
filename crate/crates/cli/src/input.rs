//! Set literals and pair lists from flags, files or stdin.

use std::fs;
use std::io::{self, Read};
use std::path::Path;

use f2sumset::{Element, SetF2};

use crate::CliError;

/// Parses `src` as a set literal, naming the flag on failure.
pub fn parse_literal(flag: &str, src: &str) -> Result<SetF2, CliError> {
    src.parse::<SetF2>().map_err(|source| CliError::Literal {
        origin: flag.to_string(),
        source,
    })
}

/// Decimal or `0x` hexadecimal element value.
pub fn parse_element(src: &str) -> Result<Element, String> {
    let src = src.trim();
    let parsed = match src.strip_prefix("0x").or_else(|| src.strip_prefix("0X")) {
        Some(hex) => u32::from_str_radix(hex, 16),
        None => src.parse::<u32>(),
    };
    parsed
        .map(Element)
        .map_err(|e| format!("invalid element {src:?}: {e}"))
}

/// Reads the whole of `path`, or stdin for `-`.
pub fn read_source(path: &Path) -> Result<String, CliError> {
    if path.as_os_str() == "-" {
        let mut buf = String::new();
        io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| CliError::Io(format!("stdin: {e}")))?;
        Ok(buf)
    } else {
        fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }
}

/// One input pair; `b` is absent on single-set lines.
#[derive(Clone, Debug)]
pub struct PairInput {
    pub a: SetF2,
    pub b: Option<SetF2>,
}

/// Parses `A | B` lines. Blank lines and lines starting with `#` are skipped.
pub fn parse_pairs(text: &str) -> Result<Vec<PairInput>, CliError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let origin = |side: &str| format!("line {} ({side})", i + 1);
        let (a, b) = match line.split_once('|') {
            Some((a, b)) => (a.trim(), Some(b.trim())),
            None => (line, None),
        };
        let a = parse_literal(&origin("A"), a)?;
        let b = b.map(|b| parse_literal(&origin("B"), b)).transpose()?;
        out.push(PairInput { a, b });
    }
    Ok(out)
}

/// Pairs from `--A`/`--B` or from a `--pairs` source.
pub fn collect_pairs(
    a: Option<&str>,
    b: Option<&str>,
    pairs: Option<&Path>,
) -> Result<Vec<PairInput>, CliError> {
    match (a, pairs) {
        (Some(_), Some(_)) => Err(CliError::Usage(
            "give either --A or --pairs, not both".into(),
        )),
        (None, None) => Err(CliError::Usage("missing --A (or --pairs)".into())),
        (None, Some(path)) => {
            if b.is_some() {
                return Err(CliError::Usage("--B needs --A".into()));
            }
            parse_pairs(&read_source(path)?)
        }
        (Some(a), None) => Ok(vec![PairInput {
            a: parse_literal("--A", a)?,
            b: b.map(|b| parse_literal("--B", b)).transpose()?,
        }]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elements_in_both_radices() {
        assert_eq!(parse_element("12"), Ok(Element(12)));
        assert_eq!(parse_element("0x1f"), Ok(Element(31)));
        assert!(parse_element("-1").is_err());
    }

    #[test]
    fn pair_lines() {
        let text = "# header\n\nn=2; {0,1} | n=2; {0,2}\nn=2; {3}\n";
        let pairs = parse_pairs(text).unwrap();
        assert_eq!(pairs.len(), 2);
        assert_eq!(pairs[0].b.as_ref().unwrap().len(), 2);
        assert!(pairs[1].b.is_none());
    }

    #[test]
    fn bad_line_is_named() {
        let err = parse_pairs("n=2; {0} | n=2; {0,9}")
            .unwrap_err()
            .to_string();
        assert!(err.contains("line 1 (B)"), "{err}");
        assert!(err.contains("offset"), "{err}");
    }
}
