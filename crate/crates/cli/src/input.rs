use std::fs;
use std::io::Read;
use std::path::Path;

use anyhow::{bail, Context, Result};
use drgkit::params::ArrayJson;
use drgkit::IntersectionArray;
use serde_json::Value;

/// Reads an array from `-` (stdin), an existing file, or the argument itself.
pub fn read_array(source: &str) -> Result<IntersectionArray> {
    let text = if source == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf).context("reading standard input")?;
        buf
    } else if Path::new(source).is_file() {
        fs::read_to_string(source).with_context(|| format!("reading {source}"))?
    } else {
        source.to_string()
    };
    parse_array(&text)
}

/// Accepts `{"b":[..],"c":[..]}`, any report object carrying such an
/// `array` field, or the text form `{b_0,..;c_1,..}`.
pub fn parse_array(text: &str) -> Result<IntersectionArray> {
    let text = text.trim();
    if let Ok(value) = serde_json::from_str::<Value>(text) {
        let obj = match value.get("array") {
            Some(inner) => inner.clone(),
            None => value,
        };
        let json: ArrayJson = serde_json::from_value(obj).context("array JSON needs integer lists \"b\" and \"c\"")?;
        return Ok(IntersectionArray::try_from(json)?);
    }
    let inner = text
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .unwrap_or(text);
    let Some((b, c)) = inner.split_once(';') else {
        bail!("cannot read an intersection array from {text:?}");
    };
    let list = |s: &str| -> Result<Vec<i64>> {
        s.split(',')
            .map(|x| x.trim().parse::<i64>().with_context(|| format!("bad entry {x:?}")))
            .collect()
    };
    Ok(drgkit::complete_array(&list(b)?, &list(c)?)?)
}

/// `j,D`
pub fn parse_case(s: &str) -> Result<(usize, usize), String> {
    let (j, d) = s.split_once(',').ok_or_else(|| format!("expected j,D, got {s:?}"))?;
    let j = j.trim().parse().map_err(|_| format!("bad j in {s:?}"))?;
    let d = d.trim().parse().map_err(|_| format!("bad D in {s:?}"))?;
    Ok((j, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forms_agree() {
        let a = parse_array(r#"{"b":[30,28,24],"c":[1,3,15]}"#).unwrap();
        assert_eq!(parse_array("{30,28,24;1,3,15}").unwrap(), a);
        assert_eq!(parse_array("30, 28, 24; 1, 3, 15").unwrap(), a);
        let report = serde_json::json!({ "array": a, "status": "pass" }).to_string();
        assert_eq!(parse_array(&report).unwrap(), a);
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_array("{\"b\":[1]}").is_err());
        assert!(parse_array("1,2,3").is_err());
        assert!(parse_array("{2;1,1}").is_err());
        assert_eq!(parse_case("4,7"), Ok((4, 7)));
        assert!(parse_case("4").is_err());
    }
}
