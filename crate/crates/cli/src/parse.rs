//! Inline weight specs: JSON objects, `@file.json`, or the shorthand that
//! `describe()` prints, e.g. `gevrey:2`, `power:0.5(qgevrey:2)`, `assoc(gevrey:1)`,
//! `kappa:1.5(power:0.3)`, `2*logpower:1`.

use anyhow::{anyhow, bail, Context, Result};
use ultraweight::{FunctionSpec, SequenceSpec};

fn load(text: &str) -> Result<Option<String>> {
    if let Some(path) = text.strip_prefix('@') {
        let body = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
        return Ok(Some(body));
    }
    if text.trim_start().starts_with('{') {
        return Ok(Some(text.to_string()));
    }
    Ok(None)
}

pub fn sequence(text: &str) -> Result<SequenceSpec> {
    if let Some(json) = load(text)? {
        return serde_json::from_str(&json).context("sequence spec JSON");
    }
    parse_sequence(text.trim())
}

pub fn function(text: &str) -> Result<FunctionSpec> {
    if let Some(json) = load(text)? {
        return serde_json::from_str(&json).context("function spec JSON");
    }
    parse_function(text.trim())
}

/// Splits `head:param(inner)` into `(head, param, inner)`.
fn split(text: &str) -> Result<(&str, Option<&str>, Option<&str>)> {
    let (outer, inner) = match text.find('(') {
        Some(open) => {
            if !text.ends_with(')') {
                bail!("unbalanced parentheses in `{text}`");
            }
            (&text[..open], Some(&text[open + 1..text.len() - 1]))
        }
        None => (text, None),
    };
    Ok(match outer.split_once(':') {
        Some((head, param)) => (head, Some(param), inner),
        None => (outer, None, inner),
    })
}

fn number(param: Option<&str>, what: &str) -> Result<f64> {
    let p = param.ok_or_else(|| anyhow!("`{what}` needs a numeric parameter"))?;
    p.trim().parse::<f64>().with_context(|| format!("`{p}` is not a number"))
}

fn list(param: Option<&str>, what: &str) -> Result<Vec<f64>> {
    let p = param.ok_or_else(|| anyhow!("`{what}` needs a comma-separated list"))?;
    p.split(',').map(|x| x.trim().parse::<f64>().with_context(|| format!("`{x}` is not a number"))).collect()
}

fn parse_sequence(text: &str) -> Result<SequenceSpec> {
    let (head, param, inner) = split(text)?;
    let base = || -> Result<Box<SequenceSpec>> {
        Ok(Box::new(parse_sequence(inner.ok_or_else(|| anyhow!("`{head}` needs a base in parentheses"))?)?))
    };
    Ok(match head {
        "gevrey" => SequenceSpec::Gevrey { s: number(param, head)? },
        "qgevrey" => SequenceSpec::Qgevrey { q: number(param, head)? },
        "explicit" => SequenceSpec::Explicit { values: list(param, head)? },
        "quotients" => SequenceSpec::Quotients { values: list(param, head)? },
        "power" => SequenceSpec::Power { r: number(param, head)?, base: base()? },
        "shift" => SequenceSpec::Shift { eps: number(param, head)?, base: base()? },
        "hat" => SequenceSpec::Hat { base: base()? },
        "descendant" => SequenceSpec::Descendant { r: number(param, head)?, base: base()? },
        "matrix" => SequenceSpec::Matrix {
            l: number(param, head)?,
            omega: Box::new(parse_function(inner.ok_or_else(|| anyhow!("`matrix` needs a weight function"))?)?),
        },
        other => bail!("unknown sequence family `{other}`"),
    })
}

fn parse_function(text: &str) -> Result<FunctionSpec> {
    if let Some((coef, rest)) = text.split_once('*') {
        if let Ok(c) = coef.trim().parse::<f64>() {
            return Ok(match parse_function(rest.trim())? {
                FunctionSpec::Power { a, .. } => FunctionSpec::Power { a, c },
                FunctionSpec::Logpower { a, .. } => FunctionSpec::Logpower { a, c },
                _ => bail!("a coefficient is only allowed on power and logpower"),
            });
        }
    }
    let (head, param, inner) = split(text)?;
    let base = || -> Result<Box<FunctionSpec>> {
        Ok(Box::new(parse_function(inner.ok_or_else(|| anyhow!("`{head}` needs a base in parentheses"))?)?))
    };
    Ok(match head {
        "power" => FunctionSpec::Power { a: number(param, head)?, c: 1.0 },
        "logpower" => FunctionSpec::Logpower { a: number(param, head)?, c: 1.0 },
        "subst" => FunctionSpec::Subst { r: number(param, head)?, base: base()? },
        "kappa" => FunctionSpec::Kappa { r: param.map_or(Ok(1.0), |_| number(param, head))?, base: base()? },
        "normalized" => FunctionSpec::Normalized { base: base()? },
        "assoc" => FunctionSpec::Assoc {
            sequence: parse_sequence(inner.ok_or_else(|| anyhow!("`assoc` needs a sequence"))?)?,
        },
        other => bail!("unknown weight function kind `{other}`"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shorthand_matches_json() {
        let a = sequence("power:0.5(gevrey:2)").unwrap();
        let b = sequence(r#"{"family":"power","r":0.5,"base":{"family":"gevrey","s":2}}"#).unwrap();
        assert_eq!(a, b);
        let f = function("kappa:1.5(power:0.3)").unwrap();
        let g = function(r#"{"kind":"kappa","r":1.5,"base":{"kind":"power","a":0.3}}"#).unwrap();
        assert_eq!(f, g);
        assert_eq!(function("2*power:0.5").unwrap(), FunctionSpec::Power { a: 0.5, c: 2.0 });
        assert!(matches!(function("assoc(gevrey:1)").unwrap(), FunctionSpec::Assoc { .. }));
        assert_eq!(sequence("explicit:1,4,8,32").unwrap(), SequenceSpec::Explicit { values: vec![1.0, 4.0, 8.0, 32.0] });
    }

    #[test]
    fn describe_output_parses_back() {
        let m = ultraweight::WeightSequence::gevrey(2.0).unwrap().factorial_shift(0.5).unwrap().hat();
        assert_eq!(sequence(&m.describe()).unwrap(), m.to_spec());
    }

    #[test]
    fn rejects_garbage() {
        assert!(sequence("gevery:2").is_err());
        assert!(function("power").is_err());
        assert!(function("subst:2(power:1").is_err());
    }
}
