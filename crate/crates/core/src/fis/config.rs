//! Text form of a [`FisConfig`].
//!
//! ```text
//! # comments start with '#'
//! [system]
//! name = FIS1
//! grid = 1001
//!
//! [input Entropy]
//! range = 0 8
//! term Low = 0 1.7
//! term High = 8 1.7
//!
//! [output S-Dive]
//! range = 0 1
//! term Low = 0 0.2125
//! term High = 1 0.2125
//!
//! [rules]
//! IF Entropy IS Low AND SEC IS High THEN S-Dive IS Low
//! ```
//!
//! Parsing is line-oriented; runs of whitespace are equivalent to one space
//! and the keywords `IF`, `IS`, `AND`, `THEN` are case-insensitive. Input
//! sections appear in the order the system lists its inputs.

use std::fmt::Write as _;

use super::{FisConfig, FisError, FuzzyRule, GaussianMF, LinguisticVariable, DEFAULT_GRID};

enum Section {
    None,
    System,
    Input(usize),
    Output,
    Rules,
}

fn parse_err(line: usize, message: impl Into<String>) -> FisError {
    FisError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_number(line: usize, token: &str) -> Result<f64, FisError> {
    token
        .parse::<f64>()
        .map_err(|_| parse_err(line, format!("`{token}` is not a number")))
}

fn parse_pair(line: usize, value: &str) -> Result<(f64, f64), FisError> {
    let nums: Vec<&str> = value.split_whitespace().collect();
    match nums.as_slice() {
        [a, b] => Ok((parse_number(line, a)?, parse_number(line, b)?)),
        _ => Err(parse_err(line, format!("expected two numbers, got `{value}`"))),
    }
}

fn parse_rule(line: usize, text: &str) -> Result<FuzzyRule, FisError> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    let kw = |i: usize, word: &str| tokens.get(i).is_some_and(|t| t.eq_ignore_ascii_case(word));
    if !kw(0, "IF") {
        return Err(parse_err(line, "rule must start with IF"));
    }
    let mut antecedents = Vec::new();
    let mut i = 1;
    loop {
        if tokens.len() < i + 3 || !kw(i + 1, "IS") {
            return Err(parse_err(line, "expected `<var> IS <term>`"));
        }
        antecedents.push((tokens[i].to_string(), tokens[i + 2].to_string()));
        i += 3;
        if kw(i, "AND") {
            i += 1;
        } else if kw(i, "THEN") {
            i += 1;
            break;
        } else {
            return Err(parse_err(line, "expected AND or THEN"));
        }
    }
    if tokens.len() != i + 3 || !kw(i + 1, "IS") {
        return Err(parse_err(line, "expected `THEN <var> IS <term>` to end the rule"));
    }
    Ok(FuzzyRule {
        antecedents,
        consequent: (tokens[i].to_string(), tokens[i + 2].to_string()),
    })
}

/// Parses and validates a configuration document.
pub fn load_fis_config(text: &str) -> Result<FisConfig, FisError> {
    let mut name = String::from("FIS");
    let mut grid = DEFAULT_GRID;
    let mut inputs: Vec<LinguisticVariable> = Vec::new();
    let mut output: Option<LinguisticVariable> = None;
    let mut rules = Vec::new();
    let mut section = Section::None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('[') {
            let header = header
                .strip_suffix(']')
                .ok_or_else(|| parse_err(line_no, "unterminated section header"))?;
            let parts: Vec<&str> = header.split_whitespace().collect();
            section = match parts.as_slice() {
                ["system"] => Section::System,
                ["rules"] => Section::Rules,
                ["input", var] => {
                    inputs.push(LinguisticVariable::new(var, 0.0, 0.0));
                    Section::Input(inputs.len() - 1)
                }
                ["output", var] => {
                    if output.is_some() {
                        return Err(parse_err(line_no, "more than one output section"));
                    }
                    output = Some(LinguisticVariable::new(var, 0.0, 0.0));
                    Section::Output
                }
                _ => return Err(parse_err(line_no, format!("unknown section `[{header}]`"))),
            };
            continue;
        }

        if let Section::Rules = section {
            rules.push(parse_rule(line_no, line)?);
            continue;
        }

        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| parse_err(line_no, "expected `key = value`"))?;
        let key_parts: Vec<&str> = key.split_whitespace().collect();
        let value = value.trim();
        let var = match section {
            Section::System => {
                match key_parts.as_slice() {
                    ["name"] => name = value.to_string(),
                    ["grid"] => {
                        grid = value
                            .parse()
                            .map_err(|_| parse_err(line_no, format!("bad grid size `{value}`")))?
                    }
                    _ => return Err(parse_err(line_no, format!("unknown system key `{key}`"))),
                }
                continue;
            }
            Section::Input(i) => &mut inputs[i],
            Section::Output => output.as_mut().unwrap(),
            Section::None => return Err(parse_err(line_no, "entry outside of any section")),
            Section::Rules => unreachable!(),
        };
        match key_parts.as_slice() {
            ["range"] => {
                let (lo, hi) = parse_pair(line_no, value)?;
                var.lo = lo;
                var.hi = hi;
            }
            ["term", label] => {
                let (center, sigma) = parse_pair(line_no, value)?;
                var.terms.push((label.to_string(), GaussianMF::new(center, sigma)));
            }
            _ => return Err(parse_err(line_no, format!("unknown variable key `{key}`"))),
        }
    }

    let output = output.ok_or_else(|| FisError::Validation("no output section".into()))?;
    FisConfig::new(&name, inputs, output, rules, grid)
}

fn write_variable(out: &mut String, kind: &str, var: &LinguisticVariable) {
    let _ = writeln!(out, "[{kind} {}]", var.name);
    let _ = writeln!(out, "range = {:?} {:?}", var.lo, var.hi);
    for (label, mf) in &var.terms {
        let _ = writeln!(out, "term {label} = {:?} {:?}", mf.center, mf.sigma);
    }
    out.push('\n');
}

impl FisConfig {
    /// Serializes to the document format read by [`load_fis_config`].
    pub fn to_document(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "[system]\nname = {}\ngrid = {}\n", self.name, self.defuzz_grid);
        for var in &self.inputs {
            write_variable(&mut out, "input", var);
        }
        write_variable(&mut out, "output", &self.output);
        out.push_str("[rules]\n");
        for rule in &self.rules {
            let conds: Vec<String> = rule
                .antecedents
                .iter()
                .map(|(v, t)| format!("{v} IS {t}"))
                .collect();
            let _ = writeln!(
                out,
                "IF {} THEN {} IS {}",
                conds.join(" AND "),
                rule.consequent.0,
                rule.consequent.1
            );
        }
        out
    }
}
