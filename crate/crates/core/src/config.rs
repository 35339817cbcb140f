//! Grid configuration files.
//!
//! One `key = value` per line; `#` starts a comment. Lists are
//! comma-separated and integer lists accept ranges such as `1-4`. Keys
//! left out keep their value from [`GridConfig::standard`].
//!
//! ```text
//! theorems = 1-11        # or "all"
//! d = 1, 3, 4, 5
//! chars = all            # all | primitive | labels separated by ';'
//! r = 3, 4, 5, 7
//! j = 1
//! w = 1-4                # values each w-component ranges over
//! n_max = 6
//! y_points = grid        # grid, or one rational per y-variable
//! modes = as-stated, normalized
//! format = json
//! ```

use crate::error::{Error, Result};
use crate::exactnum::Rational;
use crate::identities::{CharSelector, GridConfig, Mode, YSpec};
use crate::report::Format;

fn int_list(v: &str) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for part in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let num = |s: &str| s.trim().parse::<u64>().map_err(|_| Error::Parse(format!("not an integer: {s:?}")));
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b) = (num(a)?, num(b)?);
                if a > b {
                    return Err(Error::Parse(format!("empty range {part:?}")));
                }
                out.extend(a..=b);
            }
            None => out.push(num(part)?),
        }
    }
    Ok(out)
}

/// Parses a character selector: `all`, `primitive`, `trivial`, or labels
/// such as `1` or `0,1;1,1`.
pub fn parse_chars(v: &str) -> Result<CharSelector> {
    match v.trim() {
        "all" => Ok(CharSelector::All),
        "primitive" => Ok(CharSelector::Primitive),
        s => {
            let labels = s
                .split(';')
                .map(|l| match l.trim() {
                    "trivial" | "" => Ok(vec![]),
                    l => int_list(l),
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(CharSelector::Labels(labels))
        }
    }
}

/// Parses a grid file; returns the grid and the requested output format.
pub fn parse_grid(text: &str) -> Result<(GridConfig, Option<Format>)> {
    let mut cfg = GridConfig::standard();
    let mut format = None;
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let at = |e: Error| Error::Parse(format!("line {}: {}", no + 1, e.to_string().trim_start_matches("parse error: ")));
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", no + 1)))?;
        let value = value.trim();
        let res: Result<()> = (|| {
            match key.trim() {
                "theorems" => {
                    cfg.theorems = if value == "all" {
                        (1..=11).collect()
                    } else {
                        int_list(value)?
                            .into_iter()
                            .map(|t| u8::try_from(t).map_err(|_| Error::Parse(format!("no theorem {t}"))))
                            .collect::<Result<_>>()?
                    }
                }
                "d" => cfg.d = int_list(value)?,
                "chars" => cfg.chars = parse_chars(value)?,
                "r" => cfg.r = int_list(value)?,
                "j" => cfg.j = int_list(value)?,
                "w" => cfg.w = int_list(value)?,
                "n_max" => {
                    cfg.n_max = value.parse().map_err(|_| Error::Parse(format!("bad n_max {value:?}")))?
                }
                "y_points" => {
                    cfg.y = if value == "grid" {
                        YSpec::Grid
                    } else {
                        YSpec::Points(
                            value
                                .split(',')
                                .map(|s| s.trim().parse::<Rational>().map_err(|_| Error::Parse(format!("bad rational {s:?}"))))
                                .collect::<Result<_>>()?,
                        )
                    }
                }
                "modes" => cfg.modes = value.split(',').map(|m| m.trim().parse::<Mode>()).collect::<Result<_>>()?,
                "format" => format = Some(value.parse()?),
                k => return Err(Error::Parse(format!("unknown key {k:?}"))),
            }
            Ok(())
        })();
        res.map_err(at)?;
    }
    cfg.validate()?;
    Ok((cfg, format))
}
