//! Set files.
//!
//! ```text
//! # optional comments
//! group f2 n=12
//! 0x0
//! 0x1
//! ```
//!
//! The header names the group; every further non-blank line holds one
//! element in the group's grammar. Text after `#` is ignored. Files are
//! written with elements in ascending canonical order, so writing a parsed
//! file reproduces it byte for byte.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::set::FiniteSet;

/// Parses set-file text. `group_hint` supplies the group when the header is
/// missing and must agree with it when present.
pub fn parse_set(text: &str, group_hint: Option<GroupSpec>) -> Result<FiniteSet> {
    let mut group = None;
    let mut elems = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let at = |e: Error| Error::ParseLine { line: line_no, message: e.to_string() };
        if let Some(body) = line.strip_prefix("group") {
            if group.is_some() || !elems.is_empty() {
                return Err(at(Error::Parse("header must come first and only once".into())));
            }
            let g: GroupSpec = body.parse().map_err(at)?;
            if let Some(hint) = group_hint {
                if hint != g {
                    return Err(Error::GroupMismatch(hint, g));
                }
            }
            group = Some(g);
            continue;
        }
        let g = match group.or(group_hint) {
            Some(g) => {
                group = Some(g);
                g
            }
            None => return Err(at(Error::Parse("missing `group` header".into()))),
        };
        elems.push(g.parse_elem(line).map_err(at)?);
    }
    let group = group.or(group_hint).ok_or_else(|| Error::Parse("missing `group` header".into()))?;
    FiniteSet::new(group, elems)
}

pub fn format_set(set: &FiniteSet) -> String {
    let g = set.group();
    let mut out = format!("group {g}\n");
    for &e in set.elems() {
        let _ = writeln!(out, "{}", g.format_elem(e));
    }
    out
}

pub fn read_set(path: &Path, group_hint: Option<GroupSpec>) -> Result<FiniteSet> {
    parse_set(&std::fs::read_to_string(path)?, group_hint)
}
