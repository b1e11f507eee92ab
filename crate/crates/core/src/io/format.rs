// SPDX-License-Identifier: Apache-2.0

//! The `.railnet` text format and its JSON twin.
//!
//! ```text
//! railnet 1
//! # comments run to the end of the line
//! switch s1
//! switch s2
//! track s1.stem s2.stem
//! track s1.branch_a s2.branch_a
//! track s1.branch_b s2.branch_b
//! ```
//!
//! A document whose first non-blank character is `{` is read as JSON with
//! the fields of [`NetworkDocument`]. Serialization is canonical: switches
//! in name order, tracks in network order with their ends as written.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{EndKind, EndRef, NetworkError, RailNetwork, RawEnd, RawNetwork};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{at}: {message}")]
    Schema { at: String, message: String },
    #[error(transparent)]
    Invalid(#[from] NetworkError),
}

/// A network as written: switch names and `(switch, end-name)` pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkDocument {
    pub format_version: u32,
    pub switches: Vec<String>,
    pub tracks: Vec<[(String, String); 2]>,
}

impl NetworkDocument {
    pub fn from_network(net: &RailNetwork) -> Self {
        let end = |e: EndRef| (net.name(e.switch).to_owned(), e.kind.name().to_owned());
        NetworkDocument {
            format_version: FORMAT_VERSION,
            switches: net.names().to_vec(),
            tracks: net.tracks().iter().map(|t| [end(t.a), end(t.b)]).collect(),
        }
    }

    pub fn to_raw(&self) -> Result<RawNetwork, ParseError> {
        if self.format_version != FORMAT_VERSION {
            return Err(ParseError::Schema {
                at: "format_version".into(),
                message: format!("unsupported version {}", self.format_version),
            });
        }
        let mut tracks = Vec::with_capacity(self.tracks.len());
        for (i, pair) in self.tracks.iter().enumerate() {
            let mut ends = pair.iter().enumerate().map(|(j, (switch, kind))| {
                EndKind::from_name(kind)
                    .map(|k| RawEnd::new(switch.clone(), k))
                    .ok_or_else(|| bad_end_name(format!("tracks[{i}][{j}]"), kind))
            });
            let a = ends.next().expect("two ends")?;
            let b = ends.next().expect("two ends")?;
            tracks.push((a, b));
        }
        Ok(RawNetwork {
            switches: self.switches.clone(),
            tracks,
        })
    }
}

fn bad_end_name(at: String, name: &str) -> ParseError {
    ParseError::Schema {
        at,
        message: format!("unknown end `{name}`; expected stem, branch_a or branch_b"),
    }
}

fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

/// Decodes a document without validating the network it describes.
pub fn parse_document(text: &str) -> Result<NetworkDocument, ParseError> {
    if text.trim_start().starts_with('{') {
        return serde_json::from_str(text).map_err(|e| ParseError::Syntax {
            line: e.line(),
            message: e.to_string(),
        });
    }
    let mut doc: Option<NetworkDocument> = None;
    for (i, raw_line) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw_line.split('#').next().unwrap_or("");
        let words: Vec<&str> = content.split_whitespace().collect();
        if words.is_empty() {
            continue;
        }
        let syntax = |message: String| ParseError::Syntax { line, message };
        let Some(doc) = doc.as_mut() else {
            match words.as_slice() {
                ["railnet", v] => {
                    let format_version = v.parse().map_err(|_| syntax(format!("bad version `{v}`")))?;
                    doc = Some(NetworkDocument {
                        format_version,
                        switches: Vec::new(),
                        tracks: Vec::new(),
                    });
                    continue;
                }
                _ => return Err(syntax("expected header `railnet <version>`".into())),
            }
        };
        match words.as_slice() {
            ["switch", id] if valid_id(id) => doc.switches.push((*id).to_owned()),
            ["switch", id] => return Err(syntax(format!("bad switch name `{id}`"))),
            ["track", a, b] => {
                let end = |w: &str| -> Result<(String, String), ParseError> {
                    let (s, k) = w
                        .split_once('.')
                        .filter(|(s, k)| valid_id(s) && !k.is_empty())
                        .ok_or_else(|| syntax(format!("expected <switch>.<end>, got `{w}`")))?;
                    if EndKind::from_name(k).is_none() {
                        return Err(bad_end_name(format!("line {line}"), k));
                    }
                    Ok((s.to_owned(), k.to_owned()))
                };
                let pair = [end(a)?, end(b)?];
                doc.tracks.push(pair);
            }
            [kw, ..] if *kw == "switch" || *kw == "track" => {
                return Err(syntax(format!("wrong number of fields for `{kw}`")))
            }
            [kw, ..] => return Err(syntax(format!("unknown record `{kw}`"))),
            [] => unreachable!(),
        }
    }
    doc.ok_or(ParseError::Syntax {
        line: text.lines().count().max(1),
        message: "missing header `railnet <version>`".into(),
    })
}

pub fn parse_network(text: &str) -> Result<RailNetwork, ParseError> {
    let raw = parse_document(text)?.to_raw()?;
    Ok(RailNetwork::validate(&raw)?)
}

/// Canonical text form.
pub fn serialize(net: &RailNetwork) -> String {
    let mut out = format!("railnet {FORMAT_VERSION}\n");
    for name in net.names() {
        writeln!(out, "switch {name}").expect("writing to a string");
    }
    for t in net.tracks() {
        writeln!(out, "track {} {}", net.end_label(t.a), net.end_label(t.b)).expect("writing to a string");
    }
    out
}

/// Canonical JSON form.
pub fn serialize_json(net: &RailNetwork) -> String {
    let mut out = serde_json::to_string_pretty(&NetworkDocument::from_network(net)).expect("documents serialize");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::*;

    const THETA: &str = "railnet 1\n# two switches\nswitch s1\nswitch s2\n\ntrack s1.stem s2.stem\ntrack s1.branch_a s2.branch_a   # outer\ntrack s1.branch_b s2.branch_b\n";

    #[test]
    fn theta_document() {
        let net = parse_network(THETA).unwrap();
        assert_eq!(net.track_count(), 3);
        assert_eq!(net, theta());
    }

    #[test]
    fn misspelt_end_is_a_schema_error() {
        let text = THETA.replace("s1.stem", "s1.steam");
        assert!(matches!(parse_network(&text), Err(ParseError::Schema { at, .. }) if at == "line 6"));
    }

    #[test]
    fn repeated_end() {
        let text = THETA.replace("s1.branch_b", "s1.stem");
        assert!(matches!(
            parse_network(&text),
            Err(ParseError::Invalid(NetworkError::DuplicateEnd { .. }))
        ));
    }

    #[test]
    fn syntax_errors_carry_lines() {
        assert_eq!(
            parse_document("switch s1\n").unwrap_err(),
            ParseError::Syntax {
                line: 1,
                message: "expected header `railnet <version>`".into()
            }
        );
        let e = parse_document("railnet 1\nswitch s1\ntrack s1.stem\n").unwrap_err();
        assert!(matches!(e, ParseError::Syntax { line: 3, .. }));
        let e = parse_document("railnet 1\nbogus\n").unwrap_err();
        assert!(matches!(e, ParseError::Syntax { line: 2, .. }));
        let e = parse_network("railnet 2\n").unwrap_err();
        assert!(matches!(e, ParseError::Schema { .. }));
    }

    #[test]
    fn round_trips() {
        for net in [theta(), yin_yang()] {
            let text = serialize(&net);
            assert_eq!(parse_network(&text).unwrap(), net);
            assert_eq!(serialize(&parse_network(&text).unwrap()), text);
            let json = serialize_json(&net);
            assert_eq!(parse_network(&json).unwrap(), net);
        }
    }

    #[test]
    fn json_schema_errors() {
        let json = serialize_json(&theta()).replace("\"branch_b\"", "\"leaf\"");
        assert!(matches!(parse_network(&json), Err(ParseError::Schema { at, .. }) if at == "tracks[2][0]"));
        assert!(matches!(
            parse_network("{\"format_version\": 1}"),
            Err(ParseError::Syntax { .. })
        ));
    }
}
