//! Permutation files.
//!
//! Text: `n=<n>` on the first line, the images space-separated on the second,
//! each line ending in LF. JSON: `{"n":<n>,"perm":[<images>]}` plus LF.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::Perm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PermFormat {
    #[default]
    Text,
    Json,
}

#[derive(Serialize, Deserialize)]
struct PermDoc {
    n: usize,
    perm: Vec<i64>,
}

pub fn render_perm(perm: &Perm, format: PermFormat) -> String {
    match format {
        PermFormat::Text => {
            let images: Vec<String> = perm.images().iter().map(u32::to_string).collect();
            format!("n={}\n{}\n", perm.modulus(), images.join(" "))
        }
        PermFormat::Json => {
            let doc = PermDoc { n: perm.modulus(), perm: perm.images().iter().map(|&v| v as i64).collect() };
            format!("{}\n", serde_json::to_string(&doc).expect("perm document serializes"))
        }
    }
}

/// Reads either format; a leading `{` selects JSON.
pub fn parse_perm(src: &str) -> Result<Perm> {
    let (n, images) = if src.trim_start().starts_with('{') {
        let doc: PermDoc = serde_json::from_str(src).map_err(|e| Error::Parse(format!("permutation JSON: {e}")))?;
        (doc.n, doc.perm)
    } else {
        let mut lines = src.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty permutation file".into()))?;
        let n = header
            .trim()
            .strip_prefix("n=")
            .and_then(|v| v.parse::<usize>().ok())
            .ok_or_else(|| Error::Parse(format!("expected `n=<modulus>`, found `{header}`")))?;
        let body = lines.next().unwrap_or("");
        let images = body
            .split_whitespace()
            .map(|tok| tok.parse::<i64>().map_err(|_| Error::Parse(format!("bad image `{tok}`"))))
            .collect::<Result<Vec<_>>>()?;
        if let Some(extra) = lines.find(|l| !l.trim().is_empty()) {
            return Err(Error::Parse(format!("unexpected trailing line `{extra}`")));
        }
        (n, images)
    };
    if images.len() != n {
        return Err(Error::Parse(format!("header says n={n} but {} images follow", images.len())));
    }
    Perm::from_ints(&images)
}
