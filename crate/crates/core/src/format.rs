//! Line-oriented text format for quivers.
//!
//! ```text
//! # comment
//! v <id> [P] [I]
//! a <id> <source> <target>
//! t <x> <tau x>
//! s <arrow> <sigma arrow>
//! pi v <cover vertex> <base vertex>
//! pi a <cover arrow> <base arrow>
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::quiver::{ArrowId, QuiverBuilder, TranslationQuiver, VertexId};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Document {
    pub quiver: TranslationQuiver,
    pub pi_vertices: BTreeMap<VertexId, VertexId>,
    pub pi_arrows: BTreeMap<ArrowId, ArrowId>,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

struct Tokens<'a> {
    line: usize,
    items: Vec<(usize, &'a str)>,
    pos: usize,
    end_column: usize,
}

impl<'a> Tokens<'a> {
    fn new(line: usize, text: &'a str) -> Self {
        let mut items = Vec::new();
        let mut start = None;
        for (i, ch) in text.char_indices() {
            if ch.is_whitespace() {
                if let Some(s) = start.take() {
                    items.push((s, &text[s..i]));
                }
            } else if start.is_none() {
                start = Some(i);
            }
        }
        if let Some(s) = start {
            items.push((s, &text[s..]));
        }
        let end_column = text.chars().count() + 1;
        Tokens { line, items, pos: 0, end_column }
    }

    fn column(&self, byte: usize, text: &str) -> usize {
        text[..byte].chars().count() + 1
    }

    fn next_word(&mut self, text: &str, what: &str) -> Result<(usize, &'a str)> {
        match self.items.get(self.pos) {
            Some(&(b, w)) => {
                self.pos += 1;
                Ok((self.column(b, text), w))
            }
            None => Err(err(self.line, self.end_column, format!("expected {what}"))),
        }
    }

    fn id(&mut self, text: &str, what: &str) -> Result<u32> {
        let (col, w) = self.next_word(text, what)?;
        w.parse::<u32>().map_err(|_| err(self.line, col, format!("expected {what}, found `{w}`")))
    }

    fn rest(&mut self) -> Vec<(usize, &'a str)> {
        let r = self.items[self.pos..].to_vec();
        self.pos = self.items.len();
        r
    }
}

/// Parses a plain quiver file; `pi` lines are rejected.
pub fn parse(text: &str) -> Result<TranslationQuiver> {
    let (doc, first_pi) = parse_inner(text)?;
    if let Some((line, col)) = first_pi {
        return Err(err(line, col, "covering map lines are only allowed in cover files"));
    }
    Ok(doc.quiver)
}

/// Parses a quiver file that may carry a covering map.
pub fn parse_document(text: &str) -> Result<Document> {
    Ok(parse_inner(text)?.0)
}

fn parse_inner(text: &str) -> Result<(Document, Option<(usize, usize)>)> {
    let mut b = QuiverBuilder::new();
    let mut pi_vertices = BTreeMap::new();
    let mut pi_arrows = BTreeMap::new();
    let mut first_pi = None;
    // declaration line per id, to attribute builder errors to a line
    let mut vertex_line: BTreeMap<u32, usize> = BTreeMap::new();
    let mut arrow_line: BTreeMap<u32, usize> = BTreeMap::new();
    let mut refs: Vec<(usize, usize, char, u32)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut t = Tokens::new(line, content);
        if t.items.is_empty() {
            continue;
        }
        let (kcol, keyword) = t.next_word(content, "keyword")?;
        match keyword {
            "v" => {
                let (col, w) = t.next_word(content, "vertex id")?;
                let id: u32 = w.parse().map_err(|_| err(line, col, format!("expected vertex id, found `{w}`")))?;
                let (mut p, mut i) = (false, false);
                for (b0, flag) in t.rest() {
                    let c = content[..b0].chars().count() + 1;
                    match flag {
                        "P" if !p => p = true,
                        "I" if !i => i = true,
                        _ => return Err(err(line, c, format!("unexpected `{flag}`"))),
                    }
                }
                if vertex_line.insert(id, line).is_some() {
                    return Err(err(line, col, format!("duplicate vertex id {id}")));
                }
                b.vertex(id, p, i);
            }
            "a" => {
                let col = t.items.get(t.pos).map_or(t.end_column, |&(b0, _)| t.column(b0, content));
                let id = t.id(content, "arrow id")?;
                let s_col = t.items.get(t.pos).map(|&(b0, _)| t.column(b0, content));
                let s = t.id(content, "source vertex")?;
                let d_col = t.items.get(t.pos).map(|&(b0, _)| t.column(b0, content));
                let d = t.id(content, "target vertex")?;
                refs.push((line, s_col.unwrap_or(1), 'v', s));
                refs.push((line, d_col.unwrap_or(1), 'v', d));
                if arrow_line.insert(id, line).is_some() {
                    return Err(err(line, col, format!("duplicate arrow id {id}")));
                }
                b.arrow(id, s, d);
            }
            "t" => {
                let x_col = t.items.get(t.pos).map(|&(b0, _)| t.column(b0, content));
                let x = t.id(content, "vertex id")?;
                let y_col = t.items.get(t.pos).map(|&(b0, _)| t.column(b0, content));
                let y = t.id(content, "vertex id")?;
                refs.push((line, x_col.unwrap_or(1), 'v', x));
                refs.push((line, y_col.unwrap_or(1), 'v', y));
                b.tau(x, y);
            }
            "s" => {
                let x_col = t.items.get(t.pos).map(|&(b0, _)| t.column(b0, content));
                let x = t.id(content, "arrow id")?;
                let y_col = t.items.get(t.pos).map(|&(b0, _)| t.column(b0, content));
                let y = t.id(content, "arrow id")?;
                refs.push((line, x_col.unwrap_or(1), 'a', x));
                refs.push((line, y_col.unwrap_or(1), 'a', y));
                b.sigma(x, y);
            }
            "pi" => {
                first_pi.get_or_insert((line, kcol));
                let (col, kind) = t.next_word(content, "`v` or `a`")?;
                let c = t.id(content, "cover id")?;
                let base = t.id(content, "base id")?;
                let dup = match kind {
                    "v" => pi_vertices.insert(c, base).is_some(),
                    "a" => pi_arrows.insert(c, base).is_some(),
                    _ => return Err(err(line, col, format!("expected `v` or `a`, found `{kind}`"))),
                };
                if dup {
                    return Err(err(line, col, format!("duplicate covering entry for {c}")));
                }
            }
            other => return Err(err(line, kcol, format!("unknown declaration `{other}`"))),
        }
        if let Some(&(b0, w)) = t.items.get(t.pos) {
            return Err(err(line, t.column(b0, content), format!("trailing `{w}`")));
        }
    }

    for &(line, col, kind, id) in &refs {
        let known = match kind {
            'v' => vertex_line.contains_key(&id),
            _ => arrow_line.contains_key(&id),
        };
        if !known {
            let what = if kind == 'v' { "vertex" } else { "arrow" };
            return Err(err(line, col, format!("undeclared {what} {id}")));
        }
    }
    let quiver = b.build().map_err(|e| err(1, 1, e.to_string()))?;
    Ok((Document { quiver, pi_vertices, pi_arrows }, first_pi))
}

/// Canonical text: vertices, arrows, tau, sigma, each sorted by id.
pub fn serialize(tq: &TranslationQuiver) -> String {
    let mut out = String::new();
    for v in tq.vertices() {
        let _ = write!(out, "v {v}");
        if tq.is_projective(v) {
            out.push_str(" P");
        }
        if tq.is_injective(v) {
            out.push_str(" I");
        }
        out.push('\n');
    }
    for a in tq.arrows() {
        let _ = writeln!(out, "a {} {} {}", a.id, a.source, a.target);
    }
    for (x, t) in tq.tau_pairs() {
        let _ = writeln!(out, "t {x} {t}");
    }
    for (a, s) in tq.sigma_pairs() {
        let _ = writeln!(out, "s {a} {s}");
    }
    out
}

pub fn serialize_document(doc: &Document) -> String {
    let mut out = serialize(&doc.quiver);
    for (c, b) in &doc.pi_vertices {
        let _ = writeln!(out, "pi v {c} {b}");
    }
    for (c, b) in &doc.pi_arrows {
        let _ = writeln!(out, "pi a {c} {b}");
    }
    out
}

/// Textual normal form: comments and blank lines dropped, whitespace
/// collapsed, flags ordered, lines grouped by keyword and sorted by ids.
/// Works on the raw text, without going through the parser.
pub fn normalize(text: &str) -> String {
    let mut groups: [Vec<(Vec<u64>, String)>; 6] = Default::default();
    for raw in text.lines() {
        let content = raw.split('#').next().unwrap_or("");
        let words: Vec<&str> = content.split_whitespace().collect();
        let Some(&kw) = words.first() else { continue };
        let nums = |ws: &[&str]| ws.iter().filter_map(|w| w.parse::<u64>().ok()).collect::<Vec<_>>();
        let (slot, line) = match kw {
            "v" => {
                let mut s = format!("v {}", words.get(1).copied().unwrap_or(""));
                if words[2..].contains(&"P") {
                    s.push_str(" P");
                }
                if words[2..].contains(&"I") {
                    s.push_str(" I");
                }
                (0, s)
            }
            "a" => (1, words.join(" ")),
            "t" => (2, words.join(" ")),
            "s" => (3, words.join(" ")),
            "pi" if words.get(1) == Some(&"v") => (4, words.join(" ")),
            _ => (5, words.join(" ")),
        };
        groups[slot].push((nums(&words[1..]), line));
    }
    let mut out = String::new();
    for g in groups.iter_mut() {
        g.sort();
        for (_, l) in g.iter() {
            out.push_str(l);
            out.push('\n');
        }
    }
    out
}
