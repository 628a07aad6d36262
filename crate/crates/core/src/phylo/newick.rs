//! Newick reading and writing.
//!
//! Every non-root node must carry a branch length (`label:length`). Comments
//! in square brackets are skipped, single-quoted labels are supported (`''`
//! escapes a quote) and internal node labels are parsed and discarded.

use std::collections::HashSet;

use super::tree::{NodeId, PhyloTree, TreeBuilder};
use crate::error::{Error, Result};

struct Parser<'a> {
    text: &'a str,
    pos: usize,
    builder: TreeBuilder,
    labels: HashSet<String>,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Newick {
            position: self.pos,
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn bump(&mut self) {
        if let Some(c) = self.peek() {
            self.pos += c.len_utf8();
        }
    }

    fn skip_trivia(&mut self) -> Result<()> {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => self.bump(),
                Some('[') => {
                    let start = self.pos;
                    match self.text[self.pos..].find(']') {
                        Some(off) => self.pos += off + 1,
                        None => {
                            self.pos = start;
                            return self.err("unterminated comment");
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn label(&mut self) -> Result<Option<String>> {
        self.skip_trivia()?;
        if self.peek() == Some('\'') {
            let start = self.pos;
            self.bump();
            let mut out = String::new();
            loop {
                match self.peek() {
                    None => {
                        self.pos = start;
                        return self.err("unterminated quoted label");
                    }
                    Some('\'') => {
                        self.bump();
                        if self.peek() == Some('\'') {
                            out.push('\'');
                            self.bump();
                        } else {
                            return Ok(Some(out));
                        }
                    }
                    Some(c) => {
                        out.push(c);
                        self.bump();
                    }
                }
            }
        }
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_whitespace() || "()[]':;,".contains(c) {
                break;
            }
            self.bump();
        }
        Ok((self.pos > start).then(|| self.text[start..self.pos].to_string()))
    }

    fn length(&mut self, required: bool) -> Result<Option<f64>> {
        self.skip_trivia()?;
        if self.peek() != Some(':') {
            return if required {
                self.err("missing branch length")
            } else {
                Ok(None)
            };
        }
        self.bump();
        self.skip_trivia()?;
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() || "+-.eE".contains(c) {
                self.bump();
            } else {
                break;
            }
        }
        let raw = &self.text[start..self.pos];
        match raw.parse::<f64>() {
            Ok(v) if v.is_finite() && v >= 0.0 => Ok(Some(v)),
            Ok(_) => {
                self.pos = start;
                self.err(format!("branch length `{raw}` must be finite and non-negative"))
            }
            Err(_) => {
                self.pos = start;
                self.err(if raw.is_empty() {
                    "missing branch length value".to_string()
                } else {
                    format!("invalid branch length `{raw}`")
                })
            }
        }
    }

    fn subtree(&mut self, is_root: bool) -> Result<NodeId> {
        self.skip_trivia()?;
        let node;
        if self.peek() == Some('(') {
            self.bump();
            node = self.builder.add_node(None, 0.0);
            loop {
                let child = self.subtree(false)?;
                self.builder.attach(node, child);
                self.skip_trivia()?;
                match self.peek() {
                    Some(',') => self.bump(),
                    Some(')') => {
                        self.bump();
                        break;
                    }
                    None => return self.err("unbalanced parentheses: unexpected end of input"),
                    Some(c) => return self.err(format!("expected `,` or `)`, found `{c}`")),
                }
            }
            // internal labels are ignored
            self.label()?;
        } else {
            let at = self.pos;
            let Some(label) = self.label()? else {
                return match self.peek() {
                    None => self.err("unexpected end of input"),
                    Some(c) => self.err(format!("expected a leaf label or `(`, found `{c}`")),
                };
            };
            if !self.labels.insert(label.clone()) {
                self.pos = at;
                return self.err(format!("duplicate leaf label `{label}`"));
            }
            node = self.builder.add_node(Some(label), 0.0);
        }
        if let Some(len) = self.length(!is_root)? {
            self.builder.set_length(node, len);
        }
        Ok(node)
    }
}

/// Parses a single Newick tree terminated by `;`.
pub fn parse_newick(text: &str) -> Result<PhyloTree> {
    let mut p = Parser {
        text,
        pos: 0,
        builder: TreeBuilder::new(),
        labels: HashSet::new(),
    };
    let root = p.subtree(true)?;
    p.skip_trivia()?;
    match p.peek() {
        Some(';') => p.bump(),
        Some(')') => return p.err("unbalanced parentheses: unexpected `)`"),
        None => return p.err("missing terminating `;`"),
        Some(c) => return p.err(format!("expected `;`, found `{c}`")),
    }
    p.skip_trivia()?;
    if p.peek().is_some() {
        return p.err("trailing characters after `;`");
    }
    let end = p.pos;
    p.builder.build(root).map_err(|e| Error::Newick {
        position: end,
        message: e.to_string(),
    })
}

/// Parses a file holding one tree per line; blank lines are skipped.
/// Errors carry the 1-based line number.
pub fn parse_newick_lines(text: &str) -> Result<Vec<PhyloTree>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            parse_newick(l).map_err(|e| match e {
                Error::Newick { position, message } => Error::Newick {
                    position,
                    message: format!("line {}: {message}", i + 1),
                },
                other => other,
            })
        })
        .collect()
}

fn quote_label(label: &str) -> String {
    let plain = !label.is_empty()
        && !label
            .chars()
            .any(|c| c.is_whitespace() || "()[]':;,".contains(c));
    if plain {
        label.to_string()
    } else {
        format!("'{}'", label.replace('\'', "''"))
    }
}

/// Serializes a tree; lengths use shortest round-trip decimals.
pub fn to_newick(tree: &PhyloTree) -> String {
    fn write(tree: &PhyloTree, v: NodeId, out: &mut String) {
        let node = tree.node(v);
        if node.children.is_empty() {
            out.push_str(&quote_label(node.label.as_deref().unwrap_or_default()));
        } else {
            out.push('(');
            for (i, &c) in node.children.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write(tree, c, out);
            }
            out.push(')');
        }
        if v != tree.root() {
            out.push(':');
            out.push_str(&node.length.to_string());
        }
    }
    let mut out = String::new();
    write(tree, tree.root(), &mut out);
    out.push(';');
    out
}
