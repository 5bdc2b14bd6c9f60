//! The `.psm` text format.
//!
//! ```text
//! # comment
//! n 3
//! 1: +2 +3 -2 -3
//! 2: -1 +3 +1 -3
//! 3: -1 -2 +1 +2
//! ```
//!
//! `#` starts a comment, blank lines are ignored, rows may appear in any
//! order and in any rotation. The serializer writes rows in ascending label
//! order, each rotated to start with its minimal entry (`+` before `-`, then
//! ascending label).

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::matrix::{IntersectionMatrix, Label, SignedEntry};

/// Version tag written by tools that emit `.psm` files.
pub const PSM_VERSION_COMMENT: &str = "# psm 1";

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

/// Whitespace-separated tokens of `line` with their 1-based columns.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    line.split_whitespace()
        .map(move |tok| (tok.as_ptr() as usize - line.as_ptr() as usize + 1, tok))
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(p) => &line[..p],
        None => line,
    }
}

/// Parses one `.psm` matrix and validates it.
pub fn parse_matrix(text: &str) -> Result<IntersectionMatrix> {
    let mut blocks = parse_many(text)?;
    match blocks.len() {
        1 => Ok(blocks.pop().expect("one block")),
        0 => Err(syntax(1, 1, "expected `n <count>` header")),
        _ => Err(syntax(1, 1, "file holds more than one matrix")),
    }
}

/// Header line, declared size and rows of a block being read.
type Block = (usize, usize, Vec<(Label, Vec<SignedEntry>)>);

/// Parses a stream of `.psm` blocks (as written by the census), each
/// starting with its own `n <count>` header.
pub fn parse_many(text: &str) -> Result<Vec<IntersectionMatrix>> {
    let mut out = Vec::new();
    let mut current: Option<Block> = None;
    let mut last_line = 0;

    let finish = |block: Block, at: usize| -> Result<IntersectionMatrix> {
        let (header_line, n, rows) = block;
        if rows.len() != n {
            return Err(syntax(
                at,
                1,
                format!(
                    "header on line {header_line} announces {n} rows, found {}",
                    rows.len()
                ),
            ));
        }
        IntersectionMatrix::new(rows)
    };

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        last_line = lineno;
        let line = strip_comment(raw);
        let toks: Vec<(usize, &str)> = tokens(line).collect();
        if toks.is_empty() {
            continue;
        }

        if toks[0].1 == "n" {
            if let Some(block) = current.take() {
                out.push(finish(block, lineno)?);
            }
            let (col, count) = toks
                .get(1)
                .ok_or_else(|| syntax(lineno, toks[0].0, "missing curve count after `n`"))?;
            let n = count
                .parse::<usize>()
                .map_err(|_| syntax(lineno, *col, format!("invalid curve count `{count}`")))?;
            if n == 0 {
                return Err(syntax(lineno, *col, "curve count must be at least 1"));
            }
            if let Some((col, tok)) = toks.get(2) {
                return Err(syntax(lineno, *col, format!("unexpected token `{tok}`")));
            }
            current = Some((lineno, n, Vec::new()));
            continue;
        }

        let Some((_, n, rows)) = current.as_mut() else {
            return Err(syntax(lineno, toks[0].0, "expected `n <count>` header"));
        };

        let (col, head) = toks[0];
        let (label_text, rest_of_head) = match head.find(':') {
            Some(p) => (&head[..p], &head[p + 1..]),
            None => return Err(syntax(lineno, col, "expected `<label>:`")),
        };
        let label = label_text
            .parse::<Label>()
            .map_err(|_| syntax(lineno, col, format!("invalid row label `{label_text}`")))?;

        let mut entries = Vec::new();
        let mut push = |c: usize, tok: &str| -> Result<()> {
            let e = tok
                .parse::<SignedEntry>()
                .map_err(|m| syntax(lineno, c, m))?;
            entries.push(e);
            Ok(())
        };
        if !rest_of_head.is_empty() {
            push(col + label_text.len() + 1, rest_of_head)?;
        }
        for (c, tok) in &toks[1..] {
            push(*c, tok)?;
        }
        if rows.len() == *n {
            return Err(syntax(lineno, col, format!("more than {n} rows")));
        }
        rows.push((label, entries));
    }

    if let Some(block) = current.take() {
        out.push(finish(block, last_line.max(1))?);
    }
    Ok(out)
}

/// Serializes a matrix without comments.
pub fn to_psm(matrix: &IntersectionMatrix) -> String {
    to_psm_with_comments(matrix, &[])
}

/// Serializes a matrix preceded by `# <comment>` lines.
pub fn to_psm_with_comments(matrix: &IntersectionMatrix, comments: &[String]) -> String {
    let mut s = String::new();
    for c in comments {
        let _ = writeln!(s, "# {c}");
    }
    let normal = matrix.normalized();
    let _ = writeln!(s, "n {}", normal.n());
    for (label, row) in normal.rows() {
        let _ = write!(s, "{label}:");
        for e in row {
            let _ = write!(s, " {e}");
        }
        s.push('\n');
    }
    s
}
