//! Instance file readers and writer.
//!
//! Native format: a header line `n_vertices n_edges capacity depot`, then one
//! `u v cost demand` line per edge. Lines starting with `#` and blank lines
//! are ignored. Vertex ids are 0-based.
//!
//! Classic format: the key/value layout of the common CARP benchmark sets
//! (`VERTICES : 12`, `LISTA_ARISTAS_REQ :` followed by
//! `( 1, 2) coste 13 demanda 1` lines, ...). Vertex ids are 1-based.

use std::path::{Path, PathBuf};

use crate::error::{CarpError, Result};
use crate::model::{RawEdge, RawInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceFormat {
    Native,
    Classic,
}

pub fn read_instance(path: &Path, format: InstanceFormat) -> Result<RawInstance> {
    match format {
        InstanceFormat::Native => parse_instance(path),
        InstanceFormat::Classic => parse_classic_format(path),
    }
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CarpError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn parse_instance(path: &Path) -> Result<RawInstance> {
    parse_native_str(&read_text(path)?, path)
}

pub fn parse_classic_format(path: &Path) -> Result<RawInstance> {
    parse_classic_str(&read_text(path)?, path)
}

const SCOPE: &str = "demand must be 0 or 1 (equal-demand scope)";

struct Token<'a> {
    text: &'a str,
    column: usize,
}

/// Whitespace-separated tokens with 1-based character columns.
fn tokens(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    let mut column = 0;
    let mut start_col = 0;
    for (idx, ch) in line.char_indices() {
        column += 1;
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token {
                    text: &line[s..idx],
                    column: start_col,
                });
            }
        } else if start.is_none() {
            start = Some(idx);
            start_col = column;
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &line[s..],
            column: start_col,
        });
    }
    out
}

struct Cursor<'p> {
    path: &'p Path,
    line: usize,
}

impl Cursor<'_> {
    fn error(&self, column: usize, message: impl Into<String>) -> CarpError {
        CarpError::Parse {
            path: PathBuf::from(self.path),
            line: self.line,
            column,
            message: message.into(),
        }
    }

    fn integer(&self, tok: &Token, what: &str) -> Result<usize> {
        tok.text
            .parse::<usize>()
            .map_err(|_| self.error(tok.column, format!("{what}: expected a nonnegative integer, found `{}`", tok.text)))
    }

    fn cost(&self, tok: &Token) -> Result<f64> {
        match tok.text.parse::<f64>() {
            Ok(c) if c.is_finite() && c >= 0.0 => Ok(c),
            _ => Err(self.error(
                tok.column,
                format!("cost: expected a nonnegative number, found `{}`", tok.text),
            )),
        }
    }

    fn demand(&self, tok: &Token) -> Result<u8> {
        match tok.text.parse::<u64>() {
            Ok(d @ (0 | 1)) => Ok(d as u8),
            Ok(_) => Err(self.error(tok.column, SCOPE)),
            Err(_) => Err(self.error(
                tok.column,
                format!("demand: expected an integer, found `{}`", tok.text),
            )),
        }
    }
}

pub fn parse_native_str(text: &str, path: &Path) -> Result<RawInstance> {
    let mut cur = Cursor { path, line: 0 };
    let mut header: Option<(usize, usize, usize, usize)> = None;
    let mut edges = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        cur.line = idx + 1;
        let trimmed = line.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let toks = tokens(line);
        if toks.len() != 4 {
            let column = toks.get(4).map_or(line.len().max(1), |t| t.column);
            let what = if header.is_none() {
                "header needs `n_vertices n_edges capacity depot`"
            } else {
                "edge line needs `u v cost demand`"
            };
            return Err(cur.error(column, format!("{what}, found {} fields", toks.len())));
        }
        match header {
            None => {
                let n = cur.integer(&toks[0], "vertex count")?;
                let m = cur.integer(&toks[1], "edge count")?;
                let k = cur.integer(&toks[2], "capacity")?;
                let depot = cur.integer(&toks[3], "depot")?;
                if n == 0 {
                    return Err(cur.error(toks[0].column, "vertex count must be positive"));
                }
                if k == 0 {
                    return Err(cur.error(toks[2].column, "capacity must be at least 1"));
                }
                if depot >= n {
                    return Err(cur.error(toks[3].column, format!("depot {depot} out of range [0, {n})")));
                }
                header = Some((n, m, k, depot));
            }
            Some((n, m, _, _)) => {
                if edges.len() == m {
                    return Err(cur.error(1, format!("more edge lines than the {m} declared")));
                }
                let u = cur.integer(&toks[0], "vertex")?;
                let v = cur.integer(&toks[1], "vertex")?;
                for (id, tok) in [(u, &toks[0]), (v, &toks[1])] {
                    if id >= n {
                        return Err(cur.error(tok.column, format!("vertex {id} out of range [0, {n})")));
                    }
                }
                let cost = cur.cost(&toks[2])?;
                let demand = cur.demand(&toks[3])?;
                if u == v && demand == 1 {
                    return Err(cur.error(toks[0].column, "a self-loop cannot carry demand"));
                }
                edges.push(RawEdge::new(u, v, cost, demand));
            }
        }
    }
    cur.line += 1;
    let Some((n, m, k, depot)) = header else {
        return Err(cur.error(1, "missing header line"));
    };
    if edges.len() != m {
        return Err(cur.error(1, format!("expected {m} edge lines, found {}", edges.len())));
    }
    RawInstance::new(n, edges, depot, k)
}

pub fn write_native(raw: &RawInstance) -> String {
    let mut out = format!(
        "{} {} {} {}\n",
        raw.vertex_count,
        raw.edges.len(),
        raw.capacity,
        raw.depot
    );
    for e in &raw.edges {
        out.push_str(&format!("{} {} {} {}\n", e.u, e.v, e.cost, e.demand));
    }
    out
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Header,
    Required,
    Plain,
}

const KNOWN_KEYS: [&str; 12] = [
    "NOMBRE",
    "COMENTARIO",
    "VERTICES",
    "ARISTAS_REQ",
    "ARISTAS_NOREQ",
    "VEHICULOS",
    "CAPACIDAD",
    "TIPO_COSTES_ARISTAS",
    "COSTE_TOTAL_REQ",
    "LISTA_ARISTAS_REQ",
    "LISTA_ARISTAS_NOREQ",
    "DEPOSITO",
];

pub fn parse_classic_str(text: &str, path: &Path) -> Result<RawInstance> {
    let mut cur = Cursor { path, line: 0 };
    let mut section = Section::Header;
    let mut vertices = None;
    let mut capacity = None;
    let mut depot = None;
    let mut declared_req = None;
    let mut declared_plain = None;
    let mut edges = Vec::new();
    let (mut req_count, mut plain_count) = (0usize, 0usize);

    for (idx, line) in text.lines().enumerate() {
        cur.line = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed == "END" {
            continue;
        }
        let indent = line.len() - line.trim_start().len() + 1;
        if trimmed.starts_with('(') {
            if section == Section::Header {
                return Err(cur.error(indent, "edge line outside an edge list"));
            }
            let (u, v, cost, demand) = classic_edge(&cur, line, indent)?;
            let n = vertices.ok_or_else(|| cur.error(indent, "edge list before VERTICES"))?;
            for id in [u, v] {
                if id == 0 || id > n {
                    return Err(cur.error(indent, format!("vertex {id} out of range [1, {n}]")));
                }
            }
            let demand = match (section, demand) {
                (Section::Plain, _) => 0,
                (_, None) => 1,
                (_, Some(d)) => d,
            };
            if section == Section::Required {
                req_count += 1;
            } else {
                plain_count += 1;
            }
            if u == v {
                if demand == 1 {
                    return Err(cur.error(indent, "a self-loop cannot carry demand"));
                }
                continue;
            }
            edges.push(RawEdge::new(u - 1, v - 1, cost, demand));
            continue;
        }
        let Some((key, value)) = trimmed.split_once(':') else {
            return Err(cur.error(indent, format!("expected `KEY : value`, found `{trimmed}`")));
        };
        let key = key.trim();
        let value = value.trim();
        let value_col = line.find(':').map_or(indent, |c| c + 2);
        if !KNOWN_KEYS.contains(&key) {
            return Err(cur.error(indent, format!("unknown key `{key}`")));
        }
        let number = |cur: &Cursor| -> Result<usize> {
            let tok = value.split_whitespace().next().unwrap_or("");
            tok.parse::<usize>()
                .map_err(|_| cur.error(value_col, format!("{key}: expected an integer, found `{value}`")))
        };
        match key {
            "VERTICES" => vertices = Some(number(&cur)?),
            "ARISTAS_REQ" => declared_req = Some(number(&cur)?),
            "ARISTAS_NOREQ" => declared_plain = Some(number(&cur)?),
            "CAPACIDAD" => capacity = Some(number(&cur)?),
            "DEPOSITO" => depot = Some((number(&cur)?, value_col)),
            "LISTA_ARISTAS_REQ" => section = Section::Required,
            "LISTA_ARISTAS_NOREQ" => section = Section::Plain,
            _ => {}
        }
    }
    cur.line += 1;
    let n = vertices.ok_or_else(|| cur.error(1, "missing VERTICES"))?;
    let k = capacity.ok_or_else(|| cur.error(1, "missing CAPACIDAD"))?;
    let (depot, depot_col) = depot.unwrap_or((1, 1));
    if depot == 0 || depot > n {
        return Err(cur.error(depot_col, format!("depot {depot} out of range [1, {n}]")));
    }
    if let Some(d) = declared_req.filter(|&d| d != req_count) {
        return Err(cur.error(1, format!("ARISTAS_REQ declares {d} edges, found {req_count}")));
    }
    if let Some(d) = declared_plain.filter(|&d| d != plain_count) {
        return Err(cur.error(1, format!("ARISTAS_NOREQ declares {d} edges, found {plain_count}")));
    }
    RawInstance::new(n, edges, depot - 1, k)
}

/// `( u, v) coste c [demanda d]`.
fn classic_edge(cur: &Cursor, line: &str, col: usize) -> Result<(usize, usize, f64, Option<u8>)> {
    let body = line.trim();
    let close = body
        .find(')')
        .ok_or_else(|| cur.error(col, "missing `)` in edge line"))?;
    let pair = &body[1..close];
    let (a, b) = pair
        .split_once(',')
        .ok_or_else(|| cur.error(col, "edge needs `(u, v)`"))?;
    let id = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| cur.error(col, format!("vertex: expected an integer, found `{}`", s.trim())))
    };
    let (u, v) = (id(a)?, id(b)?);
    let rest: Vec<&str> = body[close + 1..].split_whitespace().collect();
    let mut cost = None;
    let mut demand = None;
    let mut i = 0;
    while i < rest.len() {
        let value = rest
            .get(i + 1)
            .ok_or_else(|| cur.error(col, format!("`{}` needs a value", rest[i])))?;
        match rest[i] {
            "coste" => {
                cost = Some(match value.parse::<f64>() {
                    Ok(c) if c.is_finite() && c >= 0.0 => c,
                    _ => return Err(cur.error(col, format!("cost: expected a nonnegative number, found `{value}`"))),
                });
            }
            "demanda" => {
                demand = Some(match value.parse::<u64>() {
                    Ok(d @ (0 | 1)) => d as u8,
                    Ok(d) => {
                        return Err(cur.error(col, format!("demand {d}: {SCOPE}")));
                    }
                    Err(_) => return Err(cur.error(col, format!("demand: expected an integer, found `{value}`"))),
                });
            }
            other => return Err(cur.error(col, format!("unknown edge attribute `{other}`"))),
        }
        i += 2;
    }
    let cost = cost.ok_or_else(|| cur.error(col, "edge line without `coste`"))?;
    Ok((u, v, cost, demand))
}
