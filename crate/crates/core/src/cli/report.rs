//! Line-oriented machine-readable solution report.
//!
//! ```text
//! customers 3
//! capacity 2
//! total_cost 41
//! route 0 cost 17 serve 0+ 2-
//! route 1 cost 24 serve 1+
//! ```
//!
//! Customer ids are 0-based; `+` is the stored direction of the customer
//! edge, `-` the reverse. Extra `key value...` lines are allowed and ignored
//! by the reader.

use std::fmt::Write as _;

use crate::error::{CarpError, Result};
use crate::model::{Orientation, Route, Served, Solution};

pub fn served_token(s: &Served) -> String {
    let sign = match s.orientation {
        Orientation::Forward => '+',
        Orientation::Reversed => '-',
    };
    format!("{}{sign}", s.customer)
}

/// Writes the solution lines; `extra` key/value pairs go first.
pub fn write_report(sol: &Solution, m: usize, k: usize, extra: &[(&str, String)]) -> String {
    let mut out = String::new();
    writeln!(out, "customers {m}").unwrap();
    writeln!(out, "capacity {k}").unwrap();
    for (key, value) in extra {
        writeln!(out, "{key} {value}").unwrap();
    }
    writeln!(out, "total_cost {}", sol.total_cost).unwrap();
    for (idx, r) in sol.routes.iter().enumerate() {
        let served: Vec<String> = r.served.iter().map(served_token).collect();
        writeln!(out, "route {idx} cost {} serve {}", r.cost, served.join(" ")).unwrap();
    }
    out
}

fn bad(line: usize, msg: impl std::fmt::Display) -> CarpError {
    CarpError::input(format!("report line {line}: {msg}"))
}

fn parse_served(tok: &str, line: usize) -> Result<Served> {
    let (id, orientation) = match tok.chars().last() {
        Some('+') => (&tok[..tok.len() - 1], Orientation::Forward),
        Some('-') => (&tok[..tok.len() - 1], Orientation::Reversed),
        _ => return Err(bad(line, format!("`{tok}` lacks a + or - orientation"))),
    };
    let customer = id
        .parse()
        .map_err(|_| bad(line, format!("`{tok}` is not a customer id")))?;
    Ok(Served::new(customer, orientation))
}

/// Reads back the stored routes and costs without recomputing anything, so
/// the result can be audited with `check_solution`.
pub fn read_report(text: &str) -> Result<Solution> {
    let mut routes = Vec::new();
    let mut total = None;
    for (idx, line) in text.lines().enumerate() {
        let n = idx + 1;
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.first() {
            Some(&"total_cost") => {
                let v = toks.get(1).and_then(|t| t.parse::<f64>().ok());
                total = Some(v.ok_or_else(|| bad(n, "total_cost needs a number"))?);
            }
            Some(&"route") => {
                if toks.len() < 5 || toks[2] != "cost" || toks[4] != "serve" {
                    return Err(bad(n, "expected `route <i> cost <c> serve <x>...`"));
                }
                let position: usize = toks[1].parse().map_err(|_| bad(n, "bad route index"))?;
                if position != routes.len() {
                    return Err(bad(n, format!("route {position} out of sequence")));
                }
                let cost: f64 = toks[3].parse().map_err(|_| bad(n, "bad route cost"))?;
                let served = toks[5..]
                    .iter()
                    .map(|t| parse_served(t, n))
                    .collect::<Result<Vec<_>>>()?;
                routes.push(Route { served, cost });
            }
            _ => {}
        }
    }
    let total_cost = total.ok_or_else(|| CarpError::input("report has no total_cost line"))?;
    Ok(Solution { routes, total_cost })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{check_solution, MetricInstance};

    #[test]
    fn round_trip_is_exact() {
        let inst = MetricInstance::from_points(
            (0.0, 0.0),
            &[((1.0, 0.5), (2.0, 3.0)), ((-1.0, 1.0), (-2.0, 0.3)), ((0.1, 0.2), (0.7, 0.9))],
            2,
        )
        .unwrap();
        let sol = Solution::new(vec![
            Route::new(&inst, vec![Served::forward(0), Served::new(2, Orientation::Reversed)]).unwrap(),
            Route::new(&inst, vec![Served::forward(1)]).unwrap(),
        ]);
        let text = write_report(&sol, 3, 2, &[("rpp", "h1".into())]);
        let back = read_report(&text).unwrap();
        assert_eq!(back, sol);
        assert!(check_solution(&back, &inst).is_feasible());
    }

    #[test]
    fn malformed_lines_are_rejected() {
        assert!(read_report("route 0 cost 1 serve 0+\n").is_err());
        assert!(read_report("total_cost 1\nroute 0 cost 1 serve 0\n").is_err());
        assert!(read_report("total_cost 1\nroute 1 cost 1 serve 0+\n").is_err());
        assert!(read_report("total_cost x\n").is_err());
    }
}
