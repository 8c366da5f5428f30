//! Number formatting and output sinks.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use detour_core::{Instance, Outcome, Side};

pub fn f6(x: f64) -> String {
    format!("{x:.6}")
}

/// Six decimals with trailing zeros dropped.
pub fn short(x: f64) -> String {
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

pub fn outcome_line(outcome: &Outcome) -> String {
    match outcome {
        Outcome::Edge(e) => format!("edge {} {}", f6(e.a), f6(e.b)),
        Outcome::Lottery(l) => {
            let parts: Vec<String> = l
                .support()
                .iter()
                .map(|(e, p)| format!("({},{})@{}", short(e.a), short(e.b), f6(*p)))
                .collect();
            format!("lottery {}", parts.join(" "))
        }
    }
}

pub fn locations(xs: &[f64]) -> String {
    xs.iter().map(|&x| f6(x)).collect::<Vec<_>>().join(" ")
}

/// `k,o,L,left,right` columns.
pub fn instance_fields(inst: &Instance) -> [String; 5] {
    [
        f6(inst.k()),
        f6(inst.o()),
        f6(inst.length()),
        locations(inst.left()),
        locations(inst.right()),
    ]
}

pub fn agent(side: Side, index: usize) -> String {
    format!("{side}:{index}")
}

pub fn sink(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn csv_writer(path: Option<&Path>) -> io::Result<csv::Writer<Box<dyn Write>>> {
    Ok(csv::WriterBuilder::new().from_writer(sink(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_forms() {
        assert_eq!(short(0.2), "0.2");
        assert_eq!(short(1.0), "1");
        assert_eq!(short(0.0), "0");
        assert_eq!(short(1.0 / 3.0), "0.333333");
        assert_eq!(short(-1e-9), "0");
    }
}
