//! Output reachable-set estimation as a union of reachtubes.
//!
//! Each lattice cell contributes the output box `‖y − F(c)‖∞ ≤ ε_F(c, δ)`.
//! Because the cells cover the input set and every `ε_F` is a sound bound
//! over its cell, the union contains every reachable output.
//!
//! # Tube table
//!
//! [`export_tubes`] writes comma-separated text:
//!
//! ```text
//! # input_delta=0.1
//! # outside_input=4,9
//! cell_index,center_1,center_2,radius
//! 0,-2.98,0.71,0.69
//! ```
//!
//! Lines starting with `#` carry metadata (`outside_input` lists tubes whose
//! cell center lies outside the input set). Numbers are printed with the
//! shortest representation that parses back to the same value.

use std::io::{BufRead, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{discretize_union, InputBox};
use crate::network::Mlp;
use crate::scalar::{linf_dist, Scalar};
use crate::sensitivity::{check_delta, epsilon_unchecked};

/// `{y : ‖y − center‖∞ ≤ radius}` for the lattice cell `cell_index`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReachTube<T> {
    pub cell_index: usize,
    pub center: Vec<T>,
    pub radius: T,
    /// False when the cell center lies outside the input set (grid overhang).
    pub center_in_input: bool,
}

impl<T: Scalar> ReachTube<T> {
    #[inline]
    pub fn contains(&self, y: &[T]) -> bool {
        linf_dist(y, &self.center) <= self.radius
    }

    /// Membership with a few ulps of slack, for points computed as
    /// `center ± radius`.
    pub fn contains_rounded(&self, y: &[T]) -> bool {
        let ulps = T::lit(8.0) * T::epsilon();
        y.len() == self.center.len()
            && y.iter().zip(&self.center).all(|(&v, &c)| {
                (v - c).abs() <= self.radius + ulps * (c.abs() + self.radius)
            })
    }

    /// Lower and upper corner of the tube.
    pub fn bounds(&self) -> (Vec<T>, Vec<T>) {
        (
            self.center.iter().map(|&c| c - self.radius).collect(),
            self.center.iter().map(|&c| c + self.radius).collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReachEstimate<T> {
    pub tubes: Vec<ReachTube<T>>,
    pub input_delta: T,
    pub cell_count: usize,
    pub output_dim: usize,
}

impl<T: Scalar> ReachEstimate<T> {
    pub fn contains(&self, y: &[T]) -> bool {
        contains(self, y)
    }

    /// Smallest box enclosing every tube, `None` for an empty estimate.
    pub fn bounding_box(&self) -> Option<(Vec<T>, Vec<T>)> {
        let first = self.tubes.first()?;
        let (mut lo, mut hi) = first.bounds();
        for t in &self.tubes[1..] {
            for j in 0..self.output_dim {
                lo[j] = lo[j].min(t.center[j] - t.radius);
                hi[j] = hi[j].max(t.center[j] + t.radius);
            }
        }
        Some((lo, hi))
    }

    /// Same estimate without the tube at position `pos`.
    pub fn without_tube(&self, pos: usize) -> Self {
        let mut tubes = self.tubes.clone();
        tubes.remove(pos);
        Self {
            cell_count: tubes.len(),
            tubes,
            ..*self
        }
    }
}

pub(crate) fn check_boxes<T: Scalar>(net: &Mlp<T>, boxes: &[InputBox<T>]) -> Result<()> {
    match boxes.iter().find(|b| b.dim() != net.input_dim()) {
        Some(b) => Err(Error::DimensionMismatch {
            context: "input box",
            expected: net.input_dim(),
            found: b.dim(),
        }),
        None => Ok(()),
    }
}

/// Reachtubes for every lattice cell of radius `delta` over the union of
/// `boxes`. Cells are processed in parallel on the current rayon pool; the
/// tube list is always in cell-index order.
pub fn output_reach<T: Scalar>(net: &Mlp<T>, boxes: &[InputBox<T>], delta: T) -> Result<ReachEstimate<T>> {
    check_delta(delta, true)?;
    check_boxes(net, boxes)?;
    let cells = discretize_union(boxes, delta)?;
    let tubes: Vec<ReachTube<T>> = cells
        .par_iter()
        .enumerate()
        .map(|(i, cell)| ReachTube {
            cell_index: i,
            center: net.eval_unchecked(&cell.center),
            radius: epsilon_unchecked(net, &cell.center, delta),
            center_in_input: boxes.iter().any(|b| b.contains(&cell.center)),
        })
        .collect();
    Ok(ReachEstimate {
        cell_count: tubes.len(),
        tubes,
        input_delta: delta,
        output_dim: net.output_dim(),
    })
}

/// Closed membership of `y` in the tube union.
pub fn contains<T: Scalar>(est: &ReachEstimate<T>, y: &[T]) -> bool {
    y.len() == est.output_dim && est.tubes.iter().any(|t| t.contains(y))
}

pub fn export_tubes<T: Scalar, W: Write>(est: &ReachEstimate<T>, mut sink: W) -> Result<()> {
    writeln!(sink, "# input_delta={}", est.input_delta)?;
    let outside: Vec<String> = est
        .tubes
        .iter()
        .filter(|t| !t.center_in_input)
        .map(|t| t.cell_index.to_string())
        .collect();
    if !outside.is_empty() {
        writeln!(sink, "# outside_input={}", outside.join(","))?;
    }
    let mut header = String::from("cell_index");
    for j in 1..=est.output_dim {
        header.push_str(&format!(",center_{j}"));
    }
    header.push_str(",radius");
    writeln!(sink, "{header}")?;
    for t in &est.tubes {
        let mut row = t.cell_index.to_string();
        for c in &t.center {
            row.push_str(&format!(",{c}"));
        }
        row.push_str(&format!(",{}", t.radius));
        writeln!(sink, "{row}")?;
    }
    sink.flush()?;
    Ok(())
}

fn parse_num<T: Scalar>(s: &str, line: usize) -> Result<T> {
    s.trim().parse::<T>().map_err(|_| Error::MalformedTubes {
        line,
        reason: format!("`{s}` is not a number"),
    })
}

/// Inverse of [`export_tubes`].
pub fn import_tubes<T: Scalar, R: BufRead>(source: R) -> Result<ReachEstimate<T>> {
    let mut input_delta = None;
    let mut outside = std::collections::HashSet::new();
    let mut output_dim = None;
    let mut tubes = Vec::new();
    for (n, line) in source.lines().enumerate() {
        let line = line?;
        let lineno = n + 1;
        let bad = |reason: String| Error::MalformedTubes { line: lineno, reason };
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(meta) = trimmed.strip_prefix('#') {
            if let Some((key, value)) = meta.trim().split_once('=') {
                match key.trim() {
                    "input_delta" => input_delta = Some(parse_num::<T>(value, lineno)?),
                    "outside_input" => {
                        for v in value.split(',') {
                            let idx = v.trim().parse::<usize>().map_err(|_| bad(format!("bad index `{v}`")))?;
                            outside.insert(idx);
                        }
                    }
                    _ => {}
                }
            }
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        let Some(m) = output_dim else {
            if fields.first().map(|f| f.trim()) != Some("cell_index") || fields.len() < 3 {
                return Err(bad("expected header `cell_index,center_1,...,radius`".into()));
            }
            output_dim = Some(fields.len() - 2);
            continue;
        };
        if fields.len() != m + 2 {
            return Err(bad(format!("expected {} fields, found {}", m + 2, fields.len())));
        }
        let cell_index = fields[0].trim().parse::<usize>().map_err(|_| bad("bad cell_index".into()))?;
        let center = fields[1..=m]
            .iter()
            .map(|f| parse_num::<T>(f, lineno))
            .collect::<Result<Vec<T>>>()?;
        let radius = parse_num::<T>(fields[m + 1], lineno)?;
        tubes.push(ReachTube {
            cell_index,
            center,
            radius,
            center_in_input: !outside.contains(&cell_index),
        });
    }
    let output_dim = output_dim.ok_or(Error::MalformedTubes {
        line: 0,
        reason: "missing header".into(),
    })?;
    let input_delta = input_delta.ok_or(Error::MalformedTubes {
        line: 0,
        reason: "missing `# input_delta=` line".into(),
    })?;
    Ok(ReachEstimate {
        cell_count: tubes.len(),
        tubes,
        input_delta,
        output_dim,
    })
}
