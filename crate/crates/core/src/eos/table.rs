use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::jet::SpecificJet;

/// Default differencing step, in local grid cells.
pub const DEFAULT_STEP_CELLS: f64 = 2.0;

/// Specific entropy σ on a rectangular (ρ, e) grid, bilinearly interpolated.
///
/// Text format:
///
/// ```text
/// # comment
/// rho-axis: r1 r2 ... rN
/// e-axis: e1 e2 ... eM
/// <N rows of M values; row i belongs to density r_i>
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyTable {
    rho: Vec<f64>,
    e: Vec<f64>,
    values: Vec<f64>,
    step_cells: f64,
}

fn check_axis(axis: &[f64], name: &'static str) -> Result<()> {
    if axis.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "{name} needs at least 2 points, got {}",
            axis.len()
        )));
    }
    if let Some(bad) = axis.iter().position(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "{name}[{bad}] is not finite"
        )));
    }
    if let Some(i) = axis.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::AxisNotIncreasing {
            axis: name,
            index: i + 1,
        });
    }
    Ok(())
}

/// Index of the cell containing `x` (clamped to the last cell at the upper edge).
fn cell(axis: &[f64], x: f64) -> usize {
    let i = axis.partition_point(|&a| a <= x);
    i.saturating_sub(1).min(axis.len() - 2)
}

impl EntropyTable {
    pub fn new(rho: Vec<f64>, e: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_axis(&rho, "rho-axis")?;
        check_axis(&e, "e-axis")?;
        if values.len() != rho.len() * e.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} table values, got {}",
                rho.len() * e.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "table values must be finite".into(),
            ));
        }
        Ok(EntropyTable {
            rho,
            e,
            values,
            step_cells: DEFAULT_STEP_CELLS,
        })
    }

    /// Tabulate `f(ρ, e)` on the given axes.
    pub fn from_fn<F>(rho: Vec<f64>, e: Vec<f64>, mut f: F) -> Result<Self>
    where
        F: FnMut(f64, f64) -> Result<f64>,
    {
        let mut values = Vec::with_capacity(rho.len() * e.len());
        for &r in &rho {
            for &en in &e {
                values.push(f(r, en)?);
            }
        }
        Self::new(rho, e, values)
    }

    /// Differencing step in cells used for derivatives (default 2).
    pub fn with_step_cells(mut self, step_cells: f64) -> Result<Self> {
        if !(step_cells > 0.0 && step_cells.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "step_cells must be positive, got {step_cells}"
            )));
        }
        self.step_cells = step_cells;
        Ok(self)
    }

    pub fn rho_axis(&self) -> &[f64] {
        &self.rho
    }

    pub fn e_axis(&self) -> &[f64] {
        &self.e
    }

    pub fn step_cells(&self) -> f64 {
        self.step_cells
    }

    pub fn rho_range(&self) -> (f64, f64) {
        (self.rho[0], self.rho[self.rho.len() - 1])
    }

    pub fn e_range(&self) -> (f64, f64) {
        (self.e[0], self.e[self.e.len() - 1])
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.e.len() + j]
    }

    pub(crate) fn check_range(&self, rho: f64, e: f64) -> Result<()> {
        let (rlo, rhi) = self.rho_range();
        if !(rho >= rlo && rho <= rhi) {
            return Err(Error::TableRange {
                axis: "rho",
                value: rho,
                lo: rlo,
                hi: rhi,
            });
        }
        let (elo, ehi) = self.e_range();
        if !(e >= elo && e <= ehi) {
            return Err(Error::TableRange {
                axis: "e",
                value: e,
                lo: elo,
                hi: ehi,
            });
        }
        Ok(())
    }

    /// Bilinear interpolation of σ at (ρ, e).
    pub fn interpolate(&self, rho: f64, e: f64) -> Result<f64> {
        self.check_range(rho, e)?;
        let i = cell(&self.rho, rho);
        let j = cell(&self.e, e);
        let a = (rho - self.rho[i]) / (self.rho[i + 1] - self.rho[i]);
        let b = (e - self.e[j]) / (self.e[j + 1] - self.e[j]);
        let v00 = self.value(i, j);
        let v01 = self.value(i, j + 1);
        let v10 = self.value(i + 1, j);
        let v11 = self.value(i + 1, j + 1);
        Ok((1.0 - a) * ((1.0 - b) * v00 + b * v01) + a * ((1.0 - b) * v10 + b * v11))
    }

    fn steps_at(&self, rho: f64, e: f64) -> (f64, f64) {
        let i = cell(&self.rho, rho);
        let j = cell(&self.e, e);
        (
            self.step_cells * (self.rho[i + 1] - self.rho[i]),
            self.step_cells * (self.e[j + 1] - self.e[j]),
        )
    }

    /// (ρ, e) box in which every differencing stencil fits, using the widest
    /// cell of each axis.
    pub fn differentiable_box(&self) -> [(f64, f64); 2] {
        let widest = |axis: &[f64]| axis.windows(2).map(|w| w[1] - w[0]).fold(0.0_f64, f64::max);
        let hr = self.step_cells * widest(&self.rho);
        let he = self.step_cells * widest(&self.e);
        let (rlo, rhi) = self.rho_range();
        let (elo, ehi) = self.e_range();
        [(rlo + hr, rhi - hr), (elo + he, ehi - he)]
    }

    /// Whether the full differencing stencil around (ρ, e) lies inside the grid.
    pub fn stencil_fits(&self, rho: f64, e: f64) -> bool {
        if self.check_range(rho, e).is_err() {
            return false;
        }
        let (hr, he) = self.steps_at(rho, e);
        self.check_range(rho - hr, e - he).is_ok() && self.check_range(rho + hr, e + he).is_ok()
    }

    /// Central-difference jet of σ. Differences are taken across whole cells
    /// (steps H and H/2, H = step_cells × local spacing) and combined by
    /// Richardson extrapolation; on a uniform grid each difference is then an
    /// interpolated nodal difference, so the bilinear kinks do not leak in.
    pub(crate) fn difference_jet(&self, rho: f64, e: f64) -> Result<SpecificJet> {
        self.check_range(rho, e)?;
        let (hr, he) = self.steps_at(rho, e);
        for (r, en) in [(rho - hr, e - he), (rho + hr, e + he)] {
            self.check_range(r, en).map_err(|err| match err {
                Error::TableRange { axis, lo, hi, .. } => Error::TableRange {
                    axis,
                    value: if axis == "rho" { rho } else { e },
                    lo: if axis == "rho" { lo + hr } else { lo + he },
                    hi: if axis == "rho" { hi - hr } else { hi - he },
                },
                other => other,
            })?;
        }
        let f = |r: f64, en: f64| self.interpolate(r, en);
        let centre = f(rho, e)?;
        let stencil = |hr: f64, he: f64| -> Result<[f64; 5]> {
            let fr_p = f(rho + hr, e)?;
            let fr_m = f(rho - hr, e)?;
            let fe_p = f(rho, e + he)?;
            let fe_m = f(rho, e - he)?;
            let cross = f(rho + hr, e + he)? - f(rho + hr, e - he)? - f(rho - hr, e + he)?
                + f(rho - hr, e - he)?;
            Ok([
                (fr_p - fr_m) / (2.0 * hr),
                (fe_p - fe_m) / (2.0 * he),
                (fr_p - 2.0 * centre + fr_m) / (hr * hr),
                cross / (4.0 * hr * he),
                (fe_p - 2.0 * centre + fe_m) / (he * he),
            ])
        };
        let coarse = stencil(hr, he)?;
        let fine = stencil(0.5 * hr, 0.5 * he)?;
        let d: Vec<f64> = fine
            .iter()
            .zip(coarse.iter())
            .map(|(f, c)| (4.0 * f - c) / 3.0)
            .collect();
        Ok(SpecificJet {
            sigma: centre,
            d_rho: d[0],
            d_e: d[1],
            d_rho_rho: d[2],
            d_rho_e: d[3],
            d_e_e: d[4],
        })
    }

    /// Parse the text table format.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let parse_numbers = |line_no: usize, body: &str| -> Result<Vec<f64>> {
            body.split_whitespace()
                .map(|tok| {
                    tok.parse::<f64>().map_err(|_| Error::TableParse {
                        line: line_no,
                        message: format!("cannot parse `{tok}` as a number"),
                    })
                })
                .collect()
        };
        let mut axis_line = |prefix: &str, fallback_line: usize| -> Result<(usize, Vec<f64>)> {
            let (line_no, line) = lines.next().ok_or_else(|| Error::TableParse {
                line: fallback_line,
                message: format!("missing `{prefix}` line"),
            })?;
            let body = line.strip_prefix(prefix).ok_or_else(|| Error::TableParse {
                line: line_no,
                message: format!("expected a line starting with `{prefix}`"),
            })?;
            Ok((line_no, parse_numbers(line_no, body)?))
        };

        let (rho_line, rho) = axis_line("rho-axis:", 1)?;
        let (e_line, e) = axis_line("e-axis:", rho_line)?;
        check_axis(&rho, "rho-axis")?;
        check_axis(&e, "e-axis")?;

        let mut values = Vec::with_capacity(rho.len() * e.len());
        let mut rows = 0;
        let mut last_line = e_line;
        for (line_no, line) in lines {
            last_line = line_no;
            rows += 1;
            if rows > rho.len() {
                return Err(Error::TableParse {
                    line: line_no,
                    message: format!("expected {} rows, found more", rho.len()),
                });
            }
            let row = parse_numbers(line_no, line)?;
            if row.len() != e.len() {
                return Err(Error::TableParse {
                    line: line_no,
                    message: format!("expected {} values in row, found {}", e.len(), row.len()),
                });
            }
            values.extend(row);
        }
        if rows != rho.len() {
            return Err(Error::TableParse {
                line: last_line,
                message: format!("expected {} rows, found {rows}", rho.len()),
            });
        }
        Self::new(rho, e, values)
    }

    /// Emit the text format. Numbers use shortest round-trip formatting.
    pub fn to_text(&self) -> String {
        let join = |xs: &[f64]| {
            xs.iter()
                .map(|x| format!("{x:?}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        let mut out = String::new();
        let _ = writeln!(out, "rho-axis: {}", join(&self.rho));
        let _ = writeln!(out, "e-axis: {}", join(&self.e));
        for row in self.values.chunks(self.e.len()) {
            let _ = writeln!(out, "{}", join(row));
        }
        out
    }
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}
