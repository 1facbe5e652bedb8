//! Files written by a run: JSON report, CSV tables, gnuplot script, grids.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use waveguide_core::assembly::SparseSymmetricProblem;
use waveguide_core::curve::ArcLengthCurve;
use waveguide_core::waveguide::CoefficientFields;

use crate::error::CliError;

/// Fixed-width scientific notation used in every CSV file.
pub fn num(x: f64) -> String {
    format!("{x:.12e}")
}

pub struct OutputDir {
    root: PathBuf,
    written: Vec<PathBuf>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        Ok(Self { root: root.to_path_buf(), written: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    fn target(&mut self, relative: &str) -> Result<PathBuf, CliError> {
        let path = self.root.join(relative);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        }
        self.written.push(path.clone());
        Ok(path)
    }

    pub fn json<T: Serialize>(&mut self, relative: &str, value: &T) -> Result<(), CliError> {
        let path = self.target(relative)?;
        let mut text = serde_json::to_string_pretty(value).expect("reports serialize to JSON");
        text.push('\n');
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))
    }

    pub fn csv(&mut self, relative: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
        let path = self.target(relative)?;
        let io = |e: csv::Error| CliError::io(&path, e.into());
        let mut w = csv::Writer::from_path(&path).map_err(io)?;
        w.write_record(header).map_err(io)?;
        for row in rows {
            w.write_record(row).map_err(io)?;
        }
        w.flush().map_err(|e| CliError::io(&path, e))
    }

    pub fn text(&mut self, relative: &str, body: &str) -> Result<(), CliError> {
        let path = self.target(relative)?;
        fs::write(&path, body).map_err(|e| CliError::io(&path, e))
    }

    /// `s, x, y, kappa` over one period.
    pub fn curve(&mut self, curve: &ArcLengthCurve, samples: usize) -> Result<(), CliError> {
        let rows: Vec<Vec<String>> = curve.sample(samples).iter().map(|r| r.iter().map(|&v| num(v)).collect()).collect();
        self.csv("fields/curve.csv", &["s", "x", "y", "kappa"], &rows)
    }

    /// `s, u, h, V` at the unknowns.
    pub fn fields(&mut self, name: &str, fields: &CoefficientFields) -> Result<(), CliError> {
        let g = fields.grid;
        let mut rows = Vec::with_capacity(g.unknowns());
        for i in 0..g.n_s {
            for j in 1..g.n_u {
                let k = fields.node(i, j);
                rows.push(vec![num(g.s_node(i)), num(g.u_node(j)), num(fields.nodes.h[k]), num(fields.nodes.potential[k])]);
            }
        }
        self.csv(&format!("fields/{name}.csv"), &["s", "u", "h", "V"], &rows)
    }

    /// `s, u, value` including the zero Dirichlet rows.
    pub fn eigenvector(&mut self, name: &str, problem: &SparseSymmetricProblem, v: &[f64]) -> Result<(), CliError> {
        let g = problem.grid;
        let mut rows = Vec::with_capacity(g.n_s * (g.n_u + 1));
        for i in 0..g.n_s {
            for j in 0..=g.n_u {
                let value = if j == 0 || j == g.n_u { 0.0 } else { v[g.index(i, j)] };
                rows.push(vec![num(g.s_node(i)), num(g.u_node(j)), num(value)]);
            }
        }
        self.csv(&format!("fields/{name}.csv"), &["s", "u", "value"], &rows)
    }

    /// Stiffness triplets and, for generalized problems, the mass diagonal.
    pub fn matrices(&mut self, name: &str, problem: &SparseSymmetricProblem) -> Result<(), CliError> {
        let rows: Vec<Vec<String>> =
            problem.stiffness.triplets().map(|(i, j, v)| vec![i.to_string(), j.to_string(), num(v)]).collect();
        self.csv(&format!("matrices/{name}_stiffness.csv"), &["row", "col", "value"], &rows)?;
        if let Some(m) = problem.mass() {
            let rows: Vec<Vec<String>> = m.iter().enumerate().map(|(i, &v)| vec![i.to_string(), num(v)]).collect();
            self.csv(&format!("matrices/{name}_mass.csv"), &["row", "value"], &rows)?;
        }
        Ok(())
    }
}

/// Log-log plot of the gap column of `summary.csv` against a `C L⁻²` reference.
pub fn gap_plot_script(c_reference: f64) -> String {
    format!(
        "set datafile separator ','\n\
         set logscale xy\n\
         set xlabel 'L (periods)'\n\
         set ylabel 'E_2 - E_1'\n\
         set key top right\n\
         set grid\n\
         C = {c}\n\
         plot 'summary.csv' skip 1 using 1:4 with linespoints pt 7 title 'gap', \\\n     \
         C * x**(-2) with lines dashtype 2 title 'slope -2'\n",
        c = num(c_reference)
    )
}
