use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::pipeline::RunOutput;
use crate::criterion::MuFunction;
use crate::dde::Trajectory;
use crate::error::{Error, Result};

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |e| Error::Io { path: path.display().to_string(), message: e.to_string() }
}

/// Rows `ln mu(t), ln x_1, ..., ln x_n` for nodes with strictly positive states.
pub fn write_rateplot<W: Write>(mut w: W, traj: &Trajectory, mu: &MuFunction) -> std::io::Result<()> {
    let mut header = String::from("lnmu_t");
    for i in 1..=traj.dim() {
        header.push_str(&format!(",ln_x{i}"));
    }
    writeln!(w, "{header}")?;
    for k in 0..traj.len() {
        let x = traj.state(k);
        if x.iter().any(|v| !(*v > 0.0)) {
            continue;
        }
        let Ok(lm) = mu.ln_eval(traj.time(k)) else { continue };
        if !lm.is_finite() {
            continue;
        }
        write!(w, "{lm:.16e}")?;
        for v in x {
            write!(w, ",{:.16e}", v.ln())?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Writes `report.json`, and `trajectory.csv` plus `rateplot.csv` when a
/// trajectory exists. Returns the paths written.
pub fn emit_outputs(out: &RunOutput, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();

    let path = dir.join("report.json");
    let json = serde_json::to_string_pretty(&out.report).map_err(|e| Error::Document(e.to_string()))?;
    fs::write(&path, json + "\n").map_err(io_err(&path))?;
    written.push(path);

    if let Some(traj) = &out.trajectory {
        let v = out.report.simulation.as_ref().map(|s| s.monitor.v.as_slice());
        let path = dir.join("trajectory.csv");
        let file = fs::File::create(&path).map_err(io_err(&path))?;
        let mut w = BufWriter::new(file);
        traj.write_csv(&mut w, v).and_then(|_| w.flush()).map_err(io_err(&path))?;
        written.push(path);

        let path = dir.join("rateplot.csv");
        let file = fs::File::create(&path).map_err(io_err(&path))?;
        let mut w = BufWriter::new(file);
        write_rateplot(&mut w, traj, &out.report.provenance.input.mu)
            .and_then(|_| w.flush())
            .map_err(io_err(&path))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rateplot_skips_nonpositive_rows() {
        let tr = Trajectory::from_nodes(
            vec![1.0, 2.0, 3.0],
            vec![vec![1.0, 1.0, 1.0], vec![0.0, 1.0, 1.0], vec![2.0, 1.0, 0.5]],
            vec![vec![0.0; 3]; 3],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_rateplot(&mut buf, &tr, &MuFunction::Log).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "lnmu_t,ln_x1,ln_x2,ln_x3");
        assert_eq!(lines.len(), 3);
        let last: Vec<f64> = lines[2].split(',').map(|s| s.parse().unwrap()).collect();
        assert!((last[0] - 4.0_f64.ln().ln()).abs() < 1e-15);
        assert!((last[1] - 2.0_f64.ln()).abs() < 1e-15);
    }
}
