//! Gnuplot scripts next to CSV outputs.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    LogLog,
    RegionMap,
    Decay,
}

impl std::str::FromStr for PlotKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "loglog" => Ok(Self::LogLog),
            "region_map" => Ok(Self::RegionMap),
            "decay" => Ok(Self::Decay),
            _ => Err(Error::Config(format!("unknown plot kind `{s}`"))),
        }
    }
}

const REGIONS: [&str; 7] = ["T1", "T2", "T3", "T3'", "SEG_SR", "SEG_SpRp", "OUTSIDE"];

fn header(csv_path: &Path) -> Result<Vec<String>> {
    let mut rdr = csv::Reader::from_path(csv_path).map_err(|e| Error::Format(format!("{}: {e}", csv_path.display())))?;
    Ok(rdr
        .headers()
        .map_err(|e| Error::Format(e.to_string()))?
        .iter()
        .map(String::from)
        .collect())
}

fn column(cols: &[String], name: &str) -> Option<usize> {
    cols.iter().position(|c| c == name).map(|i| i + 1)
}

fn need(cols: &[String], names: &[&str], kind: &str) -> Result<Vec<usize>> {
    names
        .iter()
        .map(|n| column(cols, n).ok_or_else(|| Error::Format(format!("{kind} plot needs a `{n}` column"))))
        .collect()
}

/// Writes `<csv>.gp` and returns its path.
pub fn emit_plot_script(csv_path: &Path, kind: PlotKind) -> Result<PathBuf> {
    let cols = header(csv_path)?;
    let name = csv_path.file_name().and_then(|s| s.to_str()).unwrap_or("data.csv").to_string();
    let mut s = String::new();
    writeln!(s, "set datafile separator ','").unwrap();
    writeln!(s, "set key autotitle columnhead").unwrap();
    match kind {
        PlotKind::LogLog => {
            let x = need(&cols, &["n"], "loglog")?[0];
            let y = column(&cols, "ratio")
                .or_else(|| column(&cols, "deviation"))
                .ok_or_else(|| Error::Format("loglog plot needs a `ratio` or `deviation` column".into()))?;
            writeln!(s, "set logscale xy\nset xlabel 'n'\nset ylabel '{}'", cols[y - 1]).unwrap();
            writeln!(s, "plot '{name}' using {x}:{y} with linespoints").unwrap();
        }
        PlotKind::RegionMap => {
            let c = need(&cols, &["x", "y", "region", "gamma"], "region_map")?;
            writeln!(s, "set size square\nset xrange [0:1]\nset yrange [0:1]\nset xlabel '1/p'\nset ylabel '1/q'").unwrap();
            writeln!(s, "regions = \"{}\"", REGIONS.join(" ")).unwrap();
            writeln!(
                s,
                "plot for [r in regions] '{name}' using {}:(strcol({}) eq r ? ${} : NaN) with points pt 5 ps 0.4 title r",
                c[0], c[2], c[1]
            )
            .unwrap();
        }
        PlotKind::Decay => {
            let c = need(&cols, &["lambda", "ratio"], "decay")?;
            writeln!(s, "set logscale xy\nset xlabel 'lambda'\nset ylabel 'ratio'").unwrap();
            writeln!(s, "plot '{name}' using {}:{} with linespoints", c[0], c[1]).unwrap();
        }
    }
    let mut out = csv_path.as_os_str().to_owned();
    out.push(".gp");
    let out = PathBuf::from(out);
    std::fs::write(&out, s)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scripts_follow_schema() {
        let dir = tempfile::tempdir().unwrap();
        let scan = dir.path().join("scan.csv");
        std::fs::write(&scan, "d,x,y,n,method,family,ratio\n2,0.6,0.3,32,witness,BEAM,1.5\n").unwrap();
        let gp = emit_plot_script(&scan, PlotKind::LogLog).unwrap();
        let text = std::fs::read_to_string(gp).unwrap();
        assert!(text.contains("set logscale xy") && text.contains("using 4:7"));
        assert!(matches!(emit_plot_script(&scan, PlotKind::RegionMap), Err(Error::Format(_))));
        let reg = dir.path().join("regions.csv");
        std::fs::write(&reg, "x,y,region,gamma\n0.5,0.25,T1,0.1\n").unwrap();
        let text = std::fs::read_to_string(emit_plot_script(&reg, PlotKind::RegionMap).unwrap()).unwrap();
        assert!(text.contains("T3'") && text.contains("strcol(3)"));
        assert!(matches!(emit_plot_script(&dir.path().join("missing.csv"), PlotKind::Decay), Err(Error::Format(_))));
        assert!("bars".parse::<PlotKind>().is_err());
    }
}
