//! CSV and legacy-VTK writers for macroscopic fields.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::diagnostics::{fmt17, MomentSet};
use crate::error::{FksError, Result};
use crate::grid::SpatialGrid;

const AXES: [&str; 3] = ["x", "y", "z"];

fn check_len(moments: &MomentSet, sgrid: &SpatialGrid) -> Result<()> {
    if moments.len() != sgrid.num_cells() {
        return Err(FksError::LengthMismatch {
            expected: sgrid.num_cells(),
            got: moments.len(),
        });
    }
    Ok(())
}

/// One row per cell, x fastest: `x[,y[,z]],rho,ux[,uy[,uz]],theta,pressure`.
pub fn write_fields_csv(moments: &MomentSet, sgrid: &SpatialGrid, path: &Path) -> Result<()> {
    check_len(moments, sgrid)?;
    let d = sgrid.dim();
    let mut w = BufWriter::new(File::create(path)?);
    let mut header: Vec<String> = AXES[..d].iter().map(|s| s.to_string()).collect();
    header.push("rho".into());
    header.extend(AXES[..d].iter().map(|a| format!("u{a}")));
    header.extend(["theta".into(), "pressure".into()]);
    writeln!(w, "{}", header.join(","))?;

    let pressure = moments.pressure();
    for j in 0..moments.len() {
        let x = sgrid.cell_center(j);
        let mut row: Vec<String> = x[..d].iter().map(|&c| fmt17(c)).collect();
        row.push(fmt17(moments.rho[j]));
        row.extend(moments.velocity[j][..d].iter().map(|&u| fmt17(u)));
        row.push(fmt17(moments.theta[j]));
        row.push(fmt17(pressure[j]));
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()?;
    Ok(())
}

/// Legacy ASCII VTK structured-points file with rho, theta, pressure and velocity.
pub fn write_vtk_structured_points(
    moments: &MomentSet,
    sgrid: &SpatialGrid,
    path: &Path,
) -> Result<()> {
    if sgrid.dim() != 3 {
        return Err(FksError::InvalidParameter {
            name: "format",
            reason: format!("vtk output needs a 3D mesh, got {}D", sgrid.dim()),
        });
    }
    check_len(moments, sgrid)?;
    let mut w = BufWriter::new(File::create(path)?);
    let [nx, ny, nz] = sgrid.shape();
    let o = sgrid.origin();
    let dx = sgrid.dx();
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "fks macroscopic fields")?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET STRUCTURED_POINTS")?;
    writeln!(w, "DIMENSIONS {nx} {ny} {nz}")?;
    writeln!(w, "ORIGIN {} {} {}", fmt17(o[0]), fmt17(o[1]), fmt17(o[2]))?;
    writeln!(w, "SPACING {} {} {}", fmt17(dx), fmt17(dx), fmt17(dx))?;
    writeln!(w, "POINT_DATA {}", moments.len())?;

    let pressure = moments.pressure();
    for (name, data) in [
        ("rho", &moments.rho),
        ("theta", &moments.theta),
        ("pressure", &pressure),
    ] {
        writeln!(w, "SCALARS {name} double 1")?;
        writeln!(w, "LOOKUP_TABLE default")?;
        for v in data.iter() {
            writeln!(w, "{}", fmt17(*v))?;
        }
    }
    writeln!(w, "VECTORS velocity double")?;
    for u in &moments.velocity {
        writeln!(w, "{} {} {}", fmt17(u[0]), fmt17(u[1]), fmt17(u[2]))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::ConservedState;
    use crate::grid::Boundary;

    fn uniform(dim: usize, n: usize) -> MomentSet {
        let s = ConservedState::from_primitive(dim, 1.0, [0.1, 0.0, 0.0], 2.0);
        MomentSet::from_states(dim, vec![s; n])
    }

    #[test]
    fn csv_rows_for_three_cells() {
        let g = SpatialGrid::new(&[3], 1.0 / 3.0, &[1.0 / 6.0], Boundary::Clamp).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.csv");
        write_fields_csv(&uniform(1, 3), &g, &p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "x,rho,ux,theta,pressure");
        let tail = |l: &str| l.split_once(',').unwrap().1.to_string();
        assert_eq!(tail(lines[1]), tail(lines[2]));
        assert_eq!(tail(lines[2]), tail(lines[3]));
    }

    #[test]
    fn csv_header_3d() {
        let g = SpatialGrid::new(&[1, 1, 1], 1.0, &[0.5; 3], Boundary::Clamp).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.csv");
        write_fields_csv(&uniform(3, 1), &g, &p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("x,y,z,rho,ux,uy,uz,theta,pressure\n"));
    }

    #[test]
    fn vtk_layout() {
        let g = SpatialGrid::new(&[2, 2, 2], 0.5, &[0.25; 3], Boundary::Clamp).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.vtk");
        write_vtk_structured_points(&uniform(3, 8), &g, &p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# vtk DataFile Version 3.0");
        assert_eq!(lines[3], "DATASET STRUCTURED_POINTS");
        assert_eq!(lines[4], "DIMENSIONS 2 2 2");
        assert!(lines[5].starts_with("ORIGIN 2.5"));
        assert_eq!(lines[7], "POINT_DATA 8");
        let rho = lines
            .iter()
            .position(|l| *l == "SCALARS rho double 1")
            .unwrap();
        assert_eq!(lines[rho + 1], "LOOKUP_TABLE default");
        let theta = lines
            .iter()
            .position(|l| *l == "SCALARS theta double 1")
            .unwrap();
        assert_eq!(theta - rho - 2, 8);
        let vec = lines
            .iter()
            .position(|l| *l == "VECTORS velocity double")
            .unwrap();
        assert_eq!(lines.len() - vec - 1, 8);
    }

    #[test]
    fn vtk_rejects_non_3d() {
        let g = SpatialGrid::new(&[4], 0.25, &[0.125], Boundary::Clamp).unwrap();
        let dir = tempfile::tempdir().unwrap();
        assert!(
            write_vtk_structured_points(&uniform(1, 4), &g, &dir.path().join("f.vtk")).is_err()
        );
    }
}
