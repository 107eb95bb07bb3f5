//! Portable text format: `# key = value` header lines followed by a CSV table of nodes.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use super::grid::Lattice;
use super::{DiscreteSolution, DomainKind};
use crate::error::{Error, Result};

fn kind_name(k: DomainKind) -> &'static str {
    match k {
        DomainKind::Polygon2d => "polygon2d",
        DomainKind::Box3d => "box3d",
        DomainKind::Wedge3d => "wedge3d",
        DomainKind::TruncatedCone => "truncated_cone",
    }
}

fn parse_kind(s: &str) -> Result<DomainKind> {
    Ok(match s {
        "polygon2d" => DomainKind::Polygon2d,
        "box3d" => DomainKind::Box3d,
        "wedge3d" => DomainKind::Wedge3d,
        "truncated_cone" => DomainKind::TruncatedCone,
        other => return Err(Error::Io(format!("unknown domain kind {other}"))),
    })
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

pub fn write_solution(sol: &DiscreteSolution, path: &Path) -> Result<()> {
    let mut out = fs::File::create(path)?;
    let header = [
        ("format", "polyma-solution-1".to_string()),
        ("dim", sol.dim.to_string()),
        ("grid.h", format!("{:e}", sol.h)),
        ("kind", kind_name(sol.kind).to_string()),
        ("scheme", sol.scheme_id.clone()),
        ("iterations", sol.iterations.to_string()),
        ("pseudo_time_steps", sol.pseudo_time_steps.to_string()),
        ("residual", format!("{:e}", sol.residual)),
        ("convexity_violations", sol.convexity_violations.to_string()),
        ("min_second_difference", format!("{:e}", sol.min_second_difference)),
        ("kmin", join(&sol.lattice.kmin)),
        ("shape", join(&sol.lattice.shape)),
        ("affine", serde_json::to_string(&sol.affine)?),
        ("description", sol.description.clone()),
    ];
    for (k, v) in header {
        writeln!(out, "# {k} = {v}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    let mut cols: Vec<String> = (1..=sol.dim).map(|i| format!("y{i}")).collect();
    cols.push("value".into());
    cols.push("interior".into());
    w.write_record(&cols)?;
    for id in 0..sol.len() {
        let mut rec: Vec<String> = sol.point(id).iter().map(|c| format!("{c:e}")).collect();
        rec.push(format!("{:e}", sol.values[id]));
        rec.push(u8::from(sol.is_interior(id)).to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_solution(path: &Path) -> Result<DiscreteSolution> {
    let text = fs::read_to_string(path)?;
    let mut header = BTreeMap::new();
    let mut body = String::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("# ") {
            let (k, v) = rest
                .split_once(" = ")
                .ok_or_else(|| Error::Io(format!("bad header line {line}")))?;
            header.insert(k.to_string(), v.to_string());
        } else {
            body.push_str(line);
            body.push('\n');
        }
    }
    let get = |k: &str| {
        header
            .get(k)
            .cloned()
            .ok_or_else(|| Error::Io(format!("missing header {k}")))
    };
    let num = |k: &str| -> Result<f64> { get(k)?.parse().map_err(|_| Error::Io(format!("bad number for {k}"))) };
    let ints = |k: &str| -> Result<Vec<i64>> {
        get(k)?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Io(format!("bad integer list for {k}"))))
            .collect()
    };
    let dim = num("dim")? as usize;
    let h = num("grid.h")?;
    let kmin = ints("kmin")?;
    let shape: Vec<usize> = ints("shape")?.into_iter().map(|v| v as usize).collect();
    let mut coords = Vec::new();
    let mut values = Vec::new();
    let mut interior = Vec::new();
    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    for rec in rdr.records() {
        let rec = rec?;
        let parse = |i: usize| -> Result<f64> {
            rec.get(i)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Io(format!("bad field {i} in record {rec:?}")))
        };
        for i in 0..dim {
            coords.push(parse(i)?);
        }
        values.push(parse(dim)?);
        interior.push(parse(dim + 1)? != 0.0);
    }
    let total: usize = shape.iter().product();
    let mut index = vec![-1i32; total];
    for id in 0..values.len() {
        let mut cell = 0usize;
        let mut stride = 1usize;
        for i in 0..dim {
            let k = (coords[id * dim + i] / h).round() as i64 - kmin[i];
            if k < 0 || k as usize >= shape[i] {
                return Err(Error::Io(format!("node {id} lies outside the recorded lattice")));
            }
            cell += k as usize * stride;
            stride *= shape[i];
        }
        index[cell] = id as i32;
    }
    Ok(DiscreteSolution {
        dim,
        h,
        kind: parse_kind(&get("kind")?)?,
        lattice: Lattice {
            dim,
            h,
            kmin,
            shape,
            index,
            coords,
            interior,
        },
        values,
        iterations: num("iterations")? as usize,
        pseudo_time_steps: num("pseudo_time_steps")? as usize,
        residual: num("residual")?,
        scheme_id: get("scheme")?,
        convexity_violations: num("convexity_violations")? as usize,
        min_second_difference: num("min_second_difference")?,
        affine: serde_json::from_str(&get("affine")?)?,
        description: get("description")?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ScalarField;
    use crate::geometry::Polytope;
    use crate::solver::{solve_dirichlet, ComputationalDomain, SolverParams};

    #[test]
    fn round_trip() {
        let dom = ComputationalDomain::from_polytope(&Polytope::unit_cube(2)).unwrap();
        let sol = solve_dirichlet(
            &dom,
            &ScalarField::constant(1.0),
            &ScalarField::half_norm_sq(),
            &SolverParams::with_h(0.125),
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("u.csv");
        write_solution(&sol, &p).unwrap();
        let back = read_solution(&p).unwrap();
        assert_eq!(back.values, sol.values);
        assert_eq!(back.lattice.index, sol.lattice.index);
        assert_eq!(back.scheme_id, sol.scheme_id);
        assert_eq!(
            back.interpolate(&[0.3, 0.4]).unwrap(),
            sol.interpolate(&[0.3, 0.4]).unwrap()
        );
    }
}
