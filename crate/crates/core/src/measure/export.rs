use super::empirical::{EmpiricalMeasure, PointCloud};
use crate::error::{Error, Result};
use crate::sl2::ExtendedComplex;
use std::io::Write;

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV export: `re,im,weight` on c_inf, `z1re,z1im,z2re,z2im,weight` on cp1.
pub fn write_csv<W: Write>(m: &EmpiricalMeasure, out: &mut W) -> Result<()> {
    match m.cloud() {
        PointCloud::CInf(v) => {
            out.write_all(b"re,im,weight\n")?;
            for (i, z) in v.iter().enumerate() {
                let w = num(m.weight(i));
                match z {
                    ExtendedComplex::Finite(z) => writeln!(out, "{},{},{w}", num(z.re), num(z.im))?,
                    ExtendedComplex::Infinity => writeln!(out, "inf,inf,{w}")?,
                }
            }
        }
        PointCloud::Cp1(v) => {
            out.write_all(b"z1re,z1im,z2re,z2im,weight\n")?;
            for (i, p) in v.iter().enumerate() {
                let (a, b) = p.coords();
                writeln!(out, "{},{},{},{},{}", num(a.re), num(a.im), num(b.re), num(b.im), num(m.weight(i)))?;
            }
        }
        _ => return Err(Error::WrongSpace { expected: "cp1 or c_inf" }),
    }
    Ok(())
}

pub fn to_csv(m: &EmpiricalMeasure) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(m, &mut buf)?;
    Ok(String::from_utf8(buf).expect("ascii output"))
}
