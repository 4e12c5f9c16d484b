//! JSON form shared by states and density matrices:
//! `{"dim": N, "data": [[re, im], ...]}` with `data` row-major.

use std::io::{Read, Write};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{DensityMatrix, StateVector, Truncation, C64};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct Wire {
    dim: usize,
    data: Vec<[f64; 2]>,
}

fn to_pairs<'a>(it: impl Iterator<Item = &'a C64>) -> Vec<[f64; 2]> {
    it.map(|c| [c.re, c.im]).collect()
}

fn from_pairs(data: &[[f64; 2]]) -> Vec<C64> {
    data.iter().map(|&[re, im]| C64::new(re, im)).collect()
}

pub fn write_state_vector<W: Write>(mut w: W, psi: &StateVector) -> Result<()> {
    let wire = Wire {
        dim: psi.dim(),
        data: to_pairs(psi.amps().iter()),
    };
    serde_json::to_writer_pretty(&mut w, &wire)?;
    writeln!(w)?;
    Ok(())
}

/// Reads a state; amplitudes are taken as stored (no renormalization).
pub fn read_state_vector<R: Read>(r: R) -> Result<StateVector> {
    let wire: Wire = serde_json::from_reader(r)?;
    let trunc = Truncation::new(wire.dim)?;
    StateVector::new(from_pairs(&wire.data), trunc)
}

pub fn write_density_matrix<W: Write>(mut w: W, rho: &DensityMatrix) -> Result<()> {
    let n = rho.dim();
    let mut data = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let c = rho.get(i, j);
            data.push([c.re, c.im]);
        }
    }
    serde_json::to_writer_pretty(&mut w, &Wire { dim: n, data })?;
    writeln!(w)?;
    Ok(())
}

/// Reads and validates a density matrix.
pub fn read_density_matrix<R: Read>(r: R) -> Result<DensityMatrix> {
    let wire: Wire = serde_json::from_reader(r)?;
    let n = wire.dim;
    if wire.data.len() != n * n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            actual: wire.data.len(),
        });
    }
    let elems = DMatrix::from_row_slice(n, n, &from_pairs(&wire.data));
    DensityMatrix::new(elems, Truncation::new(n)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::coherent_state;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn state_round_trip(re in -1.5f64..1.5, im in -1.5f64..1.5) {
            let psi = coherent_state(C64::new(re, im), Truncation::new(30).unwrap()).unwrap();
            let mut buf = Vec::new();
            write_state_vector(&mut buf, &psi).unwrap();
            let back = read_state_vector(buf.as_slice()).unwrap();
            for (a, b) in psi.amps().iter().zip(back.amps().iter()) {
                prop_assert!((a - b).norm() <= 1e-15 * a.norm().max(1e-300));
            }
        }

        #[test]
        fn density_round_trip(re in -1.0f64..1.0, im in -1.0f64..1.0) {
            let psi = coherent_state(C64::new(re, im), Truncation::new(20).unwrap()).unwrap();
            let rho = DensityMatrix::from_pure(&psi).unwrap();
            let mut buf = Vec::new();
            write_density_matrix(&mut buf, &rho).unwrap();
            let back = read_density_matrix(buf.as_slice()).unwrap();
            for (a, b) in rho.elems().iter().zip(back.elems().iter()) {
                prop_assert!((a - b).norm() <= 1e-15 * a.norm().max(1e-300));
            }
        }
    }

    #[test]
    fn wire_shape() {
        let psi = StateVector::new(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)], Truncation::new(2).unwrap()).unwrap();
        let mut buf = Vec::new();
        write_state_vector(&mut buf, &psi).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["dim"], 2);
        assert_eq!(v["data"][1][1], 0.8);
    }

    #[test]
    fn rejects_bad_density_payload() {
        let bad = br#"{"dim": 2, "data": [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]]}"#;
        assert!(read_density_matrix(&bad[..]).is_err());
        let not_psd = br#"{"dim": 2, "data": [[2.0, 0.0], [0.0, 0.0], [0.0, 0.0], [-1.0, 0.0]]}"#;
        assert!(read_density_matrix(&not_psd[..]).is_err());
    }
}
