//! Binary checkpoints.
//!
//! Layout, all little-endian:
//!
//! | offset | size | content                         |
//! |--------|------|---------------------------------|
//! | 0      | 4    | magic `STCV`                    |
//! | 4      | 4    | version (`u32`, currently 1)    |
//! | 8      | 12   | `nx, ny, nz` (`u32` each)       |
//! | 20     | 8    | `ly` (`f64`)                    |
//! | 28     | 8    | `t` (`f64`)                     |
//! | 36     | 16 N | coefficients, `(re, im)` `f64`  |
//!
//! Coefficients follow the lattice's row-major order (z fastest).

use num_complex::Complex64;

use super::SimState;
use crate::error::{Error, Result};
use crate::freq::{Lattice, SpectralField};

pub const MAGIC: &[u8; 4] = b"STCV";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 36;

pub fn checkpoint_save(state: &SimState) -> Vec<u8> {
    let l = state.theta.lattice;
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * l.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    for n in l.dims() {
        out.extend_from_slice(&(n as u32).to_le_bytes());
    }
    out.extend_from_slice(&l.ly.to_le_bytes());
    out.extend_from_slice(&state.t.to_le_bytes());
    for c in &state.theta.coeffs {
        out.extend_from_slice(&c.re.to_le_bytes());
        out.extend_from_slice(&c.im.to_le_bytes());
    }
    out
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(b[at..at + 4].try_into().unwrap())
}

fn f64_at(b: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(b[at..at + 8].try_into().unwrap())
}

pub fn checkpoint_load(bytes: &[u8]) -> Result<SimState> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Checkpoint(format!(
            "truncated header: {} bytes, need {HEADER_LEN}",
            bytes.len()
        )));
    }
    if &bytes[..4] != MAGIC {
        return Err(Error::Checkpoint("bad magic, not a strata checkpoint".into()));
    }
    let version = u32_at(bytes, 4);
    if version != VERSION {
        return Err(Error::Checkpoint(format!("unsupported version {version}, expected {VERSION}")));
    }
    let dims = [u32_at(bytes, 8), u32_at(bytes, 12), u32_at(bytes, 16)].map(|d| d as usize);
    let lattice = Lattice::new(dims[0], dims[1], dims[2], f64_at(bytes, 20))
        .map_err(|e| Error::Checkpoint(format!("invalid lattice in header: {e}")))?;
    let t = f64_at(bytes, 28);
    let want = lattice
        .len()
        .checked_mul(16)
        .and_then(|n| n.checked_add(HEADER_LEN))
        .ok_or_else(|| Error::Checkpoint("lattice size overflows".into()))?;
    if bytes.len() != want {
        return Err(Error::Checkpoint(format!(
            "payload has {} bytes, header implies {want}",
            bytes.len()
        )));
    }
    let coeffs = bytes[HEADER_LEN..]
        .chunks_exact(16)
        .map(|c| Complex64::new(f64_at(c, 0), f64_at(c, 8)))
        .collect();
    Ok(SimState {
        t,
        theta: SpectralField { lattice, coeffs },
    })
}

/// Writes through a temporary file and a rename, so readers never see a
/// partial checkpoint.
pub fn write_atomic(path: &std::path::Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn state(seed: u64) -> SimState {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let l = Lattice::new(4, 6, 2, 3.5).unwrap();
        let coeffs = (0..l.len())
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random::<f64>() * 1e-300))
            .collect();
        SimState {
            t: rng.random_range(0.0..100.0),
            theta: SpectralField { lattice: l, coeffs },
        }
    }

    proptest! {
        #[test]
        fn roundtrip_is_bit_exact(seed in 0u64..500) {
            let s = state(seed);
            let back = checkpoint_load(&checkpoint_save(&s)).unwrap();
            prop_assert_eq!(back.t.to_bits(), s.t.to_bits());
            prop_assert_eq!(back.theta.lattice, s.theta.lattice);
            for (a, b) in back.theta.coeffs.iter().zip(&s.theta.coeffs) {
                prop_assert_eq!(a.re.to_bits(), b.re.to_bits());
                prop_assert_eq!(a.im.to_bits(), b.im.to_bits());
            }
        }
    }

    #[test]
    fn corrupt_inputs_are_errors() {
        let good = checkpoint_save(&state(1));
        let mut bad = good.clone();
        bad[0] = b'X';
        assert!(matches!(checkpoint_load(&bad), Err(Error::Checkpoint(_))));
        let mut bad = good.clone();
        bad[4] = 9;
        assert!(checkpoint_load(&bad).is_err());
        assert!(checkpoint_load(&good[..good.len() - 1]).is_err());
        assert!(checkpoint_load(&good[..10]).is_err());
        let mut bad = good.clone();
        bad[8] = 3; // odd nx
        assert!(checkpoint_load(&bad).is_err());
        assert!(checkpoint_load(&[]).is_err());
    }
}
