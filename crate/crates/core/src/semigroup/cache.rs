//! On-disk table cache.
//!
//! Layout (little-endian): magic `BZT1`, 32-byte prime-system hash, norm cap (f64), entry count
//! (u64), then one row per entry: norm (f64), mu (i8), lambda (f64), number of factor pairs
//! (varint), and the `(index, exponent)` pairs as varints.

use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

use super::system::PrimeSystem;
use super::table::{Factorization, IntegerEntry, IntegerTable};

pub const MAGIC: &[u8; 4] = b"BZT1";

fn write_varint<W: Write>(w: &mut W, mut v: u64) -> std::io::Result<()> {
    loop {
        let byte = (v & 0x7f) as u8;
        v >>= 7;
        if v == 0 {
            return w.write_all(&[byte]);
        }
        w.write_all(&[byte | 0x80])?;
    }
}

fn read_varint<R: Read>(r: &mut R) -> Result<u64> {
    let mut out = 0u64;
    for shift in (0..64).step_by(7) {
        let mut b = [0u8];
        r.read_exact(&mut b)?;
        out |= u64::from(b[0] & 0x7f) << shift;
        if b[0] & 0x80 == 0 {
            return Ok(out);
        }
    }
    Err(Error::Cache("varint too long".into()))
}

fn read_array<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b)?;
    Ok(b)
}

pub fn write_table<W: Write>(w: W, table: &IntegerTable) -> Result<()> {
    let mut w = BufWriter::new(w);
    w.write_all(MAGIC)?;
    w.write_all(&table.system().content_hash())?;
    w.write_all(&table.norm_cap().to_le_bytes())?;
    w.write_all(&(table.len() as u64).to_le_bytes())?;
    for e in table.entries() {
        w.write_all(&e.norm.to_le_bytes())?;
        w.write_all(&e.mu.to_le_bytes())?;
        w.write_all(&e.lambda.to_le_bytes())?;
        let pairs = e.factorization.pairs();
        write_varint(&mut w, pairs.len() as u64)?;
        for &(i, k) in pairs {
            write_varint(&mut w, u64::from(i))?;
            write_varint(&mut w, u64::from(k))?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Header fields, readable without loading the rows.
#[derive(Debug, Clone, PartialEq)]
pub struct CacheHeader {
    pub system_hash: [u8; 32],
    pub norm_cap: f64,
    pub count: u64,
}

pub fn read_header<R: Read>(r: &mut R) -> Result<CacheHeader> {
    let magic: [u8; 4] = read_array(r)?;
    if &magic != MAGIC {
        return Err(Error::Cache("bad magic".into()));
    }
    let system_hash = read_array::<32, _>(r)?;
    let norm_cap = f64::from_le_bytes(read_array(r)?);
    let count = u64::from_le_bytes(read_array(r)?);
    Ok(CacheHeader { system_hash, norm_cap, count })
}

/// Loads a cached table for `system`. Fails on hash or cap mismatch.
pub fn read_table<R: Read>(r: R, system: &PrimeSystem, norm_cap: f64, entry_cap: usize) -> Result<IntegerTable> {
    let mut r = BufReader::new(r);
    let header = read_header(&mut r)?;
    if header.system_hash != system.content_hash() {
        return Err(Error::Cache("prime system hash mismatch".into()));
    }
    if header.norm_cap.to_bits() != norm_cap.to_bits() {
        return Err(Error::Cache(format!("norm cap mismatch: cached {} wanted {norm_cap}", header.norm_cap)));
    }
    if header.count > entry_cap as u64 {
        return Err(Error::Overflow { reached: entry_cap });
    }
    let nprimes = system.len() as u64;
    let mut entries = Vec::with_capacity(header.count as usize);
    for _ in 0..header.count {
        let norm = f64::from_le_bytes(read_array(&mut r)?);
        let mu = i8::from_le_bytes(read_array(&mut r)?);
        let lambda = f64::from_le_bytes(read_array(&mut r)?);
        let n = read_varint(&mut r)?;
        if n > nprimes {
            return Err(Error::Cache("factorization longer than prime list".into()));
        }
        let mut pairs = Vec::with_capacity(n as usize);
        for _ in 0..n {
            let i = read_varint(&mut r)?;
            let k = read_varint(&mut r)?;
            if i >= nprimes || k == 0 || k > u64::from(u32::MAX) {
                return Err(Error::Cache("invalid factor pair".into()));
            }
            pairs.push((i as u32, k as u32));
        }
        let factorization =
            Factorization::from_pairs(pairs).map_err(|_| Error::Cache("invalid factorization".into()))?;
        entries.push(IntegerEntry { norm, factorization, lambda, mu });
    }
    let mut trailing = [0u8];
    if r.read(&mut trailing)? != 0 {
        return Err(Error::Cache("trailing bytes".into()));
    }
    Ok(IntegerTable::from_sorted(system.clone(), entries, norm_cap))
}

pub fn save(path: &Path, table: &IntegerTable) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("tmp");
    write_table(std::fs::File::create(&tmp)?, table)?;
    std::fs::rename(tmp, path)?;
    Ok(())
}

pub fn load(path: &Path, system: &PrimeSystem, norm_cap: f64, entry_cap: usize) -> Result<IntegerTable> {
    read_table(std::fs::File::open(path)?, system, norm_cap, entry_cap)
}

/// Cache file name for a system and cap.
pub fn file_name(system: &PrimeSystem, norm_cap: f64) -> String {
    format!("{}-{:016x}.bzt", hex::encode(&system.content_hash()[..12]), norm_cap.to_bits())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::{enumerate_integers, SystemSpec};
    use proptest::prelude::*;

    #[test]
    fn header_layout() {
        let ps = PrimeSystem::build(&SystemSpec::Natural { bound: 10 }).unwrap();
        let t = enumerate_integers(&ps, 10.0, 100).unwrap();
        let mut buf = Vec::new();
        write_table(&mut buf, &t).unwrap();
        assert_eq!(&buf[..4], b"BZT1");
        assert_eq!(&buf[4..36], &ps.content_hash());
        assert_eq!(f64::from_le_bytes(buf[36..44].try_into().unwrap()), 10.0);
        assert_eq!(u64::from_le_bytes(buf[44..52].try_into().unwrap()), 10);
        // unit row: norm 1, mu 1, lambda 0, zero pairs
        assert_eq!(&buf[52..60], &1.0f64.to_le_bytes());
        assert_eq!(buf[60], 1);
        assert_eq!(&buf[61..69], &0.0f64.to_le_bytes());
        assert_eq!(buf[69], 0);
    }

    #[test]
    fn rejects_foreign_system() {
        let ps = PrimeSystem::build(&SystemSpec::Natural { bound: 10 }).unwrap();
        let other = PrimeSystem::build(&SystemSpec::Natural { bound: 11 }).unwrap();
        let t = enumerate_integers(&ps, 10.0, 100).unwrap();
        let mut buf = Vec::new();
        write_table(&mut buf, &t).unwrap();
        assert!(matches!(read_table(&buf[..], &other, 10.0, 100), Err(Error::Cache(_))));
        assert!(matches!(read_table(&buf[..], &ps, 9.0, 100), Err(Error::Cache(_))));
        assert!(read_table(&buf[..3], &ps, 10.0, 100).is_err());
    }

    proptest! {
        #[test]
        fn varint_roundtrip(v in any::<u64>()) {
            let mut buf = Vec::new();
            write_varint(&mut buf, v).unwrap();
            prop_assert_eq!(read_varint(&mut &buf[..]).unwrap(), v);
        }

        #[test]
        fn table_roundtrip(bound in 2u64..200, seed in 0u64..50) {
            let ps = PrimeSystem::build(&SystemSpec::Perturbed { bound, width: 0.05, seed }).unwrap();
            let t = enumerate_integers(&ps, bound as f64 * 3.0, 1 << 16).unwrap();
            let mut buf = Vec::new();
            write_table(&mut buf, &t).unwrap();
            let back = read_table(&buf[..], &ps, t.norm_cap(), 1 << 16).unwrap();
            prop_assert_eq!(back.entries(), t.entries());
        }
    }
}
