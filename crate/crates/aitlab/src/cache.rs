//! Binary on-disk format for halting tables. The layout is fixed-endian and
//! padding-free in content terms, so a table written twice is byte-identical
//! and a file hash doubles as a table fingerprint.
//!
//! Layout (all integers little-endian):
//!   magic            8 bytes, "AITLAB01"
//!   machine version  u32
//!   program cap      u32
//!   fuel             u64
//!   aux bit length   u64, then the packed auxiliary tape
//!   record count     u64
//!   per record: program bit length u32 + packed bits,
//!               output  bit length u32 + packed bits,
//!               steps u64
//! Bit strings are packed most significant bit first with zero padding, the
//! same convention the core uses in memory.

use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use aitlab_core::bits::Bits;
use aitlab_core::enumeration::{merge_shards, EnumCaps, HaltRecord, HaltingTable};
use aitlab_core::machine::MACHINE_VERSION;

pub const MAGIC: &[u8; 8] = b"AITLAB01";

#[derive(Debug, thiserror::Error)]
pub enum CacheError {
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("not a table cache (bad magic)")]
    BadMagic,
    #[error("cache built by machine version {found}, this build is {current}")]
    VersionMismatch { found: u32, current: u32 },
    #[error("corrupt cache: {0}")]
    Corrupt(&'static str),
}

/// The full cache image as bytes; `write_table` is this plus one `fs::write`.
pub fn table_bytes(table: &HaltingTable) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&table.machine_version.to_le_bytes());
    out.extend_from_slice(&table.caps.max_prog_len.to_le_bytes());
    out.extend_from_slice(&table.caps.fuel.to_le_bytes());
    out.extend_from_slice(&(table.caps.aux.len() as u64).to_le_bytes());
    out.extend_from_slice(table.caps.aux.packed_bytes());
    out.extend_from_slice(&(table.records().len() as u64).to_le_bytes());
    for r in table.records() {
        write_bits(&mut out, &r.program);
        write_bits(&mut out, &r.output);
        out.extend_from_slice(&r.steps.to_le_bytes());
    }
    out
}

pub fn write_table(path: &Path, table: &HaltingTable) -> Result<(), CacheError> {
    let mut f = fs::File::create(path)?;
    f.write_all(&table_bytes(table))?;
    Ok(())
}

pub fn parse_table(bytes: &[u8]) -> Result<HaltingTable, CacheError> {
    let mut at = 0usize;

    if take(&bytes, &mut at, 8)? != MAGIC {
        return Err(CacheError::BadMagic);
    }
    let version = read_u32(&bytes, &mut at)?;
    if version != MACHINE_VERSION {
        return Err(CacheError::VersionMismatch { found: version, current: MACHINE_VERSION });
    }
    let max_prog_len = read_u32(&bytes, &mut at)?;
    let fuel = read_u64(&bytes, &mut at)?;
    let aux = read_bits(&bytes, &mut at)?;
    let caps = EnumCaps::new(max_prog_len, fuel, aux);

    let count = read_u64(&bytes, &mut at)? as usize;
    let mut records = Vec::with_capacity(count);
    for _ in 0..count {
        let program = read_bits32(&bytes, &mut at)?;
        let output = read_bits32(&bytes, &mut at)?;
        let steps = read_u64(&bytes, &mut at)?;
        records.push(HaltRecord { program, output, steps });
    }
    if at != bytes.len() {
        return Err(CacheError::Corrupt("trailing bytes"));
    }
    Ok(merge_shards(&caps, [records]))
}

pub fn read_table(path: &Path) -> Result<HaltingTable, CacheError> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    parse_table(&bytes)
}

fn write_bits(out: &mut Vec<u8>, b: &Bits) {
    out.extend_from_slice(&(b.len() as u32).to_le_bytes());
    out.extend_from_slice(b.packed_bytes());
}

fn take<'a>(bytes: &'a [u8], at: &mut usize, n: usize) -> Result<&'a [u8], CacheError> {
    let end = at.checked_add(n).ok_or(CacheError::Corrupt("length overflow"))?;
    if end > bytes.len() {
        return Err(CacheError::Corrupt("truncated"));
    }
    let s = &bytes[*at..end];
    *at = end;
    Ok(s)
}

fn read_u32(bytes: &[u8], at: &mut usize) -> Result<u32, CacheError> {
    Ok(u32::from_le_bytes(take(bytes, at, 4)?.try_into().unwrap()))
}

fn read_u64(bytes: &[u8], at: &mut usize) -> Result<u64, CacheError> {
    Ok(u64::from_le_bytes(take(bytes, at, 8)?.try_into().unwrap()))
}

fn read_packed(bytes: &[u8], at: &mut usize, len: usize) -> Result<Bits, CacheError> {
    let packed = take(bytes, at, len.div_ceil(8))?;
    Bits::from_packed(packed, len).ok_or(CacheError::Corrupt("bad bit packing"))
}

fn read_bits(bytes: &[u8], at: &mut usize) -> Result<Bits, CacheError> {
    let len = read_u64(bytes, at)? as usize;
    read_packed(bytes, at, len)
}

fn read_bits32(bytes: &[u8], at: &mut usize) -> Result<Bits, CacheError> {
    let len = read_u32(bytes, at)? as usize;
    read_packed(bytes, at, len)
}

#[cfg(test)]
mod tests {
    use super::*;
    use aitlab_core::bits::bits;
    use aitlab_core::enumeration::{enumerate, EnumLimits};

    #[test]
    fn roundtrip_is_identity_and_deterministic() {
        let caps = EnumCaps::new(10, 200, bits("10"));
        let table = enumerate(&caps, &EnumLimits::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p1 = dir.path().join("a.tbl");
        let p2 = dir.path().join("b.tbl");
        write_table(&p1, &table).unwrap();
        write_table(&p2, &table).unwrap();
        assert_eq!(fs::read(&p1).unwrap(), fs::read(&p2).unwrap());
        let back = read_table(&p1).unwrap();
        assert_eq!(back.caps, table.caps);
        assert_eq!(back.records(), table.records());
    }

    #[test]
    fn corruption_is_detected() {
        let caps = EnumCaps::new(8, 100, bits(""));
        let table = enumerate(&caps, &EnumLimits::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.tbl");
        write_table(&p, &table).unwrap();
        let mut raw = fs::read(&p).unwrap();
        raw[0] ^= 0xff;
        fs::write(&p, &raw).unwrap();
        assert!(matches!(read_table(&p), Err(CacheError::BadMagic)));

        let mut raw = {
            write_table(&p, &table).unwrap();
            fs::read(&p).unwrap()
        };
        raw.truncate(raw.len() - 1);
        fs::write(&p, &raw).unwrap();
        assert!(matches!(read_table(&p), Err(CacheError::Corrupt(_))));

        let mut raw = {
            write_table(&p, &table).unwrap();
            fs::read(&p).unwrap()
        };
        raw[8] ^= 0x01; // machine version field
        fs::write(&p, &raw).unwrap();
        assert!(matches!(read_table(&p), Err(CacheError::VersionMismatch { .. })));
    }
}
