//! Persistent table cache, format `TXCB1`.
//!
//! Layout, all integers little-endian:
//!
//! | bytes | field                                  |
//! |-------|----------------------------------------|
//! | 5     | magic `TXCB1`                          |
//! | 4     | k                                      |
//! | 8     | j_max                                  |
//! | 8     | n_max                                  |
//! | 1     | mode: 0 exact, 1 saturating            |
//! | 8     | cap (0 when exact)                     |
//! | 1     | cell width in bytes                    |
//! | 8     | FNV-1a 64 checksum of the payload      |
//! | ...   | payload: cells row-major by `j`        |
//!
//! The cap is part of a table's identity: a saturating table is only valid
//! for comparisons below its cap, so a loader asked for a different cap
//! rejects the file instead of reusing it.

use std::fs;
use std::hash::Hasher;
use std::io::Write;
use std::path::{Path, PathBuf};

use fnv::FnvHasher;

use crate::cell::{CountCell, CountMode};
use crate::error::{Error, Result};
use crate::table::{CountTable, SearchTable};

pub const MAGIC: &[u8; 5] = b"TXCB1";
pub const HEADER_LEN: usize = 5 + 4 + 8 + 8 + 1 + 8 + 1 + 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CacheHeader {
    pub k: u32,
    pub j_max: u64,
    pub n_max: u64,
    pub mode: CountMode,
    pub width: u8,
    pub checksum: u64,
}

/// What a caller needs a cached table to be.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Expected {
    pub k: u32,
    pub mode: CountMode,
}

pub fn checksum(payload: &[u8]) -> u64 {
    let mut h = FnvHasher::default();
    h.write(payload);
    h.finish()
}

fn reject(msg: impl Into<String>) -> Error {
    Error::Cache(msg.into())
}

pub fn encode<C: CountCell>(table: &CountTable<C>) -> Vec<u8> {
    let mut payload = Vec::with_capacity(table.cells().len() * C::WIDTH as usize);
    for &c in table.cells() {
        c.write_le(&mut payload);
    }
    let (mode, cap) = match table.mode() {
        CountMode::Exact => (0u8, 0u64),
        CountMode::Saturating { cap } => (1, cap),
    };
    let mut out = Vec::with_capacity(HEADER_LEN + payload.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&table.k().to_le_bytes());
    out.extend_from_slice(&(table.j_max() as u64).to_le_bytes());
    out.extend_from_slice(&(table.n_max() as u64).to_le_bytes());
    out.push(mode);
    out.extend_from_slice(&cap.to_le_bytes());
    out.push(C::WIDTH);
    out.extend_from_slice(&checksum(&payload).to_le_bytes());
    out.extend_from_slice(&payload);
    out
}

pub fn read_header(bytes: &[u8]) -> Result<CacheHeader> {
    if bytes.len() < HEADER_LEN {
        return Err(reject(format!(
            "file is {} bytes, shorter than the {HEADER_LEN}-byte header",
            bytes.len()
        )));
    }
    if &bytes[..5] != MAGIC {
        return Err(reject("bad magic or unsupported version"));
    }
    let u64_at = |i: usize| u64::from_le_bytes(bytes[i..i + 8].try_into().expect("8 bytes"));
    let k = u32::from_le_bytes(bytes[5..9].try_into().expect("4 bytes"));
    let mode = match bytes[25] {
        0 => CountMode::Exact,
        1 => CountMode::Saturating { cap: u64_at(26) },
        other => return Err(reject(format!("unknown mode byte {other}"))),
    };
    Ok(CacheHeader {
        k,
        j_max: u64_at(9),
        n_max: u64_at(17),
        mode,
        width: bytes[34],
        checksum: u64_at(35),
    })
}

pub fn decode<C: CountCell>(bytes: &[u8], expected: Option<Expected>) -> Result<CountTable<C>> {
    let h = read_header(bytes)?;
    if h.width != C::WIDTH {
        return Err(reject(format!(
            "cell width {} does not match the requested {}",
            h.width,
            C::WIDTH
        )));
    }
    if let Some(e) = expected {
        if e.k != h.k {
            return Err(reject(format!("cached k={} but the run needs k={}", h.k, e.k)));
        }
        if e.mode != h.mode {
            return Err(reject(format!(
                "cached mode {:?} but the run needs {:?}",
                h.mode, e.mode
            )));
        }
    }
    let cells = (h.j_max + 1)
        .checked_mul(h.n_max + 1)
        .and_then(|c| c.checked_mul(h.width as u64))
        .ok_or_else(|| reject("header dimensions overflow"))?;
    let payload = &bytes[HEADER_LEN..];
    if payload.len() as u64 != cells {
        return Err(reject(format!(
            "payload is {} bytes, header declares {cells}",
            payload.len()
        )));
    }
    if checksum(payload) != h.checksum {
        return Err(reject("checksum mismatch"));
    }
    let cells: Vec<C> = payload.chunks_exact(C::WIDTH as usize).map(C::read_le).collect();
    CountTable::from_cells(h.k, h.j_max as usize, h.n_max as usize, h.mode, cells)
        .map_err(|e| reject(e.to_string()))
}

/// Writes through a temporary file so a crash never leaves a torn cache.
pub fn store<C: CountCell>(path: &Path, table: &CountTable<C>) -> Result<()> {
    write_atomic(path, &encode(table))
}

pub fn load<C: CountCell>(path: &Path, expected: Option<Expected>) -> Result<CountTable<C>> {
    decode(&fs::read(path)?, expected)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn store_search(path: &Path, table: &SearchTable) -> Result<()> {
    let bytes = match table {
        SearchTable::Narrow(t) => encode(t),
        SearchTable::Wide(t) => encode(t),
        SearchTable::Broad(t) => encode(t),
    };
    write_atomic(path, &bytes)
}

/// Loads a search table; the width is taken from the header.
pub fn load_search(path: &Path, expected: Option<Expected>) -> Result<SearchTable> {
    let bytes = fs::read(path)?;
    let h = read_header(&bytes)?;
    if !matches!(h.mode, CountMode::Saturating { .. }) {
        return Err(reject("search tables must be saturating"));
    }
    Ok(match h.width {
        1 => SearchTable::Narrow(decode(&bytes, expected)?),
        2 => SearchTable::Wide(decode(&bytes, expected)?),
        4 => SearchTable::Broad(decode(&bytes, expected)?),
        w => return Err(reject(format!("unsupported search cell width {w}"))),
    })
}

/// Conventional file name for a search table inside a cache directory.
pub fn search_file_name(k: u32, cap: u64) -> String {
    format!("taxicab-k{k}-cap{cap}.txcb")
}
