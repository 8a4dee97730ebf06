//! Cell types for count tables.
//!
//! A table stores one unsigned integer per `(n, j)` cell. Exact tables use
//! checked addition and report overflow; saturating tables clamp at a cap,
//! which keeps search tables one or two bytes wide.

use std::fmt::Debug;

use num_traits::{CheckedAdd, NumCast, PrimInt, SaturatingAdd, Unsigned};

use crate::error::{Error, Result};

/// Unsigned integer usable as a count cell.
pub trait CountCell:
    PrimInt + Unsigned + CheckedAdd + SaturatingAdd + Default + Debug + Send + Sync + 'static
{
    /// Width in bytes, as recorded in cache files.
    const WIDTH: u8;

    fn from_u64(v: u64) -> Option<Self> {
        NumCast::from(v)
    }

    /// Widens to `u64`, clamping values that do not fit.
    fn as_u64(self) -> u64 {
        self.to_u64().unwrap_or(u64::MAX)
    }

    fn write_le(self, out: &mut Vec<u8>);

    fn read_le(bytes: &[u8]) -> Self;
}

macro_rules! impl_cell {
    ($($t:ty),*) => {$(
        impl CountCell for $t {
            const WIDTH: u8 = std::mem::size_of::<$t>() as u8;

            fn write_le(self, out: &mut Vec<u8>) {
                out.extend_from_slice(&self.to_le_bytes());
            }

            fn read_le(bytes: &[u8]) -> Self {
                let mut buf = [0u8; std::mem::size_of::<$t>()];
                buf.copy_from_slice(bytes);
                <$t>::from_le_bytes(buf)
            }
        }
    )*};
}

impl_cell!(u8, u16, u32, u64, u128);

/// Arithmetic mode of a count or table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CountMode {
    /// Overflow-checked; an overflow is an error.
    Exact,
    /// Values are clamped at `cap`.
    Saturating { cap: u64 },
}

impl CountMode {
    pub fn cap(self) -> Option<u64> {
        match self {
            CountMode::Exact => None,
            CountMode::Saturating { cap } => Some(cap),
        }
    }

    /// Checks that the cap is positive, fits in `C`, and exceeds every
    /// value in `targets` the caller intends to compare against.
    pub fn validate<C: CountCell>(self, largest_target: Option<u64>) -> Result<()> {
        if let CountMode::Saturating { cap } = self {
            if cap == 0 {
                return Err(Error::Config("saturating cap must be positive".into()));
            }
            if C::from_u64(cap).is_none() {
                return Err(Error::Config(format!(
                    "cap {cap} does not fit in a {}-byte cell",
                    C::WIDTH
                )));
            }
            if let Some(m) = largest_target {
                if cap <= m {
                    return Err(Error::Config(format!(
                        "cap {cap} must exceed the comparison target {m}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A representation count together with the mode it was computed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Count {
    pub value: u64,
    pub mode: CountMode,
}

impl Count {
    pub fn exact(value: u64) -> Self {
        Count {
            value,
            mode: CountMode::Exact,
        }
    }

    /// True when the value sits at the cap and the true count may be larger.
    pub fn is_saturated(&self) -> bool {
        matches!(self.mode, CountMode::Saturating { cap } if self.value >= cap)
    }
}
