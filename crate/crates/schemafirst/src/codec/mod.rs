//! Self-describing binary wire format for telemetry records.
//!
//! A payload starts with the magic bytes `0x53 0x46`, a format byte, the
//! asset's fully qualified name, and the schema version — enough for any
//! consumer with registry access to decode it. The body is a sequence of
//! `(field id, wire type, payload)` entries sorted ascending by id, which
//! makes encoding canonical: the same logical record always produces the
//! same bytes, no matter the order fields were staged in.
//!
//! Decoders skip fields whose ids the schema does not declare (forward
//! compatibility) and report them in a skipped-ids list.
//!
//! Wire types:
//!
//! | byte | meaning | payload |
//! |------|---------|---------|
//! | 0 | bool | one byte, 0 or 1 |
//! | 1 | i32 / enum | zigzag + unsigned LEB128 |
//! | 2 | i64 | zigzag + unsigned LEB128 |
//! | 3 | double | 8 bytes little-endian IEEE-754 |
//! | 4 | text / bytes | LEB128 length + raw bytes (text must be UTF-8) |
//! | 5 | nested record | LEB128 byte length + nested field sequence |
//! | 6 | list | element wire-type byte + LEB128 count + elements |
//! | 7 | map | key wt + value wt + LEB128 count + interleaved pairs |

mod decode;
mod encode;
mod json;
#[cfg(test)]
mod tests;
mod validate;
mod value;
mod varint;

pub use decode::{decode, decode_with_schema, DecodeError, DecodedRecord, SchemaLookup};
pub use encode::{check_value, encode, EncodeError};
pub use json::{record_from_json, record_to_json};
pub use validate::{validate_value, Violation};
pub use value::{RecordValue, Value};
pub use varint::{read_uleb, unzigzag32, unzigzag64, write_uleb, zigzag32, zigzag64};

/// First two bytes of every payload.
pub const MAGIC: [u8; 2] = [0x53, 0x46];
/// Current format revision.
pub const FORMAT_VERSION: u8 = 0x01;

pub(crate) mod wire {
    pub const BOOL: u8 = 0;
    pub const I32: u8 = 1;
    pub const I64: u8 = 2;
    pub const DOUBLE: u8 = 3;
    pub const BYTES: u8 = 4;
    pub const RECORD: u8 = 5;
    pub const LIST: u8 = 6;
    pub const MAP: u8 = 7;
}
