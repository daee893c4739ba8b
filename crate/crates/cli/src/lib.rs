//! Serialisation and parsing used by the `goebel` command-line tool.

pub mod bfile;
pub mod krange;
pub mod record;
