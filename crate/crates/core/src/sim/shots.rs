use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::NoiseModel;
use crate::bits::Bits;
use crate::error::{Error, Result};

/// Histogram of measured bitstrings.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ShotTable {
    pub counts: BTreeMap<Bits, u64>,
    pub shots: u64,
    pub seed: u64,
}

/// JSON sidecar of a shot table file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotTableMetadata {
    pub shots: u64,
    pub seed: u64,
    pub noise_kind: String,
    pub p: f64,
    pub circuit_hash: String,
}

#[derive(Serialize, Deserialize)]
struct Row {
    bitstring: String,
    count: u64,
}

impl ShotTable {
    pub fn new(seed: u64) -> Self {
        Self {
            counts: BTreeMap::new(),
            shots: 0,
            seed,
        }
    }

    pub fn add(&mut self, bits: Bits, count: u64) {
        *self.counts.entry(bits).or_insert(0) += count;
        self.shots += count;
    }

    /// Adds every count of `other`.
    pub fn merge(&mut self, other: ShotTable) {
        for (b, c) in other.counts {
            self.add(b, c);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Bits, u64)> {
        self.counts.iter().map(|(b, &c)| (b, c))
    }

    /// Bitstring length, if any shot was recorded.
    pub fn width(&self) -> Option<usize> {
        self.counts.keys().next().map(Bits::len)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for (b, c) in self.iter() {
            out.serialize(Row {
                bitstring: b.to_string(),
                count: c,
            })?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R, seed: u64) -> Result<Self> {
        let mut t = ShotTable::new(seed);
        let mut width = None;
        for (i, row) in csv::Reader::from_reader(r).deserialize::<Row>().enumerate() {
            let row = row?;
            let bits = Bits::parse_binary(&row.bitstring)
                .ok_or_else(|| Error::parse(i + 2, format!("bad bitstring `{}`", row.bitstring)))?;
            if *width.get_or_insert(bits.len()) != bits.len() {
                return Err(Error::parse(i + 2, "bitstrings differ in length"));
            }
            t.add(bits, row.count);
        }
        Ok(t)
    }

    pub fn metadata(&self, nm: &NoiseModel, circuit_hash: &str) -> ShotTableMetadata {
        ShotTableMetadata {
            shots: self.shots,
            seed: self.seed,
            noise_kind: nm.kind.name().to_string(),
            p: nm.p,
            circuit_hash: circuit_hash.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let mut t = ShotTable::new(9);
        t.add(Bits::parse_binary("0101").unwrap(), 3);
        t.add(Bits::parse_binary("1111").unwrap(), 5);
        t.add(Bits::parse_binary("0101").unwrap(), 1);
        assert_eq!(t.shots, 9);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("bitstring,count\n"));
        assert_eq!(ShotTable::read_csv(&buf[..], 9).unwrap(), t);
    }

    #[test]
    fn rejects_ragged_rows() {
        let text = "bitstring,count\n01,1\n011,2\n";
        assert!(ShotTable::read_csv(text.as_bytes(), 0).is_err());
    }
}
