//! Serialize complex numbers as `[re, im]` pairs.

use num_complex::Complex64;
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serializer};

pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(zs: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(zs.len()))?;
        for z in zs {
            seq.serialize_element(&[z.re, z.im])?;
        }
        seq.end()
    }
}

pub mod pair {
    use super::*;

    pub fn serialize<S: Serializer>(zs: &[Complex64; 2], s: S) -> Result<S::Ok, S::Error> {
        super::vec::serialize(zs, s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[Complex64; 2], D::Error> {
        let [a, b] = <[[f64; 2]; 2]>::deserialize(d)?;
        Ok([Complex64::new(a[0], a[1]), Complex64::new(b[0], b[1])])
    }
}
