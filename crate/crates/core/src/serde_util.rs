//! 1-based index encoding for the JSON interfaces.

pub mod one_based {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(index: &usize, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(*index as u64 + 1)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<usize, D::Error> {
        let v = u64::deserialize(d)?;
        v.checked_sub(1)
            .map(|i| i as usize)
            .ok_or_else(|| serde::de::Error::custom("indices are 1-based"))
    }
}

pub mod one_based_vec {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(indices: &[usize], s: S) -> Result<S::Ok, S::Error> {
        indices.iter().map(|i| i + 1).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<usize>, D::Error> {
        Vec::<usize>::deserialize(d)?
            .into_iter()
            .map(|v| {
                v.checked_sub(1)
                    .ok_or_else(|| serde::de::Error::custom("indices are 1-based"))
            })
            .collect()
    }
}
