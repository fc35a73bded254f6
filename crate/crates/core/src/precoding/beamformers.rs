use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::channel::SubIc;
use crate::error::{Error, Result};
use crate::C64;

/// Allowed deviation of `‖v‖` from one.
pub const UNIT_NORM_TOL: f64 = 1e-9;

/// TX beamformers `t_j` and RX filters `g_i` for the present nodes of a
/// (generalized) interference channel.
#[derive(Clone, Debug, PartialEq)]
pub struct BeamformerSet {
    tx: Vec<Option<DVector<C64>>>,
    rx: Vec<Option<DVector<C64>>>,
}

impl BeamformerSet {
    /// Every `Some` entry must be unit-norm; `tx` and `rx` must have the same
    /// length `K`.
    pub fn new(tx: Vec<Option<DVector<C64>>>, rx: Vec<Option<DVector<C64>>>) -> Result<Self> {
        if tx.len() != rx.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} transmit and {} receive slots",
                tx.len(),
                rx.len()
            )));
        }
        for (kind, list) in [("transmit beamformer", &tx), ("receive filter", &rx)] {
            for (k, v) in list.iter().enumerate() {
                if let Some(v) = v {
                    check_unit(v, kind, k)?;
                }
            }
        }
        Ok(Self { tx, rx })
    }

    /// All `K` nodes present.
    pub fn full(tx: Vec<DVector<C64>>, rx: Vec<DVector<C64>>) -> Result<Self> {
        Self::new(tx.into_iter().map(Some).collect(), rx.into_iter().map(Some).collect())
    }

    pub fn users(&self) -> usize {
        self.tx.len()
    }

    pub fn tx(&self, k: usize) -> Option<&DVector<C64>> {
        self.tx.get(k).and_then(Option::as_ref)
    }

    pub fn rx(&self, i: usize) -> Option<&DVector<C64>> {
        self.rx.get(i).and_then(Option::as_ref)
    }

    /// Present receivers and transmitters.
    pub fn present(&self) -> SubIc {
        let mask = |v: &[Option<DVector<C64>>]| {
            v.iter()
                .enumerate()
                .filter(|(_, x)| x.is_some())
                .fold(0u32, |m, (k, _)| m | 1 << k)
        };
        SubIc::from_masks(mask(&self.rx), mask(&self.tx))
    }

    pub fn is_complete(&self) -> bool {
        self.tx.iter().chain(&self.rx).all(Option::is_some)
    }

    /// For vectors produced internally (already unit-norm).
    pub(crate) fn from_parts(tx: Vec<Option<DVector<C64>>>, rx: Vec<Option<DVector<C64>>>) -> Self {
        debug_assert!(Self::new(tx.clone(), rx.clone()).is_ok());
        Self { tx, rx }
    }

    pub(crate) fn rx_slots(&self) -> &[Option<DVector<C64>>] {
        &self.rx
    }

    pub(crate) fn tx_slots(&self) -> &[Option<DVector<C64>>] {
        &self.tx
    }
}

pub(crate) fn check_unit(v: &DVector<C64>, kind: &str, k: usize) -> Result<()> {
    let n = v.norm();
    if v.is_empty() || (n - 1.0).abs().is_nan() || (n - 1.0).abs() > UNIT_NORM_TOL {
        return Err(Error::InvalidArgument(format!(
            "{kind} {} has norm {n}, expected 1",
            k + 1
        )));
    }
    Ok(())
}

/// A complex vector as separate real and imaginary arrays.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexVector {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<&DVector<C64>> for ComplexVector {
    fn from(v: &DVector<C64>) -> Self {
        Self {
            re: v.iter().map(|z| z.re).collect(),
            im: v.iter().map(|z| z.im).collect(),
        }
    }
}

impl TryFrom<&ComplexVector> for DVector<C64> {
    type Error = Error;

    fn try_from(c: &ComplexVector) -> Result<Self> {
        if c.re.len() != c.im.len() {
            return Err(Error::DimensionMismatch("re and im lengths differ".into()));
        }
        Ok(DVector::from_iterator(
            c.re.len(),
            c.re.iter().zip(&c.im).map(|(&r, &i)| C64::new(r, i)),
        ))
    }
}

#[derive(Serialize, Deserialize)]
struct Repr {
    tx: Vec<Option<ComplexVector>>,
    rx: Vec<Option<ComplexVector>>,
}

impl Serialize for BeamformerSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let conv = |v: &[Option<DVector<C64>>]| v.iter().map(|x| x.as_ref().map(ComplexVector::from)).collect();
        Repr {
            tx: conv(&self.tx),
            rx: conv(&self.rx),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BeamformerSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = Repr::deserialize(d)?;
        let conv = |v: &[Option<ComplexVector>]| -> Result<Vec<Option<DVector<C64>>>> {
            v.iter()
                .map(|x| x.as_ref().map(DVector::try_from).transpose())
                .collect()
        };
        let tx = conv(&r.tx).map_err(D::Error::custom)?;
        let rx = conv(&r.rx).map_err(D::Error::custom)?;
        BeamformerSet::new(tx, rx).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::basis_vector;

    #[test]
    fn rejects_non_unit() {
        let v = DVector::from_element(2, C64::new(1.0, 0.0));
        assert!(BeamformerSet::new(vec![Some(v)], vec![None]).is_err());
        assert!(BeamformerSet::new(vec![None], vec![]).is_err());
    }

    #[test]
    fn presence_and_json() {
        let e = basis_vector(2, 1);
        let b = BeamformerSet::new(vec![Some(e.clone()), None, Some(e.clone())], vec![Some(e), None, None]).unwrap();
        assert_eq!(b.present(), SubIc::from_masks(0b001, 0b101));
        assert!(!b.is_complete());
        let js = serde_json::to_string(&b).unwrap();
        let back: BeamformerSet = serde_json::from_str(&js).unwrap();
        assert_eq!(back, b);
    }
}
