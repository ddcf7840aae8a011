use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ClosedCurve;
use crate::Result;

/// On-disk form of a curve: `{"dim": n, "samples": [[…], …]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSnapshot {
    pub dim: usize,
    pub samples: Vec<Vec<f64>>,
}

impl From<&ClosedCurve> for CurveSnapshot {
    fn from(c: &ClosedCurve) -> Self {
        Self { dim: c.dim(), samples: c.points().map(|p| p.to_vec()).collect() }
    }
}

impl CurveSnapshot {
    pub fn into_curve(self) -> Result<ClosedCurve> {
        ClosedCurve::from_points(self.dim, &self.samples)
    }
}

impl ClosedCurve {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&CurveSnapshot::from(self)).expect("finite samples always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<CurveSnapshot>(text)?.into_curve()
    }

    pub fn write_snapshot(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn read_snapshot(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn snapshot_shape() {
        let c = ClosedCurve::sample(2, 8, |u, p| {
            p[0] = u.cos();
            p[1] = u.sin();
        })
        .unwrap();
        let v: serde_json::Value = serde_json::from_str(&c.to_json()).unwrap();
        assert_eq!(v["dim"], 2);
        assert_eq!(v["samples"].as_array().unwrap().len(), 8);
        assert!(ClosedCurve::from_json(r#"{"dim": 2, "samples": [[0, 0]]}"#).is_err());
    }

    proptest! {
        #[test]
        fn json_round_trip_is_bit_exact(
            vals in prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO, 24..60),
        ) {
            let n = vals.len() / 3;
            // Offsetting by the index keeps consecutive samples distinct.
            let coords: Vec<f64> = vals[..3 * n]
                .iter()
                .enumerate()
                .map(|(k, v)| if k % 3 == 0 { (k / 3) as f64 } else { *v })
                .collect();
            let c = ClosedCurve::new(3, coords).unwrap();
            let back = ClosedCurve::from_json(&c.to_json()).unwrap();
            let same = c.coords().iter().zip(back.coords()).all(|(a, b)| a.to_bits() == b.to_bits());
            prop_assert!(same);
        }
    }
}
