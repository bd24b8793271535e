//! Statistical distances between walk distributions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Additive smoothing mass used by [`DistanceKind::JensenShannonPaper`].
pub const JS_SMOOTHING: f64 = 1e-12;

const NORMALIZATION_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceKind {
    /// `sup_i |p_i - q_i|`.
    VariationSup,
    /// `(1/sqrt 2) * ||sqrt p - sqrt q||_2`.
    Hellinger,
    /// Symmetrized Kullback-Leibler average `½ KL(P‖Q) + ½ KL(Q‖P)` after
    /// additive smoothing with [`JS_SMOOTHING`].
    JensenShannonPaper,
    /// Conventional total variation, `½ Σ |p_i - q_i|`.
    HalfL1,
    /// Midpoint Jensen-Shannon divergence (natural log).
    JensenShannonMidpoint,
}

impl DistanceKind {
    pub const STANDARD_KINDS: [DistanceKind; 3] =
        [DistanceKind::VariationSup, DistanceKind::Hellinger, DistanceKind::JensenShannonPaper];

    pub fn name(&self) -> &'static str {
        match self {
            DistanceKind::VariationSup => "variation_sup",
            DistanceKind::Hellinger => "hellinger",
            DistanceKind::JensenShannonPaper => "jensen_shannon_paper",
            DistanceKind::HalfL1 => "half_l1",
            DistanceKind::JensenShannonMidpoint => "jensen_shannon_midpoint",
        }
    }

    /// Distance without normalization checks. Callers guarantee equal
    /// lengths.
    pub(crate) fn eval(&self, p: &[f64], q: &[f64]) -> f64 {
        match self {
            DistanceKind::VariationSup => variation_sup(p, q),
            DistanceKind::Hellinger => hellinger(p, q),
            DistanceKind::JensenShannonPaper => jensen_shannon_paper(p, q),
            DistanceKind::HalfL1 => half_l1(p, q),
            DistanceKind::JensenShannonMidpoint => jensen_shannon_midpoint(p, q),
        }
    }
}

impl fmt::Display for DistanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DistanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.replace('-', "_").as_str() {
            "variation_sup" | "tvd" | "variation" => DistanceKind::VariationSup,
            "hellinger" => DistanceKind::Hellinger,
            "jensen_shannon_paper" | "js" | "js_paper" => DistanceKind::JensenShannonPaper,
            "half_l1" => DistanceKind::HalfL1,
            "jensen_shannon_midpoint" | "js_midpoint" => DistanceKind::JensenShannonMidpoint,
            other => return Err(Error::InvalidParameter(format!("unknown distance kind {other:?}"))),
        })
    }
}

/// Checked distance between two probability vectors.
pub fn distance(p: &[f64], q: &[f64], kind: DistanceKind) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch { left: p.len(), right: q.len() });
    }
    for v in [p, q] {
        let sum: f64 = v.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL || v.iter().any(|&x| x < 0.0) {
            return Err(Error::NotNormalized { sum });
        }
    }
    Ok(kind.eval(p, q))
}

pub fn variation_sup(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

pub fn half_l1(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

pub fn hellinger(p: &[f64], q: &[f64]) -> f64 {
    let s: f64 = p
        .iter()
        .zip(q)
        .map(|(a, b)| {
            let d = a.max(0.0).sqrt() - b.max(0.0).sqrt();
            d * d
        })
        .sum();
    // rounding can push the sum a hair past 2
    (s.sqrt() / std::f64::consts::SQRT_2).min(1.0)
}

/// Entries where both vectors are zero contribute nothing; every other
/// entry is smoothed as `(x + s) / (1 + n s)` before the KL terms.
pub fn jensen_shannon_paper(p: &[f64], q: &[f64]) -> f64 {
    let n = p.len() as f64;
    let norm = 1.0 + n * JS_SMOOTHING;
    let mut total = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        if a == 0.0 && b == 0.0 {
            continue;
        }
        let a = (a.max(0.0) + JS_SMOOTHING) / norm;
        let b = (b.max(0.0) + JS_SMOOTHING) / norm;
        total += (a - b) * (a / b).ln();
    }
    (0.5 * total).max(0.0)
}

pub fn jensen_shannon_midpoint(p: &[f64], q: &[f64]) -> f64 {
    let mut total = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        let mid = 0.5 * (a + b);
        if a > 0.0 {
            total += a * (a / mid).ln();
        }
        if b > 0.0 {
            total += b * (b / mid).ln();
        }
    }
    (0.5 * total).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const ALL: [DistanceKind; 5] = [
        DistanceKind::VariationSup,
        DistanceKind::Hellinger,
        DistanceKind::JensenShannonPaper,
        DistanceKind::HalfL1,
        DistanceKind::JensenShannonMidpoint,
    ];

    #[test]
    fn identical_inputs_are_zero() {
        let p = [0.2, 0.0, 0.5, 0.3];
        for kind in ALL {
            assert_eq!(distance(&p, &p, kind).unwrap(), 0.0, "{kind}");
        }
    }

    #[test]
    fn disjoint_support() {
        let p = [1.0, 0.0];
        let q = [0.0, 1.0];
        assert_eq!(distance(&p, &q, DistanceKind::VariationSup).unwrap(), 1.0);
        assert!((distance(&p, &q, DistanceKind::Hellinger).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hellinger_hand_value() {
        // (1/sqrt2) * sqrt((sqrt(.5) - 1)^2 + .5)
        let d = distance(&[0.5, 0.5], &[1.0, 0.0], DistanceKind::Hellinger).unwrap();
        let expected = (((0.5f64).sqrt() - 1.0).powi(2) + 0.5).sqrt() / 2f64.sqrt();
        assert!((d - expected).abs() < 1e-15);
        assert!((d - 0.5412).abs() < 1e-4);
    }

    #[test]
    fn js_paper_is_finite_on_disjoint_support() {
        let d = jensen_shannon_paper(&[1.0, 0.0], &[0.0, 1.0]);
        assert!(d.is_finite());
        assert!(d > 20.0, "smoothing at 1e-12 leaves a large but finite gap: {d}");
    }

    #[test]
    fn input_errors() {
        assert!(matches!(
            distance(&[1.0], &[0.5, 0.5], DistanceKind::Hellinger),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            distance(&[0.7, 0.7], &[0.5, 0.5], DistanceKind::Hellinger),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn parses_names() {
        for kind in ALL {
            assert_eq!(kind.name().parse::<DistanceKind>().unwrap(), kind);
        }
        assert!("cosine".parse::<DistanceKind>().is_err());
    }

    fn simplex(len: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(0.0f64..1.0, len).prop_map(|v| {
            let s: f64 = v.iter().sum::<f64>().max(1e-9);
            v.into_iter().map(|x| x / s).collect()
        })
    }

    proptest! {
        #[test]
        fn symmetric_and_bounded((p, q) in (2usize..12).prop_flat_map(|n| (simplex(n), simplex(n)))) {
            prop_assume!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            prop_assume!((q.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            for kind in ALL {
                let a = kind.eval(&p, &q);
                let b = kind.eval(&q, &p);
                prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{} asymmetric", kind);
                prop_assert!(a >= 0.0);
            }
            let h = hellinger(&p, &q);
            prop_assert!((0.0..=1.0).contains(&h));
            prop_assert!(variation_sup(&p, &q) <= half_l1(&p, &q) + 1e-15);
            prop_assert!(variation_sup(&p, &q) <= 1.0);
        }

        #[test]
        fn zero_only_on_equal_inputs(p in simplex(6), i in 0usize..6, j in 0usize..6) {
            prop_assume!(i != j && p[i] > 1e-3);
            let mut q = p.clone();
            let shift = p[i] / 2.0;
            q[i] -= shift;
            q[j] += shift;
            for kind in ALL {
                prop_assert!(kind.eval(&p, &q) > 0.0, "{} vanished on distinct inputs", kind);
            }
        }
    }
}
