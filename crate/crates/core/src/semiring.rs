//! The nine semiring-like operations, their identities and padding values,
//! value domains, and the two precision modes.

use std::fmt;
use std::str::FromStr;

use half::f16;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An opcode pairing a reduction (⊕) with a combine (⊗).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SemiringOp {
    PlusMul,
    MinPlus,
    MaxPlus,
    MinMul,
    MaxMul,
    MinMax,
    MaxMin,
    OrAnd,
    AddNorm,
}

/// Value domain admitted by an opcode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    /// Finite reals.
    Finite,
    /// Reals plus +∞.
    FiniteOrPosInf,
    /// Reals plus −∞.
    FiniteOrNegInf,
    /// Strictly positive reals plus +∞.
    PositiveOrPosInf,
    /// Finite non-negative reals.
    NonNegative,
    /// Extended reals (anything but NaN).
    Extended,
    /// Exactly 0.0 or 1.0.
    Boolean,
}

impl Domain {
    pub fn contains(self, x: f32) -> bool {
        match self {
            Domain::Finite => x.is_finite(),
            Domain::FiniteOrPosInf => x.is_finite() || x == f32::INFINITY,
            Domain::FiniteOrNegInf => x.is_finite() || x == f32::NEG_INFINITY,
            Domain::PositiveOrPosInf => x > 0.0,
            Domain::NonNegative => x.is_finite() && x >= 0.0,
            Domain::Extended => !x.is_nan(),
            Domain::Boolean => x == 0.0 || x == 1.0,
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            Domain::Finite => "finite reals",
            Domain::FiniteOrPosInf => "reals or +inf",
            Domain::FiniteOrNegInf => "reals or -inf",
            Domain::PositiveOrPosInf => "x > 0 or +inf",
            Domain::NonNegative => "finite x >= 0",
            Domain::Extended => "extended reals",
            Domain::Boolean => "{0, 1}",
        }
    }
}

/// Identity of ⊕ together with the values used to pad partial A and B tiles.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityPadding {
    pub oplus_identity: f32,
    pub pad_a: f32,
    pub pad_b: f32,
}

/// How values are carried through ⊗.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrecisionMode {
    /// 32-bit floats end to end.
    #[default]
    Exact32,
    /// ⊗ inputs rounded to binary16, ⊕ accumulation in 32-bit.
    Mixed16,
}

impl PrecisionMode {
    /// Rounds an operand headed into ⊗.
    #[inline]
    pub fn quantize(self, x: f32) -> f32 {
        match self {
            PrecisionMode::Exact32 => x,
            PrecisionMode::Mixed16 => round_to_half(x),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PrecisionMode::Exact32 => "exact32",
            PrecisionMode::Mixed16 => "mixed16",
        }
    }
}

impl fmt::Display for PrecisionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PrecisionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact32" => Ok(PrecisionMode::Exact32),
            "mixed16" => Ok(PrecisionMode::Mixed16),
            other => Err(Error::Config(format!("unknown precision mode '{other}'"))),
        }
    }
}

/// Nearest binary16 value under round-to-nearest-even, widened back to f32.
/// Magnitudes past the half range overflow to ±∞.
#[inline]
pub fn round_to_half(x: f32) -> f32 {
    f16::from_f32(x).to_f32()
}

impl SemiringOp {
    pub const ALL: [SemiringOp; 9] = [
        SemiringOp::PlusMul,
        SemiringOp::MinPlus,
        SemiringOp::MaxPlus,
        SemiringOp::MinMul,
        SemiringOp::MaxMul,
        SemiringOp::MinMax,
        SemiringOp::MaxMin,
        SemiringOp::OrAnd,
        SemiringOp::AddNorm,
    ];

    /// Opcodes whose closure C ← C ⊕ (C ⊗ W) is meaningful.
    pub const CLOSURE: [SemiringOp; 7] = [
        SemiringOp::MinPlus,
        SemiringOp::MaxPlus,
        SemiringOp::MinMul,
        SemiringOp::MaxMul,
        SemiringOp::MinMax,
        SemiringOp::MaxMin,
        SemiringOp::OrAnd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SemiringOp::PlusMul => "plus_mul",
            SemiringOp::MinPlus => "min_plus",
            SemiringOp::MaxPlus => "max_plus",
            SemiringOp::MinMul => "min_mul",
            SemiringOp::MaxMul => "max_mul",
            SemiringOp::MinMax => "min_max",
            SemiringOp::MaxMin => "max_min",
            SemiringOp::OrAnd => "or_and",
            SemiringOp::AddNorm => "add_norm",
        }
    }

    pub fn domain(self) -> Domain {
        match self {
            SemiringOp::PlusMul | SemiringOp::AddNorm => Domain::Finite,
            SemiringOp::MinPlus => Domain::FiniteOrPosInf,
            SemiringOp::MaxPlus => Domain::FiniteOrNegInf,
            SemiringOp::MinMul => Domain::PositiveOrPosInf,
            SemiringOp::MaxMul => Domain::NonNegative,
            SemiringOp::MinMax | SemiringOp::MaxMin => Domain::Extended,
            SemiringOp::OrAnd => Domain::Boolean,
        }
    }

    pub fn is_closure_op(self) -> bool {
        !matches!(self, SemiringOp::PlusMul | SemiringOp::AddNorm)
    }

    /// ⊕-identity and the A/B padding constants. Padded ⊗ products reduce to
    /// the identity, so partial tiles contribute nothing along K.
    pub fn identity_and_padding(self) -> IdentityPadding {
        let v = match self {
            SemiringOp::PlusMul | SemiringOp::AddNorm | SemiringOp::OrAnd | SemiringOp::MaxMul => 0.0,
            SemiringOp::MinPlus | SemiringOp::MinMul | SemiringOp::MinMax => f32::INFINITY,
            SemiringOp::MaxPlus | SemiringOp::MaxMin => f32::NEG_INFINITY,
        };
        IdentityPadding {
            oplus_identity: v,
            pad_a: v,
            pad_b: v,
        }
    }

    #[inline]
    pub fn oplus_identity(self) -> f32 {
        self.identity_and_padding().oplus_identity
    }

    pub fn check(self, x: f32) -> Result<()> {
        let domain = self.domain();
        if domain.contains(x) {
            Ok(())
        } else {
            Err(Error::Domain {
                op: self,
                value: x,
                domain: domain.describe(),
            })
        }
    }

    /// ⊕ without domain checks.
    #[inline]
    pub fn oplus_raw(self, a: f32, b: f32) -> f32 {
        match self {
            SemiringOp::PlusMul | SemiringOp::AddNorm => prim::add(a, b),
            SemiringOp::MinPlus | SemiringOp::MinMul | SemiringOp::MinMax => prim::min(a, b),
            SemiringOp::MaxPlus | SemiringOp::MaxMul | SemiringOp::MaxMin => prim::max(a, b),
            SemiringOp::OrAnd => prim::or(a, b),
        }
    }

    /// ⊗ without domain checks or rounding.
    #[inline]
    pub fn otimes_raw(self, a: f32, b: f32) -> f32 {
        match self {
            SemiringOp::PlusMul | SemiringOp::MinMul | SemiringOp::MaxMul => prim::mul(a, b),
            SemiringOp::MinPlus | SemiringOp::MaxPlus => prim::add(a, b),
            SemiringOp::MinMax => prim::max(a, b),
            SemiringOp::MaxMin => prim::min(a, b),
            SemiringOp::OrAnd => prim::and(a, b),
            SemiringOp::AddNorm => prim::sq_diff(a, b),
        }
    }
}

impl fmt::Display for SemiringOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SemiringOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.to_ascii_lowercase().replace('-', "_");
        SemiringOp::ALL
            .into_iter()
            .find(|op| op.name() == norm || op.name().replace('_', "") == norm)
            .ok_or_else(|| Error::Config(format!("unknown opcode '{s}'")))
    }
}

/// ⊗ with domain checking. In `Mixed16` both operands are rounded to half
/// precision before the check and the combine.
pub fn scalar_otimes(op: SemiringOp, a: f32, b: f32, mode: PrecisionMode) -> Result<f32> {
    let (a, b) = (mode.quantize(a), mode.quantize(b));
    op.check(a)?;
    op.check(b)?;
    Ok(op.otimes_raw(a, b))
}

/// ⊕ with domain checking (the ⊕-identity is always admitted).
pub fn scalar_oplus(op: SemiringOp, a: f32, b: f32) -> Result<f32> {
    let id = op.oplus_identity();
    for x in [a, b] {
        if x != id {
            op.check(x)?;
        }
    }
    Ok(op.oplus_raw(a, b))
}

pub fn identity_and_padding(op: SemiringOp) -> IdentityPadding {
    op.identity_and_padding()
}

/// Scalar primitives shared by every evaluation path so that tiled and
/// untiled folds are bit-identical.
pub(crate) mod prim {
    #[inline(always)]
    pub fn add(a: f32, b: f32) -> f32 {
        a + b
    }
    #[inline(always)]
    pub fn mul(a: f32, b: f32) -> f32 {
        a * b
    }
    #[inline(always)]
    pub fn min(a: f32, b: f32) -> f32 {
        a.min(b)
    }
    #[inline(always)]
    pub fn max(a: f32, b: f32) -> f32 {
        a.max(b)
    }
    #[inline(always)]
    pub fn or(a: f32, b: f32) -> f32 {
        if a != 0.0 || b != 0.0 {
            1.0
        } else {
            0.0
        }
    }
    #[inline(always)]
    pub fn and(a: f32, b: f32) -> f32 {
        if a != 0.0 && b != 0.0 {
            1.0
        } else {
            0.0
        }
    }
    #[inline(always)]
    pub fn sq_diff(a: f32, b: f32) -> f32 {
        let d = a - b;
        d * d
    }
}

/// Statically dispatched ⊕/⊗ pair used by the inner loops.
pub(crate) trait Kernel {
    fn oplus(a: f32, b: f32) -> f32;
    fn otimes(a: f32, b: f32) -> f32;
}

macro_rules! kernel {
    ($name:ident, $oplus:ident, $otimes:ident) => {
        pub(crate) struct $name;
        impl Kernel for $name {
            #[inline(always)]
            fn oplus(a: f32, b: f32) -> f32 {
                prim::$oplus(a, b)
            }
            #[inline(always)]
            fn otimes(a: f32, b: f32) -> f32 {
                prim::$otimes(a, b)
            }
        }
    };
}

pub(crate) mod kernels {
    use super::{prim, Kernel};

    kernel!(PlusMul, add, mul);
    kernel!(MinPlus, min, add);
    kernel!(MaxPlus, max, add);
    kernel!(MinMul, min, mul);
    kernel!(MaxMul, max, mul);
    kernel!(MinMax, min, max);
    kernel!(MaxMin, max, min);
    kernel!(OrAnd, or, and);
    kernel!(AddNorm, add, sq_diff);
}

/// Expands `$body` once per opcode with `$k` bound to the matching kernel type.
macro_rules! with_kernel {
    ($op:expr, $k:ident => $body:expr) => {{
        use $crate::semiring::kernels;
        use $crate::semiring::SemiringOp as Op;
        match $op {
            Op::PlusMul => {
                type $k = kernels::PlusMul;
                $body
            }
            Op::MinPlus => {
                type $k = kernels::MinPlus;
                $body
            }
            Op::MaxPlus => {
                type $k = kernels::MaxPlus;
                $body
            }
            Op::MinMul => {
                type $k = kernels::MinMul;
                $body
            }
            Op::MaxMul => {
                type $k = kernels::MaxMul;
                $body
            }
            Op::MinMax => {
                type $k = kernels::MinMax;
                $body
            }
            Op::MaxMin => {
                type $k = kernels::MaxMin;
                $body
            }
            Op::OrAnd => {
                type $k = kernels::OrAnd;
                $body
            }
            Op::AddNorm => {
                type $k = kernels::AddNorm;
                $body
            }
        }
    }};
}
pub(crate) use with_kernel;

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sample(op: SemiringOp, rng: &mut ChaCha8Rng) -> f32 {
        match op.domain() {
            Domain::Boolean => f32::from(rng.gen_bool(0.5) as u8),
            Domain::NonNegative => rng.gen_range(0.0..100.0),
            Domain::PositiveOrPosInf => {
                if rng.gen_bool(0.1) {
                    f32::INFINITY
                } else {
                    rng.gen_range(1e-3..100.0)
                }
            }
            Domain::FiniteOrPosInf if rng.gen_bool(0.1) => f32::INFINITY,
            Domain::FiniteOrNegInf if rng.gen_bool(0.1) => f32::NEG_INFINITY,
            Domain::Extended if rng.gen_bool(0.1) => {
                if rng.gen_bool(0.5) {
                    f32::INFINITY
                } else {
                    f32::NEG_INFINITY
                }
            }
            _ => rng.gen_range(-100.0..100.0),
        }
    }

    #[test]
    fn otimes_examples() {
        use PrecisionMode::*;
        assert_eq!(
            scalar_otimes(SemiringOp::MinPlus, 3.0, 4.0, Exact32).unwrap(),
            7.0
        );
        // |1 - 3|^2
        let brute = (1.0f64 - 3.0).abs().powi(2) as f32;
        assert_eq!(
            scalar_otimes(SemiringOp::AddNorm, 1.0, 3.0, Exact32).unwrap(),
            brute
        );
        assert_eq!(
            scalar_otimes(SemiringOp::PlusMul, 2049.0, 1.0, Mixed16).unwrap(),
            2048.0
        );
    }

    #[test]
    fn oplus_examples() {
        assert_eq!(
            scalar_oplus(SemiringOp::MinPlus, 5.0, f32::INFINITY).unwrap(),
            5.0
        );
        assert_eq!(
            scalar_oplus(SemiringOp::MaxPlus, f32::NEG_INFINITY, -2.0).unwrap(),
            -2.0
        );
        assert_eq!(scalar_oplus(SemiringOp::OrAnd, 0.0, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn padding_examples() {
        let p = identity_and_padding(SemiringOp::MinPlus);
        assert_eq!(
            (p.oplus_identity, p.pad_a, p.pad_b),
            (f32::INFINITY, f32::INFINITY, f32::INFINITY)
        );
        let p = identity_and_padding(SemiringOp::MaxMul);
        assert_eq!((p.oplus_identity, p.pad_a, p.pad_b), (0.0, 0.0, 0.0));
        let p = identity_and_padding(SemiringOp::AddNorm);
        assert_eq!((p.oplus_identity, p.pad_a, p.pad_b), (0.0, 0.0, 0.0));
    }

    #[test]
    fn round_to_half_examples() {
        assert_eq!(round_to_half(1.0), 1.0);
        assert_eq!(round_to_half(2049.0), 2048.0);
        assert_eq!(round_to_half(2051.0), 2052.0);
        assert_eq!(round_to_half(70000.0), f32::INFINITY);
        assert_eq!(round_to_half(-70000.0), f32::NEG_INFINITY);
        assert_eq!(round_to_half(65504.0), 65504.0);
        assert_eq!(round_to_half(f32::INFINITY), f32::INFINITY);
        assert_eq!(round_to_half(f32::NEG_INFINITY), f32::NEG_INFINITY);
    }

    #[test]
    fn domain_errors() {
        use PrecisionMode::Exact32;
        assert!(matches!(
            scalar_otimes(SemiringOp::OrAnd, 0.5, 1.0, Exact32),
            Err(Error::Domain { .. })
        ));
        assert!(scalar_otimes(SemiringOp::MinPlus, f32::NEG_INFINITY, 1.0, Exact32).is_err());
        assert!(scalar_otimes(SemiringOp::MaxPlus, f32::INFINITY, 1.0, Exact32).is_err());
        assert!(scalar_otimes(SemiringOp::MinMul, 0.0, f32::INFINITY, Exact32).is_err());
        assert!(scalar_otimes(SemiringOp::MaxMul, f32::INFINITY, 0.0, Exact32).is_err());
        assert!(scalar_otimes(SemiringOp::PlusMul, f32::NAN, 0.0, Exact32).is_err());
        assert!(scalar_oplus(SemiringOp::OrAnd, 2.0, 0.0).is_err());
        // 70000 saturates to +inf, which plus-mul rejects.
        assert!(scalar_otimes(SemiringOp::PlusMul, 70000.0, 1.0, PrecisionMode::Mixed16).is_err());
    }

    #[test]
    fn oplus_commutative_and_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for op in SemiringOp::ALL {
            for _ in 0..1000 {
                let (a, b, c) = (sample(op, &mut rng), sample(op, &mut rng), sample(op, &mut rng));
                let ab = scalar_oplus(op, a, b).unwrap();
                let ba = scalar_oplus(op, b, a).unwrap();
                assert_eq!(ab.to_bits(), ba.to_bits(), "{op} commutativity {a} {b}");
                // + is not associative in floating point; integers keep sums exact.
                let (a, b, c) = if matches!(op, SemiringOp::PlusMul | SemiringOp::AddNorm) {
                    (a.round(), b.round(), c.round())
                } else {
                    (a, b, c)
                };
                let left = scalar_oplus(op, a, scalar_oplus(op, b, c).unwrap()).unwrap();
                let right = scalar_oplus(op, scalar_oplus(op, a, b).unwrap(), c).unwrap();
                assert_eq!(left.to_bits(), right.to_bits(), "{op} associativity {a} {b} {c}");
            }
        }
    }

    #[test]
    fn identity_and_padding_vanish() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for op in SemiringOp::ALL {
            let p = op.identity_and_padding();
            assert_eq!(p.pad_a, p.pad_b);
            if op == SemiringOp::AddNorm {
                let v = scalar_otimes(op, p.pad_a, p.pad_b, PrecisionMode::Exact32).unwrap();
                assert_eq!(v, p.oplus_identity);
                continue;
            }
            for _ in 0..1000 {
                let x = sample(op, &mut rng);
                assert_eq!(scalar_oplus(op, p.oplus_identity, x).unwrap(), x, "{op} identity");
                if op == SemiringOp::PlusMul {
                    // 0 * x is ±0; either sign is the additive identity.
                    assert_eq!(op.otimes_raw(p.pad_a, x), 0.0);
                    assert_eq!(op.otimes_raw(x, p.pad_b), 0.0);
                } else {
                    assert_eq!(op.otimes_raw(p.pad_a, x), p.oplus_identity, "{op} pad_a {x}");
                    assert_eq!(op.otimes_raw(x, p.pad_b), p.oplus_identity, "{op} pad_b {x}");
                }
            }
        }
    }

    #[test]
    fn op_names_round_trip() {
        for op in SemiringOp::ALL {
            assert_eq!(op.name().parse::<SemiringOp>().unwrap(), op);
        }
        assert_eq!("minplus".parse::<SemiringOp>().unwrap(), SemiringOp::MinPlus);
        assert_eq!("Max-Min".parse::<SemiringOp>().unwrap(), SemiringOp::MaxMin);
        assert!("xor".parse::<SemiringOp>().is_err());
    }

    proptest! {
        #[test]
        fn round_to_half_idempotent(x in prop::num::f32::NORMAL | prop::num::f32::SUBNORMAL | prop::num::f32::INFINITE | prop::num::f32::ZERO) {
            let once = round_to_half(x);
            prop_assert_eq!(round_to_half(once).to_bits(), once.to_bits());
        }

        // Positive operands: with cancellation the unfused rounding of a*b is
        // not bounded by the ulp of the result.
        #[test]
        fn plus_mul_is_multiply_accumulate(a in 1e-3f32..1e3, b in 1e-3f32..1e3, c in 1e-3f32..1e3) {
            let op = SemiringOp::PlusMul;
            let got = scalar_oplus(op, c, scalar_otimes(op, a, b, PrecisionMode::Exact32).unwrap()).unwrap();
            let fused = a.mul_add(b, c);
            let ulps = (i64::from(got.to_bits()) - i64::from(fused.to_bits())).abs();
            prop_assert!(ulps <= 1, "{} vs fused {}", got, fused);
        }
    }
}
