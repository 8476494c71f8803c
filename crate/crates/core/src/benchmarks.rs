//! Permutation benchmarks obtained by lifting pseudo-Boolean functions
//! through the fixed-point indicator string.
//!
//! A permutation `σ` is mapped to the bit string `x(σ)` with `x_i = 1` iff
//! `σ(i) = i`, and any `f : {0,1}^n → ℤ` becomes `σ ↦ f(x(σ))`. The three
//! named benchmarks are evaluated directly on the word; tests pin them to
//! their lifted definitions.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::perm::{check_jump_parameter, fixed_points, Permutation};

/// An integer fitness value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FitnessValue(pub i64);

impl fmt::Display for FitnessValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `x(σ)`: bit `i` is set iff `σ(i) = i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndicatorString {
    pub bits: Vec<bool>,
}

impl IndicatorString {
    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

impl fmt::Display for IndicatorString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

pub fn indicator_string(sigma: &Permutation) -> IndicatorString {
    IndicatorString {
        bits: sigma
            .as_zero_based()
            .iter()
            .enumerate()
            .map(|(i, &v)| i == v as usize)
            .collect(),
    }
}

pub type PseudoBooleanFn = Arc<dyn Fn(&[bool]) -> i64 + Send + Sync>;

/// How the optimum of a lifted benchmark is recognised. The lift itself
/// cannot decide this: several indicator strings may maximise `f`, and
/// strings with exactly `n − 1` ones are not indicator strings at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OptimumRule {
    /// Only the identity is optimal.
    Identity,
    /// Every `σ` with `f(x(σ)) >= target` is optimal.
    FitnessAtLeast(i64),
}

#[derive(Clone)]
pub struct LiftedFunction {
    pub name: String,
    f: PseudoBooleanFn,
    optimum: Option<OptimumRule>,
}

impl LiftedFunction {
    pub fn optimum(&self) -> Option<OptimumRule> {
        self.optimum
    }

    pub fn eval_bits(&self, bits: &[bool]) -> i64 {
        (self.f)(bits)
    }
}

impl fmt::Debug for LiftedFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LiftedFunction")
            .field("name", &self.name)
            .field("optimum", &self.optimum)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum BenchmarkKind {
    /// Number of fixed points (lifted OneMax).
    PHam,
    /// Length of the longest prefix of fixed points (lifted LeadingOnes).
    PLeadingOnes,
    /// Lifted Jump with gap `m`, `3 <= m <= n`.
    PJump { m: usize },
    Lifted(LiftedFunction),
}

#[derive(Debug, Clone)]
pub struct BenchmarkSpec {
    n: usize,
    kind: BenchmarkKind,
}

impl BenchmarkSpec {
    pub fn p_ham(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(Self {
            n,
            kind: BenchmarkKind::PHam,
        })
    }

    pub fn p_leading_ones(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(Self {
            n,
            kind: BenchmarkKind::PLeadingOnes,
        })
    }

    pub fn p_jump(n: usize, m: usize) -> Result<Self> {
        check_n(n)?;
        check_jump_parameter(n, m)?;
        Ok(Self {
            n,
            kind: BenchmarkKind::PJump { m },
        })
    }

    /// Parses `pham:n`, `pleadingones:n` or `pjump:n:m`.
    pub fn from_key(key: &str) -> Result<Self> {
        let parts: Vec<&str> = key.split(':').collect();
        let num = |s: &str| -> Result<usize> {
            s.parse()
                .map_err(|_| Error::Parse(format!("bad number {s:?} in benchmark key {key:?}")))
        };
        match parts.as_slice() {
            ["pham", n] => Self::p_ham(num(n)?),
            ["pleadingones", n] => Self::p_leading_ones(num(n)?),
            ["pjump", n, m] => Self::p_jump(num(n)?, num(m)?),
            _ => Err(Error::Parse(format!("unknown benchmark key {key:?}"))),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &BenchmarkKind {
        &self.kind
    }

    /// Gap parameter for the jump benchmark.
    pub fn jump_m(&self) -> Option<usize> {
        match self.kind {
            BenchmarkKind::PJump { m } => Some(m),
            _ => None,
        }
    }

    pub fn kind_name(&self) -> &str {
        match &self.kind {
            BenchmarkKind::PHam => "pham",
            BenchmarkKind::PLeadingOnes => "pleadingones",
            BenchmarkKind::PJump { .. } => "pjump",
            BenchmarkKind::Lifted(l) => &l.name,
        }
    }

    /// `kind:n[:m]`, e.g. `pjump:12:3`.
    pub fn key(&self) -> String {
        match self.kind {
            BenchmarkKind::PJump { m } => format!("pjump:{}:{m}", self.n),
            _ => format!("{}:{}", self.kind_name(), self.n),
        }
    }

    /// Declares how a lifted benchmark's optimum is recognised. No effect on
    /// the named benchmarks, whose optimum is always the identity.
    pub fn with_optimum(mut self, rule: OptimumRule) -> Self {
        if let BenchmarkKind::Lifted(l) = &mut self.kind {
            l.optimum = Some(rule);
        }
        self
    }

    pub fn evaluate(&self, sigma: &Permutation) -> Result<FitnessValue> {
        self.check_size(sigma)?;
        Ok(self.evaluate_word(sigma.as_zero_based()))
    }

    /// Evaluation on a 0-based word of the right length.
    pub fn evaluate_word(&self, word: &[u32]) -> FitnessValue {
        debug_assert_eq!(word.len(), self.n);
        let v = match &self.kind {
            BenchmarkKind::PHam => fixed_points(word) as i64,
            BenchmarkKind::PLeadingOnes => leading_fixed(word, 0) as i64,
            BenchmarkKind::PJump { m } => jump_from_fixed(self.n, *m, fixed_points(word)),
            BenchmarkKind::Lifted(l) => {
                let bits: Vec<bool> = word.iter().enumerate().map(|(i, &v)| i == v as usize).collect();
                l.eval_bits(&bits)
            }
        };
        FitnessValue(v)
    }

    pub fn is_global_optimum(&self, sigma: &Permutation) -> Result<bool> {
        self.check_size(sigma)?;
        self.is_optimum_word(sigma.as_zero_based())
    }

    pub(crate) fn is_optimum_word(&self, word: &[u32]) -> Result<bool> {
        let identity = || word.iter().enumerate().all(|(i, &v)| i == v as usize);
        match &self.kind {
            BenchmarkKind::Lifted(l) => match l.optimum {
                Some(OptimumRule::Identity) => Ok(identity()),
                Some(OptimumRule::FitnessAtLeast(t)) => Ok(self.evaluate_word(word).0 >= t),
                None => Err(invalid(format!(
                    "lifted benchmark {:?} has no declared optimum",
                    l.name
                ))),
            },
            _ => Ok(identity()),
        }
    }

    /// Fitness of the optimum when it is known without search.
    pub fn optimum_fitness(&self) -> Option<FitnessValue> {
        match &self.kind {
            BenchmarkKind::PHam | BenchmarkKind::PLeadingOnes => Some(FitnessValue(self.n as i64)),
            BenchmarkKind::PJump { m } => Some(FitnessValue((self.n + m) as i64)),
            BenchmarkKind::Lifted(l) => match l.optimum {
                Some(OptimumRule::Identity) => {
                    Some(FitnessValue(l.eval_bits(&vec![true; self.n])))
                }
                Some(OptimumRule::FitnessAtLeast(t)) => Some(FitnessValue(t)),
                None => None,
            },
        }
    }

    fn check_size(&self, sigma: &Permutation) -> Result<()> {
        if sigma.size() != self.n {
            return Err(Error::SizeMismatch {
                expected: self.n,
                actual: sigma.size(),
            });
        }
        Ok(())
    }
}

fn check_n(n: usize) -> Result<()> {
    if n < 1 {
        return Err(invalid("problem size must be at least 1"));
    }
    Ok(())
}

/// `m + g` if `g <= n − m` or `g = n`, else `n − g`.
#[inline]
pub(crate) fn jump_from_fixed(n: usize, m: usize, g: usize) -> i64 {
    if g + m <= n || g == n {
        (m + g) as i64
    } else {
        (n - g) as i64
    }
}

/// Length of the prefix of fixed points, scanning from `from` (all positions
/// before `from` are known to be fixed).
#[inline]
pub(crate) fn leading_fixed(word: &[u32], from: usize) -> usize {
    let mut i = from;
    while i < word.len() && word[i] as usize == i {
        i += 1;
    }
    i
}

/// `σ ↦ f(x(σ))`. The result has no declared optimum; attach one with
/// [`BenchmarkSpec::with_optimum`] before running the EA on it.
pub fn lift_pseudo_boolean(name: impl Into<String>, f: PseudoBooleanFn, n: usize) -> Result<BenchmarkSpec> {
    check_n(n)?;
    Ok(BenchmarkSpec {
        n,
        kind: BenchmarkKind::Lifted(LiftedFunction {
            name: name.into(),
            f,
            optimum: None,
        }),
    })
}

pub fn evaluate(spec: &BenchmarkSpec, sigma: &Permutation) -> Result<FitnessValue> {
    spec.evaluate(sigma)
}

pub fn is_global_optimum(spec: &BenchmarkSpec, sigma: &Permutation) -> Result<bool> {
    spec.is_global_optimum(sigma)
}

/// Classic pseudo-Boolean benchmarks, for lifting.
pub mod bitstring {
    pub fn one_max(x: &[bool]) -> i64 {
        x.iter().filter(|&&b| b).count() as i64
    }

    pub fn leading_ones(x: &[bool]) -> i64 {
        x.iter().take_while(|&&b| b).count() as i64
    }

    /// `Jump_{n,m}(x) = m + |x|` if `|x| <= n − m` or `|x| = n`, else `n − |x|`.
    pub fn jump(x: &[bool], m: usize) -> i64 {
        let n = x.len();
        super::jump_from_fixed(n, m, one_max(x) as usize)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BenchmarkRepr {
    kind: String,
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    m: Option<usize>,
}

impl Serialize for BenchmarkSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BenchmarkRepr {
            kind: self.kind_name().to_string(),
            n: self.n,
            m: self.jump_m(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BenchmarkSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = BenchmarkRepr::deserialize(d)?;
        let spec = match (r.kind.as_str(), r.m) {
            ("pham", None) => BenchmarkSpec::p_ham(r.n),
            ("pleadingones", None) => BenchmarkSpec::p_leading_ones(r.n),
            ("pjump", Some(m)) => BenchmarkSpec::p_jump(r.n, m),
            ("pjump", None) => Err(invalid("pjump requires m")),
            (k, Some(_)) if k != "pjump" => Err(invalid(format!("{k} takes no m"))),
            (k, _) => Err(invalid(format!("unknown benchmark kind {k:?}"))),
        };
        spec.map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    #[test]
    fn indicator_examples() {
        assert_eq!(indicator_string(&Permutation::identity(4)).to_string(), "1111");
        assert_eq!(indicator_string(&p("2,1,4,5,3")).to_string(), "00000");
        let x = indicator_string(&p("2,3,1,4"));
        assert_eq!(x.to_string(), "0001");
        assert_eq!(x.count_ones(), 1);
    }

    #[test]
    fn jump_examples() {
        let spec = BenchmarkSpec::p_jump(5, 3).unwrap();
        assert_eq!(spec.evaluate(&Permutation::identity(5)).unwrap(), FitnessValue(8));
        assert_eq!(spec.evaluate(&p("2,3,1,4,5")).unwrap(), FitnessValue(5));
        assert_eq!(spec.evaluate(&p("2,1,3,4,5")).unwrap(), FitnessValue(2));
        assert!(BenchmarkSpec::p_jump(5, 2).is_err());
        assert!(BenchmarkSpec::p_jump(5, 6).is_err());
    }

    #[test]
    fn leading_ones_example() {
        let spec = BenchmarkSpec::p_leading_ones(4).unwrap();
        assert_eq!(spec.evaluate(&p("1,2,4,3")).unwrap(), FitnessValue(2));
        assert_eq!(spec.evaluate(&Permutation::identity(4)).unwrap(), FitnessValue(4));
        assert!(matches!(
            spec.evaluate(&Permutation::identity(5)),
            Err(Error::SizeMismatch { expected: 4, actual: 5 })
        ));
    }

    #[test]
    fn optimum_checks() {
        let jump = BenchmarkSpec::p_jump(6, 4).unwrap();
        assert!(jump.is_global_optimum(&Permutation::identity(6)).unwrap());
        assert!(!jump.is_global_optimum(&p("2,1,4,3,5,6")).unwrap());
        let ham = BenchmarkSpec::p_ham(3).unwrap();
        assert!(!ham.is_global_optimum(&p("1,3,2")).unwrap());
    }

    #[test]
    fn lifted_requires_declared_optimum() {
        let f: PseudoBooleanFn = Arc::new(bitstring::one_max);
        let spec = lift_pseudo_boolean("onemax", f, 4).unwrap();
        assert!(spec.is_global_optimum(&Permutation::identity(4)).is_err());
        let spec = spec.with_optimum(OptimumRule::Identity);
        assert!(spec.is_global_optimum(&Permutation::identity(4)).unwrap());
        assert_eq!(spec.optimum_fitness(), Some(FitnessValue(4)));

        let constant: PseudoBooleanFn = Arc::new(|_| 7);
        let spec = lift_pseudo_boolean("const", constant, 3)
            .unwrap()
            .with_optimum(OptimumRule::FitnessAtLeast(7));
        for s in Permutation::all(3) {
            assert_eq!(spec.evaluate(&s).unwrap(), FitnessValue(7));
            assert!(spec.is_global_optimum(&s).unwrap());
        }
    }

    #[test]
    fn keys_round_trip() {
        for key in ["pham:12", "pleadingones:7", "pjump:12:3"] {
            assert_eq!(BenchmarkSpec::from_key(key).unwrap().key(), key);
        }
        assert!(BenchmarkSpec::from_key("pjump:12").is_err());
        assert!(BenchmarkSpec::from_key("tsp:12").is_err());
    }
}
