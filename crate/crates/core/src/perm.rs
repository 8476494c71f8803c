//! Permutations of `[1..n]` in word notation, transpositions, and the cycle
//! structure queries the runtime analysis is phrased in.
//!
//! Labels are 1-based on every public surface (constructors, accessors,
//! `Display`/`FromStr`). The word is stored 0-based; hot loops in the engine
//! and oracles work on [`Permutation::as_zero_based`] directly.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A bijection of `[1..n]`, stored as the word `(σ(1), …, σ(n))`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        assert!(n >= 1, "permutation size must be at least 1");
        Self {
            images: (0..n as u32).collect(),
        }
    }

    /// Builds a permutation from 1-based word notation.
    pub fn from_one_based(word: &[usize]) -> Result<Self> {
        let n = word.len();
        if n == 0 {
            return Err(invalid("permutation size must be at least 1"));
        }
        let mut seen = vec![false; n];
        let mut images = Vec::with_capacity(n);
        for &label in word {
            if label == 0 || label > n {
                return Err(Error::LabelOutOfRange { label, n });
            }
            if std::mem::replace(&mut seen[label - 1], true) {
                return Err(Error::DuplicateLabel(label));
            }
            images.push((label - 1) as u32);
        }
        Ok(Self { images })
    }

    /// Builds a permutation from a 0-based word, validating bijectivity.
    pub fn from_zero_based(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        if n == 0 {
            return Err(invalid("permutation size must be at least 1"));
        }
        let mut seen = vec![false; n];
        for &v in &images {
            let v = v as usize;
            if v >= n {
                return Err(Error::LabelOutOfRange { label: v + 1, n });
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::DuplicateLabel(v + 1));
            }
        }
        Ok(Self { images })
    }

    /// Caller guarantees `images` is a bijection of `0..len`.
    pub(crate) fn from_zero_based_unchecked(images: Vec<u32>) -> Self {
        debug_assert!(Self::from_zero_based(images.clone()).is_ok());
        Self { images }
    }

    pub fn size(&self) -> usize {
        self.images.len()
    }

    /// `σ(label)` for a 1-based label.
    pub fn image(&self, label: usize) -> usize {
        self.images[label - 1] as usize + 1
    }

    pub fn as_zero_based(&self) -> &[u32] {
        &self.images
    }

    pub fn into_zero_based(self) -> Vec<u32> {
        self.images
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.images.iter().map(|&v| v as usize + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i == v as usize)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u32; self.size()];
        for (i, &v) in self.images.iter().enumerate() {
            inv[v as usize] = i as u32;
        }
        Self { images: inv }
    }

    /// `self ∘ inner`, i.e. `i ↦ self(inner(i))`.
    pub fn after(&self, inner: &Permutation) -> Result<Self> {
        compose(self, inner)
    }

    /// `t ∘ self`: swaps the two word entries holding the labels of `t`.
    pub fn apply_transposition(&self, t: Transposition) -> Result<Self> {
        apply_transposition(self, t)
    }

    /// Number of labels with `σ(i) = i`.
    pub fn fixed_point_count(&self) -> usize {
        fixed_points(&self.images)
    }

    /// Number of cycles, fixed points counted as 1-cycles.
    pub fn total_cycle_count(&self) -> usize {
        let mut seen = Vec::new();
        cycle_count(&self.images, &mut seen)
    }

    /// `n − total_cycle_count`: the length of a shortest product of
    /// transpositions equal to `σ`.
    pub fn min_transpositions_to_identity(&self) -> usize {
        self.size() - self.total_cycle_count()
    }

    pub fn cycle_decomposition(&self) -> CycleDecomposition {
        let n = self.size();
        let mut seen = vec![false; n];
        let mut cycles = Vec::new();
        let mut fixed_points = Vec::new();
        // Scanning labels in increasing order means every orbit is first met
        // at its minimum, so cycles come out canonical without re-sorting.
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut cur = start;
            while !seen[cur] {
                seen[cur] = true;
                cycle.push(cur + 1);
                cur = self.images[cur] as usize;
            }
            if cycle.len() == 1 {
                fixed_points.push(start + 1);
            } else {
                cycles.push(cycle);
            }
        }
        CycleDecomposition {
            n,
            cycles,
            fixed_points,
        }
    }

    /// Lengths of the cycles of length at least 2, in decreasing order.
    pub fn nontrivial_cycle_lengths(&self) -> Vec<usize> {
        let mut lens: Vec<usize> = self
            .cycle_decomposition()
            .cycles
            .iter()
            .map(Vec::len)
            .collect();
        lens.sort_unstable_by(|a, b| b.cmp(a));
        lens
    }

    /// Position of this permutation in the lexicographic order of `S_n`.
    pub fn lex_rank(&self) -> usize {
        let n = self.size();
        let mut used = vec![false; n];
        let mut rank = 0usize;
        for (i, &v) in self.images.iter().enumerate() {
            let v = v as usize;
            let smaller_unused = (0..v).filter(|&u| !used[u]).count();
            rank = rank * (n - i) + smaller_unused;
            used[v] = true;
        }
        rank
    }

    /// Inverse of [`Permutation::lex_rank`].
    pub fn from_lex_rank(n: usize, mut rank: usize) -> Result<Self> {
        if n == 0 || n > 20 {
            return Err(invalid(format!("lexicographic ranking supports 1 <= n <= 20, got {n}")));
        }
        let total = factorial(n);
        if rank >= total {
            return Err(invalid(format!("rank {rank} out of range for S_{n}")));
        }
        let mut digits = vec![0usize; n];
        for (i, d) in digits.iter_mut().enumerate().rev() {
            let base = n - i;
            *d = rank % base;
            rank /= base;
        }
        let mut pool: Vec<u32> = (0..n as u32).collect();
        let images = digits.into_iter().map(|d| pool.remove(d)).collect();
        Ok(Self { images })
    }

    /// All of `S_n` in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = Permutation> {
        let mut next = Some(Permutation::identity(n));
        std::iter::from_fn(move || {
            let cur = next.take()?;
            let mut w = cur.images.clone();
            if next_lexicographic(&mut w) {
                next = Some(Permutation { images: w });
            }
            Some(cur)
        })
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({self})")
    }
}

/// Comma-separated 1-based word notation, e.g. `2,1,4,5,3`.
impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &v) in self.images.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", v + 1)?;
        }
        Ok(())
    }
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let word = s
            .split(',')
            .map(|tok| {
                let tok = tok.trim();
                tok.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("not a label: {tok:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_one_based(&word)
    }
}

impl Serialize for Permutation {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// An unordered pair of distinct 1-based labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transposition {
    a: usize,
    b: usize,
}

impl Transposition {
    pub fn new(a: usize, b: usize) -> Result<Self> {
        if a == 0 || b == 0 {
            return Err(invalid("transposition labels are 1-based"));
        }
        if a == b {
            return Err(invalid(format!("transposition needs distinct labels, got ({a} {b})")));
        }
        Ok(Self {
            a: a.min(b),
            b: a.max(b),
        })
    }

    /// The smaller label.
    pub fn a(&self) -> usize {
        self.a
    }

    /// The larger label.
    pub fn b(&self) -> usize {
        self.b
    }

    pub fn to_permutation(&self, n: usize) -> Result<Permutation> {
        if self.b > n {
            return Err(Error::LabelOutOfRange { label: self.b, n });
        }
        let mut images: Vec<u32> = (0..n as u32).collect();
        images.swap(self.a - 1, self.b - 1);
        Ok(Permutation { images })
    }

    /// Every transposition of `[1..n]`, lexicographically.
    pub fn all(n: usize) -> impl Iterator<Item = Transposition> {
        (1..=n).flat_map(move |a| ((a + 1)..=n).map(move |b| Transposition { a, b }))
    }
}

impl fmt::Display for Transposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {})", self.a, self.b)
    }
}

/// Disjoint cycles of length at least 2 plus the fixed points.
///
/// Canonical form: each cycle starts at its minimum label and cycles are
/// sorted by that minimum; fixed points are sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CycleDecomposition {
    pub n: usize,
    pub cycles: Vec<Vec<usize>>,
    pub fixed_points: Vec<usize>,
}

impl CycleDecomposition {
    /// Cycles counting fixed points as 1-cycles.
    pub fn total_cycle_count(&self) -> usize {
        self.cycles.len() + self.fixed_points.len()
    }

    /// Cycles of length at least 2.
    pub fn long_cycle_count(&self) -> usize {
        self.cycles.len()
    }

    /// Number of labels that are not fixed.
    pub fn deranged_count(&self) -> usize {
        self.n - self.fixed_points.len()
    }

    /// Reassembles the permutation. Errors if the cycles and fixed points do
    /// not partition `[1..n]`.
    pub fn rebuild(&self) -> Result<Permutation> {
        let n = self.n;
        let mut images = vec![u32::MAX; n];
        let mut claim = |label: usize, image: usize| -> Result<()> {
            if label == 0 || label > n {
                return Err(Error::LabelOutOfRange { label, n });
            }
            if images[label - 1] != u32::MAX {
                return Err(Error::DuplicateLabel(label));
            }
            images[label - 1] = (image - 1) as u32;
            Ok(())
        };
        for cycle in &self.cycles {
            if cycle.len() < 2 {
                return Err(invalid("cycles must have length at least 2"));
            }
            for (i, &label) in cycle.iter().enumerate() {
                claim(label, cycle[(i + 1) % cycle.len()])?;
            }
        }
        for &p in &self.fixed_points {
            claim(p, p)?;
        }
        if let Some(missing) = images.iter().position(|&v| v == u32::MAX) {
            return Err(invalid(format!("label {} not covered", missing + 1)));
        }
        Permutation::from_zero_based(images)
    }
}

impl fmt::Display for CycleDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.cycles.is_empty() {
            return f.write_str("()");
        }
        for c in &self.cycles {
            f.write_str("(")?;
            for (i, l) in c.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{l}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// Regions of `S_n` induced by the jump benchmark with gap `m`.
///
/// `A2Interior ∪ A2Plus` is the set of permutations with at most `n − m`
/// fixed points; `A2Plus` are the local optima (exactly `n − m`), `A3` is the
/// identity and `A1` is everything else (the fitness valley).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RegionLabel {
    A1,
    A2Interior,
    A2Plus,
    A3,
}

impl RegionLabel {
    pub const ALL: [RegionLabel; 4] = [
        RegionLabel::A1,
        RegionLabel::A2Interior,
        RegionLabel::A2Plus,
        RegionLabel::A3,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            RegionLabel::A1 => "A1",
            RegionLabel::A2Interior => "A2Interior",
            RegionLabel::A2Plus => "A2Plus",
            RegionLabel::A3 => "A3",
        }
    }

    /// Region from the fixed-point count alone.
    pub fn from_fixed_points(fixed: usize, n: usize, m: usize) -> Self {
        if fixed == n {
            RegionLabel::A3
        } else if fixed == n - m {
            RegionLabel::A2Plus
        } else if fixed < n - m {
            RegionLabel::A2Interior
        } else {
            RegionLabel::A1
        }
    }
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub(crate) fn check_jump_parameter(n: usize, m: usize) -> Result<()> {
    if m < 3 || m > n {
        return Err(invalid(format!("jump parameter m must satisfy 3 <= m <= n, got m={m}, n={n}")));
    }
    Ok(())
}

/// `outer ∘ inner`.
pub fn compose(outer: &Permutation, inner: &Permutation) -> Result<Permutation> {
    if outer.size() != inner.size() {
        return Err(Error::SizeMismatch {
            expected: outer.size(),
            actual: inner.size(),
        });
    }
    let images = inner
        .images
        .iter()
        .map(|&i| outer.images[i as usize])
        .collect();
    Ok(Permutation { images })
}

/// `t ∘ σ`, computed by swapping the positions of `t`'s labels in the word.
pub fn apply_transposition(sigma: &Permutation, t: Transposition) -> Result<Permutation> {
    let n = sigma.size();
    if t.b > n {
        return Err(Error::LabelOutOfRange { label: t.b, n });
    }
    let (a, b) = ((t.a - 1) as u32, (t.b - 1) as u32);
    let mut images = sigma.images.clone();
    let pa = images.iter().position(|&v| v == a).expect("bijection");
    let pb = images.iter().position(|&v| v == b).expect("bijection");
    images.swap(pa, pb);
    Ok(Permutation { images })
}

pub fn cycle_decomposition(sigma: &Permutation) -> CycleDecomposition {
    sigma.cycle_decomposition()
}

pub fn fixed_point_count(sigma: &Permutation) -> usize {
    sigma.fixed_point_count()
}

pub fn min_transpositions_to_identity(sigma: &Permutation) -> usize {
    sigma.min_transpositions_to_identity()
}

pub fn classify_region(sigma: &Permutation, m: usize) -> Result<RegionLabel> {
    let n = sigma.size();
    check_jump_parameter(n, m)?;
    Ok(RegionLabel::from_fixed_points(sigma.fixed_point_count(), n, m))
}

/// Whether `σ` is a local optimum of the jump benchmark whose displaced
/// labels form as many cycles as possible: `m/2` transpositions for even
/// `m`, or `(m−3)/2` transpositions and one 3-cycle for odd `m`.
pub fn is_good_local_optimum(sigma: &Permutation, m: usize) -> Result<bool> {
    if classify_region(sigma, m)? != RegionLabel::A2Plus {
        return Ok(false);
    }
    Ok(is_good_cycle_type(&sigma.nontrivial_cycle_lengths(), m))
}

/// `lengths` must be sorted in decreasing order and sum to `m`.
pub(crate) fn is_good_cycle_type(lengths: &[usize], m: usize) -> bool {
    if m % 2 == 0 {
        lengths.iter().all(|&l| l == 2)
    } else {
        lengths.first() == Some(&3) && lengths[1..].iter().all(|&l| l == 2)
    }
}

pub(crate) fn fixed_points(word: &[u32]) -> usize {
    word.iter()
        .enumerate()
        .filter(|&(i, &v)| i == v as usize)
        .count()
}

/// Cycle count of a 0-based word; `seen` is scratch space.
pub(crate) fn cycle_count(word: &[u32], seen: &mut Vec<bool>) -> usize {
    seen.clear();
    seen.resize(word.len(), false);
    let mut cycles = 0;
    for start in 0..word.len() {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut cur = start;
        while !seen[cur] {
            seen[cur] = true;
            cur = word[cur] as usize;
        }
    }
    cycles
}

pub(crate) fn factorial(n: usize) -> usize {
    (1..=n).product()
}

fn next_lexicographic(w: &mut [u32]) -> bool {
    let n = w.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && w[i - 1] >= w[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while w[j] <= w[i - 1] {
        j -= 1;
    }
    w.swap(i - 1, j);
    w[i..].reverse();
    true
}
