//! Set partitions, noncrossing partitions and star-pattern decorations.
//!
//! Elements are stored 0-based; text and JSON forms are 1-based.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{input, Error, Result};

/// Largest ground set accepted by [`all_partitions`].
pub const MAX_ALL: usize = 12;
/// Largest ground set accepted by [`noncrossing_partitions`].
pub const MAX_NONCROSSING: usize = 16;

/// A partition of `{0, .., k-1}` in canonical form: blocks ascending,
/// ordered by their least element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    k: usize,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Builds a partition from arbitrary blocks, canonicalizing order.
    pub fn new(k: usize, mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; k];
        for block in &mut blocks {
            if block.is_empty() {
                return Err(input("empty block"));
            }
            block.sort_unstable();
            for &e in block.iter() {
                if e >= k {
                    return Err(input(format!("element {} outside ground set of size {k}", e + 1)));
                }
                if std::mem::replace(&mut seen[e], true) {
                    return Err(input(format!("element {} appears twice", e + 1)));
                }
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(input(format!("element {} not covered", missing + 1)));
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(Partition { k, blocks })
    }

    /// Builds the partition whose block labels are given per element
    /// (a restricted growth string or any labelling).
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut first_seen: Vec<(usize, usize)> = Vec::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (pos, &lab) in labels.iter().enumerate() {
            match first_seen.iter().find(|(l, _)| *l == lab) {
                Some(&(_, b)) => blocks[b].push(pos),
                None => {
                    first_seen.push((lab, blocks.len()));
                    blocks.push(vec![pos]);
                }
            }
        }
        Partition { k: labels.len(), blocks }
    }

    pub fn one(k: usize) -> Self {
        let blocks = if k == 0 { vec![] } else { vec![(0..k).collect()] };
        Partition { k, blocks }
    }

    pub fn singletons(k: usize) -> Self {
        Partition { k, blocks: (0..k).map(|i| vec![i]).collect() }
    }

    pub fn size(&self) -> usize {
        self.k
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_one(&self) -> bool {
        self.blocks.len() <= 1
    }

    pub fn is_pairing(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 2)
    }

    /// Block label of every element.
    pub fn labels(&self) -> Vec<usize> {
        let mut out = vec![0; self.k];
        for (b, block) in self.blocks.iter().enumerate() {
            for &e in block {
                out[e] = b;
            }
        }
        out
    }

    pub fn is_noncrossing(&self) -> bool {
        let labels = self.labels();
        // A crossing a < b < c < d has a,c in one block and b,d in another.
        // Scan pairs of consecutive elements inside each block and look for
        // an element in between whose block also reaches outside the gap.
        for block in &self.blocks {
            for w in block.windows(2) {
                let (lo, hi) = (w[0], w[1]);
                for mid in lo + 1..hi {
                    let other = &self.blocks[labels[mid]];
                    if other.iter().any(|&e| e < lo || e > hi) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> Result<bool> {
        if self.k != coarser.k {
            return Err(input(format!(
                "partition sizes differ ({} vs {})",
                self.k, coarser.k
            )));
        }
        let labels = coarser.labels();
        Ok(self.blocks.iter().all(|b| b.iter().all(|&e| labels[e] == labels[b[0]])))
    }

    /// The symbols of `pattern` at the positions of block `index` (0-based).
    pub fn block_restriction(&self, pattern: &StarPattern, index: usize) -> Result<StarPattern> {
        if pattern.len() != self.k {
            return Err(input(format!(
                "pattern length {} does not match partition size {}",
                pattern.len(),
                self.k
            )));
        }
        let block = self
            .blocks
            .get(index)
            .ok_or_else(|| input(format!("block index {index} out of range")))?;
        Ok(StarPattern(block.iter().map(|&e| pattern.0[e]).collect()))
    }

    /// 1-based nested form, e.g. `[[1,3],[2]]`.
    pub fn to_one_based(&self) -> Vec<Vec<usize>> {
        self.blocks.iter().map(|b| b.iter().map(|e| e + 1).collect()).collect()
    }

    pub fn from_one_based(blocks: Vec<Vec<usize>>) -> Result<Self> {
        let k = blocks.iter().map(Vec::len).sum();
        let zero_based = blocks
            .into_iter()
            .map(|b| {
                b.into_iter()
                    .map(|e| e.checked_sub(1).ok_or_else(|| input("partition elements start at 1")))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Partition::new(k, zero_based)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, block) in self.blocks.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str("{")?;
            for (j, e) in block.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", e + 1)?;
            }
            f.write_str("}")?;
        }
        f.write_str("}")
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_one_based().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<Vec<usize>>::deserialize(d)?;
        Partition::from_one_based(raw).map_err(serde::de::Error::custom)
    }
}

/// The kernel of an index word: positions are equivalent when they carry
/// the same index.
pub fn kernel<T: PartialEq>(word: &[T]) -> Partition {
    let mut labels = Vec::with_capacity(word.len());
    for (pos, x) in word.iter().enumerate() {
        let first = word[..pos].iter().position(|y| y == x).unwrap_or(pos);
        labels.push(first);
    }
    Partition::from_labels(&labels)
}

fn guard(k: usize, limit: usize) -> Result<()> {
    if k > limit {
        Err(Error::SizeLimit { what: "partition size", value: k, limit })
    } else {
        Ok(())
    }
}

/// Every partition of a `k`-element set, in restricted-growth order.
pub fn all_partitions(k: usize) -> Result<Vec<Partition>> {
    guard(k, MAX_ALL)?;
    let mut out = Vec::new();
    let mut rgs = vec![0usize; k];
    grow(&mut rgs, 0, 0, false, &mut out);
    Ok(out)
}

/// Every noncrossing partition of a `k`-element set, in restricted-growth
/// order.
pub fn noncrossing_partitions(k: usize) -> Result<Vec<Partition>> {
    guard(k, MAX_NONCROSSING)?;
    let mut out = Vec::new();
    let mut rgs = vec![0usize; k];
    grow(&mut rgs, 0, 0, true, &mut out);
    Ok(out)
}

fn grow(rgs: &mut [usize], pos: usize, used: usize, nc: bool, out: &mut Vec<Partition>) {
    if pos == rgs.len() {
        out.push(Partition::from_labels(rgs));
        return;
    }
    for label in 0..=used {
        if nc && label < used && !may_join(rgs, pos, label) {
            continue;
        }
        rgs[pos] = label;
        grow(rgs, pos + 1, used.max(label + 1), nc, out);
    }
}

// Appending `pos` to block `label` keeps the prefix noncrossing iff every
// element after the block's current last member belongs to a block that
// opened after that member.
fn may_join(rgs: &[usize], pos: usize, label: usize) -> bool {
    let last = (0..pos).rev().find(|&i| rgs[i] == label).expect("label in use");
    (last + 1..pos).all(|mid| {
        let opened = (0..pos).find(|&i| rgs[i] == rgs[mid]).expect("label in use");
        opened > last
    })
}

/// `1` or `*` on a single letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Star {
    Plain,
    Adjoint,
}

impl Star {
    pub fn flip(self) -> Star {
        match self {
            Star::Plain => Star::Adjoint,
            Star::Adjoint => Star::Plain,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Star::Plain => '1',
            Star::Adjoint => '*',
        }
    }
}

/// A word over `{1, *}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StarPattern(pub Vec<Star>);

impl StarPattern {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn stars(&self) -> &[Star] {
        &self.0
    }

    pub fn plain(k: usize) -> Self {
        StarPattern(vec![Star::Plain; k])
    }

    /// All `2^k` patterns of length `k`, `1` before `*` lexicographically.
    pub fn all(k: usize) -> Vec<StarPattern> {
        (0..1usize << k)
            .map(|bits| {
                StarPattern(
                    (0..k)
                        .map(|i| if bits >> (k - 1 - i) & 1 == 1 { Star::Adjoint } else { Star::Plain })
                        .collect(),
                )
            })
            .collect()
    }

    pub fn count_plain(&self) -> usize {
        self.0.iter().filter(|s| **s == Star::Plain).count()
    }

    pub fn count_adjoint(&self) -> usize {
        self.0.len() - self.count_plain()
    }

    /// `#* - #1`.
    pub fn imbalance(&self) -> i64 {
        self.count_adjoint() as i64 - self.count_plain() as i64
    }

    pub fn is_alternating(&self) -> bool {
        self.0.windows(2).all(|w| w[0] != w[1])
    }

    /// The pattern of the adjoint word: reversed, each symbol flipped.
    pub fn adjoint(&self) -> StarPattern {
        StarPattern(self.0.iter().rev().map(|s| s.flip()).collect())
    }

    /// Cyclic rotation by one: `(d2, .., dk, d1)`.
    pub fn rotate(&self) -> StarPattern {
        let mut v = self.0.clone();
        if !v.is_empty() {
            v.rotate_left(1);
        }
        StarPattern(v)
    }
}

impl fmt::Display for StarPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{}", s.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for StarPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '1' => Ok(Star::Plain),
                '*' => Ok(Star::Adjoint),
                other => Err(input(format!("pattern symbol {other:?} is not '1' or '*'"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(StarPattern)
    }
}

impl Serialize for StarPattern {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for StarPattern {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}

/// Block-wise conditions on a decorated partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Decoration {
    /// `#* - #1` divisible by `m`.
    Divisible(u32),
    /// `#* = #1`.
    Balanced,
    /// Strictly alternating with `#* = #1`.
    Alternating,
    /// Exactly one `1` and one `*`.
    AlternatingPair,
}

impl Decoration {
    pub fn divisible(m: u32) -> Result<Self> {
        if m == 0 {
            Err(input("divisibility modulus must be at least 1"))
        } else {
            Ok(Decoration::Divisible(m))
        }
    }

    pub fn accepts(self, restricted: &StarPattern) -> bool {
        match self {
            Decoration::Divisible(m) => restricted.imbalance().rem_euclid(m as i64) == 0,
            Decoration::Balanced => restricted.imbalance() == 0,
            Decoration::Alternating => restricted.imbalance() == 0 && restricted.is_alternating(),
            Decoration::AlternatingPair => {
                restricted.len() == 2 && restricted.0[0] != restricted.0[1]
            }
        }
    }
}

impl FromStr for Decoration {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        match lower.as_str() {
            "inf" | "balanced" | "inf_divisible" => Ok(Decoration::Balanced),
            "alternating" | "alt" => Ok(Decoration::Alternating),
            "pair" | "alternating_pair" => Ok(Decoration::AlternatingPair),
            _ => {
                let m = lower
                    .strip_prefix("m:")
                    .or_else(|| lower.strip_prefix("divisible:"))
                    .ok_or_else(|| input(format!("unknown decoration class {s:?}")))?;
                let m: u32 = m.parse().map_err(|_| input(format!("bad modulus in {s:?}")))?;
                Decoration::divisible(m)
            }
        }
    }
}

/// Keeps the partitions whose every block restriction satisfies `class`.
pub fn filter_decorated(
    parts: &[Partition],
    pattern: &StarPattern,
    class: Decoration,
) -> Result<Vec<Partition>> {
    let mut kept = Vec::new();
    for p in parts {
        if p.size() != pattern.len() {
            return Err(input(format!(
                "partition size {} does not match pattern length {}",
                p.size(),
                pattern.len()
            )));
        }
        let ok = (0..p.num_blocks()).all(|b| {
            p.block_restriction(pattern, b).map(|r| class.accepts(&r)).unwrap_or(false)
        });
        if ok {
            kept.push(p.clone());
        }
    }
    Ok(kept)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(blocks: &[&[usize]]) -> Partition {
        Partition::from_one_based(blocks.iter().map(|b| b.to_vec()).collect()).unwrap()
    }

    #[test]
    fn small_counts() {
        assert_eq!(all_partitions(1).unwrap(), vec![part(&[&[1]])]);
        assert_eq!(all_partitions(3).unwrap().len(), 5);
        assert_eq!(all_partitions(4).unwrap().len(), 15);
        assert_eq!(noncrossing_partitions(0).unwrap(), vec![Partition::one(0)]);
        assert_eq!(noncrossing_partitions(6).unwrap().len(), 132);
    }

    #[test]
    fn nc4_misses_only_the_crossing_pairing() {
        let nc = noncrossing_partitions(4).unwrap();
        assert_eq!(nc.len(), 14);
        let all = all_partitions(4).unwrap();
        let missing: Vec<_> = all.iter().filter(|p| !nc.contains(p)).collect();
        assert_eq!(missing, vec![&part(&[&[1, 3], &[2, 4]])]);
    }

    #[test]
    fn guards() {
        assert!(matches!(all_partitions(13), Err(Error::SizeLimit { .. })));
        assert!(matches!(noncrossing_partitions(17), Err(Error::SizeLimit { .. })));
    }

    #[test]
    fn crossing_detection() {
        assert!(!part(&[&[1, 3], &[2, 4]]).is_noncrossing());
        assert!(part(&[&[1, 4], &[2, 3]]).is_noncrossing());
        assert!(Partition::singletons(5).is_noncrossing());
        assert!(!part(&[&[1, 5], &[2, 6], &[3, 4]]).is_noncrossing());
    }

    #[test]
    fn kernels() {
        assert_eq!(kernel(&[1, 2, 1]), part(&[&[1, 3], &[2]]));
        assert_eq!(kernel(&[5, 5, 5]), part(&[&[1, 2, 3]]));
        assert_eq!(kernel(&[1, 2, 3]), Partition::singletons(3));
    }

    #[test]
    fn refinement() {
        let q = part(&[&[1, 2, 3]]);
        assert!(Partition::singletons(3).refines(&q).unwrap());
        assert!(part(&[&[1, 2], &[3]]).refines(&q).unwrap());
        assert!(!part(&[&[1, 3], &[2]]).refines(&part(&[&[1, 2], &[3]])).unwrap());
        assert!(Partition::singletons(2).refines(&q).is_err());
    }

    #[test]
    fn restrictions() {
        let p: StarPattern = "1*1".parse().unwrap();
        assert_eq!(part(&[&[1, 3], &[2]]).block_restriction(&p, 0).unwrap().to_string(), "11");
        let d: StarPattern = "1*1*".parse().unwrap();
        assert_eq!(part(&[&[1, 2, 3, 4]]).block_restriction(&d, 0).unwrap(), d);
        assert_eq!(part(&[&[1, 4], &[2, 3]]).block_restriction(&d, 1).unwrap().to_string(), "*1");
        assert!(part(&[&[1, 4], &[2, 3]]).block_restriction(&d, 2).is_err());
    }

    #[test]
    fn decorations() {
        let pat = |s: &str| s.parse::<StarPattern>().unwrap();
        assert!(Decoration::AlternatingPair.accepts(&pat("1*")));
        assert!(!Decoration::AlternatingPair.accepts(&pat("11")));
        assert!(Decoration::Balanced.accepts(&pat("11**")));
        assert!(!Decoration::Alternating.accepts(&pat("11**")));
        assert!(Decoration::Alternating.accepts(&pat("")));
        assert!(!Decoration::Alternating.accepts(&pat("1")));
        assert!(Decoration::Divisible(3).accepts(&pat("111")));
        assert!(Decoration::divisible(0).is_err());
        assert_eq!("m:4".parse::<Decoration>().unwrap(), Decoration::Divisible(4));
    }

    #[test]
    fn decorated_filters() {
        let nc4 = noncrossing_partitions(4).unwrap();
        let d: StarPattern = "1*1*".parse().unwrap();
        let alt = filter_decorated(&nc4, &d, Decoration::Alternating).unwrap();
        assert_eq!(
            alt,
            vec![part(&[&[1, 2, 3, 4]]), part(&[&[1, 2], &[3, 4]]), part(&[&[1, 4], &[2, 3]])]
        );
        let pairs = filter_decorated(&nc4, &d, Decoration::AlternatingPair).unwrap();
        assert_eq!(pairs.len(), 2);
        let nc2 = noncrossing_partitions(2).unwrap();
        assert!(filter_decorated(&nc2, &"11".parse().unwrap(), Decoration::AlternatingPair)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn serde_forms() {
        let p = part(&[&[1, 3], &[2]]);
        assert_eq!(serde_json::to_string(&p).unwrap(), "[[1,3],[2]]");
        assert_eq!(serde_json::from_str::<Partition>("[[2],[1,3]]").unwrap(), p);
        assert_eq!(p.to_string(), "{{1,3},{2}}");
        assert!(serde_json::from_str::<Partition>("[[1,1]]").is_err());
        let d: StarPattern = serde_json::from_str("\"1*1*\"").unwrap();
        assert_eq!(serde_json::to_string(&d).unwrap(), "\"1*1*\"");
        assert!("1x".parse::<StarPattern>().is_err());
    }
}
