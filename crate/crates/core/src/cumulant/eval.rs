//! Partitioned evaluation of cumulant functionals.

use std::sync::OnceLock;

use super::table::{check_coeffs, CumulantSource};
use super::word::Letter;
use crate::algebra::Elem;
use crate::error::{input, Error, Result};
use crate::partition::{all_partitions, noncrossing_partitions, Partition, MAX_ALL, MAX_NONCROSSING};

/// Which interval block the nested evaluation removes first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FoldOrder {
    #[default]
    Leftmost,
    Rightmost,
}

#[derive(Debug, Clone)]
struct Step {
    positions: Vec<usize>,
    start: usize,
}

/// Removal schedule of interval blocks for one noncrossing partition.
///
/// Each step names the block's original positions and where its letters
/// start in the shrinking list of remaining letters.
#[derive(Debug, Clone)]
pub(crate) struct FoldPlan {
    steps: Vec<Step>,
}

impl FoldPlan {
    pub fn new(p: &Partition, order: FoldOrder) -> Result<Self> {
        let labels = p.labels();
        let mut remaining: Vec<usize> = (0..p.size()).collect();
        let mut steps = Vec::with_capacity(p.num_blocks());
        while !remaining.is_empty() {
            let fits = |i: usize| {
                let label = labels[remaining[i]];
                let s = p.blocks()[label].len();
                i + s <= remaining.len() && remaining[i..i + s].iter().all(|&e| labels[e] == label)
            };
            let start = match order {
                FoldOrder::Leftmost => (0..remaining.len()).find(|&i| fits(i)),
                FoldOrder::Rightmost => (0..remaining.len()).rev().find(|&i| fits(i)),
            }
            .ok_or_else(|| Error::Domain(format!("partition {p} is crossing")))?;
            let block = p.blocks()[labels[remaining[start]]].clone();
            remaining.drain(start..start + block.len());
            steps.push(Step { positions: block, start });
        }
        Ok(FoldPlan { steps })
    }

    /// Folds every block into its left coefficient; the survivor is the
    /// value.
    pub fn eval<S: CumulantSource + ?Sized>(
        &self,
        src: &S,
        word: &[Letter],
        coeffs: &[Elem],
    ) -> Result<Elem> {
        let p = src.side();
        let mut c = [Elem::zero(p); MAX_NONCROSSING + 1];
        let mut len = coeffs.len();
        c[..len].copy_from_slice(coeffs);
        let mut letters = [Letter::default(); MAX_NONCROSSING];
        for step in &self.steps {
            let s = step.positions.len();
            for (slot, &pos) in letters.iter_mut().zip(&step.positions) {
                *slot = word[pos];
            }
            let Some(t) = src.tensor(&letters[..s])? else {
                return Ok(Elem::zero(p));
            };
            let i = step.start;
            c[i] = c[i] * t.apply(&c[i + 1..i + s]) * c[i + s];
            c.copy_within(i + s + 1..len, i + 1);
            len -= s;
        }
        Ok(c[0])
    }
}

static NC_PLANS: [OnceLock<Vec<(Partition, FoldPlan)>>; MAX_NONCROSSING + 1] =
    [const { OnceLock::new() }; MAX_NONCROSSING + 1];
static ALL_PARTS: [OnceLock<Vec<Partition>>; MAX_ALL + 1] = [const { OnceLock::new() }; MAX_ALL + 1];

/// Cached noncrossing partitions of size `k` with their fold plans.
pub(crate) fn nc_plans(k: usize) -> Result<&'static [(Partition, FoldPlan)]> {
    let cell = NC_PLANS
        .get(k)
        .ok_or(Error::SizeLimit { what: "partition size", value: k, limit: MAX_NONCROSSING })?;
    Ok(cell.get_or_init(|| {
        noncrossing_partitions(k)
            .expect("size checked")
            .into_iter()
            .map(|p| {
                let plan = FoldPlan::new(&p, FoldOrder::Leftmost).expect("noncrossing");
                (p, plan)
            })
            .collect()
    }))
}

/// Cached set partitions of size `k`.
pub(crate) fn all_parts(k: usize) -> Result<&'static [Partition]> {
    let cell =
        ALL_PARTS.get(k).ok_or(Error::SizeLimit { what: "partition size", value: k, limit: MAX_ALL })?;
    Ok(cell.get_or_init(|| all_partitions(k).expect("size checked")))
}

fn check_shape(p: &Partition, word: &[Letter], coeffs: &[Elem], side: usize) -> Result<()> {
    if p.size() != word.len() {
        return Err(input(format!(
            "partition of size {} applied to {} arguments",
            p.size(),
            word.len()
        )));
    }
    check_coeffs(word, coeffs, side)
}

/// Nested free evaluation `κ^{(π)}[b0 x b1 x ⋯ x bk]`, removing the
/// leftmost interval block first.
pub fn eval_partitioned_free<S: CumulantSource + ?Sized>(
    src: &S,
    p: &Partition,
    word: &[Letter],
    coeffs: &[Elem],
) -> Result<Elem> {
    eval_partitioned_free_with(src, p, word, coeffs, FoldOrder::Leftmost)
}

pub fn eval_partitioned_free_with<S: CumulantSource + ?Sized>(
    src: &S,
    p: &Partition,
    word: &[Letter],
    coeffs: &[Elem],
    order: FoldOrder,
) -> Result<Elem> {
    check_shape(p, word, coeffs, src.side())?;
    FoldPlan::new(p, order)?.eval(src, word, coeffs)
}

/// Product-of-blocks evaluation: `b0 · Π_V κ_V(b_{i1}, .., b_{i_{s-1}}) b_{i_s}`
/// with blocks taken by increasing least element. For scalars this is the
/// usual multiplicative extension.
pub fn eval_partitioned_classical<S: CumulantSource + ?Sized>(
    src: &S,
    p: &Partition,
    word: &[Letter],
    coeffs: &[Elem],
) -> Result<Elem> {
    check_shape(p, word, coeffs, src.side())?;
    product_of_blocks(src, p, word, coeffs)
}

pub(crate) fn product_of_blocks<S: CumulantSource + ?Sized>(
    src: &S,
    p: &Partition,
    word: &[Letter],
    coeffs: &[Elem],
) -> Result<Elem> {
    let side = src.side();
    let mut acc = coeffs[0];
    let mut letters = [Letter::default(); MAX_ALL];
    let mut inner = [Elem::zero(side); MAX_ALL];
    for block in p.blocks() {
        let s = block.len();
        for (j, &pos) in block.iter().enumerate() {
            letters[j] = word[pos];
            inner[j] = coeffs[pos + 1];
        }
        let Some(t) = src.tensor(&letters[..s])? else {
            return Ok(Elem::zero(side));
        };
        acc = acc * t.apply(&inner[..s - 1]) * inner[s - 1];
    }
    Ok(acc)
}
