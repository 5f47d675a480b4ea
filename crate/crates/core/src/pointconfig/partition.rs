use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub const MAX_PARTITION_SIZE: usize = 10;

/// Partition of `{0..n-1}` into nonempty blocks, each sorted, blocks ordered by
/// their least element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    pub fn new(mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        let n: usize = blocks.iter().map(Vec::len).sum();
        let mut seen = vec![false; n];
        for block in &mut blocks {
            if block.is_empty() {
                return Err(invalid("partition blocks must be nonempty"));
            }
            block.sort_unstable();
            for &i in block.iter() {
                if i >= n || seen[i] {
                    return Err(invalid(format!("blocks do not partition 0..{n}")));
                }
                seen[i] = true;
            }
        }
        blocks.sort_by_key(|b| b[0]);
        Ok(Self { n, blocks })
    }

    fn from_growth(rgs: &[usize]) -> Self {
        let count = rgs.iter().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); count];
        for (i, &b) in rgs.iter().enumerate() {
            blocks[b].push(i);
        }
        Self { n: rgs.len(), blocks }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// For each element, the index of its block.
    pub fn block_of_each(&self) -> Vec<usize> {
        let mut slot = vec![0; self.n];
        for (b, block) in self.blocks.iter().enumerate() {
            for &i in block {
                slot[i] = b;
            }
        }
        slot
    }

    /// `prod_A (|A| - 1)!`
    pub fn block_factorial_weight(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| (1..b.len()).map(|k| k as f64).product::<f64>())
            .product()
    }
}

/// All partitions of `{0..n-1}`, in lexicographic order of restricted growth strings.
pub fn set_partitions(n: usize) -> Result<Vec<SetPartition>> {
    if !(1..=MAX_PARTITION_SIZE).contains(&n) {
        return Err(invalid(format!(
            "set partitions are enumerated for 1 <= n <= {MAX_PARTITION_SIZE}, got {n}"
        )));
    }
    let mut out = Vec::new();
    let mut rgs = vec![0usize; n];
    grow(&mut rgs, 1, 0, &mut out);
    Ok(out)
}

fn grow(rgs: &mut [usize], i: usize, max: usize, out: &mut Vec<SetPartition>) {
    if i == rgs.len() {
        out.push(SetPartition::from_growth(rgs));
        return;
    }
    for b in 0..=max + 1 {
        rgs[i] = b;
        grow(rgs, i + 1, max.max(b), out);
    }
}
