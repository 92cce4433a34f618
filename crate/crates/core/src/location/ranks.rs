use serde::{Deserialize, Serialize};

/// Midranks of a sample plus the sizes of its tie blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranking {
    pub ranks: Vec<f64>,
    /// Multiplicity of every tied block (only blocks of size >= 2).
    pub tie_groups: Vec<usize>,
}

impl Ranking {
    /// `sum(t^3 - t)` over the tie blocks.
    pub fn tie_sum(&self) -> f64 {
        self.tie_groups
            .iter()
            .map(|&t| {
                let t = t as f64;
                t * t * t - t
            })
            .sum()
    }
}

/// Ascending ranks, ties sharing the average of the positions they span.
pub fn rank_with_ties(values: &[f64]) -> Ranking {
    let n = values.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; n];
    let mut tie_groups = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && values[idx[j]] == values[idx[i]] {
            j += 1;
        }
        // positions i+1 ..= j
        let r = (i + 1 + j) as f64 / 2.0;
        for &k in &idx[i..j] {
            ranks[k] = r;
        }
        if j - i > 1 {
            tie_groups.push(j - i);
        }
        i = j;
    }
    Ranking { ranks, tie_groups }
}
