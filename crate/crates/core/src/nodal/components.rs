use serde::{Deserialize, Serialize};

use super::field::ScalarField2D;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Connectivity {
    /// Edge neighbours only, for both signs.
    Four,
    /// Positive samples also join diagonally; negative ones use edges only.
    EightMixed,
}

/// Connected sign regions of a sampled field.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SignComponents {
    pub components: usize,
    pub positive: usize,
    pub negative: usize,
    /// Sample count of each component, in label order.
    pub cell_counts: Vec<usize>,
    /// Component label per sample (`None` for zero-band or inactive samples).
    #[serde(skip)]
    pub labels: Vec<Option<u32>>,
}

/// Flood-fill the strictly positive and strictly negative active samples.
pub fn count_sign_components(field: &ScalarField2D, connectivity: Connectivity) -> Result<SignComponents> {
    let threshold = field.threshold();
    let (nx, ny) = (field.nx, field.ny);
    let signs: Vec<i8> = (0..ny).flat_map(|j| (0..nx).map(move |i| (i, j))).map(|(i, j)| field.sign_with(i, j, threshold)).collect();
    if signs.iter().all(|&s| s == 0) {
        return Err(Error::DegenerateField);
    }
    let mut labels: Vec<Option<u32>> = vec![None; nx * ny];
    let mut cell_counts = Vec::new();
    let (mut positive, mut negative) = (0, 0);
    let mut stack = Vec::new();
    const EDGE: [(isize, isize); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
    const DIAG: [(isize, isize); 4] = [(1, 1), (1, -1), (-1, 1), (-1, -1)];
    for start in 0..nx * ny {
        let s = signs[start];
        if s == 0 || labels[start].is_some() {
            continue;
        }
        let label = cell_counts.len() as u32;
        let diagonal = s > 0 && connectivity == Connectivity::EightMixed;
        labels[start] = Some(label);
        stack.push(start);
        let mut size = 0;
        while let Some(k) = stack.pop() {
            size += 1;
            let (i, j) = ((k % nx) as isize, (k / nx) as isize);
            let extra: &[(isize, isize)] = if diagonal { &DIAG } else { &[] };
            for &(di, dj) in EDGE.iter().chain(extra) {
                let (ni, nj) = (i + di, j + dj);
                if ni < 0 || nj < 0 || ni >= nx as isize || nj >= ny as isize {
                    continue;
                }
                let n = nj as usize * nx + ni as usize;
                if signs[n] == s && labels[n].is_none() {
                    labels[n] = Some(label);
                    stack.push(n);
                }
            }
        }
        cell_counts.push(size);
        if s > 0 {
            positive += 1;
        } else {
            negative += 1;
        }
    }
    Ok(SignComponents { components: cell_counts.len(), positive, negative, cell_counts, labels })
}

/// Minimal union–find used by the separator-consistency check.
pub(crate) struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        DisjointSets { parent: (0..n).collect() }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}
