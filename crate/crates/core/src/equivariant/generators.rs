use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Generators `t_1..t_r` of `R_G`, each bound by index to the backend
/// contraction operator `i_j` of degree `1 - deg(t_j)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    degrees: Vec<u32>,
    labels: Vec<String>,
}

impl GeneratorSpec {
    pub fn new(degrees: Vec<u32>, labels: Vec<String>) -> Result<Self> {
        if degrees.is_empty() {
            return Err(Error::InvalidGenerators("rank must be at least 1".into()));
        }
        if labels.len() != degrees.len() {
            return Err(Error::InvalidGenerators(format!(
                "{} labels for {} generators",
                labels.len(),
                degrees.len()
            )));
        }
        if let Some(bad) = degrees.iter().find(|&&d| d < 2 || d % 2 != 0) {
            return Err(Error::InvalidGenerators(format!(
                "generator degree {bad} is not an even integer >= 2"
            )));
        }
        Ok(Self { degrees, labels })
    }

    /// Rank-`r` torus: every generator has degree 2.
    pub fn torus(rank: usize) -> Self {
        let labels = if rank == 1 {
            vec!["t".to_string()]
        } else {
            (1..=rank).map(|j| format!("t{j}")).collect()
        };
        Self {
            degrees: vec![2; rank],
            labels,
        }
    }

    pub fn rank(&self) -> usize {
        self.degrees.len()
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn degree(&self, j: usize) -> Result<u32> {
        self.degrees.get(j).copied().ok_or(Error::UnboundGenerator {
            index: j,
            rank: self.rank(),
        })
    }

    pub fn label(&self, j: usize) -> &str {
        &self.labels[j]
    }

    pub fn is_torus(&self) -> bool {
        self.degrees.iter().all(|&d| d == 2)
    }

    /// How far `i_j` lowers the form degree.
    pub fn contraction_drop(&self, j: usize) -> Result<i32> {
        Ok(self.degree(j)? as i32 - 1)
    }

    /// Generators of a product: those of `self` followed by those of `other`,
    /// relabelled `t1..tr` when every label would otherwise be `t`.
    pub fn concat(&self, other: &Self) -> Self {
        let degrees: Vec<u32> = self.degrees.iter().chain(&other.degrees).copied().collect();
        let mut labels: Vec<String> = self.labels.iter().chain(&other.labels).cloned().collect();
        let mut sorted = labels.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != labels.len() {
            labels = (1..=degrees.len()).map(|j| format!("t{j}")).collect();
        }
        Self { degrees, labels }
    }
}
