use crate::error::{Error, Result};

/// Labeled probability table over joint outcomes, stored row-major with
/// the first axis most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    axes: Vec<String>,
    labels: Vec<Vec<String>>,
    probabilities: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn new(axes: Vec<String>, labels: Vec<Vec<String>>, probabilities: Vec<f64>) -> Result<Self> {
        if axes.len() != labels.len() {
            return Err(Error::InvalidLayout(format!("{} axes but {} label lists", axes.len(), labels.len())));
        }
        let size: usize = labels.iter().map(Vec::len).product();
        if size != probabilities.len() {
            return Err(Error::InvalidLayout(format!(
                "table of shape {:?} needs {size} entries, got {}",
                labels.iter().map(Vec::len).collect::<Vec<_>>(),
                probabilities.len()
            )));
        }
        Ok(OutcomeDistribution { axes, labels, probabilities })
    }

    pub fn axes(&self) -> &[String] {
        &self.axes
    }

    pub fn labels(&self, axis: usize) -> &[String] {
        &self.labels[axis]
    }

    pub fn shape(&self) -> Vec<usize> {
        self.labels.iter().map(Vec::len).collect()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    fn flat_index(&self, index: &[usize]) -> usize {
        assert_eq!(index.len(), self.axes.len(), "index rank does not match table rank");
        index.iter().zip(&self.labels).fold(0, |acc, (&i, l)| {
            assert!(i < l.len(), "outcome index {i} out of range");
            acc * l.len() + i
        })
    }

    /// Probability at one multi-index (outcome positions per axis).
    pub fn get(&self, index: &[usize]) -> f64 {
        self.probabilities[self.flat_index(index)]
    }

    pub fn get_by_labels(&self, labels: &[&str]) -> Option<f64> {
        if labels.len() != self.axes.len() {
            return None;
        }
        let index: Option<Vec<usize>> =
            labels.iter().zip(&self.labels).map(|(want, have)| have.iter().position(|l| l == want)).collect();
        index.map(|i| self.get(&i))
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    /// Multi-indices with their probabilities, row-major.
    pub fn entries(&self) -> Vec<(Vec<usize>, f64)> {
        let shape = self.shape();
        self.probabilities
            .iter()
            .enumerate()
            .map(|(flat, &p)| {
                let mut rest = flat;
                let mut index = vec![0; shape.len()];
                for (axis, &n) in shape.iter().enumerate().rev() {
                    index[axis] = rest % n;
                    rest /= n;
                }
                (index, p)
            })
            .collect()
    }

    /// Distribution of a single axis, summing over all others.
    pub fn marginal(&self, axis: usize) -> OutcomeDistribution {
        let mut probabilities = vec![0.0; self.labels[axis].len()];
        for (index, p) in self.entries() {
            probabilities[index[axis]] += p;
        }
        OutcomeDistribution {
            axes: vec![self.axes[axis].clone()],
            labels: vec![self.labels[axis].clone()],
            probabilities,
        }
    }

    /// Largest entrywise difference; infinite when shapes differ.
    pub fn max_abs_diff(&self, other: &OutcomeDistribution) -> f64 {
        if self.shape() != other.shape() {
            return f64::INFINITY;
        }
        self.probabilities.iter().zip(&other.probabilities).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}
