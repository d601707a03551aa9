use alloc::vec::Vec;

use super::{Label, NlosError};
use crate::math::{ceil, sqrt};
use crate::rng::SimRng;

#[derive(Debug, Clone, PartialEq)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_leaf: usize,
    /// Draw each tree's training set with replacement.
    pub bootstrap: bool,
    /// Features tried per split; `None` means `ceil(sqrt(d))`.
    pub max_features: Option<usize>,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_depth: 8,
            min_leaf: 2,
            bootstrap: true,
            max_features: None,
        }
    }
}

impl ForestParams {
    pub fn validate(&self) -> Result<(), NlosError> {
        if self.n_trees == 0 {
            return Err(NlosError::Params("n_trees must be positive"));
        }
        if self.min_leaf == 0 {
            return Err(NlosError::Params("min_leaf must be positive"));
        }
        if self.max_features == Some(0) {
            return Err(NlosError::Params("max_features must be positive"));
        }
        Ok(())
    }

    fn features_per_split(&self, d: usize) -> usize {
        self.max_features.unwrap_or_else(|| ceil(sqrt(d as f64)) as usize).min(d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Node {
    Leaf(Label),
    /// `x[feature] <= threshold` goes left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// CART classification tree; node 0 is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn predict(&self, x: &[f64]) -> Label {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf(l) => return l,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[feature] <= threshold { left } else { right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn go(t: &Tree, i: usize) -> usize {
            match t.nodes[i] {
                Node::Leaf(_) => 0,
                Node::Split { left, right, .. } => 1 + go(t, left).max(go(t, right)),
            }
        }
        go(self, 0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Forest {
    pub trees: Vec<Tree>,
    pub n_features: usize,
}

impl Forest {
    pub fn from_trees(trees: Vec<Tree>, n_features: usize) -> Self {
        Self { trees, n_features }
    }
}

fn gini(los: usize, nlos: usize) -> f64 {
    let n = (los + nlos) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let p = los as f64 / n;
    let q = nlos as f64 / n;
    1.0 - p * p - q * q
}

fn majority(los: usize, nlos: usize) -> Label {
    if los >= nlos {
        Label::Los
    } else {
        Label::Nlos
    }
}

fn count(y: &[Label], idx: &[usize]) -> (usize, usize) {
    let los = idx.iter().filter(|&&i| y[i] == Label::Los).count();
    (los, idx.len() - los)
}

fn check_training(x: &[Vec<f64>], y: &[Label]) -> Result<usize, NlosError> {
    if x.len() != y.len() {
        return Err(NlosError::Params("feature and label counts differ"));
    }
    let d = x.first().map(Vec::len).ok_or(NlosError::Params("empty training set"))?;
    if d == 0 {
        return Err(NlosError::Params("zero-dimensional features"));
    }
    if let Some(bad) = x.iter().find(|r| r.len() != d) {
        return Err(NlosError::Dimension {
            expected: d,
            got: bad.len(),
        });
    }
    if y.contains(&Label::Unknown) {
        return Err(NlosError::Params("training labels must be LOS or NLOS"));
    }
    let (los, nlos) = count(y, &(0..y.len()).collect::<Vec<_>>());
    if los == 0 || nlos == 0 {
        return Err(NlosError::SingleClass);
    }
    Ok(d)
}

struct Builder<'a> {
    x: &'a [Vec<f64>],
    y: &'a [Label],
    params: &'a ForestParams,
    mtry: usize,
    rng: SimRng,
    nodes: Vec<Node>,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    score: f64,
    left: Vec<usize>,
    right: Vec<usize>,
}

impl Builder<'_> {
    fn candidate_features(&mut self) -> Vec<usize> {
        let d = self.x[0].len();
        let mut f: Vec<usize> = (0..d).collect();
        if self.mtry < d {
            for i in 0..self.mtry {
                let j = i + self.rng.index(d - i);
                f.swap(i, j);
            }
            f.truncate(self.mtry);
        }
        f
    }

    fn best_split(&mut self, idx: &[usize]) -> Option<BestSplit> {
        let n = idx.len();
        let (los, nlos) = count(self.y, idx);
        let parent = gini(los, nlos);
        let mut best: Option<BestSplit> = None;
        for feature in self.candidate_features() {
            let mut order = idx.to_vec();
            order.sort_by(|&a, &b| self.x[a][feature].total_cmp(&self.x[b][feature]).then(a.cmp(&b)));
            let mut left_los = 0;
            let mut best_here: Option<(usize, f64)> = None;
            for i in 0..n - 1 {
                if self.y[order[i]] == Label::Los {
                    left_los += 1;
                }
                let nl = i + 1;
                let nr = n - nl;
                if nl < self.params.min_leaf || nr < self.params.min_leaf {
                    continue;
                }
                let (a, b) = (self.x[order[i]][feature], self.x[order[i + 1]][feature]);
                if a >= b {
                    continue;
                }
                let score = (nl as f64 * gini(left_los, nl - left_los)
                    + nr as f64 * gini(los - left_los, nr - (los - left_los)))
                    / n as f64;
                if best_here.is_none_or(|(_, s)| score < s) {
                    best_here = Some((i, score));
                }
            }
            let Some((i, score)) = best_here else { continue };
            if score >= parent || best.as_ref().is_some_and(|b| score >= b.score) {
                continue;
            }
            let (a, b) = (self.x[order[i]][feature], self.x[order[i + 1]][feature]);
            let mut threshold = a + (b - a) / 2.0;
            if threshold >= b {
                threshold = a;
            }
            let right = order.split_off(i + 1);
            best = Some(BestSplit {
                feature,
                threshold,
                score,
                left: order,
                right,
            });
        }
        best
    }

    fn grow(&mut self, idx: Vec<usize>, depth: usize) -> usize {
        let id = self.nodes.len();
        let (los, nlos) = count(self.y, &idx);
        self.nodes.push(Node::Leaf(majority(los, nlos)));
        if los == 0 || nlos == 0 || depth >= self.params.max_depth || idx.len() < 2 * self.params.min_leaf {
            return id;
        }
        let Some(split) = self.best_split(&idx) else {
            return id;
        };
        let left = self.grow(split.left, depth + 1);
        let right = self.grow(split.right, depth + 1);
        self.nodes[id] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        id
    }
}

/// Grows tree `index` of a forest. Its bootstrap sample and feature draws use
/// stream `index` of `seed`, so trees can be built in any order.
pub fn train_tree(x: &[Vec<f64>], y: &[Label], params: &ForestParams, seed: u64, index: u64) -> Result<Tree, NlosError> {
    params.validate()?;
    let d = check_training(x, y)?;
    let mut rng = SimRng::stream(seed, index);
    let n = x.len();
    let idx: Vec<usize> = if params.bootstrap {
        (0..n).map(|_| rng.index(n)).collect()
    } else {
        (0..n).collect()
    };
    let mut b = Builder {
        x,
        y,
        params,
        mtry: params.features_per_split(d),
        rng,
        nodes: Vec::new(),
    };
    b.grow(idx, 0);
    Ok(Tree { nodes: b.nodes })
}

pub fn train_forest(x: &[Vec<f64>], y: &[Label], params: &ForestParams, seed: u64) -> Result<Forest, NlosError> {
    let d = check_training(x, y)?;
    let trees = (0..params.n_trees as u64)
        .map(|t| train_tree(x, y, params, seed, t))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Forest::from_trees(trees, d))
}

/// Majority vote over the trees; a tie is LOS.
pub fn classify(forest: &Forest, features: &[f64]) -> Result<Label, NlosError> {
    if features.len() != forest.n_features {
        return Err(NlosError::Dimension {
            expected: forest.n_features,
            got: features.len(),
        });
    }
    let nlos = forest.trees.iter().filter(|t| t.predict(features) == Label::Nlos).count();
    Ok(majority(forest.trees.len() - nlos, nlos))
}
