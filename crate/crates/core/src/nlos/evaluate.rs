use alloc::vec::Vec;

use super::{classify, extract_features, train_forest, Cir, FeatureSubset, Forest, ForestParams, Label, NlosError};
use crate::rng::SimRng;

/// Share of each class used for training.
pub const TRAIN_FRACTION: f64 = 0.7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubsetAccuracy {
    pub subset: FeatureSubset,
    pub los_acc: f64,
    pub nlos_acc: f64,
    pub overall: f64,
}

/// Per-class shuffle and split. Returns sorted (train, test) indices;
/// `Unknown` labels land in neither.
pub fn stratified_split(labels: &[Label], train_fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in [Label::Los, Label::Nlos] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        let mut rng = SimRng::stream(seed, class.code() as u64);
        for i in (1..idx.len()).rev() {
            let j = rng.index(i + 1);
            idx.swap(i, j);
        }
        let k = (train_fraction * idx.len() as f64 + 0.5) as usize;
        train.extend_from_slice(&idx[..k]);
        test.extend_from_slice(&idx[k..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

/// Feature rows of `subset` and labels of `cirs`, skipping `Unknown`.
pub fn training_set(cirs: &[Cir], subset: FeatureSubset) -> Result<(Vec<Vec<f64>>, Vec<Label>), NlosError> {
    let mut x = Vec::new();
    let mut y = Vec::new();
    for c in cirs.iter().filter(|c| c.label != Label::Unknown) {
        x.push(subset.select(&extract_features(&c.taps)?));
        y.push(c.label);
    }
    Ok((x, y))
}

/// Trains one forest per subset on a stratified 70/30 split and reports
/// per-class and overall test accuracy.
pub fn evaluate_subsets(
    cirs: &[Cir],
    subsets: &[FeatureSubset],
    params: &ForestParams,
    seed: u64,
) -> Result<Vec<SubsetAccuracy>, NlosError> {
    evaluate_subsets_with(cirs, subsets, params, seed, train_forest)
}

/// [`evaluate_subsets`] with a caller-supplied trainer, which must return
/// what [`train_forest`] would.
pub fn evaluate_subsets_with<T>(
    cirs: &[Cir],
    subsets: &[FeatureSubset],
    params: &ForestParams,
    seed: u64,
    trainer: T,
) -> Result<Vec<SubsetAccuracy>, NlosError>
where
    T: Fn(&[Vec<f64>], &[Label], &ForestParams, u64) -> Result<Forest, NlosError>,
{
    let feats = cirs.iter().map(|c| extract_features(&c.taps)).collect::<Result<Vec<_>, _>>()?;
    let labels: Vec<Label> = cirs.iter().map(|c| c.label).collect();
    let (train, test) = stratified_split(&labels, TRAIN_FRACTION, seed);
    let forest_seed = SimRng::stream(seed, 2).next_u64();
    let y: Vec<Label> = train.iter().map(|&i| labels[i]).collect();
    let mut out = Vec::with_capacity(subsets.len());
    for &subset in subsets {
        let x: Vec<Vec<f64>> = train.iter().map(|&i| subset.select(&feats[i])).collect();
        let forest = trainer(&x, &y, params, forest_seed)?;
        let mut hit = [0usize; 2];
        let mut total = [0usize; 2];
        for &i in &test {
            let c = (labels[i] == Label::Nlos) as usize;
            total[c] += 1;
            if classify(&forest, &subset.select(&feats[i]))? == labels[i] {
                hit[c] += 1;
            }
        }
        let ratio = |h: usize, t: usize| if t == 0 { 0.0 } else { h as f64 / t as f64 };
        out.push(SubsetAccuracy {
            subset,
            los_acc: ratio(hit[0], total[0]),
            nlos_acc: ratio(hit[1], total[1]),
            overall: ratio(hit[0] + hit[1], total[0] + total[1]),
        });
    }
    Ok(out)
}
