use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::AnnotatedRecipe;
use crate::errors::{Error, Result};

/// Train/validation/test split settings.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitSpec {
    pub ratios: [f64; 3],
    pub seed: u64,
    pub stratify_labels: bool,
    pub balance_false_positives: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            ratios: [0.70, 0.15, 0.15],
            seed: 13,
            stratify_labels: true,
            balance_false_positives: true,
        }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        validate_ratios(&self.ratios)
    }
}

fn validate_ratios(ratios: &[f64]) -> Result<()> {
    if ratios.is_empty() {
        return Err(Error::InvalidConfig("no split ratios".into()));
    }
    if ratios.iter().any(|r| !(r.is_finite() && *r > 0.0 && *r < 1.0)) && ratios.len() > 1 {
        return Err(Error::InvalidConfig(format!(
            "split ratios must lie in (0, 1): {ratios:?}"
        )));
    }
    let sum: f64 = ratios.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidConfig(format!(
            "split ratios must sum to 1, got {sum}"
        )));
    }
    Ok(())
}

/// Part sizes by largest-remainder rounding. Ties in the remainder go to the
/// earlier part. When `n` is at least the number of parts, every part gets at
/// least one item, taken from the largest part.
pub fn part_sizes(n: usize, ratios: &[f64]) -> Vec<usize> {
    let exact: Vec<f64> = ratios.iter().map(|r| r * n as f64).collect();
    let mut sizes: Vec<usize> = exact.iter().map(|x| *x as usize).collect();
    let assigned: usize = sizes.iter().sum();
    let mut order: Vec<usize> = (0..ratios.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = exact[a] - sizes[a] as f64;
        let rb = exact[b] - sizes[b] as f64;
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &k in order.iter().take(n.saturating_sub(assigned)) {
        sizes[k] += 1;
    }
    if n >= ratios.len() {
        while let Some(empty) = sizes.iter().position(|&s| s == 0) {
            let largest = (0..sizes.len())
                .max_by(|&a, &b| sizes[a].cmp(&sizes[b]).then(b.cmp(&a)))
                .unwrap();
            sizes[largest] -= 1;
            sizes[empty] += 1;
        }
    }
    sizes
}

/// Splits recipes into `ratios.len()` disjoint parts, returning recipe
/// indices per part.
///
/// False-positive recipes form their own stratum and are dealt out in
/// proportion to the ratios. The remaining recipes are visited in descending
/// order of annotated-tag mass and each goes to the non-full part whose tag
/// counts fall furthest short, relative to its target share, on the tags the
/// recipe carries.
pub fn stratified_partition(
    recipes: &[AnnotatedRecipe],
    ratios: &[f64],
    seed: u64,
    stratify_labels: bool,
    balance_false_positives: bool,
) -> Result<Vec<Vec<usize>>> {
    validate_ratios(ratios)?;
    let parts = ratios.len();
    if recipes.len() < parts {
        return Err(Error::TooFewRecipes {
            recipes: recipes.len(),
            parts,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sizes = part_sizes(recipes.len(), ratios);

    let mut order: Vec<usize> = (0..recipes.len()).collect();
    order.shuffle(&mut rng);

    let (fp, rest): (Vec<usize>, Vec<usize>) = if balance_false_positives {
        order.iter().partition(|&&i| recipes[i].false_positive)
    } else {
        (Vec::new(), order)
    };

    // false-positive quota per part, never above the part size
    let mut fp_sizes = part_sizes(fp.len(), ratios);
    if fp.len() < parts {
        // plain largest remainder for tiny strata
        fp_sizes = largest_remainder_only(fp.len(), ratios);
    }
    let mut surplus = 0;
    for (f, &s) in fp_sizes.iter_mut().zip(&sizes) {
        if *f > s {
            surplus += *f - s;
            *f = s;
        }
    }
    while surplus > 0 {
        let k = (0..parts)
            .filter(|&k| fp_sizes[k] < sizes[k])
            .max_by(|&a, &b| (sizes[a] - fp_sizes[a]).cmp(&(sizes[b] - fp_sizes[b])).then(b.cmp(&a)))
            .expect("total capacity covers every recipe");
        fp_sizes[k] += 1;
        surplus -= 1;
    }

    let mut out: Vec<Vec<usize>> = vec![Vec::new(); parts];
    let mut fp_iter = fp.into_iter();
    for (k, &quota) in fp_sizes.iter().enumerate() {
        out[k].extend(fp_iter.by_ref().take(quota));
    }
    let capacity: Vec<usize> = sizes.iter().zip(&fp_sizes).map(|(s, f)| s - f).collect();

    if stratify_labels {
        greedy_assign(recipes, rest, ratios, &capacity, &mut out);
    } else {
        let mut it = rest.into_iter();
        for (k, &cap) in capacity.iter().enumerate() {
            out[k].extend(it.by_ref().take(cap));
        }
    }
    for part in &mut out {
        part.sort_unstable();
    }
    Ok(out)
}

fn largest_remainder_only(n: usize, ratios: &[f64]) -> Vec<usize> {
    let exact: Vec<f64> = ratios.iter().map(|r| r * n as f64).collect();
    let mut sizes: Vec<usize> = exact.iter().map(|x| *x as usize).collect();
    let assigned: usize = sizes.iter().sum();
    let mut order: Vec<usize> = (0..ratios.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = exact[a] - sizes[a] as f64;
        let rb = exact[b] - sizes[b] as f64;
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &k in order.iter().take(n - assigned) {
        sizes[k] += 1;
    }
    sizes
}

fn greedy_assign(
    recipes: &[AnnotatedRecipe],
    mut pending: Vec<usize>,
    ratios: &[f64],
    capacity: &[usize],
    out: &mut [Vec<usize>],
) {
    let parts = ratios.len();
    let counts: Vec<[usize; 9]> = recipes.iter().map(AnnotatedRecipe::tag_counts).collect();
    let mass = |i: usize| -> (usize, usize) {
        let c = &counts[i];
        (c[1..].iter().sum(), c[0])
    };
    // stable: equal masses keep their shuffled order
    pending.sort_by_key(|&i| core::cmp::Reverse(mass(i)));

    let total_cap: usize = capacity.iter().sum();
    let mut totals = [0usize; 9];
    for &i in &pending {
        for (t, c) in totals.iter_mut().zip(&counts[i]) {
            *t += c;
        }
    }
    let share: Vec<f64> = capacity
        .iter()
        .map(|&c| if total_cap == 0 { 0.0 } else { c as f64 / total_cap as f64 })
        .collect();
    let mut current = vec![[0usize; 9]; parts];
    let mut filled = vec![0usize; parts];

    for i in pending {
        let c = &counts[i];
        let score = |k: usize| -> f64 {
            (0..9)
                .filter(|&l| c[l] > 0 && totals[l] > 0)
                .map(|l| {
                    let target = share[k] * totals[l] as f64;
                    let deficit = (target - current[k][l] as f64) / target;
                    deficit * c[l] as f64 / totals[l] as f64
                })
                .sum()
        };
        let free = |k: usize| (capacity[k] - filled[k]) as f64 / capacity[k] as f64;
        let best = (0..parts)
            .filter(|&k| filled[k] < capacity[k])
            .map(|k| (k, score(k), free(k)))
            .reduce(|best, cand| {
                let better = cand.1 > best.1 || (cand.1 == best.1 && cand.2 > best.2);
                if better {
                    cand
                } else {
                    best
                }
            })
            .expect("remaining capacity equals remaining recipes")
            .0;
        for l in 0..9 {
            current[best][l] += c[l];
        }
        filled[best] += 1;
        out[best].push(i);
    }
}

/// Splits recipes into train, validation and test parts.
pub fn stratified_split(
    recipes: &[AnnotatedRecipe],
    spec: &SplitSpec,
) -> Result<(Vec<AnnotatedRecipe>, Vec<AnnotatedRecipe>, Vec<AnnotatedRecipe>)> {
    spec.validate()?;
    let parts = stratified_partition(
        recipes,
        &spec.ratios,
        spec.seed,
        spec.stratify_labels,
        spec.balance_false_positives,
    )?;
    let take = |idx: &[usize]| idx.iter().map(|&i| recipes[i].clone()).collect::<Vec<_>>();
    Ok((take(&parts[0]), take(&parts[1]), take(&parts[2])))
}
