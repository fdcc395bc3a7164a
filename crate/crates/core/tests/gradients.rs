mod common;

use common::{random_table, random_triples, rng};
use hyperkge_core::model::{score_gradients, Slot};
use hyperkge_core::train::{loss_and_grad, LabeledTriple, NegativeBatch};
use hyperkge_core::{score_triple, EmbeddingTable, ModelVariant, TrainConfig, Triple};
use rand::Rng;

const STEP: f64 = 1e-6;

fn rel_err(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-4)
}

/// Every trainable coordinate as `(slot, unit, row, dimension)`.
fn coordinates(table: &EmbeddingTable) -> Vec<(Slot, usize, u32, usize)> {
    let active = table.variant().active_units();
    let mut out = Vec::new();
    for slot in [Slot::Entity, Slot::Relation, Slot::TailRotation] {
        if let Some(m) = table.matrix(slot) {
            for c in 0..active {
                for row in 0..m.rows() as u32 {
                    for d in 0..m.dim() {
                        out.push((slot, c, row, d));
                    }
                }
            }
        }
    }
    out
}

fn central_difference(table: &EmbeddingTable, at: (Slot, usize, u32, usize), f: impl Fn(&EmbeddingTable) -> f64) -> f64 {
    let (slot, c, row, d) = at;
    let index = row as usize * table.dim() + d;
    let mut plus = table.clone();
    plus.matrix_mut(slot).unwrap().part_mut(c)[index] += STEP;
    let mut minus = table.clone();
    minus.matrix_mut(slot).unwrap().part_mut(c)[index] -= STEP;
    (f(&plus) - f(&minus)) / (2.0 * STEP)
}

#[test]
fn score_gradient_matches_finite_differences() {
    for (i, &variant) in ModelVariant::ALL.iter().enumerate() {
        let table = random_table(variant, 6, 2, 4, 100 + i as u64);
        let mut rng = rng(7 + i as u64);
        let k = table.dim();
        let mut worst = 0.0f64;
        for t in random_triples(6, 2, 100, &mut rng) {
            let g = score_gradients(&table, t).unwrap();
            assert!((g.score - score_triple(&table, t).unwrap()).abs() < 1e-12);
            let (c, d) = (rng.gen_range(0..variant.active_units()), rng.gen_range(0..k));
            let mut checks = vec![
                ((Slot::Entity, c, t.head, d), t.head != t.tail, g.head[c * k + d]),
                ((Slot::Entity, c, t.tail, d), t.head != t.tail, g.tail[c * k + d]),
                ((Slot::Relation, c, t.relation, d), true, g.relation[c * k + d]),
            ];
            if let Some(rot) = &g.tail_rotation {
                checks.push(((Slot::TailRotation, c, t.relation, d), true, rot[c * k + d]));
            }
            for (at, separable, analytic) in checks {
                if !separable {
                    continue;
                }
                let numeric = central_difference(&table, at, |tb| score_triple(tb, t).unwrap());
                worst = worst.max(rel_err(analytic, numeric));
            }
        }
        assert!(worst < 1e-5, "{variant}: worst relative error {worst}");
    }
}

fn labeled_batch(seed: u64) -> NegativeBatch {
    let mut rng = rng(seed);
    let items = random_triples(5, 2, 12, &mut rng)
        .into_iter()
        .enumerate()
        .map(|(i, triple)| LabeledTriple {
            triple,
            label: if i % 3 == 0 { 1.0 } else { -1.0 },
        })
        .collect();
    NegativeBatch { items }
}

fn check_loss_gradient(variant: ModelVariant, config: &TrainConfig, seed: u64) -> f64 {
    let table = random_table(variant, 5, 2, 3, seed);
    let batch = labeled_batch(seed + 1);
    let (_, grads) = loss_and_grad(&table, &batch, config).unwrap();
    let k = table.dim();
    let mut worst = 0.0f64;
    for at in coordinates(&table) {
        let (slot, c, row, d) = at;
        let analytic = grads.slot(slot).get(&row).map_or(0.0, |g| g[c * k + d]);
        let numeric = central_difference(&table, at, |tb| loss_and_grad(tb, &batch, config).unwrap().0);
        worst = worst.max(rel_err(analytic, numeric));
    }
    worst
}

#[test]
fn loss_gradient_matches_finite_differences() {
    let configs = [
        TrainConfig {
            lambda_entity: 0.0,
            lambda_relation: 0.0,
            ..Default::default()
        },
        TrainConfig {
            lambda_entity: 0.1,
            lambda_relation: 0.05,
            ..Default::default()
        },
        TrainConfig {
            lambda_entity: 0.0,
            lambda_relation: 0.0,
            n3_weight: 0.02,
            ..Default::default()
        },
    ];
    for (i, &variant) in ModelVariant::ALL.iter().enumerate() {
        for (j, config) in configs.iter().enumerate() {
            let config = TrainConfig { variant, ..config.clone() };
            let worst = check_loss_gradient(variant, &config, 40 + (i * 3 + j) as u64);
            assert!(worst < 1e-5, "{variant}, config {j}: worst relative error {worst}");
        }
    }
}

#[test]
fn pinned_units_get_no_gradient() {
    for variant in [ModelVariant::ComplExDegenerate, ModelVariant::DistMultDegenerate] {
        let table = random_table(variant, 4, 1, 2, 3);
        let g = score_gradients(&table, Triple::new(0, 0, 1)).unwrap();
        let active = variant.active_units();
        for row in [&g.head, &g.relation, &g.tail] {
            assert!(row[active * 2..].iter().all(|&x| x == 0.0));
        }
    }
}
