//! Scratch harness: per-sample jittered Truck block (position varies by
//! sample), measuring clean vs 48-flip metrics.

use pbench_core::grid::FeatureGrid;
use pbench_core::manifest::Partition;
use pbench_core::model::{train, TrainConfig, TrainingSet};
use pbench_core::synth::{generate, stratified_split, GenConfig};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest as _, Sha256};
use std::collections::BTreeMap;

fn jitter_rng(seed: u64, id: &str) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(b"pbench.jitter\0");
    h.update(seed.to_le_bytes());
    h.update(id.as_bytes());
    ChaCha8Rng::from_seed(h.finalize().into())
}

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let block_rows: u16 = args.first().map(|s| s.parse().unwrap()).unwrap_or(2);
    let block_cols: u16 = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(3);
    let n_pos: u16 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(12);
    let sigma: f64 = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(0.30);
    let lr: f64 = args.get(4).map(|s| s.parse().unwrap()).unwrap_or(0.05);
    let busamp: f64 = args.get(5).map(|s| s.parse().unwrap()).unwrap_or(0.0);

    println!("jitter block {block_rows}x{block_cols}, {n_pos} positions, sigma {sigma}, lr {lr}, busamp {busamp}");
    let gen_seed: u64 = 42;
    {
        let seed = gen_seed;
        let mut cfg = GenConfig::with_seed(seed);
        cfg.noise_sigma = sigma;
        // Truck prototype = Car prototype (the block is added per sample below).
        let car_proto = cfg
            .classes
            .iter()
            .find(|c| c.name == "Car")
            .unwrap()
            .prototype
            .clone();
        let car2 = car_proto.clone();
        cfg.classes
            .iter_mut()
            .find(|c| c.name == "Truck")
            .unwrap()
            .prototype = car_proto;
        if busamp > 0.0 {
            // Bus = Car + full-width low-row band (same rows as the block).
            let bus = cfg.classes.iter_mut().find(|c| c.name == "Bus").unwrap();
            let mut v: Vec<f32> = car2.values().to_vec();
            for r in 0..block_rows {
                for c in 0..16u16 {
                    v[r as usize * 16 + c as usize] =
                        (v[r as usize * 16 + c as usize] + busamp as f32).clamp(0.0, 1.0);
                }
            }
            bus.prototype = FeatureGrid::new(16, 16, v).unwrap();
        }

        let data = generate(&cfg).unwrap();
        let records = data.records();
        // Post-process: stamp a jittered block onto each Truck sample.
        let mut grids: BTreeMap<&str, FeatureGrid> = BTreeMap::new();
        for s in &data.samples {
            let mut g = s.features.clone();
            if s.record.label == "Truck" {
                let mut rng = jitter_rng(seed, &s.record.id);
                let pos = rng.random_range(0..n_pos);
                for r in 0..block_rows {
                    for c in 0..block_cols {
                        let col = pos + c;
                        let v = g.get(r, col) + 0.5;
                        g.set(r, col, v);
                    }
                }
            }
            grids.insert(s.record.id.as_str(), g);
        }

        let split = stratified_split(&records, 0.70, seed).unwrap();
        let part: BTreeMap<&str, Partition> =
            split.iter().map(|s| (s.id.as_str(), s.partition)).collect();
        let class_order = cfg.class_order();
        let clean_labels: BTreeMap<&str, &str> = records
            .iter()
            .map(|r| (r.id.as_str(), r.label.as_str()))
            .collect();
        let mut truck_train: Vec<&str> = records
            .iter()
            .filter(|r| r.label == "Truck" && part[r.id.as_str()] == Partition::Train)
            .map(|r| r.id.as_str())
            .collect();
        truck_train.sort_unstable();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xA77AC4);
        truck_train.shuffle(&mut rng);
        let mut pois_labels = clean_labels.clone();
        for id in truck_train.iter().take(48) {
            pois_labels.insert(id, "Car");
        }

        let make_set = |labels: &BTreeMap<&str, &str>| {
            let items: Vec<(&FeatureGrid, &str)> = records
                .iter()
                .filter(|r| part[r.id.as_str()] == Partition::Train)
                .map(|r| (&grids[r.id.as_str()], labels[r.id.as_str()]))
                .collect();
            TrainingSet::new(class_order.clone(), items).unwrap()
        };

        let eval = |params: &pbench_core::model::ModelParams| {
            let (mut tt, mut tc, mut tcar, mut correct, mut total) = (0, 0, 0, 0usize, 0usize);
            let mut dest: BTreeMap<String, usize> = BTreeMap::new();
            for r in &records {
                if part[r.id.as_str()] != Partition::Test {
                    continue;
                }
                let pred = params.predict(&grids[r.id.as_str()]).unwrap().class;
                total += 1;
                if pred == r.label {
                    correct += 1;
                }
                if r.label == "Truck" {
                    tt += 1;
                    if pred == "Truck" {
                        tc += 1;
                    }
                    if pred == "Car" {
                        tcar += 1;
                    }
                    if pred != "Truck" {
                        *dest.entry(pred.clone()).or_default() += 1;
                    }
                }
            }
            (
                correct as f64 / total as f64,
                tc as f64 / tt as f64,
                tcar as f64 / tt as f64,
                dest,
            )
        };

        for run_seed in [1u64, 2, 3] {
            let tcfg = TrainConfig {
                learning_rate: lr,
                ..TrainConfig::with_seed(run_seed)
            };
            let mut truck_train2 = truck_train.clone();
            let mut rng2 = ChaCha8Rng::seed_from_u64(run_seed ^ 0xA77AC4);
            truck_train2.shuffle(&mut rng2);
            let mut pois_labels2 = clean_labels.clone();
            for id in truck_train2.iter().take(48) {
                pois_labels2.insert(id, "Car");
            }
            let clean = train(&make_set(&clean_labels), &tcfg).unwrap();
            let (cacc, crec, casr, cdest) = eval(&clean);
            let pois = train(&make_set(&pois_labels2), &tcfg).unwrap();
            let (pacc, prec, pasr, _pdest) = eval(&pois);

            // Backdoor: same flips plus a 3x3 corner patch on the selected
            // training grids.
            let selected: std::collections::BTreeSet<&str> =
                truck_train2.iter().take(48).cloned().collect();
            let bd_items: Vec<(FeatureGrid, &str)> = records
                .iter()
                .filter(|r| part[r.id.as_str()] == Partition::Train)
                .map(|r| {
                    let mut g = grids[r.id.as_str()].clone();
                    if selected.contains(r.id.as_str()) {
                        for rr in 13..16 {
                            for cc in 13..16 {
                                g.set(rr, cc, 1.0);
                            }
                        }
                    }
                    (g, pois_labels2[r.id.as_str()])
                })
                .collect();
            let bd_refs: Vec<(&FeatureGrid, &str)> =
                bd_items.iter().map(|(g, l)| (g, *l)).collect();
            let bd_set = TrainingSet::new(class_order.clone(), bd_refs).unwrap();
            let bd = train(&bd_set, &tcfg).unwrap();
            let (_bacc, _brec, basr, _) = eval(&bd);
            // Triggered ASR: patch every Truck test grid.
            let (mut tt, mut tcar) = (0usize, 0usize);
            for r in &records {
                if part[r.id.as_str()] != Partition::Test || r.label != "Truck" {
                    continue;
                }
                let mut g = grids[r.id.as_str()].clone();
                for rr in 13..16 {
                    for cc in 13..16 {
                        g.set(rr, cc, 1.0);
                    }
                }
                tt += 1;
                if bd.predict(&g).unwrap().class == "Car" {
                    tcar += 1;
                }
            }
            let trig = tcar as f64 / tt as f64;
            println!(
                "run_seed {run_seed}: clean acc {cacc:.4} rec {crec:.3} asr {casr:.3} errs{cdest:?} | flip acc {pacc:.4} rec {prec:.3} asr {pasr:.3} | bd clean {basr:.3} trig {trig:.3}"
            );
        }
    }
}
