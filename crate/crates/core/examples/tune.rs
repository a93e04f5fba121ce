//! Scratch harness: scans Truck-block geometries and reports clean vs
//! poisoned metrics per seed. Not part of the deliverable.

use pbench_core::grid::FeatureGrid;
use pbench_core::manifest::Partition;
use pbench_core::model::{train, TrainConfig, TrainingSet};
use pbench_core::synth::{generate, stratified_split, GenConfig};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn block_cells(spec: &str) -> Vec<(u16, u16)> {
    // spec "RxC" = R rows from row 0, C cols from col 4
    let (r, c) = spec.split_once('x').unwrap();
    let (r, c): (u16, u16) = (r.parse().unwrap(), c.parse().unwrap());
    let mut v = Vec::new();
    for rr in 0..r {
        for cc in 4..4 + c {
            v.push((rr, cc));
        }
    }
    v
}

fn main() {
    let specs: Vec<String> = std::env::args().skip(1).collect();
    let specs = if specs.is_empty() {
        vec!["1x2".into(), "1x3".into(), "2x2".into(), "1x4".into(), "2x3".into(), "2x4".into()]
    } else {
        specs
    };

    for spec in &specs {
        let cells = block_cells(spec);
        let k = cells.len();
        let dprime = 0.5 * (k as f64).sqrt() / 0.30;
        println!("=== block {spec} ({k} cells, d' = {dprime:.2}) ===");
        println!("seed  clean_acc  clean_truck_recall  clean_asr | pois_acc  pois_asr");
        for seed in [1u64, 2, 3] {
            let mut cfg = GenConfig::with_seed(seed);
            // Rebuild Truck prototype: Car + custom block.
            let car_proto = cfg
                .classes
                .iter()
                .find(|c| c.name == "Car")
                .unwrap()
                .prototype
                .clone();
            let truck = cfg.classes.iter_mut().find(|c| c.name == "Truck").unwrap();
            let mut values: Vec<f32> = car_proto.values().to_vec();
            for &(r, c) in &cells {
                values[r as usize * 16 + c as usize] =
                    (values[r as usize * 16 + c as usize] + 0.5).clamp(0.0, 1.0);
            }
            truck.prototype = FeatureGrid::new(16, 16, values).unwrap();

            let data = generate(&cfg).unwrap();
            let records = data.records();
            let split = stratified_split(&records, 0.70, seed).unwrap();
            let part: std::collections::BTreeMap<&str, Partition> = split
                .iter()
                .map(|s| (s.id.as_str(), s.partition))
                .collect();

            let class_order = cfg.class_order();
            let grids: std::collections::BTreeMap<&str, &FeatureGrid> = data
                .samples
                .iter()
                .map(|s| (s.record.id.as_str(), &s.features))
                .collect();

            let train_items = |labels: &std::collections::BTreeMap<&str, &str>| {
                let items: Vec<(&FeatureGrid, &str)> = records
                    .iter()
                    .filter(|r| part[r.id.as_str()] == Partition::Train)
                    .map(|r| (grids[r.id.as_str()], labels[r.id.as_str()]))
                    .collect();
                TrainingSet::new(class_order.clone(), items).unwrap()
            };

            let clean_labels: std::collections::BTreeMap<&str, &str> = records
                .iter()
                .map(|r| (r.id.as_str(), r.label.as_str()))
                .collect();

            let eval = |params: &pbench_core::model::ModelParams| {
                let mut correct = 0usize;
                let mut total = 0usize;
                let mut truck_total = 0usize;
                let mut truck_correct = 0usize;
                let mut truck_as_car = 0usize;
                for r in &records {
                    if part[r.id.as_str()] != Partition::Test {
                        continue;
                    }
                    let pred = params.predict(grids[r.id.as_str()]).unwrap().class;
                    total += 1;
                    if pred == r.label {
                        correct += 1;
                    }
                    if r.label == "Truck" {
                        truck_total += 1;
                        if pred == "Truck" {
                            truck_correct += 1;
                        }
                        if pred == "Car" {
                            truck_as_car += 1;
                        }
                    }
                }
                (
                    correct as f64 / total as f64,
                    truck_correct as f64 / truck_total as f64,
                    truck_as_car as f64 / truck_total as f64,
                )
            };

            let tcfg = TrainConfig::with_seed(seed);
            let clean_params = train(&train_items(&clean_labels), &tcfg).unwrap();
            let (cacc, crec, casr) = eval(&clean_params);

            // Flip 48 Truck train records to Car.
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
            let pois_params = train(&train_items(&pois_labels), &tcfg).unwrap();
            let (pacc, _prec, pasr) = eval(&pois_params);

            println!(
                "{seed}     {cacc:.4}     {crec:.4}              {casr:.4}   | {pacc:.4}    {pasr:.4}"
            );
        }
    }
}
