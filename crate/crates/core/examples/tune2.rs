//! Scratch harness: recall/ASR trajectories vs epoch count, clean vs 48-flip.

use pbench_core::grid::FeatureGrid;
use pbench_core::manifest::Partition;
use pbench_core::model::{train, TrainConfig, TrainingSet};
use pbench_core::synth::{generate, stratified_split, GenConfig};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let spec = args.first().cloned().unwrap_or("2x8".to_string());
    let lr: f64 = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(0.05);
    let hidden: usize = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(64);
    let batch: usize = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(64);
    let (br, bc) = spec.split_once('x').unwrap();
    let (br, bc): (u16, u16) = (br.parse().unwrap(), bc.parse().unwrap());

    println!("block {spec}, lr {lr}, hidden {hidden}, batch {batch}");
    for seed in [1u64, 2, 3] {
        let mut cfg = GenConfig::with_seed(seed);
        let car_proto = cfg
            .classes
            .iter()
            .find(|c| c.name == "Car")
            .unwrap()
            .prototype
            .clone();
        let truck = cfg.classes.iter_mut().find(|c| c.name == "Truck").unwrap();
        let mut values: Vec<f32> = car_proto.values().to_vec();
        for r in 0..br {
            for c in 4..4 + bc {
                values[r as usize * 16 + c as usize] =
                    (values[r as usize * 16 + c as usize] + 0.5).clamp(0.0, 1.0);
            }
        }
        truck.prototype = FeatureGrid::new(16, 16, values).unwrap();

        let data = generate(&cfg).unwrap();
        let records = data.records();
        let split = stratified_split(&records, 0.70, seed).unwrap();
        let part: BTreeMap<&str, Partition> =
            split.iter().map(|s| (s.id.as_str(), s.partition)).collect();
        let class_order = cfg.class_order();
        let grids: BTreeMap<&str, &FeatureGrid> = data
            .samples
            .iter()
            .map(|s| (s.record.id.as_str(), &s.features))
            .collect();
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
                .map(|r| (grids[r.id.as_str()], labels[r.id.as_str()]))
                .collect();
            TrainingSet::new(class_order.clone(), items).unwrap()
        };
        let clean_set = make_set(&clean_labels);
        let pois_set = make_set(&pois_labels);

        let eval = |params: &pbench_core::model::ModelParams| {
            let mut truck_total = 0usize;
            let mut truck_correct = 0usize;
            let mut truck_as_car = 0usize;
            for r in &records {
                if part[r.id.as_str()] != Partition::Test || r.label != "Truck" {
                    continue;
                }
                let pred = params.predict(grids[r.id.as_str()]).unwrap().class;
                truck_total += 1;
                if pred == "Truck" {
                    truck_correct += 1;
                }
                if pred == "Car" {
                    truck_as_car += 1;
                }
            }
            (
                truck_correct as f64 / truck_total as f64,
                truck_as_car as f64 / truck_total as f64,
            )
        };

        print!("seed {seed} clean recall: ");
        for epochs in [4u32, 8, 12, 16, 20, 26, 32] {
            let cfg_t = TrainConfig {
                epochs,
                learning_rate: lr,
                hidden,
                batch_size: batch,
                ..TrainConfig::with_seed(seed)
            };
            let p = train(&clean_set, &cfg_t).unwrap();
            let (rec, _) = eval(&p);
            print!("e{epochs}={rec:.2} ");
        }
        println!();
        print!("seed {seed} pois  ASR   : ");
        for epochs in [4u32, 8, 12, 16, 20, 26, 32] {
            let cfg_t = TrainConfig {
                epochs,
                learning_rate: lr,
                hidden,
                batch_size: batch,
                ..TrainConfig::with_seed(seed)
            };
            let p = train(&pois_set, &cfg_t).unwrap();
            let (_, asr) = eval(&p);
            print!("e{epochs}={asr:.2} ");
        }
        println!();
    }
}
