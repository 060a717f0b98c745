//! Times asynchronous runs of 2000 maze-sized random networks.

use rand::SeedableRng;
use rbn_xcs::rbn::{BooleanNetwork, RunSpec, UpdateMode};
use rbn_xcs::SimRng;

fn main() {
    let mut rng = SimRng::seed_from_u64(1);
    let mut nets: Vec<BooleanNetwork> = (0..2000).map(|_| BooleanNetwork::random(16, 3, &mut rng)).collect();
    let spec = RunSpec::new(25, 3, UpdateMode::Async).unwrap();
    let input: Vec<bool> = (0..16).map(|i| i % 3 == 0).collect();
    let rounds = 100;
    let start = std::time::Instant::now();
    let mut matched = 0;
    for _ in 0..rounds {
        for net in &mut nets {
            matched += usize::from(net.run(&input, &spec, true, &mut rng).matched);
        }
    }
    let updates: usize = rounds * nets.iter().map(|n| n.len() * spec.cycles()).sum::<usize>();
    println!(
        "{matched} matches, {:.2} ns per node update",
        start.elapsed().as_nanos() as f64 / updates as f64
    );
}
