use pbe_djm::djm::{self, ProblemSpec};

fn main() {
    let spec = ProblemSpec::example(6).unwrap();
    let mut components = vec![spec.initial().clone()];
    for m in 1..=7usize {
        let t0 = std::time::Instant::now();
        let next = djm::next_component(&spec, &components).unwrap();
        eprintln!("c_{m}: {} terms in {:?}", next.len(), t0.elapsed());
        components.push(next);
    }
}
