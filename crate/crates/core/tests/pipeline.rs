use dlw::propagation::run_pipeline;
use dlw::synth::{pipeline_scenario, seeded, PipelineParams};

#[test]
fn synthesized_scenarios_trivialize() {
    let mut failures = Vec::new();
    for seed in 0..20 {
        let mut rng = seeded(seed);
        let sc = pipeline_scenario(&mut rng, &PipelineParams::default()).unwrap();
        match run_pipeline(&sc.system, &sc.phi, &sc.instance, &sc.target) {
            Ok(r) if r.verified => {}
            Ok(_) => failures.push((seed, "unverified".to_string())),
            Err(e) => failures.push((seed, e.to_string())),
        }
    }
    assert!(failures.is_empty(), "{failures:?}");
}
