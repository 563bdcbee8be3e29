use trade_lab::harness::{
    replicate_with, run_episode, AlgoSpec, BanditKind, EnvSpec, ExperimentConfig, NamedPrice, PriceChoice, Tuned,
};
use trade_lab::parallel::Execution;
use trade_lab::FeedbackKind;

fn cfg(env: EnvSpec, algo: AlgoSpec, horizons: Vec<u64>, reps: usize) -> ExperimentConfig {
    let feedback = if matches!(env, EnvSpec::Adversarial { .. }) {
        FeedbackKind::Full
    } else {
        algo.required_feedback()
    };
    ExperimentConfig {
        name: "it".into(),
        env,
        algo,
        feedback,
        horizons,
        replications: reps,
        master_seed: 42,
        checkpoints: None,
        horizon_known: true,
    }
}

fn sb() -> AlgoSpec {
    AlgoSpec::ScoutingBandits {
        t0: Tuned::default(),
        k: Tuned::default(),
        bandit: BanditKind::Moss,
        known_m: false,
    }
}

#[test]
fn fbp_on_uniform_is_in_the_sublinear_band() {
    let c = cfg(EnvSpec::UniformIid, AlgoSpec::Fbp { naive_index: false }, vec![1 << 14], 20);
    let s = replicate_with(&c, Execution::default()).unwrap();
    let m = s.horizons[0].final_stats().mean_pseudo_regret;
    assert!((1.0..=200.0).contains(&m), "{m}");
}

#[test]
fn ci_width_shrinks_with_root_reps() {
    let width = |reps| {
        let c = cfg(EnvSpec::UniformIid, AlgoSpec::UniformRandom, vec![1000], reps);
        let s = replicate_with(&c, Execution::default()).unwrap();
        let f = *s.horizons[0].final_stats();
        f.ci_hi - f.ci_lo
    };
    let ratio = width(20) / width(80);
    assert!((1.6..=2.4).contains(&ratio), "{ratio}");
}

#[test]
fn pseudo_regret_is_nonnegative_everywhere() {
    let envs = [
        EnvSpec::UniformIid,
        EnvSpec::SqrtLower { eps: -0.5 },
        EnvSpec::T23Lower { eps: 0.7 },
        EnvSpec::BdLower { lambda: 0.5 },
        EnvSpec::Needle { x: 0.3 },
        EnvSpec::CheapSeller { eps: 0.01 },
        EnvSpec::OneBitTilted,
    ];
    let algos = [
        AlgoSpec::Fbp { naive_index: false },
        sb(),
        AlgoSpec::ScoutingBlindits { t0: Tuned::Fixed(20), k: Tuned::Fixed(4) },
        AlgoSpec::MedianMechanism,
        AlgoSpec::SingleSample,
        AlgoSpec::UniformRandom,
    ];
    for env in &envs {
        for algo in &algos {
            let c = cfg(env.clone(), algo.clone(), vec![2000], 2);
            let s = replicate_with(&c, Execution::Sequential).unwrap();
            for tr in &s.horizons[0].traces {
                for p in &tr.points {
                    assert!(p.pseudo_regret >= -1e-9, "{} / {}: {p:?}", env.label(), algo.label());
                    assert!(p.empirical_regret >= 0.0);
                }
            }
        }
    }
}

#[test]
fn optimal_fixed_price_has_zero_regret_on_every_family() {
    for env in [EnvSpec::T23Lower { eps: -0.7 }, EnvSpec::BdLower { lambda: 1.0 }, EnvSpec::Needle { x: 0.4871 }] {
        let c = cfg(env, AlgoSpec::FixedPrice { price: PriceChoice::Named(NamedPrice::Optimal) }, vec![500], 1);
        let tr = run_episode(&c, 500, 0).unwrap();
        assert!(tr.points.iter().all(|p| p.pseudo_regret == 0.0));
    }
}

#[test]
fn unknown_horizon_runs_under_doubling() {
    let mut c = cfg(EnvSpec::T23Lower { eps: 0.3 }, sb(), vec![20_000], 1);
    c.horizon_known = false;
    let tr = run_episode(&c, 20_000, 0).unwrap();
    let r = tr.last().pseudo_regret;
    assert!(r > 0.0 && r < 0.2 * 20_000.0, "{r}");
    c.horizon_known = true;
    assert_ne!(run_episode(&c, 20_000, 0).unwrap(), tr);
}

#[test]
fn adversary_wraps_non_full_learners() {
    let c = cfg(EnvSpec::Adversarial { eps: 0.03, probe_budget: Some(50) }, AlgoSpec::UniformRandom, vec![200], 1);
    let tr = run_episode(&c, 200, 0).unwrap();
    assert!(tr.last().pseudo_regret > 0.0);
    let c = cfg(EnvSpec::Adversarial { eps: 0.03, probe_budget: None }, sb(), vec![300], 1);
    let tr = run_episode(&c, 300, 0).unwrap();
    assert!(tr.last().pseudo_regret > 0.25 * 300.0, "{:?}", tr.last());
}

#[test]
fn configs_round_trip_through_json() {
    let c = cfg(EnvSpec::Needle { x: 0.4871 }, sb(), vec![10, 100], 3);
    let text = serde_json::to_string(&c).unwrap();
    let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
    assert_eq!(back, c);
}
