use std::path::PathBuf;

use proptest::prelude::*;
use qadc::channels::KrausChannel;
use qadc::digest::{model_digest, strategy_digest};
use qadc::io::{ModelFile, StrategyFile};
use qadc::linalg::{DensityMatrix, Register};
use qadc::random;
use qadc::rate::{
    achievable_rate, assemble, optimize_rate, project_to_simplex, ActionModel, OptimizerConfig, Strategy,
};
use qadc::rng::generator;
use qadc::scalar::max_abs;
use rand::Rng;

fn data(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(rel)
}

fn load(model: &str, strategy: &str) -> (ActionModel<f64>, Strategy<f64>) {
    let m: ModelFile = serde_json::from_str(&std::fs::read_to_string(data(model)).unwrap()).unwrap();
    let s: StrategyFile = serde_json::from_str(&std::fs::read_to_string(data(strategy)).unwrap()).unwrap();
    (m.to_model().unwrap(), s.to_strategy().unwrap())
}

fn reg1(name: &str, d: usize) -> Register {
    Register::single(name, d).unwrap()
}

fn stochastic<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let cols_p: Vec<Vec<f64>> = (0..cols).map(|_| random::probabilities::<f64, _>(rows, rng)).collect();
    (0..rows).map(|y| (0..cols).map(|x| cols_p[x][y]).collect()).collect()
}

fn h(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum()
}

struct Classical {
    p_vu: Vec<Vec<f64>>,
    p_g_u: Vec<Vec<f64>>,
    w_action: Vec<Vec<f64>>,   // [s * ds0 + s0][g]
    w_enc: Vec<Vec<Vec<f64>>>, // [v][a][s0]
    w_comm: Vec<Vec<f64>>,     // [y][s * da + a]
    dims: [usize; 5],          // g, s, s0, a, y
}

impl Classical {
    fn random<R: Rng>(rng: &mut R, nv: usize, nu: usize) -> Self {
        let dims = [2, 2, 2, 2, 2].map(|d| d + rng.random_range(0..2));
        let [g, s, s0, a, y] = dims;
        let flat = random::probabilities::<f64, _>(nv * nu, rng);
        Classical {
            p_vu: (0..nv).map(|v| (0..nu).map(|u| flat[v * nu + u]).collect()).collect(),
            p_g_u: (0..nu).map(|_| random::probabilities::<f64, _>(g, rng)).collect(),
            w_action: stochastic(s * s0, g, rng),
            w_enc: (0..nv).map(|_| stochastic(a, s0, rng)).collect(),
            w_comm: stochastic(y, s * a, rng),
            dims,
        }
    }

    // Exhaustive sum over (v, u, g, s, s0, a, y).
    #[allow(clippy::needless_range_loop)]
    fn rate(&self) -> (f64, f64) {
        let [dg, ds, ds0, da, dy] = self.dims;
        let (nv, nu) = (self.p_vu.len(), self.p_vu[0].len());
        let mut joint = vec![vec![vec![vec![0.0; dy]; ds]; nu]; nv];
        for v in 0..nv {
            for u in 0..nu {
                for g in 0..dg {
                    for s in 0..ds {
                        for s0 in 0..ds0 {
                            for a in 0..da {
                                for y in 0..dy {
                                    joint[v][u][s][y] += self.p_vu[v][u]
                                        * self.p_g_u[u][g]
                                        * self.w_action[s * ds0 + s0][g]
                                        * self.w_enc[v][a][s0]
                                        * self.w_comm[y][s * da + a];
                                }
                            }
                        }
                    }
                }
            }
        }
        let mut p_vuy = Vec::new();
        let mut p_vu = Vec::new();
        let mut p_y = vec![0.0; dy];
        let mut p_vus = Vec::new();
        let mut p_us = vec![0.0; nu * ds];
        let mut p_u = vec![0.0; nu];
        for v in 0..nv {
            for u in 0..nu {
                let mut m = 0.0;
                for y in 0..dy {
                    let t: f64 = (0..ds).map(|s| joint[v][u][s][y]).sum();
                    p_vuy.push(t);
                    p_y[y] += t;
                    m += t;
                }
                p_vu.push(m);
                p_u[u] += m;
                for s in 0..ds {
                    let t: f64 = joint[v][u][s].iter().sum();
                    p_vus.push(t);
                    p_us[u * ds + s] += t;
                }
            }
        }
        let i_vuy = h(&p_vu) + h(&p_y) - h(&p_vuy);
        let i_vs_u = h(&p_vu) + h(&p_us) - h(&p_vus) - h(&p_u);
        (i_vuy, i_vs_u)
    }

    fn build(&self) -> (ActionModel<f64>, Strategy<f64>) {
        let [dg, ds, ds0, da, dy] = self.dims;
        let action = KrausChannel::classical_stochastic(
            reg1("G", dg),
            Register::new([("S", ds), ("S0", ds0)]).unwrap(),
            &self.w_action,
        )
        .unwrap();
        let comm = KrausChannel::classical_stochastic(
            Register::new([("S", ds), ("A", da)]).unwrap(),
            reg1("B", dy),
            &self.w_comm,
        )
        .unwrap();
        let states = self.p_g_u.iter().map(|p| DensityMatrix::diagonal(reg1("G", dg), p).unwrap()).collect();
        let encoders = self
            .w_enc
            .iter()
            .map(|w| KrausChannel::classical_stochastic(reg1("S0", ds0), reg1("A", da), w).unwrap())
            .collect();
        (ActionModel::new(action, comm).unwrap(), Strategy::new(self.p_vu.clone(), states, encoders).unwrap())
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn diagonal_instances_match_exhaustive_summation(seed in any::<u64>(), nv in 1usize..4, nu in 1usize..4) {
        let mut rng = generator(seed);
        let inst = Classical::random(&mut rng, nv, nu);
        let (i_vuy, i_vs_u) = inst.rate();
        let (model, strategy) = inst.build();
        let rep = achievable_rate(&assemble(&model, &strategy).unwrap()).unwrap();
        prop_assert!((rep.i_vub - i_vuy).abs() < 1e-9);
        prop_assert!((rep.i_vs_given_u - i_vs_u).abs() < 1e-9);
        prop_assert!((rep.r_low - (i_vuy - i_vs_u)).abs() < 1e-9);
    }

    #[test]
    fn rate_respects_output_dimension(seed in any::<u64>()) {
        let mut rng = generator(seed);
        let model = qadc::verify::random_qubit_model(&mut rng).unwrap();
        let strategy = qadc::verify::random_qubit_strategy(&mut rng).unwrap();
        let bundle = assemble(&model, &strategy).unwrap();
        let rep = achievable_rate(&bundle).unwrap();
        prop_assert!(rep.i_vub >= -1e-10);
        prop_assert!(rep.i_vub <= (model.dim("B") as f64).log2() + 1e-10);
        prop_assert!(rep.capacity_lower_bound >= 0.0);
        // The environment marginal does not depend on v given u.
        for u in 0..bundle.nu() {
            for v in 0..bundle.nv() {
                let s = bundle.rho_sa[v][u].partial_trace(&["S"]).unwrap();
                prop_assert!(max_abs(&(s.matrix() - bundle.sigma_s[u].matrix())) < 1e-10);
            }
        }
        prop_assert!(rep.i_vs_given_u.abs() < 1e-9);
    }

    #[test]
    fn simplex_projection_is_the_euclidean_projection(y in proptest::collection::vec(-2.0..2.0f64, 1..8)) {
        let x = project_to_simplex(&y);
        let sum: f64 = x.iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-12);
        prop_assert!(x.iter().all(|&v| v >= 0.0));
        // KKT: x_i = max(y_i - tau, 0) for a common tau.
        let support: Vec<usize> = (0..x.len()).filter(|&i| x[i] > 0.0).collect();
        let tau = y[support[0]] - x[support[0]];
        for i in 0..x.len() {
            prop_assert!((x[i] - (y[i] - tau).max(0.0)).abs() < 1e-12);
        }
        let again = project_to_simplex(&x);
        prop_assert!(x.iter().zip(&again).all(|(a, b)| (a - b).abs() < 1e-12));
    }
}

#[test]
fn classical_fixture_matches() {
    let (m, s) = load("models/classical_binary.json", "strategies/classical_binary.json");
    let expect: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(data("fixtures/classical_binary.expected.json")).unwrap())
            .unwrap();
    let rep = achievable_rate(&assemble(&m, &s).unwrap()).unwrap();
    assert!((rep.r_low - expect["r_low"].as_f64().unwrap()).abs() < 1e-9);
    assert!((rep.i_vub - expect["i_vub"].as_f64().unwrap()).abs() < 1e-9);
}

#[test]
fn orthogonal_strategy_on_identity_model_gives_one_bit() {
    let (m, s) = load("models/identity_qubit.json", "strategies/identity_qubit.json");
    let rep = achievable_rate(&assemble(&m, &s).unwrap()).unwrap();
    assert!((rep.r_low - 1.0).abs() < 1e-10);
}

#[test]
fn designed_instance_carries_four_bits() {
    let (m, s) = load("models/designed_orthogonal.json", "strategies/designed_orthogonal.json");
    let rep = achievable_rate(&assemble(&m, &s).unwrap()).unwrap();
    assert!((rep.r_low - 4.0).abs() < 1e-9);
}

#[test]
fn depolarizing_model_has_zero_rate_for_any_strategy() {
    let m: ModelFile =
        serde_json::from_str(&std::fs::read_to_string(data("models/depolarizing_qubit.json")).unwrap()).unwrap();
    let model: ActionModel<f64> = m.to_model().unwrap();
    let mut rng = generator(4);
    let strategy = qadc::verify::random_qubit_strategy(&mut rng).unwrap();
    let rep = achievable_rate(&assemble(&model, &strategy).unwrap()).unwrap();
    assert!(rep.r_low.abs() < 1e-9);
}

#[test]
fn digests_are_stable_and_sensitive() {
    let (m, s) = load("models/classical_binary.json", "strategies/classical_binary.json");
    let (m2, s2) = load("models/classical_binary.json", "strategies/classical_binary.json");
    assert_eq!(model_digest(&m), model_digest(&m2));
    assert_eq!(strategy_digest(&s), strategy_digest(&s2));
    let (m3, s3) = load("models/identity_qubit.json", "strategies/identity_qubit.json");
    assert_ne!(model_digest(&m), model_digest(&m3));
    assert_ne!(strategy_digest(&s), strategy_digest(&s3));
}

#[test]
fn files_round_trip_exactly() {
    let (m, s) = load("models/classical_binary.json", "strategies/classical_binary.json");
    let sf = StrategyFile::from_strategy(&s);
    let back: Strategy<f64> =
        serde_json::from_str::<StrategyFile>(&serde_json::to_string(&sf).unwrap()).unwrap().to_strategy().unwrap();
    assert_eq!(strategy_digest(&s), strategy_digest(&back));
    let mf = ModelFile::from_model(&m, Default::default());
    let back: ActionModel<f64> =
        serde_json::from_str::<ModelFile>(&serde_json::to_string(&mf).unwrap()).unwrap().to_model().unwrap();
    assert_eq!(model_digest(&m), model_digest(&back));
}

#[test]
fn optimizer_is_independent_of_worker_count() {
    let m: ModelFile =
        serde_json::from_str(&std::fs::read_to_string(data("models/identity_qubit.json")).unwrap()).unwrap();
    let model: ActionModel<f64> = m.to_model().unwrap();
    let base = OptimizerConfig { restarts: 4, sweeps: 20, seed: 3, workers: 1 };
    let one = optimize_rate(&model, 1, 2, &base).unwrap();
    let four = optimize_rate(&model, 1, 2, &OptimizerConfig { workers: 4, ..base }).unwrap();
    assert_eq!(one.restart_rates, four.restart_rates);
    assert_eq!(one.trace, four.trace);
    assert_eq!(strategy_digest(&one.strategy), strategy_digest(&four.strategy));
    assert!(one.trace.windows(2).all(|w| w[1] >= w[0]));
}
